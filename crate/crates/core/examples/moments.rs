//! Moment table, δm and m_eff for the standard profiles.

use pf_wcl::formfactor::RadialMeasure;

fn main() -> pf_wcl::Result<()> {
    let measures = [
        ("sharp d=3 Λ=1", RadialMeasure::sharp(3, 1.0)?),
        ("sharp d=4 Λ=2", RadialMeasure::sharp(4, 2.0)?),
        ("gaussian d=3 σ=1", RadialMeasure::gaussian(3, 1.0)?),
        ("gaussian d=4 σ=1", RadialMeasure::gaussian(4, 1.0)?),
        ("atom (1,3)", RadialMeasure::point_masses(3, &[(1.0, 3.0)])?),
    ];
    println!("{:<18} {:>12} {:>12} {:>12} {:>12} {:>5} {:>10}", "measure", "M+1", "M-1", "M-2", "M-3", "IR", "m_eff");
    for (name, ff) in &measures {
        let r = ff.moment_report();
        println!(
            "{name:<18} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>5} {:>10.6}",
            r.m_plus1, r.m_minus1, r.m_minus2, r.m_minus3, r.ir_regular, r.m_eff
        );
    }

    // Sharp cutoff in two dimensions: φ/ω is not square-integrable.
    match RadialMeasure::sharp(2, 1.0) {
        Ok(_) => println!("sharp d=2 unexpectedly accepted"),
        Err(e) => println!("sharp d=2 rejected: {e}"),
    }
    Ok(())
}

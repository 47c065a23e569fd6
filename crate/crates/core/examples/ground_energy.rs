//! Ground energy 𝓔 of ½A² + H_f by two independent integrals, and the
//! discrete cross-check against the Bogoliubov formula.

use pf_wcl::energy::{g_spectral_energy, ground_energy, log_spectral_energy};
use pf_wcl::fockdesk::{bogoliubov_energy, Mode};
use pf_wcl::formfactor::RadialMeasure;

fn main() -> pf_wcl::Result<()> {
    let atom = RadialMeasure::point_masses(3, &[(1.0, 3.0)])?;
    let e = ground_energy(&atom)?;
    println!("single atom (1,3):");
    println!("  G quadrature          {:.15}", e.cal_e);
    println!("  ½·log-spectral        {:.15}", 0.5 * log_spectral_energy(&atom, 1.0)?);
    println!("  Bogoliubov            {:.15}", bogoliubov_energy(&[Mode::new(1.0, 3.0, 0.0)])?);

    let atoms = [(1.0, 1.0), (2.0, 2.0), (3.5, 0.25)];
    let ff = RadialMeasure::point_masses(3, &atoms)?;
    let modes: Vec<Mode> = atoms.iter().map(|&(w, wt)| Mode::new(w, wt, 0.0)).collect();
    println!("three atoms:");
    println!("  G quadrature          {:.15}", ground_energy(&ff)?.cal_e);
    println!("  Bogoliubov            {:.15}", bogoliubov_energy(&modes)?);

    println!("continuum, κ = 1, 2:");
    for (name, ff) in [("gaussian σ=1", RadialMeasure::gaussian(3, 1.0)?), ("sharp Λ=1", RadialMeasure::sharp(3, 1.0)?)] {
        for kappa in [1.0, 2.0] {
            let a = log_spectral_energy(&ff, kappa)?;
            let b = g_spectral_energy(&ff, kappa)?;
            println!("  {name:<13} κ={kappa}  log-spectral {a:.12}  G-side {b:.12}  rel {:.1e}", (a - b).abs() / a);
        }
    }
    Ok(())
}

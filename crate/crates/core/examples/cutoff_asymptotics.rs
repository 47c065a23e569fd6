//! E(Λ)/Λ^{3/2} for the sharp cutoff in three dimensions, with the split
//! at u = Λ^{-1/4}.

use pf_wcl::energy::{cutoff_energy_3d, cutoff_split};
use std::f64::consts::PI;

fn main() -> pf_wcl::Result<()> {
    let (lo, hi) = ((2.0 * PI / 3.0).sqrt(), (2.0 * PI).sqrt());
    println!("bracket [{lo:.5}, {hi:.5}]");
    println!("{:>8} {:>22} {:>12} {:>12} {:>12}", "Λ", "E(Λ)", "E/Λ^1.5", "I1/√Λ", "I2/√Λ");
    for k in 1..=8 {
        let lambda = 10f64.powi(k);
        let e = cutoff_energy_3d(lambda)?;
        let (i1, i2) = cutoff_split(lambda)?;
        let s = lambda.sqrt();
        println!("{lambda:>8.0e} {e:>22.10} {:>12.6} {:>12.6} {:>12.6}", e / lambda.powf(1.5), i1 / s, i2 / s);
    }
    Ok(())
}

//! Semigroup residual ‖e^{-T(H_κ(p) − κ²𝓔)} − P_g e^{-T(p−P_f)²/(2m)}‖ along κ,
//! and the conjugation identity of the dipole fiber.

use pf_wcl::fockdesk::{conjugation_residual, semigroup_wcl_residual, FiberOperators, FockBasis, Mode};

fn main() -> pf_wcl::Result<()> {
    let modes = [Mode::new(1.0, 1.0, 0.6), Mode::new(2.0, 2.0, -0.6)];
    let ops = FiberOperators::new(FockBasis::new(&modes, 30)?);
    for kappa in [1.0, 2.0, 4.0] {
        println!("κ={kappa}: semigroup residual (T=1, p=0.2) {:.6}", semigroup_wcl_residual(&ops, kappa, 0.2, 1.0, 1.0)?);
    }
    for n in [10, 20, 40] {
        let one = FiberOperators::new(FockBasis::new(&[Mode::new(1.0, 3.0, 0.0)], n)?);
        println!("N={n:<3} conjugation residual (κ=1, p=0.5) {:.3e}", conjugation_residual(&one, 1.0, 0.5)?);
    }
    Ok(())
}

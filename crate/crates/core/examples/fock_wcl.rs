//! Weak-coupling scan on the two-mode desk model: dispersion gap against
//! p²/(2 m_eff) along κ, for the dipole (ε=0) and full (ε=1) fibers.

use pf_wcl::fockdesk::{diamagnetic_check, m_eff_disc, max_ntot_for, wcl_scan, FiberOperators, FockBasis, Mode, MAX_DENSE};

fn main() -> pf_wcl::Result<()> {
    let modes = [Mode::new(1.0, 1.0, 0.6), Mode::new(2.0, 2.0, -0.6)];
    // Smaller than the dense limit to keep the example quick.
    let ntot = max_ntot_for(modes.len(), MAX_DENSE / 2);
    let ops = FiberOperators::new(FockBasis::new(&modes, ntot)?);
    println!("N = {ntot}, dim = {}, m_eff = {}", ops.dim(), m_eff_disc(&modes));
    for eps in [0.0, 1.0] {
        println!("ε = {eps}");
        for r in wcl_scan(&ops, &[1.0, 2.0, 4.0, 8.0], &[0.0, 0.2], eps, None)?.iter().filter(|r| r.p > 0.0) {
            println!("  κ={:<3} gap={:.10} target={:.4} |dev|={:.3e} E0_dev={:.3e}", r.kappa, r.gap, r.target, r.gap_dev, r.e0_dev);
        }
    }
    let dia = diamagnetic_check(&ops, 2.0, &[0.1, 0.2, 0.4], 1.0)?;
    println!("diamagnetic E(0) ≤ E(p): {}", dia.iter().all(|r| r.holds));
    Ok(())
}

//! Effective mass three ways: the moment formula, the inverse of the
//! Wiener-Hopf mass functional, and the curvature of the desk dispersion.

use pf_wcl::fockdesk::{m_eff_disc, wcl_scan, FiberOperators, FockBasis, Mode};
use pf_wcl::formfactor::RadialMeasure;
use pf_wcl::wienerhopf::WienerHopfGrid;

fn main() -> pf_wcl::Result<()> {
    let ff = RadialMeasure::point_masses(3, &[(1.0, 1.0), (2.0, 2.0)])?;
    println!("m_eff from moments      {:.10}", ff.m_eff()?);

    let grid = WienerHopfGrid::build(&ff, 1.0, 40.0, 1600)?;
    println!("1/mass functional, T=40 {:.10}", 1.0 / grid.mass_functional()?);

    let modes = [Mode::new(1.0, 1.0, 0.6), Mode::new(2.0, 2.0, -0.6)];
    let ops = FiberOperators::new(FockBasis::new(&modes, 40)?);
    let p = 0.2;
    let rows = wcl_scan(&ops, &[1.0], &[0.0, p], 0.0, None)?;
    println!("dipole desk p²/(2·gap)  {:.10}", p * p / (2.0 * rows[1].gap));
    println!("m_eff_disc              {:.10}", m_eff_disc(&modes));
    Ok(())
}

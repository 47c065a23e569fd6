//! Generalized Hermite polynomials: values, generating-function residual,
//! the growth bound and the seeded invariant report.

use pf_wcl::hermite::{bound_check, generating_function_residual, hermite, invariant_report};

fn main() -> pf_wcl::Result<()> {
    for n in [0, 1, 2, 5, 10, 40] {
        println!("H_{n}(a=0.5, x=0.3) = {:+.15e}", hermite(n, 0.5, 0.3)?);
    }
    for big_n in [10, 20, 40, 60] {
        println!("generating residual N={big_n:<3} {:.3e}", generating_function_residual(0.5, 0.3, 0.7, big_n)?);
    }
    let b = bound_check(40, 4.0, 5.0)?;
    println!("bound at n=40 a=4 x=5: log|H| = {:.4}, log bound = {:.4}, holds = {}", b.log_abs_value, b.log_bound, b.holds);

    let report = invariant_report(42)?;
    println!("invariant report (seed 42): pass = {}", report.pass);
    println!("  generating operator residual {:.3e}", report.generating_operator_residual);
    Ok(())
}

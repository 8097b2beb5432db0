//! Verify that a weight symmetrizes its operator: the three moment
//! equations (Hermiticity, first-order, zeroth-order) must vanish on a
//! grid, the boundary terms must vanish, and the check must be sharp -
//! perturbing any single operator entry by `1e-3` has to push some
//! residual far above the tolerance.
//!
//! ```text
//! cargo run --example verify_symmetry
//! ```

use matlag::symmetry::{check, default_grid, perturbation_sensitivity, DEFAULT_TOL};
use matlag::weights::WeightSpec;

fn main() -> matlag::Result<()> {
    let spec = WeightSpec::F2 { alpha: 0.5, b: 0.4 };
    let op = spec.operator()?;
    let grid = default_grid();

    let report = check(&op, &spec, &grid, DEFAULT_TOL)?;
    println!("{spec} against its own operator:");
    println!("  t        e1           e2           e3");
    for p in &report.points {
        println!(
            "  {:<8} {:.3e}    {:.3e}    {:.3e}",
            p.t, p.e1, p.e2, p.e3
        );
    }
    println!("  worst residual      : {:.3e} (tol {DEFAULT_TOL:.0e})", report.worst);
    println!(
        "  boundary            : vanishes at 0 = {}, decays at oo = {}",
        report.boundary.vanishes_at_zero, report.boundary.decays_at_infinity
    );
    let fd_worst = report
        .derivative_checks
        .iter()
        .map(|(_, m)| *m)
        .fold(0.0f64, f64::max);
    println!("  derivative stencils : {fd_worst:.3e} (independent finite-difference check)");
    println!("  PASS = {}", report.pass);
    assert!(report.pass);

    let sensitivity = perturbation_sensitivity(&op, &spec, &grid)?;
    println!("\nsmallest worst-residual over all 1e-3 single-entry perturbations: {sensitivity:.3e}");
    assert!(sensitivity > 1e-5, "the equations must reject near misses");

    // A genuinely wrong pairing fails loudly.
    let wrong = WeightSpec::F2 { alpha: 1.5, b: 0.4 }.operator()?;
    let bad = check(&wrong, &spec, &grid, DEFAULT_TOL)?;
    println!("mismatched operator: worst residual {:.3e}, PASS = {}", bad.worst, bad.pass);
    assert!(!bad.pass);
    Ok(())
}

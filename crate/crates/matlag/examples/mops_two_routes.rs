//! Build the monic orthogonal polynomial sequence of a matrix weight
//! by two independent routes and compare them coefficient by
//! coefficient.
//!
//! Route 1 orthogonalizes monomials against quadrature moments (the
//! normal equations).  Route 2 never integrates: it solves the
//! coefficient ladder that the operator's eigenvalue equation
//! `D P_n = P_n Delta_n` imposes.  For the first family the ladder is
//! singular at `k = n - 1` for every degree (an integer resonance) and
//! a one-dimensional completion is pinned by orthogonality; the routes
//! still agree to working precision.
//!
//! ```text
//! cargo run --example mops_two_routes
//! ```

use matlag::mops::{build_by_moments, build_by_recursion, compare_routes, favard_check};
use matlag::weights::WeightSpec;

fn main() -> matlag::Result<()> {
    let spec = WeightSpec::F1 {
        alpha: 0.5,
        beta: 1.5,
        b: 0.7,
    };
    let op = spec.operator()?;
    let n_max = 8;

    let seq = build_by_moments(&spec, n_max)?;
    println!("moment route: degrees 0..={n_max} for {spec}");
    println!("  orthogonality residual : {:.3e}", seq.orthogonality_residual());
    println!("  recurrence residual    : {:.3e}", seq.recurrence_residual());
    let eigen = seq.eigen_residuals(&op)?;
    let eigen_worst = eigen.iter().cloned().fold(0.0f64, f64::max);
    println!("  eigen-equation residual: {eigen_worst:.3e}");

    let rec = build_by_recursion(&op, n_max, Some(&seq))?;
    println!("ladder route:");
    println!("  resonant cells         : {:?}", rec.report.resonances);
    let gap = compare_routes(&rec.polys, &seq.polys);
    println!("  route disagreement     : {gap:.3e}");
    assert!(gap < 1e-10, "routes must agree");

    // The positivity package of the three-term recurrence
    // P_{n+1} = (t I - B_n) P_n - A_n P_{n-1}.
    let favard = favard_check(&seq, Some(&op));
    println!("recurrence package:");
    println!(
        "  A_n vs Gram ratio      : {:.3e}",
        favard.a_vs_gram.iter().cloned().fold(0.0f64, f64::max)
    );
    println!(
        "  S_n B_n Hermiticity    : {:.3e}",
        favard.snbn_hermitian.iter().cloned().fold(0.0f64, f64::max)
    );
    println!("  all Grams positive     : {}", favard.grams_positive.iter().all(|x| *x));
    assert!(favard.pass(1e-8));

    println!("\nB_0 = {:?}", seq.b[0]);
    println!("A_1 = {:?}", seq.a[0]);
    Ok(())
}

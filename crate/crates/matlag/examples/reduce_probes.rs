//! Probe weights for hidden reducibility through two commutants.
//!
//! The weight probe collects the real-linear space of matrices `T`
//! with `W(t_i) T = T* W(t_i)` over sampled points; the coefficient
//! probe collects the complex-linear space commuting with every lower
//! polynomial coefficient.  A scalar-only commutant (dimension 1)
//! certifies irreducibility of the sampled data; anything larger
//! exhibits explicit reduction directions.
//!
//! ```text
//! cargo run --example reduce_probes
//! ```

use matlag::mops::build_by_moments;
use matlag::reduce::{default_samples, mop_commutant, weight_commutant, CommutantVerdict};
use matlag::weights::WeightSpec;

fn main() -> matlag::Result<()> {
    let samples = default_samples();

    for spec in [
        WeightSpec::F1 {
            alpha: 0.5,
            beta: 1.5,
            b: 0.7,
        },
        WeightSpec::F2 { alpha: 0.5, b: 0.4 },
        WeightSpec::F3 { beta: 4.0 },
    ] {
        let weight = weight_commutant(&spec, &samples)?;
        let seq = build_by_moments(&spec, 4)?;
        let coeff = mop_commutant(&seq)?;
        println!("{spec}:");
        println!(
            "  weight probe      : dim {} -> {}",
            weight.dimension,
            weight.interpretation()
        );
        println!(
            "  coefficient probe : dim {} -> {}",
            coeff.dimension,
            coeff.interpretation()
        );
        assert_eq!(weight.verdict, CommutantVerdict::ScalarOnly);
        assert_eq!(coeff.verdict, CommutantVerdict::ScalarOnly);
        println!();
    }

    // A visibly decoupled weight: diag(e^-t t^a, e^-t t^(a+1)).
    let decoupled = WeightSpec::DiagLaguerre {
        alpha1: 0.5,
        alpha2: 1.5,
    };
    let weight = weight_commutant(&decoupled, &samples)?;
    let seq = build_by_moments(&decoupled, 4)?;
    let coeff = mop_commutant(&seq)?;
    println!("{decoupled}:");
    println!(
        "  weight probe      : dim {} -> {}",
        weight.dimension,
        weight.interpretation()
    );
    for (i, basis) in weight.basis.iter().enumerate() {
        println!("    direction {i}: {basis:?}");
    }
    println!(
        "  coefficient probe : dim {} -> {}",
        coeff.dimension,
        coeff.interpretation()
    );
    assert_eq!(weight.verdict, CommutantVerdict::NonScalar);
    assert_eq!(coeff.verdict, CommutantVerdict::NonScalar);
    assert_eq!(weight.dimension, 2);
    Ok(())
}

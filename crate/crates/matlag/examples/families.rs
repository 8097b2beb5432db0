//! Construct every built-in family: the three canonical
//! operator-weight pairs, the four raw symmetric forms, and the
//! decoupled diagonal Laguerre baseline.
//!
//! For each pair the example prints the operator matrices, evaluates
//! the weight at a point, and probes the boundary behaviour required
//! for symmetry: `t W(t) -> 0` at the origin and exponential decay at
//! infinity.
//!
//! ```text
//! cargo run --example families
//! ```

use matlag::quad::boundary_probe;
use matlag::weights::WeightSpec;
use num_complex::Complex64;

fn main() -> matlag::Result<()> {
    let specs = [
        WeightSpec::F1 {
            alpha: 0.0,
            beta: 1.0,
            b: 1.0,
        },
        WeightSpec::F2 { alpha: 0.5, b: 0.4 },
        WeightSpec::F3 { beta: 4.0 },
        WeightSpec::RawVEqU {
            u: 1.0,
            c21: 1.0,
            c22: 3.0,
            gamma: 1.0,
        },
        WeightSpec::RawVEq2U {
            u: 1.0,
            c21: 1.0,
            gamma: 0.5,
        },
        WeightSpec::RawVEqHalfU { u: 1.0, c22: 1.5 },
        WeightSpec::RawScalarU {
            u: 1.0,
            c21: Complex64::new(0.5, 0.5),
            c22: 2.0,
            gamma: 1.0,
        },
        WeightSpec::DiagLaguerre {
            alpha1: 0.5,
            alpha2: 1.5,
        },
    ];

    for spec in specs {
        let op = spec.operator()?;
        println!("== {spec}");
        println!("   C = {:?}", op.c);
        println!("   U = {:?}", op.u);
        println!("   V = {:?}", op.v);

        let jet = spec.eval(1.0)?;
        println!("   W(1)  = {:?}", jet.w);
        assert!(
            jet.w.is_hermitian(1e-12),
            "weights are Hermitian pointwise"
        );

        let boundary = boundary_probe(&spec, &op)?;
        println!(
            "   boundary: vanishes at 0 = {} (exponent {:.3}), decays at oo = {} (rate {:.3})",
            boundary.vanishes_at_zero,
            boundary.small_exponent,
            boundary.decays_at_infinity,
            boundary.large_decay_rate
        );
        assert!(boundary.vanishes_at_zero && boundary.decays_at_infinity);
        println!();
    }
    Ok(())
}

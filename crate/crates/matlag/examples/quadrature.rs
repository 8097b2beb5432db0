//! Exercise the half-line quadrature that underpins the moment route:
//! double-exponential integration of `t^k W(t)` with error estimates,
//! validated against closed forms.
//!
//! The third family's weight has the exact normalization
//! `integral W_22(t) dt = 2 sqrt(pi) exp(beta / 4)`, and the diagonal
//! Laguerre weight has Gamma-function moments - both are reproduced to
//! near machine precision.
//!
//! ```text
//! cargo run --example quadrature
//! ```

use std::f64::consts::PI;

use matlag::quad::{default_budget, weight_moment, DEFAULT_TARGET};
use matlag::weights::WeightSpec;
use statrs::function::gamma::gamma;

fn main() -> matlag::Result<()> {
    println!("evaluation budget: {}\n", default_budget());

    for beta in [0.5, 4.0] {
        let spec = WeightSpec::F3 { beta };
        let m0 = weight_moment(&spec, 0, DEFAULT_TARGET, default_budget())?;
        let exact = 2.0 * PI.sqrt() * (beta / 4.0).exp();
        let got = m0.value.e[1][1].re;
        println!("{spec}: integral of entry (2,2)");
        println!("  quadrature : {got:.15}");
        println!("  closed form: {exact:.15}");
        println!(
            "  deviation {:.2e}, estimated error {:.2e}, {} evaluations",
            (got - exact).abs(),
            m0.abs_error_estimate,
            m0.evaluations
        );
        assert!((got - exact).abs() <= 1e-10 * (1.0 + exact));
        println!();
    }

    // Scalar Laguerre moments: integral t^(alpha + k) e^-t = Gamma(alpha + k + 1).
    let alpha = 0.5;
    let spec = WeightSpec::DiagLaguerre {
        alpha1: alpha,
        alpha2: alpha,
    };
    println!("{spec}: moments against the Gamma function");
    for k in 0..5usize {
        let mk = weight_moment(&spec, k, DEFAULT_TARGET, default_budget())?;
        let exact = gamma(alpha + k as f64 + 1.0);
        let got = mk.value.e[0][0].re;
        println!("  k = {k}: {got:.12}  (Gamma: {exact:.12})");
        assert!((got - exact).abs() <= 1e-10 * (1.0 + exact));
    }
    Ok(())
}

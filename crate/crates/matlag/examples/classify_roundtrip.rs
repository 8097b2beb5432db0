//! Disguise a canonical operator behind the full equivalence group -
//! a diagonal shift of `V`, a rescale of the time variable, and a
//! random-looking change of basis - then classify the result and
//! replay the recovered witness to land back on the canonical form.
//!
//! Also walks the negative side: a refusal corpus covering every
//! refusal tag, and a decoupled pair reported as reducible.
//!
//! ```text
//! cargo run --example classify_roundtrip
//! ```

use matlag::classify::{canonical_operator, classify, refusal_corpus, replay, Verdict};
use matlag::operators::LagOperator;
use matlag::CMat2;
use num_complex::Complex64;

fn main() -> matlag::Result<()> {
    let canonical = LagOperator::family1(1.0, 3.0, 0.7)?;
    let frame = CMat2::new([
        [Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.1)],
        [Complex64::new(0.0, -0.2), Complex64::new(2.0, 0.0)],
    ]);
    let input = canonical
        .shift_v(Complex64::new(-0.8, 0.0))
        .rescale_time(1.0 / 2.5)?
        .conjugate(&frame.inverse()?)?;

    let cls = classify(&input);
    println!("disguised first-family operator classified as: {:?}", cls.verdict);
    println!("  recovered time scale : {}", cls.u_scale);
    println!("  recovered v22 shift  : {}", cls.v22_shift);
    match cls.verdict {
        Verdict::Family1 { alpha, beta, .. } => {
            assert!((alpha - 1.0).abs() < 1e-7 && (beta - 3.0).abs() < 1e-7);
        }
        ref other => panic!("unexpected verdict {other:?}"),
    }

    // The witness is exact: shift, rescale, and conjugate the *input*
    // and compare with the canonical member named by the verdict.
    let replayed = replay(&input, &cls)?;
    let target = canonical_operator(&cls.verdict)?;
    let gap = (replayed.c - target.c)
        .norm_inf()
        .max((replayed.u - target.u).norm_inf())
        .max((replayed.v - target.v).norm_inf());
    println!("  witness replay gap   : {gap:.3e}");
    assert!(gap < 1e-8);

    println!("\nrefusal corpus:");
    for (op, want) in refusal_corpus() {
        let got = classify(&op).verdict;
        match got {
            Verdict::NotSymmetrizable { reason } => {
                println!("  {want:<32} -> {reason}");
                assert_eq!(reason, want);
            }
            other => panic!("expected refusal {want}, got {other:?}"),
        }
    }

    let decoupled = LagOperator::new(
        CMat2::from_real([[3.0, 0.0], [0.0, 1.0]]),
        CMat2::identity(),
        CMat2::from_real([[1.0, 0.0], [0.0, 0.0]]),
    );
    let verdict = classify(&decoupled).verdict;
    println!("\ndecoupled scalar pair -> {verdict:?}");
    assert_eq!(verdict, Verdict::Reducible);
    Ok(())
}

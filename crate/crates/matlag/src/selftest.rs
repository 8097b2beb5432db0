//! Built-in acceptance suite: ten numbered end-to-end checks.
//!
//! Each criterion exercises one capability against closed forms or
//! cross-route agreement: the degree-one anchor, orthogonality across a
//! parameter grid, the operator eigenvalue equation, the recurrence
//! consistency package, the weight symmetry equations, agreement of the
//! moment and ladder construction routes, the scalar Laguerre baseline,
//! randomized classification roundtrips with a refusal corpus, the
//! commutant irreducibility probes, and an explicit normalization
//! integral.  Criteria with a stated wall-clock budget fail when they
//! exceed it, so the suite doubles as a coarse performance guard.
//!
//! All randomness is drawn from a seeded ChaCha stream; outputs are
//! reproducible for a fixed seed.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{self, Verdict};
use crate::cmat::CMat2;
use crate::error::{Error, Result};
use crate::mops::{
    build_by_moments, build_by_recursion, compare_routes, favard_check, MomentTable,
};
use crate::operators::LagOperator;
use crate::reduce::{self, CommutantVerdict};
use crate::symmetry;
use crate::weights::WeightSpec;

/// Number of criteria in the suite.
pub const COUNT: usize = 10;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 1;

/// Parameter and witness tolerances for criterion 8.
const PARAM_TOL: f64 = 1e-7;
const REPLAY_TOL: f64 = 1e-8;

const NAMES: [&str; COUNT] = [
    "degree-one closed forms",
    "orthogonality across the parameter grid",
    "operator eigenvalue equation",
    "recurrence consistency package",
    "weight symmetry equations",
    "moment and ladder route agreement",
    "scalar Laguerre baseline",
    "classification roundtrips and refusals",
    "commutant irreducibility probes",
    "explicit normalization integral",
];

/// Wall-clock budgets in milliseconds (`None`: no budget).
const TIME_LIMIT_MS: [Option<u128>; COUNT] = [
    Some(1_000),
    Some(60_000),
    None,
    None,
    None,
    None,
    None,
    Some(30_000),
    None,
    None,
];

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    /// Criterion number, `1..=COUNT`.
    pub id: usize,
    /// Short capability name.
    pub name: String,
    /// Whether every check (and any time budget) held.
    pub passed: bool,
    /// One-line diagnostic with the decisive numbers.
    pub detail: String,
    /// Wall-clock time.
    pub millis: u128,
}

/// Run one criterion.
///
/// # Errors
///
/// [`Error::InvalidInput`] when `id` is outside `1..=COUNT`.  Numerical
/// failures inside a criterion are reported through `passed = false`,
/// not as errors.
pub fn run(id: usize, seed: u64) -> Result<CriterionResult> {
    if !(1..=COUNT).contains(&id) {
        return Err(Error::InvalidInput(format!(
            "criterion id {id} out of range 1..={COUNT}"
        )));
    }
    let start = Instant::now();
    let outcome = match id {
        1 => degree_one_anchor(),
        2 => orthogonality_sweep(),
        3 => eigen_equation(),
        4 => recurrence_consistency(),
        5 => symmetry_equations(),
        6 => route_agreement(),
        7 => scalar_laguerre_baseline(),
        8 => classification_roundtrips(seed),
        9 => commutant_probes(),
        _ => normalization_integral(),
    };
    let millis = start.elapsed().as_millis();
    let (mut passed, mut detail) = match outcome {
        Ok(pair) => pair,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(limit) = TIME_LIMIT_MS[id - 1] {
        if millis > limit {
            passed = false;
            detail.push_str(&format!("; exceeded the {limit} ms budget"));
        }
    }
    Ok(CriterionResult {
        id,
        name: NAMES[id - 1].to_string(),
        passed,
        detail,
        millis,
    })
}

/// Run the full suite in order.
///
/// # Errors
///
/// Never fails for valid internal ids; the signature matches [`run`].
pub fn run_all(seed: u64) -> Result<Vec<CriterionResult>> {
    (1..=COUNT).map(|id| run(id, seed)).collect()
}

/// `true` when every criterion passed.
pub fn all_passed(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.passed)
}

/// Fixed-width summary table, one line per criterion plus a tally.
pub fn format_table(results: &[CriterionResult]) -> String {
    let width = results
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut out = format!("{:>2}  {:<width$}  {:<4}  {:>7}  detail\n", "id", "name", "ok", "ms");
    for r in results {
        let ok = if r.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "{:>2}  {:<width$}  {:<4}  {:>7}  {}\n",
            r.id, r.name, ok, r.millis, r.detail
        ));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    out
}

/// The canonical-parameter grid shared by criteria 2-4: eighteen
/// first-family weights, four second-family, two third-family.
fn parameter_grid() -> Vec<WeightSpec> {
    let mut specs = Vec::new();
    for &alpha in &[-0.5, 0.0, 1.5] {
        for &beta in &[0.5, 1.0, 3.0] {
            for &b in &[-1.0, 0.7] {
                specs.push(WeightSpec::F1 { alpha, beta, b });
            }
        }
    }
    for &alpha in &[-0.5, 1.0] {
        for &b in &[0.3, -0.9] {
            specs.push(WeightSpec::F2 { alpha, b });
        }
    }
    for &beta in &[0.5, 4.0] {
        specs.push(WeightSpec::F3 { beta });
    }
    specs
}

/// Three canonical pairs plus the four raw symmetric families.
fn symmetric_pairs() -> Vec<WeightSpec> {
    vec![
        WeightSpec::F1 {
            alpha: 0.5,
            beta: 1.5,
            b: 0.7,
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
    ]
}

/// Criterion 1: closed forms at degree one for the first family at
/// `alpha = 0`, `beta = 1`, `b = 1`, checked to `1e-10`, including the
/// eigenvalue equation for `P_1`.
fn degree_one_anchor() -> Result<(bool, String)> {
    const TOL: f64 = 1e-10;
    let spec = WeightSpec::F1 {
        alpha: 0.0,
        beta: 1.0,
        b: 1.0,
    };
    let op = spec.operator()?;
    let seq = build_by_moments(&spec, 1)?;
    let s0 = CMat2::from_real([[3.0, 1.0], [1.0, 1.0]]);
    let p1 = CMat2::from_real([[-3.0, -0.5], [1.0, -0.5]]);
    let b0 = CMat2::from_real([[3.0, 0.5], [-1.0, 0.5]]);
    let delta1 = CMat2::from_real([[-2.0, 0.0], [2.0, -1.0]]);
    let mut worst = (seq.grams[0] - s0).norm_inf();
    worst = worst.max((seq.polys[1].coeffs[0] - p1).norm_inf());
    worst = worst.max((seq.b[0] - b0).norm_inf());
    worst = worst.max((op.delta(1) - delta1).norm_inf());
    let residual = op.apply(&seq.polys[1]).sub(&seq.polys[1].mul_right(&delta1));
    worst = worst.max(residual.coeff_norm());
    Ok((
        worst <= TOL,
        format!("worst closed-form deviation {worst:.2e} (tol {TOL:.0e})"),
    ))
}

/// Criterion 2: scaled cross-Gram norms at or below `1e-8` for all
/// degree pairs up to 10 over the full parameter grid.
fn orthogonality_sweep() -> Result<(bool, String)> {
    const TOL: f64 = 1e-8;
    let mut worst = 0.0f64;
    let mut at = String::new();
    for spec in parameter_grid() {
        let seq = build_by_moments(&spec, 10)?;
        let r = seq.orthogonality_residual();
        if r > worst {
            worst = r;
            at = spec.to_string();
        }
    }
    Ok((
        worst <= TOL,
        format!("24 weights, degrees <= 10; worst scaled cross-Gram {worst:.2e} at {at} (tol {TOL:.0e})"),
    ))
}

/// Criterion 3: relative eigenvalue-equation residuals at or below
/// `1e-8` for every degree up to 10 over the same grid.
fn eigen_equation() -> Result<(bool, String)> {
    const TOL: f64 = 1e-8;
    let mut worst = 0.0f64;
    let mut at = String::new();
    for spec in parameter_grid() {
        let op = spec.operator()?;
        let seq = build_by_moments(&spec, 10)?;
        for r in seq.eigen_residuals(&op)? {
            if r > worst {
                worst = r;
                at = spec.to_string();
            }
        }
    }
    Ok((
        worst <= TOL,
        format!("worst relative eigen residual {worst:.2e} at {at} (tol {TOL:.0e})"),
    ))
}

/// Criterion 4: the recurrence package over the same grid - Gram ratio
/// identity for `A_n`, Hermiticity of `S_n B_n`, nonsingular `A_n`,
/// positive Grams, and the eigenvalue-data identities, all to `1e-8`.
fn recurrence_consistency() -> Result<(bool, String)> {
    const TOL: f64 = 1e-8;
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut at = String::new();
    for spec in parameter_grid() {
        let op = spec.operator()?;
        let seq = build_by_moments(&spec, 10)?;
        let report = favard_check(&seq, Some(&op));
        if !report.pass(TOL) {
            pass = false;
            at = spec.to_string();
        }
        let local = report
            .a_vs_gram
            .iter()
            .chain(&report.snbn_hermitian)
            .chain(&report.nun_residuals)
            .chain(report.v21_residual.iter())
            .fold(0.0f64, |acc, r| acc.max(*r));
        worst = worst.max(local);
    }
    let detail = if pass {
        format!("worst identity residual {worst:.2e} (tol {TOL:.0e})")
    } else {
        format!("failed at {at}; worst identity residual {worst:.2e}")
    };
    Ok((pass, detail))
}

/// Criterion 5: the three symmetry equations hold to `1e-8` on the
/// standard grid with correct boundary behaviour for all seven
/// symmetric pairs, and a `1e-3` perturbation of any single operator
/// entry drives some residual above `1e-5`.
fn symmetry_equations() -> Result<(bool, String)> {
    const TOL: f64 = 1e-8;
    let grid = symmetry::default_grid();
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut weakest = f64::INFINITY;
    let mut at = String::new();
    for spec in symmetric_pairs() {
        let op = spec.operator()?;
        let report = symmetry::check(&op, &spec, &grid, TOL)?;
        if !report.pass {
            pass = false;
            at = spec.to_string();
        }
        worst = worst.max(report.worst);
        let sensitivity = symmetry::perturbation_sensitivity(&op, &spec, &grid)?;
        weakest = weakest.min(sensitivity);
        if sensitivity <= symmetry::SENSITIVITY_FLOOR {
            pass = false;
            at = format!("{spec} (perturbation response)");
        }
    }
    let detail = if pass {
        format!(
            "7 pairs; worst residual {worst:.2e} (tol {TOL:.0e}); weakest perturbation response {weakest:.2e} (floor {:.0e})",
            symmetry::SENSITIVITY_FLOOR
        )
    } else {
        format!("failed at {at}; worst residual {worst:.2e}")
    };
    Ok((pass, detail))
}

/// Criterion 6: the ladder recursion reproduces every moment-route
/// coefficient to `1e-8` through degree 10 for one member of each
/// canonical family, passing through the first-family resonance at
/// `k = n - 1` and the second-family resonance at `k = n - 2`.
fn route_agreement() -> Result<(bool, String)> {
    const TOL: f64 = 1e-8;
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    let cases: [(WeightSpec, fn(usize) -> Option<usize>); 3] = [
        (
            WeightSpec::F1 {
                alpha: 0.5,
                beta: 1.5,
                b: 0.7,
            },
            |n| n.checked_sub(1),
        ),
        (WeightSpec::F2 { alpha: 0.5, b: 0.4 }, |n| n.checked_sub(2)),
        (WeightSpec::F3 { beta: 4.0 }, |_| None),
    ];
    for (spec, resonant_k) in cases {
        let op = spec.operator()?;
        let seq = build_by_moments(&spec, 10)?;
        let rec = build_by_recursion(&op, 10, Some(&seq))?;
        let diff = compare_routes(&rec.polys, &seq.polys);
        worst = worst.max(diff);
        if diff > TOL {
            pass = false;
            notes.push(format!("{spec}: route gap {diff:.2e}"));
        }
        let expected: Vec<(usize, usize)> = (1..=10)
            .filter_map(|n| resonant_k(n).map(|k| (n, k)))
            .collect();
        for want in &expected {
            if !rec.report.resonances.contains(want) {
                pass = false;
                notes.push(format!("{spec}: missing resonance {want:?}"));
            }
        }
        if expected.is_empty() && !rec.report.resonances.is_empty() {
            pass = false;
            notes.push(format!("{spec}: unexpected resonances"));
        }
    }
    let detail = if pass {
        format!("3 families, degrees <= 10; worst coefficient gap {worst:.2e} (tol {TOL:.0e})")
    } else {
        notes.join("; ")
    };
    Ok((pass, detail))
}

/// Criterion 7: for the scalar diagonal Laguerre weight the recurrence
/// matrices equal the classical values `B_n = (2n + alpha + 1) I` and
/// `A_n = n (n + alpha) I` to `1e-10` through degree 10.
fn scalar_laguerre_baseline() -> Result<(bool, String)> {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    for &alpha in &[-0.5, 0.0, 2.0] {
        let spec = WeightSpec::DiagLaguerre {
            alpha1: alpha,
            alpha2: alpha,
        };
        let seq = build_by_moments(&spec, 10)?;
        for n in 0..=10usize {
            let nf = n as f64;
            let bn = CMat2::scalar(Complex64::new(2.0 * nf + alpha + 1.0, 0.0));
            worst = worst.max((seq.b[n] - bn).norm_inf());
            if n >= 1 {
                let an = CMat2::scalar(Complex64::new(nf * (nf + alpha), 0.0));
                worst = worst.max((seq.a[n - 1] - an).norm_inf());
            }
        }
    }
    Ok((
        worst <= TOL,
        format!("three exponents, degrees <= 10; worst deviation {worst:.2e} (tol {TOL:.0e})"),
    ))
}

/// Expected positive verdict for one randomized trial.  A `None`
/// coupling means the trial applied a basis change, after which only
/// the conjugation-invariant parameters are pinned.
#[derive(Debug)]
enum Expected {
    F1 { alpha: f64, beta: f64, b: Option<f64> },
    F2 { alpha: f64, b: Option<f64> },
    F3 { beta: f64 },
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= PARAM_TOL * (1.0 + y.abs())
}

fn check_verdict(verdict: &Verdict, expected: &Expected) -> Option<String> {
    let ok = match (verdict, expected) {
        (
            Verdict::Family1 { alpha, beta, b },
            Expected::F1 {
                alpha: a0,
                beta: be0,
                b: b0,
            },
        ) => close(*alpha, *a0) && close(*beta, *be0) && b0.map_or(true, |b0| close(*b, b0)),
        (Verdict::Family2 { alpha, b }, Expected::F2 { alpha: a0, b: b0 }) => {
            close(*alpha, *a0) && b0.map_or(true, |b0| close(*b, b0))
        }
        (Verdict::Family3 { beta }, Expected::F3 { beta: be0 }) => close(*beta, *be0),
        _ => false,
    };
    if ok {
        None
    } else {
        Some(format!("expected {expected:?}, got {verdict:?}"))
    }
}

fn op_close(a: &LagOperator, b: &LagOperator, tol: f64) -> bool {
    [(a.c, b.c), (a.u, b.u), (a.v, b.v)]
        .iter()
        .all(|(x, y)| (*x - *y).norm_inf() <= tol * (1.0 + y.norm_inf()))
}

/// Standard normal sample via Box-Muller.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Random complex frame with condition number at most 10 and
/// determinant bounded away from zero.
fn random_conjugator(rng: &mut ChaCha8Rng) -> CMat2 {
    loop {
        let mut e = [[Complex64::new(0.0, 0.0); 2]; 2];
        for row in &mut e {
            for x in row.iter_mut() {
                *x = Complex64::new(normal(rng), normal(rng));
            }
        }
        let m = CMat2::new(e);
        let (smax, smin) = m.singular_values();
        if smin > 0.0 && smax / smin <= 10.0 && m.det().norm() > 0.1 {
            return m;
        }
    }
}

/// Hide an operator behind a random diagonal shift, a random time
/// rescale with `u` in `[0.1, 10]`, and (optionally) a random
/// well-conditioned change of basis.
fn disguise(rng: &mut ChaCha8Rng, op: &LagOperator, full_conj: bool) -> Result<LagOperator> {
    let s = normal(rng);
    let r = rng.gen_range((0.1f64).ln()..(10.0f64).ln()).exp();
    let mut out = op.shift_v(Complex64::new(-s, 0.0)).rescale_time(1.0 / r)?;
    if full_conj {
        let m = random_conjugator(rng);
        out = out.conjugate(&m.inverse()?)?;
    }
    Ok(out)
}

/// One roundtrip: disguise, classify, compare parameters, replay the
/// witness onto the canonical form.  Returns a failure message or
/// `None` on success.
fn run_trial(
    rng: &mut ChaCha8Rng,
    canonical: &LagOperator,
    expected: &Expected,
    full_conj: bool,
) -> Option<String> {
    let input = match disguise(rng, canonical, full_conj) {
        Ok(op) => op,
        Err(e) => return Some(format!("disguise failed: {e}")),
    };
    let cls = classify::classify(&input);
    if let Some(msg) = check_verdict(&cls.verdict, expected) {
        return Some(msg);
    }
    let canon = match classify::canonical_operator(&cls.verdict) {
        Ok(op) => op,
        Err(e) => return Some(format!("no canonical form: {e}")),
    };
    match classify::replay(&input, &cls) {
        Ok(rec) if op_close(&rec, &canon, REPLAY_TOL) => None,
        Ok(_) => Some(format!("witness replay off for {expected:?}")),
        Err(e) => Some(format!("replay failed: {e}")),
    }
}

/// Criterion 8: 100 seeded roundtrips per family (parameters recovered
/// to `1e-7`, witness replay to `1e-8`), the refusal corpus with every
/// tag represented, a reducible input, and a complex coupling phase.
fn classification_roundtrips(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures: Vec<String> = Vec::new();
    let mut trials = 0usize;

    // First family: 40 generic parameter draws, disguised without and
    // with a basis change, plus 20 draws on the beta = 2 scalar branch.
    for _ in 0..40 {
        let alpha: f64 = rng.gen_range(-0.9..3.0);
        let mut beta: f64 = rng.gen_range((-alpha - 0.9)..4.0);
        if (beta - 2.0).abs() < 0.1 {
            beta = 2.5;
        }
        let b = sign(&mut rng) * rng.gen_range(0.2f64..2.0);
        let op = LagOperator::family1(alpha, beta, b)?;
        for full_conj in [false, true] {
            let expected = Expected::F1 {
                alpha,
                beta,
                b: (!full_conj).then_some(b),
            };
            if let Some(msg) = run_trial(&mut rng, &op, &expected, full_conj) {
                failures.push(msg);
            }
            trials += 1;
        }
    }
    for _ in 0..20 {
        let alpha: f64 = rng.gen_range(-0.9..3.0);
        let b = sign(&mut rng) * rng.gen_range(0.2f64..2.0);
        let op = LagOperator::family1(alpha, 2.0, b)?;
        let expected = Expected::F1 {
            alpha,
            beta: 2.0,
            b: Some(b),
        };
        if let Some(msg) = run_trial(&mut rng, &op, &expected, false) {
            failures.push(msg);
        }
        trials += 1;
    }

    // Second family: 50 draws, each disguised both ways.
    for _ in 0..50 {
        let alpha: f64 = rng.gen_range(-0.9..3.0);
        let b = sign(&mut rng) * rng.gen_range(0.05f64..0.95);
        let op = LagOperator::family2(alpha, b)?;
        for full_conj in [false, true] {
            let expected = Expected::F2 {
                alpha,
                b: (!full_conj).then_some(b),
            };
            if let Some(msg) = run_trial(&mut rng, &op, &expected, full_conj) {
                failures.push(msg);
            }
            trials += 1;
        }
    }

    // Third family: 50 draws, each disguised both ways.
    for _ in 0..50 {
        let beta: f64 = rng.gen_range(0.1..6.0);
        let op = LagOperator::family3(beta)?;
        for full_conj in [false, true] {
            let expected = Expected::F3 { beta };
            if let Some(msg) = run_trial(&mut rng, &op, &expected, full_conj) {
                failures.push(msg);
            }
            trials += 1;
        }
    }

    // Refusal corpus: every tag must come back verbatim.
    let corpus = classify::refusal_corpus();
    let refusals = corpus.len();
    for (op, want) in corpus {
        match classify::classify(&op).verdict {
            Verdict::NotSymmetrizable { reason } if reason == want => {}
            other => failures.push(format!("refusal {want} came back as {other:?}")),
        }
    }

    // A decoupled pair must be called reducible, not refused.
    let reducible = LagOperator::new(
        CMat2::from_real([[3.0, 0.0], [0.0, 1.0]]),
        CMat2::identity(),
        CMat2::from_real([[1.0, 0.0], [0.0, 0.0]]),
    );
    if classify::classify(&reducible).verdict != Verdict::Reducible {
        failures.push("reducible input not detected".to_string());
    }

    // A complex phase on the coupling must still yield the scalar
    // branch with the coupling recovered up to phase.
    let op = LagOperator::family1(0.5, 2.0, 0.8)?;
    let phase = Complex64::new(0.0, 0.7).exp();
    let d = CMat2::diag(phase, Complex64::new(1.0, 0.0));
    match classify::classify(&op.conjugate(&d)?).verdict {
        Verdict::Family1 { alpha, b, .. }
            if (alpha - 0.5).abs() < PARAM_TOL && (b.abs() - 0.8).abs() < PARAM_TOL => {}
        other => failures.push(format!("phase disguise came back as {other:?}")),
    }

    let pass = failures.is_empty();
    let detail = if pass {
        format!("{trials} randomized roundtrips, {refusals} refusal inputs, reducible and phase checks: all consistent")
    } else {
        let mut msg = format!("{} failures: {}", failures.len(), failures[0]);
        if failures.len() > 1 {
            msg.push_str(" (and more)");
        }
        msg
    };
    Ok((pass, detail))
}

/// Criterion 9: the commutant probes report only scalar symmetry for
/// one member of each canonical family, and detect the nontrivial
/// commutant of a decoupled diagonal weight through both probes.
fn commutant_probes() -> Result<(bool, String)> {
    let samples = reduce::default_samples();
    let mut pass = true;
    let mut notes = Vec::new();
    for spec in [
        WeightSpec::F1 {
            alpha: 0.5,
            beta: 1.5,
            b: 0.7,
        },
        WeightSpec::F2 { alpha: 0.5, b: 0.4 },
        WeightSpec::F3 { beta: 4.0 },
    ] {
        let weight = reduce::weight_commutant(&spec, &samples)?;
        let seq = build_by_moments(&spec, 4)?;
        let mop = reduce::mop_commutant(&seq)?;
        if weight.verdict != CommutantVerdict::ScalarOnly || weight.dimension != 1 {
            pass = false;
            notes.push(format!("{spec}: weight commutant dimension {}", weight.dimension));
        }
        if mop.verdict != CommutantVerdict::ScalarOnly || mop.dimension != 1 {
            pass = false;
            notes.push(format!("{spec}: coefficient commutant dimension {}", mop.dimension));
        }
    }
    let decoupled = WeightSpec::DiagLaguerre {
        alpha1: 0.5,
        alpha2: 1.5,
    };
    let weight = reduce::weight_commutant(&decoupled, &samples)?;
    if weight.verdict != CommutantVerdict::NonScalar || weight.dimension != 2 {
        pass = false;
        notes.push(format!(
            "decoupled weight commutant dimension {} (expected 2)",
            weight.dimension
        ));
    }
    let seq = build_by_moments(&decoupled, 4)?;
    let mop = reduce::mop_commutant(&seq)?;
    if mop.verdict != CommutantVerdict::NonScalar {
        pass = false;
        notes.push("decoupled coefficient commutant reported scalar-only".to_string());
    }
    let detail = if pass {
        "3 canonical families scalar-only under both probes; decoupled diagonal weight flagged by both".to_string()
    } else {
        notes.join("; ")
    };
    Ok((pass, detail))
}

/// Criterion 10: the (2,2) entry of the third family's zeroth moment
/// equals `2 sqrt(pi) exp(beta / 4)` to `1e-10` for `beta` in
/// `{0.5, 4}`.
fn normalization_integral() -> Result<(bool, String)> {
    const TOL: f64 = 1e-10;
    let mut worst = 0.0f64;
    for &beta in &[0.5, 4.0] {
        let spec = WeightSpec::F3 { beta };
        let table = MomentTable::new(&spec, 0)?;
        let exact = 2.0 * PI.sqrt() * (beta / 4.0).exp();
        let got = table.moment(0).e[1][1];
        let rel = (got - Complex64::new(exact, 0.0)).norm() / (1.0 + exact);
        worst = worst.max(rel);
    }
    Ok((
        worst <= TOL,
        format!("largest relative deviation from the closed form {worst:.2e} (tol {TOL:.0e})"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_criteria_pass() {
        for id in [1, 10] {
            let r = run(id, DEFAULT_SEED).unwrap();
            assert!(r.passed, "criterion {id}: {}", r.detail);
        }
    }

    #[test]
    fn invalid_id_is_rejected() {
        assert!(run(0, 1).is_err());
        assert!(run(COUNT + 1, 1).is_err());
    }

    #[test]
    fn table_has_one_line_per_criterion() {
        let results = vec![
            CriterionResult {
                id: 1,
                name: "anchor".into(),
                passed: true,
                detail: "ok".into(),
                millis: 3,
            },
            CriterionResult {
                id: 2,
                name: "sweep".into(),
                passed: false,
                detail: "off".into(),
                millis: 14,
            },
        ];
        let table = format_table(&results);
        assert_eq!(table.lines().count(), 4);
        assert!(table.contains("PASS"));
        assert!(table.contains("FAIL"));
        assert!(table.ends_with("1/2 criteria passed\n"));
        assert!(!all_passed(&results));
    }



    #[test]
    fn classification_criterion_is_seed_stable() {
        let a = run(8, 7).unwrap();
        let b = run(8, 7).unwrap();
        assert!(a.passed, "{}", a.detail);
        assert_eq!(a.detail, b.detail);
    }
}

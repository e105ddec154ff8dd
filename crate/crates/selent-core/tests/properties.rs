//! Cross-module invariants: estimator equivariance and permutation symmetry,
//! special-function identities, ordering of the admissibility constants,
//! kernel lower bounds, conditional-density normalization, and Monte Carlo
//! reproducibility.

use proptest::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;
use selent_core::constants::{
    c1, c2, c3, c_star_better, c_star_worse, c_star_worse_deriv, conditional_pdf_better,
    conditional_pdf_worse, k_better, k_worse, lambda_threshold, phi_star_better, phi_star_worse,
};
use selent_core::estimators::{
    estimate, estimate_custom_better, estimate_custom_worse, improve_better, improve_worse, select,
    true_selected_entropy, EstimatorId, ScaleParams, SufficientStat, Target,
};
use selent_core::montecarlo::{sample_gamma, simulate_risk, SimConfig};
use selent_core::numerics::{digamma, integrate_halfline, inv_digamma};
use selent_core::{QuadratureConfig, Shape};

fn shape(a: f64) -> Shape {
    Shape::new(a).unwrap()
}

fn psi(x: f64) -> f64 {
    digamma(x).unwrap()
}

/// One estimator per family, parameterized from the shape.
fn family_sample(alpha: Shape) -> Vec<EstimatorId> {
    let c = alpha.get().ln();
    vec![
        EstimatorId::NaiveWorse { c },
        EstimatorId::GenBayesWorse { beta: 0.25 },
        EstimatorId::ShrinkWorse { c },
        EstimatorId::NaiveBetter { c },
        EstimatorId::GenBayesBetter {
            beta: -0.1 * alpha.get(),
        },
        EstimatorId::ShrinkBetter { c },
    ]
}

/// Log-uniform positive observable.
fn observation() -> impl Strategy<Value = f64> {
    (-3.0f64..3.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Swapping the two observations changes nothing: selection looks at
    /// values, not positions. Exact, not approximate.
    #[test]
    fn estimates_are_permutation_invariant(
        x1 in observation(),
        x2 in observation(),
        a in 0.2f64..30.0,
    ) {
        let alpha = shape(a);
        let s12 = SufficientStat::new(x1, x2, alpha).unwrap();
        let s21 = SufficientStat::new(x2, x1, alpha).unwrap();
        for id in family_sample(alpha) {
            let e12 = estimate(&s12, id).unwrap();
            let e21 = estimate(&s21, id).unwrap();
            prop_assert_eq!(e12.to_bits(), e21.to_bits(), "{:?}", id);
        }
    }

    /// Scaling both observations by `k` shifts every estimate by `ln k`:
    /// all six families are equivariant under common rescaling.
    #[test]
    fn estimates_are_scale_equivariant(
        x1 in observation(),
        x2 in observation(),
        a in 0.2f64..30.0,
        ke in -2.0f64..2.0,
    ) {
        let alpha = shape(a);
        let k = 10f64.powf(ke);
        let base = SufficientStat::new(x1, x2, alpha).unwrap();
        let scaled = SufficientStat::new(k * x1, k * x2, alpha).unwrap();
        for id in family_sample(alpha) {
            let e0 = estimate(&base, id).unwrap();
            let e1 = estimate(&scaled, id).unwrap();
            prop_assert!(
                (e1 - e0 - k.ln()).abs() < 1e-9,
                "{:?}: {} vs {} + ln {}",
                id, e1, e0, k
            );
        }
    }
}

proptest! {
    /// `psi(x+1) = psi(x) + 1/x`.
    #[test]
    fn digamma_satisfies_recurrence(xe in -2.0f64..2.0) {
        let x = 10f64.powf(xe);
        let lhs = psi(x + 1.0);
        let rhs = psi(x) + 1.0 / x;
        let scale = 1.0f64.max(rhs.abs());
        prop_assert!((lhs - rhs).abs() < 1e-10 * scale, "x = {x}: {lhs} vs {rhs}");
    }

    /// `ln x - 1/x < psi(x) < ln x`.
    #[test]
    fn digamma_is_bracketed_by_log(xe in -2.0f64..3.0) {
        let x = 10f64.powf(xe);
        let p = psi(x);
        prop_assert!(p < x.ln());
        prop_assert!(p > x.ln() - 1.0 / x);
    }

    /// `psi(inv_digamma(y)) = y` across the usable band.
    #[test]
    fn inv_digamma_round_trips(y in -10.0f64..10.0) {
        let x = inv_digamma(y);
        prop_assert!(x > 0.0 && x.is_finite());
        let back = psi(x);
        prop_assert!((back - y).abs() < 1e-10 * 1.0f64.max(y.abs()), "y = {y}, back = {back}");
    }

    /// The two branches of the worse-target shrinkage agree where they meet:
    /// at `t = exp(psi(2a) - c) - 1` the naive and pooled forms coincide.
    #[test]
    fn shrink_worse_is_continuous_at_the_branch_point(
        a in 0.3f64..20.0,
        frac in 0.05f64..0.95,
        x2 in observation(),
    ) {
        let alpha = shape(a);
        // c chosen so the boundary ratio lands inside (0, 1)
        let c = psi(2.0 * a) - core::f64::consts::LN_2 * frac;
        let t_star = (psi(2.0 * a) - c).exp_m1();
        prop_assert!(t_star > 0.0 && t_star < 1.0);
        let stat = SufficientStat::new(t_star * x2, x2, alpha).unwrap();
        let naive = estimate(&stat, EstimatorId::NaiveWorse { c }).unwrap();
        let pooled = (t_star * x2 + x2).ln() - psi(2.0 * a);
        prop_assert!(
            (naive - pooled).abs() < 1e-10,
            "boundary gap {} at t* = {t_star}",
            naive - pooled
        );
    }

    /// Better-target analogue at `v = exp(psi(2a) - c) - 1` inside the
    /// pooling window `(1, lambda]`.
    #[test]
    fn shrink_better_is_continuous_at_the_branch_point(
        a in 0.3f64..20.0,
        frac in 0.05f64..0.95,
        x1 in observation(),
    ) {
        let alpha = shape(a);
        let lambda = lambda_threshold(alpha);
        let lo = core::f64::consts::LN_2;
        let hi = (1.0 + lambda).ln();
        let c = psi(2.0 * a) - (lo + (hi - lo) * frac);
        let v_star = (psi(2.0 * a) - c).exp_m1();
        prop_assert!(v_star >= 1.0 && v_star <= lambda);
        let stat = SufficientStat::new(x1, v_star * x1, alpha).unwrap();
        let naive = estimate(&stat, EstimatorId::NaiveBetter { c }).unwrap();
        let pooled = (x1 + v_star * x1).ln() - psi(2.0 * a);
        prop_assert!(
            (naive - pooled).abs() < 1e-10,
            "boundary gap {} at v* = {v_star}",
            naive - pooled
        );
    }

    /// The conditional-mean kernel is minimized at equal scales: `ln(1+t)`
    /// at `mu = 1`, and never below that anywhere on `mu >= 1`.
    #[test]
    fn k_worse_minimum_sits_at_unit_ratio(
        t in 0.01f64..1.0,
        mue in 0.0f64..3.0,
        a in 0.2f64..30.0,
    ) {
        let alpha = shape(a);
        let at_one = k_worse(t, 1.0, alpha).unwrap();
        prop_assert!((at_one - t.ln_1p()).abs() < 1e-14);
        let mu = 10f64.powf(mue);
        let k = k_worse(t, mu, alpha).unwrap();
        prop_assert!(k >= t.ln_1p() - 1e-12, "k({t}, {mu}) = {k} < ln(1+t)");
    }

    /// Within the guard window `v <= lambda`, the better-target kernel is
    /// bounded below by `ln(1+v)`, with equality at equal scales.
    #[test]
    fn k_better_minimum_inside_guard_window(
        vfrac in 0.0f64..1.0,
        thetae in -3.0f64..0.0,
        a in 0.2f64..30.0,
    ) {
        let alpha = shape(a);
        let lambda = lambda_threshold(alpha);
        let v = 1.0 + (lambda - 1.0) * vfrac;
        let at_one = k_better(v, 1.0, alpha).unwrap();
        prop_assert!((at_one - v.ln_1p()).abs() < 1e-14);
        let theta = 10f64.powf(thetae);
        let k = k_better(v, theta, alpha).unwrap();
        prop_assert!(k >= v.ln_1p() - 1e-12, "k({v}, {theta}) = {k} < ln(1+v)");
    }

    /// Capping a constant subtraction at `psi(2a) - ln(1+t)` is exactly the
    /// worse-target shrinkage estimator, branch for branch.
    #[test]
    fn improvement_operator_reproduces_shrink_worse(
        x1 in observation(),
        x2 in observation(),
        a in 0.3f64..20.0,
        coff in -0.5f64..0.5,
    ) {
        let alpha = shape(a);
        let c = a.ln() + coff;
        let stat = SufficientStat::new(x1, x2, alpha).unwrap();
        let shrunk = estimate(&stat, EstimatorId::ShrinkWorse { c }).unwrap();
        let improved = estimate_custom_worse(&stat, |t| improve_worse(c, t, alpha));
        prop_assert!((shrunk - improved).abs() < 1e-12);
        let t = select(&stat).t;
        prop_assert!(improve_worse(c, t, alpha) <= phi_star_worse(t, alpha).unwrap() + 1e-15);
    }

    /// Better-target analogue, including the `v > lambda` pass-through.
    #[test]
    fn improvement_operator_reproduces_shrink_better(
        x1 in observation(),
        x2 in observation(),
        a in 0.3f64..20.0,
        coff in -0.5f64..0.5,
    ) {
        let alpha = shape(a);
        let c = a.ln() + coff;
        let stat = SufficientStat::new(x1, x2, alpha).unwrap();
        let shrunk = estimate(&stat, EstimatorId::ShrinkBetter { c }).unwrap();
        let improved = estimate_custom_better(&stat, |v| improve_better(c, v, alpha));
        prop_assert!((shrunk - improved).abs() < 1e-12);
        let v = select(&stat).v;
        if v <= lambda_threshold(alpha) {
            prop_assert!(improve_better(c, v, alpha) <= phi_star_better(v, alpha).unwrap() + 1e-15);
        } else {
            prop_assert_eq!(improve_better(c, v, alpha).to_bits(), c.to_bits());
        }
    }

    /// Generalized Bayes at exponent zero is the naive estimator anchored
    /// at `psi(alpha)`, bit for bit.
    #[test]
    fn gen_bayes_zero_exponent_is_naive_at_digamma(
        x1 in observation(),
        x2 in observation(),
        a in 0.2f64..30.0,
    ) {
        let alpha = shape(a);
        let stat = SufficientStat::new(x1, x2, alpha).unwrap();
        let gb = estimate(&stat, EstimatorId::GenBayesWorse { beta: 0.0 }).unwrap();
        let nv = estimate(&stat, EstimatorId::NaiveWorse { c: psi(a) }).unwrap();
        prop_assert_eq!(gb.to_bits(), nv.to_bits());
    }
}

/// `c2 + c3 = 2 psi(alpha)` and the strict ordering
/// `c1 < psi(2a) - ln 2 < c2 < psi(2a)` on a log-spaced shape grid.
/// (The acceptance suite runs the same checks on a denser grid.)
#[test]
fn constant_identity_and_ordering_hold_across_shapes() {
    for i in 0..10 {
        let a = 10f64.powf(-1.0 + 3.0 * i as f64 / 9.0);
        let alpha = shape(a);
        let v1 = c1(alpha);
        let v2 = c2(alpha).unwrap();
        let v3 = c3(alpha).unwrap();
        let psi2 = psi(2.0 * a);
        assert!(
            (v2 + v3 - 2.0 * psi(a)).abs() <= 1e-9,
            "identity off at alpha = {a}: {}",
            v2 + v3 - 2.0 * psi(a)
        );
        assert!(
            v1 < psi2 - core::f64::consts::LN_2,
            "chain left, alpha = {a}"
        );
        assert!(
            psi2 - core::f64::consts::LN_2 < v2,
            "chain middle, alpha = {a}"
        );
        assert!(v2 < psi2, "chain right, alpha = {a}");
    }
}

/// The optimal constant for the worse target starts at `c2`, decreases
/// strictly in the scale ratio, and stays above `c1`; its closed-form
/// derivative matches a central difference.
#[test]
fn c_star_worse_decreases_from_c2_toward_c1() {
    for a in [0.5, 2.0, 24.0] {
        let alpha = shape(a);
        let lo = c1(alpha);
        let hi = c2(alpha).unwrap();
        assert!((c_star_worse(1.0, alpha).unwrap() - hi).abs() < 2e-9);
        let grid = [1.0, 1.2, 1.5, 2.0, 4.0, 8.0, 32.0, 200.0];
        let vals: Vec<f64> = grid
            .iter()
            .map(|&mu| c_star_worse(mu, alpha).unwrap())
            .collect();
        // The decrement scales like mu^{-alpha-1}; at large alpha the far
        // grid points agree with c1 below quadrature resolution, so demand
        // strict decrease only while the gap is resolvable.
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "increase at alpha = {a}");
            if w[0] - w[1] <= 1e-8 {
                continue;
            }
            assert!(w[1] < w[0], "not strictly decreasing at alpha = {a}");
        }
        assert!(vals[0] - vals[3] > 1e-3, "no visible decay at alpha = {a}");
        for &v in &vals {
            assert!(
                v > lo - 1e-9 && v <= hi + 1e-12,
                "{v} outside ({lo}, {hi}] at alpha = {a}"
            );
        }
        for &mu in &[1.5, 3.0, 10.0] {
            let h = 1e-4 * mu;
            let fd = (c_star_worse(mu + h, alpha).unwrap() - c_star_worse(mu - h, alpha).unwrap())
                / (2.0 * h);
            let d = c_star_worse_deriv(mu, alpha).unwrap();
            assert!(d < 0.0);
            assert!(
                (fd - d).abs() <= 1e-4 * d.abs() + 1e-6,
                "derivative mismatch at alpha = {a}, mu = {mu}: {fd} vs {d}"
            );
        }
    }
}

/// Better-target optimal constant: `c3` at equal scales, strictly increasing
/// as the selected population pulls away (theta downward), approaching but
/// never reaching `c1`.
#[test]
fn c_star_better_increases_from_c3_toward_c1() {
    for a in [0.5, 2.0] {
        let alpha = shape(a);
        let lo = c3(alpha).unwrap();
        let hi = c1(alpha);
        assert!((c_star_better(1.0, alpha).unwrap() - lo).abs() < 2e-9);
        let grid = [1.0, 0.7, 0.4, 0.2, 0.05, 1e-3];
        let vals: Vec<f64> = grid
            .iter()
            .map(|&th| c_star_better(th, alpha).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0], "not strictly increasing at alpha = {a}");
        }
        for &v in &vals {
            assert!(
                v >= lo - 1e-12 && v < hi,
                "{v} outside [{lo}, {hi}) at alpha = {a}"
            );
        }
    }
}

/// Both conditional densities integrate to one and reproduce the kernel
/// mean `psi(2a) - k` at 1e-8, across shapes and both observed-ratio
/// endpoints.
#[test]
fn conditional_densities_normalize_and_match_kernel_means() {
    let cfg = QuadratureConfig::default();
    let worse_cases = [
        (0.3, 1.5, 0.7),
        (0.9, 1.0, 3.0),
        (1.0, 2.5, 1.2),
        (0.5, 8.0, 5.0),
    ];
    for (t, mu, a) in worse_cases {
        let alpha = shape(a);
        let mass = integrate_halfline(
            |w| conditional_pdf_worse(w.ln(), t, mu, alpha).unwrap() / w,
            &cfg,
        )
        .unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "mass {mass} at ({t}, {mu}, {a})");
        let mean = integrate_halfline(
            |w| w.ln() * conditional_pdf_worse(w.ln(), t, mu, alpha).unwrap() / w,
            &cfg,
        )
        .unwrap();
        let expected = psi(2.0 * a) - k_worse(t, mu, alpha).unwrap();
        assert!(
            (mean - expected).abs() < 1e-8,
            "mean {mean} vs {expected} at ({t}, {mu}, {a})"
        );
    }
    let better_cases = [(1.0, 1.0, 0.7), (1.4, 0.3, 2.0), (3.0, 0.6, 1.1)];
    for (v, theta, a) in better_cases {
        let alpha = shape(a);
        let mass = integrate_halfline(
            |w| conditional_pdf_better(w.ln(), v, theta, alpha).unwrap() / w,
            &cfg,
        )
        .unwrap();
        assert!(
            (mass - 1.0).abs() < 1e-8,
            "mass {mass} at ({v}, {theta}, {a})"
        );
        let mean = integrate_halfline(
            |w| w.ln() * conditional_pdf_better(w.ln(), v, theta, alpha).unwrap() / w,
            &cfg,
        )
        .unwrap();
        let expected = psi(2.0 * a) - k_better(v, theta, alpha).unwrap();
        assert!(
            (mean - expected).abs() < 1e-8,
            "mean {mean} vs {expected} at ({v}, {theta}, {a})"
        );
    }
}

/// Identical configurations produce identical risk summaries, run to run.
#[test]
fn simulation_is_bit_reproducible() {
    let cfg = SimConfig {
        alpha: shape(1.5),
        mu_grid: vec![1.0, 2.0, 6.0],
        reps: 500,
        seed: 31,
        estimators: vec![
            EstimatorId::NaiveWorse { c: 1.5f64.ln() },
            EstimatorId::ShrinkWorse { c: 1.5f64.ln() },
        ],
        target: Target::Worse,
    };
    let a = simulate_risk(&cfg).unwrap();
    let b = simulate_risk(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 6);
}

/// Empirical risk is invariant under a common rescaling of both true
/// scales: simulating at `(3, 3 mu)` reproduces `(1, mu)` to rounding.
#[test]
fn risk_is_invariant_under_common_rescaling() {
    let alpha = shape(1.5);
    let mu = 3.0;
    let reps = 4000;
    let id = EstimatorId::ShrinkWorse { c: 1.5f64.ln() };
    let run = |scale: f64| -> f64 {
        let params = ScaleParams::new(scale, scale * mu).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2024);
        let mut acc = 0.0;
        for _ in 0..reps {
            let x1 = sample_gamma(alpha, params.theta1(), &mut rng);
            let x2 = sample_gamma(alpha, params.theta2(), &mut rng);
            let stat = SufficientStat::new(x1, x2, alpha).unwrap();
            let err =
                estimate(&stat, id).unwrap() - true_selected_entropy(&params, &stat, Target::Worse);
            acc += err * err;
        }
        acc / reps as f64
    };
    let base = run(1.0);
    let scaled = run(3.0);
    assert!(
        (base - scaled).abs() < 1e-10,
        "risk moved under rescaling: {base} vs {scaled}"
    );
}

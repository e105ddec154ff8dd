//! Seeded gamma sampling and empirical risk evaluation.
//!
//! Replication streams are derived from the master seed by a counter: stream
//! id `grid_index * 2^32 + rep` on a cloned ChaCha12 template. Results are
//! therefore bit-reproducible for a fixed `(seed, config)` and independent
//! of evaluation order. Compared estimators share each replication's draw
//! (common random numbers), so paired risk differences have far less
//! variance than the risks themselves.

use crate::error::{Error, Result};
use crate::estimators::{
    estimate, select, true_selected_entropy, EstimatorId, ScaleParams, SufficientStat, Target,
};
use crate::numerics::Shape;
use alloc::string::String;
use alloc::vec::Vec;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Replication count used when nothing else is requested.
pub const DEFAULT_REPS: u64 = 60_000;

/// Default worse-target ratio grid: 1.0 through 10.0 in steps of 0.25.
pub fn default_mu_grid() -> Vec<f64> {
    (0..=36).map(|i| 1.0 + 0.25 * i as f64).collect()
}

/// A complete simulation request.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub alpha: Shape,
    /// Scale ratios `theta2 / theta1`; each grid point simulates the pair
    /// `(1, r)`. The worse target requires `r >= 1` (the ratio `mu`); the
    /// better target accepts either convention since risk only depends on
    /// `min/max`.
    pub mu_grid: Vec<f64>,
    pub reps: u64,
    pub seed: u64,
    pub estimators: Vec<EstimatorId>,
    pub target: Target,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1"));
        }
        if self.mu_grid.is_empty() {
            return Err(Error::InvalidConfig("grid must be nonempty"));
        }
        for &r in &self.mu_grid {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidConfig(
                    "grid values must be positive and finite",
                ));
            }
            if self.target == Target::Worse && r < 1.0 {
                return Err(Error::InvalidConfig(
                    "worse-target grid values must be >= 1",
                ));
            }
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidConfig("estimator list must be nonempty"));
        }
        for id in &self.estimators {
            id.validate(self.alpha)?;
            if id.target() != self.target {
                return Err(Error::InvalidConfig(
                    "estimator target does not match config target",
                ));
            }
        }
        Ok(())
    }
}

/// Monte Carlo risk summary for one estimator at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskPoint {
    /// The configured scale ratio.
    pub mu: f64,
    pub estimator: EstimatorId,
    /// Mean squared error against the selected-entropy target.
    pub mse: f64,
    /// Absolute value of the mean error.
    pub abs_bias: f64,
    /// Standard error of the MSE estimate.
    pub mse_se: f64,
    /// Standard error of the mean error.
    pub bias_se: f64,
    pub reps: u64,
}

/// Paired comparison of two estimators at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct DominancePoint {
    pub mu: f64,
    pub mse_a: f64,
    pub mse_b: f64,
    /// Mean of the per-replication difference `err_a^2 - err_b^2`.
    pub diff: f64,
    /// Standard error of that paired difference.
    pub diff_se: f64,
    /// Set when `a`'s risk exceeds `b`'s by more than 3 standard errors,
    /// i.e. the claimed dominance of `a` over `b` fails here.
    pub a_exceeds_b: bool,
    pub reps: u64,
}

/// Uniform draw in the open interval (0, 1); never exactly 0 or 1, so logs
/// of it are always finite.
fn uniform_open01<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Standard normal via Box-Muller; consumes exactly two words.
fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    let u1 = uniform_open01(rng);
    let u2 = uniform_open01(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// One draw from `Gamma(alpha, theta)` by Marsaglia-Tsang squeeze/rejection;
/// shapes below 1 use the power-of-uniform boost.
pub fn sample_gamma<R: RngCore>(alpha: Shape, theta: f64, rng: &mut R) -> f64 {
    let a = alpha.get();
    if a < 1.0 {
        // X = Y * U^(1/a) with Y ~ Gamma(a + 1, theta).
        let y = sample_gamma_shape_ge1(a + 1.0, rng);
        let u = uniform_open01(rng);
        return theta * y * libm::pow(u, 1.0 / a);
    }
    theta * sample_gamma_shape_ge1(a, rng)
}

fn sample_gamma_shape_ge1<R: RngCore>(a: f64, rng: &mut R) -> f64 {
    let d = a - 1.0 / 3.0;
    let c = 1.0 / (3.0 * libm::sqrt(d));
    loop {
        let x = standard_normal(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = uniform_open01(rng);
        let x2 = x * x;
        // Squeeze step accepts the bulk without a log.
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if libm::log(u) < 0.5 * x2 + d * (1.0 - v + libm::log(v)) {
            return d * v;
        }
    }
}

fn substream(template: &ChaCha12Rng, grid_index: usize, rep: u64) -> ChaCha12Rng {
    let mut rng = template.clone();
    rng.set_stream(((grid_index as u64) << 32) | rep);
    rng
}

struct Moments {
    sum_e: f64,
    sum_e2: f64,
    sum_e4: f64,
}

impl Moments {
    fn new() -> Self {
        Moments {
            sum_e: 0.0,
            sum_e2: 0.0,
            sum_e4: 0.0,
        }
    }

    fn push(&mut self, e: f64) {
        let e2 = e * e;
        self.sum_e += e;
        self.sum_e2 += e2;
        self.sum_e4 += e2 * e2;
    }

    fn finish(&self, mu: f64, estimator: EstimatorId, n: u64) -> RiskPoint {
        let nf = n as f64;
        let mean = self.sum_e / nf;
        let mse = self.sum_e2 / nf;
        let var_e = f64::max(mse - mean * mean, 0.0);
        let var_e2 = f64::max(self.sum_e4 / nf - mse * mse, 0.0);
        RiskPoint {
            mu,
            estimator,
            mse,
            abs_bias: libm::fabs(mean),
            mse_se: libm::sqrt(var_e2 / nf),
            bias_se: libm::sqrt(var_e / nf),
            reps: n,
        }
    }
}

/// Empirical MSE and absolute bias of each configured estimator over the
/// ratio grid. Within a replication every estimator sees the same draw.
pub fn simulate_risk(cfg: &SimConfig) -> Result<Vec<RiskPoint>> {
    cfg.validate()?;
    let template = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.mu_grid.len() * cfg.estimators.len());

    for (gi, &r) in cfg.mu_grid.iter().enumerate() {
        let params = ScaleParams::new(1.0, r)?;
        let mut acc: Vec<Moments> = cfg.estimators.iter().map(|_| Moments::new()).collect();
        for rep in 0..cfg.reps {
            let mut rng = substream(&template, gi, rep);
            let x1 = sample_gamma(cfg.alpha, params.theta1(), &mut rng);
            let x2 = sample_gamma(cfg.alpha, params.theta2(), &mut rng);
            let stat = SufficientStat::new(x1, x2, cfg.alpha)?;
            let truth = true_selected_entropy(&params, &stat, cfg.target);
            for (id, m) in cfg.estimators.iter().zip(acc.iter_mut()) {
                m.push(estimate(&stat, *id)? - truth);
            }
        }
        for (id, m) in cfg.estimators.iter().zip(acc.iter()) {
            out.push(m.finish(r, *id, cfg.reps));
        }
    }
    Ok(out)
}

/// Paired risk comparison of estimator `a` against `b` over the grid, with
/// common random numbers. `cfg.estimators` is ignored; the pair is supplied
/// explicitly.
pub fn dominance_report(
    cfg: &SimConfig,
    a: EstimatorId,
    b: EstimatorId,
) -> Result<Vec<DominancePoint>> {
    let mut paired = cfg.clone();
    paired.estimators = alloc::vec![a, b];
    paired.validate()?;
    let template = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.mu_grid.len());

    for (gi, &r) in cfg.mu_grid.iter().enumerate() {
        let params = ScaleParams::new(1.0, r)?;
        let mut sum_a2 = 0.0;
        let mut sum_b2 = 0.0;
        let mut sum_d = 0.0;
        let mut sum_d2 = 0.0;
        for rep in 0..cfg.reps {
            let mut rng = substream(&template, gi, rep);
            let x1 = sample_gamma(cfg.alpha, params.theta1(), &mut rng);
            let x2 = sample_gamma(cfg.alpha, params.theta2(), &mut rng);
            let stat = SufficientStat::new(x1, x2, cfg.alpha)?;
            let truth = true_selected_entropy(&params, &stat, cfg.target);
            let ea = estimate(&stat, a)? - truth;
            let eb = estimate(&stat, b)? - truth;
            let d = ea * ea - eb * eb;
            sum_a2 += ea * ea;
            sum_b2 += eb * eb;
            sum_d += d;
            sum_d2 += d * d;
        }
        let nf = cfg.reps as f64;
        let diff = sum_d / nf;
        let var_d = f64::max(sum_d2 / nf - diff * diff, 0.0);
        let diff_se = libm::sqrt(var_d / nf);
        out.push(DominancePoint {
            mu: r,
            mse_a: sum_a2 / nf,
            mse_b: sum_b2 / nf,
            diff,
            diff_se,
            a_exceeds_b: diff > 3.0 * diff_se,
            reps: cfg.reps,
        });
    }
    Ok(out)
}

/// CSV rendering of simulation results:
/// `target,alpha,mu,estimator_label,mse,mse_se,abs_bias,bias_se,reps,seed`.
pub fn risk_points_csv(cfg: &SimConfig, points: &[RiskPoint]) -> String {
    let mut s =
        String::from("target,alpha,mu,estimator_label,mse,mse_se,abs_bias,bias_se,reps,seed\n");
    for p in points {
        s.push_str(&alloc::format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            cfg.target.label(),
            cfg.alpha.get(),
            p.mu,
            p.estimator.label(),
            p.mse,
            p.mse_se,
            p.abs_bias,
            p.bias_se,
            p.reps,
            cfg.seed
        ));
    }
    s
}

/// CSV rendering of a dominance comparison.
pub fn dominance_csv(
    cfg: &SimConfig,
    a: EstimatorId,
    b: EstimatorId,
    points: &[DominancePoint],
) -> String {
    let mut s = String::from(
        "target,alpha,mu,estimator_a,estimator_b,mse_a,mse_b,diff,diff_se,a_exceeds_b,reps,seed\n",
    );
    for p in points {
        s.push_str(&alloc::format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            cfg.target.label(),
            cfg.alpha.get(),
            p.mu,
            a.label(),
            b.label(),
            p.mse_a,
            p.mse_b,
            p.diff,
            p.diff_se,
            p.a_exceeds_b,
            p.reps,
            cfg.seed
        ));
    }
    s
}

/// Convenience: the observed mean of `ln Z2 - H_S` (worse) or
/// `ln Z1 - H_M` (better) with its standard error, for checking the
/// quadrature constants against simulation.
pub fn selected_log_mean(
    alpha: Shape,
    r: f64,
    target: Target,
    reps: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1"));
    }
    let params = ScaleParams::new(1.0, r)?;
    let template = ChaCha12Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for rep in 0..reps {
        let mut rng = substream(&template, 0, rep);
        let x1 = sample_gamma(alpha, params.theta1(), &mut rng);
        let x2 = sample_gamma(alpha, params.theta2(), &mut rng);
        let stat = SufficientStat::new(x1, x2, alpha)?;
        let o = select(&stat);
        let z = match target {
            Target::Worse => o.z2,
            Target::Better => o.z1,
        };
        let u = libm::log(z) - true_selected_entropy(&params, &stat, target);
        sum += u;
        sum2 += u * u;
    }
    let nf = reps as f64;
    let mean = sum / nf;
    let var = f64::max(sum2 / nf - mean * mean, 0.0);
    Ok((mean, libm::sqrt(var / nf)))
}

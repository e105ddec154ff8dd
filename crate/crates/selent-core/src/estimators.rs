//! Selection rule, entropy targets, and every estimator family.
//!
//! The observed pair `(x1, x2)` has a common known gamma shape; the
//! estimand is `ln theta` of whichever population the selection rule picks.
//! All estimators have the equivariant form `ln Z - Phi(ratio)` and satisfy
//! `estimate(a * x) = estimate(x) + ln a` plus permutation symmetry.

use crate::constants::{lambda_threshold, phi_star_better_raw, phi_star_worse_raw};
use crate::error::{Error, Result};
use crate::numerics::{digamma_raw, Shape};
use alloc::string::String;

/// Observed pair of sufficient statistics with their common shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficientStat {
    x1: f64,
    x2: f64,
    alpha: Shape,
}

impl SufficientStat {
    /// Validates both observations positive and finite.
    pub fn new(x1: f64, x2: f64, alpha: Shape) -> Result<Self> {
        if !(x1 > 0.0) || !x1.is_finite() {
            return Err(Error::Domain {
                what: "x1",
                value: x1,
            });
        }
        if !(x2 > 0.0) || !x2.is_finite() {
            return Err(Error::Domain {
                what: "x2",
                value: x2,
            });
        }
        Ok(SufficientStat { x1, x2, alpha })
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn alpha(&self) -> Shape {
        self.alpha
    }
}

/// The two unknown scale parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleParams {
    theta1: f64,
    theta2: f64,
}

impl ScaleParams {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !(theta1 > 0.0) || !theta1.is_finite() {
            return Err(Error::Domain {
                what: "theta1",
                value: theta1,
            });
        }
        if !(theta2 > 0.0) || !theta2.is_finite() {
            return Err(Error::Domain {
                what: "theta2",
                value: theta2,
            });
        }
        Ok(ScaleParams { theta1, theta2 })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    /// Scale ratio `max/min >= 1`.
    pub fn mu(&self) -> f64 {
        f64::max(self.theta1, self.theta2) / f64::min(self.theta1, self.theta2)
    }

    /// Scale ratio `min/max in (0, 1]`.
    pub fn theta_ratio(&self) -> f64 {
        f64::min(self.theta1, self.theta2) / f64::max(self.theta1, self.theta2)
    }
}

/// Which selected population is being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// Larger scale, picked by the larger observation.
    Worse,
    /// Smaller scale, picked by the smaller observation.
    Better,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::Worse => "worse",
            Target::Better => "better",
        }
    }
}

/// Order statistics and ratios of an observed pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionOutcome {
    /// `min(x1, x2)`.
    pub z1: f64,
    /// `max(x1, x2)`.
    pub z2: f64,
    /// `z1 / z2 in (0, 1]`.
    pub t: f64,
    /// `z2 / z1 in [1, inf)`.
    pub v: f64,
    /// Index (1 or 2) of the worse-selected population; ties pick 1.
    pub s_index: u8,
    /// Index (1 or 2) of the better-selected population; ties pick 1.
    pub m_index: u8,
}

/// Applies the natural selection rule to an observed pair.
///
/// The worse target follows `x1 >= x2` selects 1; the better target follows
/// `x1 <= x2` selects 1, so a tie resolves to index 1 for both.
pub fn select(stat: &SufficientStat) -> SelectionOutcome {
    let (x1, x2) = (stat.x1, stat.x2);
    let z1 = f64::min(x1, x2);
    let z2 = f64::max(x1, x2);
    SelectionOutcome {
        z1,
        z2,
        t: z1 / z2,
        v: z2 / z1,
        s_index: if x1 >= x2 { 1 } else { 2 },
        m_index: if x1 <= x2 { 1 } else { 2 },
    }
}

/// Shannon entropy of `Gamma(alpha, theta)`:
/// `ln theta + alpha + ln Gamma(alpha) + (1 - alpha) psi(alpha)`.
pub fn entropy_gamma(theta: f64, alpha: Shape) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    Ok(libm::log(theta) + entropy_constant(alpha))
}

/// The `theta`-free part of the gamma entropy:
/// `alpha + ln Gamma(alpha) + (1 - alpha) psi(alpha)`.
pub fn entropy_constant(alpha: Shape) -> f64 {
    let a = alpha.get();
    a + libm::lgamma(a) + (1.0 - a) * digamma_raw(a)
}

/// The estimand `ln theta_selected`: the scale log of whichever population
/// the data-driven rule picks. Random through the data, matching the loss.
pub fn true_selected_entropy(params: &ScaleParams, stat: &SufficientStat, target: Target) -> f64 {
    let first = match target {
        Target::Worse => stat.x1 >= stat.x2,
        Target::Better => stat.x1 <= stat.x2,
    };
    if first {
        libm::log(params.theta1)
    } else {
        libm::log(params.theta2)
    }
}

/// An estimator family plus its parameter.
///
/// Arbitrary equivariant estimators `ln Z - Phi(ratio)` beyond these six are
/// covered by [`estimate_custom_worse`] and [`estimate_custom_better`],
/// kept out of the enum so it stays `Copy` and directly comparable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorId {
    /// `ln Z2 - c`.
    NaiveWorse { c: f64 },
    /// `ln Z2 - psi(alpha + beta)`, generalized Bayes under the power prior
    /// with exponent `beta > -alpha`.
    GenBayesWorse { beta: f64 },
    /// `ln Z2 - c` until `t` reaches `exp(psi(2a) - c) - 1`, then the
    /// pooled form `ln(X1 + X2) - psi(2a)`.
    ShrinkWorse { c: f64 },
    /// `ln Z1 - c`.
    NaiveBetter { c: f64 },
    /// `ln Z1 - psi(alpha + beta)` with `beta > -alpha`.
    GenBayesBetter { beta: f64 },
    /// `ln Z1 - c` except pooled when `v` is inside
    /// `(exp(psi(2a) - c) - 1, lambda_threshold(alpha)]`.
    ShrinkBetter { c: f64 },
}

impl EstimatorId {
    /// Which target the family estimates.
    pub fn target(self) -> Target {
        match self {
            EstimatorId::NaiveWorse { .. }
            | EstimatorId::GenBayesWorse { .. }
            | EstimatorId::ShrinkWorse { .. } => Target::Worse,
            EstimatorId::NaiveBetter { .. }
            | EstimatorId::GenBayesBetter { .. }
            | EstimatorId::ShrinkBetter { .. } => Target::Better,
        }
    }

    /// Checks the parameter against its stated domain for a given shape.
    pub fn validate(self, alpha: Shape) -> Result<()> {
        match self {
            EstimatorId::GenBayesWorse { beta } | EstimatorId::GenBayesBetter { beta } => {
                if !beta.is_finite() || beta <= -alpha.get() {
                    return Err(Error::Domain {
                        what: "beta",
                        value: beta,
                    });
                }
            }
            EstimatorId::NaiveWorse { c }
            | EstimatorId::ShrinkWorse { c }
            | EstimatorId::NaiveBetter { c }
            | EstimatorId::ShrinkBetter { c } => {
                if !c.is_finite() {
                    return Err(Error::Domain {
                        what: "c",
                        value: c,
                    });
                }
            }
        }
        Ok(())
    }

    /// Stable ASCII label carrying the parameter at full precision.
    pub fn label(self) -> String {
        match self {
            EstimatorId::NaiveWorse { c } => alloc::format!("naive_worse(c={c})"),
            EstimatorId::GenBayesWorse { beta } => alloc::format!("gen_bayes_worse(beta={beta})"),
            EstimatorId::ShrinkWorse { c } => alloc::format!("shrink_worse(c={c})"),
            EstimatorId::NaiveBetter { c } => alloc::format!("naive_better(c={c})"),
            EstimatorId::GenBayesBetter { beta } => alloc::format!("gen_bayes_better(beta={beta})"),
            EstimatorId::ShrinkBetter { c } => alloc::format!("shrink_better(c={c})"),
        }
    }
}

/// Evaluates an estimator on an observed pair.
pub fn estimate(stat: &SufficientStat, id: EstimatorId) -> Result<f64> {
    id.validate(stat.alpha)?;
    let a = stat.alpha.get();
    let o = select(stat);
    Ok(match id {
        EstimatorId::NaiveWorse { c } => libm::log(o.z2) - c,
        EstimatorId::GenBayesWorse { beta } => libm::log(o.z2) - digamma_raw(a + beta),
        EstimatorId::ShrinkWorse { c } => {
            let psi2a = digamma_raw(2.0 * a);
            if o.t < libm::expm1(psi2a - c) {
                libm::log(o.z2) - c
            } else {
                libm::log(stat.x1 + stat.x2) - psi2a
            }
        }
        EstimatorId::NaiveBetter { c } => libm::log(o.z1) - c,
        EstimatorId::GenBayesBetter { beta } => libm::log(o.z1) - digamma_raw(a + beta),
        EstimatorId::ShrinkBetter { c } => {
            shrink_better_with_lambda(stat, c, lambda_threshold(stat.alpha))
        }
    })
}

/// Better-target shrinkage with an explicit ratio guard, for callers that
/// justify a wider pooling region than `lambda_threshold(alpha)` (for
/// example by applying the guard at the per-observation shape).
pub fn shrink_better_with_lambda(stat: &SufficientStat, c: f64, lambda: f64) -> f64 {
    let a = stat.alpha.get();
    let o = select(stat);
    let psi2a = digamma_raw(2.0 * a);
    if o.v <= lambda && o.v > libm::expm1(psi2a - c) {
        libm::log(stat.x1 + stat.x2) - psi2a
    } else {
        libm::log(o.z1) - c
    }
}

/// Arbitrary equivariant worse-target estimator `ln Z2 - phi(t)`.
pub fn estimate_custom_worse<P: Fn(f64) -> f64>(stat: &SufficientStat, phi: P) -> f64 {
    let o = select(stat);
    libm::log(o.z2) - phi(o.t)
}

/// Arbitrary equivariant better-target estimator `ln Z1 - phi(v)`.
pub fn estimate_custom_better<P: Fn(f64) -> f64>(stat: &SufficientStat, phi: P) -> f64 {
    let o = select(stat);
    libm::log(o.z1) - phi(o.v)
}

/// One-step risk improvement for the worse target: caps `phi(t)` at
/// `psi(2 alpha) - ln(1+t)`. Applying this to a constant `phi == c`
/// reproduces the `ShrinkWorse(c)` branches pointwise.
pub fn improve_worse(phi_value: f64, t: f64, alpha: Shape) -> f64 {
    let star = phi_star_worse_raw(t, alpha.get());
    if phi_value > star {
        star
    } else {
        phi_value
    }
}

/// Better-target improvement: the cap applies only while
/// `v <= lambda_threshold(alpha)`.
pub fn improve_better(phi_value: f64, v: f64, alpha: Shape) -> f64 {
    if v > lambda_threshold(alpha) {
        return phi_value;
    }
    let star = phi_star_better_raw(v, alpha.get());
    if phi_value > star {
        star
    } else {
        phi_value
    }
}

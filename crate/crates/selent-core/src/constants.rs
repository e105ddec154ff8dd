//! Alpha-indexed constants and kernel functions driving the admissibility
//! bands and shrinkage thresholds.
//!
//! For two `Gamma(alpha, theta_i)` observations with scale ratio
//! `mu = max(theta)/min(theta) >= 1` (worse target) or
//! `theta = min/max in (0,1]` (better target):
//!
//! * `c1 = psi(alpha)` and `c2`/`c3` bound the constants `c` for which the
//!   naive estimator `ln Z - c` is admissible within its class;
//! * `beta0`/`beta1` are the matching prior-exponent boundaries;
//! * `c_star_worse`/`c_star_better` are the risk-minimizing constants at a
//!   fixed ratio;
//! * `k_worse`/`k_better` are the conditional-mean kernels whose infima give
//!   the shrinkage thresholds `phi_star_worse`/`phi_star_better`.

use crate::error::{Error, Result};
use crate::numerics::{
    self, digamma_raw, gamma_cdf_raw, gamma_pdf_raw, integrate_halfline, QuadratureConfig, Shape,
};
use alloc::string::String;
use alloc::vec::Vec;

/// The alpha list used for the reference table, including the two crossover
/// rows 0.63 (where `c2 = ln alpha`) and 6.05 (where `c2 = ln(alpha+1)`).
pub const DEFAULT_TABLE_ALPHAS: [f64; 27] = [
    0.2, 0.4, 0.6, 0.63, 0.8, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.05, 6.5,
    7.0, 8.0, 9.0, 10.0, 12.0, 15.0, 16.0, 18.0, 20.0,
];

/// One row of the constants table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsRow {
    pub alpha: Shape,
    /// `psi(alpha)`; lower admissibility endpoint and limit of `c*` at
    /// extreme ratios.
    pub c1: f64,
    /// `2 int ln(z) G_a(z) g_a(z) dz = E[ln max(Y1, Y2)]`; upper endpoint
    /// for the worse target.
    pub c2: f64,
    /// `2 int ln(z) [1 - G_a(z)] g_a(z) dz = E[ln min(Y1, Y2)]`; endpoint
    /// for the better target.
    pub c3: f64,
    pub ln_alpha: f64,
    pub ln_alpha_plus_1: f64,
    /// `inv_digamma(c2) - alpha`, in `(0, alpha)`.
    pub beta0: f64,
    /// `inv_digamma(c3) - alpha`, in `(-alpha, 0)`.
    pub beta1: f64,
    /// `psi(2 alpha) - ln 2`; strictly between `c1` and `c2`.
    pub psi2a_minus_ln2: f64,
}

impl ConstantsRow {
    /// CSV header matching [`ConstantsRow::to_csv_row`].
    pub fn csv_header() -> &'static str {
        "alpha,c1,c2,c3,ln_alpha,ln_alpha_plus_1,beta0,beta1,psi2a_minus_ln2"
    }

    /// Full-precision CSV line (shortest round-trip decimal per field).
    pub fn to_csv_row(&self) -> String {
        alloc::format!(
            "{},{},{},{},{},{},{},{},{}",
            self.alpha.get(),
            self.c1,
            self.c2,
            self.c3,
            self.ln_alpha,
            self.ln_alpha_plus_1,
            self.beta0,
            self.beta1,
            self.psi2a_minus_ln2
        )
    }
}

/// `c1(alpha) = psi(alpha)`: the risk-minimizing constant as the scale ratio
/// degenerates (`mu -> inf` or `theta -> 0`).
pub fn c1(alpha: Shape) -> f64 {
    digamma_raw(alpha.get())
}

// Request used by the no-config wrappers. Tighter than the integrator's
// default because `c2 + c3 = 2 psi` must hold to 1e-9 even at alpha = 0.1,
// where both values approach psi(alpha) ~ -10 and a relative request of
// 1e-10 would already permit a ~1e-9 slack per integral.
pub(crate) fn tight_quadrature() -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: 1e-12,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    }
}

/// `c2(alpha) = 2 int_0^inf ln(z) G_a(z) g_a(z) dz`, the mean of
/// `ln max(Y1, Y2)` for iid `Gamma(alpha, 1)` pairs; the risk-minimizing
/// constant at equal scales.
pub fn c2(alpha: Shape) -> Result<f64> {
    c2_with(alpha, &tight_quadrature())
}

/// [`c2`] under an explicit quadrature configuration.
pub fn c2_with(alpha: Shape, cfg: &QuadratureConfig) -> Result<f64> {
    let a = alpha.get();
    integrate_halfline(
        |z| 2.0 * libm::log(z) * gamma_cdf_raw(z, a) * gamma_pdf_raw(z, a),
        cfg,
    )
}

/// `c3(alpha) = 2 int_0^inf ln(z) [1 - G_a(z)] g_a(z) dz`, the mean of
/// `ln min(Y1, Y2)`; satisfies `c2 + c3 = 2 psi(alpha)`.
pub fn c3(alpha: Shape) -> Result<f64> {
    c3_with(alpha, &tight_quadrature())
}

/// [`c3`] under an explicit quadrature configuration.
pub fn c3_with(alpha: Shape, cfg: &QuadratureConfig) -> Result<f64> {
    let a = alpha.get();
    integrate_halfline(
        |z| 2.0 * libm::log(z) * (1.0 - gamma_cdf_raw(z, a)) * gamma_pdf_raw(z, a),
        cfg,
    )
}

/// `beta0(alpha) = inv_digamma(c2(alpha)) - alpha`: the largest prior
/// exponent whose generalized Bayes estimator stays admissible (worse
/// target); lies in `(0, alpha)`.
pub fn beta0(alpha: Shape) -> Result<f64> {
    beta0_with(alpha, &tight_quadrature())
}

/// [`beta0`] under an explicit quadrature configuration.
pub fn beta0_with(alpha: Shape, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(numerics::inv_digamma(c2_with(alpha, cfg)?) - alpha.get())
}

/// `beta1(alpha) = inv_digamma(c3(alpha)) - alpha`: the better-target
/// analogue; lies in `(-alpha, 0)`.
pub fn beta1(alpha: Shape) -> Result<f64> {
    beta1_with(alpha, &tight_quadrature())
}

/// [`beta1`] under an explicit quadrature configuration.
pub fn beta1_with(alpha: Shape, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(numerics::inv_digamma(c3_with(alpha, cfg)?) - alpha.get())
}

/// Risk-minimizing constant for the worse target at scale ratio `mu >= 1`:
/// `int ln(z) [G_a(z/mu) + G_a(mu z)] g_a(z) dz`. Strictly decreasing in
/// `mu`, from `c2(alpha)` at `mu = 1` down to `c1(alpha)` as `mu -> inf`.
pub fn c_star_worse(mu: f64, alpha: Shape) -> Result<f64> {
    c_star_worse_with(mu, alpha, &QuadratureConfig::default())
}

/// [`c_star_worse`] under an explicit quadrature configuration.
pub fn c_star_worse_with(mu: f64, alpha: Shape, cfg: &QuadratureConfig) -> Result<f64> {
    if !(mu >= 1.0) || !mu.is_finite() {
        return Err(Error::Domain {
            what: "mu",
            value: mu,
        });
    }
    let a = alpha.get();
    integrate_halfline(
        |z| {
            libm::log(z)
                * (gamma_cdf_raw(z / mu, a) + gamma_cdf_raw(mu * z, a))
                * gamma_pdf_raw(z, a)
        },
        cfg,
    )
}

/// Closed-form derivative of [`c_star_worse`] in `mu`:
/// `-Gamma(2a) mu^(a-1) ln(mu) / (Gamma(a)^2 (1+mu)^(2a))`.
pub fn c_star_worse_deriv(mu: f64, alpha: Shape) -> Result<f64> {
    if !(mu >= 1.0) || !mu.is_finite() {
        return Err(Error::Domain {
            what: "mu",
            value: mu,
        });
    }
    let a = alpha.get();
    let ln_coef = libm::lgamma(2.0 * a) - 2.0 * libm::lgamma(a) + (a - 1.0) * libm::log(mu)
        - 2.0 * a * libm::log(1.0 + mu);
    Ok(-libm::exp(ln_coef) * libm::log(mu))
}

/// Risk-minimizing constant for the better target at scale ratio
/// `theta in (0, 1]`: `int ln(z) [(1 - G_a(theta z)) + (1 - G_a(z/theta))]
/// g_a(z) dz`. Decreasing in `theta`, from `c1(alpha)` as `theta -> 0` down
/// to `c3(alpha)` at `theta = 1`.
pub fn c_star_better(theta: f64, alpha: Shape) -> Result<f64> {
    c_star_better_with(theta, alpha, &QuadratureConfig::default())
}

/// [`c_star_better`] under an explicit quadrature configuration.
pub fn c_star_better_with(theta: f64, alpha: Shape, cfg: &QuadratureConfig) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    let a = alpha.get();
    integrate_halfline(
        |z| {
            libm::log(z)
                * (2.0 - gamma_cdf_raw(theta * z, a) - gamma_cdf_raw(z / theta, a))
                * gamma_pdf_raw(z, a)
        },
        cfg,
    )
}

/// Conditional-mean kernel for the worse target:
/// `k_t(mu) = [(1+t mu)^{2a} ln(1+t/mu) + (mu+t)^{2a} ln(1+t mu)] /
/// [(1+t mu)^{2a} + (mu+t)^{2a}]`.
///
/// Evaluated as a log-space convex combination so the `2a`-th powers never
/// overflow. `inf over mu >= 1` is `ln(1+t)`, attained at `mu = 1`.
pub fn k_worse(t: f64, mu: f64, alpha: Shape) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
        });
    }
    if !(mu >= 1.0) || !mu.is_finite() {
        return Err(Error::Domain {
            what: "mu",
            value: mu,
        });
    }
    Ok(kernel_mix(t, mu, alpha.get()))
}

/// Conditional-mean kernel for the better target, same shape with
/// `(v, theta)` in place of `(t, mu)`. For `v <= lambda_threshold(alpha)`
/// the infimum over `theta in (0, 1]` is `ln(1+v)`.
pub fn k_better(v: f64, theta: f64, alpha: Shape) -> Result<f64> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(Error::Domain {
            what: "v",
            value: v,
        });
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    Ok(kernel_mix(v, theta, alpha.get()))
}

/// Shared kernel: with `r` the observed ratio and `s` the scale ratio,
/// computes `w ln(1+r/s) + (1-w) ln(1+r s)` where
/// `w = (1+r s)^{2a} / [(1+r s)^{2a} + (s+r)^{2a}]`.
fn kernel_mix(r: f64, s: f64, a: f64) -> f64 {
    // ln B - ln A with A = (1+r s)^{2a}, B = (s+r)^{2a}
    let d = 2.0 * a * (libm::log(s + r) - libm::log1p(r * s));
    let w = 1.0 / (1.0 + libm::exp(d));
    w * libm::log1p(r / s) + (1.0 - w) * libm::log1p(r * s)
}

/// Upper ratio bound `min{1 + 1/(2 alpha), 1 + sqrt(3)}` under which the
/// better-target shrinkage improvement is justified.
pub fn lambda_threshold(alpha: Shape) -> f64 {
    f64::min(1.0 + 0.5 / alpha.get(), 1.0 + libm::sqrt(3.0))
}

/// Supremum over `mu` of the conditional mean of `ln Z2 - H_S` given
/// `T = t`: `psi(2 alpha) - ln(1+t)`.
pub fn phi_star_worse(t: f64, alpha: Shape) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
        });
    }
    Ok(phi_star_worse_raw(t, alpha.get()))
}

pub(crate) fn phi_star_worse_raw(t: f64, a: f64) -> f64 {
    digamma_raw(2.0 * a) - libm::log1p(t)
}

/// Better-target analogue: `psi(2 alpha) - ln(1+v)` for `v >= 1`.
pub fn phi_star_better(v: f64, alpha: Shape) -> Result<f64> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(Error::Domain {
            what: "v",
            value: v,
        });
    }
    Ok(phi_star_better_raw(v, alpha.get()))
}

pub(crate) fn phi_star_better_raw(v: f64, a: f64) -> f64 {
    digamma_raw(2.0 * a) - libm::log1p(v)
}

/// Conditional density of `U = ln Z2 - H_S` given `T = t` at scale ratio
/// `mu`. Two Gumbel-type mixture terms weighted by `mu^{-a}` and `mu^{a}`;
/// integrates to 1 over `u` and has mean `psi(2a) - k_worse(t, mu, a)`.
pub fn conditional_pdf_worse(u: f64, t: f64, mu: f64, alpha: Shape) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain {
            what: "t",
            value: t,
        });
    }
    if !(mu >= 1.0) || !mu.is_finite() {
        return Err(Error::Domain {
            what: "mu",
            value: mu,
        });
    }
    Ok(conditional_pdf_mixture(u, t, mu, alpha.get()))
}

/// Conditional density of `U1 = ln Z1 - H_M` given `V = v` at scale ratio
/// `theta`; same mixture with `(v, theta)` in place of `(t, mu)`.
pub fn conditional_pdf_better(u: f64, v: f64, theta: f64, alpha: Shape) -> Result<f64> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(Error::Domain {
            what: "v",
            value: v,
        });
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
        });
    }
    Ok(conditional_pdf_mixture(u, v, theta, alpha.get()))
}

/// `[s^{-a} e^{2au} e^{-(1+r/s)e^u} + s^{a} e^{2au} e^{-(1+rs)e^u}] /
/// (Gamma(2a) [s^{-a}(1+r/s)^{-2a} + s^{a}(1+rs)^{-2a}])`, evaluated in log
/// space so both large `a` and extreme `u` stay finite.
fn conditional_pdf_mixture(u: f64, r: f64, s: f64, a: f64) -> f64 {
    let eu = libm::exp(u);
    if !eu.is_finite() {
        return 0.0;
    }
    let ln_s = libm::log(s);
    let t1 = -a * ln_s + 2.0 * a * u - (1.0 + r / s) * eu;
    let t2 = a * ln_s + 2.0 * a * u - (1.0 + r * s) * eu;
    let n1 = -a * ln_s - 2.0 * a * libm::log1p(r / s);
    let n2 = a * ln_s - 2.0 * a * libm::log1p(r * s);
    let num = log_sum_exp(t1, t2);
    let den = libm::lgamma(2.0 * a) + log_sum_exp(n1, n2);
    libm::exp(num - den)
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}

/// Computes one [`ConstantsRow`] per requested alpha.
pub fn generate_table(alphas: &[Shape]) -> Result<Vec<ConstantsRow>> {
    generate_table_with(alphas, &tight_quadrature())
}

/// [`generate_table`] under an explicit quadrature configuration.
pub fn generate_table_with(alphas: &[Shape], cfg: &QuadratureConfig) -> Result<Vec<ConstantsRow>> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let a = alpha.get();
        let c2v = c2_with(alpha, cfg)?;
        let c3v = c3_with(alpha, cfg)?;
        rows.push(ConstantsRow {
            alpha,
            c1: c1(alpha),
            c2: c2v,
            c3: c3v,
            ln_alpha: libm::log(a),
            ln_alpha_plus_1: libm::log1p(a),
            beta0: numerics::inv_digamma(c2v) - a,
            beta1: numerics::inv_digamma(c3v) - a,
            psi2a_minus_ln2: digamma_raw(2.0 * a) - core::f64::consts::LN_2,
        });
    }
    Ok(rows)
}

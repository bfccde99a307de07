//! One-dimensional quadrature.
//!
//! `DoubleExponential` is the tanh-sinh rule on finite intervals and the
//! exp-sinh rule on `[a, ∞)`; both tolerate integrable endpoint singularities
//! and singular derivatives. `GaussLegendreComposite` is a 20-point rule on
//! panels that are doubled until successive sums agree.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureScheme {
    GaussLegendreComposite,
    DoubleExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub rel_tol: f64,
    pub max_refinements: u32,
}

impl QuadratureSpec {
    pub fn new(scheme: QuadratureScheme, rel_tol: f64, max_refinements: u32) -> Result<Self> {
        if !(1e-14..=1e-4).contains(&rel_tol) {
            return Err(Error::ParamDomain(format!(
                "quadrature rel_tol {rel_tol:e} outside [1e-14, 1e-4]"
            )));
        }
        Ok(Self {
            scheme,
            rel_tol,
            max_refinements,
        })
    }

    pub fn double_exponential(rel_tol: f64) -> Self {
        Self {
            scheme: QuadratureScheme::DoubleExponential,
            rel_tol,
            max_refinements: 12,
        }
    }

    pub fn gauss_legendre(rel_tol: f64) -> Self {
        Self {
            scheme: QuadratureScheme::GaussLegendreComposite,
            rel_tol,
            max_refinements: 16,
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::double_exponential(1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error_estimate: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl QuadResult {
    /// The value if the tolerance was reached, otherwise a convergence error.
    pub fn require(self, what: &str) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::Convergence(format!(
                "{what}: quadrature stopped at error estimate {:e}",
                self.error_estimate
            )))
        }
    }
}

/// `∫_a^b f`. `b` may be `f64::INFINITY` for the double-exponential scheme.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::Input(format!("integration bounds [{a}, {b}] out of order")));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            converged: true,
            evaluations: 0,
        });
    }
    if b.is_infinite() {
        return match spec.scheme {
            QuadratureScheme::DoubleExponential => exp_sinh(&f, a, 1.0, spec),
            QuadratureScheme::GaussLegendreComposite => Err(Error::Input(
                "Gauss-Legendre needs a finite interval".into(),
            )),
        };
    }
    match spec.scheme {
        QuadratureScheme::DoubleExponential => tanh_sinh(&f, a, b, spec),
        QuadratureScheme::GaussLegendreComposite => gauss_legendre(&f, a, b, spec),
    }
}

/// `∫_a^∞ f` with the exp-sinh rule, nodes placed at `a + scale·exp(π/2 sinh t)`.
pub fn integrate_to_infinity<F>(f: F, a: f64, scale: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !(scale > 0.0) {
        return Err(Error::Input(format!("exp-sinh scale must be positive, got {scale}")));
    }
    exp_sinh(&f, a, scale, spec)
}

fn eval(f: &impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Input(format!("integrand not finite at x = {x:e}")))
    }
}

const TANH_SINH_TMAX: f64 = 3.5;

fn tanh_sinh(f: &impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;

    // contribution of the node pair at +t, -t (or the midpoint at t = 0)
    let pair = |t: f64, evals: &mut usize| -> Result<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        if t == 0.0 {
            *evals += 1;
            return Ok(w * eval(f, mid)?);
        }
        // distance from the endpoint, computed without cancellation
        let d = half * 2.0 / ((2.0 * u).exp() + 1.0);
        if d == 0.0 || w == 0.0 {
            return Ok(0.0);
        }
        *evals += 2;
        Ok(w * (eval(f, b - d)? + eval(f, a + d)?))
    };

    let mut h = 1.0;
    let mut sum = pair(0.0, &mut evaluations)?;
    let mut j = 1;
    while j as f64 * h <= TANH_SINH_TMAX {
        sum += pair(j as f64 * h, &mut evaluations)?;
        j += 1;
    }
    let mut estimate = sum * h * half;
    let mut err = f64::INFINITY;
    for level in 1..=spec.max_refinements {
        h *= 0.5;
        let mut add = 0.0;
        let mut j = 1;
        while j as f64 * h <= TANH_SINH_TMAX {
            add += pair(j as f64 * h, &mut evaluations)?;
            j += 2;
        }
        sum += add;
        let next = sum * h * half;
        err = (next - estimate).abs();
        estimate = next;
        if level >= 3 && err <= spec.rel_tol * estimate.abs().max(f64::MIN_POSITIVE) {
            return Ok(QuadResult {
                value: estimate,
                error_estimate: err,
                converged: true,
                evaluations,
            });
        }
        if level >= 3 && estimate == 0.0 && err == 0.0 {
            break;
        }
    }
    Ok(QuadResult {
        value: estimate,
        error_estimate: err,
        converged: err == 0.0,
        evaluations,
    })
}

const EXP_SINH_TMAX: f64 = 4.5;

fn exp_sinh(f: &impl Fn(f64) -> f64, a: f64, scale: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let mut evaluations = 0usize;
    let node = |t: f64, evals: &mut usize| -> Result<f64> {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let x = a + scale * e;
        let w = scale * FRAC_PI_2 * t.cosh() * e;
        if !w.is_finite() || !x.is_finite() || w == 0.0 {
            return Ok(0.0);
        }
        *evals += 1;
        let v = eval(f, x)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(w * v)
    };
    let mut h = 1.0;
    let mut sum = 0.0;
    let n0 = (EXP_SINH_TMAX / h) as i64;
    for j in -n0..=n0 {
        sum += node(j as f64 * h, &mut evaluations)?;
    }
    let mut estimate = sum * h;
    let mut err = f64::INFINITY;
    for level in 1..=spec.max_refinements {
        h *= 0.5;
        let n = (EXP_SINH_TMAX / h) as i64;
        let mut add = 0.0;
        let mut j = -n + if n % 2 == 0 { 1 } else { 0 };
        while j <= n {
            if j % 2 != 0 {
                add += node(j as f64 * h, &mut evaluations)?;
            }
            j += 1;
        }
        sum += add;
        let next = sum * h;
        err = (next - estimate).abs();
        estimate = next;
        if level >= 3 && err <= spec.rel_tol * estimate.abs().max(f64::MIN_POSITIVE) {
            return Ok(QuadResult {
                value: estimate,
                error_estimate: err,
                converged: true,
                evaluations,
            });
        }
    }
    Ok(QuadResult {
        value: estimate,
        error_estimate: err,
        converged: false,
        evaluations,
    })
}

const GL_ORDER: usize = 20;

/// Nodes and weights of the `GL_ORDER`-point Gauss-Legendre rule on [-1, 1].
fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(GL_ORDER))
}

pub(crate) fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn gauss_legendre(f: &impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let (nodes, weights) = gl_rule();
    let mut evaluations = 0usize;
    let panel_sum = |panels: usize, evals: &mut usize| -> Result<f64> {
        let width = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let c = lo + 0.5 * width;
            let mut s = 0.0;
            for (x, w) in nodes.iter().zip(weights) {
                s += w * eval(f, c + 0.5 * width * x)?;
            }
            *evals += nodes.len();
            total += 0.5 * width * s;
        }
        Ok(total)
    };
    let mut panels = 1usize;
    let mut estimate = panel_sum(panels, &mut evaluations)?;
    let mut err = f64::INFINITY;
    for _ in 0..spec.max_refinements {
        panels *= 2;
        let next = panel_sum(panels, &mut evaluations)?;
        err = (next - estimate).abs();
        estimate = next;
        if err <= spec.rel_tol * estimate.abs().max(f64::MIN_POSITIVE) {
            return Ok(QuadResult {
                value: estimate,
                error_estimate: err,
                converged: true,
                evaluations,
            });
        }
    }
    Ok(QuadResult {
        value: estimate,
        error_estimate: err,
        converged: false,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate(|x| x.exp(), 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn linear_and_polynomials() {
        for spec in [
            QuadratureSpec::double_exponential(1e-13),
            QuadratureSpec::gauss_legendre(1e-13),
        ] {
            let r = integrate(|x| x, 0.0, 1.0, &spec).unwrap();
            assert!((r.value - 0.5).abs() < 1e-14);
            // degree-39 polynomial is exact for the 20-point rule
            let r = integrate(|x| x.powi(39), 0.0, 1.0, &spec).unwrap();
            assert!((r.value - 1.0 / 40.0).abs() < 1e-13, "{spec:?}");
        }
    }

    #[test]
    fn gl_rule_sums() {
        let (x, w) = gauss_legendre_rule(GL_ORDER);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((m2 - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 1/sqrt(x) = 2, ∫_0^1 ln x = -1
        let spec = QuadratureSpec::double_exponential(1e-12);
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-11);
        let r = integrate(|x| x.ln(), 0.0, 1.0, &spec).unwrap();
        assert!((r.value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn semi_infinite_gaussian() {
        let spec = QuadratureSpec::double_exponential(1e-13);
        let c: f64 = 0.03;
        let r = integrate_to_infinity(|s| (-s * s / c).exp(), 0.0, c.sqrt(), &spec).unwrap();
        let exact = (std::f64::consts::PI * c).sqrt() / 2.0;
        assert!(((r.value - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn unconverged_is_flagged() {
        let spec = QuadratureSpec {
            scheme: QuadratureScheme::GaussLegendreComposite,
            rel_tol: 1e-14,
            max_refinements: 1,
        };
        let r = integrate(|x| (50.0 * x).sin().abs(), 0.0, 3.0, &spec).unwrap();
        assert!(!r.converged);
        assert!(r.require("test").is_err());
    }

    #[test]
    fn tolerance_domain() {
        assert!(QuadratureSpec::new(QuadratureScheme::DoubleExponential, 1e-3, 5).is_err());
        assert!(QuadratureSpec::new(QuadratureScheme::DoubleExponential, 1e-15, 5).is_err());
        assert!(QuadratureSpec::new(QuadratureScheme::DoubleExponential, 1e-10, 5).is_ok());
    }
}

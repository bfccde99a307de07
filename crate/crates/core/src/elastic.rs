//! Material parameters, model domains, and the closed-form two-term
//! coefficients of the elastic counting function and heat trace.
//!
//! Two competing boundary coefficients are provided:
//! - [`Theory::Cflv`]: the billiard-based counting-function coefficients with
//!   an arctan integral term and, for free boundaries, a Rayleigh-wave term
//!   `4 γ_R^{1-n}`;
//! - [`Theory::Liu`]: the coefficients obtained from the heat-trace expansion
//!   through the Γ-factor conversion, sign-symmetric in the boundary condition.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{find_root, gamma_fn, integrate, newton_polish, QuadratureSpec};

pub const MAX_DIM: u32 = 10;

/// Lamé parameters. `alpha = mu / (lambda + 2 mu)` is derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LameParams {
    mu: f64,
    lambda: f64,
}

impl LameParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !mu.is_finite() || !lambda.is_finite() {
            return Err(Error::ParamDomain("Lamé parameters must be finite".into()));
        }
        if mu <= 0.0 {
            return Err(Error::ParamDomain(format!("mu must be positive, got {mu}")));
        }
        if mu + lambda < 0.0 {
            return Err(Error::ParamDomain(format!(
                "mu + lambda must be nonnegative, got {}",
                mu + lambda
            )));
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// P-wave modulus `lambda + 2 mu`.
    pub fn p_modulus(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    pub fn alpha(&self) -> f64 {
        if self.lambda + self.mu == 0.0 {
            1.0
        } else {
            self.mu / self.p_modulus()
        }
    }

    /// True when `lambda + mu = 0`: the operator is `mu` times the vector Laplacian.
    pub fn is_decoupled(&self) -> bool {
        self.lambda + self.mu == 0.0
    }

    /// Same parameters scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(c * self.mu, c * self.lambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// `u = 0` on the boundary.
    Dirichlet,
    /// Zero traction `σ(u)·ν = 0`, `σ = 2μ ε(u) + λ (div u) I`.
    Free,
}

impl BoundaryCondition {
    pub fn sign(&self) -> f64 {
        match self {
            Self::Dirichlet => -1.0,
            Self::Free => 1.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Dirichlet => "dirichlet",
            Self::Free => "free",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Self::Dirichlet),
            "free" | "neumann" => Ok(Self::Free),
            other => Err(Error::Parse(format!("unknown boundary condition '{other}'"))),
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The two planar model domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    #[serde(rename = "disk")]
    UnitDisk,
    #[serde(rename = "square")]
    UnitSquare,
}

impl Domain {
    pub fn dimension(&self) -> u32 {
        2
    }

    /// Area.
    pub fn volume(&self) -> f64 {
        match self {
            Self::UnitDisk => PI,
            Self::UnitSquare => 1.0,
        }
    }

    /// Perimeter.
    pub fn boundary_length(&self) -> f64 {
        match self {
            Self::UnitDisk => 2.0 * PI,
            Self::UnitSquare => 4.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::UnitDisk => "disk",
            Self::UnitSquare => "square",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disk" | "unitdisk" => Ok(Self::UnitDisk),
            "square" | "unitsquare" => Ok(Self::UnitSquare),
            other => Err(Error::Parse(format!("unknown domain '{other}'"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Cflv,
    Liu,
}

impl Theory {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Cflv => "cflv",
            Self::Liu => "liu",
        }
    }
}

fn check_dim(n: u32) -> Result<()> {
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::ParamDomain(format!("dimension must be in 2..={MAX_DIM}, got {n}")));
    }
    Ok(())
}

/// Leading Weyl coefficient
/// `a = ((n-1) μ^{-n/2} + (λ+2μ)^{-n/2}) / ((4π)^{n/2} Γ(1+n/2))`.
pub fn weyl_a(params: &LameParams, n: u32) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    let g = gamma_fn(1.0 + nf / 2.0)?;
    Ok(((nf - 1.0) * params.mu.powf(-nf / 2.0) + params.p_modulus().powf(-nf / 2.0))
        / ((4.0 * PI).powf(nf / 2.0) * g))
}

/// Root `w1 ∈ [0, 1)` of `R_α(w) = w³ − 8w² + 8(3−2α)w + 16(α−1)` and `γ_R = √w1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighRoot {
    pub alpha: f64,
    pub w1: f64,
    pub gamma_r: f64,
    pub residual: f64,
}

pub fn rayleigh_cubic(alpha: f64, w: f64) -> f64 {
    ((w - 8.0) * w + 8.0 * (3.0 - 2.0 * alpha)) * w + 16.0 * (alpha - 1.0)
}

fn rayleigh_cubic_prime(alpha: f64, w: f64) -> f64 {
    (3.0 * w - 16.0) * w + 8.0 * (3.0 - 2.0 * alpha)
}

pub fn rayleigh_root(alpha: f64) -> Result<RayleighRoot> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::ParamDomain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok(RayleighRoot {
            alpha,
            w1: 0.0,
            gamma_r: 0.0,
            residual: 0.0,
        });
    }
    // R(0) = 16(α-1) < 0 and R(1) = 1 > 0 bracket the root.
    let f = |w| rayleigh_cubic(alpha, w);
    let w = find_root(f, 0.0, 1.0, 1e-15)?;
    let w1 = newton_polish(f, |w| rayleigh_cubic_prime(alpha, w), w, 0.0, 1.0, 4);
    Ok(RayleighRoot {
        alpha,
        w1,
        gamma_r: w1.sqrt(),
        residual: f(w1).abs(),
    })
}

/// `μ^{(1-n)/2} / (2^{n+1} π^{(n-1)/2} Γ((n+1)/2))`, the common prefactor of
/// both boundary coefficients.
fn boundary_prefactor(params: &LameParams, n: u32) -> Result<f64> {
    let nf = n as f64;
    Ok(params.mu.powf((1.0 - nf) / 2.0)
        / (2f64.powi(n as i32 + 1) * PI.powf((nf - 1.0) / 2.0) * gamma_fn((nf + 1.0) / 2.0)?))
}

const COEFF_QUAD_TOL: f64 = 1e-12;

/// `∫_{√α}^1 τ^{n-2} arctan(√((1−ατ⁻²)(τ⁻²−1))) dτ`.
pub fn cflv_dirichlet_integral(alpha: f64, n: u32) -> Result<f64> {
    let lo = alpha.sqrt();
    let p = n as i32 - 2;
    let f = move |tau: f64| {
        let it2 = 1.0 / (tau * tau);
        let g = ((1.0 - alpha * it2).max(0.0) * (it2 - 1.0).max(0.0)).sqrt();
        tau.powi(p) * g.atan()
    };
    integrate(f, lo, 1.0, &QuadratureSpec::double_exponential(COEFF_QUAD_TOL))?
        .require("Dirichlet boundary integral")
}

/// `∫_{√α}^1 τ^{n-2} arctan((τ⁻²−2)² / (4√((1−ατ⁻²)(τ⁻²−1)))) dτ`.
pub fn cflv_free_integral(alpha: f64, n: u32) -> Result<f64> {
    let lo = alpha.sqrt();
    let p = n as i32 - 2;
    let f = move |tau: f64| {
        let it2 = 1.0 / (tau * tau);
        let root = ((1.0 - alpha * it2).max(0.0) * (it2 - 1.0).max(0.0)).sqrt();
        let num = (it2 - 2.0) * (it2 - 2.0);
        // num / 0 = +inf and atan(+inf) = π/2 at the endpoints
        tau.powi(p) * (num / (4.0 * root)).atan()
    };
    let spec = QuadratureSpec::double_exponential(COEFF_QUAD_TOL);
    // the integrand has a kink-free zero at τ = 1/√2; split there when interior
    let split = std::f64::consts::FRAC_1_SQRT_2;
    if lo < split {
        let a = integrate(f, lo, split, &spec)?.require("free boundary integral")?;
        let b = integrate(f, split, 1.0, &spec)?.require("free boundary integral")?;
        Ok(a + b)
    } else {
        integrate(f, lo, 1.0, &spec)?.require("free boundary integral")
    }
}

/// Boundary coefficient of the billiard-based counting asymptotics.
pub fn b_cflv(params: &LameParams, n: u32, bc: BoundaryCondition) -> Result<f64> {
    check_dim(n)?;
    let alpha = params.alpha();
    let nf = n as f64;
    let pre = boundary_prefactor(params, n)?;
    let tail = alpha.powf((nf - 1.0) / 2.0);
    match bc {
        BoundaryCondition::Dirichlet => {
            let integral = if alpha == 1.0 { 0.0 } else { cflv_dirichlet_integral(alpha, n)? };
            Ok(-pre * (4.0 * (nf - 1.0) / PI * integral + tail + nf - 1.0))
        }
        BoundaryCondition::Free => {
            let root = rayleigh_root(alpha)?;
            if root.gamma_r == 0.0 {
                return Err(Error::SingularLimit {
                    quantity: "free-boundary coefficient",
                    diagnostic: format!(
                        "alpha = 1 gives gamma_R = 0 and the term 4*gamma_R^(1-n) diverges for n = {n}; \
                         dropping it would give the finite value (n-4)*C = {:.12e}, which is not returned",
                        pre * (nf - 4.0)
                    ),
                });
            }
            let integral = cflv_free_integral(alpha, n)?;
            Ok(pre
                * (4.0 * (nf - 1.0) / PI * integral + tail + nf - 5.0
                    + 4.0 * root.gamma_r.powf(1.0 - nf)))
        }
    }
}

/// Sign-symmetric boundary coefficient
/// `∓ μ^{(1-n)/2} (α^{(n-1)/2} + n − 1) / (2^{n+1} π^{(n-1)/2} Γ((n+1)/2))`.
pub fn b_liu(params: &LameParams, n: u32, bc: BoundaryCondition) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    let magnitude =
        boundary_prefactor(params, n)? * (params.alpha().powf((nf - 1.0) / 2.0) + nf - 1.0);
    Ok(bc.sign() * magnitude)
}

/// Counting-function coefficients `N(Λ) ≈ a Vol Λ^{n/2} + b∓ |∂Ω| Λ^{(n-1)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylTwoTerm {
    pub theory: Theory,
    pub dim: u32,
    pub a: f64,
    pub b_minus: f64,
    pub b_plus: f64,
}

/// Heat-trace coefficients `Z(t) ≈ ã Vol t^{-n/2} + b̃∓ |∂Ω| t^{-(n-1)/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatTwoTerm {
    pub dim: u32,
    pub a_tilde: f64,
    pub b_tilde_minus: f64,
    pub b_tilde_plus: f64,
}

impl HeatTwoTerm {
    pub fn b_tilde(&self, bc: BoundaryCondition) -> f64 {
        match bc {
            BoundaryCondition::Dirichlet => self.b_tilde_minus,
            BoundaryCondition::Free => self.b_tilde_plus,
        }
    }
}

impl WeylTwoTerm {
    pub fn b(&self, bc: BoundaryCondition) -> f64 {
        match bc {
            BoundaryCondition::Dirichlet => self.b_minus,
            BoundaryCondition::Free => self.b_plus,
        }
    }
}

pub fn weyl_two_term(params: &LameParams, n: u32, theory: Theory) -> Result<WeylTwoTerm> {
    let a = weyl_a(params, n)?;
    let (b_minus, b_plus) = match theory {
        Theory::Cflv => (
            b_cflv(params, n, BoundaryCondition::Dirichlet)?,
            b_cflv(params, n, BoundaryCondition::Free)?,
        ),
        Theory::Liu => (
            b_liu(params, n, BoundaryCondition::Dirichlet)?,
            b_liu(params, n, BoundaryCondition::Free)?,
        ),
    };
    Ok(WeylTwoTerm {
        theory,
        dim: n,
        a,
        b_minus,
        b_plus,
    })
}

/// Heat coefficients from counting coefficients: `ã = Γ(1+n/2) a`,
/// `b̃ = Γ(1+(n-1)/2) b`.
pub fn to_heat_coeffs(w: &WeylTwoTerm) -> HeatTwoTerm {
    let nf = w.dim as f64;
    let ga = gamma_fn(1.0 + nf / 2.0).expect("dimension validated on construction");
    let gb = gamma_fn(1.0 + (nf - 1.0) / 2.0).expect("dimension validated on construction");
    HeatTwoTerm {
        dim: w.dim,
        a_tilde: ga * w.a,
        b_tilde_minus: gb * w.b_minus,
        b_tilde_plus: gb * w.b_plus,
    }
}

/// The heat coefficients read directly off the heat-trace expansion
/// `Z∓ ≈ [(n-1)(4πμt)^{-n/2} + (4π(λ+2μ)t)^{-n/2}] Vol ∓ ¼[(n-1)(4πμt)^{-(n-1)/2} + (4π(λ+2μ)t)^{-(n-1)/2}] |∂Ω|`.
pub fn heat_two_term_direct(params: &LameParams, n: u32) -> Result<HeatTwoTerm> {
    check_dim(n)?;
    let nf = n as f64;
    let (mu, pm) = (params.mu, params.p_modulus());
    let a_tilde = ((nf - 1.0) * (4.0 * PI * mu).powf(-nf / 2.0)
        + (4.0 * PI * pm).powf(-nf / 2.0))
        .max(0.0);
    let half = 0.25
        * ((nf - 1.0) * (4.0 * PI * mu).powf(-(nf - 1.0) / 2.0)
            + (4.0 * PI * pm).powf(-(nf - 1.0) / 2.0));
    Ok(HeatTwoTerm {
        dim: n,
        a_tilde,
        b_tilde_minus: -half,
        b_tilde_plus: half,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Self::Pass)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
        })
    }
}

/// Outcome of the `b⁻ + b⁺ = 0` cancellation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumTest {
    pub theory: Theory,
    pub b_minus: f64,
    pub b_plus: f64,
    pub sum: f64,
    /// `|sum| / max(|b⁻|, |b⁺|)`.
    pub relative: f64,
    pub verdict: Verdict,
}

pub const SUM_TEST_REL_TOL: f64 = 1e-12;

pub fn sum_test(params: &LameParams, n: u32, theory: Theory) -> Result<SumTest> {
    let w = weyl_two_term(params, n, theory)?;
    let sum = w.b_minus + w.b_plus;
    let scale = w.b_minus.abs().max(w.b_plus.abs());
    let relative = if scale > 0.0 { sum.abs() / scale } else { 0.0 };
    Ok(SumTest {
        theory,
        b_minus: w.b_minus,
        b_plus: w.b_plus,
        sum,
        relative,
        verdict: Verdict::from_bool(sum.abs() <= SUM_TEST_REL_TOL * scale),
    })
}

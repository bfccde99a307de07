//! Piecewise-linear finite elements for the flat Navier–Lamé operator.

mod assemble;
mod eigen;
mod mesh;
mod skyline;

use serde::{Deserialize, Serialize};

pub use assemble::{assemble, CsrMatrix, DofMap, Operators};
pub use eigen::{
    count_below, dense_eigenpairs, dense_generalized_eig, eigenpairs_below, jacobi_eig,
    lowest_eigenpairs, tridiagonal_eig, EigenOptions, EigenPair, SolverKind, DENSE_AUTO_LIMIT,
    DENSE_MAX, MAX_RESTARTS,
};
pub use mesh::{Mesh, MIN_ANGLE_DEG};
pub use skyline::SkylineLdl;

use crate::elastic::{BoundaryCondition, Domain, LameParams};
use crate::error::{Error, Result};
use crate::specfun::bessel_zeros_below;
use crate::spectrum::{Spectrum, SpectrumEntry, SpectrumMethod};

/// Largest admitted `√Λ · h`.
pub const TRUST_FACTOR: f64 = 0.5;

/// Eigenvalue acceptance: `‖Kx − ΛMx‖ / ‖Mx‖ <= RESIDUAL_TOL · max(1, Λ)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Eigenvalues with `√Λ h <= 0.5` are considered resolved.
pub fn trust_threshold(h: f64) -> f64 {
    (TRUST_FACTOR / h).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigTarget {
    /// The `n` smallest eigenvalues.
    Count(usize),
    /// Every eigenvalue at or below the cutoff.
    Below(f64),
}

#[derive(Debug, Clone)]
pub struct FemSolution {
    pub spectrum: Spectrum,
    pub pairs: Vec<EigenPair>,
    pub max_residual: f64,
}

/// Solves the generalized problem and packages the trusted part as a [`Spectrum`].
pub fn solve_eigs(ops: &Operators, target: EigTarget, opts: &EigenOptions) -> Result<FemSolution> {
    let trust = trust_threshold(ops.h);
    let (pairs, cap) = match target {
        EigTarget::Count(n) => {
            let pairs = lowest_eigenpairs(ops, n, opts)?;
            let top = pairs.last().map(|p| p.value).unwrap_or(trust);
            (pairs, top.min(trust))
        }
        EigTarget::Below(l) => {
            if !(l > 0.0) {
                return Err(Error::Input(format!("cutoff must be positive, got {l}")));
            }
            let cap = l.min(trust);
            // strictly-below solve with a hair of headroom so `cap` itself is included
            let pairs = eigenpairs_below(ops, cap * (1.0 + 1e-12), opts)?;
            (pairs, cap)
        }
    };
    let mut max_residual: f64 = 0.0;
    for p in &pairs {
        let rel = p.residual / p.value.abs().max(1.0);
        max_residual = max_residual.max(rel);
        if rel > RESIDUAL_TOL {
            return Err(Error::Solver(format!(
                "eigenvalue {} has relative residual {rel:e} above {RESIDUAL_TOL:e}",
                p.value
            )));
        }
    }
    let scale = ops.params.mu();
    let entries: Vec<SpectrumEntry> = pairs
        .iter()
        .filter(|p| p.value <= cap)
        .map(|p| SpectrumEntry {
            // rigid modes come out at roundoff level
            value: if p.value.abs() < 1e-8 * scale { 0.0 } else { p.value },
            multiplicity: 1,
            tag: "fem".into(),
        })
        .collect();
    if ops.bc == BoundaryCondition::Dirichlet && entries.iter().any(|e| e.value <= 0.0) {
        return Err(Error::Solver("nonpositive eigenvalue in a Dirichlet problem".into()));
    }
    let spectrum = Spectrum::new(ops.domain, ops.bc, ops.params, cap, SpectrumMethod::Fem, entries)?
        .with_meta("h", ops.h)
        .with_meta("dofs", ops.n())
        .with_meta("trust_threshold", trust);
    Ok(FemSolution {
        spectrum,
        pairs,
        max_residual,
    })
}

/// Convenience: mesh, assemble, and solve.
pub fn fem_spectrum(
    domain: Domain,
    params: &LameParams,
    bc: BoundaryCondition,
    resolution: usize,
    target: EigTarget,
    opts: &EigenOptions,
) -> Result<FemSolution> {
    let mesh = match domain {
        Domain::UnitSquare => Mesh::unit_square(resolution)?,
        Domain::UnitDisk => Mesh::unit_disk(resolution)?,
    };
    let ops = assemble(&mesh, params, bc)?;
    let mut sol = solve_eigs(&ops, target, opts)?;
    sol.spectrum.set_meta("resolution", resolution);
    Ok(sol)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrapolatedEigenvalue {
    pub index: usize,
    /// Coarse to fine.
    pub levels: Vec<f64>,
    pub extrapolated: f64,
    /// `ln((λ1−λ2)/(λ2−λ3)) / ln r` from the three finest levels.
    pub observed_order: f64,
    /// Successive differences change sign or vanish.
    pub non_monotone: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub domain: Domain,
    pub bc: BoundaryCondition,
    pub resolutions: Vec<usize>,
    pub h: Vec<f64>,
    pub ratio: f64,
    pub eigenvalues: Vec<ExtrapolatedEigenvalue>,
    /// Median observed order over the unflagged eigenvalues.
    pub observed_order: f64,
}

/// Richardson (Romberg, orders 2, 4, ...) extrapolation of the lowest `count`
/// eigenvalues over meshes refined by a constant ratio.
pub fn refine_and_extrapolate(
    domain: Domain,
    params: &LameParams,
    bc: BoundaryCondition,
    resolutions: &[usize],
    count: usize,
    opts: &EigenOptions,
) -> Result<ExtrapolationReport> {
    if resolutions.len() < 3 {
        return Err(Error::Input("extrapolation needs at least three mesh sizes".into()));
    }
    let ratio = resolutions[1] as f64 / resolutions[0] as f64;
    if !(ratio > 1.0)
        || resolutions
            .windows(2)
            .any(|w| ((w[1] as f64 / w[0] as f64) - ratio).abs() > 1e-12)
    {
        return Err(Error::Input("mesh sizes must form an increasing geometric progression".into()));
    }
    let mut levels: Vec<Vec<f64>> = Vec::new();
    let mut hs = Vec::new();
    for &res in resolutions {
        let mesh = match domain {
            Domain::UnitSquare => Mesh::unit_square(res)?,
            Domain::UnitDisk => Mesh::unit_disk(res)?,
        };
        hs.push(mesh.h);
        let ops = assemble(&mesh, params, bc)?;
        let pairs = lowest_eigenpairs(&ops, count, opts)?;
        levels.push(pairs.iter().map(|p| p.value).collect());
    }
    let nl = levels.len();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let seq: Vec<f64> = levels.iter().map(|l| l[i]).collect();
        let diffs: Vec<f64> = seq.windows(2).map(|w| w[0] - w[1]).collect();
        let non_monotone = diffs.iter().any(|d| *d == 0.0)
            || diffs.windows(2).any(|w| w[0].signum() != w[1].signum());
        let (a, b, c) = (seq[nl - 3], seq[nl - 2], seq[nl - 1]);
        let observed_order = ((a - b) / (b - c)).abs().ln() / ratio.ln();
        // Romberg table
        let mut row = seq.clone();
        for k in 1..nl {
            let f = ratio.powi(2 * k as i32);
            let next: Vec<f64> = row.windows(2).map(|w| w[1] + (w[1] - w[0]) / (f - 1.0)).collect();
            row = next;
        }
        out.push(ExtrapolatedEigenvalue {
            index: i,
            levels: seq,
            extrapolated: row[0],
            observed_order,
            non_monotone,
        });
    }
    let mut orders: Vec<f64> = out
        .iter()
        .filter(|e| !e.non_monotone && e.observed_order.is_finite())
        .map(|e| e.observed_order)
        .collect();
    orders.sort_by(f64::total_cmp);
    let observed_order = if orders.is_empty() { f64::NAN } else { orders[orders.len() / 2] };
    Ok(ExtrapolationReport {
        domain,
        bc,
        resolutions: resolutions.to_vec(),
        h: hs,
        ratio,
        eigenvalues: out,
        observed_order,
    })
}

/// Exact spectrum at `λ = −μ`, where the operator is `μ` times the vector
/// Laplacian and the components decouple.
///
/// Square: `μπ²(p²+q²)`, with `p, q >= 1` (Dirichlet) or `p, q >= 0` (the
/// Neumann lattice used for the free case), two components each.
/// Disk (Dirichlet only): `μ j_{k,m}²` with multiplicity 2 for `k = 0` and 4 otherwise.
pub fn analytic_decoupled_spectrum(
    domain: Domain,
    bc: BoundaryCondition,
    mu: f64,
    lambda_max: f64,
) -> Result<Spectrum> {
    let params = LameParams::new(mu, -mu)?;
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::ParamDomain(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let mut entries = Vec::new();
    match (domain, bc) {
        (Domain::UnitSquare, _) => {
            let p0 = if bc == BoundaryCondition::Dirichlet { 1u64 } else { 0 };
            let smax = (lambda_max / (mu * std::f64::consts::PI.powi(2))).floor() as u64;
            let mut reps = vec![0u32; smax as usize + 1];
            let mut p = p0;
            while p * p <= smax {
                let mut q = p0;
                while p * p + q * q <= smax {
                    reps[(p * p + q * q) as usize] += 1;
                    q += 1;
                }
                p += 1;
            }
            for (s, &r) in reps.iter().enumerate() {
                if r == 0 {
                    continue;
                }
                let value = mu * std::f64::consts::PI.powi(2) * s as f64;
                if value > lambda_max {
                    continue;
                }
                entries.push(SpectrumEntry {
                    value,
                    multiplicity: 2 * r,
                    tag: format!("s{s}"),
                });
            }
        }
        (Domain::UnitDisk, BoundaryCondition::Dirichlet) => {
            let limit = (lambda_max / mu).sqrt();
            for k in 0u32.. {
                let zeros = bessel_zeros_below(k, limit)?;
                if zeros.is_empty() {
                    break;
                }
                for (m, z) in zeros.iter().enumerate() {
                    entries.push(SpectrumEntry {
                        value: mu * z * z,
                        multiplicity: if k == 0 { 2 } else { 4 },
                        tag: format!("k{k}m{}", m + 1),
                    });
                }
            }
        }
        (Domain::UnitDisk, BoundaryCondition::Free) => {
            return Err(Error::ParamDomain(
                "no closed-form decoupled spectrum for the free disk".into(),
            ))
        }
    }
    Ok(Spectrum::new(domain, bc, params, lambda_max, SpectrumMethod::Analytic, entries)?
        .with_meta("generator", "decoupled"))
}

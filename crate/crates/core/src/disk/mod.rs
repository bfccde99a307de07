//! Elastic modes of the unit disk from the Helmholtz-potential ansatz
//! `u = ∇ψ₁ + curl(z ψ₂)`, `ψ₁ = A J_k(pr) cos kφ`, `ψ₂ = B J_k(sr) sin kφ`,
//! with `p = √(Λ/(λ+2μ))` and `s = √(Λ/μ)`.

mod verify;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use verify::{verify_mode_pde, verify_mode_pde_scaled, ModeField, PdeCheck, DEFAULT_FD_GRID};

use crate::elastic::{rayleigh_root, BoundaryCondition, Domain, LameParams};
use crate::error::{Error, Result};
use crate::specfun::{bessel_zeros_below, find_root, jn_pair};
use crate::spectrum::{Spectrum, SpectrumEntry, SpectrumMethod};

pub const MAX_K: u32 = 200;
pub const MAX_LAMBDA: f64 = 1e5;
/// Scan step as a fraction of the local mean root spacing.
pub const SCAN_STEP_FRACTION: f64 = 0.25;
pub const MAX_STEP_HALVINGS: u32 = 6;

/// Compressional and shear wave numbers at a trial eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveNumbers {
    pub lambda_ev: f64,
    pub p: f64,
    pub s: f64,
}

impl WaveNumbers {
    pub fn new(lambda_ev: f64, params: &LameParams) -> Self {
        let l = lambda_ev.max(0.0);
        Self {
            lambda_ev,
            p: (l / params.p_modulus()).sqrt(),
            s: (l / params.mu()).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeFamily {
    Coupled,
    CompressionalK0,
    ShearK0,
    Rigid,
}

impl ModeFamily {
    fn tag(&self, k: u32) -> String {
        match self {
            Self::Coupled => format!("k{k}"),
            Self::CompressionalK0 => "k0-compressional".into(),
            Self::ShearK0 => "k0-shear".into(),
            Self::Rigid => "rigid".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskMode {
    pub k: u32,
    pub family: ModeFamily,
    pub lambda_ev: f64,
    /// 1 for `k = 0`, 2 for `k >= 1` (the `±k` pair); doubled for a double root.
    pub multiplicity: u32,
    /// `|D_k(Λ)|` over the smaller Hadamard bound (row or column norms).
    pub determinant_residual: f64,
    pub bc: BoundaryCondition,
}

fn check_alpha(params: &LameParams) -> Result<()> {
    if params.is_decoupled() {
        return Err(Error::DegenerateDecomposition(
            "lambda + mu = 0 makes both wave numbers equal; the potential split is singular \
             (use the FEM path or the decoupled Bessel spectrum)"
                .into(),
        ));
    }
    Ok(())
}

/// The 2×2 boundary matrix acting on `(A, B)`. Dirichlet rows are `(u_r, u_φ)`
/// at `r = 1`; free rows are `(σ_rr, σ_rφ) / μ`.
pub fn boundary_matrix(
    k: u32,
    lambda_ev: f64,
    params: &LameParams,
    bc: BoundaryCondition,
) -> Result<[[f64; 2]; 2]> {
    check_alpha(params)?;
    if !(lambda_ev > 0.0) || !lambda_ev.is_finite() {
        return Err(Error::ParamDomain(format!("trial eigenvalue must be positive, got {lambda_ev}")));
    }
    let w = WaveNumbers::new(lambda_ev, params);
    Ok(matrix_unchecked(k, &w, bc))
}

fn matrix_unchecked(k: u32, w: &WaveNumbers, bc: BoundaryCondition) -> [[f64; 2]; 2] {
    let (p, s) = (w.p, w.s);
    let (jp, djp) = jn_pair(k, p);
    let (js, djs) = jn_pair(k, s);
    let kf = k as f64;
    match bc {
        BoundaryCondition::Dirichlet => [[p * djp, kf * js], [-kf * jp, -s * djs]],
        BoundaryCondition::Free => [
            [
                (2.0 * kf * kf - s * s) * jp - 2.0 * p * djp,
                2.0 * kf * (s * djs - js),
            ],
            [
                2.0 * kf * (jp - p * djp),
                (s * s - 2.0 * kf * kf) * js + 2.0 * s * djs,
            ],
        ],
    }
}

/// `D_k(Λ)`. Dirichlet: `−ps J_k'(p) J_k'(s) + k² J_k(p) J_k(s)`.
pub fn characteristic_det(
    k: u32,
    lambda_ev: f64,
    params: &LameParams,
    bc: BoundaryCondition,
) -> Result<f64> {
    let m = boundary_matrix(k, lambda_ev, params, bc)?;
    Ok(m[0][0] * m[1][1] - m[0][1] * m[1][0])
}

/// The smaller of the row-norm and column-norm Hadamard bounds on `|D|`.
/// Columns matter once one wave is evanescent and its column is tiny.
fn hadamard(m: &[[f64; 2]; 2]) -> f64 {
    let rows = m[0][0].hypot(m[0][1]) * m[1][0].hypot(m[1][1]);
    let cols = m[0][0].hypot(m[1][0]) * m[0][1].hypot(m[1][1]);
    rows.min(cols)
}

/// `(D / hadamard, reliable)`; unreliable when the two products cancel
/// to roundoff or the matrix underflows.
fn normalized_det(k: u32, lambda_ev: f64, params: &LameParams, bc: BoundaryCondition) -> (f64, bool) {
    let w = WaveNumbers::new(lambda_ev, params);
    let m = matrix_unchecked(k, &w, bc);
    let a = m[0][0] * m[1][1];
    let b = m[0][1] * m[1][0];
    let d = a - b;
    let h = hadamard(&m);
    if !(h > 0.0) || !h.is_finite() {
        return (0.0, false);
    }
    let reliable = d.abs() > 1e-13 * a.abs().max(b.abs());
    (d / h, reliable)
}

/// Mean number of roots per unit `Λ` for one angular index.
fn root_density(lambda_ev: f64, params: &LameParams) -> f64 {
    let l = lambda_ev.max(1e-300);
    (1.0 / (params.mu() * l).sqrt() + 1.0 / (params.p_modulus() * l).sqrt()) / (2.0 * PI)
}

#[derive(Debug, Clone, Copy)]
struct Root {
    value: f64,
    double: bool,
}

/// Roots of `f` on `[lo, hi]` sampled at `fraction / density(Λ)`.
fn scan_roots<F, D>(f: &F, density: &D, lo: f64, hi: f64, fraction: f64) -> Result<Vec<Root>>
where
    F: Fn(f64) -> (f64, bool),
    D: Fn(f64) -> f64,
{
    let mut xs = vec![lo];
    let mut x = lo;
    while x < hi {
        let step = fraction / density(x);
        x = (x + step).min(hi);
        xs.push(x);
    }
    let vals: Vec<(f64, bool)> = xs.iter().map(|&x| f(x)).collect();
    let g = |x: f64| f(x).0;
    let mut roots = Vec::new();
    // indices of samples with trustworthy signs
    let good: Vec<usize> = (0..xs.len()).filter(|&i| vals[i].1 && vals[i].0 != 0.0).collect();
    for w in good.windows(2) {
        let (i, j) = (w[0], w[1]);
        if vals[i].0.signum() != vals[j].0.signum() {
            let r = find_root(g, xs[i], xs[j], 1e-15)?;
            roots.push(Root {
                value: r,
                double: false,
            });
        }
    }
    for w in good.windows(3) {
        let (i, j, l) = (w[0], w[1], w[2]);
        let (fi, fj, fl) = (vals[i].0, vals[j].0, vals[l].0);
        let same = fi.signum() == fj.signum() && fj.signum() == fl.signum();
        if !(same && fj.abs() < fi.abs() && fj.abs() < fl.abs()) {
            continue;
        }
        let xm = golden_min(|x| g(x).abs(), xs[i], xs[l]);
        let fm = g(xm);
        if fm.signum() != fj.signum() && fm != 0.0 {
            // a close pair hidden between samples
            let a = find_root(g, xs[i], xm, 1e-15)?;
            let b = find_root(g, xm, xs[l], 1e-15)?;
            roots.push(Root {
                value: a,
                double: false,
            });
            roots.push(Root {
                value: b,
                double: false,
            });
        } else if fm.abs() <= 1e-12 {
            roots.push(Root {
                value: xm,
                double: true,
            });
        }
    }
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(roots)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * b.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

fn root_count(r: &[Root]) -> usize {
    r.iter().map(|x| if x.double { 2 } else { 1 }).sum()
}

/// Scans with successively halved steps until two consecutive scans agree.
fn stable_scan<F, D>(f: &F, density: &D, lo: f64, hi: f64) -> Result<(Vec<Root>, u32)>
where
    F: Fn(f64) -> (f64, bool),
    D: Fn(f64) -> f64,
{
    let mut fraction = SCAN_STEP_FRACTION;
    let mut prev = scan_roots(f, density, lo, hi, fraction)?;
    for halving in 1..=MAX_STEP_HALVINGS {
        fraction *= 0.5;
        let next = scan_roots(f, density, lo, hi, fraction)?;
        if root_count(&next) == root_count(&prev) {
            return Ok((next, halving));
        }
        prev = next;
    }
    Err(Error::Convergence(format!(
        "root scan on [{lo}, {hi}] did not stabilize after {MAX_STEP_HALVINGS} step halvings"
    )))
}

/// Modes of angular index `k` with `0 < Λ <= lambda_max`.
pub fn modes_for_k(
    k: u32,
    params: &LameParams,
    bc: BoundaryCondition,
    lambda_max: f64,
) -> Result<Vec<DiskMode>> {
    check_alpha(params)?;
    let (mu, pm) = (params.mu(), params.p_modulus());
    let mut out = Vec::new();
    let mut push = |family: ModeFamily, value: f64, mult: u32| {
        let m = matrix_unchecked(k, &WaveNumbers::new(value, params), bc);
        let w = WaveNumbers::new(value, params);
        let h = hadamard(&m);
        // k = 0 entries are scaled by coefficient size times the Bessel envelope
        let env = |x: f64| (2.0 / (PI * x)).sqrt().min(1.0);
        let free = bc == BoundaryCondition::Free;
        let resid = match family {
            ModeFamily::CompressionalK0 => {
                let c = if free { w.s * w.s + 2.0 * w.p } else { w.p };
                (m[0][0] / (c * env(w.p))).abs()
            }
            ModeFamily::ShearK0 => {
                let c = if free { w.s * w.s + 2.0 * w.s } else { w.s };
                (m[1][1] / (c * env(w.s))).abs()
            }
            _ => ((m[0][0] * m[1][1] - m[0][1] * m[1][0]) / h).abs(),
        };
        out.push(DiskMode {
            k,
            family,
            lambda_ev: value,
            multiplicity: mult,
            determinant_residual: resid,
            bc,
        });
    };
    if k == 0 {
        match bc {
            BoundaryCondition::Dirichlet => {
                for z in bessel_zeros_below(1, (lambda_max / pm).sqrt())? {
                    push(ModeFamily::CompressionalK0, pm * z * z, 1);
                }
                for z in bessel_zeros_below(1, (lambda_max / mu).sqrt())? {
                    push(ModeFamily::ShearK0, mu * z * z, 1);
                }
            }
            BoundaryCondition::Free => {
                for z in bessel_zeros_below(2, (lambda_max / mu).sqrt())? {
                    push(ModeFamily::ShearK0, mu * z * z, 1);
                }
                // s² J0(p) − 2p J1(p) in the variable p
                let ratio = pm / mu;
                let g = |p: f64| {
                    let (j0, j1) = (jn_pair(0, p).0, jn_pair(1, p).0);
                    let v = ratio * p * p * j0 - 2.0 * p * j1;
                    let scale = ratio * p * p * j0.abs() + 2.0 * p * j1.abs();
                    (if scale > 0.0 { v / scale } else { 0.0 }, scale > 0.0)
                };
                let pmax = (lambda_max / pm).sqrt();
                let dens = |_p: f64| 1.0 / PI;
                let (roots, _) = stable_scan(&g, &dens, 1e-3, pmax)?;
                for r in roots {
                    push(ModeFamily::CompressionalK0, pm * r.value * r.value, if r.double { 2 } else { 1 });
                }
            }
        }
    } else {
        let f = |l: f64| normalized_det(k, l, params, bc);
        let dens = |l: f64| root_density(l, params);
        let lo = mu * (1e-3 * (k as f64 + 1.0)).powi(2);
        if lo < lambda_max {
            let (roots, _) = stable_scan(&f, &dens, lo, lambda_max)?;
            for r in roots {
                push(ModeFamily::Coupled, r.value, if r.double { 4 } else { 2 });
            }
        }
    }
    out.retain(|m| m.lambda_ev > 0.0 && m.lambda_ev <= lambda_max);
    out.sort_by(|a, b| a.lambda_ev.total_cmp(&b.lambda_ev));
    Ok(out)
}

/// Angular indices needed to capture every root below `lambda_max`.
pub fn auto_k_max(params: &LameParams, bc: BoundaryCondition, lambda_max: f64) -> Result<u32> {
    let x = (lambda_max / params.mu()).sqrt();
    let k = match bc {
        // Dirichlet modes of index k sit above μ (k−1)²
        BoundaryCondition::Dirichlet => x + 3.0,
        // free modes may travel at the Rayleigh speed γ_R √μ
        BoundaryCondition::Free => {
            let g = rayleigh_root(params.alpha())?.gamma_r;
            1.2 * x / g + 3.0
        }
    };
    Ok((k.ceil() as u32).min(MAX_K))
}

#[derive(Debug, Clone)]
pub struct DiskSpectrum {
    pub spectrum: Spectrum,
    pub modes: Vec<DiskMode>,
    pub k_max: u32,
    /// Modes found at the largest scanned index (nonzero means `k_max` may be too small).
    pub modes_at_k_max: usize,
}

/// Union over `k <= k_max` of determinant roots below `lambda_max`, with the
/// three rigid motions at `Λ = 0` for the free disk.
pub fn disk_spectrum_potential(
    params: &LameParams,
    bc: BoundaryCondition,
    k_max: Option<u32>,
    lambda_max: f64,
) -> Result<DiskSpectrum> {
    check_alpha(params)?;
    if !(lambda_max > 0.0 && lambda_max <= MAX_LAMBDA) {
        return Err(Error::ParamDomain(format!(
            "lambda_max must lie in (0, {MAX_LAMBDA}], got {lambda_max}"
        )));
    }
    let k_max = match k_max {
        Some(k) if k > MAX_K => {
            return Err(Error::ParamDomain(format!("k_max must not exceed {MAX_K}, got {k}")))
        }
        Some(k) => k,
        None => auto_k_max(params, bc, lambda_max)?,
    };
    let per_k: Vec<Vec<DiskMode>> = (0..=k_max)
        .into_par_iter()
        .map(|k| modes_for_k(k, params, bc, lambda_max))
        .collect::<Result<_>>()?;
    let modes_at_k_max = per_k.last().map(|v| v.len()).unwrap_or(0);
    let mut modes: Vec<DiskMode> = per_k.into_iter().flatten().collect();
    if bc == BoundaryCondition::Free {
        modes.push(DiskMode {
            k: 0,
            family: ModeFamily::Rigid,
            lambda_ev: 0.0,
            multiplicity: 3,
            determinant_residual: 0.0,
            bc,
        });
    }
    modes.sort_by(|a, b| a.lambda_ev.total_cmp(&b.lambda_ev).then(a.k.cmp(&b.k)));
    let entries = modes
        .iter()
        .map(|m| SpectrumEntry {
            value: m.lambda_ev,
            multiplicity: m.multiplicity,
            tag: m.family.tag(m.k),
        })
        .collect();
    let spectrum = Spectrum::new(Domain::UnitDisk, bc, *params, lambda_max, SpectrumMethod::Potential, entries)?
        .with_meta("k_max", k_max);
    Ok(DiskSpectrum {
        spectrum,
        modes,
        k_max,
        modes_at_k_max,
    })
}

/// Null vector `(A, B)` of the boundary matrix, scaled to unit Euclidean norm.
pub fn mode_amplitudes(mode: &DiskMode, params: &LameParams) -> Result<(f64, f64)> {
    match mode.family {
        ModeFamily::CompressionalK0 => return Ok((1.0, 0.0)),
        ModeFamily::ShearK0 => return Ok((0.0, 1.0)),
        ModeFamily::Rigid => {
            return Err(Error::Input("rigid motions are not potential modes".into()))
        }
        ModeFamily::Coupled => {}
    }
    let m = boundary_matrix(mode.k, mode.lambda_ev, params, mode.bc)?;
    // pick the row with the larger norm; (A, B) ⟂ that row
    let r = if m[0][0].hypot(m[0][1]) >= m[1][0].hypot(m[1][1]) { m[0] } else { m[1] };
    let (a, b) = (-r[1], r[0]);
    let n = a.hypot(b);
    if !(n > 0.0) {
        return Err(Error::Solver("boundary matrix vanishes at this root".into()));
    }
    Ok((a / n, b / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_zeros;

    fn p11() -> LameParams {
        LameParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn decoupled_parameters_rejected() {
        let p = LameParams::new(1.0, -1.0).unwrap();
        let e = characteristic_det(1, 5.0, &p, BoundaryCondition::Dirichlet).unwrap_err();
        assert!(matches!(e, Error::DegenerateDecomposition(_)));
        assert!(disk_spectrum_potential(&p, BoundaryCondition::Dirichlet, None, 100.0).is_err());
    }

    #[test]
    fn k0_dirichlet_factorizes() {
        let p = LameParams::new(1.3, 0.4).unwrap();
        for &l in &[3.0, 17.5, 80.0] {
            let w = WaveNumbers::new(l, &p);
            let d = characteristic_det(0, l, &p, BoundaryCondition::Dirichlet).unwrap();
            let j1p = jn_pair(1, w.p).0;
            let j1s = jn_pair(1, w.s).0;
            assert!((d.abs() - (w.p * w.s * j1p * j1s).abs()).abs() < 1e-13);
        }
    }

    #[test]
    fn k0_free_factorizes() {
        let p = p11();
        for &l in &[3.0, 17.5, 80.0] {
            let w = WaveNumbers::new(l, &p);
            let d = characteristic_det(0, l, &p, BoundaryCondition::Free).unwrap();
            let comp = w.s * w.s * jn_pair(0, w.p).0 - 2.0 * w.p * jn_pair(1, w.p).0;
            let shear = -w.s * w.s * jn_pair(2, w.s).0;
            assert!((d + comp * shear).abs() < 1e-12 * (comp * shear).abs().max(1.0));
        }
    }

    #[test]
    fn k0_modes_are_bessel_families() {
        let p = p11();
        let modes = modes_for_k(0, &p, BoundaryCondition::Dirichlet, 200.0).unwrap();
        let j1 = bessel_zeros(1, 5).unwrap();
        let shear: Vec<f64> = modes.iter().filter(|m| m.family == ModeFamily::ShearK0).map(|m| m.lambda_ev).collect();
        assert!((shear[0] - j1[0] * j1[0]).abs() < 1e-10);
        assert!((shear[0] - 14.681_970_642_123_89).abs() < 1e-9);
        let comp: Vec<f64> = modes.iter().filter(|m| m.family == ModeFamily::CompressionalK0).map(|m| m.lambda_ev).collect();
        assert!((comp[0] - 3.0 * j1[0] * j1[0]).abs() < 1e-9);
    }

    #[test]
    fn coupled_roots_have_small_residual() {
        let p = p11();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Free] {
            for k in 1..5 {
                let modes = modes_for_k(k, &p, bc, 300.0).unwrap();
                assert!(!modes.is_empty());
                for m in modes {
                    assert!(m.determinant_residual <= 1e-9, "{bc} k={k} {m:?}");
                    assert_eq!(m.multiplicity, 2);
                }
            }
        }
    }

    #[test]
    fn free_spectrum_starts_with_rigid_modes() {
        let s = disk_spectrum_potential(&p11(), BoundaryCondition::Free, None, 60.0).unwrap();
        let e = s.spectrum.entries();
        assert_eq!(e[0].value, 0.0);
        assert_eq!(e[0].multiplicity, 3);
        assert!(e[1].value > 0.0);
    }

    #[test]
    fn counts_monotone_in_cutoff() {
        let p = p11();
        let small = disk_spectrum_potential(&p, BoundaryCondition::Dirichlet, None, 120.0).unwrap();
        let big = disk_spectrum_potential(&p, BoundaryCondition::Dirichlet, None, 240.0).unwrap();
        let below = big.spectrum.entries().iter().filter(|e| e.value <= 120.0).map(|e| e.multiplicity as u64).sum::<u64>();
        assert_eq!(below, small.spectrum.total_count());
        assert_eq!(small.modes_at_k_max, 0);
        assert!(big.modes.iter().all(|m| m.determinant_residual <= 1e-9));
    }
}

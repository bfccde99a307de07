use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{mode_amplitudes, DiskMode, WaveNumbers};
use crate::elastic::{BoundaryCondition, LameParams};
use crate::error::{Error, Result};
use crate::specfun::jn_pair;

pub const DEFAULT_FD_GRID: usize = 2048;

/// Displacement of a potential mode, split into its compressional (`∇ψ₁`)
/// and shear (`curl ψ₂`) parts, on a disk of the given radius.
#[derive(Debug, Clone, Copy)]
pub struct ModeField {
    pub k: u32,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub s: f64,
    pub radius: f64,
}

impl ModeField {
    pub fn new(mode: &DiskMode, params: &LameParams, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::ParamDomain(format!("radius must be positive, got {radius}")));
        }
        let (a, b) = mode_amplitudes(mode, params)?;
        let w = WaveNumbers::new(mode.lambda_ev, params);
        Ok(Self {
            k: mode.k,
            a,
            b,
            p: w.p,
            s: w.s,
            radius,
        })
    }

    /// `(compressional, shear)` Cartesian displacement at `(x, y)`.
    pub fn parts(&self, x: f64, y: f64) -> ([f64; 2], [f64; 2]) {
        let (xr, yr) = (x / self.radius, y / self.radius);
        let r = xr.hypot(yr);
        let phi = yr.atan2(xr);
        let kf = self.k as f64;
        let (jp, djp) = jn_pair(self.k, self.p * r);
        let (js, djs) = jn_pair(self.k, self.s * r);
        let (ck, sk) = ((kf * phi).cos(), (kf * phi).sin());
        let (c, s) = (phi.cos(), phi.sin());
        let polar = |ur: f64, uphi: f64| [ur * c - uphi * s, ur * s + uphi * c];
        let comp = polar(self.a * self.p * djp * ck, -self.a * kf / r * jp * sk);
        // at k = 0 the shear potential is the axisymmetric J_0(sr)
        let sk_shear = if self.k == 0 { 1.0 } else { sk };
        let shear = polar(self.b * kf / r * js * ck, -self.b * self.s * djs * sk_shear);
        (comp, shear)
    }

    pub fn displacement(&self, x: f64, y: f64) -> [f64; 2] {
        let (c, s) = self.parts(x, y);
        [c[0] + s[0], c[1] + s[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeCheck {
    /// `max |P u − Λ u| / (Λ max |u|)` over interior sample points.
    pub relative_residual: f64,
    /// Boundary displacement (Dirichlet) or traction (free), relative.
    pub boundary_residual: f64,
    /// `max |curl u_comp|`, relative to `s max |u|`.
    pub curl_compressional: f64,
    /// `max |div u_shear|`, relative to `s max |u|`.
    pub div_shear: f64,
    pub grid: usize,
    pub samples: usize,
}

const D1: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
const D2: [(i32, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];

struct Derivs {
    u: [f64; 2],
    dx: [f64; 2],
    dy: [f64; 2],
    dxx: [f64; 2],
    dyy: [f64; 2],
    dxy: [f64; 2],
}

fn derivs<F: Fn(f64, f64) -> [f64; 2]>(f: &F, x: f64, y: f64, h: f64) -> Derivs {
    let mut d = Derivs {
        u: f(x, y),
        dx: [0.0; 2],
        dy: [0.0; 2],
        dxx: [0.0; 2],
        dyy: [0.0; 2],
        dxy: [0.0; 2],
    };
    let add = |acc: &mut [f64; 2], w: f64, v: [f64; 2]| {
        acc[0] += w * v[0];
        acc[1] += w * v[1];
    };
    for &(i, w) in &D1 {
        let t = i as f64 * h;
        add(&mut d.dx, w / (12.0 * h), f(x + t, y));
        add(&mut d.dy, w / (12.0 * h), f(x, y + t));
        for &(j, v) in &D1 {
            add(&mut d.dxy, w * v / (144.0 * h * h), f(x + t, y + j as f64 * h));
        }
    }
    for &(i, w) in &D2 {
        let t = i as f64 * h;
        add(&mut d.dxx, w / (12.0 * h * h), f(x + t, y));
        add(&mut d.dyy, w / (12.0 * h * h), f(x, y + t));
    }
    d
}

/// Finite-difference check that a potential mode solves
/// `−μΔu − (λ+μ)∇(∇·u) = Λu` on the unit disk with its boundary condition.
pub fn verify_mode_pde(mode: &DiskMode, params: &LameParams, grid: usize) -> Result<PdeCheck> {
    verify_mode_pde_scaled(mode, params, 1.0, grid)
}

/// As [`verify_mode_pde`] for the mode transplanted to a disk of radius `R`
/// (eigenvalue `Λ / R²`, field `u(x / R)`).
pub fn verify_mode_pde_scaled(
    mode: &DiskMode,
    params: &LameParams,
    radius: f64,
    grid: usize,
) -> Result<PdeCheck> {
    if grid < 16 {
        return Err(Error::Input(format!("finite-difference grid must be at least 16, got {grid}")));
    }
    let field = ModeField::new(mode, params, radius)?;
    let (mu, lam) = (params.mu(), params.lambda());
    let ev = mode.lambda_ev / (radius * radius);
    let h = radius / grid as f64;
    let full = |x: f64, y: f64| field.displacement(x, y);
    let comp = |x: f64, y: f64| field.parts(x, y).0;
    let shear = |x: f64, y: f64| field.parts(x, y).1;

    let mut pts = Vec::new();
    for i in 1..=10 {
        let r = radius * (0.1 * i as f64 - 0.03);
        for j in 0..16 {
            let phi = 2.0 * PI * (j as f64 + 0.37) / 16.0;
            pts.push((r * phi.cos(), r * phi.sin()));
        }
    }
    let (mut umax, mut rmax, mut curl, mut div) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(x, y) in &pts {
        let d = derivs(&full, x, y, h);
        umax = umax.max(d.u[0].hypot(d.u[1]));
        let gx = d.dxx[0] + d.dxy[1];
        let gy = d.dxy[0] + d.dyy[1];
        let rx = -mu * (d.dxx[0] + d.dyy[0]) - (lam + mu) * gx - ev * d.u[0];
        let ry = -mu * (d.dxx[1] + d.dyy[1]) - (lam + mu) * gy - ev * d.u[1];
        rmax = rmax.max(rx.hypot(ry));
        let c = derivs(&comp, x, y, h);
        curl = curl.max((c.dx[1] - c.dy[0]).abs());
        let s = derivs(&shear, x, y, h);
        div = div.max((s.dx[0] + s.dy[1]).abs());
    }
    let wave = field.s / radius;
    let mut bmax = 0.0f64;
    let mut bscale = 0.0f64;
    for j in 0..64 {
        let phi = 2.0 * PI * (j as f64 + 0.21) / 64.0;
        let (nx, ny) = (phi.cos(), phi.sin());
        let (x, y) = (radius * nx, radius * ny);
        match mode.bc {
            BoundaryCondition::Dirichlet => {
                let u = full(x, y);
                bmax = bmax.max(u[0].hypot(u[1]));
                bscale = umax;
            }
            BoundaryCondition::Free => {
                let d = derivs(&full, x, y, h);
                let dv = d.dx[0] + d.dy[1];
                let sxx = lam * dv + 2.0 * mu * d.dx[0];
                let syy = lam * dv + 2.0 * mu * d.dy[1];
                let sxy = mu * (d.dy[0] + d.dx[1]);
                let t = [sxx * nx + sxy * ny, sxy * nx + syy * ny];
                bmax = bmax.max(t[0].hypot(t[1]));
                bscale = params.p_modulus() * wave * umax;
            }
        }
    }
    let scale = wave * umax;
    Ok(PdeCheck {
        relative_residual: rmax / (ev * umax),
        boundary_residual: bmax / bscale,
        curl_compressional: curl / scale,
        div_shear: div / scale,
        grid,
        samples: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::modes_for_k;
    use super::*;

    #[test]
    fn low_modes_satisfy_the_pde() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Free] {
            for k in 0..4 {
                let modes = modes_for_k(k, &p, bc, 80.0).unwrap();
                for m in modes.iter().take(2) {
                    let c = verify_mode_pde(m, &p, DEFAULT_FD_GRID).unwrap();
                    assert!(c.relative_residual < 1e-6, "{bc} {m:?} {c:?}");
                    assert!(c.boundary_residual < 1e-6, "{bc} {m:?} {c:?}");
                    assert!(c.curl_compressional < 1e-8 && c.div_shear < 1e-8, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn wrong_eigenvalue_fails() {
        let p = LameParams::new(1.0, 1.0).unwrap();
        let mut m = modes_for_k(2, &p, BoundaryCondition::Dirichlet, 80.0).unwrap()[0];
        m.lambda_ev *= 1.01;
        let c = verify_mode_pde(&m, &p, DEFAULT_FD_GRID).unwrap();
        assert!(c.boundary_residual > 1e-4);
    }

    #[test]
    fn homogeneity_under_rescaling() {
        let p = LameParams::new(2.0, 0.5).unwrap();
        let m = modes_for_k(3, &p, BoundaryCondition::Free, 200.0).unwrap()[0];
        let a = verify_mode_pde(&m, &p, DEFAULT_FD_GRID).unwrap();
        let b = verify_mode_pde_scaled(&m, &p, std::f64::consts::FRAC_1_SQRT_2, DEFAULT_FD_GRID).unwrap();
        assert!(b.relative_residual < 1e-6 && b.boundary_residual < 1e-6);
        assert!((a.relative_residual - b.relative_residual).abs() < 1e-7);
    }
}

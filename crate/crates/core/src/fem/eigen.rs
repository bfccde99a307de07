use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assemble::{CsrMatrix, Operators};
use super::skyline::SkylineLdl;
use crate::elastic::weyl_a;
use crate::error::{Error, Result};

/// Symmetric tridiagonal eigenproblem by implicit QL.
///
/// `diag` has length `m`, `off[i] = T[i][i+1]`. Returns ascending eigenvalues
/// and the eigenvector matrix `z[row][col]`, column `col` belonging to value `col`.
pub fn tridiagonal_eig(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::Convergence("tridiagonal QL did not converge".into()));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let (mut c, mut c2, mut c3) = (1.0, 1.0, 1.0);
                let el1 = e[l + 1];
                let (mut s, mut s2) = (0.0, 0.0);
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in z.iter_mut() {
                        let hz = row[i + 1];
                        row[i + 1] = s * row[i] + c * hz;
                        row[i] = c * row[i] - s * hz;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = idx.iter().map(|&i| d[i]).collect();
    let vecs = z.iter().map(|row| idx.iter().map(|&i| row[i]).collect()).collect();
    Ok((vals, vecs))
}

/// Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi rotations.
/// Returns ascending values and eigenvectors as columns of `q[row][col]`.
pub fn jacobi_eig(a: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let norm: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * norm || norm == 0.0 {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]));
            let vals = idx.iter().map(|&i| a[i][i]).collect();
            let vecs = q.iter().map(|row| idx.iter().map(|&i| row[i]).collect()).collect();
            return Ok((vals, vecs));
        }
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[p][r];
                if apr.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[r][r] - a[p][p]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akr) = (a[k][p], a[k][r]);
                    a[k][p] = c * akp - s * akr;
                    a[k][r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let (apk, ark) = (a[p][k], a[r][k]);
                    a[p][k] = c * apk - s * ark;
                    a[r][k] = s * apk + c * ark;
                }
                for row in q.iter_mut() {
                    let (qp, qr) = (row[p], row[r]);
                    row[p] = c * qp - s * qr;
                    row[r] = s * qp + c * qr;
                }
            }
        }
    }
    Err(Error::Convergence("Jacobi sweeps did not converge".into()))
}

/// Dense `A x = Λ B x` with `B` symmetric positive definite; vectors are
/// `B`-orthonormal columns.
pub fn dense_generalized_eig(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    // Cholesky B = L Lᵀ
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = b[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::Solver("mass matrix is not positive definite".into()));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let forward = |v: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[i] = (v[i] - (0..i).map(|k| l[i][k] * x[k]).sum::<f64>()) / l[i][i];
        }
        x
    };
    // C = L⁻¹ A L⁻ᵀ, built column by column
    let cols: Vec<Vec<f64>> = (0..n).map(|j| forward(&(0..n).map(|i| a[i][j]).collect::<Vec<_>>())).collect();
    // cols[j] = L⁻¹ A e_j; now apply L⁻¹ on the other side
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| cols[j][i]).collect();
        let y = forward(&row);
        for j in 0..n {
            c[i][j] = y[j];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (c[i][j] + c[j][i]);
            c[i][j] = m;
            c[j][i] = m;
        }
    }
    let (vals, q) = jacobi_eig(&c)?;
    // x = L⁻ᵀ q
    let mut x = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in (0..n).rev() {
            let s: f64 = q[i][col] - (i + 1..n).map(|k| l[k][i] * x[k][col]).sum::<f64>();
            x[i][col] = s / l[i][i];
        }
    }
    Ok((vals, x))
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖K x − Λ M x‖ / ‖M x‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Dense below [`DENSE_AUTO_LIMIT`] unknowns, Lanczos above.
    Auto,
    Lanczos,
    Dense,
}

pub const DENSE_AUTO_LIMIT: usize = 300;
pub const DENSE_MAX: usize = 4000;
pub const MAX_RESTARTS: usize = 5;

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub kind: SolverKind,
    pub seed: u64,
    /// Largest eigenvalue count handled by one shift.
    pub slice_size: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            kind: SolverKind::Auto,
            seed: 0x5eed,
            slice_size: 40,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn residual_of(ops: &Operators, value: f64, x: &[f64]) -> f64 {
    let kx = ops.stiffness.apply(x);
    let mx = ops.mass.apply(x);
    let r: f64 = kx.iter().zip(&mx).map(|(k, m)| (k - value * m).powi(2)).sum::<f64>().sqrt();
    r / dot(&mx, &mx).sqrt()
}

/// Eigenvalues of `K x = Λ M x` strictly below `x` (Sylvester inertia).
pub fn count_below(ops: &Operators, x: f64) -> Result<usize> {
    Ok(factor_near(ops, x)?.1.negative_pivots())
}

/// Factors `K − s M` for `s` at or next to `x`, nudging off exact eigenvalues.
fn factor_near(ops: &Operators, x: f64) -> Result<(f64, SkylineLdl)> {
    let scale = x.abs().max(ops.params.mu());
    let mut last = None;
    for attempt in 0..6 {
        let s = x + scale * 1e-9 * attempt as f64 * if attempt % 2 == 0 { 1.0 } else { -1.0 };
        match SkylineLdl::factor(&ops.stiffness.shifted(s, &ops.mass)) {
            Ok(f) => return Ok((s, f)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

struct Lanczos<'a> {
    k: &'a CsrMatrix,
    m: &'a CsrMatrix,
    factor: &'a SkylineLdl,
    sigma: f64,
}

impl Lanczos<'_> {
    fn op(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.m.apply(x);
        self.factor.solve_in_place(&mut y);
        y
    }

    /// `M`-orthogonalizes `w` against `basis` (with precomputed `M basis`), twice.
    fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>], mbasis: &[Vec<f64>]) {
        for _ in 0..2 {
            for (v, mv) in basis.iter().zip(mbasis) {
                let c = dot(w, mv);
                axpy(-c, v, w);
            }
        }
    }

    /// One Lanczos pass in the complement of `locked`. Returns converged Ritz
    /// pairs `(Λ, x)` with `Λ` in `[lo, hi)`.
    fn pass(
        &self,
        locked: &[Vec<f64>],
        mlocked: &[Vec<f64>],
        lo: f64,
        hi: f64,
        want: usize,
        max_steps: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<(f64, Vec<f64>)>> {
        let n = self.k.n;
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Self::orthogonalize(&mut v, locked, mlocked);
        let mut mv = self.m.apply(&v);
        let nrm = dot(&v, &mv).sqrt();
        if !(nrm > 0.0) {
            return Ok(Vec::new());
        }
        v.iter_mut().for_each(|x| *x /= nrm);
        mv.iter_mut().for_each(|x| *x /= nrm);
        let mut basis = vec![v];
        let mut mbasis = vec![mv];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut next_check = (want + 10).min(max_steps);
        loop {
            let j = basis.len() - 1;
            let mut w = self.op(&basis[j]);
            Self::orthogonalize(&mut w, locked, mlocked);
            let a = dot(&w, &mbasis[j]);
            alpha.push(a);
            Self::orthogonalize(&mut w, &basis, &mbasis);
            let mut mw = self.m.apply(&w);
            let b = dot(&w, &mw).max(0.0).sqrt();
            let steps = alpha.len();
            let scale = alpha.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            let breakdown = b <= 1e-13 * scale.max(f64::MIN_POSITIVE);
            if steps >= next_check || steps >= max_steps || breakdown || steps >= n - locked.len() {
                let (theta, s) = tridiagonal_eig(&alpha, &beta)?;
                let mut found = Vec::new();
                for (i, &th) in theta.iter().enumerate() {
                    if th == 0.0 {
                        continue;
                    }
                    let lam = self.sigma + 1.0 / th;
                    if lam < lo || lam >= hi {
                        continue;
                    }
                    let est = if breakdown { 0.0 } else { (b * s[steps - 1][i]).abs() };
                    if est <= 1e-11 * th.abs() {
                        found.push(i);
                    }
                }
                let done = found.len() >= want
                    || steps >= max_steps
                    || breakdown
                    || steps >= n - locked.len();
                if done {
                    let out = found
                        .into_iter()
                        .map(|i| {
                            let mut x = vec![0.0; n];
                            for (r, q) in basis.iter().enumerate() {
                                axpy(s[r][i], q, &mut x);
                            }
                            (self.sigma + 1.0 / theta[i], x)
                        })
                        .collect();
                    return Ok(out);
                }
                next_check = (steps + (steps / 5).max(10)).min(max_steps);
            }
            w.iter_mut().for_each(|x| *x /= b);
            mw.iter_mut().for_each(|x| *x /= b);
            beta.push(b);
            basis.push(w);
            mbasis.push(mw);
        }
    }
}

/// All eigenpairs with `lo <= Λ < hi`, given the exact count `want` in that range.
fn solve_slice(
    ops: &Operators,
    lo: f64,
    hi: f64,
    want: usize,
    sigma: f64,
    factor: &SkylineLdl,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>> {
    let lz = Lanczos {
        k: &ops.stiffness,
        m: &ops.mass,
        factor,
        sigma,
    };
    let n = ops.n();
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut mlocked: Vec<Vec<f64>> = Vec::new();
    let mut fruitless = 0;
    let mut pass = 0u64;
    while locked.len() < want {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(pass.wrapping_mul(0x9e37_79b9)));
        pass += 1;
        let need = want - locked.len();
        let max_steps = (3 * need + 60).max(80).min(n - locked.len());
        let found = lz.pass(&locked, &mlocked, lo, hi, need, max_steps, &mut rng)?;
        if found.is_empty() {
            fruitless += 1;
            if fruitless > MAX_RESTARTS {
                return Err(Error::Solver(format!(
                    "Lanczos found {} of {want} eigenvalues in [{lo}, {hi}) after {MAX_RESTARTS} restarts",
                    locked.len()
                )));
            }
            continue;
        }
        for (_, x) in found.into_iter().take(need) {
            let mut x = x;
            Lanczos::orthogonalize(&mut x, &locked, &mlocked);
            let mut mx = ops.mass.apply(&x);
            let nrm = dot(&x, &mx).sqrt();
            if !(nrm > 1e-8) {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= nrm);
            mx.iter_mut().for_each(|v| *v /= nrm);
            locked.push(x);
            mlocked.push(mx);
        }
    }
    // one inverse-iteration sweep, then Rayleigh-Ritz on the locked block
    let block: Vec<Vec<f64>> = locked.iter().map(|x| lz.op(x)).collect();
    rayleigh_ritz(ops, &block)
}

fn rayleigh_ritz(ops: &Operators, block: &[Vec<f64>]) -> Result<Vec<EigenPair>> {
    let c = block.len();
    let kb: Vec<Vec<f64>> = block.iter().map(|x| ops.stiffness.apply(x)).collect();
    let mb: Vec<Vec<f64>> = block.iter().map(|x| ops.mass.apply(x)).collect();
    let mut kp = vec![vec![0.0; c]; c];
    let mut mp = vec![vec![0.0; c]; c];
    for i in 0..c {
        for j in 0..=i {
            kp[i][j] = dot(&block[i], &kb[j]);
            kp[j][i] = kp[i][j];
            mp[i][j] = dot(&block[i], &mb[j]);
            mp[j][i] = mp[i][j];
        }
    }
    let (vals, coef) = dense_generalized_eig(&kp, &mp)?;
    let n = ops.n();
    Ok(vals
        .iter()
        .enumerate()
        .map(|(col, &value)| {
            let mut x = vec![0.0; n];
            for (r, b) in block.iter().enumerate() {
                axpy(coef[r][col], b, &mut x);
            }
            let residual = residual_of(ops, value, &x);
            EigenPair {
                value,
                vector: x,
                residual,
            }
        })
        .collect())
}

/// Every eigenpair with `Λ < cutoff`, ascending.
pub fn eigenpairs_below(ops: &Operators, cutoff: f64, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    if use_dense(ops, opts) {
        let mut all = dense_eigenpairs(ops)?;
        all.retain(|p| p.value < cutoff);
        return Ok(all);
    }
    let (hi, fhi) = factor_near(ops, cutoff)?;
    let total = fhi.negative_pivots();
    drop(fhi);
    collect_below(ops, hi, total, opts)
}

fn use_dense(ops: &Operators, opts: &EigenOptions) -> bool {
    match opts.kind {
        SolverKind::Dense => true,
        SolverKind::Lanczos => false,
        SolverKind::Auto => ops.n() <= DENSE_AUTO_LIMIT,
    }
}

fn collect_below(ops: &Operators, hi: f64, total: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    // every admissible operator is positive semidefinite, so nothing lies below -mu
    let lo = -ops.params.mu();
    let mut out = Vec::with_capacity(total);
    slice_recursive(ops, lo, hi, 0, total, opts, &mut out)?;
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(out)
}

fn slice_recursive(
    ops: &Operators,
    lo: f64,
    hi: f64,
    c_lo: usize,
    c_hi: usize,
    opts: &EigenOptions,
    out: &mut Vec<EigenPair>,
) -> Result<()> {
    let want = c_hi - c_lo;
    if want == 0 {
        return Ok(());
    }
    let (mid, f) = factor_near(ops, 0.5 * (lo + hi))?;
    if want <= opts.slice_size.max(1) {
        let pairs = solve_slice(ops, lo, hi, want, mid, &f, opts)?;
        out.extend(pairs);
        return Ok(());
    }
    let c_mid = f.negative_pivots();
    drop(f);
    slice_recursive(ops, lo, mid, c_lo, c_mid, opts, out)?;
    slice_recursive(ops, mid, hi, c_mid, c_hi, opts, out)
}

/// The `count` smallest eigenpairs.
pub fn lowest_eigenpairs(ops: &Operators, count: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > ops.n() {
        return Err(Error::Input(format!("requested {count} eigenvalues of a {}-dof problem", ops.n())));
    }
    if use_dense(ops, opts) {
        let mut all = dense_eigenpairs(ops)?;
        all.truncate(count);
        return Ok(all);
    }
    // Weyl estimate N(Λ) ≈ a |Ω| Λ, inflated for the boundary deficit
    let a = weyl_a(&ops.params, 2)?;
    let mut cutoff = 1.3 * (count as f64 + 4.0) / (a * ops.domain.volume());
    let mut guard = 0;
    let (hi, total) = loop {
        let (s, f) = factor_near(ops, cutoff)?;
        let cnt = f.negative_pivots();
        if cnt >= count {
            break (s, cnt);
        }
        cutoff *= 1.5;
        guard += 1;
        if guard > 80 {
            return Err(Error::Solver("could not bracket the requested eigenvalues".into()));
        }
    };
    let mut pairs = collect_below(ops, hi, total, opts)?;
    pairs.truncate(count);
    Ok(pairs)
}

/// Full spectrum of a small problem by dense generalized Jacobi.
pub fn dense_eigenpairs(ops: &Operators) -> Result<Vec<EigenPair>> {
    if ops.n() > DENSE_MAX {
        return Err(Error::Solver(format!(
            "dense fallback limited to {DENSE_MAX} unknowns, got {}",
            ops.n()
        )));
    }
    let (vals, vecs) = dense_generalized_eig(&ops.stiffness.to_dense(), &ops.mass.to_dense())?;
    let n = ops.n();
    Ok(vals
        .iter()
        .enumerate()
        .map(|(col, &value)| {
            let x: Vec<f64> = (0..n).map(|r| vecs[r][col]).collect();
            let residual = residual_of(ops, value, &x);
            EigenPair {
                value,
                vector: x,
                residual,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastic::{BoundaryCondition, LameParams};
    use crate::fem::assemble::assemble;
    use crate::fem::mesh::Mesh;

    #[test]
    fn tridiagonal_matches_closed_form() {
        let n = 40;
        let (vals, vecs) = tridiagonal_eig(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - exact).abs() < 1e-13);
        }
        // orthonormal columns
        let d: f64 = (0..n).map(|r| vecs[r][3] * vecs[r][7]).sum();
        assert!(d.abs() < 1e-13);
    }

    #[test]
    fn jacobi_small() {
        let a = vec![vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 2.0]];
        let (vals, _) = jacobi_eig(&a).unwrap();
        let tr: f64 = vals.iter().sum();
        assert!((tr - 9.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let mesh = Mesh::unit_disk(5).unwrap();
        let p = LameParams::new(1.0, 1.5).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Free] {
            let ops = assemble(&mesh, &p, bc).unwrap();
            let dense = dense_eigenpairs(&ops).unwrap();
            let cutoff = dense[25].value + 1e-3;
            let opts = EigenOptions {
                kind: SolverKind::Lanczos,
                slice_size: 8,
                ..Default::default()
            };
            let lz = eigenpairs_below(&ops, cutoff, &opts).unwrap();
            let want: Vec<f64> = dense.iter().map(|p| p.value).filter(|v| *v < cutoff).collect();
            assert_eq!(lz.len(), want.len(), "{bc}");
            for (a, b) in lz.iter().zip(&want) {
                assert!((a.value - b).abs() <= 1e-9 * b.abs().max(1.0), "{bc}: {} vs {b}", a.value);
                assert!(a.residual <= 1e-8 * a.value.abs().max(1.0));
            }
        }
    }

    #[test]
    fn inertia_counts_match_dense() {
        let mesh = Mesh::unit_square(4).unwrap();
        let ops = assemble(&mesh, &LameParams::new(1.0, 0.5).unwrap(), BoundaryCondition::Free).unwrap();
        let dense = dense_eigenpairs(&ops).unwrap();
        for x in [5.0, 40.0, 120.0] {
            let c = dense.iter().filter(|p| p.value < x).count();
            assert_eq!(count_below(&ops, x).unwrap(), c);
        }
    }
}

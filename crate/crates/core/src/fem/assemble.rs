use std::collections::VecDeque;

use rayon::prelude::*;

use super::mesh::Mesh;
use crate::elastic::{BoundaryCondition, Domain, LameParams};
use crate::error::{Error, Result};

/// Square sparse matrix in compressed-row form with sorted column indices.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.vals[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (c, v) = self.row(i);
        c.binary_search(&j).map(|p| v[p]).unwrap_or(0.0)
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let (c, v) = self.row(i);
            *yi = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                worst = worst.max((a - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                row[j] = a;
            }
        }
        d
    }

    /// `A - sigma B` for matrices sharing one sparsity pattern.
    pub fn shifted(&self, sigma: f64, b: &CsrMatrix) -> CsrMatrix {
        debug_assert_eq!(self.col_idx, b.col_idx);
        CsrMatrix {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            vals: self.vals.iter().zip(&b.vals).map(|(a, m)| a - sigma * m).collect(),
        }
    }
}

/// Degree-of-freedom numbering: node-major, components interleaved.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub n_dofs: usize,
    /// `dof[2 * vertex + component]`, `None` on eliminated Dirichlet nodes.
    pub dof: Vec<Option<usize>>,
}

impl DofMap {
    /// Nodal interpolant of a vector field.
    pub fn interpolate<F: Fn(f64, f64) -> [f64; 2]>(&self, mesh: &Mesh, f: F) -> Vec<f64> {
        let mut x = vec![0.0; self.n_dofs];
        for (v, p) in mesh.vertices.iter().enumerate() {
            let u = f(p[0], p[1]);
            for c in 0..2 {
                if let Some(d) = self.dof[2 * v + c] {
                    x[d] = u[c];
                }
            }
        }
        x
    }

    /// Nodal displacement vectors, zero on eliminated nodes.
    pub fn expand(&self, x: &[f64]) -> Vec<[f64; 2]> {
        (0..self.dof.len() / 2)
            .map(|v| {
                let g = |c: usize| self.dof[2 * v + c].map(|d| x[d]).unwrap_or(0.0);
                [g(0), g(1)]
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Operators {
    pub domain: Domain,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub dofs: DofMap,
    pub bc: BoundaryCondition,
    pub params: LameParams,
    pub h: f64,
}

impl Operators {
    pub fn n(&self) -> usize {
        self.dofs.n_dofs
    }
}

type ElementPair = ([[f64; 6]; 6], [[f64; 6]; 6]);

/// P1 stiffness and consistent mass of one triangle, local dof order
/// `(u0x, u0y, u1x, u1y, u2x, u2y)`.
fn element_matrices(mesh: &Mesh, t: usize, params: &LameParams) -> Result<ElementPair> {
    let tri = mesh.triangles[t];
    let p: Vec<[f64; 2]> = tri.iter().map(|&v| mesh.vertices[v]).collect();
    let area = mesh.area(t);
    if !(area > 0.0) {
        return Err(Error::Mesh(format!("element {t} has nonpositive area {area:e}")));
    }
    let mut bx = [0.0; 3];
    let mut by = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        bx[i] = (p[j][1] - p[k][1]) / (2.0 * area);
        by[i] = (p[k][0] - p[j][0]) / (2.0 * area);
    }
    // strain rows (exx, eyy, gamma_xy) against the six local dofs
    let mut b = [[0.0; 6]; 3];
    for i in 0..3 {
        b[0][2 * i] = bx[i];
        b[1][2 * i + 1] = by[i];
        b[2][2 * i] = by[i];
        b[2][2 * i + 1] = bx[i];
    }
    let (mu, lam) = (params.mu(), params.lambda());
    let d = [[lam + 2.0 * mu, lam, 0.0], [lam, lam + 2.0 * mu, 0.0], [0.0, 0.0, mu]];
    let mut db = [[0.0; 6]; 3];
    for r in 0..3 {
        for c in 0..6 {
            db[r][c] = (0..3).map(|s| d[r][s] * b[s][c]).sum();
        }
    }
    let mut ke = [[0.0; 6]; 6];
    let mut me = [[0.0; 6]; 6];
    for r in 0..6 {
        for c in 0..6 {
            ke[r][c] = area * (0..3).map(|s| b[s][r] * db[s][c]).sum::<f64>();
            if r % 2 == c % 2 {
                let w = if r / 2 == c / 2 { 2.0 } else { 1.0 };
                me[r][c] = area / 12.0 * w;
            }
        }
    }
    Ok((ke, me))
}

/// Lower-envelope size of the node graph under `order`.
fn envelope(adj: &[Vec<usize>], order: &[usize], nv: usize) -> usize {
    let mut rank = vec![usize::MAX; nv];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    order
        .iter()
        .enumerate()
        .map(|(r, &v)| {
            let lo = adj[v].iter().map(|&w| rank[w]).filter(|&x| x != usize::MAX).min().unwrap_or(r);
            r - lo.min(r)
        })
        .sum()
}

/// Reverse Cuthill-McKee order of the given vertices.
fn rcm_order(adj: &[Vec<usize>], active: &[bool]) -> Vec<usize> {
    let n = adj.len();
    let deg = |v: usize| adj[v].iter().filter(|&&w| active[w]).count();
    let mut visited: Vec<bool> = active.iter().map(|a| !a).collect();
    let mut order = Vec::with_capacity(n);
    let bfs_levels = |root: usize, visited_base: &[bool]| -> (usize, usize) {
        // returns (eccentricity, a vertex of minimal degree on the last level)
        let mut seen = visited_base.to_vec();
        let mut frontier = vec![root];
        seen[root] = true;
        let mut depth = 0;
        let mut last = frontier.clone();
        while !frontier.is_empty() {
            last = frontier.clone();
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            depth += 1;
            frontier = next;
        }
        let pick = *last.iter().min_by_key(|&&v| (deg(v), v)).unwrap();
        (depth, pick)
    };
    for start in 0..n {
        if visited[start] {
            continue;
        }
        // pseudo-peripheral root
        let mut root = start;
        let (mut ecc, mut cand) = bfs_levels(root, &visited);
        for _ in 0..8 {
            let (e2, c2) = bfs_levels(cand, &visited);
            if e2 <= ecc {
                break;
            }
            root = cand;
            ecc = e2;
            cand = c2;
        }
        let mut queue = VecDeque::from([root]);
        visited[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nb.sort_by_key(|&w| (deg(w), w));
            for w in nb {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Assembles the elastic energy `∫ 2μ ε(u):ε(v) + λ div u div v` and the
/// consistent mass `∫ u·v` on piecewise-linear vector fields.
pub fn assemble(mesh: &Mesh, params: &LameParams, bc: BoundaryCondition) -> Result<Operators> {
    let nv = mesh.num_vertices();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for t in &mesh.triangles {
        for a in 0..3 {
            for b in 0..3 {
                if a != b {
                    adj[t[a]].push(t[b]);
                }
            }
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let active: Vec<bool> = match bc {
        BoundaryCondition::Dirichlet => mesh.boundary.iter().map(|b| !b).collect(),
        BoundaryCondition::Free => vec![true; nv],
    };
    let natural: Vec<usize> = (0..nv).filter(|&v| active[v]).collect();
    let rcm = rcm_order(&adj, &active);
    let order = if envelope(&adj, &rcm, nv) < envelope(&adj, &natural, nv) { rcm } else { natural };
    let mut rank = vec![usize::MAX; nv];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let n_nodes = order.len();
    let n = 2 * n_nodes;
    let mut dof = vec![None; 2 * nv];
    for v in 0..nv {
        if active[v] {
            dof[2 * v] = Some(2 * rank[v]);
            dof[2 * v + 1] = Some(2 * rank[v] + 1);
        }
    }

    // sparsity pattern from node adjacency
    let mut row_ptr = vec![0usize; n + 1];
    let mut col_idx = Vec::new();
    for (r, &v) in order.iter().enumerate() {
        let mut cols: Vec<usize> = std::iter::once(v)
            .chain(adj[v].iter().copied())
            .filter(|&w| active[w])
            .flat_map(|w| [2 * rank[w], 2 * rank[w] + 1])
            .collect();
        cols.sort_unstable();
        for c in 0..2 {
            col_idx.extend_from_slice(&cols);
            row_ptr[2 * r + c + 1] = col_idx.len();
        }
    }
    let nnz = col_idx.len();
    let mut kv = vec![0.0; nnz];
    let mut mv = vec![0.0; nnz];

    let elements: Vec<ElementPair> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| element_matrices(mesh, t, params))
        .collect::<Result<_>>()?;

    for (t, (ke, me)) in mesh.triangles.iter().zip(&elements) {
        let local: Vec<Option<usize>> = (0..6).map(|l| dof[2 * t[l / 2] + l % 2]).collect();
        for r in 0..6 {
            let Some(gr) = local[r] else { continue };
            let (s, e) = (row_ptr[gr], row_ptr[gr + 1]);
            let cols = &col_idx[s..e];
            for c in 0..6 {
                let Some(gc) = local[c] else { continue };
                let p = s + cols.binary_search(&gc).expect("pattern covers element couplings");
                kv[p] += ke[r][c];
                mv[p] += me[r][c];
            }
        }
    }
    let stiffness = CsrMatrix {
        n,
        row_ptr: row_ptr.clone(),
        col_idx: col_idx.clone(),
        vals: kv,
    };
    let mass = CsrMatrix {
        n,
        row_ptr,
        col_idx,
        vals: mv,
    };
    Ok(Operators {
        domain: mesh.domain,
        stiffness,
        mass,
        dofs: DofMap { n_dofs: n, dof },
        bc,
        params: *params,
        h: mesh.h,
    })
}

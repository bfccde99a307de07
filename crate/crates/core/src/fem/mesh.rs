use std::f64::consts::PI;

use crate::elastic::Domain;
use crate::error::{Error, Result};

/// Conforming triangulation with counter-clockwise triangles.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub domain: Domain,
    /// Longest edge.
    pub h: f64,
    /// Refinement parameter: cells per side (square) or ring count (disk).
    pub resolution: usize,
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
}

pub const MIN_ANGLE_DEG: f64 = 20.0;

impl Mesh {
    /// `n × n` cells, each split along alternating diagonals.
    pub fn unit_square(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Mesh("square mesh needs at least one cell".into()));
        }
        let np = n + 1;
        let id = |i: usize, j: usize| j * np + i;
        let mut vertices = Vec::with_capacity(np * np);
        let mut boundary = Vec::with_capacity(np * np);
        for j in 0..np {
            for i in 0..np {
                vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
                boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                if (i + j) % 2 == 0 {
                    triangles.push([a, b, c]);
                    triangles.push([a, c, d]);
                } else {
                    triangles.push([a, b, d]);
                    triangles.push([b, c, d]);
                }
            }
        }
        Self::finish(Domain::UnitSquare, n, vertices, triangles, boundary)
    }

    /// Concentric rings at radii `j / rings` with `6 j` equally spaced points
    /// on ring `j`; neighbouring rings are stitched by an angular merge.
    pub fn unit_disk(rings: usize) -> Result<Self> {
        if rings == 0 {
            return Err(Error::Mesh("disk mesh needs at least one ring".into()));
        }
        let mut vertices = vec![[0.0, 0.0]];
        let mut boundary = vec![false];
        let mut start = vec![0usize];
        for j in 1..=rings {
            start.push(vertices.len());
            let count = 6 * j;
            let r = j as f64 / rings as f64;
            for i in 0..count {
                let th = 2.0 * PI * i as f64 / count as f64;
                let (s, c) = th.sin_cos();
                // boundary ring is placed exactly on the circle
                vertices.push([r * c, r * s]);
                boundary.push(j == rings);
            }
        }
        let mut triangles = Vec::new();
        for j in 1..=rings {
            let outer = |i: usize| start[j] + i % (6 * j);
            if j == 1 {
                for i in 0..6 {
                    triangles.push([0, outer(i), outer(i + 1)]);
                }
                continue;
            }
            let m_in = 6 * (j - 1);
            let m_out = 6 * j;
            let inner = |i: usize| start[j - 1] + i % m_in;
            let (mut a, mut b) = (0usize, 0usize);
            while a < m_in || b < m_out {
                // compare the angles of the next candidates as exact fractions
                let adv_inner = b == m_out || (a < m_in && (a + 1) * m_out < (b + 1) * m_in);
                if adv_inner {
                    triangles.push([inner(a), outer(b), inner(a + 1)]);
                    a += 1;
                } else {
                    triangles.push([inner(a), outer(b), outer(b + 1)]);
                    b += 1;
                }
            }
        }
        Self::finish(Domain::UnitDisk, rings, vertices, triangles, boundary)
    }

    /// Mesh with longest edge close to `h`.
    pub fn for_domain(domain: Domain, h: f64) -> Result<Self> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::Mesh(format!("mesh size must lie in (0, 1], got {h}")));
        }
        let n = (1.0 / h).round().max(1.0) as usize;
        match domain {
            Domain::UnitSquare => Self::unit_square(n),
            Domain::UnitDisk => Self::unit_disk(n),
        }
    }

    fn finish(
        domain: Domain,
        resolution: usize,
        vertices: Vec<[f64; 2]>,
        mut triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<Self> {
        let mut h: f64 = 0.0;
        for t in triangles.iter_mut() {
            if signed_area(&vertices, t) < 0.0 {
                t.swap(1, 2);
            }
            for e in 0..3 {
                let (p, q) = (vertices[t[e]], vertices[t[(e + 1) % 3]]);
                h = h.max((p[0] - q[0]).hypot(p[1] - q[1]));
            }
        }
        let mesh = Self {
            domain,
            h,
            resolution,
            vertices,
            triangles,
            boundary,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.vertices, &self.triangles[t])
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut best = 180.0f64;
        for t in &self.triangles {
            for e in 0..3 {
                let p = self.vertices[t[e]];
                let q = self.vertices[t[(e + 1) % 3]];
                let r = self.vertices[t[(e + 2) % 3]];
                let (u, v) = ([q[0] - p[0], q[1] - p[1]], [r[0] - p[0], r[1] - p[1]]);
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                best = best.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        best
    }

    /// Largest distance of a boundary vertex from the exact boundary.
    pub fn boundary_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (p, _) in self.vertices.iter().zip(&self.boundary).filter(|(_, b)| **b) {
            let d = match self.domain {
                Domain::UnitDisk => (p[0].hypot(p[1]) - 1.0).abs(),
                Domain::UnitSquare => p[0].min(1.0 - p[0]).min(p[1]).min(1.0 - p[1]).abs(),
            };
            worst = worst.max(d);
        }
        worst
    }

    /// Checks element orientation, angles, boundary placement, and conformity.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::Mesh(format!("triangle {i} references a missing vertex")));
            }
            if !(self.area(i) > 1e-14 * self.h * self.h) {
                return Err(Error::Mesh(format!("triangle {i} is degenerate")));
            }
        }
        let ang = self.min_angle_deg();
        if ang < MIN_ANGLE_DEG {
            return Err(Error::Mesh(format!("minimum angle {ang:.2} deg below {MIN_ANGLE_DEG}")));
        }
        let dev = self.boundary_deviation();
        if dev > 1e-12 {
            return Err(Error::Mesh(format!("boundary vertex off the boundary by {dev:e}")));
        }
        // each interior edge is shared by exactly two triangles, boundary edges by one
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(3 * self.triangles.len());
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        let mut i = 0;
        while i < edges.len() {
            let mut j = i + 1;
            while j < edges.len() && edges[j] == edges[i] {
                j += 1;
            }
            let (a, b) = edges[i];
            let on_bd = self.boundary[a] && self.boundary[b];
            match j - i {
                1 if on_bd => {}
                2 => {}
                c => {
                    return Err(Error::Mesh(format!(
                        "edge ({a},{b}) shared by {c} triangles (boundary: {on_bd})"
                    )))
                }
            }
            i = j;
        }
        Ok(())
    }
}

fn signed_area(v: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (v[t[0]], v[t[1]], v[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

//! Masked Cartesian discretization of the unit ball.
//!
//! The cube `[-1, 1]^3` is split into `N^3` cells of width `h = 2/N` and every
//! cell is represented by its center, so no node sits at the origin. A node is
//! *interior* when it lies strictly inside the unit ball and off the outermost
//! cube layer; the *boundary band* collects the exterior nodes that are
//! 6-neighbours of interior nodes. Band nodes carry Dirichlet data only, every
//! differential operator is evaluated at interior nodes.
//!
//! Active nodes (interior and band, interleaved) are stored in lexicographic
//! `(i, j, k)` order with `i` slowest; fields are flat arrays over them.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// Per-node Jacobian: `m[i][a] = d u^i / d x^a`.
pub type Mat3 = [[f64; 3]; 3];

const NONE: u32 = u32::MAX;

/// Neighbor slot order: -x, +x, -y, +y, -z, +z.
pub const DIRECTIONS: [(usize, i64); 6] = [(0, -1), (0, 1), (1, -1), (1, 1), (2, -1), (2, 1)];

#[derive(Debug, Clone, PartialEq)]
pub struct BallMesh {
    resolution: usize,
    spacing: f64,
    coords: Vec<Vec3>,
    ijk: Vec<[u32; 3]>,
    is_interior: Vec<bool>,
    interior: Vec<usize>,
    band: Vec<usize>,
    // indexed by position in `interior`
    neighbors: Vec<[usize; 6]>,
    // indexed by position in `interior`: all six neighbors are interior
    deep: Vec<bool>,
    lookup: Vec<u32>,
}

/// One scalar per active node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarField(pub Vec<f64>);

/// One 3-vector per active node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VectorField(pub Vec<Vec3>);

impl Deref for ScalarField {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ScalarField {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl Deref for VectorField {
    type Target = [Vec3];
    fn deref(&self) -> &[Vec3] {
        &self.0
    }
}

impl DerefMut for VectorField {
    fn deref_mut(&mut self) -> &mut [Vec3] {
        &mut self.0
    }
}

#[inline]
pub(crate) fn cell_center(index: usize, spacing: f64) -> f64 {
    -1.0 + (index as f64 + 0.5) * spacing
}

/// Interior membership rule shared by the mesh builder and its test oracle.
#[inline]
pub(crate) fn is_interior_point(x: Vec3, spacing: f64) -> bool {
    let max_coord = x[0].abs().max(x[1].abs()).max(x[2].abs());
    vec3::norm_sq(x) < 1.0 && max_coord < 1.0 - spacing
}

pub fn build_ball_mesh(resolution: usize) -> Result<BallMesh> {
    BallMesh::new(resolution)
}

impl BallMesh {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) || n > 1024 {
            return Err(Error::InvalidResolution(n));
        }
        let h = 2.0 / n as f64;
        let flat = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
        let point = |i: usize, j: usize, k: usize| [cell_center(i, h), cell_center(j, h), cell_center(k, h)];

        let mut inside = vec![false; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    inside[flat(i, j, k)] = is_interior_point(point(i, j, k), h);
                }
            }
        }
        let mut active = vec![false; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !inside[flat(i, j, k)] {
                        continue;
                    }
                    active[flat(i, j, k)] = true;
                    for &(axis, step) in &DIRECTIONS {
                        let mut c = [i as i64, j as i64, k as i64];
                        c[axis] += step;
                        if c.iter().all(|&v| v >= 0 && v < n as i64) {
                            active[flat(c[0] as usize, c[1] as usize, c[2] as usize)] = true;
                        }
                    }
                }
            }
        }

        let mut lookup = vec![NONE; n * n * n];
        let mut coords = Vec::new();
        let mut ijk = Vec::new();
        let mut is_interior = Vec::new();
        let mut interior = Vec::new();
        let mut band = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let f = flat(i, j, k);
                    if !active[f] {
                        continue;
                    }
                    let id = coords.len();
                    lookup[f] = id as u32;
                    coords.push(point(i, j, k));
                    ijk.push([i as u32, j as u32, k as u32]);
                    is_interior.push(inside[f]);
                    if inside[f] {
                        interior.push(id);
                    } else {
                        band.push(id);
                    }
                }
            }
        }

        let mut neighbors = Vec::with_capacity(interior.len());
        for &node in &interior {
            let [i, j, k] = ijk[node];
            let mut slots = [0usize; 6];
            for (slot, &(axis, step)) in DIRECTIONS.iter().enumerate() {
                let mut c = [i as i64, j as i64, k as i64];
                c[axis] += step;
                let found = if c.iter().all(|&v| v >= 0 && v < n as i64) {
                    lookup[flat(c[0] as usize, c[1] as usize, c[2] as usize)]
                } else {
                    NONE
                };
                if found == NONE {
                    return Err(Error::MeshConsistency { node, direction: slot });
                }
                slots[slot] = found as usize;
            }
            neighbors.push(slots);
        }
        let deep = neighbors
            .iter()
            .map(|slots| slots.iter().all(|&m| is_interior[m]))
            .collect();

        Ok(BallMesh {
            resolution: n,
            spacing: h,
            coords,
            ijk,
            is_interior,
            interior,
            band,
            neighbors,
            deep,
            lookup,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Quadrature weight carried by each interior node.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(3)
    }

    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Vec3] {
        &self.coords
    }

    pub fn ijk(&self) -> &[[u32; 3]] {
        &self.ijk
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.is_interior[node]
    }

    /// Boundary band: the nodes on which Dirichlet (trace) data is frozen.
    pub fn trace_nodes(&self) -> &[usize] {
        &self.band
    }

    /// Neighbor table of the `k`-th interior node, in [`DIRECTIONS`] order.
    pub fn neighbors(&self, k: usize) -> &[usize; 6] {
        &self.neighbors[k]
    }

    /// Whether all six neighbors of the `k`-th interior node are interior.
    pub fn is_deep(&self, k: usize) -> bool {
        self.deep[k]
    }

    /// Active node at lattice position `(i, j, k)`, if any.
    pub fn node_at(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let n = self.resolution;
        if i >= n || j >= n || k >= n {
            return None;
        }
        match self.lookup[(i * n + j) * n + k] {
            NONE => None,
            id => Some(id as usize),
        }
    }

    /// Lower bound on the distance from `node` to the boundary band. Band nodes
    /// all satisfy `|x| >= 1 - h/2`.
    pub fn band_clearance(&self, node: usize) -> f64 {
        1.0 - 0.5 * self.spacing - vec3::norm(self.coords[node])
    }

    pub fn zero_vector_field(&self) -> VectorField {
        VectorField(vec![[0.0; 3]; self.node_count()])
    }

    pub fn zero_scalar_field(&self) -> ScalarField {
        ScalarField(vec![0.0; self.node_count()])
    }

    pub fn vector_field_from_fn(&self, f: impl Fn(Vec3) -> Vec3) -> VectorField {
        VectorField(self.coords.iter().map(|&x| f(x)).collect())
    }

    pub fn scalar_field_from_fn(&self, f: impl Fn(Vec3) -> f64) -> ScalarField {
        ScalarField(self.coords.iter().map(|&x| f(x)).collect())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.node_count() {
            return Err(Error::FieldLength { expected: self.node_count(), found: len });
        }
        Ok(())
    }

    /// Central-difference Jacobian at interior nodes; band entries are zero.
    pub fn gradient(&self, f: &[Vec3]) -> Result<Vec<Mat3>> {
        self.check_len(f.len())?;
        let inv = 0.5 / self.spacing;
        let mut out = vec![[[0.0; 3]; 3]; f.len()];
        for (k, &node) in self.interior.iter().enumerate() {
            let nb = &self.neighbors[k];
            let m = &mut out[node];
            for axis in 0..3 {
                let lo = f[nb[2 * axis]];
                let hi = f[nb[2 * axis + 1]];
                for c in 0..3 {
                    m[c][axis] = (hi[c] - lo[c]) * inv;
                }
            }
        }
        Ok(out)
    }

    /// Seven-point Laplacian at interior nodes; band entries are zero.
    pub fn laplacian(&self, f: &[Vec3]) -> Result<Vec<Vec3>> {
        self.check_len(f.len())?;
        let mut out = vec![[0.0; 3]; f.len()];
        self.laplacian_into(f, &mut out);
        Ok(out)
    }

    pub(crate) fn laplacian_into(&self, f: &[Vec3], out: &mut [Vec3]) {
        let inv = 1.0 / (self.spacing * self.spacing);
        for (k, &node) in self.interior.iter().enumerate() {
            let nb = &self.neighbors[k];
            let c = f[node];
            let mut acc = [0.0; 3];
            for &m in nb {
                let v = f[m];
                acc[0] += v[0] - c[0];
                acc[1] += v[1] - c[1];
                acc[2] += v[2] - c[2];
            }
            out[node] = vec3::scale(acc, inv);
        }
    }

    /// Riemann sum of `f` over interior nodes with weight `h^3`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.node_count());
        let s: f64 = self.interior.iter().map(|&n| f[n]).sum();
        s * self.cell_volume()
    }

    /// Discrete L2 inner product of two vector fields over the interior.
    pub fn inner(&self, a: &[Vec3], b: &[Vec3]) -> f64 {
        let s: f64 = self.interior.iter().map(|&n| vec3::dot(a[n], b[n])).sum();
        s * self.cell_volume()
    }

    pub fn l2_norm(&self, a: &[Vec3]) -> f64 {
        self.inner(a, a).sqrt()
    }

    pub fn l2_distance(&self, a: &[Vec3], b: &[Vec3]) -> f64 {
        let s: f64 = self
            .interior
            .iter()
            .map(|&n| vec3::norm_sq(vec3::sub(a[n], b[n])))
            .sum();
        (s * self.cell_volume()).sqrt()
    }
}

pub fn gradient(f: &VectorField, mesh: &BallMesh) -> Result<Vec<Mat3>> {
    mesh.gradient(f)
}

pub fn laplacian(f: &VectorField, mesh: &BallMesh) -> Result<VectorField> {
    mesh.laplacian(f).map(VectorField)
}

pub fn integrate(f: &ScalarField, mesh: &BallMesh) -> f64 {
    mesh.integrate(f)
}

pub fn trace_nodes(mesh: &BallMesh) -> &[usize] {
    mesh.trace_nodes()
}

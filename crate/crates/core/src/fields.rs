//! Sphere-valued fields on a [`BallMesh`] and their static quantities.
//!
//! The discrete Dirichlet energy is assembled from grid edges: every edge
//! between two interior nodes is shared by its endpoints, an edge from an
//! interior node to the band belongs wholly to the interior endpoint. The
//! negative gradient of this energy (per unit cell volume) is exactly the
//! seven-point Laplacian with the band held fixed, so the explicit flows in
//! [`crate::flow`] are gradient flows of the same energy that the admissibility
//! checks measure.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{BallMesh, Mat3, ScalarField, VectorField};
use crate::vec3::{self, Vec3};

/// Nodewise tolerance on `| |u| - 1 |` accepted by the energy routines.
pub const NORM_GATE: f64 = 1e-9;

/// Radius of the support of the default gate test fields.
pub const GATE_TEST_RADIUS: f64 = 0.75;

/// A discrete map `B^3 -> S^2`: one unit vector per active mesh node.
#[derive(Debug, Clone)]
pub struct DirectorField {
    mesh: Arc<BallMesh>,
    values: Arc<Vec<Vec3>>,
}

impl PartialEq for DirectorField {
    fn eq(&self, other: &Self) -> bool {
        self.mesh.resolution() == other.mesh.resolution() && self.values == other.values
    }
}

impl DirectorField {
    /// Wraps values that must already be unit vectors (within [`NORM_GATE`]).
    pub fn new(mesh: Arc<BallMesh>, values: Vec<Vec3>) -> Result<Self> {
        let field = Self::from_raw(mesh, values)?;
        field.check_unit_norm(NORM_GATE)?;
        Ok(field)
    }

    /// Wraps values after checking length and finiteness only.
    pub fn from_raw(mesh: Arc<BallMesh>, values: Vec<Vec3>) -> Result<Self> {
        mesh.check_len(values.len())?;
        if let Some(node) = values.iter().position(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(Error::NonFinite { node });
        }
        Ok(Self { mesh, values: Arc::new(values) })
    }

    /// Samples `f` at every active node and normalizes.
    pub fn from_map(mesh: Arc<BallMesh>, f: impl Fn(Vec3) -> Vec3) -> Result<Self> {
        let values = mesh.coords().iter().map(|&x| vec3::normalize(f(x))).collect();
        Self::new(mesh, values)
    }

    pub(crate) fn from_parts(mesh: Arc<BallMesh>, values: Arc<Vec<Vec3>>) -> Self {
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<BallMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[Vec3] {
        &self.values
    }

    pub(crate) fn shared_values(&self) -> &Arc<Vec<Vec3>> {
        &self.values
    }

    pub fn to_vector_field(&self) -> VectorField {
        VectorField(self.values.to_vec())
    }

    /// Largest `| |u(x)| - 1 |` over all active nodes.
    pub fn max_norm_defect(&self) -> f64 {
        self.values.iter().map(|&v| (vec3::norm(v) - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn check_unit_norm(&self, tol: f64) -> Result<()> {
        for (node, &v) in self.values.iter().enumerate() {
            let n = vec3::norm(v);
            if (n - 1.0).abs() > tol || !n.is_finite() {
                return Err(Error::ConstraintViolation { node, norm: n });
            }
        }
        Ok(())
    }

    pub fn same_mesh(&self, other: &DirectorField) -> Result<()> {
        ensure_same_mesh(&self.mesh, &other.mesh)
    }

    pub fn l2_distance(&self, other: &DirectorField) -> f64 {
        self.mesh.l2_distance(&self.values, &other.values)
    }

    pub fn l2_norm(&self) -> f64 {
        self.mesh.l2_norm(&self.values)
    }

    /// `sqrt(2 E(u))`, the `H^1` seminorm under the `½∫|∇u|²` energy convention.
    pub fn h1_norm(&self) -> Result<f64> {
        Ok((2.0 * energy(self)?).sqrt())
    }

    /// Whether band values are bit-identical to those of `other`.
    pub fn band_matches(&self, other: &DirectorField) -> bool {
        self.mesh
            .trace_nodes()
            .iter()
            .all(|&b| self.values[b] == other.values[b])
    }
}

pub(crate) fn ensure_same_mesh(a: &BallMesh, b: &BallMesh) -> Result<()> {
    if a.resolution() != b.resolution() {
        return Err(Error::MeshMismatch { left: a.resolution(), right: b.resolution() });
    }
    Ok(())
}

/// Edge-based energy density at interior nodes (zero on the band).
pub(crate) fn energy_density_raw(mesh: &BallMesh, u: &[Vec3], out: &mut [f64]) {
    let inv = 1.0 / (mesh.spacing() * mesh.spacing());
    for (k, &node) in mesh.interior().iter().enumerate() {
        let c = u[node];
        let mut acc = 0.0;
        for &m in mesh.neighbors(k) {
            let w = if mesh.is_interior(m) { 0.25 } else { 0.5 };
            acc += w * vec3::norm_sq(vec3::sub(u[m], c));
        }
        out[node] = acc * inv;
    }
}

pub(crate) fn energy_raw(mesh: &BallMesh, u: &[Vec3]) -> f64 {
    let inv = 1.0 / (mesh.spacing() * mesh.spacing());
    let mut total = 0.0;
    for (k, &node) in mesh.interior().iter().enumerate() {
        let c = u[node];
        for &m in mesh.neighbors(k) {
            let w = if mesh.is_interior(m) { 0.25 } else { 0.5 };
            total += w * vec3::norm_sq(vec3::sub(u[m], c));
        }
    }
    total * inv * mesh.cell_volume()
}

/// Tension `Δu + u |∇u|^2` with `|∇u|^2 = 2 e(u)`, written into `out`.
pub(crate) fn tension_raw(mesh: &BallMesh, u: &[Vec3], out: &mut [Vec3]) {
    let inv = 1.0 / (mesh.spacing() * mesh.spacing());
    for (k, &node) in mesh.interior().iter().enumerate() {
        let c = u[node];
        let mut lap = [0.0; 3];
        let mut two_e = 0.0;
        for &m in mesh.neighbors(k) {
            let d = vec3::sub(u[m], c);
            lap = vec3::add(lap, d);
            let w = if mesh.is_interior(m) { 0.5 } else { 1.0 };
            two_e += w * vec3::norm_sq(d);
        }
        out[node] = vec3::scale(vec3::add(lap, vec3::scale(c, two_e)), inv);
    }
}

/// `e(u)(x) = |∇u(x)|^2 / 2` at interior nodes.
pub fn energy_density(u: &DirectorField) -> Result<ScalarField> {
    u.check_unit_norm(NORM_GATE)?;
    let mesh = u.mesh();
    let mut out = mesh.zero_scalar_field();
    energy_density_raw(mesh, u.values(), &mut out);
    Ok(out)
}

/// Dirichlet energy `E(u) = ∫ e(u) dx`.
pub fn energy(u: &DirectorField) -> Result<f64> {
    u.check_unit_norm(NORM_GATE)?;
    Ok(energy_raw(u.mesh(), u.values()))
}

pub fn tension(u: &DirectorField) -> Result<VectorField> {
    u.check_unit_norm(NORM_GATE)?;
    let mesh = u.mesh();
    let mut out = mesh.zero_vector_field();
    tension_raw(mesh, u.values(), &mut out);
    Ok(out)
}

/// `sqrt(Σ_interior |∇η|^2 h^3)` with central differences.
pub fn h1_seminorm(mesh: &BallMesh, eta: &[Vec3]) -> Result<f64> {
    let g = mesh.gradient(eta)?;
    let s: f64 = mesh
        .interior()
        .iter()
        .map(|&n| g[n].iter().flatten().map(|v| v * v).sum::<f64>())
        .sum();
    Ok((s * mesh.cell_volume()).sqrt())
}

pub(crate) fn check_test_vanishes(mesh: &BallMesh, index: usize, eta: &[Vec3]) -> Result<()> {
    mesh.check_len(eta.len())?;
    if let Some(&node) = mesh.trace_nodes().iter().find(|&&b| eta[b] != [0.0; 3]) {
        return Err(Error::InvalidTest { index, node });
    }
    Ok(())
}

/// Projects `eta` onto the tangent planes of `u`.
pub fn tangent_project(u: &[Vec3], eta: &[Vec3]) -> Vec<Vec3> {
    u.iter()
        .zip(eta)
        .map(|(&p, &e)| vec3::sub(e, vec3::scale(p, vec3::dot(e, p))))
        .collect()
}

/// Weak form `∫ ∇u:∇η - |∇u|^2 u·η` with both gradients by central
/// differences. `eta` must vanish on the band; it is used as given.
pub(crate) fn weak_form(
    mesh: &BallMesh,
    grad_u: &[Mat3],
    two_e: &[f64],
    u: &[Vec3],
    eta: &[Vec3],
) -> Result<f64> {
    let grad_eta = mesh.gradient(eta)?;
    let mut acc = 0.0;
    for &n in mesh.interior() {
        let gu = &grad_u[n];
        let ge = &grad_eta[n];
        let mut s = 0.0;
        for i in 0..3 {
            for a in 0..3 {
                s += gu[i][a] * ge[i][a];
            }
        }
        acc += s - two_e[n] * vec3::dot(u[n], eta[n]);
    }
    Ok(acc * mesh.cell_volume())
}

/// Residual of the weak harmonic-map equation against each test field, after
/// projecting the tests onto the tangent planes of `u`.
pub fn weak_harmonic_residual(u: &DirectorField, tests: &[VectorField]) -> Result<Vec<f64>> {
    u.check_unit_norm(NORM_GATE)?;
    let mesh = u.mesh();
    let grad_u = mesh.gradient(u.values())?;
    let mut two_e = mesh.zero_scalar_field();
    energy_density_raw(mesh, u.values(), &mut two_e);
    two_e.iter_mut().for_each(|v| *v *= 2.0);
    tests
        .iter()
        .enumerate()
        .map(|(index, eta)| {
            check_test_vanishes(mesh, index, eta)?;
            let eta = tangent_project(u.values(), eta);
            weak_form(mesh, &grad_u, &two_e, u.values(), &eta)
        })
        .collect()
}

/// Smooth radial bump times monomial test fields.
///
/// The bump is `(1 - r^2/R^2)^3` for `inner == 0`, otherwise the cubed
/// normalized parabola supported on `inner < r < outer`. Every monomial
/// `x^a y^b z^c` of total degree `<= degree` is multiplied by each unit vector.
pub fn bump_test_fields(mesh: &BallMesh, inner: f64, outer: f64, degree: u32) -> Vec<VectorField> {
    let bump = |x: Vec3| -> f64 {
        let r = vec3::norm(x);
        if inner <= 0.0 {
            let s = 1.0 - r * r / (outer * outer);
            if s > 0.0 { s * s * s } else { 0.0 }
        } else if r > inner && r < outer {
            let s = 4.0 * (r - inner) * (outer - r) / ((outer - inner) * (outer - inner));
            s * s * s
        } else {
            0.0
        }
    };
    let mut out = Vec::new();
    for exps in monomial_exponents(degree) {
        for comp in 0..3 {
            let mut f = mesh.vector_field_from_fn(|x| {
                let mut v = [0.0; 3];
                v[comp] = bump(x) * monomial(exps, x);
                v
            });
            for &b in mesh.trace_nodes() {
                f[b] = [0.0; 3];
            }
            out.push(f);
        }
    }
    out
}

/// Default test set for the weak-harmonicity gate.
pub fn gate_test_fields(mesh: &BallMesh) -> Vec<VectorField> {
    bump_test_fields(mesh, 0.0, GATE_TEST_RADIUS, 2)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GateReport {
    pub max_normalized_residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Default gate threshold `10 h^2 ||a||_{H^1}`.
pub fn default_gate_threshold(a: &DirectorField) -> Result<f64> {
    let h = a.mesh().spacing();
    Ok(10.0 * h * h * a.h1_norm()?)
}

/// Largest `|r[η]| / |η|_{H^1}` over `tests`, compared against `threshold`.
pub fn weak_harmonic_gate(a: &DirectorField, tests: &[VectorField], threshold: f64) -> Result<GateReport> {
    let residuals = weak_harmonic_residual(a, tests)?;
    let mut worst: f64 = 0.0;
    for (r, eta) in residuals.iter().zip(tests) {
        let projected = tangent_project(a.values(), eta);
        let size = h1_seminorm(a.mesh(), &projected)?;
        if size > 0.0 {
            worst = worst.max(r.abs() / size);
        }
    }
    Ok(GateReport { max_normalized_residual: worst, threshold, passed: worst <= threshold })
}

#[derive(Debug, Clone)]
pub struct StationarityResidual {
    /// `R_k(x)` per node; zero where the nested stencil is unavailable.
    pub field: VectorField,
    /// `∫ |R_k| dx` over nodes whose neighbors are all interior.
    pub integrated_abs: [f64; 3],
}

/// `R_k = Σ_j ∂_k |∂_j u|^2 - 2 Σ_j ∂_j <∂_j u, ∂_k u>` by nested central
/// differences, evaluated at interior nodes whose neighbors are all interior.
pub fn stationarity_residual(u: &DirectorField) -> Result<StationarityResidual> {
    u.check_unit_norm(NORM_GATE)?;
    let mesh = u.mesh();
    let g = mesh.gradient(u.values())?;
    // P[n][j][k] = <∂_j u, ∂_k u>
    let products: Vec<[[f64; 3]; 3]> = g
        .iter()
        .map(|m| {
            let mut p = [[0.0; 3]; 3];
            for j in 0..3 {
                for k in 0..3 {
                    p[j][k] = (0..3).map(|i| m[i][j] * m[i][k]).sum();
                }
            }
            p
        })
        .collect();
    let inv = 0.5 / mesh.spacing();
    let mut field = mesh.zero_vector_field();
    let mut integrated_abs = [0.0; 3];
    for (idx, &node) in mesh.interior().iter().enumerate() {
        if !mesh.is_deep(idx) {
            continue;
        }
        let nb = mesh.neighbors(idx);
        let d = |axis: usize, j: usize, k: usize| {
            (products[nb[2 * axis + 1]][j][k] - products[nb[2 * axis]][j][k]) * inv
        };
        let mut r = [0.0; 3];
        for (k, rk) in r.iter_mut().enumerate() {
            for j in 0..3 {
                *rk += d(k, j, j) - 2.0 * d(j, j, k);
            }
            integrated_abs[k] += rk.abs();
        }
        field[node] = r;
    }
    for v in integrated_abs.iter_mut() {
        *v *= mesh.cell_volume();
    }
    Ok(StationarityResidual { field, integrated_abs })
}

pub(crate) fn monomial_exponents(degree: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for total in 0..=degree {
        for a in (0..=total).rev() {
            for b in (0..=total - a).rev() {
                out.push([a, b, total - a - b]);
            }
        }
    }
    out
}

#[inline]
pub(crate) fn monomial(exps: [u32; 3], x: Vec3) -> f64 {
    x[0].powi(exps[0] as i32) * x[1].powi(exps[1] as i32) * x[2].powi(exps[2] as i32)
}

/// `φ(v) = tanh(<v, g>_{L^2} / κ)` for a probe field `g` and scale `κ >= 1`.
///
/// Since `|tanh'| <= 1` and `κ >= 1`, `φ` is bounded by one and Lipschitz in
/// the discrete `L^2` norm with constant at most `||g||_{L^2}`.
#[derive(Debug, Clone)]
pub struct ProbeFunctional {
    label: String,
    resolution: usize,
    probe: Arc<Vec<Vec3>>,
    scale: f64,
}

impl PartialEq for ProbeFunctional {
    fn eq(&self, other: &Self) -> bool {
        self.label == other.label
            && self.resolution == other.resolution
            && self.scale == other.scale
            && self.probe == other.probe
    }
}

impl ProbeFunctional {
    /// Probe with scale `max(1, ||g||^2)`; band entries of `g` are zeroed.
    pub fn new(label: impl Into<String>, mesh: &BallMesh, mut probe: Vec<Vec3>) -> Result<Self> {
        mesh.check_len(probe.len())?;
        for &b in mesh.trace_nodes() {
            probe[b] = [0.0; 3];
        }
        let scale = mesh.inner(&probe, &probe).max(1.0);
        Self::with_scale(label, mesh, probe, scale)
    }

    pub fn with_scale(label: impl Into<String>, mesh: &BallMesh, probe: Vec<Vec3>, scale: f64) -> Result<Self> {
        mesh.check_len(probe.len())?;
        if !(scale >= 1.0) || !scale.is_finite() {
            return Err(Error::Config(format!("probe scale must be finite and >= 1, got {scale}")));
        }
        Ok(Self { label: label.into(), resolution: mesh.resolution(), probe: Arc::new(probe), scale })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn probe(&self) -> &[Vec3] {
        &self.probe
    }

    /// The bounded transform `b(s) = tanh(s / κ)`.
    pub fn transform(&self, s: f64) -> f64 {
        (s / self.scale).tanh()
    }

    /// The functional with `g -> -g`, i.e. `-φ` since `b` is odd.
    pub fn negated(&self) -> Self {
        let label = match self.label.strip_prefix('-') {
            Some(rest) => rest.to_string(),
            None => format!("-{}", self.label),
        };
        Self {
            label,
            resolution: self.resolution,
            probe: Arc::new(self.probe.iter().map(|&v| vec3::scale(v, -1.0)).collect()),
            scale: self.scale,
        }
    }

    pub(crate) fn eval_raw(&self, mesh: &BallMesh, u: &[Vec3]) -> f64 {
        self.transform(mesh.inner(u, &self.probe))
    }

    pub fn evaluate(&self, u: &DirectorField) -> Result<f64> {
        if u.mesh().resolution() != self.resolution {
            return Err(Error::MeshMismatch { left: self.resolution, right: u.mesh().resolution() });
        }
        Ok(self.eval_raw(u.mesh(), u.values()))
    }
}

pub fn evaluate_probe(phi: &ProbeFunctional, u: &DirectorField) -> Result<f64> {
    phi.evaluate(u)
}

/// Probe maximized over unit-norm fields exactly at `a`: `g = a` on the
/// interior, so `<v, a> <= <a, a>` with equality iff `v = a` there.
pub fn make_aligned_probe(a: &DirectorField) -> Result<ProbeFunctional> {
    a.check_unit_norm(NORM_GATE)?;
    ProbeFunctional::new("aligned", a.mesh(), a.values().to_vec())
}

/// Signed monomial probes `± x^a y^b z^c e_i`, total degree `<= degree`.
#[derive(Debug, Clone)]
pub struct ProbeFamily {
    probes: Vec<ProbeFunctional>,
}

impl ProbeFamily {
    pub fn monomial(mesh: &BallMesh, degree: u32) -> Result<Self> {
        let mut probes = Vec::new();
        for exps in monomial_exponents(degree) {
            for comp in 0..3 {
                let g: Vec<Vec3> = mesh
                    .coords()
                    .iter()
                    .map(|&x| {
                        let mut v = [0.0; 3];
                        v[comp] = monomial(exps, x);
                        v
                    })
                    .collect();
                let label = format!("x{}y{}z{}e{}", exps[0], exps[1], exps[2], comp + 1);
                let p = ProbeFunctional::new(label, mesh, g)?;
                let n = p.negated();
                probes.push(p);
                probes.push(n);
            }
        }
        Ok(Self { probes })
    }

    pub fn probes(&self) -> &[ProbeFunctional] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    /// Whether some probe takes different values on `u` and `v` by more than `tol`.
    pub fn separates(&self, u: &DirectorField, v: &DirectorField, tol: f64) -> Result<bool> {
        for p in &self.probes {
            if (p.evaluate(u)? - p.evaluate(v)?).abs() > tol {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

//! Closed-form initial data.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::DirectorField;
use crate::mesh::BallMesh;
use crate::vec3::{self, Vec3};

pub fn constant(mesh: Arc<BallMesh>, direction: Vec3) -> Result<DirectorField> {
    let n = vec3::norm(direction);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Config(format!("constant direction must be non-zero, got {direction:?}")));
    }
    let d = vec3::scale(direction, 1.0 / n);
    DirectorField::new(mesh.clone(), vec![d; mesh.node_count()])
}

/// `(sin x1, 0, cos x1)`: harmonic, `|∇u|^2 = 1`.
pub fn great_circle(mesh: Arc<BallMesh>) -> Result<DirectorField> {
    DirectorField::from_map(mesh, |x| [x[0].sin(), 0.0, x[0].cos()])
}

/// `x / |x|`: weakly harmonic with a point singularity at the origin.
pub fn equator(mesh: Arc<BallMesh>) -> Result<DirectorField> {
    DirectorField::from_map(mesh, |x| x)
}

/// `(sin θ, 0, cos θ)` with `θ = x1^2 + x2`; smooth and not harmonic since `Δθ = 2`.
pub fn twisted(mesh: Arc<BallMesh>) -> Result<DirectorField> {
    DirectorField::from_map(mesh, |x| {
        let t = x[0] * x[0] + x[1];
        [t.sin(), 0.0, t.cos()]
    })
}

/// One Fourier mode `amplitude * sin(<wave, x> + phase)` of a smooth map.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Mode {
    pub amplitude: Vec3,
    pub wave: Vec3,
    pub phase: f64,
}

/// `normalize(offset + Σ modes)`. Smooth as long as the sum stays away from
/// zero, which holds when `|offset| > Σ |amplitude|`.
pub fn smooth_map(mesh: Arc<BallMesh>, offset: Vec3, modes: &[Mode]) -> Result<DirectorField> {
    let budget: f64 = modes.iter().map(|m| vec3::norm(m.amplitude)).sum();
    if vec3::norm(offset) <= budget {
        return Err(Error::Config("smooth map offset must dominate the mode amplitudes".into()));
    }
    DirectorField::from_map(mesh, |x| {
        modes.iter().fold(offset, |acc, m| {
            vec3::add(acc, vec3::scale(m.amplitude, (vec3::dot(m.wave, x) + m.phase).sin()))
        })
    })
}

/// Three random modes around an offset of length 1.6, drawn from `seed`.
///
/// The amplitudes are bounded by `0.3` per component, so the offset always
/// dominates and [`smooth_map`] accepts the result.
pub fn random_modes(seed: u64) -> (Vec3, Vec<Mode>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = (0..3)
        .map(|_| Mode {
            amplitude: [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)],
            wave: [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)],
            phase: rng.gen_range(0.0..2.0 * std::f64::consts::PI),
        })
        .collect();
    let dir = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 1.0];
    (vec3::scale(dir, 1.6 / vec3::norm(dir)), modes)
}

/// A smooth, generically non-harmonic map built from [`random_modes`].
pub fn random_smooth(mesh: Arc<BallMesh>, seed: u64) -> Result<DirectorField> {
    let (offset, modes) = random_modes(seed);
    smooth_map(mesh, offset, &modes)
}

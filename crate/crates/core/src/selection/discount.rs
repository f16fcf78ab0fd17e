//! Discounted functionals `I[u] = ∫_0^∞ e^{-λt} φ(u(t)) dt` and refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ProbeFunctional;
use crate::flow::Trajectory;

/// A discounted value together with the bounds that make comparisons sound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discounted {
    pub value: f64,
    /// Bound on the truncated part `∫_T^∞`, `sup|φ| e^{-λT} / λ` with `sup|φ| >= 1`.
    pub tail_bound: f64,
    /// Estimated error of interpolating `φ` between snapshots, plus a roundoff floor.
    pub quadrature_error: f64,
    pub rate: f64,
    pub horizon: f64,
}

impl Discounted {
    /// Total uncertainty of `value` as an estimate of the untruncated integral.
    pub fn uncertainty(&self) -> f64 {
        self.tail_bound + self.quadrature_error
    }
}

/// `(1 - e^{-x}) / x` and `(1 - e^{-x}(1 + x)) / x^2`, stable for small `x`.
fn weights(x: f64) -> (f64, f64) {
    if x < 0.05 {
        // Σ (-1)^n x^n / (n+1)!  and  Σ (-1)^n (n+1) x^n / (n+2)!
        let mut a = 0.0;
        let mut b = 0.0;
        let mut p = 1.0;
        let mut f = 1.0;
        for n in 0..12 {
            f *= (n + 1) as f64;
            let f2 = f * (n + 2) as f64;
            a += p / f;
            b += p * (n + 1) as f64 / f2;
            p *= -x;
        }
        (a, b)
    } else {
        let one_minus = -(-x).exp_m1();
        (one_minus / x, (one_minus - x * (-x).exp()) / (x * x))
    }
}

/// Integrates `e^{-λt} φ(t)` with `φ` linear between the given samples.
///
/// Exact for piecewise-linear `φ`, so the constant and linear cases carry only
/// roundoff.
pub fn discounted_integral(times: &[f64], values: &[f64], rate: f64) -> Result<Discounted> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidRate(rate));
    }
    if times.len() != values.len() || times.is_empty() {
        return Err(Error::Config("discounted integral needs matching, non-empty samples".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("sample times must increase strictly".into()));
    }
    let n = times.len();
    let horizon = times[n - 1];
    let mut value = 0.0;
    let mut magnitude = 0.0;
    let mut quad = 0.0;
    for j in 0..n.saturating_sub(1) {
        let (a, b) = (times[j], times[j + 1]);
        let len = b - a;
        let (w0, w1) = weights(rate * len);
        let decay = (-rate * a).exp();
        let mass = decay * len * w0;
        let slope = values[j + 1] - values[j];
        value += decay * len * (values[j] * w0 + slope * w1);
        magnitude += mass * values[j].abs().max(values[j + 1].abs());
        let curvature = second_difference(times, values, j).max(second_difference(times, values, j + 1));
        quad += len * len / 8.0 * curvature * mass;
    }
    let sup = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok(Discounted {
        value,
        tail_bound: sup * (-rate * horizon).exp() / rate,
        quadrature_error: quad + 64.0 * f64::EPSILON * magnitude,
        rate,
        horizon,
    })
}

/// `|φ''|` estimated by the divided difference centred at sample `j`.
fn second_difference(t: &[f64], f: &[f64], j: usize) -> f64 {
    if j == 0 || j + 1 >= t.len() {
        return 0.0;
    }
    let left = (f[j] - f[j - 1]) / (t[j] - t[j - 1]);
    let right = (f[j + 1] - f[j]) / (t[j + 1] - t[j]);
    (2.0 * (right - left) / (t[j + 1] - t[j - 1])).abs()
}

/// `I_{λ,φ}[u]` over the stored snapshots of `traj`.
pub fn discounted_functional(traj: &Trajectory, rate: f64, phi: &ProbeFunctional) -> Result<Discounted> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidRate(rate));
    }
    phi.evaluate(&traj.initial())?;
    let mesh = traj.mesh();
    let mut times = Vec::with_capacity(traj.stored_count());
    let mut values = Vec::with_capacity(traj.stored_count());
    for (step, v) in &traj.snapshots {
        times.push(traj.time(*step));
        values.push(phi.eval_raw(mesh, v));
    }
    if times.len() == 1 {
        return Ok(Discounted {
            value: 0.0,
            tail_bound: values[0].abs().max(1.0) / rate,
            quadrature_error: 0.0,
            rate,
            horizon: 0.0,
        });
    }
    discounted_integral(&times, &values, rate)
}

/// Survivor mask of one refinement round.
///
/// Member `k` survives iff `I_k >= I_max - [δ(1 + |I_max|) + 2 tail + q_k + q_max]`,
/// where `I_max` is the first largest value. At least the argmax survives.
pub fn refine_mask(values: &[Discounted], delta: f64) -> Vec<bool> {
    let Some(best) = values
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, d)| match acc {
            Some((_, v)) if v >= d.value => acc,
            _ => Some((i, d.value)),
        })
    else {
        return Vec::new();
    };
    let top = values[best.0];
    let tail = values.iter().fold(0.0f64, |m, d| m.max(d.tail_bound));
    values
        .iter()
        .enumerate()
        .map(|(i, d)| {
            if i == best.0 {
                return true;
            }
            let margin = delta * (1.0 + top.value.abs()) + 2.0 * tail + d.quadrature_error + top.quadrature_error;
            d.value >= top.value - margin
        })
        .collect()
}

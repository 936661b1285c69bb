//! Radial initial value problem for the reduced chain system.
//!
//! In radial coordinates every chain row reads
//! `w'' + (n-1)/r w' = -f(r, w)`, `w(0) = α`, `w'(0) = 0`. The origin is a
//! singular point, so integration starts at `h0` from [`series_start`].
//!
//! Internally the system is advanced in the logarithmic radius `t = ln r`
//! with state `(w, z = r w')`:
//!
//! ```text
//! dw/dt = z
//! dz/dt = -(n-2) z - r² f(r, w)
//! ```
//!
//! This keeps `z` on the same scale as `w` from `r ~ h0` out to the very
//! large radii needed to see algebraic decay, and lets the step size grow
//! geometrically in `r`.

mod dopri;
mod event;
mod series;
mod trajectory;

pub use event::{locate_wall_event, Bracket, WallEvent};
pub use series::{series_start, SeriesStart};
pub use trajectory::{Trajectory, TrajectoryIoError};

use crate::system::ReducedSystem;
use dopri::{DenseStep, Stepper};
use serde::{Deserialize, Serialize};

/// Integration controls. All radii are in the original `r` variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvpControls {
    /// Start radius for the series start-up.
    pub h0: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub r_max: f64,
    /// Width of the final bracket around a wall crossing.
    pub eps_wall: f64,
    /// Every component below this value (far enough out) counts as decayed.
    pub eps_decay: f64,
    pub max_steps: usize,
    /// Number of equal sub-intervals (in `ln r`) recorded per accepted step.
    pub dense_samples: usize,
    /// Cap on a single step in `ln r`.
    pub max_log_step: f64,
}

impl Default for IvpControls {
    fn default() -> Self {
        Self {
            h0: 1e-6,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            r_max: 1e20,
            eps_wall: 1e-10,
            eps_decay: 1e-6,
            max_steps: 1_000_000,
            dense_samples: 8,
            max_log_step: 0.1,
        }
    }
}

impl IvpControls {
    pub fn check(&self) -> Result<(), IntegrationError> {
        let bad = |what: &str| Err(IntegrationError::InvalidControls(what.to_string()));
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return bad("h0 must be positive");
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.eps_wall > 0.0 && self.eps_decay > 0.0) {
            return bad("eps_wall and eps_decay must be positive");
        }
        if !(self.r_max > self.h0) || !self.r_max.is_finite() {
            return bad("r_max must exceed h0");
        }
        if self.max_steps == 0 || self.dense_samples == 0 {
            return bad("max_steps and dense_samples must be at least 1");
        }
        if !(self.max_log_step > 0.0) {
            return bad("max_log_step must be positive");
        }
        Ok(())
    }

    /// Controls for a second attempt after an unresolved run: tighter
    /// tolerances, a larger horizon and more steps.
    pub fn tightened(&self) -> Self {
        Self {
            rel_tol: self.rel_tol * 0.1,
            abs_tol: self.abs_tol * 0.1,
            r_max: self.r_max * 1e4,
            max_steps: self.max_steps.saturating_mul(4),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    /// Component `hit_index` reached zero first, at `r0`.
    WallHit {
        r0: f64,
        hit_index: usize,
        state: Vec<f64>,
    },
    /// Every component fell below `eps_decay` beyond the problem length scale.
    Decayed { r_end: f64, limit: Vec<f64> },
    /// Reached `r_max` positive but not decayed.
    Truncated { r_end: f64, state: Vec<f64> },
}

impl Outcome {
    pub fn terminal_state(&self) -> &[f64] {
        match self {
            Outcome::WallHit { state, .. } | Outcome::Truncated { state, .. } => state,
            Outcome::Decayed { limit, .. } => limit,
        }
    }

    pub fn terminal_radius(&self) -> f64 {
        match *self {
            Outcome::WallHit { r0, .. } => r0,
            Outcome::Decayed { r_end, .. } | Outcome::Truncated { r_end, .. } => r_end,
        }
    }

    pub fn is_wall_hit(&self) -> bool {
        matches!(self, Outcome::WallHit { .. })
    }

    pub fn is_decayed(&self) -> bool {
        matches!(self, Outcome::Decayed { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Largest `w_m'` seen at an accepted step end while every component was
    /// still positive. Nonpositive for a correct run.
    pub max_positive_slope: f64,
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub trajectory: Trajectory,
    pub outcome: Outcome,
    pub stats: IntegrationStats,
}

#[derive(Debug, thiserror::Error)]
pub enum IntegrationError {
    #[error("initial value α[{index}] = {value} is not strictly positive")]
    NonPositiveAlpha { index: usize, value: f64 },
    #[error("expected {expected} initial values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid controls: {0}")]
    InvalidControls(String),
    #[error("step limit of {steps} exceeded at r = {r:e}")]
    StepLimitExceeded { steps: usize, r: f64 },
    #[error("step size underflow at r = {r:e} (h = {h:e} in ln r)")]
    StiffnessFailure { r: f64, h: f64 },
}

/// Radius below which a shooting solution has not yet moved appreciably:
/// for each row, the radius where the frozen-source start-up would have
/// consumed all of `α_m`, taken over the fastest term of the row and the
/// slowest row.
pub fn length_scale(rs: &ReducedSystem, alpha: &[f64]) -> f64 {
    let n = rs.dim();
    rs.rows
        .iter()
        .enumerate()
        .filter_map(|(m, row)| {
            row.as_monomials()
                .iter()
                .filter_map(|mono| {
                    let g = mono.amplitude(alpha);
                    (g > 0.0).then(|| {
                        let s = mono.sigma;
                        ((2.0 - s) * (n - s) * alpha[m] / g).powf(1.0 / (2.0 - s))
                    })
                })
                .reduce(f64::min)
        })
        .fold(0.0, f64::max)
}

struct DenseBracket<'a> {
    dense: &'a DenseStep,
    len: usize,
    r_lo: f64,
    r_hi: f64,
    end: &'a [f64],
}

impl Bracket for DenseBracket<'_> {
    fn interval(&self) -> (f64, f64) {
        (self.r_lo, self.r_hi)
    }
    fn num_components(&self) -> usize {
        self.len
    }
    fn component(&self, r: f64, m: usize) -> f64 {
        if r >= self.r_hi {
            return self.end[m];
        }
        self.dense.eval_component(self.dense.theta_of(r.ln()), m)
    }
}

fn split_state(y: &[f64], len: usize, r: f64) -> (Vec<f64>, Vec<f64>) {
    let w = y[..len].to_vec();
    let dw = y[len..].iter().map(|z| z / r).collect();
    (w, dw)
}

/// Integrates from `h0` outward and returns the recorded trajectory with its
/// terminal classification.
pub fn integrate(
    rs: &ReducedSystem,
    alpha: &[f64],
    controls: &IvpControls,
) -> Result<(Trajectory, Outcome), IntegrationError> {
    let run = shoot(rs, alpha, controls, true)?;
    Ok((run.trajectory, run.outcome))
}

/// Like [`integrate`], also returning step statistics. With `record = false`
/// only the outcome is produced (the trajectory stays empty).
pub fn shoot(
    rs: &ReducedSystem,
    alpha: &[f64],
    c: &IvpControls,
    record: bool,
) -> Result<Integration, IntegrationError> {
    c.check()?;
    let start = series_start(rs, alpha, c.h0)?;
    let len = rs.total_len();
    let n = rs.dim();
    let decay_radius = 10.0 * length_scale(rs, alpha);

    let mut y = Vec::with_capacity(2 * len);
    y.extend_from_slice(&start.values);
    y.extend(start.derivs.iter().map(|d| d * c.h0));

    let mut traj = Trajectory {
        alpha: alpha.to_vec(),
        ..Trajectory::default()
    };
    if record {
        traj.push(c.h0, &start.values, &start.derivs);
    }

    let mut stats = IntegrationStats {
        max_positive_slope: f64::NEG_INFINITY,
        ..IntegrationStats::default()
    };
    let mut source = vec![0.0; len];
    let mut rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let r = t.exp();
        let (w, z) = y.split_at(len);
        rs.eval_into(r, w, &mut source);
        let r2 = r * r;
        for m in 0..len {
            dy[m] = z[m];
            dy[len + m] = -(n - 2.0) * z[m] - r2 * source[m];
        }
    };

    let mut st = Stepper::new(2 * len);
    let mut t = c.h0.ln();
    let t_end = c.r_max.ln();
    rhs(t, &y, &mut st.k1);
    stats.rhs_evals += 1;

    const SAFE: f64 = 0.9;
    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - BETA * 0.75;
    const FAC_MIN: f64 = 0.1;
    const FAC_MAX: f64 = 5.0;
    let mut facold: f64 = 1e-4;
    let mut h = c.max_log_step.min(0.05);
    let mut sample = vec![0.0; 2 * len];

    loop {
        if stats.accepted + stats.rejected >= c.max_steps {
            return Err(IntegrationError::StepLimitExceeded {
                steps: c.max_steps,
                r: t.exp(),
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let err = st.attempt(&mut rhs, t, &y, h, c.rel_tol, c.abs_tol);
        stats.rhs_evals += 6;

        if !(err <= 1.0) {
            stats.rejected += 1;
            let shrink = if err.is_finite() {
                (err.powf(EXPO1) / SAFE).min(FAC_MAX)
            } else {
                1.0 / FAC_MIN
            };
            h /= shrink;
            if h < 1e-13 * t.abs().max(1.0) {
                return Err(IntegrationError::StiffnessFailure { r: t.exp(), h });
            }
            continue;
        }

        stats.accepted += 1;
        let t_new = if last { t_end } else { t + h };
        let dense = st.dense(t, h, &y);
        let (r_lo, r_hi) = (t.exp(), t_new.exp());

        if st.y_new[..len].iter().any(|&w| w <= 0.0) {
            let bracket = DenseBracket {
                dense: &dense,
                len,
                r_lo,
                r_hi,
                end: &st.y_new[..len],
            };
            let event = locate_wall_event(&bracket, c.eps_wall).unwrap_or_else(|| {
                let hit_index = (0..len)
                    .find(|&m| st.y_new[m] <= 0.0)
                    .expect("some component is nonpositive");
                WallEvent {
                    r0: r_hi,
                    hit_index,
                }
            });
            let theta0 = dense.theta_of(event.r0.ln());
            if record {
                // the partial step gets the same number of equal samples
                for j in 1..c.dense_samples {
                    let theta = theta0 * j as f64 / c.dense_samples as f64;
                    dense.eval_theta(theta, &mut sample);
                    let r = (t + theta * h).exp();
                    if r >= event.r0 || traj.grid.last().is_some_and(|&last| r <= last) {
                        continue;
                    }
                    let (w, dw) = split_state(&sample, len, r);
                    traj.push(r, &w, &dw);
                }
            }
            if theta0 >= 1.0 {
                sample.copy_from_slice(&st.y_new);
            } else {
                dense.eval_theta(theta0, &mut sample);
            }
            let (w, dw) = split_state(&sample, len, event.r0);
            if record && traj.grid.last().is_none_or(|&r| event.r0 > r) {
                traj.push(event.r0, &w, &dw);
            }
            return Ok(Integration {
                trajectory: traj,
                outcome: Outcome::WallHit {
                    r0: event.r0,
                    hit_index: event.hit_index,
                    state: w,
                },
                stats,
            });
        }

        if record {
            for j in 1..=c.dense_samples {
                let theta = j as f64 / c.dense_samples as f64;
                let r = if j == c.dense_samples {
                    sample.copy_from_slice(&st.y_new);
                    r_hi
                } else {
                    dense.eval_theta(theta, &mut sample);
                    (t + theta * h).exp()
                };
                let (w, dw) = split_state(&sample, len, r);
                traj.push(r, &w, &dw);
            }
        }

        let slope = (0..len)
            .map(|m| st.y_new[len + m] / r_hi)
            .fold(f64::NEG_INFINITY, f64::max);
        stats.max_positive_slope = stats.max_positive_slope.max(slope);

        t = t_new;
        y.copy_from_slice(&st.y_new);
        st.k1.copy_from_slice(&st.k7);

        let r = r_hi;
        if r > decay_radius && y[..len].iter().all(|&w| w < c.eps_decay) {
            return Ok(Integration {
                trajectory: traj,
                outcome: Outcome::Decayed {
                    r_end: r,
                    limit: y[..len].to_vec(),
                },
                stats,
            });
        }
        if last {
            return Ok(Integration {
                trajectory: traj,
                outcome: Outcome::Truncated {
                    r_end: r,
                    state: y[..len].to_vec(),
                },
                stats,
            });
        }

        let fac11 = err.powf(EXPO1);
        let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        facold = err.max(1e-4);
        h = (h / fac).min(c.max_log_step);
    }
}

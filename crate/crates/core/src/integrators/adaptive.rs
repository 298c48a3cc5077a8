//! Fixed-step and error-controlled drivers.

use super::Scheme;
use crate::actions::{FrozenFieldMap, HomogeneousAction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ControllerConfig {
    pub tol: f64,
    /// Safety factor θ in `(0, 1)`.
    pub theta: f64,
    /// Exponent α; `None` means `1/(1 + min(p, p̂))` for the scheme in use.
    pub alpha: Option<f64>,
    pub h0: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Consecutive rejections allowed before giving up.
    pub max_rejects: usize,
}

impl ControllerConfig {
    pub fn new(tol: f64, h0: f64) -> Self {
        Self {
            tol,
            theta: 0.9,
            alpha: None,
            h0,
            h_min: 1e-12,
            h_max: 1.0,
            max_rejects: 50,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::Config(format!(
                "theta must lie in (0, 1), got {}",
                self.theta
            )));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_max) {
            return Err(Error::Config(format!(
                "need 0 < h_min <= h_max, got {} and {}",
                self.h_min, self.h_max
            )));
        }
        if !(self.h0 > 0.0) {
            return Err(Error::Config(format!(
                "initial step must be positive, got {}",
                self.h0
            )));
        }
        Ok(())
    }
}

/// `clamp(θ (tol/e)^α h, h_min, h_max)`; a zero estimate gives `h_max`, a
/// non-finite one `h_min`.
pub fn controller_update(h: f64, e: f64, cfg: &ControllerConfig, alpha: f64) -> f64 {
    if e <= 0.0 {
        return cfg.h_max;
    }
    if !e.is_finite() {
        return cfg.h_min;
    }
    (cfg.theta * (cfg.tol / e).powf(alpha) * h).clamp(cfg.h_min, cfg.h_max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepLog {
    pub t: f64,
    pub h: f64,
    pub error: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug)]
pub struct Trajectory<P> {
    pub times: Vec<f64>,
    pub states: Vec<P>,
}

impl<P> Trajectory<P> {
    pub fn last(&self) -> &P {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

#[derive(Clone, Debug)]
pub struct AdaptiveRun<P> {
    pub trajectory: Trajectory<P>,
    pub log: Vec<StepLog>,
    pub rejects: usize,
}

impl<P> AdaptiveRun<P> {
    pub fn accepted_steps(&self) -> usize {
        self.trajectory.states.len() - 1
    }
}

pub fn fixed_integrate<A, F>(
    action: &A,
    f: &F,
    scheme: &Scheme,
    y0: &A::Point,
    t0: f64,
    t_end: f64,
    n_steps: usize,
) -> Result<Trajectory<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    if n_steps == 0 {
        return Err(Error::Config("n_steps must be at least 1".into()));
    }
    let h = (t_end - t0) / n_steps as f64;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut states = Vec::with_capacity(n_steps + 1);
    times.push(t0);
    states.push(y0.clone());
    let mut y = y0.clone();
    for k in 0..n_steps {
        let t = t0 + k as f64 * h;
        y = scheme.step(action, f, t, &y, h)?.y_next;
        times.push(if k + 1 == n_steps {
            t_end
        } else {
            t0 + (k + 1) as f64 * h
        });
        states.push(y.clone());
    }
    Ok(Trajectory { times, states })
}

pub fn adaptive_integrate<A, F>(
    action: &A,
    f: &F,
    scheme: &Scheme,
    y0: &A::Point,
    t0: f64,
    t_end: f64,
    cfg: &ControllerConfig,
) -> Result<AdaptiveRun<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    cfg.validate()?;
    let p_hat = scheme
        .embedded_order()
        .ok_or_else(|| Error::Config(format!("{scheme:?} has no embedded error estimate")))?;
    let alpha = cfg
        .alpha
        .unwrap_or(1.0 / (1 + scheme.order().min(p_hat)) as f64);

    let mut times = vec![t0];
    let mut states = vec![y0.clone()];
    let mut log = Vec::new();
    let mut rejects = 0;
    let mut consecutive = 0;
    let mut t = t0;
    let mut y = y0.clone();
    let mut h = cfg.h0.min(cfg.h_max);
    while t < t_end {
        let remaining = t_end - t;
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        // A step whose algebra element leaves the branch of the exact
        // dexpinv is too long; reject it and shrink rather than fail.
        let (r, e) = match scheme.step(action, f, t, &y, h_try) {
            Ok(r) => {
                let e = r.error_estimate.unwrap_or(0.0);
                (Some(r), e)
            }
            Err(Error::Branch(_)) => (None, f64::INFINITY),
            Err(other) => return Err(other),
        };
        let accepted = e <= cfg.tol;
        log.push(StepLog {
            t,
            h: h_try,
            error: e,
            accepted,
        });
        if accepted {
            t = if last { t_end } else { t + h_try };
            y = r.expect("accepted steps succeeded").y_next;
            times.push(t);
            states.push(y.clone());
            consecutive = 0;
        } else {
            rejects += 1;
            consecutive += 1;
            if h_try <= cfg.h_min {
                return Err(Error::StepUnderflow { t, h: h_try });
            }
            if consecutive > cfg.max_rejects {
                return Err(Error::TooManyRejects {
                    t,
                    rejects: consecutive,
                });
            }
        }
        h = if e.is_finite() {
            controller_update(h_try, e, cfg, alpha)
        } else {
            (0.25 * h_try).max(cfg.h_min)
        };
    }
    Ok(AdaptiveRun {
        trajectory: Trajectory { times, states },
        log,
        rejects,
    })
}

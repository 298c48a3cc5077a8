//! Convergence studies: step-size ladders, reference solutions and fitted
//! orders. Ladder rungs are independent and run on the rayon pool when the
//! `parallel` feature is on.

use nalgebra::DVector;

use crate::actions::{FrozenFieldMap, HomogeneousAction};
use crate::error::{Error, Result};
use crate::integrators::{adaptive_integrate, ControllerConfig, Scheme};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

/// `items.map(f)`, collected in order, stopping at the first error.
pub fn map_runs<T, R, F>(items: &[T], exec: Execution, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Least-squares slope of `log e` against `log h`.
pub fn fit_slope(h: &[f64], e: &[f64]) -> Result<f64> {
    if h.len() != e.len() || h.len() < 2 {
        return Err(Error::Config("need at least two (h, error) pairs".into()));
    }
    if h.iter().chain(e).any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::Config(
            "step sizes and errors must be positive and finite".into(),
        ));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// Step counts `n₀·2^k` for `k` in `ks`, i.e. `h = h₀·2^{−k}` with `h₀ = T/n₀`.
pub fn ladder_steps(n0: usize, ks: std::ops::RangeInclusive<u32>) -> Vec<usize> {
    ks.map(|k| n0 << k).collect()
}

/// Solution at `t_end` from the embedded RKMK(5,4) pair at tolerance `tol`,
/// with steps capped at `h_max`.
pub fn reference_solution<A, F>(
    action: &A,
    f: &F,
    y0: &A::Point,
    t0: f64,
    t_end: f64,
    tol: f64,
    h_max: f64,
) -> Result<A::Point>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let mut cfg = ControllerConfig::new(tol, h_max.min(1e-3 * (t_end - t0)));
    cfg.h_max = h_max;
    cfg.h_min = 1e-14 * (t_end - t0);
    let run = adaptive_integrate(action, f, &Scheme::rkmk54(), y0, t0, t_end, &cfg)?;
    Ok(run.trajectory.last().clone())
}

/// Which of the two solutions of an embedded pair to propagate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Propagate {
    Main,
    Auxiliary,
}

/// `n` uniform steps, propagating either the main or the auxiliary solution.
pub fn integrate_to<A, F>(
    action: &A,
    f: &F,
    scheme: &Scheme,
    y0: &A::Point,
    t0: f64,
    t_end: f64,
    n: usize,
    which: Propagate,
) -> Result<A::Point>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    if n == 0 {
        return Err(Error::Config("n_steps must be at least 1".into()));
    }
    let h = (t_end - t0) / n as f64;
    let mut y = y0.clone();
    for k in 0..n {
        let r = scheme.step(action, f, t0 + k as f64 * h, &y, h)?;
        y = match which {
            Propagate::Main => r.y_next,
            Propagate::Auxiliary => r
                .y_aux
                .ok_or_else(|| Error::Config(format!("{scheme:?} has no auxiliary solution")))?,
        };
    }
    Ok(y)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ladder {
    pub label: String,
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

impl Ladder {
    pub fn from_errors(label: impl Into<String>, h: Vec<f64>, errors: Vec<f64>) -> Result<Self> {
        let slope = fit_slope(&h, &errors)?;
        Ok(Self {
            label: label.into(),
            h,
            errors,
            slope,
        })
    }
}

/// Global errors at `t_end` in the ambient Euclidean norm for each step count.
#[allow(clippy::too_many_arguments)]
pub fn scheme_ladder<A, F>(
    action: &A,
    f: &F,
    scheme: &Scheme,
    y0: &A::Point,
    t0: f64,
    t_end: f64,
    reference: &DVector<f64>,
    steps: &[usize],
    which: Propagate,
    exec: Execution,
) -> Result<Vec<f64>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    map_runs(steps, exec, |&n| {
        let y = integrate_to(action, f, scheme, y0, t0, t_end, n, which)?;
        Ok((action.coords(&y) - reference).norm())
    })
}

/// Time span and base step count `n₀` (`h₀ = T/n₀`) of an order study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderPlan {
    pub t_end: f64,
    pub n0: usize,
}

/// Tuned plans for the benchmark problems: every rung of `h₀·2^{−4…−9}`
/// sits in the asymptotic regime and above the round-off floor of a
/// `tol = 1e−12` reference. `theta` applies to `method = "symplectic"`.
pub fn ladder_plan(system: &str, method: &str, theta: f64) -> Result<LadderPlan> {
    let order = match method {
        "symplectic" if theta == 0.5 => 2,
        "symplectic" => 1,
        m => Scheme::from_name(m)?.order(),
    };
    let plan = |t_end, n0| Ok(LadderPlan { t_end, n0 });
    match system {
        s if s.starts_with("heavytop") => match (method, order) {
            ("symplectic", 1) => plan(0.25, 16),
            ("symplectic", _) => plan(0.25, 4),
            (_, 1) => plan(0.25, 256),
            (_, 2) => plan(0.25, 16),
            _ => plan(0.25, 4),
        },
        "pendulum" => match order {
            1 => plan(2.0, 96),
            2 | 3 => plan(2.0, 12),
            4 => plan(2.0, 6),
            _ => plan(2.0, 3),
        },
        "quadrotor" => match order {
            1 => plan(2.0, 256),
            2 => plan(2.0, 32),
            _ => plan(2.0, 8),
        },
        other => Err(Error::Config(format!(
            "no ladder plan for system '{other}'"
        ))),
    }
}

pub fn step_sizes(t0: f64, t_end: f64, steps: &[usize]) -> Vec<f64> {
    steps.iter().map(|&n| (t_end - t0) / n as f64).collect()
}

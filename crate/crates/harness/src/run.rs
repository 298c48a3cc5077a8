//! Simulation, adaptivity and order-study drivers behind the CLI.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use lgi_core::actions::{ExtTopState, HomogeneousAction, RotorState};
use lgi_core::integrators::symplectic::{symplectic_integrate, So3Group, So3TimesR3, SolveConfig};
use lgi_core::integrators::{adaptive_integrate, ControllerConfig, Scheme};
use lgi_core::kernels::{Mat3, Vec3};
use lgi_core::study::{
    fit_slope, ladder_plan, ladder_steps, map_runs, reference_solution, scheme_ladder, step_sizes,
    Execution, Propagate,
};
use lgi_core::systems::{
    ConstantControls, HeavyTopBody, HeavyTopExt, HeavyTopLiePoisson, HeavyTopParams,
    HeavyTopSpatial, Pendulum, PendulumParams, PointOf, QuadParams, Quadrotor, System,
    ZeroControls,
};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ControlsId, Mode, RunConfig, SystemId};
use crate::output::Table;

/// Tolerance of the self-reference in order studies.
pub const REFERENCE_TOL: f64 = 1e-12;

/// `(θ, h, n, y₀) ↦` the `n + 1` states of a symplectic run.
type SympFn<'a, P> = dyn Fn(f64, f64, usize, &P) -> Result<Vec<P>> + Sync + 'a;

/// Something to do with a concrete system.
trait Visit {
    type Out;
    fn visit<S: System>(self, sys: &S, symp: Option<&SympFn<'_, PointOf<S>>>) -> Result<Self::Out>;
}

pub fn top_params(cfg: &RunConfig) -> Result<HeavyTopParams> {
    let mut p = HeavyTopParams::bruls();
    let o = &cfg.overrides;
    if let Some(m) = o.mass {
        p.mass = m;
    }
    if let Some(l) = o.length {
        p.length = l;
    }
    if let Some(g) = o.gravity {
        p.gravity = g;
    }
    if let Some(i) = o.inertia {
        // keep the initial angular velocity, not the initial momentum
        let w0 = p.pi0.component_div(&p.inertia);
        p.inertia = Vec3::from(i);
        p.pi0 = p.inertia.component_mul(&w0);
    }
    if o.links.is_some() {
        bail!("`links` applies to the pendulum only");
    }
    p.validate()?;
    Ok(p)
}

pub fn pendulum_params(cfg: &RunConfig) -> Result<PendulumParams> {
    let o = &cfg.overrides;
    if o.inertia.is_some() {
        bail!("`inertia` does not apply to the pendulum");
    }
    let mut p = PendulumParams::uniform(o.links.unwrap_or(2));
    if let Some(m) = o.mass {
        p.masses.iter_mut().for_each(|x| *x = m);
    }
    if let Some(l) = o.length {
        p.lengths.iter_mut().for_each(|x| *x = l);
    }
    if let Some(g) = o.gravity {
        p.gravity = g;
    }
    p.validate()?;
    Ok(p)
}

pub fn quad_params(cfg: &RunConfig) -> Result<QuadParams> {
    let o = &cfg.overrides;
    if o.links.is_some() {
        bail!("`links` applies to the pendulum only");
    }
    let mut p = QuadParams::default();
    if let Some(m) = o.mass {
        p.payload_mass = m;
    }
    if let Some(l) = o.length {
        p.lengths = [l, l];
    }
    if let Some(g) = o.gravity {
        p.gravity = g;
    }
    if let Some(i) = o.inertia {
        let j = Mat3::from_diagonal(&Vec3::from(i));
        p.inertia = [j, j];
    }
    p.validate()?;
    Ok(p)
}

fn mu3(v: &Vec3) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

fn dispatch<V: Visit>(cfg: &RunConfig, v: V) -> Result<V::Out> {
    let solve = SolveConfig::default();
    match cfg.system() {
        SystemId::HeavyTopBody => v.visit(&HeavyTopBody::new(top_params(cfg)?), None),
        SystemId::HeavyTopLiePoisson => v.visit(&HeavyTopLiePoisson::new(top_params(cfg)?), None),
        SystemId::HeavyTopSpatial => {
            let sys = HeavyTopSpatial::new(top_params(cfg)?);
            let symp = |theta: f64, h: f64, n: usize, y0: &RotorState| -> Result<Vec<RotorState>> {
                let out =
                    symplectic_integrate(&So3Group, &sys, theta, &y0.q, &mu3(&y0.m), h, n, &solve)?;
                Ok(out
                    .into_iter()
                    .map(|(q, mu)| RotorState {
                        q,
                        m: Vec3::new(mu[0], mu[1], mu[2]),
                    })
                    .collect())
            };
            v.visit(&sys, Some(&symp))
        }
        SystemId::HeavyTopExt => {
            let sys = HeavyTopExt::new(top_params(cfg)?);
            let symp =
                |theta: f64, h: f64, n: usize, y0: &ExtTopState| -> Result<Vec<ExtTopState>> {
                    let g0 = (y0.rotor.q, y0.qvec);
                    let m0 =
                        DVector::from_iterator(6, y0.rotor.m.iter().chain(y0.p.iter()).copied());
                    let out =
                        symplectic_integrate(&So3TimesR3, &sys, theta, &g0, &m0, h, n, &solve)?;
                    Ok(out
                        .into_iter()
                        .map(|((q, qvec), mu)| ExtTopState {
                            rotor: RotorState {
                                q,
                                m: Vec3::new(mu[0], mu[1], mu[2]),
                            },
                            qvec,
                            p: Vec3::new(mu[3], mu[4], mu[5]),
                        })
                        .collect())
                };
            v.visit(&sys, Some(&symp))
        }
        SystemId::Pendulum => v.visit(&Pendulum::new(pendulum_params(cfg)?)?, None),
        SystemId::Quadrotor => {
            let p = quad_params(cfg)?;
            match cfg.controls {
                ControlsId::None => v.visit(&Quadrotor::uncontrolled(p)?, None),
                ControlsId::Hover => {
                    let c =
                        ConstantControls::hover(&p, &Quadrotor::<ZeroControls>::default_initial())?;
                    v.visit(&Quadrotor::new(p, c)?, None)
                }
            }
        }
    }
}

/// The system's initial state, moved by `exp(ξ)` with a seeded random `ξ`
/// of size `perturb` when asked to. The result stays on the manifold.
fn initial<S: System>(sys: &S, cfg: &RunConfig) -> PointOf<S> {
    let y0 = sys.initial_state();
    if cfg.perturb == 0.0 {
        return y0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let a = sys.action();
    let xi = DVector::from_fn(a.algebra().dim(), |_, _| {
        cfg.perturb * rng.gen_range(-1.0..1.0)
    });
    a.exp_act(&xi, &y0)
}

fn prepare_out(cfg: &RunConfig) -> Result<PathBuf> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    Ok(cfg.out.clone())
}

fn meta(cfg: &RunConfig, command: &str) -> Vec<String> {
    let mut m = vec![format!("lgi {command}")];
    m.extend(cfg.echo());
    m
}

/// Trajectory and invariant tables from a list of `(t, h, state)` rows.
fn trajectory_tables<S: System>(
    sys: &S,
    cfg: &RunConfig,
    command: &str,
    rows: &[(f64, f64, PointOf<S>)],
) -> (Table, Table) {
    let a = sys.action();
    let dim = rows.first().map(|r| a.coords(&r.2).len()).unwrap_or(0);
    let mut header = vec!["t".to_string(), "h".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    let mut traj = Table::new(meta(cfg, command), header);
    let mut header = vec!["t".to_string()];
    header.extend(sys.invariant_names());
    let mut inv = Table::new(meta(cfg, command), header);
    for (t, h, y) in rows {
        let mut r = vec![*t, *h];
        r.extend(a.coords(y).iter());
        traj.push(r);
        let mut r = vec![*t];
        r.extend(sys.invariants(y));
        inv.push(r);
    }
    (traj, inv)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

struct Simulate<'a>(&'a RunConfig);

impl Visit for Simulate<'_> {
    type Out = Summary;

    fn visit<S: System>(self, sys: &S, symp: Option<&SympFn<'_, PointOf<S>>>) -> Result<Summary> {
        let cfg = self.0;
        let n = cfg.n_steps();
        let (t0, t_end) = (cfg.t0, cfg.t_end());
        let h = (t_end - t0) / n as f64;
        let time = |k: usize| if k == n { t_end } else { t0 + k as f64 * h };
        let y0 = initial(sys, cfg);
        let mut rows = vec![(t0, 0.0, y0.clone())];
        if cfg.methods[0] == "symplectic" {
            let symp =
                symp.ok_or_else(|| anyhow!("no symplectic formulation for {}", cfg.system()))?;
            let states = symp(cfg.theta, h, n, &y0)?;
            rows.extend(
                states
                    .into_iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, y)| (time(k), h, y)),
            );
        } else {
            let scheme = Scheme::from_name(&cfg.methods[0])?;
            let mut y = y0;
            for k in 0..n {
                let t = time(k);
                y = scheme
                    .step(sys.action(), sys, t, &y, h)
                    .with_context(|| format!("step {} at t = {t}", k + 1))?
                    .y_next;
                rows.push((time(k + 1), h, y.clone()));
            }
        }
        let (traj, inv) = trajectory_tables(sys, cfg, "simulate", &rows);
        let dir = prepare_out(cfg)?;
        let files = vec![dir.join("trajectory.csv"), dir.join("invariants.csv")];
        traj.write(&files[0])?;
        inv.write(&files[1])?;
        let mut lines = vec![format!("{n} steps of h = {h:e} on {}", cfg.system())];
        for (j, name) in sys.invariant_names().iter().enumerate() {
            let col: Vec<f64> = inv.rows.iter().map(|r| r[j + 1]).collect();
            let drift = col.iter().map(|v| (v - col[0]).abs()).fold(0.0, f64::max);
            lines.push(format!("max |{name} - {name}(t0)| = {drift:.3e}"));
        }
        Ok(Summary { files, lines })
    }
}

struct Adapt<'a>(&'a RunConfig);

impl Visit for Adapt<'_> {
    type Out = Summary;

    fn visit<S: System>(self, sys: &S, _symp: Option<&SympFn<'_, PointOf<S>>>) -> Result<Summary> {
        let cfg = self.0;
        let (t0, t_end) = (cfg.t0, cfg.t_end());
        let scheme = Scheme::from_name(&cfg.methods[0])?;
        let h0 = match (cfg.h0, cfg.h, cfg.steps) {
            (Some(h0), _, _) | (None, Some(h0), _) => h0,
            (None, None, Some(n)) => (t_end - t0) / n as f64,
            (None, None, None) => 1e-2 * (t_end - t0),
        };
        let mut c = ControllerConfig::new(cfg.tol, h0);
        c.theta = cfg.safety;
        c.alpha = cfg.alpha;
        c.h_max = t_end - t0;
        c.h_min = 1e-14 * (t_end - t0);
        let y0 = initial(sys, cfg);
        let run = adaptive_integrate(sys.action(), sys, &scheme, &y0, t0, t_end, &c)?;
        let times = &run.trajectory.times;
        let rows: Vec<_> = run
            .trajectory
            .states
            .iter()
            .enumerate()
            .map(|(k, y)| {
                (
                    times[k],
                    if k == 0 { 0.0 } else { times[k] - times[k - 1] },
                    y.clone(),
                )
            })
            .collect();
        let (traj, inv) = trajectory_tables(sys, cfg, "adapt", &rows);
        let mut steps = Table::new(
            meta(cfg, "adapt"),
            ["t", "h", "error", "accepted"].map(String::from).to_vec(),
        );
        for l in &run.log {
            steps.push(vec![l.t, l.h, l.error, if l.accepted { 1.0 } else { 0.0 }]);
        }
        let dir = prepare_out(cfg)?;
        let files = vec![
            dir.join("trajectory.csv"),
            dir.join("invariants.csv"),
            dir.join("steps.csv"),
        ];
        traj.write(&files[0])?;
        inv.write(&files[1])?;
        steps.write(&files[2])?;

        let mut lines = vec![format!(
            "{} accepted and {} rejected steps to t = {t_end}",
            run.accepted_steps(),
            run.rejects
        )];
        // The last accepted step is cut short to land on t_end.
        let accepted: Vec<_> = run.log.iter().filter(|l| l.accepted).collect();
        let interior = &accepted[..accepted.len().saturating_sub(1)];
        if let Some(m) = interior.iter().min_by(|a, b| a.h.total_cmp(&b.h)) {
            lines.push(format!(
                "smallest accepted step h = {:.4e} at t = {:.4}",
                m.h, m.t
            ));
        }
        Ok(Summary { files, lines })
    }
}

struct Converge<'a>(&'a RunConfig);

impl Visit for Converge<'_> {
    type Out = Summary;

    fn visit<S: System>(self, sys: &S, symp: Option<&SympFn<'_, PointOf<S>>>) -> Result<Summary> {
        let cfg = self.0;
        let system = cfg.system().name();
        let t0 = cfg.t0;
        let plan0 = ladder_plan(
            system,
            cfg.methods[0]
                .strip_suffix(":aux")
                .unwrap_or(&cfg.methods[0]),
            cfg.theta,
        )?;
        let t_end = cfg.t_end.unwrap_or(t0 + plan0.t_end);
        let a = sys.action();
        let y0 = initial(sys, cfg);
        let reference = reference_solution(a, sys, &y0, t0, t_end, REFERENCE_TOL, t_end - t0)
            .context("computing the reference solution")?;
        let rc = a.coords(&reference);

        let mut header = vec!["level".to_string()];
        let mut columns: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        let mut slopes = Vec::new();
        let ks = cfg.levels.0..=cfg.levels.1;
        for m in &cfg.methods {
            let base = m.strip_suffix(":aux").unwrap_or(m);
            let which = if base == m {
                Propagate::Main
            } else {
                Propagate::Auxiliary
            };
            let n0 = match cfg.n0 {
                Some(n0) => n0,
                None => ladder_plan(system, base, cfg.theta)?.n0,
            };
            let steps = ladder_steps(n0, ks.clone());
            let h = step_sizes(t0, t_end, &steps);
            let errors = (if base == "symplectic" {
                let symp = symp.ok_or_else(|| anyhow!("no symplectic formulation for {system}"))?;
                map_runs(&steps, Execution::Parallel, |&n| {
                    let out = symp(cfg.theta, (t_end - t0) / n as f64, n, &y0)
                        .map_err(|e| lgi_core::Error::Config(e.to_string()))?;
                    Ok((a.coords(out.last().expect("non-empty")) - &rc).norm())
                })
                .map_err(anyhow::Error::from)
            } else {
                let scheme = Scheme::from_name(base)?;
                scheme_ladder(
                    a,
                    sys,
                    &scheme,
                    &y0,
                    t0,
                    t_end,
                    &rc,
                    &steps,
                    which,
                    Execution::Parallel,
                )
                .map_err(anyhow::Error::from)
            })
            .with_context(|| {
                format!("{m} ladder, h from {:e} down to {:e}", h[0], h[h.len() - 1])
            })?;
            let slope = fit_slope(&h, &errors).unwrap_or(f64::NAN);
            let label = if base == "symplectic" {
                format!("symplectic(theta={})", cfg.theta)
            } else {
                m.clone()
            };
            slopes.push(format!("slope {label} = {slope:.4}"));
            header.push(format!("h:{label}"));
            header.push(format!("error:{label}"));
            columns.push((h, errors));
        }
        let mut meta = meta(cfg, "converge");
        meta.push(format!(
            "reference = rkmk54 adaptive, tol {REFERENCE_TOL:e}, t_end = {t_end}"
        ));
        meta.extend(slopes.iter().cloned());
        let mut table = Table::new(meta, header);
        for (i, k) in ks.enumerate() {
            let mut row = vec![k as f64];
            for (h, e) in &columns {
                row.push(h[i]);
                row.push(e[i]);
            }
            table.push(row);
        }
        let dir = prepare_out(cfg)?;
        let files = vec![dir.join("order.csv")];
        table.write(&files[0])?;
        Ok(Summary {
            files,
            lines: slopes,
        })
    }
}

pub fn run(cfg: &RunConfig) -> Result<Summary> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Fixed => dispatch(cfg, Simulate(cfg)),
        Mode::Adaptive => dispatch(cfg, Adapt(cfg)),
        Mode::Converge => dispatch(cfg, Converge(cfg)),
    }
}

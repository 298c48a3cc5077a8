//! The four heavy-top formulations describe the same motion. Map each to
//! body variables `(Π, Γ) = (Qᵀπ, QᵀΓ₀)` and compare.

use lgi_core::actions::RotorState;
use lgi_core::integrators::symplectic::{symplectic_integrate, So3Group, SolveConfig};
use lgi_core::integrators::{adaptive_integrate, ControllerConfig, Scheme};
use lgi_core::kernels::Vec3;
use lgi_core::lie::SO3;
use lgi_core::systems::{
    HeavyTopBody, HeavyTopExt, HeavyTopLiePoisson, HeavyTopParams, HeavyTopSpatial, PointOf, System,
};
use nalgebra::DVector;

const T: f64 = 0.5;

fn solve<S: System>(sys: &S) -> PointOf<S> {
    let cfg = ControllerConfig::new(1e-12, 1e-4);
    let run = adaptive_integrate(
        sys.action(),
        sys,
        &Scheme::rkmk54(),
        &sys.initial_state(),
        0.0,
        T,
        &cfg,
    )
    .unwrap();
    run.trajectory.last().clone()
}

fn body_vars(q: &SO3, pi: &Vec3, gamma0: &Vec3) -> (Vec3, Vec3) {
    let qt = q.matrix().transpose();
    (qt * pi, qt * gamma0)
}

fn close(a: (Vec3, Vec3), b: (Vec3, Vec3), tol: f64) {
    let d = (a.0 - b.0).norm().max((a.1 - b.1).norm());
    assert!(d < tol, "formulations differ by {d:.3e}");
}

#[test]
fn all_formulations_agree() {
    let prm = HeavyTopParams::bruls();
    let g0 = prm.gamma0;

    let b = solve(&HeavyTopBody::new(prm.clone()));
    let body = (b.m, b.q.matrix().transpose() * g0);

    let s = solve(&HeavyTopSpatial::new(prm.clone()));
    close(body, body_vars(&s.q, &s.m, &g0), 1e-8);

    let lp = solve(&HeavyTopLiePoisson::new(prm.clone()));
    close(body, (lp.pi, lp.gamma), 1e-8);

    let e = solve(&HeavyTopExt::new(prm.clone()));
    close(body, body_vars(&e.rotor.q, &e.rotor.m, &g0), 1e-8);
}

#[test]
fn symplectic_midpoint_tracks_the_body_solution() {
    let prm = HeavyTopParams::bruls();
    let sys = HeavyTopSpatial::new(prm.clone());
    let y0: RotorState = sys.initial_state();
    let n = 2000;
    let out = symplectic_integrate(
        &So3Group,
        &sys,
        0.5,
        &y0.q,
        &DVector::from_column_slice(y0.m.as_slice()),
        T / n as f64,
        n,
        &SolveConfig::default(),
    )
    .unwrap();
    let (q, mu) = out.last().unwrap();
    let b = solve(&HeavyTopBody::new(prm.clone()));
    let body = (b.m, b.q.matrix().transpose() * prm.gamma0);
    // Second order at h = 2.5e-4 on a top spinning at 150 rad/s.
    close(
        body,
        body_vars(q, &Vec3::new(mu[0], mu[1], mu[2]), &prm.gamma0),
        1e-2,
    );
}

//! Two quadrotors carrying a point mass on rigid massless links.
//!
//! The third inertial axis points along gravity, so the potential is
//! `U = −m_y g e₃ᵀy − Σ m_i g e₃ᵀ(y − L_i q_i)`.

use nalgebra::DVector;

use super::System;
use crate::actions::{FrozenFieldMap, QuadAction, QuadState, Ts2Point};
use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::kernels::{put_vec3, solve_dense, vec3_at, BlockMatrix, Mat3, Vec3};
use crate::lie::{hat, SO3};

const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct QuadParams {
    pub payload_mass: f64,
    pub masses: [f64; 2],
    pub lengths: [f64; 2],
    pub inertia: [Mat3; 2],
    pub gravity: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        let j = Mat3::from_diagonal(&Vec3::new(0.0820, 0.0845, 0.1377));
        Self {
            payload_mass: 1.0,
            masses: [1.5, 1.5],
            lengths: [1.0, 1.0],
            inertia: [j, j],
            gravity: 9.81,
        }
    }
}

impl QuadParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.payload_mass > 0.0)
            || self.masses.iter().chain(&self.lengths).any(|x| !(*x > 0.0))
        {
            return Err(Error::Config("masses and lengths must be positive".into()));
        }
        for j in &self.inertia {
            if (j - j.transpose()).norm() > 1e-14 * j.norm() || j.cholesky().is_none() {
                return Err(Error::Config(
                    "quadrotor inertia must be symmetric positive definite".into(),
                ));
            }
        }
        Ok(())
    }

    /// `M_q = m_y I + Σ m_i q_i q_iᵀ`.
    pub fn mq(&self, q: &[Vec3; 2]) -> Mat3 {
        Mat3::identity() * self.payload_mass
            + q[0] * q[0].transpose() * self.masses[0]
            + q[1] * q[1].transpose() * self.masses[1]
    }
}

/// Thrust vectors `u_i` and moments `M_i` as functions of time and state.
pub trait Controls: Sync {
    fn eval(&self, t: f64, s: &QuadState) -> ([Vec3; 2], [Vec3; 2]);
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroControls;

impl Controls for ZeroControls {
    fn eval(&self, _t: f64, _s: &QuadState) -> ([Vec3; 2], [Vec3; 2]) {
        ([Vec3::zeros(); 2], [Vec3::zeros(); 2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantControls {
    pub u: [Vec3; 2],
    pub m: [Vec3; 2],
}

impl ConstantControls {
    /// Thrusts along the links that cancel the payload acceleration in a
    /// state at rest.
    pub fn hover(params: &QuadParams, s: &QuadState) -> Result<Self> {
        let q = [s.link[0].q, s.link[1].q];
        // Σ λ_i q_i = −M_q g e₃ with λ_1 = λ_2 needs M_q e₃ ∥ q₁ + q₂
        let sum = q[0] + q[1];
        let target = -(params.mq(&q) * E3) * params.gravity;
        let lambda = target.dot(&sum) / sum.norm_squared();
        if (sum * lambda - target).norm() > 1e-12 * (1.0 + target.norm()) {
            return Err(Error::Config(
                "links are not arranged symmetrically for hover".into(),
            ));
        }
        Ok(Self {
            u: [q[0] * lambda, q[1] * lambda],
            m: [Vec3::zeros(); 2],
        })
    }
}

impl Controls for ConstantControls {
    fn eval(&self, _t: f64, _s: &QuadState) -> ([Vec3; 2], [Vec3; 2]) {
        (self.u, self.m)
    }
}

/// `u∥ = qqᵀu`, `u⊥ = (I − qqᵀ)u`.
pub fn split_thrust(q: &Vec3, u: &Vec3) -> (Vec3, Vec3) {
    let par = q * q.dot(u);
    (par, u - par)
}

pub struct Quadrotor<C: Controls = ZeroControls> {
    pub params: QuadParams,
    pub controls: C,
    pub initial: QuadState,
    action: QuadAction,
}

impl Quadrotor<ZeroControls> {
    pub fn uncontrolled(params: QuadParams) -> Result<Self> {
        Self::new(params, ZeroControls)
    }
}

impl<C: Controls> Quadrotor<C> {
    pub fn new(params: QuadParams, controls: C) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            controls,
            initial: Self::default_initial(),
            action: QuadAction::default(),
        })
    }

    /// Links at 30° either side of the vertical, with some motion in every
    /// component so that all couplings are exercised.
    pub fn default_initial() -> QuadState {
        let (s, c) = (std::f64::consts::FRAC_PI_6).sin_cos();
        QuadState {
            y: Vec3::zeros(),
            v: Vec3::new(0.5, 0.0, -0.2),
            r: [SO3::identity(); 2],
            big_omega: [Vec3::new(0.1, -0.2, 0.3), Vec3::new(-0.1, 0.05, 0.2)],
            link: [
                Ts2Point {
                    q: Vec3::new(s, 0.0, c),
                    omega: Vec3::new(0.0, 0.5, 0.0),
                },
                Ts2Point {
                    q: Vec3::new(-s, 0.0, c),
                    omega: Vec3::new(0.0, -0.3, 0.0),
                },
            ],
        }
    }

    /// `A(z)` and `h(z)` of `A(z) ż = h(z)`, `z = [y, v, Ω₁, Ω₂, ω₁, ω₂]`.
    pub fn assemble(&self, t: f64, s: &QuadState) -> (BlockMatrix, DVector<f64>) {
        let p = &self.params;
        let q = [s.link[0].q, s.link[1].q];
        let (u, moment) = self.controls.eval(t, s);
        let mut a = BlockMatrix::identity(6);
        a.set_block(1, 1, &p.mq(&q));
        a.set_block(2, 2, &p.inertia[0]);
        a.set_block(3, 3, &p.inertia[1]);
        for i in 0..2 {
            a.set_block(4 + i, 1, &(-hat(&q[i]) / p.lengths[i]));
        }

        let mut h = DVector::zeros(18);
        let hs = h.as_mut_slice();
        put_vec3(hs, 0, &s.v);
        let mut h2 = p.mq(&q) * E3 * p.gravity;
        for i in 0..2 {
            let (par, _) = split_thrust(&q[i], &u[i]);
            h2 += par - q[i] * (p.masses[i] * p.lengths[i] * s.link[i].omega.norm_squared());
        }
        put_vec3(hs, 3, &h2);
        for i in 0..2 {
            let w = &s.big_omega[i];
            put_vec3(hs, 6 + 3 * i, &(moment[i] - w.cross(&(p.inertia[i] * w))));
            let (_, perp) = split_thrust(&q[i], &u[i]);
            let hi = -(q[i].cross(&E3)) * (p.gravity / p.lengths[i])
                - q[i].cross(&perp) / (p.masses[i] * p.lengths[i]);
            put_vec3(hs, 12 + 3 * i, &hi);
        }
        (a, h)
    }

    /// `ż = A(z)⁻¹h(z)`.
    pub fn z_dot(&self, t: f64, s: &QuadState) -> Result<DVector<f64>> {
        let (a, h) = self.assemble(t, s);
        solve_dense(&a, &h)
    }

    pub fn kinetic_energy(&self, s: &QuadState) -> f64 {
        let p = &self.params;
        let mut t = 0.5 * p.payload_mass * s.v.norm_squared();
        for i in 0..2 {
            let l = &s.link[i];
            let vi = s.v - l.omega.cross(&l.q) * p.lengths[i];
            let w = &s.big_omega[i];
            t += 0.5 * (p.masses[i] * vi.norm_squared() + w.dot(&(p.inertia[i] * w)));
        }
        t
    }

    pub fn potential_energy(&self, s: &QuadState) -> f64 {
        let p = &self.params;
        let mut u = -p.payload_mass * p.gravity * E3.dot(&s.y);
        for i in 0..2 {
            u -= p.masses[i] * p.gravity * E3.dot(&(s.y - s.link[i].q * p.lengths[i]));
        }
        u
    }

    pub fn energy(&self, s: &QuadState) -> f64 {
        self.kinetic_energy(s) + self.potential_energy(s)
    }
}

impl<C: Controls> FrozenFieldMap<QuadState> for Quadrotor<C> {
    fn eval(&self, t: f64, s: &QuadState) -> Result<AlgebraVector> {
        let zd = self.z_dot(t, s)?;
        let z = zd.as_slice();
        let mut f = DVector::zeros(30);
        let fs = f.as_mut_slice();
        fs[0..6].copy_from_slice(&z[0..6]);
        for i in 0..2 {
            put_vec3(fs, QuadAction::ETA[2 * i], &s.r[i].apply(&s.big_omega[i]));
            put_vec3(fs, QuadAction::ETA[2 * i + 1], &vec3_at(z, 6 + 3 * i));
            let l = &s.link[i];
            put_vec3(fs, QuadAction::MU[i], &l.omega);
            put_vec3(
                fs,
                QuadAction::MU[i] + 3,
                &l.q.cross(&vec3_at(z, 12 + 3 * i)),
            );
        }
        Ok(f)
    }
}

impl<C: Controls> System for Quadrotor<C> {
    type Action = QuadAction;

    fn action(&self) -> &QuadAction {
        &self.action
    }

    fn initial_state(&self) -> QuadState {
        self.initial
    }

    fn direct_rhs(&self, t: f64, s: &QuadState) -> Result<DVector<f64>> {
        let zd = self.z_dot(t, s)?;
        let z = zd.as_slice();
        let mut out = Vec::with_capacity(48);
        out.extend_from_slice(&z[0..6]);
        for i in 0..2 {
            let dr = s.r[i].matrix() * hat(&s.big_omega[i]);
            out.extend_from_slice(&crate::kernels::mat3_row_major(&dr));
            out.extend_from_slice(&z[6 + 3 * i..9 + 3 * i]);
        }
        for i in 0..2 {
            let l = &s.link[i];
            out.extend_from_slice(l.omega.cross(&l.q).as_slice());
            out.extend_from_slice(&z[12 + 3 * i..15 + 3 * i]);
        }
        Ok(DVector::from_vec(out))
    }

    fn invariant_names(&self) -> Vec<String> {
        ["energy", "link_norm_defect", "orthogonality"]
            .map(String::from)
            .to_vec()
    }

    fn invariants(&self, s: &QuadState) -> Vec<f64> {
        vec![
            self.energy(s),
            s.link.iter().map(Ts2Point::norm_defect).fold(0.0, f64::max),
            s.r.iter()
                .map(SO3::orthogonality_defect)
                .fold(0.0, f64::max),
        ]
    }
}

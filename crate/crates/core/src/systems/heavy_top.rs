//! The heavy top: a rigid body with one fixed point in a uniform field.

use nalgebra::DVector;

use super::System;
use crate::actions::{
    BodyTopAction, CoadjointSe3, ExtTopAction, ExtTopState, FrozenFieldMap, RotorState,
    SemidirectCotangent,
};
use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::integrators::symplectic::HamiltonianMap;
use crate::kernels::{mat3_row_major, Mat3, Vec3};
use crate::lie::{hat, Se3Dual, SO3};

#[derive(Clone, Debug, PartialEq)]
pub struct HeavyTopParams {
    /// Principal moments of inertia (diagonal of 𝕀).
    pub inertia: Vec3,
    pub mass: f64,
    pub gravity: f64,
    pub length: f64,
    /// Body-fixed unit vector from the fixed point to the centre of mass.
    pub chi: Vec3,
    /// Spatial axis along the field.
    pub gamma0: Vec3,
    /// Initial spatial momentum.
    pub pi0: Vec3,
    pub q0: SO3,
}

impl HeavyTopParams {
    /// The standard fast top: `Q(0) = I`, `ℓ = 2`, `M = 15`, `Γ₀ = (0, 0, −9.81)`.
    ///
    /// `Γ₀` already carries the magnitude of the gravitational acceleration,
    /// so the separate factor `g` is 1.
    pub fn bruls() -> Self {
        let inertia = Vec3::new(0.234375, 0.46875, 0.234375);
        Self {
            inertia,
            mass: 15.0,
            gravity: 1.0,
            length: 2.0,
            chi: Vec3::new(0.0, 1.0, 0.0),
            gamma0: Vec3::new(0.0, 0.0, -9.81),
            pi0: inertia.component_mul(&Vec3::new(0.0, 150.0, -4.61538)),
            q0: SO3::identity(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.inertia.iter().any(|i| !(*i > 0.0)) {
            return Err(Error::Config("inertia must be positive".into()));
        }
        if ((self.chi.norm()) - 1.0).abs() > 1e-12 {
            return Err(Error::Config("body axis must be a unit vector".into()));
        }
        if !(self.mass > 0.0 && self.length > 0.0) {
            return Err(Error::Config("mass and length must be positive".into()));
        }
        Ok(())
    }

    /// `Mgℓ`.
    pub fn weight_arm(&self) -> f64 {
        self.mass * self.gravity * self.length
    }

    pub fn inertia_inv(&self) -> Mat3 {
        Mat3::from_diagonal(&self.inertia.map(|i| 1.0 / i))
    }

    /// Spatial angular velocity `ω = Q𝕀⁻¹Qᵀπ`.
    pub fn omega(&self, q: &SO3, pi: &Vec3) -> Vec3 {
        q.matrix() * self.inertia_inv() * q.matrix().transpose() * pi
    }

    /// `H(Q, Π) = ½ Π·𝕀⁻¹Π + Mgℓ Γ·𝒳`, `Γ = QᵀΓ₀`.
    pub fn energy_body(&self, q: &SO3, big_pi: &Vec3) -> f64 {
        let gamma = q.matrix().transpose() * self.gamma0;
        0.5 * big_pi.dot(&(self.inertia_inv() * big_pi)) + self.weight_arm() * gamma.dot(&self.chi)
    }

    pub fn energy_spatial(&self, q: &SO3, pi: &Vec3) -> f64 {
        self.energy_body(q, &(q.matrix().transpose() * pi))
    }

    /// `H(Π, Γ) = ½ Π·𝕀⁻¹Π + Mgℓ Γ·𝒳`.
    pub fn energy_lie_poisson(&self, mu: &Se3Dual) -> f64 {
        0.5 * mu.pi.dot(&(self.inertia_inv() * mu.pi)) + self.weight_arm() * mu.gamma.dot(&self.chi)
    }
}

fn pack(parts: &[&Vec3]) -> DVector<f64> {
    DVector::from_iterator(
        3 * parts.len(),
        parts.iter().flat_map(|v| v.iter().copied()),
    )
}

fn rotor_rhs(dq: &Mat3, dm: &Vec3) -> DVector<f64> {
    let mut v = mat3_row_major(dq).to_vec();
    v.extend_from_slice(dm.as_slice());
    DVector::from_vec(v)
}

/// Body formulation on `SO(3) × ℝ³` with state `(Q, Π)`.
#[derive(Clone, Debug)]
pub struct HeavyTopBody {
    pub params: HeavyTopParams,
    action: BodyTopAction,
}

impl HeavyTopBody {
    pub fn new(params: HeavyTopParams) -> Self {
        Self {
            params,
            action: BodyTopAction::default(),
        }
    }
}

impl FrozenFieldMap<RotorState> for HeavyTopBody {
    fn eval(&self, _t: f64, s: &RotorState) -> Result<AlgebraVector> {
        let p = &self.params;
        let w = p.inertia_inv() * s.m;
        let gamma = s.q.matrix().transpose() * p.gamma0;
        let dm = s.m.cross(&w) + p.weight_arm() * gamma.cross(&p.chi);
        Ok(pack(&[&w, &dm]))
    }
}

impl System for HeavyTopBody {
    type Action = BodyTopAction;

    fn action(&self) -> &BodyTopAction {
        &self.action
    }

    fn initial_state(&self) -> RotorState {
        let p = &self.params;
        RotorState {
            q: p.q0,
            m: p.q0.matrix().transpose() * p.pi0,
        }
    }

    fn direct_rhs(&self, _t: f64, s: &RotorState) -> Result<DVector<f64>> {
        let p = &self.params;
        let w = p.inertia_inv() * s.m;
        let gamma = s.q.matrix().transpose() * p.gamma0;
        let dpi = s.m.cross(&w) + p.weight_arm() * gamma.cross(&p.chi);
        Ok(rotor_rhs(&(s.q.matrix() * hat(&w)), &dpi))
    }

    fn invariant_names(&self) -> Vec<String> {
        ["energy", "orthogonality"].map(String::from).to_vec()
    }

    fn invariants(&self, s: &RotorState) -> Vec<f64> {
        vec![
            self.params.energy_body(&s.q, &s.m),
            s.q.orthogonality_defect(),
        ]
    }
}

/// Spatial formulation on `SO(3) ⋉ so(3)*` with state `(Q, π)`, `π = QΠ`.
#[derive(Clone, Debug)]
pub struct HeavyTopSpatial {
    pub params: HeavyTopParams,
    action: SemidirectCotangent,
}

impl HeavyTopSpatial {
    pub fn new(params: HeavyTopParams) -> Self {
        Self {
            params,
            action: SemidirectCotangent::default(),
        }
    }

    /// `(f₁, f₂) = (ω, MgℓΓ₀×Q𝒳 + π×ω)`; the `π×ω` term cancels the
    /// `−ad*_ω π = ω×π` contribution when the field is assembled.
    pub fn split(&self, q: &SO3, pi: &Vec3) -> (Vec3, Vec3) {
        let p = &self.params;
        let w = p.omega(q, pi);
        let f2 = p.weight_arm() * p.gamma0.cross(&(q.matrix() * p.chi)) + pi.cross(&w);
        (w, f2)
    }
}

impl FrozenFieldMap<RotorState> for HeavyTopSpatial {
    fn eval(&self, _t: f64, s: &RotorState) -> Result<AlgebraVector> {
        let (f1, f2) = self.split(&s.q, &s.m);
        Ok(pack(&[&f1, &f2]))
    }
}

impl HamiltonianMap<SO3> for HeavyTopSpatial {
    fn eval(&self, q: &SO3, mu: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let (f1, f2) = self.split(q, &Vec3::new(mu[0], mu[1], mu[2]));
        Ok((pack(&[&f1]), pack(&[&f2])))
    }
}

impl System for HeavyTopSpatial {
    type Action = SemidirectCotangent;

    fn action(&self) -> &SemidirectCotangent {
        &self.action
    }

    fn initial_state(&self) -> RotorState {
        RotorState {
            q: self.params.q0,
            m: self.params.pi0,
        }
    }

    fn direct_rhs(&self, _t: f64, s: &RotorState) -> Result<DVector<f64>> {
        let p = &self.params;
        let w = p.omega(&s.q, &s.m);
        let dpi = p.weight_arm() * p.gamma0.cross(&(s.q.matrix() * p.chi));
        Ok(rotor_rhs(&(hat(&w) * s.q.matrix()), &dpi))
    }

    fn invariant_names(&self) -> Vec<String> {
        ["energy", "gamma0_dot_pi", "orthogonality"]
            .map(String::from)
            .to_vec()
    }

    fn invariants(&self, s: &RotorState) -> Vec<f64> {
        vec![
            self.params.energy_spatial(&s.q, &s.m),
            self.params.gamma0.dot(&s.m),
            s.q.orthogonality_defect(),
        ]
    }
}

/// Lie–Poisson formulation on `se(3)*` with state `(Π, Γ)`, integrated with
/// the coadjoint action of SE(3).
#[derive(Clone, Debug)]
pub struct HeavyTopLiePoisson {
    pub params: HeavyTopParams,
    action: CoadjointSe3,
}

impl HeavyTopLiePoisson {
    pub fn new(params: HeavyTopParams) -> Self {
        Self {
            params,
            action: CoadjointSe3::default(),
        }
    }
}

impl FrozenFieldMap<Se3Dual> for HeavyTopLiePoisson {
    /// `−(∂H/∂Π, ∂H/∂Γ)`: with the generator `−ad*_ξ μ` this gives
    /// `Π̇ = Π×𝕀⁻¹Π + MgℓΓ×𝒳`, `Γ̇ = Γ×𝕀⁻¹Π`.
    fn eval(&self, _t: f64, s: &Se3Dual) -> Result<AlgebraVector> {
        let p = &self.params;
        let w = -(p.inertia_inv() * s.pi);
        let u = -(p.chi * p.weight_arm());
        Ok(pack(&[&w, &u]))
    }
}

impl System for HeavyTopLiePoisson {
    type Action = CoadjointSe3;

    fn action(&self) -> &CoadjointSe3 {
        &self.action
    }

    fn initial_state(&self) -> Se3Dual {
        let qt = self.params.q0.matrix().transpose();
        Se3Dual::new(qt * self.params.pi0, qt * self.params.gamma0)
    }

    fn direct_rhs(&self, _t: f64, s: &Se3Dual) -> Result<DVector<f64>> {
        let p = &self.params;
        let w = p.inertia_inv() * s.pi;
        let dpi = s.pi.cross(&w) + p.weight_arm() * s.gamma.cross(&p.chi);
        let dgamma = s.gamma.cross(&w);
        Ok(pack(&[&dpi, &dgamma]))
    }

    fn invariant_names(&self) -> Vec<String> {
        ["energy", "gamma_norm", "pi_dot_gamma"]
            .map(String::from)
            .to_vec()
    }

    fn invariants(&self, s: &Se3Dual) -> Vec<f64> {
        vec![
            self.params.energy_lie_poisson(s),
            s.gamma.norm(),
            s.pi.dot(&s.gamma),
        ]
    }
}

/// The heavy top with quadratic Hamiltonian on `T*(SO(3) × ℝ³)`, in spatial
/// momentum variables, with `p = −Mgℓ𝒳` a constant momentum conjugate to `q`.
#[derive(Clone, Debug)]
pub struct HeavyTopExt {
    pub params: HeavyTopParams,
    action: ExtTopAction,
}

impl HeavyTopExt {
    pub fn new(params: HeavyTopParams) -> Self {
        Self {
            params,
            action: ExtTopAction::default(),
        }
    }

    /// `H = ½ πᵀQ𝕀⁻¹Qᵀπ + ½‖p − QᵀΓ₀‖² − ½‖QᵀΓ₀‖²`.
    pub fn energy(&self, q: &SO3, pi: &Vec3, p: &Vec3) -> f64 {
        let prm = &self.params;
        let gamma = q.matrix().transpose() * prm.gamma0;
        0.5 * pi.dot(&prm.omega(q, pi)) + 0.5 * (p - gamma).norm_squared()
            - 0.5 * gamma.norm_squared()
    }

    /// `((ω, p − QᵀΓ₀), (−Γ₀×Qp + π×ω, 0))`.
    pub fn split(&self, q: &SO3, pi: &Vec3, p: &Vec3) -> ([Vec3; 2], [Vec3; 2]) {
        let prm = &self.params;
        let w = prm.omega(q, pi);
        let q_rate = p - q.matrix().transpose() * prm.gamma0;
        let f2 = -prm.gamma0.cross(&(q.matrix() * p)) + pi.cross(&w);
        ([w, q_rate], [f2, Vec3::zeros()])
    }
}

impl FrozenFieldMap<ExtTopState> for HeavyTopExt {
    /// Algebra layout `[ξ, ν, q̇, ṗ]` for SE(3) × ℝ⁶.
    fn eval(&self, _t: f64, s: &ExtTopState) -> Result<AlgebraVector> {
        let ([w, qr], [f2, pr]) = self.split(&s.rotor.q, &s.rotor.m, &s.p);
        Ok(pack(&[&w, &f2, &qr, &pr]))
    }
}

impl HamiltonianMap<(SO3, Vec3)> for HeavyTopExt {
    fn eval(&self, g: &(SO3, Vec3), mu: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let pi = Vec3::new(mu[0], mu[1], mu[2]);
        let p = Vec3::new(mu[3], mu[4], mu[5]);
        let ([w, qr], [f2, pr]) = self.split(&g.0, &pi, &p);
        Ok((pack(&[&w, &qr]), pack(&[&f2, &pr])))
    }
}

impl System for HeavyTopExt {
    type Action = ExtTopAction;

    fn action(&self) -> &ExtTopAction {
        &self.action
    }

    fn initial_state(&self) -> ExtTopState {
        let prm = &self.params;
        ExtTopState {
            rotor: RotorState {
                q: prm.q0,
                m: prm.pi0,
            },
            qvec: Vec3::zeros(),
            p: -(prm.chi * prm.weight_arm()),
        }
    }

    fn direct_rhs(&self, _t: f64, s: &ExtTopState) -> Result<DVector<f64>> {
        let prm = &self.params;
        let q = &s.rotor.q;
        let w = prm.omega(q, &s.rotor.m);
        let dpi = -prm.gamma0.cross(&(q.matrix() * s.p));
        let dq = s.p - q.matrix().transpose() * prm.gamma0;
        let head = rotor_rhs(&(hat(&w) * q.matrix()), &dpi);
        Ok(DVector::from_iterator(
            18,
            head.iter()
                .chain(dq.iter())
                .chain(Vec3::zeros().iter())
                .copied(),
        ))
    }

    fn invariant_names(&self) -> Vec<String> {
        ["energy", "gamma0_dot_pi", "p_drift", "orthogonality"]
            .map(String::from)
            .to_vec()
    }

    fn invariants(&self, s: &ExtTopState) -> Vec<f64> {
        let p0 = -(self.params.chi * self.params.weight_arm());
        vec![
            self.energy(&s.rotor.q, &s.rotor.m, &s.p),
            self.params.gamma0.dot(&s.rotor.m),
            (s.p - p0).norm(),
            s.rotor.q.orthogonality_defect(),
        ]
    }
}

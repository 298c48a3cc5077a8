//! Transitive group actions and their infinitesimal generators.
//!
//! An integrator only needs three things from a homogeneous space: the
//! algebra of the acting group, the action itself, and a way to read ambient
//! coordinates off a point. The generator is used to check that a frozen
//! field map reproduces a given vector field.

use nalgebra::DVector;

use crate::algebra::{se3_at, Algebra, AlgebraVector, Factor, GroupElement, GroupFactor};
use crate::error::{Error, Result};
use crate::kernels::{mat3_row_major, vec3_at, Mat3, Vec3};
use crate::lie::{coAd_se3, coad_se3, Se3, Se3Dual, SE3, SO3};

/// Tolerance on `‖q‖ = 1` and `qᵀω = 0` when a TS² point is constructed.
pub const TS2_TOL: f64 = 1e-9;

pub trait HomogeneousAction: Sync {
    type Point: Clone + Send + Sync + std::fmt::Debug;

    fn algebra(&self) -> &Algebra;

    fn act(&self, g: &GroupElement, m: &Self::Point) -> Self::Point;

    /// `ψ_*(ξ)|_m` in the ambient coordinates returned by [`Self::coords`].
    fn generator(&self, xi: &AlgebraVector, m: &Self::Point) -> DVector<f64>;

    /// Flat ambient coordinates of a point.
    fn coords(&self, m: &Self::Point) -> DVector<f64>;

    fn exp_act(&self, xi: &AlgebraVector, m: &Self::Point) -> Self::Point {
        self.act(&self.algebra().exp(xi), m)
    }
}

/// A map `f: M → 𝔤` with `F|_m = ψ_*(f(m))|_m`. Time is passed along for
/// non-autonomous fields such as controlled systems.
pub trait FrozenFieldMap<P>: Sync {
    fn eval(&self, t: f64, m: &P) -> Result<AlgebraVector>;
}

impl<P, F> FrozenFieldMap<P> for F
where
    F: Fn(f64, &P) -> Result<AlgebraVector> + Sync,
{
    fn eval(&self, t: f64, m: &P) -> Result<AlgebraVector> {
        self(t, m)
    }
}

/// A point `(q, ω)` of the tangent bundle of the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ts2Point {
    pub q: Vec3,
    pub omega: Vec3,
}

impl Ts2Point {
    pub fn new(q: Vec3, omega: Vec3) -> Result<Self> {
        let p = Self { q, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn norm_defect(&self) -> f64 {
        (1.0 - self.q.norm()).abs()
    }

    pub fn tangency_defect(&self) -> f64 {
        self.q.dot(&self.omega).abs()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.norm_defect() <= TS2_TOL) {
            return Err(Error::InvalidPoint(format!(
                "|q| = {} is not 1",
                self.q.norm()
            )));
        }
        if !(self.tangency_defect() <= TS2_TOL) {
            return Err(Error::InvalidPoint(format!(
                "q·ω = {:e} is not 0",
                self.q.dot(&self.omega)
            )));
        }
        Ok(())
    }
}

pub fn act_ts2(g: &SE3, m: &Ts2Point) -> Ts2Point {
    let aq = g.rot.apply(&m.q);
    Ts2Point {
        q: aq,
        omega: g.rot.apply(&m.omega) + g.trans.cross(&aq),
    }
}

pub fn generator_ts2(xi: &Se3, m: &Ts2Point) -> (Vec3, Vec3) {
    (
        xi.rot.cross(&m.q),
        xi.rot.cross(&m.omega) + xi.trans.cross(&m.q),
    )
}

/// `(SE(3))^N` acting componentwise on `(TS²)^N`.
#[derive(Clone, Debug)]
pub struct Ts2Product {
    n: usize,
    algebra: Algebra,
}

impl Ts2Product {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            algebra: Algebra::new(vec![Factor::Se3; n]),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn check(&self, m: &[Ts2Point]) -> Result<()> {
        if m.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: m.len(),
            });
        }
        m.iter().try_for_each(Ts2Point::validate)
    }
}

impl HomogeneousAction for Ts2Product {
    type Point = Vec<Ts2Point>;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &Vec<Ts2Point>) -> Vec<Ts2Point> {
        m.iter()
            .enumerate()
            .map(|(i, p)| act_ts2(g.rigid(i), p))
            .collect()
    }

    fn generator(&self, xi: &AlgebraVector, m: &Vec<Ts2Point>) -> DVector<f64> {
        let mut out = DVector::zeros(6 * self.n);
        for (i, p) in m.iter().enumerate() {
            let (dq, dw) = generator_ts2(&se3_at(xi, 6 * i), p);
            out.fixed_rows_mut::<3>(6 * i).copy_from(&dq);
            out.fixed_rows_mut::<3>(6 * i + 3).copy_from(&dw);
        }
        out
    }

    fn coords(&self, m: &Vec<Ts2Point>) -> DVector<f64> {
        DVector::from_iterator(
            6 * m.len(),
            m.iter().flat_map(|p| {
                p.q.iter()
                    .chain(p.omega.iter())
                    .copied()
                    .collect::<Vec<_>>()
            }),
        )
    }
}

/// SO(3) acting on so(3)* by `g·μ = Ad*_{g⁻¹}μ = gμ`.
#[derive(Clone, Debug)]
pub struct CoadjointSo3 {
    algebra: Algebra,
}

impl Default for CoadjointSo3 {
    fn default() -> Self {
        Self {
            algebra: Algebra::new(vec![Factor::So3]),
        }
    }
}

impl HomogeneousAction for CoadjointSo3 {
    type Point = Vec3;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &Vec3) -> Vec3 {
        g.rotation(0).apply(m)
    }

    /// `−ad*_ξ μ = ξ × μ`.
    fn generator(&self, xi: &AlgebraVector, m: &Vec3) -> DVector<f64> {
        DVector::from_column_slice(vec3_at(xi.as_slice(), 0).cross(m).as_slice())
    }

    fn coords(&self, m: &Vec3) -> DVector<f64> {
        DVector::from_column_slice(m.as_slice())
    }
}

/// SE(3) acting on se(3)* by `g·μ = Ad*_{g⁻¹}μ`.
#[derive(Clone, Debug)]
pub struct CoadjointSe3 {
    algebra: Algebra,
}

impl Default for CoadjointSe3 {
    fn default() -> Self {
        Self {
            algebra: Algebra::new(vec![Factor::Se3]),
        }
    }
}

impl HomogeneousAction for CoadjointSe3 {
    type Point = Se3Dual;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &Se3Dual) -> Se3Dual {
        coAd_se3(&g.rigid(0).inverse(), m)
    }

    fn generator(&self, xi: &AlgebraVector, m: &Se3Dual) -> DVector<f64> {
        let d = coad_se3(&se3_at(xi, 0), m);
        DVector::from_iterator(6, (-d.pi).iter().chain((-d.gamma).iter()).copied())
    }

    fn coords(&self, m: &Se3Dual) -> DVector<f64> {
        DVector::from_iterator(6, m.pi.iter().chain(m.gamma.iter()).copied())
    }
}

/// A rotation together with a vector: `(Q, Π)` or `(Q, π)` for the heavy top.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotorState {
    pub q: SO3,
    pub m: Vec3,
}

fn rotor_coords(s: &RotorState) -> DVector<f64> {
    let mut v = mat3_row_major(s.q.matrix()).to_vec();
    v.extend_from_slice(s.m.as_slice());
    DVector::from_vec(v)
}

fn rotor_tangent(dq: &Mat3, dm: &Vec3) -> DVector<f64> {
    let mut v = mat3_row_major(dq).to_vec();
    v.extend_from_slice(dm.as_slice());
    DVector::from_vec(v)
}

/// `(A, v)·(Q, Π) = (QA, Π + v)` on `SO(3) × ℝ³`.
///
/// This is a right action in the rotation factor; it is written as a left
/// action of the opposite group so that the generator is `(Qû, v)`.
#[derive(Clone, Debug)]
pub struct BodyTopAction {
    algebra: Algebra,
}

impl Default for BodyTopAction {
    fn default() -> Self {
        Self {
            algebra: Algebra::new(vec![Factor::So3Opposite, Factor::Euclidean(3)]),
        }
    }
}

impl HomogeneousAction for BodyTopAction {
    type Point = RotorState;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &RotorState) -> RotorState {
        RotorState {
            q: m.q * *g.rotation(0),
            m: m.m + vec3_at(g.translation(1).as_slice(), 0),
        }
    }

    fn generator(&self, xi: &AlgebraVector, m: &RotorState) -> DVector<f64> {
        let u = vec3_at(xi.as_slice(), 0);
        let v = vec3_at(xi.as_slice(), 3);
        rotor_tangent(&(m.q.matrix() * crate::lie::hat(&u)), &v)
    }

    fn coords(&self, m: &RotorState) -> DVector<f64> {
        rotor_coords(m)
    }
}

/// Group product on `SO(3) ⋉ so(3)*`: `(g₁, μ₁)(g₂, μ₂) = (g₁g₂, μ₁ + g₁μ₂)`.
pub fn semidirect_mul(a: &(SO3, Vec3), b: &(SO3, Vec3)) -> (SO3, Vec3) {
    (a.0 * b.0, a.1 + a.0.apply(&b.1))
}

pub fn semidirect_inverse(a: &(SO3, Vec3)) -> (SO3, Vec3) {
    let inv = a.0.inverse();
    (inv, -inv.apply(&a.1))
}

/// Left multiplication of `SO(3) ⋉ so(3)*` on itself, acting on `(Q, π)`.
///
/// As a group `SO(3) ⋉ so(3)*` is SE(3), so the algebra is se(3) and the
/// generator is `(ξ̂Q, ν + ξ×π)`.
#[derive(Clone, Debug)]
pub struct SemidirectCotangent {
    algebra: Algebra,
}

impl Default for SemidirectCotangent {
    fn default() -> Self {
        Self {
            algebra: Algebra::new(vec![Factor::Se3]),
        }
    }
}

impl HomogeneousAction for SemidirectCotangent {
    type Point = RotorState;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &RotorState) -> RotorState {
        let e = g.rigid(0);
        let (q, pi) = semidirect_mul(&(e.rot, e.trans), &(m.q, m.m));
        RotorState { q, m: pi }
    }

    fn generator(&self, xi: &AlgebraVector, m: &RotorState) -> DVector<f64> {
        let x = se3_at(xi, 0);
        rotor_tangent(
            &(crate::lie::hat(&x.rot) * m.q.matrix()),
            &(x.trans + x.rot.cross(&m.m)),
        )
    }

    fn coords(&self, m: &RotorState) -> DVector<f64> {
        rotor_coords(m)
    }
}

/// Spatial state of the extended heavy top: `(Q, π)` plus the pair `(q, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtTopState {
    pub rotor: RotorState,
    pub qvec: Vec3,
    pub p: Vec3,
}

/// `(SO(3) ⋉ so(3)*) × ℝ³ × ℝ³`, the ℝ⁶ part translating `(q, p)`.
#[derive(Clone, Debug)]
pub struct ExtTopAction {
    algebra: Algebra,
    inner: SemidirectCotangent,
}

impl Default for ExtTopAction {
    fn default() -> Self {
        Self {
            algebra: Algebra::new(vec![Factor::Se3, Factor::Euclidean(6)]),
            inner: SemidirectCotangent::default(),
        }
    }
}

impl HomogeneousAction for ExtTopAction {
    type Point = ExtTopState;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &ExtTopState) -> ExtTopState {
        let e = g.rigid(0);
        let (q, pi) = semidirect_mul(&(e.rot, e.trans), &(m.rotor.q, m.rotor.m));
        let t = g.translation(1);
        ExtTopState {
            rotor: RotorState { q, m: pi },
            qvec: m.qvec + vec3_at(t.as_slice(), 0),
            p: m.p + vec3_at(t.as_slice(), 3),
        }
    }

    fn generator(&self, xi: &AlgebraVector, m: &ExtTopState) -> DVector<f64> {
        let head = self.inner.generator(&xi.rows(0, 6).into_owned(), &m.rotor);
        DVector::from_iterator(18, head.iter().chain(xi.rows(6, 6).iter()).copied())
    }

    fn coords(&self, m: &ExtTopState) -> DVector<f64> {
        let head = rotor_coords(&m.rotor);
        DVector::from_iterator(
            18,
            head.iter().chain(m.qvec.iter()).chain(m.p.iter()).copied(),
        )
    }
}

/// State of the two-quadrotor payload system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadState {
    pub y: Vec3,
    pub v: Vec3,
    pub r: [SO3; 2],
    pub big_omega: [Vec3; 2],
    pub link: [Ts2Point; 2],
}

/// `ℝ⁶ × (SO(3) × ℝ³)² × (SE(3))²` acting on the quadrotor phase space.
#[derive(Clone, Debug)]
pub struct QuadAction {
    algebra: Algebra,
}

impl Default for QuadAction {
    fn default() -> Self {
        Self {
            algebra: Algebra::new(vec![
                Factor::Euclidean(6),
                Factor::So3,
                Factor::Euclidean(3),
                Factor::So3,
                Factor::Euclidean(3),
                Factor::Se3,
                Factor::Se3,
            ]),
        }
    }
}

impl QuadAction {
    /// Offsets of `(η₁, η₂, η₃, η₄, μ₁₂, μ₃₄)` in the flat algebra vector.
    pub const ETA: [usize; 4] = [6, 9, 12, 15];
    pub const MU: [usize; 2] = [18, 24];
}

impl HomogeneousAction for QuadAction {
    type Point = QuadState;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &QuadState) -> QuadState {
        let a = g.translation(0);
        QuadState {
            y: m.y + vec3_at(a.as_slice(), 0),
            v: m.v + vec3_at(a.as_slice(), 3),
            r: [*g.rotation(1) * m.r[0], *g.rotation(3) * m.r[1]],
            big_omega: [
                m.big_omega[0] + vec3_at(g.translation(2).as_slice(), 0),
                m.big_omega[1] + vec3_at(g.translation(4).as_slice(), 0),
            ],
            link: [
                act_ts2(g.rigid(5), &m.link[0]),
                act_ts2(g.rigid(6), &m.link[1]),
            ],
        }
    }

    fn generator(&self, xi: &AlgebraVector, m: &QuadState) -> DVector<f64> {
        let x = xi.as_slice();
        let mut out = Vec::with_capacity(48);
        out.extend_from_slice(&x[0..6]);
        for i in 0..2 {
            let eta = vec3_at(x, Self::ETA[2 * i]);
            let d_r = crate::lie::hat(&eta) * m.r[i].matrix();
            out.extend_from_slice(&mat3_row_major(&d_r));
            out.extend_from_slice(&x[Self::ETA[2 * i + 1]..Self::ETA[2 * i + 1] + 3]);
        }
        for i in 0..2 {
            let (dq, dw) = generator_ts2(&se3_at(xi, Self::MU[i]), &m.link[i]);
            out.extend_from_slice(dq.as_slice());
            out.extend_from_slice(dw.as_slice());
        }
        DVector::from_vec(out)
    }

    fn coords(&self, m: &QuadState) -> DVector<f64> {
        let mut out = Vec::with_capacity(48);
        out.extend_from_slice(m.y.as_slice());
        out.extend_from_slice(m.v.as_slice());
        for i in 0..2 {
            out.extend_from_slice(&mat3_row_major(m.r[i].matrix()));
            out.extend_from_slice(m.big_omega[i].as_slice());
        }
        for p in &m.link {
            out.extend_from_slice(p.q.as_slice());
            out.extend_from_slice(p.omega.as_slice());
        }
        DVector::from_vec(out)
    }
}

/// ℝⁿ acting on itself by translation. Lie schemes built on this action are
/// their classical Runge–Kutta counterparts.
#[derive(Clone, Debug)]
pub struct Translation {
    algebra: Algebra,
}

impl Translation {
    pub fn new(n: usize) -> Self {
        Self {
            algebra: Algebra::euclidean(n),
        }
    }
}

impl HomogeneousAction for Translation {
    type Point = DVector<f64>;

    fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    fn act(&self, g: &GroupElement, m: &DVector<f64>) -> DVector<f64> {
        match &g.parts[0] {
            GroupFactor::Translation(t) => m + t,
            other => panic!("translation action given {other:?}"),
        }
    }

    fn generator(&self, xi: &AlgebraVector, _m: &DVector<f64>) -> DVector<f64> {
        xi.clone()
    }

    fn coords(&self, m: &DVector<f64>) -> DVector<f64> {
        m.clone()
    }
}

/// Central finite difference of `t ↦ coords(act(exp(tξ), m))` at `t = 0`.
pub fn generator_fd<A: HomogeneousAction>(
    action: &A,
    xi: &AlgebraVector,
    m: &A::Point,
    step: f64,
) -> DVector<f64> {
    let plus = action.coords(&action.exp_act(&(xi * step), m));
    let minus = action.coords(&action.exp_act(&(xi * -step), m));
    (plus - minus) / (2.0 * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{exp_se3, exp_so3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rvec(rng: &mut ChaCha8Rng, s: f64) -> Vec3 {
        Vec3::new(
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
            rng.gen_range(-s..s),
        )
    }

    fn rts2(rng: &mut ChaCha8Rng) -> Ts2Point {
        let q = rvec(rng, 1.0).normalize();
        let w = rvec(rng, 2.0);
        Ts2Point::new(q, w - q * q.dot(&w)).unwrap()
    }

    fn ralg(rng: &mut ChaCha8Rng, alg: &Algebra, s: f64) -> AlgebraVector {
        AlgebraVector::from_fn(alg.dim(), |_, _| rng.gen_range(-s..s))
    }

    fn rrot(rng: &mut ChaCha8Rng) -> SO3 {
        exp_so3(&rvec(rng, 2.0))
    }

    /// Checks the action axioms and the generator against finite differences.
    fn check_action<A: HomogeneousAction>(a: &A, m: &A::Point, rng: &mut ChaCha8Rng) {
        let alg = a.algebra();
        let id = a.act(&alg.identity(), m);
        assert!((a.coords(&id) - a.coords(m)).norm() < 1e-14);
        let g1 = alg.exp(&ralg(rng, alg, 1.0));
        let g2 = alg.exp(&ralg(rng, alg, 1.0));
        let seq = a.act(&g1, &a.act(&g2, m));
        let prod = a.act(&g1.compose(&g2).unwrap(), m);
        let scale = 1.0 + a.coords(m).norm();
        assert!((a.coords(&seq) - a.coords(&prod)).norm() < 1e-11 * scale);
        let xi = ralg(rng, alg, 1.0);
        let gen = a.generator(&xi, m);
        let e1 = (generator_fd(a, &xi, m, 1e-3) - &gen).norm();
        let e2 = (generator_fd(a, &xi, m, 5e-4) - &gen).norm();
        assert!(generator_fd(a, &xi, m, 1e-6).relative_eq(&gen, 1e-8 * scale, 1e-8));
        // second-order truncation: halving the step divides the error by about four
        assert!(e2 < 0.3 * e1 + 1e-12, "{e1} {e2}");
    }

    #[test]
    fn ts2_action_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = rts2(&mut rng);
        assert_eq!(act_ts2(&SE3::identity(), &m), m);
        let r = rrot(&mut rng);
        let out = act_ts2(&SE3::new(r, Vec3::zeros()), &m);
        assert_eq!(out.q, r.apply(&m.q));
        assert_eq!(out.omega, r.apply(&m.omega));
        for _ in 0..100 {
            let m = rts2(&mut rng);
            let g = exp_se3(&Se3::new(rvec(&mut rng, 2.0), rvec(&mut rng, 2.0)));
            let out = act_ts2(&g, &m);
            assert!(out.q.dot(&out.omega).abs() < 1e-13 * (1.0 + out.omega.norm()));
            assert!((out.q.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ts2_generator_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = rts2(&mut rng);
        let (dq, dw) = generator_ts2(&Se3::zero(), &m);
        assert_eq!((dq, dw), (Vec3::zeros(), Vec3::zeros()));
        let (dq, dw) = generator_ts2(&Se3::new(m.q, Vec3::zeros()), &m);
        assert!(dq.norm() < 1e-15);
        assert!((dw - m.q.cross(&m.omega)).norm() < 1e-15);
    }

    #[test]
    fn invalid_ts2_rejected() {
        assert!(Ts2Point::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0)).is_err());
        assert!(Ts2Point::new(Vec3::new(2.0, 0.0, 0.0), Vec3::zeros()).is_err());
        assert!(Ts2Product::new(2)
            .check(&[Ts2Point::new(Vec3::x(), Vec3::y()).unwrap()])
            .is_err());
    }

    #[test]
    fn product_action_reduces_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a1 = Ts2Product::new(1);
        let m = vec![rts2(&mut rng)];
        let xi = ralg(&mut rng, a1.algebra(), 1.0);
        let g = exp_se3(&se3_at(&xi, 0));
        assert_eq!(a1.exp_act(&xi, &m)[0], act_ts2(&g, &m[0]));

        let a2 = Ts2Product::new(2);
        let m2 = vec![rts2(&mut rng), rts2(&mut rng)];
        let mut xi = ralg(&mut rng, a2.algebra(), 1.0);
        xi.rows_mut(6, 6).fill(0.0);
        assert_eq!(a2.exp_act(&xi, &m2)[1], m2[1]);
        check_action(&a2, &m2, &mut rng);
        check_action(
            &Ts2Product::new(5),
            &(0..5).map(|_| rts2(&mut rng)).collect(),
            &mut rng,
        );
    }

    #[test]
    fn coadjoint_so3() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = CoadjointSo3::default();
        for _ in 0..20 {
            let mu = rvec(&mut rng, 3.0);
            let g = a.algebra().exp(&ralg(&mut rng, a.algebra(), 2.0));
            assert!((a.act(&g, &mu).norm() - mu.norm()).abs() < 1e-13 * mu.norm());
            check_action(&a, &mu, &mut rng);
        }
    }

    #[test]
    fn coadjoint_se3_casimirs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = CoadjointSe3::default();
        for _ in 0..50 {
            let mu = Se3Dual::new(rvec(&mut rng, 3.0), rvec(&mut rng, 3.0));
            let g = a.algebra().exp(&ralg(&mut rng, a.algebra(), 2.0));
            let out = a.act(&g, &mu);
            assert!((out.gamma.norm() - mu.gamma.norm()).abs() < 1e-13 * mu.gamma.norm());
            assert!((out.pi.dot(&out.gamma) - mu.pi.dot(&mu.gamma)).abs() < 1e-12 * 10.0);
            check_action(&a, &mu, &mut rng);
        }
    }

    #[test]
    fn semidirect_group_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let id = (SO3::identity(), Vec3::zeros());
        for _ in 0..20 {
            let x = (rrot(&mut rng), rvec(&mut rng, 2.0));
            let y = (rrot(&mut rng), rvec(&mut rng, 2.0));
            let z = (rrot(&mut rng), rvec(&mut rng, 2.0));
            assert_eq!(semidirect_mul(&id, &x), x);
            let e = semidirect_mul(&x, &semidirect_inverse(&x));
            assert!((e.0.matrix() - Mat3::identity()).abs().max() < 1e-12 && e.1.norm() < 1e-12);
            let l = semidirect_mul(&semidirect_mul(&x, &y), &z);
            let r = semidirect_mul(&x, &semidirect_mul(&y, &z));
            assert!(
                (l.0.matrix() - r.0.matrix()).abs().max() < 1e-12 && (l.1 - r.1).norm() < 1e-12
            );
        }
        let a = SemidirectCotangent::default();
        let m = RotorState {
            q: rrot(&mut rng),
            m: rvec(&mut rng, 2.0),
        };
        check_action(&a, &m, &mut rng);
    }

    #[test]
    fn body_top_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = BodyTopAction::default();
        for _ in 0..10 {
            let m = RotorState {
                q: rrot(&mut rng),
                m: rvec(&mut rng, 2.0),
            };
            assert_eq!(a.act(&a.algebra().identity(), &m), m);
            let out = a.exp_act(&ralg(&mut rng, a.algebra(), 2.0), &m);
            assert!(out.q.orthogonality_defect() < 1e-12);
            check_action(&a, &m, &mut rng);
        }
    }

    #[test]
    fn ext_top_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = ExtTopAction::default();
        let m = ExtTopState {
            rotor: RotorState {
                q: rrot(&mut rng),
                m: rvec(&mut rng, 2.0),
            },
            qvec: rvec(&mut rng, 1.0),
            p: rvec(&mut rng, 1.0),
        };
        check_action(&a, &m, &mut rng);
    }

    #[test]
    fn quadrotor_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = QuadAction::default();
        assert_eq!(a.algebra().dim(), 30);
        for _ in 0..10 {
            let m = QuadState {
                y: rvec(&mut rng, 1.0),
                v: rvec(&mut rng, 1.0),
                r: [rrot(&mut rng), rrot(&mut rng)],
                big_omega: [rvec(&mut rng, 1.0), rvec(&mut rng, 1.0)],
                link: [rts2(&mut rng), rts2(&mut rng)],
            };
            assert_eq!(a.act(&a.algebra().identity(), &m), m);
            let out = a.exp_act(&ralg(&mut rng, a.algebra(), 2.0), &m);
            for p in &out.link {
                assert!(p.norm_defect() < 1e-13);
                assert!(p.tangency_defect() < 1e-13 * (1.0 + p.omega.norm()));
            }
            check_action(&a, &m, &mut rng);
        }
    }

    #[test]
    fn translation_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = Translation::new(4);
        let m = DVector::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        check_action(&a, &m, &mut rng);
    }
}

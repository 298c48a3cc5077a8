//! Kernels for so(3), se(3), SO(3) and SE(3).
//!
//! so(3) elements are 3-vectors identified with skew matrices through [`hat`].
//! se(3) elements are pairs `(A, a)` of a rotational and a translational
//! 3-vector, with bracket `[(A,a),(B,b)] = (A×B, A×b − B×a)`. SE(3) elements
//! are pairs `(R, r)` multiplying as `(R₁R₂, R₁r₂ + r₁)`.
//!
//! Analytic functions of `ad` (dexp, dexp⁻¹) are evaluated through
//! [`AnalyticPhi`], which reduces `φ(ad_{(A,a)})` to four scalar functions of
//! `α = ‖A‖`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::kernels::{Mat3, Vec3};

/// Below this argument the scalar coefficient functions switch from their
/// closed forms to power series.
pub const SERIES_THRESHOLD: f64 = 1.0;

const SERIES_TERMS: usize = 16;

/// `|B_{2n}| / (2n)!` for n = 1..=16.
const BERNOULLI_EVEN_OVER_FACTORIAL: [f64; SERIES_TERMS] = [
    8.33333333333333287e-02,
    1.38888888888888894e-03,
    3.30687830687830710e-05,
    8.26719576719576754e-07,
    2.08767569878681002e-08,
    5.28419013868749322e-10,
    1.33825365306846789e-11,
    3.38968029632258272e-13,
    8.58606205627784517e-15,
    2.17486869855806192e-16,
    5.50900282836022953e-18,
    1.39544646858125223e-19,
    3.53470703962946728e-21,
    8.95351742703754628e-23,
    2.26795245233768293e-24,
    5.74479066887220246e-26,
];

/// `B_k / k!` for k = 0..8, the coefficients of `z/(e^z − 1)`.
const DEXPINV_SERIES: [f64; 8] = [
    1.0,
    -0.5,
    1.0 / 12.0,
    0.0,
    -1.0 / 720.0,
    0.0,
    1.0 / 30240.0,
    0.0,
];

pub const MAX_SERIES_ORDER: usize = DEXPINV_SERIES.len();

pub fn hat(xi: &Vec3) -> Mat3 {
    Mat3::new(
        0.0, -xi.z, xi.y, //
        xi.z, 0.0, -xi.x, //
        -xi.y, xi.x, 0.0,
    )
}

/// Inverse of [`hat`]; rejects matrices whose symmetric part exceeds 1e-10
/// relative to their size.
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let asym = (m + m.transpose()).abs().max();
    if asym > 1e-10 * (1.0 + m.abs().max()) {
        return Err(Error::NotSkew(asym));
    }
    Ok(Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    ))
}

// ---------------------------------------------------------------------------
// Scalar coefficient functions

/// An even analytic function `g(z) = Σ c_k z^{2k}` together with
/// `g̃(z) = g'(z)/z`, evaluated by series near zero and in closed form
/// elsewhere.
#[derive(Clone, Copy)]
pub struct EvenFunction {
    coeff: fn(usize) -> f64,
    closed: fn(f64) -> f64,
    closed_tilde: fn(f64) -> f64,
}

impl EvenFunction {
    pub fn value(&self, z: f64) -> f64 {
        if z.abs() < SERIES_THRESHOLD {
            let z2 = z * z;
            (0..SERIES_TERMS)
                .rev()
                .fold(0.0, |acc, k| acc * z2 + (self.coeff)(k))
        } else {
            (self.closed)(z)
        }
    }

    /// `g'(z)/z`.
    pub fn tilde(&self, z: f64) -> f64 {
        if z.abs() < SERIES_THRESHOLD {
            let z2 = z * z;
            (0..SERIES_TERMS - 1).rev().fold(0.0, |acc, k| {
                acc * z2 + 2.0 * (k + 1) as f64 * (self.coeff)(k + 1)
            })
        } else {
            (self.closed_tilde)(z)
        }
    }

    /// Value and tilde evaluated purely from the series, for testing
    /// continuity at the switch-over point.
    pub fn series_pair(&self, z: f64) -> (f64, f64) {
        let z2 = z * z;
        let v = (0..SERIES_TERMS)
            .rev()
            .fold(0.0, |acc, k| acc * z2 + (self.coeff)(k));
        let t = (0..SERIES_TERMS - 1).rev().fold(0.0, |acc, k| {
            acc * z2 + 2.0 * (k + 1) as f64 * (self.coeff)(k + 1)
        });
        (v, t)
    }

    pub fn closed_pair(&self, z: f64) -> (f64, f64) {
        ((self.closed)(z), (self.closed_tilde)(z))
    }
}

fn inv_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc / k as f64)
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sin z / z`
pub const SINC: EvenFunction = EvenFunction {
    coeff: |k| sign(k) * inv_factorial(2 * k + 1),
    closed: |z| z.sin() / z,
    closed_tilde: |z| (z * z.cos() - z.sin()) / (z * z * z),
};

/// `(1 − cos z) / z²`
pub const ONE_MINUS_COS: EvenFunction = EvenFunction {
    coeff: |k| sign(k) * inv_factorial(2 * k + 2),
    closed: |z| {
        let s = (0.5 * z).sin();
        2.0 * s * s / (z * z)
    },
    closed_tilde: |z| {
        let s = (0.5 * z).sin();
        (z * z.sin() - 4.0 * s * s) / z.powi(4)
    },
};

/// `(z − sin z) / z³`
pub const Z_MINUS_SIN: EvenFunction = EvenFunction {
    coeff: |k| sign(k) * inv_factorial(2 * k + 3),
    closed: |z| (z - z.sin()) / (z * z * z),
    closed_tilde: |z| {
        let s = (0.5 * z).sin();
        (2.0 * z * s * s - 3.0 * (z - z.sin())) / z.powi(5)
    },
};

/// `(1 − (z/2)cot(z/2)) / z²`, analytic for `|z| < 2π`.
pub const DEXPINV_G2: EvenFunction = EvenFunction {
    coeff: |k| BERNOULLI_EVEN_OVER_FACTORIAL[k],
    closed: |z| {
        let c = 0.5 * z / (0.5 * z).tan();
        (1.0 - c) / (z * z)
    },
    closed_tilde: |z| {
        let half = 0.5 * z;
        let c = half / half.tan();
        let s = half.sin();
        let dc = 0.5 / half.tan() - 0.25 * z / (s * s);
        -(z * dc + 2.0 * (1.0 - c)) / z.powi(4)
    },
};

/// The constant function `−1/2`.
pub const MINUS_HALF: EvenFunction = EvenFunction {
    coeff: |k| if k == 0 { -0.5 } else { 0.0 },
    closed: |_| -0.5,
    closed_tilde: |_| 0.0,
};

/// A real-analytic `φ` acting on `ad`, described by `φ(0)` and the even/odd
/// parts `g₁(z) = φ₋(z)/z`, `g₂(z) = (φ(0) − φ₊(z))/z²`.
#[derive(Clone, Copy)]
pub struct AnalyticPhi {
    pub phi0: f64,
    pub g1: EvenFunction,
    pub g2: EvenFunction,
    /// Largest admissible `α` (exclusive); `f64::INFINITY` for entire `φ`.
    pub radius: f64,
}

impl AnalyticPhi {
    /// `φ(z) = (e^z − 1)/z`
    pub fn dexp() -> Self {
        Self {
            phi0: 1.0,
            g1: ONE_MINUS_COS,
            g2: Z_MINUS_SIN,
            radius: 2.0 * PI,
        }
    }

    /// `φ(z) = z/(e^z − 1)`
    pub fn dexpinv() -> Self {
        Self {
            phi0: 1.0,
            g1: MINUS_HALF,
            g2: DEXPINV_G2,
            radius: 2.0 * PI,
        }
    }

    fn check(&self, alpha: f64) -> Result<()> {
        if alpha < self.radius {
            Ok(())
        } else {
            Err(Error::Branch(alpha))
        }
    }

    /// `φ(ad_u) v` on so(3).
    pub fn apply_so3(&self, u: &Vec3, v: &Vec3) -> Result<Vec3> {
        let alpha = u.norm();
        self.check(alpha)?;
        let uv = u.cross(v);
        Ok(self.phi0 * v + self.g1.value(alpha) * uv + self.g2.value(alpha) * u.cross(&uv))
    }

    /// Matrix of `v ↦ φ(ad_u) v` on so(3).
    pub fn matrix_so3(&self, u: &Vec3) -> Result<Mat3> {
        let alpha = u.norm();
        self.check(alpha)?;
        let uh = hat(u);
        Ok(Mat3::identity() * self.phi0
            + uh * self.g1.value(alpha)
            + uh * uh * self.g2.value(alpha))
    }

    /// `φ(ad_{(A,a)})(B,b)` on se(3).
    pub fn apply_se3(&self, x: &Se3, y: &Se3) -> Result<Se3> {
        let (a_rot, a_tr) = (&x.rot, &x.trans);
        let (b_rot, b_tr) = (&y.rot, &y.trans);
        let alpha = a_rot.norm();
        self.check(alpha)?;
        let rho = a_rot.dot(a_tr);
        let g1 = self.g1.value(alpha);
        let g2 = self.g2.value(alpha);
        let g1t = self.g1.tilde(alpha);
        let g2t = self.g2.tilde(alpha);

        let ab = a_rot.cross(b_rot);
        let aab = a_rot.cross(&ab);
        let rot = self.phi0 * b_rot + g1 * ab + g2 * aab;
        let trans = self.phi0 * b_tr
            + g1 * (a_tr.cross(b_rot) + a_rot.cross(b_tr))
            + rho * g1t * ab
            + rho * g2t * aab
            + g2 * (a_tr.cross(&ab)
                + a_rot.cross(&a_tr.cross(b_rot))
                + a_rot.cross(&a_rot.cross(b_tr)));
        Ok(Se3 { rot, trans })
    }
}

// ---------------------------------------------------------------------------
// Algebra elements

/// Element `(A, a)` of se(3).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Se3 {
    pub rot: Vec3,
    pub trans: Vec3,
}

impl Se3 {
    pub fn new(rot: Vec3, trans: Vec3) -> Self {
        Self { rot, trans }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            rot: Vec3::new(v[0], v[1], v[2]),
            trans: Vec3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.rot.x,
            self.rot.y,
            self.rot.z,
            self.trans.x,
            self.trans.y,
            self.trans.z,
        ]
    }

    pub fn norm(&self) -> f64 {
        (self.rot.norm_squared() + self.trans.norm_squared()).sqrt()
    }
}

impl Add for Se3 {
    type Output = Se3;
    fn add(self, o: Se3) -> Se3 {
        Se3::new(self.rot + o.rot, self.trans + o.trans)
    }
}

impl Sub for Se3 {
    type Output = Se3;
    fn sub(self, o: Se3) -> Se3 {
        Se3::new(self.rot - o.rot, self.trans - o.trans)
    }
}

impl Neg for Se3 {
    type Output = Se3;
    fn neg(self) -> Se3 {
        Se3::new(-self.rot, -self.trans)
    }
}

impl Mul<Se3> for f64 {
    type Output = Se3;
    fn mul(self, x: Se3) -> Se3 {
        Se3::new(self * x.rot, self * x.trans)
    }
}

/// Element `(Π, Γ)` of se(3)*, paired with se(3) by `Π·A + Γ·a`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Se3Dual {
    pub pi: Vec3,
    pub gamma: Vec3,
}

impl Se3Dual {
    pub fn new(pi: Vec3, gamma: Vec3) -> Self {
        Self { pi, gamma }
    }

    pub fn pair(&self, x: &Se3) -> f64 {
        self.pi.dot(&x.rot) + self.gamma.dot(&x.trans)
    }
}

pub fn bracket_so3(u: &Vec3, v: &Vec3) -> Vec3 {
    u.cross(v)
}

pub fn bracket_se3(x: &Se3, y: &Se3) -> Se3 {
    Se3::new(
        x.rot.cross(&y.rot),
        x.rot.cross(&y.trans) - y.rot.cross(&x.trans),
    )
}

// ---------------------------------------------------------------------------
// Groups

/// Rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SO3(Mat3);

impl SO3 {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Wraps a matrix, checking orthogonality and unit determinant to 1e-10.
    pub fn try_from_matrix(m: Mat3) -> Result<Self> {
        let orth = (m.transpose() * m - Mat3::identity()).abs().max();
        let det = m.determinant();
        if orth > 1e-10 || (det - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidPoint(format!(
                "not a rotation: ‖RᵀR − I‖ = {orth:e}, det = {det}"
            )));
        }
        Ok(Self(m))
    }

    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// `max |RᵀR − I|` entry.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).abs().max()
    }
}

impl Mul for SO3 {
    type Output = SO3;
    fn mul(self, o: SO3) -> SO3 {
        SO3(self.0 * o.0)
    }
}

/// Rigid motion `(R, r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SE3 {
    pub rot: SO3,
    pub trans: Vec3,
}

impl SE3 {
    pub fn identity() -> Self {
        Self {
            rot: SO3::identity(),
            trans: Vec3::zeros(),
        }
    }

    pub fn new(rot: SO3, trans: Vec3) -> Self {
        Self { rot, trans }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rot.inverse();
        Self {
            rot: rt,
            trans: -(rt.apply(&self.trans)),
        }
    }

    /// 4×4 homogeneous matrix.
    pub fn to_homogeneous(&self) -> nalgebra::Matrix4<f64> {
        let mut m = nalgebra::Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rot.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.trans);
        m
    }
}

impl Mul for SE3 {
    type Output = SE3;
    fn mul(self, o: SE3) -> SE3 {
        SE3 {
            rot: self.rot * o.rot,
            trans: self.rot.apply(&o.trans) + self.trans,
        }
    }
}

/// Rodrigues formula.
pub fn exp_so3(xi: &Vec3) -> SO3 {
    let theta = xi.norm();
    let h = hat(xi);
    SO3(Mat3::identity() + h * SINC.value(theta) + h * h * ONE_MINUS_COS.value(theta))
}

pub fn exp_se3(x: &Se3) -> SE3 {
    let theta = x.rot.norm();
    let h = hat(&x.rot);
    let h2 = h * h;
    let rot = SO3(Mat3::identity() + h * SINC.value(theta) + h2 * ONE_MINUS_COS.value(theta));
    let v = Mat3::identity() + h * ONE_MINUS_COS.value(theta) + h2 * Z_MINUS_SIN.value(theta);
    SE3 {
        rot,
        trans: v * x.trans,
    }
}

/// `Ad_{(R,r)}(u, v) = (Ru, Rv + r̂Ru)`.
#[allow(non_snake_case)]
pub fn Ad_se3(g: &SE3, x: &Se3) -> Se3 {
    let ru = g.rot.apply(&x.rot);
    Se3::new(ru, g.rot.apply(&x.trans) + g.trans.cross(&ru))
}

/// `Ad*_{(g,u)}(Π, Γ) = (g⁻¹(Π − u×Γ), g⁻¹Γ)`.
#[allow(non_snake_case)]
pub fn coAd_se3(g: &SE3, mu: &Se3Dual) -> Se3Dual {
    let ginv = g.rot.inverse();
    Se3Dual::new(
        ginv.apply(&(mu.pi - g.trans.cross(&mu.gamma))),
        ginv.apply(&mu.gamma),
    )
}

/// `ad*_{(ξ,u)}(Π, Γ) = (−ξ×Π − u×Γ, −ξ×Γ)`.
pub fn coad_se3(x: &Se3, mu: &Se3Dual) -> Se3Dual {
    Se3Dual::new(
        -x.rot.cross(&mu.pi) - x.trans.cross(&mu.gamma),
        -x.rot.cross(&mu.gamma),
    )
}

/// `Ad*_g μ = gᵀμ` on so(3)*.
#[allow(non_snake_case)]
pub fn coAd_so3(g: &SO3, mu: &Vec3) -> Vec3 {
    g.matrix().transpose() * mu
}

/// `ad*_ξ μ = −ξ×μ` on so(3)*.
pub fn coad_so3(xi: &Vec3, mu: &Vec3) -> Vec3 {
    -xi.cross(mu)
}

pub fn dexp_so3(u: &Vec3, v: &Vec3) -> Result<Vec3> {
    AnalyticPhi::dexp().apply_so3(u, v)
}

/// Closed-form `dexp⁻¹_u(v)` on so(3), principal branch `‖u‖ < 2π`.
pub fn dexpinv_so3(u: &Vec3, v: &Vec3) -> Result<Vec3> {
    AnalyticPhi::dexpinv().apply_so3(u, v)
}

pub fn dexp_se3(u: &Se3, v: &Se3) -> Result<Se3> {
    AnalyticPhi::dexp().apply_se3(u, v)
}

/// Closed-form `dexp⁻¹_u(v)` on se(3), principal branch `‖A‖ < 2π`.
pub fn dexpinv_se3(u: &Se3, v: &Se3) -> Result<Se3> {
    AnalyticPhi::dexpinv().apply_se3(u, v)
}

/// Matrix of `dexp_u` on so(3).
pub fn dexp_matrix_so3(u: &Vec3) -> Result<Mat3> {
    AnalyticPhi::dexp().matrix_so3(u)
}

/// Dual map `dexp*_u μ`, the transpose of the dexp matrix.
pub fn dexp_star_so3(u: &Vec3, mu: &Vec3) -> Result<Vec3> {
    Ok(dexp_matrix_so3(u)?.transpose() * mu)
}

/// Truncated `dexp⁻¹_u(v) ≈ Σ_{k<order} (B_k/k!) ad_u^k v` for any bracket.
///
/// `order` counts retained terms: order 1 returns `v`.
pub fn dexpinv_series_with<T, B>(u: &T, v: &T, order: usize, bracket: B) -> Result<T>
where
    T: Clone + Add<Output = T>,
    f64: Mul<T, Output = T>,
    B: Fn(&T, &T) -> T,
{
    if order == 0 || order > MAX_SERIES_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    let mut term = v.clone();
    let mut acc = v.clone();
    for coeff in DEXPINV_SERIES.iter().take(order).skip(1) {
        term = bracket(u, &term);
        if *coeff != 0.0 {
            acc = acc + *coeff * term.clone();
        }
    }
    Ok(acc)
}

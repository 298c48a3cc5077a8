//! N-fold spherical pendulum on `(TS²)^N`.

use nalgebra::DVector;

use super::System;
use crate::actions::{FrozenFieldMap, Ts2Point, Ts2Product};
use crate::algebra::AlgebraVector;
use crate::error::{Error, Result};
use crate::kernels::{put_vec3, solve_dense, vec3_at, BlockMatrix, Mat3, Vec3};
use crate::lie::hat;

const E3: Vec3 = Vec3::new(0.0, 0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct PendulumParams {
    pub masses: Vec<f64>,
    pub lengths: Vec<f64>,
    pub gravity: f64,
}

impl PendulumParams {
    /// Unit masses and lengths, `g = 9.81`.
    pub fn uniform(n: usize) -> Self {
        Self {
            masses: vec![1.0; n],
            lengths: vec![1.0; n],
            gravity: 9.81,
        }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.is_empty() || self.masses.len() != self.lengths.len() {
            return Err(Error::Config(format!(
                "need matching, non-empty masses and lengths, got {} and {}",
                self.masses.len(),
                self.lengths.len()
            )));
        }
        if self.masses.iter().chain(&self.lengths).any(|x| !(*x > 0.0)) {
            return Err(Error::Config("masses and lengths must be positive".into()));
        }
        Ok(())
    }

    /// `Σ_{k≥i} m_k`.
    fn tail_mass(&self, i: usize) -> f64 {
        self.masses[i..].iter().sum()
    }

    /// Scalar factor of `M_ij`.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.tail_mass(i.max(j)) * self.lengths[i] * self.lengths[j]
    }
}

#[derive(Clone, Debug)]
pub struct Pendulum {
    pub params: PendulumParams,
    action: Ts2Product,
}

impl Pendulum {
    pub fn new(params: PendulumParams) -> Result<Self> {
        params.validate()?;
        let action = Ts2Product::new(params.len());
        Ok(Self { params, action })
    }

    /// Every link starts at `(q, ω) = (√2/2, 0, √2/2, 0, 1, 0)`.
    pub fn standard_initial(n: usize) -> Vec<Ts2Point> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        vec![
            Ts2Point {
                q: Vec3::new(s, 0.0, s),
                omega: Vec3::new(0.0, 1.0, 0.0),
            };
            n
        ]
    }

    pub fn mass_matrix(&self, q: &[Vec3]) -> BlockMatrix {
        let n = self.params.len();
        let mut r = BlockMatrix::zeros(n);
        for i in 0..n {
            r.set_block(i, i, &(Mat3::identity() * self.params.coupling(i, i)));
            for j in i + 1..n {
                let b = hat(&q[i]).transpose() * hat(&q[j]) * self.params.coupling(i, j);
                r.set_block(i, j, &b);
                r.set_block(j, i, &b.transpose());
            }
        }
        r
    }

    /// Right-hand side `g(q, ω)` of `R(q) ω̇ = g`.
    pub fn forcing(&self, m: &[Ts2Point]) -> DVector<f64> {
        let p = &self.params;
        let n = p.len();
        let mut g = DVector::zeros(3 * n);
        for i in 0..n {
            let mut gi = -(m[i].q.cross(&E3)) * (p.tail_mass(i) * p.gravity * p.lengths[i]);
            for j in (0..n).filter(|&j| j != i) {
                gi += m[i].q.cross(&m[j].q) * (p.coupling(i, j) * m[j].omega.norm_squared());
            }
            put_vec3(g.as_mut_slice(), 3 * i, &gi);
        }
        g
    }

    /// `ω̇ = R(q)⁻¹ g(q, ω)`.
    pub fn angular_acceleration(&self, m: &[Ts2Point]) -> Result<DVector<f64>> {
        let q: Vec<Vec3> = m.iter().map(|p| p.q).collect();
        solve_dense(&self.mass_matrix(&q), &self.forcing(m))
    }

    pub fn kinetic_energy(&self, m: &[Ts2Point]) -> f64 {
        let q: Vec<Vec3> = m.iter().map(|p| p.q).collect();
        let w = DVector::from_iterator(
            3 * m.len(),
            m.iter()
                .flat_map(|p| p.omega.iter().copied().collect::<Vec<_>>()),
        );
        0.5 * w.dot(&self.mass_matrix(&q).mul_vec(&w))
    }

    pub fn potential_energy(&self, m: &[Ts2Point]) -> f64 {
        let p = &self.params;
        (0..p.len())
            .map(|i| p.tail_mass(i) * p.gravity * p.lengths[i] * E3.dot(&m[i].q))
            .sum()
    }

    pub fn energy(&self, m: &[Ts2Point]) -> f64 {
        self.kinetic_energy(m) + self.potential_energy(m)
    }

    /// Positions of the masses in space, starting from the fixed point.
    pub fn positions(&self, m: &[Ts2Point]) -> Vec<Vec3> {
        let mut x = Vec3::zeros();
        m.iter()
            .zip(&self.params.lengths)
            .map(|(p, l)| {
                x += p.q * *l;
                x
            })
            .collect()
    }
}

impl FrozenFieldMap<Vec<Ts2Point>> for Pendulum {
    fn eval(&self, _t: f64, m: &Vec<Ts2Point>) -> Result<AlgebraVector> {
        let h = self.angular_acceleration(m)?;
        let mut f = DVector::zeros(6 * m.len());
        for (i, p) in m.iter().enumerate() {
            put_vec3(f.as_mut_slice(), 6 * i, &p.omega);
            put_vec3(
                f.as_mut_slice(),
                6 * i + 3,
                &p.q.cross(&vec3_at(h.as_slice(), 3 * i)),
            );
        }
        Ok(f)
    }
}

impl System for Pendulum {
    type Action = Ts2Product;

    fn action(&self) -> &Ts2Product {
        &self.action
    }

    fn initial_state(&self) -> Vec<Ts2Point> {
        Self::standard_initial(self.params.len())
    }

    fn direct_rhs(&self, _t: f64, m: &Vec<Ts2Point>) -> Result<DVector<f64>> {
        let h = self.angular_acceleration(m)?;
        let mut out = DVector::zeros(6 * m.len());
        for (i, p) in m.iter().enumerate() {
            put_vec3(out.as_mut_slice(), 6 * i, &p.omega.cross(&p.q));
            put_vec3(out.as_mut_slice(), 6 * i + 3, &vec3_at(h.as_slice(), 3 * i));
        }
        Ok(out)
    }

    fn invariant_names(&self) -> Vec<String> {
        ["energy", "sphere_defect", "tangency_defect"]
            .map(String::from)
            .to_vec()
    }

    fn invariants(&self, m: &Vec<Ts2Point>) -> Vec<f64> {
        vec![
            self.energy(m),
            m.iter().map(Ts2Point::norm_defect).fold(0.0, f64::max),
            m.iter().map(Ts2Point::tangency_defect).fold(0.0, f64::max),
        ]
    }
}

//! Direct products of so(3), se(3) and ℝⁿ, with flat coordinates.
//!
//! Every homogeneous space in the crate is acted on by a direct product of a
//! few basic groups. An [`Algebra`] lists the factors; algebra elements are
//! flat `DVector`s laid out factor by factor, and [`GroupElement`] holds one
//! group factor per algebra factor.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::kernels::{vec3_at, Vec3};
use crate::lie::{
    bracket_se3, dexp_se3, dexp_so3, dexpinv_se3, dexpinv_series_with, dexpinv_so3, exp_se3,
    exp_so3, Se3, SE3, SO3,
};

pub type AlgebraVector = DVector<f64>;

/// One factor of a product Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    /// so(3) for SO(3) acting on the left.
    So3,
    /// so(3) for SO(3) acting by right multiplication. A right action of a
    /// group is a left action of its opposite group, whose bracket is the
    /// negated cross product and whose product is reversed.
    So3Opposite,
    /// se(3) with the `(rotation, translation)` layout.
    Se3,
    /// The abelian algebra ℝⁿ of the translation group.
    Euclidean(usize),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::So3 | Factor::So3Opposite => 3,
            Factor::Se3 => 6,
            Factor::Euclidean(n) => *n,
        }
    }
}

/// How `dexp⁻¹` is evaluated inside RKMK schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DexpinvMode {
    /// Closed formulas per factor.
    Exact,
    /// Bernoulli series with the given number of retained terms.
    Series(usize),
}

/// Direct product of basic Lie algebras.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra {
    factors: Vec<Factor>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Algebra {
    pub fn new(factors: Vec<Factor>) -> Self {
        let mut offsets = Vec::with_capacity(factors.len());
        let mut dim = 0;
        for f in &factors {
            offsets.push(dim);
            dim += f.dim();
        }
        Self {
            factors,
            offsets,
            dim,
        }
    }

    pub fn euclidean(n: usize) -> Self {
        Self::new(vec![Factor::Euclidean(n)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Iterates `(factor, offset)` pairs.
    pub fn layout(&self) -> impl Iterator<Item = (Factor, usize)> + '_ {
        self.factors
            .iter()
            .copied()
            .zip(self.offsets.iter().copied())
    }

    pub fn zero(&self) -> AlgebraVector {
        AlgebraVector::zeros(self.dim)
    }

    pub fn check(&self, x: &AlgebraVector) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(format!(
                "element of length {} for an algebra of dimension {}",
                x.len(),
                self.dim
            )))
        }
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> AlgebraVector {
        let mut out = self.zero();
        for (f, o) in self.layout() {
            match f {
                Factor::So3 | Factor::So3Opposite => {
                    let mut c = vec3_at(x.as_slice(), o).cross(&vec3_at(y.as_slice(), o));
                    if f == Factor::So3Opposite {
                        c = -c;
                    }
                    out.fixed_rows_mut::<3>(o).copy_from(&c);
                }
                Factor::Se3 => {
                    let b = bracket_se3(&se3_at(x, o), &se3_at(y, o));
                    put_se3(&mut out, o, &b);
                }
                Factor::Euclidean(_) => {}
            }
        }
        out
    }

    pub fn exp(&self, x: &AlgebraVector) -> GroupElement {
        let parts = self
            .layout()
            .map(|(f, o)| match f {
                Factor::So3 => GroupFactor::Rotation(exp_so3(&vec3_at(x.as_slice(), o))),
                Factor::So3Opposite => {
                    GroupFactor::RotationOpposite(exp_so3(&vec3_at(x.as_slice(), o)))
                }
                Factor::Se3 => GroupFactor::Rigid(exp_se3(&se3_at(x, o))),
                Factor::Euclidean(n) => {
                    GroupFactor::Translation(DVector::from_column_slice(&x.as_slice()[o..o + n]))
                }
            })
            .collect();
        GroupElement { parts }
    }

    pub fn identity(&self) -> GroupElement {
        self.exp(&self.zero())
    }

    /// `dexp⁻¹_u(v)` factor by factor.
    pub fn dexpinv(
        &self,
        u: &AlgebraVector,
        v: &AlgebraVector,
        mode: DexpinvMode,
    ) -> Result<AlgebraVector> {
        if let DexpinvMode::Series(order) = mode {
            return dexpinv_series_with(u, v, order, |a, b| self.bracket(a, b));
        }
        let mut out = v.clone();
        for (f, o) in self.layout() {
            match f {
                Factor::So3 => {
                    let r = dexpinv_so3(&vec3_at(u.as_slice(), o), &vec3_at(v.as_slice(), o))?;
                    out.fixed_rows_mut::<3>(o).copy_from(&r);
                }
                Factor::So3Opposite => {
                    let r = dexpinv_so3(&-vec3_at(u.as_slice(), o), &vec3_at(v.as_slice(), o))?;
                    out.fixed_rows_mut::<3>(o).copy_from(&r);
                }
                Factor::Se3 => {
                    let r = dexpinv_se3(&se3_at(u, o), &se3_at(v, o))?;
                    put_se3(&mut out, o, &r);
                }
                Factor::Euclidean(_) => {}
            }
        }
        Ok(out)
    }

    /// `dexp_u(v)` factor by factor.
    pub fn dexp(&self, u: &AlgebraVector, v: &AlgebraVector) -> Result<AlgebraVector> {
        let mut out = v.clone();
        for (f, o) in self.layout() {
            match f {
                Factor::So3 => {
                    let r = dexp_so3(&vec3_at(u.as_slice(), o), &vec3_at(v.as_slice(), o))?;
                    out.fixed_rows_mut::<3>(o).copy_from(&r);
                }
                Factor::So3Opposite => {
                    let r = dexp_so3(&-vec3_at(u.as_slice(), o), &vec3_at(v.as_slice(), o))?;
                    out.fixed_rows_mut::<3>(o).copy_from(&r);
                }
                Factor::Se3 => {
                    let r = dexp_se3(&se3_at(u, o), &se3_at(v, o))?;
                    put_se3(&mut out, o, &r);
                }
                Factor::Euclidean(_) => {}
            }
        }
        Ok(out)
    }
}

pub fn se3_at(x: &AlgebraVector, offset: usize) -> Se3 {
    Se3::from_slice(&x.as_slice()[offset..offset + 6])
}

pub fn put_se3(x: &mut AlgebraVector, offset: usize, v: &Se3) {
    x.as_mut_slice()[offset..offset + 6].copy_from_slice(&v.to_array());
}

pub fn put_vec3(x: &mut AlgebraVector, offset: usize, v: &Vec3) {
    x.fixed_rows_mut::<3>(offset).copy_from(v);
}

/// One factor of a product group element.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupFactor {
    Rotation(SO3),
    /// Element of the opposite group of SO(3): the matrix is stored as is,
    /// products are taken in reverse order.
    RotationOpposite(SO3),
    Rigid(SE3),
    Translation(DVector<f64>),
}

/// Element of a direct-product group.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    pub parts: Vec<GroupFactor>,
}

impl GroupElement {
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.parts.len() != other.parts.len() {
            return Err(Error::AlgebraMismatch(
                "group elements of different products".into(),
            ));
        }
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| match (a, b) {
                (GroupFactor::Rotation(x), GroupFactor::Rotation(y)) => {
                    Ok(GroupFactor::Rotation(*x * *y))
                }
                (GroupFactor::RotationOpposite(x), GroupFactor::RotationOpposite(y)) => {
                    Ok(GroupFactor::RotationOpposite(*y * *x))
                }
                (GroupFactor::Rigid(x), GroupFactor::Rigid(y)) => Ok(GroupFactor::Rigid(*x * *y)),
                (GroupFactor::Translation(x), GroupFactor::Translation(y))
                    if x.len() == y.len() =>
                {
                    Ok(GroupFactor::Translation(x + y))
                }
                _ => Err(Error::AlgebraMismatch("incompatible group factors".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupElement { parts })
    }

    pub fn inverse(&self) -> GroupElement {
        let parts = self
            .parts
            .iter()
            .map(|p| match p {
                GroupFactor::Rotation(r) => GroupFactor::Rotation(r.inverse()),
                GroupFactor::RotationOpposite(r) => GroupFactor::RotationOpposite(r.inverse()),
                GroupFactor::Rigid(g) => GroupFactor::Rigid(g.inverse()),
                GroupFactor::Translation(t) => GroupFactor::Translation(-t),
            })
            .collect();
        GroupElement { parts }
    }

    pub fn rotation(&self, i: usize) -> &SO3 {
        match &self.parts[i] {
            GroupFactor::Rotation(r) | GroupFactor::RotationOpposite(r) => r,
            other => panic!("factor {i} is not a rotation: {other:?}"),
        }
    }

    pub fn rigid(&self, i: usize) -> &SE3 {
        match &self.parts[i] {
            GroupFactor::Rigid(g) => g,
            other => panic!("factor {i} is not a rigid motion: {other:?}"),
        }
    }

    pub fn translation(&self, i: usize) -> &DVector<f64> {
        match &self.parts[i] {
            GroupFactor::Translation(t) => t,
            other => panic!("factor {i} is not a translation: {other:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(alg: &Algebra, rng: &mut ChaCha8Rng, scale: f64) -> AlgebraVector {
        AlgebraVector::from_fn(alg.dim(), |_, _| rng.gen_range(-scale..scale))
    }

    fn mixed() -> Algebra {
        Algebra::new(vec![
            Factor::Euclidean(2),
            Factor::So3,
            Factor::Se3,
            Factor::So3Opposite,
        ])
    }

    #[test]
    fn layout_and_dim() {
        let a = mixed();
        assert_eq!(a.dim(), 2 + 3 + 6 + 3);
        let offs: Vec<_> = a.layout().map(|(_, o)| o).collect();
        assert_eq!(offs, vec![0, 2, 5, 11]);
        assert!(a.check(&AlgebraVector::zeros(13)).is_err());
    }

    #[test]
    fn exact_dexpinv_agrees_with_series() {
        let a = mixed();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let u = random(&a, &mut rng, 0.1);
            let v = random(&a, &mut rng, 1.0);
            let exact = a.dexpinv(&u, &v, DexpinvMode::Exact).unwrap();
            let series = a.dexpinv(&u, &v, DexpinvMode::Series(8)).unwrap();
            assert!((exact - series).norm() < 1e-12);
        }
    }

    #[test]
    fn dexp_inverts_dexpinv() {
        let a = mixed();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let u = random(&a, &mut rng, 1.0);
            let v = random(&a, &mut rng, 1.0);
            let w = a.dexpinv(&u, &v, DexpinvMode::Exact).unwrap();
            assert!((a.dexp(&u, &w).unwrap() - v).norm() < 1e-11);
        }
    }

    #[test]
    fn group_axioms() {
        let a = mixed();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let g = a.exp(&random(&a, &mut rng, 1.0));
            let h = a.exp(&random(&a, &mut rng, 1.0));
            let k = a.exp(&random(&a, &mut rng, 1.0));
            let lhs = g.compose(&h).unwrap().compose(&k).unwrap();
            let rhs = g.compose(&h.compose(&k).unwrap()).unwrap();
            for (x, y) in lhs.parts.iter().zip(&rhs.parts) {
                match (x, y) {
                    (GroupFactor::Translation(p), GroupFactor::Translation(q)) => {
                        assert!((p - q).norm() < 1e-14)
                    }
                    (GroupFactor::Rigid(p), GroupFactor::Rigid(q)) => {
                        assert!((p.to_homogeneous() - q.to_homogeneous()).abs().max() < 1e-13)
                    }
                    _ => {}
                }
            }
            let e = g.compose(&g.inverse()).unwrap();
            let id = a.identity();
            for (x, y) in e.parts.iter().zip(&id.parts) {
                match (x, y) {
                    (GroupFactor::Rotation(p), GroupFactor::Rotation(q))
                    | (GroupFactor::RotationOpposite(p), GroupFactor::RotationOpposite(q)) => {
                        assert!((p.matrix() - q.matrix()).abs().max() < 1e-14)
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn opposite_bracket_is_negated() {
        let a = Algebra::new(vec![Factor::So3Opposite]);
        let x = AlgebraVector::from_vec(vec![1.0, 0.0, 0.0]);
        let y = AlgebraVector::from_vec(vec![0.0, 1.0, 0.0]);
        assert_eq!(
            a.bracket(&x, &y),
            AlgebraVector::from_vec(vec![0.0, 0.0, -1.0])
        );
    }
}

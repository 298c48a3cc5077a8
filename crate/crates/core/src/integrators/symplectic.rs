//! A one-parameter family of symplectic integrators on `T*G ≅ G ⋉ 𝔤*`.
//!
//! The state is `(g, μ)` with `μ` the right-trivialized momentum. One step
//! solves for `(ξ, n̄)` in
//!
//! ```text
//! M      = dexp*_{−ξ}(μ₀ + Ad*_{exp(θξ)} n̄) − θ dexp*_{−θξ} Ad*_{exp(θξ)} n̄
//! (ξ, n̄) = h f(exp(θξ) g₀, M)
//! ```
//!
//! and updates `(g₁, μ₁) = (exp ξ, Ad*_{exp((θ−1)ξ)} n̄) · (g₀, μ₀)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{solve_dense, vec3_at, BlockMatrix, Vec3};
use crate::lie::{coAd_so3, dexp_star_so3, exp_so3, SO3};

/// The pieces of a matrix Lie group the symplectic step needs. Algebra and
/// dual elements are flat vectors of length [`Self::dim`].
pub trait CotangentGroup: Sync {
    type G: Clone + Send + Sync + std::fmt::Debug;

    fn dim(&self) -> usize;
    fn exp(&self, xi: &DVector<f64>) -> Self::G;
    fn mul(&self, a: &Self::G, b: &Self::G) -> Self::G;
    /// `Ad*_g μ`, defined by `⟨Ad*_g μ, ξ⟩ = ⟨μ, Ad_g ξ⟩`.
    fn co_ad(&self, g: &Self::G, mu: &DVector<f64>) -> DVector<f64>;
    /// `dexp*_u μ`, defined by `⟨dexp*_u μ, v⟩ = ⟨μ, dexp_u v⟩`.
    fn dexp_star(&self, u: &DVector<f64>, mu: &DVector<f64>) -> Result<DVector<f64>>;
}

/// SO(3), with `Ad*_g μ = gᵀμ`.
#[derive(Clone, Copy, Debug, Default)]
pub struct So3Group;

impl CotangentGroup for So3Group {
    type G = SO3;

    fn dim(&self) -> usize {
        3
    }

    fn exp(&self, xi: &DVector<f64>) -> SO3 {
        exp_so3(&vec3_at(xi.as_slice(), 0))
    }

    fn mul(&self, a: &SO3, b: &SO3) -> SO3 {
        *a * *b
    }

    fn co_ad(&self, g: &SO3, mu: &DVector<f64>) -> DVector<f64> {
        v3(&coAd_so3(g, &vec3_at(mu.as_slice(), 0)))
    }

    fn dexp_star(&self, u: &DVector<f64>, mu: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(v3(&dexp_star_so3(
            &vec3_at(u.as_slice(), 0),
            &vec3_at(mu.as_slice(), 0),
        )?))
    }
}

/// The direct product `SO(3) × ℝ³`.
#[derive(Clone, Copy, Debug, Default)]
pub struct So3TimesR3;

impl CotangentGroup for So3TimesR3 {
    type G = (SO3, Vec3);

    fn dim(&self) -> usize {
        6
    }

    fn exp(&self, xi: &DVector<f64>) -> (SO3, Vec3) {
        (
            exp_so3(&vec3_at(xi.as_slice(), 0)),
            vec3_at(xi.as_slice(), 3),
        )
    }

    fn mul(&self, a: &(SO3, Vec3), b: &(SO3, Vec3)) -> (SO3, Vec3) {
        (a.0 * b.0, a.1 + b.1)
    }

    fn co_ad(&self, g: &(SO3, Vec3), mu: &DVector<f64>) -> DVector<f64> {
        let r = coAd_so3(&g.0, &vec3_at(mu.as_slice(), 0));
        join(&r, &vec3_at(mu.as_slice(), 3))
    }

    fn dexp_star(&self, u: &DVector<f64>, mu: &DVector<f64>) -> Result<DVector<f64>> {
        let r = dexp_star_so3(&vec3_at(u.as_slice(), 0), &vec3_at(mu.as_slice(), 0))?;
        Ok(join(&r, &vec3_at(mu.as_slice(), 3)))
    }
}

fn v3(v: &Vec3) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

fn join(a: &Vec3, b: &Vec3) -> DVector<f64> {
    DVector::from_iterator(6, a.iter().chain(b.iter()).copied())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    FixedPoint,
    /// Newton's method with a forward-difference Jacobian.
    Newton,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub method: SolveMethod,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iter: 100,
            method: SolveMethod::Newton,
        }
    }
}

/// Hamiltonian frozen-field map `(g, μ) ↦ (∂H/∂μ, −R*_g ∂H/∂g)`.
pub trait HamiltonianMap<G>: Sync {
    fn eval(&self, g: &G, mu: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)>;
}

impl<G, F> HamiltonianMap<G> for F
where
    F: Fn(&G, &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> + Sync,
{
    fn eval(&self, g: &G, mu: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        self(g, mu)
    }
}

#[derive(Clone, Debug)]
pub struct SymplecticStep<G> {
    pub g: G,
    pub mu: DVector<f64>,
    pub iterations: usize,
}

/// The map `z = (ξ, n̄) ↦ h f(exp(θξ) g₀, M_θ)`.
fn implicit_map<C, F>(
    group: &C,
    f: &F,
    theta: f64,
    g0: &C::G,
    mu0: &DVector<f64>,
    h: f64,
    z: &DVector<f64>,
) -> Result<DVector<f64>>
where
    C: CotangentGroup,
    F: HamiltonianMap<C::G> + ?Sized,
{
    let d = group.dim();
    let xi = z.rows(0, d).into_owned();
    let nbar = z.rows(d, d).into_owned();
    let e_theta = group.exp(&(&xi * theta));
    let ad_n = group.co_ad(&e_theta, &nbar);
    let m =
        group.dexp_star(&-&xi, &(mu0 + &ad_n))? - group.dexp_star(&(&xi * -theta), &ad_n)? * theta;
    let (f1, f2) = f.eval(&group.mul(&e_theta, g0), &m)?;
    if f1.len() != d || f2.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: f1.len().max(f2.len()),
        });
    }
    Ok(DVector::from_iterator(
        2 * d,
        f1.iter().chain(f2.iter()).map(|x| h * x),
    ))
}

pub fn symplectic_step<C, F>(
    group: &C,
    f: &F,
    theta: f64,
    g0: &C::G,
    mu0: &DVector<f64>,
    h: f64,
    cfg: &SolveConfig,
) -> Result<SymplecticStep<C::G>>
where
    C: CotangentGroup,
    F: HamiltonianMap<C::G> + ?Sized,
{
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Config(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::Config(format!(
            "solver tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    let d = group.dim();
    let phi = |z: &DVector<f64>| implicit_map(group, f, theta, g0, mu0, h, z);
    let mut z = DVector::zeros(2 * d);
    let mut last = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let next = match cfg.method {
            SolveMethod::FixedPoint => phi(&z)?,
            SolveMethod::Newton => {
                let r = &z - phi(&z)?;
                let jac = residual_jacobian(&phi, &z, &r)?;
                let dz = solve_dense(&BlockMatrix::from_dense(jac)?, &r)?;
                &z - dz
            }
        };
        last = (&next - &z).norm();
        let done = last <= cfg.tol * (1.0 + next.norm());
        z = next;
        if !last.is_finite() {
            break;
        }
        if done {
            let xi = z.rows(0, d).into_owned();
            let nbar = z.rows(d, d).into_owned();
            let g = group.mul(&group.exp(&xi), g0);
            let mu = group.co_ad(&group.exp(&(&xi * (theta - 1.0))), &nbar)
                + group.co_ad(&group.exp(&-&xi), mu0);
            return Ok(SymplecticStep { g, mu, iterations });
        }
    }
    Err(Error::NonConvergence {
        iterations,
        residual: last,
    })
}

/// Forward-difference Jacobian of `z ↦ z − φ(z)`.
fn residual_jacobian<P>(phi: &P, z: &DVector<f64>, r: &DVector<f64>) -> Result<DMatrix<f64>>
where
    P: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let n = z.len();
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let delta = f64::EPSILON.sqrt() * z[j].abs().max(1.0);
        let mut zp = z.clone();
        zp[j] += delta;
        let rp = &zp - phi(&zp)?;
        jac.set_column(j, &((rp - r) / delta));
    }
    Ok(jac)
}

/// `n_steps` uniform steps; returns the states including the initial one.
pub fn symplectic_integrate<C, F>(
    group: &C,
    f: &F,
    theta: f64,
    g0: &C::G,
    mu0: &DVector<f64>,
    h: f64,
    n_steps: usize,
    cfg: &SolveConfig,
) -> Result<Vec<(C::G, DVector<f64>)>>
where
    C: CotangentGroup,
    F: HamiltonianMap<C::G> + ?Sized,
{
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push((g0.clone(), mu0.clone()));
    for _ in 0..n_steps {
        let (g, mu) = out.last().expect("non-empty");
        let s = symplectic_step(group, f, theta, g, mu, h, cfg)?;
        out.push((s.g, s.mu));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Mat3;
    use crate::lie::{dexp_so3, exp_so3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rv(rng: &mut ChaCha8Rng, n: usize, s: f64) -> DVector<f64> {
        DVector::from_fn(n, |_, _| rng.gen_range(-s..s))
    }

    #[test]
    fn dual_maps_pair_correctly() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let grp = So3Group;
        for _ in 0..20 {
            let (u, v, mu) = (
                rv(&mut rng, 3, 1.0),
                rv(&mut rng, 3, 1.0),
                rv(&mut rng, 3, 1.0),
            );
            let lhs = grp.dexp_star(&u, &mu).unwrap().dot(&v);
            let dv = dexp_so3(&vec3_at(u.as_slice(), 0), &vec3_at(v.as_slice(), 0)).unwrap();
            assert!((lhs - mu.dot(&v3(&dv))).abs() < 1e-13);
            let g = grp.exp(&u);
            // Ad_g ξ = gξ on so(3)
            let lhs = grp.co_ad(&g, &mu).dot(&v);
            assert!((lhs - mu.dot(&v3(&g.apply(&vec3_at(v.as_slice(), 0))))).abs() < 1e-13);
        }
    }

    fn free_body() -> impl Fn(&SO3, &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        // Spatial free rigid body: ω = Q𝕀⁻¹Qᵀπ, and −R*∂H/∂Q = π × ω.
        let inv = Mat3::from_diagonal(&Vec3::new(1.0, 0.5, 1.0 / 3.0));
        move |q: &SO3, pi: &DVector<f64>| {
            let p = vec3_at(pi.as_slice(), 0);
            let w = q.matrix() * inv * q.matrix().transpose() * p;
            Ok((v3(&w), v3(&p.cross(&w))))
        }
    }

    #[test]
    fn zero_field_keeps_state() {
        let f = |_q: &SO3, _m: &DVector<f64>| Ok((DVector::zeros(3), DVector::zeros(3)));
        let g0 = exp_so3(&Vec3::new(0.3, -0.2, 0.1));
        let mu0 = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        for method in [SolveMethod::FixedPoint, SolveMethod::Newton] {
            let cfg = SolveConfig {
                method,
                ..SolveConfig::default()
            };
            let s = symplectic_step(&So3Group, &f, 0.5, &g0, &mu0, 0.1, &cfg).unwrap();
            assert_eq!(s.g, g0);
            assert_eq!(s.mu, mu0);
        }
    }

    #[test]
    fn fixed_point_and_newton_agree() {
        let f = free_body();
        let g0 = exp_so3(&Vec3::new(0.3, -0.2, 0.1));
        let mu0 = DVector::from_vec(vec![0.4, 1.0, -0.3]);
        for theta in [0.0, 0.5, 1.0] {
            let a = symplectic_step(
                &So3Group,
                &f,
                theta,
                &g0,
                &mu0,
                0.05,
                &SolveConfig {
                    method: SolveMethod::FixedPoint,
                    ..SolveConfig::default()
                },
            )
            .unwrap();
            let b = symplectic_step(
                &So3Group,
                &f,
                theta,
                &g0,
                &mu0,
                0.05,
                &SolveConfig::default(),
            )
            .unwrap();
            assert!((a.mu - b.mu).norm() < 1e-12);
            assert!((a.g.matrix() - b.g.matrix()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn spatial_momentum_conserved_for_free_body() {
        // With no potential π is constant in space: f₂ − ad*_{f₁}π = 0.
        let f = free_body();
        let g0 = SO3::identity();
        let mu0 = DVector::from_vec(vec![0.4, 1.0, -0.3]);
        let traj = symplectic_integrate(
            &So3Group,
            &f,
            0.5,
            &g0,
            &mu0,
            0.05,
            200,
            &SolveConfig::default(),
        )
        .unwrap();
        let (g, mu) = traj.last().unwrap();
        assert!((mu - &mu0).norm() < 1e-10);
        assert!(g.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn midpoint_round_trip() {
        let f = free_body();
        let g0 = exp_so3(&Vec3::new(0.1, 0.2, 0.3));
        let mu0 = DVector::from_vec(vec![0.4, 1.0, -0.3]);
        let cfg = SolveConfig::default();
        let fwd = symplectic_integrate(&So3Group, &f, 0.5, &g0, &mu0, 0.05, 40, &cfg).unwrap();
        let (g1, mu1) = fwd.last().unwrap();
        let back = symplectic_integrate(&So3Group, &f, 0.5, g1, mu1, -0.05, 40, &cfg).unwrap();
        let (g2, mu2) = back.last().unwrap();
        assert!((mu2 - &mu0).norm() < 1e-8);
        assert!((g2.matrix() - g0.matrix()).abs().max() < 1e-8);
    }

    #[test]
    fn divergence_is_reported() {
        let f = free_body();
        let mu0 = DVector::from_vec(vec![40.0, 100.0, -30.0]);
        let cfg = SolveConfig {
            method: SolveMethod::FixedPoint,
            max_iter: 30,
            ..SolveConfig::default()
        };
        let err =
            symplectic_step(&So3Group, &f, 0.0, &SO3::identity(), &mu0, 0.02, &cfg).unwrap_err();
        assert!(
            matches!(err, Error::NonConvergence { .. } | Error::Branch(_)),
            "{err:?}"
        );
        // Newton handles the same step
        assert!(symplectic_step(
            &So3Group,
            &f,
            0.0,
            &SO3::identity(),
            &mu0,
            0.02,
            &SolveConfig::default()
        )
        .is_ok());
        assert!(symplectic_step(&So3Group, &f, 1.5, &SO3::identity(), &mu0, 0.5, &cfg).is_err());
    }
}

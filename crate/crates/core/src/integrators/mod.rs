//! One-step Lie group integrators.
//!
//! Every scheme is written once against [`HomogeneousAction`] and a
//! [`FrozenFieldMap`]; a step only ever moves a point through
//! `act(exp(σ), ·)`, so iterates stay on the manifold.

mod adaptive;
pub mod symplectic;
mod tableau;

pub use adaptive::{
    adaptive_integrate, controller_update, fixed_integrate, AdaptiveRun, ControllerConfig, StepLog,
    Trajectory,
};
pub use tableau::Tableau;

use crate::actions::{FrozenFieldMap, HomogeneousAction};
use crate::algebra::{AlgebraVector, DexpinvMode};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct StepResult<P> {
    pub y_next: P,
    pub y_aux: Option<P>,
    pub error_estimate: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scheme {
    LieEuler,
    Heun,
    /// Runge–Kutta–Munthe-Kaas over an explicit tableau.
    Rkmk(Tableau, DexpinvMode),
    /// Four stages, two commutators, order four.
    Rkmk4TwoCommutator,
    Cf4,
    Cf32A,
    Cf32B,
    Cf43,
}

/// Names accepted by [`Scheme::from_name`].
pub const SCHEME_NAMES: &[&str] = &[
    "lie-euler",
    "heun",
    "rkmk3",
    "rkmk4",
    "rkmk4-2c",
    "rkmk5",
    "rkmk54",
    "cf4",
    "cf32a",
    "cf32b",
    "cf43",
];

impl Scheme {
    pub fn rkmk(tableau: Tableau) -> Self {
        Scheme::Rkmk(tableau, DexpinvMode::Exact)
    }

    pub fn rkmk54() -> Self {
        Self::rkmk(Tableau::dopri54())
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "lie-euler" => Scheme::LieEuler,
            "heun" => Scheme::Heun,
            "rkmk3" => Self::rkmk(Tableau::rk3()),
            "rkmk4" => Self::rkmk(Tableau::rk4()),
            "rkmk4-2c" => Scheme::Rkmk4TwoCommutator,
            "rkmk5" => Self::rkmk(Tableau::dopri5()),
            "rkmk54" => Self::rkmk54(),
            "cf4" => Scheme::Cf4,
            "cf32a" => Scheme::Cf32A,
            "cf32b" => Scheme::Cf32B,
            "cf43" => Scheme::Cf43,
            other => {
                return Err(Error::Config(format!(
                    "unknown method `{other}` (expected one of {})",
                    SCHEME_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn order(&self) -> usize {
        match self {
            Scheme::LieEuler => 1,
            Scheme::Heun => 2,
            Scheme::Rkmk(t, _) => t.order,
            Scheme::Rkmk4TwoCommutator | Scheme::Cf4 | Scheme::Cf43 => 4,
            Scheme::Cf32A | Scheme::Cf32B => 3,
        }
    }

    pub fn embedded_order(&self) -> Option<usize> {
        match self {
            Scheme::Rkmk(t, _) => t.embedded_order,
            Scheme::Cf32A | Scheme::Cf32B => Some(2),
            Scheme::Cf43 => Some(3),
            _ => None,
        }
    }

    pub fn step<A, F>(
        &self,
        action: &A,
        f: &F,
        t: f64,
        y: &A::Point,
        h: f64,
    ) -> Result<StepResult<A::Point>>
    where
        A: HomogeneousAction,
        F: FrozenFieldMap<A::Point> + ?Sized,
    {
        match self {
            Scheme::LieEuler => lie_euler(action, f, t, y, h),
            Scheme::Heun => heun(action, f, t, y, h),
            Scheme::Rkmk(tab, mode) => rkmk(action, f, t, y, h, tab, *mode),
            Scheme::Rkmk4TwoCommutator => rkmk4_two_commutator(action, f, t, y, h),
            Scheme::Cf4 => cf4(action, f, t, y, h, false),
            Scheme::Cf43 => cf4(action, f, t, y, h, true),
            Scheme::Cf32A => cf32(action, f, t, y, h, false),
            Scheme::Cf32B => cf32(action, f, t, y, h, true),
        }
    }
}

fn eval<A, F>(action: &A, f: &F, t: f64, y: &A::Point) -> Result<AlgebraVector>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let v = f.eval(t, y)?;
    action.algebra().check(&v)?;
    Ok(v)
}

fn single<P>(y_next: P) -> StepResult<P> {
    StepResult {
        y_next,
        y_aux: None,
        error_estimate: None,
    }
}

/// Ambient Euclidean distance, used as the error measure of commutator-free pairs.
pub fn ambient_distance<A: HomogeneousAction>(action: &A, a: &A::Point, b: &A::Point) -> f64 {
    (action.coords(a) - action.coords(b)).norm()
}

pub fn lie_euler<A, F>(
    action: &A,
    f: &F,
    t: f64,
    y: &A::Point,
    h: f64,
) -> Result<StepResult<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let f1 = eval(action, f, t, y)?;
    Ok(single(action.exp_act(&(f1 * h), y)))
}

pub fn heun<A, F>(action: &A, f: &F, t: f64, y: &A::Point, h: f64) -> Result<StepResult<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let f1 = eval(action, f, t, y)?;
    let y2 = action.exp_act(&(&f1 * h), y);
    let f2 = eval(action, f, t + h, &y2)?;
    Ok(single(action.exp_act(&((f1 + f2) * (0.5 * h)), y)))
}

pub fn rkmk<A, F>(
    action: &A,
    f: &F,
    t: f64,
    y: &A::Point,
    h: f64,
    tab: &Tableau,
    mode: DexpinvMode,
) -> Result<StepResult<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let alg = action.algebra();
    let mut k: Vec<AlgebraVector> = Vec::with_capacity(tab.stages());
    for (i, row) in tab.a.iter().enumerate() {
        let mut sigma = alg.zero();
        for (aij, kj) in row.iter().zip(&k) {
            if *aij != 0.0 {
                sigma.axpy(h * aij, kj, 1.0);
            }
        }
        let fi = if i == 0 {
            eval(action, f, t, y)?
        } else {
            eval(action, f, t + tab.c[i] * h, &action.exp_act(&sigma, y))?
        };
        k.push(if i == 0 {
            fi
        } else {
            alg.dexpinv(&sigma, &fi, mode)?
        });
    }
    let combine = |w: &[f64]| {
        let mut s = alg.zero();
        for (wi, ki) in w.iter().zip(&k) {
            if *wi != 0.0 {
                s.axpy(h * wi, ki, 1.0);
            }
        }
        s
    };
    let sigma = combine(&tab.b);
    let y_next = action.exp_act(&sigma, y);
    match &tab.b_hat {
        None => Ok(single(y_next)),
        Some(bh) => {
            let sigma_hat = combine(bh);
            Ok(StepResult {
                y_next,
                y_aux: Some(action.exp_act(&sigma_hat, y)),
                error_estimate: Some((sigma - sigma_hat).norm()),
            })
        }
    }
}

pub fn rkmk4_two_commutator<A, F>(
    action: &A,
    f: &F,
    t: f64,
    y: &A::Point,
    h: f64,
) -> Result<StepResult<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let alg = action.algebra();
    let k1 = eval(action, f, t, y)? * h;
    let k2 = eval(action, f, t + 0.5 * h, &action.exp_act(&(&k1 * 0.5), y))? * h;
    let u3 = &k2 * 0.5 - alg.bracket(&k1, &k2) * 0.125;
    let k3 = eval(action, f, t + 0.5 * h, &action.exp_act(&u3, y))? * h;
    let k4 = eval(action, f, t + h, &action.exp_act(&k3, y))? * h;
    let sigma = (&k1 + &k2 * 2.0 + &k3 * 2.0 + &k4 - alg.bracket(&k1, &k4) * 0.5) / 6.0;
    Ok(single(action.exp_act(&sigma, y)))
}

/// The fourth-order commutator-free scheme; with `embedded` it also forms the
/// third-order auxiliary solution from one extra stage.
pub fn cf4<A, F>(
    action: &A,
    f: &F,
    t: f64,
    y: &A::Point,
    h: f64,
    embedded: bool,
) -> Result<StepResult<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let f1 = eval(action, f, t, y)?;
    let y2 = action.exp_act(&(&f1 * (0.5 * h)), y);
    let f2 = eval(action, f, t + 0.5 * h, &y2)?;
    let y3 = action.exp_act(&(&f2 * (0.5 * h)), y);
    let f3 = eval(action, f, t + 0.5 * h, &y3)?;
    let y4 = action.exp_act(&((&f3 - &f1 * 0.5) * h), &y2);
    let f4 = eval(action, f, t + h, &y4)?;
    let w = h / 12.0;
    let y_half = action.exp_act(&((&f1 * 3.0 + &f2 * 2.0 + &f3 * 2.0 - &f4) * w), y);
    let y_next = action.exp_act(&((-&f1 + &f2 * 2.0 + &f3 * 2.0 + &f4 * 3.0) * w), &y_half);
    if !embedded {
        return Ok(single(y_next));
    }
    let y3_bar = action.exp_act(&(&f2 * (0.75 * h)), y);
    let f3_bar = eval(action, f, t + 0.75 * h, &y3_bar)?;
    let inner = action.exp_act(&(&f1 * (h / 3.0)), y);
    let y_aux = action.exp_act(&((-&f1 + &f2 * 3.0 + f3_bar * 4.0) * (h / 9.0)), &inner);
    let e = ambient_distance(action, &y_next, &y_aux);
    Ok(StepResult {
        y_next,
        y_aux: Some(y_aux),
        error_estimate: Some(e),
    })
}

/// The 3(2) commutator-free pairs: variant A reuses the second stage in the
/// update, variant B the third.
pub fn cf32<A, F>(
    action: &A,
    f: &F,
    t: f64,
    y: &A::Point,
    h: f64,
    variant_b: bool,
) -> Result<StepResult<A::Point>>
where
    A: HomogeneousAction,
    F: FrozenFieldMap<A::Point> + ?Sized,
{
    let f1 = eval(action, f, t, y)?;
    let (y_next, y_aux) = if !variant_b {
        let y2 = action.exp_act(&(&f1 * (h / 3.0)), y);
        let f2 = eval(action, f, t + h / 3.0, &y2)?;
        let y3 = action.exp_act(&(&f2 * (2.0 * h / 3.0)), y);
        let f3 = eval(action, f, t + 2.0 * h / 3.0, &y3)?;
        let y_next = action.exp_act(&((&f1 * (-1.0 / 12.0) + &f3 * 0.75) * h), &y2);
        let y_aux = action.exp_act(&((f2 + f3) * (0.5 * h)), y);
        (y_next, y_aux)
    } else {
        let y2 = action.exp_act(&(&f1 * (2.0 * h / 3.0)), y);
        let f2 = eval(action, f, t + 2.0 * h / 3.0, &y2)?;
        let y3 = action.exp_act(&((&f1 * (5.0 / 12.0) + &f2 * 0.25) * h), y);
        let f3 = eval(action, f, t + 2.0 * h / 3.0, &y3)?;
        let y_next = action.exp_act(&((&f1 * (-1.0 / 6.0) - &f2 * 0.5 + &f3) * h), &y3);
        let y_aux = action.exp_act(&((f1 + f3 * 3.0) * (0.25 * h)), y);
        (y_next, y_aux)
    };
    let e = ambient_distance(action, &y_next, &y_aux);
    Ok(StepResult {
        y_next,
        y_aux: Some(y_aux),
        error_estimate: Some(e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{Translation, Ts2Point, Ts2Product};
    use crate::kernels::Vec3;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_schemes() -> Vec<Scheme> {
        SCHEME_NAMES
            .iter()
            .map(|n| Scheme::from_name(n).unwrap())
            .collect()
    }

    fn pendulum_point(rng: &mut ChaCha8Rng) -> Vec<Ts2Point> {
        (0..2)
            .map(|_| {
                let q =
                    Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.5).normalize();
                let w = Vec3::new(rng.gen_range(-1.0..1.0), 1.0, rng.gen_range(-1.0..1.0));
                Ts2Point::new(q, w - q * q.dot(&w)).unwrap()
            })
            .collect()
    }

    #[test]
    fn constant_field_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let action = Ts2Product::new(2);
        let y = pendulum_point(&mut rng);
        let xi = DVector::from_fn(12, |_, _| rng.gen_range(-2.0..2.0));
        let f = |_t: f64, _m: &Vec<Ts2Point>| Ok(xi.clone());
        let h = 0.3;
        let exact = action.coords(&action.exp_act(&(&xi * h), &y));
        for s in all_schemes() {
            let r = s.step(&action, &f, 0.0, &y, h).unwrap();
            assert!((action.coords(&r.y_next) - &exact).norm() <= 1e-13, "{s:?}");
            if let Some(aux) = r.y_aux {
                assert!((action.coords(&aux) - &exact).norm() <= 1e-13, "{s:?}");
                assert!(r.error_estimate.unwrap() <= 1e-13);
            }
        }
    }

    #[test]
    fn zero_field_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let action = Ts2Product::new(2);
        let y = pendulum_point(&mut rng);
        let f = |_t: f64, _m: &Vec<Ts2Point>| Ok(DVector::zeros(12));
        for s in all_schemes() {
            let r = s.step(&action, &f, 0.0, &y, 0.1).unwrap();
            assert_eq!(r.y_next, y);
        }
    }

    /// Plain explicit Runge–Kutta on ℝⁿ, used as an independent oracle.
    fn classical_rk(
        tab: &Tableau,
        f: impl Fn(f64, &DVector<f64>) -> DVector<f64>,
        t: f64,
        y: &DVector<f64>,
        h: f64,
        w: &[f64],
    ) -> DVector<f64> {
        let mut k: Vec<DVector<f64>> = Vec::new();
        for (i, row) in tab.a.iter().enumerate() {
            let mut yi = y.clone();
            for (a, kj) in row.iter().zip(&k) {
                yi += kj * (h * a);
            }
            k.push(f(t + tab.c[i] * h, &yi));
        }
        let mut out = y.clone();
        for (b, ki) in w.iter().zip(&k) {
            out += ki * (h * b);
        }
        out
    }

    fn lotka(t: f64, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![
            y[0] * (1.0 - y[1]) + 0.1 * t.sin(),
            y[1] * (y[0] - 1.0),
            -y[2] * y[0] + t,
        ])
    }

    #[test]
    fn translation_reduces_to_classical_rk() {
        let action = Translation::new(3);
        let f = |t: f64, y: &DVector<f64>| Ok(lotka(t, y));
        let y = DVector::from_vec(vec![1.3, 0.7, -0.4]);
        let (t, h) = (0.2, 0.15);
        let heun3 = Tableau::new(
            "heun3",
            vec![vec![], vec![1.0 / 3.0], vec![0.0, 2.0 / 3.0]],
            vec![0.25, 0.0, 0.75],
            None,
            3,
            None,
        )
        .unwrap();
        let cf32b = Tableau::new(
            "cf32b",
            vec![vec![], vec![2.0 / 3.0], vec![5.0 / 12.0, 0.25]],
            vec![0.25, -0.25, 1.0],
            None,
            3,
            None,
        )
        .unwrap();
        let cases: Vec<(Scheme, Tableau, Vec<f64>, Option<(Tableau, Vec<f64>)>)> = vec![
            (
                Scheme::LieEuler,
                Tableau::new("e", vec![vec![]], vec![1.0], None, 1, None).unwrap(),
                vec![1.0],
                None,
            ),
            (
                Scheme::Heun,
                Tableau::new("h", vec![vec![], vec![1.0]], vec![0.5, 0.5], None, 2, None).unwrap(),
                vec![0.5, 0.5],
                None,
            ),
            (
                Scheme::rkmk(Tableau::rk3()),
                Tableau::rk3(),
                Tableau::rk3().b,
                None,
            ),
            (
                Scheme::rkmk(Tableau::rk4()),
                Tableau::rk4(),
                Tableau::rk4().b,
                None,
            ),
            (
                Scheme::Rkmk4TwoCommutator,
                Tableau::rk4(),
                Tableau::rk4().b,
                None,
            ),
            (Scheme::Cf4, Tableau::rk4(), Tableau::rk4().b, None),
            (
                Scheme::rkmk54(),
                Tableau::dopri54(),
                Tableau::dopri54().b,
                Some((Tableau::dopri54(), Tableau::dopri54().b_hat.unwrap())),
            ),
            (
                Scheme::Cf32A,
                heun3.clone(),
                heun3.b.clone(),
                Some((heun3.clone(), vec![0.0, 0.5, 0.5])),
            ),
            (
                Scheme::Cf32B,
                cf32b.clone(),
                cf32b.b.clone(),
                Some((cf32b.clone(), vec![0.25, 0.0, 0.75])),
            ),
        ];
        for (scheme, tab, w, aux) in cases {
            let r = scheme.step(&action, &f, t, &y, h).unwrap();
            let want = classical_rk(&tab, lotka, t, &y, h, &w);
            assert!((&r.y_next - want).norm() <= 1e-12, "{scheme:?}");
            if let Some((ta, wa)) = aux {
                let want = classical_rk(&ta, lotka, t, &y, h, &wa);
                assert!((r.y_aux.unwrap() - want).norm() <= 1e-12, "{scheme:?} aux");
            }
        }
        // CF43 auxiliary: y + h(2/9 f₁ + 1/3 f₂ + 4/9 f̄₃) with f̄₃ at c = 3/4
        let r = Scheme::Cf43.step(&action, &f, t, &y, h).unwrap();
        let cf43 = Tableau::new(
            "cf43",
            vec![vec![], vec![0.5], vec![0.0, 0.75]],
            vec![2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0],
            None,
            3,
            None,
        )
        .unwrap();
        let want = classical_rk(&cf43, lotka, t, &y, h, &cf43.b);
        assert!((r.y_aux.unwrap() - want).norm() <= 1e-12);
    }

    #[test]
    fn series_dexpinv_matches_exact_for_small_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let action = Ts2Product::new(2);
        let y = pendulum_point(&mut rng);
        let f = |_t: f64, m: &Vec<Ts2Point>| {
            let mut v = DVector::zeros(12);
            for (i, p) in m.iter().enumerate() {
                v.fixed_rows_mut::<3>(6 * i).copy_from(&(p.omega + p.q));
                v.fixed_rows_mut::<3>(6 * i + 3)
                    .copy_from(&p.q.cross(&Vec3::z()));
            }
            Ok(v)
        };
        let exact = Scheme::rkmk(Tableau::rk4())
            .step(&action, &f, 0.0, &y, 0.01)
            .unwrap();
        let series = Scheme::Rkmk(Tableau::rk4(), DexpinvMode::Series(5))
            .step(&action, &f, 0.0, &y, 0.01)
            .unwrap();
        let d = ambient_distance(&action, &exact.y_next, &series.y_next);
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(Scheme::from_name("rk45"), Err(Error::Config(_))));
        for n in SCHEME_NAMES {
            let s = Scheme::from_name(n).unwrap();
            assert!(s.order() >= 1);
        }
    }
}

//! Benchmark mechanical systems: the heavy top in four formulations, the
//! N-fold spherical pendulum and two quadrotors carrying a point mass.

mod heavy_top;
mod pendulum;
mod quadrotor;

pub use heavy_top::{
    HeavyTopBody, HeavyTopExt, HeavyTopLiePoisson, HeavyTopParams, HeavyTopSpatial,
};
pub use pendulum::{Pendulum, PendulumParams};
pub use quadrotor::{ConstantControls, Controls, QuadParams, Quadrotor, ZeroControls};

use nalgebra::DVector;

use crate::actions::{FrozenFieldMap, HomogeneousAction};
use crate::error::Result;

pub type PointOf<S> = <<S as System>::Action as HomogeneousAction>::Point;

/// A vector field on a homogeneous space, given by its frozen field map,
/// together with the quantities worth monitoring along a trajectory.
pub trait System: FrozenFieldMap<PointOf<Self>> + Sync {
    type Action: HomogeneousAction;

    fn action(&self) -> &Self::Action;

    fn initial_state(&self) -> PointOf<Self>;

    /// The vector field in ambient coordinates, written directly from the
    /// equations of motion rather than through the action.
    fn direct_rhs(&self, t: f64, m: &PointOf<Self>) -> Result<DVector<f64>>;

    fn invariant_names(&self) -> Vec<String>;

    fn invariants(&self, m: &PointOf<Self>) -> Vec<f64>;
}

/// Derivative of `phi` along the field at `m`, by a central difference
/// along the frozen flow `ε ↦ exp(ε f(m))·m`, which stays on the manifold
/// and is tangent to the field at `ε = 0`. One Richardson step removes the
/// `ε²` term.
pub fn derivative_along_field<S, P>(
    sys: &S,
    t: f64,
    m: &PointOf<S>,
    phi: P,
    eps: f64,
) -> Result<f64>
where
    S: System,
    P: Fn(&PointOf<S>) -> f64,
{
    let xi = sys.eval(t, m)?;
    let a = sys.action();
    let central = |e: f64| {
        let plus = phi(&a.exp_act(&(&xi * e), m));
        let minus = phi(&a.exp_act(&(&xi * -e), m));
        (plus - minus) / (2.0 * e)
    };
    Ok((4.0 * central(0.5 * eps) - central(eps)) / 3.0)
}

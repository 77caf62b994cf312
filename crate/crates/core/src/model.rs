//! The extended Blasius problem
//!
//! ```text
//! f''' + f f'' = 0,   f(0) = 0,   f'(0) = P1 + P2 f''(0),   f'(∞) = 1
//! ```
//!
//! and the scaling group `f* = λ f`, `η* = η / λ`, `P1* = λ² P1`,
//! `P2* = λ⁻¹ P2` that leaves the equation and both wall conditions
//! invariant. Derivatives transform as `dᵏf/dηᵏ = λ^-(k+1) dᵏf*/dη*ᵏ`.

use crate::error::{Error, Result};
use crate::ode::Trajectory;
use crate::scalar::Scalar;

/// Trajectory of `(f, f', f'')` on a uniform grid.
pub type Profile<T> = Trajectory<T, 3>;

/// `(f, f', f'')` at one grid node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState<T> {
    pub f: T,
    pub df: T,
    pub d2f: T,
}

impl<T: Scalar> PhaseState<T> {
    pub fn new(f: T, df: T, d2f: T) -> Self {
        Self { f, df, d2f }
    }

    pub fn from_array([f, df, d2f]: [T; 3]) -> Self {
        Self { f, df, d2f }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.f, self.df, self.d2f]
    }

    pub fn is_finite(&self) -> bool {
        self.f.is_finite() && self.df.is_finite() && self.d2f.is_finite()
    }
}

/// The dimensionless wall parameters: `p1` is the wall-to-stream velocity
/// ratio (negative for a wall moving against the stream), `p2 >= 0` the slip
/// coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedParams<T> {
    p1: T,
    p2: T,
}

impl<T: Scalar> ExtendedParams<T> {
    pub fn new(p1: T, p2: T) -> Result<Self> {
        if !p1.is_finite() || !p2.is_finite() {
            return Err(Error::Domain(format!("non-finite parameters ({p1}, {p2})")));
        }
        if p2 < T::zero() {
            return Err(Error::Domain(format!("slip parameter P2 = {p2} must be >= 0")));
        }
        Ok(Self { p1, p2 })
    }

    pub fn p1(&self) -> T {
        self.p1
    }

    pub fn p2(&self) -> T {
        self.p2
    }
}

/// Group parameter `λ > 0` of the scaling transformation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScaleFactor<T> {
    lambda: T,
}

impl<T: Scalar> ScaleFactor<T> {
    /// Exponent of `λ` carried by `P1`.
    pub const DELTA1: i32 = 2;
    /// Exponent of `λ` carried by `P2`.
    pub const DELTA2: i32 = -1;

    pub fn new(lambda: T) -> Result<Self> {
        if !(lambda.is_finite() && lambda > T::zero()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn identity() -> Self {
        Self { lambda: T::one() }
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `λ^-(k+1)`: multiplies the starred k-th derivative to give the
    /// unstarred one.
    pub fn derivative_factor(&self, k: i32) -> T {
        self.lambda.powi(-(k + 1))
    }

    pub fn inverse(&self) -> Self {
        Self {
            lambda: self.lambda.recip(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            lambda: self.lambda * other.lambda,
        }
    }
}

/// Right-hand side of the first-order system: `(f', f'', -f f'')`.
pub fn rhs<T: Scalar>(state: &PhaseState<T>) -> PhaseState<T> {
    PhaseState {
        f: state.df,
        df: state.d2f,
        d2f: -state.f * state.d2f,
    }
}

/// [`rhs`] in the shape the integrator expects.
pub fn field<T: Scalar>(_eta: T, y: &[T; 3]) -> [T; 3] {
    rhs(&PhaseState::from_array(*y)).to_array()
}

/// `λ = sqrt(f*'(η*_∞))`.
pub fn lambda_from_endpoint<T: Scalar>(df_at_infinity: T) -> Result<ScaleFactor<T>> {
    if !(df_at_infinity.is_finite() && df_at_infinity > T::zero()) {
        return Err(Error::UnscalableEndpoint {
            value: df_at_infinity.as_f64(),
        });
    }
    ScaleFactor::new(df_at_infinity.sqrt())
}

/// `f''(0) = λ⁻³ f*''(0)`.
pub fn missing_ic<T: Scalar>(lambda: &ScaleFactor<T>, d2f_star_at_0: T) -> T {
    lambda.derivative_factor(2) * d2f_star_at_0
}

/// Pulls starred parameters back through the group: `P1 = λ⁻² P1*`,
/// `P2 = λ P2*`.
pub fn rescale_params<T: Scalar>(
    lambda: &ScaleFactor<T>,
    p1_star: T,
    p2_star: T,
) -> Result<ExtendedParams<T>> {
    let l = lambda.lambda();
    ExtendedParams::new(
        l.powi(-ScaleFactor::<T>::DELTA1) * p1_star,
        l.powi(-ScaleFactor::<T>::DELTA2) * p2_star,
    )
}

/// Maps a starred trajectory to the original variables: `η = λ η*` and
/// `dᵏf/dηᵏ = λ^-(k+1) dᵏf*/dη*ᵏ`.
pub fn rescale_solution<T: Scalar>(lambda: &ScaleFactor<T>, starred: &Profile<T>) -> Profile<T> {
    let l = lambda.lambda();
    let factors = [
        lambda.derivative_factor(0),
        lambda.derivative_factor(1),
        lambda.derivative_factor(2),
    ];
    let grid = starred.grid().iter().map(|&eta| l * eta).collect();
    let states = starred
        .states()
        .iter()
        .map(|s| [s[0] * factors[0], s[1] * factors[1], s[2] * factors[2]])
        .collect();
    Trajectory::from_parts(grid, states).expect("rescaling preserves lengths")
}

/// Boundary-condition residuals of a solution in original variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcResiduals<T> {
    /// `f(0)`
    pub r0: T,
    /// `f'(0) - (P1 + P2 f''(0))`
    pub r_slip: T,
    /// `f'(η_end) - 1`
    pub r_inf: T,
}

impl<T: Scalar> BcResiduals<T> {
    pub fn max_abs(&self) -> T {
        self.r0.abs().max(self.r_slip.abs()).max(self.r_inf.abs())
    }
}

pub fn bc_residuals<T: Scalar>(traj: &Profile<T>, params: &ExtendedParams<T>) -> BcResiduals<T> {
    let [f0, df0, d2f0] = *traj.first();
    let df_end = traj.last()[1];
    BcResiduals {
        r0: f0,
        r_slip: df0 - (params.p1() + params.p2() * d2f0),
        r_inf: df_end - T::one(),
    }
}

//! Scaling-group transformation methods for the Blasius boundary-layer
//! problem with moving-wall and slip boundary conditions,
//!
//! ```text
//! f''' + f f'' = 0,   f(0) = 0,   f'(0) = P1 + P2 f''(0),   f'(∞) = 1.
//! ```
//!
//! [`nitm`] solves one initial-value problem and rescales it, so the
//! parameters `(P1, P2)` emerge from the computation. [`itm`] embeds a
//! fictitious parameter and root-finds on it to hit prescribed `(P1, P2)`.
//! Both rest on the fixed-step Runge–Kutta engine in [`ode`] and the group
//! action in [`model`].
//!
//! The numerics are generic over the scalar type; the aliases below fix it
//! to `f64`.

pub mod cli;
pub mod error;
pub mod itm;
pub mod model;
pub mod nitm;
pub mod ode;
pub mod reference;
pub mod repro;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use itm::Finder;
pub use ode::RkOrder;
pub use report::Format;
pub use scalar::Scalar;

/// Default working precision.
pub type Real = f64;

pub type PhaseState = model::PhaseState<Real>;
pub type ExtendedParams = model::ExtendedParams<Real>;
pub type ScaleFactor = model::ScaleFactor<Real>;
pub type Profile = model::Profile<Real>;
pub type Tableau = ode::Tableau<Real>;
pub type IntegratorConfig = ode::IntegratorConfig<Real>;
pub type ItmConfig = itm::ItmConfig<Real>;
pub type RootTrace = itm::RootTrace<Real>;
pub type NitmResult = nitm::NitmResult<Real>;
pub type ItmSolution = itm::ItmSolution<Real>;
pub type SweepSpec = report::SweepSpec<Real>;
pub type SweepRow = report::SweepRow<Real>;

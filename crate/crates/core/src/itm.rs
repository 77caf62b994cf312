//! Iterative transformation method.
//!
//! A fictitious parameter `h` with group exponent `σ` (`h* = λ^σ h`) makes
//! the wall condition scaling-invariant. For a trial `h*` the starred problem
//!
//! ```text
//! f*(0) = 0,  f*'(0) = h*^(2/σ) P1 + h*^(-1/σ) P2,  f*''(0) = 1
//! ```
//!
//! is integrated, `λ` read off the far field, and the transformation function
//! `Γ(h*) = λ^-σ h* - 1` evaluated. Its root is the `h*` for which `h = 1`,
//! i.e. the solution with the prescribed `(P1, P2)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    field, lambda_from_endpoint, missing_ic, rescale_solution, ExtendedParams, PhaseState,
    Profile, ScaleFactor,
};
use crate::ode::{integrate, IntegratorConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Finder {
    #[default]
    Bisection,
    Secant,
    /// Regula falsi with the Illinois weight halving.
    RegulaFalsi,
    /// Newton with a centred finite-difference slope.
    Newton,
}

impl Finder {
    pub const ALL: [Finder; 4] = [
        Finder::Bisection,
        Finder::Secant,
        Finder::RegulaFalsi,
        Finder::Newton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Finder::Bisection => "bisection",
            Finder::Secant => "secant",
            Finder::RegulaFalsi => "regula-falsi",
            Finder::Newton => "newton",
        }
    }
}

impl fmt::Display for Finder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Finder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Finder::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown finder {s:?} (expected bisection, secant, regula-falsi or newton)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItmConfig<T> {
    /// Group exponent of the fictitious parameter.
    pub sigma: T,
    /// Initial `h*` interval; the two starting points for the secant and
    /// the midpoint start for Newton.
    pub bracket: (T, T),
    /// Stop once `|Γ| < tol`.
    pub tol: T,
    /// Cap on iterations after the initial evaluations.
    pub max_iter: usize,
    pub finder: Finder,
}

impl<T: Scalar> Default for ItmConfig<T> {
    fn default() -> Self {
        Self {
            sigma: T::one(),
            bracket: (T::lit(0.75), T::lit(1.75)),
            tol: T::lit(1e-5),
            max_iter: 100,
            finder: Finder::Bisection,
        }
    }
}

impl<T: Scalar> ItmConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bracket;
        if !(self.sigma.is_finite() && self.sigma > T::zero()) {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!("bracket needs lo < hi, got [{lo}, {hi}]")));
        }
        if !(self.tol.is_finite() && self.tol > T::zero()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_sigma(self, sigma: T) -> Self {
        Self { sigma, ..self }
    }

    pub fn with_bracket(self, lo: T, hi: T) -> Self {
        Self {
            bracket: (lo, hi),
            ..self
        }
    }

    pub fn with_finder(self, finder: Finder) -> Self {
        Self { finder, ..self }
    }
}

/// Value returned by the function a root finder drives to zero, with an
/// optional side-channel value recorded in the trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub lambda: Option<T>,
}

/// One function evaluation of a root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Iterate<T> {
    pub h_star: T,
    pub lambda: Option<T>,
    pub gamma: T,
    /// Enclosing interval after this evaluation, for bracketing finders.
    pub bracket: Option<(T, T)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootTrace<T> {
    pub iterations: Vec<Iterate<T>>,
}

impl<T> Default for RootTrace<T> {
    fn default() -> Self {
        Self {
            iterations: Vec::new(),
        }
    }
}

impl<T: Scalar> RootTrace<T> {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn last(&self) -> Option<&Iterate<T>> {
        self.iterations.last()
    }

    pub fn to_f64(&self) -> RootTrace<f64> {
        RootTrace {
            iterations: self
                .iterations
                .iter()
                .map(|it| Iterate {
                    h_star: it.h_star.as_f64(),
                    lambda: it.lambda.map(Scalar::as_f64),
                    gamma: it.gamma.as_f64(),
                    bracket: it.bracket.map(|(a, b)| (a.as_f64(), b.as_f64())),
                })
                .collect(),
        }
    }

    fn record(&mut self, h_star: T, eval: Evaluation<T>, bracket: Option<(T, T)>) {
        self.iterations.push(Iterate {
            h_star,
            lambda: eval.lambda,
            gamma: eval.value,
            bracket,
        });
    }

    fn fail(self) -> Error {
        Error::NoConvergence {
            trace: Box::new(self.to_f64()),
        }
    }
}

/// Starred initial conditions with the fictitious parameter embedded.
pub fn embedded_ics<T: Scalar>(
    params: &ExtendedParams<T>,
    h_star: T,
    sigma: T,
) -> Result<PhaseState<T>> {
    if !(h_star.is_finite() && h_star > T::zero()) {
        return Err(Error::Domain(format!("h* must be positive, got {h_star}")));
    }
    if !(sigma.is_finite() && sigma > T::zero()) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    let d2f = T::one();
    let two = T::lit(2.0);
    let df = h_star.powf(two / sigma) * params.p1() + h_star.powf(-sigma.recip()) * params.p2() * d2f;
    Ok(PhaseState::new(T::zero(), df, d2f))
}

/// `Γ(h*)` and the starred profile it came from.
pub fn gamma_profile<T: Scalar>(
    params: &ExtendedParams<T>,
    h_star: T,
    sigma: T,
    int_config: &IntegratorConfig<T>,
) -> Result<(T, ScaleFactor<T>, Profile<T>)> {
    let run = || -> Result<_> {
        let init = embedded_ics(params, h_star, sigma)?;
        let starred = integrate(field, init.to_array(), int_config)?;
        let lambda = lambda_from_endpoint(starred.last()[1])?;
        let gamma = lambda.lambda().powf(-sigma) * h_star - T::one();
        Ok((gamma, lambda, starred))
    };
    run().map_err(|source| Error::AtHStar {
        h_star: h_star.as_f64(),
        source: Box::new(source),
    })
}

/// The transformation function `Γ(h*) = λ^-σ h* - 1` and its `λ`.
pub fn gamma<T: Scalar>(
    params: &ExtendedParams<T>,
    h_star: T,
    config: &ItmConfig<T>,
    int_config: &IntegratorConfig<T>,
) -> Result<(T, ScaleFactor<T>)> {
    gamma_profile(params, h_star, config.sigma, int_config).map(|(g, l, _)| (g, l))
}

fn same_sign<T: Scalar>(a: T, b: T) -> bool {
    a.is_sign_negative() == b.is_sign_negative()
}

/// Drives `f` to `|f| < tol` with the configured finder, recording every
/// evaluation in order.
pub fn find_root<T, F>(mut f: F, config: &ItmConfig<T>) -> Result<(T, RootTrace<T>)>
where
    T: Scalar,
    F: FnMut(T) -> Result<Evaluation<T>>,
{
    config.validate()?;
    match config.finder {
        Finder::Bisection => bisection(&mut f, config),
        Finder::Secant => secant(&mut f, config),
        Finder::RegulaFalsi => regula_falsi(&mut f, config),
        Finder::Newton => newton(&mut f, config),
    }
}

/// Evaluates both bracket ends; returns early if either already satisfies
/// the tolerance.
fn open_bracket<T, F>(
    f: &mut F,
    config: &ItmConfig<T>,
    trace: &mut RootTrace<T>,
) -> Result<std::result::Result<(T, T), T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<Evaluation<T>>,
{
    let (lo, hi) = config.bracket;
    let e_lo = f(lo)?;
    trace.record(lo, e_lo, Some((lo, hi)));
    if e_lo.value.abs() < config.tol {
        return Ok(Err(lo));
    }
    let e_hi = f(hi)?;
    trace.record(hi, e_hi, Some((lo, hi)));
    if e_hi.value.abs() < config.tol {
        return Ok(Err(hi));
    }
    if same_sign(e_lo.value, e_hi.value) {
        return Err(Error::BadBracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: e_lo.value.as_f64(),
            f_hi: e_hi.value.as_f64(),
        });
    }
    Ok(Ok((e_lo.value, e_hi.value)))
}

fn bisection<T, F>(f: &mut F, config: &ItmConfig<T>) -> Result<(T, RootTrace<T>)>
where
    T: Scalar,
    F: FnMut(T) -> Result<Evaluation<T>>,
{
    let mut trace = RootTrace::default();
    let mut f_lo = match open_bracket(f, config, &mut trace)? {
        Ok((f_lo, _)) => f_lo,
        Err(root) => return Ok((root, trace)),
    };
    let (mut lo, mut hi) = config.bracket;
    let two = T::lit(2.0);
    for _ in 0..config.max_iter {
        let mid = lo + (hi - lo) / two;
        let e = f(mid)?;
        if same_sign(e.value, f_lo) {
            lo = mid;
            f_lo = e.value;
        } else {
            hi = mid;
        }
        trace.record(mid, e, Some((lo, hi)));
        if e.value.abs() < config.tol {
            return Ok((mid, trace));
        }
    }
    Err(trace.fail())
}

fn secant<T, F>(f: &mut F, config: &ItmConfig<T>) -> Result<(T, RootTrace<T>)>
where
    T: Scalar,
    F: FnMut(T) -> Result<Evaluation<T>>,
{
    let mut trace = RootTrace::default();
    let (mut x0, mut x1) = config.bracket;
    let mut f0 = f(x0)?;
    trace.record(x0, f0, None);
    if f0.value.abs() < config.tol {
        return Ok((x0, trace));
    }
    let mut f1 = f(x1)?;
    trace.record(x1, f1, None);
    for _ in 0..config.max_iter {
        if f1.value.abs() < config.tol {
            return Ok((x1, trace));
        }
        let slope = f1.value - f0.value;
        if slope == T::zero() {
            break;
        }
        let x2 = x1 - f1.value * (x1 - x0) / slope;
        let f2 = f(x2)?;
        trace.record(x2, f2, None);
        (x0, f0, x1, f1) = (x1, f1, x2, f2);
    }
    if f1.value.abs() < config.tol {
        return Ok((x1, trace));
    }
    Err(trace.fail())
}

fn regula_falsi<T, F>(f: &mut F, config: &ItmConfig<T>) -> Result<(T, RootTrace<T>)>
where
    T: Scalar,
    F: FnMut(T) -> Result<Evaluation<T>>,
{
    let mut trace = RootTrace::default();
    let (mut f_lo, mut f_hi) = match open_bracket(f, config, &mut trace)? {
        Ok(values) => values,
        Err(root) => return Ok((root, trace)),
    };
    let (mut lo, mut hi) = config.bracket;
    let half = T::lit(0.5);
    // +1 when the last update moved `hi`, -1 for `lo`
    let mut last_side = 0i8;
    for _ in 0..config.max_iter {
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let e = f(x)?;
        if same_sign(e.value, f_hi) {
            hi = x;
            f_hi = e.value;
            if last_side == 1 {
                f_lo = f_lo * half;
            }
            last_side = 1;
        } else {
            lo = x;
            f_lo = e.value;
            if last_side == -1 {
                f_hi = f_hi * half;
            }
            last_side = -1;
        }
        trace.record(x, e, Some((lo, hi)));
        if e.value.abs() < config.tol {
            return Ok((x, trace));
        }
    }
    Err(trace.fail())
}

fn newton<T, F>(f: &mut F, config: &ItmConfig<T>) -> Result<(T, RootTrace<T>)>
where
    T: Scalar,
    F: FnMut(T) -> Result<Evaluation<T>>,
{
    let mut trace = RootTrace::default();
    let (lo, hi) = config.bracket;
    let mut x = lo + (hi - lo) / T::lit(2.0);
    let rel = T::lit(1e-6);
    for _ in 0..config.max_iter {
        let e = f(x)?;
        trace.record(x, e, None);
        if e.value.abs() < config.tol {
            return Ok((x, trace));
        }
        let dx = rel.max(rel * x.abs());
        let ep = f(x + dx)?;
        trace.record(x + dx, ep, None);
        let em = f(x - dx)?;
        trace.record(x - dx, em, None);
        let slope = (ep.value - em.value) / (dx + dx);
        if slope == T::zero() || !slope.is_finite() {
            break;
        }
        x = x - e.value / slope;
    }
    Err(trace.fail())
}

/// Converged iterative solution for prescribed `(P1, P2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ItmSolution<T> {
    pub params: ExtendedParams<T>,
    pub sigma: T,
    /// Root of `Γ`.
    pub h_star: T,
    /// `Γ` at the root.
    pub gamma: T,
    pub lambda: ScaleFactor<T>,
    /// `f''(0) = λ⁻³`.
    pub missing_ic: T,
    pub starred: Profile<T>,
    pub rescaled: Profile<T>,
    pub trace: RootTrace<T>,
}

pub fn solve_iterative<T: Scalar>(
    params: &ExtendedParams<T>,
    config: &ItmConfig<T>,
    int_config: &IntegratorConfig<T>,
) -> Result<ItmSolution<T>> {
    let objective = |h: T| {
        gamma(params, h, config, int_config).map(|(g, l)| Evaluation {
            value: g,
            lambda: Some(l.lambda()),
        })
    };
    let (h_star, trace) = find_root(objective, config)?;
    let (gamma, lambda, starred) = gamma_profile(params, h_star, config.sigma, int_config)?;
    let rescaled = rescale_solution(&lambda, &starred);
    Ok(ItmSolution {
        params: *params,
        sigma: config.sigma,
        h_star,
        gamma,
        lambda,
        missing_ic: missing_ic(&lambda, starred.first()[2]),
        starred,
        rescaled,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::bc_residuals;
    use crate::ode::RkOrder;
    use crate::reference::BISECTION_TRACE;

    fn int_cfg() -> IntegratorConfig<f64> {
        IntegratorConfig::new(1e-3, 10.0, RkOrder::Eight).unwrap()
    }

    fn params(p1: f64, p2: f64) -> ExtendedParams<f64> {
        ExtendedParams::new(p1, p2).unwrap()
    }

    fn linear(x: f64) -> Result<Evaluation<f64>> {
        Ok(Evaluation {
            value: x - 1.0,
            lambda: None,
        })
    }

    #[test]
    fn embedding_is_neutral_at_one() {
        let p = params(0.3, 0.4);
        for sigma in [1.0, 2.0, 10.0] {
            let s = embedded_ics(&p, 1.0, sigma).unwrap();
            assert!((s.df - 0.7).abs() < 1e-15);
            assert_eq!((s.f, s.d2f), (0.0, 1.0));
        }
        let s = embedded_ics(&params(0.5, 0.0), 1.25, 1.0).unwrap();
        assert_eq!(s.df, 0.78125);
        let s = embedded_ics(&params(0.0, 0.0), 3.7, 10.0).unwrap();
        assert_eq!(s.to_array(), [0.0, 0.0, 1.0]);
        assert!(embedded_ics(&params(0.5, 0.0), 0.0, 1.0).is_err());
        assert!(embedded_ics(&params(0.5, 0.0), -1.0, 1.0).is_err());
    }

    #[test]
    fn gamma_matches_printed_rows() {
        let cfg = ItmConfig::default();
        let (g, l) = gamma(&params(0.5, 0.0), 1.25, &cfg, &int_cfg()).unwrap();
        assert!((g + 0.100177989).abs() < 1e-6);
        assert!((l.lambda() - 1.389163618).abs() < 1e-6);
        let (g, l) = gamma(&params(0.5, 0.0), 1.5, &cfg, &int_cfg()).unwrap();
        assert!((g - 0.022790586).abs() < 1e-6);
        assert!((l.lambda() - 1.466575876).abs() < 1e-6);
    }

    #[test]
    fn gamma_error_carries_h_star() {
        let err = gamma(&params(0.5, 0.0), -2.0, &ItmConfig::default(), &int_cfg()).unwrap_err();
        assert!(matches!(err, Error::AtHStar { h_star, .. } if h_star == -2.0), "{err}");
    }

    #[test]
    fn linear_root_with_every_finder() {
        for finder in Finder::ALL {
            let cfg = ItmConfig {
                bracket: (0.0, 2.0),
                finder,
                ..ItmConfig::default()
            };
            let cfg = if finder == Finder::Bisection {
                cfg.with_bracket(0.0, 2.5)
            } else {
                cfg
            };
            let (root, trace) = find_root(linear, &cfg).unwrap();
            assert!((root - 1.0).abs() < 1e-5, "{finder}: {root}");
            assert!(trace.last().unwrap().gamma.abs() < 1e-5);
        }
    }

    #[test]
    fn bad_bracket_and_no_convergence() {
        let cfg = ItmConfig::default().with_bracket(2.0, 3.0);
        assert!(matches!(find_root(linear, &cfg), Err(Error::BadBracket { .. })));

        let cfg = ItmConfig {
            bracket: (0.0, 2.5),
            max_iter: 3,
            ..ItmConfig::default()
        };
        match find_root(linear, &cfg) {
            Err(Error::NoConvergence { trace }) => assert_eq!(trace.len(), 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let bad = [
            ItmConfig::default().with_sigma(0.0),
            ItmConfig::default().with_bracket(1.0, 1.0),
            ItmConfig {
                tol: -1.0,
                ..ItmConfig::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(find_root(linear, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn bisection_halves_the_bracket_exactly() {
        let cfg = ItmConfig {
            bracket: (0.75, 1.75),
            tol: 1e-12,
            max_iter: 30,
            ..ItmConfig::default()
        };
        let (_, trace) = find_root(|x: f64| Ok(Evaluation { value: x * x - 2.0, lambda: None }), &cfg)
            .unwrap_or_else(|e| match e {
                Error::NoConvergence { trace } => (0.0, *trace),
                e => panic!("{e}"),
            });
        for (n, it) in trace.iterations[2..].iter().enumerate() {
            let (lo, hi) = it.bracket.unwrap();
            assert_eq!(hi - lo, 1.0 * 2f64.powi(-(n as i32 + 1)));
        }
    }

    #[test]
    fn bisection_reproduces_printed_midpoints() {
        let sol = solve_iterative(&params(0.5, 0.0), &ItmConfig::default(), &int_cfg()).unwrap();
        let hs: Vec<f64> = sol.trace.iterations.iter().map(|it| it.h_star).collect();
        let expected: Vec<f64> = BISECTION_TRACE.iter().map(|r| r.h_star).collect();
        assert_eq!(hs, expected);
        assert!((sol.trace.last().unwrap().gamma + 9.4310e-6).abs() < 1e-9);
    }

    #[test]
    fn secant_needs_fewer_evaluations() {
        let p = params(0.5, 0.0);
        let bis = solve_iterative(&p, &ItmConfig::default(), &int_cfg()).unwrap();
        let sec = solve_iterative(
            &p,
            &ItmConfig::default().with_finder(Finder::Secant),
            &int_cfg(),
        )
        .unwrap();
        assert!((sec.h_star - bis.h_star).abs() < 1e-4);
        assert!((sec.missing_ic - bis.missing_ic).abs() < 1e-5);
        assert!(sec.trace.len() < bis.trace.len());
    }

    #[test]
    fn iterative_solution_meets_prescribed_conditions() {
        let p = params(0.5, 0.0);
        let sol = solve_iterative(&p, &ItmConfig::default(), &int_cfg()).unwrap();
        assert!((sol.lambda.lambda() - 1.448927).abs() < 1e-4);
        assert!((sol.missing_ic - 0.32875).abs() < 1e-3);
        let r = bc_residuals(&sol.rescaled, &p);
        assert!(r.r0.abs() < 1e-12);
        assert!(r.r_slip.abs() < 1e-4 && r.r_inf.abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn blasius_corner_agrees_with_classic_value() {
        let sol = solve_iterative(&params(0.0, 0.0), &ItmConfig::default(), &int_cfg()).unwrap();
        assert!((sol.missing_ic - 0.469599988).abs() < 1e-6);
    }

    #[test]
    fn replaying_the_trace_is_bit_identical() {
        let p = params(0.5, 0.0);
        let cfg = ItmConfig::default();
        let sol = solve_iterative(&p, &cfg, &int_cfg()).unwrap();
        for it in &sol.trace.iterations {
            let (g, l) = gamma(&p, it.h_star, &cfg, &int_cfg()).unwrap();
            assert_eq!(g.to_bits(), it.gamma.to_bits());
            assert_eq!(Some(l.lambda()), it.lambda);
        }
    }

    #[test]
    fn finder_names_round_trip() {
        for f in Finder::ALL {
            assert_eq!(f.name().parse::<Finder>().unwrap(), f);
        }
        assert!("golden".parse::<Finder>().is_err());
    }
}

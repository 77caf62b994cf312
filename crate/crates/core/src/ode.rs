//! Fixed-step explicit Runge–Kutta integration driven by a Butcher tableau.
//!
//! Everything here is a pure function of its inputs: identical calls yield
//! bit-identical trajectories.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Classical order of a shipped tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RkOrder {
    Four,
    Eight,
}

impl RkOrder {
    pub fn value(self) -> u32 {
        match self {
            RkOrder::Four => 4,
            RkOrder::Eight => 8,
        }
    }
}

impl TryFrom<u32> for RkOrder {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            4 => Ok(RkOrder::Four),
            8 => Ok(RkOrder::Eight),
            other => Err(Error::InvalidConfig(format!(
                "order must be 4 or 8, got {other}"
            ))),
        }
    }
}

/// Explicit Butcher tableau. Nodes are stored as the row sums of the
/// coupling matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tableau<T> {
    name: &'static str,
    order: u32,
    a: Vec<Vec<T>>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Scalar> Tableau<T> {
    /// `a[i]` holds the `i` coefficients coupling stage `i` to the earlier stages.
    pub fn new(name: &'static str, order: u32, a: Vec<Vec<T>>, b: Vec<T>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "tableau {name}: {} coupling rows for {} weights",
                a.len(),
                b.len()
            )));
        }
        if let Some((i, row)) = a.iter().enumerate().find(|(i, row)| row.len() != *i) {
            return Err(Error::InvalidConfig(format!(
                "tableau {name}: row {i} has {} coefficients, expected {i}",
                row.len()
            )));
        }
        let c = a
            .iter()
            .map(|row| row.iter().fold(T::zero(), |acc, &x| acc + x))
            .collect();
        Ok(Self { name, order, a, b, c })
    }

    /// The classical four-stage, fourth-order method.
    pub fn classic_rk4() -> Self {
        let half = T::lit(0.5);
        let z = T::zero();
        let a = vec![vec![], vec![half], vec![z, half], vec![z, z, T::one()]];
        let sixth = T::one() / T::lit(6.0);
        let third = T::one() / T::lit(3.0);
        let b = vec![sixth, third, third, sixth];
        Self::new("classic-rk4", 4, a, b).expect("well-formed rk4 tableau")
    }

    /// Cooper & Verner's eleven-stage explicit method of order eight.
    pub fn cooper_verner8() -> Self {
        let s = T::lit(21.0).sqrt();
        let q = |n: f64, d: f64| T::lit(n) / T::lit(d);
        // (p + r*sqrt(21)) / d
        let w = |p: f64, r: f64, d: f64| (T::lit(p) + T::lit(r) * s) / T::lit(d);
        let z = T::zero();
        let a = vec![
            vec![],
            vec![q(1.0, 2.0)],
            vec![q(1.0, 4.0), q(1.0, 4.0)],
            vec![q(1.0, 7.0), w(-7.0, -3.0, 98.0), w(21.0, 5.0, 49.0)],
            vec![w(11.0, 1.0, 84.0), z, w(18.0, 4.0, 63.0), w(21.0, -1.0, 252.0)],
            vec![
                w(5.0, 1.0, 48.0),
                z,
                w(9.0, 1.0, 36.0),
                w(-231.0, 14.0, 360.0),
                w(63.0, -7.0, 80.0),
            ],
            vec![
                w(10.0, -1.0, 42.0),
                z,
                w(-432.0, 92.0, 315.0),
                w(633.0, -145.0, 90.0),
                w(-504.0, 115.0, 70.0),
                w(63.0, -13.0, 35.0),
            ],
            vec![
                q(1.0, 14.0),
                z,
                z,
                z,
                w(14.0, -3.0, 126.0),
                w(13.0, -3.0, 63.0),
                q(1.0, 9.0),
            ],
            vec![
                q(1.0, 32.0),
                z,
                z,
                z,
                w(91.0, -21.0, 576.0),
                q(11.0, 72.0),
                w(-385.0, -75.0, 1152.0),
                w(63.0, 13.0, 128.0),
            ],
            vec![
                q(1.0, 14.0),
                z,
                z,
                z,
                q(1.0, 9.0),
                w(-733.0, -147.0, 2205.0),
                w(515.0, 111.0, 504.0),
                w(-51.0, -11.0, 56.0),
                w(132.0, 28.0, 245.0),
            ],
            vec![
                z,
                z,
                z,
                z,
                w(-42.0, 7.0, 18.0),
                w(-18.0, 28.0, 45.0),
                w(-273.0, -53.0, 72.0),
                w(301.0, 53.0, 72.0),
                w(28.0, -28.0, 45.0),
                w(49.0, -7.0, 18.0),
            ],
        ];
        let b = vec![
            q(1.0, 20.0),
            z,
            z,
            z,
            z,
            z,
            z,
            q(49.0, 180.0),
            q(16.0, 45.0),
            q(49.0, 180.0),
            q(1.0, 20.0),
        ];
        Self::new("cooper-verner-8", 8, a, b).expect("well-formed order-8 tableau")
    }

    pub fn for_order(order: RkOrder) -> Self {
        match order {
            RkOrder::Four => Self::classic_rk4(),
            RkOrder::Eight => Self::cooper_verner8(),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.b
    }

    pub fn nodes(&self) -> &[T] {
        &self.c
    }

    pub fn coupling(&self, stage: usize) -> &[T] {
        &self.a[stage]
    }
}

/// Grid and method settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    /// Constant step Δη.
    pub step_size: T,
    /// Truncated boundary η*_∞; the integration runs on `[0, eta_end]`.
    pub eta_end: T,
    pub order: RkOrder,
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn new(step_size: T, eta_end: T, order: RkOrder) -> Result<Self> {
        let config = Self {
            step_size,
            eta_end,
            order,
        };
        config.steps()?;
        Ok(config)
    }

    /// Number of steps tiling `[0, eta_end]`.
    ///
    /// `eta_end / step_size` must be an integer up to rounding; a grid that
    /// would need a short final step is rejected.
    pub fn steps(&self) -> Result<usize> {
        let (h, end) = (self.step_size, self.eta_end);
        if !(h.is_finite() && h > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "step size must be positive and finite, got {h}"
            )));
        }
        if !(end.is_finite() && end > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "eta_end must be positive and finite, got {end}"
            )));
        }
        let ratio = end / h;
        let n = ratio.round();
        if n < T::one() {
            return Err(Error::InvalidGrid(format!(
                "eta_end {end} is shorter than one step of {h}"
            )));
        }
        let slack = T::epsilon() * T::lit(64.0) * n;
        if (ratio - n).abs() > slack {
            return Err(Error::InvalidGrid(format!(
                "eta_end {end} is not a whole number of steps of {h}"
            )));
        }
        n.to_usize().ok_or_else(|| {
            Error::InvalidGrid(format!("step count {n} does not fit in usize"))
        })
    }

    pub fn with_eta_end(self, eta_end: T) -> Result<Self> {
        Self::new(self.step_size, eta_end, self.order)
    }

    pub fn with_step_size(self, step_size: T) -> Result<Self> {
        Self::new(step_size, self.eta_end, self.order)
    }

    pub fn with_order(self, order: RkOrder) -> Self {
        Self { order, ..self }
    }
}

/// Uniform grid on `[0, eta_end]` with one state per node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T, const N: usize> {
    grid: Vec<T>,
    states: Vec<[T; N]>,
}

impl<T: Scalar, const N: usize> Trajectory<T, N> {
    pub fn from_parts(grid: Vec<T>, states: Vec<[T; N]>) -> Result<Self> {
        if grid.is_empty() || grid.len() != states.len() {
            return Err(Error::InvalidGrid(format!(
                "{} grid nodes for {} states",
                grid.len(),
                states.len()
            )));
        }
        Ok(Self { grid, states })
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn states(&self) -> &[[T; N]] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn first(&self) -> &[T; N] {
        &self.states[0]
    }

    pub fn last(&self) -> &[T; N] {
        &self.states[self.states.len() - 1]
    }

    pub fn end(&self) -> T {
        self.grid[self.grid.len() - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, &[T; N])> + '_ {
        self.grid.iter().copied().zip(self.states.iter())
    }
}

struct Stepper<'a, T, const N: usize> {
    tableau: &'a Tableau<T>,
    k: Vec<[T; N]>,
}

impl<'a, T: Scalar, const N: usize> Stepper<'a, T, N> {
    fn new(tableau: &'a Tableau<T>) -> Self {
        Self {
            tableau,
            k: vec![[T::zero(); N]; tableau.stages()],
        }
    }

    fn step<F>(&mut self, rhs: &F, t: T, y: &[T; N], h: T) -> Option<[T; N]>
    where
        F: Fn(T, &[T; N]) -> [T; N],
    {
        let tab = self.tableau;
        for i in 0..tab.stages() {
            let mut stage = *y;
            for (j, &aij) in tab.a[i].iter().enumerate() {
                if aij != T::zero() {
                    for (s, kj) in stage.iter_mut().zip(self.k[j].iter()) {
                        *s = *s + h * aij * *kj;
                    }
                }
            }
            self.k[i] = rhs(t + tab.c[i] * h, &stage);
        }
        let mut next = *y;
        for (bi, ki) in tab.b.iter().zip(self.k.iter()) {
            if *bi != T::zero() {
                for (n, kv) in next.iter_mut().zip(ki.iter()) {
                    *n = *n + h * *bi * *kv;
                }
            }
        }
        next.iter().all(|v| v.is_finite()).then_some(next)
    }
}

/// One explicit Runge–Kutta step of size `h` from `(t, state)`.
pub fn rk_step<T, F, const N: usize>(
    rhs: &F,
    state: &[T; N],
    t: T,
    h: T,
    tableau: &Tableau<T>,
) -> Result<[T; N]>
where
    T: Scalar,
    F: Fn(T, &[T; N]) -> [T; N],
{
    if !(h.is_finite() && h > T::zero()) {
        return Err(Error::InvalidGrid(format!("step size must be positive, got {h}")));
    }
    Stepper::new(tableau)
        .step(rhs, t, state, h)
        .ok_or(Error::Divergence {
            t: t.as_f64(),
            step: 0,
        })
}

/// Integrates `y' = rhs(t, y)` from `init` at `t = 0` to `config.eta_end`
/// with the configured constant step.
pub fn integrate<T, F, const N: usize>(
    rhs: F,
    init: [T; N],
    config: &IntegratorConfig<T>,
) -> Result<Trajectory<T, N>>
where
    T: Scalar,
    F: Fn(T, &[T; N]) -> [T; N],
{
    let steps = config.steps()?;
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence { t: 0.0, step: 0 });
    }
    let tableau = Tableau::for_order(config.order);
    let mut stepper = Stepper::new(&tableau);
    let h = config.eta_end / T::from_usize_lossy(steps);

    let mut grid = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    grid.push(T::zero());
    states.push(init);
    let mut y = init;
    for i in 0..steps {
        let t = T::from_usize_lossy(i) * h;
        y = stepper.step(&rhs, t, &y, h).ok_or(Error::Divergence {
            t: t.as_f64(),
            step: i,
        })?;
        grid.push(if i + 1 == steps {
            config.eta_end
        } else {
            T::from_usize_lossy(i + 1) * h
        });
        states.push(y);
    }
    Ok(Trajectory { grid, states })
}

/// Result of an empirical convergence-order measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservedOrder {
    /// `log2(err(Δη) / err(Δη/2))`.
    Order(f64),
    /// The error already sits at the round-off floor; no order can be read off.
    Saturated { error: f64 },
}

/// Measures the convergence order by integrating at `config.step_size` and
/// at half of it, comparing each endpoint with `exact`.
pub fn order_check<T, F, const N: usize>(
    rhs: F,
    init: [T; N],
    exact: &[T; N],
    config: &IntegratorConfig<T>,
) -> Result<ObservedOrder>
where
    T: Scalar,
    F: Fn(T, &[T; N]) -> [T; N],
{
    let fine = config.with_step_size(config.step_size / T::lit(2.0))?;
    let endpoint_error = |cfg: &IntegratorConfig<T>| -> Result<T> {
        let traj = integrate(&rhs, init, cfg)?;
        Ok(traj
            .last()
            .iter()
            .zip(exact.iter())
            .fold(T::zero(), |m, (y, e)| m.max((*y - *e).abs())))
    };
    let coarse_err = endpoint_error(config)?;
    let fine_err = endpoint_error(&fine)?;

    let scale = exact.iter().fold(T::one(), |m, e| m.max(e.abs()));
    // round-off grows at worst linearly in the number of steps
    let fine_steps = T::from_usize_lossy(fine.steps()?.max(50));
    let floor = T::epsilon() * fine_steps * scale;
    if fine_err <= floor || coarse_err <= floor {
        return Ok(ObservedOrder::Saturated {
            error: fine_err.as_f64(),
        });
    }
    Ok(ObservedOrder::Order((coarse_err / fine_err).log2().as_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn growth(_t: f64, y: &[f64; 1]) -> [f64; 1] {
        [y[0]]
    }

    #[test]
    fn constant_field_leaves_state_unchanged() {
        let tab = Tableau::<f64>::cooper_verner8();
        let s = [1.5, -2.0, 7.25];
        let next = rk_step(&|_t, _y: &[f64; 3]| [0.0; 3], &s, 0.3, 0.7, &tab).unwrap();
        assert_eq!(next, s);
    }

    // A unit step of y' = y cannot land within 1e-8 of e for any order-8
    // method: the degree-8 Taylor polynomial alone is 3.06e-6 short. The
    // expected defects were computed independently from the same
    // coefficients in extended precision.
    #[test]
    fn single_order8_step_of_exponential() {
        let tab = Tableau::<f64>::cooper_verner8();
        let y = rk_step(&growth, &[1.0], 0.0, 1.0, &tab).unwrap();
        let defect = y[0] - std::f64::consts::E;
        assert!((defect + 2.642792571849739e-05).abs() < 1e-13, "{defect}");
        let y = rk_step(&growth, &[1.0], 0.0, 0.5, &tab).unwrap();
        let defect = y[0] - 0.5f64.exp();
        assert!((defect + 5.052314344666797e-08).abs() < 1e-14, "{defect}");
        let taylor8: f64 = (0..=8).map(|k| 1.0 / (1..=k).product::<u64>() as f64).sum();
        assert!((taylor8 - std::f64::consts::E).abs() > 3e-6);
    }

    #[test]
    fn linear_field_integrates_exactly() {
        for order in [RkOrder::Four, RkOrder::Eight] {
            let cfg = IntegratorConfig::new(0.5, 1.0, order).unwrap();
            let traj = integrate(|t, _y: &[f64; 1]| [t], [0.0], &cfg).unwrap();
            assert_eq!(traj.len(), 3);
            assert!((traj.last()[0] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn exponential_to_one() {
        let cfg = IntegratorConfig::new(0.1, 1.0, RkOrder::Eight).unwrap();
        let traj = integrate(growth, [1.0], &cfg).unwrap();
        assert!((traj.last()[0] - std::f64::consts::E).abs() < 1e-10);
        assert_eq!(traj.end(), 1.0);
        assert_eq!(traj.grid()[0], 0.0);
    }

    #[test]
    fn grid_shorter_than_a_step_is_rejected() {
        let err = IntegratorConfig::new(0.5, 0.2, RkOrder::Eight).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)), "{err}");
    }

    #[test]
    fn non_tiling_grid_is_rejected() {
        let err = IntegratorConfig::new(0.3, 1.0, RkOrder::Four).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
        assert!(IntegratorConfig::new(0.001, 10.0, RkOrder::Eight).is_ok());
        assert!(IntegratorConfig::new(-0.1, 1.0, RkOrder::Eight).is_err());
    }

    #[test]
    fn unknown_order_is_rejected() {
        assert!(RkOrder::try_from(5).is_err());
        assert_eq!(RkOrder::try_from(8).unwrap(), RkOrder::Eight);
    }

    #[test]
    fn blow_up_reports_position() {
        // y' = y^2, y(0) = 1 has a pole at t = 1
        let cfg = IntegratorConfig::new(0.01, 2.0, RkOrder::Four).unwrap();
        let err = integrate(|_t, y: &[f64; 1]| [y[0] * y[0]], [1.0], &cfg).unwrap_err();
        match err {
            Error::Divergence { t, step } => {
                assert!(t > 0.9 && t < 2.0, "t = {t}");
                assert!(step > 90);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn nodes_match_closed_form() {
        let tab = Tableau::<f64>::cooper_verner8();
        let s = 21f64.sqrt();
        let expected = [
            0.0,
            0.5,
            0.5,
            (7.0 + s) / 14.0,
            (7.0 + s) / 14.0,
            0.5,
            (7.0 - s) / 14.0,
            (7.0 - s) / 14.0,
            0.5,
            (7.0 + s) / 14.0,
            1.0,
        ];
        for (c, e) in tab.nodes().iter().zip(expected) {
            assert!((c - e).abs() < 1e-14, "{c} vs {e}");
        }
    }

    #[test]
    fn order_estimates() {
        let exact = [std::f64::consts::E];
        let cfg4 = IntegratorConfig::new(0.1, 1.0, RkOrder::Four).unwrap();
        match order_check(growth, [1.0], &exact, &cfg4).unwrap() {
            ObservedOrder::Order(p) => assert!((p - 4.0).abs() < 0.5, "{p}"),
            s => panic!("{s:?}"),
        }
        let cfg8 = IntegratorConfig::new(0.2, 1.0, RkOrder::Eight).unwrap();
        match order_check(growth, [1.0], &exact, &cfg8).unwrap() {
            ObservedOrder::Order(p) => assert!((p - 8.0).abs() < 1.0, "{p}"),
            s => panic!("{s:?}"),
        }
        let tiny = IntegratorConfig::new(1e-4, 1.0, RkOrder::Eight).unwrap();
        assert!(matches!(
            order_check(growth, [1.0], &exact, &tiny).unwrap(),
            ObservedOrder::Saturated { .. }
        ));
    }

    #[test]
    fn runs_in_single_precision() {
        let cfg = IntegratorConfig::<f32>::new(0.1, 1.0, RkOrder::Eight).unwrap();
        let traj = integrate(|_t, y: &[f32; 1]| [y[0]], [1.0f32], &cfg).unwrap();
        assert!((traj.last()[0] - std::f32::consts::E).abs() < 1e-5);
    }
}

//! Parameter sweeps, truncated-boundary checks, and table emission.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::itm::{solve_iterative, ItmConfig, ItmSolution, RootTrace};
use crate::model::{ExtendedParams, Profile};
use crate::ode::IntegratorConfig;
use crate::scalar::Scalar;

/// Maximum number of bracket expansions tried after a bad bracket.
pub const MAX_BRACKET_EXPANSIONS: usize = 5;

/// Family of `f''(0)` versus `P1` curves, one per `P2` value.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub p2_values: Vec<T>,
    /// Ascending.
    pub p1_grid: Vec<T>,
    pub itm: ItmConfig<T>,
    pub integrator: IntegratorConfig<T>,
}

impl<T: Scalar> SweepSpec<T> {
    /// `P2 ∈ {0, 1, 2}` and `P1` from 0 to 0.9 in steps of 0.05.
    pub fn default_family(itm: ItmConfig<T>, integrator: IntegratorConfig<T>) -> Self {
        Self {
            p2_values: [0.0, 1.0, 2.0].into_iter().map(T::lit).collect(),
            p1_grid: (0..=18).map(|i| T::lit(0.05 * i as f64)).collect(),
            itm,
            integrator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p1_grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::InvalidConfig("P1 grid must be strictly ascending".into()));
        }
        if let Some(p2) = self.p2_values.iter().find(|p| p.is_nan() || **p < T::zero()) {
            return Err(Error::InvalidConfig(format!("P2 = {p2} must be >= 0")));
        }
        self.itm.validate()?;
        self.integrator.steps()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub p2: T,
    pub p1: T,
    /// `f''(0)`, or the error message for a failed point.
    pub missing_ic: std::result::Result<T, String>,
}

/// [`solve_iterative`], widening the bracket geometrically about its centre
/// whenever it fails to enclose a sign change. The lower end is kept
/// positive by halving it instead of crossing zero.
pub fn solve_iterative_widening<T: Scalar>(
    params: &ExtendedParams<T>,
    config: &ItmConfig<T>,
    int_config: &IntegratorConfig<T>,
) -> Result<ItmSolution<T>> {
    let mut cfg = *config;
    let mut expansions = 0;
    loop {
        match solve_iterative(params, &cfg, int_config) {
            Err(Error::BadBracket { .. }) if expansions < MAX_BRACKET_EXPANSIONS => {
                let (lo, hi) = cfg.bracket;
                let two = T::lit(2.0);
                let centre = (lo + hi) / two;
                let half = hi - centre;
                let new_lo = centre - two * half;
                let new_lo = if new_lo > T::zero() { new_lo } else { lo / two };
                cfg = cfg.with_bracket(new_lo, centre + two * half);
                expansions += 1;
            }
            other => return other,
        }
    }
}

/// Missing initial condition over the `P1` grid for each `P2`. Points run in
/// parallel; rows come back grouped by `P2` in input order and by ascending
/// `P1` within a group.
pub fn sweep_missing_ic<T: Scalar>(spec: &SweepSpec<T>) -> Result<Vec<SweepRow<T>>> {
    spec.validate()?;
    let points: Vec<(T, T)> = spec
        .p2_values
        .iter()
        .flat_map(|&p2| spec.p1_grid.iter().map(move |&p1| (p2, p1)))
        .collect();
    Ok(points
        .par_iter()
        .map(|&(p2, p1)| {
            let missing_ic = ExtendedParams::new(p1, p2)
                .and_then(|p| solve_iterative_widening(&p, &spec.itm, &spec.integrator))
                .map(|sol| sol.missing_ic)
                .map_err(|e| e.to_string());
            SweepRow { p2, p1, missing_ic }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCheck<T> {
    pub base: T,
    pub doubled: T,
    /// `|f''(0)_doubled - f''(0)|`
    pub delta: T,
    pub converged: bool,
}

/// Largest `delta` still counted as converged.
pub const TRUNCATION_TOLERANCE: f64 = 1e-7;

/// Re-runs `solve` with the truncated boundary doubled and compares the
/// missing initial conditions it returns.
pub fn verify_truncation<T, F>(solve: F, int_config: &IntegratorConfig<T>) -> Result<TruncationCheck<T>>
where
    T: Scalar,
    F: Fn(&IntegratorConfig<T>) -> Result<T>,
{
    let base = solve(int_config)?;
    let doubled_cfg = int_config.with_eta_end(int_config.eta_end * T::lit(2.0))?;
    let doubled = solve(&doubled_cfg)?;
    let delta = (doubled - base).abs();
    Ok(TruncationCheck {
        base,
        doubled,
        delta,
        converged: delta < T::lit(TRUNCATION_TOLERANCE),
    })
}

/// A single table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Printed with 12 significant digits.
    Num(f64),
    /// Printed with the shortest representation that round-trips.
    Exact(f64),
    Text(String),
    Blank,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x, 12),
            Cell::Exact(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
            Cell::Blank => String::new(),
        }
    }

    fn render_csv(&self) -> String {
        match self {
            Cell::Exact(x) => format_sig(*x, 12),
            other => other.render(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Blank, Cell::Num)
    }
}

/// Header plus homogeneous rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Format {
    Csv,
    #[default]
    Aligned,
}

/// `x` with `digits` significant digits; positional notation for moderate
/// magnitudes, scientific otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        format!("{:.*}", (digits as i32 - 1 - exp) as usize, x)
    } else {
        sci
    }
}

/// Writes `table` to `out` in the requested format.
pub fn emit<W: Write>(table: &Table, format: Format, out: W) -> io::Result<()> {
    match format {
        Format::Csv => emit_csv(table, out),
        Format::Aligned => emit_aligned(table, out),
    }
}

fn emit_csv<W: Write>(table: &Table, out: W) -> io::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(&table.headers)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(Cell::render_csv))?;
    }
    writer.flush()
}

fn emit_aligned<W: Write>(table: &Table, mut out: W) -> io::Result<()> {
    let rendered: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| row.iter().map(Cell::render).collect())
        .collect();
    let widths: Vec<usize> = (0..table.headers.len())
        .map(|c| {
            rendered
                .iter()
                .map(|r| r[c].chars().count())
                .chain(std::iter::once(table.headers[c].chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_owned()
    };
    let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1));
    writeln!(out, "{}", line(&table.headers))?;
    writeln!(out, "{rule}")?;
    for r in &rendered {
        writeln!(out, "{}", line(r))?;
    }
    writeln!(out, "{rule}")
}

/// Renders to an in-memory byte buffer.
pub fn emit_to_vec(table: &Table, format: Format) -> Vec<u8> {
    let mut buf = Vec::new();
    emit(table, format, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

/// Columns `P1*, P2*, P1, P2, f''(0)`.
pub fn nitm_table<T: Scalar>(rows: &[crate::nitm::NitmResult<T>]) -> Table {
    let mut t = Table::new(["P1*", "P2*", "P1", "P2", "f''(0)"]);
    for r in rows {
        t.push(vec![
            r.p1_star.as_f64().into(),
            r.p2_star.as_f64().into(),
            r.params.p1().as_f64().into(),
            r.params.p2().as_f64().into(),
            r.missing_ic.as_f64().into(),
        ]);
    }
    t
}

/// Columns `h*, lambda, Gamma`. The two opening bracket evaluations of a
/// bisection or regula falsi search are shown without `lambda`.
pub fn trace_table<T: Scalar>(trace: &RootTrace<T>, blank_endpoints: bool) -> Table {
    let mut t = Table::new(["h*", "lambda", "Gamma"]);
    for (i, it) in trace.iterations.iter().enumerate() {
        let lambda = if blank_endpoints && i < 2 {
            Cell::Blank
        } else {
            it.lambda.map(Scalar::as_f64).into()
        };
        t.push(vec![Cell::Exact(it.h_star.as_f64()), lambda, it.gamma.as_f64().into()]);
    }
    t
}

/// Columns `P2, P1, f''(0)`; failed points carry an error token in the last
/// column.
pub fn sweep_table<T: Scalar>(rows: &[SweepRow<T>]) -> Table {
    let mut t = Table::new(["P2", "P1", "f''(0)"]);
    for r in rows {
        let value = match &r.missing_ic {
            Ok(v) => v.as_f64().into(),
            Err(e) => Cell::Text(format!("error: {e}")),
        };
        t.push(vec![r.p2.as_f64().into(), r.p1.as_f64().into(), value]);
    }
    t
}

/// Starred and rescaled profiles side by side, every `stride`-th node plus
/// the last one.
pub fn profile_table<T: Scalar>(starred: &Profile<T>, rescaled: &Profile<T>, stride: usize) -> Table {
    let mut t = Table::new(["eta*", "f*", "f*'", "f*''", "eta", "f", "f'", "f''"]);
    let stride = stride.max(1);
    let last = starred.len() - 1;
    for i in (0..starred.len()).filter(|i| i % stride == 0 || *i == last) {
        let (s, r) = (starred.states()[i], rescaled.states()[i]);
        t.push(
            [
                starred.grid()[i],
                s[0],
                s[1],
                s[2],
                rescaled.grid()[i],
                r[0],
                r[1],
                r[2],
            ]
            .into_iter()
            .map(|x| Cell::Num(x.as_f64()))
            .collect(),
        );
    }
    t
}

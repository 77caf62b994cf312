//! Command-line front end.
//!
//! Exit status is 0 on success, 1 on a usage error, and 2 when a solve fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::itm::{solve_iterative, Finder, ItmConfig};
use crate::model::{bc_residuals, ExtendedParams};
use crate::nitm::solve_noniterative;
use crate::ode::{IntegratorConfig, RkOrder};
use crate::reference::BLASIUS_SKIN_FRICTION;
use crate::repro;
use crate::report::{
    emit, nitm_table, profile_table, sweep_missing_ic, sweep_table, trace_table, Cell, Format,
    SweepSpec, Table,
};

/// Default run settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub step_size: f64,
    pub eta_end: f64,
    pub order: RkOrder,
    pub sigma: f64,
    pub tol: f64,
    pub bracket: (f64, f64),
    pub finder: Finder,
    pub max_iter: usize,
}

pub fn defaults() -> Defaults {
    Defaults {
        step_size: 0.001,
        eta_end: 10.0,
        order: RkOrder::Eight,
        sigma: 1.0,
        tol: 1e-5,
        bracket: (0.75, 1.75),
        finder: Finder::Bisection,
        max_iter: 100,
    }
}

/// Step used by the `blasius` shorthand.
pub const BLASIUS_STEP: f64 = 0.0001;

impl Defaults {
    pub fn integrator(&self) -> IntegratorConfig<f64> {
        IntegratorConfig::new(self.step_size, self.eta_end, self.order)
            .expect("default grid tiles exactly")
    }

    pub fn itm(&self) -> ItmConfig<f64> {
        ItmConfig {
            sigma: self.sigma,
            bracket: self.bracket,
            tol: self.tol,
            max_iter: self.max_iter,
            finder: self.finder,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "blasius-tm",
    version,
    about = "Transformation methods for the Blasius problem with moving-wall and slip conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Non-iterative method: one starred IVP, parameters emerge from the run
    Nitm {
        #[arg(long, allow_negative_numbers = true)]
        p1star: f64,
        #[arg(long)]
        p2star: f64,
        /// Also print starred and rescaled profiles
        #[arg(long)]
        profile: bool,
        /// Profile row stride
        #[arg(long, default_value_t = 100)]
        every: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Iterative method for prescribed (P1, P2)
    Itm {
        #[arg(long, allow_negative_numbers = true)]
        p1: f64,
        #[arg(long)]
        p2: f64,
        /// Also print the root-finder trace
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        itm: ItmArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classic Blasius problem (P1 = P2 = 0) at step 0.0001
    Blasius {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reproduce the non-iterative parameter table with deviations
    Table1 {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reproduce the bisection iteration table with deviations
    Table2 {
        #[command(flatten)]
        itm: ItmArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// f''(0) versus P1 for several P2 using the iterative method
    Sweep {
        /// Comma-separated P2 values
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 1.0, 2.0])]
        p2_values: Vec<f64>,
        /// Comma-separated ascending P1 values; overrides the range flags
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        p1_values: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        p1_start: f64,
        #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
        p1_stop: f64,
        #[arg(long, default_value_t = 0.05)]
        p1_step: f64,
        #[command(flatten)]
        itm: ItmArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Constant step size
    #[arg(long)]
    step: Option<f64>,
    /// Truncated boundary of the starred problem
    #[arg(long)]
    eta_end: Option<f64>,
    /// Runge-Kutta order (4 or 8)
    #[arg(long)]
    order: Option<u32>,
}

#[derive(Debug, Args)]
struct ItmArgs {
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    bracket: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long, value_enum)]
    finder: Option<FinderArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FinderArg {
    Bisection,
    Secant,
    RegulaFalsi,
    Newton,
}

impl From<FinderArg> for Finder {
    fn from(f: FinderArg) -> Self {
        match f {
            FinderArg::Bisection => Finder::Bisection,
            FinderArg::Secant => Finder::Secant,
            FinderArg::RegulaFalsi => Finder::RegulaFalsi,
            FinderArg::Newton => Finder::Newton,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
    /// Write to this file instead of standard output
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        match self.format {
            FormatArg::Table => Format::Aligned,
            FormatArg::Csv => Format::Csv,
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(Error),
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl GridArgs {
    fn config(&self, default_step: f64) -> Result<IntegratorConfig<f64>, Failure> {
        let d = defaults();
        let order = match self.order {
            Some(o) => RkOrder::try_from(o).map_err(|e| Failure::Usage(e.to_string()))?,
            None => d.order,
        };
        IntegratorConfig::new(
            self.step.unwrap_or(default_step),
            self.eta_end.unwrap_or(d.eta_end),
            order,
        )
        .map_err(|e| Failure::Usage(e.to_string()))
    }
}

impl ItmArgs {
    fn config(&self) -> Result<ItmConfig<f64>, Failure> {
        let mut cfg = defaults().itm();
        if let Some(s) = self.sigma {
            cfg.sigma = s;
        }
        if let Some(b) = &self.bracket {
            cfg.bracket = (b[0], b[1]);
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        if let Some(f) = self.finder {
            cfg.finder = f.into();
        }
        cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn params(p1: f64, p2: f64) -> Result<ExtendedParams<f64>, Failure> {
    ExtendedParams::new(p1, p2).map_err(|e| Failure::Usage(e.to_string()))
}

/// Rendered output: tables separated by blank lines, then trailing notes.
/// Notes follow the tables in aligned output and go to the diagnostic
/// stream for CSV so the data stays machine-readable.
struct Output {
    format: Format,
    tables: Vec<Table>,
    notes: Vec<String>,
}

impl Output {
    fn new(format: Format) -> Self {
        Self {
            format,
            tables: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn render(&self) -> (Vec<u8>, Vec<u8>) {
        let mut main = Vec::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                main.push(b'\n');
            }
            emit(t, self.format, &mut main).expect("in-memory write");
        }
        let mut notes = Vec::new();
        for n in &self.notes {
            notes.extend_from_slice(n.as_bytes());
            notes.push(b'\n');
        }
        match self.format {
            Format::Aligned => {
                if !notes.is_empty() {
                    main.push(b'\n');
                    main.extend(notes);
                }
                (main, Vec::new())
            }
            Format::Csv => (main, notes),
        }
    }
}

fn execute(command: Command) -> Result<(Output, Option<PathBuf>), Failure> {
    let d = defaults();
    match command {
        Command::Nitm {
            p1star,
            p2star,
            profile,
            every,
            grid,
            output,
        } => {
            let cfg = grid.config(d.step_size)?;
            params(0.0, p2star)?;
            let r = solve_noniterative(p1star, p2star, &cfg).map_err(Failure::Numerical)?;
            let mut out = Output::new(output.format());
            out.tables.push(nitm_result_table(&r));
            if profile {
                out.tables.push(profile_table(&r.starred, &r.rescaled, every));
            }
            Ok((out, output.output))
        }
        Command::Blasius { grid, output } => {
            let cfg = grid.config(BLASIUS_STEP)?;
            let r = solve_noniterative(0.0, 0.0, &cfg).map_err(Failure::Numerical)?;
            let mut out = Output::new(output.format());
            out.tables.push(nitm_result_table(&r));
            out.notes.push(format!(
                "# f''(0) - {BLASIUS_SKIN_FRICTION} = {:+.3e}",
                r.missing_ic - BLASIUS_SKIN_FRICTION
            ));
            Ok((out, output.output))
        }
        Command::Itm {
            p1,
            p2,
            trace,
            itm,
            grid,
            output,
        } => {
            let cfg = grid.config(d.step_size)?;
            let itm = itm.config()?;
            let p = params(p1, p2)?;
            let sol = solve_iterative(&p, &itm, &cfg).map_err(Failure::Numerical)?;
            let res = bc_residuals(&sol.rescaled, &p);
            let mut t = Table::new([
                "P1", "P2", "sigma", "finder", "h*", "lambda", "Gamma", "f''(0)", "evaluations",
                "max|bc residual|",
            ]);
            t.push(vec![
                p1.into(),
                p2.into(),
                sol.sigma.into(),
                itm.finder.name().into(),
                Cell::Exact(sol.h_star),
                sol.lambda.lambda().into(),
                sol.gamma.into(),
                sol.missing_ic.into(),
                sol.trace.len().to_string().into(),
                res.max_abs().into(),
            ]);
            let mut out = Output::new(output.format());
            out.tables.push(t);
            if trace {
                let bracketing = matches!(itm.finder, Finder::Bisection | Finder::RegulaFalsi);
                out.tables.push(trace_table(&sol.trace, bracketing));
            }
            Ok((out, output.output))
        }
        Command::Table1 { grid, output } => {
            let cfg = grid.config(d.step_size)?;
            let rows = repro::table1(&cfg);
            let mut out = Output::new(output.format());
            out.tables.push(repro::table1_report(&rows));
            match repro::table1_max_deviation(&rows) {
                Some(m) => out.notes.push(format!(
                    "# max |computed - printed| excluding the P2 erratum cell: {m:.3e}"
                )),
                None => out.notes.push("# some rows failed".into()),
            }
            if let Some(Ok(row)) = rows.get(crate::reference::NITM_P2_ERRATUM_ROW) {
                out.notes.push(format!(
                    "# erratum: row P1* = {}, P2* = {} prints P2 = {} (its f''(0) entry); \
                     lambda * P2* = {}",
                    row.reference.p1_star,
                    row.reference.p2_star,
                    row.reference.p2,
                    Cell::Num(row.computed.params.p2()).render()
                ));
            }
            if let Some(Err(e)) = rows.iter().find(|r| r.is_err()) {
                return Err(Failure::Numerical(e.clone()));
            }
            Ok((out, output.output))
        }
        Command::Table2 { itm, grid, output } => {
            let cfg = grid.config(d.step_size)?;
            let itm = itm.config()?;
            let sol = repro::table2(&itm, &cfg).map_err(Failure::Numerical)?;
            let mut out = Output::new(output.format());
            out.tables.push(repro::table2_report(&sol.trace));
            out.notes.push(format!(
                "# sigma = {}: trace {} the printed table",
                itm.sigma,
                if repro::trace_matches(&sol.trace) {
                    "reproduces"
                } else {
                    "does not reproduce"
                }
            ));
            for sigma in [1.0, 10.0] {
                let c = repro::convention_check(sigma, &cfg).map_err(Failure::Numerical)?;
                out.notes.push(format!(
                    "# replaying printed h* with sigma = {sigma}: max |dlambda| = {:.3e}, \
                     max |dGamma| = {:.3e} -> {}",
                    c.max_lambda_deviation,
                    c.max_gamma_deviation,
                    if c.matches { "matches" } else { "does not match" }
                ));
            }
            Ok((out, output.output))
        }
        Command::Sweep {
            p2_values,
            p1_values,
            p1_start,
            p1_stop,
            p1_step,
            itm,
            grid,
            output,
        } => {
            let integrator = grid.config(d.step_size)?;
            let itm = itm.config()?;
            let p1_grid = match p1_values {
                Some(v) => v,
                None => p1_range(p1_start, p1_stop, p1_step)?,
            };
            let spec = SweepSpec {
                p2_values,
                p1_grid,
                itm,
                integrator,
            };
            spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let rows = sweep_missing_ic(&spec).map_err(Failure::Numerical)?;
            let failed = rows.iter().filter(|r| r.missing_ic.is_err()).count();
            let mut out = Output::new(output.format());
            out.tables.push(sweep_table(&rows));
            if failed > 0 {
                out.notes.push(format!("# {failed} of {} points failed", rows.len()));
            }
            Ok((out, output.output))
        }
    }
}

fn nitm_result_table(r: &crate::nitm::NitmResult<f64>) -> Table {
    let mut t = nitm_table(std::slice::from_ref(r));
    t.headers.insert(2, "lambda".into());
    t.rows[0].insert(2, r.lambda.lambda().into());
    t
}

fn p1_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, Failure> {
    if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
        return Err(Failure::Usage(format!(
            "P1 range needs start <= stop and a positive step, got {start}:{stop}:{step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

/// Parses `args` (program name first) and runs the selected subcommand,
/// writing results to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write + ?Sized,
    E: Write + ?Sized,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    let result = execute(cli.command).and_then(|(output, path)| {
        let (main, notes) = output.render();
        match path {
            Some(p) => std::fs::write(p, main)?,
            None => out.write_all(&main)?,
        }
        err.write_all(&notes)?;
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Numerical(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

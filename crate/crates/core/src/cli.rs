//! Command-line frontend: spline evaluation, transforms, fractional operators on
//! sampled data, and the atom-identity verifiers.
//!
//! Every option can come from a JSON config file (`--config`); flags given on the
//! command line override the file. All floating-point output is written with 17
//! significant digits so that it round-trips exactly.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::Paravector;
use crate::error::Error;
use crate::fourier::FrequencyGrid;
use crate::fracops::{
    classical_atom_check, exp_difference_check, frac_derivative_with, frac_integral,
    shifted_frac_derivative_with, verify_atom_identity_complex, verify_atom_identity_expz,
    verify_atom_identity_hc_with, DerivativeForm, MultiplierConvention, ResidualReport,
    SampledSignal,
};
use crate::splines::{ExponentialWeights, SplineFamily};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "FRACSPLINE_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("verification could not run: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Library(_) => EXIT_USAGE,
            Self::Verification(_) => EXIT_VERIFY,
            Self::Io { .. } => EXIT_IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Eval,
    Transform,
    Fracop,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Classical,
    Fractional,
    Complex,
    Exponential,
    ComplexExponential,
    Hypercomplex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FracOp {
    Integral,
    Derivative,
    /// `(D + aI)^z`, needs `shift = a`.
    Shifted,
}

/// Uniform abscissae `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) || !self.start.is_finite() {
            return Err(CliError::Usage(format!(
                "grid needs start <= stop and step > 0, got {}:{}:{}",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|j| self.start + j as f64 * self.step).collect())
    }
}

/// Complete run description; every field is optional so that a config file and
/// command-line flags can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub family: Option<FamilyName>,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub alpha: Option<f64>,
    /// `[re, im]`.
    #[serde(default)]
    pub z: Option<[f64; 2]>,
    #[serde(default)]
    pub a: Option<Vec<f64>>,
    /// `[s, v_1, ..., v_n]`.
    #[serde(default)]
    pub upsilon: Option<Vec<f64>>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub omega_max: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub band: Option<[f64; 2]>,
    #[serde(default, rename = "K")]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub op: Option<FracOp>,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub shift: Option<f64>,
    #[serde(default)]
    pub form: Option<DerivativeForm>,
    #[serde(default)]
    pub multiplier: Option<MultiplierConvention>,
}

pub const DEFAULT_OMEGA_MAX: f64 = 3.0;
pub const DEFAULT_COUNT: usize = 601;
pub const DEFAULT_TRUNCATION: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-6;

impl RunConfig {
    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `base`.
    pub fn merged_over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            command: self.command.or(base.command),
            family: self.family.or(base.family),
            n: self.n.or(base.n),
            alpha: self.alpha.or(base.alpha),
            z: self.z.or(base.z),
            a: self.a.or(base.a),
            upsilon: self.upsilon.or(base.upsilon),
            grid: self.grid.or(base.grid),
            omega_max: self.omega_max.or(base.omega_max),
            count: self.count.or(base.count),
            band: self.band.or(base.band),
            truncation: self.truncation.or(base.truncation),
            tol: self.tol.or(base.tol),
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            op: self.op.or(base.op),
            input: self.input.or(base.input),
            shift: self.shift.or(base.shift),
            form: self.form.or(base.form),
            multiplier: self.multiplier.or(base.multiplier),
        }
    }

    fn family_name(&self) -> CliResult<FamilyName> {
        self.family
            .ok_or_else(|| CliError::Usage("missing --family".into()))
    }

    fn complex_order(&self) -> CliResult<Complex64> {
        match (self.z, self.alpha) {
            (Some([re, im]), _) => Ok(Complex64::new(re, im)),
            (None, Some(alpha)) => Ok(Complex64::new(alpha, 0.0)),
            _ => Err(CliError::Usage("missing order: give --z re,im or --alpha".into())),
        }
    }

    fn weights(&self) -> CliResult<&[f64]> {
        self.a
            .as_deref()
            .ok_or_else(|| CliError::Usage("missing --a".into()))
    }

    fn paravector(&self) -> CliResult<Paravector> {
        match self.upsilon.as_deref() {
            Some([s, v @ ..]) => Ok(Paravector::new(*s, v.to_vec())?),
            _ => Err(CliError::Usage("missing --upsilon s,v1,..,vn".into())),
        }
    }

    /// The spline family with its parameters, validated.
    pub fn spline_family(&self) -> CliResult<SplineFamily> {
        let family = match self.family_name()? {
            FamilyName::Classical => SplineFamily::Classical(
                self.n
                    .ok_or_else(|| CliError::Usage("family classical needs --n".into()))?,
            ),
            FamilyName::Fractional => SplineFamily::Fractional(
                self.alpha
                    .ok_or_else(|| CliError::Usage("family fractional needs --alpha".into()))?,
            ),
            FamilyName::Complex => SplineFamily::Complex(self.complex_order()?),
            FamilyName::Exponential => {
                SplineFamily::Exponential(ExponentialWeights::new(self.weights()?.to_vec())?)
            }
            FamilyName::ComplexExponential => match self.weights()? {
                [a] => SplineFamily::ComplexExponential {
                    a: *a,
                    z: self.complex_order()?,
                },
                w => {
                    return Err(CliError::Usage(format!(
                        "family complex-exponential takes a single --a, got {}",
                        w.len()
                    )))
                }
            },
            FamilyName::Hypercomplex => SplineFamily::Hypercomplex(self.paravector()?),
        };
        family.validate()?;
        Ok(family)
    }

    pub fn frequency_grid(&self) -> CliResult<FrequencyGrid> {
        let grid = FrequencyGrid::new(
            self.omega_max.unwrap_or(DEFAULT_OMEGA_MAX),
            self.count.unwrap_or(DEFAULT_COUNT),
        )?;
        Ok(match self.band {
            Some([lo, hi]) => grid.with_band(lo, hi),
            None => grid,
        })
    }
}

/// Command-line interface.
#[derive(Debug, Parser)]
#[command(name = "fracspline", version, about = "Cardinal B-splines of fractional, complex and hypercomplex order")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Evaluate a spline on a grid.
    Eval(Options),
    /// Evaluate a spline's Fourier transform.
    Transform(Options),
    /// Apply a fractional operator to sampled data.
    Fracop(Options),
    /// Check an atom identity in the frequency domain.
    Verify(Options),
}

#[derive(Debug, Default, Args)]
pub struct Options {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Complex order `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Comma-separated exponential weights.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Paravector order `s,v1,..,vn`.
    #[arg(long, allow_hyphen_values = true)]
    pub upsilon: Option<String>,
    /// `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Frequency band `lo:hi` for verification.
    #[arg(long, allow_hyphen_values = true)]
    pub band: Option<String>,
    /// Truncation of the atom sum.
    #[arg(short = 'K', long = "K")]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long, value_enum)]
    pub op: Option<FracOp>,
    /// Input CSV with columns `x,value` or `x,value_re,value_im`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub shift: Option<f64>,
    #[arg(long, value_enum)]
    pub form: Option<FormArg>,
    #[arg(long, value_enum)]
    pub multiplier: Option<MultiplierArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormArg {
    RiemannLiouville,
    Caputo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MultiplierArg {
    PlusI,
    MinusI,
}

fn parse_list(name: &str, text: &str, sep: char) -> CliResult<Vec<f64>> {
    text.split(sep)
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{name}: cannot parse '{t}' as a number")))
        })
        .collect()
}

fn parse_fixed<const N: usize>(name: &str, text: &str, sep: char) -> CliResult<[f64; N]> {
    let v = parse_list(name, text, sep)?;
    v.try_into().map_err(|v: Vec<f64>| {
        CliError::Usage(format!("--{name} expects {N} values, got {}", v.len()))
    })
}

impl Options {
    /// Flags as a partial config (without the config file).
    pub fn to_config(&self, command: Command) -> CliResult<RunConfig> {
        Ok(RunConfig {
            command: Some(command),
            family: self.family,
            n: self.n,
            alpha: self.alpha,
            z: self.z.as_deref().map(|t| parse_fixed("z", t, ',')).transpose()?,
            a: self.a.as_deref().map(|t| parse_list("a", t, ',')).transpose()?,
            upsilon: self
                .upsilon
                .as_deref()
                .map(|t| parse_list("upsilon", t, ','))
                .transpose()?,
            grid: self
                .grid
                .as_deref()
                .map(|t| {
                    parse_fixed::<3>("grid", t, ':').map(|[start, stop, step]| GridSpec {
                        start,
                        stop,
                        step,
                    })
                })
                .transpose()?,
            omega_max: self.omega_max,
            count: self.count,
            band: self.band.as_deref().map(|t| parse_fixed("band", t, ':')).transpose()?,
            truncation: self.truncation,
            tol: self.tol,
            output: self.output.clone(),
            format: self.format,
            op: self.op,
            input: self.input.clone(),
            shift: self.shift,
            form: self.form.map(|f| match f {
                FormArg::RiemannLiouville => DerivativeForm::RiemannLiouville,
                FormArg::Caputo => DerivativeForm::Caputo,
            }),
            multiplier: self.multiplier.map(|m| match m {
                MultiplierArg::PlusI => MultiplierConvention::PlusI,
                MultiplierArg::MinusI => MultiplierConvention::MinusI,
            }),
        })
    }

    /// Flags merged over the config file, if any.
    pub fn resolve(&self, command: Command) -> CliResult<RunConfig> {
        let flags = self.to_config(command)?;
        match &self.config {
            Some(path) => Ok(flags.merged_over(RunConfig::from_json_file(path)?)),
            None => Ok(flags),
        }
    }
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// serde_json formatter writing every float with 17 significant digits.
struct RoundTripFormatter;

impl serde_json::ser::Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, RoundTripFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Usage(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// A table of output rows; cells are floats or integers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Float(f64),
    Int(u64),
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(x) => format_float(*x),
                    Cell::Int(i) => i.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn render(&self, format: OutputFormat) -> CliResult<String> {
        match format {
            OutputFormat::Csv => Ok(self.to_csv()),
            OutputFormat::Json => to_json(self),
        }
    }
}

/// Component column names `s_re, s_im, v1_re, v1_im, ...`.
fn component_columns(count: usize) -> Vec<String> {
    (0..count)
        .flat_map(|c| {
            let name = if c == 0 { "s".to_string() } else { format!("v{c}") };
            [format!("{name}_re"), format!("{name}_im")]
        })
        .collect()
}

fn push_components(row: &mut Vec<Cell>, components: &[Complex64]) {
    for c in components {
        row.push(Cell::Float(c.re));
        row.push(Cell::Float(c.im));
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => EXIT_OK,
            Self::Fail => EXIT_VERIFY,
        }
    }
}

/// Spline values on the configured grid: columns `x, s_re, s_im, ..., terms_used`.
pub fn eval_table(config: &RunConfig) -> CliResult<Table> {
    let family = config.spline_family()?;
    let grid = config
        .grid
        .ok_or_else(|| CliError::Usage("eval needs --grid start:stop:step".into()))?;
    let xs = grid.points()?;
    let results = family.eval_grid(&xs)?;
    let mut columns = vec!["x".to_string()];
    columns.extend(component_columns(family.component_count()));
    columns.push("terms_used".into());
    let rows = results
        .iter()
        .map(|r| {
            let mut row = vec![Cell::Float(r.x)];
            push_components(&mut row, &r.value.components());
            row.push(Cell::Int(r.terms_used as u64));
            row
        })
        .collect();
    Ok(Table { columns, rows })
}

pub fn run_eval(config: &RunConfig) -> CliResult<Status> {
    let table = eval_table(config)?;
    let text = table.render(config.format.unwrap_or(OutputFormat::Csv))?;
    write_output(config.output.as_deref(), &text)?;
    Ok(Status::Pass)
}

/// Transform values: columns `omega, s_re, s_im, ...`. Frequencies come from
/// `grid` if set, otherwise from the symmetric frequency grid.
pub fn transform_table(config: &RunConfig) -> CliResult<Table> {
    let family = config.spline_family()?;
    let omegas = match config.grid {
        Some(g) => g.points()?,
        None => config.frequency_grid()?.points(),
    };
    let values: Vec<Vec<Complex64>> = omegas
        .iter()
        .map(|&w| family.transform(w))
        .collect::<crate::Result<_>>()?;
    let mut columns = vec!["omega".to_string()];
    columns.extend(component_columns(family.component_count()));
    let rows = omegas
        .iter()
        .zip(&values)
        .map(|(w, v)| {
            let mut row = vec![Cell::Float(*w)];
            push_components(&mut row, v);
            row
        })
        .collect();
    Ok(Table { columns, rows })
}

pub fn run_transform(config: &RunConfig) -> CliResult<Status> {
    let table = transform_table(config)?;
    let text = table.render(config.format.unwrap_or(OutputFormat::Csv))?;
    write_output(config.output.as_deref(), &text)?;
    Ok(Status::Pass)
}

/// Parses `x,value` or `x,value_re,value_im` rows on a uniform grid; a
/// non-numeric first line is taken as a header.
pub fn parse_signal_csv(text: &str) -> std::result::Result<SampledSignal, Error> {
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        let nums = match parsed {
            Ok(n) => n,
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::Format(format!("line {}: non-numeric field", i + 1))),
        };
        let value = match nums.as_slice() {
            [_, re] => Complex64::new(*re, 0.0),
            [_, re, im] => Complex64::new(*re, *im),
            _ => {
                return Err(Error::Format(format!(
                    "line {}: expected 2 or 3 columns, got {}",
                    i + 1,
                    nums.len()
                )))
            }
        };
        xs.push(nums[0]);
        values.push(value);
    }
    if xs.len() < 2 {
        return Err(Error::Format("input needs at least two samples".into()));
    }
    let start = xs[0];
    let step = xs[1] - xs[0];
    for (j, &x) in xs.iter().enumerate() {
        let expected = start + j as f64 * step;
        if (x - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(Error::Format(format!(
                "grid is not uniform: x[{j}] = {x}, expected {expected}"
            )));
        }
    }
    SampledSignal::new(start, step, values)
}

/// Operator output: columns `x, value_re, value_im, valid`.
pub fn fracop_table(config: &RunConfig, signal: &SampledSignal) -> CliResult<Table> {
    let z = config.complex_order()?;
    let form = config.form.unwrap_or_default();
    let op = config
        .op
        .ok_or_else(|| CliError::Usage("fracop needs --op integral|derivative|shifted".into()))?;
    let out = match op {
        FracOp::Integral => frac_integral(z, signal)?,
        FracOp::Derivative => frac_derivative_with(z, signal, form)?,
        FracOp::Shifted => {
            let a = config
                .shift
                .ok_or_else(|| CliError::Usage("op shifted needs --shift a".into()))?;
            shifted_frac_derivative_with(a, z, signal, form)?
        }
    };
    let rows = (0..out.len())
        .map(|j| {
            let v = out.values()[j];
            vec![
                Cell::Float(out.x(j)),
                Cell::Float(v.re),
                Cell::Float(v.im),
                Cell::Int(out.is_valid(j) as u64),
            ]
        })
        .collect();
    Ok(Table {
        columns: ["x", "value_re", "value_im", "valid"].map(String::from).to_vec(),
        rows,
    })
}

pub fn run_fracop(config: &RunConfig) -> CliResult<Status> {
    let path = config
        .input
        .as_deref()
        .ok_or_else(|| CliError::Usage("fracop needs --input FILE".into()))?;
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let signal = parse_signal_csv(&text)?;
    let table = fracop_table(config, &signal)?;
    let text = table.render(config.format.unwrap_or(OutputFormat::Csv))?;
    write_output(config.output.as_deref(), &text)?;
    Ok(Status::Pass)
}

/// Runs the verifier selected by the family.
pub fn verify_report(config: &RunConfig) -> CliResult<ResidualReport> {
    let grid = config.frequency_grid()?;
    let k = config.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let family = config.spline_family()?;
    let report = match family {
        SplineFamily::Classical(n) => classical_atom_check(n, &grid),
        SplineFamily::Fractional(alpha) => {
            verify_atom_identity_complex(Complex64::new(alpha, 0.0), k, &grid)
        }
        SplineFamily::Complex(z) => verify_atom_identity_complex(z, k, &grid),
        SplineFamily::Exponential(w) => exp_difference_check(&w, &grid),
        SplineFamily::ComplexExponential { a, z } => verify_atom_identity_expz(a, z, k, &grid),
        SplineFamily::Hypercomplex(ups) => verify_atom_identity_hc_with(
            &ups,
            k,
            &grid,
            config.multiplier.unwrap_or_default(),
        ),
    };
    report.map_err(|e| match e {
        Error::Grid(msg) => CliError::Verification(msg),
        other => CliError::Library(other),
    })
}

/// Writes the report and passes iff the maximum residual is within `tol`.
pub fn run_verify(config: &RunConfig) -> CliResult<Status> {
    let report = verify_report(config)?;
    let tol = config.tol.unwrap_or(DEFAULT_TOL);
    let text = match config.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => Table {
            columns: vec!["omega".into(), "residual".into()],
            rows: report
                .omegas
                .iter()
                .zip(&report.residuals)
                .map(|(w, r)| vec![Cell::Float(*w), Cell::Float(*r)])
                .collect(),
        }
        .to_csv(),
    };
    write_output(config.output.as_deref(), &text)?;
    log::info!(
        "max residual {:.3e} (tol {tol:.1e}, tail bound {:.3e}, {} excluded)",
        report.max_residual,
        report.tail_bound,
        report.excluded_omegas.len()
    );
    Ok(if report.passes(tol) {
        Status::Pass
    } else {
        Status::Fail
    })
}

pub fn run(config: &RunConfig) -> CliResult<Status> {
    match config.command {
        Some(Command::Eval) => run_eval(config),
        Some(Command::Transform) => run_transform(config),
        Some(Command::Fracop) => run_fracop(config),
        Some(Command::Verify) => run_verify(config),
        None => Err(CliError::Usage("no command given".into())),
    }
}

/// Sizes the global thread pool from `FRACSPLINE_THREADS`, if set.
pub fn init_threads() -> CliResult<()> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{text}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

/// Entry point of the binary; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (command, options) = match &cli.command {
        CommandArgs::Eval(o) => (Command::Eval, o),
        CommandArgs::Transform(o) => (Command::Transform, o),
        CommandArgs::Fracop(o) => (Command::Fracop, o),
        CommandArgs::Verify(o) => (Command::Verify, o),
    };
    let result = init_threads()
        .and_then(|_| options.resolve(command))
        .and_then(|config| run(&config));
    match result {
        Ok(status) => {
            if status == Status::Fail {
                eprintln!("verification failed: residual exceeds tolerance");
            }
            status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(family: FamilyName) -> RunConfig {
        RunConfig {
            family: Some(family),
            ..Default::default()
        }
    }

    #[test]
    fn eval_classical_rows() {
        let cfg = RunConfig {
            n: Some(3),
            grid: Some(GridSpec {
                start: 0.0,
                stop: 3.0,
                step: 0.5,
            }),
            ..config(FamilyName::Classical)
        };
        let t = eval_table(&cfg).unwrap();
        assert_eq!(t.rows.len(), 7);
        assert_eq!(t.columns, ["x", "s_re", "s_im", "terms_used"]);
        assert_eq!(t.rows[3][1], Cell::Float(0.75));
    }

    #[test]
    fn eval_complex_left_of_support_is_zero() {
        let cfg = RunConfig {
            z: Some([2.5, 1.0]),
            grid: Some(GridSpec {
                start: -1.0,
                stop: 0.0,
                step: 0.5,
            }),
            ..config(FamilyName::Complex)
        };
        let t = eval_table(&cfg).unwrap();
        for row in &t.rows {
            assert_eq!(row[1], Cell::Float(0.0));
            assert_eq!(row[2], Cell::Float(0.0));
        }
    }

    #[test]
    fn hypercomplex_columns() {
        let cfg = RunConfig {
            upsilon: Some(vec![2.5, 1.0, 1.0]),
            grid: Some(GridSpec {
                start: 0.0,
                stop: 1.0,
                step: 0.5,
            }),
            ..config(FamilyName::Hypercomplex)
        };
        let t = eval_table(&cfg).unwrap();
        assert_eq!(
            t.columns,
            ["x", "s_re", "s_im", "v1_re", "v1_im", "v2_re", "v2_im", "terms_used"]
        );
    }

    #[test]
    fn parameter_constraints_are_usage_errors() {
        let cfg = RunConfig {
            z: Some([0.5, 0.0]),
            ..config(FamilyName::Complex)
        };
        let e = cfg.spline_family().unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        assert!(e.to_string().contains("re z > 1"), "{e}");
        let cfg = RunConfig {
            upsilon: Some(vec![0.9, 1.0]),
            ..config(FamilyName::Hypercomplex)
        };
        assert!(cfg.spline_family().is_err());
        let cfg = RunConfig {
            a: Some(vec![-1.0]),
            z: Some([2.5, 0.0]),
            ..config(FamilyName::ComplexExponential)
        };
        assert!(cfg.spline_family().is_err());
        assert!(config(FamilyName::Classical).spline_family().is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig {
            n: Some(3),
            tol: Some(1e-3),
            ..config(FamilyName::Classical)
        };
        let flags = RunConfig {
            n: Some(4),
            ..Default::default()
        };
        let merged = flags.merged_over(file);
        assert_eq!(merged.n, Some(4));
        assert_eq!(merged.tol, Some(1e-3));
        assert_eq!(merged.family, Some(FamilyName::Classical));
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{"command":"verify","family":"complex","z":[2.5,0],"K":200,"tol":1e-3,
            "grid":{"start":0,"stop":1,"step":0.5},"band":[0.1,3]}"#;
        let cfg: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(cfg.truncation, Some(200));
        assert_eq!(cfg.command, Some(Command::Verify));
        assert!(serde_json::from_str::<RunConfig>(r#"{"famly":"complex"}"#).is_err());
    }

    #[test]
    fn floats_have_17_significant_digits() {
        assert_eq!(format_float(0.75), "7.5000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        let json = to_json(&vec![0.1f64, 1e-300]).unwrap();
        assert_eq!(json, "[1.0000000000000001e-1,1.0000000000000000e-300]\n");
    }

    #[test]
    fn signal_csv_parsing() {
        let s = parse_signal_csv("x,value\n0,1\n0.5,2\n1.0,3\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.step(), 0.5);
        let s = parse_signal_csv("0,1,2\n1,3,4\n").unwrap();
        assert_eq!(s.values()[1], Complex64::new(3.0, 4.0));
        assert!(matches!(
            parse_signal_csv("0,1\n0.5,2\n1.2,3\n"),
            Err(Error::Format(_))
        ));
        assert!(matches!(parse_signal_csv("0,1\n"), Err(Error::Format(_))));
        assert!(matches!(parse_signal_csv("-1,1\n0,2\n"), Err(Error::Grid(_))));
    }

    #[test]
    fn verify_classical_passes() {
        let cfg = RunConfig {
            command: Some(Command::Verify),
            n: Some(4),
            ..config(FamilyName::Classical)
        };
        let r = verify_report(&cfg).unwrap();
        assert!(r.max_residual <= 1e-12);
    }

    #[test]
    fn empty_admissible_set_is_verification_error() {
        let cfg = RunConfig {
            z: Some([2.5, 0.0]),
            band: Some([10.0, 11.0]),
            ..config(FamilyName::Complex)
        };
        assert_eq!(verify_report(&cfg).unwrap_err().exit_code(), EXIT_VERIFY);
    }

    proptest::proptest! {
        #[test]
        fn formatted_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            proptest::prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}

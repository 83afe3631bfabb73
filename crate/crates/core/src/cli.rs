//! Command-line front end.
//!
//! Every subcommand prints one JSON document on stdout. Errors from the
//! numerics exit with status 1 and `{"error": kind, "message": ...}`;
//! malformed flags or input files exit with status 2.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::param::Param;
use crate::recoupling::{Color, Recoupler, TetLabels};
use crate::scalar::ScaledScalar;
use crate::spine::ColoredSpine;
use crate::surface::{
    divergence_probe, ym, ym_witten_with, SeriesOptions, SeriesResult, TermRecord,
};
use crate::torus::{mu, torus_mul, torus_ym, TorusElement, TorusExpr};
use crate::verify::{run_suite, SUITES};

#[derive(Debug, Parser)]
#[command(name = "skein-ym", version, about = "Recoupling numerics and the skein-theoretic Yang-Mills trace")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Selects `t`: a real or complex value, a root of unity `e^{iπ/2r}`, or `±1`.
#[derive(Debug, Args, Clone)]
pub struct ParamArgs {
    /// Real part of t.
    #[arg(long = "t", allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Imaginary part of t.
    #[arg(long = "t-im", allow_hyphen_values = true, requires = "t")]
    pub t_im: Option<f64>,
    /// Use t = e^{iπ/2r}.
    #[arg(long, conflicts_with_all = ["t", "t_im"])]
    pub root: Option<u32>,
    /// Use t = ±1 (see --sign); `--classical false` defers to --t.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", conflicts_with = "root")]
    pub classical: Option<bool>,
    /// Sign of the classical point.
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub sign: i8,
}

/// Which spine to color.
#[derive(Debug, Args, Clone)]
pub struct SpineArgs {
    #[arg(long)]
    pub genus: Option<u32>,
    /// Spine JSON file `{"genus", "edges", "vertices"}`.
    #[arg(long, conflicts_with = "colors")]
    pub spine: Option<PathBuf>,
    /// Edge colors for the canonical spine of --genus; a single value colors every edge.
    #[arg(long, value_delimiter = ',')]
    pub colors: Option<Vec<Color>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Summary JSON document.
    Json,
    /// One CSV row per series term.
    Csv,
}

#[derive(Debug, Args, Clone)]
pub struct SeriesArgs {
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = SeriesOptions::default().max_terms)]
    pub max_terms: u64,
    /// Also write every term to this CSV file.
    #[arg(long)]
    pub dump_terms: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TorusOp {
    Trace,
    Mu,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Ort,
    Est1,
    Est2,
    Kirby,
    Handleslide,
    SpineIndependence,
    Chebyshev,
    All,
}

impl Suite {
    fn names(self) -> Vec<&'static str> {
        match self {
            Suite::Ort => vec!["ort"],
            Suite::Est1 => vec!["est1"],
            Suite::Est2 => vec!["est2"],
            Suite::Kirby => vec!["kirby"],
            Suite::Handleslide => vec!["handleslide"],
            Suite::SpineIndependence => vec!["spine-independence"],
            Suite::Chebyshev => vec!["chebyshev"],
            Suite::All => SUITES.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum integer [n].
    Qint {
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long)]
        n: u64,
    },
    /// Quantum factorial [n]!.
    Qfact {
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long)]
        n: u64,
    },
    /// Theta network θ(a, b, c).
    Theta {
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long)]
        a: Color,
        #[arg(long)]
        b: Color,
        #[arg(long)]
        c: Color,
    },
    /// Tetrahedral network Tet(a b e; c d f).
    Tet {
        #[command(flatten)]
        param: ParamArgs,
        /// a,b,e,c,d,f
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<Color>,
    },
    /// 6j symbol {a b e; c d f}.
    Sixj {
        #[command(flatten)]
        param: ParamArgs,
        /// a,b,e,c,d,f
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<Color>,
    },
    /// Yang-Mills trace of a colored spine on the closed surface.
    Ym {
        #[command(flatten)]
        spine: SpineArgs,
        #[command(flatten)]
        param: ParamArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Operations in the torus skein algebra.
    Torus {
        #[arg(long)]
        expr: PathBuf,
        /// Second factor; trace and mu then apply to the product.
        #[arg(long)]
        expr2: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TorusOp::Trace)]
        op: TorusOp,
        #[command(flatten)]
        param: ParamArgs,
    },
    /// Symplectic volume: the empty skein at t = -1.
    Volume {
        #[arg(long)]
        genus: u32,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Witten's area-damped series at t = -1.
    Witten {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[command(flatten)]
        spine: SpineArgs,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Self-check suites; exits 0 iff the suite passes.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Lists the non-decaying terms of the series at |t| = 1 away from roots of unity.
    ProbeDivergence {
        /// t = e^{i·phase}.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["t", "t_im", "root", "classical"])]
        phase: Option<f64>,
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
    },
}

/// Failures surfaced by the front end.
#[derive(Debug)]
enum Failure {
    /// Numerical or domain errors: exit 1.
    Numeric(Error),
    /// Unreadable or malformed input: exit 2.
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Spine(_) => Failure::Input(e.to_string()),
            other => Failure::Numeric(other),
        }
    }
}

type Outcome = std::result::Result<(Value, i32), Failure>;

/// Encodes a scalar: a plain number when real and in double range,
/// `{re, im}` when complex, `{re, im, log2_scale}` otherwise.
pub fn scalar_json(x: ScaledScalar) -> Value {
    if !x.fits_f64() {
        let sig = x.significand();
        return json!({"re": sig.re, "im": sig.im, "log2_scale": x.exponent()});
    }
    let z = x.to_complex();
    if z.im == 0.0 {
        real_json(z.re)
    } else {
        json!({"re": z.re, "im": z.im})
    }
}

/// Integers below `2^53` print without a fractional part.
fn real_json(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9_007_199_254_740_992.0 && !(v == 0.0 && v.is_sign_negative()) {
        json!(v as i64)
    } else {
        json!(v)
    }
}

/// Inverse of [`scalar_json`].
pub fn parse_scalar_json(v: &Value) -> Option<ScaledScalar> {
    if let Some(x) = v.as_f64() {
        return Some(ScaledScalar::from_f64(x));
    }
    let re = v.get("re")?.as_f64()?;
    let im = v.get("im")?.as_f64()?;
    match v.get("log2_scale") {
        Some(s) => Some(ScaledScalar::from_parts(Complex64::new(re, im), s.as_i64()?)),
        None => Some(ScaledScalar::from_complex(Complex64::new(re, im))),
    }
}

fn complex_json(z: Complex64) -> Value {
    scalar_json(ScaledScalar::from_complex(z))
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn series_json(r: &SeriesResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("value".into(), scalar_json(r.value));
    m.insert("terms_used".into(), json!(r.terms_used));
    m.insert("tail_bound".into(), finite_or_null(r.tail_bound));
    m.insert("converged".into(), json!(r.converged));
    m.insert("regime".into(), json!(r.regime.tag()));
    m.insert("certified".into(), json!(r.certified));
    m
}

fn resolve_param(args: &ParamArgs) -> std::result::Result<Param, Failure> {
    if let Some(r) = args.root {
        return Ok(Param::root_of_unity(r)?);
    }
    if args.classical == Some(true) {
        if args.t.is_some() {
            return Err(Failure::Input("--classical conflicts with --t".into()));
        }
        if args.sign != 1 && args.sign != -1 {
            return Err(Failure::Input(format!("--sign must be 1 or -1, got {}", args.sign)));
        }
        return Ok(Param::classical(args.sign));
    }
    match args.t {
        Some(re) => Ok(Param::new(Complex64::new(re, args.t_im.unwrap_or(0.0)))?),
        None => Err(Failure::Input("choose t with --t, --root or --classical".into())),
    }
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn resolve_spine(args: &SpineArgs, default_genus: Option<u32>) -> std::result::Result<ColoredSpine, Failure> {
    if let Some(path) = &args.spine {
        let spine = ColoredSpine::from_json(&read_file(path)?)?;
        if let Some(g) = args.genus {
            if g != spine.genus() {
                return Err(Failure::Input(format!(
                    "--genus {g} disagrees with the spine file's genus {}",
                    spine.genus()
                )));
            }
        }
        return Ok(spine);
    }
    let genus = args
        .genus
        .or(default_genus)
        .ok_or_else(|| Failure::Input("give --genus or --spine".into()))?;
    let base = ColoredSpine::canonical(genus)?;
    match &args.colors {
        None => Ok(base),
        Some(c) if c.len() == 1 => Ok(base.with_uniform_color(c[0])?),
        Some(c) => Ok(base.with_colors(c.clone())?),
    }
}

/// Streams terms to an optional CSV file and optionally to an in-memory table.
struct TermSink {
    file: Option<io::BufWriter<fs::File>>,
    table: Option<Vec<String>>,
    error: Option<io::Error>,
}

const CSV_HEADER: &str = "index,term_re,term_im,term_log2_abs,partial_sum_re,partial_sum_im,tail_bound";

fn csv_row(r: &TermRecord) -> String {
    let t = r.term.to_complex();
    let s = r.partial_sum.to_complex();
    format!(
        "{},{},{},{},{},{},{}",
        r.index,
        t.re,
        t.im,
        r.term.abs_log2(),
        s.re,
        s.im,
        r.tail_bound
    )
}

impl TermSink {
    fn new(args: &SeriesArgs) -> std::result::Result<Self, Failure> {
        let file = match &args.dump_terms {
            Some(path) => {
                let f = fs::File::create(path).map_err(|e| {
                    Failure::Input(format!("cannot create {}: {e}", path.display()))
                })?;
                let mut w = io::BufWriter::new(f);
                writeln!(w, "{CSV_HEADER}").map_err(|e| Failure::Input(e.to_string()))?;
                Some(w)
            }
            None => None,
        };
        let table = (args.format == OutputFormat::Csv).then(Vec::new);
        Ok(TermSink { file, table, error: None })
    }

    fn push(&mut self, r: &TermRecord) {
        if self.file.is_none() && self.table.is_none() {
            return;
        }
        let row = csv_row(r);
        if let Some(w) = &mut self.file {
            if let Err(e) = writeln!(w, "{row}") {
                self.error.get_or_insert(e);
            }
        }
        if let Some(t) = &mut self.table {
            t.push(row);
        }
    }

    fn finish(mut self) -> std::result::Result<Option<Vec<String>>, Failure> {
        if let Some(w) = &mut self.file {
            if let Err(e) = w.flush() {
                self.error.get_or_insert(e);
            }
        }
        match self.error {
            Some(e) => Err(Failure::Input(format!("cannot write term dump: {e}"))),
            None => Ok(self.table),
        }
    }
}

fn series_output(
    result: SeriesResult,
    table: Option<Vec<String>>,
    extra: &[(&str, Value)],
) -> (Value, i32) {
    if let Some(rows) = table {
        let mut text = String::from(CSV_HEADER);
        for row in rows {
            text.push('\n');
            text.push_str(&row);
        }
        return (Value::String(text), 0);
    }
    let mut m = series_json(&result);
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    (Value::Object(m), 0)
}

fn labels(v: &[Color]) -> std::result::Result<TetLabels, Failure> {
    TetLabels::from_slice(v).map_err(|e| Failure::Input(e.to_string()))
}

fn load_torus(path: &Path) -> std::result::Result<TorusElement, Failure> {
    let text = read_file(path)?;
    TorusExpr::parse(&text)
        .map(|e| e.to_element())
        .map_err(|e| Failure::Input(e.to_string()))
}

fn mu_json(x: &TorusElement) -> Value {
    let m = mu(x);
    let mut classes = Map::new();
    for (c, v) in m.homology {
        classes.insert(format!("{}{}", c.0, c.1), complex_json(v));
    }
    json!({"empty": complex_json(m.empty), "homology": classes})
}

fn execute(cmd: Command) -> Outcome {
    match cmd {
        Command::Qint { param, n } => {
            let p = resolve_param(&param)?;
            Ok((json!({"value": scalar_json(p.quantum_int(n))}), 0))
        }
        Command::Qfact { param, n } => {
            let rc = Recoupler::new(resolve_param(&param)?);
            Ok((json!({"value": scalar_json(rc.quantum_factorial(n)?)}), 0))
        }
        Command::Theta { param, a, b, c } => {
            let rc = Recoupler::new(resolve_param(&param)?);
            Ok((json!({"value": scalar_json(rc.theta(a, b, c)?)}), 0))
        }
        Command::Tet { param, labels: l } => {
            let rc = Recoupler::new(resolve_param(&param)?);
            Ok((json!({"value": scalar_json(rc.tet(labels(&l)?)?)}), 0))
        }
        Command::Sixj { param, labels: l } => {
            let rc = Recoupler::new(resolve_param(&param)?);
            Ok((json!({"value": scalar_json(rc.sixj(labels(&l)?)?)}), 0))
        }
        Command::Ym { spine, param, series } => {
            let p = resolve_param(&param)?;
            let spine = resolve_spine(&spine, None)?;
            let opts = SeriesOptions {
                tol: series.tol.unwrap_or(SeriesOptions::default().tol),
                max_terms: series.max_terms,
            };
            let mut sink = TermSink::new(&series)?;
            let result = ym(&p, &spine, opts, &mut |r| sink.push(r))?;
            let table = sink.finish()?;
            Ok(series_output(result, table, &[("genus", json!(spine.genus()))]))
        }
        Command::Volume { genus, series } => {
            let tol = series.tol.unwrap_or(if genus == 2 { 1e-6 } else { 1e-10 });
            let spine = ColoredSpine::canonical(genus)?;
            let opts = SeriesOptions { tol, max_terms: series.max_terms };
            let mut sink = TermSink::new(&series)?;
            let result = ym(&Param::classical(-1), &spine, opts, &mut |r| sink.push(r))?;
            let table = sink.finish()?;
            Ok(series_output(result, table, &[("genus", json!(genus))]))
        }
        Command::Witten { rho, spine, series } => {
            let spine = resolve_spine(&spine, Some(2))?;
            let opts = SeriesOptions {
                tol: series.tol.unwrap_or(SeriesOptions::default().tol),
                max_terms: series.max_terms,
            };
            let mut sink = TermSink::new(&series)?;
            let result = ym_witten_with(&spine, rho, opts, &mut |r| sink.push(r))?;
            let table = sink.finish()?;
            Ok(series_output(result, table, &[("genus", json!(spine.genus())), ("rho", json!(rho))]))
        }
        Command::Torus { expr, expr2, op, param } => {
            let x = load_torus(&expr)?;
            let second = expr2.as_deref().map(load_torus).transpose()?;
            let needs_t = second.is_some() || op == TorusOp::Product;
            let x = if needs_t {
                let t = resolve_param(&param)?.value();
                let y = second.ok_or_else(|| Failure::Input("--op product needs --expr2".into()))?;
                torus_mul(t, &x, &y)
            } else {
                x
            };
            let out = match op {
                TorusOp::Trace => json!({"value": complex_json(torus_ym(&x))}),
                TorusOp::Mu => mu_json(&x),
                TorusOp::Product => {
                    serde_json::to_value(TorusExpr::from_element(&x)).expect("expression serializes")
                }
            };
            Ok((out, 0))
        }
        Command::Verify { suite } => {
            let mut reports = Vec::new();
            let mut passed = true;
            for name in suite.names() {
                let rep = run_suite(name)?;
                passed &= rep.passed;
                reports.push(serde_json::to_value(&rep).expect("report serializes"));
            }
            let out = json!({"passed": passed, "suites": reports});
            Ok((out, if passed { 0 } else { 1 }))
        }
        Command::ProbeDivergence { phase, param, genus, n } => {
            let p = match phase {
                Some(phi) => Param::new(Complex64::from_polar(1.0, phi))?,
                None => resolve_param(&param)?,
            };
            let rep = divergence_probe(&p, genus, n)?;
            let indices: Vec<u64> = rep.hits.iter().map(|h| h.0).collect();
            let mags: Vec<f64> = rep.hits.iter().map(|h| h.1).collect();
            Ok((
                json!({
                    "regime": p.regime().tag(),
                    "scanned": rep.scanned,
                    "hits": indices.len(),
                    "indices": indices,
                    "magnitudes": mags,
                }),
                0,
            ))
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output to `out`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let (value, code) = match execute(cli.command) {
        Ok(v) => v,
        Err(Failure::Numeric(e)) => (json!({"error": e.kind(), "message": e.to_string()}), 1),
        Err(Failure::Input(msg)) => (json!({"error": "InputError", "message": msg}), 2),
    };
    let written = match &value {
        Value::String(csv) => writeln!(out, "{csv}"),
        v => writeln!(out, "{v}"),
    };
    if written.is_err() {
        return 1;
    }
    code
}

pub fn main_with_args<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(args, &mut stdout.lock(), &mut stderr.lock());
    let _ = io::stdout().flush();
    code
}

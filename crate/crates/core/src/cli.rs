//! The `taildep` command-line front end.
//!
//! Subcommands `sample`, `analytic`, `estimate`, `plateau` and `bootstrap`.
//! Outputs are plot-ready data: CSV (17 significant digits, LF endings) or
//! versioned JSON. Each JSON document carries the resolved configuration;
//! each CSV gets a `<file>.json` sidecar with it, so that the CSV header stays
//! exactly the documented one.
//!
//! Exit codes: 0 success, 1 internal or numerical failure, 2 usage or I/O.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::copulas::{Copula, Rotation};
use crate::error::Error;
use crate::estimation::{
    self, BootstrapConfig, EmpiricalTdf, EstimatorGrids, PseudoSample, RankScale,
};
use crate::measures::{self, MeasureSpec, DEFAULT_L, DEFAULT_T_MIN_ANALYTIC};
use crate::tdf::{PickandsFunction, TailFunction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "taildep", version, about = "Tail dependence measures: closed forms, estimation and bootstrap")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a seeded sample from a copula family, written as `u,v` CSV.
    Sample(SampleArgs),
    /// Closed-route measure values of a family's lower tail dependence function.
    Analytic(AnalyticArgs),
    /// Plateau choice of k, plug-in estimates, bootstrap intervals and plot data.
    Estimate(EstimateArgs),
    /// Plateau search only; writes the `k,tdc_hat` curve.
    Plateau(PlateauArgs),
    /// Bootstrap intervals at a fixed k.
    Bootstrap(BootstrapArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ScaleArg {
    /// rank/n
    #[value(name = "n")]
    #[serde(rename = "n")]
    N,
    /// rank/(n+1)
    #[value(name = "n+1")]
    #[serde(rename = "n+1")]
    NPlusOne,
}

impl From<ScaleArg> for RankScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::N => RankScale::N,
            ScaleArg::NPlusOne => RankScale::NPlusOne,
        }
    }
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Family expression, e.g. `smo:0.353,0.75` or `mix(0.5*clayton:2 + 0.5*pi)`.
    #[arg(short, long)]
    pub family: String,
    /// Apply a rotation (s1, s2, tau, s1s2, survival) on top of the family.
    #[arg(long)]
    pub rotate: Option<String>,
    #[arg(short, long)]
    pub n: usize,
    #[arg(short, long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(short, long)]
    pub family: String,
    #[arg(long)]
    pub rotate: Option<String>,
    /// Measure list, comma or semicolon separated; defaults to the six table measures.
    #[arg(short, long)]
    pub measures: Option<String>,
    /// Floor of the λ̄ t-grid.
    #[arg(long, default_value_t = DEFAULT_T_MIN_ANALYTIC)]
    pub t_min: f64,
    /// b-grid half-size: {i/L} ∪ {L/i} plus the kink rays.
    #[arg(short = 'L', long = "grid-l", default_value_t = DEFAULT_L)]
    pub l: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct InputArgs {
    /// Input CSV with a header row: raw `x,y`, or `u,v` with `--pseudo`.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Treat the input as uniform values of known margins; skip ranking.
    #[arg(long)]
    pub pseudo: bool,
    /// Denominator of the pseudo-observations.
    #[arg(long, value_enum, default_value_t = ScaleArg::N)]
    pub rank_scale: ScaleArg,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    /// Trapezoid and b-grid resolution L.
    #[arg(short = 'L', long = "grid-l", default_value_t = DEFAULT_L)]
    pub l: usize,
    /// Floor of the λ̄ t-grid [default: 10/L].
    #[arg(long)]
    pub t_floor: Option<f64>,
}

impl GridArgs {
    fn grids(&self) -> Result<EstimatorGrids, CliError> {
        if self.l < 2 {
            return Err(CliError::usage(format!("L must be at least 2, got {}", self.l)));
        }
        let t_floor = self.t_floor.unwrap_or(10.0 / self.l as f64);
        if !(t_floor > 0.0 && t_floor <= 1.0) {
            return Err(CliError::usage(format!("t-floor must lie in (0,1], got {t_floor}")));
        }
        Ok(EstimatorGrids { l: self.l, t_floor })
    }
}

#[derive(Debug, Args, Clone)]
pub struct BootArgs {
    /// Bootstrap replicates B.
    #[arg(short = 'B', long = "replicates", default_value_t = 100)]
    pub b: usize,
    /// Confidence level of the percentile intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Seed of the resampling streams.
    #[arg(short, long, default_value_t = 1)]
    pub seed: u64,
    /// Re-run the plateau search in every replicate instead of keeping k.
    #[arg(long)]
    pub rechoose_k: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Fixed k; when absent k comes from the plateau search.
    #[arg(short, long)]
    pub k: Option<usize>,
    /// Lower plateau search bound [default: max(20, ceil(0.001 n))].
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Upper plateau search bound [default: floor(0.1 n)].
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Measure list, comma or semicolon separated; defaults to the six table measures.
    #[arg(short, long)]
    pub measures: Option<String>,
    #[command(flatten)]
    pub grids: GridArgs,
    #[command(flatten)]
    pub boot: BootArgs,
    /// JSON report; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Directory for plateau.csv, tdf_slices.csv and normalized.csv.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlateauArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Lower plateau search bound [default: max(20, ceil(0.001 n))].
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Upper plateau search bound [default: floor(0.1 n)].
    #[arg(long)]
    pub k_max: Option<usize>,
    /// `k,tdc_hat` curve CSV.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Threshold k of the empirical TDF.
    #[arg(short, long)]
    pub k: usize,
    /// Measure list, comma or semicolon separated; defaults to the six table measures.
    #[arg(short, long)]
    pub measures: Option<String>,
    #[command(flatten)]
    pub grids: GridArgs,
    #[command(flatten)]
    pub boot: BootArgs,
    /// Lower plateau search bound [default: max(20, ceil(0.001 n))].
    #[arg(long)]
    pub k_min: Option<usize>,
    /// Upper plateau search bound [default: floor(0.1 n)].
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::usage(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Quadrature { .. } => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

/// Resolved configuration echoed into every artifact.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copula: Option<Copula>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<String>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rechoose_k: Option<bool>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pseudo: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_scale: Option<ScaleArg>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("taildep: {}", e.message.replace('\n', " "));
            e.code
        }
    }
}

pub fn execute(cmd: &Command) -> Result<(), CliError> {
    match cmd {
        Command::Sample(a) => cmd_sample(a),
        Command::Analytic(a) => cmd_analytic(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Plateau(a) => cmd_plateau(a),
        Command::Bootstrap(a) => cmd_bootstrap(a),
    }
}

// ---------------------------------------------------------------------------
// Family grammar
// ---------------------------------------------------------------------------

/// Parses a family expression.
///
/// ```text
/// expr    := wrapper "(" expr ")" | "mix(" term ("+" term)* ")" | atom
/// wrapper := survival | s1 | s2 | tau | s1s2
/// term    := weight "*" expr
/// atom    := pi | m | w | frechet:a,b | mo:a,b | smo:a,b | clayton:t
///          | gumbel:t | sgumbel:t | singular:t | t:nu,rho
///          | asym-gumbel:a,b,t | asym-galambos:a,b,t | pickands:PATH
///          | singular-mix:w1,w2,t1,t2
/// ```
///
/// `smo` and `sgumbel` are the survival copulas, whose lower tails carry the
/// Marshall–Olkin and Gumbel dependence. The asymmetric extreme-value
/// families and `pickands:` are survival EV copulas; they have closed-form
/// tails but no sampler. `singular-mix` is w1·C_{t1} + w2·τ(C_{t2}) for the
/// singular copula C_t.
pub fn parse_family(s: &str) -> crate::Result<Copula> {
    let s = s.trim();
    let bad = |msg: &str| Error::InvalidParameter(format!("family `{s}`: {msg}"));
    if s.starts_with("pickands:") {
        return parse_atom(s);
    }
    if let Some(open) = s.find('(') {
        if !s.ends_with(')') {
            return Err(bad("unbalanced parentheses"));
        }
        let head = s[..open].trim();
        let inner = &s[open + 1..s.len() - 1];
        if head == "mix" {
            let mut weights = Vec::new();
            let mut comps = Vec::new();
            for term in split_top(inner, '+').map_err(|m| bad(&m))? {
                let star = find_top(term, '*').ok_or_else(|| bad("mixture terms are weight*family"))?;
                let w: f64 = term[..star].trim().parse().map_err(|_| bad("bad mixture weight"))?;
                weights.push(w);
                comps.push(parse_family(&term[star + 1..])?);
            }
            return Copula::mixture(weights, comps);
        }
        let rot: Rotation = head.parse().map_err(|_| bad("unknown wrapper (survival, s1, s2, tau, s1s2, mix)"))?;
        return Ok(parse_family(inner)?.rotate(rot));
    }
    parse_atom(s)
}

fn parse_atom(s: &str) -> crate::Result<Copula> {
    let (name, args) = match s.split_once(':') {
        Some((n, a)) => (n.trim(), a.trim()),
        None => (s, ""),
    };
    let unknown = || Error::UnsupportedFamily(format!("unknown family `{s}`"));
    if name == "pickands" {
        let f = std::fs::File::open(args).map_err(|e| Error::InvalidParameter(format!("{args}: {e}")))?;
        let a = PickandsFunction::from_csv(f)?;
        return Ok(Copula::extreme_value(a).rotate(Rotation::S1S2));
    }
    let nums: Vec<f64> = if args.is_empty() {
        Vec::new()
    } else {
        args.split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidParameter(format!("family `{s}`: parameters must be numbers")))?
    };
    let want = |n: usize| -> crate::Result<()> {
        if nums.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("family `{name}` takes {n} parameter(s), got {}", nums.len())))
        }
    };
    let c = match name {
        "pi" | "indep" | "independence" => {
            want(0)?;
            Copula::Independence
        }
        "m" | "comonotone" => {
            want(0)?;
            Copula::Comonotone
        }
        "w" | "countermonotone" => {
            want(0)?;
            Copula::Countermonotone
        }
        "frechet" => {
            want(2)?;
            Copula::frechet(nums[0], nums[1])?
        }
        "mo" | "smo" => {
            want(2)?;
            let c = Copula::marshall_olkin(nums[0], nums[1])?;
            if name == "smo" {
                c.rotate(Rotation::S1S2)
            } else {
                c
            }
        }
        "clayton" => {
            want(1)?;
            Copula::clayton(nums[0])?
        }
        "gumbel" | "sgumbel" => {
            want(1)?;
            let c = Copula::gumbel(nums[0])?;
            if name == "sgumbel" {
                c.rotate(Rotation::S1S2)
            } else {
                c
            }
        }
        "singular" => {
            want(1)?;
            Copula::singular_nelsen(nums[0])?
        }
        "t" => {
            want(2)?;
            Copula::student_t(nums[0], nums[1])?
        }
        "asym-gumbel" => {
            want(3)?;
            Copula::extreme_value(PickandsFunction::asym_gumbel(nums[0], nums[1], nums[2])?).rotate(Rotation::S1S2)
        }
        "asym-galambos" => {
            want(3)?;
            Copula::extreme_value(PickandsFunction::asym_galambos(nums[0], nums[1], nums[2])?).rotate(Rotation::S1S2)
        }
        "singular-mix" => {
            want(4)?;
            Copula::mixture(
                vec![nums[0], nums[1]],
                vec![
                    Copula::singular_nelsen(nums[2])?,
                    Copula::singular_nelsen(nums[3])?.rotate(Rotation::Tau),
                ],
            )?
        }
        _ => return Err(unknown()),
    };
    Ok(c)
}

/// Splits at `sep` outside parentheses.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>, String> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced parentheses".into());
                }
            }
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    out.push(&s[start..]);
    Ok(out)
}

fn find_top(s: &str, needle: char) -> Option<usize> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == needle && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Measure list separated by `;` or `,`. A numeric token after a comma
/// continues the previous measure's arguments, so `tdc,gtdc:0.5,1,gini`
/// reads as three measures.
pub fn parse_measures(s: &str) -> crate::Result<Vec<MeasureSpec>> {
    let mut names: Vec<String> = Vec::new();
    for group in s.split(';') {
        let mut fresh = true;
        for tok in group.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            match names.last_mut() {
                Some(last) if !fresh && tok.parse::<f64>().is_ok() => {
                    last.push(',');
                    last.push_str(tok);
                }
                _ => names.push(tok.to_string()),
            }
            fresh = false;
        }
    }
    if names.is_empty() {
        return Err(Error::UnknownMeasure("empty measure list".into()));
    }
    names.iter().map(|n| n.parse()).collect()
}

fn measures_or_table(s: &Option<String>) -> Result<Vec<MeasureSpec>, CliError> {
    Ok(match s {
        Some(s) => parse_measures(s)?,
        None => MeasureSpec::TABLE.to_vec(),
    })
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

/// `x` with 17 significant digits, trailing zeros dropped (C's `%.17g`).
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&e) {
        let s = format!("{:.*}", (16 - e).max(0) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let m = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        let sign = if e < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", e.abs())
    }
}

fn csv_text(header: &str, rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|&x| fmt17(x)).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    s
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::usage(format!("stdout: {e}")))
        }
    }
}

fn sidecar_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

/// Writes a CSV and, for file outputs, its config sidecar.
fn write_csv(path: Option<&Path>, text: &str, config: &RunConfig) -> Result<(), CliError> {
    write_out(path, text)?;
    if let Some(p) = path {
        let side = json!({ "schema": SCHEMA_VERSION, "config": config, "file": p.file_name().map(|f| f.to_string_lossy().into_owned()) });
        write_out(Some(&sidecar_path(p)), &json_text(&side))?;
    }
    Ok(())
}

fn path_string(p: &Option<PathBuf>) -> Option<String> {
    p.as_ref().map(|p| p.display().to_string())
}

fn b_grid_spec(l: usize) -> String {
    format!("{{i/{l}}} u {{{l}/i}}, i = 1..{l}, plus kink rays")
}

// ---------------------------------------------------------------------------
// Input
// ---------------------------------------------------------------------------

/// Reads the first two columns of a headed CSV.
pub fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::io(path, e))?;
        let field = |j: usize| -> Result<f64, CliError> {
            rec.get(j)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::io(path, format!("row {}: expected two finite numbers", i + 2)))
        };
        out.push((field(0)?, field(1)?));
    }
    Ok(out)
}

fn load_sample(a: &InputArgs) -> Result<PseudoSample, CliError> {
    let pairs = read_pairs(&a.input)?;
    let s = if a.pseudo {
        PseudoSample::from_uniform(&pairs)?
    } else {
        estimation::pseudo_observations_scaled(&pairs, a.rank_scale.into())?
    };
    Ok(s)
}

fn input_config(cfg: &mut RunConfig, a: &InputArgs, n: usize) {
    cfg.input = Some(a.input.display().to_string());
    cfg.pseudo = Some(a.pseudo);
    cfg.rank_scale = if a.pseudo { None } else { Some(a.rank_scale) };
    cfg.n = Some(n);
}

fn plateau_bounds(n: usize, k_min: Option<usize>, k_max: Option<usize>) -> (usize, usize) {
    let (lo, hi) = estimation::default_plateau_bounds(n);
    (k_min.unwrap_or(lo), k_max.unwrap_or(hi))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn family_with_rotation(family: &str, rotate: &Option<String>) -> Result<Copula, CliError> {
    let c = parse_family(family)?;
    Ok(match rotate {
        Some(r) => c.rotate(r.parse()?),
        None => c,
    })
}

pub fn cmd_sample(a: &SampleArgs) -> Result<(), CliError> {
    let c = family_with_rotation(&a.family, &a.rotate)?;
    let pts = c.sample(a.n, a.seed)?;
    let cfg = RunConfig {
        command: "sample".into(),
        family: Some(a.family.clone()),
        rotate: a.rotate.clone(),
        copula: Some(c),
        n: Some(a.n),
        seed: Some(a.seed),
        output: path_string(&a.out),
        format: Some(Format::Csv),
        ..Default::default()
    };
    let text = csv_text("u,v", pts.into_iter().map(|(u, v)| vec![u, v]));
    write_csv(a.out.as_deref(), &text, &cfg)
}

pub fn cmd_analytic(a: &AnalyticArgs) -> Result<(), CliError> {
    let c = family_with_rotation(&a.family, &a.rotate)?;
    let specs = measures_or_table(&a.measures)?;
    if !(a.t_min > 0.0 && a.t_min < 1.0) {
        return Err(CliError::usage(format!("t-min must lie in (0,1), got {}", a.t_min)));
    }
    if a.l < 2 {
        return Err(CliError::usage(format!("L must be at least 2, got {}", a.l)));
    }
    let tdf = c.lower_tdf();
    let values: Vec<(String, f64)> = specs
        .iter()
        .map(|&s| Ok((s.name(), measures::evaluate(&tdf, s, a.t_min, a.l)?)))
        .collect::<crate::Result<_>>()?;
    let cfg = RunConfig {
        command: "analytic".into(),
        family: Some(a.family.clone()),
        rotate: a.rotate.clone(),
        copula: Some(c),
        measures: specs.iter().map(|s| s.name()).collect(),
        l: Some(a.l),
        t_min: Some(a.t_min),
        b_grid: Some(b_grid_spec(a.l)),
        output: path_string(&a.out),
        format: Some(a.format),
        ..Default::default()
    };
    match a.format {
        Format::Json => {
            let results: Vec<_> = values.iter().map(|(m, v)| json!({ "measure": m, "value": v })).collect();
            let doc = json!({ "schema": SCHEMA_VERSION, "config": cfg, "tdf": tdf, "results": results });
            write_out(a.out.as_deref(), &json_text(&doc))
        }
        Format::Csv => {
            let mut text = String::from("measure,value\n");
            for (m, v) in &values {
                let quoted = if m.contains(',') { format!("\"{m}\"") } else { m.clone() };
                let _ = writeln!(text, "{quoted},{}", fmt17(*v));
            }
            write_csv(a.out.as_deref(), &text, &cfg)
        }
    }
}

fn plateau_csv(p: &estimation::Plateau) -> String {
    csv_text("k,tdc_hat", p.curve.iter().map(|&(k, v)| vec![k as f64, v]))
}

fn plateau_summary(p: &estimation::Plateau) -> serde_json::Value {
    json!({ "k_star": p.k_star, "fallback": p.fallback, "window": p.window, "sigma": p.sigma })
}

pub fn cmd_plateau(a: &PlateauArgs) -> Result<(), CliError> {
    let sample = load_sample(&a.input)?;
    let n = sample.n();
    let (lo, hi) = plateau_bounds(n, a.k_min, a.k_max);
    let p = estimation::plateau_find_k(&sample, lo, hi)?;
    let mut cfg = RunConfig { command: "plateau".into(), k_min: Some(lo), k_max: Some(hi), output: path_string(&a.out), ..Default::default() };
    input_config(&mut cfg, &a.input, n);
    match &a.out {
        Some(path) => {
            write_csv(Some(path), &plateau_csv(&p), &cfg)?;
            let doc = json!({ "schema": SCHEMA_VERSION, "config": cfg, "plateau": plateau_summary(&p) });
            write_out(None, &json_text(&doc))
        }
        None => write_out(None, &plateau_csv(&p)),
    }
}

fn boot_config(b: &BootArgs, bounds: (usize, usize)) -> Result<BootstrapConfig, CliError> {
    if b.b < 2 {
        return Err(CliError::usage(format!("bootstrap needs B >= 2, got {}", b.b)));
    }
    Ok(BootstrapConfig { replicates: b.b, level: b.level, seed: b.seed, rechoose_k: b.rechoose_k.then_some(bounds) })
}

fn fill_boot(cfg: &mut RunConfig, b: &BootArgs, grids: &EstimatorGrids, specs: &[MeasureSpec]) {
    cfg.b = Some(b.b);
    cfg.level = Some(b.level);
    cfg.seed = Some(b.seed);
    cfg.rechoose_k = Some(b.rechoose_k);
    cfg.l = Some(grids.l);
    cfg.t_min = Some(grids.t_floor);
    cfg.b_grid = Some(b_grid_spec(grids.l));
    cfg.measures = specs.iter().map(|s| s.name()).collect();
}

pub fn cmd_bootstrap(a: &BootstrapArgs) -> Result<(), CliError> {
    let sample = load_sample(&a.input)?;
    let n = sample.n();
    let specs = measures_or_table(&a.measures)?;
    let grids = a.grids.grids()?;
    let bounds = plateau_bounds(n, a.k_min, a.k_max);
    let bc = boot_config(&a.boot, bounds)?;
    let reports = estimation::bootstrap(&sample, a.k, &specs, &bc, &grids)?;
    let mut cfg = RunConfig { command: "bootstrap".into(), k: Some(a.k), output: path_string(&a.out), format: Some(Format::Json), ..Default::default() };
    if a.boot.rechoose_k {
        cfg.k_min = Some(bounds.0);
        cfg.k_max = Some(bounds.1);
    }
    input_config(&mut cfg, &a.input, n);
    fill_boot(&mut cfg, &a.boot, &grids, &specs);
    let doc = json!({ "schema": SCHEMA_VERSION, "config": cfg, "reports": reports });
    write_out(a.out.as_deref(), &json_text(&doc))
}

pub fn cmd_estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let sample = load_sample(&a.input)?;
    let n = sample.n();
    let specs = measures_or_table(&a.measures)?;
    let grids = a.grids.grids()?;
    let bounds = plateau_bounds(n, a.k_min, a.k_max);
    let bc = boot_config(&a.boot, bounds)?;

    let plateau = match a.k {
        Some(_) => None,
        None => Some(estimation::plateau_find_k(&sample, bounds.0, bounds.1)?),
    };
    let k = a.k.or(plateau.as_ref().map(|p| p.k_star)).expect("k fixed or chosen");
    let reports = estimation::bootstrap(&sample, k, &specs, &bc, &grids)?;

    let mut cfg = RunConfig { command: "estimate".into(), k: Some(k), output: path_string(&a.out), format: Some(Format::Json), ..Default::default() };
    if plateau.is_some() || a.boot.rechoose_k {
        cfg.k_min = Some(bounds.0);
        cfg.k_max = Some(bounds.1);
    }
    input_config(&mut cfg, &a.input, n);
    fill_boot(&mut cfg, &a.boot, &grids, &specs);

    if let Some(dir) = &a.plot_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let tdf = EmpiricalTdf::new(&sample, k)?;
        // The curve is plotted even when k was fixed on the command line.
        let curve = match &plateau {
            Some(p) => p.clone(),
            None => estimation::plateau_find_k(&sample, bounds.0, bounds.1)?,
        };
        write_csv(Some(&dir.join("plateau.csv")), &plateau_csv(&curve), &cfg)?;
        let bs = measures::default_b_grid(grids.l);
        let slices = csv_text("b,lam_b", bs.iter().map(|&b| vec![b, tdf.eval(b, 1.0 / b)]));
        write_csv(Some(&dir.join("tdf_slices.csv")), &slices, &cfg)?;
        let l = grids.l as f64;
        let norm = csv_text(
            "t,lam1_star,lam2_star",
            (1..=grids.l).map(|i| {
                let t = i as f64 / l;
                vec![t, tdf.lambda1_star(t), tdf.lambda2_star(t)]
            }),
        );
        write_csv(Some(&dir.join("normalized.csv")), &norm, &cfg)?;
    }

    let doc = json!({
        "schema": SCHEMA_VERSION,
        "config": cfg,
        "plateau": plateau.as_ref().map(plateau_summary),
        "reports": reports,
    });
    write_out(a.out.as_deref(), &json_text(&doc))
}

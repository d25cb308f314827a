//! Command grammar, argument parsing and the resolved run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Arg, ArgAction, ArgMatches, Command as ClapCommand};
use ockham::selection::SelectionRule;
use ockham::EstimatorRegistry;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fit,
    Evidence,
    Decompose,
    Select,
    Risk,
    PolyDemo,
    MackayDemo,
    BicSweep,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Fit,
        Command::Evidence,
        Command::Decompose,
        Command::Select,
        Command::Risk,
        Command::PolyDemo,
        Command::MackayDemo,
        Command::BicSweep,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Fit => "fit",
            Command::Evidence => "evidence",
            Command::Decompose => "decompose",
            Command::Select => "select",
            Command::Risk => "risk",
            Command::PolyDemo => "poly-demo",
            Command::MackayDemo => "mackay-demo",
            Command::BicSweep => "bic-sweep",
        }
    }

    fn about(&self) -> &'static str {
        match self {
            Command::Fit => "MAP fit of a polynomial Gaussian linear model",
            Command::Evidence => "log-evidence with its fit and flexibility parts",
            Command::Decompose => "evidence decomposition compared with a complexity penalty",
            Command::Select => "choose a polynomial degree by evidence or posterior probability",
            Command::Risk => "Monte Carlo zero-one risk of the selection rules",
            Command::PolyDemo => "degree selection frequency and out-of-sample regret",
            Command::MackayDemo => "evidence of a simple and a complex scalar model across y",
            Command::BicSweep => "flexibility minus the BIC penalty along growing n",
        }
    }

    fn data(&self) -> DataNeed {
        match self {
            Command::Fit | Command::Evidence | Command::Decompose | Command::Select => DataNeed::Required,
            Command::Risk => DataNeed::Optional,
            Command::PolyDemo | Command::MackayDemo | Command::BicSweep => DataNeed::None,
        }
    }

    fn keys(&self) -> Vec<Key> {
        let sigma = Key::new("sigma", Kind::PositiveReal, "observation noise standard deviation");
        let lambda = Key::new("lambda", Kind::PositiveReal, "prior precision scale");
        let seed = Key::new("seed", Kind::Int, "random seed").default("0");
        let estimator = Key::new("estimator", Kind::Estimator, "evidence estimator").default("glm-exact");
        let grid = Key::new("grid", Kind::Count, "quadrature points per dimension").default("2001");
        let samples = Key::new("samples", Kind::Count, "importance-sampling draws").default("100000");
        let degree = Key::new("degree", Kind::Int, "polynomial degree").default("0");
        let degrees = Key::new("degrees", Kind::Degrees, "candidate degrees, e.g. 0..9 or 0,2,4");
        let weights = Key::new("weights", Kind::Reals, "prior model weights, one per degree").optional();
        let reps = Key::new("reps", Kind::Count, "Monte Carlo replicates");
        let n = Key::new("n", Kind::Count, "sample size");
        match self {
            Command::Fit => vec![sigma, lambda, degree, seed],
            Command::Evidence => vec![sigma, lambda, degree, estimator, grid, samples, seed],
            Command::Decompose => vec![
                sigma,
                lambda,
                degree,
                estimator,
                grid,
                samples,
                seed,
                Key::new("penalty", Kind::Real, "supplied complexity penalty (default: BIC)").optional(),
            ],
            Command::Select => vec![
                sigma,
                lambda,
                degrees,
                weights,
                Key::new("rule", Kind::Rule, "max-evidence or max-posterior").default("max-evidence"),
                estimator,
                grid,
                samples,
                seed,
            ],
            Command::Risk => vec![sigma, lambda, degrees, weights, n, reps, seed],
            Command::PolyDemo => vec![
                Key::new("true-degree", Kind::Int, "degree of the generating polynomial"),
                degrees,
                n,
                sigma,
                lambda,
                reps,
                seed,
            ],
            Command::MackayDemo => vec![
                Key::new("sigma", Kind::PositiveReal, "observation noise standard deviation").default("1"),
                Key::new("lambda-simple", Kind::PositiveReal, "prior precision of the simple model").default("10"),
                Key::new("lambda-complex", Kind::PositiveReal, "prior precision of the complex model")
                    .default("0.1"),
                Key::new("y-min", Kind::Real, "lower end of the y grid").default("-25"),
                Key::new("y-max", Kind::Real, "upper end of the y grid").default("25"),
                Key::new("grid", Kind::Count, "number of y grid points").default("1001"),
                seed,
            ],
            Command::BicSweep => vec![
                Key::new("ns", Kind::Counts, "sample sizes, increasing"),
                Key::new("theta", Kind::Reals, "true coefficients of [1, x, x², …]").default("1,-0.5"),
                Key::new("design", Kind::Design, "polynomial or constant").default("polynomial"),
                Key::new("sigma", Kind::PositiveReal, "observation noise standard deviation").default("1"),
                Key::new("lambda", Kind::PositiveReal, "prior precision scale").default("1"),
                seed,
            ],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DataNeed {
    Required,
    Optional,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Real,
    PositiveReal,
    Int,
    /// Positive integer.
    Count,
    Reals,
    Counts,
    Degrees,
    Estimator,
    Rule,
    Design,
}

#[derive(Debug, Clone)]
struct Key {
    name: &'static str,
    kind: Kind,
    help: &'static str,
    default: Option<&'static str>,
    required: bool,
}

impl Key {
    fn new(name: &'static str, kind: Kind, help: &'static str) -> Self {
        Key {
            name,
            kind,
            help,
            default: None,
            required: true,
        }
    }

    fn default(mut self, value: &'static str) -> Self {
        self.default = Some(value);
        self.required = false;
        self
    }

    fn optional(mut self) -> Self {
        self.required = false;
        self
    }
}

/// A parsed parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(u64),
    Real(f64),
    Text(String),
    Ints(Vec<u64>),
    Reals(Vec<f64>),
}

impl Value {
    /// Argument text that parses back to the same value.
    pub fn render(&self) -> String {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => v.to_string(),
            Value::Text(v) => v.clone(),
            Value::Ints(v) => join(v),
            Value::Reals(v) => join(v),
        }
    }
}

/// Fully resolved invocation: defaults are filled in, so equal configs mean equal runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub data_path: Option<PathBuf>,
    pub params: BTreeMap<String, Value>,
    pub output_path: PathBuf,
    pub format: Format,
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.int("seed").unwrap_or(0)
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.params.get(key)? {
            Value::Real(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> Option<u64> {
        match self.params.get(key)? {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.params.get(key)? {
            Value::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn ints(&self, key: &str) -> Option<&[u64]> {
        match self.params.get(key)? {
            Value::Ints(v) => Some(v),
            _ => None,
        }
    }

    pub fn reals(&self, key: &str) -> Option<&[f64]> {
        match self.params.get(key)? {
            Value::Reals(v) => Some(v),
            _ => None,
        }
    }

    /// Argument vector (without program name) that `parse_args` maps back to `self`.
    pub fn to_argv(&self) -> Vec<String> {
        let mut argv = vec![self.command.as_str().to_string()];
        if let Some(data) = &self.data_path {
            argv.push("--data".into());
            argv.push(data.to_string_lossy().into_owned());
        }
        for (key, value) in &self.params {
            argv.push(format!("--{key}"));
            argv.push(value.render());
        }
        argv.push("--out".into());
        argv.push(self.output_path.to_string_lossy().into_owned());
        argv.push("--format".into());
        argv.push(self.format.as_str().into());
        argv
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

fn parse_uint(s: &str) -> Result<u64, String> {
    s.trim()
        .parse::<u64>()
        .map_err(|_| format!("'{s}' is not a non-negative integer"))
}

fn list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Err("empty list".into());
    }
    s.split(',')
        .enumerate()
        .map(|(k, tok)| item(tok).map_err(|e| format!("entry {}: {e}", k + 1)))
        .collect()
}

/// Comma-separated degrees; `a..b` expands to `a, a+1, …, b`.
fn parse_degrees(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for (k, tok) in s.split(',').enumerate() {
        let entry = |e: String| format!("entry {}: {e}", k + 1);
        if let Some((a, b)) = tok.split_once("..") {
            let (a, b) = (parse_uint(a).map_err(entry)?, parse_uint(b).map_err(entry)?);
            if a > b {
                return Err(entry(format!("empty range '{tok}'")));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_uint(tok).map_err(entry)?);
        }
    }
    let mut sorted = out.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err("degrees must be distinct".into());
    }
    Ok(out)
}

fn value_parser(kind: Kind) -> impl Fn(&str) -> Result<Value, String> + Clone + Send + Sync + 'static {
    move |s: &str| match kind {
        Kind::Real | Kind::PositiveReal => parse_real(s).map(Value::Real),
        Kind::Int | Kind::Count => parse_uint(s).map(Value::Int),
        Kind::Reals => list(s, parse_real).map(Value::Reals),
        Kind::Counts => list(s, parse_uint).map(Value::Ints),
        Kind::Degrees => parse_degrees(s).map(Value::Ints),
        Kind::Estimator => {
            let names = EstimatorRegistry::builtin().names();
            if names.contains(&s) {
                Ok(Value::Text(s.to_string()))
            } else {
                Err(format!("unknown estimator '{s}' (expected one of {})", names.join(", ")))
            }
        }
        Kind::Rule => SelectionRule::from_str(s)
            .map(|r| Value::Text(r.as_str().to_string()))
            .map_err(|e| e.to_string()),
        Kind::Design => match s {
            "polynomial" | "constant" => Ok(Value::Text(s.to_string())),
            _ => Err(format!("unknown design '{s}' (expected polynomial or constant)")),
        },
    }
}

/// The full command grammar; `--help` renders it.
pub fn grammar() -> ClapCommand {
    let mut root = ClapCommand::new("ockham")
        .about("Bayesian evidence, flexibility and model selection for Gaussian linear models")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .disable_help_subcommand(true);
    for cmd in Command::ALL {
        let mut sub = ClapCommand::new(cmd.as_str()).about(cmd.about());
        match cmd.data() {
            DataNeed::None => {}
            need => {
                sub = sub.arg(
                    Arg::new("data")
                        .long("data")
                        .value_name("CSV")
                        .value_parser(clap::value_parser!(PathBuf))
                        .required(need == DataNeed::Required)
                        .help("input CSV with header 'y' or 'x,y'"),
                );
            }
        }
        for key in cmd.keys() {
            let mut arg = Arg::new(key.name)
                .long(key.name)
                .help(key.help)
                .action(ArgAction::Set)
                .allow_hyphen_values(true)
                .required(key.required)
                .value_parser(value_parser(key.kind));
            if let Some(d) = key.default {
                arg = arg.default_value(d);
            }
            sub = sub.arg(arg);
        }
        sub = sub
            .arg(
                Arg::new("out")
                    .long("out")
                    .value_name("PATH")
                    .value_parser(clap::value_parser!(PathBuf))
                    .required(true)
                    .help("output file, written atomically"),
            )
            .arg(
                Arg::new("format")
                    .long("format")
                    .value_parser(["json", "csv"])
                    .default_value("json")
                    .help("output format"),
            );
        root = root.subcommand(sub);
    }
    root
}

/// Appends the 1-based argument position of the offending value, when it can be located.
fn usage_error(err: clap::Error, argv: &[String]) -> CliError {
    let text = err.render().to_string();
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => return CliError::Help(text),
        _ => {}
    }
    let offending = match err.get(ContextKind::InvalidValue) {
        Some(ContextValue::String(v)) => Some(v.clone()),
        _ => match err.get(ContextKind::InvalidArg) {
            Some(ContextValue::String(v)) => Some(v.clone()),
            _ => None,
        },
    };
    let mut message = text.trim_end().to_string();
    if matches!(err.kind(), ErrorKind::ValueValidation | ErrorKind::InvalidValue) {
        if let Some(pos) = offending.and_then(|v| argv.iter().position(|a| *a == v)) {
            message.push_str(&format!("\n(at argument {})", pos + 1));
        }
    }
    CliError::Usage(message)
}

/// Parses and validates an argument vector (without the program name).
pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<RunConfig, CliError> {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let matches = grammar()
        .try_get_matches_from(std::iter::once("ockham".to_string()).chain(argv.iter().cloned()))
        .map_err(|e| usage_error(e, &argv))?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command = Command::from_str(name)?;
    resolve(command, sub)
}

fn resolve(command: Command, sub: &ArgMatches) -> Result<RunConfig, CliError> {
    let mut params = BTreeMap::new();
    for key in command.keys() {
        let Some(value) = sub.get_one::<Value>(key.name) else {
            continue;
        };
        if key.kind == Kind::PositiveReal && !matches!(value, Value::Real(v) if *v > 0.0) {
            return Err(CliError::Usage(format!("{} must be positive", key.name)));
        }
        if key.kind == Kind::Count && *value == Value::Int(0) {
            return Err(CliError::Usage(format!("{} must be positive", key.name)));
        }
        params.insert(key.name.to_string(), value.clone());
    }
    let config = RunConfig {
        command,
        data_path: sub
            .try_get_one::<PathBuf>("data")
            .ok()
            .flatten()
            .cloned(),
        params,
        output_path: sub.get_one::<PathBuf>("out").expect("required").clone(),
        format: match sub.get_one::<String>("format").map(String::as_str) {
            Some("csv") => Format::Csv,
            _ => Format::Json,
        },
    };
    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<(), CliError> {
    let usage = |m: String| Err(CliError::Usage(m));
    if let (Some(w), Some(d)) = (config.reals("weights"), config.ints("degrees")) {
        if w.len() != d.len() {
            return usage(format!("weights has {} entries but degrees has {}", w.len(), d.len()));
        }
        if w.iter().any(|v| *v < 0.0) || w.iter().sum::<f64>() <= 0.0 {
            return usage("weights must be non-negative with a positive sum".into());
        }
    }
    if let Some(ns) = config.ints("ns") {
        if ns.contains(&0) {
            return usage("ns entries must be positive".into());
        }
        if ns.windows(2).any(|w| w[1] <= w[0]) {
            return usage("ns must be strictly increasing".into());
        }
    }
    if config.command == Command::MackayDemo {
        let (lo, hi) = (config.real("y-min"), config.real("y-max"));
        if !(hi > lo) {
            return usage("y-max must exceed y-min".into());
        }
        if config.int("grid").unwrap_or(0) < 2 {
            return usage("grid needs at least 2 points".into());
        }
    }
    if let (Some(data), out) = (&config.data_path, &config.output_path) {
        let same = data == out
            || matches!((data.canonicalize(), out.canonicalize()), (Ok(a), Ok(b)) if a == b);
        if same {
            return usage("output path must differ from the data file".into());
        }
    }
    Ok(())
}

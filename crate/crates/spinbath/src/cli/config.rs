//! Command-line and config-file parsing into a validated [`RunConfig`].
//!
//! Physics flags follow the symbol case used throughout (`--S`, `--J`,
//! `--J0`, `--N`, `--T`, `--w`, `--mu`, …). A config file is a flat
//! `key = value` text; command-line flags override file values.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::half::HalfInteger;
use crate::hp_boson::BosonParams;
use crate::ising_mf::IsingParams;
use crate::series::linear_grid;
use crate::xy_model::{QubitDensity, XYParams};
use crate::{Error, Result};

pub type ParamMap = BTreeMap<String, String>;

/// Parses the flat `key = value` config format. `#` starts a comment; blank
/// lines are ignored; keys are case-insensitive.
pub fn parse_config_text(text: &str) -> Result<ParamMap> {
    let mut map = ParamMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((head, _)) => head,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `key = value`, got `{raw}`",
                lineno + 1
            ))
        })?;
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Parses `--key value` pairs (the sweep pass-through syntax) into a map;
/// a key without a following value is a bare flag set to "true".
pub fn parse_flag_pairs(tokens: &[String]) -> Result<ParamMap> {
    let mut map = ParamMap::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        let key = t
            .strip_prefix("--")
            .ok_or_else(|| Error::Config(format!("expected `--key`, got `{t}`")))?
            .to_ascii_lowercase();
        if key.is_empty() {
            return Err(Error::Config("empty flag name".into()));
        }
        if i + 1 < tokens.len() && !tokens[i + 1].starts_with("--") {
            map.insert(key, tokens[i + 1].clone());
            i += 2;
        } else {
            map.insert(key, "true".into());
            i += 1;
        }
    }
    Ok(map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl OutputFormat {
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(Error::Config(format!(
                "unknown format `{other}` (expected csv, json or svg)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Degeneracy,
    Distribution,
    XyEvolve,
    XyAsymptote,
    TauD,
    HpBoson,
    IsingMf,
    IsingExact,
    Compare,
    Sweep,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Degeneracy => "degeneracy",
            CommandKind::Distribution => "distribution",
            CommandKind::XyEvolve => "xy-evolve",
            CommandKind::XyAsymptote => "xy-asymptote",
            CommandKind::TauD => "tau-d",
            CommandKind::HpBoson => "hp-boson",
            CommandKind::IsingMf => "ising-mf",
            CommandKind::IsingExact => "ising-exact",
            CommandKind::Compare => "compare",
            CommandKind::Sweep => "sweep",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "degeneracy" => Ok(CommandKind::Degeneracy),
            "distribution" => Ok(CommandKind::Distribution),
            "xy-evolve" => Ok(CommandKind::XyEvolve),
            "xy-asymptote" => Ok(CommandKind::XyAsymptote),
            "tau-d" => Ok(CommandKind::TauD),
            "hp-boson" => Ok(CommandKind::HpBoson),
            "ising-mf" => Ok(CommandKind::IsingMf),
            "ising-exact" => Ok(CommandKind::IsingExact),
            "compare" => Ok(CommandKind::Compare),
            "sweep" => Ok(CommandKind::Sweep),
            other => Err(Error::Config(format!("unknown command `{other}`"))),
        }
    }
}

/// Fully validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: ParamMap,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Flat `key = value` config file; command-line flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (.csv, .json or .svg; format inferred from the extension)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: csv, json or svg (default: from extension, else csv)
    #[arg(long, global = true)]
    format: Option<String>,
    /// Degeneracy-table cache directory (overrides SPINBATH_CACHE_DIR)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

macro_rules! overlay {
    ($map:expr, $($key:literal => $field:expr),+ $(,)?) => {
        $(if let Some(v) = &$field {
            $map.insert($key.to_string(), v.to_string());
        })+
    };
}

#[derive(Debug, Args)]
struct DegeneracyArgs {
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "S")]
    s: Option<String>,
}

#[derive(Debug, Args)]
struct DistributionArgs {
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "S")]
    s: Option<String>,
    /// exact | gaussian
    #[arg(long)]
    kind: Option<String>,
    /// Upper j for the gaussian grid (default mean + 6 sigma)
    #[arg(long)]
    j_max: Option<String>,
    #[arg(long)]
    points: Option<String>,
}

#[derive(Debug, Args)]
struct XyCoreArgs {
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Temperature (k_B = 1); alternative to --beta
    #[arg(long = "T")]
    t_temp: Option<String>,
    #[arg(long = "S")]
    s: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    theta: Option<String>,
}

impl XyCoreArgs {
    fn overlay(&self, map: &mut ParamMap) {
        overlay!(map,
            "mu" => self.mu, "alpha" => self.alpha, "g" => self.g,
            "beta" => self.beta, "t" => self.t_temp, "s" => self.s,
            "n" => self.n, "theta" => self.theta);
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    t_min: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    #[arg(long)]
    points: Option<String>,
}

impl GridArgs {
    fn overlay(&self, map: &mut ParamMap) {
        overlay!(map, "t-min" => self.t_min, "t-max" => self.t_max, "points" => self.points);
    }
}

#[derive(Debug, Args)]
struct XyEvolveArgs {
    #[command(flatten)]
    core: XyCoreArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    rho11: Option<String>,
    #[arg(long)]
    rho12_re: Option<String>,
    #[arg(long)]
    rho12_im: Option<String>,
}

#[derive(Debug, Args)]
struct HpBosonArgs {
    #[arg(long = "S")]
    s: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long = "T")]
    t_temp: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct IsingCoreArgs {
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "S")]
    s: Option<String>,
    #[arg(long = "J")]
    j: Option<String>,
    #[arg(long = "J0")]
    j0: Option<String>,
    #[arg(long = "T")]
    t_temp: Option<String>,
    /// Sets J = T (figure convention βJ = 1)
    #[arg(long)]
    j_equals_t: bool,
    #[arg(long)]
    mu: Option<String>,
}

impl IsingCoreArgs {
    fn overlay(&self, map: &mut ParamMap) {
        overlay!(map,
            "n" => self.n, "s" => self.s, "j" => self.j, "j0" => self.j0,
            "t" => self.t_temp, "mu" => self.mu);
        if self.j_equals_t {
            map.insert("j-equals-t".into(), "true".into());
        }
    }
}

#[derive(Debug, Args)]
struct IsingMfArgs {
    #[command(flatten)]
    core: IsingCoreArgs,
    #[arg(long)]
    w: Option<String>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct IsingExactArgs {
    #[command(flatten)]
    core: IsingCoreArgs,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    core: IsingCoreArgs,
    #[arg(long)]
    points: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Parameter swept over (a key such as S, T, mu)
    #[arg(long)]
    over: Option<String>,
    /// Comma-separated values for the swept parameter
    #[arg(long)]
    values: Option<String>,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    to: Option<String>,
    #[arg(long)]
    points: Option<String>,
    /// Inner command: xy-asymptote, tau-d or ising-mf
    #[arg(long)]
    command: Option<String>,
    /// Parameters handed to the inner command, as `--key value` pairs
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    rest: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Exact multiplicities nu(j, N; S)
    Degeneracy(DegeneracyArgs),
    /// Exact or Gaussian law of the total angular momentum
    Distribution(DistributionArgs),
    /// XY-model reduced density matrix on a time grid (time in 1/alpha)
    XyEvolve(XyEvolveArgs),
    /// Asymptotic coherence psi by quadrature and closed form
    XyAsymptote(XyCoreArgs),
    /// Decoherence time tau_D and its large-S floor
    TauD(XyCoreArgs),
    /// Bosonic (Jaynes-Cummings) coherence series (time in 1/alpha)
    HpBoson(HpBosonArgs),
    /// Mean-field transverse-Ising g(t) (time in 1/J0)
    IsingMf(IsingMfArgs),
    /// Exact w = 0 Ising g(t) via degeneracy sums (time in 1/J0)
    IsingExact(IsingExactArgs),
    /// Exact vs mean-field comparison at w = 0
    Compare(CompareArgs),
    /// Map one scalar parameter over a range of values
    Sweep(SweepArgs),
}

#[derive(Debug, Parser)]
#[command(
    name = "spinbath",
    version,
    about = "Central-qubit decoherence in spin-S baths: combinatorics, XY and Ising dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
    #[command(flatten)]
    common: CommonArgs,
}

/// Parses argv, merges the optional config file (flags win), and validates
/// every parameter against the owning module's preconditions.
pub fn parse_and_validate<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Config(e.to_string()))?;
    let mut map = match &cli.common.config {
        Some(path) => parse_config_text(&std::fs::read_to_string(path)?)?,
        None => ParamMap::new(),
    };
    let kind = match &cli.command {
        CliCommand::Degeneracy(a) => {
            overlay!(map, "n" => a.n, "s" => a.s);
            CommandKind::Degeneracy
        }
        CliCommand::Distribution(a) => {
            overlay!(map, "n" => a.n, "s" => a.s, "kind" => a.kind,
                     "j-max" => a.j_max, "points" => a.points);
            CommandKind::Distribution
        }
        CliCommand::XyEvolve(a) => {
            a.core.overlay(&mut map);
            a.grid.overlay(&mut map);
            overlay!(map, "rho11" => a.rho11, "rho12-re" => a.rho12_re,
                     "rho12-im" => a.rho12_im);
            CommandKind::XyEvolve
        }
        CliCommand::XyAsymptote(a) => {
            a.overlay(&mut map);
            CommandKind::XyAsymptote
        }
        CliCommand::TauD(a) => {
            a.overlay(&mut map);
            CommandKind::TauD
        }
        CliCommand::HpBoson(a) => {
            overlay!(map, "s" => a.s, "g" => a.g, "alpha" => a.alpha,
                     "mu" => a.mu, "beta" => a.beta, "t" => a.t_temp,
                     "n-max" => a.n_max);
            a.grid.overlay(&mut map);
            CommandKind::HpBoson
        }
        CliCommand::IsingMf(a) => {
            a.core.overlay(&mut map);
            a.grid.overlay(&mut map);
            overlay!(map, "w" => a.w);
            CommandKind::IsingMf
        }
        CliCommand::IsingExact(a) => {
            a.core.overlay(&mut map);
            a.grid.overlay(&mut map);
            CommandKind::IsingExact
        }
        CliCommand::Compare(a) => {
            a.core.overlay(&mut map);
            overlay!(map, "points" => a.points);
            CommandKind::Compare
        }
        CliCommand::Sweep(a) => {
            overlay!(map, "over" => a.over, "values" => a.values,
                     "from" => a.from, "to" => a.to, "points" => a.points,
                     "command" => a.command);
            let inner = parse_flag_pairs(&a.rest)?;
            for (k, v) in inner {
                map.insert(k, v);
            }
            CommandKind::Sweep
        }
    };
    let format = match (&cli.common.format, &cli.common.out) {
        (Some(f), _) => Some(OutputFormat::from_str(f)?),
        (None, Some(path)) => match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Some(OutputFormat::Csv),
            Some("json") => Some(OutputFormat::Json),
            Some("svg") => Some(OutputFormat::Svg),
            _ => None,
        },
        (None, None) => None,
    };
    let cache_dir = cli
        .common
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("SPINBATH_CACHE_DIR").map(PathBuf::from));
    let config = RunConfig {
        command: kind,
        params: map,
        out: cli.common.out.clone(),
        format,
        cache_dir,
    };
    validate(&config)?;
    Ok(config)
}

// ---------------------------------------------------------------------------
// typed extraction
// ---------------------------------------------------------------------------

pub(crate) struct Extract<'a>(pub &'a ParamMap);

impl Extract<'_> {
    fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::Config(format!("missing required parameter `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let raw = self.raw(key)?;
        raw.parse::<f64>()
            .map_err(|_| Error::Config(format!("parameter `{key}`: `{raw}` is not a number")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.0.get(key) {
            Some(_) => self.f64(key),
            None => Ok(default),
        }
    }

    pub fn u32(&self, key: &str) -> Result<u32> {
        let raw = self.raw(key)?;
        raw.parse::<u32>().map_err(|_| {
            Error::Config(format!(
                "parameter `{key}`: `{raw}` is not a nonnegative integer"
            ))
        })
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.0.get(key) {
            Some(raw) => raw.parse::<u64>().map_err(|_| {
                Error::Config(format!(
                    "parameter `{key}`: `{raw}` is not a nonnegative integer"
                ))
            }),
            None => Ok(default),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64_or(key, default as u64)? as usize)
    }

    pub fn spin(&self) -> Result<HalfInteger> {
        let raw = self.raw("s")?;
        let s = HalfInteger::parse(raw)
            .map_err(|_| Error::Config(format!("parameter `s`: 2S must be a positive integer, got S = {raw}")))?;
        s.as_spin_magnitude().map_err(|_| {
            Error::Config(format!(
                "parameter `s`: 2S must be a positive integer, got S = {raw}"
            ))
        })
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.0.get(key).map(|s| s.as_str()), Some("true") | Some("1"))
    }

    /// β from `beta` or `t` (exactly one).
    pub fn beta(&self) -> Result<f64> {
        match (self.0.get("beta"), self.0.get("t")) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give either `beta` or `t` (temperature), not both".into(),
            )),
            (Some(_), None) => {
                let b = self.f64("beta")?;
                if b < 0.0 {
                    return Err(Error::Config("parameter `beta`: must be >= 0".into()));
                }
                Ok(b)
            }
            (None, Some(_)) => {
                let t = self.f64("t")?;
                if !(t > 0.0) {
                    return Err(Error::Config(format!(
                        "parameter `t`: temperature must be > 0, got {t}"
                    )));
                }
                Ok(1.0 / t)
            }
            (None, None) => Err(Error::Config(
                "missing required parameter `beta` or `t` (temperature)".into(),
            )),
        }
    }
}

pub(crate) fn xy_params(map: &ParamMap) -> Result<XYParams> {
    let x = Extract(map);
    let p = XYParams {
        mu: x.f64_or("mu", 0.0)?,
        alpha: x.f64("alpha")?,
        g: x.f64("g")?,
        beta: x.beta()?,
        n: if map.contains_key("n") { x.u32("n")? } else { 1000 },
        s: x.spin()?,
        theta: x.f64_or("theta", 0.0)?,
    };
    p.validate()?;
    Ok(p)
}

pub(crate) fn qubit_density(map: &ParamMap) -> Result<QubitDensity> {
    let x = Extract(map);
    let rho = QubitDensity {
        rho11: x.f64_or("rho11", 1.0)?,
        rho12: Complex64::new(x.f64_or("rho12-re", 0.0)?, x.f64_or("rho12-im", 0.0)?),
    };
    rho.validate()?;
    Ok(rho)
}

pub(crate) fn boson_params(map: &ParamMap) -> Result<BosonParams> {
    let x = Extract(map);
    let p = BosonParams {
        s: x.spin()?,
        g: x.f64("g")?,
        alpha: x.f64("alpha")?,
        mu: x.f64_or("mu", 0.0)?,
        beta: x.beta()?,
        n_max: x.u64_or("n-max", 1)?,
    };
    p.validate()?;
    Ok(p)
}

pub(crate) fn ising_params(map: &ParamMap, require_w0: bool) -> Result<IsingParams> {
    let x = Extract(map);
    let jet = x.flag("j-equals-t");
    let (j, t) = if jet {
        match (map.contains_key("j"), map.contains_key("t")) {
            (true, false) => {
                let j = x.f64("j")?;
                (j, j)
            }
            (false, true) => {
                let t = x.f64("t")?;
                (t, t)
            }
            (true, true) => {
                let j = x.f64("j")?;
                let t = x.f64("t")?;
                if j != t {
                    return Err(Error::Config(format!(
                        "j-equals-t set but J = {j} and T = {t} differ"
                    )));
                }
                (j, t)
            }
            (false, false) => {
                return Err(Error::Config(
                    "j-equals-t needs `j` or `t` to fix the common value".into(),
                ))
            }
        }
    } else {
        (x.f64("j")?, x.f64("t")?)
    };
    let w = if require_w0 { 0.0 } else { x.f64_or("w", 0.0)? };
    if require_w0 && x.f64_or("w", 0.0)? != 0.0 {
        return Err(Error::Config(
            "parameter `w`: this command requires w = 0".into(),
        ));
    }
    let p = IsingParams {
        n: x.u32("n")?,
        s: x.spin()?,
        j,
        j0: x.f64_or("j0", 1.0)?,
        w,
        temperature: t,
        mu: x.f64_or("mu", 0.0)?,
    };
    if p.j0 == 0.0 {
        return Err(Error::Config(
            "parameter `j0`: must be nonzero (time is reported in units of 1/J0)".into(),
        ));
    }
    p.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(p)
}

/// Scaled time grid (units of 1/α or 1/J0 depending on the command).
pub(crate) fn time_grid(map: &ParamMap, default_points: usize) -> Result<Vec<f64>> {
    let x = Extract(map);
    let t_min = x.f64_or("t-min", 0.0)?;
    let t_max = x.f64("t-max")?;
    let points = x.usize_or("points", default_points)?;
    linear_grid(t_min, t_max, points)
}

pub(crate) struct SweepSpec {
    pub over: String,
    pub values: Vec<f64>,
    pub inner: CommandKind,
}

pub(crate) fn sweep_spec(map: &ParamMap) -> Result<SweepSpec> {
    let x = Extract(map);
    let over = x.raw("over")?.to_ascii_lowercase();
    let inner = CommandKind::from_name(x.raw("command")?)?;
    if !matches!(
        inner,
        CommandKind::XyAsymptote | CommandKind::TauD | CommandKind::IsingMf
    ) {
        return Err(Error::Config(format!(
            "sweep supports scalar commands (xy-asymptote, tau-d, ising-mf), not `{}`",
            inner.name()
        )));
    }
    let values: Vec<f64> = if let Some(list) = map.get("values") {
        let vs: std::result::Result<Vec<f64>, _> =
            list.split(',').map(|v| v.trim().parse::<f64>()).collect();
        vs.map_err(|_| Error::Config(format!("parameter `values`: bad list `{list}`")))?
    } else {
        let from = x.f64("from")?;
        let to = x.f64("to")?;
        let points = x.usize_or("points", 11)?;
        linear_grid(from, to, points)?
    };
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    Ok(SweepSpec {
        over,
        values,
        inner,
    })
}

/// Validates the parameter set for a command without running it.
pub fn validate(config: &RunConfig) -> Result<()> {
    let map = &config.params;
    let x = Extract(map);
    match config.command {
        CommandKind::Degeneracy => {
            let n = x.u32("n")?;
            if n < 1 {
                return Err(Error::Config("parameter `n`: need N >= 1".into()));
            }
            x.spin()?;
        }
        CommandKind::Distribution => {
            let n = x.u32("n")?;
            if n < 1 {
                return Err(Error::Config("parameter `n`: need N >= 1".into()));
            }
            x.spin()?;
            match map.get("kind").map(|s| s.as_str()) {
                None | Some("exact") | Some("gaussian") => {}
                Some(other) => {
                    return Err(Error::Config(format!(
                        "parameter `kind`: `{other}` is neither exact nor gaussian"
                    )))
                }
            }
        }
        CommandKind::XyEvolve => {
            xy_params(map)?;
            qubit_density(map)?;
            time_grid(map, 201)?;
        }
        CommandKind::XyAsymptote | CommandKind::TauD => {
            xy_params(map)?;
        }
        CommandKind::HpBoson => {
            boson_params(map)?;
            time_grid(map, 201)?;
        }
        CommandKind::IsingMf => {
            ising_params(map, false)?;
            time_grid(map, 201)?;
        }
        CommandKind::IsingExact => {
            ising_params(map, true)?;
            time_grid(map, 201)?;
        }
        CommandKind::Compare => {
            ising_params(map, true)?;
        }
        CommandKind::Sweep => {
            let spec = sweep_spec(map)?;
            // the inner command must validate at every sweep value
            for v in &spec.values {
                let mut inner_map = map.clone();
                for k in ["over", "values", "from", "to", "points", "command"] {
                    inner_map.remove(k);
                }
                inner_map.insert(spec.over.clone(), format!("{v}"));
                match spec.inner {
                    CommandKind::XyAsymptote | CommandKind::TauD => {
                        xy_params(&inner_map)?;
                    }
                    CommandKind::IsingMf => {
                        ising_params(&inner_map, false)?;
                    }
                    _ => unreachable!("sweep_spec restricts inner commands"),
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("spinbath".to_string())
            .chain(s.split_whitespace().map(String::from))
            .collect()
    }

    #[test]
    fn fig3_command_parses() {
        let c = parse_and_validate(args(
            "ising-mf --S 1 --J 2 --w 1 --T 2.52 --N 10000 --t-max 10",
        ))
        .unwrap();
        assert_eq!(c.command, CommandKind::IsingMf);
        assert_eq!(c.params.get("s").unwrap(), "1");
        assert_eq!(c.params.get("t").unwrap(), "2.52");
    }

    #[test]
    fn bad_spin_names_the_rule() {
        let err = parse_and_validate(args("degeneracy --N 4 --S 0.4")).unwrap_err();
        assert!(
            err.to_string().contains("2S must be a positive integer"),
            "got: {err}"
        );
    }

    #[test]
    fn reversed_grid_rejected() {
        let err = parse_and_validate(args(
            "xy-evolve --alpha 1 --g 1 --beta 0.1 --S 1 --t-min 5 --t-max 1",
        ))
        .unwrap_err();
        assert!(err.to_string().contains("t_max"), "got: {err}");
    }

    #[test]
    fn beta_and_temperature_exclusive() {
        let err = parse_and_validate(args(
            "xy-asymptote --alpha 1 --g 1 --beta 0.1 --T 10 --S 1",
        ))
        .unwrap_err();
        assert!(err.to_string().contains("not both"), "got: {err}");
    }

    #[test]
    fn sweep_example_parses() {
        let c = parse_and_validate(args(
            "sweep --over S --values 0.5,1,1.5,2,5,10 --command xy-asymptote --mu 1 --alpha 1 --g 1 --beta 0.1",
        ))
        .unwrap();
        assert_eq!(c.command, CommandKind::Sweep);
        let spec = sweep_spec(&c.params).unwrap();
        assert_eq!(spec.over, "s");
        assert_eq!(spec.values.len(), 6);
        assert_eq!(spec.inner, CommandKind::XyAsymptote);
    }

    #[test]
    fn config_file_merges_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(
            &path,
            "# xy defaults\nalpha = 1.0\ng = 1.0\nbeta = 0.1\nS = 1\nmu = 0.3\n",
        )
        .unwrap();
        let c = parse_and_validate(args(&format!(
            "xy-asymptote --config {} --mu 2.0",
            path.display()
        )))
        .unwrap();
        assert_eq!(c.params.get("mu").unwrap(), "2.0");
        assert_eq!(c.params.get("alpha").unwrap(), "1.0");
    }

    #[test]
    fn config_text_parser() {
        let map = parse_config_text("A = 1\n# comment\n\nb=2 # trailing\n").unwrap();
        assert_eq!(map.get("a").unwrap(), "1");
        assert_eq!(map.get("b").unwrap(), "2");
        assert!(parse_config_text("novalue\n").is_err());
    }

    #[test]
    fn j_equals_t_fixes_both() {
        let c = parse_and_validate(args(
            "ising-exact --N 10 --S 1 --T 1.3 --j-equals-t --t-max 30",
        ))
        .unwrap();
        let p = ising_params(&c.params, true).unwrap();
        assert_eq!(p.j, 1.3);
        assert_eq!(p.temperature, 1.3);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_and_validate(args("degeneracy --N 4 --S 0.5 --frobnicate 3"));
        assert!(err.is_err());
    }

    #[test]
    fn flag_pairs_parser() {
        let toks: Vec<String> = ["--mu", "1", "--alpha", "2", "--flag"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let map = parse_flag_pairs(&toks).unwrap();
        assert_eq!(map.get("mu").unwrap(), "1");
        assert_eq!(map.get("flag").unwrap(), "true");
        let bad: Vec<String> = vec!["mu".into()];
        assert!(parse_flag_pairs(&bad).is_err());
    }
}

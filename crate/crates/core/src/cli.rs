//! The `rvk` command line.
//!
//! Global settings are layered: a `key = value` config file, then command
//! line flags, then `RVK_*` environment variables (highest precedence):
//!
//! | flag           | variable         | config key   |
//! |----------------|------------------|--------------|
//! | `--cutoff`     | `RVK_CUTOFF`     | `cutoff`     |
//! | `--blocks`     | `RVK_BLOCKS`     | `blocks`     |
//! | `--tol`        | `RVK_TOL`        | `tol`        |
//! | `--workers`    | `RVK_WORKERS`    | `workers`    |
//! | `--cache-path` | `RVK_CACHE_PATH` | `cache-path` |
//! | `--format`     | `RVK_FORMAT`     | `format`     |
//! | `--seed`       | `RVK_SEED`       | `seed`       |
//! | `--config`     | `RVK_CONFIG`     |              |
//!
//! Exit codes: 0 success, 1 a verification check failed or a computation
//! did not settle, 2 usage or configuration error.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::basis::{evaluate_table, rows_to_csv, BasisVariant, TableRequest, TruncationPolicy, CSV_HEADER};
use crate::kloosterman::{
    geometric_checkpoints, kloosterman, local_a, partial_sums_multi, Divisor, KloostermanCache, KloostermanQuery,
    Variant,
};
use crate::modforms::{
    a4_coefficients, curly_e2_holomorphic, eisenstein_e2_series, h_star_holomorphic, theta_cap_series,
    zagier_holomorphic,
};
use crate::verify::{exit_code, parse_suites, reports_table, reports_to_jsonl, run_suite, Tolerances, VerifyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
    Table,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            "table" => Ok(OutputFormat::Table),
            _ => Err(format!("unknown output format `{s}` (csv, jsonl, table)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub cutoff: u64,
    pub blocks: usize,
    pub tol: f64,
    pub workers: usize,
    pub cache_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub seed: u64,
}

impl Default for CliConfig {
    fn default() -> Self {
        let p = TruncationPolicy::default();
        CliConfig {
            cutoff: p.cutoff,
            blocks: p.blocks,
            tol: p.tol,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache_path: None,
            format: OutputFormat::Csv,
            seed: VerifyConfig::default().seed,
        }
    }
}

impl CliConfig {
    fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), String> {
        let bad = |e: String| format!("{origin}: invalid value `{value}` for {key}: {e}");
        match key {
            "cutoff" => self.cutoff = parse_count(value).map_err(bad)?,
            "blocks" => self.blocks = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "tol" => self.tol = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            "workers" => self.workers = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "cache-path" => self.cache_path = Some(PathBuf::from(value)),
            "format" => self.format = value.parse().map_err(bad)?,
            "seed" => self.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            _ => return Err(format!("{origin}: unknown setting `{key}`")),
        }
        Ok(())
    }

    /// Apply a `key = value` config file; `#` starts a comment and values
    /// may be quoted.
    pub fn apply_file_text(&mut self, text: &str, origin: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{origin}:{}: expected `key = value`", i + 1))?;
            let v = v.trim().trim_matches('"');
            self.set(k.trim(), v, &format!("{origin}:{}", i + 1))?;
        }
        Ok(())
    }

    fn apply_flags(&mut self, g: &GlobalArgs) {
        if let Some(c) = g.cutoff {
            self.cutoff = c;
        }
        if let Some(b) = g.blocks {
            self.blocks = b;
        }
        if let Some(t) = g.tol {
            self.tol = t;
        }
        if let Some(w) = g.workers {
            self.workers = w;
        }
        if let Some(p) = &g.cache_path {
            self.cache_path = Some(p.clone());
        }
        if let Some(f) = g.format {
            self.format = f;
        }
        if let Some(s) = g.seed {
            self.seed = s;
        }
    }

    fn apply_env(&mut self, env: &HashMap<String, String>) -> Result<(), String> {
        for key in ["cutoff", "blocks", "tol", "workers", "cache-path", "format", "seed"] {
            let var = env_name(key);
            if let Some(v) = env.get(&var) {
                self.set(key, v, &var)?;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.workers == 0 {
            return Err("workers must be at least 1".into());
        }
        self.policy().validate()
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { cutoff: self.cutoff, blocks: self.blocks, tol: self.tol, ..TruncationPolicy::default() }
    }

    /// Config file < flags < environment.
    pub fn resolve(g: &GlobalArgs, env: &HashMap<String, String>) -> Result<Self, String> {
        let mut cfg = CliConfig::default();
        let file = env.get("RVK_CONFIG").map(PathBuf::from).or_else(|| g.config.clone());
        if let Some(path) = file {
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            cfg.apply_file_text(&text, &path.display().to_string())?;
        }
        cfg.apply_flags(g);
        cfg.apply_env(env)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn env_name(key: &str) -> String {
    format!("RVK_{}", key.replace('-', "_").to_uppercase())
}

/// Integers, also written as `1e5`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().map_err(|_| format!("`{s}` is not a count"))?;
    if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 {
        Ok(f as u64)
    } else {
        Err(format!("`{s}` is not a count"))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Settings file with `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Largest modulus of truncated series.
    #[arg(long, global = true, value_parser = parse_count)]
    pub cutoff: Option<u64>,
    /// Number of trailing blocks in the Cesàro average.
    #[arg(long, global = true)]
    pub blocks: Option<usize>,
    /// Oscillation tolerance of truncated series.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Disk cache of Kloosterman sums.
    #[arg(long, global = true)]
    pub cache_path: Option<PathBuf>,
    /// csv, jsonl or table.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Parser)]
#[command(name = "rvk", version, about = "Theta-multiplier Kloosterman sums and Fourier interpolation bases")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// A single sum S(m, n, c, nu^{2k}), or partial sums of S/c over c <= X.
    Kloosterman {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        c: Option<u64>,
        /// Twice the weight.
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        weight: i64,
        /// theta-even, theta-odd, theta-level4 or classical.
        #[arg(long, default_value = "theta-even")]
        variant: Variant,
        /// Stream partial sums at geometric checkpoints up to X instead.
        #[arg(long, value_parser = parse_count)]
        range: Option<u64>,
    },
    /// Basis functions b_{d,n}(r) on a grid of r, as CSV.
    Basis {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        n: u64,
        /// `start:stop:step`, a comma-separated list, or empty.
        #[arg(long, allow_hyphen_values = true)]
        r_grid: String,
        #[arg(long, default_value = "plain")]
        variant: BasisVariant,
    },
    /// Run verification suites.
    Verify {
        /// exact, analytic, all, or a comma-separated list.
        #[arg(long, default_value = "exact")]
        suite: String,
        /// Replacement tolerance file.
        #[arg(long)]
        tolerances: Option<PathBuf>,
    },
    /// The local factor A_{2k}(p, n, s) of the Kloosterman zeta function.
    Zeta {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        /// Imaginary part of s.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s_im: f64,
        #[arg(long, default_value_t = 3)]
        weight: i64,
    },
    /// Exact coefficients of a q-series.
    Qseries {
        /// theta, theta3, e2, curlye2, a4, zagier or hstar.
        #[arg(long)]
        form: String,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Debug)]
enum Failure {
    /// Exit code 2.
    Usage(String),
    /// Exit code 1.
    Runtime(String),
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A rectangular result rendered in the chosen format.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: OutputFormat) -> String {
        let mut s = String::new();
        match format {
            OutputFormat::Csv => {
                let _ = writeln!(s, "{}", self.header.join(","));
                for r in &self.rows {
                    let _ = writeln!(s, "{}", r.join(","));
                }
            }
            OutputFormat::Jsonl => {
                for r in &self.rows {
                    let fields: Vec<String> = self
                        .header
                        .iter()
                        .zip(r)
                        .map(|(k, v)| {
                            let val = if v.parse::<f64>().is_ok() { v.clone() } else { serde_json::to_string(v).unwrap() };
                            format!("{}:{val}", serde_json::to_string(k).unwrap())
                        })
                        .collect();
                    let _ = writeln!(s, "{{{}}}", fields.join(","));
                }
            }
            OutputFormat::Table => {
                let widths: Vec<usize> = (0..self.header.len())
                    .map(|i| self.rows.iter().map(|r| r[i].len()).chain([self.header[i].len()]).max().unwrap())
                    .collect();
                let line = |cells: Vec<&str>| {
                    cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ")
                };
                let _ = writeln!(s, "{}", line(self.header.clone()));
                for r in &self.rows {
                    let _ = writeln!(s, "{}", line(r.iter().map(String::as_str).collect()));
                }
            }
        }
        s
    }
}

fn kloosterman_cmd(
    cfg: &CliConfig,
    (m, n, c, weight, variant, range): (i64, i64, Option<u64>, i64, Variant, Option<u64>),
) -> Result<Table, Failure> {
    if let Some(x) = range {
        if x == 0 {
            return Err(Failure::Usage("--range must be positive".into()));
        }
        let cps = geometric_checkpoints(x, 10);
        let rows = partial_sums_multi(&[(m, n)], weight, variant, x, Divisor::C, &cps)
            .into_iter()
            .map(|(x, v)| vec![x.to_string(), fmt17(v[0].re), fmt17(v[0].im)])
            .collect();
        return Ok(Table { header: vec!["x", "re", "im"], rows });
    }
    let c = c.ok_or_else(|| Failure::Usage("either --c or --range is required".into()))?;
    let q = KloostermanQuery { m, n, c, weight2k: weight, variant };
    let usage = |e: crate::kloosterman::KloostermanError| Failure::Usage(e.to_string());
    let value = match &cfg.cache_path {
        Some(path) => {
            let mut cache = KloostermanCache::load(path).map_err(|e| Failure::Runtime(e.to_string()))?;
            let v = cache.get_or_compute(q).map_err(usage)?;
            cache.save(path).map_err(|e| Failure::Runtime(e.to_string()))?;
            v
        }
        None => kloosterman(q).map_err(usage)?.value,
    };
    Ok(Table {
        header: vec!["m", "n", "c", "weight2k", "variant", "re", "im"],
        rows: vec![vec![
            m.to_string(),
            n.to_string(),
            c.to_string(),
            weight.to_string(),
            variant.tag().to_string(),
            fmt17(value.re),
            fmt17(value.im),
        ]],
    })
}

/// `start:stop:step`, a comma-separated list, or the empty grid.
pub fn parse_r_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let num = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("bad number `{s}` in r grid"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("r value `{s}` is not finite"))
        }
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("r grid `{spec}` is not start:stop:step"));
        }
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if h <= 0.0 || b < a {
            return Err(format!("r grid `{spec}` needs step > 0 and stop >= start"));
        }
        let count = ((b - a) / h + 1e-9).floor() as usize;
        if count > 1_000_000 {
            return Err(format!("r grid `{spec}` has too many points"));
        }
        return Ok((0..=count).map(|k| a + k as f64 * h).collect());
    }
    spec.split(',').map(num).collect()
}

fn qseries_rows(form: &str, order: usize) -> Result<Vec<(i64, String)>, Failure> {
    fn dump<T: ToString + Copy>(it: impl Iterator<Item = (i64, T)>) -> Vec<(i64, String)> {
        it.map(|(n, v)| (n, v.to_string())).collect()
    }
    Ok(match form {
        "theta" => dump(theta_cap_series(order).coeffs()),
        "theta3" => {
            let t = theta_cap_series(order).map(|a| a as i128);
            let cube = t.mul(&t).and_then(|x| x.mul(&t)).map_err(|e| Failure::Runtime(e.to_string()))?;
            dump(cube.coeffs())
        }
        "e2" => dump(eisenstein_e2_series(order).coeffs()),
        "curlye2" => dump(curly_e2_holomorphic(order).coeffs()),
        "a4" => a4_coefficients(order).into_iter().enumerate().map(|(n, v)| (n as i64, v.to_string())).collect(),
        "zagier" => dump(zagier_holomorphic(order).coeffs()),
        "hstar" => dump(h_star_holomorphic(order).coeffs()),
        _ => {
            return Err(Failure::Usage(format!(
                "unknown form `{form}` (theta, theta3, e2, curlye2, a4, zagier, hstar)"
            )))
        }
    })
}

fn execute(cli: &Cli, cfg: &CliConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    match &cli.command {
        Command::Kloosterman { m, n, c, weight, variant, range } => {
            let t = kloosterman_cmd(cfg, (*m, *n, *c, *weight, *variant, *range))?;
            out.write_all(t.render(cfg.format).as_bytes()).map_err(io)?;
        }
        Command::Basis { dim, n, r_grid, variant } => {
            if *dim != 3 && *dim != 4 {
                return Err(Failure::Usage(format!("--dim must be 3 or 4, not {dim}")));
            }
            let grid = parse_r_grid(r_grid).map_err(Failure::Usage)?;
            let req = TableRequest { dim: *dim, ns: vec![*n], variant: *variant, r_grid: grid };
            let rows = evaluate_table(&[req], &cfg.policy()).map_err(|e| Failure::Runtime(e.to_string()))?;
            let unsettled = rows.iter().filter(|r| r.oscillation > cfg.tol).count();
            let text = match cfg.format {
                OutputFormat::Csv => rows_to_csv(&rows),
                f => {
                    let t = Table {
                        header: CSV_HEADER.split(',').collect(),
                        rows: rows
                            .iter()
                            .map(|r| {
                                vec![
                                    r.dim.to_string(),
                                    r.n.to_string(),
                                    r.variant.tag().to_string(),
                                    fmt17(r.r),
                                    fmt17(r.value),
                                    fmt17(r.oscillation),
                                ]
                            })
                            .collect(),
                    };
                    t.render(f)
                }
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            if unsettled > 0 {
                return Err(Failure::Runtime(format!(
                    "{unsettled} values oscillate by more than tol = {:e}; raise --cutoff",
                    cfg.tol
                )));
            }
        }
        Command::Verify { suite, tolerances } => {
            let suites = parse_suites(suite).map_err(|e| Failure::Usage(e.to_string()))?;
            let tolerances = match tolerances {
                Some(p) => Tolerances::load(p).map_err(|e| Failure::Usage(e.to_string()))?,
                None => Tolerances::embedded(),
            };
            let vcfg = VerifyConfig {
                tolerances,
                blocks: cfg.blocks,
                segments: TruncationPolicy::default().segments,
                cutoff: None,
                seed: cfg.seed,
            };
            let reports = run_suite(&suites, &vcfg);
            let text = match cfg.format {
                OutputFormat::Jsonl => reports_to_jsonl(&reports),
                _ => reports_table(&reports),
            };
            out.write_all(text.as_bytes()).map_err(io)?;
            return Ok(exit_code(&reports));
        }
        Command::Zeta { p, n, s, s_im, weight } => {
            if *n == 0 {
                return Err(Failure::Usage("the local factor needs n != 0".into()));
            }
            let v = local_a(*p, *n, Complex64::new(*s, *s_im), *weight).map_err(|e| Failure::Usage(e.to_string()))?;
            let t = Table {
                header: vec!["p", "n", "s_re", "s_im", "weight2k", "re", "im"],
                rows: vec![vec![
                    p.to_string(),
                    n.to_string(),
                    fmt17(*s),
                    fmt17(*s_im),
                    weight.to_string(),
                    fmt17(v.re),
                    fmt17(v.im),
                ]],
            };
            out.write_all(t.render(cfg.format).as_bytes()).map_err(io)?;
        }
        Command::Qseries { form, order } => {
            let rows = qseries_rows(form, *order)?;
            let t = Table {
                header: vec!["n", "coefficient"],
                rows: rows.into_iter().map(|(n, v)| vec![n.to_string(), v]).collect(),
            };
            out.write_all(t.render(cfg.format).as_bytes()).map_err(io)?;
        }
    }
    Ok(0)
}

/// Run the command line with an explicit environment; returns the exit code.
/// Diagnostics go to `err`.
pub fn run<I, T>(args: I, env: &HashMap<String, String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = match CliConfig::resolve(&cli.global, env) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| execute(&cli, &cfg, &mut buf));
    if let Err(e) = out.write_all(&buf) {
        let _ = writeln!(err, "error: {e}");
        return 1;
    }
    match result {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}

/// Entry point of the binary.
pub fn main_entry() -> i32 {
    let env: HashMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with("RVK_")).collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &env, &mut stdout.lock(), &mut stderr.lock())
}

/// Read a config file into a fresh configuration (no flags or environment).
pub fn config_from_file(path: &Path) -> Result<CliConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut cfg = CliConfig::default();
    cfg.apply_file_text(&text, &path.display().to_string())?;
    cfg.validate()?;
    Ok(cfg)
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a gated check failed, 2 usage or configuration
//! error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::constants::{proved_constants, BoundsResult, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::hermite::{hermite_coeffs, MAX_ORDER};
use crate::sim::{
    check_bdg, holder_check, martingale_identity_check, moment_estimates, simulate_batch,
    simulate_batch_with_threads, DriverSpec, IntegrandSpec, SimConfig, SIGMA_MARGIN,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Caps the worker count of the simulator; never changes output values.
pub const THREADS_ENV: &str = "BDG_LAB_THREADS";

/// Largest order covered by the constants and verify commands without `--force`.
pub const GATED_MAX_ORDER: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "bdg-lab", version, about = "Certified BDG moment constants and Monte Carlo verification")]
pub struct RunManifest {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the exact coefficients a_k of H_{2n}, one "k p/q" line per k.
    Hermite {
        #[arg(long)]
        n: u32,
    },
    /// Print certified enclosures of every real root of H_{2n}(1, y).
    Roots {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Derive proved and sharp constants for a range of orders.
    Constants {
        #[arg(long, default_value_t = 2)]
        n_min: u32,
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
        /// Allow orders above 10 (up to 64).
        #[arg(long)]
        force: bool,
    },
    /// Simulate the configured integrals and check the moment bounds.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Also write the CSV verdict table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write the JSON verdict document here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let manifest = match RunManifest::try_parse_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match manifest.command {
        Command::Hermite { n } => cmd_hermite(n, out),
        Command::Roots { n, tol } => cmd_roots(n, tol, out),
        Command::Constants { n_min, n_max, tol, format, force } => {
            cmd_constants(n_min, n_max, tol, format, force, out)
        }
        Command::Verify { config, format, csv, json } => {
            cmd_verify(&config, format, csv.as_deref(), json.as_deref(), out)
        }
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult = std::result::Result<i32, CliError>;

/// `%.12g`-style rendering: 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// JSON number rounded to 12 significant digits; non-finite becomes null.
fn json_num(x: f64) -> Value {
    fmt_sig(x).parse::<f64>().ok().filter(|v| v.is_finite()).map_or(Value::Null, Value::from)
}

fn write_table(out: &mut dyn Write, headers: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| rows.iter().map(|r| r[i].len()).chain([h.len()]).max().unwrap())
        .collect();
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(headers.to_vec()))?;
    for r in rows {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn csv_string(headers: &[&str], rows: &[Vec<String>]) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn check_order(n: u32, min: u32, max: u32) -> std::result::Result<(), CliError> {
    if n < min || n > max {
        return Err(CliError::Usage(format!("n = {n} is outside the supported range {min}..={max}")));
    }
    Ok(())
}

pub fn cmd_hermite(n: u32, out: &mut dyn Write) -> CliResult {
    check_order(n, 1, MAX_ORDER)?;
    let h = hermite_coeffs(n)?;
    for (k, a) in h.coeffs().iter().enumerate() {
        writeln!(out, "{k} {}/{}", a.numer(), a.denom())?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_roots(n: u32, tol: f64, out: &mut dyn Write) -> CliResult {
    check_order(n, 1, MAX_ORDER)?;
    let h = hermite_coeffs(n)?;
    let roots = crate::cert::isolate_real_roots(&h.univariate_restriction(), tol)?;
    for (k, r) in roots.iter().enumerate() {
        writeln!(out, "{k} [{}, {}]", r.lo_f64(), r.hi_f64())?;
    }
    Ok(EXIT_OK)
}

const CONSTANTS_COLUMNS: [&str; 9] =
    ["n", "parity", "d1", "d2", "C1_proved", "C2_proved", "C1_sharp", "C2_sharp", "error"];

pub fn cmd_constants(
    n_min: u32,
    n_max: u32,
    tol: f64,
    format: OutputFormat,
    force: bool,
    out: &mut dyn Write,
) -> CliResult {
    let cap = if force { MAX_ORDER } else { GATED_MAX_ORDER };
    if n_min < 2 || n_min > n_max || n_max > cap {
        return Err(CliError::Usage(format!(
            "need 2 <= n-min <= n-max <= {cap}, got n-min = {n_min}, n-max = {n_max}{}",
            if force { "" } else { " (use --force for orders above 10)" }
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!("tol must be finite and positive, got {tol}")));
    }
    let results: Vec<(u32, Result<BoundsResult>)> =
        (n_min..=n_max).into_par_iter().map(|n| (n, proved_constants(n, tol))).collect();
    let failed = results.iter().any(|(_, r)| r.is_err());

    match format {
        OutputFormat::Json => {
            let rows: Vec<Value> = results
                .iter()
                .map(|(n, r)| match r {
                    Ok(b) => json!({
                        "n": n,
                        "parity": b.parity.as_str(),
                        "d1": json_num(b.d1),
                        "d2": json_num(b.d2),
                        "C1_proved": json_num(b.c1_proved),
                        "C2_proved": json_num(b.c2_proved),
                        "C1_sharp": json_num(b.c1_sharp),
                        "C2_sharp": json_num(b.c2_sharp),
                        "tol": tol,
                    }),
                    Err(e) => json!({ "n": n, "error": e.to_string() }),
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("serializable"))?;
        }
        OutputFormat::Csv | OutputFormat::Table => {
            let rows: Vec<Vec<String>> = results
                .iter()
                .map(|(n, r)| match r {
                    Ok(b) => vec![
                        n.to_string(),
                        b.parity.as_str().to_string(),
                        fmt_sig(b.d1),
                        fmt_sig(b.d2),
                        fmt_sig(b.c1_proved),
                        fmt_sig(b.c2_proved),
                        fmt_sig(b.c1_sharp),
                        fmt_sig(b.c2_sharp),
                        String::new(),
                    ],
                    Err(e) => {
                        let mut row = vec![n.to_string()];
                        row.extend(std::iter::repeat_n(String::new(), 7));
                        row.push(e.to_string());
                        row
                    }
                })
                .collect();
            if format == OutputFormat::Csv {
                write!(out, "{}", csv_string(&CONSTANTS_COLUMNS, &rows)?)?;
            } else {
                write_table(out, &CONSTANTS_COLUMNS, &rows)?;
            }
        }
    }
    Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
}

/// Input document of `verify`: a [`SimConfig`] whose `integrand`, `driver`
/// and `n` may each be replaced or extended by a list.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub t: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub n: Option<u32>,
    #[serde(default)]
    pub n_values: Vec<u32>,
    #[serde(default)]
    pub integrand: Option<IntegrandSpec>,
    #[serde(default)]
    pub integrands: Vec<IntegrandSpec>,
    #[serde(default)]
    pub driver: Option<DriverSpec>,
    #[serde(default)]
    pub drivers: Vec<DriverSpec>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl VerifyConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: VerifyConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            format!("field `{path}`: {inner}")
        })?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn orders(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.n.into_iter().chain(self.n_values.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn integrand_list(&self) -> Vec<IntegrandSpec> {
        self.integrand.iter().chain(&self.integrands).cloned().collect()
    }

    pub fn driver_list(&self) -> Vec<DriverSpec> {
        self.driver.iter().chain(&self.drivers).cloned().collect()
    }

    fn sim_configs(&self) -> Vec<SimConfig> {
        let n = self.orders().last().copied().unwrap_or(2);
        let mut out = Vec::new();
        for integrand in self.integrand_list() {
            for driver in self.driver_list() {
                out.push(SimConfig {
                    t: self.t,
                    steps: self.steps,
                    paths: self.paths,
                    seed: self.seed,
                    n,
                    integrand: integrand.clone(),
                    driver,
                });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let orders = self.orders();
        if orders.is_empty() {
            return Err(Error::Config("at least one order is required (`n` or `n_values`)".into()));
        }
        if let Some(&bad) = orders.iter().find(|&&n| !(2..=GATED_MAX_ORDER).contains(&n)) {
            return Err(Error::Config(format!("order {bad} is outside 2..={GATED_MAX_ORDER}")));
        }
        if self.integrand_list().is_empty() {
            return Err(Error::Config("at least one integrand is required".into()));
        }
        if self.driver_list().is_empty() {
            return Err(Error::Config("at least one driver is required".into()));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be finite and positive, got {}", self.tol)));
        }
        self.sim_configs().iter().try_for_each(SimConfig::validate)
    }
}

/// One line of the verify report.
#[derive(Clone, Debug)]
pub struct VerdictRow {
    pub n: u32,
    pub driver: String,
    pub integrand: String,
    pub z_pow_n: f64,
    pub c1_sharp: f64,
    pub c2_sharp: f64,
    pub c1_proved: f64,
    pub c2_proved: f64,
    pub pass_sharp: bool,
    pub pass_proved: bool,
    pub rho_mean: f64,
    pub rho_stderr: f64,
    pub rho_pass: bool,
    pub holder_pass: bool,
    /// Whether this row counts towards the exit code.
    pub gated: bool,
    pub error: Option<String>,
}

impl VerdictRow {
    /// BDG containment gates orders up to 4 and the martingale identity
    /// orders up to 3, for continuous drivers only.
    pub fn passes(&self) -> bool {
        self.error.is_none()
            && self.pass_sharp
            && self.pass_proved
            && self.holder_pass
            && (self.n > 3 || self.rho_pass)
    }
}

const VERDICT_COLUMNS: [&str; 16] = [
    "n", "driver", "integrand", "z_pow_n", "C1_sharp", "C2_sharp", "C1_proved", "C2_proved",
    "pass_sharp", "pass_proved", "rho_mean", "rho_stderr", "rho_pass", "holder_pass", "gated", "error",
];

fn simulate(config: &SimConfig) -> Result<Vec<crate::sim::PathSample>> {
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(threads) if threads > 0 => simulate_batch_with_threads(config, threads),
        _ => simulate_batch(config),
    }
}

/// Runs every (integrand, driver, n) combination of the configuration.
pub fn run_verification(cfg: &VerifyConfig) -> Result<Vec<VerdictRow>> {
    let orders = cfg.orders();
    let bounds: BTreeMap<u32, Result<BoundsResult>> =
        orders.par_iter().map(|&n| (n, proved_constants(n, cfg.tol))).collect();
    let mut rows = Vec::new();
    for sim in cfg.sim_configs() {
        let batch = simulate(&sim)?;
        for &n in &orders {
            let mut row = VerdictRow {
                n,
                driver: sim.driver.label(),
                integrand: sim.integrand.label(),
                z_pow_n: f64::NAN,
                c1_sharp: f64::NAN,
                c2_sharp: f64::NAN,
                c1_proved: f64::NAN,
                c2_proved: f64::NAN,
                pass_sharp: false,
                pass_proved: false,
                rho_mean: f64::NAN,
                rho_stderr: f64::NAN,
                rho_pass: false,
                holder_pass: false,
                gated: sim.driver.is_continuous() && n <= 4,
                error: None,
            };
            let outcome = (|| -> Result<()> {
                let holder = (1..=n).map(|k| holder_check(&batch, n, k)).collect::<Result<Vec<_>>>()?;
                row.holder_pass = holder.iter().all(|h| h.holds);
                let rho = martingale_identity_check(&batch, n)?;
                row.rho_mean = rho.value;
                row.rho_stderr = rho.stderr;
                row.rho_pass = rho.value.abs() <= SIGMA_MARGIN * rho.stderr;
                let b = bounds[&n].as_ref().map_err(Clone::clone)?;
                row.c1_sharp = b.c1_sharp;
                row.c2_sharp = b.c2_sharp;
                row.c1_proved = b.c1_proved;
                row.c2_proved = b.c2_proved;
                let m = moment_estimates(&batch, n)?;
                let v = check_bdg(&m.m2n, &m.qn, b, n)?;
                row.z_pow_n = v.z_pow_n;
                row.pass_sharp = v.sharp.pass;
                row.pass_proved = v.proved.pass;
                Ok(())
            })();
            if let Err(e) = outcome {
                row.error = Some(e.to_string());
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn verdict_json(rows: &[VerdictRow], exit_code: i32) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "n": r.n,
                "driver": r.driver,
                "integrand": r.integrand,
                "z_pow_n": json_num(r.z_pow_n),
                "C1_sharp": json_num(r.c1_sharp),
                "C2_sharp": json_num(r.c2_sharp),
                "C1_proved": json_num(r.c1_proved),
                "C2_proved": json_num(r.c2_proved),
                "pass_sharp": r.pass_sharp,
                "pass_proved": r.pass_proved,
                "rho_mean": json_num(r.rho_mean),
                "rho_stderr": json_num(r.rho_stderr),
                "rho_pass": r.rho_pass,
                "holder_pass": r.holder_pass,
                "gated": r.gated,
                "error": r.error,
            })
        })
        .collect();
    json!({ "rows": rows, "exit_code": exit_code })
}

fn verdict_cells(rows: &[VerdictRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.driver.clone(),
                r.integrand.clone(),
                fmt_sig(r.z_pow_n),
                fmt_sig(r.c1_sharp),
                fmt_sig(r.c2_sharp),
                fmt_sig(r.c1_proved),
                fmt_sig(r.c2_proved),
                r.pass_sharp.to_string(),
                r.pass_proved.to_string(),
                fmt_sig(r.rho_mean),
                fmt_sig(r.rho_stderr),
                r.rho_pass.to_string(),
                r.holder_pass.to_string(),
                r.gated.to_string(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect()
}

pub fn cmd_verify(
    config_path: &Path,
    format: OutputFormat,
    csv_path: Option<&Path>,
    json_path: Option<&Path>,
    out: &mut dyn Write,
) -> CliResult {
    let text = fs::read_to_string(config_path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = VerifyConfig::parse(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", config_path.display())))?;
    let rows = run_verification(&cfg)?;
    let exit_code = if rows.iter().filter(|r| r.gated).all(VerdictRow::passes) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };

    let json_text = serde_json::to_string_pretty(&verdict_json(&rows, exit_code)).expect("serializable") + "\n";
    let cells = verdict_cells(&rows);
    let csv_text = csv_string(&VERDICT_COLUMNS, &cells)?;
    if let Some(p) = csv_path {
        fs::write(p, &csv_text)?;
    }
    if let Some(p) = json_path {
        fs::write(p, &json_text)?;
    }
    match format {
        OutputFormat::Json => write!(out, "{json_text}")?,
        OutputFormat::Csv => write!(out, "{csv_text}")?,
        OutputFormat::Table => write_table(out, &VERDICT_COLUMNS, &cells)?,
    }
    Ok(exit_code)
}

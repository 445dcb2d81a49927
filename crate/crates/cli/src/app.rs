use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thinspec::construct::{build_limit_periodic, gordon_check, thin_spectrum, Mode};
use thinspec::dosids::{check_ids_bound, dtheta_de, hs_sum, IdsProfile};
use thinspec::io::{fmt_f64, to_json};
use thinspec::lattice::{dfold_sum, torus_entries, torus_eigenvalues, SeparableWeights};
use thinspec::spectrum::{band_structure, discriminant, lyapunov};
use thinspec::{Error as CoreError, IntervalUnion, PeriodicJacobi};
use thiserror::Error;

use crate::coeffs::{parse_coefficients, parse_list};

pub const DEFAULT_PERIOD_CAP: usize = 4096;
pub const PERIOD_CAP_ENV: &str = "THINSPEC_PERIOD_CAP";

#[derive(Debug, Parser, Serialize)]
#[command(name = "thinspec", version, about = "Spectra of periodic and limit-periodic Jacobi matrices")]
pub struct Cli {
    /// Coefficient file: one line per period entry, columns `a[,b]`.
    #[arg(long, global = true, conflicts_with = "a")]
    pub input: Option<PathBuf>,
    /// Inline off-diagonal period, e.g. `1,2`.
    #[arg(long = "a", global = true, value_name = "LIST")]
    pub a: Option<String>,
    /// Inline diagonal period (defaults to zeros).
    #[arg(long = "b", global = true, value_name = "LIST", allow_negative_numbers = true)]
    pub b: Option<String>,
    /// Directory receiving the artifacts and `manifest.json`.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Offdiag,
    Diag,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Offdiag => Mode::OffDiagonal,
            ModeArg::Diag => Mode::Diagonal,
        }
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Bands, gaps and measure of the spectrum.
    Bands,
    /// Integrated density of states and the Hilbert-Schmidt bound.
    Ids {
        #[arg(long, allow_negative_numbers = true, required_unless_present = "grid", conflicts_with = "grid")]
        at: Option<f64>,
        /// Number of energies spread over the convex hull of the spectrum.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Lyapunov exponent at one energy.
    Lyapunov {
        #[arg(long, allow_negative_numbers = true)]
        at: f64,
    },
    /// Thin-spectrum approximant.
    Thin {
        #[arg(long)]
        eps: f64,
        #[arg(long = "N", value_name = "N")]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Offdiag)]
        mode: ModeArg,
    },
    /// Chain of approximants towards a limit-periodic sequence.
    Chain {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        stages: usize,
        #[arg(long)]
        period_cap: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Offdiag)]
        mode: ModeArg,
    },
    /// Closeness of three consecutive length-p windows.
    Gordon {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: u32,
    },
    /// Spectrum of the separable lattice Laplacian.
    Laplacian {
        #[arg(long)]
        d: usize,
        /// Also diagonalize the operator on a torus of this side.
        #[arg(long)]
        torus: Option<usize>,
        /// Write the torus matrix as `row,col,value` lines to this file.
        #[arg(long, requires = "torus")]
        dump_torus: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bands => "bands",
            Command::Ids { .. } => "ids",
            Command::Lyapunov { .. } => "lyapunov",
            Command::Thin { .. } => "thin",
            Command::Chain { .. } => "chain",
            Command::Gordon { .. } => "gordon",
            Command::Laplacian { .. } => "laplacian",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(CoreError),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e.root() {
            CoreError::Domain(_) | CoreError::Precondition(_) | CoreError::TooSmallN { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numerical(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Files written by one run.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub outputs: Vec<PathBuf>,
    pub manifest: PathBuf,
}

pub fn load_jacobi(cli: &Cli) -> Result<PeriodicJacobi<f64>, CliError> {
    let (a, b) = match (&cli.input, &cli.a) {
        (Some(path), _) => {
            if cli.b.is_some() {
                return Err(invalid("--b cannot be combined with --input"));
            }
            let text = fs::read_to_string(path)
                .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
            parse_coefficients(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?
        }
        (None, Some(list)) => {
            let a = parse_list(list).map_err(|e| invalid(format!("--a: {e}")))?;
            if let Some((i, v)) = a.iter().enumerate().find(|(_, &v)| v <= 0.0) {
                return Err(invalid(format!("--a: entry {} = {v} must be positive", i + 1)));
            }
            let b = match &cli.b {
                Some(list) => parse_list(list).map_err(|e| invalid(format!("--b: {e}")))?,
                None => vec![0.0; a.len()],
            };
            (a, b)
        }
        (None, None) => return Err(invalid("coefficients are required: pass --input FILE or --a LIST")),
    };
    if a.len() != b.len() {
        return Err(invalid(format!(
            "a has {} entries but b has {}",
            a.len(),
            b.len()
        )));
    }
    Ok(PeriodicJacobi::new(a, b)?)
}

/// Period cap from `--period-cap`, then the environment, then the default.
pub fn period_cap(flag: Option<usize>) -> Result<usize, CliError> {
    let cap = match flag {
        Some(c) => c,
        None => match std::env::var(PERIOD_CAP_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| invalid(format!("{PERIOD_CAP_ENV}={v:?} is not a positive integer")))?,
            Err(_) => DEFAULT_PERIOD_CAP,
        },
    };
    if cap == 0 {
        return Err(invalid("period cap must be positive"));
    }
    Ok(cap)
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be a positive finite number, got {x}")))
    }
}

/// Primary artifact of a command plus the diagnostics copied to the manifest.
struct Outcome {
    json: Value,
    csv: String,
    extra: Vec<(String, String)>,
    diagnostics: Value,
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    // Route through the exact formatter so numbers keep 17 digits.
    let s = to_json(v).map_err(|e| CliError::Io(e.to_string()))?;
    serde_json::from_str(&s).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct IdsRecord {
    #[serde(rename = "E")]
    e: f64,
    ids: f64,
    #[serde(rename = "dtheta_dE")]
    dtheta_de: Option<f64>,
    hs_sum: Option<f64>,
    bound_lhs: Option<f64>,
    bound_rhs: Option<f64>,
}

fn ids_record(profile: &IdsProfile<f64>, e: f64) -> Result<IdsRecord, CliError> {
    let j = profile.jacobi();
    let interior = |r: Result<f64, CoreError>| match r {
        Ok(v) => Ok(Some(v)),
        Err(CoreError::NotInBandInterior { .. }) => Ok(None),
        Err(err) => Err(CliError::from(err)),
    };
    let bound = match check_ids_bound(j, e) {
        Ok(b) => Some(b),
        Err(CoreError::NotInBandInterior { .. }) => None,
        Err(err) => return Err(err.into()),
    };
    Ok(IdsRecord {
        e,
        ids: profile.ids(e),
        dtheta_de: interior(dtheta_de(j, e))?,
        hs_sum: interior(hs_sum(j, e))?,
        bound_lhs: bound.map(|b| b.lhs),
        bound_rhs: bound.map(|b| b.rhs),
    })
}

fn ids_csv(rows: &[IdsRecord]) -> String {
    let mut s = String::from("E,ids,dtheta_dE,hs_sum,bound_lhs,bound_rhs\n");
    for r in rows {
        s.push_str(&csv_line(&[
            fmt_f64(r.e),
            fmt_f64(r.ids),
            opt(r.dtheta_de),
            opt(r.hs_sum),
            opt(r.bound_lhs),
            opt(r.bound_rhs),
        ]));
    }
    s
}

fn coefficient_csv(j: &PeriodicJacobi<f64>) -> String {
    let diag = !j.is_off_diagonal();
    let mut s = String::from(if diag { "index,a,b\n" } else { "index,a\n" });
    for i in 0..j.period() {
        let mut f = vec![(i + 1).to_string(), fmt_f64(j.a()[i])];
        if diag {
            f.push(fmt_f64(j.b()[i]));
        }
        s.push_str(&csv_line(&f));
    }
    s
}

fn intervals_csv(x: &IntervalUnion<f64>) -> String {
    let mut s = String::from("lo,hi\n");
    for &(l, h) in x.components() {
        s.push_str(&csv_line(&[fmt_f64(l), fmt_f64(h)]));
    }
    s
}

fn execute(cli: &Cli, j: &PeriodicJacobi<f64>) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Bands => {
            let bs = band_structure(j)?;
            let mut csv = String::from("band,lo,hi\n");
            for (k, &(l, h)) in bs.bands.iter().enumerate() {
                csv.push_str(&csv_line(&[(k + 1).to_string(), fmt_f64(l), fmt_f64(h)]));
            }
            Ok(Outcome {
                json: to_value(&bs)?,
                csv,
                extra: Vec::new(),
                diagnostics: json!({
                    "measure": bs.measure,
                    "open_gaps": bs.open_gap_count(),
                    "closed_gaps": bs.closed_gap_count(),
                }),
            })
        }
        Command::Ids { at, grid } => {
            let profile = IdsProfile::new(j.clone())?;
            let energies: Vec<f64> = match (at, grid) {
                (Some(e), _) => {
                    if !e.is_finite() {
                        return Err(invalid("--at must be finite"));
                    }
                    vec![*e]
                }
                (None, Some(n)) => {
                    if *n == 0 {
                        return Err(invalid("--grid must be at least 1"));
                    }
                    let bands = &profile.bands().bands;
                    let lo = bands[0].0;
                    let hi = bands[bands.len() - 1].1;
                    (0..*n)
                        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / *n as f64)
                        .collect()
                }
                (None, None) => return Err(invalid("pass --at E or --grid n")),
            };
            let rows = energies
                .iter()
                .map(|&e| ids_record(&profile, e))
                .collect::<Result<Vec<_>, _>>()?;
            let violations = rows
                .iter()
                .filter(|r| matches!((r.bound_lhs, r.bound_rhs), (Some(l), Some(r)) if l < r - 1e-9))
                .count();
            let json = if at.is_some() {
                to_value(&rows[0])?
            } else {
                to_value(&rows)?
            };
            Ok(Outcome {
                json,
                csv: ids_csv(&rows),
                extra: Vec::new(),
                diagnostics: json!({ "points": rows.len(), "bound_violations": violations }),
            })
        }
        Command::Lyapunov { at } => {
            if !at.is_finite() {
                return Err(invalid("--at must be finite"));
            }
            let l = lyapunov(j, *at);
            let d = discriminant(j, *at);
            Ok(Outcome {
                json: to_value(&json!({ "E": at, "lyapunov": l, "discriminant": d }))?,
                csv: format!("E,lyapunov,discriminant\n{}", csv_line(&[fmt_f64(*at), fmt_f64(l), fmt_f64(d)])),
                extra: Vec::new(),
                diagnostics: json!({ "lyapunov": l }),
            })
        }
        Command::Thin { eps, n, mode } => {
            positive("--eps", *eps)?;
            let cap = period_cap(None)?;
            let period = n.checked_mul(j.period()).unwrap_or(usize::MAX);
            if period > cap {
                return Err(invalid(format!(
                    "N p = {period} exceeds the period cap {cap} (set {PERIOD_CAP_ENV} to raise it)"
                )));
            }
            let mode: Mode = (*mode).into();
            if mode == Mode::OffDiagonal && !j.is_off_diagonal() {
                return Err(invalid("--mode offdiag needs b = 0; use --mode diag"));
            }
            let r = thin_spectrum(j, *eps, *n, mode)?;
            let diagnostics = to_value(&r.diagnostics)?;
            Ok(Outcome {
                json: to_value(&r)?,
                csv: coefficient_csv(&r.a_tilde),
                extra: vec![("thin_coefficients.csv".into(), coefficient_csv(&r.a_tilde))],
                diagnostics,
            })
        }
        Command::Chain {
            eps,
            stages,
            period_cap: flag,
            mode,
        } => {
            positive("--eps", *eps)?;
            if *stages == 0 {
                return Err(invalid("--stages must be at least 1"));
            }
            let cap = period_cap(*flag)?;
            let mode: Mode = (*mode).into();
            if mode == Mode::OffDiagonal && !j.is_off_diagonal() {
                return Err(invalid("--mode offdiag needs b = 0; use --mode diag"));
            }
            let chain = build_limit_periodic(j, *eps, *stages, mode, cap)?;
            let ratios = chain.box_dim_ratios().ok();
            let estimate = chain.box_dim_estimate().ok();
            let certs = chain.gordon_certificates()?;
            let mut csv = String::from("stage,period,eps_n,mu_n,target,meets_target\n");
            for s in &chain.stages {
                csv.push_str(&csv_line(&[
                    s.index.to_string(),
                    s.period.to_string(),
                    fmt_f64(s.eps_n),
                    fmt_f64(s.mu_n),
                    fmt_f64(s.target),
                    s.meets_target.to_string(),
                ]));
            }
            let mut covers = String::from("stage,count,length\n");
            for (s, (count, len)) in chain.stages.iter().zip(chain.covers()) {
                covers.push_str(&csv_line(&[s.index.to_string(), count.to_string(), fmt_f64(len)]));
            }
            let mut extra = vec![("chain_covers.csv".into(), covers)];
            if let Some(last) = chain.stages.last() {
                extra.push(("chain_coefficients.csv".into(), coefficient_csv(&last.jacobi)));
            }
            let per_stage: Vec<Value> = chain
                .stages
                .iter()
                .map(|s| {
                    json!({
                        "stage": s.index, "period": s.period, "eps_n": s.eps_n, "mu_n": s.mu_n,
                        "meets_target": s.meets_target, "eta": s.thin.eta, "lambda": s.thin.lambda,
                        "k": s.thin.k, "n_tilde": s.thin.n_tilde, "ell": s.thin.ell,
                    })
                })
                .collect();
            let json = to_value(&json!({
                "chain": chain,
                "covers": chain.covers(),
                "box_dim_covers": chain.box_dim_covers(),
                "box_dim_ratios": ratios,
                "measured_box_dim_ratios": chain.measured_box_dim_ratios().ok(),
                "box_dim_estimate": estimate,
                "gordon_certificates": certs,
            }))?;
            Ok(Outcome {
                json,
                csv,
                extra,
                diagnostics: to_value(&json!({
                    "partial": chain.partial,
                    "stop_reason": chain.stop_reason,
                    "stages": per_stage,
                    "box_dim_estimate": estimate,
                }))?,
            })
        }
        Command::Gordon { p, k } => {
            if *p == 0 || *k == 0 {
                return Err(invalid("--p and --k must be at least 1"));
            }
            let pa = gordon_check(j.a(), *p, *k)?;
            let pb = gordon_check(j.b(), *p, *k)?;
            let v = json!({ "p": p, "k": k, "period": j.period(), "passed_a": pa, "passed_b": pb, "passed": pa && pb });
            Ok(Outcome {
                csv: format!("p,k,passed\n{p},{k},{}\n", pa && pb),
                diagnostics: v.clone(),
                json: v,
                extra: Vec::new(),
            })
        }
        Command::Laplacian { d, torus, dump_torus } => {
            if *d == 0 {
                return Err(invalid("--d must be at least 1"));
            }
            if !j.is_off_diagonal() {
                return Err(invalid("lattice weights use a only; b must vanish"));
            }
            let w = SeparableWeights::new(j.a().to_vec(), *d)?;
            let one = band_structure(j)?.spectrum();
            let set = dfold_sum(&one, *d)?;
            let mut json = json!({ "d": d, "components": set.components(), "measure": set.measure() });
            let mut diagnostics = json!({ "measure": set.measure(), "components": set.len() });
            if let Some(side) = torus {
                let ev = torus_eigenvalues(&w, *side)?;
                let worst = ev.iter().map(|&e| set.distance_to(e)).fold(0.0, f64::max);
                json["torus"] = json!({ "side": side, "eigenvalues": ev, "max_distance": worst });
                diagnostics["torus_max_distance"] = json!(worst);
                if let Some(path) = dump_torus {
                    let mut s = String::new();
                    for (r, c, v) in torus_entries(&w, *side)? {
                        s.push_str(&csv_line(&[r.to_string(), c.to_string(), fmt_f64(v)]));
                    }
                    write_atomic(path, s.as_bytes())?;
                }
            }
            Ok(Outcome {
                json: to_value(&json)?,
                csv: intervals_csv(&set),
                extra: Vec::new(),
                diagnostics: to_value(&diagnostics)?,
            })
        }
    }
}

/// Writes `bytes` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// Runs one job and writes its artifacts and manifest under `cli.out`.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let j = load_jacobi(cli)?;
    let outcome = execute(cli, &j)?;
    let name = cli.command.name();
    fs::create_dir_all(&cli.out)?;
    let mut outputs = Vec::new();
    let primary = match cli.format {
        Format::Json => {
            let path = cli.out.join(format!("{name}.json"));
            let text = to_json(&outcome.json).map_err(|e| CliError::Io(e.to_string()))?;
            write_atomic(&path, text.as_bytes())?;
            path
        }
        Format::Csv => {
            let path = cli.out.join(format!("{name}.csv"));
            write_atomic(&path, outcome.csv.as_bytes())?;
            path
        }
    };
    outputs.push(primary);
    for (file, body) in &outcome.extra {
        let path = cli.out.join(file);
        write_atomic(&path, body.as_bytes())?;
        outputs.push(path);
    }
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = json!({
        "tool": "thinspec",
        "version": thinspec::VERSION,
        "command": name,
        "config": cli,
        "input": { "period": j.period(), "a": j.a(), "b": j.b() },
        "outputs": outputs.iter().map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned())).collect::<Vec<_>>(),
        "diagnostics": outcome.diagnostics,
        "timestamp": timestamp,
    });
    let manifest_path = cli.out.join("manifest.json");
    let text = to_json(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&manifest_path, text.as_bytes())?;
    Ok(Report {
        outputs,
        manifest: manifest_path,
    })
}

//! Command-line front end. Exit codes: 0 on success, 1 on invalid input,
//! 2 on I/O failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analysis::{analyze_profiles, analyze_spectra, DirectionalSample, PasAnalysis, PdpAnalysis, DEFAULT_SLT_DB};
use crate::campaign::{run_campaign, CampaignError};
use crate::output::{emit_outputs, read_pas_csv, read_pdp_csv, OutputError};
use crate::report::{reproduce_with, REPRODUCE_DROPS, REPRODUCE_SEED};
use crate::scenario::{
    lookup_params, parse_assignment, parse_key_values, render_parameter_table, validate_config, ConfigError,
    DistanceSpec, OutputFormat, Scenario, SimConfig, DEFAULT_MTI_NS,
};
use crate::stats::PowerDelayProfile;

/// Default output directory when neither `--out-dir` nor this variable is set
/// is `indoorsim-out`.
pub const OUT_DIR_ENV: &str = "INDOORSIM_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "indoorsim-out";

#[derive(Debug, Parser)]
#[command(name = "indoorsim", version, about = "Indoor 28/140 GHz statistical channel simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo campaign and write its files.
    Generate(GenerateArgs),
    /// Re-extract clusters, lobes and distribution fits from PDP/PAS files.
    Analyze(AnalyzeArgs),
    /// Compare simulated median RMS delay spreads with published values.
    Reproduce(ReproduceArgs),
    /// Print the built-in scenario parameters.
    Params(ParamsArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// One of 28-los, 28-nlos, 140-los, 140-nlos.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Fixed distance in m, or `min:max` for a uniform draw per drop.
    #[arg(long)]
    pub distance: Option<String>,
    #[arg(long)]
    pub drops: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tx_power_dbm: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// jsonl, csv or all.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Parameter override, repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub pdp: Option<PathBuf>,
    #[arg(long)]
    pub pas: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MTI_NS)]
    pub mti_ns: f64,
    #[arg(long, default_value_t = DEFAULT_SLT_DB, allow_hyphen_values = true)]
    pub slt_db: f64,
    /// Treat PAS rows as coarse pointing directions and interpolate to 1°.
    #[arg(long)]
    pub interpolate: bool,
    /// Also write `analysis.json` here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long, default_value_t = REPRODUCE_DROPS)]
    pub drops: usize,
    #[arg(long, default_value_t = REPRODUCE_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Print one scenario as `key = value` lines instead of the full table.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}", render_config_errors(.0))]
    Invalid(Vec<ConfigError>),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error(transparent)]
    Campaign(#[from] CampaignError),
    #[error(transparent)]
    Analysis(#[from] crate::analysis::AnalysisError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

fn render_config_errors(errors: &[ConfigError]) -> String {
    errors.iter().map(|e| format!("error: {e}")).collect::<Vec<_>>().join("\n")
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Invalid(vec![e])
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Output(_) | CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}

/// Resolves the output directory: flag, then environment, then default.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn override_pairs(raw: &[String]) -> Result<Vec<(String, String)>, CliError> {
    raw.iter()
        .map(|s| {
            parse_assignment(s).map_err(|reason| {
                CliError::from(ConfigError::MalformedOverride {
                    key: s.clone(),
                    reason,
                })
            })
        })
        .collect()
}

/// Builds a campaign configuration from a config file and flags.
pub fn build_config(args: &GenerateArgs) -> Result<SimConfig, CliError> {
    let mut errors = Vec::new();
    let mut config = SimConfig::new(Scenario::GHZ28_LOS);
    let mut scenario_given = false;
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        for (key, value) in parse_key_values(&text)? {
            let applied = match key.as_str() {
                "out_dir" => {
                    config.output.out_dir = Some(PathBuf::from(&value));
                    Ok(())
                }
                "format" => value.parse().map(|f| config.output.format = f),
                "workers" => value
                    .parse()
                    .map(|w| config.output.workers = Some(w))
                    .map_err(|_| ConfigError::MalformedOverride {
                        key,
                        reason: format!("`{value}` is not a worker count"),
                    }),
                "scenario" => {
                    scenario_given = true;
                    config.apply_key_value(&key, &value)
                }
                _ => config.apply_key_value(&key, &value),
            };
            if let Err(e) = applied {
                errors.push(e);
            }
        }
    }
    if let Some(s) = &args.scenario {
        scenario_given = true;
        match s.parse() {
            Ok(s) => config.scenario = s,
            Err(e) => errors.push(e),
        }
    }
    if !scenario_given {
        errors.push(ConfigError::MalformedOverride {
            key: "scenario".into(),
            reason: "no scenario given (use --scenario or a `scenario` key)".into(),
        });
    }
    if let Some(d) = &args.distance {
        match d.parse::<DistanceSpec>() {
            Ok(d) => config.distance = d,
            Err(e) => errors.push(e),
        }
    }
    if let Some(n) = args.drops {
        config.num_drops = n;
    }
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(p) = args.tx_power_dbm {
        config.tx_power_dbm = p;
    }
    if let Some(f) = &args.format {
        match f.parse::<OutputFormat>() {
            Ok(f) => config.output.format = f,
            Err(e) => errors.push(e),
        }
    }
    if args.workers.is_some() {
        config.output.workers = args.workers;
    }
    if args.out_dir.is_some() {
        config.output.out_dir = args.out_dir.clone();
    }
    match override_pairs(&args.overrides) {
        Ok(mut pairs) => config.overrides.append(&mut pairs),
        Err(CliError::Invalid(mut e)) => errors.append(&mut e),
        Err(e) => return Err(e),
    }
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(CliError::Invalid(errors))
    }
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = build_config(args)?;
    let validated = validate_config(config).map_err(CliError::Invalid)?;
    let settings = &validated.config.output;
    let dir = resolve_out_dir(settings.out_dir.as_deref());
    let campaign = run_campaign(&validated, settings.workers)?;
    let files = emit_outputs(&campaign.result, &campaign.drops, &validated, &dir, settings.format)?;
    let p = &campaign.result.provenance;
    let mut text = format!(
        "{} drops of {} (seed {}, config {})\n",
        campaign.result.records.len(),
        p.scenario,
        p.master_seed,
        &p.config_hash[..12]
    );
    for name in ["rms_ds_ns", "aod_az_spread_deg", "aoa_az_spread_deg", "num_clusters", "num_subpaths"] {
        if let Some(m) = campaign.result.median(name) {
            text.push_str(&format!("  median {name:<20} {m:.4}\n"));
        }
    }
    for f in files {
        text.push_str(&format!("  wrote {}\n", f.display()));
    }
    write_stdout(out, &text)
}

fn write_stdout(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

#[derive(Debug, serde::Serialize)]
struct AnalysisOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    pdp: Option<PdpAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pas: Option<PasAnalysis>,
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.pdp.is_none() && args.pas.is_none() {
        return Err(CliError::Usage("analyze needs --pdp and/or --pas".into()));
    }
    let pdp = match &args.pdp {
        Some(path) => {
            let mut by_drop: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
            for row in read_pdp_csv(path)? {
                by_drop.entry(row.drop_id).or_default().push((row.excess_delay_ns, row.power_mw));
            }
            let profiles = by_drop
                .into_values()
                .map(PowerDelayProfile::from_taps)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Some(analyze_profiles(&profiles, args.mti_ns)?)
        }
        None => None,
    };
    let pas = match &args.pas {
        Some(path) => {
            let mut by_key: BTreeMap<(u64, crate::channel::Side), Vec<DirectionalSample>> = BTreeMap::new();
            for row in read_pas_csv(path)? {
                by_key.entry((row.drop_id, row.side)).or_default().push(DirectionalSample {
                    az_deg: row.az_deg,
                    el_deg: row.el_deg,
                    power_mw: row.power_mw,
                });
            }
            let spectra: Vec<_> = by_key.into_iter().map(|((_, side), s)| (side, s)).collect();
            Some(analyze_spectra(&spectra, args.slt_db, args.interpolate)?)
        }
        None => None,
    };
    let mut json = serde_json::to_string_pretty(&AnalysisOutput { pdp, pas }).expect("report serializes");
    json.push('\n');
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        let path = dir.join("analysis.json");
        std::fs::write(&path, &json).map_err(|source| CliError::Io { path, source })?;
    }
    write_stdout(out, &json)
}

fn reproduce(args: &ReproduceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.drops == 0 {
        return Err(ConfigError::NonPositiveDrops.into());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Campaign(CampaignError::WorkerPool(e.to_string())))?;
    let report = pool.install(|| reproduce_with(args.drops, args.seed))?;
    write_stdout(out, &report.render())
}

fn params(args: &ParamsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let Some(s) = &args.scenario else {
        if !args.overrides.is_empty() {
            return Err(CliError::Usage("--override needs --scenario".into()));
        }
        return write_stdout(out, &render_parameter_table());
    };
    let scenario: Scenario = s.parse()?;
    let mut p = lookup_params(scenario);
    let mut errors = Vec::new();
    for (k, v) in override_pairs(&args.overrides)? {
        if let Err(e) = p.set(&k, &v) {
            errors.push(e);
        }
    }
    if let Err(mut e) = p.validate() {
        errors.append(&mut e);
    }
    if !errors.is_empty() {
        return Err(CliError::Invalid(errors));
    }
    let mut text = format!("# {scenario}\n");
    for (k, v) in p.key_values() {
        text.push_str(&format!("{k} = {v}\n"));
    }
    write_stdout(out, &text)
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Analyze(a) => analyze(a, out),
        Command::Reproduce(a) => reproduce(a, out),
        Command::Params(a) => params(a, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let text = e.to_string();
            let _ = if text.starts_with("error:") {
                writeln!(err, "{text}")
            } else {
                writeln!(err, "error: {text}")
            };
            e.exit_code()
        }
    }
}

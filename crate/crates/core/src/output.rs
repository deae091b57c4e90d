//! Campaign files and their readers.
//!
//! | file          | content                                         |
//! |---------------|-------------------------------------------------|
//! | `drops.jsonl` | one [`ChannelDrop`] per line                    |
//! | `pdp.csv`     | one row per subpath tap                         |
//! | `pas.csv`     | occupied 1 degree cells per drop and side       |
//! | `cdf.csv`     | empirical CDF of every per-drop metric          |
//! | `summary.json`| provenance, configuration and metric summaries  |
//!
//! CSV files open with a `#` line carrying the seed and configuration hash.
//! Numbers are written in shortest round-trip form, so a value read back
//! is bit-identical to the one written.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::campaign::{CampaignResult, Provenance, METRICS};
use crate::channel::{ChannelDrop, Side};
use crate::pathloss::mw_to_dbm;
use crate::scenario::{OutputFormat, ValidatedConfig};
use crate::stats::build_pas;

pub const DROPS_FILE: &str = "drops.jsonl";
pub const PDP_FILE: &str = "pdp.csv";
pub const PAS_FILE: &str = "pas.csv";
pub const CDF_FILE: &str = "cdf.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}:{line}: {reason}", path.display())]
    Malformed { path: PathBuf, line: usize, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> OutputError + '_ {
    move |source| OutputError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpRow {
    pub drop_id: u64,
    pub cluster_idx: usize,
    pub subpath_idx: usize,
    pub excess_delay_ns: f64,
    pub absolute_delay_ns: f64,
    pub power_mw: f64,
    pub power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PasRow {
    pub drop_id: u64,
    pub side: Side,
    pub az_deg: f64,
    pub el_deg: f64,
    pub power_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfRow {
    pub metric: String,
    pub x: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub master_seed: u64,
    pub config_hash: String,
    pub provenance: Provenance,
    pub num_drops: usize,
    pub config: serde_json::Value,
    /// Keyed by metric name.
    pub metrics: BTreeMap<String, MetricSummary>,
}

impl SummaryFile {
    pub fn new(result: &CampaignResult, config: &ValidatedConfig) -> Self {
        SummaryFile {
            master_seed: result.provenance.master_seed,
            config_hash: result.provenance.config_hash.clone(),
            provenance: result.provenance.clone(),
            num_drops: result.records.len(),
            config: serde_json::to_value(config).expect("config serializes"),
            metrics: result
                .aggregates
                .iter()
                .map(|(k, s)| {
                    (
                        k.clone(),
                        MetricSummary {
                            count: s.count,
                            mean: s.mean,
                            median: s.median,
                            min: s.min,
                            max: s.max,
                        },
                    )
                })
                .collect(),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn provenance_line(p: &Provenance) -> String {
    format!(
        "# master_seed={} config_hash={} scenario={} version={}\n",
        p.master_seed, p.config_hash, p.scenario, p.version
    )
}

fn csv_writer(path: &Path, provenance: &Provenance) -> Result<csv::Writer<BufWriter<File>>, OutputError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    out.write_all(provenance_line(provenance).as_bytes()).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(out))
}

fn finish<W: Write>(path: &Path, w: csv::Writer<W>) -> Result<(), OutputError> {
    let mut inner = w.into_inner().map_err(|e| OutputError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })?;
    inner.flush().map_err(io_err(path))
}

pub fn write_drops_jsonl(path: &Path, drops: &[ChannelDrop]) -> Result<(), OutputError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for drop in drops {
        serde_json::to_writer(&mut out, drop).map_err(|source| OutputError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn write_pdp_csv(path: &Path, drops: &[ChannelDrop], provenance: &Provenance) -> Result<(), OutputError> {
    let mut w = csv_writer(path, provenance)?;
    w.write_record([
        "drop_id",
        "cluster_idx",
        "subpath_idx",
        "excess_delay_ns",
        "absolute_delay_ns",
        "power_mw",
        "power_dbm",
    ])
    .map_err(csv_err(path))?;
    for drop in drops {
        for s in drop.subpaths() {
            w.write_record([
                drop.drop_index.to_string(),
                s.cluster_index.to_string(),
                s.subpath_index.to_string(),
                num(s.excess_delay_ns),
                num(s.absolute_delay_ns),
                num(s.power_mw),
                num(mw_to_dbm(s.power_mw)),
            ])
            .map_err(csv_err(path))?;
        }
    }
    finish(path, w)
}

pub fn write_pas_csv(path: &Path, drops: &[ChannelDrop], provenance: &Provenance) -> Result<(), OutputError> {
    let mut w = csv_writer(path, provenance)?;
    w.write_record(["drop_id", "side", "az_deg", "el_deg", "power_mw"])
        .map_err(csv_err(path))?;
    for drop in drops {
        for side in [Side::Aod, Side::Aoa] {
            for (az, el, p) in build_pas(drop, side).occupied_cells() {
                w.write_record([
                    drop.drop_index.to_string(),
                    side.as_str().to_string(),
                    az.to_string(),
                    el.to_string(),
                    num(p),
                ])
                .map_err(csv_err(path))?;
            }
        }
    }
    finish(path, w)
}

pub fn write_cdf_csv(path: &Path, result: &CampaignResult) -> Result<(), OutputError> {
    let mut w = csv_writer(path, &result.provenance)?;
    w.write_record(["metric", "x", "p"]).map_err(csv_err(path))?;
    for name in METRICS {
        let Some(summary) = result.aggregates.get(name) else {
            continue;
        };
        for pt in &summary.cdf {
            w.write_record([name.to_string(), num(pt.x), num(pt.p)])
                .map_err(csv_err(path))?;
        }
    }
    finish(path, w)
}

pub fn write_summary_json(path: &Path, result: &CampaignResult, config: &ValidatedConfig) -> Result<(), OutputError> {
    let mut text = serde_json::to_string_pretty(&SummaryFile::new(result, config)).map_err(|source| {
        OutputError::Json {
            path: path.to_path_buf(),
            source,
        }
    })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

/// Writes the files selected by `format` into `dir`, creating it if
/// needed, and returns their paths. `summary.json` is always written.
pub fn emit_outputs(
    result: &CampaignResult,
    drops: &[ChannelDrop],
    config: &ValidatedConfig,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let (jsonl, csv) = match format {
        OutputFormat::Jsonl => (true, false),
        OutputFormat::Csv => (false, true),
        OutputFormat::All => (true, true),
    };
    if jsonl {
        let p = dir.join(DROPS_FILE);
        write_drops_jsonl(&p, drops)?;
        written.push(p);
    }
    if csv {
        let p = dir.join(PDP_FILE);
        write_pdp_csv(&p, drops, &result.provenance)?;
        written.push(p);
        let p = dir.join(PAS_FILE);
        write_pas_csv(&p, drops, &result.provenance)?;
        written.push(p);
        let p = dir.join(CDF_FILE);
        write_cdf_csv(&p, result)?;
        written.push(p);
    }
    let p = dir.join(SUMMARY_FILE);
    write_summary_json(&p, result, config)?;
    written.push(p);
    Ok(written)
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, OutputError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(csv_err(path))
}

/// Reads a PDP table; works on any CSV with the PDP columns, such as a
/// measurement export.
pub fn read_pdp_csv(path: &Path) -> Result<Vec<PdpRow>, OutputError> {
    read_csv(path)
}

pub fn read_pas_csv(path: &Path) -> Result<Vec<PasRow>, OutputError> {
    read_csv(path)
}

pub fn read_cdf_csv(path: &Path) -> Result<Vec<CdfRow>, OutputError> {
    read_csv(path)
}

pub fn read_summary_json(path: &Path) -> Result<SummaryFile, OutputError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| OutputError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_drops_jsonl(path: &Path) -> Result<Vec<ChannelDrop>, OutputError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut drops = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let drop = serde_json::from_str(&line).map_err(|e| OutputError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        drops.push(drop);
    }
    Ok(drops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::run_campaign;
    use crate::scenario::{validate_config, Scenario, SimConfig};

    fn campaign() -> (ValidatedConfig, crate::campaign::Campaign) {
        let mut c = SimConfig::new(Scenario::GHZ140_NLOS);
        c.num_drops = 20;
        c.master_seed = 77;
        let v = validate_config(c).unwrap();
        let camp = run_campaign(&v, Some(2)).unwrap();
        (v, camp)
    }

    #[test]
    fn numbers_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -4.5e-17, 1e-300] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn files_round_trip() {
        let (v, camp) = campaign();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_outputs(&camp.result, &camp.drops, &v, dir.path(), OutputFormat::All).unwrap();
        assert_eq!(files.len(), 5);

        assert_eq!(read_drops_jsonl(&dir.path().join(DROPS_FILE)).unwrap(), camp.drops);

        let pdp = read_pdp_csv(&dir.path().join(PDP_FILE)).unwrap();
        assert_eq!(pdp.len(), camp.drops.iter().map(|d| d.num_subpaths()).sum::<usize>());
        let first: Vec<&PdpRow> = pdp.iter().filter(|r| r.drop_id == 0).collect();
        let subpaths: Vec<_> = camp.drops[0].subpaths().collect();
        for (row, sp) in first.iter().zip(&subpaths) {
            assert_eq!(row.power_mw, sp.power_mw);
            assert_eq!(row.excess_delay_ns, sp.excess_delay_ns);
        }

        let pas = read_pas_csv(&dir.path().join(PAS_FILE)).unwrap();
        let aod: f64 = pas
            .iter()
            .filter(|r| r.drop_id == 3 && r.side == Side::Aod)
            .map(|r| r.power_mw)
            .sum();
        assert!((aod / camp.drops[3].total_power_mw() - 1.0).abs() < 1e-12);

        let summary = read_summary_json(&dir.path().join(SUMMARY_FILE)).unwrap();
        assert_eq!(summary.master_seed, 77);
        assert_eq!(summary.config_hash, camp.result.provenance.config_hash);
        assert_eq!(summary.metrics["rms_ds_ns"].median, camp.result.median("rms_ds_ns").unwrap());

        let cdf = read_cdf_csv(&dir.path().join(CDF_FILE)).unwrap();
        assert_eq!(cdf.len(), METRICS.len() * crate::campaign::CDF_POINTS);

        let header = fs::read_to_string(dir.path().join(PDP_FILE)).unwrap();
        assert!(header.starts_with("# master_seed=77 config_hash="));
    }

    #[test]
    fn format_selects_files() {
        let (v, camp) = campaign();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_outputs(&camp.result, &camp.drops, &v, dir.path(), OutputFormat::Jsonl).unwrap();
        let names: Vec<_> = files.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
        assert_eq!(names, vec![DROPS_FILE, SUMMARY_FILE]);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = read_pdp_csv(Path::new("/nonexistent/pdp.csv")).unwrap_err();
        assert!(err.to_string().starts_with("/nonexistent/pdp.csv"));
    }
}

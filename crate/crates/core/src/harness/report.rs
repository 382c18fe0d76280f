use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::{Error, Result};

use super::scenario::ExperimentRecord;
use super::sweep::bracket;

pub const SUMMARY_HEADER: [&str; 11] = [
    "preset",
    "alpha",
    "alpha_F",
    "q",
    "verdict",
    "t_blowup",
    "congl_value",
    "chi_residual",
    "lemma34_max",
    "decay_slope",
    "volume_exponent",
];

/// Files written by [`emit_report`].
#[derive(Debug, Clone)]
pub struct ReportFiles {
    pub summary: PathBuf,
    pub records: Vec<PathBuf>,
    pub traces: PathBuf,
    pub timing: PathBuf,
    pub dichotomy: PathBuf,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Record order in every output: `(preset, alpha, amplitude, hash)`.
pub fn sorted(records: &[ExperimentRecord]) -> Vec<&ExperimentRecord> {
    let mut v: Vec<&ExperimentRecord> = records.iter().collect();
    v.sort_by(|a, b| {
        a.preset
            .cmp(&b.preset)
            .then(a.alpha.unwrap_or(f64::NAN).total_cmp(&b.alpha.unwrap_or(f64::NAN)))
            .then(a.amplitude.total_cmp(&b.amplitude))
            .then(a.config_hash.cmp(&b.config_hash))
    });
    v
}

pub fn record_file_name(r: &ExperimentRecord) -> String {
    let alpha = r.alpha.map(|a| format!("{a}")).unwrap_or_else(|| "na".into());
    format!("{}_a{}_{}.json", r.preset, alpha, &r.config_hash[..12])
}

/// Writes `summary.csv`, `records/*.json`, `traces.csv` (long format
/// `preset,alpha,amplitude,config_hash,t,sup`), `dichotomy.csv` and the
/// wall-clock sidecar `timing.csv` into `dir`.
pub fn emit_report(records: &[ExperimentRecord], dir: &Path) -> Result<ReportFiles> {
    if records.is_empty() {
        return Err(Error::invalid("no records to report"));
    }
    let rec_dir = dir.join("records");
    fs::create_dir_all(&rec_dir)?;
    let order = sorted(records);

    let summary = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&summary).map_err(csv_error)?;
    w.write_record(SUMMARY_HEADER).map_err(csv_error)?;
    for r in &order {
        let c = &r.certificates;
        w.write_record([
            r.preset.clone(),
            opt(r.alpha),
            r.alpha_f_value.to_string(),
            r.q.to_string(),
            r.verdict.label().to_string(),
            opt(r.verdict.t_blowup()),
            opt(c.congl.as_ref().map(|g| g.value)),
            opt(c.weissler.as_ref().and_then(|s| s.chi_residual)),
            opt(c.lemma34.as_ref().map(|l| l.max_value)),
            opt(r.diagnostics.decay.as_ref().map(|d| d.slope)),
            opt(r.diagnostics.volume.as_ref().map(|v| v.exponent)),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;

    let mut paths = Vec::with_capacity(order.len());
    for r in &order {
        let path = rec_dir.join(record_file_name(r));
        let mut json = serde_json::to_string_pretty(r)?;
        json.push('\n');
        fs::write(&path, json)?;
        paths.push(path);
    }

    let traces = dir.join("traces.csv");
    let mut w = csv::Writer::from_path(&traces).map_err(csv_error)?;
    w.write_record(["preset", "alpha", "amplitude", "config_hash", "t", "sup"])
        .map_err(csv_error)?;
    for r in &order {
        for (t, s) in &r.trace {
            w.write_record([
                r.preset.clone(),
                opt(r.alpha),
                r.amplitude.to_string(),
                r.config_hash.clone(),
                t.to_string(),
                s.to_string(),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;

    let timing = dir.join("timing.csv");
    let mut w = csv::Writer::from_path(&timing).map_err(csv_error)?;
    w.write_record(["config_hash", "wall_clock_s"]).map_err(csv_error)?;
    for r in &order {
        w.write_record([r.config_hash.clone(), format!("{:.3}", r.wall_clock)])
            .map_err(csv_error)?;
    }
    w.flush()?;

    let dichotomy = dir.join("dichotomy.csv");
    let mut w = csv::Writer::from_path(&dichotomy).map_err(csv_error)?;
    w.write_record(["preset", "alpha", "amplitude", "verdict", "alpha_F_side"])
        .map_err(csv_error)?;
    for r in &order {
        let side = match r.alpha {
            Some(a) if a < r.alpha_f_value => "below",
            Some(a) if a > r.alpha_f_value => "above",
            Some(_) => "at",
            None => "",
        };
        w.write_record([
            r.preset.clone(),
            opt(r.alpha),
            r.amplitude.to_string(),
            r.verdict.label().to_string(),
            side.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    drop(w);
    let line = match bracket(&order) {
        Some(b) => format!(
            "# bracket [{}, {}] monotone={} contains_alpha_F={}",
            b.lower(),
            b.upper(),
            b.monotone,
            b.contains(order[0].alpha_f_value)
        ),
        None => "# bracket none: a single verdict kind".to_string(),
    };
    let mut file = fs::OpenOptions::new().append(true).open(&dichotomy)?;
    writeln!(file, "{line}")?;

    Ok(ReportFiles {
        summary,
        records: paths,
        traces,
        timing,
        dichotomy,
    })
}

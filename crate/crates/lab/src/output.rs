//! Report writers.
//!
//! Floats use the shortest representation that reparses exactly, in both JSON
//! and CSV, so identical runs give byte-identical files. CSV uses `,`
//! delimiters, `.` decimals, a header row and LF line endings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{OutputConfig, OutputFormat};
use crate::scenarios::ScenarioReport;
use crate::{LabError, Result};

pub const REPORT_FILE: &str = "report.json";
pub const ESTIMATES_FILE: &str = "estimates.csv";

pub fn spectrum_file(trial: usize) -> String {
    format!("spectrum_{trial}.csv")
}

/// Pretty-printed JSON report with a trailing newline.
pub fn report_json(report: &ScenarioReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}

/// `trial,algorithm,angle_index,angle_deg,level_db`, one row per estimate.
/// `level_db` is empty when levels could not be fitted.
pub fn estimates_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("trial,algorithm,angle_index,angle_deg,level_db\n");
    for t in &report.trials {
        for o in &t.outcomes {
            if o.status != crate::scenarios::OutcomeStatus::Ok {
                continue;
            }
            for (i, a) in o.angles_deg.iter().enumerate() {
                let level = o
                    .levels_db
                    .as_ref()
                    .and_then(|l| l.get(i))
                    .map(|l| format!("{l:?}"))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{:?},{}",
                    t.trial,
                    o.algorithm.as_str(),
                    i,
                    a,
                    level
                );
            }
        }
    }
    out
}

/// MUSIC spectrum of one trial as `angle_deg,power_db`, if it was computed.
pub fn spectrum_csv(report: &ScenarioReport, trial: usize) -> Option<String> {
    let spectrum = report
        .trials
        .get(trial)?
        .outcomes
        .iter()
        .find_map(|o| o.spectrum.as_ref())?;
    let mut out = String::from("angle_deg,power_db\n");
    for (a, p) in spectrum.angles_deg.iter().zip(&spectrum.power_db) {
        let _ = writeln!(out, "{a:?},{p:?}");
    }
    Some(out)
}

/// Write the requested files into `dir`. On failure every file written by
/// this call is removed again, and so is `dir` if this call created it.
pub fn write_outputs(
    report: &ScenarioReport,
    dir: &Path,
    controls: &OutputConfig,
) -> Result<Vec<PathBuf>> {
    let created_dir = !dir.exists();
    let mut written = Vec::new();
    let result = write_all(report, dir, controls, &mut written);
    if result.is_err() {
        for p in &written {
            let _ = fs::remove_file(p);
        }
        if created_dir {
            let _ = fs::remove_dir(dir);
        }
    }
    result.map(|()| written)
}

fn write_all(
    report: &ScenarioReport,
    dir: &Path,
    controls: &OutputConfig,
    written: &mut Vec<PathBuf>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| LabError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        written.push(path.clone());
        fs::write(&path, body).map_err(|source| LabError::Io { path, source })
    };
    if controls.formats.contains(&OutputFormat::Json) {
        put(REPORT_FILE.to_string(), report_json(report))?;
    }
    if controls.formats.contains(&OutputFormat::Csv) {
        put(ESTIMATES_FILE.to_string(), estimates_csv(report))?;
    }
    if controls.dump_spectrum {
        for t in 0..report.trials.len() {
            if let Some(body) = spectrum_csv(report, t) {
                put(spectrum_file(t), body)?;
            }
        }
    }
    Ok(())
}

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::{CliError, CliResult};

/// A number rounded to 12 significant digits and printed in its shortest form.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{r}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("cannot write {}: {e}", path.display()))
}

/// Writes a numeric table. `None` cells are left empty.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.map(sig12).unwrap_or_default()))
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// `region.csv` -> `region.csv.<suffix>`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

/// Everything needed to reproduce a run. Written next to each artifact.
#[derive(Serialize)]
pub struct RunMetadata<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'a str,
    pub started_at: String,
    pub wall_clock_seconds: f64,
    pub common: &'a crate::config::Common,
    pub config: &'a C,
    pub tolerances: serde_json::Value,
    pub results: R,
}

pub struct Clock {
    start: Instant,
    started_at: String,
}

impl Clock {
    pub fn start() -> Self {
        Clock {
            start: Instant::now(),
            started_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn finish<C: Serialize, R: Serialize>(
        self,
        out: &Path,
        subcommand: &str,
        common: &crate::config::Common,
        config: &C,
        tolerances: serde_json::Value,
        results: R,
    ) -> CliResult<()> {
        let meta = RunMetadata {
            tool: "wiretap",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            started_at: self.started_at,
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
            common,
            config,
            tolerances,
            results,
        };
        write_json(&sidecar(out, "meta.json"), &meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.9762358149587071), "0.976235814959");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-2.5e-7), "-0.00000025");
        assert_eq!(sig12(123456789012345.0), "123456789012000");
    }

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar(Path::new("a/b.csv"), "meta.json"), PathBuf::from("a/b.csv.meta.json"));
    }
}

//! CSV and JSON writers. Every file starts with the run header; floats are
//! written with 17 significant digits so identical configs give identical bytes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round-trip float text: `d.dddddddddddddddde±x`, or `NaN`/`inf`/`-inf`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub hbar: u8,
    pub engine: String,
    pub config_sha256: String,
    pub config: RunConfig,
    /// Command-specific metadata in insertion order.
    pub extra: Vec<(String, String)>,
}

impl Header {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            hbar: 1,
            engine: cfg.engine().name().to_string(),
            config_sha256: cfg.hash(),
            config: cfg.clone(),
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.extra.push((key.into(), value.to_string()));
        self
    }

    fn write_block(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "# {} {}", self.tool, self.version)?;
        writeln!(w, "# hbar = {}", self.hbar)?;
        writeln!(w, "# engine = {}", self.engine)?;
        writeln!(w, "# config_sha256 = {}", self.config_sha256)?;
        for line in self.config.canonical().lines() {
            writeln!(w, "# config: {line}")?;
        }
        for (k, v) in &self.extra {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(path: &Path, header: Option<&Header>, columns: &[&str]) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut buf = BufWriter::new(file);
        if let Some(h) = header {
            h.write_block(&mut buf).map_err(|e| CliError::io(path, e))?;
        }
        let mut writer = csv::Writer::from_writer(buf);
        if !columns.is_empty() {
            writer.write_record(columns).map_err(|e| csv_err(path, e))?;
        }
        Ok(Self { path: path.to_path_buf(), writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| csv_err(&self.path, e))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

/// Writes `{"header": …, <body fields>}` as pretty JSON.
pub fn write_json<T: Serialize>(path: &Path, header: &Header, body: &T) -> Result<PathBuf, CliError> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        header: &'a Header,
        #[serde(flatten)]
        body: &'a T,
    }
    let mut text = serde_json::to_string_pretty(&Doc { header, body }).map_err(|e| CliError::io(path, e.into()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Standalone matplotlib script plotting `y_columns` against `x_column` of
/// `data` (a file in the same directory). Returns the script path.
pub fn write_plot_script(
    dir: &Path,
    data: &str,
    x_column: &str,
    y_columns: &[&str],
    group_column: Option<&str>,
) -> Result<PathBuf, CliError> {
    let stem = data.trim_end_matches(".csv");
    let path = dir.join(format!("plot_{stem}.py"));
    let ys = y_columns.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(", ");
    let group = group_column.map_or("None".to_string(), |g| format!("{g:?}"));
    let script = format!(
        r##"#!/usr/bin/env python3
# Plots {data}; the CSV is the source of truth.
import csv
import os
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
X, YS, GROUP = {x_column:?}, [{ys}], {group}

with open(os.path.join(HERE, {data:?})) as f:
    rows = list(csv.DictReader(line for line in f if not line.startswith("#")))

groups = {{}}
for r in rows:
    groups.setdefault(r[GROUP] if GROUP else "", []).append(r)

fig, ax = plt.subplots()
for name, rs in groups.items():
    for y in YS:
        label = f"{{name}} {{y}}".strip()
        ax.plot([float(r[X]) for r in rs], [float(r[y]) for r in rs], label=label)
ax.set_xlabel(X)
ax.legend()
fig.savefig(os.path.join(HERE, {png:?}), dpi=150)
"##,
        png = format!("{stem}.png"),
    );
    std::fs::write(&path, script).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_starts_with_header_block() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let h = Header::new(&RunConfig::default()).with("D", 0.01);
        let mut out = CsvOut::create(&path, Some(&h), &["t", "v"]).unwrap();
        out.row([fmt_f64(0.0), fmt_f64(1.0)]).unwrap();
        out.finish().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("# kitaev {VERSION}"));
        assert_eq!(lines.next().unwrap(), "# hbar = 1");
        assert!(text.contains(&format!("# config_sha256 = {}", RunConfig::default().hash())));
        assert!(text.contains("# D = 0.01\nt,v\n0.0000000000000000e0,1.0000000000000000e0\n"));
    }
}

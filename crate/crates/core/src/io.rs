//! File formats: state and point JSON files, run manifests, amplitude-grid CSV and
//! the bundled table of reference values.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorana::MajoranaPoints;
use crate::state::{BlochPoint, SymmetricState};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance record embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub version: String,
    pub rng_seed: u64,
    /// Only recorded on request so that repeated runs stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, rng_seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config,
            version: VERSION.to_string(),
            rng_seed,
            wall_time_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub amps: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl StateFile {
    pub fn from_state(state: &SymmetricState, manifest: Option<RunManifest>) -> Self {
        Self {
            n: state.n(),
            amps: state.amps().iter().map(|a| [a.re, a.im]).collect(),
            manifest,
        }
    }

    /// The state, normalized. The amplitude count must be `n + 1`.
    pub fn to_state(&self) -> Result<SymmetricState> {
        if self.amps.len() != self.n + 1 {
            return Err(Error::Parse(format!(
                "expected {} amplitudes for n = {}, found {}",
                self.n + 1,
                self.n,
                self.amps.len()
            )));
        }
        if self.amps.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite amplitude".into()));
        }
        let amps = self.amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        SymmetricState::new(amps)?.normalize()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointsFile {
    pub n: usize,
    /// `[theta, phi]` in radians.
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl PointsFile {
    pub fn from_points(points: &[BlochPoint], manifest: Option<RunManifest>) -> Self {
        Self {
            n: points.len(),
            points: points.iter().map(|p| [p.theta(), p.phi()]).collect(),
            manifest,
        }
    }

    pub fn to_points(&self) -> Result<MajoranaPoints> {
        if self.points.len() != self.n {
            return Err(Error::Parse(format!(
                "expected {} points, found {}",
                self.n,
                self.points.len()
            )));
        }
        if self.points.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parse("non-finite angle".into()));
        }
        MajoranaPoints::new(self.points.iter().map(|[t, p]| BlochPoint::new(*t, *p)).collect())
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<SymmetricState> {
    read_json::<StateFile>(path)?.to_state()
}

pub fn read_points(path: &Path) -> Result<MajoranaPoints> {
    read_json::<PointsFile>(path)?.to_points()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Location of the manifest written next to a CSV file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

/// A float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with header `theta,phi,f`, one row per grid node in row-major order.
pub fn grid_csv(rows: &[[f64; 3]]) -> String {
    let mut out = String::from("theta,phi,f\n");
    for [t, p, f] in rows {
        out.push_str(&format!("{},{},{}\n", fmt_f64(*t), fmt_f64(*p), fmt_f64(*f)));
    }
    out
}

pub fn parse_grid_csv(text: &str) -> Result<Vec<[f64; 3]>> {
    let mut lines = text.lines();
    if lines.next() != Some("theta,phi,f") {
        return Err(Error::Parse("missing grid header".into()));
    }
    lines
        .map(|line| {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{line}: {e}")))
                })
                .collect::<Result<_>>()?;
            match vals[..] {
                [t, p, f] => Ok([t, p, f]),
                _ => Err(Error::Parse(format!("expected three columns: {line}"))),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableColumn {
    Dicke,
    Positive,
    General,
    Upper,
}

impl TableColumn {
    pub fn name(self) -> &'static str {
        match self {
            TableColumn::Dicke => "dicke",
            TableColumn::Positive => "positive",
            TableColumn::General => "general",
            TableColumn::Upper => "upper",
        }
    }
}

/// How a reference value is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    /// Printed as a closed form.
    Closed,
    /// Printed as a decimal whose closed form is known but not shown.
    Dagger,
    /// Printed as a decimal only.
    Decimal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub n: usize,
    pub column: TableColumn,
    pub value: f64,
    pub exact: Option<String>,
    pub kind: CellKind,
    pub tol: f64,
}

const TABLE_DATA: &str = include_str!("../data/table1.csv");

/// The reference table of maximal entanglement values.
pub fn reference_table() -> Vec<TableCell> {
    TABLE_DATA
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let column = match f[1] {
                "dicke" => TableColumn::Dicke,
                "positive" => TableColumn::Positive,
                "general" => TableColumn::General,
                _ => TableColumn::Upper,
            };
            let kind = match f[4] {
                "closed" => CellKind::Closed,
                "dagger" => CellKind::Dagger,
                _ => CellKind::Decimal,
            };
            TableCell {
                n: f[0].parse().expect("bundled table"),
                column,
                value: f[2].parse().expect("bundled table"),
                exact: (!f[3].is_empty()).then(|| f[3].to_string()),
                kind,
                tol: f[5].parse().expect("bundled table"),
            }
        })
        .collect()
}

pub fn reference_cell(n: usize, column: TableColumn) -> Option<TableCell> {
    reference_table().into_iter().find(|c| c.n == n && c.column == column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_loads() {
        let t = reference_table();
        assert_eq!(t.iter().filter(|c| c.column == TableColumn::Dicke).count(), 11);
        assert_eq!(t.iter().filter(|c| c.column == TableColumn::Positive).count(), 9);
        assert_eq!(t.iter().filter(|c| c.column == TableColumn::General).count(), 3);
        let c = reference_cell(5, TableColumn::Positive).unwrap();
        assert_eq!(c.kind, CellKind::Dagger);
        assert_eq!(c.value, 1.742268948);
    }

    #[test]
    fn state_file_validation() {
        let f = StateFile {
            n: 2,
            amps: vec![[1.0, 0.0], [0.0, 0.0]],
            manifest: None,
        };
        assert!(matches!(f.to_state(), Err(Error::Parse(_))));
        let f = StateFile {
            n: 1,
            amps: vec![[3.0, 0.0], [0.0, 4.0]],
            manifest: None,
        };
        let s = f.to_state().unwrap();
        assert!((s.amp(1).im - 0.8).abs() < 1e-15);
    }

    #[test]
    fn fmt_round_trips() {
        for v in [std::f64::consts::PI, 1.0 / 3.0, 1e-300, -2.5e17] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(
            sidecar_path(Path::new("out/grid.csv")),
            PathBuf::from("out/grid.csv.manifest.json")
        );
    }
}

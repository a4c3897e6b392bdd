//! Deterministic file output: CSV with a `#` provenance line, pretty JSON,
//! each written to a temporary file in the target directory and renamed.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance line carried by every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_fingerprint: String,
    /// Effective contour-jitter seed.
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stack_fingerprint: Option<String>,
}

impl Provenance {
    pub fn new(config_fingerprint: String, seed: u64, stack_fingerprint: Option<u64>) -> Self {
        Self {
            tool: "layermodes",
            version: VERSION,
            config_fingerprint,
            seed,
            stack_fingerprint: stack_fingerprint.map(|f| format!("{f:016x}")),
        }
    }

    fn comment(&self) -> String {
        let mut s = format!("# {} {} config={} seed={}", self.tool, self.version, self.config_fingerprint, self.seed);
        if let Some(f) = &self.stack_fingerprint {
            s.push_str(&format!(" stack={f}"));
        }
        s.push('\n');
        s
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Formats a float for CSV with round-trip precision.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_bytes(&self, prov: &Provenance) -> Result<Vec<u8>, CliError> {
        let mut out = prov.comment().into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path, prov: &Provenance) -> Result<(), CliError> {
        write_atomic(path, &self.to_bytes(prov)?)
    }
}

#[derive(Serialize)]
struct WithProvenance<'a, T: Serialize> {
    provenance: &'a Provenance,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<T: Serialize>(path: &Path, prov: &Provenance, body: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(&WithProvenance { provenance: prov, body })?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

/// Reads a CSV written by [`Table::write`], skipping the provenance line.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(str::to_owned).collect());
    }
    Ok((header, rows))
}

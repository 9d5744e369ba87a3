use std::io::Write;
use std::path::{Path, PathBuf};

use phibp::oracle::{Table, VerificationReport};

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn table_csv(t: &Table) -> Result<Vec<u8>, csv::Error> {
    let mut out = format!("# {}: {}\n", t.name, t.columns.join(", ")).into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.columns)?;
    for row in &t.rows {
        w.write_record(row.iter().map(|c| c.to_string()))?;
    }
    out.extend(w.into_inner().map_err(|e| e.into_error())?);
    Ok(out)
}

/// The JSON report and one CSV per table; returns the written paths.
pub fn emit(report: &VerificationReport, dir: &Path, prefix: &str, task: &str) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let json = serde_json::to_vec_pretty(report).map_err(std::io::Error::other)?;
    let path = dir.join(format!("{prefix}{task}.json"));
    write_atomic(&path, &[json, b"\n".to_vec()].concat())?;
    written.push(path);
    for t in report.all_tables() {
        let path = dir.join(format!("{prefix}{}.csv", t.name));
        write_atomic(&path, &table_csv(&t).map_err(std::io::Error::other)?)?;
        written.push(path);
    }
    Ok(written)
}

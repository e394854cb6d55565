//! JSON report and per-sample CSV output.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::checks::{CheckResult, SampleRow, Status};
use crate::error::OutputError;
use crate::scenario::MotionSpec;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub motion: MotionSpec,
    pub sample_count: usize,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(
        scenario: String,
        seed: u64,
        motion: MotionSpec,
        sample_count: usize,
        checks: Vec<CheckResult>,
    ) -> Report {
        let passed = checks.iter().all(|c| c.status == Status::Pass);
        Report { scenario, seed, motion, sample_count, passed, checks }
    }

    pub fn to_json(&self) -> Result<String, OutputError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json(&self, path: &Path) -> Result<(), OutputError> {
        let json = self.to_json()?;
        create_parent(path)?;
        fs::write(path, json).map_err(|e| OutputError::Io(path.to_path_buf(), e))
    }
}

fn create_parent(path: &Path) -> Result<(), OutputError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            fs::create_dir_all(dir).map_err(|e| OutputError::Io(dir.to_path_buf(), e))
        }
        _ => Ok(()),
    }
}

pub fn write_csv_to<W: Write>(out: W, rows: &[SampleRow]) -> Result<(), OutputError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["check_id", "t", "x1", "x2", "x3", "component", "lhs", "rhs", "abs_err"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv(path: &Path, rows: &[SampleRow]) -> Result<(), OutputError> {
    create_parent(path)?;
    let file = fs::File::create(path).map_err(|e| OutputError::Io(path.to_path_buf(), e))?;
    write_csv_to(std::io::BufWriter::new(file), rows)
}

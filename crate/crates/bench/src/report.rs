use std::io::Write;
use std::path::Path;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    /// A structure disagreed with its reference; nothing was timed.
    #[error("correctness check failed: {0}")]
    Correctness(String),
    #[error("{}: {source}", path.display())]
    Load {
        path: std::path::PathBuf,
        source: learned_index::Error,
    },
    #[error(transparent)]
    Core(#[from] learned_index::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// 2 for correctness failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Correctness(_) => 2,
            _ => 1,
        }
    }
}

/// Writes `rows` as CSV with a header to `out`, or to stdout when `out` is
/// `None`, and optionally the whole `report` as JSON to `json`.
pub fn write_report<R: Serialize, T: Serialize>(
    rows: &[R],
    report: &T,
    out: Option<&Path>,
    json: Option<&Path>,
) -> Result<(), BenchError> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    if let Some(p) = json {
        std::fs::write(p, serde_json::to_string_pretty(report)?)?;
    }
    Ok(())
}

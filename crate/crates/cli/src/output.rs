use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const EXIT_SELFTEST: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub msg: String,
}

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            msg: msg.into(),
        }
    }

    pub fn io(path: Option<&Path>, err: impl std::fmt::Display) -> Self {
        let msg = match path {
            Some(p) => format!("{}: {err}", p.display()),
            None => err.to_string(),
        };
        Failure { code: EXIT_IO, msg }
    }

    /// Invalid parameters map to 2, everything a fit can run into to 3.
    pub fn from_core(err: &tlincomb::Error) -> Self {
        use tlincomb::Error;
        let code = match err {
            Error::InvalidParameter(_) | Error::UnsupportedK(_) => EXIT_INVALID,
            _ => EXIT_INFEASIBLE,
        };
        Failure {
            code,
            msg: format!("{}: {err}", err.name()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

pub fn json<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::io(None, e))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn csv<T: Serialize>(rows: &[T]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::io(None, e))?;
    }
    w.into_inner().map_err(|e| Failure::io(None, e))
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::io(Some(p), e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|()| out.flush())
                .map_err(|e| Failure::io(None, e))
        }
    }
}

/// `runs/k.csv` -> `runs/k.<suffix>.json`
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

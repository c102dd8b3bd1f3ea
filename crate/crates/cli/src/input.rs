//! Loading QOP-JSON, QCH-JSON, free-set and channel-set files.

use std::fmt;
use std::path::Path;

use qcont::filtered::{ChannelSetRecord, FreeSetRecord};
use qcont::{
    BipartiteDensityMatrix, ChannelRecord, ChannelSet, DensityMatrix, Error, FreeSet,
    HermitianOperator, OperatorRecord, QuantumChannel,
};

/// A failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalFailure(_)
            | Error::ToleranceNotReached { .. }
            | Error::InfeasibleCenter
            | Error::SaturationFailure(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Prefixes library errors with the offending path.
fn at(path: &Path, e: Error) -> Failure {
    match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn operator_record(path: &Path) -> Result<OperatorRecord, Failure> {
    OperatorRecord::parse(&read(path)?).map_err(|e| at(path, e))
}

pub fn operator(path: &Path) -> Result<HermitianOperator, Failure> {
    operator_record(path)?
        .to_operator()
        .map_err(|e| at(path, e))
}

pub fn density(path: &Path) -> Result<DensityMatrix, Failure> {
    operator_record(path)?.to_density().map_err(|e| at(path, e))
}

/// Bipartite state; `da`/`db` fill in dimensions the file leaves out.
pub fn bipartite(
    path: &Path,
    da: Option<usize>,
    db: Option<usize>,
) -> Result<BipartiteDensityMatrix, Failure> {
    let mut rec = operator_record(path)?;
    rec.da = rec.da.or(da);
    rec.db = rec.db.or(db);
    if rec.da.is_none() || rec.db.is_none() {
        return Err(Failure::Input(format!(
            "{}: bipartite input needs \"dA\" and \"dB\" (or --dA/--dB)",
            path.display()
        )));
    }
    rec.to_bipartite().map_err(|e| at(path, e))
}

pub fn channel(path: &Path) -> Result<QuantumChannel, Failure> {
    ChannelRecord::parse(&read(path)?)
        .and_then(|r| r.to_channel())
        .map_err(|e| at(path, e))
}

pub fn free_set(path: &Path) -> Result<FreeSet, Failure> {
    FreeSetRecord::parse(&read(path)?)
        .and_then(|r| r.to_free_set())
        .map_err(|e| at(path, e))
}

pub fn channel_set(path: &Path) -> Result<ChannelSet, Failure> {
    ChannelSetRecord::parse(&read(path)?)
        .and_then(|r| r.to_channel_set())
        .map_err(|e| at(path, e))
}

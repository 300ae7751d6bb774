//! Verification driver: runs the suites of numerical and symbolic checks
//! over a configured Hamiltonian and writes reports and data files.

pub mod config;
pub mod report;
pub mod suites;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub use config::{ConfigError, Prepared, RunConfig};
pub use report::{Report, Row, Status};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Dynamics,
    Kvn,
    Pathint,
    Coherent,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Identities, Suite::Dynamics, Suite::Kvn, Suite::Pathint, Suite::Coherent];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Dynamics => "dynamics",
            Suite::Kvn => "kvn",
            Suite::Pathint => "pathint",
            Suite::Coherent => "coherent",
        }
    }
}

/// Where a suite writes its data files.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Output { dir: dir.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn writer(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.path(name);
        let f = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        Ok(BufWriter::new(f))
    }

    pub fn write_string(&self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.path(name);
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

/// Runs the suites in order and writes `report.json` and `report.csv`.
pub fn run(prep: &Prepared, suites: &[Suite]) -> Result<Report, CliError> {
    let out = Output::create(&prep.config.output.dir)?;
    let mut report = Report::default();
    for &s in suites {
        log::info!("running {}", s.name());
        let r = match s {
            Suite::Identities => suites::identities::run(prep),
            Suite::Dynamics => suites::dynamics::run(prep, &out)?,
            Suite::Kvn => suites::kvn::run(prep, &out)?,
            Suite::Pathint => suites::pathint::run(prep, &out)?,
            Suite::Coherent => suites::coherent::run(prep, &out)?,
        };
        report.extend(r);
    }
    out.write_string("report.json", &report.to_json())?;
    out.write_string("report.csv", &report.to_csv())?;
    Ok(report)
}

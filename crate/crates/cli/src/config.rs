use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use supertime::symexpr::parse_hamiltonian;
use supertime::Poly;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("hamiltonian `{text}`: {message}")]
    Hamiltonian { text: String, message: String },
    #[error("`{0}` must be positive and finite")]
    NotPositive(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Polynomial in `q1..qn, p1..pn`.
    pub hamiltonian: String,
    /// Degrees of freedom; inferred from the Hamiltonian when absent.
    pub dof: Option<usize>,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            hamiltonian: "p1^2/2 + q1^2/2".into(),
            dof: None,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitiesConfig {
    /// Random Hamiltonians per `n ∈ {1, 2}`.
    pub random_hamiltonians: usize,
    pub max_degree: u32,
    pub terms: usize,
    /// Weight sets per `(n, m)` and per Hermiticity class.
    pub ordering_samples: usize,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        IdentitiesConfig {
            random_hamiltonians: 10,
            max_degree: 4,
            terms: 5,
            ordering_samples: 50,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub dt: f64,
    /// Flow time for the configured Hamiltonian.
    pub t: f64,
    /// Flow time for the built-in pendulum checks.
    pub pendulum_t: f64,
    /// Finite-difference step of the Jacobi check; halved for the ratio.
    pub jacobi_h: f64,
    /// Mollifier width of the kernel mass check.
    pub sigma: f64,
    /// Record every `stride`-th step.
    pub stride: usize,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            dt: 1e-3,
            t: 2.0 * std::f64::consts::PI,
            pendulum_t: 5.0,
            jacobi_h: 1e-4,
            sigma: 0.3,
            stride: 100,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct KvnConfig {
    /// Points per axis, a power of two.
    pub grid: usize,
    /// The grid covers `[−half_width, half_width]²`.
    pub half_width: f64,
    pub centre: [f64; 2],
    pub width: f64,
    pub dt: f64,
    /// Evolution time in oscillator periods `2π`.
    pub periods: f64,
    /// Write binary grid dumps.
    pub dumps: bool,
}

impl Default for KvnConfig {
    fn default() -> Self {
        KvnConfig {
            grid: 256,
            half_width: 8.0,
            centre: [2.0, 0.0],
            width: 0.5,
            dt: 2e-3,
            periods: 1.0,
            dumps: true,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathintConfig {
    pub hbar: f64,
    pub t: f64,
    pub q0: f64,
    pub q1: f64,
    /// Slice counts of the convergence table, each double the previous.
    pub ladder: Vec<usize>,
    /// Slices of the coarse Dyson-Schwinger run; the fine run doubles it.
    pub ds_slices: usize,
    /// Slices of the Fourier consistency check.
    pub fourier_slices: usize,
}

impl Default for PathintConfig {
    fn default() -> Self {
        PathintConfig {
            hbar: 1.0,
            t: 1.0,
            q0: 0.0,
            q1: 1.0,
            ladder: vec![8, 16, 32, 64, 128],
            ds_slices: 100,
            fourier_slices: 64,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherentConfig {
    /// Fock levels per mode.
    pub dim: usize,
    /// `[re, im]`
    pub z: [f64; 2],
    /// Second mode of the classical pair.
    pub z_p: [f64; 2],
}

impl Default for CoherentConfig {
    fn default() -> Self {
        CoherentConfig {
            dim: 32,
            z: [1.0, 0.0],
            z_p: [-0.6, 0.8],
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into() }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub identities: IdentitiesConfig,
    pub dynamics: DynamicsConfig,
    pub kvn: KvnConfig,
    pub pathint: PathintConfig,
    pub coherent: CoherentConfig,
    pub output: OutputConfig,
}

/// A validated configuration with its parsed Hamiltonian.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub config: RunConfig,
    pub hamiltonian: Poly,
    pub dof: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn prepare(self) -> Result<Prepared, ConfigError> {
        let (hamiltonian, dof) =
            parse_hamiltonian(&self.system.hamiltonian, self.system.dof).map_err(|e| ConfigError::Hamiltonian {
                text: self.system.hamiltonian.clone(),
                message: e.to_string(),
            })?;
        self.validate()?;
        Ok(Prepared {
            config: self,
            hamiltonian,
            dof,
        })
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("dynamics.dt", self.dynamics.dt),
            ("dynamics.t", self.dynamics.t),
            ("dynamics.pendulum_t", self.dynamics.pendulum_t),
            ("dynamics.jacobi_h", self.dynamics.jacobi_h),
            ("dynamics.sigma", self.dynamics.sigma),
            ("kvn.half_width", self.kvn.half_width),
            ("kvn.width", self.kvn.width),
            ("kvn.dt", self.kvn.dt),
            ("kvn.periods", self.kvn.periods),
            ("pathint.hbar", self.pathint.hbar),
            ("pathint.t", self.pathint.t),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::NotPositive(name));
            }
        }
        let counts = [
            ("dynamics.stride", self.dynamics.stride),
            ("identities.random_hamiltonians", self.identities.random_hamiltonians),
            ("identities.terms", self.identities.terms),
            ("identities.ordering_samples", self.identities.ordering_samples),
            ("pathint.ds_slices", self.pathint.ds_slices),
            ("pathint.fourier_slices", self.pathint.fourier_slices),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(ConfigError::NotPositive(name));
            }
        }
        if !self.kvn.grid.is_power_of_two() || self.kvn.grid < 8 {
            return Err(ConfigError::Invalid(format!("kvn.grid = {} must be a power of two ≥ 8", self.kvn.grid)));
        }
        let ladder = &self.pathint.ladder;
        if ladder.len() < 2 || ladder[0] == 0 || ladder.windows(2).any(|w| w[1] != 2 * w[0]) {
            return Err(ConfigError::Invalid("pathint.ladder must double at every step".into()));
        }
        if self.coherent.dim < 8 {
            return Err(ConfigError::Invalid(format!("coherent.dim = {} is below 8", self.coherent.dim)));
        }
        if self.system.dof == Some(0) {
            return Err(ConfigError::NotPositive("system.dof"));
        }
        Ok(())
    }
}

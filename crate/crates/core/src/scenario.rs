//! Declarative scenario files.
//!
//! A scenario is a TOML document with a table of named baths and exactly one
//! machine section:
//!
//! * `[spectrum]` — evaluate one bath's rates, local temperature and
//!   passivity over a frequency grid;
//! * `[tls]` — a phase-modulated two-level machine solved in closed form;
//! * `[floquet]` — a general periodically driven system handled by the
//!   monodromy pipeline.
//!
//! Tabulated coupling spectra or profiles live in two-column side files
//! referenced by paths relative to the scenario file. [`LoadedScenario`]
//! hashes the scenario text together with every referenced table, so output
//! files can cite the exact inputs that produced them.
//!
//! ```toml
//! [baths.cold]
//! kind = "thermal"
//! temperature = 0.5
//! coupling = { kind = "band", strength = 1.0, lo = 8.0, hi = 9.5 }
//!
//! [tls]
//! omega0 = 10.0
//! baths = ["cold"]
//! modulation = { kind = "weights", omega = 1.3, weights = [[-1, 0.5], [1, 0.5]] }
//! ```

use std::collections::BTreeSet;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bath::{BaseCoupling, BathError, BathModel, Profile, Table};
use crate::floquet::{BathCoupling, FloquetError, FloquetMachine, PeriodicHamiltonian};
use crate::linalg::{CMat, C64};
use crate::modulation::{Modulation, ModulationError};
use crate::tls::{EngineError, TlsMachine};

/// Errors from parsing, loading or instantiating a scenario.
#[derive(Debug, Error)]
pub enum ScenarioError {
    /// A scenario or table file could not be read.
    #[error("failed to read {path}: {message}")]
    Io { path: PathBuf, message: String },
    /// The TOML text does not match the schema.
    #[error("scenario parse error: {0}")]
    Parse(String),
    /// Not exactly one of `[spectrum]`, `[tls]`, `[floquet]`.
    #[error("scenario must contain exactly one machine section ([spectrum], [tls] or [floquet]), found {found}")]
    MachineCount { found: usize },
    /// A machine section references a bath label that is not declared.
    #[error("scenario references undeclared bath {0:?}")]
    UnknownBath(String),
    /// A structurally invalid field (bad grid, ragged matrix, …).
    #[error("{0}")]
    Invalid(String),
    /// The requested machine section is absent.
    #[error("scenario has no [{0}] section")]
    WrongKind(&'static str),
    #[error(transparent)]
    Bath(#[from] BathError),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Floquet(#[from] FloquetError),
}

/// Complex matrix literal: rows of `[re, im]` pairs.
pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

/// Bath description mirroring [`BathModel`], with tabulated data replaced by
/// file references.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BathSpec {
    /// Equilibrium bath at `temperature`.
    Thermal {
        temperature: f64,
        coupling: CouplingSpec,
    },
    /// Bath specified by its mean occupation profile.
    Population {
        occupation: ProfileSpec,
        coupling: CouplingSpec,
    },
    /// Another bath seen through a passive transmission filter.
    Filtered {
        transmission: ProfileSpec,
        inner: Box<BathSpec>,
    },
    /// Vacuum displaced to `intensity(ω)` mean quanta.
    Displaced {
        intensity: ProfileSpec,
        coupling: CouplingSpec,
    },
    /// Thermal bath squeezed with profile `squeeze(ω)`.
    SqueezedThermal {
        temperature: f64,
        squeeze: ProfileSpec,
        coupling: CouplingSpec,
    },
    /// Independent baths acting in parallel.
    Composite { parts: Vec<BathSpec> },
}

/// Coupling-spectrum description mirroring [`BaseCoupling`].
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    Flat { strength: f64 },
    PowerLaw { strength: f64, exponent: f64 },
    Band { strength: f64, lo: f64, hi: f64 },
    Table { path: PathBuf },
}

/// Frequency-profile description mirroring [`Profile`].
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Constant {
        value: f64,
    },
    Notch {
        lo: f64,
        hi: f64,
        inside: f64,
        outside: f64,
    },
    Table {
        path: PathBuf,
    },
}

/// Uniform frequency grid, endpoints included.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    /// Materialise the grid points.
    pub fn points(&self) -> Result<Vec<f64>, ScenarioError> {
        if self.count < 2 {
            return Err(ScenarioError::Invalid(format!(
                "grid needs at least two points, got {}",
                self.count
            )));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start <= 0.0 {
            return Err(ScenarioError::Invalid(format!(
                "grid endpoints must be finite and positive, got [{}, {}]",
                self.start, self.stop
            )));
        }
        if self.stop <= self.start {
            return Err(ScenarioError::Invalid(format!(
                "grid stop {} must exceed start {}",
                self.stop, self.start
            )));
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect())
    }
}

/// `[spectrum]`: tabulate one bath over a grid.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub bath: String,
    pub grid: GridSpec,
}

/// Modulation description for the two-level machine.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulationSpec {
    /// Unmodulated: all weight on the carrier. `omega` still sets the
    /// harmonic spacing used for reporting.
    None { omega: f64 },
    /// Explicit harmonic weights `[[q, P_q], …]`.
    Weights { omega: f64, weights: Vec<(i32, f64)> },
    /// Sinusoidal phase `φ(t) = depth · sin(Ω t)`, sampled at `samples`
    /// points per period (power of two).
    Sine {
        omega: f64,
        depth: f64,
        samples: usize,
    },
}

impl ModulationSpec {
    fn build(&self) -> Result<Modulation, ModulationError> {
        match self {
            ModulationSpec::None { omega } => Modulation::unmodulated(*omega),
            ModulationSpec::Weights { omega, weights } => {
                Modulation::from_weights(*omega, weights)
            }
            ModulationSpec::Sine {
                omega,
                depth,
                samples,
            } => {
                let depth = *depth;
                let omega = *omega;
                Modulation::from_phase(omega, move |t| depth * (omega * t).sin(), *samples)
            }
        }
    }
}

/// `[tls]`: a phase-modulated two-level machine.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TlsSpec {
    pub omega0: f64,
    pub baths: Vec<String>,
    pub modulation: ModulationSpec,
}

/// One harmonic of the Hamiltonian: `H_m` enters as `H_m e^{-imΩt} + h.c.`
/// for `m > 0`; `H_0` must be hermitian.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub harmonic: i32,
    pub matrix: MatrixSpec,
}

/// One system–bath coupling: hermitian operator plus the bath it talks to.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetCouplingSpec {
    pub bath: String,
    pub operator: MatrixSpec,
}

/// `[floquet]`: a general periodically driven machine.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloquetSpec {
    /// Drive frequency Ω.
    pub omega: f64,
    /// Samples per period for the propagation (power of two).
    pub samples: usize,
    /// Half-width of the harmonic window kept around each carrier.
    pub q_max: u32,
    pub terms: Vec<TermSpec>,
    pub couplings: Vec<FloquetCouplingSpec>,
}

/// Numerical parameters of a `[floquet]` run, separate from the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FloquetRun {
    pub samples: usize,
    pub q_max: u32,
}

/// Which machine section a scenario contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineKind {
    Spectrum,
    Tls,
    Floquet,
}

/// Parsed scenario document, prior to touching any side files.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Free-form description, echoed into output headers.
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub baths: BTreeMap<String, BathSpec>,
    #[serde(default)]
    pub spectrum: Option<SpectrumSpec>,
    #[serde(default)]
    pub tls: Option<TlsSpec>,
    #[serde(default)]
    pub floquet: Option<FloquetSpec>,
}

impl Scenario {
    /// Parse a scenario from TOML text and check its cross-references.
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Which machine section is present.
    pub fn kind(&self) -> MachineKind {
        if self.spectrum.is_some() {
            MachineKind::Spectrum
        } else if self.tls.is_some() {
            MachineKind::Tls
        } else {
            MachineKind::Floquet
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let found = [
            self.spectrum.is_some(),
            self.tls.is_some(),
            self.floquet.is_some(),
        ]
        .iter()
        .filter(|present| **present)
        .count();
        if found != 1 {
            return Err(ScenarioError::MachineCount { found });
        }
        let mut referenced: Vec<&String> = Vec::new();
        if let Some(spectrum) = &self.spectrum {
            referenced.push(&spectrum.bath);
        }
        if let Some(tls) = &self.tls {
            referenced.extend(tls.baths.iter());
        }
        if let Some(floquet) = &self.floquet {
            referenced.extend(floquet.couplings.iter().map(|c| &c.bath));
        }
        for label in referenced {
            if !self.baths.contains_key(label) {
                return Err(ScenarioError::UnknownBath(label.clone()));
            }
        }
        Ok(())
    }

    /// Paths of every referenced table file, relative to the scenario file,
    /// deduplicated and sorted.
    fn table_paths(&self) -> BTreeSet<PathBuf> {
        let mut paths = BTreeSet::new();
        for spec in self.baths.values() {
            spec.collect_tables(&mut paths);
        }
        paths
    }
}

impl BathSpec {
    fn collect_tables(&self, out: &mut BTreeSet<PathBuf>) {
        match self {
            BathSpec::Thermal { coupling, .. } => coupling.collect_tables(out),
            BathSpec::Population {
                occupation,
                coupling,
            } => {
                occupation.collect_tables(out);
                coupling.collect_tables(out);
            }
            BathSpec::Filtered {
                transmission,
                inner,
            } => {
                transmission.collect_tables(out);
                inner.collect_tables(out);
            }
            BathSpec::Displaced {
                intensity,
                coupling,
            } => {
                intensity.collect_tables(out);
                coupling.collect_tables(out);
            }
            BathSpec::SqueezedThermal {
                squeeze, coupling, ..
            } => {
                squeeze.collect_tables(out);
                coupling.collect_tables(out);
            }
            BathSpec::Composite { parts } => {
                for part in parts {
                    part.collect_tables(out);
                }
            }
        }
    }

    fn build(&self, base: &Path) -> Result<BathModel, ScenarioError> {
        Ok(match self {
            BathSpec::Thermal {
                temperature,
                coupling,
            } => BathModel::Thermal {
                temperature: *temperature,
                coupling: coupling.build(base)?,
            },
            BathSpec::Population {
                occupation,
                coupling,
            } => BathModel::Population {
                occupation: occupation.build(base)?,
                coupling: coupling.build(base)?,
            },
            BathSpec::Filtered {
                transmission,
                inner,
            } => BathModel::Filtered {
                filter: transmission.build(base)?,
                inner: Box::new(inner.build(base)?),
            },
            BathSpec::Displaced {
                intensity,
                coupling,
            } => BathModel::Displaced {
                amplitude_sq: intensity.build(base)?,
                coupling: coupling.build(base)?,
            },
            BathSpec::SqueezedThermal {
                temperature,
                squeeze,
                coupling,
            } => BathModel::SqueezedThermal {
                temperature: *temperature,
                squeeze: squeeze.build(base)?,
                coupling: coupling.build(base)?,
            },
            BathSpec::Composite { parts } => BathModel::Composite(
                parts
                    .iter()
                    .map(|part| part.build(base))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }
}

impl CouplingSpec {
    fn collect_tables(&self, out: &mut BTreeSet<PathBuf>) {
        if let CouplingSpec::Table { path } = self {
            out.insert(path.clone());
        }
    }

    fn build(&self, base: &Path) -> Result<BaseCoupling, ScenarioError> {
        Ok(match self {
            CouplingSpec::Flat { strength } => BaseCoupling::Flat {
                strength: *strength,
            },
            CouplingSpec::PowerLaw { strength, exponent } => BaseCoupling::PowerLaw {
                strength: *strength,
                exponent: *exponent,
            },
            CouplingSpec::Band { strength, lo, hi } => BaseCoupling::Band {
                strength: *strength,
                lo: *lo,
                hi: *hi,
            },
            CouplingSpec::Table { path } => {
                BaseCoupling::Tabulated(Table::from_csv_path(resolve(base, path))?)
            }
        })
    }
}

impl ProfileSpec {
    fn collect_tables(&self, out: &mut BTreeSet<PathBuf>) {
        if let ProfileSpec::Table { path } = self {
            out.insert(path.clone());
        }
    }

    fn build(&self, base: &Path) -> Result<Profile, ScenarioError> {
        Ok(match self {
            ProfileSpec::Constant { value } => Profile::Constant(*value),
            ProfileSpec::Notch {
                lo,
                hi,
                inside,
                outside,
            } => Profile::Notch {
                lo: *lo,
                hi: *hi,
                inside: *inside,
                outside: *outside,
            },
            ProfileSpec::Table { path } => {
                Profile::Tabulated(Table::from_csv_path(resolve(base, path))?)
            }
        })
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn parse_matrix(spec: &MatrixSpec, what: &str) -> Result<CMat, ScenarioError> {
    let n = spec.len();
    if n == 0 {
        return Err(ScenarioError::Invalid(format!("{what}: empty matrix")));
    }
    if let Some(row) = spec.iter().find(|row| row.len() != n) {
        return Err(ScenarioError::Invalid(format!(
            "{what}: matrix must be square, found a row of length {} in a {n}-row matrix",
            row.len()
        )));
    }
    let mut matrix = CMat::zeros(n, n);
    for (i, row) in spec.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(ScenarioError::Invalid(format!(
                    "{what}: entry ({i}, {j}) is not finite"
                )));
            }
            matrix[(i, j)] = C64::new(re, im);
        }
    }
    Ok(matrix)
}

/// Spectrum task ready to run: resolved bath plus grid points.
#[derive(Debug, Clone)]
pub struct SpectrumTask {
    pub label: String,
    pub bath: BathModel,
    pub grid: Vec<f64>,
}

/// A scenario bound to its directory, with all side files hashed.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    scenario: Scenario,
    base_dir: PathBuf,
    hash: String,
}

impl LoadedScenario {
    /// Read and parse a scenario file, then hash it together with every
    /// table file it references.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Self::from_text(&text, base_dir)
    }

    /// As [`LoadedScenario::load`], but from in-memory text plus an explicit
    /// base directory for table references.
    pub fn from_text(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ScenarioError> {
        let base_dir = base_dir.into();
        let scenario = Scenario::from_toml(text)?;
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        for relative in scenario.table_paths() {
            let resolved = resolve(&base_dir, &relative);
            let contents = std::fs::read(&resolved).map_err(|e| ScenarioError::Io {
                path: resolved.clone(),
                message: e.to_string(),
            })?;
            hasher.update(relative.to_string_lossy().as_bytes());
            hasher.update((contents.len() as u64).to_le_bytes());
            hasher.update(&contents);
        }
        let digest = hasher.finalize();
        let mut hash = String::with_capacity(2 * digest.len());
        for byte in digest {
            let _ = write!(hash, "{byte:02x}");
        }
        Ok(LoadedScenario {
            scenario,
            base_dir,
            hash,
        })
    }

    /// The parsed document.
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Which machine section the scenario contains.
    pub fn kind(&self) -> MachineKind {
        self.scenario.kind()
    }

    /// Hex SHA-256 over the scenario text and all referenced tables.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Build one declared bath by label.
    pub fn bath(&self, label: &str) -> Result<BathModel, ScenarioError> {
        let spec = self
            .scenario
            .baths
            .get(label)
            .ok_or_else(|| ScenarioError::UnknownBath(label.to_string()))?;
        let model = spec.build(&self.base_dir)?;
        model.validate()?;
        Ok(model)
    }

    /// Materialise the `[spectrum]` section.
    pub fn spectrum_task(&self) -> Result<SpectrumTask, ScenarioError> {
        let spec = self
            .scenario
            .spectrum
            .as_ref()
            .ok_or(ScenarioError::WrongKind("spectrum"))?;
        Ok(SpectrumTask {
            label: spec.bath.clone(),
            bath: self.bath(&spec.bath)?,
            grid: spec.grid.points()?,
        })
    }

    /// Materialise the `[tls]` section.
    pub fn tls_machine(&self) -> Result<TlsMachine, ScenarioError> {
        let spec = self
            .scenario
            .tls
            .as_ref()
            .ok_or(ScenarioError::WrongKind("tls"))?;
        let modulation = spec.modulation.build()?;
        let baths = spec
            .baths
            .iter()
            .map(|label| Ok((label.clone(), self.bath(label)?)))
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        Ok(TlsMachine::new(spec.omega0, modulation, baths)?)
    }

    /// Materialise the `[floquet]` section.
    pub fn floquet_machine(&self) -> Result<(FloquetMachine, FloquetRun), ScenarioError> {
        let spec = self
            .scenario
            .floquet
            .as_ref()
            .ok_or(ScenarioError::WrongKind("floquet"))?;
        let terms = spec
            .terms
            .iter()
            .map(|term| {
                let label = format!("harmonic {}", term.harmonic);
                Ok((term.harmonic, parse_matrix(&term.matrix, &label)?))
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let hamiltonian = PeriodicHamiltonian::new(spec.omega, terms)?;
        let couplings = spec
            .couplings
            .iter()
            .map(|coupling| {
                let operator =
                    parse_matrix(&coupling.operator, &format!("coupling {:?}", coupling.bath))?;
                Ok(BathCoupling {
                    label: coupling.bath.clone(),
                    operator,
                    bath: self.bath(&coupling.bath)?,
                })
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let machine = FloquetMachine::new(hamiltonian, couplings)?;
        Ok((
            machine,
            FloquetRun {
                samples: spec.samples,
                q_max: spec.q_max,
            },
        ))
    }
}

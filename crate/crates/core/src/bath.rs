//! Bath coupling spectra and frequency-local thermodynamics.
//!
//! A bath enters the reduced dynamics only through its coupling spectrum
//! `G(ω)`: the rate of quanta emitted into the system at frequency `ω > 0`
//! and absorbed from it at `ω < 0`. Internally every model is represented by
//! two non-negative functions of `ω > 0`,
//!
//! * `spontaneous(ω)` — the vacuum part, and
//! * `absorption(ω)` — the stimulated part `G(−ω)`,
//!
//! with `G(ω) = spontaneous(ω) + absorption(ω)`. This makes the detailed
//! balance inequality `G(ω) ≥ G(−ω)` structural and lets the Boltzmann-like
//! exponent `ln[G(ω)/G(−ω)] = ln(1 + spontaneous/absorption)` be evaluated
//! with `ln_1p` to full relative precision even deep in the Rayleigh–Jeans
//! regime `ω ≪ T` where the two rates almost coincide.
//!
//! Each frequency defines a local temperature `T_B(ω) = ω / exponent(ω)`.
//! A bath is *passive* when `ω/T_B(ω)` is non-decreasing: no periodically
//! modulated machine can extract work from it. [`BathModel::classify_passivity`]
//! searches a frequency grid for an inversion witness, and
//! [`filter_threshold`] gives the exact transmission below which a filtered
//! thermal bath becomes non-passive for a given pair of machine frequencies.

use std::path::Path;

use thiserror::Error;

/// Errors from bath model evaluation and construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BathError {
    /// Coupling spectra are defined for non-zero finite frequencies only.
    #[error("frequency must be finite and non-zero, got {0}")]
    InvalidFrequency(f64),
    /// Both emission and absorption vanish: no channel exists at this
    /// frequency and its local temperature is undefined.
    #[error("no coupling at ω = {omega}: emission and absorption both vanish")]
    UndefinedChannel { omega: f64 },
    /// A tabulated function was evaluated outside its grid.
    #[error("value {value} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    /// Structural problem with a model definition.
    #[error("invalid bath model: {0}")]
    InvalidModel(String),
    /// Invalid argument to a spectral helper.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A tabulated data file could not be read or parsed.
    #[error("failed to load table: {0}")]
    TableLoad(String),
}

/// Linearly interpolated table of a real function on a strictly increasing
/// grid. Evaluation outside the grid is an error, never an extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Table {
    /// Build a table from `(x, y)` pairs. Requires at least two points with
    /// finite values and strictly increasing `x`.
    pub fn new(points: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, BathError> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if xs.len() < 2 {
            return Err(BathError::InvalidModel(
                "table needs at least two points".into(),
            ));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(BathError::InvalidModel(
                "table entries must be finite".into(),
            ));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BathError::InvalidModel(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Table { xs, ys })
    }

    /// Parse a two-column table from text: one `x y` pair per line, separated
    /// by whitespace and/or a comma; `#` starts a comment; blank lines are
    /// skipped.
    pub fn from_csv_str(text: &str) -> Result<Self, BathError> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((head, _)) => head,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            if fields.len() != 2 {
                return Err(BathError::TableLoad(format!(
                    "line {}: expected two columns, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let x: f64 = fields[0].parse().map_err(|e| {
                BathError::TableLoad(format!("line {}: bad number {:?}: {e}", lineno + 1, fields[0]))
            })?;
            let y: f64 = fields[1].parse().map_err(|e| {
                BathError::TableLoad(format!("line {}: bad number {:?}: {e}", lineno + 1, fields[1]))
            })?;
            points.push((x, y));
        }
        Table::new(points)
    }

    /// Load a two-column table file, as in [`Table::from_csv_str`].
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, BathError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| BathError::TableLoad(format!("{}: {e}", path.display())))?;
        Table::from_csv_str(&text)
    }

    /// Interpolate at `x`.
    pub fn eval(&self, x: f64) -> Result<f64, BathError> {
        let (lo, hi) = self.range();
        if !x.is_finite() || x < lo || x > hi {
            return Err(BathError::OutOfRange { value: x, lo, hi });
        }
        let idx = match self.xs.binary_search_by(|probe| probe.total_cmp(&x)) {
            Ok(i) => return Ok(self.ys[i]),
            Err(i) => i,
        };
        // x lies strictly between xs[idx−1] and xs[idx].
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let (y0, y1) = (self.ys[idx - 1], self.ys[idx]);
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Covered abscissa range `(min, max)`.
    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().expect("non-empty table"))
    }

    /// Largest tabulated value (the maximum of the interpolant).
    pub fn max_value(&self) -> f64 {
        self.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest tabulated value.
    pub fn min_value(&self) -> f64 {
        self.ys.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Frequency dependence of the bare system–bath coupling `g(ω) ≥ 0`,
/// evaluated at `ω > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseCoupling {
    /// Frequency-independent coupling.
    Flat { strength: f64 },
    /// `strength · ω^exponent` (e.g. Ohmic for exponent 1).
    PowerLaw { strength: f64, exponent: f64 },
    /// Constant inside the window `[lo, hi]`, zero outside.
    Band { strength: f64, lo: f64, hi: f64 },
    /// Arbitrary tabulated coupling.
    Tabulated(Table),
}

impl BaseCoupling {
    fn validate(&self) -> Result<(), BathError> {
        match self {
            BaseCoupling::Flat { strength } => require_non_negative(*strength, "coupling strength"),
            BaseCoupling::PowerLaw { strength, exponent } => {
                require_non_negative(*strength, "coupling strength")?;
                if !exponent.is_finite() {
                    return Err(BathError::InvalidModel(
                        "power-law exponent must be finite".into(),
                    ));
                }
                Ok(())
            }
            BaseCoupling::Band { strength, lo, hi } => {
                require_non_negative(*strength, "coupling strength")?;
                if !(lo.is_finite() && hi.is_finite() && *lo >= 0.0 && lo < hi) {
                    return Err(BathError::InvalidModel(format!(
                        "band window [{lo}, {hi}] must satisfy 0 ≤ lo < hi"
                    )));
                }
                Ok(())
            }
            BaseCoupling::Tabulated(table) => {
                if table.min_value() < 0.0 {
                    return Err(BathError::InvalidModel(
                        "tabulated coupling must be non-negative".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    fn eval(&self, omega: f64) -> Result<f64, BathError> {
        match self {
            BaseCoupling::Flat { strength } => Ok(*strength),
            BaseCoupling::PowerLaw { strength, exponent } => Ok(strength * omega.powf(*exponent)),
            BaseCoupling::Band { strength, lo, hi } => {
                Ok(if omega >= *lo && omega <= *hi {
                    *strength
                } else {
                    0.0
                })
            }
            BaseCoupling::Tabulated(table) => table.eval(omega),
        }
    }
}

/// A non-negative frequency profile, used for occupations, filter
/// transmissions, displacement intensities and squeezing strengths.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Frequency-independent value.
    Constant(f64),
    /// `inside` on `[lo, hi]`, `outside` elsewhere.
    Notch {
        lo: f64,
        hi: f64,
        inside: f64,
        outside: f64,
    },
    /// Arbitrary tabulated profile.
    Tabulated(Table),
}

impl Profile {
    fn validate(&self, what: &str) -> Result<(), BathError> {
        match self {
            Profile::Constant(v) => require_non_negative(*v, what),
            Profile::Notch {
                lo,
                hi,
                inside,
                outside,
            } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(BathError::InvalidModel(format!(
                        "{what}: notch window [{lo}, {hi}] must satisfy lo < hi"
                    )));
                }
                require_non_negative(*inside, what)?;
                require_non_negative(*outside, what)
            }
            Profile::Tabulated(table) => {
                if table.min_value() < 0.0 {
                    return Err(BathError::InvalidModel(format!(
                        "{what}: tabulated profile must be non-negative"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Evaluate the profile at `ω`.
    pub fn eval(&self, omega: f64) -> Result<f64, BathError> {
        match self {
            Profile::Constant(v) => Ok(*v),
            Profile::Notch {
                lo,
                hi,
                inside,
                outside,
            } => Ok(if omega >= *lo && omega <= *hi {
                *inside
            } else {
                *outside
            }),
            Profile::Tabulated(table) => table.eval(omega),
        }
    }

    /// Upper bound of the profile over its domain.
    pub fn max_value(&self) -> f64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Notch {
                inside, outside, ..
            } => inside.max(*outside),
            Profile::Tabulated(table) => table.max_value(),
        }
    }
}

/// A stationary bath, reduced to its coupling spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum BathModel {
    /// Equilibrium bath at `temperature` with Bose-distributed occupation.
    Thermal {
        temperature: f64,
        coupling: BaseCoupling,
    },
    /// Bath specified directly by its mean occupation `n(ω)`.
    Population {
        occupation: Profile,
        coupling: BaseCoupling,
    },
    /// Another bath seen through a passive filter of transmission
    /// `λ(ω) ∈ [0, 1]`: absorption is attenuated, spontaneous emission is not.
    Filtered {
        filter: Profile,
        inner: Box<BathModel>,
    },
    /// Vacuum displaced by a coherent amplitude with intensity
    /// `|z(ω)|² = amplitude_sq(ω)` quanta.
    Displaced {
        amplitude_sq: Profile,
        coupling: BaseCoupling,
    },
    /// Thermal bath squeezed with strength `r(ω)`; the thermal occupation
    /// `n_T` is replaced by `n_T + (2 n_T + 1) sinh² r`.
    SqueezedThermal {
        temperature: f64,
        squeeze: Profile,
        coupling: BaseCoupling,
    },
    /// Independent baths acting in parallel: rates add.
    Composite(Vec<BathModel>),
}

impl BathModel {
    /// Convenience constructor: flat-coupled equilibrium bath.
    pub fn thermal(temperature: f64, strength: f64) -> Self {
        BathModel::Thermal {
            temperature,
            coupling: BaseCoupling::Flat { strength },
        }
    }

    /// Convenience constructor: equilibrium bath coupled only inside a band.
    pub fn thermal_band(temperature: f64, strength: f64, lo: f64, hi: f64) -> Self {
        BathModel::Thermal {
            temperature,
            coupling: BaseCoupling::Band { strength, lo, hi },
        }
    }

    /// Check structural validity (positive temperatures, non-negative
    /// couplings and profiles, filter transmission at most one, non-empty
    /// composites), recursively.
    pub fn validate(&self) -> Result<(), BathError> {
        match self {
            BathModel::Thermal {
                temperature,
                coupling,
            } => {
                require_positive(*temperature, "temperature")?;
                coupling.validate()
            }
            BathModel::Population {
                occupation,
                coupling,
            } => {
                occupation.validate("occupation")?;
                coupling.validate()
            }
            BathModel::Filtered { filter, inner } => {
                filter.validate("filter transmission")?;
                if filter.max_value() > 1.0 + 1e-12 {
                    return Err(BathError::InvalidModel(format!(
                        "filter transmission exceeds one (max {})",
                        filter.max_value()
                    )));
                }
                inner.validate()
            }
            BathModel::Displaced {
                amplitude_sq,
                coupling,
            } => {
                amplitude_sq.validate("displacement intensity")?;
                coupling.validate()
            }
            BathModel::SqueezedThermal {
                temperature,
                squeeze,
                coupling,
            } => {
                require_positive(*temperature, "temperature")?;
                squeeze.validate("squeezing strength")?;
                coupling.validate()
            }
            BathModel::Composite(parts) => {
                if parts.is_empty() {
                    return Err(BathError::InvalidModel(
                        "composite bath needs at least one component".into(),
                    ));
                }
                parts.iter().try_for_each(BathModel::validate)
            }
        }
    }

    /// Spontaneous (vacuum) rate at `ω > 0`.
    pub fn spontaneous(&self, omega: f64) -> Result<f64, BathError> {
        require_positive_frequency(omega)?;
        match self {
            BathModel::Thermal { coupling, .. }
            | BathModel::Population { coupling, .. }
            | BathModel::Displaced { coupling, .. }
            | BathModel::SqueezedThermal { coupling, .. } => coupling.eval(omega),
            // A passive filter attenuates the field arriving from the bath,
            // not the system's own spontaneous emission into it.
            BathModel::Filtered { inner, .. } => inner.spontaneous(omega),
            BathModel::Composite(parts) => parts
                .iter()
                .map(|p| p.spontaneous(omega))
                .try_fold(0.0, |acc, r| r.map(|v| acc + v)),
        }
    }

    /// Stimulated absorption rate `G(−ω)` at `ω > 0`.
    pub fn absorption(&self, omega: f64) -> Result<f64, BathError> {
        require_positive_frequency(omega)?;
        match self {
            BathModel::Thermal {
                temperature,
                coupling,
            } => Ok(coupling.eval(omega)? * bose_occupation(omega / temperature)),
            BathModel::Population {
                occupation,
                coupling,
            } => Ok(coupling.eval(omega)? * occupation.eval(omega)?),
            BathModel::Filtered { filter, inner } => {
                Ok(filter.eval(omega)? * inner.absorption(omega)?)
            }
            BathModel::Displaced {
                amplitude_sq,
                coupling,
            } => Ok(coupling.eval(omega)? * amplitude_sq.eval(omega)?),
            BathModel::SqueezedThermal {
                temperature,
                squeeze,
                coupling,
            } => {
                let n_thermal = bose_occupation(omega / temperature);
                let sh = squeeze.eval(omega)?.sinh();
                Ok(coupling.eval(omega)? * (n_thermal + (2.0 * n_thermal + 1.0) * sh * sh))
            }
            BathModel::Composite(parts) => parts
                .iter()
                .map(|p| p.absorption(omega))
                .try_fold(0.0, |acc, r| r.map(|v| acc + v)),
        }
    }

    /// Coupling spectrum at signed frequency: emission `G(ω)` for `ω > 0`,
    /// absorption `G(ω) = G(−|ω|)` for `ω < 0`. Zero frequency is an error.
    pub fn coupling_spectrum(&self, omega: f64) -> Result<f64, BathError> {
        if !omega.is_finite() || omega == 0.0 {
            return Err(BathError::InvalidFrequency(omega));
        }
        if omega > 0.0 {
            Ok(self.spontaneous(omega)? + self.absorption(omega)?)
        } else {
            self.absorption(-omega)
        }
    }

    /// Boltzmann-like exponent `x(ω) = ln[G(ω)/G(−ω)]` at `ω > 0`.
    ///
    /// Evaluated as `ln(1 + spontaneous/absorption)` so the result keeps full
    /// relative precision when the two rates nearly coincide (`ω ≪ T_B`).
    /// Returns `+∞` when absorption vanishes but spontaneous emission does
    /// not (an effectively zero-temperature channel), and
    /// [`BathError::UndefinedChannel`] when both vanish.
    pub fn boltzmann_exponent(&self, omega: f64) -> Result<f64, BathError> {
        let spontaneous = self.spontaneous(omega)?;
        let absorption = self.absorption(omega)?;
        if absorption > 0.0 {
            Ok((spontaneous / absorption).ln_1p())
        } else if spontaneous > 0.0 {
            Ok(f64::INFINITY)
        } else {
            Err(BathError::UndefinedChannel { omega })
        }
    }

    /// Frequency-local temperature `T_B(ω) = ω / x(ω)` at `ω > 0`.
    /// An infinite exponent maps to `T_B = 0`, a vanishing one to `+∞`.
    pub fn local_temperature(&self, omega: f64) -> Result<f64, BathError> {
        let exponent = self.boltzmann_exponent(omega)?;
        if exponent.is_infinite() {
            Ok(0.0)
        } else {
            Ok(omega / exponent)
        }
    }

    /// Inverse local temperature `x(ω)/ω` at `ω > 0` (may be `+∞`).
    pub fn inverse_local_temperature(&self, omega: f64) -> Result<f64, BathError> {
        Ok(self.boltzmann_exponent(omega)? / omega)
    }

    /// Central-difference derivative of the exponent,
    /// `f(ω) = d/dω [ω / T_B(ω)]`, with step `max(1e−6·ω, 1e−9)` unless one
    /// is supplied. Non-decreasing `ω/T_B` (i.e. `f ≥ 0` everywhere) is the
    /// passivity criterion. The result may be `±∞` next to a dark band.
    pub fn passivity_function(&self, omega: f64, step: Option<f64>) -> Result<f64, BathError> {
        require_positive_frequency(omega)?;
        let h = step.unwrap_or_else(|| (1e-6 * omega).max(1e-9));
        if !(h > 0.0) || omega - h <= 0.0 {
            return Err(BathError::InvalidArgument(format!(
                "difference step {h} invalid at ω = {omega}"
            )));
        }
        let upper = self.boltzmann_exponent(omega + h)?;
        let lower = self.boltzmann_exponent(omega - h)?;
        Ok((upper - lower) / (2.0 * h))
    }

    /// Search a frequency grid for a passivity violation.
    ///
    /// The grid is sorted and deduplicated first. The bath is reported
    /// [`PassivityVerdict::NonPassive`] iff the exponent `x(ω)` strictly
    /// decreases between some grid pair beyond a `1e−12` relative tolerance;
    /// the witness is the first such pair in frequency order. Evaluation
    /// errors (dark channels, table range misses) yield
    /// [`PassivityVerdict::Indeterminate`].
    pub fn classify_passivity(&self, grid: &[f64]) -> PassivityVerdict {
        let mut omegas: Vec<f64> = grid
            .iter()
            .copied()
            .filter(|w| w.is_finite() && *w > 0.0)
            .collect();
        omegas.sort_by(f64::total_cmp);
        omegas.dedup();
        if omegas.len() < 2 {
            return PassivityVerdict::Indeterminate {
                reason: "grid needs at least two positive frequencies".into(),
            };
        }
        let mut exponents = Vec::with_capacity(omegas.len());
        for &w in &omegas {
            match self.boltzmann_exponent(w) {
                Ok(x) if !x.is_nan() => exponents.push(x),
                Ok(_) => {
                    return PassivityVerdict::Indeterminate {
                        reason: format!("exponent undefined at ω = {w}"),
                    }
                }
                Err(e) => {
                    return PassivityVerdict::Indeterminate {
                        reason: format!("ω = {w}: {e}"),
                    }
                }
            }
        }
        for i in 0..omegas.len() {
            for j in (i + 1)..omegas.len() {
                let (xi, xj) = (exponents[i], exponents[j]);
                let decrease = if xi.is_infinite() && xj.is_infinite() {
                    false
                } else if xi.is_infinite() {
                    true
                } else if xj.is_infinite() {
                    false
                } else {
                    xi - xj > 1e-12 * xi.abs().max(xj.abs())
                };
                if decrease {
                    return PassivityVerdict::NonPassive {
                        omega_low: omegas[i],
                        omega_high: omegas[j],
                    };
                }
            }
        }
        PassivityVerdict::Passive
    }
}

/// Outcome of a grid-based passivity scan.
#[derive(Debug, Clone, PartialEq)]
pub enum PassivityVerdict {
    /// The exponent `ω/T_B` was non-decreasing across the whole grid.
    Passive,
    /// Witness pair with inverted exponents: the machine frequencies
    /// `ω_lo = omega_low`, `ω_hi = omega_high` admit work extraction.
    NonPassive { omega_low: f64, omega_high: f64 },
    /// The scan could not be completed.
    Indeterminate { reason: String },
}

/// Bose–Einstein occupation `n(x) = 1/(e^x − 1)` for `x = ω/T > 0`,
/// via `exp_m1` for precision at small `x`.
pub fn bose_occupation(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Critical transmission `λ*` of a uniform filter on a thermal bath at
/// `t_eq`, for a machine exchanging quanta at `omega_lo < omega_hi`:
/// transmissions strictly below `λ*` invert the local-temperature order of
/// the two frequencies and permit work extraction; above it the filtered
/// bath remains passive for this pair.
///
/// `λ* = (e^{ω_lo/T} − 1)/(e^{ω_hi/T} − 1)`, evaluated in log space when the
/// exponentials overflow.
pub fn filter_threshold(t_eq: f64, omega_hi: f64, omega_lo: f64) -> Result<f64, BathError> {
    let (x_lo, x_hi) = filter_arguments(t_eq, omega_hi, omega_lo)?;
    if x_hi < 700.0 {
        Ok(x_lo.exp_m1() / x_hi.exp_m1())
    } else {
        // λ* = exp[(x_lo − x_hi) + ln(1 − e^{−x_lo}) − ln(1 − e^{−x_hi})]
        let ln_lambda =
            (x_lo - x_hi) + (-(-x_lo).exp_m1()).ln() - (-(-x_hi).exp_m1()).ln();
        Ok(ln_lambda.exp())
    }
}

/// Largest uniform filter deviation `D = 1 − λ` that keeps a filtered
/// thermal bath passive for the frequency pair `(omega_lo, omega_hi)`:
/// work extraction requires `D > n(ω_hi/T)·(e^{ω_hi/T} − e^{ω_lo/T})`,
/// which equals `1 − λ*`.
pub fn work_deviation_bound(t_eq: f64, omega_hi: f64, omega_lo: f64) -> Result<f64, BathError> {
    let (x_lo, x_hi) = filter_arguments(t_eq, omega_hi, omega_lo)?;
    // n(x_hi)(e^{x_hi} − e^{x_lo}) = (1 − e^{x_lo − x_hi})/(1 − e^{−x_hi})
    Ok((x_lo - x_hi).exp_m1() / (-x_hi).exp_m1())
}

/// Whether a uniform filter deviation `D = 1 − λ` admits work extraction
/// from a filtered thermal bath for the machine pair `(omega_lo, omega_hi)`,
/// i.e. whether `D` strictly exceeds [`work_deviation_bound`].
pub fn deviation_admits_work(
    t_eq: f64,
    omega_hi: f64,
    omega_lo: f64,
    deviation: f64,
) -> Result<bool, BathError> {
    if !deviation.is_finite() {
        return Err(BathError::InvalidArgument(format!(
            "filter deviation must be finite, got {deviation}"
        )));
    }
    Ok(deviation > work_deviation_bound(t_eq, omega_hi, omega_lo)?)
}

fn filter_arguments(t_eq: f64, omega_hi: f64, omega_lo: f64) -> Result<(f64, f64), BathError> {
    require_positive(t_eq, "temperature").map_err(model_to_argument)?;
    if !(omega_lo.is_finite() && omega_hi.is_finite() && 0.0 < omega_lo && omega_lo < omega_hi) {
        return Err(BathError::InvalidArgument(format!(
            "need 0 < ω_lo < ω_hi, got ω_lo = {omega_lo}, ω_hi = {omega_hi}"
        )));
    }
    Ok((omega_lo / t_eq, omega_hi / t_eq))
}

fn model_to_argument(e: BathError) -> BathError {
    match e {
        BathError::InvalidModel(msg) => BathError::InvalidArgument(msg),
        other => other,
    }
}

fn require_positive_frequency(omega: f64) -> Result<(), BathError> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(BathError::InvalidFrequency(omega))
    }
}

fn require_positive(value: f64, what: &str) -> Result<(), BathError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(BathError::InvalidModel(format!(
            "{what} must be positive and finite, got {value}"
        )))
    }
}

fn require_non_negative(value: f64, what: &str) -> Result<(), BathError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(BathError::InvalidModel(format!(
            "{what} must be non-negative and finite, got {value}"
        )))
    }
}

//! Flux-weighted effective temperatures and the transport efficiency bound.
//!
//! A machine exchanging quanta with several spectral channels behaves, for
//! bookkeeping purposes, like a two-reservoir engine: channels currently
//! feeding energy in form the "hot" side, channels draining energy the
//! "cold" side, and each side gets an effective inverse temperature equal to
//! the flux-weighted average of the local inverse temperatures. The ratio of
//! those averages bounds the efficiency exactly as in the two-bath case.

/// A single channel's contribution to the balance: its net current into the
/// system and the local inverse temperature at its frequency.
#[derive(Debug, Clone, Copy)]
pub struct CurrentEntry {
    /// Net quantum current into the system (positive = heating).
    pub current: f64,
    /// Inverse temperature of the bath at the channel frequency. May be
    /// `+∞` (empty bath), zero (infinite temperature) or negative
    /// (inverted bath).
    pub inv_temperature: f64,
}

/// Effective two-reservoir picture of a multi-channel current pattern.
#[derive(Debug, Clone, Copy)]
pub struct EffectiveTemperatures {
    /// Total positive current (energy intake).
    pub intake: f64,
    /// Total negative current (energy outflow), reported as a
    /// non-positive number.
    pub outflow: f64,
    /// Flux-weighted inverse temperature of the intake side; NaN when no
    /// channel takes energy in.
    pub inv_t_plus: f64,
    /// Flux-weighted inverse temperature of the outflow side; NaN when no
    /// channel drains energy.
    pub inv_t_minus: f64,
    /// True when either side averages over local inverse temperatures of
    /// opposite signs, which makes the two-reservoir bound meaningless.
    pub mixed_sign: bool,
}

impl EffectiveTemperatures {
    /// Efficiency bound `1 − x⁺/x⁻` of the effective two-reservoir engine,
    /// where `x± = inv_t_±`.
    ///
    /// Returns `None` when either side is undefined, non-positive, or when
    /// the averages mixed signs. An intake side at zero temperature
    /// (`x⁺ = ∞`) bounds the efficiency by `−∞` (no engine can run), while
    /// an outflow side at zero temperature (`x⁻ = ∞`) allows unit
    /// efficiency.
    pub fn carnot_bound(&self) -> Option<f64> {
        if self.mixed_sign {
            return None;
        }
        let (plus, minus) = (self.inv_t_plus, self.inv_t_minus);
        if plus.is_nan() || minus.is_nan() {
            return None;
        }
        if plus <= 0.0 || minus <= 0.0 {
            return None;
        }
        if minus.is_infinite() {
            return Some(1.0);
        }
        if plus.is_infinite() {
            return Some(f64::NEG_INFINITY);
        }
        Some(1.0 - plus / minus)
    }
}

/// Split channel currents into intake and outflow sides and average their
/// inverse temperatures with flux weights. Channels with exactly zero
/// current are ignored.
pub fn effective_temperatures(entries: &[CurrentEntry]) -> EffectiveTemperatures {
    #[derive(Default)]
    struct Side {
        flux: f64,
        weighted: f64,
        pos_infinite: bool,
        neg_infinite: bool,
        saw_positive: bool,
        saw_negative: bool,
    }
    impl Side {
        fn push(&mut self, flux: f64, x: f64) {
            self.flux += flux;
            match (x.is_infinite(), x > 0.0) {
                (true, true) => self.pos_infinite = true,
                (true, false) => self.neg_infinite = true,
                _ => self.weighted += flux * x,
            }
            self.saw_positive |= x > 0.0;
            self.saw_negative |= x < 0.0;
        }
        fn average(&self) -> f64 {
            if self.flux == 0.0 {
                return f64::NAN;
            }
            match (self.pos_infinite, self.neg_infinite) {
                (true, true) => f64::NAN,
                (true, false) => f64::INFINITY,
                (false, true) => f64::NEG_INFINITY,
                (false, false) => self.weighted / self.flux,
            }
        }
    }
    let mut plus = Side::default();
    let mut minus = Side::default();
    for entry in entries {
        let j = entry.current;
        if j == 0.0 {
            continue;
        }
        if j > 0.0 {
            plus.push(j, entry.inv_temperature);
        } else {
            minus.push(j.abs(), entry.inv_temperature);
        }
    }
    EffectiveTemperatures {
        intake: plus.flux,
        outflow: -minus.flux,
        inv_t_plus: plus.average(),
        inv_t_minus: minus.average(),
        mixed_sign: (plus.saw_positive && plus.saw_negative)
            || (minus.saw_positive && minus.saw_negative),
    }
}

/// Entropy current into the system, `Σ J_c · x_c`, skipping idle channels.
pub fn entropy_flow(entries: &[CurrentEntry]) -> f64 {
    entries
        .iter()
        .filter(|e| e.current != 0.0)
        .map(|e| e.current * e.inv_temperature)
        .sum()
}

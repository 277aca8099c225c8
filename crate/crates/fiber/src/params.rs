//! Fiber and link configuration.

use crate::error::FiberError;

/// Speed of light in nm/ps (equivalently nm·THz).
pub(crate) const C_NM_PER_PS: f64 = 299_792.458;

/// Physical parameters of one fiber span and the split-step resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberParams {
    pub alpha_db_per_km: f64,
    pub dispersion_ps_per_nm_km: f64,
    pub gamma_per_w_km: f64,
    pub span_length_km: f64,
    /// Upper bound on the split-step size; the span is divided into equal
    /// steps no longer than this.
    pub step_size_km: f64,
    pub carrier_wavelength_nm: f64,
}

impl FiberParams {
    /// Standard single-mode fiber at 1550 nm with 75 km spans.
    pub fn standard_smf() -> Self {
        Self {
            alpha_db_per_km: 0.21,
            dispersion_ps_per_nm_km: 16.9,
            gamma_per_w_km: 1.31,
            span_length_km: 75.0,
            step_size_km: 0.1,
            carrier_wavelength_nm: 1550.0,
        }
    }

    /// Group-velocity dispersion β₂ = −D·λ²/(2πc), in ps²/km.
    pub fn beta2_ps2_per_km(&self) -> f64 {
        let lambda = self.carrier_wavelength_nm;
        -self.dispersion_ps_per_nm_km * lambda * lambda
            / (2.0 * std::f64::consts::PI * C_NM_PER_PS)
    }

    /// Optical carrier frequency c/λ in THz.
    pub fn center_frequency_thz(&self) -> f64 {
        C_NM_PER_PS / self.carrier_wavelength_nm
    }

    pub fn validate(&self) -> Result<(), FiberError> {
        // Zero loss, zero nonlinearity, and zero (or negative) dispersion are
        // all physically meaningful limits; only the geometry must be positive.
        for (name, v) in [
            ("span_length_km", self.span_length_km),
            ("step_size_km", self.step_size_km),
            ("carrier_wavelength_nm", self.carrier_wavelength_nm),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(FiberError::InvalidParam(format!(
                    "{name} must be positive (got {v})"
                )));
            }
        }
        for (name, v) in [
            ("alpha_db_per_km", self.alpha_db_per_km),
            ("gamma_per_w_km", self.gamma_per_w_km),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(FiberError::InvalidParam(format!(
                    "{name} must be non-negative (got {v})"
                )));
            }
        }
        if !self.dispersion_ps_per_nm_km.is_finite() {
            return Err(FiberError::InvalidParam(format!(
                "dispersion_ps_per_nm_km must be finite (got {})",
                self.dispersion_ps_per_nm_km
            )));
        }
        if self.step_size_km > self.span_length_km {
            return Err(FiberError::InvalidParam(format!(
                "step size {} km exceeds span length {} km",
                self.step_size_km, self.span_length_km
            )));
        }
        Ok(())
    }
}

/// WDM link layout, launch condition, and simulation sizing.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub n_channels: usize,
    pub symbol_rate_gbd: f64,
    pub channel_spacing_ghz: f64,
    pub rrc_rolloff: f64,
    pub n_spans: usize,
    pub launch_power_per_channel_dbm: f64,
    pub edfa_noise_figure_db: f64,
    /// Samples per symbol; 0 selects the smallest power of two that covers
    /// the WDM band without aliasing.
    pub samples_per_symbol: usize,
    pub n_symbols_per_channel: usize,
    pub rng_seed: u64,
}

impl LinkConfig {
    /// Small grid for quick studies: 3 channels, 2¹² symbols, 10 spans.
    pub fn desk_scale(launch_power_per_channel_dbm: f64) -> Self {
        Self {
            n_channels: 3,
            symbol_rate_gbd: 41.79,
            channel_spacing_ghz: 50.0,
            rrc_rolloff: 0.1,
            n_spans: 10,
            launch_power_per_channel_dbm,
            edfa_noise_figure_db: 5.0,
            samples_per_symbol: 0,
            n_symbols_per_channel: 1 << 12,
            rng_seed: 1,
        }
    }

    /// Full-size grid: 11 channels, 2¹⁶ symbols, 90 spans of 75 km.
    pub fn full_scale(launch_power_per_channel_dbm: f64) -> Self {
        Self {
            n_channels: 11,
            n_spans: 90,
            n_symbols_per_channel: 1 << 16,
            ..Self::desk_scale(launch_power_per_channel_dbm)
        }
    }

    /// Bandwidth the sampled composite must cover, in GHz: the outermost
    /// carriers plus one RRC-shaped channel width.
    pub fn required_band_ghz(&self) -> f64 {
        (self.n_channels as f64 - 1.0) * self.channel_spacing_ghz
            + self.symbol_rate_gbd * (1.0 + self.rrc_rolloff)
    }

    /// Samples per symbol actually used: the configured value, or the
    /// smallest power of two covering the WDM band when set to 0.
    pub fn resolved_sps(&self) -> Result<usize, FiberError> {
        let need = self.required_band_ghz();
        if self.samples_per_symbol == 0 {
            let mut sps = 1usize;
            while (sps as f64) * self.symbol_rate_gbd < need {
                sps = sps.checked_mul(2).ok_or_else(|| {
                    FiberError::InvalidParam("WDM band too wide to sample".into())
                })?;
            }
            return Ok(sps);
        }
        let have = self.samples_per_symbol as f64 * self.symbol_rate_gbd;
        if have < need {
            return Err(FiberError::Aliasing {
                required_ghz: need,
                available_ghz: have,
            });
        }
        Ok(self.samples_per_symbol)
    }

    /// Composite sample rate in THz.
    pub fn sample_rate_thz(&self) -> Result<f64, FiberError> {
        Ok(self.resolved_sps()? as f64 * self.symbol_rate_gbd * 1e-3)
    }

    /// Index of the channel-of-interest in the middle of the grid.
    pub fn center_channel(&self) -> usize {
        self.n_channels / 2
    }

    /// Carrier offset of `channel` from the composite center, in channel
    /// spacings (half-integer for even grids).
    pub fn channel_offset(&self, channel: usize) -> f64 {
        channel as f64 - (self.n_channels as f64 - 1.0) / 2.0
    }

    pub fn validate(&self) -> Result<(), FiberError> {
        if self.n_channels == 0 {
            return Err(FiberError::InvalidParam("n_channels must be ≥ 1".into()));
        }
        if !(self.symbol_rate_gbd > 0.0) || !(self.channel_spacing_ghz > 0.0) {
            return Err(FiberError::InvalidParam(
                "symbol rate and channel spacing must be positive".into(),
            ));
        }
        if !(self.rrc_rolloff > 0.0 && self.rrc_rolloff <= 1.0) {
            return Err(FiberError::InvalidParam(format!(
                "rrc_rolloff {} outside (0, 1]",
                self.rrc_rolloff
            )));
        }
        if !self.n_symbols_per_channel.is_power_of_two() {
            return Err(FiberError::InvalidParam(format!(
                "n_symbols_per_channel {} is not a power of two",
                self.n_symbols_per_channel
            )));
        }
        if !self.launch_power_per_channel_dbm.is_finite()
            || !self.edfa_noise_figure_db.is_finite()
        {
            return Err(FiberError::InvalidParam(
                "launch power and noise figure must be finite".into(),
            ));
        }
        self.resolved_sps().map(|_| ())
    }
}

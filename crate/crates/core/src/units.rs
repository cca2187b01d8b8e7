//! Unit system and material parameters.
//!
//! Everything runs in nm / fs / eV / V with the elementary charge q = 1, so a
//! potential of 1 V contributes 1 eV to the electron energy. With femtosecond
//! times the reduced Planck constant is hbar = 0.6582 eV fs.

use crate::error::{Error, Result};

/// Reduced Planck constant, eV fs.
pub const HBAR_EV_FS: f64 = 0.6582;

/// Electron rest energy, eV (CODATA).
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.95;

/// Speed of light, nm/fs (CODATA, exact).
pub const SPEED_OF_LIGHT_NM_FS: f64 = 299.792_458;

/// GaAs effective-mass ratio used throughout the experiments.
pub const DEFAULT_M_STAR_REL: f64 = 0.067;

/// GaAs non-parabolicity factor, eV^-1.
pub const DEFAULT_ALPHA_EV_INV: f64 = 0.242;

/// Bare electron mass in eV fs^2 / nm^2.
pub fn electron_mass() -> f64 {
    ELECTRON_REST_ENERGY_EV / (SPEED_OF_LIGHT_NM_FS * SPEED_OF_LIGHT_NM_FS)
}

/// Material parameters with every derived constant the solver needs.
///
/// Immutable after construction; `alpha == 0` describes an exactly parabolic
/// band, in which case `k_max` and `e_max` are reported as `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Reduced Planck constant, eV fs.
    pub hbar: f64,
    /// Effective mass, eV fs^2 / nm^2.
    pub m_star: f64,
    /// Dimensionless effective-mass ratio m*/m_e.
    pub m_star_rel: f64,
    /// Non-parabolicity factor, eV^-1.
    pub alpha: f64,
    /// Quartic coefficient a = -hbar^4 alpha / (4 m*^2), eV nm^4 (<= 0).
    pub a_coeff: f64,
    /// hbar^2 / (2 m*), eV nm^2 (> 0).
    pub b_coeff: f64,
    /// Zone-edge wave number sqrt(2 m*/alpha)/hbar, nm^-1 (+inf if alpha = 0).
    pub k_max: f64,
    /// Band maximum 1/(4 alpha), eV (+inf if alpha = 0).
    pub e_max: f64,
}

impl MaterialParams {
    /// Default GaAs parameters.
    pub fn gaas() -> Self {
        derive_material(DEFAULT_M_STAR_REL, DEFAULT_ALPHA_EV_INV, HBAR_EV_FS)
            .expect("default parameters are valid")
    }

    /// Wave number at which the quartic band reaches its maximum, k_max / sqrt(2).
    pub fn k_crit(&self) -> f64 {
        self.k_max / std::f64::consts::SQRT_2
    }
}

/// Builds [`MaterialParams`] from the effective-mass ratio, the
/// non-parabolicity factor and the Planck constant.
pub fn derive_material(m_star_rel: f64, alpha: f64, hbar: f64) -> Result<MaterialParams> {
    if !(m_star_rel > 0.0) || !m_star_rel.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "effective-mass ratio must be positive and finite, got {m_star_rel}"
        )));
    }
    if !(hbar > 0.0) || !hbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "hbar must be positive and finite, got {hbar}"
        )));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-parabolicity factor must be non-negative and finite, got {alpha}"
        )));
    }

    let m_star = m_star_rel * electron_mass();
    let b_coeff = hbar * hbar / (2.0 * m_star);
    let a_coeff = -hbar.powi(4) * alpha / (4.0 * m_star * m_star);
    let (k_max, e_max) = if alpha > 0.0 {
        ((2.0 * m_star / alpha).sqrt() / hbar, 1.0 / (4.0 * alpha))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    Ok(MaterialParams {
        hbar,
        m_star,
        m_star_rel,
        alpha,
        a_coeff,
        b_coeff,
        k_max,
        e_max,
    })
}

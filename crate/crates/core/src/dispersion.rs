//! Band dispersion relations and contact wave numbers.
//!
//! The quartic band E(k) = b k^2 + a k^4 (a < 0) admits two k^2 roots per
//! energy, so every contact carries a pair of wave numbers. Propagating
//! branches are taken with positive real part, evanescent and complex
//! branches with positive imaginary part so they decay away from the device.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::MaterialParams;

/// Snap tolerance below which a root is treated as purely real / imaginary.
const SNAP_TOL: f64 = 1e-12;

/// Relative discriminant tolerance for declaring a double root.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Relative tolerance used to match the injected k1 against a quartic root.
const INJECTION_MATCH_TOL: f64 = 1e-8;

/// Which dispersion model drives the solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Second-order effective-mass equation (parabolic band).
    Se2,
    /// Fourth-order equation with the quartic band correction.
    Se4,
}

/// Injection direction: positive momentum enters at x = 0, negative at x = L.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// Contact side for the transmitted pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactSide {
    Right,
    Left,
}

/// Classification of the two k^2 roots at one contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootClassification {
    /// Both k^2 roots positive: two propagating branches.
    TwoPropagating,
    /// Small root negative (W < 0): one evanescent, one propagating branch.
    OnePropagatingOneEvanescent,
    /// Negative discriminant (W > e_max): complex-conjugate k^2 pair.
    ComplexPair,
    /// Double root at the band maximum.
    Degenerate,
}

/// The two k^2 roots of a k^4 + b k^2 - W = 0 at one contact.
#[derive(Debug, Clone, Copy)]
pub struct RegionRoots {
    /// Root (-b + sqrt(D))/(2a); the branch continuous with the parabolic band.
    pub ksq_small: Complex64,
    /// Root (-b - sqrt(D))/(2a); the extra quartic branch.
    pub ksq_large: Complex64,
    /// Discriminant D = b^2 + 4 a W, eV^2.
    pub discriminant: f64,
    pub classification: RootClassification,
}

impl RegionRoots {
    pub fn is_degenerate(&self) -> bool {
        self.classification == RootClassification::Degenerate
    }

    /// Wave numbers (k_small, k_large) with the outgoing branch rule applied.
    pub fn wave_numbers(&self) -> (Complex64, Complex64) {
        (
            branch_wavenumber(self.ksq_small),
            branch_wavenumber(self.ksq_large),
        )
    }
}

/// Full wave-number bookkeeping for one scattering solve (fourth-order model).
#[derive(Debug, Clone, Copy)]
pub struct WaveNumberSet {
    /// Injected wave number, nm^-1 (> 0; the direction is held separately).
    pub k1: f64,
    /// Companion root at the injection contact.
    pub k2: Complex64,
    /// Outgoing-contact roots.
    pub k3: Complex64,
    pub k4: Complex64,
    /// Total eigen-energy, eV.
    pub energy: f64,
    pub degenerate_left: bool,
    pub degenerate_right: bool,
    pub direction: Direction,
}

/// Exact Kane branch: epsilon (1 + alpha epsilon) = hbar^2 k^2 / 2 m*.
///
/// Falls back to the parabolic energy when `alpha == 0`.
pub fn kane_energy(k: f64, mat: &MaterialParams) -> f64 {
    let gamma_sq = mat.b_coeff * k * k;
    if mat.alpha == 0.0 {
        return gamma_sq;
    }
    (-1.0 + (1.0 + 4.0 * mat.alpha * gamma_sq).sqrt()) / (2.0 * mat.alpha)
}

/// Parabolic (effective-mass) energy b k^2.
pub fn parabolic_energy(k: f64, mat: &MaterialParams) -> f64 {
    mat.b_coeff * k * k
}

/// First-order truncation of the Kane band: E(k) = b k^2 + a k^4.
pub fn quartic_energy(k: f64, mat: &MaterialParams) -> f64 {
    let ksq = k * k;
    mat.b_coeff * ksq + mat.a_coeff * ksq * ksq
}

/// Eigen-energy fixed by the injected wave number and the injection contact
/// potential: E = b k1^2 + a k1^4 - qV (fourth order) or E = b k1^2 - qV
/// (second order).
pub fn injection_energy(k1: f64, v_contact: f64, mat: &MaterialParams, model: Model) -> Result<f64> {
    match model {
        Model::Se4 => {
            if !(k1 > 0.0 && k1 < mat.k_max) {
                return Err(Error::OutOfBand {
                    k1,
                    k_max: mat.k_max,
                });
            }
            Ok(quartic_energy(k1, mat) - v_contact)
        }
        Model::Se2 => {
            if !(k1 > 0.0) {
                return Err(Error::OutOfBand {
                    k1,
                    k_max: f64::INFINITY,
                });
            }
            Ok(parabolic_energy(k1, mat) - v_contact)
        }
    }
}

/// Solves a k^4 + b k^2 = W with W = qV + E via the quadratic formula in k^2.
///
/// Uses the default degeneracy tolerance; see [`region_roots_with_tol`].
pub fn region_roots(energy: f64, v_region: f64, mat: &MaterialParams) -> Result<RegionRoots> {
    region_roots_with_tol(energy, v_region, mat, DEGENERACY_TOL)
}

/// [`region_roots`] with an explicit relative tolerance on |D| for the
/// degenerate classification.
pub fn region_roots_with_tol(
    energy: f64,
    v_region: f64,
    mat: &MaterialParams,
    tol_deg: f64,
) -> Result<RegionRoots> {
    if !(mat.alpha > 0.0) {
        return Err(Error::DegenerateEquation {
            a_coeff: mat.a_coeff,
        });
    }
    let a = mat.a_coeff;
    let b = mat.b_coeff;
    let w = v_region + energy;
    let disc = b * b + 4.0 * a * w;

    if disc.abs() <= tol_deg * b * b {
        let ksq = Complex64::new(-b / (2.0 * a), 0.0);
        return Ok(RegionRoots {
            ksq_small: ksq,
            ksq_large: ksq,
            discriminant: disc,
            classification: RootClassification::Degenerate,
        });
    }

    if disc > 0.0 {
        // -b - sqrt(D) never cancels; recover the small root from Vieta's
        // product to stay accurate near W = 0.
        let ksq_large = (-b - disc.sqrt()) / (2.0 * a);
        let ksq_small = (-w / a) / ksq_large;
        let classification = if ksq_small > 0.0 {
            RootClassification::TwoPropagating
        } else {
            RootClassification::OnePropagatingOneEvanescent
        };
        Ok(RegionRoots {
            ksq_small: Complex64::new(ksq_small, 0.0),
            ksq_large: Complex64::new(ksq_large, 0.0),
            discriminant: disc,
            classification,
        })
    } else {
        let root = Complex64::new(-b, (-disc).sqrt()) / (2.0 * a);
        Ok(RegionRoots {
            ksq_small: root,
            ksq_large: root.conj(),
            discriminant: disc,
            classification: RootClassification::ComplexPair,
        })
    }
}

/// Maps k^2 to the outgoing wave number: real roots with positive real part,
/// evanescent and complex roots with positive imaginary part.
pub fn branch_wavenumber(ksq: Complex64) -> Complex64 {
    let mut k = ksq.sqrt();
    let scale = k.norm();
    if scale == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if k.im.abs() <= SNAP_TOL * scale {
        return Complex64::new(k.re.abs(), 0.0);
    }
    if k.re.abs() <= SNAP_TOL * scale {
        return Complex64::new(0.0, k.im.abs());
    }
    if k.im < 0.0 {
        k = -k;
    }
    k
}

/// Companion wave number at the injection contact: the positive root of the
/// quartic distinct from k1 (equal to k1 with the flag set when degenerate).
pub fn companion_wavenumber(k1: f64, roots: &RegionRoots) -> Result<(Complex64, bool)> {
    if roots.is_degenerate() {
        return Ok((Complex64::new(k1, 0.0), true));
    }
    let k1sq = k1 * k1;
    let scale = k1sq.max(roots.ksq_small.norm()).max(roots.ksq_large.norm());
    let matches_small = (roots.ksq_small - k1sq).norm() <= INJECTION_MATCH_TOL * scale;
    let matches_large = (roots.ksq_large - k1sq).norm() <= INJECTION_MATCH_TOL * scale;
    if matches_small {
        Ok((branch_wavenumber(roots.ksq_large), false))
    } else if matches_large {
        Ok((branch_wavenumber(roots.ksq_small), false))
    } else {
        Err(Error::InconsistentInjection {
            k1,
            ksq_small: roots.ksq_small,
            ksq_large: roots.ksq_large,
        })
    }
}

/// Outgoing pair (k3, k4) at the exit contact. k3 follows the branch
/// continuous with the parabolic band (small |k^2|), k4 the extra quartic
/// branch. The decay rule Im k > 0 selects evanescent waves on either side.
pub fn transmitted_pair(
    energy: f64,
    v_exit: f64,
    mat: &MaterialParams,
    _side: ContactSide,
) -> Result<(Complex64, Complex64)> {
    let roots = region_roots(energy, v_exit, mat)?;
    Ok(roots.wave_numbers())
}

/// Parabolic contact wave number sqrt(W/b) with the same branch rule,
/// used by the second-order pipeline.
pub fn parabolic_wavenumber(energy: f64, v_region: f64, mat: &MaterialParams) -> Complex64 {
    let w = v_region + energy;
    branch_wavenumber(Complex64::new(w / mat.b_coeff, 0.0))
}

/// Plane-wave probability current J0 + J1 = hbar k / m* - alpha hbar^3 k^3 / m*^2.
///
/// Equals the group velocity dE/dk / hbar of the quartic band.
pub fn plane_wave_current(k: f64, mat: &MaterialParams) -> f64 {
    let j0 = mat.hbar * k / mat.m_star;
    let j1 = -mat.alpha * mat.hbar.powi(3) * k.powi(3) / (mat.m_star * mat.m_star);
    j0 + j1
}

/// Assembles the full wave-number set for one fourth-order solve.
pub fn wave_number_set(
    k1: f64,
    v_injection: f64,
    v_exit: f64,
    mat: &MaterialParams,
    direction: Direction,
) -> Result<WaveNumberSet> {
    let energy = injection_energy(k1, v_injection, mat, Model::Se4)?;
    let injection_roots = region_roots(energy, v_injection, mat)?;
    let (k2, degenerate_left) = companion_wavenumber(k1, &injection_roots)?;
    let exit_roots = region_roots(energy, v_exit, mat)?;
    let (k3, k4) = exit_roots.wave_numbers();
    Ok(WaveNumberSet {
        k1,
        k2,
        k3,
        k4,
        energy,
        degenerate_left,
        degenerate_right: exit_roots.is_degenerate(),
        direction,
    })
}

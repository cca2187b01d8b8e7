//! Boundary-value assembly, the scattering solve, the probability current
//! and bias sweeps.
//!
//! The general solution on [0, L] is written over the fundamental basis,
//! psi = sum c_j phi_j, so the boundary rows at x = 0 act on c directly
//! (phi_j^(i)(0) = delta_ij) while rows at x = L combine the basis values
//! there. The 4x4 (or 2x2) system is solved by pivoted LU with a determinant
//! guard implementing the Fredholm-alternative check.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dispersion::{
    injection_energy, parabolic_wavenumber, wave_number_set, Direction, Model, WaveNumberSet,
};
use crate::error::{Error, Result};
use crate::potential::PotentialProfile;
use crate::propagator::{integrate_basis, FundamentalBasis, SolverOpts};
use crate::tbc::{
    injection_rows, outgoing_rows, reflection_coefficients, se2_rows, transmission_coefficients,
    transmitted_amplitudes, BoundaryRow, Endpoint, LogPolar, ScatteringCoefficients,
};
use crate::units::MaterialParams;

/// |det A| <= SINGULAR_TOL * prod(row norms) triggers the singular-system error.
const SINGULAR_TOL: f64 = 1e-12;

/// The assembled boundary linear system A c = rhs.
#[derive(Debug, Clone)]
pub struct BoundarySystem {
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    /// 1-norm condition estimate of A.
    pub condition_estimate: f64,
    /// Which boundary condition produced each row.
    pub provenance: Vec<&'static str>,
}

/// Quality measures of a solved scattering state.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostics {
    /// max_x |J(x) - J(0)| / |J(0)| over the sample grid.
    pub current_rel_variation: f64,
    /// Largest continuity-condition residual at the two contacts.
    pub boundary_residual_max: f64,
    pub condition_estimate: f64,
}

/// One grid sample of the solved wavefunction.
#[derive(Debug, Clone, Copy)]
pub struct SolutionSample {
    pub x: f64,
    pub psi: Complex64,
    pub dpsi: Complex64,
    pub d2psi: Complex64,
    pub d3psi: Complex64,
    /// Probability current evaluated from this sample's derivatives, nm/fs.
    pub j_local: f64,
}

/// Contact wave numbers of a solve, by model.
#[derive(Debug, Clone, Copy)]
pub enum WaveNumbers {
    Parabolic { k1: f64, k_exit: Complex64 },
    Quartic(WaveNumberSet),
}

/// A solved stationary scattering state.
#[derive(Debug, Clone)]
pub struct ScatteringSolution {
    pub model: Model,
    pub direction: Direction,
    /// Eigen-energy fixed by the injected wave number, eV.
    pub energy: f64,
    pub wave_numbers: WaveNumbers,
    /// Coefficients over the fundamental basis, c_j = psi^(j) at x = 0.
    pub coeffs: Vec<Complex64>,
    pub scattering: ScatteringCoefficients,
    pub samples: Vec<SolutionSample>,
    /// Conserved probability current J(0), nm/fs.
    pub current: f64,
    pub diagnostics: Diagnostics,
    length: f64,
}

impl ScatteringSolution {
    pub fn length(&self) -> f64 {
        self.length
    }

    /// sup-norm of |psi| against another solution on the same grid.
    pub fn modulus_distance(&self, other: &ScatteringSolution) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.psi.norm() - b.psi.norm()).abs())
            .fold(0.0, f64::max)
    }

    /// sup-norm of the complex wavefunction difference on the same grid.
    pub fn complex_distance(&self, other: &ScatteringSolution) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.psi - b.psi).norm())
            .fold(0.0, f64::max)
    }
}

/// Probability current from a state vector. The fourth-order expression adds
/// the third-derivative correction to the classical term; the second-order
/// model keeps only the classical term.
pub fn probability_current(
    psi: Complex64,
    dpsi: Complex64,
    d2psi: Complex64,
    d3psi: Complex64,
    mat: &MaterialParams,
    model: Model,
) -> f64 {
    let classical = (psi.conj() * dpsi).im * mat.hbar / mat.m_star;
    match model {
        Model::Se2 => classical,
        Model::Se4 => {
            let factor = mat.alpha * mat.hbar.powi(3) / (2.0 * mat.m_star * mat.m_star);
            classical + factor * (psi.conj() * d3psi - dpsi.conj() * d2psi).im
        }
    }
}

/// Builds the boundary system from the rows and the basis values at x = L.
pub fn assemble_boundary_system(
    rows: &[(BoundaryRow, &'static str)],
    basis_at_end: &DMatrix<Complex64>,
) -> BoundarySystem {
    let n = rows.len();
    let mut matrix = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    let mut provenance = Vec::with_capacity(n);
    for (r, (row, label)) in rows.iter().enumerate() {
        match row.endpoint {
            Endpoint::AtZero => {
                // c_j = psi^(j)(0): the row weights act on c directly.
                for j in 0..n {
                    matrix[(r, j)] = row.weights[j];
                }
            }
            Endpoint::AtL => {
                for j in 0..n {
                    let mut acc = Complex64::ZERO;
                    for i in 0..n {
                        acc += row.weights[i] * basis_at_end[(i, j)];
                    }
                    matrix[(r, j)] = acc;
                }
            }
        }
        rhs[r] = row.rhs;
        provenance.push(*label);
    }
    let condition_estimate = condition_1norm(&matrix);
    BoundarySystem {
        matrix,
        rhs,
        condition_estimate,
        provenance,
    }
}

fn norm_1(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn condition_1norm(m: &DMatrix<Complex64>) -> f64 {
    match m.clone().try_inverse() {
        Some(inv) => norm_1(m) * norm_1(&inv),
        None => f64::INFINITY,
    }
}

/// Solves the boundary system with the Fredholm-alternative determinant guard.
pub fn solve_boundary_system(system: &BoundarySystem) -> Result<Vec<Complex64>> {
    let n = system.matrix.nrows();
    let row_norm_product: f64 = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| system.matrix[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .product();
    let lu = system.matrix.clone().lu();
    let det = lu.determinant();
    let threshold = SINGULAR_TOL * row_norm_product;
    if det.norm() <= threshold {
        return Err(Error::SingularSystem {
            det_magnitude: det.norm(),
            threshold,
            condition_estimate: system.condition_estimate,
        });
    }
    let c = lu.solve(&system.rhs).ok_or(Error::SingularSystem {
        det_magnitude: det.norm(),
        threshold,
        condition_estimate: system.condition_estimate,
    })?;
    Ok(c.iter().copied().collect())
}

/// Full scattering solve: wave numbers, fundamental basis, boundary system,
/// coefficient extraction, wavefunction samples and diagnostics.
pub fn solve_scattering(
    profile: &PotentialProfile,
    k1: f64,
    direction: Direction,
    mat: &MaterialParams,
    model: Model,
    opts: &SolverOpts,
) -> Result<ScatteringSolution> {
    let (v_inj, v_exit) = match direction {
        Direction::LeftToRight => (profile.v0(), profile.v_l()),
        Direction::RightToLeft => (profile.v_l(), profile.v0()),
    };
    match model {
        Model::Se4 => {
            let wns = wave_number_set(k1, v_inj, v_exit, mat, direction)?;
            let basis = integrate_basis(profile, wns.energy, mat, model, opts)?;
            let rows = se4_rows(&wns)?;
            let system = assemble_boundary_system(&rows, &basis.at_end());
            let coeffs = solve_boundary_system(&system)?;
            build_solution(
                profile,
                &basis,
                coeffs,
                WaveNumbers::Quartic(wns),
                direction,
                mat,
                model,
                system.condition_estimate,
            )
        }
        Model::Se2 => {
            let energy = injection_energy(k1, v_inj, mat, Model::Se2)?;
            let k_exit = parabolic_wavenumber(energy, v_exit, mat);
            let basis = integrate_basis(profile, energy, mat, model, opts)?;
            let (inj, out) = se2_rows(k1, k_exit, direction);
            let rows = [
                (inj, "SE2 injection"),
                (out, "SE2 outgoing"),
            ];
            let system = assemble_boundary_system(&rows, &basis.at_end());
            let coeffs = solve_boundary_system(&system)?;
            build_solution(
                profile,
                &basis,
                coeffs,
                WaveNumbers::Parabolic { k1, k_exit },
                direction,
                mat,
                model,
                system.condition_estimate,
            )
        }
    }
}

/// The four fourth-order rows in system order: injection pair then outgoing
/// pair, with labels recording provenance.
pub(crate) fn se4_rows(wns: &WaveNumberSet) -> Result<[(BoundaryRow, &'static str); 4]> {
    let (i1, i2) = injection_rows(wns.k1, wns.k2, wns.degenerate_left, wns.direction)?;
    let (o1, o2) = outgoing_rows(wns.k3, wns.k4, wns.degenerate_right, wns.direction)?;
    let (li1, li2) = if wns.degenerate_left {
        ("degenerate injection row 1", "degenerate injection row 2")
    } else {
        ("injection row 1", "injection row 2")
    };
    let (lo1, lo2) = if wns.degenerate_right {
        ("degenerate outgoing row 1", "degenerate outgoing row 2")
    } else {
        ("outgoing row 1", "outgoing row 2")
    };
    Ok([(i1, li1), (i2, li2), (o1, lo1), (o2, lo2)])
}

#[allow(clippy::too_many_arguments)]
fn build_solution(
    profile: &PotentialProfile,
    basis: &FundamentalBasis,
    coeffs: Vec<Complex64>,
    wave_numbers: WaveNumbers,
    direction: Direction,
    mat: &MaterialParams,
    model: Model,
    condition_estimate: f64,
) -> Result<ScatteringSolution> {
    let n = basis.order();
    let mut states = Vec::with_capacity(basis.len());
    for s in 0..basis.len() {
        let mut state = [Complex64::ZERO; 4];
        for i in 0..n {
            for (j, c) in coeffs.iter().enumerate() {
                state[i] += c * basis.value(s, j, i);
            }
        }
        states.push(state);
    }
    assemble_solution_from_states(
        profile,
        basis.xs(),
        states,
        basis.energy,
        coeffs,
        wave_numbers,
        direction,
        mat,
        model,
        condition_estimate,
    )
}

/// Turns sampled state vectors into a full solution: fills the second-order
/// model's upper derivatives from the equation, evaluates the current,
/// extracts (r, t) and computes the diagnostics. Shared by the numeric and
/// the analytic solvers.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble_solution_from_states(
    profile: &PotentialProfile,
    xs: &[f64],
    mut states: Vec<[Complex64; 4]>,
    energy: f64,
    coeffs: Vec<Complex64>,
    wave_numbers: WaveNumbers,
    direction: Direction,
    mat: &MaterialParams,
    model: Model,
    condition_estimate: f64,
) -> Result<ScatteringSolution> {
    let b = mat.b_coeff;
    let mut samples = Vec::with_capacity(xs.len());
    for (x, state) in xs.iter().zip(states.iter_mut()) {
        if model == Model::Se2 {
            // Fill the upper derivatives from the equation itself:
            // psi'' = -(W/b) psi, psi''' = -(W/b) psi' - (V'/b) psi.
            let (v, slope) = profile.eval_with_slope(*x)?;
            let w = energy + v;
            state[2] = -(w / b) * state[0];
            state[3] = -(w / b) * state[1] - (slope / b) * state[0];
        }
        let j_local = probability_current(state[0], state[1], state[2], state[3], mat, model);
        samples.push(SolutionSample {
            x: *x,
            psi: state[0],
            dpsi: state[1],
            d2psi: state[2],
            d3psi: state[3],
            j_local,
        });
    }

    let length = profile.length();
    let scattering = extract_coefficients(&samples, &wave_numbers, direction, length)?;
    let current = samples[0].j_local;
    let denom = current.abs().max(f64::MIN_POSITIVE);
    let current_rel_variation = samples
        .iter()
        .map(|s| (s.j_local - current).abs())
        .fold(0.0, f64::max)
        / denom;

    let mut solution = ScatteringSolution {
        model,
        direction,
        energy,
        wave_numbers,
        coeffs,
        scattering,
        samples,
        current,
        diagnostics: Diagnostics {
            current_rel_variation,
            boundary_residual_max: 0.0,
            condition_estimate,
        },
        length,
    };
    solution.diagnostics.boundary_residual_max = residual_check(&solution);
    Ok(solution)
}

fn extract_coefficients(
    samples: &[SolutionSample],
    wave_numbers: &WaveNumbers,
    direction: Direction,
    length: f64,
) -> Result<ScatteringCoefficients> {
    let first = samples.first().expect("samples are never empty");
    let last = samples.last().expect("samples are never empty");
    let (inj, exit) = match direction {
        Direction::LeftToRight => (first, last),
        Direction::RightToLeft => (last, first),
    };
    match *wave_numbers {
        WaveNumbers::Quartic(wns) => {
            let (r1, r2) = reflection_coefficients(
                inj.psi,
                inj.dpsi,
                wns.k1,
                wns.k2,
                wns.degenerate_left,
                direction,
            )?;
            let (t1_log, t2_log) = transmission_coefficients(
                exit.psi,
                exit.dpsi,
                wns.k3,
                wns.k4,
                length,
                wns.degenerate_right,
                direction,
            )?;
            Ok(ScatteringCoefficients {
                r1,
                r2,
                t1: t1_log.value(),
                t2: t2_log.value(),
                t1_log,
                t2_log,
                degenerate_left: wns.degenerate_left,
                degenerate_right: wns.degenerate_right,
            })
        }
        WaveNumbers::Parabolic { k_exit, .. } => {
            // r = psi - 1 at the injection contact; t = psi e^{-i k L} at the
            // exit contact, with the amplitude measured at the contact itself.
            let r1 = inj.psi - 1.0;
            let t1_log = LogPolar {
                ln_mag: exit.psi.norm().ln() + k_exit.im * length,
                phase: exit.psi.arg() - k_exit.re * length,
            };
            Ok(ScatteringCoefficients {
                r1,
                r2: Complex64::ZERO,
                t1: t1_log.value(),
                t2: Complex64::ZERO,
                t1_log,
                t2_log: LogPolar {
                    ln_mag: f64::NEG_INFINITY,
                    phase: 0.0,
                },
                degenerate_left: false,
                degenerate_right: false,
            })
        }
    }
}

/// Reconstructs the exterior waves from (r, t) and evaluates every continuity
/// condition at both contacts; returns the largest residual magnitude.
///
/// At a degenerate contact the bounded exterior spans a single exponential,
/// so continuity holds through first order and the remaining content is the
/// pair of compatibility relations; those are what get checked there.
pub fn residual_check(solution: &ScatteringSolution) -> f64 {
    let first = solution.samples.first().expect("samples are never empty");
    let last = solution.samples.last().expect("samples are never empty");
    let (inj, exit) = match solution.direction {
        Direction::LeftToRight => (first, last),
        Direction::RightToLeft => (last, first),
    };
    let inj_state = [inj.psi, inj.dpsi, inj.d2psi, inj.d3psi];
    let exit_state = [exit.psi, exit.dpsi, exit.d2psi, exit.d3psi];
    let i = Complex64::new(0.0, 1.0);
    // Direction folds into the sign of the exponent in the local coordinate.
    let sgn = match solution.direction {
        Direction::LeftToRight => 1.0,
        Direction::RightToLeft => -1.0,
    };
    let mut worst = 0.0_f64;
    let mut check = |residual: Complex64| {
        worst = worst.max(residual.norm());
    };

    match solution.wave_numbers {
        WaveNumbers::Quartic(wns) => {
            let k1 = Complex64::new(wns.k1, 0.0);
            let sc = &solution.scattering;
            if wns.degenerate_left {
                let r = sc.r1;
                for order in 0..2 {
                    let target = (sgn * i * k1).powu(order)
                        + r * (-sgn * i * k1).powu(order);
                    check(inj_state[order as usize] - target);
                }
                let (_, row2) =
                    injection_rows(wns.k1, wns.k2, true, wns.direction).expect("degenerate rows");
                check(row2.residual(&inj_state));
            } else {
                for order in 0..4u32 {
                    let target = (sgn * i * k1).powu(order)
                        + sc.r1 * (-sgn * i * k1).powu(order)
                        + sc.r2 * (-sgn * i * wns.k2).powu(order);
                    check(inj_state[order as usize] - target);
                }
            }
            let (t_big1, t_big2) = transmitted_amplitudes(
                exit.psi,
                exit.dpsi,
                wns.k3,
                wns.k4,
                wns.degenerate_right,
                solution.direction,
            );
            if wns.degenerate_right {
                for order in 0..2u32 {
                    let target = t_big1 * (sgn * i * wns.k3).powu(order);
                    check(exit_state[order as usize] - target);
                }
                let (_, row2) =
                    outgoing_rows(wns.k3, wns.k4, true, wns.direction).expect("degenerate rows");
                check(row2.residual(&exit_state));
            } else {
                for order in 0..4u32 {
                    let target = t_big1 * (sgn * i * wns.k3).powu(order)
                        + t_big2 * (sgn * i * wns.k4).powu(order);
                    check(exit_state[order as usize] - target);
                }
            }
        }
        WaveNumbers::Parabolic { k1, k_exit } => {
            let k1 = Complex64::new(k1, 0.0);
            let r = solution.scattering.r1;
            for order in 0..2u32 {
                let target =
                    (sgn * i * k1).powu(order) + r * (-sgn * i * k1).powu(order);
                check(inj_state[order as usize] - target);
            }
            let t_big = exit.psi;
            check(exit.dpsi - sgn * i * k_exit * t_big);
        }
    }
    worst
}

/// One point of a bias sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub v_l: f64,
    pub j: Option<f64>,
    pub diagnostics: Option<Diagnostics>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Currents of the successful points, in sweep order.
    pub fn currents(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.j.map(|j| (p.v_l, j)))
            .collect()
    }
}

/// Current-voltage sweep over a bias-parameterized profile family with
/// left-to-right injection at fixed k1. Individual point failures are
/// recorded, not fatal.
pub fn iv_sweep(
    family: impl Fn(f64) -> Result<PotentialProfile>,
    k1: f64,
    mat: &MaterialParams,
    model: Model,
    v_list: &[f64],
    opts: &SolverOpts,
) -> Result<SweepResult> {
    if v_list.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut points = Vec::with_capacity(v_list.len());
    for &v_l in v_list {
        let outcome = family(v_l).and_then(|profile| {
            solve_scattering(&profile, k1, Direction::LeftToRight, mat, model, opts)
        });
        points.push(match outcome {
            Ok(sol) => SweepPoint {
                v_l,
                j: Some(sol.current),
                diagnostics: Some(sol.diagnostics),
                error: None,
            },
            Err(e) => SweepPoint {
                v_l,
                j: None,
                diagnostics: None,
                error: Some(e.to_string()),
            },
        });
    }
    Ok(SweepResult { points })
}

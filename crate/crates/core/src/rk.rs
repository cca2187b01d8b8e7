//! Adaptive embedded Runge-Kutta integration for complex linear systems.
//!
//! Uses Verner's "efficient" 16-stage 9(8) pair. The controller is forced to
//! land exactly on every requested output point, so recorded states carry pure
//! integration error with no interpolation on top, and segment restarts are
//! bit-exact.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const STAGES: usize = 16;

#[rustfmt::skip]
pub(crate) const A: [[f64; STAGES]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.03571, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.03833735636677017, 0.13739763727944432, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0371476053422528, 0.0, 0.11144281602675842, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.674764429871505, 0.0, -9.982382134885293, 7.921017705013789, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.05242104050577351, 0.0, 0.0, 0.17969111891759532, 0.0006237879371938568, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.15924922236476322, 0.0, 0.0, -0.4298429877241087, 0.06665266542726088, 0.757805152571522, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.07283333333333333, 0.0, 0.0, 0.0, 0.0, 0.33593445906651037, 0.2467322076001563, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0729755859375, 0.0, 0.0, 0.0, 0.0, 0.33480097296993333, 0.11841582390506665, -0.0345673828125, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.049112136634520964, 0.0, 0.0, 0.0, 0.0, 0.03983857361308652, 0.10696752889393549, -0.021742591654586477, -0.10559564748695649, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.027079888186412805, 0.0, 0.0, 0.0, 0.0, 0.0333, -0.16455260700360572, 0.0342826630649739, 0.1585264064439221, 0.2185234256811225, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.055846577691088625, 0.0, 0.0, 0.0, 0.0, 0.09166533166672539, 0.2392399655523627, 0.01023834712248415, -0.0026793313228595426, 0.042356241814742845, 0.2253970470166604, 0.0, 0.0, 0.0, 0.0, 0.0],
    [-0.4802510512725196, 0.0, 0.0, 0.0, 0.0, -6.3596101625559305, -0.2762313898040841, -6.500796633979847, 0.5734765877040957, 1.3471259948681389, 5.936840409706221, 6.590346245333925, 0.0, 0.0, 0.0, 0.0],
    [0.3307533067671401, 0.0, 0.0, 0.0, 0.0, 5.956207776829962, -0.48683164004815277, 4.462055288206771, 0.7410258231442072, -0.7118192034575913, -5.454619594516665, -4.14080372924471, 0.20383197231903866, 0.0, 0.0, 0.0],
    [-0.5847111122998945, 0.0, 0.0, 0.0, 0.0, -12.41268417116267, 1.360245445660928, -22.426105311118683, -0.8828857055865458, 1.7701551285382304, 12.158096519185339, 22.230375204077607, -0.6634483760201249, 0.45096237872581374, 0.0, 0.0],
    [1.9405755498106487, 0.0, 0.0, 0.0, 0.0, 21.977984081145564, 0.8230747326984729, 68.16441683626354, -3.117097463620267, -4.56884102182244, -18.74190987126265, -66.57711839637832, 1.0989155531654418, 0.0, 0.0, 0.0],
];

#[rustfmt::skip]
pub(crate) const B_HIGH: [f64; STAGES] = [0.015006690149797247, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0551809927463813, 0.2384947263782183, 0.12881517742829915, 0.22766231110462157, 1.2295325874375174, 0.04624976662810384, 0.13861963193662938, 0.030800101683194355, 0.0];

#[rustfmt::skip]
pub(crate) const B_LOW: [f64; STAGES] = [0.018972105324811014, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.4081103145494938, 0.1260323883820921, 0.11883750634511497, 0.24910419978386875, -3.2699662199289783, 0.3023798100228883, 0.0, 0.0, 0.04652989552070924];

#[rustfmt::skip]
pub(crate) const C: [f64; STAGES] = [0.0, 0.03571, 0.09906028091267415, 0.1485904213690112, 0.6134, 0.2327359473605627, 0.5538640526394373, 0.6555, 0.491625, 0.06858, 0.253, 0.6620641795412046, 0.8309, 0.8998, 1.0, 1.0];

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;
const ORDER_EXP: f64 = 1.0 / 9.0;

/// Integration statistics accumulated across segments.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolverStats {
    pub steps: usize,
    pub rejected_steps: usize,
    /// Largest accepted scaled local error estimate (<= 1 by construction).
    pub max_error_estimate: f64,
}

/// Workspace reused across steps of one integration.
pub(crate) struct RkWorkspace {
    k: Vec<Vec<Complex64>>,
    y_stage: Vec<Complex64>,
    y_high: Vec<Complex64>,
    err: Vec<Complex64>,
}

impl RkWorkspace {
    pub(crate) fn new(dim: usize) -> Self {
        Self {
            k: (0..STAGES).map(|_| vec![Complex64::ZERO; dim]).collect(),
            y_stage: vec![Complex64::ZERO; dim],
            y_high: vec![Complex64::ZERO; dim],
            err: vec![Complex64::ZERO; dim],
        }
    }
}

/// One 16-stage step from (x, y) with step h. Writes the 9th-order update
/// into `ws.y_high` and the embedded error difference into `ws.err`.
pub(crate) fn rk_step<F>(f: &F, x: f64, y: &[Complex64], h: f64, ws: &mut RkWorkspace)
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    let dim = y.len();
    f(x, y, &mut ws.k[0]);
    for s in 1..STAGES {
        ws.y_stage.copy_from_slice(y);
        for j in 0..s {
            let a = A[s][j];
            if a != 0.0 {
                let w = a * h;
                for i in 0..dim {
                    ws.y_stage[i] += ws.k[j][i] * w;
                }
            }
        }
        let (head, tail) = ws.k.split_at_mut(s);
        let _ = head;
        f(x + C[s] * h, &ws.y_stage, &mut tail[0]);
    }
    ws.y_high.copy_from_slice(y);
    for i in 0..dim {
        ws.err[i] = Complex64::ZERO;
    }
    for s in 0..STAGES {
        let bh = B_HIGH[s] * h;
        let bd = (B_HIGH[s] - B_LOW[s]) * h;
        if bh != 0.0 || bd != 0.0 {
            for i in 0..dim {
                ws.y_high[i] += ws.k[s][i] * bh;
                ws.err[i] += ws.k[s][i] * bd;
            }
        }
    }
}

fn error_norm(y: &[Complex64], y_new: &[Complex64], err: &[Complex64], rtol: f64, atol: f64) -> f64 {
    let mut norm = 0.0_f64;
    for i in 0..y.len() {
        let scale = atol + rtol * y[i].norm().max(y_new[i].norm());
        norm = norm.max(err[i].norm() / scale);
    }
    norm
}

/// Integrates y' = f(x, y) from `x0` to the last entry of `stops`, landing
/// exactly on every stop (strictly increasing values in (x0, x_end]) and
/// reporting the state there.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_to_stops<F, G>(
    f: &F,
    x0: f64,
    y: &mut [Complex64],
    stops: &[f64],
    rtol: f64,
    atol: f64,
    max_steps: usize,
    segment: usize,
    ws: &mut RkWorkspace,
    stats: &mut SolverStats,
    mut on_stop: G,
) -> Result<()>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
    G: FnMut(f64, &[Complex64]),
{
    if stops.is_empty() {
        return Ok(());
    }
    let span = stops[stops.len() - 1] - x0;
    debug_assert!(span > 0.0);
    let mut x = x0;
    let mut h = span / 16.0;
    let min_step = span * 1e-14;

    for &stop in stops {
        while x < stop {
            if stats.steps + stats.rejected_steps > max_steps {
                return Err(Error::MaxStepsExceeded {
                    x,
                    max_steps,
                });
            }
            let mut landing = false;
            let remaining = stop - x;
            if h >= remaining * (1.0 - 1e-12) {
                h = remaining;
                landing = true;
            }
            rk_step(f, x, y, h, ws);
            let err = error_norm(y, &ws.y_high, &ws.err, rtol, atol);
            let accepted = err <= 1.0;
            if accepted {
                stats.steps += 1;
                stats.max_error_estimate = stats.max_error_estimate.max(err);
                y.copy_from_slice(&ws.y_high);
                x = if landing { stop } else { x + h };
            } else {
                stats.rejected_steps += 1;
            }
            let mut scale = if err == 0.0 {
                MAX_SCALE
            } else {
                (SAFETY * err.powf(-ORDER_EXP)).clamp(MIN_SCALE, MAX_SCALE)
            };
            if !accepted {
                // No growth out of a rejected step.
                scale = scale.min(1.0);
            }
            h *= scale;
            if h < min_step {
                return Err(Error::StepSizeUnderflow { x, segment });
            }
        }
        on_stop(stop, y);
    }
    Ok(())
}

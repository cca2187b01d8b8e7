//! Electrostatic potential profiles on the device domain [0, L].
//!
//! Profiles are ordered piecewise-polynomial segments of degree <= 1, which
//! covers every device in the experiments: step, single and double barrier,
//! and the biased double barrier with a linear ramp. Evaluation is
//! right-continuous at interior breakpoints.

use crate::error::{Error, Result};

/// Absolute tolerance for segment tiling checks, in nm.
const TILE_TOL: f64 = 1e-9;

/// One polynomial piece: V(x) = value + slope * (x - x_start) on [x_start, x_end].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub x_start: f64,
    pub x_end: f64,
    /// Constant coefficient, V.
    pub value: f64,
    /// Linear coefficient, V/nm.
    pub slope: f64,
}

impl Segment {
    pub fn eval(&self, x: f64) -> f64 {
        self.value + self.slope * (x - self.x_start)
    }

    pub fn len(&self) -> f64 {
        self.x_end - self.x_start
    }
}

/// Device geometry specification for [`build_profile`].
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    /// V = 0 on [0, L/2), v_l on [L/2, L].
    Step { length: f64, v_l: f64 },
    /// V = v_b on [a1, a2], zero elsewhere.
    SingleBarrier {
        length: f64,
        a1: f64,
        a2: f64,
        v_b: f64,
    },
    /// V = v_b on [a1, a2] and [a3, a4], zero elsewhere.
    DoubleBarrier {
        length: f64,
        a1: f64,
        a2: f64,
        a3: f64,
        a4: f64,
        v_b: f64,
    },
    /// Double barrier superposed on a linear ramp from 0 at a1 to v_l at a6,
    /// with barriers of height v_b on (a2, a3) and (a4, a5).
    Rtd {
        length: f64,
        a1: f64,
        a2: f64,
        a3: f64,
        a4: f64,
        a5: f64,
        a6: f64,
        v_b: f64,
        v_l: f64,
    },
    /// Arbitrary degree <= 1 segments tiling [0, L].
    Custom { length: f64, segments: Vec<Segment> },
}

/// Validated potential profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    length: f64,
    segments: Vec<Segment>,
    v0: f64,
    v_l: f64,
}

/// Builds and validates a profile from a geometry spec.
pub fn build_profile(spec: &ProfileSpec) -> Result<PotentialProfile> {
    let (length, segments) = match *spec {
        ProfileSpec::Step { length, v_l } => {
            let mid = length / 2.0;
            (
                length,
                vec![
                    Segment {
                        x_start: 0.0,
                        x_end: mid,
                        value: 0.0,
                        slope: 0.0,
                    },
                    Segment {
                        x_start: mid,
                        x_end: length,
                        value: v_l,
                        slope: 0.0,
                    },
                ],
            )
        }
        ProfileSpec::SingleBarrier { length, a1, a2, v_b } => {
            let breaks = [a1, a2];
            let values = [0.0, v_b, 0.0];
            (length, constant_segments(length, &breaks, &values))
        }
        ProfileSpec::DoubleBarrier {
            length,
            a1,
            a2,
            a3,
            a4,
            v_b,
        } => {
            let breaks = [a1, a2, a3, a4];
            let values = [0.0, v_b, 0.0, v_b, 0.0];
            (length, constant_segments(length, &breaks, &values))
        }
        ProfileSpec::Rtd {
            length,
            a1,
            a2,
            a3,
            a4,
            a5,
            a6,
            v_b,
            v_l,
        } => {
            let slope = v_l / (a6 - a1);
            let ramp = |x: f64| (x - a1) * slope;
            let mut segs = vec![Segment {
                x_start: 0.0,
                x_end: a1,
                value: 0.0,
                slope: 0.0,
            }];
            for (lo, hi, barrier) in [
                (a1, a2, 0.0),
                (a2, a3, v_b),
                (a3, a4, 0.0),
                (a4, a5, v_b),
                (a5, a6, 0.0),
            ] {
                segs.push(Segment {
                    x_start: lo,
                    x_end: hi,
                    value: ramp(lo) + barrier,
                    slope,
                });
            }
            segs.push(Segment {
                x_start: a6,
                x_end: length,
                value: v_l,
                slope: 0.0,
            });
            (length, segs)
        }
        ProfileSpec::Custom {
            length,
            ref segments,
        } => (length, segments.clone()),
    };
    PotentialProfile::new(length, segments)
}

fn constant_segments(length: f64, breaks: &[f64], values: &[f64]) -> Vec<Segment> {
    let mut edges = vec![0.0];
    edges.extend_from_slice(breaks);
    edges.push(length);
    edges
        .windows(2)
        .zip(values)
        .map(|(w, &v)| Segment {
            x_start: w[0],
            x_end: w[1],
            value: v,
            slope: 0.0,
        })
        .collect()
}

impl PotentialProfile {
    /// Validates tiling, ordering and the contact normalization V(0) = 0.
    pub fn new(length: f64, segments: Vec<Segment>) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidProfile(format!(
                "device length must be positive and finite, got {length}"
            )));
        }
        if segments.is_empty() {
            return Err(Error::InvalidProfile("no segments".into()));
        }
        for s in &segments {
            if !(s.x_end > s.x_start) || !s.value.is_finite() || !s.slope.is_finite() {
                return Err(Error::InvalidProfile(format!(
                    "segment [{}, {}] is empty, reversed or non-finite",
                    s.x_start, s.x_end
                )));
            }
        }
        if segments[0].x_start.abs() > TILE_TOL {
            return Err(Error::InvalidProfile(format!(
                "first segment starts at {} instead of 0",
                segments[0].x_start
            )));
        }
        if (segments.last().unwrap().x_end - length).abs() > TILE_TOL {
            return Err(Error::InvalidProfile(format!(
                "last segment ends at {} instead of L = {length}",
                segments.last().unwrap().x_end
            )));
        }
        for pair in segments.windows(2) {
            if (pair[0].x_end - pair[1].x_start).abs() > TILE_TOL {
                return Err(Error::InvalidProfile(format!(
                    "gap or overlap between x = {} and x = {}",
                    pair[0].x_end, pair[1].x_start
                )));
            }
        }
        let v0 = segments[0].value;
        if v0.abs() > TILE_TOL {
            return Err(Error::InvalidProfile(format!(
                "contact normalization requires V(0) = 0, got {v0}"
            )));
        }
        let last = segments.last().unwrap();
        let v_l = last.eval(length);
        Ok(Self {
            length,
            segments,
            v0,
            v_l,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Contact value at the left lead (always 0 by normalization).
    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// Contact value at the right lead, V(L-).
    pub fn v_l(&self) -> f64 {
        self.v_l
    }

    /// Potential value at x, right-continuous at interior breakpoints.
    pub fn eval(&self, x: f64) -> Result<f64> {
        Ok(self.segment_at(x)?.eval(x))
    }

    /// Value and slope of the governing segment at x.
    pub fn eval_with_slope(&self, x: f64) -> Result<(f64, f64)> {
        let s = self.segment_at(x)?;
        Ok((s.eval(x), s.slope))
    }

    fn segment_at(&self, x: f64) -> Result<&Segment> {
        if !(0.0..=self.length).contains(&x) {
            return Err(Error::Domain {
                x,
                length: self.length,
            });
        }
        // Right-continuity: the segment whose half-open [start, end) holds x;
        // x = L belongs to the last segment.
        Ok(self
            .segments
            .iter()
            .find(|s| x < s.x_end)
            .unwrap_or_else(|| self.segments.last().unwrap()))
    }

    /// Interior segment boundaries, where the integrator restarts.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.segments
            .iter()
            .skip(1)
            .map(|s| s.x_start)
            .collect()
    }

    /// True if every segment is constant, i.e. the analytic solver applies.
    pub fn is_piecewise_constant(&self) -> bool {
        self.segments.iter().all(|s| s.slope == 0.0)
    }
}

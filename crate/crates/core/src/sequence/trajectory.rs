//! Piecewise arm trajectories.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::Vector3;

/// Largest allowed position jump between consecutive segments [m].
pub const CONTINUITY_TOLERANCE: f64 = 1e-12;
/// Slack when deciding whether a time lies inside the domain [s].
const TIME_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Segment {
    Hold {
        position: Vector3,
        duration: f64,
    },
    /// Constant-velocity move.
    Ramp {
        from: Vector3,
        to: Vector3,
        duration: f64,
    },
    /// `base + A sin(ω τ + φ0) · direction`, τ measured from the segment start.
    Shake {
        base: Vector3,
        amplitude: f64,
        direction: Vector3,
        angular_frequency: f64,
        phase: f64,
        duration: f64,
    },
}

impl Segment {
    /// Shake about `base` along `direction` (normalised here), starting at phase 0.
    pub fn shake(base: Vector3, amplitude: f64, direction: Vector3, angular_frequency: f64, duration: f64) -> Result<Self> {
        let n = direction.norm();
        ensure(n > 0.0 && n.is_finite(), || "shake direction must be a non-zero vector".into())?;
        ensure(amplitude >= 0.0 && angular_frequency > 0.0, || {
            format!("shake needs A ≥ 0 and ω > 0, got A={amplitude:e}, ω={angular_frequency:e}")
        })?;
        Ok(Segment::Shake {
            base,
            amplitude,
            direction: direction.scale(1.0 / n),
            angular_frequency,
            phase: 0.0,
            duration,
        })
    }

    pub fn duration(&self) -> f64 {
        match *self {
            Segment::Hold { duration, .. } | Segment::Ramp { duration, .. } | Segment::Shake { duration, .. } => duration,
        }
    }

    /// Position `tau` seconds after the segment start.
    pub fn position_at(&self, tau: f64) -> Vector3 {
        match *self {
            Segment::Hold { position, .. } => position,
            Segment::Ramp { from, to, duration } => {
                if duration == 0.0 {
                    to
                } else {
                    from + (to - from).scale(tau / duration)
                }
            }
            Segment::Shake { base, amplitude, direction, angular_frequency, phase, .. } => {
                base + direction.scale(amplitude * (angular_frequency * tau + phase).sin())
            }
        }
    }

    pub fn velocity_at(&self, tau: f64) -> Vector3 {
        match *self {
            Segment::Hold { .. } => Vector3::zero(),
            Segment::Ramp { from, to, duration } => {
                if duration == 0.0 {
                    Vector3::zero()
                } else {
                    (to - from).scale(1.0 / duration)
                }
            }
            Segment::Shake { amplitude, direction, angular_frequency, phase, .. } => {
                direction.scale(amplitude * angular_frequency * (angular_frequency * tau + phase).cos())
            }
        }
    }

    pub fn start(&self) -> Vector3 {
        self.position_at(0.0)
    }

    pub fn end(&self) -> Vector3 {
        self.position_at(self.duration())
    }

    pub fn is_static(&self) -> bool {
        match *self {
            Segment::Hold { .. } => true,
            Segment::Ramp { from, to, .. } => from == to,
            Segment::Shake { amplitude, .. } => amplitude == 0.0,
        }
    }

    pub fn period(&self) -> Option<f64> {
        match *self {
            Segment::Shake { angular_frequency, .. } => Some(2.0 * PI / angular_frequency),
            _ => None,
        }
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Self {
        match *self {
            Segment::Hold { .. } => *self,
            Segment::Ramp { from, to, duration } => Segment::Ramp { from: to, to: from, duration },
            Segment::Shake { base, amplitude, direction, angular_frequency, phase, duration } => Segment::Shake {
                base,
                amplitude,
                direction,
                angular_frequency,
                // sin(ω(D − τ) + φ0) = sin(ωτ + π − ωD − φ0)
                phase: PI - angular_frequency * duration - phase,
                duration,
            },
        }
    }
}

/// Position of one arm over `[start_time, end_time]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    start_time: f64,
    segments: Vec<Segment>,
}

impl Trajectory {
    pub fn new(start_time: f64, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidTrajectory("trajectory has no segments".into()));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidTrajectory("start time is not finite".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            let d = seg.duration();
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::InvalidTrajectory(format!("segment {i} has duration {d}")));
            }
            if !(seg.start().is_finite() && seg.end().is_finite()) {
                return Err(Error::InvalidTrajectory(format!("segment {i} has non-finite positions")));
            }
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let jump = (pair[1].start() - pair[0].end()).norm();
            if jump > CONTINUITY_TOLERANCE {
                return Err(Error::InvalidTrajectory(format!(
                    "position jumps by {jump:e} m between segments {i} and {}",
                    i + 1
                )));
            }
        }
        Ok(Self { start_time, segments })
    }

    /// Ramp from `origin` to `arm`, hold for `hold`, ramp back.
    pub fn transport_hold(start_time: f64, origin: Vector3, arm: Vector3, transport: f64, hold: f64) -> Result<Self> {
        Self::new(
            start_time,
            vec![
                Segment::Ramp { from: origin, to: arm, duration: transport },
                Segment::Hold { position: arm, duration: hold },
                Segment::Ramp { from: arm, to: origin, duration: transport },
            ],
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.segments.iter().map(Segment::duration).sum::<f64>()
    }

    /// Absolute times of all segment boundaries, including both ends.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = self.start_time;
        let mut out = vec![t];
        for s in &self.segments {
            t += s.duration();
            out.push(t);
        }
        out
    }

    /// Segment covering `t` together with its absolute start time. At a
    /// boundary the later segment wins.
    pub fn piece(&self, t: f64) -> Result<(f64, &Segment)> {
        if t < self.start_time - TIME_SLACK || t > self.end_time() + TIME_SLACK {
            return Err(Error::InvalidInput(format!(
                "t={t} outside trajectory domain [{}, {}]",
                self.start_time,
                self.end_time()
            )));
        }
        let mut begin = self.start_time;
        for (i, s) in self.segments.iter().enumerate() {
            let end = begin + s.duration();
            if t < end || i + 1 == self.segments.len() {
                return Ok((begin, s));
            }
            begin = end;
        }
        unreachable!("segments is non-empty")
    }

    pub fn position(&self, t: f64) -> Result<Vector3> {
        let (begin, s) = self.piece(t)?;
        Ok(s.position_at((t - begin).clamp(0.0, s.duration())))
    }

    pub fn velocity(&self, t: f64) -> Result<Vector3> {
        let (begin, s) = self.piece(t)?;
        Ok(s.velocity_at((t - begin).clamp(0.0, s.duration())))
    }

    /// `x'(t) = x(t_start + t_end − t)` over the same domain.
    pub fn reversed(&self) -> Self {
        Self {
            start_time: self.start_time,
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
        }
    }

    /// Replaces segment `index` by a shake about its (static) position. The
    /// shake must complete whole cycles for the trajectory to stay continuous.
    pub fn with_shake(&self, index: usize, amplitude: f64, direction: Vector3, angular_frequency: f64) -> Result<Self> {
        let seg = self
            .segments
            .get(index)
            .ok_or_else(|| Error::InvalidTrajectory(format!("no segment {index}")))?;
        let Segment::Hold { position, duration } = *seg else {
            return Err(Error::InvalidTrajectory(format!("segment {index} is not a hold")));
        };
        let mut segments = self.segments.clone();
        segments[index] = Segment::shake(position, amplitude, direction, angular_frequency, duration)?;
        Self::new(self.start_time, segments)
    }
}

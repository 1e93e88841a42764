//! Interferometer timeline: arm trajectories, proper time, phase and populations.
//!
//! Arms are treated as point clocks. The proper-time difference
//!
//! `Δτ = ∫ [(U_A − U_B)/c² − (v_A² − v_B²)/(2c²)] dt`
//!
//! is kept split into source-mass, Earth and kinetic parts so that the
//! with/without-masses comparison cancels everything but the mass term
//! exactly. Static stretches are evaluated in closed form; everything else
//! goes through adaptive Simpson.

mod trajectory;

pub use trajectory::{Segment, Trajectory, CONTINUITY_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::constants::{compton_angular_frequency, AtomSpecies};
use crate::error::{ensure, Error, Result};
use crate::gravfield::mass_potential;
use crate::numeric::adaptive_simpson;
use crate::{SourceConfiguration, Vector3};

/// Absolute quadrature tolerance on each part of `Δτ` over the whole sequence [s].
pub const PROPER_TIME_TOLERANCE: f64 = 1e-30;
/// Quadrature panels per oscillation period of a shaken arm.
const PANELS_PER_PERIOD: f64 = 8.0;
/// Breakpoints closer than this are merged [s].
const BREAKPOINT_MERGE: f64 = 1e-15;

/// When the source masses contribute to the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum MassSchedule {
    Absent,
    /// Brought in at `on`, removed at `off`. The potential is scaled linearly
    /// from 0 to 1 over `[on, on + ramp]` and back over `[off − ramp, off]`.
    Interval { on: f64, off: f64, ramp: f64 },
    /// Present throughout, including transport.
    AlwaysOn,
}

impl MassSchedule {
    /// Instantaneous insertion over `[on, off]`.
    pub fn interval(on: f64, off: f64) -> Self {
        MassSchedule::Interval { on, off, ramp: 0.0 }
    }

    /// Fraction of the source-mass potential present at `t`.
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            MassSchedule::Absent => 0.0,
            MassSchedule::AlwaysOn => 1.0,
            MassSchedule::Interval { on, off, ramp } => {
                if t < on || t > off {
                    0.0
                } else if ramp > 0.0 {
                    ((t - on) / ramp).min((off - t) / ramp).min(1.0)
                } else {
                    1.0
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            MassSchedule::Interval { on, off, ramp } => vec![on, on + ramp, off - ramp, off],
            _ => vec![],
        }
    }

    fn validate(&self, t0: f64, t3: f64) -> Result<()> {
        if let MassSchedule::Interval { on, off, ramp } = *self {
            ensure(t0 <= on && on <= off && off <= t3, || {
                format!("mass interval [{on}, {off}] must lie inside [{t0}, {t3}]")
            })?;
            ensure(ramp >= 0.0 && 2.0 * ramp <= off - on, || {
                format!("mass ramp {ramp} does not fit in interval of length {}", off - on)
            })?;
        }
        Ok(())
    }

    fn reversed(&self, t0: f64, t3: f64) -> Self {
        match *self {
            MassSchedule::Interval { on, off, ramp } => MassSchedule::Interval { on: t0 + t3 - off, off: t0 + t3 - on, ramp },
            other => other,
        }
    }
}

/// Full timeline: split at `t0`, hold `[t1, t2]`, recombine at `t3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceParams {
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub arm_a: Trajectory,
    pub arm_b: Trajectory,
    pub masses: MassSchedule,
}

impl SequenceParams {
    pub fn new(
        [t0, t1, t2, t3]: [f64; 4],
        arm_a: Trajectory,
        arm_b: Trajectory,
        masses: MassSchedule,
    ) -> Result<Self> {
        ensure(t0 < t1 && t1 <= t2 && t2 < t3, || {
            format!("timing must satisfy t0 < t1 ≤ t2 < t3, got {t0}, {t1}, {t2}, {t3}")
        })?;
        for (name, arm) in [("A", &arm_a), ("B", &arm_b)] {
            let (s, e) = (arm.start_time(), arm.end_time());
            if (s - t0).abs() > 1e-12 || (e - t3).abs() > 1e-12 {
                return Err(Error::InvalidTrajectory(format!(
                    "arm {name} spans [{s}, {e}], sequence spans [{t0}, {t3}]"
                )));
            }
        }
        for (label, t) in [("split", t0), ("recombination", t3)] {
            let gap = (arm_a.position(t)? - arm_b.position(t)?).norm();
            if gap > CONTINUITY_TOLERANCE {
                return Err(Error::InvalidTrajectory(format!("arms are {gap:e} m apart at {label}")));
            }
        }
        masses.validate(t0, t3)?;
        Ok(Self { t0, t1, t2, t3, arm_a, arm_b, masses })
    }

    pub fn hold_time(&self) -> f64 {
        self.t2 - self.t1
    }

    /// Both arms run backwards in time; the mass schedule is mirrored too.
    pub fn reversed(&self) -> Self {
        let mirror = |t: f64| self.t0 + self.t3 - t;
        Self {
            t0: self.t0,
            t1: mirror(self.t2),
            t2: mirror(self.t1),
            t3: self.t3,
            arm_a: self.arm_a.reversed(),
            arm_b: self.arm_b.reversed(),
            masses: self.masses.reversed(self.t0, self.t3),
        }
    }

    /// Same timeline and arms with a different mass schedule.
    pub fn with_masses(&self, masses: MassSchedule) -> Result<Self> {
        masses.validate(self.t0, self.t3)?;
        Ok(Self { masses, ..self.clone() })
    }

    /// Sequences are comparable when they differ at most in the mass schedule.
    pub fn same_apart_from_masses(&self, other: &Self) -> bool {
        [self.t0, self.t1, self.t2, self.t3] == [other.t0, other.t1, other.t2, other.t3]
            && self.arm_a == other.arm_a
            && self.arm_b == other.arm_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassMode {
    /// Masses present only during the hold; no forces at any time.
    TypeI,
    /// Masses present throughout; forces act during transport only.
    TypeII,
}

/// Standard timeline: symmetric constant-velocity transport from the arm
/// midpoint, a hold of length `T`, transport back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceTemplate {
    pub arm_a: Vector3,
    pub arm_b: Vector3,
    /// Duration of each transport ramp [s].
    pub transport: f64,
    pub mode: MassMode,
    /// Ramp time of the mass insertion and removal in type I [s].
    pub mass_ramp: f64,
    /// Optional shaking of arm B during the hold: `(A [m], ω [rad/s])`.
    pub shake_b: Option<(f64, f64)>,
}

impl SequenceTemplate {
    pub fn new(arm_a: Vector3, arm_b: Vector3, transport: f64) -> Self {
        Self { arm_a, arm_b, transport, mode: MassMode::TypeI, mass_ramp: 0.0, shake_b: None }
    }

    pub fn build(&self, hold: f64) -> Result<SequenceParams> {
        ensure(self.transport > 0.0, || format!("transport time must be positive, got {}", self.transport))?;
        ensure(hold >= 0.0 && hold.is_finite(), || format!("hold time must be non-negative, got {hold}"))?;
        let origin = (self.arm_a + self.arm_b).scale(0.5);
        let (t0, t1) = (0.0, self.transport);
        let t2 = t1 + hold;
        let t3 = t2 + self.transport;
        let arm_a = Trajectory::transport_hold(t0, origin, self.arm_a, self.transport, hold)?;
        let mut arm_b = Trajectory::transport_hold(t0, origin, self.arm_b, self.transport, hold)?;
        if let Some((amplitude, omega)) = self.shake_b {
            let axis = self.arm_b - self.arm_a;
            let axis = if axis.norm() > 0.0 { axis } else { Vector3::unit_x() };
            arm_b = arm_b.with_shake(1, amplitude, axis, omega)?;
        }
        let masses = match self.mode {
            MassMode::TypeI => MassSchedule::Interval { on: t1, off: t2, ramp: self.mass_ramp },
            MassMode::TypeII => MassSchedule::AlwaysOn,
        };
        SequenceParams::new([t0, t1, t2, t3], arm_a, arm_b, masses)
    }
}

/// `Δτ = τ_A − τ_B` split by origin [s].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProperTimeDifference {
    /// Source-mass potential part.
    pub mass: f64,
    /// Uniform Earth field part.
    pub earth: f64,
    /// `−∫ (v_A² − v_B²) / (2c²) dt`
    pub kinetic: f64,
    /// Whole integrand integrated in one pass.
    pub total: f64,
}

impl ProperTimeDifference {
    pub fn potential(&self) -> f64 {
        self.mass + self.earth
    }

    pub fn sum_of_parts(&self) -> f64 {
        self.mass + self.earth + self.kinetic
    }
}

fn earth_potential(point: &Vector3, config: &SourceConfiguration) -> f64 {
    if config.include_earth {
        config.constants.g_earth * config.earth_axis.dot(point)
    } else {
        0.0
    }
}

fn merged_breakpoints(mut times: Vec<f64>, t0: f64, t3: f64) -> Vec<f64> {
    times.retain(|t| *t >= t0 && *t <= t3);
    times.push(t0);
    times.push(t3);
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    times.dedup_by(|b, a| (*b - *a).abs() <= BREAKPOINT_MERGE);
    times
}

#[derive(Clone, Copy)]
struct Part {
    mass: bool,
    earth: bool,
    kinetic: bool,
}

/// Integrates the selected parts of the integrand over `[t0, t3]`.
fn integrate(seq: &SequenceParams, config: &SourceConfiguration, breaks: &[f64], part: Part) -> Result<f64> {
    let c2 = config.constants.c_squared();
    let span = seq.t3 - seq.t0;
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let (sa, seg_a) = seq.arm_a.piece(mid)?;
        let (sb, seg_b) = seq.arm_b.piece(mid)?;
        // The schedule is linear between breakpoints; sampling the interior
        // avoids picking up the jump at an instantaneous insertion.
        let (q1, q3) = (a + 0.25 * (b - a), a + 0.75 * (b - a));
        let (f1, f3) = (seq.masses.factor(q1), seq.masses.factor(q3));
        let factor = |t: f64| f1 + (f3 - f1) * (t - q1) / (q3 - q1);
        let use_mass = part.mass && (f1 != 0.0 || f3 != 0.0);
        let integrand = |t: f64| {
            let (ta, tb) = ((t - sa).clamp(0.0, seg_a.duration()), (t - sb).clamp(0.0, seg_b.duration()));
            let (xa, xb) = (seg_a.position_at(ta), seg_b.position_at(tb));
            let mut du = 0.0;
            if use_mass {
                du += factor(t) * (mass_potential(&xa, config) - mass_potential(&xb, config));
            }
            if part.earth {
                du += earth_potential(&xa, config) - earth_potential(&xb, config);
            }
            let mut val = du / c2;
            if part.kinetic {
                let (va, vb) = (seg_a.velocity_at(ta), seg_b.velocity_at(tb));
                val -= (va.norm_squared() - vb.norm_squared()) / (2.0 * c2);
            }
            val
        };
        if seg_a.is_static() && seg_b.is_static() {
            // The integrand is the mass factor (linear here) times a constant.
            let (xa, xb) = (seg_a.position_at(0.0), seg_b.position_at(0.0));
            let mut du = 0.0;
            if use_mass {
                du += 0.5 * (f1 + f3) * (mass_potential(&xa, config) - mass_potential(&xb, config));
            }
            if part.earth {
                du += earth_potential(&xa, config) - earth_potential(&xb, config);
            }
            acc += du / c2 * (b - a);
            continue;
        }
        if !use_mass && !part.earth && !part.kinetic {
            continue;
        }
        let period = [seg_a.period(), seg_b.period()].into_iter().flatten().fold(f64::INFINITY, f64::min);
        let panels = if period.is_finite() {
            ((b - a) / period * PANELS_PER_PERIOD).ceil().max(1.0) as usize
        } else {
            1
        };
        let tol = PROPER_TIME_TOLERANCE * (b - a) / span;
        acc += adaptive_simpson(&integrand, a, b, tol, panels)?.value;
    }
    Ok(acc)
}

/// Proper-time difference between arm A and arm B.
///
/// Earth and kinetic parts depend only on the trajectories and are integrated
/// on the trajectory breakpoints alone, so two sequences that differ only in
/// the mass schedule produce bit-identical values for them.
pub fn proper_time_difference(
    seq: &SequenceParams,
    config: &SourceConfiguration,
    _species: &AtomSpecies,
) -> Result<ProperTimeDifference> {
    let mut arm_breaks = seq.arm_a.boundaries();
    arm_breaks.extend(seq.arm_b.boundaries());
    let mut all_breaks = arm_breaks.clone();
    all_breaks.extend(seq.masses.breakpoints());
    let arm_breaks = merged_breakpoints(arm_breaks, seq.t0, seq.t3);
    let all_breaks = merged_breakpoints(all_breaks, seq.t0, seq.t3);

    let only = |mass, earth, kinetic| Part { mass, earth, kinetic };
    let mass = match seq.masses {
        MassSchedule::Absent => 0.0,
        _ => integrate(seq, config, &all_breaks, only(true, false, false))?,
    };
    let earth = if config.include_earth {
        integrate(seq, config, &arm_breaks, only(false, true, false))?
    } else {
        0.0
    };
    let kinetic = integrate(seq, config, &arm_breaks, only(false, false, true))?;
    let total = integrate(seq, config, &all_breaks, only(true, true, true))?;
    Ok(ProperTimeDifference { mass, earth, kinetic, total })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferometerResult {
    /// `ω_C Δτ + Σ extras` [rad]
    pub delta_phi_total: f64,
    /// Source-mass part [rad].
    pub phi_g: f64,
    pub phi_earth: f64,
    pub phi_kinetic: f64,
    /// Sum of externally supplied phases [rad].
    pub phi_extra: f64,
    /// Output-port population `cos²(Δφ/2)`.
    pub population: f64,
    pub proper_time: ProperTimeDifference,
}

pub fn total_phase(
    seq: &SequenceParams,
    config: &SourceConfiguration,
    species: &AtomSpecies,
    extra_phases: &[f64],
) -> Result<InterferometerResult> {
    let wc = compton_angular_frequency(species, &config.constants)?;
    let dt = proper_time_difference(seq, config, species)?;
    let phi_extra: f64 = extra_phases.iter().sum();
    let delta_phi_total = wc * dt.total + phi_extra;
    Ok(InterferometerResult {
        delta_phi_total,
        phi_g: wc * dt.mass,
        phi_earth: wc * dt.earth,
        phi_kinetic: wc * dt.kinetic,
        phi_extra,
        population: (0.5 * delta_phi_total).cos().powi(2).clamp(0.0, 1.0),
        proper_time: dt,
    })
}

/// Phase with masses minus phase without, subtracted part by part. The same
/// `extra_phases` (e.g. common lattice shifts) are applied to both runs.
pub fn differential_protocol(
    seq_with: &SequenceParams,
    seq_without: &SequenceParams,
    config: &SourceConfiguration,
    species: &AtomSpecies,
    extra_phases: &[f64],
) -> Result<f64> {
    if !seq_with.same_apart_from_masses(seq_without) {
        return Err(Error::ProtocolMismatch(
            "sequences differ in timing or trajectories, not only in the mass schedule".into(),
        ));
    }
    let on = total_phase(seq_with, config, species, extra_phases)?;
    let off = total_phase(seq_without, config, species, extra_phases)?;
    Ok((on.phi_g - off.phi_g)
        + (on.phi_earth - off.phi_earth)
        + (on.phi_kinetic - off.phi_kinetic)
        + (on.phi_extra - off.phi_extra))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TScan {
    /// `(T [s], φ_G [rad])`
    pub samples: Vec<(f64, f64)>,
    /// Least-squares slope [rad/s].
    pub slope: f64,
    pub intercept: f64,
    /// Largest deviation from the fitted line [rad].
    pub max_residual: f64,
}

/// Source-mass phase as a function of the hold time, with a straight-line fit.
pub fn phase_vs_t_scan(
    template: &SequenceTemplate,
    config: &SourceConfiguration,
    species: &AtomSpecies,
    hold_times: &[f64],
) -> Result<TScan> {
    let samples = hold_times
        .iter()
        .map(|&t| {
            let seq = template.build(t)?;
            Ok((t, total_phase(&seq, config, species, &[])?.phi_g))
        })
        .collect::<Result<Vec<_>>>()?;
    let n = samples.len() as f64;
    let mean_t = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_p = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_t).powi(2)).sum();
    ensure(samples.len() >= 2 && sxx > 0.0, || "scan needs at least two distinct hold times".into())?;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mean_t) * (s.1 - mean_p)).sum();
    let slope = sxy / sxx;
    let intercept = mean_p - slope * mean_t;
    let max_residual = samples.iter().map(|s| (s.1 - slope * s.0 - intercept).abs()).fold(0.0, f64::max);
    Ok(TScan { samples, slope, intercept, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phases::{time_dilation_phase, ShakingParams};
    use crate::stationary::find_arm_positions;
    use crate::PhysicalConstants;
    use std::f64::consts::{PI, TAU};

    fn baseline_config() -> SourceConfiguration {
        SourceConfiguration::symmetric_pair(0.03, 0.01, 1e4, PhysicalConstants::codata2018()).unwrap()
    }

    fn baseline_template(config: &SourceConfiguration) -> SequenceTemplate {
        let arms = find_arm_positions(config).unwrap();
        SequenceTemplate::new(arms.center.position, arms.inner.position, 0.1)
    }

    fn cs() -> AtomSpecies {
        AtomSpecies::cesium()
    }

    #[test]
    fn mass_factor_shapes() {
        let m = MassSchedule::Interval { on: 1.0, off: 3.0, ramp: 0.5 };
        assert_eq!(m.factor(0.5), 0.0);
        assert_eq!(m.factor(1.25), 0.5);
        assert_eq!(m.factor(2.0), 1.0);
        assert_eq!(m.factor(2.75), 0.5);
        assert_eq!(MassSchedule::interval(1.0, 3.0).factor(1.0), 1.0);
        assert_eq!(MassSchedule::AlwaysOn.factor(-7.0), 1.0);
        assert_eq!(MassSchedule::Absent.factor(2.0), 0.0);
    }

    #[test]
    fn timing_and_closure_are_validated() {
        let config = baseline_config();
        let tpl = baseline_template(&config);
        let seq = tpl.build(1.0).unwrap();
        let bad = SequenceParams::new([0.0, 1.2, 1.1, 1.3], seq.arm_a.clone(), seq.arm_b.clone(), seq.masses);
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
        let open = Trajectory::new(0.0, vec![Segment::Hold { position: Vector3::on_axis(0.0), duration: 1.2 }]).unwrap();
        let b = Trajectory::new(0.0, vec![Segment::Hold { position: Vector3::on_axis(0.01), duration: 1.2 }]).unwrap();
        let e = SequenceParams::new([0.0, 0.1, 1.1, 1.2], open, b, MassSchedule::Absent).unwrap_err();
        assert!(matches!(e, Error::InvalidTrajectory(_)));
        assert!(seq.with_masses(MassSchedule::interval(0.5, 5.0)).is_err());
        assert!(tpl.build(-1.0).is_err());
    }

    #[test]
    fn symmetric_arms_without_sources_give_nothing() {
        let config = baseline_config();
        let seq = baseline_template(&config).build(1.0).unwrap().with_masses(MassSchedule::Absent).unwrap();
        let r = total_phase(&seq, &config, &cs(), &[]).unwrap();
        assert_eq!(r.proper_time.kinetic, 0.0);
        assert_eq!(r.delta_phi_total, 0.0);
        assert_eq!(r.population, 1.0);
    }

    #[test]
    fn static_hold_reproduces_potential_difference() {
        let config = baseline_config();
        let arms = find_arm_positions(&config).unwrap();
        let seq = baseline_template(&config).build(1.0).unwrap();
        let dt = proper_time_difference(&seq, &config, &cs()).unwrap();
        let expected = arms.potential_difference / config.constants.c_squared();
        assert!((dt.mass - expected).abs() <= 1e-12 * expected);
        assert!((dt.mass - 1.6e-27).abs() < 0.05 * 1.6e-27, "{:e}", dt.mass);
        let r = total_phase(&seq, &config, &cs(), &[]).unwrap();
        assert!((r.phi_g - 0.30).abs() < 0.01, "{}", r.phi_g);
        assert!((r.population - (0.5 * r.phi_g).cos().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn dark_fringe_from_extra_phase() {
        let config = baseline_config();
        let seq = baseline_template(&config).build(1.0).unwrap().with_masses(MassSchedule::Absent).unwrap();
        let r = total_phase(&seq, &config, &cs(), &[PI]).unwrap();
        assert!(r.population < 1e-30);
    }

    #[test]
    fn shaken_arm_matches_closed_form() {
        let config = baseline_config();
        let w = TAU * 1e3;
        let mut tpl = baseline_template(&config);
        tpl.shake_b = Some((1e-7, w));
        let seq = tpl.build(1.0).unwrap().with_masses(MassSchedule::Absent).unwrap();
        let dt = proper_time_difference(&seq, &config, &cs()).unwrap();
        let k = config.constants;
        let wc = compton_angular_frequency(&cs(), &k).unwrap();
        let closed = time_dilation_phase(&ShakingParams::new(1e-7, w, 1.0).unwrap(), &cs(), &k).unwrap() / wc;
        assert!((dt.kinetic - closed).abs() <= 1e-6 * closed, "{:e} vs {closed:e}", dt.kinetic);
        assert!((wc * dt.kinetic - 207.0).abs() < 2.07);
    }

    #[test]
    fn decomposition_adds_up() {
        let config = baseline_config().with_earth(Vector3::unit_x()).unwrap();
        let mut tpl = baseline_template(&config);
        tpl.shake_b = Some((1e-7, TAU * 50.0));
        tpl.mode = MassMode::TypeII;
        let seq = tpl.build(0.4).unwrap();
        let dt = proper_time_difference(&seq, &config, &cs()).unwrap();
        let sum = dt.sum_of_parts();
        assert!((sum - dt.total).abs() <= 1e-12 * dt.total.abs().max(1e-30), "{sum:e} vs {:e}", dt.total);
    }

    #[test]
    fn differential_protocol_isolates_the_mass_term() {
        let config = baseline_config().with_earth(Vector3::unit_x()).unwrap();
        let on = baseline_template(&config).build(1.0).unwrap();
        let off = on.with_masses(MassSchedule::Absent).unwrap();
        let extras = [TAU * 1e5, -20.4];
        let phi = differential_protocol(&on, &off, &config, &cs(), &extras).unwrap();
        let direct = total_phase(&on, &config, &cs(), &[]).unwrap().phi_g;
        assert!((phi - direct).abs() <= 1e-12 * direct);
        assert!((phi - 0.30).abs() < 0.01);
        assert_eq!(differential_protocol(&off, &off, &config, &cs(), &extras).unwrap(), 0.0);
        let other = baseline_template(&config).build(0.5).unwrap();
        assert!(matches!(
            differential_protocol(&other, &off, &config, &cs(), &[]),
            Err(Error::ProtocolMismatch(_))
        ));
    }

    #[test]
    fn reversal_keeps_phase_magnitude() {
        let config = baseline_config().with_earth(Vector3::unit_x()).unwrap();
        let mut tpl = baseline_template(&config);
        tpl.mass_ramp = 0.05;
        tpl.shake_b = Some((1e-7, TAU * 20.0));
        let seq = tpl.build(0.5).unwrap();
        let fwd = total_phase(&seq, &config, &cs(), &[]).unwrap();
        let rev = total_phase(&seq.reversed(), &config, &cs(), &[]).unwrap();
        assert!((fwd.phi_g.abs() - rev.phi_g.abs()).abs() <= 1e-9 * fwd.phi_g.abs());
        assert!((fwd.delta_phi_total.abs() - rev.delta_phi_total.abs()).abs() <= 1e-9 * fwd.delta_phi_total.abs());
    }

    #[test]
    fn shorter_mass_ramps_converge_monotonically() {
        let config = baseline_config();
        let mut tpl = baseline_template(&config);
        let static_phase = total_phase(&tpl.build(1.0).unwrap(), &config, &cs(), &[]).unwrap().phi_g;
        let mut last_gap = f64::INFINITY;
        for ramp in [0.2, 0.1, 0.05, 0.01, 0.001] {
            tpl.mass_ramp = ramp;
            let phi = total_phase(&tpl.build(1.0).unwrap(), &config, &cs(), &[]).unwrap().phi_g;
            let gap = (static_phase - phi).abs();
            assert!(gap < last_gap, "ramp {ramp}: {gap:e} ≥ {last_gap:e}");
            last_gap = gap;
        }
        assert!(last_gap < 1e-3 * static_phase);
    }

    #[test]
    fn t_scan_is_linear() {
        let config = baseline_config();
        let scan = phase_vs_t_scan(&baseline_template(&config), &config, &cs(), &[0.25, 0.5, 1.0, 2.0]).unwrap();
        assert!((scan.slope - 0.30).abs() < 0.01);
        assert!(scan.max_residual < 1e-9);
        assert!((scan.samples[3].1 - 2.0 * scan.samples[2].1).abs() < 1e-12);
        assert!(phase_vs_t_scan(&baseline_template(&config), &config, &cs(), &[1.0]).is_err());
    }

    #[test]
    fn type_two_adds_transport_contribution() {
        let config = baseline_config();
        let mut tpl = baseline_template(&config);
        let one = total_phase(&tpl.build(1.0).unwrap(), &config, &cs(), &[]).unwrap().phi_g;
        tpl.mode = MassMode::TypeII;
        let two = total_phase(&tpl.build(1.0).unwrap(), &config, &cs(), &[]).unwrap().phi_g;
        assert!(two != one && two.is_finite());
    }
}

//! Closed-form phase shifts: the signal, the backgrounds and the systematics.
//!
//! All inputs are SI. Every function is linear in the interaction time it is
//! given; quadratic dependence only enters through explicit arguments
//! (amplitude, field difference, force).

use serde::{Deserialize, Serialize};

use crate::constants::{compton_angular_frequency, AtomSpecies, PhysicalConstants};
use crate::error::{Error, Result};
use crate::linalg::Mat3;

/// Prefactor of the signal scaling law [rad] at s = 1 cm, ρ = 10 g/cm³, Cs, T = 1 s.
pub const SIGNAL_PHASE_COEFFICIENT: f64 = 0.16;
/// Default quadratic Zeeman coefficient for m_F = 0 clock states [Hz/G²].
pub const QUADRATIC_ZEEMAN_HZ_PER_G2: f64 = 430.0;

type Consts = PhysicalConstants<f64>;

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("interaction time must be non-negative, got {t}")))
    }
}

/// Optical lattice beam parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    /// Well depth `V0` [J].
    pub depth: f64,
    /// [m]
    pub wavelength: f64,
    /// 1/e² intensity radius `w0` [m].
    pub waist: f64,
    /// Axial offset of the beam waist from the arm midpoint `x_w` [m].
    pub waist_offset: f64,
}

impl LatticeParams {
    pub fn new(depth: f64, wavelength: f64, waist: f64, waist_offset: f64) -> Result<Self> {
        if !(depth > 0.0 && wavelength > 0.0 && waist > 0.0) || !waist_offset.is_finite() {
            return Err(Error::InvalidInput(format!(
                "lattice needs V0, λ, w0 > 0 (got {depth:e}, {wavelength:e}, {waist:e})"
            )));
        }
        Ok(Self { depth, wavelength, waist, waist_offset })
    }

    /// Depth given as `V0/h` in Hz.
    pub fn from_depth_hz(depth_hz: f64, wavelength: f64, waist: f64, waist_offset: f64, k: &Consts) -> Result<Self> {
        Self::new(depth_hz * k.h, wavelength, waist, waist_offset)
    }

    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }

    /// `z_R = π w0² / λ`
    pub fn rayleigh_range(&self) -> f64 {
        std::f64::consts::PI * self.waist * self.waist / self.wavelength
    }
}

/// Periodic displacement `A sin(ω t)` of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShakingParams {
    /// [m]
    pub amplitude: f64,
    /// [rad/s]
    pub angular_frequency: f64,
    /// Total shaking time `T''` [s].
    pub duration: f64,
}

impl ShakingParams {
    pub fn new(amplitude: f64, angular_frequency: f64, duration: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && angular_frequency > 0.0 && duration >= 0.0) {
            return Err(Error::InvalidInput("shaking needs A ≥ 0, ω > 0, T'' ≥ 0".into()));
        }
        Ok(Self { amplitude, angular_frequency, duration })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudParams {
    /// Atomic density `n` [m⁻³].
    pub density: f64,
    /// `Δn/n` between the arms.
    pub density_asymmetry: f64,
}

impl CloudParams {
    pub fn new(density: f64, density_asymmetry: f64) -> Result<Self> {
        if !(density >= 0.0) || !(density_asymmetry.abs() <= 1.0) {
            return Err(Error::InvalidInput("cloud needs n ≥ 0 and |Δn/n| ≤ 1".into()));
        }
        Ok(Self { density, density_asymmetry })
    }

    pub fn density_difference(&self) -> f64 {
        self.density * self.density_asymmetry
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticParams {
    /// Field difference between the arms `ΔB` [G].
    pub field_difference: f64,
    /// Quadratic Zeeman coefficient [Hz/G²].
    pub quadratic_coefficient: f64,
}

impl MagneticParams {
    pub fn new(field_difference: f64, quadratic_coefficient: f64) -> Result<Self> {
        if !(quadratic_coefficient > 0.0) {
            return Err(Error::InvalidInput("quadratic Zeeman coefficient must be positive".into()));
        }
        Ok(Self { field_difference, quadratic_coefficient })
    }
}

/// Signal phase `m ΔU T / ħ`.
pub fn ab_phase(delta_u: f64, species: &AtomSpecies, t: f64, k: &Consts) -> Result<f64> {
    check_time(t)?;
    Ok(species.mass * delta_u * t / k.hbar)
}

/// Scaling law for the signal with `L = 3R`, `R ≈ 0.72 s`:
/// `0.16 rad · (s/cm)² · (ρ / 10 g cm⁻³) · (m/m_Cs) · (T/s)`.
pub fn closed_form_signal_phase(s: f64, density: f64, species: &AtomSpecies, t: f64) -> f64 {
    let cs = AtomSpecies::cesium();
    SIGNAL_PHASE_COEFFICIENT * (s / 0.01).powi(2) * (density / 1e4) * (species.mass / cs.mass) * t
}

/// Earth background `g s ω_C T / c²` for a vertical arm separation `s`.
pub fn earth_background_phase(s: f64, species: &AtomSpecies, t: f64, k: &Consts) -> Result<f64> {
    let wc = compton_angular_frequency(species, k)?;
    Ok(k.g_earth * s * wc * t / k.c_squared())
}

/// Lattice light shift common to both arms, `V0 T / ħ`.
pub fn lattice_common_phase(lattice: &LatticeParams, t: f64, k: &Consts) -> f64 {
    lattice.depth * t / k.hbar
}

/// Differential light shift from Gaussian-beam divergence when the waist sits
/// at `x_w ≠ 0`: `−2 V0 T x_w s / (z_R² ħ)`.
pub fn lattice_differential_phase(lattice: &LatticeParams, s: f64, t: f64, k: &Consts) -> f64 {
    let zr = lattice.rayleigh_range();
    -2.0 * lattice.depth * t * lattice.waist_offset * s / (zr * zr * k.hbar)
}

/// Mean-field shift `4π ħ a Δn T / m`.
pub fn mean_field_phase(cloud: &CloudParams, species: &AtomSpecies, t: f64, k: &Consts) -> f64 {
    4.0 * std::f64::consts::PI * k.hbar * species.scattering_length * cloud.density_difference() * t / species.mass
}

/// Harmonic frequencies of a lattice site [rad/s]. The lattice axis is x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapFrequencies {
    pub axial: f64,
    pub transverse: f64,
}

impl TrapFrequencies {
    /// Same axial frequency with the transverse frequency replaced.
    pub fn with_transverse(self, transverse: f64) -> Self {
        Self { transverse, ..self }
    }

    /// `[ω_x, ω_y, ω_z]`
    pub fn as_array(&self) -> [f64; 3] {
        [self.axial, self.transverse, self.transverse]
    }
}

/// Site frequencies of `−V0 cos²(kx)` with a Gaussian transverse envelope:
/// axial `k √(2 V0 / m)`, transverse `(2/w0) √(V0 / m)`.
pub fn lattice_trap_frequencies(lattice: &LatticeParams, species: &AtomSpecies) -> TrapFrequencies {
    let v_over_m = lattice.depth / species.mass;
    TrapFrequencies {
        axial: lattice.wavenumber() * (2.0 * v_over_m).sqrt(),
        transverse: 2.0 / lattice.waist * v_over_m.sqrt(),
    }
}

/// Zero-point phase change caused by the source-mass curvature.
///
/// Each trap frequency shifts by `Δω_i = ∂ᵢ²U / (2 ω_i)`; the zero-point energy
/// `Σ ħ ω_i / 2` then adds `(T/2) Σ Δω_i` per arm. Returns arm A minus arm B.
pub fn curvature_phase(hess_a: &Mat3<f64>, hess_b: &Mat3<f64>, trap: [f64; 3], t: f64) -> Result<f64> {
    check_time(t)?;
    if trap.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidInput(format!("trap frequencies must be positive, got {trap:?}")));
    }
    let (da, db) = (hess_a.diag(), hess_b.diag());
    let shift: f64 = (0..3).map(|i| (da[i] - db[i]) / (2.0 * trap[i])).sum();
    Ok(0.5 * t * shift)
}

/// Order-of-magnitude curvature phase rate `(2/3) π G ρ / ω` [rad/s]: the
/// shift of one trap frequency inside a sphere of density `ρ`.
pub fn curvature_order_estimate(density: f64, trap_frequency: f64, k: &Consts) -> f64 {
    2.0 / 3.0 * std::f64::consts::PI * k.big_g * density / trap_frequency
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcePhase {
    /// Shift of the site centre `F / (2 k² V0)` [m].
    pub displacement: f64,
    /// `F² T / (4 k² V0 ħ)` [rad]
    pub phase: f64,
}

/// Dispersive phase from a residual force `F` on an atom held in the lattice.
pub fn force_dispersive_phase(force: f64, lattice: &LatticeParams, t: f64, k: &Consts) -> ForcePhase {
    let k2 = lattice.wavenumber().powi(2);
    ForcePhase {
        displacement: force / (2.0 * k2 * lattice.depth),
        phase: force * force * t / (4.0 * k2 * lattice.depth * k.hbar),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagneticPhase {
    /// `coefficient · ΔB² · T` [cycles]
    pub cycles: f64,
    /// `2π · cycles` [rad]
    pub radians: f64,
}

/// Quadratic Zeeman phase from a field difference between the arms.
pub fn magnetic_phase(mag: &MagneticParams, t: f64) -> MagneticPhase {
    let cycles = mag.quadratic_coefficient * mag.field_difference.powi(2) * t;
    MagneticPhase { cycles, radians: std::f64::consts::TAU * cycles }
}

/// Time-dilation phase of a shaken arm, `ω_C A² ω² T'' / (4 c²)`.
pub fn time_dilation_phase(shake: &ShakingParams, species: &AtomSpecies, k: &Consts) -> Result<f64> {
    let wc = compton_angular_frequency(species, k)?;
    let (a, w) = (shake.amplitude, shake.angular_frequency);
    Ok(wc * a * a * w * w * shake.duration / (4.0 * k.c_squared()))
}

/// Fractional shift of the lattice light cone, `ΔU / c²`.
pub fn lattice_metric_shift(delta_u: f64, k: &Consts) -> f64 {
    delta_u / k.c_squared()
}

/// Phase accumulated by a clock of angular frequency `ω` over `Δτ`.
pub fn clock_phase(omega: f64, delta_tau: f64) -> f64 {
    omega * delta_tau
}

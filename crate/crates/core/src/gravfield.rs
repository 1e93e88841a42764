//! Newtonian field of superposed uniform-density spheres.
//!
//! Sign convention: `U ≤ 0` and `U → 0` at infinity, so a test particle of mass
//! `m` has potential energy `m·U`. Wave packets are treated as points, which is
//! adequate while they are much smaller than the source masses. Points inside
//! a sphere use the interior solution; no bore or access hole is modelled.
//!
//! The optional Earth term is `g·(n̂·r)` with `n̂` pointing up.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::num::Real;

/// Minimum clearance allowed between two sphere surfaces [m].
pub const OVERLAP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere<T> {
    pub center: Vec3<T>,
    pub radius: T,
    pub density: T,
}

impl<T: Real> Sphere<T> {
    pub fn new(center: Vec3<T>, radius: T, density: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidConfiguration(format!("radius must be positive, got {radius}")));
        }
        if !(density > T::zero()) || !density.is_finite() {
            return Err(Error::InvalidConfiguration(format!("density must be positive, got {density}")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidConfiguration("sphere center is not finite".into()));
        }
        Ok(Self { center, radius, density })
    }

    pub fn mass(&self) -> T {
        T::lit(4.0 / 3.0) * T::PI() * self.radius.powi(3) * self.density
    }

    pub fn contains(&self, point: &Vec3<T>) -> bool {
        (*point - self.center).norm() < self.radius
    }

    /// `G·M` for this sphere.
    fn gm(&self, big_g: T) -> T {
        big_g * self.mass()
    }

    /// Surface gravity `(4π/3)·G·ρ·R` [m/s²].
    pub fn surface_gravity(&self, big_g: T) -> T {
        self.gm(big_g) / (self.radius * self.radius)
    }
}

/// Potential of one sphere at `point` [m²/s²].
///
/// Outside: `−GM/r`. Inside: `−GM(3R² − r²)/(2R³)`.
pub fn sphere_potential<T: Real>(point: &Vec3<T>, sphere: &Sphere<T>, constants: &PhysicalConstants<T>) -> T {
    let gm = sphere.gm(constants.big_g);
    let r = (*point - sphere.center).norm();
    let big_r = sphere.radius;
    if r >= big_r {
        -gm / r
    } else {
        -gm * (T::lit(3.0) * big_r * big_r - r * r) / (T::lit(2.0) * big_r.powi(3))
    }
}

/// Potential, gradient and Hessian of one sphere.
fn sphere_sample<T: Real>(point: &Vec3<T>, sphere: &Sphere<T>, big_g: T) -> (T, Vec3<T>, Mat3<T>) {
    let gm = sphere.gm(big_g);
    let d = *point - sphere.center;
    let r2 = d.norm_squared();
    let r = r2.sqrt();
    let big_r = sphere.radius;
    if r >= big_r {
        let r3 = r2 * r;
        let potential = -gm / r;
        let gradient = d.scale(gm / r3);
        let hessian = Mat3::identity().scale(gm / r3) - Mat3::outer(&d, &d).scale(T::lit(3.0) * gm / (r3 * r2));
        (potential, gradient, hessian)
    } else {
        let r3 = big_r.powi(3);
        let potential = -gm * (T::lit(3.0) * big_r * big_r - r2) / (T::lit(2.0) * r3);
        let k = gm / r3;
        (potential, d.scale(k), Mat3::identity().scale(k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfiguration<T> {
    pub spheres: Vec<Sphere<T>>,
    pub include_earth: bool,
    /// Unit vector pointing up.
    pub earth_axis: Vec3<T>,
    pub constants: PhysicalConstants<T>,
}

impl<T: Real> SourceConfiguration<T> {
    /// Validates sphere placement and the Earth axis.
    pub fn new(spheres: Vec<Sphere<T>>, constants: PhysicalConstants<T>) -> Result<Self> {
        let cfg = Self { spheres, include_earth: false, earth_axis: Vec3::unit_x(), constants };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Two identical spheres centred at `±L/2` on the x axis.
    pub fn symmetric_pair(separation: T, radius: T, density: T, constants: PhysicalConstants<T>) -> Result<Self> {
        let half = separation / T::lit(2.0);
        let a = Sphere::new(Vec3::on_axis(-half), radius, density)?;
        let b = Sphere::new(Vec3::on_axis(half), radius, density)?;
        Self::new(vec![a, b], constants)
    }

    pub fn single(sphere: Sphere<T>, constants: PhysicalConstants<T>) -> Result<Self> {
        Self::new(vec![sphere], constants)
    }

    /// Adds the uniform Earth term along `axis` (normalised here).
    pub fn with_earth(mut self, axis: Vec3<T>) -> Result<Self> {
        let n = axis.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::InvalidConfiguration("earth axis must be a non-zero vector".into()));
        }
        self.include_earth = true;
        self.earth_axis = axis.scale(T::one() / n);
        Ok(self)
    }

    pub fn without_earth(&self) -> Self {
        Self { include_earth: false, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let tol = T::lit(OVERLAP_TOLERANCE);
        for (i, a) in self.spheres.iter().enumerate() {
            Sphere::new(a.center, a.radius, a.density)?;
            for (j, b) in self.spheres.iter().enumerate().skip(i + 1) {
                let gap = (a.center - b.center).norm() - (a.radius + b.radius);
                if a == b {
                    return Err(Error::InvalidConfiguration(format!("spheres {i} and {j} are duplicates")));
                }
                if gap < -tol {
                    return Err(Error::Overlap(i, j));
                }
            }
        }
        if self.include_earth && (self.earth_axis.norm() - T::one()).abs() > T::tol(1e-12) {
            return Err(Error::InvalidConfiguration("earth axis is not a unit vector".into()));
        }
        Ok(())
    }

    /// Density at `point` (0 outside every sphere).
    pub fn local_density(&self, point: &Vec3<T>) -> T {
        self.spheres
            .iter()
            .filter(|s| s.contains(point))
            .map(|s| s.density)
            .fold(T::zero(), |a, b| a + b)
    }

    /// Largest density among the sources.
    pub fn max_density(&self) -> T {
        self.spheres.iter().fold(T::zero(), |a, s| a.max(s.density))
    }

    /// Largest `(4π/3)·G·ρ·R` among the sources; the natural gradient scale.
    pub fn gradient_scale(&self) -> T {
        self.spheres
            .iter()
            .fold(T::zero(), |a, s| a.max(s.surface_gravity(self.constants.big_g)))
    }

    /// `4π·G·ρ_max`; the natural curvature scale.
    pub fn curvature_scale(&self) -> T {
        T::lit(4.0) * T::PI() * self.constants.big_g * self.max_density()
    }

    /// Axis-aligned box enclosing every sphere.
    pub fn bounding_box(&self) -> (Vec3<T>, Vec3<T>) {
        let mut lo = Vec3::new(T::infinity(), T::infinity(), T::infinity());
        let mut hi = -lo;
        for s in &self.spheres {
            for k in 0..3 {
                lo = lo.with_component(k, lo[k].min(s.center[k] - s.radius));
                hi = hi.with_component(k, hi[k].max(s.center[k] + s.radius));
            }
        }
        (lo, hi)
    }

    /// Largest sphere radius; used as the length scale.
    pub fn length_scale(&self) -> T {
        self.spheres.iter().fold(T::zero(), |a, s| a.max(s.radius))
    }
}

/// Potential, gradient and Hessian of the total field at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample<T> {
    pub point: Vec3<T>,
    /// [m²/s²]
    pub potential: T,
    /// [m/s²]
    pub gradient: Vec3<T>,
    /// [s⁻²]
    pub hessian: Mat3<T>,
}

/// Field of the whole configuration at `point`, including the Earth term if enabled.
pub fn field_sample<T: Real>(point: &Vec3<T>, config: &SourceConfiguration<T>) -> FieldSample<T> {
    let mut sample = mass_field_sample(point, config);
    if config.include_earth {
        let g = config.constants.g_earth;
        sample.potential = sample.potential + g * config.earth_axis.dot(point);
        sample.gradient += config.earth_axis.scale(g);
    }
    sample
}

/// Field of the source masses alone, whatever `include_earth` says.
pub fn mass_field_sample<T: Real>(point: &Vec3<T>, config: &SourceConfiguration<T>) -> FieldSample<T> {
    let mut potential = T::zero();
    let mut gradient = Vec3::zero();
    let mut hessian = Mat3::zero();
    for s in &config.spheres {
        let (u, g, h) = sphere_sample(point, s, config.constants.big_g);
        potential = potential + u;
        gradient += g;
        hessian += h;
    }
    FieldSample { point: *point, potential, gradient, hessian }
}

/// Source-mass potential at `point`.
pub fn mass_potential<T: Real>(point: &Vec3<T>, config: &SourceConfiguration<T>) -> T {
    config
        .spheres
        .iter()
        .map(|s| sphere_potential(point, s, &config.constants))
        .fold(T::zero(), |a, b| a + b)
}

/// `U(x_a) − U(x_b)` from the source masses only.
pub fn potential_difference<T: Real>(config: &SourceConfiguration<T>, x_a: &Vec3<T>, x_b: &Vec3<T>) -> T {
    mass_potential(x_a, config) - mass_potential(x_b, config)
}

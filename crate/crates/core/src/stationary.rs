//! Stationary points of the source-mass potential.
//!
//! Only the source masses enter here; the uniform Earth term has no
//! stationary points and is ignored even when the configuration enables it.
//!
//! For the symmetric pair the axis carries three stationary points: the
//! midpoint `x_A = 0` (axial maximum, transverse minimum: a saddle) and the
//! mirror pair `±x_B` just inside each sphere. Inside a uniform sphere the
//! near sphere contributes `(4π/3)Gρ` to every diagonal Hessian entry, which
//! outweighs the far sphere's tidal term, so `±x_B` are minima of `U` in the
//! full 3-D sense and along the axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gravfield::{mass_field_sample, SourceConfiguration};
use crate::linalg::{Mat3, Vec3};
use crate::num::Real;

/// Uniform samples of `∂U/∂x` between the two centres used for bracketing.
pub const AXIAL_GRID_SAMPLES: usize = 10_000;
/// Bisection stops once the bracket is this narrow [m].
pub const BISECTION_WIDTH: f64 = 1e-12;
/// Gradient residual bound relative to `(4π/3)·G·ρ·R`.
pub const GRADIENT_RESIDUAL: f64 = 1e-12;
/// Eigenvalues below this fraction of `4π·G·ρ` are flagged degenerate.
pub const DEGENERATE_EIGENVALUE: f64 = 1e-9;
/// Newton iteration cap for the 3-D refinement.
pub const MAX_NEWTON_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Minimum,
    Maximum,
    Saddle,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Minimum => "minimum",
            Kind::Maximum => "maximum",
            Kind::Saddle => "saddle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint<T> {
    pub position: Vec3<T>,
    /// Source-mass potential at the point [m²/s²].
    pub potential: T,
    /// Ascending.
    pub hessian_eigenvalues: [T; 3],
    pub eigenvectors: [Vec3<T>; 3],
    pub kind: Kind,
    /// Set when any eigenvalue is within the degeneracy tolerance of zero.
    pub degenerate: bool,
    /// `|∇U|` at the position [m/s²].
    pub gradient_residual: T,
}

impl<T: Real> StationaryPoint<T> {
    /// Eigenvalue whose eigenvector is most closely aligned with `axis`.
    pub fn eigenvalue_along(&self, axis: &Vec3<T>) -> T {
        let mut best = 0;
        let mut best_dot = T::neg_infinity();
        for (i, v) in self.eigenvectors.iter().enumerate() {
            let d = v.dot(axis).abs();
            if d > best_dot {
                best_dot = d;
                best = i;
            }
        }
        self.hessian_eigenvalues[best]
    }
}

fn residual_bound<T: Real>(config: &SourceConfiguration<T>) -> T {
    T::tol(GRADIENT_RESIDUAL) * config.gradient_scale()
}

fn kind_from_eigenvalues<T: Real>(values: &[T; 3], tol: T) -> (Kind, bool) {
    let degenerate = values.iter().any(|v| v.abs() < tol);
    let pos = values.iter().filter(|v| **v >= tol).count();
    let neg = values.iter().filter(|v| **v <= -tol).count();
    let kind = match (pos, neg) {
        (_, 0) if pos > 0 => Kind::Minimum,
        (0, _) if neg > 0 => Kind::Maximum,
        _ => Kind::Saddle,
    };
    (kind, degenerate)
}

/// Classifies a point that is already stationary.
pub fn classify<T: Real>(point: &Vec3<T>, config: &SourceConfiguration<T>) -> Result<StationaryPoint<T>> {
    let sample = mass_field_sample(point, config);
    let residual = sample.gradient.norm();
    let bound = residual_bound(config);
    if !(residual <= bound) {
        return Err(Error::NotStationary {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(build_point(*point, sample.potential, &sample.hessian, residual, config))
}

fn build_point<T: Real>(
    position: Vec3<T>,
    potential: T,
    hessian: &Mat3<T>,
    residual: T,
    config: &SourceConfiguration<T>,
) -> StationaryPoint<T> {
    let (values, vectors) = hessian.symmetric_eigen();
    let tol = T::tol(DEGENERATE_EIGENVALUE) * config.curvature_scale();
    let (kind, degenerate) = kind_from_eigenvalues(&values, tol);
    StationaryPoint {
        position,
        potential,
        hessian_eigenvalues: values,
        eigenvectors: vectors,
        kind,
        degenerate,
        gradient_residual: residual,
    }
}

/// Half separation of a symmetric x-axis pair, or an error describing why the
/// configuration is not one.
pub fn symmetric_half_separation<T: Real>(config: &SourceConfiguration<T>) -> Result<T> {
    let unsupported = |why: &str| Err(Error::UnsupportedConfiguration(why.to_string()));
    if config.spheres.len() != 2 {
        return unsupported("axial search needs exactly two spheres");
    }
    let (a, b) = (&config.spheres[0], &config.spheres[1]);
    let off_axis = |s: &crate::gravfield::Sphere<T>| s.center.y != T::zero() || s.center.z != T::zero();
    if off_axis(a) || off_axis(b) {
        return unsupported("sphere centres must lie on the x axis");
    }
    let tol = T::tol(1e-12) * a.radius.max(b.radius);
    if (a.center.x + b.center.x).abs() > tol
        || (a.radius - b.radius).abs() > tol
        || (a.density - b.density).abs() > T::tol(1e-12) * a.density
    {
        return unsupported("spheres must be identical and mirror-symmetric about x = 0");
    }
    Ok(a.center.x.abs())
}

fn axial_gradient<T: Real>(x: T, config: &SourceConfiguration<T>) -> (T, T) {
    let s = mass_field_sample(&Vec3::on_axis(x), config);
    (s.gradient.x, s.hessian.get(0, 0))
}

/// Finds every stationary point on the open segment between the centres of a
/// symmetric pair, sorted by `x`.
///
/// Sign changes of `∂U/∂x` on a uniform grid are bisected to
/// [`BISECTION_WIDTH`] and then polished with Newton steps (kept inside the
/// bracket) until the gradient residual bound is met. `x = 0` is always
/// included.
pub fn find_axial_stationary_points<T: Real>(config: &SourceConfiguration<T>) -> Result<Vec<StationaryPoint<T>>> {
    let half = symmetric_half_separation(config)?;
    let bound = residual_bound(config);
    let n = AXIAL_GRID_SAMPLES;
    let step = (half + half) / T::from_count(n);
    let xs: Vec<T> = (1..n).map(|i| -half + step * T::from_count(i)).collect();
    let gs: Vec<T> = xs.iter().map(|&x| axial_gradient(x, config).0).collect();

    let mut roots: Vec<T> = Vec::new();
    for i in 0..xs.len() - 1 {
        let (g0, g1) = (gs[i], gs[i + 1]);
        if g0 == T::zero() {
            roots.push(xs[i]);
            continue;
        }
        if g0.signum() != g1.signum() && g1 != T::zero() {
            roots.push(polish_root(xs[i], xs[i + 1], config, bound)?);
        }
    }
    if gs[gs.len() - 1] == T::zero() {
        roots.push(xs[xs.len() - 1]);
    }

    // The midpoint of a mirror pair has exactly zero axial gradient.
    let merge = T::lit(BISECTION_WIDTH).max(step * T::epsilon()) * T::lit(1e3);
    for r in roots.iter_mut() {
        if r.abs() <= merge {
            *r = T::zero();
        }
    }
    if !roots.iter().any(|r| *r == T::zero()) {
        roots.push(T::zero());
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= merge);

    roots.into_iter().map(|x| classify(&Vec3::on_axis(x), config)).collect()
}

fn polish_root<T: Real>(mut lo: T, mut hi: T, config: &SourceConfiguration<T>, bound: T) -> Result<T> {
    let mut g_lo = axial_gradient(lo, config).0;
    let width = T::lit(BISECTION_WIDTH);
    for _ in 0..200 {
        if (hi - lo) <= width {
            break;
        }
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = axial_gradient(mid, config).0;
        if g_mid == T::zero() {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    let mut x = (lo + hi) / T::lit(2.0);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let (g, dg) = axial_gradient(x, config);
        if g.abs() <= bound {
            return Ok(x);
        }
        let next = x - g / dg;
        if !next.is_finite() || next < lo || next > hi || next == x {
            break;
        }
        x = next;
    }
    let g = axial_gradient(x, config).0;
    if g.abs() <= bound {
        Ok(x)
    } else {
        Err(Error::NoStationaryPoint(format!(
            "axial root near x = {x} did not reach the gradient bound (|g| = {})",
            g.abs()
        )))
    }
}

/// Newton iteration on `∇U = 0` from `seed` using the analytic Hessian.
pub fn refine_full_3d<T: Real>(seed: &Vec3<T>, config: &SourceConfiguration<T>) -> Result<StationaryPoint<T>> {
    let bound = residual_bound(config);
    let (lo, hi) = config.bounding_box();
    let center = (lo + hi).scale(T::lit(0.5));
    let escape = (hi - lo).norm() * T::lit(100.0);
    let mut x = *seed;
    for iteration in 0..=MAX_NEWTON_ITERATIONS {
        let s = mass_field_sample(&x, config);
        let residual = s.gradient.norm();
        if residual <= bound {
            return Ok(build_point(x, s.potential, &s.hessian, residual, config));
        }
        if iteration == MAX_NEWTON_ITERATIONS {
            break;
        }
        let step = s.hessian.solve(&s.gradient).ok_or_else(|| {
            Error::NoStationaryPoint(format!("singular Hessian at {:?}", x))
        })?;
        x = x - step;
        if !x.is_finite() || (x - center).norm() > escape {
            return Err(Error::NoStationaryPoint(format!(
                "Newton iteration from {seed:?} left the source region"
            )));
        }
    }
    Err(Error::NoStationaryPoint(format!(
        "Newton iteration from {seed:?} did not converge in {MAX_NEWTON_ITERATIONS} steps"
    )))
}

/// The two interferometer arm positions of a symmetric pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmPositions<T> {
    /// Midpoint saddle `x_A = 0`.
    pub center: StationaryPoint<T>,
    /// Inner stationary point on the `+x` side, `x_B`.
    pub inner: StationaryPoint<T>,
    /// `s = |x_B − x_A|` [m].
    pub separation: T,
    /// `U(x_A) − U(x_B)` [m²/s²].
    pub potential_difference: T,
}

/// Locates `x_A` and `+x_B` for a symmetric pair.
pub fn find_arm_positions<T: Real>(config: &SourceConfiguration<T>) -> Result<ArmPositions<T>> {
    let points = find_axial_stationary_points(config)?;
    let center = *points
        .iter()
        .find(|p| p.position.x == T::zero())
        .ok_or_else(|| Error::NoSaddle("midpoint is not stationary".into()))?;
    let inner = points
        .iter()
        .filter(|p| p.position.x > T::zero())
        .max_by(|a, b| a.position.x.partial_cmp(&b.position.x).unwrap())
        .copied()
        .ok_or_else(|| {
            Error::NoSaddle(
                "no inner stationary point resolvable between the midpoint and the sphere centre".into(),
            )
        })?;
    Ok(ArmPositions {
        center,
        inner,
        separation: (inner.position - center.position).norm(),
        potential_difference: center.potential - inner.potential,
    })
}

/// Relative residual of the inner force balance `(L/2 − x)(x + L/2)² = R³`,
/// valid when `x` lies inside the near sphere.
pub fn force_balance_residual<T: Real>(separation: T, radius: T, x_inner: T) -> T {
    let half = separation / T::lit(2.0);
    let r3 = radius.powi(3);
    ((half - x_inner) * (x_inner + half).powi(2) - r3) / r3
}

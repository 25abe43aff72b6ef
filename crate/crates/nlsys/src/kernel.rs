//! Jump kernels J(y) = a(y/|y|) / |y|^{n+2s} on the line, their ellipticity
//! certificates, the Fourier-symbol normalization constant, and the exact
//! exterior-mass integral consumed by the discretizer.

use crate::error::{Error, Result};
use crate::special::log_gamma;

/// Even power-law jump kernel in one space dimension.
///
/// The unit sphere degenerates to the two points {±1}, so the spectral
/// density is a single weight a(+1) = a(−1); evenness holds by construction.
/// The full kernel is J(y) = normalization · weight / |y|^{1+2s}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralKernel {
    s: f64,
    dim: usize,
    weight: f64,
    normalization: f64,
}

impl SpectralKernel {
    /// Kernel whose nonlocal operator has Fourier symbol |ξ|^{2s}.
    pub fn fractional_laplacian(s: f64) -> Result<Self> {
        Self::weighted_even(s, 1.0)
    }

    /// Even kernel with spectral weight `weight`, normalized by the
    /// Fourier-symbol constant of the same order.
    pub fn weighted_even(s: f64, weight: f64) -> Result<Self> {
        let c = frac_lap_constant(1.0, s)?;
        Self::with_normalization(s, weight, c)
    }

    /// Fully explicit constructor; `normalization` replaces the default
    /// Fourier-symbol constant.
    pub fn with_normalization(s: f64, weight: f64, normalization: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("kernel order must lie in (0,1), got {s}")));
        }
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::Domain(format!(
                "spectral weight must be finite and nonnegative, got {weight}"
            )));
        }
        if !(normalization > 0.0) || !normalization.is_finite() {
            return Err(Error::Domain(format!(
                "normalization must be positive, got {normalization}"
            )));
        }
        Ok(Self { s, dim: 1, weight, normalization })
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Spectral density evaluated at a sphere direction (±1 in dim 1).
    pub fn density(&self, theta: f64) -> f64 {
        debug_assert!(theta == 1.0 || theta == -1.0);
        self.weight
    }

    /// Combined one-sided strength: normalization · a(+1). This is the
    /// constant `c` in J(y) = c/|y|^{1+2s} on either side.
    pub fn one_sided_weight(&self) -> f64 {
        self.normalization * self.weight
    }

    /// Kernel value J(y); diverges as y → 0.
    pub fn eval(&self, y: f64) -> f64 {
        debug_assert!(y != 0.0, "kernel evaluated at its singularity");
        self.one_sided_weight() * y.abs().powf(-(1.0 + 2.0 * self.s))
    }
}

/// Certified ellipticity constants of a kernel's spectral density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityCertificate {
    /// Lower constant: min over directions ν of ∫ |ν·θ|^{2s} a(θ) dθ.
    pub c1: f64,
    /// Upper bound on the density itself.
    pub c2: f64,
    /// Number of ν samples inspected (1 in dim 1, where the sphere is ±1).
    pub grid_resolution: usize,
}

/// Verify the two-sided ellipticity bounds of the spectral density and
/// return the certified constants. In dim 1 the sphere integral is the
/// two-point sum a(+1) + a(−1) and |ν·θ| = 1, so c1 = 2·a and c2 = a.
pub fn check_ellipticity(kernel: &SpectralKernel) -> Result<EllipticityCertificate> {
    let nu_samples = [1.0_f64];
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0_f64;
    for nu in nu_samples {
        let mut lower = 0.0;
        for theta in [-1.0, 1.0] {
            let a = kernel.density(theta);
            c2 = c2.max(a);
            lower += (nu * theta).abs().powf(2.0 * kernel.order()) * a;
        }
        c1 = c1.min(lower);
    }
    if !(c1 > 0.0) {
        return Err(Error::EllipticityViolation(format!(
            "lower ellipticity constant must be positive, computed {c1}"
        )));
    }
    Ok(EllipticityCertificate { c1, c2, grid_resolution: nu_samples.len() })
}

/// Normalization constant 4^s Γ(n/2 + s) / (π^{n/2} |Γ(−s)|) that gives the
/// power kernel the Fourier symbol |ξ|^{2s}.
pub fn frac_lap_constant(n: f64, s: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::Domain(format!("dimension must be at least 1, got {n}")));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("order must lie in (0,1), got {s}")));
    }
    let log = s * 4.0_f64.ln() + log_gamma(0.5 * n + s)?
        - 0.5 * n * std::f64::consts::PI.ln()
        - log_gamma(-s)?;
    Ok(log.exp())
}

/// Mass the kernel assigns to the exterior of (−R, R), seen from an interior
/// point: ∫_{|z| ≥ R} J(x − z) dz = c [(R−x)^{−2s} + (R+x)^{−2s}] / (2s)
/// with c the one-sided kernel strength.
pub fn exterior_mass(kernel: &SpectralKernel, x: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("domain half-width must be positive, got {r}")));
    }
    if x.abs() >= r {
        return Err(Error::BoundaryDivergence { x, r });
    }
    let two_s = 2.0 * kernel.order();
    let c = kernel.one_sided_weight();
    Ok(c * ((r - x).powf(-two_s) + (r + x).powf(-two_s)) / two_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_certificate() {
        let k = SpectralKernel::weighted_even(0.5, 0.7).unwrap();
        let cert = check_ellipticity(&k).unwrap();
        assert!((cert.c1 - 1.4).abs() < 1e-12);
        assert!((cert.c2 - 0.7).abs() < 1e-15);
        assert_eq!(cert.grid_resolution, 1);
    }

    #[test]
    fn degenerate_density_rejected() {
        let k = SpectralKernel::weighted_even(0.5, 0.0).unwrap();
        assert!(matches!(check_ellipticity(&k), Err(Error::EllipticityViolation(_))));
    }

    #[test]
    fn evenness_and_scaling() {
        let k = SpectralKernel::fractional_laplacian(0.3).unwrap();
        for y in [0.1, 0.77, 3.0] {
            assert_eq!(k.eval(y), k.eval(-y));
            let t = 1.7;
            let lhs = k.eval(t * y);
            let rhs = t.powf(-(1.0 + 0.6)) * k.eval(y);
            assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs());
        }
    }

    #[test]
    fn exterior_mass_basics() {
        let k = SpectralKernel::with_normalization(0.5, 1.0, 1.0).unwrap();
        // x = 0: two equal one-sided contributions R^{-2s}/(2s) each.
        let m = exterior_mass(&k, 0.0, 1.0).unwrap();
        assert!((m - 2.0).abs() < 1e-14);
        assert!(matches!(
            exterior_mass(&k, 1.0, 1.0),
            Err(Error::BoundaryDivergence { .. })
        ));
        assert!(matches!(
            exterior_mass(&k, -1.2, 1.0),
            Err(Error::BoundaryDivergence { .. })
        ));
    }
}

//! Closed-form Lamb-Oseen vortex: Gaussian vorticity profile, azimuthal
//! velocity profile, and superpositions over point-vortex configurations.

use std::f64::consts::PI;

use crate::error::{Result, VlabError};
use crate::grid::{GridSpec, ScalarField2D};
use crate::pointvortex::VortexConfiguration;

/// phi(r) = (1 - exp(-r^2/4)) / (2 pi r^2), continued by 1/(8 pi) at r = 0.
///
/// This is the azimuthal velocity profile divided by r: |v_G| = r * phi(r).
pub fn phi(r: f64) -> f64 {
    let s = 0.25 * r * r;
    if s == 0.0 {
        1.0 / (8.0 * PI)
    } else {
        -f64::exp_m1(-s) / (8.0 * PI * s)
    }
}

/// g(r) = exp(-r^2/4) / (4 pi), the radial Gaussian vorticity profile.
pub fn g(r: f64) -> f64 {
    (-0.25 * r * r).exp() / (4.0 * PI)
}

/// Radial profile pair (phi, g).
pub fn phi_g(r: f64) -> (f64, f64) {
    (phi(r), g(r))
}

/// Gaussian vorticity profile G(xi) = exp(-|xi|^2/4)/(4 pi).
pub fn gaussian(xi: [f64; 2]) -> f64 {
    g((xi[0] * xi[0] + xi[1] * xi[1]).sqrt())
}

/// Velocity profile v_G(xi) = xi_perp * phi(|xi|); vanishes at the origin.
pub fn velocity_profile(xi: [f64; 2]) -> [f64; 2] {
    let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
    let p = phi(r);
    [-xi[1] * p, xi[0] * p]
}

/// Vorticity and velocity profiles (G, v_G) at a point.
pub fn gaussian_profile(xi: [f64; 2]) -> (f64, [f64; 2]) {
    (gaussian(xi), velocity_profile(xi))
}

/// A Lamb-Oseen vortex of circulation `gamma` aged `t` at viscosity `nu`.
#[derive(Debug, Clone, Copy)]
pub struct Oseen {
    pub gamma: f64,
    pub nu: f64,
    pub t: f64,
    pub center: [f64; 2],
}

impl Oseen {
    pub fn new(gamma: f64, nu: f64, t: f64, center: [f64; 2]) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(VlabError::InvalidParam(format!("viscosity must be positive, got {nu}")));
        }
        if !(t > 0.0) {
            return Err(VlabError::InvalidParam(format!("time must be positive, got {t}")));
        }
        Ok(Self { gamma, nu, t, center })
    }

    /// Core length sqrt(nu t).
    pub fn core(&self) -> f64 {
        (self.nu * self.t).sqrt()
    }

    pub fn vorticity(&self, x: [f64; 2]) -> f64 {
        let c = self.core();
        let xi = [(x[0] - self.center[0]) / c, (x[1] - self.center[1]) / c];
        self.gamma / (self.nu * self.t) * gaussian(xi)
    }

    pub fn velocity(&self, x: [f64; 2]) -> [f64; 2] {
        let c = self.core();
        let xi = [(x[0] - self.center[0]) / c, (x[1] - self.center[1]) / c];
        let v = velocity_profile(xi);
        [self.gamma / c * v[0], self.gamma / c * v[1]]
    }
}

/// Vorticity and velocity of a single Oseen vortex at a point.
pub fn oseen_fields(
    gamma: f64,
    nu: f64,
    t: f64,
    center: [f64; 2],
    x: [f64; 2],
) -> Result<(f64, [f64; 2])> {
    let v = Oseen::new(gamma, nu, t, center)?;
    Ok((v.vorticity(x), v.velocity(x)))
}

/// Pointwise sum of Oseen vortices centered at the configuration's positions.
pub fn superposition(
    c: &VortexConfiguration,
    nu: f64,
    t: f64,
    grid: GridSpec,
) -> Result<ScalarField2D> {
    if !(nu > 0.0) || !(t > 0.0) {
        return Err(VlabError::InvalidParam("superposition requires nu > 0 and t > 0".into()));
    }
    let core = (nu * t).sqrt();
    let amp: Vec<f64> = c.circulations().iter().map(|g| g / (nu * t)).collect();
    let pos = c.positions().to_vec();
    Ok(ScalarField2D::from_fn(grid, move |x, y| {
        let mut w = 0.0;
        for (z, a) in pos.iter().zip(&amp) {
            let xi = [(x - z[0]) / core, (y - z[1]) / core];
            w += a * gaussian(xi);
        }
        w
    }))
}

/// Velocity of the Oseen superposition at a point (sum of single-vortex fields).
pub fn superposition_velocity(c: &VortexConfiguration, nu: f64, t: f64, x: [f64; 2]) -> [f64; 2] {
    let core = (nu * t).sqrt();
    let mut u = [0.0, 0.0];
    for (z, g) in c.positions().iter().zip(c.circulations()) {
        let xi = [(x[0] - z[0]) / core, (x[1] - z[1]) / core];
        let v = velocity_profile(xi);
        u[0] += g / core * v[0];
        u[1] += g / core * v[1];
    }
    u
}

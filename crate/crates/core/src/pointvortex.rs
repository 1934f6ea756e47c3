//! Helmholtz-Kirchhoff point-vortex dynamics and its viscous regularization.

use std::f64::consts::PI;

use crate::error::{Result, VlabError};
use crate::oseen::velocity_profile;

/// N point vortices: positions (length) and circulations (length^2/time).
#[derive(Debug, Clone, PartialEq)]
pub struct VortexConfiguration {
    positions: Vec<[f64; 2]>,
    circulations: Vec<f64>,
}

impl VortexConfiguration {
    pub fn new(positions: Vec<[f64; 2]>, circulations: Vec<f64>) -> Result<Self> {
        if positions.is_empty() || positions.len() != circulations.len() {
            return Err(VlabError::InvalidParam(
                "need N >= 1 vortices with matching position/circulation counts".into(),
            ));
        }
        if circulations.iter().any(|g| *g == 0.0 || !g.is_finite()) {
            return Err(VlabError::InvalidParam("all circulations must be nonzero".into()));
        }
        let c = Self { positions, circulations };
        if c.len() > 1 && !(c.min_pairwise_distance() > 0.0) {
            return Err(VlabError::InvalidParam("positions must be pairwise distinct".into()));
        }
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn circulations(&self) -> &[f64] {
        &self.circulations
    }

    /// Total absolute circulation |gamma| = sum |gamma_i|.
    pub fn total_abs_circulation(&self) -> f64 {
        self.circulations.iter().map(|g| g.abs()).sum()
    }

    pub fn min_pairwise_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let dx = self.positions[i][0] - self.positions[j][0];
                let dy = self.positions[i][1] - self.positions[j][1];
                d = d.min((dx * dx + dy * dy).sqrt());
            }
        }
        d
    }

    fn with_positions(&self, positions: Vec<[f64; 2]>) -> Self {
        Self { positions, circulations: self.circulations.clone() }
    }
}

/// Right-hand side selector for the center dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rhs {
    /// Singular Helmholtz-Kirchhoff kernel.
    Pw,
    /// Gaussian-regularized kernel with viscosity `nu`.
    Pw2 { nu: f64 },
}

/// Inviscid point-vortex velocities z_i' = (1/2 pi) sum_{j != i} gamma_j (z_i - z_j)^perp / |z_i - z_j|^2.
pub fn pw_velocity(c: &VortexConfiguration) -> Result<Vec<[f64; 2]>> {
    let n = c.len();
    if n > 1 && !(c.min_pairwise_distance() > 0.0) {
        return Err(VlabError::InvalidParam("coincident vortex positions".into()));
    }
    let z = c.positions();
    let g = c.circulations();
    let mut v = vec![[0.0; 2]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = z[i][0] - z[j][0];
            let dy = z[i][1] - z[j][1];
            let r2 = dx * dx + dy * dy;
            let f = g[j] / (2.0 * PI * r2);
            v[i][0] += -dy * f;
            v[i][1] += dx * f;
        }
    }
    Ok(v)
}

/// Viscous velocities z_i' = sum_{j != i} (gamma_j / sqrt(nu t)) v_G(z_ij / sqrt(nu t)).
pub fn pw2_velocity(c: &VortexConfiguration, nu: f64, t: f64) -> Result<Vec<[f64; 2]>> {
    if !(nu > 0.0) || !(t > 0.0) {
        return Err(VlabError::InvalidParam("pw2 requires nu > 0 and t > 0".into()));
    }
    let core = (nu * t).sqrt();
    let z = c.positions();
    let g = c.circulations();
    let n = c.len();
    let mut v = vec![[0.0; 2]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let xi = [(z[i][0] - z[j][0]) / core, (z[i][1] - z[j][1]) / core];
            let p = velocity_profile(xi);
            v[i][0] += g[j] / core * p[0];
            v[i][1] += g[j] / core * p[1];
        }
    }
    Ok(v)
}

/// Termination state of an integrated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStatus {
    Completed,
    /// Minimum pairwise distance fell below the collision threshold.
    CollisionTerminated { t: f64, dist: f64 },
}

/// Time series of configurations with integrator metadata.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<VortexConfiguration>,
    pub dt: f64,
    pub rhs: Rhs,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn state_at(&self, idx: usize) -> &VortexConfiguration {
        &self.states[idx]
    }

    pub fn final_state(&self) -> &VortexConfiguration {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

fn rhs_eval(rhs: Rhs, c: &VortexConfiguration, t: f64) -> Result<Vec<[f64; 2]>> {
    match rhs {
        Rhs::Pw => pw_velocity(c),
        Rhs::Pw2 { nu } => pw2_velocity(c, nu, t),
    }
}

fn advance(c: &VortexConfiguration, v: &[[f64; 2]], dt: f64) -> VortexConfiguration {
    let positions = c
        .positions()
        .iter()
        .zip(v)
        .map(|(z, dz)| [z[0] + dt * dz[0], z[1] + dt * dz[1]])
        .collect();
    c.with_positions(positions)
}

/// Classical fixed-step RK4 integration of the chosen center dynamics.
///
/// Aborts with `CollisionTerminated` when the minimum pairwise distance
/// drops below 1e-6 times its initial value.
pub fn integrate(
    rhs: Rhs,
    c0: &VortexConfiguration,
    t_span: (f64, f64),
    dt: f64,
) -> Result<Trajectory> {
    let (t_start, t_end) = t_span;
    if !(dt > 0.0) {
        return Err(VlabError::InvalidParam("dt must be positive".into()));
    }
    if !(t_end > t_start) {
        return Err(VlabError::InvalidParam("t_end must exceed t_start".into()));
    }
    if let Rhs::Pw2 { .. } = rhs {
        if !(t_start > 0.0) {
            return Err(VlabError::InvalidParam("pw2 integration requires t_start > 0".into()));
        }
    }
    let threshold = if c0.len() > 1 { 1e-6 * c0.min_pairwise_distance() } else { 0.0 };

    let mut times = vec![t_start];
    let mut states = vec![c0.clone()];
    let mut t = t_start;
    let mut state = c0.clone();
    let mut status = TrajectoryStatus::Completed;

    while t < t_end - 1e-12 * (t_end - t_start) {
        let step = dt.min(t_end - t);
        let k1 = rhs_eval(rhs, &state, t)?;
        let s2 = advance(&state, &k1, 0.5 * step);
        let k2 = rhs_eval(rhs, &s2, t + 0.5 * step)?;
        let s3 = advance(&state, &k2, 0.5 * step);
        let k3 = rhs_eval(rhs, &s3, t + 0.5 * step)?;
        let s4 = advance(&state, &k3, step);
        let k4 = rhs_eval(rhs, &s4, t + step)?;
        let combined: Vec<[f64; 2]> = (0..state.len())
            .map(|i| {
                [
                    (k1[i][0] + 2.0 * k2[i][0] + 2.0 * k3[i][0] + k4[i][0]) / 6.0,
                    (k1[i][1] + 2.0 * k2[i][1] + 2.0 * k3[i][1] + k4[i][1]) / 6.0,
                ]
            })
            .collect();
        state = advance(&state, &combined, step);
        t += step;
        if state.len() > 1 {
            let dist = state.min_pairwise_distance();
            if dist < threshold {
                status = TrajectoryStatus::CollisionTerminated { t, dist };
                break;
            }
        }
        times.push(t);
        states.push(state.clone());
    }

    Ok(Trajectory { times, states, dt, rhs, status })
}

/// Classical first integrals of the point-vortex flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegrals {
    /// Interaction energy H = -(1/4 pi) sum_{i != j} gamma_i gamma_j log |z_i - z_j|.
    pub h: f64,
    /// Linear impulse M = sum gamma_i z_i.
    pub m: [f64; 2],
    /// Angular impulse I = sum gamma_i |z_i|^2.
    pub i: f64,
}

pub fn first_integrals(c: &VortexConfiguration) -> Result<FirstIntegrals> {
    if c.len() > 1 && !(c.min_pairwise_distance() > 0.0) {
        return Err(VlabError::InvalidParam("coincident vortex positions".into()));
    }
    let z = c.positions();
    let g = c.circulations();
    let mut h = 0.0;
    for i in 0..c.len() {
        for j in 0..c.len() {
            if i == j {
                continue;
            }
            let dx = z[i][0] - z[j][0];
            let dy = z[i][1] - z[j][1];
            h -= g[i] * g[j] * 0.5 * (dx * dx + dy * dy).ln();
        }
    }
    h /= 4.0 * PI;
    let mut m = [0.0, 0.0];
    let mut imp = 0.0;
    for i in 0..c.len() {
        m[0] += g[i] * z[i][0];
        m[1] += g[i] * z[i][1];
        imp += g[i] * (z[i][0] * z[i][0] + z[i][1] * z[i][1]);
    }
    Ok(FirstIntegrals { h, m, i: imp })
}

/// Minimal center distance over the trajectory and turnover time T0 = d^2/|gamma|.
pub fn geometry(traj: &Trajectory) -> Result<(f64, f64)> {
    let state0 = traj.state_at(0);
    if state0.len() < 2 {
        return Err(VlabError::InvalidParam(
            "geometry requires at least two vortices (d undefined for N = 1)".into(),
        ));
    }
    let d = traj
        .states
        .iter()
        .map(|s| s.min_pairwise_distance())
        .fold(f64::INFINITY, f64::min);
    let t0 = d * d / state0.total_abs_circulation();
    Ok((d, t0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_vortex_is_steady() {
        let c = VortexConfiguration::new(vec![[1.0, 2.0]], vec![3.0]).unwrap();
        assert_eq!(pw_velocity(&c).unwrap(), vec![[0.0, 0.0]]);
        assert_eq!(pw2_velocity(&c, 0.1, 1.0).unwrap(), vec![[0.0, 0.0]]);
        let traj = integrate(Rhs::Pw, &c, (0.0, 1.0), 0.1).unwrap();
        assert_eq!(traj.final_state().positions()[0], [1.0, 2.0]);
    }

    #[test]
    fn dipole_velocities() {
        // gamma = (G, -G) separated by d: both move at G/(2 pi d), same direction
        let g = 2.0;
        let d = 1.5;
        let c = VortexConfiguration::new(vec![[0.0, 0.0], [d, 0.0]], vec![g, -g]).unwrap();
        let v = pw_velocity(&c).unwrap();
        let expect = g / (2.0 * PI * d);
        // positive vortex on the left: the pair translates in +y
        assert_relative_eq!(v[0][1], expect, max_relative = 1e-14);
        assert_relative_eq!(v[1][1], expect, max_relative = 1e-14);
        assert_relative_eq!(v[0][0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(v[1][0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn corotating_pair_velocities_opposite() {
        let g = 1.0;
        let d = 2.0;
        let c = VortexConfiguration::new(vec![[0.0, 0.0], [d, 0.0]], vec![g, g]).unwrap();
        let v = pw_velocity(&c).unwrap();
        let expect = g / (2.0 * PI * d);
        assert_relative_eq!(v[0][1], -expect, max_relative = 1e-14);
        assert_relative_eq!(v[1][1], expect, max_relative = 1e-14);
    }

    #[test]
    fn pw2_reduces_to_pw_for_small_core() {
        let c = VortexConfiguration::new(
            vec![[0.0, 0.0], [1.0, 0.3], [-0.4, 0.8]],
            vec![1.0, -0.5, 2.0],
        )
        .unwrap();
        // sqrt(nu t)/d <= 1e-3 makes the Gaussian regularization invisible
        let d = c.min_pairwise_distance();
        let core = 1e-3 * d;
        let (nu, t) = (core * core, 1.0);
        let v1 = pw_velocity(&c).unwrap();
        let v2 = pw2_velocity(&c, nu, t).unwrap();
        for (a, b) in v1.iter().zip(&v2) {
            let scale = (a[0] * a[0] + a[1] * a[1]).sqrt();
            assert!((a[0] - b[0]).abs() <= 1e-12 * scale);
            assert!((a[1] - b[1]).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn pw2_pair_speed_matches_profile() {
        // d / sqrt(nu t) = 2: each speed = (gamma / sqrt(nu t)) |v_G(2)|
        let gamma = 1.3;
        let (nu, t) = (0.25f64, 1.0);
        let core = (nu * t).sqrt();
        let d = 2.0 * core;
        let c = VortexConfiguration::new(vec![[0.0, 0.0], [d, 0.0]], vec![gamma, gamma]).unwrap();
        let v = pw2_velocity(&c, nu, t).unwrap();
        let expect = gamma / core * (1.0 - (-1.0f64).exp()) / (4.0 * PI);
        let speed = (v[0][0] * v[0][0] + v[0][1] * v[0][1]).sqrt();
        assert_relative_eq!(speed, expect, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(VortexConfiguration::new(vec![[0.0, 0.0], [0.0, 0.0]], vec![1.0, 1.0]).is_err());
        assert!(VortexConfiguration::new(vec![[0.0, 0.0]], vec![0.0]).is_err());
        let c = VortexConfiguration::new(vec![[0.0, 0.0], [1.0, 0.0]], vec![1.0, 1.0]).unwrap();
        assert!(pw2_velocity(&c, -1.0, 1.0).is_err());
        assert!(pw2_velocity(&c, 1.0, 0.0).is_err());
        assert!(integrate(Rhs::Pw2 { nu: 1.0 }, &c, (0.0, 1.0), 0.1).is_err());
    }
}

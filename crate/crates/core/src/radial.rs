//! Radial grids with panel Gauss-Legendre quadrature, angular-mode radial
//! profiles, and the mode potentials Omega_n.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, VlabError};

/// Reference 4-point Gauss-Legendre rule on [-1, 1].
const GL_NODES: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const GL_WEIGHTS: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];

/// Nodes in (0, R_max] grouped into panels, each carrying a 4-point
/// Gauss-Legendre rule; geometric panel growth refines the grid near zero.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    breaks: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    /// Geometrically graded grid: the first node lands near `r_first` and the
    /// last panel ends at `r_max`.
    pub fn geometric(r_first: f64, r_max: f64, panels: usize) -> Result<Self> {
        if !(r_first > 0.0 && r_max > r_first) || panels < 4 {
            return Err(VlabError::InvalidParam(
                "radial grid needs 0 < r_first < r_max and at least 4 panels".into(),
            ));
        }
        // First panel [0, delta] puts its first GL node at r_first.
        let delta = r_first / (0.5 * (1.0 + GL_NODES[0]));
        // Find the growth ratio q so the panel widths delta * q^i fill [0, r_max].
        let target = r_max / delta;
        let total = |q: f64| -> f64 {
            if (q - 1.0).abs() < 1e-12 {
                panels as f64
            } else {
                (q.powi(panels as i32) - 1.0) / (q - 1.0)
            }
        };
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        while total(hi) < target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = 0.5 * (lo + hi);
        let mut breaks = Vec::with_capacity(panels + 1);
        breaks.push(0.0);
        let mut w = delta;
        for _ in 0..panels {
            breaks.push(breaks.last().unwrap() + w);
            w *= q;
        }
        // Snap the final break exactly onto r_max.
        *breaks.last_mut().unwrap() = r_max;
        let mut nodes = Vec::with_capacity(4 * panels);
        let mut weights = Vec::with_capacity(4 * panels);
        for p in 0..panels {
            let (a, b) = (breaks[p], breaks[p + 1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for g in 0..4 {
                nodes.push(mid + half * GL_NODES[g]);
                weights.push(half * GL_WEIGHTS[g]);
            }
        }
        Ok(Self { breaks, nodes, weights })
    }

    /// Grid used throughout: R_max = 20, 100 panels (400 nodes), first node
    /// near 1e-3. The Gaussian tail at R_max is ~1e-43.
    pub fn standard() -> Arc<Self> {
        Arc::new(Self::geometric(1e-3, 20.0, 100).expect("standard grid parameters are valid"))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn panel_count(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Quadrature of integrand samples f(r_j) against dr.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn integrate_complex(&self, f: &[Complex64]) -> Complex64 {
        f.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Integral of a degree-7 interpolant of `f` (through the 8 nodes of the
    /// panel containing node `j` and a neighbor) from the panel's left break
    /// to node `j`; used for partial prefix integrals.
    fn partial_to_node(&self, f: &[Complex64], j: usize) -> Complex64 {
        let p = j / 4;
        let sp = if p == 0 { 0 } else { p - 1 };
        let lo = 4 * sp;
        const M: usize = 8;
        let center = 0.5 * (self.nodes[lo] + self.nodes[lo + M - 1]);
        let scale = 0.5 * (self.nodes[lo + M - 1] - self.nodes[lo]);
        let t_lo = (self.breaks[p] - center) / scale;
        let t_hi = (self.nodes[j] - center) / scale;
        // Solve V^T w = m for the quadrature weights of the interpolant:
        // V[row][d] = t_row^d, m[d] = scale * int_{t_lo}^{t_hi} t^d dt.
        let mut a = [[0.0f64; M]; M];
        let mut rhs = [0.0f64; M];
        for d in 0..M {
            for row in 0..M {
                let t = (self.nodes[lo + row] - center) / scale;
                a[d][row] = t.powi(d as i32);
            }
            let dd = (d + 1) as f64;
            rhs[d] = scale * (t_hi.powi(d as i32 + 1) - t_lo.powi(d as i32 + 1)) / dd;
        }
        for c in 0..M {
            let piv = (c..M)
                .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
                .unwrap();
            a.swap(c, piv);
            rhs.swap(c, piv);
            let d = a[c][c];
            for r in (c + 1)..M {
                let fac = a[r][c] / d;
                for cc in c..M {
                    a[r][cc] -= fac * a[c][cc];
                }
                rhs[r] -= fac * rhs[c];
            }
        }
        let mut w = [0.0f64; M];
        for c in (0..M).rev() {
            let mut s = rhs[c];
            for cc in (c + 1)..M {
                s -= a[c][cc] * w[cc];
            }
            w[c] = s / a[c][c];
        }
        (0..M).map(|row| f[lo + row] * w[row]).sum()
    }
}

/// Complex amplitude a(r_j) of an angular-Fourier mode n on a radial grid.
#[derive(Debug, Clone)]
pub struct RadialModeProfile {
    grid: Arc<RadialGrid>,
    mode: usize,
    amplitudes: Vec<Complex64>,
}

impl RadialModeProfile {
    pub fn new(grid: Arc<RadialGrid>, mode: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(VlabError::InvalidParam("amplitude count must match grid nodes".into()));
        }
        Ok(Self { grid, mode, amplitudes })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, mode: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, mode, amplitudes }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn mode(&self) -> usize {
        self.mode
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn max_abs(&self) -> f64 {
        self.amplitudes.iter().fold(0.0f64, |m, a| m.max(a.norm()))
    }

    /// Mode-n X-norm: ||w||^2 = 2 pi int G^-1 |a|^2 r dr.
    pub fn x_norm(&self) -> f64 {
        let mut total = 0.0;
        for ((&r, &w), a) in self.grid.nodes().iter().zip(self.grid.weights()).zip(&self.amplitudes)
        {
            let n2 = a.norm_sqr();
            if n2 == 0.0 {
                continue;
            }
            let log_term = n2.ln() + 0.25 * r * r + (4.0 * std::f64::consts::PI).ln();
            total += log_term.exp() * r * w;
        }
        (2.0 * std::f64::consts::PI * total).sqrt()
    }

    /// Checks the small-r regularity a(r) = O(r^n) by fitting the first three
    /// nodes, and the decay at R_max.
    pub fn check_regularity(&self) -> Result<()> {
        let peak = self.max_abs();
        if peak == 0.0 {
            return Ok(());
        }
        let tail = self.amplitudes.last().unwrap().norm();
        if tail > 1e-10 * peak {
            return Err(VlabError::InvalidParam(format!(
                "profile does not decay at R_max: tail/max = {:.3e}",
                tail / peak
            )));
        }
        if self.mode >= 1 {
            let r = self.grid.nodes();
            let fitted_ok = (0..3).all(|j| {
                let scale = (r[j] / r[2]).powi(self.mode as i32);
                self.amplitudes[j].norm() <= 10.0 * scale * self.amplitudes[2].norm() + 1e-12 * peak
            });
            if !fitted_ok {
                return Err(VlabError::InvalidParam(
                    "profile violates a(r) = O(r^n) near the origin".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Result of the Omega_n quadrature, with a tail-truncation flag.
#[derive(Debug, Clone)]
pub struct OmegaPotential {
    pub profile: RadialModeProfile,
    /// Set when the integrand at the outermost node exceeds 1e-12, so the
    /// neglected tail beyond R_max may matter.
    pub tail_truncated: bool,
}

/// Mode potential Omega_n(r) = (1/4n) [ int_0^r (r'/r)^n r' w dr'
///                                    + int_r^inf (r/r')^n r' w dr' ].
///
/// Composite quadrature on the radial grid; the tail beyond R_max is
/// neglected and flagged when the last-node integrand is not negligible.
pub fn omega_potential(p: &RadialModeProfile) -> Result<OmegaPotential> {
    let n = p.mode();
    if n == 0 {
        return Err(VlabError::InvalidParam("omega_potential requires mode n >= 1".into()));
    }
    let grid = p.grid();
    let r = grid.nodes();
    let m = grid.len();
    let npow = n as i32;

    // f_in = r^(n+1) w, f_out = r^(1-n) w
    let f_in: Vec<Complex64> = (0..m).map(|j| p.amplitudes()[j] * r[j].powi(npow + 1)).collect();
    let f_out: Vec<Complex64> = (0..m).map(|j| p.amplitudes()[j] * r[j].powi(1 - npow)).collect();

    let panels = grid.panel_count();
    let panel_sum = |f: &[Complex64], p: usize| -> Complex64 {
        (0..4).map(|g| f[4 * p + g] * grid.weights()[4 * p + g]).sum()
    };
    let mut prefix_in = vec![Complex64::new(0.0, 0.0); panels + 1];
    let mut suffix_out = vec![Complex64::new(0.0, 0.0); panels + 1];
    for q in 0..panels {
        prefix_in[q + 1] = prefix_in[q] + panel_sum(&f_in, q);
    }
    for q in (0..panels).rev() {
        suffix_out[q] = suffix_out[q + 1] + panel_sum(&f_out, q);
    }

    let quarter = 1.0 / (4.0 * n as f64);
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let pj = j / 4;
        let inner = prefix_in[pj] + grid.partial_to_node(&f_in, j);
        let panel_rest = panel_sum(&f_out, pj) - grid.partial_to_node(&f_out, j);
        let outer = suffix_out[pj + 1] + panel_rest;
        let val = quarter * (inner * r[j].powi(-npow) + outer * r[j].powi(npow));
        out.push(val);
    }

    let tail_truncated = f_out.last().map(|v| v.norm() > 1e-12).unwrap_or(false)
        || f_in.last().map(|v| v.norm() * r[m - 1].powi(-2 * npow) > 1e-12).unwrap_or(false);
    Ok(OmegaPotential {
        profile: RadialModeProfile::new(grid.clone(), n, out)?,
        tail_truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oseen::{g as gauss_radial, phi};
    use approx::assert_relative_eq;

    #[test]
    fn quadrature_integrates_gaussian_polynomials() {
        // int_0^inf r e^{-r^2/4} r^m dr = 2^{m+1} Gamma(m/2 + 1), m = 0..8
        let grid = RadialGrid::standard();
        let gamma_half: [f64; 9] = [
            1.0,
            0.886226925452758,
            1.0,
            1.329340388179137,
            2.0,
            3.323350970447843,
            6.0,
            11.631728396567448,
            24.0,
        ];
        for m in 0..=8usize {
            let exact = 2f64.powi(m as i32 + 1) * gamma_half[m];
            let f: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&r| r * (-0.25 * r * r).exp() * r.powi(m as i32))
                .collect();
            let got = grid.integrate(&f);
            assert!(
                (got - exact).abs() <= 1e-10 * exact.abs(),
                "m = {m}: got {got}, exact {exact}"
            );
        }
    }

    #[test]
    fn first_node_near_requested() {
        let grid = RadialGrid::standard();
        assert!(grid.nodes()[0] > 0.0);
        assert!((grid.nodes()[0] - 1e-3).abs() < 2e-4, "r1 = {}", grid.nodes()[0]);
        assert_eq!(grid.len(), 400);
        assert_relative_eq!(grid.r_max(), 20.0);
    }

    #[test]
    fn omega_one_of_r_g_is_r_phi() {
        // Omega_1[r g(r)] = r phi(r)
        let grid = RadialGrid::standard();
        let p = RadialModeProfile::from_fn(grid, 1, |r| {
            Complex64::new(r * gauss_radial(r), 0.0)
        });
        let os = omega_potential(&p).unwrap();
        assert!(!os.tail_truncated);
        let mut err = 0.0f64;
        for (j, &r) in os.profile.grid().nodes().iter().enumerate() {
            err = err.max((os.profile.amplitudes()[j].re - r * phi(r)).abs());
        }
        assert!(err <= 1e-8, "sup err {err}");
    }

    #[test]
    fn omega_of_zero_is_zero_and_mode_zero_rejected() {
        let grid = RadialGrid::standard();
        let zero = RadialModeProfile::from_fn(grid.clone(), 2, |_| Complex64::new(0.0, 0.0));
        let os = omega_potential(&zero).unwrap();
        assert_eq!(os.profile.max_abs(), 0.0);
        let radial = RadialModeProfile::from_fn(grid, 0, |r| Complex64::new(r, 0.0));
        assert!(omega_potential(&radial).is_err());
    }

    #[test]
    fn omega_ode_residual_small() {
        // The potential solves -Omega'' - Omega'/r + n^2 Omega / r^2 = w/2
        // (the 1/(4n) kernel normalization), checked for a Gaussian bump at
        // n = 2 by local polynomial differentiation.
        let grid = RadialGrid::standard();
        let p = RadialModeProfile::from_fn(grid.clone(), 2, |r| {
            Complex64::new(r * r * (-0.25 * r * r).exp(), 0.0)
        });
        let os = omega_potential(&p).unwrap();
        let r = grid.nodes();
        let vals: Vec<f64> = os.profile.amplitudes().iter().map(|a| a.re).collect();

        // degree-11 interpolation through the 12 nodes of the three panels
        // centered on node j's panel, differentiated at r_j (middle panel
        // only, so the evaluation point is never near the stencil edge)
        let fit_derivs = |j: usize| -> (f64, f64) {
            let panel = (j / 4).clamp(1, grid.panel_count() - 2);
            let lo = 4 * (panel - 1);
            let m = 12usize;
            let span = r[lo + m - 1] - r[lo];
            let mut a = vec![vec![0.0f64; m]; m];
            let mut b = vec![0.0f64; m];
            for row in 0..m {
                let x = (r[lo + row] - r[j]) / span;
                let mut cur = 1.0;
                for d in 0..m {
                    a[row][d] = cur;
                    cur *= x;
                }
                b[row] = vals[lo + row];
            }
            // Gaussian elimination with partial pivoting
            for c in 0..m {
                let piv = (c..m)
                    .max_by(|&p, &q| a[p][c].abs().partial_cmp(&a[q][c].abs()).unwrap())
                    .unwrap();
                a.swap(c, piv);
                b.swap(c, piv);
                let d = a[c][c];
                for rr in (c + 1)..m {
                    let f = a[rr][c] / d;
                    for cc in c..m {
                        a[rr][cc] -= f * a[c][cc];
                    }
                    b[rr] -= f * b[c];
                }
            }
            let mut coef = vec![0.0; m];
            for c in (0..m).rev() {
                let mut s = b[c];
                for cc in (c + 1)..m {
                    s -= a[c][cc] * coef[cc];
                }
                coef[c] = s / a[c][c];
            }
            (coef[1] / span, 2.0 * coef[2] / (span * span))
        };

        let mut sup = 0.0f64;
        for j in 0..r.len() {
            if r[j] < 0.5 || r[j] > 10.0 {
                continue;
            }
            let (d1, d2) = fit_derivs(j);
            let lhs = -d2 - d1 / r[j] + 4.0 * vals[j] / (r[j] * r[j]);
            let rhs = 0.5 * p.amplitudes()[j].re;
            sup = sup.max((lhs - rhs).abs());
        }
        assert!(sup <= 1e-6, "ODE residual sup {sup}");
    }

    #[test]
    fn regularity_check() {
        let grid = RadialGrid::standard();
        let good = RadialModeProfile::from_fn(grid.clone(), 2, |r| {
            Complex64::new(r * r * (-0.25 * r * r).exp(), 0.0)
        });
        assert!(good.check_regularity().is_ok());
        let bad = RadialModeProfile::from_fn(grid, 2, |r| Complex64::new((-0.25 * r * r).exp(), 0.0));
        assert!(bad.check_regularity().is_err());
    }
}
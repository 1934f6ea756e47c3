//! Periodic-box grids, FFT plumbing, and sampled scalar/vector fields.
//!
//! All fields live on a square box of side `length` centered at `origin`,
//! discretized with `n` points per side (power of two). Spectral
//! coefficients follow the usual DFT layout with wavenumbers
//! `k_m = 2*pi*freq(m)/L`, `freq(m) = m` for `m <= n/2` and `m - n` above.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, VlabError};

/// Geometry of a periodic square box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    length: f64,
    origin: [f64; 2],
}

impl GridSpec {
    /// A box of side `length` centered at `origin` with `n` points per side.
    pub fn new(n: usize, length: f64, origin: [f64; 2]) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(VlabError::InvalidGrid(format!(
                "n_points must be a power of two >= 16, got {n}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(VlabError::InvalidGrid(format!(
                "box_length must be positive and finite, got {length}"
            )));
        }
        Ok(Self { n, length, origin })
    }

    /// Box centered at the coordinate origin.
    pub fn centered(n: usize, length: f64) -> Result<Self> {
        Self::new(n, length, [0.0, 0.0])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    /// Grid spacing h = L/n.
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Physical coordinate of index `i` along axis `axis`.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] - 0.5 * self.length + i as f64 * self.h()
    }

    /// Coordinates relative to the box center.
    pub fn rel_coord(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.h()
    }

    /// Signed integer frequency for spectral index `m`.
    pub fn freq(&self, m: usize) -> i64 {
        if m <= self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    /// Wavenumber 2*pi*freq/L for spectral index `m`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.freq(m) as f64 / self.length
    }

    /// Cell area h^2 used as the quadrature weight for grid sums.
    pub fn cell_area(&self) -> f64 {
        self.h() * self.h()
    }

    /// True if spectral index `m` is the (unpaired) Nyquist mode.
    pub fn is_nyquist(&self, m: usize) -> bool {
        2 * m == self.n
    }

    /// True if the index lies outside the 2/3 dealiasing ball (|freq| > n/3).
    pub fn dealias_cut(&self, m: usize) -> bool {
        3 * self.freq(m).unsigned_abs() as usize > self.n
    }
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

fn fft_rows(a: &mut Array2<Complex64>, forward: bool) {
    let n = a.ncols();
    let fft = plan(n, forward);
    a.as_slice_mut()
        .expect("row-major layout")
        .par_chunks_mut(n)
        .for_each(|row| fft.process(row));
}

fn transpose(a: &Array2<Complex64>) -> Array2<Complex64> {
    let (r, c) = a.dim();
    let mut out = Array2::zeros((c, r));
    Zip::indexed(&mut out).par_for_each(|(i, j), v| *v = a[[j, i]]);
    out
}

/// Unnormalized forward 2D FFT of a real field.
pub fn fft2(values: &Array2<f64>) -> Array2<Complex64> {
    let mut a = values.mapv(|v| Complex64::new(v, 0.0));
    fft_rows(&mut a, true);
    let mut at = transpose(&a);
    fft_rows(&mut at, true);
    transpose(&at)
}

/// Inverse 2D FFT normalized by 1/n^2; returns the real part.
pub fn ifft2_real(coeffs: &Array2<Complex64>) -> Array2<f64> {
    let n2 = (coeffs.nrows() * coeffs.ncols()) as f64;
    let mut a = coeffs.clone();
    fft_rows(&mut a, false);
    let mut at = transpose(&a);
    fft_rows(&mut at, false);
    let a = transpose(&at);
    a.mapv(|v| v.re / n2)
}

/// Real scalar samples on a periodic grid with a lazily cached spectrum.
#[derive(Debug)]
pub struct ScalarField2D {
    grid: GridSpec,
    values: Array2<f64>,
    spectral: OnceLock<Array2<Complex64>>,
}

impl Clone for ScalarField2D {
    fn clone(&self) -> Self {
        let spectral = OnceLock::new();
        if let Some(s) = self.spectral.get() {
            let _ = spectral.set(s.clone());
        }
        Self { grid: self.grid, values: self.values.clone(), spectral }
    }
}

impl ScalarField2D {
    pub fn from_values(grid: GridSpec, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (grid.n(), grid.n()) {
            return Err(VlabError::InvalidGrid(format!(
                "value array shape {:?} does not match grid {}^2",
                values.dim(),
                grid.n()
            )));
        }
        Ok(Self { grid, values, spectral: OnceLock::new() })
    }

    /// Sample `f(x, y)` at the grid nodes.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64 + Sync) -> Self {
        let n = grid.n();
        let mut values = Array2::zeros((n, n));
        Zip::indexed(&mut values)
            .par_for_each(|(ix, iy), v| *v = f(grid.coord(0, ix), grid.coord(1, iy)));
        Self { grid, values, spectral: OnceLock::new() }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: Array2::zeros((grid.n(), grid.n())), spectral: OnceLock::new() }
    }

    /// Rebuild a field from spectral coefficients (imaginary parts discarded).
    pub fn from_spectral(grid: GridSpec, coeffs: Array2<Complex64>) -> Self {
        let values = ifft2_real(&coeffs);
        let field = Self { grid, values, spectral: OnceLock::new() };
        let _ = field.spectral.set(coeffs);
        field
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Forward transform, cached after the first call.
    pub fn spectral(&self) -> &Array2<Complex64> {
        self.spectral.get_or_init(|| fft2(&self.values))
    }

    /// Error naming the first non-finite sample, if any.
    pub fn check_finite(&self) -> Result<()> {
        for ((ix, iy), v) in self.values.indexed_iter() {
            if !v.is_finite() {
                return Err(VlabError::NonFinite { ix, iy });
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Grid L^p norm (midpoint quadrature); `None` means the sup norm.
    pub fn lp_norm(&self, p: Option<f64>) -> f64 {
        match p {
            None => self.max_abs(),
            Some(p) => {
                let s: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
                (s * self.grid.cell_area()).powf(1.0 / p)
            }
        }
    }

    /// Pointwise linear combination a*self + b*other.
    pub fn axpy(&self, a: f64, other: &ScalarField2D, b: f64) -> ScalarField2D {
        let mut values = Array2::zeros(self.values.dim());
        Zip::from(&mut values)
            .and(&self.values)
            .and(&other.values)
            .par_for_each(|o, &u, &v| *o = a * u + b * v);
        ScalarField2D { grid: self.grid, values, spectral: OnceLock::new() }
    }

    /// Spectral gradient; Nyquist modes are dropped from the derivative.
    pub fn gradient(&self) -> VectorField2D {
        let n = self.grid.n();
        let w = self.spectral();
        let mut gx = Array2::zeros((n, n));
        let mut gy = Array2::zeros((n, n));
        Zip::indexed(&mut gx).and(&mut gy).par_for_each(|(mx, my), gx, gy| {
            let kx = if self.grid.is_nyquist(mx) { 0.0 } else { self.grid.wavenumber(mx) };
            let ky = if self.grid.is_nyquist(my) { 0.0 } else { self.grid.wavenumber(my) };
            let v = w[[mx, my]];
            *gx = Complex64::new(0.0, kx) * v;
            *gy = Complex64::new(0.0, ky) * v;
        });
        VectorField2D {
            grid: self.grid,
            x: ifft2_real(&gx),
            y: ifft2_real(&gy),
        }
    }

    /// Zero all modes outside the 2/3 dealiasing ball.
    pub fn dealiased(&self) -> ScalarField2D {
        let mut coeffs = self.spectral().clone();
        Zip::indexed(&mut coeffs).par_for_each(|(mx, my), c| {
            if self.grid.dealias_cut(mx) || self.grid.dealias_cut(my) {
                *c = Complex64::new(0.0, 0.0);
            }
        });
        ScalarField2D::from_spectral(self.grid, coeffs)
    }

    /// Exact trigonometric interpolation at scattered points.
    ///
    /// Cost is O(points * n^2); use `eval_tensor` for grid-structured targets.
    pub fn eval_points(&self, pts: &[[f64; 2]]) -> Vec<f64> {
        let n = self.grid.n();
        let coeffs = self.spectral();
        let x0 = self.grid.coord(0, 0);
        let y0 = self.grid.coord(1, 0);
        let norm = 1.0 / (n * n) as f64;
        pts.par_iter()
            .map(|p| {
                let mut ex = vec![Complex64::new(0.0, 0.0); n];
                let mut ey = vec![Complex64::new(0.0, 0.0); n];
                for m in 0..n {
                    let k = self.grid.wavenumber(m);
                    let px = k * (p[0] - x0);
                    let py = k * (p[1] - y0);
                    if self.grid.is_nyquist(m) {
                        ex[m] = Complex64::new(px.cos(), 0.0);
                        ey[m] = Complex64::new(py.cos(), 0.0);
                    } else {
                        ex[m] = Complex64::new(px.cos(), px.sin());
                        ey[m] = Complex64::new(py.cos(), py.sin());
                    }
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..n {
                    let mut row = Complex64::new(0.0, 0.0);
                    for l in 0..n {
                        row += coeffs[[m, l]] * ey[l];
                    }
                    acc += ex[m] * row;
                }
                acc.re * norm
            })
            .collect()
    }

    /// Exact trigonometric interpolation on the tensor grid `xs × ys`.
    ///
    /// Cost is O(n_out * n^2); points may lie anywhere (periodic extension).
    pub fn eval_tensor(&self, xs: &[f64], ys: &[f64]) -> Array2<f64> {
        let n = self.grid.n();
        let coeffs = self.spectral();
        let x0 = self.grid.coord(0, 0);
        let y0 = self.grid.coord(1, 0);
        let basis = |points: &[f64], p0: f64| -> Array2<Complex64> {
            let mut b = Array2::zeros((points.len(), n));
            Zip::indexed(&mut b).par_for_each(|(a, m), v| {
                let k = self.grid.wavenumber(m);
                let phase = k * (points[a] - p0);
                let e = Complex64::new(phase.cos(), phase.sin());
                // Unpaired Nyquist mode contributes a pure cosine.
                *v = if self.grid.is_nyquist(m) { Complex64::new(phase.cos(), 0.0) } else { e };
            });
            b
        };
        let bx = basis(xs, x0);
        let by = basis(ys, y0);
        // tmp[a, l] = sum_m bx[a, m] * coeffs[m, l]
        let mut tmp = Array2::<Complex64>::zeros((xs.len(), n));
        tmp.outer_iter_mut().into_par_iter().enumerate().for_each(|(a, mut row)| {
            for m in 0..n {
                let f = bx[[a, m]];
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for l in 0..n {
                    row[l] += f * coeffs[[m, l]];
                }
            }
        });
        let norm = 1.0 / (n * n) as f64;
        let mut out = Array2::zeros((xs.len(), ys.len()));
        out.outer_iter_mut().into_par_iter().enumerate().for_each(|(a, mut row)| {
            for b in 0..ys.len() {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..n {
                    acc += tmp[[a, l]] * by[[b, l]];
                }
                row[b] = acc.re * norm;
            }
        });
        out
    }
}

/// Real vector samples (two components) on a periodic grid.
#[derive(Debug, Clone)]
pub struct VectorField2D {
    pub(crate) grid: GridSpec,
    pub(crate) x: Array2<f64>,
    pub(crate) y: Array2<f64>,
}

impl VectorField2D {
    pub fn new(grid: GridSpec, x: Array2<f64>, y: Array2<f64>) -> Result<Self> {
        if x.dim() != (grid.n(), grid.n()) || y.dim() != x.dim() {
            return Err(VlabError::InvalidGrid("component shape mismatch".into()));
        }
        Ok(Self { grid, x, y })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array2<f64> {
        &self.y
    }

    /// Largest pointwise speed max sqrt(ux^2 + uy^2).
    pub fn max_speed(&self) -> f64 {
        Zip::from(&self.x)
            .and(&self.y)
            .fold(0.0f64, |m, &a, &b| m.max((a * a + b * b).sqrt()))
    }

    /// Max magnitude of the spectral divergence.
    pub fn max_spectral_divergence(&self) -> f64 {
        let ux = fft2(&self.x);
        let uy = fft2(&self.y);
        let n = self.grid.n();
        let mut div = Array2::zeros((n, n));
        Zip::indexed(&mut div).par_for_each(|(mx, my), d| {
            let kx = if self.grid.is_nyquist(mx) { 0.0 } else { self.grid.wavenumber(mx) };
            let ky = if self.grid.is_nyquist(my) { 0.0 } else { self.grid.wavenumber(my) };
            *d = Complex64::new(0.0, kx) * ux[[mx, my]] + Complex64::new(0.0, ky) * uy[[mx, my]];
        });
        ifft2_real(&div).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(16, 1.0, [0.0; 2]).is_ok());
        assert!(GridSpec::new(15, 1.0, [0.0; 2]).is_err());
        assert!(GridSpec::new(24, 1.0, [0.0; 2]).is_err());
        assert!(GridSpec::new(8, 1.0, [0.0; 2]).is_err());
        assert!(GridSpec::new(32, -1.0, [0.0; 2]).is_err());
    }

    #[test]
    fn roundtrip_is_exact() {
        let grid = GridSpec::centered(32, 5.0).unwrap();
        let f = ScalarField2D::from_fn(grid, |x, y| (x * 1.3).sin() * (y * 0.7).cos() + x * 0.0);
        let back = ifft2_real(f.spectral());
        let err = f
            .values()
            .iter()
            .zip(back.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-12 * f.max_abs());
    }

    #[test]
    fn tensor_eval_matches_grid_nodes() {
        let grid = GridSpec::centered(32, 7.0).unwrap();
        let f = ScalarField2D::from_fn(grid, |x, y| (-(x * x + y * y) / 2.0).exp());
        let xs: Vec<f64> = (0..32).map(|i| grid.coord(0, i)).collect();
        let ys: Vec<f64> = (0..32).map(|i| grid.coord(1, i)).collect();
        let out = f.eval_tensor(&xs, &ys);
        let err = f
            .values()
            .iter()
            .zip(out.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn gradient_of_plane_wave() {
        let grid = GridSpec::centered(64, 2.0 * std::f64::consts::PI).unwrap();
        let f = ScalarField2D::from_fn(grid, |x, y| (3.0 * x).sin() * (2.0 * y).cos());
        let g = f.gradient();
        let mut err = 0.0f64;
        for ix in 0..64 {
            for iy in 0..64 {
                let (x, y) = (grid.coord(0, ix), grid.coord(1, iy));
                err = err.max((g.x[[ix, iy]] - 3.0 * (3.0 * x).cos() * (2.0 * y).cos()).abs());
                err = err.max((g.y[[ix, iy]] + 2.0 * (3.0 * x).sin() * (2.0 * y).sin()).abs());
            }
        }
        assert!(err < 1e-10, "err = {err}");
    }
}

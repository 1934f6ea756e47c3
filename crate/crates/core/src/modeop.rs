//! Angular-mode operators of the rescaled linearization in conjugated
//! coordinates, their spectra, and spectral / pseudospectral bounds.
//!
//! Working in f = G^{-1/2} w coordinates turns the Gaussian-weighted inner
//! product into the plain L^2 product. The diffusion part becomes the 2D
//! harmonic oscillator, so the generalized-Laguerre ladder
//!   u_{n,k}(r) = (4 pi)^{-1/2} s^{n/2} p_k(s) e^{-s/2},   s = r^2/4,
//! (p_k orthonormal w.r.t. s^n e^{-s} ds) is an orthonormal basis of the
//! mode-n subspace in which that part is exactly diagonal with eigenvalues
//! -(n/2 + k). The advection part n (phi - g Omega_n) is assembled in the
//! same basis by Gauss-Laguerre quadrature that is exact for the polynomial
//! integrands involved, so the discrete operator is exactly skew-Hermitian
//! (times i) and the structural identities hold to rounding accuracy.

use std::f64::consts::PI;

use faer::prelude::*;
use faer::Side;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, VlabError};
use crate::radial::RadialModeProfile;

fn ln_factorial(k: usize) -> f64 {
    let mut s = 0.0;
    for i in 2..=k {
        s += (i as f64).ln();
    }
    s
}

/// Nodes and weights for int_0^inf f(s) s^alpha e^{-s} ds (Golub-Welsch).
fn gauss_laguerre(alpha: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    let a = alpha as f64;
    let jac = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            2.0 * i as f64 + a + 1.0
        } else if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            (k * (k + a)).sqrt()
        } else {
            0.0
        }
    });
    let mut nodes: Vec<f64> = jac
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Jacobi matrix eigendecomposition cannot fail");
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Christoffel-function weights: w_i = 1 / sum_k p_k(x_i)^2; stable for
    // the far-tail nodes where eigenvector components underflow.
    let weights = nodes
        .iter()
        .map(|&x| {
            let p = orthonormal_laguerre(alpha, m, x);
            1.0 / p.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    (nodes, weights)
}

/// Values p_0(s), ..., p_{count-1}(s) of the Laguerre polynomials
/// orthonormal with respect to s^alpha e^{-s} ds.
fn orthonormal_laguerre(alpha: usize, count: usize, s: f64) -> Vec<f64> {
    let a = alpha as f64;
    let mut out = Vec::with_capacity(count);
    let p0 = (-0.5 * ln_factorial(alpha)).exp();
    out.push(p0);
    if count == 1 {
        return out;
    }
    let b = |k: f64| (k * (k + a)).sqrt();
    let mut prev = 0.0;
    let mut cur = p0;
    for k in 0..(count - 1) {
        let kk = k as f64;
        let next = ((s - (2.0 * kk + a + 1.0)) * cur - b(kk) * prev) / b(kk + 1.0);
        out.push(next);
        prev = cur;
        cur = next;
    }
    out
}

/// Discretization of one angular mode: basis size, mode number, and the
/// assembled real-symmetric form T with Lambda_n = i n T.
#[derive(Debug, Clone)]
pub struct ModeBasis {
    n: usize,
    dim: usize,
    /// Real symmetric K x K matrix; empty for n = 0 (radial kernel of Lambda).
    skew_form: Mat<f64>,
}

impl ModeBasis {
    /// Assemble the mode-n discretization with `dim` Laguerre basis functions.
    pub fn new(n: usize, dim: usize) -> Self {
        assert!(dim >= 2, "basis needs at least two functions");
        if n == 0 {
            return Self { n, dim, skew_form: Mat::zeros(dim, dim) };
        }
        let k = dim;
        let quad_m = 2 * k + n + 8;

        // A1 = int s^{n-1} p_k p_l e^{-s},  A2 = int s^{n-1} p_k p_l e^{-2s}
        let (s1, w1) = gauss_laguerre(n - 1, quad_m);
        let mut a1 = Mat::<f64>::zeros(k, k);
        let mut a2 = Mat::<f64>::zeros(k, k);
        let p_at: Vec<Vec<f64>> = s1.iter().map(|&s| orthonormal_laguerre(n, k, s)).collect();
        let p_half: Vec<Vec<f64>> =
            s1.iter().map(|&u| orthonormal_laguerre(n, k, 0.5 * u)).collect();
        let half_pow_n = 0.5f64.powi(n as i32);
        for i in 0..quad_m {
            for kk in 0..k {
                for ll in kk..k {
                    let v1 = w1[i] * p_at[i][kk] * p_at[i][ll];
                    let v2 = half_pow_n * w1[i] * p_half[i][kk] * p_half[i][ll];
                    a1[(kk, ll)] += v1;
                    a2[(kk, ll)] += v2;
                    if ll != kk {
                        a1[(ll, kk)] = a1[(kk, ll)];
                        a2[(ll, kk)] = a2[(kk, ll)];
                    }
                }
            }
        }

        // J_hat[k][l] = int p_k(s) e^{-s} [int_0^s sigma^n p_l e^{-sigma}] ds.
        // The inner integral has the closed form -s^{n+1} e^{-s} q_{l-1}(s)/sqrt(l)
        // for l >= 1 (q orthonormal at weight index n+1; the sign comes from the
        // positive-leading-coefficient normalization), and for l = 0 it is the
        // lower incomplete gamma:
        // l >= 1: J_hat[k][l] = -(1/sqrt(l)) int s^{n+1} p_k q_{l-1} e^{-2s};
        // l = 0:  sqrt(n!) [ int p_k e^{-s} - sum_{m<=n} (1/m!) int s^m p_k e^{-2s} ].
        let (s3, w3) = gauss_laguerre(n + 1, quad_m);
        let mut jhat = Mat::<f64>::zeros(k, k);
        let p3: Vec<Vec<f64>> = s3.iter().map(|&u| orthonormal_laguerre(n, k, 0.5 * u)).collect();
        let q3: Vec<Vec<f64>> =
            s3.iter().map(|&u| orthonormal_laguerre(n + 1, k, 0.5 * u)).collect();
        let half_pow_n2 = 0.5f64.powi(n as i32 + 2);
        for l in 1..k {
            let inv_sqrt_l = 1.0 / (l as f64).sqrt();
            for kk in 0..k {
                let mut acc = 0.0;
                for i in 0..quad_m {
                    acc += w3[i] * p3[i][kk] * q3[i][l - 1];
                }
                jhat[(kk, l)] = -inv_sqrt_l * half_pow_n2 * acc;
            }
        }
        {
            let (s0, w0) = gauss_laguerre(0, quad_m);
            let p0_at: Vec<Vec<f64>> = s0.iter().map(|&s| orthonormal_laguerre(n, k, s)).collect();
            let p0_half: Vec<Vec<f64>> =
                s0.iter().map(|&u| orthonormal_laguerre(n, k, 0.5 * u)).collect();
            let sqrt_nfac = (0.5 * ln_factorial(n)).exp();
            for kk in 0..k {
                let mut first = 0.0;
                for i in 0..quad_m {
                    first += w0[i] * p0_at[i][kk];
                }
                let mut second = 0.0;
                for m in 0..=n {
                    let inv_mfac = (-ln_factorial(m)).exp();
                    let half_pow = 0.5f64.powi(m as i32 + 1);
                    let mut acc = 0.0;
                    for i in 0..quad_m {
                        acc += w0[i] * s0[i].powi(m as i32) * p0_half[i][kk];
                    }
                    second += inv_mfac * half_pow * acc;
                }
                jhat[(kk, 0)] = sqrt_nfac * (first - second);
            }
        }

        // T = Phi - W with Phi = (A1 - A2)/(8 pi), W = (Jhat + Jhat^T)/(8 pi n)
        let coef_phi = 1.0 / (8.0 * PI);
        let coef_w = 1.0 / (8.0 * PI * n as f64);
        let t = Mat::<f64>::from_fn(k, k, |i, j| {
            coef_phi * (a1[(i, j)] - a2[(i, j)]) - coef_w * (jhat[(i, j)] + jhat[(j, i)])
        });
        Self { n, dim, skew_form: t }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The real symmetric form T; the advection matrix is i n T.
    pub fn skew_form(&self) -> &Mat<f64> {
        &self.skew_form
    }

    /// Diagonal of the conjugated diffusion operator: -(n/2 + k).
    pub fn diffusion_eigenvalue(&self, k: usize) -> f64 {
        -(0.5 * self.n as f64 + k as f64)
    }

    /// Dense matrix of L_n - alpha Lambda_n in the orthonormal basis.
    pub fn operator(&self, alpha: f64) -> ModeOperator {
        let k = self.dim;
        let matrix = Mat::<c64>::from_fn(k, k, |i, j| {
            let diag = if i == j { self.diffusion_eigenvalue(i) } else { 0.0 };
            let skew = -alpha * self.n as f64 * self.skew_form[(i, j)];
            c64::new(diag, skew)
        });
        ModeOperator { n: self.n, alpha, matrix }
    }

    /// Conjugated-coordinate basis values u_k(r) for k = 0..dim.
    pub fn basis_values(&self, r: f64) -> Vec<f64> {
        let s = 0.25 * r * r;
        let p = orthonormal_laguerre(self.n, self.dim, s);
        let front = (4.0 * PI).sqrt().recip() * s.powf(0.5 * self.n as f64) * (-0.5 * s).exp();
        p.into_iter().map(|v| front * v).collect()
    }

    /// Expand a nodal vorticity amplitude a(r) into basis coefficients.
    ///
    /// c_k = 2 pi int s^{n/2} p_k(s) a(r) r dr, quadrature on the profile grid.
    pub fn project_profile(&self, p: &RadialModeProfile) -> Result<Vec<Complex64>> {
        if p.mode() != self.n {
            return Err(VlabError::InvalidParam(format!(
                "profile mode {} does not match basis mode {}",
                p.mode(),
                self.n
            )));
        }
        let grid = p.grid();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.dim];
        for ((&r, &w), a) in grid.nodes().iter().zip(grid.weights()).zip(p.amplitudes()) {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let s = 0.25 * r * r;
            let pvals = orthonormal_laguerre(self.n, self.dim, s);
            let front = 2.0 * PI * s.powf(0.5 * self.n as f64) * r * w;
            for (c, pv) in coeffs.iter_mut().zip(&pvals) {
                *c += a * (front * pv);
            }
        }
        Ok(coeffs)
    }

    /// Vorticity amplitude a(r) of a coefficient vector (w-space, including
    /// the G^{1/2} factor).
    pub fn amplitude_at(&self, coeffs: &[Complex64], r: f64) -> Complex64 {
        let s = 0.25 * r * r;
        let p = orthonormal_laguerre(self.n, self.dim, s);
        let front = 1.0 / (4.0 * PI) * s.powf(0.5 * self.n as f64) * (-s).exp();
        coeffs
            .iter()
            .zip(&p)
            .map(|(c, pv)| c * (front * pv))
            .sum()
    }

    /// Apply Lambda_n to basis coefficients: c -> i n T c.
    pub fn lambda_apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let k = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        if self.n == 0 {
            return out;
        }
        let scale = Complex64::new(0.0, self.n as f64);
        for i in 0..k {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..k {
                acc += coeffs[j] * self.skew_form[(i, j)];
            }
            out[i] = scale * acc;
        }
        out
    }

    /// Smallest singular value of Lambda_n restricted to this basis.
    pub fn lambda_min_singular(&self) -> Result<f64> {
        if self.n == 0 {
            return Ok(0.0);
        }
        let svd = self
            .skew_form
            .svd()
            .map_err(|e| VlabError::EigenFailure(format!("{e:?}")))?;
        let s = svd.S().column_vector();
        Ok(self.n as f64 * s[self.dim - 1])
    }
}

/// Dense matrix of L_n - alpha Lambda_n for one mode and circulation.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    n: usize,
    alpha: f64,
    matrix: Mat<c64>,
}

impl ModeOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// For n = 1 the kernel direction of Lambda (the lowest ladder state,
    /// proportional to r g(r)) occupies basis index 0; deflation against
    /// ker(Lambda)^perp is the principal submatrix without that index.
    pub fn deflated(&self) -> Mat<c64> {
        if self.n != 1 {
            return self.matrix.clone();
        }
        let k = self.dim();
        Mat::from_fn(k - 1, k - 1, |i, j| self.matrix[(i + 1, j + 1)])
    }

    /// Eigenvalues sorted by descending real part.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let mut vals: Vec<Complex64> = self
            .matrix
            .eigenvalues()
            .map_err(|e| VlabError::EigenFailure(format!("{e:?}")))?;
        vals.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap()));
        Ok(vals)
    }

    /// Eigenpairs sorted by descending real part.
    pub fn eigenpairs(&self) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
        let evd = self
            .matrix
            .eigen()
            .map_err(|e| VlabError::EigenFailure(format!("{e:?}")))?;
        let k = self.dim();
        let mut pairs: Vec<(Complex64, Vec<Complex64>)> = (0..k)
            .map(|j| {
                let val = evd.S().column_vector()[j];
                let vec = (0..k).map(|i| evd.U()[(i, j)]).collect();
                (val, vec)
            })
            .collect();
        pairs.sort_by(|a, b| b.0.re.partial_cmp(&a.0.re).unwrap());
        Ok(pairs)
    }
}

/// The k least-negative-real-part eigenvalues of the operator.
pub fn mode_spectrum(op: &ModeOperator, k: usize) -> Result<Vec<Complex64>> {
    if k > op.dim() {
        return Err(VlabError::InvalidParam(format!(
            "requested {k} eigenvalues from a dimension-{} operator",
            op.dim()
        )));
    }
    Ok(op.eigenvalues()?.into_iter().take(k).collect())
}

/// Structural checks on the discretized kernel of Lambda.
#[derive(Debug, Clone)]
pub struct KernelReport {
    /// X-norm residual of Lambda_1 applied to the r g(r) direction.
    pub lambda1_rg_residual: f64,
    /// Sup over a few radial test profiles of ||Lambda_0 w||.
    pub lambda0_residual: f64,
    /// Smallest singular value of Lambda_n for n = 2, 3, 4.
    pub min_singular: Vec<(usize, f64)>,
}

pub fn kernel_check(dim: usize) -> Result<KernelReport> {
    let basis1 = ModeBasis::new(1, dim);
    // r g(r) is exactly the lowest mode-1 ladder state: coefficient e_0.
    let mut e0 = vec![Complex64::new(0.0, 0.0); dim];
    e0[0] = Complex64::new(1.0, 0.0);
    let image = basis1.lambda_apply(&e0);
    let lambda1_rg_residual = image.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();

    let basis0 = ModeBasis::new(0, dim);
    let mut lambda0_residual = 0.0f64;
    for seed in 1..=3u64 {
        let coeffs: Vec<Complex64> = (0..dim)
            .map(|k| {
                let x = ((seed as f64 * 37.0 + k as f64 * 17.13).sin() * 43758.5453).fract();
                Complex64::new(x, 0.0)
            })
            .collect();
        let image = basis0.lambda_apply(&coeffs);
        let norm = image.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        lambda0_residual = lambda0_residual.max(norm);
    }

    let mut min_singular = Vec::new();
    for n in 2..=4 {
        let basis = ModeBasis::new(n, dim);
        min_singular.push((n, basis.lambda_min_singular()?));
    }
    Ok(KernelReport { lambda1_rg_residual, lambda0_residual, min_singular })
}

/// Per-mode minimum entering a bound, with the minimizing frequency for the
/// pseudospectral case.
#[derive(Debug, Clone, Copy)]
pub struct ModeMin {
    pub n: usize,
    pub value: f64,
    /// Minimizing lambda for the pseudospectral bound (0 for spectral).
    pub lambda: f64,
}

/// A bound value together with its per-mode minima.
#[derive(Debug, Clone)]
pub struct BoundValue {
    pub value: f64,
    pub per_mode: Vec<ModeMin>,
}

/// Spectral lower bound: min over modes of -max Re(spectrum), with mode 0
/// excluded (kernel of Lambda) and mode 1 deflated against r g(r).
pub fn spectral_bound(family: &[ModeBasis], alpha: f64) -> Result<BoundValue> {
    let per_mode: Result<Vec<ModeMin>> = family
        .par_iter()
        .filter(|b| b.n() >= 1)
        .map(|b| {
            let op = b.operator(alpha);
            let m = op.deflated();
            let mut vals: Vec<Complex64> =
                m.eigenvalues().map_err(|e| VlabError::EigenFailure(format!("{e:?}")))?;
            vals.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
            Ok(ModeMin { n: b.n(), value: -vals[0].re, lambda: 0.0 })
        })
        .collect();
    let per_mode = per_mode?;
    let value = per_mode.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    Ok(BoundValue { value, per_mode })
}

/// Options for the pseudospectral sweep.
#[derive(Debug, Clone, Copy)]
pub struct PsiOptions {
    /// Half-range of the initial lambda grid; 0 picks max(10, 2 |alpha|).
    pub lambda_half_range: f64,
    /// Points in the initial grid (default 201).
    pub lambda_count: usize,
    /// Maximum number of range doublings when the minimizer hits the edge.
    pub max_expand: usize,
}

impl Default for PsiOptions {
    fn default() -> Self {
        Self { lambda_half_range: 0.0, lambda_count: 201, max_expand: 4 }
    }
}

fn min_singular_value(m: &Mat<c64>, shift: f64) -> Result<f64> {
    let k = m.nrows();
    let shifted = Mat::<c64>::from_fn(k, k, |i, j| {
        let v = m[(i, j)];
        if i == j {
            c64::new(v.re, v.im - shift)
        } else {
            v
        }
    });
    let svd = shifted.svd().map_err(|e| VlabError::EigenFailure(format!("{e:?}")))?;
    Ok(svd.S().column_vector()[k - 1].re)
}

/// Pseudospectral bound: per mode, min over real lambda of the smallest
/// singular value of (L_n - alpha Lambda_n - i lambda), refined adaptively
/// around the minimizer until the minimum changes by less than 1%.
pub fn pseudospectral_bound(
    family: &[ModeBasis],
    alpha: f64,
    opts: PsiOptions,
) -> Result<BoundValue> {
    let base_range = if opts.lambda_half_range > 0.0 {
        opts.lambda_half_range
    } else {
        (2.0 * alpha.abs()).max(10.0)
    };
    let per_mode: Result<Vec<ModeMin>> = family
        .par_iter()
        .filter(|b| b.n() >= 1)
        .map(|b| {
            let op = b.operator(alpha);
            let m = op.deflated();
            let mut range = base_range;
            let mut expansions = 0;
            let (mut best_lambda, mut best) = loop {
                let count = opts.lambda_count.max(3);
                let grid: Vec<f64> = (0..count)
                    .map(|i| -range + 2.0 * range * i as f64 / (count - 1) as f64)
                    .collect();
                let vals: Result<Vec<f64>> =
                    grid.iter().map(|&l| min_singular_value(&m, l)).collect();
                let vals = vals?;
                let (idx, &bv) = vals
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap();
                if (idx == 0 || idx == count - 1) && expansions < opts.max_expand {
                    range *= 2.0;
                    expansions += 1;
                    continue;
                }
                break (grid[idx], bv);
            };
            // local refinement: shrink a bracket around the minimizer
            let mut spacing = 2.0 * range / (opts.lambda_count.max(3) - 1) as f64;
            loop {
                let count = 21;
                let grid: Vec<f64> = (0..count)
                    .map(|i| best_lambda - spacing + 2.0 * spacing * i as f64 / (count - 1) as f64)
                    .collect();
                let vals: Result<Vec<f64>> =
                    grid.iter().map(|&l| min_singular_value(&m, l)).collect();
                let vals = vals?;
                let (idx, &bv) = vals
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap();
                let improved = (best - bv) / best.max(1e-300);
                best_lambda = grid[idx];
                let done = improved < 0.01 && bv <= best;
                best = best.min(bv);
                if done || spacing < 1e-9 * (1.0 + best_lambda.abs()) {
                    break;
                }
                spacing *= 2.0 / (count - 1) as f64;
            }
            Ok(ModeMin { n: b.n(), value: best, lambda: best_lambda })
        })
        .collect();
    let per_mode = per_mode?;
    let value = per_mode.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    Ok(BoundValue { value, per_mode })
}

/// Build the mode discretizations n = 0..=n_max at a common basis size.
pub fn mode_family(n_max: usize, dim: usize) -> Vec<ModeBasis> {
    (0..=n_max).into_par_iter().map(|n| ModeBasis::new(n, dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_laguerre_integrates_polynomials() {
        for alpha in [0usize, 1, 3] {
            let (s, w) = gauss_laguerre(alpha, 12);
            // int s^alpha e^{-s} ds = alpha!
            let total: f64 = w.iter().sum();
            assert_relative_eq!(total, ln_factorial(alpha).exp(), max_relative = 1e-12);
            // int s * s^alpha e^{-s} = (alpha+1)!
            let m1: f64 = s.iter().zip(&w).map(|(s, w)| s * w).sum();
            assert_relative_eq!(m1, ln_factorial(alpha + 1).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn orthonormal_laguerre_is_orthonormal() {
        let alpha = 2;
        let kmax = 8;
        let (s, w) = gauss_laguerre(alpha, 24);
        let mut gram = vec![vec![0.0f64; kmax]; kmax];
        for (si, wi) in s.iter().zip(&w) {
            let p = orthonormal_laguerre(alpha, kmax, *si);
            for a in 0..kmax {
                for b in 0..kmax {
                    gram[a][b] += wi * p[a] * p[b];
                }
            }
        }
        for a in 0..kmax {
            for b in 0..kmax {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a][b] - expect).abs() < 1e-12, "gram[{a}][{b}] = {}", gram[a][b]);
            }
        }
    }

    #[test]
    fn skew_form_is_symmetric_and_annihilates_rg() {
        for n in 1..=4usize {
            let basis = ModeBasis::new(n, 40);
            let t = basis.skew_form();
            let mut asym = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..40 {
                for j in 0..40 {
                    asym = asym.max((t[(i, j)] - t[(j, i)]).abs());
                    scale = scale.max(t[(i, j)].abs());
                }
            }
            assert!(asym <= 1e-14 * scale.max(1e-300), "n={n} asym {asym}");
        }
        // Lambda_1 (r g) = 0: column 0 of T_1 vanishes
        let basis1 = ModeBasis::new(1, 60);
        let mut col0 = 0.0f64;
        for i in 0..60 {
            col0 = col0.max(basis1.skew_form()[(i, 0)].abs());
        }
        assert!(col0 <= 1e-12, "Lambda_1 r g residual {col0}");
    }

    #[test]
    fn diffusion_spectrum_is_exact() {
        let basis = ModeBasis::new(0, 16);
        let op = basis.operator(0.0);
        let vals = mode_spectrum(&op, 5).unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert!((v.re + k as f64).abs() < 1e-12 && v.im.abs() < 1e-12, "k={k} v={v}");
        }
    }

    #[test]
    fn alpha_zero_bounds_are_one() {
        let family = mode_family(4, 40);
        let sigma = spectral_bound(&family, 0.0).unwrap();
        assert_relative_eq!(sigma.value, 1.0, max_relative = 1e-10);
        let psi = pseudospectral_bound(&family, 0.0, PsiOptions::default()).unwrap();
        assert_relative_eq!(psi.value, 1.0, max_relative = 1e-6);
    }
}

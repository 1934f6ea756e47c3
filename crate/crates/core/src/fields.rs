//! Field operations on the periodic box: Biot-Savart inversion, moments,
//! pseudo-energy, weighted norms, and spectral subspace projections.

use std::f64::consts::PI;

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use crate::error::{Result, VlabError};
use crate::grid::{fft2, ifft2_real, ScalarField2D, VectorField2D};

/// Divergence-free velocity recovered from vorticity in spectral space.
///
/// The zero wavenumber of the stream function is set to zero, which on the
/// torus is equivalent to subtracting the uniform background vorticity
/// gamma/L^2. Nyquist modes are dropped from the derivatives.
pub fn biot_savart(omega: &ScalarField2D) -> Result<VectorField2D> {
    omega.check_finite()?;
    let grid = *omega.grid();
    let w = omega.spectral();
    let n = grid.n();
    let mut ux = Array2::zeros((n, n));
    let mut uy = Array2::zeros((n, n));
    Zip::indexed(&mut ux).and(&mut uy).par_for_each(|(mx, my), ux, uy| {
        let kx = if grid.is_nyquist(mx) { 0.0 } else { grid.wavenumber(mx) };
        let ky = if grid.is_nyquist(my) { 0.0 } else { grid.wavenumber(my) };
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            *ux = Complex64::new(0.0, 0.0);
            *uy = Complex64::new(0.0, 0.0);
        } else {
            // u = grad^perp psi with Laplacian psi = omega
            let v = w[[mx, my]] / k2;
            *ux = Complex64::new(0.0, ky) * v;
            *uy = Complex64::new(0.0, -kx) * v;
        }
    });
    VectorField2D::new(grid, ifft2_real(&ux), ifft2_real(&uy))
}

/// Total circulation, first moments, and centered second moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// gamma = sum omega h^2
    pub gamma: f64,
    /// m1 = sum x omega h^2 (absolute coordinates)
    pub m1: [f64; 2],
    /// m2 = sum |x - origin|^2 omega h^2
    pub m2: f64,
}

pub fn moments(omega: &ScalarField2D) -> Moments {
    let grid = omega.grid();
    let h2 = grid.cell_area();
    let mut gamma = 0.0;
    let mut m1 = [0.0, 0.0];
    let mut m2 = 0.0;
    for ((ix, iy), &w) in omega.values().indexed_iter() {
        let x = grid.coord(0, ix);
        let y = grid.coord(1, iy);
        let rx = grid.rel_coord(ix);
        let ry = grid.rel_coord(iy);
        gamma += w;
        m1[0] += x * w;
        m1[1] += y * w;
        m2 += (rx * rx + ry * ry) * w;
    }
    Moments { gamma: gamma * h2, m1: [m1[0] * h2, m1[1] * h2], m2: m2 * h2 }
}

/// Mean of ln|x - y| over a pair of points drawn from the same unit cell.
/// The diagonal of the discrete double sum uses h^4 (ln h + LOG_CELL_SELF).
pub const LOG_CELL_SELF: f64 = -0.805086721950087;

/// Pseudo-energy E_d = (1/4 pi) int int log(d/|x-y|) w(x) w(y) dx dy.
///
/// The double integral is evaluated as a midpoint double sum accelerated by
/// a zero-padded FFT (exact linear convolution of the samples with the
/// free-space log kernel); the diagonal term uses the exact cell
/// self-integral constant, and the d-dependence enters analytically through
/// the gamma^2 log(d) term.
pub fn pseudo_energy(omega: &ScalarField2D, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(VlabError::InvalidParam(format!("pseudo-energy scale d must be positive, got {d}")));
    }
    omega.check_finite()?;
    let grid = omega.grid();
    let n = grid.n();
    let h = grid.h();
    let big = 2 * n;

    let mut padded = Array2::zeros((big, big));
    padded.slice_mut(ndarray::s![..n, ..n]).assign(omega.values());

    let mut kernel = Array2::zeros((big, big));
    Zip::indexed(&mut kernel).par_for_each(|(a, b), k| {
        let da = if a <= big / 2 { a as i64 } else { a as i64 - big as i64 } as f64;
        let db = if b <= big / 2 { b as i64 } else { b as i64 - big as i64 } as f64;
        let rho = h * (da * da + db * db).sqrt();
        *k = if rho > 0.0 { rho.ln() } else { h.ln() + LOG_CELL_SELF };
    });

    let pw = fft2(&padded);
    let kw = fft2(&kernel);
    let mut prod = Array2::zeros((big, big));
    Zip::from(&mut prod).and(&pw).and(&kw).par_for_each(|p, &a, &b| *p = a * b);
    let conv = ifft2_real(&prod);

    let h4 = grid.cell_area() * grid.cell_area();
    let mut i_log = 0.0;
    for ((ix, iy), &w) in omega.values().indexed_iter() {
        i_log += w * conv[[ix, iy]];
    }
    i_log *= h4;

    let gamma = moments(omega).gamma;
    Ok((gamma * gamma * d.ln() - i_log) / (4.0 * PI))
}

/// Norm selector for `weighted_norm`; all weights are evaluated in the
/// rescaled variable xi measured from the grid origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// Gaussian-weighted L^2: ||w||^2 = int G(xi)^-1 w^2 dxi.
    GaussianX,
    /// Exponentially weighted L^2 with weight exp(beta |xi| / 4), 0 < beta < 1.
    ExpBeta(f64),
    /// Plain L^p, 1 <= p < infinity.
    Lp(f64),
    /// Sup norm.
    LInf,
}

/// A norm value together with a boundary-truncation flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormValue {
    pub value: f64,
    /// True when the outermost ring contributes more than 1e-8 of the total.
    pub truncated: bool,
}

/// Weighted norms of a field in rescaled coordinates.
///
/// The Gaussian weight is evaluated in log-space; points where the field
/// underflows to zero are skipped. If a nonzero sample would overflow the
/// weight (|xi| beyond ~53 with an O(1) value), the input violates the decay
/// precondition and an error is returned.
pub fn weighted_norm(w: &ScalarField2D, kind: NormKind) -> Result<NormValue> {
    let grid = w.grid();
    let n = grid.n();
    let h2 = grid.cell_area();
    match kind {
        NormKind::LInf => Ok(NormValue { value: w.max_abs(), truncated: false }),
        NormKind::Lp(p) => {
            if !(1.0..f64::INFINITY).contains(&p) {
                return Err(VlabError::InvalidParam(format!("Lp norm requires 1 <= p, got {p}")));
            }
            Ok(NormValue { value: w.lp_norm(Some(p)), truncated: false })
        }
        NormKind::GaussianX | NormKind::ExpBeta(_) => {
            if let NormKind::ExpBeta(beta) = kind {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(VlabError::InvalidParam(format!(
                        "X_beta weight requires 0 < beta < 1, got {beta}"
                    )));
                }
            }
            let mut total = 0.0f64;
            let mut boundary = 0.0f64;
            for ((ix, iy), &v) in w.values().indexed_iter() {
                if v == 0.0 {
                    continue;
                }
                let x = grid.rel_coord(ix);
                let y = grid.rel_coord(iy);
                let r2 = x * x + y * y;
                let log_weight = match kind {
                    NormKind::GaussianX => (4.0 * PI).ln() + 0.25 * r2,
                    NormKind::ExpBeta(beta) => 0.25 * beta * r2.sqrt(),
                    _ => unreachable!(),
                };
                let log_term = log_weight + 2.0 * v.abs().ln();
                if log_term > 700.0 {
                    return Err(VlabError::InvalidParam(format!(
                        "weighted integrand overflows at grid index ({ix}, {iy}); \
                         the field does not satisfy the decay precondition"
                    )));
                }
                let term = log_term.exp();
                total += term;
                if ix == 0 || iy == 0 || ix == n - 1 || iy == n - 1 {
                    boundary += term;
                }
            }
            let truncated = boundary > 1e-8 * total;
            Ok(NormValue { value: (total * h2).sqrt(), truncated })
        }
    }
}

/// Spectral-projection target: kernels of successively more moment functionals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    /// Zero total mass.
    X0,
    /// Zero mass and zero first moments.
    X1,
    /// Additionally zero (trace) second moment.
    X2,
}

/// Remove the components along G, d1 G, d2 G, and Laplacian(G) so that the
/// listed moments of the result vanish identically on the grid.
///
/// The subtraction uses discrete normalizations (moments of the sampled
/// basis fields), so the output moments vanish to rounding accuracy.
pub fn project_subspace(w: &ScalarField2D, target: Subspace) -> ScalarField2D {
    let grid = *w.grid();
    let h2 = grid.cell_area();
    let gauss = ScalarField2D::from_fn(grid, |x, y| {
        let rx = x - grid.origin()[0];
        let ry = y - grid.origin()[1];
        crate::oseen::gaussian([rx, ry])
    });

    // P0: subtract G * (mass of w) / (mass of G)
    let mass = |f: &ScalarField2D| -> f64 { f.values().sum() * h2 };
    let mut out = w.axpy(1.0, &gauss, -mass(w) / mass(&gauss));

    if target == Subspace::X0 {
        return out;
    }

    let moment1 = |f: &ScalarField2D, axis: usize| -> f64 {
        let mut s = 0.0;
        for ((ix, iy), &v) in f.values().indexed_iter() {
            let xi = grid.rel_coord(if axis == 0 { ix } else { iy });
            s += xi * v;
        }
        s * h2
    };
    let dgauss = |axis: usize| {
        ScalarField2D::from_fn(grid, move |x, y| {
            let rx = x - grid.origin()[0];
            let ry = y - grid.origin()[1];
            let xi = if axis == 0 { rx } else { ry };
            -0.5 * xi * crate::oseen::gaussian([rx, ry])
        })
    };
    for axis in 0..2 {
        let basis = dgauss(axis);
        let c = moment1(&out, axis) / moment1(&basis, axis);
        out = out.axpy(1.0, &basis, -c);
    }

    if target == Subspace::X1 {
        return out;
    }

    let moment2 = |f: &ScalarField2D| -> f64 {
        let mut s = 0.0;
        for ((ix, iy), &v) in f.values().indexed_iter() {
            let rx = grid.rel_coord(ix);
            let ry = grid.rel_coord(iy);
            s += (rx * rx + ry * ry) * v;
        }
        s * h2
    };
    // Laplacian(G) = (|xi|^2/4 - 1) G
    let lap_gauss = ScalarField2D::from_fn(grid, |x, y| {
        let rx = x - grid.origin()[0];
        let ry = y - grid.origin()[1];
        (0.25 * (rx * rx + ry * ry) - 1.0) * crate::oseen::gaussian([rx, ry])
    });
    let c = moment2(&out) / moment2(&lap_gauss);
    out.axpy(1.0, &lap_gauss, -c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::oseen::Oseen;

    fn oseen_field(grid: GridSpec, gamma: f64, nu_t: f64, center: [f64; 2]) -> ScalarField2D {
        let v = Oseen::new(gamma, nu_t, 1.0, center).unwrap();
        ScalarField2D::from_fn(grid, move |x, y| v.vorticity([x, y]))
    }

    #[test]
    fn biot_savart_zero_field() {
        let grid = GridSpec::centered(32, 10.0).unwrap();
        let u = biot_savart(&ScalarField2D::zeros(grid)).unwrap();
        assert_eq!(u.max_speed(), 0.0);
    }

    #[test]
    fn biot_savart_rejects_non_finite() {
        let grid = GridSpec::centered(16, 1.0).unwrap();
        let mut vals = Array2::zeros((16, 16));
        vals[[3, 7]] = f64::NAN;
        let f = ScalarField2D::from_values(grid, vals).unwrap();
        match biot_savart(&f) {
            Err(VlabError::NonFinite { ix, iy }) => assert_eq!((ix, iy), (3, 7)),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn moments_are_linear() {
        let grid = GridSpec::centered(32, 12.0).unwrap();
        let a = oseen_field(grid, 1.0, 1.0, [1.0, 0.5]);
        let b = oseen_field(grid, -2.0, 0.5, [-1.0, 0.0]);
        let sum = a.axpy(2.0, &b, 3.0);
        let (ma, mb, ms) = (moments(&a), moments(&b), moments(&sum));
        assert!((ms.gamma - (2.0 * ma.gamma + 3.0 * mb.gamma)).abs() < 1e-14);
        assert!((ms.m1[0] - (2.0 * ma.m1[0] + 3.0 * mb.m1[0])).abs() < 1e-13);
        assert!((ms.m2 - (2.0 * ma.m2 + 3.0 * mb.m2)).abs() < 1e-12);
    }

    #[test]
    fn pseudo_energy_zero_field_and_bad_d() {
        let grid = GridSpec::centered(32, 10.0).unwrap();
        let z = ScalarField2D::zeros(grid);
        assert_eq!(pseudo_energy(&z, 1.0).unwrap(), 0.0);
        assert!(pseudo_energy(&z, 0.0).is_err());
        assert!(pseudo_energy(&z, -2.0).is_err());
    }

    #[test]
    fn weighted_norm_validation() {
        let grid = GridSpec::centered(32, 20.0).unwrap();
        let f = ScalarField2D::from_fn(grid, |x, y| crate::oseen::gaussian([x, y]));
        assert!(weighted_norm(&f, NormKind::ExpBeta(1.5)).is_err());
        assert!(weighted_norm(&f, NormKind::Lp(0.5)).is_err());
        // constant field violates the Gaussian decay precondition on a big box
        let big = GridSpec::centered(64, 120.0).unwrap();
        let c = ScalarField2D::from_fn(big, |_, _| 1.0);
        assert!(weighted_norm(&c, NormKind::GaussianX).is_err());
    }

    #[test]
    fn projection_is_idempotent_and_kills_moments() {
        let grid = GridSpec::centered(64, 24.0).unwrap();
        let w = ScalarField2D::from_fn(grid, |x, y| {
            (-(x * x + y * y) / 5.0).exp() * (1.0 + 0.3 * x + 0.1 * y * y)
        });
        for target in [Subspace::X0, Subspace::X1, Subspace::X2] {
            let p = project_subspace(&w, target);
            let m = moments(&p);
            assert!(m.gamma.abs() <= 1e-10, "mass {}", m.gamma);
            if target != Subspace::X0 {
                assert!(m.m1[0].abs() <= 1e-10 && m.m1[1].abs() <= 1e-10);
            }
            if target == Subspace::X2 {
                assert!(m.m2.abs() <= 1e-10, "m2 {}", m.m2);
            }
            let pp = project_subspace(&p, target);
            let diff = p.axpy(1.0, &pp, -1.0).max_abs();
            assert!(diff <= 1e-12 * p.max_abs().max(1e-300), "diff {diff}");
        }
    }
}

//! 2×2 complex matrix helpers.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

pub type Mat2 = Matrix2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Row-major real/imaginary interleaving, for the ODE state vector.
pub fn pack(m: &Mat2) -> [f64; 8] {
    [
        m[(0, 0)].re,
        m[(0, 0)].im,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(1, 0)].re,
        m[(1, 0)].im,
        m[(1, 1)].re,
        m[(1, 1)].im,
    ]
}

pub fn unpack(y: &[f64]) -> Mat2 {
    Mat2::new(
        C64::new(y[0], y[1]),
        C64::new(y[2], y[3]),
        C64::new(y[4], y[5]),
        C64::new(y[6], y[7]),
    )
}

/// Largest entry modulus.
pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    max_abs(&(a - b))
}

pub fn trace(m: &Mat2) -> C64 {
    m[(0, 0)] + m[(1, 1)]
}

pub fn det(m: &Mat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a * b - b * a
}

pub fn anticommutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a * b + b * a
}

/// Eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn hermitian_eigenvalues(m: &Mat2) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// `(cosh √x, sinh √x / √x)`, analytic in `x` (no branch dependence).
fn cosh_sinhc(x: C64) -> (C64, C64) {
    if x.norm() < 1e-3 {
        // Taylor series, truncation error below 1e-21
        let mut c = ONE;
        let mut s = ONE;
        let mut term_c = ONE;
        let mut term_s = ONE;
        for k in 1..8 {
            let k = k as f64;
            term_c *= x / ((2.0 * k - 1.0) * (2.0 * k));
            term_s *= x / ((2.0 * k) * (2.0 * k + 1.0));
            c += term_c;
            s += term_s;
        }
        (c, s)
    } else {
        let r = x.sqrt();
        (r.cosh(), r.sinh() / r)
    }
}

/// Matrix exponential of a traceless 2×2 matrix, using `M² = −det(M)·𝟙`.
pub fn expm_traceless(m: &Mat2) -> Mat2 {
    let (c, s) = cosh_sinhc(-det(m));
    Mat2::identity() * c + m * s
}

/// `exp(−i H t)` for a constant traceless `H`.
pub fn propagate_constant(h: &Mat2, t: f64) -> Mat2 {
    expm_traceless(&(h * C64::new(0.0, -t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
        assert!(max_abs_diff(&(x * y), &(z * I)) < 1e-15);
        assert!(max_abs_diff(&(x * x), &Mat2::identity()) < 1e-15);
        assert!(max_abs_diff(&commutator(&y, &z), &(x * (I * 2.0))) < 1e-15);
    }

    #[test]
    fn expm_matches_series() {
        let m = Mat2::new(
            C64::new(0.3, -0.2),
            C64::new(0.7, 0.1),
            C64::new(-0.4, 0.5),
            C64::new(-0.3, 0.2),
        );
        // plain Taylor series as an independent reference
        let mut reference = Mat2::identity();
        let mut term = Mat2::identity();
        for k in 1..40 {
            term = term * m / C64::new(k as f64, 0.0);
            reference += term;
        }
        assert!(max_abs_diff(&expm_traceless(&m), &reference) < 1e-14);
        let small = m * C64::new(1e-3, 0.0);
        let mut reference = Mat2::identity();
        let mut term = Mat2::identity();
        for k in 1..20 {
            term = term * small / C64::new(k as f64, 0.0);
            reference += term;
        }
        assert!(max_abs_diff(&expm_traceless(&small), &reference) < 1e-15);
    }

    #[test]
    fn hermitian_spectrum() {
        let m = Mat2::new(ONE, C64::new(-0.5, 0.0), C64::new(-0.5, 0.0), ONE);
        let [lo, hi] = hermitian_eigenvalues(&m);
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 1.5).abs() < 1e-15);
    }
}

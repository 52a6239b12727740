//! Closed-form eigenvalues of 3x3 real matrices.
//!
//! The characteristic cubic is solved by the depressed-cubic method
//! (trigonometric form for three real roots, Cardano otherwise) and each root
//! gets one guarded Newton step on the characteristic polynomial.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::model::Mat3;

/// Coefficients `[c2, c1, c0]` of the monic characteristic polynomial
/// `λ³ + c2 λ² + c1 λ + c0`.
pub fn char_poly(m: &Mat3) -> [f64; 3] {
    let trace = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2]
        - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    [-trace, minors, -determinant(m)]
}

pub fn determinant(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn eval_cubic(coef: &[f64; 3], z: Complex64) -> Complex64 {
    ((z + coef[0]) * z + coef[1]) * z + coef[2]
}

fn eval_cubic_derivative(coef: &[f64; 3], z: Complex64) -> Complex64 {
    (3.0 * z + 2.0 * coef[0]) * z + coef[1]
}

/// Magnitude scale of the polynomial terms at `z`, used for relative residuals.
pub fn cubic_scale(coef: &[f64; 3], z: Complex64) -> f64 {
    let r = z.norm();
    1.0 + r * r * r + coef[0].abs() * r * r + coef[1].abs() * r + coef[2].abs()
}

/// Single Newton step, kept only if it lowers the residual.
fn polish(coef: &[f64; 3], z: Complex64) -> Complex64 {
    let f = eval_cubic(coef, z);
    let df = eval_cubic_derivative(coef, z);
    if df.norm() == 0.0 {
        return z;
    }
    let next = z - f / df;
    if next.is_finite() && eval_cubic(coef, next).norm() < f.norm() {
        next
    } else {
        z
    }
}

/// Roots of the monic cubic `λ³ + c2 λ² + c1 λ + c0`, unsorted.
pub fn cubic_roots(coef: &[f64; 3]) -> [Complex64; 3] {
    let [p2, p1, p0] = *coef;
    let shift = p2 / 3.0;
    // t³ + pt + q with λ = t - shift
    let p = p1 - p2 * p2 / 3.0;
    let q = 2.0 * p2 * p2 * p2 / 27.0 - p2 * p1 / 3.0 + p0;
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;

    let roots = if disc > 0.0 || p == 0.0 {
        let sq = disc.max(0.0).sqrt();
        // larger-magnitude branch first to avoid cancellation
        let u = if half_q >= 0.0 {
            (-half_q - sq).cbrt()
        } else {
            (-half_q + sq).cbrt()
        };
        let v = if u != 0.0 { -third_p / u } else { 0.0 };
        let t_real = u + v;
        let real = polish(coef, Complex64::new(t_real - shift, 0.0)).re;
        let pair = Complex64::new(-(u + v) / 2.0 - shift, (3f64.sqrt() / 2.0) * (u - v).abs());
        let pair = if pair.im == 0.0 {
            Complex64::new(polish(coef, pair).re, 0.0)
        } else {
            polish(coef, pair)
        };
        [Complex64::new(real, 0.0), pair, pair.conj()]
    } else {
        let r = (-third_p).sqrt();
        let cos_arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        let phi = cos_arg.acos();
        let two_pi_3 = 2.0 * std::f64::consts::PI / 3.0;
        let mut out = [Complex64::default(); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let t = 2.0 * r * (phi / 3.0 - two_pi_3 * k as f64).cos();
            *slot = Complex64::new(polish(coef, Complex64::new(t - shift, 0.0)).re, 0.0);
        }
        out
    };
    roots
}

/// Descending real part, ties broken by ascending imaginary part.
pub fn sort_eigenvalues(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
}

/// Eigenvalues of a 3x3 matrix, sorted by [`sort_eigenvalues`].
pub fn eigenvalues3(m: &Mat3) -> [Complex64; 3] {
    let mut roots = cubic_roots(&char_poly(m));
    sort_eigenvalues(&mut roots);
    roots
}

/// Counts of eigenvalues with negative, positive and (within `tol`) zero real
/// part, in that order.
pub fn inertia(eigs: &[Complex64], tol: f64) -> (usize, usize, usize) {
    let mut stable = 0;
    let mut unstable = 0;
    let mut center = 0;
    for e in eigs {
        if e.re.abs() <= tol {
            center += 1;
        } else if e.re < 0.0 {
            stable += 1;
        } else {
            unstable += 1;
        }
    }
    (stable, unstable, center)
}

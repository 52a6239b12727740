//! Banded sign tests for the strict and non-strict inequalities of the
//! classification theorems. `band` is an absolute half-width, normally
//! `tol * scale`.

/// Default relative tolerance for sign tests.
pub const DEFAULT_SIGN_TOL: f64 = 1e-12;

/// Strictly positive, clear of the band.
pub fn positive(v: f64, band: f64) -> bool {
    v > band
}

/// Strictly negative, clear of the band.
pub fn negative(v: f64, band: f64) -> bool {
    v < -band
}

/// `v >= 0` allowing `v` down to `-band`.
pub fn non_negative(v: f64, band: f64) -> bool {
    v >= -band
}

/// `v <= 0` allowing `v` up to `band`.
pub fn non_positive(v: f64, band: f64) -> bool {
    v <= band
}

pub fn near_zero(v: f64, band: f64) -> bool {
    v.abs() <= band
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands() {
        assert!(positive(1e-9, 1e-12));
        assert!(!positive(1e-13, 1e-12));
        assert!(non_negative(-1e-13, 1e-12));
        assert!(!non_negative(-1e-11, 1e-12));
        assert!(non_positive(5e-13, 1e-12));
        assert!(negative(-1.0, 0.0));
        assert!(near_zero(-1e-13, 1e-12));
    }
}

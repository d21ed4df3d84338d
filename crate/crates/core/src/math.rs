//! Float helpers that work without `std`.

use num_complex::Complex64;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `r·e^{iθ}`.
#[inline]
pub(crate) fn polar(r: f64, theta: f64) -> Complex64 {
    Complex64::new(r * libm::cos(theta), r * libm::sin(theta))
}

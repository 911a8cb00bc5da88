//! Scalar helpers routed through `libm`.

use crate::C64;

pub(crate) const DEG: f64 = core::f64::consts::PI / 180.0;

#[inline]
pub(crate) fn deg_to_rad(deg: f64) -> f64 {
    deg * DEG
}

#[inline]
pub(crate) fn rad_to_deg(rad: f64) -> f64 {
    rad / DEG
}

/// `exp(i * phase)`.
#[inline]
pub(crate) fn cis(phase: f64) -> C64 {
    C64::new(libm::cos(phase), libm::sin(phase))
}

#[inline]
pub(crate) fn arg(z: C64) -> f64 {
    libm::atan2(z.im, z.re)
}

#[inline]
pub(crate) fn db_to_amplitude(db: f64) -> f64 {
    libm::pow(10.0, db / 20.0)
}

#[inline]
pub(crate) fn power_to_db(p: f64) -> f64 {
    10.0 * libm::log10(p)
}

/// Modulus of a complex number.
#[inline]
pub(crate) fn abs(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

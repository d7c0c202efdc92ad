use nalgebra::Quaternion;
use num_complex::Complex64;

use crate::geometry::EulerAngles;

/// `D_up = e^{i(alpha + gamma)/2} cos(beta/2)`.
#[inline]
pub fn d_up(e: &EulerAngles) -> Complex64 {
    Complex64::from_polar((0.5 * e.beta).cos(), 0.5 * (e.alpha + e.gamma))
}

/// `D_down = e^{-i(alpha - gamma)/2} sin(beta/2)`.
#[inline]
pub fn d_down(e: &EulerAngles) -> Complex64 {
    Complex64::from_polar((0.5 * e.beta).sin(), -0.5 * (e.alpha - e.gamma))
}

/// `(D_up, D_down)` read off a unit quaternion `(w, x, y, z)`: `(w + iz, y + ix)`.
#[inline]
pub fn wigner_from_quaternion(q: &Quaternion<f64>) -> (Complex64, Complex64) {
    (Complex64::new(q.w, q.k), Complex64::new(q.j, q.i))
}

/// Partials `(d_alpha, d_beta, d_gamma)` of `D_up`.
pub fn d_up_partials(e: &EulerAngles) -> [Complex64; 3] {
    let u = d_up(e);
    let half_i = Complex64::new(0.0, 0.5);
    let db = Complex64::from_polar(-0.5 * (0.5 * e.beta).sin(), 0.5 * (e.alpha + e.gamma));
    [half_i * u, db, half_i * u]
}

/// Partials `(d_alpha, d_beta, d_gamma)` of `D_down`.
pub fn d_down_partials(e: &EulerAngles) -> [Complex64; 3] {
    let d = d_down(e);
    let half_i = Complex64::new(0.0, 0.5);
    let db = Complex64::from_polar(0.5 * (0.5 * e.beta).cos(), -0.5 * (e.alpha - e.gamma));
    [-half_i * d, db, half_i * d]
}

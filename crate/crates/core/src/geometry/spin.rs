use num_complex::Complex64;

use super::euler::{triad, Axis, EulerAngles};
use crate::error::Result;
use crate::numerics::{fd_partial, FdOrder, DEFAULT_ANGLE_STEP};

/// Spin operator `s_i = -i hbar mu^a_i d_a` applied to `f` by central differences.
pub fn spin_apply<F>(axis: Axis, hbar: f64, f: F) -> impl Fn(&EulerAngles) -> Result<Complex64>
where
    F: Fn(&EulerAngles) -> Result<Complex64>,
{
    move |e: &EulerAngles| {
        let t = triad(e)?;
        let g = |p: &[f64]| f(&EulerAngles::unwrapped(p[0], p[1], p[2]));
        let point = e.as_array();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..3 {
            let m = t.mu[(a, axis.index())];
            if m == 0.0 {
                continue;
            }
            let d: Complex64 = fd_partial(&g, &point, a, DEFAULT_ANGLE_STEP, FdOrder::Four)?;
            acc += d * m;
        }
        Ok(acc * Complex64::new(0.0, -hbar))
    }
}

/// Action of `s_i` on the coefficients `(a, b)` of `a D_up + b D_down`: `(hbar / 2) sigma_i`.
pub fn spin_matrix_action(axis: Axis, hbar: f64, c: [Complex64; 2]) -> [Complex64; 2] {
    let h = 0.5 * hbar;
    let i = Complex64::i();
    match axis {
        Axis::X => [c[1] * h, c[0] * h],
        Axis::Y => [-i * c[1] * h, i * c[0] * h],
        Axis::Z => [c[0] * h, -c[1] * h],
    }
}

/// Largest `|[s_i, s_j] f - i hbar s_k f|` over cyclic `(i, j, k)` and the given points.
pub fn commutator_defect<F>(f: F, hbar: f64, points: &[EulerAngles]) -> Result<f64>
where
    F: Fn(&EulerAngles) -> Result<Complex64> + Copy,
{
    let cyc = [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)];
    let mut worst = 0.0f64;
    for (i, j, k) in cyc {
        let ij = spin_apply(i, hbar, spin_apply(j, hbar, f));
        let ji = spin_apply(j, hbar, spin_apply(i, hbar, f));
        let sk = spin_apply(k, hbar, f);
        for e in points {
            let lhs = ij(e)? - ji(e)?;
            let rhs = Complex64::new(0.0, hbar) * sk(e)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geometry::{xi, EulerAngles, TopParams};
use crate::numerics::AngularGrid;

/// Largest energy fraction tolerated in the highest `alpha`/`gamma` harmonics.
pub const ALIASING_TOLERANCE: f64 = 1e-8;
/// Harmonics below this fraction of the largest coefficient are treated as zero.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Complex samples of a function of the Euler angles on an [`AngularGrid`].
///
/// `half_integer` marks fields carrying the half-angle phases
/// `e^{i(p alpha + q gamma)}` with `p, q` in `Z + 1/2`, such as `D_up`, `D_down`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularField {
    pub grid: AngularGrid,
    pub values: Vec<Complex64>,
    pub half_integer: bool,
}

impl AngularField {
    pub fn from_fn<F>(grid: AngularGrid, half_integer: bool, f: F) -> Self
    where
        F: Fn(&EulerAngles) -> Complex64,
    {
        let values = grid.nodes().iter().map(|n| f(&n.angles)).collect();
        Self {
            grid,
            values,
            half_integer,
        }
    }

    /// `<f, g>` under the grid measure.
    pub fn inner(&self, other: &AngularField) -> Complex64 {
        self.grid
            .nodes()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(n, (a, b))| a.conj() * b * n.weight)
            .sum()
    }
}

fn signed(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn differentiation_matrix(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|j| 1.0 / (0..n).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
        .collect();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                d[i][j] = w[j] / w[i] / (x[i] - x[j]);
                diag -= d[i][j];
            }
        }
        d[i][i] = diag;
    }
    d
}

fn mat_vec(d: &[Vec<f64>], v: &[Complex64]) -> Vec<Complex64> {
    d.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| b * *a).sum())
        .collect()
}

/// `H psi = -(hbar^2 / 2 m sqrt g) d_mu (sqrt g g^mn d_n psi) + (xi hbar^2 / m) R psi` on the
/// internal block of one top, with `R = 3 / (2 a^2)` and `xi = 1/10`.
///
/// Spectral in all three angles: a 2-D DFT in `(alpha, gamma)` and, per
/// harmonic `(p, q)`, polynomial differentiation in `x = cos beta` of `f / w`
/// with `w = (1 + x)^{|p+q|/2} (1 - x)^{|p-q|/2}` carrying the pole behaviour.
/// Fails with [`Error::Resolution`] when the top harmonics carry energy.
pub fn apply_hamiltonian(field: &AngularField, params: &TopParams) -> Result<AngularField> {
    let grid = &field.grid;
    let (nb, na, ng) = (grid.n_beta(), grid.n_alpha(), grid.n_gamma());
    if na < 4 || ng < 4 {
        return Err(Error::Resolution(format!(
            "n_alpha and n_gamma must be >= 4 to resolve half-angle phases, got {na}, {ng}"
        )));
    }
    if field.values.len() != grid.len() {
        return Err(Error::invalid("field length does not match grid"));
    }
    let shift = if field.half_integer { 0.5 } else { 0.0 };
    let mut planner = FftPlanner::new();
    let (fa, fg) = (planner.plan_fft_forward(na), planner.plan_fft_forward(ng));
    let (ia, ig) = (planner.plan_fft_inverse(na), planner.plan_fft_inverse(ng));

    // spectra[ib][ka * ng + kg]
    let mut spectra = Vec::with_capacity(nb);
    for ib in 0..nb {
        let mut layer: Vec<Complex64> = (0..na * ng)
            .map(|k| {
                let idx = ib * na * ng + k;
                let e = grid.nodes()[idx].angles;
                field.values[idx] * Complex64::from_polar(1.0, -shift * (e.alpha + e.gamma))
            })
            .collect();
        fft_2d(&mut layer, na, ng, &*fa, &*fg);
        let scale = 1.0 / (na * ng) as f64;
        layer.iter_mut().for_each(|c| *c *= scale);
        spectra.push(layer);
    }

    let (xs, wx): (Vec<f64>, Vec<f64>) = {
        let base = grid.nodes();
        (0..nb)
            .map(|ib| (grid.cos_beta()[ib], base[ib * na * ng].weight))
            .unzip()
    };
    let mut total = 0.0;
    let mut outer = 0.0;
    let top_a = signed(na / 2, na).unsigned_abs();
    let top_g = signed(ng / 2, ng).unsigned_abs();
    for (ib, layer) in spectra.iter().enumerate() {
        for ka in 0..na {
            for kg in 0..ng {
                let e = layer[ka * ng + kg].norm_sqr() * wx[ib];
                total += e;
                if signed(ka, na).unsigned_abs() >= top_a || signed(kg, ng).unsigned_abs() >= top_g {
                    outer += e;
                }
            }
        }
    }
    if total > 0.0 && outer / total > ALIASING_TOLERANCE {
        return Err(Error::Resolution(format!(
            "angular grid ({nb}, {na}, {ng}) under-resolves the field: {:.3e} of the energy in the top harmonics",
            outer / total
        )));
    }

    // harmonics at the rounding floor are dropped; dividing them by w amplifies noise
    let peak = spectra
        .iter()
        .flat_map(|l| l.iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let floor = NOISE_FLOOR * peak;
    let d = differentiation_matrix(&xs);
    let a2 = params.radius * params.radius;
    let kinetic = -params.hbar * params.hbar / (2.0 * params.mass * a2);
    let potential = xi(6) * params.hbar * params.hbar * 1.5 / (a2 * params.mass);
    let mut out_spectra = vec![vec![Complex64::new(0.0, 0.0); na * ng]; nb];
    for ka in 0..na {
        for kg in 0..ng {
            let p = signed(ka, na) as f64 + shift;
            let q = signed(kg, ng) as f64 + shift;
            let (ea, eb) = (0.5 * (p + q).abs(), 0.5 * (p - q).abs());
            let f: Vec<Complex64> = (0..nb).map(|ib| spectra[ib][ka * ng + kg]).collect();
            if f.iter().all(|c| c.norm() <= floor) {
                continue;
            }
            let w: Vec<f64> = xs.iter().map(|x| (1.0 + x).powf(ea) * (1.0 - x).powf(eb)).collect();
            let g: Vec<Complex64> = f.iter().zip(&w).map(|(f, w)| f / w).collect();
            let g1 = mat_vec(&d, &g);
            let g2 = mat_vec(&d, &g1);
            for ib in 0..nb {
                let x = xs[ib];
                let r1 = ea / (1.0 + x) - eb / (1.0 - x);
                let r2 = r1 * r1 - ea / (1.0 + x).powi(2) - eb / (1.0 - x).powi(2);
                let f1 = w[ib] * (g1[ib] + g[ib] * r1);
                let f2 = w[ib] * (g2[ib] + g1[ib] * (2.0 * r1) + g[ib] * r2);
                let s2 = 1.0 - x * x;
                let lap = f2 * s2 - f1 * (2.0 * x) - f[ib] * ((p * p - 2.0 * x * p * q + q * q) / s2);
                out_spectra[ib][ka * ng + kg] = lap * kinetic + f[ib] * potential;
            }
        }
    }

    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (ib, mut layer) in out_spectra.into_iter().enumerate() {
        fft_2d(&mut layer, na, ng, &*ia, &*ig);
        for (k, v) in layer.into_iter().enumerate() {
            let idx = ib * na * ng + k;
            let e = grid.nodes()[idx].angles;
            values[idx] = v * Complex64::from_polar(1.0, shift * (e.alpha + e.gamma));
        }
    }
    Ok(AngularField {
        grid: grid.clone(),
        values,
        half_integer: field.half_integer,
    })
}

fn fft_2d(
    data: &mut [Complex64],
    na: usize,
    ng: usize,
    fa: &dyn rustfft::Fft<f64>,
    fg: &dyn rustfft::Fft<f64>,
) {
    for row in data.chunks_mut(ng) {
        fg.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); na];
    for kg in 0..ng {
        for ka in 0..na {
            col[ka] = data[ka * ng + kg];
        }
        fa.process(&mut col);
        for ka in 0..na {
            data[ka * ng + kg] = col[ka];
        }
    }
}

/// Largest relative deviation of `H f` from `lambda f` over the grid.
pub fn eigen_residual(field: &AngularField, image: &AngularField, lambda: f64) -> f64 {
    let scale = field.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    field
        .values
        .iter()
        .zip(&image.values)
        .map(|(f, h)| (h - f * lambda).norm() / scale)
        .fold(0.0, f64::max)
}

/// Rayleigh quotient `<f, H f> / <f, f>`.
pub fn rayleigh_quotient(field: &AngularField, image: &AngularField) -> f64 {
    (field.inner(image) / field.inner(field)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefield::{d_down, d_up};

    fn grid() -> AngularGrid {
        AngularGrid::new(32, 16, 16).unwrap()
    }

    #[test]
    fn wigner_components_are_eigenfunctions() {
        let p = TopParams::unit();
        for f in [d_up as fn(&EulerAngles) -> Complex64, d_down] {
            let field = AngularField::from_fn(grid(), true, f);
            let h = apply_hamiltonian(&field, &p).unwrap();
            assert!(eigen_residual(&field, &h, 0.525) < 1e-10);
            assert!((rayleigh_quotient(&field, &h) - 0.525).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_gets_curvature_term_only() {
        let field = AngularField::from_fn(grid(), false, |_| Complex64::new(2.0, 0.0));
        let h = apply_hamiltonian(&field, &TopParams::unit()).unwrap();
        assert!(eigen_residual(&field, &h, 0.15) < 1e-12);
    }

    #[test]
    fn integer_spin_harmonics() {
        // D^1_{00} = cos beta and D^1_{10}-like sin beta e^{i alpha}: -Lap = 2
        let g = grid();
        let p = TopParams::unit();
        for f in [
            (|e: &EulerAngles| Complex64::from(e.beta.cos())) as fn(&EulerAngles) -> Complex64,
            |e| Complex64::from_polar(e.beta.sin(), e.alpha),
            |e| Complex64::from_polar(1.0 + e.beta.cos(), e.alpha + e.gamma),
        ] {
            let field = AngularField::from_fn(g.clone(), false, f);
            let h = apply_hamiltonian(&field, &p).unwrap();
            assert!(eigen_residual(&field, &h, 1.0 + 0.15) < 1e-9);
        }
    }

    #[test]
    fn scaling_with_parameters() {
        let p = TopParams::new(2.0, 1.5, 1.0).unwrap();
        let field = AngularField::from_fn(grid(), true, d_up);
        let h = apply_hamiltonian(&field, &p).unwrap();
        assert!(eigen_residual(&field, &h, p.omega()) < 1e-10);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let g = AngularGrid::new(8, 4, 4).unwrap();
        let field = AngularField::from_fn(g, false, |e| Complex64::from_polar(1.0, 2.0 * e.alpha));
        assert!(matches!(apply_hamiltonian(&field, &TopParams::unit()), Err(Error::Resolution(_))));
        let g = AngularGrid::new(8, 2, 8).unwrap();
        let field = AngularField::from_fn(g, true, d_up);
        assert!(matches!(apply_hamiltonian(&field, &TopParams::unit()), Err(Error::Resolution(_))));
    }
}

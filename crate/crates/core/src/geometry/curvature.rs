use nalgebra::DMatrix;

use super::metric::MetricField;
use crate::error::{Error, Result};
use crate::numerics::fd_gradient;

/// Connection coefficients `C^s_mn`, stored `(s * n + m) * n + n'`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    n: usize,
    data: Vec<f64>,
}

impl Connection {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, s: usize, m: usize, k: usize) -> f64 {
        self.data[(s * self.n + m) * self.n + k]
    }

    #[inline]
    fn get_mut(&mut self, s: usize, m: usize, k: usize) -> &mut f64 {
        &mut self.data[(s * self.n + m) * self.n + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs_diff(&self, other: &Connection) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Christoffel symbols of the second kind from `g^-1` and `d_l g`.
pub fn christoffel_from_derivatives(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Connection {
    let n = ginv.nrows();
    // first kind: [l; m k] = (d_m g_lk + d_k g_lm - d_l g_mk) / 2
    let mut first = vec![0.0; n * n * n];
    for l in 0..n {
        for m in 0..n {
            for k in m..n {
                let v = 0.5 * (dg[m][(l, k)] + dg[k][(l, m)] - dg[l][(m, k)]);
                first[(l * n + m) * n + k] = v;
                first[(l * n + k) * n + m] = v;
            }
        }
    }
    let mut out = Connection::zeros(n);
    for s in 0..n {
        for l in 0..n {
            let gsl = ginv[(s, l)];
            if gsl == 0.0 {
                continue;
            }
            for m in 0..n {
                for k in 0..n {
                    *out.get_mut(s, m, k) += gsl * first[(l * n + m) * n + k];
                }
            }
        }
    }
    out
}

fn metric_derivatives_fd(metric: &dyn MetricField, q: &[f64]) -> Vec<DMatrix<f64>> {
    let n = metric.dim();
    let spec = metric.stencil();
    let weights = spec.order().first_derivative();
    let mut p = q.to_vec();
    (0..n)
        .map(|axis| {
            let h = spec.step(axis);
            let mut acc = DMatrix::zeros(n, n);
            for &(offset, w) in weights {
                p[axis] = q[axis] + offset * h;
                acc += metric.metric(&p) * (w / h);
            }
            p[axis] = q[axis];
            acc
        })
        .collect()
}

/// Christoffel symbols from finite differences of the metric.
pub fn christoffel(metric: &dyn MetricField, q: &[f64]) -> Result<Connection> {
    let ginv = metric.inverse(q)?;
    Ok(christoffel_from_derivatives(&ginv, &metric_derivatives_fd(metric, q)))
}

/// Christoffel symbols from the metric's closed-form derivatives.
pub fn christoffel_analytic(metric: &dyn MetricField, q: &[f64]) -> Result<Connection> {
    let dg = metric
        .metric_derivatives(q)
        .ok_or_else(|| Error::invalid("metric has no analytic derivatives"))?;
    let ginv = metric.inverse(q)?;
    Ok(christoffel_from_derivatives(&ginv, &dg))
}

/// Scalar curvature `g^mn R_mn` from finite-difference Christoffel symbols.
pub fn riemann_scalar(metric: &dyn MetricField, q: &[f64]) -> Result<f64> {
    let n = metric.dim();
    let spec = metric.stencil();
    let weights = spec.order().first_derivative();
    let gamma = christoffel(metric, q)?;
    let ginv = metric.inverse(q)?;

    // d_l Gamma
    let mut dgamma = Vec::with_capacity(n);
    let mut p = q.to_vec();
    for axis in 0..n {
        let h = spec.step(axis);
        let mut acc = Connection::zeros(n);
        for &(offset, w) in weights {
            p[axis] = q[axis] + offset * h;
            let g = christoffel(metric, &p)?;
            for (a, b) in acc.data.iter_mut().zip(&g.data) {
                *a += b * (w / h);
            }
        }
        p[axis] = q[axis];
        dgamma.push(acc);
    }

    // contracted connection G_l = Gamma^s_sl
    let trace: Vec<f64> = (0..n).map(|l| (0..n).map(|s| gamma.get(s, s, l)).sum()).collect();

    let mut scalar = 0.0;
    for m in 0..n {
        for k in 0..n {
            let gmk = ginv[(m, k)];
            if gmk == 0.0 {
                continue;
            }
            let mut ricci = 0.0;
            for s in 0..n {
                ricci += dgamma[s].get(s, m, k) - dgamma[k].get(s, m, s);
            }
            for l in 0..n {
                ricci += trace[l] * gamma.get(l, m, k);
                for s in 0..n {
                    ricci -= gamma.get(s, k, l) * gamma.get(l, m, s);
                }
            }
            scalar += gmk * ricci;
        }
    }
    Ok(scalar)
}

/// `g^mn d_m f d_n f` with finite-difference partials.
pub fn grad_norm_sq<F>(metric: &dyn MetricField, f: &F, q: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let grad: Vec<f64> = fd_gradient(f, q, &metric.stencil())?;
    let ginv = metric.inverse(q)?;
    let v = nalgebra::DVector::from_vec(grad);
    Ok(v.dot(&(ginv * &v)))
}

/// Laplace-Beltrami operator `(1/sqrt g) d_m (sqrt g g^mn d_n f)` by nested
/// central differences.
pub fn laplacian<F>(metric: &dyn MetricField, f: &F, q: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let n = metric.dim();
    let spec = metric.stencil();
    let weights = spec.order().first_derivative();
    let flux = |p: &[f64], m: usize| -> Result<f64> {
        let grad: Vec<f64> = fd_gradient(f, p, &spec)?;
        let ginv = metric.inverse(p)?;
        let mut acc = 0.0;
        for (k, g) in grad.iter().enumerate() {
            acc += ginv[(m, k)] * g;
        }
        Ok(metric.sqrt_det(p)? * acc)
    };
    let mut div = 0.0;
    let mut p = q.to_vec();
    for m in 0..n {
        let h = spec.step(m);
        for &(offset, w) in weights {
            p[m] = q[m] + offset * h;
            div += flux(&p, m)? * (w / h);
        }
        p[m] = q[m];
    }
    Ok(div / metric.sqrt_det(q)?)
}

/// Weyl curvature split into the Riemann scalar and the density-dependent part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylCurvature {
    pub riemann: f64,
    pub weyl_part: f64,
}

impl WeylCurvature {
    pub fn total(&self) -> f64 {
        self.riemann + self.weyl_part
    }
}

/// `R_W = R + (n-1)/(n-2) [ g^mn d_m rho d_n rho / rho^2 - (2 / rho) Lap(rho) ]`.
///
/// Fails with [`Error::NearNode`] when `rho(q) <= floor`; the curvature
/// diverges on the nodal set.
pub fn weyl_curvature_parts_from_density<F>(
    metric: &dyn MetricField,
    rho: &F,
    q: &[f64],
    floor: f64,
) -> Result<WeylCurvature>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let r0 = rho(q)?;
    if !(r0 > floor && r0 > 0.0) {
        return Err(Error::NearNode {
            density: r0,
            floor,
        });
    }
    let n = metric.dim() as f64;
    let g2 = grad_norm_sq(metric, rho, q)?;
    let lap = laplacian(metric, rho, q)?;
    Ok(WeylCurvature {
        riemann: riemann_scalar(metric, q)?,
        weyl_part: (n - 1.0) / (n - 2.0) * (g2 / (r0 * r0) - 2.0 * lap / r0),
    })
}

pub fn weyl_curvature_from_density<F>(
    metric: &dyn MetricField,
    rho: &F,
    q: &[f64],
    floor: f64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    weyl_curvature_parts_from_density(metric, rho, q, floor).map(|w| w.total())
}

/// An integrable Weyl vector `phi_m = d_m phi` given through its potential.
pub struct WeylField<'a> {
    potential: Box<dyn Fn(&[f64]) -> Result<f64> + Sync + 'a>,
}

impl<'a> WeylField<'a> {
    pub fn new<F>(potential: F) -> Self
    where
        F: Fn(&[f64]) -> Result<f64> + Sync + 'a,
    {
        Self {
            potential: Box::new(potential),
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| Ok(0.0))
    }

    pub fn potential(&self, q: &[f64]) -> Result<f64> {
        (self.potential)(q)
    }

    pub fn vector(&self, metric: &dyn MetricField, q: &[f64]) -> Result<Vec<f64>> {
        fd_gradient(&|p: &[f64]| self.potential(p), q, &metric.stencil())
    }
}

/// `W^s_mn = -Gamma^s_mn + delta^s_m phi_n + delta^s_n phi_m + g_mn phi^s`.
pub fn weyl_connection(metric: &dyn MetricField, weyl: &WeylField<'_>, q: &[f64]) -> Result<Connection> {
    let n = metric.dim();
    let gamma = christoffel(metric, q)?;
    let phi = weyl.vector(metric, q)?;
    let g = metric.metric(q);
    let ginv = metric.inverse(q)?;
    let phi_up: Vec<f64> = (0..n).map(|s| (0..n).map(|l| ginv[(s, l)] * phi[l]).sum()).collect();
    let mut out = Connection::zeros(n);
    for s in 0..n {
        for m in 0..n {
            for k in 0..n {
                let mut v = -gamma.get(s, m, k) + g[(m, k)] * phi_up[s];
                if s == m {
                    v += phi[k];
                }
                if s == k {
                    v += phi[m];
                }
                *out.get_mut(s, m, k) = v;
            }
        }
    }
    Ok(out)
}

/// `R_W = R + (n-1) [ 2 Lap(phi) - (n-2) g^mn phi_m phi_n ]`.
pub fn weyl_curvature_from_phi(metric: &dyn MetricField, weyl: &WeylField<'_>, q: &[f64]) -> Result<f64> {
    let n = metric.dim() as f64;
    let f = |p: &[f64]| weyl.potential(p);
    let lap = laplacian(metric, &f, q)?;
    let g2 = grad_norm_sq(metric, &f, q)?;
    Ok(riemann_scalar(metric, q)? + (n - 1.0) * (2.0 * lap - (n - 2.0) * g2))
}

/// Relation `rho = A exp(-(n-2) phi)` between density and Weyl potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylPotential {
    dim: usize,
    normalization: f64,
}

impl WeylPotential {
    pub fn new(dim: usize, normalization: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::invalid("Weyl potential needs dimension >= 3"));
        }
        if !(normalization > 0.0) {
            return Err(Error::invalid("normalization constant must be positive"));
        }
        Ok(Self { dim, normalization })
    }

    pub fn phi(&self, rho: f64) -> Result<f64> {
        phi_from_rho(rho, self.dim, self.normalization)
    }

    pub fn rho(&self, phi: f64) -> f64 {
        self.normalization * (-(self.dim as f64 - 2.0) * phi).exp()
    }
}

/// `phi = -ln(rho / A) / (n - 2)`.
pub fn phi_from_rho(rho: f64, dim: usize, normalization: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("density must be positive, got {rho}")));
    }
    Ok(-(rho / normalization).ln() / (dim as f64 - 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BlockMetric, EulerBlockMetric, FlatMetric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn random_two_top(rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut q = Vec::with_capacity(12);
        for _ in 0..2 {
            for _ in 0..3 {
                q.push(rng.random_range(-5.0..5.0));
            }
            q.push(rng.random_range(0.0..TAU));
            q.push(rng.random_range(0.3..PI - 0.3));
            q.push(rng.random_range(0.0..TAU));
        }
        q
    }

    #[test]
    fn analytic_and_numerical_christoffels_agree() {
        let m = BlockMetric::new(2, 1.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let q = random_two_top(&mut rng);
            let a = christoffel_analytic(&m, &q).unwrap();
            let b = christoffel(&m, &q).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-9);
        }
    }

    #[test]
    fn riemann_scalar_values() {
        let q = [0.4, 1.1, 2.3];
        let r = riemann_scalar(&EulerBlockMetric { radius: 1.0 }, &q).unwrap();
        assert!((r - 1.5).abs() < 1e-6, "{r}");
        let r = riemann_scalar(&EulerBlockMetric { radius: 2.0 }, &q).unwrap();
        assert!((r - 3.0 / 8.0).abs() < 1e-6, "{r}");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_two_top(&mut rng);
        let r = riemann_scalar(&BlockMetric::new(2, 1.0).unwrap(), &q).unwrap();
        assert!((r - 3.0).abs() < 1e-6, "{r}");
        assert_eq!(riemann_scalar(&FlatMetric { dim: 3 }, &[0.1, 0.2, 0.3]).unwrap(), 0.0);
    }

    #[test]
    fn weyl_connection_properties() {
        let m = BlockMetric::new(1, 1.0).unwrap();
        let q = [0.2, -0.3, 0.5, 0.7, 1.3, 2.1];
        let zero = weyl_connection(&m, &WeylField::zero(), &q).unwrap();
        let gamma = christoffel(&m, &q).unwrap();
        for (a, b) in zero.as_slice().iter().zip(gamma.as_slice()) {
            assert!((a + b).abs() < 1e-8);
        }
        for s in 0..3 {
            for mm in 0..3 {
                for k in 0..6 {
                    assert_eq!(zero.get(s, mm, k), 0.0);
                }
            }
        }
        let w = WeylField::new(|p: &[f64]| Ok(0.3 * p[4].cos() + 0.1 * p[0] * p[3].sin()));
        let c = weyl_connection(&m, &w, &q).unwrap();
        for s in 0..6 {
            for mm in 0..6 {
                for k in 0..6 {
                    assert!((c.get(s, mm, k) - c.get(s, k, mm)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn constant_density_and_potential_give_riemann() {
        let m = BlockMetric::new(1, 1.0).unwrap();
        let q = [0.0, 0.0, 0.0, 0.3, 1.0, 0.2];
        let rw = weyl_curvature_from_density(&m, &|_: &[f64]| Ok(0.7), &q, 0.0).unwrap();
        assert!((rw - 1.5).abs() < 1e-6);
        let rw = weyl_curvature_from_phi(&m, &WeylField::new(|_| Ok(2.0)), &q).unwrap();
        assert!((rw - 1.5).abs() < 1e-6);
    }

    #[test]
    fn density_and_potential_forms_agree() {
        let m = BlockMetric::new(2, 1.0).unwrap();
        let rho = |p: &[f64]| Ok((1.0 + p[4].cos()) * (1.0 - p[10].cos()) / 4.0);
        let pot = WeylPotential::new(12, 1.0).unwrap();
        let w = WeylField::new(move |p: &[f64]| pot.phi(rho(p)?));
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let q = random_two_top(&mut rng);
            let a = weyl_curvature_from_density(&m, &rho, &q, 0.0).unwrap();
            let b = weyl_curvature_from_phi(&m, &w, &q).unwrap();
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn near_node_is_rejected() {
        let m = BlockMetric::new(1, 1.0).unwrap();
        let q = [0.0, 0.0, 0.0, 0.3, 1.0, 0.2];
        let err = weyl_curvature_from_density(&m, &|_: &[f64]| Ok(1e-12), &q, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NearNode { .. }));
    }

    #[test]
    fn phi_from_rho_examples() {
        assert_eq!(phi_from_rho(1.0, 12, 1.0).unwrap(), 0.0);
        assert!((phi_from_rho((-10f64).exp(), 12, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let (ra, rb) = (0.37, 0.0021);
        let sum = phi_from_rho(ra, 12, 1.0).unwrap() + phi_from_rho(rb, 12, 1.0).unwrap();
        assert!((phi_from_rho(ra * rb, 12, 1.0).unwrap() - sum).abs() < 1e-12);
        assert!(phi_from_rho(0.0, 12, 1.0).is_err());
        assert!(phi_from_rho(-1.0, 6, 1.0).is_err());
        let p = WeylPotential::new(6, 3.0).unwrap();
        assert!((p.phi(p.rho(0.42)).unwrap() - 0.42).abs() < 1e-14);
    }

    #[test]
    fn quadratic_weyl_term_is_non_negative() {
        let m = BlockMetric::new(1, 1.0).unwrap();
        let f = |p: &[f64]| Ok(p[0].sin() + p[4] * p[3].cos());
        let q = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        assert!(grad_norm_sq(&m, &f, &q).unwrap() >= 0.0);
    }
}

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::euler::CHART_EPS;
use crate::error::{Error, Result};
use crate::numerics::{CoordKind, StencilSpec};

/// Conformal coupling `xi = (n - 2) / (8 (n - 1))` of an `n`-dimensional configuration space.
pub fn xi(n: usize) -> f64 {
    let n = n as f64;
    (n - 2.0) / (8.0 * (n - 1.0))
}

/// A metric tensor field on a coordinate patch.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;

    fn metric(&self, q: &[f64]) -> DMatrix<f64>;

    fn coord_kinds(&self) -> Vec<CoordKind>;

    fn inverse(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        self.metric(q)
            .try_inverse()
            .ok_or(Error::SingularChart { sin_beta: 0.0 })
    }

    fn sqrt_det(&self, q: &[f64]) -> Result<f64> {
        let d = self.metric(q).determinant();
        if d <= 0.0 {
            return Err(Error::SingularChart { sin_beta: d });
        }
        Ok(d.sqrt())
    }

    /// Analytic coordinate derivatives `d_l g`, when the metric knows them.
    fn metric_derivatives(&self, _q: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        None
    }

    fn stencil(&self) -> StencilSpec {
        StencilSpec::for_layout(&self.coord_kinds())
    }
}

/// Mass, gyration radius and the value of hbar for a spherical top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopParams {
    pub mass: f64,
    pub radius: f64,
    pub hbar: f64,
}

impl Default for TopParams {
    fn default() -> Self {
        Self::unit()
    }
}

impl TopParams {
    pub fn new(mass: f64, radius: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("radius", radius), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { mass, radius, hbar })
    }

    pub fn unit() -> Self {
        Self {
            mass: 1.0,
            radius: 1.0,
            hbar: 1.0,
        }
    }

    /// `I_c = m a^2`.
    pub fn inertia(&self) -> f64 {
        self.mass * self.radius * self.radius
    }

    /// Angular frequency of a spin-1/2 top, `21 hbar / (40 m a^2)`.
    pub fn omega(&self) -> f64 {
        21.0 * self.hbar / (40.0 * self.inertia())
    }
}

/// Block-diagonal metric of one or two tops.
///
/// Per particle: a spatial block `s * delta_ij` followed by the internal block
/// `a^2 gamma_ab(beta)`. The spatial scale `s` is 1 in the reference gauge and
/// only changes under [`gauge_rescale`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockMetric {
    particles: usize,
    radius: f64,
    spatial_scale: f64,
}

impl BlockMetric {
    pub fn new(particles: usize, radius: f64) -> Result<Self> {
        Self::with_spatial_scale(particles, radius, 1.0)
    }

    pub fn with_spatial_scale(particles: usize, radius: f64, spatial_scale: f64) -> Result<Self> {
        if !(particles == 1 || particles == 2) {
            return Err(Error::invalid(format!("particle count must be 1 or 2, got {particles}")));
        }
        if !(radius > 0.0 && spatial_scale > 0.0) {
            return Err(Error::invalid("radius and spatial scale must be positive"));
        }
        Ok(Self {
            particles,
            radius,
            spatial_scale,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn spatial_scale(&self) -> f64 {
        self.spatial_scale
    }

    fn beta(&self, q: &[f64], p: usize) -> f64 {
        q[6 * p + 4]
    }

    pub fn det(&self, q: &[f64]) -> f64 {
        let a2 = self.radius * self.radius;
        (0..self.particles)
            .map(|p| self.spatial_scale.powi(3) * a2.powi(3) * self.beta(q, p).sin().powi(2))
            .product()
    }
}

impl MetricField for BlockMetric {
    fn dim(&self) -> usize {
        6 * self.particles
    }

    fn metric(&self, q: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let a2 = self.radius * self.radius;
        let mut g = DMatrix::zeros(n, n);
        for p in 0..self.particles {
            let o = 6 * p;
            for i in 0..3 {
                g[(o + i, o + i)] = self.spatial_scale;
                g[(o + 3 + i, o + 3 + i)] = a2;
            }
            let c = a2 * self.beta(q, p).cos();
            g[(o + 3, o + 5)] = c;
            g[(o + 5, o + 3)] = c;
        }
        g
    }

    fn coord_kinds(&self) -> Vec<CoordKind> {
        let one = [
            CoordKind::Spatial,
            CoordKind::Spatial,
            CoordKind::Spatial,
            CoordKind::Angular,
            CoordKind::Angular,
            CoordKind::Angular,
        ];
        one.iter().copied().cycle().take(self.dim()).collect()
    }

    fn inverse(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let a2 = self.radius * self.radius;
        let mut gi = DMatrix::zeros(n, n);
        for p in 0..self.particles {
            let o = 6 * p;
            let (s, c) = self.beta(q, p).sin_cos();
            if s.abs() < CHART_EPS {
                return Err(Error::SingularChart { sin_beta: s });
            }
            let s2 = s * s;
            for i in 0..3 {
                gi[(o + i, o + i)] = 1.0 / self.spatial_scale;
            }
            gi[(o + 3, o + 3)] = 1.0 / (a2 * s2);
            gi[(o + 4, o + 4)] = 1.0 / a2;
            gi[(o + 5, o + 5)] = 1.0 / (a2 * s2);
            gi[(o + 3, o + 5)] = -c / (a2 * s2);
            gi[(o + 5, o + 3)] = -c / (a2 * s2);
        }
        Ok(gi)
    }

    fn sqrt_det(&self, q: &[f64]) -> Result<f64> {
        let mut r = 1.0;
        for p in 0..self.particles {
            let s = self.beta(q, p).sin();
            if s.abs() < CHART_EPS {
                return Err(Error::SingularChart { sin_beta: s });
            }
            r *= self.spatial_scale.powf(1.5) * self.radius.powi(3) * s.abs();
        }
        Ok(r)
    }

    fn metric_derivatives(&self, q: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let n = self.dim();
        let a2 = self.radius * self.radius;
        let mut dg = vec![DMatrix::zeros(n, n); n];
        for p in 0..self.particles {
            let o = 6 * p;
            let d = -a2 * self.beta(q, p).sin();
            dg[o + 4][(o + 3, o + 5)] = d;
            dg[o + 4][(o + 5, o + 3)] = d;
        }
        Some(dg)
    }
}

/// The internal block `a^2 gamma_ab` of a single top on its own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerBlockMetric {
    pub radius: f64,
}

impl MetricField for EulerBlockMetric {
    fn dim(&self) -> usize {
        3
    }

    fn metric(&self, q: &[f64]) -> DMatrix<f64> {
        let a2 = self.radius * self.radius;
        let c = q[1].cos();
        DMatrix::from_row_slice(3, 3, &[a2, 0.0, a2 * c, 0.0, a2, 0.0, a2 * c, 0.0, a2])
    }

    fn coord_kinds(&self) -> Vec<CoordKind> {
        vec![CoordKind::Angular; 3]
    }
}

/// Euclidean metric on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatMetric {
    pub dim: usize,
}

impl MetricField for FlatMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn metric(&self, _q: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim, self.dim)
    }

    fn coord_kinds(&self) -> Vec<CoordKind> {
        vec![CoordKind::Spatial; self.dim]
    }
}

/// Top parameters together with the gauge-dependent metric scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopSystem {
    pub params: TopParams,
    pub particles: usize,
    pub spatial_scale: f64,
}

impl TopSystem {
    pub fn new(params: TopParams, particles: usize) -> Result<Self> {
        BlockMetric::new(particles, params.radius)?;
        Ok(Self {
            params,
            particles,
            spatial_scale: 1.0,
        })
    }

    pub fn metric(&self) -> BlockMetric {
        BlockMetric::with_spatial_scale(self.particles, self.params.radius, self.spatial_scale)
            .expect("validated at construction")
    }

    /// Mass entering the spatial kinetic term, `m * s`; gauge invariant.
    pub fn spatial_mass(&self) -> f64 {
        self.params.mass * self.spatial_scale
    }

    pub fn inertia(&self) -> f64 {
        self.params.inertia()
    }

    pub fn omega(&self) -> f64 {
        self.params.omega()
    }

    pub fn dim(&self) -> usize {
        6 * self.particles
    }
}

/// Constant Weyl rescaling `g -> lambda g`: `a -> sqrt(lambda) a`, `m -> m / lambda`.
///
/// The action has weight 0, so velocities `g^mn p_n / m`, `m a^2` and hence the
/// frequency `Omega` are unchanged.
pub fn gauge_rescale(lambda: f64, system: &TopSystem) -> Result<TopSystem> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("gauge factor must be positive, got {lambda}")));
    }
    let params = TopParams {
        mass: system.params.mass / lambda,
        radius: system.params.radius * lambda.sqrt(),
        hbar: system.params.hbar,
    };
    Ok(TopSystem {
        params,
        particles: system.particles,
        spatial_scale: system.spatial_scale * lambda,
    })
}

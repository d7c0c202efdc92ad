use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Default finite-difference step for angular coordinates (radians).
pub const DEFAULT_ANGLE_STEP: f64 = 1e-3;
/// Default finite-difference step for spatial coordinates (length units).
pub const DEFAULT_SPACE_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    Two,
    Four,
}

impl FdOrder {
    pub fn as_usize(self) -> usize {
        match self {
            FdOrder::Two => 2,
            FdOrder::Four => 4,
        }
    }

    pub(crate) fn first_derivative(self) -> &'static [(f64, f64)] {
        match self {
            // symmetric pairs adjacent so constants cancel exactly
            FdOrder::Two => &[(-1.0, -0.5), (1.0, 0.5)],
            FdOrder::Four => &[
                (-2.0, 1.0 / 12.0),
                (2.0, -1.0 / 12.0),
                (-1.0, -2.0 / 3.0),
                (1.0, 2.0 / 3.0),
            ],
        }
    }

    pub(crate) fn second_derivative(self) -> &'static [(f64, f64)] {
        match self {
            FdOrder::Two => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
            FdOrder::Four => &[
                (-2.0, -1.0 / 12.0),
                (-1.0, 4.0 / 3.0),
                (0.0, -5.0 / 2.0),
                (1.0, 4.0 / 3.0),
                (2.0, -1.0 / 12.0),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordKind {
    Spatial,
    Angular,
}

/// Per-coordinate central-difference steps.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilSpec {
    steps: Vec<f64>,
    order: FdOrder,
}

impl StencilSpec {
    /// Steps must be positive; angular steps must stay below `pi / 8`.
    pub fn new(steps: Vec<f64>, kinds: &[CoordKind], order: FdOrder) -> Result<Self> {
        if steps.len() != kinds.len() {
            return Err(Error::invalid("stencil steps and coordinate kinds differ in length"));
        }
        for (i, (&h, kind)) in steps.iter().zip(kinds).enumerate() {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid(format!("stencil step {i} must be positive, got {h}")));
            }
            if *kind == CoordKind::Angular && h >= PI / 8.0 {
                return Err(Error::invalid(format!(
                    "angular stencil step {i} must be < pi/8, got {h}"
                )));
            }
        }
        Ok(Self { steps, order })
    }

    /// Default steps for a coordinate layout, order 4.
    pub fn for_layout(kinds: &[CoordKind]) -> Self {
        let steps = kinds
            .iter()
            .map(|k| match k {
                CoordKind::Spatial => DEFAULT_SPACE_STEP,
                CoordKind::Angular => DEFAULT_ANGLE_STEP,
            })
            .collect();
        Self {
            steps,
            order: FdOrder::Four,
        }
    }

    pub fn uniform(dim: usize, h: f64, order: FdOrder) -> Result<Self> {
        Self::new(vec![h; dim], &vec![CoordKind::Spatial; dim], order)
    }

    pub fn dim(&self) -> usize {
        self.steps.len()
    }

    pub fn step(&self, axis: usize) -> f64 {
        self.steps[axis]
    }

    pub fn order(&self) -> FdOrder {
        self.order
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            steps: self.steps.iter().map(|h| h * factor).collect(),
            order: self.order,
        }
    }
}

/// Values a central difference can be taken of.
pub trait FdValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> FdValue for T where
    T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>
{
}

fn apply_stencil<T, F>(
    f: &F,
    point: &[f64],
    axis: usize,
    h: f64,
    weights: &[(f64, f64)],
    scale: f64,
) -> Result<T>
where
    T: FdValue,
    F: Fn(&[f64]) -> Result<T>,
{
    let mut q = point.to_vec();
    let mut acc = T::default();
    for &(offset, w) in weights {
        q[axis] = point[axis] + offset * h;
        acc = acc + f(&q)? * w;
    }
    Ok(acc * scale)
}

/// Central-difference partial derivative along `axis`.
pub fn fd_partial<T, F>(f: &F, point: &[f64], axis: usize, h: f64, order: FdOrder) -> Result<T>
where
    T: FdValue,
    F: Fn(&[f64]) -> Result<T>,
{
    apply_stencil(f, point, axis, h, order.first_derivative(), 1.0 / h)
}

/// Central-difference pure second derivative along `axis`.
pub fn fd_second_partial<T, F>(
    f: &F,
    point: &[f64],
    axis: usize,
    h: f64,
    order: FdOrder,
) -> Result<T>
where
    T: FdValue,
    F: Fn(&[f64]) -> Result<T>,
{
    apply_stencil(f, point, axis, h, order.second_derivative(), 1.0 / (h * h))
}

/// All first partials of `f` at `point`.
pub fn fd_gradient<T, F>(f: &F, point: &[f64], spec: &StencilSpec) -> Result<Vec<T>>
where
    T: FdValue,
    F: Fn(&[f64]) -> Result<T>,
{
    if point.len() != spec.dim() {
        return Err(Error::invalid(format!(
            "point has {} coordinates, stencil has {}",
            point.len(),
            spec.dim()
        )));
    }
    (0..point.len())
        .map(|axis| fd_partial(f, point, axis, spec.step(axis), spec.order()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn linear_and_constant_fields() {
        let spec = StencilSpec::uniform(3, 1e-3, FdOrder::Four).unwrap();
        let g: Vec<f64> = fd_gradient(&|q: &[f64]| Ok(q[0]), &[0.3, -1.0, 2.0], &spec).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-12 && g[1].abs() < 1e-12 && g[2].abs() < 1e-12);
        let c: Vec<f64> = fd_gradient(&|_: &[f64]| Ok(4.2), &[0.1, 0.2, 0.3], &spec).unwrap();
        assert!(c.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cosine_derivative_order_four() {
        let spec = StencilSpec::new(vec![1e-2], &[CoordKind::Angular], FdOrder::Four).unwrap();
        let g: Vec<f64> = fd_gradient(&|q: &[f64]| Ok(q[0].cos()), &[PI / 3.0], &spec).unwrap();
        assert!((g[0] + (PI / 3.0).sin()).abs() < 1e-6);
        assert!((g[0] + 0.8660).abs() < 1e-4);
    }

    #[test]
    fn complex_values() {
        let f = |q: &[f64]| Ok(Complex64::new(0.0, q[0]).exp());
        let d: Complex64 = fd_partial(&f, &[0.4], 0, 1e-3, FdOrder::Four).unwrap();
        let exact = Complex64::new(0.0, 1.0) * Complex64::new(0.0, 0.4).exp();
        assert!((d - exact).norm() < 1e-11);
    }

    #[test]
    fn nominal_convergence_order() {
        // smooth test field; error ratio on halving h must reach 2^order / 1.5
        let f = |q: &[f64]| Ok((1.3 * q[0]).sin() * (0.7 * q[0]).exp());
        let exact = |x: f64| (0.7 * x).exp() * (1.3 * (1.3 * x).cos() + 0.7 * (1.3 * x).sin());
        for order in [FdOrder::Two, FdOrder::Four] {
            let x = 0.37;
            let e1 = (fd_partial::<f64, _>(&f, &[x], 0, 0.1, order).unwrap() - exact(x)).abs();
            let e2 = (fd_partial::<f64, _>(&f, &[x], 0, 0.05, order).unwrap() - exact(x)).abs();
            let p = order.as_usize() as i32;
            assert!(e1 / e2 >= 2f64.powi(p) / 1.5, "{order:?}: ratio {}", e1 / e2);
        }
    }

    #[test]
    fn second_derivative() {
        let f = |q: &[f64]| Ok(q[0].sin());
        let d: f64 = fd_second_partial(&f, &[0.8], 0, 1e-2, FdOrder::Four).unwrap();
        assert!((d + 0.8f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn spec_validation() {
        assert!(StencilSpec::new(vec![0.0], &[CoordKind::Spatial], FdOrder::Two).is_err());
        assert!(StencilSpec::new(vec![0.5], &[CoordKind::Angular], FdOrder::Two).is_err());
        assert!(StencilSpec::new(vec![0.5], &[CoordKind::Spatial], FdOrder::Two).is_ok());
    }

    #[test]
    fn evaluation_failure_propagates() {
        let spec = StencilSpec::uniform(1, 1e-3, FdOrder::Two).unwrap();
        let f = |q: &[f64]| {
            if q[0] > 0.0 {
                Err(Error::Domain("outside".into()))
            } else {
                Ok(0.0)
            }
        };
        assert!(fd_gradient::<f64, _>(&f, &[0.0], &spec).is_err());
    }
}

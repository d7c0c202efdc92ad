use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::EulerAngles;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, ascending in `x`.
///
/// Newton iteration on the three-term recurrence from the Chebyshev guess;
/// nodes and weights come out at full double precision for the node counts
/// used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularNode {
    pub angles: EulerAngles,
    /// Includes the `sin(beta) / (4 pi^2)` measure factor.
    pub weight: f64,
}

/// Tensor-product grid over Euler angles: Gauss-Legendre in `cos(beta)` and
/// uniform periodic nodes in `alpha`, `gamma` on `[0, 2 pi)`.
///
/// Nodes are stored beta-major: `index = (ib * n_alpha + ia) * n_gamma + ig`.
/// The weights integrate the measure `sin(beta) d alpha d beta d gamma / (4 pi^2)`,
/// whose total over the grid's ranges is 2.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    n_beta: usize,
    n_alpha: usize,
    n_gamma: usize,
    cos_beta: Vec<f64>,
    nodes: Vec<AngularNode>,
}

impl AngularGrid {
    pub fn new(n_beta: usize, n_alpha: usize, n_gamma: usize) -> Result<Self> {
        if n_beta < 2 || n_alpha < 2 || n_gamma < 2 {
            return Err(Error::invalid(format!(
                "angular grid counts must be >= 2, got ({n_beta}, {n_alpha}, {n_gamma})"
            )));
        }
        let (xs, ws) = gauss_legendre(n_beta);
        let d_alpha = 2.0 * PI / n_alpha as f64;
        let d_gamma = 2.0 * PI / n_gamma as f64;
        let scale = 1.0 / (n_alpha * n_gamma) as f64;
        let mut nodes = Vec::with_capacity(n_beta * n_alpha * n_gamma);
        let mut cos_beta = Vec::with_capacity(n_beta);
        // ascending x is descending beta; store beta ascending
        for ib in 0..n_beta {
            let k = n_beta - 1 - ib;
            let (x, wx) = (xs[k], ws[k]);
            cos_beta.push(x);
            let beta = x.acos();
            for ia in 0..n_alpha {
                for ig in 0..n_gamma {
                    nodes.push(AngularNode {
                        angles: EulerAngles::unwrapped(ia as f64 * d_alpha, beta, ig as f64 * d_gamma),
                        weight: wx * scale,
                    });
                }
            }
        }
        Ok(Self {
            n_beta,
            n_alpha,
            n_gamma,
            cos_beta,
            nodes,
        })
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_gamma(&self) -> usize {
        self.n_gamma
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[AngularNode] {
        &self.nodes
    }

    /// `cos(beta)` at each beta layer, in storage order (beta ascending).
    pub fn cos_beta(&self) -> &[f64] {
        &self.cos_beta
    }

    pub fn index(&self, ib: usize, ia: usize, ig: usize) -> usize {
        (ib * self.n_alpha + ia) * self.n_gamma + ig
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }
}

/// Weighted sum of `f` over the grid nodes.
pub fn integrate_angular<F>(grid: &AngularGrid, f: F) -> Result<Complex64>
where
    F: Fn(&EulerAngles) -> Complex64,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, node) in grid.nodes().iter().enumerate() {
        let v = f(&node.angles);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::non_finite(format!("angular node {i} ({})", node.angles)));
        }
        acc += v * node.weight;
    }
    Ok(acc)
}

/// Product quadrature over two independent sets of Euler angles.
///
/// The outer loop runs through `exec`; partial sums are reduced in node order
/// so the result does not depend on the thread count.
pub fn integrate_angular_pair<F>(grid: &AngularGrid, exec: Execution, f: F) -> Result<Complex64>
where
    F: Fn(&EulerAngles, &EulerAngles) -> Complex64 + Sync + Send,
{
    let nodes = grid.nodes();
    let partials = exec.try_map(nodes.len(), |i| {
        let a = &nodes[i];
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, b) in nodes.iter().enumerate() {
            let v = f(&a.angles, &b.angles);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::non_finite(format!("angular node pair ({i}, {j})")));
            }
            acc += v * b.weight;
        }
        Ok(acc * a.weight)
    })?;
    Ok(partials.into_iter().sum())
}

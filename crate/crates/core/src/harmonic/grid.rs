use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{wigner_small_d, Group};
use crate::scalar::Real;

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1]; weights sum to 2.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess for the (n-i)-th root from the right.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product Haar quadrature over the group.
///
/// SU(2): uniform trapezoid in φ ∈ [0, 2π) and ψ ∈ [0, 4π) with `2·band + 1`
/// points each, Gauss–Legendre in cos θ with `band + 1` points. Products of
/// two matrix coefficients with `two_ell ≤ band` integrate exactly.
/// Circle: `2·band + 1` uniform points.
///
/// Nodes are ordered θ-major, then φ, then ψ.
#[derive(Debug)]
pub struct GridSpec<T: Real> {
    pub group: Group,
    pub band: u32,
    pub phi: Vec<T>,
    pub theta: Vec<T>,
    pub psi: Vec<T>,
    pub w_phi: T,
    pub w_psi: T,
    pub w_theta: Vec<T>,
    /// `d^ℓ(θ_b)` for every θ node and every `two_ell ≤ band`.
    pub(crate) small_d: Vec<Vec<DMatrix<T>>>,
}

impl<T: Real> GridSpec<T> {
    pub fn node_count(&self) -> usize {
        self.phi.len() * self.theta.len() * self.psi.len()
    }

    pub fn node(&self, theta_idx: usize, phi_idx: usize, psi_idx: usize) -> usize {
        (theta_idx * self.phi.len() + phi_idx) * self.psi.len() + psi_idx
    }

    /// (θ, φ, ψ) indices of a node.
    pub fn split(&self, node: usize) -> (usize, usize, usize) {
        let np = self.psi.len();
        let nf = self.phi.len();
        (node / (nf * np), (node / np) % nf, node % np)
    }

    /// Euler angles (φ, θ, ψ) of a node; on the circle only φ is used.
    pub fn angles(&self, node: usize) -> (T, T, T) {
        let (b, a, c) = self.split(node);
        (self.phi[a], self.theta[b], self.psi[c])
    }

    pub fn weight(&self, node: usize) -> T {
        let (b, _, _) = self.split(node);
        self.w_phi * self.w_psi * self.w_theta[b]
    }

    pub fn weights(&self) -> Vec<T> {
        (0..self.node_count()).map(|n| self.weight(n)).collect()
    }

    pub fn same_layout(&self, other: &GridSpec<T>) -> bool {
        self.group == other.group && self.band == other.band
    }
}

pub fn quadrature_grid<T: Real>(group: Group, band: u32) -> Arc<GridSpec<T>> {
    let nu = 2 * band as usize + 1;
    match group {
        Group::Su2 => {
            let (x, w) = gauss_legendre(band as usize + 1);
            let mass: f64 = w.iter().sum();
            let theta: Vec<T> = x.iter().map(|&c| T::lit(c.acos())).collect();
            let small_d = theta.iter().map(|&t| wigner_small_d(band, t)).collect();
            Arc::new(GridSpec {
                group,
                band,
                phi: (0..nu).map(|a| T::lit(2.0 * PI * a as f64 / nu as f64)).collect(),
                theta,
                psi: (0..nu).map(|c| T::lit(4.0 * PI * c as f64 / nu as f64)).collect(),
                w_phi: T::lit(1.0 / nu as f64),
                w_psi: T::lit(1.0 / nu as f64),
                w_theta: w.iter().map(|&v| T::lit(v / mass)).collect(),
                small_d,
            })
        }
        Group::Torus => Arc::new(GridSpec {
            group,
            band,
            phi: (0..nu).map(|a| T::lit(2.0 * PI * a as f64 / nu as f64)).collect(),
            theta: vec![T::zero()],
            psi: vec![T::zero()],
            w_phi: T::lit(1.0 / nu as f64),
            w_psi: T::one(),
            w_theta: vec![T::one()],
            small_d: Vec::new(),
        }),
    }
}

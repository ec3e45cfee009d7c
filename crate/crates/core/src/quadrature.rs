//! Gauss–Legendre rules mapped to `[0, 1]`.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    ///
    /// Roots of `P_n` are found by Newton iteration from the Tricomi initial
    /// guess; the weights are `2 / ((1 - x^2) P_n'(x)^2)` halved for the
    /// interval `[0, 1]`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("quad_nodes", "need at least one node"));
        }
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = T::of_usize(n);
        let half = T::of(0.5);
        let tol = T::epsilon() * T::of(4.0);
        for i in 0..n.div_ceil(2) {
            let mut x = (T::PI() * (T::of_usize(i) + T::of(0.75)) / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= tol {
                    let (_, d) = legendre(n, x);
                    dp = d;
                    break;
                }
            }
            let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
            // x is descending in i; map [-1, 1] -> [0, 1]
            nodes[i] = half * (T::one() - x);
            nodes[n - 1 - i] = half * (T::one() + x);
            weights[i] = half * w;
            weights[n - 1 - i] = half * w;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `(node, weight)` pairs on `[0, 1]`.
    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::of_usize(k);
        let p2 = ((T::of_usize(2 * k - 1)) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nf = T::of_usize(n);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

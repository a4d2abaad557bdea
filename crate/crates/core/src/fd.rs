//! Finite-difference weights on arbitrary nodes (Fornberg's recursion) and
//! a differentiator for uniformly sampled sequences.

use std::ops::{Add, Mul};

/// Weights for derivatives of order `0..=max_order` at `x0` from values at
/// `nodes`. Returns `w[k][j]`, the weight of node `j` for derivative `k`.
pub fn fornberg_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Derivative of a fixed order on a uniform grid with a fixed stencil width.
///
/// Interior samples use the centred stencil; the first and last `points/2`
/// samples use shifted (one-sided) stencils of the same width.
#[derive(Debug, Clone)]
pub struct Differentiator {
    points: usize,
    order: usize,
    // weights[p] for the stencil whose evaluation point is the p-th node
    weights: Vec<Vec<f64>>,
}

impl Differentiator {
    pub fn new(points: usize, order: usize) -> Self {
        assert!(
            points > order,
            "stencil of {points} points cannot give derivative {order}"
        );
        let nodes: Vec<f64> = (0..points).map(|j| j as f64).collect();
        let weights = (0..points)
            .map(|p| fornberg_weights(p as f64, &nodes, order).swap_remove(order))
            .collect();
        Self {
            points,
            order,
            weights,
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn start(&self, i: usize, n: usize) -> usize {
        let half = self.points / 2;
        i.saturating_sub(half).min(n - self.points)
    }

    /// Whether sample `i` of an `n`-sample sequence gets a one-sided stencil.
    pub fn is_one_sided(&self, i: usize, n: usize) -> bool {
        let half = self.points / 2;
        i < half || i + half >= n
    }

    /// Derivative at sample `i`.
    pub fn at<T>(&self, values: &[T], h: f64, i: usize) -> T
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        let n = values.len();
        assert!(
            n >= self.points,
            "need at least {} samples, got {n}",
            self.points
        );
        let start = self.start(i, n);
        let w = &self.weights[i - start];
        let scale = h.powi(-(self.order as i32));
        let mut acc = values[start] * (w[0] * scale);
        for (j, wj) in w.iter().enumerate().skip(1) {
            acc = acc + values[start + j] * (wj * scale);
        }
        acc
    }

    /// Derivative at every sample.
    pub fn apply<T>(&self, values: &[T], h: f64) -> Vec<T>
    where
        T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    {
        (0..values.len()).map(|i| self.at(values, h, i)).collect()
    }
}

/// Derivative of order `order` at every node of a non-uniform grid using a
/// three-point (or two-point at the ends when only two nodes exist) stencil.
pub fn nonuniform_derivative(xs: &[f64], ys: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    assert_eq!(n, ys.len());
    let width = 3.min(n);
    (0..n)
        .map(|i| {
            if n <= order {
                return f64::NAN;
            }
            let start = i.saturating_sub(width / 2).min(n - width);
            let nodes = &xs[start..start + width];
            let w = fornberg_weights(xs[i], nodes, order);
            w[order]
                .iter()
                .zip(&ys[start..start + width])
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

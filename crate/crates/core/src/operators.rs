//! Gauss–Lobatto collocation operators of the DGSEM reference element `[-1, 1]`.
//!
//! All matrices are built once per polynomial degree and are immutable
//! afterwards. Hot loops use the row-major copies kept next to the public
//! `DMatrix` views.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 15;

/// Lobatto nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative, by the three-term recurrence.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        let dp_next = dp_prev + (2.0 * kf - 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

pub fn legendre(n: usize, x: f64) -> f64 {
    legendre_with_derivative(n, x).0
}

/// Legendre polynomial normalized to unit L² norm on `[-1, 1]`.
pub fn legendre_orthonormal(n: usize, x: f64) -> f64 {
    ((2 * n + 1) as f64 / 2.0).sqrt() * legendre(n, x)
}

/// Gauss–Lobatto nodes and weights for polynomial degree `p`.
///
/// Interior nodes are the roots of `(1 - x²) P'_p(x)`, found by Newton's method
/// on the equivalent `P_{p+1} - P_{p-1}` starting from Chebyshev–Lobatto points.
pub fn gauss_lobatto(p: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_DEGREE).contains(&p) {
        return Err(Error::InvalidDegree(p));
    }
    let n = p + 1;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[p] = 1.0;
    for (j, node) in nodes.iter_mut().enumerate().take(p).skip(1) {
        let mut x = -(std::f64::consts::PI * j as f64 / p as f64).cos();
        for _ in 0..100 {
            let q = legendre(p + 1, x) - legendre(p - 1, x);
            let dq = (2 * p + 1) as f64 * legendre(p, x);
            let delta = q / dq;
            x -= delta;
            if delta.abs() <= 1e-14 * x.abs().max(1.0) {
                break;
            }
        }
        *node = x;
    }
    // Enforce exact symmetry about the origin.
    for j in 0..n / 2 {
        let sym = 0.5 * (nodes[p - j] - nodes[j]);
        nodes[j] = -sym;
        nodes[p - j] = sym;
    }
    if n % 2 == 1 {
        nodes[p / 2] = 0.0;
    }
    let scale = 2.0 / (p * (p + 1)) as f64;
    let weights = nodes
        .iter()
        .map(|&x| {
            let lp = legendre(p, x);
            scale / (lp * lp)
        })
        .collect();
    Ok(QuadratureRule {
        degree: p,
        nodes,
        weights,
    })
}

/// Barycentric weights `1 / Π_{k≠j} (x_j - x_k)`.
fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| xj - xk)
                .product();
            1.0 / prod
        })
        .collect()
}

/// Lagrange derivative matrix `D[i][j] = ℓ'_j(ξ_i)`.
pub fn derivative_matrix(nodes: &[f64]) -> DMatrix<f64> {
    let n = nodes.len();
    let bw = barycentric_weights(nodes);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bw[j] / bw[i]) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        // negative-sum trick keeps rows summing to zero
        d[(i, i)] = diag;
    }
    d
}

/// Vandermonde matrix `V[i][j] = L_j(ξ_i)` of the orthonormal Legendre basis.
pub fn legendre_vandermonde(rule: &QuadratureRule) -> DMatrix<f64> {
    let n = rule.len();
    DMatrix::from_fn(n, n, |i, j| legendre_orthonormal(j, rule.nodes[i]))
}

/// The reference-element operators of a degree-`p` DGSEM.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub rule: QuadratureRule,
    pub mass: DMatrix<f64>,
    pub derivative: DMatrix<f64>,
    pub boundary: DMatrix<f64>,
    pub derivative_split: DMatrix<f64>,
    pub vandermonde: DMatrix<f64>,
    pub vandermonde_inv: DMatrix<f64>,
    // row-major copies for the kernels
    weak_flat: Vec<f64>,
    split_flat: Vec<f64>,
    vinv_flat: Vec<f64>,
    inv_weights: Vec<f64>,
}

impl OperatorSet {
    pub fn new(p: usize) -> Result<Self> {
        let rule = gauss_lobatto(p)?;
        let n = rule.len();
        let mass = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&rule.weights));
        let derivative = derivative_matrix(&rule.nodes);
        let mut boundary = DMatrix::zeros(n, n);
        boundary[(0, 0)] = -1.0;
        boundary[(p, p)] = 1.0;
        let inv_weights: Vec<f64> = rule.weights.iter().map(|w| 1.0 / w).collect();

        let mut derivative_split = &derivative * 2.0;
        derivative_split[(0, 0)] += inv_weights[0];
        derivative_split[(p, p)] -= inv_weights[p];

        let vandermonde = legendre_vandermonde(&rule);
        let vandermonde_inv = vandermonde
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::config("singular Legendre Vandermonde matrix"))?;

        // M⁻¹ Dᵀ M
        let weak = DMatrix::from_fn(n, n, |i, k| {
            inv_weights[i] * derivative[(k, i)] * rule.weights[k]
        });
        let row_major = |m: &DMatrix<f64>| -> Vec<f64> {
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
        };
        Ok(Self {
            weak_flat: row_major(&weak),
            split_flat: row_major(&derivative_split),
            vinv_flat: row_major(&vandermonde_inv),
            inv_weights,
            rule,
            mass,
            derivative,
            boundary,
            derivative_split,
            vandermonde,
            vandermonde_inv,
        })
    }

    pub fn degree(&self) -> usize {
        self.rule.degree
    }

    pub fn nodes_1d(&self) -> usize {
        self.rule.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn inv_weights(&self) -> &[f64] {
        &self.inv_weights
    }

    /// Row-major `M⁻¹ Dᵀ M`.
    pub(crate) fn weak_flat(&self) -> &[f64] {
        &self.weak_flat
    }

    /// Row-major `D_split = 2D - M⁻¹B`.
    pub(crate) fn split_flat(&self) -> &[f64] {
        &self.split_flat
    }

    /// Row-major `V⁻¹`.
    pub(crate) fn vinv_flat(&self) -> &[f64] {
        &self.vinv_flat
    }

    /// Largest entry of `|MD + (MD)ᵀ - B|`.
    pub fn sbp_defect(&self) -> f64 {
        let q = &self.mass * &self.derivative;
        let r = &q + q.transpose() - &self.boundary;
        r.amax()
    }

    /// Largest absolute row sum of `D`.
    pub fn telescoping_defect(&self) -> f64 {
        self.derivative
            .row_iter()
            .map(|row| row.sum().abs())
            .fold(0.0, f64::max)
    }
}

pub fn build_operators(p: usize) -> Result<OperatorSet> {
    OperatorSet::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn lobatto_low_degrees() {
        let r1 = gauss_lobatto(1).unwrap();
        assert_eq!(r1.nodes, vec![-1.0, 1.0]);
        assert!(r1.weights.iter().all(|&w| close(w, 1.0, 1e-15)));

        let r2 = gauss_lobatto(2).unwrap();
        for (x, e) in r2.nodes.iter().zip([-1.0, 0.0, 1.0]) {
            assert!(close(*x, e, 1e-15));
        }
        for (w, e) in r2.weights.iter().zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]) {
            assert!(close(*w, e, 1e-14));
        }

        let r3 = gauss_lobatto(3).unwrap();
        let s = 1.0 / 5f64.sqrt();
        for (x, e) in r3.nodes.iter().zip([-1.0, -s, s, 1.0]) {
            assert!(close(*x, e, 1e-14));
        }
        for (w, e) in r3.weights.iter().zip([1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0]) {
            assert!(close(*w, e, 1e-14));
        }
    }

    #[test]
    fn rejects_bad_degree() {
        assert_eq!(gauss_lobatto(0), Err(Error::InvalidDegree(0)));
        assert_eq!(gauss_lobatto(16), Err(Error::InvalidDegree(16)));
        assert!(OperatorSet::new(0).is_err());
    }

    #[test]
    fn quadrature_exactness() {
        for p in 1..=MAX_DEGREE {
            let r = gauss_lobatto(p).unwrap();
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            for k in 0..=(2 * p - 1) {
                let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!(close(q, exact, 1e-12), "p={p} k={k}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn p1_operators() {
        let ops = OperatorSet::new(1).unwrap();
        let d = [[-0.5, 0.5], [-0.5, 0.5]];
        let ds = [[0.0, 1.0], [-1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(ops.derivative[(i, j)], d[i][j], 1e-15));
                assert!(close(ops.derivative_split[(i, j)], ds[i][j], 1e-15));
            }
        }
    }

    #[test]
    fn exact_differentiation_of_monomials() {
        for p in 1..=10 {
            let ops = OperatorSet::new(p).unwrap();
            let x = &ops.rule.nodes;
            for k in 1..=p {
                let v = nalgebra::DVector::from_iterator(x.len(), x.iter().map(|&xi| xi.powi(k as i32)));
                let dv = &ops.derivative * v;
                for (i, &xi) in x.iter().enumerate() {
                    let e = k as f64 * xi.powi(k as i32 - 1);
                    assert!(close(dv[i], e, 1e-10), "p={p} k={k}");
                }
            }
        }
    }

    #[test]
    fn vandermonde_columns() {
        let ops = OperatorSet::new(1).unwrap();
        assert!(close(ops.vandermonde[(0, 0)], ops.vandermonde[(1, 0)], 0.0));

        let ops = OperatorSet::new(2).unwrap();
        let c = ops.vandermonde.column(1);
        assert!(close(c[0], -c[2], 1e-15));
        assert!(close(c[1], 0.0, 1e-15));

        for p in 1..=10 {
            let ops = OperatorSet::new(p).unwrap();
            for k in 0..=p {
                let col = ops.vandermonde.column(k).into_owned();
                let m = &ops.vandermonde_inv * col;
                for j in 0..=p {
                    let e = if j == k { 1.0 } else { 0.0 };
                    assert!(close(m[j], e, 1e-11), "p={p} k={k} j={j}");
                }
            }
        }
    }
}

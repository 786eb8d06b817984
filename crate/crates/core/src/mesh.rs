//! Uniform Cartesian meshes and the nodal solution layout.
//!
//! Solution data is a flat `Vec<f64>` ordered `(element, node, variable)`.
//! Elements are numbered `ey * nx + ex`, nodes `i + (p+1) j` (x fastest).

use crate::equations::{Vars, ZERO};
use crate::error::{Error, Result};
use crate::operators::OperatorSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub ndims: usize,
    /// Elements per direction; unused directions hold 1.
    pub cells: [usize; 2],
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub periodic: [bool; 2],
}

impl Mesh {
    pub fn new_1d(cells: usize, lower: f64, upper: f64, periodic: bool) -> Result<Self> {
        Self::new(1, [cells, 1], [lower, 0.0], [upper, 1.0], [periodic, true])
    }

    pub fn new_2d(cells: [usize; 2], lower: [f64; 2], upper: [f64; 2], periodic: [bool; 2]) -> Result<Self> {
        Self::new(2, cells, lower, upper, periodic)
    }

    pub fn new(
        ndims: usize,
        cells: [usize; 2],
        lower: [f64; 2],
        upper: [f64; 2],
        periodic: [bool; 2],
    ) -> Result<Self> {
        if !(1..=2).contains(&ndims) {
            return Err(Error::config(format!("unsupported dimension {ndims}")));
        }
        for d in 0..ndims {
            if cells[d] == 0 {
                return Err(Error::config("mesh needs at least one element per direction"));
            }
            if !(upper[d] > lower[d]) || !lower[d].is_finite() || !upper[d].is_finite() {
                return Err(Error::config(format!(
                    "empty domain in direction {d}: [{}, {}]",
                    lower[d], upper[d]
                )));
            }
        }
        let mut mesh = Self {
            ndims,
            cells,
            lower,
            upper,
            periodic,
        };
        if ndims == 1 {
            mesh.cells[1] = 1;
            mesh.periodic[1] = true;
        }
        Ok(mesh)
    }

    pub fn n_elements(&self) -> usize {
        self.cells[..self.ndims].iter().product()
    }

    pub fn dx(&self) -> [f64; 2] {
        let mut dx = [0.0; 2];
        for d in 0..self.ndims {
            dx[d] = (self.upper[d] - self.lower[d]) / self.cells[d] as f64;
        }
        dx
    }

    /// `Π Δx_dir / 2`.
    pub fn jacobian(&self) -> f64 {
        self.dx()[..self.ndims].iter().map(|h| 0.5 * h).product()
    }

    /// `|Ω|`.
    pub fn volume(&self) -> f64 {
        (0..self.ndims).map(|d| self.upper[d] - self.lower[d]).product()
    }

    #[inline]
    pub fn element_index(&self, ex: usize, ey: usize) -> usize {
        ey * self.cells[0] + ex
    }

    #[inline]
    pub fn element_coords(&self, e: usize) -> (usize, usize) {
        (e % self.cells[0], e / self.cells[0])
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic[..self.ndims].iter().all(|&p| p)
    }

    /// Physical coordinates of `node` in element `e`.
    pub fn node_coords(&self, e: usize, node: usize, ops: &OperatorSet) -> [f64; 2] {
        let n = ops.nodes_1d();
        let xi = &ops.rule.nodes;
        let dx = self.dx();
        let (ex, ey) = self.element_coords(e);
        let mut x = [0.0; 2];
        x[0] = self.lower[0] + (ex as f64 + 0.5 * (xi[node % n] + 1.0)) * dx[0];
        if self.ndims == 2 {
            x[1] = self.lower[1] + (ey as f64 + 0.5 * (xi[node / n] + 1.0)) * dx[1];
        }
        x
    }

    pub fn nodes_per_element(&self, ops: &OperatorSet) -> usize {
        ops.nodes_1d().pow(self.ndims as u32)
    }
}

/// Nodal degrees of freedom at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub data: Vec<f64>,
    pub t: f64,
    pub nvars: usize,
    pub nodes_per_element: usize,
}

impl SolutionField {
    pub fn zeros(n_elements: usize, nodes_per_element: usize, nvars: usize) -> Self {
        Self {
            data: vec![0.0; n_elements * nodes_per_element * nvars],
            t: 0.0,
            nvars,
            nodes_per_element,
        }
    }

    /// Interpolates `f(x)` (conserved variables) at every node.
    pub fn from_fn(mesh: &Mesh, ops: &OperatorSet, nvars: usize, f: impl Fn([f64; 2]) -> Vars) -> Self {
        let npe = mesh.nodes_per_element(ops);
        let mut field = Self::zeros(mesh.n_elements(), npe, nvars);
        for e in 0..mesh.n_elements() {
            for j in 0..npe {
                let u = f(mesh.node_coords(e, j, ops));
                field.set_node(e, j, &u);
            }
        }
        field
    }

    pub fn n_elements(&self) -> usize {
        self.data.len() / (self.nodes_per_element * self.nvars)
    }

    #[inline]
    pub fn node(&self, e: usize, j: usize) -> Vars {
        load(&self.data, (e * self.nodes_per_element + j) * self.nvars, self.nvars)
    }

    #[inline]
    pub fn set_node(&mut self, e: usize, j: usize, u: &Vars) {
        let off = (e * self.nodes_per_element + j) * self.nvars;
        self.data[off..off + self.nvars].copy_from_slice(&u[..self.nvars]);
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[inline]
pub(crate) fn load(data: &[f64], offset: usize, nvars: usize) -> Vars {
    let mut u = ZERO;
    u[..nvars].copy_from_slice(&data[offset..offset + nvars]);
    u
}

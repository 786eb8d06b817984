//! Per-element volume-term kernels.
//!
//! Every kernel returns the volume contribution to `u̇` in physical time
//! units, including the `M⁻¹B f` part that the weak form and the split form
//! carry. The interface term `-M⁻¹B f*` is owned by the semidiscretization,
//! so all kernels are interchangeable behind one surface pass.
//!
//! Nodes of a 2D element are ordered with the x index fastest:
//! `node = i + (p+1) j`.

use crate::equations::{Equation, FluxKind, Vars, ZERO};
use crate::error::{Error, Result};
use crate::operators::{OperatorSet, MAX_DEGREE};

const MAX_LINE: usize = MAX_DEGREE + 1;

/// Flux evaluation tallies.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct FluxCounter {
    /// Analytical flux evaluations of the weak-form volume term.
    pub analytical: u64,
    /// Symmetric two-point flux evaluations of the flux-differencing volume term.
    pub two_point: u64,
    /// Numerical fluxes on subcell interfaces.
    pub subcell: u64,
    /// Numerical fluxes on element interfaces.
    pub surface: u64,
}

impl std::ops::AddAssign for FluxCounter {
    fn add_assign(&mut self, rhs: Self) {
        self.analytical += rhs.analytical;
        self.two_point += rhs.two_point;
        self.subcell += rhs.subcell;
        self.surface += rhs.surface;
    }
}

/// Nodal data of one element together with its affine metric.
#[derive(Debug, Clone, Copy)]
pub struct ElementView<'a> {
    pub states: &'a [Vars],
    pub ndims: usize,
    /// `2/Δx` per direction.
    pub metric: [f64; 2],
    /// `Π Δx_dir / 2`.
    pub jacobian: f64,
}

impl<'a> ElementView<'a> {
    /// Element of widths `dx` (only the first `ndims` entries are used).
    pub fn new(states: &'a [Vars], ndims: usize, dx: [f64; 2], ops: &OperatorSet) -> Result<Self> {
        if !(1..=2).contains(&ndims) {
            return Err(Error::config(format!("unsupported dimension {ndims}")));
        }
        let expected = ops.nodes_1d().pow(ndims as u32);
        if states.len() != expected {
            return Err(Error::config(format!(
                "element has {} nodes, expected {expected}",
                states.len()
            )));
        }
        if dx[..ndims].iter().any(|&h| !(h > 0.0)) {
            return Err(Error::config("element widths must be positive"));
        }
        Ok(Self::from_parts(states, ndims, dx))
    }

    pub(crate) fn from_parts(states: &'a [Vars], ndims: usize, dx: [f64; 2]) -> Self {
        let mut metric = [0.0; 2];
        let mut jacobian = 1.0;
        for d in 0..ndims {
            metric[d] = 2.0 / dx[d];
            jacobian *= 0.5 * dx[d];
        }
        Self {
            states,
            ndims,
            metric,
            jacobian,
        }
    }

    fn check_admissible(&self, eq: &Equation) -> Result<()> {
        if eq.ndims() != self.ndims {
            return Err(Error::config(format!(
                "{} element for a {}D equation",
                self.ndims,
                eq.ndims()
            )));
        }
        self.states.iter().try_for_each(|u| eq.check_admissible(u))
    }
}

/// Volume-term increment per node together with the flux evaluations spent on it.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeContribution {
    pub rate: Vec<Vars>,
    pub flux_evals: FluxCounter,
}

/// Node indices of every 1D line in direction `dir`: `(first, stride)`.
#[inline]
pub(crate) fn lines(ndims: usize, n: usize, dir: usize) -> impl Iterator<Item = (usize, usize)> {
    let count = if ndims == 1 { 1 } else { n };
    (0..count).map(move |l| match (ndims, dir) {
        (1, _) => (0, 1),
        (_, 0) => (l * n, 1),
        _ => (l, n),
    })
}

#[inline]
fn axpy(out: &mut Vars, a: f64, x: &Vars) {
    for v in 0..4 {
        out[v] += a * x[v];
    }
}

/// Adds `scale · J⁻¹ M⁻¹DᵀM f` per direction to `out`.
pub(crate) fn weak_form_into(
    elem: &ElementView<'_>,
    ops: &OperatorSet,
    eq: &Equation,
    scale: f64,
    out: &mut [Vars],
    counter: &mut FluxCounter,
) {
    let n = ops.nodes_1d();
    let k = ops.weak_flat();
    let mut f = [ZERO; MAX_LINE];
    for dir in 0..elem.ndims {
        let factor = scale * elem.metric[dir];
        for (first, stride) in lines(elem.ndims, n, dir) {
            for (q, fq) in f.iter_mut().enumerate().take(n) {
                *fq = eq.flux(&elem.states[first + q * stride], dir);
            }
            counter.analytical += n as u64;
            for i in 0..n {
                let mut acc = ZERO;
                for q in 0..n {
                    axpy(&mut acc, k[i * n + q], &f[q]);
                }
                axpy(&mut out[first + i * stride], factor, &acc);
            }
        }
    }
}

/// Adds `-scale · J⁻¹ D_split f^vol` per direction to `out`, one flux
/// evaluation per unordered node pair.
pub(crate) fn flux_differencing_into(
    elem: &ElementView<'_>,
    ops: &OperatorSet,
    eq: &Equation,
    volume_flux: FluxKind,
    scale: f64,
    out: &mut [Vars],
    counter: &mut FluxCounter,
) {
    let n = ops.nodes_1d();
    let split = ops.split_flat();
    for dir in 0..elem.ndims {
        let factor = scale * elem.metric[dir];
        for (first, stride) in lines(elem.ndims, n, dir) {
            for j in 0..n {
                let uj = &elem.states[first + j * stride];
                for q in (j + 1)..n {
                    let uq = &elem.states[first + q * stride];
                    let f = eq.two_point_flux(volume_flux, uj, uq, dir);
                    axpy(&mut out[first + j * stride], -factor * split[j * n + q], &f);
                    axpy(&mut out[first + q * stride], -factor * split[q * n + j], &f);
                }
            }
            counter.two_point += (n * (n - 1) / 2) as u64;
        }
    }
}

/// Adds `scale ·` the first-order subcell finite-volume update with zero
/// flux on the outer subcell faces; the interface fluxes enter through the
/// common surface term.
pub(crate) fn subcell_fv_into(
    elem: &ElementView<'_>,
    ops: &OperatorSet,
    eq: &Equation,
    surface_flux: FluxKind,
    scale: f64,
    out: &mut [Vars],
    counter: &mut FluxCounter,
) {
    let n = ops.nodes_1d();
    let inv_w = ops.inv_weights();
    for dir in 0..elem.ndims {
        let factor = scale * elem.metric[dir];
        for (first, stride) in lines(elem.ndims, n, dir) {
            for j in 0..(n - 1) {
                let a = first + j * stride;
                let b = a + stride;
                let f = eq.numerical_flux(surface_flux, &elem.states[a], &elem.states[b], dir);
                axpy(&mut out[a], -factor * inv_w[j], &f);
                axpy(&mut out[b], factor * inv_w[j + 1], &f);
            }
            counter.subcell += (n - 1) as u64;
        }
    }
}

pub(crate) fn blended_into(
    elem: &ElementView<'_>,
    ops: &OperatorSet,
    eq: &Equation,
    volume_flux: FluxKind,
    surface_flux: FluxKind,
    beta: f64,
    out: &mut [Vars],
    counter: &mut FluxCounter,
) {
    if beta < 1.0 {
        flux_differencing_into(elem, ops, eq, volume_flux, 1.0 - beta, out, counter);
    }
    if beta > 0.0 {
        subcell_fv_into(elem, ops, eq, surface_flux, beta, out, counter);
    }
}

fn contribution(elem: &ElementView<'_>, run: impl FnOnce(&mut [Vars], &mut FluxCounter)) -> VolumeContribution {
    let mut rate = vec![ZERO; elem.states.len()];
    let mut flux_evals = FluxCounter::default();
    run(&mut rate, &mut flux_evals);
    VolumeContribution { rate, flux_evals }
}

/// Weak-form volume term `J⁻¹ M⁻¹DᵀM f`.
pub fn weak_form_vt(elem: &ElementView<'_>, ops: &OperatorSet, eq: &Equation) -> Result<VolumeContribution> {
    elem.check_admissible(eq)?;
    Ok(contribution(elem, |out, c| weak_form_into(elem, ops, eq, 1.0, out, c)))
}

/// Flux-differencing volume term `-J⁻¹ D_split f^vol`.
pub fn flux_differencing_vt(
    elem: &ElementView<'_>,
    ops: &OperatorSet,
    eq: &Equation,
    volume_flux: FluxKind,
) -> Result<VolumeContribution> {
    eq.check_volume_flux(volume_flux)?;
    elem.check_admissible(eq)?;
    Ok(contribution(elem, |out, c| {
        flux_differencing_into(elem, ops, eq, volume_flux, 1.0, out, c)
    }))
}

/// First-order finite volumes on the Lobatto subcells.
pub fn subcell_fv_vt(
    elem: &ElementView<'_>,
    ops: &OperatorSet,
    eq: &Equation,
    surface_flux: FluxKind,
) -> Result<VolumeContribution> {
    eq.check_surface_flux(surface_flux)?;
    elem.check_admissible(eq)?;
    Ok(contribution(elem, |out, c| {
        subcell_fv_into(elem, ops, eq, surface_flux, 1.0, out, c)
    }))
}

/// Convex blend `(1-β)·FD + β·FV`.
pub fn blended_vt(
    elem: &ElementView<'_>,
    ops: &OperatorSet,
    eq: &Equation,
    volume_flux: FluxKind,
    surface_flux: FluxKind,
    beta: f64,
) -> Result<VolumeContribution> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::config(format!("blending factor {beta} outside [0, 1]")));
    }
    eq.check_volume_flux(volume_flux)?;
    eq.check_surface_flux(surface_flux)?;
    elem.check_admissible(eq)?;
    Ok(contribution(elem, |out, c| {
        blended_into(elem, ops, eq, volume_flux, surface_flux, beta, out, c)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(v: f64) -> Vars {
        [v, 0.0, 0.0, 0.0]
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn weak_form_p1_hand_computation() {
        // Burgers with nodal fluxes (0, 1): u = (0, √2)
        let ops = OperatorSet::new(1).unwrap();
        let states = [s(0.0), s(2f64.sqrt())];
        let elem = ElementView::new(&states, 1, [2.0, 0.0], &ops).unwrap();
        let c = weak_form_vt(&elem, &ops, &Equation::Burgers1d).unwrap();
        assert!(close(c.rate[0][0], -0.5, 1e-15));
        assert!(close(c.rate[1][0], 0.5, 1e-15));
        assert_eq!(c.flux_evals.analytical, 2);
    }

    #[test]
    fn flux_differencing_p1_hand_computation() {
        let ops = OperatorSet::new(1).unwrap();
        let states = [s(0.0), s(2.0)];
        let elem = ElementView::new(&states, 1, [2.0, 0.0], &ops).unwrap();
        let c = flux_differencing_vt(&elem, &ops, &Equation::Burgers1d, FluxKind::EcBurgers).unwrap();
        assert!(close(c.rate[0][0], -2.0 / 3.0, 1e-15));
        assert!(close(c.rate[1][0], 2.0 / 3.0, 1e-15));
        assert_eq!(c.flux_evals.two_point, 1);
    }

    #[test]
    fn subcell_fv_p2_burgers() {
        let ops = OperatorSet::new(2).unwrap();
        let states = [s(0.0), s(1.0), s(2.0)];
        let elem = ElementView::new(&states, 1, [2.0, 0.0], &ops).unwrap();
        let c = subcell_fv_vt(&elem, &ops, &Equation::Burgers1d, FluxKind::Rusanov).unwrap();
        // interior fluxes -1/4 and 1/4 from the Rusanov formula, weights (1/3, 4/3, 1/3)
        assert!(close(c.rate[0][0], 0.75, 1e-14));
        assert!(close(c.rate[1][0], -0.375, 1e-14));
        assert!(close(c.rate[2][0], 0.75, 1e-14));
        assert_eq!(c.flux_evals.subcell, 2);
    }

    #[test]
    fn subcell_fv_constant_state_leaves_outer_faces() {
        let ops = OperatorSet::new(1).unwrap();
        let eq = Equation::Euler1d { gamma: 1.4 };
        let u = eq.primitive_to_conserved(&[1.0, 0.3, 2.0, 0.0]).unwrap();
        let states = [u, u];
        let elem = ElementView::new(&states, 1, [2.0, 0.0], &ops).unwrap();
        let c = subcell_fv_vt(&elem, &ops, &eq, FluxKind::Rusanov).unwrap();
        let f = eq.physical_flux(&u, 0).unwrap();
        // widths {1, 1}: only the single interior face acts
        for v in 0..3 {
            assert!(close(c.rate[0][v], -f[v], 1e-14));
            assert!(close(c.rate[1][v], f[v], 1e-14));
        }
    }

    #[test]
    fn blend_endpoints_and_range() {
        let ops = OperatorSet::new(3).unwrap();
        let eq = Equation::Burgers1d;
        let states = [s(0.1), s(-0.7), s(1.3), s(0.4)];
        let elem = ElementView::new(&states, 1, [0.5, 0.0], &ops).unwrap();
        let fd = flux_differencing_vt(&elem, &ops, &eq, FluxKind::EcBurgers).unwrap();
        let fv = subcell_fv_vt(&elem, &ops, &eq, FluxKind::Rusanov).unwrap();
        let b0 = blended_vt(&elem, &ops, &eq, FluxKind::EcBurgers, FluxKind::Rusanov, 0.0).unwrap();
        let b1 = blended_vt(&elem, &ops, &eq, FluxKind::EcBurgers, FluxKind::Rusanov, 1.0).unwrap();
        assert_eq!(b0.rate, fd.rate);
        assert_eq!(b0.flux_evals.subcell, 0);
        assert_eq!(b1.rate, fv.rate);
        assert_eq!(b1.flux_evals.two_point, 0);
        let bh = blended_vt(&elem, &ops, &eq, FluxKind::EcBurgers, FluxKind::Rusanov, 0.25).unwrap();
        for j in 0..4 {
            assert!(close(bh.rate[j][0], 0.75 * fd.rate[j][0] + 0.25 * fv.rate[j][0], 1e-14));
        }
        assert!(blended_vt(&elem, &ops, &eq, FluxKind::EcBurgers, FluxKind::Rusanov, 1.5).is_err());
        assert!(blended_vt(&elem, &ops, &eq, FluxKind::EcBurgers, FluxKind::Rusanov, -0.1).is_err());
    }

    #[test]
    fn element_view_validation() {
        let ops = OperatorSet::new(2).unwrap();
        let states = [s(0.0); 3];
        assert!(ElementView::new(&states, 2, [1.0, 1.0], &ops).is_err());
        assert!(ElementView::new(&states, 1, [0.0, 1.0], &ops).is_err());
        let e = ElementView::new(&states, 1, [0.5, 0.0], &ops).unwrap();
        assert_eq!(e.metric[0], 4.0);
        assert_eq!(e.jacobian, 0.25);
    }

    #[test]
    fn counters_follow_cost_formulas() {
        let eq = Equation::Kpp2d;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in 1..=6 {
            let ops = OperatorSet::new(p).unwrap();
            let n = p + 1;
            let states: Vec<Vars> = (0..n * n).map(|_| s(rng.gen_range(0.0..10.0))).collect();
            let elem = ElementView::new(&states, 2, [0.1, 0.2], &ops).unwrap();
            let wf = weak_form_vt(&elem, &ops, &eq).unwrap();
            assert_eq!(wf.flux_evals.analytical, (2 * n * n) as u64);
            let fd = flux_differencing_vt(&elem, &ops, &eq, FluxKind::EcKpp).unwrap();
            assert_eq!(fd.flux_evals.two_point * 2, (2 * p * n * n) as u64);
        }
    }
}

//! Method-of-lines right-hand side on uniform Cartesian meshes.
//!
//! A stage runs a face pass that stores every interface flux once, then an
//! element pass that picks a volume kernel per element, adds the surface
//! term `-J⁻¹M⁻¹B f*` and the source. Elements are processed in parallel and
//! their outcomes reduced in element order, so results do not depend on the
//! thread count.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::equations::{Equation, FluxKind, Vars, ZERO};
use crate::error::{Error, Result};
use crate::indicators::{
    entropy_production_raw, fd_entropy_production_via_potential, heuristic_select, modal_shock_indicator,
    rigorous_select, shock_capturing_select, IndicatorConfig, SchemeChoice, ShockIndicatorConfig,
};
use crate::mesh::{load, Mesh, SolutionField};
use crate::operators::OperatorSet;
use crate::volume::{
    blended_into, flux_differencing_into, weak_form_into, ElementView, FluxCounter,
};

/// Exterior state `u_bc(x, t)`.
pub type StateFn = Arc<dyn Fn([f64; 2], f64) -> Vars + Send + Sync>;
/// Pointwise source `s(x, t, u)`.
pub type SourceFn = Arc<dyn Fn([f64; 2], f64, &Vars) -> Vars + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    /// Weakly imposed through the surface flux on every non-periodic side.
    Dirichlet(StateFn),
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Periodic => f.write_str("Periodic"),
            BoundaryCondition::Dirichlet(_) => f.write_str("Dirichlet(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolumeMode {
    WeakForm,
    FluxDifferencing,
    Adaptive(IndicatorConfig),
}

impl VolumeMode {
    pub const NAMES: [&'static str; 5] = ["wf", "fd", "adaptive_rigorous", "adaptive_heuristic", "blended_shock"];

    pub fn name(&self) -> &'static str {
        match self {
            VolumeMode::WeakForm => "wf",
            VolumeMode::FluxDifferencing => "fd",
            VolumeMode::Adaptive(IndicatorConfig::Rigorous) => "adaptive_rigorous",
            VolumeMode::Adaptive(IndicatorConfig::Heuristic { .. }) => "adaptive_heuristic",
            VolumeMode::Adaptive(IndicatorConfig::ShockCapturing(_)) => "blended_shock",
        }
    }

    pub fn rigorous() -> Self {
        VolumeMode::Adaptive(IndicatorConfig::Rigorous)
    }

    pub fn heuristic(sigma: f64) -> Self {
        VolumeMode::Adaptive(IndicatorConfig::Heuristic { sigma })
    }

    pub fn shock_capturing(config: ShockIndicatorConfig) -> Self {
        VolumeMode::Adaptive(IndicatorConfig::ShockCapturing(config))
    }
}

impl fmt::Display for VolumeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a mode name; the heuristic and shock-capturing modes get their
/// default parameters.
impl FromStr for VolumeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "wf" | "weak_form" => Ok(VolumeMode::WeakForm),
            "fd" | "flux_differencing" => Ok(VolumeMode::FluxDifferencing),
            "adaptive_rigorous" | "rigorous" | "av" => Ok(VolumeMode::rigorous()),
            "adaptive_heuristic" | "heuristic" => Ok(VolumeMode::heuristic(5e-3)),
            "blended_shock" | "shock_capturing" | "blended" => {
                Ok(VolumeMode::shock_capturing(ShockIndicatorConfig::default()))
            }
            other => Err(Error::config(format!(
                "unknown volume mode '{other}' (expected one of {})",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

/// Per-element diagnostics of one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementRecord {
    pub choice: SchemeChoice,
    /// Entropy production of the weak-form volume term, NaN if not evaluated.
    pub entropy_wf: f64,
    /// Entropy production of the flux-differencing volume term (potential form).
    pub entropy_fd: f64,
    /// Entropy production of the volume term actually applied.
    pub entropy_applied: f64,
}

/// Summary of one right-hand-side evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StageReport {
    pub n_wf: usize,
    pub n_fd: usize,
    pub n_blend: usize,
    pub beta_sum: f64,
    /// `Σ_i J Σ_j ω̄_j w_jᵀ u̇_j`; NaN unless diagnostics were requested.
    pub entropy_rate: f64,
    pub counters: FluxCounter,
    pub face_time: Duration,
    pub volume_time: Duration,
    pub total_time: Duration,
    /// Filled only with diagnostics.
    pub elements: Vec<ElementRecord>,
}

impl StageReport {
    pub fn n_elements(&self) -> usize {
        self.n_wf + self.n_fd + self.n_blend
    }

    /// Mean blending factor over all elements.
    pub fn mean_beta(&self) -> f64 {
        match self.n_elements() {
            0 => 0.0,
            n => self.beta_sum / n as f64,
        }
    }

    pub fn choices(&self) -> Vec<SchemeChoice> {
        self.elements.iter().map(|r| r.choice).collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RhsOptions<'a> {
    /// Apply these schemes instead of running the indicator.
    pub frozen: Option<&'a [SchemeChoice]>,
    /// Record per-element entropy productions and the total entropy rate.
    pub diagnostics: bool,
}

#[derive(Clone)]
pub struct Semidiscretization {
    pub eq: Equation,
    pub mesh: Mesh,
    pub ops: OperatorSet,
    pub surface_flux: FluxKind,
    /// Two-point flux of the flux-differencing kernel and the blend.
    pub volume_flux: FluxKind,
    pub mode: VolumeMode,
    pub boundary: BoundaryCondition,
    pub source: Option<SourceFn>,
}

impl fmt::Debug for Semidiscretization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Semidiscretization")
            .field("eq", &self.eq)
            .field("mesh", &self.mesh)
            .field("degree", &self.ops.degree())
            .field("surface_flux", &self.surface_flux)
            .field("volume_flux", &self.volume_flux)
            .field("mode", &self.mode)
            .field("boundary", &self.boundary)
            .field("source", &self.source.is_some())
            .finish()
    }
}

struct Scratch {
    states: Vec<Vars>,
    rate: Vec<Vars>,
}

struct ElementOutcome {
    choice: SchemeChoice,
    counter: FluxCounter,
    record: Option<ElementRecord>,
    entropy_rate: f64,
}

impl Semidiscretization {
    pub fn new(
        eq: Equation,
        mesh: Mesh,
        degree: usize,
        surface_flux: FluxKind,
        volume_flux: FluxKind,
        mode: VolumeMode,
        boundary: BoundaryCondition,
    ) -> Result<Self> {
        let sd = Self {
            eq,
            mesh,
            ops: OperatorSet::new(degree)?,
            surface_flux,
            volume_flux,
            mode,
            boundary,
            source: None,
        };
        sd.validate()?;
        Ok(sd)
    }

    pub fn with_source(mut self, source: SourceFn) -> Self {
        self.source = Some(source);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.eq.validate()?;
        if self.eq.ndims() != self.mesh.ndims {
            return Err(Error::config(format!(
                "{} needs a {}D mesh, got {}D",
                self.eq,
                self.eq.ndims(),
                self.mesh.ndims
            )));
        }
        self.eq.check_surface_flux(self.surface_flux)?;
        self.eq.check_volume_flux(self.volume_flux)?;
        if let VolumeMode::Adaptive(ind) = &self.mode {
            ind.validate()?;
        }
        if !self.mesh.is_periodic() && matches!(self.boundary, BoundaryCondition::Periodic) {
            return Err(Error::config("non-periodic mesh requires a Dirichlet boundary state"));
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.ops.degree()
    }

    pub fn nvars(&self) -> usize {
        self.eq.nvars()
    }

    pub fn nodes_per_element(&self) -> usize {
        self.mesh.nodes_per_element(&self.ops)
    }

    /// Number of scalar unknowns.
    pub fn ndofs(&self) -> usize {
        self.mesh.n_elements() * self.nodes_per_element() * self.nvars()
    }

    /// Nodal interpolant of `f`.
    pub fn project(&self, f: impl Fn([f64; 2]) -> Vars) -> SolutionField {
        SolutionField::from_fn(&self.mesh, &self.ops, self.nvars(), f)
    }

    pub fn zeros(&self) -> SolutionField {
        SolutionField::zeros(self.mesh.n_elements(), self.nodes_per_element(), self.nvars())
    }

    /// Exterior state seen by the Riemann solver on a boundary face.
    pub fn apply_boundary(&self, x: [f64; 2], t: f64, interior: &Vars) -> Vars {
        match &self.boundary {
            BoundaryCondition::Periodic => *interior,
            BoundaryCondition::Dirichlet(f) => f(x, t),
        }
    }

    /// Source increment at one node; zero without a source.
    pub fn evaluate_source(&self, x: [f64; 2], t: f64, u: &Vars) -> Vars {
        match &self.source {
            Some(s) => s(x, t, u),
            None => ZERO,
        }
    }

    pub fn compute_rhs(&self, u: &[f64], t: f64, du: &mut [f64]) -> Result<StageReport> {
        self.compute_rhs_with(u, t, du, &RhsOptions::default())
    }

    pub fn compute_rhs_with(&self, u: &[f64], t: f64, du: &mut [f64], opts: &RhsOptions<'_>) -> Result<StageReport> {
        let n_dofs = self.ndofs();
        if u.len() != n_dofs || du.len() != n_dofs {
            return Err(Error::config(format!(
                "state has {} entries, rate {}, expected {n_dofs}",
                u.len(),
                du.len()
            )));
        }
        if let Some(frozen) = opts.frozen {
            if frozen.len() != self.mesh.n_elements() {
                return Err(Error::config("frozen scheme list does not match the element count"));
            }
        }
        let start = Instant::now();
        let (faces, face_count) = self.face_pass(u, t);
        let face_time = start.elapsed();

        let npe = self.nodes_per_element();
        let stride = npe * self.nvars();
        let outcomes: Vec<Result<ElementOutcome>> = du
            .par_chunks_mut(stride)
            .enumerate()
            .map_init(
                || Scratch {
                    states: vec![ZERO; npe],
                    rate: vec![ZERO; npe],
                },
                |scratch, (e, out)| self.element_rhs(e, u, t, &faces, out, scratch, opts),
            )
            .collect();
        let volume_time = start.elapsed() - face_time;

        let mut report = StageReport {
            entropy_rate: if opts.diagnostics { 0.0 } else { f64::NAN },
            face_time,
            volume_time,
            ..Default::default()
        };
        report.counters.surface = face_count;
        let mut entropy = crate::indicators::KahanSum::default();
        for outcome in outcomes {
            let o = outcome?;
            match o.choice {
                SchemeChoice::WeakForm => report.n_wf += 1,
                SchemeChoice::FluxDifferencing => report.n_fd += 1,
                SchemeChoice::Blend(b) => {
                    report.n_blend += 1;
                    report.beta_sum += b;
                }
            }
            report.counters += o.counter;
            if let Some(r) = o.record {
                report.elements.push(r);
                entropy.add(o.entropy_rate);
            }
        }
        if opts.diagnostics {
            report.entropy_rate = entropy.value();
        }
        report.total_time = start.elapsed();
        Ok(report)
    }

    /// Convenience wrapper returning a freshly allocated rate.
    pub fn rhs(&self, state: &SolutionField) -> Result<(Vec<f64>, StageReport)> {
        let mut du = vec![0.0; state.data.len()];
        let report = self.compute_rhs(&state.data, state.t, &mut du)?;
        Ok((du, report))
    }

    fn n_face_nodes(&self) -> usize {
        if self.mesh.ndims == 1 {
            1
        } else {
            self.ops.nodes_1d()
        }
    }

    /// Face slots per grid line in direction `dir`.
    fn face_slots(&self, dir: usize) -> usize {
        self.mesh.cells[dir] + usize::from(!self.mesh.periodic[dir])
    }

    /// Index of the lower face of element `(ex, ey)` in direction `dir`
    /// together with its upper face.
    #[inline]
    fn element_faces(&self, dir: usize, ex: usize, ey: usize) -> (usize, usize) {
        let m = &self.mesh;
        let slots = self.face_slots(dir);
        let (along, line) = if dir == 0 { (ex, ey) } else { (ey, ex) };
        let upper = if m.periodic[dir] {
            (along + 1) % m.cells[dir]
        } else {
            along + 1
        };
        (line * slots + along, line * slots + upper)
    }

    /// Computes all interface fluxes. Returns per-direction buffers laid out
    /// `(line * slots + slot) * n_face + k` and the number of evaluations.
    fn face_pass(&self, u: &[f64], t: f64) -> ([Vec<Vars>; 2], u64) {
        let m = &self.mesh;
        let n = self.ops.nodes_1d();
        let nf = self.n_face_nodes();
        let nv = self.nvars();
        let npe = self.nodes_per_element();
        let xi = &self.ops.rule.nodes;
        let dx = m.dx();
        let mut buffers = [Vec::new(), Vec::new()];
        let mut count = 0;
        for dir in 0..m.ndims {
            let slots = self.face_slots(dir);
            let lines = m.cells[1 - dir];
            let lines = if m.ndims == 1 { 1 } else { lines };
            let mut buf = vec![ZERO; lines * slots * nf];
            let cells = m.cells[dir];
            let periodic = m.periodic[dir];
            buf.par_chunks_mut(nf).enumerate().for_each(|(idx, face)| {
                let line = idx / slots;
                let slot = idx % slots;
                let elem = |along: usize| {
                    if dir == 0 {
                        m.element_index(along, line)
                    } else {
                        m.element_index(line, along)
                    }
                };
                let lower = if slot > 0 {
                    Some(elem(slot - 1))
                } else if periodic {
                    Some(elem(cells - 1))
                } else {
                    None
                };
                let upper = if slot < cells { Some(elem(slot)) } else { None };
                for (k, fk) in face.iter_mut().enumerate() {
                    // trace nodes: last layer of the lower element, first of the upper
                    let (node_lo, node_hi) = match (m.ndims, dir) {
                        (1, _) => (n - 1, 0),
                        (_, 0) => (n - 1 + n * k, n * k),
                        _ => (k + n * (n - 1), k),
                    };
                    let face_x = || {
                        let mut x = [0.0; 2];
                        x[dir] = m.lower[dir] + slot as f64 * dx[dir];
                        if m.ndims == 2 {
                            let o = 1 - dir;
                            x[o] = m.lower[o] + (line as f64 + 0.5 * (xi[k] + 1.0)) * dx[o];
                        }
                        x
                    };
                    let ul = lower.map(|e| load(u, (e * npe + node_lo) * nv, nv));
                    let ur = upper.map(|e| load(u, (e * npe + node_hi) * nv, nv));
                    let (ul, ur) = match (ul, ur) {
                        (Some(l), Some(r)) => (l, r),
                        (None, Some(r)) => (self.apply_boundary(face_x(), t, &r), r),
                        (Some(l), None) => (l, self.apply_boundary(face_x(), t, &l)),
                        (None, None) => unreachable!("face without neighbours"),
                    };
                    *fk = self.eq.numerical_flux(self.surface_flux, &ul, &ur, dir);
                }
            });
            count += buf.len() as u64;
            buffers[dir] = buf;
        }
        (buffers, count)
    }

    #[allow(clippy::too_many_arguments)]
    fn element_rhs(
        &self,
        e: usize,
        u: &[f64],
        t: f64,
        faces: &[Vec<Vars>; 2],
        out: &mut [f64],
        scratch: &mut Scratch,
        opts: &RhsOptions<'_>,
    ) -> Result<ElementOutcome> {
        let eq = &self.eq;
        let ops = &self.ops;
        let nv = self.nvars();
        let npe = scratch.states.len();
        let base = e * npe * nv;
        for (j, s) in scratch.states.iter_mut().enumerate() {
            *s = load(u, base + j * nv, nv);
            if eq.check_admissible(s).is_err() {
                let (density, pressure) = eq.density_pressure(s);
                return Err(Error::InadmissibleNode {
                    element: e,
                    node: j,
                    density,
                    pressure,
                });
            }
        }
        let elem = ElementView::from_parts(&scratch.states, self.mesh.ndims, self.mesh.dx());
        let rate = &mut scratch.rate;
        rate.fill(ZERO);
        let mut counter = FluxCounter::default();
        let mut entropy_wf = f64::NAN;
        let mut entropy_fd = f64::NAN;

        let choice = match (opts.frozen, &self.mode) {
            (Some(frozen), _) => {
                self.apply(frozen[e], &elem, rate, &mut counter);
                frozen[e]
            }
            (None, VolumeMode::WeakForm) => {
                weak_form_into(&elem, ops, eq, 1.0, rate, &mut counter);
                SchemeChoice::WeakForm
            }
            (None, VolumeMode::FluxDifferencing) => {
                flux_differencing_into(&elem, ops, eq, self.volume_flux, 1.0, rate, &mut counter);
                SchemeChoice::FluxDifferencing
            }
            (None, VolumeMode::Adaptive(IndicatorConfig::ShockCapturing(cfg))) => {
                let beta = modal_shock_indicator(&elem, eq, ops, cfg);
                let choice = shock_capturing_select(beta, cfg.smooth);
                self.apply(choice, &elem, rate, &mut counter);
                choice
            }
            (None, VolumeMode::Adaptive(ind)) => {
                weak_form_into(&elem, ops, eq, 1.0, rate, &mut counter);
                let decision = match ind {
                    IndicatorConfig::Heuristic { sigma } => heuristic_select(&elem, rate, eq, ops, *sigma),
                    _ => rigorous_select(&elem, rate, eq, ops),
                };
                entropy_wf = decision.entropy_wf;
                entropy_fd = decision.entropy_fd;
                if decision.choice == SchemeChoice::FluxDifferencing {
                    rate.fill(ZERO);
                    flux_differencing_into(&elem, ops, eq, self.volume_flux, 1.0, rate, &mut counter);
                }
                decision.choice
            }
        };

        let record = if opts.diagnostics {
            if entropy_fd.is_nan() {
                entropy_fd = fd_entropy_production_via_potential(&elem, ops, eq);
            }
            let applied = entropy_production_raw(&elem, rate, ops, eq);
            if choice == SchemeChoice::WeakForm && entropy_wf.is_nan() {
                entropy_wf = applied;
            }
            Some(ElementRecord {
                choice,
                entropy_wf,
                entropy_fd,
                entropy_applied: applied,
            })
        } else {
            None
        };

        self.add_surface(e, faces, rate);
        if self.source.is_some() {
            for (j, r) in rate.iter_mut().enumerate() {
                let x = self.mesh.node_coords(e, j, ops);
                let s = self.evaluate_source(x, t, &scratch.states[j]);
                for v in 0..nv {
                    r[v] += s[v];
                }
            }
        }

        let entropy_rate = if opts.diagnostics {
            entropy_production_raw(&elem, rate, ops, eq)
        } else {
            0.0
        };
        for (j, r) in rate.iter().enumerate() {
            let dst = &mut out[j * nv..(j + 1) * nv];
            dst.copy_from_slice(&r[..nv]);
            if dst.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { element: e });
            }
        }
        Ok(ElementOutcome {
            choice,
            counter,
            record,
            entropy_rate,
        })
    }

    fn apply(&self, choice: SchemeChoice, elem: &ElementView<'_>, rate: &mut [Vars], counter: &mut FluxCounter) {
        let (eq, ops) = (&self.eq, &self.ops);
        match choice {
            SchemeChoice::WeakForm => weak_form_into(elem, ops, eq, 1.0, rate, counter),
            SchemeChoice::FluxDifferencing => {
                flux_differencing_into(elem, ops, eq, self.volume_flux, 1.0, rate, counter)
            }
            SchemeChoice::Blend(beta) => blended_into(
                elem,
                ops,
                eq,
                self.volume_flux,
                self.surface_flux,
                beta,
                rate,
                counter,
            ),
        }
    }

    /// Adds `-J⁻¹M⁻¹B f*` from the stored interface fluxes.
    fn add_surface(&self, e: usize, faces: &[Vec<Vars>; 2], rate: &mut [Vars]) {
        let n = self.ops.nodes_1d();
        let nf = self.n_face_nodes();
        let inv_w = self.ops.inv_weights();
        let (ex, ey) = self.mesh.element_coords(e);
        let dx = self.mesh.dx();
        for dir in 0..self.mesh.ndims {
            let metric = 2.0 / dx[dir];
            let (lo, hi) = self.element_faces(dir, ex, ey);
            let left = metric * inv_w[0];
            let right = metric * inv_w[n - 1];
            for k in 0..nf {
                let f_lo = &faces[dir][lo * nf + k];
                let f_hi = &faces[dir][hi * nf + k];
                let (first, last) = match (self.mesh.ndims, dir) {
                    (1, _) => (0, n - 1),
                    (_, 0) => (n * k, n - 1 + n * k),
                    _ => (k, k + n * (n - 1)),
                };
                for v in 0..4 {
                    rate[first][v] += left * f_lo[v];
                    rate[last][v] -= right * f_hi[v];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler1d_wave(mode: VolumeMode, surface: FluxKind) -> (Semidiscretization, SolutionField) {
        let eq = Equation::Euler1d { gamma: 1.4 };
        let mesh = Mesh::new_1d(8, -1.0, 1.0, true).unwrap();
        let sd = Semidiscretization::new(eq, mesh, 3, surface, FluxKind::EcRanocha, mode, BoundaryCondition::Periodic)
            .unwrap();
        let u = sd.project(|x| {
            let rho = 1.0 + 0.98 * (2.0 * std::f64::consts::PI * x[0]).sin();
            eq.primitive_to_conserved(&[rho, 0.1, 20.0, 0.0]).unwrap()
        });
        (sd, u)
    }

    #[test]
    fn free_stream_all_modes() {
        let eq = Equation::Euler2d { gamma: 1.4 };
        let mesh = Mesh::new_2d([3, 2], [0.0, 0.0], [1.0, 2.0], [true, true]).unwrap();
        let state = eq.primitive_to_conserved(&[1.3, 0.4, -0.2, 2.0]).unwrap();
        for mode in ["wf", "fd", "adaptive_rigorous", "adaptive_heuristic", "blended_shock"] {
            let sd = Semidiscretization::new(
                eq,
                mesh.clone(),
                3,
                FluxKind::Hllc,
                FluxKind::EcRanocha,
                mode.parse().unwrap(),
                BoundaryCondition::Periodic,
            )
            .unwrap();
            let u = sd.project(|_| state);
            let (du, report) = sd.rhs(&u).unwrap();
            assert!(du.iter().all(|v| v.abs() < 1e-13), "{mode}");
            assert_eq!(report.n_elements(), 6);
        }
    }

    #[test]
    fn dirichlet_freestream_matches_periodic() {
        let eq = Equation::Euler2d { gamma: 1.4 };
        let state = eq.primitive_to_conserved(&[1.0, 0.3, 0.1, 1.0]).unwrap();
        let mesh = Mesh::new_2d([2, 2], [0.0, 0.0], [1.0, 1.0], [false, false]).unwrap();
        let bc = BoundaryCondition::Dirichlet(Arc::new(move |_, _| state));
        let sd = Semidiscretization::new(eq, mesh, 2, FluxKind::Rusanov, FluxKind::EcRanocha, VolumeMode::WeakForm, bc)
            .unwrap();
        let (du, _) = sd.rhs(&sd.project(|_| state)).unwrap();
        assert!(du.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn periodic_mesh_needs_no_boundary_state() {
        let mesh = Mesh::new_1d(4, 0.0, 1.0, false).unwrap();
        let err = Semidiscretization::new(
            Equation::Burgers1d,
            mesh,
            2,
            FluxKind::GodunovBurgers,
            FluxKind::EcBurgers,
            VolumeMode::WeakForm,
            BoundaryCondition::Periodic,
        );
        assert!(err.is_err());
    }

    #[test]
    fn ec_entropy_rate_vanishes() {
        let (sd, u) = euler1d_wave(VolumeMode::FluxDifferencing, FluxKind::EcRanocha);
        let mut du = vec![0.0; u.data.len()];
        let r = sd
            .compute_rhs_with(&u.data, 0.0, &mut du, &RhsOptions { frozen: None, diagnostics: true })
            .unwrap();
        assert!(r.entropy_rate.abs() < 1e-11, "{}", r.entropy_rate);
    }

    #[test]
    fn inadmissible_node_reported() {
        let (sd, mut u) = euler1d_wave(VolumeMode::WeakForm, FluxKind::Hllc);
        u.data[3 * 4 * 3 + 2 * 3] = -1.0;
        match sd.rhs(&u) {
            Err(Error::InadmissibleNode { element, node, .. }) => assert_eq!((element, node), (3, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn source_constant() {
        let eq = Equation::Burgers1d;
        let mesh = Mesh::new_1d(4, 0.0, 1.0, true).unwrap();
        let sd = Semidiscretization::new(
            eq,
            mesh,
            2,
            FluxKind::GodunovBurgers,
            FluxKind::EcBurgers,
            VolumeMode::FluxDifferencing,
            BoundaryCondition::Periodic,
        )
        .unwrap()
        .with_source(Arc::new(|_, _, _| [0.7, 0.0, 0.0, 0.0]));
        let (du, _) = sd.rhs(&sd.project(|_| [1.5, 0.0, 0.0, 0.0])).unwrap();
        assert!(du.iter().all(|v| (v - 0.7).abs() < 1e-14));
    }

    #[test]
    fn mode_names_round_trip() {
        for name in VolumeMode::NAMES {
            assert_eq!(name.parse::<VolumeMode>().unwrap().name(), name);
        }
        assert!("nope".parse::<VolumeMode>().is_err());
    }
}

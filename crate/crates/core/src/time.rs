//! Explicit Runge–Kutta drivers.

use std::fmt;
use std::str::FromStr;

use crate::analysis::{min_density_pressure, total_entropy, CostSummary};
use crate::error::{Error, Result};
use crate::io::{StageSample, TimeSample};
use crate::mesh::{load, SolutionField};
use crate::semidisc::{RhsOptions, Semidiscretization, StageReport};

/// A right-hand side `u' = L(u, t)` on flat state vectors.
pub trait RhsSystem {
    type Report;
    fn rhs(&self, u: &[f64], t: f64, du: &mut [f64]) -> Result<Self::Report>;
}

/// Adapts a closure to [`RhsSystem`].
pub struct FnSystem<F>(pub F);

impl<F: Fn(&[f64], f64, &mut [f64])> RhsSystem for FnSystem<F> {
    type Report = ();
    fn rhs(&self, u: &[f64], t: f64, du: &mut [f64]) -> Result<()> {
        (self.0)(u, t, du);
        Ok(())
    }
}

/// Semidiscretization with fixed right-hand-side options.
pub struct SemidiscSystem<'a> {
    pub sd: &'a Semidiscretization,
    pub diagnostics: bool,
}

impl RhsSystem for SemidiscSystem<'_> {
    type Report = StageReport;
    fn rhs(&self, u: &[f64], t: f64, du: &mut [f64]) -> Result<StageReport> {
        let opts = RhsOptions {
            frozen: None,
            diagnostics: self.diagnostics,
        };
        self.sd.compute_rhs_with(u, t, du, &opts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkMethod {
    /// Carpenter–Kennedy five-stage, fourth-order 2N-storage scheme.
    Lsrk54,
    /// Ruuth's five-stage, fourth-order SSP scheme in Shu–Osher form.
    Ssprk54,
}

const LSRK_A: [f64; 5] = [
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
];
const LSRK_B: [f64; 5] = [
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
];

// Shu–Osher coefficients; stage times follow from the same recursion.
const SSP_B1: f64 = 0.391752226571890;
const SSP_A2: [f64; 2] = [0.444370493651235, 0.555629506348765];
const SSP_B2: f64 = 0.368410593050371;
const SSP_A3: [f64; 2] = [0.620101851488403, 0.379898148511597];
const SSP_B3: f64 = 0.251891774271694;
const SSP_A4: [f64; 2] = [0.178079954393132, 0.821920045606868];
const SSP_B4: f64 = 0.544974750228521;
// last weight closes the convex combination exactly
const SSP_A5: [f64; 3] = [0.517231671970585, 0.096059710526147, 1.0 - 0.517231671970585 - 0.096059710526147];
const SSP_B5: [f64; 2] = [0.063692468666290, 0.226007483236906];

impl RkMethod {
    pub const ALL: [RkMethod; 2] = [RkMethod::Lsrk54, RkMethod::Ssprk54];

    pub fn name(&self) -> &'static str {
        match self {
            RkMethod::Lsrk54 => "lsrk54",
            RkMethod::Ssprk54 => "ssprk54",
        }
    }

    pub fn order(&self) -> usize {
        4
    }

    pub fn stages(&self) -> usize {
        5
    }

    /// Advances `u` by one step, calling `on_stage` with every stage report.
    pub fn step<S: RhsSystem>(
        &self,
        sys: &S,
        u: &mut [f64],
        t: f64,
        dt: f64,
        work: &mut RkWork,
        mut on_stage: impl FnMut(S::Report),
    ) -> Result<()> {
        work.resize(u.len(), *self);
        match self {
            RkMethod::Lsrk54 => {
                let [k, du] = &mut work.bufs[..] else {
                    unreachable!()
                };
                // stage times obey the same recursion applied to u' = 1
                let (mut kc, mut c) = (0.0, 0.0);
                for s in 0..5 {
                    on_stage(sys.rhs(u, t + c * dt, du)?);
                    let a = LSRK_A[s];
                    let b = LSRK_B[s];
                    kc = a * kc + 1.0;
                    c += b * kc;
                    for ((ki, ui), di) in k.iter_mut().zip(u.iter_mut()).zip(du.iter()) {
                        *ki = a * *ki + dt * di;
                        *ui += b * *ki;
                    }
                }
            }
            RkMethod::Ssprk54 => {
                let [u0, u2, u3, l3, du] = &mut work.bufs[..] else {
                    unreachable!()
                };
                u0.copy_from_slice(u);
                let c1 = SSP_B1;
                // stage 1: u ← u1
                on_stage(sys.rhs(u, t, du)?);
                for (ui, di) in u.iter_mut().zip(du.iter()) {
                    *ui += SSP_B1 * dt * di;
                }
                // stage 2: u2
                on_stage(sys.rhs(u, t + c1 * dt, du)?);
                for i in 0..u.len() {
                    u2[i] = SSP_A2[0] * u0[i] + SSP_A2[1] * u[i] + SSP_B2 * dt * du[i];
                }
                let c2 = SSP_A2[1] * c1 + SSP_B2;
                // stage 3: u3
                on_stage(sys.rhs(u2, t + c2 * dt, du)?);
                for i in 0..u.len() {
                    u3[i] = SSP_A3[0] * u0[i] + SSP_A3[1] * u2[i] + SSP_B3 * dt * du[i];
                }
                let c3 = SSP_A3[1] * c2 + SSP_B3;
                // stage 4: u ← u4
                on_stage(sys.rhs(u3, t + c3 * dt, l3)?);
                for i in 0..u.len() {
                    u[i] = SSP_A4[0] * u0[i] + SSP_A4[1] * u3[i] + SSP_B4 * dt * l3[i];
                }
                let c4 = SSP_A4[1] * c3 + SSP_B4;
                // stage 5
                on_stage(sys.rhs(u, t + c4 * dt, du)?);
                for i in 0..u.len() {
                    u[i] = SSP_A5[0] * u2[i]
                        + SSP_A5[1] * u3[i]
                        + SSP_B5[0] * dt * l3[i]
                        + SSP_A5[2] * u[i]
                        + SSP_B5[1] * dt * du[i];
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for RkMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RkMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "lsrk54" | "carpenter_kennedy" | "ck45" => Ok(RkMethod::Lsrk54),
            "ssprk54" | "ruuth" | "ssp54" => Ok(RkMethod::Ssprk54),
            other => Err(Error::config(format!("unknown time integrator '{other}'"))),
        }
    }
}

/// Scratch registers of a Runge–Kutta step.
#[derive(Debug, Default, Clone)]
pub struct RkWork {
    bufs: Vec<Vec<f64>>,
}

impl RkWork {
    fn resize(&mut self, len: usize, method: RkMethod) {
        let count = match method {
            RkMethod::Lsrk54 => 2,
            RkMethod::Ssprk54 => 5,
        };
        if self.bufs.len() != count || self.bufs[0].len() != len {
            self.bufs = vec![vec![0.0; len]; count];
        } else if method == RkMethod::Lsrk54 {
            self.bufs[0].fill(0.0);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    Cfl(f64),
    FixedDt(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepController {
    pub mode: StepMode,
    pub t_final: f64,
    pub max_steps: usize,
}

impl StepController {
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            StepMode::Cfl(nu) if !(nu > 0.0 && nu.is_finite()) => {
                return Err(Error::config(format!("CFL number must be positive, got {nu}")))
            }
            StepMode::FixedDt(dt) if !(dt > 0.0 && dt.is_finite()) => {
                return Err(Error::config(format!("timestep must be positive, got {dt}")))
            }
            _ => {}
        }
        if !self.t_final.is_finite() {
            return Err(Error::config("final time must be finite"));
        }
        Ok(())
    }
}

/// `ν/(p+1) · min Δx_dir / λ_dir` over all elements, nodes and directions.
pub fn cfl_timestep(sd: &Semidiscretization, u: &[f64], cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl.is_finite()) {
        return Err(Error::config(format!("CFL number must be positive, got {cfl}")));
    }
    let nv = sd.nvars();
    let dx = sd.mesh.dx();
    let mut best = f64::INFINITY;
    for (k, chunk) in u.chunks_exact(nv).enumerate() {
        let s = load(chunk, 0, nv);
        sd.eq.check_admissible(&s).map_err(|_| {
            let (density, pressure) = sd.eq.density_pressure(&s);
            let npe = sd.nodes_per_element();
            Error::InadmissibleNode {
                element: k / npe,
                node: k % npe,
                density,
                pressure,
            }
        })?;
        for (d, h) in dx.iter().enumerate().take(sd.mesh.ndims) {
            let lambda = sd.eq.wave_speed(&s, d);
            if lambda > 0.0 {
                best = best.min(h / lambda);
            }
        }
    }
    if best.is_infinite() {
        return Err(Error::UnboundedTimestep);
    }
    Ok(cfl * best / (sd.degree() + 1) as f64)
}

/// Data handed to observers after every accepted step.
pub struct StepInfo<'a> {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub state: &'a [f64],
    pub sd: &'a Semidiscretization,
    pub stages: &'a [StageReport],
}

pub trait StepObserver {
    /// Called once before the first step with `step = 0`, `dt = 0`.
    fn on_step(&mut self, info: &StepInfo<'_>) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    /// The state became inadmissible or non-finite at `t_crash`.
    Diverged { t_crash: f64, reason: Error },
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub state: SolutionField,
    pub steps: usize,
    pub status: RunStatus,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn t_crash(&self) -> Option<f64> {
        match self.status {
            RunStatus::Diverged { t_crash, .. } => Some(t_crash),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub method: RkMethod,
    pub control: StepController,
    /// Passed to every right-hand-side evaluation.
    pub diagnostics: bool,
}

fn is_divergence(e: &Error) -> bool {
    matches!(
        e,
        Error::Divergence { .. } | Error::InadmissibleNode { .. } | Error::Inadmissible { .. }
    )
}

/// Advances `state` to `t_final`. Divergence ends the run with
/// [`RunStatus::Diverged`]; the last admissible state is returned.
pub fn integrate(
    sd: &Semidiscretization,
    mut state: SolutionField,
    opts: &IntegrateOptions,
    observers: &mut [&mut dyn StepObserver],
) -> Result<RunOutcome> {
    let ctl = opts.control;
    ctl.validate()?;
    let sys = SemidiscSystem {
        sd,
        diagnostics: opts.diagnostics,
    };
    let mut work = RkWork::default();
    let mut stages = Vec::with_capacity(5);
    let mut next = state.data.clone();
    let mut step = 0;
    let tol = 1e-12 * ctl.t_final.abs().max(1.0);
    for obs in observers.iter_mut() {
        obs.on_step(&StepInfo {
            step,
            t: state.t,
            dt: 0.0,
            state: &state.data,
            sd,
            stages: &[],
        })?;
    }
    let status = loop {
        let remaining = ctl.t_final - state.t;
        if remaining <= tol {
            break RunStatus::Completed;
        }
        if step >= ctl.max_steps {
            break RunStatus::MaxSteps;
        }
        let dt = match ctl.mode {
            StepMode::FixedDt(dt) => dt,
            StepMode::Cfl(nu) => match cfl_timestep(sd, &state.data, nu) {
                Ok(dt) => dt,
                Err(Error::UnboundedTimestep) => remaining,
                Err(e) if is_divergence(&e) => {
                    break RunStatus::Diverged {
                        t_crash: state.t,
                        reason: e,
                    }
                }
                Err(e) => return Err(e),
            },
        };
        let dt = if dt >= remaining - tol { remaining } else { dt };
        next.copy_from_slice(&state.data);
        stages.clear();
        if let Err(e) = opts.method.step(&sys, &mut next, state.t, dt, &mut work, |r| stages.push(r)) {
            if is_divergence(&e) {
                break RunStatus::Diverged {
                    t_crash: state.t,
                    reason: e,
                };
            }
            return Err(e);
        }
        if let Some(k) = next.iter().position(|v| !v.is_finite()) {
            let element = k / (sd.nodes_per_element() * sd.nvars());
            break RunStatus::Diverged {
                t_crash: state.t + dt,
                reason: Error::Divergence { element },
            };
        }
        std::mem::swap(&mut state.data, &mut next);
        state.t = if dt == remaining { ctl.t_final } else { state.t + dt };
        step += 1;
        for obs in observers.iter_mut() {
            obs.on_step(&StepInfo {
                step,
                t: state.t,
                dt,
                state: &state.data,
                sd,
                stages: &stages,
            })?;
        }
    };
    Ok(RunOutcome {
        state,
        steps: step,
        status,
    })
}

/// Entropy, positivity and scheme counts after every `every`-th step.
#[derive(Debug, Clone, Default)]
pub struct TimeSeriesRecorder {
    pub samples: Vec<TimeSample>,
    pub every: usize,
    initial: Option<f64>,
}

impl TimeSeriesRecorder {
    pub fn new(every: usize) -> Self {
        Self {
            samples: Vec::new(),
            every: every.max(1),
            initial: None,
        }
    }
}

impl StepObserver for TimeSeriesRecorder {
    fn on_step(&mut self, info: &StepInfo<'_>) -> Result<()> {
        if !info.step.is_multiple_of(self.every.max(1)) {
            return Ok(());
        }
        let entropy = total_entropy(info.sd, info.state).unwrap_or(f64::NAN);
        let initial = *self.initial.get_or_insert(entropy);
        let (min_rho, min_p) = min_density_pressure(info.sd, info.state);
        let last = info.stages.last();
        self.samples.push(TimeSample {
            step: info.step,
            t: info.t,
            total_entropy: entropy,
            delta_entropy: entropy - initial,
            min_rho,
            min_p,
            n_wf: last.map_or(0, |r| r.n_wf),
            n_fd: last.map_or(0, |r| r.n_fd),
            n_blend: last.map_or(0, |r| r.n_blend),
        });
        Ok(())
    }
}

/// Accumulates flux counts and timings; optionally keeps one row per stage.
#[derive(Debug, Clone, Default)]
pub struct StageRecorder {
    pub cost: CostSummary,
    pub samples: Vec<StageSample>,
    pub keep_samples: bool,
}

impl StageRecorder {
    pub fn new(keep_samples: bool) -> Self {
        Self {
            keep_samples,
            ..Default::default()
        }
    }
}

impl StepObserver for StageRecorder {
    fn on_step(&mut self, info: &StepInfo<'_>) -> Result<()> {
        for r in info.stages {
            if self.keep_samples {
                self.samples.push(StageSample {
                    stage: self.cost.stages,
                    t: info.t,
                    n_wf: r.n_wf,
                    n_fd: r.n_fd,
                    n_blend: r.n_blend,
                    mean_beta: r.mean_beta(),
                    entropy_rate: r.entropy_rate,
                });
            }
            self.cost.add(r);
        }
        Ok(())
    }
}

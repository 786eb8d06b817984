//! Error norms, entropy diagnostics, Jacobian spectra and flux-cost accounting.

use std::hint::black_box;
use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::equations::{Equation, FluxKind, Vars};
use crate::error::{Error, Result};
use crate::indicators::{KahanSum, SchemeChoice};
use crate::mesh::{load, SolutionField};
use crate::semidisc::{RhsOptions, Semidiscretization, StageReport};
use crate::volume::FluxCounter;

/// Largest system handled by the dense Jacobian.
pub const DENSE_LIMIT: usize = 5000;

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Domain-normalized L² error per variable.
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
    pub cells: [usize; 2],
    pub degree: usize,
    pub mode: String,
}

#[inline]
fn tensor_weight(w: &[f64], ndims: usize, node: usize) -> f64 {
    let n = w.len();
    if ndims == 1 {
        w[node]
    } else {
        w[node % n] * w[node / n]
    }
}

/// Nodal errors against `exact(x, t)`, integrated with the collocation quadrature.
pub fn l2_linf_errors(
    sd: &Semidiscretization,
    state: &SolutionField,
    exact: impl Fn([f64; 2], f64) -> Vars,
) -> ErrorReport {
    let nv = sd.nvars();
    let npe = sd.nodes_per_element();
    let w = sd.ops.weights();
    let jac = sd.mesh.jacobian();
    let mut sq = vec![KahanSum::default(); nv];
    let mut linf = vec![0.0f64; nv];
    for e in 0..sd.mesh.n_elements() {
        for j in 0..npe {
            let u = state.node(e, j);
            let ue = exact(sd.mesh.node_coords(e, j, &sd.ops), state.t);
            let wj = jac * tensor_weight(w, sd.mesh.ndims, j);
            for v in 0..nv {
                let d = (u[v] - ue[v]).abs();
                sq[v].add(wj * d * d);
                linf[v] = linf[v].max(d);
            }
        }
    }
    let vol = sd.mesh.volume();
    ErrorReport {
        l2: sq.iter().map(|s| (s.value() / vol).sqrt()).collect(),
        linf,
        cells: sd.mesh.cells,
        degree: sd.degree(),
        mode: sd.mode.name().to_string(),
    }
}

/// `Σ_i J Σ_j ω̄_j S(u_ij)`.
pub fn total_entropy(sd: &Semidiscretization, state: &[f64]) -> Result<f64> {
    let nv = sd.nvars();
    let npe = sd.nodes_per_element();
    let w = sd.ops.weights();
    let jac = sd.mesh.jacobian();
    let mut acc = KahanSum::default();
    for (k, chunk) in state.chunks_exact(nv).enumerate() {
        let u = load(chunk, 0, nv);
        sd.eq.check_admissible(&u)?;
        acc.add(jac * tensor_weight(w, sd.mesh.ndims, k % npe) * sd.eq.entropy(&u));
    }
    Ok(acc.value())
}

/// Smallest density and pressure (scalar laws: smallest value twice).
pub fn min_density_pressure(sd: &Semidiscretization, state: &[f64]) -> (f64, f64) {
    let nv = sd.nvars();
    state
        .chunks_exact(nv)
        .map(|c| sd.eq.density_pressure(&load(c, 0, nv)))
        .fold((f64::INFINITY, f64::INFINITY), |(a, b), (r, p)| (a.min(r), b.min(p)))
}

/// Mean of every variable over the domain, `|Ω|⁻¹ Σ J ω̄ u`.
pub fn domain_mean(sd: &Semidiscretization, state: &[f64]) -> Vars {
    let nv = sd.nvars();
    let npe = sd.nodes_per_element();
    let w = sd.ops.weights();
    let jac = sd.mesh.jacobian();
    let mut acc = [KahanSum::default(); 4];
    for (k, chunk) in state.chunks_exact(nv).enumerate() {
        let wk = jac * tensor_weight(w, sd.mesh.ndims, k % npe);
        for v in 0..nv {
            acc[v].add(wk * chunk[v]);
        }
    }
    let vol = sd.mesh.volume();
    let mut out = [0.0; 4];
    for v in 0..nv {
        out[v] = acc[v].value() / vol;
    }
    out
}

/// Scheme choices the indicator makes at `state`, used to linearize adaptive
/// schemes with the branch held fixed.
pub fn frozen_choices(sd: &Semidiscretization, state: &[f64], t: f64) -> Result<Vec<SchemeChoice>> {
    let mut du = vec![0.0; state.len()];
    let opts = RhsOptions {
        frozen: None,
        diagnostics: true,
    };
    Ok(sd.compute_rhs_with(state, t, &mut du, &opts)?.choices())
}

/// Central-difference Jacobian of the right-hand side with step
/// `1e-6 · max(1, |u_l|)`. Adaptive schemes are linearized with the choices
/// they make at `state`.
pub fn jacobian_fd(sd: &Semidiscretization, state: &[f64], t: f64) -> Result<DMatrix<f64>> {
    jacobian_fd_with_step(sd, state, t, 1e-6)
}

pub fn jacobian_fd_with_step(sd: &Semidiscretization, state: &[f64], t: f64, rel_step: f64) -> Result<DMatrix<f64>> {
    let dim = state.len();
    if dim > DENSE_LIMIT {
        return Err(Error::Size {
            dim,
            limit: DENSE_LIMIT,
        });
    }
    let frozen = frozen_choices(sd, state, t)?;
    let opts = RhsOptions {
        frozen: Some(&frozen),
        diagnostics: false,
    };
    let columns: Vec<Result<Vec<f64>>> = (0..dim)
        .into_par_iter()
        .map_init(
            || (state.to_vec(), vec![0.0; dim], vec![0.0; dim]),
            |(u, plus, minus), l| {
                let h = rel_step * state[l].abs().max(1.0);
                u[l] = state[l] + h;
                sd.compute_rhs_with(u, t, plus, &opts)?;
                u[l] = state[l] - h;
                sd.compute_rhs_with(u, t, minus, &opts)?;
                u[l] = state[l];
                Ok(plus.iter().zip(minus.iter()).map(|(p, m)| (p - m) / (2.0 * h)).collect())
            },
        )
        .collect();
    let mut jac = DMatrix::zeros(dim, dim);
    for (l, col) in columns.into_iter().enumerate() {
        jac.set_column(l, &nalgebra::DVector::from_vec(col?));
    }
    Ok(jac)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex<f64>>,
    /// `max Re λ`.
    pub max_real: f64,
    pub dim: usize,
    pub rel_step: f64,
}

/// All eigenvalues of a dense real matrix and their largest real part.
pub fn spectrum_max_real(matrix: &DMatrix<f64>) -> Result<SpectrumReport> {
    if !matrix.is_square() {
        return Err(Error::Eigen(format!("matrix is {}x{}", matrix.nrows(), matrix.ncols())));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let dim = matrix.nrows();
    let eigenvalues: Vec<Complex<f64>> = if dim == 0 {
        Vec::new()
    } else {
        let m = faer::Mat::<f64>::from_fn(dim, dim, |i, j| matrix[(i, j)]);
        let ev = m.eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))?;
        ev.iter().map(|c| Complex::new(c.re, c.im)).collect()
    };
    if eigenvalues.iter().any(|l| !l.re.is_finite() || !l.im.is_finite()) {
        return Err(Error::Eigen("eigensolver returned non-finite values".into()));
    }
    let max_real = eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectrumReport {
        eigenvalues,
        max_real,
        dim,
        rel_step: f64::NAN,
    })
}

/// Jacobian and spectrum of `sd` at `state`.
pub fn linear_stability(sd: &Semidiscretization, state: &[f64], t: f64) -> Result<SpectrumReport> {
    let jac = jacobian_fd(sd, state, t)?;
    let mut report = spectrum_max_real(&jac)?;
    report.rel_step = 1e-6;
    Ok(report)
}

/// `log2(e_coarse / e_fine)` between consecutive entries of a halving ladder.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostSummary {
    pub stages: usize,
    pub counters: FluxCounter,
    pub n_wf: usize,
    pub n_fd: usize,
    pub n_blend: usize,
    pub face_time: Duration,
    pub volume_time: Duration,
    pub total_time: Duration,
}

impl CostSummary {
    pub fn add(&mut self, r: &StageReport) {
        self.stages += 1;
        self.counters += r.counters;
        self.n_wf += r.n_wf;
        self.n_fd += r.n_fd;
        self.n_blend += r.n_blend;
        self.face_time += r.face_time;
        self.volume_time += r.volume_time;
        self.total_time += r.total_time;
    }

    /// Analytical per two-point flux evaluations; infinite without any
    /// two-point evaluation.
    pub fn wf_fd_ratio(&self) -> f64 {
        self.counters.analytical as f64 / self.counters.two_point as f64
    }

    /// Fraction of element updates that used the weak form.
    pub fn wf_fraction(&self) -> f64 {
        let n = self.n_wf + self.n_fd + self.n_blend;
        if n == 0 {
            0.0
        } else {
            self.n_wf as f64 / n as f64
        }
    }
}

pub fn flux_cost_report<'a>(reports: impl IntoIterator<Item = &'a StageReport>) -> CostSummary {
    let mut s = CostSummary::default();
    for r in reports {
        s.add(r);
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub flux: String,
    pub ns_per_eval: f64,
}

/// Blast-like pair `(ρ, v, p) = (1, 0, 10⁴)` / `(1, 0, 1)` with seeded relative
/// perturbations of size `1e-3`.
pub fn blast_states(eq: &Equation, count: usize, seed: u64) -> Result<Vec<(Vars, Vars)>> {
    if !eq.is_euler() {
        return Err(Error::config("flux benchmark needs an Euler equation"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jitter = |x: f64| x * (1.0 + 1e-3 * rng.gen_range(-1.0..1.0));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (pl, pr) = if eq.ndims() == 1 {
            ([jitter(1.0), 0.0, jitter(1e4), 0.0], [jitter(1.0), 0.0, jitter(1.0), 0.0])
        } else {
            ([jitter(1.0), 0.0, 0.0, jitter(1e4)], [jitter(1.0), 0.0, 0.0, jitter(1.0)])
        };
        out.push((eq.primitive_to_conserved(&pl)?, eq.primitive_to_conserved(&pr)?));
    }
    Ok(out)
}

/// Mean wall time per evaluation of the analytical flux and both EC fluxes,
/// averaged over the directions of `eq`.
pub fn bench_flux(eq: &Equation, n_evals: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if n_evals == 0 {
        return Err(Error::config("number of evaluations must be at least 1"));
    }
    const POOL: usize = 1024;
    let states = blast_states(eq, POOL, seed)?;
    let ndims = eq.ndims();
    let mut rows = Vec::new();
    let mut time = |name: &str, eval: &dyn Fn(&Vars, &Vars, usize) -> Vars| {
        let mut sink = 0.0;
        let start = Instant::now();
        for k in 0..n_evals {
            let (l, r) = &states[k % POOL];
            let dir = k % ndims;
            sink += eval(black_box(l), black_box(r), dir)[0];
        }
        black_box(sink);
        rows.push(BenchRow {
            flux: name.to_string(),
            ns_per_eval: start.elapsed().as_nanos() as f64 / n_evals as f64,
        });
    };
    time("analytical", &|l, _r, d| eq.flux(l, d));
    time("ec_chandrashekar", &|l, r, d| eq.two_point_flux(FluxKind::EcChandrashekar, l, r, d));
    time("ec_ranocha", &|l, r, d| eq.two_point_flux(FluxKind::EcRanocha, l, r, d));
    Ok(rows)
}

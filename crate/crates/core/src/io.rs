//! CSV writers. Every file starts with a `# voladapt <kind> v1` comment line.

use std::io::{self, Write};

use crate::analysis::{observed_orders, BenchRow, CostSummary, ErrorReport, SpectrumReport};
use crate::mesh::SolutionField;
use crate::semidisc::Semidiscretization;

pub const CSV_VERSION: u32 = 1;

fn header(w: &mut impl Write, kind: &str, extra: &str) -> io::Result<()> {
    if extra.is_empty() {
        writeln!(w, "# voladapt {kind} v{CSV_VERSION}")
    } else {
        writeln!(w, "# voladapt {kind} v{CSV_VERSION} {extra}")
    }
}

pub fn write_snapshot(w: &mut impl Write, sd: &Semidiscretization, state: &SolutionField) -> io::Result<()> {
    let m = &sd.mesh;
    let nv = sd.nvars();
    header(
        w,
        "snapshot",
        &format!(
            "ndims={} cells={}x{} p={} nvars={nv} t={}",
            m.ndims,
            m.cells[0],
            m.cells[1],
            sd.degree(),
            state.t
        ),
    )?;
    write!(w, "element,node,x,y")?;
    for v in 0..nv {
        write!(w, ",u{v}")?;
    }
    writeln!(w)?;
    for e in 0..m.n_elements() {
        for j in 0..sd.nodes_per_element() {
            let x = m.node_coords(e, j, &sd.ops);
            write!(w, "{e},{j},{},{}", x[0], x[1])?;
            let u = state.node(e, j);
            for val in &u[..nv] {
                write!(w, ",{val}")?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

/// One row of the per-step time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSample {
    pub step: usize,
    pub t: f64,
    pub total_entropy: f64,
    pub delta_entropy: f64,
    pub min_rho: f64,
    pub min_p: f64,
    pub n_wf: usize,
    pub n_fd: usize,
    pub n_blend: usize,
}

pub fn write_time_series(w: &mut impl Write, rows: &[TimeSample]) -> io::Result<()> {
    header(w, "timeseries", "")?;
    writeln!(w, "step,t,total_entropy,delta_entropy,min_rho,min_p,n_wf,n_fd,n_blend")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.step, r.t, r.total_entropy, r.delta_entropy, r.min_rho, r.min_p, r.n_wf, r.n_fd, r.n_blend
        )?;
    }
    Ok(())
}

/// Per-stage scheme selection summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSample {
    pub stage: usize,
    pub t: f64,
    pub n_wf: usize,
    pub n_fd: usize,
    pub n_blend: usize,
    pub mean_beta: f64,
    pub entropy_rate: f64,
}

pub fn write_stage_reports(w: &mut impl Write, rows: &[StageSample]) -> io::Result<()> {
    header(w, "stages", "")?;
    writeln!(w, "stage,t,n_wf,n_fd,n_blend,mean_beta,entropy_rate")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.stage, r.t, r.n_wf, r.n_fd, r.n_blend, r.mean_beta, r.entropy_rate
        )?;
    }
    Ok(())
}

/// Error ladder with observed orders (empty for the first grid).
pub fn write_errors(w: &mut impl Write, reports: &[ErrorReport], var: usize) -> io::Result<()> {
    header(w, "errors", &format!("variable={var}"))?;
    writeln!(w, "grid,l2,linf,order_l2,order_linf")?;
    let l2: Vec<f64> = reports.iter().map(|r| r.l2[var]).collect();
    let li: Vec<f64> = reports.iter().map(|r| r.linf[var]).collect();
    let (o2, oi) = (observed_orders(&l2), observed_orders(&li));
    for (k, r) in reports.iter().enumerate() {
        let grid = if r.cells[1] > 1 {
            format!("{}x{}", r.cells[0], r.cells[1])
        } else {
            r.cells[0].to_string()
        };
        if k == 0 {
            writeln!(w, "{grid},{},{},,", l2[k], li[k])?;
        } else {
            writeln!(w, "{grid},{},{},{},{}", l2[k], li[k], o2[k - 1], oi[k - 1])?;
        }
    }
    Ok(())
}

pub fn write_spectrum(w: &mut impl Write, report: &SpectrumReport) -> io::Result<()> {
    header(
        w,
        "spectrum",
        &format!("dim={} max_real={} rel_step={}", report.dim, report.max_real, report.rel_step),
    )?;
    writeln!(w, "re,im")?;
    for l in &report.eigenvalues {
        writeln!(w, "{},{}", l.re, l.im)?;
    }
    Ok(())
}

/// Flux counts and, unless `deterministic`, wall-clock times per phase.
pub fn write_cost_summary(w: &mut impl Write, cost: &CostSummary, deterministic: bool) -> io::Result<()> {
    header(w, "cost", "")?;
    writeln!(w, "key,value")?;
    writeln!(w, "stages,{}", cost.stages)?;
    writeln!(w, "analytical_evals,{}", cost.counters.analytical)?;
    writeln!(w, "two_point_evals,{}", cost.counters.two_point)?;
    writeln!(w, "subcell_evals,{}", cost.counters.subcell)?;
    writeln!(w, "surface_evals,{}", cost.counters.surface)?;
    writeln!(w, "element_updates_wf,{}", cost.n_wf)?;
    writeln!(w, "element_updates_fd,{}", cost.n_fd)?;
    writeln!(w, "element_updates_blend,{}", cost.n_blend)?;
    writeln!(w, "wf_fraction,{}", cost.wf_fraction())?;
    if !deterministic {
        writeln!(w, "face_seconds,{}", cost.face_time.as_secs_f64())?;
        writeln!(w, "volume_seconds,{}", cost.volume_time.as_secs_f64())?;
        writeln!(w, "rhs_seconds,{}", cost.total_time.as_secs_f64())?;
    }
    Ok(())
}

pub fn write_bench(w: &mut impl Write, eq: &str, rows: &[BenchRow]) -> io::Result<()> {
    header(w, "bench_flux", &format!("equation={eq}"))?;
    writeln!(w, "flux,ns_per_eval,ratio_to_analytical")?;
    let base = rows.iter().find(|r| r.flux == "analytical").map(|r| r.ns_per_eval);
    for r in rows {
        let ratio = base.map(|b| r.ns_per_eval / b).unwrap_or(f64::NAN);
        writeln!(w, "{},{},{}", r.flux, r.ns_per_eval, ratio)?;
    }
    Ok(())
}

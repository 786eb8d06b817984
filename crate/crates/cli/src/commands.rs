use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use voladapt::analysis::{bench_flux as time_fluxes, l2_linf_errors, linear_stability, min_density_pressure, total_entropy};
use voladapt::io::{
    write_bench, write_cost_summary, write_errors, write_snapshot, write_spectrum, write_stage_reports,
    write_time_series,
};
use voladapt::time::{StageRecorder, StepInfo, StepObserver, TimeSeriesRecorder};
use voladapt::{
    integrate, testcase, Equation, IntegrateOptions, RunOutcome, RunStatus, StepController, VolumeMode, TESTCASE_IDS,
};

use crate::config::{ConfigFile, Setup};
use crate::error::CliError;

pub fn prepare(cfg: &ConfigFile) -> Result<Setup, CliError> {
    Setup::resolve(cfg)
}

fn write_csv(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)?;
    w.flush()?;
    Ok(())
}

fn options(s: &Setup, diagnostics: bool) -> IntegrateOptions {
    IntegrateOptions {
        method: s.case.method,
        control: StepController {
            mode: s.case.step,
            t_final: s.case.t_final,
            max_steps: s.max_steps,
        },
        diagnostics,
    }
}

fn status_error(out: &RunOutcome) -> Result<(), CliError> {
    match &out.status {
        RunStatus::Completed => Ok(()),
        RunStatus::Diverged { t_crash, reason } => Err(CliError::Diverged {
            t_crash: *t_crash,
            reason: reason.to_string(),
        }),
        RunStatus::MaxSteps => Err(CliError::Other(format!(
            "step limit reached after {} steps at t = {}",
            out.steps, out.state.t
        ))),
    }
}

pub fn list() {
    println!("{:<22} {:<10} {:>2} {:>9} {:<18} {:>6}  description", "id", "equation", "p", "cells", "mode", "t_f");
    for id in TESTCASE_IDS {
        let tc = testcase(id).expect("registered testcase");
        let cells = if tc.eq.ndims() == 1 {
            tc.cells[0].to_string()
        } else {
            format!("{}x{}", tc.cells[0], tc.cells[1])
        };
        println!(
            "{:<22} {:<10} {:>2} {:>9} {:<18} {:>6}  {}",
            tc.id,
            tc.eq.id(),
            tc.degree,
            cells,
            tc.mode.name(),
            tc.t_final,
            tc.description
        );
    }
}

/// Writes `snapshot_<step>.csv` every `every` steps.
struct SnapshotWriter<'a> {
    dir: &'a Path,
    every: usize,
    error: Option<io::Error>,
}

impl StepObserver for SnapshotWriter<'_> {
    fn on_step(&mut self, info: &StepInfo<'_>) -> voladapt::Result<()> {
        if self.every == 0 || info.step == 0 || !info.step.is_multiple_of(self.every) || self.error.is_some() {
            return Ok(());
        }
        let mut field = voladapt::SolutionField::zeros(
            info.sd.mesh.n_elements(),
            info.sd.nodes_per_element(),
            info.sd.nvars(),
        );
        field.data.copy_from_slice(info.state);
        field.t = info.t;
        let path = self.dir.join(format!("snapshot_{:07}.csv", info.step));
        let res = File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            write_snapshot(&mut w, info.sd, &field)?;
            w.flush()
        });
        self.error = res.err();
        Ok(())
    }
}

pub fn run(s: &Setup, deterministic: bool) -> Result<(), CliError> {
    let case = &s.case;
    let sd = case.semidiscretization()?;
    let u0 = case.initial_state(&sd);
    let dir = &s.output_dir;
    fs::create_dir_all(dir)?;
    write_csv(&dir.join("initial.csv"), |w| write_snapshot(w, &sd, &u0))?;
    let s0 = total_entropy(&sd, &u0.data)?;

    let mut series = TimeSeriesRecorder::new(s.every);
    let mut stages = StageRecorder::new(s.keep_stages);
    let mut snaps = SnapshotWriter {
        dir,
        every: s.snapshot_every,
        error: None,
    };
    let start = Instant::now();
    let out = integrate(&sd, u0, &options(s, true), &mut [&mut series, &mut stages, &mut snaps])?;
    let wall = start.elapsed();
    if let Some(e) = snaps.error {
        return Err(e.into());
    }

    write_csv(&dir.join("final.csv"), |w| write_snapshot(w, &sd, &out.state))?;
    write_csv(&dir.join("timeseries.csv"), |w| write_time_series(w, &series.samples))?;
    if s.keep_stages {
        write_csv(&dir.join("stages.csv"), |w| write_stage_reports(w, &stages.samples))?;
    }
    write_csv(&dir.join("cost.csv"), |w| write_cost_summary(w, &stages.cost, deterministic))?;

    let s1 = total_entropy(&sd, &out.state.data).unwrap_or(f64::NAN);
    let (min_rho, min_p) = min_density_pressure(&sd, &out.state.data);
    let status = match &out.status {
        RunStatus::Completed => "completed".to_string(),
        RunStatus::Diverged { .. } => "diverged".to_string(),
        RunStatus::MaxSteps => "max_steps".to_string(),
    };
    write_csv(&dir.join("report.txt"), |w| {
        writeln!(w, "# voladapt report v{}", voladapt::io::CSV_VERSION)?;
        writeln!(w, "testcase = {}", case.id)?;
        writeln!(w, "volume_mode = {}", case.mode.name())?;
        writeln!(w, "degree = {}", case.degree)?;
        writeln!(w, "cells = {}x{}", case.cells[0], case.cells[1])?;
        writeln!(w, "seed = {}", s.seed)?;
        writeln!(w, "status = {status}")?;
        writeln!(w, "steps = {}", out.steps)?;
        writeln!(w, "t_end = {}", out.state.t)?;
        if let RunStatus::Diverged { t_crash, reason } = &out.status {
            writeln!(w, "t_crash = {t_crash}")?;
            writeln!(w, "reason = {reason}")?;
        }
        writeln!(w, "entropy_initial = {s0}")?;
        writeln!(w, "entropy_final = {s1}")?;
        writeln!(w, "entropy_change = {}", s1 - s0)?;
        writeln!(w, "min_density = {min_rho}")?;
        writeln!(w, "min_pressure = {min_p}")?;
        writeln!(w, "wf_fraction = {}", stages.cost.wf_fraction())?;
        if !deterministic {
            writeln!(w, "wall_seconds = {}", wall.as_secs_f64())?;
        }
        Ok(())
    })?;
    println!(
        "{} [{}] {status} at t = {} after {} steps; entropy change {:.6e}; min density {min_rho:.6e}, min pressure {min_p:.6e}",
        case.id,
        case.mode.name(),
        out.state.t,
        out.steps,
        s1 - s0
    );
    println!("outputs in {}", dir.display());
    status_error(&out)
}

pub fn convergence(s: &Setup) -> Result<(), CliError> {
    let exact = s
        .case
        .exact
        .clone()
        .ok_or_else(|| CliError::Config(format!("testcase {} has no exact solution", s.case.id)))?;
    fs::create_dir_all(&s.output_dir)?;
    let mut failure = None;
    for &mode in &s.modes {
        let mut reports = Vec::new();
        for &n in &s.grids {
            let mut sub = s.clone();
            sub.case = s.case.clone().with_cells(n).with_mode(mode);
            let sd = sub.case.semidiscretization()?;
            let u0 = sub.case.initial_state(&sd);
            let out = integrate(&sd, u0, &options(&sub, false), &mut [])?;
            if let Err(e) = status_error(&out) {
                eprintln!("{} on {n} cells: {e}", mode.name());
                failure.get_or_insert(e);
                break;
            }
            reports.push(l2_linf_errors(&sd, &out.state, |x, t| exact(x, t)));
        }
        let path = s.output_dir.join(format!("errors_{}.csv", mode.name()));
        write_csv(&path, |w| write_errors(w, &reports, s.variable))?;
        print_ladder(mode, &reports, s.variable);
    }
    failure.map_or(Ok(()), Err)
}

fn print_ladder(mode: VolumeMode, reports: &[voladapt::analysis::ErrorReport], var: usize) {
    println!("{}", mode.name());
    println!("{:>9} {:>13} {:>13} {:>7} {:>7}", "cells", "L2", "Linf", "EOC L2", "EOC Li");
    for (k, r) in reports.iter().enumerate() {
        let (o2, oi) = if k == 0 {
            (String::new(), String::new())
        } else {
            let p = &reports[k - 1];
            (
                format!("{:.2}", (p.l2[var] / r.l2[var]).log2()),
                format!("{:.2}", (p.linf[var] / r.linf[var]).log2()),
            )
        };
        println!("{:>9} {:>13.6e} {:>13.6e} {o2:>7} {oi:>7}", r.cells[0], r.l2[var], r.linf[var]);
    }
}

pub fn spectrum(s: &Setup) -> Result<(), CliError> {
    fs::create_dir_all(&s.output_dir)?;
    let mut summary = Vec::new();
    for &mode in &s.modes {
        let case = s.case.clone().with_mode(mode);
        let sd = case.semidiscretization()?;
        let u0 = case.initial_state(&sd);
        let report = linear_stability(&sd, &u0.data, u0.t)?;
        let path = s.output_dir.join(format!("spectrum_{}.csv", mode.name()));
        write_csv(&path, |w| write_spectrum(w, &report))?;
        println!("{:<20} max Re(lambda) = {:.6}", mode.name(), report.max_real);
        summary.push((mode, report.max_real, report.dim));
    }
    write_csv(&s.output_dir.join("spectrum_summary.csv"), |w| {
        writeln!(w, "# voladapt spectrum_summary v{}", voladapt::io::CSV_VERSION)?;
        writeln!(w, "mode,dim,max_real")?;
        for (m, r, d) in &summary {
            writeln!(w, "{},{d},{r}", m.name())?;
        }
        Ok(())
    })
}

pub fn bench_flux(equation: &str, gamma: f64, n_evals: usize, seed: u64, dir: &PathBuf) -> Result<(), CliError> {
    let eq = match equation {
        "euler1d" => Equation::Euler1d { gamma },
        "euler2d" => Equation::Euler2d { gamma },
        other => {
            return Err(CliError::Config(format!(
                "field 'equation': expected euler1d or euler2d, got '{other}'"
            )))
        }
    };
    eq.validate()?;
    let rows = time_fluxes(&eq, n_evals, seed)?;
    fs::create_dir_all(dir)?;
    write_csv(&dir.join("bench_flux.csv"), |w| write_bench(w, eq.id(), &rows))?;
    let base = rows[0].ns_per_eval;
    for r in &rows {
        println!("{:<18} {:>9.2} ns/eval  {:>5.2}x", r.flux, r.ns_per_eval, r.ns_per_eval / base);
    }
    Ok(())
}

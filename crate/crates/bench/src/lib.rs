//! Fixtures shared by the benchmarks.

use voladapt::analysis::blast_states;
use voladapt::{testcase, Equation, SolutionField, Semidiscretization, Vars, VolumeMode};

/// Seeded blast-like state pairs for `eq`.
pub fn state_pairs(eq: &Equation, count: usize) -> Vec<(Vars, Vars)> {
    blast_states(eq, count, 7).expect("Euler equation")
}

/// The 2D density wave with `cells`² elements of degree `p` under `mode`, and
/// its projected initial state.
pub fn density_wave_2d(p: usize, cells: usize, mode: VolumeMode) -> (Semidiscretization, SolutionField) {
    let mut tc = testcase("density_wave_2d").expect("registered").with_cells(cells).with_mode(mode);
    tc.degree = p;
    let sd = tc.semidiscretization().expect("valid setup");
    let u = tc.initial_state(&sd);
    (sd, u)
}

//! Registry of initial conditions, exact solutions and default setups.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::equations::{Equation, FluxKind, Vars};
use crate::error::{Error, Result};
use crate::indicators::{IndicatorVariable, ShockIndicatorConfig, SmoothScheme};
use crate::mesh::{Mesh, SolutionField};
use crate::semidisc::{BoundaryCondition, Semidiscretization, StateFn, VolumeMode};
use crate::time::{RkMethod, StepMode};

pub type InitialFn = Arc<dyn Fn([f64; 2]) -> Vars + Send + Sync>;

/// Isentropic vortex: strength, radius, Mach number, advection velocity.
pub const VORTEX_STRENGTH: f64 = 13.5;
pub const VORTEX_RADIUS: f64 = 1.5;
pub const VORTEX_MACH: f64 = 0.4;
pub const VORTEX_VELOCITY: [f64; 2] = [1.0, 1.0];

#[derive(Clone)]
pub struct TestCase {
    pub id: &'static str,
    pub description: &'static str,
    pub eq: Equation,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub periodic: bool,
    pub degree: usize,
    pub cells: [usize; 2],
    pub surface_flux: FluxKind,
    pub volume_flux: FluxKind,
    pub mode: VolumeMode,
    pub t_final: f64,
    pub step: StepMode,
    pub method: RkMethod,
    pub initial: InitialFn,
    /// Exact solution `u(x, t)` if known.
    pub exact: Option<StateFn>,
    /// Exterior state on non-periodic boundaries.
    pub boundary_state: Option<StateFn>,
}

impl fmt::Debug for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestCase")
            .field("id", &self.id)
            .field("eq", &self.eq)
            .field("degree", &self.degree)
            .field("cells", &self.cells)
            .field("surface_flux", &self.surface_flux)
            .field("volume_flux", &self.volume_flux)
            .field("mode", &self.mode)
            .field("t_final", &self.t_final)
            .field("step", &self.step)
            .field("method", &self.method)
            .finish_non_exhaustive()
    }
}

pub const TESTCASE_IDS: [&str; 7] = [
    "density_wave_1d",
    "density_wave_2d",
    "burgers_sine",
    "sod_modified",
    "kpp",
    "isentropic_vortex_2d",
    "khi_2d",
];

impl TestCase {
    pub fn mesh(&self) -> Result<Mesh> {
        let nd = self.eq.ndims();
        Mesh::new(nd, self.cells, self.lower, self.upper, [self.periodic; 2])
    }

    pub fn semidiscretization(&self) -> Result<Semidiscretization> {
        let boundary = match (&self.boundary_state, self.periodic) {
            (_, true) => BoundaryCondition::Periodic,
            (Some(f), false) => BoundaryCondition::Dirichlet(f.clone()),
            (None, false) => {
                return Err(Error::config(format!("{} has no boundary state", self.id)));
            }
        };
        Semidiscretization::new(
            self.eq,
            self.mesh()?,
            self.degree,
            self.surface_flux,
            self.volume_flux,
            self.mode,
            boundary,
        )
    }

    pub fn initial_state(&self, sd: &Semidiscretization) -> SolutionField {
        sd.project(|x| (self.initial)(x))
    }

    /// Setup with `n` elements per direction.
    pub fn with_cells(mut self, n: usize) -> Self {
        self.cells = if self.eq.ndims() == 1 { [n, 1] } else { [n, n] };
        self
    }

    pub fn with_mode(mut self, mode: VolumeMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Wraps `x` into `[lo, hi)`.
fn wrap(x: f64, lo: f64, hi: f64) -> f64 {
    let len = hi - lo;
    lo + (x - lo).rem_euclid(len)
}

pub fn testcase(id: &str) -> Result<TestCase> {
    match id {
        "density_wave_1d" => Ok(density_wave_1d()),
        "density_wave_2d" => Ok(density_wave_2d()),
        "burgers_sine" => Ok(burgers_sine()),
        "sod_modified" => Ok(sod_modified()),
        "kpp" => Ok(kpp()),
        "isentropic_vortex_2d" => Ok(isentropic_vortex_2d()),
        "khi_2d" => Ok(khi_2d()),
        other => Err(Error::config(format!(
            "unknown testcase '{other}' (known: {})",
            TESTCASE_IDS.join(", ")
        ))),
    }
}

pub fn density_wave_1d() -> TestCase {
    let eq = Equation::Euler1d { gamma: 1.4 };
    let exact: StateFn = Arc::new(move |x, t| {
        let xs = x[0] - 0.1 * t;
        let rho = 1.0 + 0.98 * (2.0 * PI * xs).sin();
        let v = 0.1;
        [rho, rho * v, 20.0 / 0.4 + 0.5 * rho * v * v, 0.0]
    });
    let e0 = exact.clone();
    TestCase {
        id: "density_wave_1d",
        description: "1D Euler density wave, rho = 1 + 0.98 sin(2 pi x), v = 0.1, p = 20",
        eq,
        lower: [-1.0, 0.0],
        upper: [1.0, 1.0],
        periodic: true,
        degree: 3,
        cells: [32, 1],
        surface_flux: FluxKind::EcRanocha,
        volume_flux: FluxKind::EcRanocha,
        mode: VolumeMode::rigorous(),
        t_final: 2.0,
        step: StepMode::Cfl(0.5),
        method: RkMethod::Lsrk54,
        initial: Arc::new(move |x| e0(x, 0.0)),
        exact: Some(exact),
        boundary_state: None,
    }
}

pub fn density_wave_2d() -> TestCase {
    let eq = Equation::Euler2d { gamma: 1.4 };
    let exact: StateFn = Arc::new(move |x, t| {
        let (vx, vy) = (0.1, 0.2);
        let rho = 1.0 + 0.98 * (2.0 * PI * (x[0] - vx * t + x[1] - vy * t)).sin();
        [rho, rho * vx, rho * vy, 20.0 / 0.4 + 0.5 * rho * (vx * vx + vy * vy)]
    });
    let e0 = exact.clone();
    TestCase {
        id: "density_wave_2d",
        description: "2D Euler density wave, rho = 1 + 0.98 sin(2 pi (x + y)), v = (0.1, 0.2), p = 20",
        eq,
        lower: [-1.0, -1.0],
        upper: [1.0, 1.0],
        periodic: true,
        degree: 5,
        cells: [4, 4],
        surface_flux: FluxKind::Rusanov,
        volume_flux: FluxKind::EcChandrashekar,
        mode: VolumeMode::rigorous(),
        t_final: 5.0,
        step: StepMode::Cfl(0.9),
        method: RkMethod::Lsrk54,
        initial: Arc::new(move |x| e0(x, 0.0)),
        exact: Some(exact),
        boundary_state: None,
    }
}

pub fn burgers_sine() -> TestCase {
    TestCase {
        id: "burgers_sine",
        description: "Burgers, u0 = sin(2 pi x) + 0.5 on [0, 1]; shock at t = 1/(2 pi)",
        eq: Equation::Burgers1d,
        lower: [0.0, 0.0],
        upper: [1.0, 1.0],
        periodic: true,
        degree: 3,
        cells: [64, 1],
        surface_flux: FluxKind::GodunovBurgers,
        volume_flux: FluxKind::EcBurgers,
        mode: VolumeMode::rigorous(),
        t_final: 0.25,
        step: StepMode::Cfl(0.5),
        method: RkMethod::Ssprk54,
        initial: Arc::new(|x| [(2.0 * PI * x[0]).sin() + 0.5, 0.0, 0.0, 0.0]),
        exact: None,
        boundary_state: None,
    }
}

pub const SOD_LEFT: [f64; 3] = [1.0, 0.75, 1.0];
pub const SOD_RIGHT: [f64; 3] = [0.125, 0.0, 0.1];
pub const SOD_JUMP: f64 = 0.3;

pub fn sod_modified() -> TestCase {
    let eq = Equation::Euler1d { gamma: 1.4 };
    let state: StateFn = Arc::new(move |x, _| {
        let p = if x[0] < SOD_JUMP { SOD_LEFT } else { SOD_RIGHT };
        eq.primitive_to_conserved(&[p[0], p[1], p[2], 0.0]).expect("admissible Sod states")
    });
    let s0 = state.clone();
    TestCase {
        id: "sod_modified",
        description: "modified Sod shock tube, (rho, v, p) = (1, 0.75, 1) | (0.125, 0, 0.1) at x = 0.3",
        eq,
        lower: [0.0, 0.0],
        upper: [1.0, 1.0],
        periodic: false,
        degree: 3,
        cells: [64, 1],
        surface_flux: FluxKind::Hllc,
        volume_flux: FluxKind::EcRanocha,
        mode: VolumeMode::rigorous(),
        t_final: 0.2,
        step: StepMode::Cfl(0.5),
        method: RkMethod::Ssprk54,
        initial: Arc::new(move |x| s0(x, 0.0)),
        exact: None,
        boundary_state: Some(state),
    }
}

/// Shock-capturing parameters used for the KPP problem.
pub fn kpp_indicator() -> ShockIndicatorConfig {
    ShockIndicatorConfig {
        variable: IndicatorVariable::Density,
        beta_min: 1e-3,
        beta_max: 0.5,
        smooth: SmoothScheme::WeakForm,
    }
}

pub fn kpp() -> TestCase {
    TestCase {
        id: "kpp",
        description: "KPP rotating wave, u0 = 3.5 pi inside the unit circle, 0.25 pi outside",
        eq: Equation::Kpp2d,
        lower: [-2.0, -2.0],
        upper: [2.0, 2.0],
        periodic: true,
        degree: 4,
        cells: [128, 128],
        surface_flux: FluxKind::Rusanov,
        volume_flux: FluxKind::EcKpp,
        mode: VolumeMode::shock_capturing(kpp_indicator()),
        t_final: 1.0,
        step: StepMode::FixedDt(1e-3),
        method: RkMethod::Ssprk54,
        initial: Arc::new(|x| {
            let u = if x[0] * x[0] + x[1] * x[1] < 1.0 { 3.5 * PI } else { 0.25 * PI };
            [u, 0.0, 0.0, 0.0]
        }),
        exact: None,
        boundary_state: None,
    }
}

/// Vortex centred at the origin on the periodic square `[-10, 10]²`.
pub fn vortex_state(eq: &Equation, x: [f64; 2]) -> Vars {
    let gamma = eq.gamma().unwrap_or(1.4);
    let (s, r, m) = (VORTEX_STRENGTH, VORTEX_RADIUS, VORTEX_MACH);
    let r2 = x[0] * x[0] + x[1] * x[1];
    let f = (1.0 - r2) / (2.0 * r * r);
    let ef = f.exp();
    let rho = (1.0 - s * s * m * m * (gamma - 1.0) * ef * ef / (8.0 * PI * PI)).powf(1.0 / (gamma - 1.0));
    let amp = s * ef / (2.0 * PI * r);
    let vx = VORTEX_VELOCITY[0] - amp * x[1];
    let vy = VORTEX_VELOCITY[1] + amp * x[0];
    let p = rho.powf(gamma) / (gamma * m * m);
    [rho, rho * vx, rho * vy, p / (gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy)]
}

pub fn isentropic_vortex_2d() -> TestCase {
    let eq = Equation::Euler2d { gamma: 1.4 };
    let exact: StateFn = Arc::new(move |x, t| {
        let y = [
            wrap(x[0] - VORTEX_VELOCITY[0] * t, -10.0, 10.0),
            wrap(x[1] - VORTEX_VELOCITY[1] * t, -10.0, 10.0),
        ];
        vortex_state(&eq, y)
    });
    TestCase {
        id: "isentropic_vortex_2d",
        description: "isentropic vortex, one pass through [-10, 10]^2",
        eq,
        lower: [-10.0, -10.0],
        upper: [10.0, 10.0],
        periodic: true,
        degree: 3,
        cells: [16, 16],
        surface_flux: FluxKind::Hllc,
        volume_flux: FluxKind::EcRanocha,
        mode: VolumeMode::rigorous(),
        t_final: 20.0,
        step: StepMode::Cfl(0.5),
        method: RkMethod::Lsrk54,
        initial: Arc::new(move |x| vortex_state(&eq, x)),
        exact: Some(exact),
        boundary_state: None,
    }
}

pub fn khi_2d() -> TestCase {
    let eq = Equation::Euler2d { gamma: 1.4 };
    TestCase {
        id: "khi_2d",
        description: "Kelvin-Helmholtz instability, b = tanh(15y + 7.5) - tanh(15y - 7.5)",
        eq,
        lower: [-1.0, -1.0],
        upper: [1.0, 1.0],
        periodic: true,
        degree: 3,
        cells: [32, 32],
        surface_flux: FluxKind::Hllc,
        volume_flux: FluxKind::EcRanocha,
        mode: VolumeMode::rigorous(),
        t_final: 6.0,
        step: StepMode::Cfl(0.5),
        method: RkMethod::Lsrk54,
        initial: Arc::new(move |x| {
            let b = (15.0 * x[1] + 7.5).tanh() - (15.0 * x[1] - 7.5).tanh();
            let rho = 0.5 + 0.75 * b;
            let vx = 0.5 * (b - 1.0);
            let vy = 0.1 * (2.0 * PI * x[0]).sin();
            eq.primitive_to_conserved(&[rho, vx, vy, 1.0]).expect("admissible KHI state")
        }),
        exact: None,
        boundary_state: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_complete() {
        for id in TESTCASE_IDS {
            let tc = testcase(id).unwrap();
            assert_eq!(tc.id, id);
            let sd = tc.clone().with_cells(4).semidiscretization().unwrap();
            let u = tc.initial_state(&sd);
            assert!(u.is_finite());
        }
        assert!(testcase("rayleigh_taylor").is_err());
    }

    #[test]
    fn initial_values() {
        let b = burgers_sine();
        assert!(((b.initial)([0.0, 0.0])[0] - 0.5).abs() < 1e-15);
        let k = kpp();
        assert_eq!((k.initial)([0.0, 0.0])[0], 3.5 * PI);
        assert_eq!((k.initial)([1.5, 0.0])[0], 0.25 * PI);
        let s = sod_modified();
        let prim = s.eq.conserved_to_primitive(&(s.initial)([0.1, 0.0])).unwrap();
        assert!((prim[0] - 1.0).abs() < 1e-15 && (prim[1] - 0.75).abs() < 1e-15 && (prim[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_matches_initial() {
        for tc in [density_wave_1d(), density_wave_2d(), isentropic_vortex_2d()] {
            let ex = tc.exact.clone().unwrap();
            for &x in &[[0.1, -0.3], [-0.77, 0.5], [3.0, -2.0]] {
                let a = (tc.initial)(x);
                let b = ex(x, 0.0);
                for v in 0..4 {
                    assert!((a[v] - b[v]).abs() <= 1e-14 * (1.0 + a[v].abs()), "{}", tc.id);
                }
            }
        }
    }

    #[test]
    fn vortex_is_periodic_in_time() {
        let tc = isentropic_vortex_2d();
        let ex = tc.exact.unwrap();
        let x = [0.4, -1.3];
        let (a, b) = (ex(x, 0.0), ex(x, 20.0));
        for v in 0..4 {
            assert!((a[v] - b[v]).abs() < 1e-12);
        }
    }

    #[test]
    fn vortex_radial_balance() {
        // dp/dr = ρ v_θ² / r along the x axis
        let eq = Equation::Euler2d { gamma: 1.4 };
        let prim = |r: f64| eq.conserved_to_primitive(&vortex_state(&eq, [r, 0.0])).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let h = 1e-5;
            let dpdr = (prim(r + h)[3] - prim(r - h)[3]) / (2.0 * h);
            let q = prim(r);
            let vt = q[2] - VORTEX_VELOCITY[1];
            assert!((dpdr - q[0] * vt * vt / r).abs() < 1e-7, "r = {r}");
        }
    }
}

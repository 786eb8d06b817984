pub mod analysis;
pub mod equations;
pub mod error;
pub mod indicators;
pub mod io;
pub mod mesh;
pub mod operators;
pub mod semidisc;
pub mod testcases;
pub mod time;
pub mod volume;

pub use equations::{Equation, FluxKind, Vars, MAX_VARS};
pub use error::{Error, Result};
pub use indicators::{IndicatorConfig, SchemeChoice, ShockIndicatorConfig, SmoothScheme};
pub use mesh::{Mesh, SolutionField};
pub use operators::{build_operators, gauss_lobatto, OperatorSet, QuadratureRule};
pub use semidisc::{BoundaryCondition, RhsOptions, Semidiscretization, StageReport, VolumeMode};
pub use volume::{ElementView, FluxCounter, VolumeContribution};
pub use time::{integrate, cfl_timestep, IntegrateOptions, RkMethod, RunOutcome, RunStatus, StepController, StepMode};
pub use testcases::{testcase, TestCase, TESTCASE_IDS};

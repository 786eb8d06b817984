//! Per-element selection of the volume scheme.
//!
//! Two a-posteriori rules compare the entropy production of the weak-form
//! predictor against the flux-differencing value obtained from the entropy
//! potential (no flux-differencing kernel needed), and one a-priori rule
//! blends flux differencing with subcell finite volumes based on modal decay.

use std::fmt;
use std::str::FromStr;

use crate::equations::{Equation, Vars};
use crate::error::{Error, Result};
use crate::operators::OperatorSet;
use crate::volume::{lines, ElementView};

/// `log((1 - 1e-4) / 1e-4)`: the logistic map reaches `1e-4` at `ε = 0`.
pub const LOGISTIC_SHARPNESS: f64 = 9.21024036697585;

/// Activation threshold of the modal indicator for degree `p`.
pub fn modal_threshold(p: usize) -> f64 {
    0.5 * 10f64.powf(-1.8 * ((p + 1) as f64).powf(0.25))
}

/// Compensated (Kahan–Babuška) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndicatorVariable {
    Density,
    Pressure,
    DensityTimesPressure,
}

impl IndicatorVariable {
    #[inline]
    pub(crate) fn evaluate(&self, eq: &Equation, u: &Vars) -> f64 {
        match self {
            IndicatorVariable::Density => u[0],
            IndicatorVariable::Pressure => eq.density_pressure(u).1,
            IndicatorVariable::DensityTimesPressure => {
                let (rho, p) = eq.density_pressure(u);
                if eq.is_euler() {
                    rho * p
                } else {
                    rho
                }
            }
        }
    }
}

impl FromStr for IndicatorVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "density" | "rho" | "first" => Ok(IndicatorVariable::Density),
            "pressure" | "p" => Ok(IndicatorVariable::Pressure),
            "density_times_pressure" | "density_pressure" | "rho_p" => {
                Ok(IndicatorVariable::DensityTimesPressure)
            }
            other => Err(Error::config(format!("unknown indicator variable '{other}'"))),
        }
    }
}

/// Parameters of the modal shock indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShockIndicatorConfig {
    pub variable: IndicatorVariable,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Scheme of unlimited (`β = 0`) elements.
    pub smooth: SmoothScheme,
}

impl Default for ShockIndicatorConfig {
    fn default() -> Self {
        Self {
            variable: IndicatorVariable::DensityTimesPressure,
            beta_min: 1e-3,
            beta_max: 0.5,
            smooth: SmoothScheme::WeakForm,
        }
    }
}

impl ShockIndicatorConfig {
    pub fn validate(&self) -> Result<()> {
        if 0.0 <= self.beta_min && self.beta_min <= self.beta_max && self.beta_max <= 1.0 {
            Ok(())
        } else {
            Err(Error::config(format!(
                "need 0 <= beta_min <= beta_max <= 1, got [{}, {}]",
                self.beta_min, self.beta_max
            )))
        }
    }

    pub fn clip(&self, beta: f64) -> f64 {
        if beta < self.beta_min {
            0.0
        } else {
            beta.min(self.beta_max)
        }
    }
}

/// Indicator family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndicatorConfig {
    Rigorous,
    Heuristic { sigma: f64 },
    ShockCapturing(ShockIndicatorConfig),
}

impl IndicatorConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            IndicatorConfig::Rigorous => Ok(()),
            IndicatorConfig::Heuristic { sigma } if sigma.is_nan() => {
                Err(Error::config("sigma must not be NaN"))
            }
            IndicatorConfig::Heuristic { .. } => Ok(()),
            IndicatorConfig::ShockCapturing(c) => c.validate(),
        }
    }
}

/// Volume scheme applied to one element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeChoice {
    WeakForm,
    FluxDifferencing,
    Blend(f64),
}

impl fmt::Display for SchemeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeChoice::WeakForm => f.write_str("WF"),
            SchemeChoice::FluxDifferencing => f.write_str("FD"),
            SchemeChoice::Blend(b) => write!(f, "Blend({b})"),
        }
    }
}

/// A choice together with the entropy productions it was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeDecision {
    pub choice: SchemeChoice,
    pub entropy_wf: f64,
    pub entropy_fd: f64,
}

/// `J Σ_j ω̄_j w(u_j)ᵀ rate_j`: the entropy rate of a volume contribution in
/// reference space.
pub fn entropy_production(elem: &ElementView<'_>, rate: &[Vars], ops: &OperatorSet, eq: &Equation) -> f64 {
    entropy_production_raw(elem, rate, ops, eq)
}

pub(crate) fn entropy_production_raw(
    elem: &ElementView<'_>,
    rate: &[Vars],
    ops: &OperatorSet,
    eq: &Equation,
) -> f64 {
    let w = ops.weights();
    let n = w.len();
    let nv = eq.nvars();
    let mut acc = KahanSum::default();
    for (node, (u, r)) in elem.states.iter().zip(rate).enumerate() {
        let weight = if elem.ndims == 1 {
            w[node]
        } else {
            w[node % n] * w[node / n]
        };
        let ent = eq.entropy_variables(u);
        let dot: f64 = (0..nv).map(|v| ent[v] * r[v]).sum();
        acc.add(weight * dot);
    }
    acc.value() * elem.jacobian
}

/// Entropy production of the flux-differencing volume term from the
/// potential alone: per direction the difference `ψ(u_last) - ψ(u_first)`
/// along every tensor line, weighted by the transverse quadrature weight.
pub fn fd_entropy_production_via_potential(elem: &ElementView<'_>, ops: &OperatorSet, eq: &Equation) -> f64 {
    let w = ops.weights();
    let n = w.len();
    let mut acc = KahanSum::default();
    for dir in 0..elem.ndims {
        let factor = elem.jacobian * elem.metric[dir];
        for (line, (first, stride)) in lines(elem.ndims, n, dir).enumerate() {
            let transverse = if elem.ndims == 1 { 1.0 } else { w[line] };
            let last = first + (n - 1) * stride;
            let jump = eq.potential(&elem.states[last], dir) - eq.potential(&elem.states[first], dir);
            acc.add(factor * transverse * jump);
        }
    }
    acc.value()
}

/// Weak form iff it produces strictly less entropy than flux differencing.
pub fn rigorous_select(elem: &ElementView<'_>, wf_rate: &[Vars], eq: &Equation, ops: &OperatorSet) -> SchemeDecision {
    let entropy_wf = entropy_production_raw(elem, wf_rate, ops, eq);
    let entropy_fd = fd_entropy_production_via_potential(elem, ops, eq);
    let choice = if entropy_wf - entropy_fd < 0.0 {
        SchemeChoice::WeakForm
    } else {
        SchemeChoice::FluxDifferencing
    };
    SchemeDecision {
        choice,
        entropy_wf,
        entropy_fd,
    }
}

/// Weak form iff its entropy production stays strictly below `sigma`.
pub fn heuristic_select(
    elem: &ElementView<'_>,
    wf_rate: &[Vars],
    eq: &Equation,
    ops: &OperatorSet,
    sigma: f64,
) -> SchemeDecision {
    let entropy_wf = entropy_production_raw(elem, wf_rate, ops, eq);
    let choice = if entropy_wf < sigma {
        SchemeChoice::WeakForm
    } else {
        SchemeChoice::FluxDifferencing
    };
    SchemeDecision {
        choice,
        entropy_wf,
        entropy_fd: f64::NAN,
    }
}

/// Modal energies `(E_0, E_1, E_2)` of nodal data; in 2D the truncations drop
/// all tensor modes with `max(j, k) > p - n`.
pub fn modal_energies(values: &[f64], ndims: usize, ops: &OperatorSet) -> (f64, f64, f64) {
    let n = ops.nodes_1d();
    let vinv = ops.vinv_flat();
    let p = n - 1;
    let mut e = [0.0; 3];
    if ndims == 1 {
        for a in 0..n {
            let m: f64 = (0..n).map(|i| vinv[a * n + i] * values[i]).sum();
            let m2 = m * m;
            for (k, ek) in e.iter_mut().enumerate() {
                if a + k <= p {
                    *ek += m2;
                }
            }
        }
    } else {
        // transform along x, then along y
        let mut tmp = [0.0; 256];
        for j in 0..n {
            for a in 0..n {
                tmp[a + n * j] = (0..n).map(|i| vinv[a * n + i] * values[i + n * j]).sum();
            }
        }
        for b in 0..n {
            for a in 0..n {
                let m: f64 = (0..n).map(|j| vinv[b * n + j] * tmp[a + n * j]).sum();
                let m2 = m * m;
                let order = a.max(b);
                for (k, ek) in e.iter_mut().enumerate() {
                    if order + k <= p {
                        *ek += m2;
                    }
                }
            }
        }
    }
    (e[0], e[1], e[2])
}

/// Unclipped blending factor from the logistic map of the modal energy
/// fractions. An identically zero indicator field yields `0`.
pub fn blending_factor_raw(values: &[f64], ndims: usize, ops: &OperatorSet) -> f64 {
    let (e0, e1, e2) = modal_energies(values, ndims, ops);
    if e0 <= 0.0 {
        return 0.0;
    }
    let eps0 = (e0 - e1) / e0;
    let eps1 = if e1 > 0.0 { (e1 - e2) / e1 } else { 0.0 };
    let eps = eps0.max(eps1);
    let threshold = modal_threshold(ops.degree());
    1.0 / (1.0 + (-LOGISTIC_SHARPNESS * (eps - threshold) / threshold).exp())
}

/// Clipped blending factor of one element, in `[0, β_max]`.
pub fn modal_shock_indicator(
    elem: &ElementView<'_>,
    eq: &Equation,
    ops: &OperatorSet,
    config: &ShockIndicatorConfig,
) -> f64 {
    let mut values = [0.0; 256];
    for (v, u) in values.iter_mut().zip(elem.states) {
        *v = config.variable.evaluate(eq, u);
    }
    let raw = blending_factor_raw(&values[..elem.states.len()], elem.ndims, ops);
    config.clip(raw)
}

/// What an unlimited (`β = 0`) element uses under shock capturing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothScheme {
    WeakForm,
    FluxDifferencing,
}

impl FromStr for SmoothScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wf" | "weak_form" => Ok(SmoothScheme::WeakForm),
            "fd" | "flux_differencing" => Ok(SmoothScheme::FluxDifferencing),
            other => Err(Error::config(format!("unknown smooth scheme '{other}'"))),
        }
    }
}

pub fn shock_capturing_select(beta: f64, default: SmoothScheme) -> SchemeChoice {
    if beta > 0.0 {
        SchemeChoice::Blend(beta)
    } else {
        match default {
            SmoothScheme::WeakForm => SchemeChoice::WeakForm,
            SmoothScheme::FluxDifferencing => SchemeChoice::FluxDifferencing,
        }
    }
}

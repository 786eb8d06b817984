//! Conservation-law descriptors.
//!
//! States are stored in fixed-size [`Vars`] arrays; only the first
//! [`Equation::nvars`] entries are meaningful, the rest stay zero.

mod burgers;
mod euler;
mod kpp;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use euler::{ln_mean, inv_ln_mean};

pub const MAX_VARS: usize = 4;

/// A conserved (or primitive) state vector padded to [`MAX_VARS`].
pub type Vars = [f64; MAX_VARS];

pub const ZERO: Vars = [0.0; MAX_VARS];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equation {
    Burgers1d,
    Kpp2d,
    Euler1d { gamma: f64 },
    Euler2d { gamma: f64 },
}

impl Equation {
    pub const DEFAULT_GAMMA: f64 = 1.4;

    pub fn id(&self) -> &'static str {
        match self {
            Equation::Burgers1d => "burgers1d",
            Equation::Kpp2d => "kpp2d",
            Equation::Euler1d { .. } => "euler1d",
            Equation::Euler2d { .. } => "euler2d",
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Equation::Burgers1d | Equation::Kpp2d => 1,
            Equation::Euler1d { .. } => 3,
            Equation::Euler2d { .. } => 4,
        }
    }

    pub fn ndims(&self) -> usize {
        match self {
            Equation::Burgers1d | Equation::Euler1d { .. } => 1,
            Equation::Kpp2d | Equation::Euler2d { .. } => 2,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => Some(gamma),
            _ => None,
        }
    }

    pub fn is_euler(&self) -> bool {
        self.gamma().is_some()
    }

    pub fn validate(&self) -> Result<()> {
        match self.gamma() {
            Some(g) if !(g > 1.0 && g.is_finite()) => {
                Err(Error::config(format!("gamma must exceed 1, got {g}")))
            }
            _ => Ok(()),
        }
    }

    /// Euler states need positive density and pressure; scalar states need to be finite.
    pub fn check_admissible(&self, u: &Vars) -> Result<()> {
        match *self {
            Equation::Burgers1d | Equation::Kpp2d => {
                if u[0].is_finite() {
                    Ok(())
                } else {
                    Err(Error::Inadmissible {
                        density: u[0],
                        pressure: f64::NAN,
                    })
                }
            }
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                let rho = u[0];
                let p = euler::pressure(u, self.ndims(), gamma);
                if rho > 0.0 && p > 0.0 && rho.is_finite() && p.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Inadmissible {
                        density: rho,
                        pressure: p,
                    })
                }
            }
        }
    }

    fn check_dir(&self, dir: usize) -> Result<()> {
        if dir < self.ndims() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "direction {dir} invalid for {} (ndims = {})",
                self.id(),
                self.ndims()
            )))
        }
    }

    /// Physical flux `f_dir(u)`.
    pub fn physical_flux(&self, u: &Vars, dir: usize) -> Result<Vars> {
        self.check_dir(dir)?;
        self.check_admissible(u)?;
        Ok(self.flux(u, dir))
    }

    /// Upper bound on the characteristic speeds in direction `dir` over both states.
    pub fn max_wave_speed(&self, u_l: &Vars, u_r: &Vars, dir: usize) -> Result<f64> {
        self.check_dir(dir)?;
        self.check_admissible(u_l)?;
        self.check_admissible(u_r)?;
        Ok(self.wave_speed(u_l, dir).max(self.wave_speed(u_r, dir)))
    }

    pub fn entropy_quantities(&self, u: &Vars) -> Result<EntropyQuantities> {
        self.check_admissible(u)?;
        let mut flux = [0.0; 2];
        let mut potential = [0.0; 2];
        for dir in 0..self.ndims() {
            flux[dir] = self.entropy_flux(u, dir);
            potential[dir] = self.potential(u, dir);
        }
        Ok(EntropyQuantities {
            entropy: self.entropy(u),
            variables: self.entropy_variables(u),
            flux,
            potential,
        })
    }

    /// Symmetric two-point volume flux (`Central` or an entropy-conservative kind).
    pub fn ec_two_point_flux(&self, kind: FluxKind, u_l: &Vars, u_r: &Vars, dir: usize) -> Result<Vars> {
        self.check_dir(dir)?;
        self.check_volume_flux(kind)?;
        self.check_admissible(u_l)?;
        self.check_admissible(u_r)?;
        Ok(self.two_point_flux(kind, u_l, u_r, dir))
    }

    /// Interface numerical flux.
    pub fn surface_flux(&self, kind: FluxKind, u_l: &Vars, u_r: &Vars, dir: usize) -> Result<Vars> {
        self.check_dir(dir)?;
        self.check_surface_flux(kind)?;
        self.check_admissible(u_l)?;
        self.check_admissible(u_r)?;
        Ok(self.numerical_flux(kind, u_l, u_r, dir))
    }

    pub fn primitive_to_conserved(&self, prim: &Vars) -> Result<Vars> {
        match *self {
            Equation::Burgers1d | Equation::Kpp2d => Ok(*prim),
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                if !(prim[0] > 0.0) || !(prim[self.nvars() - 1] > 0.0) {
                    return Err(Error::Inadmissible {
                        density: prim[0],
                        pressure: prim[self.nvars() - 1],
                    });
                }
                Ok(euler::prim_to_cons(prim, self.ndims(), gamma))
            }
        }
    }

    pub fn conserved_to_primitive(&self, u: &Vars) -> Result<Vars> {
        self.check_admissible(u)?;
        Ok(match *self {
            Equation::Burgers1d | Equation::Kpp2d => *u,
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                euler::cons_to_prim(u, self.ndims(), gamma)
            }
        })
    }

    /// Whether `kind` may serve as a symmetric volume flux for this equation.
    pub fn check_volume_flux(&self, kind: FluxKind) -> Result<()> {
        let ok = match kind {
            FluxKind::Central => true,
            FluxKind::EcBurgers => matches!(self, Equation::Burgers1d),
            FluxKind::EcKpp => matches!(self, Equation::Kpp2d),
            FluxKind::EcRanocha | FluxKind::EcChandrashekar => self.is_euler(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "flux {kind} is not a volume flux for {}",
                self.id()
            )))
        }
    }

    /// Whether `kind` may serve as an interface flux for this equation.
    pub fn check_surface_flux(&self, kind: FluxKind) -> Result<()> {
        let ok = match kind {
            FluxKind::Central | FluxKind::Rusanov => true,
            FluxKind::GodunovBurgers | FluxKind::EcBurgers => matches!(self, Equation::Burgers1d),
            FluxKind::EcKpp => matches!(self, Equation::Kpp2d),
            FluxKind::HllDavis | FluxKind::Hllc | FluxKind::EcRanocha | FluxKind::EcChandrashekar => {
                self.is_euler()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!(
                "flux {kind} is not a surface flux for {}",
                self.id()
            )))
        }
    }

    // ---- unchecked kernels; callers guarantee admissibility ----

    #[inline]
    pub(crate) fn flux(&self, u: &Vars, dir: usize) -> Vars {
        match *self {
            Equation::Burgers1d => burgers::flux(u),
            Equation::Kpp2d => kpp::flux(u, dir),
            Equation::Euler1d { gamma } => euler::flux_1d(u, gamma),
            Equation::Euler2d { gamma } => euler::flux_2d(u, dir, gamma),
        }
    }

    #[inline]
    pub(crate) fn wave_speed(&self, u: &Vars, dir: usize) -> f64 {
        match *self {
            Equation::Burgers1d => u[0].abs(),
            Equation::Kpp2d => 1.0,
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                euler::wave_speed(u, self.ndims(), dir, gamma)
            }
        }
    }

    #[inline]
    pub(crate) fn entropy(&self, u: &Vars) -> f64 {
        match *self {
            Equation::Burgers1d | Equation::Kpp2d => 0.5 * u[0] * u[0],
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                euler::entropy(u, self.ndims(), gamma)
            }
        }
    }

    #[inline]
    pub(crate) fn entropy_variables(&self, u: &Vars) -> Vars {
        match *self {
            Equation::Burgers1d | Equation::Kpp2d => [u[0], 0.0, 0.0, 0.0],
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                euler::entropy_variables(u, self.ndims(), gamma)
            }
        }
    }

    #[inline]
    pub(crate) fn entropy_flux(&self, u: &Vars, dir: usize) -> f64 {
        match *self {
            Equation::Burgers1d => u[0].powi(3) / 3.0,
            Equation::Kpp2d => kpp::entropy_flux(u[0], dir),
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                euler::entropy_flux(u, self.ndims(), dir, gamma)
            }
        }
    }

    /// Entropy potential `ψ_dir = wᵀ f_dir - F_dir`.
    #[inline]
    pub(crate) fn potential(&self, u: &Vars, dir: usize) -> f64 {
        match self {
            Equation::Burgers1d => u[0].powi(3) / 6.0,
            Equation::Kpp2d => kpp::potential(u[0], dir),
            Equation::Euler1d { .. } | Equation::Euler2d { .. } => u[1 + dir],
        }
    }

    #[inline]
    pub(crate) fn two_point_flux(&self, kind: FluxKind, u_l: &Vars, u_r: &Vars, dir: usize) -> Vars {
        match (kind, *self) {
            (FluxKind::EcBurgers, _) => burgers::ec_flux(u_l, u_r),
            (FluxKind::EcKpp, _) => kpp::ec_flux(u_l, u_r, dir),
            (FluxKind::EcRanocha, Equation::Euler1d { gamma }) => euler::ranocha_1d(u_l, u_r, gamma),
            (FluxKind::EcRanocha, Equation::Euler2d { gamma }) => euler::ranocha_2d(u_l, u_r, dir, gamma),
            (FluxKind::EcChandrashekar, Equation::Euler1d { gamma }) => {
                euler::chandrashekar_1d(u_l, u_r, gamma)
            }
            (FluxKind::EcChandrashekar, Equation::Euler2d { gamma }) => {
                euler::chandrashekar_2d(u_l, u_r, dir, gamma)
            }
            _ => self.central(u_l, u_r, dir),
        }
    }

    #[inline]
    fn central(&self, u_l: &Vars, u_r: &Vars, dir: usize) -> Vars {
        let fl = self.flux(u_l, dir);
        let fr = self.flux(u_r, dir);
        std::array::from_fn(|v| 0.5 * (fl[v] + fr[v]))
    }

    #[inline]
    pub(crate) fn numerical_flux(&self, kind: FluxKind, u_l: &Vars, u_r: &Vars, dir: usize) -> Vars {
        match kind {
            FluxKind::Central => self.central(u_l, u_r, dir),
            FluxKind::Rusanov => {
                let fl = self.flux(u_l, dir);
                let fr = self.flux(u_r, dir);
                let lambda = self.wave_speed(u_l, dir).max(self.wave_speed(u_r, dir));
                std::array::from_fn(|v| 0.5 * (fl[v] + fr[v]) - 0.5 * lambda * (u_r[v] - u_l[v]))
            }
            FluxKind::GodunovBurgers => burgers::godunov(u_l, u_r),
            FluxKind::HllDavis => euler::hll(u_l, u_r, self.ndims(), dir, self.gamma().unwrap_or(1.4)),
            FluxKind::Hllc => euler::hllc(u_l, u_r, self.ndims(), dir, self.gamma().unwrap_or(1.4)),
            FluxKind::EcBurgers | FluxKind::EcKpp | FluxKind::EcRanocha | FluxKind::EcChandrashekar => {
                self.two_point_flux(kind, u_l, u_r, dir)
            }
        }
    }

    /// Primitive values used by the shock indicator and diagnostics: `(ρ, p)`
    /// for Euler, `(u, u)` for scalar laws.
    #[inline]
    pub(crate) fn density_pressure(&self, u: &Vars) -> (f64, f64) {
        match *self {
            Equation::Burgers1d | Equation::Kpp2d => (u[0], u[0]),
            Equation::Euler1d { gamma } | Equation::Euler2d { gamma } => {
                (u[0], euler::pressure(u, self.ndims(), gamma))
            }
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Entropy pair evaluated at one state. Per-direction arrays use only the
/// first `ndims` entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyQuantities {
    pub entropy: f64,
    pub variables: Vars,
    pub flux: [f64; 2],
    pub potential: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluxKind {
    Central,
    Rusanov,
    HllDavis,
    Hllc,
    GodunovBurgers,
    EcRanocha,
    EcChandrashekar,
    EcBurgers,
    EcKpp,
}

impl FluxKind {
    pub const ALL: [FluxKind; 9] = [
        FluxKind::Central,
        FluxKind::Rusanov,
        FluxKind::HllDavis,
        FluxKind::Hllc,
        FluxKind::GodunovBurgers,
        FluxKind::EcRanocha,
        FluxKind::EcChandrashekar,
        FluxKind::EcBurgers,
        FluxKind::EcKpp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FluxKind::Central => "central",
            FluxKind::Rusanov => "rusanov",
            FluxKind::HllDavis => "hll",
            FluxKind::Hllc => "hllc",
            FluxKind::GodunovBurgers => "godunov",
            FluxKind::EcRanocha => "ec_ranocha",
            FluxKind::EcChandrashekar => "ec_chandrashekar",
            FluxKind::EcBurgers => "ec_burgers",
            FluxKind::EcKpp => "ec_kpp",
        }
    }

    pub fn is_entropy_conservative(&self) -> bool {
        matches!(
            self,
            FluxKind::EcRanocha | FluxKind::EcChandrashekar | FluxKind::EcBurgers | FluxKind::EcKpp
        )
    }

    /// The entropy-conservative flux matching an equation.
    pub fn default_ec(eq: &Equation) -> FluxKind {
        match eq {
            Equation::Burgers1d => FluxKind::EcBurgers,
            Equation::Kpp2d => FluxKind::EcKpp,
            _ => FluxKind::EcRanocha,
        }
    }
}

impl fmt::Display for FluxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FluxKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "llf" | "lax_friedrichs" => "rusanov",
            "hll_davis" => "hll",
            "godunov_burgers" => "godunov",
            "ranocha" => "ec_ranocha",
            "chandrashekar" => "ec_chandrashekar",
            other => other,
        };
        FluxKind::ALL
            .into_iter()
            .find(|k| k.name() == alias)
            .ok_or_else(|| Error::config(format!("unknown flux kind '{s}'")))
    }
}

#[cfg(test)]
mod tests;

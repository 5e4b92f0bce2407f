//! Standing waves of the shallow-water and nozzle-flow systems.
//!
//! Across a jump of the geometry `a` the mass flux is conserved and the
//! Bernoulli function `B = v²/2 + h(ρ)` (plus `g a` for shallow water) drops
//! by the momentum loss `κ`, so that the entropy flux jump is `-m κ`.

use serde::{Deserialize, Serialize};

use super::{RiemannError, RESONANCE_DELTA};
use crate::roots::{brent, expand, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StandingModel {
    /// `p = gρ²/2`, topography `a`.
    ShallowWater { g: f64 },
    /// `p = kρ^γ`, cross-section `a`.
    Nozzle { k: f64, gamma: f64 },
}

impl StandingModel {
    fn law(&self) -> (f64, f64) {
        match *self {
            StandingModel::ShallowWater { g } => (0.5 * g, 2.0),
            StandingModel::Nozzle { k, gamma } => (k, gamma),
        }
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        let (k, g) = self.law();
        k * rho.powf(g)
    }

    pub fn sound_speed(&self, rho: f64) -> f64 {
        let (k, g) = self.law();
        (k * g * rho.powf(g - 1.0)).sqrt()
    }

    /// Specific enthalpy `e + p/ρ`.
    pub fn enthalpy(&self, rho: f64) -> f64 {
        let (k, g) = self.law();
        k * g * rho.powf(g - 1.0) / (g - 1.0)
    }

    /// Area entering the mass flux `m = A ρ v`.
    fn area(&self, a: f64) -> f64 {
        match self {
            StandingModel::ShallowWater { .. } => 1.0,
            StandingModel::Nozzle { .. } => a,
        }
    }

    fn potential(&self, a: f64) -> f64 {
        match *self {
            StandingModel::ShallowWater { g } => g * a,
            StandingModel::Nozzle { .. } => 0.0,
        }
    }

    /// Bernoulli function at density `rho` with mass flux `m` and geometry `a`.
    pub fn bernoulli(&self, m: f64, a: f64, rho: f64) -> f64 {
        let area = self.area(a);
        m * m / (2.0 * area * area * rho * rho) + self.enthalpy(rho) + self.potential(a)
    }

    /// Density at which `|v| = c` for mass flux `m` through geometry `a`.
    pub fn sonic_density(&self, m: f64, a: f64) -> f64 {
        let (k, g) = self.law();
        let q = m / self.area(a);
        (q * q / (k * g)).powf(1.0 / (g + 1.0))
    }

    fn check(&self) -> Result<(), RiemannError> {
        let ok = match *self {
            StandingModel::ShallowWater { g } => g > 0.0 && g.is_finite(),
            StandingModel::Nozzle { k, gamma } => k > 0.0 && gamma > 1.0 && k.is_finite() && gamma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(RiemannError::Invalid(format!("bad model parameters {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowBranch {
    Subsonic,
    Supersonic,
}

/// Closure for the momentum loss `κ(ρ₋, v₋, a₋)`.
pub trait MomentumLoss {
    fn kappa(&self, rho_minus: f64, v_minus: f64, a_minus: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLoss(pub f64);

impl MomentumLoss for ConstantLoss {
    fn kappa(&self, _: f64, _: f64, _: f64) -> f64 {
        self.0
    }
}

/// `κ = K v₋²/2`, a loss proportional to the dynamic head.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicHeadLoss {
    pub coefficient: f64,
}

impl MomentumLoss for DynamicHeadLoss {
    fn kappa(&self, _: f64, v_minus: f64, _: f64) -> f64 {
        0.5 * self.coefficient * v_minus * v_minus
    }
}

fn default_delta() -> f64 {
    RESONANCE_DELTA
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandingWaveProblem {
    pub model: StandingModel,
    pub rho_minus: f64,
    pub v_minus: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    #[serde(default)]
    pub kappa: f64,
    pub branch: FlowBranch,
    #[serde(default = "default_delta")]
    pub resonance_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandingWaveSolution {
    pub rho_plus: f64,
    pub v_plus: f64,
    pub mass_flux: f64,
    pub kappa: f64,
    /// Entropy flux jump prescribed by the loss, `-m κ`.
    pub dissipation: f64,
    /// Entropy flux jump recomputed from the two states, `m (B₊ - B₋)`.
    pub flux_jump: f64,
    pub sonic_density: f64,
    pub mach_minus: f64,
    pub mach_plus: f64,
}

impl StandingWaveProblem {
    pub fn solve(&self) -> Result<StandingWaveSolution, RiemannError> {
        standing_wave(self)
    }
}

/// Standing wave with the constant loss `prob.kappa`.
pub fn standing_wave(prob: &StandingWaveProblem) -> Result<StandingWaveSolution, RiemannError> {
    standing_wave_with(prob, &ConstantLoss(prob.kappa))
}

pub fn standing_wave_with(
    prob: &StandingWaveProblem,
    loss: &dyn MomentumLoss,
) -> Result<StandingWaveSolution, RiemannError> {
    let model = prob.model;
    model.check()?;
    let (rho, v, am, ap) = (prob.rho_minus, prob.v_minus, prob.a_minus, prob.a_plus);
    if !(rho > 0.0 && am > 0.0 && ap > 0.0 && v.is_finite()) {
        return Err(RiemannError::Invalid("need rho_minus, a_minus, a_plus > 0".into()));
    }
    let kappa = loss.kappa(rho, v, am);
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(RiemannError::Invalid(format!("momentum loss {kappa} must be nonnegative")));
    }
    let c = model.sound_speed(rho);
    let value = (1.0 - v * v / (c * c)).abs();
    if value < prob.resonance_delta {
        return Err(RiemannError::Resonance { side: "left", value, delta: prob.resonance_delta });
    }

    let m = model.area(am) * rho * v;
    let b_minus = model.bernoulli(m, am, rho);
    let target = b_minus - kappa;
    let sonic = model.sonic_density(m, ap);
    let data_branch = if v * v < c * c { FlowBranch::Subsonic } else { FlowBranch::Supersonic };

    let identity = ap == am && kappa == 0.0 && prob.branch == data_branch;
    let rho_plus = if identity {
        rho
    } else if m == 0.0 {
        // At rest only hydrostatic balance remains; the supersonic branch is empty.
        if prob.branch == FlowBranch::Supersonic {
            return Err(RiemannError::NoRootOnBranch("fluid at rest has no supersonic state".into()));
        }
        solve_log(|x| model.bernoulli(0.0, ap, x.exp()) - target, rho.ln())?
    } else {
        let b_sonic = model.bernoulli(m, ap, sonic);
        if !(target > b_sonic) {
            return Err(RiemannError::NoRootOnBranch(format!(
                "Bernoulli target {target:e} is below the sonic value {b_sonic:e} (choked)"
            )));
        }
        let g = |x: f64| model.bernoulli(m, ap, x.exp()) - target;
        let ls = sonic.ln();
        match prob.branch {
            FlowBranch::Subsonic => {
                let width = expand(1.0, 2.0, 80, |d| g(ls + d) > 0.0)?;
                brent(g, ls, ls + width, tol())?.x.exp()
            }
            FlowBranch::Supersonic => {
                let width = expand(1.0, 2.0, 80, |d| g(ls - d) > 0.0)?;
                brent(g, ls - width, ls, tol())?.x.exp()
            }
        }
    };
    let v_plus = if identity { v } else { m / (model.area(ap) * rho_plus) };
    let b_plus = model.bernoulli(m, ap, rho_plus);
    Ok(StandingWaveSolution {
        rho_plus,
        v_plus,
        mass_flux: m,
        kappa,
        dissipation: -m * kappa,
        flux_jump: m * (b_plus - b_minus),
        sonic_density: sonic,
        mach_minus: v.abs() / c,
        mach_plus: v_plus.abs() / model.sound_speed(rho_plus),
    })
}

fn tol() -> Tolerance {
    Tolerance { rel: 1e-16, abs: 0.0, max_iter: 300 }
}

/// Root of a function of `ln ρ` increasing in `ρ`, bracketed around `x0`.
fn solve_log(g: impl Fn(f64) -> f64, x0: f64) -> Result<f64, RiemannError> {
    let lo = expand(1.0, 2.0, 80, |d| g(x0 - d) < 0.0)?;
    let hi = expand(1.0, 2.0, 80, |d| g(x0 + d) > 0.0)?;
    Ok(brent(g, x0 - lo, x0 + hi, tol())?.x.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nozzle(branch: FlowBranch, a_plus: f64, kappa: f64) -> StandingWaveProblem {
        StandingWaveProblem {
            model: StandingModel::Nozzle { k: 0.5, gamma: 2.0 },
            rho_minus: 1.0,
            v_minus: 0.3,
            a_minus: 1.0,
            a_plus,
            kappa,
            branch,
            resonance_delta: RESONANCE_DELTA,
        }
    }

    #[test]
    fn nozzle_subsonic_golden() {
        let s = standing_wave(&nozzle(FlowBranch::Subsonic, 1.2, 0.0)).unwrap();
        assert_relative_eq!(s.rho_plus, 1.014_645_628_541_759_3, max_relative = 1e-12);
        assert_relative_eq!(s.v_plus, 0.246_391_442_457_893_43, max_relative = 1e-12);
        assert_relative_eq!(s.sonic_density, 0.396_850_262_992_049_87, max_relative = 1e-14);
        assert!(s.flux_jump.abs() < 1e-11);
        assert_relative_eq!(1.2 * s.rho_plus * s.v_plus, s.mass_flux, max_relative = 1e-15);
    }

    #[test]
    fn nozzle_supersonic_golden() {
        let s = standing_wave(&nozzle(FlowBranch::Supersonic, 1.2, 0.0)).unwrap();
        assert_relative_eq!(s.rho_plus, 0.191_328_476_595_502_86, max_relative = 1e-12);
        assert!(s.mach_plus > 1.0);
    }

    #[test]
    fn equal_geometry_is_identity() {
        let s = standing_wave(&nozzle(FlowBranch::Subsonic, 1.0, 0.0)).unwrap();
        assert_eq!((s.rho_plus, s.v_plus), (1.0, 0.3));
    }

    #[test]
    fn loss_dissipation_is_exact() {
        let s = standing_wave(&nozzle(FlowBranch::Subsonic, 1.2, 0.01)).unwrap();
        assert_eq!(s.dissipation, -0.3 * 0.01);
        assert_relative_eq!(s.flux_jump, s.dissipation, max_relative = 1e-10);
        let lossy =
            standing_wave_with(&nozzle(FlowBranch::Subsonic, 1.2, 0.0), &DynamicHeadLoss { coefficient: 0.5 }).unwrap();
        assert_eq!(lossy.kappa, 0.5 * 0.5 * 0.09);
    }

    #[test]
    fn zero_scaled_loss_is_bitwise_lossless() {
        let a = standing_wave(&nozzle(FlowBranch::Subsonic, 1.2, 0.0)).unwrap();
        let b =
            standing_wave_with(&nozzle(FlowBranch::Subsonic, 1.2, 0.0), &DynamicHeadLoss { coefficient: 0.0 * 3.0 })
                .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shallow_water_step() {
        let p = StandingWaveProblem {
            model: StandingModel::ShallowWater { g: 9.81 },
            rho_minus: 1.0,
            v_minus: 0.5,
            a_minus: 1.0,
            a_plus: 1.1,
            kappa: 0.0,
            branch: FlowBranch::Subsonic,
            resonance_delta: RESONANCE_DELTA,
        };
        let s = standing_wave(&p).unwrap();
        assert!(s.rho_plus < 1.0);
        assert_relative_eq!(s.rho_plus * s.v_plus, 0.5, max_relative = 1e-15);
        assert!(s.flux_jump.abs() < 1e-11);
    }

    #[test]
    fn guards() {
        let c = 1.0; // sound speed at ρ = 1 for p = ρ²/2
        let mut p = nozzle(FlowBranch::Subsonic, 1.2, 0.0);
        p.v_minus = c * (1.0 - 1e-8);
        assert_eq!(standing_wave(&p).unwrap_err().code(), "resonance_guard");
        let choked = nozzle(FlowBranch::Subsonic, 0.3, 0.0);
        assert_eq!(standing_wave(&choked).unwrap_err().code(), "no_root_on_branch");
    }
}

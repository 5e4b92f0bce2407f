//! Viscous shock profiles of the multi-pressure Navier–Stokes system.
//!
//! In the frame of the wave, with constant mass flux `m`, a profile solves
//!
//! ```text
//! τ' = F / μ,    s_i' = μ_i F² / (μ² T_i)
//! ```
//!
//! where `μ = Σ μ_i`. The orbit leaves `ω_L` toward smaller `τ` and settles at
//! the critical point `ω_R`. `H` is a first integral, so the orbit lives on
//! `{H = 0}`; its drift is the main accuracy diagnostic.
//!
//! The state is integrated as offsets `(τ - τ_L, s - s_L)`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::endstate::{EndStateContext, EndStateError};
use crate::eos::{EosError, EosSpec, ThermoState, ViscosityMode, ViscositySpec};
use crate::ode::{integrate, Control, DenseStep, Outcome, StepOptions};

/// Relative `H` drift beyond which the orbit is declared broken.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Per-step decrease of any entropy tolerated before the orbit is declared broken.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Uniform dense samples added to the accepted step points.
pub const DENSE_SAMPLES: usize = 512;
/// `|F|` must fall below this fraction of its running maximum before the
/// stop test may fire.
pub const PEAK_FRACTION: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("lax_violated: mass flux {m} does not exceed the acoustic impedance {impedance}")]
    LaxViolated { m: f64, impedance: f64 },
    #[error("viscosity has {got} coefficients, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("mass flux must be positive and finite (got {0})")]
    MassFlux(f64),
    #[error(transparent)]
    Eos(#[from] EosError),
    #[error(transparent)]
    EndState(#[from] EndStateError),
}

impl ProfileError {
    pub fn code(&self) -> &'static str {
        match self {
            ProfileError::LaxViolated { .. } => "lax_violated",
            ProfileError::Dimension { .. } | ProfileError::MassFlux(_) => "invalid_input",
            ProfileError::Eos(e) => e.code(),
            ProfileError::EndState(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    /// Relative size of `|F|` and of the field at which `ω_R` counts as reached.
    pub stop: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel: 1e-10, abs: 1e-12, stop: 1e-10 }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileProblem {
    #[serde(rename = "omega_L")]
    pub omega_l: ThermoState,
    pub m: f64,
    pub eos: EosSpec,
    pub visc: ViscositySpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Pseudo-time budget; `1e6 / m` when absent.
    #[serde(default)]
    pub t_max: Option<f64>,
    /// Multiplies the launch offset. Only useful for sensitivity checks.
    #[serde(default = "one")]
    pub kick_scale: f64,
}

impl ProfileProblem {
    pub fn new(eos: EosSpec, visc: ViscositySpec, omega_l: ThermoState, m: f64) -> Self {
        ProfileProblem { omega_l, m, eos, visc, tolerances: Tolerances::default(), t_max: None, kick_scale: 1.0 }
    }

    /// Problem whose mass flux exceeds `ρ_L c_L` by the relative `margin`.
    pub fn with_margin(eos: EosSpec, visc: ViscositySpec, omega_l: ThermoState, margin: f64) -> Self {
        let m = eos.acoustic_impedance(&omega_l) * (1.0 + margin);
        Self::new(eos, visc, omega_l, m)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max.unwrap_or(1e6 / self.m)
    }

    /// Checks dimensions and the Lax condition.
    pub fn context(&self) -> Result<EndStateContext, ProfileError> {
        self.eos.check_state(&self.omega_l)?;
        if self.visc.len() != self.eos.len() {
            return Err(ProfileError::Dimension { expected: self.eos.len(), got: self.visc.len() });
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(ProfileError::MassFlux(self.m));
        }
        EndStateContext::new(self.eos.clone(), self.omega_l.clone(), self.m).map_err(|e| match e {
            EndStateError::LaxViolated { m, impedance } => ProfileError::LaxViolated { m, impedance },
            other => other.into(),
        })
    }

    /// `|e_L| + m²τ_L²`, the normalization of `H` drift.
    pub fn energy_scale(&self) -> f64 {
        self.eos.internal_energy(&self.omega_l).abs() + self.m * self.m * self.omega_l.tau * self.omega_l.tau
    }
}

pub fn f_residual(w: &ThermoState, prob: &ProfileProblem) -> f64 {
    let p_l = prob.eos.pressure(&prob.omega_l);
    prob.eos.pressure(w) - p_l + prob.m * prob.m * (w.tau - prob.omega_l.tau)
}

pub fn hamiltonian(w: &ThermoState, prob: &ProfileProblem) -> f64 {
    let (tl, m2) = (prob.omega_l.tau, prob.m * prob.m);
    let p_l = prob.eos.pressure(&prob.omega_l);
    prob.eos.internal_energy(w) - prob.eos.internal_energy(&prob.omega_l) - 0.5 * m2 * (w.tau * w.tau - tl * tl)
        + (m2 * tl + p_l) * (w.tau - tl)
}

/// Entropy rates per unit `F²`. In temperature mode `μ_i / T_i = μ_i⁰`
/// exactly, which keeps the rates in fixed proportion.
fn entropy_weights(prob: &ProfileProblem, w: &ThermoState, mu_i: &[f64]) -> Vec<f64> {
    match prob.visc.mode() {
        ViscosityMode::Temperature => prob.visc.mu0().to_vec(),
        ViscosityMode::Constant => mu_i.iter().zip(prob.eos.temperatures(w)).map(|(m, t)| m / t).collect(),
    }
}

/// `(τ', s_1', …, s_N')` at `w`.
pub fn vector_field(w: &ThermoState, prob: &ProfileProblem) -> Vec<f64> {
    let f = f_residual(w, prob);
    field_from(prob, w, f)
}

fn field_from(prob: &ProfileProblem, w: &ThermoState, f: f64) -> Vec<f64> {
    let mu_i = prob.visc.coefficients(&prob.eos, w);
    let mu: f64 = mu_i.iter().sum();
    let mut out = Vec::with_capacity(mu_i.len() + 1);
    out.push(f / mu);
    let q = f * f / (mu * mu);
    out.extend(entropy_weights(prob, w, &mu_i).into_iter().map(|c| c * q));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitStatus {
    Converged,
    BudgetExhausted,
    InvariantViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSample {
    pub t: f64,
    pub omega: ThermoState,
    pub delta_tau: f64,
    pub delta_s: Vec<f64>,
    pub f: f64,
    /// `|H| / (|e_L| + m²τ_L²)`.
    pub h_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub samples: Vec<OrbitSample>,
    pub terminal: ThermoState,
    pub terminal_delta_s: Vec<f64>,
    pub status: OrbitStatus,
    /// Why the orbit is not converged, if it is not.
    pub reason: Option<String>,
    pub h_drift_max: f64,
    /// `m - ρ_L c_L`.
    pub lax_margin: f64,
    /// `ρ_R c_R - m`; positive when the exit state is subsonic.
    pub exit_margin: f64,
    pub kick: f64,
    pub steps: usize,
}

impl Orbit {
    /// Largest per-step decrease of any entropy component (0 if monotone).
    pub fn worst_entropy_decrease(&self) -> f64 {
        self.samples
            .windows(2)
            .flat_map(|w| w[0].delta_s.iter().zip(&w[1].delta_s).map(|(a, b)| a - b))
            .fold(0.0, f64::max)
    }

    /// Write `t,tau,s_1..s_N,F,H_drift`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.terminal.s.len();
        let mut head = vec!["t".to_string(), "tau".to_string()];
        head.extend((1..=n).map(|i| format!("s_{i}")));
        head.extend(["F".to_string(), "H_drift".to_string()]);
        writeln!(w, "{}", head.join(","))?;
        for s in &self.samples {
            let row: Vec<String> = [s.t, s.omega.tau]
                .iter()
                .chain(&s.omega.s)
                .chain([s.f, s.h_drift].iter())
                .map(|x| format!("{x:.16e}"))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Launch offset along `-τ`: a small fraction of `τ_L`, capped by a small
/// fraction of the quadratic estimate `2 ∂F/∂τ / ∂²p/∂τ²` of the distance to
/// the far root, so that weak shocks are not overshot.
fn kick(prob: &ProfileProblem, ctx: &EndStateContext) -> f64 {
    let w = &prob.omega_l;
    let width = 2.0 * ctx.f_tau(w.tau, &vec![0.0; w.s.len()]) / prob.eos.d2p_dtau2(w);
    prob.kick_scale * (1e-6 * w.tau).min(1e-3 * width)
}

/// Integrate the profile from `ω_L` to its end state.
pub fn shoot(prob: &ProfileProblem) -> Result<Orbit, ProfileError> {
    let ctx = prob.context()?;
    let n = prob.eos.len();
    let base = &prob.omega_l;
    let scale = ctx.scale();
    let escale = prob.energy_scale();
    let stop = prob.tolerances.stop;
    let t_max = prob.t_max();
    let eps = kick(prob, &ctx);

    let absolute = |y: &[f64]| ctx.state(base.tau + y[0], &y[1..]);
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let w = absolute(y);
        let f = ctx.f_offset(y[0], &y[1..]);
        dy.copy_from_slice(&field_from(prob, &w, f));
    };

    let mut y0 = vec![0.0; n + 1];
    y0[0] = -eps;
    let opts = StepOptions { rtol: prob.tolerances.rel, atol: prob.tolerances.abs, ..StepOptions::default() };

    let mut steps: Vec<DenseStep> = Vec::new();
    let mut points: Vec<(f64, Vec<f64>)> = vec![(0.0, y0.clone())];
    let mut violation: Option<String> = None;
    let mut reached = false;
    let mut prev = y0.clone();
    let mut f_peak: f64 = 0.0;

    let summary = integrate(rhs, 0.0, &y0, t_max, &opts, |step, y| {
        steps.push(step.clone());
        let t = step.t1();
        points.push((t, y.to_vec()));
        let h = ctx.h_offset(y[0], &y[1..]).abs() / escale;
        if h > DRIFT_LIMIT {
            violation = Some(format!("H drift {h:e} at t = {t:e}"));
        } else if let Some(k) = (1..=n).find(|&k| y[k] < prev[k] - MONOTONE_SLACK) {
            violation = Some(format!("s_{k} decreased by {:e} at t = {t:e}", prev[k] - y[k]));
        } else if y[0] > 0.0 {
            violation = Some(format!("tau exceeded tau_L at t = {t:e}"));
        } else if base.tau + y[0] <= 0.0 {
            violation = Some(format!("tau reached zero at t = {t:e}"));
        }
        if violation.is_some() {
            return Control::Stop;
        }
        prev.copy_from_slice(y);
        let f = ctx.f_offset(y[0], &y[1..]);
        f_peak = f_peak.max(f.abs());
        let field = field_from(prob, &absolute(y), f);
        let norm = field.iter().map(|v| v * v).sum::<f64>().sqrt();
        // Near ω_L itself F is tiny too; only count a critical point the
        // orbit has travelled to.
        if f.abs() <= stop * scale && norm <= stop && f.abs() <= PEAK_FRACTION * f_peak {
            reached = true;
            return Control::Stop;
        }
        Control::Continue
    });

    let t_end = summary.t;
    let y_end = summary.y.clone();

    // Step points plus uniform dense samples.
    let mut buf = vec![0.0; n + 1];
    for k in 1..DENSE_SAMPLES.saturating_sub(1) {
        let t = t_end * k as f64 / (DENSE_SAMPLES - 1) as f64;
        let j = steps.partition_point(|s| s.t1() < t);
        if let Some(step) = steps.get(j) {
            step.eval(t, &mut buf);
            points.push((t, buf.clone()));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|b, a| b.0 <= a.0);

    let samples: Vec<OrbitSample> = points
        .into_iter()
        .map(|(t, y)| {
            let omega = absolute(&y);
            OrbitSample {
                t,
                f: ctx.f_offset(y[0], &y[1..]),
                h_drift: ctx.h_offset(y[0], &y[1..]).abs() / escale,
                omega,
                delta_tau: y[0],
                delta_s: y[1..].to_vec(),
            }
        })
        .collect();
    let h_drift_max = samples.iter().map(|s| s.h_drift).fold(0.0, f64::max);

    let terminal = absolute(&y_end);
    let exit_margin = prob.eos.acoustic_impedance(&terminal) - prob.m;
    let (status, reason) = if let Some(v) = violation {
        (OrbitStatus::InvariantViolated, Some(v))
    } else if reached && exit_margin > 0.0 {
        (OrbitStatus::Converged, None)
    } else if reached {
        (OrbitStatus::InvariantViolated, Some(format!("exit state is not subsonic (margin {exit_margin:e})")))
    } else {
        let why = match summary.outcome {
            Outcome::Finished => format!("pseudo-time budget {t_max:e} exhausted"),
            Outcome::StepLimit => "step limit reached".to_string(),
            Outcome::StepSizeUnderflow => "step size underflow".to_string(),
            Outcome::NonFinite => "non-finite state".to_string(),
            Outcome::Stopped => "stopped".to_string(),
        };
        (OrbitStatus::BudgetExhausted, Some(why))
    };

    Ok(Orbit {
        samples,
        terminal,
        terminal_delta_s: y_end[1..].to_vec(),
        status,
        reason,
        h_drift_max,
        lax_margin: ctx.lax_margin(),
        exit_margin,
        kick: eps,
        steps: summary.accepted,
    })
}

/// `E_i = m (s_i^R - s_i^L)`.
pub fn entropy_production(orbit: &Orbit, prob: &ProfileProblem) -> Vec<f64> {
    orbit.terminal_delta_s.iter().map(|d| prob.m * d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn problem(n: usize, m2: f64) -> ProfileProblem {
        let eos = EosSpec::uniform(n, 1.4, 1.0).unwrap();
        let visc = ViscositySpec::temperature(vec![1.0; n]).unwrap();
        ProfileProblem::new(eos, visc, ThermoState::new(1.0, vec![0.0; n]).unwrap(), m2.sqrt())
    }

    #[test]
    fn residual_examples() {
        let p = problem(1, 2.8);
        assert_eq!(f_residual(&p.omega_l, &p), 0.0);
        let w = ThermoState::new(0.8, vec![0.0]).unwrap();
        assert_relative_eq!(f_residual(&w, &p), -0.193_297_407_570_902_43, max_relative = 1e-13);
        for (t, s) in [(1.0, 0.1), (1.3, 0.0), (2.0, 0.5)] {
            assert!(f_residual(&ThermoState::new(t, vec![s]).unwrap(), &p) > 0.0);
        }
    }

    #[test]
    fn hamiltonian_derivatives() {
        let p = problem(2, 5.6);
        assert_eq!(hamiltonian(&p.omega_l, &p), 0.0);
        let w = ThermoState::new(0.8, vec![0.1, 0.2]).unwrap();
        let h = 1e-6;
        let at = |t: f64, s: Vec<f64>| hamiltonian(&ThermoState::new(t, s).unwrap(), &p);
        let dh_dt = (at(0.8 + h, w.s.clone()) - at(0.8 - h, w.s.clone())) / (2.0 * h);
        assert_relative_eq!(dh_dt, -f_residual(&w, &p), max_relative = 1e-6);
        let dh_ds = (at(0.8, vec![0.1 + h, 0.2]) - at(0.8, vec![0.1 - h, 0.2])) / (2.0 * h);
        assert_relative_eq!(dh_ds, p.eos.temperatures(&w)[0], max_relative = 1e-6);
    }

    #[test]
    fn field_vanishes_at_critical_point_and_entropy_grows() {
        let p = problem(2, 5.6);
        assert!(vector_field(&p.omega_l, &p).iter().all(|v| *v == 0.0));
        let v = vector_field(&ThermoState::new(0.7, vec![0.3, -0.1]).unwrap(), &p);
        assert!(v[1] >= 0.0 && v[2] >= 0.0);
        assert_eq!(v[1], v[2]);
    }

    #[test]
    fn single_species_reaches_normal_shock() {
        let orbit = shoot(&problem(1, 2.8)).unwrap();
        assert_eq!(orbit.status, OrbitStatus::Converged, "{:?}", orbit.reason);
        assert_relative_eq!(orbit.terminal.tau, 7.0 / 12.0, max_relative = 1e-8);
        assert_relative_eq!(orbit.terminal_delta_s[0], 0.018_594_787_207_719_928, max_relative = 1e-7);
        assert!(orbit.h_drift_max < 1e-8);
        assert!(orbit.exit_margin > 0.0);
        assert!(orbit.samples.len() >= DENSE_SAMPLES);
        assert!(orbit.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn identical_species_share_the_jump() {
        let orbit = shoot(&problem(2, 5.6)).unwrap();
        assert_eq!(orbit.status, OrbitStatus::Converged);
        assert_eq!(orbit.terminal_delta_s[0], orbit.terminal_delta_s[1]);
    }

    #[test]
    fn inviscid_species_keeps_its_entropy() {
        let mut p = problem(2, 5.6);
        p.visc = ViscositySpec::temperature(vec![0.0, 1.0]).unwrap();
        let orbit = shoot(&p).unwrap();
        assert_eq!(orbit.status, OrbitStatus::Converged);
        let e = entropy_production(&orbit, &p);
        assert_eq!(e[0], 0.0);
        assert!(e[1] > 0.0);
    }

    #[test]
    fn constant_viscosity_converges() {
        let mut p = problem(2, 5.6);
        p.visc = ViscositySpec::constant(vec![1.0, 0.3]).unwrap();
        let orbit = shoot(&p).unwrap();
        assert_eq!(orbit.status, OrbitStatus::Converged);
        assert!(orbit.terminal_delta_s.iter().all(|d| *d > 0.0));
    }

    #[test]
    fn subsonic_inflow_is_rejected() {
        let p = problem(1, 1.0);
        assert!(matches!(shoot(&p), Err(ProfileError::LaxViolated { .. })));
    }

    #[test]
    fn vanishing_margin_runs_out_of_budget() {
        let eos = EosSpec::uniform(1, 1.4, 1.0).unwrap();
        let visc = ViscositySpec::temperature(vec![1.0]).unwrap();
        let p = ProfileProblem::with_margin(eos, visc, ThermoState::new(1.0, vec![0.0]).unwrap(), 1e-12);
        let orbit = shoot(&p).unwrap();
        assert_eq!(orbit.status, OrbitStatus::BudgetExhausted, "{:?}", orbit.reason);
        assert!(orbit.terminal_delta_s[0].abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let orbit = shoot(&problem(2, 5.6)).unwrap();
        let mut buf = Vec::new();
        orbit.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,tau,s_1,s_2,F,H_drift\n"));
        assert_eq!(text.lines().count(), orbit.samples.len() + 1);
    }

    #[test]
    fn problem_json_round_trip() {
        let json = r#"{"omega_L":{"tau":1.0,"s":[0.0]},"m":1.8,
            "eos":{"species":[{"gamma":1.4,"kappa":1.0}]},
            "visc":{"mu0":[1.0],"mode":"temperature"}}"#;
        let p: ProfileProblem = serde_json::from_str(json).unwrap();
        assert_eq!(p.tolerances, Tolerances::default());
        assert_eq!(p.kick_scale, 1.0);
        let back: ProfileProblem = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}

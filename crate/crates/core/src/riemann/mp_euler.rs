//! Riemann problem for the multi-pressure Euler equations.
//!
//! The solution is a 1-wave, one contact carrying every linearly degenerate
//! field (continuous velocity and total pressure) and a last wave. Shocks
//! follow the traveling-wave end states of [`crate::endstate`] and are
//! parametrized by the mass flux `m`; rarefactions are isentropic. The last
//! wave is obtained from the first by the reflection `u → -u`.

use std::io::{self, Write};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::entropy::entropy_dissipation_all;
use super::kinetic::SONIC_SLACK;
use super::system::MultiPressureEuler;
use super::{RiemannError, RESONANCE_DELTA};
use crate::endstate::{ConeDirection, EndStateContext};
use crate::eos::{EosSpec, ThermoState};
use crate::roots::{brent, expand, Tolerance};

/// Steps of the rarefaction quadrature; the check uses half as many.
pub const RAREFACTION_STEPS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluidState {
    pub rho: f64,
    pub u: f64,
    pub s: Vec<f64>,
}

impl FluidState {
    pub fn new(rho: f64, u: f64, s: Vec<f64>) -> Result<Self, RiemannError> {
        if !(rho > 0.0 && rho.is_finite() && u.is_finite()) {
            return Err(RiemannError::Invalid(format!("density {rho} / velocity {u} out of range")));
        }
        Ok(FluidState { rho, u, s })
    }

    /// From partial pressures `p_i`.
    pub fn from_pressures(eos: &EosSpec, rho: f64, u: f64, p: &[f64]) -> Result<Self, RiemannError> {
        if p.len() != eos.len() || p.iter().any(|x| !(*x > 0.0)) {
            return Err(RiemannError::Invalid("partial pressures must be positive, one per species".into()));
        }
        let s = eos.species().iter().zip(p).map(|(sp, pi)| (pi * rho.powf(-sp.gamma) / sp.kappa).ln()).collect();
        FluidState::new(rho, u, s)
    }

    pub fn thermo(&self) -> ThermoState {
        ThermoState { tau: 1.0 / self.rho, s: self.s.clone() }
    }

    pub fn pressure(&self, eos: &EosSpec) -> f64 {
        eos.pressure(&self.thermo())
    }

    pub fn sound_speed(&self, eos: &EosSpec) -> f64 {
        eos.sound_speed_sq(&self.thermo()).sqrt()
    }

    pub fn conserved(&self) -> DVector<f64> {
        let mut u = DVector::zeros(self.s.len() + 2);
        u[0] = self.rho;
        u[1] = self.rho * self.u;
        for (i, s) in self.s.iter().enumerate() {
            u[2 + i] = self.rho * s;
        }
        u
    }

    fn reflected(&self) -> Self {
        FluidState { rho: self.rho, u: -self.u, s: self.s.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock,
    Rarefaction,
    Contact,
    Standing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Wave {
    pub kind: WaveKind,
    /// 1-based characteristic family.
    pub family: usize,
    /// Slowest and fastest speed of the wave (equal for discontinuities).
    pub speed_tail: f64,
    pub speed_head: f64,
    pub left: FluidState,
    pub right: FluidState,
    /// Signed mass flux `ρ(u - Λ)` through a shock.
    pub mass_flux: Option<f64>,
    /// `E_k` for the entropies `U_k = -ρs_k`; nonpositive when admissible.
    pub dissipation: Vec<f64>,
    /// Lax margins `(λ(left) - Λ, Λ - λ(right))` of a shock; both positive.
    pub lax_margins: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveFan {
    pub waves: Vec<Wave>,
    pub p_star: f64,
    pub u_star: f64,
    pub star_left: FluidState,
    pub star_right: FluidState,
    /// `|u*_L - u*_R|` at the computed star pressure.
    pub velocity_mismatch: f64,
    /// `|p(star_left) - p(star_right)|` recomputed from the law.
    pub pressure_mismatch: f64,
    /// Richardson estimate of the rarefaction quadrature error.
    pub quadrature_error: f64,
}

impl WaveFan {
    /// All wave speeds, left to right.
    pub fn speeds(&self) -> Vec<f64> {
        self.waves
            .iter()
            .flat_map(
                |w| {
                    if w.speed_tail == w.speed_head {
                        vec![w.speed_tail]
                    } else {
                        vec![w.speed_tail, w.speed_head]
                    }
                },
            )
            .collect()
    }
}

/// Relative imbalance of mass, momentum and total energy across one wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpResidual {
    pub family: usize,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

fn balance_densities(eos: &EosSpec, st: &FluidState) -> ([f64; 3], [f64; 3]) {
    let w = st.thermo();
    let p = eos.pressure(&w);
    let e = st.rho * (eos.internal_energy(&w) + 0.5 * st.u * st.u);
    ([st.rho, st.rho * st.u, e], [st.rho * st.u, st.rho * st.u * st.u + p, (e + p) * st.u])
}

impl WaveFan {
    /// `|-Λ[q] + [f(q)]|`, scaled by the size of the terms, for every
    /// discontinuity of the fan.
    pub fn jump_residuals(&self, eos: &EosSpec) -> Vec<JumpResidual> {
        self.waves
            .iter()
            .filter(|w| w.kind != WaveKind::Rarefaction)
            .map(|w| {
                let lam = w.speed_tail;
                let (ql, fl) = balance_densities(eos, &w.left);
                let (qr, fr) = balance_densities(eos, &w.right);
                let r = |k: usize| {
                    let num = (-lam * (qr[k] - ql[k]) + fr[k] - fl[k]).abs();
                    let scale = lam.abs() * (ql[k].abs() + qr[k].abs()) + fl[k].abs() + fr[k].abs();
                    if scale > 0.0 {
                        num / scale
                    } else {
                        0.0
                    }
                };
                JumpResidual { family: w.family, mass: r(0), momentum: r(1), energy: r(2) }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannOptions {
    pub resonance_delta: f64,
    /// Relative tolerance on the star pressure.
    pub tol_rel: f64,
}

impl Default for RiemannOptions {
    fn default() -> Self {
        RiemannOptions { resonance_delta: RESONANCE_DELTA, tol_rel: 1e-14 }
    }
}

/// One side of the problem, seen as a left state (the right side is reflected).
struct Side<'a> {
    eos: &'a EosSpec,
    state: FluidState,
    a: &'a ConeDirection,
    p0: f64,
    impedance: f64,
}

#[derive(Debug, Clone)]
enum Branch {
    Shock { m: f64, tau: f64, s: Vec<f64> },
    Rarefaction { tau: f64, error: f64 },
}

/// `∫ c dlnρ` from `ln ρ_a` to `ln ρ_b` at fixed `s` (Simpson, which is what
/// RK4 reduces to for a right-hand side independent of the unknown).
fn isentropic_integral(eos: &EosSpec, s: &[f64], rho_a: f64, rho_b: f64, steps: usize) -> f64 {
    let (x0, x1) = (rho_a.ln(), rho_b.ln());
    let h = (x1 - x0) / steps as f64;
    let c = |x: f64| eos.sound_speed_sq(&ThermoState { tau: (-x).exp(), s: s.to_vec() }).sqrt();
    let mut acc = 0.0;
    for k in 0..steps {
        let a = x0 + k as f64 * h;
        acc += h / 6.0 * (c(a) + 4.0 * c(a + 0.5 * h) + c(a + h));
    }
    acc
}

fn rarefaction_velocity(eos: &EosSpec, state: &FluidState, rho: f64) -> (f64, f64) {
    let fine = isentropic_integral(eos, &state.s, rho, state.rho, RAREFACTION_STEPS);
    let coarse = isentropic_integral(eos, &state.s, rho, state.rho, RAREFACTION_STEPS / 2);
    (state.u + fine, (fine - coarse).abs() / 15.0)
}

/// Specific volume with `p(τ, s) = p` on the isentrope `s`.
fn isentrope_volume(eos: &EosSpec, s: &[f64], tau0: f64, p: f64) -> Result<f64, RiemannError> {
    let g = |lt: f64| eos.pressure(&ThermoState { tau: lt.exp(), s: s.to_vec() }).ln() - p.ln();
    let l0 = tau0.ln();
    let lo = expand(1.0, 2.0, 60, |d| g(l0 - d) > 0.0)?;
    let hi = expand(1.0, 2.0, 60, |d| g(l0 + d) < 0.0)?;
    Ok(brent(g, l0 - lo, l0 + hi, Tolerance { rel: 1e-15, abs: 1e-15, max_iter: 200 })?.x.exp())
}

impl Side<'_> {
    fn new<'a>(eos: &'a EosSpec, state: FluidState, a: &'a ConeDirection) -> Side<'a> {
        let w = state.thermo();
        Side { eos, p0: eos.pressure(&w), impedance: eos.acoustic_impedance(&w), state, a }
    }

    /// Star pressure and velocity of the shock with mass flux `m`.
    fn shock(&self, m: f64) -> Result<(f64, f64, f64, Vec<f64>), RiemannError> {
        let tau0 = 1.0 / self.state.rho;
        if m <= self.impedance * (1.0 + SONIC_SLACK) {
            return Ok((self.p0, self.state.u, tau0, self.state.s.clone()));
        }
        let ctx = EndStateContext::new(self.eos.clone(), self.state.thermo(), m)?;
        let e = ctx.end_state(self.a)?;
        let dt = tau0 - e.tau_r;
        Ok((self.p0 + m * m * dt, self.state.u - m * dt, e.tau_r, e.s_r))
    }

    /// Velocity behind the wave reaching total pressure `p`.
    fn velocity(&self, p: f64) -> Result<(f64, Branch), RiemannError> {
        if p <= self.p0 {
            let tau = if p == self.p0 {
                1.0 / self.state.rho
            } else {
                isentrope_volume(self.eos, &self.state.s, 1.0 / self.state.rho, p)?
            };
            let (u, error) = rarefaction_velocity(self.eos, &self.state, 1.0 / tau);
            return Ok((u, Branch::Rarefaction { tau, error }));
        }
        let target = |m: f64| self.shock(m).map(|r| r.0 - p).unwrap_or(f64::NAN);
        let lo = self.impedance;
        let hi = expand(2.0 * lo, 2.0, 80, |m| target(m) > 0.0)?;
        let m = brent(target, lo, hi, Tolerance { rel: 1e-15, abs: 0.0, max_iter: 200 })?.x;
        let (_, u, tau, s) = self.shock(m)?;
        Ok((u, Branch::Shock { m, tau, s }))
    }
}

fn check_resonance(eos: &EosSpec, st: &FluidState, side: &'static str, delta: f64) -> Result<(), RiemannError> {
    let c = st.sound_speed(eos);
    let value = (1.0 - st.u * st.u / (c * c)).abs();
    if value < delta {
        return Err(RiemannError::Resonance { side, value, delta });
    }
    Ok(())
}

/// Solve the Riemann problem with kinetic shocks selected by the viscosity
/// directions `a_l` (first family) and `a_r` (last family).
pub fn solve_riemann_mp_euler(
    eos: &EosSpec,
    left: &FluidState,
    right: &FluidState,
    a_l: &ConeDirection,
    a_r: &ConeDirection,
    opts: &RiemannOptions,
) -> Result<WaveFan, RiemannError> {
    let n = eos.len();
    for (st, name) in [(left, "left"), (right, "right")] {
        eos.check_state(&st.thermo())?;
        FluidState::new(st.rho, st.u, st.s.clone())?;
        if st.s.len() != n {
            return Err(RiemannError::Invalid(format!("{name} state has {} entropies, expected {n}", st.s.len())));
        }
    }
    if a_l.len() != n || a_r.len() != n {
        return Err(RiemannError::Invalid(format!("viscosity directions must have {n} components")));
    }
    check_resonance(eos, left, "left", opts.resonance_delta)?;
    check_resonance(eos, right, "right", opts.resonance_delta)?;

    let ls = Side::new(eos, left.clone(), a_l);
    let rs = Side::new(eos, right.reflected(), a_r);
    let g = |p: f64| -> f64 {
        match (ls.velocity(p), rs.velocity(p)) {
            (Ok((ul, _)), Ok((ur, _))) => ul + ur,
            _ => f64::NAN,
        }
    };

    let pmax = ls.p0.max(rs.p0);
    let floor = 1e-14 * pmax;
    if !(g(floor) > 0.0) {
        return Err(RiemannError::Vacuum { floor });
    }
    let pmin = ls.p0.min(rs.p0);
    let lo = if g(pmin) >= 0.0 { pmin } else { expand(pmin, 0.5, 200, |p| p <= floor || g(p) > 0.0)?.max(floor) };
    let hi = expand(pmax, 2.0, 200, |p| g(p) <= 0.0)?;
    let root = brent(g, lo, hi, Tolerance { rel: opts.tol_rel, abs: 0.0, max_iter: 400 })?;
    let p_star = root.x;

    let (ul, bl) = ls.velocity(p_star)?;
    let (ur_ref, br) = rs.velocity(p_star)?;
    let ur = -ur_ref;

    let sys = MultiPressureEuler::new(eos.clone());
    let mut quad: f64 = 0.0;
    let mut build =
        |side: &Side<'_>, branch: &Branch, u_star: f64, family: usize, mirrored: bool| -> (Wave, FluidState) {
            let st = &side.state;
            let sign = if mirrored { -1.0 } else { 1.0 };
            let data = FluidState { rho: st.rho, u: sign * st.u, s: st.s.clone() };
            match branch {
                Branch::Shock { m, tau, s } => {
                    let star = FluidState { rho: 1.0 / tau, u: u_star, s: s.clone() };
                    // Speed in the original frame: Λ = u0 - m τ0 for the first family.
                    let speed = sign * (st.u - m * (1.0 / st.rho));
                    let (wl, wr) = if mirrored { (star.clone(), data.clone()) } else { (data.clone(), star.clone()) };
                    let flux = wl.rho * (wl.u - speed);
                    let dissipation = entropy_dissipation_all(&sys, speed, &wl.conserved(), &wr.conserved());
                    let cl = wl.sound_speed(eos);
                    let cr = wr.sound_speed(eos);
                    let margins = if mirrored {
                        [wl.u + cl - speed, speed - (wr.u + cr)]
                    } else {
                        [wl.u - cl - speed, speed - (wr.u - cr)]
                    };
                    let wave = Wave {
                        kind: WaveKind::Shock,
                        family,
                        speed_tail: speed,
                        speed_head: speed,
                        left: wl,
                        right: wr,
                        mass_flux: Some(flux),
                        dissipation,
                        lax_margins: Some(margins),
                    };
                    (wave, star)
                }
                Branch::Rarefaction { tau, error } => {
                    quad = quad.max(*error);
                    let star = FluidState { rho: 1.0 / tau, u: u_star, s: st.s.clone() };
                    let c0 = data.sound_speed(eos);
                    let cs = star.sound_speed(eos);
                    let (wl, wr, tail, head) = if mirrored {
                        (star.clone(), data.clone(), u_star + cs, data.u + c0)
                    } else {
                        (data.clone(), star.clone(), data.u - c0, u_star - cs)
                    };
                    let wave = Wave {
                        kind: WaveKind::Rarefaction,
                        family,
                        speed_tail: tail.min(head),
                        speed_head: tail.max(head),
                        left: wl,
                        right: wr,
                        mass_flux: None,
                        dissipation: vec![0.0; st.s.len()],
                        lax_margins: None,
                    };
                    (wave, star)
                }
            }
        };
    let (w1, star_left) = build(&ls, &bl, ul, 1, false);
    let (w3, star_right) = build(&rs, &br, ur, n + 2, true);
    let u_star = 0.5 * (ul + ur);
    let contact = Wave {
        kind: WaveKind::Contact,
        family: 2,
        speed_tail: u_star,
        speed_head: u_star,
        left: star_left.clone(),
        right: star_right.clone(),
        mass_flux: Some(0.0),
        dissipation: vec![0.0; n],
        lax_margins: None,
    };
    let pressure_mismatch = (star_left.pressure(eos) - star_right.pressure(eos)).abs();
    Ok(WaveFan {
        waves: vec![w1, contact, w3],
        p_star,
        u_star,
        star_left,
        star_right,
        velocity_mismatch: (ul - ur).abs(),
        pressure_mismatch,
        quadrature_error: quad,
    })
}

/// Point value of the self-similar solution at `ξ = x/t`.
pub fn sample(eos: &EosSpec, fan: &WaveFan, xi: f64) -> Result<FluidState, RiemannError> {
    let [w1, contact, w3] = &fan.waves[..] else {
        return Err(RiemannError::Invalid("wave fan must have three waves".into()));
    };
    if xi < w1.speed_tail {
        return Ok(w1.left.clone());
    }
    if xi < w1.speed_head {
        return fan_state(eos, &w1.left, xi, false);
    }
    if xi < contact.speed_tail {
        return Ok(fan.star_left.clone());
    }
    if xi < w3.speed_tail {
        return Ok(fan.star_right.clone());
    }
    if xi < w3.speed_head {
        return fan_state(eos, &w3.right, xi, true);
    }
    Ok(w3.right.clone())
}

/// State inside a rarefaction fan with `u ∓ c = ξ`.
fn fan_state(eos: &EosSpec, data: &FluidState, xi: f64, mirrored: bool) -> Result<FluidState, RiemannError> {
    let st = if mirrored { data.reflected() } else { data.clone() };
    let target = if mirrored { -xi } else { xi };
    let h = |lr: f64| {
        let rho = lr.exp();
        let (u, _) = rarefaction_velocity(eos, &st, rho);
        let c = eos.sound_speed_sq(&ThermoState { tau: 1.0 / rho, s: st.s.clone() }).sqrt();
        u - c - target
    };
    let l0 = st.rho.ln();
    let lo = expand(1.0, 2.0, 80, |d| h(l0 - d) > 0.0)?;
    let lr = brent(h, l0 - lo, l0, Tolerance { rel: 1e-14, abs: 1e-14, max_iter: 200 })?.x;
    let rho = lr.exp();
    let (u, _) = rarefaction_velocity(eos, &st, rho);
    let out = FluidState { rho, u, s: st.s.clone() };
    Ok(if mirrored { out.reflected() } else { out })
}

/// Write `xi,rho,u,p_total,s_1..s_N` at each `ξ`.
pub fn write_sample_csv<W: Write>(mut w: W, eos: &EosSpec, fan: &WaveFan, xis: &[f64]) -> io::Result<()> {
    let n = eos.len();
    let mut head = vec!["xi".to_string(), "rho".into(), "u".into(), "p_total".into()];
    head.extend((1..=n).map(|i| format!("s_{i}")));
    writeln!(w, "{}", head.join(","))?;
    for &xi in xis {
        let st = sample(eos, fan, xi).map_err(|e| io::Error::new(io::ErrorKind::Other, e.to_string()))?;
        let row: Vec<String> =
            [xi, st.rho, st.u, st.pressure(eos)].iter().chain(&st.s).map(|x| format!("{x:.16e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// A state given either by entropies or by partial pressures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateInput {
    pub rho: f64,
    pub u: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
}

impl StateInput {
    pub fn resolve(&self, eos: &EosSpec) -> Result<FluidState, RiemannError> {
        match (&self.s, &self.p) {
            (Some(s), None) => FluidState::new(self.rho, self.u, s.clone()),
            (None, Some(p)) => FluidState::from_pressures(eos, self.rho, self.u, p),
            _ => Err(RiemannError::Invalid("give exactly one of \"s\" or \"p\"".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannProblem {
    pub eos: EosSpec,
    pub left: StateInput,
    pub right: StateInput,
    #[serde(rename = "a_L")]
    pub a_l: ConeDirection,
    #[serde(rename = "a_R")]
    pub a_r: ConeDirection,
    #[serde(default)]
    pub options: RiemannOptions,
}

impl RiemannProblem {
    pub fn solve(&self) -> Result<WaveFan, RiemannError> {
        let l = self.left.resolve(&self.eos)?;
        let r = self.right.resolve(&self.eos)?;
        solve_riemann_mp_euler(&self.eos, &l, &r, &self.a_l, &self.a_r, &self.options)
    }
}

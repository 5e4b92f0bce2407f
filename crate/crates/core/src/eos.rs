//! Thermodynamic closure: N independent polytropic pressure laws.
//!
//! Species `i` carries the internal energy
//!
//! ```text
//! e_i(τ, s_i) = κ_i exp(s_i) τ^(1-γ_i) / (γ_i - 1)
//! ```
//!
//! from which `p_i = -∂e_i/∂τ = κ_i exp(s_i) τ^(-γ_i)` and
//! `T_i = ∂e_i/∂s_i = e_i`. Every quantity is nondimensional.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EosError {
    #[error("equation of state needs at least one species")]
    Empty,
    #[error("species {index}: adiabatic exponent must exceed 1 (got {gamma})")]
    Gamma { index: usize, gamma: f64 },
    #[error("species {index}: pressure scale must be positive (got {kappa})")]
    Kappa { index: usize, kappa: f64 },
    #[error("specific volume must be positive and finite (got {0})")]
    Volume(f64),
    #[error("entropy vector has {got} components, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("viscosity coefficient {index} is negative or non-finite ({value})")]
    NegativeViscosity { index: usize, value: f64 },
    #[error("total viscosity must be positive")]
    ZeroViscosity,
}

impl EosError {
    pub fn code(&self) -> &'static str {
        "invalid_input"
    }
}

/// One point `(τ, s_1, …, s_N)` of the thermodynamic phase space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    pub tau: f64,
    pub s: Vec<f64>,
}

impl ThermoState {
    pub fn new(tau: f64, s: Vec<f64>) -> Result<Self, EosError> {
        let w = ThermoState { tau, s };
        w.check()?;
        Ok(w)
    }

    pub fn check(&self) -> Result<(), EosError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(EosError::Volume(self.tau));
        }
        Ok(())
    }

    pub fn rho(&self) -> f64 {
        1.0 / self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Species {
    pub gamma: f64,
    pub kappa: f64,
}

impl Species {
    pub fn pressure(&self, tau: f64, s: f64) -> f64 {
        self.kappa * s.exp() * tau.powf(-self.gamma)
    }

    pub fn energy(&self, tau: f64, s: f64) -> f64 {
        self.kappa * s.exp() * tau.powf(1.0 - self.gamma) / (self.gamma - 1.0)
    }

    pub fn temperature(&self, tau: f64, s: f64) -> f64 {
        self.energy(tau, s)
    }

    pub fn dp_dtau(&self, tau: f64, s: f64) -> f64 {
        -self.gamma * self.pressure(tau, s) / tau
    }

    pub fn d2p_dtau2(&self, tau: f64, s: f64) -> f64 {
        self.gamma * (self.gamma + 1.0) * self.pressure(tau, s) / (tau * tau)
    }

    pub fn dp_ds(&self, tau: f64, s: f64) -> f64 {
        self.pressure(tau, s)
    }

    /// `p(τ_0 + dτ, s_0 + ds) - p(τ_0, s_0)` without cancellation.
    pub fn pressure_jump(&self, tau0: f64, s0: f64, dtau: f64, ds: f64) -> f64 {
        let x = ds - self.gamma * (dtau / tau0).ln_1p();
        self.pressure(tau0, s0) * x.exp_m1()
    }

    /// `e(τ_0 + dτ, s_0 + ds) - e(τ_0, s_0)` without cancellation.
    pub fn energy_jump(&self, tau0: f64, s0: f64, dtau: f64, ds: f64) -> f64 {
        let x = ds + (1.0 - self.gamma) * (dtau / tau0).ln_1p();
        self.energy(tau0, s0) * x.exp_m1()
    }
}

/// N polytropic species laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEos", into = "RawEos")]
pub struct EosSpec {
    species: Vec<Species>,
}

#[derive(Serialize, Deserialize)]
struct RawEos {
    species: Vec<Species>,
}

impl TryFrom<RawEos> for EosSpec {
    type Error = EosError;
    fn try_from(raw: RawEos) -> Result<Self, EosError> {
        EosSpec::new(raw.species)
    }
}

impl From<EosSpec> for RawEos {
    fn from(e: EosSpec) -> Self {
        RawEos { species: e.species }
    }
}

impl EosSpec {
    pub fn new(species: Vec<Species>) -> Result<Self, EosError> {
        if species.is_empty() {
            return Err(EosError::Empty);
        }
        for (index, sp) in species.iter().enumerate() {
            if !(sp.gamma > 1.0 && sp.gamma.is_finite()) {
                return Err(EosError::Gamma { index, gamma: sp.gamma });
            }
            if !(sp.kappa > 0.0 && sp.kappa.is_finite()) {
                return Err(EosError::Kappa { index, kappa: sp.kappa });
            }
        }
        Ok(EosSpec { species })
    }

    /// Skips the parameter checks. Only meant for probing laws that break
    /// the structural hypotheses, see [`validate_hypotheses`].
    pub fn new_unchecked(species: Vec<Species>) -> Self {
        EosSpec { species }
    }

    /// `n` copies of the same species.
    pub fn uniform(n: usize, gamma: f64, kappa: f64) -> Result<Self, EosError> {
        EosSpec::new(vec![Species { gamma, kappa }; n])
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn check_state(&self, w: &ThermoState) -> Result<(), EosError> {
        w.check()?;
        if w.s.len() != self.len() {
            return Err(EosError::Dimension { expected: self.len(), got: w.s.len() });
        }
        Ok(())
    }

    fn each<'a>(&'a self, w: &'a ThermoState) -> impl Iterator<Item = (&'a Species, f64)> + 'a {
        self.species.iter().zip(w.s.iter().copied())
    }

    pub fn pressures(&self, w: &ThermoState) -> Vec<f64> {
        self.each(w).map(|(sp, s)| sp.pressure(w.tau, s)).collect()
    }

    pub fn pressure(&self, w: &ThermoState) -> f64 {
        self.each(w).map(|(sp, s)| sp.pressure(w.tau, s)).sum()
    }

    pub fn temperatures(&self, w: &ThermoState) -> Vec<f64> {
        self.each(w).map(|(sp, s)| sp.temperature(w.tau, s)).collect()
    }

    pub fn energies(&self, w: &ThermoState) -> Vec<f64> {
        self.each(w).map(|(sp, s)| sp.energy(w.tau, s)).collect()
    }

    pub fn internal_energy(&self, w: &ThermoState) -> f64 {
        self.each(w).map(|(sp, s)| sp.energy(w.tau, s)).sum()
    }

    /// `Σ ∂p_i/∂τ`.
    pub fn dp_dtau(&self, w: &ThermoState) -> f64 {
        self.each(w).map(|(sp, s)| sp.dp_dtau(w.tau, s)).sum()
    }

    /// `Σ ∂²p_i/∂τ²`.
    pub fn d2p_dtau2(&self, w: &ThermoState) -> f64 {
        self.each(w).map(|(sp, s)| sp.d2p_dtau2(w.tau, s)).sum()
    }

    /// `∂p_i/∂s_i` for every species.
    pub fn dp_ds(&self, w: &ThermoState) -> Vec<f64> {
        self.each(w).map(|(sp, s)| sp.dp_ds(w.tau, s)).collect()
    }

    pub fn sound_speed_sq(&self, w: &ThermoState) -> f64 {
        -w.tau * w.tau * self.dp_dtau(w)
    }

    /// Lagrangian sound speed `ρc = sqrt(-∂p/∂τ)`.
    pub fn acoustic_impedance(&self, w: &ThermoState) -> f64 {
        (-self.dp_dtau(w)).sqrt()
    }

    /// Total `p(base + (dτ, ds)) - p(base)`, accurate for small offsets.
    pub fn pressure_jump(&self, base: &ThermoState, dtau: f64, ds: &[f64]) -> f64 {
        self.species
            .iter()
            .zip(base.s.iter().zip(ds))
            .map(|(sp, (&s0, &d))| sp.pressure_jump(base.tau, s0, dtau, d))
            .sum()
    }

    /// Total `e(base + (dτ, ds)) - e(base)`, accurate for small offsets.
    pub fn energy_jump(&self, base: &ThermoState, dtau: f64, ds: &[f64]) -> f64 {
        self.species
            .iter()
            .zip(base.s.iter().zip(ds))
            .map(|(sp, (&s0, &d))| sp.energy_jump(base.tau, s0, dtau, d))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViscosityMode {
    /// `μ_i = μ_i⁰ T_i`.
    Temperature,
    /// `μ_i = μ_i⁰`.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawViscosity", into = "RawViscosity")]
pub struct ViscositySpec {
    mu0: Vec<f64>,
    mode: ViscosityMode,
}

#[derive(Serialize, Deserialize)]
struct RawViscosity {
    mu0: Vec<f64>,
    mode: ViscosityMode,
}

impl TryFrom<RawViscosity> for ViscositySpec {
    type Error = EosError;
    fn try_from(raw: RawViscosity) -> Result<Self, EosError> {
        ViscositySpec::new(raw.mu0, raw.mode)
    }
}

impl From<ViscositySpec> for RawViscosity {
    fn from(v: ViscositySpec) -> Self {
        RawViscosity { mu0: v.mu0, mode: v.mode }
    }
}

impl ViscositySpec {
    pub fn new(mu0: Vec<f64>, mode: ViscosityMode) -> Result<Self, EosError> {
        for (index, &value) in mu0.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(EosError::NegativeViscosity { index, value });
            }
        }
        if mu0.iter().sum::<f64>() <= 0.0 {
            return Err(EosError::ZeroViscosity);
        }
        Ok(ViscositySpec { mu0, mode })
    }

    pub fn temperature(mu0: Vec<f64>) -> Result<Self, EosError> {
        Self::new(mu0, ViscosityMode::Temperature)
    }

    pub fn constant(mu0: Vec<f64>) -> Result<Self, EosError> {
        Self::new(mu0, ViscosityMode::Constant)
    }

    pub fn mu0(&self) -> &[f64] {
        &self.mu0
    }

    pub fn mode(&self) -> ViscosityMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.mu0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu0.is_empty()
    }

    /// Per-species viscosities `μ_i(τ, s_i)`.
    pub fn coefficients(&self, eos: &EosSpec, w: &ThermoState) -> Vec<f64> {
        match self.mode {
            ViscosityMode::Constant => self.mu0.clone(),
            ViscosityMode::Temperature => self.mu0.iter().zip(eos.temperatures(w)).map(|(m, t)| m * t).collect(),
        }
    }

    /// Unit direction `μ⁰ / ‖μ⁰‖` in entropy space.
    pub fn direction(&self) -> Vec<f64> {
        let n = self.mu0.iter().map(|m| m * m).sum::<f64>().sqrt();
        self.mu0.iter().map(|m| m / n).collect()
    }
}

/// Sampling box for [`validate_hypotheses`]: `τ` is log-spaced, `s` linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationGrid {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub n_s: usize,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        ValidationGrid { tau_min: 0.1, tau_max: 10.0, n_tau: 50, s_min: -2.0, s_max: 2.0, n_s: 50 }
    }
}

impl ValidationGrid {
    pub fn taus(&self) -> Vec<f64> {
        let (a, b) = (self.tau_min.ln(), self.tau_max.ln());
        let n = self.n_tau.max(2);
        (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
    }

    pub fn entropies(&self) -> Vec<f64> {
        let n = self.n_s.max(2);
        (0..n).map(|k| self.s_min + (self.s_max - self.s_min) * k as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst value of the tested quantity (meaning depends on the check).
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<HypothesisCheck>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Relative tolerance for analytic-vs-finite-difference derivative checks.
pub const FD_TOLERANCE: f64 = 1e-6;

fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

fn central<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

struct Tally {
    name: &'static str,
    passed: bool,
    worst: f64,
    detail: String,
}

impl Tally {
    fn new(name: &'static str, worst: f64) -> Self {
        Tally { name, passed: true, worst, detail: String::new() }
    }

    fn fail(&mut self, msg: String) {
        if self.passed {
            self.detail = msg;
        }
        self.passed = false;
    }

    fn finish(self) -> HypothesisCheck {
        HypothesisCheck { name: self.name, passed: self.passed, worst: self.worst, detail: self.detail }
    }
}

/// Check positivity, convexity and asymptotic hypotheses of `eos` on a
/// sampling grid, and compare every analytic derivative with central
/// differences at step `1e-6·max(1, |x|)`. Violations are reported, never
/// raised.
///
/// Asymptotic limits are probed on decades beyond the grid: `τ` from
/// `tau_min·1e-8` to `tau_max·1e8`, and `s` up to `s_max + 60`. Decay of the
/// total pressure at large `τ` must be integrable (log-log slope below -1),
/// since the energy `e = ∫_τ^∞ p dτ'` has to stay finite and vanish there.
pub fn validate_hypotheses(eos: &EosSpec, grid: &ValidationGrid) -> HypothesisReport {
    let taus = grid.taus();
    let ents = grid.entropies();
    let n = eos.len();
    let mut checks = Vec::new();

    let state = |tau: f64, s: f64| ThermoState { tau, s: vec![s; n] };

    // Positivity of p_i, T_i, e_i, c².
    let mut pos = Tally::new("positivity", f64::INFINITY);
    for &tau in &taus {
        for &s in &ents {
            let w = state(tau, s);
            let vals = eos
                .pressures(&w)
                .into_iter()
                .chain(eos.temperatures(&w))
                .chain(eos.energies(&w))
                .chain(std::iter::once(eos.sound_speed_sq(&w)));
            for v in vals {
                pos.worst = pos.worst.min(v);
                if !(v > 0.0 && v.is_finite()) {
                    pos.fail(format!("non-positive value {v} at tau={tau}, s={s}"));
                }
            }
        }
    }
    checks.push(pos.finish());

    // hypH2: ∂p_i/∂s_i > 0.
    let mut h2 = Tally::new("hypH2", f64::INFINITY);
    for &tau in &taus {
        for &s in &ents {
            for sp in eos.species() {
                let v = sp.dp_ds(tau, s);
                h2.worst = h2.worst.min(v);
                if !(v > 0.0) {
                    h2.fail(format!("dp/ds = {v} at tau={tau}, s={s}"));
                }
            }
        }
    }
    checks.push(h2.finish());

    // hypH1: Σ ∂²p_i/∂τ² > 0, plus strict monotonicity of p and ∂p/∂τ along τ.
    let mut h1 = Tally::new("hypH1", f64::INFINITY);
    let mut mono = Tally::new("monotonicity", f64::INFINITY);
    for &s in &ents {
        let mut prev: Option<(f64, f64)> = None;
        for &tau in &taus {
            let w = state(tau, s);
            let v = eos.d2p_dtau2(&w);
            h1.worst = h1.worst.min(v);
            if !(v > 0.0) {
                h1.fail(format!("d2p/dtau2 = {v} at tau={tau}, s={s}"));
            }
            let p = eos.pressure(&w);
            let dp = eos.dp_dtau(&w);
            if let Some((pp, dpp)) = prev {
                mono.worst = mono.worst.min((pp - p).min(dp - dpp));
                if !(p < pp) {
                    mono.fail(format!("p not decreasing at tau={tau}, s={s}"));
                }
                if !(dp > dpp) {
                    mono.fail(format!("dp/dtau not increasing at tau={tau}, s={s}"));
                }
            }
            prev = Some((p, dp));
        }
    }
    checks.push(h1.finish());
    checks.push(mono.finish());

    let decades: Vec<f64> = (0..=8).map(|k| 10f64.powi(k)).collect();

    // hypH3: p → ∞ as τ → 0, p → 0 integrably as τ → ∞.
    let mut h3 = Tally::new("hypH3", f64::NEG_INFINITY);
    for &s in &ents {
        let small: Vec<f64> = decades.iter().map(|d| eos.pressure(&state(grid.tau_min / d, s))).collect();
        let large: Vec<f64> = decades.iter().map(|d| eos.pressure(&state(grid.tau_max * d, s))).collect();
        if !small.windows(2).all(|w| w[1] > w[0]) || !(small[8] > 1e6 * small[0]) {
            h3.fail(format!("total pressure does not blow up as tau -> 0 (s={s})"));
        }
        if !large.windows(2).all(|w| w[1] < w[0]) || !(large[8] < 1e-6 * large[0]) {
            h3.fail(format!("total pressure does not vanish as tau -> inf (s={s})"));
        }
        let tau_far = grid.tau_max * 1e8;
        let lp = |lt: f64| eos.pressure(&state(lt.exp(), s)).ln();
        let slope = central(lp, tau_far.ln(), 1e-3);
        h3.worst = h3.worst.max(slope);
        if !(slope < -1.0 - 1e-9) {
            h3.fail(format!("pressure decay slope {slope} at tau={tau_far} is not integrable (s={s})"));
        }
    }
    checks.push(h3.finish());

    // hypH4: Σ ∂p_i/∂τ → -∞ at 0 and → 0 at ∞.
    let mut h4 = Tally::new("hypH4", 0.0);
    for &s in &ents {
        let small: Vec<f64> = decades.iter().map(|d| eos.dp_dtau(&state(grid.tau_min / d, s))).collect();
        let large: Vec<f64> = decades.iter().map(|d| eos.dp_dtau(&state(grid.tau_max * d, s))).collect();
        h4.worst = h4.worst.min(large[8].abs().max(-small[8].recip()));
        if !small.windows(2).all(|w| w[1] < w[0]) || !(small[8] < 1e6 * small[0]) {
            h4.fail(format!("dp/dtau does not diverge to -inf as tau -> 0 (s={s})"));
        }
        if !large.windows(2).all(|w| w[1] > w[0] && w[1] < 0.0) || !(large[8].abs() < 1e-6 * large[0].abs()) {
            h4.fail(format!("dp/dtau does not vanish as tau -> inf (s={s})"));
        }
    }
    checks.push(h4.finish());

    // hypH5: ∂p_i/∂τ → -∞ as s_i → ∞.
    let mut h5 = Tally::new("hypH5", 0.0);
    for &tau in &taus {
        for sp in eos.species() {
            let seq: Vec<f64> = (0..=6).map(|k| sp.dp_dtau(tau, grid.s_max + 10.0 * k as f64)).collect();
            h5.worst = h5.worst.min(seq[6]);
            if !seq.windows(2).all(|w| w[1] < w[0]) || !(seq[6] < 1e6 * seq[0]) {
                h5.fail(format!("dp_i/dtau does not diverge as s_i -> inf at tau={tau}"));
            }
        }
    }
    checks.push(h5.finish());

    // Energy asymptotics: e → ∞ as τ → 0, e → 0 as τ → ∞, e → ∞ as s → ∞,
    // read off far-field log-log slopes. The worst value is the largest slope
    // that should be negative.
    let mut t1 = Tally::new("energy_limits", f64::NEG_INFINITY);
    let slope = |e1: f64, e2: f64, dx: f64| (e2 / e1).ln() / dx;
    for &s in &ents {
        let e = |tau: f64, s: f64| eos.internal_energy(&state(tau, s));
        let small = slope(e(grid.tau_min * 1e-8, s), e(grid.tau_min * 1e-6, s), (1e2f64).ln());
        let large = slope(e(grid.tau_max * 1e6, s), e(grid.tau_max * 1e8, s), (1e2f64).ln());
        let hot = -slope(e(grid.tau_min, s + 40.0), e(grid.tau_min, s + 60.0), 20.0);
        let parts = [small, large, hot];
        let worst = parts.into_iter().fold(f64::NEG_INFINITY, f64::max);
        t1.worst = t1.worst.max(worst);
        if parts.iter().any(|x| !x.is_finite()) || !(worst < -1e-3) {
            t1.fail(format!("energy limits violated at s={s}"));
        }
    }
    checks.push(t1.finish());

    // Finite-difference consistency: Maxwell relations and τ-derivatives.
    let mut fd_p = Tally::new("maxwell_pressure", 0.0);
    let mut fd_t = Tally::new("maxwell_temperature", 0.0);
    let mut fd_dp = Tally::new("fd_dp_dtau", 0.0);
    let mut fd_d2p = Tally::new("fd_d2p_dtau2", 0.0);
    let mut fd_ps = Tally::new("fd_dp_ds", 0.0);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(f64::MIN_POSITIVE);
    for &tau in &taus {
        for &s in &ents {
            let ht = fd_step(tau);
            let hs = fd_step(s);
            for sp in eos.species() {
                let cases: [(&mut Tally, f64, f64); 5] = [
                    (&mut fd_p, sp.pressure(tau, s), -central(|x| sp.energy(x, s), tau, ht)),
                    (&mut fd_t, sp.temperature(tau, s), central(|x| sp.energy(tau, x), s, hs)),
                    (&mut fd_dp, sp.dp_dtau(tau, s), central(|x| sp.pressure(x, s), tau, ht)),
                    (&mut fd_d2p, sp.d2p_dtau2(tau, s), central(|x| sp.dp_dtau(x, s), tau, ht)),
                    (&mut fd_ps, sp.dp_ds(tau, s), central(|x| sp.pressure(tau, x), s, hs)),
                ];
                for (tally, analytic, fd) in cases {
                    let r = rel(analytic, fd);
                    tally.worst = tally.worst.max(r);
                    if !(r <= FD_TOLERANCE) {
                        tally.fail(format!("analytic {analytic} vs fd {fd} at tau={tau}, s={s}"));
                    }
                }
            }
        }
    }
    for t in [fd_p, fd_t, fd_dp, fd_d2p, fd_ps] {
        checks.push(t.finish());
    }

    HypothesisReport { checks }
}

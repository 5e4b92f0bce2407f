//! Reachable end states of viscous shock profiles.
//!
//! With `ω_L`, the mass flux `m` and the law fixed, the end state of a
//! profile is pinned down by two scalar equations, `F = 0` and `H = 0`, in
//! the unknowns `(τ, s)`. Everything here reduces to scalar root finding on
//! intervals where the sign change and monotonicity are known.
//!
//! Entropies are passed as offsets `ds = s - s_L`, so that small jumps keep
//! their relative accuracy.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eos::{EosError, EosSpec, ThermoState};
use crate::roots::{bisect, expand, polish, Root, RootError, Tolerance};

/// Default seed for direction sampling.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Samples whose `Λ̄ - Λ₀` falls below this (relative) are flagged.
pub const REDUCED_PRECISION_GAP: f64 = 1e-8;

const ROOT_TOL: Tolerance = Tolerance { rel: 1e-13, abs: 0.0, max_iter: 400 };
const POLISH_STEPS: usize = 3;
const EXPANSION_STEPS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EndStateError {
    #[error("lax_violated: mass flux {m} does not exceed the acoustic impedance {impedance}")]
    LaxViolated { m: f64, impedance: f64 },
    #[error("domain_error: lambda = {lambda} exceeds Lambda0 = {lambda0}")]
    Domain { lambda: f64, lambda0: f64 },
    #[error("invalid cone direction: {0}")]
    Direction(String),
    #[error(transparent)]
    Bracket(#[from] RootError),
    #[error(transparent)]
    Eos(#[from] EosError),
}

impl EndStateError {
    pub fn code(&self) -> &'static str {
        match self {
            EndStateError::LaxViolated { .. } => "lax_violated",
            EndStateError::Domain { .. } => "domain_error",
            EndStateError::Direction(_) => "invalid_input",
            EndStateError::Bracket(e) => e.code(),
            EndStateError::Eos(e) => e.code(),
        }
    }
}

/// A nonnegative unit vector of entropy space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ConeDirection(Vec<f64>);

impl TryFrom<Vec<f64>> for ConeDirection {
    type Error = EndStateError;
    fn try_from(v: Vec<f64>) -> Result<Self, EndStateError> {
        ConeDirection::new(v)
    }
}

impl From<ConeDirection> for Vec<f64> {
    fn from(a: ConeDirection) -> Self {
        a.0
    }
}

impl ConeDirection {
    /// Normalizes `v`, which must be nonnegative and nonzero.
    pub fn new(v: Vec<f64>) -> Result<Self, EndStateError> {
        if v.is_empty() {
            return Err(EndStateError::Direction("empty vector".into()));
        }
        if let Some(x) = v.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(EndStateError::Direction(format!("component {x} is negative or non-finite")));
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(EndStateError::Direction("zero vector".into()));
        }
        Ok(ConeDirection(v.into_iter().map(|x| x / n).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, lambda: f64) -> Vec<f64> {
        self.0.iter().map(|a| lambda * a).collect()
    }
}

/// Roots of `τ ↦ F(τ, s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRoots {
    None,
    /// Double root at `τ̄(s)`.
    One(f64),
    Pair {
        minus: f64,
        plus: f64,
    },
}

/// Roots of `τ ↦ H(τ, s)`, ordered `check < mid < hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HRoots {
    pub check: f64,
    pub mid: f64,
    pub hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldSample {
    pub a: ConeDirection,
    pub lambda0: f64,
    pub lambda_bar: f64,
    pub tau_r: f64,
    pub s_r: Vec<f64>,
    /// `Λ₀` sits within [`REDUCED_PRECISION_GAP`] of `Λ̄`, where the two
    /// roots of `F` merge and `τ_R` loses half its digits.
    pub reduced_precision: bool,
}

/// The fixed data `(law, ω_L, m)` shared by every end-state query.
#[derive(Debug, Clone)]
pub struct EndStateContext {
    eos: EosSpec,
    omega_l: ThermoState,
    m: f64,
    m2: f64,
    p_l: f64,
}

impl EndStateContext {
    pub fn new(eos: EosSpec, omega_l: ThermoState, m: f64) -> Result<Self, EndStateError> {
        eos.check_state(&omega_l)?;
        let impedance = eos.acoustic_impedance(&omega_l);
        if !(m > impedance && m.is_finite()) {
            return Err(EndStateError::LaxViolated { m, impedance });
        }
        let p_l = eos.pressure(&omega_l);
        Ok(EndStateContext { eos, omega_l, m, m2: m * m, p_l })
    }

    pub fn eos(&self) -> &EosSpec {
        &self.eos
    }

    pub fn omega_l(&self) -> &ThermoState {
        &self.omega_l
    }

    pub fn mass_flux(&self) -> f64 {
        self.m
    }

    pub fn tau_l(&self) -> f64 {
        self.omega_l.tau
    }

    pub fn p_l(&self) -> f64 {
        self.p_l
    }

    /// `m²τ_L + p_L`, the natural size of `F`.
    pub fn scale(&self) -> f64 {
        self.m2 * self.omega_l.tau + self.p_l
    }

    /// `m - ρ_L c_L`.
    pub fn lax_margin(&self) -> f64 {
        self.m - self.eos.acoustic_impedance(&self.omega_l)
    }

    pub fn state(&self, tau: f64, ds: &[f64]) -> ThermoState {
        let s = self.omega_l.s.iter().zip(ds).map(|(s, d)| s + d).collect();
        ThermoState { tau, s }
    }

    /// `F(τ, s) = p(τ, s) - p_L + m²(τ - τ_L)`.
    pub fn f_value(&self, tau: f64, ds: &[f64]) -> f64 {
        self.f_offset(tau - self.omega_l.tau, ds)
    }

    /// `F` at `(τ_L + dτ, s_L + ds)`.
    pub fn f_offset(&self, dtau: f64, ds: &[f64]) -> f64 {
        self.eos.pressure_jump(&self.omega_l, dtau, ds) + self.m2 * dtau
    }

    pub fn f_tau(&self, tau: f64, ds: &[f64]) -> f64 {
        self.eos.dp_dtau(&self.state(tau, ds)) + self.m2
    }

    /// `H(τ, s) = e - e_L - (m²/2)(τ² - τ_L²) + (m²τ_L + p_L)(τ - τ_L)`.
    pub fn h_value(&self, tau: f64, ds: &[f64]) -> f64 {
        self.h_offset(tau - self.omega_l.tau, ds)
    }

    /// `H` at `(τ_L + dτ, s_L + ds)`.
    pub fn h_offset(&self, dtau: f64, ds: &[f64]) -> f64 {
        self.eos.energy_jump(&self.omega_l, dtau, ds) + dtau * (self.p_l - 0.5 * self.m2 * dtau)
    }

    /// Minimizer of `τ ↦ F(τ, s)`.
    pub fn tau_bar(&self, ds: &[f64]) -> Result<f64, EndStateError> {
        let g = |t: f64| self.f_tau(t, ds);
        let t0 = self.omega_l.tau;
        let lo = expand(t0, 0.5, EXPANSION_STEPS, |t| g(t) < 0.0)?;
        let hi = expand(t0, 2.0, EXPANSION_STEPS, |t| g(t) > 0.0)?;
        let root = bisect(g, lo, hi, ROOT_TOL)?;
        let d2 = |t: f64| self.eos.d2p_dtau2(&self.state(t, ds));
        Ok(polish(g, d2, root, POLISH_STEPS).x)
    }

    fn f_root(&self, ds: &[f64], lo: f64, hi: f64) -> Result<Root, EndStateError> {
        let f = |t: f64| self.f_value(t, ds);
        let root = bisect(f, lo, hi, ROOT_TOL)?;
        Ok(polish(f, |t| self.f_tau(t, ds), root, POLISH_STEPS))
    }

    /// Classify and compute the roots of `τ ↦ F(τ, s)`.
    pub fn tau_roots(&self, ds: &[f64]) -> Result<TauRoots, EndStateError> {
        let tb = self.tau_bar(ds)?;
        self.tau_roots_from(ds, tb)
    }

    fn tau_roots_from(&self, ds: &[f64], tb: f64) -> Result<TauRoots, EndStateError> {
        let fb = self.f_value(tb, ds);
        if fb > 0.0 {
            return Ok(TauRoots::None);
        }
        if fb == 0.0 {
            return Ok(TauRoots::One(tb));
        }
        let lo = expand(0.5 * tb, 0.5, EXPANSION_STEPS, |t| self.f_value(t, ds) > 0.0)?;
        let minus = self.f_root(ds, lo, tb)?.x;
        let plus = if ds.iter().all(|d| *d == 0.0) {
            self.omega_l.tau
        } else {
            let hi = expand(2.0 * tb, 2.0, EXPANSION_STEPS, |t| self.f_value(t, ds) > 0.0)?;
            self.f_root(ds, tb, hi)?.x
        };
        Ok(TauRoots::Pair { minus, plus })
    }

    /// Root of `λ ↦ ∂p/∂τ(τ_L, s_L + λa) + m²`; an upper bound for `Λ̄(a)`.
    pub fn lambda_star(&self, a: &ConeDirection) -> Result<f64, EndStateError> {
        let tl = self.omega_l.tau;
        let theta = |l: f64| self.f_tau(tl, &a.scaled(l));
        let hi = expand(1.0, 2.0, EXPANSION_STEPS, |l| theta(l) < 0.0)?;
        Ok(bisect(theta, 0.0, hi, ROOT_TOL)?.x)
    }

    /// `φ(λ) = F(τ̄(s), s)` at `s = s_L + λa`.
    fn phi(&self, a: &ConeDirection, lambda: f64) -> f64 {
        let ds = a.scaled(lambda);
        match self.tau_bar(&ds) {
            Ok(tb) => self.f_value(tb, &ds),
            Err(_) => f64::NAN,
        }
    }

    /// Largest `λ` along `a` for which `F(·, s_L + λa)` still has a root.
    pub fn lambda_bar(&self, a: &ConeDirection) -> Result<f64, EndStateError> {
        let upper = self.lambda_star(a)?;
        let phi = |l: f64| self.phi(a, l);
        let root = bisect(phi, 0.0, upper, ROOT_TOL)?;
        let dphi = |l: f64| {
            let ds = a.scaled(l);
            let tb = self.tau_bar(&ds).unwrap_or(f64::NAN);
            let dp = self.eos.dp_ds(&self.state(tb, &ds));
            dp.iter().zip(a.as_slice()).map(|(p, a)| p * a).sum::<f64>()
        };
        Ok(polish(phi, dphi, root, POLISH_STEPS).x)
    }

    /// `τ⁻(s)`, or `τ̄(s)` where the two roots merged or vanished.
    fn tau_minus_or_bar(&self, ds: &[f64]) -> Result<f64, EndStateError> {
        let tb = self.tau_bar(ds)?;
        Ok(match self.tau_roots_from(ds, tb)? {
            TauRoots::Pair { minus, .. } => minus,
            _ => tb,
        })
    }

    /// `Φ(λ) = H(τ⁻(s), s)` at `s = s_L + λa`.
    fn big_phi(&self, a: &ConeDirection, lambda: f64) -> f64 {
        let ds = a.scaled(lambda);
        match self.tau_minus_or_bar(&ds) {
            Ok(t) => self.h_value(t, &ds),
            Err(_) => f64::NAN,
        }
    }

    /// Entropy jump size `Λ₀(a)` of the profile end state along `a`, together
    /// with `Λ̄(a)` and `τ_R`.
    pub fn end_state(&self, a: &ConeDirection) -> Result<ManifoldSample, EndStateError> {
        if a.len() != self.eos.len() {
            return Err(EndStateError::Direction(format!(
                "direction has {} components, expected {}",
                a.len(),
                self.eos.len()
            )));
        }
        let lambda_bar = self.lambda_bar(a)?;
        let f = |l: f64| self.big_phi(a, l);
        let root = bisect(f, 0.0, lambda_bar, ROOT_TOL)?;
        let df = |l: f64| {
            let ds = a.scaled(l);
            let t = self.tau_minus_or_bar(&ds).unwrap_or(f64::NAN);
            let temps = self.eos.temperatures(&self.state(t, &ds));
            temps.iter().zip(a.as_slice()).map(|(t, a)| t * a).sum::<f64>()
        };
        let lambda0 = polish(f, df, root, POLISH_STEPS).x;
        let ds = a.scaled(lambda0);
        let tau_r = self.tau_minus_or_bar(&ds)?;
        let s_r = self.state(tau_r, &ds).s;
        let reduced_precision = lambda_bar - lambda0 <= REDUCED_PRECISION_GAP * lambda_bar.max(1.0);
        Ok(ManifoldSample { a: a.clone(), lambda0, lambda_bar, tau_r, s_r, reduced_precision })
    }

    pub fn lambda0(&self, a: &ConeDirection) -> Result<f64, EndStateError> {
        Ok(self.end_state(a)?.lambda0)
    }

    /// The three roots of `τ ↦ H(τ, s_L + λa)` for `0 ≤ λ ≤ Λ₀(a)`.
    pub fn h_roots_along(&self, a: &ConeDirection, lambda: f64) -> Result<HRoots, EndStateError> {
        let lambda0 = self.lambda0(a)?;
        if !(lambda >= 0.0) || lambda > lambda0 * (1.0 + 1e-12) {
            return Err(EndStateError::Domain { lambda, lambda0 });
        }
        let ds = a.scaled(lambda);
        let h = |t: f64| self.h_value(t, &ds);
        let dh = |t: f64| -self.f_value(t, &ds);
        let root = |lo: f64, hi: f64| -> Result<f64, EndStateError> {
            let r = bisect(h, lo, hi, ROOT_TOL)?;
            Ok(polish(h, dh, r, POLISH_STEPS).x)
        };
        let (minus, plus) = match self.tau_roots(&ds)? {
            TauRoots::Pair { minus, plus } => (minus, plus),
            TauRoots::One(t) => (t, t),
            TauRoots::None => return Err(EndStateError::Domain { lambda, lambda0 }),
        };
        let lo = expand(0.5 * minus, 0.5, EXPANSION_STEPS, |t| h(t) > 0.0)?;
        let hi = expand(2.0 * plus, 2.0, EXPANSION_STEPS, |t| h(t) < 0.0)?;
        let hat = if lambda == 0.0 { plus } else { root(plus, hi)? };
        let (check, mid) = if lambda >= lambda0 {
            (minus, minus)
        } else if lambda == 0.0 {
            (root(lo, minus)?, plus)
        } else {
            (root(lo, minus)?, root(minus, plus)?)
        };
        Ok(HRoots { check, mid, hat })
    }

    /// [`Self::h_roots_along`] for an offset `ds = λa`.
    pub fn h_roots(&self, ds: &[f64]) -> Result<HRoots, EndStateError> {
        let lambda = ds.iter().map(|d| d * d).sum::<f64>().sqrt();
        if lambda == 0.0 {
            let a = ConeDirection::new(vec![1.0; ds.len()])?;
            return self.h_roots_along(&a, 0.0);
        }
        let a = ConeDirection::new(ds.to_vec())?;
        self.h_roots_along(&a, lambda)
    }
}

/// Evaluate [`EndStateContext::end_state`] for every direction in parallel.
/// Failures stay in place so the output lines up with the input.
pub fn sample_manifold(
    ctx: &EndStateContext,
    directions: &[ConeDirection],
) -> Vec<Result<ManifoldSample, EndStateError>> {
    directions.par_iter().map(|a| ctx.end_state(a)).collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

/// `count` deterministic directions in the nonnegative cone of `R^n`.
///
/// One direction for `n = 1`; equispaced angles on the quarter circle for
/// `n = 2`; for `n ≥ 3`, Halton points with a seeded random shift, mapped
/// into the open cube and normalized.
pub fn cone_directions(n: usize, count: usize, seed: u64) -> Vec<ConeDirection> {
    match n {
        0 => Vec::new(),
        1 => vec![ConeDirection(vec![1.0])],
        2 => (0..count)
            .map(|j| {
                let th = if count == 1 {
                    std::f64::consts::FRAC_PI_4
                } else {
                    std::f64::consts::FRAC_PI_2 * j as f64 / (count - 1) as f64
                };
                ConeDirection(vec![th.cos().max(0.0), th.sin().max(0.0)])
            })
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            (1..=count as u64)
                .map(|i| {
                    let v = (0..n)
                        .map(|d| {
                            let base = PRIMES[d % PRIMES.len()] + 2 * (d / PRIMES.len()) as u64 * 97;
                            let x = (radical_inverse(i, base) + shift[d]).fract();
                            x.max(1e-12)
                        })
                        .collect();
                    ConeDirection::new(v).expect("positive components")
                })
                .collect()
        }
    }
}

/// Write `a_1..a_N,lambda0,lambda_bar,tau_R,s_R_1..s_R_N`, one row per sample.
pub fn write_manifold_csv<W: Write>(mut w: W, n: usize, samples: &[ManifoldSample]) -> io::Result<()> {
    let mut head: Vec<String> = (1..=n).map(|i| format!("a_{i}")).collect();
    head.extend(["lambda0".into(), "lambda_bar".into(), "tau_R".into()]);
    head.extend((1..=n).map(|i| format!("s_R_{i}")));
    writeln!(w, "{}", head.join(","))?;
    for s in samples {
        let row: Vec<String> =
            s.a.as_slice()
                .iter()
                .chain([s.lambda0, s.lambda_bar, s.tau_r].iter())
                .chain(s.s_r.iter())
                .map(|x| format!("{x:.16e}"))
                .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(n: usize, m2: f64) -> EndStateContext {
        let eos = EosSpec::uniform(n, 1.4, 1.0).unwrap();
        EndStateContext::new(eos, ThermoState::new(1.0, vec![0.0; n]).unwrap(), m2.sqrt()).unwrap()
    }

    #[test]
    fn tau_bar_closed_form() {
        let c = ctx(1, 2.8);
        assert_relative_eq!(c.tau_bar(&[0.0]).unwrap(), 0.749_153_538_438_340_7, max_relative = 1e-13);
        assert!(c.tau_bar(&[0.0]).unwrap() < c.tau_l());
    }

    #[test]
    fn tau_roots_at_base_state() {
        let c = ctx(1, 2.8);
        match c.tau_roots(&[0.0]).unwrap() {
            TauRoots::Pair { minus, plus } => {
                assert_eq!(plus, 1.0);
                assert_relative_eq!(minus, 0.567_229_841_213_781_1, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(c.tau_roots(&[5.0]).unwrap(), TauRoots::None);
    }

    #[test]
    fn single_species_matches_normal_shock() {
        let c = ctx(1, 2.8);
        let s = c.end_state(&ConeDirection::new(vec![1.0]).unwrap()).unwrap();
        assert_relative_eq!(s.lambda0, 0.018_594_787_207_719_928, max_relative = 1e-10);
        assert_relative_eq!(s.tau_r, 7.0 / 12.0, max_relative = 1e-10);
        assert_relative_eq!(s.lambda_bar, 0.132_471_537_724_332_93, max_relative = 1e-10);
    }

    #[test]
    fn symmetric_pair_golden_values() {
        let c = ctx(2, 5.6);
        let a = ConeDirection::new(vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(c.lambda_star(&a).unwrap(), 0.980_258_143_468_547_2, max_relative = 1e-11);
        let s = c.end_state(&a).unwrap();
        assert_relative_eq!(s.lambda_bar, 0.187_343_045_278_170_72, max_relative = 1e-10);
        assert_relative_eq!(s.lambda0, 0.026_297_000_258_599_256, max_relative = 1e-10);
        assert_relative_eq!(s.s_r[0], s.s_r[1], max_relative = 1e-14);
        assert!(!s.reduced_precision);
    }

    #[test]
    fn exchange_symmetry() {
        let c = ctx(2, 5.6);
        let l1 = c.lambda0(&ConeDirection::new(vec![0.3, 0.8]).unwrap()).unwrap();
        let l2 = c.lambda0(&ConeDirection::new(vec![0.8, 0.3]).unwrap()).unwrap();
        assert_relative_eq!(l1, l2, max_relative = 1e-11);
    }

    #[test]
    fn degenerate_direction_keeps_species_entropy() {
        let c = ctx(2, 5.6);
        let s = c.end_state(&ConeDirection::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(s.s_r[0], 0.0);
        assert!(s.s_r[1] > 0.0);
    }

    #[test]
    fn h_roots_special_points() {
        let c = ctx(2, 5.6);
        let a = ConeDirection::new(vec![1.0, 2.0]).unwrap();
        let r0 = c.h_roots_along(&a, 0.0).unwrap();
        assert_eq!(r0.mid, 1.0);
        assert_eq!(r0.hat, 1.0);
        assert!(r0.check < r0.mid);
        let l0 = c.lambda0(&a).unwrap();
        let rc = c.h_roots_along(&a, l0).unwrap();
        assert_eq!(rc.check, rc.mid);
        let rm = c.h_roots_along(&a, 0.5 * l0).unwrap();
        let TauRoots::Pair { minus, plus } = c.tau_roots(&a.scaled(0.5 * l0)).unwrap() else { panic!() };
        assert!(rm.check < minus && minus < rm.mid && rm.mid < plus && plus < rm.hat);
        assert!(matches!(c.h_roots_along(&a, 2.0 * l0), Err(EndStateError::Domain { .. })));
    }

    #[test]
    fn lax_violation_is_rejected() {
        let eos = EosSpec::uniform(1, 1.4, 1.0).unwrap();
        let w = ThermoState::new(1.0, vec![0.0]).unwrap();
        assert!(matches!(EndStateContext::new(eos, w, 1.0), Err(EndStateError::LaxViolated { .. })));
    }

    #[test]
    fn directions_are_valid_and_deterministic() {
        for n in 1..=5 {
            let d = cone_directions(n, 16, DEFAULT_SEED);
            for a in &d {
                let norm: f64 = a.as_slice().iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-14);
                assert!(a.as_slice().iter().all(|x| *x >= 0.0));
            }
            assert_eq!(d, cone_directions(n, 16, DEFAULT_SEED));
        }
        assert_eq!(cone_directions(2, 64, 1).len(), 64);
        assert_ne!(cone_directions(3, 4, 1), cone_directions(3, 4, 2));
    }

    #[test]
    fn manifold_csv_header() {
        let c = ctx(2, 5.6);
        let dirs = cone_directions(2, 3, DEFAULT_SEED);
        let samples: Vec<_> = sample_manifold(&c, &dirs).into_iter().map(Result::unwrap).collect();
        let mut buf = Vec::new();
        write_manifold_csv(&mut buf, 2, &samples).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "a_1,a_2,lambda0,lambda_bar,tau_R,s_R_1,s_R_2");
        assert_eq!(lines.count(), 3);
    }
}

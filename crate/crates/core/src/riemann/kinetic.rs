//! Kinetic functions: the entropy dissipation `Φ(u0, Λ)` prescribed across a
//! shock of speed `Λ` based at `u0`.
//!
//! The base state is the upstream one: the left state for the first family,
//! the right state for the last. The jump relation then reads
//! `-Λ(u1 - u0) + f(u1) - f(u0) = Φ(u0, Λ)` for both families.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::system::{ConservationSystem, MultiPressureEuler};
use super::RiemannError;
use crate::endstate::{ConeDirection, EndStateContext, ManifoldSample};
use crate::eos::EosSpec;

pub trait KineticFunction: Send + Sync {
    /// Index of the attached characteristic family (0-based, sorted speeds).
    fn family(&self) -> usize;

    /// `-1` if admissible speeds lie below `λ_j(u0)`, `+1` if above.
    fn lax_sign(&self) -> f64;

    fn phi(&self, u0: &DVector<f64>, lambda: f64) -> Result<DVector<f64>, RiemannError>;
}

/// `Φ ≡ 0`: classical Rankine–Hugoniot relations.
#[derive(Debug, Clone, Copy)]
pub struct ZeroKinetic {
    pub dim: usize,
    pub family: usize,
}

impl ZeroKinetic {
    pub fn first(dim: usize) -> Self {
        ZeroKinetic { dim, family: 0 }
    }

    pub fn last(dim: usize) -> Self {
        ZeroKinetic { dim, family: dim - 1 }
    }
}

impl KineticFunction for ZeroKinetic {
    fn family(&self) -> usize {
        self.family
    }

    fn lax_sign(&self) -> f64 {
        if self.family == 0 {
            -1.0
        } else {
            1.0
        }
    }

    fn phi(&self, _u0: &DVector<f64>, _lambda: f64) -> Result<DVector<f64>, RiemannError> {
        Ok(DVector::zeros(self.dim))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    First,
    Last,
}

/// Dissipation selected by viscous profiles with viscosity direction `a`
/// for the multi-pressure Euler equations: `Φ = (0, 0, m Λ₀(a) a)` with
/// `m = ρ0(u0 - Λ)`, and `Λ₀` computed for the upstream state and `|m|`.
#[derive(Debug, Clone)]
pub struct TravelingWaveKinetic {
    pub system: MultiPressureEuler,
    pub a: ConeDirection,
    pub side: Side,
}

/// Relative excess over `ρc` below which the shock has zero strength.
pub const SONIC_SLACK: f64 = 1e-12;

impl TravelingWaveKinetic {
    pub fn new(eos: EosSpec, a: ConeDirection, side: Side) -> Self {
        TravelingWaveKinetic { system: MultiPressureEuler::new(eos), a, side }
    }

    /// Signed mass flux through the shock and the end state, `None` for a
    /// zero-strength (or inadmissible) speed.
    pub fn end_state(&self, u0: &DVector<f64>, lambda: f64) -> Result<Option<(f64, ManifoldSample)>, RiemannError> {
        let (rho, v, w) = self.system.decode(u0);
        let m = rho * (v - lambda);
        let impedance = self.system.eos.acoustic_impedance(&w);
        let upstream = match self.side {
            Side::First => m > 0.0,
            Side::Last => m < 0.0,
        };
        if !upstream || m.abs() <= impedance * (1.0 + SONIC_SLACK) {
            return Ok(None);
        }
        let ctx = EndStateContext::new(self.system.eos.clone(), w, m.abs())?;
        Ok(Some((m, ctx.end_state(&self.a)?)))
    }
}

impl KineticFunction for TravelingWaveKinetic {
    fn family(&self) -> usize {
        match self.side {
            Side::First => 0,
            Side::Last => self.system.dim() - 1,
        }
    }

    fn lax_sign(&self) -> f64 {
        match self.side {
            Side::First => -1.0,
            Side::Last => 1.0,
        }
    }

    fn phi(&self, u0: &DVector<f64>, lambda: f64) -> Result<DVector<f64>, RiemannError> {
        let mut out = DVector::zeros(self.system.dim());
        if let Some((m, sample)) = self.end_state(u0, lambda)? {
            for (i, a) in self.a.as_slice().iter().enumerate() {
                out[2 + i] = m * sample.lambda0 * a;
            }
        }
        Ok(out)
    }
}

/// `Φ` in the `(u₋, u₊)` form: the speed comes from the mass jump and the
/// base is the upstream state of the attached family.
pub fn phi_between<S, K>(
    sys: &S,
    kin: &K,
    u_minus: &DVector<f64>,
    u_plus: &DVector<f64>,
) -> Result<(f64, DVector<f64>), RiemannError>
where
    S: ConservationSystem + ?Sized,
    K: KineticFunction + ?Sized,
{
    let f_minus = sys.flux(u_minus);
    let f_plus = sys.flux(u_plus);
    let drho = u_plus[0] - u_minus[0];
    if drho == 0.0 {
        return Err(RiemannError::Invalid("states have equal density; speed undefined".into()));
    }
    let lambda = (f_plus[0] - f_minus[0]) / drho;
    let base = if kin.family() == 0 { u_minus } else { u_plus };
    Ok((lambda, kin.phi(base, lambda)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticReport {
    /// Estimate of the constant in `|l·∂_ΛΦ| ≤ c₁|Λ - λ_j|`.
    pub c1: f64,
    /// Estimate of the constant in `|l·Φ| ≤ c₂|Λ - λ_j|²`.
    pub c2: f64,
    /// Largest `‖Φ(u, λ_j(u))‖` over the states.
    pub base_residual: f64,
    pub c1_bounded: bool,
    pub c2_bounded: bool,
    pub passed: bool,
}

/// Tolerance on `‖Φ(u, λ_j(u))‖`.
pub const BASE_TOLERANCE: f64 = 1e-9;

/// Estimate `c₁` and `c₂` over `states × offsets`, with speeds
/// `Λ = λ_j(u) + lax_sign·δ`. A constant counts as bounded when the ratios
/// at the smallest offset do not exceed ten times those at the others.
pub fn validate_kinetic_function<S, K>(
    sys: &S,
    kin: &K,
    states: &[DVector<f64>],
    offsets: &[f64],
) -> Result<KineticReport, RiemannError>
where
    S: ConservationSystem + ?Sized,
    K: KineticFunction + ?Sized,
{
    let j = kin.family();
    let sign = kin.lax_sign();
    let mut offs: Vec<f64> = offsets.to_vec();
    offs.sort_by(|a, b| b.total_cmp(a));
    let smallest = offs.last().copied().unwrap_or(0.0);

    let mut base_residual: f64 = 0.0;
    let (mut c1_in, mut c1_out, mut c2_in, mut c2_out) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for u in states {
        let lam = sys.eigenvalues(u)[j];
        let l = sys.left_eigenvectors(u).row(j).transpose();
        base_residual = base_residual.max(kin.phi(u, lam)?.norm());
        for &d in &offs {
            let big = lam + sign * d;
            let r2 = l.dot(&kin.phi(u, big)?).abs() / (d * d);
            let h = 1e-3 * d;
            let dphi = (kin.phi(u, big + h)? - kin.phi(u, big - h)?) / (2.0 * h);
            let r1 = l.dot(&dphi).abs() / d;
            if d == smallest {
                c1_in = c1_in.max(r1);
                c2_in = c2_in.max(r2);
            } else {
                c1_out = c1_out.max(r1);
                c2_out = c2_out.max(r2);
            }
        }
    }
    let bounded = |inner: f64, outer: f64| inner <= 10.0 * outer || inner == 0.0;
    let c1_bounded = bounded(c1_in, c1_out) && (c1_in.is_finite());
    let c2_bounded = bounded(c2_in, c2_out) && (c2_in.is_finite());
    Ok(KineticReport {
        c1: c1_in.max(c1_out),
        c2: c2_in.max(c2_out),
        base_residual,
        c1_bounded,
        c2_bounded,
        passed: c1_bounded && c2_bounded && base_residual <= BASE_TOLERANCE,
    })
}

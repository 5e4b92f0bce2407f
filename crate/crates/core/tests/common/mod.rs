//! Helpers shared by the integration tests: an exact Riemann solver for the
//! polytropic Euler equations written from scratch in primitive variables,
//! and seeded generators of random problems.

#![allow(dead_code)]

use kinrel::eos::{EosSpec, Species, ThermoState, ViscosityMode, ViscositySpec};
use kinrel::profile::ProfileProblem;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

/// Pressure function of one side and its derivative.
fn side_function(gamma: f64, k: Primitive, p: f64) -> (f64, f64) {
    let c = (gamma * k.p / k.rho).sqrt();
    if p > k.p {
        let a = 2.0 / ((gamma + 1.0) * k.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * k.p;
        let q = (a / (p + b)).sqrt();
        ((p - k.p) * q, q * (1.0 - 0.5 * (p - k.p) / (p + b)))
    } else {
        let e = (gamma - 1.0) / (2.0 * gamma);
        let r = (p / k.p).powf(e);
        (2.0 * c / (gamma - 1.0) * (r - 1.0), r / (k.rho * c) * (k.p / p))
    }
}

/// Star pressure and velocity by Newton iteration on the pressure function.
pub fn exact_star(gamma: f64, l: Primitive, r: Primitive) -> (f64, f64) {
    let cl = (gamma * l.p / l.rho).sqrt();
    let cr = (gamma * r.p / r.rho).sqrt();
    // Primitive-variable linearization as the starting guess.
    let guess = 0.5 * (l.p + r.p) - 0.125 * (r.u - l.u) * (l.rho + r.rho) * (cl + cr);
    let mut p = guess.max(1e-8 * l.p.min(r.p));
    for _ in 0..100 {
        let (fl, dl) = side_function(gamma, l, p);
        let (fr, dr) = side_function(gamma, r, p);
        let next = (p - (fl + fr + r.u - l.u) / (dl + dr)).max(1e-14 * p);
        let change = 2.0 * (next - p).abs() / (next + p);
        p = next;
        if change < 1e-15 {
            break;
        }
    }
    let (fl, _) = side_function(gamma, l, p);
    let (fr, _) = side_function(gamma, r, p);
    (p, 0.5 * (l.u + r.u) + 0.5 * (fr - fl))
}

pub fn random_law(rng: &mut ChaCha8Rng, n: usize) -> EosSpec {
    let species = (0..n).map(|_| Species { gamma: rng.gen_range(1.2..2.5), kappa: rng.gen_range(0.5..2.0) }).collect();
    EosSpec::new(species).unwrap()
}

/// Random profile problem with `m = ρ_L c_L (1 + margin)`.
pub fn random_profile(rng: &mut ChaCha8Rng, n: usize, margin: f64, mode: ViscosityMode) -> ProfileProblem {
    let eos = random_law(rng, n);
    let mu0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let visc = ViscositySpec::new(mu0, mode).unwrap();
    let tau = rng.gen_range(0.5..2.0);
    let s = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    ProfileProblem::with_margin(eos, visc, ThermoState::new(tau, s).unwrap(), margin)
}

/// Log-uniform sample in `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Random Riemann data away from vacuum and resonance.
pub fn random_riemann(rng: &mut ChaCha8Rng, gamma: f64) -> (Primitive, Primitive) {
    loop {
        let mut side =
            || Primitive { rho: rng.gen_range(0.1..2.0), u: rng.gen_range(-0.5..0.5), p: rng.gen_range(0.1..2.0) };
        let (l, r) = (side(), side());
        let c = |k: Primitive| (gamma * k.p / k.rho).sqrt();
        let vacuum = 2.0 * (c(l) + c(r)) / (gamma - 1.0) <= r.u - l.u;
        let resonant = [l, r].iter().any(|k| (1.0 - k.u * k.u / (c(*k) * c(*k))).abs() < 1e-3);
        if !vacuum && !resonant {
            return (l, r);
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

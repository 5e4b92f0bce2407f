//! Generalized Hugoniot curves: states `u1` with
//! `-Λ(u1 - u0) + f(u1) - f(u0) = Φ(u0, Λ)`.
//!
//! Writing `f(u1) - f(u0) = Ā δ` with `δ = u1 - u0` and `Ā` the averaged
//! Jacobian, the relation becomes `(Ā - ΛI) δ = Φ`. Split along the
//! eigenpair `(λ̄, r̄, l̄)` of `Ā` for the attached family:
//!
//! ```text
//! ω = λ̄ - Λ - l̄·Φ / l̄·δ = 0,     P δ = M⁻¹ P Φ
//! ```
//!
//! with `P = I - r̄ l̄ᵀ` and `M = Ā - ΛI + (1 - λ̄ + Λ) r̄ l̄ᵀ`. The trivial root
//! `u1 = u0` is divided out, so Newton iteration on the combined residual
//! follows the nontrivial branch. The result is then polished on the
//! exact relation.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::entropy::entropy_dissipation;
use super::kinetic::KineticFunction;
use super::system::ConservationSystem;
use super::RiemannError;

const GAUSS_NODES: [f64; 8] = [
    0.019_855_071_751_231_856,
    0.101_666_761_293_186_63,
    0.237_233_795_041_835_5,
    0.408_282_678_752_175_1,
    0.591_717_321_247_824_9,
    0.762_766_204_958_164_5,
    0.898_333_238_706_813_4,
    0.980_144_928_248_768_2,
];
const GAUSS_WEIGHTS: [f64; 8] = [
    0.050_614_268_145_188_13,
    0.111_190_517_226_687_24,
    0.156_853_322_938_943_64,
    0.181_341_891_689_180_99,
    0.181_341_891_689_180_99,
    0.156_853_322_938_943_64,
    0.111_190_517_226_687_24,
    0.050_614_268_145_188_13,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HugoniotOptions {
    /// Continuation steps in `Λ` on the first attempt.
    pub steps: usize,
    /// Times the step count may be doubled after a failure.
    pub refinements: usize,
    pub newton_iterations: usize,
    /// Required `‖G(u1)‖ / ‖f(u0)‖`.
    pub residual: f64,
}

impl Default for HugoniotOptions {
    fn default() -> Self {
        HugoniotOptions { steps: 8, refinements: 5, newton_iterations: 40, residual: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HugoniotPoint {
    pub lambda: f64,
    pub u1: Vec<f64>,
    /// `‖G(u1)‖ / ‖f(u0)‖`.
    pub residual: f64,
    pub continuation_steps: usize,
}

fn averaged_jacobian<S: ConservationSystem + ?Sized>(sys: &S, u0: &DVector<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    let n = sys.dim();
    let mut a = DMatrix::zeros(n, n);
    for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
        a += sys.jacobian(&(u0 + d * *x)) * w;
    }
    a
}

const RQI_ITERATIONS: usize = 40;
const SCHUR_SWEEPS: usize = 200;

/// The `j`-th smallest real part of the spectrum, if Schur converges.
fn ordered_eigenvalue(a: &DMatrix<f64>, j: usize) -> Option<f64> {
    let schur = a.clone().try_schur(f64::EPSILON, SCHUR_SWEEPS)?;
    let mut ev: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev.get(j).copied()
}

/// Eigenpair of `a` nearest the seed `(lam, r, l)`, refined by two-sided
/// Rayleigh quotient iteration. `r` keeps the orientation of the seed and `l·r = 1`.
fn eigenpair(
    a: &DMatrix<f64>,
    mut lam: f64,
    r_seed: &DVector<f64>,
    l_seed: &DVector<f64>,
) -> Option<(f64, DVector<f64>, DVector<f64>)> {
    let n = a.nrows();
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let mut r = r_seed.normalize();
    let mut l = l_seed.normalize();
    for _ in 0..RQI_ITERATIONS {
        // Nudge an exactly singular shift; the solve then returns the eigenvector.
        let shift = lam + 8.0 * f64::EPSILON * scale;
        let x = (a - DMatrix::identity(n, n) * lam)
            .lu()
            .solve(&r)
            .or_else(|| (a - DMatrix::identity(n, n) * shift).lu().solve(&r));
        let y = (a.transpose() - DMatrix::identity(n, n) * lam)
            .lu()
            .solve(&l)
            .or_else(|| (a.transpose() - DMatrix::identity(n, n) * shift).lu().solve(&l));
        let (Some(x), Some(y)) = (x, y) else {
            return None;
        };
        let (xn, yn) = (x.norm(), y.norm());
        if !(xn.is_finite() && yn.is_finite()) || xn == 0.0 || yn == 0.0 {
            return None;
        }
        r = x / xn;
        l = y / yn;
        let lr = l.dot(&r);
        if lr == 0.0 {
            return None;
        }
        lam = l.dot(&(a * &r)) / lr;
        if (a * &r - &r * lam).norm() <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    if (a * &r - &r * lam).norm() > 1e-10 * scale {
        return None;
    }
    if r.dot(r_seed) < 0.0 {
        r = -r;
    }
    let lr = l.dot(&r);
    if lr == 0.0 || !lr.is_finite() {
        return None;
    }
    Some((lam, r, l / lr))
}

struct Curve<'a, S: ?Sized> {
    sys: &'a S,
    u0: DVector<f64>,
    family: usize,
    r0: DVector<f64>,
}

impl<S: ConservationSystem + ?Sized> Curve<'_, S> {
    fn residual(&self, u1: &DVector<f64>, lambda: f64, phi: &DVector<f64>) -> Option<DVector<f64>> {
        if !self.sys.admissible(u1) {
            return None;
        }
        let d = u1 - &self.u0;
        let a = averaged_jacobian(self.sys, &self.u0, &d);
        let mid = &self.u0 + &d * 0.5;
        let seed_r = self.sys.right_eigenvectors(&mid).column(self.family).into_owned();
        let seed_l = self.sys.left_eigenvectors(&mid).row(self.family).transpose();
        let seed_lam = ordered_eigenvalue(&a, self.family).unwrap_or_else(|| {
            GAUSS_NODES
                .iter()
                .zip(GAUSS_WEIGHTS)
                .map(|(x, w)| self.sys.eigenvalues(&(&self.u0 + &d * *x))[self.family] * w)
                .sum()
        });
        let (lb, mut r, mut l) = eigenpair(&a, seed_lam, &seed_r, &seed_l)?;
        if r.dot(&self.r0) < 0.0 {
            r = -r;
            l = -l;
        }
        let n = self.sys.dim();
        let rl = &r * l.transpose();
        let p = DMatrix::identity(n, n) - &rl;
        let m = &a - DMatrix::identity(n, n) * lambda + &rl * (1.0 - (lb - lambda));
        let alpha = l.dot(&d);
        if alpha == 0.0 {
            return None;
        }
        let omega = lb - lambda - l.dot(phi) / alpha;
        let z = m.lu().solve(&(&p * phi))?;
        let out = &p * (&d - &p * z) + &r * omega;
        out.iter().all(|x| x.is_finite()).then_some(out)
    }

    /// Damped Newton with a forward-difference Jacobian.
    fn solve(&self, guess: DVector<f64>, lambda: f64, phi: &DVector<f64>, iters: usize) -> Option<DVector<f64>> {
        let n = self.sys.dim();
        let mut u = guess;
        let mut r = self.residual(&u, lambda, phi)?;
        let unorm = self.u0.norm().max(f64::MIN_POSITIVE);
        for _ in 0..iters {
            let mut jac = DMatrix::zeros(n, n);
            for k in 0..n {
                let h = 1e-7 * u[k].abs().max(1e-3 * unorm);
                let mut up = u.clone();
                up[k] += h;
                let rp = self.residual(&up, lambda, phi)?;
                jac.set_column(k, &((rp - &r) / h));
            }
            let step = jac.lu().solve(&(-&r))?;
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..12 {
                let cand = &u + &step * t;
                if let Some(rc) = self.residual(&cand, lambda, phi) {
                    if rc.norm() < r.norm() {
                        accepted = Some((cand, rc));
                        break;
                    }
                }
                t *= 0.5;
            }
            let Some((un, rn)) = accepted else { break };
            let small = (&un - &u).norm() <= 1e-14 * un.norm();
            u = un;
            r = rn;
            if small {
                break;
            }
        }
        Some(u)
    }
}

fn jump_residual<S: ConservationSystem + ?Sized>(
    sys: &S,
    u0: &DVector<f64>,
    u1: &DVector<f64>,
    lambda: f64,
    phi: &DVector<f64>,
) -> DVector<f64> {
    (u1 - u0) * (-lambda) + sys.flux(u1) - sys.flux(u0) - phi
}

/// Newton on the exact relation with the analytic Jacobian `A(u1) - ΛI`.
fn polish<S: ConservationSystem + ?Sized>(
    sys: &S,
    u0: &DVector<f64>,
    mut u1: DVector<f64>,
    lambda: f64,
    phi: &DVector<f64>,
    iters: usize,
) -> DVector<f64> {
    let n = sys.dim();
    let mut g = jump_residual(sys, u0, &u1, lambda, phi);
    for _ in 0..iters {
        let j = sys.jacobian(&u1) - DMatrix::identity(n, n) * lambda;
        let Some(step) = j.lu().solve(&(-&g)) else { break };
        let cand = &u1 + step;
        if !sys.admissible(&cand) {
            break;
        }
        let gc = jump_residual(sys, u0, &cand, lambda, phi);
        if !(gc.norm() < g.norm()) {
            break;
        }
        u1 = cand;
        g = gc;
    }
    u1
}

/// Directional derivative `∇λ_j·r_j` at `u0` by central differences.
pub fn genuine_nonlinearity<S: ConservationSystem + ?Sized>(
    sys: &S,
    u0: &DVector<f64>,
    j: usize,
) -> (f64, DVector<f64>) {
    let r = sys.right_eigenvectors(u0).column(j).normalize();
    let h = 1e-5 * u0.norm().max(1.0);
    let lp = sys.eigenvalues(&(u0 + &r * h))[j];
    let lm = sys.eigenvalues(&(u0 - &r * h))[j];
    ((lp - lm) / (2.0 * h), r)
}

/// The state `u1` joined to `u0` by a shock of speed `lambda` obeying the
/// kinetic relation of `kin`.
pub fn kinetic_hugoniot<S, K>(
    sys: &S,
    kin: &K,
    u0: &DVector<f64>,
    lambda: f64,
    opts: &HugoniotOptions,
) -> Result<HugoniotPoint, RiemannError>
where
    S: ConservationSystem + ?Sized,
    K: KineticFunction + ?Sized,
{
    if !sys.admissible(u0) {
        return Err(RiemannError::Invalid("base state is not admissible".into()));
    }
    let j = kin.family();
    let lam_j = sys.eigenvalues(u0)[j];
    let fscale = sys.flux(u0).norm().max(f64::MIN_POSITIVE);
    if lambda == lam_j {
        return Ok(HugoniotPoint { lambda, u1: u0.iter().copied().collect(), residual: 0.0, continuation_steps: 0 });
    }
    if (lambda - lam_j) * kin.lax_sign() < 0.0 {
        return Err(RiemannError::NoConvergence(format!(
            "speed {lambda} is outside the Lax range of family {} at the base state (λ = {lam_j})",
            j + 1
        )));
    }
    let (gnl, r0) = genuine_nonlinearity(sys, u0, j);
    if gnl.abs() < 1e-12 {
        return Err(RiemannError::NoConvergence(format!("family {} is degenerate at the base state", j + 1)));
    }
    let curve = Curve { sys, u0: u0.clone(), family: j, r0: r0.clone() };

    let mut steps = opts.steps.max(1);
    for _ in 0..=opts.refinements {
        if let Some(u1) = follow(&curve, kin, lam_j, lambda, gnl, steps, opts)? {
            let phi = kin.phi(u0, lambda)?;
            let u1 = polish(sys, u0, u1, lambda, &phi, opts.newton_iterations);
            let res = jump_residual(sys, u0, &u1, lambda, &phi).norm() / fscale;
            if res <= opts.residual && (&u1 - u0).norm() > 0.0 {
                return Ok(HugoniotPoint {
                    lambda,
                    u1: u1.iter().copied().collect(),
                    residual: res,
                    continuation_steps: steps,
                });
            }
        }
        steps *= 2;
    }
    Err(RiemannError::NoConvergence(format!(
        "Hugoniot iteration did not reach residual {:e} at speed {lambda}",
        opts.residual
    )))
}

fn follow<S, K>(
    curve: &Curve<'_, S>,
    kin: &K,
    lam_j: f64,
    lambda: f64,
    gnl: f64,
    steps: usize,
    opts: &HugoniotOptions,
) -> Result<Option<DVector<f64>>, RiemannError>
where
    S: ConservationSystem + ?Sized,
    K: KineticFunction + ?Sized,
{
    let u0 = &curve.u0;
    let mut prev = u0.clone();
    let mut prev2: Option<DVector<f64>> = None;
    for k in 1..=steps {
        let lk = lam_j + (lambda - lam_j) * k as f64 / steps as f64;
        let guess = match &prev2 {
            None if k == 1 => u0 + &curve.r0 * (2.0 * (lk - lam_j) / gnl),
            None => &prev + (&prev - u0),
            Some(p2) => &prev + (&prev - p2),
        };
        let phi = kin.phi(u0, lk)?;
        let Some(u) = curve.solve(guess, lk, &phi, opts.newton_iterations) else {
            return Ok(None);
        };
        if k > 1 {
            prev2 = Some(prev.clone());
        }
        prev = u;
    }
    Ok(Some(prev))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangencyReport {
    /// `½ ∇λ_j·r_j` at the base state.
    pub expected_slope: f64,
    /// `(Λ - λ_j) / l_j·(u1 - u0)` at the smallest offset.
    pub measured_slope: f64,
    pub relative_error: f64,
    /// Largest `‖u1 - u0‖ / |l_j·(u1 - u0)|` over the offsets.
    pub lipschitz_ratio: f64,
    /// Log-log slope of `|E|` against the offset, when `E` is not identically zero.
    pub dissipation_order: Option<f64>,
    pub passed: bool,
}

/// Least-squares slope of `ys` against `xs`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Compare the Hugoniot curve of `kin` at `u0` with its tangent and fit the
/// order of the entropy dissipation, over offsets `|Λ - λ_j| = σ·10^-k`,
/// `k ∈ [2, 4]`, with `σ` the largest characteristic speed magnitude.
pub fn hugoniot_tangency_check<S, K>(
    sys: &S,
    kin: &K,
    u0: &DVector<f64>,
    opts: &HugoniotOptions,
) -> Result<TangencyReport, RiemannError>
where
    S: ConservationSystem + ?Sized,
    K: KineticFunction + ?Sized,
{
    let j = kin.family();
    let lam = sys.eigenvalues(u0);
    let sigma = lam.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let (gnl, r) = genuine_nonlinearity(sys, u0, j);
    let l = sys.left_eigenvectors(u0).row(j).transpose();
    let l = &l / l.dot(&r);
    let expected = 0.5 * gnl;

    let mut offsets = Vec::new();
    let mut dissipation = Vec::new();
    let mut slope_small = f64::NAN;
    let mut lipschitz: f64 = 0.0;
    for k in 0..=8 {
        let eta = sigma * 10f64.powf(-2.0 - 0.25 * k as f64);
        let big = lam[j] + kin.lax_sign() * eta;
        let p = kinetic_hugoniot(sys, kin, u0, big, opts)?;
        let u1 = DVector::from_vec(p.u1);
        let d = &u1 - u0;
        let alpha = l.dot(&d);
        slope_small = (big - lam[j]) / alpha;
        lipschitz = lipschitz.max(d.norm() / alpha.abs());
        let e = entropy_dissipation(sys, 0, big, u0, &u1).abs();
        offsets.push(eta);
        dissipation.push(e);
    }
    let order = if dissipation.iter().all(|e| *e > 0.0) { Some(loglog_slope(&offsets, &dissipation)) } else { None };
    let rel = ((slope_small - expected) / expected).abs();
    let order_ok = order.map_or(true, |o| (2.5..=3.5).contains(&o));
    Ok(TangencyReport {
        expected_slope: expected,
        measured_slope: slope_small,
        relative_error: rel,
        lipschitz_ratio: lipschitz,
        dissipation_order: order,
        passed: rel <= 0.1 && order_ok,
    })
}

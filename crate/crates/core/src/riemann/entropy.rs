//! Entropy dissipation across a discontinuity.

use nalgebra::DVector;

use super::system::ConservationSystem;

/// `E_k = -Λ(U_k(u1) - U_k(u0)) + F_k(u1) - F_k(u0)` for the `k`-th convex
/// entropy pair of `sys`. Admissible shocks have `E_k ≤ 0`.
pub fn entropy_dissipation<S: ConservationSystem + ?Sized>(
    sys: &S,
    k: usize,
    lambda: f64,
    u0: &DVector<f64>,
    u1: &DVector<f64>,
) -> f64 {
    let (ua, fa) = sys.entropy_pairs(u0)[k];
    let (ub, fb) = sys.entropy_pairs(u1)[k];
    -lambda * (ub - ua) + fb - fa
}

/// All pairs at once.
pub fn entropy_dissipation_all<S: ConservationSystem + ?Sized>(
    sys: &S,
    lambda: f64,
    u0: &DVector<f64>,
    u1: &DVector<f64>,
) -> Vec<f64> {
    let a = sys.entropy_pairs(u0);
    let b = sys.entropy_pairs(u1);
    a.iter().zip(&b).map(|((ua, fa), (ub, fb))| -lambda * (ub - ua) + fb - fa).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::EosSpec;
    use crate::riemann::system::MultiPressureEuler;
    use approx::assert_relative_eq;

    #[test]
    fn vanishes_without_jump() {
        let sys = MultiPressureEuler::new(EosSpec::uniform(2, 1.4, 1.0).unwrap());
        let u = sys.encode(1.0, 0.3, &[0.1, 0.2]);
        assert_eq!(entropy_dissipation(&sys, 1, 0.7, &u, &u), 0.0);
    }

    #[test]
    fn specific_entropy_form() {
        // With equal mass flux on both sides, E_i = -m (s_i^1 - s_i^0).
        let sys = MultiPressureEuler::new(EosSpec::uniform(2, 1.4, 1.0).unwrap());
        let lambda = -0.4;
        let (rho0, v0) = (1.0, 0.5);
        let m = rho0 * (v0 - lambda);
        let rho1 = 1.6;
        let v1 = lambda + m / rho1;
        let u0 = sys.encode(rho0, v0, &[0.0, 0.1]);
        let u1 = sys.encode(rho1, v1, &[0.02, 0.15]);
        let e = entropy_dissipation_all(&sys, lambda, &u0, &u1);
        assert_relative_eq!(e[0], -m * 0.02, max_relative = 1e-12);
        assert_relative_eq!(e[1], -m * 0.05, max_relative = 1e-12);
    }
}

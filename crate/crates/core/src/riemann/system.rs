//! One-dimensional systems `∂_t u + ∂_x f(u) = 0` with their eigenstructure.

use nalgebra::{DMatrix, DVector};

use crate::eos::{EosSpec, ThermoState};

pub trait ConservationSystem: Send + Sync {
    fn dim(&self) -> usize;

    fn admissible(&self, u: &DVector<f64>) -> bool;

    fn flux(&self, u: &DVector<f64>) -> DVector<f64>;

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64>;

    /// Characteristic speeds in nondecreasing order.
    fn eigenvalues(&self, u: &DVector<f64>) -> Vec<f64>;

    /// Right eigenvectors as columns, in the order of [`Self::eigenvalues`].
    fn right_eigenvectors(&self, u: &DVector<f64>) -> DMatrix<f64>;

    /// Left eigenvectors as rows, normalized against the right ones.
    fn left_eigenvectors(&self, u: &DVector<f64>) -> DMatrix<f64> {
        self.right_eigenvectors(u)
            .try_inverse()
            .unwrap_or_else(|| DMatrix::from_element(self.dim(), self.dim(), f64::NAN))
    }

    /// Convex entropy pairs `(U_k(u), F_k(u))`.
    fn entropy_pairs(&self, u: &DVector<f64>) -> Vec<(f64, f64)>;
}

/// Multi-pressure Euler equations in the conserved variables
/// `(ρ, ρu, ρs_1, …, ρs_N)` with total pressure `p = Σ p_i(τ, s_i)`.
#[derive(Debug, Clone)]
pub struct MultiPressureEuler {
    pub eos: EosSpec,
}

impl MultiPressureEuler {
    pub fn new(eos: EosSpec) -> Self {
        MultiPressureEuler { eos }
    }

    /// `(ρ, velocity, ThermoState)` from conserved variables.
    pub fn decode(&self, u: &DVector<f64>) -> (f64, f64, ThermoState) {
        let rho = u[0];
        let s = u.iter().skip(2).map(|q| q / rho).collect();
        (rho, u[1] / rho, ThermoState { tau: 1.0 / rho, s })
    }

    pub fn encode(&self, rho: f64, vel: f64, s: &[f64]) -> DVector<f64> {
        let mut u = DVector::zeros(s.len() + 2);
        u[0] = rho;
        u[1] = rho * vel;
        for (i, si) in s.iter().enumerate() {
            u[2 + i] = rho * si;
        }
        u
    }

    /// `∂p/∂ρ` at fixed `ρs` and `∂p/∂(ρs_i)` at fixed `ρ`.
    fn pressure_gradient(&self, w: &ThermoState) -> (f64, Vec<f64>) {
        let rho = 1.0 / w.tau;
        let p = self.eos.pressures(w);
        let p_rho = self.eos.species().iter().zip(&p).zip(&w.s).map(|((sp, pi), si)| pi * (sp.gamma - si) / rho).sum();
        (p_rho, p.iter().map(|pi| pi / rho).collect())
    }
}

impl ConservationSystem for MultiPressureEuler {
    fn dim(&self) -> usize {
        self.eos.len() + 2
    }

    fn admissible(&self, u: &DVector<f64>) -> bool {
        u.len() == self.dim() && u[0] > 0.0 && u.iter().all(|x| x.is_finite())
    }

    fn flux(&self, u: &DVector<f64>) -> DVector<f64> {
        let (rho, v, w) = self.decode(u);
        let mut f = DVector::zeros(self.dim());
        f[0] = rho * v;
        f[1] = rho * v * v + self.eos.pressure(&w);
        for i in 0..w.s.len() {
            f[2 + i] = u[2 + i] * v;
        }
        f
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (_, v, w) = self.decode(u);
        let n = self.dim();
        let (p_rho, p_sigma) = self.pressure_gradient(&w);
        let mut a = DMatrix::zeros(n, n);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = -v * v + p_rho;
        a[(1, 1)] = 2.0 * v;
        for (i, si) in w.s.iter().enumerate() {
            a[(1, 2 + i)] = p_sigma[i];
            a[(2 + i, 0)] = -si * v;
            a[(2 + i, 1)] = *si;
            a[(2 + i, 2 + i)] = v;
        }
        a
    }

    fn eigenvalues(&self, u: &DVector<f64>) -> Vec<f64> {
        let (_, v, w) = self.decode(u);
        let c = self.eos.sound_speed_sq(&w).sqrt();
        let mut out = vec![v; self.dim()];
        out[0] = v - c;
        out[self.dim() - 1] = v + c;
        out
    }

    fn right_eigenvectors(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (_, v, w) = self.decode(u);
        let n = self.dim();
        let k = w.s.len();
        let c = self.eos.sound_speed_sq(&w).sqrt();
        let (p_rho, p_sigma) = self.pressure_gradient(&w);
        let mut r = DMatrix::zeros(n, n);
        for (col, speed) in [(0, v - c), (n - 1, v + c)] {
            r[(0, col)] = 1.0;
            r[(1, col)] = speed;
            for (i, si) in w.s.iter().enumerate() {
                r[(2 + i, col)] = *si;
            }
        }
        // Contact directions: velocity and total pressure unchanged.
        r[(0, 1)] = p_sigma[0];
        r[(1, 1)] = v * p_sigma[0];
        r[(2, 1)] = -p_rho;
        for j in 1..k {
            r[(2, 1 + j)] = p_sigma[j];
            r[(2 + j, 1 + j)] = -p_sigma[0];
        }
        r
    }

    /// `U_i = -ρs_i`, `F_i = -ρu s_i`.
    fn entropy_pairs(&self, u: &DVector<f64>) -> Vec<(f64, f64)> {
        let v = u[1] / u[0];
        u.iter().skip(2).map(|q| (-q, -q * v)).collect()
    }
}

/// Single-pressure polytropic Euler equations in `(ρ, ρu, E)`.
#[derive(Debug, Clone, Copy)]
pub struct ClassicalEuler {
    pub gamma: f64,
}

impl ClassicalEuler {
    pub fn primitive(&self, u: &DVector<f64>) -> (f64, f64, f64) {
        let rho = u[0];
        let v = u[1] / rho;
        (rho, v, (self.gamma - 1.0) * (u[2] - 0.5 * rho * v * v))
    }

    pub fn conserved(&self, rho: f64, v: f64, p: f64) -> DVector<f64> {
        DVector::from_vec(vec![rho, rho * v, p / (self.gamma - 1.0) + 0.5 * rho * v * v])
    }
}

impl ConservationSystem for ClassicalEuler {
    fn dim(&self) -> usize {
        3
    }

    fn admissible(&self, u: &DVector<f64>) -> bool {
        let (rho, _, p) = self.primitive(u);
        rho > 0.0 && p > 0.0
    }

    fn flux(&self, u: &DVector<f64>) -> DVector<f64> {
        let (rho, v, p) = self.primitive(u);
        DVector::from_vec(vec![rho * v, rho * v * v + p, (u[2] + p) * v])
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let g = self.gamma;
        let (rho, v, p) = self.primitive(u);
        let h = (u[2] + p) / rho;
        DMatrix::from_row_slice(
            3,
            3,
            &[
                0.0,
                1.0,
                0.0,
                0.5 * (g - 3.0) * v * v,
                (3.0 - g) * v,
                g - 1.0,
                v * (0.5 * (g - 1.0) * v * v - h),
                h - (g - 1.0) * v * v,
                g * v,
            ],
        )
    }

    fn eigenvalues(&self, u: &DVector<f64>) -> Vec<f64> {
        let (rho, v, p) = self.primitive(u);
        let c = (self.gamma * p / rho).sqrt();
        vec![v - c, v, v + c]
    }

    fn right_eigenvectors(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let (rho, v, p) = self.primitive(u);
        let c = (self.gamma * p / rho).sqrt();
        let h = (u[2] + p) / rho;
        DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 1.0, v - c, v, v + c, h - v * c, 0.5 * v * v, h + v * c])
    }

    /// `U = -ρs` with `s = ln(p ρ^-γ)`.
    fn entropy_pairs(&self, u: &DVector<f64>) -> Vec<(f64, f64)> {
        let (rho, v, p) = self.primitive(u);
        let s = (p * rho.powf(-self.gamma)).ln();
        vec![(-rho * s, -rho * v * s)]
    }
}

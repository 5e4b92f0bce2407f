//! Dormand–Prince 5(4) integrator with the standard continuous extension.

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { rtol: 1e-10, atol: 1e-12, h_init: None, h_max: f64::INFINITY, max_steps: 5_000_000 }
    }
}

/// Interpolant over one accepted step `[t0, t0 + h]`.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    coeffs: [Vec<f64>; 5],
}

impl DenseStep {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        for i in 0..out.len() {
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
    }
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The observer asked to stop.
    Stopped,
    /// `t_end` was reached.
    Finished,
    StepLimit,
    StepSizeUnderflow,
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub outcome: Outcome,
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn err_norm(y0: &[f64], y1: &[f64], err: &[f64], opts: &StepOptions) -> f64 {
    let n = y0.len() as f64;
    let mut acc = 0.0;
    for i in 0..y0.len() {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        let r = err[i] / sc;
        acc += r * r;
    }
    (acc / n).sqrt()
}

/// Integrate `y' = f(t, y)` from `t0` until `t_end` or until `observe`
/// returns [`Control::Stop`]. The observer sees every accepted step together
/// with its interpolant.
pub fn integrate<F, O>(mut f: F, t0: f64, y0: &[f64], t_end: f64, opts: &StepOptions, mut observe: O) -> Summary
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(&DenseStep, &[f64]) -> Control,
{
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut evals = 0;

    f(t, &y, &mut k[0]);
    evals += 1;

    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            // Hairer's starting step heuristic, first-order version.
            let d0 = err_norm(&y, &y, &y, opts).max(1e-300);
            let d1 = err_norm(&y, &y, &k[0], opts).max(1e-300);
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h0.min(opts.h_max)
        }
    };
    h = h.min(t_end - t);

    let mut accepted = 0;
    let mut rejected = 0;
    let mut fac_old: f64 = 1e-4;

    loop {
        if accepted + rejected >= opts.max_steps {
            return Summary { outcome: Outcome::StepLimit, t, y, accepted, rejected, evaluations: evals };
        }
        if t >= t_end {
            return Summary { outcome: Outcome::Finished, t, y, accepted, rejected, evaluations: evals };
        }
        if h <= 1e-14 * t.abs().max(1.0) * f64::EPSILON.sqrt() {
            return Summary { outcome: Outcome::StepSizeUnderflow, t, y, accepted, rejected, evaluations: evals };
        }
        let h_step = h.min(t_end - t);

        for i in 0..n {
            tmp[i] = y[i] + h_step * A21 * k[0][i];
        }
        f(t + C2 * h_step, &tmp, &mut k[1]);
        for i in 0..n {
            tmp[i] = y[i] + h_step * (A31 * k[0][i] + A32 * k[1][i]);
        }
        f(t + C3 * h_step, &tmp, &mut k[2]);
        for i in 0..n {
            tmp[i] = y[i] + h_step * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        f(t + C4 * h_step, &tmp, &mut k[3]);
        for i in 0..n {
            tmp[i] = y[i] + h_step * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        f(t + C5 * h_step, &tmp, &mut k[4]);
        for i in 0..n {
            tmp[i] = y[i] + h_step * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        f(t + h_step, &tmp, &mut k[5]);
        for i in 0..n {
            y_new[i] = y[i] + h_step * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        f(t + h_step, &y_new, &mut k[6]);
        evals += 6;

        if y_new.iter().any(|v| !v.is_finite()) {
            rejected += 1;
            h = 0.25 * h_step;
            if h_step < 1e-300 {
                return Summary { outcome: Outcome::NonFinite, t, y, accepted, rejected, evaluations: evals };
            }
            continue;
        }

        for i in 0..n {
            err[i] = h_step * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
        }
        let e = err_norm(&y, &y_new, &err, opts);

        // PI controller (Gustafsson), as in DOPRI5.
        let expo1 = 0.2 - 0.04;
        let fac11 = e.max(1e-300).powf(expo1);
        let fac = (fac11 / fac_old.powf(0.04) / 0.9).clamp(1.0 / 10.0, 5.0);
        let h_new = (h_step / fac).min(opts.h_max);

        if e <= 1.0 {
            fac_old = e.max(1e-4);
            let mut dense = DenseStep {
                t0: t,
                h: h_step,
                coeffs: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            };
            for i in 0..n {
                let dy = y_new[i] - y[i];
                let bspl = h_step * k[0][i] - dy;
                dense.coeffs[0][i] = y[i];
                dense.coeffs[1][i] = dy;
                dense.coeffs[2][i] = bspl;
                dense.coeffs[3][i] = dy - h_step * k[6][i] - bspl;
                dense.coeffs[4][i] =
                    h_step * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
            }
            t += h_step;
            std::mem::swap(&mut y, &mut y_new);
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
            accepted += 1;
            if observe(&dense, &y) == Control::Stop {
                return Summary { outcome: Outcome::Stopped, t, y, accepted, rejected, evaluations: evals };
            }
            h = h_new;
        } else {
            rejected += 1;
            h = h_step / (fac11 / 0.9).min(5.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = StepOptions::default();
        let s = integrate(|_, y, dy| dy[0] = -y[0], 0.0, &[1.0], 5.0, &opts, |_, _| Control::Continue);
        assert_eq!(s.outcome, Outcome::Finished);
        assert!((s.y[0] - (-5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let opts = StepOptions::default();
        let mut worst: f64 = 0.0;
        let mut buf = [0.0; 2];
        integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            10.0,
            &opts,
            |step, _| {
                let tm = step.t0 + 0.37 * step.h;
                step.eval(tm, &mut buf);
                worst = worst.max((buf[0] - tm.cos()).abs());
                Control::Continue
            },
        );
        assert!(worst < 1e-8, "dense error {worst}");
    }

    #[test]
    fn observer_can_stop() {
        let opts = StepOptions::default();
        let s = integrate(
            |_, _, dy| dy[0] = 1.0,
            0.0,
            &[0.0],
            100.0,
            &opts,
            |_, y| if y[0] > 1.0 { Control::Stop } else { Control::Continue },
        );
        assert_eq!(s.outcome, Outcome::Stopped);
        assert!(s.t < 100.0);
    }
}

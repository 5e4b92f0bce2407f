//! Bracketed scalar root finding.
//!
//! Every scalar equation in this crate comes with a sign change that is
//! known in advance, so the solvers here all work on a bracket `[lo, hi]`
//! and never leave it. Bisection is the workhorse; a short damped Newton
//! polish and Brent's method are available on top of it.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("bracket_failure: no sign change on [{lo}, {hi}] (f = {flo}, {fhi})")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("bracket_failure: expansion from {start} did not reach a sign change after {steps} steps")]
    ExpansionFailed { start: f64, steps: usize },
    #[error("non-finite function value {value} at x = {x}")]
    NotFinite { x: f64, value: f64 },
}

impl RootError {
    pub fn code(&self) -> &'static str {
        match self {
            RootError::NotFinite { .. } => "non_finite",
            _ => "bracket_failure",
        }
    }
}

/// Stopping rule for bracket refinement.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Bracket width relative to `max(|lo|, |hi|)`.
    pub rel: f64,
    /// Absolute floor on the bracket width.
    pub abs: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-13, abs: 0.0, max_iter: 400 }
    }
}

impl Tolerance {
    fn done(&self, lo: f64, hi: f64) -> bool {
        let w = (hi - lo).abs();
        w <= self.rel * lo.abs().max(hi.abs()) || w <= self.abs
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    /// Final bracket; `x` always lies inside it.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

fn finite(x: f64, v: f64) -> Result<f64, RootError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(RootError::NotFinite { x, value: v })
    }
}

/// Plain bisection. `f(lo)` and `f(hi)` must have opposite signs (a zero
/// at either end is accepted as the root).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Root, RootError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = finite(a, f(a))?;
    let fb = finite(b, f(b))?;
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, lo: a, hi: a, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, lo: b, hi: b, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange { lo: a, hi: b, flo: fa, fhi: fb });
    }
    let mut fb = fb;
    let mut it = 0;
    while it < tol.max_iter && !tol.done(a, b) {
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        let fc = finite(c, f(c))?;
        it += 1;
        if fc == 0.0 {
            return Ok(Root { x: c, fx: fc, lo: c, hi: c, iterations: it });
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
            fb = fc;
        }
    }
    let (x, fx) = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    Ok(Root { x, fx, lo: a, hi: b, iterations: it })
}

/// A few damped Newton steps starting from a bisection result. A step is
/// taken only if it stays inside the bracket and lowers `|f|`; otherwise it
/// is halved up to four times and then abandoned.
pub fn polish<F, D>(mut f: F, mut df: D, root: Root, steps: usize) -> Root
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let mut r = root;
    if r.fx == 0.0 {
        return r;
    }
    for _ in 0..steps {
        let d = df(r.x);
        if !d.is_finite() || d == 0.0 {
            break;
        }
        let mut step = -r.fx / d;
        let mut accepted = false;
        for _ in 0..5 {
            let x = r.x + step;
            if x >= r.lo && x <= r.hi {
                let fx = f(x);
                if fx.is_finite() && fx.abs() < r.fx.abs() {
                    r.x = x;
                    r.fx = fx;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || r.fx == 0.0 {
            break;
        }
    }
    r
}

/// Brent's method (inverse quadratic interpolation, secant and bisection).
pub fn brent<F>(mut f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<Root, RootError>
where
    F: FnMut(f64) -> f64,
{
    let mut a = lo;
    let mut b = hi;
    let mut fa = finite(a, f(a))?;
    let mut fb = finite(b, f(b))?;
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, lo: a, hi: a, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, lo: b, hi: b, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange { lo: a, hi: b, flo: fa, fhi: fb });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for it in 1..=tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * (tol.rel * b.abs()).max(tol.abs);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let (l, h) = if b < c { (b, c) } else { (c, b) };
            return Ok(Root { x: b, fx: fb, lo: l, hi: h, iterations: it });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = finite(b, f(b))?;
    }
    let (l, h) = if b < c { (b, c) } else { (c, b) };
    Ok(Root { x: b, fx: fb, lo: l, hi: h, iterations: tol.max_iter })
}

/// Multiply `start` by `factor` until `accept(x)` holds, at most `max_steps`
/// times. Returns the first accepted point.
pub fn expand<P>(start: f64, factor: f64, max_steps: usize, mut accept: P) -> Result<f64, RootError>
where
    P: FnMut(f64) -> bool,
{
    let mut x = start;
    for _ in 0..=max_steps {
        if accept(x) {
            return Ok(x);
        }
        x *= factor;
    }
    Err(RootError::ExpansionFailed { start, steps: max_steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.lo <= r.x && r.x <= r.hi);
    }

    #[test]
    fn bisect_rejects_same_sign() {
        let e = bisect(|x| x * x + 1.0, -1.0, 1.0, Tolerance::default()).unwrap_err();
        assert!(matches!(e, RootError::NoSignChange { .. }));
    }

    #[test]
    fn polish_improves_residual() {
        let tol = Tolerance { rel: 1e-6, ..Tolerance::default() };
        let r = bisect(|x| x.exp() - 3.0, 0.0, 2.0, tol).unwrap();
        let p = polish(|x| x.exp() - 3.0, |x| x.exp(), r, 3);
        assert!(p.fx.abs() <= r.fx.abs());
        assert!((p.x - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn brent_cubic() {
        let r = brent(|x| x * x * x - x - 1.0, 1.0, 2.0, Tolerance::default()).unwrap();
        assert!((r.x - 1.324_717_957_244_746).abs() < 1e-12);
    }

    #[test]
    fn expansion_reports_failure() {
        assert!(expand(1.0, 2.0, 10, |x| x > 1e9).is_err());
        assert_eq!(expand(1.0, 2.0, 10, |x| x > 100.0).unwrap(), 128.0);
    }
}

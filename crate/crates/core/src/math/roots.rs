//! Bracketing root finders.

use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root<T> {
    pub x: T,
    /// `f(x)` at the returned point.
    pub residual: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Illinois-modified false position on a sign-changing bracket.
///
/// `lo` and `hi` carry `(x, f(x))` pairs with `f(lo) <= 0 <= f(hi)` or the
/// reverse. Iterates until `|f(x)| <= f_tol`, the bracket collapses to
/// rounding level, or `max_iter` steps have been taken; the best point seen
/// is returned with `converged` set accordingly. A false-position step that
/// leaves the bracket interior falls back to bisection.
pub fn illinois<T, F>(mut f: F, lo: (T, T), hi: (T, T), f_tol: T, max_iter: usize) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let (mut a, mut fa) = lo;
    let (mut b, mut fb) = hi;
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() && fa != T::zero() && fb != T::zero()
    {
        return Err(Error::NoBracket(format!(
            "f({}) = {}, f({}) = {}",
            a.as_f64(),
            fa.as_f64(),
            b.as_f64(),
            fb.as_f64()
        )));
    }
    let mut best = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    if best.1.abs() <= f_tol {
        return Ok(Root {
            x: best.0,
            residual: best.1,
            iterations: 0,
            converged: true,
        });
    }
    // +1 when `b` was replaced last, -1 when `a` was.
    let mut side = 0i8;
    for it in 1..=max_iter {
        let mut c = b - fb * (b - a) / (fb - fa);
        let (lo_x, hi_x) = if a < b { (a, b) } else { (b, a) };
        if !(c > lo_x && c < hi_x) {
            c = (a + b) * T::lit(0.5);
        }
        let fc = f(c)?;
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.abs() <= f_tol {
            return Ok(Root {
                x: c,
                residual: fc,
                iterations: it,
                converged: true,
            });
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= T::lit(0.5);
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= T::lit(0.5);
            }
            side = -1;
        }
        let scale = a.abs().max(b.abs()).max(T::one());
        if (b - a).abs() <= T::lit(4.0) * T::epsilon() * scale {
            return Ok(Root {
                x: best.0,
                residual: best.1,
                iterations: it,
                converged: false,
            });
        }
    }
    Ok(Root {
        x: best.0,
        residual: best.1,
        iterations: max_iter,
        converged: false,
    })
}

/// Newton's method safeguarded by bisection on the bracket `[lo, hi]`.
///
/// `f` returns `(value, derivative)`; `f(lo)` and `f(hi)` must differ in
/// sign. Stops at the first iterate with `|f| <= f_tol`; errors if the
/// bracket collapses or `max_iter` is reached first.
pub fn newton_bisect<T, F>(mut f: F, lo: T, hi: T, guess: T, f_tol: T, max_iter: usize) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> (T, T),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == T::zero() {
        return Ok(Root { x: lo, residual: flo, iterations: 0, converged: true });
    }
    if fhi == T::zero() {
        return Ok(Root { x: hi, residual: fhi, iterations: 0, converged: true });
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket(format!(
            "f({}) = {}, f({}) = {}",
            lo.as_f64(),
            flo.as_f64(),
            hi.as_f64(),
            fhi.as_f64()
        )));
    }
    // Orient so that f(neg) < 0 < f(pos).
    let (mut neg, mut pos) = if flo < T::zero() { (lo, hi) } else { (hi, lo) };
    let mut x = if guess > lo.min(hi) && guess < lo.max(hi) {
        guess
    } else {
        (lo + hi) * T::lit(0.5)
    };
    let (mut fx, mut dfx) = f(x);
    if fx.abs() <= f_tol {
        return Ok(Root { x, residual: fx, iterations: 0, converged: true });
    }
    for it in 1..=max_iter {
        if fx < T::zero() {
            neg = x;
        } else {
            pos = x;
        }
        let newton = x - fx / dfx;
        let inside = newton > neg.min(pos) && newton < neg.max(pos);
        x = if dfx != T::zero() && newton.is_finite() && inside {
            newton
        } else {
            (neg + pos) * T::lit(0.5)
        };
        (fx, dfx) = f(x);
        if fx.abs() <= f_tol {
            return Ok(Root { x, residual: fx, iterations: it, converged: true });
        }
        if (pos - neg).abs() <= T::lit(4.0) * T::epsilon() * x.abs() {
            break;
        }
    }
    Err(Error::NoConvergence {
        what: "Newton iteration",
        iterations: max_iter,
        residual: fx.as_f64(),
    })
}

//! Adaptive Simpson quadrature.

use crate::{Error, Real, Result};

/// Result of a numerical integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    /// Sum of the local Richardson error estimates.
    pub error_estimate: T,
    pub evaluations: usize,
}

const MIN_DEPTH: usize = 3;

struct Acc<T> {
    value: T,
    error: T,
    evaluations: usize,
    // Worst unconverged panel at the depth limit: (a, b, |delta|/15).
    worst: Option<(T, T, T)>,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Panels are bisected until the Richardson estimate `|S2 - S1| / 15` meets
/// the panel's share of the tolerance. Fails with [`Error::Quadrature`],
/// naming the worst panel, if any panel is still unconverged at `max_depth`.
/// Errors returned by `f` are propagated.
pub fn adaptive_simpson<T, F>(
    mut f: F,
    a: T,
    b: T,
    abs_tol: T,
    max_depth: usize,
) -> Result<Integral<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if a == b {
        return Ok(Integral {
            value: T::zero(),
            error_estimate: T::zero(),
            evaluations: 0,
        });
    }
    if !(abs_tol > T::zero()) {
        return Err(Error::Argument("quadrature tolerance must be positive".into()));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = (a + b) * T::lit(0.5);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    let mut acc = Acc {
        value: T::zero(),
        error: T::zero(),
        evaluations: 3,
        worst: None,
    };
    refine(&mut f, a, b, fa, fm, fb, whole, abs_tol, 0, max_depth, &mut acc)?;
    if let Some((wa, wb, err)) = acc.worst {
        return Err(Error::Quadrature {
            a: wa.as_f64(),
            b: wb.as_f64(),
            error: err.as_f64(),
        });
    }
    Ok(Integral {
        value: acc.value,
        error_estimate: acc.error,
        evaluations: acc.evaluations,
    })
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T, F>(
    f: &mut F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
    max_depth: usize,
    acc: &mut Acc<T>,
) -> Result<()>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let m = (a + b) * T::lit(0.5);
    let lm = (a + m) * T::lit(0.5);
    let rm = (m + b) * T::lit(0.5);
    let flm = f(lm)?;
    let frm = f(rm)?;
    acc.evaluations += 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let err = delta.abs() / T::lit(15.0);
    // Below this the estimate is rounding noise.
    let floor = T::epsilon() * T::lit(64.0) * (left.abs() + right.abs());
    let converged = depth >= MIN_DEPTH && (err <= tol || err <= floor);
    if converged || depth >= max_depth {
        if !converged {
            let worse = acc.worst.is_none_or(|(_, _, e)| err > e);
            if worse {
                acc.worst = Some((a, b, err));
            }
        }
        acc.value += left + right + delta / T::lit(15.0);
        acc.error += err;
        return Ok(());
    }
    let half = tol * T::lit(0.5);
    refine(f, a, m, fa, flm, fm, left, half, depth + 1, max_depth, acc)?;
    refine(f, m, b, fm, frm, fb, right, half, depth + 1, max_depth, acc)
}

//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 50;

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Numeric(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numeric(format!(
            "adaptive Simpson did not converge on [{a}, {b}]"
        )));
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first split into 16 panels so that integrands which are
/// flat near the endpoints are not mistaken for zero.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = simpson(fa, fm, fb, lo, hi);
        total += recurse(
            &f,
            lo,
            hi,
            fa,
            fm,
            fb,
            whole,
            tol / PANELS as f64,
            MAX_DEPTH,
        )?;
    }
    Ok(total)
}

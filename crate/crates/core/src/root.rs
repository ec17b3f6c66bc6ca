//! Bracketed scalar root finding.
//!
//! [`find_root`] is Brent's method: inverse quadratic interpolation and
//! secant steps, falling back to bisection whenever an interpolated step
//! would leave the bracket or fail to shrink it fast enough. The bracket
//! never grows, so the returned root always lies inside the initial one.

use crate::error::RootError;

/// Maximum number of expansions attempted by the bracket search helpers.
pub const MAX_EXPANSIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub bracket: Option<(f64, f64)>,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 4.0 * f64::EPSILON,
            max_iter: 200,
            bracket: None,
        }
    }
}

impl RootConfig {
    pub fn bracketed(lo: f64, hi: f64) -> Self {
        Self {
            bracket: Some((lo, hi)),
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<(), RootError> {
        if !(self.abs_tol > 0.0) {
            return Err(RootError::InvalidConfig("abs_tol must be > 0".into()));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(RootError::InvalidConfig("rel_tol must be >= 0".into()));
        }
        if self.max_iter == 0 {
            return Err(RootError::InvalidConfig("max_iter must be >= 1".into()));
        }
        if let Some((lo, hi)) = self.bracket {
            if !(lo < hi) {
                return Err(RootError::InvalidConfig(format!(
                    "bracket must satisfy lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

#[inline]
fn opposite_signs(a: f64, b: f64) -> bool {
    (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)
}

/// Grow an interval from `x0` until `f` changes sign across it.
///
/// Starts from `[x0, x0 + (grow − 1)·max(|x0|, 1)]` and repeatedly pushes out
/// whichever end has the smaller `|f|`, by `grow` times the current width.
pub fn expand_bracket<F>(mut f: F, x0: f64, grow: f64) -> Result<(f64, f64), RootError>
where
    F: FnMut(f64) -> f64,
{
    if !(grow > 1.0) || !x0.is_finite() {
        return Err(RootError::InvalidConfig(format!(
            "expand_bracket needs finite x0 and grow > 1 (x0 = {x0}, grow = {grow})"
        )));
    }
    let mut lo = x0;
    let mut hi = x0 + (grow - 1.0) * x0.abs().max(1.0);
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    for _ in 0..MAX_EXPANSIONS {
        if f_lo == 0.0 || f_hi == 0.0 || opposite_signs(f_lo, f_hi) {
            return Ok((lo, hi));
        }
        let width = hi - lo;
        if f_lo.abs() < f_hi.abs() {
            lo -= grow * width;
            f_lo = f(lo);
        } else {
            hi += grow * width;
            f_hi = f(hi);
        }
    }
    if f_lo == 0.0 || f_hi == 0.0 || opposite_signs(f_lo, f_hi) {
        return Ok((lo, hi));
    }
    Err(RootError::NoSignChange {
        expansions: MAX_EXPANSIONS,
    })
}

/// Like [`expand_bracket`] but for strictly positive unknowns: the interval
/// `[x0/grow, x0·grow]` is grown multiplicatively so it never reaches zero.
pub fn expand_bracket_log<F>(mut f: F, x0: f64, grow: f64) -> Result<(f64, f64), RootError>
where
    F: FnMut(f64) -> f64,
{
    if !(grow > 1.0) || !(x0 > 0.0) || !x0.is_finite() {
        return Err(RootError::InvalidConfig(format!(
            "expand_bracket_log needs x0 > 0 and grow > 1 (x0 = {x0}, grow = {grow})"
        )));
    }
    let mut lo = x0 / grow;
    let mut hi = x0 * grow;
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    for _ in 0..MAX_EXPANSIONS {
        if f_lo == 0.0 || f_hi == 0.0 || opposite_signs(f_lo, f_hi) {
            return Ok((lo, hi));
        }
        if f_lo.abs() < f_hi.abs() {
            lo /= grow;
            f_lo = f(lo);
        } else {
            hi *= grow;
            f_hi = f(hi);
        }
    }
    if f_lo == 0.0 || f_hi == 0.0 || opposite_signs(f_lo, f_hi) {
        return Ok((lo, hi));
    }
    Err(RootError::NoSignChange {
        expansions: MAX_EXPANSIONS,
    })
}

/// Find a root of `f` inside `cfg.bracket`.
///
/// Without a bracket the search starts from zero and expands with
/// [`expand_bracket`]. Terminates once the bracket half-width is below
/// `(abs_tol + rel_tol·|x|)/2` plus a few ulps of `x`.
pub fn find_root<F>(mut f: F, cfg: &RootConfig) -> Result<Root, RootError>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    let (lo, hi) = match cfg.bracket {
        Some(b) => b,
        None => expand_bracket(&mut f, 0.0, 2.0)?,
    };

    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if !opposite_signs(fa, fb) {
        return Err(RootError::InvalidBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=cfg.max_iter {
        if !opposite_signs(fb, fc) {
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

        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (cfg.abs_tol + cfg.rel_tol * b.abs());
        let half = 0.5 * (c - b);
        if half.abs() <= tol || fb == 0.0 {
            return Ok(Root { x: b, fx: fb, iterations: iter });
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * half * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
    }

    Err(RootError::NoConvergence {
        iterations: cfg.max_iter,
        x: b,
    })
}

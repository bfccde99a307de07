use crate::error::{Error, Result};

/// Root of `f` on a sign-changing bracket.
///
/// Brent's method: inverse quadratic / secant steps, falling back to bisection
/// whenever an interpolated step leaves the bracket or shrinks it too slowly.
/// Terminates when the bracket width is below `tol * max(1, |x|)`.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..300 {
        if fb * fc > 0.0 {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol * b.abs().max(1.0);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
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
        fb = f(b);
    }
    Err(Error::Convergence(format!(
        "root finder exhausted iterations on [{lo}, {hi}]"
    )))
}

/// Newton polish from `x0`, kept inside `[lo, hi]`; returns the best iterate.
pub fn newton_polish<F, D>(f: F, df: D, x0: f64, lo: f64, hi: f64, iters: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = x0;
    let mut best = (f(x).abs(), x);
    for _ in 0..iters {
        let fx = f(x);
        let dfx = df(x);
        if fx == 0.0 || dfx == 0.0 {
            break;
        }
        let nx = (x - fx / dfx).clamp(lo, hi);
        let r = f(nx).abs();
        if r < best.0 {
            best = (r, nx);
        }
        if nx == x {
            break;
        }
        x = nx;
    }
    best.1
}

//! Bessel functions of the first kind for integer order and real argument.
//!
//! Three regimes:
//! - ascending power series when `(x/2)^2` is small against `k + 1`,
//! - Miller backward recurrence normalised by `J_0 + 2 sum J_{2m} = 1` up to
//!   `x = MILLER_MAX_X`,
//! - Hankel asymptotic expansion of `J_0`, `J_1` followed by upward recurrence
//!   (stable because `k <= MAX_ORDER < x`) beyond that.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::roots::find_root;
use crate::error::{Error, Result};

pub const MAX_ORDER: u32 = 200;
pub const MAX_ARG: f64 = 1.0e6;
const MILLER_MAX_X: f64 = 1000.0;

fn check(k: u32, x: f64) -> Result<()> {
    if k > MAX_ORDER {
        return Err(Error::Range(format!("Bessel order {k} exceeds {MAX_ORDER}")));
    }
    if !x.is_finite() || !(0.0..=MAX_ARG).contains(&x) {
        return Err(Error::Range(format!("Bessel argument {x} outside [0, {MAX_ARG}]")));
    }
    Ok(())
}

/// `J_k(x)` for `0 <= k <= 200`, `0 <= x <= 1e6`.
pub fn bessel_j(k: u32, x: f64) -> Result<f64> {
    check(k, x)?;
    Ok(jn(k, x))
}

/// `J_k'(x)`, using `J_k' = (J_{k-1} - J_{k+1}) / 2` and `J_0' = -J_1`.
pub fn bessel_j_prime(k: u32, x: f64) -> Result<f64> {
    check(k, x)?;
    Ok(jn_pair(k, x).1)
}

/// Unchecked `J_k(x)`; callers guarantee the argument ranges.
pub(crate) fn jn(k: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    if half * half <= 0.25 * (k as f64 + 1.0) || x < 1e-3 {
        return series(k, x);
    }
    if x <= MILLER_MAX_X {
        miller(k + 1, x)[k as usize]
    } else {
        upward(k, x).0
    }
}

/// `(J_k(x), J_k'(x))` from a single evaluation sweep.
pub(crate) fn jn_pair(k: u32, x: f64) -> (f64, f64) {
    if k == 0 {
        let (j0, j1) = (jn(0, x), jn(1, x));
        return (j0, -j1);
    }
    if x == 0.0 {
        return (0.0, if k == 1 { 0.5 } else { 0.0 });
    }
    let half = 0.5 * x;
    if half * half <= 0.25 * (k as f64) || x < 1e-3 {
        let (a, b, c) = (series(k - 1, x), series(k, x), series(k + 1, x));
        return (b, 0.5 * (a - c));
    }
    if x <= MILLER_MAX_X {
        let seq = miller(k + 1, x);
        let i = k as usize;
        (seq[i], 0.5 * (seq[i - 1] - seq[i + 1]))
    } else {
        let (jk, jkm1, jkp1) = upward(k, x);
        (jk, 0.5 * (jkm1 - jkp1))
    }
}

fn series(k: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // leading term (x/2)^k / k!
    let mut lead = 1.0;
    for j in 1..=k {
        lead *= half / j as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= q / (m as f64 * (m as f64 + k as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Values `J_0..=J_top` by normalised backward recurrence.
fn miller(top: u32, x: f64) -> Vec<f64> {
    let m = (top as f64).max(x);
    let mut start = (m + 30.0 + 12.0 * m.cbrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let top = top as usize;
    let mut out = vec![0.0; top + 1];
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{j+1}
    let mut cur = 1e-300; // J_j
    let mut norm = 0.0;
    for j in (1..=start).rev() {
        // J_{j-1} = (2j/x) J_j - J_{j+1}
        let prev = j as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        let idx = j - 1;
        if idx <= top {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    norm += cur; // J_0 term
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Hankel asymptotic `J_0`, `J_1` for large `x`.
fn hankel01(x: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    let mut out = [0.0; 2];
    for (nu, slot) in out.iter_mut().enumerate() {
        let mu = 4.0 * (nu * nu) as f64;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term = 1.0;
        let eight_x = 8.0 * x;
        for m in 1..30 {
            let odd = (2 * m - 1) as f64;
            term *= (mu - odd * odd) / (m as f64 * eight_x);
            if m % 2 == 1 {
                // q terms: signs +, -, + ...
                let sign = if (m / 2) % 2 == 0 { 1.0 } else { -1.0 };
                q += sign * term;
            } else {
                let sign = if (m / 2) % 2 == 1 { -1.0 } else { 1.0 };
                p += sign * term;
            }
            if term.abs() < 1e-17 {
                break;
            }
        }
        // chi = x - (nu/2 + 1/4) pi
        let (cos_chi, sin_chi) = if nu == 0 {
            ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
        } else {
            ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
        };
        *slot = amp * (p * cos_chi - q * sin_chi);
    }
    (out[0], out[1])
}

/// Returns `(J_k, J_{k-1}, J_{k+1})` by upward recurrence from the Hankel values.
fn upward(k: u32, x: f64) -> (f64, f64, f64) {
    let (j0, j1) = hankel01(x);
    let mut prev = -j1; // J_{-1} = -J_1
    let mut cur = j0;
    let mut next = j1;
    for j in 0..k {
        let nn = 2.0 * (j + 1) as f64 / x * next - cur;
        prev = cur;
        cur = next;
        next = nn;
    }
    (cur, prev, next)
}

/// First `count` positive zeros of `J_k`, ascending.
///
/// Zeros are bracketed by a unit-step sign scan starting at `x = k` (no zero of
/// `J_k` lies below its order) and refined with a bracketed root finder.
pub fn bessel_zeros(k: u32, count: usize) -> Result<Vec<f64>> {
    check(k, 0.0)?;
    if count > 10_000 {
        return Err(Error::Range(format!("{count} zeros requested, limit is 10000")));
    }
    let mut zeros = Vec::with_capacity(count);
    let mut lo = (k as f64).max(0.5);
    let mut flo = jn(k, lo);
    while zeros.len() < count {
        let hi = lo + 1.0;
        if hi > MAX_ARG {
            return Err(Error::Range("Bessel zero beyond supported argument".into()));
        }
        let fhi = jn(k, hi);
        if flo == 0.0 {
            zeros.push(lo);
        } else if flo * fhi < 0.0 {
            zeros.push(find_root(|x| jn(k, x), lo, hi, 1e-15)?);
        }
        lo = hi;
        flo = fhi;
    }
    Ok(zeros)
}

/// All zeros of `J_k` strictly below `limit`.
pub fn bessel_zeros_below(k: u32, limit: f64) -> Result<Vec<f64>> {
    check(k, limit.max(0.0))?;
    let mut zeros = Vec::new();
    let mut lo = (k as f64).max(0.5);
    let mut flo = jn(k, lo);
    while lo < limit {
        let hi = lo + 1.0;
        let fhi = jn(k, hi);
        if flo * fhi < 0.0 {
            let z = find_root(|x| jn(k, x), lo, hi, 1e-15)?;
            if z < limit {
                zeros.push(z);
            }
        }
        lo = hi;
        flo = fhi;
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_oracle(k: u32, x: f64) -> f64 {
        // plain power series with compensated-free summation; fine for x < 8
        let mut sum = 0.0;
        let mut fact_m = 1.0;
        for m in 0..60u32 {
            if m > 0 {
                fact_m *= m as f64;
            }
            let mut fact_mk = 1.0;
            for j in 1..=(m + k) {
                fact_mk *= j as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (0.5 * x).powi((2 * m + k) as i32) / (fact_m * fact_mk);
        }
        sum
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        for k in 1..5 {
            assert_eq!(bessel_j(k, 0.0).unwrap(), 0.0);
        }
        assert_eq!(bessel_j_prime(1, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn matches_power_series_for_moderate_x() {
        for k in 0..6 {
            for &x in &[0.1, 0.7, 1.5, 3.0, 5.5] {
                let a = bessel_j(k, x).unwrap();
                let b = series_oracle(k, x);
                assert!((a - b).abs() <= 1e-13 * b.abs().max(0.1), "k={k} x={x} {a} {b}");
            }
        }
    }

    #[test]
    fn reference_values() {
        // reference values computed at 30 digits
        let cases = [
            (0, 10.0, -0.245_935_764_451_348_3),
            (1, 10.0, 0.043_472_746_168_861_44),
            (5, 30.0, -0.143_240_295_512_077_08),
            (0, 1500.0, -0.016_085_852_188_690_33),
        ];
        for (k, x, v) in cases {
            let got = bessel_j(k, x).unwrap();
            assert!((got - v).abs() < 1e-13, "J_{k}({x}) = {got}, want {v}");
        }
    }

    #[test]
    fn miller_and_hankel_agree_at_crossover() {
        for k in [0u32, 1, 7, 40] {
            for &x in &[1000.0, 999.9] {
                let a = miller(k + 1, x)[k as usize];
                let b = upward(k, x).0;
                assert!((a - b).abs() < 1e-13, "k={k} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn recurrence_residual() {
        for k in 1..60u32 {
            for &x in &[0.3, 2.0, 9.0, 33.0, 250.0, 4000.0] {
                let r = jn(k - 1, x) + jn(k + 1, x) - 2.0 * k as f64 / x * jn(k, x);
                assert!(r.abs() <= 1e-11, "k={k} x={x} r={r}");
            }
        }
    }

    #[test]
    fn derivative_identities() {
        for &x in &[0.5, 1.0, 2.0] {
            let d = bessel_j_prime(0, x).unwrap();
            assert!((d + bessel_j(1, x).unwrap()).abs() <= 1e-13);
        }
        let j11 = 3.831_705_970_207_512;
        assert!(bessel_j_prime(0, j11).unwrap().abs() < 1e-10);
    }

    #[test]
    fn wronskian_type_identity() {
        // J_k J_{k+1}' - J_k' J_{k+1} = J_k^2 + J_{k+1}^2 - (2k+1)/x J_k J_{k+1}
        for k in 0..10u32 {
            for &x in &[0.8, 4.0, 17.0] {
                let (a, da) = jn_pair(k, x);
                let (b, db) = jn_pair(k + 1, x);
                let lhs = a * db - da * b;
                let rhs = a * a + b * b - (2 * k + 1) as f64 / x * a * b;
                assert!((lhs - rhs).abs() < 1e-10, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn first_zeros() {
        let z0 = bessel_zeros(0, 3).unwrap();
        assert!((z0[0] - 2.404_825_557_695_773).abs() < 1e-13);
        let z1 = bessel_zeros(1, 1).unwrap();
        assert!((z1[0] - 3.831_705_970_207_512).abs() < 1e-13);
        for z in &z0 {
            assert!(jn(0, *z).abs() < 1e-11);
        }
    }

    #[test]
    fn zeros_interlace() {
        let tables: Vec<Vec<f64>> = (0..=4).map(|k| bessel_zeros(k, 51).unwrap()).collect();
        for k in 0..4 {
            for i in 0..50 {
                let (a, b, c) = (tables[k][i], tables[k + 1][i], tables[k][i + 1]);
                assert!(a < b && b < c, "interlacing fails at k={k} i={i}");
                assert!(jn(k as u32, a).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn range_errors() {
        assert!(matches!(bessel_j(201, 1.0), Err(Error::Range(_))));
        assert!(matches!(bessel_j(0, 2e6), Err(Error::Range(_))));
        assert!(matches!(bessel_j(0, -1.0), Err(Error::Range(_))));
    }
}

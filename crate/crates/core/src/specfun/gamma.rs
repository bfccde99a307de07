use std::f64::consts::PI;

use crate::error::{Error, Result};

// Stirling series coefficients B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const STIRLING_MIN: f64 = 16.0;

/// Gamma function for `0 < x <= 171`.
///
/// Integers and half-integers go through the exact recurrence from `Γ(1) = 1`
/// and `Γ(1/2) = √π`; other arguments are shifted above 16 and use the Stirling series.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::ParamDomain(format!("gamma requires x > 0, got {x}")));
    }
    if x > 171.0 {
        return Err(Error::Range(format!("gamma({x}) overflows")));
    }
    let twice = 2.0 * x;
    if twice.fract() == 0.0 {
        let (mut acc, mut base) = if (twice as u64) % 2 == 0 {
            (1.0, 1.0)
        } else {
            (PI.sqrt(), 0.5)
        };
        while base < x {
            acc *= base;
            base += 1.0;
        }
        return Ok(acc);
    }
    Ok(stirling_shifted(x))
}

fn stirling_shifted(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_MIN {
        prod *= z;
        z += 1.0;
    }
    let iz2 = 1.0 / (z * z);
    let mut series = 0.0;
    for c in STIRLING.iter().rev() {
        series = series * iz2 + c;
    }
    series /= z;
    // z^{z-1/2} split in two halves to stay finite up to z = 171
    let half = z.powf(0.5 * (z - 0.5));
    (2.0 * PI).sqrt() * half * (-z).exp() * half * series.exp() / prod
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`: `2 π^{n/2} / Γ(n/2)`.
pub fn unit_sphere_area(n: u32) -> Result<f64> {
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_fn(n as f64 / 2.0)?)
}

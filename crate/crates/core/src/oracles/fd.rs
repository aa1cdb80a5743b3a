use crate::error::{Error, Result};

/// Central difference `(v(t*+dt) - v(t*-dt)) / (2 dt)` from three samples
/// `t* - dt, t*, t* + dt` given in any order.
pub fn fd_derivative(samples: &[(f64, f64)], at: f64) -> Result<f64> {
    if samples.len() != 3 {
        return Err(Error::BadSamples(format!("need 3 samples, got {}", samples.len())));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (lo, mid, hi) = (s[0], s[1], s[2]);
    let (d1, d2) = (mid.0 - lo.0, hi.0 - mid.0);
    let scale = d1.abs().max(d2.abs()).max(f64::MIN_POSITIVE);
    if !(d1 > 0.0) || (d1 - d2).abs() > 1e-9 * scale {
        return Err(Error::BadSamples(format!("spacings {d1} and {d2} differ")));
    }
    if (mid.0 - at).abs() > 1e-9 * scale {
        return Err(Error::BadSamples(format!("middle sample at {} but t* = {at}", mid.0)));
    }
    Ok((hi.1 - lo.1) / (hi.0 - lo.0))
}

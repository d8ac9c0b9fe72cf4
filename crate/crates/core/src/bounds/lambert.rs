use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / std::f64::consts::E;

/// Principal branch `W(x)`, `x >= -1/e`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < -INV_E - 1e-15 {
        return Err(Error::domain(format!("lambert W needs x >= -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= -INV_E + 1e-15 {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > std::f64::consts::E {
        // Newton on w + ln w = ln x, which stays well scaled for huge x.
        let lx = x.ln();
        let mut w = lx - lx.ln() + lx.ln() / lx;
        for _ in 0..100 {
            let step = (w + w.ln() - lx) / (1.0 + 1.0 / w);
            w -= step;
            if step.abs() <= 1e-15 * w {
                break;
            }
        }
        return Ok(w);
    }
    let mut w = if x < -0.32 {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p()
    };
    // Halley
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// `-1 - sqrt(2u) - u`, a lower bound on `W_{-1}(-e^{-u-1})` for `u > 0`.
pub fn lambert_w_minus1_lb(u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("need u > 0, got {u}")));
    }
    Ok(-1.0 - (2.0 * u).sqrt() - u)
}

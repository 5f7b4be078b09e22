use serde::Serialize;

use crate::{Error, Result};

/// Least-squares line through `(log eps, log value)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for an exact fit).
    pub stderr: f64,
    pub points: usize,
    /// Pairs dropped for a nonpositive value.
    pub excluded: usize,
}

impl RateFit {
    pub fn predict(&self, eps: f64) -> f64 {
        (self.intercept + self.slope * eps.ln()).exp()
    }
}

/// Fits `log value = intercept + slope log eps`. Nonpositive values are
/// excluded with a warning; fewer than three remaining pairs is an error.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    let mut pts = Vec::with_capacity(pairs.len());
    for &(e, v) in pairs {
        if !(e > 0.0) {
            return Err(Error::Parameter(format!("eps must be positive, got {e}")));
        }
        if v > 0.0 && v.is_finite() {
            pts.push((e.ln(), v.ln()));
        } else {
            log::warn!("excluding nonpositive value {v} at eps = {e} from the rate fit");
        }
    }
    let n = pts.len();
    if n < 3 {
        return Err(Error::Insufficient(format!("rate fit needs 3 positive points, have {n}")));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Insufficient("rate fit needs distinct eps values".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(RateFit {
        slope,
        intercept,
        stderr,
        points: n,
        excluded: pairs.len() - n,
    })
}

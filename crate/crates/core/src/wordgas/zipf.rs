use serde::{Deserialize, Serialize};

use super::corpus::RankedSpectrum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfReport {
    /// Negated least-squares slope of `ln count` against `ln rank`.
    pub exponent: f64,
    pub r2: f64,
}

/// Log-log regression over ranks `1..=L`.
pub fn zipf_fit(counts: &[f64]) -> Result<ZipfReport> {
    if counts.len() < 3 {
        return Err(Error::TooFewLevels {
            needed: 3,
            found: counts.len(),
        });
    }
    if let Some(c) = counts.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
        return Err(Error::InvalidInput(format!("count {c} is not positive")));
    }
    let xs: Vec<f64> = (1..=counts.len()).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(ZipfReport { exponent: -slope, r2 })
}

pub fn zipf_report(spectrum: &RankedSpectrum) -> Result<ZipfReport> {
    zipf_fit(&spectrum.occupations())
}

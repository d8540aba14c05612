//! Least-squares fits of Cesàro decay against polynomial and logarithmic models.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayModel {
    /// `C_N ≈ K N^{−p}`.
    PowerLaw,
    /// `C_N ≈ K (log N)^{−p}`.
    LogPower,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    /// Decay exponent `p` (positive for decaying data).
    pub exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log C`.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelComparison {
    pub power_law: DecayFit,
    pub log_power: DecayFit,
    pub preferred: DecayModel,
}

pub fn fit_decay(n: &[usize], c: &[f64], model: DecayModel) -> Result<DecayFit> {
    if n.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: n.len(), found: c.len() });
    }
    if n.len() < 2 {
        return Err(Error::InvalidArgument("need at least two grid points".into()));
    }
    let mut xs = Vec::with_capacity(n.len());
    let mut ys = Vec::with_capacity(n.len());
    for (&ni, &ci) in n.iter().zip(c) {
        if !(ci > 0.0) || ni < 3 {
            return Err(Error::InvalidArgument("fits need C_N > 0 and N ≥ 3".into()));
        }
        let ln = (ni as f64).ln();
        xs.push(match model {
            DecayModel::PowerLaw => ln,
            DecayModel::LogPower => ln.ln(),
        });
        ys.push(ci.ln());
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("grid points must be distinct".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(DecayFit { model, exponent: -slope, intercept, residual: (rss / k).sqrt() })
}

/// Fits both models; ties go to the power law.
pub fn compare_models(n: &[usize], c: &[f64]) -> Result<ModelComparison> {
    let power_law = fit_decay(n, c, DecayModel::PowerLaw)?;
    let log_power = fit_decay(n, c, DecayModel::LogPower)?;
    let preferred = if log_power.residual < power_law.residual { DecayModel::LogPower } else { DecayModel::PowerLaw };
    Ok(ModelComparison { power_law, log_power, preferred })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<usize> {
        (8..=16).map(|k| 1usize << k).collect()
    }

    #[test]
    fn synthetic_power_law() {
        let n = grid();
        let c: Vec<f64> = n.iter().map(|&x| (x as f64).powf(-0.3)).collect();
        let m = compare_models(&n, &c).unwrap();
        assert!((m.power_law.exponent - 0.3).abs() < 1e-6);
        assert_eq!(m.preferred, DecayModel::PowerLaw);
    }

    #[test]
    fn synthetic_log_power() {
        let n = grid();
        let c: Vec<f64> = n.iter().map(|&x| (x as f64).ln().powf(-1.0 / 6.0)).collect();
        let m = compare_models(&n, &c).unwrap();
        assert!((m.log_power.exponent - 1.0 / 6.0).abs() < 1e-6);
        assert_eq!(m.preferred, DecayModel::LogPower);
    }

    #[test]
    fn constant_series() {
        let n = grid();
        let c = vec![0.25; n.len()];
        let m = compare_models(&n, &c).unwrap();
        assert!(m.power_law.exponent.abs() < 1e-12 && m.log_power.exponent.abs() < 1e-12);
    }
}

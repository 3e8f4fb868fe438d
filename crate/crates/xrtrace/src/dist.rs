//! Sample characterization and Q-Q goodness of fit against the normal,
//! Laplace and logistic families in their standardized forms.

use crate::error::{Error, Result};
use crate::stats;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Normal,
    Laplace,
    Logistic,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Normal, Family::Laplace, Family::Logistic];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Laplace => "laplace",
            Family::Logistic => "logistic",
        }
    }

    /// Method-of-moments scale so the standardized sample matches the
    /// standard form of the family.
    pub fn scale_from_std_dev(&self, std_dev: f64) -> f64 {
        match self {
            Family::Normal => std_dev,
            Family::Laplace => std_dev / std::f64::consts::SQRT_2,
            Family::Logistic => std_dev * 3f64.sqrt() / std::f64::consts::PI,
        }
    }
}

/// Summary statistics plus a histogram of one sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Fitted location/scale and Q-Q goodness for one candidate family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFit {
    pub family: Family,
    pub location: f64,
    pub scale: f64,
    /// (theoretical quantile, standardized sample quantile) pairs.
    pub qq_points: Vec<(f64, f64)>,
    /// Squared Pearson correlation of the Q-Q points.
    pub linearity: f64,
}

impl DistributionFit {
    /// CSV export: `p,theoretical,sample` for external plotting.
    pub fn qq_csv(&self) -> String {
        let n = self.qq_points.len();
        let mut out = String::from("p,theoretical,sample\n");
        for (i, (t, s)) in self.qq_points.iter().enumerate() {
            let p = (i as f64 + 0.5) / n as f64;
            out.push_str(&format!("{p},{t},{s}\n"));
        }
        out
    }
}

/// Summarize a sample with a Freedman-Diaconis histogram (30-bin fallback).
pub fn summarize(sample: &[f64]) -> Result<SampleSummary> {
    if sample.is_empty() {
        return Err(Error::InsufficientData { need: 1, got: 0 });
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let min = sorted[0];
    let max = sorted[n - 1];
    let iqr = stats::quantile_sorted(&sorted, 0.75) - stats::quantile_sorted(&sorted, 0.25);
    let fd_width = 2.0 * iqr / (n as f64).cbrt();
    let bins = if fd_width > 0.0 && max > min {
        (((max - min) / fd_width).ceil() as usize).clamp(1, 1000)
    } else {
        30
    };
    let span = (max - min).max(f64::MIN_POSITIVE);
    let mut counts = vec![0usize; bins];
    for &x in &sorted {
        let idx = (((x - min) / span) * bins as f64) as usize;
        counts[idx.min(bins - 1)] += 1;
    }
    let bin_edges = (0..=bins)
        .map(|i| min + span * i as f64 / bins as f64)
        .collect();
    Ok(SampleSummary {
        n,
        mean: stats::mean(sample),
        std_dev: stats::std_dev(sample),
        min,
        max,
        bin_edges,
        counts,
    })
}

/// Inverse CDF of the standard form of a family.
pub fn theoretical_quantile(family: Family, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || p == 0.0 || p == 1.0 || p.is_nan() {
        return Err(Error::Domain(format!(
            "probability must be in (0, 1), got {p}"
        )));
    }
    Ok(match family {
        Family::Normal => normal_quantile(p),
        Family::Laplace => {
            let d = p - 0.5;
            -d.signum() * (1.0 - 2.0 * d.abs()).ln()
        }
        Family::Logistic => (p / (1.0 - p)).ln(),
    })
}

/// Standard normal inverse CDF via Acklam's rational approximation,
/// absolute error below 1.2e-9.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

/// Q-Q points of the sample against one family. The sample is standardized
/// by method-of-moments location/scale so a perfect fit lies on y = x;
/// plotting positions are (i - 0.5)/n.
pub fn qq_points(sample: &[f64], family: Family) -> Result<DistributionFit> {
    let n = sample.len();
    if n < 3 {
        return Err(Error::InsufficientData { need: 3, got: n });
    }
    let location = stats::mean(sample);
    let std_dev = stats::std_dev(sample);
    if std_dev == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let scale = family.scale_from_std_dev(std_dev);
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut points = Vec::with_capacity(n);
    for (i, x) in sorted.iter().enumerate() {
        let p = (i as f64 + 0.5) / n as f64;
        points.push((theoretical_quantile(family, p)?, (x - location) / scale));
    }
    let linearity = stats::r_squared(&points);
    Ok(DistributionFit {
        family,
        location,
        scale,
        qq_points: points,
        linearity,
    })
}

/// Fit all three families and select the one with the highest Q-Q
/// linearity. Ties break Normal > Laplace > Logistic.
pub fn fit_select(sample: &[f64]) -> Result<(Family, Vec<DistributionFit>)> {
    if sample.len() < 30 {
        return Err(Error::InsufficientData {
            need: 30,
            got: sample.len(),
        });
    }
    let fits: Vec<DistributionFit> = Family::ALL
        .iter()
        .map(|&f| qq_points(sample, f))
        .collect::<Result<_>>()?;
    let best = fits
        .iter()
        .max_by(|a, b| a.linearity.partial_cmp(&b.linearity).unwrap())
        .unwrap()
        .family;
    Ok((best, fits))
}

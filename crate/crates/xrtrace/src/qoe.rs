//! Time-window QoE scoring, scenario comparison and raw sensor data-rate
//! arithmetic.
//!
//! Per window n: q = ln(F_n / f_min), p = ln(R_n / r_min),
//! g = exp(L_n / l_min); total = sum q + sum p - u * sum g.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QoeParams {
    /// Minimum frame rate, frames/s.
    pub f_min: f64,
    /// Minimum resolution, total pixels per frame.
    pub r_min: f64,
    /// Latency reference, milliseconds.
    pub l_min: f64,
    /// Latency penalty factor.
    pub u: f64,
}

impl Default for QoeParams {
    /// Anchored at the observed worst cases of the four evaluation
    /// scenarios: 9 FPS, 1024x540 pixels, 40 ms.
    fn default() -> Self {
        QoeParams {
            f_min: 9.0,
            r_min: 1024.0 * 540.0,
            l_min: 40.0,
            u: 0.2,
        }
    }
}

impl QoeParams {
    fn validate(&self) -> Result<()> {
        if self.f_min <= 0.0 || self.r_min <= 0.0 || self.l_min <= 0.0 || self.u <= 0.0 {
            return Err(Error::Domain("QoE parameters must be strictly positive".into()));
        }
        Ok(())
    }
}

/// Per-window measurements of one rendering scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioWindows {
    pub name: String,
    /// Average frame rate per window, frames/s.
    pub fps: Vec<f64>,
    /// Average resolution per window, total pixels.
    pub pixels: Vec<f64>,
    /// Average latency per window, milliseconds.
    pub latency_ms: Vec<f64>,
}

impl ScenarioWindows {
    fn validate(&self) -> Result<()> {
        let n = self.fps.len();
        if n == 0 || self.pixels.len() != n || self.latency_ms.len() != n {
            return Err(Error::Domain(format!(
                "scenario `{}` needs equal-length, nonempty window lists",
                self.name
            )));
        }
        let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0);
        if !positive(&self.fps) || !positive(&self.pixels) || !positive(&self.latency_ms) {
            return Err(Error::Domain(format!(
                "scenario `{}` has non-positive window values",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QoeReport {
    pub name: String,
    pub q_terms: Vec<f64>,
    pub p_terms: Vec<f64>,
    pub g_terms: Vec<f64>,
    pub total: f64,
    pub average_per_window: f64,
}

/// Evaluate the windowed QoE model for one scenario.
pub fn qoe_total(scenario: &ScenarioWindows, params: &QoeParams) -> Result<QoeReport> {
    params.validate()?;
    scenario.validate()?;
    let q_terms: Vec<f64> = scenario.fps.iter().map(|f| (f / params.f_min).ln()).collect();
    let p_terms: Vec<f64> = scenario
        .pixels
        .iter()
        .map(|r| (r / params.r_min).ln())
        .collect();
    let g_terms: Vec<f64> = scenario
        .latency_ms
        .iter()
        .map(|l| (l / params.l_min).exp())
        .collect();
    let total = q_terms.iter().sum::<f64>() + p_terms.iter().sum::<f64>()
        - params.u * g_terms.iter().sum::<f64>();
    let n = scenario.fps.len() as f64;
    Ok(QoeReport {
        name: scenario.name.clone(),
        average_per_window: total / n,
        q_terms,
        p_terms,
        g_terms,
        total,
    })
}

/// Scenarios ranked by average per-window QoE, best first. Ties keep the
/// input order.
pub fn compare_scenarios(
    scenarios: &[ScenarioWindows],
    params: &QoeParams,
) -> Result<Vec<QoeReport>> {
    if scenarios.len() < 2 {
        return Err(Error::Domain("need at least 2 scenarios to compare".into()));
    }
    let mut reports: Vec<QoeReport> = scenarios
        .iter()
        .map(|s| qoe_total(s, params))
        .collect::<Result<_>>()?;
    reports.sort_by(|a, b| b.average_per_window.partial_cmp(&a.average_per_window).unwrap());
    Ok(reports)
}

/// Calibration: grid-search (u, f_min, r_min, l_min) minimizing the sum of
/// squared differences between each scenario's average per-window QoE and
/// its target value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub best_params: QoeParams,
    pub residual: f64,
    pub achieved: Vec<(String, f64)>,
    pub targets: Vec<(String, f64)>,
}

pub fn calibrate(
    scenarios: &[ScenarioWindows],
    targets: &[(String, f64)],
) -> Result<CalibrationReport> {
    if scenarios.len() != targets.len() {
        return Err(Error::Domain("one target per scenario required".into()));
    }
    let mut best: Option<(f64, QoeParams)> = None;
    for &f_min in &[5.0, 7.0, 9.0, 12.0, 15.0] {
        for &r_scale in &[0.5, 1.0, 2.0] {
            let r_min = 1024.0 * 540.0 * r_scale;
            for &l_min in &[20.0, 30.0, 40.0, 60.0, 80.0] {
                for ui in 1..=40 {
                    let u = ui as f64 * 0.025;
                    let params = QoeParams { f_min, r_min, l_min, u };
                    let mut residual = 0.0;
                    let mut ok = true;
                    for (scenario, (_, target)) in scenarios.iter().zip(targets) {
                        match qoe_total(scenario, &params) {
                            Ok(report) => {
                                let d = report.average_per_window - target;
                                residual += d * d;
                            }
                            Err(_) => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok && best.as_ref().is_none_or(|(b, _)| residual < *b) {
                        best = Some((residual, params));
                    }
                }
            }
        }
    }
    let (residual, best_params) = best.ok_or(Error::OrderSelection)?;
    let achieved = scenarios
        .iter()
        .map(|s| {
            let r = qoe_total(s, &best_params).unwrap();
            (s.name.clone(), r.average_per_window)
        })
        .collect();
    Ok(CalibrationReport {
        best_params,
        residual,
        achieved,
        targets: targets.to_vec(),
    })
}

pub const HIGH_RES_PIXELS: f64 = 2048.0 * 1080.0;
pub const LOW_RES_PIXELS: f64 = 1024.0 * 540.0;

/// The four measured rendering scenarios with per-window values sampled
/// uniformly from their reported ranges: remote/local crossed with
/// high (2048x1080) and low (1024x540) resolution.
pub fn sample_evaluation_scenarios(seed: u64, windows: usize) -> Vec<ScenarioWindows> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut build = |name: &str, fps: (f64, f64), pixels: f64, latency: (f64, f64)| {
        let sample = |rng: &mut rand_chacha::ChaCha8Rng, (lo, hi): (f64, f64)| -> Vec<f64> {
            (0..windows)
                .map(|_| if lo == hi { lo } else { rng.random_range(lo..hi) })
                .collect()
        };
        ScenarioWindows {
            name: name.into(),
            fps: sample(&mut rng, fps),
            pixels: vec![pixels; windows],
            latency_ms: sample(&mut rng, latency),
        }
    };
    vec![
        build("remote_high", (55.0, 60.0), HIGH_RES_PIXELS, (68.0, 86.0)),
        build("remote_low", (55.0, 60.0), LOW_RES_PIXELS, (59.0, 65.0)),
        build("local_high", (9.0, 21.0), HIGH_RES_PIXELS, (40.0, 110.0)),
        build("local_low", (25.0, 33.0), LOW_RES_PIXELS, (40.0, 40.0)),
    ]
}

/// Raw sensor data rate report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RateReport {
    pub bits_per_second: u128,
    pub mbit_per_second: f64,
    pub gbit_per_second: f64,
    /// Binary gigabits (2^30) per second.
    pub gibit_per_second: f64,
}

/// rate = width * height * bits_per_pixel * fps * sensor_count.
pub fn raw_data_rate(
    width: u64,
    height: u64,
    bits_per_pixel: u64,
    fps: u64,
    sensor_count: u64,
) -> Result<RateReport> {
    if width == 0 || height == 0 || bits_per_pixel == 0 || fps == 0 || sensor_count == 0 {
        return Err(Error::Domain("all rate arguments must be positive".into()));
    }
    let bits = width as u128 * height as u128 * bits_per_pixel as u128 * fps as u128
        * sensor_count as u128;
    Ok(RateReport {
        bits_per_second: bits,
        mbit_per_second: bits as f64 / 1e6,
        gbit_per_second: bits as f64 / 1e9,
        gibit_per_second: bits as f64 / (1u64 << 30) as f64,
    })
}

//! Frame-size prediction pipeline: ADF stationarity test, ACF/PACF,
//! order selection, ARMA(p, q) estimation and walk-forward evaluation.
//!
//! The model is F_t = c + e_t + sum phi_i F_{t-i} + sum theta_i e_{t-i}.
//! Estimation is Hannan-Rissanen (long-AR residual proxy, then least
//! squares) with one refinement pass.

use crate::error::{Error, Result};
use crate::linalg::{ols, ols_with_se};
use crate::stats;
use serde::{Deserialize, Serialize};

/// Asymptotic Dickey-Fuller critical values, constant, no trend.
pub const ADF_CRIT_1PCT: f64 = -3.43;
pub const ADF_CRIT_5PCT: f64 = -2.86;
pub const ADF_CRIT_10PCT: f64 = -2.57;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmaModel {
    pub p: usize,
    pub q: usize,
    pub c: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
}

impl ArmaModel {
    /// AR stationarity via the step-down (inverse Levinson) recursion:
    /// the AR polynomial has all roots outside the unit circle iff every
    /// reflection coefficient has magnitude below 1.
    pub fn is_stationary(&self, tol: f64) -> bool {
        let mut a = self.phi.clone();
        while let Some(&k) = a.last() {
            if k.abs() >= 1.0 - tol {
                return false;
            }
            let m = a.len() - 1;
            let prev: Vec<f64> = (0..m)
                .map(|i| (a[i] + k * a[m - 1 - i]) / (1.0 - k * k))
                .collect();
            a = prev;
        }
        true
    }

    /// MA invertibility: all roots of 1 + theta_1 B + ... outside the unit
    /// circle. Same recursion as `is_stationary` applied to -theta.
    pub fn is_invertible(&self, tol: f64) -> bool {
        let inverse = ArmaModel {
            p: self.q,
            q: 0,
            c: 0.0,
            phi: self.theta.iter().map(|t| -t).collect(),
            theta: vec![],
            sigma2: self.sigma2,
        };
        inverse.is_stationary(tol)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub lags_used: usize,
    /// True iff statistic < the 5% critical value.
    pub reject_unit_root: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastReport {
    pub split_fraction: f64,
    pub train_len: usize,
    pub predictions: Vec<f64>,
    pub actuals: Vec<f64>,
    pub mae: f64,
    pub rmse: f64,
    pub mape: f64,
}

impl ForecastReport {
    /// CSV export: `t,actual,predicted`, t indexed from the series start.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,actual,predicted\n");
        for (i, (a, p)) in self.actuals.iter().zip(&self.predictions).enumerate() {
            out.push_str(&format!("{},{},{}\n", self.train_len + i, a, p));
        }
        out
    }
}

/// Augmented Dickey-Fuller test with constant, no trend.
///
/// Regression: dF_t = alpha + gamma F_{t-1} + sum beta_i dF_{t-i} + e_t.
/// Default lag order is the Schwert rule floor(12 (n/100)^{1/4}), trimmed
/// backward while the last lag is insignificant (|t| < 1.645).
pub fn adf_test(series: &[f64], max_lag: Option<usize>) -> Result<AdfResult> {
    let n = series.len();
    if n < 20 {
        return Err(Error::InsufficientData { need: 20, got: n });
    }
    let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    let mut lag = max_lag.unwrap_or(schwert).min(n / 2 - 2);
    loop {
        let (statistic, last_lag_t) = adf_regression(series, lag)?;
        let trim = lag > 0 && max_lag.is_none() && last_lag_t.map_or(true, |t| t.abs() < 1.645);
        if !trim {
            return Ok(AdfResult {
                statistic,
                lags_used: lag,
                reject_unit_root: statistic < ADF_CRIT_5PCT,
            });
        }
        lag -= 1;
    }
}

/// Returns (gamma t-statistic, t-statistic of the last lagged difference).
fn adf_regression(series: &[f64], lag: usize) -> Result<(f64, Option<f64>)> {
    let n = series.len();
    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    // dF_t for t = lag+1 .. n-1 (series index), i.e. diffs[lag..].
    let mut rows = Vec::with_capacity(diffs.len() - lag);
    let mut y = Vec::with_capacity(diffs.len() - lag);
    for t in lag..diffs.len() {
        let mut row = Vec::with_capacity(2 + lag);
        row.push(1.0);
        row.push(series[t]); // F_{t-1} relative to the response dF at t+1
        for i in 1..=lag {
            row.push(diffs[t - i]);
        }
        rows.push(row);
        y.push(diffs[t]);
    }
    if rows.len() < rows[0].len() + 1 {
        return Err(Error::InsufficientData {
            need: rows[0].len() + 1,
            got: rows.len(),
        });
    }
    let _ = n;
    let (beta, se) = ols_with_se(&rows, &y)?;
    let statistic = beta[1] / se[1];
    let last_lag_t = if lag > 0 {
        Some(beta[1 + lag] / se[1 + lag])
    } else {
        None
    };
    Ok((statistic, last_lag_t))
}

/// Sample autocorrelation, biased covariance normalization, acf[0] = 1.
pub fn acf(series: &[f64], n_lags: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n_lags >= n {
        return Err(Error::InsufficientData { need: n_lags + 1, got: n });
    }
    let m = stats::mean(series);
    let c0: f64 = series.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut out = Vec::with_capacity(n_lags + 1);
    for k in 0..=n_lags {
        let ck: f64 = (0..n - k)
            .map(|t| (series[t] - m) * (series[t + k] - m))
            .sum::<f64>()
            / n as f64;
        out.push(ck / c0);
    }
    Ok(out)
}

/// Partial autocorrelation via the Durbin-Levinson recursion on the ACF.
/// Returns pacf[0] = 1 followed by lags 1..=n_lags.
pub fn pacf(series: &[f64], n_lags: usize) -> Result<Vec<f64>> {
    let rho = acf(series, n_lags)?;
    let mut out = vec![1.0];
    if n_lags == 0 {
        return Ok(out);
    }
    let mut phi_prev = vec![rho[1]];
    out.push(rho[1]);
    for k in 2..=n_lags {
        let num = rho[k]
            - (1..k).map(|j| phi_prev[j - 1] * rho[k - j]).sum::<f64>();
        let den = 1.0 - (1..k).map(|j| phi_prev[j - 1] * rho[j]).sum::<f64>();
        let phi_kk = if den.abs() < 1e-14 { 0.0 } else { num / den };
        let mut phi_new = vec![0.0; k];
        for j in 1..k {
            phi_new[j - 1] = phi_prev[j - 1] - phi_kk * phi_prev[k - 1 - j];
        }
        phi_new[k - 1] = phi_kk;
        out.push(phi_kk);
        phi_prev = phi_new;
    }
    Ok(out)
}

/// One cell of the AIC grid emitted by [`select_order`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AicCell {
    pub p: usize,
    pub q: usize,
    pub aic: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderSelection {
    pub p: usize,
    pub q: usize,
    pub aic_table: Vec<AicCell>,
    pub acf: Vec<f64>,
    pub pacf: Vec<f64>,
}

/// Grid search over (p, q) minimizing AIC = n ln(sigma2) + 2(p + q + 1).
pub fn select_order(series: &[f64], max_p: usize, max_q: usize) -> Result<OrderSelection> {
    let n = series.len();
    let n_lags = (max_p.max(max_q) + 10).min(n.saturating_sub(2));
    let acf_vals = acf(series, n_lags)?;
    let pacf_vals = pacf(series, n_lags)?;
    let mut table = Vec::new();
    let mut best: Option<(f64, usize, usize)> = None;
    for p in 0..=max_p {
        for q in 0..=max_q {
            let Ok(model) = fit_arma(series, p, q) else {
                continue;
            };
            if model.sigma2 <= 0.0 {
                continue;
            }
            let aic = n as f64 * model.sigma2.ln() + 2.0 * (p + q + 1) as f64;
            table.push(AicCell { p, q, aic, sigma2: model.sigma2 });
            if best.is_none_or(|(b, _, _)| aic < b) {
                best = Some((aic, p, q));
            }
        }
    }
    let (_, p, q) = best.ok_or(Error::OrderSelection)?;
    Ok(OrderSelection {
        p,
        q,
        aic_table: table,
        acf: acf_vals,
        pacf: pacf_vals,
    })
}

/// Hannan-Rissanen estimation with one refinement pass.
pub fn fit_arma(series: &[f64], p: usize, q: usize) -> Result<ArmaModel> {
    let n = series.len();
    if p == 0 && q == 0 {
        let c = stats::mean(series);
        let sigma2 = series.iter().map(|x| (x - c) * (x - c)).sum::<f64>() / n as f64;
        return Ok(ArmaModel { p, q, c, phi: vec![], theta: vec![], sigma2 });
    }
    let need = 10 * (p + q + 1);
    if n < need {
        return Err(Error::InsufficientData { need, got: n });
    }

    // Stage 1: long AR to approximate the innovations.
    let long_order = (2 * (p + q)).max(20).min(n / 4);
    let ar = fit_ar(series, long_order)?;
    let mut residuals = vec![0.0; n];
    for t in long_order..n {
        let mut pred = ar[0];
        for i in 1..=long_order {
            pred += ar[i] * series[t - i];
        }
        residuals[t] = series[t] - pred;
    }

    // Stage 2: regress F_t on lagged values and lagged residual proxies.
    let start = (long_order + q).max(p);
    let warm = p.max(q);
    let stage2 = regress_arma(series, &residuals, p, q, start)?;
    let stage2 = with_sigma2(stage2, series, warm);

    // Refinement: recompute residuals from the fitted model, re-regress.
    // The refinement regression can be ill-conditioned for larger orders
    // and return a non-invertible model with near-identical in-sample
    // fit; accept it only if it is usable and at least as good.
    let refined_residuals = filter_residuals(&stage2, series);
    let refined = regress_arma(series, &refined_residuals, p, q, warm)
        .map(|m| with_sigma2(m, series, warm));
    match refined {
        Ok(m)
            if m.sigma2.is_finite()
                && m.is_invertible(1e-9)
                && m.sigma2 <= stage2.sigma2 =>
        {
            Ok(m)
        }
        _ => Ok(stage2),
    }
}

fn with_sigma2(model: ArmaModel, series: &[f64], warm: usize) -> ArmaModel {
    let residuals = filter_residuals(&model, series);
    let tail = &residuals[warm..];
    let sigma2 = tail.iter().map(|e| e * e).sum::<f64>() / tail.len() as f64;
    ArmaModel { sigma2, ..model }
}

fn fit_ar(series: &[f64], order: usize) -> Result<Vec<f64>> {
    let n = series.len();
    let mut rows = Vec::with_capacity(n - order);
    let mut y = Vec::with_capacity(n - order);
    for t in order..n {
        let mut row = Vec::with_capacity(order + 1);
        row.push(1.0);
        for i in 1..=order {
            row.push(series[t - i]);
        }
        rows.push(row);
        y.push(series[t]);
    }
    ols(&rows, &y)
}

fn regress_arma(
    series: &[f64],
    residuals: &[f64],
    p: usize,
    q: usize,
    start: usize,
) -> Result<ArmaModel> {
    let n = series.len();
    let mut rows = Vec::with_capacity(n - start);
    let mut y = Vec::with_capacity(n - start);
    for t in start..n {
        let mut row = Vec::with_capacity(1 + p + q);
        row.push(1.0);
        for i in 1..=p {
            row.push(series[t - i]);
        }
        for i in 1..=q {
            row.push(residuals[t - i]);
        }
        rows.push(row);
        y.push(series[t]);
    }
    let beta = ols(&rows, &y)?;
    Ok(ArmaModel {
        p,
        q,
        c: beta[0],
        phi: beta[1..1 + p].to_vec(),
        theta: beta[1 + p..1 + p + q].to_vec(),
        sigma2: 0.0,
    })
}

/// Innovations implied by the model over the series, zero-initialized.
pub fn filter_residuals(model: &ArmaModel, series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mut residuals = vec![0.0; n];
    for t in 0..n {
        let mut pred = model.c;
        for (i, phi) in model.phi.iter().enumerate() {
            if t > i {
                pred += phi * series[t - 1 - i];
            }
        }
        for (i, theta) in model.theta.iter().enumerate() {
            if t > i {
                pred += theta * residuals[t - 1 - i];
            }
        }
        residuals[t] = series[t] - pred;
    }
    residuals
}

/// Iterate the model forward with future innovations set to zero.
/// Multi-step forecasts feed back their own predictions as history.
pub fn forecast(
    model: &ArmaModel,
    history: &[f64],
    residual_history: &[f64],
    steps: usize,
) -> Result<Vec<f64>> {
    if history.len() < model.p {
        return Err(Error::InsufficientHistory { need: model.p, got: history.len() });
    }
    if residual_history.len() < model.q {
        return Err(Error::InsufficientHistory {
            need: model.q,
            got: residual_history.len(),
        });
    }
    let mut values = history.to_vec();
    let mut residuals = residual_history.to_vec();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let mut pred = model.c;
        for (i, phi) in model.phi.iter().enumerate() {
            pred += phi * values[values.len() - 1 - i];
        }
        for (i, theta) in model.theta.iter().enumerate() {
            pred += theta * residuals[residuals.len() - 1 - i];
        }
        out.push(pred);
        values.push(pred);
        residuals.push(0.0);
    }
    Ok(out)
}

/// Fit on the leading `split` fraction, then walk forward over the test
/// portion producing one-step-ahead predictions with true history and
/// model-implied residual updates.
pub fn evaluate(series: &[f64], p: usize, q: usize, split: f64) -> Result<ForecastReport> {
    if !(0.0..1.0).contains(&split) || split <= 0.0 {
        return Err(Error::Domain(format!("split must be in (0, 1), got {split}")));
    }
    let n = series.len();
    let train_len = (split * n as f64).floor() as usize;
    if train_len < 2 || train_len == n {
        return Err(Error::InsufficientData { need: 3, got: n });
    }
    let model = fit_arma(&series[..train_len], p, q)?;

    // Residuals filtered over the whole series so test-time predictions
    // see model-implied innovations of the true past.
    let mut residuals = vec![0.0; n];
    let mut predictions = Vec::with_capacity(n - train_len);
    for t in 0..n {
        let mut pred = model.c;
        for (i, phi) in model.phi.iter().enumerate() {
            if t > i {
                pred += phi * series[t - 1 - i];
            }
        }
        for (i, theta) in model.theta.iter().enumerate() {
            if t > i {
                pred += theta * residuals[t - 1 - i];
            }
        }
        residuals[t] = series[t] - pred;
        if t >= train_len {
            predictions.push(pred);
        }
    }
    let actuals = series[train_len..].to_vec();
    let m = predictions.len() as f64;
    let mae = predictions
        .iter()
        .zip(&actuals)
        .map(|(p, a)| (p - a).abs())
        .sum::<f64>()
        / m;
    let rmse = (predictions
        .iter()
        .zip(&actuals)
        .map(|(p, a)| (p - a) * (p - a))
        .sum::<f64>()
        / m)
        .sqrt();
    let mape = predictions
        .iter()
        .zip(&actuals)
        .filter(|(_, a)| **a != 0.0)
        .map(|(p, a)| ((p - a) / a).abs())
        .sum::<f64>()
        / m
        * 100.0;
    Ok(ForecastReport {
        split_fraction: split,
        train_len,
        predictions,
        actuals,
        mae,
        rmse,
        mape,
    })
}

/// Simulate an ARMA process with standard-normal innovations scaled by
/// `sigma`. Used by tests and the order-selection examples; burn-in of
/// 200 samples is discarded.
pub fn simulate_arma(
    model: &ArmaModel,
    sigma: f64,
    n: usize,
    rng: &mut impl rand::Rng,
) -> Vec<f64> {
    use rand_distr::StandardNormal;
    let burn = 200;
    let total = n + burn;
    let mut values = Vec::with_capacity(total);
    let mut eps = Vec::with_capacity(total);
    for t in 0..total {
        let e: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
        let mut x = model.c + e;
        for (i, phi) in model.phi.iter().enumerate() {
            if t > i {
                x += phi * values[t - 1 - i];
            }
        }
        for (i, theta) in model.theta.iter().enumerate() {
            if t > i {
                x += theta * eps[t - 1 - i];
            }
        }
        values.push(x);
        eps.push(e);
    }
    values.split_off(burn)
}

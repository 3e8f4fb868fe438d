//! Python bindings for the xrtrace toolkit.
//!
//! Reports are returned as plain dicts (converted from the same JSON the
//! CLI emits); the ARMA model is exposed as a proper class.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};
use xrtrace::packet::EndpointConfig;
use xrtrace::qoe::{QoeParams, ScenarioWindows};
use xrtrace::{arma, csv_io, dist, gen, pcap, qoe, AssemblyConfig};

fn to_py_err(err: xrtrace::Error) -> PyErr {
    PyValueError::new_err(format!("[{}] {err}", err.identifier()))
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let json = serde_json::to_value(value)
        .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &json)
}

/// ARMA(p, q) frame-size model.
#[pyclass(name = "ArmaModel", skip_from_py_object)]
#[derive(Clone)]
struct PyArmaModel {
    inner: arma::ArmaModel,
}

#[pymethods]
impl PyArmaModel {
    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.q
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.inner.phi.clone()
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.theta.clone()
    }

    #[getter]
    fn sigma2(&self) -> f64 {
        self.inner.sigma2
    }

    #[pyo3(signature = (tol=1e-6))]
    fn is_stationary(&self, tol: f64) -> bool {
        self.inner.is_stationary(tol)
    }

    /// Iterate the model forward; future innovations are zero.
    fn forecast(
        &self,
        history: Vec<f64>,
        residual_history: Vec<f64>,
        steps: usize,
    ) -> PyResult<Vec<f64>> {
        arma::forecast(&self.inner, &history, &residual_history, steps).map_err(to_py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner)
            .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyArmaModel {
            inner: serde_json::from_str(text)
                .map_err(|e| PyValueError::new_err(format!("invalid model JSON: {e}")))?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "ArmaModel(p={}, q={}, c={:.6}, sigma2={:.6})",
            self.inner.p, self.inner.q, self.inner.c, self.inner.sigma2
        )
    }
}

/// Fit an ARMA(p, q) model by Hannan-Rissanen estimation.
#[pyfunction]
fn fit_arma(series: Vec<f64>, p: usize, q: usize) -> PyResult<PyArmaModel> {
    Ok(PyArmaModel {
        inner: arma::fit_arma(&series, p, q).map_err(to_py_err)?,
    })
}

/// Augmented Dickey-Fuller unit-root test (constant, no trend).
#[pyfunction]
#[pyo3(signature = (series, max_lag=None))]
fn adf_test<'py>(
    py: Python<'py>,
    series: Vec<f64>,
    max_lag: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let result = arma::adf_test(&series, max_lag).map_err(to_py_err)?;
    serialize_to_py(py, &result)
}

#[pyfunction]
fn acf(series: Vec<f64>, n_lags: usize) -> PyResult<Vec<f64>> {
    arma::acf(&series, n_lags).map_err(to_py_err)
}

#[pyfunction]
fn pacf(series: Vec<f64>, n_lags: usize) -> PyResult<Vec<f64>> {
    arma::pacf(&series, n_lags).map_err(to_py_err)
}

/// AIC grid search over (p, q); returns the selection with the AIC table
/// and the ACF/PACF values.
#[pyfunction]
#[pyo3(signature = (series, max_p=8, max_q=8))]
fn select_order<'py>(
    py: Python<'py>,
    series: Vec<f64>,
    max_p: usize,
    max_q: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let sel = arma::select_order(&series, max_p, max_q).map_err(to_py_err)?;
    serialize_to_py(py, &sel)
}

/// Train/test split evaluation with one-step-ahead walk-forward forecasts.
#[pyfunction]
#[pyo3(signature = (series, p, q, split=0.7))]
fn evaluate_arma<'py>(
    py: Python<'py>,
    series: Vec<f64>,
    p: usize,
    q: usize,
    split: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let report = arma::evaluate(&series, p, q, split).map_err(to_py_err)?;
    serialize_to_py(py, &report)
}

/// Standard-form inverse CDF of "normal", "laplace" or "logistic".
#[pyfunction]
fn theoretical_quantile(family: &str, p: f64) -> PyResult<f64> {
    dist::theoretical_quantile(parse_family(family)?, p).map_err(to_py_err)
}

fn parse_family(name: &str) -> PyResult<dist::Family> {
    match name.to_ascii_lowercase().as_str() {
        "normal" => Ok(dist::Family::Normal),
        "laplace" => Ok(dist::Family::Laplace),
        "logistic" => Ok(dist::Family::Logistic),
        other => Err(PyValueError::new_err(format!(
            "unknown family `{other}`; expected normal, laplace or logistic"
        ))),
    }
}

/// Fit all three candidate families by Q-Q linearity; returns
/// (best_family, fits) where each fit carries location, scale, linearity
/// and the Q-Q points.
#[pyfunction]
fn fit_select<'py>(py: Python<'py>, sample: Vec<f64>) -> PyResult<(String, Bound<'py, PyAny>)> {
    let (best, fits) = dist::fit_select(&sample).map_err(to_py_err)?;
    let list = PyList::empty(py);
    for fit in &fits {
        let dict = PyDict::new(py);
        dict.set_item("family", fit.family.name())?;
        dict.set_item("location", fit.location)?;
        dict.set_item("scale", fit.scale)?;
        dict.set_item("linearity", fit.linearity)?;
        dict.set_item("qq_points", fit.qq_points.clone())?;
        list.append(dict)?;
    }
    Ok((best.name().to_string(), list.into_any()))
}

/// Windowed QoE score for one scenario.
#[pyfunction]
#[pyo3(signature = (fps, pixels, latency_ms, f_min=9.0, r_min=552960.0, l_min=40.0, u=0.2, name="scenario"))]
#[allow(clippy::too_many_arguments)]
fn qoe_total<'py>(
    py: Python<'py>,
    fps: Vec<f64>,
    pixels: Vec<f64>,
    latency_ms: Vec<f64>,
    f_min: f64,
    r_min: f64,
    l_min: f64,
    u: f64,
    name: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let scenario = ScenarioWindows {
        name: name.to_string(),
        fps,
        pixels,
        latency_ms,
    };
    let params = QoeParams { f_min, r_min, l_min, u };
    let report = qoe::qoe_total(&scenario, &params).map_err(to_py_err)?;
    serialize_to_py(py, &report)
}

/// Rank scenarios (a JSON list of {name, fps, pixels, latency_ms}
/// objects) by average per-window QoE.
#[pyfunction]
#[pyo3(signature = (scenarios_json, f_min=9.0, r_min=552960.0, l_min=40.0, u=0.2))]
fn compare_scenarios<'py>(
    py: Python<'py>,
    scenarios_json: &str,
    f_min: f64,
    r_min: f64,
    l_min: f64,
    u: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let scenarios: Vec<ScenarioWindows> = serde_json::from_str(scenarios_json)
        .map_err(|e| PyValueError::new_err(format!("invalid scenarios JSON: {e}")))?;
    let params = QoeParams { f_min, r_min, l_min, u };
    let ranked = qoe::compare_scenarios(&scenarios, &params).map_err(to_py_err)?;
    serialize_to_py(py, &ranked)
}

/// Raw sensor data rate in bits/s with decimal and binary unit variants.
#[pyfunction]
#[pyo3(signature = (width, height, bits_per_pixel, fps, sensors=1))]
fn raw_data_rate<'py>(
    py: Python<'py>,
    width: u64,
    height: u64,
    bits_per_pixel: u64,
    fps: u64,
    sensors: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let report =
        qoe::raw_data_rate(width, height, bits_per_pixel, fps, sensors).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("bits_per_second", report.bits_per_second as u64)?;
    dict.set_item("mbit_per_second", report.mbit_per_second)?;
    dict.set_item("gbit_per_second", report.gbit_per_second)?;
    dict.set_item("gibit_per_second", report.gibit_per_second)?;
    Ok(dict.into_any())
}

/// Generate a synthetic trace and return it as pcap bytes.
/// `config_json` matches the CLI traffic-model schema; defaults apply
/// when omitted.
#[pyfunction]
#[pyo3(signature = (config_json=None, seed=None, duration_s=None))]
fn generate_trace<'py>(
    py: Python<'py>,
    config_json: Option<&str>,
    seed: Option<u64>,
    duration_s: Option<f64>,
) -> PyResult<Bound<'py, PyBytes>> {
    let mut model: gen::TrafficModel = match config_json {
        Some(text) => serde_json::from_str(text)
            .map_err(|e| PyValueError::new_err(format!("invalid traffic model JSON: {e}")))?,
        None => gen::TrafficModel::default(),
    };
    if let Some(seed) = seed {
        model.seed = seed;
    }
    if let Some(duration) = duration_s {
        model.duration_s = duration;
    }
    let records = gen::generate_trace(&model).map_err(to_py_err)?;
    Ok(PyBytes::new(py, &pcap::write_pcap(&records)))
}

/// Analyze a capture (pcap bytes or CSV text bytes): classify directions,
/// reassemble frames and return the series plus summaries.
#[pyfunction]
#[pyo3(signature = (data, device="192.168.0.2", server="192.168.0.1",
                    long_threshold=1000, gap_us=3000, pairing_window_us=10000, cluster_gap_us=1000))]
#[allow(clippy::too_many_arguments)]
fn analyze_trace<'py>(
    py: Python<'py>,
    data: &[u8],
    device: &str,
    server: &str,
    long_threshold: u32,
    gap_us: i64,
    pairing_window_us: i64,
    cluster_gap_us: i64,
) -> PyResult<Bound<'py, PyAny>> {
    let mut records = if data.len() >= 4
        && matches!(
            u32::from_le_bytes(data[0..4].try_into().unwrap()),
            0xa1b2c3d4 | 0xd4c3b2a1 | 0xa1b23c4d | 0x4d3cb2a1
        ) {
        pcap::parse_pcap(data).map_err(to_py_err)?.records
    } else {
        let text = std::str::from_utf8(data)
            .map_err(|_| PyValueError::new_err("input is neither pcap nor UTF-8 CSV"))?;
        csv_io::parse_csv(text).map_err(to_py_err)?
    };
    let endpoints = EndpointConfig::new(
        device
            .parse()
            .map_err(|_| PyValueError::new_err(format!("invalid device IP `{device}`")))?,
        server
            .parse()
            .map_err(|_| PyValueError::new_err(format!("invalid server IP `{server}`")))?,
    );
    let cfg = AssemblyConfig {
        long_packet_threshold: long_threshold,
        gap_threshold_us: gap_us,
        pairing_window_us: pairing_window_us,
        ul_cluster_gap_us: cluster_gap_us,
    };
    let analysis = xrtrace::analyze_trace(&mut records, &endpoints, &cfg);
    let dict = PyDict::new(py);
    dict.set_item("frame_count", analysis.series.sizes.len())?;
    dict.set_item("sizes", analysis.series.sizes.clone())?;
    dict.set_item("frame_intervals_us", analysis.series.frame_intervals_us.clone())?;
    dict.set_item("eye_intervals_us", analysis.series.eye_intervals_us.clone())?;
    dict.set_item("orphan_bursts", analysis.series.orphan_bursts)?;
    dict.set_item("short_dl_bytes", analysis.short_dl_bytes)?;
    dict.set_item("orphan_bytes", analysis.orphan_bytes)?;
    dict.set_item("total_dl_bytes", analysis.total_dl_bytes)?;
    dict.set_item("ul_cadence", serialize_to_py(py, &analysis.ul_cadence)?)?;
    dict.set_item("direction_counts", serialize_to_py(py, &analysis.direction_counts)?)?;
    Ok(dict.into_any())
}

#[pymodule]
fn xrtrace_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArmaModel>()?;
    m.add_function(wrap_pyfunction!(fit_arma, m)?)?;
    m.add_function(wrap_pyfunction!(adf_test, m)?)?;
    m.add_function(wrap_pyfunction!(acf, m)?)?;
    m.add_function(wrap_pyfunction!(pacf, m)?)?;
    m.add_function(wrap_pyfunction!(select_order, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_arma, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(fit_select, m)?)?;
    m.add_function(wrap_pyfunction!(qoe_total, m)?)?;
    m.add_function(wrap_pyfunction!(compare_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(raw_data_rate, m)?)?;
    m.add_function(wrap_pyfunction!(generate_trace, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_trace, m)?)?;
    Ok(())
}

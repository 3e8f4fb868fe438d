//! `xrtrace` command-line front-end.
//!
//! Machine-readable JSON goes to stdout, human-readable logs to stderr.
//! Exit codes: 0 success, 1 data error (with a stable error identifier),
//! 2 usage error.

use clap::{Parser, Subcommand};
use serde_json::json;
use std::net::Ipv4Addr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use xrtrace::packet::EndpointConfig;
use xrtrace::qoe::{QoeParams, ScenarioWindows};
use xrtrace::{arma, csv_io, dist, gen, pcap, qoe, AssemblyConfig};

#[derive(Parser)]
#[command(name = "xrtrace", version, about = "XR remote-rendering trace analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reassemble frames from a pcap/CSV capture and summarize the
    /// frame-size, frame-interval and eye-interval series plus UL cadence.
    Analyze {
        /// Input capture (.pcap or packet CSV).
        input: PathBuf,
        /// Device (headset) IPv4 address.
        #[arg(long, default_value_t = gen::DEFAULT_DEVICE_IP)]
        device: Ipv4Addr,
        /// Rendering server IPv4 address.
        #[arg(long, default_value_t = gen::DEFAULT_SERVER_IP)]
        server: Ipv4Addr,
        /// Long-packet threshold in bytes; larger packets carry frame data.
        #[arg(long, default_value_t = 1000)]
        long_threshold: u32,
        /// Intra-burst gap threshold in microseconds.
        #[arg(long, default_value_t = 3000)]
        gap: i64,
        /// Eye-burst pairing window in microseconds.
        #[arg(long, default_value_t = 10_000)]
        pairing_window: i64,
        /// UL cluster gap in microseconds.
        #[arg(long, default_value_t = 1000)]
        cluster_gap: i64,
        /// Write the frame series as CSV to this path.
        #[arg(long)]
        series_out: Option<PathBuf>,
    },
    /// Fit the normal/Laplace/logistic families to a series via Q-Q
    /// linearity and select the best.
    FitDist {
        /// Series file: one value per line (optional `value` header),
        /// or a frame-series CSV together with --column.
        input: PathBuf,
        /// Column of a frame-series CSV to fit (size_bytes,
        /// frame_interval_us or eye_interval_us).
        #[arg(long)]
        column: Option<String>,
        /// Directory for per-family Q-Q point CSVs.
        #[arg(long)]
        qq_out: Option<PathBuf>,
    },
    /// ADF test, ACF/PACF, order selection, ARMA fit and 70/30 evaluation.
    FitArma {
        /// Series file (same formats as fit-dist).
        input: PathBuf,
        #[arg(long)]
        column: Option<String>,
        /// Fixed order as `p,q`, bypassing AIC selection.
        #[arg(long, value_parser = parse_order)]
        order: Option<(usize, usize)>,
        /// Grid bounds for order selection as `max_p,max_q`.
        #[arg(long, value_parser = parse_order, default_value = "8,8")]
        max_order: (usize, usize),
        /// Train fraction of the train/test split.
        #[arg(long, default_value_t = 0.7)]
        split: f64,
        /// Write the prediction/actual overlay as CSV to this path.
        #[arg(long)]
        forecast_out: Option<PathBuf>,
    },
    /// Score one scenario file with the windowed QoE model.
    Qoe {
        /// Scenario file (JSON or CSV `window,fps,pixels,latency_ms`).
        input: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the per-window term table as CSV to this path.
        #[arg(long)]
        windows_out: Option<PathBuf>,
    },
    /// Rank several scenario files by average per-window QoE.
    Compare {
        /// Two or more scenario files.
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        /// Calibrate (u, f_min, r_min, l_min) against target averages,
        /// comma-separated in input order, and report the residual.
        #[arg(long, value_delimiter = ',')]
        calibrate: Option<Vec<f64>>,
    },
    /// Generate a synthetic trace from a traffic model JSON file.
    Generate {
        /// Traffic model configuration (JSON).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output pcap path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output packet CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Override the model seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the duration in seconds.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Raw sensor data rate: width height bits_per_pixel fps.
    Rate {
        width: u64,
        height: u64,
        bits_per_pixel: u64,
        fps: u64,
        #[arg(long, default_value_t = 1)]
        sensors: u64,
    },
}

#[derive(clap::Args)]
struct ParamArgs {
    #[arg(long, default_value_t = 9.0)]
    f_min: f64,
    #[arg(long, default_value_t = 1024.0 * 540.0)]
    r_min: f64,
    #[arg(long, default_value_t = 40.0)]
    l_min: f64,
    #[arg(long, default_value_t = 0.2)]
    u: f64,
}

impl ParamArgs {
    fn to_params(&self) -> QoeParams {
        QoeParams { f_min: self.f_min, r_min: self.r_min, l_min: self.l_min, u: self.u }
    }
}

fn parse_order(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `p,q`, got `{s}`"))?;
    Ok((
        p.trim().parse().map_err(|_| format!("invalid p `{p}`"))?,
        q.trim().parse().map_err(|_| format!("invalid q `{q}`"))?,
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).unwrap());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error [{}]: {err}", err.identifier());
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> xrtrace::Result<serde_json::Value> {
    match command {
        Command::Analyze {
            input,
            device,
            server,
            long_threshold,
            gap,
            pairing_window,
            cluster_gap,
            series_out,
        } => {
            let mut records = load_packets(&input)?;
            let endpoints = EndpointConfig::new(device, server);
            let cfg = AssemblyConfig {
                long_packet_threshold: long_threshold,
                gap_threshold_us: gap,
                pairing_window_us: pairing_window,
                ul_cluster_gap_us: cluster_gap,
            };
            let analysis = xrtrace::analyze_trace(&mut records, &endpoints, &cfg);
            if let Some(path) = &series_out {
                std::fs::write(path, analysis.series.to_csv())?;
            }
            let sizes: Vec<f64> = analysis.series.sizes.iter().map(|&s| s as f64).collect();
            let intervals: Vec<f64> =
                analysis.series.frame_intervals_us.iter().map(|&v| v as f64).collect();
            let eyes: Vec<f64> =
                analysis.series.eye_intervals_us.iter().map(|&v| v as f64).collect();
            Ok(json!({
                "config": {
                    "input": input, "device": device, "server": server,
                    "long_threshold": long_threshold, "gap_us": gap,
                    "pairing_window_us": pairing_window, "cluster_gap_us": cluster_gap,
                },
                "direction_counts": analysis.direction_counts,
                "frame_count": analysis.series.sizes.len(),
                "orphan_bursts": analysis.series.orphan_bursts,
                "byte_conservation": {
                    "frame_bytes": sizes.iter().sum::<f64>() as u64,
                    "orphan_bytes": analysis.orphan_bytes,
                    "short_dl_bytes": analysis.short_dl_bytes,
                    "total_dl_bytes": analysis.total_dl_bytes,
                },
                "frame_size": summary_json(&sizes),
                "frame_interval_us": summary_json(&intervals),
                "eye_interval_us": summary_json(&eyes),
                "ul_cadence": analysis.ul_cadence,
                "series_out": series_out,
            }))
        }
        Command::FitDist { input, column, qq_out } => {
            let sample = load_series(&input, column.as_deref())?;
            let (best, fits) = dist::fit_select(&sample)?;
            if let Some(dir) = &qq_out {
                std::fs::create_dir_all(dir)?;
                for fit in &fits {
                    std::fs::write(dir.join(format!("qq_{}.csv", fit.family.name())), fit.qq_csv())?;
                }
            }
            let summary = dist::summarize(&sample)?;
            Ok(json!({
                "config": { "input": input, "column": column },
                "summary": summary,
                "best_family": best.name(),
                "fits": fits.iter().map(|f| json!({
                    "family": f.family.name(),
                    "location": f.location,
                    "scale": f.scale,
                    "linearity": f.linearity,
                })).collect::<Vec<_>>(),
                "qq_out": qq_out,
            }))
        }
        Command::FitArma { input, column, order, max_order, split, forecast_out } => {
            let series = load_series(&input, column.as_deref())?;
            let adf = arma::adf_test(&series, None)?;
            if !adf.reject_unit_root {
                eprintln!(
                    "warning: ADF does not reject a unit root (statistic {:.3}); \
                     the series may be non-stationary",
                    adf.statistic
                );
            }
            let selection;
            let (p, q) = match order {
                Some(pq) => {
                    selection = None;
                    pq
                }
                None => {
                    let sel = arma::select_order(&series, max_order.0, max_order.1)?;
                    let pq = (sel.p, sel.q);
                    selection = Some(sel);
                    pq
                }
            };
            let model = arma::fit_arma(&series, p, q)?;
            let report = arma::evaluate(&series, p, q, split)?;
            if let Some(path) = &forecast_out {
                std::fs::write(path, report.to_csv())?;
            }
            Ok(json!({
                "config": {
                    "input": input, "column": column, "order": order,
                    "max_order": max_order, "split": split,
                },
                "adf": adf,
                "selection": selection,
                "model": model,
                "evaluation": {
                    "split_fraction": report.split_fraction,
                    "train_len": report.train_len,
                    "test_len": report.actuals.len(),
                    "mae": report.mae,
                    "rmse": report.rmse,
                    "mape": report.mape,
                },
                "forecast_out": forecast_out,
            }))
        }
        Command::Qoe { input, params, windows_out } => {
            let scenario = load_scenario(&input)?;
            let params = params.to_params();
            let report = qoe::qoe_total(&scenario, &params)?;
            if let Some(path) = &windows_out {
                std::fs::write(path, windows_csv(&report, params.u))?;
            }
            Ok(json!({
                "config": { "input": input, "params": params },
                "report": report,
            }))
        }
        Command::Compare { inputs, params, calibrate } => {
            let scenarios: Vec<ScenarioWindows> = inputs
                .iter()
                .map(|p| load_scenario(p))
                .collect::<xrtrace::Result<_>>()?;
            let params = params.to_params();
            let ranked = qoe::compare_scenarios(&scenarios, &params)?;
            let calibration = match calibrate {
                Some(targets) => {
                    if targets.len() != scenarios.len() {
                        return Err(xrtrace::Error::Domain(format!(
                            "--calibrate needs {} targets, got {}",
                            scenarios.len(),
                            targets.len()
                        )));
                    }
                    let targets: Vec<(String, f64)> = scenarios
                        .iter()
                        .map(|s| s.name.clone())
                        .zip(targets)
                        .collect();
                    Some(qoe::calibrate(&scenarios, &targets)?)
                }
                None => None,
            };
            Ok(json!({
                "config": { "inputs": inputs, "params": params },
                "ranking": ranked.iter().map(|r| json!({
                    "name": r.name,
                    "total": r.total,
                    "average_per_window": r.average_per_window,
                })).collect::<Vec<_>>(),
                "calibration": calibration,
            }))
        }
        Command::Generate { config, out, csv, seed, duration } => {
            let mut model = match &config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
                    .map_err(|e| xrtrace::Error::SchemaError(format!("{}: {e}", path.display())))?,
                None => gen::TrafficModel::default(),
            };
            if let Some(seed) = seed {
                model.seed = seed;
            }
            if let Some(duration) = duration {
                model.duration_s = duration;
            }
            let records = gen::generate_trace(&model)?;
            if let Some(path) = &out {
                std::fs::write(path, pcap::write_pcap(&records))?;
            }
            if let Some(path) = &csv {
                std::fs::write(path, csv_io::write_csv(&records))?;
            }
            Ok(json!({
                "config": model,
                "packet_count": records.len(),
                "pcap_out": out,
                "csv_out": csv,
            }))
        }
        Command::Rate { width, height, bits_per_pixel, fps, sensors } => {
            let report = qoe::raw_data_rate(width, height, bits_per_pixel, fps, sensors)?;
            Ok(json!({
                "config": {
                    "width": width, "height": height,
                    "bits_per_pixel": bits_per_pixel, "fps": fps, "sensors": sensors,
                },
                "bits_per_second": report.bits_per_second as u64,
                "mbit_per_second": report.mbit_per_second,
                "gbit_per_second": report.gbit_per_second,
                "gibit_per_second": report.gibit_per_second,
            }))
        }
    }
}

fn summary_json(sample: &[f64]) -> serde_json::Value {
    match dist::summarize(sample) {
        Ok(s) => json!({
            "n": s.n, "mean": s.mean, "std_dev": s.std_dev,
            "min": s.min, "max": s.max,
        }),
        Err(_) => json!(null),
    }
}

fn load_packets(path: &Path) -> xrtrace::Result<Vec<xrtrace::packet::PacketRecord>> {
    let bytes = std::fs::read(path)?;
    // Sniff the pcap magic; fall back to the CSV interchange format.
    if bytes.len() >= 4 {
        let magic = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
        if matches!(magic, 0xa1b2c3d4 | 0xd4c3b2a1 | 0xa1b23c4d | 0x4d3cb2a1) {
            let contents = pcap::parse_pcap(&bytes)?;
            eprintln!(
                "parsed {} packets ({} skipped: {} non-IPv4, {} non-UDP, {} fragmented)",
                contents.records.len(),
                contents.skipped.total(),
                contents.skipped.non_ipv4,
                contents.skipped.non_udp,
                contents.skipped.fragmented,
            );
            return Ok(contents.records);
        }
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| xrtrace::Error::SchemaError("input is neither pcap nor UTF-8 CSV".into()))?;
    csv_io::parse_csv(&text)
}

/// Load a numeric series: either one value per line (optional `value`
/// header) or a frame-series CSV with a named column.
fn load_series(path: &Path, column: Option<&str>) -> xrtrace::Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    match column {
        Some(col) => {
            let mut lines = text.lines();
            let header = lines
                .next()
                .ok_or_else(|| xrtrace::Error::SchemaError("empty series file".into()))?;
            let idx = header
                .trim_end()
                .split(',')
                .position(|h| h == col)
                .ok_or_else(|| {
                    xrtrace::Error::SchemaError(format!("column `{col}` not found in header"))
                })?;
            let mut out = Vec::new();
            for (i, line) in lines.enumerate() {
                let line = line.trim_end();
                if line.is_empty() {
                    continue;
                }
                let field = line.split(',').nth(idx).unwrap_or("");
                if field.is_empty() {
                    continue; // e.g. the first frame has no interval
                }
                out.push(field.parse().map_err(|_| xrtrace::Error::ParseError {
                    line: i + 2,
                    msg: format!("non-numeric value `{field}`"),
                })?);
            }
            Ok(out)
        }
        None => {
            let mut out = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || (i == 0 && line == "value") {
                    continue;
                }
                out.push(line.parse().map_err(|_| xrtrace::Error::ParseError {
                    line: i + 1,
                    msg: format!("non-numeric value `{line}`"),
                })?);
            }
            Ok(out)
        }
    }
}

/// Scenario files: JSON `{name, fps[], pixels[], latency_ms[]}` or CSV
/// `window,fps,pixels,latency_ms`.
fn load_scenario(path: &Path) -> xrtrace::Result<ScenarioWindows> {
    let text = std::fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        return serde_json::from_str(&text)
            .map_err(|e| xrtrace::Error::SchemaError(format!("{}: {e}", path.display())));
    }
    let mut lines = text.lines();
    let header = lines
        .next()
        .map(|h| h.trim_end())
        .ok_or_else(|| xrtrace::Error::SchemaError("empty scenario file".into()))?;
    if header != "window,fps,pixels,latency_ms" {
        return Err(xrtrace::Error::SchemaError(format!(
            "expected header `window,fps,pixels,latency_ms`, got `{header}`"
        )));
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    let mut scenario = ScenarioWindows {
        name,
        fps: vec![],
        pixels: vec![],
        latency_ms: vec![],
    };
    for (i, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(xrtrace::Error::SchemaError(format!(
                "line {}: expected 4 columns",
                i + 2
            )));
        }
        let num = |s: &str| -> xrtrace::Result<f64> {
            s.parse().map_err(|_| xrtrace::Error::ParseError {
                line: i + 2,
                msg: format!("non-numeric value `{s}`"),
            })
        };
        scenario.fps.push(num(fields[1])?);
        scenario.pixels.push(num(fields[2])?);
        scenario.latency_ms.push(num(fields[3])?);
    }
    Ok(scenario)
}

fn windows_csv(report: &qoe::QoeReport, u: f64) -> String {
    let mut out = String::from("window,q,p,g,qoe\n");
    for (i, ((q, p), g)) in report
        .q_terms
        .iter()
        .zip(&report.p_terms)
        .zip(&report.g_terms)
        .enumerate()
    {
        out.push_str(&format!("{},{},{},{},{}\n", i, q, p, g, q + p - u * g));
    }
    out
}

//! Trace analysis, traffic modeling and synthetic trace generation for
//! remote-rendering XR network streams.
//!
//! The pipeline: ingest UDP/IPv4 packet captures, reassemble downlink
//! bursts into stereo frames, characterize the frame-size / frame-interval
//! / eye-interval series, fit an ARMA predictor of frame sizes, score
//! rendering scenarios with a windowed QoE metric, and generate synthetic
//! traces from a fitted traffic model.

pub mod arma;
pub mod csv_io;
pub mod dist;
pub mod error;
pub mod frame;
pub mod gen;
pub mod linalg;
pub mod packet;
pub mod pcap;
pub mod qoe;
pub mod stats;

pub use error::{Error, Result};

use frame::{FrameSeries, UlCadence};
use packet::{Direction, EndpointConfig, PacketRecord};
use serde::{Deserialize, Serialize};

/// Thresholds for the reassembly stage.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AssemblyConfig {
    pub long_packet_threshold: u32,
    pub gap_threshold_us: i64,
    pub pairing_window_us: i64,
    pub ul_cluster_gap_us: i64,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        AssemblyConfig {
            long_packet_threshold: frame::DEFAULT_LONG_PACKET_THRESHOLD,
            gap_threshold_us: frame::DEFAULT_GAP_THRESHOLD_US,
            pairing_window_us: frame::DEFAULT_PAIRING_WINDOW_US,
            ul_cluster_gap_us: frame::DEFAULT_UL_CLUSTER_GAP_US,
        }
    }
}

/// End-to-end analysis of one classified trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceAnalysis {
    pub direction_counts: packet::DirectionCounts,
    pub frames: Vec<frame::FrameRecord>,
    pub series: FrameSeries,
    pub ul_cadence: UlCadence,
    /// DL payload bytes in packets at or below the long-packet threshold.
    pub short_dl_bytes: u64,
    /// DL payload bytes in bursts that could not be paired.
    pub orphan_bytes: u64,
    /// Total DL payload bytes.
    pub total_dl_bytes: u64,
}

/// Classify directions, reassemble frames and extract the three series
/// plus the UL cadence summary.
pub fn analyze_trace(
    records: &mut [PacketRecord],
    endpoints: &EndpointConfig,
    cfg: &AssemblyConfig,
) -> TraceAnalysis {
    let direction_counts = packet::classify_direction(records, endpoints);
    let dl: Vec<PacketRecord> = records
        .iter()
        .filter(|r| r.direction == Direction::Dl)
        .copied()
        .collect();
    let ul: Vec<PacketRecord> = records
        .iter()
        .filter(|r| r.direction == Direction::Ul)
        .copied()
        .collect();
    let bursts = frame::detect_bursts(&dl, cfg.long_packet_threshold, cfg.gap_threshold_us);
    let (frames, orphans) = frame::pair_eyes(&bursts, cfg.pairing_window_us);
    let series = frame::extract_series(&frames, orphans);
    let ul_cadence = frame::ul_cadence_stats(&ul, cfg.ul_cluster_gap_us);

    let total_dl_bytes: u64 = dl.iter().map(|r| r.payload_len as u64).sum();
    let short_dl_bytes: u64 = dl
        .iter()
        .filter(|r| r.payload_len <= cfg.long_packet_threshold)
        .map(|r| r.payload_len as u64)
        .sum();
    let frame_bytes: u64 = series.sizes.iter().sum();
    let orphan_bytes = total_dl_bytes - short_dl_bytes - frame_bytes;
    TraceAnalysis {
        direction_counts,
        frames,
        series,
        ul_cadence,
        short_dl_bytes,
        orphan_bytes,
        total_dl_bytes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_conserves_dl_bytes() {
        let model = gen::TrafficModel { duration_s: 1.0, seed: 3, ..Default::default() };
        let mut records = gen::generate_trace(&model).unwrap();
        let analysis =
            analyze_trace(&mut records, &gen::default_endpoints(), &AssemblyConfig::default());
        let frame_bytes: u64 = analysis.series.sizes.iter().sum();
        assert_eq!(
            frame_bytes + analysis.orphan_bytes + analysis.short_dl_bytes,
            analysis.total_dl_bytes
        );
        assert_eq!(analysis.series.orphan_bursts, 0);
    }
}

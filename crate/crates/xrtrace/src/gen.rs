//! Synthetic XR trace generation from a fitted traffic model.
//!
//! The generator emits the structure observed on the wire: every frame
//! period the device sends a small UL cluster of 2-3 packets, and the
//! server answers with two adjacent long-packet bursts, one per eye.
//! It also serves as the round-trip oracle for the reassembly path.

use crate::error::{Error, Result};
use crate::packet::{Direction, EndpointConfig, PacketRecord};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};
use std::net::Ipv4Addr;

pub const DEFAULT_DEVICE_IP: Ipv4Addr = Ipv4Addr::new(192, 168, 0, 2);
pub const DEFAULT_SERVER_IP: Ipv4Addr = Ipv4Addr::new(192, 168, 0, 1);
pub const DEFAULT_DEVICE_PORT: u16 = 50_000;
pub const DEFAULT_SERVER_PORT: u16 = 50_001;

/// Spacing between consecutive packets inside one burst.
const INTRA_BURST_SPACING_US: i64 = 10;
/// Spacing between packets of one UL cluster.
const UL_SPACING_US: i64 = 40;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Generative description of one XR stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrafficModel {
    /// Stereo frame size in bytes.
    pub frame_size: MeanStd,
    /// Interval between successive frames, microseconds.
    pub frame_interval_us: MeanStd,
    /// Interval between the two eye bursts of one frame, microseconds.
    pub eye_interval_us: MeanStd,
    /// Fraction of the frame bytes carried by the first burst.
    pub eye_split_fraction: f64,
    /// Bytes per long packet.
    pub payload_size: u32,
    /// Inclusive range of UL packets per cycle.
    pub ul_packets_per_cycle: (u32, u32),
    /// Inclusive range of UL payload bytes.
    pub ul_payload: (u32, u32),
    pub duration_s: f64,
    pub seed: u64,
}

impl Default for TrafficModel {
    /// 60 FPS stream whose bursts hold 8-55 long packets of 1200 B.
    fn default() -> Self {
        TrafficModel {
            frame_size: MeanStd { mean: 60_000.0, std: 8_000.0 },
            frame_interval_us: MeanStd { mean: 16_667.0, std: 1_000.0 },
            eye_interval_us: MeanStd { mean: 5_000.0, std: 300.0 },
            eye_split_fraction: 0.5,
            payload_size: 1200,
            ul_packets_per_cycle: (2, 3),
            ul_payload: (100, 400),
            duration_s: 10.0,
            seed: 0,
        }
    }
}

impl TrafficModel {
    fn validate(&self) -> Result<()> {
        if self.frame_size.mean <= 0.0
            || self.frame_interval_us.mean <= 0.0
            || self.eye_interval_us.mean <= 0.0
            || self.frame_size.std < 0.0
            || self.frame_interval_us.std < 0.0
            || self.eye_interval_us.std < 0.0
        {
            return Err(Error::Domain("means must be positive, stds non-negative".into()));
        }
        if !(0.0..1.0).contains(&self.eye_split_fraction) || self.eye_split_fraction <= 0.0 {
            return Err(Error::Domain("eye_split_fraction must be in (0, 1)".into()));
        }
        if self.payload_size <= 1000 {
            return Err(Error::Domain("payload_size must exceed the 1000 B long-packet threshold".into()));
        }
        if self.ul_packets_per_cycle.0 > self.ul_packets_per_cycle.1
            || self.ul_payload.0 > self.ul_payload.1
        {
            return Err(Error::Domain("ranges must be (min, max) with min <= max".into()));
        }
        Ok(())
    }
}

/// Normal draw truncated below; resamples, then clamps after bounded
/// retries so generation always terminates.
fn truncated_normal(rng: &mut ChaCha8Rng, ms: MeanStd, min: f64) -> f64 {
    if ms.std == 0.0 {
        return ms.mean.max(min);
    }
    let dist = Normal::new(ms.mean, ms.std).expect("validated std");
    for _ in 0..64 {
        let x = rng.sample(dist);
        if x >= min {
            return x;
        }
    }
    min
}

/// Split a burst into long-packet payloads. All packets carry
/// `payload_size` bytes except the last; a remainder of 1000 B or less is
/// merged into the final full packet so every packet stays long.
pub fn packetize_burst(burst_bytes: u64, payload_size: u32) -> Vec<u32> {
    assert!(burst_bytes >= 1 && payload_size > 1000);
    let payload = payload_size as u64;
    let full = (burst_bytes / payload) as usize;
    let remainder = burst_bytes % payload;
    let mut out: Vec<u32> = vec![payload_size; full];
    if remainder == 0 {
        // exact division
    } else if remainder <= 1000 {
        match out.last_mut() {
            Some(last) => *last += remainder as u32,
            None => out.push(remainder as u32), // tiny burst; caller sized it
        }
    } else {
        out.push(remainder as u32);
    }
    out
}

/// Generate a full UL + DL trace, sorted by timestamp, deterministic for a
/// fixed model (including seed).
pub fn generate_trace(model: &TrafficModel) -> Result<Vec<PacketRecord>> {
    model.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let duration_us = (model.duration_s * 1e6) as i64;
    let mut records = Vec::new();
    let mut frame_start = 0i64;
    let mut frames = 0usize;
    while frame_start < duration_us {
        // UL cluster at the top of the cycle.
        let ul_count = rng.random_range(model.ul_packets_per_cycle.0..=model.ul_packets_per_cycle.1);
        for k in 0..ul_count {
            let len = rng.random_range(model.ul_payload.0..=model.ul_payload.1);
            records.push(packet(
                frame_start + k as i64 * UL_SPACING_US,
                Direction::Ul,
                DEFAULT_DEVICE_IP,
                DEFAULT_SERVER_IP,
                DEFAULT_DEVICE_PORT,
                DEFAULT_SERVER_PORT,
                len,
            ));
        }

        let frame_interval =
            truncated_normal(&mut rng, model.frame_interval_us, 1000.0).round() as i64;
        let frame_size = truncated_normal(
            &mut rng,
            model.frame_size,
            2.0 * model.payload_size as f64,
        )
        .round() as u64;
        let eye_interval = truncated_normal(&mut rng, model.eye_interval_us, 100.0)
            .round()
            .min((frame_interval - 1) as f64) as i64;

        let left_bytes = ((frame_size as f64 * model.eye_split_fraction).round() as u64)
            .clamp(1, frame_size - 1);
        let right_bytes = frame_size - left_bytes;
        for (offset, bytes) in [(0i64, left_bytes), (eye_interval, right_bytes)] {
            let mut ts = frame_start + offset;
            for len in packetize_burst(bytes, model.payload_size) {
                records.push(packet(
                    ts,
                    Direction::Dl,
                    DEFAULT_SERVER_IP,
                    DEFAULT_DEVICE_IP,
                    DEFAULT_SERVER_PORT,
                    DEFAULT_DEVICE_PORT,
                    len,
                ));
                ts += INTRA_BURST_SPACING_US;
            }
        }
        frames += 1;
        frame_start += frame_interval;
    }
    if frames == 0 {
        return Err(Error::EmptyTrace);
    }
    records.sort_by_key(|r| r.timestamp_us);
    Ok(records)
}

/// Endpoint pair matching the addresses used by [`generate_trace`].
pub fn default_endpoints() -> EndpointConfig {
    EndpointConfig::new(DEFAULT_DEVICE_IP, DEFAULT_SERVER_IP)
}

#[allow(clippy::too_many_arguments)]
fn packet(
    ts: i64,
    direction: Direction,
    src_ip: Ipv4Addr,
    dst_ip: Ipv4Addr,
    src_port: u16,
    dst_port: u16,
    payload_len: u32,
) -> PacketRecord {
    PacketRecord {
        timestamp_us: ts,
        direction,
        src_ip,
        dst_ip,
        src_port,
        dst_port,
        payload_len,
    }
}

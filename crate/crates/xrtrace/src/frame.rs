//! Burst detection, two-eye frame pairing and series extraction.
//!
//! DL packets above the long-packet threshold arrive in tight bursts, one
//! burst per eye, two bursts per stereo frame roughly every 16.7 ms at
//! 60 FPS. Short packets carry synchronization messages and are excluded.

use crate::packet::PacketRecord;
use serde::{Deserialize, Serialize};

pub const DEFAULT_LONG_PACKET_THRESHOLD: u32 = 1000;
pub const DEFAULT_GAP_THRESHOLD_US: i64 = 3000;
pub const DEFAULT_PAIRING_WINDOW_US: i64 = 10_000;
pub const DEFAULT_UL_CLUSTER_GAP_US: i64 = 1000;

/// A tight temporal cluster of long DL packets carrying one eye's share
/// of a rendered frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Burst {
    pub start_us: i64,
    pub end_us: i64,
    pub packet_count: usize,
    pub total_bytes: u64,
}

/// One reassembled stereo frame: two adjacent eye bursts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub left: Burst,
    pub right: Burst,
}

impl FrameRecord {
    pub fn frame_size_bytes(&self) -> u64 {
        self.left.total_bytes + self.right.total_bytes
    }

    pub fn frame_start_us(&self) -> i64 {
        self.left.start_us
    }

    pub fn eye_interval_us(&self) -> i64 {
        self.right.start_us - self.left.start_us
    }
}

/// The three series the traffic model is built from.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FrameSeries {
    pub sizes: Vec<u64>,
    pub frame_intervals_us: Vec<i64>,
    pub eye_intervals_us: Vec<i64>,
    pub orphan_bursts: usize,
}

impl FrameSeries {
    /// CSV export: `frame_index,size_bytes,frame_interval_us,eye_interval_us`.
    /// The first frame has no preceding interval; that field is left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frame_index,size_bytes,frame_interval_us,eye_interval_us\n");
        for (i, size) in self.sizes.iter().enumerate() {
            let interval = if i == 0 {
                String::new()
            } else {
                self.frame_intervals_us[i - 1].to_string()
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                i, size, interval, self.eye_intervals_us[i]
            ));
        }
        out
    }
}

/// Group long DL packets into bursts with a greedy gap rule: a packet joins
/// the current burst iff it follows the previous long packet within
/// `gap_threshold_us`.
pub fn detect_bursts(
    dl_packets: &[PacketRecord],
    long_packet_threshold: u32,
    gap_threshold_us: i64,
) -> Vec<Burst> {
    assert!(long_packet_threshold > 0 && gap_threshold_us > 0);
    let mut bursts = Vec::new();
    let mut current: Option<Burst> = None;
    for pkt in dl_packets {
        if pkt.payload_len <= long_packet_threshold {
            continue;
        }
        match current.as_mut() {
            Some(burst) if pkt.timestamp_us - burst.end_us <= gap_threshold_us => {
                burst.end_us = pkt.timestamp_us;
                burst.packet_count += 1;
                burst.total_bytes += pkt.payload_len as u64;
            }
            _ => {
                if let Some(done) = current.take() {
                    bursts.push(done);
                }
                current = Some(Burst {
                    start_us: pkt.timestamp_us,
                    end_us: pkt.timestamp_us,
                    packet_count: 1,
                    total_bytes: pkt.payload_len as u64,
                });
            }
        }
    }
    if let Some(done) = current {
        bursts.push(done);
    }
    bursts
}

/// Pair adjacent bursts into stereo frames. Burst i and i+1 form a frame
/// iff their starts are within `pairing_window_us`; unpairable bursts are
/// counted as orphans and dropped.
pub fn pair_eyes(bursts: &[Burst], pairing_window_us: i64) -> (Vec<FrameRecord>, usize) {
    let mut frames = Vec::new();
    let mut orphans = 0;
    let mut i = 0;
    while i < bursts.len() {
        if i + 1 < bursts.len()
            && bursts[i + 1].start_us - bursts[i].start_us <= pairing_window_us
        {
            frames.push(FrameRecord {
                left: bursts[i],
                right: bursts[i + 1],
            });
            i += 2;
        } else {
            orphans += 1;
            i += 1;
        }
    }
    (frames, orphans)
}

/// Extract the frame-size, frame-interval and eye-interval series.
pub fn extract_series(frames: &[FrameRecord], orphan_bursts: usize) -> FrameSeries {
    let sizes = frames.iter().map(|f| f.frame_size_bytes()).collect();
    let frame_intervals_us = frames
        .windows(2)
        .map(|w| w[1].frame_start_us() - w[0].frame_start_us())
        .collect();
    let eye_intervals_us = frames.iter().map(|f| f.eye_interval_us()).collect();
    FrameSeries {
        sizes,
        frame_intervals_us,
        eye_intervals_us,
        orphan_bursts,
    }
}

/// Uplink cadence summary: pose/sync packets arrive in small clusters
/// every frame period.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct UlCadence {
    pub cluster_count: usize,
    pub clusters_per_second: f64,
    /// Histogram over packets-per-cluster: (cluster size, occurrences).
    pub packets_per_cluster: Vec<(usize, usize)>,
    pub mean_inter_cluster_us: f64,
    pub min_inter_cluster_us: i64,
    pub max_inter_cluster_us: i64,
}

/// Cluster UL packets with the same greedy gap rule and summarize cadence.
pub fn ul_cadence_stats(ul_packets: &[PacketRecord], cluster_gap_us: i64) -> UlCadence {
    if ul_packets.is_empty() {
        return UlCadence::default();
    }
    let mut cluster_sizes = Vec::new();
    let mut cluster_starts = Vec::new();
    let mut size = 1usize;
    let mut last_ts = ul_packets[0].timestamp_us;
    cluster_starts.push(last_ts);
    for pkt in &ul_packets[1..] {
        if pkt.timestamp_us - last_ts <= cluster_gap_us {
            size += 1;
        } else {
            cluster_sizes.push(size);
            size = 1;
            cluster_starts.push(pkt.timestamp_us);
        }
        last_ts = pkt.timestamp_us;
    }
    cluster_sizes.push(size);

    let mut hist = std::collections::BTreeMap::new();
    for s in &cluster_sizes {
        *hist.entry(*s).or_insert(0usize) += 1;
    }
    let intervals: Vec<i64> = cluster_starts.windows(2).map(|w| w[1] - w[0]).collect();
    let span_us = ul_packets.last().unwrap().timestamp_us - ul_packets[0].timestamp_us;
    UlCadence {
        cluster_count: cluster_sizes.len(),
        clusters_per_second: if span_us > 0 {
            cluster_sizes.len() as f64 / (span_us as f64 / 1e6)
        } else {
            0.0
        },
        packets_per_cluster: hist.into_iter().collect(),
        mean_inter_cluster_us: if intervals.is_empty() {
            0.0
        } else {
            intervals.iter().sum::<i64>() as f64 / intervals.len() as f64
        },
        min_inter_cluster_us: intervals.iter().copied().min().unwrap_or(0),
        max_inter_cluster_us: intervals.iter().copied().max().unwrap_or(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::Direction;

    fn pkt(ts: i64, len: u32) -> PacketRecord {
        PacketRecord {
            timestamp_us: ts,
            direction: Direction::Dl,
            src_ip: [10, 0, 0, 1].into(),
            dst_ip: [10, 0, 0, 2].into(),
            src_port: 6000,
            dst_port: 5000,
            payload_len: len,
        }
    }

    #[test]
    fn greedy_grouping_forms_bursts() {
        let packets = vec![pkt(0, 1400), pkt(100, 1400), pkt(200, 1400), pkt(8000, 1400)];
        let bursts = detect_bursts(&packets, 1000, 3000);
        assert_eq!(bursts.len(), 2);
        assert_eq!(bursts[0].packet_count, 3);
        assert_eq!(bursts[0].total_bytes, 4200);
        assert_eq!(bursts[0].start_us, 0);
        assert_eq!(bursts[0].end_us, 200);
    }

    #[test]
    fn short_packets_excluded() {
        assert!(detect_bursts(&[pkt(0, 900)], 1000, 3000).is_empty());
        // Exactly at the threshold is still short ("more than 1000 Bytes").
        assert!(detect_bursts(&[pkt(0, 1000)], 1000, 3000).is_empty());
    }

    #[test]
    fn empty_input_empty_output() {
        assert!(detect_bursts(&[], 1000, 3000).is_empty());
    }

    #[test]
    fn pairing_within_window() {
        let b = |start: i64| Burst {
            start_us: start,
            end_us: start + 500,
            packet_count: 10,
            total_bytes: 14_000,
        };
        let (frames, orphans) = pair_eyes(&[b(0), b(4000)], 8000);
        assert_eq!(frames.len(), 1);
        assert_eq!(orphans, 0);
        assert_eq!(frames[0].eye_interval_us(), 4000);
        assert_eq!(frames[0].frame_size_bytes(), 28_000);
    }

    #[test]
    fn unpairable_burst_is_orphan() {
        let b = |start: i64| Burst {
            start_us: start,
            end_us: start,
            packet_count: 1,
            total_bytes: 1400,
        };
        let (frames, orphans) = pair_eyes(&[b(0), b(4000), b(20_000)], 8000);
        assert_eq!(frames.len(), 1);
        assert_eq!(orphans, 1);
    }

    #[test]
    fn series_from_two_frames() {
        let b = |start: i64, bytes: u64| Burst {
            start_us: start,
            end_us: start,
            packet_count: 1,
            total_bytes: bytes,
        };
        let frames = vec![
            FrameRecord { left: b(0, 100), right: b(4000, 200) },
            FrameRecord { left: b(16_700, 300), right: b(20_700, 400) },
        ];
        let series = extract_series(&frames, 0);
        assert_eq!(series.sizes, vec![300, 700]);
        assert_eq!(series.frame_intervals_us, vec![16_700]);
        assert_eq!(series.eye_intervals_us, vec![4000, 4000]);
    }

    #[test]
    fn one_frame_has_no_intervals() {
        let b = Burst { start_us: 0, end_us: 0, packet_count: 1, total_bytes: 5 };
        let series = extract_series(&[FrameRecord { left: b, right: b }], 0);
        assert!(series.frame_intervals_us.is_empty());
        assert_eq!(series.sizes.len(), 1);
    }

    #[test]
    fn ul_cadence_clusters() {
        let packets: Vec<PacketRecord> = [0, 50, 17_000, 17_040, 17_090]
            .iter()
            .map(|&ts| pkt(ts, 200))
            .collect();
        let cadence = ul_cadence_stats(&packets, 1000);
        assert_eq!(cadence.cluster_count, 2);
        assert_eq!(cadence.packets_per_cluster, vec![(2, 1), (3, 1)]);
        assert_eq!(cadence.min_inter_cluster_us, 17_000);
    }

    #[test]
    fn ul_cadence_empty() {
        let cadence = ul_cadence_stats(&[], 1000);
        assert_eq!(cadence.cluster_count, 0);
    }

    #[test]
    fn series_csv_layout() {
        let b = |start: i64, bytes: u64| Burst {
            start_us: start,
            end_us: start,
            packet_count: 1,
            total_bytes: bytes,
        };
        let frames = vec![
            FrameRecord { left: b(0, 100), right: b(4000, 200) },
            FrameRecord { left: b(16_700, 300), right: b(20_700, 400) },
        ];
        let csv = extract_series(&frames, 0).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "frame_index,size_bytes,frame_interval_us,eye_interval_us");
        assert_eq!(lines[1], "0,300,,4000");
        assert_eq!(lines[2], "1,700,16700,4000");
    }
}

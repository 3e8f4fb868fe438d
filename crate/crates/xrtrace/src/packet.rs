//! Per-packet records and uplink/downlink classification.

use serde::{Deserialize, Serialize};
use std::net::Ipv4Addr;

/// Maximum UDP payload over IPv4 (65535 - 20 IP - 8 UDP).
pub const MAX_UDP_PAYLOAD: u32 = 65_507;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Device to server.
    Ul,
    /// Server to device.
    Dl,
    Other,
}

/// One captured UDP datagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketRecord {
    /// Microseconds since the capture epoch.
    pub timestamp_us: i64,
    pub direction: Direction,
    pub src_ip: Ipv4Addr,
    pub dst_ip: Ipv4Addr,
    pub src_port: u16,
    pub dst_port: u16,
    /// UDP payload length in bytes, excluding all headers.
    pub payload_len: u32,
}

/// The device/server endpoint pair that defines UL and DL.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub device_ip: Ipv4Addr,
    pub server_ip: Ipv4Addr,
    /// When set, a packet must also use this device-side port to classify.
    pub device_port: Option<u16>,
    /// When set, a packet must also use this server-side port to classify.
    pub server_port: Option<u16>,
}

impl EndpointConfig {
    pub fn new(device_ip: Ipv4Addr, server_ip: Ipv4Addr) -> Self {
        assert_ne!(device_ip, server_ip, "device and server must differ");
        EndpointConfig {
            device_ip,
            server_ip,
            device_port: None,
            server_port: None,
        }
    }
}

/// Per-class packet counts reported by [`classify_direction`].
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct DirectionCounts {
    pub ul: usize,
    pub dl: usize,
    pub other: usize,
}

/// Relabel every record as UL, DL or Other against the endpoint pair.
/// Pure relabeling; idempotent.
pub fn classify_direction(
    records: &mut [PacketRecord],
    cfg: &EndpointConfig,
) -> DirectionCounts {
    let mut counts = DirectionCounts::default();
    for rec in records.iter_mut() {
        let port_ok_ul = cfg.device_port.is_none_or(|p| rec.src_port == p)
            && cfg.server_port.is_none_or(|p| rec.dst_port == p);
        let port_ok_dl = cfg.server_port.is_none_or(|p| rec.src_port == p)
            && cfg.device_port.is_none_or(|p| rec.dst_port == p);
        rec.direction = if rec.src_ip == cfg.device_ip && rec.dst_ip == cfg.server_ip && port_ok_ul
        {
            counts.ul += 1;
            Direction::Ul
        } else if rec.src_ip == cfg.server_ip && rec.dst_ip == cfg.device_ip && port_ok_dl {
            counts.dl += 1;
            Direction::Dl
        } else {
            counts.other += 1;
            Direction::Other
        };
    }
    counts
}

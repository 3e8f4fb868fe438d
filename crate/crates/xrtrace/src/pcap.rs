//! Classic pcap reader/writer, bit-exact per the libpcap file format.
//!
//! Supported link types are Ethernet (DLT 1) and Linux cooked capture
//! (DLT 113). pcapng is out of scope.

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord, MAX_UDP_PAYLOAD};
use std::net::Ipv4Addr;

const MAGIC_US_LE: u32 = 0xa1b2c3d4;
const MAGIC_US_BE: u32 = 0xd4c3b2a1;
const MAGIC_NS_LE: u32 = 0xa1b23c4d;
const MAGIC_NS_BE: u32 = 0x4d3cb2a1;

const DLT_EN10MB: u32 = 1;
const DLT_LINUX_SLL: u32 = 113;

/// Frames that were present in the capture but not turned into records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SkipCounts {
    pub non_ipv4: usize,
    pub non_udp: usize,
    pub fragmented: usize,
}

impl SkipCounts {
    pub fn total(&self) -> usize {
        self.non_ipv4 + self.non_udp + self.fragmented
    }
}

#[derive(Debug, Clone)]
pub struct PcapContents {
    pub records: Vec<PacketRecord>,
    pub skipped: SkipCounts,
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    swapped: bool,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::TruncatedCapture { offset: self.pos });
        }
        let s = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        let b: [u8; 4] = self.take(4)?.try_into().unwrap();
        Ok(if self.swapped {
            u32::from_be_bytes(b)
        } else {
            u32::from_le_bytes(b)
        })
    }

    fn u16(&mut self) -> Result<u16> {
        let b: [u8; 2] = self.take(2)?.try_into().unwrap();
        Ok(if self.swapped {
            u16::from_be_bytes(b)
        } else {
            u16::from_le_bytes(b)
        })
    }
}

/// Parse a classic pcap byte stream into packet records.
///
/// Non-IPv4 and non-UDP frames are counted and skipped. Timestamps are
/// normalized to integer microseconds; nanosecond captures truncate.
pub fn parse_pcap(bytes: &[u8]) -> Result<PcapContents> {
    if bytes.len() < 24 {
        return Err(Error::UnsupportedCapture(format!(
            "global header needs 24 bytes, got {}",
            bytes.len()
        )));
    }
    let magic = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let (swapped, nanos) = match magic {
        MAGIC_US_LE => (false, false),
        MAGIC_NS_LE => (false, true),
        MAGIC_US_BE => (true, false),
        MAGIC_NS_BE => (true, true),
        m => {
            return Err(Error::UnsupportedCapture(format!(
                "unrecognized pcap magic 0x{m:08x}"
            )))
        }
    };
    let mut r = Reader {
        data: bytes,
        pos: 4,
        swapped,
    };
    let _version_major = r.u16()?;
    let _version_minor = r.u16()?;
    let _thiszone = r.u32()?;
    let _sigfigs = r.u32()?;
    let _snaplen = r.u32()?;
    let network = r.u32()?;
    if network != DLT_EN10MB && network != DLT_LINUX_SLL {
        return Err(Error::UnsupportedCapture(format!(
            "unsupported link type {network}"
        )));
    }

    let mut records = Vec::new();
    let mut skipped = SkipCounts::default();
    while r.pos < r.data.len() {
        let ts_sec = r.u32()? as i64;
        let ts_frac = r.u32()? as i64;
        let incl_len = r.u32()? as usize;
        let _orig_len = r.u32()?;
        let frame = r.take(incl_len)?;
        let micros = if nanos { ts_frac / 1000 } else { ts_frac };
        let timestamp_us = ts_sec * 1_000_000 + micros;
        match decode_frame(frame, network) {
            Decoded::Udp {
                src_ip,
                dst_ip,
                src_port,
                dst_port,
                payload_len,
            } => records.push(PacketRecord {
                timestamp_us,
                direction: Direction::Other,
                src_ip,
                dst_ip,
                src_port,
                dst_port,
                payload_len,
            }),
            Decoded::NonIpv4 => skipped.non_ipv4 += 1,
            Decoded::NonUdp => skipped.non_udp += 1,
            Decoded::Fragmented => skipped.fragmented += 1,
        }
    }
    records.sort_by_key(|r| r.timestamp_us);
    Ok(PcapContents { records, skipped })
}

enum Decoded {
    Udp {
        src_ip: Ipv4Addr,
        dst_ip: Ipv4Addr,
        src_port: u16,
        dst_port: u16,
        payload_len: u32,
    },
    NonIpv4,
    NonUdp,
    Fragmented,
}

fn decode_frame(frame: &[u8], network: u32) -> Decoded {
    // Locate the IPv4 header behind the link layer.
    let ip = match network {
        DLT_EN10MB => {
            if frame.len() < 14 {
                return Decoded::NonIpv4;
            }
            let ethertype = u16::from_be_bytes([frame[12], frame[13]]);
            if ethertype != 0x0800 {
                return Decoded::NonIpv4;
            }
            &frame[14..]
        }
        DLT_LINUX_SLL => {
            if frame.len() < 16 {
                return Decoded::NonIpv4;
            }
            let protocol = u16::from_be_bytes([frame[14], frame[15]]);
            if protocol != 0x0800 {
                return Decoded::NonIpv4;
            }
            &frame[16..]
        }
        _ => unreachable!("link type validated by caller"),
    };
    if ip.len() < 20 || ip[0] >> 4 != 4 {
        return Decoded::NonIpv4;
    }
    let ihl = ((ip[0] & 0x0f) as usize) * 4;
    if ihl < 20 || ip.len() < ihl {
        return Decoded::NonIpv4;
    }
    let flags_frag = u16::from_be_bytes([ip[6], ip[7]]);
    let more_fragments = flags_frag & 0x2000 != 0;
    let frag_offset = flags_frag & 0x1fff;
    if more_fragments || frag_offset != 0 {
        return Decoded::Fragmented;
    }
    if ip[9] != 17 {
        return Decoded::NonUdp;
    }
    let udp = &ip[ihl..];
    if udp.len() < 8 {
        return Decoded::NonUdp;
    }
    let src_port = u16::from_be_bytes([udp[0], udp[1]]);
    let dst_port = u16::from_be_bytes([udp[2], udp[3]]);
    let udp_len = u16::from_be_bytes([udp[4], udp[5]]) as u32;
    let payload_len = udp_len.saturating_sub(8).min(MAX_UDP_PAYLOAD);
    Decoded::Udp {
        src_ip: Ipv4Addr::new(ip[12], ip[13], ip[14], ip[15]),
        dst_ip: Ipv4Addr::new(ip[16], ip[17], ip[18], ip[19]),
        src_port,
        dst_port,
        payload_len,
    }
}

/// Write records as a little-endian, microsecond-resolution, Ethernet pcap.
/// Inverse of [`parse_pcap`] on timestamps, addresses, ports and lengths.
pub fn write_pcap(records: &[PacketRecord]) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + records.len() * 80);
    out.extend_from_slice(&MAGIC_US_LE.to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes()); // version 2.4
    out.extend_from_slice(&4u16.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes()); // thiszone
    out.extend_from_slice(&0u32.to_le_bytes()); // sigfigs
    out.extend_from_slice(&65535u32.to_le_bytes()); // snaplen
    out.extend_from_slice(&DLT_EN10MB.to_le_bytes());

    for rec in records {
        let frame_len = 14 + 20 + 8 + rec.payload_len as usize;
        let ts_sec = (rec.timestamp_us / 1_000_000) as u32;
        let ts_usec = (rec.timestamp_us % 1_000_000) as u32;
        out.extend_from_slice(&ts_sec.to_le_bytes());
        out.extend_from_slice(&ts_usec.to_le_bytes());
        out.extend_from_slice(&(frame_len as u32).to_le_bytes());
        out.extend_from_slice(&(frame_len as u32).to_le_bytes());

        // Ethernet header with synthetic MACs derived from the IPs.
        let src_oct = rec.src_ip.octets();
        let dst_oct = rec.dst_ip.octets();
        out.extend_from_slice(&[0x02, 0x00, dst_oct[0], dst_oct[1], dst_oct[2], dst_oct[3]]);
        out.extend_from_slice(&[0x02, 0x00, src_oct[0], src_oct[1], src_oct[2], src_oct[3]]);
        out.extend_from_slice(&0x0800u16.to_be_bytes());

        // IPv4 header, 20 bytes, no options.
        let total_len = (20 + 8 + rec.payload_len) as u16;
        let mut ip = [0u8; 20];
        ip[0] = 0x45;
        ip[2..4].copy_from_slice(&total_len.to_be_bytes());
        ip[8] = 64; // TTL
        ip[9] = 17; // UDP
        ip[12..16].copy_from_slice(&src_oct);
        ip[16..20].copy_from_slice(&dst_oct);
        let checksum = ipv4_checksum(&ip);
        ip[10..12].copy_from_slice(&checksum.to_be_bytes());
        out.extend_from_slice(&ip);

        // UDP header plus a zero payload.
        out.extend_from_slice(&rec.src_port.to_be_bytes());
        out.extend_from_slice(&rec.dst_port.to_be_bytes());
        out.extend_from_slice(&((8 + rec.payload_len) as u16).to_be_bytes());
        out.extend_from_slice(&0u16.to_be_bytes()); // checksum optional over IPv4
        out.resize(out.len() + rec.payload_len as usize, 0);
    }
    out
}

fn ipv4_checksum(header: &[u8; 20]) -> u16 {
    let mut sum = 0u32;
    for chunk in header.chunks(2) {
        sum += u16::from_be_bytes([chunk[0], chunk[1]]) as u32;
    }
    while sum >> 16 != 0 {
        sum = (sum & 0xffff) + (sum >> 16);
    }
    !(sum as u16)
}

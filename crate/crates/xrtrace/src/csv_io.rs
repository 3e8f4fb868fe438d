//! CSV interchange format for packet records.
//!
//! Schema: `timestamp_us,src_ip,src_port,dst_ip,dst_port,payload_len`,
//! UTF-8, LF or CRLF line endings.

use crate::error::{Error, Result};
use crate::packet::{Direction, PacketRecord};

pub const CSV_HEADER: &str = "timestamp_us,src_ip,src_port,dst_ip,dst_port,payload_len";

/// Parse the CSV interchange format. Rows out of order are stably sorted
/// by timestamp; direction is Other until classification runs.
pub fn parse_csv(text: &str) -> Result<Vec<PacketRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::SchemaError("empty input, expected header line".into()))?;
    if header.trim_end() != CSV_HEADER {
        return Err(Error::SchemaError(format!(
            "expected header `{CSV_HEADER}`, got `{}`",
            header.trim_end()
        )));
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::SchemaError(format!(
                "line {line_no}: expected 6 columns, got {}",
                fields.len()
            )));
        }
        let int = |s: &str, name: &str| -> Result<i64> {
            s.parse().map_err(|_| Error::ParseError {
                line: line_no,
                msg: format!("non-integer {name}: `{s}`"),
            })
        };
        let ip = |s: &str, name: &str| -> Result<std::net::Ipv4Addr> {
            s.parse().map_err(|_| Error::ParseError {
                line: line_no,
                msg: format!("invalid IPv4 {name}: `{s}`"),
            })
        };
        records.push(PacketRecord {
            timestamp_us: int(fields[0], "timestamp_us")?,
            direction: Direction::Other,
            src_ip: ip(fields[1], "src_ip")?,
            src_port: int(fields[2], "src_port")? as u16,
            dst_ip: ip(fields[3], "dst_ip")?,
            dst_port: int(fields[4], "dst_port")? as u16,
            payload_len: int(fields[5], "payload_len")? as u32,
        });
    }
    records.sort_by_key(|r| r.timestamp_us);
    Ok(records)
}

/// Inverse of [`parse_csv`] on all preserved fields.
pub fn write_csv(records: &[PacketRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.timestamp_us, r.src_ip, r.src_port, r.dst_ip, r.dst_port, r.payload_len
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_row_maps_fields() {
        let text = format!("{CSV_HEADER}\n0,10.0.0.2,5000,10.0.0.1,6000,1400\n");
        let records = parse_csv(&text).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].payload_len, 1400);
        assert_eq!(records[0].src_ip, std::net::Ipv4Addr::new(10, 0, 0, 2));
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_csv(&format!("{CSV_HEADER}\n")).unwrap().is_empty());
    }

    #[test]
    fn crlf_accepted() {
        let text = format!("{CSV_HEADER}\r\n0,10.0.0.2,5000,10.0.0.1,6000,1400\r\n");
        assert_eq!(parse_csv(&text).unwrap().len(), 1);
    }

    #[test]
    fn out_of_order_rows_are_sorted() {
        let text = format!(
            "{CSV_HEADER}\n100,10.0.0.2,5000,10.0.0.1,6000,1\n50,10.0.0.2,5000,10.0.0.1,6000,2\n"
        );
        let records = parse_csv(&text).unwrap();
        assert_eq!(records[0].timestamp_us, 50);
    }

    #[test]
    fn non_integer_field_reports_line() {
        let text = format!("{CSV_HEADER}\nabc,10.0.0.2,5000,10.0.0.1,6000,1400\n");
        match parse_csv(&text) {
            Err(Error::ParseError { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected ParseError, got {other:?}"),
        }
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = format!("{CSV_HEADER}\n0,10.0.0.2,5000,10.0.0.1,6000\n");
        assert!(matches!(parse_csv(&text), Err(Error::SchemaError(_))));
    }

    #[test]
    fn wrong_header_is_schema_error() {
        assert!(matches!(
            parse_csv("ts,src\n"),
            Err(Error::SchemaError(_))
        ));
    }
}

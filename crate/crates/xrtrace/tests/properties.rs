use proptest::prelude::*;
use xrtrace::dist::{theoretical_quantile, Family};
use xrtrace::gen::packetize_burst;
use xrtrace::packet::PacketRecord;
use xrtrace::{csv_io, pcap};

fn arbitrary_record() -> impl Strategy<Value = PacketRecord> {
    (
        0i64..=10_000_000_000,
        any::<[u8; 4]>(),
        any::<[u8; 4]>(),
        any::<u16>(),
        any::<u16>(),
        0u32..=65_507,
    )
        .prop_map(|(ts, src, dst, sp, dp, len)| PacketRecord {
            timestamp_us: ts,
            direction: xrtrace::packet::Direction::Other,
            src_ip: src.into(),
            dst_ip: dst.into(),
            src_port: sp,
            dst_port: dp,
            payload_len: len,
        })
}

proptest! {
    #[test]
    fn quantile_symmetry(p in 1e-6f64..0.5) {
        for family in Family::ALL {
            let lo = theoretical_quantile(family, p).unwrap();
            let hi = theoretical_quantile(family, 1.0 - p).unwrap();
            prop_assert!((lo + hi).abs() < 1e-9, "{family:?}: {lo} vs {hi}");
        }
    }

    #[test]
    fn quantile_monotone(p in 1e-6f64..0.999, step in 1e-6f64..1e-3) {
        let p2 = (p + step).min(1.0 - 1e-9);
        for family in Family::ALL {
            let a = theoretical_quantile(family, p).unwrap();
            let b = theoretical_quantile(family, p2).unwrap();
            prop_assert!(a <= b, "{family:?} not monotone at {p}");
        }
    }

    #[test]
    fn qq_linearity_affine_invariant(
        seed in any::<u64>(),
        scale in 0.1f64..100.0,
        shift in -1e4f64..1e4,
    ) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sample: Vec<f64> =
            (0..200).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let shifted: Vec<f64> = sample.iter().map(|v| v * scale + shift).collect();
        let (_, fits_a) = xrtrace::dist::fit_select(&sample).unwrap();
        let (_, fits_b) = xrtrace::dist::fit_select(&shifted).unwrap();
        for (a, b) in fits_a.iter().zip(&fits_b) {
            prop_assert!((a.linearity - b.linearity).abs() < 1e-9);
        }
    }

    #[test]
    fn packetize_conserves_bytes(total in 1u64..2_000_000, payload in 1001u32..9_000) {
        let packets = packetize_burst(total, payload);
        prop_assert_eq!(packets.iter().map(|&p| p as u64).sum::<u64>(), total);
        // All full packets except the last, which absorbs a short remainder.
        for &len in &packets[..packets.len() - 1] {
            prop_assert_eq!(len, payload);
        }
        prop_assert!(*packets.last().unwrap() <= payload + 1000);
    }

    #[test]
    fn pcap_round_trip(mut records in proptest::collection::vec(arbitrary_record(), 0..50)) {
        records.sort_by_key(|r| r.timestamp_us);
        let parsed = pcap::parse_pcap(&pcap::write_pcap(&records)).unwrap();
        prop_assert_eq!(parsed.records.len(), records.len());
        for (a, b) in parsed.records.iter().zip(&records) {
            prop_assert_eq!(a.timestamp_us, b.timestamp_us);
            prop_assert_eq!(a.src_ip, b.src_ip);
            prop_assert_eq!(a.dst_ip, b.dst_ip);
            prop_assert_eq!(a.src_port, b.src_port);
            prop_assert_eq!(a.dst_port, b.dst_port);
            prop_assert_eq!(a.payload_len, b.payload_len);
        }
    }

    #[test]
    fn csv_round_trip(mut records in proptest::collection::vec(arbitrary_record(), 0..50)) {
        records.sort_by_key(|r| r.timestamp_us);
        let parsed = csv_io::parse_csv(&csv_io::write_csv(&records)).unwrap();
        prop_assert_eq!(parsed.len(), records.len());
        for (a, b) in parsed.iter().zip(&records) {
            prop_assert_eq!(a.timestamp_us, b.timestamp_us);
            prop_assert_eq!(a.payload_len, b.payload_len);
        }
    }

    #[test]
    fn adf_statistic_affine_invariant(seed in any::<u64>(), scale in 0.5f64..20.0) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let series: Vec<f64> =
            (0..200).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        let scaled: Vec<f64> = series.iter().map(|v| v * scale + 3.0).collect();
        let a = xrtrace::arma::adf_test(&series, Some(4)).unwrap();
        let b = xrtrace::arma::adf_test(&scaled, Some(4)).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-6);
    }
}

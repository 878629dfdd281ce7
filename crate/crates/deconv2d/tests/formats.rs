//! Envelope cache and CSV round trips.

use proptest::prelude::*;

use deconv2d::cache::{decode, encode, load_or_build, load_set, save_set};
use deconv2d::csvout::{num, write_table};
use deconv2d::AppError;
use deconv2d_core::envelope::{build_envelopes, EnvelopeGridSpec, EnvelopeKind, StepEnvelope};

fn env_with(values: Vec<f64>, tail: f64) -> StepEnvelope {
    let m = values.len();
    StepEnvelope {
        kind: EnvelopeKind::LamBInf,
        monotone: false,
        k1: 7,
        tres: 3,
        ures: 5,
        edges: (0..=m).map(|k| k as f64 / 3.0).collect(),
        values,
        tail,
    }
}

proptest! {
    #[test]
    fn cache_text_round_trips(values in prop::collection::vec(-1e3f64..1e3, 1..40), tail in 0.0f64..1e-9) {
        let env = env_with(values, tail);
        let back = decode(&encode(&env), std::path::Path::new("mem")).unwrap();
        prop_assert_eq!(back, env);
    }

    #[test]
    fn csv_numbers_round_trip(v in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let mut buf = Vec::new();
        write_table(&mut buf, &["v"], &[vec![num(v)]]).unwrap();
        let mut r = csv::Reader::from_reader(buf.as_slice());
        let rec = r.records().next().unwrap().unwrap();
        prop_assert_eq!(rec[0].parse::<f64>().unwrap().to_bits(), v.to_bits());
    }
}

#[test]
fn corrupt_cache_files_are_rejected() {
    let p = std::path::Path::new("x.env");
    let good = encode(&env_with(vec![1.0, 0.5, 0.25], 1e-12));
    let truncated: String = good.lines().take(3).map(|l| format!("{l}\n")).collect();
    assert!(matches!(decode(&truncated, p), Err(AppError::Format { .. })));
    assert!(matches!(decode(&good.replacen("v1", "v2", 1), p), Err(AppError::VersionMismatch { ref found, .. }) if found == "v2"));
    assert!(matches!(decode("", p), Err(AppError::Format { line: 1, .. })));
    assert!(matches!(decode(&good.replacen("ENVCACHE", "ENVELOPE", 1), p), Err(AppError::Format { .. })));
    let gap = good.replacen("0.3333333333333333 0.6666666666666666", "0.4 0.6666666666666666", 1);
    assert!(matches!(decode(&gap, p), Err(AppError::Format { line: 3, .. })), "{gap}");
    assert!(matches!(decode(&good.replacen("0.5", "half", 1), p), Err(AppError::Format { .. })));
    assert!(matches!(decode(&good.replacen("kind=lamBinf", "kind=zz", 1), p), Err(AppError::Format { .. })));
    assert_eq!(AppError::Format { path: p.into(), line: 1, msg: String::new() }.exit_code(), 2);
}

#[test]
fn saved_sets_reload_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let spec = EnvelopeGridSpec::new(9, 3, 2);
    let set = build_envelopes(&spec).unwrap();
    assert_eq!(save_set(dir.path(), &set).unwrap().len(), 14);
    let back = load_set(dir.path(), spec).unwrap();
    for (a, b) in set.iter().zip(back.iter()) {
        assert_eq!(a, b);
    }
    let again = load_or_build(Some(dir.path()), spec).unwrap();
    assert_eq!(again.get(EnvelopeKind::DB), set.get(EnvelopeKind::DB));
    let other = tempfile::tempdir().unwrap();
    let built = load_or_build(Some(other.path()), spec).unwrap();
    assert_eq!(built.get(EnvelopeKind::B), set.get(EnvelopeKind::B));
    assert_eq!(std::fs::read_dir(other.path()).unwrap().count(), 14);
}

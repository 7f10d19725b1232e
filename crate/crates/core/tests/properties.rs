//! Invariants of the transform and the codec on arbitrary inputs.

use std::collections::HashMap;

use cdmpm_core::analysis::level_stats;
use cdmpm_core::codec::{compress_detailed, decompress_traced, encode_representation};
use cdmpm_core::{build_multilevel, compress, decompress, Alphabet, Error, Mode, Params, Token};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = Params> {
    (2u32..6, 0u32..12, any::<bool>()).prop_map(|(r, levels, cdmpm)| {
        Params::new(r, levels, if cdmpm { Mode::Cdmpm } else { Mode::Mpm }).unwrap()
    })
}

fn input() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![
        prop::collection::vec(0u8..2, 0..600),
        prop::collection::vec(b'a'..b'e', 0..600),
        prop::collection::vec(any::<u8>(), 0..400),
        (1usize..8, 0usize..700).prop_map(|(period, n)| (0..n).map(|i| (i % period) as u8).collect()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn expansion_is_lossless(data in input(), params in params()) {
        let rep = build_multilevel(&data, params, &Alphabet::infer(&data)).unwrap();
        prop_assert_eq!(rep.expand().unwrap(), data.clone());
        prop_assert_eq!(rep.grammar().expand().unwrap(), data);
    }

    #[test]
    fn codec_round_trips_in_lockstep(data in input(), params in params()) {
        let rep = build_multilevel(&data, params, &Alphabet::infer(&data)).unwrap();
        let mut sent = Vec::new();
        let encoded = encode_representation(&rep, |step| sent.push(*step)).unwrap();
        let mut received = Vec::new();
        let decoded = decompress_traced(&encoded.bytes, |step| received.push(*step)).unwrap();
        prop_assert_eq!(decoded, data.clone());
        prop_assert_eq!(sent, received);
        prop_assert!(encoded.payload_bits as f64 <= encoded.ideal_bits + 33.0);
        // Deterministic output.
        prop_assert_eq!(compress(&data, params).unwrap(), encoded.bytes);
    }

    #[test]
    fn counts_are_consistent(data in input(), params in params()) {
        let rep = build_multilevel(&data, params, &Alphabet::infer(&data)).unwrap();
        let r = params.r() as usize;
        let stats: Vec<_> = rep.levels().map(level_stats).collect();
        for pair in rep.levels().collect::<Vec<_>>().windows(2) {
            let (upper, lower) = (pair[0], pair[1]);
            prop_assert_eq!(lower.tail_start, r * upper.s_count());
            prop_assert_eq!(lower.len() - lower.tail_start, rep.lengths().tail_blocks(lower.level));
        }
        let flat = rep.flatten();
        let coded = flat.coded().count();
        prop_assert_eq!(coded, stats.iter().map(|s| s.coded).sum::<usize>());
        prop_assert_eq!(coded, compress_detailed(&data, params).unwrap().coded_tokens);
        // Class count equals the number of forced s tokens.
        for seq in rep.levels().filter(|s| s.level > 0) {
            let forced = seq.tokens.iter().filter(|t| t.is_forced()).count();
            prop_assert_eq!(forced, seq.class_count());
        }
    }

    #[test]
    fn every_token_is_decodable_when_reached(data in input(), params in params()) {
        let rep = build_multilevel(&data, params, &Alphabet::infer(&data)).unwrap();
        let mut seen_per_level: HashMap<u32, usize> = HashMap::new();
        let mut distinct: HashMap<(u32, u32), u32> = HashMap::new();
        for entry in rep.flatten().entries {
            // Blocks of a level arrive in sequence order, so the preceding
            // block (the context) is always complete first.
            let next = seen_per_level.entry(entry.level).or_insert(0);
            prop_assert_eq!(*next, entry.block);
            *next += 1;
            let d = distinct.entry((entry.level, entry.label)).or_insert(0);
            match entry.token {
                Token::S { forced } => {
                    prop_assert_eq!(forced, *d == 0);
                    *d += 1;
                }
                Token::Repeat(m) => prop_assert!(m >= 1 && m <= *d),
                Token::Symbol(_) => prop_assert_eq!(entry.level, 0),
            }
        }
    }

    #[test]
    fn corrupted_payloads_never_panic(data in input(), params in params(), flip in any::<prop::sample::Index>()) {
        let mut bytes = compress(&data, params).unwrap();
        let i = flip.index(bytes.len());
        bytes[i] ^= 0x5a;
        match decompress(&bytes) {
            Ok(_) | Err(Error::Corrupt(_)) | Err(Error::Desync(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

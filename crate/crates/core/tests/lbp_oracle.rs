//! Oracle checks for the riu2 LBP mapping: an independent 256-pattern
//! implementation with explicit rotation-class bookkeeping must agree
//! exactly.

use camid_core::lbp::{lbp_pattern, lbp_riu2_histogram, LBP_BINS, RIU2_TABLE};
use camid_core::mat::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent riu2 classification: walk the 8 bits as a circular list,
/// count value changes, and sum the ones.
fn oracle_riu2(pattern: u8) -> usize {
    let bits: Vec<u8> = (0..8).map(|i| (pattern >> i) & 1).collect();
    let mut transitions = 0;
    for i in 0..8 {
        if bits[i] != bits[(i + 1) % 8] {
            transitions += 1;
        }
    }
    if transitions <= 2 {
        bits.iter().map(|&b| b as usize).sum()
    } else {
        LBP_BINS - 1
    }
}

/// All circular rotations of a pattern, built by list rotation rather
/// than bit tricks.
fn rotations(pattern: u8) -> Vec<u8> {
    let bits: Vec<u8> = (0..8).map(|i| (pattern >> i) & 1).collect();
    (0..8)
        .map(|r| {
            let mut out = 0u8;
            for i in 0..8 {
                out |= bits[(i + r) % 8] << i;
            }
            out
        })
        .collect()
}

#[test]
fn all_256_patterns_match_oracle_and_rotation_classes() {
    for p in 0..256usize {
        assert_eq!(
            RIU2_TABLE[p] as usize,
            oracle_riu2(p as u8),
            "pattern {p:#010b}"
        );
        for r in rotations(p as u8) {
            assert_eq!(RIU2_TABLE[p], RIU2_TABLE[r as usize]);
        }
    }
}

#[test]
fn histogram_equals_naive_256_bin_oracle_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    for _case in 0..1000 {
        let m = Mat::from_fn(16, 16, |_, _| rng.gen_range(-4.0..4.0));
        let fast = lbp_riu2_histogram(&m).unwrap();

        // naive path: per-pixel 8-bit pattern recomputed from scratch, a
        // full 256-bin histogram, then collapse through the oracle
        // classifier
        let ring = [
            (-1i64, -1i64),
            (-1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
            (1, 0),
            (1, -1),
            (0, -1),
        ];
        let mut counts256 = [0u64; 256];
        for r in 1..15i64 {
            for c in 1..15i64 {
                let center = m.get(r as usize, c as usize);
                let mut pattern = 0usize;
                for (bit, (dr, dc)) in ring.iter().enumerate() {
                    if m.get((r + dr) as usize, (c + dc) as usize) >= center {
                        pattern += 1 << bit;
                    }
                }
                assert_eq!(pattern as u8, lbp_pattern(&m, r as usize, c as usize));
                counts256[pattern] += 1;
            }
        }
        let mut collapsed = [0u64; LBP_BINS];
        for (p, &n) in counts256.iter().enumerate() {
            collapsed[oracle_riu2(p as u8)] += n;
        }
        let total = 14.0 * 14.0;
        for (bin, (&fast_v, &slow_n)) in fast.iter().zip(&collapsed).enumerate() {
            let slow_v = slow_n as f64 / total;
            assert_eq!(fast_v, slow_v, "bin {bin}");
        }
    }
}

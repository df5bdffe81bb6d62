//! Extended-precision oracle for the linear-predictor fit: the normal
//! equations are accumulated and solved in double-double arithmetic
//! (~32 significant digits) and the resulting log errors must match the
//! pivoted-QR implementation.

use camid_core::dwd::{predictor_errors, Orientation, LOG_EPS};
use camid_core::mat::Mat;
use camid_core::wavelet::{DetailBands, WaveletPyramid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unevaluated-sum double-double number.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: f64::mul_add(a, b, -p),
    }
}

fn dd_add(a: Dd, b: Dd) -> Dd {
    let s = two_sum(a.hi, b.hi);
    let t = two_sum(a.lo, b.lo);
    let mut lo = s.lo + t.hi;
    let r = quick_two_sum(s.hi, lo);
    lo = r.lo + t.lo;
    quick_two_sum(r.hi, lo)
}

fn dd_sub(a: Dd, b: Dd) -> Dd {
    dd_add(
        a,
        Dd {
            hi: -b.hi,
            lo: -b.lo,
        },
    )
}

fn dd_mul(a: Dd, b: Dd) -> Dd {
    let mut p = two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    quick_two_sum(p.hi, p.lo)
}

fn dd_div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi / b.hi;
    let r = dd_sub(a, dd_mul(Dd::from(q1), b));
    let q2 = r.hi / b.hi;
    let r2 = dd_sub(r, dd_mul(Dd::from(q2), b));
    let q3 = r2.hi / b.hi;
    dd_add(dd_add(Dd::from(q1), Dd::from(q2)), Dd::from(q3))
}

fn dd_abs(a: Dd) -> Dd {
    if a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) {
        Dd {
            hi: -a.hi,
            lo: -a.lo,
        }
    } else {
        a
    }
}

/// Solves the 7x7 normal equations in double-double arithmetic by
/// Gaussian elimination with partial pivoting.
fn solve_normal_equations_dd(q: &[[f64; 7]], v: &[f64]) -> [Dd; 7] {
    let n = 7usize;
    let mut ata = [[Dd::from(0.0); 8]; 7];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Dd::from(0.0);
            for row in q {
                acc = dd_add(acc, two_prod(row[i], row[j]));
            }
            ata[i][j] = acc;
        }
        let mut acc = Dd::from(0.0);
        for (row, &vi) in q.iter().zip(v) {
            acc = dd_add(acc, two_prod(row[i], vi));
        }
        ata[i][n] = acc;
    }

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                dd_abs(ata[a][col])
                    .to_f64()
                    .total_cmp(&dd_abs(ata[b][col]).to_f64())
            })
            .unwrap();
        ata.swap(col, pivot);
        for row in col + 1..n {
            let factor = dd_div(ata[row][col], ata[col][col]);
            for c in col..=n {
                ata[row][c] = dd_sub(ata[row][c], dd_mul(factor, ata[col][c]));
            }
        }
    }
    let mut w = [Dd::from(0.0); 7];
    for row in (0..n).rev() {
        let mut acc = ata[row][n];
        for c in row + 1..n {
            acc = dd_sub(acc, dd_mul(ata[row][c], w[c]));
        }
        w[row] = dd_div(acc, ata[row][row]);
    }
    w
}

/// Rebuilds the fit rows exactly as the implementation defines them.
fn oracle_rows(
    p: &WaveletPyramid,
    orientation: Orientation,
    level: usize,
) -> (Vec<[f64; 7]>, Vec<f64>) {
    let pick = |lvl: usize, o: Orientation| -> &Mat {
        let d = p.detail(lvl);
        match o {
            Orientation::Vertical => &d.vertical,
            Orientation::Horizontal => &d.horizontal,
            Orientation::Diagonal => &d.diagonal,
        }
    };
    let target = pick(level, orientation);
    let parent = pick(level + 1, orientation);
    let diag = pick(level, Orientation::Diagonal);
    let diag_parent = pick(level + 1, Orientation::Diagonal);
    let (h, w) = target.shape();
    let mut rows = Vec::new();
    let mut v = Vec::new();
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            let mag = target.get(r, c).abs();
            if mag <= 1.0 {
                continue;
            }
            rows.push([
                target.get(r, c - 1).abs(),
                target.get(r, c + 1).abs(),
                target.get(r - 1, c).abs(),
                target.get(r + 1, c).abs(),
                parent.get(r / 2, c / 2).abs(),
                diag.get(r, c).abs(),
                diag_parent.get(r / 2, c / 2).abs(),
            ]);
            v.push(mag);
        }
    }
    (rows, v)
}

fn random_pyramid(seed: u64) -> WaveletPyramid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mk = |n: usize| {
        Mat::from_fn(n, n, |_, _| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            sign * rng.gen_range(0.2..8.0)
        })
    };
    WaveletPyramid {
        levels: 2,
        approx: mk(8),
        details: vec![
            DetailBands {
                vertical: mk(16),
                horizontal: mk(16),
                diagonal: mk(16),
            },
            DetailBands {
                vertical: mk(8),
                horizontal: mk(8),
                diagonal: mk(8),
            },
        ],
        original_shape: (32, 32),
    }
}

#[test]
fn predictor_errors_match_extended_precision_normal_equations() {
    for seed in 0..12u64 {
        let pyramid = random_pyramid(seed);
        for orientation in [Orientation::Vertical, Orientation::Horizontal] {
            let got = predictor_errors(&pyramid, orientation, 1).unwrap();
            let (rows, v) = oracle_rows(&pyramid, orientation, 1);
            assert_eq!(got.len(), v.len());

            let w = solve_normal_equations_dd(&rows, &v);
            for (i, row) in rows.iter().enumerate() {
                let mut pred = Dd::from(0.0);
                for (x, wi) in row.iter().zip(&w) {
                    pred = dd_add(pred, dd_mul(Dd::from(*x), *wi));
                }
                let expect = (v[i] + LOG_EPS).log2() - (pred.to_f64().abs() + LOG_EPS).log2();
                assert!(
                    (got[i] - expect).abs() < 1e-6,
                    "seed {seed} {orientation:?} row {i}: {} vs {}",
                    got[i],
                    expect
                );
            }
        }
    }
}

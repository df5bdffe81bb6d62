//! Multilevel 2D fast wavelet transform, inverse, and hard thresholding.
//!
//! Two filter banks are built in:
//!
//! * [`Wavelet::Db8`] — orthogonal Daubechies filter with 8 vanishing
//!   moments (16 taps), used for the statistical feature path. Boundaries
//!   use periodization, which keeps the transform orthogonal, so energy is
//!   preserved exactly and the inverse is the adjoint.
//! * [`Wavelet::Bior35`] — biorthogonal 3.5 spline filter pair (12/4 tap
//!   analysis/synthesis lowpass), used for denoising. Boundaries use
//!   half-sample symmetric extension folded down to critically sampled
//!   bands: for an even-length input the subbands of the extended signal
//!   satisfy `A[k] = A[L-1-k]` and `D[k] = -D[L-1-k]`, so only the first
//!   half of each is stored and the inverse re-expands before synthesis.
//!
//! Both banks reconstruct exactly (to roundoff) at every size; odd lengths
//! are padded by replicating the last sample and the inverse truncates back
//! to the recorded shape.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Daubechies-8 analysis lowpass (16 taps), derived by spectral
/// factorization of the degree-7 Daubechies half-band polynomial and
/// rounded to f64. Sum is sqrt(2), squared sum is 1.
#[allow(clippy::excessive_precision)]
const DB8_DEC_LO: [f64; 16] = [
    -0.00011747678412476953,
    0.00067544940645056933,
    -0.00039174037337694705,
    -0.0048703529934515741,
    0.0087460940474057766,
    0.013981027917398282,
    -0.044088253930794755,
    -0.017369301001807547,
    0.12874742662047847,
    0.00047248457391328279,
    -0.28401554296154691,
    -0.015829105256349306,
    0.58535468365420673,
    0.67563073629728976,
    0.31287159091429995,
    0.054415842243104008,
];

/// bior3.5 analysis lowpass: sqrt(2)/512 * [-5,15,19,-97,-26,350,350,-26,-97,19,15,-5].
#[allow(clippy::excessive_precision)]
const BIOR35_DEC_LO: [f64; 12] = [
    -0.013810679320049757,
    0.041432037960149271,
    0.052480581416189075,
    -0.26792717880896527,
    -0.07181553246425873,
    0.96674755240348298,
    0.96674755240348298,
    -0.07181553246425873,
    -0.26792717880896527,
    0.052480581416189075,
    0.041432037960149271,
    -0.013810679320049757,
];

/// bior3.5 synthesis lowpass: sqrt(2)/8 * [1,3,3,1].
#[allow(clippy::excessive_precision)]
const BIOR35_REC_LO: [f64; 4] = [
    0.17677669529663689,
    0.5303300858899106,
    0.5303300858899106,
    0.17677669529663689,
];

/// Alternating-flip quadrature construction: `out[n] = (-1)^n * src[N-1-n]`.
const fn alternating_flip<const N: usize>(src: [f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    let mut n = 0;
    while n < N {
        let v = src[N - 1 - n];
        out[n] = if n % 2 == 0 { v } else { -v };
        n += 1;
    }
    out
}

const DB8_DEC_HI: [f64; 16] = alternating_flip(DB8_DEC_LO);
const BIOR35_DEC_HI: [f64; 4] = alternating_flip(BIOR35_REC_LO);
const BIOR35_REC_HI: [f64; 12] = alternating_flip(BIOR35_DEC_LO);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Extension {
    /// Circular wrap with period `L`.
    Periodic,
    /// Half-sample symmetric extension (period `2L`), critically sampled.
    HalfSymmetric,
}

/// A two-channel analysis/synthesis filter bank.
///
/// The transform uses the correlation convention:
///
/// ```text
/// a[k] = sum_n analysis_lowpass[n]  * ext(x)[2k + n - alo]
/// d[k] = sum_n analysis_highpass[n] * ext(x)[2k + n - ahi]
/// ```
///
/// and synthesis scatters back through the synthesis filters at offsets
/// `slo`/`shi`, so that analyze-then-synthesize is the identity on any
/// even-length input.
#[derive(Debug)]
pub struct FilterBank {
    pub name: &'static str,
    pub analysis_lowpass: &'static [f64],
    pub analysis_highpass: &'static [f64],
    pub synthesis_lowpass: &'static [f64],
    pub synthesis_highpass: &'static [f64],
    extension: Extension,
    alo: isize,
    ahi: isize,
    slo: isize,
    shi: isize,
}

static DB8_BANK: FilterBank = FilterBank {
    name: "db8",
    analysis_lowpass: &DB8_DEC_LO,
    analysis_highpass: &DB8_DEC_HI,
    // orthogonal: synthesis is the adjoint of analysis
    synthesis_lowpass: &DB8_DEC_LO,
    synthesis_highpass: &DB8_DEC_HI,
    extension: Extension::Periodic,
    alo: 0,
    ahi: 0,
    slo: 0,
    shi: 0,
};

static BIOR35_BANK: FilterBank = FilterBank {
    name: "bior3.5",
    analysis_lowpass: &BIOR35_DEC_LO,
    analysis_highpass: &BIOR35_DEC_HI,
    synthesis_lowpass: &BIOR35_REC_LO,
    synthesis_highpass: &BIOR35_REC_HI,
    extension: Extension::HalfSymmetric,
    // offsets centre the symmetric filters so that both subbands of the
    // extended signal fold onto exactly L/2 independent samples
    alo: 5,
    ahi: 1,
    slo: 1,
    shi: 5,
};

/// Built-in filter banks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Wavelet {
    /// Daubechies 8 vanishing moments, periodized (orthogonal).
    Db8,
    /// Biorthogonal 3.5, half-sample symmetric extension.
    Bior35,
}

impl Wavelet {
    pub fn bank(self) -> &'static FilterBank {
        match self {
            Wavelet::Db8 => &DB8_BANK,
            Wavelet::Bior35 => &BIOR35_BANK,
        }
    }

    pub fn name(self) -> &'static str {
        self.bank().name
    }
}

/// Detail bands of one decomposition level.
///
/// `vertical` is highpass across the width (vertical edges), `horizontal`
/// highpass across the height, `diagonal` highpass in both directions.
#[derive(Clone, Debug, PartialEq)]
pub struct DetailBands {
    pub vertical: Mat,
    pub horizontal: Mat,
    pub diagonal: Mat,
}

/// Multilevel 2D decomposition: one approximation band plus a
/// vertical/horizontal/diagonal detail triplet per level.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletPyramid {
    /// Number of decomposition levels.
    pub levels: usize,
    /// Approximation band at the deepest level.
    pub approx: Mat,
    /// `details[0]` is the finest level (level 1).
    pub details: Vec<DetailBands>,
    /// Shape of the matrix the pyramid was built from.
    pub original_shape: (usize, usize),
}

impl WaveletPyramid {
    /// Detail bands at `level` (1-based, 1 = finest).
    pub fn detail(&self, level: usize) -> &DetailBands {
        &self.details[level - 1]
    }

    /// Input shape seen by `level` (1-based); level 1 sees the original.
    pub fn level_input_shape(&self, level: usize) -> (usize, usize) {
        let (mut h, mut w) = self.original_shape;
        for _ in 1..level {
            h = h.div_ceil(2);
            w = w.div_ceil(2);
        }
        (h, w)
    }

    /// Total number of stored coefficients.
    pub fn coefficient_count(&self) -> usize {
        let mut n = self.approx.rows() * self.approx.cols();
        for d in &self.details {
            n += 3 * d.vertical.rows() * d.vertical.cols();
        }
        n
    }
}

#[inline]
fn wrap(i: isize, m: isize) -> usize {
    i.rem_euclid(m) as usize
}

/// Extended-signal lookup for an even-length `x`.
#[inline]
fn ext_value(x: &[f64], i: isize, extension: Extension) -> f64 {
    let l = x.len() as isize;
    match extension {
        Extension::Periodic => x[wrap(i, l)],
        Extension::HalfSymmetric => {
            let j = wrap(i, 2 * l);
            if j < x.len() {
                x[j]
            } else {
                x[2 * x.len() - 1 - j]
            }
        }
    }
}

/// One analysis step on an even-length signal. `a` and `d` have length `x.len() / 2`.
fn analyze_even(x: &[f64], bank: &FilterBank, a: &mut [f64], d: &mut [f64]) {
    debug_assert!(x.len().is_multiple_of(2));
    let half = x.len() / 2;
    debug_assert!(a.len() == half && d.len() == half);
    for k in 0..half {
        let mut lo = 0.0;
        for (n, &c) in bank.analysis_lowpass.iter().enumerate() {
            lo += c * ext_value(x, 2 * k as isize + n as isize - bank.alo, bank.extension);
        }
        a[k] = lo;
        let mut hi = 0.0;
        for (n, &c) in bank.analysis_highpass.iter().enumerate() {
            hi += c * ext_value(x, 2 * k as isize + n as isize - bank.ahi, bank.extension);
        }
        d[k] = hi;
    }
}

/// One synthesis step; `out` has length `2 * a.len()` and is overwritten.
fn synthesize_even(a: &[f64], d: &[f64], bank: &FilterBank, out: &mut [f64], scratch: &mut [f64]) {
    let half = a.len();
    let l = 2 * half;
    debug_assert!(d.len() == half && out.len() == l);
    match bank.extension {
        Extension::Periodic => {
            out.iter_mut().for_each(|v| *v = 0.0);
            let li = l as isize;
            for k in 0..half {
                let (ak, dk) = (a[k], d[k]);
                for (n, &c) in bank.synthesis_lowpass.iter().enumerate() {
                    out[wrap(2 * k as isize + n as isize - bank.slo, li)] += ak * c;
                }
                for (n, &c) in bank.synthesis_highpass.iter().enumerate() {
                    out[wrap(2 * k as isize + n as isize - bank.shi, li)] += dk * c;
                }
            }
        }
        Extension::HalfSymmetric => {
            // re-expand the folded subbands over the 2L extension period
            debug_assert!(scratch.len() >= 2 * l);
            let buf = &mut scratch[..2 * l];
            buf.iter_mut().for_each(|v| *v = 0.0);
            let p = 2 * l as isize;
            for k in 0..l {
                let ak = if k < half { a[k] } else { a[l - 1 - k] };
                let dk = if k < half { d[k] } else { -d[l - 1 - k] };
                for (n, &c) in bank.synthesis_lowpass.iter().enumerate() {
                    buf[wrap(2 * k as isize + n as isize - bank.slo, p)] += ak * c;
                }
                for (n, &c) in bank.synthesis_highpass.iter().enumerate() {
                    buf[wrap(2 * k as isize + n as isize - bank.shi, p)] += dk * c;
                }
            }
            out.copy_from_slice(&buf[..l]);
        }
    }
}

/// Single-level 1D transform. Odd inputs are padded by replicating the last
/// sample; both bands have length `ceil(x.len() / 2)`.
pub fn dwt1d(x: &[f64], wavelet: Wavelet) -> (Vec<f64>, Vec<f64>) {
    let bank = wavelet.bank();
    let half = x.len().div_ceil(2);
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    if x.len().is_multiple_of(2) {
        analyze_even(x, bank, &mut a, &mut d);
    } else {
        let mut padded = Vec::with_capacity(x.len() + 1);
        padded.extend_from_slice(x);
        padded.push(x[x.len() - 1]);
        analyze_even(&padded, bank, &mut a, &mut d);
    }
    (a, d)
}

/// Inverse of [`dwt1d`]; `original_len` selects the unpadded prefix.
pub fn idwt1d(
    approx: &[f64],
    detail: &[f64],
    wavelet: Wavelet,
    original_len: usize,
) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::DimensionMismatch {
            expected: approx.len(),
            got: detail.len(),
        });
    }
    let padded_len = 2 * approx.len();
    if original_len != padded_len && original_len + 1 != padded_len {
        return Err(Error::DimensionMismatch {
            expected: padded_len,
            got: original_len,
        });
    }
    let bank = wavelet.bank();
    let mut out = vec![0.0; padded_len];
    let mut scratch = vec![0.0; 2 * padded_len];
    synthesize_even(approx, detail, bank, &mut out, &mut scratch);
    out.truncate(original_len);
    Ok(out)
}

/// Forward one 2D level: rows (width direction) then columns.
fn dwt2_level(input: &Mat, bank: &FilterBank) -> (Mat, DetailBands) {
    let (h, w) = input.shape();
    let hp = h + (h & 1);
    let wp = w + (w & 1);
    let (hw, ww) = (hp / 2, wp / 2);

    // filter along the width of every (padded) row
    let mut row_lo = Mat::zeros(hp, ww);
    let mut row_hi = Mat::zeros(hp, ww);
    let mut line = vec![0.0; wp];
    let mut a = vec![0.0; ww.max(hw)];
    let mut d = vec![0.0; ww.max(hw)];
    for r in 0..hp {
        let src = input.row(r.min(h - 1));
        line[..w].copy_from_slice(src);
        if wp > w {
            line[w] = src[w - 1];
        }
        analyze_even(&line[..wp], bank, &mut a[..ww], &mut d[..ww]);
        row_lo.row_mut(r).copy_from_slice(&a[..ww]);
        row_hi.row_mut(r).copy_from_slice(&d[..ww]);
    }

    // filter along the height of every column
    let mut approx = Mat::zeros(hw, ww);
    let mut horizontal = Mat::zeros(hw, ww);
    let mut vertical = Mat::zeros(hw, ww);
    let mut diagonal = Mat::zeros(hw, ww);
    let mut col = vec![0.0; hp];
    for c in 0..ww {
        for r in 0..hp {
            col[r] = row_lo.get(r, c);
        }
        analyze_even(&col, bank, &mut a[..hw], &mut d[..hw]);
        for r in 0..hw {
            approx.set(r, c, a[r]);
            horizontal.set(r, c, d[r]);
        }
        for r in 0..hp {
            col[r] = row_hi.get(r, c);
        }
        analyze_even(&col, bank, &mut a[..hw], &mut d[..hw]);
        for r in 0..hw {
            vertical.set(r, c, a[r]);
            diagonal.set(r, c, d[r]);
        }
    }

    (
        approx,
        DetailBands {
            vertical,
            horizontal,
            diagonal,
        },
    )
}

/// Inverse of one 2D level, truncated to `target` shape.
fn idwt2_level(
    approx: &Mat,
    bands: &DetailBands,
    bank: &FilterBank,
    target: (usize, usize),
) -> Result<Mat> {
    let (hb, wb) = approx.shape();
    for m in [&bands.vertical, &bands.horizontal, &bands.diagonal] {
        if m.shape() != (hb, wb) {
            return Err(Error::ShapeMismatch {
                expected: (hb, wb),
                got: m.shape(),
            });
        }
    }
    let (h, w) = target;
    let hp = h + (h & 1);
    let wp = w + (w & 1);
    if hp != 2 * hb || wp != 2 * wb {
        return Err(Error::ShapeMismatch {
            expected: (2 * hb, 2 * wb),
            got: (hp, wp),
        });
    }

    let mut row_lo = Mat::zeros(hp, wb);
    let mut row_hi = Mat::zeros(hp, wb);
    let mut a = vec![0.0; hb.max(wb)];
    let mut d = vec![0.0; hb.max(wb)];
    let mut line = vec![0.0; hp.max(wp)];
    let mut scratch = vec![0.0; 4 * hp.max(wp)];

    // undo the column (height) transform
    for c in 0..wb {
        for r in 0..hb {
            a[r] = approx.get(r, c);
            d[r] = bands.horizontal.get(r, c);
        }
        synthesize_even(&a[..hb], &d[..hb], bank, &mut line[..hp], &mut scratch);
        for r in 0..hp {
            row_lo.set(r, c, line[r]);
        }
        for r in 0..hb {
            a[r] = bands.vertical.get(r, c);
            d[r] = bands.diagonal.get(r, c);
        }
        synthesize_even(&a[..hb], &d[..hb], bank, &mut line[..hp], &mut scratch);
        for r in 0..hp {
            row_hi.set(r, c, line[r]);
        }
    }

    // undo the row (width) transform
    let mut out = Mat::zeros(h, w);
    for r in 0..h {
        synthesize_even(row_lo.row(r), row_hi.row(r), bank, &mut line[..wp], &mut scratch);
        out.row_mut(r).copy_from_slice(&line[..w]);
    }
    Ok(out)
}

/// Multilevel 2D forward transform.
pub fn dwt2(channel: &Mat, wavelet: Wavelet, levels: usize) -> Result<WaveletPyramid> {
    if levels == 0 {
        return Err(Error::InvalidParameter("levels must be >= 1"));
    }
    let (h, w) = channel.shape();
    let min_dim = h.min(w);
    if min_dim >> levels == 0 {
        return Err(Error::TooManyLevels { levels, min_dim });
    }
    let bank = wavelet.bank();
    let mut details = Vec::with_capacity(levels);
    let mut approx = channel.clone();
    for _ in 0..levels {
        let (next, bands) = dwt2_level(&approx, bank);
        details.push(bands);
        approx = next;
    }
    Ok(WaveletPyramid {
        levels,
        approx,
        details,
        original_shape: (h, w),
    })
}

/// Multilevel 2D inverse transform back to `original_shape`.
pub fn idwt2(pyramid: &WaveletPyramid, wavelet: Wavelet) -> Result<Mat> {
    let bank = wavelet.bank();
    let mut cur = pyramid.approx.clone();
    for level in (1..=pyramid.levels).rev() {
        let target = pyramid.level_input_shape(level);
        cur = idwt2_level(&cur, &pyramid.details[level - 1], bank, target)?;
    }
    Ok(cur)
}

/// Zeroes detail coefficients with `|c| <= tau`; the approximation band is
/// left untouched.
pub fn hard_threshold(pyramid: &WaveletPyramid, tau: f64) -> Result<WaveletPyramid> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter("tau must be >= 0"));
    }
    let mut out = pyramid.clone();
    for bands in &mut out.details {
        for m in [
            &mut bands.vertical,
            &mut bands.horizontal,
            &mut bands.diagonal,
        ] {
            for v in m.data_mut() {
                if libm::fabs(*v) <= tau {
                    *v = 0.0;
                }
            }
        }
    }
    Ok(out)
}

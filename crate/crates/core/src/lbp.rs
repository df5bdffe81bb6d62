//! Local binary pattern features of denoising noise residuals.
//!
//! Each color channel is wavelet-denoised (bior3.5, hard threshold) and
//! subtracted from itself; the remaining noise field carries sensor- and
//! pipeline-specific texture. That residual is summarized by a 10-bin
//! rotation-invariant uniform LBP histogram, giving 30 features per image.

use alloc::vec::Vec;

use crate::dataset::ImageRgb;
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::wavelet::{dwt2, hard_threshold, idwt2, Wavelet};

/// Residual histogram bin count: popcounts 0..=8 of the uniform patterns
/// plus one shared bin for every non-uniform pattern.
pub const LBP_BINS: usize = 10;

/// LBP feature dimension: [`LBP_BINS`] per color channel.
pub const LBP_DIM: usize = 3 * LBP_BINS;

/// Denoising threshold selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tau {
    /// Universal threshold `sigma * sqrt(2 ln N)` with the noise scale
    /// estimated from the finest diagonal band:
    /// `sigma = median(|HD^(1)|) / 0.6745`.
    Auto,
    /// Fixed nonnegative threshold.
    Fixed(f64),
}

/// A channel's denoising residual together with the threshold that
/// produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseResidual {
    pub residual: Mat,
    pub tau: f64,
}

/// Number of decomposition levels used by the denoiser.
pub const DENOISE_LEVELS: usize = 4;

/// Median of a sample (average of the middle two for even counts).
fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Computes `N = I - I_F` where `I_F` is the bior3.5 reconstruction after
/// hard-thresholding all detail bands.
pub fn noise_residual(channel: &Mat, tau: Tau) -> Result<NoiseResidual> {
    noise_residual_with_levels(channel, tau, DENOISE_LEVELS)
}

/// [`noise_residual`] with an explicit decomposition depth.
pub fn noise_residual_with_levels(channel: &Mat, tau: Tau, levels: usize) -> Result<NoiseResidual> {
    let pyramid = dwt2(channel, Wavelet::Bior35, levels)?;
    let tau = match tau {
        Tau::Fixed(t) => {
            if !(t >= 0.0) {
                return Err(Error::InvalidParameter("tau must be >= 0"));
            }
            t
        }
        Tau::Auto => {
            let mut mags: Vec<f64> = pyramid.details[0]
                .diagonal
                .iter()
                .map(|v| libm::fabs(*v))
                .collect();
            let sigma = median(&mut mags) / 0.6745;
            let n = (channel.rows() * channel.cols()) as f64;
            sigma * libm::sqrt(2.0 * libm::log(n))
        }
    };
    let filtered = idwt2(&hard_threshold(&pyramid, tau)?, Wavelet::Bior35)?;
    let residual = Mat::from_fn(channel.rows(), channel.cols(), |r, c| {
        channel.get(r, c) - filtered.get(r, c)
    });
    Ok(NoiseResidual { residual, tau })
}

/// Rotation-invariant uniform mapping for 8-bit neighborhoods: uniform
/// patterns (at most two 0/1 transitions around the circle) map to their
/// popcount 0..=8; everything else maps to bin 9.
const fn build_riu2_table() -> [u8; 256] {
    let mut table = [0u8; 256];
    let mut p = 0usize;
    while p < 256 {
        let byte = p as u8;
        let transitions = (byte ^ byte.rotate_right(1)).count_ones();
        table[p] = if transitions <= 2 {
            byte.count_ones() as u8
        } else {
            (LBP_BINS - 1) as u8
        };
        p += 1;
    }
    table
}

/// Pattern -> bin lookup (exactly 58 patterns land in bins 0..=8).
pub static RIU2_TABLE: [u8; 256] = build_riu2_table();

/// The 8 neighbors at Chebyshev radius 1, in circular order. Bit `i` of a
/// pattern corresponds to offset `i`.
pub const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (1, 0),
    (1, -1),
    (0, -1),
];

/// Raw 8-bit pattern at interior pixel `(r, c)`: bit set where the
/// neighbor is `>=` the center (ties count as 1).
#[inline]
pub fn lbp_pattern(m: &Mat, r: usize, c: usize) -> u8 {
    let center = m.get(r, c);
    let mut pattern = 0u8;
    for (i, (dr, dc)) in NEIGHBOR_OFFSETS.iter().enumerate() {
        let v = m.get((r as isize + dr) as usize, (c as isize + dc) as usize);
        if v >= center {
            pattern |= 1 << i;
        }
    }
    pattern
}

/// Normalized riu2 histogram over all interior pixels. Border pixels are
/// excluded rather than padded.
pub fn lbp_riu2_histogram(residual: &Mat) -> Result<[f64; LBP_BINS]> {
    let (h, w) = residual.shape();
    if h < 3 || w < 3 {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: 3,
        });
    }
    let mut counts = [0u64; LBP_BINS];
    for r in 1..h - 1 {
        for c in 1..w - 1 {
            counts[RIU2_TABLE[lbp_pattern(residual, r, c) as usize] as usize] += 1;
        }
    }
    let total = ((h - 2) * (w - 2)) as f64;
    let mut hist = [0.0; LBP_BINS];
    for (out, &n) in hist.iter_mut().zip(&counts) {
        *out = n as f64 / total;
    }
    Ok(hist)
}

/// 30-dimensional LBP feature vector (10 bins per channel, R then G
/// then B).
#[derive(Clone, Debug, PartialEq)]
pub struct LbpFeatureVector {
    pub values: Vec<f64>,
    /// Threshold actually applied per channel (resolved from `Tau::Auto`).
    pub tau_used: [f64; 3],
}

/// Extracts the LBP features of every channel's noise residual.
pub fn extract_lbp(image: &ImageRgb, tau: Tau) -> Result<LbpFeatureVector> {
    extract_lbp_with_levels(image, tau, DENOISE_LEVELS)
}

/// [`extract_lbp`] with an explicit denoising decomposition depth.
pub fn extract_lbp_with_levels(
    image: &ImageRgb,
    tau: Tau,
    levels: usize,
) -> Result<LbpFeatureVector> {
    let mut values = Vec::with_capacity(LBP_DIM);
    let mut tau_used = [0.0; 3];
    for c in 0..3 {
        let res = noise_residual_with_levels(image.channel(c), tau, levels)?;
        tau_used[c] = res.tau;
        values.extend_from_slice(&lbp_riu2_histogram(&res.residual)?);
    }
    Ok(LbpFeatureVector { values, tau_used })
}

/// Slot names for the LBP layout, index-aligned with
/// [`LbpFeatureVector::values`].
pub fn lbp_slot_names() -> Vec<alloc::string::String> {
    use alloc::format;
    let mut names = Vec::with_capacity(LBP_DIM);
    for ch in crate::dataset::CHANNEL_NAMES {
        for bin in 0..LBP_BINS {
            if bin == LBP_BINS - 1 {
                names.push(format!("{ch}.lbp.nonuniform"));
            } else {
                names.push(format!("{ch}.lbp.uniform_popcount{bin}"));
            }
        }
    }
    names
}

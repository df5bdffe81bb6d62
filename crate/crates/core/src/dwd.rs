//! Wavelet-domain statistical features.
//!
//! A 4-level db8 decomposition of each color channel feeds three blocks
//! per (channel, level 1..=3, orientation) cell:
//!
//! * four population moments of the detail coefficients,
//! * four population moments of the linear-predictor log error, where
//!   each coefficient magnitude is predicted by least squares from seven
//!   neighboring magnitudes (left, right, up, down, same-orientation
//!   parent, same-level diagonal, parent diagonal),
//! * five co-occurrence (Haralick) statistics of the quantized band:
//!   energy, entropy, contrast, homogeneity, correlation.
//!
//! That is 13 values for each of 3 channels x 3 levels x 3 orientations,
//! 351 in total: 108 coefficient moments, 108 predictor moments, 135
//! co-occurrence statistics. Slot layout is channel-major (R, G, B), then
//! level (1..=3), then orientation (V, H, D), then the three blocks; see
//! [`dwd_slot_names`].

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::{ImageRgb, CHANNEL_NAMES};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::wavelet::{dwt2, Wavelet, WaveletPyramid};

/// Total feature dimension.
pub const DWD_DIM: usize = 351;

/// Decomposition depth; features are drawn from levels 1..=3 and level 4
/// supplies the parents of level 3.
pub const DWD_LEVELS: usize = 4;

/// Feature levels (1-based, finest first).
pub const FEATURE_LEVELS: core::ops::RangeInclusive<usize> = 1..=3;

/// Added inside both logarithms of the predictor error so they stay finite.
pub const LOG_EPS: f64 = 1e-10;

/// Variance floor below which skewness/kurtosis are considered undefined.
pub const DEGENERATE_VARIANCE: f64 = 1e-12;

/// Minimum number of fit rows for the linear predictor.
pub const MIN_PREDICTOR_SAMPLES: usize = 8;

/// Detail-band orientation, in slot order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Vertical,
    Horizontal,
    Diagonal,
}

pub const ORIENTATIONS: [Orientation; 3] = [
    Orientation::Vertical,
    Orientation::Horizontal,
    Orientation::Diagonal,
];

impl Orientation {
    pub fn short_name(self) -> &'static str {
        match self {
            Orientation::Vertical => "V",
            Orientation::Horizontal => "H",
            Orientation::Diagonal => "D",
        }
    }
}

fn band(pyramid: &WaveletPyramid, level: usize, orientation: Orientation) -> &Mat {
    let d = pyramid.detail(level);
    match orientation {
        Orientation::Vertical => &d.vertical,
        Orientation::Horizontal => &d.horizontal,
        Orientation::Diagonal => &d.diagonal,
    }
}

/// Population moments of one band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubbandStats {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Two-pass population moments: `variance = E[(x-m)^2]`,
/// `skewness = m3 / m2^1.5`, non-excess `kurtosis = m4 / m2^2`.
fn central_moments(data: impl Iterator<Item = f64> + Clone) -> (f64, f64, f64, f64, usize) {
    let mut n = 0usize;
    let mut sum = 0.0;
    for v in data.clone() {
        sum += v;
        n += 1;
    }
    let mean = sum / n as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in data {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let nf = n as f64;
    (mean, m2 / nf, m3 / nf, m4 / nf, n)
}

/// Moments of a detail band.
///
/// Fails with [`Error::DegenerateBand`] when the variance is below
/// [`DEGENERATE_VARIANCE`] (skewness and kurtosis undefined); callers that
/// must keep going substitute zeros for the two higher moments.
pub fn subband_stats(band: &Mat) -> Result<SubbandStats> {
    if band.rows() * band.cols() == 0 {
        return Err(Error::InsufficientSamples { got: 0, need: 1 });
    }
    let (mean, m2, m3, m4, _) = central_moments(band.iter().copied());
    if m2 < DEGENERATE_VARIANCE {
        return Err(Error::DegenerateBand);
    }
    Ok(SubbandStats {
        mean,
        variance: m2,
        skewness: m3 / (m2 * libm::sqrt(m2)),
        kurtosis: m4 / (m2 * m2),
    })
}

/// Moments with the degenerate-band substitution applied: mean/variance
/// always real, skewness/kurtosis zeroed (and reported) when undefined.
fn stats_lenient(data: impl Iterator<Item = f64> + Clone) -> (SubbandStats, bool) {
    let (mean, m2, m3, m4, _) = central_moments(data);
    if m2 < DEGENERATE_VARIANCE {
        (
            SubbandStats {
                mean,
                variance: m2,
                skewness: 0.0,
                kurtosis: 0.0,
            },
            true,
        )
    } else {
        (
            SubbandStats {
                mean,
                variance: m2,
                skewness: m3 / (m2 * libm::sqrt(m2)),
                kurtosis: m4 / (m2 * m2),
            },
            false,
        )
    }
}

/// Least squares `min ||v - A w||_2` by Householder QR with column
/// pivoting. Rank-deficient directions get zero weight; the returned `w`
/// always reproduces the unique projection `A w`.
pub(crate) fn least_squares(a_in: &Mat, v: &[f64]) -> Vec<f64> {
    let (m, n) = a_in.shape();
    debug_assert_eq!(v.len(), m);
    let mut a = a_in.clone();
    let mut b: Vec<f64> = v.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();

    let initial_max: f64 = (0..n)
        .map(|j| (0..m).map(|i| a.get(i, j) * a.get(i, j)).sum::<f64>())
        .fold(0.0, f64::max);
    let tol = libm::sqrt(initial_max) * 1e-12;

    let rank_limit = m.min(n);
    let mut rank = rank_limit;
    for j in 0..rank_limit {
        // pivot on the largest remaining column
        let (best, best_norm) = (j..n)
            .map(|c| {
                let norm: f64 = (j..m).map(|i| a.get(i, c) * a.get(i, c)).sum();
                (c, norm)
            })
            .fold((j, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best != j {
            for i in 0..m {
                let t = a.get(i, j);
                a.set(i, j, a.get(i, best));
                a.set(i, best, t);
            }
            perm.swap(j, best);
        }
        let col_norm = libm::sqrt(best_norm.max(0.0));
        if col_norm <= tol {
            rank = j;
            break;
        }

        // Householder reflector for column j
        let alpha = if a.get(j, j) >= 0.0 {
            -col_norm
        } else {
            col_norm
        };
        let mut u: Vec<f64> = (j..m).map(|i| a.get(i, j)).collect();
        u[0] -= alpha;
        let unorm2: f64 = u.iter().map(|x| x * x).sum();
        if unorm2 > 0.0 {
            for c in j..n {
                let dot: f64 = (j..m).map(|i| u[i - j] * a.get(i, c)).sum();
                let f = 2.0 * dot / unorm2;
                for i in j..m {
                    a.set(i, c, a.get(i, c) - f * u[i - j]);
                }
            }
            let dot: f64 = (j..m).map(|i| u[i - j] * b[i]).sum();
            let f = 2.0 * dot / unorm2;
            for i in j..m {
                b[i] -= f * u[i - j];
            }
        }
        a.set(j, j, alpha);
    }

    // back substitution on the rank x rank triangle
    let mut w_perm = vec![0.0; n];
    for j in (0..rank).rev() {
        let mut s = b[j];
        for c in j + 1..rank {
            s -= a.get(j, c) * w_perm[c];
        }
        w_perm[j] = s / a.get(j, j);
    }
    let mut w = vec![0.0; n];
    for (slot, &col) in perm.iter().enumerate() {
        w[col] = w_perm[slot];
    }
    w
}

/// Per-coefficient log prediction errors for one detail band.
///
/// For every interior coefficient with magnitude above 1, the magnitude is
/// predicted by least squares from its seven neighbor magnitudes; the
/// error is `log2(v + eps) - log2(|prediction| + eps)`. Needs the parent
/// level, so `level` must be below the pyramid depth.
pub fn predictor_errors(
    pyramid: &WaveletPyramid,
    orientation: Orientation,
    level: usize,
) -> Result<Vec<f64>> {
    if level == 0 || level + 1 > pyramid.levels {
        return Err(Error::InvalidParameter(
            "predictor level needs a parent level in the pyramid",
        ));
    }
    let target = band(pyramid, level, orientation);
    let parent = band(pyramid, level + 1, orientation);
    let diag = band(pyramid, level, Orientation::Diagonal);
    let diag_parent = band(pyramid, level + 1, Orientation::Diagonal);

    let (h, w) = target.shape();
    let mut rows: Vec<[f64; 7]> = Vec::new();
    let mut v: Vec<f64> = Vec::new();
    if h >= 3 && w >= 3 {
        for r in 1..h - 1 {
            for c in 1..w - 1 {
                let mag = libm::fabs(target.get(r, c));
                if mag <= 1.0 {
                    continue;
                }
                rows.push([
                    libm::fabs(target.get(r, c - 1)),
                    libm::fabs(target.get(r, c + 1)),
                    libm::fabs(target.get(r - 1, c)),
                    libm::fabs(target.get(r + 1, c)),
                    libm::fabs(parent.get(r / 2, c / 2)),
                    libm::fabs(diag.get(r, c)),
                    libm::fabs(diag_parent.get(r / 2, c / 2)),
                ]);
                v.push(mag);
            }
        }
    }
    if v.len() < MIN_PREDICTOR_SAMPLES {
        return Err(Error::InsufficientSamples {
            got: v.len(),
            need: MIN_PREDICTOR_SAMPLES,
        });
    }

    let q = Mat::from_fn(v.len(), 7, |r, c| rows[r][c]);
    let w_fit = least_squares(&q, &v);
    let predicted = q.matvec(&w_fit)?;
    Ok(v
        .iter()
        .zip(&predicted)
        .map(|(&vi, &pi)| libm::log2(vi + LOG_EPS) - libm::log2(libm::fabs(pi) + LOG_EPS))
        .collect())
}

/// Haralick co-occurrence statistics of one band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaralickStats {
    pub energy: f64,
    pub entropy: f64,
    pub contrast: f64,
    pub homogeneity: f64,
    pub correlation: f64,
}

/// Co-occurrence statistics at the given offset.
///
/// The band is quantized to `gray_levels` bins by min-max binning; pairs
/// `(p, p + offset)` are accumulated symmetrically and normalized to a
/// joint distribution. Entropy is in bits. Fails with
/// [`Error::DegenerateBand`] on constant bands (correlation undefined).
pub fn cooccurrence_features(
    band: &Mat,
    gray_levels: usize,
    offset: (isize, isize),
) -> Result<HaralickStats> {
    if gray_levels < 2 {
        return Err(Error::InvalidParameter("gray_levels must be >= 2"));
    }
    if offset == (0, 0) {
        return Err(Error::InvalidParameter("offset must be nonzero"));
    }
    let (h, w) = band.shape();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in band.iter() {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let constant = !(hi - lo > 1e-12);

    let g = gray_levels;
    let quantize = |x: f64| -> usize {
        if constant {
            0
        } else {
            let t = (x - lo) / (hi - lo) * g as f64;
            (libm::floor(t) as usize).min(g - 1)
        }
    };

    let (dr, dc) = offset;
    let mut counts = vec![0u64; g * g];
    let mut pairs = 0u64;
    for r in 0..h {
        let rr = r as isize + dr;
        if rr < 0 || rr >= h as isize {
            continue;
        }
        for c in 0..w {
            let cc = c as isize + dc;
            if cc < 0 || cc >= w as isize {
                continue;
            }
            let i = quantize(band.get(r, c));
            let j = quantize(band.get(rr as usize, cc as usize));
            counts[i * g + j] += 1;
            counts[j * g + i] += 1;
            pairs += 2;
        }
    }
    if pairs == 0 {
        return Err(Error::InsufficientSamples { got: 0, need: 1 });
    }

    let total = pairs as f64;
    let mut energy = 0.0;
    let mut entropy = 0.0;
    let mut contrast = 0.0;
    let mut homogeneity = 0.0;
    let mut mean_i = 0.0;
    for i in 0..g {
        for j in 0..g {
            let p = counts[i * g + j] as f64 / total;
            if p == 0.0 {
                continue;
            }
            energy += p * p;
            entropy -= p * libm::log2(p);
            let d = i as f64 - j as f64;
            contrast += d * d * p;
            homogeneity += p / (1.0 + d * d);
            mean_i += i as f64 * p;
        }
    }
    // symmetric accumulation makes the marginals equal
    let mut var_i = 0.0;
    let mut cov = 0.0;
    for i in 0..g {
        for j in 0..g {
            let p = counts[i * g + j] as f64 / total;
            if p == 0.0 {
                continue;
            }
            var_i += (i as f64 - mean_i) * (i as f64 - mean_i) * p;
            cov += (i as f64 - mean_i) * (j as f64 - mean_i) * p;
        }
    }

    if constant {
        return Err(Error::DegenerateBand);
    }
    Ok(HaralickStats {
        energy,
        entropy,
        contrast,
        homogeneity,
        correlation: cov / var_i,
    })
}

/// Degenerate-tolerant co-occurrence: constant bands get the single-cell
/// distribution (energy 1, entropy 0, contrast 0, homogeneity 1) with
/// correlation substituted by 0.
fn cooccurrence_lenient(
    band: &Mat,
    gray_levels: usize,
    offset: (isize, isize),
) -> Result<(HaralickStats, bool)> {
    match cooccurrence_features(band, gray_levels, offset) {
        Ok(s) => Ok((s, false)),
        Err(Error::DegenerateBand) => Ok((
            HaralickStats {
                energy: 1.0,
                entropy: 0.0,
                contrast: 0.0,
                homogeneity: 1.0,
                correlation: 0.0,
            },
            true,
        )),
        Err(e) => Err(e),
    }
}

/// Co-occurrence configuration; the defaults (16 bins, offset (0,1)) are
/// what the extraction CLI records in cache headers.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DwdConfig {
    pub gray_levels: usize,
    pub offset: (isize, isize),
}

impl Default for DwdConfig {
    fn default() -> Self {
        DwdConfig {
            gray_levels: 16,
            offset: (0, 1),
        }
    }
}

/// The 351-dimensional feature vector plus the slots whose statistic was
/// substituted because it was undefined (degenerate band or too few
/// predictor samples).
#[derive(Clone, Debug, PartialEq)]
pub struct DwdFeatureVector {
    pub values: Vec<f64>,
    pub flagged_slots: Vec<usize>,
}

/// Values per (channel, level, orientation) cell.
const CELL: usize = 13;

/// Extracts the DWD feature vector with default co-occurrence settings.
pub fn extract_dwd(image: &ImageRgb) -> Result<DwdFeatureVector> {
    extract_dwd_with(image, &DwdConfig::default())
}

/// Extracts the DWD feature vector.
pub fn extract_dwd_with(image: &ImageRgb, config: &DwdConfig) -> Result<DwdFeatureVector> {
    let mut values = vec![0.0; DWD_DIM];
    let mut flagged = Vec::new();
    for ch in 0..3 {
        let pyramid = dwt2(image.channel(ch), Wavelet::Db8, DWD_LEVELS)?;
        for level in FEATURE_LEVELS {
            for (oi, orientation) in ORIENTATIONS.into_iter().enumerate() {
                let base = ((ch * 3 + (level - 1)) * 3 + oi) * CELL;
                let b = band(&pyramid, level, orientation);

                let (coeff, coeff_flag) = stats_lenient(b.iter().copied());
                values[base] = coeff.mean;
                values[base + 1] = coeff.variance;
                values[base + 2] = coeff.skewness;
                values[base + 3] = coeff.kurtosis;
                if coeff_flag {
                    flagged.push(base + 2);
                    flagged.push(base + 3);
                }

                let (pred, pred_flags) = match predictor_errors(&pyramid, orientation, level) {
                    Ok(errors) => {
                        let (s, f) = stats_lenient(errors.iter().copied());
                        (s, if f { vec![base + 6, base + 7] } else { vec![] })
                    }
                    Err(Error::InsufficientSamples { .. }) => (
                        SubbandStats {
                            mean: 0.0,
                            variance: 0.0,
                            skewness: 0.0,
                            kurtosis: 0.0,
                        },
                        vec![base + 4, base + 5, base + 6, base + 7],
                    ),
                    Err(e) => return Err(e),
                };
                values[base + 4] = pred.mean;
                values[base + 5] = pred.variance;
                values[base + 6] = pred.skewness;
                values[base + 7] = pred.kurtosis;
                flagged.extend(pred_flags);

                let (har, har_flag) = cooccurrence_lenient(b, config.gray_levels, config.offset)?;
                values[base + 8] = har.energy;
                values[base + 9] = har.entropy;
                values[base + 10] = har.contrast;
                values[base + 11] = har.homogeneity;
                values[base + 12] = har.correlation;
                if har_flag {
                    flagged.push(base + 12);
                }
            }
        }
    }
    debug_assert!(values.iter().all(|v| v.is_finite()));
    Ok(DwdFeatureVector {
        values,
        flagged_slots: flagged,
    })
}

/// Name of every slot, index-aligned with [`DwdFeatureVector::values`].
pub fn dwd_slot_names() -> Vec<String> {
    use alloc::format;
    let stat_names = ["mean", "variance", "skewness", "kurtosis"];
    let har_names = ["energy", "entropy", "contrast", "homogeneity", "correlation"];
    let mut names = vec![String::new(); DWD_DIM];
    for (ch, ch_name) in CHANNEL_NAMES.iter().enumerate() {
        for level in FEATURE_LEVELS {
            for (oi, orientation) in ORIENTATIONS.into_iter().enumerate() {
                let base = ((ch * 3 + (level - 1)) * 3 + oi) * CELL;
                let o = orientation.short_name();
                for (i, s) in stat_names.iter().enumerate() {
                    names[base + i] = format!("{ch_name}.l{level}.{o}.coeff.{s}");
                    names[base + 4 + i] = format!("{ch_name}.l{level}.{o}.pred.{s}");
                }
                for (i, s) in har_names.iter().enumerate() {
                    names[base + 8 + i] = format!("{ch_name}.l{level}.{o}.cooc.{s}");
                }
            }
        }
    }
    names
}

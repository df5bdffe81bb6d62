//! `camid extract`: decode every manifest image, optionally expand it
//! into quadrant crops, run the feature extractor, and write the cache.

use camid_core::dataset::{augment_quadrant_crops, ImageRgb, ManifestEntry};
use camid_core::dwd::{dwd_slot_names, extract_dwd_with, DwdConfig, DWD_LEVELS};
use camid_core::lbp::{extract_lbp_with_levels, lbp_slot_names, Tau};
use rayon::prelude::*;

use crate::cache::{
    save_cache, CacheHeader, CacheRow, ExtractionParams, FeatureCache, FeatureSet,
    CACHE_FORMAT_VERSION,
};
use crate::cli::ExtractArgs;
use crate::error::{CliError, Result};
use crate::imageio::decode_image;
use crate::manifest::{load_manifest, resolve_entry_path};

/// Fraction of failed images (in percent) above which extraction exits
/// nonzero.
const SKIP_LIMIT_PERCENT: u32 = 5;

pub fn cmd_extract(args: &ExtractArgs) -> Result<()> {
    let feature_set: FeatureSet = args.features.into();
    if args.describe_features {
        let names = match feature_set {
            FeatureSet::Dwd => dwd_slot_names(),
            FeatureSet::Lbp => lbp_slot_names(),
        };
        let mut out = String::new();
        for (i, n) in names.iter().enumerate() {
            out.push_str(&format!("{i}\t{n}\n"));
        }
        print!("{out}");
        return Ok(());
    }

    if feature_set == FeatureSet::Dwd && args.levels != DWD_LEVELS {
        return Err(CliError::BadInput {
            what: "--levels",
            message: format!("the dwd feature layout requires {DWD_LEVELS} levels"),
        });
    }
    if args.levels == 0 {
        return Err(CliError::BadInput {
            what: "--levels",
            message: "must be >= 1".into(),
        });
    }

    let manifest_path = args.manifest.as_ref().expect("clap requires --manifest");
    let out_path = args.out.as_ref().expect("clap requires --out");
    let manifest = load_manifest(manifest_path)?;

    let params = normalized_params(feature_set, args);
    let dwd_config = DwdConfig {
        gray_levels: params.gray_levels,
        offset: params.offset,
    };
    let tau = match params.tau {
        None => Tau::Auto,
        Some(v) => Tau::Fixed(v),
    };

    let extract_one = |id: &str, image: &ImageRgb| -> Result<CacheRow> {
        let values = match feature_set {
            FeatureSet::Dwd => extract_dwd_with(image, &dwd_config)?.values,
            FeatureSet::Lbp => extract_lbp_with_levels(image, tau, params.levels)?.values,
        };
        Ok(CacheRow {
            id: id.to_string(),
            label: None,
            values,
        })
    };

    let process_entry = |entry: &ManifestEntry| -> Result<Vec<CacheRow>> {
        let image = decode_image(&resolve_entry_path(manifest_path, &entry.path))?;
        let mut rows = Vec::new();
        if args.augment {
            let crops = augment_quadrant_crops(&image, args.include_original)?;
            for (i, crop) in crops.iter().enumerate() {
                let id = if i < 4 {
                    format!("{}#q{i}", entry.id)
                } else {
                    format!("{}#orig", entry.id)
                };
                rows.push(extract_one(&id, crop)?);
            }
        } else {
            rows.push(extract_one(&entry.id, &image)?);
        }
        for row in &mut rows {
            row.label = Some(entry.label);
        }
        Ok(rows)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::BadInput {
            what: "--jobs",
            message: e.to_string(),
        })?;
    // indexed map + ordered collect keeps the output independent of the
    // worker count
    let results: Vec<Result<Vec<CacheRow>>> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(process_entry)
            .collect()
    });

    let mut rows = Vec::new();
    let mut failed = 0usize;
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(r) => rows.extend(r),
            Err(e) => {
                failed += 1;
                log::warn!("skipping {}: {e}", entry.id);
                eprintln!("warning: skipping {}: {e}", entry.id);
            }
        }
    }

    let cache = FeatureCache {
        header: CacheHeader {
            format_version: CACHE_FORMAT_VERSION,
            feature_set,
            dimension: feature_set.dimension(),
            params,
            class_names: manifest.class_names.clone(),
        },
        rows,
    };
    save_cache(&cache, out_path)?;
    println!(
        "wrote {} rows of {} {} features to {}",
        cache.rows.len(),
        cache.header.dimension,
        feature_set.name(),
        out_path.display()
    );

    let total = manifest.entries.len();
    if failed * 100 > total * SKIP_LIMIT_PERCENT as usize {
        return Err(CliError::TooManySkipped {
            failed,
            total,
            limit_percent: SKIP_LIMIT_PERCENT,
        });
    }
    Ok(())
}

/// Pins parameters that a feature family does not consume to canonical
/// values, so cache headers compare meaningfully.
fn normalized_params(feature_set: FeatureSet, args: &ExtractArgs) -> ExtractionParams {
    match feature_set {
        FeatureSet::Dwd => ExtractionParams {
            tau: None,
            levels: DWD_LEVELS,
            gray_levels: args.gray_levels,
            offset: (args.offset.0, args.offset.1),
            augmented: args.augment,
            include_original: args.include_original,
        },
        FeatureSet::Lbp => ExtractionParams {
            tau: args.tau.0,
            levels: args.levels,
            gray_levels: 16,
            offset: (0, 1),
            augmented: args.augment,
            include_original: args.include_original,
        },
    }
}

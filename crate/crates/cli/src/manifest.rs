//! Manifest CSV loading and saving.
//!
//! A manifest is a CSV file with the header `id,path,label`. Class names
//! live in an optional sidecar file `<manifest>.classes` (one name per
//! line, line number = class index); without it, classes are named
//! `class<i>`. Relative image paths are resolved against the manifest's
//! directory.

use std::path::{Path, PathBuf};

use camid_core::dataset::{DatasetManifest, ManifestEntry};

use crate::error::{CliError, Result};

/// Loads a manifest and its class-name sidecar.
pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    {
        let headers = reader.headers().map_err(|e| csv_error(path, e))?;
        let expected = ["id", "path", "label"];
        if headers.iter().ne(expected) {
            return Err(CliError::BadInput {
                what: "manifest",
                message: format!(
                    "{}: header must be exactly `id,path,label`",
                    path.display()
                ),
            });
        }
    }
    let mut entries = Vec::new();
    let mut max_label = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        if record.len() != 3 {
            return Err(CliError::BadInput {
                what: "manifest",
                message: format!("{}: row with {} fields", path.display(), record.len()),
            });
        }
        let label: usize = record[2].trim().parse().map_err(|_| CliError::BadInput {
            what: "manifest",
            message: format!("{}: label `{}` is not an index", path.display(), &record[2]),
        })?;
        max_label = max_label.max(label);
        entries.push(ManifestEntry {
            id: record[0].to_string(),
            path: record[1].to_string(),
            label,
        });
    }

    let class_names = match std::fs::read_to_string(sidecar_path(path)) {
        Ok(text) => text.lines().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()).collect(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            (0..=max_label).map(|i| format!("class{i}")).collect()
        }
        Err(e) => return Err(CliError::io(format!("reading {}", sidecar_path(path).display()), e)),
    };

    let manifest = DatasetManifest {
        entries,
        class_names,
    };
    manifest.validate()?;
    Ok(manifest)
}

/// Writes a manifest and its class-name sidecar.
pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    writer
        .write_record(["id", "path", "label"])
        .map_err(|e| csv_error(path, e))?;
    for e in &manifest.entries {
        writer
            .write_record([e.id.as_str(), e.path.as_str(), &e.label.to_string()])
            .map_err(|err| csv_error(path, err))?;
    }
    writer.flush().map_err(|e| CliError::io("writing manifest", e))?;
    std::fs::write(
        sidecar_path(path),
        manifest.class_names.join("\n") + "\n",
    )
    .map_err(|e| CliError::io("writing class sidecar", e))?;
    Ok(())
}

/// `<manifest>.classes`
pub fn sidecar_path(manifest: &Path) -> PathBuf {
    let mut s = manifest.as_os_str().to_os_string();
    s.push(".classes");
    PathBuf::from(s)
}

/// Resolves an entry path against the manifest location.
pub fn resolve_entry_path(manifest_path: &Path, entry_path: &str) -> PathBuf {
    let p = Path::new(entry_path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(p)
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(format!("reading {}", path.display()), io),
        other => CliError::BadInput {
            what: "manifest",
            message: format!("{}: {other:?}", path.display()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let manifest = DatasetManifest {
            entries: vec![
                ManifestEntry {
                    id: "a".into(),
                    path: "img/a.png".into(),
                    label: 0,
                },
                ManifestEntry {
                    id: "b".into(),
                    path: "img/b.png".into(),
                    label: 1,
                },
            ],
            class_names: vec!["nikon".into(), "sony".into()],
        };
        save_manifest(&manifest, &path).unwrap();
        let back = load_manifest(&path).unwrap();
        assert_eq!(manifest, back);
    }

    #[test]
    fn missing_sidecar_gets_default_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        std::fs::write(&path, "id,path,label\nx,px.png,0\ny,py.png,2\nz,pz.png,1\n").unwrap();
        let m = load_manifest(&path).unwrap();
        assert_eq!(m.class_names, vec!["class0", "class1", "class2"]);
    }

    #[test]
    fn bad_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        std::fs::write(&path, "file,label\nx,0\n").unwrap();
        assert!(matches!(
            load_manifest(&path),
            Err(CliError::BadInput { .. })
        ));
    }

    #[test]
    fn relative_paths_resolve_against_manifest_dir() {
        let resolved = resolve_entry_path(Path::new("/data/set/manifest.csv"), "img/a.png");
        assert_eq!(resolved, PathBuf::from("/data/set/img/a.png"));
        let abs = resolve_entry_path(Path::new("/data/m.csv"), "/other/b.png");
        assert_eq!(abs, PathBuf::from("/other/b.png"));
    }
}

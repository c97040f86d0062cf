//! Content-addressed vector cache: one file per (provider label, text) pair,
//! written atomically via temp-file-then-rename so concurrent writers never
//! leave a torn entry.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::Vector;

pub(super) fn cache_path(cache_dir: &Path, provider_label: &str, text: &str) -> PathBuf {
    let mut hasher = Sha256::new();
    hasher.update(provider_label.as_bytes());
    hasher.update([0]);
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    cache_dir.join(provider_label).join(format!("{hex}.vec"))
}

/// Returns the cached vector if present and well formed. A corrupt or
/// truncated entry reads as a miss and will be overwritten.
pub(super) fn read(path: &Path) -> Option<Vector> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut parts = text.split_whitespace();
    let dim: usize = parts.next()?.parse().ok()?;
    let components: Vec<f64> = parts.map(str::parse).collect::<Result<_, _>>().ok()?;
    if components.len() != dim {
        return None;
    }
    let norm: f64 = components.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-6 {
        return None;
    }
    Some(Vector::from_normalized(components))
}

pub(super) fn write(path: &Path, vector: &Vector) -> std::io::Result<()> {
    let dir = path.parent().expect("cache path has a parent");
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    write!(tmp, "{}", vector.dim())?;
    for c in vector.components() {
        // `{}` prints the shortest representation that round-trips exactly.
        write!(tmp, " {c}")?;
    }
    writeln!(tmp)?;
    tmp.persist(path)?;
    Ok(())
}

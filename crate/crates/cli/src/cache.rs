//! Content-addressed on-disk cache of `E_k` expansions.
//!
//! Files are named `e{k}-{sha256}.json`, where the digest is taken over the
//! file bytes. An entry whose digest does not match its name, or whose
//! leading coefficients disagree with a fresh computation, is ignored. The
//! cache never changes results, only how long they take.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use hauptmodul::modforms::{eisenstein_memo_entries, seed_eisenstein};
use hauptmodul::qseries::QSeriesJson;
use hauptmodul::QSeries;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "HAUPTMODUL_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct Entry {
    k: u32,
    series: QSeriesJson,
}

pub struct EisensteinCache {
    dir: PathBuf,
    /// Weight to `(path, known_through)` of the best valid entry on disk.
    present: BTreeMap<u32, (PathBuf, i64)>,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_name(path: &Path) -> Option<(u32, String)> {
    let stem = path.file_name()?.to_str()?.strip_suffix(".json")?;
    let (k, hash) = stem.strip_prefix('e')?.split_once('-')?;
    Some((k.parse().ok()?, hash.to_string()))
}

fn read_entry(path: &Path, k: u32, hash: &str) -> Option<QSeries> {
    let bytes = fs::read(path).ok()?;
    if digest(&bytes) != hash {
        return None;
    }
    let entry: Entry = serde_json::from_slice(&bytes).ok()?;
    if entry.k != k {
        return None;
    }
    QSeries::from_json(&entry.series).ok()
}

impl EisensteinCache {
    pub fn from_env() -> Option<EisensteinCache> {
        let dir = std::env::var_os(CACHE_ENV)?;
        Some(EisensteinCache {
            dir: PathBuf::from(dir),
            present: BTreeMap::new(),
        })
    }

    /// Seeds the in-process memo from every valid entry; returns how many were used.
    pub fn load(&mut self) -> usize {
        let Ok(listing) = fs::read_dir(&self.dir) else {
            return 0;
        };
        let mut used = 0;
        for path in listing.flatten().map(|e| e.path()) {
            let Some((k, hash)) = parse_name(&path) else {
                continue;
            };
            let Some(series) = read_entry(&path, k, &hash) else {
                continue;
            };
            let kt = series.known_through();
            if seed_eisenstein(k, series).is_ok() {
                used += 1;
                if self.present.get(&k).is_none_or(|(_, best)| *best < kt) {
                    self.present.insert(k, (path, kt));
                }
            }
        }
        used
    }

    /// Writes memo entries that extend what is on disk and drops the
    /// entries they supersede.
    pub fn store(&mut self) -> io::Result<usize> {
        fs::create_dir_all(&self.dir)?;
        let mut written = 0;
        for (k, series) in eisenstein_memo_entries() {
            let kt = series.known_through();
            if self.present.get(&k).is_some_and(|(_, best)| *best >= kt) {
                continue;
            }
            let bytes = serde_json::to_vec(&Entry {
                k,
                series: series.to_json(),
            })
            .map_err(io::Error::other)?;
            let path = self.dir.join(format!("e{k}-{}.json", digest(&bytes)));
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, &bytes)?;
            fs::rename(&tmp, &path)?;
            if let Some((old, _)) = self.present.insert(k, (path, kt)) {
                let _ = fs::remove_file(old);
            }
            written += 1;
        }
        Ok(written)
    }
}

//! Catalog building from movie records, `catalog.csv` and the binary cache.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dnc_core::catalog::{dedupe_rows, tfidf_vectorize, Catalog};
use dnc_core::Mat64;
use sha2::{Digest, Sha256};

use crate::movies::{parse_movies_csv, MovieRecord};

const CACHE_MAGIC: &[u8; 8] = b"DNCCAT01";

/// A catalog together with its feature names.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedCatalog {
    pub vocabulary: Vec<String>,
    pub catalog: Catalog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    pub records: usize,
    pub vocabulary: usize,
    pub unique_rows: usize,
    pub from_cache: bool,
    pub source_sha256: String,
}

/// tf-idf over genre tokens, duplicate rows dropped, tier rewards by row order.
pub fn build_catalog(records: &[MovieRecord]) -> Result<NamedCatalog> {
    let docs: Vec<&[String]> = records.iter().map(|r| r.genres.as_slice()).collect();
    let docs: Vec<Vec<&str>> = docs
        .iter()
        .map(|g| g.iter().map(String::as_str).collect())
        .collect();
    let (vocabulary, m) = tfidf_vectorize(&docs)?;
    let catalog = Catalog::with_tier_rewards(dedupe_rows(&m))?;
    Ok(NamedCatalog {
        vocabulary,
        catalog,
    })
}

pub fn write_catalog_csv(path: &Path, named: &NamedCatalog) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut header = named.vocabulary.clone();
    header.push("reward".into());
    let mut wtr = csv::Writer::from_writer(&mut w);
    wtr.write_record(&header)?;
    let cat = &named.catalog;
    for (row, reward) in cat.features().iter_rows().zip(cat.rewards()) {
        let mut fields: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
        fields.push(format!("{}", reward.round() as i64));
        wtr.write_record(&fields)?;
    }
    wtr.flush()?;
    drop(wtr);
    w.flush()?;
    Ok(())
}

pub fn read_catalog_csv(path: &Path) -> Result<NamedCatalog> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    if header.last().map(String::as_str) != Some("reward") || header.len() < 2 {
        bail!("{}: last column must be `reward`", path.display());
    }
    let f = header.len() - 1;
    let mut data = Vec::new();
    let mut rewards = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != f + 1 {
            bail!(
                "{}:{line}: expected {} fields, found {}",
                path.display(),
                f + 1,
                rec.len()
            );
        }
        for v in rec.iter().take(f) {
            data.push(
                v.trim()
                    .parse::<f64>()
                    .with_context(|| format!("{}:{line}: bad feature {v:?}", path.display()))?,
            );
        }
        let r = &rec[f];
        rewards.push(
            r.trim()
                .parse::<i64>()
                .with_context(|| format!("{}:{line}: bad reward {r:?}", path.display()))?
                as f64,
        );
    }
    let features = Mat64::from_vec(rewards.len(), f, data)?;
    Ok(NamedCatalog {
        vocabulary: header[..f].to_vec(),
        catalog: Catalog::new(features, rewards)?,
    })
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Binary cache layout (little endian): magic, 32-byte source hash, row and
/// column counts as `u64`, vocabulary as length-prefixed UTF-8, features
/// row-major as `f64`, then rewards.
pub fn write_cache(path: &Path, source_sha256: &str, named: &NamedCatalog) -> Result<()> {
    let cat = &named.catalog;
    let mut buf = Vec::new();
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&hex::decode(source_sha256)?);
    buf.extend_from_slice(&(cat.len() as u64).to_le_bytes());
    buf.extend_from_slice(&(cat.n_features() as u64).to_le_bytes());
    for word in &named.vocabulary {
        buf.extend_from_slice(&(word.len() as u64).to_le_bytes());
        buf.extend_from_slice(word.as_bytes());
    }
    for v in cat.features().as_slice().iter().chain(cat.rewards()) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

/// Returns the cached catalog if the cache exists and was built from a
/// source with hash `source_sha256`.
pub fn read_cache(path: &Path, source_sha256: &str) -> Result<Option<NamedCatalog>> {
    let Ok(bytes) = fs::read(path) else {
        return Ok(None);
    };
    let mut cur = Cursor {
        bytes: &bytes,
        pos: 0,
    };
    if cur.take(8)? != CACHE_MAGIC || hex::encode(cur.take(32)?) != source_sha256 {
        return Ok(None);
    }
    let rows = cur.u64()? as usize;
    let cols = cur.u64()? as usize;
    let mut vocabulary = Vec::with_capacity(cols);
    for _ in 0..cols {
        let n = cur.u64()? as usize;
        vocabulary.push(String::from_utf8(cur.take(n)?.to_vec())?);
    }
    let mut floats = |n: usize| -> Result<Vec<f64>> {
        (0..n)
            .map(|_| Ok(f64::from_le_bytes(cur.take(8)?.try_into()?)))
            .collect()
    };
    let data = floats(rows * cols)?;
    let rewards = floats(rows)?;
    Ok(Some(NamedCatalog {
        vocabulary,
        catalog: Catalog::new(Mat64::from_vec(rows, cols, data)?, rewards)?,
    }))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            bail!("catalog cache is truncated");
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into()?))
    }
}

pub fn cache_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".cache");
    PathBuf::from(s)
}

/// `movies.csv` to `out` (CSV) plus `out.cache`. Reuses the cache when the
/// movies file is unchanged.
pub fn ingest(movies: &Path, out: &Path) -> Result<IngestReport> {
    let sha = sha256_file(movies)?;
    let cache = cache_path(out);
    if let Some(named) = read_cache(&cache, &sha)? {
        write_catalog_csv(out, &named)?;
        return Ok(IngestReport {
            records: 0,
            vocabulary: named.vocabulary.len(),
            unique_rows: named.catalog.len(),
            from_cache: true,
            source_sha256: sha,
        });
    }
    let records = parse_movies_csv(movies)?;
    let named = build_catalog(&records)?;
    write_catalog_csv(out, &named)?;
    write_cache(&cache, &sha, &named)?;
    Ok(IngestReport {
        records: records.len(),
        vocabulary: named.vocabulary.len(),
        unique_rows: named.catalog.len(),
        from_cache: false,
        source_sha256: sha,
    })
}

//! Recommender catalog construction: tf-idf item features, duplicate removal,
//! tiered item rewards, cosine similarity and the logistic pick probability.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, norm2, Mat64};
use crate::{Error, Result, Rng};

/// Default steepness of the pick probability.
pub const PICK_SCALE: f64 = 5.0;

/// Round to two decimals, half away from zero.
#[inline]
pub fn round2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

/// Item features with per-item rewards and an optional similarity table.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    features: Mat64,
    rewards: Vec<f64>,
    similarity: Option<Mat64>,
}

impl Catalog {
    pub fn new(features: Mat64, rewards: Vec<f64>) -> Result<Self> {
        if features.rows() == 0 || features.cols() == 0 {
            return Err(Error::EmptyCatalog);
        }
        Error::check_dim(features.rows(), rewards.len())?;
        if features.iter_rows().any(|r| r.iter().all(|v| *v == 0.0)) {
            return Err(Error::ZeroVector);
        }
        Ok(Catalog {
            features,
            rewards,
            similarity: None,
        })
    }

    /// Features with the default 60/30/10 reward tiers assigned by row order.
    pub fn with_tier_rewards(features: Mat64) -> Result<Self> {
        let rewards = tier_rewards(features.rows());
        Self::new(features, rewards)
    }

    /// Precomputes the full cosine-similarity table.
    pub fn precompute_similarity(mut self) -> Self {
        let n = self.features.rows();
        let norms: Vec<f64> = self.features.iter_rows().map(norm2).collect();
        let mut sim = Mat64::zeros(n, n);
        for i in 0..n {
            sim.set(i, i, 1.0);
            for j in i + 1..n {
                let s = dot(self.features.row(i), self.features.row(j)) / (norms[i] * norms[j]);
                sim.set(i, j, s);
                sim.set(j, i, s);
            }
        }
        self.similarity = Some(sim);
        self
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.features.rows() == 0
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Mat64 {
        &self.features
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn similarity_table(&self) -> Option<&Mat64> {
        self.similarity.as_ref()
    }

    /// Cosine similarity between items `i` and `j`.
    pub fn similarity(&self, i: usize, j: usize) -> f64 {
        match &self.similarity {
            Some(sim) => sim.get(i, j),
            None => cosine_similarity(self.features.row(i), self.features.row(j)).unwrap_or(0.0),
        }
    }
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    Error::check_dim(a.len(), b.len())?;
    let (na, nb) = (norm2(a), norm2(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Logistic pick probability `1 / (1 + exp(-5 s))`.
pub fn pick_probability(s: f64) -> f64 {
    pick_probability_scaled(s, PICK_SCALE)
}

pub fn pick_probability_scaled(s: f64, scale: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-scale * s))
}

/// Rewards 1, 10 and 30 for the first 60%, next 30% and last 10% of `n` items.
/// The two upper tiers are rounded down; the remainder goes to the lowest tier.
pub fn tier_rewards(n: usize) -> Vec<f64> {
    let top = n / 10;
    let mid = n * 3 / 10;
    let low = n - top - mid;
    let mut out = Vec::with_capacity(n);
    out.extend(core::iter::repeat_n(1.0, low));
    out.extend(core::iter::repeat_n(10.0, mid));
    out.extend(core::iter::repeat_n(30.0, top));
    out
}

/// tf-idf vectors over the sorted token vocabulary.
///
/// `tf` is the token count within a document, `idf = ln((1+D)/(1+df)) + 1`;
/// rows are L2-normalized and then rounded to two decimals.
pub fn tfidf_vectorize<S: AsRef<str>>(docs: &[Vec<S>]) -> Result<(Vec<String>, Mat64)> {
    let vocab: BTreeSet<&str> = docs
        .iter()
        .flat_map(|d| d.iter().map(AsRef::as_ref))
        .collect();
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let column: BTreeMap<&str, usize> = vocab.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let f = vocab.len();
    let n_docs = docs.len() as f64;

    let mut doc_freq = vec![0usize; f];
    for doc in docs {
        let distinct: BTreeSet<usize> = doc.iter().map(|t| column[t.as_ref()]).collect();
        for c in distinct {
            doc_freq[c] += 1;
        }
    }
    let idf: Vec<f64> = doc_freq
        .iter()
        .map(|&df| libm::log((1.0 + n_docs) / (1.0 + df as f64)) + 1.0)
        .collect();

    let mut m = Mat64::zeros(docs.len(), f);
    for (r, doc) in docs.iter().enumerate() {
        let row = m.row_mut(r);
        for t in doc {
            row[column[t.as_ref()]] += 1.0;
        }
        for (v, w) in row.iter_mut().zip(&idf) {
            *v *= w;
        }
        let norm = norm2(row);
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v = round2(*v / norm));
        }
    }
    Ok((vocab.into_iter().map(ToString::to_string).collect(), m))
}

/// Drops repeated rows, keeping first occurrences in their original order.
pub fn dedupe_rows(m: &Mat64) -> Mat64 {
    let mut seen = BTreeSet::new();
    let mut data = Vec::new();
    let mut rows = 0;
    for row in m.iter_rows() {
        let key: Vec<u64> = row.iter().map(|v| (v + 0.0).to_bits()).collect();
        if seen.insert(key) {
            data.extend_from_slice(row);
            rows += 1;
        }
    }
    Mat64::from_vec(rows, m.cols(), data).expect("row count and width are consistent")
}

/// Deterministic pseudo-random catalog of at most `b` unique items with `f`
/// non-negative, unit-norm, two-decimal features each.
pub fn synthetic_catalog(seed: u64, b: usize, f: usize) -> Result<Catalog> {
    if b == 0 || f == 0 {
        return Err(Error::invalid("synthetic catalog needs b >= 1 and f >= 1"));
    }
    let mut rng = Rng::new(seed);
    let mut m = Mat64::zeros(b, f);
    for r in 0..b {
        let active = 1 + rng.index(f.min(4));
        let row = m.row_mut(r);
        for _ in 0..active {
            row[rng.index(f)] += 0.2 + rng.uniform();
        }
        let norm = norm2(row);
        row.iter_mut().for_each(|v| *v = round2(*v / norm));
    }
    Catalog::with_tier_rewards(dedupe_rows(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_hand_values() {
        assert!(
            (cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap()
                - core::f64::consts::FRAC_1_SQRT_2)
                .abs()
                < 1e-12
        );
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine_similarity(&[0.3, 0.4], &[0.3, 0.4]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn pick_probability_values() {
        assert_eq!(pick_probability(0.0), 0.5);
        assert!((pick_probability(1.0) - 0.993_307_149_075_715).abs() < 1e-12);
        assert!(pick_probability(0.2) < pick_probability(0.3));
    }

    #[test]
    fn tiers() {
        let r = tier_rewards(10);
        assert_eq!(
            r,
            vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0, 10.0, 10.0, 30.0]
        );
        let r = tier_rewards(7);
        // 0 top, 2 mid, 5 low
        assert_eq!(r.iter().filter(|v| **v == 1.0).count(), 5);
        assert_eq!(r.iter().filter(|v| **v == 10.0).count(), 2);
    }

    #[test]
    fn tfidf_cases() {
        let (vocab, m) = tfidf_vectorize(&[vec!["Drama"]]).unwrap();
        assert_eq!(vocab, vec!["Drama"]);
        assert_eq!(m.row(0), &[1.0]);

        let docs = vec![vec!["A", "B"], vec!["A", "B"], vec!["A", "C"]];
        let (vocab, m) = tfidf_vectorize(&docs).unwrap();
        assert_eq!(vocab, vec!["A", "B", "C"]);
        assert_eq!(m.row(0), m.row(1));
        // "A" occurs everywhere and carries the smallest idf.
        assert!(m.get(2, 0) < m.get(2, 2));

        let empty: Vec<Vec<&str>> = vec![vec![]];
        assert_eq!(tfidf_vectorize(&empty), Err(Error::EmptyVocabulary));
    }

    #[test]
    fn dedupe_keeps_first_occurrences() {
        let m = Mat64::from_rows(&[
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.5, 0.5],
        ])
        .unwrap();
        let d = dedupe_rows(&m);
        assert_eq!(d.rows(), 3);
        assert_eq!(d.row(2), &[0.5, 0.5]);
        let same = Mat64::from_rows(&[vec![0.2; 3], vec![0.2; 3], vec![0.2; 3]]).unwrap();
        assert_eq!(dedupe_rows(&same).rows(), 1);
        let unique = Mat64::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(dedupe_rows(&unique), unique);
    }

    #[test]
    fn synthetic_is_deterministic_and_valid() {
        let a = synthetic_catalog(3, 100, 23).unwrap();
        let b = synthetic_catalog(3, 100, 23).unwrap();
        assert_eq!(a, b);
        assert!(a.len() <= 100);
        assert_eq!(dedupe_rows(a.features()).rows(), a.len());
        assert!(a
            .features()
            .as_slice()
            .iter()
            .all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(a.rewards(), tier_rewards(a.len()).as_slice());
    }

    #[test]
    fn similarity_table_symmetric_unit_diagonal() {
        let c = synthetic_catalog(1, 40, 6).unwrap().precompute_similarity();
        let s = c.similarity_table().unwrap();
        for i in 0..c.len() {
            assert_eq!(s.get(i, i), 1.0);
            for j in 0..c.len() {
                assert_eq!(s.get(i, j), s.get(j, i));
            }
        }
    }
}

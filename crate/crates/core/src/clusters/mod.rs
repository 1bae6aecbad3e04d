//! Word clusters from embeddings via normalized spectral clustering, and
//! per-document cluster distributions.

pub mod linalg;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::textproc::Token;
pub use linalg::{dominant_subspace, jacobi_eigen, Subspace, SymMatrix};

/// Word vectors of a fixed dimensionality.
#[derive(Clone, Debug)]
pub struct EmbeddingTable<T> {
    dim: usize,
    words: Vec<String>,
    vectors: Vec<Vec<T>>,
    index: HashMap<String, usize>,
}

impl<T: Scalar> EmbeddingTable<T> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            words: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn insert(&mut self, word: &str, vector: Vec<T>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Data(format!(
                "vector for {word:?} has length {}, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if self.index.contains_key(word) {
            return Err(Error::Data(format!("duplicate embedding for {word:?}")));
        }
        self.index.insert(word.to_string(), self.words.len());
        self.words.push(word.to_string());
        self.vectors.push(vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.index.get(word).map(|&i| self.vectors[i].as_slice())
    }

    /// Parses `word v1 … vd` lines. A leading word2vec `count dim` header
    /// line is skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table: Option<Self> = None;
        for (i, line) in text.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if i == 0 && fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
                continue;
            }
            if fields.len() < 2 {
                return Err(Error::Format {
                    line: i + 1,
                    message: "expected a word followed by vector components".into(),
                });
            }
            let vector = fields[1..]
                .iter()
                .map(|f| {
                    f.parse::<T>().map_err(|_| Error::Format {
                        line: i + 1,
                        message: format!("bad vector component {f:?}"),
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            let t = table.get_or_insert_with(|| Self::new(vector.len()));
            t.insert(fields[0], vector).map_err(|e| Error::Format {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        table.ok_or_else(|| Error::Format {
            line: 0,
            message: "embedding file holds no vectors".into(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// Assignment of words to one of `k` clusters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterMap {
    k: usize,
    assignment: BTreeMap<String, usize>,
}

impl ClusterMap {
    pub fn new(k: usize, assignment: BTreeMap<String, usize>) -> Result<Self> {
        if let Some((w, &c)) = assignment.iter().find(|(_, &c)| c >= k) {
            return Err(Error::Data(format!("word {w:?} assigned to cluster {c}, but k = {k}")));
        }
        Ok(ClusterMap { k, assignment })
    }

    pub fn from_labels(words: &[String], labels: &[usize], k: usize) -> Result<Self> {
        if words.len() != labels.len() {
            return Err(Error::Contract("word and label counts differ".into()));
        }
        let mut map = BTreeMap::new();
        for (w, &c) in words.iter().zip(labels) {
            if map.insert(w.clone(), c).is_some() {
                return Err(Error::Data(format!("word {w:?} listed twice")));
            }
        }
        Self::new(k, map)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn cluster_of(&self, word: &str) -> Option<usize> {
        self.assignment.get(word).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.assignment.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Words of cluster `c`, alphabetical.
    pub fn members(&self, c: usize) -> Vec<&str> {
        self.iter().filter(|&(_, x)| x == c).map(|(w, _)| w).collect()
    }

    /// `word<TAB>cluster_id` lines. `k` defaults to the largest id plus one.
    pub fn parse(text: &str, k: Option<usize>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::Format { line: i + 1, message };
            let (w, c) = line
                .split_once('\t')
                .ok_or_else(|| err("expected word<TAB>cluster_id".into()))?;
            let c: usize = c.trim().parse().map_err(|_| err(format!("bad cluster id {c:?}")))?;
            if map.insert(w.to_lowercase(), c).is_some() {
                return Err(err(format!("word {w:?} listed twice")));
            }
        }
        let k = k.unwrap_or_else(|| map.values().max().map_or(0, |&m| m + 1));
        Self::new(k, map)
    }

    pub fn load(path: impl AsRef<Path>, k: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, k)
    }

    pub fn to_text(&self) -> String {
        self.iter().map(|(w, c)| format!("{w}\t{c}\n")).collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Word-word affinity matrix with its row order.
#[derive(Clone, Debug)]
pub struct SimilarityGraph<T> {
    pub words: Vec<String>,
    pub matrix: SymMatrix<T>,
}

/// Cosine similarities clipped at zero, unit diagonal.
pub fn similarity_graph<T: Scalar>(emb: &EmbeddingTable<T>, vocab: &[String]) -> Result<SimilarityGraph<T>> {
    let mut unit = Vec::with_capacity(vocab.len());
    for w in vocab {
        let v = emb
            .get(w)
            .ok_or_else(|| Error::Data(format!("word {w:?} has no embedding")))?;
        let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm == T::zero() || !norm.is_finite() {
            return Err(Error::Undefined(format!("cosine undefined for zero vector of {w:?}")));
        }
        unit.push(v.iter().map(|&x| x / norm).collect::<Vec<T>>());
    }
    let n = vocab.len();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        T::one()
                    } else {
                        let c: T = unit[i].iter().zip(&unit[j]).map(|(&a, &b)| a * b).sum();
                        c.max(T::zero()).min(T::one())
                    }
                })
                .collect()
        })
        .collect();
    // symmetrize exactly: floating sums in the two orders may differ in the last bit
    let matrix = SymMatrix::from_fn(n, |i, j| if i <= j { rows[i][j] } else { rows[j][i] });
    Ok(SimilarityGraph {
        words: vocab.to_vec(),
        matrix,
    })
}

fn check_affinity<T: Scalar>(a: &SymMatrix<T>) -> Result<()> {
    let n = a.size();
    for i in 0..n {
        for j in 0..n {
            let x = a.get(i, j);
            if !x.is_finite() || x < T::zero() {
                return Err(Error::Data(format!("affinity ({i},{j}) = {x} is not a nonnegative number")));
            }
        }
    }
    if !a.is_symmetric(T::lit(1e-9).max(T::epsilon() * T::lit(16.0))) {
        return Err(Error::Data("affinity matrix is not symmetric".into()));
    }
    Ok(())
}

/// Zero-degree nodes receive a self-loop of weight 1.
fn with_self_loops<T: Scalar>(a: &SymMatrix<T>) -> (SymMatrix<T>, Vec<T>) {
    let mut a = a.clone();
    let n = a.size();
    let mut degree = Vec::with_capacity(n);
    for i in 0..n {
        let mut d: T = a.row(i).iter().copied().sum();
        if d == T::zero() {
            a.set(i, i, T::one());
            d = T::one();
        }
        degree.push(d);
    }
    (a, degree)
}

/// `L = I − D^(−1/2) A D^(−1/2)`.
pub fn normalized_laplacian<T: Scalar>(a: &SymMatrix<T>) -> SymMatrix<T> {
    let (a, d) = with_self_loops(a);
    let s: Vec<T> = d.iter().map(|&x| T::one() / x.sqrt()).collect();
    SymMatrix::from_fn(a.size(), |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        id - s[i] * a.get(i, j) * s[j]
    })
}

/// Eigen-solver settings.
pub const EIGEN_TOL: f64 = 1e-9;
pub const EIGEN_MAX_ITER: usize = 10_000;
pub const KMEANS_MAX_ITER: usize = 300;
pub const KMEANS_RESTARTS: usize = 4;

/// Cluster labels in `[0, k)` for each row of `a`, numbered by first
/// appearance.
pub fn spectral_labels<T: Scalar>(a: &SymMatrix<T>, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = a.size();
    if k == 0 {
        return Err(Error::Config("cluster count must be positive".into()));
    }
    if k > n {
        return Err(Error::Config(format!("cluster count {k} exceeds the {n} words available")));
    }
    check_affinity(a)?;
    if k == 1 {
        return Ok(vec![0; n]);
    }
    // top-k of M + I (eigenvalues in [0, 2]) = bottom-k of L
    let lap = normalized_laplacian(a);
    let shifted = SymMatrix::from_fn(n, |i, j| {
        let id = if i == j { T::lit(2.0) } else { T::zero() };
        id - lap.get(i, j)
    });
    let tol = T::lit(EIGEN_TOL).max(T::epsilon() * T::lit(64.0));
    let sub = dominant_subspace(&shifted, k, seed, tol, EIGEN_MAX_ITER);
    let mut rows: Vec<Vec<f64>> = (0..n).map(|i| sub.vectors.iter().map(|v| v[i].as_f64()).collect()).collect();
    for r in rows.iter_mut() {
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            r.iter_mut().for_each(|x| *x /= norm);
        }
    }
    let labels = kmeans(&rows, k, seed, KMEANS_MAX_ITER, KMEANS_RESTARTS);
    Ok(canonical_labels(&labels))
}

/// Spectral clustering of a similarity graph into a [`ClusterMap`].
pub fn spectral_cluster<T: Scalar>(graph: &SimilarityGraph<T>, k: usize, seed: u64) -> Result<ClusterMap> {
    let labels = spectral_labels(&graph.matrix, k, seed)?;
    ClusterMap::from_labels(&graph.words, &labels, k)
}

fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut remap = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = remap.len();
            *remap.entry(l).or_insert(next)
        })
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Seeded k-means++ with Lloyd refinement; the lowest-inertia restart wins.
/// Distance ties go to the lowest center index.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize, restarts: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let (inertia, labels) = kmeans_once(points, k, &mut rng, max_iter);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b - 1e-12) {
            best = Some((inertia, labels));
        }
    }
    best.map(|(_, l)| l).unwrap_or_default()
}

fn kmeans_once(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng, max_iter: usize) -> (f64, Vec<usize>) {
    let n = points.len();
    let dim = points.first().map_or(0, Vec::len);
    let mut centers: Vec<Vec<f64>> = vec![points[rng.gen_range(0..n)].clone()];
    while centers.len() < k {
        let d: Vec<f64> = points.iter().map(|p| nearest(p, &centers).1).collect();
        let total: f64 = d.iter().sum();
        let pick = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut r = rng.gen::<f64>() * total;
            let mut idx = n - 1;
            for (i, &w) in d.iter().enumerate() {
                if r < w {
                    idx = i;
                    break;
                }
                r -= w;
            }
            idx
        };
        centers.push(points[pick].clone());
    }
    let mut labels = vec![usize::MAX; n];
    for _ in 0..max_iter {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, _) = nearest(p, &centers);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        // refill empty clusters with the point farthest from its center
        for c in 0..k {
            if labels.contains(&c) {
                continue;
            }
            let far = (0..n)
                .filter(|&i| labels.iter().filter(|&&l| l == labels[i]).count() > 1)
                .max_by(|&i, &j| {
                    sq_dist(&points[i], &centers[labels[i]])
                        .total_cmp(&sq_dist(&points[j], &centers[labels[j]]))
                        .then(j.cmp(&i))
                });
            if let Some(i) = far {
                labels[i] = c;
                centers[c] = points[i].clone();
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum();
    (inertia, labels)
}

/// Fraction of the mapped tokens that fall in each cluster; tokens missing
/// from the map are ignored.
pub fn cluster_features(tokens: &[Token], cm: &ClusterMap) -> Vec<f64> {
    let mut counts = vec![0usize; cm.k()];
    let mut found = 0usize;
    for t in tokens {
        if let Some(c) = cm.cluster_of(&t.lower) {
            counts[c] += 1;
            found += 1;
        }
    }
    if found == 0 {
        return vec![0.0; cm.k()];
    }
    counts.iter().map(|&c| c as f64 / found as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textproc::tokenize;

    fn two_cliques() -> SymMatrix<f64> {
        SymMatrix::from_fn(6, |i, j| if (i < 3) == (j < 3) { 1.0 } else { 0.0 })
    }

    #[test]
    fn disconnected_cliques_split() {
        let labels = spectral_labels(&two_cliques(), 2, 3).unwrap();
        assert_eq!(labels, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn single_cluster_and_bounds() {
        assert_eq!(spectral_labels(&two_cliques(), 1, 0).unwrap(), vec![0; 6]);
        assert!(matches!(spectral_labels(&two_cliques(), 7, 0), Err(Error::Config(_))));
    }

    #[test]
    fn isolated_node_gets_self_loop() {
        let a = SymMatrix::from_fn(4, |i, j| if i < 3 && j < 3 { 1.0 } else { 0.0 });
        let labels = spectral_labels(&a, 2, 1).unwrap();
        assert_eq!(labels, vec![0, 0, 0, 1]);
    }

    #[test]
    fn hand_cosine() {
        let mut emb = EmbeddingTable::<f64>::new(2);
        emb.insert("a", vec![1.0, 0.0]).unwrap();
        emb.insert("b", vec![1.0, 1.0]).unwrap();
        emb.insert("c", vec![0.0, 3.0]).unwrap();
        emb.insert("d", vec![-1.0, 0.0]).unwrap();
        let vocab: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let g = similarity_graph(&emb, &vocab).unwrap();
        assert!((g.matrix.get(0, 1) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(g.matrix.get(0, 2), 0.0);
        assert_eq!(g.matrix.get(0, 3), 0.0);
        assert_eq!(g.matrix.get(2, 2), 1.0);
        emb.insert("z", vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            similarity_graph(&emb, &["z".to_string()]),
            Err(Error::Undefined(_))
        ));
        assert!(matches!(similarity_graph(&emb, &["q".to_string()]), Err(Error::Data(_))));
    }

    #[test]
    fn embedding_parse_skips_header() {
        let t = EmbeddingTable::<f32>::parse("2 3\ncat 1 0 0\ndog 0 1 0.5\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("dog").unwrap(), &[0.0, 1.0, 0.5]);
        assert!(EmbeddingTable::<f64>::parse("a 1 2\nb 1\n").is_err());
        assert!(EmbeddingTable::<f64>::parse("a 1 2\na 1 3\n").is_err());
    }

    #[test]
    fn cluster_map_round_trip() {
        let cm = ClusterMap::parse("order\t7\nstore\t7\nlate\t2\n", Some(10)).unwrap();
        assert_eq!(ClusterMap::parse(&cm.to_text(), Some(10)).unwrap(), cm);
        assert_eq!(ClusterMap::parse("a\t3\n", None).unwrap().k(), 4);
        assert!(ClusterMap::parse("a\t3\n", Some(2)).is_err());
        assert!(ClusterMap::parse("a\t1\na\t0\n", None).is_err());
    }

    #[test]
    fn cluster_distribution() {
        let cm = ClusterMap::parse("order\t7\nstore\t7\nlate\t2\nagain\t3\n", Some(10)).unwrap();
        let f = cluster_features(&tokenize("Order from the store"), &cm);
        assert_eq!(f[7], 1.0);
        assert_eq!(f.iter().sum::<f64>(), 1.0);
        let f = cluster_features(&tokenize("late late late again"), &cm);
        assert_eq!((f[2], f[3]), (0.75, 0.25));
        assert!(cluster_features(&tokenize("nothing here"), &cm).iter().all(|&x| x == 0.0));
    }
}

//! Mean-embedding MLP: embed → mean → dense+ReLU → dropout → sigmoid output.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{sigmoid, softplus, Scalar};
use crate::util::fingerprint;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MlpConfig {
    pub embed_dim: usize,
    pub hidden: usize,
    pub dropout: f64,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// minimum document frequency for a word to get an embedding
    pub min_df: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            embed_dim: 200,
            hidden: 100,
            dropout: 0.2,
            lr: 0.01,
            epochs: 30,
            batch_size: 32,
            min_df: 2,
            seed: 0,
        }
    }
}

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Trainable parameters; `w1` is row-major `hidden × embed_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct MlpParams<T> {
    pub emb: Vec<T>,
    pub w1: Vec<T>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: T,
}

impl<T: Scalar> MlpParams<T> {
    fn zeros_like(other: &Self) -> Self {
        MlpParams {
            emb: vec![T::zero(); other.emb.len()],
            w1: vec![T::zero(); other.w1.len()],
            b1: vec![T::zero(); other.b1.len()],
            w2: vec![T::zero(); other.w2.len()],
            b2: T::zero(),
        }
    }

    fn fill_zero(&mut self) {
        for g in [&mut self.emb, &mut self.w1, &mut self.b1, &mut self.w2] {
            g.iter_mut().for_each(|x| *x = T::zero());
        }
        self.b2 = T::zero();
    }

    /// Named parameter groups, flattened.
    pub fn groups(&self) -> Vec<(&'static str, Vec<T>)> {
        vec![
            ("emb", self.emb.clone()),
            ("w1", self.w1.clone()),
            ("b1", self.b1.clone()),
            ("w2", self.w2.clone()),
            ("b2", vec![self.b2]),
        ]
    }

    /// Mutable access to one scalar by group name and offset.
    pub fn get_mut(&mut self, group: &str, i: usize) -> &mut T {
        match group {
            "emb" => &mut self.emb[i],
            "w1" => &mut self.w1[i],
            "b1" => &mut self.b1[i],
            "w2" => &mut self.w2[i],
            "b2" => &mut self.b2,
            other => panic!("unknown parameter group {other}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MlpModel<T> {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    pub embed_dim: usize,
    pub hidden: usize,
    pub dropout: T,
    pub params: MlpParams<T>,
    pub schema: String,
}

struct Forward<T> {
    h0: Vec<T>,
    a1: Vec<T>,
    /// post-ReLU, post-dropout
    r: Vec<T>,
    z: T,
}

impl<T: Scalar> MlpModel<T> {
    /// Seeded uniform initialization: dense layers in ±1/√fan_in, embeddings
    /// in ±1/√embed_dim.
    pub fn init(vocab: Vec<String>, cfg: &MlpConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut uniform = |n: usize, bound: f64| -> Vec<T> { (0..n).map(|_| T::lit(rng.gen_range(-bound..=bound))).collect() };
        let (e, d) = (cfg.embed_dim, cfg.hidden);
        let be = 1.0 / (e as f64).sqrt();
        let bd = 1.0 / (d as f64).sqrt();
        let emb = uniform(vocab.len() * e, be);
        let w1 = uniform(d * e, be);
        let b1 = uniform(d, be);
        let w2 = uniform(d, bd);
        let b2 = uniform(1, bd)[0];
        Self::from_parts(vocab, e, d, T::lit(cfg.dropout), MlpParams { emb, w1, b1, w2, b2 })
    }

    pub(crate) fn from_parts(vocab: Vec<String>, embed_dim: usize, hidden: usize, dropout: T, params: MlpParams<T>) -> Self {
        let index = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let schema = format!("mlp-{}", fingerprint(vocab.join("\n").as_bytes()));
        MlpModel {
            vocab,
            index,
            embed_dim,
            hidden,
            dropout,
            params,
            schema,
        }
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    /// Vocabulary ids of the known words of a document.
    pub fn encode<S: AsRef<str>>(&self, words: &[S]) -> Vec<usize> {
        words.iter().filter_map(|w| self.index.get(w.as_ref()).copied()).collect()
    }

    fn forward(&self, ids: &[usize], mask: Option<&[T]>) -> Forward<T> {
        let (e, d) = (self.embed_dim, self.hidden);
        let p = &self.params;
        // no known word: zero mean embedding
        let mut h0 = vec![T::zero(); e];
        if !ids.is_empty() {
            for &id in ids {
                for (h, &x) in h0.iter_mut().zip(&p.emb[id * e..(id + 1) * e]) {
                    *h += x;
                }
            }
            let n = T::of_usize(ids.len());
            h0.iter_mut().for_each(|h| *h /= n);
        }
        let a1: Vec<T> = (0..d)
            .map(|k| p.b1[k] + p.w1[k * e..(k + 1) * e].iter().zip(&h0).map(|(&w, &x)| w * x).sum::<T>())
            .collect();
        let r: Vec<T> = a1
            .iter()
            .enumerate()
            .map(|(k, &a)| a.max(T::zero()) * mask.map_or(T::one(), |m| m[k]))
            .collect();
        let z = p.b2 + p.w2.iter().zip(&r).map(|(&w, &x)| w * x).sum::<T>();
        Forward { h0, a1, r, z }
    }

    pub fn predict_ids(&self, ids: &[usize]) -> T {
        sigmoid(self.forward(ids, None).z)
    }

    pub fn predict_proba<S: AsRef<str>>(&self, words: &[S]) -> T {
        self.predict_ids(&self.encode(words))
    }

    /// Mean binary cross-entropy over `batch` and its gradient. `masks` holds
    /// one inverted-dropout mask per example; `None` disables dropout.
    pub fn loss_and_grad(&self, batch: &[(Vec<usize>, u8)], masks: Option<&[Vec<T>]>) -> (T, MlpParams<T>) {
        let mut grad = MlpParams::zeros_like(&self.params);
        let loss = self.accumulate(batch, masks, &mut grad);
        (loss, grad)
    }

    fn accumulate(&self, batch: &[(Vec<usize>, u8)], masks: Option<&[Vec<T>]>, grad: &mut MlpParams<T>) -> T {
        let (e, d) = (self.embed_dim, self.hidden);
        let nb = T::of_usize(batch.len());
        let p = &self.params;
        let mut loss = T::zero();
        for (b, (ids, y)) in batch.iter().enumerate() {
            let mask = masks.map(|m| m[b].as_slice());
            let f = self.forward(ids, mask);
            let yt = if *y == 1 { T::one() } else { T::zero() };
            loss += softplus(f.z) - yt * f.z;
            let dz = (sigmoid(f.z) - yt) / nb;
            grad.b2 += dz;
            let mut dh0 = vec![T::zero(); e];
            for k in 0..d {
                grad.w2[k] += dz * f.r[k];
                if f.a1[k] <= T::zero() {
                    continue;
                }
                let da = dz * p.w2[k] * mask.map_or(T::one(), |m| m[k]);
                if da == T::zero() {
                    continue;
                }
                grad.b1[k] += da;
                let row = &p.w1[k * e..(k + 1) * e];
                for j in 0..e {
                    grad.w1[k * e + j] += da * f.h0[j];
                    dh0[j] += da * row[j];
                }
            }
            if !ids.is_empty() {
                let n = T::of_usize(ids.len());
                for &id in ids {
                    for (g, &x) in grad.emb[id * e..(id + 1) * e].iter_mut().zip(&dh0) {
                        *g += x / n;
                    }
                }
            }
        }
        loss / nb
    }

    fn dropout_mask(&self, rng: &mut ChaCha8Rng) -> Vec<T> {
        let keep = T::one() - self.dropout;
        let scale = T::one() / keep;
        let p_drop = self.dropout.as_f64();
        (0..self.hidden)
            .map(|_| if rng.gen::<f64>() < p_drop { T::zero() } else { scale })
            .collect()
    }
}

struct Adam<T> {
    m: MlpParams<T>,
    v: MlpParams<T>,
    t: i32,
    lr: T,
}

impl<T: Scalar> Adam<T> {
    fn new(p: &MlpParams<T>, lr: f64) -> Self {
        Adam {
            m: MlpParams::zeros_like(p),
            v: MlpParams::zeros_like(p),
            t: 0,
            lr: T::lit(lr),
        }
    }

    fn step(&mut self, p: &mut MlpParams<T>, g: &MlpParams<T>) {
        self.t += 1;
        let (b1, b2, eps) = (T::lit(ADAM_BETA1), T::lit(ADAM_BETA2), T::lit(ADAM_EPS));
        let c1 = T::one() - b1.powi(self.t);
        let c2 = T::one() - b2.powi(self.t);
        let lr = self.lr;
        let update = |x: &mut T, g: T, m: &mut T, v: &mut T| {
            *m = b1 * *m + (T::one() - b1) * g;
            *v = b2 * *v + (T::one() - b2) * g * g;
            *x -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        };
        let groups = [
            (&mut p.emb, &g.emb, &mut self.m.emb, &mut self.v.emb),
            (&mut p.w1, &g.w1, &mut self.m.w1, &mut self.v.w1),
            (&mut p.b1, &g.b1, &mut self.m.b1, &mut self.v.b1),
            (&mut p.w2, &g.w2, &mut self.m.w2, &mut self.v.w2),
        ];
        for (x, g, m, v) in groups {
            for i in 0..x.len() {
                update(&mut x[i], g[i], &mut m[i], &mut v[i]);
            }
        }
        update(&mut p.b2, g.b2, &mut self.m.b2, &mut self.v.b2);
    }
}

/// Vocabulary of words present in at least `min_df` documents, sorted.
pub fn mlp_vocab<S: AsRef<str>>(docs: &[Vec<S>], min_df: usize) -> Vec<String> {
    let mut df: HashMap<&str, usize> = HashMap::new();
    for d in docs {
        let distinct: HashSet<&str> = d.iter().map(AsRef::as_ref).collect();
        for w in distinct {
            *df.entry(w).or_insert(0) += 1;
        }
    }
    let mut v: Vec<String> = df
        .into_iter()
        .filter(|&(_, c)| c >= min_df)
        .map(|(w, _)| w.to_string())
        .collect();
    v.sort();
    v
}

/// Trains on lowercased word sequences with Adam on mini-batches.
pub fn train_mlp<T: Scalar, S: AsRef<str>>(docs: &[Vec<S>], y: &[u8], cfg: &MlpConfig) -> Result<MlpModel<T>> {
    if docs.len() != y.len() {
        return Err(Error::Contract(format!("{} documents but {} labels", docs.len(), y.len())));
    }
    if docs.is_empty() || y.iter().all(|&l| l == y[0]) {
        return Err(Error::Data("MLP training needs both classes".into()));
    }
    if !(0.0..1.0).contains(&cfg.dropout) || cfg.embed_dim == 0 || cfg.hidden == 0 || cfg.batch_size == 0 {
        return Err(Error::Config(format!("invalid MLP configuration {cfg:?}")));
    }
    let mut model = MlpModel::<T>::init(mlp_vocab(docs, cfg.min_df), cfg);
    let data: Vec<(Vec<usize>, u8)> = docs.iter().zip(y).map(|(d, &l)| (model.encode(d), l)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut adam = Adam::new(&model.params, cfg.lr);
    let mut grad = MlpParams::zeros_like(&model.params);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(Vec<usize>, u8)> = chunk.iter().map(|&i| data[i].clone()).collect();
            let masks: Vec<Vec<T>> = batch.iter().map(|_| model.dropout_mask(&mut rng)).collect();
            grad.fill_zero();
            model.accumulate(&batch, Some(&masks), &mut grad);
            adam.step(&mut model.params, &grad);
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MlpConfig {
        MlpConfig {
            embed_dim: 4,
            hidden: 3,
            epochs: 200,
            batch_size: 2,
            min_df: 1,
            ..Default::default()
        }
    }

    #[test]
    fn memorizes_one_example() {
        let docs = vec![vec!["late", "again"], vec!["thanks"]];
        let m: MlpModel<f64> = train_mlp(&docs, &[1, 0], &MlpConfig { dropout: 0.0, epochs: 500, ..tiny() }).unwrap();
        let batch: Vec<_> = docs.iter().zip([1u8, 0]).map(|(d, l)| (m.encode(d), l)).collect();
        let (loss, _) = m.loss_and_grad(&batch[..1], None);
        assert!(loss < 1e-3, "{loss}");
    }

    #[test]
    fn seeded_training_is_deterministic() {
        let docs = vec![vec!["a", "b"], vec!["b", "c"], vec!["a"], vec!["c"]];
        let y = [1, 0, 1, 0];
        let a: MlpModel<f32> = train_mlp(&docs, &y, &tiny()).unwrap();
        let b: MlpModel<f32> = train_mlp(&docs, &y, &tiny()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_document_is_zero_embedding() {
        let m = MlpModel::<f64>::init(vec!["a".into()], &tiny());
        let f = m.forward(&[], None);
        assert!(f.h0.iter().all(|&x| x == 0.0));
        let p = m.predict_proba::<&str>(&[]);
        assert!(p > 0.0 && p < 1.0);
    }
}

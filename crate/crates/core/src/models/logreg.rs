//! Elastic-net logistic regression by coordinate-wise Newton steps with
//! soft-thresholding and an Armijo line search.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::{sigmoid, softplus, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<T> {
    /// nonzero weights only
    pub weights: BTreeMap<String, T>,
    pub bias: T,
    pub schema: String,
    pub alpha: T,
    pub rho: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LrParams {
    pub alpha: f64,
    /// L1 share of the penalty, in [0, 1]
    pub rho: f64,
    pub seed: u64,
    pub max_epochs: usize,
    /// stop once no weight moves by more than this in an epoch
    pub tol: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        LrParams {
            alpha: 1e-3,
            rho: 0.5,
            seed: 0,
            max_epochs: 500,
            tol: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FitReport {
    pub epochs: usize,
    pub converged: bool,
}

const ARMIJO_SIGMA: f64 = 0.01;
const ARMIJO_SHRINK: f64 = 0.5;
const MAX_BACKTRACK: usize = 30;

/// Column-major view of a sparse design matrix.
pub(crate) struct Columns<T> {
    pub names: Vec<String>,
    pub cols: Vec<Vec<(usize, T)>>,
}

pub(crate) fn columns<T: Scalar>(xs: &[FeatureVector<T>]) -> Result<Columns<T>> {
    let mut by_name: BTreeMap<&str, Vec<(usize, T)>> = BTreeMap::new();
    for (i, x) in xs.iter().enumerate() {
        for (k, v) in x.iter() {
            if !v.is_finite() {
                return Err(Error::Data(format!("non-finite value for feature {k:?} in row {i}")));
            }
            by_name.entry(k).or_default().push((i, v));
        }
    }
    let (names, cols) = by_name.into_iter().map(|(k, c)| (k.to_string(), c)).unzip();
    Ok(Columns { names, cols })
}

fn check_training(xs_len: usize, y: &[u8]) -> Result<()> {
    if xs_len != y.len() {
        return Err(Error::Contract(format!("{xs_len} rows but {} labels", y.len())));
    }
    if y.len() < 2 {
        return Err(Error::Data("need at least two training examples".into()));
    }
    if y.iter().any(|&l| l > 1) {
        return Err(Error::Data("labels must be 0 or 1".into()));
    }
    if y.iter().all(|&l| l == y[0]) {
        return Err(Error::Data("training labels contain a single class".into()));
    }
    Ok(())
}

/// Mean logistic loss plus the elastic-net penalty.
pub fn logreg_objective<T: Scalar>(xs: &[FeatureVector<T>], y: &[u8], model: &LinearModel<T>) -> T {
    let n = T::of_usize(xs.len());
    let loss: T = xs
        .iter()
        .zip(y)
        .map(|(x, &l)| {
            let z = model.raw_score(x);
            softplus(z) - if l == 1 { z } else { T::zero() }
        })
        .sum::<T>()
        / n;
    let l1: T = model.weights.values().map(|w| w.abs()).sum();
    let l2: T = model.weights.values().map(|&w| w * w).sum();
    loss + model.alpha * (model.rho * l1 + (T::one() - model.rho) / T::lit(2.0) * l2)
}

fn soft_threshold<T: Scalar>(x: T, t: T) -> T {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        T::zero()
    }
}

/// Minimizes mean logistic loss + alpha·(rho·‖w‖₁ + (1−rho)/2·‖w‖₂²) with an
/// unpenalized intercept.
pub fn train_logreg<T: Scalar>(xs: &[FeatureVector<T>], y: &[u8], params: &LrParams) -> Result<(LinearModel<T>, FitReport)> {
    check_training(xs.len(), y)?;
    if !(params.alpha >= 0.0 && params.alpha.is_finite()) || !(0.0..=1.0).contains(&params.rho) {
        return Err(Error::Config(format!("invalid alpha {} / rho {}", params.alpha, params.rho)));
    }
    let schema = xs[0].schema.clone();
    if let Some(x) = xs.iter().find(|x| x.schema != schema) {
        return Err(Error::Data(format!("mixed schemas {schema:?} and {:?}", x.schema)));
    }
    let cols = columns(xs)?;
    let n = xs.len();
    let nt = T::of_usize(n);
    let yt: Vec<T> = y.iter().map(|&l| if l == 1 { T::one() } else { T::zero() }).collect();
    let lam1 = T::lit(params.alpha * params.rho);
    let lam2 = T::lit(params.alpha * (1.0 - params.rho));
    let sigma = T::lit(ARMIJO_SIGMA);
    let shrink = T::lit(ARMIJO_SHRINK);
    let tiny = T::lit(1e-12);

    let mut w = vec![T::zero(); cols.cols.len()];
    // intercept starts at the prior log-odds
    let pos = yt.iter().copied().sum::<T>();
    let mut b = (pos / (nt - pos)).ln();
    let mut z = vec![b; n];
    let loss_at = |zi: T, yi: T| softplus(zi) - yi * zi;

    let bias_col: Vec<(usize, T)> = (0..n).map(|i| (i, T::one())).collect();
    let mut order: Vec<usize> = (0..=cols.cols.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut report = FitReport {
        epochs: 0,
        converged: false,
    };
    let tol = T::lit(params.tol);
    while report.epochs < params.max_epochs {
        report.epochs += 1;
        order.shuffle(&mut rng);
        let mut max_change = T::zero();
        for &j in &order {
            // index == number of columns stands for the intercept
            let is_bias = j == cols.cols.len();
            let entries: &[(usize, T)] = if is_bias { &bias_col } else { &cols.cols[j] };
            let mut g = T::zero();
            let mut h = T::zero();
            for &(i, x) in entries {
                let p = sigmoid(z[i]);
                g += x * (p - yt[i]);
                h += x * x * p * (T::one() - p);
            }
            g /= nt;
            h /= nt;
            let cur = if is_bias { b } else { w[j] };
            let d = if is_bias {
                -g / h.max(tiny)
            } else {
                let hs = (h + lam2).max(tiny);
                soft_threshold(cur - (g + lam2 * cur) / hs, lam1 / hs) - cur
            };
            let pen_delta = |t: T| {
                if is_bias {
                    return T::zero();
                }
                let u = cur + t * d;
                lam1 * (u.abs() - cur.abs()) + lam2 / T::lit(2.0) * (u * u - cur * cur)
            };
            if d == T::zero() {
                continue;
            }
            // Armijo model decrease of the composite objective
            let gs = if is_bias { g } else { g + lam2 * cur };
            let l1_term = if is_bias { T::zero() } else { lam1 * ((cur + d).abs() - cur.abs()) };
            let delta = gs * d + l1_term;
            let mut t = T::one();
            let mut accepted = false;
            for _ in 0..MAX_BACKTRACK {
                let dl: T = entries
                    .iter()
                    .map(|&(i, x)| loss_at(z[i] + t * d * x, yt[i]) - loss_at(z[i], yt[i]))
                    .sum::<T>()
                    / nt;
                if dl + pen_delta(t) <= sigma * t * delta {
                    accepted = true;
                    break;
                }
                t *= shrink;
            }
            if !accepted {
                continue;
            }
            let step = t * d;
            for &(i, x) in entries {
                z[i] += step * x;
            }
            if is_bias {
                b += step;
            } else {
                w[j] += step;
            }
            max_change = max_change.max(step.abs());
        }
        if max_change < tol {
            report.converged = true;
            break;
        }
    }
    let weights = cols
        .names
        .into_iter()
        .zip(w)
        .filter(|(_, v)| *v != T::zero())
        .collect();
    Ok((
        LinearModel {
            weights,
            bias: b,
            schema,
            alpha: T::lit(params.alpha),
            rho: T::lit(params.rho),
        },
        report,
    ))
}

impl<T: Scalar> LinearModel<T> {
    /// `w·x + b` without the schema check.
    pub fn raw_score(&self, x: &FeatureVector<T>) -> T {
        self.bias + x.iter().map(|(k, v)| self.weights.get(k).map_or(T::zero(), |&w| w * v)).sum::<T>()
    }

    pub fn decision(&self, x: &FeatureVector<T>) -> Result<T> {
        if x.schema != self.schema {
            return Err(Error::Data(format!(
                "feature schema {:?} does not match model schema {:?}",
                x.schema, self.schema
            )));
        }
        Ok(self.raw_score(x))
    }

    pub fn predict_proba(&self, x: &FeatureVector<T>) -> Result<T> {
        self.decision(x).map(sigmoid)
    }

    /// Gradient of the smooth part (loss + L2 term) at the model, keyed by
    /// feature name, for every feature present in `xs`.
    pub fn smooth_gradient(&self, xs: &[FeatureVector<T>], y: &[u8]) -> BTreeMap<String, T> {
        let n = T::of_usize(xs.len());
        let mut g: BTreeMap<String, T> = BTreeMap::new();
        for (x, &l) in xs.iter().zip(y) {
            let r = sigmoid(self.raw_score(x)) - if l == 1 { T::one() } else { T::zero() };
            for (k, v) in x.iter() {
                *g.entry(k.to_string()).or_insert(T::zero()) += r * v / n;
            }
        }
        let lam2 = self.alpha * (T::one() - self.rho);
        for (k, gk) in g.iter_mut() {
            *gk += lam2 * self.weights.get(k).copied().unwrap_or(T::zero());
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(pairs: &[(&str, f64)]) -> FeatureVector<f64> {
        let mut v = FeatureVector::new("s");
        for &(k, x) in pairs {
            v.set(k, x);
        }
        v
    }

    #[test]
    fn separable_one_dimension() {
        let xs: Vec<_> = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0].iter().map(|&x| fv(&[("x", x)])).collect();
        let y = [0, 0, 0, 1, 1, 1];
        let p = LrParams {
            alpha: 1e-6,
            ..Default::default()
        };
        let (m, _) = train_logreg(&xs, &y, &p).unwrap();
        for (x, &l) in xs.iter().zip(&y) {
            assert_eq!((m.predict_proba(x).unwrap() >= 0.5) as u8, l);
        }
    }

    #[test]
    fn heavy_penalty_gives_prior() {
        let xs: Vec<_> = (0..10).map(|i| fv(&[("x", i as f64)])).collect();
        let y = [0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        let p = LrParams {
            alpha: 1e3,
            rho: 1.0,
            ..Default::default()
        };
        let (m, r) = train_logreg(&xs, &y, &p).unwrap();
        assert!(r.converged);
        assert!(m.weights.is_empty());
        assert!((m.bias - (0.6f64 / 0.4).ln()).abs() < 1e-8);
    }

    #[test]
    fn rejections() {
        let xs = vec![fv(&[("x", 1.0)]), fv(&[("x", 2.0)])];
        assert!(train_logreg(&xs, &[1, 1], &LrParams::default()).is_err());
        assert!(train_logreg(&xs, &[1], &LrParams::default()).is_err());
        let bad = vec![fv(&[("x", f64::NAN)]), fv(&[("x", 2.0)])];
        assert!(matches!(train_logreg(&bad, &[0, 1], &LrParams::default()), Err(Error::Data(_))));
    }

    #[test]
    fn proba_values() {
        let mut m = LinearModel {
            weights: BTreeMap::new(),
            bias: 0.0,
            schema: "s".into(),
            alpha: 0.0,
            rho: 0.0,
        };
        assert_eq!(m.predict_proba(&fv(&[("a", 1.0)])).unwrap(), 0.5);
        m.weights.insert("a".into(), 3f64.ln());
        assert!((m.predict_proba(&fv(&[("a", 1.0)])).unwrap() - 0.75).abs() < 1e-15);
        m.bias = 1.0;
        assert_eq!(m.predict_proba(&fv(&[])).unwrap(), sigmoid(1.0));
        let mut other = fv(&[]);
        other.schema = "t".into();
        assert!(m.predict_proba(&other).is_err());
    }
}

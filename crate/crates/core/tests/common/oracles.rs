use complaint_core::clusters::{spectral_labels, SymMatrix};
use complaint_core::eval::roc_auc;
use complaint_core::features::FeatureVector;
use complaint_core::models::{logreg_objective, train_logreg, LrParams, MlpConfig, MlpModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn dense_problem(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
    let truth: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut xs = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z: f64 = x.iter().zip(&truth).map(|(a, b)| a * b).sum::<f64>() + rng.gen_range(-1.0..1.0);
        y.push((z > 0.0) as u8);
        xs.push(x);
    }
    if y.iter().all(|&l| l == y[0]) {
        y[0] = 1 - y[0];
    }
    (xs, y)
}

pub fn to_vectors(xs: &[Vec<f64>]) -> Vec<FeatureVector<f64>> {
    xs.iter()
        .map(|x| {
            let mut v = FeatureVector::new("s");
            for (j, &a) in x.iter().enumerate() {
                v.set(format!("f{j}"), a);
            }
            v
        })
        .collect()
}

pub fn dense_objective(xs: &[Vec<f64>], y: &[u8], w: &[f64], b: f64, alpha: f64, rho: f64) -> f64 {
    let n = xs.len() as f64;
    let loss: f64 = xs
        .iter()
        .zip(y)
        .map(|(x, &l)| {
            let z = b + x.iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
            let sp = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
            sp - l as f64 * z
        })
        .sum::<f64>()
        / n;
    loss + alpha * (rho * w.iter().map(|v| v.abs()).sum::<f64>() + (1.0 - rho) / 2.0 * w.iter().map(|v| v * v).sum::<f64>())
}

/// Accelerated proximal gradient with adaptive restart, run far past
/// practical convergence.
pub fn fista(xs: &[Vec<f64>], y: &[u8], alpha: f64, rho: f64) -> f64 {
    let n = xs.len();
    let d = xs[0].len();
    let frob: f64 = xs.iter().map(|x| 1.0 + x.iter().map(|a| a * a).sum::<f64>()).sum();
    let lip = frob / (4.0 * n as f64) + alpha * (1.0 - rho);
    let step = 1.0 / lip;
    let mut w = vec![0.0; d + 1];
    let mut v = w.clone();
    let mut t = 1.0f64;
    let grad = |p: &[f64]| -> Vec<f64> {
        let mut g = vec![0.0; d + 1];
        for (x, &l) in xs.iter().zip(y) {
            let z = p[d] + x.iter().zip(p).map(|(a, c)| a * c).sum::<f64>();
            let r = 1.0 / (1.0 + (-z).exp()) - l as f64;
            for j in 0..d {
                g[j] += r * x[j] / n as f64;
            }
            g[d] += r / n as f64;
        }
        for j in 0..d {
            g[j] += alpha * (1.0 - rho) * p[j];
        }
        g
    };
    let obj = |p: &[f64]| dense_objective(xs, y, &p[..d], p[d], alpha, rho);
    let mut prev = obj(&w);
    for _ in 0..200_000 {
        let g = grad(&v);
        let mut next = vec![0.0; d + 1];
        for j in 0..d {
            let u = v[j] - step * g[j];
            let th = step * alpha * rho;
            next[j] = u.signum() * (u.abs() - th).max(0.0);
        }
        next[d] = v[d] - step * g[d];
        let f = obj(&next);
        let moved = next.iter().zip(&w).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if moved < 1e-15 {
            break;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        if f > prev {
            // restart momentum
            t = 1.0;
            v = w.clone();
            continue;
        }
        for j in 0..=d {
            v[j] = next[j] + (t - 1.0) / t_next * (next[j] - w[j]);
        }
        w = next;
        t = t_next;
        prev = f;
    }
    prev
}

/// Planted two- or three-block graph: dense within blocks, sparse across.
pub fn planted(n: usize, k: usize, rng: &mut ChaCha8Rng) -> (SymMatrix<f64>, Vec<usize>) {
    let mut block: Vec<usize> = (0..n).map(|i| i % k).collect();
    // shuffle membership so blocks are not contiguous
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        block.swap(i, j);
    }
    let mut w = vec![vec![0.0; n]; n];
    for i in 0..n {
        w[i][i] = 1.0;
        for j in 0..i {
            let x = if block[i] == block[j] {
                rng.gen_range(0.5..1.0)
            } else if rng.gen_bool(0.4) {
                rng.gen_range(0.0..0.2)
            } else {
                0.0
            };
            w[i][j] = x;
            w[j][i] = x;
        }
    }
    (SymMatrix::from_rows(&w), block)
}

pub fn ncut(a: &SymMatrix<f64>, labels: &[usize], k: usize) -> f64 {
    let n = a.size();
    (0..k)
        .map(|c| {
            let mut cut = 0.0;
            let mut vol = 0.0;
            for i in (0..n).filter(|&i| labels[i] == c) {
                for j in 0..n {
                    vol += a.get(i, j);
                    if labels[j] != c {
                        cut += a.get(i, j);
                    }
                }
            }
            if vol == 0.0 { f64::INFINITY } else { cut / vol }
        })
        .sum()
}

/// Exhaustive minimum normalized cut over all partitions into `k` nonempty parts.
pub fn brute_force(a: &SymMatrix<f64>, k: usize) -> Vec<usize> {
    let n = a.size();
    let mut best = (f64::INFINITY, vec![]);
    let total = k.pow(n as u32 - 1);
    for code in 0..total {
        // node 0 fixed to part 0 removes the label symmetry partially
        let mut labels = vec![0usize; n];
        let mut c = code;
        for l in labels.iter_mut().skip(1) {
            *l = c % k;
            c /= k;
        }
        if (0..k).any(|p| !labels.contains(&p)) {
            continue;
        }
        let v = ncut(a, &labels, k);
        if v < best.0 - 1e-12 {
            best = (v, labels);
        }
    }
    best.1
}

pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

pub fn toy_mlp() -> (MlpModel<f64>, Vec<(Vec<usize>, u8)>) {
    let cfg = MlpConfig {
        embed_dim: 4,
        hidden: 3,
        seed: 17,
        ..Default::default()
    };
    let vocab: Vec<String> = ["my", "order", "late", "thanks", "great"].iter().map(|s| s.to_string()).collect();
    let m = MlpModel::init(vocab, &cfg);
    let batch = vec![
        (vec![0, 1, 2], 1),
        (vec![3, 4], 0),
        (vec![2, 2, 1], 1),
        (vec![], 0),
    ];
    (m, batch)
}

pub fn brute_auc(y: &[u8], s: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1.0;
                if s[i] > s[j] {
                    num += 1.0;
                } else if s[i] == s[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / pairs
}

/// Rank AUC against pair counting on `rounds` sets of 200 instances; half
/// the rounds use a coarse score grid to force ties. Returns exact matches.
pub fn auc_agreement(rounds: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..rounds)
        .filter(|round| {
            let y: Vec<u8> = (0..200).map(|i| if i < 2 { i as u8 } else { rng.gen_range(0..2) }).collect();
            let s: Vec<f64> = (0..200)
                .map(|_| if round % 2 == 0 { rng.gen::<f64>() } else { rng.gen_range(0..10) as f64 / 10.0 })
                .collect();
            roc_auc(&y, &s).unwrap() == brute_auc(&y, &s)
        })
        .count()
}

/// Largest objective gap between the coordinate solver and the proximal
/// oracle over 20 random 20x5 problems.
pub fn solver_oracle_gap(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let (xs, y) = dense_problem(&mut rng, 20, 5);
        let alpha = [1e-3, 1e-2, 1e-1][trial % 3];
        let rho = [0.0, 0.5, 1.0, 0.25][trial % 4];
        let fv = to_vectors(&xs);
        let p = LrParams { alpha, rho, seed: trial as u64, max_epochs: 100_000, tol: 1e-11 };
        let (m, report) = train_logreg(&fv, &y, &p).unwrap();
        assert!(report.converged, "trial {trial} did not converge");
        worst = worst.max((logreg_objective(&fv, &y, &m) - fista(&xs, &y, alpha, rho)).abs());
    }
    worst
}

/// Largest relative error between analytic and central-difference
/// gradients over every parameter of the toy network.
pub fn mlp_gradient_error(masks: Option<&[Vec<f64>]>) -> f64 {
    let (m, batch) = toy_mlp();
    let (_, grad) = m.loss_and_grad(&batch, masks);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for (name, analytic) in grad.groups() {
        for (i, &a) in analytic.iter().enumerate() {
            let mut plus = m.clone();
            *plus.params.get_mut(name, i) += h;
            let mut minus = m.clone();
            *minus.params.get_mut(name, i) -= h;
            let numeric = (plus.loss_and_grad(&batch, masks).0 - minus.loss_and_grad(&batch, masks).0) / (2.0 * h);
            worst = worst.max((a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-7));
        }
    }
    worst
}

/// Spectral labels equal to the exhaustive minimum normalized cut on
/// planted graphs of 8 (K=2) and 9 (K=3) nodes. Returns the agreeing count.
pub fn spectral_agreement(trials: u64, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .filter(|&trial| {
            let (n, k) = if trial % 2 == 0 { (8, 2) } else { (9, 3) };
            let (a, _) = planted(n, k, &mut rng);
            same_partition(&spectral_labels(&a, k, trial).unwrap(), &brute_force(&a, k))
        })
        .count()
}

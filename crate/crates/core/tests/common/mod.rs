#![allow(dead_code)]

pub mod oracles;

use chrono::NaiveDate;
use complaint_core::corpus::{Corpus, Document, Domain, Label};
use complaint_core::analysis::{pearson_p, pearson_r};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const COMPLAINT: [&str; 12] = [
    "not", "still", "my", "order", "never", "waiting", "broken", "refund", "days", "issue", "error", "why",
];
const OTHER: [&str; 12] = [
    "thanks", "love", "great", "<URL>", "win", "lol", "good", "new", "check", "awesome", "fun", "today",
];
const FILLER: [&str; 16] = [
    "the", "a", "to", "is", "it", "and", "for", "on", "this", "was", "with", "you", "we", "at", "so", "in",
];

/// Labeled tweets whose words lean toward their class with probability
/// `signal`, spread round-robin over `domains`.
pub fn synthetic(n: usize, signal: f64, domains: &[Domain], seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = NaiveDate::from_ymd_opt(2018, 6, 1).unwrap();
    let docs = (0..n)
        .map(|i| {
            let complaint = rng.gen_bool(0.4);
            let len = rng.gen_range(5..12);
            let mut words = Vec::with_capacity(len + 1);
            words.push("@acme".to_string());
            for _ in 0..len {
                let w = if rng.gen_bool(signal) {
                    let pool = if complaint { &COMPLAINT } else { &OTHER };
                    *pool.choose(&mut rng).unwrap()
                } else {
                    *FILLER.choose(&mut rng).unwrap()
                };
                words.push(w.to_string());
            }
            if rng.gen_bool(0.2) {
                words.push("!!!".into());
            }
            let label = if complaint { Label::Complaint } else { Label::NotComplaint };
            let domain = domains[i % domains.len()];
            let date = base + chrono::Duration::days(rng.gen_range(0..60));
            Document::new(format!("d{i:04}"), words.join(" "), domain, label).with_date(date)
        })
        .collect();
    let mut c = Corpus::new(docs, "annotated").unwrap();
    c.tokenize();
    c
}

/// Distant-supervision style corpus with noisier signal and its own ids.
pub fn synthetic_distant(n: usize, signal: f64, seed: u64) -> Corpus {
    let mut c = synthetic(n, signal, &[Domain::Unknown], seed);
    for d in &mut c.documents {
        d.id = format!("dist-{}", d.id);
    }
    let docs = std::mem::take(&mut c.documents);
    let mut c = Corpus::new(docs, "distant").unwrap();
    c.tokenize();
    c
}

/// Two-sided permutation p-value of r over `shuffles` label permutations.
fn permutation_p(x: &[f64], y: &[f64], shuffles: usize, rng: &mut ChaCha8Rng) -> f64 {
    let r = pearson_r(x, y).unwrap().abs();
    let mut yy = y.to_vec();
    let mut hits = 0;
    for _ in 0..shuffles {
        yy.shuffle(rng);
        if pearson_r(x, &yy).unwrap().abs() >= r - 1e-12 {
            hits += 1;
        }
    }
    hits as f64 / shuffles as f64
}

/// Features with a range of correlations to a binary label; returns
/// (analytic p, permutation p, standard error) per feature.
pub fn permutation_comparison(seed: u64) -> Vec<(f64, f64, f64)> {
    const N: usize = 300;
    const SHUFFLES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y: Vec<f64> = (0..N).map(|_| rng.gen_range(0..2) as f64).collect();
    (0..20)
        .map(|f| {
            // shifts from none to about r = 0.12, p-values spread over (0, 1)
            let shift = 0.012 * f as f64;
            let x: Vec<f64> = y
                .iter()
                .map(|&l| {
                    let u: f64 = (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0;
                    u + shift * l
                })
                .collect();
            let p = pearson_p(pearson_r(&x, &y).unwrap(), N).unwrap();
            let perm = permutation_p(&x, &y, SHUFFLES, &mut rng);
            let se = (perm * (1.0 - perm) / SHUFFLES as f64).sqrt().max(1.0 / SHUFFLES as f64);
            (p, perm, se)
        })
        .collect()
}


/// Counts of features within 2 and 3 standard errors.
pub fn permutation_agreement(rows: &[(f64, f64, f64)]) -> (usize, usize) {
    let within = |m: f64| rows.iter().filter(|(p, perm, se)| (p - perm).abs() <= m * se).count();
    (within(2.0), within(3.0))
}

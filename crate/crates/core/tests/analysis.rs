mod common;

use std::sync::Arc;

use complaint_core::analysis::{cohen_kappa, correlate, correlation_report, pearson_r, simes_adjust, AnalysisFamily};
use complaint_core::corpus::Domain;
use complaint_core::features::{FeatureVector, Resources};
use proptest::prelude::*;

proptest! {
    #[test]
    fn pearson_symmetry_and_affine(
        xy in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..40),
        a in 0.1f64..5.0, b in -5.0f64..5.0,
    ) {
        let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
        let y: Vec<f64> = xy.iter().map(|p| p.1).collect();
        if let Ok(r) = pearson_r(&x, &y) {
            prop_assert!((r - pearson_r(&y, &x).unwrap()).abs() < 1e-12);
            let up: Vec<f64> = x.iter().map(|v| a * v + b).collect();
            let down: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
            prop_assert!((pearson_r(&up, &y).unwrap() - r).abs() < 1e-9);
            prop_assert!((pearson_r(&down, &y).unwrap() + r).abs() < 1e-9);
        }
    }

    #[test]
    fn simes_monotone(p in prop::collection::vec(0.0f64..=1.0, 1..50)) {
        let adj = simes_adjust(&p);
        for (a, q) in adj.iter().zip(&p) {
            prop_assert!(a >= q && *a <= 1.0);
        }
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&i, &j| p[i].total_cmp(&p[j]));
        for w in order.windows(2) {
            prop_assert!(adj[w[0]] <= adj[w[1]]);
        }
    }
}

#[test]
fn p_values_match_permutation() {
    let rows = common::permutation_comparison(2024);
    for (p, perm, se) in &rows {
        eprintln!("t-test p {p:.4}  permutation p {perm:.4}  se {se:.4}");
    }
    let (within2, within3) = common::permutation_agreement(&rows);
    // each feature lands within 2 SE with probability ~0.95
    assert!(within2 >= 17, "{within2}/20 within 2 SE");
    assert_eq!(within3, 20);
}

#[test]
fn label_copy_feature() {
    let y: Vec<u8> = (0..50).map(|i| (i % 3 == 0) as u8).collect();
    let rows: Vec<FeatureVector<f64>> = y
        .iter()
        .map(|&l| {
            let mut v = FeatureVector::new("t");
            v.set("copy", l as f64);
            v.set("rest", 1.0 - l as f64);
            v
        })
        .collect();
    let r = correlate(&rows, &y, "t").unwrap();
    let e = r.get("copy").unwrap();
    assert!((e.r - 1.0).abs() < 1e-12 && e.p < 1e-12);
    assert!(e.p_adjusted >= e.p);
}

#[test]
fn unigram_report_on_synthetic() {
    let c = common::synthetic(400, 0.5, &[Domain::Retail], 6);
    let r = correlation_report(&c, AnalysisFamily::Unigrams, Arc::new(Resources::default())).unwrap();
    let pos: Vec<&str> = r.positive(12, 0.01).iter().map(|e| e.feature.as_str()).collect();
    let neg: Vec<&str> = r.negative(12, 0.01).iter().map(|e| e.feature.as_str()).collect();
    assert!(pos.contains(&"not") && pos.contains(&"refund"), "{pos:?}");
    assert!(neg.contains(&"<URL>") && neg.contains(&"thanks"), "{neg:?}");
    // mentions are anonymized
    assert!(r.get("<USER>").is_some() && r.get("@acme").is_none());
    for e in &r.entries {
        assert!((-1.0..=1.0).contains(&e.r) && e.p_adjusted >= e.p && e.p_adjusted <= 1.0);
    }
    assert!(r.to_tsv().lines().count() > r.entries.len());
}

#[test]
fn kappa_hand_values() {
    assert_eq!(cohen_kappa(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap(), 0.0);
    // p_o = 0.8, p_e = 0.5
    let k = cohen_kappa(&[1, 1, 1, 0, 0, 0, 1, 0, 1, 0], &[1, 1, 1, 0, 0, 0, 0, 1, 1, 0]).unwrap();
    assert!((k - 0.6).abs() < 1e-12);
}

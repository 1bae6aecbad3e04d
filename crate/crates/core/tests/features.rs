mod common;

use std::sync::Arc;

use complaint_core::corpus::{plan_nested_folds, read_corpus, write_corpus, Corpus, Domain, FoldPlan};
use complaint_core::features::{
    easyadapt, matrix_to_text, normalize_unit_sum, parse_matrix, FeatureConfig, FeatureSchema, FeatureVector,
    Featurizer, Resources,
};
use complaint_core::models::{train_logreg, LrParams, Model};
use complaint_core::textproc::TaggerModel;
use complaint_core::Error;
use proptest::prelude::*;

fn vector(entries: &[(usize, f64)]) -> FeatureVector<f64> {
    let mut v = FeatureVector::new("t");
    for &(k, x) in entries {
        v.set(format!("f{k}"), x);
    }
    v
}

fn domains() -> Vec<String> {
    vec!["a".into(), "b".into(), "c".into()]
}

proptest! {
    #[test]
    fn easyadapt_inner_products(
        x in prop::collection::vec((0usize..12, -3.0f64..3.0), 0..10),
        z in prop::collection::vec((0usize..12, -3.0f64..3.0), 0..10),
    ) {
        let (x, z) = (vector(&x), vector(&z));
        let d = domains();
        let same = easyadapt(&x, "a", &d).unwrap().dot(&easyadapt(&z, "a", &d).unwrap());
        let cross = easyadapt(&x, "a", &d).unwrap().dot(&easyadapt(&z, "c", &d).unwrap());
        let base = x.dot(&z);
        prop_assert!((same - 2.0 * base).abs() <= 1e-12 * (1.0 + base.abs()));
        prop_assert!((cross - base).abs() <= 1e-12 * (1.0 + base.abs()));
    }

    #[test]
    fn unit_sum(x in prop::collection::vec((0usize..12, 0.001f64..5.0), 1..10)) {
        let v = normalize_unit_sum(&vector(&x));
        prop_assert!((v.sum() - 1.0).abs() < 1e-12);
        prop_assert!(v.iter().all(|(_, x)| (0.0..=1.0).contains(&x)));
    }
}

#[test]
fn easyadapt_unknown_domain() {
    assert!(matches!(easyadapt(&vector(&[(0, 1.0)]), "zzz", &domains()), Err(Error::Data(_))));
}

fn tagged_corpus() -> Corpus {
    let mut c = common::synthetic(90, 0.5, &[Domain::Retail, Domain::Cars], 21);
    c.tag(&TaggerModel::rule_only()).unwrap();
    c
}

#[test]
fn namespaces_and_bounds() {
    let c = tagged_corpus();
    let fz = Featurizer::fit(&c, &FeatureConfig::parse("bow,bowpos,pos,cmp").unwrap(), Arc::new(Resources::default())).unwrap();
    let prefixes = ["bow:", "bowpos:", "pos1:", "pos2:", "cmp:"];
    for v in fz.transform_corpus::<f64>(&c).unwrap() {
        for (name, x) in v.iter() {
            assert!(prefixes.iter().any(|p| name.starts_with(p)), "{name}");
            assert!(fz.schema().names.iter().any(|n| n == name), "{name} outside schema");
            if name.contains("_frac") || name.starts_with("cmp:pron_") {
                assert!((0.0..=1.0).contains(&x), "{name} = {x}");
            }
        }
        let buckets: f64 = ["day", "week", "month", "year"].iter().map(|b| v.get(&format!("cmp:temp_{b}"))).sum();
        assert!(buckets <= 1.0);
        let p1: f64 = v.iter().filter(|(n, _)| n.starts_with("pos1:")).map(|(_, x)| x).sum();
        assert!((p1 - 1.0).abs() < 1e-12);
        let norm = v.iter().filter(|(n, _)| n.starts_with("bow:")).map(|(_, x)| x * x).sum::<f64>();
        assert!(norm == 0.0 || (norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn no_leakage_fingerprint() {
    let c = tagged_corpus();
    let plan = plan_nested_folds(&c, 5, 3, 4).unwrap();
    let cfg = FeatureConfig::parse("bow,pos,cmp").unwrap();
    let res = Arc::new(Resources::default());
    let train_idx = plan.outer_train(0);
    let test_idx = plan.outer_test(0);
    let from_full = Featurizer::fit(&c.subset(&train_idx), &cfg, res.clone()).unwrap();
    // a corpus that never contained the test documents
    let kept: Vec<_> = c.documents.iter().enumerate().filter(|(i, _)| !test_idx.contains(i)).map(|(_, d)| d.clone()).collect();
    let pruned = Corpus::new(kept, "annotated").unwrap();
    let from_pruned = Featurizer::fit(&pruned, &cfg, res).unwrap();
    assert_eq!(from_full.schema(), from_pruned.schema());
    let train = c.subset(&train_idx);
    let y = train.labels().unwrap();
    let fit = |fz: &Featurizer| {
        let rows = fz.transform_corpus::<f64>(&train).unwrap();
        let (m, _) = train_logreg(&rows, &y, &LrParams::default()).unwrap();
        Model::LogReg(m).to_text()
    };
    assert_eq!(fit(&from_full), fit(&from_pruned));
    let test_ids: Vec<&str> = test_idx.iter().map(|&i| c.documents[i].id.as_str()).collect();
    from_full.check_disjoint(test_ids.iter().copied()).unwrap();
    let leaked = train.documents[0].id.as_str();
    assert!(matches!(from_full.check_disjoint([leaked]), Err(Error::Leakage(_))));
}

#[test]
fn round_trips() {
    let c = tagged_corpus();
    let fz = Featurizer::fit(&c, &FeatureConfig::parse("bow,cmp").unwrap(), Arc::new(Resources::default())).unwrap();
    let schema = fz.schema();
    assert_eq!(&FeatureSchema::parse(&schema.to_text()).unwrap(), schema);

    let rows = fz.transform_corpus::<f64>(&c).unwrap();
    let ids: Vec<&str> = c.documents.iter().map(|d| d.id.as_str()).collect();
    let back = parse_matrix::<f64>(&matrix_to_text(&ids, &rows), &schema.id).unwrap();
    assert_eq!(back.len(), rows.len());
    for ((id, v), (orig_id, orig)) in back.iter().zip(ids.iter().zip(&rows)) {
        assert_eq!(id, orig_id);
        assert_eq!(v.iter().collect::<Vec<_>>(), orig.iter().collect::<Vec<_>>());
    }

    let plan = plan_nested_folds(&c, 5, 3, 4).unwrap();
    let reread = FoldPlan::parse(&plan.to_tsv(), &c).unwrap();
    assert_eq!((reread.outer.clone(), reread.inner.clone()), (plan.outer.clone(), plan.inner.clone()));

    let mut buf = Vec::new();
    write_corpus(&c, &mut buf).unwrap();
    let again = read_corpus(buf.as_slice(), "annotated").unwrap();
    assert_eq!(again.len(), c.len());
    for (a, b) in again.documents.iter().zip(&c.documents) {
        assert_eq!((&a.id, &a.raw_text, a.domain, a.label, a.post_date), (&b.id, &b.raw_text, b.domain, b.label, b.post_date));
    }
}

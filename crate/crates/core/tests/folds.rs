use complaint_core::corpus::{plan_nested_folds, Corpus, Document, Domain, Label};
use proptest::prelude::*;

fn corpus(labels: &[u8]) -> Corpus {
    let docs = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| Document::new(format!("doc{i}"), "text", Domain::Other, Label::from_binary(l)))
        .collect();
    Corpus::new(docs, "annotated").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn nested_partition(labels in prop::collection::vec(0u8..2, 40..160), k in 2usize..8, seed in any::<u64>()) {
        let pos = labels.iter().filter(|&&l| l == 1).count();
        prop_assume!(pos >= k && labels.len() - pos >= k);
        let c = corpus(&labels);
        let plan = plan_nested_folds(&c, k, 3, seed).unwrap();
        let folds = plan.outer_folds();
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert_eq!(sizes.iter().sum::<usize>(), labels.len());
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        for class in [0u8, 1] {
            let per: Vec<usize> = folds.iter().map(|f| f.iter().filter(|&&i| labels[i] == class).count()).collect();
            prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
        }
        for f in 0..k {
            let test = plan.outer_test(f);
            let mut inner: Vec<usize> = plan.inner_folds(f).concat();
            inner.sort_unstable();
            prop_assert_eq!(&inner, &plan.outer_train(f));
            prop_assert!(test.iter().all(|i| inner.binary_search(i).is_err()));
        }
    }
}

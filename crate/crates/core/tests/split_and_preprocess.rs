use proptest::prelude::*;
use trienhance_core::{preprocess, stratified_split, Dataset, Label, PreprocessOptions, RawDataset, SplitSpec};

fn labeled(n0: usize, n1: usize) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n0 + n1).map(|i| vec![i as f64]).collect();
    let labels: Vec<Label> = (0..n0 + n1).map(|i| Label::from(i >= n0)).collect();
    Dataset::numeric(&rows, Some(labels)).unwrap()
}

proptest! {
    #[test]
    fn folds_partition_and_stay_stratified(n0 in 5usize..80, n1 in 5usize..40, k in 2usize..5, seed: u64) {
        let d = labeled(n0, n1);
        let parts = stratified_split(&d, &SplitSpec::k_fold(k, seed)).unwrap();
        let mut all: Vec<usize> = parts.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n0 + n1).collect::<Vec<_>>());
        for class in [0, 1] {
            let counts: Vec<usize> = parts
                .iter()
                .map(|p| p.iter().filter(|&&i| d.labels().unwrap()[i] == class).count())
                .collect();
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn holdout_reunites(n0 in 2usize..60, n1 in 2usize..30, ratio in 0.1f64..0.9, seed: u64) {
        let d = labeled(n0, n1);
        let parts = stratified_split(&d, &SplitSpec::holdout(ratio, seed)).unwrap();
        prop_assert_eq!(parts.len(), 2);
        prop_assert_eq!(parts[0].len() + parts[1].len(), n0 + n1);
    }

    #[test]
    fn preprocessing_is_idempotent(
        cells in proptest::collection::vec(
            (proptest::option::of(0u8..4), proptest::option::of("[a-c]"), 0u8..2),
            4..40,
        )
    ) {
        let raw = RawDataset {
            column_names: vec!["num".into(), "cat".into()],
            rows: cells.iter().map(|(a, b, _)| vec![a.map(|v| v.to_string()), b.clone()]).collect(),
            labels: Some(cells.iter().map(|(_, _, l)| Some(if *l == 0 { "no".to_string() } else { "yes".to_string() })).collect()),
            kind_hints: Vec::new(),
        };
        let opts = PreprocessOptions::default();
        let Ok(once) = preprocess(&raw, &opts) else { return Ok(()); };
        let twice = preprocess(&RawDataset::from_dataset(&once), &opts).unwrap();
        prop_assert_eq!(twice.features(), once.features());
        prop_assert_eq!(twice.labels(), once.labels());
        prop_assert_eq!(twice.column_names(), once.column_names());
    }
}

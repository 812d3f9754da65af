//! Corpus, evaluation and generator invariants checked on generated data.

use std::collections::BTreeMap;

use proptest::prelude::*;

use dialseg::classifiers::{corpus_samples, ClassifierSpec, MlpHyperparams, TaskScorer, TreeParams};
use dialseg::corpus::{corpus_stats, load_corpus, load_corpus_with_stats, save_corpus, split_folds, Corpus};
use dialseg::encoder::{FeatureSet, Layout, TaskHistory};
use dialseg::evaluator::{cross_corpus_eval, cross_validate, prf, Confusion, RunSpec};
use dialseg::parallel::Execution;
use dialseg::register::initial_register;
use dialseg::segmenter::HistoryMode;
use dialseg::synthgen::{generate_corpus, presets};

fn small_corpus(preset: usize, seed: u64, dialogs: usize) -> Corpus {
    let (_, mut cfg) = presets::all().swap_remove(preset);
    cfg.num_dialogs = dialogs;
    generate_corpus(&cfg, seed).unwrap()
}

fn run_spec(classifier: ClassifierSpec) -> RunSpec {
    RunSpec {
        classifier,
        feature_set: FeatureSet::Full,
        history: 3,
        threshold: 0.5,
        mode: HistoryMode::Predicted,
    }
}

fn quick_mlp() -> ClassifierSpec {
    ClassifierSpec::Mlp(MlpHyperparams {
        hidden: 8,
        max_epochs: 20,
        ..MlpHyperparams::default()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_corpora_round_trip(preset in 0usize..6, seed in any::<u64>(), dialogs in 1usize..15) {
        let corpus = small_corpus(preset, seed, dialogs);
        corpus.validate().unwrap();
        let text = save_corpus(&corpus);
        let (loaded, incremental) = load_corpus_with_stats(&text).unwrap();
        prop_assert_eq!(&loaded, &corpus);
        prop_assert_eq!(save_corpus(&loaded), text);
        prop_assert_eq!(incremental.unwrap(), corpus_stats(&corpus).unwrap());
    }

    #[test]
    fn folds_cover_every_dialog_once(dialogs in 2usize..40, k in 2usize..8, seed in any::<u64>()) {
        prop_assume!(k <= dialogs);
        let corpus = small_corpus(3, seed, dialogs);
        let folds = split_folds(&corpus, k, seed).unwrap();
        prop_assert_eq!(folds.assignment.len(), dialogs);
        let members = folds.fold_members(&corpus);
        let mut seen: Vec<usize> = members.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..dialogs).collect::<Vec<_>>());
        let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn confusion_margins_are_supports(cells in prop::collection::vec(0usize..20, 16)) {
        prop_assume!(cells.iter().any(|&c| c > 0));
        let counts: Vec<Vec<usize>> = cells.chunks(4).map(<[usize]>::to_vec).collect();
        let confusion = Confusion::from_counts(counts.clone());
        let tasks: Vec<String> = (0..4).map(|i| format!("t{i}")).collect();
        let metrics = prf(&confusion, &tasks).unwrap();
        for (i, m) in metrics.per_task.iter().enumerate() {
            prop_assert_eq!(m.support, counts[i].iter().sum::<usize>());
            prop_assert_eq!(m.predicted, counts.iter().map(|r| r[i]).sum::<usize>());
        }
        prop_assert_eq!(confusion.row_sums().iter().sum::<usize>(), confusion.total());
        prop_assert_eq!(confusion.col_sums().iter().sum::<usize>(), confusion.total());
    }
}

#[test]
fn pooled_confusion_counts_every_user_turn() {
    let corpus = small_corpus(0, 4, 40);
    for clf in [ClassifierSpec::Tree(TreeParams::default()), ClassifierSpec::Frb, quick_mlp()] {
        let report = cross_validate(&corpus, &run_spec(clf), 5, 9, Execution::Parallel).unwrap();
        assert_eq!(report.confusion.total(), corpus.num_user_turns());
    }
}

#[test]
fn trained_models_predict_purely() {
    let corpus = small_corpus(0, 6, 40);
    let layout = Layout::new(&corpus.schema, 3, FeatureSet::Full);
    let samples = corpus_samples(&corpus, None, &layout, 0.5).unwrap();
    for clf in [ClassifierSpec::Tree(TreeParams::default()), ClassifierSpec::Frb, quick_mlp()] {
        let model = clf.train(&samples, &layout).unwrap();
        for s in samples.iter().step_by(7) {
            let a = model.predict(&s.features, &s.symbolic).unwrap();
            let b = model.predict(&s.features, &s.symbolic).unwrap();
            assert_eq!(a, b);
        }
        let register = initial_register(&corpus.schema);
        let history = TaskHistory::new(3);
        assert_eq!(model.score(&register, &history).unwrap(), model.score(&register, &history).unwrap());
    }
}

#[test]
fn unseen_out_of_task_turns_cap_accuracy() {
    let mut train_cfg = presets::softhard();
    train_cfg.num_dialogs = 80;
    train_cfg.out_of_task_rate = 0.0;
    let train = generate_corpus(&train_cfg, 31).unwrap();
    let mut test_cfg = presets::softhard_hh();
    test_cfg.num_dialogs = 80;
    let test = generate_corpus(&test_cfg, 32).unwrap();
    let oot = test.schema.task_index("Out-of-the-Task").unwrap();
    let mut labels: BTreeMap<bool, usize> = BTreeMap::new();
    for (_, g) in test.dialogs.iter().flat_map(|d| d.user_turns()) {
        *labels.entry(g == oot).or_default() += 1;
    }
    let rate = labels[&true] as f64 / (labels[&true] + labels[&false]) as f64;
    assert!(rate > 0.0);
    for clf in [ClassifierSpec::Tree(TreeParams::default()), ClassifierSpec::Frb] {
        let report = cross_corpus_eval(&train, &test, &run_spec(clf), 1).unwrap();
        assert_eq!(report.confusion.get(oot, oot), 0);
        assert!(report.metrics.accuracy <= 1.0 - rate + 1e-12, "{} > 1 - {rate}", report.metrics.accuracy);
    }
}

#[test]
fn loading_rejects_what_validation_rejects() {
    let corpus = small_corpus(4, 2, 3);
    let text = save_corpus(&corpus);
    let first_dialog = text.lines().nth(1).unwrap();
    let duplicated = format!("{text}{first_dialog}\n");
    assert!(load_corpus(&duplicated).is_err());
}

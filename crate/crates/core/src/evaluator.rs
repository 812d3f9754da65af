//! Evaluation protocol: pooled confusion matrices, per-task precision,
//! recall and F-measure, k-fold cross-validation, feature ablation and
//! cross-corpus transfer.

use std::fmt::Write as _;

use serde::Serialize;

use crate::classifiers::{corpus_samples, ClassifierSpec};
use crate::corpus::{split_folds, Corpus, Dialog, TaskSchema, Turn};
use crate::encoder::{FeatureSet, Layout};
use crate::error::{Error, Result};
use crate::parallel::{self, Execution};
use crate::rng::derive_seed;
use crate::segmenter::{segment_corpus, HistoryMode, SegmentSettings, SegmentationTrace};

/// Gold tasks on rows, predicted tasks on columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Confusion {
    size: usize,
    counts: Vec<Vec<usize>>,
}

impl Confusion {
    pub fn new(size: usize) -> Self {
        Confusion {
            size,
            counts: vec![vec![0; size]; size],
        }
    }

    pub fn from_counts(counts: Vec<Vec<usize>>) -> Self {
        Confusion {
            size: counts.len(),
            counts,
        }
    }

    pub fn from_traces(traces: &[SegmentationTrace], size: usize) -> Self {
        let mut c = Confusion::new(size);
        for t in traces {
            for e in &t.entries {
                c.add(e.gold, e.predicted);
            }
        }
        c
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, gold: usize, predicted: usize) -> usize {
        self.counts[gold][predicted]
    }

    pub fn add(&mut self, gold: usize, predicted: usize) {
        self.counts[gold][predicted] += 1;
    }

    pub fn merge(&mut self, other: &Confusion) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in row.iter_mut().zip(orow) {
                *a += b;
            }
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.size)
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn correct(&self) -> usize {
        (0..self.size).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.correct() as f64 / total as f64
        }
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskMetrics {
    pub task: String,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Gold occurrences.
    pub support: usize,
    pub predicted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub per_task: Vec<TaskMetrics>,
    /// Unweighted means over tasks with at least one gold occurrence.
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f_measure: f64,
    pub accuracy: f64,
}

pub fn prf(confusion: &Confusion, tasks: &[String]) -> Result<Metrics> {
    if confusion.total() == 0 {
        return Err(Error::EmptyConfusion);
    }
    let rows = confusion.row_sums();
    let cols = confusion.col_sums();
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let per_task: Vec<TaskMetrics> = (0..confusion.size())
        .map(|t| {
            let tp = confusion.get(t, t);
            let precision = ratio(tp, cols[t]);
            let recall = ratio(tp, rows[t]);
            TaskMetrics {
                task: tasks[t].clone(),
                precision,
                recall,
                f_measure: f_measure(precision, recall),
                support: rows[t],
                predicted: cols[t],
            }
        })
        .collect();
    let present: Vec<&TaskMetrics> = per_task.iter().filter(|m| m.support > 0).collect();
    let mean = |f: fn(&TaskMetrics) -> f64| present.iter().map(|m| f(m)).sum::<f64>() / present.len() as f64;
    Ok(Metrics {
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f_measure: mean(|m| m.f_measure),
        accuracy: confusion.accuracy(),
        per_task,
    })
}

/// Everything that defines one evaluation apart from the data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub classifier: ClassifierSpec,
    pub feature_set: FeatureSet,
    pub history: usize,
    pub threshold: f64,
    pub mode: HistoryMode,
}

impl RunSpec {
    fn settings(&self) -> SegmentSettings {
        SegmentSettings {
            mode: self.mode,
            feature_set: self.feature_set,
            history: self.history,
            threshold: self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub protocol: String,
    pub spec: RunSpec,
    pub folds: Option<usize>,
    pub seed: u64,
    pub schema: String,
    pub train_dialogs: usize,
    pub test_dialogs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub config: EvalConfig,
    pub tasks: Vec<String>,
    pub metrics: Metrics,
    pub confusion: Confusion,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

fn train_and_segment(
    train: &Corpus,
    train_idx: Option<&[usize]>,
    test: &Corpus,
    test_idx: Option<&[usize]>,
    spec: &RunSpec,
    classifier: &ClassifierSpec,
) -> Result<Vec<SegmentationTrace>> {
    let layout = Layout::new(&train.schema, spec.history, spec.feature_set);
    let samples = corpus_samples(train, train_idx, &layout, spec.threshold)?;
    let model = classifier.train(&samples, &layout)?;
    segment_corpus(&model, test, test_idx, spec.settings(), Execution::Sequential)
}

/// k-fold cross-validation at dialog level with one pooled confusion.
pub fn cross_validate(
    corpus: &Corpus,
    spec: &RunSpec,
    k: usize,
    seed: u64,
    exec: Execution,
) -> Result<EvalReport> {
    let folds = split_folds(corpus, k, seed)?.fold_members(corpus);
    let per_fold = parallel::map_range(exec, k, |f| {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, m)| m.iter().copied())
            .collect();
        let mut train_idx = train_idx;
        train_idx.sort_unstable();
        let classifier = spec.classifier.with_seed(derive_seed(seed, f as u64));
        let traces = train_and_segment(corpus, Some(&train_idx), corpus, Some(&folds[f]), spec, &classifier)?;
        Ok::<_, Error>(Confusion::from_traces(&traces, corpus.schema.num_tasks()))
    });
    let mut pooled = Confusion::new(corpus.schema.num_tasks());
    for c in per_fold {
        pooled.merge(&c?);
    }
    Ok(EvalReport {
        config: EvalConfig {
            protocol: "cross-validation".into(),
            spec: spec.clone(),
            folds: Some(k),
            seed,
            schema: corpus.schema.name().to_string(),
            train_dialogs: corpus.dialogs.len(),
            test_dialogs: corpus.dialogs.len(),
        },
        tasks: corpus.schema.tasks().to_vec(),
        metrics: prf(&pooled, corpus.schema.tasks())?,
        confusion: pooled,
    })
}

/// One cross-validation per feature set over a shared fold assignment.
pub fn ablation_study(
    corpus: &Corpus,
    spec: &RunSpec,
    feature_sets: &[FeatureSet],
    k: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<EvalReport>> {
    parallel::map(exec, feature_sets, |&fs| {
        let spec = RunSpec {
            feature_set: fs,
            ..spec.clone()
        };
        cross_validate(corpus, &spec, k, seed, exec)
    })
    .into_iter()
    .collect()
}

fn remap_corpus(corpus: &Corpus, schema: &TaskSchema) -> Result<Corpus> {
    let map: Vec<usize> = corpus
        .schema
        .tasks()
        .iter()
        .map(|t| schema.task_index(t).expect("merged schema covers every task"))
        .collect();
    let dialogs = corpus
        .dialogs
        .iter()
        .map(|d| Dialog {
            id: d.id.clone(),
            turns: d
                .turns
                .iter()
                .map(|t| match t {
                    Turn::User {
                        index,
                        observation,
                        gold,
                    } => Turn::User {
                        index: *index,
                        observation: observation.clone(),
                        gold: map[*gold],
                    },
                    other => other.clone(),
                })
                .collect(),
        })
        .collect();
    let out = Corpus {
        schema: schema.clone(),
        dialogs,
    };
    out.validate()?;
    Ok(out)
}

/// Trains on all of `train` and segments all of `test`. Tasks that occur
/// only in the test corpus are appended to the label space; the model never
/// predicts them, so their recall is 0.
pub fn cross_corpus_eval(train: &Corpus, test: &Corpus, spec: &RunSpec, seed: u64) -> Result<EvalReport> {
    if train.schema.slots() != test.schema.slots() || train.schema.frames() != test.schema.frames() {
        return Err(Error::invalid("slot vocabulary mismatch between training and test corpora"));
    }
    let mut tasks = train.schema.tasks().to_vec();
    for t in test.schema.tasks() {
        if !tasks.contains(t) {
            tasks.push(t.clone());
        }
    }
    let merged = TaskSchema::new(
        train.schema.name(),
        tasks,
        train.schema.slots().to_vec(),
        train.schema.frames().to_vec(),
        spec.threshold,
    )?;
    let train = remap_corpus(train, &merged)?;
    let test = remap_corpus(test, &merged)?;
    let classifier = spec.classifier.with_seed(derive_seed(seed, 0));
    let traces = train_and_segment(&train, None, &test, None, spec, &classifier)?;
    let confusion = Confusion::from_traces(&traces, merged.num_tasks());
    Ok(EvalReport {
        config: EvalConfig {
            protocol: "cross-corpus".into(),
            spec: spec.clone(),
            folds: None,
            seed,
            schema: merged.name().to_string(),
            train_dialogs: train.dialogs.len(),
            test_dialogs: test.dialogs.len(),
        },
        tasks: merged.tasks().to_vec(),
        metrics: prf(&confusion, merged.tasks())?,
        confusion,
    })
}

/// Task rows with Prec./Rec./F-Meas. columns per report, two decimals.
pub fn text_table(reports: &[EvalReport]) -> String {
    let Some(first) = reports.first() else {
        return String::new();
    };
    let width = first.tasks.iter().map(String::len).max().unwrap_or(4).max(7);
    let mut out = format!("{:width$}", "");
    for r in reports {
        let _ = write!(out, "\t{:<22}", r.config.spec.classifier.title());
    }
    out.push('\n');
    let _ = write!(out, "{:width$}", "Task");
    for _ in reports {
        out.push_str("\tPrec.\tRec.\tF-Meas.");
    }
    out.push('\n');
    for (t, task) in first.tasks.iter().enumerate() {
        if reports.iter().all(|r| r.metrics.per_task[t].support == 0) {
            continue;
        }
        let _ = write!(out, "{task:width$}");
        for r in reports {
            let m = &r.metrics.per_task[t];
            let _ = write!(out, "\t{:.2}\t{:.2}\t{:.2}", m.precision, m.recall, m.f_measure);
        }
        out.push('\n');
    }
    let _ = write!(out, "{:width$}", "Average");
    for r in reports {
        let m = &r.metrics;
        let _ = write!(out, "\t{:.2}\t{:.2}\t{:.2}", m.macro_precision, m.macro_recall, m.macro_f_measure);
    }
    out.push('\n');
    out
}

/// One row per report with macro precision, recall and F-measure.
pub fn ablation_table(reports: &[EvalReport]) -> String {
    let mut out = String::from("Features\tPrecision\tRecall\tF-measure\n");
    for r in reports {
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "{}\t{:.2}\t{:.2}\t{:.2}",
            r.config.spec.feature_set.description(),
            m.macro_precision,
            m.macro_recall,
            m.macro_f_measure
        );
    }
    out
}

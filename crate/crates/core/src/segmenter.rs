//! Turn-by-turn task prediction over whole dialogs.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{TaskDistribution, TaskScorer};
use crate::corpus::{Corpus, Dialog, TaskSchema};
use crate::encoder::{FeatureSet, Layout, TaskHistory};
use crate::error::Result;
use crate::parallel::{self, Execution};
use crate::register::{initial_register, UserRegister};

/// What is pushed into the history window after each turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistoryMode {
    /// The segmenter's own prediction; errors propagate.
    #[default]
    Predicted,
    /// The gold label; an oracle-history ablation.
    Gold,
}

impl HistoryMode {
    pub fn name(self) -> &'static str {
        match self {
            HistoryMode::Predicted => "predicted",
            HistoryMode::Gold => "gold",
        }
    }
}

impl FromStr for HistoryMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "predicted" => Ok(HistoryMode::Predicted),
            "gold" => Ok(HistoryMode::Gold),
            other => Err(format!("unknown history mode `{other}` (predicted, gold)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    /// Position of the turn in the dialog (system turns included).
    pub turn: usize,
    pub register: UserRegister,
    pub history: TaskHistory,
    pub distribution: TaskDistribution,
    pub predicted: usize,
    pub gold: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationTrace {
    pub dialog_id: String,
    pub entries: Vec<TraceEntry>,
}

/// Highest-scoring task for one state; ties go to the lowest task index.
pub fn predict_task(
    scorer: &dyn TaskScorer,
    register: &UserRegister,
    history: &TaskHistory,
    schema: &TaskSchema,
    fs: FeatureSet,
) -> Result<usize> {
    scorer
        .layout()
        .ensure_matches(&Layout::new(schema, history.width(), fs))?;
    Ok(scorer.score(register, history)?.argmax())
}

/// Segments one dialog. Within each user turn the register is updated
/// first, then the task is predicted, then the history advances.
pub fn segment_dialog(
    scorer: &dyn TaskScorer,
    dialog: &Dialog,
    mode: HistoryMode,
    schema: &TaskSchema,
    fs: FeatureSet,
    history_width: usize,
    threshold: f64,
) -> Result<SegmentationTrace> {
    scorer
        .layout()
        .ensure_matches(&Layout::new(schema, history_width, fs))?;
    let mut register = initial_register(schema);
    let mut history = TaskHistory::new(history_width);
    let mut entries = Vec::new();
    for (pos, turn) in dialog.turns.iter().enumerate() {
        let crate::corpus::Turn::User {
            observation, gold, ..
        } = turn
        else {
            continue;
        };
        register = register.update(observation, schema, threshold)?;
        let distribution = scorer.score(&register, &history)?;
        let predicted = distribution.argmax();
        entries.push(TraceEntry {
            turn: pos,
            register: register.clone(),
            history: history.clone(),
            distribution,
            predicted,
            gold: *gold,
        });
        history.push(match mode {
            HistoryMode::Predicted => predicted,
            HistoryMode::Gold => *gold,
        });
    }
    Ok(SegmentationTrace {
        dialog_id: dialog.id.clone(),
        entries,
    })
}

/// Settings shared by every dialog of a segmentation run.
#[derive(Debug, Clone, Copy)]
pub struct SegmentSettings {
    pub mode: HistoryMode,
    pub feature_set: FeatureSet,
    pub history: usize,
    pub threshold: f64,
}

/// Segments the selected dialogs (all when `subset` is `None`) in order.
pub fn segment_corpus(
    scorer: &dyn TaskScorer,
    corpus: &Corpus,
    subset: Option<&[usize]>,
    settings: SegmentSettings,
    exec: Execution,
) -> Result<Vec<SegmentationTrace>> {
    let all: Vec<usize>;
    let idx = match subset {
        Some(s) => s,
        None => {
            all = (0..corpus.dialogs.len()).collect();
            &all
        }
    };
    parallel::map(exec, idx, |&i| {
        segment_dialog(
            scorer,
            &corpus.dialogs[i],
            settings.mode,
            &corpus.schema,
            settings.feature_set,
            settings.history,
            settings.threshold,
        )
    })
    .into_iter()
    .collect()
}

/// Tab-separated trace with a header row. Columns: dialog, turn, gold,
/// predicted, history (oldest first, `-` for none), register codes
/// (`slots|tiacts|frames`), then one score column per task.
pub fn traces_to_tsv(traces: &[SegmentationTrace], schema: &TaskSchema) -> String {
    let mut out = String::from("dialog\tturn\tgold\tpredicted\thistory\tregister");
    for t in schema.tasks() {
        let _ = write!(out, "\tscore:{t}");
    }
    out.push('\n');
    for trace in traces {
        for e in &trace.entries {
            let history: Vec<&str> = e
                .history
                .window()
                .iter()
                .map(|h| h.map_or("-", |t| schema.tasks()[t].as_str()))
                .collect();
            let _ = write!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                trace.dialog_id,
                e.turn,
                schema.tasks()[e.gold],
                schema.tasks()[e.predicted],
                history.join(","),
                e.register.code_string()
            );
            for s in &e.distribution.scores {
                let _ = write!(out, "\t{s}");
            }
            out.push('\n');
        }
    }
    out
}

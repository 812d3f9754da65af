//! Annotated dialog corpora: data model, line-delimited file format,
//! summary statistics and dialog-level fold splitting.
//!
//! A corpus document is UTF-8 text. The first line is a header object that
//! carries the task schema; every following line holds one dialog. See
//! FORMAT.md at the repository root for the field-level description.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Task-independent acts, in register order.
pub const TI_ACTS: [&str; 3] = ["Affirmation", "Negation", "Not-Understood"];

pub const DEFAULT_THRESHOLD: f64 = 0.5;

const CORPUS_FORMAT: &str = "dialseg-corpus";
const CORPUS_VERSION: u32 = 1;

/// Schema files shipped with the crate, by stem.
const BUNDLED_SCHEMAS: [(&str, &str); 3] = [
    ("softhard", include_str!("../data/schemas/softhard.schema.json")),
    ("dihana", include_str!("../data/schemas/dihana.schema.json")),
    ("letsgo", include_str!("../data/schemas/letsgo.schema.json")),
];

pub fn bundled_schema_names() -> impl Iterator<Item = &'static str> {
    BUNDLED_SCHEMAS.iter().map(|(n, _)| *n)
}

/// One of the shipped schemas (`softhard`, `dihana`, `letsgo`).
pub fn bundled_schema(name: &str) -> Option<TaskSchema> {
    BUNDLED_SCHEMAS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| TaskSchema::from_json(text).expect("bundled schema parses"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct SchemaFile {
    name: String,
    tasks: Vec<String>,
    slots: Vec<String>,
    #[serde(default)]
    frames: Vec<String>,
    #[serde(default = "default_threshold")]
    threshold: f64,
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

/// Inventory of tasks, slots and predicate frames for one application
/// domain, plus the confidence threshold used by the user register.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSchema {
    name: String,
    tasks: Vec<String>,
    slots: Vec<String>,
    frames: Vec<String>,
    threshold: f64,
    task_index: HashMap<String, usize>,
    slot_index: HashMap<String, usize>,
    frame_index: HashMap<String, usize>,
}

fn index_unique(field: &str, names: &[String]) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::schema(format!("{field}[{i}]"), "empty name"));
        }
        if map.insert(name.clone(), i).is_some() {
            return Err(Error::schema(
                format!("{field}[{i}]"),
                format!("duplicate name `{name}`"),
            ));
        }
    }
    Ok(map)
}

impl TaskSchema {
    pub fn new(
        name: impl Into<String>,
        tasks: Vec<String>,
        slots: Vec<String>,
        frames: Vec<String>,
        threshold: f64,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::schema("name", "empty schema name"));
        }
        if tasks.len() < 2 {
            return Err(Error::schema("tasks", "at least two tasks are required"));
        }
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::schema("threshold", format!("{threshold} not in [0,1]")));
        }
        let task_index = index_unique("tasks", &tasks)?;
        let slot_index = index_unique("slots", &slots)?;
        let frame_index = index_unique("frames", &frames)?;
        Ok(TaskSchema {
            name,
            tasks,
            slots,
            frames,
            threshold,
            task_index,
            slot_index,
            frame_index,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemaFile = serde_json::from_str(text)?;
        Self::from_file(file)
    }

    pub(crate) fn from_file(file: SchemaFile) -> Result<Self> {
        TaskSchema::new(file.name, file.tasks, file.slots, file.frames, file.threshold)
    }

    pub(crate) fn to_file(&self) -> SchemaFile {
        SchemaFile {
            name: self.name.clone(),
            tasks: self.tasks.clone(),
            slots: self.slots.clone(),
            frames: self.frames.clone(),
            threshold: self.threshold,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("schema serialises")
    }

    /// Copy of this schema with a different threshold.
    pub fn with_threshold(&self, threshold: f64) -> Result<Self> {
        TaskSchema::new(
            self.name.clone(),
            self.tasks.clone(),
            self.slots.clone(),
            self.frames.clone(),
            threshold,
        )
    }

    /// Copy of this schema under another name.
    pub fn renamed(&self, name: impl Into<String>) -> Self {
        TaskSchema {
            name: name.into(),
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn slots(&self) -> &[String] {
        &self.slots
    }

    pub fn frames(&self) -> &[String] {
        &self.frames
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn task_index(&self, label: &str) -> Option<usize> {
        self.task_index.get(label).copied()
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slot_index.get(name).copied()
    }

    pub fn frame_index(&self, name: &str) -> Option<usize> {
        self.frame_index.get(name).copied()
    }

    pub fn ti_act_index(name: &str) -> Option<usize> {
        TI_ACTS.iter().position(|a| *a == name)
    }
}

/// A named item with a recogniser confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scored {
    pub name: String,
    pub conf: f64,
}

impl Scored {
    pub fn new(name: impl Into<String>, conf: f64) -> Self {
        Scored {
            name: name.into(),
            conf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotValue {
    pub name: String,
    pub value: String,
    pub conf: f64,
}

impl SlotValue {
    pub fn new(name: impl Into<String>, value: impl Into<String>, conf: f64) -> Self {
        SlotValue {
            name: name.into(),
            value: value.into(),
            conf,
        }
    }
}

/// What the language-understanding front end reported for one user turn.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SluObservation {
    pub dialog_acts: Vec<Scored>,
    pub slots: Vec<SlotValue>,
    pub frames: Vec<Scored>,
    pub ti_acts: Vec<Scored>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Turn {
    User {
        index: usize,
        observation: SluObservation,
        /// Index of the gold task in the schema.
        gold: usize,
    },
    System {
        index: usize,
        acts: Vec<String>,
    },
}

impl Turn {
    pub fn index(&self) -> usize {
        match self {
            Turn::User { index, .. } | Turn::System { index, .. } => *index,
        }
    }

    pub fn is_user(&self) -> bool {
        matches!(self, Turn::User { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dialog {
    pub id: String,
    pub turns: Vec<Turn>,
}

impl Dialog {
    /// `(observation, gold task)` for every user turn, in order.
    pub fn user_turns(&self) -> impl Iterator<Item = (&SluObservation, usize)> {
        self.turns.iter().filter_map(|t| match t {
            Turn::User {
                observation, gold, ..
            } => Some((observation, *gold)),
            Turn::System { .. } => None,
        })
    }

    pub fn num_user_turns(&self) -> usize {
        self.turns.iter().filter(|t| t.is_user()).count()
    }

    /// Task shown for the turn at `position`: its own gold label for user
    /// turns, the preceding user turn's label for system turns.
    pub fn display_task(&self, position: usize) -> Option<usize> {
        self.turns[..=position].iter().rev().find_map(|t| match t {
            Turn::User { gold, .. } => Some(*gold),
            Turn::System { .. } => None,
        })
    }

    fn dialog_act_count(&self) -> usize {
        self.turns
            .iter()
            .map(|t| match t {
                Turn::User { observation, .. } => observation.dialog_acts.len(),
                Turn::System { acts, .. } => acts.len(),
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub schema: TaskSchema,
    pub dialogs: Vec<Dialog>,
}

impl Corpus {
    pub fn num_user_turns(&self) -> usize {
        self.dialogs.iter().map(Dialog::num_user_turns).sum()
    }

    /// Checks every structural invariant; used on corpora built in memory.
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for (d, dialog) in self.dialogs.iter().enumerate() {
            if !ids.insert(dialog.id.as_str()) {
                return Err(Error::schema(
                    format!("dialogs[{d}].id"),
                    format!("duplicate dialog id `{}`", dialog.id),
                ));
            }
            for (t, turn) in dialog.turns.iter().enumerate() {
                if turn.index() != t {
                    return Err(Error::schema(
                        format!("dialogs[{d}].turns[{t}].index"),
                        format!("expected {t}, found {}", turn.index()),
                    ));
                }
                if let Turn::User {
                    observation, gold, ..
                } = turn
                {
                    if *gold >= self.schema.num_tasks() {
                        return Err(Error::schema(
                            format!("dialogs[{d}].turns[{t}].task"),
                            "task index out of range",
                        ));
                    }
                    check_observation(&self.schema, observation)
                        .map_err(|e| prefix_field(e, &format!("dialogs[{d}].turns[{t}].")))?;
                }
            }
        }
        Ok(())
    }
}

fn prefix_field(err: Error, prefix: &str) -> Error {
    match err {
        Error::Schema { field, message } => Error::Schema {
            field: format!("{prefix}{field}"),
            message,
        },
        other => other,
    }
}

fn check_conf(field: String, conf: f64) -> Result<()> {
    if (0.0..=1.0).contains(&conf) {
        Ok(())
    } else {
        Err(Error::schema(field, format!("confidence {conf} not in [0,1]")))
    }
}

fn check_observation(schema: &TaskSchema, obs: &SluObservation) -> Result<()> {
    for (i, a) in obs.dialog_acts.iter().enumerate() {
        check_conf(format!("acts[{i}].conf"), a.conf)?;
    }
    for (i, s) in obs.slots.iter().enumerate() {
        if schema.slot_index(&s.name).is_none() {
            return Err(Error::schema(
                format!("slots[{i}].name"),
                format!("unknown slot `{}`", s.name),
            ));
        }
        check_conf(format!("slots[{i}].conf"), s.conf)?;
    }
    for (i, f) in obs.frames.iter().enumerate() {
        if schema.frame_index(&f.name).is_none() {
            return Err(Error::schema(
                format!("frames[{i}].name"),
                format!("unknown frame `{}`", f.name),
            ));
        }
        check_conf(format!("frames[{i}].conf"), f.conf)?;
    }
    for (i, a) in obs.ti_acts.iter().enumerate() {
        if TaskSchema::ti_act_index(&a.name).is_none() {
            return Err(Error::schema(
                format!("tiacts[{i}].name"),
                format!("unknown task-independent act `{}`", a.name),
            ));
        }
        check_conf(format!("tiacts[{i}].conf"), a.conf)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// On-disk representation

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    schema: SchemaFile,
}

#[derive(Serialize, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Speaker {
    User,
    System,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTurn {
    index: usize,
    speaker: Speaker,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    acts: Option<Vec<Scored>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slots: Option<Vec<SlotValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frames: Option<Vec<Scored>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tiacts: Option<Vec<Scored>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    task: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sysacts: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDialog {
    id: String,
    turns: Vec<RawTurn>,
}

fn syntax(line: usize, err: serde_json::Error) -> Error {
    Error::Syntax {
        line,
        message: err.to_string(),
    }
}

fn at_line(line: usize, err: Error) -> Error {
    prefix_field(err, &format!("line {line}: "))
}

fn turn_from_raw(schema: &TaskSchema, raw: RawTurn, position: usize) -> Result<Turn> {
    let field = |name: &str| format!("turns[{position}].{name}");
    if raw.index != position {
        return Err(Error::schema(
            field("index"),
            format!("expected {position}, found {}", raw.index),
        ));
    }
    match raw.speaker {
        Speaker::System => {
            for (present, name) in [
                (raw.acts.is_some(), "acts"),
                (raw.slots.is_some(), "slots"),
                (raw.frames.is_some(), "frames"),
                (raw.tiacts.is_some(), "tiacts"),
                (raw.task.is_some(), "task"),
            ] {
                if present {
                    return Err(Error::schema(field(name), "not allowed on a system turn"));
                }
            }
            Ok(Turn::System {
                index: raw.index,
                acts: raw.sysacts.unwrap_or_default(),
            })
        }
        Speaker::User => {
            if raw.sysacts.is_some() {
                return Err(Error::schema(field("sysacts"), "not allowed on a user turn"));
            }
            let label = raw
                .task
                .ok_or_else(|| Error::schema(field("task"), "user turn has no gold task"))?;
            let gold = schema
                .task_index(&label)
                .ok_or_else(|| Error::schema(field("task"), format!("unknown task `{label}`")))?;
            let observation = SluObservation {
                dialog_acts: raw.acts.unwrap_or_default(),
                slots: raw.slots.unwrap_or_default(),
                frames: raw.frames.unwrap_or_default(),
                ti_acts: raw.tiacts.unwrap_or_default(),
            };
            check_observation(schema, &observation)
                .map_err(|e| prefix_field(e, &format!("turns[{position}].")))?;
            Ok(Turn::User {
                index: raw.index,
                observation,
                gold,
            })
        }
    }
}

fn turn_to_raw(schema: &TaskSchema, turn: &Turn) -> RawTurn {
    match turn {
        Turn::User {
            index,
            observation,
            gold,
        } => RawTurn {
            index: *index,
            speaker: Speaker::User,
            acts: Some(observation.dialog_acts.clone()),
            slots: Some(observation.slots.clone()),
            frames: Some(observation.frames.clone()),
            tiacts: Some(observation.ti_acts.clone()),
            task: Some(schema.tasks()[*gold].clone()),
            sysacts: None,
        },
        Turn::System { index, acts } => RawTurn {
            index: *index,
            speaker: Speaker::System,
            acts: None,
            slots: None,
            frames: None,
            tiacts: None,
            task: None,
            sysacts: Some(acts.clone()),
        },
    }
}

/// Parses a corpus document.
pub fn load_corpus(text: &str) -> Result<Corpus> {
    load_corpus_with_stats(text).map(|(corpus, _)| corpus)
}

/// Parses a corpus document, accumulating statistics while reading.
/// The statistics are `None` for a corpus without dialogs.
pub fn load_corpus_with_stats(text: &str) -> Result<(Corpus, Option<CorpusStats>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header_line) = lines.next().ok_or(Error::Syntax {
        line: 1,
        message: "missing header line".into(),
    })?;
    let header: Header = serde_json::from_str(header_line).map_err(|e| syntax(1, e))?;
    if header.format != CORPUS_FORMAT {
        return Err(at_line(
            1,
            Error::schema("format", format!("expected `{CORPUS_FORMAT}`")),
        ));
    }
    if header.version != CORPUS_VERSION {
        return Err(at_line(
            1,
            Error::schema("version", format!("unsupported version {}", header.version)),
        ));
    }
    let schema = TaskSchema::from_file(header.schema).map_err(|e| at_line(1, e))?;

    let mut dialogs = Vec::new();
    let mut ids = HashSet::new();
    let mut acc = StatsAccumulator::new(schema.num_tasks());
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawDialog = serde_json::from_str(line).map_err(|e| syntax(line_no, e))?;
        if !ids.insert(raw.id.clone()) {
            return Err(at_line(
                line_no,
                Error::schema("id", format!("duplicate dialog id `{}`", raw.id)),
            ));
        }
        let turns = raw
            .turns
            .into_iter()
            .enumerate()
            .map(|(pos, t)| turn_from_raw(&schema, t, pos))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| at_line(line_no, e))?;
        let dialog = Dialog { id: raw.id, turns };
        acc.push(&dialog);
        dialogs.push(dialog);
    }
    let stats = acc.finish(&schema);
    Ok((Corpus { schema, dialogs }, stats))
}

/// Canonical serialisation: header line, then one dialog per line in
/// corpus order, fixed key order, trailing newline.
pub fn save_corpus(corpus: &Corpus) -> String {
    let header = Header {
        format: CORPUS_FORMAT.to_string(),
        version: CORPUS_VERSION,
        schema: corpus.schema.to_file(),
    };
    let mut out = serde_json::to_string(&header).expect("header serialises");
    out.push('\n');
    for dialog in &corpus.dialogs {
        let raw = RawDialog {
            id: dialog.id.clone(),
            turns: dialog
                .turns
                .iter()
                .map(|t| turn_to_raw(&corpus.schema, t))
                .collect(),
        };
        out.push_str(&serde_json::to_string(&raw).expect("dialog serialises"));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Statistics

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub num_dialogs: usize,
    pub num_user_turns: usize,
    pub avg_user_turns_per_dialog: f64,
    pub per_task_turn_counts: Vec<(String, usize)>,
    pub avg_dialog_acts_per_dialog: f64,
    /// Population standard deviation.
    pub std_dev_dialog_acts_per_dialog: f64,
}

impl CorpusStats {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("Number of dialogs\t{}\n", self.num_dialogs));
        s.push_str(&format!("Number of user turns\t{}\n", self.num_user_turns));
        s.push_str(&format!(
            "Average number of user turns per dialog\t{:.1}\n",
            self.avg_user_turns_per_dialog
        ));
        s.push_str(&format!(
            "Dialog acts per dialog\t{:.1} ± {:.1}\n",
            self.avg_dialog_acts_per_dialog, self.std_dev_dialog_acts_per_dialog
        ));
        for (task, n) in &self.per_task_turn_counts {
            s.push_str(&format!("{task}\t{n}\n"));
        }
        s
    }
}

/// Online statistics used while streaming a corpus from disk.
#[derive(Debug, Clone)]
pub struct StatsAccumulator {
    dialogs: usize,
    user_turns: usize,
    per_task: Vec<usize>,
    // Act counts are integers, so exact sums keep the moments independent
    // of accumulation order.
    da_sum: u64,
    da_sq: u128,
}

/// Mean and population standard deviation from exact integer moments.
fn count_moments(n: usize, sum: u64, sum_sq: u128) -> (f64, f64) {
    let n128 = n as u128;
    let spread = n128 * sum_sq - (sum as u128) * (sum as u128);
    let nf = n as f64;
    (sum as f64 / nf, (spread as f64).sqrt() / nf)
}

impl StatsAccumulator {
    pub fn new(num_tasks: usize) -> Self {
        StatsAccumulator {
            dialogs: 0,
            user_turns: 0,
            per_task: vec![0; num_tasks],
            da_sum: 0,
            da_sq: 0,
        }
    }

    pub fn push(&mut self, dialog: &Dialog) {
        self.dialogs += 1;
        for (_, gold) in dialog.user_turns() {
            self.user_turns += 1;
            self.per_task[gold] += 1;
        }
        let x = dialog.dialog_act_count() as u64;
        self.da_sum += x;
        self.da_sq += (x as u128) * (x as u128);
    }

    pub fn finish(&self, schema: &TaskSchema) -> Option<CorpusStats> {
        if self.dialogs == 0 {
            return None;
        }
        let n = self.dialogs as f64;
        let (mean, std) = count_moments(self.dialogs, self.da_sum, self.da_sq);
        Some(CorpusStats {
            num_dialogs: self.dialogs,
            num_user_turns: self.user_turns,
            avg_user_turns_per_dialog: self.user_turns as f64 / n,
            per_task_turn_counts: schema
                .tasks()
                .iter()
                .cloned()
                .zip(self.per_task.iter().copied())
                .collect(),
            avg_dialog_acts_per_dialog: mean,
            std_dev_dialog_acts_per_dialog: std,
        })
    }
}

pub fn corpus_stats(corpus: &Corpus) -> Result<CorpusStats> {
    if corpus.dialogs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus.dialogs.len() as f64;
    let mut per_task = vec![0usize; corpus.schema.num_tasks()];
    for dialog in &corpus.dialogs {
        for (_, gold) in dialog.user_turns() {
            per_task[gold] += 1;
        }
    }
    let user_turns: usize = per_task.iter().sum();
    let da: Vec<u64> = corpus.dialogs.iter().map(|d| d.dialog_act_count() as u64).collect();
    let sum_sq = da.iter().map(|&x| (x as u128) * (x as u128)).sum();
    let (mean, std) = count_moments(da.len(), da.iter().sum(), sum_sq);
    Ok(CorpusStats {
        num_dialogs: corpus.dialogs.len(),
        num_user_turns: user_turns,
        avg_user_turns_per_dialog: user_turns as f64 / n,
        per_task_turn_counts: corpus
            .schema
            .tasks()
            .iter()
            .cloned()
            .zip(per_task)
            .collect(),
        avg_dialog_acts_per_dialog: mean,
        std_dev_dialog_acts_per_dialog: std,
    })
}

// ---------------------------------------------------------------------------
// Folds

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldAssignment {
    /// Dialog positions (into `corpus.dialogs`) held out by each fold.
    pub fn fold_members(&self, corpus: &Corpus) -> Vec<Vec<usize>> {
        let mut folds = vec![Vec::new(); self.k];
        for (i, d) in corpus.dialogs.iter().enumerate() {
            folds[self.assignment[&d.id]].push(i);
        }
        folds
    }
}

/// Shuffles dialog ids with the seeded stream and deals them round-robin.
pub fn split_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid(format!("fold count must be at least 2, got {k}")));
    }
    if k > corpus.dialogs.len() {
        return Err(Error::invalid(format!(
            "fold count {k} exceeds number of dialogs {}",
            corpus.dialogs.len()
        )));
    }
    let mut ids: Vec<&str> = corpus.dialogs.iter().map(|d| d.id.as_str()).collect();
    SeededRng::new(seed).shuffle(&mut ids);
    let assignment = ids
        .into_iter()
        .enumerate()
        .map(|(pos, id)| (id.to_string(), pos % k))
        .collect();
    Ok(FoldAssignment { k, assignment })
}

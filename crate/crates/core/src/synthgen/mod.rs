//! Seeded synthetic corpora and the Bayes oracle used as a performance
//! ceiling.
//!
//! A generator config describes a hidden Markov chain over tasks. Every
//! user turn draws an emission pattern from the current task, perturbs its
//! slot mentions with noise, attaches confidences and optionally replaces
//! the turn's label with the out-of-task label. The exact RNG draw order is
//! part of the file format and listed in FORMAT.md.

mod oracle;
pub mod presets;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Dialog, SchemaFile, Scored, SluObservation, SlotValue, TaskSchema, Turn};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

pub use oracle::{bayes_oracle, BayesOracle, OracleMethod};

pub const GENERATOR_FORMAT: &str = "dialseg-generator";
pub const GENERATOR_VERSION: u32 = 1;
/// Key of the initial distribution in `transition`.
pub const START: &str = "<start>";
/// Dialog act used for out-of-task turns when the config has no pattern.
pub const OUT_OF_TASK_ACT: &str = "Other";

const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionPattern {
    pub weight: f64,
    #[serde(default)]
    pub acts: Vec<String>,
    #[serde(default)]
    pub slots: Vec<String>,
    #[serde(default)]
    pub tiacts: Vec<String>,
    #[serde(default)]
    pub frames: Vec<String>,
}

impl EmissionPattern {
    pub fn new(weight: f64) -> Self {
        EmissionPattern {
            weight,
            acts: Vec::new(),
            slots: Vec::new(),
            tiacts: Vec::new(),
            frames: Vec::new(),
        }
    }

    pub fn acts(mut self, acts: &[&str]) -> Self {
        self.acts = acts.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn slots(mut self, slots: &[&str]) -> Self {
        self.slots = slots.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn tiacts(mut self, tiacts: &[&str]) -> Self {
        self.tiacts = tiacts.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn frames(mut self, frames: &[&str]) -> Self {
        self.frames = frames.iter().map(|s| s.to_string()).collect();
        self
    }
}

/// High-confidence mentions land in `[threshold, 1]` around `high_mean`;
/// low-confidence ones (probability `low_prob`) are uniform below the
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ConfidenceModel {
    pub low_prob: f64,
    pub high_mean: f64,
    pub high_spread: f64,
}

impl Default for ConfidenceModel {
    fn default() -> Self {
        ConfidenceModel {
            low_prob: 0.1,
            high_mean: 0.85,
            high_spread: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct GeneratorFile {
    format: String,
    version: u32,
    schema: SchemaFile,
    transition: BTreeMap<String, BTreeMap<String, f64>>,
    emission: BTreeMap<String, Vec<EmissionPattern>>,
    #[serde(default)]
    system_acts: BTreeMap<String, Vec<String>>,
    confidence: ConfidenceModel,
    slot_noise: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    slot_confusions: BTreeMap<String, Vec<String>>,
    out_of_task_rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out_of_task_label: Option<String>,
    num_dialogs: usize,
    mean_user_turns: f64,
}

/// Declarative generator description. Maps are keyed by task label.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub schema: TaskSchema,
    /// `START` or a task label → distribution over next tasks.
    pub transition: BTreeMap<String, BTreeMap<String, f64>>,
    pub emission: BTreeMap<String, Vec<EmissionPattern>>,
    /// System acts emitted before each user turn of a task.
    pub system_acts: BTreeMap<String, Vec<String>>,
    pub confidence: ConfidenceModel,
    pub slot_noise: f64,
    /// Slots a mislabeled mention of the key slot may turn into. Slots
    /// without an entry may turn into any other slot.
    pub slot_confusions: BTreeMap<String, Vec<String>>,
    pub out_of_task_rate: f64,
    pub out_of_task_label: Option<String>,
    pub num_dialogs: usize,
    pub mean_user_turns: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Pattern {
    pub weight: f64,
    pub acts: Vec<String>,
    pub slots: Vec<usize>,
    pub tiacts: Vec<usize>,
    pub frames: Vec<usize>,
}

/// Validated config with every name resolved to a schema index.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Compiled {
    pub schema: TaskSchema,
    pub start: Vec<f64>,
    /// Empty rows for tasks the chain never reaches.
    pub transition: Vec<Vec<f64>>,
    pub emission: Vec<Vec<Pattern>>,
    pub system_acts: Vec<Vec<String>>,
    pub out_of_task: Option<usize>,
    pub out_of_task_patterns: Vec<Pattern>,
    pub confidence: ConfidenceModel,
    pub slot_noise: f64,
    /// Mislabel targets per slot.
    pub confusions: Vec<Vec<usize>>,
    pub out_of_task_rate: f64,
    pub num_dialogs: usize,
    pub mean_user_turns: f64,
}

fn check_prob(field: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::schema(field, format!("probability {p} not in [0,1]")))
    }
}

fn check_sum(field: &str, sum: f64) -> Result<()> {
    if (sum - 1.0).abs() <= SUM_TOLERANCE {
        Ok(())
    } else {
        Err(Error::schema(field, format!("distribution sums to {sum}, expected 1")))
    }
}

impl Compiled {
    /// Uniform draw over the dialog length: `floor(m)`, plus one with
    /// probability `frac(m)`, plus a jitter in `[-J, J]` where
    /// `J = (floor(m) - 1) / 2`; never below 1.
    pub fn length_jitter(&self) -> i64 {
        (self.mean_user_turns.floor() as i64 - 1).max(0) / 2
    }

    /// `P(L > t)` for `t = 0..`, up to the longest possible dialog.
    pub fn survival(&self) -> Vec<f64> {
        let base = self.mean_user_turns.floor() as i64;
        let frac = self.mean_user_turns - self.mean_user_turns.floor();
        let j = self.length_jitter();
        let mut pmf: BTreeMap<i64, f64> = BTreeMap::new();
        for (extra, pe) in [(0, 1.0 - frac), (1, frac)] {
            if pe == 0.0 {
                continue;
            }
            for d in -j..=j {
                let len = (base + extra + d).max(1);
                *pmf.entry(len).or_default() += pe / (2 * j + 1) as f64;
            }
        }
        let max = *pmf.keys().last().expect("non-empty") as usize;
        (0..max)
            .map(|t| pmf.iter().filter(|(&l, _)| l as usize > t).map(|(_, p)| p).sum())
            .collect()
    }
}

impl GeneratorConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GeneratorFile = serde_json::from_str(text)?;
        if file.format != GENERATOR_FORMAT {
            return Err(Error::schema("format", format!("expected `{GENERATOR_FORMAT}`")));
        }
        if file.version != GENERATOR_VERSION {
            return Err(Error::schema("version", format!("unsupported version {}", file.version)));
        }
        let c = file;
        let cfg = GeneratorConfig {
            schema: TaskSchema::from_file(c.schema)?,
            transition: c.transition,
            emission: c.emission,
            system_acts: c.system_acts,
            confidence: c.confidence,
            slot_noise: c.slot_noise,
            slot_confusions: c.slot_confusions,
            out_of_task_rate: c.out_of_task_rate,
            out_of_task_label: c.out_of_task_label,
            num_dialogs: c.num_dialogs,
            mean_user_turns: c.mean_user_turns,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Pretty JSON with sorted map keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let file = GeneratorFile {
            format: GENERATOR_FORMAT.into(),
            version: GENERATOR_VERSION,
            schema: self.schema.to_file(),
            transition: self.transition.clone(),
            emission: self.emission.clone(),
            system_acts: self.system_acts.clone(),
            confidence: self.confidence,
            slot_noise: self.slot_noise,
            slot_confusions: self.slot_confusions.clone(),
            out_of_task_rate: self.out_of_task_rate,
            out_of_task_label: self.out_of_task_label.clone(),
            num_dialogs: self.num_dialogs,
            mean_user_turns: self.mean_user_turns,
        };
        let mut s = serde_json::to_string_pretty(&file).expect("config serialises");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.compile().map(|_| ())
    }

    pub(crate) fn compile(&self) -> Result<Compiled> {
        let schema = &self.schema;
        let n = schema.num_tasks();
        let task = |field: &str, label: &str| {
            schema
                .task_index(label)
                .ok_or_else(|| Error::schema(field, format!("unknown task `{label}`")))
        };

        check_prob("slotNoise", self.slot_noise)?;
        check_prob("outOfTaskRate", self.out_of_task_rate)?;
        check_prob("confidence.lowProb", self.confidence.low_prob)?;
        check_prob("confidence.highMean", self.confidence.high_mean)?;
        if !(self.confidence.high_spread >= 0.0 && self.confidence.high_spread.is_finite()) {
            return Err(Error::schema("confidence.highSpread", "must be a finite non-negative number"));
        }
        if self.confidence.low_prob > 0.0 && schema.threshold() == 0.0 {
            return Err(Error::schema(
                "confidence.lowProb",
                "low-confidence mentions need a positive threshold",
            ));
        }
        if self.slot_noise > 0.0 && schema.slots().len() < 2 {
            return Err(Error::schema("slotNoise", "mislabeling needs at least two slots"));
        }
        let slots = schema.slots().len();
        let mut confusions: Vec<Vec<usize>> = (0..slots).map(|i| (0..slots).filter(|&j| j != i).collect()).collect();
        for (key, targets) in &self.slot_confusions {
            let field = format!("slotConfusions.{key}");
            let from = schema
                .slot_index(key)
                .ok_or_else(|| Error::schema(&field, format!("unknown slot `{key}`")))?;
            let mut list = Vec::with_capacity(targets.len());
            for t in targets {
                let to = schema
                    .slot_index(t)
                    .ok_or_else(|| Error::schema(&field, format!("unknown slot `{t}`")))?;
                if to == from || list.contains(&to) {
                    return Err(Error::schema(&field, format!("`{t}` repeated or equal to the key")));
                }
                list.push(to);
            }
            if list.is_empty() {
                return Err(Error::schema(&field, "needs at least one slot"));
            }
            confusions[from] = list;
        }
        if self.num_dialogs == 0 {
            return Err(Error::schema("numDialogs", "must be positive"));
        }
        if !(self.mean_user_turns >= 1.0 && self.mean_user_turns.is_finite()) {
            return Err(Error::schema("meanUserTurns", "must be at least 1"));
        }
        let out_of_task = match &self.out_of_task_label {
            Some(label) => Some(task("outOfTaskLabel", label)?),
            None => None,
        };
        if self.out_of_task_rate > 0.0 && out_of_task.is_none() {
            return Err(Error::schema(
                "outOfTaskLabel",
                "a positive out-of-task rate needs an out-of-task label in the schema",
            ));
        }

        let row = |key: &str, dist: &BTreeMap<String, f64>| -> Result<Vec<f64>> {
            let field = format!("transition.{key}");
            let mut out = vec![0.0; n];
            for (label, &p) in dist {
                check_prob(&field, p)?;
                out[task(&field, label)?] = p;
            }
            check_sum(&field, out.iter().sum())?;
            Ok(out)
        };
        let start = row(
            START,
            self.transition
                .get(START)
                .ok_or_else(|| Error::schema("transition", format!("missing `{START}` row")))?,
        )?;
        let mut transition = vec![Vec::new(); n];
        for (key, dist) in &self.transition {
            if key != START {
                transition[task("transition", key)?] = row(key, dist)?;
            }
        }

        let pattern = |field: &str, p: &EmissionPattern| -> Result<Pattern> {
            if !(p.weight >= 0.0 && p.weight.is_finite()) {
                return Err(Error::schema(field, "weight must be finite and non-negative"));
            }
            let resolve = |kind: &str, names: &[String], f: &dyn Fn(&str) -> Option<usize>| {
                names
                    .iter()
                    .map(|s| f(s).ok_or_else(|| Error::schema(field, format!("unknown {kind} `{s}`"))))
                    .collect::<Result<Vec<_>>>()
            };
            Ok(Pattern {
                weight: p.weight,
                acts: p.acts.clone(),
                slots: resolve("slot", &p.slots, &|s| schema.slot_index(s))?,
                tiacts: resolve("task-independent act", &p.tiacts, &|s| TaskSchema::ti_act_index(s))?,
                frames: resolve("frame", &p.frames, &|s| schema.frame_index(s))?,
            })
        };
        let patterns = |key: &str, list: &[EmissionPattern]| -> Result<Vec<Pattern>> {
            let field = format!("emission.{key}");
            let out = list.iter().map(|p| pattern(&field, p)).collect::<Result<Vec<_>>>()?;
            if out.iter().map(|p| p.weight).sum::<f64>() <= 0.0 {
                return Err(Error::schema(field, "needs at least one pattern with positive weight"));
            }
            Ok(out)
        };
        let mut emission = vec![Vec::new(); n];
        for (key, list) in &self.emission {
            emission[task("emission", key)?] = patterns(key, list)?;
        }
        let out_of_task_patterns = match out_of_task {
            Some(o) if !emission[o].is_empty() => emission[o].clone(),
            _ => vec![Pattern {
                weight: 1.0,
                acts: vec![OUT_OF_TASK_ACT.to_string()],
                slots: Vec::new(),
                tiacts: Vec::new(),
                frames: Vec::new(),
            }],
        };

        // Every task the chain can enter needs its own row and emissions.
        let mut reachable = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&t| start[t] > 0.0).collect();
        while let Some(t) = stack.pop() {
            if std::mem::replace(&mut reachable[t], true) {
                continue;
            }
            if transition[t].is_empty() {
                return Err(Error::schema(
                    "transition",
                    format!("task `{}` is reachable but has no row", schema.tasks()[t]),
                ));
            }
            if emission[t].is_empty() {
                return Err(Error::schema(
                    "emission",
                    format!("task `{}` is reachable but has no patterns", schema.tasks()[t]),
                ));
            }
            stack.extend((0..n).filter(|&u| transition[t][u] > 0.0 && !reachable[u]));
        }

        let mut system_acts = vec![Vec::new(); n];
        for (key, acts) in &self.system_acts {
            system_acts[task("systemActs", key)?] = acts.clone();
        }

        Ok(Compiled {
            schema: schema.clone(),
            start,
            transition,
            emission,
            system_acts,
            out_of_task,
            out_of_task_patterns,
            confidence: self.confidence,
            slot_noise: self.slot_noise,
            confusions,
            out_of_task_rate: self.out_of_task_rate,
            num_dialogs: self.num_dialogs,
            mean_user_turns: self.mean_user_turns,
        })
    }
}

fn draw_confidence(rng: &mut SeededRng, model: &ConfidenceModel, threshold: f64) -> f64 {
    let low = rng.uniform() < model.low_prob;
    let u = rng.uniform();
    if low {
        threshold * u
    } else {
        (model.high_mean + model.high_spread * (2.0 * u - 1.0)).clamp(threshold, 1.0)
    }
}

/// Number of values drawn per slot mention (`<slot>-1` .. `<slot>-3`).
const VALUES_PER_SLOT: usize = 3;

impl Compiled {
    fn dialog(&self, rng: &mut SeededRng, id: String) -> Dialog {
        let schema = &self.schema;
        let theta = schema.threshold();
        let conf = &self.confidence;
        let base = self.mean_user_turns.floor() as i64;
        let frac = self.mean_user_turns - self.mean_user_turns.floor();
        let j = self.length_jitter();
        let mut len = base + i64::from(rng.bernoulli(frac));
        if j > 0 {
            len += rng.range_inclusive(-j, j);
        }
        let len = len.max(1) as usize;

        let mut turns = Vec::with_capacity(2 * len);
        let mut hidden = 0;
        for t in 0..len {
            hidden = if t == 0 {
                rng.categorical(&self.start)
            } else {
                rng.categorical(&self.transition[hidden])
            };
            let oot = self.out_of_task_rate > 0.0 && rng.bernoulli(self.out_of_task_rate);
            let (label, patterns) = match (oot, self.out_of_task) {
                (true, Some(o)) => (o, &self.out_of_task_patterns),
                _ => (hidden, &self.emission[hidden]),
            };
            let weights: Vec<f64> = patterns.iter().map(|p| p.weight).collect();
            let pattern = &patterns[rng.categorical(&weights)];

            let mut obs = SluObservation::default();
            for a in &pattern.acts {
                obs.dialog_acts.push(Scored::new(a.clone(), draw_confidence(rng, conf, theta)));
            }
            for &s in &pattern.slots {
                let mut slot = s;
                if self.slot_noise > 0.0 && rng.uniform() < self.slot_noise {
                    if rng.uniform() < 0.5 {
                        continue;
                    }
                    let targets = &self.confusions[s];
                    slot = targets[rng.below(targets.len())];
                }
                let c = draw_confidence(rng, conf, theta);
                let name = &schema.slots()[slot];
                let value = format!("{name}-{}", rng.below(VALUES_PER_SLOT) + 1);
                obs.slots.push(SlotValue::new(name.clone(), value, c));
            }
            for &a in &pattern.tiacts {
                let c = draw_confidence(rng, conf, theta);
                obs.ti_acts.push(Scored::new(crate::corpus::TI_ACTS[a], c));
            }
            for &f in &pattern.frames {
                let c = draw_confidence(rng, conf, theta);
                obs.frames.push(Scored::new(schema.frames()[f].clone(), c));
            }

            if !self.system_acts[hidden].is_empty() {
                turns.push(Turn::System {
                    index: turns.len(),
                    acts: self.system_acts[hidden].clone(),
                });
            }
            turns.push(Turn::User {
                index: turns.len(),
                observation: obs,
                gold: label,
            });
        }
        Dialog { id, turns }
    }

    pub fn generate(&self, seed: u64, num_dialogs: usize) -> Corpus {
        let mut rng = SeededRng::new(seed);
        let dialogs = (0..num_dialogs)
            .map(|i| self.dialog(&mut rng, format!("{}-{:05}", self.schema.name(), i)))
            .collect();
        Corpus {
            schema: self.schema.clone(),
            dialogs,
        }
    }
}

/// Generates `cfg.num_dialogs` dialogs from one sequential RNG stream.
pub fn generate_corpus(cfg: &GeneratorConfig, seed: u64) -> Result<Corpus> {
    let compiled = cfg.compile()?;
    Ok(compiled.generate(seed, compiled.num_dialogs))
}

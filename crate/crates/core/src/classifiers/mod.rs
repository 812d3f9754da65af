//! Task classifiers: an information-gain decision tree, an evolving
//! fuzzy-rule classifier built on cosine-distance potentials, and a
//! one-hidden-layer perceptron. All three map an encoded
//! (register, history) state to a score per task.

pub mod frb;
pub mod mlp;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Dialog, TaskSchema};
use crate::encoder::{FeatureVector, Layout, TaskHistory};
use crate::error::{Error, Result};
use crate::register::{initial_register, UserRegister};

pub use frb::{cosine_distance, potential, FrbModel};
pub use mlp::{gradient_check, input_weight_gradients, MlpHyperparams, MlpModel, SweepPoint};
pub use tree::{entropy, information_gain, TreeModel, TreeParams};

/// One score per task. Scores are nonnegative; larger is more likely.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskDistribution {
    pub scores: Vec<f64>,
}

impl TaskDistribution {
    pub fn new(scores: Vec<f64>) -> Self {
        TaskDistribution { scores }
    }

    /// Index of the highest score; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate().skip(1) {
            if s > self.scores[best] {
                best = i;
            }
        }
        best
    }
}

/// Anything that scores tasks for a (register, history) state.
pub trait TaskScorer: Sync {
    fn layout(&self) -> &Layout;

    fn score(&self, register: &UserRegister, history: &TaskHistory) -> Result<TaskDistribution>;
}

/// A training example: both views of the encoded state plus its label.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub features: FeatureVector,
    pub symbolic: Vec<u8>,
    pub label: usize,
}

/// Replays a dialog with gold history and returns one sample per user turn.
pub fn dialog_samples(
    dialog: &Dialog,
    schema: &TaskSchema,
    layout: &Layout,
    threshold: f64,
) -> Result<Vec<TrainingSample>> {
    let mut register = initial_register(schema);
    let mut history = TaskHistory::new(layout.history);
    let mut out = Vec::with_capacity(dialog.turns.len());
    for (obs, gold) in dialog.user_turns() {
        register = register.update(obs, schema, threshold)?;
        out.push(TrainingSample {
            features: layout.encode(&register, &history)?,
            symbolic: layout.symbolic(&register, &history)?,
            label: gold,
        });
        history.push(gold);
    }
    Ok(out)
}

/// Training samples for the given dialogs (all dialogs when `subset` is
/// `None`), in corpus order.
pub fn corpus_samples(
    corpus: &Corpus,
    subset: Option<&[usize]>,
    layout: &Layout,
    threshold: f64,
) -> Result<Vec<TrainingSample>> {
    let mut out = Vec::new();
    let mut push = |d: &Dialog| -> Result<()> {
        out.extend(dialog_samples(d, &corpus.schema, layout, threshold)?);
        Ok(())
    };
    match subset {
        Some(idx) => idx.iter().try_for_each(|&i| push(&corpus.dialogs[i]))?,
        None => corpus.dialogs.iter().try_for_each(push)?,
    }
    Ok(out)
}

/// Which classifier to train, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Tree(TreeParams),
    Frb,
    Mlp(MlpHyperparams),
}

impl ClassifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierSpec::Tree(_) => "tree",
            ClassifierSpec::Frb => "frb",
            ClassifierSpec::Mlp(_) => "mlp",
        }
    }

    /// Display name used in report tables.
    pub fn title(&self) -> &'static str {
        match self {
            ClassifierSpec::Tree(_) => "Decision tree classifier",
            ClassifierSpec::Frb => "FRB-classifier",
            ClassifierSpec::Mlp(_) => "MLP-classifier",
        }
    }

    /// Same classifier with its random seed replaced (only the MLP is seeded).
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            ClassifierSpec::Mlp(hp) => ClassifierSpec::Mlp(MlpHyperparams { seed, ..hp.clone() }),
            other => other.clone(),
        }
    }

    pub fn train(&self, samples: &[TrainingSample], layout: &Layout) -> Result<Model> {
        if samples.is_empty() {
            return Err(Error::Training("no training samples".into()));
        }
        let c = layout.num_tasks();
        let params = match self {
            ClassifierSpec::Tree(p) => {
                ModelParams::Tree(TreeModel::train(samples, &layout.attribute_arities(), c, p)?)
            }
            ClassifierSpec::Frb => ModelParams::Frb(FrbModel::train(samples, c)?),
            ClassifierSpec::Mlp(hp) => ModelParams::Mlp(MlpModel::train(samples, c, hp)?),
        };
        Ok(Model {
            layout: layout.clone(),
            params,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Tree(TreeModel),
    Frb(FrbModel),
    Mlp(MlpModel),
}

/// A trained classifier together with the layout it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub layout: Layout,
    pub params: ModelParams,
}

const MODEL_MAGIC: &str = "DIALSEG-MODEL";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    magic: String,
    version: u32,
    kind: String,
    layout: Layout,
    params: serde_json::Value,
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self.params {
            ModelParams::Tree(_) => "tree",
            ModelParams::Frb(_) => "frb",
            ModelParams::Mlp(_) => "mlp",
        }
    }

    /// Scores an already-encoded state.
    pub fn predict(&self, features: &FeatureVector, symbolic: &[u8]) -> Result<TaskDistribution> {
        match &self.params {
            ModelParams::Tree(m) => m.predict(symbolic),
            ModelParams::Frb(m) => m.predict(features),
            ModelParams::Mlp(m) => m.predict(features),
        }
    }

    pub fn to_json(&self) -> String {
        let params = match &self.params {
            ModelParams::Tree(m) => serde_json::to_value(m),
            ModelParams::Frb(m) => serde_json::to_value(m),
            ModelParams::Mlp(m) => serde_json::to_value(m),
        }
        .expect("model serialises");
        let file = ModelFile {
            magic: MODEL_MAGIC.to_string(),
            version: MODEL_VERSION,
            kind: self.kind().to_string(),
            layout: self.layout.clone(),
            params,
        };
        let mut s = serde_json::to_string(&file).expect("model serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.magic != MODEL_MAGIC {
            return Err(Error::ModelFormat(format!("bad magic `{}`", file.magic)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::ModelFormat(format!("unsupported version {}", file.version)));
        }
        let params = match file.kind.as_str() {
            "tree" => ModelParams::Tree(serde_json::from_value(file.params)?),
            "frb" => ModelParams::Frb(serde_json::from_value(file.params)?),
            "mlp" => ModelParams::Mlp(serde_json::from_value(file.params)?),
            other => return Err(Error::ModelFormat(format!("unknown model kind `{other}`"))),
        };
        let model = Model {
            layout: file.layout,
            params,
        };
        model.check_shape()?;
        Ok(model)
    }

    fn check_shape(&self) -> Result<()> {
        let c = self.layout.num_tasks();
        let ok = match &self.params {
            ModelParams::Tree(m) => m.num_classes() == c && m.num_attributes() == self.layout.attribute_arities().len(),
            ModelParams::Frb(m) => m.num_classes() == c && m.dimension() == self.layout.dimension,
            ModelParams::Mlp(m) => m.outputs() == c && m.inputs() == self.layout.dimension,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ModelFormat("parameters do not match the layout".into()))
        }
    }
}

impl TaskScorer for Model {
    fn layout(&self) -> &Layout {
        &self.layout
    }

    fn score(&self, register: &UserRegister, history: &TaskHistory) -> Result<TaskDistribution> {
        let fv = self.layout.encode(register, history)?;
        let sym = self.layout.symbolic(register, history)?;
        self.predict(&fv, &sym)
    }
}

pub(crate) fn classes_seen(samples: &[TrainingSample], num_classes: usize) -> Vec<bool> {
    let mut seen = vec![false; num_classes];
    for s in samples {
        seen[s.label] = true;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_unique_and_tie() {
        assert_eq!(TaskDistribution::new(vec![0.1, 0.7, 0.2]).argmax(), 1);
        assert_eq!(TaskDistribution::new(vec![0.4, 0.4, 0.2]).argmax(), 0);
    }

    #[test]
    fn argmax_is_scale_invariant() {
        let d = TaskDistribution::new(vec![0.3, 0.5, 0.5, 0.1]);
        let scaled = TaskDistribution::new(d.scores.iter().map(|s| s * 7.5).collect());
        assert_eq!(d.argmax(), scaled.argmax());
    }
}

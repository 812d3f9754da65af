//! Fixed-length feature vectors built from the task-history window and the
//! user register.
//!
//! Bit layout, in order: one C-bit one-hot group per history position
//! (oldest first, all zero for "no task yet"), then one 3-bit group per
//! slot, per task-independent act and per frame, depending on the feature
//! set. A ternary code `v` sets bit `v` of its group.
//!
//! The decision tree reads the same information as categorical attributes:
//! each history position is a (C+1)-valued attribute (0 = none) and every
//! register entry is a 3-valued attribute.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{TaskSchema, TI_ACTS};
use crate::error::{Error, Result};
use crate::register::{TernaryCode, UserRegister};

pub const DEFAULT_HISTORY: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureSet {
    /// Slot codes only.
    #[serde(rename = "av")]
    Av,
    /// Slot and task-independent act codes.
    #[serde(rename = "da_av")]
    DaAv,
    /// Slot, task-independent act and frame codes.
    #[serde(rename = "full")]
    Full,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 3] = [FeatureSet::Av, FeatureSet::DaAv, FeatureSet::Full];

    pub fn uses_ti_acts(self) -> bool {
        self != FeatureSet::Av
    }

    pub fn uses_frames(self) -> bool {
        self == FeatureSet::Full
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Av => "av",
            FeatureSet::DaAv => "da_av",
            FeatureSet::Full => "full",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FeatureSet::Av => "Attribute-Values",
            FeatureSet::DaAv => "DAs + Attribute-Values",
            FeatureSet::Full => "Complete set",
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "av" => Ok(FeatureSet::Av),
            "da_av" | "daav" => Ok(FeatureSet::DaAv),
            "full" => Ok(FeatureSet::Full),
            other => Err(format!("unknown feature set `{other}` (av, da_av, full)")),
        }
    }
}

/// The last `W` task labels, most recent last. `None` marks positions
/// before the dialog started.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaskHistory {
    window: Vec<Option<usize>>,
}

impl TaskHistory {
    pub fn new(width: usize) -> Self {
        TaskHistory {
            window: vec![None; width],
        }
    }

    pub fn from_window(window: Vec<Option<usize>>) -> Self {
        TaskHistory { window }
    }

    pub fn push(&mut self, task: usize) {
        if self.window.is_empty() {
            return;
        }
        self.window.remove(0);
        self.window.push(Some(task));
    }

    pub fn window(&self) -> &[Option<usize>] {
        &self.window
    }

    pub fn width(&self) -> usize {
        self.window.len()
    }

    pub fn last(&self) -> Option<usize> {
        self.window.last().copied().flatten()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    History,
    Slot,
    TiAct,
    Frame,
}

/// A named contiguous range of bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub name: String,
    pub kind: GroupKind,
    pub start: usize,
    pub len: usize,
}

/// Describes how register and history map onto bits. Stored with every
/// model so a model refuses inputs encoded differently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub schema: String,
    pub tasks: Vec<String>,
    pub slots: Vec<String>,
    pub frames: Vec<String>,
    pub history: usize,
    pub feature_set: FeatureSet,
    pub dimension: usize,
    pub groups: Vec<Group>,
}

pub fn feature_dimension(schema: &TaskSchema, history: usize, fs: FeatureSet) -> usize {
    let mut d = history * schema.num_tasks() + 3 * schema.slots().len();
    if fs.uses_ti_acts() {
        d += 3 * TI_ACTS.len();
    }
    if fs.uses_frames() {
        d += 3 * schema.frames().len();
    }
    d
}

/// Bit vector with entries in {0, 1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureVector {
    pub bits: Vec<u8>,
}

impl FeatureVector {
    pub fn to_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Inverse of [`Layout::encode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub history: Vec<Option<usize>>,
    pub slots: Vec<TernaryCode>,
    pub ti_acts: Option<Vec<TernaryCode>>,
    pub frames: Option<Vec<TernaryCode>>,
}

impl Layout {
    pub fn new(schema: &TaskSchema, history: usize, feature_set: FeatureSet) -> Self {
        let c = schema.num_tasks();
        let mut groups = Vec::new();
        let mut start = 0;
        let mut add = |name: String, kind: GroupKind, len: usize| {
            groups.push(Group {
                name,
                kind,
                start,
                len,
            });
            start += len;
        };
        for pos in 0..history {
            add(format!("history[-{}]", history - pos), GroupKind::History, c);
        }
        for s in schema.slots() {
            add(format!("slot:{s}"), GroupKind::Slot, 3);
        }
        if feature_set.uses_ti_acts() {
            for a in TI_ACTS {
                add(format!("tiact:{a}"), GroupKind::TiAct, 3);
            }
        }
        if feature_set.uses_frames() {
            for f in schema.frames() {
                add(format!("frame:{f}"), GroupKind::Frame, 3);
            }
        }
        let dimension = groups.last().map_or(0, |g| g.start + g.len);
        debug_assert_eq!(dimension, feature_dimension(schema, history, feature_set));
        Layout {
            schema: schema.name().to_string(),
            tasks: schema.tasks().to_vec(),
            slots: schema.slots().to_vec(),
            frames: schema.frames().to_vec(),
            history,
            feature_set,
            dimension,
            groups,
        }
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    /// Short human-readable identity used in mismatch errors.
    pub fn describe(&self) -> String {
        format!(
            "{}[C={}, slots={}, frames={}, W={}, {}; dim={}]",
            self.schema,
            self.tasks.len(),
            self.slots.len(),
            self.frames.len(),
            self.history,
            self.feature_set,
            self.dimension
        )
    }

    /// Fails unless `other` describes the same feature space.
    pub fn ensure_matches(&self, other: &Layout) -> Result<()> {
        // The schema name is informational: corpora generated under a renamed
        // schema with the same inventories are compatible.
        if self.tasks == other.tasks
            && self.slots == other.slots
            && self.frames == other.frames
            && self.history == other.history
            && self.feature_set == other.feature_set
            && self.dimension == other.dimension
            && self.groups == other.groups
        {
            Ok(())
        } else {
            Err(Error::LayoutMismatch {
                expected: self.describe(),
                actual: other.describe(),
            })
        }
    }

    fn check_inputs(&self, register: &UserRegister, history: &TaskHistory) -> Result<()> {
        if history.width() != self.history {
            return Err(Error::invalid(format!(
                "history window has {} entries, layout expects {}",
                history.width(),
                self.history
            )));
        }
        if let Some(t) = history.window().iter().flatten().find(|&&t| t >= self.tasks.len()) {
            return Err(Error::invalid(format!("history task index {t} not in schema")));
        }
        if register.slots.len() != self.slots.len() || register.frames.len() != self.frames.len() {
            return Err(Error::invalid("register does not match the schema"));
        }
        Ok(())
    }

    fn register_codes<'a>(
        &self,
        register: &'a UserRegister,
    ) -> impl Iterator<Item = TernaryCode> + 'a {
        let ti: &'a [TernaryCode] = if self.feature_set.uses_ti_acts() {
            &register.ti_acts
        } else {
            &[]
        };
        let frames: &'a [TernaryCode] = if self.feature_set.uses_frames() {
            &register.frames
        } else {
            &[]
        };
        register
            .slots
            .iter()
            .chain(ti.iter())
            .chain(frames.iter())
            .copied()
    }

    pub fn encode(&self, register: &UserRegister, history: &TaskHistory) -> Result<FeatureVector> {
        self.check_inputs(register, history)?;
        let c = self.tasks.len();
        let mut bits = vec![0u8; self.dimension];
        for (pos, entry) in history.window().iter().enumerate() {
            if let Some(t) = entry {
                bits[pos * c + t] = 1;
            }
        }
        let base = self.history * c;
        for (i, code) in self.register_codes(register).enumerate() {
            bits[base + 3 * i + code.value() as usize] = 1;
        }
        Ok(FeatureVector { bits })
    }

    /// Categorical attribute values for the decision tree.
    pub fn symbolic(&self, register: &UserRegister, history: &TaskHistory) -> Result<Vec<u8>> {
        self.check_inputs(register, history)?;
        let mut values: Vec<u8> = history
            .window()
            .iter()
            .map(|e| e.map_or(0, |t| t as u8 + 1))
            .collect();
        values.extend(self.register_codes(register).map(TernaryCode::value));
        Ok(values)
    }

    /// Number of values each symbolic attribute can take.
    pub fn attribute_arities(&self) -> Vec<usize> {
        let mut ar = vec![self.tasks.len() + 1; self.history];
        let codes = self
            .groups
            .iter()
            .filter(|g| g.kind != GroupKind::History)
            .count();
        ar.extend(std::iter::repeat_n(3, codes));
        ar
    }

    pub fn attribute_names(&self) -> Vec<String> {
        self.groups.iter().map(|g| g.name.clone()).collect()
    }

    pub fn decode(&self, fv: &FeatureVector) -> Result<Decoded> {
        if fv.len() != self.dimension {
            return Err(Error::LengthMismatch(fv.len(), self.dimension));
        }
        let mut history = Vec::new();
        let mut slots = Vec::new();
        let mut ti = Vec::new();
        let mut frames = Vec::new();
        for g in &self.groups {
            let bits = &fv.bits[g.start..g.start + g.len];
            let hot: Vec<usize> = (0..g.len).filter(|&i| bits[i] == 1).collect();
            match g.kind {
                GroupKind::History => match hot.as_slice() {
                    [] => history.push(None),
                    [t] => history.push(Some(*t)),
                    _ => return Err(Error::invalid(format!("group {} has several bits set", g.name))),
                },
                kind => {
                    let code = match hot.as_slice() {
                        [v] => TernaryCode::from_value(*v as u8).expect("3-bit group"),
                        _ => {
                            return Err(Error::invalid(format!(
                                "group {} must have exactly one bit set",
                                g.name
                            )))
                        }
                    };
                    match kind {
                        GroupKind::Slot => slots.push(code),
                        GroupKind::TiAct => ti.push(code),
                        GroupKind::Frame => frames.push(code),
                        GroupKind::History => unreachable!(),
                    }
                }
            }
        }
        Ok(Decoded {
            history,
            slots,
            ti_acts: self.feature_set.uses_ti_acts().then_some(ti),
            frames: self.feature_set.uses_frames().then_some(frames),
        })
    }
}

/// One-shot encoding without keeping the layout around.
pub fn encode(
    register: &UserRegister,
    history: &TaskHistory,
    schema: &TaskSchema,
    fs: FeatureSet,
) -> Result<FeatureVector> {
    Layout::new(schema, history.width(), fs).encode(register, history)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::register::initial_register;
    use proptest::prelude::*;

    fn schema(frames: usize) -> TaskSchema {
        TaskSchema::new(
            "toy",
            (0..4).map(|i| format!("t{i}")).collect(),
            vec!["s0".into(), "s1".into()],
            (0..frames).map(|i| format!("f{i}")).collect(),
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn dimension_formula() {
        let s = schema(3);
        assert_eq!(feature_dimension(&s, 2, FeatureSet::Av), 14);
        assert_eq!(feature_dimension(&s, 2, FeatureSet::DaAv), 23);
        assert_eq!(feature_dimension(&s, 2, FeatureSet::Full), 32);
        for fs in FeatureSet::ALL {
            assert_eq!(Layout::new(&s, 2, fs).dimension, feature_dimension(&s, 2, fs));
        }
    }

    #[test]
    fn empty_state_encoding() {
        let s = schema(0);
        let fv = encode(&initial_register(&s), &TaskHistory::new(2), &s, FeatureSet::Av).unwrap();
        assert_eq!(fv.bits, vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn layout_trace() {
        let s = schema(0);
        let mut r = initial_register(&s);
        r.slots[0] = TernaryCode::High;
        let h = TaskHistory::from_window(vec![None, Some(1)]);
        let fv = encode(&r, &h, &s, FeatureSet::Av).unwrap();
        assert_eq!(&fv.bits[4..8], &[0, 1, 0, 0]);
        assert_eq!(&fv.bits[8..11], &[0, 1, 0]);
    }

    #[test]
    fn history_out_of_schema_is_rejected() {
        let s = schema(0);
        let h = TaskHistory::from_window(vec![None, Some(7)]);
        assert!(encode(&initial_register(&s), &h, &s, FeatureSet::Av).is_err());
    }

    #[test]
    fn history_push_keeps_width() {
        let mut h = TaskHistory::new(3);
        h.push(1);
        h.push(2);
        assert_eq!(h.window(), &[None, Some(1), Some(2)]);
        h.push(0);
        h.push(3);
        assert_eq!(h.window(), &[Some(2), Some(0), Some(3)]);
        assert_eq!(h.last(), Some(3));
    }

    #[test]
    fn symbolic_view_matches_bits() {
        let s = schema(2);
        let mut r = initial_register(&s);
        r.slots[1] = TernaryCode::Low;
        r.ti_acts[2] = TernaryCode::High;
        r.frames[0] = TernaryCode::High;
        let h = TaskHistory::from_window(vec![Some(3), None, Some(0)]);
        let layout = Layout::new(&s, 3, FeatureSet::Full);
        let sym = layout.symbolic(&r, &h).unwrap();
        assert_eq!(sym, vec![4, 0, 1, 0, 2, 0, 0, 1, 1, 0]);
        assert_eq!(layout.attribute_arities(), vec![5, 5, 5, 3, 3, 3, 3, 3, 3, 3]);
        assert_eq!(layout.attribute_names().len(), sym.len());
    }

    fn arb_code() -> impl Strategy<Value = TernaryCode> {
        (0u8..3).prop_map(|v| TernaryCode::from_value(v).unwrap())
    }

    fn arb_state() -> impl Strategy<Value = (UserRegister, TaskHistory)> {
        (
            prop::collection::vec(arb_code(), 2),
            prop::collection::vec(arb_code(), 3),
            prop::collection::vec(arb_code(), 2),
            prop::collection::vec(prop::option::of(0usize..4), 3),
        )
            .prop_map(|(slots, ti, frames, window)| {
                (
                    UserRegister {
                        slots,
                        frames,
                        ti_acts: [ti[0], ti[1], ti[2]],
                    },
                    TaskHistory::from_window(window),
                )
            })
    }

    proptest! {
        #[test]
        fn decode_inverts_encode((r, h) in arb_state(), fs_i in 0usize..3) {
            let s = schema(2);
            let fs = FeatureSet::ALL[fs_i];
            let layout = Layout::new(&s, 3, fs);
            let fv = layout.encode(&r, &h).unwrap();
            prop_assert_eq!(fv.len(), feature_dimension(&s, 3, fs));
            for g in &layout.groups {
                let sum: u32 = fv.bits[g.start..g.start + g.len].iter().map(|&b| u32::from(b)).sum();
                match g.kind {
                    GroupKind::History => prop_assert!(sum <= 1),
                    _ => prop_assert_eq!(sum, 1),
                }
            }
            let d = layout.decode(&fv).unwrap();
            prop_assert_eq!(&d.history, &h.window().to_vec());
            prop_assert_eq!(&d.slots, &r.slots);
            if fs.uses_ti_acts() {
                prop_assert_eq!(d.ti_acts.unwrap(), r.ti_acts.to_vec());
            }
            if fs.uses_frames() {
                prop_assert_eq!(d.frames.unwrap(), r.frames.clone());
            }
        }

        #[test]
        fn distinct_full_states_encode_distinctly(a in arb_state(), b in arb_state()) {
            let s = schema(2);
            let layout = Layout::new(&s, 3, FeatureSet::Full);
            let (fa, fb) = (layout.encode(&a.0, &a.1).unwrap(), layout.encode(&b.0, &b.1).unwrap());
            prop_assert_eq!(a == b, fa == fb);
        }
    }
}

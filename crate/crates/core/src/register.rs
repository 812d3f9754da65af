//! The user register: a confidence-coded record of everything the user has
//! said so far in a dialog.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{SluObservation, TaskSchema};
use crate::error::{Error, Result};

/// Three-state slot code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum TernaryCode {
    /// Unknown or empty.
    Unknown = 0,
    /// Known with confidence at or above the threshold.
    High = 1,
    /// Known with confidence below the threshold.
    Low = 2,
}

impl TernaryCode {
    pub const ALL: [TernaryCode; 3] = [TernaryCode::Unknown, TernaryCode::High, TernaryCode::Low];

    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn from_value(v: u8) -> Option<Self> {
        TernaryCode::ALL.get(v as usize).copied()
    }
}

impl fmt::Display for TernaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// Codes a confidence against the threshold. Ties count as high confidence.
pub fn code_value(confidence: Option<f64>, threshold: f64) -> Result<TernaryCode> {
    match confidence {
        None => Ok(TernaryCode::Unknown),
        Some(c) if !(0.0..=1.0).contains(&c) => {
            Err(Error::invalid(format!("confidence {c} not in [0,1]")))
        }
        Some(c) if c >= threshold => Ok(TernaryCode::High),
        Some(_) => Ok(TernaryCode::Low),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserRegister {
    /// One code per schema slot, in schema order.
    pub slots: Vec<TernaryCode>,
    /// One code per schema frame, in schema order.
    pub frames: Vec<TernaryCode>,
    /// Affirmation, negation, not-understood.
    pub ti_acts: [TernaryCode; 3],
}

pub fn initial_register(schema: &TaskSchema) -> UserRegister {
    UserRegister {
        slots: vec![TernaryCode::Unknown; schema.slots().len()],
        frames: vec![TernaryCode::Unknown; schema.frames().len()],
        ti_acts: [TernaryCode::Unknown; 3],
    }
}

/// Folds one user turn into the register.
///
/// Slots and frames keep their code until mentioned again; the latest
/// mention wins. Task-independent acts describe only the current turn and
/// are reset before this turn's acts are applied.
pub fn update_register(
    register: &UserRegister,
    obs: &SluObservation,
    schema: &TaskSchema,
    threshold: f64,
) -> Result<UserRegister> {
    let mut next = register.clone();
    for s in &obs.slots {
        let i = schema
            .slot_index(&s.name)
            .ok_or_else(|| Error::invalid(format!("unknown slot `{}`", s.name)))?;
        next.slots[i] = code_value(Some(s.conf), threshold)?;
    }
    for f in &obs.frames {
        let i = schema
            .frame_index(&f.name)
            .ok_or_else(|| Error::invalid(format!("unknown frame `{}`", f.name)))?;
        next.frames[i] = code_value(Some(f.conf), threshold)?;
    }
    next.ti_acts = [TernaryCode::Unknown; 3];
    for a in &obs.ti_acts {
        let i = TaskSchema::ti_act_index(&a.name)
            .ok_or_else(|| Error::invalid(format!("unknown task-independent act `{}`", a.name)))?;
        next.ti_acts[i] = code_value(Some(a.conf), threshold)?;
    }
    Ok(next)
}

impl UserRegister {
    pub fn initial(schema: &TaskSchema) -> Self {
        initial_register(schema)
    }

    pub fn update(&self, obs: &SluObservation, schema: &TaskSchema, threshold: f64) -> Result<Self> {
        update_register(self, obs, schema, threshold)
    }

    fn digits(codes: &[TernaryCode]) -> String {
        codes.iter().map(|c| char::from(b'0' + c.value())).collect()
    }

    /// Compact `slots|tiacts|frames` digit string used in traces.
    pub fn code_string(&self) -> String {
        format!(
            "{}|{}|{}",
            Self::digits(&self.slots),
            Self::digits(&self.ti_acts),
            Self::digits(&self.frames)
        )
    }
}

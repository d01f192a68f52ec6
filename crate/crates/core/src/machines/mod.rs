//! Probabilistic finite-state machines over strings, one per row type.
//!
//! Each machine defines a distribution over finite strings. A transition
//! carries a character class and a probability; every state also carries a
//! stop probability, and the two always sum to one. [`TypeMachine::log_prob`]
//! sums over all accepting paths with the forward algorithm in log space.

mod builder;
mod builtin;
mod charclass;
mod params;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::BaseType;

pub use builder::{MachineBuilder, StateId};
pub use builtin::{builtin_machines, MachineSet, ValueLikelihoods};
pub use charclass::{CharClass, CONTROL_CHAR_COUNT, SCALAR_VALUE_COUNT};
pub use params::{MachineParams, MissingVocabulary, DEFAULT_MISSING_VALUES};

const STOCHASTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineLabel {
    Date,
    Float,
    Integer,
    String,
    Missing,
    Anomaly,
}

impl MachineLabel {
    pub const ALL: [MachineLabel; 6] = [
        MachineLabel::Date,
        MachineLabel::Float,
        MachineLabel::Integer,
        MachineLabel::String,
        MachineLabel::Missing,
        MachineLabel::Anomaly,
    ];
}

impl From<BaseType> for MachineLabel {
    fn from(t: BaseType) -> Self {
        match t {
            BaseType::Date => MachineLabel::Date,
            BaseType::Float => MachineLabel::Float,
            BaseType::Integer => MachineLabel::Integer,
            BaseType::String => MachineLabel::String,
        }
    }
}

impl fmt::Display for MachineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MachineLabel::Date => "date",
            MachineLabel::Float => "float",
            MachineLabel::Integer => "integer",
            MachineLabel::String => "string",
            MachineLabel::Missing => "missing",
            MachineLabel::Anomaly => "anomaly",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub class: CharClass,
    pub target: StateId,
    pub prob: f64,
    /// `ln(prob / class.size())`: log-mass of emitting one particular member.
    log_emit: f64,
}

impl Transition {
    pub fn new(class: CharClass, target: StateId, prob: f64) -> Self {
        Self {
            class,
            target,
            prob,
            log_emit: prob.ln() - (class.size() as f64).ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeMachine {
    label: MachineLabel,
    states: Vec<String>,
    initial: Vec<(StateId, f64)>,
    transitions: Vec<Vec<Transition>>,
    stop: Vec<f64>,
    log_initial: Vec<(StateId, f64)>,
    log_stop: Vec<f64>,
}

impl TypeMachine {
    /// Assembles a machine and checks that it is a proper string distribution
    /// locally: probabilities in `[0, 1]`, each state's stop plus outgoing mass
    /// equal to one, and an initial distribution summing to one.
    pub fn from_parts(
        label: MachineLabel,
        states: Vec<String>,
        initial: Vec<(StateId, f64)>,
        transitions: Vec<Vec<Transition>>,
        stop: Vec<f64>,
    ) -> Result<Self> {
        let n = states.len();
        if transitions.len() != n || stop.len() != n {
            return Err(Error::Model(format!(
                "machine {label}: {n} states but {} transition rows and {} stop entries",
                transitions.len(),
                stop.len()
            )));
        }
        let in_unit = |p: f64| (0.0..=1.0 + STOCHASTIC_TOLERANCE).contains(&p);
        let initial_mass: f64 = initial.iter().map(|(_, p)| p).sum();
        if initial.is_empty()
            || (initial_mass - 1.0).abs() > STOCHASTIC_TOLERANCE
            || initial.iter().any(|&(s, p)| s >= n || !in_unit(p))
        {
            return Err(Error::Model(format!(
                "machine {label}: invalid initial distribution"
            )));
        }
        for (s, row) in transitions.iter().enumerate() {
            let out: f64 = row.iter().map(|t| t.prob).sum();
            if !in_unit(stop[s])
                || row.iter().any(|t| t.target >= n || !in_unit(t.prob))
                || (out + stop[s] - 1.0).abs() > STOCHASTIC_TOLERANCE
            {
                return Err(Error::Model(format!(
                    "machine {label}: state {} is not stochastic (out {out}, stop {})",
                    states[s], stop[s]
                )));
            }
        }
        let log_initial = initial.iter().map(|&(s, p)| (s, p.ln())).collect();
        let log_stop = stop.iter().map(|p| p.ln()).collect();
        Ok(Self {
            label,
            states,
            initial,
            transitions,
            stop,
            log_initial,
            log_stop,
        })
    }

    pub fn label(&self) -> MachineLabel {
        self.label
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> &[(StateId, f64)] {
        &self.initial
    }

    pub fn transitions(&self, state: StateId) -> &[Transition] {
        &self.transitions[state]
    }

    pub fn stop_prob(&self, state: StateId) -> f64 {
        self.stop[state]
    }

    /// Log of the total probability of all accepting paths for `entry`;
    /// negative infinity when none exists.
    pub fn log_prob(&self, entry: &str) -> f64 {
        let n = self.states.len();
        let mut alpha = vec![f64::NEG_INFINITY; n];
        let mut next = vec![f64::NEG_INFINITY; n];
        let mut active: Vec<StateId> = Vec::new();
        let mut next_active: Vec<StateId> = Vec::new();
        for &(s, lp) in &self.log_initial {
            if alpha[s] == f64::NEG_INFINITY {
                active.push(s);
            }
            alpha[s] = log_add(alpha[s], lp);
        }

        for c in entry.chars() {
            for &s in &active {
                let from = alpha[s];
                for t in &self.transitions[s] {
                    if t.class.contains(c) {
                        if next[t.target] == f64::NEG_INFINITY {
                            next_active.push(t.target);
                        }
                        next[t.target] = log_add(next[t.target], from + t.log_emit);
                    }
                }
                alpha[s] = f64::NEG_INFINITY;
            }
            if next_active.is_empty() {
                return f64::NEG_INFINITY;
            }
            std::mem::swap(&mut alpha, &mut next);
            std::mem::swap(&mut active, &mut next_active);
            next_active.clear();
        }

        active
            .iter()
            .fold(f64::NEG_INFINITY, |acc, &s| log_add(acc, alpha[s] + self.log_stop[s]))
    }

    /// Draws one string from the machine's distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> String {
        let mut state = pick(rng, self.initial.iter().map(|&(s, p)| (s, p)))
            .expect("initial distribution is non-empty");
        let mut out = String::new();
        loop {
            let options = std::iter::once((None, self.stop[state])).chain(
                self.transitions[state]
                    .iter()
                    .map(|t| (Some(t), t.prob)),
            );
            match pick(rng, options).flatten() {
                None => return out,
                Some(t) => {
                    out.push(t.class.sample(rng));
                    state = t.target;
                }
            }
        }
    }

    pub fn to_document(&self) -> MachineDocument {
        MachineDocument {
            label: self.label,
            states: self.states.clone(),
            initial: self.initial.clone(),
            transitions: self
                .transitions
                .iter()
                .enumerate()
                .flat_map(|(s, row)| row.iter().map(move |t| (s, t.class, t.target, t.prob)))
                .collect(),
            stop: self
                .stop
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(s, p)| (s, *p))
                .collect(),
        }
    }

    pub fn from_document(doc: MachineDocument) -> Result<Self> {
        let n = doc.states.len();
        let mut transitions = vec![Vec::new(); n];
        for (from, class, to, prob) in doc.transitions {
            let row = transitions.get_mut(from).ok_or_else(|| {
                Error::Model(format!("transition from unknown state {from}"))
            })?;
            row.push(Transition::new(class, to, prob));
        }
        let mut stop = vec![0.0; n];
        for (s, p) in doc.stop {
            *stop
                .get_mut(s)
                .ok_or_else(|| Error::Model(format!("stop on unknown state {s}")))? += p;
        }
        Self::from_parts(doc.label, doc.states, doc.initial, transitions, stop)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }
}

/// Serialized form of a [`TypeMachine`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineDocument {
    pub label: MachineLabel,
    pub states: Vec<String>,
    pub initial: Vec<(StateId, f64)>,
    pub transitions: Vec<(StateId, CharClass, StateId, f64)>,
    pub stop: Vec<(StateId, f64)>,
}

fn pick<R: Rng + ?Sized, T>(rng: &mut R, options: impl Iterator<Item = (T, f64)>) -> Option<T> {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for (item, p) in options {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        if u < acc {
            return Some(item);
        }
        last = Some(item);
    }
    last
}

/// `ln(e^a + e^b)` without overflow or underflow.
pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^x` over a slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

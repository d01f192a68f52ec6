//! Incremental construction of type machines with epsilon moves.
//!
//! Epsilon edges make optional pieces and choices easy to express. They are
//! removed at [`MachineBuilder::build`] time by folding each state's epsilon
//! closure into its emissions and stop mass, so the finished machine only has
//! character-consuming transitions.

use std::collections::BTreeMap;

use super::charclass::CharClass;
use super::{MachineLabel, Transition, TypeMachine};

pub type StateId = usize;

#[derive(Debug, Clone)]
enum Edge {
    Emit {
        class: CharClass,
        target: StateId,
        prob: f64,
    },
    Epsilon {
        target: StateId,
        prob: f64,
    },
}

#[derive(Debug, Default)]
pub struct MachineBuilder {
    names: Vec<String>,
    edges: Vec<Vec<Edge>>,
    stop: Vec<f64>,
}

impl MachineBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        self.edges.push(Vec::new());
        self.stop.push(0.0);
        self.names.len() - 1
    }

    pub fn emit(&mut self, from: StateId, class: CharClass, to: StateId, prob: f64) {
        self.edges[from].push(Edge::Emit {
            class,
            target: to,
            prob,
        });
    }

    pub fn epsilon(&mut self, from: StateId, to: StateId, prob: f64) {
        self.edges[from].push(Edge::Epsilon { target: to, prob });
    }

    pub fn stop(&mut self, state: StateId, prob: f64) {
        self.stop[state] += prob;
    }

    /// Emits `literal` character by character from `from` to `to`, taking the
    /// whole path with probability `prob`.
    pub fn literal(&mut self, from: StateId, literal: &str, to: StateId, prob: f64) {
        self.choice(from, &[literal.to_string()], to, prob);
    }

    /// Consumes exactly one of `options` (uniformly weighted) between `from`
    /// and `to`; the choice as a whole is entered with probability `prob`.
    pub fn choice(&mut self, from: StateId, options: &[String], to: StateId, prob: f64) {
        let mut sorted: Vec<&str> = options.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        sorted.dedup();
        assert!(!sorted.is_empty(), "choice needs at least one option");
        let root = self.state(format!("{}>choice", self.names[from]));
        self.epsilon(from, root, prob);
        self.trie(root, &sorted, 0, to);
    }

    fn trie(&mut self, node: StateId, options: &[&str], depth: usize, to: StateId) {
        let total = options.len() as f64;
        let mut children: BTreeMap<char, Vec<&str>> = BTreeMap::new();
        for option in options {
            match option[depth..].chars().next() {
                None => self.epsilon(node, to, 1.0 / total),
                Some(c) => children.entry(c).or_default().push(option),
            }
        }
        for (c, group) in children {
            let child = self.state(format!("{}{}", self.names[node], c));
            self.emit(node, CharClass::Literal(c), child, group.len() as f64 / total);
            self.trie(child, &group, depth + c.len_utf8(), to);
        }
    }

    /// Finishes the machine with `initial` as its single start state.
    ///
    /// # Panics
    ///
    /// Panics when the epsilon edges contain a cycle.
    pub fn build(self, label: MachineLabel, initial: StateId) -> TypeMachine {
        let n = self.names.len();
        let mut closures: Vec<Option<Vec<(StateId, f64)>>> = vec![None; n];
        let mut on_stack = vec![false; n];
        for s in 0..n {
            self.closure(s, &mut closures, &mut on_stack);
        }

        let mut transitions: Vec<Vec<Transition>> = Vec::with_capacity(n);
        let mut stop = Vec::with_capacity(n);
        for closure in &closures {
            let closure = closure.as_ref().expect("closure computed");
            let mut merged: BTreeMap<(StateId, String), (CharClass, f64)> = BTreeMap::new();
            let mut stop_mass = 0.0;
            for &(u, w) in closure {
                stop_mass += w * self.stop[u];
                for edge in &self.edges[u] {
                    if let Edge::Emit {
                        class,
                        target,
                        prob,
                    } = *edge
                    {
                        merged
                            .entry((target, class.to_string()))
                            .or_insert((class, 0.0))
                            .1 += w * prob;
                    }
                }
            }
            transitions.push(
                merged
                    .into_iter()
                    .filter(|(_, (_, p))| *p > 0.0)
                    .map(|((target, _), (class, prob))| Transition::new(class, target, prob))
                    .collect(),
            );
            stop.push(stop_mass);
        }

        // Keep only states reachable by emissions from the start state.
        let mut keep = vec![false; n];
        let mut queue = vec![initial];
        keep[initial] = true;
        while let Some(s) = queue.pop() {
            for t in &transitions[s] {
                if !keep[t.target] {
                    keep[t.target] = true;
                    queue.push(t.target);
                }
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut names = Vec::new();
        for s in 0..n {
            if keep[s] {
                remap[s] = names.len();
                names.push(self.names[s].clone());
            }
        }
        let mut out_transitions = Vec::with_capacity(names.len());
        let mut out_stop = Vec::with_capacity(names.len());
        for s in (0..n).filter(|&s| keep[s]) {
            out_transitions.push(
                transitions[s]
                    .iter()
                    .map(|t| Transition::new(t.class, remap[t.target], t.prob))
                    .collect(),
            );
            out_stop.push(stop[s]);
        }
        TypeMachine::from_parts(
            label,
            names,
            vec![(remap[initial], 1.0)],
            out_transitions,
            out_stop,
        )
        .expect("builder produced an invalid machine")
    }

    fn closure(
        &self,
        s: StateId,
        closures: &mut Vec<Option<Vec<(StateId, f64)>>>,
        on_stack: &mut Vec<bool>,
    ) -> Vec<(StateId, f64)> {
        if let Some(done) = &closures[s] {
            return done.clone();
        }
        assert!(!on_stack[s], "epsilon cycle through state {}", self.names[s]);
        on_stack[s] = true;
        let mut acc: BTreeMap<StateId, f64> = BTreeMap::new();
        acc.insert(s, 1.0);
        for edge in &self.edges[s] {
            if let Edge::Epsilon { target, prob } = *edge {
                for (u, w) in self.closure(target, closures, on_stack) {
                    *acc.entry(u).or_insert(0.0) += prob * w;
                }
            }
        }
        on_stack[s] = false;
        let result: Vec<_> = acc.into_iter().collect();
        closures[s] = Some(result.clone());
        result
    }
}

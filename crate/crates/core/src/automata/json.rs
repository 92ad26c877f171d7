use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Alphabet, Dfa, StateId, Symbol};
use crate::error::Result;

/// Interchange form of a [`Dfa`]. Field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub alphabet: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    pub states: usize,
    pub start: StateId,
    pub accepting: Vec<StateId>,
    pub transitions: Vec<[u32; 3]>,
}

impl From<&Dfa> for AutomatonJson {
    fn from(d: &Dfa) -> Self {
        let k = d.alphabet().size();
        let mut transitions = Vec::with_capacity(d.state_count() * k);
        for q in 0..d.state_count() as StateId {
            for a in 0..k as Symbol {
                transitions.push([q, a, d.next(q, a)]);
            }
        }
        AutomatonJson {
            alphabet: k,
            labels: d.alphabet().labels().map(|l| l.to_vec()).unwrap_or_default(),
            states: d.state_count(),
            start: d.start(),
            accepting: d.accepting_states(),
            transitions,
        }
    }
}

impl AutomatonJson {
    pub fn to_dfa(&self) -> Result<Dfa> {
        let alphabet = if self.labels.is_empty() {
            Alphabet::new(self.alphabet)?
        } else {
            Alphabet::with_labels(self.labels.clone())?
        };
        if alphabet.size() != self.alphabet {
            return Err(crate::Error::InvalidAutomaton("label count differs from alphabet size".into()));
        }
        let mut delta = vec![u32::MAX; self.states * self.alphabet];
        for &[q, a, t] in &self.transitions {
            if q as usize >= self.states || a as usize >= self.alphabet {
                return Err(crate::Error::InvalidAutomaton(format!("bad transition [{q},{a},{t}]")));
            }
            delta[q as usize * self.alphabet + a as usize] = t;
        }
        let mut accepting = vec![false; self.states];
        for &q in &self.accepting {
            if q as usize >= self.states {
                return Err(crate::Error::InvalidAutomaton(format!("accepting state {q} out of range")));
            }
            accepting[q as usize] = true;
        }
        Dfa::new(alphabet, self.start, accepting, delta)
    }
}

impl Dfa {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&AutomatonJson::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Dfa> {
        serde_json::from_str::<AutomatonJson>(text)?.to_dfa()
    }
}

/// Graphviz rendering of a DFA, one node per state, parallel edges merged.
pub struct DfaDot<'a> {
    pub dfa: &'a Dfa,
    pub name: &'a str,
    /// Renders a symbol; defaults to the alphabet label.
    pub label: Option<&'a dyn Fn(Symbol) -> String>,
}

impl DfaDot<'_> {
    pub fn render(&self) -> String {
        let d = self.dfa;
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", self.name);
        let _ = writeln!(out, "  rankdir=LR;");
        let _ = writeln!(out, "  __start [shape=point];");
        for q in 0..d.state_count() as StateId {
            let shape = if d.is_accepting(q) { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        let _ = writeln!(out, "  __start -> q{};", d.start());
        for q in 0..d.state_count() as StateId {
            let mut edges: BTreeMap<StateId, Vec<String>> = BTreeMap::new();
            for a in 0..d.alphabet().size() as Symbol {
                let text = match self.label {
                    Some(f) => f(a),
                    None => d.alphabet().label(a),
                };
                edges.entry(d.next(q, a)).or_default().push(text);
            }
            for (t, labels) in edges {
                let _ = writeln!(out, "  q{q} -> q{t} [label=\"{}\"];", labels.join(", ").replace('"', "\\\""));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip_and_dot() {
        let d = Dfa::new(Alphabet::plain(2), 0, vec![true, false], vec![0, 1, 1, 0]).unwrap();
        let text = d.to_json();
        assert!(text.starts_with("{\"alphabet\":2,\"labels\":[],\"states\":2,\"start\":0,"));
        assert_eq!(Dfa::from_json(&text).unwrap(), d);
        let dot = DfaDot { dfa: &d, name: "even", label: None }.render();
        assert_eq!(dot.matches("shape=circle").count() + dot.matches("shape=doublecircle").count(), 2);
    }
}

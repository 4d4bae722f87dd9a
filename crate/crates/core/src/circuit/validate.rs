use std::collections::{HashMap, HashSet};
use std::fmt;

use super::Circuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Invariant {
    Identifier,
    UniqueIds,
    Acyclicity,
    Dangling,
    Arity,
    DistinctOperands,
    InputUsed,
    OutputsPresent,
    OutputBinding,
    OutputSink,
}

impl Invariant {
    pub fn name(self) -> &'static str {
        match self {
            Invariant::Identifier => "identifier",
            Invariant::UniqueIds => "unique_ids",
            Invariant::Acyclicity => "acyclicity",
            Invariant::Dangling => "dangling_reference",
            Invariant::Arity => "arity",
            Invariant::DistinctOperands => "distinct_operands",
            Invariant::InputUsed => "input_used",
            Invariant::OutputsPresent => "outputs_present",
            Invariant::OutputBinding => "output_binding",
            Invariant::OutputSink => "output_sink",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: Invariant,
    pub subject: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant.name(), self.subject)
    }
}

/// `[A-Z][A-Z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('A'..='Z'))
        && chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Checks every structural invariant; an empty list means the circuit is valid.
pub fn validate(circuit: &Circuit) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |invariant, subject: String| out.push(Violation { invariant, subject });

    let mut seen: HashSet<&str> = HashSet::new();
    let all_ids = circuit
        .inputs
        .iter()
        .chain(circuit.gates.iter().map(|g| &g.id))
        .chain(circuit.outputs.iter().map(|o| &o.id));
    for id in all_ids {
        if !is_identifier(id) {
            push(Invariant::Identifier, id.clone());
        }
        if !seen.insert(id) {
            push(Invariant::UniqueIds, id.clone());
        }
    }

    // position of each gate; inputs are "defined" before all gates
    let gate_pos: HashMap<&str, usize> =
        circuit.gates.iter().enumerate().map(|(i, g)| (g.id.as_str(), i)).collect();
    let inputs: HashSet<&str> = circuit.inputs.iter().map(String::as_str).collect();
    let mut used: HashSet<&str> = HashSet::new();
    let mut fanout: HashSet<&str> = HashSet::new();

    for (pos, g) in circuit.gates.iter().enumerate() {
        if g.operands.len() != g.kind.arity() {
            push(
                Invariant::Arity,
                format!("{} ({}) has {} operands", g.id, g.kind, g.operands.len()),
            );
        }
        if g.operands.len() == 2 && g.operands[0] == g.operands[1] {
            push(Invariant::DistinctOperands, g.id.clone());
        }
        for op in &g.operands {
            used.insert(op);
            fanout.insert(op);
            if inputs.contains(op.as_str()) {
                continue;
            }
            match gate_pos.get(op.as_str()) {
                Some(&p) if p < pos => {}
                Some(_) => push(Invariant::Acyclicity, format!("{} references {}", g.id, op)),
                None => push(Invariant::Dangling, format!("{} references {}", g.id, op)),
            }
        }
    }
    for i in &circuit.inputs {
        if !used.contains(i.as_str()) {
            push(Invariant::InputUsed, i.clone());
        }
    }
    if circuit.outputs.is_empty() {
        push(Invariant::OutputsPresent, String::from("circuit"));
    }
    for o in &circuit.outputs {
        if !gate_pos.contains_key(o.gate.as_str()) {
            push(Invariant::OutputBinding, format!("{} -> {}", o.id, o.gate));
        } else if fanout.contains(o.gate.as_str()) {
            push(Invariant::OutputSink, format!("{} -> {}", o.id, o.gate));
        }
    }
    out
}

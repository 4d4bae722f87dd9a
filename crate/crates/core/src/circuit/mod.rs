//! Combinational circuits: types, simulation, truth tables and the
//! flip-sensitivity ground truth.

mod generate;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{
    generate_circuit, generate_instance, generate_suite, instance_seed, GenConfig, GenError, SizeRange,
    DEFAULT_RETRY_BUDGET, GENERATOR_VERSION,
};
pub use validate::{is_identifier, validate, Invariant, Violation};

/// Largest input count for which exhaustive truth tables are built.
pub const MAX_EXHAUSTIVE_INPUTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateType {
    And,
    Or,
    Not,
    Xor,
    Nand,
    Nor,
}

impl GateType {
    pub const ALL: [GateType; 6] = [
        GateType::And,
        GateType::Or,
        GateType::Not,
        GateType::Xor,
        GateType::Nand,
        GateType::Nor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateType::And => "AND",
            GateType::Or => "OR",
            GateType::Not => "NOT",
            GateType::Xor => "XOR",
            GateType::Nand => "NAND",
            GateType::Nor => "NOR",
        }
    }

    /// Single-letter code used by the compact gate notation.
    pub fn code(self) -> &'static str {
        match self {
            GateType::And => "A",
            GateType::Or => "O",
            GateType::Not => "N",
            GateType::Xor => "X",
            GateType::Nand => "D",
            GateType::Nor => "R",
        }
    }

    /// Logic symbol used by the dependency-chain and Boolean-expression forms.
    pub fn symbol(self) -> &'static str {
        match self {
            GateType::And => "∧",
            GateType::Or => "∨",
            GateType::Not => "¬",
            GateType::Xor => "⊕",
            GateType::Nand => "⊼",
            GateType::Nor => "⊽",
        }
    }

    pub fn arity(self) -> usize {
        if self == GateType::Not {
            1
        } else {
            2
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    pub fn from_code(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.code() == s)
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.symbol() == s)
    }

    /// Bitwise evaluation; `b` is ignored for NOT.
    #[inline]
    pub fn eval_word(self, a: u64, b: u64) -> u64 {
        match self {
            GateType::And => a & b,
            GateType::Or => a | b,
            GateType::Not => !a,
            GateType::Xor => a ^ b,
            GateType::Nand => !(a & b),
            GateType::Nor => !(a | b),
        }
    }

    pub fn eval(self, a: bool, b: bool) -> bool {
        self.eval_word(a as u64, b as u64) & 1 == 1
    }
}

impl fmt::Display for GateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: GateType,
    pub operands: Vec<String>,
}

impl Gate {
    pub fn new(id: impl Into<String>, kind: GateType, operands: &[&str]) -> Self {
        Self {
            id: id.into(),
            kind,
            operands: operands.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Output {
    pub id: String,
    pub gate: String,
}

/// A DAG of gates over named inputs. `gates` is stored in topological order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Output>,
}

impl Circuit {
    pub fn gate(&self, id: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.id == id)
    }

    pub fn output_bound_to<'a>(&'a self, gate_id: &'a str) -> impl Iterator<Item = &'a Output> {
        self.outputs.iter().filter(move |o| o.gate == gate_id)
    }

    /// Layer index of every gate (inputs are layer 0, gates start at 1).
    /// Operands that are not yet defined count as layer 0.
    pub fn layer_of(&self) -> BTreeMap<String, usize> {
        let mut layers: HashMap<&str, usize> = HashMap::with_capacity(self.gates.len());
        let mut out = BTreeMap::new();
        for g in &self.gates {
            let layer = 1 + g
                .operands
                .iter()
                .map(|op| layers.get(op.as_str()).copied().unwrap_or(0))
                .max()
                .unwrap_or(0);
            layers.insert(&g.id, layer);
            out.insert(g.id.clone(), layer);
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.layer_of().values().copied().max().unwrap_or(0)
    }

    /// Gate ids whose value feeds no other gate.
    pub fn sinks(&self) -> Vec<&str> {
        let used: std::collections::HashSet<&str> = self
            .gates
            .iter()
            .flat_map(|g| g.operands.iter().map(String::as_str))
            .collect();
        self.gates
            .iter()
            .map(|g| g.id.as_str())
            .filter(|id| !used.contains(id))
            .collect()
    }
}

/// Total map from input identifier to bit.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "BTreeMap<String, u8>", into = "BTreeMap<String, u8>")]
pub struct InputAssignment(BTreeMap<String, bool>);

impl InputAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, bool)>) -> Self {
        Self(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn set(&mut self, id: impl Into<String>, bit: bool) {
        self.0.insert(id.into(), bit);
    }

    pub fn get(&self, id: &str) -> Option<bool> {
        self.0.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn flipped(&self, id: &str) -> Self {
        let mut out = self.clone();
        if let Some(v) = out.0.get_mut(id) {
            *v = !*v;
        }
        out
    }

    /// True iff the assignment is defined for exactly `inputs`.
    pub fn covers_exactly(&self, inputs: &[String]) -> bool {
        self.0.len() == inputs.len() && inputs.iter().all(|i| self.0.contains_key(i))
    }
}

impl From<BTreeMap<String, u8>> for InputAssignment {
    fn from(m: BTreeMap<String, u8>) -> Self {
        Self(m.into_iter().map(|(k, v)| (k, v != 0)).collect())
    }
}

impl From<InputAssignment> for BTreeMap<String, u8> {
    fn from(a: InputAssignment) -> Self {
        a.0.into_iter().map(|(k, v)| (k, v as u8)).collect()
    }
}

/// One benchmark question with its ground-truth answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskInstance {
    pub instance_id: String,
    pub seed: u64,
    pub circuit: Circuit,
    pub assignment: InputAssignment,
    pub flip_target: String,
    pub answer: usize,
}

impl TaskInstance {
    /// Builds an instance, computing `answer` from the circuit.
    pub fn new(
        instance_id: impl Into<String>,
        seed: u64,
        circuit: Circuit,
        assignment: InputAssignment,
        flip_target: impl Into<String>,
    ) -> Result<Self, CircuitError> {
        let flip_target = flip_target.into();
        let answer = flip_delta(&circuit, &assignment, &flip_target)?;
        Ok(Self {
            instance_id: instance_id.into(),
            seed,
            circuit,
            assignment,
            flip_target,
            answer,
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("assignment does not cover exactly the circuit inputs")]
    AssignmentMismatch,
    #[error("unknown input `{0}`")]
    UnknownInput(String),
    #[error("invalid circuit: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{0} inputs exceed the exhaustive-check limit")]
    TooManyInputs(usize),
}

/// Forward propagation. Returns a value for every input, gate and output id.
pub fn simulate(
    circuit: &Circuit,
    assignment: &InputAssignment,
) -> Result<BTreeMap<String, bool>, CircuitError> {
    if !assignment.covers_exactly(&circuit.inputs) {
        return Err(CircuitError::AssignmentMismatch);
    }
    let mut values: BTreeMap<String, bool> =
        assignment.iter().map(|(k, v)| (k.to_string(), v)).collect();
    for g in &circuit.gates {
        let mut ops = [false; 2];
        for (slot, op) in ops.iter_mut().zip(&g.operands) {
            *slot = *values.get(op).ok_or_else(|| dangling(&g.id, op))?;
        }
        values.insert(g.id.clone(), g.kind.eval(ops[0], ops[1]));
    }
    for o in &circuit.outputs {
        let v = *values.get(&o.gate).ok_or_else(|| dangling(&o.id, &o.gate))?;
        values.insert(o.id.clone(), v);
    }
    Ok(values)
}

fn dangling(at: &str, missing: &str) -> CircuitError {
    CircuitError::Invalid(vec![Violation {
        invariant: Invariant::Dangling,
        subject: format!("{at} references {missing}"),
    }])
}

/// Output values in output order.
pub fn output_values(
    circuit: &Circuit,
    assignment: &InputAssignment,
) -> Result<Vec<bool>, CircuitError> {
    let values = simulate(circuit, assignment)?;
    Ok(circuit.outputs.iter().map(|o| values[&o.id]).collect())
}

/// Number of outputs that change when `input` is inverted.
pub fn flip_delta(
    circuit: &Circuit,
    assignment: &InputAssignment,
    input: &str,
) -> Result<usize, CircuitError> {
    if !circuit.inputs.iter().any(|i| i == input) {
        return Err(CircuitError::UnknownInput(input.to_string()));
    }
    let base = output_values(circuit, assignment)?;
    let flipped = output_values(circuit, &assignment.flipped(input))?;
    Ok(base.iter().zip(&flipped).filter(|(a, b)| a != b).count())
}

/// Gates grouped by layer; layer `k` (1-based) is element `k - 1`.
pub fn layerize(circuit: &Circuit) -> Vec<Vec<String>> {
    let layer_of = circuit.layer_of();
    let depth = layer_of.values().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth];
    for g in &circuit.gates {
        layers[layer_of[&g.id] - 1].push(g.id.clone());
    }
    layers
}

/// Bit-sliced truth tables of every output over `var_order`.
///
/// Row `r` of the table assigns bit `(r >> i) & 1` to `var_order[i]`; row `r`
/// lives at bit `r % 64` of word `r / 64`. Unused high bits of a single-word
/// table (fewer than six variables) are cleared.
pub fn output_truth_tables(
    circuit: &Circuit,
    var_order: &[String],
) -> Result<Vec<Vec<u64>>, CircuitError> {
    let n = var_order.len();
    if n > MAX_EXHAUSTIVE_INPUTS {
        return Err(CircuitError::TooManyInputs(n));
    }
    if n != circuit.inputs.len() || !circuit.inputs.iter().all(|i| var_order.contains(i)) {
        return Err(CircuitError::AssignmentMismatch);
    }
    const LOW: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let rows = 1usize << n;
    let words = rows.div_ceil(64);
    let tail_mask = if rows >= 64 { !0 } else { (1u64 << rows) - 1 };

    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut table: Vec<Vec<u64>> = Vec::with_capacity(n + circuit.gates.len());
    for (i, name) in var_order.iter().enumerate() {
        index.insert(name, table.len());
        table.push(
            (0..words)
                .map(|w| {
                    if i < 6 {
                        LOW[i]
                    } else if (w >> (i - 6)) & 1 == 1 {
                        !0
                    } else {
                        0
                    }
                })
                .collect(),
        );
    }
    for g in &circuit.gates {
        let mut ops = [0usize; 2];
        for (slot, op) in ops.iter_mut().zip(&g.operands) {
            *slot = *index.get(op.as_str()).ok_or_else(|| dangling(&g.id, op))?;
        }
        if g.operands.len() != g.kind.arity() {
            return Err(CircuitError::Invalid(vec![Violation {
                invariant: Invariant::Arity,
                subject: g.id.clone(),
            }]));
        }
        let row: Vec<u64> = (0..words)
            .map(|w| {
                let b = if g.kind.arity() == 2 { table[ops[1]][w] } else { 0 };
                g.kind.eval_word(table[ops[0]][w], b)
            })
            .collect();
        index.insert(&g.id, table.len());
        table.push(row);
    }
    circuit
        .outputs
        .iter()
        .map(|o| {
            let idx = *index.get(o.gate.as_str()).ok_or_else(|| dangling(&o.id, &o.gate))?;
            let mut t = table[idx].clone();
            if let Some(last) = t.last_mut() {
                *last &= tail_mask;
            }
            Ok(t)
        })
        .collect()
}

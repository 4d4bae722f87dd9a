//! Incremental reconstruction of a task from parsed text.


use super::ReprError;
use crate::circuit::{
    simulate, validate, Circuit, Gate, GateType, InputAssignment, Invariant, Output, TaskInstance,
};

#[derive(Debug, Default)]
pub(crate) struct Builder {
    inputs: Vec<String>,
    assignment: InputAssignment,
    gates: Vec<Gate>,
    outputs: Vec<Output>,
    /// Signal values stated by trace-style encodings; checked against simulation.
    stated: Vec<(String, bool)>,
    /// Tree encodings may drop inputs that only feed dead logic.
    tolerate_unused_inputs: bool,
    /// (gate id, layer) claims from layered encodings.
    layer_claims: Vec<(String, usize)>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tree_form() -> Self {
        Self { tolerate_unused_inputs: true, ..Self::default() }
    }

    pub fn input(&mut self, id: &str, value: bool) -> Result<(), ReprError> {
        if self.inputs.iter().any(|i| i == id) {
            return Err(ReprError::Semantic(format!("input {id} declared twice")));
        }
        self.inputs.push(id.to_string());
        self.assignment.set(id, value);
        Ok(())
    }

    pub fn declare_input(&mut self, id: &str) -> Result<(), ReprError> {
        if self.inputs.iter().any(|i| i == id) {
            return Err(ReprError::Semantic(format!("input {id} declared twice")));
        }
        self.inputs.push(id.to_string());
        Ok(())
    }

    pub fn assign(&mut self, id: &str, value: bool) -> Result<(), ReprError> {
        if !self.inputs.iter().any(|i| i == id) {
            return Err(ReprError::Semantic(format!("value given for undeclared input {id}")));
        }
        if self.assignment.get(id).is_some() {
            return Err(ReprError::Semantic(format!("input {id} assigned twice")));
        }
        self.assignment.set(id, value);
        Ok(())
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&mut self, id: &str, kind: GateType, operands: Vec<String>) {
        self.gates.push(Gate { id: id.to_string(), kind, operands });
    }

    pub fn output(&mut self, id: &str, gate: &str) {
        self.outputs.push(Output { id: id.to_string(), gate: gate.to_string() });
    }

    pub fn state(&mut self, id: &str, value: bool) {
        self.stated.push((id.to_string(), value));
    }

    pub fn claim_layer(&mut self, gate: &str, layer: usize) {
        self.layer_claims.push((gate.to_string(), layer));
    }

    pub fn finish(self, flip: String) -> Result<TaskInstance, ReprError> {
        let circuit = Circuit { inputs: self.inputs, gates: self.gates, outputs: self.outputs };
        let violations: Vec<_> = validate(&circuit)
            .into_iter()
            .filter(|v| !(self.tolerate_unused_inputs && v.invariant == Invariant::InputUsed))
            .collect();
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(ReprError::Semantic(msg.join("; ")));
        }
        if !self.assignment.covers_exactly(&circuit.inputs) {
            return Err(ReprError::Semantic(String::from("input values do not cover the inputs")));
        }
        if !self.layer_claims.is_empty() {
            let layers = circuit.layer_of();
            for (gate, claimed) in &self.layer_claims {
                if layers.get(gate) != Some(claimed) {
                    return Err(ReprError::Semantic(format!("{gate} is not in layer {claimed}")));
                }
            }
        }
        if !self.stated.is_empty() {
            let values = simulate(&circuit, &self.assignment)?;
            for (id, v) in &self.stated {
                match values.get(id) {
                    Some(actual) if actual == v => {}
                    Some(_) => return Err(ReprError::Semantic(format!("stated value of {id} is wrong"))),
                    None => return Err(ReprError::Semantic(format!("value stated for unknown signal {id}"))),
                }
            }
        }
        Ok(TaskInstance::new("", 0, circuit, self.assignment, flip)?)
    }
}

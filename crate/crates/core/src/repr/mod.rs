//! The fifteen surface languages.
//!
//! Every kind renders a [`TaskInstance`] into a rigid, fully parseable text,
//! records the byte spans of its logical tokens (gate ids, operators, input
//! and output ids), and parses its own text back into a task. All kinds end
//! with the same question line.

mod builder;
mod expr;
mod layered;
pub(crate) mod lexer;
mod petri;
mod prose;
mod structural;
mod tree;
mod writer;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{output_truth_tables, CircuitError, TaskInstance, MAX_EXHAUSTIVE_INPUTS};
use lexer::Cursor;
pub(crate) use writer::TextWriter;

/// Version of the fifteen grammars; bumped whenever any surface form changes.
pub const GRAMMAR_VERSION: &str = "1.0";

/// Upper bound on fully expanded tree/expression encodings.
pub const EXPANSION_CAP: usize = 20_000;

pub const QUESTION_TAIL: &str =
    "is flipped, how many outputs change? Respond with \"ANSWER: <integer>\" as the last line.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum RepresentationKind {
    NaturalLanguage,
    Netlist,
    GraphAdjacency,
    Matrix,
    LispTree,
    Dataflow,
    PartialTruthTable,
    CompactGate,
    ReversePolish,
    DependencyChain,
    LayeredExecutionPlan,
    SignalPropagationTrace,
    ConstraintSatisfaction,
    CanonicalBoolean,
    PetriNet,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 15] = [
        RepresentationKind::NaturalLanguage,
        RepresentationKind::Netlist,
        RepresentationKind::GraphAdjacency,
        RepresentationKind::Matrix,
        RepresentationKind::LispTree,
        RepresentationKind::Dataflow,
        RepresentationKind::PartialTruthTable,
        RepresentationKind::CompactGate,
        RepresentationKind::ReversePolish,
        RepresentationKind::DependencyChain,
        RepresentationKind::LayeredExecutionPlan,
        RepresentationKind::SignalPropagationTrace,
        RepresentationKind::ConstraintSatisfaction,
        RepresentationKind::CanonicalBoolean,
        RepresentationKind::PetriNet,
    ];

    pub fn tag(self) -> &'static str {
        use RepresentationKind::*;
        match self {
            NaturalLanguage => "nl",
            Netlist => "netlist",
            GraphAdjacency => "graph",
            Matrix => "matrix",
            LispTree => "lisp",
            Dataflow => "dataflow",
            PartialTruthTable => "ptt",
            CompactGate => "cgn",
            ReversePolish => "rpn",
            DependencyChain => "dcl",
            LayeredExecutionPlan => "lep",
            SignalPropagationTrace => "spt",
            ConstraintSatisfaction => "csf",
            CanonicalBoolean => "cbe",
            PetriNet => "pnn",
        }
    }

    pub fn display_name(self) -> &'static str {
        use RepresentationKind::*;
        match self {
            NaturalLanguage => "Natural Language",
            Netlist => "Netlist Language",
            GraphAdjacency => "Graph Adjacency Notation",
            Matrix => "Matrix Representation",
            LispTree => "Lisp Tree Notation",
            Dataflow => "Dataflow Language",
            PartialTruthTable => "Partial Truth Table",
            CompactGate => "Compact Gate Notation",
            ReversePolish => "Reverse Polish Notation",
            DependencyChain => "Dependency Chain Language",
            LayeredExecutionPlan => "Layered Execution Plan",
            SignalPropagationTrace => "Signal Propagation Trace",
            ConstraintSatisfaction => "Constraint Satisfaction Format",
            CanonicalBoolean => "Canonical Boolean Expression",
            PetriNet => "Petri Net Notation",
        }
    }

    /// Position in [`RepresentationKind::ALL`].
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }

    /// Parses `all` or a comma-separated list of tags.
    pub fn parse_list(s: &str) -> Result<Vec<RepresentationKind>, ReprError> {
        if s.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        let mut out: Vec<RepresentationKind> = Vec::new();
        for tag in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let k: RepresentationKind = tag.parse()?;
            if !out.contains(&k) {
                out.push(k);
            }
        }
        if out.is_empty() {
            return Err(ReprError::UnknownKind(s.to_string()));
        }
        Ok(out)
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RepresentationKind {
    type Err = ReprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| ReprError::UnknownKind(s.to_string()))
    }
}

impl From<RepresentationKind> for &'static str {
    fn from(k: RepresentationKind) -> Self {
        k.tag()
    }
}

impl TryFrom<String> for RepresentationKind {
    type Error = ReprError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanClass {
    GateId,
    Operator,
    InputId,
    OutputId,
}

/// Byte range `[start, end)` of one logical token in the rendered text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalSpan {
    pub start: usize,
    pub end: usize,
    pub class: SpanClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedQuestion {
    pub instance_id: String,
    pub kind: RepresentationKind,
    pub text: String,
    pub critical_spans: Vec<CriticalSpan>,
}

impl EncodedQuestion {
    /// Spans shifted by `offset` bytes, e.g. after a prompt preamble is prepended.
    pub fn spans_shifted(&self, offset: usize) -> Vec<CriticalSpan> {
        self.critical_spans
            .iter()
            .map(|s| CriticalSpan { start: s.start + offset, end: s.end + offset, class: s.class })
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReprError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("{kind} encoding is {chars} characters, above the {cap} cap", cap = EXPANSION_CAP)]
    ExpansionTooLarge { kind: RepresentationKind, chars: usize },
    #[error("{0} inputs exceed the exhaustive-check limit")]
    TooManyInputs(usize),
    #[error("unknown representation `{0}`")]
    UnknownKind(String),
}

impl From<CircuitError> for ReprError {
    fn from(e: CircuitError) -> Self {
        match e {
            CircuitError::TooManyInputs(n) => ReprError::TooManyInputs(n),
            other => ReprError::Semantic(other.to_string()),
        }
    }
}

/// Span class of every signal id in a circuit.
pub(crate) struct Roles<'a>(HashMap<&'a str, SpanClass>);

impl<'a> Roles<'a> {
    pub fn of(instance: &'a TaskInstance) -> Self {
        let c = &instance.circuit;
        let mut m = HashMap::new();
        for i in &c.inputs {
            m.insert(i.as_str(), SpanClass::InputId);
        }
        for g in &c.gates {
            m.insert(g.id.as_str(), SpanClass::GateId);
        }
        for o in &c.outputs {
            m.insert(o.id.as_str(), SpanClass::OutputId);
        }
        Self(m)
    }

    pub fn class(&self, id: &str) -> SpanClass {
        self.0.get(id).copied().unwrap_or(SpanClass::InputId)
    }
}

pub(crate) fn write_question(w: &mut TextWriter, flip: &str) {
    w.raw("QUESTION: If input ").input(flip).raw(" ").raw(QUESTION_TAIL).raw("\n");
}

pub(crate) fn parse_question(cur: &mut Cursor<'_>) -> Result<String, ReprError> {
    cur.phrase("QUESTION: If input")?;
    let flip = cur.ident("flip input")?.to_string();
    cur.phrase(QUESTION_TAIL)?;
    cur.expect_end()?;
    Ok(flip)
}

pub fn encode(instance: &TaskInstance, kind: RepresentationKind) -> Result<EncodedQuestion, ReprError> {
    use RepresentationKind::*;
    let roles = Roles::of(instance);
    let mut w = TextWriter::new(&roles);
    match kind {
        NaturalLanguage => prose::encode(instance, &mut w),
        Netlist => structural::encode_netlist(instance, &mut w),
        GraphAdjacency => structural::encode_graph(instance, &mut w),
        Matrix => structural::encode_matrix(instance, &mut w),
        CompactGate => structural::encode_cgn(instance, &mut w),
        DependencyChain => structural::encode_dcl(instance, &mut w),
        ConstraintSatisfaction => structural::encode_csf(instance, &mut w),
        Dataflow => layered::encode_dataflow(instance, &mut w),
        PartialTruthTable => layered::encode_ptt(instance, &mut w)?,
        LayeredExecutionPlan => layered::encode_lep(instance, &mut w),
        SignalPropagationTrace => layered::encode_spt(instance, &mut w)?,
        LispTree => tree::encode_lisp(instance, &mut w)?,
        ReversePolish => tree::encode_rpn(instance, &mut w)?,
        CanonicalBoolean => tree::encode_cbe(instance, &mut w)?,
        PetriNet => petri::encode(instance, &mut w),
    }
    write_question(&mut w, &instance.flip_target);
    let (text, critical_spans) = w.finish();
    if matches!(kind, LispTree | ReversePolish | CanonicalBoolean) && text.chars().count() > EXPANSION_CAP {
        return Err(ReprError::ExpansionTooLarge { kind, chars: text.chars().count() });
    }
    Ok(EncodedQuestion { instance_id: instance.instance_id.clone(), kind, text, critical_spans })
}

/// Parses text produced by [`encode`]. The answer is recomputed from the
/// reconstructed circuit; `instance_id` is empty and `seed` is zero because
/// the text does not carry them.
pub fn parse(text: &str, kind: RepresentationKind) -> Result<TaskInstance, ReprError> {
    use RepresentationKind::*;
    let mut cur = Cursor::new(text);
    let builder = match kind {
        NaturalLanguage => prose::parse(&mut cur)?,
        Netlist => structural::parse_netlist(&mut cur)?,
        GraphAdjacency => structural::parse_graph(&mut cur)?,
        Matrix => structural::parse_matrix(&mut cur)?,
        CompactGate => structural::parse_cgn(&mut cur)?,
        DependencyChain => structural::parse_dcl(&mut cur)?,
        ConstraintSatisfaction => structural::parse_csf(&mut cur)?,
        Dataflow => layered::parse_dataflow(&mut cur)?,
        PartialTruthTable => layered::parse_ptt(&mut cur)?,
        LayeredExecutionPlan => layered::parse_lep(&mut cur)?,
        SignalPropagationTrace => layered::parse_spt(&mut cur)?,
        LispTree => tree::parse_lisp(&mut cur)?,
        ReversePolish => tree::parse_rpn(&mut cur)?,
        CanonicalBoolean => tree::parse_cbe(&mut cur)?,
        PetriNet => petri::parse(&mut cur)?,
    };
    let flip = parse_question(&mut cur)?;
    builder.finish(flip)
}

/// Same inputs, assignment and flip target, and the same truth function at
/// every output position.
pub fn semantic_equal(a: &TaskInstance, b: &TaskInstance) -> Result<bool, ReprError> {
    let n = a.circuit.inputs.len().max(b.circuit.inputs.len());
    if n > MAX_EXHAUSTIVE_INPUTS {
        return Err(ReprError::TooManyInputs(n));
    }
    let mut ia = a.circuit.inputs.clone();
    let mut ib = b.circuit.inputs.clone();
    ia.sort();
    ib.sort();
    if ia != ib
        || a.assignment != b.assignment
        || a.flip_target != b.flip_target
        || a.circuit.outputs.len() != b.circuit.outputs.len()
    {
        return Ok(false);
    }
    let order = &a.circuit.inputs;
    Ok(output_truth_tables(&a.circuit, order)? == output_truth_tables(&b.circuit, order)?)
}

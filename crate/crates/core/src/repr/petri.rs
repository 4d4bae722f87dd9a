//! Petri-net encoding: two places per signal (`S:0`, `S:1`), one transition
//! per gate, and an initial marking carrying the input assignment.

use super::builder::Builder;
use super::lexer::Cursor;
use super::structural::gate_name;
use super::{ReprError, TextWriter};
use crate::circuit::TaskInstance;

const PREAMBLE: &str = "PETRI NET\nsemantics: each signal s has two places s:0 and s:1, and exactly one of them holds a token once s is known. a transition fires when every signal in its input set is marked, and it puts one token on the place of its output signal selected by its gate type. an output copies the marking of its source signal.";

pub(crate) fn encode(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    w.raw(PREAMBLE).raw("\nPLACES:");
    let signals = c
        .inputs
        .iter()
        .chain(c.gates.iter().map(|g| &g.id))
        .chain(c.outputs.iter().map(|o| &o.id));
    for s in signals {
        w.raw(" ").sig(s).raw(":0 ").sig(s).raw(":1");
    }
    w.raw("\n");
    for (t, g) in c.gates.iter().enumerate() {
        w.raw("TRANSITION T").num(t + 1).raw(" ").op(g.kind.name()).raw(" IN ");
        w.sig_list(&g.operands, " ").raw(" OUT ").sig(&g.id).raw("\n");
    }
    for o in &c.outputs {
        w.raw("OUTPUT ").sig(&o.id).raw(" COPIES ").sig(&o.gate).raw("\n");
    }
    w.raw("MARKING:");
    for i in &c.inputs {
        w.raw(" ").sig(i).raw(":").bit(inst.assignment.get(i).unwrap_or(false));
    }
    w.raw("\n");
}

pub(crate) fn parse(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase(PREAMBLE)?;
    cur.expect_eol()?;
    cur.phrase("PLACES:")?;
    let mut places: Vec<String> = Vec::new();
    while !cur.at_eol() {
        let s = cur.ident("signal id")?.to_string();
        cur.phrase(":0")?;
        let again = cur.ident("signal id")?;
        cur.phrase(":1")?;
        if again != s {
            return Err(ReprError::Semantic(format!("place {again}:1 does not pair with {s}:0")));
        }
        places.push(s);
    }
    cur.expect_eol()?;
    let mut transition = 0;
    while cur.eat_word("TRANSITION") {
        transition += 1;
        cur.phrase(&format!("T{transition}"))?;
        let kind = gate_name(cur)?;
        cur.phrase("IN")?;
        let mut ops = Vec::new();
        while !cur.at_word("OUT") {
            ops.push(cur.ident("input place")?.to_string());
        }
        cur.phrase("OUT")?;
        let id = cur.ident("gate id")?;
        cur.expect_eol()?;
        b.gate(id, kind, ops);
    }
    let mut outputs = Vec::new();
    while cur.eat_word("OUTPUT") {
        let id = cur.ident("output id")?;
        outputs.push(id.to_string());
        cur.phrase("COPIES")?;
        let gate = cur.ident("gate id")?;
        cur.expect_eol()?;
        b.output(id, gate);
    }
    cur.phrase("MARKING:")?;
    while !cur.at_eol() {
        let id = cur.ident("input id")?.to_string();
        cur.sym(":")?;
        let v = cur.bit()?;
        b.input(&id, v)?;
    }
    cur.expect_eol()?;
    let declared: Vec<String> = b
        .inputs()
        .iter()
        .cloned()
        .chain(b.gates().iter().map(|g| g.id.clone()))
        .chain(outputs)
        .collect();
    if places != declared {
        return Err(ReprError::Semantic(String::from("PLACES do not match the declared signals")));
    }
    Ok(b)
}

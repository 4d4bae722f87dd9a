//! Natural-language encoding: one fixed sentence template per gate type.

use super::builder::Builder;
use super::lexer::Cursor;
use super::structural::gate_name;
use super::{ReprError, TextWriter};
use crate::circuit::{GateType, TaskInstance};

const CLOSING: &str = "The gates are evaluated one after another in the order listed, and every gate uses the current values of the signals it receives.";

fn article(kind: GateType) -> &'static str {
    match kind {
        GateType::And | GateType::Or | GateType::Xor => "an",
        GateType::Not | GateType::Nand | GateType::Nor => "a",
    }
}

fn behaviour(kind: GateType) -> &'static str {
    match kind {
        GateType::And => "it produces 1 only when both of its inputs are 1; otherwise it produces 0.",
        GateType::Or => "it produces 1 when at least one of its inputs is 1; otherwise it produces 0.",
        GateType::Not => "it produces the opposite of its single input value, turning 1 into 0 and 0 into 1.",
        GateType::Xor => "it produces 1 when exactly one of its inputs is 1; otherwise it produces 0.",
        GateType::Nand => "it produces 0 only when both of its inputs are 1; otherwise it produces 1.",
        GateType::Nor => "it produces 0 when at least one of its inputs is 1; otherwise it produces 1.",
    }
}

pub(crate) fn encode(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    w.raw("The circuit has ")
        .num(c.inputs.len())
        .raw(" inputs, ")
        .num(c.gates.len())
        .raw(" logic gates and ")
        .num(c.outputs.len())
        .raw(" outputs.\n");
    for i in &c.inputs {
        w.raw("Input ").sig(i).raw(" is set to ").bit(inst.assignment.get(i).unwrap_or(false)).raw(".\n");
    }
    for g in &c.gates {
        w.raw("Gate ").sig(&g.id).raw(" is ").raw(article(g.kind)).raw(" ").op(g.kind.name());
        w.raw(" gate. It receives signal ");
        w.sig_list(&g.operands, " and signal ");
        w.raw(", and ").raw(behaviour(g.kind)).raw("\n");
    }
    for o in &c.outputs {
        w.raw("Output ").sig(&o.id).raw(" takes its value from gate ").sig(&o.gate).raw(".\n");
    }
    w.raw(CLOSING).raw("\n");
}

pub(crate) fn parse(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase("The circuit has")?;
    let n_inputs = cur.number("input count")?;
    cur.phrase("inputs,")?;
    let n_gates = cur.number("gate count")?;
    cur.phrase("logic gates and")?;
    let n_outputs = cur.number("output count")?;
    cur.phrase("outputs.")?;
    cur.expect_eol()?;
    for _ in 0..n_inputs {
        cur.phrase("Input")?;
        let id = cur.ident("input id")?;
        cur.phrase("is set to")?;
        let v = cur.bit()?;
        cur.sym(".")?;
        cur.expect_eol()?;
        b.input(id, v)?;
    }
    for _ in 0..n_gates {
        cur.phrase("Gate")?;
        let id = cur.ident("gate id")?;
        cur.phrase("is")?;
        if !cur.eat_word("an") && !cur.eat_word("a") {
            return Err(cur.error("`a` or `an`"));
        }
        let kind = gate_name(cur)?;
        cur.phrase("gate. It receives signal")?;
        let mut ops = vec![cur.ident("operand")?.to_string()];
        while cur.eat_phrase("and signal") {
            ops.push(cur.ident("operand")?.to_string());
        }
        cur.phrase(", and")?;
        cur.phrase(behaviour(kind))?;
        cur.expect_eol()?;
        b.gate(id, kind, ops);
    }
    for _ in 0..n_outputs {
        cur.phrase("Output")?;
        let id = cur.ident("output id")?;
        cur.phrase("takes its value from gate")?;
        let gate = cur.ident("gate id")?;
        cur.sym(".")?;
        cur.expect_eol()?;
        b.output(id, gate);
    }
    cur.phrase(CLOSING)?;
    cur.expect_eol()?;
    Ok(b)
}

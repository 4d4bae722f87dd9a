//! Layer- and step-oriented encodings: dataflow pipelines, partial truth
//! tables, layered execution plans and signal propagation traces.

use std::collections::BTreeMap;

use super::builder::Builder;
use super::lexer::{Cursor, Tok};
use super::structural::{gate_name, ident_list, inputs_from_pairs, parse_call, value_pairs, write_call, write_values};
use super::{ReprError, TextWriter};
use crate::circuit::{layerize, simulate, TaskInstance};

fn bindings(cur: &mut Cursor<'_>, sep: &str) -> Result<Vec<(String, String)>, ReprError> {
    let mut out = Vec::new();
    loop {
        let id = cur.ident("output id")?.to_string();
        cur.sym("=")?;
        out.push((id, cur.ident("gate id")?.to_string()));
        if !cur.eat_sym(sep) {
            return Ok(out);
        }
    }
}

fn write_bindings(w: &mut TextWriter, inst: &TaskInstance) {
    w.raw("OUTPUTS: ");
    for (i, o) in inst.circuit.outputs.iter().enumerate() {
        if i > 0 {
            w.raw(", ");
        }
        w.sig(&o.id).raw("=").sig(&o.gate);
    }
    w.raw("\n");
}

fn expect_next_step(cur: &mut Cursor<'_>, prev: &mut usize) -> Result<usize, ReprError> {
    let k = cur.number("step number")?;
    if k != *prev + 1 {
        return Err(ReprError::Semantic(format!("step {k} follows step {prev}")));
    }
    *prev = k;
    Ok(k)
}

// ---- dataflow ------------------------------------------------------------

pub(crate) fn encode_dataflow(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    w.raw("SOURCE ");
    write_values(w, inst, ", ");
    w.raw("\n");
    for (k, layer) in layerize(c).iter().enumerate() {
        w.raw("STAGE ").num(k + 1).raw(": ");
        for (i, id) in layer.iter().enumerate() {
            let g = c.gate(id).expect("layerize returns known gates");
            if i > 0 {
                w.raw("; ");
            }
            w.raw("[").sig_list(&g.operands, ", ").raw("] |> ").op(g.kind.name()).raw(" |> ").sig(id);
        }
        w.raw("\n");
    }
    for o in &c.outputs {
        w.raw("SINK ").sig(&o.gate).raw(" |> ").sig(&o.id).raw("\n");
    }
}

pub(crate) fn parse_dataflow(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase("SOURCE")?;
    inputs_from_pairs(&mut b, value_pairs(cur, ",")?)?;
    cur.expect_eol()?;
    let mut stage = 0;
    while cur.eat_word("STAGE") {
        let k = expect_next_step(cur, &mut stage)?;
        cur.sym(":")?;
        loop {
            cur.sym("[")?;
            let ops = ident_list(cur, ",", "operand")?;
            cur.sym("]")?;
            cur.phrase("|>")?;
            let kind = gate_name(cur)?;
            cur.phrase("|>")?;
            let id = cur.ident("gate id")?;
            b.gate(id, kind, ops);
            b.claim_layer(id, k);
            if !cur.eat_sym(";") {
                break;
            }
        }
        cur.expect_eol()?;
    }
    while cur.eat_word("SINK") {
        let gate = cur.ident("gate id")?;
        cur.phrase("|>")?;
        let id = cur.ident("output id")?;
        cur.expect_eol()?;
        b.output(id, gate);
    }
    Ok(b)
}

// ---- partial truth table -------------------------------------------------

pub(crate) fn encode_ptt(inst: &TaskInstance, w: &mut TextWriter) -> Result<(), ReprError> {
    let c = &inst.circuit;
    let values = simulate(c, &inst.assignment)?;
    w.raw("INPUTS: ");
    write_values(w, inst, ", ");
    w.raw("\nSTEP | GATE | TYPE | OPERANDS | RESULT\n");
    for (step, g) in c.gates.iter().enumerate() {
        w.num(step + 1).raw(" | ").sig(&g.id).raw(" | ").op(g.kind.name()).raw(" | ");
        for (i, op) in g.operands.iter().enumerate() {
            if i > 0 {
                w.raw(", ");
            }
            w.sig(op).raw("=").bit(values[op]);
        }
        w.raw(" | ").bit(values[&g.id]).raw("\n");
    }
    write_bindings(w, inst);
    Ok(())
}

pub(crate) fn parse_ptt(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase("INPUTS:")?;
    inputs_from_pairs(&mut b, value_pairs(cur, ",")?)?;
    cur.expect_eol()?;
    cur.phrase("STEP | GATE | TYPE | OPERANDS | RESULT")?;
    cur.expect_eol()?;
    let mut step = 0;
    while matches!(cur.peek(), Some(Tok::Num(_))) {
        expect_next_step(cur, &mut step)?;
        cur.sym("|")?;
        let id = cur.ident("gate id")?;
        cur.sym("|")?;
        let kind = gate_name(cur)?;
        cur.sym("|")?;
        let pairs = value_pairs(cur, ",")?;
        cur.sym("|")?;
        let result = cur.bit()?;
        cur.expect_eol()?;
        let ops = pairs.iter().map(|(id, _)| id.clone()).collect();
        for (op, v) in &pairs {
            b.state(op, *v);
        }
        b.state(id, result);
        b.gate(id, kind, ops);
    }
    cur.phrase("OUTPUTS:")?;
    for (o, g) in bindings(cur, ",")? {
        b.output(&o, &g);
    }
    cur.expect_eol()?;
    Ok(b)
}

// ---- layered execution plan ----------------------------------------------

pub(crate) fn encode_lep(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    w.raw("LAYER 0: ");
    write_values(w, inst, ", ");
    w.raw("\n");
    for (k, layer) in layerize(c).iter().enumerate() {
        w.raw("LAYER ").num(k + 1).raw(":\n");
        for id in layer {
            let g = c.gate(id).expect("layerize returns known gates");
            w.sig(id).raw(" = ");
            write_call(w, g.kind, &g.operands);
            w.raw("\n");
        }
    }
    write_bindings(w, inst);
}

pub(crate) fn parse_lep(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase("LAYER 0:")?;
    inputs_from_pairs(&mut b, value_pairs(cur, ",")?)?;
    cur.expect_eol()?;
    let mut layer = 0;
    while cur.eat_word("LAYER") {
        let k = expect_next_step(cur, &mut layer)?;
        cur.sym(":")?;
        cur.expect_eol()?;
        while !cur.at_word("LAYER") && !cur.at_word("OUTPUTS") {
            let id = cur.ident("gate id")?;
            cur.sym("=")?;
            let (kind, ops) = parse_call(cur)?;
            cur.expect_eol()?;
            b.gate(id, kind, ops);
            b.claim_layer(id, k);
        }
    }
    cur.phrase("OUTPUTS:")?;
    for (o, g) in bindings(cur, ",")? {
        b.output(&o, &g);
    }
    cur.expect_eol()?;
    Ok(b)
}

// ---- signal propagation trace --------------------------------------------

pub(crate) fn encode_spt(inst: &TaskInstance, w: &mut TextWriter) -> Result<(), ReprError> {
    let c = &inst.circuit;
    let values = simulate(c, &inst.assignment)?;
    for g in &c.gates {
        w.raw("GATE ").sig(&g.id).raw(" = ");
        write_call(w, g.kind, &g.operands);
        w.raw("\n");
    }
    write_bindings(w, inst);
    w.raw("t=0: ");
    write_values(w, inst, " ");
    w.raw("\n");
    for (k, layer) in layerize(c).iter().enumerate() {
        w.raw("t=").num(k + 1).raw(":");
        for id in layer {
            w.raw(" ").sig(id).raw("=").bit(values[id]);
            for o in c.output_bound_to(id) {
                w.raw(" ").sig(&o.id).raw("=").bit(values[&o.id]);
            }
        }
        w.raw("\n");
    }
    Ok(())
}

pub(crate) fn parse_spt(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    while cur.eat_word("GATE") {
        let id = cur.ident("gate id")?;
        cur.sym("=")?;
        let (kind, ops) = parse_call(cur)?;
        cur.expect_eol()?;
        b.gate(id, kind, ops);
    }
    cur.phrase("OUTPUTS:")?;
    let outs = bindings(cur, ",")?;
    cur.expect_eol()?;
    for (o, g) in &outs {
        b.output(o, g);
    }
    cur.phrase("t = 0 :")?;
    inputs_from_pairs(&mut b, value_pairs(cur, "")?)?;
    cur.expect_eol()?;
    let gate_ids: BTreeMap<String, ()> = b.gates().iter().map(|g| (g.id.clone(), ())).collect();
    let mut step = 0;
    while cur.eat_word("t") {
        cur.sym("=")?;
        let k = expect_next_step(cur, &mut step)?;
        cur.sym(":")?;
        for (id, v) in value_pairs(cur, "")? {
            if gate_ids.contains_key(&id) {
                b.claim_layer(&id, k);
            }
            b.state(&id, v);
        }
        cur.expect_eol()?;
    }
    Ok(b)
}

//! Declaration-style encodings: netlist, graph adjacency, matrix, compact gate
//! notation, dependency chains and constraint satisfaction.

use std::collections::HashMap;

use super::builder::Builder;
use super::lexer::Cursor;
use super::{ReprError, TextWriter};
use crate::circuit::{GateType, TaskInstance};

pub(crate) fn ident_list(cur: &mut Cursor<'_>, sep: &str, what: &str) -> Result<Vec<String>, ReprError> {
    let mut out = vec![cur.ident(what)?.to_string()];
    while cur.eat_sym(sep) {
        out.push(cur.ident(what)?.to_string());
    }
    Ok(out)
}

/// `ID=bit` pairs separated by `sep` (an empty `sep` means whitespace).
pub(crate) fn value_pairs(cur: &mut Cursor<'_>, sep: &str) -> Result<Vec<(String, bool)>, ReprError> {
    let mut out = Vec::new();
    loop {
        let id = cur.ident("signal id")?.to_string();
        cur.sym("=")?;
        out.push((id, cur.bit()?));
        let more = if sep.is_empty() { !cur.at_eol() } else { cur.eat_sym(sep) };
        if !more {
            return Ok(out);
        }
    }
}

pub(crate) fn gate_name(cur: &mut Cursor<'_>) -> Result<GateType, ReprError> {
    match cur.peek() {
        Some(super::lexer::Tok::Ident(s)) if GateType::from_name(s).is_some() => {
            cur.any("gate type")?;
            Ok(GateType::from_name(s).unwrap())
        }
        _ => Err(cur.error("gate type (AND, OR, NOT, XOR, NAND, NOR)")),
    }
}

pub(crate) fn write_values(w: &mut TextWriter, inst: &TaskInstance, sep: &str) {
    for (i, id) in inst.circuit.inputs.iter().enumerate() {
        if i > 0 {
            w.raw(sep);
        }
        w.sig(id).raw("=").bit(inst.assignment.get(id).unwrap_or(false));
    }
}

pub(crate) fn inputs_from_pairs(b: &mut Builder, pairs: Vec<(String, bool)>) -> Result<(), ReprError> {
    for (id, v) in pairs {
        b.input(&id, v)?;
    }
    Ok(())
}

/// `T(op, op)` with full gate names.
pub(crate) fn write_call(w: &mut TextWriter, kind: GateType, operands: &[String]) {
    w.op(kind.name()).raw("(").sig_list(operands, ", ").raw(")");
}

pub(crate) fn parse_call(cur: &mut Cursor<'_>) -> Result<(GateType, Vec<String>), ReprError> {
    let kind = gate_name(cur)?;
    cur.sym("(")?;
    let ops = ident_list(cur, ",", "operand")?;
    cur.sym(")")?;
    Ok((kind, ops))
}

// ---- netlist -------------------------------------------------------------

pub(crate) fn encode_netlist(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    w.raw("MODULE circuit\nINPUT ").sig_list(&c.inputs, ", ").raw("\nWIRE ");
    let wires: Vec<&str> = c.gates.iter().map(|g| g.id.as_str()).collect();
    w.sig_list(&wires, ", ").raw("\n");
    for g in &c.gates {
        w.raw("GATE ").op(g.kind.name()).raw(" ").sig(&g.id).raw(" (");
        w.sig_list(&g.operands, ", ").raw(")\n");
    }
    for o in &c.outputs {
        w.raw("OUTPUT ").sig(&o.id).raw(" = ").sig(&o.gate).raw("\n");
    }
    w.raw("ENDMODULE\nSTIMULUS ");
    write_values(w, inst, ", ");
    w.raw("\n");
}

pub(crate) fn parse_netlist(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase("MODULE circuit")?;
    cur.expect_eol()?;
    cur.phrase("INPUT")?;
    for id in ident_list(cur, ",", "input id")? {
        b.declare_input(&id)?;
    }
    cur.expect_eol()?;
    cur.phrase("WIRE")?;
    let wires = ident_list(cur, ",", "wire id")?;
    cur.expect_eol()?;
    while cur.eat_word("GATE") {
        let kind = gate_name(cur)?;
        let id = cur.ident("gate id")?;
        cur.sym("(")?;
        let ops = ident_list(cur, ",", "operand")?;
        cur.sym(")")?;
        cur.expect_eol()?;
        b.gate(id, kind, ops);
    }
    while cur.eat_word("OUTPUT") {
        let id = cur.ident("output id")?;
        cur.sym("=")?;
        let gate = cur.ident("gate id")?;
        cur.expect_eol()?;
        b.output(id, gate);
    }
    cur.phrase("ENDMODULE")?;
    cur.expect_eol()?;
    cur.phrase("STIMULUS")?;
    for (id, v) in value_pairs(cur, ",")? {
        b.assign(&id, v)?;
    }
    cur.expect_eol()?;
    let declared: Vec<&str> = b.gates().iter().map(|g| g.id.as_str()).collect();
    if wires.iter().map(String::as_str).ne(declared.iter().copied()) {
        return Err(ReprError::Semantic(String::from("WIRE list does not match the gates")));
    }
    Ok(b)
}

// ---- graph adjacency -----------------------------------------------------

pub(crate) fn encode_graph(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    w.raw("NODES:\n");
    for i in &c.inputs {
        w.sig(i).raw(" [input, value=").bit(inst.assignment.get(i).unwrap_or(false)).raw("]\n");
    }
    for g in &c.gates {
        w.sig(&g.id).raw(" [gate, ").op(g.kind.name()).raw("]\n");
    }
    for o in &c.outputs {
        w.sig(&o.id).raw(" [output]\n");
    }
    w.raw("EDGES:\n");
    let sources = c.inputs.iter().chain(c.gates.iter().map(|g| &g.id));
    for src in sources {
        let mut succ: Vec<&str> = c
            .gates
            .iter()
            .filter(|g| g.operands.iter().any(|o| o == src))
            .map(|g| g.id.as_str())
            .collect();
        succ.extend(c.output_bound_to(src).map(|o| o.id.as_str()));
        if succ.is_empty() {
            continue;
        }
        w.sig(src).raw(" -> ").sig_list(&succ, ", ").raw("\n");
    }
}

enum Node {
    Input,
    Gate(GateType),
    Output,
}

pub(crate) fn parse_graph(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase("NODES:")?;
    cur.expect_eol()?;
    let mut nodes: Vec<(String, Node)> = Vec::new();
    while !cur.at_word("EDGES") {
        let id = cur.ident("node id")?.to_string();
        cur.sym("[")?;
        let node = if cur.eat_word("input") {
            cur.phrase(", value =")?;
            let v = cur.bit()?;
            b.input(&id, v)?;
            Node::Input
        } else if cur.eat_word("gate") {
            cur.sym(",")?;
            Node::Gate(gate_name(cur)?)
        } else if cur.eat_word("output") {
            Node::Output
        } else {
            return Err(cur.error("node role (input, gate, output)"));
        };
        cur.sym("]")?;
        cur.expect_eol()?;
        nodes.push((id, node));
    }
    cur.phrase("EDGES:")?;
    cur.expect_eol()?;
    let mut incoming: HashMap<String, Vec<String>> = HashMap::new();
    while !cur.at_word("QUESTION") {
        let src = cur.ident("edge source")?.to_string();
        cur.phrase("->")?;
        for dst in ident_list(cur, ",", "edge target")? {
            incoming.entry(dst).or_default().push(src.clone());
        }
        cur.expect_eol()?;
    }
    for (id, node) in &nodes {
        let ins = incoming.remove(id).unwrap_or_default();
        match node {
            Node::Input if !ins.is_empty() => {
                return Err(ReprError::Semantic(format!("edge into input {id}")));
            }
            Node::Input => {}
            Node::Gate(kind) => b.gate(id, *kind, ins),
            Node::Output => match ins.as_slice() {
                [src] => b.output(id, src),
                _ => return Err(ReprError::Semantic(format!("output {id} needs exactly one driver"))),
            },
        }
    }
    if let Some(dst) = incoming.keys().next() {
        return Err(ReprError::Semantic(format!("edge into undeclared node {dst}")));
    }
    Ok(b)
}

// ---- matrix --------------------------------------------------------------

pub(crate) fn encode_matrix(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    let nodes: Vec<&str> = c
        .inputs
        .iter()
        .map(String::as_str)
        .chain(c.gates.iter().map(|g| g.id.as_str()))
        .chain(c.outputs.iter().map(|o| o.id.as_str()))
        .collect();
    let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let n = nodes.len();
    let mut m = vec![false; n * n];
    for g in &c.gates {
        let col = index[g.id.as_str()];
        for op in &g.operands {
            m[index[op.as_str()] * n + col] = true;
        }
    }
    for o in &c.outputs {
        m[index[o.gate.as_str()] * n + index[o.id.as_str()]] = true;
    }
    w.raw("NODES: ").sig_list(&nodes, ", ").raw("\nMATRIX (row feeds column):\n");
    for row in 0..n {
        let line: Vec<&str> = (0..n).map(|col| if m[row * n + col] { "1" } else { "0" }).collect();
        w.raw(&line.join(" ")).raw("\n");
    }
    w.raw("TYPES: ");
    for (i, g) in c.gates.iter().enumerate() {
        if i > 0 {
            w.raw(", ");
        }
        w.sig(&g.id).raw("=").op(g.kind.name());
    }
    w.raw("\nVALUES: ");
    write_values(w, inst, ", ");
    w.raw("\n");
}

pub(crate) fn parse_matrix(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    cur.phrase("NODES:")?;
    let nodes = ident_list(cur, ",", "node id")?;
    cur.expect_eol()?;
    cur.phrase("MATRIX (row feeds column):")?;
    cur.expect_eol()?;
    let n = nodes.len();
    let mut m = vec![false; n * n];
    for row in 0..n {
        for col in 0..n {
            m[row * n + col] = cur.bit()?;
        }
        cur.expect_eol()?;
    }
    cur.phrase("TYPES:")?;
    let mut types: HashMap<String, GateType> = HashMap::new();
    loop {
        let id = cur.ident("gate id")?.to_string();
        cur.sym("=")?;
        types.insert(id, gate_name(cur)?);
        if !cur.eat_sym(",") {
            break;
        }
    }
    cur.expect_eol()?;
    cur.phrase("VALUES:")?;
    let values: HashMap<String, bool> = value_pairs(cur, ",")?.into_iter().collect();
    cur.expect_eol()?;

    let mut b = Builder::new();
    let col_sources = |col: usize| -> Vec<String> {
        (0..n).filter(|&row| m[row * n + col]).map(|row| nodes[row].clone()).collect()
    };
    for (col, id) in nodes.iter().enumerate() {
        let sources = col_sources(col);
        if let Some(&v) = values.get(id) {
            if !sources.is_empty() {
                return Err(ReprError::Semantic(format!("input {id} has a driver")));
            }
            b.input(id, v)?;
        } else if let Some(&kind) = types.get(id) {
            b.gate(id, kind, sources);
        } else {
            match sources.as_slice() {
                [src] => b.output(id, src),
                _ => return Err(ReprError::Semantic(format!("output {id} needs exactly one driver"))),
            }
        }
    }
    if values.len() != b.inputs().len() || types.len() != b.gates().len() {
        return Err(ReprError::Semantic(String::from("TYPES/VALUES name nodes missing from NODES")));
    }
    Ok(b)
}

// ---- compact gate notation -----------------------------------------------

pub(crate) fn encode_cgn(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    w.raw("IN ");
    write_values(w, inst, ",");
    w.raw("\n");
    for g in &c.gates {
        w.raw("[").sig(&g.id).raw(":").op(g.kind.code()).raw("](");
        w.sig_list(&g.operands, ",").raw(")\n");
    }
    w.raw("OUT ");
    for (i, o) in c.outputs.iter().enumerate() {
        if i > 0 {
            w.raw(";");
        }
        w.sig(&o.id).raw("=").sig(&o.gate);
    }
    w.raw("\n");
}

pub(crate) fn parse_cgn(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    cur.phrase("IN")?;
    inputs_from_pairs(&mut b, value_pairs(cur, ",")?)?;
    cur.expect_eol()?;
    while cur.eat_sym("[") {
        let id = cur.ident("gate id")?;
        cur.sym(":")?;
        let code = cur.ident("gate code")?;
        let kind = GateType::from_code(code).ok_or_else(|| cur.error("gate code (A, O, N, X, D, R)"))?;
        cur.phrase("](")?;
        let ops = ident_list(cur, ",", "operand")?;
        cur.sym(")")?;
        cur.expect_eol()?;
        b.gate(id, kind, ops);
    }
    cur.phrase("OUT")?;
    loop {
        let id = cur.ident("output id")?;
        cur.sym("=")?;
        let gate = cur.ident("gate id")?;
        b.output(id, gate);
        if !cur.eat_sym(";") {
            break;
        }
    }
    cur.expect_eol()?;
    Ok(b)
}

// ---- dependency chain ----------------------------------------------------

pub(crate) fn write_symbol_legend(w: &mut TextWriter) {
    w.raw("SYMBOLS: ");
    for (i, g) in GateType::ALL.iter().enumerate() {
        if i > 0 {
            w.raw(", ");
        }
        w.op(g.symbol()).raw(" ").op(g.name());
    }
    w.raw("\n");
}

pub(crate) fn parse_symbol_legend(cur: &mut Cursor<'_>) -> Result<(), ReprError> {
    let legend: Vec<String> =
        GateType::ALL.iter().map(|g| format!("{} {}", g.symbol(), g.name())).collect();
    cur.phrase(&format!("SYMBOLS: {}", legend.join(", ")))?;
    cur.expect_eol()
}

pub(crate) fn symbol(cur: &mut Cursor<'_>) -> Result<GateType, ReprError> {
    match cur.peek() {
        Some(super::lexer::Tok::Sym(s)) if GateType::from_symbol(s).is_some() => {
            cur.any("operator")?;
            Ok(GateType::from_symbol(s).unwrap())
        }
        _ => Err(cur.error("operator symbol")),
    }
}

pub(crate) fn encode_dcl(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    write_symbol_legend(w);
    for i in &c.inputs {
        w.sig(i).raw(" = ").bit(inst.assignment.get(i).unwrap_or(false)).raw("\n");
    }
    for g in &c.gates {
        w.sig(&g.id).raw(" ← ");
        match g.operands.as_slice() {
            [a] => w.op(g.kind.symbol()).raw(" ").sig(a),
            [a, b] => w.sig(a).raw(" ").op(g.kind.symbol()).raw(" ").sig(b),
            _ => w,
        };
        w.raw("\n");
    }
    for o in &c.outputs {
        w.sig(&o.id).raw(" ← ").sig(&o.gate).raw("\n");
    }
}

pub(crate) fn parse_dcl(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    parse_symbol_legend(cur)?;
    while !cur.at_word("QUESTION") {
        let id = cur.ident("signal id")?;
        if cur.eat_sym("=") {
            let v = cur.bit()?;
            b.input(id, v)?;
        } else {
            cur.sym("←")?;
            if cur.at_sym("¬") {
                symbol(cur)?;
                let a = cur.ident("operand")?;
                b.gate(id, GateType::Not, vec![a.to_string()]);
            } else {
                let a = cur.ident("operand")?;
                if cur.at_eol() {
                    b.output(id, a);
                } else {
                    let kind = symbol(cur)?;
                    if kind == GateType::Not {
                        return Err(cur.error("binary operator"));
                    }
                    let rhs = cur.ident("operand")?;
                    b.gate(id, kind, vec![a.to_string(), rhs.to_string()]);
                }
            }
        }
        cur.expect_eol()?;
    }
    Ok(b)
}

// ---- constraint satisfaction ----------------------------------------------

pub(crate) fn encode_csf(inst: &TaskInstance, w: &mut TextWriter) {
    let c = &inst.circuit;
    let signals = c
        .inputs
        .iter()
        .chain(c.gates.iter().map(|g| &g.id))
        .chain(c.outputs.iter().map(|o| &o.id));
    for s in signals {
        w.raw("VAR ").sig(s).raw(" ∈ {0,1}\n");
    }
    for i in &c.inputs {
        w.raw("CONSTRAINT ").sig(i).raw(" = ").bit(inst.assignment.get(i).unwrap_or(false)).raw("\n");
    }
    for g in &c.gates {
        w.raw("CONSTRAINT ").sig(&g.id).raw(" = ");
        write_call(w, g.kind, &g.operands);
        w.raw("\n");
    }
    for o in &c.outputs {
        w.raw("CONSTRAINT ").sig(&o.id).raw(" = ").sig(&o.gate).raw("\n");
    }
}

pub(crate) fn parse_csf(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::new();
    let mut vars = Vec::new();
    while cur.eat_word("VAR") {
        vars.push(cur.ident("variable")?.to_string());
        cur.phrase("∈ {0,1}")?;
        cur.expect_eol()?;
    }
    let mut defined = Vec::new();
    while cur.eat_word("CONSTRAINT") {
        let id = cur.ident("variable")?;
        cur.sym("=")?;
        match cur.peek() {
            Some(super::lexer::Tok::Num(_)) => {
                let v = cur.bit()?;
                b.input(id, v)?;
            }
            _ if cur.peek_at(1) == Some(super::lexer::Tok::Sym("(")) => {
                let (kind, ops) = parse_call(cur)?;
                b.gate(id, kind, ops);
            }
            _ => {
                let gate = cur.ident("variable")?;
                b.output(id, gate);
            }
        }
        defined.push(id.to_string());
        cur.expect_eol()?;
    }
    let mut v = vars.clone();
    v.sort();
    defined.sort();
    if v != defined {
        return Err(ReprError::Semantic(String::from("VAR declarations do not match constraints")));
    }
    Ok(b)
}

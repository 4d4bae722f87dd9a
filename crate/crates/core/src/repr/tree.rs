//! Fully expanded encodings: Lisp trees, reverse Polish and canonical Boolean
//! expressions. Intermediate gates are not named in the text; parsing
//! reconstructs a tree-shaped circuit with fresh gate ids.

use super::builder::Builder;
use super::expr::{add_output, expand_outputs, Expr, GateNamer};
use super::lexer::{Cursor, Tok};
use super::structural::{gate_name, inputs_from_pairs, parse_symbol_legend, symbol, value_pairs, write_symbol_legend, write_values};
use super::{ReprError, RepresentationKind, TextWriter};
use crate::circuit::{GateType, TaskInstance};

fn check_arity(kind: GateType, args: &[Expr], cur: &mut Cursor<'_>) -> Result<(), ReprError> {
    if args.len() != kind.arity() {
        return Err(ReprError::Semantic(format!(
            "{kind} takes {} operands, got {} (near byte {})",
            kind.arity(),
            args.len(),
            cur.position()
        )));
    }
    Ok(())
}

fn finish_outputs(mut b: Builder, outs: Vec<(String, Expr)>) -> Result<Builder, ReprError> {
    let taken: Vec<String> = b.inputs().iter().cloned().chain(outs.iter().map(|(o, _)| o.clone())).collect();
    let mut namer = GateNamer::new(&taken);
    for (o, e) in &outs {
        add_output(&mut b, &mut namer, o, e)?;
    }
    Ok(b)
}

// ---- Lisp ----------------------------------------------------------------

fn write_lisp(w: &mut TextWriter, e: &Expr) {
    match e {
        Expr::Var(v) => {
            w.sig(v);
        }
        Expr::Op(kind, args) => {
            w.raw("(").op(kind.name());
            for a in args {
                w.raw(" ");
                write_lisp(w, a);
            }
            w.raw(")");
        }
    }
}

pub(crate) fn encode_lisp(inst: &TaskInstance, w: &mut TextWriter) -> Result<(), ReprError> {
    let outs = expand_outputs(&inst.circuit, RepresentationKind::LispTree)?;
    for i in &inst.circuit.inputs {
        w.raw("(input ").sig(i).raw(" ").bit(inst.assignment.get(i).unwrap_or(false)).raw(")\n");
    }
    for (o, e) in &outs {
        w.raw("(define ").sig(o).raw(" ");
        write_lisp(w, e);
        w.raw(")\n");
    }
    Ok(())
}

fn parse_lisp_term(cur: &mut Cursor<'_>) -> Result<Expr, ReprError> {
    if cur.eat_sym("(") {
        let kind = gate_name(cur)?;
        let mut args = Vec::new();
        while !cur.eat_sym(")") {
            if cur.at_end() {
                return Err(cur.error("`)`"));
            }
            args.push(parse_lisp_term(cur)?);
        }
        check_arity(kind, &args, cur)?;
        Ok(Expr::Op(kind, args))
    } else {
        Ok(Expr::Var(cur.ident("input id or `(`")?.to_string()))
    }
}

pub(crate) fn parse_lisp(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::tree_form();
    while cur.eat_phrase("(input") {
        let id = cur.ident("input id")?;
        let v = cur.bit()?;
        cur.sym(")")?;
        cur.expect_eol()?;
        b.input(id, v)?;
    }
    let mut outs = Vec::new();
    while cur.eat_phrase("(define") {
        let id = cur.ident("output id")?.to_string();
        let e = parse_lisp_term(cur)?;
        cur.sym(")")?;
        cur.expect_eol()?;
        outs.push((id, e));
    }
    finish_outputs(b, outs)
}

// ---- reverse Polish ------------------------------------------------------

fn write_rpn(w: &mut TextWriter, e: &Expr) {
    match e {
        Expr::Var(v) => {
            w.raw(" ").sig(v);
        }
        Expr::Op(kind, args) => {
            for a in args {
                write_rpn(w, a);
            }
            w.raw(" ").op(kind.name());
        }
    }
}

pub(crate) fn encode_rpn(inst: &TaskInstance, w: &mut TextWriter) -> Result<(), ReprError> {
    let outs = expand_outputs(&inst.circuit, RepresentationKind::ReversePolish)?;
    w.raw("INPUTS ");
    write_values(w, inst, " ");
    w.raw("\n");
    for (o, e) in &outs {
        w.sig(o).raw(" :");
        write_rpn(w, e);
        w.raw("\n");
    }
    Ok(())
}

pub(crate) fn parse_rpn(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::tree_form();
    cur.phrase("INPUTS")?;
    inputs_from_pairs(&mut b, value_pairs(cur, "")?)?;
    cur.expect_eol()?;
    let mut outs = Vec::new();
    while !cur.at_word("QUESTION") {
        let id = cur.ident("output id")?.to_string();
        cur.sym(":")?;
        let mut stack: Vec<Expr> = Vec::new();
        while !cur.at_eol() {
            let tok = cur.ident("operand or operator")?;
            match GateType::from_name(tok) {
                Some(kind) => {
                    if stack.len() < kind.arity() {
                        return Err(ReprError::Semantic(format!("{kind} in {id} lacks operands")));
                    }
                    let args = stack.split_off(stack.len() - kind.arity());
                    stack.push(Expr::Op(kind, args));
                }
                None => stack.push(Expr::Var(tok.to_string())),
            }
        }
        cur.expect_eol()?;
        match (stack.pop(), stack.is_empty()) {
            (Some(e), true) => outs.push((id, e)),
            _ => return Err(ReprError::Semantic(format!("{id} does not reduce to one expression"))),
        }
    }
    finish_outputs(b, outs)
}

// ---- canonical Boolean expression -----------------------------------------

fn write_cbe(w: &mut TextWriter, e: &Expr) {
    match e {
        Expr::Var(v) => {
            w.sig(v);
        }
        Expr::Op(GateType::Not, args) => {
            w.op(GateType::Not.symbol());
            write_cbe(w, &args[0]);
        }
        Expr::Op(kind, args) => {
            w.raw("(");
            write_cbe(w, &args[0]);
            w.raw(" ").op(kind.symbol()).raw(" ");
            write_cbe(w, &args[1]);
            w.raw(")");
        }
    }
}

pub(crate) fn encode_cbe(inst: &TaskInstance, w: &mut TextWriter) -> Result<(), ReprError> {
    let outs = expand_outputs(&inst.circuit, RepresentationKind::CanonicalBoolean)?;
    write_symbol_legend(w);
    w.raw("INPUTS: ");
    write_values(w, inst, ", ");
    w.raw("\n");
    for (o, e) in &outs {
        w.sig(o).raw(" = ");
        write_cbe(w, e);
        w.raw("\n");
    }
    Ok(())
}

fn parse_cbe_term(cur: &mut Cursor<'_>) -> Result<Expr, ReprError> {
    match cur.peek() {
        Some(Tok::Sym("¬")) => {
            symbol(cur)?;
            Ok(Expr::Op(GateType::Not, vec![parse_cbe_term(cur)?]))
        }
        Some(Tok::Sym("(")) => {
            cur.sym("(")?;
            let lhs = parse_cbe_term(cur)?;
            let kind = symbol(cur)?;
            if kind == GateType::Not {
                return Err(cur.error("binary operator"));
            }
            let rhs = parse_cbe_term(cur)?;
            cur.sym(")")?;
            Ok(Expr::Op(kind, vec![lhs, rhs]))
        }
        _ => Ok(Expr::Var(cur.ident("input id, `¬` or `(`")?.to_string())),
    }
}

pub(crate) fn parse_cbe(cur: &mut Cursor<'_>) -> Result<Builder, ReprError> {
    let mut b = Builder::tree_form();
    parse_symbol_legend(cur)?;
    cur.phrase("INPUTS:")?;
    inputs_from_pairs(&mut b, value_pairs(cur, ",")?)?;
    cur.expect_eol()?;
    let mut outs = Vec::new();
    while !cur.at_word("QUESTION") {
        let id = cur.ident("output id")?.to_string();
        cur.sym("=")?;
        let e = parse_cbe_term(cur)?;
        cur.expect_eol()?;
        outs.push((id, e));
    }
    finish_outputs(b, outs)
}

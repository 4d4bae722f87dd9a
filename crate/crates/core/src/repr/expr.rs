//! Expression trees for the fully expanded encodings (CBE, Lisp, RPN).

use std::collections::{HashMap, HashSet};

use super::builder::Builder;
use super::{ReprError, RepresentationKind, EXPANSION_CAP};
use crate::circuit::{Circuit, GateType};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Expr {
    Var(String),
    Op(GateType, Vec<Expr>),
}

/// Expands every output into a tree over inputs only. Shared subexpressions
/// are duplicated.
pub(crate) fn expand_outputs(c: &Circuit, kind: RepresentationKind) -> Result<Vec<(String, Expr)>, ReprError> {
    // leaf counts bound the text size before anything is materialised
    let mut leaves: HashMap<&str, usize> = c.inputs.iter().map(|i| (i.as_str(), 1)).collect();
    for g in &c.gates {
        let n = g.operands.iter().map(|o| leaves.get(o.as_str()).copied().unwrap_or(1)).fold(0usize, usize::saturating_add);
        leaves.insert(&g.id, n);
    }
    let total = c.outputs.iter().map(|o| leaves.get(o.gate.as_str()).copied().unwrap_or(0)).fold(0usize, usize::saturating_add);
    if total > EXPANSION_CAP {
        return Err(ReprError::ExpansionTooLarge { kind, chars: total });
    }
    let gates: HashMap<&str, _> = c.gates.iter().map(|g| (g.id.as_str(), g)).collect();
    fn build(id: &str, gates: &HashMap<&str, &crate::circuit::Gate>) -> Expr {
        match gates.get(id) {
            None => Expr::Var(id.to_string()),
            Some(g) => Expr::Op(g.kind, g.operands.iter().map(|o| build(o, gates)).collect()),
        }
    }
    Ok(c.outputs.iter().map(|o| (o.id.clone(), build(&o.gate, &gates))).collect())
}

/// Adds the gates of `expr` to `b` in post-order and returns the root id.
/// Fresh gate ids `G1, G2, ...` skip names already taken by other signals.
pub(crate) struct GateNamer {
    taken: HashSet<String>,
    next: usize,
}

impl GateNamer {
    pub fn new<'a>(taken: impl IntoIterator<Item = &'a String>) -> Self {
        Self { taken: taken.into_iter().cloned().collect(), next: 1 }
    }

    fn fresh(&mut self) -> String {
        loop {
            let name = format!("G{}", self.next);
            self.next += 1;
            if !self.taken.contains(&name) {
                return name;
            }
        }
    }

    pub fn add(&mut self, b: &mut Builder, e: &Expr) -> String {
        match e {
            Expr::Var(v) => v.clone(),
            Expr::Op(kind, args) => {
                let ops: Vec<String> = args.iter().map(|a| self.add(b, a)).collect();
                let id = self.fresh();
                b.gate(&id, *kind, ops);
                id
            }
        }
    }
}

pub(crate) fn add_output(
    b: &mut Builder,
    namer: &mut GateNamer,
    output: &str,
    e: &Expr,
) -> Result<(), ReprError> {
    if let Expr::Var(v) = e {
        return Err(ReprError::Semantic(format!("output {output} is bound directly to {v}")));
    }
    let root = namer.add(b, e);
    b.output(output, &root);
    Ok(())
}

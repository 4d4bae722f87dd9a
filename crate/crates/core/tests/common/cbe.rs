//! Stand-alone reader for canonical Boolean expression text, used to check
//! flip deltas without touching the library's parser or simulator.

use std::collections::HashMap;

enum Node {
    Var(String),
    Not(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
}

struct Reader<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Self { chars: src.chars().collect(), pos: 0, _src: src }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Option<char> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        self.pos += 1;
        c
    }

    fn expr(&mut self) -> Node {
        self.skip_ws();
        match self.chars[self.pos] {
            '(' => {
                self.pos += 1;
                let lhs = self.expr();
                let op = self.next().expect("operator");
                let rhs = self.expr();
                assert_eq!(self.next(), Some(')'));
                Node::Bin(op, Box::new(lhs), Box::new(rhs))
            }
            '¬' => {
                self.pos += 1;
                Node::Not(Box::new(self.expr()))
            }
            _ => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    self.pos += 1;
                }
                assert!(self.pos > start, "identifier expected");
                Node::Var(self.chars[start..self.pos].iter().collect())
            }
        }
    }
}

fn eval(n: &Node, env: &HashMap<String, bool>) -> bool {
    match n {
        Node::Var(v) => env[v],
        Node::Not(x) => !eval(x, env),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            match op {
                '∧' => a && b,
                '∨' => a || b,
                '⊕' => a != b,
                '⊼' => !(a && b),
                '⊽' => !(a || b),
                other => panic!("unknown operator {other}"),
            }
        }
    }
}

/// Reads an encoded question and returns (outputs, flip target, delta).
pub fn flip_delta_from_text(text: &str) -> (usize, String, usize) {
    let mut env = HashMap::new();
    let mut outputs = Vec::new();
    let mut flip = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("INPUTS: ") {
            for pair in rest.split(", ") {
                let (id, bit) = pair.split_once('=').expect("pair");
                env.insert(id.to_string(), bit == "1");
            }
        } else if let Some(rest) = line.strip_prefix("QUESTION: If input ") {
            flip = rest.split_whitespace().next().expect("flip").to_string();
        } else if line.starts_with('O') && line.contains(" = ") {
            let (_, expr) = line.split_once(" = ").expect("output line");
            outputs.push(Reader::new(expr).expr());
        }
    }
    let before: Vec<bool> = outputs.iter().map(|o| eval(o, &env)).collect();
    let v = env[&flip];
    env.insert(flip.clone(), !v);
    let after: Vec<bool> = outputs.iter().map(|o| eval(o, &env)).collect();
    let delta = before.iter().zip(&after).filter(|(a, b)| a != b).count();
    (outputs.len(), flip, delta)
}

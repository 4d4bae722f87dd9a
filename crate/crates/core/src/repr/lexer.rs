//! Token stream shared by all fifteen parsers.
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_]*`, numbers are digit runs, line
//! breaks are explicit tokens and every other non-space character is a
//! one-character symbol. The cursor skips line breaks unless a parser asks for
//! an end of line explicitly.

use super::ReprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tok<'a> {
    Ident(&'a str),
    Num(&'a str),
    Sym(&'a str),
    Newline,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub tok: Tok<'a>,
    pub start: usize,
}

pub(crate) fn lex(src: &str) -> Vec<Token<'_>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c == b'\n' {
            out.push(Token { tok: Tok::Newline, start });
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(&src[start..i]), start });
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token { tok: Tok::Num(&src[start..i]), start });
        } else {
            let len = src[i..].chars().next().map_or(1, char::len_utf8);
            i += len;
            out.push(Token { tok: Tok::Sym(&src[start..i]), start });
        }
    }
    out
}

pub(crate) struct Cursor<'a> {
    toks: Vec<Token<'a>>,
    pos: usize,
    len: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { toks: lex(src), pos: 0, len: src.len() }
    }

    fn next_index(&self) -> usize {
        let mut i = self.pos;
        while matches!(self.toks.get(i), Some(Token { tok: Tok::Newline, .. })) {
            i += 1;
        }
        i
    }

    fn skip_newlines(&mut self) {
        self.pos = self.next_index();
    }

    pub fn position(&self) -> usize {
        self.toks.get(self.next_index()).map_or(self.len, |t| t.start)
    }

    pub fn error(&self, expected: impl Into<String>) -> ReprError {
        ReprError::Syntax { position: self.position(), expected: expected.into() }
    }

    pub fn peek(&self) -> Option<Tok<'a>> {
        self.toks.get(self.next_index()).map(|t| t.tok)
    }

    pub fn peek_at(&self, ahead: usize) -> Option<Tok<'a>> {
        self.toks[self.next_index().min(self.toks.len())..]
            .iter()
            .filter(|t| t.tok != Tok::Newline)
            .nth(ahead)
            .map(|t| t.tok)
    }

    fn bump(&mut self) -> Option<Tok<'a>> {
        self.skip_newlines();
        let t = self.toks.get(self.pos).map(|t| t.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// True if the next raw token is a line break or the end of input.
    pub fn at_eol(&self) -> bool {
        matches!(self.toks.get(self.pos), None | Some(Token { tok: Tok::Newline, .. }))
    }

    pub fn expect_eol(&mut self) -> Result<(), ReprError> {
        if self.at_eol() {
            self.skip_newlines();
            Ok(())
        } else {
            Err(self.error("end of line"))
        }
    }

    pub fn expect_end(&mut self) -> Result<(), ReprError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of text"))
        }
    }

    pub fn at_word(&mut self, word: &str) -> bool {
        self.peek() == Some(Tok::Ident(word))
    }

    pub fn at_sym(&mut self, sym: &str) -> bool {
        self.peek() == Some(Tok::Sym(sym))
    }

    pub fn ident(&mut self, what: &str) -> Result<&'a str, ReprError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    pub fn number(&mut self, what: &str) -> Result<usize, ReprError> {
        match self.peek() {
            Some(Tok::Num(s)) => {
                let v = s.parse().map_err(|_| self.error(what))?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.error(what)),
        }
    }

    pub fn bit(&mut self) -> Result<bool, ReprError> {
        match self.peek() {
            Some(Tok::Num("0")) => {
                self.bump();
                Ok(false)
            }
            Some(Tok::Num("1")) => {
                self.bump();
                Ok(true)
            }
            _ => Err(self.error("bit 0 or 1")),
        }
    }

    pub fn sym(&mut self, sym: &str) -> Result<(), ReprError> {
        if self.at_sym(sym) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("`{sym}`")))
        }
    }

    pub fn eat_sym(&mut self, sym: &str) -> bool {
        let hit = self.at_sym(sym);
        if hit {
            self.bump();
        }
        hit
    }

    pub fn eat_word(&mut self, word: &str) -> bool {
        let hit = self.at_word(word);
        if hit {
            self.bump();
        }
        hit
    }

    /// Matches `phrase` token by token (line breaks ignored on both sides).
    pub fn phrase(&mut self, phrase: &str) -> Result<(), ReprError> {
        let save = self.pos;
        for want in lex(phrase).into_iter().filter(|t| t.tok != Tok::Newline) {
            if self.peek() != Some(want.tok) {
                let err = self.error(format!("`{phrase}`"));
                self.pos = save;
                return Err(err);
            }
            self.bump();
        }
        Ok(())
    }

    pub fn eat_phrase(&mut self, phrase: &str) -> bool {
        self.phrase(phrase).is_ok()
    }

    /// Any single token; used for operator words and symbols.
    pub fn any(&mut self, what: &str) -> Result<&'a str, ReprError> {
        match self.peek() {
            Some(Tok::Ident(s) | Tok::Num(s) | Tok::Sym(s)) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }
}

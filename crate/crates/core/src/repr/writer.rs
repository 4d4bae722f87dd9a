use super::{CriticalSpan, Roles, SpanClass};

/// Text buffer that records a span for every logical token it emits.
pub(crate) struct TextWriter<'r> {
    text: String,
    spans: Vec<CriticalSpan>,
    roles: &'r Roles<'r>,
}

impl<'r> TextWriter<'r> {
    pub fn new(roles: &'r Roles<'r>) -> Self {
        Self { text: String::with_capacity(1024), spans: Vec::new(), roles }
    }

    pub fn raw(&mut self, s: &str) -> &mut Self {
        self.text.push_str(s);
        self
    }

    fn token(&mut self, s: &str, class: SpanClass) -> &mut Self {
        let start = self.text.len();
        self.text.push_str(s);
        self.spans.push(CriticalSpan { start, end: self.text.len(), class });
        self
    }

    /// Signal id, classed by its role in the circuit.
    pub fn sig(&mut self, id: &str) -> &mut Self {
        let class = self.roles.class(id);
        self.token(id, class)
    }

    pub fn input(&mut self, id: &str) -> &mut Self {
        self.token(id, SpanClass::InputId)
    }

    pub fn op(&mut self, token: &str) -> &mut Self {
        self.token(token, SpanClass::Operator)
    }

    pub fn bit(&mut self, b: bool) -> &mut Self {
        self.raw(if b { "1" } else { "0" })
    }

    pub fn num(&mut self, n: usize) -> &mut Self {
        self.raw(&n.to_string())
    }

    /// Emits `ids` separated by `sep`.
    pub fn sig_list<S: AsRef<str>>(&mut self, ids: &[S], sep: &str) -> &mut Self {
        for (i, id) in ids.iter().enumerate() {
            if i > 0 {
                self.raw(sep);
            }
            self.sig(id.as_ref());
        }
        self
    }

    pub fn finish(self) -> (String, Vec<CriticalSpan>) {
        (self.text, self.spans)
    }
}

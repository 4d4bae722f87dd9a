use super::EvalError;
use crate::repr::EncodedQuestion;

/// System preamble of the `default` template.
pub const PREAMBLE: &str = "You are given a combinational logic circuit and an input assignment. \
Work out the circuit outputs, flip the named input, and count how many outputs change value.";

pub const TEMPLATES: [&str; 2] = ["default", "bare"];

/// Byte offset of the encoded text inside a prompt built from `template_id`.
pub fn prompt_offset(template_id: &str) -> Result<usize, EvalError> {
    match template_id {
        "default" => Ok(PREAMBLE.len() + 2),
        "bare" => Ok(0),
        other => Err(EvalError::UnknownTemplate(other.to_string())),
    }
}

pub fn build_prompt(encoded: &EncodedQuestion, template_id: &str) -> Result<String, EvalError> {
    let offset = prompt_offset(template_id)?;
    let mut out = String::with_capacity(offset + encoded.text.len());
    if offset > 0 {
        out.push_str(PREAMBLE);
        out.push_str("\n\n");
    }
    out.push_str(&encoded.text);
    Ok(out)
}

/// Integer after the last `ANSWER:` marker.
pub fn extract_answer(completion: &str) -> Result<i64, EvalError> {
    let at = completion.rfind("ANSWER:").ok_or(EvalError::NoAnswerFound)?;
    let rest = completion[at + "ANSWER:".len()..].trim_start();
    let bytes = rest.as_bytes();
    let mut end = usize::from(matches!(bytes.first(), Some(b'+' | b'-')));
    let digits_from = end;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == digits_from || (bytes.get(end) == Some(&b'.') && bytes.get(end + 1).is_some_and(u8::is_ascii_digit)) {
        return Err(EvalError::NonIntegerAnswer(rest.lines().next().unwrap_or("").trim().to_string()));
    }
    rest[..end].parse().map_err(|_| EvalError::NonIntegerAnswer(rest[..end].to_string()))
}

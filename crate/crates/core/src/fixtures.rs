//! Synthetic tensor dumps and state stacks for tests, benches and demos.

use crate::interchange::{StateStack, TensorContainer};
use crate::rng::StableRng;
use crate::sha256_hex;

/// Shape of synthetic attention rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pattern {
    Uniform,
    Identity,
    /// Row `i` attends only to token `(i + shift) mod N`.
    Shifted(usize),
    /// Random positive rows; larger `sharpness` concentrates the mass.
    Random { sharpness: f64 },
}

/// Row-stochastic `N×N` matrix in f64.
pub fn attention_matrix(n: usize, pattern: Pattern, rng: &mut StableRng) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for (i, row) in a.chunks_exact_mut(n.max(1)).enumerate() {
        match pattern {
            Pattern::Uniform => row.iter_mut().for_each(|x| *x = 1.0 / n as f64),
            Pattern::Identity => row[i] = 1.0,
            Pattern::Shifted(s) => row[(i + s) % n] = 1.0,
            Pattern::Random { sharpness } => {
                row.iter_mut().for_each(|x| *x = (1.0 - rng.unit()).powf(sharpness));
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|x| *x /= s);
            }
        }
    }
    a
}

/// Rounds to f32 and rescales every row so it sums to one in f64.
pub fn to_f32_rows(a: &[f64], n: usize) -> Vec<f32> {
    a.iter().map(|&x| x as f32).collect::<Vec<_>>().chunks_exact(n.max(1)).flat_map(|row| {
        let s: f64 = row.iter().map(|&x| f64::from(x)).sum();
        row.iter().map(move |&x| (f64::from(x) / s) as f32).collect::<Vec<_>>()
    }).collect()
}

/// Byte offsets of the whitespace-separated words of `prompt`, each
/// punctuation character its own token.
pub fn pseudo_tokens(prompt: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in prompt.char_indices() {
        let word = c.is_alphanumeric() || c == '_';
        if let Some(s) = start.filter(|_| !word) {
            out.push((s, i));
            start = None;
        }
        if word {
            start.get_or_insert(i);
        } else if !c.is_whitespace() {
            out.push((i, i + c.len_utf8()));
        }
    }
    if let Some(s) = start {
        out.push((s, prompt.len()));
    }
    out
}

#[derive(Debug, Clone)]
pub struct DumpSpec {
    pub layers: usize,
    pub dim: usize,
    pub pattern: Pattern,
    /// Layers that also carry per-head tensors, with this many heads.
    pub head_layers: Vec<usize>,
    pub heads: usize,
}

impl Default for DumpSpec {
    fn default() -> Self {
        Self { layers: 4, dim: 8, pattern: Pattern::Random { sharpness: 4.0 }, head_layers: Vec::new(), heads: 4 }
    }
}

/// Synthetic container over the given token offsets.
pub fn synthetic_dump(prompt_hash: &str, offsets: Vec<(usize, usize)>, spec: &DumpSpec, seed: u64) -> TensorContainer {
    let n = offsets.len();
    let mut rng = StableRng::new(seed);
    let mut c = TensorContainer::new("synthetic", prompt_hash, offsets, spec.dim);
    c.manifest.metadata.insert(String::from("pass"), String::from("prompt-only"));
    c.manifest.metadata.insert(String::from("head_aggregation"), String::from("mean"));
    for layer in 0..spec.layers {
        if spec.head_layers.contains(&layer) {
            let heads: Vec<Vec<f64>> = (0..spec.heads)
                .map(|h| attention_matrix(n, Pattern::Random { sharpness: 1.0 + 2.0 * h as f64 }, &mut rng))
                .collect();
            let mean: Vec<f64> = (0..n * n).map(|i| heads.iter().map(|h| h[i]).sum::<f64>() / spec.heads as f64).collect();
            let flat: Vec<f32> = heads.iter().flat_map(|h| to_f32_rows(h, n)).collect();
            c.set_heads(layer, spec.heads, flat);
            c.push_attention(to_f32_rows(&mean, n));
        } else {
            c.push_attention(to_f32_rows(&attention_matrix(n, spec.pattern, &mut rng), n));
        }
        let hidden: Vec<f32> = (0..spec.dim).map(|_| rng.normal() as f32).collect();
        c.set_hidden(layer, false, hidden);
    }
    c
}

/// Synthetic container for a prompt, tokenized with [`pseudo_tokens`].
pub fn dump_for_prompt(prompt: &str, spec: &DumpSpec, seed: u64) -> TensorContainer {
    synthetic_dump(&sha256_hex(prompt.as_bytes()), pseudo_tokens(prompt), spec, seed)
}

/// Gaussian blobs, one per distinct label, for each of `layers`. Centroids are
/// `separation` apart on average; noise has unit variance per coordinate.
pub fn synthetic_states(labels: &[String], layers: &[usize], dim: usize, separation: f64, seed: u64) -> StateStack {
    let mut rng = StableRng::new(seed);
    let mut distinct: Vec<&String> = labels.iter().collect();
    distinct.sort();
    distinct.dedup();
    let mut data = Vec::with_capacity(layers.len() * labels.len() * dim);
    for _ in layers {
        let centroids: Vec<Vec<f64>> = distinct.iter().map(|_| (0..dim).map(|_| rng.normal() * separation).collect()).collect();
        for l in labels {
            let c = &centroids[distinct.binary_search(&l).expect("label present")];
            data.extend(c.iter().map(|&m| (m + rng.normal()) as f32));
        }
    }
    StateStack { layers: layers.to_vec(), points: labels.len(), dim, data }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_stochastic() {
        let mut rng = StableRng::new(3);
        for p in [Pattern::Uniform, Pattern::Identity, Pattern::Shifted(1), Pattern::Random { sharpness: 3.0 }] {
            let a = to_f32_rows(&attention_matrix(7, p, &mut rng), 7);
            for row in a.chunks_exact(7) {
                assert!((row.iter().map(|&x| f64::from(x)).sum::<f64>() - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn tokens_cover_words_and_symbols() {
        let t = pseudo_tokens("O1 = (A ∧ B)\n");
        let text = "O1 = (A ∧ B)\n";
        let words: Vec<&str> = t.iter().map(|&(s, e)| &text[s..e]).collect();
        assert_eq!(words, ["O1", "=", "(", "A", "∧", "B", ")"]);
    }

    #[test]
    fn synthetic_dump_validates() {
        let spec = DumpSpec { head_layers: vec![1], ..DumpSpec::default() };
        let c = dump_for_prompt("IN A=1,B=0\n[G1:A](A,B)\n", &spec, 5);
        c.validate().unwrap();
        assert_eq!(c.manifest.layers, 4);
        assert_eq!(c.heads(1).unwrap().len(), 4);
    }
}

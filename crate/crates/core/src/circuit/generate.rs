//! Seeded random circuit generation.
//!
//! Each attempt picks a gate count, a depth and an input count, distributes
//! gates over layers (every layer non-empty), draws gate types uniformly, and
//! wires layer `k` gates with one operand from layer `k - 1` and, for binary
//! gates, a second operand from any earlier layer. Operand slots that may take
//! an input are "free"; once the free slots left equal the number of inputs not
//! yet referenced, those slots are forced onto unreferenced inputs, which keeps
//! every input in use. Outputs are the sink gates; an attempt whose sink count
//! falls outside the configured output range is discarded and retried with
//! sub-seed `seed + attempt`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Circuit, Gate, GateType, InputAssignment, Output, TaskInstance};
use crate::rng::{mix64, StableRng};

pub const GENERATOR_VERSION: &str = "layered-v1";
pub const DEFAULT_RETRY_BUDGET: u64 = 1000;

const INPUT_NAMES: &str = "ABCDEFGHIJKLMNOP";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl SizeRange {
    pub const fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.min <= v && v <= self.max
    }

    pub fn is_empty(&self) -> bool {
        self.min > self.max
    }
}

impl From<[usize; 2]> for SizeRange {
    fn from([min, max]: [usize; 2]) -> Self {
        Self { min, max }
    }
}

impl From<SizeRange> for [usize; 2] {
    fn from(r: SizeRange) -> Self {
        [r.min, r.max]
    }
}

impl fmt::Display for SizeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.min, self.max)
    }
}

impl std::str::FromStr for SizeRange {
    type Err = String;

    /// Accepts `lo:hi` or a single number.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad range `{s}`: {e}"));
        match s.split_once(':') {
            Some((lo, hi)) => Ok(Self::new(parse(lo)?, parse(hi)?)),
            None => {
                let v = parse(s)?;
                Ok(Self::new(v, v))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub inputs: SizeRange,
    pub gates: SizeRange,
    pub depth: SizeRange,
    pub outputs: SizeRange,
    #[serde(default = "default_budget")]
    pub retry_budget: u64,
}

fn default_budget() -> u64 {
    DEFAULT_RETRY_BUDGET
}

impl Default for GenConfig {
    /// 5-6 inputs, 12-16 gates, depth 6-8, at most 4 outputs.
    fn default() -> Self {
        Self {
            inputs: SizeRange::new(5, 6),
            gates: SizeRange::new(12, 16),
            depth: SizeRange::new(6, 8),
            outputs: SizeRange::new(1, 4),
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

impl GenConfig {
    pub fn new(inputs: SizeRange, gates: SizeRange, depth: SizeRange) -> Self {
        Self { inputs, gates, depth, ..Self::default() }
    }

    /// Rejects configurations no attempt could ever satisfy.
    pub fn check(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::ConfigInfeasible(msg));
        for (name, r) in [
            ("inputs", self.inputs),
            ("gates", self.gates),
            ("depth", self.depth),
            ("outputs", self.outputs),
        ] {
            if r.is_empty() {
                return bad(format!("{name} range {r} is empty"));
            }
        }
        if self.inputs.min < 2 || self.inputs.max > INPUT_NAMES.len() {
            return bad(format!("inputs range {} must lie within 2:16", self.inputs));
        }
        if self.depth.min < 1 || self.gates.min < 1 {
            return bad(String::from("depth and gate count must be at least 1"));
        }
        if self.outputs.max < 1 {
            return bad(String::from("at least one output is required"));
        }
        if self.retry_budget == 0 {
            return bad(String::from("retry budget must be positive"));
        }
        let feasible = (self.gates.min..=self.gates.max).any(|g| {
            (self.depth.min..=self.depth.max.min(g)).any(|d| {
                self.inputs.min <= 2 * g - d + 1 && self.outputs.min <= g - d + 1
            })
        });
        if !feasible {
            return bad(format!(
                "no circuit with inputs {}, gates {}, depth {}, outputs {} exists",
                self.inputs, self.gates, self.depth, self.outputs
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("configuration infeasible: {0}")]
    ConfigInfeasible(String),
    #[error("no valid circuit after {attempts} attempts")]
    GenerationExhausted { attempts: u64 },
}

pub fn generate_circuit(config: &GenConfig, seed: u64) -> Result<Circuit, GenError> {
    config.check()?;
    for attempt in 0..config.retry_budget {
        let mut rng = StableRng::new(seed.wrapping_add(attempt));
        if let Some(c) = try_generate(config, &mut rng) {
            return Ok(c);
        }
    }
    Err(GenError::GenerationExhausted { attempts: config.retry_budget })
}

fn try_generate(config: &GenConfig, rng: &mut StableRng) -> Option<Circuit> {
    let gate_count = rng.in_range(config.gates.min, config.gates.max);
    let depth_max = config.depth.max.min(gate_count);
    if depth_max < config.depth.min {
        return None;
    }
    let depth = rng.in_range(config.depth.min, depth_max);
    let input_max = config.inputs.max.min(2 * gate_count - depth + 1);
    if input_max < config.inputs.min {
        return None;
    }
    let input_count = rng.in_range(config.inputs.min, input_max);

    let mut layer_sizes = vec![1usize; depth];
    for _ in depth..gate_count {
        layer_sizes[rng.below(depth)] += 1;
    }
    let layer_of_gate: Vec<usize> = layer_sizes
        .iter()
        .enumerate()
        .flat_map(|(l, &n)| std::iter::repeat_n(l + 1, n))
        .collect();
    let kinds: Vec<GateType> = (0..gate_count).map(|_| *rng.pick(&GateType::ALL)).collect();

    let mut free_slots: usize = kinds
        .iter()
        .zip(&layer_of_gate)
        .map(|(k, &l)| if l == 1 { k.arity() } else { k.arity() - 1 })
        .sum();
    if free_slots < input_count {
        return None;
    }

    // node indices: inputs 0..input_count, then gates in order
    let mut referenced = vec![false; input_count];
    let mut unreferenced = input_count;
    let mut layer_members: Vec<Vec<usize>> = vec![Vec::new(); depth + 1];
    layer_members[0] = (0..input_count).collect();
    let mut operands: Vec<Vec<usize>> = Vec::with_capacity(gate_count);

    let mut take_free = |rng: &mut StableRng, pool: &[usize], referenced: &mut Vec<bool>| -> usize {
        let node = if unreferenced > 0 && free_slots == unreferenced {
            let candidates: Vec<usize> = (0..input_count).filter(|&i| !referenced[i]).collect();
            *rng.pick(&candidates)
        } else {
            *rng.pick(pool)
        };
        free_slots -= 1;
        if node < input_count && !referenced[node] {
            referenced[node] = true;
            unreferenced -= 1;
        }
        node
    };

    for (g, (&kind, &layer)) in kinds.iter().zip(&layer_of_gate).enumerate() {
        let mut ops = Vec::with_capacity(2);
        if layer == 1 {
            let first = take_free(rng, &layer_members[0], &mut referenced);
            ops.push(first);
            if kind.arity() == 2 {
                let pool: Vec<usize> = (0..input_count).filter(|&i| i != first).collect();
                ops.push(take_free(rng, &pool, &mut referenced));
            }
        } else {
            let first = *rng.pick(&layer_members[layer - 1]);
            ops.push(first);
            if kind.arity() == 2 {
                let pool: Vec<usize> = layer_members[..layer]
                    .iter()
                    .flatten()
                    .copied()
                    .filter(|&n| n != first)
                    .collect();
                ops.push(take_free(rng, &pool, &mut referenced));
            }
        }
        if ops.len() == 2 && rng.bit() {
            ops.swap(0, 1);
        }
        operands.push(ops);
        layer_members[layer].push(input_count + g);
    }

    let mut has_fanout = vec![false; gate_count];
    for ops in &operands {
        for &n in ops {
            if n >= input_count {
                has_fanout[n - input_count] = true;
            }
        }
    }
    let sink_count = has_fanout.iter().filter(|f| !**f).count();
    if !config.outputs.contains(sink_count) {
        return None;
    }

    let name = |n: usize| -> String {
        if n < input_count {
            INPUT_NAMES[n..n + 1].to_string()
        } else {
            format!("G{}", n - input_count + 1)
        }
    };
    let inputs = (0..input_count).map(name).collect();
    let gates = kinds
        .iter()
        .zip(&operands)
        .enumerate()
        .map(|(g, (&kind, ops))| Gate {
            id: name(input_count + g),
            kind,
            operands: ops.iter().map(|&n| name(n)).collect(),
        })
        .collect();
    let outputs = (0..gate_count)
        .filter(|&g| !has_fanout[g])
        .enumerate()
        .map(|(i, g)| Output { id: format!("O{}", i + 1), gate: name(input_count + g) })
        .collect();
    Some(Circuit { inputs, gates, outputs })
}

/// Circuit plus a random assignment and flip target drawn from an independent
/// stream of the same seed.
pub fn generate_instance(
    config: &GenConfig,
    seed: u64,
    instance_id: impl Into<String>,
) -> Result<TaskInstance, GenError> {
    let circuit = generate_circuit(config, seed)?;
    let mut rng = StableRng::jumped(seed);
    let mut assignment = InputAssignment::new();
    for i in &circuit.inputs {
        assignment.set(i.clone(), rng.bit());
    }
    let flip = rng.pick(&circuit.inputs).clone();
    Ok(TaskInstance::new(instance_id, seed, circuit, assignment, flip)
        .expect("generator produced an invalid circuit"))
}

/// Per-instance seeds for a suite: `mix64(base_seed + index)`.
pub fn instance_seed(base_seed: u64, index: usize) -> u64 {
    mix64(base_seed.wrapping_add(index as u64))
}

pub fn generate_suite(
    config: &GenConfig,
    base_seed: u64,
    count: usize,
) -> Result<Vec<TaskInstance>, GenError> {
    (0..count)
        .map(|i| generate_instance(config, instance_seed(base_seed, i), format!("q{i:04}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{layerize, validate};

    #[test]
    fn default_topology_seed_42() {
        let c = generate_circuit(&GenConfig::default(), 42).unwrap();
        assert!(validate(&c).is_empty(), "{:?}", validate(&c));
        assert!((5..=6).contains(&c.inputs.len()));
        assert!((12..=16).contains(&c.gates.len()));
        assert!((6..=8).contains(&c.depth()));
        assert!((1..=4).contains(&c.outputs.len()));
    }

    #[test]
    fn smallest_feasible_configuration() {
        let cfg = GenConfig::new(SizeRange::new(2, 2), SizeRange::new(1, 1), SizeRange::new(1, 1));
        let c = generate_circuit(&cfg, 0).unwrap();
        assert_eq!(c.inputs, vec!["A", "B"]);
        assert_eq!(c.gates.len(), 1);
        assert_eq!(c.gates[0].kind.arity(), 2);
        assert_eq!(c.outputs.len(), 1);
        assert!(validate(&c).is_empty());
    }

    #[test]
    fn depth_beyond_gate_count_is_infeasible() {
        let cfg = GenConfig::new(SizeRange::new(5, 5), SizeRange::new(3, 3), SizeRange::new(8, 8));
        assert!(matches!(generate_circuit(&cfg, 7), Err(GenError::ConfigInfeasible(_))));
    }

    #[test]
    fn bad_ranges_are_infeasible() {
        let mut cfg = GenConfig { inputs: SizeRange::new(1, 3), ..GenConfig::default() };
        assert!(cfg.check().is_err());
        cfg.inputs = SizeRange::new(6, 5);
        assert!(cfg.check().is_err());
        cfg.inputs = SizeRange::new(2, 17);
        assert!(cfg.check().is_err());
        // 16 inputs cannot be covered by 3 gates of depth 3
        let cfg = GenConfig::new(SizeRange::new(16, 16), SizeRange::new(3, 3), SizeRange::new(3, 3));
        assert!(cfg.check().is_err());
    }

    #[test]
    fn tiny_budget_can_exhaust() {
        // outputs 4:4 with exactly 4 gates at depth 1 is feasible but needs NOT-free draws
        let mut cfg = GenConfig::new(SizeRange::new(8, 8), SizeRange::new(4, 4), SizeRange::new(1, 1));
        cfg.outputs = SizeRange::new(4, 4);
        cfg.retry_budget = 1;
        let hits = (0..64u64).filter(|&s| generate_circuit(&cfg, s).is_err()).count();
        assert!(hits > 0);
        assert!((0..64u64).filter_map(|s| generate_circuit(&cfg, s).err()).all(|e| e
            == GenError::GenerationExhausted { attempts: 1 }));
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = GenConfig::default();
        for seed in [0u64, 1, 42, u64::MAX] {
            assert_eq!(generate_circuit(&cfg, seed), generate_circuit(&cfg, seed));
        }
        assert_ne!(generate_circuit(&cfg, 1), generate_circuit(&cfg, 1_000_000));
    }

    #[test]
    fn layers_match_depth() {
        let cfg = GenConfig::default();
        for seed in 0..50 {
            let c = generate_circuit(&cfg, seed).unwrap();
            let layers = layerize(&c);
            assert_eq!(layers.len(), c.depth());
            assert!(layers.iter().all(|l| !l.is_empty()));
        }
    }

    #[test]
    fn suite_instances_are_distinct() {
        let suite = generate_suite(&GenConfig::default(), 7, 20).unwrap();
        for (i, a) in suite.iter().enumerate() {
            assert_eq!(a.instance_id, format!("q{i:04}"));
            for b in &suite[i + 1..] {
                assert_ne!(a.circuit, b.circuit);
            }
        }
    }

    #[test]
    fn range_parsing() {
        assert_eq!("5:6".parse::<SizeRange>().unwrap(), SizeRange::new(5, 6));
        assert_eq!("3".parse::<SizeRange>().unwrap(), SizeRange::new(3, 3));
        assert!("x:1".parse::<SizeRange>().is_err());
    }
}

//! Hash recovery against a rainbow table.
//!
//! For each suffix length `i = 1..=n` the query digest is pushed through the
//! last `i` reduction functions. If the query sits at depth `n - i` of some
//! chain, the result equals that chain's end. Bucket membership of the end's
//! Pearson value is decided classically for tiny buckets and by Grover search
//! otherwise; on a hit the candidate chains are rebuilt from their starts and
//! the recovered plaintext is verified against the query.

use crate::error::{Error, Result};
use crate::hashing::{md5_hex, pearson16, reduce, HexDigest, PearsonPermutation, ReductionSpec};
use crate::quantum_sim::{grover_search, DEFAULT_DIMENSION, DEFAULT_SHOTS};
use crate::rainbow_table::{end_hash_indices, BucketIndex, RainbowTable, BUCKET_WIDTH};
use crate::rng::SplitMix64;

pub const DEFAULT_CLASSICAL_THRESHOLD: usize = 2;
pub const DEFAULT_RNG_SEED: u64 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub shots: u32,
    /// Buckets with at most this many distinct residues skip Grover. With two
    /// residues one iteration lands on the target with probability exactly
    /// 1/2, which the majority rule cannot resolve.
    pub classical_threshold: usize,
    pub rng_seed: u64,
    pub quantum_enabled: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            shots: DEFAULT_SHOTS,
            classical_threshold: DEFAULT_CLASSICAL_THRESHOLD,
            rng_seed: DEFAULT_RNG_SEED,
            quantum_enabled: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::Config("shots must be at least 1".into()));
        }
        if self.classical_threshold > BUCKET_WIDTH as usize {
            return Err(Error::Config(format!(
                "classical threshold {} exceeds bucket width {BUCKET_WIDTH}",
                self.classical_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchReport {
    pub result: Option<String>,
    pub chains_examined: usize,
    pub grover_invocations: usize,
    pub grover_iterations_total: usize,
    pub classical_fallbacks: usize,
    pub bucket_misses: usize,
}

impl SearchReport {
    /// Counters as `key=value` lines.
    pub fn counter_lines(&self) -> Vec<String> {
        vec![
            format!("chains_examined={}", self.chains_examined),
            format!("grover_invocations={}", self.grover_invocations),
            format!("grover_iterations_total={}", self.grover_iterations_total),
            format!("classical_fallbacks={}", self.classical_fallbacks),
            format!("bucket_misses={}", self.bucket_misses),
        ]
    }
}

pub fn membership_classical(bucket: &[u8], residue: u8) -> bool {
    bucket.contains(&residue)
}

/// Replays a chain from `start` through `specs`, returning the final
/// plaintext and its digest.
pub fn rebuild_chain(start: &str, specs: &[ReductionSpec]) -> (String, HexDigest) {
    let mut text = start.to_string();
    let mut hash = md5_hex(&text);
    for spec in specs {
        text = reduce(&hash, spec);
        hash = md5_hex(&text);
    }
    (text, hash)
}

/// Applies `suffix` to `hash`, hashing between (not after) reductions.
fn reduce_suffix(hash: &HexDigest, suffix: &[ReductionSpec]) -> String {
    let mut current = hash.clone();
    let mut text = String::new();
    for (j, spec) in suffix.iter().enumerate() {
        text = reduce(&current, spec);
        if j + 1 != suffix.len() {
            current = md5_hex(&text);
        }
    }
    text
}

/// Rebuilds every listed row whose end equals `reduced` and returns the first
/// plaintext whose digest matches `target`.
fn recover(
    table: &RainbowTable,
    rows: impl IntoIterator<Item = usize>,
    reduced: &str,
    prefix: &[ReductionSpec],
    target: &HexDigest,
) -> Option<String> {
    rows.into_iter().find_map(|row| {
        let chain = &table.chains()[row];
        if chain.end != reduced {
            return None;
        }
        let (text, hash) = rebuild_chain(&chain.start, prefix);
        (hash == *target).then_some(text)
    })
}

pub fn crack(
    hash: &HexDigest,
    table: &RainbowTable,
    buckets: &BucketIndex,
    perm: &PearsonPermutation,
    specs: &[ReductionSpec],
    cfg: &SearchConfig,
) -> Result<SearchReport> {
    cfg.validate()?;
    if table.perm_seed() != perm.seed() {
        return Err(Error::Config(format!(
            "table was built with permutation seed {} but seed {} was supplied",
            table.perm_seed(),
            perm.seed()
        )));
    }

    // one sampler seed per Grover probe, drawn in probe order
    let mut probe_seeds = SplitMix64::new(cfg.rng_seed);
    let mut report = SearchReport::default();

    for i in 1..=specs.len() {
        let (prefix, suffix) = specs.split_at(specs.len() - i);
        report.chains_examined += 1;

        let reduced = reduce_suffix(hash, suffix);
        let h = pearson16(&reduced, perm)?;
        let (key, residue) = (h / BUCKET_WIDTH, (h % BUCKET_WIDTH) as u8);

        let Some(bucket) = buckets.get(key) else {
            report.bucket_misses += 1;
            continue;
        };
        let mut good_states: Vec<usize> = bucket.iter().map(|&r| r as usize).collect();
        good_states.sort_unstable();
        good_states.dedup();

        let member = if !cfg.quantum_enabled || good_states.len() <= cfg.classical_threshold {
            report.classical_fallbacks += 1;
            membership_classical(bucket, residue)
        } else {
            let outcome = grover_search(
                &good_states,
                residue as usize,
                DEFAULT_DIMENSION,
                cfg.shots,
                probe_seeds.next_u64(),
            )?;
            report.grover_invocations += 1;
            report.grover_iterations_total += outcome.iterations;
            outcome.decision
        };
        if !member {
            continue;
        }

        if let Some(found) = recover(table, end_hash_indices(table, h), &reduced, prefix, hash) {
            report.result = Some(found);
            return Ok(report);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassicalReport {
    pub result: Option<String>,
    /// Number of end-plaintext comparisons performed.
    pub scan_length: usize,
}

/// Baseline without buckets or Pearson hashing: every suffix result is
/// compared against every chain end.
pub fn crack_classical_report(
    hash: &HexDigest,
    table: &RainbowTable,
    specs: &[ReductionSpec],
) -> ClassicalReport {
    let mut report = ClassicalReport::default();
    for i in 1..=specs.len() {
        let (prefix, suffix) = specs.split_at(specs.len() - i);
        let reduced = reduce_suffix(hash, suffix);
        report.scan_length += table.len();
        let rows = table
            .chains()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.end == reduced)
            .map(|(row, _)| row);
        if let Some(found) = recover(table, rows, &reduced, prefix, hash) {
            report.result = Some(found);
            break;
        }
    }
    report
}

pub fn crack_classical(
    hash: &HexDigest,
    table: &RainbowTable,
    specs: &[ReductionSpec],
) -> Option<String> {
    crack_classical_report(hash, table, specs).result
}

//! Chain generation, the on-disk table format and the bucket index.
//!
//! A table file is plain ASCII:
//!
//! ```text
//! QIRIS v1 seed=44 chain=R1,R2,R3,R4
//! password\txk9
//! letmein\ttEC
//! ```
//!
//! Only the start and end plaintext of each chain are stored. The Pearson
//! hashes of the ends are recomputed from the seed on load.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::hashing::{
    build_permutation, canonical_reduction_specs, is_base62, md5_hex, pearson16, reduce,
    PearsonPermutation, ReductionSpec,
};

const FORMAT_MAGIC: &str = "QIRIS";
const FORMAT_VERSION: &str = "v1";
const CHAIN_LABEL: &str = "R1,R2,R3,R4";
const END_LEN: usize = 3;

/// Number of residues per bucket; the low four bits of a Pearson value.
pub const BUCKET_WIDTH: u16 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub start: String,
    pub end: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RainbowTable {
    chains: Vec<Chain>,
    end_hashed: Vec<u16>,
    perm_seed: u64,
}

impl RainbowTable {
    /// Assembles a table from chains, hashing every end with `perm`.
    pub fn from_chains(chains: Vec<Chain>, perm: &PearsonPermutation) -> Result<Self> {
        let end_hashed = chains
            .iter()
            .map(|c| pearson16(&c.end, perm))
            .collect::<Result<Vec<_>>>()?;
        Ok(RainbowTable {
            chains,
            end_hashed,
            perm_seed: perm.seed(),
        })
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn end_hashed(&self) -> &[u16] {
        &self.end_hashed
    }

    pub fn perm_seed(&self) -> u64 {
        self.perm_seed
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }
}

fn valid_plaintext(word: &str) -> bool {
    !word.is_empty()
        && word
            .bytes()
            .all(|b| b.is_ascii() && !b.is_ascii_whitespace())
}

/// Walks `start` through md5 and each reduction in turn, returning the last
/// plaintext produced.
pub fn chain_end(start: &str, specs: &[ReductionSpec]) -> String {
    specs.iter().fold(start.to_string(), |text, spec| {
        reduce(&md5_hex(&text), spec)
    })
}

/// Builds one chain per wordlist entry, in input order.
pub fn generate_table<S: AsRef<str>>(
    wordlist: &[S],
    specs: &[ReductionSpec],
    perm: &PearsonPermutation,
) -> Result<RainbowTable> {
    if wordlist.is_empty() {
        return Err(Error::EmptyWordlist);
    }
    if specs.is_empty() {
        return Err(Error::InvalidReductionSpec("empty reduction chain".into()));
    }
    let mut chains = Vec::with_capacity(wordlist.len());
    for (index, word) in wordlist.iter().enumerate() {
        let word = word.as_ref();
        if !valid_plaintext(word) {
            return Err(Error::InvalidWordlistEntry {
                index,
                entry: word.to_string(),
            });
        }
        chains.push(Chain {
            start: word.to_string(),
            end: chain_end(word, specs),
        });
    }
    RainbowTable::from_chains(chains, perm)
}

/// All row indices whose end hash equals `h`, ascending.
pub fn end_hash_indices(table: &RainbowTable, h: u16) -> Vec<usize> {
    table
        .end_hashed
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v == h).then_some(i))
        .collect()
}

/// Groups Pearson values by their high 12 bits. Each bucket holds the low
/// 4-bit residues of its members in insertion order, duplicates included.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BucketIndex {
    buckets: BTreeMap<u16, Vec<u8>>,
}

impl BucketIndex {
    pub fn get(&self, key: u16) -> Option<&[u8]> {
        self.buckets.get(&key).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u16, &[u8])> {
        self.buckets.iter().map(|(k, v)| (*k, v.as_slice()))
    }

    pub fn from_hashes(hashes: &[u16]) -> Self {
        let mut buckets: BTreeMap<u16, Vec<u8>> = BTreeMap::new();
        for &h in hashes {
            buckets
                .entry(h / BUCKET_WIDTH)
                .or_default()
                .push((h % BUCKET_WIDTH) as u8);
        }
        BucketIndex { buckets }
    }
}

pub fn build_buckets(table: &RainbowTable) -> BucketIndex {
    BucketIndex::from_hashes(&table.end_hashed)
}

pub fn header_line(seed: u64) -> String {
    format!("{FORMAT_MAGIC} {FORMAT_VERSION} seed={seed} chain={CHAIN_LABEL}")
}

/// Serializes a table to the text format described in the module docs.
pub fn render_table(table: &RainbowTable) -> String {
    let mut out = header_line(table.perm_seed);
    out.push('\n');
    for chain in &table.chains {
        out.push_str(&chain.start);
        out.push('\t');
        out.push_str(&chain.end);
        out.push('\n');
    }
    out
}

pub fn save_table(table: &RainbowTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_table(table)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_header(line: &str) -> Option<u64> {
    let mut parts = line.split(' ');
    if parts.next()? != FORMAT_MAGIC || parts.next()? != FORMAT_VERSION {
        return None;
    }
    let seed = parts.next()?.strip_prefix("seed=")?;
    if seed.is_empty() || !seed.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let seed = seed.parse().ok()?;
    if parts.next()? != format!("chain={CHAIN_LABEL}") || parts.next().is_some() {
        return None;
    }
    Some(seed)
}

/// Parses table text. `path` is only used for error messages.
pub fn parse_table(text: &str, path: &Path) -> Result<RainbowTable> {
    let err = |line: usize, reason: String| Error::TableFormat {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.split('\n').enumerate();
    let header = lines
        .next()
        .map(|(_, l)| l)
        .filter(|l| !l.is_empty())
        .ok_or_else(|| err(1, "missing header".into()))?;
    if header.starts_with(FORMAT_MAGIC)
        && !header.starts_with(&format!("{FORMAT_MAGIC} {FORMAT_VERSION} "))
    {
        return Err(err(1, format!("unsupported version in header {header:?}")));
    }
    let seed =
        parse_header(header).ok_or_else(|| err(1, format!("malformed header {header:?}")))?;

    let mut chains = Vec::new();
    let body: Vec<(usize, &str)> = lines.collect();
    for (pos, &(idx, line)) in body.iter().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() && pos == body.len() - 1 {
            break;
        }
        let mut fields = line.split('\t');
        let (start, end) = match (fields.next(), fields.next(), fields.next()) {
            (Some(s), Some(e), None) => (s, e),
            _ => return Err(err(lineno, "expected exactly one tab separator".into())),
        };
        if !valid_plaintext(start) {
            return Err(err(lineno, format!("invalid start plaintext {start:?}")));
        }
        if end.len() != END_LEN || !end.bytes().all(is_base62) {
            return Err(err(
                lineno,
                format!("end {end:?} is not 3 base62 characters"),
            ));
        }
        chains.push(Chain {
            start: start.to_string(),
            end: end.to_string(),
        });
    }
    if chains.is_empty() {
        return Err(err(2, "table has no chains".into()));
    }
    RainbowTable::from_chains(chains, &build_permutation(seed))
}

pub fn load_table(path: impl AsRef<Path>) -> Result<RainbowTable> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = std::str::from_utf8(&bytes)
        .ok()
        .filter(|t| t.is_ascii())
        .ok_or_else(|| Error::TableFormat {
            path: path.to_path_buf(),
            line: 0,
            reason: "table file is not ASCII".into(),
        })?;
    parse_table(text, path)
}

/// Generates a table with the canonical R1..R4 chain.
pub fn generate_canonical<S: AsRef<str>>(
    wordlist: &[S],
    perm: &PearsonPermutation,
) -> Result<RainbowTable> {
    generate_table(wordlist, &canonical_reduction_specs(), perm)
}

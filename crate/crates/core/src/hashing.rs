//! Hash and reduction primitives: MD5 hex digests, the seeded 16-bit Pearson
//! hash, and the base62 reduction functions that map a digest back into the
//! plaintext space.

use std::fmt;
use std::str::FromStr;

use md5::{Digest, Md5};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Character set used by every reduction function, in digit order.
pub const BASE62_ALPHABET: &[u8; 62] =
    b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Number of entries in the Pearson permutation table.
///
/// One short of 2^16, so a Pearson value is always in `[0, 65534]` and never
/// reaches 65535.
pub const PEARSON_TABLE_LEN: usize = 65535;

/// Seed used for the permutation when none is given.
pub const DEFAULT_PERM_SEED: u64 = 44;

pub fn is_base62(byte: u8) -> bool {
    byte.is_ascii_alphanumeric()
}

/// A 128-bit MD5 digest rendered as 32 lowercase hex characters.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HexDigest(String);

impl HexDigest {
    /// Parses a digest, accepting upper- or lowercase input and normalizing
    /// to lowercase.
    pub fn parse(text: &str) -> Result<Self> {
        if text.len() != 32 || !text.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::InvalidDigest(text.to_string()));
        }
        Ok(HexDigest(text.to_ascii_lowercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Integer value of the first eight hex characters.
    pub fn prefix_u32(&self) -> u32 {
        u32::from_str_radix(&self.0[..8], 16).expect("digest is validated hex")
    }
}

impl fmt::Display for HexDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for HexDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HexDigest({})", self.0)
    }
}

impl FromStr for HexDigest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HexDigest::parse(s)
    }
}

pub fn md5_hex(data: impl AsRef<[u8]>) -> HexDigest {
    let digest = Md5::digest(data.as_ref());
    let mut hex = String::with_capacity(32);
    for byte in digest.iter() {
        hex.push_str(&format!("{byte:02x}"));
    }
    HexDigest(hex)
}

/// Parameters of one reduction function: a nonce added to the digest prefix
/// and the number of base62 characters emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReductionSpec {
    pub index: u8,
    pub nonce: u64,
    pub length: usize,
}

impl ReductionSpec {
    pub fn new(index: u8, nonce: u64, length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::InvalidReductionSpec(format!(
                "R{index}: output length must be at least 1"
            )));
        }
        Ok(ReductionSpec {
            index,
            nonce,
            length,
        })
    }

    pub fn name(&self) -> String {
        format!("R{}", self.index)
    }
}

/// The four reduction functions in chain order: R1..R4.
pub fn canonical_reduction_specs() -> Vec<ReductionSpec> {
    [(1, 2, 6), (2, 3, 4), (3, 4, 5), (4, 1, 3)]
        .into_iter()
        .map(|(index, nonce, length)| ReductionSpec {
            index,
            nonce,
            length,
        })
        .collect()
}

/// Maps a digest to a plaintext of `spec.length` base62 characters.
///
/// The digest prefix plus nonce is emitted least-significant digit first.
pub fn reduce(hash: &HexDigest, spec: &ReductionSpec) -> String {
    let mut value = u64::from(hash.prefix_u32()) + spec.nonce;
    let mut out = String::with_capacity(spec.length);
    for _ in 0..spec.length {
        out.push(BASE62_ALPHABET[(value % 62) as usize] as char);
        value /= 62;
    }
    out
}

/// Permutation of `[0, 65534]` driving the 16-bit Pearson hash.
#[derive(Clone, PartialEq, Eq)]
pub struct PearsonPermutation {
    table: Vec<u16>,
    seed: u64,
}

impl PearsonPermutation {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn table(&self) -> &[u16] {
        &self.table
    }
}

impl fmt::Debug for PearsonPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PearsonPermutation")
            .field("seed", &self.seed)
            .field("len", &self.table.len())
            .finish()
    }
}

/// Shuffles `[0, 65534]` with a descending Fisher-Yates pass, drawing
/// `j = next() % (i + 1)` from a SplitMix64 stream seeded with `seed`.
pub fn build_permutation(seed: u64) -> PearsonPermutation {
    let mut table: Vec<u16> = (0..PEARSON_TABLE_LEN as u32).map(|v| v as u16).collect();
    let mut rng = SplitMix64::new(seed);
    for i in (1..PEARSON_TABLE_LEN).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        table.swap(i, j);
    }
    PearsonPermutation { table, seed }
}

/// 16-bit Pearson hash: start from the text length, then fold each
/// character through the permutation.
pub fn pearson16(text: &str, perm: &PearsonPermutation) -> Result<u16> {
    if text.is_empty() {
        return Err(Error::InvalidPlaintext("empty text".to_string()));
    }
    if !text.is_ascii() {
        return Err(Error::InvalidPlaintext(format!("non-ASCII text {text:?}")));
    }
    let modulus = PEARSON_TABLE_LEN;
    let mut h = text.len() % modulus;
    for byte in text.bytes() {
        h = perm.table[(h + byte as usize) % modulus] as usize;
    }
    Ok(h as u16)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_prefix() -> HexDigest {
        HexDigest::parse("00000000ffffffffffffffffffffffff").unwrap()
    }

    #[test]
    fn md5_rfc1321_vectors() {
        assert_eq!(md5_hex("").as_str(), "d41d8cd98f00b204e9800998ecf8427e");
        assert_eq!(md5_hex("a").as_str(), "0cc175b9c0f1b6a831c399e269772661");
        assert_eq!(md5_hex("abc").as_str(), "900150983cd24fb0d6963f7d28e17f72");
        assert_eq!(
            md5_hex("message digest").as_str(),
            "f96b697d7cb7938d525a2f31aaf161d0"
        );
    }

    #[test]
    fn md5_password_matches_reference() {
        let d = md5_hex("password");
        assert_eq!(d.as_str(), "5f4dcc3b5aa765d61d8327deb882cf99");
        assert!(d
            .as_str()
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)));
    }

    #[test]
    fn digest_parse_normalizes_case() {
        let d = HexDigest::parse("5F4DCC3B5AA765D61D8327DEB882CF99").unwrap();
        assert_eq!(d, md5_hex("password"));
    }

    #[test]
    fn digest_parse_rejects_bad_input() {
        assert!(HexDigest::parse("zzzz").is_err());
        assert!(HexDigest::parse("").is_err());
        assert!(HexDigest::parse("5f4dcc3b5aa765d61d8327deb882cf9").is_err());
        assert!(HexDigest::parse("5f4dcc3b5aa765d61d8327deb882cf9g").is_err());
        assert!(HexDigest::parse("5f4dcc3b5aa765d61d8327deb882cf999").is_err());
    }

    #[test]
    fn canonical_specs() {
        let specs = canonical_reduction_specs();
        assert_eq!(specs.len(), 4);
        let pairs: Vec<_> = specs.iter().map(|s| (s.nonce, s.length)).collect();
        assert_eq!(pairs, vec![(2, 6), (3, 4), (4, 5), (1, 3)]);
        assert_eq!(specs[0].name(), "R1");
        assert_eq!(specs[3].name(), "R4");
    }

    #[test]
    fn spec_rejects_zero_length() {
        assert!(ReductionSpec::new(1, 0, 0).is_err());
        assert!(ReductionSpec::new(1, 0, 1).is_ok());
    }

    #[test]
    fn reduce_zero_prefix() {
        let specs = canonical_reduction_specs();
        assert_eq!(reduce(&zero_prefix(), &specs[3]), "100");
        assert_eq!(reduce(&zero_prefix(), &specs[0]), "200000");
    }

    #[test]
    fn reduce_password_r1() {
        let specs = canonical_reduction_specs();
        // value from an independent Python implementation of the reduction
        assert_eq!(reduce(&md5_hex("password"), &specs[0]), "jNXcK1");
    }

    #[test]
    fn reduce_max_prefix_does_not_overflow() {
        let d = HexDigest::parse("ffffffff000000000000000000000000").unwrap();
        let spec = ReductionSpec::new(9, u64::from(u32::MAX), 8).unwrap();
        let out = reduce(&d, &spec);
        assert_eq!(out.len(), 8);
    }

    #[test]
    fn permutation_is_a_permutation() {
        let perm = build_permutation(DEFAULT_PERM_SEED);
        let mut sorted = perm.table().to_vec();
        sorted.sort_unstable();
        assert!(sorted.iter().copied().eq(0..PEARSON_TABLE_LEN as u16));
    }

    #[test]
    fn permutation_golden_prefix() {
        let perm = build_permutation(44);
        assert_eq!(
            &perm.table()[..8],
            &[28328, 40913, 62884, 60896, 54657, 11204, 34884, 41251]
        );
        assert_eq!(&perm.table()[65531..], &[26830, 30663, 456, 41541]);
        let other = build_permutation(45);
        assert_eq!(
            &other.table()[..8],
            &[51793, 708, 60920, 33809, 53853, 13235, 22428, 12762]
        );
    }

    #[test]
    fn permutation_deterministic_and_seed_sensitive() {
        assert_eq!(build_permutation(44), build_permutation(44));
        assert_ne!(build_permutation(44).table(), build_permutation(45).table());
    }

    #[test]
    fn pearson_golden_values() {
        let perm = build_permutation(44);
        assert_eq!(pearson16("abc", &perm).unwrap(), 43745);
        assert_eq!(pearson16("a", &perm).unwrap(), 20912);
        assert_eq!(pearson16("password", &perm).unwrap(), 32723);
        assert_eq!(pearson16("100", &perm).unwrap(), 10414);
        assert_eq!(pearson16("zZ9", &perm).unwrap(), 47998);
    }

    #[test]
    fn pearson_rejects_non_ascii_and_empty() {
        let perm = build_permutation(44);
        assert!(pearson16("pässword", &perm).is_err());
        assert!(pearson16("", &perm).is_err());
    }
}

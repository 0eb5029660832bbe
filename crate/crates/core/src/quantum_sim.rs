//! A small statevector simulator for Grover search over a prepared
//! superposition.
//!
//! Instead of building gate-level circuits, the phase oracle and the
//! diffusion operator are applied to the amplitude vector directly as
//! reflections. The results agree with the circuit form up to a global
//! phase, which has no effect on measurement.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Qubits used for a bucket search: 4, giving a 16-dimensional space.
pub const DEFAULT_QUBITS: u32 = 4;
pub const DEFAULT_DIMENSION: usize = 1 << DEFAULT_QUBITS;
pub const DEFAULT_SHOTS: u32 = 1024;
const MAX_QUBITS: u32 = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dimension(amplitudes.len())?;
        Ok(Statevector { amplitudes })
    }

    pub fn basis(index: usize, dimension: usize) -> Result<Self> {
        prepare_state(&[index], dimension)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn num_qubits(&self) -> u32 {
        self.amplitudes.len().trailing_zeros()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes.get(index).map_or(0.0, |a| a.norm_sqr())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

impl std::ops::Neg for Statevector {
    type Output = Statevector;

    fn neg(self) -> Statevector {
        Statevector {
            amplitudes: self.amplitudes.into_iter().map(|a| -a).collect(),
        }
    }
}

fn check_dimension(dimension: usize) -> Result<()> {
    if dimension == 0 || !dimension.is_power_of_two() || dimension > 1 << MAX_QUBITS {
        return Err(Error::InvalidDimension(dimension));
    }
    Ok(())
}

fn check_index(index: usize, dimension: usize) -> Result<()> {
    if index >= dimension {
        return Err(Error::IndexOutOfRange { index, dimension });
    }
    Ok(())
}

/// Renders a basis index as a bitstring with qubit 0 first (little-endian
/// qubit order), as used in diagnostics.
pub fn bitstring_le(index: usize, num_qubits: u32) -> String {
    (0..num_qubits)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Uniform superposition over the distinct indices in `marked`.
///
/// Built as a 0/1 mask divided by its Euclidean norm, so every marked
/// amplitude is `1/sqrt(m)` for `m` distinct indices.
pub fn prepare_state(marked: &[usize], dimension: usize) -> Result<Statevector> {
    check_dimension(dimension)?;
    if marked.is_empty() {
        return Err(Error::EmptyMarkedSet);
    }
    let mut mask = vec![0.0f64; dimension];
    for &index in marked {
        check_index(index, dimension)?;
        mask[index] = 1.0;
    }
    let norm = mask.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(Statevector {
        amplitudes: mask
            .into_iter()
            .map(|v| Complex64::new(v / norm, 0.0))
            .collect(),
    })
}

/// Phase oracle: negates the amplitude of `target`.
pub fn apply_oracle(mut state: Statevector, target: usize) -> Result<Statevector> {
    check_index(target, state.dimension())?;
    state.amplitudes[target] = -state.amplitudes[target];
    Ok(state)
}

/// Reflection `2|axis><axis| - I` applied to `state`.
pub fn reflect_about(state: Statevector, axis: &Statevector) -> Result<Statevector> {
    let overlap = axis.inner(&state)?;
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(&axis.amplitudes)
        .map(|(s, a)| 2.0 * overlap * a - s)
        .collect();
    Ok(Statevector { amplitudes })
}

/// Optimal iteration count `floor(pi/4 * sqrt(m))` for an `m`-element search
/// space.
pub fn grover_iterations(m: usize) -> usize {
    (FRAC_PI_4 * (m as f64).sqrt()).floor() as usize
}

/// Closed-form probability of measuring the single marked target after `k`
/// iterations over a uniform `m`-element superposition.
pub fn success_probability(m: usize, k: usize) -> f64 {
    let theta = (1.0 / (m as f64).sqrt()).asin();
    ((2 * k + 1) as f64 * theta).sin().powi(2)
}

/// Samples `shots` outcomes by inverse CDF over `|amplitude|^2`.
///
/// A uniform draw `u` maps to the first index whose cumulative probability
/// exceeds `u`. If rounding leaves the total slightly below `u`, the draw
/// falls to the last index with non-zero probability.
pub fn measure(state: &Statevector, shots: u32, rng_seed: u64) -> BTreeMap<usize, u32> {
    let mut cumulative = Vec::with_capacity(state.dimension());
    let mut total = 0.0;
    for p in state.probabilities() {
        total += p;
        cumulative.push(total);
    }
    let last_nonzero = state
        .amplitudes
        .iter()
        .rposition(|a| a.norm_sqr() > 0.0)
        .unwrap_or(0);

    let mut rng = SplitMix64::new(rng_seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u = rng.next_f64();
        let index = cumulative.partition_point(|&c| c <= u).min(last_nonzero);
        *counts.entry(index).or_insert(0) += 1;
    }
    counts
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroverOutcome {
    pub counts: BTreeMap<usize, u32>,
    pub shots: u32,
    pub iterations: usize,
    pub target: usize,
    pub decision: bool,
}

impl GroverOutcome {
    pub fn target_count(&self) -> u32 {
        self.counts.get(&self.target).copied().unwrap_or(0)
    }
}

/// Runs the amplified state without measuring it. Duplicates in `marked`
/// are collapsed first.
pub fn amplify(marked: &[usize], target: usize, dimension: usize) -> Result<(Statevector, usize)> {
    let mut distinct = marked.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let initial = prepare_state(&distinct, dimension)?;
    check_index(target, dimension)?;
    let iterations = grover_iterations(distinct.len());
    let mut state = initial.clone();
    // a target outside the support has zero amplitude, so each iteration is
    // the identity; skipping keeps the state bit-identical to `initial`
    if !distinct.contains(&target) {
        return Ok((state, iterations));
    }
    for _ in 0..iterations {
        state = reflect_about(apply_oracle(state, target)?, &initial)?;
    }
    Ok((state, iterations))
}

/// Grover search for `target` inside the superposition over `marked`,
/// deciding success when the target takes strictly more than half the shots.
pub fn grover_search(
    marked: &[usize],
    target: usize,
    dimension: usize,
    shots: u32,
    rng_seed: u64,
) -> Result<GroverOutcome> {
    let (state, iterations) = amplify(marked, target, dimension)?;
    let counts = measure(&state, shots, rng_seed);
    let hits = counts.get(&target).copied().unwrap_or(0);
    Ok(GroverOutcome {
        decision: hits > shots / 2,
        counts,
        shots,
        iterations,
        target,
    })
}

/// One `bitstring: count` line per observed outcome, in index order.
pub fn format_counts(counts: &BTreeMap<usize, u32>, num_qubits: u32) -> String {
    counts
        .iter()
        .map(|(i, c)| format!("{}: {c}\n", bitstring_le(*i, num_qubits)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;
    const SEVEN_MARKED: [usize; 7] = [1, 2, 8, 9, 10, 12, 15];

    fn uniform16() -> Statevector {
        prepare_state(&(0..16).collect::<Vec<_>>(), 16).unwrap()
    }

    #[test]
    fn prepare_seven_element_example() {
        let s = prepare_state(&SEVEN_MARKED, 16).unwrap();
        let amp = 1.0 / 7f64.sqrt();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let want = if SEVEN_MARKED.contains(&i) { amp } else { 0.0 };
            assert!((a.re - want).abs() < EPS && a.im == 0.0, "index {i}");
        }
        assert!((s.norm() - 1.0).abs() < EPS);
    }

    #[test]
    fn prepare_basis_and_uniform() {
        let s = prepare_state(&[5], 16).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            assert_eq!(a.re, if i == 5 { 1.0 } else { 0.0 });
        }
        assert!(uniform16()
            .amplitudes()
            .iter()
            .all(|a| (a.re - 0.25).abs() < EPS));
    }

    #[test]
    fn prepare_errors() {
        assert!(matches!(prepare_state(&[], 16), Err(Error::EmptyMarkedSet)));
        assert!(matches!(
            prepare_state(&[16], 16),
            Err(Error::IndexOutOfRange {
                index: 16,
                dimension: 16
            })
        ));
        assert!(matches!(
            prepare_state(&[0], 12),
            Err(Error::InvalidDimension(12))
        ));
    }

    #[test]
    fn prepare_collapses_duplicates() {
        let s = prepare_state(&[3, 3, 4], 16).unwrap();
        assert!((s.amplitudes()[3].re - 0.5f64.sqrt()).abs() < EPS);
    }

    #[test]
    fn oracle_examples() {
        let s = apply_oracle(uniform16(), 5).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            assert_eq!(a.re, if i == 5 { -0.25 } else { 0.25 });
        }
        let basis = Statevector::basis(3, 16).unwrap();
        assert_eq!(apply_oracle(basis.clone(), 7).unwrap(), basis);
        assert_eq!(apply_oracle(s, 5).unwrap(), uniform16());
        assert!(apply_oracle(uniform16(), 16).is_err());
    }

    #[test]
    fn reflection_examples() {
        let axis = uniform16();
        let fixed = reflect_about(axis.clone(), &axis).unwrap();
        for (a, b) in fixed.amplitudes().iter().zip(axis.amplitudes()) {
            assert!((a - b).norm() < EPS);
        }

        // |0> - |1> is orthogonal to the uniform state
        let mut amps = vec![Complex64::new(0.0, 0.0); 16];
        amps[0] = Complex64::new(0.5f64.sqrt(), 0.0);
        amps[1] = Complex64::new(-(0.5f64.sqrt()), 0.0);
        let orth = Statevector::from_amplitudes(amps).unwrap();
        let reflected = reflect_about(orth.clone(), &axis).unwrap();
        for (a, b) in reflected.amplitudes().iter().zip(orth.amplitudes()) {
            assert!((a + b).norm() < EPS);
        }

        let small = prepare_state(&[0], 8).unwrap();
        assert!(matches!(
            reflect_about(small, &axis),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(grover_iterations(1), 0);
        assert_eq!(grover_iterations(2), 1);
        assert_eq!(grover_iterations(4), 1);
        assert_eq!(grover_iterations(7), 2);
        assert_eq!(grover_iterations(16), 3);
    }

    #[test]
    fn measure_degenerate_and_deterministic() {
        let counts = measure(&Statevector::basis(5, 16).unwrap(), 1024, 3);
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&5], 1024);

        let s = prepare_state(&SEVEN_MARKED, 16).unwrap();
        let a = measure(&s, 1000, 11);
        assert_eq!(a.values().sum::<u32>(), 1000);
        assert_eq!(a, measure(&s, 1000, 11));
        assert!(a.keys().all(|k| SEVEN_MARKED.contains(k)));
    }

    #[test]
    fn grover_seven_element_example() {
        let out = grover_search(&SEVEN_MARKED, 9, 16, 1024, 7).unwrap();
        assert_eq!(out.iterations, 2);
        assert!(out.decision);
        let (state, _) = amplify(&SEVEN_MARKED, 9, 16).unwrap();
        assert!((state.probability(9) - 0.871_125_126_435_414_1).abs() < 1e-9);
    }

    #[test]
    fn grover_four_element_is_exact() {
        let out = grover_search(&[0, 3, 6, 9], 6, 16, 1024, 1).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.target_count(), 1024);
        assert!(out.decision);
    }

    #[test]
    fn grover_absent_target() {
        let marked = [1, 2, 3, 4];
        let (state, _) = amplify(&marked, 0, 16).unwrap();
        assert_eq!(state, prepare_state(&marked, 16).unwrap());
        let out = grover_search(&marked, 0, 16, 1024, 1).unwrap();
        assert_eq!(out.target_count(), 0);
        assert!(!out.decision);
    }

    #[test]
    fn odd_shot_threshold_is_floor_half() {
        // threshold for 5 shots is 2
        let out = grover_search(&[0, 3, 6, 9], 6, 16, 5, 1).unwrap();
        assert_eq!(out.target_count(), 5);
        assert!(out.decision);
        let out = grover_search(&[2], 2, 16, 1, 1).unwrap();
        assert!(out.decision);
    }

    #[test]
    fn little_endian_rendering() {
        assert_eq!(bitstring_le(1, 4), "1000");
        assert_eq!(bitstring_le(12, 4), "0011");
        let mut counts = BTreeMap::new();
        counts.insert(9usize, 3u32);
        assert_eq!(format_counts(&counts, 4), "1001: 3\n");
    }
}

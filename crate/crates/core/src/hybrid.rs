//! Virtual qubits: the first `k` magic qubits are replaced by a
//! quasi-probability mixture of stabilizer states, so each shot needs a
//! register of only `t - k` qubits. Output probabilities are estimated by
//! importance sampling over the mixture.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run_shot, shot_rng, EngineError, StabilizerGenerator};
use crate::gadgetize::GadgetizedCircuit;
use crate::pauli::Pauli;
use crate::statevector::{BackendError, BackendKind};

/// Largest `k` for which all `3^k` terms are materialized.
pub const TERM_CAP_K: usize = 12;

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("{k} virtual qubits requested but the circuit has {t} magic qubits")]
    TooManyVirtual { k: usize, t: usize },
    #[error("3^{k} terms exceed the enumeration cap 3^{cap}")]
    TooManyTerms { k: usize, cap: usize },
    #[error("{name} must lie in (0, 1), got {value}")]
    Parameter { name: &'static str, value: f64 },
    #[error("output index {index} out of range for {outputs} outputs")]
    Output { index: usize, outputs: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    /// One generator per virtual qubit.
    pub generators: Vec<StabilizerGenerator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub k: usize,
    pub terms: Vec<Term>,
    pub l1_norm: f64,
    pub l2_norm: f64,
}

const fn generator(pauli: Pauli, negative: bool) -> StabilizerGenerator {
    StabilizerGenerator { pauli, negative }
}

/// `|A><A| = ½|+><+| + (1-√2)/2 |-><-| + (1/√2)|+i><+i|`.
const SINGLE: [(f64, StabilizerGenerator); 3] = [
    (0.5, generator(Pauli::X, false)),
    ((1.0 - std::f64::consts::SQRT_2) / 2.0, generator(Pauli::X, true)),
    (std::f64::consts::FRAC_1_SQRT_2, generator(Pauli::Y, false)),
];

fn norms(terms: &[Term]) -> (f64, f64) {
    let l1 = terms.iter().map(|t| t.coefficient.abs()).sum();
    let l2 = terms.iter().map(|t| t.coefficient.powi(2)).sum::<f64>().sqrt();
    (l1, l2)
}

pub fn single_qubit_terms() -> Decomposition {
    let terms: Vec<Term> = SINGLE
        .iter()
        .map(|&(coefficient, g)| Term {
            coefficient,
            generators: vec![g],
        })
        .collect();
    let (l1_norm, l2_norm) = norms(&terms);
    Decomposition {
        k: 1,
        terms,
        l1_norm,
        l2_norm,
    }
}

/// The `k`-fold tensor power of the single-qubit decomposition. Term index
/// digits in base 3 pick the factor per qubit, qubit 0 most significant.
pub fn tensor_terms(k: usize) -> Result<Decomposition, HybridError> {
    if k > TERM_CAP_K {
        return Err(HybridError::TooManyTerms { k, cap: TERM_CAP_K });
    }
    let mut terms = vec![Term {
        coefficient: 1.0,
        generators: Vec::new(),
    }];
    for _ in 0..k {
        terms = terms
            .into_iter()
            .flat_map(|t| {
                SINGLE.iter().map(move |&(c, g)| {
                    let mut generators = t.generators.clone();
                    generators.push(g);
                    Term {
                        coefficient: t.coefficient * c,
                        generators,
                    }
                })
            })
            .collect();
    }
    let (l1_norm, l2_norm) = norms(&terms);
    Ok(Decomposition {
        k,
        terms,
        l1_norm,
        l2_norm,
    })
}

/// Draws a tensor-product term with probability `|α_i| / ||α||_1` without
/// enumerating the terms. Returns its sign and generators.
pub fn sample_term(k: usize, rng: &mut dyn RngCore) -> (bool, Vec<StabilizerGenerator>) {
    let weights: Vec<f64> = SINGLE.iter().map(|(c, _)| c.abs()).collect();
    let total: f64 = weights.iter().sum();
    let mut negative = false;
    let mut gens = Vec::with_capacity(k);
    for _ in 0..k {
        let mut u = rng.random::<f64>() * total;
        let mut pick = SINGLE.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                pick = i;
                break;
            }
            u -= w;
        }
        let (c, g) = SINGLE[pick];
        negative ^= c < 0.0;
        gens.push(g);
    }
    (negative, gens)
}

fn l1_for(k: usize) -> f64 {
    2f64.powf(k as f64 / 2.0)
}

fn l2_for(k: usize) -> f64 {
    let single: f64 = SINGLE.iter().map(|(c, _)| c * c).sum();
    single.powf(k as f64 / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub k: usize,
    pub epsilon: f64,
    pub p_fail: f64,
    /// Samples for the importance-sampling estimator.
    pub n: u64,
    /// Total samples of the uniform-over-terms estimator with a Chebyshev
    /// interval.
    pub n_naive: u64,
    pub l1: f64,
    pub l2: f64,
}

fn check_unit(name: &'static str, value: f64) -> Result<(), HybridError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(HybridError::Parameter { name, value })
    }
}

pub fn plan(k: usize, epsilon: f64, p_fail: f64) -> Result<SamplingPlan, HybridError> {
    check_unit("epsilon", epsilon)?;
    check_unit("p_fail", p_fail)?;
    let l1 = l1_for(k);
    let l2 = l2_for(k);
    let n = (l1 * l1 / (2.0 * epsilon * epsilon) * (2.0 / p_fail).ln()).ceil() as u64;
    // Chebyshev: confidence 1 - 1/c^2 = 1 - p_fail.
    let c = 1.0 / p_fail.sqrt();
    let n_naive = (3f64.powi(k as i32) * (c * l2 / epsilon).powi(2)).ceil() as u64;
    Ok(SamplingPlan {
        k,
        epsilon,
        p_fail,
        n: n.max(1),
        n_naive,
        l1,
        l2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub upper_rate: f64,
    pub lower_rate: f64,
    /// `2^{upper_rate k} / ε²`
    pub upper: f64,
    /// `2^{lower_rate k} / ε²`
    pub lower: f64,
    /// Stabilizer 1/2-Rényi entropy of `|A>^k`.
    pub m_half: f64,
}

pub const UPPER_RATE: f64 = 0.7374;
pub const LOWER_RATE: f64 = 0.5431;

pub fn bounds(k: usize, epsilon: f64) -> RateBounds {
    let k = k as f64;
    RateBounds {
        upper_rate: UPPER_RATE,
        lower_rate: LOWER_RATE,
        upper: 2f64.powf(UPPER_RATE * k) / (epsilon * epsilon),
        lower: 2f64.powf(LOWER_RATE * k) / (epsilon * epsilon),
        m_half: 2.0 * ((std::f64::consts::SQRT_2 + 1.0) / 2.0).log2() * k,
    }
}

/// `η = ½ - ½ sign (-1)^y ||α||_1`.
pub fn eta(negative: bool, y: bool, l1: f64) -> f64 {
    let s = if negative ^ y { -1.0 } else { 1.0 };
    0.5 - 0.5 * s * l1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridSample {
    pub negative: bool,
    pub generators: String,
    pub y: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// Index into the circuit's output bits.
    pub output: usize,
    pub p_hat: f64,
    pub half_width: f64,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<HybridSample>>,
}

fn generators_string(gens: &[StabilizerGenerator]) -> String {
    gens.iter()
        .map(|g| format!("{}{}", if g.negative { '-' } else { '+' }, g.pauli.as_char()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Estimates the probability that output bit `output` is 1 with `k` virtual
/// qubits. Iteration `i` uses `shot_rng(seed, i)` for both the term draw and
/// the shot; the mean is summed in iteration order.
#[allow(clippy::too_many_arguments)]
pub fn estimate(
    gc: &GadgetizedCircuit,
    output: usize,
    k: usize,
    epsilon: f64,
    p_fail: f64,
    backend: BackendKind,
    seed: u64,
    keep_samples: bool,
) -> Result<Estimate, HybridError> {
    if k > gc.t {
        return Err(HybridError::TooManyVirtual { k, t: gc.t });
    }
    if output >= gc.output_cbits.len() {
        return Err(HybridError::Output {
            index: output,
            outputs: gc.output_cbits.len(),
        });
    }
    let sp = plan(k, epsilon, p_fail)?;
    let q = gc.t - k;
    backend.check_capacity(q)?;
    let draws = (0..sp.n)
        .into_par_iter()
        .map(|i| -> Result<(bool, Vec<StabilizerGenerator>, bool), HybridError> {
            let mut rng = shot_rng(seed, i);
            let (negative, gens) = sample_term(k, &mut rng);
            let mut b = backend.create(q)?;
            let r = run_shot(gc, &gens, b.as_mut(), &mut rng)?;
            Ok((negative, gens, r.output_bits[output]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let lo = (1.0 - sp.l1) / 2.0 - 1e-12;
    let hi = (1.0 + sp.l1) / 2.0 + 1e-12;
    let mut sum = 0.0;
    for (negative, _, y) in &draws {
        let e = eta(*negative, *y, sp.l1);
        debug_assert!(e >= lo && e <= hi);
        sum += e;
    }
    let samples = keep_samples.then(|| {
        draws
            .iter()
            .map(|(negative, gens, y)| HybridSample {
                negative: *negative,
                generators: generators_string(gens),
                y: *y as u8,
            })
            .collect()
    });
    Ok(Estimate {
        output,
        p_hat: sum / sp.n as f64,
        half_width: epsilon,
        n: sp.n,
        samples,
    })
}

/// Per-output seed so that each output bit gets an independent budget.
pub fn output_seed(seed: u64, output: usize) -> u64 {
    seed ^ (output as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    pub k: usize,
    pub epsilon: f64,
    pub p_fail: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub l1: f64,
    pub estimates: Vec<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// Estimates every listed output bit with its own budget.
pub fn estimate_all(
    gc: &GadgetizedCircuit,
    outputs: &[usize],
    k: usize,
    epsilon: f64,
    p_fail: f64,
    backend: BackendKind,
    seed: u64,
    keep_samples: bool,
) -> Result<HybridReport, HybridError> {
    let sp = plan(k, epsilon, p_fail)?;
    let estimates = outputs
        .iter()
        .map(|&o| estimate(gc, o, k, epsilon, p_fail, backend, output_seed(seed, o), keep_samples))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HybridReport {
        k,
        epsilon,
        p_fail,
        n: sp.n,
        l1: sp.l1,
        estimates,
        wall_time: None,
    })
}

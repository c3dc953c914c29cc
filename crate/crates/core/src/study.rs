//! Optimal `N` for the `|1⟩`/`|N⟩` superposition under loss, and the study
//! of random components `Σ_{n≥1} √p_n |n⟩`.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fock::{FockVector, TruncationPolicy};
use crate::interferometer::CountingModel;
use crate::probes::{solve_energy_constraint, PathSymmetricProbe, ProbeFamily};

/// Phase at which counting sensitivities are compared.
pub const DEFAULT_PHI_EVAL: f64 = 1.0;
/// Largest `N` accepted by the optimal-`N` scan.
pub const MAX_SCAN_N: usize = 200;
/// Relative tolerance defining ties in the optimal-`N` scan.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub t: f64,
    pub n_av: f64,
    /// Every `N` within the tie tolerance of the optimum, ascending.
    pub best_n_set: Vec<usize>,
    pub best_sensitivity: f64,
    /// `(N, 1/F)` for every scanned `N`.
    pub scanned: Vec<(usize, f64)>,
}

/// `1/F` of photon counting for `QOOQ(N)` at energy `n_av`.
pub fn qooq_inverse_fi(n: usize, n_av: f64, t: f64, phi: f64) -> Result<f64> {
    let spec = solve_energy_constraint(ProbeFamily::OneN { n }, n_av)?;
    let probe = PathSymmetricProbe::from_spec(&spec, &TruncationPolicy::default())?;
    let f = CountingModel::new(&probe, t)?.fisher_information(phi);
    Ok(if f > 0.0 { 1.0 / f } else { f64::INFINITY })
}

/// Feasible part of a requested `N` range at energy `n_av`.
pub fn feasible_n_range(n_av: f64, requested: RangeInclusive<usize>) -> Option<RangeInclusive<usize>> {
    let lo = (*requested.start()).max(n_av.ceil() as usize + 1);
    let hi = (*requested.end()).min(MAX_SCAN_N);
    (lo <= hi).then_some(lo..=hi)
}

/// Exhaustive scan of `N` over the feasible part of `n_range`.
///
/// The sensitivity must be unimodal in `N` (non-increasing, then
/// non-decreasing, up to the tie tolerance); otherwise the scan aborts.
pub fn optimize_qooq_n(t: f64, n_av: f64, n_range: RangeInclusive<usize>, phi_eval: f64) -> Result<OptimizationResult> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!("transmittance {t} outside (0, 1]")));
    }
    let range = feasible_n_range(n_av, n_range.clone())
        .ok_or_else(|| Error::Infeasible(format!("no N in {n_range:?} is feasible at n_av = {n_av}")))?;
    let scanned = range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| qooq_inverse_fi(n, n_av, t, phi_eval).map(|s| (n, s)))
        .collect::<Result<Vec<_>>>()?;
    check_unimodal(&scanned)?;
    let best = scanned.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    let best_n_set = scanned
        .iter()
        .filter(|&&(_, s)| s <= best * (1.0 + TIE_TOLERANCE))
        .map(|&(n, _)| n)
        .collect();
    Ok(OptimizationResult {
        t,
        n_av,
        best_n_set,
        best_sensitivity: best,
        scanned,
    })
}

fn check_unimodal(scanned: &[(usize, f64)]) -> Result<()> {
    let rising = |a: f64, b: f64| b > a * (1.0 + TIE_TOLERANCE);
    let falling = |a: f64, b: f64| b < a * (1.0 - TIE_TOLERANCE);
    let mut turned = false;
    for w in scanned.windows(2) {
        let ((_, a), (n, b)) = (w[0], w[1]);
        if rising(a, b) {
            turned = true;
        } else if turned && falling(a, b) {
            return Err(Error::NotUnimodal(format!("sensitivity falls again at N = {n}")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub id: u64,
    pub n_av: f64,
    /// `1/F` of photon counting at the evaluation phase.
    pub inv_fi: f64,
    /// SHA-256 of the weights `p_1..p_K` as little-endian `f64`s.
    pub weights_digest: String,
}

/// Flat Dirichlet draw of `k` weights for sample `id`; the generator for each
/// sample is its own stream of the master seed, so samples are independent of
/// evaluation order.
pub fn simplex_weights(seed: u64, id: u64, k: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

fn digest(weights: &[f64]) -> String {
    let mut h = Sha256::new();
    for w in weights {
        h.update(w.to_le_bytes());
    }
    hex::encode(h.finalize())
}

pub fn sample_random_components(
    count: usize,
    n_support_max: usize,
    seed: u64,
    t: f64,
    phi_eval: f64,
) -> Result<Vec<SampleRecord>> {
    if count == 0 || n_support_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "need count >= 1 and support >= 2, got {count} and {n_support_max}"
        )));
    }
    (0..count as u64)
        .into_par_iter()
        .map(|id| {
            let weights = simplex_weights(seed, id, n_support_max);
            let mut amps = vec![Complex64::new(0.0, 0.0)];
            amps.extend(weights.iter().map(|w| Complex64::new(w.sqrt(), 0.0)));
            let probe = PathSymmetricProbe::assemble(FockVector::new(amps, 0.0)?)?;
            let f = CountingModel::new(&probe, t)?.fisher_information(phi_eval);
            Ok(SampleRecord {
                id,
                n_av: probe.n_av(),
                inv_fi: if f > 0.0 { 1.0 / f } else { f64::INFINITY },
                weights_digest: digest(&weights),
            })
        })
        .collect()
}

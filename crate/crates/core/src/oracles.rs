//! Brute-force reference models for small probes: the full interferometer with
//! one environment mode per arm, and finite-difference Fisher information.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::TwoModeState;
use crate::interferometer::{photon_counting_pmf, OutcomePmf};
use crate::metrology::PhaseGenerator;
use crate::probes::PathSymmetricProbe;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub n_max_small: usize,
    pub fd_step: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_max_small: 8,
            fd_step: 1e-5,
        }
    }
}

impl OracleConfig {
    pub fn new(n_max_small: usize, fd_step: f64) -> Result<Self> {
        if n_max_small > 8 {
            return Err(Error::InvalidArgument(format!("oracle cutoff {n_max_small} exceeds 8")));
        }
        if !(fd_step > 1e-8 && fd_step < 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "finite-difference step {fd_step} outside (1e-8, 1e-2)"
            )));
        }
        Ok(OracleConfig { n_max_small, fd_step })
    }
}

/// Four-mode amplitudes `ψ[a][b][e_a][e_b]` on `dim` levels per mode.
struct FourMode {
    dim: usize,
    amps: Vec<Complex64>,
}

impl FourMode {
    fn idx(&self, a: usize, b: usize, ea: usize, eb: usize) -> usize {
        ((a * self.dim + b) * self.dim + ea) * self.dim + eb
    }

    /// Beam splitter between a system mode and its environment mode.
    fn lose(&mut self, arm: usize, t: f64) -> Result<()> {
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for other in 0..d {
            for other_env in 0..d {
                let slice = DMatrix::from_fn(d, d, |s, e| {
                    let i = if arm == 0 {
                        self.idx(s, other, e, other_env)
                    } else {
                        self.idx(other, s, other_env, e)
                    };
                    self.amps[i]
                });
                let mixed = TwoModeState::from_matrix(slice)?.beam_splitter_apply(t)?;
                for s in 0..d {
                    for e in 0..d {
                        let i = if arm == 0 {
                            self.idx(s, other, e, other_env)
                        } else {
                            self.idx(other, s, other_env, e)
                        };
                        out[i] = mixed.get(s, e);
                    }
                }
            }
        }
        self.amps = out;
        Ok(())
    }
}

/// Counting distribution from the explicit interferometer: phase shift with
/// `generator`, a beam splitter of transmittance `t` into a fresh environment
/// mode on each arm, then, for every environment outcome, a fixed `π/2` phase
/// on arm `b`, a 50:50 beam splitter and number-basis detection.
pub fn full_mzi_pmf(
    probe: &PathSymmetricProbe,
    phi: f64,
    t: f64,
    generator: PhaseGenerator,
    cfg: &OracleConfig,
) -> Result<OutcomePmf> {
    let support = probe.support_max();
    if support > cfg.n_max_small {
        return Err(Error::OracleScaleExceeded(format!(
            "probe support {support} exceeds oracle cutoff {}",
            cfg.n_max_small
        )));
    }
    let dim = support + 1;
    let input = probe.two_mode_state();
    let mut state = FourMode {
        dim,
        amps: vec![Complex64::new(0.0, 0.0); dim.pow(4)],
    };
    for a in 0..dim {
        for b in 0..dim {
            let i = state.idx(a, b, 0, 0);
            state.amps[i] = input.get(a, b) * generator.phase(a, b, phi);
        }
    }
    state.lose(0, t)?;
    state.lose(1, t)?;

    let mut table: Vec<Vec<f64>> = (0..dim).map(|n| vec![0.0; n + 1]).collect();
    for ea in 0..dim {
        for eb in 0..dim {
            let branch = DMatrix::from_fn(dim, dim, |a, b| {
                state.amps[state.idx(a, b, ea, eb)] * Complex64::from_polar(1.0, FRAC_PI_2 * b as f64)
            });
            let out = TwoModeState::from_matrix(branch)?.beam_splitter_apply(0.5)?;
            for a in 0..dim {
                for b in 0..dim - a {
                    table[a + b][a] += out.get(a, b).norm_sqr();
                }
            }
        }
    }
    OutcomePmf::from_table(table)
}

/// `Σ (Δp/Δφ)²/p` with central differences of the counting distribution.
pub fn finite_difference_fi(probe: &PathSymmetricProbe, phi: f64, t: f64, cfg: &OracleConfig) -> Result<f64> {
    let h = cfg.fd_step;
    let mid = photon_counting_pmf(probe, phi, t)?;
    let hi = photon_counting_pmf(probe, phi + h, t)?;
    let lo = photon_counting_pmf(probe, phi - h, t)?;
    let mut f = 0.0;
    for ((rm, rh), rl) in mid.rows().iter().zip(hi.rows()).zip(lo.rows()) {
        for ((p, ph), pl) in rm.iter().zip(rh).zip(rl) {
            if *p > 1e-14 {
                let d = (ph - pl) / (2.0 * h);
                f += d * d / p;
            }
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::TruncationPolicy;
    use crate::interferometer::{classical_fi, parity_expectation};
    use crate::probes::ProbeSpec;

    fn probe(spec: ProbeSpec) -> PathSymmetricProbe {
        PathSymmetricProbe::from_spec(&spec, &TruncationPolicy::default()).unwrap()
    }

    fn assert_pmf_close(a: &OutcomePmf, b: &OutcomePmf, tol: f64) {
        for n in 0..=a.n_max().max(b.n_max()) {
            for na in 0..=n {
                let (x, y) = (a.get(na, n - na), b.get(na, n - na));
                assert!((x - y).abs() < tol, "({na}, {}): {x} vs {y}", n - na);
            }
        }
    }

    #[test]
    fn single_photon_lossless() {
        let p = probe(ProbeSpec::Number { n: 1 });
        let phi = 0.9;
        let pmf = full_mzi_pmf(&p, phi, 1.0, PhaseGenerator::TwoArmSymmetric, &OracleConfig::default()).unwrap();
        assert!((pmf.get(1, 0) - (1.0 - phi.cos()) / 2.0).abs() < 1e-12);
        assert!((pmf.get(0, 1) - (1.0 + phi.cos()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_photons_under_loss() {
        let p = probe(ProbeSpec::Number { n: 2 });
        let cfg = OracleConfig::default();
        for g in [PhaseGenerator::TwoArmSymmetric, PhaseGenerator::SingleArm] {
            let oracle = full_mzi_pmf(&p, 0.7, 0.8, g, &cfg).unwrap();
            assert_pmf_close(&oracle, &photon_counting_pmf(&p, 0.7, 0.8).unwrap(), 1e-9);
            assert!(oracle.deficit().abs() < 1e-12);
        }
    }

    #[test]
    fn parity_at_origin() {
        let p = probe(ProbeSpec::OneN { q: 0.5, n: 3 });
        let pmf = full_mzi_pmf(&p, 0.0, 0.9, PhaseGenerator::TwoArmSymmetric, &OracleConfig::default()).unwrap();
        assert!((pmf.parity_a() - parity_expectation(&p, 0.0, 0.9).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn scale_limit() {
        let p = probe(ProbeSpec::Number { n: 9 });
        assert!(matches!(
            full_mzi_pmf(&p, 0.1, 0.9, PhaseGenerator::SingleArm, &OracleConfig::default()),
            Err(Error::OracleScaleExceeded(_))
        ));
        assert!(OracleConfig::new(9, 1e-5).is_err());
        assert!(OracleConfig::new(4, 0.1).is_err());
    }

    #[test]
    fn finite_difference_examples() {
        let cfg = OracleConfig::default();
        let noon = probe(ProbeSpec::Number { n: 3 });
        assert!((finite_difference_fi(&noon, 0.8, 1.0, &cfg).unwrap() - 9.0).abs() < 1e-4);
        assert!(finite_difference_fi(&noon, 0.8, 0.0, &cfg).unwrap().abs() < 1e-10);
        let two = probe(ProbeSpec::Number { n: 2 });
        let fd = finite_difference_fi(&two, 1.0, 0.9, &cfg).unwrap();
        let exact = classical_fi(&two, 1.0, 0.9).unwrap();
        assert!((fd - exact).abs() / exact < 1e-5);
    }
}

//! Quantum Fisher information, Cramér-Rao bounds and the shot-noise limit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::probes::PathSymmetricProbe;

/// Generator of the phase shift applied inside the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseGenerator {
    /// `(n̂_a − n̂_b)/2`, i.e. `e^{−iφ(n̂_a−n̂_b)/2}`.
    #[default]
    TwoArmSymmetric,
    /// `n̂_b`, i.e. `e^{iφ n̂_b}`.
    SingleArm,
}

impl PhaseGenerator {
    /// Eigenvalue of the generator on `|n_a, n_b⟩`.
    pub fn eigenvalue(self, n_a: usize, n_b: usize) -> f64 {
        match self {
            PhaseGenerator::TwoArmSymmetric => (n_a as f64 - n_b as f64) / 2.0,
            PhaseGenerator::SingleArm => n_b as f64,
        }
    }

    /// Phase acquired by `|n_a, n_b⟩` under a shift of `phi`.
    pub fn phase(self, n_a: usize, n_b: usize, phi: f64) -> Complex64 {
        let arg = match self {
            PhaseGenerator::TwoArmSymmetric => -phi * self.eigenvalue(n_a, n_b),
            PhaseGenerator::SingleArm => phi * n_b as f64,
        };
        Complex64::from_polar(1.0, arg)
    }
}

impl fmt::Display for PhaseGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseGenerator::TwoArmSymmetric => "two-arm",
            PhaseGenerator::SingleArm => "single-arm",
        })
    }
}

impl FromStr for PhaseGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-arm" => Ok(PhaseGenerator::TwoArmSymmetric),
            "single-arm" => Ok(PhaseGenerator::SingleArm),
            _ => Err(Error::InvalidArgument(format!("unknown generator `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiReport {
    pub f_q: f64,
    pub qcrb: f64,
    pub n_av: f64,
    pub mandel_q: f64,
    pub p0: f64,
    pub repetitions: u32,
}

/// `4 Var(G)` evaluated on the materialized two-mode state.
pub fn qfi_pure(probe: &PathSymmetricProbe, generator: PhaseGenerator) -> f64 {
    let state = probe.two_mode_state();
    let n = state.n_max();
    let (mut m1, mut m2) = (0.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let w = state.get(i, j).norm_sqr();
            if w == 0.0 {
                continue;
            }
            let g = generator.eigenvalue(i, j);
            m1 += w * g;
            m2 += w * g * g;
        }
    }
    4.0 * (m2 - m1 * m1)
}

/// `⟨n̂⟩(⟨n̂⟩ + 1 + Q_M)/(1 + p₀)`.
pub fn qfi_closed_form(mean: f64, mandel_q: f64, p0: f64) -> f64 {
    mean * (mean + 1.0 + mandel_q) / (1.0 + p0)
}

/// Closed-form QFI from the component's own moments; defined for the vacuum too.
pub fn qfi_of_probe(probe: &PathSymmetricProbe) -> f64 {
    let p = probe.probabilities();
    let m2: f64 = p.iter().enumerate().map(|(n, w)| (n * n) as f64 * w).sum();
    m2 / (1.0 + probe.p0())
}

pub fn qcrb(f_q: f64, repetitions: u32) -> Result<f64> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
    }
    if !(f_q > 0.0) {
        return Err(Error::UninformativeProbe);
    }
    Ok(1.0 / (repetitions as f64 * f_q))
}

/// Shot-noise limit `1/N_av`.
pub fn snl(n_av: f64) -> f64 {
    1.0 / n_av
}

pub fn qfi_report(probe: &PathSymmetricProbe, repetitions: u32) -> Result<QfiReport> {
    let moments = probe.component().number_moments();
    let mandel_q = probe.component().mandel_q()?;
    let f_q = qfi_closed_form(moments.mean, mandel_q, probe.p0());
    Ok(QfiReport {
        f_q,
        qcrb: qcrb(f_q, repetitions)?,
        n_av: probe.n_av(),
        mandel_q,
        p0: probe.p0(),
        repetitions,
    })
}

/// Eigenvector of a block-diagonal mixture, supported on `|n,0⟩` and `|0,n⟩`.
/// For `n = 0` both amplitudes refer to `|0,0⟩` and only `amps[0]` is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigenvector {
    pub n: usize,
    pub weight: f64,
    pub amps: [Complex64; 2],
}

impl BlockEigenvector {
    fn entries(&self) -> Vec<((usize, usize), Complex64)> {
        if self.n == 0 {
            vec![((0, 0), self.amps[0])]
        } else {
            vec![((self.n, 0), self.amps[0]), ((0, self.n), self.amps[1])]
        }
    }
}

/// Mixed state that is block diagonal in the total photon number, with
/// each block living on `{|n,0⟩, |0,n⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoonMixture {
    n_max: usize,
    eigen: Vec<BlockEigenvector>,
}

const ORTHO_TOL: f64 = 1e-10;

impl NoonMixture {
    pub fn new(n_max: usize, eigen: Vec<BlockEigenvector>) -> Result<Self> {
        let total: f64 = eigen.iter().map(|e| e.weight).sum();
        if (total - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidMixedState(format!("weights sum to {total}")));
        }
        for e in &eigen {
            if e.n > n_max {
                return Err(Error::InvalidMixedState(format!("block {} beyond cutoff {n_max}", e.n)));
            }
            if e.weight < -1e-15 || !e.weight.is_finite() {
                return Err(Error::InvalidMixedState(format!(
                    "weight {} in block {}",
                    e.weight, e.n
                )));
            }
        }
        for (i, u) in eigen.iter().enumerate() {
            for v in &eigen[i..] {
                let ip = sparse_inner(&u.entries(), &v.entries(), |_, _| 1.0);
                let expect = if std::ptr::eq(u, v) { 1.0 } else { 0.0 };
                if (ip - expect).norm() > ORTHO_TOL {
                    return Err(Error::InvalidMixedState(format!(
                        "eigenvectors in blocks {} and {} are not orthonormal",
                        u.n, v.n
                    )));
                }
            }
        }
        Ok(NoonMixture { n_max, eigen })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn eigen(&self) -> &[BlockEigenvector] {
        &self.eigen
    }

    /// Supplied eigenvectors plus zero-weight vectors spanning the rest of
    /// every `{|n,0⟩, |0,n⟩}` block.
    fn completed(&self) -> Vec<BlockEigenvector> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut out = self.eigen.clone();
        for n in 0..=self.n_max {
            let given: Vec<&BlockEigenvector> = self.eigen.iter().filter(|e| e.n == n).collect();
            if n == 0 {
                if given.is_empty() {
                    out.push(BlockEigenvector {
                        n,
                        weight: 0.0,
                        amps: [one, zero],
                    });
                }
                continue;
            }
            match given.len() {
                0 => {
                    out.push(BlockEigenvector {
                        n,
                        weight: 0.0,
                        amps: [one, zero],
                    });
                    out.push(BlockEigenvector {
                        n,
                        weight: 0.0,
                        amps: [zero, one],
                    });
                }
                1 => {
                    let [a, b] = given[0].amps;
                    out.push(BlockEigenvector {
                        n,
                        weight: 0.0,
                        amps: [-b.conj(), a.conj()],
                    });
                }
                _ => {}
            }
        }
        out
    }
}

fn sparse_inner(
    u: &[((usize, usize), Complex64)],
    v: &[((usize, usize), Complex64)],
    g: impl Fn(usize, usize) -> f64,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(ku, au) in u {
        for &(kv, av) in v {
            if ku == kv {
                acc += au.conj() * av * g(ku.0, ku.1);
            }
        }
    }
    acc
}

/// Phase-averaged form of the probe: weight `p_n/(1+p₀)` on
/// `(|n,0⟩+|0,n⟩)/√2` for `n ≥ 1` and `2p₀/(1+p₀)` on `|0,0⟩`.
pub fn phase_averaged_state(probe: &PathSymmetricProbe) -> NoonMixture {
    let p = probe.probabilities();
    let denom = 1.0 + probe.p0();
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut eigen = Vec::new();
    if p[0] > 0.0 {
        eigen.push(BlockEigenvector {
            n: 0,
            weight: 2.0 * p[0] / denom,
            amps: [Complex64::new(1.0, 0.0); 2],
        });
    }
    for (n, &pn) in p.iter().enumerate().skip(1) {
        if pn > 0.0 {
            eigen.push(BlockEigenvector {
                n,
                weight: pn / denom,
                amps: [h, h],
            });
        }
    }
    // Truncation leaves the weights short of 1 by at most the tail bound.
    let total: f64 = eigen.iter().map(|e| e.weight).sum();
    for e in &mut eigen {
        e.weight /= total;
    }
    NoonMixture {
        n_max: p.len() - 1,
        eigen,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedQfi {
    pub f_q: f64,
    /// Contribution of states outside the completed block basis; zero for
    /// any block-diagonal mixture with a diagonal generator.
    pub residual: f64,
}

/// `2 Σ (λᵢ−λⱼ)²/(λᵢ+λⱼ) |⟨i|G|j⟩|²` over the completed eigen-system.
pub fn qfi_mixed(mixed: &NoonMixture, generator: PhaseGenerator) -> MixedQfi {
    let basis = mixed.completed();
    let entries: Vec<_> = basis.iter().map(|e| e.entries()).collect();
    let g = |a: usize, b: usize| generator.eigenvalue(a, b);
    let mut f_q = 0.0;
    let mut residual = 0.0;
    for (i, ei) in basis.iter().enumerate() {
        let mut captured = 0.0;
        for (j, ej) in basis.iter().enumerate() {
            let gij = sparse_inner(&entries[i], &entries[j], g).norm_sqr();
            captured += gij;
            let s = ei.weight + ej.weight;
            if s < 1e-14 {
                continue;
            }
            let d = ei.weight - ej.weight;
            f_q += 2.0 * d * d / s * gij;
        }
        if ei.weight > 1e-14 {
            // Each pair (i, k) with k outside the basis enters twice with weight λᵢ.
            let g_norm: f64 = entries[i]
                .iter()
                .map(|&((a, b), c)| c.norm_sqr() * g(a, b).powi(2))
                .sum();
            residual += 4.0 * ei.weight * (g_norm - captured);
        }
    }
    MixedQfi {
        f_q: f_q + residual,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockVector, TruncationPolicy};
    use crate::probes::{solve_energy_constraint, ProbeFamily, ProbeSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn probe(family: ProbeFamily, nav: f64) -> PathSymmetricProbe {
        let spec = solve_energy_constraint(family, nav).unwrap();
        PathSymmetricProbe::from_spec(&spec, &TruncationPolicy::default()).unwrap()
    }

    const FAMILIES: [ProbeFamily; 4] = [
        ProbeFamily::Number,
        ProbeFamily::Coherent,
        ProbeFamily::SqueezedVacuum,
        ProbeFamily::OneN { n: 8 },
    ];

    #[test]
    fn noon_two_is_four() {
        let p = probe(ProbeFamily::Number, 2.0);
        assert_abs_diff_eq!(qfi_pure(&p, PhaseGenerator::TwoArmSymmetric), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(qfi_closed_form(2.0, -1.0, 0.0), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn qooq_hundred_at_two() {
        let p = probe(ProbeFamily::OneN { n: 100 }, 2.0);
        assert_abs_diff_eq!(qfi_pure(&p, PhaseGenerator::TwoArmSymmetric), 102.0, epsilon = 1e-9);
        assert_abs_diff_eq!(qcrb(102.0, 1).unwrap(), 0.0098039, epsilon = 1e-7);
    }

    #[test]
    fn vacuum_has_no_information() {
        let p = PathSymmetricProbe::assemble(FockVector::vacuum(0)).unwrap();
        assert_eq!(qfi_pure(&p, PhaseGenerator::TwoArmSymmetric), 0.0);
        assert_eq!(qfi_of_probe(&p), 0.0);
        assert!(matches!(qcrb(0.0, 1), Err(Error::UninformativeProbe)));
        assert!(matches!(qfi_report(&p, 1), Err(Error::ZeroEnergy)));
    }

    #[test]
    fn closed_form_examples() {
        let e = (-1.0f64).exp();
        assert_abs_diff_eq!(qfi_closed_form(1.0, 0.0, e), 2.0 / (1.0 + e), epsilon = 1e-15);
        assert_abs_diff_eq!(qfi_closed_form(1.0, 0.0, e), 1.4621, epsilon = 1e-4);
        for n in 1..=10 {
            assert_eq!(qfi_closed_form(n as f64, -1.0, 0.0), (n * n) as f64);
        }

        let r: f64 = 0.8;
        let mean = r.sinh().powi(2);
        let p0 = 1.0 / r.cosh();
        let p =
            PathSymmetricProbe::from_spec(&ProbeSpec::SqueezedVacuum { r, theta: 0.0 }, &Default::default()).unwrap();
        let expected = (3.0 * mean * mean + 2.0 * mean) / (1.0 + p0);
        let pure = qfi_pure(&p, PhaseGenerator::TwoArmSymmetric);
        assert!((pure - expected).abs() / expected < 1e-9);
    }

    #[test]
    fn pure_matches_closed_form_on_grid() {
        for family in FAMILIES.into_iter().chain([ProbeFamily::OneN { n: 100 }]) {
            for nav in [1.0, 2.0, 3.0, 4.0, 5.0] {
                let p = probe(family, nav);
                let pure = qfi_pure(&p, PhaseGenerator::TwoArmSymmetric);
                let report = qfi_report(&p, 1).unwrap();
                assert!((pure - report.f_q).abs() / report.f_q < 1e-9, "{family:?} at {nav}");
                assert_abs_diff_eq!(report.qcrb * report.f_q, 1.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn single_arm_pure_qfi_differs_for_coherent() {
        let p = probe(ProbeFamily::Coherent, 2.0);
        let two = qfi_pure(&p, PhaseGenerator::TwoArmSymmetric);
        let one = qfi_pure(&p, PhaseGenerator::SingleArm);
        assert!((one - two).abs() > 1e-3, "{one} vs {two}");
    }

    #[test]
    fn phase_averaged_weights() {
        let p = probe(ProbeFamily::Number, 3.0);
        let m = phase_averaged_state(&p);
        assert_eq!(m.eigen().len(), 1);
        assert_eq!((m.eigen()[0].n, m.eigen()[0].weight), (3, 1.0));

        let p = PathSymmetricProbe::from_spec(
            &ProbeSpec::Coherent {
                alpha: Complex64::new(1.0, 0.0),
            },
            &Default::default(),
        )
        .unwrap();
        let m = phase_averaged_state(&p);
        let e = (-1.0f64).exp();
        let mut fact = 1.0;
        for ev in m.eigen() {
            if ev.n > 0 {
                fact *= ev.n as f64;
            }
            let expected = if ev.n == 0 {
                2.0 * e / (1.0 + e)
            } else {
                e / (fact * (1.0 + e))
            };
            assert_abs_diff_eq!(ev.weight, expected, epsilon = 1e-12);
        }
        let total: f64 = m.eigen().iter().map(|e| e.weight).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_qfi_single_block() {
        for n in 1..=6 {
            let p = probe(ProbeFamily::Number, n as f64);
            let m = phase_averaged_state(&p);
            for g in [PhaseGenerator::TwoArmSymmetric, PhaseGenerator::SingleArm] {
                assert_abs_diff_eq!(qfi_mixed(&m, g).f_q, (n * n) as f64, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mixed_qfi_matches_closed_form_for_both_generators() {
        for family in FAMILIES {
            let p = probe(family, 2.0);
            let expected = qfi_of_probe(&p);
            let m = phase_averaged_state(&p);
            for g in [PhaseGenerator::TwoArmSymmetric, PhaseGenerator::SingleArm] {
                let q = qfi_mixed(&m, g);
                assert!(
                    (q.f_q - expected).abs() < 1e-9 * expected.max(1.0),
                    "{family:?} {g}: {}",
                    q.f_q
                );
                assert!(q.residual.abs() < 1e-12, "residual {}", q.residual);
            }
        }
    }

    #[test]
    fn non_orthonormal_mixture_is_rejected() {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let bad = vec![
            BlockEigenvector {
                n: 1,
                weight: 0.5,
                amps: [h, h],
            },
            BlockEigenvector {
                n: 1,
                weight: 0.5,
                amps: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            },
        ];
        assert!(matches!(NoonMixture::new(2, bad), Err(Error::InvalidMixedState(_))));
        let unnormalized = vec![BlockEigenvector {
            n: 1,
            weight: 1.0,
            amps: [h, Complex64::new(0.0, 0.0)],
        }];
        assert!(NoonMixture::new(2, unnormalized).is_err());
        let short = vec![BlockEigenvector {
            n: 1,
            weight: 0.5,
            amps: [h, h],
        }];
        assert!(NoonMixture::new(2, short).is_err());
    }

    #[test]
    fn explicit_two_vector_block() {
        // An equal mixture of noon⁺ and noon⁻ carries no phase information.
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let m = NoonMixture::new(
            3,
            vec![
                BlockEigenvector {
                    n: 3,
                    weight: 0.5,
                    amps: [h, h],
                },
                BlockEigenvector {
                    n: 3,
                    weight: 0.5,
                    amps: [h, -h],
                },
            ],
        )
        .unwrap();
        assert_abs_diff_eq!(qfi_mixed(&m, PhaseGenerator::TwoArmSymmetric).f_q, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qcrb_scaling_and_snl() {
        assert_eq!(qcrb(4.0, 1).unwrap(), 0.25);
        assert_eq!(qcrb(7.0, 4).unwrap(), qcrb(7.0, 1).unwrap() / 4.0);
        assert!(qcrb(1.0, 0).is_err());
        assert_eq!((snl(2.0), snl(1.0), snl(4.0)), (0.5, 1.0, 0.25));
    }

    #[test]
    fn ratio_ordering_noon_aooa_soos() {
        for nav in [1.0, 2.0, 3.0, 4.0, 5.0] {
            let f: Vec<f64> = [ProbeFamily::Number, ProbeFamily::Coherent, ProbeFamily::SqueezedVacuum]
                .into_iter()
                .map(|fam| qfi_of_probe(&probe(fam, nav)) / nav)
                .collect();
            assert!(f[0] < f[1] && f[1] < f[2], "{nav}: {f:?}");
        }
    }

    #[test]
    fn qooq_hundred_beats_soos() {
        for nav in [1.25, 1.5, 2.0, 3.0, 4.0, 5.0] {
            let q = qfi_of_probe(&probe(ProbeFamily::OneN { n: 100 }, nav));
            let s = qfi_of_probe(&probe(ProbeFamily::SqueezedVacuum, nav));
            assert!(q > s, "{nav}: {q} vs {s}");
        }
    }

    #[test]
    fn generator_text_round_trip() {
        for g in [PhaseGenerator::TwoArmSymmetric, PhaseGenerator::SingleArm] {
            assert_eq!(g.to_string().parse::<PhaseGenerator>().unwrap(), g);
        }
        assert!("both".parse::<PhaseGenerator>().is_err());
    }

    proptest! {
        #[test]
        fn closed_form_increases_with_mandel_q(mean in 0.01f64..20.0, p0 in 0.0f64..1.0, q in -1.0f64..10.0, dq in 1e-3f64..5.0) {
            prop_assert!(qfi_closed_form(mean, q + dq, p0) > qfi_closed_form(mean, q, p0));
        }

        #[test]
        fn closed_form_is_second_moment(amps in prop::collection::vec(0.0f64..1.0, 2..12)) {
            prop_assume!(amps.iter().skip(1).any(|a| *a > 1e-3));
            let v = FockVector::from_real(&amps).unwrap().normalized().unwrap();
            let p = PathSymmetricProbe::assemble(v).unwrap();
            let m = p.component().number_moments();
            let q = p.component().mandel_q().unwrap();
            let closed = qfi_closed_form(m.mean, q, p.p0());
            prop_assert!((closed - qfi_of_probe(&p)).abs() < 1e-9 * closed.max(1.0));
            prop_assert!((closed - qfi_pure(&p, PhaseGenerator::TwoArmSymmetric)).abs() < 1e-9 * closed.max(1.0));
            let mixed = qfi_mixed(&phase_averaged_state(&p), PhaseGenerator::SingleArm).f_q;
            prop_assert!((closed - mixed).abs() < 1e-9 * closed.max(1.0));
        }
    }
}

//! Parity and photon-counting sensitivities of the probe in a Mach-Zehnder
//! interferometer with a loss channel of transmittance `T` on each arm.
//!
//! Both measurements depend on the probe only through its photon-number
//! distribution `p_n` and `p₀`, and are the same for either phase generator.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrology::{snl, PhaseGenerator};
use crate::probes::PathSymmetricProbe;
use crate::special::{powi, LnFactorial};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementConfig {
    pub transmittance: f64,
    pub generator: PhaseGenerator,
}

impl MeasurementConfig {
    pub fn new(transmittance: f64, generator: PhaseGenerator) -> Result<Self> {
        check_transmittance(transmittance)?;
        Ok(MeasurementConfig {
            transmittance,
            generator,
        })
    }

    pub fn lossless() -> Self {
        MeasurementConfig {
            transmittance: 1.0,
            generator: PhaseGenerator::default(),
        }
    }
}

fn check_transmittance(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("transmittance {t} outside [0, 1]")))
    }
}

/// Uniform grid of `points` cell centres on `[start, stop]`, so neither end
/// point is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for PhiGrid {
    fn default() -> Self {
        PhiGrid {
            start: 0.0,
            stop: 2.0 * PI,
            points: 1000,
        }
    }
}

impl PhiGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points < 2 || !(start.is_finite() && stop.is_finite()) || stop <= start {
            return Err(Error::InvalidArgument(format!(
                "phi grid needs start < stop and at least 2 points, got {start}:{stop}:{points}"
            )));
        }
        Ok(PhiGrid { start, stop, points })
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / self.points as f64
    }

    pub fn values(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|i| self.start + (i as f64 + 0.5) * h).collect()
    }
}

/// Joint distribution of the counts `(n_a, n_b)` for `n_a + n_b ≤ n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomePmf {
    /// `probs[n][n_a]` is the probability of `(n_a, n − n_a)`.
    probs: Vec<Vec<f64>>,
    deficit: f64,
}

impl OutcomePmf {
    /// Builds a PMF from a table indexed by total count then `n_a`. Entries
    /// down to `−1e-14` are clamped to zero.
    pub fn from_table(mut probs: Vec<Vec<f64>>) -> Result<Self> {
        for (n, row) in probs.iter_mut().enumerate() {
            if row.len() != n + 1 {
                return Err(Error::InvalidArgument(format!("row {n} has {} entries", row.len())));
            }
            for p in row.iter_mut() {
                if *p < -1e-14 || !p.is_finite() {
                    return Err(Error::InvalidArgument(format!("probability {p} at total {n}")));
                }
                *p = p.max(0.0);
            }
        }
        let total: f64 = probs.iter().flatten().sum();
        Ok(OutcomePmf {
            probs,
            deficit: 1.0 - total,
        })
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> f64 {
        self.probs.get(n_a + n_b).map_or(0.0, |row| row[n_a])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.probs
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    /// `⟨(−1)^{n_a}⟩`.
    pub fn parity_a(&self) -> f64 {
        self.probs
            .iter()
            .flat_map(|row| row.iter().enumerate())
            .map(|(na, p)| if na % 2 == 0 { *p } else { -*p })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub phi: Vec<f64>,
    /// Radians², `+inf` where the signal has no slope.
    pub sensitivity: Vec<f64>,
    pub label: String,
    pub snl: f64,
}

/// `⟨Π⟩ = Σ p_n (Rⁿ + Tⁿ cos nφ)/(1 + p₀)` with `R = 1 − T`.
pub fn parity_expectation(probe: &PathSymmetricProbe, phi: f64, t: f64) -> Result<f64> {
    check_transmittance(t)?;
    let r = 1.0 - t;
    let sum: f64 = probe
        .probabilities()
        .iter()
        .enumerate()
        .map(|(n, p)| p * (powi(r, n) + powi(t, n) * (n as f64 * phi).cos()))
        .sum();
    Ok(sum / (1.0 + probe.p0()))
}

/// Lossless parity `Σ p_n (δ_{n0} + cos nφ)/(1 + p₀)`.
pub fn parity_expectation_lossless(probe: &PathSymmetricProbe, phi: f64) -> f64 {
    let sum: f64 = probe
        .probabilities()
        .iter()
        .enumerate()
        .map(|(n, p)| p * (if n == 0 { 1.0 } else { 0.0 } + (n as f64 * phi).cos()))
        .sum();
    sum / (1.0 + probe.p0())
}

/// `∂⟨Π⟩/∂φ`.
pub fn parity_derivative(probe: &PathSymmetricProbe, phi: f64, t: f64) -> Result<f64> {
    check_transmittance(t)?;
    let sum: f64 = probe
        .probabilities()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, p)| p * powi(t, n) * n as f64 * (n as f64 * phi).sin())
        .sum();
    Ok(-sum / (1.0 + probe.p0()))
}

/// `(1 − ⟨Π⟩²)/(∂⟨Π⟩/∂φ)²`, with `1 ∓ ⟨Π⟩` summed term by term so that
/// neither side cancels near `φ = 0`.
pub fn parity_sensitivity(probe: &PathSymmetricProbe, phi: f64, t: f64) -> Result<f64> {
    check_transmittance(t)?;
    let r = 1.0 - t;
    let p = probe.probabilities();
    let (mut minus, mut plus) = (0.0, 4.0 * probe.p0());
    let (mut d, mut curvature) = (0.0, 0.0);
    for (n, &pn) in p.iter().enumerate().skip(1) {
        if pn == 0.0 {
            continue;
        }
        let nf = n as f64;
        let tn = powi(t, n);
        let rn = powi(r, n);
        let survive = -(nf * (-r).ln_1p()).exp_m1();
        let (s, c) = (0.5 * nf * phi).sin_cos();
        minus += pn * ((survive - rn) + 2.0 * tn * s * s);
        plus += pn * ((1.0 + rn - tn) + 2.0 * tn * c * c);
        d += pn * tn * nf * (nf * phi).sin();
        curvature += pn * tn * nf * nf;
    }
    let norm = 1.0 + probe.p0();
    let (minus, plus, d) = (minus / norm, plus / norm, -d / norm);
    let numerator = minus * plus;
    if d.abs() < 1e-30 {
        if numerator >= 1e-30 {
            return Ok(f64::INFINITY);
        }
        // Both vanish only at a lossless fringe peak; take the limit.
        let curvature = curvature / norm;
        if curvature == 0.0 {
            return Ok(f64::INFINITY);
        }
        return Ok(plus / (2.0 * curvature));
    }
    Ok(numerator / (d * d))
}

/// Per-(probe, T) tables behind the photon-counting distribution:
/// `p(n_a, n_b) = w [A_n (1 + (−1)^{n_a} cos nφ) + B_n]/(1 + p₀)` with
/// `w = C(n, n_a)/2ⁿ`, `A_n = p_n Tⁿ` and `B_n = Σ_{k≥1} p_{n+k} C(n+k, n) Tⁿ Rᵏ`.
#[derive(Debug, Clone)]
pub struct CountingModel {
    coherent: Vec<f64>,
    background: Vec<f64>,
    norm: f64,
    lf: LnFactorial,
}

impl CountingModel {
    pub fn new(probe: &PathSymmetricProbe, t: f64) -> Result<Self> {
        check_transmittance(t)?;
        let p = probe.probabilities();
        let n_max = p.len() - 1;
        let lf = LnFactorial::new(n_max);
        let r = 1.0 - t;
        let coherent: Vec<f64> = p.iter().enumerate().map(|(n, pn)| pn * powi(t, n)).collect();
        let (ln_t, ln_r) = (t.ln(), r.ln());
        let background = (0..=n_max)
            .map(|n| {
                if r == 0.0 || (t == 0.0 && n > 0) {
                    return 0.0;
                }
                let base = if n == 0 { 0.0 } else { n as f64 * ln_t };
                (1..=n_max - n)
                    .filter(|k| p[n + k] > 0.0)
                    .map(|k| (p[n + k].ln() + lf.ln_binomial(n + k, n) + base + k as f64 * ln_r).exp())
                    .sum()
            })
            .collect();
        Ok(CountingModel {
            coherent,
            background,
            norm: 1.0 + probe.p0(),
            lf,
        })
    }

    pub fn n_max(&self) -> usize {
        self.coherent.len() - 1
    }

    pub fn pmf(&self, phi: f64) -> OutcomePmf {
        let probs = (0..=self.n_max())
            .map(|n| {
                let (a, b) = (self.coherent[n], self.background[n]);
                let c = (n as f64 * phi).cos();
                (0..=n)
                    .map(|na| {
                        let w = (self.lf.ln_binomial(n, na) - n as f64 * std::f64::consts::LN_2).exp();
                        let sign = if na % 2 == 0 { 1.0 } else { -1.0 };
                        w * (a * (1.0 + sign * c) + b) / self.norm
                    })
                    .collect()
            })
            .collect();
        let probs: Vec<Vec<f64>> = probs;
        let total: f64 = probs.iter().flatten().sum();
        OutcomePmf {
            probs,
            deficit: 1.0 - total,
        }
    }

    /// Classical Fisher information of the counts.
    ///
    /// Outcomes with the same `n` and parity of `n_a` differ only by the weight
    /// `w`, and the weights of each parity class sum to 1/2 for `n ≥ 1`, so the
    /// sum over `n_a` is done in closed form.
    pub fn fisher_information(&self, phi: f64) -> f64 {
        let mut f = 0.0;
        for n in 1..=self.n_max() {
            let (a, b) = (self.coherent[n], self.background[n]);
            if a == 0.0 {
                continue;
            }
            let nf = n as f64;
            let (s, c) = (0.5 * nf * phi).sin_cos();
            let (s2, c2) = (2.0 * s * s, 2.0 * c * c);
            let term = if b == 0.0 {
                // (n sin nφ)²/(1 ± cos nφ) = n²(1 ∓ cos nφ)
                0.5 * a * nf * nf * (s2 + c2)
            } else {
                let sin2 = (nf * phi).sin().powi(2);
                let mut acc = 0.0;
                for den in [a * c2 + b, a * s2 + b] {
                    if den > 1e-300 {
                        acc += 0.5 / den;
                    }
                }
                a * a * nf * nf * sin2 * acc
            };
            f += term;
        }
        f / self.norm
    }
}

pub fn photon_counting_pmf(probe: &PathSymmetricProbe, phi: f64, t: f64) -> Result<OutcomePmf> {
    Ok(CountingModel::new(probe, t)?.pmf(phi))
}

/// Lossless counting distribution `p(n_a, n_b) = w p_n (1 + (−1)^{n_a} cos nφ)/(1 + p₀)`,
/// with the vacuum outcome carrying `2p₀/(1 + p₀)`.
pub fn photon_counting_pmf_lossless(probe: &PathSymmetricProbe, phi: f64) -> OutcomePmf {
    let p = probe.probabilities();
    let lf = LnFactorial::new(p.len() - 1);
    let norm = 1.0 + probe.p0();
    let probs: Vec<Vec<f64>> = p
        .iter()
        .enumerate()
        .map(|(n, pn)| {
            let c = (n as f64 * phi).cos();
            (0..=n)
                .map(|na| {
                    let w = (lf.ln_binomial(n, na) - n as f64 * std::f64::consts::LN_2).exp();
                    let sign = if na % 2 == 0 { 1.0 } else { -1.0 };
                    w * (pn * (1.0 + sign * c)) / norm
                })
                .collect()
        })
        .collect();
    let total: f64 = probs.iter().flatten().sum();
    OutcomePmf {
        probs,
        deficit: 1.0 - total,
    }
}

pub fn classical_fi(probe: &PathSymmetricProbe, phi: f64, t: f64) -> Result<f64> {
    Ok(CountingModel::new(probe, t)?.fisher_information(phi))
}

pub fn parity_curve(probe: &PathSymmetricProbe, grid: &PhiGrid, t: f64, label: &str) -> Result<SensitivityCurve> {
    check_transmittance(t)?;
    let phi = grid.values();
    let sensitivity = phi
        .par_iter()
        .map(|&x| parity_sensitivity(probe, x, t))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SensitivityCurve {
        phi,
        sensitivity,
        label: label.to_string(),
        snl: snl(probe.n_av()),
    })
}

/// `1/F` of photon counting over the grid.
pub fn counting_curve(probe: &PathSymmetricProbe, grid: &PhiGrid, t: f64, label: &str) -> Result<SensitivityCurve> {
    let model = CountingModel::new(probe, t)?;
    let phi = grid.values();
    let sensitivity = phi
        .par_iter()
        .map(|&x| {
            let f = model.fisher_information(x);
            if f > 0.0 {
                1.0 / f
            } else {
                f64::INFINITY
            }
        })
        .collect();
    Ok(SensitivityCurve {
        phi,
        sensitivity,
        label: label.to_string(),
        snl: snl(probe.n_av()),
    })
}

/// Total phase range on which the curve lies strictly below its shot-noise
/// limit: trapezoid rule over the indicator, with the first and last cells
/// extended by half a spacing to the edge of a cell-centred grid.
pub fn snl_beating_range(curve: &SensitivityCurve) -> f64 {
    let phi = &curve.phi;
    let below: Vec<f64> = curve
        .sensitivity
        .iter()
        .map(|&s| if s < curve.snl { 1.0 } else { 0.0 })
        .collect();
    match phi.len() {
        0 => 0.0,
        1 => 0.0,
        len => {
            let mut total = 0.0;
            for i in 0..len - 1 {
                total += 0.5 * (below[i] + below[i + 1]) * (phi[i + 1] - phi[i]);
            }
            total += 0.5 * below[0] * (phi[1] - phi[0]);
            total += 0.5 * below[len - 1] * (phi[len - 1] - phi[len - 2]);
            total
        }
    }
}

/// Counting Fisher information `N² Tᴺ` of a NOON state under loss, continued
/// to non-integer `N` as an envelope.
pub fn noon_lossy_fi(n: f64, t: f64) -> f64 {
    n * n * t.powf(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockVector, TruncationPolicy};
    use crate::metrology::qfi_of_probe;
    use crate::probes::{solve_energy_constraint, ProbeFamily, ProbeSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn probe(family: ProbeFamily, nav: f64) -> PathSymmetricProbe {
        let spec = solve_energy_constraint(family, nav).unwrap();
        PathSymmetricProbe::from_spec(&spec, &TruncationPolicy::default()).unwrap()
    }

    fn number(n: usize) -> PathSymmetricProbe {
        PathSymmetricProbe::from_spec(&ProbeSpec::Number { n }, &TruncationPolicy::default()).unwrap()
    }

    const FAMILIES: [ProbeFamily; 4] = [
        ProbeFamily::Number,
        ProbeFamily::Coherent,
        ProbeFamily::SqueezedVacuum,
        ProbeFamily::OneN { n: 8 },
    ];

    #[test]
    fn parity_at_origin_is_one() {
        for fam in FAMILIES {
            let p = probe(fam, 2.0);
            assert_abs_diff_eq!(parity_expectation(&p, 0.0, 1.0).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn parity_of_noon_under_loss() {
        let p = number(3);
        for (t, phi) in [(0.9f64, 0.4f64), (0.5, 2.0), (0.0, 1.0)] {
            let r: f64 = 1.0 - t;
            let expected = r.powi(3) + t.powi(3) * (3.0 * phi).cos();
            assert_abs_diff_eq!(parity_expectation(&p, phi, t).unwrap(), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn lossless_parity_reduction_is_exact() {
        for fam in FAMILIES {
            let p = probe(fam, 2.0);
            for phi in PhiGrid::new(0.0, 2.0 * PI, 50).unwrap().values() {
                assert_eq!(
                    parity_expectation(&p, phi, 1.0).unwrap(),
                    parity_expectation_lossless(&p, phi)
                );
            }
        }
    }

    #[test]
    fn lossless_counting_reduction_is_exact() {
        for fam in FAMILIES {
            let p = probe(fam, 2.0);
            for phi in [0.3, 1.1, 2.9] {
                let a = photon_counting_pmf(&p, phi, 1.0).unwrap();
                let b = photon_counting_pmf_lossless(&p, phi);
                for (ra, rb) in a.rows().iter().zip(b.rows()) {
                    for (x, y) in ra.iter().zip(rb) {
                        assert_eq!(x, y);
                    }
                }
            }
        }
    }

    #[test]
    fn parity_sensitivity_near_origin_is_qcrb() {
        for fam in [ProbeFamily::Number, ProbeFamily::Coherent, ProbeFamily::OneN { n: 8 }] {
            let p = probe(fam, 1.0);
            let s = parity_sensitivity(&p, 1e-4, 1.0).unwrap();
            let bound = 1.0 / qfi_of_probe(&p);
            assert!((s - bound).abs() / bound < 1e-6, "{fam:?}: {s} vs {bound}");
        }
    }

    #[test]
    fn noon_parity_is_heisenberg_everywhere() {
        for n in 1..=5 {
            let p = number(n);
            for phi in [0.1, 0.7, 1.3, 2.0, 3.0] {
                let s = parity_sensitivity(&p, phi, 1.0).unwrap();
                assert!((s - 1.0 / (n * n) as f64).abs() < 1e-10, "N={n} φ={phi}: {s}");
            }
        }
    }

    #[test]
    fn parity_sensitivity_matches_finite_difference() {
        let p = number(2);
        let (t, phi, h) = (0.9, PI / 4.0, 1e-6);
        let mu = parity_expectation(&p, phi, t).unwrap();
        let d = (parity_expectation(&p, phi + h, t).unwrap() - parity_expectation(&p, phi - h, t).unwrap()) / (2.0 * h);
        let expected = (1.0 - mu * mu) / (d * d);
        let s = parity_sensitivity(&p, phi, t).unwrap();
        assert!((s - expected).abs() / expected < 1e-6);
        assert_abs_diff_eq!(parity_derivative(&p, phi, t).unwrap(), d, epsilon = 1e-8);
    }

    #[test]
    fn parity_sensitivity_diverges_at_origin_under_loss() {
        let p = number(2);
        assert_eq!(parity_sensitivity(&p, 0.0, 0.9).unwrap(), f64::INFINITY);
        assert_abs_diff_eq!(parity_sensitivity(&p, 0.0, 1.0).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn single_photon_counting() {
        let p = number(1);
        let phi = 0.8;
        let pmf = photon_counting_pmf(&p, phi, 1.0).unwrap();
        assert_abs_diff_eq!(pmf.get(1, 0), (1.0 - phi.cos()) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pmf.get(0, 1), (1.0 + phi.cos()) / 2.0, epsilon = 1e-15);
        assert_eq!(pmf.get(0, 0), 0.0);
    }

    #[test]
    fn counting_parity_agrees_with_parity_formula() {
        for fam in FAMILIES {
            let p = probe(fam, 2.0);
            for t in [1.0, 0.9, 0.5] {
                let pmf = photon_counting_pmf(&p, 0.7, t).unwrap();
                assert_abs_diff_eq!(pmf.parity_a(), parity_expectation(&p, 0.7, t).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn counting_is_normalized() {
        for fam in FAMILIES.into_iter().chain([ProbeFamily::OneN { n: 100 }]) {
            let p = probe(fam, 2.0);
            for t in [1.0, 0.9, 0.8, 0.3, 0.0] {
                for phi in [0.0, 0.7, 2.5] {
                    let pmf = photon_counting_pmf(&p, phi, t).unwrap();
                    assert!(pmf.deficit().abs() < 1e-9, "{fam:?} T={t}: {}", pmf.deficit());
                }
            }
        }
    }

    #[test]
    fn lossless_fi_equals_qfi() {
        for fam in FAMILIES {
            let p = probe(fam, 2.0);
            let fq = qfi_of_probe(&p);
            for phi in PhiGrid::default().values().into_iter().step_by(37) {
                let f = classical_fi(&p, phi, 1.0).unwrap();
                assert!((f - fq).abs() / fq < 1e-8, "{fam:?} φ={phi}: {f} vs {fq}");
            }
        }
    }

    #[test]
    fn lossy_noon_fi() {
        for (n, t) in [(2usize, 0.9), (3, 0.8), (5, 0.95)] {
            let f = classical_fi(&number(n), 1.0, t).unwrap();
            assert_abs_diff_eq!(f, noon_lossy_fi(n as f64, t), epsilon = 1e-12);
        }
    }

    #[test]
    fn nothing_survives_total_loss() {
        let p = probe(ProbeFamily::Coherent, 2.0);
        assert_eq!(classical_fi(&p, 1.0, 0.0).unwrap(), 0.0);
        let pmf = photon_counting_pmf(&p, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(pmf.get(0, 0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_transmittance() {
        let p = number(1);
        assert!(parity_expectation(&p, 0.0, 1.5).is_err());
        assert!(classical_fi(&p, 0.0, -0.1).is_err());
        assert!(MeasurementConfig::new(2.0, PhaseGenerator::SingleArm).is_err());
    }

    #[test]
    fn grid_is_cell_centred() {
        let g = PhiGrid::new(0.0, 1.0, 4).unwrap();
        assert_eq!(g.values(), vec![0.125, 0.375, 0.625, 0.875]);
        assert!(PhiGrid::new(0.0, 1.0, 1).is_err());
        assert!(PhiGrid::new(1.0, 0.0, 5).is_err());
    }

    #[test]
    fn snl_range_examples() {
        let grid = PhiGrid::default();
        let curve = parity_curve(&number(2), &grid, 1.0, "noon").unwrap();
        assert_abs_diff_eq!(snl_beating_range(&curve), 2.0 * PI, epsilon = 1e-9);
        let above = SensitivityCurve {
            sensitivity: vec![1.0; grid.points],
            ..curve.clone()
        };
        assert_eq!(snl_beating_range(&above), 0.0);
        let infinite = SensitivityCurve {
            sensitivity: vec![f64::INFINITY; grid.points],
            ..curve
        };
        assert_eq!(snl_beating_range(&infinite), 0.0);
    }

    #[test]
    fn vacuum_probe_is_flat() {
        let p = PathSymmetricProbe::assemble(FockVector::vacuum(0)).unwrap();
        assert_eq!(parity_sensitivity(&p, 0.3, 0.9).unwrap(), f64::INFINITY);
        assert_eq!(classical_fi(&p, 0.3, 0.9).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn fi_never_exceeds_qfi(amps in prop::collection::vec(0.0f64..1.0, 2..10), t in 0.0f64..=1.0, phi in 0.0f64..(2.0 * PI)) {
            prop_assume!(amps.iter().skip(1).any(|a| *a > 1e-3));
            let v = FockVector::from_real(&amps).unwrap().normalized().unwrap();
            let p = PathSymmetricProbe::assemble(v).unwrap();
            let f = classical_fi(&p, phi, t).unwrap();
            prop_assert!(f <= qfi_of_probe(&p) + 1e-8);
            let pmf = photon_counting_pmf(&p, phi, t).unwrap();
            prop_assert!(pmf.deficit().abs() < 1e-12);
        }

        #[test]
        fn parity_is_bounded(amps in prop::collection::vec(0.0f64..1.0, 1..10), t in 0.0f64..=1.0, phi in -10.0f64..10.0) {
            prop_assume!(amps.iter().any(|a| *a > 1e-3));
            let v = FockVector::from_real(&amps).unwrap().normalized().unwrap();
            let p = PathSymmetricProbe::assemble(v).unwrap();
            let mu = parity_expectation(&p, phi, t).unwrap();
            prop_assert!(mu.abs() <= 1.0 + 1e-12);
            prop_assert!(parity_sensitivity(&p, phi, t).unwrap() >= 0.0);
        }
    }
}

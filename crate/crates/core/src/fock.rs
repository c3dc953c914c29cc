//! Truncated single-mode and two-mode Fock-space linear algebra.
//!
//! A [`FockVector`] holds complex amplitudes on the number basis
//! `|0⟩ … |n_max⟩` together with an upper bound on the probability weight
//! that was cut away by the truncation. Two-mode states are dense
//! `(n_max + 1) × (n_max + 1)` matrices indexed by `(n_a, n_b)`.
//!
//! Beam splitters follow the mode map
//! `a† → √T a† + e^{iχ}√R b†`, `b† → −e^{−iχ}√R a† + √T b†` with the
//! default reflection phase `χ = π/2`, i.e. `a† → √T a† + i√R b†`,
//! `b† → i√R a† + √T b†`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{ln_pow, LnFactorial};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// How far number-basis expansions are carried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Maximum probability weight allowed beyond the cutoff.
    pub tail_tolerance: f64,
    /// Hard cap on the cutoff photon number.
    pub n_max_cap: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tail_tolerance: 1e-12,
            n_max_cap: 512,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_tolerance: f64, n_max_cap: usize) -> Result<Self> {
        if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail tolerance must lie in (0, 1), got {tail_tolerance}"
            )));
        }
        Ok(TruncationPolicy {
            tail_tolerance,
            n_max_cap,
        })
    }

    /// Smallest cutoff for a Poisson distribution of mean `mean` whose
    /// Chernoff tail bound `P(X > n_max) ≤ e^{-λ}(eλ/k)^k`, `k = n_max + 1`,
    /// drops below the tolerance. Returns `(n_max, tail_bound)`.
    pub fn coherent_cutoff(&self, mean: f64) -> Result<(usize, f64)> {
        if !(mean.is_finite() && mean >= 0.0) {
            return Err(Error::InvalidSpec(format!("coherent mean {mean} is not finite")));
        }
        if mean == 0.0 {
            return Ok((0, 0.0));
        }
        let start = mean.ceil() as usize;
        for n_max in start..=self.n_max_cap {
            let k = (n_max + 1) as f64;
            let ln_bound = -mean + k * (1.0 + mean.ln() - k.ln());
            let bound = ln_bound.exp();
            if bound < self.tail_tolerance {
                return Ok((n_max, bound));
            }
        }
        Err(Error::TruncationInsufficient(format!(
            "coherent state with mean {mean} needs more than {} levels",
            self.n_max_cap
        )))
    }

    /// Smallest even cutoff for a squeezed vacuum of squeezing `r` whose
    /// geometric tail bound `sech r · t^{K+1} / (1 − t)`, `t = tanh² r`,
    /// `K = n_max / 2`, drops below the tolerance.
    pub fn squeezed_cutoff(&self, r: f64) -> Result<(usize, f64)> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidSpec(format!("squeezing {r} must be finite and >= 0")));
        }
        if r == 0.0 {
            return Ok((0, 0.0));
        }
        let t = r.tanh().powi(2);
        let pre = 1.0 / (r.cosh() * (1.0 - t));
        let mut k = 0usize;
        while 2 * k <= self.n_max_cap {
            let bound = pre * t.powi(k as i32 + 1);
            if bound < self.tail_tolerance {
                return Ok((2 * k, bound));
            }
            k += 1;
        }
        Err(Error::TruncationInsufficient(format!(
            "squeezed vacuum with r = {r} needs more than {} levels",
            self.n_max_cap
        )))
    }
}

/// Single-mode state on a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
    tail_bound: f64,
}

/// Photon-number mean and variance with an additive truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumberMoments {
    pub mean: f64,
    pub variance: f64,
    pub error_bound: f64,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>, tail_bound: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DegenerateTruncation("no basis states".into()));
        }
        if !(tail_bound >= 0.0) {
            return Err(Error::InvalidArgument(format!("tail bound {tail_bound} must be >= 0")));
        }
        Ok(FockVector { amps, tail_bound })
    }

    /// Exact state from real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect(), 0.0)
    }

    pub fn vacuum(n_max: usize) -> Self {
        Self::number(0, n_max)
    }

    /// `|n⟩` on a basis of `n_max + 1` levels (`n_max ≥ n`).
    pub fn number(n: usize, n_max: usize) -> Self {
        let mut amps = vec![ZERO; n_max.max(n) + 1];
        amps[n] = ONE;
        FockVector { amps, tail_bound: 0.0 }
    }

    /// Coherent state `|α⟩` truncated according to `policy`.
    pub fn coherent(alpha: Complex64, policy: &TruncationPolicy) -> Result<Self> {
        let mean = alpha.norm_sqr();
        let (n_max, tail) = policy.coherent_cutoff(mean)?;
        Ok(Self::coherent_with_cutoff(alpha, n_max).with_tail_bound(tail))
    }

    /// Coherent state amplitudes `e^{-|α|²/2} αⁿ / √n!` up to `n_max`.
    pub fn coherent_with_cutoff(alpha: Complex64, n_max: usize) -> Self {
        let lf = LnFactorial::new(n_max);
        let (mag, arg) = alpha.to_polar();
        let amps = (0..=n_max)
            .map(|n| {
                let ln = -0.5 * mag * mag + ln_pow(mag, n) - 0.5 * lf.get(n);
                Complex64::from_polar(ln.exp(), arg * n as f64)
            })
            .collect();
        FockVector { amps, tail_bound: 0.0 }
    }

    /// Squeezed vacuum `S(ξ)|0⟩`, `ξ = r e^{iθ}`, truncated according to `policy`.
    pub fn squeezed_vacuum(r: f64, theta: f64, policy: &TruncationPolicy) -> Result<Self> {
        let (n_max, tail) = policy.squeezed_cutoff(r)?;
        Ok(Self::squeezed_vacuum_with_cutoff(r, theta, n_max).with_tail_bound(tail))
    }

    /// Closed-form squeezed-vacuum coefficients
    /// `(−e^{iθ} tanh r)^k √((2k)!) / (2^k k! √cosh r)` on `|2k⟩`.
    pub fn squeezed_vacuum_with_cutoff(r: f64, theta: f64, n_max: usize) -> Self {
        let lf = LnFactorial::new(n_max);
        let tanh = r.tanh();
        let mut amps = vec![ZERO; n_max + 1];
        for k in 0..=n_max / 2 {
            let ln = ln_pow(tanh, k) + 0.5 * lf.get(2 * k)
                - k as f64 * std::f64::consts::LN_2
                - lf.get(k)
                - 0.5 * r.cosh().ln();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            amps[2 * k] = Complex64::from_polar(sign * ln.exp(), theta * k as f64);
        }
        FockVector { amps, tail_bound: 0.0 }
    }

    pub fn with_tail_bound(mut self, tail_bound: f64) -> Self {
        self.tail_bound = tail_bound;
        self
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Photon-number distribution `p_n = |amps[n]|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescaled copy with unit norm on the truncated basis.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Ok(FockVector {
            amps: self.amps.iter().map(|a| a / norm).collect(),
            tail_bound: self.tail_bound,
        })
    }

    /// Zero-padded copy on `n_max + 1` levels; never shrinks.
    pub fn padded(&self, n_max: usize) -> Self {
        let mut amps = self.amps.clone();
        if amps.len() < n_max + 1 {
            amps.resize(n_max + 1, ZERO);
        }
        FockVector {
            amps,
            tail_bound: self.tail_bound,
        }
    }

    /// Highest level carrying nonzero amplitude.
    pub fn support_max(&self) -> usize {
        self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }

    /// `â|ψ⟩`, generally unnormalized.
    pub fn lowering_apply(&self) -> Result<Self> {
        if self.n_max() < 1 {
            return Err(Error::DegenerateTruncation(
                "lowering needs at least two basis states".into(),
            ));
        }
        let mut amps = vec![ZERO; self.amps.len()];
        for (n, (out, a)) in amps.iter_mut().zip(&self.amps[1..]).enumerate() {
            *out = a * ((n + 1) as f64).sqrt();
        }
        Ok(FockVector {
            amps,
            tail_bound: (self.n_max() + 1) as f64 * self.tail_bound,
        })
    }

    pub fn number_moments(&self) -> NumberMoments {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (n, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            let n = n as f64;
            m1 += n * p;
            m2 += n * n * p;
        }
        let nm = self.n_max() as f64;
        NumberMoments {
            mean: m1,
            variance: m2 - m1 * m1,
            error_bound: self.tail_bound * nm.max(1.0).powi(2),
        }
    }

    /// Mandel `Q = Var(n)/⟨n⟩ − 1`.
    pub fn mandel_q(&self) -> Result<f64> {
        let m = self.number_moments();
        if m.mean <= 1e-300 {
            return Err(Error::ZeroEnergy);
        }
        Ok(m.variance / m.mean - 1.0)
    }

    /// `e^{i x n̂}|ψ⟩`.
    pub fn phase_rotation(&self, x: f64) -> Self {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(n, a)| a * Complex64::from_polar(1.0, x * n as f64))
            .collect();
        FockVector {
            amps,
            tail_bound: self.tail_bound,
        }
    }

    /// `⟨self|other⟩`, zero-padding the shorter vector.
    pub fn overlap(&self, other: &FockVector) -> Complex64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies a matrix acting on the first `rows` levels. The result lives on
    /// `matrix.nrows()` levels; input levels beyond `matrix.ncols()` are dropped.
    pub fn apply_matrix(&self, matrix: &DMatrix<Complex64>) -> Self {
        let mut amps = vec![ZERO; matrix.nrows()];
        for (j, a) in self.amps.iter().enumerate().take(matrix.ncols()) {
            if *a == ZERO {
                continue;
            }
            for (i, out) in amps.iter_mut().enumerate() {
                *out += matrix[(i, j)] * a;
            }
        }
        FockVector {
            amps,
            tail_bound: self.tail_bound,
        }
    }
}

/// Truncated matrix of `S(ξ) = exp[(ξ* â² − ξ â†²)/2]` on `n_max + 1` levels.
///
/// The exponential is taken on `n_max + 1 + max(20, n_max/2)` levels and
/// cropped, which keeps the block accurate on low occupations.
pub fn squeeze_matrix(xi: Complex64, n_max: usize, policy: &TruncationPolicy) -> Result<DMatrix<Complex64>> {
    let r = xi.norm();
    if !r.is_finite() {
        return Err(Error::InvalidSpec("squeezing parameter must be finite".into()));
    }
    // The vacuum column alone must fit under the cap.
    policy.squeezed_cutoff(r)?;
    let buffer = 20.max(n_max / 2);
    let dim = n_max + 1 + buffer;
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..dim.saturating_sub(2) {
        let c = ((n + 1) as f64 * (n + 2) as f64).sqrt();
        // ξ* â²/2: ⟨n|â²|n+2⟩ = √((n+1)(n+2))
        gen[(n, n + 2)] += xi.conj() * c * 0.5;
        // −ξ â†²/2
        gen[(n + 2, n)] -= xi * c * 0.5;
    }
    let full = gen.exp();
    Ok(full.view((0, 0), (n_max + 1, n_max + 1)).into_owned())
}

/// Lowering operator `â + c` on `n_max + 1` levels.
pub(crate) fn shifted_lowering_matrix(c: Complex64, n_max: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::identity(n_max + 1, n_max + 1) * c;
    for n in 0..n_max {
        m[(n, n + 1)] += Complex64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    m
}

/// Two-mode state with amplitudes indexed by `(n_a, n_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    amps: DMatrix<Complex64>,
}

impl TwoModeState {
    pub fn zeros(n_max: usize) -> Self {
        TwoModeState {
            amps: DMatrix::zeros(n_max + 1, n_max + 1),
        }
    }

    pub fn from_matrix(amps: DMatrix<Complex64>) -> Result<Self> {
        if amps.nrows() != amps.ncols() || amps.nrows() == 0 {
            return Err(Error::InvalidArgument("two-mode amplitudes must be square".into()));
        }
        Ok(TwoModeState { amps })
    }

    /// `|n_a, n_b⟩`.
    pub fn basis(n_a: usize, n_b: usize, n_max: usize) -> Self {
        let mut s = Self::zeros(n_max.max(n_a).max(n_b));
        s.amps[(n_a, n_b)] = ONE;
        s
    }

    /// `|a⟩ ⊗ |b⟩`, both padded to the larger cutoff.
    pub fn product(a: &FockVector, b: &FockVector) -> Self {
        let n_max = a.n_max().max(b.n_max());
        let (a, b) = (a.padded(n_max), b.padded(n_max));
        let mut s = Self::zeros(n_max);
        for (i, x) in a.amps().iter().enumerate() {
            for (j, y) in b.amps().iter().enumerate() {
                s.amps[(i, j)] = x * y;
            }
        }
        s
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.amps
    }

    pub fn n_max(&self) -> usize {
        self.amps.nrows() - 1
    }

    pub fn get(&self, n_a: usize, n_b: usize) -> Complex64 {
        if n_a > self.n_max() || n_b > self.n_max() {
            ZERO
        } else {
            self.amps[(n_a, n_b)]
        }
    }

    pub fn set(&mut self, n_a: usize, n_b: usize, value: Complex64) {
        self.amps[(n_a, n_b)] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize a zero state".into()));
        }
        Ok(TwoModeState {
            amps: &self.amps / Complex64::new(n, 0.0),
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        TwoModeState { amps: &self.amps * c }
    }

    /// `⟨self|other⟩` over the common levels.
    pub fn inner(&self, other: &TwoModeState) -> Complex64 {
        let n = self.n_max().min(other.n_max());
        let mut acc = ZERO;
        for i in 0..=n {
            for j in 0..=n {
                acc += self.amps[(i, j)].conj() * other.amps[(i, j)];
            }
        }
        acc
    }

    /// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`.
    pub fn fidelity(&self, other: &TwoModeState) -> f64 {
        let denom = self.norm_sqr() * other.norm_sqr();
        if denom == 0.0 {
            return 0.0;
        }
        self.inner(other).norm_sqr() / denom
    }

    pub fn add(&self, other: &TwoModeState) -> Result<Self> {
        if self.n_max() != other.n_max() {
            return Err(Error::InvalidArgument("mismatched two-mode cutoffs".into()));
        }
        Ok(TwoModeState {
            amps: &self.amps + &other.amps,
        })
    }

    /// Applies `M ⊗ 1`.
    pub fn apply_mode_a(&self, m: &DMatrix<Complex64>) -> Self {
        TwoModeState { amps: m * &self.amps }
    }

    /// Applies `1 ⊗ M`.
    pub fn apply_mode_b(&self, m: &DMatrix<Complex64>) -> Self {
        TwoModeState {
            amps: &self.amps * m.transpose(),
        }
    }

    /// Photon-number marginal weight `Σ |ψ(n_a, n_b)|²` restricted to
    /// `n_a + n_b ≥ from`.
    pub fn weight_at_or_above(&self, from: usize) -> f64 {
        let mut w = 0.0;
        for i in 0..=self.n_max() {
            for j in 0..=self.n_max() {
                if i + j >= from {
                    w += self.amps[(i, j)].norm_sqr();
                }
            }
        }
        w
    }

    /// Beam splitter of transmittance `T` with reflection phase `π/2`.
    pub fn beam_splitter_apply(&self, transmittance: f64) -> Result<Self> {
        self.beam_splitter_apply_with_phase(transmittance, FRAC_PI_2)
    }

    /// Beam splitter with mode map `a† → t a† + e^{iχ} r b†`,
    /// `b† → −e^{−iχ} r a† + t b†`. Shifting `χ` by `π` inverts it.
    ///
    /// Photon number is conserved, so each total-number block is mapped
    /// exactly; outputs with a mode above `n_max` are dropped.
    pub fn beam_splitter_apply_with_phase(&self, transmittance: f64, chi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmittance) {
            return Err(Error::InvalidArgument(format!(
                "transmittance {transmittance} outside [0, 1]"
            )));
        }
        let n_max = self.n_max();
        let t = transmittance.sqrt();
        let r = (1.0 - transmittance).sqrt();
        let ua = Complex64::new(t, 0.0);
        let ub = Complex64::from_polar(r, chi);
        let va = -Complex64::from_polar(r, -chi);
        let vb = Complex64::new(t, 0.0);
        let lf = LnFactorial::new(2 * n_max);
        let mut out = Self::zeros(n_max);
        for total in 0..=2 * n_max {
            let m_lo = total.saturating_sub(n_max);
            let m_hi = total.min(n_max);
            for m in m_lo..=m_hi {
                let psi = self.amps[(m, total - m)];
                if psi == ZERO {
                    continue;
                }
                let rest = total - m;
                for j in m_lo..=m_hi {
                    let mut acc = ZERO;
                    let p_lo = j.saturating_sub(rest);
                    let p_hi = j.min(m);
                    for p in p_lo..=p_hi {
                        let q = j - p;
                        let ln_mag = lf.ln_binomial(m, p) + lf.ln_binomial(rest, q);
                        let term = cpow(ua, p) * cpow(ub, m - p) * cpow(va, q) * cpow(vb, rest - q);
                        acc += term * ln_mag.exp();
                    }
                    let norm = 0.5 * (lf.get(j) + lf.get(total - j) - lf.get(m) - lf.get(rest));
                    out.amps[(j, total - j)] += psi * acc * norm.exp();
                }
            }
        }
        Ok(out)
    }
}

#[inline]
fn cpow(z: Complex64, k: usize) -> Complex64 {
    if k == 0 {
        ONE
    } else {
        z.powu(k as u32)
    }
}

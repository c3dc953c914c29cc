//! Heralded generation circuits: conditional phase shifts on squeezed vacua
//! with a polarization-entangled ancilla pair, and cascades of the coherent
//! operation `â + c` applied to a NOON state.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{squeeze_matrix, FockVector, TruncationPolicy, TwoModeState};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    A,
    B,
}

/// Ancilla qubits; both use the basis `{H, V}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Qubit {
    U,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

/// Two bosonic modes and two ancilla qubits, stored as one two-mode block per
/// ancilla basis state `(u, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    sectors: [TwoModeState; 4],
}

fn sector_index(u: Polarization, d: Polarization) -> usize {
    2 * (u == Polarization::V) as usize + (d == Polarization::V) as usize
}

impl HybridState {
    pub fn zeros(n_max: usize) -> Self {
        HybridState {
            sectors: std::array::from_fn(|_| TwoModeState::zeros(n_max)),
        }
    }

    /// `|ψ⟩ ⊗ Σ c_{ud} |u⟩|d⟩` with `coeffs` ordered HH, HV, VH, VV.
    pub fn product(modes: &TwoModeState, coeffs: [Complex64; 4]) -> Self {
        HybridState {
            sectors: coeffs.map(|c| modes.scaled(c)),
        }
    }

    pub fn sector(&self, u: Polarization, d: Polarization) -> &TwoModeState {
        &self.sectors[sector_index(u, d)]
    }

    pub fn set_sector(&mut self, u: Polarization, d: Polarization, state: TwoModeState) -> Result<()> {
        if state.n_max() != self.n_max() {
            return Err(Error::InvalidArgument("sector cutoff mismatch".into()));
        }
        self.sectors[sector_index(u, d)] = state;
        Ok(())
    }

    pub fn n_max(&self) -> usize {
        self.sectors[0].n_max()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.sectors.iter().map(TwoModeState::norm_sqr).sum()
    }

    /// Mode state conditioned on the ancillas being found in `⟨α|⟨β|`, where
    /// `alpha`, `beta` give the `(H, V)` components of the projection states.
    fn project(&self, alpha: [Complex64; 2], beta: [Complex64; 2]) -> TwoModeState {
        let mut out = TwoModeState::zeros(self.n_max());
        for (iu, &cu) in alpha.iter().enumerate() {
            for (id, &cd) in beta.iter().enumerate() {
                let c = (cu * cd).conj();
                out = out.add(&self.sectors[2 * iu + id].scaled(c)).expect("same cutoff");
            }
        }
        out
    }

    /// Weights of the ancilla outcomes `++`, `+−`, `−+`, `−−`.
    pub fn ancilla_outcome_weights(&self) -> [f64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
        let minus = [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)];
        [
            self.project(plus, plus).norm_sqr(),
            self.project(plus, minus).norm_sqr(),
            self.project(minus, plus).norm_sqr(),
            self.project(minus, minus).norm_sqr(),
        ]
    }
}

/// `C = 1 ⊗ |H⟩⟨H| + e^{ix n̂} ⊗ |V⟩⟨V|` between `mode` and `qubit`.
pub fn cps_apply(state: &HybridState, x: f64, pairing: (Mode, Qubit)) -> HybridState {
    let (mode, qubit) = pairing;
    let n = state.n_max();
    let rot = DMatrix::from_fn(n + 1, n + 1, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, x * i as f64)
        } else {
            ZERO
        }
    });
    let mut out = state.clone();
    for u in [Polarization::H, Polarization::V] {
        for d in [Polarization::H, Polarization::V] {
            let v = match qubit {
                Qubit::U => u,
                Qubit::D => d,
            };
            if v == Polarization::H {
                continue;
            }
            let s = state.sector(u, d);
            let rotated = match mode {
                Mode::A => s.apply_mode_a(&rot),
                Mode::B => s.apply_mode_b(&rot),
            };
            out.sectors[sector_index(u, d)] = rotated;
        }
    }
    out
}

/// Projects both ancillas on `|+⟩`; returns the renormalized mode state and
/// the heralding probability.
pub fn project_plus_plus(state: &HybridState) -> Result<(TwoModeState, f64)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
    let out = state.project(plus, plus);
    let weight = out.norm_sqr();
    if weight < 1e-14 * state.norm_sqr().max(f64::MIN_POSITIVE) {
        return Err(Error::PostSelectionFailed(format!(
            "|+⟩|+⟩ outcome has weight {weight:e}"
        )));
    }
    Ok((out.normalized()?, weight))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationReport {
    pub output: TwoModeState,
    pub fidelity: f64,
    pub success_probability: f64,
    /// The output is (numerically) the two-mode vacuum.
    pub degenerate: bool,
    /// Total photon numbers carrying relative weight above `1e-15`.
    pub output_support: Vec<usize>,
}

fn total_number_support(state: &TwoModeState) -> Vec<usize> {
    let n = state.n_max();
    let total = state.norm_sqr();
    let mut w = vec![0.0; 2 * n + 1];
    for i in 0..=n {
        for j in 0..=n {
            w[i + j] += state.get(i, j).norm_sqr();
        }
    }
    w.iter()
        .enumerate()
        .filter(|(_, &x)| x > 1e-15 * total)
        .map(|(k, _)| k)
        .collect()
}

fn is_vacuum(state: &TwoModeState) -> bool {
    state.get(0, 0).norm_sqr() >= (1.0 - 1e-12) * state.norm_sqr()
}

/// `|φ⟩|0⟩ + |0⟩|φ⟩` on `n_max` levels, unnormalized.
fn path_symmetric(component: &FockVector, n_max: usize) -> TwoModeState {
    let v = component.padded(n_max);
    let mut s = TwoModeState::zeros(n_max);
    for (k, a) in v.amps().iter().enumerate().take(n_max + 1) {
        s.set(k, 0, s.get(k, 0) + a);
        s.set(0, k, s.get(0, k) + a);
    }
    s
}

/// Squeezed inputs, entangled ancilla `|H⟩|V⟩ + |V⟩|H⟩`, CPS gates on
/// `(a, u)` and `(b, d)`, heralding on `|+⟩|+⟩` and a final local unitary.
fn cps_pipeline(input: &FockVector, x: f64, finish: &DMatrix<Complex64>) -> Result<(TwoModeState, f64)> {
    let modes = TwoModeState::product(input, input);
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let hybrid = HybridState::product(&modes, [ZERO, h, h, ZERO]);
    let hybrid = cps_apply(&hybrid, x, (Mode::A, Qubit::U));
    let hybrid = cps_apply(&hybrid, x, (Mode::B, Qubit::D));
    let (heralded, success) = project_plus_plus(&hybrid)?;
    Ok((heralded.apply_mode_a(finish).apply_mode_b(finish), success))
}

/// Cutoff for a pipeline whose widest state is a squeezed vacuum of `r`.
fn pipeline_cutoff(r: f64, policy: &TruncationPolicy, n_max: Option<usize>) -> Result<usize> {
    match n_max {
        Some(n) if n >= 2 => Ok(n),
        Some(n) => Err(Error::DegenerateTruncation(format!("cutoff {n} is too small"))),
        None => Ok(policy.squeezed_cutoff(r)?.0.max(2)),
    }
}

/// Produces `|2ξ⟩|0⟩ + |0⟩|2ξ⟩` from two copies of `|ξ⟩`, `ξ = r e^{iθ}`, and
/// compares it with that target. `n_max` overrides the cutoff chosen from
/// `policy` for `2r`.
pub fn generate_soos(
    r: f64,
    theta: f64,
    x: f64,
    policy: &TruncationPolicy,
    n_max: Option<usize>,
) -> Result<GenerationReport> {
    if !(r > 0.0 && r.is_finite() && theta.is_finite() && x.is_finite()) {
        return Err(Error::InvalidSpec(format!("need finite r > 0, got r = {r}")));
    }
    let n = pipeline_cutoff(2.0 * r, policy, n_max)?;
    let xi = Complex64::from_polar(r, theta);
    let input = FockVector::squeezed_vacuum_with_cutoff(r, theta, n);
    let (output, success) = cps_pipeline(&input, x, &squeeze_matrix(xi, n, policy)?)?;
    let target = path_symmetric(&FockVector::squeezed_vacuum_with_cutoff(2.0 * r, theta, n), n);
    Ok(GenerationReport {
        fidelity: output.fidelity(&target),
        success_probability: success,
        degenerate: is_vacuum(&output),
        output_support: total_number_support(&output),
        output,
    })
}

/// Gate set for [`decomposable_generation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// `S(r e^{iθ})`
    Squeeze { r: f64, theta: f64 },
    /// `e^{i x n̂}`
    PhaseRotation { x: f64 },
}

impl Gate {
    fn matrix(&self, n_max: usize, policy: &TruncationPolicy) -> Result<DMatrix<Complex64>> {
        match *self {
            Gate::Squeeze { r, theta } => squeeze_matrix(Complex64::from_polar(r, theta), n_max, policy),
            Gate::PhaseRotation { x } => Ok(DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| {
                if i == j {
                    Complex64::from_polar(1.0, x * i as f64)
                } else {
                    ZERO
                }
            })),
        }
    }

    fn inverse(&self) -> Gate {
        match *self {
            Gate::Squeeze { r, theta } => Gate::Squeeze { r, theta: theta + PI },
            Gate::PhaseRotation { x } => Gate::PhaseRotation { x: -x },
        }
    }
}

fn program_matrix(gates: &[Gate], n_max: usize, policy: &TruncationPolicy) -> Result<DMatrix<Complex64>> {
    let mut m = DMatrix::identity(n_max + 1, n_max + 1);
    for g in gates {
        m = g.matrix(n_max, policy)? * m;
    }
    Ok(m)
}

/// Runs the CPS pipeline for the component `Û†e^{ixn̂}Û|0⟩`, with `Û` given as
/// a gate program applied first to last. The output is compared with
/// `|0⟩|φ⟩ + |φ⟩|0⟩` for that component computed directly.
pub fn decomposable_generation(
    program: &[Gate],
    x: f64,
    policy: &TruncationPolicy,
    n_max: Option<usize>,
) -> Result<GenerationReport> {
    let squeezing: f64 = program
        .iter()
        .map(|g| match *g {
            Gate::Squeeze { r, .. } => r.abs(),
            Gate::PhaseRotation { .. } => 0.0,
        })
        .sum();
    let n = pipeline_cutoff(2.0 * squeezing, policy, n_max)?;
    let u = program_matrix(program, n, policy)?;
    let inverse: Vec<Gate> = program.iter().rev().map(Gate::inverse).collect();
    let u_dag = program_matrix(&inverse, n, policy)?;

    let input = FockVector::vacuum(n).apply_matrix(&u);
    let (output, success) = cps_pipeline(&input, x, &u_dag)?;
    let component = input.phase_rotation(x).apply_matrix(&u_dag);
    let target = path_symmetric(&component, n);
    Ok(GenerationReport {
        fidelity: output.fidelity(&target),
        success_probability: success,
        degenerate: is_vacuum(&output),
        output_support: total_number_support(&output),
        output,
    })
}

/// `(â + c)|ψ⟩`, unnormalized: `out[n] = √(n+1) ψ[n+1] + c ψ[n]`.
pub fn coherent_op_apply(state: &FockVector, c: Complex64) -> Result<FockVector> {
    let lowered = state.lowering_apply()?;
    let amps: Vec<Complex64> = lowered
        .amps()
        .iter()
        .zip(state.amps())
        .map(|(l, s)| l + c * s)
        .collect();
    FockVector::new(amps, lowered.tail_bound() * (1.0 + c.norm()).powi(2))
}

/// `∏_{k=1}^{N} (â + α e^{i2πk/N})|ψ⟩`.
pub fn coherent_cascade(state: &FockVector, n: usize, alpha: Complex64) -> Result<FockVector> {
    let mut out = state.clone();
    for k in 1..=n {
        out = coherent_op_apply(&out, alpha * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))?;
    }
    Ok(out)
}

/// Applies the cascade on both modes of `(|N+1,0⟩ + |0,N+1⟩)/√2` and compares
/// with `√((N+1)!) |1,0;0,1⟩ + (−1)^{N−1} αᴺ |N+1,0;0,N+1⟩`.
///
/// The vacuum arm of each branch contributes `(−1)^{N−1} αᴺ`, so `α = 0`
/// annihilates the probe and is reported as a failed heralding.
pub fn generate_qooq_from_noon(n: usize, alpha: Complex64, policy: &TruncationPolicy) -> Result<GenerationReport> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("cascade needs N >= 2, got {n}")));
    }
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidSpec("alpha must be finite".into()));
    }
    let n_max = n + 1;
    if n_max > policy.n_max_cap {
        return Err(Error::TruncationInsufficient(format!(
            "N + 1 = {n_max} exceeds the cap"
        )));
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let input = TwoModeState::basis(n_max, 0, n_max)
        .add(&TwoModeState::basis(0, n_max, n_max))?
        .scaled(h);

    let mut ops = DMatrix::identity(n_max + 1, n_max + 1);
    for k in 1..=n {
        let c = alpha * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        ops = crate::fock::shifted_lowering_matrix(c, n_max) * ops;
    }
    let output = input.apply_mode_a(&ops).apply_mode_b(&ops);
    let success = output.norm_sqr() / input.norm_sqr();
    if success < 1e-300 {
        return Err(Error::PostSelectionFailed(format!(
            "cascade with α = {alpha} annihilates the state"
        )));
    }

    let lf: f64 = (1..=n_max).map(|k| (k as f64).ln()).sum();
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let tail = alpha.powu(n as u32) * sign;
    let mut target = TwoModeState::zeros(n_max);
    for (i, j, c) in [
        (1, 0, Complex64::new((0.5 * lf).exp(), 0.0)),
        (0, 1, Complex64::new((0.5 * lf).exp(), 0.0)),
        (n_max, 0, tail),
        (0, n_max, tail),
    ] {
        target.set(i, j, c);
    }
    Ok(GenerationReport {
        fidelity: output.fidelity(&target),
        success_probability: success,
        degenerate: is_vacuum(&output),
        output_support: total_number_support(&output),
        output,
    })
}

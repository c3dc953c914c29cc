//! Component families and the path-symmetric probe
//! `(|φ⟩|0⟩ + |0⟩|φ⟩) / √(2(1 + p₀))`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockVector, TruncationPolicy, TwoModeState};

/// A single-mode component state.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeSpec {
    /// `|N⟩`
    Number { n: usize },
    /// `|α⟩`
    Coherent { alpha: Complex64 },
    /// `S(r e^{iθ})|0⟩`
    SqueezedVacuum { r: f64, theta: f64 },
    /// `√q |1⟩ + √(1−q) |N⟩`
    OneN { q: f64, n: usize },
    /// Arbitrary amplitudes on `|0⟩, |1⟩, …`; normalized on construction.
    Custom { amps: Vec<Complex64> },
}

impl ProbeSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProbeSpec::Number { n } if n < 1 => Err(Error::InvalidSpec("number state needs N >= 1".into())),
            ProbeSpec::Coherent { alpha } if !(alpha.re.is_finite() && alpha.im.is_finite()) => {
                Err(Error::InvalidSpec("coherent amplitude must be finite".into()))
            }
            ProbeSpec::SqueezedVacuum { r, theta } if !(r.is_finite() && theta.is_finite() && r >= 0.0) => Err(
                Error::InvalidSpec(format!("squeezing (r={r}, θ={theta}) must be finite, r >= 0")),
            ),
            ProbeSpec::OneN { q, n } if !(0.0..=1.0).contains(&q) || n < 2 => Err(Error::InvalidSpec(format!(
                "superposition needs 0 <= q <= 1 and N >= 2, got q={q}, N={n}"
            ))),
            ProbeSpec::Custom { ref amps } if amps.is_empty() => {
                Err(Error::InvalidSpec("custom state has no amplitudes".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Family of components parameterised by a single energy knob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProbeFamily {
    Number,
    Coherent,
    SqueezedVacuum,
    /// Superposition of `|1⟩` and `|N⟩` with `N` fixed.
    OneN {
        n: usize,
    },
}

/// Builds the normalized number-basis expansion of a component.
pub fn build_component(spec: &ProbeSpec, policy: &TruncationPolicy) -> Result<FockVector> {
    spec.validate()?;
    match *spec {
        ProbeSpec::Number { n } => Ok(FockVector::number(n, n)),
        ProbeSpec::Coherent { alpha } => FockVector::coherent(alpha, policy),
        ProbeSpec::SqueezedVacuum { r, theta } => FockVector::squeezed_vacuum(r, theta, policy),
        ProbeSpec::OneN { q, n } => {
            let mut amps = vec![0.0; n + 1];
            amps[1] = q.sqrt();
            amps[n] = (1.0 - q).sqrt();
            FockVector::from_real(&amps)
        }
        ProbeSpec::Custom { ref amps } => {
            let v = FockVector::new(amps.clone(), 0.0)?;
            v.normalized()
                .map_err(|_| Error::InvalidSpec("custom state has zero norm".into()))
        }
    }
}

/// Two-mode probe built from a component.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSymmetricProbe {
    component: FockVector,
    probs: Vec<f64>,
    p0: f64,
    n_av: f64,
    normalization: f64,
}

impl PathSymmetricProbe {
    /// Assembles the probe; the component must be normalized up to its tail bound.
    pub fn assemble(component: FockVector) -> Result<Self> {
        let probs = component.probabilities();
        let total: f64 = probs.iter().sum();
        let tail = component.tail_bound();
        if total > 1.0 + 1e-10 || total + tail < 1.0 - 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "component is not normalized (weight {total}, tail bound {tail})"
            )));
        }
        let p0 = probs[0];
        let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        Ok(PathSymmetricProbe {
            p0,
            n_av: mean / (1.0 + p0),
            normalization: 1.0 / (2.0 * (1.0 + p0)).sqrt(),
            probs,
            component,
        })
    }

    pub fn from_spec(spec: &ProbeSpec, policy: &TruncationPolicy) -> Result<Self> {
        Self::assemble(build_component(spec, policy)?)
    }

    pub fn component(&self) -> &FockVector {
        &self.component
    }

    /// Photon-number distribution `p_n` of the component.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Two-mode average energy `⟨n̂_a + n̂_b⟩ = ⟨n̂⟩ / (1 + p₀)`.
    pub fn n_av(&self) -> f64 {
        self.n_av
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Highest photon number in the component's support.
    pub fn support_max(&self) -> usize {
        self.component.support_max()
    }

    /// Materializes `|ψ⟩_ab` on the component's cutoff.
    pub fn two_mode_state(&self) -> TwoModeState {
        let amps = self.component.amps();
        let n_max = self.component.n_max();
        let k = Complex64::new(self.normalization, 0.0);
        let mut s = TwoModeState::zeros(n_max);
        for (n, a) in amps.iter().enumerate() {
            let cur = s.get(n, 0);
            s.set(n, 0, cur + a * k);
            let cur = s.get(0, n);
            s.set(0, n, cur + a * k);
        }
        s
    }
}

fn coherent_energy(mean: f64) -> f64 {
    mean / (1.0 + (-mean).exp())
}

fn squeezed_energy(r: f64) -> f64 {
    r.sinh().powi(2) / (1.0 + 1.0 / r.cosh())
}

/// Bisection for an increasing map on `[lo, hi]`; the bracket is checked
/// for strict monotonicity first.
fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> Result<f64> {
    const PROBES: usize = 64;
    let mut prev = f(lo);
    for i in 1..=PROBES {
        let x = lo + (hi - lo) * i as f64 / PROBES as f64;
        let y = f(x);
        if !(y > prev) {
            return Err(Error::Infeasible(format!("energy map not increasing near {x}")));
        }
        prev = y;
    }
    if !(f(lo) <= target && target <= f(hi)) {
        return Err(Error::InfeasibleEnergy(format!(
            "target {target} outside [{}, {}]",
            f(lo),
            f(hi)
        )));
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 1e-12 {
        let mid = 0.5 * (a + b);
        if f(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Picks the family member whose probe carries `n_av_target` photons on average.
pub fn solve_energy_constraint(family: ProbeFamily, n_av_target: f64) -> Result<ProbeSpec> {
    if !(n_av_target.is_finite() && n_av_target > 0.0) {
        return Err(Error::InfeasibleEnergy(format!("target {n_av_target} must be > 0")));
    }
    match family {
        ProbeFamily::Number => {
            let n = n_av_target.round();
            if (n - n_av_target).abs() > 1e-9 {
                return Err(Error::InfeasibleEnergy(format!(
                    "number state needs an integer energy, got {n_av_target}"
                )));
            }
            Ok(ProbeSpec::Number { n: n as usize })
        }
        ProbeFamily::OneN { n } => {
            if n < 2 {
                return Err(Error::InvalidSpec("superposition needs N >= 2".into()));
            }
            let nf = n as f64;
            if !(1.0..=nf).contains(&n_av_target) {
                return Err(Error::InfeasibleEnergy(format!(
                    "energy {n_av_target} outside [1, {n}] for N = {n}"
                )));
            }
            Ok(ProbeSpec::OneN {
                q: (nf - n_av_target) / (nf - 1.0),
                n,
            })
        }
        ProbeFamily::Coherent => {
            let mean = bisect_increasing(coherent_energy, n_av_target, 0.0, 4.0 * n_av_target + 4.0)?;
            Ok(ProbeSpec::Coherent {
                alpha: Complex64::new(mean.sqrt(), 0.0),
            })
        }
        ProbeFamily::SqueezedVacuum => {
            let hi = (2.0 * n_av_target).sqrt().asinh() + 2.0;
            let r = bisect_increasing(squeezed_energy, n_av_target, 0.0, hi)?;
            Ok(ProbeSpec::SqueezedVacuum { r, theta: 0.0 })
        }
    }
}

/// Text form of a probe used on the command line:
/// `noon:N=2`, `aooa:nav=2`, `soos:nav=2`, `qooq:N=8,nav=2`, `custom:file=<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Noon { n: Option<usize> },
    Aooa { nav: Option<f64> },
    Soos { nav: Option<f64> },
    Qooq { n: usize, nav: Option<f64> },
    Custom { path: PathBuf },
}

impl StateSpec {
    /// Family name plus the parameters that do not depend on energy.
    pub fn label(&self) -> String {
        match self {
            StateSpec::Noon { .. } => "noon".into(),
            StateSpec::Aooa { .. } => "aooa".into(),
            StateSpec::Soos { .. } => "soos".into(),
            StateSpec::Qooq { n, .. } => format!("qooq:N={n}"),
            StateSpec::Custom { path } => format!("custom:file={}", path.display()),
        }
    }

    /// The energy fixed by the spec itself, if any.
    pub fn fixed_nav(&self) -> Option<f64> {
        match *self {
            StateSpec::Noon { n } => n.map(|n| n as f64),
            StateSpec::Aooa { nav } | StateSpec::Soos { nav } | StateSpec::Qooq { nav, .. } => nav,
            StateSpec::Custom { .. } => None,
        }
    }

    pub fn family(&self) -> Option<ProbeFamily> {
        match *self {
            StateSpec::Noon { .. } => Some(ProbeFamily::Number),
            StateSpec::Aooa { .. } => Some(ProbeFamily::Coherent),
            StateSpec::Soos { .. } => Some(ProbeFamily::SqueezedVacuum),
            StateSpec::Qooq { n, .. } => Some(ProbeFamily::OneN { n }),
            StateSpec::Custom { .. } => None,
        }
    }

    /// Resolves to a concrete component at `nav` (or the spec's own energy).
    /// Custom states must be resolved by the caller, which owns file IO.
    pub fn resolve(&self, nav: Option<f64>) -> Result<ProbeSpec> {
        let family = self
            .family()
            .ok_or_else(|| Error::InvalidSpec("custom states are loaded from file".into()))?;
        let target = match (self.fixed_nav(), nav) {
            (Some(a), Some(b)) if (a - b).abs() > 1e-12 => {
                return Err(Error::InvalidSpec(format!(
                    "{} fixes energy {a}, but {b} was requested",
                    self.label()
                )))
            }
            (Some(a), _) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(Error::InvalidSpec(format!(
                    "{} needs an energy (nav=...)",
                    self.label()
                )))
            }
        };
        solve_energy_constraint(family, target)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Noon { n: Some(n) } => write!(f, "noon:N={n}"),
            StateSpec::Noon { n: None } => write!(f, "noon"),
            StateSpec::Aooa { nav: Some(v) } => write!(f, "aooa:nav={v}"),
            StateSpec::Aooa { nav: None } => write!(f, "aooa"),
            StateSpec::Soos { nav: Some(v) } => write!(f, "soos:nav={v}"),
            StateSpec::Soos { nav: None } => write!(f, "soos"),
            StateSpec::Qooq { n, nav: Some(v) } => write!(f, "qooq:N={n},nav={v}"),
            StateSpec::Qooq { n, nav: None } => write!(f, "qooq:N={n}"),
            StateSpec::Custom { path } => write!(f, "custom:file={}", path.display()),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = match s.split_once(':') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        let mut n: Option<usize> = None;
        let mut nav: Option<f64> = None;
        let mut file: Option<PathBuf> = None;
        for kv in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidSpec(format!("expected key=value, got `{kv}`")))?;
            match k.trim() {
                "N" => {
                    n = Some(
                        v.trim()
                            .parse()
                            .map_err(|_| Error::InvalidSpec(format!("bad N `{v}`")))?,
                    )
                }
                "nav" => {
                    nav = Some(
                        v.trim()
                            .parse()
                            .map_err(|_| Error::InvalidSpec(format!("bad nav `{v}`")))?,
                    )
                }
                "file" => file = Some(PathBuf::from(v.trim())),
                other => return Err(Error::InvalidSpec(format!("unknown key `{other}` in `{s}`"))),
            }
        }
        let spec = match name.trim().to_ascii_lowercase().as_str() {
            "noon" => {
                let n = match (n, nav) {
                    (Some(n), None) => Some(n),
                    (None, Some(v)) => Some(solve_energy_constraint(ProbeFamily::Number, v).map(|s| match s {
                        ProbeSpec::Number { n } => n,
                        _ => unreachable!(),
                    })?),
                    (Some(n), Some(v)) if (n as f64 - v).abs() < 1e-12 => Some(n),
                    (None, None) => None,
                    _ => return Err(Error::InvalidSpec(format!("inconsistent N and nav in `{s}`"))),
                };
                StateSpec::Noon { n }
            }
            "aooa" => StateSpec::Aooa { nav },
            "soos" => StateSpec::Soos { nav },
            "qooq" => StateSpec::Qooq {
                n: n.ok_or_else(|| Error::InvalidSpec(format!("qooq needs N in `{s}`")))?,
                nav,
            },
            "custom" => StateSpec::Custom {
                path: file.ok_or_else(|| Error::InvalidSpec(format!("custom needs file= in `{s}`")))?,
            },
            other => return Err(Error::InvalidSpec(format!("unknown state family `{other}`"))),
        };
        Ok(spec)
    }
}

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use phasecraft::generation::{decomposable_generation, generate_qooq_from_noon, generate_soos, Gate, GenerationReport};
use phasecraft::interferometer::{
    counting_curve, noon_lossy_fi, parity_curve, parity_expectation, parity_sensitivity, snl_beating_range,
    CountingModel,
};
use phasecraft::metrology::{phase_averaged_state, qfi_mixed, qfi_pure, qfi_report, snl};
use phasecraft::probes::StateSpec;
use phasecraft::study::{optimize_qooq_n, qooq_inverse_fi, sample_random_components, DEFAULT_PHI_EVAL, MAX_SCAN_N};
use phasecraft::{Complex64, PathSymmetricProbe, PhaseGenerator, PhiGrid, ProbeSpec, TruncationPolicy};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{parse_grid, parse_range, Fig4Mode, Measurement, Opts, Scheme};
use crate::output::{Cell, Table};

pub const DEFAULT_STATES: [&str; 5] = ["noon", "aooa", "soos", "qooq:N=8", "qooq:N=100"];

pub struct Ctx {
    pub opts: Opts,
    pub policy: TruncationPolicy,
    pub generator: PhaseGenerator,
}

impl Ctx {
    pub fn new(opts: Opts, policy: TruncationPolicy) -> Result<Self> {
        let generator = match &opts.generator {
            Some(g) => g.parse()?,
            None => PhaseGenerator::default(),
        };
        Ok(Ctx {
            opts,
            policy,
            generator,
        })
    }

    pub fn metadata(&self, command: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(command));
        m.insert("config".into(), json!(serde_json::to_string(&self.opts).unwrap()));
        m.insert("seed".into(), self.opts.seed.map_or(json!("none"), |s| json!(s)));
        m.insert(
            "truncation".into(),
            json!(format!(
                "tail_tolerance={} n_max_cap={}",
                self.policy.tail_tolerance, self.policy.n_max_cap
            )),
        );
        let generator = match self.generator {
            PhaseGenerator::TwoArmSymmetric => "two-arm exp(-i phi (n_a - n_b)/2)",
            PhaseGenerator::SingleArm => "single-arm exp(i phi n_b)",
        };
        m.insert("generator".into(), json!(generator));
        m
    }

    fn states(&self) -> Result<Vec<StateSpec>> {
        let raw: Vec<String> = if self.opts.state.is_empty() {
            DEFAULT_STATES.iter().map(|s| s.to_string()).collect()
        } else {
            self.opts.state.clone()
        };
        raw.iter()
            .map(|s| s.parse::<StateSpec>().map_err(|e| anyhow!("--state {s}: {e}")))
            .collect()
    }

    fn single(&self, values: &[f64], name: &str, default: f64) -> Result<f64> {
        match values {
            [] => Ok(default),
            [x] => Ok(*x),
            _ => bail!("{name} takes a single value here"),
        }
    }

    fn grid(&self) -> Result<Option<PhiGrid>> {
        self.opts
            .phi_grid
            .as_deref()
            .map(|g| {
                let (a, b, n) = parse_grid(g)?;
                Ok(PhiGrid::new(a, b, n)?)
            })
            .transpose()
    }

    fn phis(&self, default: f64) -> Result<Vec<f64>> {
        Ok(match self.grid()? {
            Some(g) => g.values(),
            None if self.opts.phi.is_empty() => vec![default],
            None => self.opts.phi.clone(),
        })
    }
}

fn load_custom(path: &Path) -> Result<ProbeSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
        .with_context(|| format!("{}: expected a JSON array of [re, im]", path.display()))?;
    Ok(ProbeSpec::Custom {
        amps: pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
    })
}

pub fn build_probe(state: &StateSpec, nav: Option<f64>, policy: &TruncationPolicy) -> Result<PathSymmetricProbe> {
    let spec = match state {
        StateSpec::Custom { path } => load_custom(path)?,
        s => s.resolve(nav)?,
    };
    Ok(PathSymmetricProbe::from_spec(&spec, policy)?)
}

fn nav_cell(state: &StateSpec, nav: Option<f64>) -> Cell {
    nav.or(state.fixed_nav()).map_or(Cell::Empty, Cell::Num)
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

pub fn fig1(ctx: &Ctx) -> Result<Table> {
    let states = ctx.states()?;
    let default_grid = ctx.opts.nav.is_empty();
    let grid = if default_grid {
        log_grid(0.5, 5.0, 60)
    } else {
        ctx.opts.nav.clone()
    };
    let mut jobs: Vec<(String, StateSpec, f64)> = Vec::new();
    let mut envelope = Vec::new();
    for s in &states {
        let points: Vec<f64> = match (default_grid, s) {
            (true, StateSpec::Noon { n: None }) => {
                envelope.extend(grid.iter().copied());
                (1..=5).map(|n| n as f64).collect()
            }
            (true, StateSpec::Qooq { n, nav: None }) => {
                grid.iter().copied().filter(|&x| x >= 1.0 && x <= *n as f64).collect()
            }
            (_, s) if s.fixed_nav().is_some() => vec![s.fixed_nav().unwrap()],
            _ => grid.clone(),
        };
        jobs.extend(points.into_iter().map(|x| (s.label(), s.clone(), x)));
    }
    let results: Vec<Result<(f64, f64)>> = jobs
        .par_iter()
        .map(|(_, s, nav)| {
            let probe = build_probe(s, Some(*nav), &ctx.policy)?;
            let r = qfi_report(&probe, 1)?;
            Ok((r.f_q, r.qcrb))
        })
        .collect();

    let mut t = Table::new(vec!["state", "n_av", "f_q", "qcrb", "error"]);
    for ((label, _, nav), r) in jobs.iter().zip(results) {
        match r {
            Ok((f, q)) => t.push(vec![
                label.as_str().into(),
                Cell::Num(*nav),
                f.into(),
                q.into(),
                Cell::Empty,
            ]),
            Err(e) => t.push_error(vec![label.as_str().into(), Cell::Num(*nav)], e.to_string()),
        }
    }
    for nav in envelope {
        t.push(vec![
            "noon-envelope".into(),
            Cell::Num(nav),
            (nav * nav).into(),
            (1.0 / (nav * nav)).into(),
            Cell::Empty,
        ]);
    }
    if default_grid {
        t.notes.push((
            "nav_grid".into(),
            "60 log-spaced points on [0.5, 5], clipped to each family's domain".into(),
        ));
    }
    Ok(t)
}

pub fn fig3(ctx: &Ctx) -> Result<Table> {
    let states = ctx.states()?;
    let nav = ctx.single(&ctx.opts.nav, "--nav", 2.0)?;
    let tr = ctx.single(&ctx.opts.t, "--T", 0.9)?;
    let grid = ctx.grid()?.unwrap_or_default();
    let measurement = ctx.opts.measurement.unwrap_or(Measurement::Parity);
    let mut t = Table::new(vec!["phi", "sensitivity", "snl", "label", "T", "n_av", "error"]);
    t.notes
        .push(("measurement".into(), format!("{measurement:?}").to_lowercase()));
    t.notes.push((
        "phi_grid".into(),
        format!("{}:{}:{} cell-centred", grid.start, grid.stop, grid.points),
    ));
    for s in &states {
        let label = s.label();
        let curve = build_probe(s, Some(nav), &ctx.policy).and_then(|p| {
            Ok(match measurement {
                Measurement::Parity => parity_curve(&p, &grid, tr, &label)?,
                Measurement::Counting => counting_curve(&p, &grid, tr, &label)?,
            })
        });
        match curve {
            Ok(c) => {
                t.notes.push((
                    format!("snl_beating_range {label}"),
                    crate::output::num(snl_beating_range(&c)),
                ));
                for (phi, sens) in c.phi.iter().zip(&c.sensitivity) {
                    t.push(vec![
                        Cell::Num(*phi),
                        Cell::Num(*sens),
                        Cell::Num(c.snl),
                        label.as_str().into(),
                        Cell::Num(tr),
                        Cell::Num(nav),
                        Cell::Empty,
                    ]);
                }
            }
            Err(e) => t.push_error(
                vec![
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    label.as_str().into(),
                    Cell::Num(tr),
                    Cell::Num(nav),
                ],
                e.to_string(),
            ),
        }
    }
    for phi in grid.values() {
        t.push(vec![
            Cell::Num(phi),
            Cell::Num(snl(nav)),
            Cell::Num(snl(nav)),
            "snl".into(),
            Cell::Num(tr),
            Cell::Num(nav),
            Cell::Empty,
        ]);
    }
    Ok(t)
}

fn default_n_range(nav: f64) -> (usize, usize) {
    (nav.ceil() as usize + 1, 40)
}

fn n_list(ns: &[usize]) -> String {
    ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";")
}

pub fn fig4(ctx: &Ctx) -> Result<Table> {
    match ctx.opts.mode.unwrap_or(Fig4Mode::Optimize) {
        Fig4Mode::Optimize => fig4_optimize(ctx),
        Fig4Mode::Sample => sample_table(ctx, 37_132, false),
        Fig4Mode::Curves => fig4_curves(ctx),
    }
}

fn fig4_optimize(ctx: &Ctx) -> Result<Table> {
    let ts = if ctx.opts.t.is_empty() {
        vec![0.95, 0.9, 0.85, 0.8]
    } else {
        ctx.opts.t.clone()
    };
    let navs = if ctx.opts.nav.is_empty() {
        vec![1.1, 1.5, 2.0, 2.5, 3.0]
    } else {
        ctx.opts.nav.clone()
    };
    let phi = ctx.single(&ctx.opts.phi, "--phi", DEFAULT_PHI_EVAL)?;
    let fixed = ctx.opts.n_range.as_deref().map(parse_range).transpose()?;
    let jobs: Vec<(f64, f64)> = ts.iter().flat_map(|&t| navs.iter().map(move |&n| (t, n))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(t, nav)| {
            let (lo, hi) = fixed.unwrap_or_else(|| default_n_range(nav));
            optimize_qooq_n(t, nav, lo..=hi, phi)
        })
        .collect();
    let mut table = Table::new(vec!["T", "n_av", "best_n_list", "best_sensitivity", "error"]);
    table.notes.push(("phi_eval".into(), crate::output::num(phi)));
    table.notes.push((
        "n_range".into(),
        match fixed {
            Some((lo, hi)) => format!("{lo}:{hi}"),
            None => "ceil(n_av)+1:40".into(),
        },
    ));
    for ((t, nav), r) in jobs.iter().zip(results) {
        match r {
            Ok(o) => table.push(vec![
                Cell::Num(*t),
                Cell::Num(*nav),
                n_list(&o.best_n_set).into(),
                o.best_sensitivity.into(),
                Cell::Empty,
            ]),
            Err(e) => table.push_error(vec![Cell::Num(*t), Cell::Num(*nav)], e.to_string()),
        }
    }
    Ok(table)
}

fn fig4_curves(ctx: &Ctx) -> Result<Table> {
    let ts = if ctx.opts.t.is_empty() {
        vec![0.9]
    } else {
        ctx.opts.t.clone()
    };
    let navs: Vec<f64> = if ctx.opts.nav.is_empty() {
        (11..=30).map(|i| i as f64 / 10.0).collect()
    } else {
        ctx.opts.nav.clone()
    };
    let phi = ctx.single(&ctx.opts.phi, "--phi", DEFAULT_PHI_EVAL)?;
    let jobs: Vec<(f64, f64)> = ts.iter().flat_map(|&t| navs.iter().map(move |&n| (t, n))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(t, nav)| -> Result<(f64, f64, Vec<usize>, f64)> {
            let q8 = qooq_inverse_fi(8, nav, t, phi)?;
            let (lo, hi) = default_n_range(nav);
            let best = optimize_qooq_n(t, nav, lo..=hi.min(MAX_SCAN_N), phi)?;
            Ok((1.0 / noon_lossy_fi(nav, t), q8, best.best_n_set, best.best_sensitivity))
        })
        .collect();
    let mut table = Table::new(vec![
        "T",
        "n_av",
        "noon_envelope_inv_fi",
        "qooq8_inv_fi",
        "best_n_list",
        "best_inv_fi",
        "error",
    ]);
    table.notes.push(("phi_eval".into(), crate::output::num(phi)));
    for ((t, nav), r) in jobs.iter().zip(results) {
        match r {
            Ok((noon, q8, ns, best)) => table.push(vec![
                Cell::Num(*t),
                Cell::Num(*nav),
                noon.into(),
                q8.into(),
                n_list(&ns).into(),
                best.into(),
                Cell::Empty,
            ]),
            Err(e) => table.push_error(vec![Cell::Num(*t), Cell::Num(*nav)], e.to_string()),
        }
    }
    Ok(table)
}

pub fn sample_table(ctx: &Ctx, default_count: usize, with_digest: bool) -> Result<Table> {
    let count = ctx.opts.count.unwrap_or(default_count);
    let seed = ctx.opts.seed.unwrap_or(1);
    let support = ctx.opts.support.unwrap_or(10);
    let tr = ctx.single(&ctx.opts.t, "--T", 0.9)?;
    let phi = ctx.single(&ctx.opts.phi, "--phi", DEFAULT_PHI_EVAL)?;
    let records = sample_random_components(count, support, seed, tr, phi)?;
    let mut columns = vec!["id", "n_av", "inv_fi"];
    if with_digest {
        columns.push("weights_digest");
    }
    let mut table = Table::new(columns);
    table.notes.push((
        "sampler".into(),
        format!("flat Dirichlet on p_1..p_{support}, seed {seed}"),
    ));
    table.notes.push(("T".into(), crate::output::num(tr)));
    table.notes.push(("phi_eval".into(), crate::output::num(phi)));
    for r in records {
        let mut row = vec![Cell::from(r.id), r.n_av.into(), r.inv_fi.into()];
        if with_digest {
            row.push(r.weights_digest.into());
        }
        table.push(row);
    }
    Ok(table)
}

pub fn qfi(ctx: &Ctx) -> Result<Table> {
    let states = ctx.states()?;
    let navs = if ctx.opts.nav.is_empty() {
        vec![2.0]
    } else {
        ctx.opts.nav.clone()
    };
    let jobs: Vec<(StateSpec, Option<f64>)> = states
        .iter()
        .flat_map(|s| -> Vec<(StateSpec, Option<f64>)> {
            if s.fixed_nav().is_some() || matches!(s, StateSpec::Custom { .. }) {
                vec![(s.clone(), None)]
            } else {
                navs.iter().map(|&n| (s.clone(), Some(n))).collect()
            }
        })
        .collect();
    let g = ctx.generator;
    let results: Vec<_> = jobs
        .par_iter()
        .map(|(s, nav)| -> Result<Vec<Cell>> {
            let p = build_probe(s, *nav, &ctx.policy)?;
            let r = qfi_report(&p, 1)?;
            let mixed = qfi_mixed(&phase_averaged_state(&p), g).f_q;
            Ok(vec![
                r.n_av.into(),
                r.p0.into(),
                r.mandel_q.into(),
                r.f_q.into(),
                qfi_pure(&p, g).into(),
                mixed.into(),
                r.qcrb.into(),
                Cell::Empty,
            ])
        })
        .collect();
    let mut t = Table::new(vec![
        "state",
        "n_av",
        "p0",
        "mandel_q",
        "f_q",
        "f_q_pure",
        "f_q_mixed",
        "qcrb",
        "error",
    ]);
    for ((s, nav), r) in jobs.iter().zip(results) {
        match r {
            Ok(cells) => {
                let mut row = vec![Cell::from(s.label())];
                row.extend(cells);
                t.push(row);
            }
            Err(e) => t.push_error(vec![s.label().into(), nav_cell(s, *nav)], e.to_string()),
        }
    }
    Ok(t)
}

enum Pointwise {
    Parity,
    Fisher,
}

fn pointwise(ctx: &Ctx, kind: Pointwise) -> Result<Table> {
    let states = ctx.states()?;
    let nav = ctx.single(&ctx.opts.nav, "--nav", 2.0)?;
    let ts = if ctx.opts.t.is_empty() {
        vec![1.0]
    } else {
        ctx.opts.t.clone()
    };
    let phis = ctx.phis(1.0)?;
    let columns = match kind {
        Pointwise::Parity => vec![
            "phi",
            "expectation",
            "sensitivity",
            "snl",
            "label",
            "T",
            "n_av",
            "error",
        ],
        Pointwise::Fisher => vec!["phi", "fi", "inv_fi", "snl", "label", "T", "n_av", "error"],
    };
    let mut table = Table::new(columns);
    for s in &states {
        let label = s.label();
        let nav_in = if s.fixed_nav().is_some() || matches!(s, StateSpec::Custom { .. }) {
            None
        } else {
            Some(nav)
        };
        let probe = match build_probe(s, nav_in, &ctx.policy) {
            Ok(p) => p,
            Err(e) => {
                table.push_error(
                    vec![
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        label.as_str().into(),
                        Cell::Empty,
                        nav_cell(s, nav_in),
                    ],
                    e.to_string(),
                );
                continue;
            }
        };
        let limit = snl(probe.n_av());
        for &tr in &ts {
            let values: Result<Vec<(f64, f64)>> = match kind {
                Pointwise::Parity => phis
                    .par_iter()
                    .map(|&phi| {
                        Ok((
                            parity_expectation(&probe, phi, tr)?,
                            parity_sensitivity(&probe, phi, tr)?,
                        ))
                    })
                    .collect(),
                Pointwise::Fisher => CountingModel::new(&probe, tr).map_err(Into::into).map(|m| {
                    phis.par_iter()
                        .map(|&phi| {
                            let f = m.fisher_information(phi);
                            (f, if f > 0.0 { 1.0 / f } else { f64::INFINITY })
                        })
                        .collect()
                }),
            };
            match values {
                Ok(v) => {
                    for (phi, (a, b)) in phis.iter().zip(v) {
                        table.push(vec![
                            Cell::Num(*phi),
                            a.into(),
                            b.into(),
                            limit.into(),
                            label.as_str().into(),
                            Cell::Num(tr),
                            probe.n_av().into(),
                            Cell::Empty,
                        ]);
                    }
                }
                Err(e) => table.push_error(
                    vec![
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        label.as_str().into(),
                        Cell::Num(tr),
                        probe.n_av().into(),
                    ],
                    e.to_string(),
                ),
            }
        }
    }
    Ok(table)
}

pub fn parity(ctx: &Ctx) -> Result<Table> {
    pointwise(ctx, Pointwise::Parity)
}

pub fn fi(ctx: &Ctx) -> Result<Table> {
    pointwise(ctx, Pointwise::Fisher)
}

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let v = match body {
        "pi" => PI,
        "pi/2" => PI / 2.0,
        "2pi" => 2.0 * PI,
        v => v.parse().with_context(|| format!("bad number `{s}`"))?,
    };
    Ok(if neg { -v } else { v })
}

fn parse_alpha(s: &str) -> Result<Complex64> {
    match s.split_once(':') {
        Some((re, im)) => Ok(Complex64::new(parse_number(re)?, parse_number(im)?)),
        None => Ok(Complex64::new(parse_number(s)?, 0.0)),
    }
}

/// `squeeze:r:theta` and `rot:x` separated by `;`, applied first to last.
pub fn parse_gates(s: &str) -> Result<Vec<Gate>> {
    s.split(';')
        .map(str::trim)
        .filter(|g| !g.is_empty())
        .map(|g| {
            let parts: Vec<&str> = g.split(':').collect();
            match parts.as_slice() {
                ["squeeze", r] => Ok(Gate::Squeeze {
                    r: parse_number(r)?,
                    theta: 0.0,
                }),
                ["squeeze", r, th] => Ok(Gate::Squeeze {
                    r: parse_number(r)?,
                    theta: parse_number(th)?,
                }),
                ["rot", x] => Ok(Gate::PhaseRotation { x: parse_number(x)? }),
                _ => bail!("unknown gate `{g}`; expected squeeze:r[:theta] or rot:x"),
            }
        })
        .collect()
}

pub fn generate(ctx: &Ctx) -> Result<Value> {
    let scheme = ctx
        .opts
        .scheme
        .ok_or_else(|| anyhow!("--scheme is required (soos, qooq, decomposable)"))?;
    let o = &ctx.opts;
    let (name, parameters, report): (&str, Value, GenerationReport) = match scheme {
        Scheme::Soos => {
            let (r, theta, x) = (o.r.unwrap_or(0.3), o.theta.unwrap_or(0.0), o.x.unwrap_or(PI / 2.0));
            let rep = generate_soos(r, theta, x, &ctx.policy, o.n_max)?;
            (
                "soos",
                json!({ "r": r, "theta": theta, "x": x, "n_max": rep.output.n_max() }),
                rep,
            )
        }
        Scheme::Qooq => {
            let n = o.n.unwrap_or(2);
            let alpha = parse_alpha(o.alpha.as_deref().unwrap_or("1"))?;
            let rep = generate_qooq_from_noon(n, alpha, &ctx.policy)?;
            ("qooq", json!({ "N": n, "alpha": [alpha.re, alpha.im] }), rep)
        }
        Scheme::Decomposable => {
            let text = o
                .gates
                .as_deref()
                .ok_or_else(|| anyhow!("--gates is required for the decomposable scheme"))?;
            let gates = parse_gates(text)?;
            let x = o.x.unwrap_or(PI / 2.0);
            let rep = decomposable_generation(&gates, x, &ctx.policy, o.n_max)?;
            (
                "decomposable",
                json!({ "gates": text, "x": x, "n_max": rep.output.n_max() }),
                rep,
            )
        }
    };
    Ok(json!({
        "metadata": ctx.metadata("generate"),
        "scheme": name,
        "parameters": parameters,
        "fidelity": report.fidelity,
        "success_probability": report.success_probability,
        "degenerate": report.degenerate,
        "output_support": report.output_support,
    }))
}

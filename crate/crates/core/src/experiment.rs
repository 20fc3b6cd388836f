//! Experiment drivers producing CSV tables: state dynamics, decoherence
//! sweeps, control-error sweeps and the geometric-condition checks.
//!
//! Sweep points run concurrently; results are collected in grid order, so
//! output does not depend on the worker count.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{DeviceKind, ExperimentConfig, SweepKind};
use crate::device::{
    collapse_channels, effective_trajectory, pair_index, two_qubit_channels, CoupledParams,
    CphaseSpec,
};
use crate::dynamics::{lindblad_evolve_observed, propagate_unitary};
use crate::error::{Error, Result};
use crate::gates::{
    gate_fidelity_single, gate_fidelity_two, ideal_propagator, single_qubit_setup, two_qubit_setup,
    verify_cyclic, verify_parallel_transport, SimOptions,
};
use crate::matrix::{ComplexMatrix, C64};
use crate::pulses::{sngqc_schedule, ErrorModel, GateParams, Scheme};
use crate::state::{DensityMatrix, QuantumState};

/// Nominal spacing of dynamics samples.
pub const SAMPLE_SPACING: f64 = 0.25e-9;

/// Nine significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

/// Time series with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.rows.last().map(Vec::as_slice)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Picks samples from the integrator's step stream at roughly
/// [`SAMPLE_SPACING`], always keeping the first and last step.
struct Sampler {
    next: f64,
    times: Vec<f64>,
    states: Vec<ComplexMatrix>,
    last: Option<(f64, ComplexMatrix)>,
}

impl Sampler {
    fn new() -> Self {
        Self {
            next: 0.0,
            times: Vec::new(),
            states: Vec::new(),
            last: None,
        }
    }

    fn observe(&mut self, t: f64, rho: &ComplexMatrix) {
        if t >= self.next - 1e-15 {
            self.times.push(t);
            self.states.push(rho.clone());
            self.next = t + SAMPLE_SPACING;
            self.last = None;
        } else {
            self.last = Some((t, rho.clone()));
        }
    }

    fn finish(mut self) -> (Vec<f64>, Vec<ComplexMatrix>) {
        if let Some((t, rho)) = self.last.take() {
            self.times.push(t);
            self.states.push(rho);
        }
        (self.times, self.states)
    }
}

fn sim_options(cfg: &ExperimentConfig) -> SimOptions {
    SimOptions {
        dt: cfg.dt,
        drag: cfg.drag,
        leakage: cfg.leakage,
        errors: cfg.errors,
    }
}

fn coupled(cfg: &ExperimentConfig) -> Result<CoupledParams> {
    cfg.coupled.ok_or_else(|| {
        Error::InvalidParameter("configuration has no coupled-pair parameters".into())
    })
}

/// Populations and fidelity against the ideal instantaneous state.
///
/// Single qubit: `t_ns, P0, P1, P2, F`, with the ideal state evolved by the
/// two-level model. Pair: `t_ns, P11, P02, F` with the ideal state from the
/// effective `{|11⟩, |02⟩}` model.
pub fn run_state_dynamics(cfg: &ExperimentConfig) -> Result<TimeSeries> {
    if cfg.sweep.is_some() {
        return Err(Error::InvalidParameter(
            "state dynamics needs sweep = none".into(),
        ));
    }
    match cfg.device {
        DeviceKind::Transmon => single_dynamics(cfg),
        DeviceKind::Coupled => pair_dynamics(cfg),
    }
}

fn single_dynamics(cfg: &ExperimentConfig) -> Result<TimeSeries> {
    let opts = sim_options(cfg);
    let (sched, traj) = single_qubit_setup(&cfg.gate, &cfg.transmon, &opts)?;
    let levels = traj.dim();
    let ch = collapse_channels(&cfg.transmon, levels)?;
    let psi0 = QuantumState::qubit(cfg.psi0.0, cfg.psi0.1);
    let rho0 = DensityMatrix::pure(&psi0.embed(levels));
    let mut sampler = Sampler::new();
    lindblad_evolve_observed(&rho0, &traj, &ch, cfg.dt, |t, rho| sampler.observe(t, rho))?;
    let (times, states) = sampler.finish();

    let ideal = crate::device::single_qubit_trajectory(&sched.without_drag(), &cfg.transmon, false);
    let mut u = ComplexMatrix::identity(2);
    let mut prev = 0.0;
    let mut rows = Vec::with_capacity(times.len());
    for (&t, rho) in times.iter().zip(&states) {
        u = propagate_unitary(&ideal, prev, t, cfg.dt)?.matmul(&u);
        prev = t;
        let target = psi0.evolve(&u).embed(levels);
        let f = rho.sandwich(target.amplitudes(), target.amplitudes()).re;
        let p2 = if levels == 3 { rho[(2, 2)].re } else { 0.0 };
        rows.push(vec![t * 1e9, rho[(0, 0)].re, rho[(1, 1)].re, p2, f]);
    }
    Ok(TimeSeries {
        columns: ["t_ns", "P0", "P1", "P2", "F"].map(String::from).to_vec(),
        rows,
    })
}

fn pair_spec(cfg: &ExperimentConfig, scheme: Scheme) -> CphaseSpec {
    CphaseSpec {
        scheme,
        ..cfg.cphase
    }
}

fn pair_dynamics(cfg: &ExperimentConfig) -> Result<TimeSeries> {
    let cp = coupled(cfg)?;
    let spec = pair_spec(cfg, cfg.gate.scheme);
    let cp = if spec.scheme == Scheme::Sngqc {
        cp
    } else {
        cp.with_zeta(cfg.ngqc_zeta)?
    };
    let (sched, traj) = two_qubit_setup(&cp, &spec)?;
    let ch = two_qubit_channels(&cfg.transmon)?;
    let (j, k) = cfg.psi0_pair;
    let start = pair_index(j, k);
    let rho0 = DensityMatrix::pure(&QuantumState::basis(9, start));
    let mut sampler = Sampler::new();
    lindblad_evolve_observed(&rho0, &traj, &ch, cfg.dt, |t, rho| sampler.observe(t, rho))?;
    let (times, states) = sampler.finish();

    let s11 = pair_index(1, 1);
    let s02 = pair_index(0, 2);
    let eff = effective_trajectory(&cp, &sched);
    let mut u = ComplexMatrix::identity(2);
    let mut prev = 0.0;
    let mut rows = Vec::with_capacity(times.len());
    for (&t, rho) in times.iter().zip(&states) {
        u = propagate_unitary(&eff, prev, t, cfg.dt)?.matmul(&u);
        prev = t;
        // Only |11⟩ and |02⟩ move in the effective model; others stay put.
        let mut target = vec![C64::new(0.0, 0.0); 9];
        if start == s11 || start == s02 {
            let col = if start == s11 { 0 } else { 1 };
            target[s11] = u[(0, col)];
            target[s02] = u[(1, col)];
        } else {
            target[start] = C64::new(1.0, 0.0);
        }
        let f = rho.sandwich(&target, &target).re;
        rows.push(vec![t * 1e9, rho[(s11, s11)].re, rho[(s02, s02)].re, f]);
    }
    Ok(TimeSeries {
        columns: ["t_ns", "P11", "P02", "F"].map(String::from).to_vec(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub scheme: Scheme,
    pub fidelity: f64,
    pub leakage: f64,
    pub duration: f64,
}

/// Sweep output: rows grouped by scheme, ascending in the swept value.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn header(&self) -> String {
        format!("{},scheme,fidelity,leakage,duration_s", self.kind.column())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_num(r.value),
                r.scheme,
                fmt_num(r.fidelity),
                fmt_num(r.leakage),
                fmt_num(r.duration)
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Table("empty CSV".into()))?;
        let first = header.split(',').next().unwrap_or("");
        let kind = SweepKind::from_column(first)
            .ok_or_else(|| Error::Table(format!("unknown sweep column {first:?}")))?;
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != 5 {
                return Err(Error::Table(format!(
                    "row {}: expected 5 cells, got {}",
                    n + 1,
                    cells.len()
                )));
            }
            let num = |k: usize| -> Result<f64> {
                cells[k]
                    .parse()
                    .map_err(|e| Error::Table(format!("row {}: cell {}: {e}", n + 1, k + 1)))
            };
            rows.push(SweepRow {
                value: num(0)?,
                scheme: cells[1]
                    .parse()
                    .map_err(|e: Error| Error::Table(format!("row {}: {e}", n + 1)))?,
                fidelity: num(2)?,
                leakage: num(3)?,
                duration: num(4)?,
            });
        }
        Ok(Self { kind, rows })
    }

    /// Rows of one scheme, ascending in the swept value.
    pub fn series(&self, scheme: Scheme) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.scheme == scheme).collect()
    }
}

fn sweep_grid(cfg: &ExperimentConfig, expect: &[SweepKind]) -> Result<(SweepKind, Vec<f64>)> {
    match cfg.sweep {
        Some(s) if expect.contains(&s.kind) => Ok((s.kind, s.values())),
        Some(s) => Err(Error::InvalidParameter(format!(
            "sweep = {} is not valid for this experiment",
            s.kind.key()
        ))),
        None => Err(Error::InvalidParameter("configuration has no sweep".into())),
    }
}

fn run_points<F>(
    kind: SweepKind,
    schemes: &[Scheme],
    values: &[f64],
    point: F,
) -> Result<SweepResult>
where
    F: Fn(Scheme, f64) -> Result<(f64, f64, f64)> + Sync,
{
    let jobs: Vec<(Scheme, f64)> = schemes
        .iter()
        .flat_map(|&s| values.iter().map(move |&v| (s, v)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(scheme, value)| {
            let (fidelity, leakage, duration) = point(scheme, value)?;
            Ok(SweepRow {
                value,
                scheme,
                fidelity,
                leakage,
                duration,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { kind, rows })
}

/// Gate fidelity against `κ₁ = κ₂ = κ` for every configured scheme.
///
/// On the coupled device the orange-slice comparator runs at `ngqc_zeta`.
pub fn run_decoherence_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    let (kind, values) = sweep_grid(cfg, &[SweepKind::Kappa])?;
    let opts = sim_options(cfg);
    match cfg.device {
        DeviceKind::Transmon => run_points(kind, &cfg.schemes, &values, |scheme, kappa| {
            let gp = cfg.gate.with_scheme(scheme);
            let r =
                gate_fidelity_single(&gp, &cfg.transmon.with_kappa(kappa), cfg.n_states, &opts)?;
            Ok((r.gate_fidelity, r.leakage, r.duration))
        }),
        DeviceKind::Coupled => {
            let cp = coupled(cfg)?;
            let cp_ngqc = cp.with_zeta(cfg.ngqc_zeta)?;
            run_points(kind, &cfg.schemes, &values, |scheme, kappa| {
                let cp = if scheme == Scheme::Sngqc { cp } else { cp_ngqc };
                let spec = pair_spec(cfg, scheme);
                let r = gate_fidelity_two(
                    &cp,
                    &cfg.transmon.with_kappa(kappa),
                    &spec,
                    cfg.n_states,
                    cfg.dt,
                )?;
                Ok((r.gate_fidelity, r.leakage, r.duration))
            })
        }
    }
}

/// Gate fidelity against the Rabi error `ε` or the detuning error `δ`, at the
/// configured decoherence rates.
pub fn run_error_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    if cfg.device != DeviceKind::Transmon {
        return Err(Error::InvalidParameter(
            "error sweeps need device = transmon".into(),
        ));
    }
    let (kind, values) = sweep_grid(cfg, &[SweepKind::RabiEps, SweepKind::DetuningDelta])?;
    let base = sim_options(cfg);
    run_points(kind, &cfg.schemes, &values, |scheme, v| {
        let errors = match kind {
            SweepKind::RabiEps => ErrorModel {
                rabi_epsilon: v,
                ..base.errors
            },
            _ => ErrorModel {
                detuning_delta: v,
                ..base.errors
            },
        };
        let gp = cfg.gate.with_scheme(scheme);
        let r = gate_fidelity_single(
            &gp,
            &cfg.transmon,
            cfg.n_states,
            &SimOptions { errors, ..base },
        )?;
        Ok((r.gate_fidelity, r.leakage, r.duration))
    })
}

/// Worst-case results of the geometric-condition checks over random gates.
///
/// The `min_corrupted_*` fields come from negative controls: the third
/// segment's area is cut to `π/3` for the cyclic check and its phase is
/// rotated by `π/2` for the transport check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifySummary {
    pub gates: usize,
    pub max_cyclic_deviation: f64,
    pub max_phase_error: f64,
    pub max_transport: f64,
    pub max_gate_error: f64,
    pub min_corrupted_cyclic: f64,
    pub min_corrupted_transport: f64,
}

/// Draws `n` short-path gates with `θ ∈ [0, π]`, `φ ∈ [−π, π)`,
/// `γ ∈ [−2π, 2π)` from a fixed seed and runs every check on each.
pub fn verify_random_gates(
    n: usize,
    seed: u64,
    omega_max: f64,
    delta: f64,
    samples: usize,
) -> Result<VerifySummary> {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one gate".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<GateParams> = (0..n)
        .map(|_| {
            GateParams::new(
                rng.gen_range(0.0..=PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-TAU..TAU),
                Scheme::Sngqc,
            )
        })
        .collect::<Result<_>>()?;
    let results = draws
        .par_iter()
        .map(|gp| {
            let sched = sngqc_schedule(gp, omega_max, delta)?;
            let cyc = verify_cyclic(&sched, gp)?;
            let pt = verify_parallel_transport(&sched, gp, samples)?;
            let u = ideal_propagator(&sched, 1e-12)?;
            let err = u.max_abs_diff(&crate::gates::ideal_single_gate(gp).matrix);

            let mut short = sched.clone();
            short.segments_mut()[2].duration = 2.0 * (PI / 3.0) / omega_max;
            let bad_cyc = verify_cyclic(&short, gp)?.deviation;
            let mut turned = sched.clone();
            turned.segments_mut()[2].phase += FRAC_PI_2;
            let bad_pt = verify_parallel_transport(&turned, gp, samples)?;
            Ok([cyc.deviation, cyc.phase_error, pt, err, bad_cyc, bad_pt])
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |k: usize| results.iter().map(|r| r[k]).fold(0.0, f64::max);
    let min = |k: usize| results.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min);
    Ok(VerifySummary {
        gates: n,
        max_cyclic_deviation: max(0),
        max_phase_error: max(1),
        max_transport: max(2),
        max_gate_error: max(3),
        min_corrupted_cyclic: min(4),
        min_corrupted_transport: min(5),
    })
}

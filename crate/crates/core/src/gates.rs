//! Target gates, geometric-condition checks and fidelity metrics.

use rayon::prelude::*;

use crate::device::{
    collapse_channels, coupled_trajectory, coupling_schedule, single_qubit_trajectory,
    two_qubit_channels, CoupledParams, CphaseSpec, TransmonParams, COMPUTATIONAL_PAIR,
};
use crate::dynamics::{
    lindblad_evolve, lindblad_map, propagate_unitary, HamiltonianTrajectory, LindbladMap,
    DEFAULT_DT,
};
use crate::error::{Error, Result};
use crate::matrix::{pauli, ComplexMatrix, C64, I, ONE, ZERO};
use crate::pulses::{
    drag_augment, inject_errors, schedule_for, ErrorModel, GateParams, PulseSchedule, Scheme,
};
use crate::state::{dressed_states, DensityMatrix, QuantumState};

/// A unitary target with a human-readable label.
#[derive(Clone, Debug)]
pub struct IdealGate {
    pub matrix: ComplexMatrix,
    pub label: String,
}

/// `cos(a) I − i sin(a) n·σ`, i.e. `e^{−ia n·σ}`.
fn axis_rotation(theta: f64, phi: f64, a: f64) -> ComplexMatrix {
    let (s, c) = a.sin_cos();
    &ComplexMatrix::identity(2).scale(C64::new(c, 0.0)) + &pauli::along(theta, phi).scale(-I * s)
}

/// `e^{−i(γ/2)n·σ}` for the short path, `e^{−iγ n·σ}` for the orange slice.
pub fn ideal_single_gate(gp: &GateParams) -> IdealGate {
    let half = 0.5 * gp.rotation_angle();
    IdealGate {
        matrix: axis_rotation(gp.theta, gp.phi, half),
        label: format!(
            "{}(theta={}, phi={}, gamma={})",
            gp.scheme, gp.theta, gp.phi, gp.gamma
        ),
    }
}

/// `diag(1, 1, 1, e^{−iγ′/2})`.
pub fn ideal_cphase(gamma_p: f64) -> IdealGate {
    IdealGate {
        matrix: ComplexMatrix::diagonal(&[ONE, ONE, ONE, C64::from_polar(1.0, -0.5 * gamma_p)]),
        label: format!("cphase(gamma'={gamma_p})"),
    }
}

/// Propagator of a schedule in the ideal model: two levels, no DRAG, no noise.
pub fn ideal_propagator(sched: &PulseSchedule, dt: f64) -> Result<ComplexMatrix> {
    let traj = single_qubit_trajectory(&sched.without_drag(), &TransmonParams::default(), false);
    propagate_unitary(&traj, 0.0, traj.total_duration(), dt)
}

/// Step for the ideal-model checks. Within a segment the Hamiltonians commute
/// and the midpoint rule integrates sin² exactly, so the step barely matters.
const VERIFY_DT: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CyclicReport {
    /// `max_m ‖U|μ_m⟩⟨μ_m|U† − |μ_m⟩⟨μ_m|‖` (max-element norm).
    pub deviation: f64,
    /// `|arg⟨μ₊|U|μ₊⟩ − (−γ/2)|`, wrapped into `[0, π]`.
    pub phase_error: f64,
}

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        std::f64::consts::TAU - r
    } else {
        r
    }
}

/// `min_χ max|e^{iχ}U − V|`, approximated by aligning on `Tr(U†V)`.
///
/// Path B of the orange slice reproduces path A only up to a global sign.
pub fn global_phase_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> f64 {
    let overlap = u.dagger().matmul(v).trace();
    let chi = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    u.scale(chi).max_abs_diff(v)
}

/// Checks that the dressed states of `n(θ, φ)` return to themselves and that
/// `|μ₊⟩` picks up the phase `e^{−iγ/2}`.
pub fn verify_cyclic(sched: &PulseSchedule, gp: &GateParams) -> Result<CyclicReport> {
    let u = ideal_propagator(sched, VERIFY_DT)?;
    let (plus, minus) = dressed_states(gp.theta, gp.phi);
    let mut deviation: f64 = 0.0;
    for mu in [&plus, &minus] {
        let p = mu.projector();
        let moved = u.matmul(&p).matmul(&u.dagger());
        deviation = deviation.max(moved.max_abs_diff(&p));
    }
    let amp = u.sandwich(plus.amplitudes(), plus.amplitudes());
    let phase_error = wrap(amp.arg() + 0.5 * gp.rotation_angle());
    Ok(CyclicReport {
        deviation,
        phase_error,
    })
}

/// Largest `|⟨μ_m|U†(t)H(t)U(t)|μ_m⟩| / Ω_max` over `samples` uniformly spaced
/// times in `[0, T]`, in the ideal model.
pub fn verify_parallel_transport(
    sched: &PulseSchedule,
    gp: &GateParams,
    samples: usize,
) -> Result<f64> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "need at least two sample times".into(),
        ));
    }
    let omega_max = sched
        .segments()
        .iter()
        .map(|s| s.peak_amplitude)
        .fold(0.0, f64::max);
    if omega_max <= 0.0 {
        return Err(Error::InvalidParameter("schedule has no drive".into()));
    }
    let traj = single_qubit_trajectory(&sched.without_drag(), &TransmonParams::default(), false);
    let total = traj.total_duration();
    let (plus, minus) = dressed_states(gp.theta, gp.phi);
    let mut u = ComplexMatrix::identity(2);
    let mut prev = 0.0;
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let t = total * k as f64 / (samples - 1) as f64;
        u = propagate_unitary(&traj, prev, t, VERIFY_DT)?.matmul(&u);
        prev = t;
        let heis = u.dagger().matmul(&traj.at(t)).matmul(&u);
        for mu in [&plus, &minus] {
            let v = heis.sandwich(mu.amplitudes(), mu.amplitudes()).norm() / omega_max;
            worst = worst.max(v);
        }
    }
    Ok(worst)
}

/// `Re⟨ψ|ρ|ψ⟩` clamped to `[0, 1]`; a shorter target is zero-padded.
pub fn state_fidelity(rho: &DensityMatrix, target: &QuantumState) -> f64 {
    state_fidelity_raw(rho.matrix(), target.amplitudes())
}

fn state_fidelity_raw(rho: &ComplexMatrix, target: &[C64]) -> f64 {
    assert!(
        target.len() <= rho.dim(),
        "target larger than the density matrix"
    );
    let mut padded = target.to_vec();
    padded.resize(rho.dim(), ZERO);
    rho.sandwich(&padded, &padded).re.clamp(0.0, 1.0)
}

/// Simulation knobs shared by the fidelity routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOptions {
    pub dt: f64,
    pub drag: bool,
    /// Include the second excited level.
    pub leakage: bool,
    pub errors: ErrorModel,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            drag: true,
            leakage: true,
            errors: ErrorModel::default(),
        }
    }
}

impl SimOptions {
    /// Two-level, no DRAG.
    pub fn ideal() -> Self {
        Self {
            drag: false,
            leakage: false,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityReport {
    /// Worst state fidelity over the sampled inputs.
    pub state_fidelity: f64,
    /// Average state fidelity over the sampled inputs.
    pub gate_fidelity: f64,
    /// Average population left outside the computational subspace.
    pub leakage: f64,
    pub duration: f64,
}

/// Schedule (with DRAG when enabled) and Hamiltonian trajectory of a
/// single-qubit gate under `opts`.
pub fn single_qubit_setup(
    gp: &GateParams,
    tp: &TransmonParams,
    opts: &SimOptions,
) -> Result<(PulseSchedule, HamiltonianTrajectory)> {
    tp.validate()?;
    let mut sched = schedule_for(gp, tp.omega_max, tp.delta)?;
    if opts.drag {
        sched = drag_augment(&sched, tp.alpha)?;
    }
    let traj = single_qubit_trajectory(&sched, tp, opts.leakage);
    let traj = inject_errors(&traj, &opts.errors, tp.omega_max);
    Ok((sched, traj))
}

/// Final density matrix and state fidelity for one input state.
pub fn simulate_single_state(
    gp: &GateParams,
    tp: &TransmonParams,
    psi0: &QuantumState,
    opts: &SimOptions,
) -> Result<(DensityMatrix, f64)> {
    if psi0.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: psi0.dim(),
        });
    }
    let (_, traj) = single_qubit_setup(gp, tp, opts)?;
    let levels = traj.dim();
    let ch = collapse_channels(tp, levels)?;
    let rho0 = DensityMatrix::pure(&psi0.embed(levels));
    let rho = lindblad_evolve(&rho0, &traj, &ch, opts.dt)?;
    let target = psi0.evolve(&ideal_single_gate(gp).matrix);
    let f = state_fidelity(&rho, &target);
    Ok((rho, f))
}

/// `ϑ_k = 2πk/(n−1)`, `k = 0..n`, with trapezoid weights normalized to 1.
pub fn angle_grid(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let step = std::f64::consts::TAU / (n - 1) as f64;
    let norm = (n - 1) as f64;
    (0..n)
        .map(|k| {
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            (k as f64 * step, w / norm)
        })
        .collect()
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Per-input result used to build a [`FidelityReport`].
struct Sample {
    weight: f64,
    fidelity: f64,
    leakage: f64,
}

fn reduce(samples: &[Sample], duration: f64) -> FidelityReport {
    let gate_fidelity = compensated_sum(samples.iter().map(|s| s.weight * s.fidelity));
    let leakage = compensated_sum(samples.iter().map(|s| s.weight * s.leakage));
    let state_fidelity = samples.iter().map(|s| s.fidelity).fold(1.0, f64::min);
    FidelityReport {
        state_fidelity,
        gate_fidelity: gate_fidelity.clamp(0.0, 1.0),
        leakage: leakage.max(0.0),
        duration,
    }
}

fn evaluate(map: &LindbladMap, amps: &[C64], target: &[C64], weight: f64) -> Sample {
    let rho = map.apply_pure(amps);
    let kept = compensated_sum(map.subspace().iter().map(|&k| rho[(k, k)].re));
    let mut full = vec![ZERO; map.dim()];
    for (&k, &a) in map.subspace().iter().zip(target) {
        full[k] = a;
    }
    Sample {
        weight,
        fidelity: state_fidelity_raw(&rho, &full),
        leakage: 1.0 - kept,
    }
}

/// Average fidelity of a single-qubit gate over `n_states` inputs
/// `cos ϑ|0⟩ + sin ϑ|1⟩` with `ϑ` uniform on `[0, 2π]`.
///
/// The Lindblad map is computed once from the four operators `|i⟩⟨j|`, then
/// applied to every input.
pub fn gate_fidelity_single(
    gp: &GateParams,
    tp: &TransmonParams,
    n_states: usize,
    opts: &SimOptions,
) -> Result<FidelityReport> {
    if n_states < 2 {
        return Err(Error::InvalidParameter(
            "n_states must be at least 2".into(),
        ));
    }
    let (sched, traj) = single_qubit_setup(gp, tp, opts)?;
    let ch = collapse_channels(tp, traj.dim())?;
    let map = lindblad_map(&traj, &ch, opts.dt, &[0, 1])?;
    let u = ideal_single_gate(gp).matrix;
    let samples: Vec<Sample> = angle_grid(n_states)
        .par_iter()
        .map(|&(v, w)| {
            let psi = QuantumState::qubit(v, 0.0);
            let target = psi.evolve(&u);
            evaluate(&map, psi.amplitudes(), target.amplitudes(), w)
        })
        .collect();
    Ok(reduce(&samples, sched.total_duration()))
}

/// Side length of the square input grid used for `n_grid` two-qubit inputs.
pub fn two_qubit_grid_side(n_grid: usize) -> usize {
    (n_grid as f64).sqrt().ceil() as usize
}

/// Two-qubit trajectory for a control-phase spec.
pub fn two_qubit_setup(
    cp: &CoupledParams,
    spec: &CphaseSpec,
) -> Result<(crate::device::CouplingSchedule, HamiltonianTrajectory)> {
    let sched = coupling_schedule(spec, cp)?;
    let traj = coupled_trajectory(cp, &sched);
    Ok((sched, traj))
}

/// Average fidelity of the control-phase gate over product inputs
/// `(cos ϑ₁|0⟩ + sin ϑ₁|1⟩) ⊗ (cos ϑ₂|0⟩ + sin ϑ₂|1⟩)` on an `m × m` grid,
/// `m = ⌈√n_grid⌉`, both axes covering `[0, 2π]` with trapezoid weights.
pub fn gate_fidelity_two(
    cp: &CoupledParams,
    tp: &TransmonParams,
    spec: &CphaseSpec,
    n_grid: usize,
    dt: f64,
) -> Result<FidelityReport> {
    if n_grid < 4 {
        return Err(Error::InvalidParameter("n_grid must be at least 4".into()));
    }
    let (sched, traj) = two_qubit_setup(cp, spec)?;
    let ch = two_qubit_channels(tp)?;
    let map = lindblad_map(&traj, &ch, dt, &COMPUTATIONAL_PAIR)?;
    let u = ideal_cphase(spec.gamma_p).matrix;
    let axis = angle_grid(two_qubit_grid_side(n_grid));
    let points: Vec<(f64, f64, f64)> = axis
        .iter()
        .flat_map(|&(a, wa)| axis.iter().map(move |&(b, wb)| (a, b, wa * wb)))
        .collect();
    let samples: Vec<Sample> = points
        .par_iter()
        .map(|&(a, b, w)| {
            let psi = QuantumState::qubit(a, 0.0).tensor(&QuantumState::qubit(b, 0.0));
            let target = psi.evolve(&u);
            evaluate(&map, psi.amplitudes(), target.amplitudes(), w)
        })
        .collect();
    Ok(reduce(&samples, sched.total_duration()))
}

/// Scheme-independent view of a single-qubit gate request, for callers that
/// only know the rotation.
pub fn named_gate(name: &str, scheme: Scheme) -> Option<GateParams> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    let (theta, phi, angle) = match name {
        "Rx(pi/2)" => (FRAC_PI_2, 0.0, FRAC_PI_2),
        "Rz(pi/4)" => (0.0, 0.0, FRAC_PI_4),
        "S" => (0.0, 0.0, FRAC_PI_2),
        "H" => (FRAC_PI_4, 0.0, PI),
        _ => return None,
    };
    GateParams::for_rotation(theta, phi, angle, scheme).ok()
}

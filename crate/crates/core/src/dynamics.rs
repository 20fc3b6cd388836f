//! Time-ordered propagation of piecewise time-dependent Hamiltonians.
//!
//! A [`HamiltonianTrajectory`] is a list of pieces, each smooth on its own
//! interval. Integrators put an integer number of steps inside every piece
//! so no step straddles a discontinuity (phase jumps between pulse segments
//! are instantaneous).
//!
//! Units: seconds for time, rad/s for Hamiltonians (ħ = 1).

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{expm_hermitian, matmul_into, ComplexMatrix, C64, I, ONE, ZERO};
use crate::state::DensityMatrix;

/// Default integration step, 5 ps.
pub const DEFAULT_DT: f64 = 5e-12;

/// Trace drift that [`lindblad_evolve`] treats as an integrator failure.
pub const TRACE_DRIFT_TOL: f64 = 1e-6;

/// Relative Hermiticity tolerance applied to every sampled Hamiltonian.
const HERMITICITY_TOL: f64 = 1e-12;

type Evaluator = Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>;

/// One smooth stretch of a trajectory. The evaluator takes time measured
/// from the start of the piece.
#[derive(Clone)]
pub struct Piece {
    start: f64,
    duration: f64,
    eval: Evaluator,
}

impl Piece {
    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    #[inline]
    pub fn eval_local(&self, t: f64) -> ComplexMatrix {
        (self.eval)(t)
    }
}

/// Piecewise time-dependent Hamiltonian `H(t)` on `[0, total_duration]`.
#[derive(Clone)]
pub struct HamiltonianTrajectory {
    dim: usize,
    pieces: Vec<Piece>,
}

impl HamiltonianTrajectory {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            pieces: Vec::new(),
        }
    }

    /// Constant Hamiltonian for `duration` seconds.
    pub fn constant(h: ComplexMatrix, duration: f64) -> Self {
        let mut traj = Self::new(h.dim());
        traj.push(duration, move |_| h.clone());
        traj
    }

    /// Appends a piece. Zero-length pieces are dropped.
    pub fn push<F>(&mut self, duration: f64, eval: F)
    where
        F: Fn(f64) -> ComplexMatrix + Send + Sync + 'static,
    {
        assert!(
            duration >= 0.0 && duration.is_finite(),
            "piece duration must be finite and >= 0"
        );
        if duration == 0.0 {
            return;
        }
        let start = self.total_duration();
        self.pieces.push(Piece {
            start,
            duration,
            eval: Arc::new(eval),
        });
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn total_duration(&self) -> f64 {
        self.pieces.last().map_or(0.0, Piece::end)
    }

    /// `H(t)`; at an interior boundary the later piece wins.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        let piece = self
            .pieces
            .iter()
            .rev()
            .find(|p| t >= p.start)
            .or_else(|| self.pieces.first());
        match piece {
            Some(p) => p.eval_local((t - p.start).clamp(0.0, p.duration)),
            None => ComplexMatrix::zeros(self.dim),
        }
    }

    /// Applies `f` to every sample of every piece.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(&mut ComplexMatrix) + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let inner = p.eval.clone();
                let f = f.clone();
                let eval: Evaluator = Arc::new(move |t| {
                    let mut m = inner(t);
                    f(&mut m);
                    m
                });
                Piece {
                    start: p.start,
                    duration: p.duration,
                    eval,
                }
            })
            .collect();
        Self {
            dim: self.dim,
            pieces,
        }
    }
}

impl fmt::Debug for HamiltonianTrajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianTrajectory")
            .field("dim", &self.dim)
            .field("pieces", &self.pieces.len())
            .field("total_duration", &self.total_duration())
            .finish()
    }
}

fn check_hermitian(h: &ComplexMatrix, time: f64) -> Result<()> {
    let deviation = h.hermiticity_error();
    if deviation > HERMITICITY_TOL * h.max_abs().max(1.0) {
        return Err(Error::NonHermitian { time, deviation });
    }
    Ok(())
}

fn steps_for(span: f64, dt: f64) -> usize {
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Time-ordered product `∏ exp(−i H(t_k) h)` over `[t0, t1]` with midpoint
/// sampling inside each piece.
pub fn propagate_unitary(
    h: &HamiltonianTrajectory,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<ComplexMatrix> {
    if !(t1 >= t0) || !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "propagate_unitary needs t1 >= t0 and dt > 0 (t0 = {t0}, t1 = {t1}, dt = {dt})"
        )));
    }
    let mut u = ComplexMatrix::identity(h.dim);
    let mut scratch = ComplexMatrix::zeros(h.dim);
    for piece in &h.pieces {
        let a = t0.max(piece.start) - piece.start;
        let b = t1.min(piece.end()) - piece.start;
        if b <= a {
            continue;
        }
        let n = steps_for(b - a, dt);
        let step = (b - a) / n as f64;
        for k in 0..n {
            let tl = a + (k as f64 + 0.5) * step;
            let hm = piece.eval_local(tl);
            check_hermitian(&hm, piece.start + tl)?;
            let s = expm_hermitian(&hm, step);
            matmul_into(&s, &u, &mut scratch);
            std::mem::swap(&mut u, &mut scratch);
        }
    }
    Ok(u)
}

/// Collapse operator `O` with rate `κ`, contributing `κ·L(O)` where
/// `L(O)ρ = OρO† − O†Oρ/2 − ρO†O/2`.
#[derive(Clone, Debug)]
pub struct CollapseChannel {
    operator: ComplexMatrix,
    rate: f64,
}

impl CollapseChannel {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "collapse rate must be >= 0, got {rate}"
            )));
        }
        Ok(Self { operator, rate })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        Self::new(self.operator.clone(), rate)
    }
}

/// Time-independent dissipative part: the anti-Hermitian shift
/// `−(i/2)Σκ O†O` and the sparse jump operators `√κ·O`.
struct Dissipator {
    shift: ComplexMatrix,
    jumps: Vec<Vec<(usize, usize, C64)>>,
}

impl Dissipator {
    fn new(dim: usize, channels: &[CollapseChannel]) -> Result<Self> {
        let mut shift = ComplexMatrix::zeros(dim);
        let mut jumps = Vec::new();
        for ch in channels {
            if ch.operator.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: ch.operator.dim(),
                });
            }
            if ch.rate == 0.0 {
                continue;
            }
            let od = ch.operator.dagger().matmul(&ch.operator);
            shift += &od.scale(C64::new(0.0, -0.5 * ch.rate));
            let root = ch.rate.sqrt();
            let mut nz = Vec::new();
            for i in 0..dim {
                for j in 0..dim {
                    let v = ch.operator[(i, j)];
                    if v != ZERO {
                        nz.push((i, j, v * root));
                    }
                }
            }
            jumps.push(nz);
        }
        Ok(Self { shift, jumps })
    }
}

/// Scratch space for the right-hand side.
struct Workspace {
    heff: ComplexMatrix,
    heff_dag: ComplexMatrix,
    a: ComplexMatrix,
    b: ComplexMatrix,
    k: [ComplexMatrix; 4],
    tmp: ComplexMatrix,
}

impl Workspace {
    fn new(dim: usize) -> Self {
        let z = || ComplexMatrix::zeros(dim);
        Self {
            heff: z(),
            heff_dag: z(),
            a: z(),
            b: z(),
            k: [z(), z(), z(), z()],
            tmp: z(),
        }
    }
}

/// `out = i[ρ, H] + Σ κ L(O)ρ`, written as `−i(H_eff ρ − ρ H_eff†) + Σ JρJ†`.
#[allow(clippy::too_many_arguments)]
fn lindblad_rhs(
    h: &ComplexMatrix,
    diss: &Dissipator,
    rho: &ComplexMatrix,
    out: &mut ComplexMatrix,
    ws_heff: &mut ComplexMatrix,
    ws_heff_dag: &mut ComplexMatrix,
    ws_a: &mut ComplexMatrix,
    ws_b: &mut ComplexMatrix,
) {
    let n = h.dim();
    {
        let he = ws_heff.as_mut_slice();
        for ((e, &hv), &sv) in he.iter_mut().zip(h.as_slice()).zip(diss.shift.as_slice()) {
            *e = hv + sv;
        }
    }
    for i in 0..n {
        for j in 0..n {
            ws_heff_dag[(i, j)] = ws_heff[(j, i)].conj();
        }
    }
    matmul_into(ws_heff, rho, ws_a);
    matmul_into(rho, ws_heff_dag, ws_b);
    for ((o, &x), &y) in out
        .as_mut_slice()
        .iter_mut()
        .zip(ws_a.as_slice())
        .zip(ws_b.as_slice())
    {
        *o = -I * (x - y);
    }
    for nz in &diss.jumps {
        for &(a, b, x) in nz {
            for &(c, d, y) in nz {
                let r = rho[(b, d)];
                if r != ZERO {
                    out[(a, c)] += x * y.conj() * r;
                }
            }
        }
    }
}

/// Fixed-step RK4 over every piece; `observe` sees `(t, ρ(t))` at `t = 0` and
/// after every step.
fn integrate<F>(
    rho: &mut ComplexMatrix,
    h: &HamiltonianTrajectory,
    diss: &Dissipator,
    dt: f64,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(f64, &ComplexMatrix),
{
    let n = h.dim;
    let mut ws = Workspace::new(n);
    observe(0.0, rho);
    for piece in &h.pieces {
        let steps = steps_for(piece.duration, dt);
        let step = piece.duration / steps as f64;
        let mut h0 = piece.eval_local(0.0);
        check_hermitian(&h0, piece.start)?;
        for k in 0..steps {
            let t = k as f64 * step;
            let hm = piece.eval_local(t + 0.5 * step);
            let h1 = piece.eval_local(t + step);
            check_hermitian(&hm, piece.start + t + 0.5 * step)?;
            check_hermitian(&h1, piece.start + t + step)?;

            let Workspace {
                heff,
                heff_dag,
                a,
                b,
                k: ks,
                tmp,
            } = &mut ws;
            let [k1, k2, k3, k4] = ks;
            lindblad_rhs(&h0, diss, rho, k1, heff, heff_dag, a, b);
            axpy_into(tmp, rho, 0.5 * step, k1);
            lindblad_rhs(&hm, diss, tmp, k2, heff, heff_dag, a, b);
            axpy_into(tmp, rho, 0.5 * step, k2);
            lindblad_rhs(&hm, diss, tmp, k3, heff, heff_dag, a, b);
            axpy_into(tmp, rho, step, k3);
            lindblad_rhs(&h1, diss, tmp, k4, heff, heff_dag, a, b);
            let w = step / 6.0;
            for ((((r, &x1), &x2), &x3), &x4) in rho
                .as_mut_slice()
                .iter_mut()
                .zip(k1.as_slice())
                .zip(k2.as_slice())
                .zip(k3.as_slice())
                .zip(k4.as_slice())
            {
                *r += (x1 + (x2 + x3) * 2.0 + x4) * w;
            }
            observe(piece.start + t + step, rho);
            h0 = h1;
        }
    }
    Ok(())
}

/// `out = x + s·y`.
fn axpy_into(out: &mut ComplexMatrix, x: &ComplexMatrix, s: f64, y: &ComplexMatrix) {
    for ((o, &a), &b) in out
        .as_mut_slice()
        .iter_mut()
        .zip(x.as_slice())
        .zip(y.as_slice())
    {
        *o = a + b * s;
    }
}

fn check_trace(rho: &ComplexMatrix, expected: C64, dt: f64) -> Result<()> {
    let drift = (rho.trace() - expected).norm();
    if drift > TRACE_DRIFT_TOL {
        return Err(Error::StepTooLarge { drift, dt });
    }
    Ok(())
}

/// Integrates `ρ̇ = i[ρ, H(t)] + Σ κ L(O)ρ` over the whole trajectory with
/// fixed-step RK4.
pub fn lindblad_evolve(
    rho0: &DensityMatrix,
    h: &HamiltonianTrajectory,
    channels: &[CollapseChannel],
    dt: f64,
) -> Result<DensityMatrix> {
    lindblad_evolve_observed(rho0, h, channels, dt, |_, _| {})
}

/// Same as [`lindblad_evolve`], calling `observe(t, ρ(t))` at `t = 0` and
/// after every integration step. The observed matrix is the raw integrator
/// state.
pub fn lindblad_evolve_observed<F>(
    rho0: &DensityMatrix,
    h: &HamiltonianTrajectory,
    channels: &[CollapseChannel],
    dt: f64,
    observe: F,
) -> Result<DensityMatrix>
where
    F: FnMut(f64, &ComplexMatrix),
{
    if rho0.dim() != h.dim {
        return Err(Error::DimensionMismatch {
            expected: h.dim,
            got: rho0.dim(),
        });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    let diss = Dissipator::new(h.dim, channels)?;
    let mut rho = rho0.matrix().clone();
    integrate(&mut rho, h, &diss, dt, observe)?;
    check_trace(&rho, ONE, dt)?;
    DensityMatrix::from_matrix(rho)
}

/// The evolution map restricted to inputs supported on a subspace: the
/// images `Φ(|i⟩⟨j|)` for every pair of subspace basis states.
///
/// The master equation is linear, so any input `ρ0 = Σ c_ij |i⟩⟨j|` evolves
/// to `Σ c_ij Φ(|i⟩⟨j|)`.
#[derive(Clone, Debug)]
pub struct LindbladMap {
    dim: usize,
    subspace: Vec<usize>,
    images: Vec<ComplexMatrix>,
}

impl LindbladMap {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subspace(&self) -> &[usize] {
        &self.subspace
    }

    /// `Φ(|i⟩⟨j|)` with `i`, `j` positions within the subspace.
    pub fn image(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.images[i * self.subspace.len() + j]
    }

    /// Evolves the operator `Σ c_ij |i⟩⟨j|` given in subspace coordinates.
    pub fn apply_operator(&self, coeffs: &ComplexMatrix) -> ComplexMatrix {
        let k = self.subspace.len();
        assert_eq!(coeffs.dim(), k);
        let mut out = ComplexMatrix::zeros(self.dim);
        for i in 0..k {
            for j in 0..k {
                let c = coeffs[(i, j)];
                if c == ZERO {
                    continue;
                }
                for (o, &x) in out
                    .as_mut_slice()
                    .iter_mut()
                    .zip(self.image(i, j).as_slice())
                {
                    *o += c * x;
                }
            }
        }
        out
    }

    /// Evolves the pure input whose amplitudes on the subspace are `amps`.
    pub fn apply_pure(&self, amps: &[C64]) -> ComplexMatrix {
        let k = self.subspace.len();
        assert_eq!(amps.len(), k);
        let mut coeffs = ComplexMatrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                coeffs[(i, j)] = amps[i] * amps[j].conj();
            }
        }
        self.apply_operator(&coeffs)
    }
}

/// Builds the [`LindbladMap`] on `subspace` by evolving each `|i⟩⟨j|` with
/// `i ≤ j` (in parallel) and filling the rest from `Φ(X†) = Φ(X)†`.
pub fn lindblad_map(
    h: &HamiltonianTrajectory,
    channels: &[CollapseChannel],
    dt: f64,
    subspace: &[usize],
) -> Result<LindbladMap> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
    }
    let dim = h.dim;
    if let Some(&bad) = subspace.iter().find(|&&s| s >= dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad + 1,
        });
    }
    let diss = Dissipator::new(dim, channels)?;
    let k = subspace.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let evolved: Vec<((usize, usize), ComplexMatrix)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut m = ComplexMatrix::ket_bra(dim, subspace[i], subspace[j]);
            integrate(&mut m, h, &diss, dt, |_, _| {})?;
            check_trace(&m, if i == j { ONE } else { ZERO }, dt)?;
            Ok(((i, j), m))
        })
        .collect::<Result<_>>()?;
    let mut images = vec![ComplexMatrix::zeros(dim); k * k];
    for ((i, j), m) in evolved {
        if i != j {
            images[j * k + i] = m.dagger();
        }
        images[i * k + j] = m;
    }
    Ok(LindbladMap {
        dim,
        subspace: subspace.to_vec(),
        images,
    })
}

/// `Tr(ρ·op)`.
pub fn expectation(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<C64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: op.dim(),
        });
    }
    Ok(rho.matrix().matmul(op).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli;
    use crate::state::QuantumState;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const TWO_PI: f64 = 2.0 * PI;

    fn amplitude_damping(rate: f64) -> CollapseChannel {
        CollapseChannel::new(ComplexMatrix::ket_bra(2, 0, 1), rate).unwrap()
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let h = HamiltonianTrajectory::constant(ComplexMatrix::zeros(3), 10e-9);
        let u = propagate_unitary(&h, 0.0, 10e-9, 1e-10).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn constant_pi_pulse() {
        let omega = TWO_PI * 20e6;
        let t = PI / omega;
        let h = HamiltonianTrajectory::constant(pauli::x().scale(C64::new(omega / 2.0, 0.0)), t);
        let u = propagate_unitary(&h, 0.0, t, 1e-10).unwrap();
        let err = u.max_abs_diff(&pauli::x().scale(-I));
        assert!(err < 1e-12, "{err:e}");
    }

    #[test]
    fn rejects_non_hermitian_evaluator() {
        let bad = ComplexMatrix::ket_bra(2, 0, 1).scale(C64::new(1e8, 0.0));
        let h = HamiltonianTrajectory::constant(bad, 1e-9);
        assert!(matches!(
            propagate_unitary(&h, 0.0, 1e-9, 1e-11),
            Err(Error::NonHermitian { .. })
        ));
        let rho = DensityMatrix::pure(&QuantumState::basis(2, 0));
        assert!(matches!(
            lindblad_evolve(&rho, &h, &[], 1e-11),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn rejects_bad_interval() {
        let h = HamiltonianTrajectory::constant(ComplexMatrix::zeros(2), 1e-9);
        assert!(propagate_unitary(&h, 1e-9, 0.0, 1e-12).is_err());
        assert!(propagate_unitary(&h, 0.0, 1e-9, 0.0).is_err());
    }

    #[test]
    fn amplitude_damping_matches_exponential() {
        // ρ11(T) = exp(−κT), κ = 2π × 4 kHz, T = 63 ns
        let kappa = TWO_PI * 4e3;
        let t = 63e-9;
        let h = HamiltonianTrajectory::constant(ComplexMatrix::zeros(2), t);
        let rho0 = DensityMatrix::pure(&QuantumState::basis(2, 1));
        let rho = lindblad_evolve(&rho0, &h, &[amplitude_damping(kappa)], DEFAULT_DT).unwrap();
        let expect = (-kappa * t).exp();
        assert!((rho.population(1) - expect).abs() < 1e-12);
        assert!((expect - 0.998418).abs() < 5e-7);
        let p1 = expectation(&rho, &ComplexMatrix::ket_bra(2, 1, 1)).unwrap();
        assert!((p1.re - expect).abs() < 1e-12);
    }

    #[test]
    fn dephasing_decays_coherence_at_half_rate() {
        let kappa = TWO_PI * 4e3;
        let t = 500e-9;
        let h = HamiltonianTrajectory::constant(ComplexMatrix::zeros(2), t);
        let plus = QuantumState::qubit(PI / 4.0, 0.0);
        let deph = CollapseChannel::new(ComplexMatrix::ket_bra(2, 1, 1), kappa).unwrap();
        let rho = lindblad_evolve(&DensityMatrix::pure(&plus), &h, &[deph], DEFAULT_DT).unwrap();
        let expect = 0.5 * (-kappa * t / 2.0).exp();
        assert!((rho.matrix()[(0, 1)].re - expect).abs() < 1e-12);
    }

    #[test]
    fn expectation_values() {
        let rho = DensityMatrix::pure(&QuantumState::basis(2, 0));
        let p0 = expectation(&rho, &ComplexMatrix::ket_bra(2, 0, 0)).unwrap();
        assert!((p0 - ONE).norm() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(expectation(&mixed, &pauli::z()).unwrap().norm() < 1e-15);
        assert!(expectation(&mixed, &ComplexMatrix::zeros(3)).is_err());
    }

    #[test]
    fn trace_drift_is_reported() {
        // absurd step on a fast, strongly damped system
        let h = HamiltonianTrajectory::constant(pauli::x().scale(C64::new(1e12, 0.0)), 1e-9);
        let rho0 = DensityMatrix::pure(&QuantumState::basis(2, 1));
        let err = lindblad_evolve(&rho0, &h, &[amplitude_damping(1e12)], 1e-10).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }

    #[test]
    fn map_agrees_with_direct_evolution() {
        let omega = TWO_PI * 20e6;
        let mut h = HamiltonianTrajectory::new(3);
        h.push(25e-9, move |t| {
            let o = omega * (PI * t / 25e-9).sin().powi(2);
            let mut m = ComplexMatrix::zeros(3);
            m[(0, 1)] = C64::new(o / 2.0, 0.0);
            m[(1, 0)] = C64::new(o / 2.0, 0.0);
            m[(1, 2)] = C64::new(o * FRAC_1_SQRT_2, 0.0);
            m[(2, 1)] = C64::new(o * FRAC_1_SQRT_2, 0.0);
            m[(2, 2)] = C64::new(-TWO_PI * 220e6, 0.0);
            m
        });
        let mut lower = ComplexMatrix::zeros(3);
        lower[(0, 1)] = ONE;
        lower[(1, 2)] = C64::new(2f64.sqrt(), 0.0);
        let ch = vec![CollapseChannel::new(lower, TWO_PI * 1e5).unwrap()];
        let map = lindblad_map(&h, &ch, DEFAULT_DT, &[0, 1]).unwrap();
        let psi = QuantumState::qubit(0.3, 1.1);
        let direct =
            lindblad_evolve(&DensityMatrix::pure(&psi.embed(3)), &h, &ch, DEFAULT_DT).unwrap();
        let via_map = map.apply_pure(psi.amplitudes());
        assert!(via_map.max_abs_diff(direct.matrix()) < 1e-13);
    }
}

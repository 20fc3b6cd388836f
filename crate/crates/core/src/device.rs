//! Device Hamiltonians: the driven three-level transmon and the
//! parametrically modulated transmon pair.
//!
//! Two-qutrit states `|jk⟩` are indexed `3j + k` (qubit A first).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::bessel::bessel_j1;
use crate::dynamics::{CollapseChannel, HamiltonianTrajectory};
use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexMatrix, C64, ONE};
use crate::pulses::{PulseSchedule, Scheme};
use crate::TWO_PI;

/// Single-transmon constants, all in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmonParams {
    pub omega_max: f64,
    pub delta: f64,
    pub alpha: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

impl Default for TransmonParams {
    /// `Ω_max = Δ = 2π×20 MHz`, `α = 2π×220 MHz`, `κ₁ = κ₂ = 2π×4 kHz`.
    fn default() -> Self {
        Self {
            omega_max: TWO_PI * 20e6,
            delta: TWO_PI * 20e6,
            alpha: TWO_PI * 220e6,
            kappa1: TWO_PI * 4e3,
            kappa2: TWO_PI * 4e3,
        }
    }
}

impl TransmonParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega_max,
            self.delta,
            self.alpha,
            self.kappa1,
            self.kappa2,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "transmon parameters must be finite and >= 0: {self:?}"
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidParameter(
                "anharmonicity must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Same device with `κ₁ = κ₂ = kappa`.
    pub fn with_kappa(&self, kappa: f64) -> Self {
        Self {
            kappa1: kappa,
            kappa2: kappa,
            ..*self
        }
    }

    pub fn closed(&self) -> Self {
        self.with_kappa(0.0)
    }
}

/// Qubit drive `½[Δσ_z + (Ωe^{−iη}|0⟩⟨1| + h.c.)]`, extended with level `|2⟩`
/// at `−α − Δ/2` and the `√2`-enhanced `1↔2` coupling when `with_leakage`.
///
/// A DRAG quadrature enters both transitions; the DRAG frequency correction
/// acts on the qubit transition only.
pub fn single_qubit_trajectory(
    sched: &PulseSchedule,
    tp: &TransmonParams,
    with_leakage: bool,
) -> HamiltonianTrajectory {
    let dim = if with_leakage { 3 } else { 2 };
    let alpha = tp.alpha;
    let mut traj = HamiltonianTrajectory::new(dim);
    for seg in sched.segments().iter().copied() {
        traj.push(seg.duration, move |t| {
            let s = seg.sample(t);
            let c = s.complex_drive();
            let qubit_det = s.detuning + s.drag_detuning;
            let mut h = ComplexMatrix::zeros(dim);
            h[(0, 0)] = C64::new(0.5 * qubit_det, 0.0);
            h[(1, 1)] = C64::new(-0.5 * qubit_det, 0.0);
            h[(0, 1)] = 0.5 * c;
            h[(1, 0)] = 0.5 * c.conj();
            if with_leakage {
                h[(2, 2)] = C64::new(-alpha - 0.5 * s.detuning, 0.0);
                h[(1, 2)] = FRAC_1_SQRT_2 * c;
                h[(2, 1)] = FRAC_1_SQRT_2 * c.conj();
            }
            h
        });
    }
    traj
}

/// Relaxation `Λ₁ = |0⟩⟨1| + √2|1⟩⟨2|` and dephasing `Λ₂ = |1⟩⟨1| + 2|2⟩⟨2|`,
/// truncated to `levels` (2 or 3).
pub fn collapse_channels(tp: &TransmonParams, levels: usize) -> Result<Vec<CollapseChannel>> {
    let (l1, l2) = transmon_operators(levels)?;
    Ok(vec![
        CollapseChannel::new(l1, tp.kappa1)?,
        CollapseChannel::new(l2, tp.kappa2)?,
    ])
}

fn transmon_operators(levels: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !(2..=3).contains(&levels) {
        return Err(Error::InvalidParameter(format!(
            "transmon model needs 2 or 3 levels, got {levels}"
        )));
    }
    let mut l1 = ComplexMatrix::zeros(levels);
    let mut l2 = ComplexMatrix::zeros(levels);
    l1[(0, 1)] = ONE;
    l2[(1, 1)] = ONE;
    if levels == 3 {
        l1[(1, 2)] = C64::new(SQRT_2, 0.0);
        l2[(2, 2)] = C64::new(2.0, 0.0);
    }
    Ok((l1, l2))
}

/// The same transmon channels on both qutrits of the pair.
pub fn two_qubit_channels(tp: &TransmonParams) -> Result<Vec<CollapseChannel>> {
    let (l1, l2) = transmon_operators(3)?;
    let id = ComplexMatrix::identity(3);
    Ok(vec![
        CollapseChannel::new(kron(&l1, &id), tp.kappa1)?,
        CollapseChannel::new(kron(&id, &l1), tp.kappa1)?,
        CollapseChannel::new(kron(&l2, &id), tp.kappa2)?,
        CollapseChannel::new(kron(&id, &l2), tp.kappa2)?,
    ])
}

/// Index of `|jk⟩` in the two-qutrit space.
pub const fn pair_index(j: usize, k: usize) -> usize {
    3 * j + k
}

/// Computational states `|00⟩, |01⟩, |10⟩, |11⟩` in the two-qutrit space.
pub const COMPUTATIONAL_PAIR: [usize; 4] = [0, 1, 3, 4];

const S11: usize = pair_index(1, 1);
const S02: usize = pair_index(0, 2);
const S01: usize = pair_index(0, 1);
const S10: usize = pair_index(1, 0);
const S20: usize = pair_index(2, 0);

/// Coupled-pair constants in rad/s; the modulation frequency
/// `ν = ζ − α_B + Δ′` is derived, never set directly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupledParams {
    /// Frequency difference `ω_B − ω_A`.
    pub zeta: f64,
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub g: f64,
    /// Modulation depth `ε/ν`.
    pub beta: f64,
    /// Modulation phase `φ`.
    pub varphi: f64,
    /// Detuning `Δ′` of the modulation from the `|11⟩ ↔ |02⟩` resonance.
    pub deltap: f64,
    nu: f64,
}

impl CoupledParams {
    pub fn new(
        zeta: f64,
        alpha_a: f64,
        alpha_b: f64,
        g: f64,
        beta: f64,
        varphi: f64,
        deltap: f64,
    ) -> Result<Self> {
        let vals = [zeta, alpha_a, alpha_b, g, beta, varphi, deltap];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "coupled parameters must be finite".into(),
            ));
        }
        if g < 0.0 || beta < 0.0 {
            return Err(Error::InvalidParameter("g and beta must be >= 0".into()));
        }
        let nu = zeta - alpha_b + deltap;
        let cp = Self {
            zeta,
            alpha_a,
            alpha_b,
            g,
            beta,
            varphi,
            deltap,
            nu,
        };
        for (name, scale) in [
            ("nu", nu),
            ("zeta - nu", zeta - nu),
            ("zeta + alpha_A - nu", zeta + alpha_a - nu),
        ] {
            if g > 0.1 * scale.abs() {
                log::warn!(
                    "coupling g = {g:.4e} rad/s is not small against {name} = {scale:.4e} rad/s"
                );
            }
        }
        Ok(cp)
    }

    /// `ν = ζ − α_B + Δ′`.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Modulation frequency that puts `|11⟩ ↔ |02⟩` on resonance.
    pub fn resonant_nu(&self) -> f64 {
        self.zeta - self.alpha_b
    }

    pub fn with_zeta(&self, zeta: f64) -> Result<Self> {
        Self::new(
            zeta,
            self.alpha_a,
            self.alpha_b,
            self.g,
            self.beta,
            self.varphi,
            self.deltap,
        )
    }

    /// `g′ = 2√2 g J₁(β)` at full modulation depth.
    pub fn g_eff(&self) -> f64 {
        effective_coupling(self.g, self.beta)
    }
}

impl Default for CoupledParams {
    /// `ζ = 2π×500 MHz`, `α_A = 2π×220 MHz`, `α_B = 2π×230 MHz`,
    /// `g = 2π×10 MHz`, `β = 1.2`, `φ = 0`, `Δ′ = 2π×30 MHz`.
    fn default() -> Self {
        Self::new(
            TWO_PI * 500e6,
            TWO_PI * 220e6,
            TWO_PI * 230e6,
            TWO_PI * 10e6,
            1.2,
            0.0,
            TWO_PI * 30e6,
        )
        .expect("default parameters are valid")
    }
}

/// `2√2·g·J₁(β)`.
pub fn effective_coupling(g: f64, beta: f64) -> f64 {
    2.0 * SQRT_2 * g * bessel_j1(beta)
}

/// `½[[Δ′, g′e^{iη′}], [g′e^{−iη′}, −Δ′]]` on `{|11⟩, |02⟩}` with
/// `η′ = φ + π/2`.
pub fn effective_two_qubit_hamiltonian(cp: &CoupledParams) -> ComplexMatrix {
    effective_hamiltonian_at(cp.g_eff(), cp.deltap, cp.varphi + FRAC_PI_2)
}

fn effective_hamiltonian_at(g_eff: f64, deltap: f64, eta_p: f64) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(2);
    h[(0, 0)] = C64::new(0.5 * deltap, 0.0);
    h[(1, 1)] = C64::new(-0.5 * deltap, 0.0);
    h[(0, 1)] = C64::from_polar(0.5 * g_eff, eta_p);
    h[(1, 0)] = C64::from_polar(0.5 * g_eff, -eta_p);
    h
}

/// Time profile of the modulation depth within a coupling segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ModulationEnvelope {
    /// `β(t) = β` while the segment runs.
    #[default]
    Constant,
    /// `β(t) = β sin²(πt/τ)`.
    Sin2,
}

impl ModulationEnvelope {
    fn shape(self, t: f64, tau: f64) -> f64 {
        match self {
            ModulationEnvelope::Constant => 1.0,
            ModulationEnvelope::Sin2 => (PI * t / tau).sin().powi(2),
        }
    }

    /// Segment-averaged `J₁(β(t))`.
    pub fn mean_j1(self, beta: f64) -> f64 {
        match self {
            ModulationEnvelope::Constant => bessel_j1(beta),
            ModulationEnvelope::Sin2 => {
                // Simpson on an integrand smooth and periodic in u
                let n = 2000;
                let f = |k: usize| bessel_j1(beta * (PI * k as f64 / n as f64).sin().powi(2));
                let mut s = f(0) + f(n);
                for k in 1..n {
                    s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k);
                }
                s / (3.0 * n as f64)
            }
        }
    }
}

impl fmt::Display for ModulationEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModulationEnvelope::Constant => "constant",
            ModulationEnvelope::Sin2 => "sin2",
        })
    }
}

impl FromStr for ModulationEnvelope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(ModulationEnvelope::Constant),
            "sin2" => Ok(ModulationEnvelope::Sin2),
            other => Err(Error::InvalidParameter(format!(
                "unknown modulation envelope {other:?}"
            ))),
        }
    }
}

/// One stretch of the two-qubit schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingSegment {
    /// `None` means the modulation amplitude is gated off.
    pub modulation: Option<ModulationEnvelope>,
    pub duration: f64,
    /// `Δ′` during the segment.
    pub deltap: f64,
    /// Drive phase `η` in the single-qubit sense; the modulation phase in the
    /// segment is `−η − π/2`.
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct CouplingSchedule {
    pub segments: Vec<CouplingSegment>,
}

impl CouplingSchedule {
    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.duration).collect()
    }
}

/// Target control phase and how to realize it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CphaseSpec {
    pub gamma_p: f64,
    pub scheme: Scheme,
    pub envelope: ModulationEnvelope,
}

impl Default for CphaseSpec {
    fn default() -> Self {
        Self {
            gamma_p: FRAC_PI_2,
            scheme: Scheme::Sngqc,
            envelope: ModulationEnvelope::Constant,
        }
    }
}

/// Schedule realizing `diag(1, 1, 1, e^{−iγ′/2})` as a z-rotation in the
/// `{|11⟩, |02⟩}` subspace.
///
/// Short path: coupling areas `π/2`, then `Δ′` for `γ′/Δ′` with the
/// modulation off, then `π/2` again. Orange slice: areas `(0, π, π)` with
/// `γ = γ′/2`, run at `Δ′ = 0` throughout.
pub fn coupling_schedule(spec: &CphaseSpec, cp: &CoupledParams) -> Result<CouplingSchedule> {
    let g_mean = 2.0 * SQRT_2 * cp.g * spec.envelope.mean_j1(cp.beta);
    if !(g_mean > 0.0) {
        return Err(Error::InvalidParameter(
            "effective coupling must be positive".into(),
        ));
    }
    let tau = |area: f64| area / g_mean;
    let on = Some(spec.envelope);
    let phi = cp.varphi;
    let segments = match spec.scheme {
        Scheme::Sngqc => {
            if !(cp.deltap > 0.0) {
                return Err(Error::InvalidParameter(
                    "short-path cphase needs deltap > 0".into(),
                ));
            }
            let gp = spec.gamma_p;
            let deltap = if gp < 0.0 { -cp.deltap } else { cp.deltap };
            let outer = phi + FRAC_PI_2;
            let inner = phi + gp - FRAC_PI_2;
            vec![
                CouplingSegment {
                    modulation: on,
                    duration: tau(FRAC_PI_2),
                    deltap: 0.0,
                    eta: outer,
                },
                CouplingSegment {
                    modulation: None,
                    duration: gp.abs() / cp.deltap,
                    deltap,
                    eta: inner,
                },
                CouplingSegment {
                    modulation: on,
                    duration: tau(FRAC_PI_2),
                    deltap: 0.0,
                    eta: inner,
                },
                CouplingSegment {
                    modulation: on,
                    duration: 0.0,
                    deltap: 0.0,
                    eta: outer,
                },
            ]
        }
        Scheme::NgqcA | Scheme::NgqcB => {
            let gamma = spec.gamma_p / 2.0;
            let middle = if spec.scheme == Scheme::NgqcA {
                phi - gamma + FRAC_PI_2
            } else {
                phi - gamma - FRAC_PI_2
            };
            let outer = phi - FRAC_PI_2;
            vec![
                CouplingSegment {
                    modulation: on,
                    duration: 0.0,
                    deltap: 0.0,
                    eta: outer,
                },
                CouplingSegment {
                    modulation: on,
                    duration: tau(PI),
                    deltap: 0.0,
                    eta: middle,
                },
                CouplingSegment {
                    modulation: on,
                    duration: tau(PI),
                    deltap: 0.0,
                    eta: outer,
                },
            ]
        }
    };
    Ok(CouplingSchedule { segments })
}

/// Interaction-picture pair Hamiltonian
///
/// `H_C = g[|01⟩⟨10|e^{iζt} + √2|11⟩⟨20|e^{i(ζ+α_A)t} + √2|02⟩⟨11|e^{i(ζ−α_B)t}]
///        · e^{−iβ(t)cos Θ(t)} + h.c.`
///
/// with `Θ = (ζ − α_B)t + ∫Δ′dt + φ_k`, so the modulation frequency is
/// `ν = ζ − α_B + Δ′` and stays phase continuous across segments. The result
/// is expressed in the frame co-rotating with `∫Δ′dt` on `{|11⟩, |02⟩}`,
/// where `Δ′` appears as the static splitting `±Δ′/2`.
pub fn coupled_trajectory(cp: &CoupledParams, sched: &CouplingSchedule) -> HamiltonianTrajectory {
    let mut traj = HamiltonianTrajectory::new(9);
    let (zeta, alpha_a, alpha_b, g, beta) = (cp.zeta, cp.alpha_a, cp.alpha_b, cp.g, cp.beta);
    let nu_res = cp.resonant_nu();
    let mut start = 0.0;
    let mut phase_acc = 0.0;
    for seg in sched.segments.iter().copied() {
        let (t0, big_phi0) = (start, phase_acc);
        let phi_k = -seg.eta - FRAC_PI_2;
        traj.push(seg.duration, move |tl| {
            let t = t0 + tl;
            let big_phi = big_phi0 + seg.deltap * tl;
            let b = seg
                .modulation
                .map_or(0.0, |m| beta * m.shape(tl, seg.duration));
            let theta = nu_res * t + big_phi + phi_k;
            let f = C64::from_polar(1.0, -b * theta.cos());
            let mut h = ComplexMatrix::zeros(9);
            // frame factors X_a conj(X_b)
            let x11 = C64::from_polar(1.0, -0.5 * big_phi);
            let x02 = x11.conj();
            let e01 = g * C64::from_polar(1.0, zeta * t) * f;
            let e11 = SQRT_2 * g * C64::from_polar(1.0, (zeta + alpha_a) * t) * f * x11;
            let e02 =
                SQRT_2 * g * C64::from_polar(1.0, (zeta - alpha_b) * t) * f * x02 * x11.conj();
            for (a, bb, v) in [(S01, S10, e01), (S11, S20, e11), (S02, S11, e02)] {
                h[(a, bb)] = v;
                h[(bb, a)] = v.conj();
            }
            h[(S11, S11)] = C64::new(0.5 * seg.deltap, 0.0);
            h[(S02, S02)] = C64::new(-0.5 * seg.deltap, 0.0);
            h
        });
        start += seg.duration;
        phase_acc += seg.deltap * seg.duration;
    }
    traj
}

/// Effective `{|11⟩, |02⟩}` model of a coupling schedule: each segment is a
/// constant `H₂` at the segment's mean `g′`, with a modulation phase mapped
/// to `η′ = −η`.
pub fn effective_trajectory(cp: &CoupledParams, sched: &CouplingSchedule) -> HamiltonianTrajectory {
    let mut traj = HamiltonianTrajectory::new(2);
    for seg in sched.segments.iter().copied() {
        let g_eff = seg
            .modulation
            .map_or(0.0, |m| 2.0 * SQRT_2 * cp.g * m.mean_j1(cp.beta));
        let h = effective_hamiltonian_at(g_eff, seg.deltap, -seg.eta);
        traj.push(seg.duration, move |_| h.clone());
    }
    traj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{lindblad_evolve, propagate_unitary};
    use crate::matrix::{expm_hermitian, pauli, ZERO};
    use crate::pulses::{sngqc_schedule, GateParams, PulseSegment};
    use crate::state::{DensityMatrix, QuantumState};

    #[test]
    fn paper_effective_coupling() {
        let cp = CoupledParams::default();
        let mhz = cp.g_eff() / TWO_PI / 1e6;
        assert!((mhz - 14.1).abs() < 0.02 * 14.1, "{mhz}");
        assert_eq!(effective_coupling(TWO_PI * 10e6, 0.0), 0.0);
        assert!((cp.nu() - TWO_PI * 300e6).abs() < 1.0);
        assert!((cp.resonant_nu() - TWO_PI * 270e6).abs() < 1.0);
    }

    #[test]
    fn zero_schedule_gives_zero_hamiltonian() {
        let seg = PulseSegment::free(0.0, 10e-9, 0.7);
        let sched = PulseSchedule::new(vec![seg]);
        let tp = TransmonParams::default();
        let qubit = single_qubit_trajectory(&sched, &tp, false);
        for k in 0..=10 {
            assert_eq!(qubit.at(k as f64 * 1e-9).max_abs(), 0.0);
        }
        // with |2⟩ present only the bare level energy −α remains
        let mut h = single_qubit_trajectory(&sched, &tp, true).at(5e-9);
        assert!((h[(2, 2)].re + tp.alpha).abs() < 1e-6);
        h[(2, 2)] = ZERO;
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn detuning_segment_hamiltonian() {
        let tp = TransmonParams::default();
        let gp = GateParams::new(FRAC_PI_2, 0.0, FRAC_PI_2, crate::pulses::Scheme::Sngqc).unwrap();
        let sched = sngqc_schedule(&gp, tp.omega_max, tp.delta).unwrap();
        let traj = single_qubit_trajectory(&sched, &tp, true);
        // segment 1 has zero length; segment 2 starts at t = 0
        let h = traj.at(5e-9);
        let mut want = ComplexMatrix::zeros(3);
        want[(0, 0)] = C64::new(tp.delta / 2.0, 0.0);
        want[(1, 1)] = C64::new(-tp.delta / 2.0, 0.0);
        want[(2, 2)] = C64::new(-tp.alpha - tp.delta / 2.0, 0.0);
        assert!(h.max_abs_diff(&want) < 1e-6);
    }

    #[test]
    fn channel_operators() {
        let ch = collapse_channels(&TransmonParams::default(), 3).unwrap();
        let two = QuantumState::basis(3, 2);
        let out = ch[0].operator().apply(two.amplitudes());
        assert!((out[1] - C64::new(SQRT_2, 0.0)).norm() < 1e-15);
        let diag: Vec<f64> = (0..3).map(|k| ch[1].operator()[(k, k)].re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 2.0]);
        assert_eq!(
            collapse_channels(&TransmonParams::default(), 2).unwrap()[0]
                .operator()
                .dim(),
            2
        );
        assert!(collapse_channels(&TransmonParams::default(), 4).is_err());
        assert_eq!(
            two_qubit_channels(&TransmonParams::default())
                .unwrap()
                .len(),
            4
        );
    }

    #[test]
    fn decay_over_one_lifetime() {
        let tp = TransmonParams::default();
        let t = 1.0 / tp.kappa1;
        let h = HamiltonianTrajectory::constant(ComplexMatrix::zeros(3), t);
        let ch = &collapse_channels(&tp, 3).unwrap()[..1];
        let rho = lindblad_evolve(
            &DensityMatrix::pure(&QuantumState::basis(3, 1)),
            &h,
            ch,
            t / 2000.0,
        )
        .unwrap();
        assert!((rho.population(1) - (-1f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn effective_hamiltonian_forms() {
        let cp = CoupledParams::new(
            TWO_PI * 500e6,
            TWO_PI * 220e6,
            TWO_PI * 230e6,
            TWO_PI * 10e6,
            1.2,
            -FRAC_PI_2,
            0.0,
        )
        .unwrap();
        let h = effective_two_qubit_hamiltonian(&cp);
        assert!(h.max_abs_diff(&pauli::x().scale(C64::new(cp.g_eff() / 2.0, 0.0))) < 1e-6);
        let h = effective_two_qubit_hamiltonian(&CoupledParams::default());
        let (ev, _) = h.hermitian_eigen();
        let cp = CoupledParams::default();
        let gap = (cp.deltap.powi(2) + cp.g_eff().powi(2)).sqrt();
        assert!(((ev[1] - ev[0]) - gap).abs() < 1e-6 * gap);
    }

    #[test]
    fn zero_coupling_gives_zero_hamiltonian() {
        let cp = CoupledParams::new(
            TWO_PI * 500e6,
            TWO_PI * 220e6,
            TWO_PI * 230e6,
            0.0,
            1.2,
            0.0,
            0.0,
        )
        .unwrap();
        let sched = CouplingSchedule {
            segments: vec![CouplingSegment {
                modulation: Some(ModulationEnvelope::Constant),
                duration: 20e-9,
                deltap: 0.0,
                eta: 0.0,
            }],
        };
        let traj = coupled_trajectory(&cp, &sched);
        for k in 0..20 {
            assert_eq!(traj.at(k as f64 * 1e-9 + 0.3e-9).max_abs(), 0.0);
        }
    }

    #[test]
    fn unmodulated_coupling_averages_out() {
        let cp = CoupledParams::default();
        let t = 100e-9;
        let sched = CouplingSchedule {
            segments: vec![CouplingSegment {
                modulation: None,
                duration: t,
                deltap: 0.0,
                eta: 0.0,
            }],
        };
        let traj = coupled_trajectory(&cp, &sched);
        let n = 200_000;
        let mut acc = ComplexMatrix::zeros(9);
        for k in 0..n {
            acc += &traj.at((k as f64 + 0.5) * t / n as f64);
        }
        let avg = acc.scale(C64::new(1.0 / n as f64, 0.0));
        assert!(avg.max_abs() < 0.01 * cp.g, "{}", avg.max_abs() / cp.g);
    }

    #[test]
    fn vacuum_is_never_coupled() {
        let cp = CoupledParams::default();
        let sched = coupling_schedule(&CphaseSpec::default(), &cp).unwrap();
        let traj = coupled_trajectory(&cp, &sched);
        let u = propagate_unitary(&traj, 0.0, traj.total_duration(), 5e-12).unwrap();
        assert!((u[(0, 0)] - ONE).norm() < 1e-10);
        for k in 1..9 {
            assert_eq!(traj.at(7e-9)[(0, k)], ZERO);
        }
    }

    #[test]
    fn schedule_durations() {
        let cp = CoupledParams::default();
        let s = coupling_schedule(&CphaseSpec::default(), &cp).unwrap();
        let d: Vec<f64> = s.durations().iter().map(|t| t * 1e9).collect();
        assert!(
            (d[0] - 17.738).abs() < 1e-2 && (d[2] - d[0]).abs() < 1e-12,
            "{d:?}"
        );
        assert!((d[1] - 25.0 / 3.0).abs() < 1e-9);
        assert_eq!(d[3], 0.0);
        assert!((s.total_duration() * 1e9 - 43.81).abs() < 0.01);

        let sin2 = CphaseSpec {
            envelope: ModulationEnvelope::Sin2,
            ..CphaseSpec::default()
        };
        let s2 = coupling_schedule(&sin2, &cp).unwrap();
        assert!(s2.total_duration() > 70e-9 && s2.total_duration() < 80e-9);
    }

    #[test]
    fn full_model_tracks_effective_rabi_oscillation() {
        // one |11⟩ ↔ |02⟩ Rabi period at Δ′ = 0: full transfer at T/2, return at T
        let cp = CoupledParams::default();
        let period = TWO_PI / cp.g_eff();
        let sched = CouplingSchedule {
            segments: vec![CouplingSegment {
                modulation: Some(ModulationEnvelope::Constant),
                duration: period,
                deltap: 0.0,
                eta: 0.3,
            }],
        };
        let full = coupled_trajectory(&cp, &sched);
        let eff = effective_trajectory(&cp, &sched);
        let psi = QuantumState::basis(9, S11);
        let half = propagate_unitary(&full, 0.0, period / 2.0, 5e-12).unwrap();
        let whole = propagate_unitary(&full, period / 2.0, period, 5e-12)
            .unwrap()
            .matmul(&half);
        let p02_half = psi.evolve(&half).amplitudes()[S02].norm_sqr();
        let p11_end = psi.evolve(&whole).amplitudes()[S11].norm_sqr();
        let ue = |t: f64| expm_hermitian(&eff.at(0.0), t);
        let e02_half = ue(period / 2.0)[(1, 0)].norm_sqr();
        let e11_end = ue(period)[(0, 0)].norm_sqr();
        assert!((e02_half - 1.0).abs() < 1e-12 && (e11_end - 1.0).abs() < 1e-12);
        assert!((p02_half - e02_half).abs() < 0.02, "{p02_half}");
        assert!((p11_end - e11_end).abs() < 0.02, "{p11_end}");
    }
}

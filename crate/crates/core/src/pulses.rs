//! Drive schedules: the four-segment short-path scheme, the three-segment
//! orange-slice comparator (paths A and B), DRAG augmentation and control
//! error injection.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::dynamics::HamiltonianTrajectory;
use crate::error::{Error, Result};
use crate::matrix::C64;

/// Which geometric construction realizes the gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Short path, `U = e^{−i(γ/2) n·σ}`.
    Sngqc,
    /// Orange slice, path A, `U = e^{−iγ n·σ}`.
    NgqcA,
    /// Orange slice, path B; same unitary as path A.
    NgqcB,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Sngqc, Scheme::NgqcA, Scheme::NgqcB];

    pub fn is_orange_slice(self) -> bool {
        !matches!(self, Scheme::Sngqc)
    }

    /// Rotation angle produced by a gate parameter `γ`.
    pub fn rotation_for_gamma(self, gamma: f64) -> f64 {
        if self.is_orange_slice() {
            2.0 * gamma
        } else {
            gamma
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Sngqc => "SNGQC",
            Scheme::NgqcA => "NGQC_A",
            Scheme::NgqcB => "NGQC_B",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SNGQC" => Ok(Scheme::Sngqc),
            "NGQC_A" => Ok(Scheme::NgqcA),
            "NGQC_B" => Ok(Scheme::NgqcB),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme {other:?} (expected SNGQC, NGQC_A or NGQC_B)"
            ))),
        }
    }
}

/// Rotation axis `n(θ, φ)`, gate parameter `γ` and the scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateParams {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
    pub scheme: Scheme,
}

impl GateParams {
    pub fn new(theta: f64, phi: f64, gamma: f64, scheme: Scheme) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && gamma.is_finite()) {
            return Err(Error::InvalidParameter("gate angles must be finite".into()));
        }
        if !(0.0..=PI + 1e-12).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        Ok(Self {
            theta,
            phi,
            gamma,
            scheme,
        })
    }

    /// Parameters producing a rotation by `angle` about `n(θ, φ)`. Orange-slice
    /// schemes take `γ = angle/2`.
    pub fn for_rotation(theta: f64, phi: f64, angle: f64, scheme: Scheme) -> Result<Self> {
        let gamma = if scheme.is_orange_slice() {
            angle / 2.0
        } else {
            angle
        };
        Self::new(theta, phi, gamma, scheme)
    }

    pub fn rotation_angle(&self) -> f64 {
        self.scheme.rotation_for_gamma(self.gamma)
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        Self::for_rotation(self.theta, self.phi, self.rotation_angle(), scheme)
            .expect("angles already validated")
    }
}

/// Shape of the in-phase drive amplitude within a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Envelope {
    /// `Ω_max sin²(πt/τ)`.
    Sin2,
    Constant,
}

impl fmt::Display for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Envelope::Sin2 => "sin2",
            Envelope::Constant => "constant",
        })
    }
}

impl FromStr for Envelope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin2" => Ok(Envelope::Sin2),
            "constant" => Ok(Envelope::Constant),
            other => Err(Error::InvalidParameter(format!(
                "unknown envelope {other:?}"
            ))),
        }
    }
}

/// Drive quantities at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriveSample {
    /// In-phase amplitude `Ω(t)`.
    pub omega: f64,
    /// Quadrature amplitude `Ω_y(t)`.
    pub quadrature: f64,
    /// Segment detuning `Δ`.
    pub detuning: f64,
    /// DRAG frequency correction on the qubit transition.
    pub drag_detuning: f64,
    /// Drive phase `η`.
    pub phase: f64,
}

impl DriveSample {
    /// Complex drive `(Ω + iΩ_y) e^{−iη}`.
    pub fn complex_drive(&self) -> C64 {
        C64::new(self.omega, self.quadrature) * C64::from_polar(1.0, -self.phase)
    }
}

/// One segment of a drive schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSegment {
    pub envelope: Envelope,
    pub peak_amplitude: f64,
    pub detuning: f64,
    pub phase: f64,
    pub duration: f64,
    /// Anharmonicity used for DRAG, if the segment is DRAG-corrected.
    pub drag_alpha: Option<f64>,
}

impl PulseSegment {
    /// Resonant sin² pulse of the given area at peak `omega_max`. A negative
    /// area is realized with positive amplitude and the phase advanced by π.
    pub fn rabi(area: f64, phase: f64, omega_max: f64) -> Self {
        let (area, phase) = if area < 0.0 {
            (-area, phase + PI)
        } else {
            (area, phase)
        };
        Self {
            envelope: Envelope::Sin2,
            peak_amplitude: omega_max,
            detuning: 0.0,
            phase,
            duration: 2.0 * area / omega_max,
            drag_alpha: None,
        }
    }

    /// Drive off, constant detuning: accumulates `∫Δ dt = detuning·duration`.
    pub fn free(detuning: f64, duration: f64, phase: f64) -> Self {
        Self {
            envelope: Envelope::Constant,
            peak_amplitude: 0.0,
            detuning,
            phase,
            duration,
            drag_alpha: None,
        }
    }

    /// `∫Ω dt` over the segment.
    pub fn area(&self) -> f64 {
        match self.envelope {
            Envelope::Sin2 => 0.5 * self.peak_amplitude * self.duration,
            Envelope::Constant => self.peak_amplitude * self.duration,
        }
    }

    /// `Ω(t)` and `Ω̇(t)` at segment-local time `t`.
    pub fn amplitude(&self, t: f64) -> (f64, f64) {
        match self.envelope {
            Envelope::Constant => (self.peak_amplitude, 0.0),
            Envelope::Sin2 => {
                if self.duration == 0.0 {
                    return (0.0, 0.0);
                }
                let w = PI / self.duration;
                let s = (w * t).sin();
                let ds = self.peak_amplitude * w * (2.0 * w * t).sin();
                (self.peak_amplitude * s * s, ds)
            }
        }
    }

    /// Drive at segment-local time `t`.
    ///
    /// DRAG adds the quadrature `−Ω̇/α` and the qubit frequency correction
    /// `−Ω²/(2α)` that cancels the Stark shift from the second excited level.
    pub fn sample(&self, t: f64) -> DriveSample {
        let (omega, domega) = self.amplitude(t);
        let (quadrature, drag_detuning) = match self.drag_alpha {
            Some(alpha) => (-domega / alpha, -omega * omega / (2.0 * alpha)),
            None => (0.0, 0.0),
        };
        DriveSample {
            omega,
            quadrature,
            detuning: self.detuning,
            drag_detuning,
            phase: self.phase,
        }
    }
}

/// Ordered list of segments played back to back.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PulseSchedule {
    segments: Vec<PulseSegment>,
}

const TABLE_HEADER: &str =
    "# envelope peak_rad_per_s detuning_rad_per_s phase_rad duration_s drag_alpha_rad_per_s";

impl PulseSchedule {
    pub fn new(segments: Vec<PulseSegment>) -> Self {
        Self { segments }
    }

    pub fn segments(&self) -> &[PulseSegment] {
        &self.segments
    }

    pub fn segments_mut(&mut self) -> &mut [PulseSegment] {
        &mut self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment durations, in order.
    pub fn durations(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.duration).collect()
    }

    /// Start time of every segment.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = t;
                t += s.duration;
                start
            })
            .collect()
    }

    /// Copy with DRAG stripped from every segment.
    pub fn without_drag(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.drag_alpha = None;
        }
        out
    }

    /// Plain-text table, one whitespace-separated row per segment.
    pub fn to_table(&self) -> String {
        let mut out = String::from(TABLE_HEADER);
        out.push('\n');
        for s in &self.segments {
            let drag = s
                .drag_alpha
                .map_or_else(|| "-".to_string(), |a| format!("{a:e}"));
            let _ = writeln!(
                out,
                "{} {:e} {:e} {:e} {:e} {}",
                s.envelope, s.peak_amplitude, s.detuning, s.phase, s.duration, drag
            );
        }
        out
    }

    /// Inverse of [`to_table`](Self::to_table). Blank lines and `#` comments
    /// are skipped.
    pub fn from_table(text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 6 {
                return Err(Error::Table(format!(
                    "line {}: expected 6 columns, got {}",
                    n + 1,
                    cols.len()
                )));
            }
            let num = |k: usize| -> Result<f64> {
                cols[k]
                    .parse::<f64>()
                    .map_err(|e| Error::Table(format!("line {}: column {}: {e}", n + 1, k + 1)))
            };
            let envelope = cols[0]
                .parse()
                .map_err(|e: Error| Error::Table(format!("line {}: {e}", n + 1)))?;
            let drag_alpha = if cols[5] == "-" { None } else { Some(num(5)?) };
            segments.push(PulseSegment {
                envelope,
                peak_amplitude: num(1)?,
                detuning: num(2)?,
                phase: num(3)?,
                duration: num(4)?,
                drag_alpha,
            });
        }
        Ok(Self { segments })
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

/// Four-segment short-path schedule:
///
/// 1. area `π/2 − θ`, `η = φ + π/2`
/// 2. drive off, detuning `Δ` for `γ/Δ`, `η = φ + γ − π/2`
/// 3. area `π/2`, `η = φ + γ − π/2`
/// 4. area `θ`, `η = φ + π/2`
///
/// Negative `γ` flips the detuning sign. All four segments are kept, possibly
/// with zero duration, so segment indices are stable.
pub fn sngqc_schedule(gp: &GateParams, omega_max: f64, delta: f64) -> Result<PulseSchedule> {
    if gp.scheme != Scheme::Sngqc {
        return Err(Error::InvalidParameter(format!(
            "sngqc_schedule called with scheme {}",
            gp.scheme
        )));
    }
    check_positive("omega_max", omega_max)?;
    check_positive("delta", delta)?;
    let GateParams {
        theta, phi, gamma, ..
    } = *gp;
    let outer = phi + FRAC_PI_2;
    let inner = phi + gamma - FRAC_PI_2;
    let detuning = if gamma < 0.0 { -delta } else { delta };
    Ok(PulseSchedule::new(vec![
        PulseSegment::rabi(FRAC_PI_2 - theta, outer, omega_max),
        PulseSegment::free(detuning, gamma.abs() / delta, inner),
        PulseSegment::rabi(FRAC_PI_2, inner, omega_max),
        PulseSegment::rabi(theta, outer, omega_max),
    ]))
}

/// Three-segment orange-slice schedule with areas `(θ, π, π − θ)`. The outer
/// segments use `η = φ − π/2`; the middle one `φ − γ + π/2` (path A) or
/// `φ − γ − π/2` (path B).
pub fn ngqc_schedule(gp: &GateParams, omega_max: f64) -> Result<PulseSchedule> {
    let middle = match gp.scheme {
        Scheme::NgqcA => gp.phi - gp.gamma + FRAC_PI_2,
        Scheme::NgqcB => gp.phi - gp.gamma - FRAC_PI_2,
        Scheme::Sngqc => {
            return Err(Error::InvalidParameter(
                "ngqc_schedule called with scheme SNGQC".into(),
            ))
        }
    };
    check_positive("omega_max", omega_max)?;
    let outer = gp.phi - FRAC_PI_2;
    Ok(PulseSchedule::new(vec![
        PulseSegment::rabi(gp.theta, outer, omega_max),
        PulseSegment::rabi(PI, middle, omega_max),
        PulseSegment::rabi(PI - gp.theta, outer, omega_max),
    ]))
}

/// Dispatches on `gp.scheme`. `delta` is ignored by the orange-slice schemes.
pub fn schedule_for(gp: &GateParams, omega_max: f64, delta: f64) -> Result<PulseSchedule> {
    match gp.scheme {
        Scheme::Sngqc => sngqc_schedule(gp, omega_max, delta),
        Scheme::NgqcA | Scheme::NgqcB => ngqc_schedule(gp, omega_max),
    }
}

/// First-order DRAG on every sin² segment with a non-zero drive.
pub fn drag_augment(sched: &PulseSchedule, alpha: f64) -> Result<PulseSchedule> {
    check_positive("alpha", alpha)?;
    let mut out = sched.clone();
    for s in &mut out.segments {
        if s.envelope == Envelope::Sin2 && s.peak_amplitude > 0.0 {
            s.drag_alpha = Some(alpha);
        }
    }
    Ok(out)
}

/// Rabi-amplitude error `ε` and frequency error `δ` (fraction of `Ω_max`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorModel {
    pub rabi_epsilon: f64,
    pub detuning_delta: f64,
    /// Also shift `|2⟩` by `2δΩ_max` in the three-level model.
    pub shift_second_level: bool,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self {
            rabi_epsilon: 0.0,
            detuning_delta: 0.0,
            shift_second_level: true,
        }
    }
}

impl ErrorModel {
    pub fn rabi(epsilon: f64) -> Self {
        Self {
            rabi_epsilon: epsilon,
            ..Self::default()
        }
    }

    pub fn detuning(delta: f64) -> Self {
        Self {
            detuning_delta: delta,
            ..Self::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rabi_epsilon == 0.0 && self.detuning_delta == 0.0
    }
}

/// Scales every off-diagonal (drive) element by `1 + ε` and adds
/// `δΩ_max|1⟩⟨1|` (plus `2δΩ_max|2⟩⟨2|` when enabled and the model has a
/// second excited level).
pub fn inject_errors(
    h: &HamiltonianTrajectory,
    em: &ErrorModel,
    omega_max: f64,
) -> HamiltonianTrajectory {
    let em = *em;
    if em.is_zero() {
        return h.clone();
    }
    let scale = 1.0 + em.rabi_epsilon;
    let shift = em.detuning_delta * omega_max;
    h.map(move |m| {
        let n = m.dim();
        if em.rabi_epsilon != 0.0 {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        m[(i, j)] *= scale;
                    }
                }
            }
        }
        if n >= 2 {
            m[(1, 1)] += shift;
        }
        if n >= 3 && em.shift_second_level {
            m[(2, 2)] += 2.0 * shift;
        }
    })
}

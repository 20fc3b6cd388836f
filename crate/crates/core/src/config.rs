//! Flat `key = value` experiment configuration.
//!
//! Frequencies are written in MHz or kHz of ordinary frequency and converted
//! to angular units (`omega_max_mhz = 20` means `Ω_max = 2π × 20 MHz`).
//! Angles ending in `_pi` are multiples of π. `#` starts a comment; keys are
//! case-sensitive and unknown keys are rejected.
//!
//! `gamma_pi` is the rotation angle of the target gate over π, which is the
//! short-path phase `γ`; orange-slice schemes halve it internally.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::device::{CoupledParams, CphaseSpec, ModulationEnvelope, TransmonParams};
use crate::dynamics::DEFAULT_DT;
use crate::error::{Error, Result};
use crate::pulses::{ErrorModel, GateParams, Scheme};
use crate::TWO_PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeviceKind {
    Transmon,
    Coupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    Kappa,
    RabiEps,
    DetuningDelta,
}

impl SweepKind {
    pub fn key(self) -> &'static str {
        match self {
            SweepKind::Kappa => "kappa",
            SweepKind::RabiEps => "rabi_eps",
            SweepKind::DetuningDelta => "detuning_delta",
        }
    }

    /// Column header for the swept value.
    pub fn column(self) -> &'static str {
        match self {
            SweepKind::Kappa => "kappa_rad_per_s",
            SweepKind::RabiEps => "rabi_eps",
            SweepKind::DetuningDelta => "detuning_delta",
        }
    }

    pub fn from_column(s: &str) -> Option<Self> {
        [
            SweepKind::Kappa,
            SweepKind::RabiEps,
            SweepKind::DetuningDelta,
        ]
        .into_iter()
        .find(|k| k.column() == s)
    }
}

/// Swept parameter and its grid. Kappa bounds are stored in rad/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub kind: SweepKind,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Sweep {
    /// `n` evenly spaced values from `lo` to `hi` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|k| {
                if k == self.n - 1 {
                    self.hi
                } else {
                    self.lo + step * k as f64
                }
            })
            .collect()
    }
}

pub const DEFAULT_SWEEP_POINTS: usize = 41;

/// The NGQC two-qubit comparator runs at a re-optimized frequency difference.
pub const DEFAULT_NGQC_ZETA: f64 = TWO_PI * 490e6;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub device: DeviceKind,
    pub transmon: TransmonParams,
    pub gate: GateParams,
    pub coupled: Option<CoupledParams>,
    pub cphase: CphaseSpec,
    pub ngqc_zeta: f64,
    pub sweep: Option<Sweep>,
    /// Schemes compared by sweeps.
    pub schemes: Vec<Scheme>,
    pub output: Option<PathBuf>,
    pub dt: f64,
    pub n_states: usize,
    /// Single-qubit initial state `cos ϑ|0⟩ + e^{iχ} sin ϑ|1⟩` as `(ϑ, χ)`.
    pub psi0: (f64, f64),
    /// Two-qubit initial basis state `|jk⟩`.
    pub psi0_pair: (usize, usize),
    pub drag: bool,
    pub leakage: bool,
    pub errors: ErrorModel,
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Table {
    entries: BTreeMap<String, Entry>,
    missing: Vec<String>,
}

impl Table {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn parse<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|e| Error::Config {
                line,
                message: format!("{key}: cannot parse {v:?}: {e}"),
            }),
        }
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        let line = self.entries.get(key).map(|e| e.line);
        match self.parse::<f64>(key)? {
            Some(v) if !v.is_finite() => Err(Error::Config {
                line: line.unwrap_or(0),
                message: format!("{key}: value must be finite"),
            }),
            other => Ok(other),
        }
    }

    fn required(&mut self, key: &str) -> Result<f64> {
        match self.number(key)? {
            Some(v) => Ok(v),
            None => {
                self.missing.push(key.to_string());
                Ok(f64::NAN)
            }
        }
    }

    fn required_parsed<T: FromStr>(&mut self, key: &str, fallback: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.parse::<T>(key)? {
            Some(v) => Ok(v),
            None => {
                self.missing.push(key.to_string());
                Ok(fallback)
            }
        }
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            None => Ok(default),
            Some((line, v)) => match v.as_str() {
                "true" | "on" | "yes" => Ok(true),
                "false" | "off" | "no" => Ok(false),
                _ => Err(Error::Config {
                    line,
                    message: format!("{key}: expected true or false, got {v:?}"),
                }),
            },
        }
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }
}

fn mhz(v: f64) -> f64 {
    TWO_PI * v * 1e6
}

fn khz(v: f64) -> f64 {
    TWO_PI * v * 1e3
}

fn tokenize(text: &str) -> Result<BTreeMap<String, Entry>> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(Error::Config {
                line,
                message: format!("expected `key = value`, got {body:?}"),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::Config {
                line,
                message: format!("empty key or value in {body:?}"),
            });
        }
        if !KNOWN_KEYS.contains(&k) {
            return Err(Error::Config {
                line,
                message: format!("unknown key {k:?}"),
            });
        }
        if entries.contains_key(k) {
            return Err(Error::Config {
                line,
                message: format!("duplicate key {k:?}"),
            });
        }
        entries.insert(
            k.to_string(),
            Entry {
                line,
                value: v.to_string(),
                used: false,
            },
        );
    }
    Ok(entries)
}

const KNOWN_KEYS: &[&str] = &[
    "device",
    "omega_max_mhz",
    "delta_mhz",
    "alpha_mhz",
    "kappa1_khz",
    "kappa2_khz",
    "theta_pi",
    "phi_pi",
    "gamma_pi",
    "scheme",
    "zeta_mhz",
    "alpha_a_mhz",
    "alpha_b_mhz",
    "g_mhz",
    "beta",
    "varphi_pi",
    "deltap_mhz",
    "gamma_p_pi",
    "modulation_envelope",
    "ngqc_zeta_mhz",
    "sweep",
    "sweep_lo",
    "sweep_hi",
    "sweep_n",
    "schemes",
    "dt_ps",
    "n_states",
    "psi0_theta_pi",
    "psi0_chi_pi",
    "psi0_pair",
    "drag",
    "leakage",
    "shift_second_level",
    "rabi_eps",
    "detuning_delta",
    "output",
];

fn parse_schemes(line: usize, v: &str) -> Result<Vec<Scheme>> {
    v.split(',')
        .map(|s| {
            s.trim().parse::<Scheme>().map_err(|e| Error::Config {
                line,
                message: format!("schemes: {e}"),
            })
        })
        .collect()
}

fn parse_pair(line: usize, v: &str) -> Result<(usize, usize)> {
    let digits: Vec<usize> = v
        .chars()
        .filter_map(|c| c.to_digit(10).map(|d| d as usize))
        .collect();
    if v.len() != 2 || digits.len() != 2 || digits.iter().any(|&d| d > 2) {
        return Err(Error::Config {
            line,
            message: format!("psi0_pair: expected two digits in 0..=2, got {v:?}"),
        });
    }
    Ok((digits[0], digits[1]))
}

impl ExperimentConfig {
    /// Parses configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = Table {
            entries: tokenize(text)?,
            missing: Vec::new(),
        };

        let device = match t.take("device") {
            None => DeviceKind::Transmon,
            Some((_, v)) if v == "transmon" => DeviceKind::Transmon,
            Some((_, v)) if v == "coupled" => DeviceKind::Coupled,
            Some((line, v)) => {
                return Err(Error::Config {
                    line,
                    message: format!("device: unknown value {v:?} (transmon or coupled)"),
                })
            }
        };

        let scheme: Scheme = t.required_parsed("scheme", Scheme::Sngqc)?;
        let kappa1 = khz(t.required("kappa1_khz")?);
        let kappa2 = khz(t.required("kappa2_khz")?);

        let (transmon, gate_angles) = match device {
            DeviceKind::Transmon => {
                let tp = TransmonParams {
                    omega_max: mhz(t.required("omega_max_mhz")?),
                    delta: mhz(t.required("delta_mhz")?),
                    alpha: mhz(t.required("alpha_mhz")?),
                    kappa1,
                    kappa2,
                };
                let angles = (
                    t.required("theta_pi")? * std::f64::consts::PI,
                    t.required("phi_pi")? * std::f64::consts::PI,
                    t.required("gamma_pi")? * std::f64::consts::PI,
                );
                (tp, angles)
            }
            DeviceKind::Coupled => {
                let d = TransmonParams::default();
                let tp = TransmonParams {
                    omega_max: t.number("omega_max_mhz")?.map_or(d.omega_max, mhz),
                    delta: t.number("delta_mhz")?.map_or(d.delta, mhz),
                    alpha: t.number("alpha_mhz")?.map_or(d.alpha, mhz),
                    kappa1,
                    kappa2,
                };
                (tp, (0.0, 0.0, 0.0))
            }
        };

        let (coupled, cphase) = match device {
            DeviceKind::Transmon => (None, CphaseSpec::default()),
            DeviceKind::Coupled => {
                let zeta = mhz(t.required("zeta_mhz")?);
                let alpha_a = mhz(t.required("alpha_a_mhz")?);
                let alpha_b = mhz(t.required("alpha_b_mhz")?);
                let g = mhz(t.required("g_mhz")?);
                let beta = t.required("beta")?;
                let varphi = t.required("varphi_pi")? * std::f64::consts::PI;
                let deltap = mhz(t.required("deltap_mhz")?);
                let gamma_p = t.required("gamma_p_pi")? * std::f64::consts::PI;
                let envelope: ModulationEnvelope =
                    t.parse("modulation_envelope")?.unwrap_or_default();
                let cp = if t.missing.is_empty() {
                    Some(
                        CoupledParams::new(zeta, alpha_a, alpha_b, g, beta, varphi, deltap)
                            .map_err(|e| Error::Config {
                                line: t.line_of("zeta_mhz"),
                                message: e.to_string(),
                            })?,
                    )
                } else {
                    None
                };
                (
                    cp,
                    CphaseSpec {
                        gamma_p,
                        scheme,
                        envelope,
                    },
                )
            }
        };

        let ngqc_zeta = t.number("ngqc_zeta_mhz")?.map_or(DEFAULT_NGQC_ZETA, mhz);

        let sweep_kind = match t.take("sweep") {
            None => None,
            Some((_, v)) if v == "none" => None,
            Some((_, v)) if v == "kappa" => Some(SweepKind::Kappa),
            Some((_, v)) if v == "rabi_eps" => Some(SweepKind::RabiEps),
            Some((_, v)) if v == "detuning_delta" => Some(SweepKind::DetuningDelta),
            Some((line, v)) => {
                return Err(Error::Config {
                    line,
                    message: format!("sweep: unknown value {v:?}"),
                })
            }
        };
        let sweep_line = t
            .line_of("sweep_n")
            .max(t.line_of("sweep_lo"))
            .max(t.line_of("sweep"));
        let lo = t.number("sweep_lo")?;
        let hi = t.number("sweep_hi")?;
        let n = t.parse::<usize>("sweep_n")?.unwrap_or(DEFAULT_SWEEP_POINTS);
        let sweep = match sweep_kind {
            None => None,
            Some(kind) => {
                let (dlo, dhi) = match kind {
                    SweepKind::Kappa => (0.0, 8.0),
                    _ => (-0.1, 0.1),
                };
                let (mut lo, mut hi) = (lo.unwrap_or(dlo), hi.unwrap_or(dhi));
                if kind == SweepKind::Kappa {
                    lo = khz(lo);
                    hi = khz(hi);
                }
                if n < 2 || !(hi > lo) {
                    return Err(Error::Config {
                        line: sweep_line,
                        message: format!(
                            "sweep needs sweep_n >= 2 and sweep_hi > sweep_lo (n = {n})"
                        ),
                    });
                }
                Some(Sweep { kind, lo, hi, n })
            }
        };

        let schemes = match t.take("schemes") {
            Some((line, v)) => parse_schemes(line, &v)?,
            None => match sweep_kind {
                Some(SweepKind::Kappa) => vec![Scheme::Sngqc, Scheme::NgqcA],
                _ => Scheme::ALL.to_vec(),
            },
        };

        let dt_line = t.line_of("dt_ps");
        let dt = t.number("dt_ps")?.map_or(DEFAULT_DT, |ps| ps * 1e-12);
        if !(dt > 0.0) {
            return Err(Error::Config {
                line: dt_line,
                message: "dt_ps must be positive".into(),
            });
        }
        let default_states = if device == DeviceKind::Coupled {
            10001
        } else {
            1001
        };
        let n_states = t.parse::<usize>("n_states")?.unwrap_or(default_states);
        let psi0 = (
            t.number("psi0_theta_pi")?.unwrap_or(0.0) * std::f64::consts::PI,
            t.number("psi0_chi_pi")?.unwrap_or(0.0) * std::f64::consts::PI,
        );
        let psi0_pair = match t.take("psi0_pair") {
            Some((line, v)) => parse_pair(line, &v)?,
            None => (1, 1),
        };
        let drag = t.flag("drag", true)?;
        let leakage = t.flag("leakage", true)?;
        let errors = ErrorModel {
            rabi_epsilon: t.number("rabi_eps")?.unwrap_or(0.0),
            detuning_delta: t.number("detuning_delta")?.unwrap_or(0.0),
            shift_second_level: t.flag("shift_second_level", true)?,
        };
        let output = t.take("output").map(|(_, v)| PathBuf::from(v));

        if !t.missing.is_empty() {
            return Err(Error::MissingKeys(t.missing));
        }
        if let Some((k, e)) = t.entries.iter().find(|(_, e)| !e.used) {
            return Err(Error::Config {
                line: e.line,
                message: format!("key {k:?} does not apply to this device"),
            });
        }

        let gate = match device {
            DeviceKind::Transmon => {
                GateParams::for_rotation(gate_angles.0, gate_angles.1, gate_angles.2, scheme)
                    .map_err(|e| Error::Config {
                        line: t.line_of("theta_pi"),
                        message: e.to_string(),
                    })?
            }
            DeviceKind::Coupled => {
                GateParams::new(0.0, 0.0, cphase.gamma_p, scheme).expect("theta = 0 is valid")
            }
        };
        transmon.validate()?;

        Ok(Self {
            device,
            transmon,
            gate,
            coupled,
            cphase,
            ngqc_zeta,
            sweep,
            schemes,
            output,
            dt,
            n_states,
            psi0,
            psi0_pair,
            drag,
            leakage,
            errors,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Reads and parses a configuration file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path)
}

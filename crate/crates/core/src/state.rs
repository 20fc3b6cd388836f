//! Pure states, density matrices and the dressed basis of a rotation axis.

use crate::error::{Error, Result};
use crate::matrix::{kron_vec, ComplexMatrix, C64, ONE, ZERO};

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amps: Vec<C64>,
}

impl QuantumState {
    /// Normalizes `amps`; fails on an empty or zero vector.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amps.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(
                "state vector must be finite and non-zero".into(),
            ));
        }
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { amps }
    }

    /// `cos ϑ|0⟩ + e^{iχ} sin ϑ|1⟩`.
    pub fn qubit(vartheta: f64, chi: f64) -> Self {
        let (s, c) = vartheta.sin_cos();
        Self {
            amps: vec![C64::new(c, 0.0), C64::from_polar(s, chi)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Pads with zero amplitudes up to `dim` (e.g. a qubit inside a qutrit).
    pub fn embed(&self, dim: usize) -> Self {
        assert!(dim >= self.dim());
        let mut amps = self.amps.clone();
        amps.resize(dim, ZERO);
        Self { amps }
    }

    /// Places the amplitudes on the given basis indices of a `dim`-level space.
    pub fn embed_at(&self, dim: usize, indices: &[usize]) -> Self {
        assert_eq!(indices.len(), self.dim());
        let mut amps = vec![ZERO; dim];
        for (&k, &a) in indices.iter().zip(&self.amps) {
            amps[k] = a;
        }
        Self { amps }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amps: kron_vec(&self.amps, &other.amps),
        }
    }

    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        Self {
            amps: u.apply(&self.amps),
        }
    }

    /// `|ψ⟩⟨ψ|` as a plain matrix.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        m
    }
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-8;

impl DensityMatrix {
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        let herm = m.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let rho = Self { m };
        let low = rho.min_eigenvalue();
        if low < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {low:.3e}"
            )));
        }
        Ok(rho)
    }

    pub fn pure(psi: &QuantumState) -> Self {
        Self { m: psi.projector() }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    pub fn population(&self, level: usize) -> f64 {
        self.m[(level, level)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.population(k)).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m.hermitian_eigen().0[0]
    }

    /// Purity `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.m.matmul(&self.m).trace().re
    }
}

/// The dressed states `(|μ₊⟩, |μ₋⟩)` of the axis `n(θ, φ)`:
///
/// * `|μ₊⟩ = cos(θ/2)|0⟩ + sin(θ/2)e^{iφ}|1⟩`
/// * `|μ₋⟩ = sin(θ/2)e^{−iφ}|0⟩ − cos(θ/2)|1⟩`
///
/// eigenvectors of `n·σ` with eigenvalues `+1` and `−1`. The sign of `|μ₋⟩`
/// is fixed as written so phase bookkeeping downstream is deterministic.
pub fn dressed_states(theta: f64, phi: f64) -> (QuantumState, QuantumState) {
    let (s, c) = (theta / 2.0).sin_cos();
    let plus = QuantumState {
        amps: vec![C64::new(c, 0.0), C64::from_polar(s, phi)],
    };
    let minus = QuantumState {
        amps: vec![C64::from_polar(s, -phi), C64::new(-c, 0.0)],
    };
    (plus, minus)
}

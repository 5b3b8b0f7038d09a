//! Basis states, amplitude vectors and the chainwise Hamiltonian matrices.
//!
//! The five-state basis is ordered `(g1, e1, g2, e2, g3)`; the reduced
//! ground-manifold basis is `(g1, g2, g3)`. Every module shares this order.

use std::fmt;
use std::ops::Index;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::DecayConfig;
use crate::error::{ensure_finite, Error, Result};
use crate::pulse::RabiSchedule;

/// Largest Hilbert-space dimension handled by the crate.
pub const MAX_DIM: usize = 5;

/// Labels of the five-state chain, in basis order.
pub const FIVE_STATE_LABELS: [&str; 5] = ["g1", "e1", "g2", "e2", "g3"];

/// Labels of the reduced ground manifold, in basis order.
pub const THREE_STATE_LABELS: [&str; 3] = ["g1", "g2", "g3"];

/// A level of the five-state chain `g1 - e1 - g2 - e2 - g3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    G1,
    E1,
    G2,
    E2,
    G3,
}

impl Level {
    pub const ALL: [Level; 5] = [Level::G1, Level::E1, Level::G2, Level::E2, Level::G3];

    /// Position in the five-state basis.
    pub fn index(self) -> usize {
        match self {
            Level::G1 => 0,
            Level::E1 => 1,
            Level::G2 => 2,
            Level::E2 => 3,
            Level::G3 => 4,
        }
    }

    /// Position in the reduced `(g1, g2, g3)` basis, `None` for excited states.
    pub fn reduced_index(self) -> Option<usize> {
        match self {
            Level::G1 => Some(0),
            Level::G2 => Some(1),
            Level::G3 => Some(2),
            Level::E1 | Level::E2 => None,
        }
    }

    /// Index of this level in a state vector of dimension `dim` (5 or 3).
    pub fn index_in(self, dim: usize) -> Option<usize> {
        match dim {
            5 => Some(self.index()),
            3 => self.reduced_index(),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        FIVE_STATE_LABELS[self.index()]
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Complex amplitudes over the five-state chain or the reduced ground manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes of dimension 5 or 3.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        match amplitudes.len() {
            3 | 5 => Ok(Self { amplitudes }),
            found => Err(Error::DimensionMismatch {
                expected: MAX_DIM,
                found,
            }),
        }
    }

    /// Real amplitudes, convenient for tests and examples.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// The basis vector for `level` in a space of dimension `dim`.
    pub fn basis(dim: usize, level: Level) -> Result<Self> {
        let idx = level.index_in(dim).ok_or(Error::DimensionMismatch {
            expected: MAX_DIM,
            found: dim,
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn amplitude(&self, level: Level) -> Option<Complex64> {
        level.index_in(self.dim()).map(|i| self.amplitudes[i])
    }

    /// `Σ|cᵢ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter {
                name: "state norm",
                value: norm,
                expected: "a finite, nonzero norm",
            });
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|c| c / norm).collect(),
        })
    }

    /// Probability of `level`, or `None` if the level is not part of this space.
    pub fn population(&self, level: Level) -> Option<f64> {
        self.amplitude(level).map(|c| c.norm_sqr())
    }

    /// Projects a five-state vector onto the ground manifold `(g1, g2, g3)`.
    pub fn ground_manifold(&self) -> Self {
        if self.dim() == 3 {
            return self.clone();
        }
        Self {
            amplitudes: vec![self.amplitudes[0], self.amplitudes[2], self.amplitudes[4]],
        }
    }
}

impl Index<usize> for StateVector {
    type Output = Complex64;

    fn index(&self, idx: usize) -> &Complex64 {
        &self.amplitudes[idx]
    }
}

/// Elementwise `|cᵢ|²`.
pub fn populations(v: &StateVector) -> Vec<f64> {
    v.amplitudes.iter().map(|c| c.norm_sqr()).collect()
}

/// One-photon detunings `(Δ₁, Δ₂)` and two-photon detunings `(δ₁, δ₂)`.
///
/// All values are angular frequencies. The ratio `ζ = Δ₁/Δ₂` is always
/// derived on demand.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningConfig {
    pub delta1: f64,
    pub delta2: f64,
    #[serde(default)]
    pub small_delta1: f64,
    #[serde(default)]
    pub small_delta2: f64,
}

impl DetuningConfig {
    /// Two-photon resonant configuration.
    pub fn new(delta1: f64, delta2: f64) -> Self {
        Self {
            delta1,
            delta2,
            small_delta1: 0.0,
            small_delta2: 0.0,
        }
    }

    /// Equal one-photon detunings `Δ₁ = Δ₂ = delta` (ζ = 1).
    pub fn symmetric(delta: f64) -> Self {
        Self::new(delta, delta)
    }

    pub fn with_two_photon(mut self, small_delta1: f64, small_delta2: f64) -> Self {
        self.small_delta1 = small_delta1;
        self.small_delta2 = small_delta2;
        self
    }

    /// `ζ = Δ₁/Δ₂`.
    pub fn zeta(&self) -> f64 {
        self.delta1 / self.delta2
    }

    /// Checks that every detuning is finite.
    pub fn validate(&self) -> Result<()> {
        ensure_finite("delta1", self.delta1)?;
        ensure_finite("delta2", self.delta2)?;
        ensure_finite("small_delta1", self.small_delta1)?;
        ensure_finite("small_delta2", self.small_delta2)?;
        Ok(())
    }

    /// Additionally requires `Δ₁ ≠ 0` and `Δ₂ ≠ 0`, as adiabatic elimination does.
    pub fn require_nonzero(&self) -> Result<()> {
        self.validate()?;
        if self.delta1 == 0.0 || self.delta2 == 0.0 {
            return Err(Error::ZeroDetuning {
                delta1: self.delta1,
                delta2: self.delta2,
            });
        }
        Ok(())
    }

    /// Rotating-frame diagonal of the five-state chain (not yet halved):
    /// `(0, 2Δ₁, 2δ₁, 2(Δ₂+δ₁), 2(δ₁+δ₂))`.
    fn doubled_diagonal(&self) -> [f64; 5] {
        [
            0.0,
            2.0 * self.delta1,
            2.0 * self.small_delta1,
            2.0 * (self.delta2 + self.small_delta1),
            2.0 * (self.small_delta1 + self.small_delta2),
        ]
    }
}

/// Dense complex Hamiltonian of dimension 5 or 3, stored inline.
#[derive(Clone, Copy, Debug)]
pub struct HamiltonianMatrix {
    dim: usize,
    entries: [[Complex64; MAX_DIM]; MAX_DIM],
    // every entry off the three central diagonals is zero
    banded: bool,
}

impl PartialEq for HamiltonianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl HamiltonianMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim != 3 && dim != 5 {
            return Err(Error::DimensionMismatch {
                expected: MAX_DIM,
                found: dim,
            });
        }
        Ok(Self {
            dim,
            entries: [[Complex64::new(0.0, 0.0); MAX_DIM]; MAX_DIM],
            banded: true,
        })
    }

    /// `(1/2)·M − (i/2)·diag(gammas)` for the real symmetric tridiagonal `M`
    /// with diagonal `diag` and nearest-neighbour `couplings`.
    pub fn chain(diag: &[f64], couplings: &[f64], gammas: &[f64]) -> Result<Self> {
        let dim = diag.len();
        if dim != 3 && dim != 5 {
            return Err(Error::DimensionMismatch {
                expected: MAX_DIM,
                found: dim,
            });
        }
        for (expected, found) in [(dim - 1, couplings.len()), (dim, gammas.len())] {
            if expected != found {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(Self::half_chain(diag, couplings, gammas))
    }

    /// Unchecked form of [`HamiltonianMatrix::chain`].
    pub(crate) fn half_chain(diag: &[f64], couplings: &[f64], gammas: &[f64]) -> Self {
        let dim = diag.len();
        debug_assert!(couplings.len() + 1 == dim && gammas.len() == dim);
        let mut entries = [[Complex64::new(0.0, 0.0); MAX_DIM]; MAX_DIM];
        for i in 0..dim {
            entries[i][i] = Complex64::new(0.5 * diag[i], -0.5 * gammas[i]);
        }
        for (i, &w) in couplings.iter().enumerate() {
            entries[i][i + 1] = Complex64::new(0.5 * w, 0.0);
            entries[i + 1][i] = Complex64::new(0.5 * w, 0.0);
        }
        Self {
            dim,
            entries,
            banded: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        self.entries[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        if row.abs_diff(col) > 1 && value != Complex64::new(0.0, 0.0) {
            self.banded = false;
        }
        self.entries[row][col] = value;
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim)
            .map(|i| self.entries[i][..self.dim].to_vec())
            .collect()
    }

    /// Largest `|Hᵢⱼ − conj(Hⱼᵢ)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Maximum over rows of `Σⱼ (|Re Hᵢⱼ| + |Im Hᵢⱼ|)`.
    ///
    /// Equals the induced ∞-norm for real matrices and bounds it from above
    /// otherwise, so it always bounds the spectral radius.
    #[inline]
    pub fn row_sum_norm(&self) -> f64 {
        let n = self.dim;
        let modulus = |z: &Complex64| z.re.abs() + z.im.abs();
        (0..n)
            .map(|i| {
                let cols = if self.banded {
                    i.saturating_sub(1)..(i + 2).min(n)
                } else {
                    0..n
                };
                self.entries[i][cols].iter().map(modulus).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// `out = H·x`.
    #[inline]
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        if self.banded {
            for i in 0..n {
                let row = &self.entries[i];
                let mut acc = row[i] * x[i];
                if i > 0 {
                    acc += row[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += row[i + 1] * x[i + 1];
                }
                out[i] = acc;
            }
            return;
        }
        for i in 0..n {
            let row = &self.entries[i];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += row[j] * x[j];
            }
            out[i] = acc;
        }
    }

    /// `H·x` for a compile-time dimension `N == self.dim()`.
    #[inline(always)]
    pub(crate) fn apply_fixed<const N: usize>(&self, x: &[Complex64; N]) -> [Complex64; N] {
        debug_assert_eq!(N, self.dim);
        let mut out = [Complex64::new(0.0, 0.0); N];
        if self.banded {
            for i in 0..N {
                let row = &self.entries[i];
                let mut acc = row[i] * x[i];
                if i > 0 {
                    acc += row[i - 1] * x[i - 1];
                }
                if i + 1 < N {
                    acc += row[i + 1] * x[i + 1];
                }
                out[i] = acc;
            }
        } else {
            for i in 0..N {
                out[i] = (0..N).map(|j| self.entries[i][j] * x[j]).sum();
            }
        }
        out
    }

    /// `H·v` as a new state vector.
    pub fn mul_vec(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply(v.amplitudes(), &mut out);
        StateVector::new(out)
    }
}

impl Index<(usize, usize)> for HamiltonianMatrix {
    type Output = Complex64;

    fn index(&self, (row, col): (usize, usize)) -> &Complex64 {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        &self.entries[row][col]
    }
}

/// Five-state RWA Hamiltonian for instantaneous Rabi frequencies `rabi = (Ω₁..Ω₄)`.
///
/// Two-photon detunings shift the diagonal cumulatively along the chain:
/// `g2 ← δ₁`, `e2 ← Δ₂+δ₁`, `g3 ← δ₁+δ₂`. Decay enters as `−iΓ/2` on
/// `e1`, `g2` and `e2`.
pub fn full_hamiltonian(
    rabi: [f64; 4],
    det: &DetuningConfig,
    decay: &DecayConfig,
) -> Result<HamiltonianMatrix> {
    det.validate()?;
    decay.validate()?;
    for (&name, &w) in ["omega1", "omega2", "omega3", "omega4"].iter().zip(&rabi) {
        ensure_finite(name, w)?;
    }
    Ok(full_hamiltonian_unchecked(rabi, det, decay))
}

#[inline]
pub(crate) fn full_hamiltonian_unchecked(
    rabi: [f64; 4],
    det: &DetuningConfig,
    decay: &DecayConfig,
) -> HamiltonianMatrix {
    HamiltonianMatrix::half_chain(&det.doubled_diagonal(), &rabi, &decay.as_diagonal())
}

/// Five-state Hamiltonian at time `t` for the pulses of `schedule`.
pub fn build_full_hamiltonian(
    t: f64,
    schedule: &RabiSchedule,
    det: &DetuningConfig,
    decay: &DecayConfig,
) -> Result<HamiltonianMatrix> {
    ensure_finite("t", t)?;
    full_hamiltonian(schedule.physical(t), det, decay)
}

/// Normalized dark state `∝ Ω₂Ω₄|g1⟩ − Ω₁Ω₄|g2⟩ + Ω₁Ω₃|g3⟩` of the
/// two-photon resonant chain.
pub fn dark_state(omega1: f64, omega2: f64, omega3: f64, omega4: f64) -> Result<StateVector> {
    let a = omega2 * omega4;
    let b = -omega1 * omega4;
    let c = omega1 * omega3;
    let norm = (a * a + b * b + c * c).sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateDarkState);
    }
    if !norm.is_finite() {
        return Err(Error::InvalidParameter {
            name: "rabi frequencies",
            value: norm,
            expected: "finite values",
        });
    }
    StateVector::from_real(&[a / norm, 0.0, b / norm, 0.0, c / norm])
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-14;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_inputs_give_zero_matrix() {
        let h = full_hamiltonian(
            [0.0; 4],
            &DetuningConfig::new(0.0, 0.0),
            &DecayConfig::none(),
        )
        .unwrap();
        assert_eq!(h, HamiltonianMatrix::zeros(5).unwrap());
    }

    #[test]
    fn full_matrix_layout() {
        let det = DetuningConfig::new(3.0, 5.0).with_two_photon(0.25, -0.5);
        let h = full_hamiltonian([1.0, 2.0, 3.0, 4.0], &det, &DecayConfig::none()).unwrap();
        let expected = [
            [0.0, 0.5, 0.0, 0.0, 0.0],
            [0.5, 3.0, 1.0, 0.0, 0.0],
            [0.0, 1.0, 0.25, 1.5, 0.0],
            [0.0, 0.0, 1.5, 5.25, 2.0],
            [0.0, 0.0, 0.0, 2.0, -0.25],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(h[(i, j)], c(expected[i][j], 0.0), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn decay_puts_half_rates_on_the_imaginary_diagonal() {
        let decay = DecayConfig::new(0.1, 0.01, 0.1).unwrap();
        let h = full_hamiltonian([0.0; 4], &DetuningConfig::symmetric(300.0), &decay).unwrap();
        let expected = [0.0, -0.05, -0.005, -0.05, 0.0];
        for (i, &im) in expected.iter().enumerate() {
            assert!((h[(i, i)].im - im).abs() < TOL);
        }
        assert!(!h.is_hermitian(1e-12));
    }

    #[test]
    fn rejects_bad_inputs() {
        let det = DetuningConfig::new(f64::NAN, 1.0);
        assert!(full_hamiltonian([0.0; 4], &det, &DecayConfig::none()).is_err());
        let decay = DecayConfig {
            gamma_e1: -1.0,
            gamma_g2: 0.0,
            gamma_e2: 0.0,
        };
        assert!(full_hamiltonian([0.0; 4], &DetuningConfig::symmetric(1.0), &decay).is_err());
    }

    #[test]
    fn dark_state_examples() {
        let w = 2.5;
        let v = dark_state(0.0, w, w, w).unwrap();
        assert_eq!(populations(&v), vec![1.0, 0.0, 0.0, 0.0, 0.0]);

        let v = dark_state(w, w, 0.0, w).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[0].re - s).abs() < TOL && (v[2].re + s).abs() < TOL);

        // Ω₂ = 0 leaves g1 bright; the dark combination lives on g2 and g3.
        let v = dark_state(w, 0.0, w, w).unwrap();
        assert!((v[2].re + s).abs() < TOL && (v[4].re - s).abs() < TOL);
        assert!(v[0].norm() == 0.0);

        let p = populations(&dark_state(w, w, w, w).unwrap());
        for (got, want) in p.iter().zip([1.0 / 3.0, 0.0, 1.0 / 3.0, 0.0, 1.0 / 3.0]) {
            assert!((got - want).abs() < TOL);
        }
    }

    #[test]
    fn dark_state_degenerate() {
        assert_eq!(
            dark_state(0.0, 0.0, 1.0, 0.0),
            Err(Error::DegenerateDarkState)
        );
        assert_eq!(
            dark_state(1.0, 0.0, 0.0, 0.0),
            Err(Error::DegenerateDarkState)
        );
        assert_eq!(
            dark_state(0.0, 0.0, 0.0, 0.0),
            Err(Error::DegenerateDarkState)
        );
    }

    #[test]
    fn populations_examples() {
        let v = StateVector::basis(5, Level::G1).unwrap();
        assert_eq!(populations(&v), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let v = StateVector::new(vec![
            c(0.5, 0.5),
            c(0.0, 0.0),
            c(0.5, -0.5),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(populations(&v), vec![0.5, 0.0, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn state_vector_dimension_checks() {
        assert!(StateVector::from_real(&[1.0, 0.0]).is_err());
        assert!(StateVector::basis(3, Level::E1).is_err());
        let v = StateVector::basis(5, Level::G3).unwrap().ground_manifold();
        assert_eq!(populations(&v), vec![0.0, 0.0, 1.0]);
    }
}

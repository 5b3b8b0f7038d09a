//! Closed-form propagator of the resonant reduced system.
//!
//! When both couplings of the reduced `g1 ↔ g2 ↔ g3` system share a time
//! profile, `H(t) = f(t)/2 · [[0, sinφ, 0], [sinφ, 0, cosφ], [0, cosφ, 0]]`
//! commutes with itself at all times. In the bright/dark basis
//! `|b⟩ = sinφ|g1⟩ + cosφ|g3⟩`, `|d⟩ = cosφ|g1⟩ − sinφ|g3⟩` the dark state
//! is frozen and `|b⟩ ↔ |g2⟩` undergo a Rabi rotation by the rms area `A`:
//!
//! ```text
//!      ⎡ 1 − 2sin²φ sin²(A/4)   −i sinφ sin(A/2)   −sin2φ sin²(A/4)     ⎤
//! U =  ⎢ −i sinφ sin(A/2)       cos(A/2)           −i cosφ sin(A/2)     ⎥
//!      ⎣ −sin2φ sin²(A/4)       −i cosφ sin(A/2)   1 − 2cos²φ sin²(A/4) ⎦
//! ```

use std::ops::Mul;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pulse::RabiSchedule;
use crate::state::StateVector;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense 3×3 complex matrix over `(g1, g2, g3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix3(pub [[Complex64; 3]; 3]);

impl Matrix3 {
    pub fn identity() -> Self {
        Matrix3([[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]])
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = [[ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = self.0[j][i].conj();
            }
        }
        Matrix3(out)
    }

    /// `max |(U†U − I)ᵢⱼ|`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        let id = Matrix3::identity();
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((p.0[i][j] - id.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[Complex64; 3]) -> [Complex64; 3] {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][0] * v[0] + self.0[i][1] * v[1] + self.0[i][2] * v[2];
        }
        out
    }

    /// `|Uᵢⱼ|²`.
    pub fn probability(&self, row: usize, col: usize) -> f64 {
        self.0[row][col].norm_sqr()
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;

    fn mul(self, rhs: Matrix3) -> Matrix3 {
        let mut out = [[ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, z) in row.iter_mut().enumerate() {
                *z = (0..3).map(|m| self.0[i][m] * rhs.0[m][j]).sum();
            }
        }
        Matrix3(out)
    }
}

/// Propagator of one step with mixing angle `φ` and rms area `A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPropagator {
    pub matrix: Matrix3,
    pub mixing_angle: f64,
    pub rms_area: f64,
}

/// Exact single-step propagator `U(φ, A)`.
pub fn step_propagator(phi: f64, area: f64) -> StepPropagator {
    let (s, c) = phi.sin_cos();
    let (half_s, half_c) = (0.5 * area).sin_cos();
    let q = (0.25 * area).sin().powi(2);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    let corner = re(-(2.0 * phi).sin() * q);
    let u12 = im(-s * half_s);
    let u23 = im(-c * half_s);
    StepPropagator {
        matrix: Matrix3([
            [re(1.0 - 2.0 * s * s * q), u12, corner],
            [u12, re(half_c), u23],
            [corner, u23, re(1.0 - 2.0 * c * c * q)],
        ]),
        mixing_angle: phi,
        rms_area: area,
    }
}

/// Ordered product `U(φ_N)···U(φ₁)` with the same rms area on every step.
pub fn train_propagator(angles: &[f64], area_per_step: f64) -> Result<Matrix3> {
    if angles.is_empty() {
        return Err(Error::InvalidParameter {
            name: "angles",
            value: 0.0,
            expected: "at least one mixing angle",
        });
    }
    Ok(angles.iter().fold(Matrix3::identity(), |acc, &phi| {
        step_propagator(phi, area_per_step).matrix * acc
    }))
}

/// Analytic maximum of the `g2` population along a train: `sin²(θ/N)`.
pub fn max_intermediate_population(n_pairs: usize, target_angle: f64) -> f64 {
    (target_angle / n_pairs.max(1) as f64).sin().powi(2)
}

/// Number of Simpson intervals used by [`rms_pulse_area`].
pub const AREA_QUADRATURE_INTERVALS: usize = 4000;

/// `∫_a^b √(Ω_{e1}(t)² + Ω_{e2}(t)²) dt` for arbitrary envelopes, by composite
/// Simpson quadrature on `intervals` (rounded up to even) sub-intervals.
pub fn rms_area_of<F>(envelopes: F, window: (f64, f64), intervals: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && b >= a) {
        return Err(Error::InvalidParameter {
            name: "window",
            value: b - a,
            expected: "a finite window with end >= start",
        });
    }
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let rms = |t: f64| envelopes(t).map(|(e1, e2)| e1.hypot(e2));
    let mut sum = rms(a)? + rms(b)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * rms(a + i as f64 * h)?;
    }
    Ok(sum * h / 3.0)
}

/// rms pulse area of step `k`, with the effective couplings reconstructed
/// from the physical fields and integrated over the step's window.
pub fn rms_pulse_area(schedule: &RabiSchedule, k: usize) -> Result<f64> {
    let train = schedule.train();
    let window = train.step_window(k)?;
    let det = *train.detuning();
    rms_area_of(
        |t| {
            let [_, o2, o3, _] = crate::pulse::synthesize_physical_pulses(train, k, t)?;
            crate::pulse::effective_from_physical(o2, o3, &det)
        },
        window,
        AREA_QUADRATURE_INTERVALS,
    )
}

/// Populations within and after one step of an analytically propagated train.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepTransient {
    pub step: usize,
    pub mixing_angle: f64,
    /// Largest `(P_g1, P_g2, P_g3)` reached while the partial area grows from 0 to `A`.
    pub max_populations: [f64; 3],
    pub final_populations: [f64; 3],
}

/// Analytic evolution of a train from an initial reduced state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainEvolution {
    pub area_per_step: f64,
    pub steps: Vec<StepTransient>,
    pub final_populations: [f64; 3],
    /// Largest `g2` population over the whole train.
    pub max_intermediate: f64,
}

/// Tracks the reduced state through the train, evaluating
/// `U(φ_k, a)` on `samples_per_step` partial areas `a ∈ [0, A]` per step.
pub fn train_transients(
    angles: &[f64],
    area_per_step: f64,
    initial: &StateVector,
    samples_per_step: usize,
) -> Result<TrainEvolution> {
    if initial.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: initial.dim(),
        });
    }
    if angles.is_empty() {
        return Err(Error::InvalidParameter {
            name: "angles",
            value: 0.0,
            expected: "at least one mixing angle",
        });
    }
    let amps = initial.amplitudes();
    let mut psi = [amps[0], amps[1], amps[2]];
    let pops = |v: &[Complex64; 3]| [v[0].norm_sqr(), v[1].norm_sqr(), v[2].norm_sqr()];
    let n = samples_per_step.max(2);
    let mut steps = Vec::with_capacity(angles.len());
    let mut max_intermediate = pops(&psi)[1];
    for (idx, &phi) in angles.iter().enumerate() {
        let mut max_pop = pops(&psi);
        for i in 1..n {
            let a = area_per_step * i as f64 / (n - 1) as f64;
            let p = pops(&step_propagator(phi, a).matrix.apply(&psi));
            for (m, x) in max_pop.iter_mut().zip(p) {
                *m = m.max(x);
            }
        }
        psi = step_propagator(phi, area_per_step).matrix.apply(&psi);
        max_intermediate = max_intermediate.max(max_pop[1]);
        steps.push(StepTransient {
            step: idx + 1,
            mixing_angle: phi,
            max_populations: max_pop,
            final_populations: pops(&psi),
        });
    }
    Ok(TrainEvolution {
        area_per_step,
        final_populations: pops(&psi),
        steps,
        max_intermediate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{mixing_angles, PulseTrainParams};
    use crate::state::Level;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn assert_c(z: Complex64, re: f64, im: f64, tol: f64) {
        assert!(
            (z.re - re).abs() < tol && (z.im - im).abs() < tol,
            "{z} vs {re}+{im}i"
        );
    }

    #[test]
    fn zero_area_is_identity() {
        for phi in [0.0, 0.3, 1.2] {
            assert_eq!(step_propagator(phi, 0.0).matrix, Matrix3::identity());
        }
    }

    #[test]
    fn full_area_at_quarter_pi() {
        let u = step_propagator(FRAC_PI_4, 2.0 * PI).matrix;
        let expected = [[0.0, 0.0, -1.0], [0.0, -1.0, 0.0], [-1.0, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_c(u.get(i, j), expected[i][j], 0.0, 1e-15);
            }
        }
    }

    #[test]
    fn half_area_at_quarter_pi() {
        let u = step_propagator(FRAC_PI_4, PI).matrix;
        assert_c(u.get(0, 0), 0.5, 0.0, 1e-15);
        assert_c(u.get(0, 1), 0.0, -FRAC_1_SQRT_2, 1e-15);
        assert_c(u.get(0, 2), -0.5, 0.0, 1e-15);
        for i in 0..3 {
            let row: f64 = (0..3).map(|j| u.probability(i, j)).sum();
            assert!((row - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn train_examples() {
        let u = train_propagator(&[FRAC_PI_4], 2.0 * PI).unwrap();
        assert!((u.probability(2, 0) - 1.0).abs() < 1e-15);

        let u = train_propagator(&[PI / 8.0, 3.0 * PI / 8.0], 2.0 * PI).unwrap();
        assert_c(u.get(2, 0), -1.0, 0.0, 1e-15);
        assert_c(u.get(0, 0), 0.0, 0.0, 1e-15);

        let u = train_propagator(&mixing_angles(5, PI / 8.0).unwrap(), 2.0 * PI).unwrap();
        assert!((u.probability(0, 0) - 0.5).abs() < 1e-12);
        assert!((u.probability(2, 0) - 0.5).abs() < 1e-12);

        assert!(train_propagator(&[], 2.0 * PI).is_err());
    }

    #[test]
    fn analytic_maxima() {
        assert!((max_intermediate_population(1, FRAC_PI_4) - 0.5).abs() < 1e-15);
        let p5 = max_intermediate_population(5, FRAC_PI_4);
        assert!((p5 - 0.024471741852423).abs() < 1e-12);
        let p5h = max_intermediate_population(5, PI / 8.0);
        assert!((p5h - 0.006155829702431).abs() < 1e-12);
    }

    #[test]
    fn within_step_peak_matches_closed_form() {
        let g1 = StateVector::basis(3, Level::G1).unwrap();
        for (n, theta) in [
            (1, FRAC_PI_4),
            (5, FRAC_PI_4),
            (5, PI / 8.0),
            (3, PI / 12.0),
        ] {
            let angles = mixing_angles(n, theta).unwrap();
            let evo = train_transients(&angles, 2.0 * PI, &g1, 2001).unwrap();
            let want = max_intermediate_population(n, theta);
            assert!(
                (evo.max_intermediate - want).abs() < 1e-12,
                "n={n}: {} vs {want}",
                evo.max_intermediate
            );
        }
    }

    #[test]
    fn rms_area_of_designed_steps() {
        for (area, want) in [(2.0 * PI, 2.0 * PI), (PI, PI)] {
            let train = PulseTrainParams {
                step_area: area,
                ..Default::default()
            }
            .build()
            .unwrap();
            let schedule = RabiSchedule::new(train);
            for k in 1..=5 {
                let got = rms_pulse_area(&schedule, k).unwrap();
                assert!((got - want).abs() / want < 1e-6, "k={k}: {got}");
            }
            assert!(rms_pulse_area(&schedule, 6).is_err());
        }
    }

    #[test]
    fn rms_area_of_zero_envelopes_is_zero() {
        let area = rms_area_of(|_| Ok((0.0, 0.0)), (-5.0, 5.0), 100).unwrap();
        assert_eq!(area, 0.0);
        assert!(rms_area_of(|_| Ok((0.0, 0.0)), (1.0, 0.0), 100).is_err());
    }
}

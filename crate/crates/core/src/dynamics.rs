//! Time-dependent Schrödinger integration and the adiabatic-elimination layer.
//!
//! All Hamiltonians are in angular-frequency units with `ħ = 1`; the state
//! obeys `i·dc/dt = H(t)·c`. Integration is classical fourth-order
//! Runge–Kutta with a fixed step and analytic evaluation of `H` at the
//! stage times.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::pulse::RabiSchedule;
use crate::state::{
    full_hamiltonian_unchecked, DetuningConfig, HamiltonianMatrix, StateVector, FIVE_STATE_LABELS,
    MAX_DIM, THREE_STATE_LABELS,
};

/// Upper bound on `dt·‖H‖` accepted by [`integrate`].
pub const STEP_NORM_LIMIT: f64 = 0.1;

/// Fraction of [`STEP_NORM_LIMIT`] targeted by [`suggest_time_step`].
const STEP_NORM_TARGET: f64 = 0.095;

/// Default largest time step, in units of `T`.
pub const DEFAULT_MAX_DT: f64 = 1e-3;

/// Default number of stored samples per run.
pub const DEFAULT_SAMPLES: usize = 2000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Population decay rates of the three intermediate states.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayConfig {
    pub gamma_e1: f64,
    pub gamma_g2: f64,
    pub gamma_e2: f64,
}

impl DecayConfig {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(gamma_e1: f64, gamma_g2: f64, gamma_e2: f64) -> Result<Self> {
        let decay = Self {
            gamma_e1,
            gamma_g2,
            gamma_e2,
        };
        decay.validate()?;
        Ok(decay)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("gamma_e1", self.gamma_e1),
            ("gamma_g2", self.gamma_g2),
            ("gamma_e2", self.gamma_e2),
        ] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: g,
                    expected: "a finite, non-negative rate",
                });
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.gamma_e1 == 0.0 && self.gamma_g2 == 0.0 && self.gamma_e2 == 0.0
    }

    /// Rates on the five-state diagonal `(g1, e1, g2, e2, g3)`.
    pub(crate) fn as_diagonal(&self) -> [f64; 5] {
        [0.0, self.gamma_e1, self.gamma_g2, self.gamma_e2, 0.0]
    }
}

/// Anything that can produce `H(t)`.
pub trait HamiltonianSource: Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, t: f64) -> HamiltonianMatrix;

    /// Times at which `‖H(t)‖` is expected to peak; used when choosing a step.
    fn landmarks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Adapts a closure into a [`HamiltonianSource`].
pub struct FnSource<F> {
    dim: usize,
    f: F,
}

impl<F> FnSource<F>
where
    F: Fn(f64) -> HamiltonianMatrix + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> HamiltonianSource for FnSource<F>
where
    F: Fn(f64) -> HamiltonianMatrix + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn hamiltonian(&self, t: f64) -> HamiltonianMatrix {
        (self.f)(t)
    }
}

/// The five-state chain driven by a synthesized schedule.
#[derive(Clone, Debug)]
pub struct FullSystem {
    pub schedule: RabiSchedule,
    pub detuning: DetuningConfig,
    pub decay: DecayConfig,
}

impl FullSystem {
    pub fn new(
        schedule: RabiSchedule,
        detuning: DetuningConfig,
        decay: DecayConfig,
    ) -> Result<Self> {
        detuning.validate()?;
        decay.validate()?;
        Ok(Self {
            schedule,
            detuning,
            decay,
        })
    }
}

impl HamiltonianSource for FullSystem {
    fn dim(&self) -> usize {
        5
    }

    #[inline]
    fn hamiltonian(&self, t: f64) -> HamiltonianMatrix {
        full_hamiltonian_unchecked(self.schedule.physical(t), &self.detuning, &self.decay)
    }

    fn landmarks(&self) -> Vec<f64> {
        self.schedule.train().centers().to_vec()
    }
}

/// Adiabatically eliminated three-state system driven by the physical fields of a schedule.
#[derive(Clone, Debug)]
pub struct EffectiveSystem {
    pub schedule: RabiSchedule,
    pub detuning: DetuningConfig,
}

impl EffectiveSystem {
    pub fn new(schedule: RabiSchedule, detuning: DetuningConfig) -> Result<Self> {
        detuning.require_nonzero()?;
        Ok(Self { schedule, detuning })
    }
}

impl HamiltonianSource for EffectiveSystem {
    fn dim(&self) -> usize {
        3
    }

    fn hamiltonian(&self, t: f64) -> HamiltonianMatrix {
        effective_hamiltonian_unchecked(self.schedule.physical(t), &self.detuning)
    }

    fn landmarks(&self) -> Vec<f64> {
        self.schedule.train().centers().to_vec()
    }
}

/// Resonant reduced system with the designed (positive) Gaussian couplings
/// and no diagonal: `H = ½[[0, Ω̃_{e1}, 0], [Ω̃_{e1}, 0, Ω̃_{e2}], [0, Ω̃_{e2}, 0]]`.
#[derive(Clone, Debug)]
pub struct ReducedLambda {
    pub schedule: RabiSchedule,
}

impl HamiltonianSource for ReducedLambda {
    fn dim(&self) -> usize {
        3
    }

    fn hamiltonian(&self, t: f64) -> HamiltonianMatrix {
        let [e1, e2] = self.schedule.effective(t);
        HamiltonianMatrix::half_chain(&[0.0; 3], &[e1, e2], &[0.0; 3])
    }

    fn landmarks(&self) -> Vec<f64> {
        self.schedule.train().centers().to_vec()
    }
}

/// Output of a numerical run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    /// Sample times (first and last time of the window included).
    pub times: Vec<f64>,
    /// `populations[i][j]`: probability of basis state `j` at `times[i]`.
    pub populations: Vec<Vec<f64>>,
    /// Sampled amplitudes, aligned with `times`.
    pub amplitudes: Vec<StateVector>,
    /// `‖c‖²` at each sample.
    pub norms: Vec<f64>,
    /// Per-state maxima over every integration step, not only the samples.
    pub max_transients: Vec<f64>,
    pub final_populations: Vec<f64>,
    pub final_state: StateVector,
    /// `1 − ‖c(t_end)‖²`.
    pub norm_loss: f64,
    /// Largest `|1 − ‖c‖²|` seen on any integration step.
    pub max_norm_deviation: f64,
    pub dt: f64,
    pub steps: usize,
}

impl SimulationResult {
    pub fn dim(&self) -> usize {
        self.final_populations.len()
    }

    /// Time series of basis state `j`.
    pub fn population_series(&self, j: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[j]).collect()
    }

    /// Writes `t,P_g1,P_e1,P_g2,P_e2,P_g3,norm` (or the three ground columns for a reduced run).
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let labels: &[&str] = if self.dim() == 5 {
            &FIVE_STATE_LABELS
        } else {
            &THREE_STATE_LABELS
        };
        write!(out, "t")?;
        for l in labels {
            write!(out, ",P_{l}")?;
        }
        writeln!(out, ",norm")?;
        for ((t, p), n) in self.times.iter().zip(&self.populations).zip(&self.norms) {
            write!(out, "{t:?}")?;
            for x in p {
                write!(out, ",{x:?}")?;
            }
            writeln!(out, ",{n:?}")?;
        }
        Ok(())
    }
}

/// Largest `‖H(t)‖` found on the landmarks and a uniform grid over the window.
pub fn max_hamiltonian_norm<S: HamiltonianSource + ?Sized>(source: &S, window: (f64, f64)) -> f64 {
    let (t0, t1) = window;
    let grid = 4000;
    (0..=grid)
        .map(|i| t0 + (t1 - t0) * i as f64 / grid as f64)
        .chain(source.landmarks())
        .map(|t| source.hamiltonian(t).row_sum_norm())
        .fold(0.0, f64::max)
}

/// Largest step not exceeding `max_dt` that keeps `dt·‖H‖` safely under [`STEP_NORM_LIMIT`].
pub fn suggest_time_step<S: HamiltonianSource + ?Sized>(
    source: &S,
    window: (f64, f64),
    max_dt: f64,
) -> f64 {
    let norm = max_hamiltonian_norm(source, window);
    if norm > 0.0 {
        max_dt.min(STEP_NORM_TARGET / norm)
    } else {
        max_dt
    }
}

#[inline]
fn check_step(h: &HamiltonianMatrix, t: f64, dt: f64) -> Result<()> {
    let norm = h.row_sum_norm();
    let product = dt * norm;
    if product < STEP_NORM_LIMIT {
        Ok(())
    } else if !product.is_finite() {
        Err(Error::NonFinite { t })
    } else {
        Err(Error::StepTooLarge {
            t,
            dt,
            norm,
            product,
            limit: STEP_NORM_LIMIT,
        })
    }
}

/// `−i·H·x` for a compile-time dimension.
#[inline(always)]
fn derivative<const N: usize>(h: &HamiltonianMatrix, x: &[Complex64; N]) -> [Complex64; N] {
    let hx = h.apply_fixed(x);
    hx.map(|z| Complex64::new(z.im, -z.re))
}

/// Integrates `i·dc/dt = H(t)·c` over `window` with classical RK4.
///
/// The window is divided into `⌈(t_end − t_start)/dt⌉` equal steps, so the
/// step actually used never exceeds `dt`. About `samples` evenly strided
/// states are stored; per-state maxima are tracked on every step.
pub fn integrate<S: HamiltonianSource + ?Sized>(
    initial: &StateVector,
    source: &S,
    window: (f64, f64),
    dt: f64,
    samples: usize,
) -> Result<SimulationResult> {
    let dim = source.dim();
    if initial.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: initial.dim(),
        });
    }
    let (t0, t1) = window;
    ensure_finite("t_start", t0)?;
    ensure_finite("t_end", t1)?;
    if !(t1 > t0) {
        return Err(Error::InvalidParameter {
            name: "window",
            value: t1 - t0,
            expected: "t_end > t_start",
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            expected: "a positive, finite step",
        });
    }
    let initial_norm = initial.norm_sqr();
    if (initial_norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter {
            name: "initial state norm",
            value: initial_norm,
            expected: "a normalized state",
        });
    }
    match dim {
        3 => rk4::<3, S>(initial, source, window, dt, samples),
        5 => rk4::<5, S>(initial, source, window, dt, samples),
        found => Err(Error::DimensionMismatch {
            expected: MAX_DIM,
            found,
        }),
    }
}

fn rk4<const N: usize, S: HamiltonianSource + ?Sized>(
    initial: &StateVector,
    source: &S,
    (t0, t1): (f64, f64),
    dt: f64,
    samples: usize,
) -> Result<SimulationResult> {
    let steps = ((t1 - t0) / dt).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let stride = steps.div_ceil(samples.max(1)).max(1);

    let mut c = [ZERO; N];
    c.copy_from_slice(initial.amplitudes());

    let capacity = steps / stride + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut populations = Vec::with_capacity(capacity);
    let mut amplitudes = Vec::with_capacity(capacity);
    let mut norms = Vec::with_capacity(capacity);
    let mut record = |t: f64, c: &[Complex64; N]| -> Result<()> {
        let pops: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
        norms.push(pops.iter().sum());
        populations.push(pops);
        amplitudes.push(StateVector::new(c.to_vec())?);
        times.push(t);
        Ok(())
    };

    let mut max_transients = c.map(|z| z.norm_sqr());
    let mut max_norm_deviation = 0.0_f64;
    record(t0, &c)?;

    let mut h_start = source.hamiltonian(t0);
    check_step(&h_start, t0, h)?;
    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let t_next = if step + 1 == steps {
            t1
        } else {
            t0 + (step + 1) as f64 * h
        };
        let h_mid = source.hamiltonian(t + 0.5 * h);
        let h_end = source.hamiltonian(t_next);
        check_step(&h_mid, t + 0.5 * h, h)?;
        check_step(&h_end, t_next, h)?;

        let k1 = derivative(&h_start, &c);
        let mut tmp = [ZERO; N];
        for i in 0..N {
            tmp[i] = c[i] + k1[i] * (0.5 * h);
        }
        let k2 = derivative(&h_mid, &tmp);
        for i in 0..N {
            tmp[i] = c[i] + k2[i] * (0.5 * h);
        }
        let k3 = derivative(&h_mid, &tmp);
        for i in 0..N {
            tmp[i] = c[i] + k3[i] * h;
        }
        let k4 = derivative(&h_end, &tmp);
        let mut norm = 0.0;
        for i in 0..N {
            c[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            let p = c[i].norm_sqr();
            norm += p;
            max_transients[i] = max_transients[i].max(p);
        }
        if !norm.is_finite() {
            return Err(Error::NonFinite { t: t_next });
        }
        max_norm_deviation = max_norm_deviation.max((1.0 - norm).abs());
        h_start = h_end;

        if (step + 1) % stride == 0 || step + 1 == steps {
            record(t_next, &c)?;
        }
    }

    let final_state = StateVector::new(c.to_vec())?;
    let final_populations: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
    let norm_loss = 1.0 - final_populations.iter().sum::<f64>();
    Ok(SimulationResult {
        times,
        populations,
        amplitudes,
        norms,
        max_transients: max_transients.to_vec(),
        final_populations,
        final_state,
        norm_loss,
        max_norm_deviation,
        dt: h,
        steps,
    })
}

/// Final-state difference between runs at `dt` and `dt/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dt: f64,
    /// `max_j |c_j(dt) − c_j(dt/2)|` at the end of the window.
    pub amplitude_change: f64,
}

/// Re-runs at half the step and reports how much the final amplitudes moved.
pub fn check_convergence<S: HamiltonianSource + ?Sized>(
    initial: &StateVector,
    source: &S,
    window: (f64, f64),
    dt: f64,
) -> Result<ConvergenceReport> {
    let coarse = integrate(initial, source, window, dt, 2)?;
    let fine = integrate(initial, source, window, 0.5 * dt, 2)?;
    Ok(ConvergenceReport {
        dt: coarse.dt,
        amplitude_change: max_amplitude_difference(&coarse.final_state, &fine.final_state),
    })
}

/// `max_j |aⱼ − bⱼ|`.
pub fn max_amplitude_difference(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Effective `(g1, g2, g3)` Hamiltonian after eliminating `e1` and `e2`:
///
/// ```text
/// ½ [[Δ_{e1}, Ω_{e1}, 0], [Ω_{e1}, Δ_{e2}, Ω_{e2}], [0, Ω_{e2}, Δ_{e3}]]
/// Ω_{e1} = −Ω₁Ω₂/(2Δ₁)     Ω_{e2} = −Ω₃Ω₄/(2Δ₂)
/// Δ_{e1} = −Ω₁²/(2Δ₁)      Δ_{e2} = −Ω₂²/(2Δ₁) − Ω₃²/(2Δ₂)      Δ_{e3} = −Ω₄²/(2Δ₂)
/// ```
///
/// Two-photon detunings, when present, add `δ₁` to `g2` and `δ₁+δ₂` to `g3`.
pub fn effective_hamiltonian(rabi: [f64; 4], det: &DetuningConfig) -> Result<HamiltonianMatrix> {
    det.require_nonzero()?;
    for w in rabi {
        ensure_finite("rabi frequency", w)?;
    }
    Ok(effective_hamiltonian_unchecked(rabi, det))
}

fn effective_hamiltonian_unchecked(rabi: [f64; 4], det: &DetuningConfig) -> HamiltonianMatrix {
    let [o1, o2, o3, o4] = rabi;
    let (d1, d2) = (2.0 * det.delta1, 2.0 * det.delta2);
    let diag = [
        -o1 * o1 / d1,
        -o2 * o2 / d1 - o3 * o3 / d2 + 2.0 * det.small_delta1,
        -o4 * o4 / d2 + 2.0 * (det.small_delta1 + det.small_delta2),
    ];
    let couplings = [-o1 * o2 / d1, -o3 * o4 / d2];
    HamiltonianMatrix::half_chain(&diag, &couplings, &[0.0; 3])
}

/// Common Stark shift `Δ_e/2 = −Ω̃₁²/(4Δ₁)` on the diagonal of the effective
/// Hamiltonian, valid when the amplitude constraint holds.
pub fn common_stark_shift(schedule: &RabiSchedule, t: f64) -> f64 {
    let o1 = schedule.physical(t)[0];
    -o1 * o1 / (4.0 * schedule.train().detuning().delta1)
}

/// Qualitative reading of an adiabatic-elimination margin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AeVerdict {
    Good,
    Marginal,
    Poor,
}

/// `min_t |Δ₁|/√(Ω₁²+Ω₂²)` and `min_t |Δ₂|/√(Ω₃²+Ω₄²)`; `+∞` when the fields vanish.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AeMargins {
    pub first: f64,
    pub second: f64,
}

impl AeMargins {
    pub fn min(&self) -> f64 {
        self.first.min(self.second)
    }

    /// `≥ 10` good, `≥ 5` marginal, otherwise poor.
    pub fn verdict(&self) -> AeVerdict {
        let m = self.min();
        if m >= 10.0 {
            AeVerdict::Good
        } else if m >= 5.0 {
            AeVerdict::Marginal
        } else {
            AeVerdict::Poor
        }
    }
}

/// Margins of the large-detuning condition for arbitrary field samples.
pub fn ae_margins<I>(samples: I, det: &DetuningConfig) -> AeMargins
where
    I: IntoIterator<Item = [f64; 4]>,
{
    let ratio = |delta: f64, a: f64, b: f64| {
        let r = a.hypot(b);
        if r == 0.0 {
            f64::INFINITY
        } else {
            delta.abs() / r
        }
    };
    samples.into_iter().fold(
        AeMargins {
            first: f64::INFINITY,
            second: f64::INFINITY,
        },
        |m, [o1, o2, o3, o4]| AeMargins {
            first: m.first.min(ratio(det.delta1, o1, o2)),
            second: m.second.min(ratio(det.delta2, o3, o4)),
        },
    )
}

/// Margins of the large-detuning condition over a schedule's window.
pub fn ae_validity(schedule: &RabiSchedule, det: &DetuningConfig) -> AeMargins {
    let (t0, t1) = schedule.window();
    let grid = 4000;
    let times = (0..=grid)
        .map(|i| t0 + (t1 - t0) * i as f64 / grid as f64)
        .chain(schedule.train().centers().iter().copied());
    ae_margins(times.map(|t| schedule.physical(t)), det)
}

/// Strips the common phase `exp(−i∫_{t₀}^{t} E(s) ds)` from sampled
/// amplitudes, where `E(t)` is the diagonal entry shared by every basis state.
///
/// The phase is integrated with Simpson's rule between consecutive samples.
pub fn remove_global_phase<F>(
    times: &[f64],
    amplitudes: &[StateVector],
    shift: F,
) -> Result<Vec<StateVector>>
where
    F: Fn(f64) -> f64,
{
    if times.len() != amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: amplitudes.len(),
        });
    }
    let sub = 16;
    let mut phase = 0.0;
    let mut out = Vec::with_capacity(amplitudes.len());
    for (i, (t, v)) in times.iter().zip(amplitudes).enumerate() {
        if i > 0 {
            let a = times[i - 1];
            let h = (t - a) / sub as f64;
            let mut s = shift(a) + shift(*t);
            for j in 1..sub {
                s += if j % 2 == 1 { 4.0 } else { 2.0 } * shift(a + j as f64 * h);
            }
            phase += s * h / 3.0;
        }
        let rot = Complex64::from_polar(1.0, phase);
        out.push(StateVector::new(
            v.amplitudes().iter().map(|c| c * rot).collect(),
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseTrainParams;
    use crate::state::{populations, Level};

    fn schedule(n: usize) -> RabiSchedule {
        RabiSchedule::new(
            PulseTrainParams {
                n_pairs: n,
                ..Default::default()
            }
            .build()
            .unwrap(),
        )
    }

    #[test]
    fn zero_hamiltonian_leaves_state_unchanged() {
        let src = FnSource::new(5, |_| HamiltonianMatrix::zeros(5).unwrap());
        let init = StateVector::from_real(&[0.6, 0.0, 0.8, 0.0, 0.0]).unwrap();
        let res = integrate(&init, &src, (0.0, 3.0), 1e-2, 10).unwrap();
        assert_eq!(res.final_state, init);
        assert_eq!(res.times.first(), Some(&0.0));
        assert_eq!(res.times.last(), Some(&3.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        let src = FnSource::new(3, |_| HamiltonianMatrix::zeros(3).unwrap());
        let g1 = StateVector::basis(3, Level::G1).unwrap();
        assert!(integrate(&g1, &src, (0.0, 1.0), 0.0, 10).is_err());
        assert!(integrate(&g1, &src, (1.0, 1.0), 0.1, 10).is_err());
        let five = StateVector::basis(5, Level::G1).unwrap();
        assert!(matches!(
            integrate(&five, &src, (0.0, 1.0), 0.1, 10),
            Err(Error::DimensionMismatch { .. })
        ));
        let unnormalized = StateVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        assert!(integrate(&unnormalized, &src, (0.0, 1.0), 0.1, 10).is_err());
    }

    #[test]
    fn step_size_sanity_check() {
        let sched = schedule(1);
        let sys = FullSystem::new(
            sched.clone(),
            *sched.train().detuning(),
            DecayConfig::none(),
        )
        .unwrap();
        let g1 = StateVector::basis(5, Level::G1).unwrap();
        let err = integrate(&g1, &sys, sched.window(), 1e-3, 10).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }), "{err}");
        let dt = suggest_time_step(&sys, sched.window(), DEFAULT_MAX_DT);
        assert!(dt * max_hamiltonian_norm(&sys, sched.window()) < STEP_NORM_LIMIT);
    }

    #[test]
    fn single_step_effective_transfer() {
        let sched = schedule(1);
        let sys = ReducedLambda {
            schedule: sched.clone(),
        };
        let g1 = StateVector::basis(3, Level::G1).unwrap();
        let res = integrate(&g1, &sys, sched.window(), 1e-3, 100).unwrap();
        let p = &res.final_populations;
        assert!(
            p[0] < 1e-6 && p[1] < 1e-6 && (p[2] - 1.0).abs() < 1e-6,
            "{p:?}"
        );
        assert!((res.max_transients[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn effective_hamiltonian_examples() {
        let det = DetuningConfig::new(240.0, 300.0);
        let h = effective_hamiltonian([0.0; 4], &det).unwrap();
        assert_eq!(h, HamiltonianMatrix::zeros(3).unwrap());

        let w = 20.0;
        let h = effective_hamiltonian([w, w, 0.0, 0.0], &det).unwrap();
        let v = -w * w / (2.0 * det.delta1) / 2.0;
        assert!((h[(0, 0)].re - v).abs() < 1e-14);
        assert!((h[(1, 1)].re - v).abs() < 1e-14);
        assert!((h[(0, 1)].re - v).abs() < 1e-14);
        assert_eq!(h[(1, 2)].re, 0.0);
        assert_eq!(h[(2, 2)].re, 0.0);

        assert!(effective_hamiltonian([1.0; 4], &DetuningConfig::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn constrained_fields_equalize_stark_shifts() {
        for zeta in [0.8, 1.0, 1.2] {
            let det = DetuningConfig::new(300.0 * zeta, 300.0);
            let sched = RabiSchedule::new(
                PulseTrainParams {
                    detuning: det,
                    ..Default::default()
                }
                .build()
                .unwrap(),
            );
            for t in [-1.0, 0.0, 0.3, 8.0, 20.0] {
                let h = effective_hamiltonian(sched.physical(t), &det).unwrap();
                let d = h[(0, 0)].re;
                assert!((h[(1, 1)].re - d).abs() <= 1e-12 * d.abs().max(1e-300));
                assert!((h[(2, 2)].re - d).abs() <= 1e-12 * d.abs().max(1e-300));
                assert!((common_stark_shift(&sched, t) - d).abs() <= 1e-12 * d.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn ae_margin_examples() {
        let det = DetuningConfig::symmetric(300.0);
        let m = ae_margins([[0.0; 4]], &det);
        assert!(m.first.is_infinite() && m.second.is_infinite());

        let (o1, o2) = (30.0, 40.0);
        let det = DetuningConfig::new(50.0, 300.0);
        let m = ae_margins([[o1, o2, 0.0, 0.0], [0.5 * o1, 0.5 * o2, 0.0, 0.0]], &det);
        assert_eq!(m.first, 1.0);
        assert_eq!(m.verdict(), AeVerdict::Poor);

        let sched = schedule(5);
        let m = ae_validity(&sched, sched.train().detuning());
        assert!(m.min().is_finite() && m.min() > 1.0);
    }

    #[test]
    fn global_phase_removal() {
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let e = 2.5;
        let c0 = StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let rotating: Vec<StateVector> = times
            .iter()
            .map(|t| {
                let r = Complex64::from_polar(1.0, -e * t);
                StateVector::new(c0.amplitudes().iter().map(|c| c * r).collect()).unwrap()
            })
            .collect();
        let stripped = remove_global_phase(&times, &rotating, |_| e).unwrap();
        for (s, r) in stripped.iter().zip(&rotating) {
            assert!(max_amplitude_difference(s, &c0) < 1e-12);
            let (ps, pr) = (populations(s), populations(r));
            assert!(ps.iter().zip(&pr).all(|(a, b)| (a - b).abs() < 1e-15));
        }
        let same = remove_global_phase(&times, &rotating, |_| 0.0).unwrap();
        assert_eq!(same, rotating);
    }

    #[test]
    fn decay_drains_norm_monotonically() {
        let sched = schedule(2);
        let sys = FullSystem::new(
            sched.clone(),
            *sched.train().detuning(),
            DecayConfig::new(0.1, 0.01, 0.1).unwrap(),
        )
        .unwrap();
        let g1 = StateVector::basis(5, Level::G1).unwrap();
        let dt = suggest_time_step(&sys, sched.window(), DEFAULT_MAX_DT);
        let res = integrate(&g1, &sys, sched.window(), dt, 500).unwrap();
        let rise = res
            .norms
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::MIN, f64::max);
        assert!(rise <= 1e-12, "norm rose by {rise}");
        assert!(res.norm_loss > 0.0 && res.norm_loss < 1.0);
    }

    #[test]
    fn trajectory_csv_layout() {
        let sched = schedule(1);
        let sys = ReducedLambda {
            schedule: sched.clone(),
        };
        let g1 = StateVector::basis(3, Level::G1).unwrap();
        let res = integrate(&g1, &sys, sched.window(), 1e-2, 20).unwrap();
        let mut buf = Vec::new();
        res.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,P_g1,P_g2,P_g3,norm\n"));
    }
}

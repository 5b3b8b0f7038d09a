//! Shared helpers for integration tests: an independent matrix-exponential
//! oracle for the resonant Λ system and constant-ratio Gaussian sources.

#![allow(dead_code)]

use coincident_pulses::dynamics::FnSource;
use coincident_pulses::state::HamiltonianMatrix;
use num_complex::Complex64;

pub type M3 = [[Complex64; 3]; 3];

fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

/// `exp(M)` by scaling and squaring of a truncated Taylor series.
pub fn expm(m: &M3) -> M3 {
    let norm = m
        .iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 0.5f64.powi(squarings as i32);
    let a: M3 = m.map(|row| row.map(|z| z * scale));

    let mut result = [[Complex64::new(0.0, 0.0); 3]; 3];
    let mut term = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        result[i][i] = Complex64::new(1.0, 0.0);
        term[i][i] = Complex64::new(1.0, 0.0);
    }
    for n in 1..=30 {
        term = mat_mul(&term, &a).map(|row| row.map(|z| z / n as f64));
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// `exp(−i·A·H₀)` with `H₀ = ½[[0, sinφ, 0], [sinφ, 0, cosφ], [0, cosφ, 0]]`.
pub fn lambda_oracle(phi: f64, area: f64) -> M3 {
    let (s, c) = phi.sin_cos();
    let z = Complex64::new(0.0, 0.0);
    let k = Complex64::new(0.0, -0.5 * area);
    expm(&[[z, k * s, z], [k * s, z, k * c], [z, k * c, z]])
}

/// Resonant Λ system with envelopes `A/(√π·T)·e^{−t²/T²}·(sinφ, cosφ)`, centered at 0.
pub fn gaussian_lambda(
    phi: f64,
    area: f64,
    width: f64,
) -> FnSource<impl Fn(f64) -> HamiltonianMatrix + Sync> {
    let peak = area / (std::f64::consts::PI.sqrt() * width);
    let (s, c) = phi.sin_cos();
    FnSource::new(3, move |t: f64| {
        let f = peak * (-(t / width).powi(2)).exp();
        HamiltonianMatrix::chain(&[0.0; 3], &[f * s, f * c], &[0.0; 3]).expect("dimension 3")
    })
}

pub fn max_abs_diff(a: &M3, b: &M3) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

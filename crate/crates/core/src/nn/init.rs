//! Parameter initialisers for circuits and networks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// How to draw initial parameter values.
///
/// The interval strategies draw `u` uniformly (with random sign for the two-sided intervals)
/// and store `atanh(u)`, so that `π·tanh(θ)` recovers `π·u`. The Gaussian variants store the
/// draw directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// `u ∈ [-1, 1]`
    Standard,
    /// `|u| ∈ [0.01, 0.11]`
    Small,
    /// `|u| ∈ [0.25, 0.75]`
    Medium,
    /// `|u| ∈ [0.59, 0.99]`
    Large,
    /// `N(0, 1)`
    Gaussian,
    /// `N(0, 1)` with magnitude clipped to `[0.01, 0.99]`
    ClippedGaussian,
    Orthogonal {
        gain: f64,
    },
    ZeroBias,
}

impl InitStrategy {
    /// Magnitude interval of the pre-`atanh` draw, for the interval strategies.
    pub fn interval(self) -> Option<(f64, f64)> {
        match self {
            InitStrategy::Standard => Some((0.0, 1.0)),
            InitStrategy::Small => Some((0.01, 0.11)),
            InitStrategy::Medium => Some((0.25, 0.75)),
            InitStrategy::Large => Some((0.59, 0.99)),
            _ => None,
        }
    }

    /// Draws `n` raw circuit parameters.
    pub fn sample_vqc<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Vec<f64> {
        init_params(1, n, self, rng)
    }
}

/// Draws a `rows × cols` block (row-major) with `strategy`.
pub fn init_params<R: Rng + ?Sized>(rows: usize, cols: usize, strategy: InitStrategy, rng: &mut R) -> Vec<f64> {
    let n = rows * cols;
    match strategy {
        InitStrategy::Orthogonal { gain } => orthogonal(rows, cols, gain, rng),
        InitStrategy::ZeroBias => vec![0.0; n],
        InitStrategy::Gaussian => (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        InitStrategy::ClippedGaussian => (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                z.signum() * z.abs().clamp(0.01, 0.99)
            })
            .collect(),
        interval => {
            let (lo, hi) = interval.interval().expect("interval strategy");
            (0..n)
                .map(|_| {
                    let u = loop {
                        let u = if lo == 0.0 {
                            rng.random_range(-hi..=hi)
                        } else {
                            let m = rng.random_range(lo..=hi);
                            if rng.random::<bool>() {
                                m
                            } else {
                                -m
                            }
                        };
                        if u.abs() < 1.0 {
                            break u;
                        }
                    };
                    u.atanh()
                })
                .collect()
        }
    }
}

/// Orthogonal `rows × cols` matrix scaled by `gain`, row-major.
///
/// Rows are orthonormal when `rows ≤ cols`, columns otherwise.
pub fn orthogonal<R: Rng + ?Sized>(rows: usize, cols: usize, gain: f64, rng: &mut R) -> Vec<f64> {
    let (m, n) = if rows < cols { (cols, rows) } else { (rows, cols) };
    let flat = DMatrix::<f64>::from_fn(m, n, |_, _| rng.sample(StandardNormal));
    let qr = flat.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let s = if r[(j, j)] < 0.0 { -1.0 } else { 1.0 };
        q.column_mut(j).scale_mut(s);
    }
    let q = if rows < cols { q.transpose() } else { q };
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            out.push(gain * q[(i, j)]);
        }
    }
    out
}

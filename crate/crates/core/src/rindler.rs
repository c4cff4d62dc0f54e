//! Minkowski vacuum and single-particle states seen from a uniformly
//! accelerated frame, expressed in truncated Rindler Fock bases.
//!
//! Two construction paths exist side by side:
//!
//! * `*_two_mode`: the region I / region II two-mode expansions, summed to
//!   `N - 1` on factors `(N, N)`.
//! * `*_compat`: the single-factor vectors of the reference QuTiP script,
//!   reproduced term for term (sum cutoff at `N - 2`, and a leading `|0>` in
//!   the particle state).
//!
//! Neither path renormalizes; the truncation deficit shows up in the norm.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fockspace::{c64, FactorDims, Ket};

/// Truncation thresholds below this value are numerically unstable.
pub const EPSILON_FLOOR: f64 = 0.1;

/// Two-mode squeezing strength `r >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct SqueezeParameter(f64);

impl SqueezeParameter {
    pub const ZERO: SqueezeParameter = SqueezeParameter(0.0);

    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return invalid(format!(
                "squeeze parameter must be finite and >= 0, got {r}"
            ));
        }
        Ok(Self(r))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Dimensionless acceleration `a / (|k| c)`; its reciprocal is the Rindler
/// frequency ratio `Omega`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AccelerationRatio(f64);

impl AccelerationRatio {
    pub fn new(a_over_kc: f64) -> Result<Self> {
        if !a_over_kc.is_finite() || a_over_kc < 0.0 {
            return invalid(format!(
                "acceleration ratio must be finite and >= 0, got {a_over_kc}"
            ));
        }
        Ok(Self(a_over_kc))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum TruncationSpec {
    /// Fixed Fock-space dimension `N >= 2` per mode.
    Fixed(usize),
    /// Dimension chosen per `r` as the smallest `N` with `tanh^N r < epsilon`.
    Epsilon(f64),
}

impl TruncationSpec {
    pub fn fixed(n: usize) -> Result<Self> {
        if n < 2 {
            return invalid(format!("fixed truncation needs N >= 2, got {n}"));
        }
        Ok(Self::Fixed(n))
    }

    pub fn epsilon(eps: f64) -> Result<Self> {
        check_epsilon(eps)?;
        if eps < EPSILON_FLOOR {
            log::warn!(
                "truncation threshold {eps} is below {EPSILON_FLOOR}; expect unstable results at large r"
            );
        }
        Ok(Self::Epsilon(eps))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Fixed(n) if n < 2 => invalid(format!("fixed truncation needs N >= 2, got {n}")),
            Self::Fixed(_) => Ok(()),
            Self::Epsilon(eps) => check_epsilon(eps),
        }
    }

    /// Fock dimension to use at squeeze `r`.
    pub fn level_for(&self, r: SqueezeParameter) -> Result<usize> {
        self.validate()?;
        match *self {
            Self::Fixed(n) => Ok(n),
            Self::Epsilon(eps) => truncation_level(r, eps),
        }
    }
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self::Fixed(3)
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("epsilon must lie in (0, 1), got {eps}"));
    }
    Ok(())
}

/// `a/|k|c = -2 pi / ln(tanh^2 r)`, with `r = 0` mapped to `0`.
pub fn acceleration_from_squeeze(r: SqueezeParameter) -> AccelerationRatio {
    let r = r.value();
    if r == 0.0 {
        return AccelerationRatio(0.0);
    }
    AccelerationRatio(-2.0 * PI / (r.tanh().powi(2)).ln())
}

/// Inverse of [`acceleration_from_squeeze`]: `r = artanh(exp(-pi / a))`.
pub fn squeeze_from_acceleration(a: AccelerationRatio) -> SqueezeParameter {
    let a = a.value();
    if a == 0.0 {
        return SqueezeParameter(0.0);
    }
    SqueezeParameter((-PI / a).exp().atanh())
}

/// Smallest `N >= 2` with `tanh^N r < epsilon`.
pub fn truncation_level(r: SqueezeParameter, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    let t = r.value().tanh();
    if t < epsilon {
        return Ok(2);
    }
    if t >= 1.0 {
        return invalid(format!(
            "tanh r rounds to 1 at r = {}; no finite truncation exists",
            r.value()
        ));
    }
    // closed-form estimate, then settle the boundary against the powers themselves
    let below = |n: usize| t.powf(n as f64) < epsilon;
    let mut n = ((epsilon.ln() / t.ln()).ceil() as usize).max(2);
    while !below(n) {
        n += 1;
    }
    while n > 2 && below(n - 1) {
        n -= 1;
    }
    Ok(n)
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return invalid(format!("Fock truncation needs N >= 2, got {n}"));
    }
    Ok(())
}

fn two_mode_ket(n: usize, mut amp: impl FnMut(usize, usize) -> f64) -> Result<Ket> {
    let mut amps = vec![c64(0.0); n * n];
    for i in 0..n {
        for ii in 0..n {
            amps[i * n + ii] = c64(amp(i, ii));
        }
    }
    Ket::new(amps, FactorDims::new(vec![n, n])?)
}

/// `(1/cosh r) sum_{n<N} tanh^n r |n>_I |n>_II`.
pub fn vacuum_two_mode(n: usize, r: SqueezeParameter) -> Result<Ket> {
    check_dim(n)?;
    let (t, c) = (r.value().tanh(), r.value().cosh());
    two_mode_ket(n, |i, ii| if i == ii { t.powi(i as i32) / c } else { 0.0 })
}

/// `(1/cosh^2 r) sum_{n<=N-2} tanh^n r sqrt(n+1) |n+1>_I |n>_II`.
pub fn particle_two_mode(n: usize, r: SqueezeParameter) -> Result<Ket> {
    check_dim(n)?;
    let (t, c) = (r.value().tanh(), r.value().cosh());
    two_mode_ket(n, |i, ii| {
        if i == ii + 1 {
            t.powi(ii as i32) * ((ii + 1) as f64).sqrt() / (c * c)
        } else {
            0.0
        }
    })
}

/// Script form of the vacuum: `(1/cosh r)(|0> + sum_{n=1}^{N-2} tanh^n r |n>)`.
pub fn vacuum_compat(n: usize, r: SqueezeParameter) -> Result<Ket> {
    check_dim(n)?;
    let t = r.value().tanh();
    let mut amps = vec![0.0; n];
    amps[0] = 1.0;
    for (k, amp) in amps.iter_mut().enumerate().take(n - 1).skip(1) {
        *amp += t.powf(k as f64);
    }
    let scale = 1.0 / r.value().cosh();
    let amps: Vec<f64> = amps.iter().map(|a| a * scale).collect();
    Ket::from_real(&amps, FactorDims::single(n)?)
}

/// Script form of the particle state:
/// `(1/cosh^2 r)(|0> + sum_{n=1}^{N-2} tanh^n r sqrt(n+1) |n+1>)`.
pub fn particle_compat(n: usize, r: SqueezeParameter) -> Result<Ket> {
    check_dim(n)?;
    let t = r.value().tanh();
    let mut amps = vec![0.0; n];
    amps[0] = 1.0;
    for k in 1..n - 1 {
        amps[k + 1] += t.powf(k as f64) * ((k + 1) as f64).sqrt();
    }
    let scale = 1.0 / r.value().cosh().powi(2);
    let amps: Vec<f64> = amps.iter().map(|a| a * scale).collect();
    Ket::from_real(&amps, FactorDims::single(n)?)
}

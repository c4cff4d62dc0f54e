//! Wigner's-friend states, the two-lab Bell setup, and the CHSH statistic.
//!
//! Factor layouts (field before lab, Alice before Bob):
//!
//! | mode       | factors                                   | dims              |
//! |------------|-------------------------------------------|-------------------|
//! | inertial   | Alice field, C lab, Bob field, D lab      | (2, 2, 2, 2)      |
//! | compat     | Alice field, C lab, Bob field, D lab      | (N, N, N, N)      |
//! | faithful   | Alice field, C lab, Bob I, Bob II, D lab  | (N, 2, N, N, 2)   |
//!
//! The compat layout follows the reference script, which embeds the lab
//! states in dimension-`N` factors.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fockspace::{
    basis_ket, expectation, log_negativity, normalize, outer, partial_trace, tensor, tensor_op,
    DensityOperator, FactorDims, Ket, SPECTRAL_TOL,
};
use crate::rindler::{
    particle_compat, particle_two_mode, vacuum_compat, vacuum_two_mode, SqueezeParameter,
    TruncationSpec,
};

/// Largest dense matrix side any configuration may build.
pub const MAX_DENSE_SIDE: usize = 4096;

/// Factor positions in the faithful layout.
pub mod faithful_factors {
    pub const ALICE_FIELD: usize = 0;
    pub const ALICE_LAB: usize = 1;
    pub const BOB_REGION_I: usize = 2;
    pub const BOB_REGION_II: usize = 3;
    pub const BOB_LAB: usize = 4;
}
use faithful_factors::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Inertial,
    AcceleratedCompat,
    AcceleratedFaithful,
}

/// How Bob's binary observables are built in the faithful layout.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobObservables {
    /// Operators on (region I, region II, lab) built from the two-mode vectors.
    Global,
    /// Region II summed out of Bob's vectors, then Gram-Schmidt (g first) on
    /// (region I, lab).
    #[default]
    Reduced,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub theta: f64,
    pub trunc: TruncationSpec,
    pub r: SqueezeParameter,
    pub mode: Mode,
    /// Only meaningful in faithful mode; `None` there means [`BobObservables::Reduced`].
    pub bob_observables: Option<BobObservables>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::compat(TruncationSpec::default(), SqueezeParameter::ZERO)
    }
}

impl ExperimentConfig {
    pub fn inertial() -> Self {
        Self {
            theta: FRAC_PI_4,
            trunc: TruncationSpec::default(),
            r: SqueezeParameter::ZERO,
            mode: Mode::Inertial,
            bob_observables: None,
        }
    }

    pub fn compat(trunc: TruncationSpec, r: SqueezeParameter) -> Self {
        Self {
            trunc,
            r,
            mode: Mode::AcceleratedCompat,
            ..Self::inertial()
        }
    }

    pub fn faithful(trunc: TruncationSpec, r: SqueezeParameter, bob: BobObservables) -> Self {
        Self {
            trunc,
            r,
            mode: Mode::AcceleratedFaithful,
            bob_observables: Some(bob),
            ..Self::inertial()
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn bob(&self) -> BobObservables {
        self.bob_observables.unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() {
            return invalid(format!("theta must be finite, got {}", self.theta));
        }
        if self.mode != Mode::AcceleratedFaithful && self.bob_observables.is_some() {
            return invalid("Bob observable choice only applies to faithful mode");
        }
        if self.mode != Mode::Inertial {
            self.trunc.validate()?;
        }
        Ok(())
    }

    /// Fock dimension per mode; 2 for the inertial layout.
    pub fn fock_dim(&self) -> Result<usize> {
        match self.mode {
            Mode::Inertial => Ok(2),
            _ => self.trunc.level_for(self.r),
        }
    }

    fn check_size(&self, n: usize) -> Result<()> {
        let side = match self.mode {
            Mode::Inertial => 16,
            Mode::AcceleratedCompat => n.pow(4),
            Mode::AcceleratedFaithful => match self.bob() {
                BobObservables::Global => 4 * n.pow(3),
                BobObservables::Reduced => 4 * n.pow(2),
            },
        };
        if side > MAX_DENSE_SIDE {
            return invalid(format!(
                "truncation N = {n} needs {side}x{side} dense matrices (limit {MAX_DENSE_SIDE})"
            ));
        }
        Ok(())
    }

    fn half_angle(&self) -> (f64, f64) {
        let half = self.theta / 2.0;
        (half.sin(), half.cos())
    }
}

/// The four outcome vectors `|A_g>, |A_e>, |B_g>, |B_e>`.
#[derive(Clone, Debug)]
pub struct OutcomeStates {
    pub a_g: Ket,
    pub a_e: Ket,
    pub b_g: Ket,
    pub b_e: Ket,
}

impl OutcomeStates {
    pub fn for_config(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let n = config.fock_dim()?;
        config.check_size(n)?;
        let k = |dim, i| basis_ket(dim, i);
        match config.mode {
            Mode::Inertial => Ok(Self {
                a_g: tensor(&[&k(2, 0)?, &k(2, 0)?])?,
                a_e: tensor(&[&k(2, 1)?, &k(2, 1)?])?,
                b_g: tensor(&[&k(2, 0)?, &k(2, 0)?])?,
                b_e: tensor(&[&k(2, 1)?, &k(2, 1)?])?,
            }),
            Mode::AcceleratedCompat => Ok(Self {
                a_g: tensor(&[&k(n, 0)?, &k(n, 0)?])?,
                a_e: tensor(&[&k(n, 1)?, &k(n, 1)?])?,
                b_g: tensor(&[&vacuum_compat(n, config.r)?, &k(n, 0)?])?,
                b_e: tensor(&[&particle_compat(n, config.r)?, &k(n, 1)?])?,
            }),
            Mode::AcceleratedFaithful => Ok(Self {
                a_g: tensor(&[&k(n, 0)?, &k(2, 0)?])?,
                a_e: tensor(&[&k(n, 1)?, &k(2, 1)?])?,
                b_g: tensor(&[&vacuum_two_mode(n, config.r)?, &k(2, 0)?])?,
                b_e: tensor(&[&particle_two_mode(n, config.r)?, &k(2, 1)?])?,
            }),
        }
    }

    /// Bob's vectors with region II summed out and orthonormalized on
    /// (region I, lab). Only defined for the faithful layout.
    pub fn reduced_bob(&self) -> Result<(Ket, Ket)> {
        let g = contract_region_ii(&self.b_g)?;
        let e = contract_region_ii(&self.b_e)?;
        gram_schmidt_pair(&g, &e)
    }
}

/// Sums a (region I, region II, lab) vector over the region II index.
fn contract_region_ii(v: &Ket) -> Result<Ket> {
    let d = v.dims().as_slice();
    if d.len() != 3 {
        return invalid(format!(
            "expected a (I, II, lab) vector, got dims {}",
            v.dims()
        ));
    }
    let (n1, n2, nl) = (d[0], d[1], d[2]);
    let amps = v.amplitudes();
    let mut out = Vec::with_capacity(n1 * nl);
    for i in 0..n1 {
        for l in 0..nl {
            out.push((0..n2).map(|ii| amps[(i * n2 + ii) * nl + l]).sum());
        }
    }
    Ket::new(out, FactorDims::new(vec![n1, nl])?)
}

fn gram_schmidt_pair(g: &Ket, e: &Ket) -> Result<(Ket, Ket)> {
    let g = normalize(g)?;
    let overlap = g.inner(e)?;
    let proj = Ket::new(
        g.amplitudes().iter().map(|a| a * overlap).collect(),
        g.dims().clone(),
    )?;
    let e = normalize(&Ket::superpose(&[(1.0, e), (-1.0, &proj)])?)?;
    Ok((g, e))
}

/// `(1/sqrt2)(|0>_B |F_0> + |1>_B |F_1>)` on factors (field, friend).
pub fn friend_composite_state() -> Ket {
    bell_basis()[0].clone()
}

/// `[Phi+, Phi-, Psi+, Psi-]` on (field, friend).
pub fn bell_basis() -> [Ket; 4] {
    let h = FRAC_1_SQRT_2;
    let dims = FactorDims::new(vec![2, 2]).expect("static dims");
    let mk = |a: [f64; 4]| Ket::from_real(&a, dims.clone()).expect("length 4");
    [
        mk([h, 0.0, 0.0, h]),
        mk([h, 0.0, 0.0, -h]),
        mk([0.0, h, h, 0.0]),
        mk([0.0, h, -h, 0.0]),
    ]
}

/// True when `state` factorizes across the cut between its first
/// `outcome_factors` factors and the rest.
pub fn message_factorizes(state: &Ket, outcome_factors: usize) -> Result<bool> {
    Ok(state.schmidt_rank(outcome_factors, 1e-10)? == 1)
}

/// Builds `|Phi>_BF (x) |msg>` with the message in its first basis state and
/// checks that the message factors out.
pub fn message_factorization_check(message_dim: usize) -> Result<bool> {
    if message_dim == 0 {
        return invalid("message dimension must be positive");
    }
    let state = tensor(&[&friend_composite_state(), &basis_ket(message_dim, 0)?])?;
    message_factorizes(&state, 2)
}

/// `-sin(theta/2)|phi-> + cos(theta/2)|psi+>` on (mode j, mode k).
pub fn initial_field_state(theta: f64) -> Result<Ket> {
    if !theta.is_finite() {
        return invalid(format!("theta must be finite, got {theta}"));
    }
    let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let h = FRAC_1_SQRT_2;
    Ket::from_real(&[-s * h, c * h, c * h, s * h], FactorDims::new(vec![2, 2])?)
}

/// `-sin(theta/2)|Phi+> + cos(theta/2)|Psi->` after both friends have measured.
/// Not renormalized in the accelerated modes.
pub fn post_measurement_state(config: &ExperimentConfig) -> Result<Ket> {
    let st = OutcomeStates::for_config(config)?;
    compose_state(config, &st)
}

fn compose_state(config: &ExperimentConfig, st: &OutcomeStates) -> Result<Ket> {
    let (s, c) = config.half_angle();
    let gg = tensor(&[&st.a_g, &st.b_g])?;
    let ee = tensor(&[&st.a_e, &st.b_e])?;
    let ge = tensor(&[&st.a_g, &st.b_e])?;
    let eg = tensor(&[&st.a_e, &st.b_g])?;
    let phi_plus = Ket::superpose(&[(FRAC_1_SQRT_2, &gg), (-FRAC_1_SQRT_2, &ee)])?;
    let psi_minus = Ket::superpose(&[(FRAC_1_SQRT_2, &ge), (FRAC_1_SQRT_2, &eg)])?;
    Ket::superpose(&[(-s, &phi_plus), (c, &psi_minus)])
}

/// `A_1, A_2, B_1, B_2`.
#[derive(Clone, Debug)]
pub struct Observables {
    pub a1: DensityOperator,
    pub a2: DensityOperator,
    pub b1: DensityOperator,
    pub b2: DensityOperator,
}

/// `(|g><g| - |e><e|, |g><e| + |e><g|)`.
fn binary_pair(g: &Ket, e: &Ket) -> Result<(DensityOperator, DensityOperator)> {
    let z = outer(g, g)?.sub(&outer(e, e)?)?;
    let x = outer(g, e)?.add(&outer(e, g)?)?;
    Ok((z, x))
}

pub fn observables(config: &ExperimentConfig) -> Result<Observables> {
    let st = OutcomeStates::for_config(config)?;
    build_observables(config, &st)
}

fn build_observables(config: &ExperimentConfig, st: &OutcomeStates) -> Result<Observables> {
    let (a1, a2) = binary_pair(&st.a_g, &st.a_e)?;
    let (b1, b2) = match (config.mode, config.bob()) {
        (Mode::AcceleratedFaithful, BobObservables::Reduced) => {
            let (g, e) = st.reduced_bob()?;
            binary_pair(&g, &e)?
        }
        _ => binary_pair(&st.b_g, &st.b_e)?,
    };
    Ok(Observables { a1, a2, b1, b2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    /// `<A1 B1>, <A1 B2>, <A2 B1>, <A2 B2>`.
    pub correlators: [f64; 4],
    pub s: f64,
}

impl ChshResult {
    fn from_correlators(correlators: [f64; 4]) -> Result<Self> {
        for (i, e) in correlators.iter().enumerate() {
            if e.is_nan() || e.abs() > 1.0 + SPECTRAL_TOL {
                return Err(Error::NumericalConsistency(format!(
                    "correlator {i} = {e} is outside [-1, 1]"
                )));
            }
        }
        let [e1, e2, e3, e4] = correlators;
        let s = (e1 + e2 + e3 - e4).abs();
        if s > 2.0 * SQRT_2 + SPECTRAL_TOL {
            return Err(Error::NumericalConsistency(format!(
                "S = {s} exceeds the Tsirelson bound"
            )));
        }
        Ok(Self { correlators, s })
    }
}

fn correlators(rho: &DensityOperator, obs: &Observables) -> Result<ChshResult> {
    let pairs = [
        (&obs.a1, &obs.b1),
        (&obs.a1, &obs.b2),
        (&obs.a2, &obs.b1),
        (&obs.a2, &obs.b2),
    ];
    let mut out = [0.0; 4];
    for (slot, (a, b)) in out.iter_mut().zip(pairs) {
        *slot = expectation(rho, &tensor_op(&[a, b])?)?;
    }
    ChshResult::from_correlators(out)
}

/// CHSH statistic `S = |<A1B1> + <A1B2> + <A2B1> - <A2B2>|`.
///
/// Inertial and compat modes evaluate on `|Psi~><Psi~|` as built (the compat
/// state is left unnormalized, as in the reference script). Faithful mode
/// trace-normalizes first; with reduced Bob observables the correlators are
/// taken on `rho^I = tr_II |Psi~><Psi~|`.
pub fn chsh(config: &ExperimentConfig) -> Result<ChshResult> {
    let st = OutcomeStates::for_config(config)?;
    let psi = compose_state(config, &st)?;
    let obs = build_observables(config, &st)?;
    match (config.mode, config.bob()) {
        (Mode::AcceleratedFaithful, BobObservables::Reduced) => {
            let rho = psi.reduced_density(&[BOB_REGION_II])?.normalize_trace()?;
            correlators(&rho, &obs)
        }
        (Mode::AcceleratedFaithful, BobObservables::Global) => {
            correlators(&outer(&psi, &psi)?.normalize_trace()?, &obs)
        }
        _ => correlators(&outer(&psi, &psi)?, &obs),
    }
}

/// CHSH statistic from a supplied region-I density operator on
/// (Alice field, C lab, Bob I, D lab). Faithful mode with reduced Bob
/// observables only; the operator is trace-normalized first.
pub fn chsh_from_density(config: &ExperimentConfig, rho_i: &DensityOperator) -> Result<ChshResult> {
    if config.mode != Mode::AcceleratedFaithful || config.bob() != BobObservables::Reduced {
        return invalid("region-I CHSH needs faithful mode with reduced Bob observables");
    }
    let obs = observables(config)?;
    let n = config.fock_dim()?;
    if rho_i.dims().as_slice() != [n, 2, n, 2] {
        return invalid(format!(
            "expected a density operator on [{n}x2x{n}x2], got {}",
            rho_i.dims()
        ));
    }
    correlators(&rho_i.normalize_trace()?, &obs)
}

#[derive(Clone, Copy)]
enum Outcome {
    G,
    E,
}

#[derive(Clone, Copy)]
enum Weight {
    SinSq,
    SinCos,
    CosSq,
}

type Term = (f64, Weight, (Outcome, Outcome), (Outcome, Outcome));

/// Closed-form expansion of `rho^I`: `(sign, weight, |A B>, <A' B'|)`.
/// The `|A_e B_e><A_e B_g|` term is `+sin cos / 2`, as the expansion of
/// `|Psi~><Psi~|` requires.
const REGION_I_TERMS: [Term; 16] = {
    use Outcome::{E, G};
    use Weight::*;
    [
        (1.0, SinSq, (G, G), (G, G)),
        (-1.0, SinSq, (G, G), (E, E)),
        (-1.0, SinCos, (G, G), (G, E)),
        (-1.0, SinCos, (G, G), (E, G)),
        (-1.0, SinSq, (E, E), (G, G)),
        (1.0, SinSq, (E, E), (E, E)),
        (1.0, SinCos, (E, E), (G, E)),
        (1.0, SinCos, (E, E), (E, G)),
        (-1.0, SinCos, (G, E), (G, G)),
        (1.0, SinCos, (G, E), (E, E)),
        (1.0, CosSq, (G, E), (G, E)),
        (1.0, CosSq, (G, E), (E, G)),
        (-1.0, SinCos, (E, G), (G, G)),
        (1.0, SinCos, (E, G), (E, E)),
        (1.0, CosSq, (E, G), (G, E)),
        (1.0, CosSq, (E, G), (E, G)),
    ]
};

/// `rho^I` assembled term by term from Alice outer products and region-II
/// traced Bob outer products, independently of the generic partial trace of
/// the full state. Unnormalized; its trace equals `<Psi~|Psi~>`.
pub fn region_i_density(config: &ExperimentConfig) -> Result<DensityOperator> {
    if config.mode != Mode::AcceleratedFaithful {
        return invalid("the region-I expansion is defined for faithful mode only");
    }
    let st = OutcomeStates::for_config(config)?;
    let (s, c) = config.half_angle();
    let alice = |o| match o {
        Outcome::G => &st.a_g,
        Outcome::E => &st.a_e,
    };
    let bob = |o| match o {
        Outcome::G => &st.b_g,
        Outcome::E => &st.b_e,
    };
    let mut rho: Option<DensityOperator> = None;
    for (sign, weight, (ka, kb), (ba, bb)) in REGION_I_TERMS {
        let w =
            sign * match weight {
                Weight::SinSq => s * s,
                Weight::SinCos => s * c,
                Weight::CosSq => c * c,
            } / 2.0;
        let a_part = outer(alice(ka), alice(ba))?;
        // Bob vectors live on (I, II, lab); factor 1 is region II
        let b_part = partial_trace(&outer(bob(kb), bob(bb))?, &[1])?;
        let term = tensor_op(&[&a_part, &b_part])?.scaled(w);
        rho = Some(match rho {
            None => term,
            Some(acc) => acc.add(&term)?,
        });
    }
    Ok(rho.expect("sixteen terms"))
}

/// Log-negativity between Alice's field mode and Bob's region-I mode for the
/// field state before the friends measure (labs in `|0>`), with region II and
/// both labs traced out. Faithful mode only.
pub fn entanglement_curve(config: &ExperimentConfig) -> Result<f64> {
    if config.mode != Mode::AcceleratedFaithful {
        return invalid("entanglement curve is defined for faithful mode only");
    }
    config.validate()?;
    let n = config.fock_dim()?;
    if n * n > MAX_DENSE_SIDE {
        return invalid(format!("truncation N = {n} is too large"));
    }
    let (s, c) = config.half_angle();
    let h = FRAC_1_SQRT_2;
    let a0 = basis_ket(n, 0)?;
    let a1 = basis_ket(n, 1)?;
    let lab = basis_ket(2, 0)?;
    let vac = vacuum_two_mode(n, config.r)?;
    let par = particle_two_mode(n, config.r)?;
    let term = |a: &Ket, b: &Ket| tensor(&[a, &lab, b, &lab]);
    let psi = Ket::superpose(&[
        (-s * h, &term(&a0, &vac)?),
        (s * h, &term(&a1, &par)?),
        (c * h, &term(&a0, &par)?),
        (c * h, &term(&a1, &vac)?),
    ])?;
    let rho = psi
        .reduced_density(&[ALICE_LAB, BOB_REGION_II, BOB_LAB])?
        .normalize_trace()?;
    log_negativity(&rho, &[0])
}

//! Dense states and operators on tensor products of finite-dimensional factors.
//!
//! Every [`Ket`] and [`DensityOperator`] carries its [`FactorDims`], so partial
//! traces and transposes work directly off the value. Flat indices are
//! row-major with the first factor most significant, which is the ordering
//! produced by the Kronecker product.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{invalid, Error, Result};

pub type C64 = Complex<f64>;

/// Tolerance for algebraic identities (hermiticity flags, trace checks).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for quantities that pass through an eigen-decomposition.
pub const SPECTRAL_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn c64(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FactorDims(Vec<usize>);

impl FactorDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return invalid("factor list is empty");
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return invalid(format!("factor {pos} has dimension 0"));
        }
        Ok(Self(dims))
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of tensor factors.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the factor dimensions.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }

    fn concat<'a>(parts: impl IntoIterator<Item = &'a FactorDims>) -> FactorDims {
        FactorDims(
            parts
                .into_iter()
                .flat_map(|d| d.0.iter().copied())
                .collect(),
        )
    }

    fn check_index(&self, factor: usize) -> Result<()> {
        if factor >= self.0.len() {
            return invalid(format!(
                "factor index {factor} out of range for {} factors",
                self.0.len()
            ));
        }
        Ok(())
    }
}

impl fmt::Display for FactorDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join("x"))
    }
}

/// Flat offsets of every multi-index over `factors`, enumerated in row-major
/// order of those factors.
fn offsets(dims: &FactorDims, factors: &[usize]) -> Vec<usize> {
    let strides = dims.strides();
    let mut out = vec![0usize];
    for &k in factors {
        let d = dims.0[k];
        let mut next = Vec::with_capacity(out.len() * d);
        for &base in &out {
            for i in 0..d {
                next.push(base + i * strides[k]);
            }
        }
        out = next;
    }
    out
}

/// Splits factor indices into (kept, discarded), validating the discard set.
fn split_factors(dims: &FactorDims, discard: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut set = BTreeSet::new();
    for &k in discard {
        dims.check_index(k)?;
        set.insert(k);
    }
    if set.len() == dims.len() {
        return invalid("cannot discard every factor");
    }
    let keep = (0..dims.len()).filter(|k| !set.contains(k)).collect();
    Ok((keep, set.into_iter().collect()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: DVector<C64>,
    dims: FactorDims,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>, dims: FactorDims) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return invalid(format!(
                "{} amplitudes do not fit factor dims {dims}",
                amplitudes.len()
            ));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
            dims,
        })
    }

    pub fn from_real(amplitudes: &[f64], dims: FactorDims) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| c64(a)).collect(), dims)
    }

    pub fn dims(&self) -> &FactorDims {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < ALGEBRAIC_TOL
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<C64> {
        if self.dims != other.dims {
            return invalid(format!(
                "inner product between dims {} and {}",
                self.dims, other.dims
            ));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn scaled(&self, factor: f64) -> Ket {
        Ket {
            amplitudes: &self.amplitudes * c64(factor),
            dims: self.dims.clone(),
        }
    }

    /// Real-weighted sum `sum_i w_i |k_i>`; all kets must share dims.
    pub fn superpose(terms: &[(f64, &Ket)]) -> Result<Ket> {
        let Some((_, first)) = terms.first() else {
            return invalid("superposition of zero terms");
        };
        let dims = first.dims.clone();
        let mut acc = DVector::zeros(dims.total());
        for (w, k) in terms {
            if k.dims != dims {
                return invalid(format!("superposing dims {} with {dims}", k.dims));
            }
            acc.axpy(c64(*w), &k.amplitudes, c64(1.0));
        }
        Ok(Ket {
            amplitudes: acc,
            dims,
        })
    }

    /// Reduced density operator `tr_discard |self><self|`, computed without
    /// forming the full outer product.
    pub fn reduced_density(&self, discard: &[usize]) -> Result<DensityOperator> {
        let (keep, disc) = split_factors(&self.dims, discard)?;
        let keep_off = offsets(&self.dims, &keep);
        let disc_off = offsets(&self.dims, &disc);
        let m = DMatrix::from_fn(keep_off.len(), disc_off.len(), |i, e| {
            self.amplitudes[keep_off[i] + disc_off[e]]
        });
        let dims = FactorDims(keep.iter().map(|&k| self.dims.0[k]).collect());
        Ok(DensityOperator {
            matrix: &m * m.adjoint(),
            dims,
            hermitian: true,
        })
    }

    /// Schmidt rank across the cut between factors `[0, split)` and
    /// `[split, len)`. Singular values at or below `tol * sigma_max` count as zero.
    pub fn schmidt_rank(&self, split: usize, tol: f64) -> Result<usize> {
        if split == 0 || split >= self.dims.len() {
            return invalid(format!(
                "cut position {split} must lie strictly inside {} factors",
                self.dims.len()
            ));
        }
        let left: usize = self.dims.0[..split].iter().product();
        let right: usize = self.dims.0[split..].iter().product();
        let m = DMatrix::from_row_slice(left, right, self.amplitudes.as_slice());
        let sv = m.singular_values();
        let max = sv.max();
        if max == 0.0 {
            return Ok(0);
        }
        Ok(sv.iter().filter(|&&s| s > tol * max).count())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    dims: FactorDims,
    hermitian: bool,
}

impl DensityOperator {
    /// Wraps a square matrix. The hermitian flag is set when the matrix is
    /// hermitian to [`ALGEBRAIC_TOL`].
    pub fn new(matrix: DMatrix<C64>, dims: FactorDims) -> Result<Self> {
        let side = dims.total();
        if matrix.nrows() != side || matrix.ncols() != side {
            return invalid(format!(
                "matrix is {}x{}, factor dims {dims} need {side}x{side}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let hermitian = max_hermitian_deviation(&matrix) < ALGEBRAIC_TOL;
        Ok(Self {
            matrix,
            dims,
            hermitian,
        })
    }

    pub fn identity(dims: FactorDims) -> Self {
        let n = dims.total();
        Self {
            matrix: DMatrix::identity(n, n),
            dims,
            hermitian: true,
        }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &FactorDims {
        &self.dims
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let n = self.side();
        let mut acc = c64(0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * self.matrix[(j, i)];
            }
        }
        acc.re
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        max_hermitian_deviation(&self.matrix)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * c64(factor),
            dims: self.dims.clone(),
            hermitian: self.hermitian,
        }
    }

    /// Rescales so the trace is exactly one.
    pub fn normalize_trace(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.im.abs() > SPECTRAL_TOL {
            return Err(Error::NumericalConsistency(format!(
                "trace has imaginary part {}",
                tr.im
            )));
        }
        if tr.re.abs() < 1e-15 {
            return Err(Error::DegenerateInput("operator has zero trace".into()));
        }
        Ok(self.scaled(1.0 / tr.re))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other, "sum")?;
        Self::new(&self.matrix + &other.matrix, self.dims.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other, "difference")?;
        Self::new(&self.matrix - &other.matrix, self.dims.clone())
    }

    /// Operator product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_dims(other, "product")?;
        Self::new(&self.matrix * &other.matrix, self.dims.clone())
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if ket.dims != self.dims {
            return invalid(format!(
                "operator on {} applied to ket on {}",
                self.dims, ket.dims
            ));
        }
        Ok(Ket {
            amplitudes: &self.matrix * &ket.amplitudes,
            dims: self.dims.clone(),
        })
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_dims(other, "distance")?;
        Ok((&self.matrix - &other.matrix).norm())
    }

    /// Real eigenvalues of a hermitian operator, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return invalid("eigenvalues requested for a non-hermitian operator");
        }
        let mut ev: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    fn check_same_dims(&self, other: &Self, what: &str) -> Result<()> {
        if self.dims != other.dims {
            return invalid(format!(
                "{what} of operators on {} and {}",
                self.dims, other.dims
            ));
        }
        Ok(())
    }
}

fn max_hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Fock basis vector `|n>` in a single factor of dimension `dim`.
pub fn basis_ket(dim: usize, n: usize) -> Result<Ket> {
    if n >= dim {
        return invalid(format!("occupation {n} outside dimension {dim}"));
    }
    let mut amps = vec![c64(0.0); dim];
    amps[n] = c64(1.0);
    Ket::new(amps, FactorDims::single(dim)?)
}

/// Kronecker product in list order.
pub fn tensor(kets: &[&Ket]) -> Result<Ket> {
    let Some((first, rest)) = kets.split_first() else {
        return invalid("tensor product of an empty list");
    };
    let mut amps = first.amplitudes.clone();
    for k in rest {
        amps = amps.kronecker(&k.amplitudes);
    }
    Ok(Ket {
        amplitudes: amps,
        dims: FactorDims::concat(kets.iter().map(|k| &k.dims)),
    })
}

pub fn tensor_op(ops: &[&DensityOperator]) -> Result<DensityOperator> {
    let Some((first, rest)) = ops.split_first() else {
        return invalid("tensor product of an empty list");
    };
    let mut m = first.matrix.clone();
    for op in rest {
        m = m.kronecker(&op.matrix);
    }
    Ok(DensityOperator {
        matrix: m,
        dims: FactorDims::concat(ops.iter().map(|o| &o.dims)),
        hermitian: ops.iter().all(|o| o.hermitian),
    })
}

/// `|a><b|`. Flagged hermitian only when `a == b`.
pub fn outer(a: &Ket, b: &Ket) -> Result<DensityOperator> {
    if a.dims != b.dims {
        return invalid(format!("outer product of dims {} and {}", a.dims, b.dims));
    }
    Ok(DensityOperator {
        matrix: &a.amplitudes * b.amplitudes.adjoint(),
        dims: a.dims.clone(),
        hermitian: a == b,
    })
}

/// Traces out the factors listed in `discard`; remaining factors keep their order.
pub fn partial_trace(rho: &DensityOperator, discard: &[usize]) -> Result<DensityOperator> {
    let (keep, disc) = split_factors(&rho.dims, discard)?;
    let keep_off = offsets(&rho.dims, &keep);
    let disc_off = offsets(&rho.dims, &disc);
    let n = keep_off.len();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let (ri, rj) = (keep_off[i], keep_off[j]);
        disc_off
            .iter()
            .map(|&e| rho.matrix[(ri + e, rj + e)])
            .sum::<C64>()
    });
    Ok(DensityOperator {
        matrix,
        dims: FactorDims(keep.iter().map(|&k| rho.dims.0[k]).collect()),
        hermitian: rho.hermitian,
    })
}

/// Real part of `tr(rho * obs)`; the imaginary part must vanish to [`SPECTRAL_TOL`].
pub fn expectation(rho: &DensityOperator, obs: &DensityOperator) -> Result<f64> {
    if rho.side() != obs.side() {
        return invalid(format!(
            "state of side {} against observable of side {}",
            rho.side(),
            obs.side()
        ));
    }
    if !obs.hermitian {
        return invalid("observable is not hermitian");
    }
    let n = rho.side();
    let mut acc = c64(0.0);
    for i in 0..n {
        for j in 0..n {
            acc += rho.matrix[(i, j)] * obs.matrix[(j, i)];
        }
    }
    if acc.im.abs() > SPECTRAL_TOL {
        return Err(Error::NumericalConsistency(format!(
            "expectation value has imaginary part {:e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

pub fn normalize(psi: &Ket) -> Result<Ket> {
    let norm = psi.norm();
    if norm <= 1e-15 {
        return Err(Error::DegenerateInput(format!(
            "cannot normalize a vector of norm {norm:e}"
        )));
    }
    Ok(psi.scaled(1.0 / norm))
}

pub fn partial_transpose(rho: &DensityOperator, factor: usize) -> Result<DensityOperator> {
    partial_transpose_set(rho, &[factor])
}

/// Transposes the indices of every factor in `factors` at once.
pub fn partial_transpose_set(rho: &DensityOperator, factors: &[usize]) -> Result<DensityOperator> {
    let dims = &rho.dims;
    let mut set = BTreeSet::new();
    for &k in factors {
        dims.check_index(k)?;
        set.insert(k);
    }
    let strides = dims.strides();
    let n = rho.side();
    let mut out = DMatrix::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            let (mut r2, mut c2) = (row, col);
            for &k in &set {
                let rk = (row / strides[k]) % dims.0[k];
                let ck = (col / strides[k]) % dims.0[k];
                r2 = r2 - rk * strides[k] + ck * strides[k];
                c2 = c2 - ck * strides[k] + rk * strides[k];
            }
            out[(r2, c2)] = rho.matrix[(row, col)];
        }
    }
    Ok(DensityOperator {
        matrix: out,
        dims: dims.clone(),
        hermitian: rho.hermitian,
    })
}

/// `log2 || rho^{T_partition} ||_1`, with the trace norm taken as the sum of
/// absolute eigenvalues of the (hermitian) partial transpose.
pub fn log_negativity(rho: &DensityOperator, partition: &[usize]) -> Result<f64> {
    if !rho.hermitian {
        return invalid("log-negativity needs a hermitian operator");
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > SPECTRAL_TOL || tr.im.abs() > SPECTRAL_TOL {
        return invalid(format!("log-negativity needs unit trace, got {tr}"));
    }
    let pt = partial_transpose_set(rho, partition)?;
    let trace_norm: f64 = pt.eigenvalues()?.iter().map(|l| l.abs()).sum();
    Ok(trace_norm.log2().max(0.0))
}

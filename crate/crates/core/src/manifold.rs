//! Linear-algebra substrate: Haar orthogonal sampling, simplex spectra, and
//! unit-Frobenius symmetric index matrices.
//!
//! An index matrix is stored together with its eigen-factorization
//! `B = V diag(gamma^{1/2}) V^T` whenever it was built from one: sampler
//! moves act on the factors while risk evaluation reads the dense form.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::seed::Rng;

/// Tolerance for orthogonality and symmetry checks.
pub const ORTHO_TOL: f64 = 1e-9;
/// Tolerance for simplex normalization checks.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A `d x d` orthogonal matrix; columns are eigenvector candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalFactor {
    v: DMatrix<f64>,
}

impl OrthogonalFactor {
    /// Wraps a matrix after checking `V^T V = I` entrywise within 1e-9.
    pub fn new(v: DMatrix<f64>) -> Result<Self> {
        if v.nrows() != v.ncols() || v.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "orthogonal factor must be square and nonempty, got {}x{}",
                v.nrows(),
                v.ncols()
            )));
        }
        let gram = v.transpose() * &v;
        let d = v.nrows();
        let dev = max_abs_dev_from_identity(&gram);
        if dev > ORTHO_TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix is not orthogonal: max |V^T V - I| = {dev:.3e} (d = {d})"
            )));
        }
        Ok(Self { v })
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.v
    }

    /// Column `i` as a vector.
    pub fn column(&self, i: usize) -> DVector<f64> {
        self.v.column(i).into_owned()
    }

    /// Max deviation of `V^T V` from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        max_abs_dev_from_identity(&(self.v.transpose() * &self.v))
    }
}

fn max_abs_dev_from_identity(m: &DMatrix<f64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((m[(i, j)] - target).abs());
        }
    }
    dev
}

/// Nonnegative spectrum weights summing to one (squared eigenvalues of an
/// index matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSimplex {
    gamma: Vec<f64>,
}

impl SpectrumSimplex {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() {
            return Err(Error::InvalidDimension("empty spectrum".into()));
        }
        if gamma.iter().any(|&g| g < 0.0 || !g.is_finite()) {
            return Err(Error::InvalidParameter(
                "spectrum weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = gamma.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidParameter(format!(
                "spectrum weights must sum to 1, got {sum:.17}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.gamma
    }

    /// Eigenvalues of the assembled matrix: entrywise square roots.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.gamma.iter().map(|g| g.sqrt()).collect()
    }
}

/// Symmetric `d x d` matrix with unit Frobenius norm, optionally carrying
/// the factorization it was assembled from.
#[derive(Debug, Clone)]
pub struct IndexMatrix {
    b: DMatrix<f64>,
    factors: Option<(OrthogonalFactor, SpectrumSimplex)>,
}

impl IndexMatrix {
    /// Wraps a dense matrix after checking symmetry and unit norm.
    pub fn from_dense(b: DMatrix<f64>) -> Result<Self> {
        if b.nrows() != b.ncols() || b.nrows() == 0 {
            return Err(Error::InvalidDimension(format!(
                "index matrix must be square and nonempty, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        let sym = symmetry_defect(&b);
        if sym > ORTHO_TOL {
            return Err(Error::InvalidParameter(format!(
                "index matrix is not symmetric: max |B - B^T| = {sym:.3e}"
            )));
        }
        let norm = b.norm();
        if (norm - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidParameter(format!(
                "index matrix must have unit Frobenius norm, got {norm:.12}"
            )));
        }
        Ok(Self { b, factors: None })
    }

    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn dense(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn factors(&self) -> Option<&(OrthogonalFactor, SpectrumSimplex)> {
        self.factors.as_ref()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.b.norm()
    }

    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.b)
    }
}

fn symmetry_defect(b: &DMatrix<f64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..b.nrows() {
        for j in (i + 1)..b.ncols() {
            dev = dev.max((b[(i, j)] - b[(j, i)]).abs());
        }
    }
    dev
}

/// Haar-distributed orthogonal matrix: QR of a standard Gaussian matrix with
/// the R diagonal signs folded into Q.
///
/// The sign correction makes the factorization unique (positive R diagonal),
/// which is what turns the raw QR output into an exactly Haar-distributed Q.
pub fn sample_haar_orthogonal(d: usize, rng: &mut Rng) -> Result<OrthogonalFactor> {
    if d == 0 {
        return Err(Error::InvalidDimension(
            "orthogonal sampling requires d >= 1".into(),
        ));
    }
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    OrthogonalFactor::new(q)
}

/// Dirichlet draw via normalized Gamma variates. Valid for any positive
/// shapes, including the sub-unit shapes `alpha_i = 1/d` the low-rank prior
/// uses. Components that underflow to zero are kept (the assembled matrix
/// just drops rank).
pub fn sample_dirichlet(alpha: &[f64], rng: &mut Rng) -> Result<SpectrumSimplex> {
    if alpha.is_empty() {
        return Err(Error::InvalidDimension("empty Dirichlet parameter".into()));
    }
    if alpha.iter().any(|&a| a <= 0.0 || !a.is_finite()) {
        return Err(Error::InvalidParameter(
            "Dirichlet parameters must be positive".into(),
        ));
    }
    if alpha.len() == 1 {
        return SpectrumSimplex::new(vec![1.0]);
    }
    let mut draws = Vec::with_capacity(alpha.len());
    let mut sum = 0.0;
    for &a in alpha {
        let g = Gamma::new(a, 1.0)
            .map_err(|e| Error::InvalidParameter(format!("gamma sampler: {e}")))?;
        let x: f64 = g.sample(rng);
        draws.push(x);
        sum += x;
    }
    if sum <= 0.0 {
        // All components underflowed (possible only for extreme shapes):
        // the conditional law concentrates on a random vertex.
        let k = rng.random_range(0..alpha.len());
        let mut gamma = vec![0.0; alpha.len()];
        gamma[k] = 1.0;
        return SpectrumSimplex::new(gamma);
    }
    for x in &mut draws {
        *x /= sum;
    }
    SpectrumSimplex::new(draws)
}

/// `B = V diag(gamma^{1/2}) V^T`; unit Frobenius norm follows from the
/// simplex constraint on `gamma`.
pub fn assemble_index_matrix(v: OrthogonalFactor, gamma: SpectrumSimplex) -> Result<IndexMatrix> {
    if v.dim() != gamma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "orthogonal factor is {}x{} but spectrum has length {}",
            v.dim(),
            v.dim(),
            gamma.dim()
        )));
    }
    let b = assemble_dense(v.matrix(), gamma.weights());
    Ok(IndexMatrix {
        b,
        factors: Some((v, gamma)),
    })
}

/// Dense `V diag(gamma^{1/2}) V^T` without consuming the factors.
pub fn assemble_dense(v: &DMatrix<f64>, gamma: &[f64]) -> DMatrix<f64> {
    let d = v.nrows();
    let mut scaled = v.clone();
    for (j, &g) in gamma.iter().enumerate() {
        let s = g.sqrt();
        for i in 0..d {
            scaled[(i, j)] *= s;
        }
    }
    let mut b = &scaled * v.transpose();
    // Exact symmetrization kills rounding asymmetry from the matrix product.
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (b[(i, j)] + b[(j, i)]);
            b[(i, j)] = avg;
            b[(j, i)] = avg;
        }
    }
    b
}

/// Trace inner product `<X, B> = trace(XB)`.
pub fn trace_inner(x: &DMatrix<f64>, b: &IndexMatrix) -> Result<f64> {
    if x.nrows() != b.dim() || x.ncols() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "X is {}x{} but B is {}x{}",
            x.nrows(),
            x.ncols(),
            b.dim(),
            b.dim()
        )));
    }
    Ok(frobenius_inner(x, b.dense()))
}

/// `sum_ij X_ij B_ji`, which for our symmetric matrices equals the
/// elementwise Frobenius inner product.
pub fn frobenius_inner(x: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            acc += x[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Number of entries strictly above `eps`.
pub fn effective_rank(values: &[f64], eps: f64) -> usize {
    assert!(
        (0.0..1.0).contains(&eps),
        "effective rank threshold must lie in [0, 1)"
    );
    values.iter().filter(|&&v| v > eps).count()
}

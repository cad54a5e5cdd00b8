//! The approximation space for link functions: a countable dictionary of
//! bounded functions on [-1, 1], finite expansions with a weighted-l1
//! budget, and the Sobolev ellipsoid membership test.
//!
//! Only the non-normalized trigonometric system ships: `phi_1 = 1`,
//! `phi_{2j}(t) = cos(pi j t)`, `phi_{2j+1}(t) = sin(pi j t)`. Each element
//! maps [-1, 1] into [-1, 1] and `|phi_j'| <= j * C_phi`.

use crate::error::{Error, Result};

/// Slack for weighted-l1 budget membership checks.
pub const BUDGET_TOL: f64 = 1e-12;

/// Dictionary family. A closed enumeration: the trigonometric system is the
/// only member, but every evaluation goes through this type so that a new
/// family only has to be added here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasisKind {
    #[default]
    Trigonometric,
}

/// A concrete dictionary with its derivative constant.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dictionary {
    kind: BasisKind,
}

impl Dictionary {
    pub fn trigonometric() -> Self {
        Self {
            kind: BasisKind::Trigonometric,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Derivative constant `C_phi` with `|phi_j'| <= j * C_phi`.
    pub fn c_phi(&self) -> f64 {
        match self.kind {
            BasisKind::Trigonometric => std::f64::consts::PI,
        }
    }

    /// Evaluates `phi_j(t)` for `j >= 1`, `t` in [-1, 1].
    pub fn eval_basis(&self, j: usize, t: f64) -> Result<f64> {
        if j == 0 {
            return Err(Error::InvalidParameter(
                "dictionary indices start at 1".into(),
            ));
        }
        check_domain(t)?;
        Ok(self.eval_basis_unchecked(j, t))
    }

    /// Basis evaluation without the domain check, for hot loops whose inputs
    /// are already guaranteed to lie in [-1, 1].
    #[inline]
    pub fn eval_basis_unchecked(&self, j: usize, t: f64) -> f64 {
        match self.kind {
            BasisKind::Trigonometric => {
                if j == 1 {
                    1.0
                } else {
                    let freq = (j / 2) as f64;
                    let arg = std::f64::consts::PI * freq * t;
                    if j.is_multiple_of(2) {
                        arg.cos()
                    } else {
                        arg.sin()
                    }
                }
            }
        }
    }
}

fn check_domain(t: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "dictionary argument {t} outside [-1, 1]"
        )));
    }
    Ok(())
}

/// A finite dictionary expansion `f = sum_j beta_j phi_j` with model
/// dimension `M = beta.len()` and weighted-l1 budget `sum_j j |beta_j| <=
/// budget`.
///
/// The trailing coefficient may be exactly zero (a measure-zero event under
/// every sampler here); the *active* dimension then re-labels the function
/// by its largest nonzero index.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkFunction {
    beta: Vec<f64>,
    budget: f64,
}

impl LinkFunction {
    pub fn new(beta: Vec<f64>, budget: f64) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidDimension(
                "link function needs at least one coefficient".into(),
            ));
        }
        if !budget.is_finite() || budget <= 0.0 {
            return Err(Error::InvalidParameter(
                "weighted-l1 budget must be positive".into(),
            ));
        }
        let norm = weighted_l1(&beta);
        if norm > budget + BUDGET_TOL {
            return Err(Error::InvalidParameter(format!(
                "weighted-l1 norm {norm} exceeds budget {budget}"
            )));
        }
        Ok(Self { beta, budget })
    }

    /// Model dimension `M` (the formal expansion length).
    pub fn model_dimension(&self) -> usize {
        self.beta.len()
    }

    /// Largest index with a nonzero coefficient; 0 for the zero function.
    pub fn active_dimension(&self) -> usize {
        self.beta
            .iter()
            .rposition(|&b| b != 0.0)
            .map_or(0, |i| i + 1)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.beta
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// `sum_j j |beta_j|`.
    pub fn weighted_l1_norm(&self) -> f64 {
        weighted_l1(&self.beta)
    }

    /// `sum_j |beta_j|`, an upper bound for the sup norm.
    pub fn sup_norm_bound(&self) -> f64 {
        self.beta.iter().map(|b| b.abs()).sum()
    }

    /// Evaluates the expansion at `t` in [-1, 1].
    pub fn eval(&self, dict: &Dictionary, t: f64) -> Result<f64> {
        check_domain(t)?;
        Ok(self.eval_unchecked(dict, t))
    }

    #[inline]
    pub fn eval_unchecked(&self, dict: &Dictionary, t: f64) -> f64 {
        self.beta
            .iter()
            .enumerate()
            .map(|(i, &b)| b * dict.eval_basis_unchecked(i + 1, t))
            .sum()
    }

    /// Membership in the Sobolev ellipsoid `sum_j j^{2k} beta_j^2 <= radius`.
    pub fn in_sobolev_ellipsoid(&self, k: u32, radius: f64) -> bool {
        sobolev_quadratic(&self.beta, k) <= radius
    }
}

/// `sum_j j |beta_j|` on a raw coefficient slice.
pub fn weighted_l1(beta: &[f64]) -> f64 {
    beta.iter()
        .enumerate()
        .map(|(i, &b)| (i + 1) as f64 * b.abs())
        .sum()
}

/// `sum_j j^{2k} beta_j^2` on a raw coefficient slice.
pub fn sobolev_quadratic(beta: &[f64], k: u32) -> f64 {
    beta.iter()
        .enumerate()
        .map(|(i, &b)| ((i + 1) as f64).powi(2 * k as i32) * b * b)
        .sum()
}

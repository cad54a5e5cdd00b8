//! Exhaustive-grid posterior oracle for tiny instances.
//!
//! For `d <= 2` and model dimension at most 2 the tempered posterior can be
//! tabulated on a product grid: the orthogonal factor reduces to a planar
//! rotation angle (uniform under Haar), the spectrum to a scalar with an
//! exact Beta marginal, and the coefficient balls to one- or
//! two-dimensional cells. Cell weights are
//! `prior mass x exp(-lambda r_n(center))`, normalized; chain estimates are
//! validated against the oracle's posterior means.

use nalgebra::DMatrix;

use crate::datagen::LabeledDataset;
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::manifold::frobenius_inner;
use crate::prior::{model_dimension_pmf, PriorConfig};
use crate::risk::ModelConstants;
use crate::special::beta_reg;

/// Hard ceiling on the total number of grid cells.
pub const MAX_CELLS: usize = 10_000_000;

/// Grid resolution settings.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Cells for the rotation angle (d = 2 only).
    pub theta_cells: usize,
    /// Cells for the spectrum scalar (d = 2 only).
    pub g_cells: usize,
    /// Cells per coefficient axis.
    pub beta_cells: usize,
    /// Sub-samples per axis when estimating the in-ball fraction of
    /// boundary cells in two coefficient dimensions.
    pub subgrid: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            theta_cells: 32,
            g_cells: 32,
            beta_cells: 64,
            subgrid: 8,
        }
    }
}

/// One grid cell with its normalized posterior weight.
#[derive(Debug, Clone)]
pub struct OracleCell {
    pub weight: f64,
    pub m: usize,
    pub beta: Vec<f64>,
    /// Rotation angle of the orthogonal factor (0 for d = 1).
    pub theta: f64,
    /// Leading spectrum weight (1 for d = 1).
    pub g: f64,
    pub emp_risk: f64,
}

/// Tabulated posterior.
#[derive(Debug, Clone)]
pub struct DiscretePosterior {
    pub d: usize,
    pub cells: Vec<OracleCell>,
}

impl DiscretePosterior {
    pub fn total_weight(&self) -> f64 {
        self.cells.iter().map(|c| c.weight).sum()
    }

    pub fn posterior_mean<F: Fn(&OracleCell) -> f64>(&self, f: F) -> f64 {
        self.cells.iter().map(|c| c.weight * f(c)).sum()
    }
}

/// Tabulates the tempered posterior on a grid. Requires `d <= 2` and
/// `prior.m_max <= 2`; refuses grids above [`MAX_CELLS`].
pub fn exact_posterior_oracle(
    data: &LabeledDataset,
    constants: &ModelConstants,
    prior: &PriorConfig,
    grid: &GridSpec,
) -> Result<DiscretePosterior> {
    if data.d > 2 {
        return Err(Error::GridOracle(format!(
            "grid oracle supports d <= 2, got d = {}",
            data.d
        )));
    }
    if prior.m_max > 2 {
        return Err(Error::GridOracle(format!(
            "grid oracle supports m_max <= 2, got {}",
            prior.m_max
        )));
    }
    if data.d != prior.d {
        return Err(Error::DimensionMismatch(
            "dataset and prior dimensions differ".into(),
        ));
    }
    if grid.theta_cells == 0 || grid.g_cells == 0 || grid.beta_cells == 0 || grid.subgrid == 0 {
        return Err(Error::GridOracle("grid resolutions must be >= 1".into()));
    }
    let pmf = model_dimension_pmf(prior);
    let beta_cells_total: usize = (1..=prior.m_max)
        .map(|m| grid.beta_cells.pow(m as u32))
        .sum();
    let matrix_cells = if data.d == 2 {
        grid.theta_cells * grid.g_cells
    } else {
        1
    };
    let total = matrix_cells.saturating_mul(beta_cells_total);
    if total > MAX_CELLS {
        return Err(Error::GridOracle(format!(
            "grid of {total} cells exceeds the {MAX_CELLS} ceiling"
        )));
    }

    let dict = Dictionary::trigonometric();
    let budget = prior.coefficient_budget();
    let lambda = constants.lambda;
    let n = data.len() as f64;

    // Matrix cells: (theta, g, mass) triples.
    let matrix_grid: Vec<(f64, f64, f64)> = if data.d == 1 {
        vec![(0.0, 1.0, 1.0)]
    } else {
        let mut cells = Vec::with_capacity(grid.theta_cells * grid.g_cells);
        let theta_mass = 1.0 / grid.theta_cells as f64;
        for a in 0..grid.theta_cells {
            let theta = (a as f64 + 0.5) * 2.0 * std::f64::consts::PI / grid.theta_cells as f64;
            for b in 0..grid.g_cells {
                let lo = b as f64 / grid.g_cells as f64;
                let hi = (b as f64 + 1.0) / grid.g_cells as f64;
                // Exact Beta marginal of the Dirichlet spectrum.
                let mass =
                    beta_reg(prior.alpha[0], prior.alpha[1], hi) - beta_reg(prior.alpha[0], prior.alpha[1], lo);
                let g = 0.5 * (lo + hi);
                cells.push((theta, g, theta_mass * mass));
            }
        }
        cells
    };

    let mut cells: Vec<OracleCell> = Vec::new();
    let mut log_weights: Vec<f64> = Vec::new();

    for &(theta, g, matrix_mass) in &matrix_grid {
        if matrix_mass <= 0.0 {
            continue;
        }
        let b = index_matrix_from(theta, g, data.d);
        // Sufficient statistics of the quadratic risk in beta:
        // r(beta) = yy - 2 h . beta + beta^T gram beta.
        let m_top = prior.m_max;
        let phis: Vec<Vec<f64>> = (1..=m_top)
            .map(|j| {
                data.xs
                    .iter()
                    .map(|x| {
                        let t = frobenius_inner(x, &b).clamp(-1.0, 1.0);
                        dict.eval_basis_unchecked(j, t)
                    })
                    .collect()
            })
            .collect();
        let yy = data.ys.iter().map(|y| y * y).sum::<f64>() / n;
        let h: Vec<f64> = phis
            .iter()
            .map(|col| col.iter().zip(&data.ys).map(|(p, y)| p * y).sum::<f64>() / n)
            .collect();
        let mut gram = vec![vec![0.0; m_top]; m_top];
        for i in 0..m_top {
            for j in 0..m_top {
                gram[i][j] =
                    phis[i].iter().zip(&phis[j]).map(|(a, c)| a * c).sum::<f64>() / n;
            }
        }
        let risk = |beta: &[f64]| -> f64 {
            let mut r = yy;
            for (i, &bi) in beta.iter().enumerate() {
                r -= 2.0 * h[i] * bi;
                for (j, &bj) in beta.iter().enumerate() {
                    r += bi * gram[i][j] * bj;
                }
            }
            r
        };

        for (m_idx, &m_mass) in pmf.iter().enumerate() {
            let m = m_idx + 1;
            match m {
                1 => {
                    let k = grid.beta_cells;
                    let cell_mass = m_mass / k as f64;
                    for c in 0..k {
                        let b1 = -budget + (c as f64 + 0.5) * 2.0 * budget / k as f64;
                        let r = risk(&[b1]);
                        cells.push(OracleCell {
                            weight: 0.0,
                            m,
                            beta: vec![b1],
                            theta,
                            g,
                            emp_risk: r,
                        });
                        log_weights.push((matrix_mass * cell_mass).ln() - lambda * r);
                    }
                }
                2 => {
                    // Bounding box [-budget, budget] x [-budget/2, budget/2].
                    let k = grid.beta_cells;
                    let w1 = 2.0 * budget / k as f64;
                    let w2 = budget / k as f64;
                    let ball_volume = budget * budget; // (2*budget)^2 / (2!)^2
                    let sub = grid.subgrid;
                    for c1 in 0..k {
                        let b1 = -budget + (c1 as f64 + 0.5) * w1;
                        for c2 in 0..k {
                            let b2 = -budget / 2.0 + (c2 as f64 + 0.5) * w2;
                            let frac = in_ball_fraction(b1, b2, w1, w2, budget, sub);
                            if frac == 0.0 {
                                continue;
                            }
                            let cell_mass = m_mass * frac * w1 * w2 / ball_volume;
                            let r = risk(&[b1, b2]);
                            cells.push(OracleCell {
                                weight: 0.0,
                                m,
                                beta: vec![b1, b2],
                                theta,
                                g,
                                emp_risk: r,
                            });
                            log_weights.push((matrix_mass * cell_mass).ln() - lambda * r);
                        }
                    }
                }
                _ => unreachable!("m_max <= 2"),
            }
        }
    }

    // Normalize in log space.
    let max_lw = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (cell, &lw) in cells.iter_mut().zip(&log_weights) {
        cell.weight = (lw - max_lw).exp();
        total += cell.weight;
    }
    for cell in &mut cells {
        cell.weight /= total;
    }
    Ok(DiscretePosterior { d: data.d, cells })
}

/// Fraction of the rectangle centered at `(b1, b2)` inside the weighted
/// ball `|x| + 2|y| <= budget`, estimated on a subgrid of cell centers.
fn in_ball_fraction(b1: f64, b2: f64, w1: f64, w2: f64, budget: f64, sub: usize) -> f64 {
    // Quick accept/reject via the cell corners.
    let corner_norm = |dx: f64, dy: f64| (b1 + dx).abs() + 2.0 * (b2 + dy).abs();
    let half1 = w1 / 2.0;
    let half2 = w2 / 2.0;
    let max_corner = corner_norm(half1.copysign(b1), half2.copysign(b2));
    if max_corner <= budget {
        return 1.0;
    }
    let min_corner = corner_norm(-half1.copysign(b1), -half2.copysign(b2));
    if min_corner > budget {
        return 0.0;
    }
    let mut hits = 0usize;
    for i in 0..sub {
        let x = b1 - half1 + (i as f64 + 0.5) * w1 / sub as f64;
        for j in 0..sub {
            let y = b2 - half2 + (j as f64 + 0.5) * w2 / sub as f64;
            if x.abs() + 2.0 * y.abs() <= budget {
                hits += 1;
            }
        }
    }
    hits as f64 / (sub * sub) as f64
}

/// Dense index matrix for the planar parameterization: for d = 2,
/// `B = sqrt(g) u u^T + sqrt(1-g) u_perp u_perp^T` with
/// `u = (cos theta, sin theta)`; for d = 1 the single unit matrix.
pub fn index_matrix_from(theta: f64, g: f64, d: usize) -> DMatrix<f64> {
    match d {
        1 => DMatrix::from_element(1, 1, 1.0),
        2 => {
            let (s, c) = theta.sin_cos();
            let l1 = g.sqrt();
            let l2 = (1.0 - g).sqrt();
            let mut b = DMatrix::zeros(2, 2);
            b[(0, 0)] = l1 * c * c + l2 * s * s;
            b[(1, 1)] = l1 * s * s + l2 * c * c;
            b[(0, 1)] = (l1 - l2) * c * s;
            b[(1, 0)] = b[(0, 1)];
            b
        }
        _ => panic!("planar parameterization is for d <= 2"),
    }
}

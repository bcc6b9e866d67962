//! Smooth dual of the reduced `λ1 = 0` proximal problem.
//!
//! For `u > 0` the reduced problem `min_{x ≥ 0} ½‖x − u‖² + λ2 Σ w_i‖x_{G_i}‖`
//! is written as a saddle problem over `x ≥ 0` and `Y ∈ Ω`, where column `i`
//! of `Y` is supported on `G_i` with `‖Y^i‖ ≤ λ2 w_i`. Eliminating `x`
//! (`x = max(u − Ye, 0)`) leaves `min_{Y ∈ Ω} ω(Y)`, a smooth convex problem
//! whose gradient is `−x eᵀ` restricted to each column's support.
//!
//! Only the supported entries of `Y` are stored: one block of length `|G_i|`
//! per group, laid out back to back.

use serde::{Deserialize, Serialize};

use crate::error::{OglError, Result};
use crate::group_model::{group_norm, GroupStructure};
use crate::momentum::Momentum;

/// Supported entries of a `p × g` matrix whose column `i` lives on `G_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualVariable {
    values: Vec<f64>,
    offsets: Vec<usize>,
}

impl DualVariable {
    pub fn zeros(gs: &GroupStructure) -> Self {
        let mut offsets = Vec::with_capacity(gs.len() + 1);
        offsets.push(0);
        for g in gs.groups() {
            offsets.push(offsets[offsets.len() - 1] + g.len());
        }
        Self {
            values: vec![0.0; gs.nnz()],
            offsets,
        }
    }

    /// Builds a dual variable from one block per group.
    pub fn from_blocks(blocks: Vec<Vec<f64>>, gs: &GroupStructure) -> Result<Self> {
        if blocks.len() != gs.len() {
            return Err(OglError::DimensionMismatch {
                what: "dual blocks vs. groups",
                expected: gs.len(),
                got: blocks.len(),
            });
        }
        let mut y = Self::zeros(gs);
        for (i, b) in blocks.iter().enumerate() {
            if b.len() != gs.group(i).len() {
                return Err(OglError::DimensionMismatch {
                    what: "dual block length vs. group size",
                    expected: gs.group(i).len(),
                    got: b.len(),
                });
            }
            y.block_mut(i).copy_from_slice(b);
        }
        Ok(y)
    }

    pub fn num_groups(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn block(&self, i: usize) -> &[f64] {
        &self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        self.offsets.windows(2).map(|w| &self.values[w[0]..w[1]])
    }

    /// All stored entries, group after group.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius distance to another variable of the same shape.
    pub fn distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `a·self + b·other`, elementwise.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            offsets: self.offsets.clone(),
        }
    }

    fn matches(&self, gs: &GroupStructure) -> bool {
        self.num_groups() == gs.len()
            && gs
                .groups()
                .iter()
                .enumerate()
                .all(|(i, g)| self.offsets[i + 1] - self.offsets[i] == g.len())
    }

    fn check(&self, gs: &GroupStructure) -> Result<()> {
        if self.matches(gs) {
            Ok(())
        } else {
            Err(OglError::DimensionMismatch {
                what: "dual variable shape vs. group structure",
                expected: gs.nnz(),
                got: self.values.len(),
            })
        }
    }
}

/// Row sums `Ye`, accumulated in ascending group order.
pub fn row_sums(y: &DualVariable, gs: &GroupStructure) -> Vec<f64> {
    let mut r = vec![0.0; gs.p()];
    for (grp, blk) in gs.groups().iter().zip(y.blocks()) {
        for (&j, &v) in grp.iter().zip(blk) {
            r[j] += v;
        }
    }
    r
}

fn check_u(u: &[f64], gs: &GroupStructure) -> Result<()> {
    if u.len() != gs.p() {
        return Err(OglError::DimensionMismatch {
            what: "u vs. feature count",
            expected: gs.p(),
            got: u.len(),
        });
    }
    Ok(())
}

/// Euclidean projection onto `Ω`: each column is scaled by
/// `min(1, λ2 w_i / ‖Y^i‖)`.
pub fn project_omega(y: &DualVariable, gs: &GroupStructure, lambda2: f64) -> DualVariable {
    let mut out = y.clone();
    project_in_place(&mut out, gs, lambda2);
    out
}

pub(crate) fn project_in_place(y: &mut DualVariable, gs: &GroupStructure, lambda2: f64) {
    for (i, &w) in gs.weights().iter().enumerate() {
        let bound = lambda2 * w;
        let blk = y.block_mut(i);
        let norm = blk.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > bound {
            let scale = bound / norm;
            blk.iter_mut().for_each(|v| *v *= scale);
        }
    }
}

fn clamp_primal(u: &[f64], rs: &[f64]) -> Vec<f64> {
    u.iter().zip(rs).map(|(a, b)| (a - b).max(0.0)).collect()
}

fn omega_from_parts(u: &[f64], rs: &[f64], x: &[f64]) -> f64 {
    let mut quad = 0.0;
    let mut lin = 0.0;
    for ((&xi, &ui), &ri) in x.iter().zip(u).zip(rs) {
        quad += (xi - ui) * (xi - ui);
        lin += xi * ri;
    }
    -(0.5 * quad + lin)
}

/// `x = max(u − Ye, 0)`, the minimizer of the saddle function for fixed `Y`.
pub fn primal_from_dual(y: &DualVariable, gs: &GroupStructure, u: &[f64]) -> Result<Vec<f64>> {
    check_u(u, gs)?;
    y.check(gs)?;
    Ok(clamp_primal(u, &row_sums(y, gs)))
}

/// `ω(Y) = −[½‖x − u‖² + ⟨x, Ye⟩]` with `x = max(u − Ye, 0)`.
pub fn omega_value(y: &DualVariable, gs: &GroupStructure, u: &[f64]) -> Result<f64> {
    check_u(u, gs)?;
    y.check(gs)?;
    let rs = row_sums(y, gs);
    let x = clamp_primal(u, &rs);
    Ok(omega_from_parts(u, &rs, &x))
}

/// `ω′(Y) = −x eᵀ`, kept only on each column's support.
pub fn omega_gradient(y: &DualVariable, gs: &GroupStructure, u: &[f64]) -> Result<DualVariable> {
    let x = primal_from_dual(y, gs, u)?;
    Ok(gradient_from_primal(&x, gs))
}

fn gradient_from_primal(x: &[f64], gs: &GroupStructure) -> DualVariable {
    let mut g = DualVariable::zeros(gs);
    for (i, grp) in gs.groups().iter().enumerate() {
        for (slot, &j) in g.block_mut(i).iter_mut().zip(grp) {
            *slot = -x[j];
        }
    }
    g
}

const GAP_FEASIBILITY_SLACK: f64 = 1e-12;
const GAP_NEGATIVE_CLAMP: f64 = 1e-14;

/// Duality gap `Σ_i (λ2 w_i‖x̃_{G_i}‖ − ⟨x̃_{G_i}, Ỹ^i⟩)` of a feasible pair.
///
/// Each term is nonnegative by Cauchy–Schwarz; rounding noise below
/// `1e-14` (relative to the penalty part) is clamped to zero.
pub fn duality_gap(
    x_tilde: &[f64],
    y_tilde: &DualVariable,
    gs: &GroupStructure,
    lambda2: f64,
) -> Result<f64> {
    check_u(x_tilde, gs)?;
    y_tilde.check(gs)?;
    let mut penalty = 0.0;
    let mut gap = 0.0;
    let mut worst = (0usize, f64::INFINITY);
    for (i, (grp, &w)) in gs.groups().iter().zip(gs.weights()).enumerate() {
        let blk = y_tilde.block(i);
        let bound = lambda2 * w;
        let ynorm = blk.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ynorm > bound + GAP_FEASIBILITY_SLACK * bound.max(1.0) {
            return Err(OglError::InfeasibleDual {
                group: i,
                norm: ynorm,
                bound,
            });
        }
        let pen = bound * group_norm(x_tilde, grp);
        let term = pen
            - grp
                .iter()
                .zip(blk)
                .map(|(&j, &v)| x_tilde[j] * v)
                .sum::<f64>();
        if term < worst.1 {
            worst = (i, term);
        }
        penalty += pen;
        gap += term;
    }
    if gap >= 0.0 {
        Ok(gap)
    } else if gap >= -GAP_NEGATIVE_CLAMP * penalty.max(1.0) {
        Ok(0.0)
    } else {
        let i = worst.0;
        Err(OglError::InfeasibleDual {
            group: i,
            norm: y_tilde.block(i).iter().map(|v| v * v).sum::<f64>().sqrt(),
            bound: lambda2 * gs.weights()[i],
        })
    }
}

/// Outcome of [`solve_dual`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolveReport {
    pub gap: f64,
    pub iterations: usize,
    pub final_step_l: f64,
    pub converged: bool,
    /// Gap after each iteration, starting with the initial point.
    pub gap_trace: Vec<f64>,
}

/// Result of a dual solve: best dual iterate, its primal point, and the report.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub y: DualVariable,
    pub x: Vec<f64>,
    pub report: DualSolveReport,
}

/// Accelerated projected gradient on `ω` over `Ω` with backtracking on the
/// step constant. Stops once the duality gap is at most `gap_tol`; if
/// `max_iter` runs out first, the best-gap iterate is returned with
/// `converged = false`.
pub fn solve_dual(
    u: &[f64],
    gs: &GroupStructure,
    lambda2: f64,
    gap_tol: f64,
    max_iter: usize,
    warm_y: Option<DualVariable>,
) -> Result<DualSolution> {
    check_u(u, gs)?;
    if gap_tol.is_nan() || gap_tol <= 0.0 {
        return Err(OglError::InvalidParameter(format!(
            "gap tolerance must be positive, got {gap_tol}"
        )));
    }
    if let Some((j, &v)) = u
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
    {
        return Err(OglError::InvalidParameter(format!(
            "reduced vector must be strictly positive, u[{j}] = {v}"
        )));
    }

    let mut y = match warm_y {
        Some(w) => {
            w.check(gs)?;
            let mut w = w;
            project_in_place(&mut w, gs, lambda2);
            w
        }
        None => DualVariable::zeros(gs),
    };
    // The step constant never needs to exceed the Lipschitz bound of ω′,
    // which is the largest number of groups sharing one feature.
    let lip_cap = gs.max_frequency().max(1) as f64;

    let mut x = clamp_primal(u, &row_sums(&y, gs));
    let mut gap = duality_gap(&x, &y, gs, lambda2)?;
    let mut trace = vec![gap];
    let mut best = (gap, y.clone(), x.clone());
    let mut lip = 1.0f64;
    let mut iterations = 0;

    let mut y_prev = y.clone();
    let mut momentum = Momentum::new();
    while gap > gap_tol && iterations < max_iter {
        iterations += 1;
        let beta = momentum.beta();
        let s = if iterations == 1 {
            y.clone()
        } else {
            y.combine(1.0 + beta, &y_prev, -beta)
        };
        let rs_s = row_sums(&s, gs);
        let x_s = clamp_primal(u, &rs_s);
        let omega_s = omega_from_parts(u, &rs_s, &x_s);

        let (cand, x_c) = loop {
            let mut cand = s.clone();
            let inv = 1.0 / lip;
            for (i, grp) in gs.groups().iter().enumerate() {
                for (slot, &j) in cand.block_mut(i).iter_mut().zip(grp) {
                    *slot += inv * x_s[j];
                }
            }
            project_in_place(&mut cand, gs, lambda2);
            let rs_c = row_sums(&cand, gs);
            let x_c = clamp_primal(u, &rs_c);
            let omega_c = omega_from_parts(u, &rs_c, &x_c);

            let mut lin = 0.0;
            let mut sq = 0.0;
            for (i, grp) in gs.groups().iter().enumerate() {
                for ((&c, &sv), &j) in cand.block(i).iter().zip(s.block(i)).zip(grp) {
                    let d = c - sv;
                    lin -= x_s[j] * d;
                    sq += d * d;
                }
            }
            if omega_c <= omega_s + lin + 0.5 * lip * sq || lip >= lip_cap {
                break (cand, x_c);
            }
            lip = (2.0 * lip).min(lip_cap);
        };

        y_prev = std::mem::replace(&mut y, cand);
        x = x_c;
        momentum.advance();
        gap = duality_gap(&x, &y, gs, lambda2)?;
        trace.push(gap);
        if gap < best.0 {
            best = (gap, y.clone(), x.clone());
        }
    }

    let (gap, y, x) = best;
    Ok(DualSolution {
        y,
        x,
        report: DualSolveReport {
            gap,
            iterations,
            final_step_l: lip,
            converged: gap <= gap_tol,
            gap_trace: trace,
        },
    })
}

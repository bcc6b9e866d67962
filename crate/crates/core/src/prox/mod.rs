//! Proximal operator of the overlapping group Lasso penalty,
//!
//! `π(v) = argmin_x ½‖x − v‖² + λ1‖x‖₁ + λ2 Σ w_i‖x_{G_i}‖`.
//!
//! The computation runs in four stages:
//!
//! 1. Signs are factored out, `π(v) = sgn(v) ⊙ π(|v|)`.
//! 2. The `ℓ1` part is removed by soft thresholding, `u = max(|v| − λ1, 0)`,
//!    after which only the `λ1 = 0` problem in `u` remains.
//! 3. Groups that are provably zero at the optimum are found by cycling
//!    through the groups and zeroing any group with `‖u_{G_i}‖ ≤ λ2 w_i`
//!    until a full pass changes nothing. Zeroed entries stay zero in the
//!    solution, so they and the groups that lose all support are dropped.
//! 4. What is left (`p′` positive entries, `g′` groups) is solved through the
//!    smooth dual in [`dual`], which also certifies the result with a
//!    duality gap.

pub mod dual;

use serde::{Deserialize, Serialize};

use crate::error::{OglError, Result};
use crate::group_model::{group_norm, GroupStructure, PenaltyParams};
pub use dual::{DualSolveReport, DualVariable};

/// Componentwise `sgn(v_i)·max(|v_i| − λ1, 0)`; shrunk entries are `+0.0`.
pub fn soft_threshold(v: &[f64], lambda1: f64) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let a = x.abs();
            if a > lambda1 {
                x.signum() * (a - lambda1)
            } else {
                0.0
            }
        })
        .collect()
}

/// Record of the zero-group cycling procedure.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentificationTrace {
    /// Full passes over the groups, including the final pass with no change.
    pub passes: usize,
    /// Groups in the order they were zeroed.
    pub zeroed_groups: Vec<usize>,
    /// For each zeroed group, the entries of `G_i` that earlier zeroed
    /// groups had already cleared when the group was tested.
    pub overlap_subsets: Vec<Vec<usize>>,
}

/// Cycles through the groups in ascending order, zeroing `u_{G_i}` whenever
/// `‖u_{G_i}‖ ≤ λ2 w_i`, until a pass zeroes nothing new.
///
/// On return every group either is zero in `u` or has norm above its
/// threshold.
pub fn identify_zero_groups(
    u: &[f64],
    gs: &GroupStructure,
    lambda2: f64,
) -> Result<(Vec<f64>, IdentificationTrace)> {
    if u.len() != gs.p() {
        return Err(OglError::DimensionMismatch {
            what: "u vs. feature count",
            expected: gs.p(),
            got: u.len(),
        });
    }
    let mut u = u.to_vec();
    let mut zeroed = vec![false; gs.len()];
    let mut cleared = vec![false; gs.p()];
    let mut trace = IdentificationTrace::default();
    loop {
        trace.passes += 1;
        let mut changed = false;
        for (i, (grp, &w)) in gs.groups().iter().zip(gs.weights()).enumerate() {
            if zeroed[i] || group_norm(&u, grp) > lambda2 * w {
                continue;
            }
            zeroed[i] = true;
            changed = true;
            trace.zeroed_groups.push(i);
            trace
                .overlap_subsets
                .push(grp.iter().copied().filter(|&j| cleared[j]).collect());
            for &j in grp {
                u[j] = 0.0;
                cleared[j] = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((u, trace))
}

/// The positive residual problem left after shrinkage and identification.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedProblem {
    /// Strictly positive entries of `u` that survived.
    pub u_reduced: Vec<f64>,
    /// Surviving groups, restricted to surviving entries and reindexed.
    pub gs_reduced: GroupStructure,
    /// Reduced feature index → original feature index.
    pub index_map: Vec<usize>,
    /// Reduced group index → original group index.
    pub group_map: Vec<usize>,
    /// `sgn(v)` over the original features.
    pub sign: Vec<i8>,
    pub trace: IdentificationTrace,
    /// Original groups found to be zero at the optimum.
    pub zero_group_mask: Vec<bool>,
}

impl ReducedProblem {
    pub fn p_reduced(&self) -> usize {
        self.index_map.len()
    }

    pub fn g_reduced(&self) -> usize {
        self.group_map.len()
    }
}

fn check_prox_inputs(v: &[f64], gs: &GroupStructure) -> Result<()> {
    if v.len() != gs.p() {
        return Err(OglError::DimensionMismatch {
            what: "v vs. feature count",
            expected: gs.p(),
            got: v.len(),
        });
    }
    if let Some((j, x)) = v.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(OglError::InvalidParameter(format!(
            "v[{j}] = {x} is not finite"
        )));
    }
    Ok(())
}

/// Sign split, soft thresholding and zero-group identification, followed by
/// compaction to the surviving entries and groups.
pub fn reduce_problem(
    v: &[f64],
    gs: &GroupStructure,
    params: &PenaltyParams,
) -> Result<ReducedProblem> {
    check_prox_inputs(v, gs)?;
    let sign: Vec<i8> = v
        .iter()
        .map(|&x| {
            if x > 0.0 {
                1
            } else if x < 0.0 {
                -1
            } else {
                0
            }
        })
        .collect();
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let shrunk = soft_threshold(&abs, params.lambda1);
    let (u, trace) = identify_zero_groups(&shrunk, gs, params.lambda2)?;

    let mut zero_group_mask = vec![false; gs.len()];
    for &i in &trace.zeroed_groups {
        zero_group_mask[i] = true;
    }

    let mut reduced_index = vec![usize::MAX; gs.p()];
    let mut index_map = Vec::new();
    let mut u_reduced = Vec::new();
    for (j, &x) in u.iter().enumerate() {
        if x > 0.0 {
            reduced_index[j] = index_map.len();
            index_map.push(j);
            u_reduced.push(x);
        }
    }

    let mut groups = Vec::new();
    let mut weights = Vec::new();
    let mut group_map = Vec::new();
    for (i, (grp, &w)) in gs.groups().iter().zip(gs.weights()).enumerate() {
        if zero_group_mask[i] {
            continue;
        }
        let members: Vec<usize> = grp
            .iter()
            .filter_map(|&j| (reduced_index[j] != usize::MAX).then_some(reduced_index[j]))
            .collect();
        if members.is_empty() {
            continue;
        }
        groups.push(members);
        weights.push(w);
        group_map.push(i);
    }

    Ok(ReducedProblem {
        u_reduced,
        gs_reduced: GroupStructure::from_parts_unchecked(index_map.len(), groups, weights),
        index_map,
        group_map,
        sign,
        trace,
        zero_group_mask,
    })
}

/// Inner-solver settings for [`prox`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxOptions {
    pub gap_tol: f64,
    pub max_inner: usize,
}

impl Default for ProxOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-10,
            max_inner: 100_000,
        }
    }
}

/// Output of [`prox`].
#[derive(Debug, Clone)]
pub struct ProxSolution {
    pub x: Vec<f64>,
    /// Certified duality gap of the reduced problem.
    pub gap: f64,
    pub inner_iterations: usize,
    /// False when the inner iteration cap was hit before reaching the gap
    /// tolerance; `x` is then the best iterate found.
    pub converged: bool,
    /// Original groups flagged as zero by identification.
    pub zero_group_mask: Vec<bool>,
    pub trace: IdentificationTrace,
    pub p_reduced: usize,
    pub g_reduced: usize,
    /// Final dual variable over the original groups, for warm starts.
    pub warm_y: DualVariable,
    pub dual_report: Option<DualSolveReport>,
}

impl ProxSolution {
    /// Fraction of the original groups flagged as zero by identification.
    pub fn zero_group_fraction(&self) -> f64 {
        if self.zero_group_mask.is_empty() {
            0.0
        } else {
            self.trace.zeroed_groups.len() as f64 / self.zero_group_mask.len() as f64
        }
    }
}

/// Restricts a dual variable over the original groups to a reduced problem.
fn restrict_warm(
    warm: &DualVariable,
    gs: &GroupStructure,
    reduced: &ReducedProblem,
) -> Result<DualVariable> {
    if warm.num_groups() != gs.len() {
        return Err(OglError::DimensionMismatch {
            what: "warm dual variable vs. groups",
            expected: gs.len(),
            got: warm.num_groups(),
        });
    }
    let mut y = DualVariable::zeros(&reduced.gs_reduced);
    for (r, &orig) in reduced.group_map.iter().enumerate() {
        let src = warm.block(orig);
        if src.len() != gs.group(orig).len() {
            return Err(OglError::DimensionMismatch {
                what: "warm dual block vs. group size",
                expected: gs.group(orig).len(),
                got: src.len(),
            });
        }
        let dst = y.block_mut(r);
        let mut k = 0;
        for (&j, &val) in gs.group(orig).iter().zip(src) {
            if k < dst.len() && reduced.index_map[reduced.gs_reduced.group(r)[k]] == j {
                dst[k] = val;
                k += 1;
            }
        }
    }
    Ok(y)
}

/// Scatters a reduced dual variable back onto the original groups.
fn expand_dual(y: &DualVariable, gs: &GroupStructure, reduced: &ReducedProblem) -> DualVariable {
    let mut full = DualVariable::zeros(gs);
    for (r, &orig) in reduced.group_map.iter().enumerate() {
        let src = y.block(r);
        let members = reduced.gs_reduced.group(r);
        let dst = full.block_mut(orig);
        let mut k = 0;
        for (slot, &j) in dst.iter_mut().zip(gs.group(orig)) {
            if k < members.len() && reduced.index_map[members[k]] == j {
                *slot = src[k];
                k += 1;
            }
        }
    }
    full
}

/// Evaluates the proximal operator at `v`.
///
/// `warm_y`, when given, is a dual variable over the original groups (such
/// as [`ProxSolution::warm_y`] from a previous call); it is restricted to
/// the reduced problem and re-projected before use.
pub fn prox(
    v: &[f64],
    gs: &GroupStructure,
    params: &PenaltyParams,
    options: &ProxOptions,
    warm_y: Option<DualVariable>,
) -> Result<ProxSolution> {
    if options.gap_tol.is_nan() || options.gap_tol <= 0.0 {
        return Err(OglError::InvalidParameter(format!(
            "gap tolerance must be positive, got {}",
            options.gap_tol
        )));
    }
    let reduced = reduce_problem(v, gs, params)?;
    let mut x = vec![0.0; gs.p()];
    if reduced.p_reduced() == 0 {
        return Ok(ProxSolution {
            x,
            gap: 0.0,
            inner_iterations: 0,
            converged: true,
            zero_group_mask: reduced.zero_group_mask,
            trace: reduced.trace,
            p_reduced: 0,
            g_reduced: 0,
            warm_y: DualVariable::zeros(gs),
            dual_report: None,
        });
    }

    let warm = warm_y
        .map(|w| restrict_warm(&w, gs, &reduced))
        .transpose()?;
    let sol = dual::solve_dual(
        &reduced.u_reduced,
        &reduced.gs_reduced,
        params.lambda2,
        options.gap_tol,
        options.max_inner,
        warm,
    )?;
    for (k, &j) in reduced.index_map.iter().enumerate() {
        let s = reduced.sign[j];
        x[j] = if s < 0 { -sol.x[k] } else { sol.x[k] };
    }
    Ok(ProxSolution {
        x,
        gap: sol.report.gap,
        inner_iterations: sol.report.iterations,
        converged: sol.report.converged,
        warm_y: expand_dual(&sol.y, gs, &reduced),
        p_reduced: reduced.p_reduced(),
        g_reduced: reduced.g_reduced(),
        zero_group_mask: reduced.zero_group_mask,
        trace: reduced.trace,
        dual_report: Some(sol.report),
    })
}

/// `½‖x − v‖² + penalty(x)`, the objective minimized by [`prox`].
pub fn prox_objective(
    x: &[f64],
    v: &[f64],
    gs: &GroupStructure,
    params: &PenaltyParams,
) -> Result<f64> {
    check_prox_inputs(v, gs)?;
    let pen = crate::group_model::penalty_value(x, gs, params)?;
    let quad: f64 = x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(0.5 * quad + pen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(w: [f64; 2]) -> GroupStructure {
        GroupStructure::new(vec![vec![0, 1], vec![1, 2]], w.to_vec(), 3).unwrap()
    }

    #[test]
    fn soft_threshold_examples() {
        assert_eq!(soft_threshold(&[2.0, -0.5, 0.0], 1.0), vec![1.0, 0.0, 0.0]);
        let v = [1.5, -2.25, 0.0, 3.0];
        assert_eq!(soft_threshold(&v, 0.0), v.to_vec());
        let r = soft_threshold(&[-3.0], 3.0);
        assert_eq!(r, vec![0.0]);
        assert!(r[0].is_sign_positive());
    }

    #[test]
    fn identification_hand_trace() {
        let (u, trace) = identify_zero_groups(&[0.1, 0.1, 5.0], &pair([1.0, 1.0]), 1.0).unwrap();
        assert_eq!(u, vec![0.0, 0.0, 5.0]);
        assert_eq!(trace.zeroed_groups, vec![0]);
        assert_eq!(trace.overlap_subsets, vec![Vec::<usize>::new()]);
        assert_eq!(trace.passes, 2);
    }

    #[test]
    fn identification_with_zero_lambda() {
        let gs = pair([1.0, 1.0]);
        let (u, trace) = identify_zero_groups(&[0.1, 0.2, 0.3], &gs, 0.0).unwrap();
        assert_eq!(u, vec![0.1, 0.2, 0.3]);
        assert!(trace.zeroed_groups.is_empty());
        assert_eq!(trace.passes, 1);

        let (_, trace) = identify_zero_groups(&[0.0, 0.0, 0.3], &gs, 0.0).unwrap();
        assert_eq!(trace.zeroed_groups, vec![0]);
    }

    #[test]
    fn identification_boundary_is_inclusive() {
        let gs = GroupStructure::new(vec![vec![0, 1]], vec![5.0], 2).unwrap();
        let (u, trace) = identify_zero_groups(&[3.0, 4.0], &gs, 1.0).unwrap();
        assert_eq!(u, vec![0.0, 0.0]);
        assert_eq!(trace.zeroed_groups, vec![0]);
    }

    #[test]
    fn identification_cascades() {
        // Group 1 only falls below its threshold after group 2 clears index 2.
        let gs = GroupStructure::new(
            vec![vec![0, 1], vec![1, 2], vec![2, 3]],
            vec![1.0, 1.0, 1.0],
            4,
        )
        .unwrap();
        let (u, trace) = identify_zero_groups(&[3.0, 0.5, 0.9, 0.1], &gs, 1.0).unwrap();
        assert_eq!(trace.zeroed_groups, vec![2, 1]);
        assert_eq!(trace.overlap_subsets, vec![vec![], vec![2]]);
        assert_eq!(u, vec![3.0, 0.0, 0.0, 0.0]);
        assert_eq!(trace.passes, 3);
    }

    #[test]
    fn reduce_hand_trace() {
        let gs = pair([1.0, 1.0]);
        let r = reduce_problem(
            &[-0.1, 0.1, 5.0],
            &gs,
            &PenaltyParams::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(r.index_map, vec![2]);
        assert_eq!(r.u_reduced, vec![5.0]);
        assert_eq!(r.gs_reduced.groups(), &[vec![0]]);
        assert_eq!(r.group_map, vec![1]);
        assert_eq!(r.sign, vec![-1, 1, 1]);
        assert_eq!(r.zero_group_mask, vec![true, false]);
    }

    #[test]
    fn reduce_full_shrinkage_and_identity() {
        let gs = pair([1.0, 1.0]);
        let r = reduce_problem(
            &[1.0, -2.0, 0.5],
            &gs,
            &PenaltyParams::new(2.0, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(r.p_reduced(), 0);
        assert_eq!(r.g_reduced(), 0);

        let r = reduce_problem(
            &[1.0, 2.0, 3.0],
            &gs,
            &PenaltyParams::new(0.0, 0.1).unwrap(),
        )
        .unwrap();
        assert_eq!(r.p_reduced(), 3);
        assert_eq!(r.g_reduced(), 2);
        assert_eq!(r.gs_reduced.groups(), gs.groups());
    }

    #[test]
    fn prox_single_group_closed_form() {
        let gs = GroupStructure::new(vec![vec![0, 1]], vec![1.0], 2).unwrap();
        let params = PenaltyParams::new(1.0, 1.0).unwrap();
        let sol = prox(&[3.0, 4.0], &gs, &params, &ProxOptions::default(), None).unwrap();
        let scale = 1.0 - 1.0 / 13f64.sqrt();
        assert!((sol.x[0] - scale * 2.0).abs() < 1e-6);
        assert!((sol.x[1] - scale * 3.0).abs() < 1e-6);
        assert!((sol.x[0] - 1.4453).abs() < 1e-4 && (sol.x[1] - 2.1680).abs() < 1e-4);
        assert!(sol.gap <= 1e-10);
    }

    #[test]
    fn prox_identity_case() {
        let gs = pair([1.0, 1.0]);
        let v = [0.7, -1.3, 2.0];
        let sol = prox(
            &v,
            &gs,
            &PenaltyParams::new(0.0, 0.0).unwrap(),
            &ProxOptions::default(),
            None,
        )
        .unwrap();
        assert_eq!(sol.x, v.to_vec());
        assert_eq!(sol.gap, 0.0);
    }

    #[test]
    fn prox_full_shrinkage_skips_dual() {
        let gs = pair([1.0, 1.0]);
        let sol = prox(
            &[0.5, -0.5, 0.2],
            &gs,
            &PenaltyParams::new(1.0, 0.3).unwrap(),
            &ProxOptions::default(),
            None,
        )
        .unwrap();
        assert!(sol.x.iter().all(|&x| x == 0.0 && x.is_sign_positive()));
        assert_eq!((sol.gap, sol.inner_iterations, sol.p_reduced), (0.0, 0, 0));
        assert!(sol.dual_report.is_none());
    }

    #[test]
    fn prox_symmetric_overlap() {
        let gs = pair([1.0, 1.0]);
        let sol = prox(
            &[1.0, 1.0, 1.0],
            &gs,
            &PenaltyParams::new(0.0, 0.5).unwrap(),
            &ProxOptions::default(),
            None,
        )
        .unwrap();
        assert!(sol.converged);
        assert!((sol.x[0] - sol.x[2]).abs() < 1e-8);
    }

    #[test]
    fn prox_warm_start_round_trip() {
        let gs = GroupStructure::new(
            vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5]],
            vec![1.0, 1.0, 1.2],
            6,
        )
        .unwrap();
        let params = PenaltyParams::new(0.1, 0.4).unwrap();
        let v = [1.0, -0.8, 0.05, 1.5, -0.3, 0.9];
        let opts = ProxOptions::default();
        let cold = prox(&v, &gs, &params, &opts, None).unwrap();
        let warm = prox(&v, &gs, &params, &opts, Some(cold.warm_y.clone())).unwrap();
        assert!(warm.inner_iterations <= cold.inner_iterations);
        for (a, b) in cold.x.iter().zip(&warm.x) {
            assert!((a - b).abs() < 1e-5);
        }
        assert!(prox(&v[..5], &gs, &params, &opts, None).is_err());
    }
}

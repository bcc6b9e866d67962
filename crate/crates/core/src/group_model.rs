//! Overlapping group structures and the penalty they induce.
//!
//! A [`GroupStructure`] holds `g` index sets over `p` features together with
//! one positive weight per set. Sets may overlap and need not cover every
//! feature; uncovered features only see the `ℓ1` part of the penalty.

use serde::{Deserialize, Serialize};

use crate::error::{OglError, Result};

/// Index sets `G_i` with weights `w_i` over `p` features.
///
/// Indices are 0-based and stored in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStructure {
    p: usize,
    groups: Vec<Vec<usize>>,
    weights: Vec<f64>,
    names: Option<Vec<String>>,
}

/// Regularization strengths `λ1` (elementwise `ℓ1`) and `λ2` (group norms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl PenaltyParams {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(OglError::InvalidParameter(format!(
                    "{name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(Self { lambda1, lambda2 })
    }

    /// Both parameters divided by `L`, as used for the prox step `π_{λ2/L}^{λ1/L}`.
    pub fn scaled(&self, inv: f64) -> Self {
        Self {
            lambda1: self.lambda1 * inv,
            lambda2: self.lambda2 * inv,
        }
    }
}

/// Summary counts for a group structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub g: usize,
    pub p: usize,
    pub mean_group_size: f64,
    pub max_group_size: usize,
    pub covered_features: usize,
    pub mean_frequency: f64,
}

/// Builds a [`GroupStructure`] from unchecked input.
///
/// Indices are taken as signed so that negative entries coming from files or
/// other front ends can be reported instead of wrapping around.
pub fn validate_groups(
    raw_groups: &[Vec<i64>],
    weights: &[f64],
    p: usize,
) -> Result<GroupStructure> {
    if p == 0 {
        return Err(OglError::InvalidParameter(
            "feature count p must be positive".into(),
        ));
    }
    if raw_groups.len() != weights.len() {
        return Err(OglError::LengthMismatch {
            what: "weights vs. groups",
            expected: raw_groups.len(),
            got: weights.len(),
        });
    }
    let mut groups = Vec::with_capacity(raw_groups.len());
    for (gi, raw) in raw_groups.iter().enumerate() {
        if raw.is_empty() {
            return Err(OglError::EmptyGroup { group: gi });
        }
        let mut idx = Vec::with_capacity(raw.len());
        for &r in raw {
            if r < 0 || r as u64 >= p as u64 {
                return Err(OglError::IndexOutOfRange {
                    group: gi,
                    index: r,
                    p,
                });
            }
            idx.push(r as usize);
        }
        idx.sort_unstable();
        if let Some(w) = idx.windows(2).find(|w| w[0] == w[1]) {
            return Err(OglError::DuplicateIndex {
                group: gi,
                index: w[0],
            });
        }
        groups.push(idx);
    }
    for (gi, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w <= 0.0 {
            return Err(OglError::NonpositiveWeight {
                group: gi,
                weight: w,
            });
        }
    }
    Ok(GroupStructure {
        p,
        groups,
        weights: weights.to_vec(),
        names: None,
    })
}

impl GroupStructure {
    /// Validating constructor for already-unsigned indices.
    pub fn new(groups: Vec<Vec<usize>>, weights: Vec<f64>, p: usize) -> Result<Self> {
        let raw: Vec<Vec<i64>> = groups
            .iter()
            .map(|g| g.iter().map(|&i| i as i64).collect())
            .collect();
        validate_groups(&raw, &weights, p)
    }

    /// Groups weighted by `w_i = √|G_i|`.
    pub fn with_sqrt_weights(groups: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        let weights = groups.iter().map(|g| (g.len() as f64).sqrt()).collect();
        Self::new(groups, weights, p)
    }

    /// Structure built from parts that are valid by construction (reduced problems).
    pub(crate) fn from_parts_unchecked(
        p: usize,
        groups: Vec<Vec<usize>>,
        weights: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(groups.len(), weights.len());
        debug_assert!(groups
            .iter()
            .all(|g| !g.is_empty() && g.windows(2).all(|w| w[0] < w[1]) && g[g.len() - 1] < p));
        Self {
            p,
            groups,
            weights,
            names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.groups.len() {
            return Err(OglError::LengthMismatch {
                what: "names vs. groups",
                expected: self.groups.len(),
                got: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of groups `g`.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &[usize] {
        &self.groups[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Total number of (feature, group) memberships, `Σ|G_i|`.
    pub fn nnz(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Largest number of groups any single feature belongs to.
    pub fn max_frequency(&self) -> usize {
        let mut count = vec![0usize; self.p];
        for g in &self.groups {
            for &j in g {
                count[j] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }
}

/// Euclidean norm of `x` restricted to `idx`.
pub fn group_norm(x: &[f64], idx: &[usize]) -> f64 {
    idx.iter().map(|&j| x[j] * x[j]).sum::<f64>().sqrt()
}

/// `λ1‖x‖₁ + λ2 Σ w_i‖x_{G_i}‖`.
pub fn penalty_value(x: &[f64], gs: &GroupStructure, params: &PenaltyParams) -> Result<f64> {
    if x.len() != gs.p {
        return Err(OglError::DimensionMismatch {
            what: "x vs. feature count",
            expected: gs.p,
            got: x.len(),
        });
    }
    Ok(penalty_unchecked(x, gs, params))
}

pub(crate) fn penalty_unchecked(x: &[f64], gs: &GroupStructure, params: &PenaltyParams) -> f64 {
    let mut total = 0.0;
    if params.lambda1 != 0.0 {
        total += params.lambda1 * x.iter().map(|v| v.abs()).sum::<f64>();
    }
    if params.lambda2 != 0.0 {
        let groups: f64 = gs
            .groups
            .iter()
            .zip(&gs.weights)
            .map(|(g, w)| w * group_norm(x, g))
            .sum();
        total += params.lambda2 * groups;
    }
    total
}

pub fn group_stats(gs: &GroupStructure) -> GroupStats {
    let g = gs.groups.len();
    let total = gs.nnz();
    let mut count = vec![0usize; gs.p];
    for grp in &gs.groups {
        for &j in grp {
            count[j] += 1;
        }
    }
    let covered = count.iter().filter(|&&c| c > 0).count();
    GroupStats {
        g,
        p: gs.p,
        mean_group_size: if g == 0 { 0.0 } else { total as f64 / g as f64 },
        max_group_size: gs.groups.iter().map(Vec::len).max().unwrap_or(0),
        covered_features: covered,
        mean_frequency: if covered == 0 {
            0.0
        } else {
            total as f64 / covered as f64
        },
    }
}

/// Parses the text group format: one group per non-empty, non-`#` line,
/// `name weight idx idx …`. A weight of `auto` resolves to `√|G_i|`.
pub fn parse_groups(text: &str, p: usize) -> Result<GroupStructure> {
    let mut names = Vec::new();
    let mut raw = Vec::new();
    let mut weights = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let name = tokens.next().unwrap_or_default();
        let weight_tok = tokens.next().ok_or_else(|| OglError::Parse {
            path: None,
            line: line_no,
            column: None,
            message: "missing weight".into(),
        })?;
        let mut idx = Vec::new();
        for tok in tokens {
            let v: i64 = tok.parse().map_err(|_| OglError::Parse {
                path: None,
                line: line_no,
                column: None,
                message: format!("invalid index {tok:?}"),
            })?;
            idx.push(v);
        }
        let weight = if weight_tok.eq_ignore_ascii_case("auto") {
            (idx.len() as f64).sqrt()
        } else {
            weight_tok.parse::<f64>().map_err(|_| OglError::Parse {
                path: None,
                line: line_no,
                column: None,
                message: format!("invalid weight {weight_tok:?}"),
            })?
        };
        names.push(name.to_string());
        raw.push(idx);
        weights.push(weight);
    }
    validate_groups(&raw, &weights, p)?.with_names(names)
}

/// Inverse of [`parse_groups`]; weights are written with 17 significant digits.
pub fn format_groups(gs: &GroupStructure) -> String {
    let mut out = String::new();
    for (i, (grp, w)) in gs.groups.iter().zip(&gs.weights).enumerate() {
        let name = gs
            .names
            .as_ref()
            .map(|n| n[i].clone())
            .unwrap_or_else(|| format!("g{i}"));
        out.push_str(&name);
        out.push(' ');
        out.push_str(&format!("{w:.16e}"));
        for j in grp {
            out.push(' ');
            out.push_str(&j.to_string());
        }
        out.push('\n');
    }
    out
}

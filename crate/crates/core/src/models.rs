//! LP relaxations of max-cut and multilinear binary programs.
//!
//! Every product term `prod_{j in A} x_j` with `|A| >= 2` gets a lifted column
//! `y_A` tied to `x` by the rows `y_A <= x_j` and `y_A >= sum_{j in A} x_j - |A| + 1`.
//! Degree-1 terms use `x_j` directly. Columns are ordered `x`, then `y`, then `t`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cuts::FeasiblePoints;
use crate::error::{capacity, Error, Result};
use crate::simplex_lp::{CornerPolyhedron, LpModel, ObjSense, ProjectedCorner, RowSense};
use crate::submodular::{
    bits, cut_oracle, multilinear_oracle, ss_decompose, Level, MultilinearFunction, SsFunction,
    SubmodularOracle, WeightedGraph,
};

pub const BRUTEFORCE_LIMIT: usize = 24;

/// Multilinear binary program: maximize `f_0(x)` subject to `f_i(x) >= 0`
/// and optionally `sum x_j <= k`.
#[derive(Debug, Clone)]
pub struct BmpInstance {
    pub objective: MultilinearFunction,
    pub constraints: Vec<MultilinearFunction>,
    pub cardinality: Option<usize>,
}

impl BmpInstance {
    pub fn new(
        objective: MultilinearFunction,
        constraints: Vec<MultilinearFunction>,
        cardinality: Option<usize>,
    ) -> Result<Self> {
        let n = objective.n();
        if let Some(bad) = constraints.iter().position(|c| c.n() != n) {
            return Err(Error::Input(format!("constraint {bad} has dimension {} instead of {n}", constraints[bad].n())));
        }
        Ok(Self {
            objective,
            constraints,
            cardinality,
        })
    }

    pub fn unconstrained(objective: MultilinearFunction) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
            cardinality: None,
        }
    }

    pub fn n(&self) -> usize {
        self.objective.n()
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.cardinality.is_none_or(|k| x.iter().filter(|&&b| b).count() <= k)
            && self
                .constraints
                .iter()
                .all(|c| c.eval_binary(x) >= -crate::submodular::STRUCTURAL_TOL)
    }
}

/// Column layout of a built model.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftMap {
    pub x_cols: Vec<usize>,
    pub t_col: usize,
    /// Lifted column of each distinct support of size at least two.
    pub y_cols: BTreeMap<Vec<usize>, usize>,
}

impl LiftMap {
    pub fn n_y(&self) -> usize {
        self.y_cols.len()
    }

    /// Column carrying the value of a support: `x_j` for singletons, `y_A` otherwise.
    pub fn column_of(&self, support: &[usize]) -> Option<usize> {
        if support.len() == 1 {
            self.x_cols.get(support[0]).copied()
        } else {
            self.y_cols.get(support).copied()
        }
    }
}

/// Which row of the original problem a target belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetRole {
    Objective,
    Constraint(usize),
}

/// An SS function whose hypograph or superlevel set is to be separated over.
#[derive(Debug, Clone)]
pub struct Target {
    pub role: TargetRole,
    pub ss: SsFunction,
}

/// LP relaxation together with everything needed to separate over it and to
/// enumerate its integer points.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub lp: LpModel,
    pub targets: Vec<Target>,
    pub lift: LiftMap,
    /// Normalized objective oracle (not necessarily submodular).
    pub objective: SubmodularOracle,
    pub constraints: Vec<MultilinearFunction>,
    pub cardinality: Option<usize>,
}

impl BuiltModel {
    pub fn n(&self) -> usize {
        self.lift.x_cols.len()
    }

    pub fn summary(&self) -> String {
        format!(
            "MODEL n={} y={} rows={} targets={}",
            self.n(),
            self.lift.n_y(),
            self.lp.n_rows(),
            self.targets.len()
        )
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.cardinality.is_none_or(|k| x.iter().filter(|&&b| b).count() <= k)
            && self
                .constraints
                .iter()
                .all(|c| c.eval_binary(x) >= -crate::submodular::STRUCTURAL_TOL)
    }

    /// Structural point for binary `x` with exact lifted values and the given `t`.
    pub fn embed(&self, x: &[bool], t: f64) -> Vec<f64> {
        let mut z = vec![0.0; self.lp.n_cols()];
        for (j, &c) in self.lift.x_cols.iter().enumerate() {
            z[c] = if x[j] { 1.0 } else { 0.0 };
        }
        for (support, &c) in &self.lift.y_cols {
            z[c] = if support.iter().all(|&j| x[j]) { 1.0 } else { 0.0 };
        }
        z[self.lift.t_col] = t;
        z
    }

    pub fn t_bounds(&self) -> (f64, f64) {
        (self.lp.lower[self.lift.t_col], self.lp.upper[self.lift.t_col])
    }

    /// Exhaustive optimum over feasible binaries, as (value, maximizer).
    pub fn bruteforce_optimum(&self) -> Result<Option<(f64, Vec<bool>)>> {
        let n = self.n();
        capacity("brute-force optimum", n, BRUTEFORCE_LIMIT)?;
        let best = (0..(1usize << n))
            .into_par_iter()
            .filter_map(|mask| {
                let x = bits(mask, n);
                if !self.is_feasible(&x) {
                    return None;
                }
                Some((self.objective.evaluate(&x).ok()?, mask))
            })
            .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        Ok(best.map(|(v, mask)| (v, bits(mask, n))))
    }
}

impl FeasiblePoints for BuiltModel {
    fn n(&self) -> usize {
        BuiltModel::n(self)
    }

    fn points(&self, x: &[bool]) -> Result<Vec<Vec<f64>>> {
        if !self.is_feasible(x) {
            return Ok(Vec::new());
        }
        let f = self.objective.evaluate(x)?;
        let (lo, _) = self.t_bounds();
        Ok(vec![self.embed(x, f), self.embed(x, lo)])
    }
}

/// Sparse row `(coefficients, sense, rhs)`.
pub type SparseRow = (Vec<(usize, f64)>, RowSense, f64);

/// Rows `y <= x_j` for `j in A` and `y >= sum_{j in A} x_j - |A| + 1`.
pub fn linearize_term(support: &[usize], y: usize, x_cols: &[usize]) -> Vec<SparseRow> {
    debug_assert!(support.len() >= 2);
    let mut rows: Vec<SparseRow> = support
        .iter()
        .map(|&j| (vec![(y, 1.0), (x_cols[j], -1.0)], RowSense::Le, 0.0))
        .collect();
    let mut lower = vec![(y, 1.0)];
    lower.extend(support.iter().map(|&j| (x_cols[j], -1.0)));
    rows.push((lower, RowSense::Ge, 1.0 - support.len() as f64));
    rows
}

fn add_x_columns(lp: &mut LpModel, n: usize) -> Vec<usize> {
    (0..n).map(|j| lp.add_col(format!("x{}", j + 1), 0.0, 1.0, 0.0)).collect()
}

fn add_y_columns(lp: &mut LpModel, supports: impl IntoIterator<Item = Vec<usize>>) -> BTreeMap<Vec<usize>, usize> {
    let mut y_cols = BTreeMap::new();
    for support in supports {
        if support.len() < 2 || y_cols.contains_key(&support) {
            continue;
        }
        let name = format!("y{}", support.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join("_"));
        let c = lp.add_col(name, 0.0, 1.0, 0.0);
        y_cols.insert(support, c);
    }
    y_cols
}

fn add_linearization_rows(lp: &mut LpModel, lift: &LiftMap) {
    for (support, &y) in &lift.y_cols {
        for (coefs, sense, rhs) in linearize_term(support, y, &lift.x_cols) {
            lp.add_row(&coefs, sense, rhs);
        }
    }
}

/// Max-cut relaxation: maximize `t` subject to `t <= sum w_ij (x_i + x_j - 2 y_ij)`.
pub fn build_maxcut_model(graph: &WeightedGraph) -> Result<BuiltModel> {
    let oracle = cut_oracle(graph)?;
    let edges: Vec<(usize, usize, f64)> = graph.merged_edges().into_iter().filter(|e| e.2 != 0.0).collect();
    let total: f64 = edges.iter().map(|e| e.2).sum();
    let mut lp = LpModel::new(ObjSense::Maximize);
    let x_cols = add_x_columns(&mut lp, graph.n);
    let y_cols = add_y_columns(&mut lp, edges.iter().map(|&(i, j, _)| vec![i, j]));
    // the cut polynomial has positive linear part 2W and negative quadratic part -2W
    let t_col = lp.add_col("t", -2.0 * total, 2.0 * total, 1.0);
    let lift = LiftMap { x_cols, t_col, y_cols };
    add_linearization_rows(&mut lp, &lift);
    let mut link = vec![(t_col, 1.0)];
    for &(i, j, w) in &edges {
        link.push((lift.x_cols[i], -w));
        link.push((lift.x_cols[j], -w));
        link.push((lift.y_cols[&vec![i, j]], 2.0 * w));
    }
    lp.add_row(&link, RowSense::Le, 0.0);
    Ok(BuiltModel {
        lp,
        targets: vec![Target {
            role: TargetRole::Objective,
            ss: SsFunction::hypograph(oracle.clone()),
        }],
        lift,
        objective: oracle,
        constraints: Vec::new(),
        cardinality: None,
    })
}

fn linear_row(p: &MultilinearFunction, lift: &LiftMap) -> Vec<(usize, f64)> {
    p.terms()
        .iter()
        .map(|t| (lift.column_of(&t.support).expect("support has a column"), t.coefficient))
        .collect()
}

/// Lifted and linearized relaxation of a multilinear binary program.
pub fn build_mubo_model(inst: &BmpInstance) -> Result<BuiltModel> {
    let n = inst.n();
    let mut lp = LpModel::new(ObjSense::Maximize);
    let x_cols = add_x_columns(&mut lp, n);
    let supports = std::iter::once(&inst.objective)
        .chain(&inst.constraints)
        .flat_map(|p| p.terms().iter().map(|t| t.support.clone()))
        .collect::<Vec<_>>();
    let y_cols = add_y_columns(&mut lp, supports);
    let (lo, hi) = inst.objective.coefficient_range();
    let t_col = lp.add_col("t", lo, hi, 1.0);
    let lift = LiftMap { x_cols, t_col, y_cols };
    add_linearization_rows(&mut lp, &lift);

    let mut link = linear_row(&inst.objective, &lift);
    for c in &mut link {
        c.1 = -c.1;
    }
    link.push((t_col, 1.0));
    lp.add_row(&link, RowSense::Le, 0.0);
    let mut targets = vec![Target {
        role: TargetRole::Objective,
        ss: ss_decompose(&inst.objective),
    }];
    for (i, c) in inst.constraints.iter().enumerate() {
        lp.add_row(&linear_row(c, &lift), RowSense::Ge, 0.0);
        targets.push(Target {
            role: TargetRole::Constraint(i),
            ss: ss_decompose(c).with_level(Level::Superlevel),
        });
    }
    if let Some(k) = inst.cardinality {
        let row: Vec<(usize, f64)> = lift.x_cols.iter().map(|&c| (c, 1.0)).collect();
        lp.add_row(&row, RowSense::Le, k as f64);
    }
    Ok(BuiltModel {
        lp,
        targets,
        lift,
        objective: multilinear_oracle(&inst.objective),
        constraints: inst.constraints.clone(),
        cardinality: inst.cardinality,
    })
}

/// Restricts a corner of a built model to its `(x, t)` coordinates.
pub fn project_corner(corner: &CornerPolyhedron, lift: &LiftMap) -> Result<ProjectedCorner> {
    corner.project(&lift.x_cols, Some(lift.t_col))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex_lp::{corner, solve, LpStatus};

    fn k3() -> WeightedGraph {
        WeightedGraph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn k3_model_shape_and_bound() {
        let m = build_maxcut_model(&k3()).unwrap();
        assert_eq!(m.lp.n_cols(), 7);
        assert_eq!(m.lp.n_rows(), 10);
        assert_eq!(m.lift.n_y(), 3);
        assert_eq!(m.summary(), "MODEL n=3 y=3 rows=10 targets=1");
        let s = solve(&m.lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 3.0).abs() < 1e-9);
        let c = corner(&s, &m.lp).unwrap();
        let p = project_corner(&c, &m.lift).unwrap();
        assert_eq!(p.x.len(), 3);
        assert_eq!(p.rays.len(), c.n_rays());
        assert!((p.t - 3.0).abs() < 1e-9);
    }

    #[test]
    fn small_graph_bounds() {
        let one = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let s = solve(&build_maxcut_model(&one).unwrap().lp).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-9);
        let empty = WeightedGraph::new(3, vec![]).unwrap();
        let s = solve(&build_maxcut_model(&empty).unwrap().lp).unwrap();
        assert!(s.objective.abs() < 1e-12);
        let neg = WeightedGraph::new(2, vec![(0, 1, -1.0)]).unwrap();
        assert!(matches!(build_maxcut_model(&neg), Err(Error::Model(_))));
    }

    #[test]
    fn linearization_rows_of_a_cubic_term() {
        let rows = linearize_term(&[0, 1, 2], 3, &[0, 1, 2]);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3], (vec![(3, 1.0), (0, -1.0), (1, -1.0), (2, -1.0)], RowSense::Ge, -2.0));
    }

    #[test]
    fn mubo_model_examples() {
        let p = MultilinearFunction::new(3, vec![(3.0, vec![0, 1]), (-2.0, vec![0, 1, 2])]).unwrap();
        let m = build_mubo_model(&BmpInstance::unconstrained(p)).unwrap();
        assert_eq!(m.lift.n_y(), 2);
        assert_eq!(m.targets.len(), 1);
        assert_eq!(m.targets[0].ss.level, Level::Hypograph);
        assert_eq!(m.t_bounds(), (-2.0, 3.0));

        let obj = MultilinearFunction::new(2, vec![(1.0, vec![0]), (-1.0, vec![1])]).unwrap();
        let con = MultilinearFunction::new(2, vec![(1.0, vec![0, 1])]).unwrap();
        let inst = BmpInstance::new(obj.clone(), vec![con], None).unwrap();
        let m = build_mubo_model(&inst).unwrap();
        assert_eq!(m.targets[1].ss.level, Level::Superlevel);
        assert_eq!(m.targets[1].role, TargetRole::Constraint(0));

        let linear = build_mubo_model(&BmpInstance::unconstrained(obj)).unwrap();
        assert_eq!(linear.lift.n_y(), 0);
        assert!((solve(&linear.lp).unwrap().objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_optimum_respects_constraints() {
        let obj = MultilinearFunction::new(3, vec![(1.0, vec![0]), (1.0, vec![1]), (1.0, vec![2])]).unwrap();
        let inst = BmpInstance::new(obj, vec![], Some(2)).unwrap();
        let m = build_mubo_model(&inst).unwrap();
        let (v, x) = m.bruteforce_optimum().unwrap().unwrap();
        assert_eq!(v, 2.0);
        assert_eq!(x.iter().filter(|&&b| b).count(), 2);
        let k3m = build_maxcut_model(&k3()).unwrap();
        assert_eq!(k3m.bruteforce_optimum().unwrap().unwrap().0, 2.0);
    }
}

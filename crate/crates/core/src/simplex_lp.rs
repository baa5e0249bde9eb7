//! Dense bounded-variable primal simplex with access to the optimal tableau.
//!
//! Every row `a x (<=|=|>=) b` receives a logical variable so that the row
//! reads `a x + c s = b` with `c = +1` for `<=` and `=` rows and `c = -1` for
//! `>=` rows. Logicals are bounded by `[0, +inf)`, or `[0, 0]` on equality
//! rows. The "full space" of a model is its structural columns followed by one
//! logical per row; corner polyhedra live in that space.

use std::fmt::Write as _;

use crate::error::{Error, Result};

const PRIMAL_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl RowSense {
    fn logical_sign(self) -> f64 {
        match self {
            RowSense::Ge => -1.0,
            RowSense::Le | RowSense::Eq => 1.0,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        }
    }
}

/// A linear program over bounded structural columns with dense rows.
#[derive(Debug, Clone)]
pub struct LpModel {
    pub sense: ObjSense,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub row_sense: Vec<RowSense>,
    pub rhs: Vec<f64>,
}

impl LpModel {
    pub fn new(sense: ObjSense) -> Self {
        Self {
            sense,
            objective: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            names: Vec::new(),
            rows: Vec::new(),
            row_sense: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn n_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Size of the full space (structural plus logical columns).
    pub fn n_full(&self) -> usize {
        self.n_cols() + self.n_rows()
    }

    pub fn add_col(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.names.push(name.into());
        for row in &mut self.rows {
            row.push(0.0);
        }
        self.objective.len() - 1
    }

    /// Adds a row given sparse `(column, coefficient)` pairs; repeated columns accumulate.
    pub fn add_row(&mut self, coefs: &[(usize, f64)], sense: RowSense, rhs: f64) -> usize {
        let mut row = vec![0.0; self.n_cols()];
        for &(j, a) in coefs {
            row[j] += a;
        }
        self.add_dense_row(row, sense, rhs)
    }

    pub fn add_dense_row(&mut self, row: Vec<f64>, sense: RowSense, rhs: f64) -> usize {
        debug_assert_eq!(row.len(), self.n_cols());
        self.rows.push(row);
        self.row_sense.push(sense);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_cols();
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::Input(format!(
                    "column {} has inconsistent bounds [{lo}, {hi}]",
                    self.names[j]
                )));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::Input(format!("column {} has a non-finite cost", self.names[j])));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n || row.iter().any(|a| !a.is_finite()) || !self.rhs[i].is_finite() {
                return Err(Error::Input(format!("row {i} has invalid data")));
            }
        }
        Ok(())
    }

    /// Sign `c` of the logical of row `i` in `a x + c s = b`.
    pub fn logical_sign(&self, i: usize) -> f64 {
        self.row_sense[i].logical_sign()
    }

    /// Full-space variable `j` as an affine function `g x + h` of the structural columns.
    pub fn full_as_affine(&self, j: usize) -> (Vec<f64>, f64) {
        let n = self.n_cols();
        if j < n {
            let mut g = vec![0.0; n];
            g[j] = 1.0;
            (g, 0.0)
        } else {
            let i = j - n;
            let c = self.logical_sign(i);
            (self.rows[i].iter().map(|a| -c * a).collect(), c * self.rhs[i])
        }
    }

    /// Extends structural values with the logical values they imply.
    pub fn full_point(&self, x: &[f64]) -> Vec<f64> {
        let mut z = x.to_vec();
        for i in 0..self.n_rows() {
            let ax: f64 = self.rows[i].iter().zip(x).map(|(a, v)| a * v).sum();
            z.push(self.logical_sign(i) * (self.rhs[i] - ax));
        }
        z
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.n_cols() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for (i, row) in self.rows.iter().enumerate() {
            let ax: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let r = ax - self.rhs[i];
            worst = worst.max(match self.row_sense[i] {
                RowSense::Le => r,
                RowSense::Ge => -r,
                RowSense::Eq => r.abs(),
            });
        }
        worst
    }

    /// Human-readable LP listing with 12 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}",
            match self.sense {
                ObjSense::Maximize => "maximize",
                ObjSense::Minimize => "minimize",
            }
        );
        let _ = writeln!(out, "  {}", self.linear_text(&self.objective));
        let _ = writeln!(out, "subject to");
        for (i, row) in self.rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "  r{i}: {} {} {}",
                self.linear_text(row),
                self.row_sense[i].symbol(),
                sig12(self.rhs[i])
            );
        }
        let _ = writeln!(out, "bounds");
        for j in 0..self.n_cols() {
            let _ = writeln!(
                out,
                "  {} <= {} <= {}",
                sig12(self.lower[j]),
                self.names[j],
                sig12(self.upper[j])
            );
        }
        out
    }

    fn linear_text(&self, coefs: &[f64]) -> String {
        let parts: Vec<String> = coefs
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(j, &a)| format!("{} {}", sig12(a), self.names[j]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Fixed-point decimal with 12 significant digits.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return if v > 0.0 { "inf".into() } else if v < 0.0 { "-inf".into() } else { "nan".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    Free,
}

/// Basis in full-space indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub basic: Vec<usize>,
    pub state: Vec<VarState>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural values.
    pub x: Vec<f64>,
    /// Full-space values (structural then logical).
    pub full: Vec<f64>,
    pub objective: f64,
    pub basis: Basis,
    pub iterations: usize,
}

/// Corner polyhedron of a basis: apex plus one ray per movable nonbasic.
///
/// Each ray `j` carries its multiplier `eta_j(z) = g_j . x + h_j` as an affine
/// function of the structural columns; a point of the corner is
/// `apex + sum_j eta_j ray_j` with `eta >= 0`.
#[derive(Debug, Clone)]
pub struct CornerPolyhedron {
    pub apex: Vec<f64>,
    pub rays: Vec<Vec<f64>>,
    /// Full-space index of the nonbasic variable behind each ray.
    pub nonbasic: Vec<usize>,
    pub multipliers: Vec<(Vec<f64>, f64)>,
    pub n_struct: usize,
}

/// Apex and rays restricted to the `(x, t)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedCorner {
    pub x: Vec<f64>,
    pub t: f64,
    pub rays: Vec<(Vec<f64>, f64)>,
}

impl CornerPolyhedron {
    /// A corner given directly by an apex and a square, invertible ray matrix
    /// in a space that has no logical coordinates.
    pub fn from_rays(apex: Vec<f64>, rays: Vec<Vec<f64>>) -> Result<Self> {
        let d = apex.len();
        if rays.len() != d || rays.iter().any(|r| r.len() != d) {
            return Err(Error::Input(format!("expected {d} rays of length {d}")));
        }
        // columns of R are the rays; eta = R^{-1} (z - apex)
        let mut r = vec![vec![0.0; d]; d];
        for (j, ray) in rays.iter().enumerate() {
            for i in 0..d {
                r[i][j] = ray[i];
            }
        }
        let inv = invert(&r)?;
        let multipliers = inv
            .into_iter()
            .map(|g| {
                let h = -g.iter().zip(&apex).map(|(a, b)| a * b).sum::<f64>();
                (g, h)
            })
            .collect();
        Ok(Self {
            nonbasic: (0..d).collect(),
            apex,
            rays,
            multipliers,
            n_struct: d,
        })
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn project(&self, x_cols: &[usize], t_col: Option<usize>) -> Result<ProjectedCorner> {
        let dim = self.apex.len();
        if x_cols.iter().chain(t_col.iter()).any(|&c| c >= dim) {
            return Err(Error::Internal("projection column outside the corner space".into()));
        }
        let pick = |v: &[f64]| -> (Vec<f64>, f64) {
            (x_cols.iter().map(|&c| v[c]).collect(), t_col.map_or(0.0, |c| v[c]))
        };
        let (x, t) = pick(&self.apex);
        Ok(ProjectedCorner {
            x,
            t,
            rays: self.rays.iter().map(|r| pick(r)).collect(),
        })
    }

    /// Multipliers `eta(z)` of a structural point.
    pub fn eta(&self, z: &[f64]) -> Vec<f64> {
        self.multipliers
            .iter()
            .map(|(g, h)| g.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() + h)
            .collect()
    }

    /// Whether a structural point has nonnegative multipliers (up to `tol`).
    pub fn contains(&self, z: &[f64], tol: f64) -> bool {
        self.eta(z).iter().all(|&e| e >= -tol)
    }
}

fn invert(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|k| if k == i { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..d {
        let p = (col..d)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap_or(col);
        if m[p][col].abs() < SINGULAR_TOL {
            return Err(Error::Numeric("ray matrix is singular".into()));
        }
        m.swap(col, p);
        let piv = m[col][col];
        for v in m[col].iter_mut() {
            *v /= piv;
        }
        let pivot_row = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && row[col] != 0.0 {
                let f = row[col];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[d..].to_vec()).collect())
}

/// Stateful solver holding the tableau `B^{-1} [A | C]` of the current basis.
#[derive(Debug, Clone)]
pub struct Simplex {
    model: LpModel,
    n: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    tab: Vec<Vec<f64>>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    val: Vec<f64>,
    status: Option<LpStatus>,
    iterations: usize,
    since_refactor: usize,
}

impl Simplex {
    pub fn new(model: &LpModel) -> Result<Self> {
        model.validate()?;
        let n = model.n_cols();
        let m = model.n_rows();
        let sign = if model.sense == ObjSense::Maximize { -1.0 } else { 1.0 };
        let mut s = Self {
            model: model.clone(),
            n,
            lo: model.lower.clone(),
            hi: model.upper.clone(),
            cost: model.objective.iter().map(|c| sign * c).collect(),
            tab: Vec::with_capacity(m),
            basis: Vec::with_capacity(m),
            state: Vec::with_capacity(n + m),
            val: Vec::with_capacity(n + m),
            status: None,
            iterations: 0,
            since_refactor: 0,
        };
        for j in 0..n {
            let (lo, hi) = (s.lo[j], s.hi[j]);
            let (st, v) = if lo.is_finite() {
                (VarState::AtLower, lo)
            } else if hi.is_finite() {
                (VarState::AtUpper, hi)
            } else {
                (VarState::Free, 0.0)
            };
            s.state.push(st);
            s.val.push(v);
        }
        for i in 0..m {
            s.push_logical_row(i);
        }
        Ok(s)
    }

    /// Rebuilds a solver positioned at a given basis of `model`.
    pub fn from_basis(model: &LpModel, basis: &Basis) -> Result<Self> {
        let mut s = Self::new(model)?;
        if basis.state.len() != s.lo.len() || basis.basic.len() != s.basis.len() {
            return Err(Error::Input("basis does not match the model dimensions".into()));
        }
        s.basis = basis.basic.clone();
        s.state = basis.state.clone();
        for j in 0..s.lo.len() {
            s.val[j] = match s.state[j] {
                VarState::AtLower => s.lo[j],
                VarState::AtUpper => s.hi[j],
                VarState::Free | VarState::Basic => 0.0,
            };
        }
        s.refactor()?;
        s.status = Some(LpStatus::Optimal);
        Ok(s)
    }

    fn n_full(&self) -> usize {
        self.lo.len()
    }

    /// Appends the logical column and basic tableau row of model row `i`.
    fn push_logical_row(&mut self, i: usize) {
        let n_full = self.n_full() + 1;
        let c = self.model.logical_sign(i);
        let a = &self.model.rows[i];
        for row in &mut self.tab {
            row.push(0.0);
        }
        let mut row = vec![0.0; n_full];
        row[..self.n].copy_from_slice(a);
        row[n_full - 1] = c;
        // eliminate current basic columns so the tableau keeps an identity on the basis
        for (k, &b) in self.basis.iter().enumerate() {
            let f = row[b];
            if f != 0.0 {
                for (v, t) in row.iter_mut().zip(&self.tab[k]) {
                    *v -= f * t;
                }
            }
        }
        for v in row.iter_mut() {
            *v *= c;
        }
        let ax: f64 = a.iter().zip(&self.val[..self.n]).map(|(p, q)| p * q).sum();
        let s = c * (self.model.rhs[i] - ax);
        self.lo.push(0.0);
        self.hi.push(if self.model.row_sense[i] == RowSense::Eq { 0.0 } else { f64::INFINITY });
        self.cost.push(0.0);
        self.state.push(VarState::Basic);
        self.val.push(s);
        self.basis.push(n_full - 1);
        self.tab.push(row);
    }

    /// Adds a row to the model and re-optimizes from the current basis on the next solve.
    pub fn add_row(&mut self, coefs: Vec<f64>, sense: RowSense, rhs: f64) -> Result<()> {
        if coefs.len() != self.n || coefs.iter().any(|a| !a.is_finite()) || !rhs.is_finite() {
            return Err(Error::Input("cut row has invalid data".into()));
        }
        let i = self.model.add_dense_row(coefs, sense, rhs);
        self.push_logical_row(i);
        self.status = None;
        Ok(())
    }

    pub fn model(&self) -> &LpModel {
        &self.model
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.basis.len();
        let n_full = self.n_full();
        let mut rows: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut r = vec![0.0; n_full + 1];
                r[..self.n].copy_from_slice(&self.model.rows[i]);
                r[self.n + i] = self.model.logical_sign(i);
                r[n_full] = self.model.rhs[i];
                r
            })
            .collect();
        let mut assigned = vec![false; m];
        let mut owner = vec![usize::MAX; m];
        for (k, &col) in self.basis.iter().enumerate() {
            let p = (0..m)
                .filter(|&i| !assigned[i])
                .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
                .ok_or_else(|| Error::Internal("refactor ran out of rows".into()))?;
            let piv = rows[p][col];
            if piv.abs() < SINGULAR_TOL {
                return Err(Error::Numeric(format!(
                    "singular basis during refactorization (column {col}, pivot {piv:e})"
                )));
            }
            assigned[p] = true;
            owner[k] = p;
            for v in rows[p].iter_mut() {
                *v /= piv;
            }
            let prow = rows[p].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != p && row[col] != 0.0 {
                    let f = row[col];
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let mut tab = Vec::with_capacity(m);
        for &p in &owner {
            tab.push(std::mem::take(&mut rows[p]));
        }
        for (k, row) in tab.iter_mut().enumerate() {
            let rhs = row.pop().unwrap_or(0.0);
            let mut v = rhs;
            for j in 0..n_full {
                if self.state[j] != VarState::Basic && row[j] != 0.0 {
                    v -= row[j] * self.val[j];
                }
            }
            self.val[self.basis[k]] = v;
            // clean exact identity on basic columns
            for (kk, &b) in self.basis.iter().enumerate() {
                row[b] = if kk == k { 1.0 } else { 0.0 };
            }
        }
        self.tab = tab;
        self.since_refactor = 0;
        Ok(())
    }

    fn iteration_limit(&self) -> usize {
        50 * (self.basis.len() + self.n_full()) + 1000
    }

    /// Runs primal phase 1 (composite) and phase 2 from the current basis.
    pub fn solve(&mut self) -> Result<LpStatus> {
        let m = self.basis.len();
        let n_full = self.n_full();
        let bland_after = 3 * (m + n_full);
        let mut degenerate_run = 0usize;
        let limit = self.iteration_limit();
        let mut local_iters = 0usize;
        let mut d = vec![0.0; n_full];
        let mut cb = vec![0.0; m];
        loop {
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            local_iters += 1;
            if local_iters > limit {
                let infeas = self.primal_infeasibility();
                return Err(Error::Numeric(format!(
                    "simplex iteration limit {limit} reached ({m} rows, {n_full} columns, infeasibility {infeas:e})"
                )));
            }
            let mut phase1 = false;
            for (k, &b) in self.basis.iter().enumerate() {
                let v = self.val[b];
                cb[k] = if v < self.lo[b] - PRIMAL_TOL {
                    phase1 = true;
                    -1.0
                } else if v > self.hi[b] + PRIMAL_TOL {
                    phase1 = true;
                    1.0
                } else {
                    0.0
                };
            }
            if !phase1 {
                for (k, &b) in self.basis.iter().enumerate() {
                    cb[k] = self.cost[b];
                }
            }
            for j in 0..n_full {
                d[j] = if phase1 || self.state[j] == VarState::Basic { 0.0 } else { self.cost[j] };
            }
            for (k, row) in self.tab.iter().enumerate() {
                let c = cb[k];
                if c != 0.0 {
                    for (dj, t) in d.iter_mut().zip(row) {
                        *dj -= c * t;
                    }
                }
            }
            let bland = degenerate_run >= bland_after;
            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..n_full {
                let dir = match self.state[j] {
                    VarState::Basic => continue,
                    _ if self.lo[j] == self.hi[j] => continue,
                    VarState::AtLower if d[j] < -DUAL_TOL => 1.0,
                    VarState::AtUpper if d[j] > DUAL_TOL => -1.0,
                    VarState::Free if d[j].abs() > DUAL_TOL => -d[j].signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if d[j].abs() > best {
                    best = d[j].abs();
                    entering = Some((j, dir));
                }
            }
            let Some((q, dir)) = entering else {
                let status = if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal };
                self.status = Some(status);
                return Ok(status);
            };

            let own = if dir > 0.0 { self.hi[q] - self.val[q] } else { self.val[q] - self.lo[q] };
            let mut leave: Option<(usize, f64, f64)> = None; // (row, ratio, bound reached)
            let mut best_ratio = f64::INFINITY;
            let mut best_alpha = 0.0;
            for k in 0..m {
                let t = self.tab[k][q];
                if t.abs() < PIVOT_TOL {
                    continue;
                }
                let b = self.basis[k];
                let alpha = -dir * t;
                let v = self.val[b];
                let (lo, hi) = (self.lo[b], self.hi[b]);
                let bound = if alpha > 0.0 {
                    if v > hi + PRIMAL_TOL {
                        continue;
                    }
                    if phase1 && v < lo - PRIMAL_TOL { lo } else { hi }
                } else {
                    if v < lo - PRIMAL_TOL {
                        continue;
                    }
                    if phase1 && v > hi + PRIMAL_TOL { hi } else { lo }
                };
                if !bound.is_finite() {
                    continue;
                }
                let ratio = ((bound - v) / alpha).max(0.0);
                let better = if bland {
                    ratio < best_ratio - 1e-12
                        || (ratio <= best_ratio + 1e-12
                            && leave.is_some_and(|(r, _, _)| b < self.basis[r]))
                } else {
                    ratio < best_ratio - 1e-12
                        || (ratio <= best_ratio + 1e-12 && alpha.abs() > best_alpha)
                };
                if leave.is_none() || better {
                    best_ratio = ratio;
                    best_alpha = alpha.abs();
                    leave = Some((k, ratio, bound));
                }
            }

            if own.is_finite() && own <= best_ratio {
                // bound flip without a basis change
                self.shift(q, dir, own);
                self.state[q] = if dir > 0.0 { VarState::AtUpper } else { VarState::AtLower };
                self.val[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                degenerate_run = if own <= 1e-12 { degenerate_run + 1 } else { 0 };
                self.iterations += 1;
                continue;
            }
            let Some((r, theta, bound)) = leave else {
                if phase1 {
                    return Err(Error::Numeric(
                        "phase 1 found an unbounded improving direction".into(),
                    ));
                }
                self.status = Some(LpStatus::Unbounded);
                return Ok(LpStatus::Unbounded);
            };
            self.shift(q, dir, theta);
            let leaving = self.basis[r];
            self.val[leaving] = bound;
            self.state[leaving] = if bound == self.lo[leaving] { VarState::AtLower } else { VarState::AtUpper };
            self.pivot(r, q);
            degenerate_run = if theta <= 1e-12 { degenerate_run + 1 } else { 0 };
            self.iterations += 1;
        }
    }

    fn shift(&mut self, q: usize, dir: f64, theta: f64) {
        if theta == 0.0 {
            return;
        }
        self.val[q] += dir * theta;
        for k in 0..self.basis.len() {
            let t = self.tab[k][q];
            if t != 0.0 {
                self.val[self.basis[k]] -= dir * theta * t;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.tab[r][q];
        for v in self.tab[r].iter_mut() {
            *v /= piv;
        }
        let prow = std::mem::take(&mut self.tab[r]);
        for (k, row) in self.tab.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
                row[q] = 0.0;
            }
        }
        self.tab[r] = prow;
        self.tab[r][q] = 1.0;
        self.basis[r] = q;
        self.state[q] = VarState::Basic;
        self.since_refactor += 1;
    }

    fn primal_infeasibility(&self) -> f64 {
        self.basis
            .iter()
            .map(|&b| (self.lo[b] - self.val[b]).max(self.val[b] - self.hi[b]).max(0.0))
            .sum()
    }

    pub fn status(&self) -> Option<LpStatus> {
        self.status
    }

    pub fn objective(&self) -> f64 {
        self.model.objective_value(&self.val[..self.n])
    }

    pub fn solution(&self) -> LpSolution {
        LpSolution {
            status: self.status.unwrap_or(LpStatus::Infeasible),
            x: self.val[..self.n].to_vec(),
            full: self.val.clone(),
            objective: self.objective(),
            basis: Basis {
                basic: self.basis.clone(),
                state: self.state.clone(),
            },
            iterations: self.iterations,
        }
    }

    /// Corner polyhedron of the current (optimal) basis.
    pub fn corner(&self) -> Result<CornerPolyhedron> {
        if self.status != Some(LpStatus::Optimal) {
            return Err(Error::Input("corner requires an optimal basis".into()));
        }
        let n_full = self.n_full();
        let mut rays = Vec::new();
        let mut nonbasic = Vec::new();
        let mut multipliers = Vec::new();
        for j in 0..n_full {
            let dir = match self.state[j] {
                VarState::Basic => continue,
                _ if self.lo[j] == self.hi[j] => continue,
                VarState::AtLower => 1.0,
                VarState::AtUpper => -1.0,
                VarState::Free => {
                    return Err(Error::Numeric(format!(
                        "free nonbasic variable {j} has no ray direction"
                    )))
                }
            };
            let mut ray = vec![0.0; n_full];
            ray[j] = dir;
            for (k, &b) in self.basis.iter().enumerate() {
                ray[b] = -dir * self.tab[k][j];
            }
            let (g, h) = self.model.full_as_affine(j);
            multipliers.push((
                g.into_iter().map(|v| dir * v).collect(),
                dir * (h - self.val[j]),
            ));
            rays.push(ray);
            nonbasic.push(j);
        }
        Ok(CornerPolyhedron {
            apex: self.val.clone(),
            rays,
            nonbasic,
            multipliers,
            n_struct: self.n,
        })
    }
}

/// Solves a model from scratch.
pub fn solve(model: &LpModel) -> Result<LpSolution> {
    let mut s = Simplex::new(model)?;
    s.solve()?;
    Ok(s.solution())
}

/// Corner polyhedron of an optimal solution, rebuilt from its basis.
pub fn corner(solution: &LpSolution, model: &LpModel) -> Result<CornerPolyhedron> {
    if solution.status != LpStatus::Optimal {
        return Err(Error::Input("corner requires an optimal solution".into()));
    }
    let mut s = Simplex::from_basis(model, &solution.basis)?;
    // keep the apex exactly at the reported primal values
    s.val.clone_from(&solution.full);
    s.corner()
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use proptest::prelude::*;

    fn tent() -> LpModel {
        // max t s.t. t <= 2 x1, t <= 2 - 2 x1
        let mut m = LpModel::new(ObjSense::Maximize);
        let x = m.add_col("x1", 0.0, 1.0, 0.0);
        let t = m.add_col("t", f64::NEG_INFINITY, f64::INFINITY, 1.0);
        m.add_row(&[(t, 1.0), (x, -2.0)], RowSense::Le, 0.0);
        m.add_row(&[(t, 1.0), (x, 2.0)], RowSense::Le, 2.0);
        m
    }

    #[test]
    fn simple_models() {
        let mut m = LpModel::new(ObjSense::Maximize);
        let a = m.add_col("x1", 0.0, 1.0, 1.0);
        let b = m.add_col("x2", 0.0, 1.0, 1.0);
        m.add_row(&[(a, 1.0), (b, 1.0)], RowSense::Le, 1.0);
        let s = solve(&m).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);

        let s = solve(&tent()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.5).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);

        let mut m = LpModel::new(ObjSense::Minimize);
        let x = m.add_col("x1", f64::NEG_INFINITY, f64::INFINITY, 0.0);
        m.add_row(&[(x, 1.0)], RowSense::Ge, 2.0);
        m.add_row(&[(x, 1.0)], RowSense::Le, 1.0);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Infeasible);

        let mut m = LpModel::new(ObjSense::Maximize);
        let x = m.add_col("x1", 0.0, f64::INFINITY, 1.0);
        m.add_row(&[(x, 1.0)], RowSense::Ge, 1.0);
        assert_eq!(solve(&m).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn tent_corner_rays() {
        let m = tent();
        let s = solve(&m).unwrap();
        let c = corner(&s, &m).unwrap();
        assert_eq!(c.apex, s.full);
        let p = c.project(&[0], Some(1)).unwrap();
        let mut rays: Vec<(f64, f64)> = p.rays.iter().map(|(x, t)| (x[0], *t)).collect();
        rays.sort_by(|a, b| b.0.total_cmp(&a.0));
        assert!((rays[0].0 - 0.25).abs() < 1e-12 && (rays[0].1 + 0.5).abs() < 1e-12);
        assert!((rays[1].0 + 0.25).abs() < 1e-12 && (rays[1].1 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bounded_column_ray_is_unit_direction() {
        let mut m = LpModel::new(ObjSense::Maximize);
        let x = m.add_col("x", 0.0, 1.0, 1.0);
        let y = m.add_col("y", 0.0, 1.0, 0.5);
        m.add_row(&[(x, 1.0), (y, 1.0)], RowSense::Le, 1.5);
        let s = solve(&m).unwrap();
        let c = corner(&s, &m).unwrap();
        let k = c.nonbasic.iter().position(|&j| j == x).unwrap();
        assert_eq!(c.rays[k][x], -1.0);
        assert_eq!(c.rays[k][y], 1.0);
    }

    #[test]
    fn warm_start_after_adding_rows() {
        let m = tent();
        let mut s = Simplex::new(&m).unwrap();
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        s.add_row(vec![0.0, 1.0], RowSense::Le, 0.75).unwrap();
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!((s.objective() - 0.75).abs() < 1e-12);
        s.add_row(vec![1.0, 0.0], RowSense::Ge, 0.9).unwrap();
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        assert!((s.objective() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn sig12_format() {
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(1234.5), "1234.5");
        assert_eq!(sig12(-2.0), "-2");
        assert!(tent().dump().contains("r1: 2 x1 + 1 t <= 2"));
    }

    /// Optimum over all vertices of `{x in [0,1]^k : A x <= b}` by enumerating
    /// every choice of `k` tight constraints.
    fn vertex_enumeration(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Option<f64> {
        let k = c.len();
        let mut cons: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().cloned()).collect();
        for j in 0..k {
            let mut e = vec![0.0; k];
            e[j] = 1.0;
            cons.push((e.clone(), 1.0));
            cons.push((e.iter().map(|v| -v).collect(), 0.0));
        }
        let mut best: Option<f64> = None;
        for pick in (0..cons.len()).combinations(k) {
            let mat: Vec<Vec<f64>> = pick.iter().map(|&i| cons[i].0.clone()).collect();
            let Ok(inv) = invert(&mat) else { continue };
            let x: Vec<f64> = inv
                .iter()
                .map(|row| row.iter().zip(&pick).map(|(v, &i)| v * cons[i].1).sum())
                .collect();
            if cons.iter().all(|(r, rhs)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9) {
                let v: f64 = c.iter().zip(&x).map(|(p, q)| p * q).sum();
                best = Some(best.map_or(v, |bv: f64| bv.max(v)));
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn matches_vertex_enumeration(
            a in proptest::collection::vec(proptest::collection::vec(-3i32..=3, 5), 1..5),
            b in proptest::collection::vec(-2i32..=4, 5),
            c in proptest::collection::vec(-3i32..=3, 5),
        ) {
            let a: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let b: Vec<f64> = b[..a.len()].iter().map(|&v| v as f64).collect();
            let c: Vec<f64> = c.iter().map(|&v| v as f64).collect();
            let mut m = LpModel::new(ObjSense::Maximize);
            for (j, &cj) in c.iter().enumerate() {
                m.add_col(format!("x{j}"), 0.0, 1.0, cj);
            }
            for (row, &rhs) in a.iter().zip(&b) {
                m.add_dense_row(row.clone(), RowSense::Le, rhs);
            }
            let s = solve(&m).unwrap();
            match vertex_enumeration(&a, &b, &c) {
                None => prop_assert_eq!(s.status, LpStatus::Infeasible),
                Some(v) => {
                    prop_assert_eq!(s.status, LpStatus::Optimal);
                    prop_assert!((s.objective - v).abs() <= 1e-8);
                    prop_assert!(m.max_violation(&s.x) <= 1e-7);
                    let cp = corner(&s, &m).unwrap();
                    // rays keep every row equation a x + c s = b
                    for ray in &cp.rays {
                        for i in 0..m.n_rows() {
                            let r: f64 = m.rows[i].iter().zip(ray).map(|(p, q)| p * q).sum::<f64>()
                                + m.logical_sign(i) * ray[m.n_cols() + i];
                            prop_assert!(r.abs() <= 1e-9);
                        }
                    }
                    // apex is a vertex: enough tight bounds
                    let tight = s.full.iter().enumerate().filter(|&(j, &v)| {
                        let (lo, hi) = if j < 5 { (0.0, 1.0) } else { (0.0, f64::INFINITY) };
                        (v - lo).abs() < 1e-9 || (v - hi).abs() < 1e-9
                    }).count();
                    prop_assert!(tight >= 5);
                }
            }
        }
    }
}

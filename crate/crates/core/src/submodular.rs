//! Value oracles for set functions over the Boolean hypercube.
//!
//! Every oracle is normalized so that its value at the all-zero point is
//! exactly zero; the raw value at the origin is kept as an offset so that
//! callers can translate bounds back into the original objective scale.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{capacity, Error, Result};

/// Absolute tolerance used by every brute-force structural check.
pub const STRUCTURAL_TOL: f64 = 1e-9;

/// Largest dimension accepted by [`is_submodular_bruteforce`].
pub const BRUTEFORCE_SUBMODULAR_LIMIT: usize = 14;

/// Weighted undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, w) in &edges {
            if i >= n || j >= n {
                return Err(Error::Input(format!(
                    "edge ({i}, {j}) references a vertex outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::Input(format!("self loop on vertex {i}")));
            }
            if !w.is_finite() {
                return Err(Error::Input(format!("edge ({i}, {j}) has weight {w}")));
            }
        }
        Ok(Self { n, edges })
    }

    /// Edges with parallel copies merged and endpoints ordered `i < j`.
    pub fn merged_edges(&self) -> Vec<(usize, usize, f64)> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(i, j, w) in &self.edges {
            let key = if i < j { (i, j) } else { (j, i) };
            *merged.entry(key).or_insert(0.0) += w;
        }
        merged.into_iter().map(|((i, j), w)| (i, j, w)).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Cut capacity of the vertex set indicated by `x`.
    pub fn cut_value(&self, x: &[bool]) -> f64 {
        self.edges
            .iter()
            .filter(|&&(i, j, _)| x[i] != x[j])
            .map(|e| e.2)
            .sum()
    }
}

/// One monomial `coefficient * prod_{j in support} x_j` with a sorted, nonempty support.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub support: Vec<usize>,
}

/// Boolean multilinear polynomial with distinct, nonempty term supports.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearFunction {
    n: usize,
    terms: Vec<Term>,
}

impl MultilinearFunction {
    /// Builds a polynomial from `(coefficient, support)` pairs using 0-based indices.
    ///
    /// Repeated indices inside a support collapse (`x_j^2 = x_j` on binaries),
    /// duplicate supports are merged by summing coefficients, and terms whose
    /// merged coefficient is zero are dropped. Empty supports are rejected since
    /// constants belong in the normalization offset.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (f64, Vec<usize>)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("polynomial dimension must be positive".into()));
        }
        let mut merged: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for (coefficient, mut support) in terms {
            if !coefficient.is_finite() {
                return Err(Error::Input(format!("non-finite coefficient {coefficient}")));
            }
            if support.is_empty() {
                return Err(Error::Input(
                    "constant terms are not allowed; fold them into the offset".into(),
                ));
            }
            if let Some(&bad) = support.iter().find(|&&j| j >= n) {
                return Err(Error::Input(format!("index {bad} outside 0..{n}")));
            }
            support.sort_unstable();
            support.dedup();
            *merged.entry(support).or_insert(0.0) += coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, a)| *a != 0.0)
            .map(|(support, coefficient)| Term {
                coefficient,
                support,
            })
            .collect();
        Ok(Self { n, terms })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.support.len()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates the polynomial at an arbitrary real point.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * t.support.iter().map(|&j| x[j]).product::<f64>())
            .sum()
    }

    pub fn eval_binary(&self, x: &[bool]) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.support.iter().all(|&j| x[j]))
            .map(|t| t.coefficient)
            .sum()
    }

    fn filtered(&self, keep: impl Fn(f64) -> bool, scale: f64) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|t| keep(t.coefficient))
                .map(|t| Term {
                    coefficient: scale * t.coefficient,
                    support: t.support.clone(),
                })
                .collect(),
        }
    }

    /// Sum of negative coefficients and sum of positive coefficients.
    pub fn coefficient_range(&self) -> (f64, f64) {
        self.terms.iter().fold((0.0, 0.0), |(lo, hi), t| {
            (lo + t.coefficient.min(0.0), hi + t.coefficient.max(0.0))
        })
    }
}

impl fmt::Display for MultilinearFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " {} ", if t.coefficient < 0.0 { '-' } else { '+' })?;
                write!(f, "{}", t.coefficient.abs())?;
            } else {
                write!(f, "{}", t.coefficient)?;
            }
            for j in &t.support {
                write!(f, "*x{}", j + 1)?;
            }
        }
        Ok(())
    }
}

/// Dense `rows x cols` matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Input(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn column(values: Vec<f64>) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }
}

/// Bayesian D-optimal design data: `log det(eps I + sum_j x_j M_j M_j^T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDetDesign {
    pub m: usize,
    pub factors: Vec<DenseMatrix>,
    pub epsilon: f64,
}

impl LogDetDesign {
    pub fn new(m: usize, factors: Vec<DenseMatrix>, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::Input(format!("regularization must be positive, got {epsilon}")));
        }
        if factors.is_empty() {
            return Err(Error::Input("design needs at least one factor".into()));
        }
        if let Some(bad) = factors.iter().position(|f| f.rows != m) {
            return Err(Error::Input(format!("factor {bad} does not have {m} rows")));
        }
        Ok(Self { m, factors, epsilon })
    }

    fn information_matrix(&self, x: &[bool]) -> Vec<f64> {
        let m = self.m;
        let mut s = vec![0.0; m * m];
        for i in 0..m {
            s[i * m + i] = self.epsilon;
        }
        for (factor, _) in self.factors.iter().zip(x).filter(|(_, &on)| on) {
            for a in 0..m {
                for b in 0..=a {
                    let v: f64 = (0..factor.cols).map(|c| factor.at(a, c) * factor.at(b, c)).sum();
                    s[a * m + b] += v;
                }
            }
        }
        s
    }

    /// Raw log-determinant; NaN if the Cholesky factorization breaks down.
    fn log_det(&self, x: &[bool]) -> f64 {
        let m = self.m;
        let mut l = self.information_matrix(x);
        let mut acc = 0.0;
        for j in 0..m {
            let mut d = l[j * m + j];
            for k in 0..j {
                d -= l[j * m + k] * l[j * m + k];
            }
            if !(d > 0.0) {
                return f64::NAN;
            }
            let d = d.sqrt();
            l[j * m + j] = d;
            acc += d.ln();
            for i in (j + 1)..m {
                let mut v = l[i * m + j];
                for k in 0..j {
                    v -= l[i * m + k] * l[j * m + k];
                }
                l[i * m + j] = v / d;
            }
        }
        2.0 * acc
    }
}

type Callback = dyn Fn(&[bool]) -> f64 + Send + Sync;

enum OracleKind {
    GraphCut {
        graph: WeightedGraph,
        adjacency: Vec<Vec<(usize, f64)>>,
    },
    Multilinear(MultilinearFunction),
    LogDet(LogDetDesign),
    Modular(Vec<f64>),
    Callback(Box<Callback>),
}

/// Normalized value oracle `f: {0,1}^n -> R` with `f(0) = 0`.
///
/// Cloning is cheap; the evaluator is shared behind an `Arc` and is safe to
/// use from several threads.
#[derive(Clone)]
pub struct SubmodularOracle {
    n: usize,
    kind: Arc<OracleKind>,
    offset: f64,
}

impl fmt::Debug for SubmodularOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.kind {
            OracleKind::GraphCut { .. } => "graph-cut",
            OracleKind::Multilinear(_) => "multilinear",
            OracleKind::LogDet(_) => "log-det",
            OracleKind::Modular(_) => "modular",
            OracleKind::Callback(_) => "callback",
        };
        f.debug_struct("SubmodularOracle")
            .field("kind", &kind)
            .field("n", &self.n)
            .field("offset", &self.offset)
            .finish()
    }
}

impl SubmodularOracle {
    fn from_kind(n: usize, kind: OracleKind) -> Self {
        let mut oracle = Self {
            n,
            kind: Arc::new(kind),
            offset: 0.0,
        };
        oracle.offset = oracle.raw(&vec![false; n]);
        oracle
    }

    /// Wraps an arbitrary evaluator. The raw value at the origin becomes the offset.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(&[bool]) -> f64 + Send + Sync + 'static,
    {
        if n == 0 {
            return Err(Error::Input("oracle dimension must be positive".into()));
        }
        let oracle = Self::from_kind(n, OracleKind::Callback(Box::new(f)));
        if !oracle.offset.is_finite() {
            return Err(Error::Numeric("callback is not finite at the origin".into()));
        }
        Ok(oracle)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw value at the all-zero point that was subtracted during normalization.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn raw(&self, x: &[bool]) -> f64 {
        match &*self.kind {
            OracleKind::GraphCut { graph, .. } => graph.cut_value(x),
            OracleKind::Multilinear(p) => p.eval_binary(x),
            OracleKind::LogDet(d) => d.log_det(x),
            OracleKind::Modular(c) => c.iter().zip(x).filter(|(_, &b)| b).map(|(c, _)| c).sum(),
            OracleKind::Callback(f) => f(x),
        }
    }

    /// Normalized value at a binary point.
    pub fn evaluate(&self, x: &[bool]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Input(format!(
                "point has length {}, oracle dimension is {}",
                x.len(),
                self.n
            )));
        }
        let v = self.raw(x) - self.offset;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Numeric(format!("oracle returned {v}")))
        }
    }

    /// Normalized value without the dimension check; callers guarantee `x.len() == n`.
    pub(crate) fn value(&self, x: &[bool]) -> f64 {
        debug_assert_eq!(x.len(), self.n);
        self.raw(x) - self.offset
    }

    /// Normalized values along the prefix chain `0 = v^0 < v^1 < ... < v^n = 1`
    /// induced by `order` (0-based).
    pub fn chain_values(&self, order: &[usize]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(order.len(), n);
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        match &*self.kind {
            OracleKind::GraphCut { adjacency, .. } => {
                let mut inside = vec![false; n];
                let mut current = 0.0;
                for &v in order {
                    let mut delta = 0.0;
                    for &(u, w) in &adjacency[v] {
                        if inside[u] {
                            delta -= w;
                        } else {
                            delta += w;
                        }
                    }
                    inside[v] = true;
                    current += delta;
                    values.push(current);
                }
            }
            OracleKind::Multilinear(p) => {
                let mut rank = vec![0usize; n];
                for (pos, &j) in order.iter().enumerate() {
                    rank[j] = pos;
                }
                let mut gains = vec![0.0; n];
                for t in p.terms() {
                    let completes = t.support.iter().map(|&j| rank[j]).max().unwrap_or(0);
                    gains[completes] += t.coefficient;
                }
                let mut current = 0.0;
                for g in gains {
                    current += g;
                    values.push(current);
                }
            }
            OracleKind::Modular(c) => {
                let mut current = 0.0;
                for &j in order {
                    current += c[j];
                    values.push(current);
                }
            }
            _ => {
                let mut x = vec![false; n];
                for &j in order {
                    x[j] = true;
                    values.push(self.value(&x));
                }
            }
        }
        values
    }

    /// Table of normalized values indexed by bitmask (bit `j` set means `x_j = 1`).
    pub fn value_table(&self) -> Result<Vec<f64>> {
        capacity("value table", self.n, 24)?;
        let n = self.n;
        let mut x = vec![false; n];
        let mut table = Vec::with_capacity(1 << n);
        for mask in 0u32..(1u32 << n) {
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = mask >> j & 1 == 1;
            }
            table.push(self.evaluate(&x)?);
        }
        Ok(table)
    }

    /// Coefficients if this is a modular oracle.
    pub fn as_modular(&self) -> Option<&[f64]> {
        match &*self.kind {
            OracleKind::Modular(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_multilinear(&self) -> Option<&MultilinearFunction> {
        match &*self.kind {
            OracleKind::Multilinear(p) => Some(p),
            _ => None,
        }
    }

    /// True when the oracle is structurally the zero function.
    pub fn is_structurally_zero(&self) -> bool {
        match &*self.kind {
            OracleKind::Multilinear(p) => p.is_zero(),
            OracleKind::Modular(c) => c.iter().all(|&v| v == 0.0),
            OracleKind::GraphCut { graph, .. } => graph.edges.iter().all(|e| e.2 == 0.0),
            _ => false,
        }
    }
}

/// Cut capacity oracle of a graph with nonnegative weights.
pub fn cut_oracle(graph: &WeightedGraph) -> Result<SubmodularOracle> {
    if graph.n == 0 {
        return Err(Error::Input("graph has no vertices".into()));
    }
    if let Some(&(i, j, w)) = graph.edges.iter().find(|e| e.2 < 0.0) {
        return Err(Error::Model(format!(
            "edge ({}, {}) has negative weight {w}; the cut function would not be submodular",
            i + 1,
            j + 1
        )));
    }
    let mut adjacency = vec![Vec::new(); graph.n];
    for &(i, j, w) in &graph.edges {
        adjacency[i].push((j, w));
        adjacency[j].push((i, w));
    }
    Ok(SubmodularOracle::from_kind(
        graph.n,
        OracleKind::GraphCut {
            graph: graph.clone(),
            adjacency,
        },
    ))
}

/// Raw evaluator of a multilinear polynomial (not necessarily submodular).
pub fn multilinear_oracle(p: &MultilinearFunction) -> SubmodularOracle {
    SubmodularOracle::from_kind(p.n(), OracleKind::Multilinear(p.clone()))
}

pub fn modular_oracle(c: Vec<f64>) -> Result<SubmodularOracle> {
    if c.is_empty() {
        return Err(Error::Input("modular oracle needs at least one coefficient".into()));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("modular coefficients must be finite".into()));
    }
    Ok(SubmodularOracle::from_kind(c.len(), OracleKind::Modular(c)))
}

/// `log det(eps I + sum_j x_j M_j M_j^T) - m log eps`.
pub fn logdet_oracle(d: &LogDetDesign) -> Result<SubmodularOracle> {
    let oracle = SubmodularOracle::from_kind(d.factors.len(), OracleKind::LogDet(d.clone()));
    if !oracle.offset.is_finite() {
        return Err(Error::Numeric("factorization of eps*I failed".into()));
    }
    Ok(oracle)
}

/// Which side of `f(x) >= l * t` is modelled: `l = 1` (hypograph) or `l = 0` (superlevel set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Level {
    Superlevel,
    Hypograph,
}

impl Level {
    pub fn ell(self) -> f64 {
        match self {
            Level::Superlevel => 0.0,
            Level::Hypograph => 1.0,
        }
    }
}

/// Difference `f1 - f2` of two normalized submodular functions with a level flag.
#[derive(Debug, Clone)]
pub struct SsFunction {
    pub f1: SubmodularOracle,
    pub f2: SubmodularOracle,
    pub level: Level,
}

impl SsFunction {
    pub fn new(f1: SubmodularOracle, f2: SubmodularOracle, level: Level) -> Result<Self> {
        if f1.n() != f2.n() {
            return Err(Error::Input(format!(
                "SS parts have dimensions {} and {}",
                f1.n(),
                f2.n()
            )));
        }
        Ok(Self { f1, f2, level })
    }

    /// The hypograph of a single submodular function (`f2 = 0`, `l = 1`).
    pub fn hypograph(f: SubmodularOracle) -> Self {
        let zero = SubmodularOracle::from_kind(f.n(), OracleKind::Modular(vec![0.0; f.n()]));
        Self {
            f1: f,
            f2: zero,
            level: Level::Hypograph,
        }
    }

    pub fn with_level(mut self, level: Level) -> Self {
        self.level = level;
        self
    }

    pub fn n(&self) -> usize {
        self.f1.n()
    }

    pub fn value(&self, x: &[bool]) -> Result<f64> {
        Ok(self.f1.evaluate(x)? - self.f2.evaluate(x)?)
    }
}

/// Sign split of a multilinear polynomial into two submodular parts.
///
/// `f1` keeps the negative-coefficient terms and `f2` holds the negated
/// positive-coefficient terms, so that `p = f1 - f2` on `{0,1}^n`.
pub fn ss_decompose(p: &MultilinearFunction) -> SsFunction {
    let f1 = p.filtered(|a| a < 0.0, 1.0);
    let f2 = p.filtered(|a| a > 0.0, -1.0);
    SsFunction {
        f1: multilinear_oracle(&f1),
        f2: multilinear_oracle(&f2),
        level: Level::Hypograph,
    }
}

/// Checks `f(x) + f(y) >= f(x | y) + f(x & y)` for every pair of binary points.
pub fn is_submodular_bruteforce(oracle: &SubmodularOracle) -> Result<bool> {
    capacity("submodularity check", oracle.n(), BRUTEFORCE_SUBMODULAR_LIMIT)?;
    let table = oracle.value_table()?;
    let size = table.len();
    for a in 0..size {
        for b in (a + 1)..size {
            if table[a] + table[b] + STRUCTURAL_TOL < table[a | b] + table[a & b] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Binary point with bits of `mask` set.
pub fn bits(mask: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| mask >> j & 1 == 1).collect()
}

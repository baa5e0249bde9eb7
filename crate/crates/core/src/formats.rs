//! Plain-text instance formats.
//!
//! Graph files (Biq Mac style) start with `n m` followed by `m` lines `i j w`
//! with 1-based vertices. Polynomial files start with `n K` followed by `K`
//! lines `a j1 j2 ... jd` with 1-based indices. A polynomial file may append
//! constraint blocks, each opened by `constraint K` and followed by `K` term
//! lines whose sum must be nonnegative, and a single `cardinality k` line that
//! bounds `sum x_j <= k`. Blank lines and text after `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::models::BmpInstance;
use crate::submodular::{MultilinearFunction, WeightedGraph};

/// Kind of instance a path holds, decided by its extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Graph,
    Polynomial,
}

impl InstanceKind {
    pub fn of_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mubo") | Some("poly") => InstanceKind::Polynomial,
            _ => InstanceKind::Graph,
        }
    }
}

/// A parsed instance of either kind.
#[derive(Debug, Clone)]
pub enum Instance {
    Graph(WeightedGraph),
    Polynomial(BmpInstance),
}

impl Instance {
    pub fn n(&self) -> usize {
        match self {
            Instance::Graph(g) => g.n,
            Instance::Polynomial(p) => p.n(),
        }
    }
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    match InstanceKind::of_path(path) {
        InstanceKind::Graph => parse_graph(&text).map(Instance::Graph),
        InstanceKind::Polynomial => parse_polynomial(&text).map(Instance::Polynomial),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
        }
    }

    /// Next nonempty line with comments removed, as (1-based line number, tokens).
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (k, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((k + 1, tokens));
            }
        }
        None
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn int_token(line: usize, token: &str, what: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{token}`")))
}

fn real_token(line: usize, token: &str, what: &str) -> Result<f64> {
    let v = token
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{token}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(parse_err(line, format!("{what} must be finite, found `{token}`")))
    }
}

fn one_based(line: usize, token: &str, n: usize) -> Result<usize> {
    let j = int_token(line, token, "a 1-based index")?;
    if j == 0 || j > n {
        return Err(parse_err(line, format!("index {j} outside 1..{n}")));
    }
    Ok(j - 1)
}

fn header(lines: &mut Lines<'_>, second: &str) -> Result<(usize, usize)> {
    let (line, tokens) = lines
        .next_tokens()
        .ok_or_else(|| parse_err(1, "missing header line"))?;
    if tokens.len() != 2 {
        return Err(parse_err(line, format!("header must be `n {second}`")));
    }
    let n = int_token(line, tokens[0], "dimension n")?;
    if n == 0 {
        return Err(parse_err(line, "dimension must be positive"));
    }
    Ok((n, int_token(line, tokens[1], second)?))
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = Lines::new(text);
    let (n, m) = header(&mut lines, "m")?;
    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (line, tokens) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(0, format!("expected {m} edges, found {k}")))?;
        if tokens.len() != 3 {
            return Err(parse_err(line, "edge line must be `i j w`"));
        }
        let i = one_based(line, tokens[0], n)?;
        let j = one_based(line, tokens[1], n)?;
        if i == j {
            return Err(parse_err(line, format!("self loop on vertex {}", i + 1)));
        }
        edges.push((i, j, real_token(line, tokens[2], "weight")?));
    }
    if let Some((line, _)) = lines.next_tokens() {
        return Err(parse_err(line, "unexpected content after the edge list"));
    }
    WeightedGraph::new(n, edges)
}

fn term_block(lines: &mut Lines<'_>, n: usize, count: usize) -> Result<Vec<(f64, Vec<usize>)>> {
    let mut terms = Vec::with_capacity(count);
    for k in 0..count {
        let (line, tokens) = lines
            .next_tokens()
            .ok_or_else(|| parse_err(0, format!("expected {count} terms, found {k}")))?;
        let a = real_token(line, tokens[0], "coefficient")?;
        if tokens.len() == 1 {
            return Err(parse_err(
                line,
                "constant terms are not allowed; every term needs at least one index",
            ));
        }
        let support = tokens[1..]
            .iter()
            .map(|t| one_based(line, t, n))
            .collect::<Result<Vec<_>>>()?;
        terms.push((a, support));
    }
    Ok(terms)
}

pub fn parse_polynomial(text: &str) -> Result<BmpInstance> {
    let mut lines = Lines::new(text);
    let (n, k) = header(&mut lines, "K")?;
    let objective = MultilinearFunction::new(n, term_block(&mut lines, n, k)?)?;
    let mut constraints = Vec::new();
    let mut cardinality = None;
    while let Some((line, tokens)) = lines.next_tokens() {
        match (tokens[0], tokens.len()) {
            ("constraint", 2) => {
                let count = int_token(line, tokens[1], "term count")?;
                constraints.push(MultilinearFunction::new(n, term_block(&mut lines, n, count)?)?);
            }
            ("cardinality", 2) if cardinality.is_none() => {
                cardinality = Some(int_token(line, tokens[1], "cardinality bound")?);
            }
            _ => return Err(parse_err(line, format!("unexpected line starting with `{}`", tokens[0]))),
        }
    }
    BmpInstance::new(objective, constraints, cardinality)
}

fn write_terms(out: &mut String, p: &MultilinearFunction) {
    for t in p.terms() {
        let _ = write!(out, "{}", t.coefficient);
        for j in &t.support {
            let _ = write!(out, " {}", j + 1);
        }
        out.push('\n');
    }
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = format!("{} {}\n", g.n, g.edges.len());
    for &(i, j, w) in &g.edges {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, w);
    }
    out
}

pub fn write_polynomial(inst: &BmpInstance) -> String {
    let mut out = format!("{} {}\n", inst.n(), inst.objective.terms().len());
    write_terms(&mut out, &inst.objective);
    for c in &inst.constraints {
        let _ = writeln!(out, "constraint {}", c.terms().len());
        write_terms(&mut out, c);
    }
    if let Some(k) = inst.cardinality {
        let _ = writeln!(out, "cardinality {k}");
    }
    out
}

/// Reads the reference primal bound stored next to an instance in `<instance>.ref`.
pub fn read_reference(path: &Path) -> Result<Option<f64>> {
    let mut sidecar = path.as_os_str().to_owned();
    sidecar.push(".ref");
    let sidecar = Path::new(&sidecar);
    if !sidecar.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(sidecar)?;
    let mut lines = Lines::new(&text);
    let (line, tokens) = lines
        .next_tokens()
        .ok_or_else(|| parse_err(1, "empty reference file"))?;
    real_token(line, tokens[0], "reference value").map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let text = "3 3\n1 2 1\n1 3 1\n2 3 2.5\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n, 3);
        assert_eq!(g.edges[2], (1, 2, 2.5));
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn graph_errors_carry_line_numbers() {
        match parse_graph("3 2\n1 2 1\n\n1 4 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_graph("3 1\n1 1 1\n").is_err());
        assert!(parse_graph("3 2\n1 2 1\n").is_err());
        assert!(parse_graph("3 1\n1 2 x\n").is_err());
    }

    #[test]
    fn polynomial_round_trip() {
        let text = "3 2\n3 1 2\n-2 1 2 3\nconstraint 1\n1 1 2\ncardinality 2\n";
        let inst = parse_polynomial(text).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.objective.terms().len(), 2);
        assert_eq!(inst.constraints.len(), 1);
        assert_eq!(inst.cardinality, Some(2));
        let again = parse_polynomial(&write_polynomial(&inst)).unwrap();
        assert_eq!(again.objective, inst.objective);
        assert_eq!(again.constraints, inst.constraints);
    }

    #[test]
    fn constant_terms_rejected() {
        match parse_polynomial("2 2\n1 1 2\n5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn extension_decides_kind() {
        assert_eq!(InstanceKind::of_path(Path::new("a.mubo")), InstanceKind::Polynomial);
        assert_eq!(InstanceKind::of_path(Path::new("a.poly")), InstanceKind::Polynomial);
        assert_eq!(InstanceKind::of_path(Path::new("g05_60.0")), InstanceKind::Graph);
    }
}

//! Greedy vertices of the extended polymatroid and the extended envelope
//! `F(x) = max { s x : s a greedy vertex }`, valid on all of `R^n`.

use std::fmt;

use itertools::Itertools;

use crate::error::{capacity, Error, Result};
use crate::submodular::SubmodularOracle;

/// Largest dimension for which [`enumerate_vertices`] lists all `n!` vertices.
pub const ENUMERATION_LIMIT: usize = 8;

/// A permutation of `0..n`, stored as the image sequence `pi(0), ..., pi(n-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &j in &images {
            if j >= n || seen[j] {
                return Err(Error::Input(format!("{images:?} is not a permutation of 0..{n}")));
            }
            seen[j] = true;
        }
        Ok(Self(images))
    }

    /// Builds a permutation from 1-based images such as `(3, 2, 1)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Input("1-based permutation contains 0".into()));
        }
        Self::new(images.iter().map(|&j| j - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|j| j + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.one_based().iter().join(","))
    }
}

/// Vertex `sigma(pi)` of the extended polymatroid together with its permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyVertex {
    pub sigma: Vec<f64>,
    pub perm: Permutation,
}

/// Value and certifying subgradient of the extended envelope at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeEvaluation {
    pub value: f64,
    pub subgradient: Vec<f64>,
    pub perm: Permutation,
}

/// Permutation sorting `x` into nonincreasing order; ties go to the smaller index.
pub fn sort_permutation(x: &[f64]) -> Result<Permutation> {
    if let Some(j) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Input(format!("coordinate {j} is {}", x[j])));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    // sort_by is stable, so equal entries keep increasing index order
    order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).expect("finite"));
    Ok(Permutation(order))
}

fn sigma_from_chain(perm: &Permutation, chain: &[f64]) -> Vec<f64> {
    let mut sigma = vec![0.0; perm.len()];
    for (i, &j) in perm.images().iter().enumerate() {
        sigma[j] = chain[i + 1] - chain[i];
    }
    sigma
}

fn check_dim(oracle: &SubmodularOracle, n: usize) -> Result<()> {
    if oracle.n() != n {
        return Err(Error::Input(format!(
            "dimension {n} does not match oracle dimension {}",
            oracle.n()
        )));
    }
    Ok(())
}

pub fn greedy_vertex(oracle: &SubmodularOracle, perm: &Permutation) -> Result<GreedyVertex> {
    check_dim(oracle, perm.len())?;
    let chain = oracle.chain_values(perm.images());
    Ok(GreedyVertex {
        sigma: sigma_from_chain(perm, &chain),
        perm: perm.clone(),
    })
}

/// Evaluates `F` at `x` with `n + 1` oracle calls along the sorted chain.
pub fn envelope_eval(oracle: &SubmodularOracle, x: &[f64]) -> Result<EnvelopeEvaluation> {
    check_dim(oracle, x.len())?;
    let perm = sort_permutation(x)?;
    let chain = oracle.chain_values(perm.images());
    // F(x) = sum_i x_{pi(i)} (f(v^i) - f(v^{i-1}))
    let subgradient = sigma_from_chain(&perm, &chain);
    let value = subgradient.iter().zip(x).map(|(s, v)| s * v).sum();
    Ok(EnvelopeEvaluation {
        value,
        subgradient,
        perm,
    })
}

/// Chain points `v^i(pi)` with their values, `i = 0..n`.
pub fn support_points(oracle: &SubmodularOracle, perm: &Permutation) -> Result<Vec<(Vec<bool>, f64)>> {
    check_dim(oracle, perm.len())?;
    let chain = oracle.chain_values(perm.images());
    Ok(chain_of(perm).into_iter().zip(chain).collect())
}

/// Monotone chain `0 = x^0 < x^1 < ... < x^n = 1` of a permutation.
pub fn chain_of(perm: &Permutation) -> Vec<Vec<bool>> {
    let n = perm.len();
    let mut point = vec![false; n];
    let mut chain = Vec::with_capacity(n + 1);
    chain.push(point.clone());
    for &j in perm.images() {
        point[j] = true;
        chain.push(point.clone());
    }
    chain
}

/// Inverse of [`chain_of`].
pub fn permutation_of_chain(chain: &[Vec<bool>]) -> Result<Permutation> {
    let not_chain = || Error::Input("points do not form a monotone chain from 0 to 1".into());
    let first = chain.first().ok_or_else(not_chain)?;
    let n = first.len();
    if chain.len() != n + 1 || first.iter().any(|&b| b) {
        return Err(not_chain());
    }
    let mut images = Vec::with_capacity(n);
    for pair in chain.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.len() != n {
            return Err(not_chain());
        }
        let mut added = None;
        for j in 0..n {
            match (a[j], b[j]) {
                (true, false) => return Err(not_chain()),
                (false, true) if added.is_none() => added = Some(j),
                (false, true) => return Err(not_chain()),
                _ => {}
            }
        }
        images.push(added.ok_or_else(not_chain)?);
    }
    Permutation::new(images)
}

/// All greedy vertices, one per permutation in lexicographic order.
pub fn enumerate_vertices(oracle: &SubmodularOracle) -> Result<Vec<GreedyVertex>> {
    let n = oracle.n();
    capacity("vertex enumeration", n, ENUMERATION_LIMIT)?;
    (0..n)
        .permutations(n)
        .map(|p| greedy_vertex(oracle, &Permutation(p)))
        .collect()
}

/// `F(x)` by maximizing over an explicit vertex list.
pub fn envelope_bruteforce(vertices: &[GreedyVertex], x: &[f64]) -> f64 {
    vertices
        .iter()
        .map(|v| v.sigma.iter().zip(x).map(|(s, y)| s * y).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{bits, cut_oracle, modular_oracle, WeightedGraph};
    use proptest::prelude::*;

    fn k3() -> SubmodularOracle {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        cut_oracle(&g).unwrap()
    }

    fn p1(images: &[usize]) -> Permutation {
        Permutation::from_one_based(images).unwrap()
    }

    #[test]
    fn sorting_examples() {
        assert_eq!(sort_permutation(&[0.1, 0.9, 0.5]).unwrap(), p1(&[2, 3, 1]));
        assert_eq!(sort_permutation(&[0.5, 0.5, 0.5]).unwrap(), p1(&[1, 2, 3]));
        assert_eq!(sort_permutation(&[-1.0, 0.0, 0.0]).unwrap(), p1(&[2, 3, 1]));
        assert!(matches!(sort_permutation(&[0.0, f64::NAN]), Err(Error::Input(_))));
    }

    #[test]
    fn greedy_vertex_examples() {
        assert_eq!(greedy_vertex(&k3(), &p1(&[1, 2, 3])).unwrap().sigma, vec![2.0, 0.0, -2.0]);
        assert_eq!(greedy_vertex(&k3(), &p1(&[2, 3, 1])).unwrap().sigma, vec![-2.0, 2.0, 0.0]);
        let c = vec![1.5, -2.0, 0.25];
        let m = modular_oracle(c.clone()).unwrap();
        assert_eq!(greedy_vertex(&m, &p1(&[3, 1, 2])).unwrap().sigma, c);
    }

    #[test]
    fn envelope_examples() {
        let e = envelope_eval(&k3(), &[1.0, 0.5, 0.0]).unwrap();
        assert_eq!(e.value, 2.0);
        assert_eq!(e.subgradient, vec![2.0, 0.0, -2.0]);
        let e = envelope_eval(&k3(), &[-1.0, 0.0, 0.0]).unwrap();
        assert_eq!(e.value, 2.0);
        assert_eq!(e.subgradient, vec![-2.0, 2.0, 0.0]);
        for lambda in [-3.0, 0.0, 0.7, 12.0] {
            assert_eq!(envelope_eval(&k3(), &[lambda; 3]).unwrap().value, 0.0);
        }
    }

    #[test]
    fn support_point_examples() {
        let pts = support_points(&k3(), &p1(&[1, 2, 3])).unwrap();
        assert_eq!(pts[0], (vec![false; 3], 0.0));
        assert_eq!(pts[1], (vec![true, false, false], 2.0));
        assert_eq!(pts[3], (vec![true; 3], 0.0));
    }

    #[test]
    fn chain_examples() {
        let c = chain_of(&p1(&[1, 2, 3]));
        assert_eq!(c[2], vec![true, true, false]);
        let chain = vec![
            vec![false, false, false],
            vec![false, false, true],
            vec![false, true, true],
            vec![true, true, true],
        ];
        assert_eq!(permutation_of_chain(&chain).unwrap(), p1(&[3, 2, 1]));
        for p in (0..3).permutations(3) {
            let p = Permutation::new(p).unwrap();
            assert_eq!(permutation_of_chain(&chain_of(&p)).unwrap(), p);
        }
        let broken = vec![vec![false, false], vec![true, true], vec![true, true]];
        assert!(permutation_of_chain(&broken).is_err());
    }

    #[test]
    fn vertex_enumeration_examples() {
        let mut got: Vec<Vec<i64>> = enumerate_vertices(&k3())
            .unwrap()
            .into_iter()
            .map(|v| v.sigma.iter().map(|&s| s as i64).collect())
            .collect();
        got.sort();
        let mut want = vec![
            vec![2, 0, -2],
            vec![2, -2, 0],
            vec![0, 2, -2],
            vec![-2, 2, 0],
            vec![0, -2, 2],
            vec![-2, 0, 2],
        ];
        want.sort();
        assert_eq!(got, want);
        let single = modular_oracle(vec![4.0]).unwrap();
        assert_eq!(enumerate_vertices(&single).unwrap().len(), 1);
        let big = modular_oracle(vec![1.0; 9]).unwrap();
        assert!(matches!(enumerate_vertices(&big), Err(Error::Capacity { .. })));
    }

    fn arb_oracle() -> impl Strategy<Value = SubmodularOracle> {
        (2usize..=6).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n, 0.0..5.0f64), 1..12).prop_map(move |raw| {
                let edges = raw.into_iter().filter(|e| e.0 != e.1).collect();
                cut_oracle(&WeightedGraph::new(n, edges).unwrap()).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn extends_oracle_on_binaries(f in arb_oracle()) {
            for mask in 0..(1usize << f.n()) {
                let x = bits(mask, f.n());
                let xr: Vec<f64> = x.iter().map(|&b| b as u8 as f64).collect();
                let e = envelope_eval(&f, &xr).unwrap();
                prop_assert!((e.value - f.evaluate(&x).unwrap()).abs() <= 1e-9);
            }
        }

        #[test]
        fn matches_vertex_maximum(f in arb_oracle(), seed in proptest::collection::vec(-2.0..2.0f64, 6)) {
            let x = &seed[..f.n()];
            let verts = enumerate_vertices(&f).unwrap();
            let e = envelope_eval(&f, x).unwrap();
            prop_assert!((e.value - envelope_bruteforce(&verts, x)).abs() <= 1e-9);
            prop_assert!((e.value - dot(&e.subgradient, x)).abs() <= 1e-12);
        }

        #[test]
        fn homogeneity_translation_convexity(
            f in arb_oracle(),
            a in proptest::collection::vec(-3.0..3.0f64, 6),
            b in proptest::collection::vec(-3.0..3.0f64, 6),
            lambda in -5.0..5.0f64,
            scale in 0.0..4.0f64,
        ) {
            let n = f.n();
            let (x, y) = (&a[..n], &b[..n]);
            let fx = envelope_eval(&f, x).unwrap();
            let f1 = f.evaluate(&vec![true; n]).unwrap();
            let scaled: Vec<f64> = x.iter().map(|v| v * scale).collect();
            prop_assert!((envelope_eval(&f, &scaled).unwrap().value - scale * fx.value).abs() <= 1e-9);
            let shifted: Vec<f64> = x.iter().map(|v| v + lambda).collect();
            prop_assert!((envelope_eval(&f, &shifted).unwrap().value - fx.value - lambda * f1).abs() <= 1e-9);
            let mid: Vec<f64> = x.iter().zip(y).map(|(p, q)| 0.5 * (p + q)).collect();
            let fy = envelope_eval(&f, y).unwrap().value;
            prop_assert!(envelope_eval(&f, &mid).unwrap().value <= 0.5 * (fx.value + fy) + 1e-9);
            prop_assert!(fy >= dot(&fx.subgradient, y) - 1e-9);
        }

        #[test]
        fn support_identity(f in arb_oracle(), keys in proptest::collection::vec(0.0..1.0f64, 6)) {
            let perm = sort_permutation(&keys[..f.n()]).unwrap();
            let v = greedy_vertex(&f, &perm).unwrap();
            for (point, value) in support_points(&f, &perm).unwrap() {
                let s: f64 = v.sigma.iter().zip(&point).filter(|(_, &b)| b).map(|(s, _)| s).sum();
                prop_assert!((s - value).abs() <= 1e-12);
            }
        }
    }
}

//! Free sets for hypographs and superlevel sets of submodular and SS functions.
//!
//! Every non-split set here has the form `{(x, t) : G(x) <= l t}` for a convex,
//! positively homogeneous `G`, so membership, interiority and the step-length
//! function share one code path through [`SFreeSet::gauge`].

use itertools::Itertools;

use crate::envelope::{dot, enumerate_vertices, envelope_eval, greedy_vertex, chain_of, Permutation};
use crate::error::{capacity, Error, Result};
use crate::simplex_lp::{solve, LpModel, LpStatus, ObjSense, RowSense};
use crate::submodular::{bits, Level, SsFunction, SubmodularOracle};

/// Strict-interior threshold on the margin `l t - G(x)`.
pub const TAU_INT: f64 = 1e-7;

pub const COVER_LIMIT: usize = 8;
pub const FREENESS_LIMIT: usize = 10;
pub const MAXIMALITY_LIMIT: usize = 5;

#[derive(Debug, Clone)]
pub enum SFreeSet {
    /// `{(x, t) : G(x) <= l t}` with `G` the extended envelope of `g`.
    EnvelopeEpigraph { g: SubmodularOracle, level: Level },
    /// `{(x, t) : 0 <= x_j <= 1}`.
    LiftedSplit { j: usize },
    /// `{(x, t) : F1(x) - gamma . x <= l t}` with `gamma` a greedy vertex of `f2`.
    ReverseLinearized {
        f1: SubmodularOracle,
        gamma: Vec<f64>,
        gamma_perm: Permutation,
        level: Level,
    },
    /// `{(x, t) : sigma(pi) x <= t for all kept pi}`.
    CoverRelaxation {
        oracle: SubmodularOracle,
        perms: Vec<Permutation>,
        vertices: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interiority {
    StrictInterior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorityReport {
    pub class: Interiority,
    pub margin: f64,
}

/// Value and subgradient of the margin `l t - G(x)` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub value: f64,
    pub grad_x: Vec<f64>,
    pub grad_t: f64,
}

impl SFreeSet {
    pub fn envelope_epigraph(g: SubmodularOracle, level: Level) -> Self {
        SFreeSet::EnvelopeEpigraph { g, level }
    }

    pub fn cover_relaxation(oracle: SubmodularOracle, perms: Vec<Permutation>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::Input("a cover relaxation needs at least one permutation".into()));
        }
        let vertices = perms
            .iter()
            .map(|p| greedy_vertex(&oracle, p).map(|v| v.sigma))
            .collect::<Result<Vec<_>>>()?;
        Ok(SFreeSet::CoverRelaxation {
            oracle,
            perms,
            vertices,
        })
    }

    pub fn level(&self) -> Level {
        match self {
            SFreeSet::EnvelopeEpigraph { level, .. } | SFreeSet::ReverseLinearized { level, .. } => *level,
            SFreeSet::LiftedSplit { .. } | SFreeSet::CoverRelaxation { .. } => Level::Hypograph,
        }
    }

    pub fn is_split(&self) -> bool {
        matches!(self, SFreeSet::LiftedSplit { .. })
    }

    /// `G(x)` and a subgradient for the non-split variants.
    pub fn gauge(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            SFreeSet::EnvelopeEpigraph { g, .. } => {
                let e = envelope_eval(g, x)?;
                Ok((e.value, e.subgradient))
            }
            SFreeSet::ReverseLinearized { f1, gamma, .. } => {
                let e = envelope_eval(f1, x)?;
                let s: Vec<f64> = e.subgradient.iter().zip(gamma).map(|(a, b)| a - b).collect();
                let v = dot(&s, x);
                Ok((v, s))
            }
            SFreeSet::CoverRelaxation { vertices, .. } => {
                if vertices[0].len() != x.len() {
                    return Err(Error::Input("dimension mismatch".into()));
                }
                let (k, v) = vertices
                    .iter()
                    .map(|s| dot(s, x))
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
                Ok((v, vertices[k].clone()))
            }
            SFreeSet::LiftedSplit { .. } => Err(Error::Internal("splits have no envelope gauge".into())),
        }
    }

    /// Margin `l t - G(x)`; for splits `min(x_j, 1 - x_j)`. Positive means interior.
    pub fn margin(&self, x: &[f64], t: f64) -> Result<Margin> {
        if let SFreeSet::LiftedSplit { j } = *self {
            if j >= x.len() {
                return Err(Error::Input(format!("split index {j} outside the point")));
            }
            let mut grad_x = vec![0.0; x.len()];
            let value = if x[j] <= 1.0 - x[j] {
                grad_x[j] = 1.0;
                x[j]
            } else {
                grad_x[j] = -1.0;
                1.0 - x[j]
            };
            return Ok(Margin {
                value,
                grad_x,
                grad_t: 0.0,
            });
        }
        let ell = self.level().ell();
        let (g, s) = self.gauge(x)?;
        Ok(Margin {
            value: ell * t - g,
            grad_x: s.into_iter().map(|v| -v).collect(),
            grad_t: ell,
        })
    }

    pub fn interiority(&self, x: &[f64], t: f64) -> Result<InteriorityReport> {
        let margin = self.margin(x, t)?.value;
        let class = if margin > TAU_INT {
            Interiority::StrictInterior
        } else if margin >= -TAU_INT {
            Interiority::Boundary
        } else {
            Interiority::Exterior
        };
        Ok(InteriorityReport { class, margin })
    }

    pub fn contains(&self, x: &[f64], t: f64, tol: f64) -> Result<bool> {
        Ok(self.margin(x, t)?.value >= -tol)
    }
}

/// Reverse-linearized set at `x_tilde`; collapses to the envelope epigraph of `f1` when `f2 = 0`.
pub fn build_reverse_linearized(ss: &SsFunction, x_tilde: &[f64]) -> Result<SFreeSet> {
    if x_tilde.len() != ss.n() {
        return Err(Error::Input(format!(
            "point has length {}, function dimension is {}",
            x_tilde.len(),
            ss.n()
        )));
    }
    if ss.f2.is_structurally_zero() {
        return Ok(SFreeSet::EnvelopeEpigraph {
            g: ss.f1.clone(),
            level: ss.level,
        });
    }
    let e = envelope_eval(&ss.f2, x_tilde)?;
    Ok(SFreeSet::ReverseLinearized {
        f1: ss.f1.clone(),
        gamma: e.subgradient,
        gamma_perm: e.perm,
        level: ss.level,
    })
}

fn chain_masks(perm: &Permutation) -> Vec<usize> {
    chain_of(perm)
        .iter()
        .map(|p| p.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| 1usize << j).sum())
        .collect()
}

fn visit_counts(perms: &[Permutation]) -> Result<(usize, Vec<u32>)> {
    let n = perms.first().map_or(0, |p| p.len());
    capacity("cover check", n, COVER_LIMIT)?;
    if perms.iter().any(|p| p.len() != n) {
        return Err(Error::Input("permutations have different lengths".into()));
    }
    let mut counts = vec![0u32; 1 << n];
    for p in perms {
        for m in chain_masks(p) {
            counts[m] += 1;
        }
    }
    Ok((n, counts))
}

/// True iff the chains of `perms` jointly visit every point of `{0,1}^n`.
pub fn is_cover(perms: &[Permutation]) -> Result<bool> {
    if perms.is_empty() {
        return Ok(false);
    }
    let (_, counts) = visit_counts(perms)?;
    Ok(counts.iter().all(|&c| c > 0))
}

/// A cover in which every chain visits a point no other chain visits.
pub fn is_minimal_cover(perms: &[Permutation]) -> Result<bool> {
    if !is_cover(perms)? {
        return Ok(false);
    }
    let (_, counts) = visit_counts(perms)?;
    Ok(perms
        .iter()
        .all(|p| chain_masks(p).into_iter().any(|m| counts[m] == 1)))
}

/// Checks that no point of the target set lies in the strict interior of `set`.
///
/// For hypograph targets the graph points `(x, f(x))` are tested, which covers
/// the whole hypograph since lowering `t` only shrinks the margin when `l = 1`.
/// For superlevel targets every binary `x` with `f(x) >= 0` is tested.
pub fn verify_free_bruteforce(set: &SFreeSet, target: &SsFunction) -> Result<bool> {
    let n = target.n();
    capacity("freeness check", n, FREENESS_LIMIT)?;
    for mask in 0..(1usize << n) {
        let x = bits(mask, n);
        let fx = target.value(&x)?;
        if target.level == Level::Superlevel && fx < -crate::submodular::STRUCTURAL_TOL {
            continue;
        }
        let xr: Vec<f64> = x.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let t = if target.level == Level::Hypograph { fx } else { 0.0 };
        if set.margin(&xr, t)?.value > TAU_INT {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The three chains `0 < e3 < e2+e3 < 1`, `0 < e2 < e1+e2 < 1`, `0 < e1 < e1+e3 < 1`
/// that cover `{0,1}^3` minimally.
pub fn three_chain_permutations() -> Vec<Permutation> {
    [[3, 2, 1], [2, 1, 3], [1, 3, 2]]
        .iter()
        .map(|p| Permutation::from_one_based(p).expect("valid permutation"))
        .collect()
}

pub fn three_chain_relaxation(oracle: &SubmodularOracle) -> Result<SFreeSet> {
    if oracle.n() != 3 {
        return Err(Error::Input(format!(
            "the three-chain relaxation needs n = 3, got n = {}",
            oracle.n()
        )));
    }
    SFreeSet::cover_relaxation(oracle.clone(), three_chain_permutations())
}

/// A point inside a cover relaxation that violates a facet of the full envelope epigraph.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentWitness {
    pub x: Vec<f64>,
    pub t: f64,
    pub dropped: Permutation,
    pub violation: f64,
}

/// Searches for a point of the cover relaxation outside the envelope epigraph
/// by maximizing the violation of each dropped facet over `x in [0,1]^n`.
pub fn containment_witness(set: &SFreeSet) -> Result<Option<ContainmentWitness>> {
    let SFreeSet::CoverRelaxation {
        oracle,
        perms,
        vertices,
    } = set
    else {
        return Err(Error::Input("witness search needs a cover relaxation".into()));
    };
    let n = oracle.n();
    let all = enumerate_vertices(oracle)?;
    let scale: f64 = all
        .iter()
        .map(|v| v.sigma.iter().map(|s| s.abs()).sum::<f64>())
        .fold(1.0, f64::max);
    let mut best: Option<ContainmentWitness> = None;
    for v in all.iter().filter(|v| !perms.contains(&v.perm)) {
        let mut lp = LpModel::new(ObjSense::Maximize);
        let xs: Vec<usize> = (0..n)
            .map(|j| lp.add_col(format!("x{}", j + 1), 0.0, 1.0, v.sigma[j]))
            .collect();
        let t = lp.add_col("t", -scale, scale, -1.0);
        for s in vertices {
            let mut coefs: Vec<(usize, f64)> = xs.iter().zip(s).map(|(&c, &a)| (c, a)).collect();
            coefs.push((t, -1.0));
            lp.add_row(&coefs, RowSense::Le, 0.0);
        }
        let sol = solve(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Numeric("witness LP did not solve to optimality".into()));
        }
        if sol.objective > TAU_INT && best.as_ref().is_none_or(|b| sol.objective > b.violation) {
            best = Some(ContainmentWitness {
                x: sol.x[..n].to_vec(),
                t: sol.x[t],
                dropped: v.perm.clone(),
                violation: sol.objective,
            });
        }
    }
    Ok(best)
}

/// For each kept facet, whether some graph point lies on it and strictly below
/// every other kept facet. All true means every facet is supported in its
/// relative interior.
pub fn facet_support_diagnostic(set: &SFreeSet) -> Result<Vec<bool>> {
    let SFreeSet::CoverRelaxation { oracle, vertices, .. } = set else {
        return Err(Error::Input("maximality diagnostic needs a cover relaxation".into()));
    };
    let n = oracle.n();
    capacity("maximality diagnostic", n, MAXIMALITY_LIMIT)?;
    let tol = crate::submodular::STRUCTURAL_TOL;
    let mut supported = vec![false; vertices.len()];
    for mask in 0..(1usize << n) {
        let x = bits(mask, n);
        let fx = oracle.evaluate(&x)?;
        let xr: Vec<f64> = x.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let values: Vec<f64> = vertices.iter().map(|s| dot(s, &xr)).collect();
        let tight = values.iter().positions(|&v| (v - fx).abs() <= tol).collect_vec();
        if tight.len() == 1 && values.iter().all(|&v| v <= fx + tol) {
            supported[tight[0]] = true;
        }
    }
    Ok(supported)
}

//! Step lengths along corner rays and intersection cut assembly.

use std::fmt;

use rayon::prelude::*;

use crate::envelope::{dot, envelope_eval};
use crate::error::{capacity, Error, Result};
use crate::sfree::{Interiority, SFreeSet};
use crate::simplex_lp::{CornerPolyhedron, ProjectedCorner};
use crate::submodular::{bits, Level, SsFunction};

pub const VALIDATION_LIMIT: usize = 12;
pub const VALIDATION_TOL: f64 = 1e-7;

/// Parameters of the hybrid discrete Newton search and the cut filters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct NewtonParams {
    /// Starting point of the search.
    pub delta: f64,
    /// Step budget.
    pub max_steps: usize,
    /// Numeric stand-in for `+inf`.
    pub eta_inf: f64,
    /// Tolerance on `|zeta|` accepted as a root.
    pub root_tol: f64,
    pub min_step: f64,
    pub min_efficacy: f64,
    pub max_dynamic_range: f64,
}

impl Default for NewtonParams {
    fn default() -> Self {
        Self {
            delta: 0.2,
            max_steps: 500,
            eta_inf: 1e9,
            root_tol: 1e-9,
            min_step: 1e-6,
            min_efficacy: 1e-4,
            max_dynamic_range: 1e8,
        }
    }
}

/// `zeta(eta) = margin(x + eta r_x, t + eta r_t)` along one ray.
#[derive(Debug, Clone, Copy)]
pub struct ZetaFunction<'a> {
    pub set: &'a SFreeSet,
    pub x: &'a [f64],
    pub t: f64,
    pub rx: &'a [f64],
    pub rt: f64,
}

impl ZetaFunction<'_> {
    /// Value and algorithmic gradient at `eta`.
    pub fn eval(&self, eta: f64) -> Result<(f64, f64)> {
        let point: Vec<f64> = self.x.iter().zip(self.rx).map(|(a, r)| a + eta * r).collect();
        let m = self.set.margin(&point, self.t + eta * self.rt)?;
        Ok((m.value, dot(&m.grad_x, self.rx) + m.grad_t * self.rt))
    }
}

pub fn zeta_eval(zf: &ZetaFunction<'_>, eta: f64) -> Result<(f64, f64)> {
    if !(eta >= 0.0) {
        return Err(Error::Input(format!("step must be nonnegative, got {eta}")));
    }
    zf.eval(eta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Finite(f64),
    Infinite,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLength {
    pub outcome: StepOutcome,
    pub iterations: usize,
}

impl StepLength {
    pub fn eta(&self) -> Option<f64> {
        match self.outcome {
            StepOutcome::Finite(e) => Some(e),
            _ => None,
        }
    }
}

/// Hybrid discrete Newton search for the root of `zeta` on `(0, +inf]`.
///
/// A negative algorithmic gradient triggers a Newton step, anything else
/// doubles the step. If `zeta` is still positive at `eta_inf` the ray never
/// leaves the set.
pub fn step_length(zf: &ZetaFunction<'_>, params: &NewtonParams) -> Result<StepLength> {
    if !(params.delta > 0.0) {
        return Err(Error::Input("starting step must be positive".into()));
    }
    if zf.eval(params.eta_inf)?.0 > 0.0 {
        return Ok(StepLength {
            outcome: StepOutcome::Infinite,
            iterations: 0,
        });
    }
    let mut eta = params.delta;
    for i in 0..params.max_steps {
        let (z, beta) = zf.eval(eta)?;
        if z.abs() <= params.root_tol {
            return Ok(StepLength {
                outcome: StepOutcome::Finite(polish(zf, eta, z, beta)?),
                iterations: i,
            });
        }
        if beta < 0.0 {
            eta -= z / beta;
        } else {
            eta *= 2.0;
        }
    }
    Ok(StepLength {
        outcome: StepOutcome::BudgetExhausted,
        iterations: params.max_steps,
    })
}

/// One extra Newton step on the final linear piece when it does not worsen `|zeta|`.
fn polish(zf: &ZetaFunction<'_>, eta: f64, z: f64, beta: f64) -> Result<f64> {
    if z == 0.0 || beta >= 0.0 {
        return Ok(eta);
    }
    let next = eta - z / beta;
    if next > 0.0 && zf.eval(next)?.0.abs() <= z.abs() {
        Ok(next)
    } else {
        Ok(eta)
    }
}

/// Step to the boundary of the split `0 <= x_j <= 1` along a ray.
pub fn split_step(xj: f64, rj: f64) -> StepOutcome {
    if rj > 0.0 {
        StepOutcome::Finite((1.0 - xj) / rj)
    } else if rj < 0.0 {
        StepOutcome::Finite(xj / -rj)
    } else {
        StepOutcome::Infinite
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutKind {
    Env,
    Split,
    Ss,
    Grad,
}

impl CutKind {
    pub fn label(self) -> &'static str {
        match self {
            CutKind::Env => "env",
            CutKind::Split => "split",
            CutKind::Ss => "ss",
            CutKind::Grad => "grad",
        }
    }
}

/// Inequality `alpha . z >= beta` over structural coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionCut {
    pub alpha: Vec<f64>,
    pub beta: f64,
    /// Step length per ray; `+inf` for rays that never leave the set.
    pub steps: Vec<f64>,
    pub efficacy: f64,
    pub newton_iters: usize,
    pub inf_steps: usize,
    pub kind: CutKind,
}

impl IntersectionCut {
    pub fn norm(&self) -> f64 {
        self.alpha.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// `alpha . z - beta`; negative values are violations.
    pub fn slack(&self, z: &[f64]) -> f64 {
        dot(&self.alpha, z) - self.beta
    }

    pub fn is_satisfied(&self, z: &[f64], tol: f64) -> bool {
        self.slack(z) >= -tol * self.norm().max(1.0)
    }

    pub fn dynamic_range(&self) -> f64 {
        dynamic_range(&self.alpha)
    }

    pub fn log_line(&self) -> String {
        format!(
            "CUT kind={} rays={} inf_steps={} efficacy={:.6e} newton_iters={}",
            self.kind.label(),
            self.steps.len(),
            self.inf_steps,
            self.efficacy,
            self.newton_iters
        )
    }

    /// Drops coefficients below `rel * max|alpha|`, relaxing `beta` by their
    /// largest contribution over the given bounds so the cut stays valid.
    pub fn drop_tiny(&mut self, lower: &[f64], upper: &[f64], rel: f64) {
        let big = self.alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        for (j, a) in self.alpha.iter_mut().enumerate() {
            if *a != 0.0 && a.abs() <= rel * big {
                let worst = (*a * lower[j]).max(*a * upper[j]);
                if worst.is_finite() {
                    self.beta -= worst;
                    *a = 0.0;
                }
            }
        }
    }
}

fn dynamic_range(alpha: &[f64]) -> f64 {
    let big = alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let small = alpha
        .iter()
        .map(|a| a.abs())
        .filter(|&a| a > 1e-12 * big)
        .fold(f64::INFINITY, f64::min);
    if big == 0.0 {
        1.0
    } else {
        big / small
    }
}

/// Why separation produced no cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoCut {
    NotInterior,
    AllInfinite,
    StepTooShort,
    SeparationFailure,
    LowEfficacy,
    DynamicRange,
    NotViolated,
}

impl fmt::Display for NoCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NoCut::NotInterior => "apex not in the interior",
            NoCut::AllInfinite => "all step lengths infinite",
            NoCut::StepTooShort => "step length below the floor",
            NoCut::SeparationFailure => "step search budget exhausted",
            NoCut::LowEfficacy => "efficacy below threshold",
            NoCut::DynamicRange => "coefficient range too large",
            NoCut::NotViolated => "point not violated",
        };
        f.write_str(s)
    }
}

pub type Separation = std::result::Result<IntersectionCut, NoCut>;

fn default_kind(set: &SFreeSet) -> CutKind {
    match set {
        SFreeSet::LiftedSplit { .. } => CutKind::Split,
        SFreeSet::ReverseLinearized { .. } => CutKind::Ss,
        SFreeSet::EnvelopeEpigraph { .. } | SFreeSet::CoverRelaxation { .. } => CutKind::Env,
    }
}

/// Intersection cut `sum_j eta_j / eta*_j >= 1` written over the structural
/// coordinates of `corner`; `projected` holds the same corner restricted to
/// the coordinates the free set lives in.
pub fn intersection_cut(
    corner: &CornerPolyhedron,
    projected: &ProjectedCorner,
    set: &SFreeSet,
    params: &NewtonParams,
) -> Result<Separation> {
    if projected.rays.len() != corner.n_rays() {
        return Err(Error::Internal("projected corner has a different ray count".into()));
    }
    if set.interiority(&projected.x, projected.t)?.class != Interiority::StrictInterior {
        return Ok(Err(NoCut::NotInterior));
    }
    let one_ray = |(rx, rt): &(Vec<f64>, f64)| -> Result<StepLength> {
        if let SFreeSet::LiftedSplit { j } = *set {
            return Ok(StepLength {
                outcome: split_step(projected.x[j], rx[j]),
                iterations: 0,
            });
        }
        if rx.iter().all(|&v| v == 0.0) && *rt == 0.0 {
            return Ok(StepLength {
                outcome: StepOutcome::Infinite,
                iterations: 0,
            });
        }
        let zf = ZetaFunction {
            set,
            x: &projected.x,
            t: projected.t,
            rx,
            rt: *rt,
        };
        step_length(&zf, params)
    };
    let results: Vec<StepLength> = if projected.rays.len() > 32 {
        projected.rays.par_iter().map(one_ray).collect::<Result<_>>()?
    } else {
        projected.rays.iter().map(one_ray).collect::<Result<_>>()?
    };

    let mut steps = Vec::with_capacity(results.len());
    let mut newton_iters = 0;
    let mut inf_steps = 0;
    for r in &results {
        newton_iters += r.iterations;
        match r.outcome {
            StepOutcome::BudgetExhausted => return Ok(Err(NoCut::SeparationFailure)),
            StepOutcome::Infinite => {
                inf_steps += 1;
                steps.push(f64::INFINITY);
            }
            StepOutcome::Finite(eta) if eta < params.min_step => return Ok(Err(NoCut::StepTooShort)),
            StepOutcome::Finite(eta) => steps.push(eta),
        }
    }
    if inf_steps == steps.len() {
        return Ok(Err(NoCut::AllInfinite));
    }
    let mut alpha = vec![0.0; corner.n_struct];
    let mut beta = 1.0;
    for (eta, (g, h)) in steps.iter().zip(&corner.multipliers) {
        if eta.is_finite() {
            let w = 1.0 / eta;
            for (a, gv) in alpha.iter_mut().zip(g) {
                *a += w * gv;
            }
            beta -= w * h;
        }
    }
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Ok(Err(NoCut::AllInfinite));
    }
    let efficacy = (beta - dot(&alpha, &corner.apex[..corner.n_struct])) / norm;
    if dynamic_range(&alpha) > params.max_dynamic_range {
        return Ok(Err(NoCut::DynamicRange));
    }
    if !(efficacy >= params.min_efficacy) {
        return Ok(Err(NoCut::LowEfficacy));
    }
    Ok(Ok(IntersectionCut {
        alpha,
        beta,
        steps,
        efficacy,
        newton_iters,
        inf_steps,
        kind: default_kind(set),
    }))
}

/// Outer-approximation cut `gamma . x + l t <= 0` for targets with `f1 = 0`,
/// returned as `alpha . (x, t) >= beta` over the `n + 1` coordinates `(x, t)`.
pub fn gradient_cut(ss: &SsFunction, x: &[f64], t: f64) -> Result<Separation> {
    if !ss.f1.is_structurally_zero() {
        return Err(Error::Input("gradient cuts need f1 = 0".into()));
    }
    let gamma = envelope_eval(&ss.f2, x)?.subgradient;
    let ell = ss.level.ell();
    let mut alpha: Vec<f64> = gamma.iter().map(|g| -g).collect();
    alpha.push(-ell);
    if alpha.iter().all(|&a| a == 0.0) {
        return Ok(Err(NoCut::NotViolated));
    }
    let violation = dot(&gamma, x) + ell * t;
    let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    if violation <= crate::sfree::TAU_INT {
        return Ok(Err(NoCut::NotViolated));
    }
    Ok(Ok(IntersectionCut {
        alpha,
        beta: 0.0,
        steps: Vec::new(),
        efficacy: violation / norm,
        newton_iters: 0,
        inf_steps: 0,
        kind: CutKind::Grad,
    }))
}

/// Points of a target set, grouped by their binary `x` part.
pub trait FeasiblePoints {
    fn n(&self) -> usize;
    /// Structural points with this `x` part; empty when `x` is infeasible.
    fn points(&self, x: &[bool]) -> Result<Vec<Vec<f64>>>;
}

/// Hypograph or superlevel points of an SS function in `(x, t)` coordinates,
/// with `t` probed at `f(x)` and at a floor value.
#[derive(Debug, Clone)]
pub struct XtPoints {
    pub target: SsFunction,
    pub t_floor: f64,
}

impl FeasiblePoints for XtPoints {
    fn n(&self) -> usize {
        self.target.n()
    }

    fn points(&self, x: &[bool]) -> Result<Vec<Vec<f64>>> {
        let fx = self.target.value(x)?;
        let xr: Vec<f64> = x.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        let with_t = |t: f64| {
            let mut z = xr.clone();
            z.push(t);
            z
        };
        Ok(match self.target.level {
            Level::Hypograph => vec![with_t(fx), with_t(self.t_floor)],
            Level::Superlevel if fx >= -crate::submodular::STRUCTURAL_TOL => {
                vec![with_t(self.t_floor)]
            }
            Level::Superlevel => Vec::new(),
        })
    }
}

/// Checks a cut against every feasible point with binary `x`, optionally only
/// those inside `corner`.
pub fn validate_cut_bruteforce(
    cut: &IntersectionCut,
    feasible: &dyn FeasiblePoints,
    corner: Option<&CornerPolyhedron>,
) -> Result<bool> {
    let n = feasible.n();
    capacity("cut validation", n, VALIDATION_LIMIT)?;
    for mask in 0..(1usize << n) {
        for z in feasible.points(&bits(mask, n))? {
            if corner.is_some_and(|c| !c.contains(&z, 1e-9)) {
                continue;
            }
            if !cut.is_satisfied(&z, VALIDATION_TOL) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfree::build_reverse_linearized;
    use crate::submodular::{cut_oracle, modular_oracle, multilinear_oracle, MultilinearFunction, WeightedGraph};
    use proptest::prelude::*;

    fn k3_set() -> SFreeSet {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        SFreeSet::envelope_epigraph(cut_oracle(&g).unwrap(), Level::Hypograph)
    }

    fn zf<'a>(set: &'a SFreeSet, rx: &'a [f64], rt: f64) -> ZetaFunction<'a> {
        ZetaFunction {
            set,
            x: &[0.5, 0.5, 0.5],
            t: 1.5,
            rx,
            rt,
        }
    }

    #[test]
    fn zeta_examples() {
        let set = k3_set();
        let (v, b) = zeta_eval(&zf(&set, &[1.0, 0.0, 0.0], 0.0), 0.2).unwrap();
        assert!((v - 1.1).abs() < 1e-12);
        assert_eq!(b, -2.0);
        assert_eq!(zeta_eval(&zf(&set, &[1.0, 0.0, 0.0], 0.0), 0.0).unwrap().0, 1.5);
        let up = zf(&set, &[0.0; 3], 1.0);
        assert_eq!(zeta_eval(&up, 2.0).unwrap(), (3.5, 1.0));
        assert!(zeta_eval(&up, -1.0).is_err());
    }

    #[test]
    fn step_examples() {
        let set = k3_set();
        let p = NewtonParams::default();
        let s = step_length(&zf(&set, &[1.0, 0.0, 0.0], 0.0), &p).unwrap();
        assert_eq!(s.outcome, StepOutcome::Finite(0.75));
        assert_eq!(s.iterations, 1);
        assert_eq!(step_length(&zf(&set, &[0.0; 3], 1.0), &p).unwrap().outcome, StepOutcome::Infinite);
        assert_eq!(
            step_length(&zf(&set, &[0.0; 3], -1.0), &p).unwrap().outcome,
            StepOutcome::Finite(1.5)
        );
    }

    fn k3_corner() -> CornerPolyhedron {
        let e = |k: usize| (0..4).map(|i| if i == k { 1.0 } else { 0.0 }).collect::<Vec<_>>();
        let mut down = e(3);
        down[3] = -1.0;
        CornerPolyhedron::from_rays(vec![0.5, 0.5, 0.5, 1.5], vec![e(0), e(1), e(2), down]).unwrap()
    }

    #[test]
    fn k3_intersection_cut() {
        let corner = k3_corner();
        let proj = corner.project(&[0, 1, 2], Some(3)).unwrap();
        let set = k3_set();
        let cut = intersection_cut(&corner, &proj, &set, &NewtonParams::default())
            .unwrap()
            .unwrap();
        assert_eq!(cut.steps, vec![0.75, 0.75, 0.75, 1.5]);
        // sum_i (x_i - 0.5)/0.75 + (1.5 - t)/1.5 >= 1
        let w = 1.0 / 0.75;
        for (a, b) in cut.alpha.iter().zip([w, w, w, -1.0 / 1.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((cut.beta - (1.0 + 1.5 * w - 1.0)).abs() < 1e-12);
        assert!((cut.slack(&[1.0, 1.0, 1.0, 0.0]) - 2.0).abs() < 1e-12);
        assert!(cut.slack(&[0.5, 0.5, 0.5, 1.5]) < 0.0);
        let line = cut.log_line();
        assert!(line.starts_with("CUT kind=env rays=4 inf_steps=0 efficacy="));
        assert!(line.ends_with("newton_iters=4"), "{line}");

        let target = XtPoints {
            target: SsFunction::hypograph(match set {
                SFreeSet::EnvelopeEpigraph { g, .. } => g,
                _ => unreachable!(),
            }),
            t_floor: -6.0,
        };
        assert!(validate_cut_bruteforce(&cut, &target, Some(&corner)).unwrap());
        let mut corrupted = cut.clone();
        corrupted.beta += 3.0;
        assert!(!validate_cut_bruteforce(&corrupted, &target, Some(&corner)).unwrap());
    }

    #[test]
    fn unit_steps_give_classic_cut_and_infinite_rays_vanish() {
        let corner = CornerPolyhedron::from_rays(
            vec![0.5, 0.5],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let proj = corner.project(&[0, 1], None).unwrap();
        let split = SFreeSet::LiftedSplit { j: 0 };
        let cut = intersection_cut(&corner, &proj, &split, &NewtonParams::default())
            .unwrap()
            .unwrap();
        assert_eq!(cut.steps, vec![0.5, f64::INFINITY]);
        assert_eq!(cut.alpha, vec![2.0, 0.0]);
        assert_eq!(cut.inf_steps, 1);
        assert_eq!(cut.kind, CutKind::Split);

        let e = |k: usize| (0..3).map(|i| if i == k { 1.0 } else { 0.0 }).collect::<Vec<_>>();
        let unit = CornerPolyhedron::from_rays(vec![0.0, 0.0, 1.0], vec![e(0), e(1), vec![0.0, 0.0, -1.0]]).unwrap();
        let proj = unit.project(&[0, 1], Some(2)).unwrap();
        let set = SFreeSet::envelope_epigraph(modular_oracle(vec![1.0, 1.0]).unwrap(), Level::Hypograph);
        let cut = intersection_cut(&unit, &proj, &set, &NewtonParams::default()).unwrap().unwrap();
        assert_eq!(cut.steps, vec![1.0, 1.0, 1.0]);
        // eta = (x1, x2, 1 - t), so the cut reads x1 + x2 - t >= 0
        assert_eq!(cut.alpha, vec![1.0, 1.0, -1.0]);
        assert_eq!(cut.beta, 0.0);
    }

    #[test]
    fn gradient_cut_examples() {
        let p = MultilinearFunction::new(2, vec![(3.0, vec![0, 1])]).unwrap();
        let ss = crate::submodular::ss_decompose(&p);
        let cut = gradient_cut(&ss, &[1.0, 1.0], 3.5).unwrap().unwrap();
        assert_eq!(cut.alpha, vec![0.0, 3.0, -1.0]);
        assert_eq!(cut.beta, 0.0);
        let zero = SsFunction::new(
            modular_oracle(vec![0.0; 2]).unwrap(),
            modular_oracle(vec![0.0; 2]).unwrap(),
            Level::Superlevel,
        )
        .unwrap();
        assert_eq!(gradient_cut(&zero, &[0.5, 0.5], 0.0).unwrap(), Err(NoCut::NotViolated));
        let c = vec![1.0, -2.0];
        let lin = SsFunction::new(
            modular_oracle(vec![0.0; 2]).unwrap(),
            modular_oracle(c.clone()).unwrap(),
            Level::Superlevel,
        )
        .unwrap();
        let cut = gradient_cut(&lin, &[0.9, 0.1], 0.0).unwrap().unwrap();
        assert_eq!(cut.alpha, vec![-1.0, 2.0, 0.0]);
        assert!(matches!(gradient_cut(&ss.clone().with_level(Level::Hypograph), &[0.0, 0.0], -1.0).unwrap(), Err(NoCut::NotViolated)));
        let _ = multilinear_oracle(&p);
    }

    fn bisection(zf: &ZetaFunction<'_>, hi: f64) -> f64 {
        let (mut a, mut b) = (0.0, hi);
        while b - a > 1e-12 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if zf.eval(m).unwrap().0 > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn newton_matches_bisection(
            raw in proptest::collection::vec((0usize..5, 0usize..5, 0.5..4.0f64), 2..10),
            x in proptest::collection::vec(0.0..1.0f64, 5),
            rx in proptest::collection::vec(-1.0..1.0f64, 5),
            rt in -1.0..1.0f64,
            slack in 0.05..3.0f64,
            ps in proptest::collection::vec(0.0..1.0f64, 3),
        ) {
            let edges = raw.into_iter().filter(|e| e.0 != e.1).collect();
            let f = cut_oracle(&WeightedGraph::new(5, edges).unwrap()).unwrap();
            let set = SFreeSet::envelope_epigraph(f.clone(), Level::Hypograph);
            let t = envelope_eval(&f, &x).unwrap().value + slack;
            let z = ZetaFunction { set: &set, x: &x, t, rx: &rx, rt };
            let p = NewtonParams::default();
            let s = step_length(&z, &p).unwrap();
            prop_assert!(s.iterations <= 500);
            if let StepOutcome::Finite(eta) = s.outcome {
                prop_assert!(z.eval(eta).unwrap().0.abs() <= 1e-9);
                prop_assert!((eta - bisection(&z, p.eta_inf)).abs() <= 1e-9 * eta.max(1.0));
                let (a, b) = (z.eval(eta - 1e-4).unwrap().0, z.eval(eta + 1e-4).unwrap().0);
                prop_assert!(a > 0.0 && b < 0.0);
            } else {
                prop_assert_eq!(s.outcome, StepOutcome::Infinite);
            }
            // concavity along the ray
            let mut e: Vec<f64> = ps.iter().map(|v| v * 5.0).collect();
            e.sort_by(f64::total_cmp);
            if e[2] - e[0] > 1e-6 {
                let z0 = z.eval(e[0]).unwrap().0;
                let z1 = z.eval(e[1]).unwrap().0;
                let z2 = z.eval(e[2]).unwrap().0;
                let lam = (e[1] - e[0]) / (e[2] - e[0]);
                prop_assert!(z1 >= (1.0 - lam) * z0 + lam * z2 - 1e-9);
            }
        }

        #[test]
        fn ss_steps_have_roots(
            terms in proptest::collection::vec((-4i32..=4, proptest::collection::vec(0usize..4, 1..=4)), 1..8),
            x in proptest::collection::vec(0.0..1.0f64, 4),
            rx in proptest::collection::vec(-1.0..1.0f64, 4),
            rt in -1.0..0.5f64,
            slack in 0.05..2.0f64,
        ) {
            let p = MultilinearFunction::new(4, terms.into_iter().map(|(a, s)| (a as f64, s))).unwrap();
            let ss = crate::submodular::ss_decompose(&p);
            let set = build_reverse_linearized(&ss, &x).unwrap();
            let t = set.gauge(&x).unwrap().0 + slack;
            let z = ZetaFunction { set: &set, x: &x, t, rx: &rx, rt };
            let s = step_length(&z, &NewtonParams::default()).unwrap();
            if let StepOutcome::Finite(eta) = s.outcome {
                prop_assert!(z.eval(eta).unwrap().0.abs() <= 1e-9);
            }
            prop_assert!(s.outcome != StepOutcome::BudgetExhausted);
        }
    }
}

//! Root-node cutting loop, gap metrics and benchmark instance generators.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use log::{debug, info, warn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cuts::{gradient_cut, intersection_cut, CutKind, FeasiblePoints, IntersectionCut, NewtonParams, NoCut};
use crate::error::{Error, Result};
use crate::formats::{read_instance, read_reference, Instance};
use crate::models::{build_maxcut_model, build_mubo_model, project_corner, BmpInstance, BuiltModel, TargetRole};
use crate::sfree::{build_reverse_linearized, SFreeSet};
use crate::simplex_lp::{LpStatus, RowSense, Simplex};
use crate::submodular::{bits, MultilinearFunction, WeightedGraph};

/// Coordinates closer than this to 0 or 1 count as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Largest dimension for which the reference bound is found by enumeration.
pub const REFERENCE_BRUTEFORCE_LIMIT: usize = 20;

/// Header of the CSV report.
pub const REPORT_HEADER: &str = "instance,mode,d1,d2,p,closed,cuts,sep_time_ms,total_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutMode {
    None,
    Split,
    Submodular,
    Ss,
    Both,
}

impl CutMode {
    pub const ALL: [CutMode; 5] = [CutMode::None, CutMode::Split, CutMode::Submodular, CutMode::Ss, CutMode::Both];

    fn uses_splits(self) -> bool {
        matches!(self, CutMode::Split | CutMode::Both)
    }

    fn uses_objective_target(self) -> bool {
        matches!(self, CutMode::Submodular | CutMode::Ss | CutMode::Both)
    }

    fn uses_constraint_targets(self) -> bool {
        matches!(self, CutMode::Ss | CutMode::Both)
    }
}

impl fmt::Display for CutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutMode::None => "none",
            CutMode::Split => "split",
            CutMode::Submodular => "submodular",
            CutMode::Ss => "ss",
            CutMode::Both => "both",
        })
    }
}

impl FromStr for CutMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CutMode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::Input(format!("unknown cut mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: CutMode,
    /// Modes run by `bench`; defaults to every mode.
    pub modes: Vec<CutMode>,
    pub rounds: usize,
    pub max_cuts_per_round: usize,
    pub newton: NewtonParams,
    pub seed: u64,
    /// Random binary points used to validate cuts when full enumeration is too large.
    pub validation_samples: usize,
    /// Enumerate every binary point for validation up to this dimension.
    pub full_validation_limit: usize,
    /// Reference primal bound; overrides the sidecar file and enumeration.
    pub reference: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: CutMode::Submodular,
            modes: CutMode::ALL.to_vec(),
            rounds: 10,
            max_cuts_per_round: 50,
            newton: NewtonParams::default(),
            seed: 0,
            validation_samples: 256,
            full_validation_limit: 12,
            reference: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let n = &self.newton;
        let positive = [n.delta, n.eta_inf, n.root_tol, n.min_step, n.min_efficacy, n.max_dynamic_range];
        if positive.iter().any(|v| !(*v > 0.0)) || n.max_steps == 0 {
            return Err(Error::Input("all tolerances and Newton parameters must be positive".into()));
        }
        if self.max_cuts_per_round == 0 {
            return Err(Error::Input("max_cuts_per_round must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootNodeReport {
    pub instance: String,
    pub mode: CutMode,
    pub d1: f64,
    pub d2: f64,
    pub p: f64,
    /// `(d1 - d2) / (d1 - p)`, the share of the root gap closed by cuts.
    pub closed: f64,
    pub cuts: usize,
    pub rounds: usize,
    pub sep_time_ms: f64,
    pub total_time_ms: f64,
    /// Set when an LP re-solve failed mid-loop; bounds are those before the failure.
    pub failed: bool,
    pub cut_log: Vec<String>,
    /// Accepted cuts over the structural columns, in the order added.
    #[serde(skip)]
    pub cut_rows: Vec<IntersectionCut>,
    /// Dual bound after each round, starting with `d1`.
    pub bounds: Vec<f64>,
    pub skipped: Vec<(String, usize)>,
}

impl RootNodeReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3},{:.3}",
            self.instance, self.mode, self.d1, self.d2, self.p, self.closed, self.cuts, self.sep_time_ms, self.total_time_ms
        )
    }
}

/// Closed root gap for maximization; zero when the LP bound is already tight.
pub fn closed_gap(d1: f64, d2: f64, p: f64) -> f64 {
    let denom = d1 - p;
    if denom <= 1e-9 * d1.abs().max(1.0) {
        0.0
    } else {
        (d1 - d2) / denom
    }
}

/// Most fractional coordinate, ties to the smallest index; `None` when integral.
pub fn split_selector(x: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &v) in x.iter().enumerate() {
        let frac = v.min(1.0 - v);
        if frac > INTEGRALITY_TOL && best.is_none_or(|(_, b)| frac > b) {
            best = Some((j, frac));
        }
    }
    best.map(|(j, _)| j)
}

fn is_integral(x: &[f64]) -> bool {
    x.iter().all(|&v| v.min(1.0 - v) <= INTEGRALITY_TOL)
}

/// Points every emitted cut is checked against.
struct Validator<'a> {
    model: &'a BuiltModel,
    points: Vec<Vec<f64>>,
}

impl<'a> Validator<'a> {
    fn new(model: &'a BuiltModel, config: &RunConfig, optimum: Option<&[bool]>) -> Result<Self> {
        let n = model.n();
        let mut xs: Vec<Vec<bool>> = Vec::new();
        if n <= config.full_validation_limit {
            xs.extend((0..(1usize << n)).map(|m| bits(m, n)));
        } else {
            if let Some(opt) = optimum {
                xs.push(opt.to_vec());
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_c0de);
            for _ in 0..config.validation_samples {
                xs.push((0..n).map(|_| rng.random::<bool>()).collect());
            }
            xs.push(vec![false; n]);
            xs.push(vec![true; n]);
        }
        let mut points = Vec::new();
        for x in &xs {
            points.extend(model.points(x)?);
        }
        Ok(Self { model, points })
    }

    fn check(&self, cut: &IntersectionCut) -> Result<()> {
        for z in &self.points {
            if !cut.is_satisfied(z, crate::cuts::VALIDATION_TOL) {
                return Err(Error::InvalidCut(format!(
                    "{} cut violated by {:.3e} at a feasible point of a model with {} columns",
                    cut.kind.label(),
                    -cut.slack(z),
                    self.model.lp.n_cols()
                )));
            }
        }
        Ok(())
    }
}

/// Maps a cut over `(x, t)` coordinates to the structural columns of a model.
fn lift_xt_cut(model: &BuiltModel, mut cut: IntersectionCut) -> IntersectionCut {
    let n = model.n();
    let mut alpha = vec![0.0; model.lp.n_cols()];
    for (j, &c) in model.lift.x_cols.iter().enumerate() {
        alpha[c] = cut.alpha[j];
    }
    alpha[model.lift.t_col] = cut.alpha[n];
    cut.alpha = alpha;
    cut
}

/// Scales a cut to unit max-norm coefficients.
fn normalize(cut: &mut IntersectionCut) {
    let big = cut.alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if big > 0.0 {
        for a in &mut cut.alpha {
            *a /= big;
        }
        cut.beta /= big;
    }
}

/// Runs the root-node cutting loop on a built model.
pub fn root_loop(model: &BuiltModel, config: &RunConfig, instance: &str, reference: Option<Reference>) -> Result<RootNodeReport> {
    config.validate()?;
    let start = Instant::now();
    let offset = model.objective.offset();
    let mut simplex = Simplex::new(&model.lp)?;
    let status = simplex.solve()?;
    if status != LpStatus::Optimal {
        return Err(Error::Model(format!("root LP is {status:?}")));
    }
    let d1 = simplex.objective();
    let reference = match (reference, config.reference) {
        (Some(r), _) => r,
        (None, Some(p)) if model.n() > REFERENCE_BRUTEFORCE_LIMIT => Reference { p, optimum: None },
        (None, _) => {
            let (p, x) = reference_by_enumeration(model)?;
            Reference { p, optimum: Some(x) }
        }
    };
    let p = config.reference.unwrap_or(reference.p);
    let optimum = reference.optimum;
    let validator = Validator::new(model, config, optimum.as_deref())?;
    let mut report = RootNodeReport {
        instance: instance.to_string(),
        mode: config.mode,
        d1: d1 + offset,
        d2: d1 + offset,
        p,
        closed: 0.0,
        cuts: 0,
        rounds: 0,
        sep_time_ms: 0.0,
        total_time_ms: 0.0,
        failed: false,
        cut_log: Vec::new(),
        cut_rows: Vec::new(),
        bounds: vec![d1 + offset],
        skipped: Vec::new(),
    };
    let mut skipped: std::collections::BTreeMap<String, usize> = Default::default();
    let mut d2 = d1;
    let mut sep_time = 0.0;
    for round in 0..config.rounds {
        if config.mode == CutMode::None {
            break;
        }
        let sol = simplex.solution();
        let xbar: Vec<f64> = model.lift.x_cols.iter().map(|&c| sol.x[c]).collect();
        if is_integral(&xbar) {
            debug!("round {round}: apex is integral");
            break;
        }
        let sep_start = Instant::now();
        let corner = simplex.corner()?;
        let projected = project_corner(&corner, &model.lift)?;
        let mut found: Vec<IntersectionCut> = Vec::new();
        let mut note = |reason: NoCut, what: &str| {
            *skipped.entry(format!("{what}: {reason}")).or_insert(0) += 1;
            if reason == NoCut::NotInterior {
                debug!("round {round}: {what} apex is not interior");
            }
        };
        for target in &model.targets {
            let wanted = match target.role {
                TargetRole::Objective => config.mode.uses_objective_target(),
                TargetRole::Constraint(_) => config.mode.uses_constraint_targets(),
            };
            if !wanted {
                continue;
            }
            let label = match target.role {
                TargetRole::Objective => "objective".to_string(),
                TargetRole::Constraint(i) => format!("constraint {i}"),
            };
            if config.mode != CutMode::Submodular && target.ss.f1.is_structurally_zero() {
                match gradient_cut(&target.ss, &projected.x, projected.t)? {
                    Ok(cut) => found.push(lift_xt_cut(model, cut)),
                    Err(reason) => note(reason, &label),
                }
                continue;
            }
            let set = build_reverse_linearized(&target.ss, &projected.x)?;
            match intersection_cut(&corner, &projected, &set, &config.newton)? {
                Ok(mut cut) => {
                    if config.mode != CutMode::Submodular && !matches!(set, SFreeSet::EnvelopeEpigraph { .. }) {
                        cut.kind = CutKind::Ss;
                    }
                    found.push(cut);
                }
                Err(reason) => note(reason, &label),
            }
        }
        if config.mode.uses_splits() {
            if let Some(j) = split_selector(&projected.x) {
                let set = SFreeSet::LiftedSplit { j };
                match intersection_cut(&corner, &projected, &set, &config.newton)? {
                    Ok(cut) => found.push(cut),
                    Err(reason) => note(reason, "split"),
                }
            }
        }
        found.sort_by(|a, b| b.efficacy.total_cmp(&a.efficacy));
        found.truncate(config.max_cuts_per_round);
        let mut added = 0;
        for mut cut in found {
            cut.drop_tiny(&model.lp.lower, &model.lp.upper, 1e-12);
            normalize(&mut cut);
            validator.check(&cut)?;
            let apex: Vec<f64> = sol.x.clone();
            if cut.slack(&apex) >= -1e-9 {
                note(NoCut::NotViolated, "cleaned cut");
                continue;
            }
            info!("{}", cut.log_line());
            report.cut_log.push(cut.log_line());
            simplex.add_row(cut.alpha.clone(), RowSense::Ge, cut.beta)?;
            report.cut_rows.push(cut);
            added += 1;
        }
        sep_time += sep_start.elapsed().as_secs_f64();
        report.rounds = round + 1;
        if added == 0 {
            break;
        }
        report.cuts += added;
        match simplex.solve() {
            Ok(LpStatus::Optimal) => {}
            Ok(other) => {
                warn!("LP became {other:?} after round {round}");
                report.failed = true;
                break;
            }
            Err(e) => {
                warn!("LP failed after round {round}: {e}");
                report.failed = true;
                break;
            }
        }
        let bound = simplex.objective();
        if bound > d2 + 1e-7 * d2.abs().max(1.0) {
            return Err(Error::Internal(format!("dual bound increased from {d2} to {bound}")));
        }
        d2 = bound.min(d2);
        report.bounds.push(d2 + offset);
    }
    report.d2 = d2 + offset;
    report.closed = closed_gap(report.d1, report.d2, p);
    report.sep_time_ms = sep_time * 1e3;
    report.total_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report.skipped = skipped.into_iter().collect();
    Ok(report)
}

/// Optimum by enumeration, including the objective offset.
pub fn reference_by_enumeration(model: &BuiltModel) -> Result<(f64, Vec<bool>)> {
    if model.n() > REFERENCE_BRUTEFORCE_LIMIT {
        return Err(Error::Input(format!(
            "n = {} is too large to enumerate; supply a reference bound in a .ref sidecar file",
            model.n()
        )));
    }
    let (v, x) = model
        .bruteforce_optimum()?
        .ok_or_else(|| Error::Model("no feasible binary point".into()))?;
    Ok((v + model.objective.offset(), x))
}

pub fn build_model(instance: &Instance) -> Result<BuiltModel> {
    match instance {
        Instance::Graph(g) => build_maxcut_model(g),
        Instance::Polynomial(p) => build_mubo_model(p),
    }
}

/// Reference primal bound and, when known, a point attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub p: f64,
    pub optimum: Option<Vec<bool>>,
}

/// Reads an instance, builds its model and finds its reference bound.
///
/// A `.ref` sidecar wins over enumeration; small instances are still
/// enumerated so the optimum point can validate cuts.
pub fn load(path: &Path) -> Result<(BuiltModel, Reference)> {
    let model = build_model(&read_instance(path)?)?;
    let sidecar = read_reference(path)?;
    let reference = if model.n() <= REFERENCE_BRUTEFORCE_LIMIT {
        let (p, x) = reference_by_enumeration(&model)?;
        Reference { p: sidecar.unwrap_or(p), optimum: Some(x) }
    } else {
        let p = sidecar.ok_or_else(|| {
            Error::Input(format!(
                "n = {} is too large to enumerate; supply a reference bound in {}.ref",
                model.n(),
                path.display()
            ))
        })?;
        Reference { p, optimum: None }
    };
    Ok((model, reference))
}

/// Largest dimension the `verify` checks enumerate.
pub const VERIFY_LIMIT: usize = 10;

/// Brute-force self-checks of a model: submodularity of each decomposition part,
/// envelope exactness on binaries, exactness of the linearization and freeness
/// of the reverse-linearized set at the center of the cube.
pub fn verify_model(model: &BuiltModel) -> Result<Vec<(String, bool)>> {
    let n = model.n();
    crate::error::capacity("verify", n, VERIFY_LIMIT)?;
    let mut checks = Vec::new();
    for (k, target) in model.targets.iter().enumerate() {
        let name = match target.role {
            TargetRole::Objective => "objective".to_string(),
            TargetRole::Constraint(i) => format!("constraint{i}"),
        };
        checks.push((format!("{name} f1 submodular"), crate::submodular::is_submodular_bruteforce(&target.ss.f1)?));
        checks.push((format!("{name} f2 submodular"), crate::submodular::is_submodular_bruteforce(&target.ss.f2)?));
        let mut exact = true;
        let mut decomposed = true;
        for mask in 0..(1usize << n) {
            let x = bits(mask, n);
            let xr: Vec<f64> = x.iter().map(|&b| f64::from(u8::from(b))).collect();
            for g in [&target.ss.f1, &target.ss.f2] {
                let env = crate::envelope::envelope_eval(g, &xr)?.value;
                exact &= (env - g.evaluate(&x)?).abs() <= 1e-9 * env.abs().max(1.0);
            }
            if k == 0 {
                let f = model.objective.evaluate(&x)?;
                decomposed &= (target.ss.value(&x)? - f).abs() <= 1e-9 * f.abs().max(1.0);
            }
        }
        checks.push((format!("{name} envelope exact on binaries"), exact));
        if k == 0 {
            checks.push(("objective decomposition".to_string(), decomposed));
        }
        let center = vec![0.5; n];
        let set = build_reverse_linearized(&target.ss, &center)?;
        checks.push((format!("{name} set is free"), crate::sfree::verify_free_bruteforce(&set, &target.ss)?));
    }
    let mut linear = true;
    for mask in 0..(1usize << n) {
        let x = bits(mask, n);
        if !model.is_feasible(&x) {
            continue;
        }
        let f = model.objective.evaluate(&x)?;
        let z = model.embed(&x, f);
        linear &= model.lp.max_violation(&z) <= 1e-9 * f.abs().max(1.0);
        linear &= (model.lp.objective_value(&z) - f).abs() <= 1e-9 * f.abs().max(1.0);
    }
    checks.push(("linearization exact".to_string(), linear));
    Ok(checks)
}

/// Shifted geometric mean `exp(mean(ln(v + s))) - s`.
pub fn shifted_geometric_mean(values: &[f64], shift: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mean = values.iter().map(|v| (v + shift).ln()).sum::<f64>() / values.len() as f64;
    mean.exp() - shift
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mode: CutMode,
    pub instances: usize,
    pub closed: f64,
    /// Closed gap relative to mode `none`; `None` when that baseline is zero.
    pub relative: Option<f64>,
    pub time_ms: f64,
    pub cuts: f64,
}

/// Shifted geometric means (shift 1) of one mode's reports.
pub fn aggregate(reports: &[RootNodeReport], baseline_closed: Option<f64>) -> Result<Summary> {
    let first = reports.first().ok_or_else(|| Error::Input("nothing to aggregate".into()))?;
    let col = |f: fn(&RootNodeReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
    let closed = shifted_geometric_mean(&col(|r| r.closed), 1.0);
    Ok(Summary {
        mode: first.mode,
        instances: reports.len(),
        closed,
        relative: baseline_closed.filter(|b| *b > 0.0).map(|b| closed / b),
        time_ms: shifted_geometric_mean(&col(|r| r.total_time_ms), 1.0),
        cuts: shifted_geometric_mean(&col(|r| r.cuts as f64), 1.0),
    })
}

pub fn summary_table(summaries: &[Summary]) -> String {
    let mut out = format!("{:<12} {:>10} {:>10} {:>12} {:>10}\n", "mode", "closed", "relative", "time_ms", "cuts");
    for s in summaries {
        let rel = s.relative.map_or("n/a".to_string(), |r| format!("{r:.2}"));
        out.push_str(&format!(
            "{:<12} {:>10.4} {:>10} {:>12.2} {:>10.2}\n",
            s.mode.to_string(),
            s.closed,
            rel,
            s.time_ms,
            s.cuts
        ));
    }
    out
}

/// Runs every configured mode on every instance of a directory in parallel.
pub fn bench(dir: &Path, config: &RunConfig) -> Result<(Vec<RootNodeReport>, Vec<Summary>)> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_none_or(|e| e != "ref" && e != "json" && e != "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Input(format!("no instances in {}", dir.display())));
    }
    let loaded: Vec<_> = paths
        .par_iter()
        .map(|p| load(p).map(|(m, r)| (p.clone(), m, r)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, CutMode)> = (0..loaded.len())
        .flat_map(|i| config.modes.iter().map(move |&m| (i, m)))
        .collect();
    let reports: Vec<RootNodeReport> = jobs
        .par_iter()
        .map(|&(i, mode)| {
            let (path, model, reference) = &loaded[i];
            let cfg = RunConfig { mode, ..config.clone() };
            let name = path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            root_loop(model, &cfg, &name, Some(reference.clone()))
        })
        .collect::<Result<_>>()?;
    let summaries = summarize(&reports, &config.modes)?;
    Ok((reports, summaries))
}

pub fn summarize(reports: &[RootNodeReport], modes: &[CutMode]) -> Result<Vec<Summary>> {
    let of = |m: CutMode| reports.iter().filter(|r| r.mode == m).cloned().collect::<Vec<_>>();
    let baseline = {
        let none = of(CutMode::None);
        if none.is_empty() { None } else { Some(aggregate(&none, None)?.closed) }
    };
    modes
        .iter()
        .filter(|m| reports.iter().any(|r| r.mode == **m))
        .map(|&m| aggregate(&of(m), baseline))
        .collect()
}

pub fn write_report(path: &Path, reports: &[RootNodeReport]) -> Result<()> {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    G05,
    Pw,
    Autocorr,
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g05" => Ok(GeneratorKind::G05),
            "pw" => Ok(GeneratorKind::Pw),
            "autocorr" => Ok(GeneratorKind::Autocorr),
            _ => Err(Error::Input(format!("unknown generator `{s}`"))),
        }
    }
}

/// Random graph with edge probability `density` and unit weights.
pub fn generate_g05(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    check_generator(n, density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                edges.push((i, j, 1.0));
            }
        }
    }
    WeightedGraph::new(n, edges)
}

/// Random graph with edge probability `density` and integer weights uniform in `[1, 100]`.
pub fn generate_pw(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    check_generator(n, density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                edges.push((i, j, rng.random_range(1..=100) as f64));
            }
        }
    }
    WeightedGraph::new(n, edges)
}

/// Polynomial with the sparsity pattern of the sequence autocorrelation energy
/// `sum_{k=1}^{L} C_k^2`, `C_k = sum_i s_i s_{i+k}`, in spin variables: quadratic
/// terms `{i, i+2k}` and quartic terms `{i, i+k, j, j+k}`. Magnitudes are the
/// expansion multiplicities; each merged term gets a seeded random sign.
pub fn generate_autocorr(n: usize, max_lag: usize, seed: u64) -> Result<BmpInstance> {
    check_generator(n, 0.5)?;
    let lag = max_lag.clamp(1, n - 1);
    let mut terms: std::collections::BTreeMap<Vec<usize>, f64> = Default::default();
    for k in 1..=lag {
        for i in 0..(n - k) {
            for j in (i + 1)..(n - k) {
                let mut support = vec![i, i + k, j, j + k];
                support.sort_unstable();
                support.dedup();
                // j = i + k collapses s_{i+k}^2 = 1 and leaves {i, i + 2k}
                if support.len() == 4 {
                    *terms.entry(support).or_insert(0.0) += 2.0;
                } else {
                    support.retain(|&v| v != i + k);
                    *terms.entry(support).or_insert(0.0) += 2.0;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list: Vec<(f64, Vec<usize>)> = terms.into_iter().map(|(s, a)| (a, s)).collect();
    list.shuffle(&mut rng);
    for t in &mut list {
        if rng.random::<bool>() {
            t.0 = -t.0;
        }
    }
    list.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(BmpInstance::unconstrained(MultilinearFunction::new(n, list)?))
}

fn check_generator(n: usize, density: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Input("generators need n >= 2".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Input(format!("density {density} outside [0, 1]")));
    }
    Ok(())
}

/// Generates `count` seeded instances of one kind into `dir`, returning their paths.
pub fn generate_instances(
    kind: GeneratorKind,
    n: usize,
    density: f64,
    max_lag: usize,
    seed: u64,
    count: usize,
    dir: &Path,
) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(count);
    for k in 0..count {
        let s = seed.wrapping_add(k as u64);
        let (name, text) = match kind {
            GeneratorKind::G05 => (format!("g05_{n}_{s}.txt"), crate::formats::write_graph(&generate_g05(n, density, s)?)),
            GeneratorKind::Pw => (format!("pw_{n}_{s}.txt"), crate::formats::write_graph(&generate_pw(n, density, s)?)),
            GeneratorKind::Autocorr => (
                format!("autocorr_{n}_{s}.mubo"),
                crate::formats::write_polynomial(&generate_autocorr(n, max_lag, s)?),
            ),
        };
        let path = dir.join(name);
        std::fs::write(&path, text)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3_model() -> BuiltModel {
        let g = WeightedGraph::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        build_maxcut_model(&g).unwrap()
    }

    fn run(mode: CutMode) -> RootNodeReport {
        let cfg = RunConfig { mode, ..RunConfig::default() };
        root_loop(&k3_model(), &cfg, "k3", None).unwrap()
    }

    #[test]
    fn k3_modes() {
        let none = run(CutMode::None);
        assert_eq!((none.d1, none.d2, none.p, none.closed, none.cuts), (3.0, 3.0, 2.0, 0.0, 0));
        let sub = run(CutMode::Submodular);
        assert!(sub.closed > 0.0, "{sub:?}");
        assert!(sub.closed <= 1.0 + 1e-9);
        assert!(sub.bounds.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn integral_lp_gets_no_split() {
        let g = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let m = build_maxcut_model(&g).unwrap();
        let cfg = RunConfig { mode: CutMode::Split, ..RunConfig::default() };
        let r = root_loop(&m, &cfg, "edge", None).unwrap();
        assert_eq!((r.cuts, r.closed), (0, 0.0));
    }

    #[test]
    fn split_selector_examples() {
        assert_eq!(split_selector(&[0.5, 0.9, 0.1]), Some(0));
        assert_eq!(split_selector(&[0.4, 0.6]), Some(0));
        assert_eq!(split_selector(&[0.0, 1.0]), None);
    }

    #[test]
    fn sgm_examples() {
        assert!((shifted_geometric_mean(&[0.0, 3.0], 1.0) - 1.0).abs() < 1e-12);
        assert!((shifted_geometric_mean(&[2.5; 4], 1.0) - 2.5).abs() < 1e-12);
        let s = summary_table(&[Summary { mode: CutMode::Split, instances: 1, closed: 0.1, relative: None, time_ms: 1.0, cuts: 2.0 }]);
        assert!(s.lines().next().unwrap().split_whitespace().eq(["mode", "closed", "relative", "time_ms", "cuts"]));
        assert!(s.contains("n/a"));
    }

    #[test]
    fn closed_gap_orientation() {
        assert_eq!(closed_gap(3.0, 3.0, 2.0), 0.0);
        assert_eq!(closed_gap(3.0, 2.5, 2.0), 0.5);
        assert_eq!(closed_gap(2.0, 2.0, 2.0), 0.0);
    }

    #[test]
    fn generators_are_seeded() {
        let a = generate_g05(10, 0.5, 1).unwrap();
        assert_eq!(a, generate_g05(10, 0.5, 1).unwrap());
        assert!(a.edges.iter().all(|e| e.2 == 1.0));
        assert!(a.edges.len() > 10 && a.edges.len() < 35);
        let pw = generate_pw(40, 0.1, 3).unwrap();
        let frac = pw.edges.len() as f64 / (40.0 * 39.0 / 2.0);
        assert!((0.05..0.15).contains(&frac));
        assert!(pw.edges.iter().all(|e| (1.0..=100.0).contains(&e.2) && e.2.fract() == 0.0));
        let ac = generate_autocorr(5, 4, 7).unwrap();
        assert!(ac.objective.terms().iter().all(|t| t.support.len() == 2 || t.support.len() == 4));
        assert_eq!(
            ac.objective.terms().iter().map(|t| &t.support).collect::<Vec<_>>(),
            generate_autocorr(5, 4, 7).unwrap().objective.terms().iter().map(|t| &t.support).collect::<Vec<_>>()
        );
    }

    #[test]
    fn generated_files_load() {
        let dir = tempfile::tempdir().unwrap();
        let paths = generate_instances(GeneratorKind::Autocorr, 6, 0.5, 2, 10, 3, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        for p in &paths {
            let (model, reference) = load(p).unwrap();
            assert_eq!(model.n(), 6);
            assert!(reference.optimum.is_some());
        }
        let graphs = generate_instances(GeneratorKind::G05, 8, 0.5, 0, 1, 2, dir.path()).unwrap();
        assert!(matches!(read_instance(&graphs[0]).unwrap(), Instance::Graph(_)));
    }

    #[test]
    fn config_json_defaults() {
        let cfg: RunConfig = serde_json::from_str(r#"{"rounds": 3, "modes": ["none", "split"]}"#).unwrap();
        assert_eq!(cfg.rounds, 3);
        assert_eq!(cfg.newton.delta, 0.2);
        assert_eq!(cfg.modes, vec![CutMode::None, CutMode::Split]);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }
}

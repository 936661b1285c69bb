//! Sperner-labeled subdivision of the mass simplex `A_a`: vertex labels from
//! the target map, the combinatorial degree, and a search for `ψ(α) = 0`.
//!
//! A vertex label is the wall `ψ(α)` lies on. Faces `α_i = 0` carry the
//! identity label `i`, so the labeling extends identity boundary data and
//! the oriented count of completely labeled cells is the degree.

pub mod grid;

use crate::integrator::{IntegrationError, IvpControls};
use crate::system::ReducedSystem;
use crate::target::{argmin, psi, TargetCase, TargetResult};
use grid::{all_cells, compositions, normalize, orientation, reference_orientation, Cell};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

/// Deepest lattice resolution the search will refine to (`N = 2^MAX_DEPTH`).
pub const MAX_DEPTH: u32 = 52;

/// How many rings of vertex neighbours a refinement step may search when the
/// selected cell has no completely labeled child.
pub const MAX_RINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    HitIndex(usize),
    Solution,
    Boundary(usize),
    Unresolved,
}

/// A label together with the wall index used for counting. For
/// `Unresolved` the index is the argmin of the terminal state, for
/// `Solution` it is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub label: Label,
    pub wall: usize,
}

impl VertexLabel {
    pub fn new(label: Label) -> Self {
        let wall = match label {
            Label::HitIndex(i) | Label::Boundary(i) => i,
            Label::Solution | Label::Unresolved => 0,
        };
        Self { label, wall }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledPoint {
    #[serde(flatten)]
    pub label: VertexLabel,
    pub target: TargetResult,
    /// True when the label needed the tightened second attempt.
    pub retried: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum DegreeError {
    #[error(
        "face vertex {alpha:?} carries label {wall}, which is not one of its zero coordinates"
    )]
    InconsistentBoundary { alpha: Vec<f64>, wall: usize },
    #[error("no zero found within the budget (depth {depth}, best |ψ| = {best_norm:e})")]
    NotFound {
        depth: u32,
        best_norm: f64,
        best: Option<Box<TargetResult>>,
        cell: Vec<Vec<f64>>,
    },
    #[error("every interior vertex is unresolved; loosen r_max or tighten tolerances")]
    AllUnresolved,
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("lattice depth {0} is beyond the supported maximum")]
    DepthTooLarge(u32),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Integration(#[from] IntegrationError),
}

fn classify(target: TargetResult, eps_decay: f64) -> VertexLabel {
    let (label, wall) = match target.case {
        TargetCase::BoundaryIdentity => {
            let i = argmin(&target.alpha);
            (Label::Boundary(i), i)
        }
        TargetCase::WallHit => {
            let i = target.hit_index.unwrap_or_else(|| target.argmin());
            (Label::HitIndex(i), i)
        }
        TargetCase::DecayLimit if target.psi_norm() < eps_decay => (Label::Solution, 0),
        TargetCase::DecayLimit | TargetCase::Unresolved => (Label::Unresolved, target.argmin()),
    };
    VertexLabel { label, wall }
}

/// Labels one point, re-running once with tightened controls when the first
/// attempt is unresolved or exhausts its step budget.
pub fn label_point(
    rs: &ReducedSystem,
    alpha: &[f64],
    c: &IvpControls,
) -> Result<LabeledPoint, IntegrationError> {
    let retry = match psi(rs, alpha, c) {
        Ok(t) if t.case != TargetCase::Unresolved => {
            return Ok(LabeledPoint {
                label: classify(t.clone(), c.eps_decay),
                target: t,
                retried: false,
            })
        }
        Ok(_)
        | Err(IntegrationError::StepLimitExceeded { .. })
        | Err(IntegrationError::StiffnessFailure { .. }) => c.tightened(),
        Err(e) => return Err(e),
    };
    let t = psi(rs, alpha, &retry)?;
    Ok(LabeledPoint {
        label: classify(t.clone(), c.eps_decay),
        target: t,
        retried: true,
    })
}

pub fn label(
    rs: &ReducedSystem,
    alpha: &[f64],
    c: &IvpControls,
) -> Result<Label, IntegrationError> {
    Ok(label_point(rs, alpha, c)?.label.label)
}

/// Coarsest depth at which the argmin labeling of the faces carries degree
/// one: the resolution `2^depth` must be at least `len - 1`. Coarser
/// lattices put every boundary vertex on a lower-dimensional face, where the
/// lowest-index tie break is not homotopic to the identity.
pub fn min_depth(len: usize) -> u32 {
    let mut d = 0;
    while (1usize << d) + 1 < len {
        d += 1;
    }
    d
}

/// Labels on the full lattice of `A_a` at resolution `2^depth`.
#[derive(Debug, Clone, Serialize)]
pub struct SimplexGrid {
    pub a: f64,
    pub depth: u32,
    pub len: usize,
    /// Integer compositions of `2^depth`, lexicographic.
    pub lattice: Vec<Vec<u64>>,
    /// Physical points `a·x/2^depth`.
    pub vertices: Vec<Vec<f64>>,
    pub labels: Vec<VertexLabel>,
    #[serde(skip)]
    index: HashMap<Vec<u64>, usize>,
}

pub fn lattice_point(a: f64, n: u64, x: &[u64]) -> Vec<f64> {
    x.iter().map(|&xi| a * xi as f64 / n as f64).collect()
}

impl SimplexGrid {
    /// Builds a grid with labels from `labeler`, which sees each physical
    /// vertex once.
    pub fn with_labeler<F>(len: usize, a: f64, depth: u32, mut labeler: F) -> Self
    where
        F: FnMut(&[f64]) -> VertexLabel,
    {
        Self::with_lattice_labeler(len, a, depth, |_, alpha| labeler(alpha))
    }

    fn with_lattice_labeler<F>(len: usize, a: f64, depth: u32, mut labeler: F) -> Self
    where
        F: FnMut(&[u64], &[f64]) -> VertexLabel,
    {
        let n = 1u64 << depth;
        let lattice = compositions(len, n);
        let vertices: Vec<Vec<f64>> = lattice.iter().map(|x| lattice_point(a, n, x)).collect();
        let labels = lattice
            .iter()
            .zip(&vertices)
            .map(|(x, v)| labeler(x, v))
            .collect();
        Self::assemble(a, depth, len, lattice, vertices, labels)
    }

    fn assemble(
        a: f64,
        depth: u32,
        len: usize,
        lattice: Vec<Vec<u64>>,
        vertices: Vec<Vec<f64>>,
        labels: Vec<VertexLabel>,
    ) -> Self {
        let index = lattice
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), i))
            .collect();
        Self {
            a,
            depth,
            len,
            lattice,
            vertices,
            labels,
            index,
        }
    }

    /// Identity labeling: every vertex labeled by its smallest coordinate.
    pub fn identity(len: usize, a: f64, depth: u32) -> Self {
        Self::with_labeler(len, a, depth, |alpha| {
            let i = argmin(alpha);
            if alpha[i] == 0.0 {
                VertexLabel::new(Label::Boundary(i))
            } else {
                VertexLabel::new(Label::HitIndex(i))
            }
        })
    }

    /// Labels every vertex through the target map, in parallel.
    pub fn from_target_map(
        rs: &ReducedSystem,
        a: f64,
        depth: u32,
        c: &IvpControls,
        jobs: Option<usize>,
    ) -> Result<Self, DegreeError> {
        check_mass(a)?;
        if depth > MAX_DEPTH {
            return Err(DegreeError::DepthTooLarge(depth));
        }
        let len = rs.total_len();
        let n = 1u64 << depth;
        let lattice = compositions(len, n);
        let vertices: Vec<Vec<f64>> = lattice.iter().map(|x| lattice_point(a, n, x)).collect();
        let points = run_pool(jobs, || {
            vertices
                .par_iter()
                .map(|v| label_point(rs, v, c))
                .collect::<Result<Vec<_>, _>>()
        })??;
        let labels = points.iter().map(|p| p.label).collect();
        Ok(Self::assemble(a, depth, len, lattice, vertices, labels))
    }

    pub fn label_of(&self, x: &[u64]) -> Option<VertexLabel> {
        self.index.get(x).map(|&i| self.labels[i])
    }
}

fn check_mass(a: f64) -> Result<(), DegreeError> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(DegreeError::InvalidMass(a))
    }
}

fn run_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, DegreeError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| DegreeError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRecord {
    pub vertices: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub orientation: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub degree: i64,
    pub grid_depth: u32,
    pub completely_labeled_cells: usize,
    pub cells: Vec<CellRecord>,
    pub unresolved_vertices: usize,
}

/// Orientation of a cell under a labeling, or `None` when the labels do not
/// cover every wall.
fn cell_sign(cell: &Cell, walls: &[usize]) -> Option<i32> {
    let len = cell.dim() + 1;
    let mut by_label = vec![usize::MAX; len];
    for (v, &w) in walls.iter().enumerate() {
        if w >= len || by_label[w] != usize::MAX {
            return None;
        }
        by_label[w] = v;
    }
    let chart = cell.chart_vertices();
    let ordered: Vec<Vec<u64>> = by_label.iter().map(|&v| chart[v].clone()).collect();
    Some(orientation(&ordered))
}

fn cell_walls<F: Fn(&[u64]) -> VertexLabel>(
    cell: &Cell,
    lookup: &F,
) -> (Vec<VertexLabel>, Vec<usize>) {
    let labels: Vec<VertexLabel> = cell.vertices().iter().map(|x| lookup(x)).collect();
    let walls = labels.iter().map(|l| l.wall).collect();
    (labels, walls)
}

fn count_cells(grid: &SimplexGrid) -> DegreeReport {
    let lookup = |x: &[u64]| grid.label_of(x).expect("every lattice point is labeled");
    let n = 1u64 << grid.depth;
    let mut total = 0i64;
    let mut cells = Vec::new();
    for cell in all_cells(grid.len, grid.depth) {
        let (labels, walls) = cell_walls(&cell, &lookup);
        if let Some(sign) = cell_sign(&cell, &walls) {
            total += i64::from(sign);
            cells.push(CellRecord {
                vertices: cell
                    .vertices()
                    .iter()
                    .map(|x| lattice_point(grid.a, n, x))
                    .collect(),
                labels: labels.iter().map(|l| l.label).collect(),
                orientation: sign,
            });
        }
    }
    DegreeReport {
        degree: i64::from(reference_orientation(grid.len)) * total,
        grid_depth: grid.depth,
        completely_labeled_cells: cells.len(),
        cells,
        unresolved_vertices: grid
            .labels
            .iter()
            .filter(|l| l.label == Label::Unresolved)
            .count(),
    }
}

/// Signed count of completely labeled cells, without any boundary check.
pub fn oriented_count(grid: &SimplexGrid) -> i64 {
    count_cells(grid).degree
}

/// Degree of the labeling against identity boundary data.
pub fn compute_degree(grid: &SimplexGrid) -> Result<DegreeReport, DegreeError> {
    for (x, (alpha, l)) in grid
        .lattice
        .iter()
        .zip(grid.vertices.iter().zip(&grid.labels))
    {
        if x.contains(&0) && x.get(l.wall) != Some(&0) {
            return Err(DegreeError::InconsistentBoundary {
                alpha: alpha.clone(),
                wall: l.wall,
            });
        }
    }
    Ok(count_cells(grid))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveOptions {
    pub controls: IvpControls,
    /// Starting lattice depth for three or more components.
    pub depth: u32,
    /// Number of bisection or refinement iterations.
    pub budget: u32,
    pub jobs: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            controls: IvpControls::default(),
            depth: 3,
            budget: 60,
            jobs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub iteration: u32,
    pub depth: u32,
    pub vertices: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSearch {
    pub alpha_star: Vec<f64>,
    pub target: TargetResult,
    pub report: DegreeReport,
    pub trace: Vec<TraceStep>,
}

fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for p in points {
        for q in points {
            for (x, y) in p.iter().zip(q) {
                d = d.max((x - y).abs());
            }
        }
    }
    d
}

/// Searches `A_a` for `α★` with `‖ψ(α★)‖∞ < eps_decay`.
///
/// One component: a single shot at `α = a`. Two components: bisection on
/// `α(t) = (t a, (1-t) a)` keeping label 0 at the low end. More components:
/// a full grid at `opts.depth`, then repeated Kuhn refinement of one
/// completely labeled cell.
///
/// Returns as soon as a vertex decays. When the budget runs out, the best
/// vertex of the final cell is returned if it is within `eps_decay` of the
/// wall corner (possibly a wall hit, i.e. data on a finite ball).
pub fn find_zero(
    rs: &ReducedSystem,
    a: f64,
    opts: &SolveOptions,
) -> Result<ZeroSearch, DegreeError> {
    check_mass(a)?;
    match rs.total_len() {
        1 => single_shot(rs, a, opts),
        2 => bisect(rs, a, opts),
        _ => refine(rs, a, opts),
    }
}

fn single_shot(rs: &ReducedSystem, a: f64, opts: &SolveOptions) -> Result<ZeroSearch, DegreeError> {
    let p = label_point(rs, &[a], &opts.controls)?;
    let report = DegreeReport {
        degree: 1,
        grid_depth: 0,
        completely_labeled_cells: 1,
        cells: vec![CellRecord {
            vertices: vec![vec![a]],
            labels: vec![p.label.label],
            orientation: 1,
        }],
        unresolved_vertices: usize::from(p.label.label == Label::Unresolved),
    };
    let trace = vec![TraceStep {
        iteration: 0,
        depth: 0,
        vertices: vec![vec![a]],
        labels: vec![p.label.label],
        diameter: 0.0,
    }];
    accept_or_not_found(p.target, vec![vec![a]], report, trace, opts)
}

fn accept_or_not_found(
    best: TargetResult,
    cell: Vec<Vec<f64>>,
    report: DegreeReport,
    trace: Vec<TraceStep>,
    opts: &SolveOptions,
) -> Result<ZeroSearch, DegreeError> {
    let norm = best.psi_norm();
    let resolved = matches!(best.case, TargetCase::WallHit | TargetCase::DecayLimit);
    if resolved && norm < opts.controls.eps_decay {
        Ok(ZeroSearch {
            alpha_star: best.alpha.clone(),
            target: best,
            report,
            trace,
        })
    } else {
        Err(DegreeError::NotFound {
            depth: report.grid_depth,
            best_norm: norm,
            best: Some(Box::new(best)),
            cell,
        })
    }
}

fn better(a: &LabeledPoint, b: &LabeledPoint) -> bool {
    a.target.psi_norm() < b.target.psi_norm()
}

fn bisect(rs: &ReducedSystem, a: f64, opts: &SolveOptions) -> Result<ZeroSearch, DegreeError> {
    let c = &opts.controls;
    let at = |t: f64| vec![t * a, (1.0 - t) * a];
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut lo_pt: Option<LabeledPoint> = None;
    let mut hi_pt: Option<LabeledPoint> = None;
    let mut visited: Vec<(f64, usize)> = vec![(0.0, 0), (1.0, 1)];
    let mut trace = Vec::new();
    let mut any_resolved = false;

    for iteration in 0..opts.budget {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let p = label_point(rs, &at(mid), c)?;
        any_resolved |= p.label.label != Label::Unresolved;
        visited.push((mid, p.label.wall));
        trace.push(TraceStep {
            iteration,
            depth: iteration + 1,
            vertices: vec![at(lo), at(hi)],
            labels: vec![p.label.label],
            diameter: (hi - lo) * a,
        });
        if p.label.label == Label::Solution {
            let report = segment_report(&visited, a, iteration + 1);
            return Ok(ZeroSearch {
                alpha_star: p.target.alpha.clone(),
                target: p.target,
                report,
                trace,
            });
        }
        if p.label.wall == 0 {
            lo = mid;
            lo_pt = Some(p);
        } else {
            hi = mid;
            hi_pt = Some(p);
        }
    }
    if !any_resolved && !trace.is_empty() {
        return Err(DegreeError::AllUnresolved);
    }
    let report = segment_report(&visited, a, trace.len() as u32);
    let best = match (lo_pt, hi_pt) {
        (Some(l), Some(h)) => {
            if better(&h, &l) {
                h
            } else {
                l
            }
        }
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => label_point(rs, &at(0.5), c)?,
    };
    accept_or_not_found(best.target, vec![at(lo), at(hi)], report, trace, opts)
}

/// Oriented count along the explored points of the segment `t ∈ [0, 1]`.
fn segment_report(visited: &[(f64, usize)], a: f64, depth: u32) -> DegreeReport {
    let mut pts = visited.to_vec();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut total = 0i64;
    let mut cells = Vec::new();
    for w in pts.windows(2) {
        let (l, r) = (w[0].1, w[1].1);
        if l != r {
            let sign = if l == 0 { 1 } else { -1 };
            total += sign;
            cells.push(CellRecord {
                vertices: vec![
                    vec![w[0].0 * a, (1.0 - w[0].0) * a],
                    vec![w[1].0 * a, (1.0 - w[1].0) * a],
                ],
                labels: vec![Label::HitIndex(l), Label::HitIndex(r)],
                orientation: sign as i32,
            });
        }
    }
    DegreeReport {
        degree: total,
        grid_depth: depth,
        completely_labeled_cells: cells.len(),
        cells,
        unresolved_vertices: 0,
    }
}

struct Labeler<'a> {
    rs: &'a ReducedSystem,
    a: f64,
    opts: &'a SolveOptions,
    cache: HashMap<(u64, Vec<u64>), LabeledPoint>,
}

impl Labeler<'_> {
    fn ensure(&mut self, n: u64, points: &[Vec<u64>]) -> Result<(), DegreeError> {
        let mut todo: Vec<(u64, Vec<u64>)> = points
            .iter()
            .map(|x| normalize(n, x))
            .filter(|k| !self.cache.contains_key(k))
            .collect();
        todo.sort();
        todo.dedup();
        let (rs, a, c) = (self.rs, self.a, &self.opts.controls);
        let done = run_pool(self.opts.jobs, || {
            todo.par_iter()
                .map(|(n, x)| label_point(rs, &lattice_point(a, *n, x), c))
                .collect::<Result<Vec<_>, _>>()
        })??;
        self.cache.extend(todo.into_iter().zip(done));
        Ok(())
    }

    fn get(&self, n: u64, x: &[u64]) -> &LabeledPoint {
        &self.cache[&normalize(n, x)]
    }

    fn walls(&self, cell: &Cell) -> Vec<usize> {
        cell.vertices()
            .iter()
            .map(|x| self.get(cell.n, x).label.wall)
            .collect()
    }

    fn solution_in(&self, cells: &[Cell]) -> Option<LabeledPoint> {
        let mut found: Option<(Vec<u64>, &LabeledPoint)> = None;
        for cell in cells {
            for x in cell.vertices() {
                let p = self.get(cell.n, &x);
                if p.label.label == Label::Solution {
                    let key = normalize(cell.n, &x).1;
                    if found.as_ref().is_none_or(|(k, _)| key < *k) {
                        found = Some((key, p));
                    }
                }
            }
        }
        found.map(|(_, p)| p.clone())
    }

    /// The completely labeled cell closest to `anchor` (barycenter distance),
    /// ties broken by the lowest barycenter.
    fn select_near(&self, cells: &[Cell], anchor: &Cell) -> Option<Cell> {
        let target: Vec<u128> = anchor
            .barycenter_key()
            .iter()
            .map(|&x| 2 * u128::from(x))
            .collect();
        cells
            .iter()
            .filter(|c| cell_sign(c, &self.walls(c)).is_some())
            .map(|c| {
                let key = c.barycenter_key();
                let dist: u128 = key
                    .iter()
                    .zip(&target)
                    .map(|(&x, &t)| u128::from(x).abs_diff(t).pow(2))
                    .sum();
                (dist, key, c)
            })
            .min_by(|x, y| (x.0, &x.1).cmp(&(y.0, &y.1)))
            .map(|(_, _, c)| c.clone())
    }

    /// The completely labeled cell with the lowest barycenter, if any.
    fn select(&self, cells: &[Cell]) -> Option<Cell> {
        cells
            .iter()
            .filter(|c| cell_sign(c, &self.walls(c)).is_some())
            .min_by(|x, y| x.barycenter_key().cmp(&y.barycenter_key()))
            .cloned()
    }

    fn step(&self, iteration: u32, depth: u32, cell: &Cell) -> TraceStep {
        let vertices: Vec<Vec<f64>> = cell
            .vertices()
            .iter()
            .map(|x| lattice_point(self.a, cell.n, x))
            .collect();
        TraceStep {
            iteration,
            depth,
            labels: cell
                .vertices()
                .iter()
                .map(|x| self.get(cell.n, x).label.label)
                .collect(),
            diameter: diameter(&vertices),
            vertices,
        }
    }
}

fn refine(rs: &ReducedSystem, a: f64, opts: &SolveOptions) -> Result<ZeroSearch, DegreeError> {
    let len = rs.total_len();
    let mut depth = opts.depth.max(min_depth(len));
    if depth > MAX_DEPTH {
        return Err(DegreeError::DepthTooLarge(depth));
    }
    let mut lab = Labeler {
        rs,
        a,
        opts,
        cache: HashMap::new(),
    };
    let n = 1u64 << depth;
    lab.ensure(n, &compositions(len, n))?;
    let grid = SimplexGrid::with_lattice_labeler(len, a, depth, |x, _| lab.get(n, x).label);
    let report = compute_degree(&grid)?;
    let interior_resolved = lab
        .cache
        .values()
        .any(|p| !matches!(p.label.label, Label::Unresolved | Label::Boundary(_)));
    if !interior_resolved {
        return Err(DegreeError::AllUnresolved);
    }

    let cells = all_cells(len, depth);
    let mut trace = Vec::new();
    if let Some(p) = lab.solution_in(&cells) {
        return Ok(ZeroSearch {
            alpha_star: p.target.alpha.clone(),
            target: p.target,
            report,
            trace,
        });
    }
    let Some(mut current) = lab.select(&cells) else {
        return Err(DegreeError::NotFound {
            depth,
            best_norm: f64::INFINITY,
            best: None,
            cell: Vec::new(),
        });
    };
    trace.push(lab.step(0, depth, &current));

    for iteration in 1..=opts.budget {
        if depth >= MAX_DEPTH {
            break;
        }
        let mut patch = vec![current.clone()];
        let mut chosen = None;
        for ring in 0..=MAX_RINGS {
            if ring > 0 {
                let mut grown: BTreeSet<Cell> = patch.iter().cloned().collect();
                for cell in &patch {
                    grown.extend(cell.vertex_neighbors());
                }
                patch = grown.into_iter().collect();
            }
            let candidates: Vec<Cell> = patch.iter().flat_map(Cell::children).collect();
            let pts: Vec<Vec<u64>> = candidates.iter().flat_map(Cell::vertices).collect();
            lab.ensure(2 * current.n, &pts)?;
            if let Some(p) = lab.solution_in(&candidates) {
                trace.push(lab.step(iteration, depth + 1, &current));
                return Ok(ZeroSearch {
                    alpha_star: p.target.alpha.clone(),
                    target: p.target,
                    report,
                    trace,
                });
            }
            chosen = lab.select_near(&candidates, &current);
            if chosen.is_some() {
                break;
            }
        }
        let Some(next) = chosen else { break };
        current = next;
        depth += 1;
        trace.push(lab.step(iteration, depth, &current));
    }

    let best = current
        .vertices()
        .iter()
        .map(|x| lab.get(current.n, x))
        .filter(|p| !matches!(p.label.label, Label::Boundary(_)))
        .min_by(|x, y| x.target.psi_norm().total_cmp(&y.target.psi_norm()))
        .cloned();
    let cell: Vec<Vec<f64>> = current
        .vertices()
        .iter()
        .map(|x| lattice_point(a, current.n, x))
        .collect();
    match best {
        Some(p) => accept_or_not_found(p.target, cell, report, trace, opts).map_err(|e| match e {
            DegreeError::NotFound {
                best_norm,
                best,
                cell,
                ..
            } => DegreeError::NotFound {
                depth,
                best_norm,
                best,
                cell,
            },
            other => other,
        }),
        None => Err(DegreeError::NotFound {
            depth,
            best_norm: f64::INFINITY,
            best: None,
            cell,
        }),
    }
}

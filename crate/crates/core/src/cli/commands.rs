//! Subcommand bodies, callable without going through argument parsing.

use super::CommonArgs;
use crate::analysis::{decay_fit, pohozaev_residual, DecayFit, PohozaevReport};
use crate::degree::{
    compute_degree, find_zero, DegreeError, DegreeReport, Label, SimplexGrid, SolveOptions,
    TraceStep,
};
use crate::integrator::{shoot, IntegrationStats, IvpControls, Outcome, Trajectory};
use crate::system::{
    check_nondegeneracy, classify_criticality, read_spec, reduce, CriticalityReport,
    NondegeneracyReport, ReducedSystem, SystemSpec,
};
use crate::target::{from_outcome, psi, TargetCase, TargetResult};
use crate::{Error, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Inputs shared by the solver subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub controls: IvpControls,
    pub mass: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(spec_path: impl Into<PathBuf>) -> Self {
        Self {
            spec_path: spec_path.into(),
            controls: IvpControls::default(),
            mass: None,
            output_dir: None,
            seed: 0,
        }
    }

    pub(super) fn from_common(args: &CommonArgs, mass: Option<f64>) -> Self {
        Self {
            spec_path: args.spec.clone(),
            controls: args.controls.resolve(),
            mass,
            output_dir: args.out_dir.clone(),
            seed: args.seed,
        }
    }

    fn load(&self) -> Result<(SystemSpec, ReducedSystem)> {
        self.controls.check()?;
        let spec = read_spec(&self.spec_path)?;
        let rs = reduce(&spec)?;
        Ok((spec, rs))
    }

    fn mass(&self) -> Result<f64> {
        match self.mass {
            Some(a) if a > 0.0 && a.is_finite() => Ok(a),
            Some(a) => Err(DegreeError::InvalidMass(a).into()),
            None => Err(Error::InvalidArgument("a mass is required".into())),
        }
    }

    fn out_dir(&self) -> Result<Option<&Path>> {
        let Some(dir) = self.output_dir.as_deref() else {
            return Ok(None);
        };
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Some(dir))
    }
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io {
        path: name.into(),
        source: std::io::Error::other(e),
    })?;
    text.push('\n');
    write_file(dir, name, text.as_bytes())
}

fn write_trajectory(dir: &Path, name: &str, traj: &Trajectory) -> Result<()> {
    let mut buf = Vec::new();
    traj.write_csv(&mut buf)?;
    write_file(dir, name, &buf)
}

/// Gnuplot script plotting every chain component of `csv` against `r` on a
/// logarithmic axis.
pub fn gnuplot_script(csv: &str, components: usize) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale x\n\
         set xlabel 'r'\n\
         set ylabel 'w'\n\
         plot for [i=2:{}] '{csv}' using 1:i with lines\n",
        components + 1
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    #[serde(flatten)]
    pub criticality: CriticalityReport,
    pub nondegeneracy: NondegeneracyReport,
    pub reduced_len: usize,
}

pub fn cmd_classify(spec_path: &Path) -> Result<ClassifyReport> {
    let spec = read_spec(spec_path)?;
    let rs = reduce(&spec)?;
    Ok(ClassifyReport {
        criticality: classify_criticality(&spec),
        nondegeneracy: check_nondegeneracy(&spec),
        reduced_len: rs.total_len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ShootReport {
    pub seed: u64,
    pub target: TargetResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<IntegrationStats>,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<String>,
}

/// Integrates one shooting vector. Boundary points return the identity
/// result and write no trajectory.
pub fn cmd_shoot(cfg: &RunConfig, alpha: &[f64], emit_plot: bool) -> Result<ShootReport> {
    let (_, rs) = cfg.load()?;
    if alpha.contains(&0.0) {
        // validates the vector and returns the identity without integrating
        let target = psi(&rs, alpha, &cfg.controls)?;
        return Ok(ShootReport {
            seed: cfg.seed,
            target,
            outcome: None,
            stats: None,
            points: 0,
            trajectory_csv: None,
        });
    }
    let run = shoot(&rs, alpha, &cfg.controls, true)?;
    let mut csv = None;
    if let Some(dir) = cfg.out_dir()? {
        write_trajectory(dir, "trajectory.csv", &run.trajectory)?;
        if emit_plot {
            write_file(
                dir,
                "trajectory.gp",
                gnuplot_script("trajectory.csv", rs.total_len()).as_bytes(),
            )?;
        }
        csv = Some("trajectory.csv".to_string());
    }
    let report = ShootReport {
        seed: cfg.seed,
        target: from_outcome(alpha, run.outcome.clone()),
        outcome: Some(run.outcome),
        stats: Some(run.stats),
        points: run.trajectory.len(),
        trajectory_csv: csv,
    };
    if let Some(dir) = cfg.out_dir()? {
        write_json(dir, "outcome.json", &report)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// `ψ(α★)` is a decay limit below `eps_decay`.
    EntireSolution,
    /// `ψ(α★)` vanishes at a wall hit: Navier data on a finite ball.
    NavierOnly,
    NotFound,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub seed: u64,
    pub mass: f64,
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_star: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<DegreeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_csv: Option<String>,
    pub trace: Vec<TraceStep>,
    /// Diagnostics of a failed search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub not_found: Option<NotFoundDetail>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NotFoundDetail {
    pub depth: u32,
    pub best_norm: f64,
    pub best: Option<TargetResult>,
    pub cell: Vec<Vec<f64>>,
}

/// Runs the zero search on `Σα = mass`, then integrates the profile at
/// `α★`. A search that ends without a zero is reported with status
/// `not_found` rather than as an error.
pub fn cmd_solve(
    cfg: &RunConfig,
    depth: u32,
    budget: u32,
    jobs: Option<usize>,
    emit_plot: bool,
) -> Result<SolveReport> {
    let (_, rs) = cfg.load()?;
    let mass = cfg.mass()?;
    let opts = SolveOptions {
        controls: cfg.controls.clone(),
        depth,
        budget,
        jobs,
    };
    let search = match find_zero(&rs, mass, &opts) {
        Ok(s) => s,
        Err(DegreeError::NotFound {
            depth,
            best_norm,
            best,
            cell,
        }) => {
            let report = SolveReport {
                seed: cfg.seed,
                mass,
                status: SolveStatus::NotFound,
                alpha_star: None,
                target: None,
                degree: None,
                profile_outcome: None,
                profile_csv: None,
                trace: Vec::new(),
                not_found: Some(NotFoundDetail {
                    depth,
                    best_norm,
                    best: best.map(|b| *b),
                    cell,
                }),
            };
            if let Some(dir) = cfg.out_dir()? {
                write_json(dir, "solution.json", &report)?;
            }
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    let status = if search.target.case == TargetCase::DecayLimit {
        SolveStatus::EntireSolution
    } else {
        SolveStatus::NavierOnly
    };
    let run = shoot(&rs, &search.alpha_star, &cfg.controls, true)?;
    let mut csv = None;
    let dir = cfg.out_dir()?;
    if let Some(dir) = dir {
        write_trajectory(dir, "profile.csv", &run.trajectory)?;
        if emit_plot {
            write_file(
                dir,
                "profile.gp",
                gnuplot_script("profile.csv", rs.total_len()).as_bytes(),
            )?;
        }
        csv = Some("profile.csv".to_string());
    }
    let report = SolveReport {
        seed: cfg.seed,
        mass,
        status,
        alpha_star: Some(search.alpha_star),
        target: Some(search.target),
        degree: Some(search.report),
        profile_outcome: Some(run.outcome),
        profile_csv: csv,
        trace: search.trace,
        not_found: None,
    };
    if let Some(dir) = dir {
        write_json(dir, "solution.json", &report)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    #[serde(flatten)]
    pub pohozaev: PohozaevReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayFit>,
}

pub fn cmd_verify(
    spec_path: &Path,
    trajectory: &Path,
    decay_window: Option<(f64, f64)>,
    component: usize,
) -> Result<VerifyReport> {
    let spec = read_spec(spec_path)?;
    reduce(&spec)?;
    let file = fs::File::open(trajectory).map_err(|source| Error::Io {
        path: trajectory.display().to_string(),
        source,
    })?;
    let traj = Trajectory::read_csv(file)?;
    let pohozaev = pohozaev_residual(&traj, &spec)?;
    let decay = match decay_window {
        Some((lo, hi)) => Some(decay_fit(&traj, component, lo, hi)?),
        None => None,
    };
    Ok(VerifyReport { pohozaev, decay })
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexRecord {
    pub alpha: Vec<f64>,
    pub label: Label,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeOutput {
    pub seed: u64,
    pub mass: f64,
    pub depth: u32,
    #[serde(flatten)]
    pub report: DegreeReport,
    pub vertices: Vec<VertexRecord>,
}

/// Labels the full lattice of depth `depth` through the target map and
/// counts completely labeled cells.
pub fn cmd_degree(cfg: &RunConfig, depth: u32, jobs: Option<usize>) -> Result<DegreeOutput> {
    let (_, rs) = cfg.load()?;
    let mass = cfg.mass()?;
    let grid = SimplexGrid::from_target_map(&rs, mass, depth, &cfg.controls, jobs)?;
    let report = compute_degree(&grid)?;
    let out = DegreeOutput {
        seed: cfg.seed,
        mass,
        depth,
        report,
        vertices: grid
            .vertices
            .iter()
            .zip(&grid.labels)
            .map(|(alpha, l)| VertexRecord {
                alpha: alpha.clone(),
                label: l.label,
            })
            .collect(),
    };
    if let Some(dir) = cfg.out_dir()? {
        write_json(dir, "degree.json", &out)?;
    }
    Ok(out)
}

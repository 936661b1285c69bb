//! Weighted polyharmonic systems and their second-order chain form.
//!
//! A [`SystemSpec`] describes `L` coupled equations
//! `(-Δ)^{k_i} u_i = f_i(|x|, u_1, ..., u_L)` on `R^n \ {0}`, where each
//! `f_i` is a finite sum of weighted monomials `c |x|^{-σ} Π u_j^{p_j}`.
//! [`reduce`] flattens it into `Σ k_i` second-order equations by introducing
//! `w_{i,j} = (-Δ)^{j-1} u_i`.

mod config;
mod criticality;
mod nondegeneracy;

pub use config::{parse_spec, read_spec};
pub use criticality::{
    classify_criticality, scalar_bracket, system_bracket, CriticalityClass, CriticalityReport,
    CriticalityRule, RecognizedShape,
};
pub use nondegeneracy::{check_nondegeneracy, ConditionStatus, NondegeneracyReport};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Upper bound (exclusive) on the weight exponent `σ` in `r^{-σ}`.
pub const SIGMA_MAX: f64 = 2.0;

/// One weighted monomial term `coef · r^{-sigma} · Π_j u_j^{powers[j]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coef: f64,
    pub sigma: f64,
    pub powers: Vec<f64>,
}

impl Monomial {
    pub fn new(coef: f64, sigma: f64, powers: Vec<f64>) -> Self {
        Self {
            coef,
            sigma,
            powers,
        }
    }

    /// True when no unknown appears with a positive power.
    pub fn is_pure_weight(&self) -> bool {
        self.powers.iter().all(|&p| p == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub order: u32,
    pub monomials: Vec<Monomial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub n: u32,
    pub equations: Vec<EquationSpec>,
}

impl SystemSpec {
    /// Number of original unknowns `L`.
    pub fn num_unknowns(&self) -> usize {
        self.equations.len()
    }

    /// Length of the reduced chain system, `Σ k_i`.
    pub fn reduced_len(&self) -> usize {
        self.equations.iter().map(|e| e.order as usize).sum()
    }
}

/// A single invariant violation, addressed by a dotted field path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            path: path.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("invalid system:\n{0}")]
    Invalid(ValidationReport),
    #[error("failed to read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse config: {0}")]
    Parse(String),
}

/// Checks every structural invariant of `spec`. Never fails; problems are
/// collected into the returned report.
pub fn validate(spec: &SystemSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = spec.n;
    if n < 3 {
        report.push("n", format!("dimension n >= 3 required (got {n})"));
    }
    if spec.equations.is_empty() {
        report.push("equations", "at least one equation required");
    }
    let num_unknowns = spec.equations.len();
    for (i, eq) in spec.equations.iter().enumerate() {
        let base = format!("equations[{i}]");
        if eq.order < 1 {
            report.push(format!("{base}.order"), "order k >= 1 required");
        } else if 2 * eq.order >= n {
            report.push(
                format!("{base}.order"),
                format!("2k < n fails (k = {}, n = {n})", eq.order),
            );
        }
        if eq.monomials.is_empty() {
            report.push(
                format!("{base}.monomials"),
                "right-hand side must be nonempty",
            );
        }
        for (j, mono) in eq.monomials.iter().enumerate() {
            let path = format!("{base}.monomials[{j}]");
            if !(mono.coef.is_finite() && mono.coef > 0.0) {
                report.push(
                    format!("{path}.coef"),
                    format!("coef > 0 required (got {})", mono.coef),
                );
            }
            if !mono.sigma.is_finite() || mono.sigma >= SIGMA_MAX {
                report.push(
                    format!("{path}.sigma"),
                    format!("sigma < 2 required (got {})", mono.sigma),
                );
            }
            if mono.powers.len() != num_unknowns {
                report.push(
                    format!("{path}.powers"),
                    format!(
                        "expected {num_unknowns} powers (one per unknown), got {}",
                        mono.powers.len()
                    ),
                );
            }
            for (l, &p) in mono.powers.iter().enumerate() {
                if !(p.is_finite() && p >= 0.0) {
                    report.push(
                        format!("{path}.powers[{l}]"),
                        format!("powers must be finite and >= 0 (got {p})"),
                    );
                }
            }
        }
    }
    report
}

/// One factor `w_index^power` of a reduced monomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub index: usize,
    pub power: f64,
}

/// A monomial re-indexed onto chain components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedMonomial {
    pub coef: f64,
    pub sigma: f64,
    /// Only factors with a positive power are kept.
    pub factors: Vec<Factor>,
}

impl ReducedMonomial {
    /// Value of the `u`-dependent part, `coef · Π w_i^{p_i}`, with negative
    /// components read as zero.
    #[inline]
    pub fn amplitude(&self, w: &[f64]) -> f64 {
        self.factors.iter().fold(self.coef, |acc, f| {
            let x = w[f.index].max(0.0);
            acc * if f.power == 1.0 { x } else { x.powf(f.power) }
        })
    }

    /// Full value including the weight `r^{-σ}`.
    #[inline]
    pub fn eval(&self, r: f64, w: &[f64]) -> f64 {
        let a = self.amplitude(w);
        if self.sigma == 0.0 || a == 0.0 {
            a
        } else {
            a * r.powf(-self.sigma)
        }
    }

    pub fn power_of(&self, index: usize) -> f64 {
        self.factors
            .iter()
            .filter(|f| f.index == index)
            .map(|f| f.power)
            .sum()
    }
}

/// Right-hand side of one chain row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Row {
    /// `-Δ w_m = w_target`.
    ChainLink(usize),
    /// `-Δ w_m = Σ monomials` (the original `f_i`).
    Source(Vec<ReducedMonomial>),
}

impl Row {
    /// Evaluates the row at radius `r` for chain state `w`.
    #[inline]
    pub fn eval(&self, r: f64, w: &[f64]) -> f64 {
        match self {
            Row::ChainLink(target) => w[*target],
            Row::Source(monos) => monos.iter().map(|m| m.eval(r, w)).sum(),
        }
    }

    /// Row viewed as a list of monomials; a chain link is `1 · w_target^1`.
    pub fn as_monomials(&self) -> Vec<ReducedMonomial> {
        match self {
            Row::ChainLink(target) => vec![ReducedMonomial {
                coef: 1.0,
                sigma: 0.0,
                factors: vec![Factor {
                    index: *target,
                    power: 1.0,
                }],
            }],
            Row::Source(monos) => monos.clone(),
        }
    }
}

/// Bijection between `(equation i, level j)` pairs and flat chain indices.
///
/// All indices are zero-based: `w_{i,j}` with `j = 0` is `u_i` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexMap {
    offsets: Vec<usize>,
    orders: Vec<usize>,
}

impl IndexMap {
    fn new(orders: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(orders.len());
        let mut acc = 0;
        for &k in &orders {
            offsets.push(acc);
            acc += k;
        }
        Self { offsets, orders }
    }

    pub fn len(&self) -> usize {
        self.orders.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_equations(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self, equation: usize) -> usize {
        self.orders[equation]
    }

    /// Chain index of `w_{equation, level}`.
    pub fn flat(&self, equation: usize, level: usize) -> Option<usize> {
        (equation < self.orders.len() && level < self.orders[equation])
            .then(|| self.offsets[equation] + level)
    }

    /// Inverse of [`IndexMap::flat`].
    pub fn pair(&self, m: usize) -> Option<(usize, usize)> {
        self.offsets
            .iter()
            .zip(&self.orders)
            .enumerate()
            .find(|(_, (&off, &k))| m >= off && m < off + k)
            .map(|(i, (&off, _))| (i, m - off))
    }
}

/// The flattened second-order system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedSystem {
    pub n: u32,
    pub rows: Vec<Row>,
    pub index_map: IndexMap,
}

impl ReducedSystem {
    pub fn total_len(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.n)
    }

    /// Evaluates all right-hand sides into `out`.
    #[inline]
    pub fn eval_into(&self, r: f64, w: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.eval(r, w);
        }
    }

    /// Largest weight exponent among all source monomials (0 for chain links).
    pub fn sigma_max(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|row| row.as_monomials())
            .map(|m| m.sigma)
            .fold(0.0, f64::max)
    }

    /// Builds the chain form without checking invariants. Intended for
    /// degenerate test systems (e.g. zero coefficients); use [`reduce`]
    /// otherwise.
    pub fn from_spec_unchecked(spec: &SystemSpec) -> Self {
        let orders: Vec<usize> = spec.equations.iter().map(|e| e.order as usize).collect();
        let index_map = IndexMap::new(orders);
        let mut rows = Vec::with_capacity(index_map.len());
        for (i, eq) in spec.equations.iter().enumerate() {
            let k = eq.order as usize;
            for j in 0..k {
                if j + 1 < k {
                    let next = index_map.flat(i, j + 1).expect("level in range");
                    rows.push(Row::ChainLink(next));
                } else {
                    let monos = eq
                        .monomials
                        .iter()
                        .map(|m| ReducedMonomial {
                            coef: m.coef,
                            sigma: m.sigma,
                            factors: m
                                .powers
                                .iter()
                                .enumerate()
                                .filter(|(_, &p)| p > 0.0)
                                .map(|(l, &p)| Factor {
                                    index: index_map.flat(l, 0).expect("unknown in range"),
                                    power: p,
                                })
                                .collect(),
                        })
                        .collect();
                    rows.push(Row::Source(monos));
                }
            }
        }
        Self {
            n: spec.n,
            rows,
            index_map,
        }
    }
}

/// Validates `spec` and reduces it to chain form.
pub fn reduce(spec: &SystemSpec) -> Result<ReducedSystem, SpecError> {
    let report = validate(spec);
    if !report.is_ok() {
        return Err(SpecError::Invalid(report));
    }
    Ok(ReducedSystem::from_spec_unchecked(spec))
}

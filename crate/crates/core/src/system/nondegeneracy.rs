//! Symbolic non-degeneracy checks for monomial systems.
//!
//! Both conditions are evaluated on the reduced chain system, where a chain
//! link `-Δ w_m = w_{m+1}` counts as the monomial `1 · w_{m+1}`.
//!
//! Type I:
//! * (i) for every nonzero boundary point `v` with zero set `Z`, the rows in
//!   `Z` must stay bounded below by `λ r^{σ'}` (σ' > -2) near `v`. For
//!   monomials this holds iff some row in `Z` has a monomial whose factors
//!   all lie outside `Z`, with weight `r^{-σ}` and `σ < 2`. Checked near the
//!   origin, which is how the continuity argument uses it.
//! * (ii) `F(r, v) → 0` as `r → ∞` forces `v` onto the boundary. For an
//!   interior `v` a monomial decays iff `σ > 0`, so this holds iff some row
//!   has a monomial with `σ <= 0`.
//!
//! Type II (autonomous systems only):
//! * (i) is read as `F(v) ∈ ∂R^L_+ ⟺ v ∈ ∂R^L_+`: zeroing any single
//!   component must zero at least one row.
//! * (ii) is decided with a sufficient dominance rule per partition
//!   `S = {v_i <= m}`, `B = {v_i > m}`: every monomial of a `B` row must be
//!   dominated by some monomial of an `S` row, i.e. have powers at least as
//!   large on `S` and at most as large on `B`. Failing the rule gives
//!   `Undecided`, never `Fails`.

use super::{reduce, ReducedMonomial, ReducedSystem, SystemSpec, SIGMA_MAX};
use serde::{Deserialize, Serialize};

/// Partition enumeration is exponential; larger systems are left undecided.
const MAX_PARTITION_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionStatus {
    Holds,
    Fails,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub type1: ConditionStatus,
    pub type2: ConditionStatus,
    pub witnesses: Vec<String>,
}

fn subset_label(mask: u64, len: usize) -> String {
    let idx: Vec<String> = (0..len)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("w{}", i + 1))
        .collect();
    format!("{{{}}}", idx.join(", "))
}

fn supported_outside(m: &ReducedMonomial, mask: u64) -> bool {
    m.factors.iter().all(|f| mask & (1 << f.index) == 0)
}

fn type1(rs: &ReducedSystem, witnesses: &mut Vec<String>) -> ConditionStatus {
    let len = rs.total_len();
    let rows: Vec<Vec<ReducedMonomial>> = rs.rows.iter().map(|r| r.as_monomials()).collect();

    let cond_ii = rows.iter().flatten().any(|m| m.sigma <= 0.0);
    if !cond_ii {
        witnesses.push(
            "type I (ii) fails: every term carries a decaying weight r^{-σ} with σ > 0, so \
             F(r, v) -> 0 at infinity for interior v"
                .into(),
        );
    }

    if len > MAX_PARTITION_LEN {
        witnesses.push(format!(
            "type I (i) undecided: {len} components exceed the enumeration limit"
        ));
        return if cond_ii {
            ConditionStatus::Undecided
        } else {
            ConditionStatus::Fails
        };
    }

    let full: u64 = (1 << len) - 1;
    let mut cond_i = true;
    for zero_set in 1..full {
        let bounded_below = (0..len)
            .filter(|&j| zero_set & (1 << j) != 0)
            .flat_map(|j| rows[j].iter())
            .any(|m| supported_outside(m, zero_set) && m.sigma < SIGMA_MAX);
        if !bounded_below {
            witnesses.push(format!(
                "type I (i) fails: with {} = 0 every term of those rows vanishes",
                subset_label(zero_set, len)
            ));
            cond_i = false;
            break;
        }
    }
    if cond_i {
        witnesses.push("type I (i) holds: each zero set keeps a nonvanishing source".into());
    }
    if cond_i && cond_ii {
        witnesses.push("type I (ii) holds: some term has σ <= 0".into());
        ConditionStatus::Holds
    } else {
        ConditionStatus::Fails
    }
}

fn dominates(big: &ReducedMonomial, small: &ReducedMonomial, small_set: u64, len: usize) -> bool {
    (0..len).all(|i| {
        let diff = big.power_of(i) - small.power_of(i);
        if small_set & (1 << i) != 0 {
            diff >= 0.0
        } else {
            diff <= 0.0
        }
    })
}

fn type2(rs: &ReducedSystem, witnesses: &mut Vec<String>) -> ConditionStatus {
    let len = rs.total_len();
    let rows: Vec<Vec<ReducedMonomial>> = rs.rows.iter().map(|r| r.as_monomials()).collect();

    if rows.iter().flatten().any(|m| m.sigma != 0.0) {
        witnesses.push("type II fails: F is not autonomous (nonzero weight exponent)".into());
        return ConditionStatus::Fails;
    }

    for j in 0..len {
        let some_row_vanishes = rows
            .iter()
            .any(|row| row.iter().all(|m| m.power_of(j) > 0.0));
        if !some_row_vanishes {
            witnesses.push(format!(
                "type II (i) fails: w{} = 0 leaves every row positive",
                j + 1
            ));
            return ConditionStatus::Fails;
        }
    }

    if len > MAX_PARTITION_LEN {
        witnesses.push(format!(
            "type II (ii) undecided: {len} components exceed the enumeration limit"
        ));
        return ConditionStatus::Undecided;
    }
    let full: u64 = (1 << len) - 1;
    for small_set in 1..full {
        let ok = (0..len)
            .filter(|&b| small_set & (1 << b) == 0)
            .flat_map(|b| rows[b].iter())
            .all(|big| {
                (0..len)
                    .filter(|&s| small_set & (1 << s) != 0)
                    .flat_map(|s| rows[s].iter())
                    .any(|small| dominates(big, small, small_set, len))
            });
        if !ok {
            witnesses.push(format!(
                "type II (ii) undecided: no dominance for small set {}",
                subset_label(small_set, len)
            ));
            return ConditionStatus::Undecided;
        }
    }
    witnesses.push("type II holds: boundary rows vanish and large rows are dominated".into());
    ConditionStatus::Holds
}

pub fn check_nondegeneracy(spec: &SystemSpec) -> NondegeneracyReport {
    let rs = match reduce(spec) {
        Ok(rs) => rs,
        Err(e) => {
            return NondegeneracyReport {
                type1: ConditionStatus::Undecided,
                type2: ConditionStatus::Undecided,
                witnesses: vec![e.to_string()],
            }
        }
    };
    let mut witnesses = Vec::new();
    let type1 = type1(&rs, &mut witnesses);
    let type2 = type2(&rs, &mut witnesses);
    NondegeneracyReport {
        type1,
        type2,
        witnesses,
    }
}

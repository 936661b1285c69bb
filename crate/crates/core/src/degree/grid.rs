//! Freudenthal (Kuhn) triangulation of the mass simplex.
//!
//! A lattice point at resolution `N` is an integer composition `x` with
//! `Σx = N`; the physical point is `α = a·x/N`. Cells live in the cumulative
//! chart `s_k = x_0 + … + x_{k-1}` (`k = 1..L-1`), where the simplex becomes
//! `0 ≤ s_1 ≤ … ≤ s_{L-1} ≤ N` and every cell is a Kuhn simplex
//! `b, b + e_{π_1}, b + e_{π_1} + e_{π_2}, …` of a unit cube. Doubling `N`
//! splits each cell into `2^{L-1}` cells of the finer lattice.

use std::collections::BTreeSet;

/// One Kuhn simplex at resolution `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub n: u64,
    /// Base corner in the cumulative chart.
    pub base: Vec<u64>,
    /// Axis order of the Kuhn path (0-based axes of the chart).
    pub perm: Vec<usize>,
}

impl Cell {
    /// The single cell covering the simplex at `N = 1`.
    pub fn root(len: usize) -> Self {
        let d = len - 1;
        Self {
            n: 1,
            base: vec![0; d],
            perm: (0..d).rev().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Vertices in the cumulative chart, in Kuhn-path order.
    pub fn chart_vertices(&self) -> Vec<Vec<u64>> {
        let mut v = self.base.clone();
        let mut out = vec![v.clone()];
        for &axis in &self.perm {
            v[axis] += 1;
            out.push(v.clone());
        }
        out
    }

    /// Vertices as compositions of `n`.
    pub fn vertices(&self) -> Vec<Vec<u64>> {
        self.chart_vertices()
            .iter()
            .map(|s| from_chart(s, self.n))
            .collect()
    }

    fn in_region(&self) -> bool {
        self.chart_vertices()
            .iter()
            .all(|s| s.windows(2).all(|w| w[0] <= w[1]) && s.last().is_none_or(|&x| x <= self.n))
    }

    /// The `2^d` cells of resolution `2n` covering this cell.
    pub fn children(&self) -> Vec<Cell> {
        let d = self.dim();
        let scale = 2 * (d as u64 + 1);
        let mut out = Vec::with_capacity(1 << d);
        for offset in 0..(1u32 << d) {
            let base: Vec<u64> = (0..d)
                .map(|i| 2 * self.base[i] + u64::from((offset >> i) & 1))
                .collect();
            for perm in permutations(d) {
                let child = Cell {
                    n: 2 * self.n,
                    base: base.clone(),
                    perm,
                };
                // local coordinates of the child barycenter, scaled by 2(d+1)
                let mut y = vec![0i64; d];
                for v in child.chart_vertices() {
                    for i in 0..d {
                        y[i] += v[i] as i64;
                    }
                }
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi -= scale as i64 * self.base[i] as i64;
                }
                let inside = y.iter().all(|&t| t > 0 && t < scale as i64)
                    && self.perm.windows(2).all(|w| y[w[0]] > y[w[1]]);
                if inside {
                    out.push(child);
                }
            }
        }
        out
    }

    /// All cells at resolution `n` sharing at least one vertex with `self`.
    pub fn vertex_neighbors(&self) -> Vec<Cell> {
        let d = self.dim();
        let mut found = BTreeSet::new();
        for v in self.chart_vertices() {
            for offset in 0..(1u32 << d) {
                let base: Option<Vec<u64>> = (0..d)
                    .map(|i| v[i].checked_sub(u64::from((offset >> i) & 1)))
                    .collect();
                let Some(base) = base else { continue };
                for perm in permutations(d) {
                    let cell = Cell {
                        n: self.n,
                        base: base.clone(),
                        perm,
                    };
                    if cell.in_region() && cell.chart_vertices().contains(&v) {
                        found.insert(cell);
                    }
                }
            }
        }
        found.into_iter().collect()
    }

    /// Componentwise sum of the vertex compositions; the lexicographic order
    /// of this vector orders cells by barycenter.
    pub fn barycenter_key(&self) -> Vec<u64> {
        let verts = self.vertices();
        let mut key = vec![0; verts[0].len()];
        for v in &verts {
            for (k, x) in key.iter_mut().zip(v) {
                *k += x;
            }
        }
        key
    }
}

/// Every cell at resolution `2^depth`.
pub fn all_cells(len: usize, depth: u32) -> Vec<Cell> {
    let mut cells = vec![Cell::root(len)];
    for _ in 0..depth {
        cells = cells.iter().flat_map(Cell::children).collect();
    }
    cells
}

/// Every composition of `n` into `len` parts, in lexicographic order.
pub fn compositions(len: usize, n: u64) -> Vec<Vec<u64>> {
    fn rec(prefix: &mut Vec<u64>, left: u64, parts: usize, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in 0..=left {
            prefix.push(x);
            rec(prefix, left - x, parts - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(len), n, len, &mut out);
    out
}

pub fn to_chart(x: &[u64]) -> Vec<u64> {
    x.iter()
        .take(x.len() - 1)
        .scan(0, |acc, &xi| {
            *acc += xi;
            Some(*acc)
        })
        .collect()
}

pub fn from_chart(s: &[u64], n: u64) -> Vec<u64> {
    let mut x = Vec::with_capacity(s.len() + 1);
    let mut prev = 0;
    for &si in s {
        x.push(si - prev);
        prev = si;
    }
    x.push(n - prev);
    x
}

/// Reduces `(n, x)` to lowest terms in powers of two, so equal points at
/// different resolutions share one key.
pub fn normalize(n: u64, x: &[u64]) -> (u64, Vec<u64>) {
    let mut n = n;
    let mut x = x.to_vec();
    while n > 1 && n.is_multiple_of(2) && x.iter().all(|v| v % 2 == 0) {
        n /= 2;
        x.iter_mut().for_each(|v| *v /= 2);
    }
    (n, x)
}

pub fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(d), &mut vec![false; d], &mut out);
    out
}

/// Sign of the determinant of the `d × d` integer matrix `rows`
/// (fraction-free elimination, exact in `i128`).
pub fn det_sign(rows: &[Vec<i128>]) -> i32 {
    let d = rows.len();
    if d == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..d {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..d).find(|&i| m[i][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..d {
            for j in k + 1..d {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    sign * m[d - 1][d - 1].signum() as i32
}

/// Orientation of a simplex given by chart points in a chosen vertex order.
pub fn orientation(points: &[Vec<u64>]) -> i32 {
    let rows: Vec<Vec<i128>> = points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(&points[0])
                .map(|(a, b)| *a as i128 - *b as i128)
                .collect()
        })
        .collect();
    det_sign(&rows)
}

/// Orientation of the reference simplex whose `j`-th vertex is the centroid
/// of the face `x_j = 0`.
pub fn reference_orientation(len: usize) -> i32 {
    let pts: Vec<Vec<u64>> = (0..len)
        .map(|j| {
            let x: Vec<u64> = (0..len).map(|i| u64::from(i != j)).collect();
            to_chart(&x)
        })
        .collect();
    orientation(&pts)
}

//! Radial volume integrals over balls, evaluated on trajectory grids.

use std::f64::consts::PI;

/// `Γ(m/2)` for a positive integer `m`.
fn gamma_half(m: u32) -> f64 {
    let mut g = if m.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if m.is_multiple_of(2) { 1.0 } else { 0.5 };
    while x < f64::from(m) / 2.0 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area `ω_{n-1} = 2 π^{n/2} / Γ(n/2)` of the unit sphere in `R^n`.
pub fn sphere_area(n: u32) -> f64 {
    2.0 * PI.powf(f64::from(n) / 2.0) / gamma_half(n)
}

/// Composite Simpson rule on a strictly increasing, possibly non-uniform
/// grid. Consecutive interval pairs use the three-point rule; a leftover last
/// interval uses the quadratic through its two left neighbours.
pub fn simpson(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len();
    match m {
        0 | 1 => return 0.0,
        2 => return 0.5 * (x[1] - x[0]) * (y[0] + y[1]),
        _ => {}
    }
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 < m {
        let h0 = x[i + 1] - x[i];
        let h1 = x[i + 2] - x[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0
            * ((2.0 - h1 / h0) * y[i]
                + hs * hs / (h0 * h1) * y[i + 1]
                + (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if i + 1 < m {
        let h0 = x[m - 2] - x[m - 3];
        let h1 = x[m - 1] - x[m - 2];
        total += y[m - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
            + y[m - 2] * (h1 * h1 + 3.0 * h1 * h0) / (6.0 * h0)
            - y[m - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    total
}

/// Indices of the grid points used at a given stride. The first and last
/// points are always kept, and points crowding their right neighbour
/// (spacing below a thousandth of the left one) are dropped.
pub fn select_nodes(t: &[f64], stride: usize) -> Vec<usize> {
    let m = t.len();
    if m == 0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..m).step_by(stride.max(1)).collect();
    if *idx.last().unwrap() != m - 1 {
        idx.push(m - 1);
    }
    let mut kept: Vec<usize> = Vec::with_capacity(idx.len());
    for (pos, &i) in idx.iter().enumerate() {
        let is_last = pos + 1 == idx.len();
        if !is_last && !kept.is_empty() {
            let prev = t[*kept.last().unwrap()];
            let next = t[idx[pos + 1]];
            if next - t[i] < 1e-3 * (t[i] - prev) {
                continue;
            }
        }
        kept.push(i);
    }
    kept
}

/// `∫_{B_R} g dx` for a radial `g` sampled on `grid` (which starts at `h0`
/// and ends at `R`).
///
/// The integral over `[h0, R]` is done in `t = ln r` with integrand
/// `g r^n`. The inner ball `[0, h0]` is added as `g(h0) h0^n / lead`, exact
/// when `g ~ r^{lead - n}` near the origin.
pub fn radial_integral(grid: &[f64], g: &[f64], n: u32, lead: f64, stride: usize) -> f64 {
    if grid.is_empty() {
        return 0.0;
    }
    let nf = f64::from(n);
    let t: Vec<f64> = grid.iter().map(|r| r.ln()).collect();
    let idx = select_nodes(&t, stride);
    let ts: Vec<f64> = idx.iter().map(|&i| t[i]).collect();
    let ys: Vec<f64> = idx.iter().map(|&i| g[i] * grid[i].powf(nf)).collect();
    let inner = g[0] * grid[0].powf(nf) / lead;
    sphere_area(n) * (simpson(&ts, &ys) + inner)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_exact_on_cubics_uniform_and_quadratics_nonuniform() {
        let x: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        assert!((simpson(&x, &y) - 0.25).abs() < 1e-14);

        let x = [0.0, 0.1, 0.35, 0.4, 0.9, 1.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v - v + 2.0).collect();
        assert!((simpson(&x, &y) - 2.5).abs() < 1e-13);
        let x = [0.0, 0.3, 0.5, 1.0];
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert!((simpson(&x, &y) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn unit_ball_volume() {
        let grid: Vec<f64> = (0..=2000)
            .map(|i| 1e-6f64.ln() * (1.0 - i as f64 / 2000.0))
            .map(f64::exp)
            .collect();
        let ones = vec![1.0; grid.len()];
        let v = radial_integral(&grid, &ones, 3, 3.0, 1);
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn crowded_nodes_are_dropped() {
        let t = [0.0, 1.0, 2.0, 2.0000001, 3.0];
        assert_eq!(select_nodes(&t, 1), vec![0, 1, 3, 4]);
        assert_eq!(select_nodes(&t, 2), vec![0, 2, 4]);
        let t = [0.0, 1.0, 2.0, 2.0000001];
        assert_eq!(select_nodes(&t, 1), vec![0, 1, 3]);
    }
}

//! Dormand–Prince 5(4) stepper with FSAL and the standard 4th-order
//! continuous extension.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Scratch space for one system size.
pub(crate) struct Stepper {
    dim: usize,
    pub k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    k5: Vec<f64>,
    k6: Vec<f64>,
    pub k7: Vec<f64>,
    ytmp: Vec<f64>,
    pub y_new: Vec<f64>,
    err: Vec<f64>,
}

impl Stepper {
    pub fn new(dim: usize) -> Self {
        let z = || vec![0.0; dim];
        Self {
            dim,
            k1: z(),
            k2: z(),
            k3: z(),
            k4: z(),
            k5: z(),
            k6: z(),
            k7: z(),
            ytmp: z(),
            y_new: z(),
            err: z(),
        }
    }

    /// Attempts a step of size `h` from `(t, y)`; `k1` must hold `f(t, y)`.
    /// Returns the scaled RMS error norm. On return `y_new` and `k7`
    /// (= `f(t + h, y_new)`) are filled.
    pub fn attempt<F>(
        &mut self,
        rhs: &mut F,
        t: f64,
        y: &[f64],
        h: f64,
        rel_tol: f64,
        abs_tol: f64,
    ) -> f64
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = self.dim;
        for i in 0..n {
            self.ytmp[i] = y[i] + h * A21 * self.k1[i];
        }
        rhs(t + C2 * h, &self.ytmp, &mut self.k2);
        for i in 0..n {
            self.ytmp[i] = y[i] + h * (A31 * self.k1[i] + A32 * self.k2[i]);
        }
        rhs(t + C3 * h, &self.ytmp, &mut self.k3);
        for i in 0..n {
            self.ytmp[i] = y[i] + h * (A41 * self.k1[i] + A42 * self.k2[i] + A43 * self.k3[i]);
        }
        rhs(t + C4 * h, &self.ytmp, &mut self.k4);
        for i in 0..n {
            self.ytmp[i] = y[i]
                + h * (A51 * self.k1[i] + A52 * self.k2[i] + A53 * self.k3[i] + A54 * self.k4[i]);
        }
        rhs(t + C5 * h, &self.ytmp, &mut self.k5);
        for i in 0..n {
            self.ytmp[i] = y[i]
                + h * (A61 * self.k1[i]
                    + A62 * self.k2[i]
                    + A63 * self.k3[i]
                    + A64 * self.k4[i]
                    + A65 * self.k5[i]);
        }
        rhs(t + h, &self.ytmp, &mut self.k6);
        for i in 0..n {
            self.y_new[i] = y[i]
                + h * (A71 * self.k1[i]
                    + A73 * self.k3[i]
                    + A74 * self.k4[i]
                    + A75 * self.k5[i]
                    + A76 * self.k6[i]);
        }
        rhs(t + h, &self.y_new, &mut self.k7);
        let mut acc = 0.0;
        for i in 0..n {
            self.err[i] = h
                * (E1 * self.k1[i]
                    + E3 * self.k3[i]
                    + E4 * self.k4[i]
                    + E5 * self.k5[i]
                    + E6 * self.k6[i]
                    + E7 * self.k7[i]);
            let sc = abs_tol + rel_tol * y[i].abs().max(self.y_new[i].abs());
            let e = self.err[i] / sc;
            acc += e * e;
        }
        (acc / n as f64).sqrt()
    }

    /// Dense-output coefficients for the step just attempted.
    pub fn dense(&self, t: f64, h: f64, y: &[f64]) -> DenseStep {
        let n = self.dim;
        let mut coeffs = vec![0.0; 5 * n];
        for i in 0..n {
            let ydiff = self.y_new[i] - y[i];
            let bspl = h * self.k1[i] - ydiff;
            coeffs[i] = y[i];
            coeffs[n + i] = ydiff;
            coeffs[2 * n + i] = bspl;
            coeffs[3 * n + i] = ydiff - h * self.k7[i] - bspl;
            coeffs[4 * n + i] = h
                * (D1 * self.k1[i]
                    + D3 * self.k3[i]
                    + D4 * self.k4[i]
                    + D5 * self.k5[i]
                    + D6 * self.k6[i]
                    + D7 * self.k7[i]);
        }
        DenseStep {
            t0: t,
            h,
            dim: n,
            coeffs,
        }
    }
}

/// Continuous extension over one accepted step `[t0, t0 + h]`.
#[derive(Debug, Clone)]
pub(crate) struct DenseStep {
    pub t0: f64,
    pub h: f64,
    dim: usize,
    coeffs: Vec<f64>,
}

impl DenseStep {
    pub fn eval_theta(&self, theta: f64, out: &mut [f64]) {
        let n = self.dim;
        let th1 = 1.0 - theta;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let c = |j: usize| self.coeffs[j * n + i];
            *o = c(0) + theta * (c(1) + th1 * (c(2) + theta * (c(3) + th1 * c(4))));
        }
    }

    pub fn eval_component(&self, theta: f64, i: usize) -> f64 {
        let n = self.dim;
        let th1 = 1.0 - theta;
        let c = |j: usize| self.coeffs[j * n + i];
        c(0) + theta * (c(1) + th1 * (c(2) + theta * (c(3) + th1 * c(4))))
    }

    pub fn theta_of(&self, t: f64) -> f64 {
        ((t - self.t0) / self.h).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(h: f64) -> f64 {
        // y' = -2 t y, y(0) = 1 -> exp(-t²)
        let mut f = |t: f64, y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * t * y[0];
        let mut st = Stepper::new(1);
        let mut y = vec![1.0];
        let mut t = 0.0;
        f(t, &y, &mut st.k1);
        while t < 1.0 - 1e-12 {
            st.attempt(&mut f, t, &y, h, 1e-6, 1e-6);
            y.copy_from_slice(&st.y_new);
            st.k1.copy_from_slice(&st.k7.clone());
            t += h;
        }
        (y[0] - (-1.0f64).exp()).abs()
    }

    #[test]
    fn fifth_order_convergence() {
        let e1 = run(0.05);
        let e2 = run(0.025);
        let order = (e1 / e2).log2();
        assert!(order > 4.6, "observed order {order}");
    }

    #[test]
    fn dense_output_interpolates_endpoints_and_midpoint() {
        let mut f = |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0];
        let mut st = Stepper::new(1);
        let y = [1.0];
        f(0.0, &y, &mut st.k1);
        let h = 0.1;
        st.attempt(&mut f, 0.0, &y, h, 1e-8, 1e-8);
        let d = st.dense(0.0, h, &y);
        let mut out = [0.0];
        d.eval_theta(0.0, &mut out);
        assert_eq!(out[0], 1.0);
        d.eval_theta(1.0, &mut out);
        assert!((out[0] - st.y_new[0]).abs() < 1e-15);
        d.eval_theta(0.5, &mut out);
        assert!((out[0] - 0.05f64.exp()).abs() < 1e-8);
    }
}

//! Small numerical kernels shared by the modules: finite differences on
//! (possibly non-uniform) grids, cumulative trapezoid integrals anchored at a
//! node, interpolation and least-squares line fits.

/// Finite-difference weights for the `order`-th derivative at `x0` from the
/// stencil `nodes` (Fornberg's recursion).
pub fn fornberg_weights(x0: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// First and second derivatives, second order everywhere.
///
/// Interior nodes use the three-point formulas written so that reversing the
/// grid orientation reproduces the results bit for bit (up to the sign of the
/// first derivative). Endpoints use one-sided stencils (three nodes for the
/// first derivative, four for the second).
pub fn derivatives(x: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    assert!(n >= 4 && f.len() == n, "need at least four nodes");
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = x[i] - x[i - 1];
        let h2 = x[i + 1] - x[i];
        let hs = h1 + h2;
        let wm = -h2 / (h1 * hs);
        let wp = h1 / (h2 * hs);
        let w0 = (h2 - h1) / (h1 * h2);
        d1[i] = (wm * f[i - 1] + wp * f[i + 1]) + w0 * f[i];
        let vm = 2.0 / (h1 * hs);
        let vp = 2.0 / (h2 * hs);
        let v0 = -2.0 / (h1 * h2);
        d2[i] = (vm * f[i - 1] + vp * f[i + 1]) + v0 * f[i];
    }
    for (end, idx) in [(0usize, [0usize, 1, 2, 3]), (n - 1, [n - 1, n - 2, n - 3, n - 4])] {
        let nodes: Vec<f64> = idx.iter().map(|&k| x[k]).collect();
        let w1 = fornberg_weights(x[end], &nodes[..3], 1);
        let w2 = fornberg_weights(x[end], &nodes, 2);
        d1[end] = w1.iter().zip(&idx).map(|(w, &k)| w * f[k]).sum();
        d2[end] = w2.iter().zip(&idx).map(|(w, &k)| w * f[k]).sum();
    }
    (d1, d2)
}

/// Cumulative trapezoid integral `∫_{x[anchor]}^{x[i]} f` for every node.
pub fn cumulative_trapezoid(x: &[f64], f: &[f64], anchor: usize) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    for i in anchor + 1..n {
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    }
    for i in (0..anchor).rev() {
        out[i] = out[i + 1] - 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
    out
}

/// Index of the node equal to `value`, if any (exact match or within 1e-12
/// relative to the grid extent).
pub fn find_node(x: &[f64], value: f64) -> Option<usize> {
    let scale = x.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    x.iter().position(|&v| (v - value).abs() <= 1e-12 * scale)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
        .collect()
}

/// Locate the interval `[x[k], x[k+1]]` containing `t` (clamped).
fn bracket(x: &[f64], t: f64) -> usize {
    let n = x.len();
    if t <= x[0] {
        return 0;
    }
    if t >= x[n - 1] {
        return n - 2;
    }
    match x.binary_search_by(|v| v.partial_cmp(&t).expect("NaN in grid")) {
        Ok(k) => k.min(n - 2),
        Err(k) => k - 1,
    }
}

pub fn interp_linear(x: &[f64], y: &[f64], t: f64) -> f64 {
    let k = bracket(x, t);
    let w = (t - x[k]) / (x[k + 1] - x[k]);
    y[k] + w * (y[k + 1] - y[k])
}

/// Natural cubic spline through `(x, y)`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 3 && y.len() == n);
        let mut m = vec![0.0; n];
        // Thomas algorithm on the interior second-derivative system.
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = bracket(&self.x, t);
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = (t - self.x[k]) / h;
        a * self.y[k]
            + b * self.y[k + 1]
            + ((a * a * a - a) * self.m[k] + (b * b * b - b) * self.m[k + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let k = bracket(&self.x, t);
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = (t - self.x[k]) / h;
        (self.y[k + 1] - self.y[k]) / h
            + ((1.0 - 3.0 * a * a) * self.m[k] + (3.0 * b * b - 1.0) * self.m[k + 1]) * h / 6.0
    }

    pub fn support(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }
}

/// Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson slopes).
#[derive(Debug, Clone)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            d[0] = Self::end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = Self::end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        }
    }

    fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
        let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
        if d.signum() != del0.signum() {
            0.0
        } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
            3.0 * del0
        } else {
            d
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = bracket(&self.x, t);
        let h = self.x[k + 1] - self.x[k];
        let u = (t - self.x[k]) / h;
        let h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        let h10 = u * (1.0 - u) * (1.0 - u);
        let h01 = u * u * (3.0 - 2.0 * u);
        let h11 = u * u * (u - 1.0);
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }
}

/// Ordinary least-squares line `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub rms_residual: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    let slope_stderr = if n > 2 {
        (ss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
        rms_residual: (ss / nf).sqrt(),
    })
}

/// Least-squares coefficients for `y ≈ Σ_k c_k·rows[i][k]` (normal
/// equations with partial pivoting); `None` if the system is singular.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let m = rows.first()?.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (row, &v) in rows.iter().zip(y) {
        for j in 0..m {
            for k in 0..m {
                a[j][k] += row[j] * row[k];
            }
            a[j][m] += row[j] * v;
        }
    }
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).expect("finite"))?;
        if a[p][c] == 0.0 {
            return None;
        }
        a.swap(c, p);
        for r in c + 1..m {
            let f = a[r][c] / a[c][c];
            for k in c..=m {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for c in (0..m).rev() {
        let tail: f64 = (c + 1..m).map(|k| a[c][k] * x[k]).sum();
        x[c] = (a[c][m] - tail) / a[c][c];
    }
    Some(x)
}

/// One classical Runge–Kutta step for an autonomous-in-form system.
pub fn rk4_step<F>(t: f64, y: &[f64], h: f64, f: F) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let k1 = f(t, y);
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
    let k2 = f(t + 0.5 * h, &y2);
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
    let k3 = f(t + 0.5 * h, &y3);
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
    let k4 = f(t + h, &y4);
    (0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

//! Shape-preserving piecewise-cubic Hermite interpolation on a uniform grid.

/// Monotone cubic (Fritsch–Butland slopes) through equally spaced samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x0: f64,
    step: f64,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    /// `y[i]` is the sample at `x0 + i * step`. Needs at least two samples.
    pub fn new(x0: f64, step: f64, y: Vec<f64>) -> Self {
        assert!(y.len() >= 2, "need at least two samples");
        assert!(step > 0.0, "step must be positive");
        let slope = pchip_slopes(step, &y);
        MonotoneCubic { x0, step, y, slope }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.node(self.y.len() - 1)
    }

    pub fn node(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// Locates `x` as (interval index, exact node index if `x` is a node).
    pub fn locate(&self, x: f64) -> Option<(usize, Option<usize>)> {
        let last = self.y.len() - 1;
        if !(x >= self.x0 && x <= self.x_max()) {
            return None;
        }
        let i = (((x - self.x0) / self.step).floor() as usize).min(last - 1);
        if x == self.node(i) {
            Some((i, Some(i)))
        } else if x == self.node(i + 1) {
            Some((i, Some(i + 1)))
        } else {
            Some((i, None))
        }
    }

    /// Interpolated value, or `None` outside `[x_min, x_max]`.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let (i, node) = self.locate(x)?;
        if let Some(k) = node {
            return Some(self.y[k]);
        }
        let h = self.step;
        let t = ((x - self.node(i)) / h).clamp(0.0, 1.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Some(
            h00 * self.y[i]
                + h10 * h * self.slope[i]
                + h01 * self.y[i + 1]
                + h11 * h * self.slope[i + 1],
        )
    }
}

fn pchip_slopes(h: f64, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        d[k] = if a * b <= 0.0 { 0.0 } else { 2.0 / (1.0 / a + 1.0 / b) };
    }
    d[0] = end_slope(delta[0], delta[1]);
    d[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
    d
}

// One-sided three-point estimate, limited so the end interval stays monotone.
fn end_slope(d0: f64, d1: f64) -> f64 {
    let s = (3.0 * d0 - d1) / 2.0;
    if s.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

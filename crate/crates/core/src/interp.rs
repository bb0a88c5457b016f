//! Monotone piecewise-cubic (Fritsch–Butland) interpolation.
//!
//! Used for re-gridding data lines and for the net-backed field view. The
//! scheme is C¹, reproduces constants and linears exactly, and never
//! overshoots monotone data.

/// A monotone cubic Hermite interpolant over strictly increasing knots.
#[derive(Debug, Clone)]
pub struct Pchip {
    t: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Pchip {
    /// Builds the interpolant. Panics if fewer than two knots or the knot
    /// vector is not strictly increasing.
    pub fn new(t: &[f64], y: &[f64]) -> Self {
        assert!(t.len() >= 2 && t.len() == y.len(), "need matching knots/values");
        for w in t.windows(2) {
            assert!(w[1] > w[0], "knots must be strictly increasing");
        }
        let n = t.len();
        let mut d = vec![0.0; n - 1];
        let mut h = vec![0.0; n - 1];
        for i in 0..n - 1 {
            h[i] = t[i + 1] - t[i];
            d[i] = (y[i + 1] - y[i]) / h[i];
        }
        let mut m = vec![0.0; n];
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                m[i] = 0.0;
            } else {
                // Fritsch-Butland harmonic mean, weighted by interval widths
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        Pchip {
            t: t.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.t.len();
        if x <= self.t[0] {
            return self.y[0] + self.m[0] * (x - self.t[0]);
        }
        if x >= self.t[n - 1] {
            return self.y[n - 1] + self.m[n - 1] * (x - self.t[n - 1]);
        }
        let i = self.t.partition_point(|&tk| tk <= x) - 1;
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.m[i] + h01 * self.y[i + 1] + h11 * h * self.m[i + 1]
    }
}

/// Lagrange cubic through four distinct nodes, used for cross-line
/// interpolation where monotonicity is not required.
pub fn cubic4(t: &[f64; 4], y: &[f64; 4], x: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        let mut li = 1.0;
        for j in 0..4 {
            if i != j {
                li *= (x - t[j]) / (t[i] - t[j]);
            }
        }
        acc += li * y[i];
    }
    acc
}

//! Monotone piecewise-cubic function curves.
//!
//! Curves stand in for graphically edited profiles (leaf size against age,
//! branch vigour, midrib bend). Interpolation follows Fritsch–Carlson so a
//! monotone knot table never overshoots between knots.

use super::LsysError;

impl TryFrom<Vec<(f64, f64)>> for FunctionCurve {
    type Error = LsysError;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self, LsysError> {
        Self::new(&points)
    }
}

impl From<FunctionCurve> for Vec<(f64, f64)> {
    fn from(c: FunctionCurve) -> Self {
        c.points().collect()
    }
}

/// A scalar function of one variable defined by control points.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct FunctionCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl FunctionCurve {
    /// Builds a curve from `(x, y)` knots. `x` must be strictly increasing
    /// and there must be at least two knots.
    pub fn new(points: &[(f64, f64)]) -> Result<Self, LsysError> {
        if points.len() < 2 {
            return Err(LsysError::BadCurve(format!(
                "a curve needs at least 2 control points, got {}",
                points.len()
            )));
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(LsysError::BadCurve(format!(
                    "knot x values must be strictly increasing (knot {} at x={} follows x={})",
                    i + 1,
                    w[1].0,
                    w[0].0
                )));
            }
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(LsysError::BadCurve("knots must be finite".into()));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        let slopes = fritsch_carlson_slopes(&xs, &ys);
        Ok(Self { xs, ys, slopes })
    }

    /// A curve that evaluates to `value` everywhere.
    pub fn constant(value: f64) -> Self {
        Self::new(&[(0.0, value), (1.0, value)]).expect("two distinct knots")
    }

    /// Straight line through `(0, a)` and `(1, b)`, clamped outside.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(&[(0.0, a), (1.0, b)]).expect("two distinct knots")
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Evaluates the curve, clamping to the end values outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x.is_nan() {
            return self.ys[0];
        }
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1];
        }
        let k = match self.xs.binary_search_by(|probe| probe.partial_cmp(&x).unwrap()) {
            Ok(exact) => return self.ys[exact],
            Err(idx) => idx - 1,
        };
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.slopes[k] + h01 * self.ys[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let secants: Vec<f64> = (0..n - 1)
        .map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]))
        .collect();
    let mut m = vec![0.0; n];
    m[0] = secants[0];
    m[n - 1] = secants[n - 2];
    for k in 1..n - 1 {
        let (a, b) = (secants[k - 1], secants[k]);
        m[k] = if a * b <= 0.0 { 0.0 } else { 0.5 * (a + b) };
    }
    for k in 0..n - 1 {
        let d = secants[k];
        if d == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let alpha = m[k] / d;
        let beta = m[k + 1] / d;
        // Slopes pointing against the secant would overshoot.
        if alpha < 0.0 {
            m[k] = 0.0;
        }
        if beta < 0.0 {
            m[k + 1] = 0.0;
        }
        let s = alpha * alpha + beta * beta;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[k] = tau * alpha * d;
            m[k + 1] = tau * beta * d;
        }
    }
    m
}

/// Free-function form of [`FunctionCurve::eval`].
pub fn eval_function_curve(curve: &FunctionCurve, x: f64) -> f64 {
    curve.eval(x)
}

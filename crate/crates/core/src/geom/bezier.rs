use glam::DVec3;

use super::GeomError;

/// Evaluates a Bézier curve of degree 1–3 with de Casteljau's algorithm.
pub fn bezier_eval(ctrl: &[DVec3], t: f64) -> Result<DVec3, GeomError> {
    if !(2..=4).contains(&ctrl.len()) {
        return Err(GeomError::ControlPointCount(ctrl.len()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(GeomError::ParameterOutOfRange(t));
    }
    let mut pts = [DVec3::ZERO; 4];
    pts[..ctrl.len()].copy_from_slice(ctrl);
    for level in (1..ctrl.len()).rev() {
        for i in 0..level {
            pts[i] = pts[i].lerp(pts[i + 1], t);
        }
    }
    Ok(pts[0])
}

/// Derivative of the curve at `t`.
pub fn bezier_tangent(ctrl: &[DVec3], t: f64) -> Result<DVec3, GeomError> {
    if !(2..=4).contains(&ctrl.len()) {
        return Err(GeomError::ControlPointCount(ctrl.len()));
    }
    let deg = (ctrl.len() - 1) as f64;
    let diffs: Vec<DVec3> = ctrl.windows(2).map(|w| (w[1] - w[0]) * deg).collect();
    if diffs.len() == 1 {
        return Ok(diffs[0]);
    }
    bezier_eval(&diffs, t)
}

/// Samples `n >= 2` points uniformly in the curve parameter.
pub fn bezier_samples(ctrl: &[DVec3], n: usize) -> Result<Vec<DVec3>, GeomError> {
    let n = n.max(2);
    (0..n)
        .map(|i| bezier_eval(ctrl, i as f64 / (n - 1) as f64))
        .collect()
}

/// Approximate arc length from a dense polyline.
pub fn bezier_length(ctrl: &[DVec3]) -> Result<f64, GeomError> {
    let pts = bezier_samples(ctrl, 64)?;
    Ok(pts.windows(2).map(|w| w[0].distance(w[1])).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        let c = [DVec3::new(1.0, 2.0, 3.0), DVec3::new(0.0, 5.0, 1.0), DVec3::new(-2.0, 0.0, 4.0)];
        assert_eq!(bezier_eval(&c, 0.0).unwrap(), c[0]);
        assert_eq!(bezier_eval(&c, 1.0).unwrap(), c[2]);
    }

    #[test]
    fn symmetric_quadratic() {
        let c = [DVec3::ZERO, DVec3::new(1.0, 2.0, 0.0), DVec3::new(2.0, 0.0, 0.0)];
        assert_eq!(bezier_eval(&c, 0.5).unwrap(), DVec3::new(1.0, 1.0, 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(bezier_eval(&[DVec3::ZERO], 0.5), Err(GeomError::ControlPointCount(1))));
        assert!(matches!(
            bezier_eval(&[DVec3::ZERO; 5], 0.5),
            Err(GeomError::ControlPointCount(5))
        ));
        assert!(matches!(
            bezier_eval(&[DVec3::ZERO, DVec3::X], 1.5),
            Err(GeomError::ParameterOutOfRange(_))
        ));
    }
}

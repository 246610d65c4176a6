use crate::error::{Error, Result};

/// Euclidean projection of `v` onto `radius·Δ_m = { x ≥ 0, Σx = radius }`.
///
/// Sort-and-threshold: find the largest `ρ` with
/// `u_ρ − (Σ_{k≤ρ} u_k − radius)/ρ > 0` over the descending sort `u`, then
/// shift by that threshold and clip at zero.
pub fn project_scaled_simplex(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::instance(format!(
            "simplex radius {radius} must be nonnegative"
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::instance(
            "cannot project a vector with non-finite entries",
        ));
    }
    let mut out = vec![0.0; v.len()];
    let mut scratch = Vec::with_capacity(v.len());
    project_into(v, radius, &mut scratch, &mut out);
    Ok(out)
}

/// Allocation-free projection used by the baselines. `scratch` is resized as needed.
pub(crate) fn project_into(v: &[f64], radius: f64, scratch: &mut Vec<f64>, out: &mut [f64]) {
    debug_assert_eq!(v.len(), out.len());
    if v.is_empty() {
        return;
    }
    if radius == 0.0 {
        out.fill(0.0);
        return;
    }
    scratch.clear();
    scratch.extend_from_slice(v);
    scratch.sort_unstable_by(|a, b| b.total_cmp(a));

    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in scratch.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - radius) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    for (o, &x) in out.iter_mut().zip(v) {
        *o = (x - theta).max(0.0);
    }
    // absorb the rounding residue of the shift into the largest coordinate
    let sum: f64 = out.iter().sum();
    let residue = radius - sum;
    if residue != 0.0 {
        let top = out
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(j, _)| j)
            .unwrap_or(0);
        out[top] = (out[top] + residue).max(0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifts_both_coordinates() {
        let x = project_scaled_simplex(&[0.8, 0.4], 1.0).unwrap();
        assert!(
            (x[0] - 0.7).abs() < 1e-15 && (x[1] - 0.3).abs() < 1e-15,
            "{x:?}"
        );
    }

    #[test]
    fn identity_on_the_simplex() {
        let v = [0.1, 0.6, 0.3];
        let x = project_scaled_simplex(&v, 1.0).unwrap();
        for (a, b) in x.iter().zip(&v) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_radius_is_zero_vector() {
        assert_eq!(
            project_scaled_simplex(&[3.0, -1.0], 0.0).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn clips_negative_tail() {
        let x = project_scaled_simplex(&[2.0, 0.0, -5.0], 0.5).unwrap();
        assert_eq!(x, vec![0.5, 0.0, 0.0]);
    }

    #[test]
    fn negative_radius_rejected() {
        assert!(project_scaled_simplex(&[1.0], -0.1).is_err());
    }
}

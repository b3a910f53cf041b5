//! wasm-bindgen surface for the browser demo. Every export returns a flat
//! `Float64Array`; the plain `*_samples` functions behind them are what the
//! native tests exercise.

use g2flow::flow::{integrate, IntegrationConfig};
use g2flow::reduced::{integrate_reduced, reduced_field_xy, ReducedState, XyState};
use g2flow::{Definiteness, FlowState, Mat3, StructureConstants};
use wasm_bindgen::prelude::*;

/// Values per sample in [`reduced_samples`]: `t, a, b, x, y`.
pub const REDUCED_STRIDE: usize = 5;
/// Values per arrow in [`phase_field_samples`]: `x, y, dx, dy`.
pub const FIELD_STRIDE: usize = 4;
/// Values per sample in [`flow_samples`]:
/// `t, h, constr_norm, detE, detS, definiteness code`.
pub const FLOW_STRIDE: usize = 6;

/// Sample cap so one call cannot freeze the page.
const MAX_STEPS: f64 = 200_000.0;

pub fn definiteness_code(d: Definiteness) -> f64 {
    match d {
        Definiteness::PositiveDefinite => 1.0,
        Definiteness::NegativeDefinite => -1.0,
        Definiteness::Indefinite => 0.0,
        Definiteness::Singular => 0.5,
    }
}

fn check_steps(dt: f64, t_end: f64) -> Result<(), String> {
    if !(dt > 0.0 && t_end > 0.0 && dt.is_finite() && t_end.is_finite()) {
        return Err(format!("dt and t_end must be positive (dt = {dt}, t_end = {t_end})"));
    }
    if t_end / dt > MAX_STEPS {
        return Err(format!("t_end / dt exceeds {MAX_STEPS} steps"));
    }
    Ok(())
}

pub fn reduced_samples(sigma: f64, a0: f64, b0: f64, t_end: f64, dt: f64) -> Result<Vec<f64>, String> {
    check_steps(dt, t_end)?;
    let traj = integrate_reduced(&ReducedState { a: a0, b: b0, sigma }, dt, t_end).map_err(|e| e.to_string())?;
    Ok(traj.samples.iter().flat_map(|s| [s.t, s.a, s.b, s.x(), s.y()]).collect())
}

/// `n × n` grid of the `(x, y)` field over `[x_min, x_max] × [y_min, y_max]`, `x_min > 0`.
pub fn phase_field_samples(
    sigma: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    if !(x_min > 0.0 && x_max > x_min && y_max > y_min) || n < 2 || n > 200 {
        return Err("need 0 < x_min < x_max, y_min < y_max and 2 <= n <= 200".to_string());
    }
    let lerp = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n * FIELD_STRIDE);
    for i in 0..n {
        for j in 0..n {
            let s = XyState { x: lerp(x_min, x_max, i), y: lerp(y_min, y_max, j) };
            let (dx, dy) = reduced_field_xy(&s, sigma).map_err(|e| e.to_string())?;
            out.extend([s.x, s.y, dx, dy]);
        }
    }
    Ok(out)
}

/// Full flow on a preset group from `E0 = diag(e)`, `S0 = diag(s)`, with a
/// monitor row per sample. Integration stops silently at the usual floors.
pub fn flow_samples(group: &str, e: &[f64], s: &[f64], t_end: f64, dt: f64) -> Result<Vec<f64>, String> {
    check_steps(dt, t_end)?;
    let diag = |v: &[f64], what: &str| -> Result<Mat3, String> {
        match v {
            [a, b, c] => Ok(Mat3::diag([*a, *b, *c])),
            _ => Err(format!("{what} needs exactly 3 diagonal entries")),
        }
    };
    let c = StructureConstants::from_name(group).map_err(|e| e.to_string())?;
    let initial = FlowState::new(diag(e, "E0")?, diag(s, "S0")?).map_err(|e| e.to_string())?;
    let traj = integrate(&initial, &c, &IntegrationConfig::new(dt, t_end)).map_err(|e| e.to_string())?;
    Ok(traj
        .samples
        .iter()
        .zip(&traj.monitors)
        .flat_map(|(st, m)| {
            [st.t, m.densities.h, m.constraint_norm(), m.det_e, m.det_s, definiteness_code(m.definiteness)]
        })
        .collect())
}

#[wasm_bindgen]
pub fn reduced_trajectory(sigma: f64, a0: f64, b0: f64, t_end: f64, dt: f64) -> Result<Vec<f64>, JsError> {
    reduced_samples(sigma, a0, b0, t_end, dt).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn phase_field(sigma: f64, x_min: f64, x_max: f64, y_min: f64, y_max: f64, n: usize) -> Result<Vec<f64>, JsError> {
    phase_field_samples(sigma, x_min, x_max, y_min, y_max, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn flow_monitors(group: &str, e: &[f64], s: &[f64], t_end: f64, dt: f64) -> Result<Vec<f64>, JsError> {
    flow_samples(group, e, s, t_end, dt).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_layout_and_y_constancy() {
        let v = reduced_samples(0.0, 1.0, 1.0, 1.0, 1e-3).unwrap();
        assert_eq!(v.len(), 1001 * REDUCED_STRIDE);
        assert!(v.chunks(REDUCED_STRIDE).all(|r| (r[4] - 1.0).abs() < 1e-10 && (r[3] - r[1] * r[1]).abs() < 1e-15));
        let last = &v[v.len() - REDUCED_STRIDE..];
        assert!((last[1] - 3f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn phase_field_matches_the_system() {
        let v = phase_field_samples(1.0, 1.0, 4.0, -1.0, 1.0, 4).unwrap();
        assert_eq!(v.len(), 16 * FIELD_STRIDE);
        for r in v.chunks(FIELD_STRIDE) {
            assert!((r[2] - 2.0 * r[1] * r[1]).abs() < 1e-15);
            assert!((r[3] - 1.0 / r[0].sqrt()).abs() < 1e-15);
        }
        assert!(phase_field_samples(1.0, 0.0, 4.0, -1.0, 1.0, 4).is_err());
        assert!(phase_field_samples(1.0, 1.0, 4.0, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn flow_monitors_on_su2() {
        let v = flow_samples("su2", &[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0], 0.5, 1e-3).unwrap();
        assert_eq!(v.len(), 501 * FLOW_STRIDE);
        for r in v.chunks(FLOW_STRIDE) {
            assert!((r[1] - 0.25).abs() < 1e-10);
            assert!(r[2] < 1e-12);
            assert_eq!(r[5], 1.0);
        }
        assert!(flow_samples("su2", &[1.0, 1.0], &[1.0, 1.0, 1.0], 0.5, 1e-2).is_err());
        assert!(flow_samples("so7", &[1.0; 3], &[1.0; 3], 0.5, 1e-2).is_err());
        assert!(flow_samples("su2", &[1.0; 3], &[1.0; 3], 1e9, 1e-3).is_err());
    }

    #[test]
    fn codes_are_distinct() {
        let codes = [
            Definiteness::PositiveDefinite,
            Definiteness::NegativeDefinite,
            Definiteness::Indefinite,
            Definiteness::Singular,
        ]
        .map(definiteness_code);
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(codes[i], codes[j]);
            }
        }
    }
}

//! Isotropic reduction `E = a·E₀`, `S = b·I` over a frame `E₀` with
//! `G = −σ·I`, where the flow collapses to
//! `ȧ = a b²`, `ḃ = σ a⁻² − b³`, or with `x = a²`, `y = a b`:
//! `ẋ = 2y²`, `ẏ = σ x^{−1/2}`.

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::frame::{riemannian_curvature, Frame};
use crate::liealg::{Preset, StructureConstants};
use crate::mat3::{Definiteness, Mat3};

/// Tolerance on `G + σI` for a frame to count as constant curvature.
pub const CONSTANT_CURVATURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XyState {
    pub x: f64,
    pub y: f64,
}

impl ReducedState {
    pub fn xy(&self) -> XyState {
        XyState { x: self.a * self.a, y: self.a * self.b }
    }

    /// Sign class of `S = b·I`.
    pub fn regime(&self) -> Definiteness {
        if self.b > 0.0 {
            Definiteness::PositiveDefinite
        } else if self.b < 0.0 {
            Definiteness::NegativeDefinite
        } else {
            Definiteness::Singular
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

pub fn reduced_field_ab(s: &ReducedState) -> Result<(f64, f64)> {
    check_positive("a", s.a)?;
    Ok((s.a * s.b * s.b, s.sigma / (s.a * s.a) - s.b.powi(3)))
}

pub fn reduced_field_xy(s: &XyState, sigma: f64) -> Result<(f64, f64)> {
    check_positive("x", s.x)?;
    Ok((2.0 * s.y * s.y, sigma / s.x.sqrt()))
}

/// `σ` with `G(E₀) = −σ·I`, or an error if `E₀` is not of constant curvature.
pub fn curvature_parameter(e0: &Frame, c: &StructureConstants) -> Result<f64> {
    let (_, curv) = riemannian_curvature(e0, c)?;
    let g = *curv.einstein();
    let sigma = -g.trace() / 3.0;
    let deviation = (g + Mat3::scalar(sigma)).max_abs();
    if deviation > CONSTANT_CURVATURE_TOL {
        return Err(Error::NotConstantCurvature(deviation));
    }
    Ok(sigma)
}

/// A group and frame `E₀ = λ·I` with `G(E₀) = −σ·I`: su2 for `σ > 0`,
/// abelian for `σ = 0`, Bianchi V for `σ < 0`.
pub fn constant_curvature_model(sigma: f64) -> Result<(StructureConstants, Frame)> {
    if !sigma.is_finite() {
        return Err(Error::NonFinite(sigma));
    }
    let (c, scale) = if sigma > 0.0 {
        (StructureConstants::preset(Preset::Su2), 0.5 / sigma.sqrt())
    } else if sigma < 0.0 {
        (StructureConstants::bianchi_v(0.5), 0.5 / (-sigma).sqrt())
    } else {
        (StructureConstants::preset(Preset::Abelian), 1.0)
    };
    Ok((c, Frame::new(Mat3::scalar(scale))?))
}

/// `(a, b) ↦ (a·E₀, b·I)`, after checking that `E₀` carries curvature `s.sigma`.
pub fn embed(s: &ReducedState, e0: &Frame, c: &StructureConstants) -> Result<FlowState> {
    check_positive("a", s.a)?;
    let sigma = curvature_parameter(e0, c)?;
    if (sigma - s.sigma).abs() > CONSTANT_CURVATURE_TOL {
        return Err(Error::CurvatureMismatch { frame: sigma, state: s.sigma });
    }
    FlowState::new(*e0.matrix() * s.a, Mat3::scalar(s.b))
}

/// Exact `σ = 0` solution `a = a₀√(1+2b₀²t)`, `b = b₀/√(1+2b₀²t)`.
pub fn closed_form_sigma0(a0: f64, b0: f64, t: f64) -> Result<(f64, f64)> {
    check_positive("a0", a0)?;
    let w = 1.0 + 2.0 * b0 * b0 * t;
    if !(w > 0.0) {
        return Err(Error::Domain(format!("1 + 2 b0^2 t must be positive, got {w}")));
    }
    let r = w.sqrt();
    Ok((a0 * r, b0 / r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedSample {
    pub t: f64,
    pub a: f64,
    pub b: f64,
}

impl ReducedSample {
    pub fn x(&self) -> f64 {
        self.a * self.a
    }

    pub fn y(&self) -> f64 {
        self.a * self.b
    }
}

#[derive(Clone, Debug, Default)]
pub struct ReducedTrajectory {
    pub sigma: f64,
    pub samples: Vec<ReducedSample>,
    /// Time at which `a` left the admissible range, if it did.
    pub breakdown: Option<f64>,
}

/// Classical RK4 on the `(a, b)` system with fixed step.
pub fn integrate_reduced(init: &ReducedState, dt: f64, t_end: f64) -> Result<ReducedTrajectory> {
    check_positive("a0", init.a)?;
    check_positive("dt", dt)?;
    check_positive("t_end", t_end)?;
    let sigma = init.sigma;
    let field = |a: f64, b: f64| reduced_field_ab(&ReducedState { a, b, sigma });
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let mut traj =
        ReducedTrajectory { sigma, samples: vec![ReducedSample { t: 0.0, a: init.a, b: init.b }], breakdown: None };
    let (mut a, mut b, mut t) = (init.a, init.b, 0.0);
    for k in 1..=steps {
        let t_next = if k == steps { t_end } else { k as f64 * dt };
        let h = t_next - t;
        let step = (|| -> Result<(f64, f64)> {
            let k1 = field(a, b)?;
            let k2 = field(a + 0.5 * h * k1.0, b + 0.5 * h * k1.1)?;
            let k3 = field(a + 0.5 * h * k2.0, b + 0.5 * h * k2.1)?;
            let k4 = field(a + h * k3.0, b + h * k3.1)?;
            Ok((
                a + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
                b + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            ))
        })();
        match step {
            Ok((na, nb)) if na > 0.0 && na.is_finite() && nb.is_finite() => {
                (a, b, t) = (na, nb, t_next);
                traj.samples.push(ReducedSample { t, a, b });
            }
            _ => {
                traj.breakdown = Some(t_next);
                break;
            }
        }
    }
    Ok(traj)
}

//! The Hamiltonian flow on frame/momentum pairs `(E, S)`.
//!
//! For `H = −a·H₁ + b·H₂` (default `a = ½`, `b = 1`) the flow is
//! `Ė = b·S̃·E` and `Ṡ = −2a·G + 2b·det S·I − b·tr(S̃)·S`, where `G` is the
//! Einstein matrix of the Levi-Civita connection of `E`. Tangent vectors are
//! also written as `(T, V)` with `Ė = T·E` and `V = Ṡ + tr(T)·S` the rate of
//! the density `S·vol(e)`.

use crate::error::{Error, Result};
use crate::frame::{divergence_constraint, riemannian_curvature, Connection, CurvatureData, Frame};
use crate::liealg::StructureConstants;
use crate::mat3::{Definiteness, Mat3};

/// Relative eigenvalue threshold below which `S` counts as singular.
pub const DEFINITENESS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowState {
    pub e: Mat3,
    pub s: Mat3,
    pub t: f64,
}

impl FlowState {
    /// Checks `det E > 0` and symmetry of `S`.
    pub fn new(e: Mat3, s: Mat3) -> Result<Self> {
        Frame::new(e)?;
        let asym = s.asymmetry();
        if asym > 1e-12 * (1.0 + s.max_abs()) {
            return Err(Error::NotSymmetric { what: "momentum matrix S", asymmetry: asym });
        }
        if !s.is_finite() {
            return Err(Error::NonFinite(0.0));
        }
        Ok(FlowState { e, s, t: 0.0 })
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn frame(&self) -> Result<Frame> {
        Frame::new(self.e)
    }

    pub fn det_e(&self) -> f64 {
        self.e.det()
    }

    pub fn det_s(&self) -> f64 {
        self.s.det()
    }

    pub fn definiteness(&self) -> Definiteness {
        self.s.definiteness(DEFINITENESS_TOL)
    }

    pub fn max_norm(&self) -> f64 {
        self.e.max_abs().max(self.s.max_abs())
    }
}

/// Coefficients of `H = −a·H₁ + b·H₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianCoeffs {
    pub a: f64,
    pub b: f64,
}

impl Default for HamiltonianCoeffs {
    fn default() -> Self {
        HamiltonianCoeffs { a: 0.5, b: 1.0 }
    }
}

impl HamiltonianCoeffs {
    pub fn new(a: f64, b: f64) -> Self {
        HamiltonianCoeffs { a, b }
    }
}

/// Geometry of `E` needed by the flow.
#[derive(Clone, Copy, Debug)]
pub struct Geometry {
    pub frame: Frame,
    pub connection: Connection,
    pub curvature: CurvatureData,
}

pub fn geometry(st: &FlowState, c: &StructureConstants) -> Result<Geometry> {
    let frame = st.frame()?;
    let (connection, curvature) = riemannian_curvature(&frame, c)?;
    Ok(Geometry { frame, connection, curvature })
}

/// Densities against the fixed Maurer–Cartan volume.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Densities {
    /// `R·det E`
    pub h1: f64,
    /// `det S·det E`
    pub h2: f64,
    /// `det E`
    pub h3: f64,
    /// `−½h₁ + h₂`
    pub h: f64,
}

impl Densities {
    pub fn combined(&self, coeffs: HamiltonianCoeffs) -> f64 {
        -coeffs.a * self.h1 + coeffs.b * self.h2
    }
}

pub fn hamiltonian_densities(st: &FlowState, c: &StructureConstants) -> Result<Densities> {
    let geo = geometry(st, c)?;
    Ok(densities_from(st, &geo))
}

fn densities_from(st: &FlowState, geo: &Geometry) -> Densities {
    let det_e = st.det_e();
    let h1 = geo.curvature.scalar_curvature() * det_e;
    let h2 = st.det_s() * det_e;
    Densities { h1, h2, h3: det_e, h: -0.5 * h1 + h2 }
}

/// Tangent vector `(T, V)`: `Ė = T·E`, `V = Ṡ + tr(T)·S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tangent {
    pub t: Mat3,
    pub v: Mat3,
}

impl Tangent {
    pub fn velocity(&self, st: &FlowState) -> Velocity {
        Velocity { de: self.t * st.e, ds: self.v - st.s * self.t.trace() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Velocity {
    pub de: Mat3,
    pub ds: Mat3,
}

/// Hamiltonian vector field of `−a·H₁ + b·H₂` in `(T, V)` form:
/// `T = b·S̃`, `V = −2a·G + 2b·det S·I`.
pub fn hamiltonian_vector(st: &FlowState, c: &StructureConstants, coeffs: HamiltonianCoeffs) -> Result<Tangent> {
    let geo = geometry(st, c)?;
    Ok(hamiltonian_vector_from(st, &geo, coeffs))
}

fn hamiltonian_vector_from(st: &FlowState, geo: &Geometry, coeffs: HamiltonianCoeffs) -> Tangent {
    let t = st.s.adjugate() * coeffs.b;
    let v = *geo.curvature.einstein() * (-2.0 * coeffs.a) + Mat3::scalar(2.0 * coeffs.b * st.det_s());
    Tangent { t, v }
}

pub fn flow_field(st: &FlowState, c: &StructureConstants, coeffs: HamiltonianCoeffs) -> Result<Velocity> {
    let geo = geometry(st, c)?;
    Ok(flow_field_from(st, &geo, coeffs))
}

fn flow_field_from(st: &FlowState, geo: &Geometry, coeffs: HamiltonianCoeffs) -> Velocity {
    let tangent = hamiltonian_vector_from(st, geo, coeffs);
    debug_assert!(tangent.t.asymmetry() <= 1e-12 * (1.0 + tangent.t.max_abs()));
    let mut vel = tangent.velocity(st);
    // G and S̃ are symmetric; drop round-off so S stays in Sym(3)
    vel.ds = vel.ds.symmetrized();
    vel
}

/// Density of `Ω′(Z₁, Z₂) = tr(T₁V₂ − T₂V₁)·det E`.
pub fn omega_pairing(z1: &Tangent, z2: &Tangent, det_e: f64) -> f64 {
    ((z1.t * z2.v).trace() - (z2.t * z1.v).trace()) * det_e
}

/// Rates of `H₁`, `H₂`, `H₃` densities along the `H` flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationRates {
    pub dh1: f64,
    pub dh2: f64,
    pub dh3: f64,
}

/// `dH₁ = −2 tr(G S̃)·det E`, `dH₂ = ½ dH₁`, `dH₃ = tr(S̃)·det E`.
pub fn variation_rates(st: &FlowState, c: &StructureConstants) -> Result<VariationRates> {
    let geo = geometry(st, c)?;
    let adj = st.s.adjugate();
    let det_e = st.det_e();
    let dh1 = -2.0 * (*geo.curvature.einstein() * adj).trace() * det_e;
    Ok(VariationRates { dh1, dh2: 0.5 * dh1, dh3: adj.trace() * det_e })
}

/// `∂_t v = −tr(S̃)·v − S̃·v` for the divergence vector `v`.
pub fn constraint_ode_rhs(v: [f64; 3], stilde: &Mat3) -> [f64; 3] {
    let tr = stilde.trace();
    let sv = stilde.mul_vec(v);
    [-tr * v[0] - sv[0], -tr * v[1] - sv[1], -tr * v[2] - sv[2]]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopConditions {
    pub min_det_e: f64,
    pub max_norm: f64,
}

impl Default for StopConditions {
    fn default() -> Self {
        StopConditions { min_det_e: 1e-9, max_norm: 1e9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_end: f64,
    pub coeffs: HamiltonianCoeffs,
    pub stop: StopConditions,
}

impl IntegrationConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        IntegrationConfig { dt, t_end, coeffs: HamiltonianCoeffs::default(), stop: StopConditions::default() }
    }

    pub fn with_coeffs(mut self, coeffs: HamiltonianCoeffs) -> Self {
        self.coeffs = coeffs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Domain(format!("t_end must be positive, got {}", self.t_end)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopReason {
    FrameCollapse { t: f64, det_e: f64 },
    NormExceeded { t: f64, norm: f64 },
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StopReason::FrameCollapse { t, det_e } => write!(f, "det E = {det_e:e} fell below the floor at t = {t}"),
            StopReason::NormExceeded { t, norm } => write!(f, "state norm {norm:e} exceeded the ceiling at t = {t}"),
        }
    }
}

/// Per-sample diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monitor {
    pub densities: Densities,
    pub constraint: [f64; 3],
    pub det_e: f64,
    pub det_s: f64,
    pub definiteness: Definiteness,
}

impl Monitor {
    pub fn constraint_norm(&self) -> f64 {
        self.constraint.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

pub fn monitor(st: &FlowState, c: &StructureConstants) -> Result<Monitor> {
    let geo = geometry(st, c)?;
    Ok(monitor_from(st, &geo))
}

fn monitor_from(st: &FlowState, geo: &Geometry) -> Monitor {
    Monitor {
        densities: densities_from(st, geo),
        constraint: divergence_constraint(&st.s, &geo.frame, &geo.connection),
        det_e: st.det_e(),
        det_s: st.det_s(),
        definiteness: st.definiteness(),
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub samples: Vec<FlowState>,
    pub monitors: Vec<Monitor>,
    pub stop: Option<StopReason>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&FlowState> {
        self.samples.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn combine(st: &FlowState, k: &Velocity, h: f64) -> FlowState {
    FlowState { e: st.e + k.de * h, s: st.s + k.ds * h, t: st.t + h }
}

/// One classical RK4 step of size `h`.
pub fn rk4_step(st: &FlowState, c: &StructureConstants, coeffs: HamiltonianCoeffs, h: f64) -> Result<FlowState> {
    let k1 = flow_field(st, c, coeffs)?;
    let k2 = flow_field(&combine(st, &k1, 0.5 * h), c, coeffs)?;
    let k3 = flow_field(&combine(st, &k2, 0.5 * h), c, coeffs)?;
    let k4 = flow_field(&combine(st, &k3, h), c, coeffs)?;
    let de = (k1.de + (k2.de + k3.de) * 2.0 + k4.de) * (h / 6.0);
    let ds = (k1.ds + (k2.ds + k3.ds) * 2.0 + k4.ds) * (h / 6.0);
    Ok(FlowState { e: st.e + de, s: st.s + ds, t: st.t + h })
}

/// Fixed-step RK4 from `initial.t` to `initial.t + t_end`, recording a monitor
/// at every sample. Stops early, with a recorded reason, when `det E` or the
/// state norm leave the configured window.
pub fn integrate(initial: &FlowState, c: &StructureConstants, cfg: &IntegrationConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let steps = (cfg.t_end / cfg.dt - 1e-9).ceil().max(1.0) as usize;
    let t0 = initial.t;
    let mut traj = Trajectory::default();
    let mut st = *initial;
    traj.samples.push(st);
    traj.monitors.push(monitor(&st, c)?);
    for k in 1..=steps {
        let t_next = if k == steps { t0 + cfg.t_end } else { t0 + k as f64 * cfg.dt };
        let mut next = rk4_step(&st, c, cfg.coeffs, t_next - st.t)?;
        next.t = t_next;
        if !(next.e.is_finite() && next.s.is_finite()) {
            return Err(Error::NonFinite(t_next));
        }
        let det_e = next.det_e();
        if det_e < cfg.stop.min_det_e {
            traj.stop = Some(StopReason::FrameCollapse { t: t_next, det_e });
            break;
        }
        let norm = next.max_norm();
        if norm > cfg.stop.max_norm {
            traj.stop = Some(StopReason::NormExceeded { t: t_next, norm });
            break;
        }
        st = next;
        traj.samples.push(st);
        traj.monitors.push(monitor(&st, c)?);
    }
    Ok(traj)
}

/// Scale factors `(α, β)` taking `H` orbits to `(−aH₁ + bH₂)` orbits under
/// `t = κ t′`: `κβ⁻² = b` and `κα²β = 2a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleParams {
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn scale_params(kappa: f64, coeffs: HamiltonianCoeffs) -> Result<ScaleParams> {
    if !(kappa > 0.0 && coeffs.a > 0.0 && coeffs.b > 0.0) {
        return Err(Error::Domain(format!("scaling needs kappa, a, b > 0 (got {kappa}, {}, {})", coeffs.a, coeffs.b)));
    }
    let beta = (kappa / coeffs.b).sqrt();
    let alpha = (2.0 * coeffs.a).sqrt() * coeffs.b.powf(0.25) * kappa.powf(-0.75);
    Ok(ScaleParams { kappa, alpha, beta })
}

/// `e′(t′) = α·e(κt′)`, `S′(t′) = β·S(κt′)`.
pub fn scale_map(
    samples: &[FlowState],
    kappa: f64,
    coeffs: HamiltonianCoeffs,
) -> Result<(ScaleParams, Vec<FlowState>)> {
    let p = scale_params(kappa, coeffs)?;
    let out = samples.iter().map(|st| FlowState { e: st.e * p.alpha, s: st.s * p.beta, t: st.t / kappa }).collect();
    Ok((p, out))
}

/// Largest gap between the five-point time derivative of uniformly spaced
/// samples and the `(a, b)` flow field, over interior samples.
pub fn flow_field_residual(samples: &[FlowState], c: &StructureConstants, coeffs: HamiltonianCoeffs) -> Result<f64> {
    if samples.len() < 5 {
        return Err(Error::Domain("residual needs at least five samples".into()));
    }
    let h = samples[1].t - samples[0].t;
    let uniform = samples.windows(2).all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-9 * h.abs().max(1.0));
    if !uniform || h <= 0.0 {
        return Err(Error::Domain("residual needs uniformly spaced samples".into()));
    }
    let mut worst = 0.0_f64;
    for i in 2..samples.len() - 2 {
        let d = |f: fn(&FlowState) -> Mat3| {
            (f(&samples[i - 2]) - f(&samples[i - 1]) * 8.0 + f(&samples[i + 1]) * 8.0 - f(&samples[i + 2]))
                * (1.0 / (12.0 * h))
        };
        let de = d(|s| s.e);
        let ds = d(|s| s.s);
        let field = flow_field(&samples[i], c, coeffs)?;
        worst = worst.max((de - field.de).max_abs()).max((ds - field.ds).max_abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::Preset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn preset(p: Preset) -> StructureConstants {
        StructureConstants::preset(p)
    }

    fn state(e: Mat3, s: Mat3) -> FlowState {
        FlowState::new(e, s).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng) -> FlowState {
        let e = Mat3::IDENTITY + Mat3::from_fn(|_, _| rng.random_range(-0.3..0.3));
        let s = Mat3::IDENTITY + Mat3::from_fn(|_, _| rng.random_range(-0.3..0.3)).symmetrized();
        state(e, s)
    }

    #[test]
    fn density_examples() {
        let d = hamiltonian_densities(&state(Mat3::IDENTITY, Mat3::IDENTITY), &preset(Preset::Abelian)).unwrap();
        assert_eq!((d.h1, d.h2, d.h3, d.h), (0.0, 1.0, 1.0, 1.0));

        let su2 = preset(Preset::Su2);
        let (a, b) = (1.7, 0.6);
        let d = hamiltonian_densities(&state(Mat3::scalar(a), Mat3::scalar(b)), &su2).unwrap();
        let expect = [1.5 * a, a.powi(3) * b.powi(3), a.powi(3), -0.75 * a + a.powi(3) * b.powi(3)];
        for (got, want) in [d.h1, d.h2, d.h3, d.h].iter().zip(expect) {
            assert!((got - want).abs() < 1e-13);
        }

        let d = hamiltonian_densities(&state(Mat3::IDENTITY, Mat3::ZERO), &su2).unwrap();
        assert!((d.h1 - 1.5).abs() < 1e-14 && d.h2 == 0.0 && d.h3 == 1.0 && (d.h + 0.75).abs() < 1e-14);
    }

    #[test]
    fn flow_field_examples() {
        let su2 = preset(Preset::Su2);
        let (a, b) = (1.3, 0.8);
        let v = flow_field(&state(Mat3::scalar(a), Mat3::scalar(b)), &su2, HamiltonianCoeffs::default()).unwrap();
        assert!((v.de - Mat3::scalar(a * b * b)).max_abs() < 1e-14);
        assert!((v.ds - Mat3::scalar(0.25 / (a * a) - b.powi(3))).max_abs() < 1e-14);

        let v =
            flow_field(&state(Mat3::IDENTITY, Mat3::IDENTITY), &preset(Preset::Abelian), HamiltonianCoeffs::default())
                .unwrap();
        assert_eq!((v.de, v.ds), (Mat3::IDENTITY, -Mat3::IDENTITY));

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let st = FlowState { s: Mat3::ZERO, ..random_state(&mut rng) };
        let geo = geometry(&st, &su2).unwrap();
        let v = flow_field(&st, &su2, HamiltonianCoeffs::default()).unwrap();
        assert_eq!(v.de, Mat3::ZERO);
        assert!((v.ds + *geo.curvature.einstein()).max_abs() < 1e-13);
    }

    #[test]
    fn omega_pairing_examples() {
        let z = Tangent { t: Mat3::diag([1.0, 2.0, 3.0]), v: Mat3::scalar(0.5) };
        assert_eq!(omega_pairing(&z, &z, 2.0), 0.0);
        let z1 = Tangent { t: Mat3::IDENTITY, v: Mat3::ZERO };
        let z2 = Tangent { t: Mat3::ZERO, v: Mat3::IDENTITY };
        assert_eq!(omega_pairing(&z1, &z2, 1.0), 3.0);
    }

    #[test]
    fn constraint_rhs_examples() {
        assert_eq!(constraint_ode_rhs([0.0; 3], &Mat3::diag([1.0, 2.0, 3.0])), [0.0; 3]);
        assert_eq!(constraint_ode_rhs([1.0, -2.0, 0.5], &Mat3::IDENTITY), [-4.0, 8.0, -2.0]);
        assert_eq!(constraint_ode_rhs([1.0, 0.0, 0.0], &Mat3::diag([1.0, 2.0, 3.0])), [-7.0, 0.0, 0.0]);
    }

    #[test]
    fn variation_rate_examples() {
        let su2 = preset(Preset::Su2);
        let r = variation_rates(&state(Mat3::IDENTITY, Mat3::ZERO), &su2).unwrap();
        assert_eq!((r.dh1, r.dh2, r.dh3), (0.0, 0.0, 0.0));
        let r = variation_rates(&state(Mat3::IDENTITY, Mat3::IDENTITY), &su2).unwrap();
        assert!((r.dh1 - 1.5).abs() < 1e-14 && (r.dh2 - 0.75).abs() < 1e-14 && (r.dh3 - 3.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let st = random_state(&mut rng);
        let r = variation_rates(&st, &preset(Preset::Abelian)).unwrap();
        assert_eq!((r.dh1, r.dh2), (0.0, 0.0));
        assert!((r.dh3 - st.s.adjugate().trace() * st.det_e()).abs() < 1e-14);
    }

    #[test]
    fn stationary_at_zero_momentum_on_abelian() {
        let st = state(Mat3::diag([1.0, 2.0, 0.5]), Mat3::ZERO);
        let traj = integrate(&st, &preset(Preset::Abelian), &IntegrationConfig::new(0.1, 1.0)).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.samples.iter().all(|s| s.e == st.e && s.s == Mat3::ZERO));
        assert!((traj.last().unwrap().t - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_abelian() {
        let st = state(Mat3::IDENTITY, Mat3::IDENTITY);
        let traj = integrate(&st, &preset(Preset::Abelian), &IntegrationConfig::new(1e-3, 1.0)).unwrap();
        let last = traj.last().unwrap();
        assert!((last.e.0[0][0] - 3f64.sqrt()).abs() < 1e-8);
        assert!((last.s.0[0][0] - 1.0 / 3f64.sqrt()).abs() < 1e-8);
        assert!(traj.stop.is_none());
    }

    #[test]
    fn invalid_config_rejected() {
        let st = state(Mat3::IDENTITY, Mat3::IDENTITY);
        let c = preset(Preset::Abelian);
        assert!(integrate(&st, &c, &IntegrationConfig::new(0.0, 1.0)).is_err());
        assert!(integrate(&st, &c, &IntegrationConfig::new(0.1, -1.0)).is_err());
        assert!(FlowState::new(Mat3::diag([1.0, 1.0, -1.0]), Mat3::IDENTITY).is_err());
        assert!(FlowState::new(Mat3::IDENTITY, Mat3::new([[1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])).is_err());
    }

    #[test]
    fn stop_condition_recorded() {
        let st = state(Mat3::IDENTITY, Mat3::scalar(3.0));
        let mut cfg = IntegrationConfig::new(1e-2, 5.0);
        cfg.stop.max_norm = 5.0;
        let traj = integrate(&st, &preset(Preset::Abelian), &cfg).unwrap();
        assert!(matches!(traj.stop, Some(StopReason::NormExceeded { .. })));
        assert!(traj.samples.iter().all(|s| s.max_norm() <= 5.0));
    }

    #[test]
    fn scale_params_examples() {
        let p = scale_params(1.0, HamiltonianCoeffs::default()).unwrap();
        assert!((p.alpha - 1.0).abs() < 1e-15 && (p.beta - 1.0).abs() < 1e-15);
        let p = scale_params(1.0, HamiltonianCoeffs::new(1.0, 0.125)).unwrap();
        assert!((p.beta - 2f64.powf(1.5)).abs() < 1e-14);
        assert!((p.alpha - 2f64.powf(-0.25)).abs() < 1e-14);
        assert!(scale_params(0.0, HamiltonianCoeffs::default()).is_err());
        assert!(scale_params(1.0, HamiltonianCoeffs::new(-1.0, 1.0)).is_err());
    }

    #[test]
    fn hamiltonian_vector_field_horizontal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in Preset::ALL {
            let st = random_state(&mut rng);
            let z = hamiltonian_vector(&st, &preset(p), HamiltonianCoeffs::default()).unwrap();
            assert!(z.t.asymmetry() <= 1e-14);
        }
    }
}

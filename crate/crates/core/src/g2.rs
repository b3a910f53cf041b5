//! SU(3)- and G₂-structures built from flow states, and the residuals that
//! test half-flatness and torsion-freeness.
//!
//! Against the generators `e, a, dt` the forms depend on `S` only:
//! `ω = (det S)^{−1/2} S̃_{ij} a^i∧e^j`,
//! `ψ = −det S·e¹²³ + e¹∧a²∧a³ + e²∧a³∧a¹ + e³∧a¹∧a²` and
//! `φ = (det S)^{1/2} ω∧dt + ψ = S̃_{ij} a^i∧e^j∧dt + ψ`.
//! Geometry enters through the structural differential.

use crate::error::{Error, Result};
use crate::flow::{flow_field, FlowState, HamiltonianCoeffs, Trajectory, DEFINITENESS_TOL};
use crate::forms::{hodge_star, metric_from_phi, InvariantForm, PhiMetric, StructuralDifferential};
use crate::frame::{connection_variation, levi_civita};
use crate::liealg::StructureConstants;
use crate::mat3::{Definiteness, Mat3};

#[derive(Clone, Debug, PartialEq)]
pub struct Su3Structure {
    pub omega: InvariantForm,
    pub psi: InvariantForm,
}

/// `S̃_{ij} a^i∧e^j`.
fn adjugate_pairing(s: &Mat3) -> InvariantForm {
    let adj = s.adjugate();
    let mut out = InvariantForm::zero();
    for i in 0..3 {
        for j in 0..3 {
            if adj.0[i][j] != 0.0 {
                out += InvariantForm::a(i).wedge(&InvariantForm::e(j)) * adj.0[i][j];
            }
        }
    }
    out
}

pub fn psi_form(s: &Mat3) -> InvariantForm {
    let mut psi = InvariantForm::product(&[0, 1, 2]) * -s.det();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        psi += InvariantForm::e(i).wedge(&InvariantForm::a(j)).wedge(&InvariantForm::a(k));
    }
    psi
}

/// `φ` as a polynomial in `S`, defined for every symmetric `S`.
pub fn phi_form(s: &Mat3) -> InvariantForm {
    adjugate_pairing(s).wedge(&InvariantForm::dt()) + psi_form(s)
}

pub fn su3_structure(s: &Mat3) -> Result<Su3Structure> {
    let asym = s.asymmetry();
    if asym > 1e-12 * (1.0 + s.max_abs()) {
        return Err(Error::NotSymmetric { what: "momentum matrix S", asymmetry: asym });
    }
    let det = s.det();
    if !(det > 0.0) {
        return Err(Error::NonPositiveMomentum(det));
    }
    Ok(Su3Structure { omega: adjugate_pairing(s) * det.powf(-0.5), psi: psi_form(s) })
}

/// `φ`, its induced metric and `⋆φ`. Outside `det S > 0` only the
/// classification is filled in.
#[derive(Clone, Debug)]
pub struct G2Form {
    pub phi: InvariantForm,
    /// `(det S)^{1/2}` when `det S > 0`.
    pub f: Option<f64>,
    pub regime: Definiteness,
    pub metric: Option<PhiMetric>,
    pub star_phi: Option<InvariantForm>,
}

impl G2Form {
    pub fn is_g2(&self) -> bool {
        self.star_phi.is_some()
    }
}

pub fn g2_form(s: &Mat3) -> Result<G2Form> {
    let phi = phi_form(s);
    let regime = s.definiteness(DEFINITENESS_TOL);
    let det = s.det();
    let metric = metric_from_phi(&phi).ok();
    let star_phi = match (&metric, regime) {
        (Some(m), Definiteness::PositiveDefinite) if m.is_positive_definite() => Some(hodge_star(&phi, &m.metric)?),
        _ => None,
    };
    Ok(G2Form { phi, f: (det > 0.0).then(|| det.sqrt()), regime, metric, star_phi })
}

fn star_phi_of(s: &Mat3) -> Result<InvariantForm> {
    g2_form(s)?.star_phi.ok_or(Error::NotPositiveDefinite { what: "momentum matrix S" })
}

/// `(‖d(ω∧ω)‖, ‖dψ‖)` in the coefficient max-norm.
pub fn half_flat_residual(su3: &Su3Structure, sd: &StructuralDifferential) -> (f64, f64) {
    let oo = su3.omega.wedge(&su3.omega);
    (sd.d(&oo).max_abs(), sd.d(&su3.psi).max_abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionResidual {
    pub dphi: f64,
    pub dstarphi: f64,
}

impl TorsionResidual {
    pub fn max(&self) -> f64 {
        self.dphi.max(self.dstarphi)
    }
}

/// Time data used to assemble `d` on `P × I`: frame rate `P` (`Ė = P E`) and `Ṡ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeData {
    pub frame_rate: Mat3,
    pub ds: Mat3,
}

impl TimeData {
    pub fn from_flow(st: &FlowState, c: &StructureConstants, coeffs: HamiltonianCoeffs) -> Result<Self> {
        let v = flow_field(st, c, coeffs)?;
        let frame = st.frame()?;
        Ok(TimeData { frame_rate: v.de * *frame.inverse(), ds: v.ds })
    }
}

/// Five-point directional derivative of `f` at `s` along `ds`, with the step
/// scaled to the smallest eigenvalue of `s`.
fn directional_rate(f: impl Fn(&Mat3) -> Result<InvariantForm>, s: &Mat3, ds: &Mat3) -> Result<InvariantForm> {
    let speed = ds.max_abs();
    if speed == 0.0 {
        return Ok(InvariantForm::zero());
    }
    let u = *ds * (1.0 / speed);
    let h = 1e-3 * s.symmetric_eigenvalues()[0].abs().max(1e-6);
    let at = |k: f64| f(&(*s + u * (k * h)));
    let stencil = at(-2.0)? - at(-1.0)? * 8.0 + at(1.0)? * 8.0 - at(2.0)?;
    Ok(stencil * (speed / (12.0 * h)))
}

/// Max-norms of `dφ` and `d⋆φ` on `P × I` at `st` for the given time data.
pub fn torsion_residual_with(st: &FlowState, c: &StructureConstants, time: &TimeData) -> Result<TorsionResidual> {
    let det = st.det_s();
    if st.definiteness() != Definiteness::PositiveDefinite {
        return Err(Error::NonPositiveMomentum(det));
    }
    let frame = st.frame()?;
    let lc = levi_civita(&frame, c)?;
    let q = connection_variation(&frame, &lc, &time.frame_rate, c)?;
    let sd = StructuralDifferential::new(&frame, &lc, c).with_rates(time.frame_rate, q);

    let phi = phi_form(&st.s);
    let phi_rate = directional_rate(|s| Ok(phi_form(s)), &st.s, &time.ds)?;
    let star = star_phi_of(&st.s)?;
    let star_rate = directional_rate(star_phi_of, &st.s, &time.ds)?;
    Ok(TorsionResidual {
        dphi: sd.d_with_rate(&phi, &phi_rate).max_abs(),
        dstarphi: sd.d_with_rate(&star, &star_rate).max_abs(),
    })
}

/// Torsion residuals with time data from the `(a, b)` flow.
pub fn torsion_residual(st: &FlowState, c: &StructureConstants, coeffs: HamiltonianCoeffs) -> Result<TorsionResidual> {
    torsion_residual_with(st, c, &TimeData::from_flow(st, c, coeffs)?)
}

/// Regime change between consecutive samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    /// Last sample time in the old regime.
    pub t_before: f64,
    /// First sample time in the new regime.
    pub t_after: f64,
    pub from: Definiteness,
    pub to: Definiteness,
}

/// Per-sample classification of `S`.
pub fn definiteness_classify(traj: &Trajectory) -> Vec<(f64, Definiteness)> {
    traj.samples.iter().map(|s| (s.t, s.definiteness())).collect()
}

pub fn transitions(traj: &Trajectory) -> Vec<Transition> {
    definiteness_classify(traj)
        .windows(2)
        .filter(|w| w[0].1 != w[1].1)
        .map(|w| Transition { t_before: w[0].0, t_after: w[1].0, from: w[0].1, to: w[1].1 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{integrate, IntegrationConfig};
    use crate::forms::{Metric7, A_MASK};
    use crate::frame::{divergence_constraint, Connection, Frame};
    use crate::liealg::Preset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> InvariantForm {
        InvariantForm::e(i)
    }
    fn a(i: usize) -> InvariantForm {
        InvariantForm::a(i)
    }

    #[test]
    fn su3_at_identity() {
        let su3 = su3_structure(&Mat3::IDENTITY).unwrap();
        let omega = (0..3).fold(InvariantForm::zero(), |acc, i| acc + a(i).wedge(&e(i)));
        assert_eq!(su3.omega, omega);
        let psi = -e(0).wedge(&e(1)).wedge(&e(2))
            + e(0).wedge(&a(1)).wedge(&a(2))
            + e(1).wedge(&a(2)).wedge(&a(0))
            + e(2).wedge(&a(0)).wedge(&a(1));
        assert_eq!(su3.psi, psi);
    }

    #[test]
    fn su3_diagonal() {
        let (s1, s2, s3) = (0.5, 2.0, 3.0);
        let su3 = su3_structure(&Mat3::diag([s1, s2, s3])).unwrap();
        let k = (s1 * s2 * s3).powf(-0.5);
        let expect =
            a(0).wedge(&e(0)) * (k * s2 * s3) + a(1).wedge(&e(1)) * (k * s3 * s1) + a(2).wedge(&e(2)) * (k * s1 * s2);
        assert!((su3.omega - expect).max_abs() < 1e-15);
        assert!(su3_structure(&Mat3::diag([1.0, -1.0, 1.0])).is_err());
    }

    #[test]
    fn fiber_restriction_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let s = Mat3::IDENTITY + Mat3::from_fn(|_, _| rng.random_range(-0.4..0.4)).symmetrized();
            let su3 = su3_structure(&s).unwrap();
            assert!(su3.omega.fiber_restriction().is_zero());
            assert!(su3.psi.fiber_restriction().is_zero());
            assert!(su3.omega.restrict(A_MASK).is_zero());
            // ω³ and ψ pair nondegenerately with the base and fiber volumes
            let o3 = su3.omega.wedge(&su3.omega).wedge(&su3.omega);
            assert!(o3.coeff(0b11_1111).abs() > 1e-6);
            let psi_hat = e(0).wedge(&e(1)).wedge(&e(2)) * -(1.0 / s.det());
            assert!(su3.psi.wedge(&(psi_hat + a(0).wedge(&a(1)).wedge(&a(2)))).coeff(0b11_1111).abs() > 1e-6);
        }
    }

    #[test]
    fn g2_form_at_identity() {
        let g = g2_form(&Mat3::IDENTITY).unwrap();
        assert_eq!(g.f, Some(1.0));
        let m = g.metric.as_ref().unwrap();
        assert!((m.metric - Metric7::identity()).amax() < 1e-12);
        assert!(g.is_g2());
        // φ = f ω∧dt + ψ
        let su3 = su3_structure(&Mat3::IDENTITY).unwrap();
        assert_eq!(g.phi, su3.omega.wedge(&InvariantForm::dt()) + su3.psi);
    }

    #[test]
    fn g2_form_scaling_of_f() {
        let s = Mat3::diag([1.0, 2.0, 0.5]);
        let lambda: f64 = 1.7;
        let f1 = g2_form(&s).unwrap().f.unwrap();
        let f2 = g2_form(&(s * (lambda * lambda))).unwrap().f.unwrap();
        assert!((f2 - lambda.powi(3) * f1).abs() < 1e-12);
    }

    #[test]
    fn split_signature_outside_positive_cone() {
        for s in [-Mat3::IDENTITY, Mat3::diag([1.0, -1.0, 2.0]), Mat3::diag([-1.0, -1.0, 2.0])] {
            let g = g2_form(&s).unwrap();
            assert!(!g.is_g2());
            assert_eq!(g.metric.unwrap().signature(), (3, 4));
        }
        let g = g2_form(&Mat3::diag([1.0, 1.0, 0.0])).unwrap();
        assert!(g.metric.is_none());
        assert_eq!(g.regime, Definiteness::Singular);
    }

    #[test]
    fn half_flat_examples() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let id = Frame::identity();
        let lc = Connection(Mat3::scalar(0.5));
        let s = Mat3::new([[1.2, 0.3, 0.1], [0.3, 0.9, -0.2], [0.1, -0.2, 1.5]]);
        let su3 = su3_structure(&s).unwrap();
        let (r1, r2) = half_flat_residual(&su3, &StructuralDifferential::new(&id, &lc, &su2));
        assert!(r1 < 1e-13 && r2 < 1e-13);
        let (r1, r2) = half_flat_residual(&su3, &StructuralDifferential::new(&id, &Connection::default(), &su2));
        assert!(r1.max(r2) > 1e-3);
        let ab = StructureConstants::preset(Preset::Abelian);
        let (r1, r2) = half_flat_residual(&su3, &StructuralDifferential::new(&id, &Connection::default(), &ab));
        assert_eq!((r1, r2), (0.0, 0.0));
    }

    #[test]
    fn torsion_free_on_isotropic_orbit() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let st = FlowState::new(Mat3::scalar(2.0), Mat3::scalar(0.7)).unwrap();
        let r = torsion_residual(&st, &su2, HamiltonianCoeffs::default()).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
    }

    #[test]
    fn frozen_momentum_breaks_torsion_freeness() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let st = FlowState::new(Mat3::IDENTITY, Mat3::IDENTITY).unwrap();
        let mut time = TimeData::from_flow(&st, &su2, HamiltonianCoeffs::default()).unwrap();
        time.ds = Mat3::ZERO;
        let r = torsion_residual_with(&st, &su2, &time).unwrap();
        assert!(r.dphi > 1e-3, "{r:?}");
    }

    #[test]
    fn nonzero_constraint_breaks_torsion_freeness() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let e_mat = Mat3::new([[1.1, 0.2, 0.0], [-0.1, 0.9, 0.3], [0.05, 0.0, 1.3]]);
        let s = Mat3::diag([1.0, 1.5, 2.0]);
        let frame = Frame::new(e_mat).unwrap();
        let lc = levi_civita(&frame, &su2).unwrap();
        let v = divergence_constraint(&s, &frame, &lc);
        assert!(v.iter().any(|x| x.abs() > 1e-3));
        let r = torsion_residual(&FlowState::new(e_mat, s).unwrap(), &su2, HamiltonianCoeffs::default()).unwrap();
        assert!(r.max() > 1e-6, "{r:?}");
    }

    #[test]
    fn torsion_residual_rejects_indefinite() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let st = FlowState::new(Mat3::IDENTITY, -Mat3::IDENTITY).unwrap();
        assert!(torsion_residual(&st, &su2, HamiltonianCoeffs::default()).is_err());
    }

    #[test]
    fn classification_of_trajectories() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let st = FlowState::new(Mat3::IDENTITY, Mat3::IDENTITY).unwrap();
        let traj = integrate(&st, &su2, &IntegrationConfig::new(0.01, 0.5)).unwrap();
        assert!(definiteness_classify(&traj).iter().all(|(_, d)| *d == Definiteness::PositiveDefinite));
        assert!(transitions(&traj).is_empty());

        let st = FlowState::new(Mat3::IDENTITY, Mat3::ZERO).unwrap();
        assert_eq!(st.definiteness(), Definiteness::Singular);
    }
}

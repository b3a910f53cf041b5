//! Metric/momentum variables `(γ, π)` for invariant data, with the density
//! weight of `π` carried by an explicit `det E` factor:
//! `γ = Eᵀ E`, `π = ½ E⁻¹ S E⁻ᵀ det E` (components against the λ-frame).

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::frame::{riemannian_curvature, Frame};
use crate::liealg::StructureConstants;
use crate::mat3::Mat3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmState {
    pub gamma: Mat3,
    pub pi: Mat3,
}

impl AdmState {
    /// `π^i_j = π^{ik} γ_{kj}`.
    pub fn mixed_momentum(&self) -> Mat3 {
        self.pi * self.gamma
    }

    /// `√det γ`.
    pub fn volume(&self) -> f64 {
        self.gamma.det().sqrt()
    }
}

pub fn to_adm(st: &FlowState) -> Result<AdmState> {
    let frame = st.frame()?;
    let inv = frame.inverse();
    let gamma = st.e.transpose() * st.e;
    let pi = *inv * st.s * inv.transpose() * (0.5 * frame.det());
    Ok(AdmState { gamma, pi })
}

/// Unique symmetric positive-definite square root.
pub fn symmetric_sqrt(m: &Mat3) -> Result<Mat3> {
    let asym = m.asymmetry();
    if asym > 1e-12 * (1.0 + m.max_abs()) {
        return Err(Error::NotSymmetric { what: "metric", asymmetry: asym });
    }
    let n = nalgebra::Matrix3::from_fn(|i, j| m.symmetrized().0[i][j]);
    let eig = n.symmetric_eigen();
    if eig.eigenvalues.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NotPositiveDefinite { what: "metric" });
    }
    let root = eig.eigenvectors
        * nalgebra::Matrix3::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    Ok(Mat3::from_fn(|i, j| 0.5 * (root[(i, j)] + root[(j, i)])))
}

/// Inverse of [`to_adm`] in the gauge where `E` is symmetric positive-definite.
pub fn from_adm(adm: &AdmState) -> Result<FlowState> {
    let e = symmetric_sqrt(&adm.gamma)?;
    let det = e.det();
    let s = (e * adm.pi * e.transpose() * (2.0 / det)).symmetrized();
    FlowState::new(e, s)
}

/// Densities of the flow Hamiltonian `H`, of `H_{G₂} = −H₁ + ⅛H₂` and of the
/// general-relativity Hamiltonian `H_GR`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hamiltonians {
    pub h: f64,
    pub hg2: f64,
    pub hgr: f64,
}

fn scalar_curvature(adm: &AdmState, c: &StructureConstants) -> Result<(f64, f64)> {
    let e = symmetric_sqrt(&adm.gamma)?;
    let frame = Frame::new(e)?;
    let (_, curv) = riemannian_curvature(&frame, c)?;
    Ok((curv.scalar_curvature(), frame.det()))
}

pub fn hamiltonians(adm: &AdmState, c: &StructureConstants) -> Result<Hamiltonians> {
    let (r, vol) = scalar_curvature(adm, c)?;
    let mixed = adm.mixed_momentum();
    // 8 det(π^i_j) vol⁻² = det S · vol
    let h2 = 8.0 * mixed.det() / (vol * vol);
    let h1 = r * vol;
    let kinetic = ((mixed * mixed).trace() - 0.5 * mixed.trace().powi(2)) / vol;
    Ok(Hamiltonians { h: -0.5 * h1 + h2, hg2: -h1 + 0.125 * h2, hgr: -h1 + kinetic })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdmConstraints {
    /// `R·vol² + ½ tr(π)² − tr(π²)` with mixed-index traces.
    pub scalar: f64,
    /// `∇_j π^{ij}` against the λ-frame.
    pub momentum: [f64; 3],
}

impl AdmConstraints {
    pub fn momentum_norm(&self) -> f64 {
        self.momentum.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `Γ^i_{jk}` of the invariant metric `γ` against the λ-frame, from Koszul's
/// formula with `[X_j, X_k] = c^i_{jk} X_i`.
pub fn christoffel(gamma: &Mat3, c: &StructureConstants) -> Result<[[[f64; 3]; 3]; 3]> {
    let ginv = gamma.try_inverse().ok_or(Error::Singular { what: "metric", det: gamma.det() })?;
    let mut lowered = [[[0.0; 3]; 3]; 3];
    for (j, lj) in lowered.iter_mut().enumerate() {
        for (k, ljk) in lj.iter_mut().enumerate() {
            for (l, v) in ljk.iter_mut().enumerate() {
                *v = 0.5
                    * (0..3)
                        .map(|m| {
                            c.get(m, j, k) * gamma.0[m][l] - c.get(m, k, l) * gamma.0[m][j]
                                + c.get(m, l, j) * gamma.0[m][k]
                        })
                        .sum::<f64>();
            }
        }
    }
    let mut out = [[[0.0; 3]; 3]; 3];
    for (i, oi) in out.iter_mut().enumerate() {
        for j in 0..3 {
            for k in 0..3 {
                oi[j][k] = (0..3).map(|l| ginv.0[i][l] * lowered[j][k][l]).sum();
            }
        }
    }
    Ok(out)
}

pub fn adm_constraints(adm: &AdmState, c: &StructureConstants) -> Result<AdmConstraints> {
    let (r, vol) = scalar_curvature(adm, c)?;
    let mixed = adm.mixed_momentum();
    let scalar = r * vol * vol + 0.5 * mixed.trace().powi(2) - (mixed * mixed).trace();
    let gam = christoffel(&adm.gamma, c)?;
    let p = &adm.pi.0;
    let mut momentum = [0.0; 3];
    for (i, mi) in momentum.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                s += gam[i][j][k] * p[k][j] + gam[j][j][k] * p[i][k];
            }
        }
        *mi = s;
    }
    Ok(AdmConstraints { scalar, momentum })
}

/// Momentum constraint re-expressed against the `e`-frame, `E·∇_jπ^{·j}`, for
/// comparison with the frame-picture divergence.
pub fn momentum_in_frame(adm: &AdmConstraints, st: &FlowState) -> [f64; 3] {
    st.e.mul_vec(adm.momentum)
}

//! Invariant frame geometry: a solder matrix `E` (`e^i = E_{ij} λ^j`) and an
//! `so(3)` connection `A` (`a^i = A_{ij} λ^j`) over a Lie group with structure
//! constants `c`.
//!
//! Torsion is `d_H e = de + a∧e` with `(a∧e)^i = ε_{ijk} a^j∧e^k`, curvature is
//! `d_H a = da + ½[a∧a]`, and the Einstein matrix `G` is read from
//! `d_H a^i = G_{iβ} ê^β` where `ê^b = ½ ε_{bjk} e^j∧e^k`.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::liealg::StructureConstants;
use crate::mat3::{epsilon, so3_bracket, Mat3, Tensor3, ZERO_TENSOR3};

/// Torsion tolerance accepted as "Levi-Civita" by [`connection_variation`].
pub const LC_TOLERANCE: f64 = 1e-9;

/// Solder matrix with positive determinant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    e: Mat3,
    inv: Mat3,
}

impl Frame {
    pub fn new(e: Mat3) -> Result<Self> {
        let det = e.det();
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::NonPositiveFrame(det));
        }
        let inv = e.try_inverse().ok_or(Error::Singular { what: "frame matrix", det })?;
        Ok(Frame { e, inv })
    }

    pub fn identity() -> Self {
        Frame { e: Mat3::IDENTITY, inv: Mat3::IDENTITY }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.e
    }

    pub fn inverse(&self) -> &Mat3 {
        &self.inv
    }

    pub fn det(&self) -> f64 {
        self.e.det()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Connection(pub Mat3);

impl Connection {
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// `A·E⁻¹`, the connection components against the `e`-coframe.
    pub fn in_frame(&self, frame: &Frame) -> Mat3 {
        self.0 * *frame.inverse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureData {
    g: Mat3,
    scalar: f64,
    torsion: Tensor3,
}

impl CurvatureData {
    fn new(g: Mat3, torsion: Tensor3) -> Self {
        CurvatureData { g, scalar: -2.0 * g.trace(), torsion }
    }

    /// Orthonormal Einstein matrix.
    pub fn einstein(&self) -> &Mat3 {
        &self.g
    }

    pub fn scalar_curvature(&self) -> f64 {
        self.scalar
    }

    /// `T^i_{jk}` with `d_H e^i = ½ T^i_{jk} e^j∧e^k`.
    pub fn torsion(&self) -> &Tensor3 {
        &self.torsion
    }
}

/// `d_H e^i = ½ M^i_{mn} λ^m∧λ^n`.
fn torsion_lambda(e: &Mat3, a: &Mat3, c: &StructureConstants) -> Tensor3 {
    let mut m = ZERO_TENSOR3;
    for (i, mi) in m.iter_mut().enumerate() {
        for p in 0..3 {
            for q in 0..3 {
                let mut s = 0.0;
                for j in 0..3 {
                    s -= e.0[i][j] * c.get(j, p, q);
                    for k in 0..3 {
                        let eps = epsilon(i, j, k);
                        if eps != 0.0 {
                            s += eps * (a.0[j][p] * e.0[k][q] - a.0[j][q] * e.0[k][p]);
                        }
                    }
                }
                mi[p][q] = s;
            }
        }
    }
    m
}

/// Re-express `½ M^i_{mn} λ^m∧λ^n` as `½ N^i_{jk} e^j∧e^k` through `λ = E⁻¹ e`.
fn to_frame_components(m: &Tensor3, inv: &Mat3) -> Tensor3 {
    let mut out = ZERO_TENSOR3;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut s = 0.0;
                for p in 0..3 {
                    for q in 0..3 {
                        s += m[i][p][q] * inv.0[p][j] * inv.0[q][k];
                    }
                }
                out[i][j][k] = s;
            }
        }
    }
    out
}

pub fn torsion(frame: &Frame, conn: &Connection, c: &StructureConstants) -> Tensor3 {
    to_frame_components(&torsion_lambda(frame.matrix(), conn.matrix(), c), frame.inverse())
}

/// Largest torsion component.
pub fn torsion_norm(frame: &Frame, conn: &Connection, c: &StructureConstants) -> f64 {
    torsion(frame, conn, c).iter().flatten().flatten().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// The unique torsion-free connection of `frame`.
///
/// Torsion is affine in `A`; its nine independent components (`m < n`) give a
/// square system for the nine entries of `A`.
pub fn levi_civita(frame: &Frame, c: &StructureConstants) -> Result<Connection> {
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let e = frame.matrix();
    let pack = |t: &Tensor3| {
        SVector::<f64, 9>::from_fn(|r, _| {
            let (p, q) = PAIRS[r % 3];
            t[r / 3][p][q]
        })
    };
    let base = pack(&torsion_lambda(e, &Mat3::ZERO, c));
    let mut jac = SMatrix::<f64, 9, 9>::zeros();
    for col in 0..9 {
        let mut unit = Mat3::ZERO;
        unit.0[col / 3][col % 3] = 1.0;
        let column = pack(&torsion_lambda(e, &unit, c)) - base;
        jac.set_column(col, &column);
    }
    let lu = jac.lu();
    let det = lu.determinant();
    let sol = lu.solve(&(-base)).filter(|_| det != 0.0).ok_or(Error::Singular { what: "Levi-Civita system", det })?;
    let a = Mat3::from_fn(|i, j| sol[3 * i + j]);
    if !a.is_finite() {
        return Err(Error::Singular { what: "Levi-Civita system", det });
    }
    Ok(Connection(a))
}

/// Einstein matrix, scalar curvature and torsion of `(frame, conn)`.
pub fn einstein_tensor(frame: &Frame, conn: &Connection, c: &StructureConstants) -> CurvatureData {
    let a = conn.matrix();
    let mut f = ZERO_TENSOR3;
    for (i, fi) in f.iter_mut().enumerate() {
        for p in 0..3 {
            for q in 0..3 {
                let mut s = 0.0;
                for j in 0..3 {
                    s -= a.0[i][j] * c.get(j, p, q);
                    for k in 0..3 {
                        let eps = epsilon(i, j, k);
                        if eps != 0.0 {
                            s += 0.5 * eps * (a.0[j][p] * a.0[k][q] - a.0[j][q] * a.0[k][p]);
                        }
                    }
                }
                fi[p][q] = s;
            }
        }
    }
    let fe = to_frame_components(&f, frame.inverse());
    let g = Mat3::from_fn(|i, b| {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                s += epsilon(b, j, k) * fe[i][j][k];
            }
        }
        0.5 * s
    });
    CurvatureData::new(g, torsion(frame, conn, c))
}

/// Levi-Civita connection and its curvature in one call.
pub fn riemannian_curvature(frame: &Frame, c: &StructureConstants) -> Result<(Connection, CurvatureData)> {
    let conn = levi_civita(frame, c)?;
    let curv = einstein_tensor(frame, &conn, c);
    Ok((conn, curv))
}

/// `S_{ij;m}` indexed `[i][j][m]`, for invariant `S` (so `dS = 0`).
pub fn covariant_derivative(s: &Mat3, frame: &Frame, conn: &Connection) -> Tensor3 {
    let gauge = conn.in_frame(frame);
    let brackets = [so3_bracket(0, s), so3_bracket(1, s), so3_bracket(2, s)];
    let mut out = ZERO_TENSOR3;
    for (i, oi) in out.iter_mut().enumerate() {
        for (j, oij) in oi.iter_mut().enumerate() {
            for (m, v) in oij.iter_mut().enumerate() {
                *v = (0..3).map(|k| gauge.0[k][m] * brackets[k].0[i][j]).sum();
            }
        }
    }
    out
}

/// `(S_{1α;α}, S_{2α;α}, S_{3α;α})`.
pub fn divergence_constraint(s: &Mat3, frame: &Frame, conn: &Connection) -> [f64; 3] {
    let cov = covariant_derivative(s, frame, conn);
    let mut v = [0.0; 3];
    for (i, vi) in v.iter_mut().enumerate() {
        *vi = (0..3).map(|alpha| cov[i][alpha][alpha]).sum();
    }
    v
}

/// Rate `Q` of the Levi-Civita connection (`∂a^i/∂t = Q_{iγ} e^γ`) along the
/// frame velocity `∂e^i/∂t = P_{iα} e^α`: `Q_{ij} = −ε_{iαβ} P_{jα;β}`.
pub fn connection_variation(frame: &Frame, lc: &Connection, p: &Mat3, c: &StructureConstants) -> Result<Mat3> {
    let residual = torsion_norm(frame, lc, c);
    if residual > LC_TOLERANCE * (1.0 + frame.matrix().max_abs()) {
        return Err(Error::NotLeviCivita(residual));
    }
    let cov = covariant_derivative(p, frame, lc);
    Ok(Mat3::from_fn(|i, j| {
        let mut s = 0.0;
        for alpha in 0..3 {
            for beta in 0..3 {
                s -= epsilon(i, alpha, beta) * cov[j][alpha][beta];
            }
        }
        s
    }))
}

/// Inputs to [`covd_time_derivative`]: a point `(E, A, S)` and the velocities
/// `∂e = P e`, `∂a = Q e`, `∂S = B`.
#[derive(Clone, Copy, Debug)]
pub struct CovdVariation {
    pub frame: Frame,
    pub conn: Connection,
    pub s: Mat3,
    pub p: Mat3,
    pub q: Mat3,
    pub b: Mat3,
}

/// Predicted `∂_t(S_{ij;k}) = B_{ij;k} − S_{ij;α}P_{αk} + ε_{iαγ}S_{γj}Q_{αk} + ε_{jαγ}S_{iγ}Q_{αk}`.
pub fn covd_time_derivative(v: &CovdVariation) -> Tensor3 {
    let cov_s = covariant_derivative(&v.s, &v.frame, &v.conn);
    let cov_b = covariant_derivative(&v.b, &v.frame, &v.conn);
    let mut out = ZERO_TENSOR3;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut t = cov_b[i][j][k];
                for alpha in 0..3 {
                    t -= cov_s[i][j][alpha] * v.p.0[alpha][k];
                    for gamma in 0..3 {
                        t += epsilon(i, alpha, gamma) * v.s.0[gamma][j] * v.q.0[alpha][k];
                        t += epsilon(j, alpha, gamma) * v.s.0[i][gamma] * v.q.0[alpha][k];
                    }
                }
                out[i][j][k] = t;
            }
        }
    }
    out
}

/// Frobenius-orthonormal basis of the symmetric matrices.
fn sym_basis() -> [Mat3; 6] {
    let mut out = [Mat3::ZERO; 6];
    let pairs = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    for (m, (i, j)) in out.iter_mut().zip(pairs) {
        let v = if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
        m.0[i][j] = v;
        m.0[j][i] = v;
    }
    out
}

/// Orthonormal basis (Frobenius inner product) of the symmetric matrices
/// `S` with `divergence_constraint(S) = 0`. Always contains the direction of `I`.
pub fn divergence_free_basis(frame: &Frame, conn: &Connection) -> Vec<Mat3> {
    let basis = sym_basis();
    let mut map = SMatrix::<f64, 3, 6>::zeros();
    for (col, b) in basis.iter().enumerate() {
        let v = divergence_constraint(b, frame, conn);
        for (row, x) in v.iter().enumerate() {
            map[(row, col)] = *x;
        }
    }
    // null space of the 3×6 map from the eigenvectors of mapᵀ·map
    let gram = map.transpose() * map;
    let eig = gram.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let mut out = Vec::new();
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() <= 1e-12 * scale {
            let v = eig.eigenvectors.column(k);
            let mut m = Mat3::ZERO;
            for (b, x) in basis.iter().zip(v.iter()) {
                m += *b * *x;
            }
            out.push(m * (1.0 / m.frobenius_norm()));
        }
    }
    out
}

/// Frobenius-orthogonal projection of `s` onto the divergence-free symmetric matrices.
pub fn project_divergence_free(s: &Mat3, frame: &Frame, conn: &Connection) -> Mat3 {
    divergence_free_basis(frame, conn).iter().fold(Mat3::ZERO, |acc, b| acc + *b * s.frobenius_dot(b))
}

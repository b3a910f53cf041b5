//! Dense 3×3 matrices and the small amount of index calculus built on them:
//! the Levi-Civita symbol, adjugates, and the `so(3)` action on matrices.
//!
//! The basis of `so(3)` is fixed as `(L_k)_{ij} = −ε_{kij}`, so `L_k v = e_k × v`
//! and `[L_i, L_j] = ε_{ijk} L_k`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicBool, Ordering};

/// Rank-3 array indexed `[i][j][k]`.
pub type Tensor3 = [[[f64; 3]; 3]; 3];

pub const ZERO_TENSOR3: Tensor3 = [[[0.0; 3]; 3]; 3];

static EPSILON_FAULT: AtomicBool = AtomicBool::new(false);

/// Debug hook for self-test negative controls: while enabled, `ε_{123}` reports
/// `−1` and every other component is left untouched, which breaks antisymmetry.
#[doc(hidden)]
pub fn set_epsilon_fault(enabled: bool) {
    EPSILON_FAULT.store(enabled, Ordering::SeqCst);
}

/// Levi-Civita symbol with zero-based indices, `ε_{012} = +1`.
#[inline]
pub fn epsilon(i: usize, j: usize, k: usize) -> f64 {
    if i == j || j == k || i == k {
        return 0.0;
    }
    if (i, j, k) == (0, 1, 2) && EPSILON_FAULT.load(Ordering::Relaxed) {
        return -1.0;
    }
    // even permutations are the cyclic shifts of (0, 1, 2)
    if (j + 3 - i) % 3 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// The full symbol as an array, `EPSILON[i][j][k] = ε_{ijk}`.
pub fn epsilon_tensor() -> Tensor3 {
    let mut t = ZERO_TENSOR3;
    for (i, ti) in t.iter_mut().enumerate() {
        for (j, tij) in ti.iter_mut().enumerate() {
            for (k, v) in tij.iter_mut().enumerate() {
                *v = epsilon(i, j, k);
            }
        }
    }
    t
}

#[derive(Clone, Copy, PartialEq, Default)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub const fn new(rows: [[f64; 3]; 3]) -> Self {
        Mat3(rows)
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: [f64; 3]) -> Self {
        Mat3::from_fn(|i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn scalar(s: f64) -> Self {
        Mat3::diag([s; 3])
    }

    /// Row-major flattening, `[m11, m12, m13, m21, ...]`.
    pub fn to_row_major(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[i][j];
            }
        }
        out
    }

    pub fn from_row_major(v: &[f64; 9]) -> Self {
        Mat3::from_fn(|i, j| v[3 * i + j])
    }

    pub fn transpose(&self) -> Self {
        Mat3::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Transposed cofactor matrix, `adj(M)·M = det(M)·I`.
    ///
    /// Computed from `adj(B)_{ij} = ½ ε_{iαβ} ε_{jγδ} B_{γα} B_{δβ}`, which is
    /// total and degree-2 homogeneous.
    pub fn adjugate(&self) -> Self {
        let b = &self.0;
        Mat3::from_fn(|i, j| {
            let mut s = 0.0;
            for alpha in 0..3 {
                for beta in 0..3 {
                    let e1 = epsilon(i, alpha, beta);
                    if e1 == 0.0 {
                        continue;
                    }
                    for gamma in 0..3 {
                        for delta in 0..3 {
                            let e2 = epsilon(j, gamma, delta);
                            if e2 != 0.0 {
                                s += e1 * e2 * b[gamma][alpha] * b[delta][beta];
                            }
                        }
                    }
                }
            }
            0.5 * s
        })
    }

    /// `None` when `|det| ≤ tol · ‖M‖³`.
    pub fn try_inverse(&self) -> Option<Self> {
        let d = self.det();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if !d.is_finite() || d.abs() <= 1e-14 * scale * scale * scale {
            return None;
        }
        Some(self.adjugate() * (1.0 / d))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    /// Largest `|M_ij − M_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in (i + 1)..3 {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    /// Matrix commutator `[self, other]`.
    pub fn commutator(&self, other: &Mat3) -> Mat3 {
        *self * *other - *other * *self
    }

    /// `Σ_ij A_ij B_ij`.
    pub fn frobenius_dot(&self, other: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * other.0[i][j];
            }
        }
        s
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// Symmetric and antisymmetric parts, `M = sym + antisym`.
    pub fn sym_antisym_split(&self) -> (Mat3, Mat3) {
        let t = self.transpose();
        ((*self + t) * 0.5, (*self - t) * 0.5)
    }

    pub fn symmetrized(&self) -> Mat3 {
        self.sym_antisym_split().0
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> [f64; 3] {
        let s = self.symmetrized();
        let m = nalgebra::Matrix3::from_fn(|i, j| s.0[i][j]);
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        [ev[0], ev[1], ev[2]]
    }

    pub fn definiteness(&self, tol: f64) -> Definiteness {
        Definiteness::classify(self.symmetric_eigenvalues(), tol)
    }
}

/// Basis element `L_k` of `so(3)`, `(L_k)_{ij} = −ε_{kij}`.
pub fn so3_basis(k: usize) -> Mat3 {
    Mat3::from_fn(|i, j| -epsilon(k, i, j))
}

/// `[L_k, s]`.
pub fn so3_bracket(k: usize, s: &Mat3) -> Mat3 {
    so3_basis(k).commutator(s)
}

/// `ε_{ijk} v_k`, the antisymmetric matrix with `hat(v)·w = v × w`.
pub fn hat(v: [f64; 3]) -> Mat3 {
    Mat3::from_fn(|i, j| (0..3).map(|k| epsilon(i, k, j) * v[k]).sum())
}

/// Sign pattern of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Singular,
}

impl Definiteness {
    /// Eigenvalues with `|λ| ≤ tol · max|λ|` count as zero.
    pub fn classify(eigenvalues: [f64; 3], tol: f64) -> Self {
        let scale = eigenvalues.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if scale == 0.0 || eigenvalues.iter().any(|v| v.abs() <= tol * scale) {
            return Definiteness::Singular;
        }
        let positive = eigenvalues.iter().filter(|v| **v > 0.0).count();
        match positive {
            3 => Definiteness::PositiveDefinite,
            0 => Definiteness::NegativeDefinite,
            _ => Definiteness::Indefinite,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Definiteness::PositiveDefinite => "pos-def",
            Definiteness::NegativeDefinite => "neg-def",
            Definiteness::Indefinite => "indef",
            Definiteness::Singular => "singular",
        }
    }
}

impl fmt::Display for Definiteness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat3{:?}", self.0)
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, rhs: Mat3) {
        *self = *self + rhs;
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl SubAssign for Mat3 {
    fn sub_assign(&mut self, rhs: Mat3) {
        *self = *self - rhs;
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self * -1.0
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] * s)
    }
}

impl Mul<Mat3> for f64 {
    type Output = Mat3;
    fn mul(self, m: Mat3) -> Mat3 {
        m * self
    }
}

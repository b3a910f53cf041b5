//! Exterior algebra over the seven generators `e¹,e²,e³,a¹,a²,a³,dt`
//! (bits 0..6 of a monomial mask), the structural differential on
//! `P × I`, metric recovery from a 3-form, and the Hodge star.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::frame::{einstein_tensor, torsion, Connection, Frame};
use crate::liealg::StructureConstants;
use crate::mat3::{epsilon, Mat3, Tensor3};

pub const GENERATORS: usize = 7;
pub const BASIS_SIZE: usize = 1 << GENERATORS;
pub const TOP: usize = BASIS_SIZE - 1;
pub const DT: usize = 6;
/// Mask of the `e` generators.
pub const E_MASK: usize = 0b000_0111;
/// Mask of the `a` generators.
pub const A_MASK: usize = 0b011_1000;

pub type Metric7 = SMatrix<f64, 7, 7>;

const NAMES: [&str; GENERATORS] = ["e1", "e2", "e3", "a1", "a2", "a3", "dt"];

#[inline]
pub fn e_index(i: usize) -> usize {
    i
}

#[inline]
pub fn a_index(i: usize) -> usize {
    3 + i
}

#[inline]
fn degree(mask: usize) -> u32 {
    mask.count_ones()
}

/// Sign of `θ^m ∧ θ^n` against the sorted monomial `m | n` (assumes `m & n == 0`).
#[inline]
pub fn wedge_sign(m: usize, n: usize) -> f64 {
    let mut swaps = 0;
    let mut rest = n;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        swaps += (m >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coefficient table indexed by monomial bitmask.
#[derive(Clone, PartialEq)]
pub struct InvariantForm {
    c: [f64; BASIS_SIZE],
}

impl Default for InvariantForm {
    fn default() -> Self {
        InvariantForm { c: [0.0; BASIS_SIZE] }
    }
}

impl InvariantForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(v: f64) -> Self {
        Self::monomial(0, v)
    }

    pub fn monomial(mask: usize, coeff: f64) -> Self {
        let mut f = Self::zero();
        f.c[mask] = coeff;
        f
    }

    pub fn generator(g: usize) -> Self {
        Self::monomial(1 << g, 1.0)
    }

    pub fn e(i: usize) -> Self {
        Self::generator(e_index(i))
    }

    pub fn a(i: usize) -> Self {
        Self::generator(a_index(i))
    }

    pub fn dt() -> Self {
        Self::generator(DT)
    }

    /// `θ^{g_0} ∧ θ^{g_1} ∧ …` in the given order.
    pub fn product(gens: &[usize]) -> Self {
        gens.iter().fold(Self::scalar(1.0), |acc, g| acc.wedge(&Self::generator(*g)))
    }

    /// Reference volume `e¹∧e²∧e³∧a¹∧a²∧a³∧dt`.
    pub fn volume() -> Self {
        Self::monomial(TOP, 1.0)
    }

    /// `ê^b = ½ ε_{bjk} e^j∧e^k`.
    pub fn e_hat(b: usize) -> Self {
        let (j, k) = ((b + 1) % 3, (b + 2) % 3);
        Self::e(j).wedge(&Self::e(k))
    }

    /// `Σ_j v_j θ^j` over generator indices.
    pub fn linear(terms: &[(usize, f64)]) -> Self {
        let mut f = Self::zero();
        for (g, v) in terms {
            f.c[1 << g] += v;
        }
        f
    }

    pub fn coefficients(&self) -> &[f64; BASIS_SIZE] {
        &self.c
    }

    pub fn from_coefficients(c: [f64; BASIS_SIZE]) -> Self {
        InvariantForm { c }
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        self.c[mask]
    }

    pub fn set(&mut self, mask: usize, v: f64) {
        self.c[mask] = v;
    }

    /// Nonzero `(mask, coefficient)` pairs in mask order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.c.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(m, v)| (m, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| *v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn degree_part(&self, p: u32) -> Self {
        let mut f = Self::zero();
        for (m, v) in self.terms().filter(|(m, _)| degree(*m) == p) {
            f.c[m] = v;
        }
        f
    }

    /// Keeps monomials built only from generators in `allowed`.
    pub fn restrict(&self, allowed: usize) -> Self {
        let mut f = Self::zero();
        for (m, v) in self.terms().filter(|(m, _)| m & !allowed == 0) {
            f.c[m] = v;
        }
        f
    }

    /// Pullback to a fiber: only the `a` generators survive.
    pub fn fiber_restriction(&self) -> Self {
        self.restrict(A_MASK).degree_part_nonzero()
    }

    fn degree_part_nonzero(mut self) -> Self {
        self.c[0] = 0.0;
        self
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m, x) in self.terms() {
            for (n, y) in other.terms() {
                if m & n == 0 {
                    out.c[m | n] += wedge_sign(m, n) * x * y;
                }
            }
        }
        out
    }

    /// Interior product with the frame vector dual to generator `g`.
    pub fn contract(&self, g: usize) -> Self {
        let bit = 1 << g;
        let mut out = Self::zero();
        for (m, v) in self.terms().filter(|(m, _)| m & bit != 0) {
            let sign = if degree(m & (bit - 1)) % 2 == 0 { 1.0 } else { -1.0 };
            out.c[m ^ bit] += sign * v;
        }
        out
    }

    /// Coefficients after the change of generators `θ^i = Σ_a N[i][a] σ^a`,
    /// expressed against the `σ` monomials.
    pub fn linear_substitute(&self, n: &[[f64; GENERATORS]; GENERATORS]) -> Self {
        let mut out = Self::zero();
        for (m, v) in self.terms() {
            let rows = bits(m);
            for target in masks_of_degree(rows.len()) {
                let cols = bits(*target);
                let minor = small_det(rows.len(), |r, c| n[rows[r]][cols[c]]);
                out.c[*target] += v * minor;
            }
        }
        out
    }
}

fn bits(mask: usize) -> Vec<usize> {
    (0..GENERATORS).filter(|i| mask >> i & 1 == 1).collect()
}

fn masks_of_degree(p: usize) -> &'static [usize] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<Vec<usize>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = vec![Vec::new(); GENERATORS + 1];
        for m in 0..BASIS_SIZE {
            t[degree(m) as usize].push(m);
        }
        t
    });
    &table[p]
}

/// Determinant of a `p×p` matrix (`p ≤ 7`) by partial pivoting.
fn small_det(p: usize, entry: impl Fn(usize, usize) -> f64) -> f64 {
    let mut a = [[0.0; GENERATORS]; GENERATORS];
    for (r, row) in a.iter_mut().enumerate().take(p) {
        for (c, v) in row.iter_mut().enumerate().take(p) {
            *v = entry(r, c);
        }
    }
    let mut det = 1.0;
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for r in (col + 1)..p {
            let factor = a[r][col] / a[col][col];
            for c in col..p {
                a[r][c] -= factor * a[col][c];
            }
        }
    }
    det
}

impl fmt::Debug for InvariantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for InvariantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, v) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let name =
                if m == 0 { "1".to_string() } else { bits(m).iter().map(|g| NAMES[*g]).collect::<Vec<_>>().join("^") };
            write!(f, "{v}*{name}")?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for InvariantForm {
    type Output = InvariantForm;
    fn add(mut self, rhs: InvariantForm) -> InvariantForm {
        self += rhs;
        self
    }
}

impl AddAssign for InvariantForm {
    fn add_assign(&mut self, rhs: InvariantForm) {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
    }
}

impl Sub for InvariantForm {
    type Output = InvariantForm;
    fn sub(mut self, rhs: InvariantForm) -> InvariantForm {
        self -= rhs;
        self
    }
}

impl SubAssign for InvariantForm {
    fn sub_assign(&mut self, rhs: InvariantForm) {
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
    }
}

impl Neg for InvariantForm {
    type Output = InvariantForm;
    fn neg(self) -> InvariantForm {
        self * -1.0
    }
}

impl Mul<f64> for InvariantForm {
    type Output = InvariantForm;
    fn mul(mut self, s: f64) -> InvariantForm {
        self.c.iter_mut().for_each(|v| *v *= s);
        self
    }
}

type Terms = Vec<(usize, f64)>;

fn sparse(f: &InvariantForm) -> Terms {
    f.terms().collect()
}

/// Apply the derivation sending generator `g` to `images[g]`. Odd derivations
/// pick up `(−1)^q` when passing the first `q` factors of a monomial.
fn derivation(x: &InvariantForm, images: &[Terms; GENERATORS], odd: bool) -> InvariantForm {
    let mut out = InvariantForm::zero();
    for (m, v) in x.terms() {
        let mut passed = 0usize;
        let mut rest = m;
        while rest != 0 {
            let g = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let bit = 1 << g;
            let before = m & (bit - 1);
            let after = m & !(bit | (bit - 1));
            let outer = if odd && passed % 2 == 1 { -v } else { v };
            for (n, y) in &images[g] {
                if n & (before | after) != 0 {
                    continue;
                }
                let sign = wedge_sign(before, *n) * wedge_sign(before | n, after);
                out.c[before | n | after] += sign * outer * y;
            }
            passed += 1;
        }
    }
    out
}

/// Exterior derivative on invariant forms over `P × I`, assembled from the
/// torsion `T`, Einstein matrix `G` and the connection-in-frame `A·E⁻¹` at a
/// point, plus the time rates `∂_t e = P e` and `∂_t a = Q e`.
///
/// The `a`-generators carry the `SO(3)` fiber directions, so a form whose
/// coefficients are not rotation invariant picks up the correction
/// `−Σ_k ν^k ∧ D_k x`, with `ν^k = a^k − (A E⁻¹)_{kj} e^j` and `D_k` the
/// infinitesimal rotation of both generator triples.
#[derive(Clone, Debug)]
pub struct StructuralDifferential {
    torsion: Tensor3,
    einstein: Mat3,
    gauge: Mat3,
    frame_rate: Mat3,
    connection_rate: Mat3,
    spatial: [Terms; GENERATORS],
    temporal: [Terms; GENERATORS],
    rotation: [[Terms; GENERATORS]; 3],
    fiber: [InvariantForm; 3],
}

impl StructuralDifferential {
    pub fn new(frame: &Frame, conn: &Connection, c: &StructureConstants) -> Self {
        let curv = einstein_tensor(frame, conn, c);
        Self::from_parts(torsion(frame, conn, c), *curv.einstein(), conn.in_frame(frame))
    }

    pub fn from_parts(torsion: Tensor3, einstein: Mat3, gauge: Mat3) -> Self {
        let spatial = std::array::from_fn(|g| {
            let mut img = InvariantForm::zero();
            if g < 3 {
                let i = g;
                for j in 0..3 {
                    for k in 0..3 {
                        let eps = epsilon(i, j, k);
                        if eps != 0.0 {
                            img -= InvariantForm::a(j).wedge(&InvariantForm::e(k)) * eps;
                        }
                        img += InvariantForm::e(j).wedge(&InvariantForm::e(k)) * (0.5 * torsion[i][j][k]);
                    }
                }
            } else if g < 6 {
                let i = g - 3;
                for j in 0..3 {
                    for k in 0..3 {
                        let eps = epsilon(i, j, k);
                        if eps != 0.0 {
                            img -= InvariantForm::a(j).wedge(&InvariantForm::a(k)) * (0.5 * eps);
                        }
                    }
                }
                for b in 0..3 {
                    img += InvariantForm::e_hat(b) * einstein.0[i][b];
                }
            }
            sparse(&img)
        });
        let rotation = std::array::from_fn(|k| {
            std::array::from_fn(|g| {
                if g == DT {
                    return Vec::new();
                }
                let (i, offset) = (g % 3, g - g % 3);
                (0..3).filter(|j| epsilon(k, i, *j) != 0.0).map(|j| (1 << (offset + j), epsilon(k, i, j))).collect()
            })
        });
        let fiber = std::array::from_fn(|k| {
            let mut nu = InvariantForm::a(k);
            for j in 0..3 {
                nu.c[1 << e_index(j)] -= gauge.0[k][j];
            }
            nu
        });
        let mut sd = StructuralDifferential {
            torsion,
            einstein,
            gauge,
            frame_rate: Mat3::ZERO,
            connection_rate: Mat3::ZERO,
            spatial,
            temporal: Default::default(),
            rotation,
            fiber,
        };
        sd.set_rates(Mat3::ZERO, Mat3::ZERO);
        sd
    }

    /// Time rates `∂_t e^i = P_{ij} e^j` and `∂_t a^i = Q_{ij} e^j`.
    pub fn with_rates(mut self, frame_rate: Mat3, connection_rate: Mat3) -> Self {
        self.set_rates(frame_rate, connection_rate);
        self
    }

    fn set_rates(&mut self, p: Mat3, q: Mat3) {
        self.frame_rate = p;
        self.connection_rate = q;
        self.temporal = std::array::from_fn(|g| {
            let rate = match g {
                0..=2 => &p,
                3..=5 => &q,
                _ => return Vec::new(),
            };
            (0..3).filter(|j| rate.0[g % 3][*j] != 0.0).map(|j| (1 << e_index(j), rate.0[g % 3][j])).collect()
        });
    }

    pub fn torsion(&self) -> &Tensor3 {
        &self.torsion
    }

    pub fn einstein(&self) -> &Mat3 {
        &self.einstein
    }

    pub fn gauge(&self) -> &Mat3 {
        &self.gauge
    }

    pub fn frame_rate(&self) -> &Mat3 {
        &self.frame_rate
    }

    pub fn connection_rate(&self) -> &Mat3 {
        &self.connection_rate
    }

    /// Leibniz extension of the generator rules, with `dt ∧ ∂_t` where
    /// `∂_t` acts on generators through the rates and on coefficients
    /// through `coefficient_rate`.
    pub fn d_frame(&self, x: &InvariantForm, coefficient_rate: Option<&InvariantForm>) -> InvariantForm {
        let mut out = derivation(x, &self.spatial, true);
        let mut dx_dt = derivation(x, &self.temporal, false);
        if let Some(r) = coefficient_rate {
            dx_dt += r.clone();
        }
        out += InvariantForm::dt().wedge(&dx_dt);
        out
    }

    /// Exterior derivative of the invariant form `x` whose coefficients move
    /// in time at `coefficient_rate`.
    pub fn d_with_rate(&self, x: &InvariantForm, coefficient_rate: &InvariantForm) -> InvariantForm {
        self.d_impl(x, Some(coefficient_rate))
    }

    /// Exterior derivative with time-independent coefficients.
    pub fn d(&self, x: &InvariantForm) -> InvariantForm {
        self.d_impl(x, None)
    }

    fn d_impl(&self, x: &InvariantForm, rate: Option<&InvariantForm>) -> InvariantForm {
        let mut out = self.d_frame(x, rate);
        for (nu, rot) in self.fiber.iter().zip(self.rotation.iter()) {
            let dk = derivation(x, rot, false);
            if !dk.is_zero() {
                out -= nu.wedge(&dk);
            }
        }
        out
    }
}

/// Metric recovered from a 3-form, with the raw `det B` kept for
/// signature/orientation diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiMetric {
    pub metric: Metric7,
    pub det_b: f64,
}

impl PhiMetric {
    /// `(positive, negative)` eigenvalue counts.
    pub fn signature(&self) -> (usize, usize) {
        let ev = self.metric.symmetric_eigenvalues();
        let scale = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let pos = ev.iter().filter(|v| **v > 1e-12 * scale).count();
        let neg = ev.iter().filter(|v| **v < -1e-12 * scale).count();
        (pos, neg)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature() == (7, 0)
    }
}

/// `g = 6^{−2/9} B (det B)^{−1/9}` with `B_{ij} μ₀ = (ι_iφ)∧(ι_jφ)∧φ`.
///
/// The ninth root is the real one, so `det B < 0` still produces a metric; the
/// signature then tells the compact and split forms apart.
pub fn metric_from_phi(phi: &InvariantForm) -> Result<PhiMetric> {
    let phi3 = phi.degree_part(3);
    let contracted: Vec<InvariantForm> = (0..GENERATORS).map(|g| phi3.contract(g)).collect();
    let mut b = Metric7::zeros();
    for i in 0..GENERATORS {
        let left = contracted[i].wedge(&phi3);
        for j in i..GENERATORS {
            let v = contracted[j].wedge(&left).coeff(TOP);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    let det_b = b.determinant();
    let spectrum = b.symmetric_eigenvalues();
    let largest = spectrum.amax();
    let smallest = spectrum.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !det_b.is_finite() || largest == 0.0 || smallest <= 1e-12 * largest {
        return Err(Error::DegenerateForm(det_b));
    }
    let metric = b * (6f64.powf(-2.0 / 9.0) / det_b.cbrt().cbrt());
    Ok(PhiMetric { metric, det_b })
}

/// Hodge star of `x` for the positive-definite metric `g`, oriented by `μ₀`.
pub fn hodge_star(x: &InvariantForm, g: &Metric7) -> Result<InvariantForm> {
    let chol = g.cholesky().ok_or(Error::NotPositiveDefinite { what: "7-metric" })?;
    // σ = Lᵀ θ is orthonormal; θ = (Lᵀ)⁻¹ σ
    let lt = chol.l().transpose();
    let lt_inv = lt.try_inverse().ok_or(Error::NotPositiveDefinite { what: "7-metric" })?;
    let to_array = |m: &Metric7| -> [[f64; GENERATORS]; GENERATORS] {
        std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
    };
    let in_sigma = x.linear_substitute(&to_array(&lt_inv));
    let mut starred = InvariantForm::zero();
    for (m, v) in in_sigma.terms() {
        let complement = TOP ^ m;
        starred.c[complement] += wedge_sign(m, complement) * v;
    }
    Ok(starred.linear_substitute(&to_array(&lt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::levi_civita;
    use crate::liealg::Preset;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(i: usize) -> InvariantForm {
        InvariantForm::e(i)
    }
    fn a(i: usize) -> InvariantForm {
        InvariantForm::a(i)
    }

    // standard flat 3-form in the generator basis used throughout
    fn flat_phi() -> InvariantForm {
        let mut phi = InvariantForm::zero();
        for i in 0..3 {
            phi += a(i).wedge(&e(i)).wedge(&InvariantForm::dt());
        }
        phi -= e(0).wedge(&e(1)).wedge(&e(2));
        phi += e(0).wedge(&a(1)).wedge(&a(2));
        phi += e(1).wedge(&a(2)).wedge(&a(0));
        phi += e(2).wedge(&a(0)).wedge(&a(1));
        phi
    }

    fn random_form(rng: &mut ChaCha8Rng, max_degree: u32, with_dt: bool) -> InvariantForm {
        let mut f = InvariantForm::zero();
        for m in 0..BASIS_SIZE {
            if degree(m) <= max_degree && (with_dt || m & (1 << DT) == 0) {
                f.c[m] = rng.random_range(-1.0..1.0);
            }
        }
        f
    }

    fn random_mat(rng: &mut ChaCha8Rng, scale: f64) -> Mat3 {
        Mat3::from_fn(|_, _| rng.random_range(-scale..scale))
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(e(0).wedge(&e(1)), InvariantForm::monomial(0b11, 1.0));
        assert!(e(0).wedge(&e(0)).is_zero());
        let lhs = (e(0) + a(0)).wedge(&e(1).wedge(&e(2)));
        let rhs = InvariantForm::product(&[0, 1, 2]) + InvariantForm::product(&[3, 1, 2]);
        assert_eq!(lhs, rhs);
        assert_eq!(InvariantForm::product(&[3, 1, 2]).coeff(0b1110), 1.0);
        assert_eq!(e(1).wedge(&e(0)).coeff(0b11), -1.0);
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(e(0).wedge(&e(1)).contract(0), e(1));
        assert!(e(0).wedge(&e(1)).contract(3).is_zero());
        let vol = InvariantForm::product(&[0, 1, 2]);
        assert_eq!(vol.contract(1), -e(0).wedge(&e(2)));
    }

    #[test]
    fn structure_equation_for_e1() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let frame = Frame::identity();
        let lc = levi_civita(&frame, &su2).unwrap();
        let sd = StructuralDifferential::new(&frame, &lc, &su2);
        let expect = -(a(1).wedge(&e(2))) + a(2).wedge(&e(1));
        assert!((sd.d_frame(&e(0), None) - expect.clone()).max_abs() < 1e-15);
        // e¹ is rotated by the fiber, so the invariant d differs from the frame rule
        assert!((sd.d(&e(0)) - expect).max_abs() > 0.1);
    }

    #[test]
    fn volume_of_base_is_closed() {
        let su2 = StructureConstants::preset(Preset::Su2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let frame = Frame::new(Mat3::IDENTITY + random_mat(&mut rng, 0.3)).unwrap();
        let lc = levi_civita(&frame, &su2).unwrap();
        let sd = StructuralDifferential::new(&frame, &lc, &su2);
        let vol = InvariantForm::product(&[0, 1, 2]);
        assert!(sd.d(&vol).max_abs() < 1e-14);
        assert!(sd.d_frame(&vol, None).max_abs() < 1e-14);
    }

    /// `d` computed through the substitution `e = Eλ`, `a = Aλ + ρ` on the
    /// group times `SO(3)`, where `dλ^i = −½ c^i_{jk} λ^j∧λ^k` and the
    /// right-invariant fiber forms obey `dρ^i = ½ ε_{ijk} ρ^j∧ρ^k`.
    fn chevalley_eilenberg_d(
        x: &InvariantForm,
        e_mat: &Mat3,
        a_mat: &Mat3,
        c: &StructureConstants,
    ) -> (InvariantForm, [[f64; 7]; 7]) {
        // bits 0..2: λ, bits 3..5: ρ, bit 6: dt
        let mut n = [[0.0; 7]; 7];
        for i in 0..3 {
            for j in 0..3 {
                n[i][j] = e_mat.0[i][j];
                n[3 + i][j] = a_mat.0[i][j];
            }
            n[3 + i][3 + i] = 1.0;
        }
        n[6][6] = 1.0;
        let y = x.linear_substitute(&n);
        let mut images: [Terms; 7] = Default::default();
        for i in 0..3 {
            let mut dl = InvariantForm::zero();
            let mut dr = InvariantForm::zero();
            for j in 0..3 {
                for k in 0..3 {
                    let l = InvariantForm::generator(j).wedge(&InvariantForm::generator(k));
                    dl -= l * (0.5 * c.get(i, j, k));
                    let r = InvariantForm::generator(3 + j).wedge(&InvariantForm::generator(3 + k));
                    dr += r * (0.5 * epsilon(i, j, k));
                }
            }
            images[i] = sparse(&dl);
            images[3 + i] = sparse(&dr);
        }
        (derivation(&y, &images, true), n)
    }

    #[test]
    fn d_agrees_with_chevalley_eilenberg_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut bianchi_v = [[[0.0; 3]; 3]; 3];
        bianchi_v[1][0][1] = 0.5;
        bianchi_v[1][1][0] = -0.5;
        bianchi_v[2][0][2] = 0.5;
        bianchi_v[2][2][0] = -0.5;
        let groups = [
            StructureConstants::preset(Preset::Su2),
            StructureConstants::preset(Preset::Heisenberg),
            StructureConstants::preset(Preset::Abelian),
            StructureConstants::new(bianchi_v).unwrap(),
        ];
        for c in &groups {
            for _ in 0..3 {
                let frame = Frame::new(Mat3::IDENTITY + random_mat(&mut rng, 0.3)).unwrap();
                let conn = Connection(random_mat(&mut rng, 1.0));
                let sd = StructuralDifferential::new(&frame, &conn, c);
                let x = random_form(&mut rng, 3, false);
                let (oracle, n) = chevalley_eilenberg_d(&x, frame.matrix(), conn.matrix(), c);
                let ours = sd.d(&x).linear_substitute(&n);
                assert!((ours - oracle).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn d_squared_vanishes_but_not_for_frame_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = StructureConstants::preset(Preset::Su2);
        let frame = Frame::new(Mat3::IDENTITY + random_mat(&mut rng, 0.3)).unwrap();
        let sd = StructuralDifferential::new(&frame, &Connection(random_mat(&mut rng, 1.0)), &c);
        let x = random_form(&mut rng, 3, true);
        assert!(sd.d(&sd.d(&x)).max_abs() < 1e-10);
        assert!(sd.d_frame(&sd.d_frame(&x, None), None).max_abs() > 1e-3);
    }

    #[test]
    fn flat_metric_is_identity() {
        let pm = metric_from_phi(&flat_phi()).unwrap();
        assert!((pm.metric - Metric7::identity()).amax() < 1e-12);
        assert!((pm.det_b - 6f64.powi(7)).abs() < 1e-6);
        let scaled = metric_from_phi(&(flat_phi() * 8.0)).unwrap();
        assert!((scaled.metric - Metric7::identity() * 4.0).amax() < 1e-12);
    }

    #[test]
    fn degenerate_form_rejected() {
        let phi = InvariantForm::product(&[0, 1, 2]);
        assert!(matches!(metric_from_phi(&phi), Err(Error::DegenerateForm(_))));
    }

    #[test]
    fn hodge_examples() {
        let g = Metric7::identity();
        assert_eq!(hodge_star(&InvariantForm::scalar(1.0), &g).unwrap(), InvariantForm::volume());
        let star_e1 = hodge_star(&e(0), &g).unwrap();
        assert_eq!(star_e1, InvariantForm::product(&[1, 2, 3, 4, 5, 6]));
        assert!(hodge_star(&e(0), &(-Metric7::identity())).is_err());
    }

    #[test]
    fn hodge_pairing_defines_inner_product() {
        // α∧⋆β = ⟨α,β⟩ vol_g for 1-forms: ⟨θ^i, θ^j⟩ = g^{ij}
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = Metric7::from_fn(|_, _| rng.random_range(-0.3..0.3));
        let g = Metric7::identity() + m * m.transpose();
        let ginv = g.try_inverse().unwrap();
        let vol = g.determinant().sqrt();
        for i in 0..7 {
            for j in 0..7 {
                let top = InvariantForm::generator(i)
                    .wedge(&hodge_star(&InvariantForm::generator(j), &g).unwrap())
                    .coeff(TOP);
                assert!((top - ginv[(i, j)] * vol).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn wedge_is_graded_commutative_and_associative(seed in any::<u64>(), p in 0u32..4, q in 0u32..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_form(&mut rng, 7, true).degree_part(p);
            let y = random_form(&mut rng, 7, true).degree_part(q);
            let z = random_form(&mut rng, 2, true);
            let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((x.wedge(&y) - y.wedge(&x) * sign).max_abs() < 1e-12);
            prop_assert!((x.wedge(&y).wedge(&z) - x.wedge(&y.wedge(&z))).max_abs() < 1e-12);
        }

        #[test]
        fn d_obeys_leibniz(seed in any::<u64>(), p in 0u32..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = StructureConstants::preset(Preset::Heisenberg);
            let frame = Frame::new(Mat3::IDENTITY + random_mat(&mut rng, 0.3)).unwrap();
            let sd = StructuralDifferential::new(&frame, &Connection(random_mat(&mut rng, 1.0)), &c)
                .with_rates(random_mat(&mut rng, 1.0), random_mat(&mut rng, 1.0));
            let x = random_form(&mut rng, 7, true).degree_part(p);
            let y = random_form(&mut rng, 3, true);
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = sd.d(&x.wedge(&y));
            let rhs = sd.d(&x).wedge(&y) + x.wedge(&sd.d(&y)) * sign;
            prop_assert!((lhs - rhs).max_abs() < 1e-10);
        }

        #[test]
        fn star_is_an_involution(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_form(&mut rng, 7, true);
            let m = Metric7::from_fn(|_, _| rng.random_range(-0.3..0.3));
            let g = Metric7::identity() + m * m.transpose();
            let twice = hodge_star(&hodge_star(&x, &g).unwrap(), &g).unwrap();
            prop_assert!((twice - x.clone()).max_abs() < 1e-10 * (1.0 + x.max_abs()));
            let id = hodge_star(&hodge_star(&x, &Metric7::identity()).unwrap(), &Metric7::identity()).unwrap();
            prop_assert!((id - x).max_abs() < 1e-14);
        }

        #[test]
        fn contraction_is_an_antiderivation(seed in any::<u64>(), g in 0usize..7, p in 0u32..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_form(&mut rng, 7, true).degree_part(p);
            let y = random_form(&mut rng, 4, true);
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = x.wedge(&y).contract(g);
            let rhs = x.contract(g).wedge(&y) + x.wedge(&y.contract(g)) * sign;
            prop_assert!((lhs - rhs).max_abs() < 1e-12);
        }
    }
}

//! Structure constants `c^i_{jk}` of a 3-dimensional Lie algebra, stored as
//! `c[i][j][k]`, with the Maurer–Cartan convention `dλ^i = −½ c^i_{jk} λ^j∧λ^k`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mat3::{epsilon, Mat3, Tensor3, ZERO_TENSOR3};

const TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    Su2,
    Abelian,
    Heisenberg,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Su2, Preset::Abelian, Preset::Heisenberg];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Su2 => "su2",
            Preset::Abelian => "abelian",
            Preset::Heisenberg => "heisenberg",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "su2" | "su(2)" => Ok(Preset::Su2),
            "abelian" | "r3" => Ok(Preset::Abelian),
            "heisenberg" | "nil" => Ok(Preset::Heisenberg),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    c: Tensor3,
    name: Option<String>,
}

impl StructureConstants {
    /// Validates lower-index antisymmetry and the Jacobi identity.
    pub fn new(c: Tensor3) -> Result<Self> {
        let residual = jacobi_residual(&c)?;
        if residual > TOL {
            return Err(Error::Jacobi(residual));
        }
        Ok(StructureConstants { c, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn preset(p: Preset) -> Self {
        let mut c = ZERO_TENSOR3;
        match p {
            Preset::Su2 => {
                for (i, ci) in c.iter_mut().enumerate() {
                    for (j, cij) in ci.iter_mut().enumerate() {
                        for (k, v) in cij.iter_mut().enumerate() {
                            *v = epsilon(i, j, k);
                        }
                    }
                }
            }
            Preset::Abelian => {}
            Preset::Heisenberg => {
                c[0][1][2] = 1.0;
                c[0][2][1] = -1.0;
            }
        }
        StructureConstants { c, name: Some(p.name().to_string()) }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(Self::preset(name.parse()?))
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn tensor(&self) -> &Tensor3 {
        &self.c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[i][j][k]
    }

    /// Trace form `Σ_j c^j_{ij}`, zero for unimodular algebras.
    /// Non-unimodular algebra with `[X₁,X₂] = kX₂`, `[X₁,X₃] = kX₃`. Its
    /// identity frame has constant curvature `G = k²·I`.
    pub fn bianchi_v(k: f64) -> Self {
        let mut c = ZERO_TENSOR3;
        for j in [1, 2] {
            c[j][0][j] = k;
            c[j][j][0] = -k;
        }
        StructureConstants { c, name: Some("bianchi-v".to_string()) }
    }

    pub fn unimodularity(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.c[j][i][j]).sum();
        }
        out
    }

    pub fn is_unimodular(&self) -> bool {
        self.unimodularity().iter().all(|v| v.abs() <= TOL)
    }

    /// `d(v_i λ^i)` as an antisymmetric matrix `w` with the form equal to
    /// `½ w_{jk} λ^j∧λ^k`, so `w[j][k]` (j<k) is the coefficient on `λ^j∧λ^k`.
    pub fn maurer_cartan_d(&self, v: [f64; 3]) -> Mat3 {
        Mat3::from_fn(|j, k| -(0..3).map(|i| v[i] * self.c[i][j][k]).sum::<f64>())
    }

    /// Coefficient on `λ¹∧λ²∧λ³` of `d` applied to the 2-form `½ w_{jk} λ^j∧λ^k`.
    pub fn maurer_cartan_d2(&self, w: &Mat3) -> f64 {
        // d(λ^j∧λ^k) = dλ^j∧λ^k − λ^j∧dλ^k, with λ^m∧λ^n∧λ^k = ε_{mnk} λ¹²³
        let mut top = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                let wjk = w.0[j][k];
                if wjk == 0.0 {
                    continue;
                }
                let mut s = 0.0;
                for m in 0..3 {
                    for n in 0..3 {
                        s += -0.5 * self.c[j][m][n] * epsilon(m, n, k);
                        s -= -0.5 * self.c[k][m][n] * epsilon(j, m, n);
                    }
                }
                top += 0.5 * wjk * s;
            }
        }
        top
    }
}

/// Largest violation of the Jacobi identity
/// `c^m_{jk} c^i_{ml} + c^m_{kl} c^i_{mj} + c^m_{lj} c^i_{mk} = 0`.
pub fn jacobi_residual(c: &Tensor3) -> Result<f64> {
    let mut asym = 0.0_f64;
    for ci in c {
        for j in 0..3 {
            for k in 0..3 {
                asym = asym.max((ci[j][k] + ci[k][j]).abs());
            }
        }
    }
    if asym > TOL {
        return Err(Error::NotAntisymmetric(asym));
    }
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let s: f64 = (0..3)
                        .map(|m| c[m][j][k] * c[i][m][l] + c[m][k][l] * c[i][m][j] + c[m][l][j] * c[i][m][k])
                        .sum();
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    Ok(worst)
}

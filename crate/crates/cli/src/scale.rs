//! `scale-check`: rescale a base orbit and measure its residual against the `(−aH₁ + bH₂)` field.

use std::io::Write;

use g2flow::flow::{flow_field_residual, integrate, scale_map, ScaleParams};
use g2flow::HamiltonianCoeffs;

use crate::config::Prepared;
use crate::error::{CliError, CliResult};
use crate::table::{num, write_row};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleReport {
    pub params: ScaleParams,
    pub coeffs: HamiltonianCoeffs,
    /// `κβ⁻² − b`
    pub identity_b: f64,
    /// `κα²β − 2a`
    pub identity_a: f64,
    pub residual: f64,
    pub samples: usize,
}

/// The base orbit is always integrated under the default Hamiltonian, whatever the config's coefficients.
pub fn scale_check(p: &Prepared, kappa: f64, coeffs: HamiltonianCoeffs) -> CliResult<ScaleReport> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(CliError::argument("kappa", format!("must be positive, got {kappa}")));
    }
    let mut base_cfg = p.integration;
    base_cfg.coeffs = HamiltonianCoeffs::default();
    let base = integrate(&p.initial, &p.constants, &base_cfg)?;
    if let Some(stop) = base.stop {
        return Err(CliError::EarlyStop(format!("base orbit: {stop}")));
    }
    let (params, scaled) = scale_map(&base.samples, kappa, coeffs)?;
    let residual = flow_field_residual(&scaled, &p.constants, coeffs)?;
    Ok(ScaleReport {
        params,
        coeffs,
        identity_b: kappa / (params.beta * params.beta) - coeffs.b,
        identity_a: kappa * params.alpha * params.alpha * params.beta - 2.0 * coeffs.a,
        residual,
        samples: scaled.len(),
    })
}

pub fn write_report(r: &ScaleReport, out: &mut dyn Write) -> CliResult<()> {
    write_row(out, &["key", "value"])?;
    for (k, v) in [
        ("kappa", r.params.kappa),
        ("a", r.coeffs.a),
        ("b", r.coeffs.b),
        ("alpha", r.params.alpha),
        ("beta", r.params.beta),
        ("identity_b", r.identity_b),
        ("identity_a", r.identity_a),
        ("residual", r.residual),
    ] {
        write_row(out, &[k.to_string(), num(v)])?;
    }
    write_row(out, &["samples".to_string(), r.samples.to_string()])?;
    out.flush()?;
    Ok(())
}

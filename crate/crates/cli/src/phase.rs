//! `bs` and the reduced branch of `sweep`: phase-plane trajectories of the isotropic system.

use std::io::Write;

use g2flow::flow::{integrate, IntegrationConfig};
use g2flow::reduced::{constant_curvature_model, embed, integrate_reduced, ReducedState, ReducedTrajectory};
use g2flow::{Definiteness, Mat3};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::table::{num, write_row};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseRequest {
    pub sigma: f64,
    pub a0: f64,
    pub b0: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl PhaseRequest {
    fn validate(&self) -> CliResult<()> {
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(CliError::argument("a0", format!("must be positive, got {}", self.a0)));
        }
        for (arg, v) in [("sigma", self.sigma), ("b0", self.b0)] {
            if !v.is_finite() {
                return Err(CliError::argument(arg, "must be finite"));
            }
        }
        for (arg, v) in [("t-end", self.t_end), ("dt", self.dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::argument(arg, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn state(&self) -> ReducedState {
        ReducedState { a: self.a0, b: self.b0, sigma: self.sigma }
    }
}

pub const PHASE_COLUMNS: [&str; 6] = ["t", "a", "b", "x", "y", "regime"];
pub const COMPARE_COLUMNS: [&str; 2] = ["full_dev", "isotropy_dev"];

/// Per-sample deviation of the embedded full flow from the reduced one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    /// `max(|E/E₀ − a·I|, |S − b·I|)` entrywise.
    pub full_dev: f64,
    /// Largest trace-free part of `E·E₀⁻¹` or `S`.
    pub isotropy_dev: f64,
}

pub struct PhaseRun {
    pub reduced: ReducedTrajectory,
    pub comparison: Option<Vec<Comparison>>,
}

fn regime(b: f64) -> Definiteness {
    ReducedState { a: 1.0, b, sigma: 0.0 }.regime()
}

fn trace_free(m: &Mat3) -> f64 {
    (*m - Mat3::scalar(m.trace() / 3.0)).max_abs()
}

pub fn phase_run(req: &PhaseRequest, compare_full: bool) -> CliResult<PhaseRun> {
    req.validate()?;
    let reduced = integrate_reduced(&req.state(), req.dt, req.t_end)?;
    let comparison = if compare_full {
        let (c, e0) = constant_curvature_model(req.sigma)?;
        let initial = embed(&req.state(), &e0, &c)?;
        let full = integrate(&initial, &c, &IntegrationConfig::new(req.dt, req.t_end))?;
        let e0_inv = *e0.inverse();
        Some(
            full.samples
                .iter()
                .zip(&reduced.samples)
                .map(|(st, r)| {
                    let scaled = st.e * e0_inv;
                    Comparison {
                        full_dev: (scaled - Mat3::scalar(r.a)).max_abs().max((st.s - Mat3::scalar(r.b)).max_abs()),
                        isotropy_dev: trace_free(&scaled).max(trace_free(&st.s)),
                    }
                })
                .collect(),
        )
    } else {
        None
    };
    Ok(PhaseRun { reduced, comparison })
}

pub fn write_phase(run: &PhaseRun, prefix: &[String], out: &mut dyn Write) -> CliResult<()> {
    for (k, s) in run.reduced.samples.iter().enumerate() {
        let mut cells = prefix.to_vec();
        cells.extend([num(s.t), num(s.a), num(s.b), num(s.x()), num(s.y()), regime(s.b).as_str().to_string()]);
        if let Some(cmp) = &run.comparison {
            // the full flow may stop earlier than the reduced one
            match cmp.get(k) {
                Some(c) => cells.extend([num(c.full_dev), num(c.isotropy_dev)]),
                None => cells.extend([String::new(), String::new()]),
            }
        }
        write_row(out, &cells)?;
    }
    Ok(())
}

pub fn phase_header(compare_full: bool) -> Vec<String> {
    let mut cols: Vec<String> = PHASE_COLUMNS.map(String::from).to_vec();
    if compare_full {
        cols.extend(COMPARE_COLUMNS.map(String::from));
    }
    cols
}

/// `bs`: one reduced trajectory. Returns the breakdown time if `a` left the domain.
pub fn bs(req: &PhaseRequest, compare_full: bool, out: &mut dyn Write) -> CliResult<Option<f64>> {
    let run = phase_run(req, compare_full)?;
    write_row(out, &phase_header(compare_full))?;
    write_phase(&run, &[], out)?;
    out.flush()?;
    Ok(run.reduced.breakdown)
}

/// Reduced sweep over the Cartesian grid `sigmas × a0s × b0s`. Trajectories run
/// in parallel; each is buffered and written whole, in grid order.
pub fn sweep_reduced(
    sigmas: &[f64],
    a0s: &[f64],
    b0s: &[f64],
    t_end: f64,
    dt: f64,
    out: &mut dyn Write,
) -> CliResult<usize> {
    let grid: Vec<PhaseRequest> = sigmas
        .iter()
        .flat_map(|&sigma| {
            a0s.iter().flat_map(move |&a0| b0s.iter().map(move |&b0| PhaseRequest { sigma, a0, b0, t_end, dt }))
        })
        .collect();
    let buffers: Vec<CliResult<(Vec<u8>, bool)>> = grid
        .par_iter()
        .enumerate()
        .map(|(id, req)| {
            let run = phase_run(req, false)?;
            let mut buf = Vec::new();
            let prefix = [id.to_string(), num(req.sigma), num(req.a0), num(req.b0)];
            write_phase(&run, &prefix, &mut buf)?;
            Ok((buf, run.reduced.breakdown.is_some()))
        })
        .collect();
    let mut header = vec!["traj".to_string(), "sigma".into(), "a0".into(), "b0".into()];
    header.extend(phase_header(false));
    write_row(out, &header)?;
    let mut broken = 0;
    for b in buffers {
        let (bytes, stopped) = b?;
        out.write_all(&bytes)?;
        out.flush()?;
        broken += usize::from(stopped);
    }
    Ok(broken)
}

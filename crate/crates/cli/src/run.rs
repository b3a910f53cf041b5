//! `run`: integrate one configuration and emit the per-sample monitor table.

use std::io::Write;

use g2flow::adm::{adm_constraints, to_adm};
use g2flow::flow::{integrate, Monitor as SampleMonitor, StopReason, Trajectory};
use g2flow::g2::torsion_residual;
use g2flow::{Definiteness, FlowState};

use crate::config::{Monitor, MonitorSet, Prepared};
use crate::error::CliResult;
use crate::table::{num, opt, write_row};

const MATRIX_NAMES: [&str; 9] = ["11", "12", "13", "21", "22", "23", "31", "32", "33"];
const ADM_COLUMNS: [&str; 2] = ["adm_scalar", "adm_momentum_norm"];

pub fn header(monitors: &MonitorSet) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend(MATRIX_NAMES.iter().map(|n| format!("E{n}")));
    cols.extend(MATRIX_NAMES.iter().map(|n| format!("S{n}")));
    cols.extend(
        [
            "detE",
            "detS",
            "h",
            "h1",
            "h2",
            "h3",
            "constr1",
            "constr2",
            "constr3",
            "constr_norm",
            "dphi_norm",
            "dstarphi_norm",
            "definiteness",
        ]
        .map(String::from),
    );
    if monitors.contains(&Monitor::Adm) {
        cols.extend(ADM_COLUMNS.map(String::from));
    }
    cols
}

fn row(p: &Prepared, st: &FlowState, m: &SampleMonitor) -> CliResult<Vec<String>> {
    let on = |k: Monitor| p.monitors.contains(&k);
    let mut cells = vec![num(st.t)];
    let matrix = |cells: &mut Vec<String>, rows: [f64; 9]| {
        cells.extend(rows.iter().map(|v| if on(Monitor::State) { num(*v) } else { String::new() }))
    };
    matrix(&mut cells, st.e.to_row_major());
    matrix(&mut cells, st.s.to_row_major());
    let gated = |k: Monitor, v: f64| if on(k) { num(v) } else { String::new() };
    cells.push(gated(Monitor::State, m.det_e));
    cells.push(gated(Monitor::State, m.det_s));
    let d = m.densities;
    for v in [d.combined(p.integration.coeffs), d.h1, d.h2, d.h3] {
        cells.push(gated(Monitor::Hamiltonian, v));
    }
    for v in m.constraint {
        cells.push(gated(Monitor::Constraint, v));
    }
    cells.push(gated(Monitor::Constraint, m.constraint_norm()));
    // torsion is only meaningful where φ is a G₂-form
    let torsion = if on(Monitor::Torsion) && m.definiteness == Definiteness::PositiveDefinite {
        Some(torsion_residual(st, &p.constants, p.integration.coeffs)?)
    } else {
        None
    };
    cells.push(opt(torsion.map(|r| r.dphi)));
    cells.push(opt(torsion.map(|r| r.dstarphi)));
    cells.push(if on(Monitor::State) { m.definiteness.as_str().to_string() } else { String::new() });
    if on(Monitor::Adm) {
        let k = adm_constraints(&to_adm(st)?, &p.constants)?;
        cells.push(num(k.scalar));
        cells.push(num(k.momentum_norm()));
    }
    Ok(cells)
}

pub fn write_table(p: &Prepared, traj: &Trajectory, out: &mut dyn Write) -> CliResult<()> {
    write_row(out, &header(&p.monitors))?;
    for (st, m) in traj.samples.iter().zip(&traj.monitors) {
        write_row(out, &row(p, st, m)?)?;
    }
    out.flush()?;
    Ok(())
}

/// Integrates and writes the table; the early-stop reason, if any, is returned.
pub fn run(p: &Prepared, out: &mut dyn Write) -> CliResult<Option<StopReason>> {
    let traj = integrate(&p.initial, &p.constants, &p.integration)?;
    write_table(p, &traj, out)?;
    Ok(traj.stop)
}

//! `selftest`: a fast pass over the core invariants with per-suite counts.

use std::io::Write;

use g2flow::adm::{from_adm, to_adm, AdmState};
use g2flow::flow::{hamiltonian_densities, hamiltonian_vector, integrate, omega_pairing, IntegrationConfig, Tangent};
use g2flow::forms::{InvariantForm, StructuralDifferential, BASIS_SIZE};
use g2flow::frame::{levi_civita, project_divergence_free, torsion_norm};
use g2flow::g2::torsion_residual;
use g2flow::liealg::Preset;
use g2flow::reduced::closed_form_sigma0;
use g2flow::{Connection, FlowState, Frame, HamiltonianCoeffs, Mat3, StructureConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    /// Description of the first failing check.
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

struct Suite {
    name: &'static str,
    passed: usize,
    total: usize,
    first_failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite { name, passed: 0, total: 0, first_failure: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    fn check_result<T>(&mut self, r: g2flow::Result<T>, pass: impl FnOnce(&T) -> Result<(), String>) {
        match r {
            Ok(v) => {
                let res = pass(&v);
                self.check(res.is_ok(), || res.unwrap_err());
            }
            Err(e) => self.check(false, || e.to_string()),
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult { name: self.name, passed: self.passed, total: self.total, first_failure: self.first_failure }
    }
}

fn within(label: &str, value: f64, tol: f64) -> Result<(), String> {
    if value <= tol {
        Ok(())
    } else {
        Err(format!("{label} = {value:.3e} exceeds {tol:.0e}"))
    }
}

fn random_mat(rng: &mut ChaCha8Rng, scale: f64) -> Mat3 {
    Mat3::from_fn(|_, _| rng.random_range(-scale..scale))
}

fn random_frame(rng: &mut ChaCha8Rng) -> Frame {
    loop {
        if let Ok(f) = Frame::new(Mat3::IDENTITY + random_mat(rng, 0.2)) {
            return f;
        }
    }
}

fn structure_constants() -> SuiteResult {
    let mut s = Suite::new("structure constants");
    for p in Preset::ALL {
        let c = StructureConstants::preset(p);
        s.check_result(StructureConstants::new(*c.tensor()), |_| Ok(()));
        s.check(c.is_unimodular(), || format!("{p} is not unimodular"));
    }
    s.finish()
}

fn d_squared(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("d∘d = 0");
    for p in Preset::ALL {
        let c = StructureConstants::preset(p);
        for _ in 0..4 {
            let frame = random_frame(rng);
            let sd = StructuralDifferential::new(&frame, &Connection(random_mat(rng, 1.0)), &c);
            let x = InvariantForm::from_coefficients(std::array::from_fn::<f64, BASIS_SIZE, _>(|_| {
                rng.random_range(-1.0..1.0)
            }));
            let dd = sd.d(&sd.d(&x)).max_abs();
            s.check(dd <= 1e-10, || format!("{p}: |d∘d x| = {dd:.3e}"));
        }
    }
    s.finish()
}

fn levi_civita_torsion(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("Levi-Civita torsion");
    for p in Preset::ALL {
        let c = StructureConstants::preset(p);
        for _ in 0..5 {
            let frame = random_frame(rng);
            s.check_result(levi_civita(&frame, &c), |lc| {
                within(&format!("{p} torsion"), torsion_norm(&frame, lc, &c), 1e-12)
            });
        }
    }
    s.finish()
}

fn symplectic_gradient(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("symplectic gradient");
    for k in 0..9 {
        let c = StructureConstants::preset(Preset::ALL[k % 3]);
        let st = FlowState::new(*random_frame(rng).matrix(), Mat3::IDENTITY + random_mat(rng, 0.4).symmetrized());
        let z = Tangent { t: random_mat(rng, 1.0).symmetrized(), v: random_mat(rng, 1.0).symmetrized() };
        s.check_result(st, |st| {
            let xh = hamiltonian_vector(st, &c, HamiltonianCoeffs::default()).map_err(|e| e.to_string())?;
            let pairing = omega_pairing(&xh, &z, st.det_e());
            let vel = z.velocity(st);
            let h = |eps: f64| {
                let moved = FlowState { e: st.e + vel.de * eps, s: st.s + vel.ds * eps, t: 0.0 };
                hamiltonian_densities(&moved, &c).map(|d| d.h).unwrap_or(f64::NAN)
            };
            let step = 1e-3;
            let fd = (h(-2.0 * step) - 8.0 * h(-step) + 8.0 * h(step) - h(2.0 * step)) / (12.0 * step);
            within("relative gradient error", (pairing - fd).abs() / pairing.abs().max(fd.abs()).max(1e-3), 1e-6)
        });
    }
    s.finish()
}

fn constraint_preservation(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("constraint preservation");
    for p in [Preset::Su2, Preset::Heisenberg] {
        let c = StructureConstants::preset(p);
        let frame = random_frame(rng);
        let r = levi_civita(&frame, &c).and_then(|lc| {
            let s0 = project_divergence_free(&(Mat3::IDENTITY + random_mat(rng, 0.15).symmetrized()), &frame, &lc);
            integrate(&FlowState::new(*frame.matrix(), s0.symmetrized())?, &c, &IntegrationConfig::new(1e-2, 0.3))
        });
        s.check_result(r, |traj| {
            let worst = traj.monitors.iter().map(|m| m.constraint_norm()).fold(0.0, f64::max);
            within(&format!("{p} constraint drift"), worst, 1e-8)
        });
    }
    s.finish()
}

fn torsion_free(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("torsion-free G2");
    let su2 = StructureConstants::preset(Preset::Su2);
    let iso = FlowState::new(Mat3::IDENTITY, Mat3::IDENTITY);
    s.check_result(iso.and_then(|st| torsion_residual(&st, &su2, HamiltonianCoeffs::default())), |r| {
        within("isotropic su2 torsion", r.max(), 1e-8)
    });
    let frame = random_frame(rng);
    let st = levi_civita(&frame, &su2).and_then(|lc| {
        let s0 = project_divergence_free(&(Mat3::IDENTITY + random_mat(rng, 0.1).symmetrized()), &frame, &lc);
        FlowState::new(*frame.matrix(), s0.symmetrized())
    });
    s.check_result(st.and_then(|st| torsion_residual(&st, &su2, HamiltonianCoeffs::default())), |r| {
        within("constrained su2 torsion", r.max(), 1e-8)
    });
    s.finish()
}

fn round_trips(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut s = Suite::new("ADM round trip");
    for _ in 0..10 {
        let m = random_mat(rng, 1.0);
        let adm = AdmState { gamma: Mat3::scalar(0.5) + m * m.transpose(), pi: random_mat(rng, 1.0).symmetrized() };
        s.check_result(from_adm(&adm).and_then(|st| to_adm(&st)), |back| {
            within("round trip", (back.gamma - adm.gamma).max_abs().max((back.pi - adm.pi).max_abs()), 1e-12)
        });
    }
    s.finish()
}

fn closed_form() -> SuiteResult {
    let mut s = Suite::new("closed-form orbit");
    let ab = StructureConstants::preset(Preset::Abelian);
    let traj = FlowState::new(Mat3::IDENTITY, Mat3::IDENTITY)
        .and_then(|st| integrate(&st, &ab, &IntegrationConfig::new(1e-3, 1.0)));
    s.check_result(traj, |traj| {
        let (a, b) = closed_form_sigma0(1.0, 1.0, 1.0).map_err(|e| e.to_string())?;
        let last = traj.last().ok_or("empty trajectory")?;
        within(
            "closed-form error",
            (last.e - Mat3::scalar(a)).max_abs().max((last.s - Mat3::scalar(b)).max_abs()),
            1e-8,
        )
    });
    s.finish()
}

pub fn run_suites(seed: u64) -> Vec<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        structure_constants(),
        d_squared(&mut rng),
        levi_civita_torsion(&mut rng),
        symplectic_gradient(&mut rng),
        constraint_preservation(&mut rng),
        torsion_free(&mut rng),
        round_trips(&mut rng),
        closed_form(),
    ]
}

/// Prints one line per suite; fails naming every suite with a failing check.
pub fn selftest(seed: u64, out: &mut dyn Write) -> CliResult<()> {
    let results = run_suites(seed);
    for r in &results {
        let status = if r.ok() { "ok" } else { "FAIL" };
        match &r.first_failure {
            Some(msg) => writeln!(out, "{status:4} {:<26} {}/{}  first failure: {msg}", r.name, r.passed, r.total)?,
            None => writeln!(out, "{status:4} {:<26} {}/{}", r.name, r.passed, r.total)?,
        }
    }
    out.flush()?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.ok()).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SelfTest(failed.join(", ")))
    }
}

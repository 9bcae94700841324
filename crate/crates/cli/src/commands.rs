//! One function per subcommand. Each builds a [`Document`]; a command that
//! produced a document but must still exit non-zero (failed hard checks)
//! returns it alongside the failure.

use kpgm::spectrum::{energy_table, thermo_coefficients};
use kpgm::thermo::{default_lambda, sweep_thermo};
use kpgm::validation::{validate, Severity, ValidationOptions};
use kpgm::wavefunction::{default_grid, sample_states};
use kpgm::{KpgmError, NormMode, QuantumNumbers};

use crate::config::{fmt_f64, RunConfig};
use crate::output::{Cell, Document};

pub const ENERGY_COLUMNS: [&str; 5] = ["n", "ell", "E_eq13", "E_eq23", "nu_residual"];
pub const WAVE_COLUMNS: [&str; 5] = ["n", "ell", "r", "psi", "rho"];
pub const THERMO_COLUMNS: [&str; 9] = ["beta", "lam", "path", "Z_re", "Z_im", "U", "C", "S", "F"];
pub const VALIDATE_COLUMNS: [&str; 6] = ["check", "severity", "passed", "measured", "tolerance", "detail"];

/// Outcome of a command: the document to write and, for `validate`, whether
/// any hard check failed.
pub struct Outcome {
    pub document: Document,
    pub failure: Option<String>,
}

impl From<Document> for Outcome {
    fn from(document: Document) -> Self {
        Outcome { document, failure: None }
    }
}

fn states(cfg: &RunConfig) -> Vec<QuantumNumbers> {
    cfg.states.iter().map(|&n| QuantumNumbers::new(n, cfg.ell)).collect()
}

/// Both energy forms and the NU-condition residual at the first; the
/// residual is `NaN` for levels above the asymptote.
pub fn energies(cfg: &RunConfig) -> Result<Outcome, KpgmError> {
    let rows = energy_table(&cfg.molecule, &states(cfg))?;
    let mut doc = Document::new("energies", cfg.sha256(), ENERGY_COLUMNS.to_vec());
    doc.meta.push(("name".into(), cfg.molecule.name.replace(' ', "_")));
    for r in rows {
        doc.rows.push(vec![
            Cell::Int(r.n.into()),
            Cell::Int(r.ell.into()),
            Cell::Float(r.e_eq13),
            Cell::Float(r.e_eq23),
            Cell::Float(r.nu_residual.unwrap_or(f64::NAN)),
        ]);
    }
    Ok(doc.into())
}

/// Radial samples on the default grid: 100 log-spaced points on
/// `[0.01, 1]/alpha` and 500 linear points on `[1, 15]/alpha`, state-major.
pub fn wavefunction(cfg: &RunConfig) -> Result<Outcome, KpgmError> {
    let grid = default_grid(cfg.molecule.alpha);
    let samples = sample_states(&grid, &states(cfg), &cfg.molecule, cfg.norm)?;
    let mut doc = Document::new("wavefunction", cfg.sha256(), WAVE_COLUMNS.to_vec());
    let norm = match cfg.norm {
        NormMode::Quadrature => "quadrature",
        NormMode::Closed => "closed",
    };
    doc.meta.push(("norm".into(), norm.into()));
    doc.meta.push(("points".into(), grid.len().to_string()));
    for s in samples {
        doc.rows.push(vec![
            Cell::Int(s.n.into()),
            Cell::Int(s.ell.into()),
            Cell::Float(s.r),
            Cell::Float(s.psi),
            Cell::Float(s.rho),
        ]);
    }
    Ok(doc.into())
}

/// Thermodynamic sweep over the configured `beta` grid, once per level cap.
pub fn thermo(cfg: &RunConfig) -> Result<Outcome, KpgmError> {
    let coeffs = thermo_coefficients(&cfg.molecule, cfg.ell)?;
    let lams = cfg.lams().unwrap_or_else(|| vec![default_lambda(&coeffs, cfg.path)]);
    let betas = cfg.betas();
    let mut doc = Document::new("thermo", cfg.sha256(), THERMO_COLUMNS.to_vec());
    let lam_text: Vec<String> = lams.iter().map(|&l| fmt_f64(l)).collect();
    doc.meta.push(("path".into(), cfg.path.as_str().into()));
    doc.meta.push(("lam".into(), lam_text.join(";")));
    doc.meta.push(("n_max".into(), fmt_f64(coeffs.n_max)));
    for lam in lams {
        for p in sweep_thermo(&cfg.molecule, cfg.ell, &betas, cfg.path, Some(lam))? {
            doc.rows.push(vec![
                Cell::Float(p.beta),
                Cell::Float(p.lam),
                Cell::Text(p.path.as_str().into()),
                Cell::Float(p.z_re),
                Cell::Float(p.z_im),
                Cell::Float(p.u),
                Cell::Float(p.c),
                Cell::Float(p.s),
                Cell::Float(p.f),
            ]);
        }
    }
    Ok(doc.into())
}

/// Full oracle suite. Levels compared against finite differences are the
/// configured `states`; rotational numbers are 0, 1 and the configured `ell`.
pub fn validate_cmd(cfg: &RunConfig, corrupt_q2: bool) -> Result<Outcome, KpgmError> {
    let mut ells = vec![0, 1, cfg.ell];
    ells.sort_unstable();
    ells.dedup();
    let opts = ValidationOptions {
        ells,
        levels: cfg.states.clone(),
        corrupt_q2,
        ..ValidationOptions::default()
    };
    let report = validate(&cfg.molecule, &opts)?;
    let mut doc = Document::new("validate", cfg.sha256(), VALIDATE_COLUMNS.to_vec());
    doc.meta.push(("passed".into(), report.passed().to_string()));
    if corrupt_q2 {
        doc.meta.push(("corrupt_q2".into(), "true".into()));
    }
    doc.notes = report.findings.clone();
    for c in &report.checks {
        doc.rows.push(vec![
            Cell::Text(c.name.clone()),
            Cell::Text(
                match c.severity {
                    Severity::Hard => "hard",
                    Severity::Soft => "soft",
                }
                .into(),
            ),
            Cell::Bool(c.passed),
            Cell::Float(c.measured),
            Cell::Float(c.tolerance),
            Cell::Text(c.detail.clone()),
        ]);
    }
    let failure = kpgm::validation::require(&report).err().map(|e| e.to_string());
    Ok(Outcome { document: doc, failure })
}

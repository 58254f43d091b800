//! End-to-end run: load fixtures, solve for states, extract transition
//! moments, and write energy, dipole and `H_const` tables plus a JSON summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Fixture, Method, RunConfig};
use crate::fermion::SymmetryOperators;
use crate::format::{short, sig17};
use crate::fsc::{self, FscPair, PairKind, TransitionMatrix};
use crate::oracle::{self, degenerate_groups, exact_transition_moments, log_error, SpectrumReference};
use crate::pauli::{PauliSum, Units};
use crate::statevector::StateVector;
use crate::vqe::{self, SpectrumSettings, VqeResult};
use crate::{Error, Result};

/// Debye per atomic unit of dipole moment.
pub const DEBYE_PER_AU: f64 = 2.5417464;

/// Atomic units to Debye.
pub fn convert_units(au: f64) -> f64 {
    au * DEBYE_PER_AU
}

/// Debye to atomic units.
pub fn debye_to_au(debye: f64) -> f64 {
    debye / DEBYE_PER_AU
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateInfo {
    pub index: usize,
    pub label: String,
    pub electrons: usize,
    pub sz: f64,
    pub s2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub method: String,
    pub state: usize,
    pub label: String,
    pub energy: f64,
    /// Exact eigenvalue of the matching sector state, when the oracle ran.
    pub reference: Option<f64>,
    /// `log10|E − reference|`; `None` when exact or without a reference.
    pub log_error: Option<f64>,
    pub converged: bool,
    pub iterations: Option<usize>,
    pub gradient_norm: Option<f64>,
    /// `⟨N⟩, ⟨Sz⟩, ⟨S²⟩` of the state.
    pub symmetry: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipoleCell {
    pub j: usize,
    pub k: usize,
    pub debye: Option<f64>,
    pub converged: bool,
    pub degenerate: bool,
    pub symmetry_forbidden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockInvariant {
    pub members: Vec<usize>,
    pub frobenius_debye: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DipoleTable {
    /// `fsc`, `vqd` and `ssvqe` (direct contraction) or `oracle`.
    pub method: String,
    pub cells: Vec<DipoleCell>,
    pub degenerate_blocks: Vec<BlockInvariant>,
}

impl DipoleTable {
    pub fn debye(&self, j: usize, k: usize) -> Option<f64> {
        let (j, k) = if j <= k { (j, k) } else { (k, j) };
        self.cells.iter().find(|c| c.j == j && c.k == k).and_then(|c| c.debye)
    }

    fn converged(&self) -> bool {
        self.cells.iter().all(|c| c.converged)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HConstRow {
    pub j: usize,
    pub k: usize,
    pub kind: PairKind,
    pub h_const: Option<f64>,
    pub fidelity: Option<f64>,
    pub phase_fidelity: Option<f64>,
    /// Evaluation function `a(H) + b(H) + H_const` at the trained operator.
    pub evaluation: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub hamiltonian: String,
    pub qubits: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    pub states: Vec<StateInfo>,
    pub energies: Vec<EnergyRow>,
    pub transition_dipoles: Vec<DipoleTable>,
    pub h_const: Vec<HConstRow>,
    /// Stages flagged unconverged, e.g. `vqd state 2` or `fsc pair 0-3`.
    pub unconverged: Vec<String>,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub summary: Summary,
    /// Files written, relative to the output directory.
    pub files: Vec<PathBuf>,
    pub output: PathBuf,
}

struct Context {
    fixture: Fixture,
    symmetry: SymmetryOperators,
}

impl Context {
    fn dipole_scale(&self) -> f64 {
        // Components share units; Debye input passes through.
        if self.fixture.dipole[0].units == Units::Debye {
            1.0
        } else {
            DEBYE_PER_AU
        }
    }

    fn symmetry_of(&self, state: &StateVector) -> Result<[f64; 3]> {
        Ok([
            state.expectation(&self.symmetry.number)?,
            state.expectation(&self.symmetry.sz)?,
            state.expectation(&self.symmetry.s2)?,
        ])
    }

    fn sector_operators(&self) -> Vec<PauliSum> {
        vec![self.symmetry.number.clone(), self.symmetry.sz.clone()]
    }
}

/// Validates the config and fixtures without running anything expensive.
pub fn validate(config: &RunConfig) -> Result<Fixture> {
    config.check()?;
    let fixture = config.load_fixture()?;
    for op in [&fixture.hamiltonian, &fixture.number, &fixture.sz, &fixture.s2]
        .into_iter()
        .chain(fixture.dipole.iter())
    {
        if !op.is_hermitian() {
            return Err(Error::NotHermitian(op.label.clone()));
        }
    }
    Ok(fixture)
}

/// Runs every configured method and writes the tables into `config.output`.
pub fn run(config: &RunConfig) -> Result<Report> {
    let fixture = validate(config)?;
    let symmetry = SymmetryOperators {
        number: fixture.number.clone(),
        sz: fixture.sz.clone(),
        s2: fixture.s2.clone(),
    };
    let ctx = Context {
        fixture,
        symmetry,
    };
    let has = |m| config.methods.contains(&m);
    let h = &ctx.fixture.hamiltonian;
    let targets = &config.targets;
    let mut unconverged = Vec::new();

    let reference = if has(Method::Oracle) {
        let spectrum = oracle::diagonalize_with(h, Some(&ctx.symmetry))?;
        let indices = spectrum.select(targets)?;
        Some((spectrum, indices))
    } else {
        None
    };
    let reference_energy = |j: usize| reference.as_ref().map(|(s, idx)| s.eigenvalues[idx[j]]);

    let mut energies = Vec::new();
    let mut traces: Vec<(String, String)> = Vec::new();
    let mut tables = Vec::new();
    let mut energy_rows = |method: &str, results: &[VqeResult], out: &mut Vec<EnergyRow>| -> Result<()> {
        for (j, r) in results.iter().enumerate() {
            let reference = reference_energy(j);
            out.push(EnergyRow {
                method: method.to_string(),
                state: j,
                label: config.labels[j].clone(),
                energy: r.energy,
                reference,
                log_error: reference.map(|e| log_error(r.energy, e)).filter(|v| v.is_finite()),
                converged: r.converged,
                iterations: r.trace.last().map(|t| t.iteration),
                gradient_norm: Some(r.gradient_norm),
                symmetry: ctx.symmetry_of(&r.state)?,
            });
            if !r.converged {
                unconverged.push(format!("{method} state {j}"));
            }
            if config.trace {
                traces.push((format!("traces/{method}_state{j}.csv"), r.trace_csv()));
            }
        }
        Ok(())
    };

    let vqd = if has(Method::Vqd) {
        let settings = SpectrumSettings {
            uccsd_depth: config.uccsd_depth,
            ham_depth: config.ham_depth,
            penalty_weight: config.penalty_weight,
            deflation_weight: config.deflation_weight,
        };
        let results = vqe::solve_spectrum(h, &ctx.symmetry, targets, &settings, &config.optimizer)?;
        energy_rows("vqd", &results, &mut energies)?;
        Some(results)
    } else {
        None
    };

    let ssvqe = if has(Method::Ssvqe) {
        let refs = vqe::ssvqe_references(h, &ctx.symmetry, targets)?;
        let (_, circuit) = vqe::sector_ansatz(h, &targets[0], config.uccsd_depth, config.ham_depth)?;
        let weights = vqe::default_ssvqe_weights(targets.len());
        let results = vqe::ssvqe(h, &refs, &weights, &circuit, &config.optimizer)?;
        energy_rows("ssvqe", &results, &mut energies)?;
        Some(results)
    } else {
        None
    };

    if let Some((spectrum, indices)) = &reference {
        for (j, &i) in indices.iter().enumerate() {
            let state = spectrum.state(i)?;
            energies.push(EnergyRow {
                method: "oracle".into(),
                state: j,
                label: config.labels[j].clone(),
                energy: spectrum.eigenvalues[i],
                reference: Some(spectrum.eigenvalues[i]),
                log_error: None,
                converged: true,
                iterations: None,
                gradient_norm: None,
                symmetry: ctx.symmetry_of(&state)?,
            });
        }
    }

    let mut h_const = Vec::new();
    if let (true, Some(results)) = (has(Method::Fsc), &vqd) {
        let states: Vec<StateVector> = results.iter().map(|r| r.state.clone()).collect();
        let values: Vec<f64> = results.iter().map(|r| r.energy).collect();
        let settings = config.fsc.settings();
        let templates = targets
            .iter()
            .map(|t| vqe::sector_ansatz(h, t, settings.uccsd_depth, settings.ham_depth).map(|(_, c)| c))
            .collect::<Result<Vec<_>>>()?;
        let sectors = ctx.sector_operators();
        let pairs = fsc::train_pairs(&states, h, &sectors, &templates, &settings, &config.optimizer)?;
        for p in &pairs {
            if !p.converged {
                unconverged.push(format!("fsc pair {}-{}", p.j, p.k));
            }
            h_const.push(h_const_row(p));
        }
        let matrix = fsc::transition_matrix(
            "dipole",
            &states,
            &values,
            &ctx.fixture.dipole,
            &sectors,
            fsc::Method::Fsc(&pairs),
        )?;
        let table = dipole_table("fsc", &matrix, &ctx);
        if !table.converged() {
            unconverged.push("fsc dipole table".into());
        }
        tables.push(table);
    }

    if has(Method::Direct) {
        for (method, results) in [("vqd", &vqd), ("ssvqe", &ssvqe)] {
            let Some(results) = results else { continue };
            let states: Vec<StateVector> = results.iter().map(|r| r.state.clone()).collect();
            let values: Vec<f64> = results.iter().map(|r| r.energy).collect();
            let matrix = fsc::transition_matrix(
                "dipole",
                &states,
                &values,
                &ctx.fixture.dipole,
                &ctx.sector_operators(),
                fsc::Method::Direct,
            )?;
            tables.push(dipole_table(method, &matrix, &ctx));
        }
    }

    if let Some((spectrum, indices)) = &reference {
        if targets.len() >= 2 {
            tables.push(oracle_table(spectrum, indices, &ctx)?);
        }
    }

    let summary = Summary {
        hamiltonian: h.label.clone(),
        qubits: h.num_qubits(),
        seed: config.optimizer.seed,
        methods: config.methods.iter().map(|m| m.to_string()).collect(),
        states: targets
            .iter()
            .enumerate()
            .map(|(index, t)| StateInfo {
                index,
                label: config.labels[index].clone(),
                electrons: t.electrons,
                sz: t.sz,
                s2: t.s2,
            })
            .collect(),
        energies,
        transition_dipoles: tables,
        h_const,
        converged: unconverged.is_empty(),
        unconverged,
    };
    let files = write_outputs(&config.output, &summary, &config.labels, &traces)?;
    Ok(Report {
        summary,
        files,
        output: config.output.clone(),
    })
}

fn h_const_row(p: &FscPair) -> HConstRow {
    HConstRow {
        j: p.j,
        k: p.k,
        kind: p.kind,
        h_const: p.h_const,
        fidelity: p.transfer.as_ref().map(|t| t.fidelity),
        phase_fidelity: p.phase.as_ref().map(|t| t.fidelity),
        evaluation: p.evaluation,
        converged: p.converged,
    }
}

fn dipole_table(method: &str, matrix: &TransitionMatrix, ctx: &Context) -> DipoleTable {
    let scale = ctx.dipole_scale();
    let cells = matrix
        .cells
        .iter()
        .map(|c| DipoleCell {
            j: c.j,
            k: c.k,
            debye: c.magnitude.map(|v| v * scale),
            converged: c.converged,
            degenerate: c.degenerate,
            symmetry_forbidden: c.symmetry_forbidden,
        })
        .collect();
    let blocks = degenerate_blocks_of(matrix)
        .into_iter()
        .map(|members| BlockInvariant {
            frobenius_debye: matrix.block_frobenius(&members).map(|v| v * scale),
            members,
        })
        .collect();
    DipoleTable {
        method: method.to_string(),
        cells,
        degenerate_blocks: blocks,
    }
}

/// Connected groups of states linked by degenerate cells.
fn degenerate_blocks_of(matrix: &TransitionMatrix) -> Vec<Vec<usize>> {
    let mut group: Vec<usize> = (0..matrix.m).collect();
    for c in matrix.cells.iter().filter(|c| c.degenerate) {
        let (a, b) = (group[c.j], group[c.k]);
        let keep = a.min(b);
        for g in group.iter_mut() {
            if *g == a || *g == b {
                *g = keep;
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for root in 0..matrix.m {
        let members: Vec<usize> = (0..matrix.m).filter(|&i| group[i] == root).collect();
        if members.len() > 1 {
            out.push(members);
        }
    }
    out
}

fn oracle_table(spectrum: &SpectrumReference, indices: &[usize], ctx: &Context) -> Result<DipoleTable> {
    let scale = ctx.dipole_scale();
    let moments = exact_transition_moments(spectrum, &ctx.fixture.dipole, indices)?;
    let energies: Vec<f64> = indices.iter().map(|&i| spectrum.eigenvalues[i]).collect();
    let m = indices.len();
    let mut cells = Vec::new();
    for j in 0..m {
        for k in j + 1..m {
            cells.push(DipoleCell {
                j,
                k,
                debye: Some(moments.magnitudes[j][k] * scale),
                converged: true,
                degenerate: (energies[j] - energies[k]).abs() < oracle::DEGENERACY_TOLERANCE,
                symmetry_forbidden: false,
            });
        }
    }
    let groups = degenerate_groups(&energies);
    let degenerate_blocks = moments
        .degenerate_blocks
        .iter()
        .zip(groups)
        .map(|(b, members)| BlockInvariant {
            members,
            frobenius_debye: Some(b.frobenius * scale),
        })
        .collect();
    Ok(DipoleTable {
        method: "oracle".into(),
        cells,
        degenerate_blocks,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(sig17).unwrap_or_default()
}

fn opt_short(v: Option<f64>) -> String {
    v.map(short).unwrap_or_else(|| "-".into())
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<width$}", width = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn energies_csv(rows: &[EnergyRow]) -> String {
    let mut out = String::from("method,state,label,energy,reference,log_error,converged,n,sz,s2\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.state,
            r.label,
            sig17(r.energy),
            opt(r.reference),
            log_error_text(r),
            r.converged,
            sig17(r.symmetry[0]),
            sig17(r.symmetry[1]),
            sig17(r.symmetry[2]),
        );
    }
    out
}

fn log_error_text(r: &EnergyRow) -> String {
    match (r.reference, r.log_error) {
        (None, _) => String::new(),
        (Some(_), None) => "exact".into(),
        (Some(_), Some(v)) => sig17(v),
    }
}

pub fn energies_text(rows: &[EnergyRow]) -> String {
    let mut table = vec![vec![
        "method".to_string(),
        "state".into(),
        "energy (Ha)".into(),
        "reference".into(),
        "log error".into(),
        "converged".into(),
    ]];
    for r in rows {
        table.push(vec![
            r.method.clone(),
            r.label.clone(),
            format!("{:.10}", r.energy),
            r.reference.map(|v| format!("{v:.10}")).unwrap_or_else(|| "-".into()),
            match (r.reference, r.log_error) {
                (None, _) => "-".into(),
                (Some(_), None) => "exact".into(),
                (Some(_), Some(v)) => format!("{v:.4}"),
            },
            if r.converged { "yes" } else { "NO" }.into(),
        ]);
    }
    aligned(&table)
}

pub fn dipole_csv(table: &DipoleTable, labels: &[String]) -> String {
    let mut out = String::from("j,k,state_j,state_k,debye,converged,degenerate,symmetry_forbidden\n");
    for c in &table.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            c.j,
            c.k,
            labels[c.j],
            labels[c.k],
            opt(c.debye),
            c.converged,
            c.degenerate,
            c.symmetry_forbidden
        );
    }
    out
}

/// Upper-triangular layout with flag suffixes on each cell.
pub fn dipole_text(table: &DipoleTable, labels: &[String]) -> String {
    let m = labels.len();
    let mut rows = vec![std::iter::once(String::new()).chain(labels.iter().cloned()).collect::<Vec<_>>()];
    for j in 0..m {
        let mut row = vec![labels[j].clone()];
        for k in 0..m {
            row.push(if k < j {
                String::new()
            } else if k == j {
                "-".into()
            } else {
                let c = table.cells.iter().find(|c| c.j == j && c.k == k);
                match c {
                    None => "?".into(),
                    Some(c) => {
                        let mut s = opt_short(c.debye);
                        if !c.converged {
                            s.push('*');
                        }
                        if c.degenerate {
                            s.push('d');
                        }
                        if c.symmetry_forbidden {
                            s.push('s');
                        }
                        s
                    }
                }
            });
        }
        rows.push(row);
    }
    let mut out = format!("transition dipole magnitudes (Debye), method {}\n\n", table.method);
    out.push_str(&aligned(&rows));
    out.push_str("\n* unconverged  d degenerate pair  s zero by symmetry\n");
    for b in &table.degenerate_blocks {
        let names: Vec<&str> = b.members.iter().map(|&i| labels[i].as_str()).collect();
        let _ = writeln!(out, "degenerate block {{{}}}: Frobenius {}", names.join(", "), opt_short(b.frobenius_debye));
    }
    out
}

pub fn h_const_csv(rows: &[HConstRow]) -> String {
    let mut out = String::from("j,k,kind,h_const,fidelity,phase_fidelity,evaluation,converged\n");
    for r in rows {
        let kind = match r.kind {
            PairKind::Trained => "trained",
            PairKind::SectorSeparated => "sector_separated",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.j,
            r.k,
            kind,
            opt(r.h_const),
            opt(r.fidelity),
            opt(r.phase_fidelity),
            opt(r.evaluation),
            r.converged
        );
    }
    out
}

pub fn h_const_text(rows: &[HConstRow], labels: &[String]) -> String {
    let mut table = vec![vec![
        "pair".to_string(),
        "H_const (Ha)".into(),
        "fidelity".into(),
        "phase fidelity".into(),
        "converged".into(),
    ]];
    for r in rows {
        table.push(vec![
            format!("{}-{}", labels[r.j], labels[r.k]),
            match r.kind {
                PairKind::Trained => opt_short(r.h_const),
                PairKind::SectorSeparated => "separate sectors".into(),
            },
            r.fidelity.map(|v| format!("{v:.9}")).unwrap_or_else(|| "-".into()),
            r.phase_fidelity.map(|v| format!("{v:.9}")).unwrap_or_else(|| "-".into()),
            if r.converged { "yes" } else { "NO" }.into(),
        ]);
    }
    aligned(&table)
}

fn write_outputs(dir: &Path, summary: &Summary, labels: &[String], traces: &[(String, String)]) -> Result<Vec<PathBuf>> {
    let mut files: Vec<(String, String)> = vec![
        ("energies.csv".into(), energies_csv(&summary.energies)),
        ("energies.txt".into(), energies_text(&summary.energies)),
    ];
    for t in &summary.transition_dipoles {
        files.push((format!("dipole_{}.csv", t.method), dipole_csv(t, labels)));
        files.push((format!("dipole_{}.txt", t.method), dipole_text(t, labels)));
    }
    if !summary.h_const.is_empty() {
        files.push(("h_const.csv".into(), h_const_csv(&summary.h_const)));
        files.push(("h_const.txt".into(), h_const_text(&summary.h_const, labels)));
    }
    let json = serde_json::to_string_pretty(summary).map_err(|e| Error::Invalid(e.to_string()))?;
    files.push(("summary.json".into(), json + "\n"));
    files.extend(traces.iter().cloned());

    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(&name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(PathBuf::from(name));
    }
    Ok(written)
}

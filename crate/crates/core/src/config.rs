//! Run configuration: INI-style `key = value` lines under section headers.
//!
//! ```text
//! [fixture]
//! hamiltonian = ../fixtures/h2/hamiltonian.txt
//! dipole_x = ../fixtures/h2/dipole_x.txt
//! dipole_y = ../fixtures/h2/dipole_y.txt
//! dipole_z = ../fixtures/h2/dipole_z.txt
//! number = ../fixtures/h2/number.txt
//! sz = ../fixtures/h2/sz.txt
//! s2 = ../fixtures/h2/s2.txt
//!
//! [states]
//! count = 4
//! electrons = 2
//! sz = 0, 0, 0, 0
//! s2 = 0, 2, 0, 0
//!
//! [run]
//! methods = vqd, fsc, oracle
//! output = ../out/h2
//! ```
//!
//! Relative paths resolve against the directory holding the config file.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use crate::fsc::FscSettings;
use crate::optimize::OptimizerConfig;
use crate::pauli::PauliSum;
use crate::vqe::SectorTarget;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Vqd,
    Ssvqe,
    Fsc,
    Direct,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Vqd => "vqd",
            Method::Ssvqe => "ssvqe",
            Method::Fsc => "fsc",
            Method::Direct => "direct",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vqd" => Ok(Method::Vqd),
            "ssvqe" => Ok(Method::Ssvqe),
            "fsc" => Ok(Method::Fsc),
            "direct" => Ok(Method::Direct),
            "oracle" => Ok(Method::Oracle),
            other => Err(Error::Config(format!(
                "unknown method {other:?} (expected vqd, ssvqe, fsc, direct or oracle)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixturePaths {
    pub hamiltonian: PathBuf,
    pub dipole: [PathBuf; 3],
    pub number: PathBuf,
    pub sz: PathBuf,
    pub s2: PathBuf,
}

impl FixturePaths {
    /// Paths in a fixed order, with their config key.
    pub fn all(&self) -> Vec<(&'static str, &Path)> {
        vec![
            ("hamiltonian", self.hamiltonian.as_path()),
            ("dipole_x", self.dipole[0].as_path()),
            ("dipole_y", self.dipole[1].as_path()),
            ("dipole_z", self.dipole[2].as_path()),
            ("number", self.number.as_path()),
            ("sz", self.sz.as_path()),
            ("s2", self.s2.as_path()),
        ]
    }
}

/// Operators loaded from a [`FixturePaths`] set.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub hamiltonian: PauliSum,
    pub dipole: [PauliSum; 3],
    pub number: PauliSum,
    pub sz: PauliSum,
    pub s2: PauliSum,
}

impl Fixture {
    pub fn num_qubits(&self) -> usize {
        self.hamiltonian.num_qubits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub fixture: FixturePaths,
    pub labels: Vec<String>,
    pub targets: Vec<SectorTarget>,
    pub penalty_weight: f64,
    pub deflation_weight: Option<f64>,
    pub uccsd_depth: usize,
    pub ham_depth: usize,
    pub fsc: FscConfig,
    pub optimizer: OptimizerConfig,
    pub methods: BTreeSet<Method>,
    pub output: PathBuf,
    /// Write per-state convergence traces as CSV.
    pub trace: bool,
}

/// Plain-data mirror of [`FscSettings`] so the config stays comparable.
#[derive(Debug, Clone, PartialEq)]
pub struct FscConfig {
    pub uccsd_depth: usize,
    pub ham_depth: usize,
    pub n: usize,
    pub fidelity_threshold: f64,
    pub h_const_threshold: f64,
    pub balance_tolerance: f64,
    pub init_scale: f64,
}

impl Default for FscConfig {
    fn default() -> Self {
        let s = FscSettings::default();
        FscConfig {
            uccsd_depth: s.uccsd_depth,
            ham_depth: s.ham_depth,
            n: s.n,
            fidelity_threshold: s.fidelity_threshold,
            h_const_threshold: s.h_const_threshold,
            balance_tolerance: s.balance_tolerance,
            init_scale: s.init_scale,
        }
    }
}

impl FscConfig {
    pub fn settings(&self) -> FscSettings {
        FscSettings {
            uccsd_depth: self.uccsd_depth,
            ham_depth: self.ham_depth,
            n: self.n,
            fidelity_threshold: self.fidelity_threshold,
            h_const_threshold: self.h_const_threshold,
            balance_tolerance: self.balance_tolerance,
            init_scale: self.init_scale,
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("fixture", &["hamiltonian", "dipole_x", "dipole_y", "dipole_z", "number", "sz", "s2"]),
    ("states", &["count", "electrons", "sz", "s2", "labels", "penalty_weight", "deflation_weight"]),
    ("ansatz", &["uccsd_depth", "ham_depth"]),
    (
        "fsc",
        &[
            "uccsd_depth",
            "ham_depth",
            "n",
            "fidelity_threshold",
            "h_const_threshold",
            "balance_tolerance",
            "init_scale",
        ],
    ),
    (
        "optimizer",
        &[
            "gradient_step",
            "gradient_tolerance",
            "objective_tolerance",
            "max_iterations",
            "restarts",
            "seed",
            "init_scale",
        ],
    ),
    ("run", &["methods", "output", "trace"]),
];

struct Sections<'a> {
    ini: &'a Ini,
}

impl<'a> Sections<'a> {
    fn get(&self, section: &str, key: &str) -> Option<&'a str> {
        self.ini.section(Some(section)).and_then(|p| p.get(key)).map(str::trim)
    }

    fn require(&self, section: &str, key: &str) -> Result<&'a str> {
        self.get(section, key)
            .ok_or_else(|| Error::Config(format!("missing [{section}] {key}")))
    }

    fn parse<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(default),
            Some(v) => parse_value(section, key, v),
        }
    }
}

fn parse_value<T: FromStr>(section: &str, key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse()
        .map_err(|e| Error::Config(format!("[{section}] {key} = {v:?}: {e}")))
}

fn parse_list<T: FromStr>(section: &str, key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(section, key, s))
        .collect()
}

/// Either one value for every state or exactly `count` values.
fn per_state<T: FromStr + Clone>(section: &str, key: &str, v: &str, count: usize) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    let values: Vec<T> = parse_list(section, key, v)?;
    match values.len() {
        1 => Ok(vec![values[0].clone(); count]),
        n if n == count => Ok(values),
        n => Err(Error::Config(format!(
            "[{section}] {key} has {n} entries for {count} states"
        ))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (name, props) in ini.iter() {
            let Some(name) = name else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(Error::Config(format!("key {k:?} outside any section")));
                }
                continue;
            };
            let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
                return Err(Error::Config(format!("unknown section [{name}]")));
            };
            for (k, _) in props.iter() {
                if !keys.contains(&k) {
                    return Err(Error::Config(format!("unknown key {k:?} in [{name}]")));
                }
            }
        }
        let s = Sections { ini: &ini };
        let path = |key: &str| -> Result<PathBuf> { Ok(base.join(s.require("fixture", key)?)) };
        let fixture = FixturePaths {
            hamiltonian: path("hamiltonian")?,
            dipole: [path("dipole_x")?, path("dipole_y")?, path("dipole_z")?],
            number: path("number")?,
            sz: path("sz")?,
            s2: path("s2")?,
        };

        let count: usize = parse_value("states", "count", s.require("states", "count")?)?;
        if count == 0 {
            return Err(Error::Config("[states] count must be positive".into()));
        }
        let electrons: Vec<usize> = per_state("states", "electrons", s.require("states", "electrons")?, count)?;
        let sz: Vec<f64> = per_state("states", "sz", s.get("states", "sz").unwrap_or("0"), count)?;
        let s2: Vec<f64> = per_state("states", "s2", s.require("states", "s2")?, count)?;
        let targets = (0..count)
            .map(|i| SectorTarget {
                electrons: electrons[i],
                sz: sz[i],
                s2: s2[i],
            })
            .collect();
        let labels = match s.get("states", "labels") {
            Some(v) => {
                let l: Vec<String> = parse_list("states", "labels", v)?;
                if l.len() != count {
                    return Err(Error::Config(format!("[states] labels has {} entries for {count} states", l.len())));
                }
                l
            }
            None => (0..count).map(|i| format!("state{i}")).collect(),
        };
        let deflation_weight = match s.get("states", "deflation_weight") {
            Some(v) => Some(parse_value("states", "deflation_weight", v)?),
            None => None,
        };

        let d = FscConfig::default();
        let fsc = FscConfig {
            uccsd_depth: s.parse("fsc", "uccsd_depth", d.uccsd_depth)?,
            ham_depth: s.parse("fsc", "ham_depth", d.ham_depth)?,
            n: s.parse("fsc", "n", d.n)?,
            fidelity_threshold: s.parse("fsc", "fidelity_threshold", d.fidelity_threshold)?,
            h_const_threshold: s.parse("fsc", "h_const_threshold", d.h_const_threshold)?,
            balance_tolerance: s.parse("fsc", "balance_tolerance", d.balance_tolerance)?,
            init_scale: s.parse("fsc", "init_scale", d.init_scale)?,
        };
        let o = OptimizerConfig::default();
        let optimizer = OptimizerConfig {
            gradient_step: s.parse("optimizer", "gradient_step", o.gradient_step)?,
            gradient_tolerance: s.parse("optimizer", "gradient_tolerance", o.gradient_tolerance)?,
            objective_tolerance: s.parse("optimizer", "objective_tolerance", o.objective_tolerance)?,
            max_iterations: s.parse("optimizer", "max_iterations", o.max_iterations)?,
            restarts: s.parse("optimizer", "restarts", o.restarts)?,
            seed: s.parse("optimizer", "seed", o.seed)?,
            init_scale: s.parse("optimizer", "init_scale", o.init_scale)?,
        };
        let methods: BTreeSet<Method> = parse_list::<Method>("run", "methods", s.get("run", "methods").unwrap_or(""))?
            .into_iter()
            .collect();

        let config = RunConfig {
            fixture,
            labels,
            targets,
            penalty_weight: s.parse("states", "penalty_weight", 1.0)?,
            deflation_weight,
            uccsd_depth: s.parse("ansatz", "uccsd_depth", 2)?,
            ham_depth: s.parse("ansatz", "ham_depth", 2)?,
            fsc,
            optimizer,
            methods,
            output: base.join(s.get("run", "output").unwrap_or("out")),
            trace: s.parse("run", "trace", false)?,
        };
        config.check()?;
        Ok(config)
    }

    /// Checks that need no file access.
    pub fn check(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("[run] methods is empty".into()));
        }
        let has = |m| self.methods.contains(&m);
        if has(Method::Fsc) && !has(Method::Vqd) {
            return Err(Error::Config("method fsc needs vqd states".into()));
        }
        if has(Method::Direct) && !has(Method::Vqd) && !has(Method::Ssvqe) {
            return Err(Error::Config("method direct needs vqd or ssvqe states".into()));
        }
        if (has(Method::Fsc) || has(Method::Direct)) && self.targets.len() < 2 {
            return Err(Error::Config("transition moments need at least 2 states".into()));
        }
        if let Some(w) = self.deflation_weight {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Config(format!("deflation_weight must be positive, got {w}")));
            }
        }
        if !(self.penalty_weight.is_finite() && self.penalty_weight >= 0.0) {
            return Err(Error::Config(format!(
                "penalty_weight must be nonnegative, got {}",
                self.penalty_weight
            )));
        }
        self.optimizer.validate()?;
        self.fsc.settings().validate()?;
        if self.targets.iter().any(|t| !t.sz.is_finite() || !t.s2.is_finite()) {
            return Err(Error::Config("non-finite sector target".into()));
        }
        Ok(())
    }

    /// Reads every fixture file, checking existence and a shared qubit count
    /// before anything is returned.
    pub fn load_fixture(&self) -> Result<Fixture> {
        for (key, p) in self.fixture.all() {
            if !p.is_file() {
                return Err(Error::Config(format!("fixture {key} not found: {}", p.display())));
            }
        }
        let read = |p: &Path| PauliSum::read(p);
        let fixture = Fixture {
            hamiltonian: read(&self.fixture.hamiltonian)?,
            dipole: [
                read(&self.fixture.dipole[0])?,
                read(&self.fixture.dipole[1])?,
                read(&self.fixture.dipole[2])?,
            ],
            number: read(&self.fixture.number)?,
            sz: read(&self.fixture.sz)?,
            s2: read(&self.fixture.s2)?,
        };
        let n = fixture.num_qubits();
        let ops = [
            &fixture.dipole[0],
            &fixture.dipole[1],
            &fixture.dipole[2],
            &fixture.number,
            &fixture.sz,
            &fixture.s2,
        ];
        for ((key, p), op) in self.fixture.all().into_iter().skip(1).zip(ops) {
            if op.num_qubits() != n {
                return Err(Error::Config(format!(
                    "fixture {key} ({}) has {} qubits, hamiltonian has {n}",
                    p.display(),
                    op.num_qubits()
                )));
            }
        }
        if n % 2 != 0 {
            return Err(Error::Config(format!("odd qubit count {n}: spin orbitals come in pairs")));
        }
        for t in &self.targets {
            if t.electrons > n {
                return Err(Error::Config(format!("{} electrons in {n} spin orbitals", t.electrons)));
            }
        }
        Ok(fixture)
    }
}

//! Orchestration of one run: problem in, artifacts out.

use std::fs;
use std::path::{Path, PathBuf};

use exset_core::bundle::{build_bundle, exceptional_pipeline, symmetrize, BundleConfig, PointSpec, Role};
use exset_core::interval::DEFAULT_MAX_PRECISION;
use exset_core::steering::SteeringConfig;
use exset_core::verify::check_bundle;
use exset_core::Error;

use crate::json::{to_canonical_string, DecodeError};
use crate::output::{self, RunInfo};
use crate::problem::{Mode, PointKind, ProblemFile};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", format_issues(.0))]
    Invalid(Vec<DecodeError>),
    #[error("{0}")]
    Construction(Error),
    #[error("certificate failed: {0}")]
    Certificate(String),
}

fn format_issues(issues: &[DecodeError]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

impl Failure {
    /// 1: input or hypothesis violation; 2: steering could not certify a
    /// choice; 3: the certificate has a failing check.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io { .. } | Failure::Invalid(_) => 1,
            Failure::Construction(Error::SteeringStuck { .. } | Error::TargetUnreachable { .. }) => 2,
            Failure::Construction(_) => 1,
            Failure::Certificate(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Construction(e)
    }
}

/// Command-line overrides of problem-file settings.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub stages: Option<usize>,
    pub degree: Option<u32>,
    pub precision: Option<u32>,
    pub mode: Option<Mode>,
}

impl Overrides {
    pub fn apply(&self, p: &mut ProblemFile) {
        if let Some(s) = self.seed {
            p.seed = s;
        }
        if self.stages.is_some() {
            p.stages = self.stages;
        }
        if self.degree.is_some() {
            p.degree = self.degree;
        }
        if self.precision.is_some() {
            p.precision = self.precision;
        }
        if let Some(m) = self.mode {
            p.mode = m;
        }
    }
}

/// Named artifact contents, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifacts {
    pub files: Vec<(&'static str, String)>,
    pub certificate_pass: Option<bool>,
}

impl Artifacts {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| *n == name).map(|(_, s)| s.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), Failure> {
        fs::create_dir_all(dir).map_err(|source| Failure::Io { path: dir.to_path_buf(), source })?;
        for (name, text) in &self.files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|source| Failure::Io { path, source })?;
        }
        Ok(())
    }
}

/// Validates and solves a problem, producing every requested artifact.
pub fn solve(problem: &ProblemFile, verify: bool, emit_psi: bool) -> Result<Artifacts, Failure> {
    let issues = problem.validate();
    if !issues.is_empty() {
        return Err(Failure::Invalid(issues));
    }
    let config = BundleConfig {
        steering: SteeringConfig {
            seed: problem.seed,
            policy: problem.policy,
            max_precision: problem.precision.unwrap_or(DEFAULT_MAX_PRECISION),
        },
        stages: problem.stages,
        degree: problem.degree,
    };
    let m = problem.variables;
    let (bundle, psi) = match problem.mode {
        Mode::Prescribe => {
            let points: Vec<PointSpec> = problem
                .points
                .iter()
                .map(|p| match &p.kind {
                    PointKind::Target(k) => PointSpec::new(p.coords.clone(), k.clone(), Role::Prescribed),
                    _ => unreachable!("validated"),
                })
                .collect();
            let bundle = build_bundle(m, &points, &config)?;
            let psi = if emit_psi { Some(symmetrize(&bundle)?) } else { None };
            (bundle, psi)
        }
        Mode::Exceptional => {
            let pick = |k: PointKind| {
                problem.points.iter().filter(|p| p.kind == k).map(|p| p.coords.clone()).collect::<Vec<_>>()
            };
            let out = exceptional_pipeline(&pick(PointKind::Algebraic), &pick(PointKind::Transcendental), m, &config)?;
            (out.bundle, Some(out.psi))
        }
    };
    let info = RunInfo { mode: problem.mode, seed: problem.seed, policy: problem.policy };
    let mut files = vec![
        ("series.json", to_canonical_string(&output::series(&info, &bundle))),
        ("stagelog.json", to_canonical_string(&output::stagelog(&bundle))),
        ("report.json", to_canonical_string(&output::report(&info, &bundle, psi.as_ref(), problem.points.len()))),
    ];
    if let (true, Some(psi)) = (emit_psi, &psi) {
        files.push(("psi.json", to_canonical_string(&output::psi(&info, &bundle, psi))));
    }
    let mut certificate_pass = None;
    if verify {
        let cert = check_bundle(&bundle, psi.as_ref());
        certificate_pass = Some(cert.pass());
        files.push(("certificate.json", to_canonical_string(&output::certificate(&cert))));
    }
    Ok(Artifacts { files, certificate_pass })
}

/// Reads the problem, applies overrides, solves and writes the artifacts.
pub fn run(
    input: &Path,
    out: &Path,
    overrides: &Overrides,
    verify: bool,
    emit_psi: bool,
) -> Result<Artifacts, Failure> {
    let text = fs::read_to_string(input).map_err(|source| Failure::Io { path: input.to_path_buf(), source })?;
    let mut problem = ProblemFile::parse(&text).map_err(|e| Failure::Invalid(vec![e]))?;
    overrides.apply(&mut problem);
    let artifacts = solve(&problem, verify, emit_psi)?;
    artifacts.write_to(out)?;
    if artifacts.certificate_pass == Some(false) {
        return Err(Failure::Certificate(format!("see {}", out.join("certificate.json").display())));
    }
    Ok(artifacts)
}

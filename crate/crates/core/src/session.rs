//! Pipeline orchestration shared by the command line and the tests.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fixgen::{generate_candidates, Candidates, FixgenError, DEFAULT_MAX_COMPONENTS};
use crate::localize::{localize, parse_rational, LocalizeConfig, LocalizeError, Localization, ScoreConfig};
use crate::syntax::{parse_program, ParseError, Program};
use crate::testgen::{
    generate_suite, read_suite, select_fault_inputs, write_suite, FaultInputs, FaultKey, GenConfig,
    TestSuite, TestgenError,
};
use crate::validate::{
    rank_and_report, report_jsonl, report_text, validate_all, FixReport, ValidateError,
    ValidationVerdict, DEFAULT_TOP,
};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Testgen(#[from] TestgenError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error(transparent)]
    Fixgen(#[from] FixgenError),
    #[error(transparent)]
    Validate(#[from] ValidateError),
    #[error("fault `{spec}` not found; faults in the suite: {available}")]
    UnknownFault { spec: String, available: String },
    #[error("the suite has no failing test")]
    NoFault,
    #[error("several faults in the suite, choose one with --fault: {0}")]
    AmbiguousFault(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SessionError + '_ {
    move |source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub gen: GenConfig,
    /// Suite file to load instead of generating tests.
    pub suite: Option<PathBuf>,
    pub scores: ScoreConfig,
    pub max_components: usize,
    pub top: usize,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub fault: Option<String>,
}

impl Default for SessionConfig {
    fn default() -> SessionConfig {
        SessionConfig {
            gen: GenConfig::default(),
            suite: None,
            scores: ScoreConfig::default(),
            max_components: DEFAULT_MAX_COMPONENTS,
            top: DEFAULT_TOP,
            jobs: 1,
            out: None,
            fault: None,
        }
    }
}

impl SessionConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad value `{v}` for `{key}`"))
        }
        let rational = |v: &str| parse_rational(v).ok_or_else(|| format!("bad value `{v}` for `{key}`"));
        match key {
            "seed" => self.gen.seed = num(key, value)?,
            "tests" => self.gen.tests = num(key, value)?,
            "max_steps" => self.gen.max_steps = num(key, value)?,
            "budget" => self.gen.budget = num(key, value)?,
            "alpha" => self.scores.alpha = rational(value)?,
            "beta" => self.scores.beta = rational(value)?,
            "gamma" => self.scores.gamma = rational(value)?,
            "max_components" => self.max_components = num(key, value)?,
            "top" => self.top = num(key, value)?,
            "jobs" => self.jobs = num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "suite" => self.suite = Some(PathBuf::from(value)),
            "fault" => self.fault = Some(value.to_string()),
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` and `--` start comments.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), SessionError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            let line = line.split("--").next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| SessionError::Config {
                line: i + 1,
                message,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".to_string()))?;
            self.set(k.trim(), v.trim()).map_err(err)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        if !self.scores.is_valid() {
            return Err(SessionError::Invalid(
                "need 0 < alpha < 1, 0 < beta < 1 and gamma >= 0".to_string(),
            ));
        }
        for (name, v) in [
            ("tests", self.gen.tests),
            ("max_steps", self.gen.max_steps),
            ("max_components", self.max_components),
            ("top", self.top),
            ("jobs", self.jobs),
        ] {
            if v == 0 {
                return Err(SessionError::Invalid(format!("`{name}` must be positive")));
            }
        }
        if self.gen.budget == 0 {
            return Err(SessionError::Invalid("`budget` must be positive".to_string()));
        }
        Ok(())
    }

    pub fn localize_config(&self) -> LocalizeConfig {
        LocalizeConfig {
            scores: self.scores.clone(),
            budget: self.gen.budget,
            jobs: self.jobs,
        }
    }

    fn header(&self, program_name: &str) -> Vec<(String, String)> {
        let mut h = vec![("program".to_string(), program_name.to_string())];
        match &self.suite {
            Some(p) => h.push(("suite".to_string(), p.display().to_string())),
            None => {
                h.push(("seed".to_string(), self.gen.seed.to_string()));
                h.push(("tests".to_string(), self.gen.tests.to_string()));
                h.push(("max_steps".to_string(), self.gen.max_steps.to_string()));
            }
        }
        for (k, v) in [
            ("alpha", self.scores.alpha.to_string()),
            ("beta", self.scores.beta.to_string()),
            ("gamma", self.scores.gamma.to_string()),
            ("max_components", self.max_components.to_string()),
            ("top", self.top.to_string()),
            ("budget", self.gen.budget.to_string()),
        ] {
            h.push((k.to_string(), v));
        }
        h
    }
}

/// A program together with the settings of one run.
pub struct Session {
    pub name: String,
    pub program: Program,
    pub config: SessionConfig,
}

pub struct FixOutcome {
    pub fault: FaultKey,
    pub inputs: FaultInputs,
    pub localization: Localization,
    pub candidates: Candidates,
    pub verdicts: Vec<ValidationVerdict>,
    pub report: FixReport,
}

impl FixOutcome {
    pub fn text(&self) -> String {
        report_text(&self.report)
    }

    pub fn jsonl(&self) -> Result<String, SessionError> {
        Ok(report_jsonl(&self.report)?)
    }
}

impl Session {
    pub fn new(name: impl Into<String>, program: Program, config: SessionConfig) -> Session {
        Session {
            name: name.into(),
            program,
            config,
        }
    }

    pub fn load(path: &Path, config: SessionConfig) -> Result<Session, SessionError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let program = parse_program(&text).map_err(|source| SessionError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Session::new(name, program, config))
    }

    pub fn stem(&self) -> &str {
        self.name.strip_suffix(".cdl").unwrap_or(&self.name)
    }

    /// The suite file, or a freshly generated suite.
    pub fn suite(&self) -> Result<TestSuite, SessionError> {
        match &self.config.suite {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path))?;
                Ok(read_suite(&self.program, &text)?)
            }
            None => Ok(generate_suite(&self.program, &self.config.gen)?),
        }
    }

    pub fn suite_text(&self, suite: &TestSuite) -> String {
        write_suite(&self.program, suite)
    }

    /// The fault named in the configuration, or the only fault of the suite.
    pub fn resolve_fault(&self, suite: &TestSuite) -> Result<FaultKey, SessionError> {
        let faults: Vec<FaultKey> = suite.faults().into_keys().collect();
        let listing = || {
            faults
                .iter()
                .map(|k| k.display(&self.program).to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        match &self.config.fault {
            Some(spec) => suite
                .find_fault(&self.program, spec)
                .ok_or_else(|| SessionError::UnknownFault {
                    spec: spec.clone(),
                    available: if faults.is_empty() {
                        "none".to_string()
                    } else {
                        listing()
                    },
                }),
            None => match faults.len() {
                0 => Err(SessionError::NoFault),
                1 => Ok(faults[0].clone()),
                _ => Err(SessionError::AmbiguousFault(listing())),
            },
        }
    }

    pub fn localize(&self, suite: &TestSuite, fault: &FaultKey) -> Result<(FaultInputs, Localization), SessionError> {
        self.config.validate()?;
        let inputs = select_fault_inputs(&self.program, suite, fault, self.config.gen.budget);
        let loc = localize(&self.program, &inputs, &self.config.localize_config())?;
        Ok((inputs, loc))
    }

    /// Localization, candidate generation, validation and the report.
    pub fn fix(&self, suite: &TestSuite, fault: &FaultKey) -> Result<FixOutcome, SessionError> {
        let (inputs, localization) = self.localize(suite, fault)?;
        let candidates = generate_candidates(&self.program, &localization, self.config.max_components)?;
        let verdicts = validate_all(
            &self.program,
            &candidates.candidates,
            &inputs,
            self.config.gen.budget,
            self.config.jobs,
        )?;
        let report = rank_and_report(
            &self.program,
            &localization,
            &candidates,
            &verdicts,
            self.config.top,
            self.config.header(&self.name),
        );
        Ok(FixOutcome {
            fault: fault.clone(),
            inputs,
            localization,
            candidates,
            verdicts,
            report,
        })
    }

    /// Writes `contents` to `<out>/<stem><suffix>` when an output directory
    /// is configured, returning the path written.
    pub fn write_output(&self, suffix: &str, contents: &str) -> Result<Option<PathBuf>, SessionError> {
        let Some(dir) = &self.config.out else {
            return Ok(None);
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join(format!("{}{suffix}", self.stem()));
        fs::write(&path, contents).map_err(io_err(&path))?;
        Ok(Some(path))
    }
}

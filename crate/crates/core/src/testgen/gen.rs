use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::case::{Arg, Step, TestCase};
use super::{SuiteEntry, TestSuite, TestgenError};
use crate::runtime::{run_test_with, Driver, TraceMode, Value, Verdict, DEFAULT_BUDGET};
use crate::syntax::{Program, Type};

pub const DEFAULT_INT_POOL: [i64; 6] = [-2, -1, 0, 1, 2, 10];
const MAX_OBSERVED: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub tests: usize,
    pub max_steps: usize,
    pub int_pool: Vec<i64>,
    pub budget: u64,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 1,
            tests: 300,
            max_steps: 20,
            int_pool: DEFAULT_INT_POOL.to_vec(),
            budget: DEFAULT_BUDGET,
        }
    }
}

struct Generator<'p> {
    program: &'p Program,
    rng: ChaCha8Rng,
    config: &'p GenConfig,
    creatable: Vec<usize>,
}

/// State of the test being built.
struct Draft<'p> {
    driver: Driver<'p>,
    /// Test variables and the class of the object each holds.
    pool: Vec<(String, usize)>,
    observed: BTreeSet<i64>,
    next_var: usize,
}

impl<'p> Generator<'p> {
    fn int(&mut self, draft: &Draft) -> i64 {
        let values: Vec<i64> = self
            .config
            .int_pool
            .iter()
            .copied()
            .chain(draft.observed.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        *values.choose(&mut self.rng).unwrap_or(&0)
    }

    fn arg(&mut self, draft: &Draft, ty: &Type) -> Arg {
        match ty {
            Type::Integer => Arg::Int(self.int(draft)),
            Type::Boolean => Arg::Bool(self.rng.gen_bool(0.5)),
            Type::Class(c) => {
                let ci = self.program.class_index(c);
                let candidates: Vec<&String> = draft
                    .pool
                    .iter()
                    .filter(|(_, k)| Some(*k) == ci)
                    .map(|(v, _)| v)
                    .collect();
                if candidates.is_empty() || self.rng.gen_bool(0.1) {
                    Arg::Void
                } else {
                    Arg::Var(candidates.choose(&mut self.rng).unwrap().to_string())
                }
            }
            Type::None => Arg::Void,
        }
    }

    fn propose(&mut self, draft: &mut Draft) -> Step {
        if draft.pool.is_empty() || self.rng.gen_bool(0.25) {
            let ci = *self.creatable.choose(&mut self.rng).unwrap();
            let class = &self.program.classes[ci];
            let creator = class.creators.choose(&mut self.rng).unwrap().clone();
            let formals = class.routine(&creator).map(|r| r.args.clone()).unwrap_or_default();
            let args = formals.iter().map(|p| self.arg(draft, &p.ty)).collect();
            draft.next_var += 1;
            Step::Create {
                var: format!("v{}", draft.next_var),
                class: class.name.clone(),
                creator,
                args,
            }
        } else {
            let targets: Vec<(usize, usize)> = self
                .program
                .classes
                .iter()
                .enumerate()
                .filter(|(ci, _)| draft.pool.iter().any(|(_, k)| k == ci))
                .flat_map(|(ci, c)| (0..c.routines.len()).map(move |ri| (ci, ri)))
                .collect();
            let (ci, ri) = *targets.choose(&mut self.rng).unwrap();
            let objects: Vec<&String> = draft
                .pool
                .iter()
                .filter(|(_, k)| *k == ci)
                .map(|(v, _)| v)
                .collect();
            let var = objects.choose(&mut self.rng).unwrap().to_string();
            let routine = &self.program.classes[ci].routines[ri];
            let args = routine.args.iter().map(|p| self.arg(draft, &p.ty)).collect();
            Step::Invoke {
                var,
                routine: routine.name.clone(),
                args,
            }
        }
    }

    fn observe(&self, draft: &mut Draft) {
        for obj in draft.driver.heap().objects() {
            for v in &obj.fields {
                if let Value::Int(n) = v {
                    if draft.observed.len() < MAX_OBSERVED {
                        draft.observed.insert(*n);
                    }
                }
            }
        }
    }

    fn test(&mut self, id: u32) -> TestCase {
        let mut draft = Draft {
            driver: Driver::new(self.program, self.config.budget, TraceMode::Off),
            pool: Vec::new(),
            observed: BTreeSet::new(),
            next_var: 0,
        };
        let len = self.rng.gen_range(1..=self.config.max_steps.max(1));
        let mut steps = Vec::new();
        let mut last_rejected = None;
        for _ in 0..len {
            let step = self.propose(&mut draft);
            let mut trial = draft.driver.clone();
            match trial.step(&step) {
                Ok(()) => {
                    draft.driver = trial;
                    if let Step::Create { var, class, .. } = &step {
                        let ci = self.program.class_index(class).unwrap();
                        draft.pool.push((var.clone(), ci));
                    }
                    self.observe(&mut draft);
                    steps.push(step);
                }
                Err(Verdict::Invalid) => last_rejected = Some(step),
                Err(_) => {
                    steps.push(step);
                    break;
                }
            }
        }
        if steps.is_empty() {
            steps.extend(last_rejected);
        }
        TestCase {
            id,
            steps,
            seed: Some(self.config.seed),
        }
    }
}

/// Generates `config.tests` random tests and records each one's verdict.
pub fn generate_suite(program: &Program, config: &GenConfig) -> Result<TestSuite, TestgenError> {
    let creatable: Vec<usize> = program
        .classes
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.creators.is_empty())
        .map(|(i, _)| i)
        .collect();
    if creatable.is_empty() {
        return Err(TestgenError::NoCreatableClass);
    }
    let mut gen = Generator {
        program,
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        config,
        creatable,
    };
    let entries = (0..config.tests)
        .map(|i| {
            let test = gen.test(i as u32);
            let verdict = run_test_with(program, &test, config.budget, TraceMode::Off).verdict;
            SuiteEntry { test, verdict }
        })
        .collect();
    Ok(TestSuite {
        seed: Some(config.seed),
        entries,
    })
}

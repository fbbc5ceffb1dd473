use std::fmt;

/// A literal or a test variable passed to a routine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Arg {
    Int(i64),
    Bool(bool),
    Void,
    Var(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    Create {
        var: String,
        class: String,
        creator: String,
        args: Vec<Arg>,
    },
    Invoke {
        var: String,
        routine: String,
        args: Vec<Arg>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestCase {
    pub id: u32,
    pub steps: Vec<Step>,
    /// Generator seed the test came from; `None` for hand-written tests.
    pub seed: Option<u64>,
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Int(n) => write!(f, "{n}"),
            Arg::Bool(true) => f.write_str("True"),
            Arg::Bool(false) => f.write_str("False"),
            Arg::Void => f.write_str("Void"),
            Arg::Var(v) => f.write_str(v),
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Arg]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Create {
                var,
                class,
                creator,
                args,
            } => {
                write!(f, "create {var}: {class}.{creator}")?;
                write_args(f, args)
            }
            Step::Invoke { var, routine, args } => {
                write!(f, "{var}.{routine}")?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "test {} {{", self.id)?;
        for (i, s) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(" ;")?;
            }
            write!(f, " {s}")?;
        }
        f.write_str(" }")
    }
}

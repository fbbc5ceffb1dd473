use std::collections::BTreeSet;

use crate::syntax::{Location, RoutineId};

use super::value::{Heap, Value};

/// Activation record of a routine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    pub routine: RoutineId,
    pub current: Value,
    pub args: Vec<Value>,
    pub locals: Vec<Value>,
    /// `Some` in queries.
    pub result: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub heap: Heap,
    pub frame: Frame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceStep {
    pub location: Location,
    /// Index into [`Trace::snapshots`].
    pub snapshot: Option<usize>,
}

/// How much of an execution to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Off,
    /// Locations only.
    Locations,
    /// Locations and a snapshot at every step.
    Full,
    /// Locations everywhere, snapshots only inside one routine.
    Routine(RoutineId),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub snapshots: Vec<Snapshot>,
    /// Routines called at least once.
    pub entered: BTreeSet<RoutineId>,
}

impl Trace {
    pub fn locations(&self) -> impl Iterator<Item = Location> + '_ {
        self.steps.iter().map(|s| s.location)
    }

    /// Step indices at locations of `routine` that carry a snapshot.
    pub fn steps_in(&self, routine: RoutineId) -> impl Iterator<Item = usize> + '_ {
        self.steps
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.location.routine == routine && s.snapshot.is_some())
            .map(|(i, _)| i)
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }
}

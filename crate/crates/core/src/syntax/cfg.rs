//! Control-flow graphs over statement locations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::ast::*;

/// Structured control flow of one routine body. Nodes are the statement
/// locations; a compound statement's node is its condition. Routines with a
/// postcondition also get the exit location as a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub nodes: BTreeSet<u32>,
    pub edges: BTreeSet<(u32, u32)>,
    /// First location executed, if any.
    pub entry: Option<u32>,
}

pub fn build_cfg(routine: &RoutineDecl) -> Cfg {
    let mut cfg = Cfg {
        nodes: routine.statements().iter().map(|s| s.loc).collect(),
        edges: BTreeSet::new(),
        entry: None,
    };
    let exit = if routine.ensure.is_empty() {
        None
    } else {
        let e = routine.exit_location();
        cfg.nodes.insert(e);
        Some(e)
    };
    cfg.entry = cfg.block(routine.body(), exit);
    cfg
}

impl Cfg {
    /// Adds edges for `block` and returns the block's entry node; an empty
    /// block falls through to `next`.
    fn block(&mut self, block: &[Stmt], next: Option<u32>) -> Option<u32> {
        let mut next = next;
        for stmt in block.iter().rev() {
            next = Some(self.stmt(stmt, next));
        }
        next
    }

    fn edge(&mut self, from: u32, to: Option<u32>) {
        if let Some(to) = to {
            self.edges.insert((from, to));
        }
    }

    fn stmt(&mut self, stmt: &Stmt, next: Option<u32>) -> u32 {
        match &stmt.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                let t = self.block(then_branch, next);
                let e = self.block(else_branch, next);
                self.edge(stmt.loc, t);
                self.edge(stmt.loc, e);
                stmt.loc
            }
            StmtKind::Loop { init, body, .. } => {
                let b = self.block(body, Some(stmt.loc));
                self.edge(stmt.loc, b);
                self.edge(stmt.loc, next);
                self.block(init, Some(stmt.loc)).unwrap_or(stmt.loc)
            }
            _ => {
                self.edge(stmt.loc, next);
                stmt.loc
            }
        }
    }

    pub fn successors(&self, n: u32) -> impl Iterator<Item = u32> + '_ {
        self.edges
            .range((n, 0)..=(n, u32::MAX))
            .map(|&(_, to)| to)
    }

    pub fn has_edge(&self, from: u32, to: u32) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Length of the shortest directed path, `None` when unreachable.
    pub fn cdist(&self, from: u32, to: u32) -> Option<u32> {
        if !self.nodes.contains(&from) || !self.nodes.contains(&to) {
            return None;
        }
        let mut seen = BTreeMap::from([(from, 0u32)]);
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            let d = seen[&n];
            if n == to {
                return Some(d);
            }
            for m in self.successors(n) {
                seen.entry(m).or_insert_with(|| {
                    queue.push_back(m);
                    d + 1
                });
            }
        }
        None
    }

    /// `cdist(λ, to)` for every node λ that reaches `to`.
    pub fn distances_to(&self, to: u32) -> BTreeMap<u32, u32> {
        let mut preds: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            preds.entry(b).or_default().push(a);
        }
        let mut dist = BTreeMap::new();
        if !self.nodes.contains(&to) {
            return dist;
        }
        dist.insert(to, 0u32);
        let mut queue = VecDeque::from([to]);
        while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            for &m in preds.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
                dist.entry(m).or_insert_with(|| {
                    queue.push_back(m);
                    d + 1
                });
            }
        }
        dist
    }

    /// Whether `path` can be walked along CFG edges.
    pub fn is_path(&self, path: &[u32]) -> bool {
        path.iter().all(|n| self.nodes.contains(n))
            && path.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }
}

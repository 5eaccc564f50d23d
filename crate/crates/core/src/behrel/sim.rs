//! On-the-fly simulation and bisimulation.
//!
//! The search assumes each pair it enters and tries to discharge every
//! transition against some matching answer; assumptions added while probing
//! a candidate that turns out not to work are rolled back before the next
//! candidate is tried. This candidate backtracking is what makes
//! nondeterministic matching work — a breadth-first worklist that insists
//! on *every* matching successor would wrongly reject, for example,
//! `!a.?x.0 + !a.?y.0` against itself. On success the surviving assumption
//! set is itself the relation; the counterexample on failure is the first
//! pair seen with a transition that has no answering move at all, which no
//! relation whatsoever could contain.

use std::collections::HashSet;
use std::fmt::Display;

use crate::lts::{LabelKind, LtsError, Proc, DEFAULT_BUDGET};
use crate::rel::Value;

use super::{sorted_edges, PairSet, Verdict};

/// First defect found when verifying a pair set as a (bi)simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchViolation<S1, S2> {
    /// A transition of one side of a pair has no answering move at all.
    Unmatched { left: S1, right: S2, label: String, of_left: bool },
    /// Every answering move leads outside the relation.
    EscapesRelation { left: S1, right: S2, label: String, of_left: bool },
}

impl<S1: Display, S2: Display> Display for MatchViolation<S1, S2> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (left, right, label, of_left, problem) = match self {
            MatchViolation::Unmatched { left, right, label, of_left } => {
                (left, right, label, of_left, "has no matching move of the other side")
            }
            MatchViolation::EscapesRelation { left, right, label, of_left } => {
                (left, right, label, of_left, "is only matched outside the relation")
            }
        };
        let side = if *of_left { "left" } else { "right" };
        write!(f, "pair ({left}, {right}): transition {label} of the {side} process {problem}")
    }
}

/// Moves of `q` that can answer `label`: the direct moves when matching
/// strongly; when matching weakly, internal moves are answered by the
/// internal closure alone and visible moves by closure–move–closure.
fn responses<S, L>(
    q: &Proc<S, L>,
    label: &L,
    weak: bool,
    budget: usize,
) -> Result<Vec<Proc<S, L>>, LtsError>
where
    S: Value,
    L: Value,
{
    if !weak {
        return Ok(q.after(label));
    }
    if q.lts().classify(label) == LabelKind::Internal {
        return q.weak_reducts_within(budget);
    }
    let mut seen: HashSet<S> = HashSet::new();
    let mut out = Vec::new();
    for before in q.weak_reducts_within(budget)? {
        for mid in before.after(label) {
            for after in mid.weak_reducts_within(budget)? {
                if seen.insert(after.state().clone()) {
                    out.push(after);
                }
            }
        }
    }
    Ok(out)
}

struct Search<S1, S2> {
    weak: bool,
    bisim: bool,
    budget: usize,
    assumed: HashSet<(S1, S2)>,
    log: Vec<(S1, S2)>,
    // pairs with a transition nothing can answer; their failure holds in
    // any context, so they are safe to cache across rollbacks
    hopeless: HashSet<(S1, S2)>,
    first_failure: Option<((S1, S2), String)>,
}

impl<S1, S2> Search<S1, S2>
where
    S1: Value + Display,
    S2: Value + Display,
{
    fn rollback(&mut self, len: usize) {
        while self.log.len() > len {
            let key = self.log.pop().expect("log is longer than the rollback point");
            self.assumed.remove(&key);
        }
    }

    fn note_base_failure(&mut self, key: (S1, S2), label: String, of_left: bool) {
        self.hopeless.insert(key.clone());
        if self.first_failure.is_none() {
            let side = if of_left { "left" } else { "right" };
            self.first_failure = Some((
                key,
                format!("transition {label} of the {side} process has no matching move of the other side"),
            ));
        }
    }

    fn holds<L>(&mut self, a: &Proc<S1, L>, b: &Proc<S2, L>) -> Result<bool, LtsError>
    where
        L: Value + Display,
    {
        let key = (a.state().clone(), b.state().clone());
        if self.assumed.contains(&key) {
            return Ok(true);
        }
        if self.hopeless.contains(&key) {
            return Ok(false);
        }
        self.log.push(key.clone());
        self.assumed.insert(key.clone());
        if self.assumed.len() > self.budget {
            return Err(LtsError::BudgetExhausted(self.budget));
        }
        let frame = self.log.len() - 1;

        // every move of the left side needs an answer from the right
        for (l, s_next) in sorted_edges(a) {
            let s_next = a.lts().process(s_next);
            let candidates = responses(b, &l, self.weak, self.budget)?;
            if candidates.is_empty() {
                self.note_base_failure(key, l.to_string(), true);
                self.rollback(frame);
                return Ok(false);
            }
            let mut matched = false;
            for candidate in candidates {
                let snapshot = self.log.len();
                if self.holds(&s_next, &candidate)? {
                    matched = true;
                    break;
                }
                self.rollback(snapshot);
            }
            if !matched {
                self.rollback(frame);
                return Ok(false);
            }
        }

        if self.bisim {
            // and symmetrically every move of the right side
            for (l, t_next) in sorted_edges(b) {
                let t_next = b.lts().process(t_next);
                let candidates = responses(a, &l, self.weak, self.budget)?;
                if candidates.is_empty() {
                    self.note_base_failure(key, l.to_string(), false);
                    self.rollback(frame);
                    return Ok(false);
                }
                let mut matched = false;
                for candidate in candidates {
                    let snapshot = self.log.len();
                    if self.holds(&candidate, &t_next)? {
                        matched = true;
                        break;
                    }
                    self.rollback(snapshot);
                }
                if !matched {
                    self.rollback(frame);
                    return Ok(false);
                }
            }
        }

        Ok(true)
    }
}

fn build<S1, S2, L>(
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
    weak: bool,
    bisim: bool,
    budget: usize,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    let mut search = Search {
        weak,
        bisim,
        budget,
        assumed: HashSet::new(),
        log: Vec::new(),
        hopeless: HashSet::new(),
        first_failure: None,
    };
    if search.holds(p, q)? {
        let name = match (bisim, weak) {
            (false, false) => "simulation",
            (false, true) => "weak simulation",
            (true, false) => "bisimulation",
            (true, true) => "weak bisimulation",
        };
        Ok(Verdict::Relation(PairSet::from_pairs(
            name,
            p.lts().clone(),
            q.lts().clone(),
            search.log,
        )))
    } else {
        let ((left, right), reason) = search
            .first_failure
            .expect("a failed search bottoms out in an unanswerable transition");
        Ok(Verdict::Counterexample { left, right, reason })
    }
}

/// Builds a relation witnessing that `q` simulates `p` (default budget).
pub fn simulation_build<S1, S2, L>(
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
    weak: bool,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    simulation_build_within(p, q, weak, DEFAULT_BUDGET)
}

/// As [`simulation_build`], erroring once more than `budget` pairs are
/// assumed at the same time.
pub fn simulation_build_within<S1, S2, L>(
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
    weak: bool,
    budget: usize,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    build(p, q, weak, false, budget)
}

/// Builds a bisimulation between `p` and `q` (default budget).
pub fn bisimulation_build<S1, S2, L>(
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
    weak: bool,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    bisimulation_build_within(p, q, weak, DEFAULT_BUDGET)
}

/// As [`bisimulation_build`], erroring once more than `budget` pairs are
/// assumed at the same time.
pub fn bisimulation_build_within<S1, S2, L>(
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
    weak: bool,
    budget: usize,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    build(p, q, weak, true, budget)
}

fn check_direction<S1, S2, L>(
    r: &PairSet<S1, S2, L>,
    pair: &(S1, S2),
    weak: bool,
    of_left: bool,
    budget: usize,
) -> Result<Option<MatchViolation<S1, S2>>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    let a = r.lts1().process(pair.0.clone());
    let b = r.lts2().process(pair.1.clone());
    let violation = |label: &L, escapes: bool| {
        let (left, right, label) = (pair.0.clone(), pair.1.clone(), label.to_string());
        if escapes {
            MatchViolation::EscapesRelation { left, right, label, of_left }
        } else {
            MatchViolation::Unmatched { left, right, label, of_left }
        }
    };
    if of_left {
        for (l, s_next) in sorted_edges(&a) {
            let candidates = responses(&b, &l, weak, budget)?;
            if candidates.is_empty() {
                return Ok(Some(violation(&l, false)));
            }
            if !candidates.iter().any(|c| r.contains(&(s_next.clone(), c.state().clone()))) {
                return Ok(Some(violation(&l, true)));
            }
        }
    } else {
        for (l, t_next) in sorted_edges(&b) {
            let candidates = responses(&a, &l, weak, budget)?;
            if candidates.is_empty() {
                return Ok(Some(violation(&l, false)));
            }
            if !candidates.iter().any(|c| r.contains(&(c.state().clone(), t_next.clone()))) {
                return Ok(Some(violation(&l, true)));
            }
        }
    }
    Ok(None)
}

/// Verifies that every pair of `r` has each left transition answered inside
/// `r` (default budget). Answers `None` when `r` is a simulation.
pub fn simulation_check<S1, S2, L>(
    r: &PairSet<S1, S2, L>,
    weak: bool,
) -> Result<Option<MatchViolation<S1, S2>>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    simulation_check_within(r, weak, DEFAULT_BUDGET)
}

pub fn simulation_check_within<S1, S2, L>(
    r: &PairSet<S1, S2, L>,
    weak: bool,
    budget: usize,
) -> Result<Option<MatchViolation<S1, S2>>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    for pair in r.pairs() {
        if let Some(v) = check_direction(r, pair, weak, true, budget)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// Verifies `r` in both directions. Answers `None` when `r` is a
/// bisimulation (default budget in [`bisimulation_check`]).
pub fn bisimulation_check<S1, S2, L>(
    r: &PairSet<S1, S2, L>,
    weak: bool,
) -> Result<Option<MatchViolation<S1, S2>>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    bisimulation_check_within(r, weak, DEFAULT_BUDGET)
}

pub fn bisimulation_check_within<S1, S2, L>(
    r: &PairSet<S1, S2, L>,
    weak: bool,
    budget: usize,
) -> Result<Option<MatchViolation<S1, S2>>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    for pair in r.pairs() {
        if let Some(v) = check_direction(r, pair, weak, true, budget)? {
            return Ok(Some(v));
        }
        if let Some(v) = check_direction(r, pair, weak, false, budget)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

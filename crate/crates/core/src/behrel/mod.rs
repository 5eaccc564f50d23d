//! Coinductive behavioural relations over processes.
//!
//! A compliance relation is a finite set of state pairs in which every pair
//! satisfies a chosen predicate, closed under synchronisation successors and
//! under joint internal moves. [`compliance_build`] synthesises such a
//! relation (or returns a counterexample pair) by worklist exploration;
//! [`compliance_check`] verifies a given pair set against the same clauses
//! and is implemented separately, so hand-written relations can be audited
//! without trusting the builder. Simulation and bisimulation follow the
//! same build/check discipline in [`sim`](self).

mod sim;

pub use sim::{
    bisimulation_build, bisimulation_build_within, bisimulation_check,
    bisimulation_check_within, simulation_build, simulation_build_within, simulation_check,
    simulation_check_within, MatchViolation,
};

use std::collections::{HashSet, VecDeque};
use std::fmt::{self, Display};
use std::sync::Arc;

use thiserror::Error;

use crate::lts::{LabelKind, Lts, LtsError, Proc, DEFAULT_BUDGET};
use crate::rel::{dedup_preserving, Cardinality, Value};

type PredFn<S1, S2, L> =
    Arc<dyn Fn(&Proc<S1, L>, &Proc<S2, L>, usize) -> Result<Option<String>, LtsError> + Send + Sync>;

/// A named pair predicate. `eval` answers `None` when the pair satisfies the
/// predicate and `Some(reason)` when it does not; the budget caps any weak
/// moves the predicate needs to take.
pub struct CompliancePred<S1, S2, L> {
    name: String,
    pred: PredFn<S1, S2, L>,
}

impl<S1, S2, L> Clone for CompliancePred<S1, S2, L> {
    fn clone(&self) -> Self {
        CompliancePred { name: self.name.clone(), pred: Arc::clone(&self.pred) }
    }
}

impl<S1: Value, S2: Value, L: Value> CompliancePred<S1, S2, L> {
    pub fn new(
        name: &str,
        pred: impl Fn(&Proc<S1, L>, &Proc<S2, L>, usize) -> Result<Option<String>, LtsError>
            + Send
            + Sync
            + 'static,
    ) -> Self {
        CompliancePred { name: name.to_string(), pred: Arc::new(pred) }
    }

    /// Identity tag carried into every relation this predicate builds.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(
        &self,
        p: &Proc<S1, L>,
        q: &Proc<S2, L>,
        budget: usize,
    ) -> Result<Option<String>, LtsError> {
        (self.pred)(p, q, budget)
    }
}

/// A finite set of state pairs, tagged with the name of the condition it
/// was built (or is claimed) to satisfy. The two transition systems are
/// carried alongside so the pairs can be re-evaluated, and every pair keeps
/// a printed snapshot so verdicts render readably.
pub struct PairSet<S1, S2, L> {
    name: String,
    lts1: Lts<S1, L>,
    lts2: Lts<S2, L>,
    pairs: Vec<(S1, S2)>,
    printed: Vec<(String, String)>,
    index: HashSet<(S1, S2)>,
}

impl<S1, S2, L> fmt::Debug for PairSet<S1, S2, L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairSet")
            .field("name", &self.name)
            .field("pairs", &self.printed)
            .finish()
    }
}

impl<S1: Value, S2: Value, L: Clone> Clone for PairSet<S1, S2, L> {
    fn clone(&self) -> Self {
        PairSet {
            name: self.name.clone(),
            lts1: self.lts1.clone(),
            lts2: self.lts2.clone(),
            pairs: self.pairs.clone(),
            printed: self.printed.clone(),
            index: self.index.clone(),
        }
    }
}

impl<S1, S2, L> PairSet<S1, S2, L>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value,
{
    pub fn from_pairs(
        name: &str,
        lts1: Lts<S1, L>,
        lts2: Lts<S2, L>,
        pairs: impl IntoIterator<Item = (S1, S2)>,
    ) -> Self {
        let pairs = dedup_preserving(pairs.into_iter().collect());
        let printed = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let index = pairs.iter().cloned().collect();
        PairSet { name: name.to_string(), lts1, lts2, pairs, printed, index }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lts1(&self) -> &Lts<S1, L> {
        &self.lts1
    }

    pub fn lts2(&self) -> &Lts<S2, L> {
        &self.lts2
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: &(S1, S2)) -> bool {
        self.index.contains(pair)
    }

    pub fn pairs(&self) -> &[(S1, S2)] {
        &self.pairs
    }

    /// Printed snapshots of the pairs, in insertion order.
    pub fn printed_pairs(&self) -> &[(String, String)] {
        &self.printed
    }

    /// The same set with both sides swapped.
    pub fn transposed(&self) -> PairSet<S2, S1, L> {
        PairSet::from_pairs(
            &self.name,
            self.lts2.clone(),
            self.lts1.clone(),
            self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())),
        )
    }
}

/// Outcome of a build: either a finite relation containing the initial
/// pair, or a pair of states witnessing the failure.
pub enum Verdict<S1, S2, L> {
    Relation(PairSet<S1, S2, L>),
    Counterexample { left: S1, right: S2, reason: String },
}

impl<S1: Display, S2: Display, L> fmt::Debug for Verdict<S1, S2, L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Relation(r) => f.debug_tuple("Relation").field(r).finish(),
            Verdict::Counterexample { left, right, reason } => f
                .debug_struct("Counterexample")
                .field("left", &left.to_string())
                .field("right", &right.to_string())
                .field("reason", reason)
                .finish(),
        }
    }
}

impl<S1: Value, S2: Value, L> Verdict<S1, S2, L> {
    pub fn is_relation(&self) -> bool {
        matches!(self, Verdict::Relation(_))
    }

    pub fn relation(&self) -> Option<&PairSet<S1, S2, L>> {
        match self {
            Verdict::Relation(r) => Some(r),
            Verdict::Counterexample { .. } => None,
        }
    }
}

/// First defect found when verifying a pair set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckViolation<S1, S2> {
    /// A pair in the set fails the predicate.
    PredFailed { left: S1, right: S2, reason: String },
    /// A pair required by the closure clauses is missing from the set.
    MissingPair { from: (S1, S2), missing: (S1, S2), via: String },
}

impl<S1: Display, S2: Display> Display for CheckViolation<S1, S2> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckViolation::PredFailed { left, right, reason } => {
                write!(f, "pair ({left}, {right}) fails the predicate: {reason}")
            }
            CheckViolation::MissingPair { from, missing, via } => write!(
                f,
                "pair ({}, {}) requires ({}, {}) via {}, which is not in the relation",
                from.0, from.1, missing.0, missing.1, via
            ),
        }
    }
}

/// Error in a hand-written relation file.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("relation file line {line}: {message}")]
pub struct RelationFileError {
    pub line: usize,
    pub message: String,
}

/// Edges sorted by the printed form of their label, so enumeration order
/// (and therefore every verdict) is reproducible.
pub(crate) fn sorted_edges<S, L>(p: &Proc<S, L>) -> Vec<(L, S)>
where
    S: Value,
    L: Value + Display,
{
    let mut edges = p.edges();
    edges.sort_by_key(|(l, _)| l.to_string());
    edges
}

/// Builds a compliance relation from `(p, q)` with the default budget.
pub fn compliance_build<S1, S2, L>(
    pred: &CompliancePred<S1, S2, L>,
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    compliance_build_within(pred, p, q, DEFAULT_BUDGET)
}

/// Worklist synthesis of a compliance relation: visit `(p, q)`; for each
/// visited pair evaluate the predicate (a failure is returned as a
/// counterexample), then enqueue every synchronisation successor and every
/// joint internal reduct. The relation is complete when the worklist
/// empties; visiting more than `budget` distinct pairs is an error, since
/// the required relation may be infinite.
pub fn compliance_build_within<S1, S2, L>(
    pred: &CompliancePred<S1, S2, L>,
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
    budget: usize,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    let mut visited: HashSet<(S1, S2)> = HashSet::new();
    let mut order: Vec<(S1, S2)> = Vec::new();
    let mut queue: VecDeque<(Proc<S1, L>, Proc<S2, L>)> = VecDeque::new();

    visited.insert((p.state().clone(), q.state().clone()));
    order.push((p.state().clone(), q.state().clone()));
    queue.push_back((p.clone(), q.clone()));

    while let Some((a, b)) = queue.pop_front() {
        if let Some(reason) = pred.eval(&a, &b, budget)? {
            return Ok(Verdict::Counterexample {
                left: a.state().clone(),
                right: b.state().clone(),
                reason,
            });
        }

        let mut successors: Vec<(Proc<S1, L>, Proc<S2, L>)> = Vec::new();
        for (l1, s1) in sorted_edges(&a) {
            for (l2, s2) in sorted_edges(&b) {
                if a.lts().can_sync(&l1, &l2) {
                    successors.push((a.lts().process(s1.clone()), b.lts().process(s2)));
                }
            }
        }
        let left_reducts = a.weak_reducts_within(budget)?;
        let right_reducts = b.weak_reducts_within(budget)?;
        for a2 in &left_reducts {
            for b2 in &right_reducts {
                successors.push((a2.clone(), b2.clone()));
            }
        }

        for (a2, b2) in successors {
            let key = (a2.state().clone(), b2.state().clone());
            if visited.insert(key.clone()) {
                if visited.len() > budget {
                    return Err(LtsError::BudgetExhausted(budget));
                }
                order.push(key);
                queue.push_back((a2, b2));
            }
        }
    }

    Ok(Verdict::Relation(PairSet::from_pairs(
        pred.name(),
        p.lts().clone(),
        q.lts().clone(),
        order,
    )))
}

/// Guaranteed-terminating entry point: refuses processes whose transition
/// relations are not tagged finite.
pub fn compliance_build_finite<S1, S2, L>(
    pred: &CompliancePred<S1, S2, L>,
    p: &Proc<S1, L>,
    q: &Proc<S2, L>,
) -> Result<Verdict<S1, S2, L>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    if p.lts().cardinality() != Cardinality::Finite || q.lts().cardinality() != Cardinality::Finite
    {
        return Err(LtsError::UnboundedRefused);
    }
    compliance_build(pred, p, q)
}

/// Verifies a pair set against the compliance clauses with the default
/// budget. Answers `None` when the set is a genuine compliance relation.
pub fn compliance_check<S1, S2, L>(
    pred: &CompliancePred<S1, S2, L>,
    r: &PairSet<S1, S2, L>,
) -> Result<Option<CheckViolation<S1, S2>>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    compliance_check_within(pred, r, DEFAULT_BUDGET)
}

/// Independent verification: every pair must satisfy the predicate, and the
/// set must already contain every synchronisation successor and every joint
/// internal reduct of its pairs. Deliberately shares no exploration state
/// with the builder.
pub fn compliance_check_within<S1, S2, L>(
    pred: &CompliancePred<S1, S2, L>,
    r: &PairSet<S1, S2, L>,
    budget: usize,
) -> Result<Option<CheckViolation<S1, S2>>, LtsError>
where
    S1: Value + Display,
    S2: Value + Display,
    L: Value + Display,
{
    for (s1, s2) in r.pairs() {
        let a = r.lts1().process(s1.clone());
        let b = r.lts2().process(s2.clone());

        if let Some(reason) = pred.eval(&a, &b, budget)? {
            return Ok(Some(CheckViolation::PredFailed {
                left: s1.clone(),
                right: s2.clone(),
                reason,
            }));
        }

        for (l1, t1) in sorted_edges(&a) {
            for (l2, t2) in sorted_edges(&b) {
                if a.lts().can_sync(&l1, &l2) {
                    let need = (t1.clone(), t2);
                    if !r.contains(&need) {
                        return Ok(Some(CheckViolation::MissingPair {
                            from: (s1.clone(), s2.clone()),
                            missing: need,
                            via: format!("synchronisation of {l1} with {l2}"),
                        }));
                    }
                }
            }
        }

        let left_reducts = a.weak_reducts_within(budget)?;
        let right_reducts = b.weak_reducts_within(budget)?;
        for a2 in &left_reducts {
            for b2 in &right_reducts {
                let need = (a2.state().clone(), b2.state().clone());
                if !r.contains(&need) {
                    return Ok(Some(CheckViolation::MissingPair {
                        from: (s1.clone(), s2.clone()),
                        missing: need,
                        via: "internal moves".to_string(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Finds an output of `p` with no weak dual input answer from `q`.
fn unmatched_output<SA, SB, L>(
    p: &Proc<SA, L>,
    q: &Proc<SB, L>,
    budget: usize,
) -> Result<Option<L>, LtsError>
where
    SA: Value,
    SB: Value,
    L: Value + Display,
{
    let mut outputs: Vec<L> = p
        .transitions()
        .into_iter()
        .filter(|l| p.lts().classify(l) == LabelKind::Output)
        .collect();
    if outputs.is_empty() {
        return Ok(None);
    }
    outputs.sort_by_key(|l| l.to_string());
    let reducts = q.weak_reducts_within(budget)?;
    'next_output: for l in outputs {
        for r in &reducts {
            for l2 in r.transitions() {
                if r.lts().classify(&l2) == LabelKind::Input && p.lts().can_sync(&l, &l2) {
                    continue 'next_output;
                }
            }
        }
        return Ok(Some(l));
    }
    Ok(None)
}

/// Every output of either side is answered, possibly after internal moves
/// of the other side, by a dual input.
pub fn io_compliance<S1, S2, L>() -> CompliancePred<S1, S2, L>
where
    S1: Value,
    S2: Value,
    L: Value + Display,
{
    CompliancePred::new("io-compliance", |p, q, budget| {
        if let Some(l) = unmatched_output(p, q, budget)? {
            return Ok(Some(format!(
                "output {l} of the left process is not matched by a weak dual input of the right process"
            )));
        }
        if let Some(l) = unmatched_output(q, p, budget)? {
            return Ok(Some(format!(
                "output {l} of the right process is not matched by a weak dual input of the left process"
            )));
        }
        Ok(None)
    })
}

/// Either the left process is finished, or the pair can still move: a
/// synchronisable pair of transitions, or an internal move on either side.
pub fn progress<S1, S2, L>() -> CompliancePred<S1, S2, L>
where
    S1: Value,
    S2: Value,
    L: Value + Display,
{
    CompliancePred::new("progress", |p, q, _budget| {
        let left = p.edges();
        if left.is_empty() {
            return Ok(None);
        }
        let right = q.edges();
        for (l1, _) in &left {
            for (l2, _) in &right {
                if p.lts().can_sync(l1, l2) {
                    return Ok(None);
                }
            }
        }
        if left.iter().any(|(l, _)| p.lts().classify(l) == LabelKind::Internal)
            || right.iter().any(|(l, _)| q.lts().classify(l) == LabelKind::Internal)
        {
            return Ok(None);
        }
        Ok(Some(
            "the left process wants to move but no synchronisation or internal move is available"
                .to_string(),
        ))
    })
}

/// The composition of the two processes can weakly observe `success`.
pub fn correct_composition<S1, S2, L>(success: L) -> CompliancePred<S1, S2, L>
where
    S1: Value,
    S2: Value,
    L: Value + Display,
{
    CompliancePred::new("correct-composition", move |p, q, budget| {
        let barbs = p.par(q).weak_barbs_within(budget)?;
        if barbs.contains(&success) {
            Ok(None)
        } else {
            Ok(Some(format!(
                "success label {success} is not weakly observable in the composition"
            )))
        }
    })
}

/// Parses a hand-written relation file: one pair per line as two
/// tab-separated printed states, `#` comments and blank lines skipped.
pub fn parse_relation_pairs(text: &str) -> Result<Vec<(String, String)>, RelationFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                out.push((a.trim().to_string(), b.trim().to_string()));
            }
            _ => {
                return Err(RelationFileError {
                    line: i + 1,
                    message: "expected exactly two tab-separated printed states".to_string(),
                })
            }
        }
    }
    Ok(out)
}

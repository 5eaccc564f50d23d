//! Labelled transition systems and processes.
//!
//! An [`Lts`] bundles a lazy transition relation with the hooks that give
//! labels meaning: a classifier (input/output/internal/plain), a
//! synchronisation predicate with its joint label, and an optional
//! distinguished internal label. A [`Proc`] is an `Lts` paired with a
//! current state; all exploration starts from processes.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

use thiserror::Error;

use crate::rel::{Cardinality, Rel, TransRel, Value};

/// Role a label plays when processes are composed or buffered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    Input,
    Output,
    Internal,
    Plain,
}

/// Exploration depth measured in transitions from the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Unbounded,
    Finite(usize),
}

/// Default cap on visited states for weak-transition closures and
/// relation building.
pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("asynchronous form requires an internal label")]
    NoInternalLabel,
    #[error("unbounded exploration refused: transition relation is not tagged finite")]
    UnboundedRefused,
    #[error("exploration budget of {0} states exhausted")]
    BudgetExhausted(usize),
}

/// State of a process whose outputs are decoupled through a FIFO buffer:
/// the underlying state plus the queue of pending output labels, head
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AsyncState<S, L> {
    pub base: S,
    pub buffer: Vec<L>,
}

impl<S: fmt::Display, L: fmt::Display> fmt::Display for AsyncState<S, L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},[", self.base)?;
        for (i, l) in self.buffer.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "])")
    }
}

/// A labelled transition system over states `S` and labels `L`.
///
/// Composition operators take their label hooks from the left operand, so
/// compose systems that agree on what their shared labels mean.
pub struct Lts<S, L> {
    trans: TransRel<S, L>,
    classify: Arc<dyn Fn(&L) -> LabelKind + Send + Sync>,
    syncp: Arc<dyn Fn(&L, &L) -> bool + Send + Sync>,
    sync_label: Arc<dyn Fn(&L) -> L + Send + Sync>,
    internal_label: Option<L>,
    // completed internal closures, keyed by start state; sound to share
    // across clones because the transition relation is pure
    reduct_cache: Arc<Mutex<HashMap<S, Vec<S>>>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn fresh_cache<S>() -> Arc<Mutex<HashMap<S, Vec<S>>>> {
    Arc::new(Mutex::new(HashMap::new()))
}

impl<S, L: Clone> Clone for Lts<S, L> {
    fn clone(&self) -> Self {
        Lts {
            trans: self.trans.clone(),
            classify: Arc::clone(&self.classify),
            syncp: Arc::clone(&self.syncp),
            sync_label: Arc::clone(&self.sync_label),
            internal_label: self.internal_label.clone(),
            reduct_cache: Arc::clone(&self.reduct_cache),
        }
    }
}

impl<S: Value, L: Value> Lts<S, L> {
    /// Wraps a transition relation. Labels start out `Plain`, nothing
    /// synchronises, and there is no internal label; use the `with_*`
    /// builders to change that.
    pub fn new(trans: TransRel<S, L>) -> Self {
        Lts {
            trans,
            classify: Arc::new(|_| LabelKind::Plain),
            syncp: Arc::new(|_, _| false),
            sync_label: Arc::new(|l: &L| l.clone()),
            internal_label: None,
            reduct_cache: fresh_cache(),
        }
    }

    /// Finite system from explicit `(source, label, target)` triples, all
    /// labels `Plain`.
    pub fn from_triples(triples: impl IntoIterator<Item = (S, L, S)>) -> Self {
        Self::from_classified_triples(triples, |_| LabelKind::Plain)
    }

    /// Finite system from triples with a label classifier.
    pub fn from_classified_triples(
        triples: impl IntoIterator<Item = (S, L, S)>,
        classify: impl Fn(&L) -> LabelKind + Send + Sync + 'static,
    ) -> Self {
        let mut map: HashMap<S, Vec<(L, S)>> = HashMap::new();
        for (src, label, dst) in triples {
            let entry = map.entry(src).or_default();
            if !entry.iter().any(|e| e.0 == label && e.1 == dst) {
                entry.push((label, dst));
            }
        }
        let trans = Rel::new(
            move |s: &S| map.get(s).cloned().unwrap_or_default(),
            Cardinality::Finite,
        );
        Lts::new(trans).with_classify(classify)
    }

    pub fn with_classify(
        mut self,
        classify: impl Fn(&L) -> LabelKind + Send + Sync + 'static,
    ) -> Self {
        self.classify = Arc::new(classify);
        // the classifier decides which labels are internal, so closures
        // computed under the old one no longer apply
        self.reduct_cache = fresh_cache();
        self
    }

    pub fn with_sync(
        mut self,
        syncp: impl Fn(&L, &L) -> bool + Send + Sync + 'static,
        sync_label: impl Fn(&L) -> L + Send + Sync + 'static,
    ) -> Self {
        self.syncp = Arc::new(syncp);
        self.sync_label = Arc::new(sync_label);
        self
    }

    pub fn with_internal_label(mut self, label: L) -> Self {
        self.internal_label = Some(label);
        self
    }

    pub fn trans(&self) -> &TransRel<S, L> {
        &self.trans
    }

    pub fn cardinality(&self) -> Cardinality {
        self.trans.cardinality()
    }

    pub fn classify(&self, label: &L) -> LabelKind {
        (self.classify)(label)
    }

    pub fn can_sync(&self, l1: &L, l2: &L) -> bool {
        (self.syncp)(l1, l2)
    }

    pub fn sync_label(&self, label: &L) -> L {
        (self.sync_label)(label)
    }

    pub fn internal_label(&self) -> Option<&L> {
        self.internal_label.as_ref()
    }

    /// The process sitting at `state` in this system.
    pub fn process(&self, state: S) -> Proc<S, L> {
        Proc {
            lts: self.clone(),
            state,
        }
    }

    /// Parallel composition over pair states: interleavings of both sides
    /// plus a joint move for every `syncp`-related pair of moves. Label
    /// hooks come from `self`.
    pub fn par<S2: Value>(&self, other: &Lts<S2, L>) -> Lts<(S, S2), L> {
        Lts {
            trans: self
                .trans
                .par(&other.trans, Arc::clone(&self.syncp), Arc::clone(&self.sync_label)),
            classify: Arc::clone(&self.classify),
            syncp: Arc::clone(&self.syncp),
            sync_label: Arc::clone(&self.sync_label),
            internal_label: self.internal_label.clone(),
            reduct_cache: fresh_cache(),
        }
    }

    /// Sequencing over pair states: the left side runs until its image is
    /// empty, then the right side takes over. Label hooks come from `self`.
    pub fn seq<S2: Value>(&self, other: &Lts<S2, L>) -> Lts<(S, S2), L> {
        Lts {
            trans: self.trans.seq(&other.trans),
            classify: Arc::clone(&self.classify),
            syncp: Arc::clone(&self.syncp),
            sync_label: Arc::clone(&self.sync_label),
            internal_label: self.internal_label.clone(),
            reduct_cache: fresh_cache(),
        }
    }

    /// Decouples outputs through a FIFO buffer. In state `(s, buffer)`:
    /// every output move of `s` is replaced by an internal move that
    /// appends its label to the buffer; the buffer head can always be
    /// emitted; every non-output move of `s` happens unchanged.
    ///
    /// Needs an internal label, and the result is only ever
    /// finite-branching since buffers can grow without bound.
    pub fn to_async(&self) -> Result<Lts<AsyncState<S, L>, L>, LtsError> {
        let internal = self
            .internal_label
            .clone()
            .ok_or(LtsError::NoInternalLabel)?;
        let base = self.trans.clone();
        let classify = Arc::clone(&self.classify);
        let tau = internal.clone();
        let trans = Rel::new(
            move |st: &AsyncState<S, L>| {
                let image = base.image(&st.base);
                let mut out = Vec::new();
                for (l, s2) in &image {
                    if classify(l) == LabelKind::Output {
                        let mut buffer = st.buffer.clone();
                        buffer.push(l.clone());
                        out.push((
                            tau.clone(),
                            AsyncState {
                                base: s2.clone(),
                                buffer,
                            },
                        ));
                    }
                }
                if let Some((head, rest)) = st.buffer.split_first() {
                    out.push((
                        head.clone(),
                        AsyncState {
                            base: st.base.clone(),
                            buffer: rest.to_vec(),
                        },
                    ));
                }
                for (l, s2) in &image {
                    if classify(l) != LabelKind::Output {
                        out.push((
                            l.clone(),
                            AsyncState {
                                base: s2.clone(),
                                buffer: st.buffer.clone(),
                            },
                        ));
                    }
                }
                out
            },
            Cardinality::FiniteBranching,
        );
        Ok(Lts {
            trans,
            classify: Arc::clone(&self.classify),
            syncp: Arc::clone(&self.syncp),
            sync_label: Arc::clone(&self.sync_label),
            internal_label: Some(internal),
        })
    }

    /// Keeps only transitions whose label satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&L) -> bool + Send + Sync + 'static) -> Lts<S, L> {
        Lts {
            trans: self.trans.filter(keep),
            classify: Arc::clone(&self.classify),
            syncp: Arc::clone(&self.syncp),
            sync_label: Arc::clone(&self.sync_label),
            internal_label: self.internal_label.clone(),
        }
    }
}

/// A system together with a current state.
pub struct Proc<S, L> {
    lts: Lts<S, L>,
    state: S,
}

impl<S: Clone, L: Clone> Clone for Proc<S, L> {
    fn clone(&self) -> Self {
        Proc {
            lts: self.lts.clone(),
            state: self.state.clone(),
        }
    }
}

impl<S: fmt::Debug, L> fmt::Debug for Proc<S, L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Proc").field("state", &self.state).finish()
    }
}

impl<S: Value, L: Value> Proc<S, L> {
    pub fn state(&self) -> &S {
        &self.state
    }

    pub fn lts(&self) -> &Lts<S, L> {
        &self.lts
    }

    /// One-step edges from the current state.
    pub fn edges(&self) -> Vec<(L, S)> {
        self.lts.trans.image(&self.state)
    }

    /// Labels enabled right now, duplicate-free.
    pub fn transitions(&self) -> Vec<L> {
        crate::rel::dedup_preserving(self.edges().into_iter().map(|(l, _)| l).collect())
    }

    /// Processes reached by one `label` step, duplicate-free by state.
    pub fn after(&self, label: &L) -> Vec<Proc<S, L>> {
        let states = crate::rel::dedup_preserving(
            self.edges()
                .into_iter()
                .filter(|(l, _)| l == label)
                .map(|(_, s)| s)
                .collect(),
        );
        states.into_iter().map(|s| self.lts.process(s)).collect()
    }

    pub fn par<S2: Value>(&self, other: &Proc<S2, L>) -> Proc<(S, S2), L> {
        self.lts
            .par(&other.lts)
            .process((self.state.clone(), other.state.clone()))
    }

    pub fn seq<S2: Value>(&self, other: &Proc<S2, L>) -> Proc<(S, S2), L> {
        self.lts
            .seq(&other.lts)
            .process((self.state.clone(), other.state.clone()))
    }

    /// The buffered form of this process, starting with an empty buffer.
    pub fn to_async(&self) -> Result<Proc<AsyncState<S, L>, L>, LtsError> {
        Ok(self.lts.to_async()?.process(AsyncState {
            base: self.state.clone(),
            buffer: Vec::new(),
        }))
    }

    pub fn filter(&self, keep: impl Fn(&L) -> bool + Send + Sync + 'static) -> Proc<S, L> {
        self.lts.filter(keep).process(self.state.clone())
    }

    /// Everything reachable through internal moves alone, including this
    /// process itself. Breadth-first, so the order is by distance.
    pub fn weak_reducts(&self) -> Result<Vec<Proc<S, L>>, LtsError> {
        self.weak_reducts_within(DEFAULT_BUDGET)
    }

    /// [`Proc::weak_reducts`] with an explicit visited-state budget;
    /// exceeding it reports [`LtsError::BudgetExhausted`] rather than
    /// diverging on infinite internal runs.
    pub fn weak_reducts_within(&self, budget: usize) -> Result<Vec<Proc<S, L>>, LtsError> {
        let mut visited: HashSet<S> = HashSet::new();
        let mut order: Vec<S> = Vec::new();
        let mut queue: VecDeque<S> = VecDeque::new();
        visited.insert(self.state.clone());
        order.push(self.state.clone());
        queue.push_back(self.state.clone());
        while let Some(s) = queue.pop_front() {
            for (l, t) in self.lts.trans.image(&s) {
                if self.lts.classify(&l) != LabelKind::Internal {
                    continue;
                }
                if visited.insert(t.clone()) {
                    if visited.len() > budget {
                        return Err(LtsError::BudgetExhausted(budget));
                    }
                    order.push(t.clone());
                    queue.push_back(t);
                }
            }
        }
        Ok(order.into_iter().map(|s| self.lts.process(s)).collect())
    }

    /// Weak barbs: every non-internal label enabled by some weak reduct.
    pub fn weak_barbs(&self) -> Result<Vec<L>, LtsError> {
        self.weak_barbs_within(DEFAULT_BUDGET)
    }

    pub fn weak_barbs_within(&self, budget: usize) -> Result<Vec<L>, LtsError> {
        let mut labels = Vec::new();
        for p in self.weak_reducts_within(budget)? {
            for l in p.transitions() {
                if self.lts.classify(&l) != LabelKind::Internal {
                    labels.push(l);
                }
            }
        }
        Ok(crate::rel::dedup_preserving(labels))
    }
}

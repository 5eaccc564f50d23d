//! Lazy image-based relations.
//!
//! A relation from `D` to `C` is kept as its image function: given an
//! element of `D` it produces the finite set of related elements of `C`.
//! Nothing is ever enumerated globally, so relations over infinite domains
//! cost nothing until a particular image is requested. Combinators build
//! new relations out of old ones without forcing any image.

use std::collections::HashSet;
use std::hash::Hash;
use std::sync::Arc;

/// Bound satisfied by anything usable as a state or a label.
pub trait Value: Clone + Eq + Hash + Send + Sync + 'static {}
impl<T: Clone + Eq + Hash + Send + Sync + 'static> Value for T {}

/// What is known about the overall size of a relation.
///
/// `Finite` survives composition only when both operands are finite;
/// anything else degrades to `FiniteBranching` (every image finite, the
/// relation as a whole possibly not).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cardinality {
    Finite,
    FiniteBranching,
}

impl Cardinality {
    pub fn combine(self, other: Cardinality) -> Cardinality {
        match (self, other) {
            (Cardinality::Finite, Cardinality::Finite) => Cardinality::Finite,
            _ => Cardinality::FiniteBranching,
        }
    }
}

/// Removes duplicates while keeping first-occurrence order, so image
/// enumeration stays deterministic.
pub(crate) fn dedup_preserving<T: Clone + Eq + Hash>(items: Vec<T>) -> Vec<T> {
    let mut seen = HashSet::with_capacity(items.len());
    let mut out = Vec::with_capacity(items.len());
    for it in items {
        if seen.insert(it.clone()) {
            out.push(it);
        }
    }
    out
}

/// A lazy relation from `D` to `C`, represented by its image function.
///
/// The image function must be pure: same input, same output, no visible
/// side effects. Images are returned duplicate-free in a deterministic
/// order. Cloning is cheap (the function is shared).
pub struct Rel<D, C> {
    image_fn: Arc<dyn Fn(&D) -> Vec<C> + Send + Sync>,
    cardinality: Cardinality,
}

impl<D, C> Clone for Rel<D, C> {
    fn clone(&self) -> Self {
        Rel {
            image_fn: Arc::clone(&self.image_fn),
            cardinality: self.cardinality,
        }
    }
}

impl<D: Value, C: Value> Rel<D, C> {
    /// Wraps an image function. `f` must be pure; its results are
    /// deduplicated but otherwise returned in the order produced.
    pub fn new(
        f: impl Fn(&D) -> Vec<C> + Send + Sync + 'static,
        cardinality: Cardinality,
    ) -> Self {
        Rel {
            image_fn: Arc::new(move |d| dedup_preserving(f(d))),
            cardinality,
        }
    }

    /// The empty relation: every image is empty.
    pub fn empty() -> Self {
        Rel::new(|_| Vec::new(), Cardinality::Finite)
    }

    /// Finite relation from an explicit list of pairs. Image order follows
    /// first occurrence in `pairs`.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (D, C)>) -> Self {
        let pairs: Vec<(D, C)> = pairs.into_iter().collect();
        Rel::new(
            move |d| {
                pairs
                    .iter()
                    .filter(|(a, _)| a == d)
                    .map(|(_, b)| b.clone())
                    .collect()
            },
            Cardinality::Finite,
        )
    }

    /// All elements related to `d`, duplicate-free.
    pub fn image(&self, d: &D) -> Vec<C> {
        (self.image_fn)(d)
    }

    pub fn cardinality(&self) -> Cardinality {
        self.cardinality
    }

    /// Pointwise union: the image under the union is the set union of the
    /// two images.
    pub fn union(&self, other: &Rel<D, C>) -> Rel<D, C> {
        let a = self.clone();
        let b = other.clone();
        Rel::new(
            move |d| {
                let mut out = a.image(d);
                out.extend(b.image(d));
                out
            },
            self.cardinality.combine(other.cardinality),
        )
    }
}

/// A transition relation: states of type `S` relate to (label, successor)
/// pairs. This is the shape every transition system here boils down to.
pub type TransRel<S, L> = Rel<S, (L, S)>;

impl<S: Value, L: Value> TransRel<S, L> {
    /// Sequencing over pair states `(p, q)`: while `p` can still move only
    /// `p` moves; once the image of `p` is empty, `q` takes over. The
    /// handover is decided per state, by emptiness of the left image.
    pub fn seq<S2: Value>(&self, other: &TransRel<S2, L>) -> TransRel<(S, S2), L> {
        let r1 = self.clone();
        let r2 = other.clone();
        let card = self.cardinality.combine(other.cardinality);
        Rel::new(
            move |st: &(S, S2)| {
                let (p, q) = st;
                let left = r1.image(p);
                if !left.is_empty() {
                    left.into_iter()
                        .map(|(l, p2)| (l, (p2, q.clone())))
                        .collect()
                } else {
                    r2.image(q)
                        .into_iter()
                        .map(|(l, q2)| (l, (p.clone(), q2)))
                        .collect()
                }
            },
            card,
        )
    }

    /// Parallel composition over pair states: left moves alone, right moves
    /// alone, and for every pair of moves accepted by `syncp` a joint move
    /// labelled `sync_label` of the left label.
    pub fn par<S2: Value>(
        &self,
        other: &TransRel<S2, L>,
        syncp: Arc<dyn Fn(&L, &L) -> bool + Send + Sync>,
        sync_label: Arc<dyn Fn(&L) -> L + Send + Sync>,
    ) -> TransRel<(S, S2), L> {
        let r1 = self.clone();
        let r2 = other.clone();
        let card = self.cardinality.combine(other.cardinality);
        Rel::new(
            move |st: &(S, S2)| {
                let (p, q) = st;
                let left = r1.image(p);
                let right = r2.image(q);
                let mut out: Vec<(L, (S, S2))> = Vec::new();
                for (l, p2) in &left {
                    out.push((l.clone(), (p2.clone(), q.clone())));
                }
                for (l, q2) in &right {
                    out.push((l.clone(), (p.clone(), q2.clone())));
                }
                for (l1, p2) in &left {
                    for (l2, q2) in &right {
                        if syncp(l1, l2) {
                            out.push((sync_label(l1), (p2.clone(), q2.clone())));
                        }
                    }
                }
                out
            },
            card,
        )
    }

    /// Keeps only transitions whose label satisfies `keep`. States are left
    /// alone, so a state may become stuck without disappearing.
    pub fn filter(&self, keep: impl Fn(&L) -> bool + Send + Sync + 'static) -> TransRel<S, L> {
        let r = self.clone();
        Rel::new(
            move |s| r.image(s).into_iter().filter(|(l, _)| keep(l)).collect(),
            self.cardinality,
        )
    }

    /// Relabels states and labels through the isomorphism `state_to` /
    /// `label_to`. Because images are computed on demand, the mapped
    /// relation needs `state_from` to take a query back to the original
    /// state space; it must invert `state_to` on every state the result is
    /// queried at.
    ///
    /// Panics if `state_from` returns `None`, i.e. the queried state is not
    /// in the range of `state_to`.
    pub fn map<S2: Value, L2: Value>(
        &self,
        state_to: impl Fn(&S) -> S2 + Send + Sync + 'static,
        label_to: impl Fn(&L) -> L2 + Send + Sync + 'static,
        state_from: impl Fn(&S2) -> Option<S> + Send + Sync + 'static,
    ) -> TransRel<S2, L2> {
        let r = self.clone();
        Rel::new(
            move |s2: &S2| {
                let s = state_from(s2)
                    .expect("relation map: queried state is outside the mapped range");
                r.image(&s)
                    .into_iter()
                    .map(|(l, t)| (label_to(&l), state_to(&t)))
                    .collect()
            },
            self.cardinality,
        )
    }
}

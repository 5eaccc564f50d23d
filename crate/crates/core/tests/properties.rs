//! Property tests for the relational operators, the transition-system
//! layer, the CCS front-end, and the behavioural-relation framework.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use proptest::prelude::*;

use relts::behrel::{
    self, bisimulation_build_within, bisimulation_check_within, compliance_build_within,
    compliance_check_within, io_compliance, progress, simulation_build_within,
    simulation_check_within, Verdict,
};
use relts::ccs::{self, canon, CcsPrefix, CcsTerm};
use relts::explore::{self, reachable};
use relts::lts::{LabelKind, Lts, Proc};
use relts::rel::Rel;
use relts::{Depth, TransRel};

// ---------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------

const STATES: u8 = 5;

type Triple = (u8, String, u8);

/// Arbitrary finite transition-triple set over states `0..STATES` with the
/// given label alphabet. Tests build the lazy relation with [`rel_of`] and
/// keep the raw triples for brute-force oracles.
fn triples(labels: &'static [&'static str]) -> impl Strategy<Value = Vec<Triple>> {
    let triple = (0..STATES, prop::sample::select(labels), 0..STATES)
        .prop_map(|(s, l, t)| (s, l.to_string(), t));
    prop::collection::vec(triple, 0..12)
}

fn rel_of(triples: &[Triple]) -> TransRel<u8, String> {
    Rel::from_pairs(triples.iter().map(|(s, l, t)| (*s, (l.clone(), *t))).collect::<Vec<_>>())
}

fn dual(a: &str, b: &str) -> bool {
    let flips = |x: &str, y: &str| x.starts_with('!') && y.starts_with('?') && x[1..] == y[1..];
    flips(a, b) || flips(b, a)
}

fn any_prefix() -> impl Strategy<Value = CcsPrefix> {
    prop_oneof![
        prop::sample::select(vec!["a", "b"]).prop_map(|n| CcsPrefix::Input(n.to_string())),
        prop::sample::select(vec!["a", "b"]).prop_map(|n| CcsPrefix::Output(n.to_string())),
        Just(CcsPrefix::Tau),
    ]
}

/// Closed recursion-free terms over two channel names.
fn finite_term() -> impl Strategy<Value = CcsTerm> {
    Just(CcsTerm::Nil).prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            3 => (any_prefix(), inner.clone()).prop_map(|(p, t)| CcsTerm::prefix(p, t)),
            2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| CcsTerm::choice(a, b)),
            1 => (inner.clone(), inner.clone()).prop_map(|(a, b)| CcsTerm::par(a, b)),
            1 => (prop::sample::select(vec!["a", "b"]), inner)
                .prop_map(|(n, t)| CcsTerm::restrict(n, t)),
        ]
    })
}

fn replace_nils(term: &CcsTerm, var: &str) -> CcsTerm {
    match term {
        CcsTerm::Nil => CcsTerm::var(var),
        CcsTerm::Prefix(p, c) => CcsTerm::prefix(p.clone(), replace_nils(c, var)),
        CcsTerm::Choice(a, b) => CcsTerm::choice(replace_nils(a, var), replace_nils(b, var)),
        CcsTerm::Par(a, b) => CcsTerm::par(replace_nils(a, var), replace_nils(b, var)),
        CcsTerm::Rec(x, b) if x == var => CcsTerm::rec(x.clone(), (**b).clone()),
        CcsTerm::Rec(x, b) => CcsTerm::rec(x.clone(), replace_nils(b, var)),
        CcsTerm::Var(x) => CcsTerm::var(x.clone()),
        CcsTerm::Restrict(n, b) => CcsTerm::restrict(n.clone(), replace_nils(b, var)),
    }
}

/// Guarded recursive terms: a prefix guard, then a body whose stuck leaves
/// loop back to the binder.
fn rec_term() -> impl Strategy<Value = CcsTerm> {
    (any_prefix(), finite_term())
        .prop_map(|(p, t)| CcsTerm::rec("Z", CcsTerm::prefix(p, replace_nils(&t, "Z"))))
}

fn any_term() -> impl Strategy<Value = CcsTerm> {
    prop_oneof![3 => finite_term(), 1 => rec_term()]
}

fn linear_term(prefixes: &[CcsPrefix]) -> CcsTerm {
    prefixes
        .iter()
        .rev()
        .fold(CcsTerm::Nil, |acc, p| CcsTerm::prefix(p.clone(), acc))
}

fn edge_set<S: Ord + Clone, L: Ord + Clone>(edges: &[(L, S)]) -> BTreeSet<(L, S)> {
    edges.iter().cloned().collect()
}

// ---------------------------------------------------------------------
// relational operators
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn union_is_pointwise_set_union(
        t1 in triples(&["x", "y", "z"]),
        t2 in triples(&["x", "y", "z"]),
    ) {
        let u = rel_of(&t1).union(&rel_of(&t2));
        for s in 0..STATES {
            let got: BTreeSet<_> = u.image(&s).into_iter().collect();
            let want: BTreeSet<(String, u8)> = t1
                .iter()
                .chain(t2.iter())
                .filter(|(src, _, _)| *src == s)
                .map(|(_, l, d)| (l.clone(), *d))
                .collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn seq_obeys_the_case_split(
        t1 in triples(&["x", "y"]),
        t2 in triples(&["x", "y"]),
    ) {
        let r1 = rel_of(&t1);
        let r2 = rel_of(&t2);
        let s = r1.seq(&r2);
        for p in 0..STATES {
            for q in 0..STATES {
                let image = s.image(&(p, q));
                let left = r1.image(&p);
                if !left.is_empty() {
                    let want: BTreeSet<_> =
                        left.into_iter().map(|(l, p2)| (l, (p2, q))).collect();
                    prop_assert_eq!(edge_set(&image), want);
                } else {
                    let want: BTreeSet<_> =
                        r2.image(&q).into_iter().map(|(l, q2)| (l, (p, q2))).collect();
                    prop_assert_eq!(edge_set(&image), want);
                }
            }
        }
    }

    #[test]
    fn par_matches_the_three_case_oracle(
        t1 in triples(&["!a", "?a", "!b", "?b"]),
        t2 in triples(&["!a", "?a", "!b", "?b"]),
    ) {
        let composed = rel_of(&t1).par(
            &rel_of(&t2),
            Arc::new(|l1: &String, l2: &String| dual(l1, l2)),
            Arc::new(|_: &String| "tau".to_string()),
        );
        for p in 0..STATES {
            for q in 0..STATES {
                let mut want: BTreeSet<(String, (u8, u8))> = BTreeSet::new();
                for (src, l, d) in &t1 {
                    if *src == p {
                        want.insert((l.clone(), (*d, q)));
                    }
                }
                for (src, l, d) in &t2 {
                    if *src == q {
                        want.insert((l.clone(), (p, *d)));
                    }
                }
                for (s1, l1, d1) in &t1 {
                    for (s2, l2, d2) in &t2 {
                        if *s1 == p && *s2 == q && dual(l1, l2) {
                            want.insert(("tau".to_string(), (*d1, *d2)));
                        }
                    }
                }
                prop_assert_eq!(edge_set(&composed.image(&(p, q))), want);
            }
        }
    }

    #[test]
    fn par_commutes_up_to_swapping(
        t1 in triples(&["!a", "?a", "!b", "?b"]),
        t2 in triples(&["!a", "?a", "!b", "?b"]),
    ) {
        let syncp = || Arc::new(|l1: &String, l2: &String| dual(l1, l2));
        let tau = || Arc::new(|_: &String| "tau".to_string());
        let lr = rel_of(&t1).par(&rel_of(&t2), syncp(), tau());
        let rl = rel_of(&t2).par(&rel_of(&t1), syncp(), tau());
        for p in 0..STATES {
            for q in 0..STATES {
                let direct = edge_set(&lr.image(&(p, q)));
                let swapped: BTreeSet<_> = rl
                    .image(&(q, p))
                    .into_iter()
                    .map(|(l, (b, a))| (l, (a, b)))
                    .collect();
                prop_assert_eq!(direct, swapped);
            }
        }
    }

    #[test]
    fn filter_is_a_pointwise_subset_and_tautology_is_identity(
        t in triples(&["x", "y", "z"]),
    ) {
        let r = rel_of(&t);
        let only_x = r.filter(|l: &String| l == "x");
        let everything = r.filter(|_| true);
        for s in 0..STATES {
            let full = edge_set(&r.image(&s));
            let kept = only_x.image(&s);
            prop_assert!(kept.iter().all(|(l, _)| l == "x"));
            prop_assert!(kept.iter().all(|e| full.contains(e)));
            prop_assert_eq!(edge_set(&everything.image(&s)), full);
        }
    }

    #[test]
    fn mapping_there_and_back_is_the_identity(t in triples(&["x", "y"])) {
        let r = rel_of(&t);
        let shifted = r.map(
            |s: &u8| *s as u32 + 100,
            |l: &String| l.clone(),
            |s: &u32| u8::try_from(s.checked_sub(100)?).ok(),
        );
        let back = shifted.map(
            |s: &u32| (*s - 100) as u8,
            |l: &String| l.clone(),
            |s: &u8| Some(*s as u32 + 100),
        );
        for s in 0..STATES {
            prop_assert_eq!(edge_set(&back.image(&s)), edge_set(&r.image(&s)));
        }
    }
}

// ---------------------------------------------------------------------
// transition systems and processes
// ---------------------------------------------------------------------

fn classified(triples: Vec<Triple>) -> Lts<u8, String> {
    Lts::from_triples(triples)
        .with_classify(|l: &String| match l.chars().next() {
            Some('!') => LabelKind::Output,
            Some('?') => LabelKind::Input,
            _ => LabelKind::Internal,
        })
        .with_sync(|l1: &String, l2: &String| dual(l1, l2), |_| "tau".to_string())
        .with_internal_label("tau".to_string())
}

proptest! {
    #[test]
    fn composed_processes_match_the_interleaving_oracle(
        t1 in triples(&["!a", "?a", "!b", "?b"]),
        t2 in triples(&["!a", "?a", "!b", "?b"]),
        root1 in 0..STATES,
        root2 in 0..STATES,
    ) {
        let left = classified(t1.clone());
        let right = classified(t2.clone());
        let both = left.process(root1).par(&right.process(root2));
        let diagram = reachable(&both, Depth::Unbounded).unwrap();
        for (i, (p, q)) in diagram.states.iter().enumerate() {
            let got: BTreeSet<(String, (u8, u8))> = diagram
                .edges
                .iter()
                .filter(|(from, _, _)| *from == i)
                .map(|(_, l, to)| (l.clone(), diagram.states[*to]))
                .collect();
            let mut want: BTreeSet<(String, (u8, u8))> = BTreeSet::new();
            for (s, l, d) in &t1 {
                if s == p { want.insert((l.clone(), (*d, *q))); }
            }
            for (s, l, d) in &t2 {
                if s == q { want.insert((l.clone(), (*p, *d))); }
            }
            for (s1, l1, d1) in &t1 {
                for (s2, l2, d2) in &t2 {
                    if s1 == p && s2 == q && dual(l1, l2) {
                        want.insert(("tau".to_string(), (*d1, *d2)));
                    }
                }
            }
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn sequencing_only_moves_the_right_component_when_the_left_is_stuck(
        t1 in triples(&["x", "y"]),
        t2 in triples(&["x", "y"]),
        root1 in 0..STATES,
        root2 in 0..STATES,
    ) {
        let left = Lts::from_triples(t1.clone());
        let right = Lts::from_triples(t2.clone());
        let seq = left.process(root1).seq(&right.process(root2));
        let diagram = reachable(&seq, Depth::Unbounded).unwrap();
        for (from, _, to) in &diagram.edges {
            let (p, q) = diagram.states[*from];
            let (p2, q2) = diagram.states[*to];
            if left.trans().image(&p).is_empty() {
                prop_assert_eq!(p, p2);
            } else {
                prop_assert_eq!(q, q2);
            }
        }
    }

    #[test]
    fn filtered_diagrams_only_keep_matching_labels(
        t in triples(&["x", "y", "z"]),
        root in 0..STATES,
    ) {
        let filtered = Lts::from_triples(t).process(root).filter(|l: &String| l != "z");
        let diagram = reachable(&filtered, Depth::Unbounded).unwrap();
        prop_assert!(diagram.edges.iter().all(|(_, l, _)| l != "z"));
    }

    #[test]
    fn dot_text_counts_agree_with_the_diagram(
        t in triples(&["x", "y"]),
        root in 0..STATES,
    ) {
        let p = Lts::from_triples(t).process(root);
        let diagram = reachable(&p, Depth::Unbounded).unwrap();
        let text = p.to_dot(Depth::Unbounded).unwrap();
        let statements: Vec<&str> =
            text.lines().filter(|l| l.trim_end().ends_with(';')).collect();
        let edge_lines = statements.iter().filter(|l| l.contains(" -> ")).count();
        let node_lines = statements.len() - edge_lines;
        prop_assert_eq!(node_lines, diagram.node_count());
        prop_assert_eq!(edge_lines, diagram.edge_count());
        prop_assert_eq!(text.matches('{').count(), text.matches('}').count());
    }
}

// ---------------------------------------------------------------------
// asynchronous transformation
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn async_buffers_hold_outputs_only(t in any_term()) {
        let p = ccs::lts().process(canon(&t)).to_async().unwrap();
        let diagram = reachable(&p, Depth::Finite(4)).unwrap();
        for state in &diagram.states {
            prop_assert!(state
                .buffer
                .iter()
                .all(|l| matches!(l, CcsPrefix::Output(_))));
        }
    }

    #[test]
    fn async_agrees_between_system_and_process_level(t in any_term(), depth in 0usize..5) {
        let term = canon(&t);
        let via_proc = ccs::lts().process(term.clone()).to_async().unwrap();
        let via_lts = ccs::lts().to_async().unwrap().process(relts::AsyncState {
            base: term,
            buffer: Vec::new(),
        });
        let a = reachable(&via_proc, Depth::Finite(depth)).unwrap();
        let b = reachable(&via_lts, Depth::Finite(depth)).unwrap();
        let canon_a = explore::canonical_edges(&a, |l| l.to_string());
        let canon_b = explore::canonical_edges(&b, |l| l.to_string());
        prop_assert_eq!(a.node_count(), b.node_count());
        prop_assert_eq!(canon_a, canon_b);
    }

    #[test]
    fn async_preserves_fifo_output_order(
        prefixes in prop::collection::vec(any_prefix(), 0..5),
    ) {
        let term = linear_term(&prefixes);
        let expected: Vec<CcsPrefix> = prefixes
            .iter()
            .filter(|p| matches!(p, CcsPrefix::Output(_)))
            .cloned()
            .collect();
        let root = ccs::lts().process(canon(&term)).to_async().unwrap();

        // enumerate every maximal trace of the (acyclic) async system
        let mut stack = vec![(root, Vec::<CcsPrefix>::new())];
        while let Some((proc_, trace)) = stack.pop() {
            let edges = proc_.edges();
            if edges.is_empty() {
                let outputs: Vec<CcsPrefix> = trace
                    .iter()
                    .filter(|l| matches!(l, CcsPrefix::Output(_)))
                    .cloned()
                    .collect();
                prop_assert_eq!(&outputs, &expected);
                continue;
            }
            for (label, next) in edges {
                let mut longer = trace.clone();
                longer.push(label);
                stack.push((proc_.lts().process(next), longer));
            }
        }
    }
}

// ---------------------------------------------------------------------
// CCS semantics
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn printing_canonical_terms_round_trips(t in any_term()) {
        let text = canon(&t).to_string();
        let reparsed = ccs::parse(&text).unwrap();
        prop_assert_eq!(reparsed.to_string(), text);
    }

    #[test]
    fn choice_image_is_the_union_of_branch_images(a in finite_term(), b in finite_term()) {
        let whole: HashSet<_> = ccs::image(&CcsTerm::choice(a.clone(), b.clone()))
            .unwrap()
            .into_iter()
            .collect();
        let mut parts: HashSet<_> = ccs::image(&a).unwrap().into_iter().collect();
        parts.extend(ccs::image(&b).unwrap());
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn restriction_blocks_the_name_and_wraps_continuations(t in finite_term()) {
        let name = "a";
        let blocked = |l: &CcsPrefix| match l {
            CcsPrefix::Input(n) | CcsPrefix::Output(n) => n == name,
            CcsPrefix::Tau => false,
        };
        let restricted = ccs::image(&CcsTerm::restrict(name, t.clone())).unwrap();
        prop_assert!(restricted.iter().all(|(l, _)| !blocked(l)));

        let inner: HashSet<_> = ccs::image(&t)
            .unwrap()
            .into_iter()
            .filter(|(l, _)| !blocked(l))
            .map(|(l, c)| (l, canon(&CcsTerm::restrict(name, c))))
            .collect();
        let got: HashSet<_> = restricted.into_iter().collect();
        prop_assert_eq!(got, inner);
    }

    #[test]
    fn recursion_unfolds_by_substitution(t in rec_term()) {
        let CcsTerm::Rec(x, body) = &t else { unreachable!() };
        let unfolded = ccs::substitute(body, x, &t);
        prop_assert_eq!(ccs::image(&t).unwrap(), ccs::image(&unfolded).unwrap());
    }
}

// ---------------------------------------------------------------------
// behavioural relations
// ---------------------------------------------------------------------

/// Pairs reachable from the root by synchronisation successors and joint
/// internal reducts — an independent replay of the closure the builder
/// explores, used to confirm counterexamples.
fn reachable_pairs(
    p: &Proc<CcsTerm, CcsPrefix>,
    q: &Proc<CcsTerm, CcsPrefix>,
    budget: usize,
) -> Result<HashSet<(CcsTerm, CcsTerm)>, relts::LtsError> {
    let mut seen = HashSet::new();
    let mut stack = vec![(p.clone(), q.clone())];
    seen.insert((p.state().clone(), q.state().clone()));
    while let Some((a, b)) = stack.pop() {
        let mut push = |a2: Proc<CcsTerm, CcsPrefix>,
                        b2: Proc<CcsTerm, CcsPrefix>,
                        seen: &mut HashSet<(CcsTerm, CcsTerm)>,
                        stack: &mut Vec<_>| {
            if seen.insert((a2.state().clone(), b2.state().clone())) {
                stack.push((a2, b2));
            }
        };
        for (l1, s1) in a.edges() {
            for (l2, s2) in b.edges() {
                if a.lts().can_sync(&l1, &l2) {
                    push(
                        a.lts().process(s1.clone()),
                        b.lts().process(s2),
                        &mut seen,
                        &mut stack,
                    );
                }
            }
        }
        for a2 in a.weak_reducts_within(budget)? {
            for b2 in b.weak_reducts_within(budget)? {
                push(a2.clone(), b2, &mut seen, &mut stack);
            }
        }
        if seen.len() > budget {
            return Err(relts::LtsError::BudgetExhausted(budget));
        }
    }
    Ok(seen)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compliance_verdicts_are_sound(left in any_term(), right in any_term()) {
        let p = ccs::lts().process(canon(&left));
        let q = ccs::lts().process(canon(&right));
        // kept small: every visited pair recomputes internal closures, and on
        // terms whose unfoldings grow the closure cost grows with the budget
        let budget = 100;
        for pred in [io_compliance(), progress()] {
            match compliance_build_within(&pred, &p, &q, budget) {
                Ok(Verdict::Relation(r)) => {
                    prop_assert!(r.contains(&(p.state().clone(), q.state().clone())));
                    prop_assert_eq!(compliance_check_within(&pred, &r, budget).unwrap(), None);
                }
                Ok(Verdict::Counterexample { left, right, .. }) => {
                    let cp = ccs::lts().process(left.clone());
                    let cq = ccs::lts().process(right.clone());
                    prop_assert!(pred.eval(&cp, &cq, budget).unwrap().is_some());
                    // the witness pair really is reachable from the roots
                    if let Ok(replay) = reachable_pairs(&p, &q, budget) {
                        prop_assert!(replay.contains(&(left, right)));
                    }
                }
                Err(_) => {} // budget exhaustion is not a verdict
            }
        }
    }

    #[test]
    fn compliance_verdicts_survive_a_larger_budget(left in any_term(), right in any_term()) {
        let p = ccs::lts().process(canon(&left));
        let q = ccs::lts().process(canon(&right));
        let pred = io_compliance();
        let small = compliance_build_within(&pred, &p, &q, 60);
        let large = compliance_build_within(&pred, &p, &q, 240);
        if let (Ok(s), Ok(l)) = (small, large) {
            prop_assert_eq!(s.is_relation(), l.is_relation());
        }
    }

    #[test]
    fn bisimulation_relations_verify_and_transpose(left in any_term(), right in any_term()) {
        let p = ccs::lts().process(canon(&left));
        let q = ccs::lts().process(canon(&right));
        // kept small: on infinite-state terms the search dives until the
        // budget trips, and the terms it builds grow with the dive depth
        let budget = 200;
        match bisimulation_build_within(&p, &q, false, budget) {
            Ok(Verdict::Relation(r)) => {
                prop_assert!(r.contains(&(p.state().clone(), q.state().clone())));
                prop_assert_eq!(bisimulation_check_within(&r, false, budget).unwrap(), None);
                prop_assert_eq!(
                    bisimulation_check_within(&r.transposed(), false, budget).unwrap(),
                    None
                );
            }
            Ok(Verdict::Counterexample { .. }) | Err(_) => {}
        }
    }

    #[test]
    fn every_term_simulates_itself(t in any_term()) {
        let p = ccs::lts().process(canon(&t));
        match simulation_build_within(&p, &p, false, 150) {
            Ok(v) => {
                let r = v.relation().expect("a process always simulates itself");
                prop_assert_eq!(simulation_check_within(r, false, 150).unwrap(), None);
            }
            Err(_) => {} // state space too large for the probe budget
        }
    }

    #[test]
    fn every_term_is_bisimilar_to_itself(t in any_term()) {
        let p = ccs::lts().process(canon(&t));
        if let Ok(v) = bisimulation_build_within(&p, &p, false, 150) {
            prop_assert!(v.is_relation());
        }
    }

    #[test]
    fn weak_bisimilarity_ignores_a_leading_internal_step(t in finite_term()) {
        let plain = ccs::lts().process(canon(&t));
        let padded = ccs::lts().process(canon(&CcsTerm::prefix(CcsPrefix::Tau, t.clone())));
        if let Ok(v) = bisimulation_build_within(&padded, &plain, true, 300) {
            prop_assert!(v.is_relation());
        }
    }
}

#[test]
fn io_relations_can_be_rechecked_as_progress_relations_deterministically() {
    let p = ccs::process("!a.0").unwrap();
    let q = ccs::process("?a.0").unwrap();
    let built = behrel::compliance_build(&io_compliance(), &p, &q).unwrap();
    let r = built.relation().unwrap();
    let runs: Vec<_> = (0..3)
        .map(|_| behrel::compliance_check(&progress(), r).unwrap())
        .collect();
    assert!(runs.iter().all(|v| *v == runs[0]));
    assert_eq!(runs[0], None);
}

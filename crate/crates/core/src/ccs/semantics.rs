//! CCS semantics as a transition system over terms.
//!
//! The image of a term is computed one constructor at a time. Choice is the
//! union of the branch images, parallel composition is the generic
//! relational composition with continuations rebuilt into `Par` terms, and
//! recursion unfolds by substitution. Every emitted continuation is
//! canonically renamed so alpha-variants meet in the same state.

use std::sync::Arc;

use super::{canon, free_vars, parse, substitute, CcsError, CcsPrefix, CcsTerm};
use crate::lts::{LabelKind, Lts, Proc};
use crate::rel::{Cardinality, Rel, TransRel};

/// True for a send and a receive on the same channel, in either order.
pub fn dual(a: &CcsPrefix, b: &CcsPrefix) -> bool {
    match (a, b) {
        (CcsPrefix::Input(x), CcsPrefix::Output(y)) => x == y,
        (CcsPrefix::Output(x), CcsPrefix::Input(y)) => x == y,
        _ => false,
    }
}

/// One-step moves of a closed term. Free recursion variables are reported
/// as an error; terms straight from [`parse`] are always closed.
pub fn image(term: &CcsTerm) -> Result<Vec<(CcsPrefix, CcsTerm)>, CcsError> {
    let free = free_vars(term);
    if let Some(name) = free.into_iter().next() {
        return Err(CcsError::FreeVariable(name));
    }
    Ok(image_closed(term))
}

fn image_closed(term: &CcsTerm) -> Vec<(CcsPrefix, CcsTerm)> {
    match term {
        CcsTerm::Nil => Vec::new(),
        CcsTerm::Prefix(p, cont) => vec![(p.clone(), canon(cont))],
        CcsTerm::Choice(a, b) => {
            let mut out = image_closed(a);
            out.extend(image_closed(b));
            crate::rel::dedup_preserving(out)
        }
        CcsTerm::Par(a, b) => par_image(a, b),
        CcsTerm::Rec(x, body) => image_closed(&substitute(body, x, term)),
        CcsTerm::Restrict(name, body) => {
            let blocked = |l: &CcsPrefix| match l {
                CcsPrefix::Input(n) | CcsPrefix::Output(n) => n == name,
                CcsPrefix::Tau => false,
            };
            image_closed(body)
                .into_iter()
                .filter(|(l, _)| !blocked(l))
                .map(|(l, cont)| (l, canon(&CcsTerm::restrict(name.clone(), cont))))
                .collect()
        }
        CcsTerm::Var(x) => panic!(
            "free recursion variable '{x}': CCS states must be closed terms"
        ),
    }
}

// Parallel composition goes through the generic relational operators: the
// component relations are composed over pair states, then mapped back into
// Par terms.
fn par_image(left: &CcsTerm, right: &CcsTerm) -> Vec<(CcsPrefix, CcsTerm)> {
    let r = trans_rel();
    let composed = r.par(&r, Arc::new(dual), Arc::new(|_: &CcsPrefix| CcsPrefix::Tau));
    let rebuilt = composed.map(
        |pair: &(CcsTerm, CcsTerm)| canon(&CcsTerm::par(pair.0.clone(), pair.1.clone())),
        |l: &CcsPrefix| l.clone(),
        |t: &CcsTerm| match t {
            CcsTerm::Par(a, b) => Some(((**a).clone(), (**b).clone())),
            _ => None,
        },
    );
    rebuilt.image(&CcsTerm::par(left.clone(), right.clone()))
}

/// The transition relation over all closed terms.
pub fn trans_rel() -> TransRel<CcsTerm, CcsPrefix> {
    Rel::new(|t: &CcsTerm| image_closed(t), Cardinality::FiniteBranching)
}

/// The CCS transition system: inputs and outputs synchronise pairwise into
/// `tau`, which is the internal label.
pub fn lts() -> Lts<CcsTerm, CcsPrefix> {
    Lts::new(trans_rel())
        .with_classify(|p: &CcsPrefix| match p {
            CcsPrefix::Input(_) => LabelKind::Input,
            CcsPrefix::Output(_) => LabelKind::Output,
            CcsPrefix::Tau => LabelKind::Internal,
        })
        .with_sync(dual, |_| CcsPrefix::Tau)
        .with_internal_label(CcsPrefix::Tau)
}

/// Parses `text` and places it as a process in the CCS system.
pub fn process(text: &str) -> Result<Proc<CcsTerm, CcsPrefix>, CcsError> {
    Ok(lts().process(parse(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moves(text: &str) -> Vec<(String, String)> {
        image(&parse(text).unwrap())
            .unwrap()
            .into_iter()
            .map(|(l, t)| (l.to_string(), t.to_string()))
            .collect()
    }

    #[test]
    fn nil_is_stuck() {
        assert!(moves("0").is_empty());
    }

    #[test]
    fn prefix_fires_once() {
        assert_eq!(moves("!a.0"), vec![("!a".into(), "0".into())]);
    }

    #[test]
    fn choice_unions_branch_images() {
        assert_eq!(
            moves("?b.0 + ?c.!d.0"),
            vec![("?b".into(), "0".into()), ("?c".into(), "!d.0".into())]
        );
    }

    #[test]
    fn par_interleaves_and_synchronises() {
        assert_eq!(
            moves("!a.0 | ?a.0"),
            vec![
                ("!a".into(), "(0 | ?a.0)".into()),
                ("?a".into(), "(!a.0 | 0)".into()),
                ("tau".into(), "(0 | 0)".into()),
            ]
        );
    }

    #[test]
    fn rec_unfolds_one_step() {
        assert_eq!(
            moves("rec X. !a.X"),
            vec![("!a".into(), "(rec X0.!a.X0)".into())]
        );
        // one-step unfolding law: same image as the substituted body
        let rec = parse("rec X. !a.X").unwrap();
        if let CcsTerm::Rec(x, body) = &rec {
            let unfolded = substitute(body, x, &rec);
            assert_eq!(image(&rec).unwrap(), image(&unfolded).unwrap());
        } else {
            unreachable!();
        }
    }

    #[test]
    fn restriction_blocks_the_named_channel() {
        assert_eq!(moves("(!a.0 + !b.0) \\ a"), vec![("!b".into(), "(0 \\ a)".into())]);
        // tau passes through, and the wrapper survives on continuations
        assert_eq!(
            moves("(!a.0 | ?a.0) \\ a"),
            vec![("tau".into(), "((0 | 0) \\ a)".into())]
        );
        assert!(moves("!a.0 \\ a").is_empty());
    }

    #[test]
    fn images_of_alpha_variants_coincide() {
        let a = parse("rec X. !a.X").unwrap();
        let b = parse("rec Other. !a.Other").unwrap();
        assert_eq!(a, b);
        assert_eq!(image(&a).unwrap(), image(&b).unwrap());
        // the unfolding comes back to the state itself
        let (_, cont) = &image(&a).unwrap()[0];
        assert_eq!(cont, &a);
    }

    #[test]
    fn free_variables_are_reported() {
        assert_eq!(
            image(&CcsTerm::var("X")).unwrap_err(),
            CcsError::FreeVariable("X".into())
        );
    }

    #[test]
    fn process_transitions_match_the_image() {
        let p = process("!a.(?b.0 + ?c.0)").unwrap();
        let labels: Vec<String> = p.transitions().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, vec!["!a"]);
        let next = &p.after(&CcsPrefix::Output("a".into()))[0];
        let labels: Vec<String> = next.transitions().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, vec!["?b", "?c"]);
    }

    #[test]
    fn composed_processes_offer_inputs_outputs_and_sync() {
        let p = process("!a.(?b.0 + ?c.0)").unwrap();
        let q = process("?a.!c.0").unwrap();
        let both = p.par(&q);
        let labels: Vec<String> = both.transitions().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, vec!["!a", "?a", "tau"]);
    }
}

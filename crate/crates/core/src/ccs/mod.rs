//! A small CCS dialect: terms, a concrete syntax, and semantics as a
//! labelled transition system whose states are the terms themselves.
//!
//! Grammar (loosest to tightest: `|`, `+`, `\`, prefix `.`):
//!
//! ```text
//! P   ::= "0" | pfx "." P | P "+" P | P "|" P
//!       | "rec" IDENT "." P | IDENT | P "\" IDENT | "(" P ")"
//! pfx ::= "?" IDENT | "!" IDENT | "tau"
//! ```
//!
//! `rec` reaches as far right as it can; identifiers are
//! `[A-Za-z][A-Za-z0-9_]*`. The pretty printer emits a fully parenthesised
//! canonical form that parses back to the same term.
//!
//! Recursion binders are renamed apart to canonical names (`X0`, `X1`, ...
//! in traversal order), so terms that differ only in bound names collapse
//! to the same state and unfolding a renamed term meets its original.

mod parser;
mod semantics;

pub use parser::parse;
pub use semantics::{dual, image, lts, process, trans_rel};

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CcsError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unbound recursion variable '{name}' at {line}:{col}")]
    UnboundVariable {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("recursion variable '{name}' is not prefix-guarded at {line}:{col}")]
    UnguardedRecursion {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("term has free recursion variable '{0}'")]
    FreeVariable(String),
}

/// An action prefix: receive on a name, send on a name, or the silent
/// step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CcsPrefix {
    Input(String),
    Output(String),
    Tau,
}

impl fmt::Display for CcsPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CcsPrefix::Input(name) => write!(f, "?{name}"),
            CcsPrefix::Output(name) => write!(f, "!{name}"),
            CcsPrefix::Tau => write!(f, "tau"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CcsTerm {
    /// The finished process.
    Nil,
    /// Prefix then continuation.
    Prefix(CcsPrefix, Box<CcsTerm>),
    /// Nondeterministic choice.
    Choice(Box<CcsTerm>, Box<CcsTerm>),
    /// Parallel composition.
    Par(Box<CcsTerm>, Box<CcsTerm>),
    /// Recursion binder.
    Rec(String, Box<CcsTerm>),
    /// Recursion variable.
    Var(String),
    /// Restriction: no visible action on the named channel.
    Restrict(String, Box<CcsTerm>),
}

impl fmt::Display for CcsTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CcsTerm::Nil => write!(f, "0"),
            CcsTerm::Prefix(p, cont) => write!(f, "{p}.{cont}"),
            CcsTerm::Choice(a, b) => write!(f, "({a} + {b})"),
            CcsTerm::Par(a, b) => write!(f, "({a} | {b})"),
            CcsTerm::Rec(x, body) => write!(f, "(rec {x}.{body})"),
            CcsTerm::Var(x) => write!(f, "{x}"),
            CcsTerm::Restrict(name, body) => write!(f, "({body} \\ {name})"),
        }
    }
}

impl CcsTerm {
    pub fn prefix(p: CcsPrefix, cont: CcsTerm) -> CcsTerm {
        CcsTerm::Prefix(p, Box::new(cont))
    }

    pub fn choice(a: CcsTerm, b: CcsTerm) -> CcsTerm {
        CcsTerm::Choice(Box::new(a), Box::new(b))
    }

    pub fn par(a: CcsTerm, b: CcsTerm) -> CcsTerm {
        CcsTerm::Par(Box::new(a), Box::new(b))
    }

    pub fn rec(x: impl Into<String>, body: CcsTerm) -> CcsTerm {
        CcsTerm::Rec(x.into(), Box::new(body))
    }

    pub fn var(x: impl Into<String>) -> CcsTerm {
        CcsTerm::Var(x.into())
    }

    pub fn restrict(name: impl Into<String>, body: CcsTerm) -> CcsTerm {
        CcsTerm::Restrict(name.into(), Box::new(body))
    }
}

/// Free recursion variables of a term.
pub fn free_vars(term: &CcsTerm) -> HashSet<String> {
    fn go(term: &CcsTerm, bound: &mut Vec<String>, free: &mut HashSet<String>) {
        match term {
            CcsTerm::Nil => {}
            CcsTerm::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    free.insert(x.clone());
                }
            }
            CcsTerm::Prefix(_, cont) => go(cont, bound, free),
            CcsTerm::Choice(a, b) | CcsTerm::Par(a, b) => {
                go(a, bound, free);
                go(b, bound, free);
            }
            CcsTerm::Restrict(_, body) => go(body, bound, free),
            CcsTerm::Rec(x, body) => {
                bound.push(x.clone());
                go(body, bound, free);
                bound.pop();
            }
        }
    }
    let mut free = HashSet::new();
    go(term, &mut Vec::new(), &mut free);
    free
}

/// True when every free occurrence of `var` in `term` sits under at least
/// one prefix.
pub fn is_guarded(term: &CcsTerm, var: &str) -> bool {
    match term {
        CcsTerm::Nil => true,
        CcsTerm::Var(x) => x != var,
        CcsTerm::Prefix(_, _) => true,
        CcsTerm::Choice(a, b) | CcsTerm::Par(a, b) => is_guarded(a, var) && is_guarded(b, var),
        CcsTerm::Restrict(_, body) => is_guarded(body, var),
        CcsTerm::Rec(x, body) => x == var || is_guarded(body, var),
    }
}

fn fresh_name(base: &str, avoid: &HashSet<String>) -> String {
    let mut n = 0usize;
    loop {
        let candidate = format!("{base}_{n}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
        n += 1;
    }
}

/// Capture-avoiding substitution of `replacement` for free occurrences of
/// `Var(var)`. A `rec` binding the same variable shadows it; binders that
/// would capture a free variable of `replacement` are renamed first.
pub fn substitute(term: &CcsTerm, var: &str, replacement: &CcsTerm) -> CcsTerm {
    match term {
        CcsTerm::Nil => CcsTerm::Nil,
        CcsTerm::Var(x) => {
            if x == var {
                replacement.clone()
            } else {
                term.clone()
            }
        }
        CcsTerm::Prefix(p, cont) => CcsTerm::prefix(p.clone(), substitute(cont, var, replacement)),
        CcsTerm::Choice(a, b) => CcsTerm::choice(
            substitute(a, var, replacement),
            substitute(b, var, replacement),
        ),
        CcsTerm::Par(a, b) => CcsTerm::par(
            substitute(a, var, replacement),
            substitute(b, var, replacement),
        ),
        CcsTerm::Restrict(name, body) => {
            CcsTerm::restrict(name.clone(), substitute(body, var, replacement))
        }
        CcsTerm::Rec(x, body) => {
            if x == var {
                term.clone()
            } else {
                let rep_free = free_vars(replacement);
                if rep_free.contains(x) && free_vars(body).contains(var) {
                    let mut avoid: HashSet<String> = rep_free;
                    avoid.extend(free_vars(body));
                    avoid.insert(var.to_string());
                    let renamed = fresh_name(x, &avoid);
                    let body2 = substitute(body, x, &CcsTerm::var(renamed.clone()));
                    CcsTerm::Rec(renamed, Box::new(substitute(&body2, var, replacement)))
                } else {
                    CcsTerm::Rec(x.clone(), Box::new(substitute(body, var, replacement)))
                }
            }
        }
    }
}

/// Renames every recursion binder to `X0`, `X1`, ... in traversal order.
/// Terms that differ only in bound names map to the same result, and the
/// renaming is idempotent, so canonical terms are stable state identities.
pub fn canon(term: &CcsTerm) -> CcsTerm {
    fn go(term: &CcsTerm, counter: &mut usize, env: &mut Vec<(String, String)>) -> CcsTerm {
        match term {
            CcsTerm::Nil => CcsTerm::Nil,
            CcsTerm::Var(x) => {
                let name = env
                    .iter()
                    .rev()
                    .find(|(orig, _)| orig == x)
                    .map(|(_, new)| new.clone())
                    .unwrap_or_else(|| x.clone());
                CcsTerm::Var(name)
            }
            CcsTerm::Prefix(p, cont) => CcsTerm::prefix(p.clone(), go(cont, counter, env)),
            CcsTerm::Choice(a, b) => {
                let a2 = go(a, counter, env);
                let b2 = go(b, counter, env);
                CcsTerm::choice(a2, b2)
            }
            CcsTerm::Par(a, b) => {
                let a2 = go(a, counter, env);
                let b2 = go(b, counter, env);
                CcsTerm::par(a2, b2)
            }
            CcsTerm::Restrict(name, body) => {
                CcsTerm::restrict(name.clone(), go(body, counter, env))
            }
            CcsTerm::Rec(x, body) => {
                let fresh = format!("X{counter}");
                *counter += 1;
                env.push((x.clone(), fresh.clone()));
                let body2 = go(body, counter, env);
                env.pop();
                CcsTerm::Rec(fresh, Box::new(body2))
            }
        }
    }
    go(term, &mut 0, &mut Vec::new())
}

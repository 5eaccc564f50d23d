//! DOT rendering of reachable diagrams.

use std::fmt::Display;

use crate::explore::{reachable, Diagram};
use crate::lts::{Depth, LtsError, Proc};
use crate::rel::Value;

/// Quotes an identifier for DOT, escaping backslashes and double quotes.
pub fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        if c == '\\' || c == '"' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Renders an explored diagram as a DOT digraph: one node per state, one
/// edge per transition, the root drawn with a heavier outline.
pub fn render<S, L>(
    diagram: &Diagram<S, L>,
    state_text: impl Fn(&S) -> String,
    label_text: impl Fn(&L) -> String,
) -> String {
    let mut out = String::from("digraph {\n");
    for (i, s) in diagram.states.iter().enumerate() {
        let name = quote(&state_text(s));
        if i == 0 {
            out.push_str(&format!("  {name} [penwidth=2];\n"));
        } else {
            out.push_str(&format!("  {name};\n"));
        }
    }
    for (src, label, dst) in &diagram.edges {
        out.push_str(&format!(
            "  {} -> {} [label={}];\n",
            quote(&state_text(&diagram.states[*src])),
            quote(&state_text(&diagram.states[*dst])),
            quote(&label_text(label)),
        ));
    }
    out.push_str("}\n");
    out
}

impl<S: Value, L: Value> Proc<S, L> {
    /// DOT digraph of everything reachable within `max_depth` transitions,
    /// with states and labels rendered by the supplied printers.
    ///
    /// `Depth::Unbounded` is refused unless the transition relation is
    /// tagged finite.
    pub fn to_dot_with(
        &self,
        max_depth: Depth,
        state_text: impl Fn(&S) -> String,
        label_text: impl Fn(&L) -> String,
    ) -> Result<String, LtsError> {
        let diagram = reachable(self, max_depth)?;
        Ok(render(&diagram, state_text, label_text))
    }
}

impl<S: Value + Display, L: Value + Display> Proc<S, L> {
    /// [`Proc::to_dot_with`] using `Display` for states and labels.
    pub fn to_dot(&self, max_depth: Depth) -> Result<String, LtsError> {
        self.to_dot_with(max_depth, |s| s.to_string(), |l| l.to_string())
    }
}

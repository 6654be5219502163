//! Grammar, AST, parser and static checker for the mini-language.
//!
//! The language is deliberately tiny — `int`/`bool` values, no heap, no
//! calls — so that execution and coverage semantics are exactly checkable
//! against a brute-force oracle. The grammar is documented in
//! `docs/minilang.md`; sources use the `.ml0` extension.

pub mod ast;
mod checker;
mod error;
mod lexer;
mod parser;
mod pretty;

pub use ast::*;
pub use error::{Location, ParseError};
pub use parser::parse;
pub use pretty::{canonical, expr_to_string, pretty_print};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
#[error("unknown decision {0:?} in program `{1}`")]
pub struct UnknownDecision(pub DecisionId, pub String);

/// List the atoms of decision `d`'s condition, left to right.
pub fn enumerate_atoms(d: DecisionId, program: &Program) -> Result<Vec<AtomRef>, UnknownDecision> {
    let stmt = program
        .decision(d)
        .ok_or_else(|| UnknownDecision(d, program.name.clone()))?;
    let cond = match &stmt.kind {
        StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => cond,
        _ => unreachable!("decision() only returns if/while"),
    };
    Ok(condition_atoms(cond)
        .into_iter()
        .enumerate()
        .map(|(index, (expr, droppable))| AtomRef {
            decision: d,
            index,
            text: expr_to_string(expr),
            droppable,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atoms_of(cond: &str) -> Vec<AtomRef> {
        let src = format!("fn f(a:bool,b:bool,x:int,y:int)->int {{ if ({cond}) {{ return 1; }} return 0; }}");
        let p = parse(&src).unwrap();
        enumerate_atoms(DecisionId(0), &p).unwrap()
    }

    #[test]
    fn atoms_of_mixed_condition() {
        let atoms = atoms_of("a && (x<0 || y>1)");
        let texts: Vec<_> = atoms.iter().map(|a| a.text.as_str()).collect();
        assert_eq!(texts, vec!["a", "x < 0", "y > 1"]);
        assert!(atoms.iter().all(|a| a.droppable));
    }

    #[test]
    fn single_comparison_is_one_atom() {
        let atoms = atoms_of("x == 0");
        assert_eq!(atoms.len(), 1);
        assert!(!atoms[0].droppable, "lone atom has no sibling to splice");
    }

    #[test]
    fn negated_junction_descends() {
        let atoms = atoms_of("!(a || b)");
        let texts: Vec<_> = atoms.iter().map(|a| a.text.as_str()).collect();
        assert_eq!(texts, vec!["a", "b"]);
    }

    #[test]
    fn unknown_decision_is_an_error() {
        let p = parse("fn f(x:int)->int { return x; }").unwrap();
        assert!(enumerate_atoms(DecisionId(0), &p).is_err());
    }

    #[test]
    fn comparison_operands_are_not_descended() {
        // arithmetic inside a comparison is part of the atom
        let atoms = atoms_of("x + 1 < y * 2");
        assert_eq!(atoms.len(), 1);
    }
}

//! Missing-functionality fault injection and the mutant validity pipeline.
//!
//! A mutant drops one piece of functionality from a program: a branch arm
//! of its first decision statement, or one atom of that decision's
//! condition. Injection is blind and systematic — operators are tried in a
//! fixed priority (else arm, then arm, first droppable atom) and the first
//! edit that still parses and checks wins; decisions are visited in id
//! order until one admits a valid edit.
//!
//! Pipeline: `inject` → `filter_by_t0` (discard mutants the common suite
//! already catches) → `validate_mutant` (discard behavioral no-ops) →
//! `cross_detect` (count which admitted cross suites expose the fault).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::AugmentationResult;
use crate::interp::execute;
use crate::minilang::{
    enumerate_atoms, parse, pretty_print, BinaryOp, DecisionId, Expr, ExprKind, Program,
    ProgramId, Stmt, StmtKind, UnaryOp, Value,
};
use crate::prng::InputSampler;
use crate::testkit::{run_suite, TestSuite};

/// The two missing-functionality operators (the atom variant carries the
/// left-to-right index of the dropped atom).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutationOperator {
    /// Empty the arm taken when the decision is true (the loop body, for
    /// `while`).
    DropThenArm,
    /// Remove the `else` clause.
    DropElseArm,
    /// Remove one atom of the condition, splicing its `&&`/`||` sibling up.
    DropAtom(usize),
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationOperator::DropThenArm => f.write_str("drop_then_arm"),
            MutationOperator::DropElseArm => f.write_str("drop_else_arm"),
            MutationOperator::DropAtom(i) => write!(f, "drop_atom:{i}"),
        }
    }
}

/// Pipeline status of a mutant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutationStatus {
    /// Created; not yet run against T0.
    Injected,
    /// T0 already exposes the fault; discarded.
    DetectedByT0,
    /// T0 misses the fault; eligible for the cross-check.
    UndetectedByT0,
    /// No behavioral difference found within the probe budget; discarded.
    InvalidEquivalent,
}

impl fmt::Display for MutationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationStatus::Injected => f.write_str("injected"),
            MutationStatus::DetectedByT0 => f.write_str("detected_by_t0"),
            MutationStatus::UndetectedByT0 => f.write_str("undetected_by_t0"),
            MutationStatus::InvalidEquivalent => f.write_str("invalid_equivalent"),
        }
    }
}

/// One mutant and everything learned about it along the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutationRecord {
    pub original_id: ProgramId,
    pub mutant: Program,
    pub operator: MutationOperator,
    pub decision_id: DecisionId,
    pub status: MutationStatus,
    /// Divergence witness found during validation.
    pub witness: Option<Vec<Value>>,
    /// Per admitted cross suite: did any of its tests fail on the mutant?
    pub detections: BTreeMap<ProgramId, bool>,
    pub detected_by_whole_cct: bool,
    /// Must stay false: whole-CCT detection is the union of per-suite
    /// detections and T0 verdicts for stateless deterministic tests.
    pub union_identity_violated: bool,
}

#[derive(Debug, Clone, Error)]
pub enum MutateError {
    #[error("`{0}` has no decision statement admitting a valid mutation")]
    NoMutationPossible(ProgramId),
    #[error("validation probe budget must be at least 1")]
    ProbeBudgetZero,
}

/// Render the `.mut` manifest describing a mutant.
pub fn mutant_manifest(record: &MutationRecord) -> String {
    let mut out = String::new();
    out.push_str("# crosscov mutant manifest\n");
    out.push_str(&format!("original {}\n", record.original_id));
    out.push_str(&format!("operator {}\n", record.operator));
    out.push_str(&format!("decision {}\n", record.decision_id.0));
    out.push_str(&format!("status {}\n", record.status));
    if let Some(witness) = &record.witness {
        let vals: Vec<String> = witness.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("witness ({})\n", vals.join(",")));
    }
    out
}

/// Inject one missing-functionality fault into `program`.
pub fn inject(program: &Program) -> Result<MutationRecord, MutateError> {
    for d in 0..program.decision_count {
        let decision = DecisionId(d);
        let stmt = program.decision(decision).expect("dense decision ids");
        let mut ops: Vec<MutationOperator> = Vec::new();
        match &stmt.kind {
            StmtKind::If {
                else_body: Some(_), ..
            } => {
                ops.push(MutationOperator::DropElseArm);
                ops.push(MutationOperator::DropThenArm);
            }
            StmtKind::If { .. } | StmtKind::While { .. } => {
                ops.push(MutationOperator::DropThenArm);
            }
            _ => unreachable!("decision() returns decision statements"),
        }
        for atom in enumerate_atoms(decision, program).expect("valid decision") {
            if atom.droppable {
                ops.push(MutationOperator::DropAtom(atom.index));
            }
        }
        for op in ops {
            if let Some(mutant) = apply_operator(program, decision, op) {
                return Ok(MutationRecord {
                    original_id: program.id(),
                    mutant,
                    operator: op,
                    decision_id: decision,
                    status: MutationStatus::Injected,
                    witness: None,
                    detections: BTreeMap::new(),
                    detected_by_whole_cct: false,
                    union_identity_violated: false,
                });
            }
        }
    }
    Err(MutateError::NoMutationPossible(program.id()))
}

/// Apply one operator to one decision, returning the re-parsed, re-checked
/// mutant — or `None` when the edit does not yield a valid program.
pub fn apply_operator(
    program: &Program,
    decision: DecisionId,
    op: MutationOperator,
) -> Option<Program> {
    let mut body = program.body.clone();
    if !edit_stmts(&mut body, decision, op) {
        return None;
    }
    let draft = Program {
        name: program.name.clone(),
        params: program.params.clone(),
        return_type: program.return_type,
        body,
        stmt_count: 0,
        decision_count: 0,
        source: String::new(),
    };
    let printed = pretty_print(&draft);
    parse(&printed).ok()
}

fn edit_stmts(stmts: &mut Vec<Stmt>, decision: DecisionId, op: MutationOperator) -> bool {
    for stmt in stmts.iter_mut() {
        if stmt.decision_id() == Some(decision) {
            return edit_decision(stmt, op);
        }
        let applied = match &mut stmt.kind {
            StmtKind::If {
                then_body,
                else_body,
                ..
            } => {
                edit_stmts(then_body, decision, op)
                    || else_body
                        .as_mut()
                        .is_some_and(|eb| edit_stmts(eb, decision, op))
            }
            StmtKind::While { body, .. } => edit_stmts(body, decision, op),
            _ => false,
        };
        if applied {
            return true;
        }
    }
    false
}

fn edit_decision(stmt: &mut Stmt, op: MutationOperator) -> bool {
    match (&mut stmt.kind, op) {
        (StmtKind::If { else_body, .. }, MutationOperator::DropElseArm) => {
            if else_body.is_none() {
                return false;
            }
            *else_body = None;
            true
        }
        (StmtKind::If { then_body, .. }, MutationOperator::DropThenArm) => {
            then_body.clear();
            true
        }
        (StmtKind::While { body, .. }, MutationOperator::DropThenArm) => {
            body.clear();
            true
        }
        (StmtKind::If { cond, .. }, MutationOperator::DropAtom(index))
        | (StmtKind::While { cond, .. }, MutationOperator::DropAtom(index)) => {
            let mut next = 0usize;
            match drop_leaf(cond, index, &mut next) {
                LeafEdit::Kept(new_cond) => {
                    *cond = new_cond;
                    true
                }
                // the target atom had no &&/|| sibling to splice up
                LeafEdit::Dropped | LeafEdit::NotFound => false,
            }
        }
        _ => false,
    }
}

enum LeafEdit {
    /// Subtree survives (possibly with the atom removed inside it).
    Kept(Expr),
    /// This whole subtree was the target atom; the parent must splice.
    Dropped,
    /// Target index not inside this subtree.
    NotFound,
}

fn drop_leaf(expr: &Expr, target: usize, next: &mut usize) -> LeafEdit {
    match &expr.kind {
        ExprKind::Binary { op, lhs, rhs } if matches!(op, BinaryOp::And | BinaryOp::Or) => {
            match drop_leaf(lhs, target, next) {
                LeafEdit::Dropped => return LeafEdit::Kept((**rhs).clone()),
                LeafEdit::Kept(new_lhs) => {
                    return LeafEdit::Kept(Expr {
                        span: expr.span,
                        kind: ExprKind::Binary {
                            op: *op,
                            lhs: Box::new(new_lhs),
                            rhs: rhs.clone(),
                        },
                    })
                }
                LeafEdit::NotFound => {}
            }
            match drop_leaf(rhs, target, next) {
                LeafEdit::Dropped => LeafEdit::Kept((**lhs).clone()),
                LeafEdit::Kept(new_rhs) => LeafEdit::Kept(Expr {
                    span: expr.span,
                    kind: ExprKind::Binary {
                        op: *op,
                        lhs: lhs.clone(),
                        rhs: Box::new(new_rhs),
                    },
                }),
                LeafEdit::NotFound => LeafEdit::NotFound,
            }
        }
        ExprKind::Unary {
            op: UnaryOp::Not,
            operand,
        } => match drop_leaf(operand, target, next) {
            // dropping the only atom under a `!` drops the `!` too
            LeafEdit::Dropped => LeafEdit::Dropped,
            LeafEdit::Kept(inner) => LeafEdit::Kept(Expr {
                span: expr.span,
                kind: ExprKind::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(inner),
                },
            }),
            LeafEdit::NotFound => LeafEdit::NotFound,
        },
        _ => {
            let here = *next;
            *next += 1;
            if here == target {
                LeafEdit::Dropped
            } else {
                LeafEdit::NotFound
            }
        }
    }
}

/// Run T0 against the mutant: any failing case means the fault is already
/// caught by the common suite and the mutant is discarded.
pub fn filter_by_t0(mut record: MutationRecord, t0: &TestSuite, fuel: u64) -> MutationRecord {
    let run = run_suite(t0, &record.mutant, fuel);
    record.status = if run.any_fail() {
        MutationStatus::DetectedByT0
    } else {
        MutationStatus::UndetectedByT0
    };
    record
}

/// Double-check that the edit actually removed functionality: compare the
/// original and the mutant on every provided suite input plus `probe_budget`
/// seeded random inputs. No divergence found means the mutant is equivalent
/// within the probe budget and is discarded as invalid.
pub fn validate_mutant(
    mut record: MutationRecord,
    original: &Program,
    suite_inputs: &[Vec<Value>],
    probe_budget: u64,
    seed: u64,
    fuel: u64,
) -> Result<MutationRecord, MutateError> {
    if probe_budget == 0 {
        return Err(MutateError::ProbeBudgetZero);
    }
    debug_assert_eq!(record.status, MutationStatus::UndetectedByT0);
    let diverges = |input: &[Value]| -> bool {
        let (a, _) = execute(original, input, fuel).expect("suite inputs match signature");
        let (b, _) = execute(&record.mutant, input, fuel).expect("mutant keeps the signature");
        a != b
    };
    for input in suite_inputs {
        if diverges(input) {
            record.witness = Some(input.clone());
            return Ok(record);
        }
    }
    let mut sampler = InputSampler::new(seed);
    let types = original.param_types();
    for _ in 0..probe_budget {
        let input = sampler.sample_tuple(&types);
        let (orig_outcome, _) = execute(original, &input, fuel).expect("sampled to signature");
        sampler.feed_outcome(&orig_outcome);
        let (mut_outcome, _) = execute(&record.mutant, &input, fuel).expect("same signature");
        if orig_outcome != mut_outcome {
            record.witness = Some(input);
            return Ok(record);
        }
    }
    record.status = MutationStatus::InvalidEquivalent;
    Ok(record)
}

/// Run each admitted cross suite (and the whole CCT) against the mutant,
/// recording which suites expose the fault. Also recomputes the whole-CCT
/// verdict independently and flags any violation of the union identity.
pub fn cross_detect(
    mut record: MutationRecord,
    aug: &AugmentationResult,
    ti_suites: &BTreeMap<ProgramId, TestSuite>,
    t0: &TestSuite,
    fuel: u64,
) -> MutationRecord {
    debug_assert_eq!(record.status, MutationStatus::UndetectedByT0);
    for added in &aug.added_suites {
        let suite = &ti_suites[&added.source];
        let run = run_suite(suite, &record.mutant, fuel);
        record.detections.insert(added.source.clone(), run.any_fail());
    }
    let whole = run_suite(&aug.cct, &record.mutant, fuel);
    record.detected_by_whole_cct = whole.any_fail();
    let t0_fail = run_suite(t0, &record.mutant, fuel).any_fail();
    let union = t0_fail || record.detections.values().any(|&d| d);
    record.union_identity_violated = union != record.detected_by_whole_cct;
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{ExecutionOutcome, DEFAULT_FUEL};
    use crate::minilang::canonical;
    use crate::testkit::{SeedLineage, SuiteId, SuiteKind, TestCase, TestCaseId, TestOrigin};

    const ABS: &str = "fn abs(x:int)->int { if (x<0) { return -x; } return x; }";

    #[test]
    fn abs_drop_then_arm_returns_input_unchanged() {
        let p = parse(ABS).unwrap();
        let record = inject(&p).unwrap();
        assert_eq!(record.operator, MutationOperator::DropThenArm);
        assert_eq!(record.decision_id, DecisionId(0));
        let (outcome, _) = execute(&record.mutant, &[Value::Int(-1)], DEFAULT_FUEL).unwrap();
        assert_eq!(outcome, ExecutionOutcome::Value(Value::Int(-1)));
    }

    #[test]
    fn else_arm_preferred_when_present_and_valid() {
        let p = parse(
            "fn f(x:int)->int { if (x>0) { x = x+1; } else { x = x-1; } return x; }",
        )
        .unwrap();
        let record = inject(&p).unwrap();
        assert_eq!(record.operator, MutationOperator::DropElseArm);
        let (outcome, _) = execute(&record.mutant, &[Value::Int(-4)], DEFAULT_FUEL).unwrap();
        assert_eq!(outcome, ExecutionOutcome::Value(Value::Int(-4)));
    }

    #[test]
    fn atom_drop_splices_sibling() {
        let p = parse("fn f(a:bool,b:bool)->bool { if (a && b) { return true; } return false; }")
            .unwrap();
        let mutant = apply_operator(&p, DecisionId(0), MutationOperator::DropAtom(1)).unwrap();
        let expect =
            parse("fn f(a:bool,b:bool)->bool { if (a) { return true; } return false; }").unwrap();
        assert_eq!(canonical(&mutant), canonical(&expect));
        let mutant0 = apply_operator(&p, DecisionId(0), MutationOperator::DropAtom(0)).unwrap();
        let expect0 =
            parse("fn f(a:bool,b:bool)->bool { if (b) { return true; } return false; }").unwrap();
        assert_eq!(canonical(&mutant0), canonical(&expect0));
    }

    #[test]
    fn atom_drop_inside_not_removes_the_not() {
        let p = parse("fn f(a:bool,b:bool)->bool { if (a && !b) { return true; } return false; }")
            .unwrap();
        let mutant = apply_operator(&p, DecisionId(0), MutationOperator::DropAtom(1)).unwrap();
        let expect =
            parse("fn f(a:bool,b:bool)->bool { if (a) { return true; } return false; }").unwrap();
        assert_eq!(canonical(&mutant), canonical(&expect));
    }

    #[test]
    fn lone_atom_is_not_droppable() {
        let p = parse("fn f(x:int)->int { if (x == 0) { return 1; } return 0; }").unwrap();
        assert!(apply_operator(&p, DecisionId(0), MutationOperator::DropAtom(0)).is_none());
    }

    #[test]
    fn atom_drop_used_when_arm_drops_fail_check() {
        // terminal if-else: emptying either arm loses the return on that path
        let p = parse(
            "fn f(a:bool,b:bool)->bool { if (a && b) { return true; } else { return false; } }",
        )
        .unwrap();
        let record = inject(&p).unwrap();
        assert_eq!(record.operator, MutationOperator::DropAtom(0));
    }

    #[test]
    fn falls_through_to_next_decision() {
        // first decision is a lone-atom terminal if-else (no valid edit);
        // second decision admits a then-arm drop
        let p = parse(
            "fn f(x:int)->int {
                if (x == 0) { return 0; } else {
                    if (x < 0) { x = -x; }
                    return x;
                }
            }",
        )
        .unwrap();
        let record = inject(&p).unwrap();
        assert_eq!(record.decision_id, DecisionId(1));
        assert_eq!(record.operator, MutationOperator::DropThenArm);
    }

    #[test]
    fn decision_free_program_has_no_mutation() {
        let p = parse("fn add(a:int,b:int)->int { return a + b; }").unwrap();
        assert!(matches!(
            inject(&p),
            Err(MutateError::NoMutationPossible(_))
        ));
    }

    #[test]
    fn mutants_roundtrip_through_parse_and_check() {
        let sources = [
            ABS,
            "fn f(x:int)->int { if (x>0) { x = x+1; } else { x = x-1; } return x; }",
            "fn f(a:bool,b:bool)->bool { if (a && b) { return true; } else { return false; } }",
            "fn g(n:int)->int { let i:int = 0; while (i < n) { i = i + 1; } return i; }",
        ];
        for src in sources {
            let p = parse(src).unwrap();
            let record = inject(&p).unwrap();
            let reparsed = parse(&pretty_print(&record.mutant)).unwrap();
            assert_eq!(canonical(&reparsed), canonical(&record.mutant), "{src}");
        }
    }

    fn mk_case(id: u32, input: Vec<Value>, expected: ExecutionOutcome) -> TestCase {
        TestCase {
            id: TestCaseId(id),
            input,
            expected,
            origin: TestOrigin::Common,
            lineage: SeedLineage { seed: 0, index: id as u64 },
        }
    }

    #[test]
    fn t0_filter_separates_detected_from_undetected() {
        let p = parse(ABS).unwrap();
        let record = inject(&p).unwrap(); // returns x unchanged
        // T0 with a negative input detects the dropped arm
        let detecting = TestSuite {
            id: SuiteId("t0".into()),
            kind: SuiteKind::T0,
            cases: vec![mk_case(
                0,
                vec![Value::Int(-3)],
                ExecutionOutcome::Value(Value::Int(3)),
            )],
        };
        let filtered = filter_by_t0(record.clone(), &detecting, DEFAULT_FUEL);
        assert_eq!(filtered.status, MutationStatus::DetectedByT0);
        // T0 with only non-negative inputs misses it
        let missing = TestSuite {
            id: SuiteId("t0".into()),
            kind: SuiteKind::T0,
            cases: vec![mk_case(
                0,
                vec![Value::Int(4)],
                ExecutionOutcome::Value(Value::Int(4)),
            )],
        };
        let filtered = filter_by_t0(record, &missing, DEFAULT_FUEL);
        assert_eq!(filtered.status, MutationStatus::UndetectedByT0);
    }

    #[test]
    fn equivalent_mutant_is_invalidated() {
        // the guard is redundant: dropping it changes nothing
        let p = parse(
            "fn echo(x:int)->int { if (x == 123456789) { return 123456789; } return x; }",
        )
        .unwrap();
        let mut record = inject(&p).unwrap();
        record.status = MutationStatus::UndetectedByT0;
        let validated = validate_mutant(record, &p, &[], 2000, 1, DEFAULT_FUEL).unwrap();
        assert_eq!(validated.status, MutationStatus::InvalidEquivalent);
    }

    #[test]
    fn live_guard_drop_stays_eligible_with_witness() {
        let p = parse(ABS).unwrap();
        let mut record = inject(&p).unwrap();
        record.status = MutationStatus::UndetectedByT0;
        let validated = validate_mutant(record, &p, &[], 2000, 1, DEFAULT_FUEL).unwrap();
        assert_eq!(validated.status, MutationStatus::UndetectedByT0);
        let witness = validated.witness.expect("divergence witness recorded");
        assert!(matches!(witness[0], Value::Int(n) if n < 0));
    }

    #[test]
    fn suite_inputs_are_probed_first() {
        let p = parse(ABS).unwrap();
        let mut record = inject(&p).unwrap();
        record.status = MutationStatus::UndetectedByT0;
        let validated =
            validate_mutant(record, &p, &[vec![Value::Int(-77)]], 1, 1, DEFAULT_FUEL).unwrap();
        assert_eq!(validated.witness, Some(vec![Value::Int(-77)]));
    }

    #[test]
    fn zero_probe_budget_is_rejected() {
        let p = parse(ABS).unwrap();
        let mut record = inject(&p).unwrap();
        record.status = MutationStatus::UndetectedByT0;
        assert!(matches!(
            validate_mutant(record, &p, &[], 0, 1, DEFAULT_FUEL),
            Err(MutateError::ProbeBudgetZero)
        ));
    }

    #[test]
    fn manifest_lists_operator_and_decision() {
        let p = parse(ABS).unwrap();
        let record = inject(&p).unwrap();
        let manifest = mutant_manifest(&record);
        assert!(manifest.contains("original abs"));
        assert!(manifest.contains("operator drop_then_arm"));
        assert!(manifest.contains("decision 0"));
    }
}

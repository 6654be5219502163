//! Coverage-instrumented deterministic interpreter.
//!
//! `execute` runs a program on an input tuple and records which statements
//! and which decision arms were exercised. Execution is fuel-bounded so it
//! always terminates; the cost model (1 fuel per statement entered, 1 fuel
//! per expression node evaluated) is part of the language definition in
//! `docs/minilang.md` and is shared with the independent reference tracer.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::minilang::{
    BinaryOp, BranchArmId, ExprKind, Program, ProgramId, StatementId, Stmt, StmtKind, Type,
    UnaryOp, Value,
};

/// Default evaluation-step budget.
pub const DEFAULT_FUEL: u64 = 10_000;

/// Integer runtime errors. All are deterministic consequences of 64-bit
/// two's-complement semantics.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum RuntimeErrorKind {
    DivideByZero,
    ModByZero,
    Overflow,
}

impl std::fmt::Display for RuntimeErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuntimeErrorKind::DivideByZero => f.write_str("divide_by_zero"),
            RuntimeErrorKind::ModByZero => f.write_str("mod_by_zero"),
            RuntimeErrorKind::Overflow => f.write_str("overflow"),
        }
    }
}

/// Final outcome of one execution. Outcomes are totally ordered so verdicts
/// can compare kind and payload.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExecutionOutcome {
    Value(Value),
    Failure(String),
    RuntimeError(RuntimeErrorKind),
    FuelExhausted,
}

impl std::fmt::Display for ExecutionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExecutionOutcome::Value(v) => write!(f, "value {v}"),
            ExecutionOutcome::Failure(m) => write!(f, "failure \"{m}\""),
            ExecutionOutcome::RuntimeError(k) => write!(f, "runtime_error {k}"),
            ExecutionOutcome::FuelExhausted => f.write_str("fuel_exhausted"),
        }
    }
}

/// Which statements and decision arms one or more executions touched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageVector {
    pub program_id: ProgramId,
    pub stmts_hit: BTreeSet<StatementId>,
    pub arms_hit: BTreeSet<BranchArmId>,
    pub stmt_total: u32,
    pub arm_total: u32,
}

impl CoverageVector {
    /// An empty vector sized for `program`.
    pub fn empty(program: &Program) -> Self {
        CoverageVector {
            program_id: program.id(),
            stmts_hit: BTreeSet::new(),
            arms_hit: BTreeSet::new(),
            stmt_total: program.stmt_count,
            arm_total: program.arm_count(),
        }
    }

    pub fn is_full(&self) -> bool {
        self.stmts_hit.len() as u32 == self.stmt_total
            && self.arms_hit.len() as u32 == self.arm_total
    }
}

/// Input rejected before execution starts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("program `{program}` takes {expected} arguments, got {actual}")]
    Arity {
        program: String,
        expected: usize,
        actual: usize,
    },
    #[error("parameter `{param}` of `{program}` expects {expected}, got {actual}")]
    Type {
        program: String,
        param: String,
        expected: Type,
        actual: Type,
    },
}

/// Validate an input tuple against a program signature.
pub fn check_input(program: &Program, input: &[Value]) -> Result<(), InputError> {
    if input.len() != program.params.len() {
        return Err(InputError::Arity {
            program: program.name.clone(),
            expected: program.params.len(),
            actual: input.len(),
        });
    }
    for (param, value) in program.params.iter().zip(input) {
        if value.type_of() != param.ty {
            return Err(InputError::Type {
                program: program.name.clone(),
                param: param.name.clone(),
                expected: param.ty,
                actual: value.type_of(),
            });
        }
    }
    Ok(())
}

/// Execute `program` on `input` with the given fuel budget.
///
/// Deterministic: the same `(program, input, fuel)` triple always produces
/// the identical outcome and coverage vector. Non-termination is impossible;
/// running out of fuel yields the `FuelExhausted` outcome with the coverage
/// accumulated so far.
pub fn execute(
    program: &Program,
    input: &[Value],
    fuel: u64,
) -> Result<(ExecutionOutcome, CoverageVector), InputError> {
    check_input(program, input)?;
    let mut machine = Machine {
        coverage: CoverageVector::empty(program),
        scopes: vec![program
            .params
            .iter()
            .zip(input)
            .map(|(p, v)| (p.name.clone(), *v))
            .collect()],
        fuel,
    };
    let outcome = match machine.run_block(&program.body) {
        Ok(Control::Returned(v)) => ExecutionOutcome::Value(v),
        Ok(Control::Normal) => {
            unreachable!("checker guarantees every path ends in return or fail")
        }
        Err(Abort::Failure(m)) => ExecutionOutcome::Failure(m),
        Err(Abort::RuntimeError(k)) => ExecutionOutcome::RuntimeError(k),
        Err(Abort::FuelExhausted) => ExecutionOutcome::FuelExhausted,
    };
    Ok((outcome, machine.coverage))
}

enum Control {
    Normal,
    Returned(Value),
}

enum Abort {
    Failure(String),
    RuntimeError(RuntimeErrorKind),
    FuelExhausted,
}

struct Machine {
    coverage: CoverageVector,
    scopes: Vec<Vec<(String, Value)>>,
    fuel: u64,
}

impl Machine {
    fn spend(&mut self) -> Result<(), Abort> {
        if self.fuel == 0 {
            return Err(Abort::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn get(&self, name: &str) -> Value {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.iter().find(|(n, _)| n == name).map(|(_, v)| *v))
            .expect("checker guarantees declare-before-use")
    }

    fn set(&mut self, name: &str, value: Value) {
        for scope in self.scopes.iter_mut().rev() {
            if let Some(slot) = scope.iter_mut().find(|(n, _)| n == name) {
                slot.1 = value;
                return;
            }
        }
        unreachable!("checker guarantees assignment targets exist");
    }

    fn run_block(&mut self, stmts: &[Stmt]) -> Result<Control, Abort> {
        self.scopes.push(Vec::new());
        let result = self.run_stmts(stmts);
        self.scopes.pop();
        result
    }

    fn run_stmts(&mut self, stmts: &[Stmt]) -> Result<Control, Abort> {
        for stmt in stmts {
            match self.run_stmt(stmt)? {
                Control::Normal => {}
                returned => return Ok(returned),
            }
        }
        Ok(Control::Normal)
    }

    fn run_stmt(&mut self, stmt: &Stmt) -> Result<Control, Abort> {
        self.spend()?;
        self.coverage.stmts_hit.insert(stmt.id);
        match &stmt.kind {
            StmtKind::Decl { name, init, .. } => {
                let value = self.eval(init)?;
                self.scopes.last_mut().unwrap().push((name.clone(), value));
                Ok(Control::Normal)
            }
            StmtKind::Assign { name, value } => {
                let value = self.eval(value)?;
                self.set(name, value);
                Ok(Control::Normal)
            }
            StmtKind::If {
                decision,
                cond,
                then_body,
                else_body,
            } => {
                let taken = self.eval_bool(cond)?;
                self.coverage.arms_hit.insert(if taken {
                    BranchArmId::true_arm(*decision)
                } else {
                    BranchArmId::false_arm(*decision)
                });
                if taken {
                    self.run_block(then_body)
                } else if let Some(eb) = else_body {
                    self.run_block(eb)
                } else {
                    Ok(Control::Normal)
                }
            }
            StmtKind::While {
                decision,
                cond,
                body,
            } => {
                loop {
                    let taken = self.eval_bool(cond)?;
                    self.coverage.arms_hit.insert(if taken {
                        BranchArmId::true_arm(*decision)
                    } else {
                        BranchArmId::false_arm(*decision)
                    });
                    if !taken {
                        break;
                    }
                    match self.run_block(body)? {
                        Control::Normal => {}
                        returned => return Ok(returned),
                    }
                }
                Ok(Control::Normal)
            }
            StmtKind::Return { value } => {
                let value = self.eval(value)?;
                Ok(Control::Returned(value))
            }
            StmtKind::Fail { message } => Err(Abort::Failure(message.clone())),
        }
    }

    fn eval_bool(&mut self, expr: &crate::minilang::Expr) -> Result<bool, Abort> {
        match self.eval(expr)? {
            Value::Bool(b) => Ok(b),
            Value::Int(_) => unreachable!("checker guarantees boolean conditions"),
        }
    }

    fn eval(&mut self, expr: &crate::minilang::Expr) -> Result<Value, Abort> {
        self.spend()?;
        match &expr.kind {
            ExprKind::IntLit(n) => Ok(Value::Int(*n)),
            ExprKind::BoolLit(b) => Ok(Value::Bool(*b)),
            ExprKind::Var(name) => Ok(self.get(name)),
            ExprKind::Unary { op, operand } => {
                let v = self.eval(operand)?;
                match (op, v) {
                    (UnaryOp::Neg, Value::Int(n)) => n
                        .checked_neg()
                        .map(Value::Int)
                        .ok_or(Abort::RuntimeError(RuntimeErrorKind::Overflow)),
                    (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    _ => unreachable!("checker guarantees operand types"),
                }
            }
            ExprKind::Binary { op, lhs, rhs } => match op {
                BinaryOp::And => {
                    if let Value::Bool(false) = self.eval(lhs)? {
                        Ok(Value::Bool(false))
                    } else {
                        self.eval(rhs)
                    }
                }
                BinaryOp::Or => {
                    if let Value::Bool(true) = self.eval(lhs)? {
                        Ok(Value::Bool(true))
                    } else {
                        self.eval(rhs)
                    }
                }
                _ => {
                    let l = self.eval(lhs)?;
                    let r = self.eval(rhs)?;
                    apply_binary(*op, l, r)
                }
            },
        }
    }
}

fn apply_binary(op: BinaryOp, l: Value, r: Value) -> Result<Value, Abort> {
    use RuntimeErrorKind::*;
    match op {
        BinaryOp::Eq => return Ok(Value::Bool(l == r)),
        BinaryOp::Ne => return Ok(Value::Bool(l != r)),
        _ => {}
    }
    let (a, b) = match (l, r) {
        (Value::Int(a), Value::Int(b)) => (a, b),
        _ => unreachable!("checker guarantees int operands"),
    };
    let int = |r: Option<i64>, err: RuntimeErrorKind| {
        r.map(Value::Int).ok_or(Abort::RuntimeError(err))
    };
    match op {
        BinaryOp::Add => int(a.checked_add(b), Overflow),
        BinaryOp::Sub => int(a.checked_sub(b), Overflow),
        BinaryOp::Mul => int(a.checked_mul(b), Overflow),
        BinaryOp::Div => {
            if b == 0 {
                Err(Abort::RuntimeError(DivideByZero))
            } else {
                int(a.checked_div(b), Overflow)
            }
        }
        BinaryOp::Rem => {
            if b == 0 {
                Err(Abort::RuntimeError(ModByZero))
            } else {
                int(a.checked_rem(b), Overflow)
            }
        }
        BinaryOp::Lt => Ok(Value::Bool(a < b)),
        BinaryOp::Le => Ok(Value::Bool(a <= b)),
        BinaryOp::Gt => Ok(Value::Bool(a > b)),
        BinaryOp::Ge => Ok(Value::Bool(a >= b)),
        BinaryOp::Eq | BinaryOp::Ne | BinaryOp::And | BinaryOp::Or => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minilang::parse;

    const ABS: &str = "fn abs(x:int)->int { if (x<0) { return -x; } return x; }";

    fn run(src: &str, input: &[Value]) -> (ExecutionOutcome, CoverageVector) {
        let p = parse(src).unwrap();
        execute(&p, input, DEFAULT_FUEL).unwrap()
    }

    #[test]
    fn abs_negative_takes_true_arm() {
        // hand trace: s0 = if, s1 = return -x
        let (outcome, cov) = run(ABS, &[Value::Int(-5)]);
        assert_eq!(outcome, ExecutionOutcome::Value(Value::Int(5)));
        let stmts: Vec<u32> = cov.stmts_hit.iter().map(|s| s.0).collect();
        assert_eq!(stmts, vec![0, 1]);
        let arms: Vec<u32> = cov.arms_hit.iter().map(|a| a.0).collect();
        assert_eq!(arms, vec![0]);
    }

    #[test]
    fn abs_positive_takes_false_arm() {
        // hand trace: s0 = if, s2 = return x
        let (outcome, cov) = run(ABS, &[Value::Int(3)]);
        assert_eq!(outcome, ExecutionOutcome::Value(Value::Int(3)));
        let stmts: Vec<u32> = cov.stmts_hit.iter().map(|s| s.0).collect();
        assert_eq!(stmts, vec![0, 2]);
        let arms: Vec<u32> = cov.arms_hit.iter().map(|a| a.0).collect();
        assert_eq!(arms, vec![1]);
    }

    #[test]
    fn division_by_zero() {
        let (outcome, cov) = run("fn d(x:int)->int { return 1/x; }", &[Value::Int(0)]);
        assert_eq!(
            outcome,
            ExecutionOutcome::RuntimeError(RuntimeErrorKind::DivideByZero)
        );
        assert_eq!(cov.stmts_hit.len(), 1);
    }

    #[test]
    fn mod_by_zero_and_overflow_are_distinct() {
        let (o1, _) = run("fn m(x:int)->int { return 1 % x; }", &[Value::Int(0)]);
        assert_eq!(o1, ExecutionOutcome::RuntimeError(RuntimeErrorKind::ModByZero));
        let (o2, _) = run(
            "fn o(x:int)->int { return x + 1; }",
            &[Value::Int(i64::MAX)],
        );
        assert_eq!(o2, ExecutionOutcome::RuntimeError(RuntimeErrorKind::Overflow));
        let (o3, _) = run(
            "fn n(x:int)->int { return -x; }",
            &[Value::Int(i64::MIN)],
        );
        assert_eq!(o3, ExecutionOutcome::RuntimeError(RuntimeErrorKind::Overflow));
        let (o4, _) = run(
            "fn q(x:int)->int { return x / -1; }",
            &[Value::Int(i64::MIN)],
        );
        assert_eq!(o4, ExecutionOutcome::RuntimeError(RuntimeErrorKind::Overflow));
    }

    #[test]
    fn fuel_exhaustion_on_endless_loop() {
        let (outcome, _) = run(
            "fn loopy()->int { while (true) { } return 0; }",
            &[],
        );
        assert_eq!(outcome, ExecutionOutcome::FuelExhausted);
    }

    #[test]
    fn monotone_fuel() {
        let p = parse(ABS).unwrap();
        // find the minimal fuel that completes
        let mut completing = None;
        for fuel in 1..100 {
            let (outcome, _) = execute(&p, &[Value::Int(-7)], fuel).unwrap();
            if outcome != ExecutionOutcome::FuelExhausted {
                completing = Some((fuel, outcome));
                break;
            }
        }
        let (min_fuel, outcome) = completing.expect("abs completes within 100 steps");
        for extra in [0, 1, 2, 10, 1000] {
            let (again, _) = execute(&p, &[Value::Int(-7)], min_fuel + extra).unwrap();
            assert_eq!(again, outcome);
        }
    }

    #[test]
    fn short_circuit_skips_rhs_errors() {
        let (outcome, _) = run(
            "fn s(x:int)->bool { return x == 0 || 1/x > 0; }",
            &[Value::Int(0)],
        );
        assert_eq!(outcome, ExecutionOutcome::Value(Value::Bool(true)));
    }

    #[test]
    fn fail_statement_produces_failure_outcome() {
        let (outcome, _) = run(
            "fn f(x:int)->int { if (x < 0) { fail(\"neg input\"); } return x; }",
            &[Value::Int(-1)],
        );
        assert_eq!(outcome, ExecutionOutcome::Failure("neg input".to_string()));
    }

    #[test]
    fn input_errors() {
        let p = parse(ABS).unwrap();
        assert!(matches!(
            execute(&p, &[], DEFAULT_FUEL),
            Err(InputError::Arity { .. })
        ));
        assert!(matches!(
            execute(&p, &[Value::Bool(true)], DEFAULT_FUEL),
            Err(InputError::Type { .. })
        ));
    }

    #[test]
    fn while_loop_covers_both_arms_on_exit() {
        let (outcome, cov) = run(
            "fn f(n:int)->int { let i:int = 0; while (i < n) { i = i + 1; } return i; }",
            &[Value::Int(3)],
        );
        assert_eq!(outcome, ExecutionOutcome::Value(Value::Int(3)));
        assert_eq!(cov.arms_hit.len(), 2, "loop entered and exited");
        assert!(cov.is_full());
    }

    #[test]
    fn outcome_ordering_is_total() {
        let a = ExecutionOutcome::Value(Value::Int(1));
        let b = ExecutionOutcome::Failure("x".into());
        let c = ExecutionOutcome::FuelExhausted;
        assert!(a < b && b < c);
    }
}

//! Independent reference tracer.
//!
//! A second, deliberately naive tree-walking evaluator used as an oracle for
//! `interp::execute`: it shares nothing with the interpreter except the AST
//! types and the documented cost model (1 fuel per statement entered, 1 per
//! expression node evaluated), and returns the ordered list of statements it
//! visited. For every program and input, the set of traced statements must
//! equal the interpreter's `stmts_hit`.

use crate::interp::{check_input, InputError};
use crate::minilang::{
    BinaryOp, Expr, ExprKind, Program, StatementId, Stmt, StmtKind, UnaryOp, Value,
};

/// Walk `program` on `input`, returning every statement id in execution
/// order (a loop body visited three times appears three times).
pub fn trace_reference(
    program: &Program,
    input: &[Value],
    fuel: u64,
) -> Result<Vec<StatementId>, InputError> {
    check_input(program, input)?;
    let mut env: Vec<(String, Value)> = program
        .params
        .iter()
        .zip(input)
        .map(|(p, v)| (p.name.clone(), *v))
        .collect();
    let mut trace = Vec::new();
    let mut budget = fuel;
    let _ = walk_stmts(&program.body, &mut env, &mut trace, &mut budget);
    Ok(trace)
}

/// Any reason the walk stopped early. The trace is kept as-is.
enum Halt {
    Done,
    Failed,
    Errored,
    Starved,
}

fn charge(budget: &mut u64) -> Result<(), Halt> {
    if *budget == 0 {
        return Err(Halt::Starved);
    }
    *budget -= 1;
    Ok(())
}

fn walk_stmts(
    stmts: &[Stmt],
    env: &mut Vec<(String, Value)>,
    trace: &mut Vec<StatementId>,
    budget: &mut u64,
) -> Result<(), Halt> {
    let depth = env.len();
    for stmt in stmts {
        if let Err(halt) = walk_stmt(stmt, env, trace, budget) {
            env.truncate(depth);
            return Err(halt);
        }
    }
    env.truncate(depth);
    Ok(())
}

fn walk_stmt(
    stmt: &Stmt,
    env: &mut Vec<(String, Value)>,
    trace: &mut Vec<StatementId>,
    budget: &mut u64,
) -> Result<(), Halt> {
    charge(budget)?;
    trace.push(stmt.id);
    match &stmt.kind {
        StmtKind::Decl { name, init, .. } => {
            let v = eval(init, env, budget)?;
            env.push((name.clone(), v));
            Ok(())
        }
        StmtKind::Assign { name, value } => {
            let v = eval(value, env, budget)?;
            let slot = env
                .iter_mut()
                .rev()
                .find(|(n, _)| n == name)
                .expect("checked program");
            slot.1 = v;
            Ok(())
        }
        StmtKind::If {
            cond,
            then_body,
            else_body,
            ..
        } => match eval(cond, env, budget)? {
            Value::Bool(true) => walk_stmts(then_body, env, trace, budget),
            Value::Bool(false) => match else_body {
                Some(eb) => walk_stmts(eb, env, trace, budget),
                None => Ok(()),
            },
            Value::Int(_) => unreachable!("checked program"),
        },
        StmtKind::While { cond, body, .. } => loop {
            match eval(cond, env, budget)? {
                Value::Bool(true) => walk_stmts(body, env, trace, budget)?,
                Value::Bool(false) => return Ok(()),
                Value::Int(_) => unreachable!("checked program"),
            }
        },
        StmtKind::Return { value } => {
            eval(value, env, budget)?;
            Err(Halt::Done)
        }
        StmtKind::Fail { .. } => Err(Halt::Failed),
    }
}

fn eval(expr: &Expr, env: &[(String, Value)], budget: &mut u64) -> Result<Value, Halt> {
    charge(budget)?;
    match &expr.kind {
        ExprKind::IntLit(n) => Ok(Value::Int(*n)),
        ExprKind::BoolLit(b) => Ok(Value::Bool(*b)),
        ExprKind::Var(name) => Ok(env
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .expect("checked program")
            .1),
        ExprKind::Unary { op, operand } => {
            let v = eval(operand, env, budget)?;
            match (op, v) {
                (UnaryOp::Neg, Value::Int(n)) => match n.checked_neg() {
                    Some(m) => Ok(Value::Int(m)),
                    None => Err(Halt::Errored),
                },
                (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                _ => unreachable!("checked program"),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            if *op == BinaryOp::And {
                return match eval(lhs, env, budget)? {
                    Value::Bool(false) => Ok(Value::Bool(false)),
                    _ => eval(rhs, env, budget),
                };
            }
            if *op == BinaryOp::Or {
                return match eval(lhs, env, budget)? {
                    Value::Bool(true) => Ok(Value::Bool(true)),
                    _ => eval(rhs, env, budget),
                };
            }
            let l = eval(lhs, env, budget)?;
            let r = eval(rhs, env, budget)?;
            if *op == BinaryOp::Eq {
                return Ok(Value::Bool(l == r));
            }
            if *op == BinaryOp::Ne {
                return Ok(Value::Bool(l != r));
            }
            let (a, b) = match (l, r) {
                (Value::Int(a), Value::Int(b)) => (a, b),
                _ => unreachable!("checked program"),
            };
            let c = match op {
                BinaryOp::Add => a.checked_add(b),
                BinaryOp::Sub => a.checked_sub(b),
                BinaryOp::Mul => a.checked_mul(b),
                BinaryOp::Div => {
                    if b == 0 {
                        None
                    } else {
                        a.checked_div(b)
                    }
                }
                BinaryOp::Rem => {
                    if b == 0 {
                        None
                    } else {
                        a.checked_rem(b)
                    }
                }
                BinaryOp::Lt => return Ok(Value::Bool(a < b)),
                BinaryOp::Le => return Ok(Value::Bool(a <= b)),
                BinaryOp::Gt => return Ok(Value::Bool(a > b)),
                BinaryOp::Ge => return Ok(Value::Bool(a >= b)),
                _ => unreachable!(),
            };
            match c {
                Some(v) => Ok(Value::Int(v)),
                None => Err(Halt::Errored),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{execute, DEFAULT_FUEL};
    use crate::minilang::parse;
    use std::collections::BTreeSet;

    #[test]
    fn abs_trace_matches_hand_expectation() {
        let p = parse("fn abs(x:int)->int { if (x<0) { return -x; } return x; }").unwrap();
        let trace = trace_reference(&p, &[Value::Int(-5)], DEFAULT_FUEL).unwrap();
        assert_eq!(trace, vec![StatementId(0), StatementId(1)]);
    }

    #[test]
    fn straight_line_trace_is_all_statements_in_order() {
        let p = parse(
            "fn f(a:int)->int { let b:int = a + 1; let c:int = b * 2; return c; }",
        )
        .unwrap();
        let trace = trace_reference(&p, &[Value::Int(4)], DEFAULT_FUEL).unwrap();
        assert_eq!(
            trace,
            vec![StatementId(0), StatementId(1), StatementId(2)]
        );
    }

    #[test]
    fn loop_statements_repeat_in_trace() {
        let p = parse(
            "fn f(n:int)->int { let i:int = 0; while (i < n) { i = i + 1; } return i; }",
        )
        .unwrap();
        let trace = trace_reference(&p, &[Value::Int(2)], DEFAULT_FUEL).unwrap();
        let body_visits = trace.iter().filter(|s| s.0 == 2).count();
        assert_eq!(body_visits, 2);
    }

    #[test]
    fn trace_set_equals_interpreter_coverage() {
        let srcs = [
            "fn abs(x:int)->int { if (x<0) { return -x; } return x; }",
            "fn f(a:int,b:int)->int { if (a>b) { return a; } else { return b; } }",
            "fn g(n:int)->int { let i:int = 0; while (i < n) { i = i + 1; } return i; }",
            "fn h(x:int)->int { return 100 / x; }",
        ];
        for src in srcs {
            let p = parse(src).unwrap();
            for x in -6..=6 {
                let input: Vec<Value> =
                    p.params.iter().map(|_| Value::Int(x)).collect();
                let (_, cov) = execute(&p, &input, DEFAULT_FUEL).unwrap();
                let trace = trace_reference(&p, &input, DEFAULT_FUEL).unwrap();
                let set: BTreeSet<_> = trace.into_iter().collect();
                assert_eq!(set, cov.stmts_hit, "{src} on {x}");
            }
        }
    }

    #[test]
    fn fuel_starvation_points_agree_with_interpreter() {
        let p = parse(
            "fn g(n:int)->int { let i:int = 0; while (i < n) { i = i + 1; } return i; }",
        )
        .unwrap();
        for fuel in 0..60 {
            let (_, cov) = execute(&p, &[Value::Int(5)], fuel).unwrap();
            let trace = trace_reference(&p, &[Value::Int(5)], fuel).unwrap();
            let set: BTreeSet<_> = trace.into_iter().collect();
            assert_eq!(set, cov.stmts_hit, "fuel {fuel}");
        }
    }
}

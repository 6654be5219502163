//! Static checker: types, declare-before-use, and path termination.

use super::ast::*;
use super::error::{Location, ParseError};

/// Check a parsed program. Verifies that
/// - every variable is declared before use and never redeclared in scope,
/// - expressions and statements are well typed,
/// - conditions are boolean,
/// - every execution path ends in `return` or `fail`.
pub fn check(program: &Program) -> Result<(), ParseError> {
    let mut scopes: Vec<Vec<(String, Type)>> = vec![Vec::new()];
    for p in &program.params {
        if lookup(&scopes, &p.name).is_some() {
            return Err(check_err(
                SourceSpan::default(),
                format!("duplicate parameter `{}`", p.name),
            ));
        }
        scopes[0].push((p.name.clone(), p.ty));
    }
    check_block(&program.body, &mut scopes, program.return_type)?;
    if !block_terminates(&program.body) {
        return Err(ParseError::Check {
            location: Location { line: 1, column: 1 },
            message: format!(
                "missing return: not every path through `{}` ends in `return` or `fail`",
                program.name
            ),
        });
    }
    Ok(())
}

fn lookup(scopes: &[Vec<(String, Type)>], name: &str) -> Option<Type> {
    scopes
        .iter()
        .rev()
        .find_map(|s| s.iter().find(|(n, _)| n == name).map(|(_, t)| *t))
}

fn check_err(span: SourceSpan, message: String) -> ParseError {
    ParseError::Check {
        location: Location {
            line: span.line.max(1),
            column: span.column.max(1),
        },
        message,
    }
}

fn check_block(
    stmts: &[Stmt],
    scopes: &mut Vec<Vec<(String, Type)>>,
    return_type: Type,
) -> Result<(), ParseError> {
    scopes.push(Vec::new());
    let result = (|| {
        for s in stmts {
            check_stmt(s, scopes, return_type)?;
        }
        Ok(())
    })();
    scopes.pop();
    result
}

fn check_stmt(
    stmt: &Stmt,
    scopes: &mut Vec<Vec<(String, Type)>>,
    return_type: Type,
) -> Result<(), ParseError> {
    match &stmt.kind {
        StmtKind::Decl { name, ty, init } => {
            let init_ty = type_of_expr(init, scopes)?;
            if init_ty != *ty {
                return Err(check_err(
                    stmt.span,
                    format!("`{name}` declared as {ty} but initialized with {init_ty}"),
                ));
            }
            if lookup(scopes, name).is_some() {
                return Err(check_err(
                    stmt.span,
                    format!("`{name}` is already declared in this scope"),
                ));
            }
            scopes.last_mut().unwrap().push((name.clone(), *ty));
            Ok(())
        }
        StmtKind::Assign { name, value } => {
            let var_ty = lookup(scopes, name)
                .ok_or_else(|| check_err(stmt.span, format!("undeclared variable `{name}`")))?;
            let val_ty = type_of_expr(value, scopes)?;
            if val_ty != var_ty {
                return Err(check_err(
                    stmt.span,
                    format!("cannot assign {val_ty} to `{name}` of type {var_ty}"),
                ));
            }
            Ok(())
        }
        StmtKind::If {
            cond,
            then_body,
            else_body,
            ..
        } => {
            expect_bool(cond, scopes)?;
            check_block(then_body, scopes, return_type)?;
            if let Some(eb) = else_body {
                check_block(eb, scopes, return_type)?;
            }
            Ok(())
        }
        StmtKind::While { cond, body, .. } => {
            expect_bool(cond, scopes)?;
            check_block(body, scopes, return_type)
        }
        StmtKind::Return { value } => {
            let ty = type_of_expr(value, scopes)?;
            if ty != return_type {
                return Err(check_err(
                    stmt.span,
                    format!("return type mismatch: expected {return_type}, found {ty}"),
                ));
            }
            Ok(())
        }
        StmtKind::Fail { .. } => Ok(()),
    }
}

fn expect_bool(cond: &Expr, scopes: &[Vec<(String, Type)>]) -> Result<(), ParseError> {
    let ty = type_of_expr(cond, scopes)?;
    if ty != Type::Bool {
        return Err(check_err(
            cond.span,
            format!("condition must be bool, found {ty}"),
        ));
    }
    Ok(())
}

fn type_of_expr(expr: &Expr, scopes: &[Vec<(String, Type)>]) -> Result<Type, ParseError> {
    match &expr.kind {
        ExprKind::IntLit(_) => Ok(Type::Int),
        ExprKind::BoolLit(_) => Ok(Type::Bool),
        ExprKind::Var(name) => lookup(scopes, name)
            .ok_or_else(|| check_err(expr.span, format!("undeclared variable `{name}`"))),
        ExprKind::Unary { op, operand } => {
            let ty = type_of_expr(operand, scopes)?;
            match op {
                UnaryOp::Neg if ty == Type::Int => Ok(Type::Int),
                UnaryOp::Not if ty == Type::Bool => Ok(Type::Bool),
                UnaryOp::Neg => Err(check_err(expr.span, format!("cannot negate {ty}"))),
                UnaryOp::Not => Err(check_err(expr.span, format!("cannot apply `!` to {ty}"))),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let lt = type_of_expr(lhs, scopes)?;
            let rt = type_of_expr(rhs, scopes)?;
            if op.is_arithmetic() {
                if lt == Type::Int && rt == Type::Int {
                    Ok(Type::Int)
                } else {
                    Err(check_err(
                        expr.span,
                        format!("`{}` requires int operands, found {lt} and {rt}", op.symbol()),
                    ))
                }
            } else if op.is_comparison() {
                match op {
                    BinaryOp::Eq | BinaryOp::Ne if lt == rt => Ok(Type::Bool),
                    _ if lt == Type::Int && rt == Type::Int => Ok(Type::Bool),
                    _ => Err(check_err(
                        expr.span,
                        format!(
                            "`{}` cannot compare {lt} with {rt}",
                            op.symbol()
                        ),
                    )),
                }
            } else {
                // && and ||
                if lt == Type::Bool && rt == Type::Bool {
                    Ok(Type::Bool)
                } else {
                    Err(check_err(
                        expr.span,
                        format!("`{}` requires bool operands, found {lt} and {rt}", op.symbol()),
                    ))
                }
            }
        }
    }
}

/// Conservative termination analysis: a block terminates when some
/// statement in it always terminates (return/fail, or an if-else whose
/// arms both terminate). `while` never guarantees termination.
fn block_terminates(stmts: &[Stmt]) -> bool {
    stmts.iter().any(stmt_terminates)
}

fn stmt_terminates(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::Return { .. } | StmtKind::Fail { .. } => true,
        StmtKind::If {
            then_body,
            else_body: Some(eb),
            ..
        } => block_terminates(then_body) && block_terminates(eb),
        _ => false,
    }
}

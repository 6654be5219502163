//! Canonical source renderer.
//!
//! `parse(pretty_print(p))` yields a program structurally identical to `p`
//! (same AST modulo spans and source text) for every program that itself
//! came out of `parse` — in particular for every corpus program and every
//! generated mutant.

use super::ast::*;

/// Render a program as canonical `.ml0` source (4-space indent, LF lines).
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    out.push_str("fn ");
    out.push_str(&program.name);
    out.push('(');
    for (i, p) in program.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&p.name);
        out.push_str(": ");
        out.push_str(&p.ty.to_string());
    }
    out.push_str(") -> ");
    out.push_str(&program.return_type.to_string());
    out.push_str(" {\n");
    print_block(&program.body, 1, &mut out);
    out.push_str("}\n");
    out
}

/// Strip spans and source text so two programs can be compared structurally.
pub fn canonical(program: &Program) -> Program {
    let mut p = program.clone();
    p.source = String::new();
    fn strip_expr(e: &mut Expr) {
        e.span = SourceSpan::default();
        match &mut e.kind {
            ExprKind::Unary { operand, .. } => strip_expr(operand),
            ExprKind::Binary { lhs, rhs, .. } => {
                strip_expr(lhs);
                strip_expr(rhs);
            }
            _ => {}
        }
    }
    fn strip_stmts(stmts: &mut [Stmt]) {
        for s in stmts {
            s.span = SourceSpan::default();
            match &mut s.kind {
                StmtKind::Decl { init, .. } => strip_expr(init),
                StmtKind::Assign { value, .. } => strip_expr(value),
                StmtKind::If {
                    cond,
                    then_body,
                    else_body,
                    ..
                } => {
                    strip_expr(cond);
                    strip_stmts(then_body);
                    if let Some(eb) = else_body {
                        strip_stmts(eb);
                    }
                }
                StmtKind::While { cond, body, .. } => {
                    strip_expr(cond);
                    strip_stmts(body);
                }
                StmtKind::Return { value } => strip_expr(value),
                StmtKind::Fail { .. } => {}
            }
        }
    }
    strip_stmts(&mut p.body);
    p
}

fn indent(level: usize, out: &mut String) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn print_block(stmts: &[Stmt], level: usize, out: &mut String) {
    for s in stmts {
        print_stmt(s, level, out);
    }
}

fn print_stmt(stmt: &Stmt, level: usize, out: &mut String) {
    indent(level, out);
    match &stmt.kind {
        StmtKind::Decl { name, ty, init } => {
            out.push_str("let ");
            out.push_str(name);
            out.push_str(": ");
            out.push_str(&ty.to_string());
            out.push_str(" = ");
            print_expr(init, 0, out);
            out.push_str(";\n");
        }
        StmtKind::Assign { name, value } => {
            out.push_str(name);
            out.push_str(" = ");
            print_expr(value, 0, out);
            out.push_str(";\n");
        }
        StmtKind::If {
            cond,
            then_body,
            else_body,
            ..
        } => {
            out.push_str("if (");
            print_expr(cond, 0, out);
            out.push_str(") {\n");
            print_block(then_body, level + 1, out);
            indent(level, out);
            out.push('}');
            if let Some(eb) = else_body {
                out.push_str(" else {\n");
                print_block(eb, level + 1, out);
                indent(level, out);
                out.push('}');
            }
            out.push('\n');
        }
        StmtKind::While { cond, body, .. } => {
            out.push_str("while (");
            print_expr(cond, 0, out);
            out.push_str(") {\n");
            print_block(body, level + 1, out);
            indent(level, out);
            out.push_str("}\n");
        }
        StmtKind::Return { value } => {
            out.push_str("return ");
            print_expr(value, 0, out);
            out.push_str(";\n");
        }
        StmtKind::Fail { message } => {
            out.push_str("fail(\"");
            for c in message.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    other => out.push(other),
                }
            }
            out.push_str("\");\n");
        }
    }
}

fn precedence(expr: &Expr) -> u8 {
    match &expr.kind {
        ExprKind::Binary { op, .. } => match op {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            _ if op.is_comparison() => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            _ => 5,
        },
        ExprKind::Unary { .. } => 6,
        _ => 7,
    }
}

/// Render an expression. `min_prec` is the binding strength of the context;
/// subexpressions weaker than it get parenthesized.
fn print_expr(expr: &Expr, min_prec: u8, out: &mut String) {
    let prec = precedence(expr);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match &expr.kind {
        ExprKind::IntLit(n) => out.push_str(&n.to_string()),
        ExprKind::BoolLit(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::Unary { op, operand } => {
            out.push_str(match op {
                UnaryOp::Neg => "-",
                UnaryOp::Not => "!",
            });
            print_expr(operand, 6, out);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            // comparisons are non-associative, so comparison operands of a
            // comparison always need parens; other binary ops are
            // left-associative.
            let (lmin, rmin) = if op.is_comparison() {
                (prec + 1, prec + 1)
            } else {
                (prec, prec + 1)
            };
            print_expr(lhs, lmin, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            print_expr(rhs, rmin, out);
        }
    }
    if parens {
        out.push(')');
    }
}

/// Render a single expression (used for atom text in reports).
pub fn expr_to_string(expr: &Expr) -> String {
    let mut s = String::new();
    print_expr(expr, 0, &mut s);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minilang::parse;

    fn roundtrip(src: &str) {
        let p = parse(src).unwrap();
        let printed = pretty_print(&p);
        let q = parse(&printed).unwrap_or_else(|e| panic!("reparse failed: {e}\n{printed}"));
        assert_eq!(canonical(&p), canonical(&q), "round-trip mismatch:\n{printed}");
        assert_eq!(p.stmt_count, q.stmt_count);
        assert_eq!(p.decision_count, q.decision_count);
    }

    #[test]
    fn roundtrip_abs() {
        roundtrip("fn abs(x:int)->int { if (x<0) { return -x; } return x; }");
    }

    #[test]
    fn roundtrip_operators_and_nesting() {
        roundtrip(
            "fn f(a:int,b:int,c:bool)->bool {
                let d: int = (a + b) * (a - b) / (a % 7 + 1);
                if (c && (a < b || !(a == 0))) {
                    while (d > 0) { d = d - 1; }
                    return !c || d >= -2;
                }
                return (a < b) == c;
            }",
        );
    }

    #[test]
    fn roundtrip_associativity() {
        roundtrip("fn f(a:int,b:int)->int { return a - (b - 1) - 2; }");
        roundtrip("fn f(a:int,b:int)->int { return a - b - 1 - 2; }");
        roundtrip("fn f(a:int)->int { return -(a + 1); }");
        roundtrip("fn f(a:int)->int { return - -a; }");
    }

    #[test]
    fn roundtrip_fail_escapes() {
        roundtrip(r#"fn f()->int { fail("bad \"quote\" and \\slash"); }"#);
    }

    #[test]
    fn roundtrip_if_else_and_empty_blocks() {
        roundtrip(
            "fn f(x:int)->int {
                if (x == 7) { }
                if (x > 0) { return 1; } else { if (x < 0) { return -1; } }
                return 0;
            }",
        );
    }
}

//! Recursive-descent parser producing id-numbered, checked programs.

use super::ast::*;
use super::checker::check;
use super::error::ParseError;
use super::lexer::{lex, Token, TokenKind};

/// Parse and check a `.ml0` source text.
///
/// On success the returned program has dense pre-order statement and
/// decision ids and has passed the static checker.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut program = parser.program(source)?;
    assign_ids(&mut program);
    check(&program)?;
    Ok(program)
}

/// Number statements and decisions in AST pre-order, densely from 0.
pub(crate) fn assign_ids(program: &mut Program) {
    fn walk(stmts: &mut [Stmt], next_stmt: &mut u32, next_decision: &mut u32) {
        for s in stmts {
            s.id = StatementId(*next_stmt);
            *next_stmt += 1;
            match &mut s.kind {
                StmtKind::If {
                    decision,
                    then_body,
                    else_body,
                    ..
                } => {
                    *decision = DecisionId(*next_decision);
                    *next_decision += 1;
                    walk(then_body, next_stmt, next_decision);
                    if let Some(eb) = else_body {
                        walk(eb, next_stmt, next_decision);
                    }
                }
                StmtKind::While { decision, body, .. } => {
                    *decision = DecisionId(*next_decision);
                    *next_decision += 1;
                    walk(body, next_stmt, next_decision);
                }
                _ => {}
            }
        }
    }
    let mut next_stmt = 0;
    let mut next_decision = 0;
    walk(&mut program.body, &mut next_stmt, &mut next_decision);
    program.stmt_count = next_stmt;
    program.decision_count = next_decision;
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(self.unexpected(&format!("expected {}", kind.describe())))
        }
    }

    fn unexpected(&self, expectation: &str) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            location: t.loc,
            message: format!("{expectation}, found {}", t.kind.describe()),
        }
    }

    fn span_from(&self, start_tok: usize) -> SourceSpan {
        let first = &self.tokens[start_tok];
        let last = &self.tokens[self.pos.saturating_sub(1).max(start_tok)];
        SourceSpan {
            start: first.start,
            end: last.end,
            line: first.loc.line,
            column: first.loc.column,
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.advance();
                Ok(name)
            }
            _ => Err(self.unexpected("expected identifier")),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        match self.peek().kind {
            TokenKind::KwInt => {
                self.advance();
                Ok(Type::Int)
            }
            TokenKind::KwBool => {
                self.advance();
                Ok(Type::Bool)
            }
            _ => Err(self.unexpected("expected type `int` or `bool`")),
        }
    }

    fn program(&mut self, source: &str) -> Result<Program, ParseError> {
        self.expect(TokenKind::KwFn)?;
        let name = self.ident()?;
        self.expect(TokenKind::LParen)?;
        let mut params = Vec::new();
        if self.peek().kind != TokenKind::RParen {
            loop {
                let pname = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let pty = self.ty()?;
                params.push(Param { name: pname, ty: pty });
                if self.peek().kind == TokenKind::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Arrow)?;
        let return_type = self.ty()?;
        let body = self.block()?;
        if self.peek().kind != TokenKind::Eof {
            return Err(self.unexpected("expected end of input after function body"));
        }
        Ok(Program {
            name,
            params,
            return_type,
            body,
            stmt_count: 0,
            decision_count: 0,
            source: source.to_string(),
        })
    }

    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while self.peek().kind != TokenKind::RBrace {
            stmts.push(self.stmt()?);
        }
        self.expect(TokenKind::RBrace)?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let start_tok = self.pos;
        let placeholder = StatementId(u32::MAX);
        match self.peek().kind.clone() {
            TokenKind::KwLet => {
                self.advance();
                let name = self.ident()?;
                self.expect(TokenKind::Colon)?;
                let ty = self.ty()?;
                self.expect(TokenKind::Assign)?;
                let init = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt {
                    id: placeholder,
                    span: self.span_from(start_tok),
                    kind: StmtKind::Decl { name, ty, init },
                })
            }
            TokenKind::KwIf => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let then_body = self.block()?;
                let else_body = if self.peek().kind == TokenKind::KwElse {
                    self.advance();
                    Some(self.block()?)
                } else {
                    None
                };
                Ok(Stmt {
                    id: placeholder,
                    span: self.span_from(start_tok),
                    kind: StmtKind::If {
                        decision: DecisionId(u32::MAX),
                        cond,
                        then_body,
                        else_body,
                    },
                })
            }
            TokenKind::KwWhile => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen)?;
                let body = self.block()?;
                Ok(Stmt {
                    id: placeholder,
                    span: self.span_from(start_tok),
                    kind: StmtKind::While {
                        decision: DecisionId(u32::MAX),
                        cond,
                        body,
                    },
                })
            }
            TokenKind::KwReturn => {
                self.advance();
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt {
                    id: placeholder,
                    span: self.span_from(start_tok),
                    kind: StmtKind::Return { value },
                })
            }
            TokenKind::KwFail => {
                self.advance();
                self.expect(TokenKind::LParen)?;
                let message = match self.peek().kind.clone() {
                    TokenKind::StrLit(s) => {
                        self.advance();
                        s
                    }
                    _ => return Err(self.unexpected("expected string literal in `fail(...)`")),
                };
                self.expect(TokenKind::RParen)?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt {
                    id: placeholder,
                    span: self.span_from(start_tok),
                    kind: StmtKind::Fail { message },
                })
            }
            TokenKind::Ident(name) => {
                self.advance();
                self.expect(TokenKind::Assign)?;
                let value = self.expr()?;
                self.expect(TokenKind::Semi)?;
                Ok(Stmt {
                    id: placeholder,
                    span: self.span_from(start_tok),
                    kind: StmtKind::Assign { name, value },
                })
            }
            _ => Err(self.unexpected("expected statement")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let start_tok = self.pos;
        let mut lhs = self.and_expr()?;
        while self.peek().kind == TokenKind::OrOr {
            self.advance();
            let rhs = self.and_expr()?;
            lhs = Expr {
                span: self.span_from(start_tok),
                kind: ExprKind::Binary {
                    op: BinaryOp::Or,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let start_tok = self.pos;
        let mut lhs = self.cmp_expr()?;
        while self.peek().kind == TokenKind::AndAnd {
            self.advance();
            let rhs = self.cmp_expr()?;
            lhs = Expr {
                span: self.span_from(start_tok),
                kind: ExprKind::Binary {
                    op: BinaryOp::And,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    // Comparison is non-associative: `a < b < c` is a syntax error.
    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let start_tok = self.pos;
        let lhs = self.add_expr()?;
        let op = match self.peek().kind {
            TokenKind::Lt => BinaryOp::Lt,
            TokenKind::Le => BinaryOp::Le,
            TokenKind::Gt => BinaryOp::Gt,
            TokenKind::Ge => BinaryOp::Ge,
            TokenKind::EqEq => BinaryOp::Eq,
            TokenKind::Ne => BinaryOp::Ne,
            _ => return Ok(lhs),
        };
        self.advance();
        let rhs = self.add_expr()?;
        Ok(Expr {
            span: self.span_from(start_tok),
            kind: ExprKind::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
        })
    }

    fn add_expr(&mut self) -> Result<Expr, ParseError> {
        let start_tok = self.pos;
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => BinaryOp::Add,
                TokenKind::Minus => BinaryOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.mul_expr()?;
            lhs = Expr {
                span: self.span_from(start_tok),
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> Result<Expr, ParseError> {
        let start_tok = self.pos;
        let mut lhs = self.unary_expr()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Star => BinaryOp::Mul,
                TokenKind::Slash => BinaryOp::Div,
                TokenKind::Percent => BinaryOp::Rem,
                _ => break,
            };
            self.advance();
            let rhs = self.unary_expr()?;
            lhs = Expr {
                span: self.span_from(start_tok),
                kind: ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
            };
        }
        Ok(lhs)
    }

    fn unary_expr(&mut self) -> Result<Expr, ParseError> {
        let start_tok = self.pos;
        match self.peek().kind {
            TokenKind::Minus => {
                self.advance();
                let operand = self.unary_expr()?;
                Ok(Expr {
                    span: self.span_from(start_tok),
                    kind: ExprKind::Unary {
                        op: UnaryOp::Neg,
                        operand: Box::new(operand),
                    },
                })
            }
            TokenKind::Bang => {
                self.advance();
                let operand = self.unary_expr()?;
                Ok(Expr {
                    span: self.span_from(start_tok),
                    kind: ExprKind::Unary {
                        op: UnaryOp::Not,
                        operand: Box::new(operand),
                    },
                })
            }
            _ => self.primary_expr(),
        }
    }

    fn primary_expr(&mut self) -> Result<Expr, ParseError> {
        let start_tok = self.pos;
        match self.peek().kind.clone() {
            TokenKind::IntLit(n) => {
                self.advance();
                Ok(Expr {
                    span: self.span_from(start_tok),
                    kind: ExprKind::IntLit(n),
                })
            }
            TokenKind::KwTrue => {
                self.advance();
                Ok(Expr {
                    span: self.span_from(start_tok),
                    kind: ExprKind::BoolLit(true),
                })
            }
            TokenKind::KwFalse => {
                self.advance();
                Ok(Expr {
                    span: self.span_from(start_tok),
                    kind: ExprKind::BoolLit(false),
                })
            }
            TokenKind::Ident(name) => {
                self.advance();
                Ok(Expr {
                    span: self.span_from(start_tok),
                    kind: ExprKind::Var(name),
                })
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("expected expression")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABS: &str = "fn abs(x:int)->int { if (x<0) { return -x; } return x; }";

    #[test]
    fn abs_has_three_statements_one_decision() {
        let p = parse(ABS).unwrap();
        assert_eq!(p.stmt_count, 3);
        assert_eq!(p.decision_count, 1);
        assert_eq!(p.arm_count(), 2);
        assert_eq!(p.name, "abs");
    }

    #[test]
    fn ids_are_dense_preorder() {
        let src = "fn f(x:int)->int {
            let y: int = 0;
            if (x > 0) {
                y = 1;
                if (x > 10) { y = 2; }
            } else {
                y = 3;
            }
            while (y > 0) { y = y - 1; }
            return y;
        }";
        let p = parse(src).unwrap();
        let ids: Vec<u32> = p.statements().iter().map(|s| s.id.0).collect();
        assert_eq!(ids, (0..p.stmt_count).collect::<Vec<_>>());
        let dids: Vec<u32> = p
            .decisions()
            .iter()
            .map(|s| s.decision_id().unwrap().0)
            .collect();
        assert_eq!(dids, (0..p.decision_count).collect::<Vec<_>>());
    }

    #[test]
    fn trailing_operator_is_a_syntax_error() {
        let err = parse("fn g(x:int)->int { return x + }").unwrap_err();
        assert!(err.is_syntax(), "expected syntax error, got {err}");
    }

    #[test]
    fn missing_return_is_a_check_error() {
        let err = parse("fn f()->int { }").unwrap_err();
        assert!(err.is_check(), "expected check error, got {err}");
    }

    #[test]
    fn parse_is_deterministic() {
        let a = parse(ABS).unwrap();
        let b = parse(ABS).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn precedence_binds_cmp_between_bool_and_arith() {
        let p = parse("fn f(a:int,b:int)->bool { return a+1 < b*2 && a != 0; }").unwrap();
        // top node must be &&
        match &p.body[0].kind {
            StmtKind::Return { value } => match &value.kind {
                ExprKind::Binary { op, .. } => assert_eq!(*op, BinaryOp::And),
                other => panic!("expected binary, got {other:?}"),
            },
            _ => unreachable!(),
        }
    }

    #[test]
    fn chained_comparison_rejected() {
        assert!(parse("fn f(a:int)->bool { return 1 < a < 3; }").is_err());
    }
}

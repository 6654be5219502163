//! AST for the mini-language all subject programs are written in.
//!
//! Statements and decisions carry dense pre-order identifiers so coverage
//! vectors can be represented as plain bit sets over `0..S` and `0..2D`.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifies a program within a corpus. Program ids are the function names
/// declared in `.ml0` sources and must be unique corpus-wide.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProgramId(pub String);

impl ProgramId {
    pub fn new(name: impl Into<String>) -> Self {
        ProgramId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProgramId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Dense statement identifier, assigned in AST pre-order starting at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StatementId(pub u32);

/// Dense decision identifier (one per `if`/`while`), pre-order from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DecisionId(pub u32);

/// Identifier of one arm of a decision: `2 * decision` is the true arm,
/// `2 * decision + 1` the false arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BranchArmId(pub u32);

impl BranchArmId {
    pub fn true_arm(d: DecisionId) -> Self {
        BranchArmId(2 * d.0)
    }

    pub fn false_arm(d: DecisionId) -> Self {
        BranchArmId(2 * d.0 + 1)
    }

    /// The decision this arm belongs to.
    pub fn decision(self) -> DecisionId {
        DecisionId(self.0 / 2)
    }

    /// True when this is the taken-when-true arm of its decision.
    pub fn is_true_arm(self) -> bool {
        self.0 % 2 == 0
    }
}

/// Byte offsets into the source text, plus 1-based line/column of the start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

/// The two value types of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Type {
    Int,
    Bool,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
        }
    }
}

/// A runtime value: 64-bit two's-complement integer or boolean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    pub fn type_of(&self) -> Type {
        match self {
            Value::Int(_) => Type::Int,
            Value::Bool(_) => Type::Bool,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// A function parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub ty: Type,
}

/// One checked mini-language function.
///
/// Invariants established by the parser/checker:
/// - statement ids are `0..stmt_count`, assigned in pre-order,
/// - decision ids are `0..decision_count`, assigned in pre-order,
/// - every variable is declared before use and every path ends in
///   `return` or `fail`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    pub name: String,
    pub params: Vec<Param>,
    pub return_type: Type,
    pub body: Vec<Stmt>,
    pub stmt_count: u32,
    pub decision_count: u32,
    /// Original source text the program was parsed from.
    pub source: String,
}

impl Program {
    pub fn id(&self) -> ProgramId {
        ProgramId(self.name.clone())
    }

    /// Total number of branch arms (`2 * decision_count`).
    pub fn arm_count(&self) -> u32 {
        2 * self.decision_count
    }

    /// Parameter types in declaration order.
    pub fn param_types(&self) -> Vec<Type> {
        self.params.iter().map(|p| p.ty).collect()
    }

    /// The statements of the function in pre-order, flattened.
    pub fn statements(&self) -> Vec<&Stmt> {
        fn walk<'a>(stmts: &'a [Stmt], out: &mut Vec<&'a Stmt>) {
            for s in stmts {
                out.push(s);
                match &s.kind {
                    StmtKind::If {
                        then_body,
                        else_body,
                        ..
                    } => {
                        walk(then_body, out);
                        if let Some(eb) = else_body {
                            walk(eb, out);
                        }
                    }
                    StmtKind::While { body, .. } => walk(body, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.body, &mut out);
        out
    }

    /// The decision statements (`if`/`while`) in pre-order.
    pub fn decisions(&self) -> Vec<&Stmt> {
        self.statements()
            .into_iter()
            .filter(|s| matches!(s.kind, StmtKind::If { .. } | StmtKind::While { .. }))
            .collect()
    }

    /// Find the decision statement with the given id.
    pub fn decision(&self, d: DecisionId) -> Option<&Stmt> {
        self.decisions().into_iter().find(|s| s.decision_id() == Some(d))
    }
}

/// A statement node. Every statement carries its pre-order id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stmt {
    pub id: StatementId,
    pub span: SourceSpan,
    pub kind: StmtKind,
}

impl Stmt {
    pub fn decision_id(&self) -> Option<DecisionId> {
        match &self.kind {
            StmtKind::If { decision, .. } | StmtKind::While { decision, .. } => Some(*decision),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StmtKind {
    /// `let name: ty = init;`
    Decl {
        name: String,
        ty: Type,
        init: Expr,
    },
    /// `name = value;`
    Assign { name: String, value: Expr },
    /// `if (cond) { .. } else { .. }` — the else block is optional.
    If {
        decision: DecisionId,
        cond: Expr,
        then_body: Vec<Stmt>,
        else_body: Option<Vec<Stmt>>,
    },
    /// `while (cond) { .. }`
    While {
        decision: DecisionId,
        cond: Expr,
        body: Vec<Stmt>,
    },
    /// `return value;`
    Return { value: Expr },
    /// `fail("message");` — aborts execution with a failure outcome.
    Fail { message: String },
}

/// An expression node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expr {
    pub span: SourceSpan,
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExprKind {
    IntLit(i64),
    BoolLit(bool),
    Var(String),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnaryOp {
    /// Integer negation; negating `i64::MIN` is an overflow error.
    Neg,
    /// Boolean not.
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    /// Truncated division; division by zero and `i64::MIN / -1` are errors.
    Div,
    /// Truncated remainder (sign follows the dividend).
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    /// Short-circuit: the right operand is evaluated only if the left is true.
    And,
    /// Short-circuit: the right operand is evaluated only if the left is false.
    Or,
}

impl BinaryOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne
        )
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }
}

/// Position of one atom inside a decision's condition.
///
/// An atom is a leaf of the boolean formula: a comparison, a boolean
/// variable, or a boolean literal. Atoms are numbered left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomRef {
    pub decision: DecisionId,
    /// Left-to-right index of the atom within the condition.
    pub index: usize,
    /// Source rendering of the atom, for reports.
    pub text: String,
    /// Whether the atom sits directly under an `&&`/`||` node and can be
    /// removed by splicing its sibling up.
    pub droppable: bool,
}

/// Enumerate the atoms of a boolean expression left to right.
///
/// Descends through `&&`, `||` and `!`; comparisons, boolean variables and
/// boolean literals are leaves.
pub fn condition_atoms(cond: &Expr) -> Vec<(&Expr, bool)> {
    fn walk<'a>(e: &'a Expr, under_junction: bool, out: &mut Vec<(&'a Expr, bool)>) {
        match &e.kind {
            ExprKind::Binary { op, lhs, rhs } if matches!(op, BinaryOp::And | BinaryOp::Or) => {
                walk(lhs, true, out);
                walk(rhs, true, out);
            }
            ExprKind::Unary {
                op: UnaryOp::Not,
                operand,
            } => walk(operand, under_junction, out),
            _ => out.push((e, under_junction)),
        }
    }
    let mut out = Vec::new();
    walk(cond, false, &mut out);
    out
}

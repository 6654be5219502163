//! Test case/suite model, verdict computation, suite execution with
//! coverage, and the functional-equivalence probe.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{merge, metrics, CoverageMetrics};
use crate::interp::{execute, CoverageVector, ExecutionOutcome, RuntimeErrorKind};
use crate::minilang::{Program, ProgramId, Type, Value};
use crate::prng::InputSampler;

/// Identifies a group of functionally equivalent programs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupId(pub String);

impl GroupId {
    pub fn new(name: impl Into<String>) -> Self {
        GroupId(name.into())
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shared signature of a program group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub param_types: Vec<Type>,
    pub return_type: Type,
}

impl Signature {
    pub fn of(program: &Program) -> Self {
        Signature {
            param_types: program.param_types(),
            return_type: program.return_type,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.param_types.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ") -> {}", self.return_type)
    }
}

/// A group of supposedly functionally equivalent programs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramGroup {
    pub id: GroupId,
    pub signature: Signature,
    pub programs: Vec<Program>,
}

impl ProgramGroup {
    /// Build a group, verifying every member shares the signature.
    pub fn new(id: GroupId, programs: Vec<Program>) -> Result<Self, GroupError> {
        let first = programs
            .first()
            .ok_or_else(|| GroupError::Empty(id.clone()))?;
        let signature = Signature::of(first);
        for p in &programs {
            if Signature::of(p) != signature {
                return Err(GroupError::SignatureMismatch {
                    group: id.clone(),
                    program: p.id(),
                    expected: signature.to_string(),
                    found: Signature::of(p).to_string(),
                });
            }
        }
        Ok(ProgramGroup {
            id,
            signature,
            programs,
        })
    }

    pub fn program(&self, id: &ProgramId) -> Option<&Program> {
        self.programs.iter().find(|p| &p.id() == id)
    }

    pub fn program_ids(&self) -> Vec<ProgramId> {
        self.programs.iter().map(|p| p.id()).collect()
    }
}

#[derive(Debug, Clone, Error)]
pub enum GroupError {
    #[error("group `{0}` has no programs")]
    Empty(GroupId),
    #[error("group `{group}`: program `{program}` has signature {found}, expected {expected}")]
    SignatureMismatch {
        group: GroupId,
        program: ProgramId,
        expected: String,
        found: String,
    },
}

/// Where a test case came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestOrigin {
    /// Member of the common implementation-independent suite T0.
    Common,
    /// Coverage-guided test generated for the named program.
    Cross(ProgramId),
    /// Random extension of T0 used by the size-matched baseline.
    BaselineExtension,
}

/// Generator provenance: the stream seed and the attempt index at which the
/// input was drawn. Regenerating from the same lineage reproduces the case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedLineage {
    pub seed: u64,
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TestCaseId(pub u32);

/// One recorded test: an input tuple plus the expected outcome observed at
/// generation time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub id: TestCaseId,
    pub input: Vec<Value>,
    pub expected: ExecutionOutcome,
    pub origin: TestOrigin,
    pub lineage: SeedLineage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SuiteKind {
    T0,
    Ti(ProgramId),
    Cct,
    T0Plus,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SuiteId(pub String);

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSuite {
    pub id: SuiteId,
    pub kind: SuiteKind,
    pub cases: Vec<TestCase>,
}

impl TestSuite {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }
}

/// Outcome of running one test against one program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail { actual: ExecutionOutcome },
    /// Input arity/types do not match the program; excluded from pass-rate
    /// denominators.
    Inapplicable { reason: String },
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseResult {
    pub case_id: TestCaseId,
    pub verdict: Verdict,
    /// Coverage of this single execution; empty for inapplicable cases.
    pub coverage: CoverageVector,
}

/// Result of a whole-suite run: per-case verdicts in suite order plus the
/// merged coverage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteRunResult {
    pub program_id: ProgramId,
    pub case_results: Vec<CaseResult>,
    pub coverage: CoverageVector,
    pub metrics: CoverageMetrics,
    pub passed: usize,
    pub failed: usize,
    pub inapplicable: usize,
}

impl SuiteRunResult {
    pub fn any_fail(&self) -> bool {
        self.failed > 0
    }
}

/// Run one test case against a program. The verdict is `Pass` exactly when
/// the execution outcome equals the recorded expectation, kind and payload.
pub fn run_case(case: &TestCase, program: &Program, fuel: u64) -> (Verdict, CoverageVector) {
    match execute(program, &case.input, fuel) {
        Ok((outcome, coverage)) => {
            let verdict = if outcome == case.expected {
                Verdict::Pass
            } else {
                Verdict::Fail { actual: outcome }
            };
            (verdict, coverage)
        }
        Err(err) => (
            Verdict::Inapplicable {
                reason: err.to_string(),
            },
            CoverageVector::empty(program),
        ),
    }
}

/// Run every case of a suite against a program, merging coverage in stable
/// case order.
pub fn run_suite(suite: &TestSuite, program: &Program, fuel: u64) -> SuiteRunResult {
    let mut merged = CoverageVector::empty(program);
    let mut case_results = Vec::with_capacity(suite.cases.len());
    let (mut passed, mut failed, mut inapplicable) = (0, 0, 0);
    for case in &suite.cases {
        let (verdict, coverage) = run_case(case, program, fuel);
        match &verdict {
            Verdict::Pass => passed += 1,
            Verdict::Fail { .. } => failed += 1,
            Verdict::Inapplicable { .. } => inapplicable += 1,
        }
        if !matches!(verdict, Verdict::Inapplicable { .. }) {
            merged = merge(&merged, &coverage).expect("same program");
        }
        case_results.push(CaseResult {
            case_id: case.id,
            verdict,
            coverage,
        });
    }
    let m = metrics(&merged);
    SuiteRunResult {
        program_id: program.id(),
        case_results,
        coverage: merged,
        metrics: m,
        passed,
        failed,
        inapplicable,
    }
}

/// One probe input on which the group's members disagreed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Disagreement {
    pub input: Vec<Value>,
    pub outcomes: Vec<(ProgramId, ExecutionOutcome)>,
    pub majority: ExecutionOutcome,
}

/// Result of probing a group for functional equivalence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub group_id: GroupId,
    pub probes: u64,
    pub disagreements: Vec<Disagreement>,
}

impl EquivalenceReport {
    /// No disagreement over the probe set. Explicitly not a proof of
    /// functional equivalence.
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Majority outcome over `(program, outcome)` pairs; ties are broken in
/// favor of the outcome held by the lexicographically first program id.
pub fn majority_outcome(outcomes: &[(ProgramId, ExecutionOutcome)]) -> ExecutionOutcome {
    let mut counts: BTreeMap<&ExecutionOutcome, (usize, &ProgramId)> = BTreeMap::new();
    for (pid, outcome) in outcomes {
        let entry = counts.entry(outcome).or_insert((0, pid));
        entry.0 += 1;
        if pid < entry.1 {
            entry.1 = pid;
        }
    }
    counts
        .iter()
        .max_by(|a, b| {
            // higher count wins; on equal counts the smaller first-holder id wins
            a.1 .0.cmp(&b.1 .0).then_with(|| b.1 .1.cmp(a.1 .1))
        })
        .map(|(outcome, _)| (*outcome).clone())
        .expect("at least one outcome")
}

/// Execute every program of `group` on `probe_budget` seeded random inputs
/// and report each input where the outcomes differ. Inputs are drawn with
/// the standard sampler, feeding observed outputs back into the pool.
pub fn equivalence_probe(
    group: &ProgramGroup,
    probe_budget: u64,
    seed: u64,
    fuel: u64,
) -> EquivalenceReport {
    let mut sampler = InputSampler::new(seed);
    let mut disagreements = Vec::new();
    for _ in 0..probe_budget {
        let input = sampler.sample_tuple(&group.signature.param_types);
        let outcomes: Vec<(ProgramId, ExecutionOutcome)> = group
            .programs
            .iter()
            .map(|p| {
                let (outcome, _) = execute(p, &input, fuel).expect("signature checked");
                (p.id(), outcome)
            })
            .collect();
        for (_, outcome) in &outcomes {
            sampler.feed_outcome(outcome);
        }
        let first = &outcomes[0].1;
        if outcomes.iter().any(|(_, o)| o != first) {
            let majority = majority_outcome(&outcomes);
            disagreements.push(Disagreement {
                input,
                outcomes,
                majority,
            });
        }
    }
    EquivalenceReport {
        group_id: group.id.clone(),
        probes: probe_budget,
        disagreements,
    }
}

// ---------------------------------------------------------------------------
// Suite text format (documented in docs/formats.md)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Error)]
pub enum SuiteFormatError {
    #[error("line {0}: {1}")]
    Malformed(usize, String),
    #[error("missing `suite` header line")]
    MissingHeader,
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            other => out.push(other),
        }
    }
    out.push('"');
    out
}

fn outcome_to_text(o: &ExecutionOutcome) -> String {
    match o {
        ExecutionOutcome::Value(v) => format!("value:{v}"),
        ExecutionOutcome::Failure(m) => format!("failure:{}", escape(m)),
        ExecutionOutcome::RuntimeError(k) => format!("error:{k}"),
        ExecutionOutcome::FuelExhausted => "fuel_exhausted".to_string(),
    }
}

fn value_to_text(v: &Value) -> String {
    v.to_string()
}

fn kind_to_text(kind: &SuiteKind) -> String {
    match kind {
        SuiteKind::T0 => "t0".to_string(),
        SuiteKind::Ti(p) => format!("ti:{p}"),
        SuiteKind::Cct => "cct".to_string(),
        SuiteKind::T0Plus => "t0plus".to_string(),
    }
}

fn origin_to_text(origin: &TestOrigin) -> String {
    match origin {
        TestOrigin::Common => "common".to_string(),
        TestOrigin::Cross(p) => format!("cross:{p}"),
        TestOrigin::BaselineExtension => "baseline".to_string(),
    }
}

/// Serialize a suite to the line-oriented text format.
pub fn suite_to_text(suite: &TestSuite) -> String {
    let mut out = String::new();
    out.push_str("# crosscov suite v1\n");
    out.push_str(&format!("suite {} {}\n", suite.id, kind_to_text(&suite.kind)));
    for case in &suite.cases {
        let inputs: Vec<String> = case.input.iter().map(value_to_text).collect();
        out.push_str(&format!(
            "case {} seed={}/{} origin={} input=({}) expect={}\n",
            case.id.0,
            case.lineage.seed,
            case.lineage.index,
            origin_to_text(&case.origin),
            inputs.join(","),
            outcome_to_text(&case.expected),
        ));
    }
    out
}

/// Parse a suite from the text format.
pub fn suite_from_text(text: &str) -> Result<TestSuite, SuiteFormatError> {
    let mut header: Option<(SuiteId, SuiteKind)> = None;
    let mut cases = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let n = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("suite ") {
            let mut parts = rest.splitn(2, ' ');
            let id = parts
                .next()
                .ok_or_else(|| SuiteFormatError::Malformed(n, "missing suite id".into()))?;
            let kind = parts
                .next()
                .ok_or_else(|| SuiteFormatError::Malformed(n, "missing suite kind".into()))?;
            let kind = match kind {
                "t0" => SuiteKind::T0,
                "cct" => SuiteKind::Cct,
                "t0plus" => SuiteKind::T0Plus,
                other => match other.strip_prefix("ti:") {
                    Some(p) => SuiteKind::Ti(ProgramId::new(p)),
                    None => {
                        return Err(SuiteFormatError::Malformed(
                            n,
                            format!("unknown suite kind `{other}`"),
                        ))
                    }
                },
            };
            header = Some((SuiteId(id.to_string()), kind));
            continue;
        }
        if let Some(rest) = line.strip_prefix("case ") {
            cases.push(parse_case_line(rest, n)?);
            continue;
        }
        return Err(SuiteFormatError::Malformed(
            n,
            format!("unrecognized line `{line}`"),
        ));
    }
    let (id, kind) = header.ok_or(SuiteFormatError::MissingHeader)?;
    Ok(TestSuite { id, kind, cases })
}

fn parse_case_line(rest: &str, n: usize) -> Result<TestCase, SuiteFormatError> {
    let bad = |msg: &str| SuiteFormatError::Malformed(n, msg.to_string());
    let mut parts = rest.splitn(2, ' ');
    let id: u32 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad case id"))?;
    let rest = parts.next().ok_or_else(|| bad("truncated case line"))?;

    let field = |name: &str, from: &str| -> Option<String> {
        let key = format!("{name}=");
        let start = from.find(&key)? + key.len();
        Some(from[start..].to_string())
    };

    let seed_part = field("seed", rest).ok_or_else(|| bad("missing seed"))?;
    let seed_txt = seed_part.split(' ').next().unwrap_or("");
    let mut seed_split = seed_txt.splitn(2, '/');
    let seed: u64 = seed_split
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad seed"))?;
    let index: u64 = seed_split
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("bad seed index"))?;

    let origin_part = field("origin", rest).ok_or_else(|| bad("missing origin"))?;
    let origin_txt = origin_part.split(' ').next().unwrap_or("");
    let origin = match origin_txt {
        "common" => TestOrigin::Common,
        "baseline" => TestOrigin::BaselineExtension,
        other => match other.strip_prefix("cross:") {
            Some(p) => TestOrigin::Cross(ProgramId::new(p)),
            None => return Err(bad(&format!("unknown origin `{other}`"))),
        },
    };

    let input_part = field("input", rest).ok_or_else(|| bad("missing input"))?;
    if !input_part.starts_with('(') {
        return Err(bad("input must start with `(`"));
    }
    let close = input_part.find(')').ok_or_else(|| bad("unclosed input tuple"))?;
    let tuple = &input_part[1..close];
    let mut input = Vec::new();
    if !tuple.is_empty() {
        for item in tuple.split(',') {
            let v = match item {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                num => Value::Int(
                    num.parse()
                        .map_err(|_| bad(&format!("bad input value `{num}`")))?,
                ),
            };
            input.push(v);
        }
    }

    let expect_part = field("expect", rest).ok_or_else(|| bad("missing expect"))?;
    let expected = parse_outcome(&expect_part).ok_or_else(|| bad("bad expected outcome"))?;

    Ok(TestCase {
        id: TestCaseId(id),
        input,
        expected,
        origin,
        lineage: SeedLineage { seed, index },
    })
}

fn parse_outcome(text: &str) -> Option<ExecutionOutcome> {
    if text == "fuel_exhausted" {
        return Some(ExecutionOutcome::FuelExhausted);
    }
    if let Some(v) = text.strip_prefix("value:") {
        return match v {
            "true" => Some(ExecutionOutcome::Value(Value::Bool(true))),
            "false" => Some(ExecutionOutcome::Value(Value::Bool(false))),
            num => num.parse().ok().map(|n| ExecutionOutcome::Value(Value::Int(n))),
        };
    }
    if let Some(e) = text.strip_prefix("error:") {
        return match e {
            "divide_by_zero" => Some(ExecutionOutcome::RuntimeError(RuntimeErrorKind::DivideByZero)),
            "mod_by_zero" => Some(ExecutionOutcome::RuntimeError(RuntimeErrorKind::ModByZero)),
            "overflow" => Some(ExecutionOutcome::RuntimeError(RuntimeErrorKind::Overflow)),
            _ => None,
        };
    }
    if let Some(m) = text.strip_prefix("failure:") {
        let m = m.strip_prefix('"')?;
        let m = m.strip_suffix('"')?;
        let mut out = String::new();
        let mut chars = m.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                out.push(chars.next()?);
            } else {
                out.push(c);
            }
        }
        return Some(ExecutionOutcome::Failure(out));
    }
    None
}

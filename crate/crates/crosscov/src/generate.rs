//! The two test generators.
//!
//! `generate_t0` produces the common implementation-independent suite by
//! feedback-directed random generation: inputs mix a boundary-value pool
//! (fed back with observed outputs) and uniform draws, and the expected
//! outcome is the outcome all group members agree on. Inputs on which
//! members disagree are excluded and logged as divergence findings, so
//! every T0 case passes on every member by construction.
//!
//! `generate_ti` produces a per-program coverage-guided suite: random
//! candidate inputs are kept only when they improve the archive's merged
//! coverage of that one program, and expectations are recorded from the
//! program itself (a regression-style oracle — which is exactly what makes
//! running these tests on an equivalent program meaningful).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{improves, merge};
use crate::interp::{execute, CoverageVector, DEFAULT_FUEL};
use crate::minilang::Program;
use crate::prng::{derive_seed, InputSampler, POOL_EXTREMES};
use crate::testkit::{
    majority_outcome, Disagreement, ProgramGroup, SeedLineage, SuiteId, SuiteKind, TestCase,
    TestCaseId, TestOrigin, TestSuite,
};

/// Generator configuration. The seed fully determines all output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Number of cases in the common suite T0.
    pub t0_budget: usize,
    /// Number of candidate inputs proposed per program for Ti.
    pub ti_candidate_budget: usize,
    /// Boundary values seeding the input pool.
    pub pool_extremes: Vec<i64>,
    pub fuel: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 1,
            t0_budget: 50,
            ti_candidate_budget: 500,
            pool_extremes: POOL_EXTREMES.to_vec(),
            fuel: DEFAULT_FUEL,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig {
            seed,
            ..GenConfig::default()
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum GenError {
    #[error(
        "could not reach {wanted} unique agreeing inputs for `{scope}` (got {got} after {attempts} attempts)"
    )]
    Exhausted {
        scope: String,
        wanted: usize,
        got: usize,
        attempts: u64,
    },
    #[error("suite `{0}` is not a prefix-compatible product of this group and config")]
    LineageMismatch(SuiteId),
    #[error("extension target {target} is smaller than the base suite ({base} cases)")]
    TargetTooSmall { target: usize, base: usize },
}

/// A generated common suite plus the divergence findings the generator hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct T0Generation {
    pub suite: TestSuite,
    pub divergences: Vec<Disagreement>,
}

/// Attempt cap per requested case; generation stops with `Exhausted` when
/// unique agreeing inputs run out (tiny domains, e.g. all-bool signatures).
const ATTEMPTS_PER_CASE: u64 = 1_000;

fn common_stream_seed(group: &ProgramGroup, cfg: &GenConfig) -> u64 {
    derive_seed(cfg.seed, &["t0", &group.id.0])
}

/// Core of T0 generation and its baseline extension: draw inputs from the
/// sampler, execute them on every member, keep unique inputs on which all
/// members agree.
fn generate_common(
    group: &ProgramGroup,
    cfg: &GenConfig,
    budget: usize,
) -> Result<(Vec<TestCase>, Vec<Disagreement>), GenError> {
    let stream = common_stream_seed(group, cfg);
    let mut sampler = InputSampler::new(stream);
    for &v in &cfg.pool_extremes {
        sampler.feed(v);
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut cases: Vec<TestCase> = Vec::with_capacity(budget);
    let mut divergences = Vec::new();
    let max_attempts = ATTEMPTS_PER_CASE * budget as u64;
    let mut attempts = 0u64;
    while cases.len() < budget && attempts < max_attempts {
        let index = attempts;
        let input = sampler.sample_tuple(&group.signature.param_types);
        attempts += 1;
        if !seen.insert(input.clone()) {
            continue;
        }
        let outcomes: Vec<_> = group
            .programs
            .iter()
            .map(|p| {
                let (outcome, _) = execute(p, &input, cfg.fuel).expect("group signature checked");
                (p.id(), outcome)
            })
            .collect();
        for (_, outcome) in &outcomes {
            sampler.feed_outcome(outcome);
        }
        let first = &outcomes[0].1;
        if outcomes.iter().all(|(_, o)| o == first) {
            cases.push(TestCase {
                id: TestCaseId(cases.len() as u32),
                input,
                expected: first.clone(),
                origin: TestOrigin::Common,
                lineage: SeedLineage {
                    seed: stream,
                    index,
                },
            });
        } else {
            let majority = majority_outcome(&outcomes);
            divergences.push(Disagreement {
                input,
                outcomes,
                majority,
            });
        }
    }
    if cases.len() < budget {
        return Err(GenError::Exhausted {
            scope: group.id.0.clone(),
            wanted: budget,
            got: cases.len(),
            attempts,
        });
    }
    Ok((cases, divergences))
}

/// Generate the common implementation-independent suite T0 for a group.
pub fn generate_t0(group: &ProgramGroup, cfg: &GenConfig) -> Result<T0Generation, GenError> {
    let (cases, divergences) = generate_common(group, cfg, cfg.t0_budget)?;
    Ok(T0Generation {
        suite: TestSuite {
            id: SuiteId(format!("t0-{}", group.id)),
            kind: SuiteKind::T0,
            cases,
        },
        divergences,
    })
}

/// Extend a T0 suite to exactly `target_case_count` cases by continuing the
/// same generation stream. The result contains `t0` as a prefix; the added
/// cases are marked as baseline extensions.
pub fn extend_t0(
    t0: &TestSuite,
    group: &ProgramGroup,
    target_case_count: usize,
    cfg: &GenConfig,
) -> Result<TestSuite, GenError> {
    if target_case_count < t0.len() {
        return Err(GenError::TargetTooSmall {
            target: target_case_count,
            base: t0.len(),
        });
    }
    let (mut cases, _) = generate_common(group, cfg, target_case_count)?;
    // regeneration must reproduce the base suite exactly
    let prefix_ok = t0.len() <= cases.len()
        && t0
            .cases
            .iter()
            .zip(&cases)
            .all(|(a, b)| a.input == b.input && a.expected == b.expected);
    if !prefix_ok {
        return Err(GenError::LineageMismatch(t0.id.clone()));
    }
    for case in cases.iter_mut().skip(t0.len()) {
        case.origin = TestOrigin::BaselineExtension;
    }
    Ok(TestSuite {
        id: SuiteId(format!("{}-plus{}", t0.id, target_case_count)),
        kind: SuiteKind::T0Plus,
        cases,
    })
}

/// Generate the coverage-guided implementation-dependent suite Ti for one
/// program. The archive is returned in acceptance order; each kept test
/// strictly improved the archive's merged coverage when it was admitted.
pub fn generate_ti(program: &Program, cfg: &GenConfig) -> TestSuite {
    let pid = program.id();
    let stream = derive_seed(cfg.seed, &["ti", pid.as_str()]);
    let mut sampler = InputSampler::new(stream);
    for &v in &cfg.pool_extremes {
        sampler.feed(v);
    }
    let types = program.param_types();
    let mut archive: Vec<TestCase> = Vec::new();
    let mut archive_cov = CoverageVector::empty(program);
    for index in 0..cfg.ti_candidate_budget as u64 {
        let input = sampler.sample_tuple(&types);
        let (outcome, cov) = execute(program, &input, cfg.fuel).expect("types sampled to match");
        sampler.feed_outcome(&outcome);
        if improves(&cov, &archive_cov).expect("same program") {
            archive_cov = merge(&archive_cov, &cov).expect("same program");
            archive.push(TestCase {
                id: TestCaseId(archive.len() as u32),
                input,
                expected: outcome,
                origin: TestOrigin::Cross(pid.clone()),
                lineage: SeedLineage {
                    seed: stream,
                    index,
                },
            });
        }
    }
    TestSuite {
        id: SuiteId(format!("ti-{pid}")),
        kind: SuiteKind::Ti(pid),
        cases: archive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::metrics;
    use crate::minilang::{parse, Value};
    use crate::testkit::{run_suite, suite_to_text, GroupId, Verdict};

    fn abs_group() -> ProgramGroup {
        let a = parse("fn abs_a(x:int)->int { if (x<0) { return -x; } return x; }").unwrap();
        let b =
            parse("fn abs_b(x:int)->int { if (x >= 0) { return x; } return 0 - x; }").unwrap();
        ProgramGroup::new(GroupId::new("abs"), vec![a, b]).unwrap()
    }

    #[test]
    fn t0_cases_pass_on_every_member() {
        let group = abs_group();
        let cfg = GenConfig::with_seed(1);
        let gen = generate_t0(&group, &cfg).unwrap();
        assert_eq!(gen.suite.len(), 50);
        assert!(gen.divergences.is_empty());
        for p in &group.programs {
            let result = run_suite(&gen.suite, p, cfg.fuel);
            assert_eq!(result.passed, 50, "all T0 cases pass on {}", p.name);
        }
    }

    #[test]
    fn t0_is_deterministic_bytewise() {
        let group = abs_group();
        let cfg = GenConfig::with_seed(7);
        let a = generate_t0(&group, &cfg).unwrap();
        let b = generate_t0(&group, &cfg).unwrap();
        assert_eq!(suite_to_text(&a.suite), suite_to_text(&b.suite));
    }

    #[test]
    fn t0_budget_one_gives_singleton() {
        let group = abs_group();
        let mut cfg = GenConfig::with_seed(1);
        cfg.t0_budget = 1;
        let gen = generate_t0(&group, &cfg).unwrap();
        assert_eq!(gen.suite.len(), 1);
    }

    #[test]
    fn divergent_member_inputs_are_excluded_and_logged() {
        // planted fault: mishandles zero
        let good = parse("fn z_a(x:int)->int { if (x<0) { return -x; } return x; }").unwrap();
        let bad =
            parse("fn z_b(x:int)->int { if (x<0) { return -x; } if (x==0) { return 1; } return x; }")
                .unwrap();
        let group = ProgramGroup::new(GroupId::new("zed"), vec![good, bad]).unwrap();
        let cfg = GenConfig::with_seed(2);
        let gen = generate_t0(&group, &cfg).unwrap();
        assert!(
            gen.divergences.iter().any(|d| d.input == vec![Value::Int(0)]),
            "zero must surface as a divergence finding"
        );
        assert!(
            gen.suite.cases.iter().all(|c| c.input != vec![Value::Int(0)]),
            "divergent input must not be in T0"
        );
        for p in &group.programs {
            let result = run_suite(&gen.suite, p, cfg.fuel);
            assert_eq!(result.failed, 0);
        }
    }

    #[test]
    fn extend_keeps_prefix_and_marks_extension() {
        let group = abs_group();
        let cfg = GenConfig::with_seed(3);
        let t0 = generate_t0(&group, &cfg).unwrap().suite;
        let plus = extend_t0(&t0, &group, 75, &cfg).unwrap();
        assert_eq!(plus.len(), 75);
        for (a, b) in t0.cases.iter().zip(&plus.cases) {
            assert_eq!(a.input, b.input);
            assert_eq!(a.expected, b.expected);
            assert_eq!(b.origin, TestOrigin::Common);
        }
        assert!(plus.cases[50..]
            .iter()
            .all(|c| c.origin == TestOrigin::BaselineExtension));
        // extending to the same size is the identity on inputs
        let same = extend_t0(&t0, &group, 50, &cfg).unwrap();
        assert_eq!(
            same.cases.iter().map(|c| &c.input).collect::<Vec<_>>(),
            t0.cases.iter().map(|c| &c.input).collect::<Vec<_>>()
        );
    }

    #[test]
    fn tiny_bool_domain_exhausts() {
        let a = parse("fn and_a(p:bool,q:bool)->bool { if (p) { return q; } return false; }")
            .unwrap();
        let b = parse("fn and_b(p:bool,q:bool)->bool { if (q) { return p; } return false; }")
            .unwrap();
        let group = ProgramGroup::new(GroupId::new("conj"), vec![a, b]).unwrap();
        let mut cfg = GenConfig::with_seed(1);
        cfg.t0_budget = 5; // only 4 distinct inputs exist
        assert!(matches!(
            generate_t0(&group, &cfg),
            Err(GenError::Exhausted { got: 4, .. })
        ));
    }

    #[test]
    fn ti_reaches_full_coverage_on_abs() {
        let p = parse("fn abs_a(x:int)->int { if (x<0) { return -x; } return x; }").unwrap();
        let cfg = GenConfig::with_seed(1);
        let ti = generate_ti(&p, &cfg);
        assert!(ti.len() >= 2 && ti.len() <= 3, "archive size {}", ti.len());
        let result = run_suite(&ti, &p, cfg.fuel);
        assert!(result.coverage.is_full(), "{:?}", result.metrics);
        assert_eq!(result.failed, 0, "Ti cases pass on their own program");
    }

    #[test]
    fn ti_on_straight_line_program_is_one_test() {
        let p = parse("fn inc(x:int)->int { return x + 1; }").unwrap();
        let ti = generate_ti(&p, &GenConfig::with_seed(1));
        assert_eq!(ti.len(), 1);
    }

    #[test]
    fn ti_reports_random_resistant_guard_honestly() {
        let p = parse(
            "fn needle(x:int)->int { if (x == 123456789) { return 123456789; } return x; }",
        )
        .unwrap();
        let ti = generate_ti(&p, &GenConfig::with_seed(1));
        let result = run_suite(&ti, &p, DEFAULT_FUEL);
        let m = metrics(&result.coverage);
        assert!(
            m.stmt.hit < m.stmt.total,
            "the magic-constant arm must stay unreached"
        );
    }

    #[test]
    fn ti_archive_is_minimal_in_order() {
        let p = parse(
            "fn clamp(x:int,lo:int,hi:int)->int {
                if (x < lo) { return lo; }
                if (x > hi) { return hi; }
                return x;
            }",
        )
        .unwrap();
        let cfg = GenConfig::with_seed(5);
        let ti = generate_ti(&p, &cfg);
        // each archive element must add coverage over the prefix before it
        let mut acc = CoverageVector::empty(&p);
        for case in &ti.cases {
            let (verdict, cov) = crate::testkit::run_case(case, &p, cfg.fuel);
            assert_eq!(verdict, Verdict::Pass);
            assert!(improves(&cov, &acc).unwrap(), "case {:?} added nothing", case.id);
            acc = merge(&acc, &cov).unwrap();
        }
    }

    #[test]
    fn regeneration_from_lineage_is_byte_identical() {
        let group = abs_group();
        let cfg = GenConfig::with_seed(11);
        let first = generate_t0(&group, &cfg).unwrap().suite;
        let second = generate_t0(&group, &cfg).unwrap().suite;
        assert_eq!(suite_to_text(&first), suite_to_text(&second));
        let ti1 = generate_ti(&group.programs[0], &cfg);
        let ti2 = generate_ti(&group.programs[0], &cfg);
        assert_eq!(suite_to_text(&ti1), suite_to_text(&ti2));
    }
}


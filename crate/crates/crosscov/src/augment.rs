//! Cumulative cross-coverage test suite augmentation and the size-matched
//! random baseline.
//!
//! Starting from the common suite T0, the suites of the other group members
//! are examined one by one (seeded-shuffle order by default, recorded for
//! replay). A source suite is admitted as a whole when at least one of its
//! tests exercises a statement or branch arm of the target that the suite
//! built so far does not; the result is the augmented cumulative cross-test
//! suite CCT for the target. The baseline extends T0 with random tests to
//! the same case count, with no cross-coverage information.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{gain, improves, merge, metrics, CoverageMetrics, Gain};
use crate::generate::{extend_t0, GenConfig, GenError};
use crate::minilang::{Program, ProgramId};
use crate::prng::SplitMix64;
use crate::testkit::{
    run_suite, ProgramGroup, SuiteId, SuiteKind, TestCase, TestCaseId, TestSuite,
};

/// How candidate source programs are ordered during augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderMode {
    /// Seeded shuffle (default); the seed is recorded in the result.
    Shuffle,
    /// Ascending program-id order, for reproducible walkthroughs.
    Ascending,
}

impl std::fmt::Display for OrderMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrderMode::Shuffle => f.write_str("shuffle"),
            OrderMode::Ascending => f.write_str("ascending"),
        }
    }
}

/// One admitted source suite and the first of its tests that improved the
/// target's coverage at admission time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddedSuite {
    pub source: ProgramId,
    pub improving_case: TestCaseId,
}

/// Outcome of one cumulative augmentation run for one target program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentationResult {
    pub program_id: ProgramId,
    /// T0 followed by every admitted source suite, case ids renumbered.
    pub cct: TestSuite,
    pub added_suites: Vec<AddedSuite>,
    /// Order in which candidate sources were examined.
    pub candidate_order: Vec<ProgramId>,
    /// Sources (admitted or not) with at least one test failing on the
    /// target — cross-failure signals for candidate ranking.
    pub failing_cross_sources: Vec<ProgramId>,
    /// Suite count including T0 (the unit the study reports sizes in).
    pub cct_size_suites: usize,
    pub cct_size_cases: usize,
    pub coverage_before: CoverageMetrics,
    pub coverage_after: CoverageMetrics,
    pub order_seed: u64,
    pub order_mode: OrderMode,
}

impl AugmentationResult {
    pub fn cct_gain(&self) -> Gain {
        gain(&self.coverage_after, &self.coverage_before)
    }

    /// True when augmentation added at least one suite.
    pub fn augmented(&self) -> bool {
        !self.added_suites.is_empty()
    }
}

/// Size-matched random baseline for one target program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineResult {
    pub program_id: ProgramId,
    pub t0_plus: TestSuite,
    pub coverage: CoverageMetrics,
    /// Point-wise `(CCT gain) - (T0+ gain)`; negative components are legal.
    pub delta_vs_cct: Gain,
}

#[derive(Debug, Clone, Error)]
pub enum AugmentError {
    #[error("target `{0}` is not a member of group `{1}`")]
    TargetNotInGroup(ProgramId, String),
    #[error("no implementation-dependent suite provided for `{0}`")]
    MissingSuite(ProgramId),
    #[error(transparent)]
    Generation(#[from] GenError),
}

/// Concatenate T0 and the admitted suites into one CCT suite with fresh
/// dense case ids (origins and lineages keep the provenance).
fn assemble_cct(target: &ProgramId, t0: &TestSuite, admitted: &[&TestSuite]) -> TestSuite {
    let mut cases: Vec<TestCase> = Vec::new();
    for case in t0.cases.iter().chain(admitted.iter().flat_map(|s| &s.cases)) {
        let mut c = case.clone();
        c.id = TestCaseId(cases.len() as u32);
        cases.push(c);
    }
    TestSuite {
        id: SuiteId(format!("cct-{target}")),
        kind: SuiteKind::Cct,
        cases,
    }
}

/// Cumulative cross-coverage augmentation (the study's main loop) for one
/// target. `ti_suites` must hold a suite for every group member other than
/// the target; the target's own suite is ignored if present.
pub fn augment_cumulative(
    group: &ProgramGroup,
    target: &ProgramId,
    t0: &TestSuite,
    ti_suites: &BTreeMap<ProgramId, TestSuite>,
    order_seed: u64,
    order_mode: OrderMode,
    fuel: u64,
) -> Result<AugmentationResult, AugmentError> {
    let target_program = group
        .program(target)
        .ok_or_else(|| AugmentError::TargetNotInGroup(target.clone(), group.id.0.clone()))?;

    let mut candidates: Vec<ProgramId> = group
        .program_ids()
        .into_iter()
        .filter(|id| id != target)
        .collect();
    candidates.sort();
    for id in &candidates {
        if !ti_suites.contains_key(id) {
            return Err(AugmentError::MissingSuite(id.clone()));
        }
    }
    if order_mode == OrderMode::Shuffle {
        SplitMix64::new(order_seed).shuffle(&mut candidates);
    }

    let t0_run = run_suite(t0, target_program, fuel);
    let coverage_before = t0_run.metrics;
    let mut current = t0_run.coverage;

    let mut added_suites = Vec::new();
    let mut admitted: Vec<&TestSuite> = Vec::new();
    let mut failing_cross_sources = Vec::new();
    for source in &candidates {
        let suite = &ti_suites[source];
        let run = run_suite(suite, target_program, fuel);
        if run.any_fail() {
            failing_cross_sources.push(source.clone());
        }
        let improving_case = run
            .case_results
            .iter()
            .find(|cr| improves(&cr.coverage, &current).expect("same program"))
            .map(|cr| cr.case_id);
        if let Some(improving_case) = improving_case {
            added_suites.push(AddedSuite {
                source: source.clone(),
                improving_case,
            });
            admitted.push(suite);
            current = merge(&current, &run.coverage).expect("same program");
        }
    }
    failing_cross_sources.sort();

    let cct = assemble_cct(target, t0, &admitted);
    let cct_size_cases = cct.len();
    Ok(AugmentationResult {
        program_id: target.clone(),
        cct,
        cct_size_suites: 1 + added_suites.len(),
        cct_size_cases,
        added_suites,
        candidate_order: candidates,
        failing_cross_sources,
        coverage_before,
        coverage_after: metrics(&current),
        order_seed,
        order_mode,
    })
}

/// Single-source augmentation: add `tj` to `t0` when one of its tests
/// improves the target's T0 coverage.
pub fn augment_per_pair(
    target: &Program,
    t0: &TestSuite,
    tj: &TestSuite,
    fuel: u64,
) -> AugmentationResult {
    let source = match &tj.kind {
        SuiteKind::Ti(pid) => pid.clone(),
        _ => ProgramId::new(tj.id.0.clone()),
    };
    let t0_run = run_suite(t0, target, fuel);
    let coverage_before = t0_run.metrics;
    let mut current = t0_run.coverage;

    let run = run_suite(tj, target, fuel);
    let mut failing_cross_sources = Vec::new();
    if run.any_fail() {
        failing_cross_sources.push(source.clone());
    }
    let improving_case = run
        .case_results
        .iter()
        .find(|cr| improves(&cr.coverage, &current).expect("same program"))
        .map(|cr| cr.case_id);

    let mut added_suites = Vec::new();
    let mut admitted: Vec<&TestSuite> = Vec::new();
    if let Some(improving_case) = improving_case {
        added_suites.push(AddedSuite {
            source: source.clone(),
            improving_case,
        });
        admitted.push(tj);
        current = merge(&current, &run.coverage).expect("same program");
    }

    let target_id = target.id();
    let cct = assemble_cct(&target_id, t0, &admitted);
    let cct_size_cases = cct.len();
    AugmentationResult {
        program_id: target_id,
        cct,
        cct_size_suites: 1 + added_suites.len(),
        cct_size_cases,
        added_suites,
        candidate_order: vec![source],
        failing_cross_sources,
        coverage_before,
        coverage_after: metrics(&current),
        order_seed: 0,
        order_mode: OrderMode::Ascending,
    }
}

/// Build the size-matched random baseline T0+ for the target of `aug`:
/// extend T0 to exactly `aug.cct_size_cases` cases, measure its coverage on
/// the target, and compare gains.
pub fn build_baseline(
    group: &ProgramGroup,
    t0: &TestSuite,
    aug: &AugmentationResult,
    cfg: &GenConfig,
) -> Result<BaselineResult, AugmentError> {
    let target_program = group.program(&aug.program_id).ok_or_else(|| {
        AugmentError::TargetNotInGroup(aug.program_id.clone(), group.id.0.clone())
    })?;
    let t0_plus = extend_t0(t0, group, aug.cct_size_cases, cfg)?;
    let run = run_suite(&t0_plus, target_program, cfg.fuel);
    let baseline_gain = gain(&run.metrics, &aug.coverage_before);
    let delta_vs_cct = aug.cct_gain().minus(&baseline_gain);
    Ok(BaselineResult {
        program_id: aug.program_id.clone(),
        t0_plus,
        coverage: run.metrics,
        delta_vs_cct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{execute, DEFAULT_FUEL};
    use crate::minilang::{parse, Value};
    use crate::testkit::{GroupId, SeedLineage, TestOrigin};

    const ABS_A: &str = "fn abs_a(x:int)->int { if (x<0) { return -x; } return x; }";
    const ABS_B: &str = "fn abs_b(x:int)->int { if (x >= 0) { return x; } return 0 - x; }";

    fn case_for(program: &str, id: u32, x: i64, origin: TestOrigin) -> TestCase {
        let p = parse(program).unwrap();
        let (expected, _) = execute(&p, &[Value::Int(x)], DEFAULT_FUEL).unwrap();
        TestCase {
            id: TestCaseId(id),
            input: vec![Value::Int(x)],
            expected,
            origin,
            lineage: SeedLineage { seed: 0, index: id as u64 },
        }
    }

    fn suite(id: &str, kind: SuiteKind, cases: Vec<TestCase>) -> TestSuite {
        TestSuite {
            id: SuiteId(id.into()),
            kind,
            cases,
        }
    }

    fn two_program_setup() -> (ProgramGroup, TestSuite, BTreeMap<ProgramId, TestSuite>) {
        let a = parse(ABS_A).unwrap();
        let b = parse(ABS_B).unwrap();
        let group = ProgramGroup::new(GroupId::new("abs"), vec![a, b]).unwrap();
        // T0 covers only negatives: abs_a's false arm stays unhit
        let t0 = suite(
            "t0-abs",
            SuiteKind::T0,
            vec![
                case_for(ABS_A, 0, -5, TestOrigin::Common),
                case_for(ABS_A, 1, -9, TestOrigin::Common),
            ],
        );
        let ti_b = suite(
            "ti-abs_b",
            SuiteKind::Ti(ProgramId::new("abs_b")),
            vec![case_for(ABS_B, 0, 3, TestOrigin::Cross(ProgramId::new("abs_b")))],
        );
        let ti_a = suite(
            "ti-abs_a",
            SuiteKind::Ti(ProgramId::new("abs_a")),
            vec![case_for(ABS_A, 0, -1, TestOrigin::Cross(ProgramId::new("abs_a")))],
        );
        let mut ti = BTreeMap::new();
        ti.insert(ProgramId::new("abs_a"), ti_a);
        ti.insert(ProgramId::new("abs_b"), ti_b);
        (group, t0, ti)
    }

    #[test]
    fn source_covering_missing_arm_is_admitted() {
        let (group, t0, ti) = two_program_setup();
        let target = ProgramId::new("abs_a");
        let aug = augment_cumulative(
            &group,
            &target,
            &t0,
            &ti,
            42,
            OrderMode::Shuffle,
            DEFAULT_FUEL,
        )
        .unwrap();
        assert_eq!(aug.added_suites.len(), 1);
        assert_eq!(aug.added_suites[0].source, ProgramId::new("abs_b"));
        assert_eq!(aug.cct_size_suites, 2);
        assert_eq!(aug.cct_size_cases, 3);
        assert!(aug.coverage_after.dominates(&aug.coverage_before));
        assert_eq!(aug.coverage_after.branch.hit, 2);
        // cct ids are dense and provenance survives
        let ids: Vec<u32> = aug.cct.cases.iter().map(|c| c.id.0).collect();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(
            aug.cct.cases[2].origin,
            TestOrigin::Cross(ProgramId::new("abs_b"))
        );
    }

    #[test]
    fn fully_covered_target_gets_no_augmentation() {
        let (group, _, ti) = two_program_setup();
        let target = ProgramId::new("abs_a");
        let t0 = suite(
            "t0-full",
            SuiteKind::T0,
            vec![
                case_for(ABS_A, 0, -5, TestOrigin::Common),
                case_for(ABS_A, 1, 4, TestOrigin::Common),
            ],
        );
        let aug = augment_cumulative(
            &group,
            &target,
            &t0,
            &ti,
            42,
            OrderMode::Shuffle,
            DEFAULT_FUEL,
        )
        .unwrap();
        assert!(!aug.augmented(), "already at 100/100");
        assert_eq!(aug.cct_size_suites, 1);
        assert_eq!(aug.cct.len(), t0.len());
        assert!(aug.cct_gain().is_zero());
    }

    #[test]
    fn single_program_group_is_vacuous() {
        let a = parse(ABS_A).unwrap();
        let group = ProgramGroup::new(GroupId::new("solo"), vec![a]).unwrap();
        let t0 = suite(
            "t0-solo",
            SuiteKind::T0,
            vec![case_for(ABS_A, 0, -5, TestOrigin::Common)],
        );
        let aug = augment_cumulative(
            &group,
            &ProgramId::new("abs_a"),
            &t0,
            &BTreeMap::new(),
            1,
            OrderMode::Shuffle,
            DEFAULT_FUEL,
        )
        .unwrap();
        assert!(aug.added_suites.is_empty());
        assert!(aug.candidate_order.is_empty());
    }

    #[test]
    fn pair_variant_matches_cumulative_on_two_program_group() {
        let (group, t0, ti) = two_program_setup();
        let target = ProgramId::new("abs_a");
        let cumulative = augment_cumulative(
            &group,
            &target,
            &t0,
            &ti,
            9,
            OrderMode::Shuffle,
            DEFAULT_FUEL,
        )
        .unwrap();
        let pair = augment_per_pair(
            group.program(&target).unwrap(),
            &t0,
            &ti[&ProgramId::new("abs_b")],
            DEFAULT_FUEL,
        );
        assert_eq!(
            pair.added_suites
                .iter()
                .map(|a| &a.source)
                .collect::<Vec<_>>(),
            cumulative
                .added_suites
                .iter()
                .map(|a| &a.source)
                .collect::<Vec<_>>()
        );
        assert_eq!(pair.coverage_after, cumulative.coverage_after);
        assert_eq!(pair.cct.cases.len(), cumulative.cct.cases.len());
    }

    #[test]
    fn covered_source_is_not_admitted_in_pair_variant() {
        let (group, _, ti) = two_program_setup();
        let t0 = suite(
            "t0-full",
            SuiteKind::T0,
            vec![
                case_for(ABS_A, 0, -5, TestOrigin::Common),
                case_for(ABS_A, 1, 4, TestOrigin::Common),
            ],
        );
        let pair = augment_per_pair(
            group.program(&ProgramId::new("abs_a")).unwrap(),
            &t0,
            &ti[&ProgramId::new("abs_b")],
            DEFAULT_FUEL,
        );
        assert!(pair.added_suites.is_empty());
        assert_eq!(pair.cct.len(), t0.len(), "CCT == T0");
    }

    #[test]
    fn replay_with_same_order_seed_is_identical() {
        let (group, t0, ti) = two_program_setup();
        let target = ProgramId::new("abs_a");
        for seed in [1u64, 2, 3, 99] {
            let a = augment_cumulative(
                &group, &target, &t0, &ti, seed, OrderMode::Shuffle, DEFAULT_FUEL,
            )
            .unwrap();
            let b = augment_cumulative(
                &group, &target, &t0, &ti, seed, OrderMode::Shuffle, DEFAULT_FUEL,
            )
            .unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn missing_suite_is_an_error() {
        let (group, t0, _) = two_program_setup();
        let err = augment_cumulative(
            &group,
            &ProgramId::new("abs_a"),
            &t0,
            &BTreeMap::new(),
            1,
            OrderMode::Shuffle,
            DEFAULT_FUEL,
        )
        .unwrap_err();
        assert!(matches!(err, AugmentError::MissingSuite(_)));
    }

    #[test]
    fn baseline_is_size_matched_and_compares_gains() {
        use crate::generate::{generate_t0, generate_ti};
        let (group, _, _) = two_program_setup();
        let cfg = GenConfig::with_seed(1);
        let t0 = generate_t0(&group, &cfg).unwrap().suite;
        let mut ti = BTreeMap::new();
        for p in &group.programs {
            ti.insert(p.id(), generate_ti(p, &cfg));
        }
        let target = ProgramId::new("abs_a");
        let aug = augment_cumulative(
            &group, &target, &t0, &ti, 7, OrderMode::Shuffle, cfg.fuel,
        )
        .unwrap();
        let baseline = build_baseline(&group, &t0, &aug, &cfg).unwrap();
        assert_eq!(baseline.t0_plus.len(), aug.cct_size_cases);
        // both gains measured from the same T0 baseline; delta is their difference
        let expected_delta = aug
            .cct_gain()
            .minus(&gain(&baseline.coverage, &aug.coverage_before));
        assert_eq!(baseline.delta_vs_cct, expected_delta);
    }
}

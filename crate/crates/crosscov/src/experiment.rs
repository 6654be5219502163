//! RQ1/RQ2 pipelines over a corpus and their JSON/CSV reports.
//!
//! RQ1: generate the common suite T0 and the per-program suites Ti for every
//! group, run cumulative cross-coverage augmentation for every program, and
//! compare against the size-matched random baseline on the programs whose
//! resulting statement coverage sits below the configured threshold.
//!
//! RQ2: for every program that gained coverage in RQ1, inject one
//! missing-functionality mutant, keep the ones the common suite misses and
//! that actually diverge, and count which cross suites expose them.
//!
//! Reports are deterministic: identical `(corpus, seed, config)` produce
//! byte-identical JSON and CSV on any machine. The first verified run's
//! reports are frozen as golden files and compared byte-exactly in CI.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::Serialize;

use crate::augment::{
    augment_cumulative, build_baseline, AugmentError, AugmentationResult, BaselineResult,
    OrderMode,
};
use crate::corpus::CorpusLoad;
use crate::coverage::{format_fixed2, format_pct_ratio, CoverageMetrics, Gain, Pct};
use crate::generate::{generate_t0, generate_ti, GenConfig};
use crate::interp::DEFAULT_FUEL;
use crate::minilang::{ProgramId, Value};
use crate::mutate::{
    cross_detect, filter_by_t0, inject, validate_mutant, MutateError, MutationRecord,
    MutationStatus,
};
use crate::prng::derive_seed;
use crate::testkit::{Disagreement, ProgramGroup, TestSuite};

/// Resolved configuration of an experiment run; everything that influences
/// the output is recorded in the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub t0_budget: usize,
    pub ti_candidate_budget: usize,
    pub fuel: u64,
    /// Statement-coverage threshold (percent) below which a program is
    /// baseline-eligible.
    pub baseline_threshold: u32,
    pub order_mode: OrderMode,
    /// Probe budget used when validating mutants.
    pub mutant_probe_budget: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            t0_budget: 50,
            ti_candidate_budget: 500,
            fuel: DEFAULT_FUEL,
            baseline_threshold: 85,
            order_mode: OrderMode::Shuffle,
            mutant_probe_budget: 2_000,
        }
    }
}

impl ExperimentConfig {
    pub fn gen_config(&self) -> GenConfig {
        GenConfig {
            seed: self.seed,
            t0_budget: self.t0_budget,
            ti_candidate_budget: self.ti_candidate_budget,
            pool_extremes: crate::prng::POOL_EXTREMES.to_vec(),
            fuel: self.fuel,
        }
    }
}

/// Why a program was excluded from the baseline comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaselineOutcome {
    Eligible(BaselineResult),
    /// Resulting statement coverage at or above the threshold.
    AboveThreshold,
    /// CCT equals T0; there is nothing to size-match against.
    NoAugmentation,
    /// The random extension ran out of unique inputs.
    Exhausted(String),
}

/// Everything RQ1 computed for one group, kept for RQ2 and for ranking.
#[derive(Debug, Clone)]
pub struct GroupArtifacts {
    pub group: ProgramGroup,
    pub flagged: bool,
    pub t0: TestSuite,
    pub divergences: Vec<Disagreement>,
    pub ti_suites: BTreeMap<ProgramId, TestSuite>,
    pub augmentations: BTreeMap<ProgramId, AugmentationResult>,
    pub baselines: BTreeMap<ProgramId, BaselineOutcome>,
}

/// RQ1 result: the serializable report plus the artifacts RQ2 reuses.
#[derive(Debug, Clone)]
pub struct Rq1Outcome {
    pub report: Rq1Report,
    pub artifacts: Vec<GroupArtifacts>,
}

// ---------------------------------------------------------------------------
// Report data model (field order is the JSON order)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricsJson {
    pub stmt_hit: u32,
    pub stmt_total: u32,
    pub stmt_pct: String,
    pub branch_hit: u32,
    pub branch_total: u32,
    pub branch_pct: String,
    pub no_branches: bool,
}

impl MetricsJson {
    fn from(m: &CoverageMetrics) -> Self {
        MetricsJson {
            stmt_hit: m.stmt.hit,
            stmt_total: m.stmt.total,
            stmt_pct: format_pct_ratio(m.stmt_pct()),
            branch_hit: m.branch.hit,
            branch_total: m.branch.total,
            branch_pct: format_pct_ratio(m.branch_pct()),
            no_branches: m.no_branches,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainJson {
    pub stmt: String,
    pub branch: String,
}

impl GainJson {
    fn from(g: &Gain) -> Self {
        GainJson {
            stmt: format_pct_ratio(g.stmt),
            branch: format_pct_ratio(g.branch),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaselineJson {
    pub eligible: bool,
    /// `eligible`, `above_threshold`, `no_augmentation` or
    /// `extension_exhausted`.
    pub status: String,
    pub t0plus_cases: Option<usize>,
    pub t0plus: Option<MetricsJson>,
    pub delta: Option<GainJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProgramRowJson {
    pub program_id: String,
    pub t0: MetricsJson,
    pub cct: MetricsJson,
    pub gain: GainJson,
    /// `none`, `stmt_only`, `branch_only` or `both`.
    pub gain_bucket: String,
    pub added_suites: Vec<String>,
    pub cct_size_suites: usize,
    pub cct_size_cases: usize,
    pub order_seed: u64,
    /// Source programs whose suites had failing tests on this program.
    pub cross_failures: Vec<String>,
    pub baseline: BaselineJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupReportJson {
    pub group_id: String,
    pub flagged: bool,
    pub divergence_findings: usize,
    pub programs: Vec<ProgramRowJson>,
    pub avg_stmt_gain: String,
    pub avg_branch_gain: String,
    pub avg_cct_size_suites: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountPctJson {
    pub count: usize,
    pub pct: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GainBucketsJson {
    pub none: usize,
    pub stmt_only: usize,
    pub branch_only: usize,
    pub both: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaselineSummaryJson {
    pub eligible: usize,
    pub excluded_above_threshold: usize,
    pub excluded_no_augmentation: usize,
    pub excluded_exhausted: usize,
    pub mean_delta_stmt: String,
    pub mean_delta_branch: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rq1SummaryJson {
    pub programs: usize,
    pub with_augmentation: CountPctJson,
    pub without_augmentation: CountPctJson,
    pub mean_stmt_gain: String,
    pub mean_branch_gain: String,
    /// Mean CCT size in suites over the programs that gained coverage.
    pub mean_cct_size_suites_augmented: String,
    pub gain_buckets: GainBucketsJson,
    pub baseline: BaselineSummaryJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rq1Report {
    pub report_version: u32,
    pub kind: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub groups: Vec<GroupReportJson>,
    pub group_failures: Vec<(String, String)>,
    pub summary: Rq1SummaryJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutantRowJson {
    pub group_id: String,
    pub program_id: String,
    pub operator: String,
    pub decision: u32,
    pub status: String,
    pub witness: Option<String>,
    pub detections: Vec<(String, bool)>,
    pub detected_by_whole_cct: bool,
    pub union_identity_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rq2CountsJson {
    pub eligible_programs: usize,
    pub no_mutation_possible: usize,
    pub mutants_created: usize,
    pub detected_by_t0: usize,
    pub undetected_by_t0: usize,
    pub invalid_equivalent: usize,
    pub valid: usize,
    pub cross_check_cases: usize,
    pub cases_detected: usize,
    pub cases_undetected: usize,
    pub cases_detected_pct: String,
    pub programs_detected_by_cct: usize,
    pub programs_undetected_by_cct: usize,
    pub programs_detected_pct: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rq2Report {
    pub report_version: u32,
    pub kind: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub mutants: Vec<MutantRowJson>,
    pub no_mutation_possible: Vec<String>,
    pub counts: Rq2CountsJson,
}

pub const REPORT_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// RQ1
// ---------------------------------------------------------------------------

fn gain_bucket(g: &Gain) -> &'static str {
    let zero = Ratio::from_integer(0);
    match (g.stmt > zero, g.branch > zero) {
        (false, false) => "none",
        (true, false) => "stmt_only",
        (false, true) => "branch_only",
        (true, true) => "both",
    }
}

fn mean(values: &[Pct]) -> Pct {
    if values.is_empty() {
        return Ratio::from_integer(0);
    }
    values.iter().sum::<Pct>() / Ratio::from_integer(values.len() as i128)
}

fn process_group(
    loaded_group: &crate::corpus::LoadedGroup,
    cfg: &ExperimentConfig,
) -> Result<GroupArtifacts, String> {
    let group = &loaded_group.group;
    let gen_cfg = cfg.gen_config();
    let t0_gen = generate_t0(group, &gen_cfg).map_err(|e| e.to_string())?;
    let mut ti_suites = BTreeMap::new();
    for program in &group.programs {
        ti_suites.insert(program.id(), generate_ti(program, &gen_cfg));
    }
    let mut augmentations = BTreeMap::new();
    let mut baselines = BTreeMap::new();
    for program in &group.programs {
        let pid = program.id();
        let order_seed = derive_seed(cfg.seed, &["order", pid.as_str()]);
        let aug = augment_cumulative(
            group,
            &pid,
            &t0_gen.suite,
            &ti_suites,
            order_seed,
            cfg.order_mode,
            cfg.fuel,
        )
        .map_err(|e| e.to_string())?;
        let baseline = if !aug.augmented() {
            BaselineOutcome::NoAugmentation
        } else if aug.coverage_after.stmt_pct()
            >= Ratio::from_integer(i128::from(cfg.baseline_threshold))
        {
            BaselineOutcome::AboveThreshold
        } else {
            match build_baseline(group, &t0_gen.suite, &aug, &gen_cfg) {
                Ok(result) => BaselineOutcome::Eligible(result),
                Err(AugmentError::Generation(e)) => BaselineOutcome::Exhausted(e.to_string()),
                Err(e) => return Err(e.to_string()),
            }
        };
        augmentations.insert(pid.clone(), aug);
        baselines.insert(pid, baseline);
    }
    Ok(GroupArtifacts {
        group: group.clone(),
        flagged: loaded_group.flagged,
        t0: t0_gen.suite,
        divergences: t0_gen.divergences,
        ti_suites,
        augmentations,
        baselines,
    })
}

/// Run the RQ1 pipeline over a loaded corpus.
///
/// `jobs` > 1 processes groups on that many threads; group computations are
/// independent and seeded per group/program, so the report is identical
/// regardless of parallelism.
pub fn run_rq1(load: &CorpusLoad, cfg: &ExperimentConfig, jobs: usize) -> Rq1Outcome {
    let slots: Vec<Result<GroupArtifacts, (String, String)>> = if jobs <= 1 {
        load.groups
            .iter()
            .map(|lg| process_group(lg, cfg).map_err(|e| (lg.group.id.0.clone(), e)))
            .collect()
    } else {
        let n = load.groups.len();
        let mut slots: Vec<Option<Result<GroupArtifacts, (String, String)>>> = Vec::new();
        slots.resize_with(n, || None);
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots_mutex = std::sync::Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..jobs.min(n.max(1)) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= n {
                        break;
                    }
                    let lg = &load.groups[i];
                    let result =
                        process_group(lg, cfg).map_err(|e| (lg.group.id.0.clone(), e));
                    slots_mutex.lock().unwrap()[i] = Some(result);
                });
            }
        });
        slots.into_iter().map(|s| s.expect("all slots filled")).collect()
    };

    let mut artifacts = Vec::new();
    let mut group_failures: Vec<(String, String)> =
        load.errors.iter().map(|(d, e)| (d.clone(), e.to_string())).collect();
    for slot in slots {
        match slot {
            Ok(arts) => artifacts.push(arts),
            Err((group, err)) => group_failures.push((group, err)),
        }
    }

    let report = assemble_rq1_report(&artifacts, group_failures, cfg);
    Rq1Outcome { report, artifacts }
}

fn assemble_rq1_report(
    artifacts: &[GroupArtifacts],
    group_failures: Vec<(String, String)>,
    cfg: &ExperimentConfig,
) -> Rq1Report {
    let mut groups = Vec::new();
    let mut all_stmt_gains: Vec<Pct> = Vec::new();
    let mut all_branch_gains: Vec<Pct> = Vec::new();
    let mut augmented_sizes: Vec<usize> = Vec::new();
    let mut buckets = GainBucketsJson {
        none: 0,
        stmt_only: 0,
        branch_only: 0,
        both: 0,
    };
    let mut programs_total = 0usize;
    let mut with_augmentation = 0usize;
    let mut baseline_eligible = 0usize;
    let mut baseline_above = 0usize;
    let mut baseline_noaug = 0usize;
    let mut baseline_exhausted = 0usize;
    let mut delta_stmts: Vec<Pct> = Vec::new();
    let mut delta_branches: Vec<Pct> = Vec::new();

    for arts in artifacts {
        let mut rows = Vec::new();
        let mut group_stmt_gains: Vec<Pct> = Vec::new();
        let mut group_branch_gains: Vec<Pct> = Vec::new();
        let mut group_sizes: Vec<usize> = Vec::new();
        for program in &arts.group.programs {
            let pid = program.id();
            let aug = &arts.augmentations[&pid];
            let g = aug.cct_gain();
            programs_total += 1;
            if aug.augmented() {
                with_augmentation += 1;
                augmented_sizes.push(aug.cct_size_suites);
            }
            let bucket = gain_bucket(&g);
            match bucket {
                "none" => buckets.none += 1,
                "stmt_only" => buckets.stmt_only += 1,
                "branch_only" => buckets.branch_only += 1,
                _ => buckets.both += 1,
            }
            all_stmt_gains.push(g.stmt);
            all_branch_gains.push(g.branch);
            group_stmt_gains.push(g.stmt);
            group_branch_gains.push(g.branch);
            group_sizes.push(aug.cct_size_suites);

            let baseline = match &arts.baselines[&pid] {
                BaselineOutcome::Eligible(b) => {
                    baseline_eligible += 1;
                    delta_stmts.push(b.delta_vs_cct.stmt);
                    delta_branches.push(b.delta_vs_cct.branch);
                    BaselineJson {
                        eligible: true,
                        status: "eligible".into(),
                        t0plus_cases: Some(b.t0_plus.len()),
                        t0plus: Some(MetricsJson::from(&b.coverage)),
                        delta: Some(GainJson::from(&b.delta_vs_cct)),
                    }
                }
                BaselineOutcome::AboveThreshold => {
                    baseline_above += 1;
                    BaselineJson {
                        eligible: false,
                        status: "above_threshold".into(),
                        t0plus_cases: None,
                        t0plus: None,
                        delta: None,
                    }
                }
                BaselineOutcome::NoAugmentation => {
                    baseline_noaug += 1;
                    BaselineJson {
                        eligible: false,
                        status: "no_augmentation".into(),
                        t0plus_cases: None,
                        t0plus: None,
                        delta: None,
                    }
                }
                BaselineOutcome::Exhausted(_) => {
                    baseline_exhausted += 1;
                    BaselineJson {
                        eligible: false,
                        status: "extension_exhausted".into(),
                        t0plus_cases: None,
                        t0plus: None,
                        delta: None,
                    }
                }
            };

            rows.push(ProgramRowJson {
                program_id: pid.to_string(),
                t0: MetricsJson::from(&aug.coverage_before),
                cct: MetricsJson::from(&aug.coverage_after),
                gain: GainJson::from(&g),
                gain_bucket: bucket.to_string(),
                added_suites: aug
                    .added_suites
                    .iter()
                    .map(|a| a.source.to_string())
                    .collect(),
                cct_size_suites: aug.cct_size_suites,
                cct_size_cases: aug.cct_size_cases,
                order_seed: aug.order_seed,
                cross_failures: aug
                    .failing_cross_sources
                    .iter()
                    .map(|p| p.to_string())
                    .collect(),
                baseline,
            });
        }
        let size_mean = if group_sizes.is_empty() {
            Ratio::from_integer(0)
        } else {
            Ratio::new(
                group_sizes.iter().sum::<usize>() as i128,
                group_sizes.len() as i128,
            )
        };
        groups.push(GroupReportJson {
            group_id: arts.group.id.0.clone(),
            flagged: arts.flagged,
            divergence_findings: arts.divergences.len(),
            programs: rows,
            avg_stmt_gain: format_pct_ratio(mean(&group_stmt_gains)),
            avg_branch_gain: format_pct_ratio(mean(&group_branch_gains)),
            avg_cct_size_suites: format_fixed2(size_mean),
        });
    }

    let without_augmentation = programs_total - with_augmentation;
    let pct_of = |count: usize| -> String {
        if programs_total == 0 {
            "0.00%".to_string()
        } else {
            crate::coverage::format_percent(count as u64, programs_total as u64)
        }
    };
    let sizes_mean = if augmented_sizes.is_empty() {
        Ratio::from_integer(0)
    } else {
        Ratio::new(
            augmented_sizes.iter().sum::<usize>() as i128,
            augmented_sizes.len() as i128,
        )
    };
    let summary = Rq1SummaryJson {
        programs: programs_total,
        with_augmentation: CountPctJson {
            count: with_augmentation,
            pct: pct_of(with_augmentation),
        },
        without_augmentation: CountPctJson {
            count: without_augmentation,
            pct: pct_of(without_augmentation),
        },
        mean_stmt_gain: format_pct_ratio(mean(&all_stmt_gains)),
        mean_branch_gain: format_pct_ratio(mean(&all_branch_gains)),
        mean_cct_size_suites_augmented: format_fixed2(sizes_mean),
        gain_buckets: buckets,
        baseline: BaselineSummaryJson {
            eligible: baseline_eligible,
            excluded_above_threshold: baseline_above,
            excluded_no_augmentation: baseline_noaug,
            excluded_exhausted: baseline_exhausted,
            mean_delta_stmt: format_pct_ratio(mean(&delta_stmts)),
            mean_delta_branch: format_pct_ratio(mean(&delta_branches)),
        },
    };

    Rq1Report {
        report_version: REPORT_VERSION,
        kind: "rq1".into(),
        seed: cfg.seed,
        config: cfg.clone(),
        groups,
        group_failures,
        summary,
    }
}

// ---------------------------------------------------------------------------
// RQ2
// ---------------------------------------------------------------------------

/// Run the RQ2 pipeline: one mutant per program that gained coverage in RQ1.
pub fn run_rq2(rq1: &Rq1Outcome, cfg: &ExperimentConfig) -> Rq2Report {
    let mut rows: Vec<MutantRowJson> = Vec::new();
    let mut no_mutation: Vec<String> = Vec::new();
    let mut records: Vec<MutationRecord> = Vec::new();
    let mut eligible_programs = 0usize;

    for arts in &rq1.artifacts {
        // inputs of every suite of the group, probed first during validation
        let mut suite_inputs: Vec<Vec<Value>> =
            arts.t0.cases.iter().map(|c| c.input.clone()).collect();
        for suite in arts.ti_suites.values() {
            suite_inputs.extend(suite.cases.iter().map(|c| c.input.clone()));
        }
        for program in &arts.group.programs {
            let pid = program.id();
            let aug = &arts.augmentations[&pid];
            if aug.cct_gain().is_zero() {
                continue; // RQ2 considers only programs with some improvement
            }
            eligible_programs += 1;
            let record = match inject(program) {
                Ok(r) => r,
                Err(MutateError::NoMutationPossible(_)) => {
                    no_mutation.push(pid.to_string());
                    continue;
                }
                Err(e) => unreachable!("inject only fails with NoMutationPossible: {e}"),
            };
            let record = filter_by_t0(record, &arts.t0, cfg.fuel);
            let record = if record.status == MutationStatus::UndetectedByT0 {
                let probe_seed = derive_seed(cfg.seed, &["mutprobe", pid.as_str()]);
                let record = validate_mutant(
                    record,
                    program,
                    &suite_inputs,
                    cfg.mutant_probe_budget,
                    probe_seed,
                    cfg.fuel,
                )
                .expect("probe budget is positive");
                if record.status == MutationStatus::UndetectedByT0 {
                    cross_detect(record, aug, &arts.ti_suites, &arts.t0, cfg.fuel)
                } else {
                    record
                }
            } else {
                record
            };
            rows.push(MutantRowJson {
                group_id: arts.group.id.0.clone(),
                program_id: pid.to_string(),
                operator: record.operator.to_string(),
                decision: record.decision_id.0,
                status: record.status.to_string(),
                witness: record.witness.as_ref().map(|w| {
                    let vals: Vec<String> = w.iter().map(|v| v.to_string()).collect();
                    format!("({})", vals.join(","))
                }),
                detections: record
                    .detections
                    .iter()
                    .map(|(p, d)| (p.to_string(), *d))
                    .collect(),
                detected_by_whole_cct: record.detected_by_whole_cct,
                union_identity_violated: record.union_identity_violated,
            });
            records.push(record);
        }
    }

    let mutants_created = records.len();
    let detected_by_t0 = records
        .iter()
        .filter(|r| r.status == MutationStatus::DetectedByT0)
        .count();
    let undetected_by_t0 = mutants_created - detected_by_t0;
    let invalid_equivalent = records
        .iter()
        .filter(|r| r.status == MutationStatus::InvalidEquivalent)
        .count();
    let valid_records: Vec<&MutationRecord> = records
        .iter()
        .filter(|r| r.status == MutationStatus::UndetectedByT0)
        .collect();
    let valid = valid_records.len();
    let cross_check_cases: usize = valid_records.iter().map(|r| r.detections.len()).sum();
    let cases_detected: usize = valid_records
        .iter()
        .map(|r| r.detections.values().filter(|&&d| d).count())
        .sum();
    let programs_detected_by_cct = valid_records
        .iter()
        .filter(|r| r.detected_by_whole_cct)
        .count();

    let counts = Rq2CountsJson {
        eligible_programs,
        no_mutation_possible: no_mutation.len(),
        mutants_created,
        detected_by_t0,
        undetected_by_t0,
        invalid_equivalent,
        valid,
        cross_check_cases,
        cases_detected,
        cases_undetected: cross_check_cases - cases_detected,
        cases_detected_pct: crate::coverage::format_percent(
            cases_detected as u64,
            cross_check_cases.max(1) as u64,
        ),
        programs_detected_by_cct,
        programs_undetected_by_cct: valid - programs_detected_by_cct,
        programs_detected_pct: crate::coverage::format_percent(
            programs_detected_by_cct as u64,
            valid.max(1) as u64,
        ),
    };

    Rq2Report {
        report_version: REPORT_VERSION,
        kind: "rq2".into(),
        seed: cfg.seed,
        config: cfg.clone(),
        mutants: rows,
        no_mutation_possible: no_mutation,
        counts,
    }
}

// ---------------------------------------------------------------------------
// Candidate ranking (the code-search selection workflow)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankEntry {
    pub program_id: String,
    pub cct_stmt_pct: String,
    pub cct_branch_pct: String,
    /// Set when any cross test failed on this program — a correctness signal
    /// that outranks coverage.
    pub cross_failure: bool,
}

/// Order a group's programs by descending CCT statement coverage, branch
/// coverage as tie-break, program id as the final tie-break.
pub fn rank_candidates(arts: &GroupArtifacts) -> Vec<RankEntry> {
    let mut keyed: Vec<(Pct, Pct, ProgramId, bool)> = arts
        .augmentations
        .iter()
        .map(|(pid, aug)| {
            (
                aug.coverage_after.stmt_pct(),
                aug.coverage_after.branch_pct(),
                pid.clone(),
                !aug.failing_cross_sources.is_empty(),
            )
        })
        .collect();
    keyed.sort_by(|a, b| {
        b.0.cmp(&a.0)
            .then_with(|| b.1.cmp(&a.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    keyed
        .into_iter()
        .map(|(stmt, branch, pid, cross_failure)| RankEntry {
            program_id: pid.to_string(),
            cct_stmt_pct: format_pct_ratio(stmt),
            cct_branch_pct: format_pct_ratio(branch),
            cross_failure,
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Pretty JSON plus trailing newline (the byte-frozen golden format).
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

/// One CSV row per program, columns following the study's gain tables.
pub fn rq1_csv(report: &Rq1Report) -> String {
    let mut out = String::new();
    out.push_str(
        "group_id,program_id,cct_stmt,t0_stmt,gain_stmt,cct_branch,t0_branch,gain_branch,\
         cct_size_suites,cct_size_cases,gain_bucket,baseline_status,t0plus_stmt,t0plus_branch,\
         delta_stmt,delta_branch,cross_failures\n",
    );
    for group in &report.groups {
        for p in &group.programs {
            let (t0plus_stmt, t0plus_branch, delta_stmt, delta_branch) = match (&p.baseline.t0plus, &p.baseline.delta) {
                (Some(m), Some(d)) => (
                    m.stmt_pct.clone(),
                    m.branch_pct.clone(),
                    d.stmt.clone(),
                    d.branch.clone(),
                ),
                _ => (String::new(), String::new(), String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                group.group_id,
                p.program_id,
                p.cct.stmt_pct,
                p.t0.stmt_pct,
                p.gain.stmt,
                p.cct.branch_pct,
                p.t0.branch_pct,
                p.gain.branch,
                p.cct_size_suites,
                p.cct_size_cases,
                p.gain_bucket,
                p.baseline.status,
                t0plus_stmt,
                t0plus_branch,
                delta_stmt,
                delta_branch,
                p.cross_failures.join(";"),
            );
        }
    }
    out
}

/// One CSV row per mutant.
pub fn rq2_csv(report: &Rq2Report) -> String {
    let mut out = String::new();
    out.push_str(
        "group_id,program_id,operator,decision,status,witness,detections,detected_by_whole_cct\n",
    );
    for m in &report.mutants {
        let detections: Vec<String> = m
            .detections
            .iter()
            .map(|(p, d)| format!("{p}:{d}"))
            .collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            m.group_id,
            m.program_id,
            m.operator,
            m.decision,
            m.status,
            m.witness.clone().unwrap_or_default(),
            detections.join(";"),
            m.detected_by_whole_cct,
        );
    }
    out
}

//! Seeded random algebras and vertex subsets run through the full suite.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{build_algebra, Arrow, Presentation, Quiver, RelationTerm};
use crate::ideal::IdealContext;
use crate::io::{AlgebraFile, SCHEMA};
use crate::linalg::{Field, PrimeField};
use crate::registry::Workspace;
use crate::suite::{gen_corpus, run_suite, CheckResult, CheckStatus, SuiteConfig};

pub const FUZZ_PRIME: u64 = 1009;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzConfig {
    pub seed: u64,
    pub iterations: usize,
    pub max_vertices: usize,
    pub max_arrows: usize,
    /// Algebras above this dimension are redrawn.
    pub max_dim: usize,
    /// Modules above this dimension are not decomposed; dependent results become Unknown.
    pub max_module_dim: usize,
    pub suite: SuiteConfig,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 25,
            max_vertices: 6,
            max_arrows: 10,
            max_dim: 24,
            max_module_dim: 32,
            suite: SuiteConfig {
                corpus_size: 3,
                module_size: 5,
                depth: 2,
                bound: 10,
                max_steps: 30,
                pair_cap: 60,
                ..SuiteConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub refuted: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzCase {
    pub index: usize,
    pub case_seed: u64,
    pub algebra: AlgebraFile,
    pub dim: usize,
    pub vertices: Vec<String>,
    pub counts: Counts,
    pub failures: Vec<CheckResult>,
    pub refuted: Vec<String>,
    pub unknowns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl FuzzCase {
    pub fn failed(&self) -> bool {
        !self.failures.is_empty() || self.error.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub schema: String,
    pub config: FuzzConfig,
    pub cases: Vec<FuzzCase>,
    pub failing_cases: usize,
    pub cases_with_unknowns: usize,
}

/// A monomial algebra on a random quiver: each length-2 path vanishes with probability 1/2, all length-3 paths vanish.
pub fn random_presentation(rng: &mut ChaCha8Rng, max_vertices: usize, max_arrows: usize) -> Presentation<PrimeField> {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let m = rng.gen_range(0..=max_arrows);
    let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let arrows: Vec<Arrow> = (0..m)
        .map(|i| Arrow {
            name: format!("a{}", i + 1),
            from: rng.gen_range(0..n),
            to: rng.gen_range(0..n),
        })
        .collect();
    let mut relations = Vec::new();
    let mut zero2 = std::collections::BTreeSet::new();
    for (i, a) in arrows.iter().enumerate() {
        for (j, b) in arrows.iter().enumerate() {
            if a.to == b.from && rng.gen_bool(0.5) {
                zero2.insert((i, j));
                relations.push(vec![i, j]);
            }
        }
    }
    for (i, a) in arrows.iter().enumerate() {
        for (j, b) in arrows.iter().enumerate() {
            if a.to != b.from || zero2.contains(&(i, j)) {
                continue;
            }
            for (k, c) in arrows.iter().enumerate() {
                if b.to == c.from && !zero2.contains(&(j, k)) {
                    relations.push(vec![i, j, k]);
                }
            }
        }
    }
    let field = PrimeField::new(FUZZ_PRIME).expect("fuzz prime is valid");
    Presentation {
        quiver: Quiver::new(vertices, arrows).expect("generated quiver is valid"),
        relations: relations
            .into_iter()
            .map(|path| vec![RelationTerm { coeff: field.one(), path }])
            .collect(),
        field,
    }
}

fn panic_message(e: Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

pub fn fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cases = Vec::new();
    for index in 0..cfg.iterations {
        let case_seed: u64 = rng.gen();
        cases.push(run_case(cfg, index, case_seed));
    }
    FuzzReport {
        schema: SCHEMA.into(),
        config: cfg.clone(),
        failing_cases: cases.iter().filter(|c| c.failed()).count(),
        cases_with_unknowns: cases.iter().filter(|c| !c.unknowns.is_empty()).count(),
        cases,
    }
}

pub fn run_case(cfg: &FuzzConfig, index: usize, case_seed: u64) -> FuzzCase {
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed);
    let (pres, alg) = loop {
        let p = random_presentation(&mut rng, cfg.max_vertices, cfg.max_arrows);
        if let Ok(a) = build_algebra(&p, 4) {
            if a.dim() <= cfg.max_dim {
                break (p, a);
            }
        }
    };
    let n = alg.num_vertices();
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    let k = rng.gen_range(1..=n);
    let mut subset = all[..k].to_vec();
    subset.sort_unstable();
    let mut case = FuzzCase {
        index,
        case_seed,
        algebra: AlgebraFile::from_presentation(&pres),
        dim: alg.dim(),
        vertices: subset.iter().map(|&v| alg.vertices()[v].clone()).collect(),
        counts: Counts::default(),
        failures: Vec::new(),
        refuted: Vec::new(),
        unknowns: Vec::new(),
        error: None,
    };
    let suite_cfg = SuiteConfig {
        seed: case_seed,
        ..cfg.suite.clone()
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let ws = Arc::new(Workspace::with_dim_cap(cfg.max_module_dim));
        let ctx = IdealContext::build_in(&alg, &subset, ws).map_err(|e| e.to_string())?;
        let corpus = gen_corpus(&ctx, &suite_cfg);
        Ok::<_, String>(run_suite(&ctx, &corpus, &suite_cfg))
    }));
    match outcome {
        Ok(Ok(report)) => {
            for c in &report.checks {
                match &c.status {
                    CheckStatus::Pass => case.counts.pass += 1,
                    CheckStatus::Fail { .. } => {
                        case.counts.fail += 1;
                        case.failures.push(c.clone());
                    }
                    CheckStatus::Refuted { .. } => {
                        case.counts.refuted += 1;
                        case.refuted.push(c.id.clone());
                    }
                    CheckStatus::Skipped { .. } => case.counts.skipped += 1,
                }
            }
            case.unknowns = report.unknowns;
        }
        Ok(Err(e)) => case.error = Some(e),
        Err(p) => case.error = Some(format!("panic: {}", panic_message(p))),
    }
    case
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_small_run() {
        let cfg = FuzzConfig {
            seed: 3,
            iterations: 3,
            ..FuzzConfig::default()
        };
        let a = serde_json::to_string(&fuzz(&cfg)).unwrap();
        let b = serde_json::to_string(&fuzz(&cfg)).unwrap();
        assert_eq!(a, b);
    }
}

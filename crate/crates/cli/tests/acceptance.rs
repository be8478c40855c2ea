//! One PASS/FAIL line per acceptance criterion. Exits nonzero when any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use itlab::algebra::{build_algebra, AlgebraTable};
use itlab::expr::Env;
use itlab::homology::{ext_dim, is_selfinjective, PdResult};
use itlab::ideal::{gld_of, BoundConfig, FormulaStatus, GlueSide, IdealContext, Membership, Quantity, StrongIdempotency, Which};
use itlab::igusa::{phi_l, phi_r, phi_r_direct, phi_via_divisions, Certificate, DEFAULT_DIVISION_CLASS_CAP};
use itlab::io::{AlgebraFile, AnyPresentation};
use itlab::linalg::PrimeField;
use itlab::module::{hom_dim, Module};
use itlab::registry::Workspace;
use itlab::suite::{gen_corpus, run_suite, CheckStatus, SuiteConfig};

type Alg = Arc<AlgebraTable<PrimeField>>;
type M = Module<PrimeField>;

/// Seeded random modules for the property criterion.
const PROPERTY_MODULES: u64 = 1000;
const MIN_TRACE_PAIRS: usize = 200;
const RANDOM_F2_MODULES: u64 = 100;
const MIN_QUOTIENT_QUALIFYING: usize = 20;
const MIN_CORNER_QUALIFYING: usize = 5;
const MIN_BOUND_CORPUS: usize = 40;
const PRINTED_PROP_BOUND: usize = 5;
const SECONDS_PER_CRITERION: u64 = 60;
const STEPS: usize = 200;
const BOUND: usize = 50;

fn fixture(name: &str) -> Alg {
    let path = format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let file = AlgebraFile::read(&path).expect("fixture reads");
    let AnyPresentation::Prime(p) = file.presentation(&path).expect("fixture parses") else {
        panic!("{name} is not over a prime field")
    };
    build_algebra(&p, file.max_path_len()).expect("fixture builds")
}

fn vertex(alg: &Alg, name: &str) -> usize {
    alg.vertices().iter().position(|v| v == name).expect("vertex exists")
}

fn context(alg: &Alg, names: &[&str]) -> IdealContext<PrimeField> {
    let vs: Vec<usize> = names.iter().map(|n| vertex(alg, n)).collect();
    IdealContext::build(alg, &vs).expect("context builds")
}

fn eval(alg: &Alg, e: &str) -> M {
    Env::new(alg).eval_str(e).expect("expression evaluates")
}

/// Checks that `m` is the direct sum of the given modules with multiplicities, up to isomorphism.
fn decomposes_as(m: &M, expected: &[(M, usize)]) -> Result<(), String> {
    let d = m.decompose().map_err(|e| e.to_string())?;
    if d.summands.len() != expected.len() {
        return Err(format!("{} summand classes, expected {}", d.summands.len(), expected.len()));
    }
    for (e, k) in expected {
        let hit = d
            .summands
            .iter()
            .find(|(r, _)| r.is_isomorphic(e).unwrap_or(false))
            .ok_or_else(|| format!("no summand of dims {:?}", e.dims()))?;
        if hit.1 != *k {
            return Err(format!("summand {:?} has multiplicity {}, expected {k}", e.dims(), hit.1));
        }
    }
    Ok(())
}

fn standard_family(alg: &Alg) -> Vec<(String, M)> {
    let env = Env::new(alg);
    let mut out = Vec::new();
    for v in alg.vertices() {
        for e in [
            format!("S({v})"),
            format!("P({v})"),
            format!("I({v})"),
            format!("Rad(P({v}))"),
            format!("Rad(I({v}))"),
            format!("Omega(1,S({v}))"),
            format!("Omega(2,S({v}))"),
            format!("OmegaInv(1,S({v}))"),
            format!("OmegaInv(2,S({v}))"),
        ] {
            let m = env.eval_str(&e).expect("family member evaluates");
            if !m.is_zero() {
                out.push((e, m));
            }
        }
    }
    out
}

fn random_module(alg: &Alg, seed: u64) -> M {
    Module::random(alg, seed, 1 + (seed % 8) as usize)
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn f2_trace_ideal() -> Outcome {
    let a = fixture("f2");
    ensure(a.dim() == 15, format!("dim Λ = {}", a.dim()))?;
    let ctx = context(&a, &["3", "4", "5"]);
    let p = |v: &str| Module::projective(&a, vertex(&a, v));
    let s5 = Module::simple(&a, vertex(&a, "5"));
    decomposes_as(&ctx.ideal_module, &[(p("3"), 1), (p("4"), 3), (p("5"), 1), (s5, 2)])?;
    let pd = ctx.ws.pd(&ctx.ideal_module, BOUND).map_err(|e| e.to_string())?;
    ensure(pd == PdResult::Finite(1), format!("pd 𝔄 = {pd}"))?;
    Ok("dim 15, 𝔄 ≅ P3 ⊕ P4^3 ⊕ P5 ⊕ S5^2, pd 𝔄 = 1".into())
}

fn f2_corner_and_quotient() -> Outcome {
    let a = fixture("f2");
    let ctx = context(&a, &["3", "4", "5"]);
    let omega = eval(&a, "Omega(1,S(5))");
    ensure(
        omega.is_isomorphic(&Module::projective(&a, vertex(&a, "4"))).unwrap_or(false),
        "Ω S5 is not P4",
    )?;
    let strong = ctx.strong_idempotency(BOUND);
    ensure(matches!(strong, StrongIdempotency::CertifiedYes { .. }), format!("strong idempotency {strong:?}"))?;
    let q = ctx.quotient_algebra();
    ensure(q.dim() == 4, format!("dim Λ/𝔄 = {}", q.dim()))?;
    ensure(is_selfinjective(q), "Λ/𝔄 is not selfinjective")?;
    let ws = Workspace::new();
    let mut indecs: Vec<M> = Vec::new();
    for v in 0..q.num_vertices() {
        for m in [Module::simple(q, v), Module::projective(q, v)] {
            if !indecs.iter().any(|x| x.is_isomorphic(&m).unwrap_or(false)) {
                indecs.push(m);
            }
        }
    }
    ensure(indecs.len() == 4, format!("{} indecomposables over Λ/𝔄", indecs.len()))?;
    for m in &indecs {
        let l = phi_l(&ws, m, STEPS).map_err(|e| e.to_string())?;
        let r = phi_r(&ws, m, STEPS).map_err(|e| e.to_string())?;
        ensure(l.certified && r.certified && l.phi == 0 && r.phi == 0, format!("φ of {:?} is ({}, {})", m.dims(), l.phi, r.phi))?;
    }
    let gld = gld_of(&ctx.ws, ctx.gamma(), BOUND);
    ensure(gld == Quantity::Finite(1), format!("gld Γ = {gld:?}"))?;
    Ok("Ω S5 ≅ P4, strong, Λ/𝔄 selfinjective of dim 4 with φ_l = φ_r = 0 on 4 indecomposables, gld Γ = 1".into())
}

fn f2_bound_report() -> Outcome {
    let a = fixture("f2");
    let ctx = context(&a, &["3", "4", "5"]);
    let cfg = SuiteConfig::default();
    let corpus: Vec<(String, M)> = gen_corpus(&ctx, &cfg).into_iter().map(|e| (e.label, e.module)).collect();
    ensure(corpus.len() >= MIN_BOUND_CORPUS, format!("corpus has {} modules", corpus.len()))?;
    let id = "phi_r_dim_gld_corner";
    let bcfg = BoundConfig {
        bound: BOUND,
        max_steps: STEPS,
        printed: [(id.to_string(), PRINTED_PROP_BOUND)].into_iter().collect(),
    };
    let report = ctx.bound_report(&corpus, &bcfg).map_err(|e| e.to_string())?;
    let rec = report.formula(id).ok_or("formula missing")?;
    let Quantity::Finite(rhs) = rec.rhs else {
        return Err(format!("right-hand side {:?}", rec.rhs));
    };
    // Independent recomputation of the ingredients.
    let pd_left = ctx.ws.pd(&ctx.quotient_module, BOUND).map_err(|e| e.to_string())?;
    let pd_right = ctx.ws.pd(&ctx.mirror().quotient_module, BOUND).map_err(|e| e.to_string())?;
    let (Some(pl), Some(pr)) = (pd_left.finite(), pd_right.finite()) else {
        return Err("pd of Λ/𝔄 not finite".into());
    };
    let gld = match gld_of(&Workspace::new(), ctx.gamma(), BOUND) {
        Quantity::Finite(g) => g,
        other => return Err(format!("gld Γ = {other:?}")),
    };
    // Λ/𝔄 is selfinjective, so φ_r dim Λ/𝔄 = 0.
    let expected = pl + (gld + 1).max(pr);
    ensure(rhs == expected, format!("reported RHS {rhs}, recomputed {expected}"))?;
    ensure(rec.status == FormulaStatus::Pass, format!("status {:?}", rec.status))?;
    ensure(rec.checked_modules >= MIN_BOUND_CORPUS, format!("{} modules checked", rec.checked_modules))?;
    let ws = Workspace::new();
    for (label, m) in &corpus {
        let r = phi_r(&ws, m, STEPS).map_err(|e| e.to_string())?;
        ensure(r.phi <= rhs, format!("φ_r({label}) = {} > {rhs}", r.phi))?;
    }
    let agrees = rec.printed_agrees.ok_or("printed value not recorded")?;
    Ok(format!(
        "RHS = {pl} + max{{{gld} + 1, {pr} + 0}} = {rhs} holds on {} modules; printed {PRINTED_PROP_BOUND} {}",
        corpus.len(),
        if agrees { "agrees" } else { "differs (recorded)" }
    ))
}

fn f1_membership() -> Outcome {
    let a = fixture("f1");
    let ctx = context(&a, &["2"]);
    let s2 = Module::simple(&a, vertex(&a, "2"));
    decomposes_as(&ctx.ideal_module, &[(s2.clone(), 2)])?;
    ensure(ctx.ideal_module.is_projective(), "𝔄 is not projective")?;
    let strong = ctx.strong_idempotency(BOUND);
    ensure(matches!(strong, StrongIdempotency::CertifiedYes { .. }), format!("strong idempotency {strong:?}"))?;
    let t = |m: &M| ctx.membership(m, Which::T, BOUND);
    let p1 = Module::projective(&a, vertex(&a, "1"));
    let s1 = Module::simple(&a, vertex(&a, "1"));
    ensure(t(&p1).is_yes(), format!("P1: {:?}", t(&p1)))?;
    ensure(t(&s1).is_yes(), format!("S1: {:?}", t(&s1)))?;
    ensure(matches!(t(&s2), Membership::No { .. }), format!("S2: {:?}", t(&s2)))?;
    Ok("𝔄 ≅ S2^2 projective, strong; P1, S1 ∈ 𝕋, S2 ∉ 𝕋".into())
}

fn f3_periodic() -> Outcome {
    let a = fixture("f3");
    let m = eval(&a, "Sum(S(1),S(loop))");
    let r = phi_l(&Workspace::new(), &m, STEPS).map_err(|e| e.to_string())?;
    ensure(r.phi == 2, format!("φ = {}", r.phi))?;
    ensure(r.rank_sequence == [2, 2, 1], format!("ranks {:?}", r.rank_sequence))?;
    ensure(matches!(r.certificate, Certificate::Periodic { .. }), format!("certificate {:?}", r.certificate))?;
    Ok("φ_l = 2, ranks [2, 2, 1], periodic".into())
}

fn divisions_oracle() -> Outcome {
    let mut n = 0;
    for name in ["f1", "f2", "f3"] {
        let a = fixture(name);
        let mut mods = standard_family(&a);
        if name == "f2" {
            mods.extend((0..RANDOM_F2_MODULES).map(|s| (format!("Rand({s})"), random_module(&a, s))));
        }
        for (label, m) in mods {
            let ws = Workspace::new();
            let r = phi_l(&ws, &m, STEPS).map_err(|e| e.to_string())?;
            let d = phi_via_divisions(&ws, &m, STEPS, DEFAULT_DIVISION_CLASS_CAP).map_err(|e| e.to_string())?;
            ensure(r.certified, format!("{name} {label}: φ_l not certified"))?;
            ensure(r.phi == d.phi, format!("{name} {label}: ranks {} vs divisions {}", r.phi, d.phi))?;
            n += 1;
        }
    }
    Ok(format!("{n} modules agree"))
}

fn quotient_phi_suite() -> Outcome {
    let a = fixture("f2");
    let ctx = context(&a, &["3", "4", "5"]);
    let cfg = SuiteConfig::default();
    let report = run_suite(&ctx, &gen_corpus(&ctx, &cfg), &cfg);
    let c = report.check("quotient_phi_le_lambda_phi").ok_or("check missing")?;
    ensure(c.status == CheckStatus::Pass, format!("status {:?}", c.status))?;
    ensure(c.qualifying >= MIN_QUOTIENT_QUALIFYING, format!("{} qualifying", c.qualifying))?;
    Ok(format!("{} qualifying, 0 violations", c.qualifying))
}

fn corner_phi_psi() -> Outcome {
    let a = fixture("f2");
    let ctx = context(&a, &["3", "4", "5"]);
    let corpus = gen_corpus(&ctx, &SuiteConfig::default());
    let ws = Workspace::new();
    let mut left = Vec::new();
    let mut right = 0;
    for e in &corpus {
        let y = &e.module;
        let ey = ctx.restrict(y);
        if ctx.membership(y, Which::PInf, BOUND).is_yes() {
            let big = phi_l(&ws, y, STEPS).map_err(|e| e.to_string())?;
            let small = phi_l(&ws, &ey, STEPS).map_err(|e| e.to_string())?;
            if big.certified && small.certified {
                ensure(
                    big.phi == small.phi && big.psi == small.psi,
                    format!("{}: Λ ({}, {:?}) vs Γ ({}, {:?})", e.label, big.phi, big.psi, small.phi, small.psi),
                )?;
                left.push(e.label.clone());
            }
        }
        if ctx.membership(y, Which::IInf, BOUND).is_yes() {
            let big = phi_r(&ws, y, STEPS).map_err(|e| e.to_string())?;
            let small = phi_r(&ws, &ey, STEPS).map_err(|e| e.to_string())?;
            if big.certified && small.certified {
                ensure(
                    big.phi == small.phi && big.psi == small.psi,
                    format!("{}: Λ ({}, {:?}) vs Γ ({}, {:?}) on the right", e.label, big.phi, big.psi, small.phi, small.psi),
                )?;
                right += 1;
            }
        }
    }
    ensure(left.len() >= MIN_CORNER_QUALIFYING, format!("{} qualifying in ℙ_∞", left.len()))?;
    for must in ["S(5)", "Ideal"] {
        ensure(left.iter().any(|l| l == must), format!("{must} not among ℙ_∞ members"))?;
    }
    Ok(format!("{} ℙ_∞ members (including S(5) and Ideal) and {right} 𝕀_∞ members agree", left.len()))
}

struct PropertyTally {
    modules: usize,
    trace_pairs: usize,
}

fn property_suite() -> Outcome {
    let setups = [("f1", vec!["2"]), ("f2", vec!["3", "4", "5"]), ("f3", vec!["2", "loop"])];
    let ctxs: Vec<(Alg, IdealContext<PrimeField>)> = setups
        .iter()
        .map(|(n, vs)| {
            let a = fixture(n);
            let c = context(&a, vs);
            (a, c)
        })
        .collect();
    let mut tally = PropertyTally { modules: 0, trace_pairs: 0 };
    // ℙ_∞ members of each standard family, as sources for the Ext identity.
    let p_inf: Vec<Vec<M>> = ctxs
        .iter()
        .map(|(a, c)| {
            standard_family(a)
                .into_iter()
                .map(|(_, m)| m)
                .filter(|m| !m.is_projective() && c.membership(m, Which::PInf, BOUND).is_yes())
                .take(3)
                .collect()
        })
        .collect();
    let ws = Workspace::new();
    for seed in 0..PROPERTY_MODULES {
        let k = (seed % 3) as usize;
        let (a, ctx) = &ctxs[k];
        let name = setups[k].0;
        let m = random_module(a, seed);
        let other = random_module(a, seed + PROPERTY_MODULES);
        let tag = |what: &str| format!("{name} seed {seed}: {what}");
        let r = phi_l(&ws, &m, STEPS).map_err(|e| e.to_string())?;
        ensure(r.rank_sequence.windows(2).all(|w| w[1] <= w[0]), tag("ranks increase"))?;
        let p = Module::projective(a, seed as usize % a.num_vertices());
        let rp = phi_l(&ws, &Module::direct_sum(a, &[m.clone(), p]), STEPS).map_err(|e| e.to_string())?;
        ensure(rp.phi == r.phi, tag("projective summand changes φ"))?;
        if let Some(n) = ws.pd(&m, BOUND).map_err(|e| e.to_string())?.finite() {
            ensure(r.phi == n && r.psi == Some(n), tag("pd finite but φ or ψ differs"))?;
        }
        let direct = phi_r_direct(&ws, &m, STEPS).map_err(|e| e.to_string())?;
        let dual = phi_l(&ws, &m.dual(), STEPS).map_err(|e| e.to_string())?;
        ensure(direct.phi == dual.phi, tag("φ_r differs from φ_l of the dual"))?;
        ensure(hom_dim(&m, &other) == ext_dim(&m, &other, 0), tag("dim Hom differs from dim Ext^0"))?;

        let reduced = ctx.glueing(&m, GlueSide::I0).quotient.module;
        let traced = ctx.glueing(&m, GlueSide::P0).sub.module;
        for &s in &ctx.vertices {
            let ps = Module::projective(a, s);
            ensure(hom_dim(&ps, &m) == hom_dim(&ps, &reduced), tag("Hom(P_s, X) ≠ Hom(P_s, X/τX)"))?;
            let is = Module::injective(a, s);
            ensure(hom_dim(&m, &is) == hom_dim(&traced, &is), tag("Hom(X, I_s) ≠ Hom(τ_𝔄X, I_s)"))?;
            tally.trace_pairs += 2;
        }
        if seed % 10 < 3 {
            for w in &p_inf[k] {
                for j in 0..=2 {
                    let lhs = ws.ext_dim(w, &m, j).map_err(|e| e.to_string())?;
                    let rhs = ws.ext_dim(w, &reduced, j).map_err(|e| e.to_string())?;
                    ensure(lhs == rhs, tag(&format!("Ext^{j}(W, X) ≠ Ext^{j}(W, X/τX)")))?;
                }
                tally.trace_pairs += 1;
            }
        }
        tally.modules += 1;
    }
    ensure(tally.trace_pairs >= MIN_TRACE_PAIRS, format!("{} qualifying pairs", tally.trace_pairs))?;
    Ok(format!("{} modules, {} qualifying pairs, 0 violations", tally.modules, tally.trace_pairs))
}

fn fuzz_determinism() -> Outcome {
    let dir: PathBuf = std::env::temp_dir().join(format!("itlab-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_itlab"))
            .args(["--format", "json", "fuzz", "--seed", "7", "--iterations", "25"])
            .current_dir(&dir)
            .output()
            .map_err(|e| e.to_string())
    };
    let first = run()?;
    let second = run()?;
    let _ = std::fs::remove_dir_all(&dir);
    ensure(first.stdout == second.stdout, "outputs differ")?;
    ensure(first.status.code() == second.status.code(), "exit codes differ")?;
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).map_err(|e| e.to_string())?;
    match first.status.code() {
        Some(0) => Ok("byte-identical, exit 0".into()),
        Some(1) => {
            ensure(v.get("bundle").is_some(), "exit 1 without a bundle")?;
            Ok("byte-identical, exit 1 with counterexample bundle".into())
        }
        Some(2) => {
            let listed = v["cases"]
                .as_array()
                .map(|cs| cs.iter().filter(|c| c["unknowns"].as_array().is_some_and(|u| !u.is_empty())).count())
                .unwrap_or(0);
            ensure(listed > 0, "exit 2 without listed unknowns")?;
            Ok(format!("byte-identical, exit 2 with unknowns listed in {listed} cases"))
        }
        other => Err(format!("exit code {other:?}")),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("f2 trace ideal and pd", f2_trace_ideal),
        ("f2 syzygy, strong idempotency, quotient and corner", f2_corner_and_quotient),
        ("f2 bound report", f2_bound_report),
        ("f1 torsion class membership", f1_membership),
        ("f3 periodic stabilization", f3_periodic),
        ("divisions oracle", divisions_oracle),
        ("quotient φ bounded by Λ φ", quotient_phi_suite),
        ("corner φ and ψ on ℙ_∞ and 𝕀_∞", corner_phi_psi),
        ("property suites", property_suite),
        ("fuzz determinism", fuzz_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|msg| {
            if secs > SECONDS_PER_CRITERION as f64 {
                Err(format!("{msg}; took {secs:.1} s"))
            } else {
                Ok(msg)
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({secs:.1} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({secs:.1} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

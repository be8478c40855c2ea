#![allow(dead_code)]

use std::sync::Arc;

use itlab::algebra::{build_algebra, AlgebraTable};
use itlab::io::{AlgebraFile, AnyPresentation};
use itlab::linalg::PrimeField;
use itlab::module::Module;

pub type Alg = Arc<AlgebraTable<PrimeField>>;

pub fn fixture(name: &str) -> Alg {
    let path = format!("{}/../../fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let file = AlgebraFile::read(&path).unwrap();
    let AnyPresentation::Prime(p) = file.presentation(&path).unwrap() else {
        panic!("{name} is not over a prime field")
    };
    build_algebra(&p, file.max_path_len()).unwrap()
}

pub fn vertex(alg: &Alg, name: &str) -> usize {
    alg.vertices().iter().position(|v| v == name).unwrap()
}

pub fn vertices(alg: &Alg, names: &[&str]) -> Vec<usize> {
    names.iter().map(|n| vertex(alg, n)).collect()
}

/// Simples, projectives, injectives, radicals and a few syzygies and cosyzygies.
pub fn standard_family(alg: &Alg) -> Vec<(String, Module<PrimeField>)> {
    let env = itlab::expr::Env::new(alg);
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
            let m = env.eval_str(&e).unwrap();
            if !m.is_zero() {
                out.push((e, m));
            }
        }
    }
    let all: Vec<String> = alg.vertices().iter().map(|v| format!("S({v})")).collect();
    out.push((format!("Sum({})", all.join(",")), env.eval_str(&format!("Sum({})", all.join(","))).unwrap()));
    out
}

pub fn random_module(alg: &Alg, seed: u64) -> Module<PrimeField> {
    Module::random(alg, seed, 1 + (seed % 8) as usize)
}

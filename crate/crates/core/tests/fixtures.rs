mod common;

use common::{fixture, vertex, vertices};
use itlab::expr::Env;
use itlab::homology::{is_selfinjective, PdResult};
use itlab::ideal::{IdealContext, Membership, Quantity, StrongIdempotency, Which};
use itlab::igusa::{phi_l, phi_r, Certificate};
use itlab::module::Module;
use itlab::registry::Workspace;
use itlab::report::describe;

#[test]
fn f2_trace_ideal_and_corner() {
    let a = fixture("f2");
    assert_eq!(a.dim(), 15);
    let ctx = IdealContext::build(&a, &vertices(&a, &["3", "4", "5"])).unwrap();
    let parts: Vec<(String, usize)> = describe(&ctx.ideal_module)
        .unwrap()
        .into_iter()
        .map(|e| (e.name, e.multiplicity))
        .collect();
    let expected = [("P(3)", 1), ("P(4)", 3), ("P(5)", 1), ("S(5)", 2)];
    let expected: Vec<(String, usize)> = expected.iter().map(|(n, k)| (n.to_string(), *k)).collect();
    // P(4) is simple, so it is named by its simple top.
    let renamed: Vec<(String, usize)> = parts
        .into_iter()
        .map(|(n, k)| if n == "S(4)" { ("P(4)".to_string(), k) } else { (n, k) })
        .collect();
    let mut renamed = renamed;
    renamed.sort();
    assert_eq!(renamed, expected);
    assert_eq!(ctx.ws.pd(&ctx.ideal_module, 20).unwrap(), PdResult::Finite(1));
    assert!(matches!(ctx.strong_idempotency(20), StrongIdempotency::CertifiedYes { .. }));
    assert_eq!(ctx.quotient_algebra().dim(), 4);
    assert!(is_selfinjective(ctx.quotient_algebra()));
    assert_eq!(itlab::ideal::gld_of(&ctx.ws, ctx.gamma(), 20), Quantity::Finite(1));
}

#[test]
fn f2_syzygy_of_s5_is_p4() {
    let a = fixture("f2");
    let env = Env::new(&a);
    let omega = env.eval_str("Omega(1,S(5))").unwrap();
    assert!(omega.is_isomorphic(&Module::projective(&a, vertex(&a, "4"))).unwrap());
}

#[test]
fn f2_quotient_indecomposables_have_phi_zero() {
    let a = fixture("f2");
    let ctx = IdealContext::build(&a, &vertices(&a, &["3", "4", "5"])).unwrap();
    let q = ctx.quotient_algebra();
    let ws = Workspace::new();
    for v in 0..q.num_vertices() {
        for m in [Module::simple(q, v), Module::projective(q, v)] {
            assert_eq!(phi_l(&ws, &m, 50).unwrap().phi, 0);
            assert_eq!(phi_r(&ws, &m, 50).unwrap().phi, 0);
        }
    }
}

#[test]
fn f1_membership_in_t() {
    let a = fixture("f1");
    let ctx = IdealContext::build(&a, &[vertex(&a, "2")]).unwrap();
    assert!(ctx.ideal_module.is_projective());
    let yes = |m: &Module<_>| ctx.membership(m, Which::T, 20);
    assert!(yes(&Module::projective(&a, 0)).is_yes());
    assert!(yes(&Module::simple(&a, 0)).is_yes());
    assert!(matches!(yes(&Module::simple(&a, 1)), Membership::No { stage: 1, .. }));
}

#[test]
fn f3_periodic_rank_sequence() {
    let a = fixture("f3");
    let m = Env::new(&a).eval_str("Sum(S(1),S(loop))").unwrap();
    let r = phi_l(&Workspace::new(), &m, 50).unwrap();
    assert_eq!(r.phi, 2);
    assert_eq!(r.rank_sequence, vec![2, 2, 1]);
    assert!(matches!(r.certificate, Certificate::Periodic { .. }));
}

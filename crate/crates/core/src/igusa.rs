//! Igusa-Todorov functions computed on K0 with stabilization certificates.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::homology::PdResult;
use crate::linalg::{clear_denominators, int_rank, Field, Matrix, Rationals};
use crate::module::{Module, ModuleError};
use crate::registry::{ClassId, IsoClassRegistry, K0Vector, Side, Workspace};

pub const DEFAULT_MAX_STEPS: usize = 200;
pub const DEFAULT_DIVISION_CLASS_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IgusaError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("division search over {classes} summand classes exceeds the cap of {cap}")]
    SearchCapExceeded { classes: usize, cap: usize },
}

/// Why the rank sequence is known to be stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// All generator rows are zero at this level.
    Vanished { level: usize },
    /// The multiset of generator rows at `start + period` equals the one at `start`.
    Periodic { start: usize, period: usize },
    /// No certificate within the step budget.
    Exhausted { bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiWitness {
    /// Class of the summand of the syzygy attaining the maximum.
    pub class: Option<ClassId>,
    pub dims: Vec<usize>,
    pub pd: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiReport {
    /// Exact when certified, otherwise a lower bound.
    pub phi: usize,
    pub certified: bool,
    pub rank_sequence: Vec<usize>,
    pub certificate: Certificate,
    /// `None` when unknown.
    pub psi: Option<usize>,
    pub psi_witness: Option<PsiWitness>,
}

/// Generator rows iterated level by level.
struct Levels {
    rows: Vec<Vec<K0Vector>>,
    ranks: Vec<usize>,
    certificate: Certificate,
}

fn rank_of(rows: &[K0Vector]) -> usize {
    let mut cols: Vec<ClassId> = rows.iter().flat_map(|r| r.classes()).collect();
    cols.sort();
    cols.dedup();
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| BigInt::from(r.0.get(c).cloned().unwrap_or_default())).collect())
        .collect();
    int_rank(&m)
}

fn sorted(rows: &[K0Vector]) -> Vec<K0Vector> {
    let mut v = rows.to_vec();
    v.sort();
    v
}

fn run_levels<F: Field>(
    reg: &IsoClassRegistry<F>,
    generators: Vec<K0Vector>,
    side: Side,
    max_steps: usize,
) -> Result<Levels, ModuleError> {
    let mut rows = vec![generators];
    let mut seen = vec![sorted(&rows[0])];
    let mut ranks = vec![rank_of(&rows[0])];
    let mut s = 0;
    loop {
        if rows[s].iter().all(|r| r.is_zero()) {
            return Ok(Levels {
                rows,
                ranks,
                certificate: Certificate::Vanished { level: s },
            });
        }
        if s >= max_steps {
            return Ok(Levels {
                rows,
                ranks,
                certificate: Certificate::Exhausted { bound: max_steps },
            });
        }
        let next: Vec<K0Vector> = rows[s]
            .iter()
            .map(|r| reg.apply(r, side))
            .collect::<Result<_, _>>()?;
        let key = sorted(&next);
        let r = rank_of(&next);
        assert!(r <= ranks[s], "rank sequence increased");
        s += 1;
        if let Some(t) = seen.iter().position(|k| *k == key) {
            rows.push(next);
            return Ok(Levels {
                rows,
                ranks,
                certificate: Certificate::Periodic { start: t, period: s - t },
            });
        }
        rows.push(next);
        ranks.push(r);
        seen.push(key);
    }
}

/// φ from a certified run: the first level attaining the limit rank.
fn phi_of(levels: &Levels) -> (usize, bool) {
    let (limit, certified) = match levels.certificate {
        Certificate::Vanished { .. } => (0, true),
        Certificate::Periodic { start, .. } => (levels.ranks[start], true),
        Certificate::Exhausted { .. } => (*levels.ranks.iter().min().unwrap(), false),
    };
    let phi = levels.ranks.iter().position(|&r| r == limit).unwrap();
    (phi, certified)
}

fn distinct_generators<F: Field>(
    reg: &IsoClassRegistry<F>,
    m: &Module<F>,
    side: Side,
) -> Result<Vec<K0Vector>, ModuleError> {
    let v = reg.class_vector_on(m, side)?;
    Ok(v.classes()
        .map(K0Vector::unit)
        .collect())
}

fn report_from_levels<F: Field>(
    reg: &IsoClassRegistry<F>,
    levels: &Levels,
    with_psi: bool,
    pd_bound: usize,
) -> Result<PhiReport, ModuleError> {
    let (phi, certified) = phi_of(levels);
    let mut psi = None;
    let mut psi_witness = None;
    if certified && with_psi {
        let mut at_phi = K0Vector::default();
        for r in &levels.rows[phi] {
            at_phi.add(r);
        }
        let mut best: Option<(ClassId, usize)> = None;
        let mut unknown = false;
        for c in at_phi.classes() {
            match reg.pd_of_class(c, pd_bound)? {
                PdResult::Finite(n) => {
                    if best.map(|(_, b)| n > b).unwrap_or(true) {
                        best = Some((c, n));
                    }
                }
                PdResult::Infinite(_) => {}
                PdResult::Unknown(_) => unknown = true,
            }
        }
        if !unknown {
            psi = Some(phi + best.map(|(_, n)| n).unwrap_or(0));
            psi_witness = best.map(|(c, n)| PsiWitness {
                class: Some(c),
                dims: reg.representative(c).dims().to_vec(),
                pd: n,
            });
        }
    }
    let rank_sequence = match levels.certificate {
        Certificate::Periodic { start, period } => levels.ranks[..start + period].to_vec(),
        _ => levels.ranks.clone(),
    };
    Ok(PhiReport {
        phi,
        certified,
        rank_sequence,
        certificate: levels.certificate.clone(),
        psi,
        psi_witness,
    })
}

/// φ and ψ of a left module.
pub fn phi_l<F: Field>(ws: &Workspace<F>, m: &Module<F>, max_steps: usize) -> Result<PhiReport, ModuleError> {
    let reg = ws.registry(m.algebra());
    let gens = distinct_generators(&reg, m, Side::Projective)?;
    let levels = run_levels(&reg, gens, Side::Projective, max_steps)?;
    report_from_levels(&reg, &levels, true, max_steps)
}

/// φ_r and ψ_r through the dual over the opposite algebra.
pub fn phi_r<F: Field>(ws: &Workspace<F>, m: &Module<F>, max_steps: usize) -> Result<PhiReport, ModuleError> {
    phi_l(ws, &m.dual(), max_steps)
}

/// φ_r from ranks of cosyzygy classes, with injectives as zero. Carries no ψ.
pub fn phi_r_direct<F: Field>(ws: &Workspace<F>, m: &Module<F>, max_steps: usize) -> Result<PhiReport, ModuleError> {
    let reg = ws.registry(m.algebra());
    let gens = distinct_generators(&reg, m, Side::Injective)?;
    let levels = run_levels(&reg, gens, Side::Injective, max_steps)?;
    report_from_levels(&reg, &levels, false, max_steps)
}

/// Add-disjoint `X` and `Y` in `add M`, as multiplicities of summand classes, with
/// `[Ω^d X] = [Ω^d Y]` and `[Ω^{d-1} X] ≠ [Ω^{d-1} Y]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisionWitness {
    pub x: Vec<(ClassId, BigUint)>,
    pub y: Vec<(ClassId, BigUint)>,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisionResult {
    pub phi: usize,
    pub witness: Option<DivisionWitness>,
}

/// φ as the largest `d` admitting a d-division.
///
/// For `d >= 1`, `Ext^d(X,-) ≅ Ext^d(Y,-)` is decided by comparing the nonprojective parts of
/// `Ω^{d-1} X` and `Ω^{d-1} Y`. Candidate pairs are the positive and negative parts of integer
/// kernel vectors of the level-`d` syzygy map; each is confirmed by recomputing both sums.
pub fn phi_via_divisions<F: Field>(
    ws: &Workspace<F>,
    m: &Module<F>,
    max_steps: usize,
    class_cap: usize,
) -> Result<DivisionResult, IgusaError> {
    let reg = ws.registry(m.algebra());
    let classes: Vec<ClassId> = reg.class_vector(m)?.classes().collect();
    if classes.len() > class_cap {
        return Err(IgusaError::SearchCapExceeded {
            classes: classes.len(),
            cap: class_cap,
        });
    }
    if classes.is_empty() {
        return Ok(DivisionResult { phi: 0, witness: None });
    }
    // seq[j][l] = [Ω^l C_j]; iterate until the ordered tuple of rows repeats.
    let mut seq: Vec<Vec<K0Vector>> = classes.iter().map(|&c| vec![K0Vector::unit(c)]).collect();
    let mut tuples: Vec<Vec<K0Vector>> = vec![seq.iter().map(|s| s[0].clone()).collect()];
    let mut levels = 1;
    while levels <= max_steps {
        let next: Vec<K0Vector> = seq
            .iter()
            .map(|s| reg.apply(s.last().unwrap(), Side::Projective))
            .collect::<Result<_, _>>()?;
        let repeat = tuples.contains(&next);
        for (s, n) in seq.iter_mut().zip(&next) {
            s.push(n.clone());
        }
        levels += 1;
        if repeat {
            break;
        }
        tuples.push(next);
    }
    let sum = |coeffs: &[BigUint], l: usize| {
        let mut v = K0Vector::default();
        for (j, k) in coeffs.iter().enumerate() {
            v.add_scaled(&seq[j][l], k);
        }
        v
    };
    for d in (1..levels).rev() {
        for v in kernel_vectors(&seq, d) {
            let x: Vec<BigUint> = v.iter().map(|c| c.to_biguint().unwrap_or_default()).collect();
            let y: Vec<BigUint> = v.iter().map(|c| (-c).to_biguint().unwrap_or_default()).collect();
            if sum(&x, d) != sum(&y, d) || sum(&x, d - 1) == sum(&y, d - 1) {
                continue;
            }
            let support = |w: &[BigUint]| -> Vec<(ClassId, BigUint)> {
                w.iter()
                    .enumerate()
                    .filter(|(_, k)| !k.is_zero())
                    .map(|(j, k)| (classes[j], k.clone()))
                    .collect()
            };
            return Ok(DivisionResult {
                phi: d,
                witness: Some(DivisionWitness {
                    x: support(&x),
                    y: support(&y),
                    d,
                }),
            });
        }
    }
    Ok(DivisionResult { phi: 0, witness: None })
}

/// Integer basis of the relations among `[Ω^l C_j]` over the rationals.
fn kernel_vectors(seq: &[Vec<K0Vector>], l: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<ClassId> = seq.iter().flat_map(|s| s[l].classes()).collect();
    rows.sort();
    rows.dedup();
    let cols: Vec<Vec<BigRational>> = seq
        .iter()
        .map(|s| {
            rows.iter()
                .map(|c| BigRational::from_integer(BigInt::from(s[l].0.get(c).cloned().unwrap_or_default())))
                .collect()
        })
        .collect();
    if rows.is_empty() {
        return (0..seq.len())
            .map(|j| (0..seq.len()).map(|i| BigInt::from(u8::from(i == j))).collect())
            .collect();
    }
    Matrix::from_col_vecs(&Rationals, rows.len(), &cols)
        .kernel_basis()
        .iter()
        .map(|v| clear_denominators(v))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiDimRow {
    pub label: String,
    pub phi: usize,
    pub certified: bool,
}

/// Maximum of φ over a corpus; a lower bound for the φ-dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiDimLowerBound {
    pub rows: Vec<PhiDimRow>,
    pub lower_bound: usize,
    /// Every entry was certified.
    pub all_certified: bool,
}

pub fn phi_dim_lower_bound<F: Field>(
    ws: &Workspace<F>,
    corpus: &[(String, Module<F>)],
    right: bool,
    max_steps: usize,
) -> Result<PhiDimLowerBound, ModuleError> {
    let mut rows = Vec::new();
    for (label, m) in corpus {
        let r = if right {
            phi_r(ws, m, max_steps)?
        } else {
            phi_l(ws, m, max_steps)?
        };
        rows.push(PhiDimRow {
            label: label.clone(),
            phi: r.phi,
            certified: r.certified,
        });
    }
    Ok(PhiDimLowerBound {
        lower_bound: rows.iter().map(|r| r.phi).max().unwrap_or(0),
        all_certified: rows.iter().all(|r| r.certified),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::tests::{algebra, f2};
    use std::sync::Arc;

    fn f3() -> Arc<crate::algebra::AlgebraTable<crate::linalg::PrimeField>> {
        algebra(
            &["1", "2", "3", "loop"],
            &[("a", "1", "2"), ("b", "2", "3"), ("x", "loop", "loop")],
            &[&["a", "b"], &["x", "x"]],
        )
    }

    #[test]
    fn f3_rank_pitfall() {
        let a = f3();
        let ws = Workspace::new();
        let m = Module::direct_sum(&a, &[Module::simple(&a, 0), Module::simple(&a, 3)]);
        let r = phi_l(&ws, &m, 50).unwrap();
        assert_eq!(r.rank_sequence, vec![2, 2, 1]);
        assert_eq!(r.certificate, Certificate::Periodic { start: 2, period: 1 });
        assert_eq!(r.phi, 2);
        assert_eq!(r.psi, Some(2));
        assert_eq!(phi_via_divisions(&ws, &m, 50, 12).unwrap().phi, 2);
    }

    #[test]
    fn divisions_need_multiplicities() {
        // Ω C0 = S2 ⊕ P and Ω C1 = S2², so the 1-division is C0² against C1.
        let a = algebra(
            &["1", "2"],
            &[("a1", "1", "2"), ("a2", "2", "2"), ("a3", "1", "2")],
            &[&["a2", "a2"], &["a3", "a2"]],
        );
        let m = crate::expr::Env::new(&a).eval_str("OmegaInv(1,S(2))").unwrap();
        let ws = Workspace::new();
        assert_eq!(phi_l(&ws, &m, 50).unwrap().phi, 1);
        let d = phi_via_divisions(&ws, &m, 50, 12).unwrap();
        assert_eq!(d.phi, 1);
        let w = d.witness.unwrap();
        let mut mults: Vec<BigUint> = w.x.iter().chain(&w.y).map(|(_, k)| k.clone()).collect();
        mults.sort();
        assert_eq!(mults, vec![BigUint::from(1u32), BigUint::from(2u32)]);
    }

    #[test]
    fn projective_and_pd_finite() {
        let a = f3();
        let ws = Workspace::new();
        let r = phi_l(&ws, &Module::projective(&a, 0), 10).unwrap();
        assert_eq!((r.phi, r.rank_sequence.clone(), r.certificate.clone()), (0, vec![0], Certificate::Vanished { level: 0 }));
        let s1 = phi_l(&ws, &Module::simple(&a, 0), 10).unwrap();
        assert_eq!((s1.phi, s1.psi), (2, Some(2)));
    }

    #[test]
    fn right_routes_agree() {
        let a = f2();
        let ws = Workspace::new();
        for seed in 0..10 {
            let m = Module::random(&a, seed, 7);
            let x = phi_r(&ws, &m, 50).unwrap();
            let y = phi_r_direct(&ws, &m, 50).unwrap();
            assert_eq!(x.phi, y.phi, "seed {seed}");
            assert_eq!(x.rank_sequence, y.rank_sequence, "seed {seed}");
        }
    }

    #[test]
    fn divisions_match_ranks() {
        let a = f2();
        let ws = Workspace::new();
        for seed in 0..20 {
            let m = Module::random(&a, seed, 9);
            let r = phi_l(&ws, &m, 50).unwrap();
            let d = phi_via_divisions(&ws, &m, 50, 12).unwrap();
            assert_eq!(r.phi, d.phi, "seed {seed}");
        }
    }
}

//! Projective covers, minimal resolutions, syzygies, cosyzygies, Ext dimensions.

use serde::{Deserialize, Serialize};

use crate::linalg::{Field, Matrix, Subspace};
use crate::module::{hom_basis, hom_dim, Module, ModuleMap};

/// A projective cover `epi: P -> M` with `P = ⊕ P_v^{multiplicity[v]}`.
#[derive(Clone, Debug)]
pub struct ProjectiveCover<F: Field> {
    pub projective: Module<F>,
    pub epi: ModuleMap<F>,
    pub multiplicity: Vec<usize>,
}

/// Minimal projective cover built from lifts of a basis of the top.
pub fn projective_cover<F: Field>(m: &Module<F>) -> ProjectiveCover<F> {
    let alg = m.algebra();
    let f = m.field();
    let nv = alg.num_vertices();
    let rad = m.radical_spaces();
    let mut parts = Vec::new();
    let mut part_maps: Vec<Vec<Matrix<F>>> = Vec::new();
    let mut multiplicity = vec![0; nv];
    for v in 0..nv {
        for c in rad[v].complement_indices() {
            multiplicity[v] += 1;
            let p = Module::projective(alg, v);
            // e_v lifts to the unit vector c of M_v; basis element k goes to k . x.
            let blocks = (0..nv)
                .map(|w| {
                    let cols: Vec<Vec<F::Elem>> = (0..alg.dim())
                        .filter(|&k| alg.basis()[k].src == v && alg.basis()[k].tgt == w)
                        .map(|k| m.basis_actions()[k].col(c))
                        .collect();
                    Matrix::from_col_vecs(f, m.dims()[w], &cols)
                })
                .collect();
            parts.push(p);
            part_maps.push(blocks);
        }
    }
    let projective = Module::direct_sum(alg, &parts);
    let blocks = (0..nv)
        .map(|w| {
            let mut b = Matrix::zeros(f, m.dims()[w], 0);
            for pm in &part_maps {
                b = b.hstack(&pm[w]);
            }
            b
        })
        .collect();
    let epi = ModuleMap {
        src: projective.clone(),
        tgt: m.clone(),
        blocks,
    };
    debug_assert!(epi.is_surjective());
    ProjectiveCover {
        projective,
        epi,
        multiplicity,
    }
}

/// An injective envelope `mono: M -> I` with `I = ⊕ I_v^{multiplicity[v]}`.
#[derive(Clone, Debug)]
pub struct InjectiveEnvelope<F: Field> {
    pub injective: Module<F>,
    pub mono: ModuleMap<F>,
    pub multiplicity: Vec<usize>,
}

/// Injective envelope built directly from socle coordinate functionals.
pub fn injective_envelope<F: Field>(m: &Module<F>) -> InjectiveEnvelope<F> {
    let alg = m.algebra();
    let f = m.field();
    let nv = alg.num_vertices();
    let soc = m.socle_spaces();
    let mut parts = Vec::new();
    let mut part_maps: Vec<Vec<Matrix<F>>> = Vec::new();
    let mut multiplicity = vec![0; nv];
    for v in 0..nv {
        for &p in soc[v].pivots() {
            multiplicity[v] += 1;
            parts.push(Module::injective(alg, v));
            // m in M_w goes to the functional b -> (b m)_p, for b: w -> v.
            let blocks = (0..nv)
                .map(|w| {
                    let rows: Vec<Vec<F::Elem>> = (0..alg.dim())
                        .filter(|&k| alg.basis()[k].tgt == v && alg.basis()[k].src == w)
                        .map(|k| m.basis_actions()[k].row(p).to_vec())
                        .collect();
                    Matrix::from_row_vecs(f, m.dims()[w], &rows)
                })
                .collect();
            part_maps.push(blocks);
        }
    }
    let injective = Module::direct_sum(alg, &parts);
    let blocks = (0..nv)
        .map(|w| {
            let mut b = Matrix::zeros(f, 0, m.dims()[w]);
            for pm in &part_maps {
                b = b.vstack(&pm[w]);
            }
            b
        })
        .collect();
    let mono = ModuleMap {
        src: m.clone(),
        tgt: injective.clone(),
        blocks,
    };
    debug_assert!(mono.is_injective());
    InjectiveEnvelope {
        injective,
        mono,
        multiplicity,
    }
}

/// A minimal projective resolution computed to a given length.
#[derive(Clone, Debug)]
pub struct Resolution<F: Field> {
    pub target: Module<F>,
    /// `terms[i] = P_i`.
    pub terms: Vec<Module<F>>,
    /// Projective multiplicities of each term, per vertex.
    pub multiplicities: Vec<Vec<usize>>,
    /// `covers[i]: P_i -> Ω^i M`.
    pub covers: Vec<ModuleMap<F>>,
    /// `syzygies[i] = Ω^i M`, with `syzygies[0] = M`.
    pub syzygies: Vec<Module<F>>,
    /// `inclusions[i]: Ω^{i+1} M -> P_i`.
    pub inclusions: Vec<ModuleMap<F>>,
}

impl<F: Field> Resolution<F> {
    pub fn new(m: &Module<F>) -> Self {
        Self {
            target: m.clone(),
            terms: Vec::new(),
            multiplicities: Vec::new(),
            covers: Vec::new(),
            syzygies: vec![m.clone()],
            inclusions: Vec::new(),
        }
    }

    /// Computes terms until `P_{n-1}` and `Ω^n` exist, or the resolution terminates.
    pub fn extend_to(&mut self, n: usize) {
        while self.syzygies.len() <= n {
            let last = self.syzygies.last().unwrap().clone();
            if last.is_zero() {
                let zero = Module::zero(last.algebra());
                self.terms.push(zero.clone());
                self.multiplicities.push(vec![0; last.dims().len()]);
                self.covers.push(ModuleMap::zero(&zero, &last));
                self.inclusions.push(ModuleMap::zero(&zero, &zero));
                self.syzygies.push(zero);
                continue;
            }
            let cover = projective_cover(&last);
            let ker = cover.epi.kernel();
            self.terms.push(cover.projective.clone());
            self.multiplicities.push(cover.multiplicity);
            self.covers.push(cover.epi);
            self.inclusions.push(ker.inclusion);
            self.syzygies.push(ker.module);
        }
    }

    pub fn syzygy(&mut self, n: usize) -> &Module<F> {
        self.extend_to(n);
        &self.syzygies[n]
    }

    /// Differential `d_i: P_i -> P_{i-1}` for `i >= 1`.
    pub fn differential(&self, i: usize) -> ModuleMap<F> {
        self.inclusions[i - 1].compose(&self.covers[i])
    }

    /// Every syzygy lies in the radical of its term.
    pub fn is_minimal(&self) -> bool {
        self.inclusions.iter().zip(&self.terms).all(|(inc, p)| {
            let rad = p.radical_spaces();
            inc.blocks.iter().enumerate().all(|(v, b)| {
                (0..b.cols()).all(|j| rad[v].contains(&b.col(j)))
            })
        })
    }

    /// Rank checks: each cover is onto and each inclusion has image the kernel of the next cover.
    pub fn is_exact(&self) -> bool {
        self.covers.iter().enumerate().all(|(i, c)| {
            c.is_surjective()
                && self.inclusions[i].is_injective()
                && c.compose(&self.inclusions[i]).is_zero()
                && self.inclusions[i].src.dim() + c.tgt.dim() == c.src.dim()
        })
    }
}

pub fn syzygy<F: Field>(m: &Module<F>, n: usize) -> Module<F> {
    let mut r = Resolution::new(m);
    r.syzygy(n).clone()
}

/// `Ω^{-n} M` computed as `D Ω^n D M`.
pub fn cosyzygy<F: Field>(m: &Module<F>, n: usize) -> Module<F> {
    syzygy(&m.dual(), n).dual()
}

/// `Ω^{-n} M` computed by iterated injective envelopes.
pub fn cosyzygy_direct<F: Field>(m: &Module<F>, n: usize) -> Module<F> {
    let mut cur = m.clone();
    for _ in 0..n {
        if cur.is_zero() {
            break;
        }
        cur = injective_envelope(&cur).mono.cokernel().module;
    }
    cur
}

/// Dimension of `Ext^i(M, N)` from a minimal resolution of `M`.
pub fn ext_dim<F: Field>(m: &Module<F>, n: &Module<F>, i: usize) -> usize {
    let mut r = Resolution::new(m);
    ext_dim_with(&mut r, n, i)
}

/// `Ext^i(M, N)` reusing a resolution of `M`.
pub fn ext_dim_with<F: Field>(r: &mut Resolution<F>, n: &Module<F>, i: usize) -> usize {
    if i == 0 {
        return hom_dim(&r.target, n);
    }
    r.extend_to(i);
    let omega = &r.syzygies[i];
    if omega.is_zero() {
        return 0;
    }
    let homs = hom_dim(omega, n);
    if homs == 0 {
        return 0;
    }
    let f = n.field();
    let restricted: Vec<Vec<F::Elem>> = hom_basis(&r.terms[i - 1], n)
        .iter()
        .map(|h| h.compose(&r.inclusions[i - 1]).flatten())
        .collect();
    let width = restricted.first().map(|v| v.len()).unwrap_or(0);
    let rank = Subspace::spanned_by(f, width, &restricted).dim();
    homs - rank
}

/// How an infinite projective dimension was certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InfiniteCert {
    /// `Ω^{start} M ≅ Ω^{start+period} M ≠ 0`.
    Period { start: usize, period: usize },
    /// A nonprojective summand of `Ω^{depth} M` lies on a cycle of summand classes of length `cycle`.
    SummandCycle { depth: usize, cycle: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum PdResult {
    Finite(usize),
    Infinite(InfiniteCert),
    Unknown(usize),
}

impl PdResult {
    pub fn finite(&self) -> Option<usize> {
        match self {
            PdResult::Finite(n) => Some(*n),
            _ => None,
        }
    }
    pub fn is_infinite(&self) -> bool {
        matches!(self, PdResult::Infinite(_))
    }
}

impl std::fmt::Display for PdResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PdResult::Finite(n) => write!(f, "{n}"),
            PdResult::Infinite(_) => write!(f, "inf"),
            PdResult::Unknown(b) => write!(f, "unknown(>{b})"),
        }
    }
}

/// Projective dimension: finite when a syzygy is projective, infinite when syzygies repeat.
pub fn pd<F: Field>(m: &Module<F>, bound: usize) -> PdResult {
    let mut r = Resolution::new(m);
    pd_with(&mut r, bound)
}

pub fn pd_with<F: Field>(r: &mut Resolution<F>, bound: usize) -> PdResult {
    for s in 0..=bound {
        r.extend_to(s);
        let cur = r.syzygies[s].clone();
        if cur.is_projective() {
            return PdResult::Finite(s);
        }
        for t in 0..s {
            let prev = &r.syzygies[t];
            if prev.dims() == cur.dims() && prev.find_isomorphism(&cur).ok().flatten().is_some() {
                return PdResult::Infinite(InfiniteCert::Period {
                    start: t,
                    period: s - t,
                });
            }
        }
    }
    PdResult::Unknown(bound)
}

/// Injective dimension via the dual.
pub fn inj_dim<F: Field>(m: &Module<F>, bound: usize) -> PdResult {
    pd(&m.dual(), bound)
}

/// Global dimension as the maximum projective dimension of the simples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum GlobalDimension {
    Finite(usize),
    /// Witnessed by the simple at this vertex.
    Infinite(usize),
    Unknown(usize),
}

impl GlobalDimension {
    pub fn finite(&self) -> Option<usize> {
        match self {
            GlobalDimension::Finite(n) => Some(*n),
            _ => None,
        }
    }
}

impl std::fmt::Display for GlobalDimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GlobalDimension::Finite(n) => write!(f, "{n}"),
            GlobalDimension::Infinite(_) => write!(f, "inf"),
            GlobalDimension::Unknown(b) => write!(f, "unknown(>{b})"),
        }
    }
}

pub fn global_dimension<F: Field>(alg: &std::sync::Arc<crate::algebra::AlgebraTable<F>>, bound: usize) -> GlobalDimension {
    let mut best = 0;
    let mut unknown = false;
    for v in 0..alg.num_vertices() {
        match pd(&Module::simple(alg, v), bound) {
            PdResult::Finite(n) => best = best.max(n),
            PdResult::Infinite(_) => return GlobalDimension::Infinite(v),
            PdResult::Unknown(_) => unknown = true,
        }
    }
    if unknown {
        GlobalDimension::Unknown(bound)
    } else {
        GlobalDimension::Finite(best)
    }
}

/// Every indecomposable projective is injective.
pub fn is_selfinjective<F: Field>(alg: &std::sync::Arc<crate::algebra::AlgebraTable<F>>) -> bool {
    (0..alg.num_vertices()).all(|v| Module::projective(alg, v).is_injective())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::tests::{algebra, f1, f2};

    #[test]
    fn omega_s5_is_p4_and_pd_one() {
        let a = f2();
        let s5 = Module::simple(&a, 4);
        let om = syzygy(&s5, 1);
        assert!(om.is_isomorphic(&Module::projective(&a, 3)).unwrap());
        assert_eq!(pd(&s5, 10), PdResult::Finite(1));
        assert_eq!(pd(&Module::projective(&a, 0), 10), PdResult::Finite(0));
    }

    #[test]
    fn cover_of_simple_is_projective() {
        let a = f2();
        for v in 0..5 {
            let c = projective_cover(&Module::simple(&a, v));
            assert!(c.projective.is_isomorphic(&Module::projective(&a, v)).unwrap());
            let p = Module::projective(&a, v);
            assert_eq!(projective_cover(&p).projective.dim(), p.dim());
        }
    }

    #[test]
    fn loop_simple_has_period_one() {
        let a = algebra(&["x0"], &[("x", "x0", "x0")], &[&["x", "x"]]);
        let s = Module::simple(&a, 0);
        assert_eq!(
            pd(&s, 10),
            PdResult::Infinite(InfiniteCert::Period { start: 0, period: 1 })
        );
        assert_eq!(global_dimension(&a, 10), GlobalDimension::Infinite(0));
        assert!(is_selfinjective(&a));
    }

    #[test]
    fn ext_in_a2() {
        let a = f1();
        let s1 = Module::simple(&a, 0);
        let s2 = Module::simple(&a, 1);
        assert_eq!(ext_dim(&s1, &s2, 1), 1);
        assert_eq!(ext_dim(&s2, &s1, 1), 0);
        assert_eq!(ext_dim(&Module::projective(&a, 0), &s2, 1), 0);
        assert_eq!(global_dimension(&a, 5), GlobalDimension::Finite(1));
    }

    #[test]
    fn cosyzygy_routes_agree() {
        let a = f1();
        let s2 = Module::simple(&a, 1);
        let c = cosyzygy(&s2, 1);
        assert!(c.is_isomorphic(&Module::simple(&a, 0)).unwrap());
        let b = f2();
        for seed in 0..12 {
            let m = Module::random(&b, seed, 7);
            for n in 1..3 {
                let x = cosyzygy(&m, n);
                let y = cosyzygy_direct(&m, n);
                assert!(x.is_isomorphic(&y).unwrap(), "seed {seed} n {n}");
            }
        }
        assert!(cosyzygy(&Module::injective(&b, 0), 1).is_zero());
    }

    #[test]
    fn resolution_is_minimal_and_exact() {
        let a = f2();
        for seed in 0..8 {
            let m = Module::random(&a, seed, 8);
            let mut r = Resolution::new(&m);
            r.extend_to(4);
            assert!(r.is_minimal());
            assert!(r.is_exact());
        }
    }

    #[test]
    fn dimension_shift() {
        let a = f2();
        let n = Module::random(&a, 99, 6);
        for seed in 0..6 {
            let m = Module::random(&a, seed, 7);
            let om = syzygy(&m, 1);
            for i in 1..3 {
                assert_eq!(ext_dim(&m, &n, i + 1), ext_dim(&om, &n, i));
            }
        }
    }
}

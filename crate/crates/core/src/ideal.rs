//! The idempotent ideal of a vertex subset and the comparisons built on it.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, AlgebraTable, Corner, Quotient};
use crate::homology::{ext_dim, is_selfinjective, GlobalDimension, PdResult};
use crate::igusa::{phi_l, phi_r};
use crate::linalg::{Field, Subspace};
use crate::module::{hom_basis, Module, ModuleError, QuotientModule, Submodule};
use crate::registry::{ClassId, IsoClassRegistry, Reach, Workspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdealError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

/// Everything derived from `Λ` and a vertex subset `S`.
pub struct IdealContext<F: Field> {
    pub lambda: Arc<AlgebraTable<F>>,
    /// `S`, sorted.
    pub vertices: Vec<usize>,
    /// `ΛeΛ` in algebra coordinates.
    pub ideal: Subspace<F>,
    /// `Λ/𝔄`.
    pub quotient: Quotient<F>,
    /// `Γ = eΛe`.
    pub corner: Corner<F>,
    /// `𝔄` as a left module.
    pub ideal_module: Module<F>,
    /// `Λ/𝔄` as a left module.
    pub quotient_module: Module<F>,
    pub ws: Arc<Workspace<F>>,
    mirror: OnceLock<Box<IdealContext<F>>>,
}

fn to_regular<F: Field>(alg: &AlgebraTable<F>, x: &[F::Elem]) -> Vec<F::Elem> {
    let f = alg.field();
    let mut y = vec![f.zero(); alg.dim()];
    for (k, c) in x.iter().enumerate() {
        y[Module::regular_position(alg, k)] = c.clone();
    }
    y
}

/// Span of all `x e_s y` over basis elements `x, y` and `s` in the subset.
fn two_sided_ideal<F: Field>(alg: &AlgebraTable<F>, vertices: &[usize]) -> Subspace<F> {
    let mut span = Subspace::new(alg.field(), alg.dim());
    for &s in vertices {
        let e = alg.unit_vector(alg.idempotents()[s]);
        for i in 0..alg.dim() {
            let left = alg.mul(&alg.unit_vector(i), &e);
            if left.iter().all(|c| alg.field().is_zero(c)) {
                continue;
            }
            for j in 0..alg.dim() {
                span.insert(&alg.mul(&left, &alg.unit_vector(j)));
            }
        }
    }
    span
}

impl<F: Field> IdealContext<F> {
    pub fn build(lambda: &Arc<AlgebraTable<F>>, vertices: &[usize]) -> Result<Self, IdealError> {
        Self::build_in(lambda, vertices, Arc::new(Workspace::new()))
    }

    pub fn build_in(lambda: &Arc<AlgebraTable<F>>, vertices: &[usize], ws: Arc<Workspace<F>>) -> Result<Self, IdealError> {
        let mut s = vertices.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.is_empty() {
            return Err(IdealError::EmptyVertexSet);
        }
        let ideal = two_sided_ideal(lambda, &s);
        let quotient = lambda.quotient(&ideal)?;
        let corner = lambda.corner(&s)?;
        let reg = Module::regular(lambda);
        let gens: Vec<Vec<F::Elem>> = ideal.basis().iter().map(|x| to_regular(lambda, x)).collect();
        let sub = reg.submodule_generated(&gens);
        let quotient_module = reg.quotient_by(&sub.spaces).module;
        let ctx = Self {
            lambda: lambda.clone(),
            vertices: s,
            ideal,
            quotient,
            corner,
            ideal_module: sub.module,
            quotient_module,
            ws,
            mirror: OnceLock::new(),
        };
        ctx.check_invariants()?;
        Ok(ctx)
    }

    fn check_invariants(&self) -> Result<(), IdealError> {
        let alg = &self.lambda;
        let f = alg.field();
        let mut square = Subspace::new(f, alg.dim());
        for x in self.ideal.basis() {
            for y in self.ideal.basis() {
                square.insert(&alg.mul(x, y));
            }
        }
        if square.dim() != self.ideal.dim() {
            return Err(IdealError::Inconsistent("ideal is not idempotent".into()));
        }
        if self.ideal.dim() + self.quotient.algebra.dim() != alg.dim() {
            return Err(IdealError::Inconsistent("dimension of ideal and quotient".into()));
        }
        // Trace of P in Λ from evaluation of all maps P_s -> Λ.
        let reg = Module::regular(alg);
        let mut trace = Subspace::new(f, alg.dim());
        for &s in &self.vertices {
            for h in hom_basis(&Module::projective(alg, s), &reg) {
                let m = h.full_matrix();
                for j in 0..m.cols() {
                    trace.insert(&m.col(j));
                }
            }
        }
        let ideal_reg = Subspace::spanned_by(
            f,
            alg.dim(),
            &self.ideal.basis().iter().map(|x| to_regular(alg, x)).collect::<Vec<_>>(),
        );
        if trace.dim() != ideal_reg.dim() || !ideal_reg.basis().iter().all(|x| trace.contains(x)) {
            return Err(IdealError::Inconsistent("ideal differs from the trace of P".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> &F {
        self.lambda.field()
    }

    pub fn gamma(&self) -> &Arc<AlgebraTable<F>> {
        &self.corner.algebra
    }

    pub fn quotient_algebra(&self) -> &Arc<AlgebraTable<F>> {
        &self.quotient.algebra
    }

    pub fn ideal_vectors(&self) -> &[Vec<F::Elem>] {
        self.ideal.basis()
    }

    pub fn in_subset(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// The same construction over the opposite algebra, used for right-module statements.
    pub fn mirror(&self) -> &IdealContext<F> {
        self.mirror.get_or_init(|| {
            Box::new(
                Self::build_in(&self.lambda.opposite(), &self.vertices, self.ws.clone())
                    .expect("mirror of a valid context is valid"),
            )
        })
    }

    /// `e M` over `Γ`.
    pub fn restrict(&self, m: &Module<F>) -> Module<F> {
        m.restrict_corner(&self.corner)
    }

    /// A `Λ/𝔄`-module viewed over `Λ`.
    pub fn inflate(&self, x: &Module<F>) -> Module<F> {
        x.inflate(&self.quotient, &self.lambda)
    }

    pub fn deflate(&self, m: &Module<F>) -> Option<Module<F>> {
        m.deflate(&self.quotient)
    }

    /// Whether every projective term `P_v` has `v` in the subset.
    fn supported(&self, mult: &[usize]) -> bool {
        mult.iter().enumerate().all(|(v, &k)| k == 0 || self.in_subset(v))
    }
}

/// Which subcategory to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "snake_case")]
pub enum Which {
    P(usize),
    I(usize),
    PInf,
    IInf,
    T,
    TTilde,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Membership {
    /// `checked_through` is the last stage or degree inspected.
    Yes { route: String, checked_through: usize },
    /// The offending stage (resolution term) or Ext degree.
    No { stage: usize, detail: String },
    Unknown { bound: usize },
}

impl Membership {
    pub fn is_yes(&self) -> bool {
        matches!(self, Membership::Yes { .. })
    }
    pub fn is_no(&self) -> bool {
        matches!(self, Membership::No { .. })
    }
}

impl<F: Field> IdealContext<F> {
    pub fn membership(&self, m: &Module<F>, which: Which, bound: usize) -> Membership {
        match which {
            Which::P(k) => self.in_p_k(m, k),
            Which::PInf => self.in_p_inf(m, bound),
            Which::T => self.in_t(m, bound),
            Which::I(k) => self.mirror().in_p_k(&m.dual(), k),
            Which::IInf => self.mirror().in_p_inf(&m.dual(), bound),
            Which::TTilde => self.mirror().in_t(&m.dual(), bound),
        }
    }

    /// Summand classes of the syzygies of `m` up to `depth` steps.
    fn syzygy_reach(&self, m: &Module<F>, depth: usize) -> Result<(Arc<IsoClassRegistry<F>>, Reach), ModuleError> {
        let reg = self.ws.registry(m.algebra());
        let start: Vec<ClassId> = reg.summands(m)?.into_iter().map(|(c, _)| c).collect();
        let reach = reg.reach(&start, depth)?;
        Ok((reg, reach))
    }

    /// Least depth at which a class with a projective cover outside the subset appears.
    fn first_unsupported(&self, reg: &IsoClassRegistry<F>, reach: &Reach, depth: usize) -> Option<(usize, ClassId)> {
        reach
            .min_depth
            .iter()
            .filter(|&(_, &d)| d <= depth)
            .filter(|&(&c, _)| !self.supported(&reg.representative(c).top_dims()))
            .map(|(&c, &d)| (d, c))
            .min()
    }

    fn in_p_k(&self, m: &Module<F>, k: usize) -> Membership {
        let (reg, reach) = match self.syzygy_reach(m, k) {
            Ok(r) => r,
            Err(_) => return Membership::Unknown { bound: k },
        };
        match self.first_unsupported(&reg, &reach, k) {
            Some((d, _)) => Membership::No {
                stage: d,
                detail: format!("term {d} has a projective outside the subset"),
            },
            None => Membership::Yes {
                route: "syzygy summand classes".into(),
                checked_through: k,
            },
        }
    }

    fn in_p_inf(&self, m: &Module<F>, bound: usize) -> Membership {
        let (reg, reach) = match self.syzygy_reach(m, bound) {
            Ok(r) => r,
            Err(_) => return Membership::Unknown { bound },
        };
        let deepest = reach.min_depth.values().copied().max().unwrap_or(0);
        if let Some((d, _)) = self.first_unsupported(&reg, &reach, deepest) {
            return Membership::No {
                stage: d,
                detail: format!("term {d} has a projective outside the subset"),
            };
        }
        if reach.complete {
            Membership::Yes {
                route: format!("closed graph of {} syzygy summand classes", reach.min_depth.len()),
                checked_through: deepest,
            }
        } else {
            Membership::Unknown { bound }
        }
    }

    fn in_t(&self, m: &Module<F>, bound: usize) -> Membership {
        let (reg, reach) = match self.syzygy_reach(&self.quotient_module, bound) {
            Ok(r) => r,
            Err(_) => return Membership::Unknown { bound },
        };
        // Ext^{d+1}(Λ/𝔄, M) collects Ext^1(C, M) over the classes C at depth d.
        let first = reach
            .min_depth
            .iter()
            .filter(|&(&c, _)| !reg.is_projective(c))
            .filter_map(|(&c, &d)| {
                let e = ext_dim(&reg.representative(c), m, 1);
                (e != 0).then_some((d + 1, e))
            })
            .min();
        if let Some((i, e)) = first {
            return Membership::No {
                stage: i,
                detail: format!("Ext^{i}(Λ/𝔄, M) contains Ext^1 of a syzygy summand of dimension {e}"),
            };
        }
        if reach.complete {
            Membership::Yes {
                route: "Ext^1 vanishing on every syzygy summand class of Λ/𝔄".into(),
                checked_through: reach.min_depth.values().copied().max().unwrap_or(0) + 1,
            }
        } else {
            Membership::Unknown { bound }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum StrongCert {
    ProjectiveIdeal,
    ConvexComplement,
    IdealInPInf { checked_through: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtMismatch {
    pub degree: usize,
    pub x: String,
    pub y: String,
    pub dim_quotient: usize,
    pub dim_lambda: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StrongIdempotency {
    CertifiedYes {
        cert: StrongCert,
        /// Pairs and degrees where the definition was recomputed directly.
        spot_checks: usize,
        spot_failures: usize,
    },
    CertifiedNo { witness: ExtMismatch },
    Unknown { bound: usize },
}

impl StrongIdempotency {
    pub fn is_yes(&self) -> bool {
        matches!(self, StrongIdempotency::CertifiedYes { .. })
    }
}

const SWEEP_DEPTH: usize = 6;
const SPOT_DEPTH: usize = 3;

impl<F: Field> IdealContext<F> {
    /// Complement vertices are convex: no Gabriel-quiver path leaves and re-enters them.
    pub fn complement_is_convex(&self) -> bool {
        let n = self.lambda.num_vertices();
        let arrows = self.lambda.gabriel_arrows();
        // Vertices of S reachable from the complement, then whether the complement is reachable from them.
        let mut from_c = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        for &(a, b) in &arrows {
            if !self.in_subset(a) && self.in_subset(b) && !from_c[b] {
                from_c[b] = true;
                stack.push(b);
            }
        }
        while let Some(v) = stack.pop() {
            for &(a, b) in &arrows {
                if a == v && self.in_subset(b) && !from_c[b] {
                    from_c[b] = true;
                    stack.push(b);
                }
            }
        }
        !arrows
            .iter()
            .any(|&(a, b)| from_c[a] && self.in_subset(a) && !self.in_subset(b))
    }

    pub fn strong_idempotency(&self, bound: usize) -> StrongIdempotency {
        let cert = if self.ideal_module.is_projective() {
            Some(StrongCert::ProjectiveIdeal)
        } else if self.complement_is_convex() {
            Some(StrongCert::ConvexComplement)
        } else {
            match self.membership(&self.ideal_module, Which::PInf, bound) {
                Membership::Yes { checked_through, .. } => Some(StrongCert::IdealInPInf { checked_through }),
                _ => None,
            }
        };
        if let Some(cert) = cert {
            let (spot_checks, spot_failures) = self.spot_check(SPOT_DEPTH);
            return StrongIdempotency::CertifiedYes {
                cert,
                spot_checks,
                spot_failures,
            };
        }
        match self.ext_sweep(&self.quotient_simples(), bound.min(SWEEP_DEPTH)).1 {
            Some(w) => StrongIdempotency::CertifiedNo { witness: w },
            None => StrongIdempotency::Unknown { bound },
        }
    }

    fn quotient_simples(&self) -> Vec<(String, Module<F>)> {
        let q = self.quotient_algebra();
        (0..q.num_vertices())
            .map(|v| (format!("S({})", q.vertices()[v]), Module::simple(q, v)))
            .collect()
    }

    /// Compares Ext dimensions over `Λ/𝔄` and over `Λ` for all pairs, degrees `1..=depth`.
    fn ext_sweep(&self, mods: &[(String, Module<F>)], depth: usize) -> (usize, Option<ExtMismatch>) {
        let mut count = 0;
        for (xl, x) in mods {
            let xi = self.inflate(x);
            for (yl, y) in mods {
                let yi = self.inflate(y);
                for i in 1..=depth {
                    let (Ok(a), Ok(b)) = (self.ws.ext_dim(x, y, i), self.ws.ext_dim(&xi, &yi, i)) else {
                        continue;
                    };
                    count += 1;
                    if a != b {
                        return (
                            count,
                            Some(ExtMismatch {
                                degree: i,
                                x: xl.clone(),
                                y: yl.clone(),
                                dim_quotient: a,
                                dim_lambda: b,
                            }),
                        );
                    }
                }
            }
        }
        (count, None)
    }

    fn spot_check(&self, depth: usize) -> (usize, usize) {
        let q = self.quotient_algebra();
        let mut mods = self.quotient_simples();
        for v in 0..q.num_vertices() {
            mods.push((format!("P({})", q.vertices()[v]), Module::projective(q, v)));
            mods.push((format!("I({})", q.vertices()[v]), Module::injective(q, v)));
        }
        let (count, bad) = self.ext_sweep(&mods, depth);
        (count, usize::from(bad.is_some()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlueSide {
    /// `0 -> τ_𝔄 M -> M -> M/τ_𝔄 M -> 0`.
    P0,
    /// `0 -> τ_{Λ/𝔄} M -> M -> M/τ_{Λ/𝔄} M -> 0`.
    I0,
}

#[derive(Clone, Debug)]
pub struct Glueing<F: Field> {
    pub side: GlueSide,
    pub sub: Submodule<F>,
    pub quotient: QuotientModule<F>,
    /// Dimensions add up and the composite vanishes.
    pub exact: bool,
    /// The submodule lies in the torsion class.
    pub sub_ok: bool,
    /// The quotient lies in the torsion-free class.
    pub quotient_ok: bool,
    /// For the I0 side: annihilator equals the trace of `Λ/𝔄`.
    pub trace_agrees: Option<bool>,
}

impl<F: Field> IdealContext<F> {
    pub fn tau_ideal(&self, m: &Module<F>) -> Submodule<F> {
        m.ideal_times(self.ideal_vectors())
    }

    pub fn tau_quotient(&self, m: &Module<F>) -> Submodule<F> {
        m.annihilated_by(self.ideal_vectors())
    }

    /// Trace of `Λ/𝔄` in `M` as the sum of images of all maps.
    pub fn trace_of_quotient(&self, m: &Module<F>) -> Vec<Subspace<F>> {
        let f = self.field();
        let mut spaces: Vec<Subspace<F>> = m.dims().iter().map(|&d| Subspace::new(f, d)).collect();
        for h in hom_basis(&self.quotient_module, m) {
            for (v, b) in h.blocks.iter().enumerate() {
                for j in 0..b.cols() {
                    spaces[v].insert(&b.col(j));
                }
            }
        }
        spaces
    }

    pub fn glueing(&self, m: &Module<F>, side: GlueSide) -> Glueing<F> {
        let (sub, trace_agrees) = match side {
            GlueSide::P0 => (self.tau_ideal(m), None),
            GlueSide::I0 => {
                let s = self.tau_quotient(m);
                let t = self.trace_of_quotient(m);
                let agree = s
                    .spaces
                    .iter()
                    .zip(&t)
                    .all(|(a, b)| a.dim() == b.dim() && b.basis().iter().all(|x| a.contains(x)));
                (s, Some(agree))
            }
        };
        let quotient = m.quotient_by(&sub.spaces);
        let exact = sub.module.dim() + quotient.module.dim() == m.dim()
            && sub.inclusion.is_injective()
            && quotient.projection.is_surjective()
            && quotient.projection.compose(&sub.inclusion).is_zero();
        let (sub_ok, quotient_ok) = match side {
            GlueSide::P0 => (
                sub.module.top_dims().iter().enumerate().all(|(v, &d)| d == 0 || self.in_subset(v)),
                quotient
                    .module
                    .element_action_all_zero(self.ideal_vectors()),
            ),
            GlueSide::I0 => (
                sub.module.element_action_all_zero(self.ideal_vectors()),
                quotient
                    .module
                    .socle_dims()
                    .iter()
                    .enumerate()
                    .all(|(v, &d)| d == 0 || self.in_subset(v)),
            ),
        };
        Glueing {
            side,
            sub,
            quotient,
            exact,
            sub_ok,
            quotient_ok,
            trace_agrees,
        }
    }
}

impl<F: Field> Module<F> {
    /// Whether every given algebra element acts as zero.
    pub fn element_action_all_zero(&self, elems: &[Vec<F::Elem>]) -> bool {
        elems.iter().all(|a| self.element_action(a).is_zero())
    }
}

/// A numeric quantity that may be infinite or undetermined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Quantity {
    Finite(usize),
    Infinite,
    Unknown,
}

impl Quantity {
    pub fn add(self, other: Quantity) -> Quantity {
        use Quantity::*;
        match (self, other) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (Infinite, _) | (_, Infinite) => Infinite,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
    pub fn max(self, other: Quantity) -> Quantity {
        use Quantity::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Unknown, _) | (_, Unknown) => Unknown,
            (Finite(a), Finite(b)) => Finite(a.max(b)),
        }
    }
    pub fn finite(self) -> Option<usize> {
        match self {
            Quantity::Finite(n) => Some(n),
            _ => None,
        }
    }
}

impl From<&PdResult> for Quantity {
    fn from(p: &PdResult) -> Self {
        match p {
            PdResult::Finite(n) => Quantity::Finite(*n),
            PdResult::Infinite(_) => Quantity::Infinite,
            PdResult::Unknown(_) => Quantity::Unknown,
        }
    }
}

impl From<&GlobalDimension> for Quantity {
    fn from(g: &GlobalDimension) -> Self {
        match g {
            GlobalDimension::Finite(n) => Quantity::Finite(*n),
            GlobalDimension::Infinite(_) => Quantity::Infinite,
            GlobalDimension::Unknown(_) => Quantity::Unknown,
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantity::Finite(n) => write!(f, "{n}"),
            Quantity::Infinite => write!(f, "inf"),
            Quantity::Unknown => write!(f, "unknown"),
        }
    }
}

/// Ingredients of the bounds, each computed independently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ingredients {
    pub strong: StrongIdempotency,
    /// `pd` of `Λ/𝔄` as a left module.
    pub pd_quotient_left: Quantity,
    /// `pd` of `Λ/𝔄` as a right module.
    pub pd_quotient_right: Quantity,
    pub gld_corner: Quantity,
    pub gld_quotient: Quantity,
    pub quotient_selfinjective: bool,
    pub corner_selfinjective: bool,
    pub phi_r_dim_quotient: Quantity,
    pub phi_l_dim_corner: Quantity,
    pub phi_r_dim_corner: Quantity,
}

/// φ-dimension of an algebra where it is known exactly: 0 when selfinjective, `gld` when finite.
pub fn phi_dim_exact(selfinjective: bool, gld: Quantity) -> Quantity {
    if selfinjective {
        Quantity::Finite(0)
    } else if let Quantity::Finite(n) = gld {
        Quantity::Finite(n)
    } else {
        Quantity::Unknown
    }
}

/// Global dimension, with the zero algebra at 0.
pub fn gld_of<F: Field>(ws: &Workspace<F>, alg: &Arc<AlgebraTable<F>>, bound: usize) -> Quantity {
    if alg.num_vertices() == 0 {
        return Quantity::Finite(0);
    }
    match ws.global_dimension(alg, bound) {
        Ok(g) => Quantity::from(&g),
        Err(_) => Quantity::Unknown,
    }
}

/// φ-dimension of an algebra where it is known exactly.
pub fn algebra_phi_dim<F: Field>(ws: &Workspace<F>, alg: &Arc<AlgebraTable<F>>, bound: usize) -> Quantity {
    if alg.num_vertices() == 0 {
        return Quantity::Finite(0);
    }
    phi_dim_exact(is_selfinjective(alg), gld_of(ws, alg, bound))
}

impl<F: Field> IdealContext<F> {
    pub fn pd_quotient_left(&self, bound: usize) -> Result<PdResult, ModuleError> {
        self.ws.pd(&self.quotient_module, bound)
    }

    pub fn pd_quotient_right(&self, bound: usize) -> Result<PdResult, ModuleError> {
        self.mirror().pd_quotient_left(bound)
    }

    pub fn ingredients(&self, bound: usize) -> Result<Ingredients, ModuleError> {
        let q = self.quotient_algebra();
        let gld_corner = gld_of(&self.ws, self.gamma(), bound);
        let gld_quotient = gld_of(&self.ws, q, bound);
        let quotient_selfinjective = is_selfinjective(q);
        let corner_selfinjective = is_selfinjective(self.gamma());
        Ok(Ingredients {
            strong: self.strong_idempotency(bound),
            pd_quotient_left: Quantity::from(&self.pd_quotient_left(bound)?),
            pd_quotient_right: Quantity::from(&self.pd_quotient_right(bound)?),
            gld_corner,
            gld_quotient,
            quotient_selfinjective,
            corner_selfinjective,
            phi_r_dim_quotient: phi_dim_exact(quotient_selfinjective, gld_quotient),
            phi_l_dim_corner: phi_dim_exact(corner_selfinjective, gld_corner),
            phi_r_dim_corner: phi_dim_exact(corner_selfinjective, gld_corner),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FormulaStatus {
    Pass,
    Fail,
    /// The formula as printed in the literature is violated; see the shifted variant.
    Refuted,
    Unknown { reason: String },
    NotApplicable { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub module: String,
    pub lhs: usize,
    pub rhs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaRecord {
    pub id: String,
    pub anchor: String,
    pub ingredients: BTreeMap<String, Quantity>,
    pub rhs: Quantity,
    pub status: FormulaStatus,
    /// Corpus modules whose φ value was compared with the right-hand side.
    pub checked_modules: usize,
    /// Largest φ value over the checked modules; a lower bound for a φ-dimension.
    pub lhs_lower_bound: Option<usize>,
    pub violations: Vec<Violation>,
    /// A reference value supplied by the caller, such as a value printed in the literature.
    pub printed: Option<usize>,
    pub printed_agrees: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ingredients: Ingredients,
    pub formulas: Vec<FormulaRecord>,
}

impl BoundReport {
    pub fn formula(&self, id: &str) -> Option<&FormulaRecord> {
        self.formulas.iter().find(|r| r.id == id)
    }
    pub fn has_failures(&self) -> bool {
        self.formulas.iter().any(|r| r.status == FormulaStatus::Fail)
    }
    pub fn has_unknowns(&self) -> bool {
        self.formulas
            .iter()
            .any(|r| matches!(r.status, FormulaStatus::Unknown { .. }))
    }
}

#[derive(Clone, Debug, Default)]
pub struct BoundConfig {
    pub bound: usize,
    pub max_steps: usize,
    /// Reference values keyed by formula id.
    pub printed: BTreeMap<String, usize>,
}

/// Per-module φ values, computed once for a corpus.
struct PhiTable {
    left: Vec<(usize, bool)>,
    right: Vec<(usize, bool)>,
}

/// Which corpus modules a formula quantifies over.
enum Scope {
    All,
    InT,
    InTTilde,
    Ingredients,
}

struct Spec {
    id: &'static str,
    anchor: &'static str,
    right: bool,
    scope: Scope,
    needs_gld_quotient: bool,
    /// Violations are reported as [`FormulaStatus::Refuted`] rather than failures.
    printed_form: bool,
}

const SPECS: &[Spec] = &[
    Spec {
        id: "pd_quotient_le_gld_corner_plus_one",
        anchor: "pd_Λ(Λ/𝔄) ≤ gld Γ + 1 and pd(Λ/𝔄)_Λ ≤ gld Γ + 1 for a strong idempotent 𝔄",
        right: false,
        scope: Scope::Ingredients,
        needs_gld_quotient: false,
        printed_form: false,
    },
    Spec {
        id: "phi_r_on_t_gld_corner",
        anchor: "φ_r dim 𝕋 ≤ max{ gld Γ + 1, φ_r dim(Λ/𝔄) + pd(Λ/𝔄)_Λ }",
        right: true,
        scope: Scope::InT,
        needs_gld_quotient: false,
        printed_form: false,
    },
    Spec {
        id: "phi_r_dim_gld_corner",
        anchor: "φ_r dim Λ ≤ pd_Λ(Λ/𝔄) + max{ gld Γ + 1, pd(Λ/𝔄)_Λ + φ_r dim(Λ/𝔄) }",
        right: true,
        scope: Scope::All,
        needs_gld_quotient: false,
        printed_form: false,
    },
    Spec {
        id: "phi_r_module_gld_quotient",
        anchor: "φ_r(T) ≤ max{ gld(Λ/𝔄) + pd(Λ/𝔄)_Λ + 1, φ_r(T/τ_{Λ/𝔄} T) }",
        right: true,
        scope: Scope::All,
        needs_gld_quotient: true,
        printed_form: false,
    },
    Spec {
        id: "phi_r_on_t_gld_quotient",
        anchor: "φ_r dim 𝕋 ≤ max{ gld(Λ/𝔄) + pd(Λ/𝔄)_Λ + 1, φ_r dim Γ }",
        right: true,
        scope: Scope::InT,
        needs_gld_quotient: true,
        printed_form: false,
    },
    Spec {
        id: "phi_r_dim_gld_quotient",
        anchor: "φ_r dim Λ ≤ pd_Λ(Λ/𝔄) + max{ gld(Λ/𝔄) + pd(Λ/𝔄)_Λ + 1, φ_r dim Γ }",
        right: true,
        scope: Scope::All,
        needs_gld_quotient: true,
        printed_form: false,
    },
    Spec {
        id: "phi_l_on_ttilde_gld_quotient",
        anchor: "φ_l dim 𝕋̃ ≤ gld(Λ/𝔄) + φ_l dim Γ",
        right: false,
        scope: Scope::InTTilde,
        needs_gld_quotient: true,
        printed_form: true,
    },
    Spec {
        id: "phi_l_on_ttilde_gld_quotient_shifted",
        anchor: "φ_l dim 𝕋̃ ≤ gld(Λ/𝔄) + 1 + φ_l dim Γ",
        right: false,
        scope: Scope::InTTilde,
        needs_gld_quotient: true,
        printed_form: false,
    },
    Spec {
        id: "phi_l_dim_gld_quotient",
        anchor: "φ_l dim Λ ≤ pd(Λ/𝔄)_Λ + gld(Λ/𝔄) + φ_l dim Γ",
        right: false,
        scope: Scope::All,
        needs_gld_quotient: true,
        printed_form: true,
    },
    Spec {
        id: "phi_l_dim_gld_quotient_shifted",
        anchor: "φ_l dim Λ ≤ pd(Λ/𝔄)_Λ + gld(Λ/𝔄) + 1 + φ_l dim Γ",
        right: false,
        scope: Scope::All,
        needs_gld_quotient: true,
        printed_form: false,
    },
];

impl<F: Field> IdealContext<F> {
    pub fn bound_report(&self, corpus: &[(String, Module<F>)], cfg: &BoundConfig) -> Result<BoundReport, ModuleError> {
        let ing = self.ingredients(cfg.bound)?;
        let mut table = PhiTable {
            left: Vec::new(),
            right: Vec::new(),
        };
        for (_, m) in corpus {
            let l = phi_l(&self.ws, m, cfg.max_steps)?;
            let r = phi_r(&self.ws, m, cfg.max_steps)?;
            table.left.push((l.phi, l.certified));
            table.right.push((r.phi, r.certified));
        }
        let mut in_t = Vec::new();
        let mut in_tt = Vec::new();
        for (_, m) in corpus {
            in_t.push(self.membership(m, Which::T, cfg.bound).is_yes());
            in_tt.push(self.membership(m, Which::TTilde, cfg.bound).is_yes());
        }
        let mut formulas = Vec::new();
        for spec in SPECS {
            formulas.push(self.evaluate(spec, &ing, corpus, &table, &in_t, &in_tt, cfg)?);
        }
        Ok(BoundReport {
            ingredients: ing,
            formulas,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn evaluate(
        &self,
        spec: &Spec,
        ing: &Ingredients,
        corpus: &[(String, Module<F>)],
        table: &PhiTable,
        in_t: &[bool],
        in_tt: &[bool],
        cfg: &BoundConfig,
    ) -> Result<FormulaRecord, ModuleError> {
        use Quantity::Finite;
        let mut ingredients = BTreeMap::new();
        let one = Finite(1);
        let shift = Finite(usize::from(spec.id.ends_with("_shifted")));
        let rhs = match spec.id {
            "pd_quotient_le_gld_corner_plus_one" => {
                ingredients.insert("gld_corner".into(), ing.gld_corner);
                ingredients.insert("pd_quotient_left".into(), ing.pd_quotient_left);
                ingredients.insert("pd_quotient_right".into(), ing.pd_quotient_right);
                ing.gld_corner.add(one)
            }
            "phi_r_on_t_gld_corner" => {
                ingredients.insert("gld_corner".into(), ing.gld_corner);
                ingredients.insert("phi_r_dim_quotient".into(), ing.phi_r_dim_quotient);
                ingredients.insert("pd_quotient_right".into(), ing.pd_quotient_right);
                ing.gld_corner.add(one).max(ing.phi_r_dim_quotient.add(ing.pd_quotient_right))
            }
            "phi_r_dim_gld_corner" => {
                ingredients.insert("pd_quotient_left".into(), ing.pd_quotient_left);
                ingredients.insert("gld_corner".into(), ing.gld_corner);
                ingredients.insert("pd_quotient_right".into(), ing.pd_quotient_right);
                ingredients.insert("phi_r_dim_quotient".into(), ing.phi_r_dim_quotient);
                ing.pd_quotient_left.add(
                    ing.gld_corner
                        .add(one)
                        .max(ing.pd_quotient_right.add(ing.phi_r_dim_quotient)),
                )
            }
            "phi_r_module_gld_quotient" => {
                ingredients.insert("gld_quotient".into(), ing.gld_quotient);
                ingredients.insert("pd_quotient_right".into(), ing.pd_quotient_right);
                // The second term depends on the module; the fixed part is reported here.
                ing.gld_quotient.add(ing.pd_quotient_right).add(one)
            }
            "phi_r_on_t_gld_quotient" => {
                ingredients.insert("gld_quotient".into(), ing.gld_quotient);
                ingredients.insert("pd_quotient_right".into(), ing.pd_quotient_right);
                ingredients.insert("phi_r_dim_corner".into(), ing.phi_r_dim_corner);
                ing.gld_quotient
                    .add(ing.pd_quotient_right)
                    .add(one)
                    .max(ing.phi_r_dim_corner)
            }
            "phi_r_dim_gld_quotient" => {
                ingredients.insert("pd_quotient_left".into(), ing.pd_quotient_left);
                ingredients.insert("gld_quotient".into(), ing.gld_quotient);
                ingredients.insert("pd_quotient_right".into(), ing.pd_quotient_right);
                ingredients.insert("phi_r_dim_corner".into(), ing.phi_r_dim_corner);
                ing.pd_quotient_left.add(
                    ing.gld_quotient
                        .add(ing.pd_quotient_right)
                        .add(one)
                        .max(ing.phi_r_dim_corner),
                )
            }
            "phi_l_on_ttilde_gld_quotient" | "phi_l_on_ttilde_gld_quotient_shifted" => {
                ingredients.insert("gld_quotient".into(), ing.gld_quotient);
                ingredients.insert("phi_l_dim_corner".into(), ing.phi_l_dim_corner);
                ing.gld_quotient.add(ing.phi_l_dim_corner).add(shift)
            }
            "phi_l_dim_gld_quotient" | "phi_l_dim_gld_quotient_shifted" => {
                ingredients.insert("pd_quotient_right".into(), ing.pd_quotient_right);
                ingredients.insert("gld_quotient".into(), ing.gld_quotient);
                ingredients.insert("phi_l_dim_corner".into(), ing.phi_l_dim_corner);
                ing.pd_quotient_right
                    .add(ing.gld_quotient)
                    .add(ing.phi_l_dim_corner)
                    .add(shift)
            }
            other => unreachable!("unknown formula {other}"),
        };
        let printed = cfg.printed.get(spec.id).copied();
        let mut rec = FormulaRecord {
            id: spec.id.into(),
            anchor: spec.anchor.into(),
            ingredients,
            rhs,
            status: FormulaStatus::Pass,
            checked_modules: 0,
            lhs_lower_bound: None,
            violations: Vec::new(),
            printed,
            printed_agrees: printed.map(|p| rhs == Finite(p)),
        };
        if !ing.strong.is_yes() {
            rec.status = FormulaStatus::NotApplicable {
                reason: "ideal not certified strong idempotent".into(),
            };
            return Ok(rec);
        }
        if spec.needs_gld_quotient && ing.gld_quotient.finite().is_none() {
            rec.status = match ing.gld_quotient {
                Quantity::Infinite => FormulaStatus::NotApplicable {
                    reason: "gld(Λ/𝔄) is infinite".into(),
                },
                _ => FormulaStatus::Unknown {
                    reason: "gld(Λ/𝔄) undetermined".into(),
                },
            };
            return Ok(rec);
        }
        if let Scope::Ingredients = spec.scope {
            let lhs = ing.pd_quotient_left.max(ing.pd_quotient_right);
            rec.status = match (lhs, rhs) {
                (Finite(l), Finite(r)) if l <= r => FormulaStatus::Pass,
                (Finite(l), Finite(r)) => {
                    rec.violations.push(Violation {
                        module: "Λ/𝔄".into(),
                        lhs: l,
                        rhs: r,
                    });
                    FormulaStatus::Fail
                }
                (_, Quantity::Infinite) => FormulaStatus::Pass,
                _ => FormulaStatus::Unknown {
                    reason: "an ingredient is undetermined".into(),
                },
            };
            return Ok(rec);
        }
        if rhs == Quantity::Unknown {
            rec.status = FormulaStatus::Unknown {
                reason: "an ingredient is undetermined".into(),
            };
            return Ok(rec);
        }
        let phis = if spec.right { &table.right } else { &table.left };
        let mut lhs_max = 0;
        for (i, (label, m)) in corpus.iter().enumerate() {
            let member = match spec.scope {
                Scope::InT => in_t[i],
                Scope::InTTilde => in_tt[i],
                _ => true,
            };
            if !member {
                continue;
            }
            let (phi, _) = phis[i];
            let bound_here = if spec.id == "phi_r_module_gld_quotient" {
                let g = self.glueing(m, GlueSide::I0);
                let t = phi_r(&self.ws, &g.quotient.module, cfg.max_steps)?;
                if !t.certified {
                    continue;
                }
                rhs.max(Finite(t.phi))
            } else {
                rhs
            };
            rec.checked_modules += 1;
            lhs_max = lhs_max.max(phi);
            // Uncertified φ values are lower bounds, so a violation is still sound.
            if let Finite(r) = bound_here {
                if phi > r {
                    rec.violations.push(Violation {
                        module: label.clone(),
                        lhs: phi,
                        rhs: r,
                    });
                }
            }
        }
        rec.lhs_lower_bound = Some(lhs_max);
        rec.status = if !rec.violations.is_empty() && spec.printed_form {
            FormulaStatus::Refuted
        } else if !rec.violations.is_empty() {
            FormulaStatus::Fail
        } else if rec.checked_modules == 0 {
            FormulaStatus::NotApplicable {
                reason: "no qualifying corpus modules".into(),
            }
        } else {
            FormulaStatus::Pass
        };
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::syzygy;
    use crate::module::tests::{algebra, f1, f2};

    #[test]
    fn f2_context() {
        let a = f2();
        let ctx = IdealContext::build(&a, &[2, 3, 4]).unwrap();
        assert_eq!(ctx.ideal.dim(), 11);
        assert_eq!(ctx.quotient_algebra().dim(), 4);
        assert_eq!(ctx.gamma().dim(), 5);
        assert!(ctx.strong_idempotency(20).is_yes());
        assert!(ctx.membership(&Module::simple(&a, 4), Which::PInf, 20).is_yes());
        assert_eq!(ctx.pd_quotient_left(20).unwrap(), PdResult::Finite(2));
        assert_eq!(ctx.pd_quotient_right(20).unwrap(), PdResult::Finite(1));
        assert!(is_selfinjective(ctx.quotient_algebra()));
        assert_eq!(gld_of(&Workspace::new(), ctx.gamma(), 10), Quantity::Finite(1));
    }

    #[test]
    fn f2_glueing_of_p3() {
        let a = f2();
        let ctx = IdealContext::build(&a, &[2, 3, 4]).unwrap();
        let g = ctx.glueing(&Module::projective(&a, 2), GlueSide::I0);
        assert!(g.exact && g.sub_ok && g.quotient_ok);
        assert_eq!(g.trace_agrees, Some(true));
        assert_eq!(g.sub.module.dims(), &[1, 1, 0, 0, 0]);
        assert_eq!(g.quotient.module.dim(), 2);
        let p = ctx.glueing(&Module::projective(&a, 2), GlueSide::P0);
        assert!(p.exact && p.sub_ok && p.quotient_ok);
        assert_eq!(p.sub.module.dim(), 4);
    }

    #[test]
    fn f1_torsion_class() {
        let a = f1();
        let ctx = IdealContext::build(&a, &[1]).unwrap();
        let d = ctx.ideal_module.decompose().unwrap();
        assert_eq!(d.summands.len(), 1);
        assert_eq!(d.summands[0].1, 2);
        assert!(d.summands[0].0.is_isomorphic(&Module::simple(&a, 1)).unwrap());
        assert!(matches!(
            ctx.strong_idempotency(10),
            StrongIdempotency::CertifiedYes { cert: StrongCert::ProjectiveIdeal, .. }
        ));
        assert!(ctx.membership(&Module::projective(&a, 0), Which::T, 10).is_yes());
        assert!(ctx.membership(&Module::simple(&a, 0), Which::T, 10).is_yes());
        match ctx.membership(&Module::simple(&a, 1), Which::T, 10) {
            Membership::No { stage, .. } => assert_eq!(stage, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn f1_refutes_unshifted_left_bounds() {
        let a = f1();
        let ctx = IdealContext::build(&a, &[1]).unwrap();
        let corpus: Vec<_> = (0..2).map(|v| (format!("S{v}"), Module::simple(&a, v))).collect();
        let cfg = BoundConfig {
            bound: 20,
            max_steps: 50,
            ..Default::default()
        };
        let r = ctx.bound_report(&corpus, &cfg).unwrap();
        assert_eq!(r.ingredients.pd_quotient_right, Quantity::Finite(0));
        for id in ["phi_l_on_ttilde_gld_quotient", "phi_l_dim_gld_quotient"] {
            let rec = r.formula(id).unwrap();
            assert_eq!(rec.status, FormulaStatus::Refuted);
            assert_eq!(rec.violations[0].module, "S0");
            let shifted = r.formula(&format!("{id}_shifted")).unwrap();
            assert_eq!(shifted.status, FormulaStatus::Pass);
            assert_eq!(shifted.rhs, Quantity::Finite(1));
        }
        assert!(!r.has_failures());
    }

    #[test]
    fn two_cycle_refuted() {
        let a = algebra(&["1", "2"], &[("a", "1", "2"), ("b", "2", "1")], &[&["a", "b"], &["b", "a"]]);
        let ctx = IdealContext::build(&a, &[1]).unwrap();
        match ctx.strong_idempotency(10) {
            StrongIdempotency::CertifiedNo { witness } => {
                assert_eq!(witness.degree, 2);
                assert_eq!((witness.dim_lambda, witness.dim_quotient), (1, 0));
            }
            other => panic!("{other:?}"),
        }
        assert!(syzygy(&Module::simple(&a, 0), 2).is_isomorphic(&Module::simple(&a, 0)).unwrap());
    }

    #[test]
    fn whole_vertex_set() {
        let a = f2();
        let ctx = IdealContext::build(&a, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(ctx.ideal.dim(), 15);
        assert_eq!(ctx.quotient_algebra().dim(), 0);
        assert_eq!(ctx.gamma().dim(), 15);
        assert!(ctx.strong_idempotency(10).is_yes());
    }

    #[test]
    fn f2_bound_report() {
        let a = f2();
        let ctx = IdealContext::build(&a, &[2, 3, 4]).unwrap();
        let mut corpus = Vec::new();
        for v in 0..5 {
            corpus.push((format!("S{v}"), Module::simple(&a, v)));
            corpus.push((format!("P{v}"), Module::projective(&a, v)));
            corpus.push((format!("I{v}"), Module::injective(&a, v)));
        }
        let mut cfg = BoundConfig {
            bound: 20,
            max_steps: 50,
            ..Default::default()
        };
        cfg.printed.insert("phi_r_dim_gld_corner".into(), 5);
        let r = ctx.bound_report(&corpus, &cfg).unwrap();
        let rec = r.formula("phi_r_dim_gld_corner").unwrap();
        assert_eq!(rec.rhs, Quantity::Finite(4));
        assert_eq!(rec.status, FormulaStatus::Pass);
        assert_eq!(rec.printed_agrees, Some(false));
        assert!(!r.has_failures());
    }
}

//! Registry of indecomposable isomorphism classes with cached syzygy data.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraTable;
use crate::homology::{cosyzygy, ext_dim, syzygy, GlobalDimension, InfiniteCert, PdResult};
use crate::linalg::Field;
use crate::module::{hom_dim, iso_indecomposable, Module, ModuleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ClassId(pub usize);

/// Multiplicities of nonprojective (or noninjective) indecomposable classes.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct K0Vector(pub BTreeMap<ClassId, BigUint>);

impl K0Vector {
    pub fn unit(c: ClassId) -> Self {
        K0Vector([(c, BigUint::one())].into_iter().collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&mut self, other: &K0Vector) {
        self.add_scaled(other, &BigUint::one());
    }

    pub fn add_scaled(&mut self, other: &K0Vector, k: &BigUint) {
        if k.is_zero() {
            return;
        }
        for (c, m) in &other.0 {
            *self.0.entry(*c).or_default() += m * k;
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.0.keys().copied()
    }
}

/// Which indecomposables a K0 vector ignores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Syzygy side: projectives are zero.
    Projective,
    /// Cosyzygy side: injectives are zero.
    Injective,
}

type Key = (Vec<usize>, Vec<usize>, Vec<usize>);

struct ClassEntry<F: Field> {
    rep: Module<F>,
    projective: bool,
    injective: bool,
    omega: Option<Vec<(ClassId, usize)>>,
    omega_inv: Option<Vec<(ClassId, usize)>>,
}

struct Inner<F: Field> {
    classes: Vec<ClassEntry<F>>,
    buckets: HashMap<Key, Vec<usize>>,
    pd: HashMap<ClassId, PdResult>,
}

/// Canonical ids for indecomposable classes over one algebra.
pub struct IsoClassRegistry<F: Field> {
    alg: Arc<AlgebraTable<F>>,
    inner: Mutex<Inner<F>>,
    /// Modules above this dimension are refused instead of decomposed.
    dim_cap: Option<usize>,
}

fn key_of<F: Field>(m: &Module<F>) -> Key {
    (m.dims().to_vec(), m.top_dims(), m.socle_dims())
}

impl<F: Field> IsoClassRegistry<F> {
    pub fn new(alg: &Arc<AlgebraTable<F>>) -> Self {
        Self::with_dim_cap(alg, None)
    }

    pub fn with_dim_cap(alg: &Arc<AlgebraTable<F>>, dim_cap: Option<usize>) -> Self {
        Self {
            dim_cap,
            alg: alg.clone(),
            inner: Mutex::new(Inner {
                classes: Vec::new(),
                buckets: HashMap::new(),
                pd: HashMap::new(),
            }),
        }
    }

    pub fn algebra(&self) -> &Arc<AlgebraTable<F>> {
        &self.alg
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn representative(&self, c: ClassId) -> Module<F> {
        self.inner.lock().unwrap().classes[c.0].rep.clone()
    }

    pub fn is_projective(&self, c: ClassId) -> bool {
        self.inner.lock().unwrap().classes[c.0].projective
    }

    pub fn is_injective(&self, c: ClassId) -> bool {
        self.inner.lock().unwrap().classes[c.0].injective
    }

    fn ignored(&self, c: ClassId, side: Side) -> bool {
        match side {
            Side::Projective => self.is_projective(c),
            Side::Injective => self.is_injective(c),
        }
    }

    /// Id of an indecomposable module, inserting a new class when none matches.
    pub fn register(&self, m: &Module<F>) -> ClassId {
        let key = key_of(m);
        let mut inner = self.inner.lock().unwrap();
        if let Some(bucket) = inner.buckets.get(&key) {
            for &i in bucket {
                if iso_indecomposable(&inner.classes[i].rep, m).is_some() {
                    return ClassId(i);
                }
            }
        }
        let id = inner.classes.len();
        inner.classes.push(ClassEntry {
            rep: m.clone(),
            projective: m.is_projective(),
            injective: m.is_injective(),
            omega: None,
            omega_inv: None,
        });
        inner.buckets.entry(key).or_default().push(id);
        ClassId(id)
    }

    /// All indecomposable summand classes of `m` with multiplicities, projectives included.
    pub fn summands(&self, m: &Module<F>) -> Result<Vec<(ClassId, usize)>, ModuleError> {
        if let Some(cap) = self.dim_cap.filter(|&c| m.dim() > c) {
            return Err(ModuleError::TooLarge { dim: m.dim(), cap });
        }
        let d = m.decompose()?;
        let mut out: BTreeMap<ClassId, usize> = BTreeMap::new();
        for (rep, k) in &d.summands {
            *out.entry(self.register(rep)).or_insert(0) += k;
        }
        Ok(out.into_iter().collect())
    }

    /// `[M]` with projective classes dropped.
    pub fn class_vector(&self, m: &Module<F>) -> Result<K0Vector, ModuleError> {
        self.class_vector_on(m, Side::Projective)
    }

    pub fn class_vector_on(&self, m: &Module<F>, side: Side) -> Result<K0Vector, ModuleError> {
        let mut v = K0Vector::default();
        for (c, k) in self.summands(m)? {
            if !self.ignored(c, side) {
                v.0.insert(c, BigUint::from(k));
            }
        }
        Ok(v)
    }

    fn cached_step(&self, c: ClassId, side: Side) -> Result<Vec<(ClassId, usize)>, ModuleError> {
        {
            let inner = self.inner.lock().unwrap();
            let e = &inner.classes[c.0];
            let hit = match side {
                Side::Projective => &e.omega,
                Side::Injective => &e.omega_inv,
            };
            if let Some(v) = hit {
                return Ok(v.clone());
            }
        }
        let rep = self.representative(c);
        let next = match side {
            Side::Projective => syzygy(&rep, 1),
            Side::Injective => cosyzygy(&rep, 1),
        };
        let all = self.summands(&next)?;
        let mut inner = self.inner.lock().unwrap();
        let e = &mut inner.classes[c.0];
        match side {
            Side::Projective => e.omega = Some(all.clone()),
            Side::Injective => e.omega_inv = Some(all.clone()),
        }
        Ok(all)
    }

    /// All summand classes of `Ω X` for the class of `X`, projectives included.
    pub fn omega_summands(&self, c: ClassId) -> Result<Vec<(ClassId, usize)>, ModuleError> {
        self.cached_step(c, Side::Projective)
    }

    /// `[Ω X]` in K0.
    pub fn omega(&self, c: ClassId) -> Result<K0Vector, ModuleError> {
        self.step(c, Side::Projective)
    }

    /// `[Ω^{-1} X]` with injective classes dropped.
    pub fn omega_inv(&self, c: ClassId) -> Result<K0Vector, ModuleError> {
        self.step(c, Side::Injective)
    }

    pub fn step(&self, c: ClassId, side: Side) -> Result<K0Vector, ModuleError> {
        if self.ignored(c, side) {
            return Ok(K0Vector::default());
        }
        let mut v = K0Vector::default();
        for (d, k) in self.cached_step(c, side)? {
            if !self.ignored(d, side) {
                v.0.insert(d, BigUint::from(k));
            }
        }
        Ok(v)
    }

    /// Applies the syzygy (or cosyzygy) map linearly.
    pub fn apply(&self, x: &K0Vector, side: Side) -> Result<K0Vector, ModuleError> {
        let mut out = K0Vector::default();
        for (c, k) in &x.0 {
            out.add_scaled(&self.step(*c, side)?, k);
        }
        Ok(out)
    }

    /// Projective dimension of a class from the graph of nonprojective syzygy summands.
    /// Explores at most `bound` levels below the class.
    pub fn pd_of_class(&self, c: ClassId, bound: usize) -> Result<PdResult, ModuleError> {
        if let Some(r) = self.inner.lock().unwrap().pd.get(&c) {
            return Ok(r.clone());
        }
        if self.is_projective(c) {
            return Ok(PdResult::Finite(0));
        }
        // Depth-first search with an explicit path to detect cycles.
        let mut memo: HashMap<ClassId, PdResult> = HashMap::new();
        let mut on_path: Vec<ClassId> = Vec::new();
        let r = self.pd_dfs(c, bound, &mut memo, &mut on_path)?;
        let mut inner = self.inner.lock().unwrap();
        for (k, v) in memo {
            if !matches!(v, PdResult::Unknown(_)) {
                inner.pd.insert(k, v);
            }
        }
        Ok(r)
    }

    fn pd_dfs(
        &self,
        c: ClassId,
        budget: usize,
        memo: &mut HashMap<ClassId, PdResult>,
        on_path: &mut Vec<ClassId>,
    ) -> Result<PdResult, ModuleError> {
        if self.is_projective(c) {
            return Ok(PdResult::Finite(0));
        }
        if let Some(r) = self.inner.lock().unwrap().pd.get(&c) {
            return Ok(r.clone());
        }
        if let Some(r) = memo.get(&c) {
            if !matches!(r, PdResult::Unknown(_)) {
                return Ok(r.clone());
            }
        }
        if let Some(pos) = on_path.iter().position(|&x| x == c) {
            return Ok(PdResult::Infinite(InfiniteCert::SummandCycle {
                depth: pos,
                cycle: on_path.len() - pos,
            }));
        }
        if budget == 0 {
            return Ok(PdResult::Unknown(0));
        }
        on_path.push(c);
        let mut best = 0usize;
        let mut result = None;
        for (d, _) in self.omega_summands(c)? {
            match self.pd_dfs(d, budget - 1, memo, on_path)? {
                PdResult::Finite(n) => best = best.max(n),
                PdResult::Infinite(cert) => {
                    let depth = on_path.len() - 1;
                    let cert = match cert {
                        InfiniteCert::SummandCycle { cycle, .. } => InfiniteCert::SummandCycle { depth, cycle },
                        other => other,
                    };
                    result = Some(PdResult::Infinite(cert));
                    break;
                }
                PdResult::Unknown(_) => result = Some(PdResult::Unknown(budget)),
            }
        }
        on_path.pop();
        let r = result.unwrap_or(PdResult::Finite(best + 1));
        memo.insert(c, r.clone());
        Ok(r)
    }
}

/// Classes reachable from a start set through syzygy summands.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reach {
    /// Least number of syzygy steps needed to reach each class.
    pub min_depth: BTreeMap<ClassId, usize>,
    /// Every reachable class was expanded within the depth limit.
    pub complete: bool,
}

impl<F: Field> IsoClassRegistry<F> {
    /// Breadth-first closure of `start` under `omega_summands`, expanding classes of depth below `depth`.
    pub fn reach(&self, start: &[ClassId], depth: usize) -> Result<Reach, ModuleError> {
        let mut r = Reach {
            complete: true,
            ..Reach::default()
        };
        let mut frontier: Vec<ClassId> = Vec::new();
        for &c in start {
            if r.min_depth.insert(c, 0).is_none() {
                frontier.push(c);
            }
        }
        let mut level = 0;
        while !frontier.is_empty() {
            if level >= depth {
                if frontier.iter().any(|&c| !self.is_projective(c)) {
                    r.complete = false;
                }
                break;
            }
            let mut next = Vec::new();
            for c in frontier {
                if self.is_projective(c) {
                    continue;
                }
                for (d, _) in self.omega_summands(c)? {
                    if let std::collections::btree_map::Entry::Vacant(e) = r.min_depth.entry(d) {
                        e.insert(level + 1);
                        next.push(d);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        Ok(r)
    }
}

/// Registries for every algebra touched by a computation, keyed by identity.
pub struct Workspace<F: Field> {
    registries: Mutex<Vec<Arc<IsoClassRegistry<F>>>>,
    dim_cap: Option<usize>,
}

impl<F: Field> Default for Workspace<F> {
    fn default() -> Self {
        Self {
            registries: Mutex::new(Vec::new()),
            dim_cap: None,
        }
    }
}

impl<F: Field> Workspace<F> {
    pub fn new() -> Self {
        Self::default()
    }

    /// A workspace whose registries refuse modules above `cap` with `ModuleError::TooLarge`.
    pub fn with_dim_cap(cap: usize) -> Self {
        Self {
            dim_cap: Some(cap),
            ..Self::default()
        }
    }

    pub fn registry(&self, alg: &Arc<AlgebraTable<F>>) -> Arc<IsoClassRegistry<F>> {
        let mut regs = self.registries.lock().unwrap();
        if let Some(r) = regs.iter().find(|r| Arc::ptr_eq(r.algebra(), alg)) {
            return r.clone();
        }
        let r = Arc::new(IsoClassRegistry::with_dim_cap(alg, self.dim_cap));
        regs.push(r.clone());
        r
    }

    /// `dim Ext^i(X, Y)` as the sum of `Ext^1` over the nonprojective summands of `Ω^{i-1} X`; `i = 0` gives Hom.
    pub fn ext_dim(&self, x: &Module<F>, y: &Module<F>, i: usize) -> Result<usize, ModuleError> {
        if i == 0 {
            return Ok(hom_dim(x, y));
        }
        let reg = self.registry(x.algebra());
        let mut v = reg.class_vector(x)?;
        for _ in 1..i {
            v = reg.apply(&v, Side::Projective)?;
        }
        let mut total = BigUint::zero();
        for (c, k) in &v.0 {
            total += k * ext_dim(&reg.representative(*c), y, 1);
        }
        Ok(usize::try_from(total).expect("an Ext dimension is bounded by a module dimension"))
    }

    /// Global dimension as the largest projective dimension of a simple.
    pub fn global_dimension(&self, alg: &Arc<AlgebraTable<F>>, bound: usize) -> Result<GlobalDimension, ModuleError> {
        let mut best = 0;
        let mut unknown = None;
        for v in 0..alg.num_vertices() {
            match self.pd(&Module::simple(alg, v), bound)? {
                PdResult::Finite(n) => best = best.max(n),
                PdResult::Infinite(_) => return Ok(GlobalDimension::Infinite(v)),
                PdResult::Unknown(b) => unknown = Some(b),
            }
        }
        Ok(match unknown {
            Some(b) => GlobalDimension::Unknown(b),
            None => GlobalDimension::Finite(best),
        })
    }

    /// Projective dimension of an arbitrary module through the class graph.
    pub fn pd(&self, m: &Module<F>, bound: usize) -> Result<PdResult, ModuleError> {
        let reg = self.registry(m.algebra());
        let mut best = 0;
        let mut unknown = None;
        for (c, _) in reg.summands(m)? {
            match reg.pd_of_class(c, bound)? {
                PdResult::Finite(n) => best = best.max(n),
                inf @ PdResult::Infinite(_) => return Ok(inf),
                PdResult::Unknown(b) => unknown = Some(b),
            }
        }
        Ok(match unknown {
            Some(b) => PdResult::Unknown(b),
            None => PdResult::Finite(best),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::pd;
    use crate::module::tests::{algebra, f2};

    #[test]
    fn equal_ids_iff_isomorphic() {
        let a = f2();
        let reg = IsoClassRegistry::new(&a);
        let p = reg.register(&Module::projective(&a, 3));
        let s = reg.register(&Module::simple(&a, 3));
        assert_eq!(p, s);
        let q = reg.register(&Module::simple(&a, 4));
        assert_ne!(p, q);
        assert!(reg.is_projective(p));
        assert!(!reg.is_projective(q));
    }

    #[test]
    fn class_vectors_drop_projectives() {
        let a = f2();
        let reg = IsoClassRegistry::new(&a);
        let m = Module::direct_sum(&a, &[Module::simple(&a, 0), Module::simple(&a, 0), Module::projective(&a, 1)]);
        let v = reg.class_vector(&m).unwrap();
        assert_eq!(v.0.len(), 1);
        assert_eq!(v.0.values().cloned().collect::<Vec<_>>(), vec![BigUint::from(2u32)]);
        assert!(reg.class_vector(&Module::projective(&a, 0)).unwrap().is_zero());
    }

    #[test]
    fn class_graph_ext_matches_direct() {
        let a = f2();
        let ws = Workspace::new();
        for seed in 0..12 {
            let x = Module::random(&a, seed, 6);
            let y = Module::random(&a, seed + 100, 6);
            for i in 0..=3 {
                assert_eq!(ws.ext_dim(&x, &y, i).unwrap(), crate::homology::ext_dim(&x, &y, i), "seed {seed} degree {i}");
            }
        }
    }

    #[test]
    fn dim_cap_refuses_large_modules() {
        let a = f2();
        let ws = Workspace::with_dim_cap(3);
        let r = ws.registry(&a);
        assert!(matches!(r.summands(&Module::regular(&a)), Err(ModuleError::TooLarge { cap: 3, .. })));
        assert!(r.summands(&Module::simple(&a, 0)).is_ok());
    }

    #[test]
    fn class_graph_pd_matches_direct() {
        let a = f2();
        let ws = Workspace::new();
        for seed in 0..15 {
            let m = Module::random(&a, seed, 8);
            let direct = pd(&m, 20);
            let graph = ws.pd(&m, 20).unwrap();
            assert_eq!(direct.finite(), graph.finite(), "seed {seed}");
            assert_eq!(direct.is_infinite(), graph.is_infinite(), "seed {seed}");
        }
        let l = algebra(&["x0"], &[("x", "x0", "x0")], &[&["x", "x"]]);
        let r = Workspace::new().pd(&Module::simple(&l, 0), 5).unwrap();
        assert!(r.is_infinite());
    }
}

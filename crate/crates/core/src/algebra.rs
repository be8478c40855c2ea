//! Finite-dimensional basic algebras given by quivers with relations.
//!
//! Products follow right-to-left composition: for basis paths `p` and `q`,
//! `p * q` means "traverse `q`, then `p`". Presentations store paths in
//! traversal order, so the relation written `["gamma", "mu"]` is the product
//! `mu * gamma`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, Weak};

use crate::linalg::{Field, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("paths of length {max_path_len} do not all vanish; raise max_path_len or check that the ideal is admissible")]
    DimensionOverflow { max_path_len: usize },
    #[error("invalid relation: {0}")]
    InvalidRelation(String),
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("subspace is not a two-sided ideal")]
    NotAnIdeal,
    #[error("structure table failed validation: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<Arrow>) -> Result<Self, AlgebraError> {
        let mut seen = std::collections::HashSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(AlgebraError::InvalidQuiver(format!("duplicate vertex `{v}`")));
            }
        }
        let mut names = std::collections::HashSet::new();
        for a in &arrows {
            if !names.insert(a.name.as_str()) || seen.contains(a.name.as_str()) {
                return Err(AlgebraError::InvalidQuiver(format!("duplicate name `{}`", a.name)));
            }
            if a.from >= vertices.len() || a.to >= vertices.len() {
                return Err(AlgebraError::InvalidQuiver(format!(
                    "arrow `{}` has an endpoint out of range",
                    a.name
                )));
            }
        }
        Ok(Self { vertices, arrows })
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }
}

/// One term of a relation: a coefficient times a path of arrow indices in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTerm<F: Field> {
    pub coeff: F::Elem,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation<F: Field> {
    pub field: F,
    pub quiver: Quiver,
    pub relations: Vec<Vec<RelationTerm<F>>>,
}

impl<F: Field> Presentation<F> {
    /// Checks composability and parallelism of every relation.
    pub fn validate(&self) -> Result<(), AlgebraError> {
        let q = &self.quiver;
        for (ri, rel) in self.relations.iter().enumerate() {
            if rel.is_empty() {
                return Err(AlgebraError::InvalidRelation(format!("relation {ri} is empty")));
            }
            let mut ends = None;
            for term in rel {
                let desc = || {
                    term.path
                        .iter()
                        .map(|&a| q.arrows.get(a).map(|x| x.name.as_str()).unwrap_or("?"))
                        .collect::<Vec<_>>()
                        .join(",")
                };
                if term.path.len() < 2 {
                    return Err(AlgebraError::InvalidRelation(format!(
                        "relation {ri}: term [{}] has length < 2",
                        desc()
                    )));
                }
                if term.path.iter().any(|&a| a >= q.arrows.len()) {
                    return Err(AlgebraError::InvalidRelation(format!(
                        "relation {ri}: unknown arrow"
                    )));
                }
                for w in term.path.windows(2) {
                    if q.arrows[w[0]].to != q.arrows[w[1]].from {
                        return Err(AlgebraError::InvalidRelation(format!(
                            "relation {ri}: term [{}] is not composable",
                            desc()
                        )));
                    }
                }
                let e = (
                    q.arrows[term.path[0]].from,
                    q.arrows[*term.path.last().unwrap()].to,
                );
                match ends {
                    None => ends = Some(e),
                    Some(prev) if prev != e => {
                        return Err(AlgebraError::InvalidRelation(format!(
                            "relation {ri}: term [{}] is not parallel to the others",
                            desc()
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

/// A basis vector of an algebra: a residue of a path from `src` to `tgt`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisElem {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
    /// Length of the underlying path.
    pub degree: usize,
}

/// A product of generators, stored as `generator * parent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    /// Position in the generator list.
    pub head: usize,
    /// Index of the word applied first, if any.
    pub parent: Option<usize>,
    pub src: usize,
    pub tgt: usize,
}

/// How a basis element acts: as a vertex idempotent or as a combination of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression<F: Field> {
    Idempotent(usize),
    Words(Vec<(usize, F::Elem)>),
}

enum OppositeLink<F: Field> {
    Owned(Arc<AlgebraTable<F>>),
    Back(Weak<AlgebraTable<F>>),
}

/// A finite-dimensional basic algebra with a multiplication table on a path basis.
pub struct AlgebraTable<F: Field> {
    field: F,
    vertices: Vec<String>,
    basis: Vec<BasisElem>,
    products: Vec<Vec<(usize, F::Elem)>>,
    idempotents: Vec<usize>,
    radical: Vec<usize>,
    generators: Vec<usize>,
    words: Vec<Word>,
    expressions: Vec<Expression<F>>,
    opposite: OnceLock<OppositeLink<F>>,
}

impl<F: Field> std::fmt::Debug for AlgebraTable<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AlgebraTable")
            .field("vertices", &self.vertices)
            .field("dim", &self.dim())
            .field("basis", &self.basis.iter().map(|b| &b.label).collect::<Vec<_>>())
            .finish()
    }
}

impl<F: Field> PartialEq for AlgebraTable<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.vertices == other.vertices
            && self.basis == other.basis
            && self.products == other.products
            && self.idempotents == other.idempotents
            && self.radical == other.radical
    }
}

impl<F: Field> Eq for AlgebraTable<F> {}

/// Coordinates of an algebra element in the basis.
pub type Element<F> = Vec<<F as Field>::Elem>;

impl<F: Field> AlgebraTable<F> {
    /// Assembles and validates a table. `products[i * dim + j]` lists the
    /// nonzero coefficients of `b_i * b_j`.
    pub fn from_table(
        field: F,
        vertices: Vec<String>,
        basis: Vec<BasisElem>,
        products: Vec<Vec<(usize, F::Elem)>>,
        idempotents: Vec<usize>,
        radical: Vec<usize>,
    ) -> Result<Arc<Self>, AlgebraError> {
        let d = basis.len();
        if products.len() != d * d {
            return Err(AlgebraError::Invalid("product table has wrong size".into()));
        }
        if idempotents.len() != vertices.len() {
            return Err(AlgebraError::Invalid("one idempotent per vertex required".into()));
        }
        let mut alg = Self {
            field,
            vertices,
            basis,
            products,
            idempotents,
            radical,
            generators: Vec::new(),
            words: Vec::new(),
            expressions: Vec::new(),
            opposite: OnceLock::new(),
        };
        alg.validate()?;
        alg.compute_generators()?;
        Ok(Arc::new(alg))
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }
    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }
    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }
    pub fn radical(&self) -> &[usize] {
        &self.radical
    }
    /// Basis indices of a minimal generating set of the radical.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }
    pub fn words(&self) -> &[Word] {
        &self.words
    }
    pub fn expression(&self, b: usize) -> &Expression<F> {
        &self.expressions[b]
    }

    /// Nonzero coefficients of `b_i * b_j`.
    pub fn product(&self, i: usize, j: usize) -> &[(usize, F::Elem)] {
        &self.products[i * self.dim() + j]
    }

    pub fn unit_vector(&self, i: usize) -> Element<F> {
        let mut v = vec![self.field.zero(); self.dim()];
        v[i] = self.field.one();
        v
    }

    pub fn mul(&self, x: &[F::Elem], y: &[F::Elem]) -> Element<F> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim()];
        for (i, a) in x.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if f.is_zero(b) {
                    continue;
                }
                let ab = f.mul(a, b);
                for (k, c) in self.product(i, j) {
                    out[*k] = f.add(&out[*k], &f.mul(&ab, c));
                }
            }
        }
        out
    }

    pub fn one(&self) -> Element<F> {
        let mut v = vec![self.field.zero(); self.dim()];
        for &e in &self.idempotents {
            v[e] = self.field.one();
        }
        v
    }

    /// Arrows of the Gabriel quiver, as `(src, tgt)` pairs of the generators.
    pub fn gabriel_arrows(&self) -> Vec<(usize, usize)> {
        self.generators
            .iter()
            .map(|&g| (self.basis[g].src, self.basis[g].tgt))
            .collect()
    }

    /// Smallest `m` with `rad^m = 0`.
    pub fn loewy_length(&self) -> usize {
        let f = &self.field;
        let d = self.dim();
        let rad: Vec<Element<F>> = self.radical.iter().map(|&r| self.unit_vector(r)).collect();
        let mut power = Subspace::full(f, d);
        if d == 0 {
            return 0;
        }
        let mut m = 0;
        while power.dim() > 0 {
            let mut next = Subspace::new(f, d);
            let basis: Vec<Element<F>> = power.basis().to_vec();
            for r in &rad {
                for x in &basis {
                    next.insert(&self.mul(r, x));
                }
            }
            power = next;
            m += 1;
            if m > d + 1 {
                break;
            }
        }
        m
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let f = &self.field;
        let d = self.dim();
        for (k, b) in self.basis.iter().enumerate() {
            if b.src >= self.vertices.len() || b.tgt >= self.vertices.len() {
                return Err(AlgebraError::Invalid(format!("basis `{}` has bad endpoints", b.label)));
            }
            let et = self.unit_vector(self.idempotents[b.tgt]);
            let es = self.unit_vector(self.idempotents[b.src]);
            let bv = self.unit_vector(k);
            if self.mul(&self.mul(&et, &bv), &es) != bv {
                return Err(AlgebraError::Invalid(format!("basis `{}` is not homogeneous", b.label)));
            }
        }
        for (v, &e) in self.idempotents.iter().enumerate() {
            for (w, &e2) in self.idempotents.iter().enumerate() {
                let p = self.mul(&self.unit_vector(e), &self.unit_vector(e2));
                let expect = if v == w { self.unit_vector(e) } else { vec![f.zero(); d] };
                if p != expect {
                    return Err(AlgebraError::Invalid("idempotents are not orthogonal".into()));
                }
            }
        }
        let one = self.one();
        for k in 0..d {
            let bv = self.unit_vector(k);
            if self.mul(&one, &bv) != bv || self.mul(&bv, &one) != bv {
                return Err(AlgebraError::Invalid("idempotents do not sum to 1".into()));
            }
        }
        for i in 0..d {
            for j in 0..d {
                let ij = self.product(i, j);
                if ij.is_empty() {
                    // (b_i b_j) b_k = 0 must match b_i (b_j b_k).
                    for k in 0..d {
                        let mut acc = vec![f.zero(); d];
                        for (l, c) in self.product(j, k) {
                            for (m, c2) in self.product(i, *l) {
                                acc[*m] = f.add(&acc[*m], &f.mul(c, c2));
                            }
                        }
                        if acc.iter().any(|x| !f.is_zero(x)) {
                            return Err(AlgebraError::Invalid("associativity fails".into()));
                        }
                    }
                    continue;
                }
                for k in 0..d {
                    let mut left = vec![f.zero(); d];
                    for (l, c) in ij {
                        for (m, c2) in self.product(*l, k) {
                            left[*m] = f.add(&left[*m], &f.mul(c, c2));
                        }
                    }
                    let mut right = vec![f.zero(); d];
                    for (l, c) in self.product(j, k) {
                        for (m, c2) in self.product(i, *l) {
                            right[*m] = f.add(&right[*m], &f.mul(c, c2));
                        }
                    }
                    if left != right {
                        return Err(AlgebraError::Invalid("associativity fails".into()));
                    }
                }
            }
        }
        // Radical: complement of the idempotents, a nilpotent two-sided ideal.
        let mut in_rad = vec![false; d];
        for &r in &self.radical {
            in_rad[r] = true;
        }
        for &e in &self.idempotents {
            if in_rad[e] {
                return Err(AlgebraError::Invalid("an idempotent lies in the radical".into()));
            }
        }
        if self.radical.len() + self.idempotents.len() != d {
            return Err(AlgebraError::Invalid("radical quotient is not split semisimple".into()));
        }
        let rad_space = Subspace::spanned_by(
            f,
            d,
            &self.radical.iter().map(|&r| self.unit_vector(r)).collect::<Vec<_>>(),
        );
        for &r in &self.radical {
            for k in 0..d {
                let rv = self.unit_vector(r);
                let kv = self.unit_vector(k);
                if !rad_space.contains(&self.mul(&rv, &kv)) || !rad_space.contains(&self.mul(&kv, &rv)) {
                    return Err(AlgebraError::Invalid("radical is not an ideal".into()));
                }
            }
        }
        if d > 0 && self.loewy_length() > d + 1 {
            return Err(AlgebraError::Invalid("radical is not nilpotent".into()));
        }
        Ok(())
    }

    fn compute_generators(&mut self) -> Result<(), AlgebraError> {
        let f = self.field.clone();
        let d = self.dim();
        let mut rad2 = Subspace::new(&f, d);
        for &a in &self.radical {
            for &b in &self.radical {
                let p = self.mul(&self.unit_vector(a), &self.unit_vector(b));
                rad2.insert(&p);
            }
        }
        let mut order = self.radical.clone();
        order.sort_by_key(|&r| (self.basis[r].degree, r));
        let mut span = rad2;
        let mut gens = Vec::new();
        for r in order {
            if span.insert(&self.unit_vector(r)) {
                gens.push(r);
            }
        }
        self.generators = gens;

        // Words: generators, then generator * kept word, keeping only new directions.
        let mut words: Vec<Word> = Vec::new();
        let mut values: Vec<Element<F>> = Vec::new();
        let mut reached = Subspace::new(&f, d);
        let mut frontier: Vec<(Word, Element<F>)> = self
            .generators
            .iter()
            .enumerate()
            .map(|(gi, &g)| {
                (
                    Word {
                        head: gi,
                        parent: None,
                        src: self.basis[g].src,
                        tgt: self.basis[g].tgt,
                    },
                    self.unit_vector(g),
                )
            })
            .collect();
        while !frontier.is_empty() {
            let mut fresh = Vec::new();
            for (w, v) in frontier {
                if reached.insert(&v) {
                    words.push(w);
                    values.push(v);
                    fresh.push(words.len() - 1);
                }
            }
            let mut next = Vec::new();
            for &wi in &fresh {
                for (gi, &g) in self.generators.iter().enumerate() {
                    if self.basis[g].src != words[wi].tgt {
                        continue;
                    }
                    let v = self.mul(&self.unit_vector(g), &values[wi]);
                    if v.iter().all(|x| f.is_zero(x)) {
                        continue;
                    }
                    next.push((
                        Word {
                            head: gi,
                            parent: Some(wi),
                            src: words[wi].src,
                            tgt: self.basis[g].tgt,
                        },
                        v,
                    ));
                }
            }
            frontier = next;
        }
        if reached.dim() != self.radical.len() {
            return Err(AlgebraError::Invalid("generators do not generate the radical".into()));
        }
        let cols = crate::linalg::Matrix::from_col_vecs(&f, d, &values);
        let mut exprs = vec![Expression::Words(Vec::new()); d];
        for (v, &e) in self.idempotents.iter().enumerate() {
            exprs[e] = Expression::Idempotent(v);
        }
        for &r in &self.radical {
            let x = cols
                .solve(&self.unit_vector(r))
                .ok_or_else(|| AlgebraError::Invalid("radical element not reachable".into()))?;
            let terms = x
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !f.is_zero(c))
                .collect();
            exprs[r] = Expression::Words(terms);
        }
        self.words = words;
        self.expressions = exprs;
        Ok(())
    }

    /// The opposite algebra: same basis with endpoints swapped and reversed products.
    /// Cached, so `a.opposite().opposite()` is `a` itself.
    pub fn opposite(self: &Arc<Self>) -> Arc<Self> {
        if let Some(link) = self.opposite.get() {
            match link {
                OppositeLink::Owned(op) => return op.clone(),
                OppositeLink::Back(w) => {
                    if let Some(op) = w.upgrade() {
                        return op;
                    }
                }
            }
        }
        let op = self.build_opposite();
        let _ = op.opposite.set(OppositeLink::Back(Arc::downgrade(self)));
        match self.opposite.set(OppositeLink::Owned(op.clone())) {
            Ok(()) => op,
            Err(_) => match self.opposite.get() {
                Some(OppositeLink::Owned(existing)) => existing.clone(),
                _ => op,
            },
        }
    }

    fn build_opposite(&self) -> Arc<Self> {
        let d = self.dim();
        let basis = self
            .basis
            .iter()
            .map(|b| BasisElem {
                label: b.label.clone(),
                src: b.tgt,
                tgt: b.src,
                degree: b.degree,
            })
            .collect();
        let mut products = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                products.push(self.product(j, i).to_vec());
            }
        }
        Self::from_table(
            self.field.clone(),
            self.vertices.clone(),
            basis,
            products,
            self.idempotents.clone(),
            self.radical.clone(),
        )
        .expect("opposite of a valid table is valid")
    }

    /// The corner algebra `e A e` for `e` the sum of the idempotents at `subset`.
    pub fn corner(&self, subset: &[usize]) -> Result<Corner<F>, AlgebraError> {
        let mut s: Vec<usize> = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.iter().any(|&v| v >= self.num_vertices()) {
            return Err(AlgebraError::InvalidQuiver("vertex out of range".into()));
        }
        let mut vpos = vec![None; self.num_vertices()];
        for (i, &v) in s.iter().enumerate() {
            vpos[v] = Some(i);
        }
        let embed: Vec<usize> = (0..self.dim())
            .filter(|&b| vpos[self.basis[b].src].is_some() && vpos[self.basis[b].tgt].is_some())
            .collect();
        let mut pos = vec![None; self.dim()];
        for (i, &b) in embed.iter().enumerate() {
            pos[b] = Some(i);
        }
        let basis = embed
            .iter()
            .map(|&b| {
                let e = &self.basis[b];
                BasisElem {
                    label: e.label.clone(),
                    src: vpos[e.src].unwrap(),
                    tgt: vpos[e.tgt].unwrap(),
                    degree: e.degree,
                }
            })
            .collect();
        let mut products = Vec::with_capacity(embed.len() * embed.len());
        for &i in &embed {
            for &j in &embed {
                let p = self
                    .product(i, j)
                    .iter()
                    .map(|(k, c)| (pos[*k].expect("corner is closed"), c.clone()))
                    .collect();
                products.push(p);
            }
        }
        let idempotents = s.iter().map(|&v| pos[self.idempotents[v]].unwrap()).collect();
        let radical = self.radical.iter().filter_map(|&r| pos[r]).collect();
        let alg = Self::from_table(
            self.field.clone(),
            s.iter().map(|&v| self.vertices[v].clone()).collect(),
            basis,
            products,
            idempotents,
            radical,
        )?;
        Ok(Corner {
            algebra: alg,
            vertices: s,
            embed,
        })
    }

    /// The quotient by a two-sided ideal given as a subspace of basis coordinates.
    pub fn quotient(&self, ideal: &Subspace<F>) -> Result<Quotient<F>, AlgebraError> {
        let f = &self.field;
        let d = self.dim();
        for v in ideal.basis() {
            for k in 0..d {
                let bk = self.unit_vector(k);
                if !ideal.contains(&self.mul(&bk, v)) || !ideal.contains(&self.mul(v, &bk)) {
                    return Err(AlgebraError::NotAnIdeal);
                }
            }
        }
        let keep = ideal.complement_indices();
        let mut pos = vec![None; d];
        for (i, &b) in keep.iter().enumerate() {
            pos[b] = Some(i);
        }
        let mut vertex_map = Vec::new();
        for (v, &e) in self.idempotents.iter().enumerate() {
            if !ideal.contains(&self.unit_vector(e)) {
                if pos[e].is_none() {
                    return Err(AlgebraError::NotAnIdeal);
                }
                vertex_map.push(v);
            }
        }
        let mut vpos = vec![None; self.num_vertices()];
        for (i, &v) in vertex_map.iter().enumerate() {
            vpos[v] = Some(i);
        }
        let mut basis = Vec::new();
        for &b in &keep {
            let e = &self.basis[b];
            let (Some(s), Some(t)) = (vpos[e.src], vpos[e.tgt]) else {
                return Err(AlgebraError::NotAnIdeal);
            };
            basis.push(BasisElem {
                label: e.label.clone(),
                src: s,
                tgt: t,
                degree: e.degree,
            });
        }
        let mut products = Vec::with_capacity(keep.len() * keep.len());
        for &i in &keep {
            for &j in &keep {
                let p = self.mul(&self.unit_vector(i), &self.unit_vector(j));
                let q = ideal.quotient_coords(&p);
                products.push(
                    q.into_iter()
                        .enumerate()
                        .filter(|(_, c)| !f.is_zero(c))
                        .collect(),
                );
            }
        }
        let idempotents = vertex_map.iter().map(|&v| pos[self.idempotents[v]].unwrap()).collect();
        let radical = self.radical.iter().filter_map(|&r| pos[r]).collect();
        let alg = Self::from_table(
            f.clone(),
            vertex_map.iter().map(|&v| self.vertices[v].clone()).collect(),
            basis,
            products,
            idempotents,
            radical,
        )?;
        Ok(Quotient {
            algebra: alg,
            ideal: ideal.clone(),
            keep,
            vertex_map,
        })
    }

    /// Short structural digest, used for report headers.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.vertices.hash(&mut h);
        self.basis.hash(&mut h);
        for p in &self.products {
            p.hash(&mut h);
        }
        h.finish()
    }
}

/// Result of [`AlgebraTable::corner`].
#[derive(Debug, Clone)]
pub struct Corner<F: Field> {
    pub algebra: Arc<AlgebraTable<F>>,
    /// Vertices of the ambient algebra, in corner order.
    pub vertices: Vec<usize>,
    /// Corner basis index to ambient basis index.
    pub embed: Vec<usize>,
}

/// Result of [`AlgebraTable::quotient`].
#[derive(Debug, Clone)]
pub struct Quotient<F: Field> {
    pub algebra: Arc<AlgebraTable<F>>,
    pub ideal: Subspace<F>,
    /// Quotient basis index to ambient basis index of its representative.
    pub keep: Vec<usize>,
    /// Quotient vertex to ambient vertex.
    pub vertex_map: Vec<usize>,
}

impl<F: Field> Quotient<F> {
    /// Image of an ambient element in quotient coordinates.
    pub fn project(&self, x: &[F::Elem]) -> Element<F> {
        self.ideal.quotient_coords(x)
    }
}

pub const DEFAULT_MAX_PATH_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ColumnOrder {
    LongestFirst,
    ShortestFirst,
}

#[derive(Clone, Debug)]
struct PathData {
    src: usize,
    tgt: usize,
    arrows: Vec<usize>,
}

fn enumerate_paths(q: &Quiver, max_len: usize) -> Vec<PathData> {
    let mut all: Vec<PathData> = (0..q.vertices.len())
        .map(|v| PathData {
            src: v,
            tgt: v,
            arrows: Vec::new(),
        })
        .collect();
    let mut level: Vec<usize> = Vec::new();
    for (ai, a) in q.arrows.iter().enumerate() {
        all.push(PathData {
            src: a.from,
            tgt: a.to,
            arrows: vec![ai],
        });
        level.push(all.len() - 1);
    }
    if max_len == 0 {
        all.truncate(q.vertices.len());
        return all;
    }
    for _ in 1..max_len {
        let mut next = Vec::new();
        for &pi in &level {
            for (ai, a) in q.arrows.iter().enumerate() {
                if a.from == all[pi].tgt {
                    let mut arrows = all[pi].arrows.clone();
                    arrows.push(ai);
                    all.push(PathData {
                        src: all[pi].src,
                        tgt: a.to,
                        arrows,
                    });
                    next.push(all.len() - 1);
                }
            }
        }
        level = next;
    }
    all
}

struct Reduction<F: Field> {
    paths: Vec<PathData>,
    index: HashMap<(usize, Vec<usize>), usize>,
    /// Per (src, tgt) block: member path indices in column order, and the ideal.
    blocks: HashMap<(usize, usize), (Vec<usize>, Subspace<F>)>,
    column: Vec<usize>,
}

impl<F: Field> Reduction<F> {
    fn new(p: &Presentation<F>, n: usize, order: ColumnOrder) -> Self {
        let f = &p.field;
        let q = &p.quiver;
        let paths = enumerate_paths(q, n);
        let mut index = HashMap::new();
        for (i, path) in paths.iter().enumerate() {
            index.insert((path.src, path.arrows.clone()), i);
        }
        let mut members: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, path) in paths.iter().enumerate() {
            members.entry((path.src, path.tgt)).or_default().push(i);
        }
        let mut column = vec![0; paths.len()];
        let mut blocks = HashMap::new();
        for (key, mut m) in members {
            match order {
                ColumnOrder::LongestFirst => {
                    m.sort_by_key(|&i| (std::cmp::Reverse(paths[i].arrows.len()), i))
                }
                ColumnOrder::ShortestFirst => m.sort_by_key(|&i| (paths[i].arrows.len(), i)),
            }
            for (c, &i) in m.iter().enumerate() {
                column[i] = c;
            }
            let len = m.len();
            blocks.insert(key, (m, Subspace::new(f, len)));
        }
        let mut red = Self {
            paths,
            index,
            blocks,
            column,
        };
        // Paths ending at a vertex / starting at a vertex, for two-sided multiples.
        let nv = q.vertices.len();
        let mut ending: Vec<Vec<usize>> = vec![Vec::new(); nv];
        let mut starting: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (i, path) in red.paths.iter().enumerate() {
            ending[path.tgt].push(i);
            starting[path.src].push(i);
        }
        for rel in &p.relations {
            let s = q.arrows[rel[0].path[0]].from;
            let t = q.arrows[*rel[0].path.last().unwrap()].to;
            let min_len = rel.iter().map(|r| r.path.len()).min().unwrap();
            if min_len > n {
                continue;
            }
            for &vi in &ending[s] {
                let vlen = red.paths[vi].arrows.len();
                if vlen + min_len > n {
                    continue;
                }
                for &ui in &starting[t] {
                    let ulen = red.paths[ui].arrows.len();
                    if vlen + min_len + ulen > n {
                        continue;
                    }
                    let (bs, bt) = (red.paths[vi].src, red.paths[ui].tgt);
                    let block_len = red.blocks[&(bs, bt)].0.len();
                    let mut row = vec![f.zero(); block_len];
                    for term in rel {
                        let mut arrows = red.paths[vi].arrows.clone();
                        arrows.extend(&term.path);
                        arrows.extend(&red.paths[ui].arrows);
                        if arrows.len() > n {
                            continue;
                        }
                        let pi = red.index[&(bs, arrows)];
                        let c = red.column[pi];
                        row[c] = f.add(&row[c], &term.coeff);
                    }
                    red.blocks.get_mut(&(bs, bt)).unwrap().1.insert(&row);
                }
            }
        }
        red
    }

    fn unit(&self, f: &F, pi: usize) -> (usize, usize, Vec<F::Elem>) {
        let p = &self.paths[pi];
        let len = self.blocks[&(p.src, p.tgt)].0.len();
        let mut v = vec![f.zero(); len];
        v[self.column[pi]] = f.one();
        (p.src, p.tgt, v)
    }

    fn all_of_length_vanish(&self, f: &F, n: usize) -> bool {
        (0..self.paths.len())
            .filter(|&i| self.paths[i].arrows.len() == n)
            .all(|i| {
                let (s, t, v) = self.unit(f, i);
                self.blocks[&(s, t)].1.contains(&v)
            })
    }
}

/// Builds `kQ/I` by degree-wise linear reduction of paths against relation consequences.
pub fn build_algebra<F: Field>(
    p: &Presentation<F>,
    max_path_len: usize,
) -> Result<Arc<AlgebraTable<F>>, AlgebraError> {
    build_with_order(p, max_path_len, ColumnOrder::LongestFirst)
}

/// Dimension of `kQ/I` computed with the opposite column order; an independent check on [`build_algebra`].
pub fn dimension_by_shortest_first<F: Field>(
    p: &Presentation<F>,
    max_path_len: usize,
) -> Result<usize, AlgebraError> {
    p.validate()?;
    let f = &p.field;
    for n in 1..=max_path_len {
        let red = Reduction::new(p, n, ColumnOrder::ShortestFirst);
        if red.all_of_length_vanish(f, n) {
            return Ok(red
                .blocks
                .values()
                .map(|(m, s)| m.len() - s.dim())
                .sum());
        }
    }
    Err(AlgebraError::DimensionOverflow { max_path_len })
}

fn build_with_order<F: Field>(
    p: &Presentation<F>,
    max_path_len: usize,
    order: ColumnOrder,
) -> Result<Arc<AlgebraTable<F>>, AlgebraError> {
    p.validate()?;
    let f = &p.field;
    let q = &p.quiver;
    let mut found = None;
    for n in 1..=max_path_len {
        let red = Reduction::new(p, n, order);
        if red.all_of_length_vanish(f, n) {
            found = Some((n, red));
            break;
        }
    }
    let Some((n, red)) = found else {
        return Err(AlgebraError::DimensionOverflow { max_path_len });
    };

    // Basis: paths whose column is not a pivot of their block's ideal.
    let mut basis_paths = Vec::new();
    for (i, path) in red.paths.iter().enumerate() {
        let (_, sub) = &red.blocks[&(path.src, path.tgt)];
        if !sub.pivots().contains(&red.column[i]) {
            basis_paths.push(i);
        }
    }
    basis_paths.sort_by_key(|&i| (red.paths[i].arrows.len(), i));
    let mut basis_pos = vec![None; red.paths.len()];
    for (k, &i) in basis_paths.iter().enumerate() {
        basis_pos[i] = Some(k);
    }
    // Column -> path index per block, for reading reduced vectors back.
    let basis: Vec<BasisElem> = basis_paths
        .iter()
        .map(|&i| {
            let path = &red.paths[i];
            let label = if path.arrows.is_empty() {
                format!("e_{}", q.vertices[path.src])
            } else {
                path.arrows
                    .iter()
                    .rev()
                    .map(|&a| q.arrows[a].name.as_str())
                    .collect::<Vec<_>>()
                    .join("*")
            };
            BasisElem {
                label,
                src: path.src,
                tgt: path.tgt,
                degree: path.arrows.len(),
            }
        })
        .collect();
    let d = basis.len();
    let mut products = vec![Vec::new(); d * d];
    for (bi, &pi) in basis_paths.iter().enumerate() {
        for (bj, &pj) in basis_paths.iter().enumerate() {
            let (a, b) = (&red.paths[pi], &red.paths[pj]);
            if b.tgt != a.src {
                continue;
            }
            let mut arrows = b.arrows.clone();
            arrows.extend(&a.arrows);
            if arrows.len() >= n {
                continue;
            }
            let qi = red.index[&(b.src, arrows)];
            let (s, t, v) = red.unit(f, qi);
            let (members, sub) = &red.blocks[&(s, t)];
            let reduced = sub.reduce(&v);
            let mut terms: Vec<(usize, F::Elem)> = reduced
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !f.is_zero(c))
                .map(|(c, x)| (basis_pos[members[c]].expect("reduced onto basis"), x))
                .collect();
            terms.sort_by_key(|(k, _)| *k);
            products[bi * d + bj] = terms;
        }
    }
    let idempotents = (0..q.vertices.len()).map(|v| basis_pos[v].unwrap()).collect();
    let radical = (0..d).filter(|&k| basis[k].degree > 0).collect();
    AlgebraTable::from_table(f.clone(), q.vertices.clone(), basis, products, idempotents, radical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PrimeField;

    pub(crate) fn presentation(
        vertices: &[&str],
        arrows: &[(&str, &str, &str)],
        monomials: &[&[&str]],
    ) -> Presentation<PrimeField> {
        let f = PrimeField::new(101).unwrap();
        let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let idx = |n: &str| vs.iter().position(|v| v == n).unwrap();
        let arr: Vec<Arrow> = arrows
            .iter()
            .map(|(n, a, b)| Arrow {
                name: n.to_string(),
                from: idx(a),
                to: idx(b),
            })
            .collect();
        let quiver = Quiver::new(vs.clone(), arr).unwrap();
        let relations = monomials
            .iter()
            .map(|m| {
                vec![RelationTerm {
                    coeff: 1,
                    path: m.iter().map(|n| quiver.arrow_index(n).unwrap()).collect(),
                }]
            })
            .collect();
        Presentation {
            field: f,
            quiver,
            relations,
        }
    }

    fn f2() -> Presentation<PrimeField> {
        presentation(
            &["1", "2", "3", "4", "5"],
            &[
                ("alpha", "1", "2"),
                ("beta", "2", "1"),
                ("gamma", "3", "1"),
                ("delta", "1", "4"),
                ("mu", "1", "5"),
                ("theta", "3", "4"),
                ("epsilon", "5", "4"),
            ],
            &[
                &["alpha", "beta"],
                &["beta", "alpha"],
                &["gamma", "mu"],
                &["gamma", "delta"],
                &["mu", "epsilon"],
            ],
        )
    }

    #[test]
    fn a2_has_dim_3() {
        let p = presentation(&["1", "2"], &[("a", "1", "2")], &[]);
        let a = build_algebra(&p, 8).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.generators().len(), 1);
    }

    #[test]
    fn f2_dimension_and_long_paths() {
        let a = build_algebra(&f2(), 16).unwrap();
        assert_eq!(a.dim(), 15);
        let mut long: Vec<&str> = a
            .basis()
            .iter()
            .filter(|b| b.degree == 2)
            .map(|b| b.label.as_str())
            .collect();
        long.sort();
        assert_eq!(long, vec!["alpha*gamma", "delta*beta", "mu*beta"]);
        assert_eq!(dimension_by_shortest_first(&f2(), 16).unwrap(), 15);
    }

    #[test]
    fn loop_with_square_zero() {
        let p = presentation(&["0"], &[("x", "0", "0")], &[&["x", "x"]]);
        let a = build_algebra(&p, 8).unwrap();
        assert_eq!(a.dim(), 2);
        let op = a.opposite();
        assert_eq!(*op, *a);
    }

    #[test]
    fn overflow_without_relations_on_cycle() {
        let p = presentation(&["0"], &[("x", "0", "0")], &[]);
        assert_eq!(
            build_algebra(&p, 5).unwrap_err(),
            AlgebraError::DimensionOverflow { max_path_len: 5 }
        );
    }

    #[test]
    fn non_composable_relation_rejected() {
        let p = presentation(&["1", "2"], &[("a", "1", "2")], &[&["a", "a"]]);
        assert!(matches!(build_algebra(&p, 5), Err(AlgebraError::InvalidRelation(_))));
    }

    #[test]
    fn opposite_is_cached_involution() {
        let a = build_algebra(&f2(), 16).unwrap();
        let op = a.opposite();
        assert_eq!(op.dim(), 15);
        assert!(Arc::ptr_eq(&op.opposite(), &a));
    }

    #[test]
    fn corners() {
        let a = build_algebra(&f2(), 16).unwrap();
        let c = a.corner(&[2, 3, 4]).unwrap();
        assert_eq!(c.algebra.dim(), 5);
        assert_eq!(c.algebra.generators().len(), 2);
        let full = a.corner(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(*full.algebra, *a);
    }

    #[test]
    fn quotients() {
        let a = build_algebra(&f2(), 16).unwrap();
        let zero = Subspace::new(a.field(), a.dim());
        assert_eq!(*a.quotient(&zero).unwrap().algebra, *a);
        let rad = Subspace::spanned_by(
            a.field(),
            a.dim(),
            &a.radical().iter().map(|&r| a.unit_vector(r)).collect::<Vec<_>>(),
        );
        assert_eq!(a.quotient(&rad).unwrap().algebra.dim(), 5);
        let bad = Subspace::spanned_by(a.field(), a.dim(), &[a.unit_vector(a.generators()[0])]);
        assert!(matches!(a.quotient(&bad), Err(AlgebraError::NotAnIdeal)));
    }
}

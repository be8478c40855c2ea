//! Finite-dimensional left modules as quiver representations.
//!
//! A module stores one vector space per vertex and one matrix per generator of
//! the algebra's radical. Vectors of the total space are laid out vertex by
//! vertex, in vertex order.

use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraTable, Corner, Expression, Quotient};
use crate::linalg::{Field, Matrix, Subspace};
use crate::poly::char_poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("field characteristic {p} is too small for a module of dimension {dim}; use a prime larger than {dim}")]
    FieldTooSmall { p: u64, dim: usize },
    #[error("could not decide a decomposition over this field (module of dimension {dim})")]
    DecompositionUndecided { dim: usize },
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("invalid module: {0}")]
    Invalid(String),
    #[error("module of dimension {dim} exceeds the working cap {cap}")]
    TooLarge { dim: usize, cap: usize },
}

pub struct ModuleData<F: Field> {
    alg: Arc<AlgebraTable<F>>,
    dims: Vec<usize>,
    maps: Vec<Matrix<F>>,
    offsets: Vec<usize>,
    actions: OnceLock<Vec<Matrix<F>>>,
}

/// A left module, cheap to clone.
#[derive(Clone)]
pub struct Module<F: Field>(Arc<ModuleData<F>>);

impl<F: Field> std::fmt::Debug for Module<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Module").field("dims", &self.0.dims).finish()
    }
}

/// A homomorphism given by one block per vertex.
#[derive(Clone, Debug)]
pub struct ModuleMap<F: Field> {
    pub src: Module<F>,
    pub tgt: Module<F>,
    /// `blocks[v]` is `tgt.dims[v] x src.dims[v]`.
    pub blocks: Vec<Matrix<F>>,
}

/// A submodule together with its inclusion.
#[derive(Clone, Debug)]
pub struct Submodule<F: Field> {
    pub module: Module<F>,
    pub inclusion: ModuleMap<F>,
    pub spaces: Vec<Subspace<F>>,
}

/// A quotient module together with its projection.
#[derive(Clone, Debug)]
pub struct QuotientModule<F: Field> {
    pub module: Module<F>,
    pub projection: ModuleMap<F>,
}

/// Krull-Schmidt decomposition.
#[derive(Clone, Debug)]
pub struct Decomposition<F: Field> {
    /// Representatives of the distinct summand classes with multiplicities.
    pub summands: Vec<(Module<F>, usize)>,
    /// Inclusion of each indecomposable piece into the module.
    pub pieces: Vec<ModuleMap<F>>,
    /// For each piece, its index in `summands`.
    pub piece_class: Vec<usize>,
}

impl<F: Field> Decomposition<F> {
    /// The block matrix of all piece inclusions; invertible for a valid decomposition.
    pub fn witness(&self, m: &Module<F>) -> Matrix<F> {
        let f = m.field();
        let mut w = Matrix::zeros(f, m.dim(), 0);
        for p in &self.pieces {
            w = w.hstack(&p.full_matrix());
        }
        w
    }

    pub fn num_pieces(&self) -> usize {
        self.pieces.len()
    }
}

fn same_algebra<F: Field>(a: &Arc<AlgebraTable<F>>, b: &Arc<AlgebraTable<F>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<F: Field> Module<F> {
    /// Builds a module after checking block shapes and every product of basis elements.
    pub fn new(
        alg: &Arc<AlgebraTable<F>>,
        dims: Vec<usize>,
        maps: Vec<Matrix<F>>,
    ) -> Result<Self, ModuleError> {
        if dims.len() != alg.num_vertices() {
            return Err(ModuleError::Invalid("one dimension per vertex required".into()));
        }
        if maps.len() != alg.generators().len() {
            return Err(ModuleError::Invalid("one matrix per generator required".into()));
        }
        for (gi, &g) in alg.generators().iter().enumerate() {
            let b = &alg.basis()[g];
            if maps[gi].rows() != dims[b.tgt] || maps[gi].cols() != dims[b.src] {
                return Err(ModuleError::Invalid(format!(
                    "matrix for `{}` must be {}x{}",
                    b.label, dims[b.tgt], dims[b.src]
                )));
            }
        }
        let m = Self::from_parts(alg, dims, maps);
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn from_parts(alg: &Arc<AlgebraTable<F>>, dims: Vec<usize>, maps: Vec<Matrix<F>>) -> Self {
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        Module(Arc::new(ModuleData {
            alg: alg.clone(),
            dims,
            maps,
            offsets,
            actions: OnceLock::new(),
        }))
    }

    /// Checks that the action respects every product of basis elements.
    pub fn validate(&self) -> Result<(), ModuleError> {
        let alg = self.algebra();
        let d = alg.dim();
        let full: Vec<Matrix<F>> = (0..d).map(|b| self.full_action(b)).collect();
        let f = self.field();
        for i in 0..d {
            for j in 0..d {
                let lhs = full[i].mul(&full[j]);
                let mut rhs = Matrix::zeros(f, self.dim(), self.dim());
                for (k, c) in alg.product(i, j) {
                    rhs.add_scaled(c, &full[*k]);
                }
                if lhs != rhs {
                    return Err(ModuleError::Invalid(format!(
                        "action violates the product {} * {}",
                        alg.basis()[i].label,
                        alg.basis()[j].label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Arc<AlgebraTable<F>> {
        &self.0.alg
    }
    pub fn field(&self) -> &F {
        self.0.alg.field()
    }
    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }
    pub fn dim(&self) -> usize {
        *self.0.offsets.last().unwrap()
    }
    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
    pub fn offset(&self, v: usize) -> usize {
        self.0.offsets[v]
    }
    /// Matrix of the `gi`-th generator, `dims[tgt] x dims[src]`.
    pub fn map(&self, gi: usize) -> &Matrix<F> {
        &self.0.maps[gi]
    }
    pub fn maps(&self) -> &[Matrix<F>] {
        &self.0.maps
    }
    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Entry-wise equality of the representation (same basis, same matrices).
    pub fn same_representation(&self, other: &Self) -> bool {
        same_algebra(self.algebra(), other.algebra())
            && self.dims() == other.dims()
            && self.maps() == other.maps()
    }

    pub fn zero(alg: &Arc<AlgebraTable<F>>) -> Self {
        let f = alg.field();
        let maps = alg.generators().iter().map(|_| Matrix::zeros(f, 0, 0)).collect();
        Self::from_parts(alg, vec![0; alg.num_vertices()], maps)
    }

    pub fn simple(alg: &Arc<AlgebraTable<F>>, v: usize) -> Self {
        let f = alg.field();
        let mut dims = vec![0; alg.num_vertices()];
        dims[v] = 1;
        let maps = alg
            .generators()
            .iter()
            .map(|&g| {
                let b = &alg.basis()[g];
                Matrix::zeros(f, dims[b.tgt], dims[b.src])
            })
            .collect();
        Self::from_parts(alg, dims, maps)
    }

    /// Basis elements starting at `v`, grouped by target vertex: the basis of `A e_v`.
    fn projective_basis(alg: &AlgebraTable<F>, v: usize) -> Vec<Vec<usize>> {
        let mut by_vertex = vec![Vec::new(); alg.num_vertices()];
        for (k, b) in alg.basis().iter().enumerate() {
            if b.src == v {
                by_vertex[b.tgt].push(k);
            }
        }
        by_vertex
    }

    /// The indecomposable projective `A e_v`.
    pub fn projective(alg: &Arc<AlgebraTable<F>>, v: usize) -> Self {
        let f = alg.field();
        let by_vertex = Self::projective_basis(alg, v);
        let dims: Vec<usize> = by_vertex.iter().map(|x| x.len()).collect();
        let mut pos = vec![usize::MAX; alg.dim()];
        for list in &by_vertex {
            for (i, &k) in list.iter().enumerate() {
                pos[k] = i;
            }
        }
        let maps = alg
            .generators()
            .iter()
            .map(|&g| {
                let gb = &alg.basis()[g];
                let mut m = Matrix::zeros(f, dims[gb.tgt], dims[gb.src]);
                for (j, &k) in by_vertex[gb.src].iter().enumerate() {
                    for (r, c) in alg.product(g, k) {
                        m[(pos[*r], j)] = c.clone();
                    }
                }
                m
            })
            .collect();
        Self::from_parts(alg, dims, maps)
    }

    /// The indecomposable injective `D(e_v A)`, as the dual of a projective over the opposite algebra.
    pub fn injective(alg: &Arc<AlgebraTable<F>>, v: usize) -> Self {
        Self::projective(&alg.opposite(), v).dual()
    }

    /// The left regular module, with the basis of `e_v A` at vertex `v` in basis order.
    pub fn regular(alg: &Arc<AlgebraTable<F>>) -> Self {
        let f = alg.field();
        let mut by_vertex = vec![Vec::new(); alg.num_vertices()];
        for (k, b) in alg.basis().iter().enumerate() {
            by_vertex[b.tgt].push(k);
        }
        let dims: Vec<usize> = by_vertex.iter().map(|x| x.len()).collect();
        let mut pos = vec![0; alg.dim()];
        for list in &by_vertex {
            for (i, &k) in list.iter().enumerate() {
                pos[k] = i;
            }
        }
        let maps = alg
            .generators()
            .iter()
            .map(|&g| {
                let gb = &alg.basis()[g];
                let mut m = Matrix::zeros(f, dims[gb.tgt], dims[gb.src]);
                for (j, &k) in by_vertex[gb.src].iter().enumerate() {
                    for (r, c) in alg.product(g, k) {
                        m[(pos[*r], j)] = c.clone();
                    }
                }
                m
            })
            .collect();
        Self::from_parts(alg, dims, maps)
    }

    /// Position of algebra basis element `k` in the total space of [`Module::regular`].
    pub fn regular_position(alg: &AlgebraTable<F>, k: usize) -> usize {
        let t = alg.basis()[k].tgt;
        let before: usize = alg.basis().iter().filter(|b| b.tgt < t).count();
        before + alg.basis()[..k].iter().filter(|b| b.tgt == t).count()
    }

    pub fn direct_sum(alg: &Arc<AlgebraTable<F>>, parts: &[Module<F>]) -> Self {
        Self::direct_sum_with_inclusions(alg, parts).0
    }

    /// Direct sum with the inclusion of each part.
    pub fn direct_sum_with_inclusions(
        alg: &Arc<AlgebraTable<F>>,
        parts: &[Module<F>],
    ) -> (Self, Vec<ModuleMap<F>>) {
        let f = alg.field();
        let nv = alg.num_vertices();
        let dims: Vec<usize> = (0..nv).map(|v| parts.iter().map(|p| p.dims()[v]).sum()).collect();
        let maps = (0..alg.generators().len())
            .map(|gi| {
                let blocks: Vec<Matrix<F>> = parts.iter().map(|p| p.map(gi).clone()).collect();
                Matrix::block_diag(f, &blocks)
            })
            .collect();
        let sum = Self::from_parts(alg, dims.clone(), maps);
        let mut starts = vec![0; nv];
        let mut incs = Vec::new();
        for p in parts {
            let blocks = (0..nv)
                .map(|v| {
                    let mut b = Matrix::zeros(f, dims[v], p.dims()[v]);
                    for i in 0..p.dims()[v] {
                        b[(starts[v] + i, i)] = f.one();
                    }
                    b
                })
                .collect();
            for v in 0..nv {
                starts[v] += p.dims()[v];
            }
            incs.push(ModuleMap {
                src: p.clone(),
                tgt: sum.clone(),
                blocks,
            });
        }
        (sum, incs)
    }

    /// Blocks of every word of the algebra, `dims[tgt] x dims[src]`.
    fn word_actions(&self) -> Vec<Matrix<F>> {
        let alg = self.algebra();
        let mut out: Vec<Matrix<F>> = Vec::with_capacity(alg.words().len());
        for w in alg.words() {
            let head = self.map(w.head);
            let m = match w.parent {
                None => head.clone(),
                Some(p) => head.mul(&out[p]),
            };
            out.push(m);
        }
        out
    }

    /// Action blocks of all basis elements, `dims[tgt b] x dims[src b]`.
    pub fn basis_actions(&self) -> &[Matrix<F>] {
        self.0.actions.get_or_init(|| {
            let alg = self.algebra();
            let f = self.field();
            let words = self.word_actions();
            (0..alg.dim())
                .map(|k| {
                    let b = &alg.basis()[k];
                    match alg.expression(k) {
                        Expression::Idempotent(v) => Matrix::identity(f, self.dims()[*v]),
                        Expression::Words(terms) => {
                            let mut m = Matrix::zeros(f, self.dims()[b.tgt], self.dims()[b.src]);
                            for (w, c) in terms {
                                m.add_scaled(c, &words[*w]);
                            }
                            m
                        }
                    }
                })
                .collect()
        })
    }

    /// Action of basis element `k` on the total space.
    pub fn full_action(&self, k: usize) -> Matrix<F> {
        let b = &self.algebra().basis()[k];
        let block = &self.basis_actions()[k];
        let mut m = Matrix::zeros(self.field(), self.dim(), self.dim());
        m.set_block(self.offset(b.tgt), self.offset(b.src), block);
        m
    }

    /// Action of an arbitrary algebra element on the total space.
    pub fn element_action(&self, x: &[F::Elem]) -> Matrix<F> {
        let f = self.field();
        let mut m = Matrix::zeros(f, self.dim(), self.dim());
        for (k, c) in x.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let b = &self.algebra().basis()[k];
            let block = self.basis_actions()[k].scale(c);
            let (r0, c0) = (self.offset(b.tgt), self.offset(b.src));
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    m[(r0 + i, c0 + j)] = f.add(&m[(r0 + i, c0 + j)], &block[(i, j)]);
                }
            }
        }
        m
    }

    /// Full matrix of the `gi`-th generator on the total space.
    pub fn full_generator(&self, gi: usize) -> Matrix<F> {
        let g = self.algebra().generators()[gi];
        self.full_action(g)
    }

    /// Components of a total-space vector, one per vertex.
    pub fn split(&self, x: &[F::Elem]) -> Vec<Vec<F::Elem>> {
        (0..self.dims().len())
            .map(|v| x[self.offset(v)..self.offset(v + 1)].to_vec())
            .collect()
    }

    /// The dual module over the opposite algebra.
    pub fn dual(&self) -> Self {
        let op = self.algebra().opposite();
        debug_assert_eq!(op.generators(), self.algebra().generators());
        let maps = self.maps().iter().map(|m| m.transpose()).collect();
        Self::from_parts(&op, self.dims().to_vec(), maps)
    }

    /// Dimension vector of the top `M / rad M`.
    pub fn top_dims(&self) -> Vec<usize> {
        let r = self.radical_spaces();
        r.iter().enumerate().map(|(v, s)| self.dims()[v] - s.dim()).collect()
    }

    /// Dimension vector of the socle.
    pub fn socle_dims(&self) -> Vec<usize> {
        self.socle_spaces().iter().map(|s| s.dim()).collect()
    }

    /// `rad M = sum of images of the generators`, per vertex.
    pub fn radical_spaces(&self) -> Vec<Subspace<F>> {
        let alg = self.algebra();
        let f = self.field();
        let mut spaces: Vec<Subspace<F>> = self.dims().iter().map(|&d| Subspace::new(f, d)).collect();
        for (gi, &g) in alg.generators().iter().enumerate() {
            let t = alg.basis()[g].tgt;
            let m = self.map(gi);
            for j in 0..m.cols() {
                spaces[t].insert(&m.col(j));
            }
        }
        spaces
    }

    /// `soc M = common kernel of the generators`, per vertex.
    pub fn socle_spaces(&self) -> Vec<Subspace<F>> {
        let alg = self.algebra();
        let f = self.field();
        (0..self.dims().len())
            .map(|v| {
                let outgoing: Vec<&Matrix<F>> = alg
                    .generators()
                    .iter()
                    .enumerate()
                    .filter(|(_, &g)| alg.basis()[g].src == v)
                    .map(|(gi, _)| self.map(gi))
                    .collect();
                let mut stacked = Matrix::zeros(f, 0, self.dims()[v]);
                for m in outgoing {
                    stacked = stacked.vstack(m);
                }
                Subspace::spanned_by(f, self.dims()[v], &stacked.kernel_basis())
            })
            .collect()
    }

    pub fn is_semisimple(&self) -> bool {
        self.maps().iter().all(|m| m.is_zero())
    }

    /// Submodule generated by the given total-space vectors.
    pub fn submodule_generated(&self, gens: &[Vec<F::Elem>]) -> Submodule<F> {
        let f = self.field();
        let mut spaces: Vec<Subspace<F>> = self.dims().iter().map(|&d| Subspace::new(f, d)).collect();
        let mut queue = Vec::new();
        for x in gens {
            for (v, comp) in self.split(x).into_iter().enumerate() {
                if spaces[v].insert(&comp) {
                    queue.push((v, comp));
                }
            }
        }
        self.close_and_build(spaces, queue)
    }

    /// Submodule with the given per-vertex spaces, which must already be closed.
    pub fn submodule_from_spaces(&self, spaces: Vec<Subspace<F>>) -> Submodule<F> {
        self.close_and_build(spaces, Vec::new())
    }

    fn close_and_build(&self, mut spaces: Vec<Subspace<F>>, mut queue: Vec<(usize, Vec<F::Elem>)>) -> Submodule<F> {
        let alg = self.algebra();
        let f = self.field();
        while let Some((v, x)) = queue.pop() {
            for (gi, &g) in alg.generators().iter().enumerate() {
                let b = &alg.basis()[g];
                if b.src != v {
                    continue;
                }
                let y = self.map(gi).mul_vec(&x);
                if spaces[b.tgt].insert(&y) {
                    queue.push((b.tgt, y));
                }
            }
        }
        let dims: Vec<usize> = spaces.iter().map(|s| s.dim()).collect();
        let maps = alg
            .generators()
            .iter()
            .enumerate()
            .map(|(gi, &g)| {
                let b = &alg.basis()[g];
                let cols: Vec<Vec<F::Elem>> = spaces[b.src]
                    .basis()
                    .iter()
                    .map(|x| {
                        let y = self.map(gi).mul_vec(x);
                        debug_assert!(spaces[b.tgt].contains(&y), "submodule not closed");
                        spaces[b.tgt].coords(&y)
                    })
                    .collect();
                Matrix::from_col_vecs(f, dims[b.tgt], &cols)
            })
            .collect();
        let module = Self::from_parts(alg, dims, maps);
        let blocks = spaces.iter().map(|s| s.as_columns()).collect();
        let inclusion = ModuleMap {
            src: module.clone(),
            tgt: self.clone(),
            blocks,
        };
        Submodule {
            module,
            inclusion,
            spaces,
        }
    }

    /// Quotient by a submodule given by closed per-vertex spaces.
    pub fn quotient_by(&self, spaces: &[Subspace<F>]) -> QuotientModule<F> {
        let alg = self.algebra();
        let f = self.field();
        let comps: Vec<Vec<usize>> = spaces.iter().map(|s| s.complement_indices()).collect();
        let dims: Vec<usize> = comps.iter().map(|c| c.len()).collect();
        let maps = alg
            .generators()
            .iter()
            .enumerate()
            .map(|(gi, &g)| {
                let b = &alg.basis()[g];
                let m = self.map(gi);
                let cols: Vec<Vec<F::Elem>> = comps[b.src]
                    .iter()
                    .map(|&c| spaces[b.tgt].quotient_coords(&m.col(c)))
                    .collect();
                Matrix::from_col_vecs(f, dims[b.tgt], &cols)
            })
            .collect();
        let module = Self::from_parts(alg, dims.clone(), maps);
        let blocks = (0..spaces.len())
            .map(|v| {
                let n = self.dims()[v];
                let cols: Vec<Vec<F::Elem>> = (0..n)
                    .map(|j| {
                        let mut e = vec![f.zero(); n];
                        e[j] = f.one();
                        spaces[v].quotient_coords(&e)
                    })
                    .collect();
                Matrix::from_col_vecs(f, dims[v], &cols)
            })
            .collect();
        let projection = ModuleMap {
            src: self.clone(),
            tgt: module.clone(),
            blocks,
        };
        QuotientModule { module, projection }
    }

    pub fn radical(&self) -> Submodule<F> {
        self.submodule_from_spaces(self.radical_spaces())
    }

    pub fn top(&self) -> QuotientModule<F> {
        self.quotient_by(&self.radical_spaces())
    }

    pub fn socle(&self) -> Submodule<F> {
        self.submodule_from_spaces(self.socle_spaces())
    }

    /// `I * M` for a two-sided ideal `I` spanned by the given algebra elements.
    pub fn ideal_times(&self, ideal: &[Vec<F::Elem>]) -> Submodule<F> {
        let f = self.field();
        let mut spaces: Vec<Subspace<F>> = self.dims().iter().map(|&d| Subspace::new(f, d)).collect();
        for a in ideal {
            let m = self.element_action(a);
            for j in 0..m.cols() {
                for (v, comp) in self.split(&m.col(j)).into_iter().enumerate() {
                    spaces[v].insert(&comp);
                }
            }
        }
        self.submodule_from_spaces(spaces)
    }

    /// `{m : a m = 0 for all a in I}`.
    pub fn annihilated_by(&self, ideal: &[Vec<F::Elem>]) -> Submodule<F> {
        let f = self.field();
        let mut stacked = Matrix::zeros(f, 0, self.dim());
        for a in ideal {
            stacked = stacked.vstack(&self.element_action(a));
        }
        let mut spaces: Vec<Subspace<F>> = self.dims().iter().map(|&d| Subspace::new(f, d)).collect();
        for x in stacked.kernel_basis() {
            for (v, comp) in self.split(&x).into_iter().enumerate() {
                spaces[v].insert(&comp);
            }
        }
        self.submodule_from_spaces(spaces)
    }

    /// The module `e M` over the corner algebra.
    pub fn restrict_corner(&self, corner: &Corner<F>) -> Module<F> {
        let gamma = &corner.algebra;
        let dims: Vec<usize> = corner.vertices.iter().map(|&v| self.dims()[v]).collect();
        let maps = gamma
            .generators()
            .iter()
            .map(|&g| self.basis_actions()[corner.embed[g]].clone())
            .collect();
        Self::from_parts(gamma, dims, maps)
    }

    /// Views a module over `A / I` as a module over `A`.
    pub fn inflate(&self, quotient: &Quotient<F>, ambient: &Arc<AlgebraTable<F>>) -> Module<F> {
        let f = self.field();
        let mut qpos = vec![None; ambient.num_vertices()];
        for (i, &v) in quotient.vertex_map.iter().enumerate() {
            qpos[v] = Some(i);
        }
        let dims: Vec<usize> = (0..ambient.num_vertices())
            .map(|v| qpos[v].map(|i| self.dims()[i]).unwrap_or(0))
            .collect();
        let maps = ambient
            .generators()
            .iter()
            .map(|&g| {
                let b = &ambient.basis()[g];
                let mut m = Matrix::zeros(f, dims[b.tgt], dims[b.src]);
                if dims[b.tgt] > 0 && dims[b.src] > 0 {
                    let img = quotient.project(&ambient.unit_vector(g));
                    for (k, c) in img.iter().enumerate() {
                        if !f.is_zero(c) {
                            m.add_scaled(c, &self.basis_actions()[k]);
                        }
                    }
                }
                m
            })
            .collect();
        Self::from_parts(ambient, dims, maps)
    }

    /// Views a module annihilated by `I` as a module over `A / I`; `None` if not annihilated.
    pub fn deflate(&self, quotient: &Quotient<F>) -> Option<Module<F>> {
        for v in quotient.ideal.basis() {
            if !self.element_action(v).is_zero() {
                return None;
            }
        }
        for (v, &d) in self.dims().iter().enumerate() {
            if d > 0 && !quotient.vertex_map.contains(&v) {
                return None;
            }
        }
        let q = &quotient.algebra;
        let dims: Vec<usize> = quotient.vertex_map.iter().map(|&v| self.dims()[v]).collect();
        let maps = q
            .generators()
            .iter()
            .map(|&g| self.basis_actions()[quotient.keep[g]].clone())
            .collect();
        Some(Self::from_parts(q, dims, maps))
    }

    /// Cokernel of a random map into a sum of projectives, deterministic per `(seed, size)`.
    /// The total dimension never exceeds `max(size, 1)` unless the algebra has no vertices.
    pub fn random(alg: &Arc<AlgebraTable<F>>, seed: u64, size: usize) -> Module<F> {
        use rand::Rng;
        let f = alg.field();
        let nv = alg.num_vertices();
        if nv == 0 {
            return Self::zero(alg);
        }
        let size = size.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let projs: Vec<Module<F>> = (0..nv).map(|v| Self::projective(alg, v)).collect();
        let mut parts = Vec::new();
        let mut total = 0;
        let want = rng.gen_range(1..=3);
        for _ in 0..want * 4 {
            if parts.len() == want {
                break;
            }
            let v = rng.gen_range(0..nv);
            if total + projs[v].dim() <= size || parts.is_empty() {
                total += projs[v].dim();
                parts.push(projs[v].clone());
            }
        }
        let mut m = Self::direct_sum(alg, &parts);
        let rels = rng.gen_range(0..=3);
        let rad = m.radical_spaces();
        let mut gens = Vec::new();
        for _ in 0..rels {
            let v = rng.gen_range(0..nv);
            if rad[v].dim() == 0 {
                continue;
            }
            let mut x = vec![f.zero(); m.dim()];
            for row in rad[v].basis() {
                let c = f.random_elem(&mut rng);
                for (i, y) in row.iter().enumerate() {
                    let idx = m.offset(v) + i;
                    x[idx] = f.add(&x[idx], &f.mul(&c, y));
                }
            }
            gens.push(x);
        }
        let sub = m.submodule_generated(&gens);
        m = m.quotient_by(&sub.spaces).module;
        while m.dim() > size {
            let soc = m.socle_spaces();
            let v = (0..nv).find(|&v| soc[v].dim() > 0).expect("nonzero module has a socle");
            let row = soc[v].basis()[rng.gen_range(0..soc[v].dim())].clone();
            let mut x = vec![f.zero(); m.dim()];
            x[m.offset(v)..m.offset(v + 1)].clone_from_slice(&row);
            let sub = m.submodule_generated(&[x]);
            m = m.quotient_by(&sub.spaces).module;
        }
        m
    }
}

impl<F: Field> ModuleMap<F> {
    pub fn zero(src: &Module<F>, tgt: &Module<F>) -> Self {
        let f = src.field();
        let blocks = (0..src.dims().len())
            .map(|v| Matrix::zeros(f, tgt.dims()[v], src.dims()[v]))
            .collect();
        Self {
            src: src.clone(),
            tgt: tgt.clone(),
            blocks,
        }
    }

    pub fn identity(m: &Module<F>) -> Self {
        let f = m.field();
        Self {
            src: m.clone(),
            tgt: m.clone(),
            blocks: m.dims().iter().map(|&d| Matrix::identity(f, d)).collect(),
        }
    }

    /// Block-diagonal matrix on the total spaces.
    pub fn full_matrix(&self) -> Matrix<F> {
        let f = self.src.field();
        let mut m = Matrix::zeros(f, self.tgt.dim(), self.src.dim());
        for (v, b) in self.blocks.iter().enumerate() {
            m.set_block(self.tgt.offset(v), self.src.offset(v), b);
        }
        m
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &ModuleMap<F>) -> ModuleMap<F> {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.mul(b)).collect();
        ModuleMap {
            src: other.src.clone(),
            tgt: self.tgt.clone(),
            blocks,
        }
    }

    pub fn add(&self, other: &ModuleMap<F>) -> ModuleMap<F> {
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.add(b)).collect();
        ModuleMap {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            blocks,
        }
    }

    pub fn scale(&self, c: &F::Elem) -> ModuleMap<F> {
        ModuleMap {
            src: self.src.clone(),
            tgt: self.tgt.clone(),
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank()).sum()
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.src.dim()
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.tgt.dim()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.src.dim() == self.tgt.dim() && self.is_injective()
    }

    /// Whether the map intertwines every generator action.
    pub fn is_homomorphism(&self) -> bool {
        let alg = self.src.algebra();
        alg.generators().iter().enumerate().all(|(gi, &g)| {
            let b = &alg.basis()[g];
            self.tgt.map(gi).mul(&self.blocks[b.src]) == self.blocks[b.tgt].mul(self.src.map(gi))
        })
    }

    /// Flattened blocks, used to compare maps as vectors.
    pub fn flatten(&self) -> Vec<F::Elem> {
        self.blocks.iter().flat_map(|b| b.data().iter().cloned()).collect()
    }

    pub fn kernel(&self) -> Submodule<F> {
        let f = self.src.field();
        let spaces = self
            .blocks
            .iter()
            .enumerate()
            .map(|(v, b)| Subspace::spanned_by(f, self.src.dims()[v], &b.kernel_basis()))
            .collect();
        self.src.submodule_from_spaces(spaces)
    }

    pub fn image(&self) -> Submodule<F> {
        let f = self.src.field();
        let spaces = self
            .blocks
            .iter()
            .enumerate()
            .map(|(v, b)| {
                let cols: Vec<Vec<F::Elem>> = (0..b.cols()).map(|j| b.col(j)).collect();
                Subspace::spanned_by(f, self.tgt.dims()[v], &cols)
            })
            .collect();
        self.tgt.submodule_from_spaces(spaces)
    }

    pub fn cokernel(&self) -> QuotientModule<F> {
        let img = self.image();
        self.tgt.quotient_by(&img.spaces)
    }

    /// The map between corner restrictions.
    pub fn restrict_corner(&self, corner: &Corner<F>, src: &Module<F>, tgt: &Module<F>) -> ModuleMap<F> {
        ModuleMap {
            src: src.clone(),
            tgt: tgt.clone(),
            blocks: corner.vertices.iter().map(|&v| self.blocks[v].clone()).collect(),
        }
    }

    /// The transpose map between duals, from `D tgt` to `D src`.
    pub fn dual(&self, dsrc: &Module<F>, dtgt: &Module<F>) -> ModuleMap<F> {
        ModuleMap {
            src: dtgt.clone(),
            tgt: dsrc.clone(),
            blocks: self.blocks.iter().map(|b| b.transpose()).collect(),
        }
    }
}

/// Basis of `Hom(M, N)` from the intertwining equations `N_g f_s = f_t M_g`.
pub fn hom_basis<F: Field>(m: &Module<F>, n: &Module<F>) -> Vec<ModuleMap<F>> {
    let alg = m.algebra();
    let f = m.field();
    let nv = alg.num_vertices();
    let mut var_off = Vec::with_capacity(nv + 1);
    let mut acc = 0;
    for v in 0..nv {
        var_off.push(acc);
        acc += n.dims()[v] * m.dims()[v];
    }
    let nvars = acc;
    if nvars == 0 {
        return Vec::new();
    }
    let var = |v: usize, r: usize, c: usize| var_off[v] + r * m.dims()[v] + c;
    let mut rows: Vec<Vec<F::Elem>> = Vec::new();
    for (gi, &g) in alg.generators().iter().enumerate() {
        let b = &alg.basis()[g];
        let (s, t) = (b.src, b.tgt);
        let (ng, mg) = (n.map(gi), m.map(gi));
        for r in 0..n.dims()[t] {
            for c in 0..m.dims()[s] {
                let mut row = vec![f.zero(); nvars];
                for k in 0..n.dims()[s] {
                    let a = &ng[(r, k)];
                    if !f.is_zero(a) {
                        let idx = var(s, k, c);
                        row[idx] = f.add(&row[idx], a);
                    }
                }
                for k in 0..m.dims()[t] {
                    let a = &mg[(k, c)];
                    if !f.is_zero(a) {
                        let idx = var(t, r, k);
                        row[idx] = f.sub(&row[idx], a);
                    }
                }
                if row.iter().any(|x| !f.is_zero(x)) {
                    rows.push(row);
                }
            }
        }
    }
    let system = Matrix::from_row_vecs(f, nvars, &rows);
    system
        .kernel_basis()
        .into_iter()
        .map(|x| {
            let blocks = (0..nv)
                .map(|v| {
                    let (r, c) = (n.dims()[v], m.dims()[v]);
                    Matrix::from_rows(f, r, c, x[var_off[v]..var_off[v] + r * c].to_vec())
                })
                .collect();
            ModuleMap {
                src: m.clone(),
                tgt: n.clone(),
                blocks,
            }
        })
        .collect()
}

pub fn hom_dim<F: Field>(m: &Module<F>, n: &Module<F>) -> usize {
    hom_basis(m, n).len()
}

const DECOMPOSE_SEED: u64 = 0x6b72_756c_6c73;
const SPLIT_ATTEMPTS: usize = 48;

enum SplitOutcome<F: Field> {
    Indecomposable,
    Split(Vec<Subspace<F>>, Vec<Subspace<F>>),
}

fn random_combination<F: Field>(f: &F, basis: &[Matrix<F>], rng: &mut ChaCha8Rng) -> Matrix<F> {
    let mut m = Matrix::zeros(f, basis[0].rows(), basis[0].cols());
    for b in basis {
        m.add_scaled(&f.random_elem(rng), b);
    }
    m
}

fn try_split<F: Field>(m: &Module<F>, seed: u64) -> Result<SplitOutcome<F>, ModuleError> {
    let f = m.field();
    let n = m.dim();
    let p = f.characteristic();
    if p != 0 && p <= n as u64 {
        return Err(ModuleError::FieldTooSmall { p, dim: n });
    }
    let ends: Vec<Matrix<F>> = hom_basis(m, m).iter().map(|h| h.full_matrix()).collect();
    if ends.len() == 1 {
        return Ok(SplitOutcome::Indecomposable);
    }
    // Radical of End(M) is the kernel of the trace form.
    let e = ends.len();
    let mut gram = Matrix::zeros(f, e, e);
    for i in 0..e {
        for j in i..e {
            let t = ends[i].mul(&ends[j]).trace();
            gram[(i, j)] = t.clone();
            gram[(j, i)] = t;
        }
    }
    let semisimple_dim = gram.rank();
    if semisimple_dim == 1 {
        return Ok(SplitOutcome::Indecomposable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..SPLIT_ATTEMPTS {
        let phi = if attempt < ends.len().min(4) {
            ends[attempt].add(&random_combination(f, &ends, &mut rng).scale(&f.from_i64(attempt as i64)))
        } else {
            random_combination(f, &ends, &mut rng)
        };
        let chi = char_poly(f, &phi);
        let fact = f.factor(&chi);
        if fact.parts.len() >= 2 {
            let first = fact.parts[0].poly.pow(f, fact.parts[0].multiplicity);
            let mut rest = crate::poly::Poly::one(f);
            for part in &fact.parts[1..] {
                rest = rest.mul(f, &part.poly.pow(f, part.multiplicity));
            }
            let u = graded_kernel(m, &first.eval_matrix(f, &phi));
            let w = graded_kernel(m, &rest.eval_matrix(f, &phi));
            return Ok(SplitOutcome::Split(u, w));
        }
        if let Some(part) = fact.parts.first() {
            if part.irreducible && part.poly.degree() == Some(semisimple_dim) {
                return Ok(SplitOutcome::Indecomposable);
            }
        }
    }
    Err(ModuleError::DecompositionUndecided { dim: n })
}

fn graded_kernel<F: Field>(m: &Module<F>, a: &Matrix<F>) -> Vec<Subspace<F>> {
    let f = m.field();
    (0..m.dims().len())
        .map(|v| {
            let (o, d) = (m.offset(v), m.dims()[v]);
            let block = a.block(o, o, d, d);
            Subspace::spanned_by(f, d, &block.kernel_basis())
        })
        .collect()
}

fn indecomposable_pieces<F: Field>(m: &Module<F>, seed: u64) -> Result<Vec<ModuleMap<F>>, ModuleError> {
    if m.is_zero() {
        return Ok(Vec::new());
    }
    match try_split(m, seed)? {
        SplitOutcome::Indecomposable => Ok(vec![ModuleMap::identity(m)]),
        SplitOutcome::Split(u, w) => {
            let mut out = Vec::new();
            for (i, spaces) in [u, w].into_iter().enumerate() {
                let sub = m.submodule_from_spaces(spaces);
                for piece in indecomposable_pieces(&sub.module, seed.wrapping_add(1 + i as u64))? {
                    out.push(sub.inclusion.compose(&piece));
                }
            }
            Ok(out)
        }
    }
}

/// Decides `M ≅ N` for indecomposable `M`: some composite of basis maps must be invertible.
pub fn iso_indecomposable<F: Field>(m: &Module<F>, n: &Module<F>) -> Option<ModuleMap<F>> {
    if m.dims() != n.dims() || !same_algebra(m.algebra(), n.algebra()) {
        return None;
    }
    if m.is_zero() {
        return Some(ModuleMap::zero(m, n));
    }
    let there = hom_basis(m, n);
    if there.is_empty() {
        return None;
    }
    let f = m.field();
    let mut rng = ChaCha8Rng::seed_from_u64(DECOMPOSE_SEED);
    for _ in 0..2 {
        let mut h = ModuleMap::zero(m, n);
        for b in &there {
            h = h.add(&b.scale(&f.random_elem(&mut rng)));
        }
        if h.is_isomorphism() {
            return Some(h);
        }
    }
    let back = hom_basis(n, m);
    for a in &there {
        for b in &back {
            if b.compose(a).is_isomorphism() {
                return Some(a.clone());
            }
        }
    }
    None
}

impl<F: Field> Module<F> {
    pub fn decompose(&self) -> Result<Decomposition<F>, ModuleError> {
        self.decompose_with_seed(DECOMPOSE_SEED)
    }

    /// Krull-Schmidt decomposition using a specific seed for the random endomorphisms.
    pub fn decompose_with_seed(&self, seed: u64) -> Result<Decomposition<F>, ModuleError> {
        let pieces = indecomposable_pieces(self, seed)?;
        let mut summands: Vec<(Module<F>, usize)> = Vec::new();
        let mut piece_class = Vec::new();
        for p in &pieces {
            let found = summands
                .iter()
                .position(|(rep, _)| iso_indecomposable(rep, &p.src).is_some());
            match found {
                Some(i) => {
                    summands[i].1 += 1;
                    piece_class.push(i);
                }
                None => {
                    summands.push((p.src.clone(), 1));
                    piece_class.push(summands.len() - 1);
                }
            }
        }
        Ok(Decomposition {
            summands,
            pieces,
            piece_class,
        })
    }

    pub fn is_indecomposable(&self) -> Result<bool, ModuleError> {
        if self.is_zero() {
            return Ok(false);
        }
        Ok(matches!(try_split(self, DECOMPOSE_SEED)?, SplitOutcome::Indecomposable))
    }

    /// An isomorphism `self -> other`, if one exists.
    pub fn find_isomorphism(&self, other: &Module<F>) -> Result<Option<ModuleMap<F>>, ModuleError> {
        if !same_algebra(self.algebra(), other.algebra()) {
            return Err(ModuleError::AlgebraMismatch);
        }
        if self.dims() != other.dims() {
            return Ok(None);
        }
        if self.is_zero() {
            return Ok(Some(ModuleMap::zero(self, other)));
        }
        let f = self.field();
        let homs = hom_basis(self, other);
        if homs.is_empty() {
            return Ok(None);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(DECOMPOSE_SEED ^ 0x55);
        for _ in 0..3 {
            let mut h = ModuleMap::zero(self, other);
            for b in &homs {
                h = h.add(&b.scale(&f.random_elem(&mut rng)));
            }
            if h.is_isomorphism() {
                return Ok(Some(h));
            }
        }
        if homs.len() == 1 && homs[0].is_isomorphism() {
            return Ok(Some(homs[0].clone()));
        }
        // Decide by matching indecomposable pieces.
        let dm = self.decompose()?;
        let dn = other.decompose()?;
        if dm.pieces.len() != dn.pieces.len() {
            return Ok(None);
        }
        let mut used = vec![false; dn.pieces.len()];
        let mut pairs = Vec::new();
        for (i, pm) in dm.pieces.iter().enumerate() {
            let mut matched = false;
            for (j, pn) in dn.pieces.iter().enumerate() {
                if used[j] {
                    continue;
                }
                if let Some(iso) = iso_indecomposable(&pm.src, &pn.src) {
                    used[j] = true;
                    pairs.push((i, j, iso));
                    matched = true;
                    break;
                }
            }
            if !matched {
                return Ok(None);
            }
        }
        // Assemble sum of incl_N . iso . proj_M, with projections from the inverse witness.
        let w = dm.witness(self);
        let winv = w.inverse().expect("decomposition witness is invertible");
        let mut total = Matrix::zeros(f, other.dim(), self.dim());
        let mut row0 = vec![0; dm.pieces.len()];
        let mut acc = 0;
        for (i, p) in dm.pieces.iter().enumerate() {
            row0[i] = acc;
            acc += p.src.dim();
        }
        for (i, j, iso) in pairs {
            let pdim = dm.pieces[i].src.dim();
            let proj = winv.block(row0[i], 0, pdim, self.dim());
            let part = dn.pieces[j].full_matrix().mul(&iso.full_matrix()).mul(&proj);
            total = total.add(&part);
        }
        let blocks = (0..self.dims().len())
            .map(|v| total.block(other.offset(v), self.offset(v), other.dims()[v], self.dims()[v]))
            .collect();
        let map = ModuleMap {
            src: self.clone(),
            tgt: other.clone(),
            blocks,
        };
        debug_assert!(map.is_homomorphism() && map.is_isomorphism());
        Ok(Some(map))
    }

    pub fn is_isomorphic(&self, other: &Module<F>) -> Result<bool, ModuleError> {
        Ok(self.find_isomorphism(other)?.is_some())
    }

    /// Whether the module is projective, tested by comparing with its projective cover's dimension.
    pub fn is_projective(&self) -> bool {
        let top = self.top_dims();
        let cover_dim: usize = top
            .iter()
            .enumerate()
            .map(|(v, &t)| t * Self::projective(self.algebra(), v).dim())
            .sum();
        cover_dim == self.dim()
    }

    /// Whether the module is injective, by the dual test over the opposite algebra.
    pub fn is_injective(&self) -> bool {
        self.dual().is_projective()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::algebra::{build_algebra, Arrow, Presentation, Quiver, RelationTerm};
    use crate::linalg::PrimeField;

    pub(crate) fn algebra(
        vertices: &[&str],
        arrows: &[(&str, &str, &str)],
        monomials: &[&[&str]],
    ) -> Arc<AlgebraTable<PrimeField>> {
        let f = PrimeField::new(101).unwrap();
        let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let idx = |n: &str| vs.iter().position(|v| v == n).unwrap();
        let arr = arrows
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
        build_algebra(
            &Presentation {
                field: f,
                quiver,
                relations,
            },
            16,
        )
        .unwrap()
    }

    pub(crate) fn f1() -> Arc<AlgebraTable<PrimeField>> {
        algebra(&["1", "2"], &[("a", "1", "2")], &[])
    }

    pub(crate) fn f2() -> Arc<AlgebraTable<PrimeField>> {
        algebra(
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
    fn standard_modules_validate() {
        let a = f2();
        for v in 0..5 {
            Module::new(&a, Module::simple(&a, v).dims().to_vec(), Module::simple(&a, v).maps().to_vec()).unwrap();
            let p = Module::projective(&a, v);
            p.validate().unwrap();
            Module::injective(&a, v).validate().unwrap();
        }
        assert_eq!(Module::projective(&a, 2).dims(), &[1, 1, 1, 1, 0]);
        assert_eq!(Module::projective(&a, 3).dim(), 1);
        assert_eq!(Module::regular(&a).dim(), 15);
    }

    #[test]
    fn injective_matches_direct_formula() {
        // (a . phi_b')(b) = coefficient of b' in b * a, for b, b' with target v.
        let a = f2();
        let f = a.field().clone();
        for v in 0..5 {
            let idx: Vec<usize> = (0..a.dim()).filter(|&k| a.basis()[k].tgt == v).collect();
            let inj = Module::injective(&a, v);
            assert_eq!(inj.dim(), idx.len());
            // Build the direct representation on the same total-space order.
            let mut order: Vec<usize> = idx.clone();
            order.sort_by_key(|&k| (a.basis()[k].src, k));
            for &g in a.generators() {
                let mut direct = Matrix::zeros(&f, order.len(), order.len());
                for (ci, &bp) in order.iter().enumerate() {
                    for (ri, &b) in order.iter().enumerate() {
                        for (k, c) in a.product(b, g) {
                            if *k == bp {
                                direct[(ri, ci)] = *c;
                            }
                        }
                    }
                }
                assert_eq!(inj.full_action(g), direct);
            }
        }
    }

    #[test]
    fn hom_dimensions() {
        let a = f1();
        let p1 = Module::projective(&a, 0);
        let s2 = Module::simple(&a, 1);
        let s1 = Module::simple(&a, 0);
        assert_eq!(hom_dim(&p1, &s2), 0);
        assert_eq!(hom_dim(&s1, &s1), 1);
        let b = f2();
        let m = Module::random(&b, 3, 8);
        for v in 0..5 {
            assert_eq!(hom_dim(&Module::projective(&b, v), &m), m.dims()[v]);
        }
    }

    #[test]
    fn trace_ideal_decomposition_f2() {
        let a = f2();
        let reg = Module::regular(&a);
        let s = [2usize, 3, 4];
        // Two-sided: close under right multiplication by all basis elements.
        let mut two_sided = Vec::new();
        for &v in &s {
            let ev = a.unit_vector(a.idempotents()[v]);
            for k in 0..a.dim() {
                for j in 0..a.dim() {
                    let x = a.mul(&a.mul(&a.unit_vector(k), &ev), &a.unit_vector(j));
                    two_sided.push(x);
                }
            }
        }
        let ideal = Subspace::spanned_by(a.field(), a.dim(), &two_sided);
        assert_eq!(ideal.dim(), 11);
        let vecs: Vec<Vec<u64>> = ideal
            .basis()
            .iter()
            .map(|x| {
                let mut y = vec![0u64; reg.dim()];
                for (k, c) in x.iter().enumerate() {
                    y[Module::regular_position(&a, k)] = *c;
                }
                y
            })
            .collect();
        let sub = reg.submodule_generated(&vecs);
        assert_eq!(sub.module.dim(), 11);
        let d = sub.module.decompose().unwrap();
        let mut found: Vec<(Vec<usize>, usize)> =
            d.summands.iter().map(|(m, k)| (m.dims().to_vec(), *k)).collect();
        found.sort();
        let mut expect = vec![
            (Module::projective(&a, 2).dims().to_vec(), 1),
            (Module::projective(&a, 3).dims().to_vec(), 3),
            (Module::projective(&a, 4).dims().to_vec(), 1),
            (Module::simple(&a, 4).dims().to_vec(), 2),
        ];
        expect.sort();
        assert_eq!(found, expect);
        assert!(d.witness(&sub.module).is_invertible());
    }

    #[test]
    fn regular_decomposes_into_projectives() {
        let a = f2();
        let d = Module::regular(&a).decompose().unwrap();
        assert_eq!(d.summands.len(), 5);
        assert!(d.summands.iter().all(|(_, k)| *k == 1));
    }

    #[test]
    fn isomorphism_of_sums_in_different_orders() {
        let a = f2();
        let x = Module::direct_sum(&a, &[Module::simple(&a, 0), Module::projective(&a, 2)]);
        let y = Module::direct_sum(&a, &[Module::projective(&a, 2), Module::simple(&a, 0)]);
        let iso = x.find_isomorphism(&y).unwrap().unwrap();
        assert!(iso.is_homomorphism() && iso.is_isomorphism());
        assert!(!Module::simple(&a, 0).is_isomorphic(&Module::simple(&a, 1)).unwrap());
        let s = Module::direct_sum(&a, &[Module::simple(&a, 0), Module::simple(&a, 0)]);
        let d = s.decompose().unwrap();
        assert_eq!(d.summands.len(), 1);
        assert_eq!(d.summands[0].1, 2);
    }

    #[test]
    fn dual_roundtrip_and_duality_of_hom() {
        let a = f2();
        let m = Module::random(&a, 11, 9);
        let dd = m.dual().dual();
        assert!(Arc::ptr_eq(dd.algebra(), &a));
        assert!(dd.same_representation(&m));
        let n = Module::random(&a, 12, 9);
        assert_eq!(hom_dim(&m, &n), hom_dim(&n.dual(), &m.dual()));
        let p = Module::projective(&a, 0).dual();
        assert!(p.is_injective() || p.dual().is_projective());
    }

    #[test]
    fn random_is_deterministic_and_bounded() {
        let a = f2();
        let x = Module::random(&a, 5, 6);
        let y = Module::random(&a, 5, 6);
        assert!(x.same_representation(&y));
        for seed in 0..30 {
            let m = Module::random(&a, seed, 6);
            assert!(m.dim() <= 6);
            m.validate().unwrap();
        }
    }

    #[test]
    fn field_too_small() {
        let f = PrimeField::new(2).unwrap();
        let vs = vec!["1".to_string(), "2".to_string()];
        let quiver = Quiver::new(vs, vec![Arrow { name: "a".into(), from: 0, to: 1 }]).unwrap();
        let a = build_algebra(
            &Presentation {
                field: f,
                quiver,
                relations: vec![],
            },
            4,
        )
        .unwrap();
        let p = Module::projective(&a, 0);
        assert_eq!(p.decompose().unwrap_err(), ModuleError::FieldTooSmall { p: 2, dim: 2 });
    }

    #[test]
    fn corner_restriction_and_inflation() {
        let a = f2();
        let c = a.corner(&[2, 3, 4]).unwrap();
        let ep1 = Module::projective(&a, 0).restrict_corner(&c);
        assert_eq!(ep1.dim(), 2);
        ep1.validate().unwrap();
        let ep3 = Module::projective(&a, 2).restrict_corner(&c);
        assert!(ep3.is_isomorphic(&Module::projective(&c.algebra, 0)).unwrap());
    }
}

//! Serializable summaries behind the command-line reports.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraTable;
use crate::homology::{is_selfinjective, PdResult};
use crate::ideal::{gld_of, BoundConfig, BoundReport, IdealContext, Quantity, StrongIdempotency};
use crate::igusa::{phi_l, phi_r, PhiReport};
use crate::io::SCHEMA;
use crate::linalg::{Field, FieldSpec};
use crate::module::{Module, ModuleError};
use crate::registry::Workspace;
use crate::suite::{gen_corpus, SuiteConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandEntry {
    /// `P(v)`, `I(v)`, `S(v)` when the summand is one of these, else `M<dims>`.
    pub name: String,
    pub dims: Vec<usize>,
    pub multiplicity: usize,
}

/// Names an indecomposable by comparison with the standard modules.
pub fn name_indecomposable<F: Field>(m: &Module<F>) -> String {
    let alg = m.algebra();
    let names = alg.vertices();
    let top = m.top_dims();
    let soc = m.socle_dims();
    let single = |d: &[usize]| -> Option<usize> {
        let mut it = d.iter().enumerate().filter(|(_, &k)| k > 0);
        match (it.next(), it.next()) {
            (Some((v, 1)), None) => Some(v),
            _ => None,
        }
    };
    if m.dim() == 1 {
        if let Some(v) = single(m.dims()) {
            return format!("S({})", names[v]);
        }
    }
    if let Some(v) = single(&top) {
        if m.is_isomorphic(&Module::projective(alg, v)).unwrap_or(false) {
            return format!("P({})", names[v]);
        }
    }
    if let Some(v) = single(&soc) {
        if m.is_isomorphic(&Module::injective(alg, v)).unwrap_or(false) {
            return format!("I({})", names[v]);
        }
    }
    format!("M{:?}", m.dims())
}

pub fn describe<F: Field>(m: &Module<F>) -> Result<Vec<SummandEntry>, ModuleError> {
    let d = m.decompose()?;
    let mut out: Vec<SummandEntry> = d
        .summands
        .iter()
        .map(|(rep, k)| SummandEntry {
            name: name_indecomposable(rep),
            dims: rep.dims().to_vec(),
            multiplicity: *k,
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(&b.name).then(a.dims.cmp(&b.dims)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSummary {
    pub dim: usize,
    pub vertices: Vec<String>,
    pub projective_dims: Vec<usize>,
    pub injective_dims: Vec<usize>,
    pub radical_dim: usize,
    pub gld: Quantity,
    pub selfinjective: bool,
}

impl AlgebraSummary {
    pub fn of<F: Field>(ws: &Workspace<F>, alg: &Arc<AlgebraTable<F>>, bound: usize) -> Self {
        let n = alg.num_vertices();
        Self {
            dim: alg.dim(),
            vertices: alg.vertices().to_vec(),
            projective_dims: (0..n).map(|v| Module::projective(alg, v).dim()).collect(),
            injective_dims: (0..n).map(|v| Module::injective(alg, v).dim()).collect(),
            radical_dim: alg.radical().len(),
            gld: gld_of(ws, alg, bound),
            selfinjective: n == 0 || is_selfinjective(alg),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InspectReport {
    pub schema: String,
    pub field: FieldSpec,
    pub algebra: AlgebraSummary,
    pub basis: Vec<String>,
    pub gabriel_arrows: Vec<(String, String)>,
}

pub fn inspect<F: Field>(alg: &Arc<AlgebraTable<F>>, bound: usize) -> InspectReport {
    let names = alg.vertices();
    InspectReport {
        schema: SCHEMA.into(),
        field: alg.field().spec(),
        algebra: AlgebraSummary::of(&Workspace::new(), alg, bound),
        basis: alg.basis().iter().map(|b| b.label.clone()).collect(),
        gabriel_arrows: alg
            .gabriel_arrows()
            .into_iter()
            .map(|(a, b)| (names[a].clone(), names[b].clone()))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiSide {
    L,
    R,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiOutput {
    pub schema: String,
    pub module: String,
    pub side: PhiSide,
    pub dims: Vec<usize>,
    pub report: PhiReport,
}

pub fn phi<F: Field>(m: &Module<F>, expr: &str, side: PhiSide, max_steps: usize) -> Result<PhiOutput, ModuleError> {
    let ws = Workspace::new();
    let report = match side {
        PhiSide::L => phi_l(&ws, m, max_steps)?,
        PhiSide::R => phi_r(&ws, m, max_steps)?,
    };
    Ok(PhiOutput {
        schema: SCHEMA.into(),
        module: expr.into(),
        side,
        dims: m.dims().to_vec(),
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealSummary {
    pub schema: String,
    pub vertices: Vec<String>,
    pub ideal_dim: usize,
    pub ideal_decomposition: Vec<SummandEntry>,
    pub pd_ideal: PdResult,
    pub strong: StrongIdempotency,
    pub corner: AlgebraSummary,
    pub quotient: AlgebraSummary,
    pub bound_report: BoundReport,
}

impl IdealSummary {
    pub fn has_failures(&self) -> bool {
        self.bound_report.has_failures()
    }

    pub fn has_unknowns(&self) -> bool {
        self.bound_report.has_unknowns()
            || matches!(self.pd_ideal, PdResult::Unknown(_))
            || matches!(self.strong, StrongIdempotency::Unknown { .. })
    }
}

pub fn ideal_summary<F: Field>(ctx: &IdealContext<F>, suite: &SuiteConfig) -> Result<IdealSummary, ModuleError> {
    let bound = suite.bound;
    let corpus: Vec<(String, Module<F>)> = gen_corpus(ctx, suite).into_iter().map(|e| (e.label, e.module)).collect();
    let cfg = BoundConfig {
        bound,
        max_steps: suite.max_steps,
        printed: suite.printed.clone(),
    };
    let names = ctx.lambda.vertices();
    Ok(IdealSummary {
        schema: SCHEMA.into(),
        vertices: ctx.vertices.iter().map(|&v| names[v].clone()).collect(),
        ideal_dim: ctx.ideal_module.dim(),
        ideal_decomposition: describe(&ctx.ideal_module)?,
        pd_ideal: ctx.ws.pd(&ctx.ideal_module, bound)?,
        strong: ctx.strong_idempotency(bound),
        corner: AlgebraSummary::of(&ctx.ws, ctx.gamma(), bound),
        quotient: AlgebraSummary::of(&ctx.ws, ctx.quotient_algebra(), bound),
        bound_report: ctx.bound_report(&corpus, &cfg)?,
    })
}

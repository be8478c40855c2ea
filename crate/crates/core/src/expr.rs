//! Module expressions: `S(v) | P(v) | I(v) | D(e) | Sum(e,...) | Omega(n,e) | OmegaInv(n,e) | Rad(e) | Top(e) | Soc(e)`,
//! plus `Zero`, `Rand(seed,size)`, and with a vertex subset `Ideal`, `Quot`, `Infl(e)`.

use std::fmt;
use std::sync::Arc;

use crate::algebra::AlgebraTable;
use crate::homology::{cosyzygy, syzygy};
use crate::ideal::IdealContext;
use crate::linalg::Field;
use crate::module::Module;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Zero,
    S(String),
    P(String),
    I(String),
    D(Box<Expr>),
    Sum(Vec<Expr>),
    Omega(usize, Box<Expr>),
    OmegaInv(usize, Box<Expr>),
    Rad(Box<Expr>),
    Top(Box<Expr>),
    Soc(Box<Expr>),
    Rand(u64, usize),
    /// The ideal `ΛeΛ` as a left module.
    Ideal,
    /// `Λ/𝔄` as a left module.
    Quot,
    /// An expression over `Λ/𝔄`, viewed over `Λ`.
    Infl(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("`{0}` needs a vertex subset")]
    NeedsIdeal(&'static str),
    #[error("summands of `{0}` live over different algebras")]
    AlgebraMismatch(String),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Zero => write!(f, "Zero"),
            Expr::S(v) => write!(f, "S({v})"),
            Expr::P(v) => write!(f, "P({v})"),
            Expr::I(v) => write!(f, "I({v})"),
            Expr::D(e) => write!(f, "D({e})"),
            Expr::Sum(es) => {
                write!(f, "Sum(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, ")")
            }
            Expr::Omega(n, e) => write!(f, "Omega({n},{e})"),
            Expr::OmegaInv(n, e) => write!(f, "OmegaInv({n},{e})"),
            Expr::Rad(e) => write!(f, "Rad({e})"),
            Expr::Top(e) => write!(f, "Top({e})"),
            Expr::Soc(e) => write!(f, "Soc({e})"),
            Expr::Rand(s, n) => write!(f, "Rand({s},{n})"),
            Expr::Ideal => write!(f, "Ideal"),
            Expr::Quot => write!(f, "Quot"),
            Expr::Infl(e) => write!(f, "Infl({e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Comma,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let mut it = s.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        match c {
            '(' => {
                out.push((i, Tok::Open));
                it.next();
            }
            ')' => {
                out.push((i, Tok::Close));
                it.next();
            }
            ',' => {
                out.push((i, Tok::Comma));
                it.next();
            }
            c if c.is_whitespace() => {
                it.next();
            }
            c if c.is_alphanumeric() || c == '_' || c == '\'' || c == '.' || c == '-' => {
                let mut w = String::new();
                while let Some(&(_, c)) = it.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' || c == '.' || c == '-' {
                        w.push(c);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push((i, Tok::Word(w)));
            }
            other => {
                return Err(ExprError::Parse {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn word(&mut self) -> Result<String, ExprError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.err("expected a name"),
        }
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T, ExprError> {
        let at = self.offset();
        let w = self.word()?;
        w.parse().map_err(|_| ExprError::Parse {
            pos: at,
            msg: format!("expected a number, found `{w}`"),
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let head = self.word()?;
        let bare = |e: Expr, p: &mut Parser| -> Result<Expr, ExprError> {
            if p.peek() == Some(&Tok::Open) {
                p.pos += 1;
                p.expect(Tok::Close, "`)`")?;
            }
            Ok(e)
        };
        match head.as_str() {
            "Zero" => return bare(Expr::Zero, self),
            "Ideal" => return bare(Expr::Ideal, self),
            "Quot" => return bare(Expr::Quot, self),
            _ => {}
        }
        self.expect(Tok::Open, "`(`")?;
        let e = match head.as_str() {
            "S" => Expr::S(self.word()?),
            "P" => Expr::P(self.word()?),
            "I" => Expr::I(self.word()?),
            "D" => Expr::D(Box::new(self.expr()?)),
            "Rad" => Expr::Rad(Box::new(self.expr()?)),
            "Top" => Expr::Top(Box::new(self.expr()?)),
            "Soc" => Expr::Soc(Box::new(self.expr()?)),
            "Infl" => Expr::Infl(Box::new(self.expr()?)),
            "Omega" | "OmegaInv" => {
                let n = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                let e = Box::new(self.expr()?);
                if head == "Omega" {
                    Expr::Omega(n, e)
                } else {
                    Expr::OmegaInv(n, e)
                }
            }
            "Rand" => {
                let s = self.number()?;
                self.expect(Tok::Comma, "`,`")?;
                Expr::Rand(s, self.number()?)
            }
            "Sum" => {
                let mut parts = vec![self.expr()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    parts.push(self.expr()?);
                }
                Expr::Sum(parts)
            }
            other => return self.err(format!("unknown constructor `{other}`")),
        };
        self.expect(Tok::Close, "`)`")?;
        Ok(e)
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        let mut p = Parser {
            toks: lex(s)?,
            pos: 0,
            end: s.len(),
        };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return p.err("trailing input");
        }
        Ok(e)
    }
}

/// Where expressions are evaluated.
pub struct Env<'a, F: Field> {
    pub algebra: Arc<AlgebraTable<F>>,
    pub ideal: Option<&'a IdealContext<F>>,
}

impl<'a, F: Field> Env<'a, F> {
    pub fn new(algebra: &Arc<AlgebraTable<F>>) -> Self {
        Self {
            algebra: algebra.clone(),
            ideal: None,
        }
    }

    pub fn with_ideal(ctx: &'a IdealContext<F>) -> Self {
        Self {
            algebra: ctx.lambda.clone(),
            ideal: Some(ctx),
        }
    }

    fn vertex(&self, name: &str) -> Result<usize, ExprError> {
        self.algebra
            .vertex_index(name)
            .ok_or_else(|| ExprError::UnknownVertex(name.into()))
    }

    pub fn eval(&self, e: &Expr) -> Result<Module<F>, ExprError> {
        let alg = &self.algebra;
        Ok(match e {
            Expr::Zero => Module::zero(alg),
            Expr::S(v) => Module::simple(alg, self.vertex(v)?),
            Expr::P(v) => Module::projective(alg, self.vertex(v)?),
            Expr::I(v) => Module::injective(alg, self.vertex(v)?),
            Expr::D(e) => self.eval(e)?.dual(),
            Expr::Sum(es) => {
                let parts = es.iter().map(|e| self.eval(e)).collect::<Result<Vec<_>, _>>()?;
                let first = parts[0].algebra().clone();
                if parts.iter().any(|p| !Arc::ptr_eq(p.algebra(), &first)) {
                    return Err(ExprError::AlgebraMismatch(e.to_string()));
                }
                Module::direct_sum(&first, &parts)
            }
            Expr::Omega(n, e) => syzygy(&self.eval(e)?, *n),
            Expr::OmegaInv(n, e) => cosyzygy(&self.eval(e)?, *n),
            Expr::Rad(e) => self.eval(e)?.radical().module,
            Expr::Top(e) => self.eval(e)?.top().module,
            Expr::Soc(e) => self.eval(e)?.socle().module,
            Expr::Rand(s, n) => Module::random(alg, *s, *n),
            Expr::Ideal => self.ideal.ok_or(ExprError::NeedsIdeal("Ideal"))?.ideal_module.clone(),
            Expr::Quot => self.ideal.ok_or(ExprError::NeedsIdeal("Quot"))?.quotient_module.clone(),
            Expr::Infl(e) => {
                let ctx = self.ideal.ok_or(ExprError::NeedsIdeal("Infl"))?;
                let inner = Env {
                    algebra: ctx.quotient_algebra().clone(),
                    ideal: None,
                };
                ctx.inflate(&inner.eval(e)?)
            }
        })
    }

    pub fn eval_str(&self, s: &str) -> Result<Module<F>, ExprError> {
        self.eval(&s.parse()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::tests::f2;

    #[test]
    fn round_trip() {
        for s in ["Sum(S(1),P(2))", "Omega(1,S(5))", "D(P(1))", "Infl(Rand(3,4))", "Ideal", "OmegaInv(2,Rad(I(x)))"] {
            let e: Expr = s.parse().unwrap();
            assert_eq!(e.to_string(), s);
        }
        assert!(matches!("Sum(S(1)".parse::<Expr>(), Err(ExprError::Parse { pos: 8, .. })));
        assert!("Foo(1)".parse::<Expr>().is_err());
    }

    #[test]
    fn evaluation() {
        let a = f2();
        let env = Env::new(&a);
        let m = env.eval_str("Omega(1, S(5))").unwrap();
        assert!(m.is_isomorphic(&Module::projective(&a, 3)).unwrap());
        let s = env.eval_str("Sum(S(1), P(2))").unwrap();
        assert_eq!(s.dim(), 1 + Module::projective(&a, 1).dim());
        let d = env.eval_str("D(P(1))").unwrap();
        assert!(d.is_injective());
        assert!(Arc::ptr_eq(d.algebra(), &a.opposite()));
        assert!(matches!(env.eval_str("S(9)"), Err(ExprError::UnknownVertex(_))));
        assert!(matches!(env.eval_str("Ideal"), Err(ExprError::NeedsIdeal(_))));
        assert!(matches!(env.eval_str("Sum(S(1),D(S(1)))"), Err(ExprError::AlgebraMismatch(_))));
    }
}

//! Interpretation of types as presheaves and of terms in context as
//! natural transformations `⟦Γ⟧ -> ⟦B⟧`, with equality read through
//! `i ∘ δ` and the modality through `i ∘ τ`.
//!
//! A term in context is evaluated to a full table: for every object `C`
//! and every `γ` in `⟦Γ⟧(C)` the element of `⟦B⟧(C)` it denotes. Tables are
//! memoized on the context and the alpha-normal form of the term.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::fincat::{FiniteCategory, ObjId};
use crate::frame::{FrameError, FrameMaps, InternalFrame};
use crate::omega::{delta_mask, OmegaError};
use crate::presheaf::{exponential, terminal, Exponential, NatTransform, Presheaf, PresheafError, Product};
use crate::syntax::{elaborate, elaborate_sequent, Context, Sequent, Signature, Term, Theory, Type, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("base type `{0}` has no interpretation in the model")]
    UndeclaredBaseType(String),
    #[error("symbol `{0}` is not declared in the model")]
    UndeclaredSymbol(String),
    #[error("presheaf for `{0}` lives over a different base category")]
    BaseMismatch(String),
    #[error("constant `{name}`: {reason}")]
    BadConstant { name: String, reason: String },
    #[error("no element `{element}` at `{object}` in {what}")]
    UnknownElement {
        what: String,
        object: String,
        element: String,
    },
    #[error("equality without a type annotation reached the interpreter")]
    UnannotatedEquality,
}

/// Per-object values of a term: `table[C][γ]` for `γ` in `⟦Γ⟧(C)`.
pub type Table = Vec<Vec<usize>>;

/// A constant: its type and a compatible family of elements, one per
/// object, i.e. a global element `1 -> ⟦A⟧`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstantDef {
    pub ty: Type,
    pub elements: Vec<usize>,
}

#[derive(Debug)]
struct Sem {
    ty: Type,
    table: Table,
}

/// The memo is cleared once it holds this many table cells in total.
const MEMO_CELL_CAP: usize = 1 << 24;

#[derive(Default)]
struct Memo {
    map: HashMap<String, Arc<Sem>>,
    cells: usize,
}

#[derive(Default)]
struct Caches {
    types: Mutex<HashMap<Type, Arc<Presheaf>>>,
    contexts: Mutex<HashMap<Vec<Type>, Arc<Product>>>,
    memo: Mutex<Memo>,
}

/// A base category, a faithful frame with its canonical maps, presheaves
/// for the base types and global elements for the constants.
pub struct Model {
    name: String,
    base: Arc<FiniteCategory>,
    frame: Arc<InternalFrame>,
    maps: Arc<FrameMaps>,
    types: BTreeMap<String, Arc<Presheaf>>,
    consts: BTreeMap<String, ConstantDef>,
    aliases: BTreeMap<(ObjId, String), String>,
    caches: Caches,
}

impl std::fmt::Debug for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Model")
            .field("name", &self.name)
            .field("frame", self.frame.kind())
            .field("types", &self.types.keys().collect::<Vec<_>>())
            .field("consts", &self.consts.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Clone for Model {
    fn clone(&self) -> Model {
        Model {
            name: self.name.clone(),
            base: self.base.clone(),
            frame: self.frame.clone(),
            maps: self.maps.clone(),
            types: self.types.clone(),
            consts: self.consts.clone(),
            aliases: self.aliases.clone(),
            caches: Caches::default(),
        }
    }
}

impl Model {
    /// Computes the canonical maps of `frame` and rejects unfaithful frames.
    pub fn new(
        name: &str,
        frame: InternalFrame,
        types: BTreeMap<String, Arc<Presheaf>>,
    ) -> Result<Model, SemanticsError> {
        let maps = FrameMaps::canonical(&frame)?;
        maps.check_faithful(&frame)?;
        let base = frame.base().clone();
        for (n, p) in &types {
            if p.base() != &base {
                return Err(SemanticsError::BaseMismatch(n.clone()));
            }
        }
        Ok(Model {
            name: name.to_string(),
            base,
            frame: Arc::new(frame),
            maps: Arc::new(maps),
            types,
            consts: BTreeMap::new(),
            aliases: BTreeMap::new(),
            caches: Caches::default(),
        })
    }

    /// Adds a constant given by element names per object of `⟦ty⟧`. Names
    /// may be display aliases.
    pub fn with_constant(mut self, name: &str, ty: Type, elements: &BTreeMap<String, String>) -> Result<Model, SemanticsError> {
        let p = self.interp_type(&ty)?;
        let mut idx = Vec::with_capacity(self.base.num_objects());
        for c in self.base.objects() {
            let oname = self.base.object_name(c);
            let e = elements.get(oname).ok_or_else(|| SemanticsError::BadConstant {
                name: name.into(),
                reason: format!("no element given at `{oname}`"),
            })?;
            idx.push(self.resolve_element(&p, c, e, &ty.to_string())?);
        }
        self.insert_constant(name, ConstantDef { ty, elements: idx })?;
        Ok(self)
    }

    /// Adds a constant given by element indices, checking compatibility.
    pub fn insert_constant(&mut self, name: &str, def: ConstantDef) -> Result<(), SemanticsError> {
        let p = self.interp_type(&def.ty)?;
        let bad = |reason: String| SemanticsError::BadConstant {
            name: name.into(),
            reason,
        };
        if def.elements.len() != self.base.num_objects() {
            return Err(bad("one element per object expected".into()));
        }
        for c in self.base.objects() {
            if def.elements[c.0] >= p.size(c) {
                return Err(bad(format!("element index out of range at `{}`", self.base.object_name(c))));
            }
        }
        for f in self.base.arrow_ids() {
            let (d, c) = (self.base.dom(f), self.base.cod(f));
            if p.restrict(f, def.elements[c.0]) != def.elements[d.0] {
                return Err(bad(format!(
                    "elements do not restrict along `{}`",
                    self.base.arrow_name(f)
                )));
            }
        }
        self.consts.insert(name.to_string(), def);
        *self.caches.memo.lock().expect("memo lock") = Memo::default();
        Ok(())
    }

    /// Registers `alias` as the display name of the element `canonical` at
    /// object `c`.
    pub fn add_alias(&mut self, c: ObjId, canonical: &str, alias: &str) {
        self.aliases.insert((c, canonical.to_string()), alias.to_string());
    }

    /// Replaces the frame maps without any check. Only for exercising
    /// failure paths.
    pub fn with_maps_unchecked(mut self, maps: FrameMaps) -> Model {
        self.maps = Arc::new(maps);
        self.caches = Caches::default();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn frame(&self) -> &Arc<InternalFrame> {
        &self.frame
    }

    pub fn maps(&self) -> &Arc<FrameMaps> {
        &self.maps
    }

    pub fn base_types(&self) -> &BTreeMap<String, Arc<Presheaf>> {
        &self.types
    }

    pub fn constants(&self) -> &BTreeMap<String, ConstantDef> {
        &self.consts
    }

    pub fn signature(&self) -> Signature {
        Signature {
            types: self.types.keys().cloned().collect(),
            consts: self.consts.iter().map(|(k, v)| (k.clone(), v.ty.clone())).collect(),
        }
    }

    /// Display name of an element: its alias if one is registered.
    pub fn display(&self, p: &Presheaf, c: ObjId, x: usize) -> String {
        let canonical = p.element_name(c, x);
        self.aliases
            .get(&(c, canonical.to_string()))
            .cloned()
            .unwrap_or_else(|| canonical.to_string())
    }

    /// Index of an element named canonically or by alias.
    pub fn resolve_element(&self, p: &Presheaf, c: ObjId, name: &str, what: &str) -> Result<usize, SemanticsError> {
        if let Ok(k) = p.element_index(c, name) {
            return Ok(k);
        }
        for ((ac, canonical), alias) in &self.aliases {
            if *ac == c && alias == name {
                if let Ok(k) = p.element_index(c, canonical) {
                    return Ok(k);
                }
            }
        }
        Err(SemanticsError::UnknownElement {
            what: what.to_string(),
            object: self.base.object_name(c).to_string(),
            element: name.to_string(),
        })
    }

    /// `⟦T⟧`: 1 is terminal, P the frame, products and exponentials
    /// pointwise.
    pub fn interp_type(&self, t: &Type) -> Result<Arc<Presheaf>, SemanticsError> {
        if let Some(p) = self.caches.types.lock().expect("type cache lock").get(t) {
            return Ok(p.clone());
        }
        let p = match t {
            Type::Unit => terminal(&self.base),
            Type::Prop => self.frame.carrier().clone(),
            Type::Base(n) => self
                .types
                .get(n)
                .cloned()
                .ok_or_else(|| SemanticsError::UndeclaredBaseType(n.clone()))?,
            Type::Prod(a, b) => {
                let fa = self.interp_type(a)?;
                let fb = self.interp_type(b)?;
                Product::new(&self.base, vec![fa, fb])?.presheaf().clone()
            }
            Type::Exp(cod, dom) => self.exp_of(cod, dom)?.presheaf().clone(),
        };
        self.caches
            .types
            .lock()
            .expect("type cache lock")
            .insert(t.clone(), p.clone());
        Ok(p)
    }

    /// `⟦cod⟧^⟦dom⟧` with its element tables.
    pub fn exp_of(&self, cod: &Type, dom: &Type) -> Result<Arc<Exponential>, SemanticsError> {
        let a = self.interp_type(dom)?;
        let b = self.interp_type(cod)?;
        Ok(exponential(&a, &b)?)
    }

    /// `⟦Γ⟧` as the product of the variable types in order.
    pub fn context_product(&self, ctx: &Context) -> Result<Arc<Product>, SemanticsError> {
        let key = ctx.types();
        if let Some(p) = self.caches.contexts.lock().expect("context cache lock").get(&key) {
            return Ok(p.clone());
        }
        let factors = key.iter().map(|t| self.interp_type(t)).collect::<Result<Vec<_>, _>>()?;
        let p = Arc::new(Product::new(&self.base, factors)?);
        self.caches
            .contexts
            .lock()
            .expect("context cache lock")
            .insert(key, p.clone());
        Ok(p)
    }

    /// Elaborates `t` against the model signature and returns its type.
    pub fn elaborate(&self, ctx: &Context, t: &Term) -> Result<(Term, Type), SemanticsError> {
        Ok(elaborate(&self.signature(), ctx, t)?)
    }

    /// `⟦Γ ⊢ t : B⟧` as a natural transformation `⟦Γ⟧ -> ⟦B⟧`.
    pub fn interp_term(&self, ctx: &Context, t: &Term) -> Result<NatTransform, SemanticsError> {
        let (e, ty) = self.elaborate(ctx, t)?;
        let sem = self.eval(ctx, &e)?;
        let source = self.context_product(ctx)?.presheaf().clone();
        let target = self.interp_type(&ty)?;
        Ok(NatTransform::new_unchecked(source, target, sem.table.clone())?)
    }

    /// Value table of an elaborated term.
    pub fn table(&self, ctx: &Context, t: &Term) -> Result<Arc<Table>, SemanticsError> {
        let s = self.eval(ctx, t)?;
        Ok(Arc::new(s.table.clone()))
    }

    /// `⟦t⟧_C(γ)` for an elaborated term.
    pub fn value_at(&self, ctx: &Context, t: &Term, c: ObjId, gamma: usize) -> Result<usize, SemanticsError> {
        Ok(self.eval(ctx, t)?.table[c.0][gamma])
    }

    fn memo_key(ctx: &Context, t: &Term) -> String {
        format!("{ctx}\u{1}{}", t.alpha_key())
    }

    fn eval(&self, ctx: &Context, t: &Term) -> Result<Arc<Sem>, SemanticsError> {
        let key = Self::memo_key(ctx, t);
        if let Some(s) = self.caches.memo.lock().expect("memo lock").map.get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(self.eval_uncached(ctx, t)?);
        let cells: usize = s.table.iter().map(Vec::len).sum::<usize>() + 1;
        let mut memo = self.caches.memo.lock().expect("memo lock");
        if memo.cells + cells > MEMO_CELL_CAP {
            *memo = Memo::default();
        }
        memo.cells += cells;
        Ok(memo.map.entry(key).or_insert(s).clone())
    }

    fn pointwise(&self, g: &Product, mut f: impl FnMut(ObjId, usize) -> Result<usize, SemanticsError>) -> Result<Table, SemanticsError> {
        self.base
            .objects()
            .map(|c| (0..g.presheaf().size(c)).map(|x| f(c, x)).collect())
            .collect()
    }

    fn eval_uncached(&self, ctx: &Context, t: &Term) -> Result<Sem, SemanticsError> {
        let g = self.context_product(ctx)?;
        let frame = &self.frame;
        let sem = |ty: Type, table: Table| Ok(Sem { ty, table });
        match t {
            Term::Star => sem(Type::Unit, self.pointwise(&g, |_, _| Ok(0))?),
            Term::Top => sem(Type::Prop, self.pointwise(&g, |c, _| Ok(frame.top(c)))?),
            Term::Bot => sem(Type::Prop, self.pointwise(&g, |c, _| Ok(frame.bot(c)))?),
            Term::Var(x) => {
                let (k, ty) = ctx.lookup(x).ok_or_else(|| TypeError::UnboundVariable(x.clone()))?;
                sem(ty.clone(), self.pointwise(&g, |c, y| Ok(g.component_of(c, y, k)))?)
            }
            Term::Const(x) => {
                let def = self.consts.get(x).ok_or_else(|| SemanticsError::UndeclaredSymbol(x.clone()))?;
                sem(def.ty.clone(), self.pointwise(&g, |c, _| Ok(def.elements[c.0]))?)
            }
            Term::Pair(a, b) => {
                let (sa, sb) = (self.eval(ctx, a)?, self.eval(ctx, b)?);
                let fb = self.interp_type(&sb.ty)?;
                let table = self.pointwise(&g, |c, y| Ok(sa.table[c.0][y] * fb.size(c) + sb.table[c.0][y]))?;
                sem(Type::prod(sa.ty.clone(), sb.ty.clone()), table)
            }
            Term::Proj1(a) | Term::Proj2(a) => {
                let sa = self.eval(ctx, a)?;
                let Type::Prod(l, r) = &sa.ty else {
                    return Err(TypeError::NotAProduct {
                        got: sa.ty.to_string(),
                        location: a.to_string(),
                    }
                    .into());
                };
                let fr = self.interp_type(r)?;
                let first = matches!(t, Term::Proj1(_));
                let table = self.pointwise(&g, |c, y| {
                    let v = sa.table[c.0][y];
                    Ok(if first { v / fr.size(c) } else { v % fr.size(c) })
                })?;
                sem(if first { (**l).clone() } else { (**r).clone() }, table)
            }
            Term::Lam(x, dom, body) | Term::Comprehension(x, dom, body) => {
                let inner = ctx.extended(x, dom.clone());
                let sb = self.eval(&inner, body)?;
                let exp = self.exp_of(&sb.ty, dom)?;
                let fa = self.interp_type(dom)?;
                let gp = g.presheaf();
                let table = self.pointwise(&g, |c, y| {
                    exp.lookup_with(c, |h, a| {
                        let x = self.base.dom(h);
                        sb.table[x.0][gp.restrict(h, y) * fa.size(x) + a]
                    })
                    .ok_or_else(|| {
                        PresheafError::NotNatural {
                            arrow: self.base.arrow_name(self.base.identity(c)).into(),
                            element: gp.element_name(c, y).into(),
                        }
                        .into()
                    })
                })?;
                sem(Type::exp(sb.ty.clone(), dom.clone()), table)
            }
            Term::App(f, a) | Term::Member(a, f) => {
                let (sf, sa) = (self.eval(ctx, f)?, self.eval(ctx, a)?);
                let Type::Exp(cod, dom) = &sf.ty else {
                    return Err(TypeError::NotAFunction {
                        got: sf.ty.to_string(),
                        location: f.to_string(),
                    }
                    .into());
                };
                let exp = self.exp_of(cod, dom)?;
                let table = self.pointwise(&g, |c, y| Ok(exp.eval(c, sf.table[c.0][y], sa.table[c.0][y])))?;
                sem((**cod).clone(), table)
            }
            Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) => {
                let (sa, sb) = (self.eval(ctx, a)?, self.eval(ctx, b)?);
                let table = self.pointwise(&g, |c, y| {
                    let (u, v) = (sa.table[c.0][y], sb.table[c.0][y]);
                    Ok(match t {
                        Term::And(..) => frame.meet(c, u, v),
                        Term::Or(..) => frame.join(c, u, v),
                        _ => frame.imp(c, u, v),
                    })
                })?;
                sem(Type::Prop, table)
            }
            Term::Forall(x, dom, body) | Term::Exists(x, dom, body) => {
                let inner = ctx.extended(x, dom.clone());
                let sb = self.eval(&inner, body)?;
                let fa = self.interp_type(dom)?;
                let gp = g.presheaf();
                let universal = matches!(t, Term::Forall(..));
                let table = self.pointwise(&g, |c, y| {
                    let bound = |h| {
                        let x = self.base.dom(h);
                        let row = gp.restrict(h, y) * fa.size(x);
                        let vals = (0..fa.size(x)).map(|b| sb.table[x.0][row + b]);
                        if universal {
                            frame.meet_all(x, vals)
                        } else {
                            frame.join_all(x, vals)
                        }
                    };
                    Ok(if universal {
                        frame.forall_from_bounds(c, bound)
                    } else {
                        frame.exists_from_bounds(c, bound)
                    })
                })?;
                sem(Type::Prop, table)
            }
            Term::Eq(ty, a, b) => {
                let ty = ty.as_ref().ok_or(SemanticsError::UnannotatedEquality)?;
                let p = self.interp_type(ty)?;
                let (sa, sb) = (self.eval(ctx, a)?, self.eval(ctx, b)?);
                let table = self.pointwise(&g, |c, y| {
                    Ok(self.maps.i_mask(c, delta_mask(&p, c, sa.table[c.0][y], sb.table[c.0][y])))
                })?;
                sem(Type::Prop, table)
            }
            Term::Box(a) => {
                let sa = self.eval(ctx, a)?;
                let table = self.pointwise(&g, |c, y| Ok(self.maps.box_at(c, sa.table[c.0][y])))?;
                sem(Type::Prop, table)
            }
        }
    }

    /// Names of the context variables' values at `γ`.
    pub fn bindings(&self, ctx: &Context, c: ObjId, gamma: usize) -> Result<Vec<(String, String)>, SemanticsError> {
        let g = self.context_product(ctx)?;
        let parts = g.split(c, gamma);
        Ok(ctx
            .vars()
            .iter()
            .zip(parts)
            .zip(g.factors())
            .map(|(((x, _), v), f)| (x.clone(), self.display(f, c, v)))
            .collect())
    }

    /// Sequent satisfaction: `⟦φ⟧_C(γ) <= ⟦ψ⟧_C(γ)` for every `C` and `γ`,
    /// with every failing pair reported.
    pub fn holds(&self, seq: &Sequent) -> Result<Verdict, SemanticsError> {
        let s = elaborate_sequent(&self.signature(), seq)?;
        let (l, r) = (self.eval(&s.context, &s.lhs)?, self.eval(&s.context, &s.rhs)?);
        let g = self.context_product(&s.context)?;
        let frame = &self.frame;
        let per_object: Vec<Vec<(ObjId, usize)>> = self
            .base
            .objects()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|c| {
                (0..g.presheaf().size(c))
                    .filter(|&y| !frame.le(c, l.table[c.0][y], r.table[c.0][y]))
                    .map(|y| (c, y))
                    .collect()
            })
            .collect();
        let mut witnesses = Vec::new();
        for (c, y) in per_object.into_iter().flatten() {
            witnesses.push(Witness {
                object: self.base.object_name(c).to_string(),
                element: g.presheaf().element_name(c, y).to_string(),
                bindings: self.bindings(&s.context, c, y)?,
                lhs: frame.element_name(c, l.table[c.0][y]).to_string(),
                rhs: frame.element_name(c, r.table[c.0][y]).to_string(),
            });
        }
        Ok(Verdict {
            holds: witnesses.is_empty(),
            witnesses,
        })
    }

    /// Local satisfaction at a generalized element `γ: yC -> ⟦Γ⟧`, where `Γ`
    /// is the first `prefix` variables of the sequent context: for every
    /// `f: D -> C` and every extension of `f*γ` by the remaining variables
    /// at `D`, `φ <= ψ`.
    pub fn holds_local(&self, seq: &Sequent, prefix: usize, c: ObjId, gamma: usize) -> Result<bool, SemanticsError> {
        let s = elaborate_sequent(&self.signature(), seq)?;
        let (l, r) = (self.eval(&s.context, &s.lhs)?, self.eval(&s.context, &s.rhs)?);
        let pre = Context::from_vars(s.context.vars()[..prefix].to_vec()).map_err(TypeError::DuplicateVariable)?;
        let gp = self.context_product(&pre)?;
        let rest = s.context.vars()[prefix..]
            .iter()
            .map(|(_, t)| self.interp_type(t))
            .collect::<Result<Vec<_>, _>>()?;
        for &f in self.base.arrows_into(c) {
            let d = self.base.dom(f);
            let y = gp.presheaf().restrict(f, gamma);
            let ext: usize = rest.iter().map(|p| p.size(d)).product();
            for e in 0..ext {
                let z = y * ext + e;
                if !self.frame.le(d, l.table[d.0][z], r.table[d.0][z]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Per-axiom verdicts.
    pub fn check_theory(&self, th: &Theory) -> Result<TheoryReport, SemanticsError> {
        let sig = self.signature();
        for t in &th.signature.types {
            if !sig.types.contains(t) {
                return Err(SemanticsError::UndeclaredSymbol(t.clone()));
            }
        }
        for (c, ty) in &th.signature.consts {
            match sig.consts.get(c) {
                Some(t) if t == ty => {}
                _ => return Err(SemanticsError::UndeclaredSymbol(c.clone())),
            }
        }
        let mut results = Vec::with_capacity(th.axioms.len());
        for a in &th.axioms {
            results.push((a.name.clone(), self.holds(&a.sequent)?));
        }
        Ok(TheoryReport { results })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub object: String,
    /// Canonical name of the element of `⟦Γ⟧(C)`.
    pub element: String,
    pub bindings: Vec<(String, String)>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryReport {
    pub results: Vec<(String, Verdict)>,
}

impl TheoryReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|(_, v)| v.holds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::tests::{arrow_base, loop_graph};
    use crate::syntax::{parse_context, parse_sequent, parse_term};

    fn loop_model() -> Model {
        let base = arrow_base();
        let frame = InternalFrame::omega_star(&base).unwrap();
        Model::new("loop", frame, BTreeMap::from([("G".to_string(), loop_graph())])).unwrap()
    }

    fn eta_mu(m: &Model) -> (ObjId, Arc<Exponential>, usize, usize) {
        let d = m.base().object("D").unwrap();
        let c = m.base().object("C").unwrap();
        let exp = m.exp_of(&Type::base("G"), &Type::base("G")).unwrap();
        assert_eq!(exp.presheaf().size(d), 2);
        let g = m.base().arrow_by_name("g").unwrap();
        let w = m.base_types()["G"].element_index(c, "w").unwrap();
        assert_ne!(exp.value(d, 0, g, w), exp.value(d, 1, g, w));
        (d, exp, 0, 1)
    }

    #[test]
    fn type_interpretation() {
        let m = loop_model();
        assert_eq!(m.interp_type(&Type::Unit).unwrap(), terminal(m.base()));
        assert_eq!(&m.interp_type(&Type::Prop).unwrap(), m.frame().carrier());
        let d = m.base().object("D").unwrap();
        let gg = m.interp_type(&Type::exp(Type::base("G"), Type::base("G"))).unwrap();
        assert_eq!(gg.size(d), 2);
        assert!(matches!(
            m.interp_type(&Type::base("X")),
            Err(SemanticsError::UndeclaredBaseType(_))
        ));
    }

    #[test]
    fn reflexive_equality_is_top() {
        let m = loop_model();
        let ctx = parse_context("x:G").unwrap();
        let t = m.interp_term(&ctx, &parse_term("x = x").unwrap()).unwrap();
        for c in m.base().objects() {
            assert!(t.component(c).iter().all(|&v| v == m.frame().top(c)));
        }
        t.check_natural().unwrap();
    }

    #[test]
    fn loop_graph_equalities() {
        let m = loop_model();
        let (d, _, eta, mu) = eta_mu(&m);
        let ctx = parse_context("f:G^G, g:G^G").unwrap();
        let g = m.context_product(&ctx).unwrap();
        let gamma = g.tuple(d, &[eta, mu]);
        let eq = m.interp_term(&ctx, &parse_term("f = g").unwrap()).unwrap();
        assert_eq!(m.frame().element_name(d, eq.apply(d, gamma)), "{}");
        let pw = m
            .interp_term(&ctx, &parse_term("forall y:G. f @ y = g @ y").unwrap())
            .unwrap();
        assert_eq!(m.frame().element_name(d, pw.apply(d, gamma)), "{1_D}");
        eq.check_natural().unwrap();
        pw.check_natural().unwrap();
    }

    #[test]
    fn extensionality_verdicts() {
        let m = loop_model();
        let t = parse_sequent("p:P | box p |- p").unwrap();
        assert!(m.holds(&t).unwrap().holds);
        let modal = parse_sequent("f:G^G, g:G^G | box (forall y:G. f @ y = g @ y) |- f = g").unwrap();
        assert!(m.holds(&modal).unwrap().holds);
        let plain = parse_sequent("f:G^G, g:G^G | forall y:G. f @ y = g @ y |- f = g").unwrap();
        let v = m.holds(&plain).unwrap();
        assert!(!v.holds);
        let (d, exp, eta, mu) = eta_mu(&m);
        let names = [exp.presheaf().element_name(d, eta), exp.presheaf().element_name(d, mu)];
        assert!(v.witnesses.iter().any(|w| w.object == "D"
            && w.bindings[0].1 == names[0]
            && w.bindings[1].1 == names[1]
            && w.lhs == "{1_D}"
            && w.rhs == "{}"));
        assert!(v.witnesses.iter().all(|w| w.object == "D"));
    }

    #[test]
    fn check_theory_reports() {
        let m = loop_model();
        let th = crate::syntax::parse_theory("types: G;\naxioms:\n").unwrap();
        assert!(m.check_theory(&th).unwrap().passed());
        let th = crate::syntax::parse_theory(
            "types: G;\naxioms:\n [modal] f:G^G, g:G^G | box (forall y:G. f @ y = g @ y) |- f = g;\n [plain] f:G^G, g:G^G | forall y:G. f @ y = g @ y |- f = g;\n",
        )
        .unwrap();
        let r = m.check_theory(&th).unwrap();
        assert!(r.results[0].1.holds);
        assert!(!r.results[1].1.holds);
        assert!(!r.passed());
        let th = crate::syntax::parse_theory("types: H;\naxioms:\n").unwrap();
        assert!(matches!(m.check_theory(&th), Err(SemanticsError::UndeclaredSymbol(_))));
    }

    #[test]
    fn constants_are_global_elements() {
        let m = loop_model();
        let c = m.base().object("C").unwrap();
        let bad = BTreeMap::from([("C".to_string(), "w".to_string()), ("D".to_string(), "u".to_string())]);
        assert!(matches!(
            m.clone().with_constant("k", Type::base("G"), &bad),
            Err(SemanticsError::BadConstant { .. })
        ));
        let good = BTreeMap::from([("C".to_string(), "v".to_string()), ("D".to_string(), "u".to_string())]);
        let m = m.with_constant("k", Type::base("G"), &good).unwrap();
        let x = m.interp_term(&Context::new(), &parse_term("k").unwrap()).unwrap();
        assert_eq!(m.base_types()["G"].element_name(c, x.apply(c, 0)), "v");
        assert!(m.holds(&parse_sequent("x:G | top |- x = k \\/ ~(x = k)").unwrap()).unwrap().holds);
    }

    #[test]
    fn unfaithful_frame_rejected() {
        let base = arrow_base();
        let frame = InternalFrame::powerset(&base, 1).unwrap();
        assert!(matches!(
            Model::new("bad", frame, BTreeMap::new()),
            Err(SemanticsError::Frame(FrameError::FaithfulnessFailure { .. }))
        ));
    }

    #[test]
    fn beta_and_eta_tables_agree() {
        let m = loop_model();
        let ctx = parse_context("w:G^G, z:G").unwrap();
        let eta = m.interp_term(&ctx, &parse_term("fun x:G => w @ x").unwrap()).unwrap();
        let w = m.interp_term(&ctx, &parse_term("w").unwrap()).unwrap();
        assert_eq!(eta, w);
        let beta = m.interp_term(&ctx, &parse_term("(fun x:G => w @ x) @ z").unwrap()).unwrap();
        let red = m.interp_term(&ctx, &parse_term("w @ z").unwrap()).unwrap();
        assert_eq!(beta, red);
    }

    #[test]
    fn local_holds_matches_global_on_closed_context() {
        let m = loop_model();
        let s = parse_sequent("f:G^G, g:G^G | forall y:G. f @ y = g @ y |- f = g").unwrap();
        let d = m.base().object("D").unwrap();
        let c = m.base().object("C").unwrap();
        let (_, _, eta, mu) = eta_mu(&m);
        let ctx = parse_context("f:G^G, g:G^G").unwrap();
        let g = m.context_product(&ctx).unwrap();
        assert!(!m.holds_local(&s, 2, d, g.tuple(d, &[eta, mu])).unwrap());
        assert!(m.holds_local(&s, 2, d, g.tuple(d, &[eta, eta])).unwrap());
        for y in 0..g.presheaf().size(c) {
            assert!(m.holds_local(&s, 2, c, y).unwrap());
        }
        // with no prefix the extension ranges over everything
        assert!(!m.holds_local(&s, 0, d, 0).unwrap());
    }
}

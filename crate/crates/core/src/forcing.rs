//! Forcing `C ⊩_* φ(a)` for models over the geometric frame `Ω_*`, the
//! interior operator `Γ_E` right adjoint to the inclusion of subpresheaves
//! into families of subsets, and the correspondence between Kripke
//! valuations and global elements of `Ω_*` over a preorder.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{CategoryError, FiniteCategory, ObjId};
use crate::omega::{bit, omega, subobject_of, ArrowSets, OmegaError, Subpresheaf};
use crate::presheaf::{enumerate_nats, terminal, NatTransform, Presheaf, PresheafError};
use crate::semantics::{Model, SemanticsError};
use crate::syntax::{Context, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcingError {
    #[error("forcing needs the frame of arrow-sets, this model uses {0}")]
    NonGeometricFrame(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("not a preorder: {0}")]
    NotAPreorder(#[from] CategoryError),
    #[error("`{0}` is not a proposition")]
    NotAProposition(String),
}

fn arrow_sets(m: &Model) -> Result<&Arc<ArrowSets>, ForcingError> {
    match m.frame().arrow_sets() {
        Some(a) if m.frame().is_geometric() => Ok(a),
        _ => Err(ForcingError::NonGeometricFrame(m.frame().kind().to_string())),
    }
}

fn has_identity(m: &Model, om: &ArrowSets, c: ObjId, x: usize) -> bool {
    om.mask(c, x) & bit(m.base().identity(c)) != 0
}

fn elaborate_prop(m: &Model, ctx: &Context, phi: &Term) -> Result<Term, ForcingError> {
    let (e, ty) = m.elaborate(ctx, phi)?;
    if ty != Type::Prop {
        return Err(ForcingError::NotAProposition(phi.to_string()));
    }
    Ok(e)
}

/// `1_C ∈ ⟦φ⟧_C(γ)`.
pub fn forces_direct(m: &Model, ctx: &Context, phi: &Term, c: ObjId, gamma: usize) -> Result<bool, ForcingError> {
    let om = arrow_sets(m)?;
    let e = elaborate_prop(m, ctx, phi)?;
    let v = m.value_at(ctx, &e, c, gamma)?;
    Ok(has_identity(m, om, c, v))
}

/// One step of a clause-by-clause derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub object: String,
    pub formula: String,
    pub rule: &'static str,
    pub forced: bool,
    pub children: Vec<Trace>,
}

impl Trace {
    /// Indented rendering, one line per step.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&format!(
            "{}{} {} {}   [{}]\n",
            "  ".repeat(depth),
            self.object,
            if self.forced { "forces" } else { "does not force" },
            self.formula,
            self.rule
        ));
        for ch in &self.children {
            ch.render_into(depth + 1, out);
        }
    }
}

/// Forcing by the recursive clauses: connectives are read classically at
/// `C`, quantifiers range over `M(C)`, `□` over all arrows into `C`,
/// membership and equality compare element values. Compound formulas are
/// never interpreted as a whole.
pub fn forces_clauses(m: &Model, ctx: &Context, phi: &Term, c: ObjId, gamma: usize) -> Result<bool, ForcingError> {
    let om = arrow_sets(m)?;
    let e = elaborate_prop(m, ctx, phi)?;
    let mut cl = Clauses { m, om, trace: false };
    Ok(cl.go(ctx, &e, c, gamma)?.0)
}

/// As [`forces_clauses`], returning the derivation tree.
pub fn forces_traced(m: &Model, ctx: &Context, phi: &Term, c: ObjId, gamma: usize) -> Result<Trace, ForcingError> {
    let om = arrow_sets(m)?;
    let e = elaborate_prop(m, ctx, phi)?;
    let mut cl = Clauses { m, om, trace: true };
    Ok(cl.go(ctx, &e, c, gamma)?.1.expect("trace requested"))
}

struct Clauses<'a> {
    m: &'a Model,
    om: &'a ArrowSets,
    trace: bool,
}

impl Clauses<'_> {
    fn node(&self, c: ObjId, phi: &Term, rule: &'static str, forced: bool, children: Vec<Trace>) -> Option<Trace> {
        self.trace.then(|| Trace {
            object: self.m.base().object_name(c).to_string(),
            formula: phi.to_string(),
            rule,
            forced,
            children,
        })
    }

    /// Evaluates the candidates until one yields `stop_on`; with tracing
    /// on every candidate is evaluated so the tree is complete.
    fn scan(
        &mut self,
        items: impl Iterator<Item = (Context, Term, ObjId, usize)>,
        stop_on: bool,
    ) -> Result<(bool, Vec<Trace>), ForcingError> {
        let mut kids = Vec::new();
        let mut hit = false;
        for (ctx, t, c, g) in items {
            let (v, tr) = self.go(&ctx, &t, c, g)?;
            kids.extend(tr);
            if v == stop_on {
                hit = true;
                if !self.trace {
                    break;
                }
            }
        }
        Ok((if hit { stop_on } else { !stop_on }, kids))
    }

    fn leaf(&self, ctx: &Context, t: &Term, c: ObjId, gamma: usize) -> Result<usize, ForcingError> {
        Ok(self.m.value_at(ctx, t, c, gamma)?)
    }

    fn go(&mut self, ctx: &Context, phi: &Term, c: ObjId, gamma: usize) -> Result<(bool, Option<Trace>), ForcingError> {
        let m = self.m;
        let base = m.base().clone();
        match phi {
            Term::Top => Ok((true, self.node(c, phi, "top", true, vec![]))),
            Term::Bot => Ok((false, self.node(c, phi, "bot", false, vec![]))),
            Term::And(a, b) | Term::Or(a, b) | Term::Implies(a, b) => {
                let (va, ta) = self.go(ctx, a, c, gamma)?;
                let short = match phi {
                    Term::And(..) => !va,
                    Term::Or(..) => va,
                    _ => !va,
                };
                let (v, kids) = if short && !self.trace {
                    (matches!(phi, Term::Or(..) | Term::Implies(..)), vec![])
                } else {
                    let (vb, tb) = self.go(ctx, b, c, gamma)?;
                    let v = match phi {
                        Term::And(..) => va && vb,
                        Term::Or(..) => va || vb,
                        _ => !va || vb,
                    };
                    (v, ta.into_iter().chain(tb).collect())
                };
                let rule = match phi {
                    Term::And(..) => "and",
                    Term::Or(..) => "or",
                    _ => "implies",
                };
                Ok((v, self.node(c, phi, rule, v, kids)))
            }
            Term::Forall(x, ty, body) | Term::Exists(x, ty, body) => {
                let universal = matches!(phi, Term::Forall(..));
                let inner = ctx.extended(x, ty.clone());
                let n = m.interp_type(ty)?.size(c);
                let items = (0..n).map(|b| (inner.clone(), (**body).clone(), c, gamma * n + b));
                let (v, kids) = self.scan(items, !universal)?;
                Ok((v, self.node(c, phi, if universal { "forall" } else { "exists" }, v, kids)))
            }
            Term::Box(a) => {
                let g = m.context_product(ctx)?;
                let items: Vec<_> = base
                    .arrows_into(c)
                    .iter()
                    .map(|&p| (ctx.clone(), (**a).clone(), base.dom(p), g.presheaf().restrict(p, gamma)))
                    .collect();
                let (v, kids) = self.scan(items.into_iter(), false)?;
                Ok((v, self.node(c, phi, "box", v, kids)))
            }
            Term::Member(t, u) | Term::App(u, t) => {
                let (e, _) = m.elaborate(ctx, u)?;
                let (ty_u, dom) = match m.elaborate(ctx, u)?.1 {
                    Type::Exp(cod, dom) => (*cod, *dom),
                    other => return Err(ForcingError::NotAProposition(other.to_string())),
                };
                debug_assert_eq!(ty_u, Type::Prop);
                let exp = m.exp_of(&Type::Prop, &dom)?;
                let a = self.leaf(ctx, t, c, gamma)?;
                let eta = self.leaf(ctx, &e, c, gamma)?;
                let v = exp.value(c, eta, base.identity(c), a);
                let forced = has_identity(m, self.om, c, v);
                Ok((forced, self.node(c, phi, "member", forced, vec![])))
            }
            Term::Eq(_, a, b) => {
                let forced = self.leaf(ctx, a, c, gamma)? == self.leaf(ctx, b, c, gamma)?;
                Ok((forced, self.node(c, phi, "equal", forced, vec![])))
            }
            _ => {
                let v = self.leaf(ctx, phi, c, gamma)?;
                let forced = has_identity(m, self.om, c, v);
                Ok((forced, self.node(c, phi, "atom", forced, vec![])))
            }
        }
    }
}

/// First `(C, γ)` where the two forcing routes disagree.
pub fn agreement_defect(m: &Model, ctx: &Context, phi: &Term) -> Result<Option<(ObjId, usize)>, ForcingError> {
    let g = m.context_product(ctx)?;
    for c in m.base().objects() {
        for y in 0..g.presheaf().size(c) {
            if forces_direct(m, ctx, phi, c, y)? != forces_clauses(m, ctx, phi, c, y)? {
                return Ok(Some((c, y)));
            }
        }
    }
    Ok(None)
}

/// The largest subpresheaf of `E` inside the family `A`: keep `x` in
/// `A(C)` when every restriction of `x` lies in `A`. One pass suffices
/// because restrictions of restrictions are restrictions.
pub fn gamma_interior(e: &Arc<Presheaf>, a: &[Vec<bool>]) -> Subpresheaf {
    let base = e.base().clone();
    Subpresheaf::from_fn(e, |c, x| {
        a[c.0][x]
            && base
                .arrows_into(c)
                .iter()
                .all(|&f| a[base.dom(f).0][e.restrict(f, x)])
    })
}

/// `Δ_E`: a subpresheaf as a bare family of subsets.
pub fn delta_inclusion(s: &Subpresheaf) -> Vec<Vec<bool>> {
    s.members().to_vec()
}

fn family_subset(a: &[Vec<bool>], b: &[Vec<bool>]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.iter().zip(y).all(|(&p, &q)| !p || q))
}

/// `Δ(S) ⊆ A` iff `S ⊆ Γ(A)`.
pub fn interior_adjunction_holds(s: &Subpresheaf, a: &[Vec<bool>]) -> bool {
    family_subset(&delta_inclusion(s), a) == s.is_subset(&gamma_interior(s.parent(), a))
}

/// Oracle for [`gamma_interior`]: the union of all subpresheaves inside
/// `A`, found by enumerating maps into `Ω`.
pub fn gamma_interior_oracle(e: &Arc<Presheaf>, a: &[Vec<bool>]) -> Result<Subpresheaf, ForcingError> {
    let om = omega(e.base())?;
    let mut acc: Vec<Vec<bool>> = a.iter().map(|r| vec![false; r.len()]).collect();
    for chi in enumerate_nats(e, om.presheaf())? {
        let s = subobject_of(&chi, &om)?;
        if family_subset(s.members(), a) {
            for (r, sr) in acc.iter_mut().zip(s.members()) {
                for (x, &y) in r.iter_mut().zip(sr) {
                    *x |= y;
                }
            }
        }
    }
    Ok(Subpresheaf::new(e.clone(), acc)?)
}

/// A finite preorder of worlds. The associated base has an arrow `j -> k`
/// whenever `j <= k`, so the worlds reachable by `□` from `k` are those
/// below it.
#[derive(Debug, Clone)]
pub struct KripkeFrame {
    worlds: Vec<String>,
    le: BTreeSet<(String, String)>,
    base: Arc<FiniteCategory>,
}

impl KripkeFrame {
    pub fn new(worlds: &[&str], relation: &[(&str, &str)]) -> Result<KripkeFrame, ForcingError> {
        let worlds: Vec<String> = worlds.iter().map(|s| s.to_string()).collect();
        let le: BTreeSet<(String, String)> = relation.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let rel: Vec<(String, String)> = le.iter().cloned().collect();
        let base = Arc::new(FiniteCategory::from_preorder(&worlds, &rel, false)?);
        Ok(KripkeFrame { worlds, le, base })
    }

    /// The chain `w0 <= w1 <= .. <= w{n-1}`.
    pub fn chain(n: usize) -> Result<KripkeFrame, ForcingError> {
        let names: Vec<String> = (0..n).map(|k| format!("w{k}")).collect();
        let mut rel = Vec::new();
        for a in 0..n {
            for b in a..n {
                rel.push((names[a].as_str(), names[b].as_str()));
            }
        }
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        KripkeFrame::new(&refs, &rel)
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn le(&self, a: &str, b: &str) -> bool {
        self.le.contains(&(a.to_string(), b.to_string()))
    }

    /// `φ ↦ (φ_k = ↓k ∩ φ)` as a global element of `Ω_*`.
    pub fn valuation_to_nat(&self, om_star: &ArrowSets, phi: &BTreeSet<String>) -> Result<NatTransform, ForcingError> {
        let base = &self.base;
        let comps = base
            .objects()
            .map(|k| {
                let m = base
                    .arrows_into(k)
                    .iter()
                    .filter(|&&f| phi.contains(base.object_name(base.dom(f))))
                    .fold(0, |acc, &f| acc | bit(f));
                vec![om_star.at(k, m)]
            })
            .collect();
        Ok(NatTransform::new(terminal(base), om_star.presheaf().clone(), comps)?)
    }

    /// `{k | 1_k ∈ t_k}`.
    pub fn nat_to_valuation(&self, om_star: &ArrowSets, t: &NatTransform) -> BTreeSet<String> {
        let base = &self.base;
        base.objects()
            .filter(|&k| om_star.mask(k, t.apply(k, 0)) & bit(base.identity(k)) != 0)
            .map(|k| base.object_name(k).to_string())
            .collect()
    }

    /// Kripke evaluation of a propositional modal formula whose variables
    /// are read from `val`: classical connectives at each world, `□` over
    /// the worlds below.
    pub fn eval(&self, val: &BTreeMap<String, BTreeSet<String>>, phi: &Term, world: &str) -> Result<bool, ForcingError> {
        let rec = |t: &Term| self.eval(val, t, world);
        Ok(match phi {
            Term::Top => true,
            Term::Bot => false,
            Term::Var(p) => val
                .get(p)
                .ok_or_else(|| SemanticsError::UndeclaredSymbol(p.clone()))?
                .contains(world),
            Term::And(a, b) => rec(a)? && rec(b)?,
            Term::Or(a, b) => rec(a)? || rec(b)?,
            Term::Implies(a, b) => !rec(a)? || rec(b)?,
            Term::Box(a) => {
                let mut all = true;
                for j in &self.worlds {
                    if self.le(j, world) && !self.eval(val, a, j)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            other => return Err(ForcingError::NotAProposition(other.to_string())),
        })
    }

    /// The model over this preorder with frame `Ω_*` and no base types.
    pub fn model(&self) -> Result<Model, ForcingError> {
        let frame = crate::frame::InternalFrame::omega_star(&self.base).map_err(SemanticsError::from)?;
        Ok(Model::new("kripke", frame, BTreeMap::new())?)
    }

    /// Compares Kripke evaluation with forcing at every world, the
    /// variables of `phi` bound to the global elements of `val`. Returns
    /// the first world where they differ.
    pub fn bridge_defect(
        &self,
        model: &Model,
        val: &BTreeMap<String, BTreeSet<String>>,
        phi: &Term,
    ) -> Result<Option<String>, ForcingError> {
        let om = arrow_sets(model)?;
        let names: Vec<&String> = val.keys().collect();
        let ctx = Context::from_vars(names.iter().map(|n| ((*n).clone(), Type::Prop)).collect())
            .map_err(crate::syntax::TypeError::DuplicateVariable)
            .map_err(SemanticsError::from)?;
        let globals: Vec<NatTransform> = names
            .iter()
            .map(|n| self.valuation_to_nat(om, &val[*n]))
            .collect::<Result<_, _>>()?;
        for (n, t) in names.iter().zip(&globals) {
            if self.nat_to_valuation(om, t) != val[*n] {
                return Ok(Some(format!("valuation of `{n}` does not round-trip")));
            }
        }
        let g = model.context_product(&ctx)?;
        for k in self.base.objects() {
            let parts: Vec<usize> = globals.iter().map(|t| t.apply(k, 0)).collect();
            let gamma = g.tuple(k, &parts);
            let w = self.base.object_name(k);
            let kripke = self.eval(val, phi, w)?;
            if kripke != forces_direct(model, &ctx, phi, k, gamma)? || kripke != forces_clauses(model, &ctx, phi, k, gamma)? {
                return Ok(Some(w.to_string()));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::InternalFrame;
    use crate::presheaf::tests::{arrow_base, loop_graph};
    use crate::syntax::{parse_context, parse_term};
    use proptest::prelude::*;

    fn loop_model() -> Model {
        let base = arrow_base();
        let frame = InternalFrame::omega_star(&base).unwrap();
        Model::new("loop", frame, BTreeMap::from([("G".to_string(), loop_graph())])).unwrap()
    }

    fn eta_mu_gamma(m: &Model) -> (Context, ObjId, usize) {
        let ctx = parse_context("f:G^G, g:G^G").unwrap();
        let d = m.base().object("D").unwrap();
        let g = m.context_product(&ctx).unwrap();
        (ctx, d, g.tuple(d, &[0, 1]))
    }

    #[test]
    fn constants_forced() {
        let m = loop_model();
        for c in m.base().objects() {
            let ctx = Context::new();
            assert!(forces_direct(&m, &ctx, &Term::Top, c, 0).unwrap());
            assert!(!forces_direct(&m, &ctx, &Term::Bot, c, 0).unwrap());
            assert!(forces_clauses(&m, &ctx, &Term::Top, c, 0).unwrap());
            assert!(!forces_clauses(&m, &ctx, &Term::Bot, c, 0).unwrap());
        }
    }

    #[test]
    fn loop_graph_forcing() {
        let m = loop_model();
        let (ctx, d, gamma) = eta_mu_gamma(&m);
        let eq = parse_term("f = g").unwrap();
        let pw = parse_term("forall y:G. f @ y = g @ y").unwrap();
        let bx = parse_term("box (forall y:G. f @ y = g @ y)").unwrap();
        for route in [forces_direct, forces_clauses] {
            assert!(!route(&m, &ctx, &eq, d, gamma).unwrap());
            assert!(route(&m, &ctx, &pw, d, gamma).unwrap());
            assert!(!route(&m, &ctx, &bx, d, gamma).unwrap());
        }
        let tr = forces_traced(&m, &ctx, &bx, d, gamma).unwrap();
        assert!(!tr.forced);
        assert_eq!(tr.rule, "box");
        assert_eq!(tr.children.len(), 2);
        assert!(tr.render().contains("does not force"));
    }

    #[test]
    fn requires_geometric_frame() {
        let base = arrow_base();
        let m = Model::new("o", InternalFrame::omega(&base).unwrap(), BTreeMap::new()).unwrap();
        assert!(matches!(
            forces_direct(&m, &Context::new(), &Term::Top, ObjId(0), 0),
            Err(ForcingError::NonGeometricFrame(_))
        ));
    }

    #[test]
    fn routes_agree_on_samples() {
        let m = loop_model();
        let ctx = parse_context("f:G^G, g:G^G, x:G, p:P, s:P^G").unwrap();
        for src in [
            "box (f @ x = g @ x) => p",
            "exists y:G. box (y in s) \\/ ~p",
            "forall y:G. (f @ y = x => y in s) /\\ box p",
            "box box (p \\/ ~p)",
            "~box ~(x = f @ x)",
            "(fun y:G => box (y in s)) @ x",
        ] {
            let phi = parse_term(src).unwrap();
            assert_eq!(agreement_defect(&m, &ctx, &phi).unwrap(), None, "{src}");
        }
    }

    #[test]
    fn interior_examples() {
        let e = loop_graph();
        let base = e.base().clone();
        let c = base.object("C").unwrap();
        let d = base.object("D").unwrap();
        let mut a = vec![vec![false; e.size(c)], vec![false; e.size(d)]];
        a[d.0][e.element_index(d, "u").unwrap()] = true;
        a[c.0][e.element_index(c, "w").unwrap()] = true;
        let s = gamma_interior(&e, &a);
        assert!(s.is_closed());
        assert!(s.contains(c, e.element_index(c, "w").unwrap()));
        assert!(!s.contains(d, 0));
        assert_eq!(s.members(), gamma_interior_oracle(&e, &a).unwrap().members());
        let none = vec![vec![false; e.size(c)], vec![false; e.size(d)]];
        assert_eq!(gamma_interior(&e, &none).members(), &none[..]);
        let full = Subpresheaf::full(&e);
        assert_eq!(gamma_interior(&e, full.members()).members(), full.members());
    }

    proptest! {
        #[test]
        fn interior_matches_oracle_and_adjunction(bits in proptest::collection::vec(any::<bool>(), 3), sbits in proptest::collection::vec(any::<bool>(), 3)) {
            let e = loop_graph();
            let base = e.base().clone();
            let sizes: Vec<usize> = base.objects().map(|c| e.size(c)).collect();
            let mut a = Vec::new();
            let mut k = 0;
            for &n in &sizes {
                a.push(bits[k..k + n].to_vec());
                k += n;
            }
            let g = gamma_interior(&e, &a);
            prop_assert!(g.is_closed());
            let oracle = gamma_interior_oracle(&e, &a).unwrap();
            prop_assert_eq!(g.members(), oracle.members());
            let mut k = 0;
            let fam: Vec<Vec<bool>> = sizes.iter().map(|&n| { let r = sbits[k..k + n].to_vec(); k += n; r }).collect();
            let s = gamma_interior(&e, &fam);
            prop_assert!(interior_adjunction_holds(&s, &a));
        }
    }

    #[test]
    fn kripke_bridge_round_trip() {
        let kf = KripkeFrame::chain(2).unwrap();
        let m = kf.model().unwrap();
        let om = m.frame().arrow_sets().unwrap().clone();
        let all: BTreeSet<String> = kf.worlds().iter().cloned().collect();
        let top = kf.valuation_to_nat(&om, &all).unwrap();
        for k in kf.base().objects() {
            assert_eq!(top.apply(k, 0), om.top(k));
        }
        let none = kf.valuation_to_nat(&om, &BTreeSet::new()).unwrap();
        for k in kf.base().objects() {
            assert_eq!(none.apply(k, 0), om.bot(k));
        }
        let val = BTreeMap::from([("p".to_string(), BTreeSet::from(["w1".to_string()]))]);
        let bp = parse_term("box p").unwrap();
        assert!(!kf.eval(&val, &bp, "w0").unwrap());
        assert!(!kf.eval(&val, &bp, "w1").unwrap());
        assert!(kf.eval(&val, &parse_term("p").unwrap(), "w1").unwrap());
        assert_eq!(kf.bridge_defect(&m, &val, &bp).unwrap(), None);
        let val = BTreeMap::from([("p".to_string(), BTreeSet::from(["w0".to_string()]))]);
        assert!(kf.eval(&val, &bp, "w0").unwrap());
        assert!(!kf.eval(&val, &bp, "w1").unwrap());
        assert_eq!(kf.bridge_defect(&m, &val, &bp).unwrap(), None);
    }

    #[test]
    fn kripke_bridge_exhaustive_on_chain3() {
        let kf = KripkeFrame::chain(3).unwrap();
        let m = kf.model().unwrap();
        let formulas = ["box p => p", "box p => box box p", "box (p => q) => box p => box q", "~box p \\/ box ~~p", "box (p \\/ q) => box p \\/ box q"]
            .map(|s| parse_term(s).unwrap());
        let subsets: Vec<BTreeSet<String>> = (0..8u32)
            .map(|b| (0..3).filter(|k| b & (1 << k) != 0).map(|k| format!("w{k}")).collect())
            .collect();
        for p in &subsets {
            for q in &subsets {
                let val = BTreeMap::from([("p".to_string(), p.clone()), ("q".to_string(), q.clone())]);
                for phi in &formulas {
                    assert_eq!(kf.bridge_defect(&m, &val, phi).unwrap(), None, "{phi}");
                }
            }
        }
    }

    #[test]
    fn rejects_non_preorder() {
        assert!(matches!(
            KripkeFrame::new(&["a", "b"], &[("a", "a")]),
            Err(ForcingError::NotAPreorder(_))
        ));
    }
}

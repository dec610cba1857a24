//! Named executable checks: the S4 laws, the extensionality
//! counterexamples and their modal repairs, the initial-frame machinery,
//! and a soundness sweep over the deduction schemas.
//!
//! Every check is deterministic. A failing item always carries a witness.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::bundled;
use crate::corpus::{TermGen, DEFAULT_SEED};
use crate::fincat::{ArrowId, CategoryError, FiniteCategory, ObjId};
use crate::forcing::ForcingError;
use crate::frame::{
    adjunction_defect, check_unique_i, enumerate_frame_maps, forall_i, imp_lemma_defect, FrameError,
    FrameMaps, InternalFrame,
};
use crate::omega::{bit, bits_label, delta_mask, OmegaError};
use crate::presheaf::{enumerate_nats, exponential, Exponential, Presheaf, PresheafError};
use crate::semantics::{Model, SemanticsError, Verdict};
use crate::syntax::{parse_term, substitute, Context, ParseError, Sequent, Term, Type};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("size {0} is too small: the powerset of a singleton is the two-element algebra")]
    SizeTooSmall(usize),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Forcing(#[from] ForcingError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// One assertion of a check. `expect_hold` states the predicted verdict;
/// the item is fine when the observed verdict matches and nothing was
/// skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub expect_hold: bool,
    pub held: bool,
    pub instances: usize,
    pub skipped: usize,
    pub witness: Option<String>,
}

impl CheckItem {
    pub fn new(name: &str, expect_hold: bool, held: bool, witness: Option<String>) -> CheckItem {
        CheckItem { name: name.to_string(), expect_hold, held, instances: 1, skipped: 0, witness }
    }

    pub fn ok(&self) -> bool {
        self.held == self.expect_hold && self.skipped == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// Stable label of the result the check reproduces.
    pub anchor: String,
    pub model: String,
    pub items: Vec<CheckItem>,
    #[serde(skip)]
    pub runtime: Duration,
}

impl CheckReport {
    fn new(name: &str, anchor: &str, model: &str) -> CheckReport {
        CheckReport {
            name: name.into(),
            anchor: anchor.into(),
            model: model.into(),
            items: Vec::new(),
            runtime: Duration::ZERO,
        }
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(CheckItem::ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.items.iter().filter(|i| !i.ok())
    }

    /// Plain-text rendering without timings, byte-stable for fixed input.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "[{status}] {} ({}) on {}", self.name, self.anchor, self.model);
        for it in &self.items {
            let mark = if it.ok() { "ok  " } else { "BAD " };
            let expect = if it.expect_hold { "holds" } else { "fails" };
            let seen = if it.held { "holds" } else { "fails" };
            let _ = write!(out, "  {mark} {}: expected {expect}, observed {seen}", it.name);
            if it.instances != 1 {
                let _ = write!(out, " ({} instances)", it.instances);
            }
            if it.skipped > 0 {
                let _ = write!(out, " ({} skipped by size guard)", it.skipped);
            }
            out.push('\n');
            if let Some(w) = &it.witness {
                let _ = writeln!(out, "       witness: {w}");
            }
        }
        out
    }
}

fn timed(f: impl FnOnce() -> Result<CheckReport, SuiteError>) -> Result<CheckReport, SuiteError> {
    let t0 = Instant::now();
    let mut r = f()?;
    r.runtime = t0.elapsed();
    Ok(r)
}

fn term(src: &str) -> Result<Term, SuiteError> {
    Ok(parse_term(src)?)
}

fn ctx(vars: &[(&str, Type)]) -> Context {
    Context::from_vars(vars.iter().map(|(x, t)| (x.to_string(), t.clone())).collect()).expect("distinct variables")
}

fn seq(vars: &[(&str, Type)], lhs: &str, rhs: &str) -> Result<Sequent, SuiteError> {
    Ok(Sequent::new(ctx(vars), term(lhs)?, term(rhs)?))
}

fn verdict_witness(s: &Sequent, v: &Verdict) -> Option<String> {
    let w = v.witnesses.first()?;
    let binds: Vec<String> = w.bindings.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let more = match v.witnesses.len() {
        1 => String::new(),
        n => format!(" (+{} more)", n - 1),
    };
    Some(format!("{s}: at {} with [{}], lhs {} is not below rhs {}{more}", w.object, binds.join(", "), w.lhs, w.rhs))
}

fn holds_item(m: &Model, name: &str, s: &Sequent, expect: bool) -> Result<CheckItem, SuiteError> {
    let v = m.holds(s)?;
    Ok(CheckItem::new(name, expect, v.holds, verdict_witness(s, &v)))
}

fn p() -> Type {
    Type::Prop
}

/// Accumulates instances of one schema.
struct Schema {
    item: CheckItem,
}

impl Schema {
    fn new(name: &str) -> Schema {
        Schema { item: CheckItem { name: name.into(), expect_hold: true, held: true, instances: 0, skipped: 0, witness: None } }
    }

    fn expect(mut self, hold: bool) -> Schema {
        self.item.expect_hold = hold;
        self
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Option<String>) {
        self.item.instances += 1;
        if !ok {
            if self.item.held {
                self.item.witness = witness();
            }
            self.item.held = false;
        }
    }

    fn skip(&mut self) {
        self.item.skipped += 1;
    }

    /// Global satisfaction of one instance.
    fn holds(&mut self, m: &Model, s: &Sequent) -> Result<bool, SuiteError> {
        let v = match m.holds(s) {
            Err(e) if is_size_guard(&e) => {
                self.skip_with(s.to_string());
                return Ok(true);
            }
            r => r?,
        };
        let ok = v.holds;
        self.record(ok, || verdict_witness(s, &v));
        Ok(ok)
    }

    /// Skipped instances are named in the witness slot so that reports
    /// say what was not checked.
    fn skip_with(&mut self, what: String) {
        self.skip();
        if self.item.witness.is_none() {
            self.item.witness = Some(format!("skipped by size guard: {what}"));
        }
    }
}

fn is_size_guard(e: &SemanticsError) -> bool {
    matches!(e, SemanticsError::Presheaf(PresheafError::SizeGuardExceeded { .. }))
}

fn as_refs(v: &[(String, Type)]) -> Vec<(&str, Type)> {
    v.iter().map(|(x, t)| (x.as_str(), t.clone())).collect()
}

/// Sizes of `⟦Γ⟧(C)` never exceed `guard`.
fn fits(m: &Model, vars: &[(&str, Type)], guard: usize) -> Result<bool, SuiteError> {
    for c in m.base().objects() {
        let mut n: usize = 1;
        for (_, t) in vars {
            n = n.saturating_mul(m.interp_type(t)?.size(c));
        }
        if n > guard {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks a rule at every generalized element `γ` of the prefix context
/// shared by all sequents: premises holding locally at `γ` must give the
/// conclusions locally at `γ`, and conversely when `two_way`.
fn local_rule(
    m: &Model,
    pre: &[(&str, Type)],
    premises: &[Sequent],
    conclusions: &[Sequent],
    two_way: bool,
) -> Result<Option<String>, SuiteError> {
    let pctx = ctx(pre);
    let g = m.context_product(&pctx)?;
    let n = pre.len();
    for c in m.base().objects() {
        for y in 0..g.presheaf().size(c) {
            let mut a = true;
            for s in premises {
                a = a && m.holds_local(s, n, c, y)?;
            }
            let mut b = true;
            for s in conclusions {
                b = b && m.holds_local(s, n, c, y)?;
            }
            if (two_way && a != b) || (!two_way && a && !b) {
                let binds: Vec<String> = m.bindings(&pctx, c, y)?.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let show = |ss: &[Sequent]| ss.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" and ");
                return Ok(Some(format!(
                    "at {} with [{}]: [{}] is {a} but [{}] is {b}",
                    m.base().object_name(c),
                    binds.join(", "),
                    show(premises),
                    show(conclusions)
                )));
            }
        }
    }
    Ok(None)
}

impl Schema {
    fn local(
        &mut self,
        m: &Model,
        pre: &[(&str, Type)],
        premises: &[Sequent],
        conclusions: &[Sequent],
        two_way: bool,
    ) -> Result<(), SuiteError> {
        let w = match local_rule(m, pre, premises, conclusions, two_way) {
            Err(SuiteError::Semantics(e)) if is_size_guard(&e) => {
                self.skip_with(conclusions.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" and "));
                return Ok(());
            }
            r => r?,
        };
        self.record(w.is_none(), || w);
        Ok(())
    }
}

// ----------------------------------------------------------------------
// S4

/// The S4 laws of `□ = i∘τ`, elementwise on `H` and on formula instances.
pub fn s4_suite(m: &Model) -> Result<CheckReport, SuiteError> {
    timed(|| {
        let mut r = CheckReport::new("s4", "s4-laws", m.name());
        let report = m.maps().s4_report(m.frame());
        for (name, w) in report.entries() {
            r.items.push(CheckItem::new(&format!("elementwise {name}"), true, w.is_none(), w.clone()));
        }
        let mut vars: Vec<(&str, Type)> = vec![("p", p()), ("q", p())];
        let mut atoms = vec!["p", "q", "box p", "p => q"];
        let base_eq;
        if let Some(x) = m.base_types().keys().next() {
            vars.push(("x", Type::base(x)));
            vars.push(("y", Type::base(x)));
            base_eq = format!("forall z:{x}. z = x \\/ q");
            atoms.push("x = y");
            atoms.push("p /\\ x = y");
            atoms.push(&base_eq);
        }
        let mut t = Schema::new("T: box phi |- phi");
        let mut four = Schema::new("4: box phi |- box box phi");
        let mut k = Schema::new("K: box (phi => psi) /\\ box phi |- box psi");
        let mut meets = Schema::new("box (phi /\\ psi) -||- box phi /\\ box psi");
        let mut nec = Schema::new("necessitation: top |- phi gives top |- box phi");
        let mut mono = Schema::new("monotone: phi |- psi gives box phi |- box psi");
        let mut top = Schema::new("top |- box top");
        top.holds(m, &seq(&vars, "top", "box top")?)?;
        for a in &atoms {
            t.holds(m, &seq(&vars, &format!("box ({a})"), a)?)?;
            four.holds(m, &seq(&vars, &format!("box ({a})"), &format!("box box ({a})"))?)?;
            nec.local(m, &vars, &[seq(&vars, "top", a)?], &[seq(&vars, "top", &format!("box ({a})"))?], false)?;
            for b in &atoms {
                k.holds(m, &seq(&vars, &format!("box (({a}) => ({b})) /\\ box ({a})"), &format!("box ({b})"))?)?;
                let both = format!("box ({a}) /\\ box ({b})");
                let inner = format!("box (({a}) /\\ ({b}))");
                meets.holds(m, &seq(&vars, &inner, &both)?)?;
                meets.holds(m, &seq(&vars, &both, &inner)?)?;
                mono.local(
                    m,
                    &vars,
                    &[seq(&vars, a, b)?],
                    &[seq(&vars, &format!("box ({a})"), &format!("box ({b})"))?],
                    false,
                )?;
            }
        }
        r.items.extend([t, four, k, meets, nec, mono, top].map(|s| s.item));
        Ok(r)
    })
}

// ----------------------------------------------------------------------
// propositional extensionality

fn mask_name(m: usize) -> String {
    let els: Vec<String> = (0..usize::BITS as usize).filter(|k| m >> k & 1 == 1).map(|k| k.to_string()).collect();
    format!("{{{}}}", els.join(","))
}

/// Over `H = P(X)` with `|X| = n` on the terminal category: the plain
/// principle fails with an explicit pair, `τ∘⇒ = δ∘⟨π₁,∧⟩` holds, and the
/// modalized principle holds.
pub fn prop_ext_counterexample(n: usize) -> Result<CheckReport, SuiteError> {
    if n < 2 {
        return Err(SuiteError::SizeTooSmall(n));
    }
    timed(|| {
        let m = bundled::powerset_model(n)?;
        let mut r = CheckReport::new("prop-ext", "propext-counterexample", m.name());
        let (frame, maps) = (m.frame(), m.maps());
        let c = ObjId(0);
        let full = (1usize << n) - 1;
        // element index of a subset is its bitmask
        let idx_ok = (0..=full).all(|u| frame.element_name(c, u) == mask_name(u));
        r.items.push(CheckItem::new("subsets are indexed by bitmask", true, idx_ok, None));
        let mut imp_bad = None;
        let mut pair = None;
        let mut tau_bad = None;
        for u in 0..=full {
            for v in 0..=full {
                let union = (0..=full).filter(|w| w & u & !v == 0).fold(0, |a, w| a | w);
                let imp = frame.imp(c, u, v);
                if imp != union && imp_bad.is_none() {
                    imp_bad = Some(format!("U = {}, V = {}: {} vs {}", mask_name(u), mask_name(v), mask_name(imp), mask_name(union)));
                }
                let eq = maps.i_mask(c, delta_mask(frame.carrier(), c, u, frame.meet(c, u, v)));
                if u & !v != 0 {
                    if pair.is_none() && v != 0 && imp != 0 && eq != imp {
                        pair = Some(format!(
                            "U = {}, V = {}: U => V = {}, i delta <p1, /\\>(U, V) = {}",
                            mask_name(u),
                            mask_name(v),
                            mask_name(imp),
                            mask_name(eq)
                        ));
                    }
                    if maps.tau_mask(c, imp) != 0 && tau_bad.is_none() {
                        tau_bad = Some(format!("U = {}, V = {}", mask_name(u), mask_name(v)));
                    }
                }
            }
        }
        r.items.push(CheckItem::new("U => V is the union of all W with W /\\ U <= V", true, imp_bad.is_none(), imp_bad));
        r.items.push(CheckItem::new(
            "i delta <p1, /\\> differs from => at some U not below V",
            true,
            pair.is_some(),
            pair,
        ));
        r.items.push(CheckItem::new("tau (U => V) is bottom whenever U is not below V", true, tau_bad.is_none(), tau_bad));
        let lemma = imp_lemma_defect(frame, maps);
        r.items.push(CheckItem::new("tau . => = delta . <p1, /\\> at every pair", true, lemma.is_none(), lemma));
        let vars = [("p", p()), ("q", p())];
        r.items.push(holds_item(&m, "plain propositional extensionality", &seq(&vars, "p <=> q", "p = q")?, false)?);
        r.items.push(holds_item(
            &m,
            "modalized propositional extensionality",
            &seq(&vars, "box (p <=> q)", "p = q")?,
            true,
        )?);
        Ok(r)
    })
}

// ----------------------------------------------------------------------
// function extensionality

fn named(m: &Model, p: &Presheaf, c: ObjId, alias: &str) -> Result<usize, SuiteError> {
    Ok(m.resolve_element(p, c, alias, "element")?)
}

/// The element of `H^G(D)` sending `(h, a)` to `iδ_G(η(h, a), μ(h, a))`.
fn pointwise_eq(m: &Model, exp: &Exponential, hexp: &Exponential, d: ObjId, eta: usize, mu: usize) -> Option<usize> {
    let g = exp.domain();
    let cod = exp.codomain();
    let base = m.base();
    let _ = g;
    hexp.lookup_with(d, |h, a| {
        let x = base.dom(h);
        m.maps().i_mask(x, delta_mask(cod, x, exp.value(d, eta, h, a), exp.value(d, mu, h, a)))
    })
}

/// The loop-graph counterexample and its modal repair.
pub fn fun_ext_counterexample() -> Result<CheckReport, SuiteError> {
    timed(|| {
        let m = bundled::loop_graph_model();
        let mo = bundled::loop_graph_omega_model();
        let mut r = CheckReport::new("fun-ext", "funext-counterexample", m.name());
        let base = m.base().clone();
        let (c, d) = (base.object("C")?, base.object("D")?);
        let garr = base.arrow_by_name("g")?;
        let one_d = base.identity(d);
        let gty = Type::base("G");
        let gg = Type::exp(gty.clone(), gty.clone());
        let exp = m.exp_of(&gty, &gty)?;
        let eta = named(&m, exp.presheaf(), d, "eta")?;
        let mu = named(&m, exp.presheaf(), d, "mu")?;
        let gp = exp.domain().clone();
        let w = gp.element_index(c, "w")?;
        let differ = eta != mu && exp.value(d, eta, garr, w) != exp.value(d, mu, garr, w);
        r.items.push(CheckItem::new(
            "eta and mu differ at (g, w)",
            true,
            differ,
            Some(format!(
                "eta(g, w) = {}, mu(g, w) = {}",
                gp.element_name(c, exp.value(d, eta, garr, w)),
                gp.element_name(c, exp.value(d, mu, garr, w))
            )),
        ));
        let om = m.frame().arrow_sets().expect("arrow sets").clone();
        let render = |x: usize| om.render(d, x);

        // equality of functions, by the interpreter and directly
        let vars = [("f", gg.clone()), ("g", gg.clone())];
        let fctx = ctx(&vars);
        let gprod = m.context_product(&fctx)?;
        let gamma = gprod.tuple(d, &[eta, mu]);
        let (eq_t, _) = m.elaborate(&fctx, &term("f = g")?)?;
        let via_terms = m.value_at(&fctx, &eq_t, d, gamma)?;
        let direct = m.maps().i_mask(d, delta_mask(exp.presheaf(), d, eta, mu));
        r.items.push(CheckItem::new(
            "i_D (delta_{G^G})_D (eta, mu) = {}",
            true,
            render(via_terms) == "{}" && via_terms == direct,
            Some(format!("interpreter {}, direct {}", render(via_terms), render(direct))),
        ));

        // pointwise equality, quantified
        let (all_t, _) = m.elaborate(&fctx, &term("forall y:G. f @ y = g @ y")?)?;
        let via_terms = m.value_at(&fctx, &all_t, d, gamma)?;
        let hexp = exponential(&gp, m.frame().carrier())?;
        let all = forall_i(m.frame(), &hexp)?;
        let elem = pointwise_eq(&m, &exp, &hexp, d, eta, mu).ok_or_else(|| PresheafError::ShapeMismatch("not natural".into()))?;
        let direct = all.apply(d, elem);
        r.items.push(CheckItem::new(
            "forall_D ((i delta_G)^G)_D (eta, mu) = {1_D}",
            true,
            render(via_terms) == "{1_D}" && via_terms == direct,
            Some(format!("interpreter {}, direct {}", render(via_terms), render(direct))),
        ));

        let only_id = om.at(d, bit(one_d));
        let tau = m.maps().tau_mask(d, only_id);
        r.items.push(CheckItem::new(
            "tau_D ({1_D}) = {}",
            true,
            tau == 0,
            Some(format!("tau_D ({{1_D}}) = {}", crate::omega::render_mask(&base, tau))),
        ));
        let boxed = m.maps().box_at(d, only_id);
        r.items.push(CheckItem::new("box collapses {1_D} to {}", true, render(boxed) == "{}", Some(render(boxed))));

        let modal = seq(&vars, "box (forall y:G. f @ y = g @ y)", "f = g")?;
        r.items.push(holds_item(&m, "modalized function extensionality", &modal, true)?);
        let plain = seq(&vars, "forall y:G. f @ y = g @ y", "f = g")?;
        let v = m.holds(&plain)?;
        let at_d = v.witnesses.iter().all(|w| w.object == "D")
            && v.witnesses.iter().any(|w| {
                w.bindings == vec![("f".to_string(), "eta".to_string()), ("g".to_string(), "mu".to_string())]
            });
        r.items.push(CheckItem::new("plain function extensionality", false, v.holds, verdict_witness(&plain, &v)));
        r.items.push(CheckItem::new(
            "plain failures sit at D, including (eta, mu)",
            true,
            !v.holds && at_d,
            verdict_witness(&plain, &v),
        ));

        // combinatorial labels, bits ordered as [g, 1_D]
        let order = [garr, one_d];
        let om_plain = mo.frame().arrow_sets().expect("sieves").clone();
        let sizes = (om_plain.masks(d).len(), om.masks(d).len());
        r.items.push(CheckItem::new(
            "|Omega(D)| = 3 and |Omega_*(D)| = 4",
            true,
            sizes == (3, 4),
            Some(format!("{} and {}", sizes.0, sizes.1)),
        ));
        let at_u = bits_label(delta_mask(&gp, d, exp.value(d, eta, one_d, 0), exp.value(d, mu, one_d, 0)), &order);
        let at_w = if delta_mask(&gp, c, exp.value(d, eta, garr, w), exp.value(d, mu, garr, w)) != 0 { "1" } else { "0" };
        let label = format!("{}{}{}", &at_u[..1], at_w, &at_u[1..]);
        r.items.push(CheckItem::new("(delta^G)_D (eta, mu) is labelled 101", true, label == "101", Some(label)));
        for (model, sets, expected) in [(&m, &om, "01"), (&mo, &om_plain, "00")] {
            let exp = model.exp_of(&gty, &gty)?;
            let hexp = exponential(&gp, model.frame().carrier())?;
            let all = forall_i(model.frame(), &hexp)?;
            let (e1, e2) = (named(model, exp.presheaf(), d, "eta")?, named(model, exp.presheaf(), d, "mu")?);
            let elem = pointwise_eq(model, &exp, &hexp, d, e1, e2).ok_or_else(|| PresheafError::ShapeMismatch("not natural".into()))?;
            let got = bits_label(sets.mask(d, all.apply(d, elem)), &order);
            r.items.push(CheckItem::new(
                &format!("forall_D (101) = {expected} over {}", model.frame().kind()),
                true,
                got == expected,
                Some(got),
            ));
        }
        Ok(r)
    })
}

/// Plain function extensionality on the arrow base with a constant domain
/// of size `n`.
pub fn constant_domain_check(n: usize) -> Result<CheckReport, SuiteError> {
    if n < 1 {
        return Err(SuiteError::SizeTooSmall(n));
    }
    timed(|| {
        let m = bundled::constant_domain_model(n)?;
        let mut r = CheckReport::new("constant-domain", "constant-domain-funext", m.name());
        let gty = Type::base("G");
        let gg = Type::exp(gty.clone(), gty.clone());
        let collisions = identity_probe_collisions(&m, &gty, &gty)?;
        r.items.push(CheckItem::new(
            "no two distinct functions agree on every identity probe",
            true,
            collisions.is_none(),
            collisions,
        ));
        let vars = [("f", gg.clone()), ("g", gg)];
        r.items.push(holds_item(&m, "plain function extensionality", &seq(&vars, "forall y:G. f @ y = g @ y", "f = g")?, true)?);
        r.items.push(holds_item(
            &m,
            "modalized function extensionality",
            &seq(&vars, "box (forall y:G. f @ y = g @ y)", "f = g")?,
            true,
        )?);
        Ok(r)
    })
}

/// A pair of distinct elements of `B^A(D)` that agree on all identity
/// probes `(1_D, a)`, if one exists. On arrow-set frames such a pair is
/// exactly what breaks plain function extensionality.
fn identity_probe_collisions(m: &Model, cod: &Type, dom: &Type) -> Result<Option<String>, SuiteError> {
    let exp = m.exp_of(cod, dom)?;
    let base = m.base();
    for d in base.objects() {
        let id = base.identity(d);
        let n = exp.presheaf().size(d);
        for e1 in 0..n {
            for e2 in e1 + 1..n {
                if (0..exp.domain().size(d)).all(|a| exp.value(d, e1, id, a) == exp.value(d, e2, id, a)) {
                    return Ok(Some(format!(
                        "{} and {} at {}",
                        m.display(exp.presheaf(), d, e1),
                        m.display(exp.presheaf(), d, e2),
                        base.object_name(d)
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// Expected verdict of plain function extensionality at `cod^dom`: it
/// fails exactly on arrow-set frames with an identity-probe collision.
pub fn plain_funext_expected(m: &Model, cod: &Type, dom: &Type) -> Result<bool, SuiteError> {
    Ok(!(m.frame().is_geometric() && identity_probe_collisions(m, cod, dom)?.is_some()))
}

/// Expected verdict of plain propositional extensionality: it holds
/// exactly when `i` is surjective at every object.
pub fn plain_propext_expected(m: &Model) -> bool {
    let (frame, maps) = (m.frame(), m.maps());
    frame.base().objects().all(|c| {
        let image: BTreeSet<usize> = (0..maps.omega().masks(c).len()).map(|s| maps.i_at(c, s)).collect();
        image.len() == frame.size(c)
    })
}

// ----------------------------------------------------------------------
// initial frame and adjoints

/// Uniqueness of `i` by enumeration, injectivity, `i ⊣ τ`, and the S4
/// laws of `□` for one frame.
pub fn frame_suite(frame: &InternalFrame, base_name: &str) -> Result<CheckReport, SuiteError> {
    timed(|| {
        let mut r = CheckReport::new("initial-frame", "initial-frame-map", &format!("{} over {base_name}", frame.kind()));
        let maps = FrameMaps::canonical(frame)?;
        let found = enumerate_frame_maps(frame)?.len();
        let unique = check_unique_i(frame, &maps);
        r.items.push(CheckItem::new(
            "canonical i is the only frame map",
            true,
            unique.is_ok(),
            Some(format!("{found} frame map(s) found")),
        ));
        let faithful = maps.check_faithful(frame);
        r.items.push(CheckItem::new("i is injective", true, faithful.is_ok(), faithful.err().map(|e| e.to_string())));
        let galois = maps.check_galois(frame);
        r.items.push(CheckItem::new("i -| tau at every element", true, galois.is_ok(), galois.err().map(|e| e.to_string())));
        let s4 = maps.s4_report(frame);
        r.items.push(CheckItem::new(
            "box satisfies the S4 laws elementwise",
            true,
            s4.passed(),
            s4.entries().iter().find_map(|(n, w)| w.as_ref().map(|w| format!("{n}: {w}"))),
        ));
        Ok(r)
    })
}

/// `∃ ⊣ Δ ⊣ ∀` at every element for each index presheaf.
pub fn adjoint_suite(frame: &InternalFrame, indices: &[(String, Arc<Presheaf>)]) -> Result<CheckReport, SuiteError> {
    timed(|| {
        let mut r = CheckReport::new("adjoints", "quantifier-adjoints", &frame.kind().to_string());
        for (name, i) in indices {
            let d = adjunction_defect(frame, i)?;
            r.items.push(CheckItem::new(&format!("exists -| Delta -| forall over {name}"), true, d.is_none(), d));
        }
        Ok(r)
    })
}

/// `i∘δ_{X^Y} = i∘τ∘∀_Y∘(iδ_X)^Y` at every object and pair. Returns the
/// first violation.
pub fn funext_lemma_defect(frame: &InternalFrame, x: &Arc<Presheaf>, y: &Arc<Presheaf>) -> Result<Option<String>, SuiteError> {
    let maps = FrameMaps::canonical(frame)?;
    let base = frame.base();
    let exp = exponential(y, x)?;
    let hexp = exponential(y, frame.carrier())?;
    let all = forall_i(frame, &hexp)?;
    for c in base.objects() {
        let n = exp.presheaf().size(c);
        for e1 in 0..n {
            for e2 in 0..n {
                let lhs = maps.i_mask(c, delta_mask(exp.presheaf(), c, e1, e2));
                let elem = hexp
                    .lookup_with(c, |h: ArrowId, a| {
                        let xo = base.dom(h);
                        maps.i_mask(xo, delta_mask(x, xo, exp.value(c, e1, h, a), exp.value(c, e2, h, a)))
                    })
                    .ok_or_else(|| PresheafError::ShapeMismatch("pointwise equality is not natural".into()))?;
                let rhs = maps.i_at(c, maps.tau_at(c, all.apply(c, elem)));
                if lhs != rhs {
                    return Ok(Some(format!(
                        "at {}: {} vs {} on ({}, {})",
                        base.object_name(c),
                        frame.element_name(c, lhs),
                        frame.element_name(c, rhs),
                        exp.presheaf().element_name(c, e1),
                        exp.presheaf().element_name(c, e2)
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// Presheaves on the arrow category `C -> D` up to isomorphism with at
/// most `max_total` elements. A class is `(|F(C)|, partition of |F(D)|
/// into at most |F(C)| fibres of F(g))`.
pub fn arrow_presheaves(base: &Arc<FiniteCategory>, max_total: usize) -> Result<Vec<Arc<Presheaf>>, SuiteError> {
    fn partitions(n: usize, max_parts: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        if cur.len() == max_parts {
            return;
        }
        for k in (1..=max_part.min(n)).rev() {
            cur.push(k);
            partitions(n - k, max_parts, k, cur, out);
            cur.pop();
        }
    }
    let c = base.object("C")?;
    let g = base.arrow_by_name("g")?;
    let mut out = Vec::new();
    for total in 0..=max_total {
        for a in 0..=total {
            let b = total - a;
            let mut parts = Vec::new();
            partitions(b, a, b, &mut Vec::new(), &mut parts);
            for part in parts {
                let fc: Vec<String> = (0..a).map(|k| format!("c{k}")).collect();
                let fd: Vec<String> = (0..b).map(|k| format!("d{k}")).collect();
                let img: Vec<usize> = part.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k)).collect();
                let mut sets = vec![Vec::new(); base.num_objects()];
                sets[c.0] = fc;
                sets[1 - c.0] = fd;
                let mut restrict = vec![Vec::new(); base.num_arrows()];
                for f in base.arrow_ids() {
                    restrict[f.0] = if f == g { img.clone() } else { (0..sets[base.dom(f).0].len()).collect() };
                }
                out.push(Arc::new(Presheaf::new(base.clone(), sets, restrict)?));
            }
        }
    }
    Ok(out)
}

// ----------------------------------------------------------------------
// soundness sweep

/// Types of height at most `depth` built from `1`, `P` and the base types.
pub fn types_up_to(m: &Model, depth: usize) -> Vec<Type> {
    let mut atoms = vec![Type::Unit, Type::Prop];
    atoms.extend(m.base_types().keys().map(|n| Type::base(n)));
    let mut all = atoms.clone();
    for _ in 1..depth {
        let prev = all.clone();
        for a in &prev {
            for b in &prev {
                for t in [Type::prod(a.clone(), b.clone()), Type::exp(a.clone(), b.clone())] {
                    if !all.contains(&t) {
                        all.push(t);
                    }
                }
            }
        }
    }
    all
}

/// Default cap on `|⟦Γ⟧(C)|` for one schema instance.
pub const DEFAULT_GUARD: usize = crate::fincat::DEFAULT_MAX_ELEMENTS;

fn gen_formula(gen: &mut TermGen, ctx: &Context, must_mention: &str) -> Term {
    for _ in 0..64 {
        let t = gen.term(ctx, &Type::Prop, 2);
        if t.free_vars().contains(must_mention) {
            return t;
        }
    }
    Term::eq(None, Term::var(must_mention), Term::var(must_mention))
}

/// Instantiates every deduction schema at the types of height at most
/// `depth` and checks it. Rules are checked locally at every generalized
/// element of their parameters, two-way rules in both directions.
pub fn soundness_suite(m: &Model, depth: usize, guard: usize) -> Result<CheckReport, SuiteError> {
    soundness_suite_seeded(m, depth, guard, DEFAULT_SEED)
}

/// As [`soundness_suite`], with the seed for generated instances.
pub fn soundness_suite_seeded(m: &Model, depth: usize, guard: usize, seed: u64) -> Result<CheckReport, SuiteError> {
    timed(|| {
        let mut r = CheckReport::new("soundness", "deduction-rules", m.name());
        let types = types_up_to(m, depth);
        let atoms: Vec<Type> = types.iter().filter(|t| t.height() == 1).cloned().collect();
        let bases: Vec<Type> = m.base_types().keys().map(|n| Type::base(n)).collect();
        // one variable per base type keeps every base type inhabited for
        // generated terms
        let bvars: Vec<(String, Type)> = bases.iter().enumerate().map(|(k, t)| (format!("b{k}"), t.clone())).collect();
        let mut gen = TermGen::new(seed, atoms.clone());
        let three = [("p", p()), ("q", p()), ("r", p())];

        let mut schemas: Vec<Schema> = Vec::new();
        macro_rules! schema {
            ($name:expr, $body:expr) => {{
                let mut s = Schema::new($name);
                #[allow(clippy::redundant_closure_call)]
                ($body)(&mut s)?;
                schemas.push(s);
            }};
        }
        let vars_of = |extra: &[(&str, Type)]| -> Vec<(String, Type)> {
            extra.iter().map(|(x, t)| (x.to_string(), t.clone())).collect()
        };
        let fits_or_skip = |s: &mut Schema, vars: &[(&str, Type)]| -> Result<bool, SuiteError> {
            let ok = fits(m, vars, guard)?;
            if !ok {
                s.skip();
            }
            Ok(ok)
        };

        // structural
        schema!("identity: phi |- phi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&[("p", p())], "p", "p")?)?;
            for a in &atoms {
                let v = [("R", Type::exp(p(), a.clone())), ("x", a.clone())];
                if fits_or_skip(s, &v)? {
                    s.holds(m, &seq(&v, "R @ x", "R @ x")?)?;
                }
            }
            Ok(())
        });
        schema!("cut: phi |- psi and psi |- chi give phi |- chi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.local(m, &three, &[seq(&three, "p", "q")?, seq(&three, "q", "r")?], &[seq(&three, "p", "r")?], false)
        });
        schema!("substitution: Gamma, x:A | phi |- psi gives phi[t/x] |- psi[t/x]", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &atoms {
                let mut pre = vars_of(&[("p", p())]);
                pre.extend(bvars.iter().cloned());
                let pre_ctx = Context::from_vars(pre.clone()).expect("distinct");
                let mut full = pre.clone();
                full.push(("x".into(), a.clone()));
                let full_ctx = Context::from_vars(full.clone()).expect("distinct");
                if !fits_or_skip(s, &as_refs(&full))? {
                    continue;
                }
                for _ in 0..3 {
                    let phi = gen_formula(&mut gen, &full_ctx, "x");
                    let psi = gen_formula(&mut gen, &full_ctx, "x");
                    let t = gen.term(&pre_ctx, a, 2);
                    let prem = Sequent::new(full_ctx.clone(), phi.clone(), psi.clone());
                    let concl = Sequent::new(pre_ctx.clone(), substitute(&phi, "x", &t), substitute(&psi, "x", &t));
                    s.local(m, &as_refs(&pre), &[prem], &[concl], false)?;
                }
            }
            Ok(())
        });

        // equality
        schema!("reflexivity: top |- x = x", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &types {
                let v = [("x", a.clone())];
                if fits_or_skip(s, &v)? {
                    s.holds(m, &seq(&v, "top", "x = x")?)?;
                }
            }
            Ok(())
        });
        schema!("Leibniz: phi /\\ x = y |- phi[y/x]", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &types {
                if a.height() == 1 {
                    let v = [("R", Type::exp(p(), a.clone())), ("x", a.clone()), ("y", a.clone())];
                    if fits_or_skip(s, &v)? {
                        s.holds(m, &seq(&v, "R @ x /\\ x = y", "R @ y")?)?;
                    }
                }
                // every natural predicate on A, when few enough
                leibniz_by_enumeration(m, a, s)?;
                let mut full = bvars.clone();
                full.push(("x".into(), a.clone()));
                full.push(("y".into(), a.clone()));
                if !fits_or_skip(s, &as_refs(&full))? {
                    continue;
                }
                let fctx = Context::from_vars(full.clone()).expect("distinct");
                let gctx = fctx.without("y");
                for _ in 0..2 {
                    let phi = gen_formula(&mut gen, &gctx, "x");
                    let lhs = Term::and(phi.clone(), Term::eq(None, Term::var("x"), Term::var("y")));
                    s.holds(m, &Sequent::new(fctx.clone(), lhs, substitute(&phi, "x", &Term::var("y"))))?;
                }
            }
            Ok(())
        });
        schema!("(*) modalized function extensionality", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &atoms {
                for b in &atoms {
                    let f = Type::exp(b.clone(), a.clone());
                    let v = [("f", f.clone()), ("g", f)];
                    if fits_or_skip(s, &v)? {
                        s.holds(m, &seq(&v, &format!("box (forall x:{a}. f @ x = g @ x)"), "f = g")?)?;
                    }
                }
            }
            Ok(())
        });
        schema!("(*) modalized propositional extensionality", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&[("p", p()), ("q", p())], "box (p <=> q)", "p = q")?).map(|_| ())
        });

        // products and functions
        schema!("unit: top |- x = *", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&[("x", Type::Unit)], "top", "x = *")?).map(|_| ())
        });
        schema!("projections: p1 <x, y> = x and p2 <x, y> = y", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &atoms {
                for b in &atoms {
                    let v = [("x", a.clone()), ("y", b.clone())];
                    if fits_or_skip(s, &v)? {
                        s.holds(m, &seq(&v, "top", "p1 <x, y> = x")?)?;
                        s.holds(m, &seq(&v, "top", "p2 <x, y> = y")?)?;
                    }
                }
            }
            Ok(())
        });
        schema!("surjective pairing: <p1 z, p2 z> = z", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &atoms {
                for b in &atoms {
                    let v = [("z", Type::prod(a.clone(), b.clone()))];
                    if fits_or_skip(s, &v)? {
                        s.holds(m, &seq(&v, "top", "<p1 z, p2 z> = z")?)?;
                    }
                }
            }
            Ok(())
        });
        schema!("beta: (fun z:A => t) @ x = t[x/z]", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &atoms {
                for b in &atoms {
                    let v = [("h", Type::exp(b.clone(), a.clone())), ("x", a.clone())];
                    if fits_or_skip(s, &v)? {
                        s.holds(m, &seq(&v, "top", &format!("(fun z:{a} => h @ z) @ x = h @ x"))?)?;
                    }
                    let mut full = bvars.clone();
                    full.push(("x".into(), a.clone()));
                    if !fits_or_skip(s, &as_refs(&full))? {
                        continue;
                    }
                    let xctx = Context::from_vars(full).expect("distinct");
                    let zctx = xctx.without("x").extended("z", a.clone());
                    let body = gen.term(&zctx, b, 2);
                    let lhs = Term::app(Term::lam("z", a.clone(), body.clone()), Term::var("x"));
                    let rhs = substitute(&body, "z", &Term::var("x"));
                    s.holds(m, &Sequent::new(xctx, Term::Top, Term::eq(None, lhs, rhs)))?;
                }
            }
            Ok(())
        });
        schema!("eta: (fun z:A => w @ z) = w", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &atoms {
                for b in &atoms {
                    let v = [("w", Type::exp(b.clone(), a.clone()))];
                    if fits_or_skip(s, &v)? {
                        s.holds(m, &seq(&v, "top", &format!("(fun z:{a} => w @ z) = w"))?)?;
                    }
                }
            }
            Ok(())
        });
        schema!("comprehension: x in {z | phi} = phi[x/z] and {z | z in S} = S", |s: &mut Schema| -> Result<(), SuiteError> {
            for a in &atoms {
                let v = [("R", Type::exp(p(), a.clone())), ("x", a.clone())];
                if fits_or_skip(s, &v)? {
                    s.holds(m, &seq(&v, "top", &format!("(x in {{z:{a} | R @ z}}) = R @ x"))?)?;
                }
                let v = [("S", Type::exp(p(), a.clone()))];
                if fits_or_skip(s, &v)? {
                    s.holds(m, &seq(&v, "top", &format!("{{z:{a} | z in S}} = S"))?)?;
                }
            }
            Ok(())
        });

        // lattice
        schema!("top: phi |- top", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&[("p", p())], "p", "top")?).map(|_| ())
        });
        schema!("bottom: bot |- phi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&[("p", p())], "bot", "p")?).map(|_| ())
        });
        schema!("conjunction: chi |- phi /\\ psi iff chi |- phi and chi |- psi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.local(m, &three, &[seq(&three, "r", "p /\\ q")?], &[seq(&three, "r", "p")?, seq(&three, "r", "q")?], true)
        });
        schema!("disjunction: phi \\/ psi |- chi iff phi |- chi and psi |- chi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.local(m, &three, &[seq(&three, "p \\/ q", "r")?], &[seq(&three, "p", "r")?, seq(&three, "q", "r")?], true)
        });
        schema!("implication: phi /\\ psi |- chi iff phi |- psi => chi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.local(m, &three, &[seq(&three, "p /\\ q", "r")?], &[seq(&three, "p", "q => r")?], true)
        });

        // quantifiers
        for universal in [true, false] {
            let name = if universal {
                "universal: phi |- forall x. psi iff phi |- psi"
            } else {
                "existential: exists x. psi |- phi iff psi |- phi"
            };
            schema!(name, |s: &mut Schema| -> Result<(), SuiteError> {
                for a in &types {
                    let (pre, psi): (Vec<(String, Type)>, Term) = if a.height() == 1 {
                        (vars_of(&[("p", p()), ("R", Type::exp(p(), a.clone()))]), term("R @ x")?)
                    } else {
                        let mut pre = vars_of(&[("p", p())]);
                        pre.extend(bvars.iter().cloned());
                        let c = Context::from_vars(pre.clone()).expect("distinct").extended("x", a.clone());
                        (pre, gen_formula(&mut gen, &c, "x"))
                    };
                    let mut full = pre.clone();
                    full.push(("x".into(), a.clone()));
                    if !fits_or_skip(s, &as_refs(&full))? {
                        continue;
                    }
                    let pctx = Context::from_vars(pre.clone()).expect("distinct");
                    let fctx = Context::from_vars(full).expect("distinct");
                    let (quant, inner) = if universal {
                        let q = Term::forall("x", a.clone(), psi.clone());
                        (Sequent::new(pctx, term("p")?, q), Sequent::new(fctx, term("p")?, psi))
                    } else {
                        let q = Term::exists("x", a.clone(), psi.clone());
                        (Sequent::new(pctx, q, term("p")?), Sequent::new(fctx, psi, term("p")?))
                    };
                    s.local(m, &as_refs(&pre), &[quant], &[inner], true)?;
                }
                Ok(())
            });
        }

        // S4
        let two = [("p", p()), ("q", p())];
        schema!("S4 T: box phi |- phi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&two, "box p", "p")?).map(|_| ())
        });
        schema!("S4 4: box phi |- box box phi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&two, "box p", "box box p")?).map(|_| ())
        });
        schema!("S4 K: box (phi => psi) /\\ box phi |- box psi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&two, "box (p => q) /\\ box p", "box q")?).map(|_| ())
        });
        schema!("S4 top |- box top", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&two, "top", "box top")?).map(|_| ())
        });
        schema!("S4 box (phi /\\ psi) -||- box phi /\\ box psi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.holds(m, &seq(&two, "box (p /\\ q)", "box p /\\ box q")?)?;
            s.holds(m, &seq(&two, "box p /\\ box q", "box (p /\\ q)")?).map(|_| ())
        });
        schema!("S4 necessitation: top |- phi gives top |- box phi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.local(m, &two, &[seq(&two, "top", "p")?], &[seq(&two, "top", "box p")?], false)
        });
        schema!("S4 monotonicity: phi |- psi gives box phi |- box psi", |s: &mut Schema| -> Result<(), SuiteError> {
            s.local(m, &two, &[seq(&two, "p", "q")?], &[seq(&two, "box p", "box q")?], false)
        });

        // the plain principles, against their oracles
        let mut expected_all = true;
        let mut agree = Schema::new("plain function extensionality agrees with the identity-probe oracle");
        let mut plain = Schema::new("plain function extensionality");
        for a in &atoms {
            for b in &atoms {
                let f = Type::exp(b.clone(), a.clone());
                let v = [("f", f.clone()), ("g", f)];
                if !fits_or_skip(&mut plain, &v)? {
                    agree.skip();
                    continue;
                }
                let expected = plain_funext_expected(m, b, a)?;
                expected_all &= expected;
                let sq = seq(&v, &format!("forall x:{a}. f @ x = g @ x"), "f = g")?;
                let held = plain.holds(m, &sq)?;
                agree.record(held == expected, || Some(format!("{sq}: oracle says {expected}, observed {held}")));
            }
        }
        schemas.push(plain.expect(expected_all));
        schemas.push(agree);
        let expected = plain_propext_expected(m);
        let mut prop = Schema::new("plain propositional extensionality").expect(expected);
        prop.holds(m, &seq(&two, "p <=> q", "p = q")?)?;
        schemas.push(prop);

        r.items = schemas.into_iter().map(|s| s.item).collect();
        Ok(r)
    })
}

/// Leibniz for every natural `θ: ⟦A⟧ -> H`, when there are at most 4096
/// candidates: `θ(x) ∧ iδ(x, y) <= θ(y)` at every object and pair.
fn leibniz_by_enumeration(m: &Model, a: &Type, s: &mut Schema) -> Result<(), SuiteError> {
    let pa = m.interp_type(a)?;
    let frame = m.frame();
    let log_bound: f64 = m
        .base()
        .objects()
        .map(|c| pa.size(c) as f64 * (frame.size(c) as f64).log2())
        .sum();
    if log_bound > 12.0 {
        return Ok(());
    }
    for theta in enumerate_nats(&pa, frame.carrier())? {
        let mut bad = None;
        'outer: for c in m.base().objects() {
            for x in 0..pa.size(c) {
                for y in 0..pa.size(c) {
                    let e = m.maps().i_mask(c, delta_mask(&pa, c, x, y));
                    if !frame.le(c, frame.meet(c, theta.apply(c, x), e), theta.apply(c, y)) {
                        bad = Some(format!(
                            "predicate {:?} on {a} at {}: x = {}, y = {}",
                            theta.components(),
                            m.base().object_name(c),
                            pa.element_name(c, x),
                            pa.element_name(c, y)
                        ));
                        break 'outer;
                    }
                }
            }
        }
        let ok = bad.is_none();
        s.record(ok, || bad);
    }
    Ok(())
}

type Runner = Box<dyn Fn() -> Result<CheckReport, SuiteError> + Send + Sync>;

/// One independent check of [`plan`].
pub struct CheckJob {
    pub label: String,
    run: Runner,
}

impl CheckJob {
    fn new(label: String, run: impl Fn() -> Result<CheckReport, SuiteError> + Send + Sync + 'static) -> CheckJob {
        CheckJob { label, run: Box::new(run) }
    }

    pub fn run(&self) -> Result<CheckReport, SuiteError> {
        (self.run)()
    }
}

/// Every check on the bundled constructions, in a fixed order. Jobs are
/// independent and may run concurrently.
pub fn plan(seed: u64, guard: usize) -> Vec<CheckJob> {
    let mut out = vec![CheckJob::new("fun-ext".into(), fun_ext_counterexample)];
    for n in 2..=5 {
        out.push(CheckJob::new(format!("prop-ext {n}"), move || prop_ext_counterexample(n)));
    }
    for n in 1..=3 {
        out.push(CheckJob::new(format!("constant-domain {n}"), move || constant_domain_check(n)));
    }
    for name in bundled::MODEL_NAMES {
        out.push(CheckJob::new(format!("s4 {name}"), move || s4_suite(&bundled::model(name).expect("bundled"))));
    }
    for (name, base) in bundled::bases() {
        for k in 0..bundled::frames(name, &base).len() {
            out.push(CheckJob::new(format!("initial-frame {name} {k}"), move || {
                let base = bundled::base(name).expect("bundled");
                frame_suite(&bundled::frames(name, &base)[k], name)
            }));
        }
    }
    for geometric in [false, true] {
        out.push(CheckJob::new(format!("adjoints {geometric}"), move || {
            let arrow = bundled::arrow();
            let d = arrow.object("D")?;
            let indices = vec![
                ("1".to_string(), crate::presheaf::terminal(&arrow)),
                ("G".to_string(), bundled::loop_graph(&arrow)),
                ("yD".to_string(), crate::presheaf::yoneda(&arrow, d)),
            ];
            let f = if geometric { InternalFrame::omega_star(&arrow)? } else { InternalFrame::omega(&arrow)? };
            adjoint_suite(&f, &indices)
        }));
    }
    for name in bundled::MODEL_NAMES {
        out.push(CheckJob::new(format!("soundness {name}"), move || {
            soundness_suite_seeded(&bundled::model(name).expect("bundled"), 2, guard, seed)
        }));
    }
    out
}

/// Runs [`plan`] sequentially.
pub fn all_checks(seed: u64, guard: usize) -> Result<Vec<CheckReport>, SuiteError> {
    plan(seed, guard).iter().map(CheckJob::run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prop_ext_small() {
        let r = prop_ext_counterexample(2).unwrap();
        assert!(r.passed(), "{}", r.render());
        let w = r.items.iter().find(|i| i.name.starts_with("i delta")).unwrap();
        assert_eq!(w.witness.as_deref(), Some("U = {0}, V = {1}: U => V = {1}, i delta <p1, /\\>(U, V) = {}"));
        assert!(matches!(prop_ext_counterexample(1), Err(SuiteError::SizeTooSmall(1))));
    }

    #[test]
    fn fun_ext_reproduces() {
        let r = fun_ext_counterexample().unwrap();
        assert!(r.passed(), "{}", r.render());
    }

    #[test]
    fn constant_domains_pass() {
        for n in 1..=3 {
            let r = constant_domain_check(n).unwrap();
            assert!(r.passed(), "{}", r.render());
        }
    }

    #[test]
    fn s4_on_loop_graph_and_fault_injection() {
        let m = bundled::loop_graph_model();
        assert!(s4_suite(&m).unwrap().passed());
        let d = m.base().object("D").unwrap();
        let bad_maps = m.maps().with_corrupted_tau(d, m.frame().bot(d), m.maps().omega().top(d));
        let bad = m.clone().with_maps_unchecked(bad_maps);
        let r = s4_suite(&bad).unwrap();
        let t = r.items.iter().find(|i| i.name.starts_with("elementwise T")).unwrap();
        assert!(!t.ok() && t.witness.is_some());
    }

    #[test]
    fn arrow_presheaf_classes() {
        let base = bundled::arrow();
        // classes of total size n: sum over a+b=n of partitions of b into <= a parts
        let counts: Vec<usize> = (0..=4).map(|n| arrow_presheaves(&base, n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 7, 12]);
    }

    #[test]
    fn funext_lemma_on_loop_graph() {
        let base = bundled::arrow();
        let g = bundled::loop_graph(&base);
        for f in [InternalFrame::omega(&base).unwrap(), InternalFrame::omega_star(&base).unwrap()] {
            assert_eq!(funext_lemma_defect(&f, &g, &g).unwrap(), None);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = fun_ext_counterexample().unwrap().render();
        let b = fun_ext_counterexample().unwrap().render();
        assert_eq!(a, b);
    }
}

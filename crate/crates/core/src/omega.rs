//! The subobject classifier `Ω` of sieves and its Boolean companion `Ω_*`
//! of arbitrary arrow-sets, with classifying maps and the diagonal
//! classifier `δ`.
//!
//! Arrow-sets are `u64` masks over global [`ArrowId`]s; this is why
//! categories are capped at 64 arrows.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{ArrowId, FiniteCategory, ObjId};
use crate::presheaf::{terminal, NatTransform, Presheaf, PresheafError, Product};

pub type Mask = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OmegaError {
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error("not closed under restriction: `{element}` at `{object}` restricts along `{arrow}` outside the subfamily")]
    NotClosedUnderRestriction {
        object: String,
        element: String,
        arrow: String,
    },
    #[error("map does not land in the subobject classifier")]
    NotIntoOmega,
}

pub fn bit(f: ArrowId) -> Mask {
    1u64 << f.0
}

pub fn mask_of(arrows: impl IntoIterator<Item = ArrowId>) -> Mask {
    arrows.into_iter().fold(0, |m, f| m | bit(f))
}

/// Arrows into `C` as a mask: the maximal sieve.
pub fn maximal(base: &FiniteCategory, c: ObjId) -> Mask {
    mask_of(base.arrows_into(c).iter().copied())
}

/// `{f : X -> D | g . f in s}` for `g: D -> C`.
pub fn pullback(base: &FiniteCategory, g: ArrowId, s: Mask) -> Mask {
    let d = base.dom(g);
    base.arrows_into(d)
        .iter()
        .filter(|&&f| s & bit(base.compose(g, f).expect("composable")) != 0)
        .fold(0, |m, &f| m | bit(f))
}

pub fn is_sieve(base: &FiniteCategory, s: Mask) -> bool {
    base.arrow_ids().filter(|&h| s & bit(h) != 0).all(|h| {
        base.arrows_into(base.dom(h))
            .iter()
            .all(|&f| s & bit(base.compose(h, f).expect("composable")) != 0)
    })
}

/// Sieve implication: `{f | for all h into dom f, f.h in s implies f.h in r}`.
pub fn sieve_implies(base: &FiniteCategory, c: ObjId, s: Mask, r: Mask) -> Mask {
    base.arrows_into(c)
        .iter()
        .filter(|&&f| {
            base.arrows_into(base.dom(f)).iter().all(|&h| {
                let fh = bit(base.compose(f, h).expect("composable"));
                s & fh == 0 || r & fh != 0
            })
        })
        .fold(0, |m, &f| m | bit(f))
}

/// Largest sieve contained in an arrow-set.
pub fn sieve_interior(base: &FiniteCategory, c: ObjId, s: Mask) -> Mask {
    base.arrows_into(c)
        .iter()
        .filter(|&&f| pullback(base, f, s) == maximal(base, base.dom(f)))
        .fold(0, |m, &f| m | bit(f))
}

pub fn render_mask(base: &FiniteCategory, s: Mask) -> String {
    let names: Vec<&str> = base
        .arrow_ids()
        .filter(|&f| s & bit(f) != 0)
        .map(|f| base.arrow_name(f))
        .collect();
    format!("{{{}}}", names.join(","))
}

/// Bit-string label: position `k` is `1` iff `order[k]` is in `s`.
pub fn bits_label(s: Mask, order: &[ArrowId]) -> String {
    order.iter().map(|&f| if s & bit(f) != 0 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArrowSetKind {
    /// `Ω`: sieves only.
    Sieves,
    /// `Ω_*`: every set of arrows with the given codomain.
    All,
}

/// `Ω` or `Ω_*` as a presheaf together with the mask of each element.
#[derive(Debug)]
pub struct ArrowSets {
    kind: ArrowSetKind,
    presheaf: Arc<Presheaf>,
    masks: Vec<Vec<Mask>>,
    index: Vec<HashMap<Mask, usize>>,
}

impl ArrowSets {
    fn build(base: &Arc<FiniteCategory>, kind: ArrowSetKind) -> Result<ArrowSets, OmegaError> {
        let limit = base.limits().max_elements;
        let mut masks = Vec::with_capacity(base.num_objects());
        for c in base.objects() {
            let into = base.arrows_into(c);
            // sieves are found by filtering all candidate sets
            let cap = match kind {
                ArrowSetKind::All => limit,
                ArrowSetKind::Sieves => limit.saturating_mul(64),
            };
            if into.len() >= 40 || (1usize << into.len()) > cap {
                return Err(PresheafError::SizeGuardExceeded {
                    what: format!("arrow-sets on `{}`", base.object_name(c)),
                    size: 1usize.checked_shl(into.len() as u32).unwrap_or(usize::MAX),
                    limit,
                }
                .into());
            }
            let mut v = Vec::new();
            for local in 0u64..(1u64 << into.len()) {
                let m = into
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| local & (1 << j) != 0)
                    .fold(0, |m, (_, &f)| m | bit(f));
                if kind == ArrowSetKind::All || is_sieve(base, m) {
                    v.push(m);
                }
            }
            if v.len() > limit {
                return Err(PresheafError::SizeGuardExceeded {
                    what: format!("arrow-sets on `{}`", base.object_name(c)),
                    size: v.len(),
                    limit,
                }
                .into());
            }
            masks.push(v);
        }
        let index: Vec<HashMap<Mask, usize>> = masks
            .iter()
            .map(|v| v.iter().enumerate().map(|(k, &m)| (m, k)).collect())
            .collect();
        let sets = masks
            .iter()
            .map(|v| v.iter().map(|&m| render_mask(base, m)).collect())
            .collect();
        let restrict = base
            .arrow_ids()
            .map(|g| {
                let d = base.dom(g);
                masks[base.cod(g).0]
                    .iter()
                    .map(|&s| index[d.0][&pullback(base, g, s)])
                    .collect()
            })
            .collect();
        let presheaf = Arc::new(Presheaf::new(base.clone(), sets, restrict)?);
        Ok(ArrowSets {
            kind,
            presheaf,
            masks,
            index,
        })
    }

    pub fn kind(&self) -> ArrowSetKind {
        self.kind
    }

    pub fn presheaf(&self) -> &Arc<Presheaf> {
        &self.presheaf
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        self.presheaf.base()
    }

    pub fn mask(&self, c: ObjId, x: usize) -> Mask {
        self.masks[c.0][x]
    }

    pub fn masks(&self, c: ObjId) -> &[Mask] {
        &self.masks[c.0]
    }

    pub fn index_of(&self, c: ObjId, m: Mask) -> Option<usize> {
        self.index[c.0].get(&m).copied()
    }

    /// Index of a mask known to be an element.
    pub fn at(&self, c: ObjId, m: Mask) -> usize {
        self.index[c.0][&m]
    }

    pub fn top(&self, c: ObjId) -> usize {
        self.at(c, maximal(self.base(), c))
    }

    pub fn bot(&self, c: ObjId) -> usize {
        self.at(c, 0)
    }

    pub fn meet(&self, c: ObjId, x: usize, y: usize) -> usize {
        self.at(c, self.mask(c, x) & self.mask(c, y))
    }

    pub fn join(&self, c: ObjId, x: usize, y: usize) -> usize {
        self.at(c, self.mask(c, x) | self.mask(c, y))
    }

    pub fn implies(&self, c: ObjId, x: usize, y: usize) -> usize {
        let (s, r) = (self.mask(c, x), self.mask(c, y));
        let m = match self.kind {
            ArrowSetKind::Sieves => sieve_implies(self.base(), c, s, r),
            ArrowSetKind::All => !s & maximal(self.base(), c) | r,
        };
        self.at(c, m)
    }

    pub fn render(&self, c: ObjId, x: usize) -> String {
        render_mask(self.base(), self.mask(c, x))
    }
}

/// `Ω`: sieves, restricted by pullback.
pub fn omega(base: &Arc<FiniteCategory>) -> Result<Arc<ArrowSets>, OmegaError> {
    Ok(Arc::new(ArrowSets::build(base, ArrowSetKind::Sieves)?))
}

/// `Ω_*`: all arrow-sets, restricted by pullback.
pub fn omega_star(base: &Arc<FiniteCategory>) -> Result<Arc<ArrowSets>, OmegaError> {
    Ok(Arc::new(ArrowSets::build(base, ArrowSetKind::All)?))
}

/// A per-object subfamily of a presheaf. [`Subpresheaf::new`] checks
/// closure under restriction; [`Subpresheaf::family`] does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subpresheaf {
    parent: Arc<Presheaf>,
    members: Vec<Vec<bool>>,
}

impl Subpresheaf {
    pub fn new(parent: Arc<Presheaf>, members: Vec<Vec<bool>>) -> Result<Subpresheaf, OmegaError> {
        let s = Self::family(parent, members)?;
        s.check_closed()?;
        Ok(s)
    }

    pub fn family(parent: Arc<Presheaf>, members: Vec<Vec<bool>>) -> Result<Subpresheaf, OmegaError> {
        let base = parent.base();
        if members.len() != base.num_objects() || base.objects().any(|c| members[c.0].len() != parent.size(c)) {
            return Err(PresheafError::ShapeMismatch("membership table does not match the presheaf".into()).into());
        }
        Ok(Subpresheaf { parent, members })
    }

    pub fn full(parent: &Arc<Presheaf>) -> Subpresheaf {
        let members = parent.base().objects().map(|c| vec![true; parent.size(c)]).collect();
        Subpresheaf {
            parent: parent.clone(),
            members,
        }
    }

    pub fn empty(parent: &Arc<Presheaf>) -> Subpresheaf {
        let members = parent.base().objects().map(|c| vec![false; parent.size(c)]).collect();
        Subpresheaf {
            parent: parent.clone(),
            members,
        }
    }

    /// From a predicate on elements.
    pub fn from_fn(parent: &Arc<Presheaf>, mut p: impl FnMut(ObjId, usize) -> bool) -> Subpresheaf {
        let members = parent
            .base()
            .objects()
            .map(|c| (0..parent.size(c)).map(|x| p(c, x)).collect())
            .collect();
        Subpresheaf {
            parent: parent.clone(),
            members,
        }
    }

    pub fn check_closed(&self) -> Result<(), OmegaError> {
        let base = self.parent.base();
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            for x in 0..self.parent.size(c) {
                if self.members[c.0][x] && !self.members[d.0][self.parent.restrict(f, x)] {
                    return Err(OmegaError::NotClosedUnderRestriction {
                        object: base.object_name(c).into(),
                        element: self.parent.element_name(c, x).into(),
                        arrow: base.arrow_name(f).into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.check_closed().is_ok()
    }

    pub fn parent(&self) -> &Arc<Presheaf> {
        &self.parent
    }

    pub fn contains(&self, c: ObjId, x: usize) -> bool {
        self.members[c.0][x]
    }

    pub fn members(&self) -> &[Vec<bool>] {
        &self.members
    }

    /// Pointwise inclusion.
    pub fn is_subset(&self, other: &Subpresheaf) -> bool {
        self.members
            .iter()
            .flatten()
            .zip(other.members.iter().flatten())
            .all(|(&a, &b)| !a || b)
    }
}

/// `χ_C(a) = {f : X -> C | F(f)(a) in S(X)}` as a map into `Ω`.
pub fn classify(s: &Subpresheaf, om: &ArrowSets) -> Result<NatTransform, OmegaError> {
    s.check_closed()?;
    classify_family(s, om)
}

/// The same formula for an arbitrary subfamily. The result lands in `Ω`
/// exactly when the family is closed; otherwise `om` must be `Ω_*`.
pub fn classify_family(s: &Subpresheaf, om: &ArrowSets) -> Result<NatTransform, OmegaError> {
    let f = &s.parent;
    let base = f.base();
    let mut comps = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut comp = Vec::with_capacity(f.size(c));
        for a in 0..f.size(c) {
            let m = base
                .arrows_into(c)
                .iter()
                .filter(|&&h| s.members[base.dom(h).0][f.restrict(h, a)])
                .fold(0, |m, &h| m | bit(h));
            comp.push(om.index_of(c, m).ok_or(OmegaError::NotIntoOmega)?);
        }
        comps.push(comp);
    }
    Ok(NatTransform::new(f.clone(), om.presheaf().clone(), comps)?)
}

/// `S(C) = {a | χ_C(a) is maximal}`.
pub fn subobject_of(chi: &NatTransform, om: &ArrowSets) -> Result<Subpresheaf, OmegaError> {
    if chi.target() != om.presheaf() {
        return Err(OmegaError::NotIntoOmega);
    }
    let src = chi.source().clone();
    Ok(Subpresheaf::from_fn(&src, |c, x| chi.apply(c, x) == om.top(c)))
}

/// `δ_C(x, y) = {f : D -> C | A(f)x = A(f)y}` as a mask.
pub fn delta_mask(a: &Presheaf, c: ObjId, x: usize, y: usize) -> Mask {
    let base = a.base();
    base.arrows_into(c)
        .iter()
        .filter(|&&f| a.restrict(f, x) == a.restrict(f, y))
        .fold(0, |m, &f| m | bit(f))
}

/// The diagonal classifier `A x A -> Ω`, returned with its source product.
pub fn delta(a: &Arc<Presheaf>, om: &ArrowSets) -> Result<(Product, NatTransform), OmegaError> {
    let p = Product::new(a.base(), vec![a.clone(), a.clone()])?;
    let base = a.base();
    let comps = base
        .objects()
        .map(|c| {
            (0..p.presheaf().size(c))
                .map(|z| {
                    let xy = p.split(c, z);
                    om.at(c, delta_mask(a, c, xy[0], xy[1]))
                })
                .collect()
        })
        .collect();
    let t = NatTransform::new(p.presheaf().clone(), om.presheaf().clone(), comps)?;
    Ok((p, t))
}

/// The five Heyting structure maps of `Ω` or `Ω_*`.
#[derive(Debug, Clone)]
pub struct HeytingMaps {
    pub square: Product,
    pub top: NatTransform,
    pub bot: NatTransform,
    pub meet: NatTransform,
    pub join: NatTransform,
    pub imp: NatTransform,
}

impl PartialEq for HeytingMaps {
    fn eq(&self, other: &Self) -> bool {
        self.top == other.top
            && self.bot == other.bot
            && self.meet == other.meet
            && self.join == other.join
            && self.imp == other.imp
    }
}

/// Structure maps from the direct sieve formulas (pointwise Boolean on `Ω_*`).
pub fn omega_heyting(om: &ArrowSets) -> Result<HeytingMaps, OmegaError> {
    let base = om.base();
    let h = om.presheaf();
    let one = terminal(base);
    let square = Product::new(base, vec![h.clone(), h.clone()])?;
    let point = |f: &dyn Fn(ObjId) -> usize| -> Result<NatTransform, OmegaError> {
        Ok(NatTransform::new(one.clone(), h.clone(), base.objects().map(|c| vec![f(c)]).collect())?)
    };
    let binary = |op: &dyn Fn(ObjId, usize, usize) -> usize| -> Result<NatTransform, OmegaError> {
        let comps = base
            .objects()
            .map(|c| {
                (0..square.presheaf().size(c))
                    .map(|z| {
                        let xy = square.split(c, z);
                        op(c, xy[0], xy[1])
                    })
                    .collect()
            })
            .collect();
        Ok(NatTransform::new(square.presheaf().clone(), h.clone(), comps)?)
    };
    Ok(HeytingMaps {
        top: point(&|c| om.top(c))?,
        bot: point(&|c| om.bot(c))?,
        meet: binary(&|c, x, y| om.meet(c, x, y))?,
        join: binary(&|c, x, y| om.join(c, x, y))?,
        imp: binary(&|c, x, y| om.implies(c, x, y))?,
        square,
    })
}

/// Structure maps of `Ω` obtained only from classifying maps: `⊤` and `⊥`
/// classify all of `1` and nothing; `∧` classifies `{(⊤,⊤)}`; `∨`
/// classifies the image `{(σ,⊤)} ∪ {(⊤,ρ)}`; `⇒` classifies the equalizer
/// of `∧` and the first projection.
pub fn omega_heyting_oracle(om: &ArrowSets) -> Result<HeytingMaps, OmegaError> {
    if om.kind() != ArrowSetKind::Sieves {
        return Err(OmegaError::NotIntoOmega);
    }
    let base = om.base();
    let h = om.presheaf();
    let one = terminal(base);
    let square = Product::new(base, vec![h.clone(), h.clone()])?;
    let sq = square.presheaf();
    let meet = classify(
        &Subpresheaf::from_fn(sq, |c, z| {
            let xy = square.split(c, z);
            xy[0] == om.top(c) && xy[1] == om.top(c)
        }),
        om,
    )?;
    let join = classify(
        &Subpresheaf::from_fn(sq, |c, z| {
            let xy = square.split(c, z);
            xy[0] == om.top(c) || xy[1] == om.top(c)
        }),
        om,
    )?;
    let imp = classify(
        &Subpresheaf::from_fn(sq, |c, z| meet.apply(c, z) == square.split(c, z)[0]),
        om,
    )?;
    Ok(HeytingMaps {
        top: classify(&Subpresheaf::full(&one), om)?,
        bot: classify(&Subpresheaf::empty(&one), om)?,
        meet,
        join,
        imp,
        square,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::tests::{arrow_base, loop_graph};
    use crate::presheaf::{enumerate_nats, identity_nat, pair};

    fn labels(om: &ArrowSets, d: ObjId, order: &[ArrowId]) -> Vec<String> {
        om.masks(d).iter().map(|&m| bits_label(m, order)).collect()
    }

    #[test]
    fn omega_on_arrow_category() {
        let base = arrow_base();
        let (c, d) = (base.object("C").unwrap(), base.object("D").unwrap());
        let g = base.arrow_by_name("g").unwrap();
        let order = [g, base.identity(d)];
        let om = omega(&base).unwrap();
        let mut l = labels(&om, d, &order);
        l.sort();
        assert_eq!(l, ["00", "10", "11"]);
        assert_eq!(om.presheaf().elements(c), ["{}", "{1_C}"]);
        let os = omega_star(&base).unwrap();
        assert_eq!(os.presheaf().size(d), 4);
        let one_d = os.at(d, bit(base.identity(d)));
        assert_eq!(os.render(c, os.presheaf().restrict(g, one_d)), "{}");
        for &m in os.masks(d) {
            if m & bit(g) != 0 {
                assert_eq!(os.render(c, os.presheaf().restrict(g, os.at(d, m))), "{1_C}");
            }
        }
        let t = std::sync::Arc::new(FiniteCategory::terminal());
        assert_eq!(omega(&t).unwrap().presheaf().size(ObjId(0)), 2);
    }

    #[test]
    fn three_into_four_implication() {
        let base = arrow_base();
        let d = base.object("D").unwrap();
        let g = base.arrow_by_name("g").unwrap();
        let order = [g, base.identity(d)];
        let om = omega(&base).unwrap();
        let os = omega_star(&base).unwrap();
        let r3 = om.implies(d, om.at(d, bit(g)), om.bot(d));
        assert_eq!(bits_label(om.mask(d, r3), &order), "00");
        let r4 = os.implies(d, os.at(d, bit(g)), os.bot(d));
        assert_eq!(bits_label(os.mask(d, r4), &order), "01");
    }

    #[test]
    fn heyting_formulas_match_classify_recipe() {
        for base in [arrow_base(), std::sync::Arc::new(FiniteCategory::terminal())] {
            let om = omega(&base).unwrap();
            assert_eq!(omega_heyting(&om).unwrap(), omega_heyting_oracle(&om).unwrap());
        }
    }

    #[test]
    fn classify_examples() {
        let g = loop_graph();
        let base = g.base().clone();
        let om = omega(&base).unwrap();
        let (c, d) = (base.object("C").unwrap(), base.object("D").unwrap());
        let full = classify(&Subpresheaf::full(&g), &om).unwrap();
        assert!(base.objects().all(|o| full.component(o).iter().all(|&x| x == om.top(o))));
        let empty = classify(&Subpresheaf::empty(&g), &om).unwrap();
        assert!(base.objects().all(|o| empty.component(o).iter().all(|&x| x == om.bot(o))));
        let v = g.element_index(c, "v").unwrap();
        let s = Subpresheaf::from_fn(&g, |o, x| o == c && x == v);
        let chi = classify(&s, &om).unwrap();
        assert_eq!(om.render(d, chi.apply(d, 0)), "{g}");
        assert_eq!(subobject_of(&chi, &om).unwrap(), s);
    }

    #[test]
    fn classify_rejects_open_family() {
        let g = loop_graph();
        let d = g.base().object("D").unwrap();
        let s = Subpresheaf::from_fn(&g, |o, _| o == d);
        let om = omega(g.base()).unwrap();
        assert!(matches!(classify(&s, &om), Err(OmegaError::NotClosedUnderRestriction { .. })));
    }

    #[test]
    fn delta_examples() {
        let g = loop_graph();
        let base = g.base().clone();
        let om = omega(&base).unwrap();
        let c = base.object("C").unwrap();
        let (p, dl) = delta(&g, &om).unwrap();
        assert_eq!(dl.apply(c, p.tuple(c, &[0, 0])), om.top(c));
        assert_eq!(dl.apply(c, p.tuple(c, &[0, 1])), om.bot(c));
        let id = identity_nat(&g);
        let (_, diag) = pair(&id, &id).unwrap();
        let s = subobject_of(&dl, &om).unwrap();
        let image = Subpresheaf::from_fn(p.presheaf(), |o, z| (0..g.size(o)).any(|x| diag.apply(o, x) == z));
        assert_eq!(s, image);
    }

    #[test]
    fn classify_is_a_bijection_on_loop_graph() {
        let g = loop_graph();
        let om = omega(g.base()).unwrap();
        let maps = enumerate_nats(&g, om.presheaf()).unwrap();
        let mut subs = Vec::new();
        for m in &maps {
            let s = subobject_of(m, &om).unwrap();
            assert!(s.is_closed());
            assert_eq!(&classify(&s, &om).unwrap(), m);
            subs.push(s);
        }
        // every closed subfamily arises
        let total = g.total_size();
        let elems: Vec<(ObjId, usize)> = g.base().objects().flat_map(|c| (0..g.size(c)).map(move |x| (c, x))).collect();
        let mut closed = 0;
        for bits in 0u32..(1 << total) {
            let s = Subpresheaf::from_fn(&g, |c, x| {
                let k = elems.iter().position(|&e| e == (c, x)).unwrap();
                bits & (1 << k) != 0
            });
            if s.is_closed() {
                closed += 1;
                assert!(subs.contains(&s));
            }
        }
        assert_eq!(closed, maps.len());
    }
}

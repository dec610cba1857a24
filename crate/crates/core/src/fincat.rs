//! Finite categories given as explicit data.
//!
//! Objects and arrows carry string identifiers. After validation both are
//! stored sorted by identifier, and every set-valued query returns its
//! result in that order, so everything built on top enumerates
//! deterministically.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

/// Default cap on the number of arrows of a validated category.
pub const DEFAULT_MAX_ARROWS: usize = 64;

/// Default cap on the size of any enumerated set (exponential fibres,
/// hom-set enumerations).
pub const DEFAULT_MAX_ELEMENTS: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// Size guards applied to everything built over a category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_arrows: usize,
    pub max_elements: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_arrows: DEFAULT_MAX_ARROWS,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("object `{0}` is declared twice")]
    DuplicateObject(String),
    #[error("arrow `{0}` is declared twice")]
    DuplicateArrow(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("missing identity on `{object}`: {reason}")]
    MissingIdentity { object: String, reason: String },
    #[error("composite {outer} . {inner} is not defined")]
    UndefinedComposite { outer: String, inner: String },
    #[error("domain/codomain mismatch in {outer} . {inner}: {reason}")]
    DomCodMismatch {
        outer: String,
        inner: String,
        reason: String,
    },
    #[error("conflicting entries for {outer} . {inner}: `{first}` vs `{second}`")]
    ConflictingComposite {
        outer: String,
        inner: String,
        first: String,
        second: String,
    },
    #[error("composition is not associative: ({h} . {g}) . {f} != {h} . ({g} . {f})")]
    NonAssociative { h: String, g: String, f: String },
    #[error("relation is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("relation is not transitive: {0} <= {1} and {1} <= {2} but not {0} <= {2}")]
    NotTransitive(String, String, String),
    #[error("size guard exceeded: {what} ({size} > {limit})")]
    SizeGuardExceeded {
        what: String,
        size: usize,
        limit: usize,
    },
}

/// Raw, unvalidated description of a category.
///
/// Identities are implicit: every object `X` gets an identity named `1_X`
/// unless `identities` names a different (declared) endo-arrow. Only
/// composites of two non-identity arrows need to be listed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategorySpec {
    pub objects: Vec<String>,
    pub arrows: Vec<(String, String, String)>,
    pub identities: BTreeMap<String, String>,
    /// Entries `(outer, inner, result)` meaning `outer . inner = result`.
    pub composites: Vec<(String, String, String)>,
}

#[derive(Debug, Clone)]
pub struct FiniteCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<ArrowId>,
    // compose[outer * n + inner]
    compose: Vec<Option<ArrowId>>,
    into: Vec<Vec<ArrowId>>,
    limits: Limits,
}

impl PartialEq for FiniteCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.arrows == other.arrows
            && self.identities == other.identities
            && self.compose == other.compose
    }
}

impl Eq for FiniteCategory {}

impl Hash for FiniteCategory {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.objects.hash(state);
        self.arrows.hash(state);
        self.compose.hash(state);
    }
}

pub fn identity_name(object: &str) -> String {
    format!("1_{object}")
}

impl FiniteCategory {
    pub fn validate(spec: &CategorySpec) -> Result<FiniteCategory, CategoryError> {
        Self::validate_with(spec, Limits::default())
    }

    pub fn validate_with(spec: &CategorySpec, limits: Limits) -> Result<FiniteCategory, CategoryError> {
        let mut objects: Vec<String> = spec.objects.clone();
        objects.sort();
        for w in objects.windows(2) {
            if w[0] == w[1] {
                return Err(CategoryError::DuplicateObject(w[0].clone()));
            }
        }
        let obj_of = |name: &str| -> Result<ObjId, CategoryError> {
            objects
                .binary_search_by(|o| o.as_str().cmp(name))
                .map(ObjId)
                .map_err(|_| CategoryError::UnknownObject(name.to_string()))
        };

        let mut raw: BTreeMap<String, (ObjId, ObjId)> = BTreeMap::new();
        for (name, dom, cod) in &spec.arrows {
            let d = obj_of(dom)?;
            let c = obj_of(cod)?;
            if raw.insert(name.clone(), (d, c)).is_some() {
                return Err(CategoryError::DuplicateArrow(name.clone()));
            }
        }
        for (object, id) in &spec.identities {
            obj_of(object)?;
            if !raw.contains_key(id) {
                return Err(CategoryError::MissingIdentity {
                    object: object.clone(),
                    reason: format!("declared identity `{id}` is not an arrow"),
                });
            }
        }
        let mut id_names = Vec::with_capacity(objects.len());
        for (k, object) in objects.iter().enumerate() {
            let name = spec
                .identities
                .get(object)
                .cloned()
                .unwrap_or_else(|| identity_name(object));
            match raw.get(&name) {
                Some(&(d, c)) if d.0 != k || c.0 != k => {
                    return Err(CategoryError::MissingIdentity {
                        object: object.clone(),
                        reason: format!("`{name}` is not an endo-arrow on `{object}`"),
                    })
                }
                Some(_) => {}
                None => {
                    raw.insert(name.clone(), (ObjId(k), ObjId(k)));
                }
            }
            id_names.push(name);
        }
        if raw.len() > limits.max_arrows {
            return Err(CategoryError::SizeGuardExceeded {
                what: "arrows".into(),
                size: raw.len(),
                limit: limits.max_arrows,
            });
        }

        let arrows: Vec<Arrow> = raw
            .into_iter()
            .map(|(name, (dom, cod))| Arrow { name, dom, cod })
            .collect();
        let arrow_of = |name: &str| -> Result<ArrowId, CategoryError> {
            arrows
                .binary_search_by(|a| a.name.as_str().cmp(name))
                .map(ArrowId)
                .map_err(|_| CategoryError::UnknownArrow(name.to_string()))
        };
        let identities: Vec<ArrowId> = id_names
            .iter()
            .map(|n| arrow_of(n))
            .collect::<Result<_, _>>()?;
        let is_identity = |a: ArrowId| identities[arrows[a.0].dom.0] == a;

        let n = arrows.len();
        let mut compose: Vec<Option<ArrowId>> = vec![None; n * n];
        for (outer, inner, result) in &spec.composites {
            let g = arrow_of(outer)?;
            let f = arrow_of(inner)?;
            let h = arrow_of(result)?;
            let (ga, fa, ha) = (&arrows[g.0], &arrows[f.0], &arrows[h.0]);
            if fa.cod != ga.dom {
                return Err(CategoryError::DomCodMismatch {
                    outer: outer.clone(),
                    inner: inner.clone(),
                    reason: format!(
                        "cod({inner}) = {} but dom({outer}) = {}",
                        objects[fa.cod.0], objects[ga.dom.0]
                    ),
                });
            }
            if ha.dom != fa.dom || ha.cod != ga.cod {
                return Err(CategoryError::DomCodMismatch {
                    outer: outer.clone(),
                    inner: inner.clone(),
                    reason: format!(
                        "result `{result}` : {} -> {} should be {} -> {}",
                        objects[ha.dom.0], objects[ha.cod.0], objects[fa.dom.0], objects[ga.cod.0]
                    ),
                });
            }
            let slot = &mut compose[g.0 * n + f.0];
            match slot {
                Some(prev) if *prev != h => {
                    return Err(CategoryError::ConflictingComposite {
                        outer: outer.clone(),
                        inner: inner.clone(),
                        first: arrows[prev.0].name.clone(),
                        second: result.clone(),
                    })
                }
                _ => *slot = Some(h),
            }
        }
        // identity laws are forced
        for f in 0..n {
            let fa = &arrows[f];
            for (forced_slot, forced) in [
                (identities[fa.cod.0].0 * n + f, ArrowId(f)),
                (f * n + identities[fa.dom.0].0, ArrowId(f)),
            ] {
                match compose[forced_slot] {
                    Some(prev) if prev != forced => {
                        let (g, h) = (forced_slot / n, forced_slot % n);
                        return Err(CategoryError::ConflictingComposite {
                            outer: arrows[g].name.clone(),
                            inner: arrows[h].name.clone(),
                            first: arrows[prev.0].name.clone(),
                            second: arrows[f].name.clone(),
                        });
                    }
                    _ => compose[forced_slot] = Some(forced),
                }
            }
        }
        for g in 0..n {
            for f in 0..n {
                let composable = arrows[f].cod == arrows[g].dom;
                if composable && compose[g * n + f].is_none() {
                    debug_assert!(!is_identity(ArrowId(g)) && !is_identity(ArrowId(f)));
                    return Err(CategoryError::UndefinedComposite {
                        outer: arrows[g].name.clone(),
                        inner: arrows[f].name.clone(),
                    });
                }
            }
        }
        let mut into = vec![Vec::new(); objects.len()];
        for (k, a) in arrows.iter().enumerate() {
            into[a.cod.0].push(ArrowId(k));
        }
        let cat = FiniteCategory {
            objects,
            arrows,
            identities,
            compose,
            into,
            limits,
        };
        cat.check_associative()?;
        Ok(cat)
    }

    fn check_associative(&self) -> Result<(), CategoryError> {
        for f in self.arrow_ids() {
            for g in self.arrows_out_of(self.cod(f)) {
                let gf = self.compose(g, f).expect("composable");
                for h in self.arrows_out_of(self.cod(g)) {
                    let hg = self.compose(h, g).expect("composable");
                    if self.compose(hg, f) != self.compose(h, gf) {
                        return Err(CategoryError::NonAssociative {
                            h: self.arrow_name(h).into(),
                            g: self.arrow_name(g).into(),
                            f: self.arrow_name(f).into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The category with one object `*` and only its identity.
    pub fn terminal() -> FiniteCategory {
        Self::validate(&CategorySpec {
            objects: vec!["*".into()],
            ..Default::default()
        })
        .expect("terminal category")
    }

    /// Category with at most one arrow per ordered pair, read off a
    /// reflexive transitive relation. A pair `(a, b)` gives an arrow
    /// `a -> b` named `a<=b`; with `reverse` it gives `b -> a` instead,
    /// which turns a covariant Kripke frame into the presheaf convention.
    pub fn from_preorder(
        elements: &[String],
        relation: &[(String, String)],
        reverse: bool,
    ) -> Result<FiniteCategory, CategoryError> {
        Self::from_preorder_with(elements, relation, reverse, Limits::default())
    }

    pub fn from_preorder_with(
        elements: &[String],
        relation: &[(String, String)],
        reverse: bool,
        limits: Limits,
    ) -> Result<FiniteCategory, CategoryError> {
        let rel: BTreeSet<(&str, &str)> = relation
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        for (a, b) in &rel {
            for x in [a, b] {
                if !elements.iter().any(|e| e == x) {
                    return Err(CategoryError::UnknownObject(x.to_string()));
                }
            }
        }
        for e in elements {
            if !rel.contains(&(e.as_str(), e.as_str())) {
                return Err(CategoryError::NotReflexive(e.clone()));
            }
        }
        for &(a, b) in &rel {
            for &(b2, c) in &rel {
                if b == b2 && !rel.contains(&(a, c)) {
                    return Err(CategoryError::NotTransitive(a.into(), b.into(), c.into()));
                }
            }
        }
        let name = |a: &str, b: &str| {
            if a == b {
                identity_name(a)
            } else {
                format!("{a}<={b}")
            }
        };
        let orient = |a: &str, b: &str| -> (String, String) {
            if reverse {
                (b.to_string(), a.to_string())
            } else {
                (a.to_string(), b.to_string())
            }
        };
        let mut spec = CategorySpec {
            objects: elements.to_vec(),
            ..Default::default()
        };
        for &(a, b) in &rel {
            if a != b {
                let (d, c) = orient(a, b);
                spec.arrows.push((name(a, b), d, c));
            }
        }
        for &(a, b) in &rel {
            for &(b2, c) in &rel {
                if b != b2 || a == b || b == c {
                    continue;
                }
                // arrows a<=b and b<=c compose to a<=c (or an identity)
                let (first, second) = if reverse {
                    (name(b, c), name(a, b))
                } else {
                    (name(a, b), name(b, c))
                };
                spec.composites.push((second, first, name(a, c)));
            }
        }
        Self::validate_with(&spec, limits)
    }

    /// The underlying relation of a thin category: pairs `(dom, cod)` of
    /// every arrow.
    pub fn underlying_relation(&self) -> Vec<(String, String)> {
        self.arrows
            .iter()
            .map(|a| (self.objects[a.dom.0].clone(), self.objects[a.cod.0].clone()))
            .collect()
    }

    pub fn is_thin(&self) -> bool {
        self.objects().all(|d| self.objects().all(|c| self.hom(d, c).len() <= 1))
    }

    pub fn with_limits(mut self, limits: Limits) -> FiniteCategory {
        self.limits = limits;
        self
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    /// Back to a raw description, listing only non-identity composites.
    pub fn to_spec(&self) -> CategorySpec {
        let mut spec = CategorySpec {
            objects: self.objects.clone(),
            ..Default::default()
        };
        for (k, object) in self.objects.iter().enumerate() {
            let id = self.arrow_name(self.identities[k]);
            if id != identity_name(object) {
                spec.identities.insert(object.clone(), id.to_string());
            }
        }
        for a in self.arrow_ids() {
            if !self.is_identity(a) {
                let arrow = &self.arrows[a.0];
                spec.arrows.push((
                    arrow.name.clone(),
                    self.objects[arrow.dom.0].clone(),
                    self.objects[arrow.cod.0].clone(),
                ));
            }
        }
        for g in self.arrow_ids() {
            for f in self.arrow_ids() {
                if self.is_identity(g) || self.is_identity(f) {
                    continue;
                }
                if let Some(h) = self.compose(g, f) {
                    spec.composites.push((
                        self.arrow_name(g).into(),
                        self.arrow_name(f).into(),
                        self.arrow_name(h).into(),
                    ));
                }
            }
        }
        spec
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + Clone {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + Clone {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn object_name(&self, c: ObjId) -> &str {
        &self.objects[c.0]
    }

    pub fn arrow_name(&self, f: ArrowId) -> &str {
        &self.arrows[f.0].name
    }

    pub fn arrow(&self, f: ArrowId) -> &Arrow {
        &self.arrows[f.0]
    }

    pub fn object(&self, name: &str) -> Result<ObjId, CategoryError> {
        self.objects
            .binary_search_by(|o| o.as_str().cmp(name))
            .map(ObjId)
            .map_err(|_| CategoryError::UnknownObject(name.to_string()))
    }

    pub fn arrow_by_name(&self, name: &str) -> Result<ArrowId, CategoryError> {
        self.arrows
            .binary_search_by(|a| a.name.as_str().cmp(name))
            .map(ArrowId)
            .map_err(|_| CategoryError::UnknownArrow(name.to_string()))
    }

    pub fn dom(&self, f: ArrowId) -> ObjId {
        self.arrows[f.0].dom
    }

    pub fn cod(&self, f: ArrowId) -> ObjId {
        self.arrows[f.0].cod
    }

    pub fn identity(&self, c: ObjId) -> ArrowId {
        self.identities[c.0]
    }

    pub fn is_identity(&self, f: ArrowId) -> bool {
        self.identities[self.dom(f).0] == f
    }

    /// `outer . inner`, defined exactly when `cod(inner) = dom(outer)`.
    pub fn compose(&self, outer: ArrowId, inner: ArrowId) -> Option<ArrowId> {
        self.compose[outer.0 * self.arrows.len() + inner.0]
    }

    /// Arrows with codomain `c`, in identifier order.
    pub fn arrows_into(&self, c: ObjId) -> &[ArrowId] {
        &self.into[c.0]
    }

    /// Checked variant of [`arrows_into`](Self::arrows_into) taking a name.
    pub fn arrows_into_named(&self, c: &str) -> Result<Vec<&str>, CategoryError> {
        let c = self.object(c)?;
        Ok(self.arrows_into(c).iter().map(|&f| self.arrow_name(f)).collect())
    }

    pub fn arrows_out_of(&self, d: ObjId) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrow_ids().filter(move |&f| self.dom(f) == d)
    }

    /// Arrows `d -> c`.
    pub fn hom(&self, d: ObjId, c: ObjId) -> Vec<ArrowId> {
        self.into[c.0]
            .iter()
            .copied()
            .filter(|&f| self.dom(f) == d)
            .collect()
    }

    /// Position of `f` in `hom(dom f, cod f)`.
    pub fn hom_position(&self, f: ArrowId) -> usize {
        let (d, c) = (self.dom(f), self.cod(f));
        self.into[c.0]
            .iter()
            .filter(|&&g| self.dom(g) == d)
            .position(|&g| g == f)
            .expect("arrow in its own hom-set")
    }

    pub fn is_discrete(&self) -> bool {
        self.arrow_ids().all(|f| self.is_identity(f))
    }
}

impl fmt::Display for FiniteCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "category {{{}}}", self.objects.join(", "))?;
        for a in self.arrow_ids() {
            if !self.is_identity(a) {
                let arrow = self.arrow(a);
                write!(
                    f,
                    " {}: {} -> {};",
                    arrow.name,
                    self.object_name(arrow.dom),
                    self.object_name(arrow.cod)
                )?;
            }
        }
        Ok(())
    }
}

/// A category whose only arrows are identities: the underlying set `|C|`
/// of a category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteCategory(FiniteCategory);

impl DiscreteCategory {
    pub fn category(&self) -> &FiniteCategory {
        &self.0
    }

    pub fn into_category(self) -> FiniteCategory {
        self.0
    }
}

/// Same objects, identities only. Identity names are kept.
pub fn discrete_of(cat: &FiniteCategory) -> DiscreteCategory {
    let mut spec = CategorySpec {
        objects: cat.objects.clone(),
        ..Default::default()
    };
    for c in cat.objects() {
        let id = cat.arrow_name(cat.identity(c));
        spec.arrows
            .push((id.to_string(), cat.object_name(c).into(), cat.object_name(c).into()));
        spec.identities
            .insert(cat.object_name(c).into(), id.to_string());
    }
    DiscreteCategory(
        FiniteCategory::validate_with(&spec, cat.limits).expect("discrete category is valid"),
    )
}

//! Finite presheaves, natural transformations and the cartesian closed
//! structure built from them.
//!
//! Elements of `F(C)` are indices `0..F.size(C)` with a display name each.
//! A restriction table `restrict[f]` for `f: D -> C` maps `F(C)` to `F(D)`.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, RwLock};

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::fincat::{ArrowId, CategoryError, FiniteCategory, ObjId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("element `{element}` is listed twice at `{object}`")]
    DuplicateElement { object: String, element: String },
    #[error("unknown element `{element}` at `{object}`")]
    UnknownElement { object: String, element: String },
    #[error("missing restriction table for arrow `{0}`")]
    MissingRestriction(String),
    #[error("restriction along `{arrow}` is malformed: {reason}")]
    BadRestriction { arrow: String, reason: String },
    #[error("not functorial: F({outer} . {inner}) != F({inner}) . F({outer}) at element `{element}`")]
    NotFunctorial {
        outer: String,
        inner: String,
        element: String,
    },
    #[error("presheaves live over different base categories")]
    BaseMismatch,
    #[error("transformations do not share a source")]
    SourceMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("naturality fails along `{arrow}` at element `{element}`")]
    NotNatural { arrow: String, element: String },
    #[error("size guard exceeded: {what} ({size} > {limit})")]
    SizeGuardExceeded {
        what: String,
        size: usize,
        limit: usize,
    },
}

fn guard(what: impl FnOnce() -> String, size: usize, limit: usize) -> Result<(), PresheafError> {
    if size > limit {
        Err(PresheafError::SizeGuardExceeded {
            what: what(),
            size,
            limit,
        })
    } else {
        Ok(())
    }
}

/// An element of a presheaf at an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub object: ObjId,
    pub index: usize,
}

#[derive(Clone)]
pub struct Presheaf {
    base: Arc<FiniteCategory>,
    names: Names,
    sizes: Vec<usize>,
    restrict: Vec<Vec<usize>>,
    fingerprint: u64,
}

/// Element names, stored or derived from the factors of a product in
/// mixed-radix row-major order.
#[derive(Clone)]
enum Names {
    Listed(Vec<Vec<String>>),
    Tuples(Vec<Arc<Presheaf>>),
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Presheaf")
            .field("sizes", &self.sizes)
            .field("restrict", &self.restrict)
            .finish()
    }
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint
            && self.sizes == other.sizes
            && self.restrict == other.restrict
            && self.base == other.base
            && self.same_names(other)
    }
}

impl Eq for Presheaf {}

impl Hash for Presheaf {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fingerprint.hash(state);
    }
}

impl Presheaf {
    /// Builds and validates a presheaf from index tables.
    pub fn new(
        base: Arc<FiniteCategory>,
        sets: Vec<Vec<String>>,
        restrict: Vec<Vec<usize>>,
    ) -> Result<Presheaf, PresheafError> {
        let p = Self::new_unchecked(base, sets, restrict)?;
        p.check_functorial()?;
        Ok(p)
    }

    /// Skips the functoriality check. Table shapes are still checked.
    pub(crate) fn new_unchecked(
        base: Arc<FiniteCategory>,
        sets: Vec<Vec<String>>,
        restrict: Vec<Vec<usize>>,
    ) -> Result<Presheaf, PresheafError> {
        if sets.len() != base.num_objects() {
            return Err(PresheafError::ShapeMismatch(format!(
                "{} element lists for {} objects",
                sets.len(),
                base.num_objects()
            )));
        }
        if restrict.len() != base.num_arrows() {
            return Err(PresheafError::ShapeMismatch(format!(
                "{} restriction tables for {} arrows",
                restrict.len(),
                base.num_arrows()
            )));
        }
        let limit = base.limits().max_elements;
        for c in base.objects() {
            guard(|| format!("elements at `{}`", base.object_name(c)), sets[c.0].len(), limit)?;
        }
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            let table = &restrict[f.0];
            if table.len() != sets[c.0].len() {
                return Err(PresheafError::BadRestriction {
                    arrow: base.arrow_name(f).into(),
                    reason: format!("table has {} entries, expected {}", table.len(), sets[c.0].len()),
                });
            }
            if let Some(&bad) = table.iter().find(|&&y| y >= sets[d.0].len()) {
                return Err(PresheafError::BadRestriction {
                    arrow: base.arrow_name(f).into(),
                    reason: format!("value {bad} out of range"),
                });
            }
        }
        let sizes = sets.iter().map(Vec::len).collect();
        Ok(Self::assemble(base, Names::Listed(sets), sizes, restrict))
    }

    fn assemble(base: Arc<FiniteCategory>, names: Names, sizes: Vec<usize>, restrict: Vec<Vec<usize>>) -> Presheaf {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        base.hash(&mut h);
        match &names {
            Names::Listed(sets) => sets.hash(&mut h),
            Names::Tuples(fs) => fs.iter().for_each(|f| f.fingerprint.hash(&mut h)),
        }
        restrict.hash(&mut h);
        Presheaf { fingerprint: h.finish(), base, names, sizes, restrict }
    }

    fn same_names(&self, other: &Presheaf) -> bool {
        match (&self.names, &other.names) {
            (Names::Listed(a), Names::Listed(b)) => a == b,
            _ => self.base.objects().all(|c| (0..self.size(c)).all(|x| self.element_name(c, x) == other.element_name(c, x))),
        }
    }

    fn check_functorial(&self) -> Result<(), PresheafError> {
        let b = &self.base;
        for c in b.objects() {
            let id = b.identity(c);
            if let Some(x) = (0..self.size(c)).find(|&x| self.restrict[id.0][x] != x) {
                return Err(PresheafError::NotFunctorial {
                    outer: b.arrow_name(id).into(),
                    inner: b.arrow_name(id).into(),
                    element: self.element_name(c, x).into_owned(),
                });
            }
        }
        for f in b.arrow_ids() {
            for g in b.arrows_out_of(b.cod(f)) {
                let gf = b.compose(g, f).expect("composable");
                for x in 0..self.size(b.cod(g)) {
                    if self.restrict[gf.0][x] != self.restrict[f.0][self.restrict[g.0][x]] {
                        return Err(PresheafError::NotFunctorial {
                            outer: b.arrow_name(g).into(),
                            inner: b.arrow_name(f).into(),
                            element: self.element_name(b.cod(g), x).into_owned(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds a presheaf from named data. Elements are sorted by name.
    /// Identity restrictions are implicit; the restriction along a composite
    /// may be omitted when it factors through given ones.
    pub fn from_named(
        base: Arc<FiniteCategory>,
        sets: &BTreeMap<String, Vec<String>>,
        restrictions: &BTreeMap<String, BTreeMap<String, String>>,
    ) -> Result<Presheaf, PresheafError> {
        for name in sets.keys() {
            base.object(name)?;
        }
        let mut elems: Vec<Vec<String>> = Vec::with_capacity(base.num_objects());
        for c in base.objects() {
            let mut v = sets.get(base.object_name(c)).cloned().unwrap_or_default();
            v.sort();
            for w in v.windows(2) {
                if w[0] == w[1] {
                    return Err(PresheafError::DuplicateElement {
                        object: base.object_name(c).into(),
                        element: w[0].clone(),
                    });
                }
            }
            elems.push(v);
        }
        let index_of = |c: ObjId, name: &str| -> Result<usize, PresheafError> {
            elems[c.0]
                .binary_search_by(|e| e.as_str().cmp(name))
                .map_err(|_| PresheafError::UnknownElement {
                    object: base.object_name(c).into(),
                    element: name.into(),
                })
        };
        let mut restrict: Vec<Option<Vec<usize>>> = vec![None; base.num_arrows()];
        for (arrow, table) in restrictions {
            let f = base.arrow_by_name(arrow)?;
            let (d, c) = (base.dom(f), base.cod(f));
            let mut t = vec![usize::MAX; elems[c.0].len()];
            for (x, y) in table {
                let xi = index_of(c, x)?;
                t[xi] = index_of(d, y)?;
            }
            if let Some(k) = t.iter().position(|&y| y == usize::MAX) {
                return Err(PresheafError::BadRestriction {
                    arrow: arrow.clone(),
                    reason: format!("no image for `{}`", elems[c.0][k]),
                });
            }
            restrict[f.0] = Some(t);
        }
        for c in base.objects() {
            let id = base.identity(c);
            if restrict[id.0].is_none() {
                restrict[id.0] = Some((0..elems[c.0].len()).collect());
            }
        }
        // fill composites F(g . f) = F(f) . F(g) until nothing changes
        loop {
            let mut changed = false;
            for f in base.arrow_ids() {
                for g in base.arrows_out_of(base.cod(f)) {
                    let gf = base.compose(g, f).expect("composable");
                    if restrict[gf.0].is_some() {
                        continue;
                    }
                    if let (Some(tf), Some(tg)) = (&restrict[f.0], &restrict[g.0]) {
                        let t = tg.iter().map(|&y| tf[y]).collect();
                        restrict[gf.0] = Some(t);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let restrict = restrict
            .into_iter()
            .enumerate()
            .map(|(k, t)| t.ok_or_else(|| PresheafError::MissingRestriction(base.arrow_name(ArrowId(k)).into())))
            .collect::<Result<Vec<_>, _>>()?;
        Presheaf::new(base, elems, restrict)
    }

    /// Every object gets the same set; every restriction is the identity.
    pub fn constant(base: Arc<FiniteCategory>, elements: &[String]) -> Result<Presheaf, PresheafError> {
        let sets = vec![elements.to_vec(); base.num_objects()];
        let restrict = vec![(0..elements.len()).collect(); base.num_arrows()];
        Presheaf::new(base, sets, restrict)
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn size(&self, c: ObjId) -> usize {
        self.sizes[c.0]
    }

    pub fn total_size(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn elements(&self, c: ObjId) -> Vec<Cow<'_, str>> {
        (0..self.size(c)).map(|x| self.element_name(c, x)).collect()
    }

    pub fn element_name(&self, c: ObjId, x: usize) -> Cow<'_, str> {
        match &self.names {
            Names::Listed(sets) => Cow::Borrowed(&sets[c.0][x]),
            Names::Tuples(fs) if fs.is_empty() => Cow::Borrowed("*"),
            Names::Tuples(fs) => {
                let mut parts = vec![Cow::Borrowed(""); fs.len()];
                let mut rest = x;
                for k in (0..fs.len()).rev() {
                    let r = fs[k].size(c);
                    parts[k] = fs[k].element_name(c, rest % r);
                    rest /= r;
                }
                Cow::Owned(format!("({})", parts.join(",")))
            }
        }
    }

    pub fn element_index(&self, c: ObjId, name: &str) -> Result<usize, PresheafError> {
        (0..self.size(c))
            .position(|x| self.element_name(c, x) == name)
            .ok_or_else(|| PresheafError::UnknownElement {
                object: self.base.object_name(c).into(),
                element: name.into(),
            })
    }

    /// `F(f)(x)` for `f: D -> C`, `x` in `F(C)`.
    pub fn restrict(&self, f: ArrowId, x: usize) -> usize {
        self.restrict[f.0][x]
    }

    pub fn restriction_table(&self, f: ArrowId) -> &[usize] {
        &self.restrict[f.0]
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.iter().all(|&n| n == 0)
    }

    fn same_base(&self, other: &Presheaf) -> Result<(), PresheafError> {
        if Arc::ptr_eq(&self.base, &other.base) || self.base == other.base {
            Ok(())
        } else {
            Err(PresheafError::BaseMismatch)
        }
    }
}

/// The terminal presheaf: a singleton `*` at every object.
pub fn terminal(base: &Arc<FiniteCategory>) -> Arc<Presheaf> {
    Arc::new(
        Presheaf::new(
            base.clone(),
            vec![vec!["*".to_string()]; base.num_objects()],
            vec![vec![0]; base.num_arrows()],
        )
        .expect("terminal presheaf"),
    )
}

/// The empty presheaf.
pub fn initial(base: &Arc<FiniteCategory>) -> Arc<Presheaf> {
    Arc::new(
        Presheaf::new(base.clone(), vec![Vec::new(); base.num_objects()], vec![Vec::new(); base.num_arrows()])
            .expect("initial presheaf"),
    )
}

/// `yC = Hom(-, C)`, restricted by precomposition. Elements are named by
/// their arrows.
pub fn yoneda(base: &Arc<FiniteCategory>, c: ObjId) -> Arc<Presheaf> {
    let homs: Vec<Vec<ArrowId>> = base.objects().map(|d| base.hom(d, c)).collect();
    let sets = homs
        .iter()
        .map(|h| h.iter().map(|&f| base.arrow_name(f).to_string()).collect())
        .collect();
    let restrict = base
        .arrow_ids()
        .map(|g| {
            homs[base.cod(g).0]
                .iter()
                .map(|&h| base.hom_position(base.compose(h, g).expect("composable")))
                .collect()
        })
        .collect();
    Arc::new(Presheaf::new(base.clone(), sets, restrict).expect("representable presheaf"))
}

pub fn yoneda_named(base: &Arc<FiniteCategory>, c: &str) -> Result<Arc<Presheaf>, PresheafError> {
    Ok(yoneda(base, base.object(c)?))
}

#[derive(Clone, PartialEq, Eq)]
pub struct NatTransform {
    source: Arc<Presheaf>,
    target: Arc<Presheaf>,
    components: Vec<Vec<usize>>,
}

impl fmt::Debug for NatTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NatTransform")
            .field("components", &self.components)
            .finish()
    }
}

impl NatTransform {
    pub fn new(
        source: Arc<Presheaf>,
        target: Arc<Presheaf>,
        components: Vec<Vec<usize>>,
    ) -> Result<NatTransform, PresheafError> {
        let t = Self::new_unchecked(source, target, components)?;
        t.check_natural()?;
        Ok(t)
    }

    pub(crate) fn new_unchecked(
        source: Arc<Presheaf>,
        target: Arc<Presheaf>,
        components: Vec<Vec<usize>>,
    ) -> Result<NatTransform, PresheafError> {
        source.same_base(&target)?;
        let base = source.base();
        if components.len() != base.num_objects() {
            return Err(PresheafError::ShapeMismatch("one component per object expected".into()));
        }
        for c in base.objects() {
            let comp = &components[c.0];
            if comp.len() != source.size(c) || comp.iter().any(|&y| y >= target.size(c)) {
                return Err(PresheafError::ShapeMismatch(format!(
                    "component at `{}` has the wrong shape",
                    base.object_name(c)
                )));
            }
        }
        Ok(NatTransform {
            source,
            target,
            components,
        })
    }

    pub fn check_natural(&self) -> Result<(), PresheafError> {
        let base = self.source.base();
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            for x in 0..self.source.size(c) {
                let lhs = self.target.restrict(f, self.components[c.0][x]);
                let rhs = self.components[d.0][self.source.restrict(f, x)];
                if lhs != rhs {
                    return Err(PresheafError::NotNatural {
                        arrow: base.arrow_name(f).into(),
                        element: self.source.element_name(c, x).into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn identity(f: &Arc<Presheaf>) -> NatTransform {
        NatTransform {
            source: f.clone(),
            target: f.clone(),
            components: f.base().objects().map(|c| (0..f.size(c)).collect()).collect(),
        }
    }

    /// The unique map into the terminal presheaf.
    pub fn to_terminal(f: &Arc<Presheaf>) -> NatTransform {
        let one = terminal(f.base());
        NatTransform {
            components: f.base().objects().map(|c| vec![0; f.size(c)]).collect(),
            source: f.clone(),
            target: one,
        }
    }

    pub fn source(&self) -> &Arc<Presheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Presheaf> {
        &self.target
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, c: ObjId) -> &[usize] {
        &self.components[c.0]
    }

    pub fn apply(&self, c: ObjId, x: usize) -> usize {
        self.components[c.0][x]
    }

    /// `self . inner`.
    pub fn after(&self, inner: &NatTransform) -> Result<NatTransform, PresheafError> {
        compose_nat(self, inner)
    }
}

/// `beta . alpha`.
pub fn compose_nat(beta: &NatTransform, alpha: &NatTransform) -> Result<NatTransform, PresheafError> {
    if alpha.target != beta.source {
        return Err(PresheafError::ShapeMismatch("target of inner map is not source of outer map".into()));
    }
    let components = alpha
        .components
        .iter()
        .zip(&beta.components)
        .map(|(a, b)| a.iter().map(|&y| b[y]).collect())
        .collect();
    Ok(NatTransform {
        source: alpha.source.clone(),
        target: beta.target.clone(),
        components,
    })
}

pub fn identity_nat(f: &Arc<Presheaf>) -> NatTransform {
    NatTransform::identity(f)
}

/// Extensional equality. Errors when the shapes differ.
pub fn nat_equal(alpha: &NatTransform, beta: &NatTransform) -> Result<bool, PresheafError> {
    if alpha.source != beta.source || alpha.target != beta.target {
        return Err(PresheafError::ShapeMismatch("comparing maps of different types".into()));
    }
    Ok(alpha.components == beta.components)
}

/// Pointwise finite product with mixed-radix element indices: the tuple
/// `(x_0, .., x_{n-1})` has index `((x_0 * |F_1| + x_1) * |F_2| + ..)`.
#[derive(Debug, Clone)]
pub struct Product {
    presheaf: Arc<Presheaf>,
    factors: Vec<Arc<Presheaf>>,
}

impl Product {
    pub fn new(base: &Arc<FiniteCategory>, factors: Vec<Arc<Presheaf>>) -> Result<Product, PresheafError> {
        for f in &factors {
            if f.base() != base {
                return Err(PresheafError::BaseMismatch);
            }
        }
        let limit = base.limits().max_elements;
        let mut sizes = Vec::with_capacity(base.num_objects());
        for c in base.objects() {
            let mut size: usize = 1;
            for f in &factors {
                size = size.saturating_mul(f.size(c));
            }
            guard(|| format!("product at `{}`", base.object_name(c)), size, limit)?;
            sizes.push(size);
        }
        let mut restrict = Vec::with_capacity(base.num_arrows());
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            let n = sizes[c.0];
            let mut table = Vec::with_capacity(n);
            let mut parts = vec![0usize; factors.len()];
            for _ in 0..n {
                let y = factors.iter().zip(&parts).fold(0, |y, (fac, &x)| y * fac.size(d) + fac.restrict(f, x));
                table.push(y);
                for k in (0..factors.len()).rev() {
                    parts[k] += 1;
                    if parts[k] < factors[k].size(c) {
                        break;
                    }
                    parts[k] = 0;
                }
            }
            restrict.push(table);
        }
        let presheaf = Arc::new(Presheaf::assemble(base.clone(), Names::Tuples(factors.clone()), sizes, restrict));
        Ok(Product { presheaf, factors })
    }

    pub fn presheaf(&self) -> &Arc<Presheaf> {
        &self.presheaf
    }

    pub fn factors(&self) -> &[Arc<Presheaf>] {
        &self.factors
    }

    pub fn tuple(&self, c: ObjId, parts: &[usize]) -> usize {
        debug_assert_eq!(parts.len(), self.factors.len());
        parts
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&x, f)| acc * f.size(c) + x)
    }

    pub fn split(&self, c: ObjId, x: usize) -> Vec<usize> {
        let mut parts = vec![0; self.factors.len()];
        let mut rest = x;
        for k in (0..self.factors.len()).rev() {
            let r = self.factors[k].size(c);
            parts[k] = rest % r;
            rest /= r;
        }
        parts
    }

    pub fn component_of(&self, c: ObjId, x: usize, k: usize) -> usize {
        let stride: usize = self.factors[k + 1..].iter().map(|f| f.size(c)).product();
        (x / stride) % self.factors[k].size(c)
    }

    pub fn projection(&self, k: usize) -> NatTransform {
        let base = self.presheaf.base();
        let components = base
            .objects()
            .map(|c| (0..self.presheaf.size(c)).map(|x| self.component_of(c, x, k)).collect())
            .collect();
        NatTransform {
            source: self.presheaf.clone(),
            target: self.factors[k].clone(),
            components,
        }
    }

    /// `<m_0, .., m_{n-1}>` into this product.
    pub fn tuple_nat(&self, maps: &[NatTransform]) -> Result<NatTransform, PresheafError> {
        if maps.len() != self.factors.len() {
            return Err(PresheafError::ShapeMismatch("wrong number of maps for tupling".into()));
        }
        for (m, f) in maps.iter().zip(&self.factors) {
            if m.target != *f {
                return Err(PresheafError::ShapeMismatch("tupled map has the wrong target".into()));
            }
        }
        let source = match maps.first() {
            Some(m) => m.source.clone(),
            None => return Err(PresheafError::ShapeMismatch("empty tuple has no source".into())),
        };
        if maps.iter().any(|m| m.source != source) {
            return Err(PresheafError::SourceMismatch);
        }
        let base = source.base();
        let components = base
            .objects()
            .map(|c| {
                (0..source.size(c))
                    .map(|z| {
                        maps.iter()
                            .zip(&self.factors)
                            .fold(0, |acc, (m, f)| acc * f.size(c) + m.apply(c, z))
                    })
                    .collect()
            })
            .collect();
        Ok(NatTransform {
            source,
            target: self.presheaf.clone(),
            components,
        })
    }
}

/// Binary product `F x G`.
pub fn product(f: &Arc<Presheaf>, g: &Arc<Presheaf>) -> Result<Product, PresheafError> {
    f.same_base(g)?;
    Product::new(f.base(), vec![f.clone(), g.clone()])
}

/// `<alpha, beta>` into `F x G`, returned with the product it lands in.
pub fn pair(alpha: &NatTransform, beta: &NatTransform) -> Result<(Product, NatTransform), PresheafError> {
    if alpha.source != beta.source {
        return Err(PresheafError::SourceMismatch);
    }
    let p = product(&alpha.target, &beta.target)?;
    let t = p.tuple_nat(&[alpha.clone(), beta.clone()])?;
    Ok((p, t))
}

/// Depth-first search over natural transformations `F -> G`. Each choice
/// `eta_C(x) = y` propagates `eta_D(F(f)x) = G(f)y` along every arrow into
/// `C`, so every naturality square is checked when its top-right corner is
/// assigned. `visit` returns `false` to stop early.
fn search_nats(f: &Presheaf, g: &Presheaf, mut visit: impl FnMut(&[Vec<usize>]) -> bool) {
    let base = f.base();
    const FREE: usize = usize::MAX;
    let mut objects: Vec<ObjId> = base.objects().collect();
    objects.sort_by_key(|&c| (std::cmp::Reverse(base.arrows_into(c).len()), c));
    let vars: Vec<(ObjId, usize)> = objects
        .iter()
        .flat_map(|&c| (0..f.size(c)).map(move |x| (c, x)))
        .collect();
    if vars.iter().any(|&(c, _)| g.size(c) == 0) {
        return;
    }
    let mut assign: Vec<Vec<usize>> = base.objects().map(|c| vec![FREE; f.size(c)]).collect();
    let mut trail: Vec<(ObjId, usize)> = Vec::new();
    let mut stack: Vec<(ObjId, usize, usize)> = Vec::new();

    let mut set = |assign: &mut Vec<Vec<usize>>, trail: &mut Vec<(ObjId, usize)>, c: ObjId, x: usize, y: usize| -> bool {
        stack.clear();
        stack.push((c, x, y));
        while let Some((c, x, y)) = stack.pop() {
            let cur = assign[c.0][x];
            if cur != FREE {
                if cur != y {
                    return false;
                }
                continue;
            }
            assign[c.0][x] = y;
            trail.push((c, x));
            for &a in base.arrows_into(c) {
                if base.is_identity(a) {
                    continue;
                }
                stack.push((base.dom(a), f.restrict(a, x), g.restrict(a, y)));
            }
        }
        true
    };

    // explicit stack of (var index, next candidate, trail mark)
    let mut frames: Vec<(usize, usize, usize)> = Vec::new();
    let mut pos = 0;
    loop {
        while pos < vars.len() && assign[vars[pos].0 .0][vars[pos].1] != FREE {
            pos += 1;
        }
        if pos == vars.len() {
            if !visit(&assign) {
                return;
            }
        } else {
            frames.push((pos, 0, trail.len()));
        }
        // advance to the next viable choice
        loop {
            let Some(top) = frames.last_mut() else { return };
            let (vpos, cand, mark) = *top;
            while trail.len() > mark {
                let (c, x) = trail.pop().expect("trail");
                assign[c.0][x] = FREE;
            }
            let (c, x) = vars[vpos];
            if cand >= g.size(c) {
                frames.pop();
                continue;
            }
            top.1 = cand + 1;
            if set(&mut assign, &mut trail, c, x, cand) {
                pos = vpos + 1;
                break;
            }
        }
    }
}

/// All natural transformations `F -> G` in canonical search order.
pub fn enumerate_nats(f: &Arc<Presheaf>, g: &Arc<Presheaf>) -> Result<Vec<NatTransform>, PresheafError> {
    f.same_base(g)?;
    let limit = f.base().limits().max_elements;
    let mut out = Vec::new();
    let mut overflow = false;
    search_nats(f, g, |comps| {
        if out.len() == limit {
            overflow = true;
            return false;
        }
        out.push(NatTransform {
            source: f.clone(),
            target: g.clone(),
            components: comps.to_vec(),
        });
        true
    });
    if overflow {
        return Err(PresheafError::SizeGuardExceeded {
            what: "natural transformations".into(),
            size: limit + 1,
            limit,
        });
    }
    Ok(out)
}

/// `|Hom(F, G)|` without storing the transformations.
pub fn count_nats(f: &Presheaf, g: &Presheaf) -> Result<u64, PresheafError> {
    f.same_base(g)?;
    let mut n = 0u64;
    search_nats(f, g, |_| {
        n += 1;
        true
    });
    Ok(n)
}

/// Layout of an element table of `B^A(C)`: entries indexed by pairs
/// `(h: X -> C, a in A(X))`, grouped by `X` in object order, then by the
/// position of `h` in `hom(X, C)`, then by `a`.
#[derive(Debug, Clone)]
struct ProbeLayout {
    offsets: Vec<usize>,
    len: usize,
}

/// The exponential `B^A` with its elements stored as component tables of
/// transformations `yC x A -> B`.
#[derive(Debug)]
pub struct Exponential {
    presheaf: Arc<Presheaf>,
    domain: Arc<Presheaf>,
    codomain: Arc<Presheaf>,
    layouts: Vec<ProbeLayout>,
    tables: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

type ExpKey = (Arc<Presheaf>, Arc<Presheaf>);

static EXP_CACHE: Lazy<RwLock<HashMap<ExpKey, Arc<Exponential>>>> = Lazy::new(|| RwLock::new(HashMap::new()));
const EXP_CACHE_CAP: usize = 512;

/// `B^A`, memoized on the structure of `A` and `B`.
pub fn exponential(a: &Arc<Presheaf>, b: &Arc<Presheaf>) -> Result<Arc<Exponential>, PresheafError> {
    a.same_base(b)?;
    let key = (a.clone(), b.clone());
    if let Some(e) = EXP_CACHE.read().expect("cache lock").get(&key) {
        return Ok(e.clone());
    }
    let e = Arc::new(Exponential::build(a, b)?);
    let mut cache = EXP_CACHE.write().expect("cache lock");
    if cache.len() >= EXP_CACHE_CAP {
        cache.clear();
    }
    Ok(cache.entry(key).or_insert(e).clone())
}

impl Exponential {
    fn build(a: &Arc<Presheaf>, b: &Arc<Presheaf>) -> Result<Exponential, PresheafError> {
        let base = a.base().clone();
        let limit = base.limits().max_elements;
        let mut layouts = Vec::new();
        for c in base.objects() {
            let mut offsets = Vec::with_capacity(base.num_objects());
            let mut len = 0;
            for x in base.objects() {
                offsets.push(len);
                len += base.hom(x, c).len() * a.size(x);
            }
            layouts.push(ProbeLayout { offsets, len });
        }
        let mut tables = Vec::with_capacity(base.num_objects());
        let mut index = Vec::with_capacity(base.num_objects());
        for c in base.objects() {
            let probe = product(&yoneda(&base, c), a)?;
            let mut elems: Vec<Vec<usize>> = Vec::new();
            let mut overflow = false;
            search_nats(probe.presheaf(), b, |comps| {
                if elems.len() == limit {
                    overflow = true;
                    return false;
                }
                elems.push(comps.concat());
                true
            });
            if overflow {
                return Err(PresheafError::SizeGuardExceeded {
                    what: format!("exponential at `{}`", base.object_name(c)),
                    size: limit + 1,
                    limit,
                });
            }
            let idx: HashMap<Vec<usize>, usize> = elems.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect();
            tables.push(elems);
            index.push(idx);
        }
        let mut exp = Exponential {
            presheaf: terminal(&base),
            domain: a.clone(),
            codomain: b.clone(),
            layouts,
            tables,
            index,
        };
        let names = base
            .objects()
            .map(|c| (0..exp.tables[c.0].len()).map(|k| exp.table_name(c, k)).collect())
            .collect();
        let mut restrict = Vec::with_capacity(base.num_arrows());
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            let mut t = Vec::with_capacity(exp.tables[c.0].len());
            for k in 0..exp.tables[c.0].len() {
                let r = exp.restrict_table(f, &exp.tables[c.0][k]);
                let j = *exp.index[d.0].get(&r).ok_or_else(|| {
                    PresheafError::NotNatural {
                        arrow: base.arrow_name(f).into(),
                        element: exp.table_name(c, k),
                    }
                })?;
                t.push(j);
            }
            restrict.push(t);
        }
        exp.presheaf = Arc::new(Presheaf::new_unchecked(base, names, restrict)?);
        Ok(exp)
    }

    fn table_name(&self, c: ObjId, k: usize) -> String {
        let base = self.domain.base();
        let table = &self.tables[c.0][k];
        let mut parts = Vec::with_capacity(table.len());
        for x in base.objects() {
            for (hp, &h) in base.hom(x, c).iter().enumerate() {
                for a in 0..self.domain.size(x) {
                    let v = table[self.layouts[c.0].offsets[x.0] + hp * self.domain.size(x) + a];
                    parts.push(format!(
                        "{}.{}>{}",
                        base.arrow_name(h),
                        self.domain.element_name(x, a),
                        self.codomain.element_name(x, v)
                    ));
                }
            }
        }
        format!("[{}]", parts.join(","))
    }

    /// Table of `eta . (yf x 1)` for `f: D -> C`.
    fn restrict_table(&self, f: ArrowId, table: &[usize]) -> Vec<usize> {
        let base = self.domain.base();
        let (d, c) = (base.dom(f), base.cod(f));
        let mut out = Vec::with_capacity(self.layouts[d.0].len);
        for x in base.objects() {
            for &h in &base.hom(x, d) {
                let fh = base.compose(f, h).expect("composable");
                for a in 0..self.domain.size(x) {
                    out.push(table[self.slot(c, fh, a)]);
                }
            }
        }
        out
    }

    pub fn presheaf(&self) -> &Arc<Presheaf> {
        &self.presheaf
    }

    pub fn domain(&self) -> &Arc<Presheaf> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Presheaf> {
        &self.codomain
    }

    /// Position of the probe `(h, a)` in a table of `B^A(C)`, `h: X -> C`.
    pub fn slot(&self, c: ObjId, h: ArrowId, a: usize) -> usize {
        let base = self.domain.base();
        let x = base.dom(h);
        debug_assert_eq!(base.cod(h), c);
        self.layouts[c.0].offsets[x.0] + base.hom_position(h) * self.domain.size(x) + a
    }

    pub fn table(&self, c: ObjId, eta: usize) -> &[usize] {
        &self.tables[c.0][eta]
    }

    pub fn table_len(&self, c: ObjId) -> usize {
        self.layouts[c.0].len
    }

    /// `eta_X(h, a)` for `eta` in `B^A(C)`.
    pub fn value(&self, c: ObjId, eta: usize, h: ArrowId, a: usize) -> usize {
        self.tables[c.0][eta][self.slot(c, h, a)]
    }

    /// Element of `B^A(C)` with the given table.
    pub fn lookup(&self, c: ObjId, table: &[usize]) -> Option<usize> {
        self.index[c.0].get(table).copied()
    }

    /// Builds the table of a transformation given pointwise by
    /// `value(h, a)` and looks it up.
    pub fn lookup_with(&self, c: ObjId, mut value: impl FnMut(ArrowId, usize) -> usize) -> Option<usize> {
        let base = self.domain.base();
        let mut t = Vec::with_capacity(self.layouts[c.0].len);
        for x in base.objects() {
            for &h in &base.hom(x, c) {
                for a in 0..self.domain.size(x) {
                    t.push(value(h, a));
                }
            }
        }
        self.lookup(c, &t)
    }

    /// `eps_C(eta, a) = eta_C(1_C, a)`.
    pub fn eval(&self, c: ObjId, eta: usize, a: usize) -> usize {
        let id = self.domain.base().identity(c);
        self.value(c, eta, id, a)
    }
}

/// Evaluation `B^A x A -> B`, returned with its source product.
pub fn eval_map(exp: &Exponential) -> Result<(Product, NatTransform), PresheafError> {
    let p = product(&exp.presheaf, &exp.domain)?;
    let base = exp.domain.base();
    let components = base
        .objects()
        .map(|c| {
            (0..p.presheaf().size(c))
                .map(|z| {
                    let parts = p.split(c, z);
                    exp.eval(c, parts[0], parts[1])
                })
                .collect()
        })
        .collect();
    let t = NatTransform {
        source: p.presheaf().clone(),
        target: exp.codomain.clone(),
        components,
    };
    Ok((p, t))
}

/// Curries `alpha: Z x A -> B` to `Z -> B^A`:
/// `alpha-bar_C(z)_X(h, a) = alpha_X(Z(h)z, a)`.
pub fn transpose(alpha: &NatTransform, zxa: &Product, exp: &Exponential) -> Result<NatTransform, PresheafError> {
    if zxa.factors().len() != 2
        || *zxa.presheaf() != alpha.source
        || zxa.factors()[1] != exp.domain
        || alpha.target != exp.codomain
    {
        return Err(PresheafError::ShapeMismatch("transpose expects Z x A -> B and B^A".into()));
    }
    let z = &zxa.factors()[0];
    let base = z.base();
    let mut components = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut comp = Vec::with_capacity(z.size(c));
        for zz in 0..z.size(c) {
            let k = exp
                .lookup_with(c, |h, a| {
                    let x = base.dom(h);
                    alpha.apply(x, zxa.tuple(x, &[z.restrict(h, zz), a]))
                })
                .ok_or_else(|| PresheafError::NotNatural {
                    arrow: base.arrow_name(base.identity(c)).into(),
                    element: z.element_name(c, zz).into(),
                })?;
            comp.push(k);
        }
        components.push(comp);
    }
    Ok(NatTransform {
        source: z.clone(),
        target: exp.presheaf.clone(),
        components,
    })
}

/// Inverse of [`transpose`]: `beta: Z -> B^A` to `eps . (beta x 1)`.
pub fn untranspose(beta: &NatTransform, zxa: &Product, exp: &Exponential) -> Result<NatTransform, PresheafError> {
    if zxa.factors().len() != 2
        || zxa.factors()[0] != beta.source
        || zxa.factors()[1] != exp.domain
        || beta.target != exp.presheaf
    {
        return Err(PresheafError::ShapeMismatch("untranspose expects Z -> B^A and Z x A".into()));
    }
    let base = beta.source.base();
    let components = base
        .objects()
        .map(|c| {
            (0..zxa.presheaf().size(c))
                .map(|x| {
                    let parts = zxa.split(c, x);
                    exp.eval(c, beta.apply(c, parts[0]), parts[1])
                })
                .collect()
        })
        .collect();
    Ok(NatTransform {
        source: zxa.presheaf().clone(),
        target: exp.codomain.clone(),
        components,
    })
}

/// `m^A: B^A -> B'^A`, postcomposition with `m: B -> B'`.
pub fn exp_map(m: &NatTransform, src: &Exponential, dst: &Exponential) -> Result<NatTransform, PresheafError> {
    if src.domain != dst.domain || src.codomain != m.source || dst.codomain != m.target {
        return Err(PresheafError::ShapeMismatch("exp_map expects B^A, B'^A and B -> B'".into()));
    }
    let base = m.source.base();
    let mut components = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut comp = Vec::with_capacity(src.presheaf.size(c));
        for eta in 0..src.presheaf.size(c) {
            let k = dst.lookup_with(c, |h, a| m.apply(base.dom(h), src.value(c, eta, h, a)));
            comp.push(k.ok_or_else(|| PresheafError::NotNatural {
                arrow: base.arrow_name(base.identity(c)).into(),
                element: src.presheaf.element_name(c, eta).into(),
            })?);
        }
        components.push(comp);
    }
    Ok(NatTransform {
        source: src.presheaf.clone(),
        target: dst.presheaf.clone(),
        components,
    })
}

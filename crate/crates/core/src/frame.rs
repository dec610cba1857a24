//! Internal frames `H` in a finite presheaf topos, the canonical frame map
//! `i : Ω -> H`, its right adjoint `τ`, the modality `□ = i τ`, and the
//! indexed quantifiers `∃_I ⊣ Δ_I ⊣ ∀_I`.
//!
//! Structure maps are stored per object as flat tables: the binary
//! operation on `x, y` in `H(C)` lives at `x * |H(C)| + y`.

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{ArrowId, FiniteCategory, ObjId};
use crate::omega::{bit, delta_mask, maximal, omega, omega_star, ArrowSetKind, ArrowSets, Mask, OmegaError};
use crate::presheaf::{
    enumerate_nats, exponential, terminal, Exponential, NatTransform, Presheaf, PresheafError, Product,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("Heyting axiom `{axiom}` fails at `{object}`: {witness}")]
    HeytingAxiomFailure {
        axiom: String,
        object: String,
        witness: String,
    },
    #[error("structure map `{op}` is not natural along `{arrow}`: {witness}")]
    NonNaturalStructureMap {
        op: String,
        arrow: String,
        witness: String,
    },
    #[error("malformed frame table: {0}")]
    BadTable(String),
    #[error("not a frame map: {0}")]
    NotAFrameMap(String),
    #[error("found {0} frame maps from the subobject classifier, expected exactly one")]
    UniquenessViolation(usize),
    #[error("frame is not faithful: i is not injective at `{object}` ({witness})")]
    FaithfulnessFailure { object: String, witness: String },
    #[error("i and tau are not adjoint at `{object}`: {witness}")]
    GaloisFailure { object: String, witness: String },
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FrameKind {
    /// The subobject classifier with sieve operations.
    Omega,
    /// Arbitrary arrow-sets with pointwise Boolean operations.
    OmegaStar,
    /// Subsets of an `n`-element set, constant over the base.
    Powerset(usize),
    Custom(String),
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameKind::Omega => write!(f, "omega"),
            FrameKind::OmegaStar => write!(f, "omega_star"),
            FrameKind::Powerset(n) => write!(f, "powerset({n})"),
            FrameKind::Custom(name) => write!(f, "{name}"),
        }
    }
}

/// Candidate structure tables, indexed by object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameTables {
    pub top: Vec<usize>,
    pub bot: Vec<usize>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub imp: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct InternalFrame {
    kind: FrameKind,
    carrier: Arc<Presheaf>,
    tables: FrameTables,
    le: Vec<Vec<bool>>,
    // per arrow f: D -> C, the left adjoint of H(f) as a map H(D) -> H(C)
    exists: Vec<Vec<usize>>,
    arrow_sets: Option<Arc<ArrowSets>>,
}

fn fail(axiom: &str, base: &FiniteCategory, c: ObjId, witness: String) -> FrameError {
    FrameError::HeytingAxiomFailure {
        axiom: axiom.into(),
        object: base.object_name(c).into(),
        witness,
    }
}

/// Checks the tables and builds the frame.
pub fn validate_frame(
    carrier: Arc<Presheaf>,
    tables: FrameTables,
    kind: FrameKind,
) -> Result<InternalFrame, FrameError> {
    InternalFrame::build(carrier, tables, kind, None)
}

impl InternalFrame {
    fn build(
        carrier: Arc<Presheaf>,
        tables: FrameTables,
        kind: FrameKind,
        arrow_sets: Option<Arc<ArrowSets>>,
    ) -> Result<InternalFrame, FrameError> {
        let base = carrier.base().clone();
        let no = base.num_objects();
        if tables.top.len() != no
            || tables.bot.len() != no
            || tables.meet.len() != no
            || tables.join.len() != no
            || tables.imp.len() != no
        {
            return Err(FrameError::BadTable("one table per object expected".into()));
        }
        for c in base.objects() {
            let n = carrier.size(c);
            if n == 0 {
                return Err(FrameError::BadTable(format!("empty carrier at `{}`", base.object_name(c))));
            }
            let ok = |t: &Vec<usize>| t.len() == n * n && t.iter().all(|&v| v < n);
            if tables.top[c.0] >= n
                || tables.bot[c.0] >= n
                || !ok(&tables.meet[c.0])
                || !ok(&tables.join[c.0])
                || !ok(&tables.imp[c.0])
            {
                return Err(FrameError::BadTable(format!(
                    "table shape or range at `{}`",
                    base.object_name(c)
                )));
            }
        }
        let le = base
            .objects()
            .map(|c| {
                let n = carrier.size(c);
                (0..n * n).map(|k| tables.meet[c.0][k] == k / n).collect()
            })
            .collect();
        let mut frame = InternalFrame {
            kind,
            carrier,
            tables,
            le,
            exists: Vec::new(),
            arrow_sets,
        };
        frame.check_heyting()?;
        frame.check_natural()?;
        frame.exists = base
            .arrow_ids()
            .map(|f| {
                let (d, c) = (base.dom(f), base.cod(f));
                (0..frame.size(d))
                    .map(|y| frame.meet_all(c, (0..frame.size(c)).filter(|&x| frame.le(d, y, frame.restrict(f, x)))))
                    .collect()
            })
            .collect();
        frame.check_adjoints()?;
        Ok(frame)
    }

    fn name(&self, c: ObjId, x: usize) -> Cow<'_, str> {
        self.carrier.element_name(c, x)
    }

    fn check_heyting(&self) -> Result<(), FrameError> {
        let base = self.carrier.base();
        for c in base.objects() {
            let n = self.size(c);
            let (top, bot) = (self.top(c), self.bot(c));
            let nm = |x: usize| self.name(c, x).to_string();
            for x in 0..n {
                if self.meet(c, x, top) != x {
                    return Err(fail("x /\\ top = x", base, c, format!("x = {}", nm(x))));
                }
                if self.join(c, x, bot) != x {
                    return Err(fail("x \\/ bot = x", base, c, format!("x = {}", nm(x))));
                }
                if self.meet(c, x, x) != x || self.join(c, x, x) != x {
                    return Err(fail("idempotence", base, c, format!("x = {}", nm(x))));
                }
            }
            for x in 0..n {
                for y in 0..n {
                    let w = || format!("x = {}, y = {}", nm(x), nm(y));
                    if self.meet(c, x, y) != self.meet(c, y, x) {
                        return Err(fail("meet commutativity", base, c, w()));
                    }
                    if self.join(c, x, y) != self.join(c, y, x) {
                        return Err(fail("join commutativity", base, c, w()));
                    }
                    if self.meet(c, x, self.join(c, x, y)) != x || self.join(c, x, self.meet(c, x, y)) != x {
                        return Err(fail("absorption", base, c, w()));
                    }
                    for z in 0..n {
                        let w = || format!("x = {}, y = {}, z = {}", nm(x), nm(y), nm(z));
                        if self.meet(c, self.meet(c, x, y), z) != self.meet(c, x, self.meet(c, y, z)) {
                            return Err(fail("meet associativity", base, c, w()));
                        }
                        if self.join(c, self.join(c, x, y), z) != self.join(c, x, self.join(c, y, z)) {
                            return Err(fail("join associativity", base, c, w()));
                        }
                        if self.meet(c, x, self.join(c, y, z)) != self.join(c, self.meet(c, x, y), self.meet(c, x, z))
                        {
                            return Err(fail("distributivity", base, c, w()));
                        }
                        // z <= (x => y) iff z /\ x <= y
                        if self.le(c, z, self.imp(c, x, y)) != self.le(c, self.meet(c, z, x), y) {
                            return Err(fail("z <= (x => y) iff z /\\ x <= y", base, c, w()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_natural(&self) -> Result<(), FrameError> {
        let base = self.carrier.base();
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            let r = |x| self.restrict(f, x);
            let bad = |op: &str, witness: String| FrameError::NonNaturalStructureMap {
                op: op.into(),
                arrow: base.arrow_name(f).into(),
                witness,
            };
            if r(self.top(c)) != self.top(d) {
                let w = format!("restricts {} to {}, not {}", self.name(c, self.top(c)), self.name(d, r(self.top(c))), self.name(d, self.top(d)));
                return Err(bad("top", w));
            }
            if r(self.bot(c)) != self.bot(d) {
                let w = format!("restricts {} to {}, not {}", self.name(c, self.bot(c)), self.name(d, r(self.bot(c))), self.name(d, self.bot(d)));
                return Err(bad("bot", w));
            }
            for x in 0..self.size(c) {
                for y in 0..self.size(c) {
                    let w = || format!("x = {}, y = {}", self.name(c, x), self.name(c, y));
                    if r(self.meet(c, x, y)) != self.meet(d, r(x), r(y)) {
                        return Err(bad("meet", w()));
                    }
                    if r(self.join(c, x, y)) != self.join(d, r(x), r(y)) {
                        return Err(bad("join", w()));
                    }
                    if r(self.imp(c, x, y)) != self.imp(d, r(x), r(y)) {
                        return Err(bad("imp", w()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Left adjoints exist, satisfy Frobenius, and satisfy Beck-Chevalley:
    /// `H(g) ∃_f s = ⋁ { ∃_h H(k) s | g h = f k }`.
    fn check_adjoints(&self) -> Result<(), FrameError> {
        let base = self.carrier.base();
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            for y in 0..self.size(d) {
                let e = self.exists_along(f, y);
                if !self.le(d, y, self.restrict(f, e)) {
                    return Err(fail(
                        "left adjoint of restriction",
                        base,
                        c,
                        format!("arrow {}, y = {}", base.arrow_name(f), self.name(d, y)),
                    ));
                }
                for x in 0..self.size(c) {
                    let lhs = self.exists_along(f, self.meet(d, y, self.restrict(f, x)));
                    if lhs != self.meet(c, e, x) {
                        return Err(fail(
                            "Frobenius",
                            base,
                            c,
                            format!("arrow {}, y = {}, x = {}", base.arrow_name(f), self.name(d, y), self.name(c, x)),
                        ));
                    }
                }
            }
            for &g in base.arrows_into(c) {
                let e_obj = base.dom(g);
                for s in 0..self.size(d) {
                    let lhs = self.restrict(g, self.exists_along(f, s));
                    let mut rhs = self.bot(e_obj);
                    for &h in base.arrows_into(e_obj) {
                        let gh = base.compose(g, h).expect("composable");
                        for k in base.hom(base.dom(h), d) {
                            if base.compose(f, k) == Some(gh) {
                                rhs = self.join(e_obj, rhs, self.exists_along(h, self.restrict(k, s)));
                            }
                        }
                    }
                    if lhs != rhs {
                        return Err(fail(
                            "Beck-Chevalley",
                            base,
                            e_obj,
                            format!("f = {}, g = {}, s = {}", base.arrow_name(f), base.arrow_name(g), self.name(d, s)),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn from_arrow_sets(om: Arc<ArrowSets>, kind: FrameKind) -> Result<InternalFrame, FrameError> {
        let base = om.base().clone();
        let mut t = FrameTables {
            top: Vec::new(),
            bot: Vec::new(),
            meet: Vec::new(),
            join: Vec::new(),
            imp: Vec::new(),
        };
        for c in base.objects() {
            let n = om.presheaf().size(c);
            t.top.push(om.top(c));
            t.bot.push(om.bot(c));
            t.meet.push((0..n * n).map(|k| om.meet(c, k / n, k % n)).collect());
            t.join.push((0..n * n).map(|k| om.join(c, k / n, k % n)).collect());
            t.imp.push((0..n * n).map(|k| om.implies(c, k / n, k % n)).collect());
        }
        Self::build(om.presheaf().clone(), t, kind, Some(om))
    }

    /// `Ω` with its sieve operations.
    pub fn omega(base: &Arc<FiniteCategory>) -> Result<InternalFrame, FrameError> {
        Self::from_arrow_sets(omega(base)?, FrameKind::Omega)
    }

    /// `Ω_*` with pointwise Boolean operations.
    pub fn omega_star(base: &Arc<FiniteCategory>) -> Result<InternalFrame, FrameError> {
        Self::from_arrow_sets(omega_star(base)?, FrameKind::OmegaStar)
    }

    /// Subsets of `{0, .., n-1}` at every object, identity restrictions.
    pub fn powerset(base: &Arc<FiniteCategory>, n: usize) -> Result<InternalFrame, FrameError> {
        if n >= 16 {
            return Err(FrameError::Unsupported(format!("powerset({n}) is too large")));
        }
        let m = 1usize << n;
        let names: Vec<String> = (0..m)
            .map(|s| {
                let parts: Vec<String> = (0..n).filter(|k| s & (1 << k) != 0).map(|k| k.to_string()).collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        let carrier = Arc::new(Presheaf::constant(base.clone(), &names)?);
        let no = base.num_objects();
        let full = m - 1;
        let tables = FrameTables {
            top: vec![full; no],
            bot: vec![0; no],
            meet: vec![(0..m * m).map(|k| (k / m) & (k % m)).collect(); no],
            join: vec![(0..m * m).map(|k| (k / m) | (k % m)).collect(); no],
            imp: vec![(0..m * m).map(|k| (!(k / m) & full) | (k % m)).collect(); no],
        };
        Self::build(carrier, tables, FrameKind::Powerset(n), None)
    }

    pub fn kind(&self) -> &FrameKind {
        &self.kind
    }

    pub fn carrier(&self) -> &Arc<Presheaf> {
        &self.carrier
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        self.carrier.base()
    }

    pub fn tables(&self) -> &FrameTables {
        &self.tables
    }

    /// The arrow-set reading of elements, for `Ω` and `Ω_*`.
    pub fn arrow_sets(&self) -> Option<&Arc<ArrowSets>> {
        self.arrow_sets.as_ref()
    }

    pub fn is_geometric(&self) -> bool {
        self.kind == FrameKind::OmegaStar
    }

    pub fn size(&self, c: ObjId) -> usize {
        self.carrier.size(c)
    }

    pub fn top(&self, c: ObjId) -> usize {
        self.tables.top[c.0]
    }

    pub fn bot(&self, c: ObjId) -> usize {
        self.tables.bot[c.0]
    }

    pub fn meet(&self, c: ObjId, x: usize, y: usize) -> usize {
        self.tables.meet[c.0][x * self.size(c) + y]
    }

    pub fn join(&self, c: ObjId, x: usize, y: usize) -> usize {
        self.tables.join[c.0][x * self.size(c) + y]
    }

    pub fn imp(&self, c: ObjId, x: usize, y: usize) -> usize {
        self.tables.imp[c.0][x * self.size(c) + y]
    }

    pub fn le(&self, c: ObjId, x: usize, y: usize) -> bool {
        self.le[c.0][x * self.size(c) + y]
    }

    pub fn restrict(&self, f: ArrowId, x: usize) -> usize {
        self.carrier.restrict(f, x)
    }

    pub fn meet_all(&self, c: ObjId, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.top(c), |a, x| self.meet(c, a, x))
    }

    pub fn join_all(&self, c: ObjId, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bot(c), |a, x| self.join(c, a, x))
    }

    /// `∃_f(y) = ⋀{x in H(C) | y <= H(f)(x)}` for `f: D -> C`, `y` in `H(D)`.
    pub fn exists_along(&self, f: ArrowId, y: usize) -> usize {
        self.exists[f.0][y]
    }

    pub fn element_name(&self, c: ObjId, x: usize) -> Cow<'_, str> {
        self.carrier.element_name(c, x)
    }

    /// `⋁{s in H(C) | H(h)(s) <= bound(h) for every h into C}`: the right
    /// adjoint side of the indexed quantifier, given per-arrow bounds.
    pub fn forall_from_bounds(&self, c: ObjId, bound: impl Fn(ArrowId) -> usize) -> usize {
        let base = self.base();
        let bounds: Vec<(ArrowId, usize)> = base.arrows_into(c).iter().map(|&h| (h, bound(h))).collect();
        self.join_all(
            c,
            (0..self.size(c)).filter(|&s| bounds.iter().all(|&(h, b)| self.le(base.dom(h), self.restrict(h, s), b))),
        )
    }

    /// `⋀{s in H(C) | bound(h) <= H(h)(s) for every h into C}`.
    pub fn exists_from_bounds(&self, c: ObjId, bound: impl Fn(ArrowId) -> usize) -> usize {
        let base = self.base();
        let bounds: Vec<(ArrowId, usize)> = base.arrows_into(c).iter().map(|&h| (h, bound(h))).collect();
        self.meet_all(
            c,
            (0..self.size(c)).filter(|&s| bounds.iter().all(|&(h, b)| self.le(base.dom(h), b, self.restrict(h, s)))),
        )
    }

    /// The structure maps as transformations `1 -> H` and `H x H -> H`.
    pub fn structure_maps(&self) -> Result<crate::omega::HeytingMaps, FrameError> {
        let base = self.base();
        let h = &self.carrier;
        let one = terminal(base);
        let square = Product::new(base, vec![h.clone(), h.clone()])?;
        let point = |t: &Vec<usize>| NatTransform::new(one.clone(), h.clone(), t.iter().map(|&x| vec![x]).collect());
        let binary = |t: &Vec<Vec<usize>>| NatTransform::new(square.presheaf().clone(), h.clone(), t.clone());
        Ok(crate::omega::HeytingMaps {
            top: point(&self.tables.top)?,
            bot: point(&self.tables.bot)?,
            meet: binary(&self.tables.meet)?,
            join: binary(&self.tables.join)?,
            imp: binary(&self.tables.imp)?,
            square,
        })
    }
}

/// `i`, `τ` and `□` for a frame, as per-object tables. `i` is indexed by
/// the elements of `Ω`; `τ` returns elements of `Ω`.
#[derive(Debug, Clone)]
pub struct FrameMaps {
    omega: Arc<ArrowSets>,
    i: Vec<Vec<usize>>,
    tau: Vec<Vec<usize>>,
    boxm: Vec<Vec<usize>>,
}

/// `i_C(σ) = ⋁_{f in σ} ∃_f(⊤)`.
fn i_tables(frame: &InternalFrame, om: &ArrowSets) -> Vec<Vec<usize>> {
    let base = frame.base();
    base.objects()
        .map(|c| {
            om.masks(c)
                .iter()
                .map(|&s| {
                    frame.join_all(
                        c,
                        base.arrows_into(c)
                            .iter()
                            .filter(|&&f| s & bit(f) != 0)
                            .map(|&f| frame.exists_along(f, frame.top(base.dom(f)))),
                    )
                })
                .collect()
        })
        .collect()
}

/// Whether componentwise tables `j : Ω -> H` form a frame map: natural,
/// preserving finite meets and joins, and commuting with the left
/// adjoints of restriction (which carry the internal joins).
pub fn frame_map_defect(frame: &InternalFrame, om: &ArrowSets, j: &[Vec<usize>]) -> Option<String> {
    let base = frame.base();
    for c in base.objects() {
        if j[c.0][om.top(c)] != frame.top(c) {
            return Some(format!("top not preserved at `{}`", base.object_name(c)));
        }
        if j[c.0][om.bot(c)] != frame.bot(c) {
            return Some(format!("bottom not preserved at `{}`", base.object_name(c)));
        }
        let n = om.presheaf().size(c);
        for x in 0..n {
            for y in 0..n {
                if j[c.0][om.meet(c, x, y)] != frame.meet(c, j[c.0][x], j[c.0][y])
                    || j[c.0][om.join(c, x, y)] != frame.join(c, j[c.0][x], j[c.0][y])
                {
                    return Some(format!(
                        "lattice operations not preserved at `{}` on {}, {}",
                        base.object_name(c),
                        om.render(c, x),
                        om.render(c, y)
                    ));
                }
            }
        }
    }
    for f in base.arrow_ids() {
        let (d, c) = (base.dom(f), base.cod(f));
        for s in 0..om.presheaf().size(c) {
            if frame.restrict(f, j[c.0][s]) != j[d.0][om.presheaf().restrict(f, s)] {
                return Some(format!("not natural along `{}` at {}", base.arrow_name(f), om.render(c, s)));
            }
        }
        for s in 0..om.presheaf().size(d) {
            // ∃_f σ is the sieve {f . k | k in σ}, already closed since σ is
            let sm = om.mask(d, s);
            let gen: Mask = base
                .arrows_into(d)
                .iter()
                .filter(|&&k| sm & bit(k) != 0)
                .fold(0, |m, &k| m | bit(base.compose(f, k).expect("composable")));
            let Some(e) = om.index_of(c, gen) else {
                return Some(format!("left adjoint along `{}` leaves the classifier", base.arrow_name(f)));
            };
            if j[c.0][e] != frame.exists_along(f, j[d.0][s]) {
                return Some(format!(
                    "does not commute with the left adjoint along `{}` at {}",
                    base.arrow_name(f),
                    om.render(d, s)
                ));
            }
        }
    }
    None
}

impl FrameMaps {
    /// Computes `i` by the join-of-left-adjoints formula and checks that it
    /// is a frame map; then `τ` as the pointwise right adjoint, cross-checked
    /// against the classifying map of `⊤_H`.
    pub fn canonical(frame: &InternalFrame) -> Result<FrameMaps, FrameError> {
        let base = frame.base();
        let om = omega(base)?;
        let i = i_tables(frame, &om);
        if let Some(why) = frame_map_defect(frame, &om, &i) {
            return Err(FrameError::NotAFrameMap(why));
        }
        let mut tau = Vec::with_capacity(base.num_objects());
        for c in base.objects() {
            let mut col = Vec::with_capacity(frame.size(c));
            for x in 0..frame.size(c) {
                let adj: Mask = om
                    .masks(c)
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| frame.le(c, i[c.0][k], x))
                    .fold(0, |m, (_, &s)| m | s);
                let classified: Mask = base
                    .arrows_into(c)
                    .iter()
                    .filter(|&&f| frame.restrict(f, x) == frame.top(base.dom(f)))
                    .fold(0, |m, &f| m | bit(f));
                if adj != classified {
                    return Err(FrameError::GaloisFailure {
                        object: base.object_name(c).into(),
                        witness: format!("tau({}) disagrees with the classifying map of top", frame.element_name(c, x)),
                    });
                }
                col.push(om.index_of(c, adj).ok_or_else(|| FrameError::GaloisFailure {
                    object: base.object_name(c).into(),
                    witness: "tau is not a sieve".into(),
                })?);
            }
            tau.push(col);
        }
        let boxm = base
            .objects()
            .map(|c| tau[c.0].iter().map(|&s| i[c.0][s]).collect())
            .collect();
        let maps = FrameMaps { omega: om, i, tau, boxm };
        maps.check_galois(frame)?;
        Ok(maps)
    }

    /// Replaces one entry of `τ` and recomputes `□`. Only for exercising
    /// failure paths.
    pub fn with_corrupted_tau(&self, c: ObjId, x: usize, sieve: usize) -> FrameMaps {
        let mut out = self.clone();
        out.tau[c.0][x] = sieve;
        out.boxm[c.0][x] = out.i[c.0][sieve];
        out
    }

    pub fn omega(&self) -> &Arc<ArrowSets> {
        &self.omega
    }

    pub fn i_at(&self, c: ObjId, sieve: usize) -> usize {
        self.i[c.0][sieve]
    }

    /// `i` applied to a sieve given as a mask.
    pub fn i_mask(&self, c: ObjId, m: Mask) -> usize {
        self.i[c.0][self.omega.at(c, m)]
    }

    pub fn tau_at(&self, c: ObjId, x: usize) -> usize {
        self.tau[c.0][x]
    }

    pub fn tau_mask(&self, c: ObjId, x: usize) -> Mask {
        self.omega.mask(c, self.tau[c.0][x])
    }

    pub fn box_at(&self, c: ObjId, x: usize) -> usize {
        self.boxm[c.0][x]
    }

    pub fn i_nat(&self, frame: &InternalFrame) -> Result<NatTransform, FrameError> {
        Ok(NatTransform::new(self.omega.presheaf().clone(), frame.carrier().clone(), self.i.clone())?)
    }

    pub fn tau_nat(&self, frame: &InternalFrame) -> Result<NatTransform, FrameError> {
        Ok(NatTransform::new(frame.carrier().clone(), self.omega.presheaf().clone(), self.tau.clone())?)
    }

    pub fn box_nat(&self, frame: &InternalFrame) -> Result<NatTransform, FrameError> {
        Ok(NatTransform::new(frame.carrier().clone(), frame.carrier().clone(), self.boxm.clone())?)
    }

    /// `i_C(σ) <= x iff σ ⊆ τ_C(x)` everywhere.
    pub fn check_galois(&self, frame: &InternalFrame) -> Result<(), FrameError> {
        let base = frame.base();
        for c in base.objects() {
            for (k, &s) in self.omega.masks(c).iter().enumerate() {
                for x in 0..frame.size(c) {
                    let left = frame.le(c, self.i[c.0][k], x);
                    let right = s & !self.tau_mask(c, x) == 0;
                    if left != right {
                        return Err(FrameError::GaloisFailure {
                            object: base.object_name(c).into(),
                            witness: format!("sigma = {}, x = {}", self.omega.render(c, k), frame.element_name(c, x)),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// `i` is injective at every object.
    pub fn check_faithful(&self, frame: &InternalFrame) -> Result<(), FrameError> {
        let base = frame.base();
        for c in base.objects() {
            let col = &self.i[c.0];
            for a in 0..col.len() {
                for b in a + 1..col.len() {
                    if col[a] == col[b] {
                        return Err(FrameError::FaithfulnessFailure {
                            object: base.object_name(c).into(),
                            witness: format!(
                                "i({}) = i({}) = {}",
                                self.omega.render(c, a),
                                self.omega.render(c, b),
                                frame.element_name(c, col[a])
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Elementwise S4 laws of `□`.
    pub fn s4_report(&self, frame: &InternalFrame) -> S4Report {
        let base = frame.base();
        let mut r = S4Report::default();
        let name = |c: ObjId, x: usize| format!("{}@{}", frame.element_name(c, x), base.object_name(c));
        for c in base.objects() {
            if r.box_top.is_none() && self.box_at(c, frame.top(c)) != frame.top(c) {
                r.box_top = Some(name(c, frame.top(c)));
            }
            for x in 0..frame.size(c) {
                let bx = self.box_at(c, x);
                if r.deflationary.is_none() && !frame.le(c, bx, x) {
                    r.deflationary = Some(name(c, x));
                }
                if r.four.is_none() && !frame.le(c, bx, self.box_at(c, bx)) {
                    r.four = Some(name(c, x));
                }
                if r.idempotent.is_none() && self.box_at(c, bx) != bx {
                    r.idempotent = Some(name(c, x));
                }
                for y in 0..frame.size(c) {
                    let w = || format!("{}, {}", name(c, x), name(c, y));
                    if r.meets.is_none() && self.box_at(c, frame.meet(c, x, y)) != frame.meet(c, bx, self.box_at(c, y)) {
                        r.meets = Some(w());
                    }
                    if r.monotone.is_none() && frame.le(c, x, y) && !frame.le(c, bx, self.box_at(c, y)) {
                        r.monotone = Some(w());
                    }
                    // K: □(x => y) /\ □x <= □y
                    if r.k.is_none()
                        && !frame.le(c, frame.meet(c, self.box_at(c, frame.imp(c, x, y)), bx), self.box_at(c, y))
                    {
                        r.k = Some(w());
                    }
                }
            }
        }
        for f in base.arrow_ids() {
            let (d, c) = (base.dom(f), base.cod(f));
            for x in 0..frame.size(c) {
                if r.natural.is_none() && frame.restrict(f, self.box_at(c, x)) != self.box_at(d, frame.restrict(f, x)) {
                    r.natural = Some(format!("{} along {}", name(c, x), base.arrow_name(f)));
                }
            }
        }
        r
    }
}

/// First failing element for each S4 law, if any.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct S4Report {
    pub deflationary: Option<String>,
    pub four: Option<String>,
    pub idempotent: Option<String>,
    pub meets: Option<String>,
    pub monotone: Option<String>,
    pub k: Option<String>,
    pub box_top: Option<String>,
    pub natural: Option<String>,
}

impl S4Report {
    pub fn entries(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("T: box x <= x", &self.deflationary),
            ("4: box x <= box box x", &self.four),
            ("idempotent", &self.idempotent),
            ("box preserves meets", &self.meets),
            ("monotone", &self.monotone),
            ("K: box(x => y) /\\ box x <= box y", &self.k),
            ("necessitation: box top = top", &self.box_top),
            ("box is natural", &self.natural),
        ]
    }

    pub fn passed(&self) -> bool {
        self.entries().iter().all(|(_, w)| w.is_none())
    }
}

pub fn canonical_i(frame: &InternalFrame) -> Result<NatTransform, FrameError> {
    FrameMaps::canonical(frame)?.i_nat(frame)
}

pub fn tau_of(frame: &InternalFrame, maps: &FrameMaps) -> Result<NatTransform, FrameError> {
    maps.tau_nat(frame)
}

pub fn box_of(frame: &InternalFrame, maps: &FrameMaps) -> Result<NatTransform, FrameError> {
    maps.box_nat(frame)
}

/// Every frame map `Ω -> H`, found by filtering all natural
/// transformations. Used as the uniqueness oracle for `i`.
pub fn enumerate_frame_maps(frame: &InternalFrame) -> Result<Vec<NatTransform>, FrameError> {
    let om = omega(frame.base())?;
    let all = enumerate_nats(om.presheaf(), frame.carrier())?;
    Ok(all
        .into_iter()
        .filter(|j| frame_map_defect(frame, &om, j.components()).is_none())
        .collect())
}

/// Checks that the canonical `i` is the only frame map.
pub fn check_unique_i(frame: &InternalFrame, maps: &FrameMaps) -> Result<(), FrameError> {
    let found = enumerate_frame_maps(frame)?;
    if found.len() != 1 || found[0].components() != maps.i.as_slice() {
        return Err(FrameError::UniquenessViolation(found.len()));
    }
    Ok(())
}

/// `Δ_I : H -> H^I`, `Δ_C(x)_X(h, a) = H(h)(x)`.
pub fn diag_delta(frame: &InternalFrame, i: &Arc<Presheaf>) -> Result<(Arc<Exponential>, NatTransform), FrameError> {
    let exp = exponential(i, frame.carrier())?;
    let base = frame.base();
    let mut comps = Vec::with_capacity(base.num_objects());
    for c in base.objects() {
        let mut col = Vec::with_capacity(frame.size(c));
        for x in 0..frame.size(c) {
            col.push(
                exp.lookup_with(c, |h, _| frame.restrict(h, x))
                    .ok_or_else(|| FrameError::NotAFrameMap("constant family is not natural".into()))?,
            );
        }
        comps.push(col);
    }
    let t = NatTransform::new(frame.carrier().clone(), exp.presheaf().clone(), comps)?;
    Ok((exp, t))
}

fn quantifier(frame: &InternalFrame, exp: &Exponential, universal: bool) -> Result<NatTransform, FrameError> {
    if exp.codomain() != frame.carrier() {
        return Err(PresheafError::ShapeMismatch("quantifier expects an exponential of H".into()).into());
    }
    let base = frame.base();
    let dom = exp.domain();
    let comps = base
        .objects()
        .map(|c| {
            (0..exp.presheaf().size(c))
                .map(|eta| {
                    let bound = |h: ArrowId| {
                        let x = base.dom(h);
                        let vals = (0..dom.size(x)).map(|b| exp.value(c, eta, h, b));
                        if universal {
                            frame.meet_all(x, vals)
                        } else {
                            frame.join_all(x, vals)
                        }
                    };
                    if universal {
                        frame.forall_from_bounds(c, bound)
                    } else {
                        frame.exists_from_bounds(c, bound)
                    }
                })
                .collect()
        })
        .collect();
    Ok(NatTransform::new(exp.presheaf().clone(), frame.carrier().clone(), comps)?)
}

/// `∀_C(η) = ⋁{s | H(h)(s) <= η_X(h, b) for all h: X -> C, b in I(X)}`.
pub fn forall_i(frame: &InternalFrame, exp: &Exponential) -> Result<NatTransform, FrameError> {
    quantifier(frame, exp, true)
}

/// `∃_C(η) = ⋀{s | η_X(h, b) <= H(h)(s) for all h: X -> C, b in I(X)}`.
pub fn exists_i(frame: &InternalFrame, exp: &Exponential) -> Result<NatTransform, FrameError> {
    quantifier(frame, exp, false)
}

/// Pointwise order on `H^I(C)`.
pub fn exp_le(frame: &InternalFrame, exp: &Exponential, c: ObjId, eta: usize, mu: usize) -> bool {
    let base = frame.base();
    let (t, u) = (exp.table(c, eta), exp.table(c, mu));
    base.objects().all(|x| {
        base.hom(x, c).iter().all(|&h| {
            (0..exp.domain().size(x)).all(|b| {
                let s = exp.slot(c, h, b);
                frame.le(x, t[s], u[s])
            })
        })
    })
}

/// First violation of `∃ ⊣ Δ ⊣ ∀` at some `(C, η, x)`.
pub fn adjunction_defect(frame: &InternalFrame, i: &Arc<Presheaf>) -> Result<Option<String>, FrameError> {
    let (exp, delta) = diag_delta(frame, i)?;
    let all = forall_i(frame, &exp)?;
    let ex = exists_i(frame, &exp)?;
    let base = frame.base();
    for c in base.objects() {
        for eta in 0..exp.presheaf().size(c) {
            for x in 0..frame.size(c) {
                let dx = delta.apply(c, x);
                if exp_le(frame, &exp, c, dx, eta) != frame.le(c, x, all.apply(c, eta)) {
                    return Ok(Some(format!(
                        "Δ ⊣ ∀ at `{}`: eta = {}, x = {}",
                        base.object_name(c),
                        exp.presheaf().element_name(c, eta),
                        frame.element_name(c, x)
                    )));
                }
                if exp_le(frame, &exp, c, eta, dx) != frame.le(c, ex.apply(c, eta), x) {
                    return Ok(Some(format!(
                        "∃ ⊣ Δ at `{}`: eta = {}, x = {}",
                        base.object_name(c),
                        exp.presheaf().element_name(c, eta),
                        frame.element_name(c, x)
                    )));
                }
            }
        }
    }
    Ok(None)
}

/// `τ(x => y) = δ_H(x, x /\ y)` at every object and pair.
pub fn imp_lemma_defect(frame: &InternalFrame, maps: &FrameMaps) -> Option<String> {
    let base = frame.base();
    for c in base.objects() {
        for x in 0..frame.size(c) {
            for y in 0..frame.size(c) {
                let lhs = maps.tau_mask(c, frame.imp(c, x, y));
                let rhs = delta_mask(frame.carrier(), c, x, frame.meet(c, x, y));
                if lhs != rhs {
                    return Some(format!(
                        "at `{}`: x = {}, y = {}",
                        base.object_name(c),
                        frame.element_name(c, x),
                        frame.element_name(c, y)
                    ));
                }
            }
        }
    }
    None
}

/// The mask of the maximal sieve, re-exported for callers that only hold a
/// frame.
pub fn top_mask(frame: &InternalFrame, c: ObjId) -> Mask {
    maximal(frame.base(), c)
}

impl InternalFrame {
    /// Kind of arrow-set reading available, if any.
    pub fn arrow_set_kind(&self) -> Option<ArrowSetKind> {
        self.arrow_sets.as_ref().map(|a| a.kind())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::bits_label;
    use crate::presheaf::tests::{arrow_base, loop_graph};
    use crate::presheaf::yoneda;

    fn terminal_base() -> Arc<FiniteCategory> {
        Arc::new(FiniteCategory::terminal())
    }

    #[test]
    fn builtin_frames_validate() {
        for base in [arrow_base(), terminal_base()] {
            InternalFrame::omega(&base).unwrap();
            InternalFrame::omega_star(&base).unwrap();
        }
        InternalFrame::powerset(&terminal_base(), 3).unwrap();
    }

    #[test]
    fn meet_replaced_by_join_fails_unit_law() {
        let base = arrow_base();
        let f = InternalFrame::omega_star(&base).unwrap();
        let mut t = f.tables().clone();
        t.meet = t.join.clone();
        let err = validate_frame(f.carrier().clone(), t, FrameKind::Custom("broken".into())).unwrap_err();
        match err {
            FrameError::HeytingAxiomFailure { axiom, .. } => assert_eq!(axiom, "x /\\ top = x"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn canonical_i_examples() {
        let base = arrow_base();
        let om = InternalFrame::omega(&base).unwrap();
        let m = FrameMaps::canonical(&om).unwrap();
        for c in base.objects() {
            for s in 0..om.size(c) {
                assert_eq!(m.i_at(c, s), s);
                assert_eq!(m.box_at(c, s), s);
            }
        }
        let os = InternalFrame::omega_star(&base).unwrap();
        let m = FrameMaps::canonical(&os).unwrap();
        let sets = os.arrow_sets().unwrap().clone();
        for c in base.objects() {
            for (k, &s) in m.omega().masks(c).iter().enumerate() {
                assert_eq!(sets.mask(c, m.i_at(c, k)), s);
            }
        }
        check_unique_i(&os, &m).unwrap();
        m.check_faithful(&os).unwrap();
        let d = base.object("D").unwrap();
        let one_d = sets.at(d, bit(base.identity(d)));
        assert_eq!(m.tau_mask(d, one_d), 0);
        assert_eq!(sets.mask(d, m.box_at(d, one_d)), 0);
    }

    #[test]
    fn powerset_maps() {
        let t = terminal_base();
        let p = InternalFrame::powerset(&t, 2).unwrap();
        let m = FrameMaps::canonical(&p).unwrap();
        let c = ObjId(0);
        let om = m.omega().clone();
        assert_eq!(p.element_name(c, m.i_at(c, om.top(c))), "{0,1}");
        assert_eq!(p.element_name(c, m.i_at(c, om.bot(c))), "{}");
        for u in 0..4 {
            assert_eq!(m.tau_at(c, u) == om.top(c), u == 3);
        }
        check_unique_i(&p, &m).unwrap();
    }

    #[test]
    fn constant_powerset_over_arrow_is_unfaithful() {
        let base = arrow_base();
        let p = InternalFrame::powerset(&base, 1).unwrap();
        let m = FrameMaps::canonical(&p).unwrap();
        assert!(matches!(m.check_faithful(&p), Err(FrameError::FaithfulnessFailure { .. })));
    }

    #[test]
    fn labelled_quantifier_values() {
        let base = arrow_base();
        let g = loop_graph();
        let d = base.object("D").unwrap();
        let garr = base.arrow_by_name("g").unwrap();
        let order = [garr, base.identity(d)];
        for (frame, expected) in [
            (InternalFrame::omega_star(&base).unwrap(), "01"),
            (InternalFrame::omega(&base).unwrap(), "00"),
        ] {
            let (exp, delta) = diag_delta(&frame, &g).unwrap();
            let sets = frame.arrow_sets().unwrap().clone();
            // Δ_D(xy) = xxy
            for x in 0..frame.size(d) {
                let eta = delta.apply(d, x);
                let u = 0;
                let w = g.element_index(base.object("C").unwrap(), "w").unwrap();
                let c = base.object("C").unwrap();
                let xy = bits_label(sets.mask(d, x), &order);
                let at_u = bits_label(sets.mask(d, exp.value(d, eta, base.identity(d), u)), &order);
                let y = if sets.mask(c, exp.value(d, eta, garr, w)) != 0 { "1" } else { "0" };
                let label = format!("{}{}{}", &at_u[..1], y, &at_u[1..]);
                assert_eq!(label, format!("{}{}", &xy[..1], xy));
            }
            // the element labelled 101: (1_D, u) -> 11, (g, w) -> 0
            let c = base.object("C").unwrap();
            let w = g.element_index(c, "w").unwrap();
            let found: Vec<usize> = (0..exp.presheaf().size(d))
                .filter(|&eta| {
                    bits_label(sets.mask(d, exp.value(d, eta, base.identity(d), 0)), &order) == "11"
                        && sets.mask(c, exp.value(d, eta, garr, w)) == 0
                })
                .collect();
            assert_eq!(found.len(), 1);
            let all = forall_i(&frame, &exp).unwrap();
            assert_eq!(bits_label(sets.mask(d, all.apply(d, found[0])), &order), expected);
        }
    }

    #[test]
    fn adjoint_triple_on_small_instances() {
        let base = arrow_base();
        let d = base.object("D").unwrap();
        for frame in [InternalFrame::omega(&base).unwrap(), InternalFrame::omega_star(&base).unwrap()] {
            for i in [terminal(&base), loop_graph(), yoneda(&base, d)] {
                assert_eq!(adjunction_defect(&frame, &i).unwrap(), None);
            }
        }
    }

    #[test]
    fn powerset_forall_is_intersection() {
        let t = terminal_base();
        let p = InternalFrame::powerset(&t, 2).unwrap();
        let i = Arc::new(Presheaf::constant(t.clone(), &["a".into(), "b".into(), "c".into()]).unwrap());
        let (exp, _) = diag_delta(&p, &i).unwrap();
        let all = forall_i(&p, &exp).unwrap();
        let ex = exists_i(&p, &exp).unwrap();
        let c = ObjId(0);
        for eta in 0..exp.presheaf().size(c) {
            let vals: Vec<usize> = (0..3).map(|b| exp.eval(c, eta, b)).collect();
            assert_eq!(all.apply(c, eta), vals.iter().fold(3, |a, &v| a & v));
            assert_eq!(ex.apply(c, eta), vals.iter().fold(0, |a, &v| a | v));
        }
    }

    #[test]
    fn imp_lemma_on_builtins() {
        let base = arrow_base();
        for frame in [InternalFrame::omega(&base).unwrap(), InternalFrame::omega_star(&base).unwrap()] {
            let m = FrameMaps::canonical(&frame).unwrap();
            assert_eq!(imp_lemma_defect(&frame, &m), None);
            assert!(m.s4_report(&frame).passed());
        }
    }

    #[test]
    fn corrupted_tau_breaks_t_axiom() {
        let base = arrow_base();
        let frame = InternalFrame::omega_star(&base).unwrap();
        let m = FrameMaps::canonical(&frame).unwrap();
        let d = base.object("D").unwrap();
        let bad = m.with_corrupted_tau(d, frame.bot(d), m.omega().top(d));
        let r = bad.s4_report(&frame);
        assert!(r.deflationary.is_some());
    }
}

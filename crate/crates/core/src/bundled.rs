//! Built-in base categories, frames and models.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::fincat::{CategorySpec, FiniteCategory};
use crate::frame::{FrameError, InternalFrame};
use crate::presheaf::Presheaf;
use crate::semantics::{Model, SemanticsError};
use crate::syntax::Type;

pub const BASE_NAMES: [&str; 4] = ["terminal", "arrow", "chain3", "square"];

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// `C --g--> D`.
pub fn arrow() -> Arc<FiniteCategory> {
    Arc::new(
        FiniteCategory::validate(&CategorySpec {
            objects: strings(&["C", "D"]),
            arrows: vec![("g".into(), "C".into(), "D".into())],
            ..Default::default()
        })
        .expect("arrow category"),
    )
}

/// `w0 <= w1 <= w2`, with an arrow `wj -> wk` for `j <= k`.
pub fn chain3() -> Arc<FiniteCategory> {
    let w = strings(&["w0", "w1", "w2"]);
    let mut rel = Vec::new();
    for a in 0..3 {
        for b in a..3 {
            rel.push((w[a].clone(), w[b].clone()));
        }
    }
    Arc::new(FiniteCategory::from_preorder(&w, &rel, false).expect("chain"))
}

/// The product order on `{0,1} x {0,1}`, objects `00, 01, 10, 11`.
pub fn square() -> Arc<FiniteCategory> {
    let objs = strings(&["00", "01", "10", "11"]);
    let le = |a: &str, b: &str| a.chars().zip(b.chars()).all(|(x, y)| x <= y);
    let mut rel = Vec::new();
    for a in &objs {
        for b in &objs {
            if le(a, b) {
                rel.push((a.clone(), b.clone()));
            }
        }
    }
    Arc::new(FiniteCategory::from_preorder(&objs, &rel, false).expect("square"))
}

pub fn base(name: &str) -> Option<Arc<FiniteCategory>> {
    match name {
        "terminal" => Some(Arc::new(FiniteCategory::terminal())),
        "arrow" => Some(arrow()),
        "chain3" => Some(chain3()),
        "square" => Some(square()),
        _ => None,
    }
}

pub fn bases() -> Vec<(&'static str, Arc<FiniteCategory>)> {
    BASE_NAMES.iter().map(|&n| (n, base(n).expect("bundled base"))).collect()
}

/// `omega`, `omega_star`, or `powerset<n>` (terminal base only, as other
/// bases make the constant powerset unfaithful).
pub fn frame(name: &str, base: &Arc<FiniteCategory>) -> Result<InternalFrame, FrameError> {
    match name {
        "omega" => InternalFrame::omega(base),
        "omega_star" => InternalFrame::omega_star(base),
        other => match other.strip_prefix("powerset").and_then(|n| n.parse::<usize>().ok()) {
            Some(n) => InternalFrame::powerset(base, n),
            None => Err(FrameError::Unsupported(format!("unknown frame `{other}`"))),
        },
    }
}

/// The bundled frames over a bundled base.
pub fn frames(base_name: &str, base: &Arc<FiniteCategory>) -> Vec<InternalFrame> {
    let mut out = vec![
        InternalFrame::omega(base).expect("omega"),
        InternalFrame::omega_star(base).expect("omega_star"),
    ];
    if base_name == "terminal" {
        for n in 2..=4 {
            out.push(InternalFrame::powerset(base, n).expect("powerset"));
        }
    }
    out
}

/// `G(C) = {v, w}`, `G(D) = {u}`, `G(g)(u) = v`.
pub fn loop_graph(base: &Arc<FiniteCategory>) -> Arc<Presheaf> {
    let sets = BTreeMap::from([("C".to_string(), strings(&["v", "w"])), ("D".to_string(), strings(&["u"]))]);
    let restr = BTreeMap::from([("g".to_string(), BTreeMap::from([("u".to_string(), "v".to_string())]))]);
    Arc::new(Presheaf::from_named(base.clone(), &sets, &restr).expect("loop graph"))
}

fn constant(base: &Arc<FiniteCategory>, n: usize, prefix: &str) -> Arc<Presheaf> {
    let names: Vec<String> = (0..n).map(|k| format!("{prefix}{k}")).collect();
    Arc::new(Presheaf::constant(base.clone(), &names).expect("constant presheaf"))
}

/// The loop-graph model over `Ω_*`. The two elements of `G^G(D)` are
/// aliased `eta` (sending `(g, w)` to `v`) and `mu` (sending it to `w`).
pub fn loop_graph_model() -> Model {
    loop_graph_model_with("omega_star")
}

/// The loop-graph model over `Ω`, where function extensionality holds.
pub fn loop_graph_omega_model() -> Model {
    loop_graph_model_with("omega")
}

fn loop_graph_model_with(frame_name: &str) -> Model {
    let base = arrow();
    let fr = frame(frame_name, &base).expect("frame");
    let name = if frame_name == "omega" { "loopgraph-omega" } else { "loopgraph" };
    let mut m = Model::new(name, fr, BTreeMap::from([("G".to_string(), loop_graph(&base))])).expect("loop graph model");
    let (d, c) = (base.object("D").expect("D"), base.object("C").expect("C"));
    let g = base.arrow_by_name("g").expect("g");
    let gp = m.base_types()["G"].clone();
    let w = gp.element_index(c, "w").expect("w");
    let exp = m.exp_of(&Type::base("G"), &Type::base("G")).expect("G^G");
    for e in 0..exp.presheaf().size(d) {
        let alias = if gp.element_name(c, exp.value(d, e, g, w)) == "v" { "eta" } else { "mu" };
        let canonical = exp.presheaf().element_name(d, e).to_string();
        m.add_alias(d, &canonical, alias);
    }
    m
}

/// `P(X)` with `|X| = n` over the terminal category, with a two-element
/// base type `A`.
pub fn powerset_model(n: usize) -> Result<Model, SemanticsError> {
    let base = Arc::new(FiniteCategory::terminal());
    let fr = InternalFrame::powerset(&base, n)?;
    Model::new(&format!("powerset{n}"), fr, BTreeMap::from([("A".to_string(), constant(&base, 2, "a"))]))
}

/// The arrow base over `Ω_*` with `G` constant of size `n`.
pub fn constant_domain_model(n: usize) -> Result<Model, SemanticsError> {
    let base = arrow();
    let fr = InternalFrame::omega_star(&base)?;
    Model::new(&format!("constant{n}"), fr, BTreeMap::from([("G".to_string(), constant(&base, n, "a"))]))
}

fn chain_domain(base: &Arc<FiniteCategory>) -> Arc<Presheaf> {
    let sets = BTreeMap::from([
        ("w0".to_string(), strings(&["a", "b", "c"])),
        ("w1".to_string(), strings(&["a", "b"])),
        ("w2".to_string(), strings(&["a"])),
    ]);
    let id = |xs: &[&str]| xs.iter().map(|x| (x.to_string(), x.to_string())).collect::<BTreeMap<_, _>>();
    let restr = BTreeMap::from([
        ("w1<=w2".to_string(), id(&["a"])),
        ("w0<=w1".to_string(), id(&["a", "b"])),
    ]);
    Arc::new(Presheaf::from_named(base.clone(), &sets, &restr).expect("chain domain"))
}

/// The 3-chain over `Ω` with a domain growing towards `w0`:
/// `M(w2) = {a}`, `M(w1) = {a, b}`, `M(w0) = {a, b, c}`.
pub fn chain_model() -> Model {
    let base = chain3();
    let m = chain_domain(&base);
    let fr = InternalFrame::omega(&base).expect("omega");
    Model::new("chain3", fr, BTreeMap::from([("M".to_string(), m)])).expect("chain model")
}

/// The same chain and domain over `Ω_*`, the geometric Kripke model used
/// for forcing. Not part of [`models`]: `P^P` has 16384 elements at `w2`,
/// beyond exhaustive two-variable checks.
pub fn chain_kripke_model() -> Model {
    let base = chain3();
    let m = chain_domain(&base);
    let fr = InternalFrame::omega_star(&base).expect("omega_star");
    Model::new("chain3-kripke", fr, BTreeMap::from([("M".to_string(), m)])).expect("chain model")
}

/// The square poset over `Ω` with a two-element constant type `A`.
pub fn square_model() -> Model {
    let base = square();
    let fr = InternalFrame::omega(&base).expect("omega");
    Model::new("square", fr, BTreeMap::from([("A".to_string(), constant(&base, 2, "a"))])).expect("square model")
}

pub const MODEL_NAMES: [&str; 6] = ["loopgraph", "loopgraph-omega", "powerset2", "constant2", "chain3", "square"];

pub fn model(name: &str) -> Option<Model> {
    Some(match name {
        "loopgraph" => loop_graph_model(),
        "loopgraph-omega" => loop_graph_omega_model(),
        "chain3" => chain_model(),
        "chain3-kripke" => chain_kripke_model(),
        "square" => square_model(),
        other => {
            if let Some(n) = other.strip_prefix("powerset").and_then(|n| n.parse().ok()) {
                powerset_model(n).ok()?
            } else if let Some(n) = other.strip_prefix("constant").and_then(|n| n.parse().ok()) {
                constant_domain_model(n).ok()?
            } else {
                return None;
            }
        }
    })
}

/// Every bundled model, in a fixed order.
pub fn models() -> Vec<Model> {
    MODEL_NAMES.iter().map(|n| model(n).expect("bundled model")).collect()
}

/// The constant powerset frame over the arrow base: a valid frame whose
/// canonical map from `Ω` is not injective.
pub fn unfaithful_frame() -> InternalFrame {
    InternalFrame::powerset(&arrow(), 1).expect("constant powerset")
}

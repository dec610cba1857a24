//! TOML documents for categories, presheaves, frames and models.
//!
//! Every document carries `kind = "category" | "presheaf" | "frame" |
//! "model"` and a `category`, given inline or as a bundled base name.
//!
//! ```toml
//! kind = "model"
//! name = "loopgraph"
//! category = "arrow"            # or an inline [category] table
//! frame = "omega_star"          # or an inline [frame] table
//!
//! [types.G]
//! sets = { C = ["v", "w"], D = ["u"] }
//! restrict = { g = { u = "v" } }
//!
//! [[aliases]]
//! object = "D"
//! type = "G^G"
//! element = "<canonical name>"
//! alias = "eta"
//! ```
//!
//! Inline categories list `objects`, `[[category.arrows]]` with `name`,
//! `dom`, `cod`, optional `identities` and `[[category.composites]]` with
//! `outer`, `inner`, `result` for `outer . inner = result`. Identities
//! are implicit and named `1_X`.
//!
//! An inline frame gives a `carrier` presheaf and tables by element name:
//! `top` and `bot` map objects to elements, `meet`, `join`, `imp` map
//! objects to square tables in the carrier's element order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::bundled;
use crate::fincat::{CategoryError, CategorySpec, FiniteCategory};
use crate::frame::{validate_frame, FrameError, FrameKind, FrameTables, InternalFrame};
use crate::presheaf::{Presheaf, PresheafError};
use crate::semantics::{Model, SemanticsError};
use crate::syntax::{parse_type, ParseError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowDoc {
    name: String,
    dom: String,
    cod: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompositeDoc {
    outer: String,
    inner: String,
    result: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryDoc {
    objects: Vec<String>,
    #[serde(default)]
    arrows: Vec<ArrowDoc>,
    #[serde(default)]
    identities: BTreeMap<String, String>,
    #[serde(default)]
    composites: Vec<CompositeDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CategoryRef {
    Builtin(String),
    Inline(CategoryDoc),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PresheafDoc {
    sets: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    restrict: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameDoc {
    #[serde(default)]
    name: Option<String>,
    carrier: PresheafDoc,
    top: BTreeMap<String, String>,
    bot: BTreeMap<String, String>,
    meet: BTreeMap<String, Vec<Vec<String>>>,
    join: BTreeMap<String, Vec<Vec<String>>>,
    imp: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FrameRef {
    Builtin(String),
    Inline(Box<FrameDoc>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantDoc {
    #[serde(rename = "type")]
    ty: String,
    elements: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AliasDoc {
    object: String,
    #[serde(rename = "type")]
    ty: String,
    element: String,
    alias: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    kind: String,
    #[serde(default)]
    name: Option<String>,
    category: CategoryRef,
    #[serde(default)]
    presheaf: Option<PresheafDoc>,
    #[serde(default)]
    frame: Option<FrameRef>,
    #[serde(default)]
    types: BTreeMap<String, PresheafDoc>,
    #[serde(default)]
    constants: BTreeMap<String, ConstantDoc>,
    #[serde(default)]
    aliases: Vec<AliasDoc>,
}

/// A validated document.
pub enum Loaded {
    Category(Arc<FiniteCategory>),
    Presheaf(Arc<Presheaf>),
    Frame(InternalFrame),
    Model(Model),
}

impl Loaded {
    pub fn kind(&self) -> &'static str {
        match self {
            Loaded::Category(_) => "category",
            Loaded::Presheaf(_) => "presheaf",
            Loaded::Frame(_) => "frame",
            Loaded::Model(_) => "model",
        }
    }
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

fn category(r: &CategoryRef) -> Result<Arc<FiniteCategory>, FormatError> {
    match r {
        CategoryRef::Builtin(name) => bundled::base(name).ok_or_else(|| invalid(format!("unknown bundled category `{name}`"))),
        CategoryRef::Inline(doc) => {
            let spec = CategorySpec {
                objects: doc.objects.clone(),
                arrows: doc.arrows.iter().map(|a| (a.name.clone(), a.dom.clone(), a.cod.clone())).collect(),
                identities: doc.identities.clone(),
                composites: doc.composites.iter().map(|c| (c.outer.clone(), c.inner.clone(), c.result.clone())).collect(),
            };
            Ok(Arc::new(FiniteCategory::validate(&spec)?))
        }
    }
}

fn presheaf(base: &Arc<FiniteCategory>, doc: &PresheafDoc) -> Result<Arc<Presheaf>, FormatError> {
    Ok(Arc::new(Presheaf::from_named(base.clone(), &doc.sets, &doc.restrict)?))
}

fn frame(base: &Arc<FiniteCategory>, r: &FrameRef) -> Result<InternalFrame, FormatError> {
    let doc = match r {
        FrameRef::Builtin(name) => return Ok(bundled::frame(name, base)?),
        FrameRef::Inline(doc) => doc,
    };
    let carrier = presheaf(base, &doc.carrier)?;
    let objects: Vec<_> = base.objects().collect();
    let per_object = |what: &str, m: &BTreeMap<String, String>| -> Result<Vec<usize>, FormatError> {
        objects
            .iter()
            .map(|&c| {
                let o = base.object_name(c);
                let e = m.get(o).ok_or_else(|| invalid(format!("`{what}` has no entry for `{o}`")))?;
                Ok(carrier.element_index(c, e)?)
            })
            .collect()
    };
    let table = |what: &str, m: &BTreeMap<String, Vec<Vec<String>>>| -> Result<Vec<Vec<usize>>, FormatError> {
        objects
            .iter()
            .map(|&c| {
                let o = base.object_name(c);
                let rows = m.get(o).ok_or_else(|| invalid(format!("`{what}` has no table for `{o}`")))?;
                let n = carrier.size(c);
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(invalid(format!("`{what}` at `{o}` must be {n} x {n}")));
                }
                let mut flat = Vec::with_capacity(n * n);
                for row in rows {
                    for e in row {
                        flat.push(carrier.element_index(c, e)?);
                    }
                }
                Ok(flat)
            })
            .collect()
    };
    let tables = FrameTables {
        top: per_object("top", &doc.top)?,
        bot: per_object("bot", &doc.bot)?,
        meet: table("meet", &doc.meet)?,
        join: table("join", &doc.join)?,
        imp: table("imp", &doc.imp)?,
    };
    let kind = FrameKind::Custom(doc.name.clone().unwrap_or_else(|| "custom".into()));
    Ok(validate_frame(carrier, tables, kind)?)
}

/// Parses and validates one document.
pub fn load_str(src: &str) -> Result<Loaded, FormatError> {
    let doc: Document = toml::from_str(src)?;
    let base = category(&doc.category)?;
    let only = |allowed: &[&str]| -> Result<(), FormatError> {
        let present = [
            ("presheaf", doc.presheaf.is_some()),
            ("frame", doc.frame.is_some()),
            ("types", !doc.types.is_empty()),
            ("constants", !doc.constants.is_empty()),
            ("aliases", !doc.aliases.is_empty()),
            ("name", doc.name.is_some()),
        ];
        match present.iter().find(|(k, p)| *p && !allowed.contains(k)) {
            Some((k, _)) => Err(invalid(format!("`{k}` is not allowed in a {} document", doc.kind))),
            None => Ok(()),
        }
    };
    match doc.kind.as_str() {
        "category" => {
            only(&[])?;
            Ok(Loaded::Category(base))
        }
        "presheaf" => {
            only(&["presheaf"])?;
            let p = doc.presheaf.as_ref().ok_or_else(|| invalid("missing `presheaf` table"))?;
            Ok(Loaded::Presheaf(presheaf(&base, p)?))
        }
        "frame" => {
            only(&["frame"])?;
            let f = doc.frame.as_ref().ok_or_else(|| invalid("missing `frame`"))?;
            Ok(Loaded::Frame(frame(&base, f)?))
        }
        "model" => {
            only(&["frame", "types", "constants", "aliases", "name"])?;
            let f = doc.frame.as_ref().ok_or_else(|| invalid("missing `frame`"))?;
            let fr = frame(&base, f)?;
            let mut types = BTreeMap::new();
            for (n, p) in &doc.types {
                if n == "P" {
                    return Err(invalid("`P` is the type of propositions"));
                }
                types.insert(n.clone(), presheaf(&base, p)?);
            }
            let mut m = Model::new(doc.name.as_deref().unwrap_or("model"), fr, types)?;
            for a in &doc.aliases {
                let ty = parse_type(&a.ty)?;
                let p = m.interp_type(&ty)?;
                let c = base.object(&a.object)?;
                p.element_index(c, &a.element)?;
                m.add_alias(c, &a.element, &a.alias);
            }
            for (n, k) in &doc.constants {
                m = m.with_constant(n, parse_type(&k.ty)?, &k.elements)?;
            }
            Ok(Loaded::Model(m))
        }
        other => Err(invalid(format!("unknown document kind `{other}`"))),
    }
}

pub fn load_path(path: &Path) -> Result<Loaded, FormatError> {
    let src = std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    load_str(&src)
}

/// A model document, or a bundled model name.
pub fn load_model(arg: &str) -> Result<Model, FormatError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(m) = bundled::model(arg) {
            return Ok(m);
        }
    }
    match load_path(path)? {
        Loaded::Model(m) => Ok(m),
        other => Err(invalid(format!("`{arg}` is a {} document, expected a model", other.kind()))),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical category document. Loading it and writing it again gives
/// the same text.
pub fn category_to_toml(cat: &FiniteCategory) -> String {
    let spec = cat.to_spec();
    let mut out = String::from("kind = \"category\"\n\n[category]\n");
    let objs: Vec<String> = spec.objects.iter().map(|o| quote(o)).collect();
    let _ = writeln!(out, "objects = [{}]", objs.join(", "));
    if !spec.identities.is_empty() {
        let ids: Vec<String> = spec.identities.iter().map(|(o, a)| format!("{} = {}", quote(o), quote(a))).collect();
        let _ = writeln!(out, "identities = {{ {} }}", ids.join(", "));
    }
    for (name, dom, cod) in &spec.arrows {
        let _ = write!(out, "\n[[category.arrows]]\nname = {}\ndom = {}\ncod = {}\n", quote(name), quote(dom), quote(cod));
    }
    for (outer, inner, result) in &spec.composites {
        let _ = write!(
            out,
            "\n[[category.composites]]\nouter = {}\ninner = {}\nresult = {}\n",
            quote(outer),
            quote(inner),
            quote(result)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_categories_round_trip() {
        for (_, b) in bundled::bases() {
            let text = category_to_toml(&b);
            let Loaded::Category(c) = load_str(&text).unwrap() else { panic!("kind") };
            assert_eq!(category_to_toml(&c), text);
            assert_eq!(c.to_spec(), b.to_spec());
        }
    }

    #[test]
    fn loop_graph_document() {
        let src = r#"
kind = "model"
name = "lg"
category = "arrow"
frame = "omega_star"
[types.G]
sets = { C = ["v", "w"], D = ["u"] }
restrict = { g = { u = "v" } }
"#;
        let Loaded::Model(m) = load_str(src).unwrap() else { panic!("kind") };
        assert_eq!(m.name(), "lg");
        assert_eq!(m.base_types()["G"].total_size(), 3);
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(matches!(load_str("kind = \"model\"\ncategory = \"arrow\"\nbogus = 1"), Err(FormatError::Toml(_))));
        assert!(matches!(load_str("kind = \"thing\"\ncategory = \"arrow\""), Err(FormatError::Invalid(_))));
        assert!(matches!(load_str("kind = \"category\"\ncategory = \"nope\""), Err(FormatError::Invalid(_))));
    }
}

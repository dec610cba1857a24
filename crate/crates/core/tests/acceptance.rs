//! The ten acceptance criteria, each under its own time limit. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use modal_topos::bundled;
use modal_topos::corpus::{formula_corpus, TermGen, DEFAULT_SEED};
use modal_topos::forcing::agreement_defect;
use modal_topos::presheaf::{count_nats, enumerate_nats, exponential, product, terminal, yoneda};
use modal_topos::suites::{self, arrow_presheaves, CheckReport};
use modal_topos::syntax::{parse_context, parse_term, substitute, Context, Term, Type};
use modal_topos::{InternalFrame, KripkeFrame, Model, Presheaf};

type Outcome = Result<String, String>;

fn require(report: &CheckReport, names: &[&str]) -> Result<(), String> {
    for n in names {
        let item = report
            .items
            .iter()
            .find(|i| i.name.starts_with(n))
            .ok_or_else(|| format!("{}: no item `{n}`", report.name))?;
        if !item.ok() {
            return Err(format!("{}: {}", report.name, item.name));
        }
    }
    Ok(())
}

fn all_ok(r: &CheckReport) -> Result<(), String> {
    if r.passed() {
        Ok(())
    } else {
        Err(r.render())
    }
}

fn e<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Criterion 1: the loop-graph values of equality, quantified pointwise
/// equality and `τ`.
fn loop_graph_values() -> Outcome {
    let r = suites::fun_ext_counterexample().map_err(e)?;
    require(
        &r,
        &[
            "eta and mu differ",
            "i_D (delta_{G^G})_D (eta, mu) = {}",
            "forall_D ((i delta_G)^G)_D (eta, mu) = {1_D}",
            "tau_D ({1_D}) = {}",
        ],
    )?;
    Ok("i delta = {}, forall = {1_D}, tau = {}".into())
}

/// Criterion 2: sizes of the two subobject objects and the bit labels.
fn labels() -> Outcome {
    let r = suites::fun_ext_counterexample().map_err(e)?;
    require(
        &r,
        &["|Omega(D)| = 3 and |Omega_*(D)| = 4", "(delta^G)_D (eta, mu) is labelled 101", "forall_D (101) = 01", "forall_D (101) = 00"],
    )?;
    Ok("3/4 elements, 101 -> 01 over Omega_*, 00 over Omega".into())
}

/// Criterion 3: the propositional-extensionality counterexample.
fn prop_ext() -> Outcome {
    for n in 2..=5 {
        all_ok(&suites::prop_ext_counterexample(n).map_err(e)?)?;
    }
    Ok("|X| = 2..5".into())
}

/// Criterion 4: the canonical frame map over every bundled base and frame.
fn initial_frames() -> Outcome {
    let mut count = 0;
    for (name, base) in bundled::bases() {
        for f in bundled::frames(name, &base) {
            all_ok(&suites::frame_suite(&f, name).map_err(e)?)?;
            count += 1;
        }
    }
    Ok(format!("{count} frame/base pairs"))
}

/// Criterion 5: the S4 suite on every bundled model.
fn s4() -> Outcome {
    let ms = bundled::models();
    for m in &ms {
        all_ok(&suites::s4_suite(m).map_err(e)?)?;
    }
    Ok(format!("{} models", ms.len()))
}

/// Criterion 6: quantifier adjoints and the function-extensionality lemma.
fn adjoints() -> Outcome {
    let arrow = bundled::arrow();
    let d = arrow.object("D").map_err(e)?;
    let indices = vec![
        ("1".to_string(), terminal(&arrow)),
        ("G".to_string(), bundled::loop_graph(&arrow)),
        ("yD".to_string(), yoneda(&arrow, d)),
    ];
    let small = arrow_presheaves(&arrow, 3).map_err(e)?;
    let mut pairs = 0;
    for f in [InternalFrame::omega(&arrow).map_err(e)?, InternalFrame::omega_star(&arrow).map_err(e)?] {
        all_ok(&suites::adjoint_suite(&f, &indices).map_err(e)?)?;
        for x in &small {
            for y in &small {
                if let Some(w) = suites::funext_lemma_defect(&f, x, y).map_err(e)? {
                    return Err(format!("funext lemma over {}: {w}", f.kind()));
                }
                pairs += 1;
            }
        }
    }
    Ok(format!("3 index presheaves, {pairs} (X, Y) pairs"))
}

fn corpus(atoms: &[&str], qvar: &str, qty: Type, extra: usize) -> Result<Vec<Term>, String> {
    let atoms: Vec<Term> = atoms.iter().map(|a| parse_term(a).map_err(e)).collect::<Result<_, _>>()?;
    Ok(formula_corpus(&atoms, qvar, &qty, extra, DEFAULT_SEED))
}

fn agree_on(m: &Model, ctx: &Context, formulas: &[Term]) -> Result<(), String> {
    for phi in formulas {
        let (phi, _) = m.elaborate(ctx, phi).map_err(e)?;
        if let Some((c, y)) = agreement_defect(m, ctx, &phi).map_err(e)? {
            let b = m.bindings(ctx, c, y).map_err(e)?;
            return Err(format!("{} disagrees at {} with {b:?}: {phi}", m.name(), m.base().object_name(c)));
        }
    }
    Ok(())
}

/// Criterion 7: direct forcing agrees with the clause-by-clause relation.
fn forcing() -> Outcome {
    let lg = bundled::loop_graph_model();
    let lctx = parse_context("f:G^G, g:G^G, y:G, p:P, S:P^G").map_err(e)?;
    let lf = corpus(&["f @ y = g @ y", "p", "y in S", "f = g"], "y", Type::base("G"), 300)?;
    agree_on(&lg, &lctx, &lf)?;
    let ch = bundled::chain_kripke_model();
    let cctx = parse_context("x:M, y:M, p:P, q:P").map_err(e)?;
    let cf = corpus(&["x = y", "p", "q"], "x", Type::base("M"), 300)?;
    agree_on(&ch, &cctx, &cf)?;
    let kr = KripkeFrame::chain(3).map_err(e)?.model().map_err(e)?;
    let kctx = parse_context("p:P, q:P, r:P").map_err(e)?;
    let kf = corpus(&["p", "q", "r"], "p", Type::Prop, 300)?;
    agree_on(&kr, &kctx, &kf)?;
    Ok(format!("{} formulas over 3 models", lf.len() + cf.len() + kf.len()))
}

/// Criterion 8: the soundness sweep and the designated countermodels.
fn soundness() -> Outcome {
    let mut rendered = Vec::new();
    for m in bundled::models() {
        let r = suites::soundness_suite(&m, 2, suites::DEFAULT_GUARD).map_err(e)?;
        all_ok(&r)?;
        for star in ["(*) modalized function extensionality", "(*) modalized propositional extensionality"] {
            require(&r, &[star])?;
            let it = r.items.iter().find(|i| i.name == star).expect("present");
            if !it.held {
                return Err(format!("{star} fails on {}", m.name()));
            }
        }
        let plain = |name: &str| r.items.iter().find(|i| i.name == name).map(|i| i.held).expect("present");
        let (fx, px) = (plain("plain function extensionality"), plain("plain propositional extensionality"));
        let (want_fx, want_px) = match m.name() {
            "loopgraph" => (false, false),
            "constant2" => (true, false),
            "powerset2" => (true, false),
            _ => (true, true),
        };
        if (fx, px) != (want_fx, want_px) {
            return Err(format!("{}: plain funext {fx}, plain propext {px}", m.name()));
        }
        rendered.push(r.render());
    }
    for n in 1..=3 {
        all_ok(&suites::constant_domain_check(n).map_err(e)?)?;
    }
    let again = suites::soundness_suite(&bundled::loop_graph_model(), 2, suites::DEFAULT_GUARD).map_err(e)?;
    if again.render() != rendered[0] {
        return Err("soundness report is not deterministic".into());
    }
    Ok(format!("{} models, constant domains 1..3", rendered.len()))
}

/// Criterion 9: substitution lemma, beta and eta on generated terms.
fn substitution() -> Outcome {
    let m = bundled::loop_graph_model();
    let ctx = parse_context("x:G, f:G^G, p:P, S:P^G").map_err(e)?;
    let g = m.context_product(&ctx).map_err(e)?;
    let atoms = vec![Type::base("G"), Type::Prop, Type::Unit];
    let targets = [
        Type::Prop,
        Type::base("G"),
        Type::exp(Type::Prop, Type::base("G")),
        Type::exp(Type::base("G"), Type::base("G")),
        Type::prod(Type::base("G"), Type::Prop),
    ];
    let mut gen = TermGen::new(DEFAULT_SEED, atoms.clone());
    for k in 0..500 {
        let a = atoms[k % atoms.len()].clone();
        let b = targets[k % targets.len()].clone();
        let ext = ctx.extended("z", a.clone());
        let t = gen.term(&ext, &b, 3);
        let s = gen.term(&ctx, &a, 2);
        let (t_el, _) = m.elaborate(&ext, &t).map_err(e)?;
        let (s_el, _) = m.elaborate(&ctx, &s).map_err(e)?;
        let sub = substitute(&t, "z", &s);
        let (sub_el, _) = m.elaborate(&ctx, &sub).map_err(e)?;
        let t_tab = m.table(&ext, &t_el).map_err(e)?;
        let s_tab = m.table(&ctx, &s_el).map_err(e)?;
        let sub_tab = m.table(&ctx, &sub_el).map_err(e)?;
        let pa = m.interp_type(&a).map_err(e)?;
        for c in m.base().objects() {
            for y in 0..g.presheaf().size(c) {
                let extended = y * pa.size(c) + s_tab[c.0][y];
                if sub_tab[c.0][y] != t_tab[c.0][extended] {
                    return Err(format!("substitution lemma fails for {t} with z := {s}"));
                }
            }
        }
        let beta = Term::app(Term::lam("z", a.clone(), t.clone()), s.clone());
        let (beta_el, _) = m.elaborate(&ctx, &beta).map_err(e)?;
        if *m.table(&ctx, &beta_el).map_err(e)? != *sub_tab {
            return Err(format!("beta fails for {beta}"));
        }
        let h = gen.term(&ctx, &Type::exp(b.clone(), a.clone()), 2);
        let eta = Term::lam("z", a.clone(), Term::app(h.clone(), Term::var("z")));
        let (h_el, _) = m.elaborate(&ctx, &h).map_err(e)?;
        let (eta_el, _) = m.elaborate(&ctx, &eta).map_err(e)?;
        if m.table(&ctx, &h_el).map_err(e)? != m.table(&ctx, &eta_el).map_err(e)? {
            return Err(format!("eta fails for {h}"));
        }
    }
    Ok("500 terms".into())
}

/// Criterion 10: `|Hom(F x A, B)| = |Hom(F, B^A)|` for small triples.
fn exponential_counts() -> Outcome {
    let arrow = bundled::arrow();
    let classes: Vec<Arc<Presheaf>> = arrow_presheaves(&arrow, 10).map_err(e)?;
    let mut triples = 0;
    for f in &classes {
        for a in &classes {
            for b in &classes {
                if f.total_size() + a.total_size() + b.total_size() > 10 {
                    continue;
                }
                let fa = product(f, a).map_err(e)?;
                let ba = exponential(a, b).map_err(e)?;
                let lhs = count_nats(fa.presheaf(), b).map_err(e)?;
                let rhs = count_nats(f, ba.presheaf()).map_err(e)?;
                if lhs != rhs {
                    return Err(format!("{lhs} vs {rhs} for sizes {}, {}, {}", f.total_size(), a.total_size(), b.total_size()));
                }
                if lhs <= 64 {
                    let listed = enumerate_nats(fa.presheaf(), b).map_err(e)?.len() as u64;
                    let listed_t = enumerate_nats(f, ba.presheaf()).map_err(e)?.len() as u64;
                    if (listed, listed_t) != (lhs, rhs) {
                        return Err("enumeration and counting disagree".into());
                    }
                }
                triples += 1;
            }
        }
    }
    Ok(format!("{triples} triples over {} isomorphism classes", classes.len()))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 loop-graph values", Duration::from_secs(1), loop_graph_values),
        ("2 subobject sizes and labels", Duration::from_secs(1), labels),
        ("3 propositional extensionality counterexample", Duration::from_secs(5), prop_ext),
        ("4 canonical frame map", Duration::from_secs(60), initial_frames),
        ("5 S4 suite", Duration::from_secs(10), s4),
        ("6 adjoint formulas", Duration::from_secs(60), adjoints),
        ("7 forcing agreement", Duration::from_secs(120), forcing),
        ("8 soundness suite", Duration::from_secs(120), soundness),
        ("9 substitution, beta, eta", Duration::from_secs(60), substitution),
        ("10 exponential transpose counts", Duration::from_secs(60), exponential_counts),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let t0 = Instant::now();
        let outcome = run();
        let took = t0.elapsed();
        let (status, detail) = match &outcome {
            Ok(d) if took < limit => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over the {limit:?} limit")),
            Err(w) => ("FAIL", w.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {name} ({took:.2?}): {detail}");
    }
    if failed > 0 {
        eprintln!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}

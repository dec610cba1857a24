//! Randomized and exhaustive checks of structural invariants.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use modal_topos::bundled;
use modal_topos::corpus::TermGen;
use modal_topos::formats::{category_to_toml, load_str, Loaded};
use modal_topos::frame::FrameMaps;
use modal_topos::omega::{classify, subobject_of, Subpresheaf};
use modal_topos::presheaf::{count_nats, enumerate_nats, exponential, product, transpose, untranspose, Presheaf};
use modal_topos::suites::{self, arrow_presheaves};
use modal_topos::syntax::{desugar, parse_context, substitute, typecheck, Context, Term, Type};
use modal_topos::{FiniteCategory, ObjId};

/// Reflexive-transitive closure of `edges` on `0..n`.
fn closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (k, row) in r.iter_mut().enumerate() {
        row[k] = true;
    }
    for &(a, b) in edges {
        r[a % n][b % n] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

fn preorder(n: usize, edges: &[(usize, usize)]) -> (Vec<String>, Vec<(String, String)>) {
    let names: Vec<String> = (0..n).map(|k| format!("p{k}")).collect();
    let r = closure(n, edges);
    let mut rel = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if r[i][j] {
                rel.push((names[i].clone(), names[j].clone()));
            }
        }
    }
    (names, rel)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn preorder_categories_are_associative_and_round_trip(
        n in 1usize..5,
        edges in proptest::collection::vec((0usize..5, 0usize..5), 0..6),
    ) {
        let (names, rel) = preorder(n, &edges);
        let cat = FiniteCategory::from_preorder(&names, &rel, false).unwrap();
        // associativity on every composable triple
        for f in cat.arrow_ids() {
            for g in cat.arrow_ids() {
                for h in cat.arrow_ids() {
                    if let (Some(gf), Some(hg)) = (cat.compose(g, f), cat.compose(h, g)) {
                        prop_assert_eq!(cat.compose(h, gf), cat.compose(hg, f));
                    }
                }
            }
        }
        // arrows_into partitions the arrows
        let mut seen = BTreeSet::new();
        for c in cat.objects() {
            for &a in cat.arrows_into(c) {
                prop_assert!(seen.insert(a));
                prop_assert_eq!(cat.cod(a), c);
            }
        }
        prop_assert_eq!(seen.len(), cat.num_arrows());
        // the underlying relation is recovered
        let mut back: Vec<(String, String)> = cat
            .arrow_ids()
            .map(|a| (cat.object_name(cat.dom(a)).to_string(), cat.object_name(cat.cod(a)).to_string()))
            .collect();
        back.sort();
        let mut want = rel.clone();
        want.sort();
        prop_assert_eq!(back, want);
        // documents round-trip bit-exactly
        let text = category_to_toml(&cat);
        let Loaded::Category(again) = load_str(&text).unwrap() else { panic!("kind") };
        prop_assert_eq!(category_to_toml(&again), text);
    }

    #[test]
    fn substitution_preserves_types_and_desugaring_is_idempotent(seed in any::<u64>()) {
        let m = bundled::loop_graph_model();
        let sig = m.signature();
        let ctx = parse_context("x:G, f:G^G, p:P").unwrap();
        let mut gen = TermGen::new(seed, vec![Type::base("G"), Type::Prop, Type::Unit]);
        let a = gen.pick_atom();
        let b = gen.pick_atom();
        let ext = ctx.extended("z", a.clone());
        let t = gen.term(&ext, &b, 3);
        let s = gen.term(&ctx, &a, 2);
        prop_assert_eq!(typecheck(&sig, &ext, &t).unwrap(), b.clone());
        prop_assert_eq!(typecheck(&sig, &ctx, &substitute(&t, "z", &s)).unwrap(), b.clone());
        let d = desugar(&t);
        prop_assert_eq!(desugar(&d).clone(), d.clone());
        prop_assert_eq!(typecheck(&sig, &ext, &d).unwrap(), b);
    }

    #[test]
    fn box_forcing_is_stable_under_restriction(seed in any::<u64>()) {
        let m = bundled::chain_kripke_model();
        let ctx = parse_context("x:M, p:P").unwrap();
        let mut gen = TermGen::new(seed, vec![Type::base("M"), Type::Prop]);
        let phi = Term::boxed(gen.term(&ctx, &Type::Prop, 2));
        let (phi, _) = m.elaborate(&ctx, &phi).unwrap();
        let g = m.context_product(&ctx).unwrap();
        let base = m.base();
        for c in base.objects() {
            for y in 0..g.presheaf().size(c) {
                if modal_topos::forces_direct(&m, &ctx, &phi, c, y).unwrap() {
                    for &f in base.arrows_into(c) {
                        let z = g.presheaf().restrict(f, y);
                        prop_assert!(modal_topos::forces_direct(&m, &ctx, &phi, base.dom(f), z).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn currying_is_a_bijection_on_small_presheaves() {
    let base = bundled::arrow();
    let classes = arrow_presheaves(&base, 3).unwrap();
    for f in &classes {
        for a in &classes {
            for b in &classes {
                let fa = product(f, a).unwrap();
                let ba = exponential(a, b).unwrap();
                let maps = enumerate_nats(fa.presheaf(), b).unwrap();
                let mut images = BTreeSet::new();
                for alpha in &maps {
                    alpha.check_natural().unwrap();
                    let t = transpose(alpha, &fa, &ba).unwrap();
                    t.check_natural().unwrap();
                    let back = untranspose(&t, &fa, &ba).unwrap();
                    assert_eq!(back.components(), alpha.components());
                    images.insert(t.components().to_vec());
                }
                assert_eq!(images.len() as u64, count_nats(f, ba.presheaf()).unwrap());
            }
        }
    }
}

#[test]
fn products_satisfy_the_universal_property() {
    let base = bundled::arrow();
    let classes = arrow_presheaves(&base, 3).unwrap();
    for x in &classes {
        for f in &classes {
            for a in &classes {
                let fa = product(f, a).unwrap();
                let lhs = count_nats(x, fa.presheaf()).unwrap();
                assert_eq!(lhs, count_nats(x, f).unwrap() * count_nats(x, a).unwrap());
            }
        }
    }
}

#[test]
fn classification_is_a_bijection() {
    let base = bundled::arrow();
    for om in [modal_topos::omega(&base).unwrap(), modal_topos::omega_star(&base).unwrap()] {
        for p in arrow_presheaves(&base, 4).unwrap() {
            let p: Arc<Presheaf> = p;
            // every closed family, by brute force over member bits
            let total = p.total_size();
            let mut subs = 0u64;
            for bits in 0u32..(1 << total) {
                let mut k = 0;
                let members: Vec<Vec<bool>> = base
                    .objects()
                    .map(|c| {
                        (0..p.size(c))
                            .map(|_| {
                                k += 1;
                                bits >> (k - 1) & 1 == 1
                            })
                            .collect()
                    })
                    .collect();
                let Ok(s) = Subpresheaf::new(p.clone(), members.clone()) else { continue };
                subs += 1;
                let chi = classify(&s, &om).unwrap();
                assert_eq!(subobject_of(&chi, &om).unwrap().members(), &members[..]);
            }
            if om.presheaf().size(ObjId(1)) == 3 {
                assert_eq!(subs, count_nats(&p, om.presheaf()).unwrap());
            }
        }
    }
}

#[test]
fn galois_and_retraction_on_bundled_frames() {
    for (name, base) in bundled::bases() {
        for f in bundled::frames(name, &base) {
            let maps = FrameMaps::canonical(&f).unwrap();
            maps.check_galois(&f).unwrap();
            for c in base.objects() {
                for s in 0..maps.omega().masks(c).len() {
                    assert_eq!(maps.tau_at(c, maps.i_at(c, s)), s, "tau i = 1 over {name}");
                }
            }
        }
    }
}

#[test]
fn monotone_rule_on_enumerated_predicates() {
    let m = bundled::loop_graph_model();
    let g = m.base_types()["G"].clone();
    let frame = m.frame();
    let preds = enumerate_nats(&g, frame.carrier()).unwrap();
    for phi in &preds {
        for psi in &preds {
            let below = |a: &modal_topos::NatTransform, b: &modal_topos::NatTransform, boxed: bool| {
                m.base().objects().all(|c| {
                    (0..g.size(c)).all(|x| {
                        let (u, v) = (a.apply(c, x), b.apply(c, x));
                        if boxed {
                            frame.le(c, m.maps().box_at(c, u), m.maps().box_at(c, v))
                        } else {
                            frame.le(c, u, v)
                        }
                    })
                })
            };
            if below(phi, psi, false) {
                assert!(below(phi, psi, true));
            }
        }
    }
}

#[test]
fn suites_are_deterministic_and_detect_faults() {
    let m = bundled::loop_graph_model();
    let a = suites::soundness_suite(&m, 2, suites::DEFAULT_GUARD).unwrap().render();
    let b = suites::soundness_suite(&m, 2, suites::DEFAULT_GUARD).unwrap().render();
    assert_eq!(a, b);
    let d = m.base().object("D").unwrap();
    let bad = m.clone().with_maps_unchecked(m.maps().with_corrupted_tau(d, m.frame().bot(d), m.maps().omega().top(d)));
    let r = suites::soundness_suite(&bad, 2, suites::DEFAULT_GUARD).unwrap();
    let t = r.items.iter().find(|i| i.name.starts_with("S4 T")).unwrap();
    assert!(!t.ok() && t.witness.is_some(), "{}", r.render());
}

#[test]
fn modal_principles_hold_where_plain_ones_fail() {
    let lg = suites::fun_ext_counterexample().unwrap();
    let get = |r: &modal_topos::CheckReport, n: &str| r.items.iter().find(|i| i.name == n).unwrap().held;
    assert!(!get(&lg, "plain function extensionality"));
    assert!(get(&lg, "modalized function extensionality"));
    for n in 2..=5 {
        let r = suites::prop_ext_counterexample(n).unwrap();
        assert!(!get(&r, "plain propositional extensionality"));
        assert!(get(&r, "modalized propositional extensionality"));
    }
}

#[test]
fn contexts_print_and_parse() {
    let ctx = Context::from_vars(vec![("f".into(), Type::exp(Type::base("G"), Type::base("G"))), ("p".into(), Type::Prop)]).unwrap();
    assert_eq!(parse_context(&ctx.to_string()).unwrap(), ctx);
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn repo(rel: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", rel].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modal-topos")).args(args).env_remove("MODAL_TOPOS_SIZE_GUARD").output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

const FUNEXT: &str = "forall y:G. f @ y = g @ y";
const FG: &str = "f:G^G, g:G^G";

#[test]
fn validate_bundle_and_failures() {
    let good: Vec<String> = ["arrow.category", "loopgraph.model", "loopgraph-omega.model", "constant2.model", "powerset2.model", "chain3.model"]
        .iter()
        .map(|f| repo(&format!("models/{f}")))
        .collect();
    let refs: Vec<&str> = std::iter::once("validate").chain(good.iter().map(String::as_str)).collect();
    assert_eq!(code(&run(&refs)), 0);

    let o = run(&["validate", &repo("models/broken-naturality.frame")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("NonNaturalStructureMap") && stdout(&o).contains("along `g`"), "{}", stdout(&o));

    let o = run(&["validate", &repo("models/unfaithful.model")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FaithfulnessFailure"));

    assert_eq!(code(&run(&["validate", "no/such/file.model"])), 2);
}

#[test]
fn validate_temporary_documents() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.model");
    std::fs::write(&bad, "kind = \"model\"\ncategory = [").unwrap();
    assert_eq!(code(&run(&["validate", bad.to_str().unwrap()])), 2);
    let cat = dir.path().join("v.category");
    std::fs::write(
        &cat,
        "kind = \"category\"\n[category]\nobjects = [\"a\", \"b\", \"c\"]\n\
         [[category.arrows]]\nname = \"f\"\ndom = \"a\"\ncod = \"c\"\n\
         [[category.arrows]]\nname = \"g\"\ndom = \"b\"\ncod = \"c\"\n",
    )
    .unwrap();
    let o = run(&["--format", "structured", "validate", cat.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"][0]["valid"], true);
}

#[test]
fn force_examples() {
    let lg = repo("models/loopgraph.model");
    let bind = ["--context", FG, "--bind", "f=eta@D", "--bind", "g=mu@D"];
    let o = run(&[&["force", &lg, "D", FUNEXT][..], &bind[..]].concat());
    assert_eq!((code(&o), stdout(&o).trim()), (0, "true"));
    let boxed = format!("box ({FUNEXT})");
    let o = run(&[&["force", &lg, "D", &boxed, "--trace"][..], &bind[..]].concat());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("false\n"));
    assert!(stdout(&o).contains("C does not force"));
    let o = run(&["force", &lg, "D", "top"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "true"));
    // canonical names work as well as aliases
    let canon = ["--context", FG, "--bind", "f=[g.v>v,g.w>v,1_D.u>u]@D", "--bind", "g=mu@D"];
    assert_eq!(code(&run(&[&["force", &lg, "D", FUNEXT][..], &canon[..]].concat())), 0);
    // input errors
    assert_eq!(code(&run(&["force", &lg, "D", FUNEXT, "--context", FG, "--bind", "f=eta@D"])), 2);
    assert_eq!(code(&run(&["force", &lg, "E", "top"])), 2);
    assert_eq!(code(&run(&["force", &lg, "D", "top /\\"])), 2);
}

#[test]
fn check_theories() {
    let lg = repo("models/loopgraph.model");
    assert_eq!(code(&run(&["check", &lg, &repo("theories/modal-extensionality.theory")])), 0);
    let o = run(&["check", &lg, &repo("theories/plain-funext.theory")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("at D with [f=eta, g=mu]"), "{}", stdout(&o));
    assert_eq!(code(&run(&["check", &lg, &repo("theories/empty.theory")])), 0);
    assert_eq!(code(&run(&["check", "chain3", &repo("theories/s4.theory")])), 0);
}

#[test]
fn eval_prints_tables() {
    let o = run(&["eval", "loopgraph", "f", "--context", "f:G^G"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("at D:") && s.contains("[f=eta] |-> eta") && s.contains("[f=mu] |-> mu"), "{s}");
}

#[test]
fn size_guard_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_modal-topos"))
        .args(["eval", "loopgraph", "f", "--context", "f:G^G"])
        .env("MODAL_TOPOS_SIZE_GUARD", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["--size-guard", "0", "eval", "loopgraph", "top"])), 2);
}

#[test]
fn structured_output_is_stable() {
    let lg = repo("models/loopgraph.model");
    let args = ["--format", "structured", "check", &lg, &repo("theories/plain-funext.theory")];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["results"][0]["witnesses"][0]["object"], "D");
}

#[test]
fn paper_checks_pass_and_are_schedule_independent() {
    let one = run(&["--format", "structured", "--jobs", "1", "paper-checks"]);
    let two = run(&["--format", "structured", "--jobs", "2", "paper-checks"]);
    assert_eq!(code(&one), 0, "{}", stdout(&one));
    assert_eq!(one.stdout, two.stdout);
    let v: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    let anchors: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["anchor"].as_str().unwrap()).collect();
    for a in ["funext-counterexample", "propext-counterexample", "s4-laws", "constant-domain-funext", "deduction-rules"] {
        assert!(anchors.contains(&a), "{a}");
    }
}

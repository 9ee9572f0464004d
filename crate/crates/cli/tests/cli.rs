use std::path::PathBuf;
use std::process::{Command, Output};

use phylonet::gadgets::NdpInstance;
use phylonet::newick::{parse_unrooted_network, NewickDocument};
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn phylonet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phylonet")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn containment_no_on_the_cycle() {
    let (n, t) = (fixture("fig6N.txt"), fixture("fig6T.nwk"));
    for extra in [&[][..], &["--no-kernel"]] {
        let mut args = vec!["utc", "--network", &n, "--tree", &t];
        args.extend_from_slice(extra);
        let o = phylonet(&args);
        assert_eq!(o.status.code(), Some(1));
        assert_eq!(stdout(&o), "NO\n");
    }
}

#[test]
fn containment_yes_prints_an_image() {
    let n = fixture("fig6N.txt");
    let t = std::env::temp_dir().join(format!("phylonet-cli-yes-{}.nwk", std::process::id()));
    std::fs::write(&t, "(a,b,(c,(d,(e,f))));").unwrap();
    let o = phylonet(&["utc", "--network", &n, "--tree", t.to_str().unwrap()]);
    std::fs::remove_file(&t).unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("YES\nimage n"), "{text}");
    assert_eq!(text.lines().nth(1).unwrap().split(' ').count(), 1 + 11);
}

#[test]
fn unrooted_number_of_six_taxon_pair() {
    let o = phylonet(&["uhn", "--trees", &fixture("fig1.nwk")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("h_u = 1\n"));
    let body: String = text.lines().skip(1).take_while(|l| *l != "forest").map(|l| format!("{l}\n")).collect();
    assert_eq!(parse_unrooted_network(&body).unwrap().reticulation_number(), 1);
    let o = phylonet(&["uhn", "--trees", &fixture("fig1.nwk"), "--kmax", "0"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "NO\n"));
}

#[test]
fn root_uncertain_number_of_six_taxon_pair() {
    let o = phylonet(&["ruhn", "--trees", &fixture("fig1.nwk"), "--kmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("h_ru = 2\nroot T1 "));
    assert!(text.contains("\nroot T2 "));
    let o = phylonet(&["ruhn", "--trees", &fixture("fig1.nwk"), "--kmax", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rooted_number_of_six_taxon_pair() {
    let o = phylonet(&["hn", "--trees", &fixture("fig1_rooted.nwk"), "--kmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("h_r = 3\n"));
}

#[test]
fn exit_codes_for_errors_and_guards() {
    let o = phylonet(&["utc", "--network", "/nonexistent", "--tree", &fixture("fig6T.nwk")]);
    assert_eq!(o.status.code(), Some(2));
    let o = phylonet(&["utc", "--network", &fixture("fig1.nwk"), "--tree", &fixture("fig6T.nwk")]);
    assert_eq!(o.status.code(), Some(2));
    let o = phylonet(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = phylonet(&["uhn", "--trees", &fixture("fig1.nwk"), "--format", "log"]);
    assert_eq!(o.status.code(), Some(2));
    let o = phylonet(&["hn", "--trees", &fixture("fig1_rooted.nwk"), "--kmax", "3", "--hn-taxa", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = phylonet(&["oracle", "tbr", "--trees", &fixture("fig1.nwk"), "--tbr-taxa", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn guard_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_phylonet"))
        .args(["oracle", "utc", "--network", &fixture("fig6N.txt"), "--tree", &fixture("fig6T.nwk")])
        .env("PHYLONET_GUARD_ORACLE_EDGES", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn kernelize_reports_the_decision_and_log() {
    let o = phylonet(&["kernelize", "--network", &fixture("fig6N.txt"), "--tree", &fixture("fig6T.nwk")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("decided NO\n"));
    let o = phylonet(&["kernelize", "--network", &fixture("fig6N.txt"), "--tree", &fixture("fig6T.nwk"), "--format", "log"]);
    let log: phylonet::reduce::ReductionLog = stdout(&o).parse().unwrap();
    assert!(!log.steps.is_empty());
    let o = phylonet(&["kernelize", "--trees", &fixture("fig1.nwk"), "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("decided open\n"));
}

#[test]
fn oracles() {
    let o = phylonet(&["oracle", "tbr", "--trees", &fixture("fig1.nwk")]);
    assert_eq!(stdout(&o), "d_TBR = 1\n");
    let o = phylonet(&["oracle", "uhn", "--trees", &fixture("fig1.nwk"), "--kmax", "2"]);
    assert_eq!(stdout(&o), "h_u = 1\n");
    let o = phylonet(&["oracle", "ndp", "--instance", &fixture("ndp.txt")]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "YES\npath v0 v1 v2\n"));
}

#[test]
fn caterpillar_pair_parses_back() {
    let o = phylonet(&["gen-lemma4", "--trees", &fixture("three.nwk")]);
    assert_eq!(o.status.code(), Some(0));
    let doc = NewickDocument::parse(&stdout(&o)).unwrap();
    let trees = doc.trees(phylonet::newick::Mode::Unrooted).unwrap();
    assert_eq!(trees.len(), 2);
    assert_eq!(trees[0].0.as_deref(), Some("S1"));
}

#[test]
fn dot_output() {
    let o = phylonet(&["export-dot", "--input", &fixture("fig6N.txt")]);
    let text = stdout(&o);
    assert!(text.starts_with("graph network {\n") && text.ends_with("}\n"));
    assert_eq!(text.matches(" -- ").count(), 12);
    let o = phylonet(&["export-dot", "--input", &fixture("fig6T.nwk")]);
    assert_eq!(stdout(&o).matches(" -- ").count(), 9);
    let o = phylonet(&["ruhn", "--trees", &fixture("fig1.nwk"), "--kmax", "3", "--format", "dot"]);
    assert!(stdout(&o).starts_with("digraph network {\n"));
}

#[test]
fn selftest_reports_a_line() {
    let o = phylonet(&["selftest", "--criterion", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("criterion 2 PASS "));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_instances_parse_back(seed in any::<u64>(), nodes in 2u32..9) {
        let o = phylonet(&["gen-ndp", "--nodes", &nodes.to_string(), "--seed", &seed.to_string()]);
        prop_assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        let inst: NdpInstance = text.parse().unwrap();
        prop_assert_eq!(inst.to_string(), text);
        let again = phylonet(&["gen-ndp", "--nodes", &nodes.to_string(), "--seed", &seed.to_string()]);
        prop_assert_eq!(again.stdout, o.stdout);
    }
}

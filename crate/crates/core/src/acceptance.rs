//! Desk-scale acceptance checks, runnable from tests and the command line.
//! Each check returns an [`Outcome`] instead of panicking, so a failure is
//! reported with its detail and the remaining checks still run.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::gadgets::{backmap_restriction, hn_to_ruhn, ndp_brute, ndp_to_utc, random_ndp, CaterpillarLength};
use crate::hn::{hn_exact, uhn_exhaustive_oracle};
use crate::model::{root_at_edge, unroot, unrooted_caterpillar, RootedTree, UnrootedNetwork, UnrootedTree};
use crate::newick::parse_unrooted_tree;
use crate::random::{displayed_tree, rooted_tree, taxon_names, unrooted_network, unrooted_tree};
use crate::reduce::{apply_dcc_on, kernelize_ruhn, kernelize_utc};
use crate::ruhn::ruhn_exact;
use crate::uhn::{maf_exact, network_from_forest, tbr_bfs_oracle, uhn_solve};
use crate::utc::{rooted_tc, utc_oracle, utc_solve};
use crate::{Error, Limits};

/// Number of checks provided by this module; the determinism check lives in
/// the command-line crate.
pub const LIBRARY_CRITERIA: u8 = 9;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    /// One line: `criterion <id> PASS|FAIL <title>: <detail>`. Timing is
    /// left out so the line is reproducible.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {} {verdict} {}: {}", self.id, self.title, self.detail)
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "six-taxon value triple",
        2 => "cycle chain regression",
        3 => "containment oracle agreement",
        4 => "kernel size bounds",
        5 => "agreement forest cross-check",
        6 => "inequality chain",
        7 => "caterpillar construction adds one",
        8 => "back-map restriction",
        9 => "disjoint-paths gadget soundness",
        10 => "thread-count determinism",
        _ => "unknown",
    }
}

/// Runs library check `id` (1 to 9).
pub fn run(id: u8) -> Outcome {
    let start = Instant::now();
    let result = match id {
        1 => value_triple(),
        2 => cycle_regression(),
        3 => oracle_agreement(),
        4 => kernel_bounds(),
        5 => forest_cross_check(),
        6 => inequality_chain(),
        7 => plus_one(),
        8 => back_map(),
        9 => gadget_soundness(),
        _ => Err(Error::Invalid(format!("no library criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(Ok(detail)) => (true, detail),
        Ok(Err(why)) => (false, why),
        Err(e) => (false, format!("error: {e}")),
    };
    let (passed, detail) = match time_limit(id) {
        Some(limit) if elapsed > limit => (false, format!("{detail}; over the {}s budget", limit.as_secs())),
        _ => (passed, detail),
    };
    Outcome { id, title: title(id), passed, detail, elapsed }
}

fn time_limit(id: u8) -> Option<Duration> {
    let secs = match id {
        1 => 60,
        2 => 5,
        3 => 600,
        5 => 900,
        7 => 1800,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

/// `Ok(Ok(detail))` passes, `Ok(Err(why))` fails, `Err` is a library error.
type Check = Result<std::result::Result<String, String>>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Ok(Err(format!($($msg)+)));
        }
    };
}

const SIX_T1: &str = "((a,b),c,(d,(e,f)));";
const SIX_T2: &str = "((c,b),a,(f,(e,d)));";

fn leaf_edge(t: &UnrootedTree, taxon: &str) -> usize {
    t.incident(t.leaf(taxon).unwrap())[0]
}

fn value_triple() -> Check {
    let limits = Limits::default();
    let (t1, t2) = (parse_unrooted_tree(SIX_T1)?, parse_unrooted_tree(SIX_T2)?);
    let u = uhn_solve(&t1, &t2, &limits)?;
    ensure!(u.value == 1, "unrooted value {} instead of 1", u.value);
    ensure!(
        u.images[0].verifies_unrooted(&u.network, &t1) && u.images[1].verifies_unrooted(&u.network, &t2),
        "unrooted certificate does not verify"
    );
    for t in [&t1, &t2] {
        ensure!(utc_oracle(&u.network, t, &limits)?.is_some(), "oracle rejects the unrooted network");
    }
    let trees = [t1.clone(), t2.clone()];
    let ru = ruhn_exact(&trees, 3, &limits)?.ok_or(Error::Invalid("no root-uncertain solution up to 3".into()))?;
    ensure!(ru.value == 2, "root-uncertain value {} instead of 2", ru.value);
    for ((t, &e), img) in trees.iter().zip(&ru.rootings).zip(&ru.images) {
        ensure!(img.verifies_rooted(&ru.network, &root_at_edge(t, e)?), "root-uncertain certificate does not verify");
    }
    let rooted = [root_at_edge(&t1, leaf_edge(&t1, "a"))?, root_at_edge(&t2, leaf_edge(&t2, "e"))?];
    let hr = hn_exact(&rooted, 3, &limits)?.ok_or(Error::Invalid("no rooted solution up to 3".into()))?;
    ensure!(hr.value == 3, "rooted value {} instead of 3", hr.value);
    for (img, t) in hr.images.iter().zip(&rooted) {
        ensure!(img.verifies_rooted(&hr.network, t), "rooted certificate does not verify");
    }
    Ok(Ok(format!("h_u = {}, h_ru = {}, h_r = {}", u.value, ru.value, hr.value)))
}

/// Cycle through the given taxa, one pendant leaf per cycle node.
fn cycle(order: &[&str]) -> UnrootedNetwork {
    let mut n = UnrootedNetwork::new();
    let ring: Vec<_> = order.iter().map(|_| n.add_node()).collect();
    for (i, x) in order.iter().enumerate() {
        n.add_edge(ring[i], ring[(i + 1) % ring.len()]);
        let l = n.add_leaf(x);
        n.add_edge(ring[i], l);
    }
    n
}

fn cycle_regression() -> Check {
    let limits = Limits::default();
    let n = cycle(&["a", "b", "c", "d", "e", "f"]);
    let t = unrooted_caterpillar(&["a", "b", "c", "f", "e", "d"]);
    ensure!(!utc_solve(&n, &t, false)? && !utc_solve(&n, &t, true)?, "solver says YES");
    ensure!(utc_oracle(&n, &t, &limits)?.is_none(), "oracle says YES");
    let abc: Vec<String> = ["a", "b", "c"].map(String::from).to_vec();
    let def: Vec<String> = ["d", "e", "f"].map(String::from).to_vec();
    let (s1, _) = apply_dcc_on(&[n.clone(), t.clone()], &abc, 2)?;
    let (s2, _) = apply_dcc_on(&s1, &def, 2)?;
    ensure!(utc_oracle(&s2[0], &s2[1], &limits)?.is_some(), "length-2 truncation did not flip the answer");
    let (k, _) = kernelize_utc(&n, &t)?;
    let kernel_no = match k.decided {
        Some(d) => !d,
        None => utc_oracle(&k.network, &k.tree, &limits)?.is_none(),
    };
    ensure!(kernel_no, "kernel turned NO into YES");
    Ok(Ok("NO; truncation to 2 gives YES; kernel keeps NO".into()))
}

/// Random containment instances with at most 24 network edges and r <= 3;
/// every other one uses a displayed tree.
fn utc_suite(count: usize, seed: u64) -> Vec<(UnrootedNetwork, UnrootedTree)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let r = rng.gen_range(1..=3);
            let taxa = taxon_names(rng.gen_range(4..=(27 - 3 * r) / 2));
            let n = unrooted_network(&taxa, r, &mut rng);
            let t = if i % 2 == 0 { displayed_tree(&n, &mut rng) } else { unrooted_tree(&taxa, &mut rng) };
            (n, t)
        })
        .collect()
}

fn oracle_agreement() -> Check {
    let limits = Limits::default();
    let suite = utc_suite(500, 3);
    let mut yes = 0;
    for (i, (n, t)) in suite.iter().enumerate() {
        let truth = utc_oracle(n, t, &limits)?.is_some();
        ensure!(utc_solve(n, t, true)? == truth, "instance {i}: kernelized solver disagrees");
        ensure!(utc_solve(n, t, false)? == truth, "instance {i}: plain solver disagrees");
        yes += usize::from(truth);
    }
    Ok(Ok(format!("{} instances agree ({yes} YES)", suite.len())))
}

fn kernel_bounds() -> Check {
    let mut checked = 0;
    for (i, (n, t)) in utc_suite(500, 3).iter().enumerate() {
        let (k, _) = kernelize_utc(n, t)?;
        if k.decided.is_none() {
            let r = k.network.reticulation_number();
            ensure!(k.tree.taxon_count() <= (6 * r).max(4), "instance {i}: {} kernel taxa at r = {r}", k.tree.taxon_count());
            ensure!(k.network.edge_count() <= (15 * r).max(5), "instance {i}: {} kernel edges at r = {r}", k.network.edge_count());
            checked += 1;
        }
    }
    let mut rng = StdRng::seed_from_u64(4);
    let mut accepted = 0;
    for i in 0..200 {
        let taxa = taxon_names(rng.gen_range(4..=12));
        let trees: Vec<UnrootedTree> = (0..rng.gen_range(2..=3)).map(|_| unrooted_tree(&taxa, &mut rng)).collect();
        let k = rng.gen_range(1..=3);
        let (kern, _) = kernelize_ruhn(&trees, k)?;
        if kern.decided.is_none() {
            let size = kern.trees[0].taxon_count();
            ensure!(size < 20 * k * k, "set {i}: kernel of {size} taxa at k = {k}");
            accepted += 1;
        }
    }
    Ok(Ok(format!("{checked} containment kernels and {accepted} root-uncertain kernels within bounds")))
}

fn forest_cross_check() -> Check {
    let limits = Limits { oracle_edges: 40, ..Limits::default() };
    let mut rng = StdRng::seed_from_u64(5);
    let mut exhaustive = 0;
    for i in 0..200 {
        let taxa = taxon_names(rng.gen_range(3..=7));
        let (t1, t2) = (unrooted_tree(&taxa, &mut rng), unrooted_tree(&taxa, &mut rng));
        let f = maf_exact(&t1, &t2, &limits)?;
        let d = tbr_bfs_oracle(&t1, &t2, &limits)?;
        ensure!(f.len() - 1 == d, "pair {i}: forest gives {}, TBR search gives {d}", f.len() - 1);
        let (n, _, _) = network_from_forest(&t1, &t2, &f)?;
        ensure!(n.reticulation_number() == d, "pair {i}: network has r = {}", n.reticulation_number());
        for t in [&t1, &t2] {
            ensure!(utc_oracle(&n, t, &limits)?.is_some(), "pair {i}: oracle rejects the forest network");
        }
        if taxa.len() <= 6 {
            let k_max = limits.uhn_oracle_k;
            let oracle = uhn_exhaustive_oracle(&[t1, t2], k_max, &limits)?;
            ensure!(oracle == (d <= k_max).then_some(d), "pair {i}: exhaustive oracle gives {oracle:?}, expected {d}");
            exhaustive += 1;
        }
    }
    Ok(Ok(format!("200 pairs agree; {exhaustive} also match the exhaustive network oracle (up to r = 2)")))
}

fn inequality_chain() -> Check {
    let limits = Limits::default();
    let mut rng = StdRng::seed_from_u64(6);
    let mut strict = 0;
    for i in 0..100 {
        let taxa = taxon_names(rng.gen_range(3..=5));
        let rooted = [rooted_tree(&taxa, &mut rng), rooted_tree(&taxa, &mut rng)];
        let unrooted = [unroot(&rooted[0]), unroot(&rooted[1])];
        let hu = uhn_solve(&unrooted[0], &unrooted[1], &limits)?.value;
        let hr = hn_exact(&rooted, limits.hn_k, &limits)?.ok_or(Error::Invalid(format!("pair {i}: h_r above 3")))?.value;
        let hru = ruhn_exact(&unrooted, hr, &limits)?.map(|s| s.value);
        ensure!(hru.is_some_and(|v| hu <= v && v <= hr), "pair {i}: h_u {hu}, h_ru {hru:?}, h_r {hr}");
        strict += usize::from(hu < hru.unwrap() && hru.unwrap() < hr);
    }
    let t1 = parse_unrooted_tree(SIX_T1)?;
    let t2 = parse_unrooted_tree(SIX_T2)?;
    let hu = uhn_solve(&t1, &t2, &limits)?.value;
    let hru = ruhn_exact(&[t1.clone(), t2.clone()], 3, &limits)?.map(|s| s.value);
    let rooted = [root_at_edge(&t1, leaf_edge(&t1, "a"))?, root_at_edge(&t2, leaf_edge(&t2, "e"))?];
    let hr = hn_exact(&rooted, 3, &limits)?.map(|s| s.value);
    ensure!((hu, hru, hr) == (1, Some(2), Some(3)), "six-taxon chain is {hu}, {hru:?}, {hr:?}");
    Ok(Ok(format!("100 pairs satisfy the chain ({strict} strictly); the six-taxon pair gives 1 < 2 < 3")))
}

/// A rooted pair with its rooted value, the root-uncertain value of the
/// constructed pair, and the back-mapped network's reticulation counts.
#[derive(Clone, Debug)]
struct CaterpillarRun {
    rooted: usize,
    uncertain: Option<usize>,
    back: std::result::Result<(usize, usize, bool, bool), String>,
}

fn caterpillar_pairs() -> Vec<[RootedTree; 2]> {
    let shapes = ["((x,y),z);", "((x,z),y);", "((y,z),x);"];
    let parse = |s: &str| crate::newick::parse_rooted_tree(s).unwrap();
    let mut pairs: Vec<[RootedTree; 2]> =
        shapes.iter().flat_map(|a| shapes.iter().map(move |b| [parse(a), parse(b)])).collect();
    let mut rng = StdRng::seed_from_u64(7);
    let taxa = taxon_names(4);
    pairs.extend((0..20).map(|_| [rooted_tree(&taxa, &mut rng), rooted_tree(&taxa, &mut rng)]));
    pairs
}

fn caterpillar_runs() -> &'static Result<Vec<CaterpillarRun>> {
    static RUNS: OnceLock<Result<Vec<CaterpillarRun>>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let limits = Limits::default();
        caterpillar_pairs()
            .iter()
            .map(|pair| {
                let rooted = hn_exact(pair, limits.hn_k, &limits)?
                    .ok_or(Error::Invalid("rooted value above 3".into()))?
                    .value;
                let (s1, s2) = hn_to_ruhn(&pair[0], &pair[1], CaterpillarLength::Short)?;
                let sol = ruhn_exact(&[s1, s2], rooted + 1, &limits)?;
                let back = match &sol {
                    None => Err("no root-uncertain solution".to_string()),
                    Some(s) => match backmap_restriction(&s.network, &s.images[0], &s.images[1]) {
                        Err(e) => Err(e.to_string()),
                        Ok(b) => {
                            let valid = b.network.validate().is_ok()
                                && pair.iter().all(|t| rooted_tc(&b.network, t).is_ok_and(|i| i.is_some()));
                            Ok((b.p, b.q, b.stupid, valid))
                        }
                    },
                };
                Ok(CaterpillarRun { rooted, uncertain: sol.map(|s| s.value), back })
            })
            .collect()
    })
}

fn plus_one() -> Check {
    let runs = caterpillar_runs().as_ref().map_err(Clone::clone)?;
    for (i, r) in runs.iter().enumerate() {
        ensure!(r.uncertain == Some(r.rooted + 1), "pair {i}: h_r {}, constructed h_ru {:?}", r.rooted, r.uncertain);
    }
    Ok(Ok(format!("{} pairs (9 on 3 taxa, {} on 4 taxa) satisfy h_ru = h_r + 1", runs.len(), runs.len() - 9)))
}

fn back_map() -> Check {
    let runs = caterpillar_runs().as_ref().map_err(Clone::clone)?;
    for (i, r) in runs.iter().enumerate() {
        let (p, q, stupid, valid) = r.back.clone().map_err(Error::Lift)?;
        ensure!(valid, "pair {i}: back-mapped network invalid or missing an input tree");
        ensure!(p < q, "pair {i}: p = {p}, q = {q}");
        ensure!(!stupid && p == r.rooted, "pair {i}: back-mapped r = {p}, h_r = {}", r.rooted);
    }
    Ok(Ok(format!("{} back-maps valid with r = h_r and p < q", runs.len())))
}

fn gadget_soundness() -> Check {
    let limits = Limits { oracle_edges: 200, ..Limits::default() };
    let mut rng = StdRng::seed_from_u64(9);
    let (mut checked, mut drawn, mut yes) = (0, 0, 0);
    while checked < 50 {
        drawn += 1;
        let inst = random_ndp(rng.gen_range(3..=8), 3, &mut rng);
        let brute = ndp_brute(&inst)?.is_some();
        let g = match ndp_to_utc(&inst) {
            Ok(g) => g,
            Err(Error::TrivialNo(_)) => {
                ensure!(!brute, "draw {drawn}: signalled NO but paths exist");
                continue;
            }
            Err(e) => return Err(e),
        };
        if g.network.reticulation_number() > 7 {
            continue;
        }
        let contained = utc_oracle(&g.network, &g.tree, &limits)?.is_some();
        ensure!(contained == brute, "draw {drawn}: paths {brute}, containment {contained}");
        checked += 1;
        yes += usize::from(brute);
    }
    Ok(Ok(format!("50 instances agree ({yes} YES) out of {drawn} drawn; larger gadget networks skipped")))
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use phylonet::gadgets::{hn_to_ruhn, ndp_brute, ndp_to_utc, random_ndp, CaterpillarLength, NdpInstance};
use phylonet::hn::{hn_exact, uhn_exhaustive_oracle};
use phylonet::newick::{
    export_dot, export_dot_rooted, parse_rooted_network, parse_unrooted_network, parse_unrooted_tree, write_network,
    write_rooted_network, write_tree, Mode, NewickDocument, EDGE_LIST_HEADER,
};
use phylonet::reduce::{kernelize_ruhn, kernelize_utc};
use phylonet::ruhn::{edge_text, ruhn_exact};
use phylonet::uhn::{is_agreement_forest, tbr_bfs_oracle, uhn_solve};
use phylonet::utc::{utc_certificate, utc_oracle, utc_solve};
use phylonet::{root_at_edge, EdgeId, Error, Image, Limits, NodeId, RootedTree, UnrootedNetwork, UnrootedTree};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::{Command, Format, Oracle};

/// Text to print and whether the answer was YES/solved.
pub struct Report {
    pub text: String,
    pub yes: bool,
}

impl Report {
    fn yes(text: String) -> Self {
        Report { text, yes: true }
    }

    fn no(text: String) -> Self {
        Report { text, yes: false }
    }
}

pub fn run(command: &Command, format: Format, limits: &Limits) -> Result<Report> {
    if format == Format::Log && !matches!(command, Command::Utc { .. } | Command::Kernelize { .. }) {
        bail!(Error::Invalid("--format log applies to utc and kernelize only".into()));
    }
    match command {
        Command::Utc { network, tree, no_kernel } => utc(&read_network(network)?, &read_tree(tree)?, *no_kernel, format),
        Command::Uhn { trees, kmax } => uhn(trees, *kmax, format, limits),
        Command::Hn { trees, kmax } => hn(trees, *kmax, format, limits),
        Command::Ruhn { trees, kmax } => ruhn(trees, *kmax, format, limits),
        Command::Kernelize { network: Some(n), tree: Some(t), .. } => {
            kernelize_containment(&read_network(n)?, &read_tree(t)?, format)
        }
        Command::Kernelize { trees: Some(trees), k: Some(k), .. } => kernelize_uncertain(trees, *k, format),
        Command::Kernelize { .. } => bail!(Error::Invalid("kernelize needs --network and --tree, or --trees and --k".into())),
        Command::Oracle(o) => oracle(o, format, limits),
        Command::GenNdp { nodes, pairs, seed, gadget } => gen_ndp(*nodes as usize, *pairs as usize, *seed, *gadget, format),
        Command::GenLemma4 { trees, long } => gen_lemma4(trees, *long),
        Command::ExportDot { input, rooted } => export(input, *rooted),
        Command::Selftest { .. } => unreachable!("handled by the caller"),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_network(path: &Path) -> Result<UnrootedNetwork> {
    let text = read(path)?;
    let parsed = if text.trim_start().starts_with(EDGE_LIST_HEADER) {
        parse_unrooted_network(&text)
    } else {
        parse_unrooted_tree(&text)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn read_tree(path: &Path) -> Result<UnrootedTree> {
    parse_unrooted_tree(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Named trees of a multi-record file; unnamed records become `T1`, `T2`, ...
fn read_trees(path: &Path, mode: Mode) -> Result<Vec<(String, phylonet::newick::ParsedTree)>> {
    let doc = NewickDocument::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let trees = doc.trees(mode).with_context(|| format!("parsing {}", path.display()))?;
    ensure!(!trees.is_empty(), Error::Invalid(format!("{} holds no trees", path.display())));
    Ok(trees
        .into_iter()
        .enumerate()
        .map(|(i, (name, t))| (name.unwrap_or_else(|| format!("T{}", i + 1)), t))
        .collect())
}

fn unrooted_trees(path: &Path) -> Result<(Vec<String>, Vec<UnrootedTree>)> {
    let (names, trees) = read_trees(path, Mode::Unrooted)?.into_iter().unzip::<_, _, Vec<_>, Vec<_>>();
    let trees = trees.into_iter().map(|t| t.unrooted().expect("parsed unrooted")).collect();
    Ok((names, trees))
}

fn rooted_trees(path: &Path) -> Result<(Vec<String>, Vec<RootedTree>)> {
    let (names, trees) = read_trees(path, Mode::Rooted)?.into_iter().unzip::<_, _, Vec<_>, Vec<_>>();
    let trees = trees.into_iter().map(|t| t.rooted().expect("parsed rooted")).collect();
    Ok((names, trees))
}

fn two<T: Clone>(items: &[T]) -> Result<(T, T)> {
    match items {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => bail!(Error::Invalid(format!("exactly two trees are needed, found {}", items.len()))),
    }
}

/// Space-separated `u-v` list of the given edges, with nodes numbered as in
/// the edge-list output of the network.
fn unrooted_edge_text(n: &UnrootedNetwork, edges: &BTreeSet<EdgeId>) -> String {
    let mut num: BTreeMap<NodeId, usize> = BTreeMap::new();
    for (_, u, v) in n.edges() {
        for w in [u, v] {
            let k = num.len();
            num.entry(w).or_insert(k);
        }
    }
    edges
        .iter()
        .map(|&e| {
            let (u, v) = n.endpoints(e);
            format!("n{}-n{}", num[&u], num[&v])
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn checked_image(n: &UnrootedNetwork, t: &UnrootedTree, img: Option<Image>) -> Result<Option<Image>> {
    if let Some(i) = &img {
        ensure!(i.verifies_unrooted(n, t), "internal error: containment certificate does not verify");
    }
    Ok(img)
}

fn containment_report(n: &UnrootedNetwork, img: Option<Image>, format: Format) -> Report {
    match (img, format) {
        (Some(i), Format::Dot) => Report::yes(export_dot(n, Some(&i))),
        (Some(i), _) => Report::yes(format!("YES\nimage {}\n", unrooted_edge_text(n, &i.host_edges))),
        (None, Format::Dot) => Report::no(export_dot(n, None)),
        (None, _) => Report::no("NO\n".into()),
    }
}

fn utc(n: &UnrootedNetwork, t: &UnrootedTree, no_kernel: bool, format: Format) -> Result<Report> {
    if format == Format::Log {
        let (kernel, log) = kernelize_utc(n, t)?;
        return Ok(Report { text: log.to_string(), yes: kernel.decided != Some(false) });
    }
    let yes = utc_solve(n, t, !no_kernel)?;
    let img = if yes {
        let img = utc_certificate(n, t)?;
        ensure!(img.is_some(), "internal error: solver says YES but no certificate was found");
        img
    } else {
        None
    };
    Ok(containment_report(n, checked_image(n, t, img)?, format))
}

fn uhn(path: &Path, kmax: Option<usize>, format: Format, limits: &Limits) -> Result<Report> {
    let (_, trees) = unrooted_trees(path)?;
    let (t1, t2) = two(&trees)?;
    let sol = uhn_solve(&t1, &t2, limits)?;
    ensure!(
        sol.images[0].verifies_unrooted(&sol.network, &t1)
            && sol.images[1].verifies_unrooted(&sol.network, &t2)
            && is_agreement_forest(&t1, &t2, &sol.forest)?
            && sol.network.reticulation_number() == sol.value,
        "internal error: unrooted certificate does not verify"
    );
    if kmax.is_some_and(|k| sol.value > k) {
        return Ok(Report::no("NO\n".into()));
    }
    if format == Format::Dot {
        return Ok(Report::yes(export_dot(&sol.network, None)));
    }
    let mut text = format!("h_u = {}\n{}forest\n{}", sol.value, write_network(&sol.network), sol.forest);
    for (i, img) in sol.images.iter().enumerate() {
        writeln!(text, "image T{} {}", i + 1, unrooted_edge_text(&sol.network, &img.host_edges))?;
    }
    Ok(Report::yes(text))
}

fn hn(path: &Path, kmax: usize, format: Format, limits: &Limits) -> Result<Report> {
    let (names, trees) = rooted_trees(path)?;
    let Some(sol) = hn_exact(&trees, kmax, limits)? else {
        return Ok(Report::no("NO\n".into()));
    };
    ensure!(
        sol.images.iter().zip(&trees).all(|(i, t)| i.verifies_rooted(&sol.network, t))
            && sol.network.reticulation_number() == sol.value,
        "internal error: rooted certificate does not verify"
    );
    if format == Format::Dot {
        return Ok(Report::yes(export_dot_rooted(&sol.network, None)));
    }
    let all: BTreeSet<EdgeId> = sol.network.edges().map(|(e, _, _)| e).collect();
    let mut text = format!("h_r = {}\n{}\nedges {}\n", sol.value, write_rooted_network(&sol.network), edge_text(&sol.network, &all));
    for (img, name) in sol.images.iter().zip(&names) {
        writeln!(text, "image {name} {}", edge_text(&sol.network, &img.host_edges))?;
    }
    Ok(Report::yes(text))
}

fn ruhn(path: &Path, kmax: usize, format: Format, limits: &Limits) -> Result<Report> {
    let (names, trees) = unrooted_trees(path)?;
    let Some(sol) = ruhn_exact(&trees, kmax, limits)? else {
        return Ok(Report::no("NO\n".into()));
    };
    for ((t, &e), img) in trees.iter().zip(&sol.rootings).zip(&sol.images) {
        ensure!(
            img.verifies_rooted(&sol.network, &root_at_edge(t, e)?),
            "internal error: root-uncertain certificate does not verify"
        );
    }
    ensure!(sol.network.reticulation_number() == sol.value, "internal error: reticulation number mismatch");
    if format == Format::Dot {
        return Ok(Report::yes(export_dot_rooted(&sol.network, None)));
    }
    Ok(Report::yes(sol.render(&trees, &names)))
}

fn verdict(decided: Option<bool>) -> &'static str {
    match decided {
        Some(true) => "YES",
        Some(false) => "NO",
        None => "open",
    }
}

fn kernelize_containment(n: &UnrootedNetwork, t: &UnrootedTree, format: Format) -> Result<Report> {
    let (kernel, log) = kernelize_utc(n, t)?;
    let text = match format {
        Format::Log => log.to_string(),
        Format::Dot => export_dot(&kernel.network, None),
        Format::Text => format!(
            "decided {}\n{}tree {}\nlog\n{log}",
            verdict(kernel.decided),
            write_network(&kernel.network),
            write_tree(&kernel.tree)
        ),
    };
    Ok(Report { text, yes: kernel.decided != Some(false) })
}

fn kernelize_uncertain(path: &Path, k: usize, format: Format) -> Result<Report> {
    let (names, trees) = unrooted_trees(path)?;
    let (kernel, log) = kernelize_ruhn(&trees, k)?;
    let text = match format {
        Format::Log => log.to_string(),
        Format::Dot => kernel.trees.iter().map(|t| export_dot(t, None)).collect(),
        Format::Text => {
            let mut s = format!("decided {}\n", verdict(kernel.decided));
            for (name, t) in names.iter().zip(&kernel.trees) {
                writeln!(s, "{name} = {}", write_tree(t))?;
            }
            format!("{s}log\n{log}")
        }
    };
    Ok(Report { text, yes: kernel.decided != Some(false) })
}

fn oracle(o: &Oracle, format: Format, limits: &Limits) -> Result<Report> {
    match o {
        Oracle::Utc { network, tree } => {
            let (n, t) = (read_network(network)?, read_tree(tree)?);
            let img = checked_image(&n, &t, utc_oracle(&n, &t, limits)?)?;
            Ok(containment_report(&n, img, format))
        }
        Oracle::Tbr { trees } => {
            let (t1, t2) = two(&unrooted_trees(trees)?.1)?;
            Ok(Report::yes(format!("d_TBR = {}\n", tbr_bfs_oracle(&t1, &t2, limits)?)))
        }
        Oracle::Uhn { trees, kmax } => {
            let (_, trees) = unrooted_trees(trees)?;
            Ok(match uhn_exhaustive_oracle(&trees, *kmax, limits)? {
                Some(v) => Report::yes(format!("h_u = {v}\n")),
                None => Report::no("NO\n".into()),
            })
        }
        Oracle::Ndp { instance } => {
            let inst: NdpInstance = read(instance)?.parse().with_context(|| format!("parsing {}", instance.display()))?;
            inst.validate()?;
            Ok(match ndp_brute(&inst)? {
                Some(paths) => {
                    let mut text = String::from("YES\n");
                    for p in paths {
                        writeln!(text, "path {}", p.join(" "))?;
                    }
                    Report::yes(text)
                }
                None => Report::no("NO\n".into()),
            })
        }
    }
}

fn gen_ndp(nodes: usize, pairs: usize, seed: u64, gadget: bool, format: Format) -> Result<Report> {
    let inst = random_ndp(nodes, pairs, &mut ChaCha8Rng::seed_from_u64(seed));
    if !gadget {
        return Ok(Report::yes(inst.to_string()));
    }
    match ndp_to_utc(&inst) {
        Ok(g) if format == Format::Dot => Ok(Report::yes(export_dot(&g.network, None))),
        Ok(g) => Ok(Report::yes(format!("{inst}{}tree {}\n", write_network(&g.network), write_tree(&g.tree)))),
        Err(Error::TrivialNo(why)) => Ok(Report::yes(format!("{inst}trivially NO: {why}\n"))),
        Err(e) => Err(e.into()),
    }
}

fn gen_lemma4(path: &Path, long: bool) -> Result<Report> {
    let (t1, t2) = two(&rooted_trees(path)?.1)?;
    let len = if long { CaterpillarLength::Long } else { CaterpillarLength::Short };
    let (s1, s2) = hn_to_ruhn(&t1, &t2, len)?;
    Ok(Report::yes(format!("S1 = {}\nS2 = {}\n", write_tree(&s1), write_tree(&s2))))
}

fn export(path: &Path, rooted: bool) -> Result<Report> {
    let text = read(path)?;
    let dot = if text.trim_start().starts_with(EDGE_LIST_HEADER) {
        export_dot(&parse_unrooted_network(&text)?, None)
    } else if rooted {
        export_dot_rooted(&parse_rooted_network(&text)?, None)
    } else {
        export_dot(&parse_unrooted_tree(&text)?, None)
    };
    Ok(Report::yes(dot))
}

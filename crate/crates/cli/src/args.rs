use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use phylonet::Limits;

#[derive(Parser, Debug)]
#[command(name = "phylonet", version, about = "Exact solvers for tree containment and hybridization number")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads; changes wall time only, never the output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(flatten)]
    pub guards: Guards,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Dot,
    /// The reduction log (kernelizing commands only).
    Log,
}

/// Size guards; each can also be set through its `PHYLONET_GUARD_*` variable.
#[derive(Args, Debug, Clone)]
pub struct Guards {
    #[arg(long, global = true, env = "PHYLONET_GUARD_ORACLE_EDGES", value_parser = positive)]
    pub oracle_edges: Option<usize>,
    #[arg(long, global = true, env = "PHYLONET_GUARD_MAF_TAXA", value_parser = positive)]
    pub maf_taxa: Option<usize>,
    #[arg(long, global = true, env = "PHYLONET_GUARD_TBR_TAXA", value_parser = positive)]
    pub tbr_taxa: Option<usize>,
    #[arg(long, global = true, env = "PHYLONET_GUARD_HN_TAXA", value_parser = positive)]
    pub hn_taxa: Option<usize>,
    #[arg(long, global = true, env = "PHYLONET_GUARD_HN_K", value_parser = positive)]
    pub hn_k: Option<usize>,
    #[arg(long, global = true, env = "PHYLONET_GUARD_RUHN_TAXA", value_parser = positive)]
    pub ruhn_taxa: Option<usize>,
    #[arg(long, global = true, env = "PHYLONET_GUARD_UHN_ORACLE_TAXA", value_parser = positive)]
    pub uhn_oracle_taxa: Option<usize>,
    #[arg(long, global = true, env = "PHYLONET_GUARD_UHN_ORACLE_K", value_parser = positive)]
    pub uhn_oracle_k: Option<usize>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("guards must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

impl Guards {
    pub fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            oracle_edges: self.oracle_edges.unwrap_or(d.oracle_edges),
            maf_taxa: self.maf_taxa.unwrap_or(d.maf_taxa),
            tbr_taxa: self.tbr_taxa.unwrap_or(d.tbr_taxa),
            hn_taxa: self.hn_taxa.unwrap_or(d.hn_taxa),
            hn_k: self.hn_k.unwrap_or(d.hn_k),
            ruhn_taxa: self.ruhn_taxa.unwrap_or(d.ruhn_taxa),
            uhn_oracle_taxa: self.uhn_oracle_taxa.unwrap_or(d.uhn_oracle_taxa),
            uhn_oracle_k: self.uhn_oracle_k.unwrap_or(d.uhn_oracle_k),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Does an unrooted network display an unrooted tree?
    Utc {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        /// Branch on the input directly instead of on its kernel.
        #[arg(long)]
        no_kernel: bool,
    },
    /// Unrooted hybridization number of two unrooted trees.
    Uhn {
        #[arg(long)]
        trees: PathBuf,
        /// Report NO (exit 1) when the optimum is above this.
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Rooted hybridization number of rooted trees.
    Hn {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        kmax: usize,
    },
    /// Root-uncertain hybridization number of unrooted trees.
    Ruhn {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        kmax: usize,
    },
    /// Kernel of a containment instance (`--network`, `--tree`) or of a
    /// root-uncertain instance (`--trees`, `--k`).
    Kernelize {
        #[arg(long, requires = "tree", conflicts_with = "trees")]
        network: Option<PathBuf>,
        #[arg(long, requires = "network")]
        tree: Option<PathBuf>,
        #[arg(long, requires = "k", required_unless_present = "network")]
        trees: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Brute-force reference answers.
    #[command(subcommand)]
    Oracle(Oracle),
    /// Random disjoint-paths instance, optionally with its containment gadget.
    GenNdp {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(2..))]
        nodes: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        pairs: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also print the containment instance built from it.
        #[arg(long)]
        gadget: bool,
    },
    /// Unrooted caterpillar-extended pair from two rooted trees.
    GenLemma4 {
        #[arg(long)]
        trees: PathBuf,
        /// Parts of length 2n + 3 instead of n + 1.
        #[arg(long)]
        long: bool,
    },
    /// Graphviz text of a network or tree file.
    ExportDot {
        #[arg(long)]
        input: PathBuf,
        /// Read Newick input as rooted.
        #[arg(long)]
        rooted: bool,
    },
    /// Runs the acceptance criteria and reports one line per criterion.
    Selftest {
        /// Criteria to run (default: all).
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u8).range(1..=10))]
        criterion: Vec<u8>,
    },
}

#[derive(Subcommand, Debug)]
pub enum Oracle {
    /// Spanning-tree containment check.
    Utc {
        #[arg(long)]
        network: PathBuf,
        #[arg(long)]
        tree: PathBuf,
    },
    /// Breadth-first TBR distance of two unrooted trees.
    Tbr {
        #[arg(long)]
        trees: PathBuf,
    },
    /// Exhaustive unrooted network search up to `--kmax`.
    Uhn {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        kmax: usize,
    },
    /// Disjoint paths by exhaustive search.
    Ndp {
        #[arg(long)]
        instance: PathBuf,
    },
}

use std::path::PathBuf;

use amalgam::{Cardinal, Limits};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "amalgam", version, about = "Amalgamations, completions and free-lattice stages of finite posets")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,

    /// Output format; each verb has its own default.
    #[arg(long, global = true, value_enum)]
    pub emit: Option<Emit>,

    /// Report `elapsed_ms` as 0 so JSON-lines output is reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,

    #[command(flatten)]
    pub caps: Caps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Sizes,
    Dot,
    JsonLines,
    Provenance,
    Tsv,
}

#[derive(Debug, Args)]
pub struct Caps {
    /// Largest poset any construction may build.
    #[arg(long, global = true, default_value_t = Limits::default().carrier, value_parser = positive)]
    pub carrier_cap: usize,
    /// Largest set whose subsets may be enumerated.
    #[arg(long, global = true, default_value_t = Limits::default().subsets, value_parser = positive)]
    pub subset_cap: usize,
    /// Largest stage of an approximation chain.
    #[arg(long, global = true, default_value_t = Limits::default().stage, value_parser = positive)]
    pub stage_cap: usize,
    /// Largest poset handed to isomorphism search.
    #[arg(long, global = true, default_value_t = Limits::default().isomorphism, value_parser = positive)]
    pub iso_cap: usize,
}

impl Caps {
    pub fn limits(&self) -> Limits {
        Limits {
            carrier: self.carrier_cap,
            isomorphism: self.iso_cap,
            subsets: self.subset_cap,
            stage: self.stage_cap,
            closed_sets: self.carrier_cap,
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn cardinal(s: &str) -> Result<Cardinal, String> {
    s.parse::<Cardinal>().map_err(|e| e.to_string())
}

/// A base poset with a meet-extension `X` and a join-extension `Y`.
#[derive(Debug, Args)]
pub struct Triple {
    #[arg(long)]
    pub base: PathBuf,
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    /// Map file for `e_X`; by default elements are matched by name.
    #[arg(long)]
    pub ex: Option<PathBuf>,
    /// Map file for `e_Y`; by default elements are matched by name.
    #[arg(long)]
    pub ey: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyChoice {
    /// Principal upsets (or downsets) only.
    Principal,
    /// Every non-empty upset (or downset).
    All,
    /// The filters (or ideals) of the file's meet (or join) specification.
    Spec,
    /// Sets listed one per line as `{ a b }` in the file given by `--filter-file` (or `--ideal-file`).
    File,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Canonical amalgamation of a meet-extension and a join-extension.
    Amalgamate(Triple),
    /// MacNeille completion.
    Macneille {
        #[arg(long)]
        input: PathBuf,
    },
    /// Canonical extension with respect to families of filters and ideals.
    CanonicalExtension {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FamilyChoice::All)]
        filters: FamilyChoice,
        #[arg(long, value_enum, default_value_t = FamilyChoice::All)]
        ideals: FamilyChoice,
        #[arg(long)]
        filter_file: Option<PathBuf>,
        #[arg(long)]
        ideal_file: Option<PathBuf>,
    },
    /// Lift a map along a meet-extension, or along an amalgamation when `--y` is given.
    Lift {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        ex: Option<PathBuf>,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long)]
        ey: Option<PathBuf>,
        /// Target poset of the map.
        #[arg(long)]
        target: PathBuf,
        /// Map file from the base to the target.
        #[arg(long)]
        f: PathBuf,
        #[arg(long, default_value = "omega", value_parser = cardinal)]
        alpha: Cardinal,
        #[arg(long, default_value = "omega", value_parser = cardinal)]
        beta: Cardinal,
    },
    /// Build the stages A_0 .. A_n of the free-lattice approximation chain.
    BuildChain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        stages: usize,
    },
    /// Compare two terms in the lattice freely generated by the input.
    WordProblem {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Ranks of the elements of a stage, or of one term's correspondent.
    Rank {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, visible_alias = "stage", default_value_t = 1)]
        stages: usize,
        #[arg(long, conflicts_with = "element")]
        term: Option<String>,
        /// An element of the stage, by name.
        #[arg(long)]
        element: Option<String>,
    },
    /// Coherence levels of an extension polarity.
    Coherence {
        #[command(flatten)]
        triple: Triple,
        /// File of `x -> y` lines; by default the minimal relation.
        #[arg(long)]
        relation: Option<PathBuf>,
    },
    /// Amalgamation of the product of several copies of an extension pair.
    ProductAmalgamate {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 2, value_parser = positive)]
        copies: usize,
    },
    /// Run the invariant suite on a poset with seeded random families.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

impl Verb {
    pub fn name(&self) -> &'static str {
        match self {
            Verb::Amalgamate(_) => "amalgamate",
            Verb::Macneille { .. } => "macneille",
            Verb::CanonicalExtension { .. } => "canonical-extension",
            Verb::Lift { .. } => "lift",
            Verb::BuildChain { .. } => "build-chain",
            Verb::WordProblem { .. } => "word-problem",
            Verb::Rank { .. } => "rank",
            Verb::Coherence { .. } => "coherence",
            Verb::ProductAmalgamate { .. } => "product-amalgamate",
            Verb::Verify { .. } => "verify",
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn verb_names_match_subcommands() {
        let cli = Cli::try_parse_from(["amalgam", "build-chain", "--input", "p", "--emit", "sizes"]).unwrap();
        assert_eq!(cli.verb.name(), "build-chain");
        assert_eq!(cli.emit, Some(Emit::Sizes));
        let d = Limits::default();
        assert_eq!(
            cli.caps.limits(),
            Limits {
                closed_sets: d.carrier,
                ..d
            }
        );
    }

    #[test]
    fn caps_must_be_positive() {
        assert!(Cli::try_parse_from(["amalgam", "macneille", "--input", "p", "--iso-cap", "0"]).is_err());
    }
}

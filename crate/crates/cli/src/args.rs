use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcont::lab::Campaign;

pub const GRAMMAR: &str = "\
Grammar:
  qcont divergence {relent|dmax|hockey --gamma G|tracedist|condent|mutinfo} FILES
  qcont integral FILE FILE [--tol T]
  qcont bound {thm1|thm1s|fa|ifa|eq14|afw|wilde|mi|prop6|prop7|prop9} FLAGS
  qcont check {thm1|eq14|marginal-correction|prop9|lemma3} FILES [FLAGS]
  qcont channel {dmax|dmax-unstab|complement|utheta|icinfo|degrade} FILES [FLAGS]
  qcont filtered {norm|relent|dmax} FILES
  qcont fuzz TAG FLAGS
  qcont tightness

Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
3 violated theorem check or failed theorem campaign.

CSV columns (--format csv, one row per report):
  bounds and checks: equation_tag,lhs,rhs,slack,applicable,reason,params
  fuzz:              campaign,samples,violations,max_violation,min_slack,seed
  anything else:     the report's scalar fields, dotted paths in sorted order";

#[derive(Debug, Parser)]
#[command(name = "qcont", version, about = "Quantum divergences and entropy continuity bounds", after_help = GRAMMAR)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// State divergences and entropies of QOP-JSON files.
    Divergence(DivergenceArgs),
    /// Relative entropy through its hockey-stick integral representation.
    Integral(IntegralArgs),
    /// Closed-form bounds; comma-separated flag values sweep a grid.
    Bound(BoundArgs),
    /// Evaluate both sides of a bound on concrete states.
    Check(CheckArgs),
    /// Channel divergences, complements and capacity bounds of QCH-JSON files.
    Channel(ChannelArgs),
    /// Divergences filtered through a channel set and minimised over a free set.
    Filtered(FilteredArgs),
    /// Seeded Monte-Carlo campaign.
    Fuzz(FuzzArgs),
    /// Saturating families, each required to be tight.
    Tightness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DivergenceKind {
    Relent,
    Dmax,
    Hockey,
    Tracedist,
    Condent,
    Mutinfo,
}

#[derive(Debug, Args)]
pub struct DivergenceArgs {
    #[arg(value_enum)]
    pub kind: DivergenceKind,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Weight of the hockey-stick divergence, at least 1.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Bipartition for files without "dA"/"dB".
    #[arg(long = "dA")]
    pub da: Option<usize>,
    #[arg(long = "dB")]
    pub db: Option<usize>,
}

#[derive(Debug, Args)]
pub struct IntegralArgs {
    pub rho: PathBuf,
    pub sigma: PathBuf,
    /// Target quadrature error in bits.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Thm1,
    Thm1s,
    Fa,
    Ifa,
    Eq14,
    Afw,
    Wilde,
    Mi,
    Prop6,
    Prop7,
    Prop9,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub kind: BoundKind,
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    #[arg(long = "M", value_delimiter = ',')]
    pub m: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub d: Vec<f64>,
    #[arg(long = "dA", value_delimiter = ',')]
    pub da: Vec<f64>,
    #[arg(long = "dB", value_delimiter = ',')]
    pub db: Vec<f64>,
    /// Schmidt-number bound; defaults to dA.
    #[arg(long, value_delimiter = ',')]
    pub sn: Vec<f64>,
    /// Largest eigenvalue of the second state.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Max-relative entropy term, in bits.
    #[arg(long, value_delimiter = ',')]
    pub dmax: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Thm1,
    Eq14,
    MarginalCorrection,
    Prop9,
    Lemma3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Prop9Form {
    /// Star center of the free set as reference.
    Star,
    /// Max-relative entropy to the whole free set.
    Convex,
    /// Two-sided form; needs I/D in the free set.
    TwoSided,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub kind: CheckKind,
    /// thm1: RHO SIGMA OMEGA; eq14, marginal-correction: RHO SIGMA;
    /// prop9: RHO SIGMA FREE CHANNELS; lemma3: RHO FREE CHANNELS.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub sn: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Prop9Form::Star)]
    pub form: Prop9Form,
    #[arg(long = "dA")]
    pub da: Option<usize>,
    #[arg(long = "dB")]
    pub db: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelKind {
    Dmax,
    DmaxUnstab,
    Complement,
    Utheta,
    Icinfo,
    Degrade,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(value_enum)]
    pub kind: ChannelKind,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Degrading error to use instead of the diamond-bracket upper end.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilteredKind {
    Norm,
    Relent,
    Dmax,
}

#[derive(Debug, Args)]
pub struct FilteredArgs {
    #[arg(value_enum)]
    pub kind: FilteredKind,
    /// norm: OPERATOR CHANNELS; relent, dmax: RHO FREE CHANNELS.
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, default_value_t = qcont::filtered::DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// One of thm1, eq14, wilde, mi_conjecture, prop9, lemma3.
    #[arg(value_parser = parse_campaign)]
    pub campaign: Campaign,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Local dimension, `N` or `LO..HI`.
    #[arg(long = "dA", alias = "d", value_parser = parse_dim_range)]
    pub da: Option<(usize, usize)>,
    /// Second local dimension of bipartite campaigns.
    #[arg(long = "dB", value_parser = parse_dim_range)]
    pub db: Option<(usize, usize)>,
    #[arg(long)]
    pub entanglement_bias: bool,
    /// Inject an isotropic witness every N samples (eq14).
    #[arg(long)]
    pub witness_every: Option<u64>,
    /// Fixed shrinking parameter (lemma3).
    #[arg(long)]
    pub q: Option<f64>,
    /// Number of near-saturating witnesses to keep.
    #[arg(long, default_value_t = 10)]
    pub near: usize,
}

fn parse_campaign(s: &str) -> Result<Campaign, String> {
    s.parse::<Campaign>().map_err(|e| e.to_string())
}

fn parse_dim_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => parse(s).map(|d| (d, d)),
    }
}

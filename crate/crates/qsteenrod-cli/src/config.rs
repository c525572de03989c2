//! Command-line arguments and the validated run configuration.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsteenrod::localization_engine::InsertionClass;
use qsteenrod::{Basis, FieldElement, PrimeModulus};

use crate::golden::default_fixture_dir;

#[derive(Debug, Parser)]
#[command(name = "qsteenrod", version, about = "Exact mod-p quantum Steenrod structure constants for local P¹ and T*P¹")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Non-equivariant structure constants of the local P¹ threefold.
    LocalP1,
    /// S¹-equivariant pairing values of T*P¹ with their sub-checks.
    TstarP1,
    /// Every acceptance criterion.
    VerifyAll,
    /// Characteristic-0 flat endomorphism by recursion.
    Char0,
    /// The arithmetic flat section at h/t = μ.
    FlatSection,
    /// Annihilation of the flat section by the specialized operation.
    Annihilation,
    /// Covariant-constancy defect of the equivariant operation.
    Flatness,
    /// Rank-2 decomposition of random flat endomorphisms.
    Decompose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::LocalP1 => "local-p1",
            Command::TstarP1 => "tstar-p1",
            Command::VerifyAll => "verify-all",
            Command::Char0 => "char0",
            Command::FlatSection => "flat-section",
            Command::Annihilation => "annihilation",
            Command::Flatness => "flatness",
            Command::Decompose => "decompose",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Geometric,
    Stable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    #[value(name = "1")]
    One,
    #[value(name = "b")]
    B,
}

impl From<ClassArg> for InsertionClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::One => InsertionClass::One,
            ClassArg::B => InsertionClass::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Odd prime p (verify-all defaults to 3 and 5).
    #[arg(long, global = true)]
    pub prime: Option<u64>,
    /// Highest power of q (default depends on the subcommand).
    #[arg(long, global = true)]
    pub q_max: Option<u32>,
    /// Highest power of h.
    #[arg(long, global = true, default_value_t = 4)]
    pub h_max: i32,
    #[arg(long, global = true, value_enum, default_value_t = BasisArg::Geometric)]
    pub basis: BasisArg,
    /// Insertion at 0 (all pairs when omitted).
    #[arg(long, global = true, value_enum)]
    pub b0: Option<ClassArg>,
    /// Insertion at ∞ (all pairs when omitted).
    #[arg(long, global = true, value_enum)]
    pub binf: Option<ClassArg>,
    /// Specialization h/t = μ, as an integer reduced mod p.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mu: Option<i64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overwrite golden fixtures with the current output.
    #[arg(long, global = true)]
    pub regen_golden: bool,
    /// Golden fixture directory.
    #[arg(long, global = true)]
    pub fixtures: Option<PathBuf>,
    /// Include wall time in JSON reports.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Validated configuration shared by all subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    /// Primes to run; a single entry unless verify-all runs its default sweep.
    pub primes: Vec<PrimeModulus>,
    pub q_max: u32,
    pub h_max: i32,
    pub basis: Basis,
    pub b0: Option<InsertionClass>,
    pub binf: Option<InsertionClass>,
    pub mu: Option<FieldElement>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub regen_golden: bool,
    pub fixtures: PathBuf,
    pub timing: bool,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, UsageError> {
        let o = &cli.opts;
        let parse_prime = |p: u64| PrimeModulus::new(p).map_err(|e| UsageError(format!("--prime {p}: {e}")));
        let primes = match (o.prime, cli.command) {
            (Some(p), _) => vec![parse_prime(p)?],
            (None, Command::VerifyAll) => vec![parse_prime(3)?, parse_prime(5)?],
            (None, _) => vec![parse_prime(5)?],
        };
        let p = primes[0].get() as u32;
        let q_max = o.q_max.unwrap_or(match cli.command {
            Command::LocalP1 => 2 * p,
            Command::Char0 => 3,
            _ => 3 * p,
        });
        if o.h_max < 0 {
            return Err(UsageError("--h-max must be non-negative".into()));
        }
        let mu = o.mu.map(|m| primes[0].elem(m));
        let needs_mu = matches!(cli.command, Command::FlatSection | Command::Annihilation);
        if needs_mu && mu.is_none() {
            return Err(UsageError(format!("{} requires --mu", cli.command.name())));
        }
        if cli.command == Command::TstarP1 && mu.is_some() && q_max < p {
            return Err(UsageError(format!("periodicity checks need --q-max ≥ p = {p}")));
        }
        Ok(Self {
            command: cli.command,
            primes,
            q_max,
            h_max: o.h_max,
            basis: match o.basis {
                BasisArg::Geometric => Basis::Geometric,
                BasisArg::Stable => Basis::Stable,
            },
            b0: o.b0.map(Into::into),
            binf: o.binf.map(Into::into),
            mu,
            format: o.format,
            out: o.out.clone(),
            seed: o.seed,
            regen_golden: o.regen_golden,
            fixtures: o.fixtures.clone().unwrap_or_else(default_fixture_dir),
            timing: o.timing,
        })
    }

    pub fn prime(&self) -> PrimeModulus {
        self.primes[0]
    }

    /// The `(b0, b∞)` pairs selected by `--b0` / `--binf`.
    pub fn pairs(&self) -> Vec<(InsertionClass, InsertionClass)> {
        let all = InsertionClass::ALL;
        let b0s: Vec<_> = self.b0.map_or(all.to_vec(), |c| vec![c]);
        let binfs: Vec<_> = self.binf.map_or(all.to_vec(), |c| vec![c]);
        b0s.iter().flat_map(|&a| binfs.iter().map(move |&b| (a, b))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, UsageError> {
        let cli = Cli::try_parse_from(std::iter::once("qsteenrod").chain(args.iter().copied())).unwrap();
        RunConfig::from_cli(&cli)
    }

    #[test]
    fn rejects_non_primes_and_missing_mu() {
        assert!(parse(&["local-p1", "--prime", "4"]).is_err());
        assert!(parse(&["flat-section", "--prime", "3"]).is_err());
        assert!(parse(&["tstar-p1", "--prime", "5", "--q-max", "3", "--mu", "2"]).is_err());
        let c = parse(&["flat-section", "--prime", "3", "--mu", "-1"]).unwrap();
        assert_eq!(c.mu.unwrap().value(), 2);
    }

    #[test]
    fn defaults() {
        let c = parse(&["verify-all"]).unwrap();
        assert_eq!(c.primes.iter().map(|p| p.get()).collect::<Vec<_>>(), vec![3, 5]);
        let c = parse(&["local-p1", "--prime", "5"]).unwrap();
        assert_eq!(c.q_max, 10);
        assert_eq!(c.pairs().len(), 4);
        let c = parse(&["tstar-p1", "--b0", "b", "--binf", "1"]).unwrap();
        assert_eq!(c.pairs(), vec![(InsertionClass::B, InsertionClass::One)]);
    }
}

//! Command-line front end. Stdout carries only JSON; diagnostics go to
//! stderr. Exit codes: 0 success, 1 verification failure, 2 bad input or
//! arguments.

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vaov::io::{self, Labels};
use vaov::maxmin::{maxmin_rule_arbitrary, InformedPolicy, MaxminPolicy};
use vaov::oracle::AdversaryPolicy;
use vaov::protocol::{run, Policy, Transcript};
use vaov::rc::rc_set;
use vaov::spe::spe_transcript;
use vaov::types::{Instance, Party};
use vaov::{corpus, verify};

#[derive(Parser)]
#[command(
    name = "vaov",
    about = "Alternating-offers negotiation with vetoes over ordinal preferences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum PartyArg {
    P1,
    P2,
}

impl From<PartyArg> for Party {
    fn from(p: PartyArg) -> Party {
        match p {
            PartyArg::P1 => Party::P1,
            PartyArg::P2 => Party::P2,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum PolicyName {
    /// Subgame-perfect strategy.
    Spe,
    /// Maxmin strategy, lowest-id offers.
    Maxmin,
    /// Maxmin strategy offering the best member of the upper set.
    MaxminHeuristic,
    /// Informed best response against a maxmin opponent (needs --informed).
    Informed,
    /// Oracle-backed worst-case opponent of the other party.
    Adversary,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum MaxminGame {
    /// Maxmin against maxmin.
    Mm,
    /// Maxmin (the --focal party) against the oracle adversary.
    Adversary,
    /// Informed best response (--informed party) against maxmin.
    Informed,
}

#[derive(Subcommand)]
enum Command {
    /// Play the SPE strategies and print the transcript.
    Spe {
        instance: PathBuf,
        #[arg(long, value_enum)]
        first_mover: Option<PartyArg>,
    },
    /// Print the Rational Compromise set and its depth.
    Rc { instance: PathBuf },
    /// Play a no-information matchup and print the transcript.
    Maxmin {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "mm")]
        mode: MaxminGame,
        /// The maxmin party in adversary mode.
        #[arg(long, value_enum, default_value = "p1")]
        focal: PartyArg,
        /// The informed party in informed mode.
        #[arg(long, value_enum, default_value = "p1")]
        informed: PartyArg,
        #[arg(long, value_enum)]
        first_mover: Option<PartyArg>,
    },
    /// Generate a seeded corpus of random instances.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for instance files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every theorem check over a corpus or an exhaustive sweep.
    Verify {
        /// Directory of instance files.
        corpus: Option<PathBuf>,
        /// Check all m!^2 order pairs of this size instead.
        #[arg(long)]
        exhaustive: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for failing-instance dumps.
        #[arg(long, default_value = "failures")]
        out: PathBuf,
    },
    /// Play two named policies against each other.
    Play {
        instance: PathBuf,
        /// Policy of the first mover.
        #[arg(long, value_enum)]
        policy1: PolicyName,
        /// Policy of the other party.
        #[arg(long, value_enum)]
        policy2: PolicyName,
        /// The informed party, when either policy is `informed`.
        #[arg(long, value_enum)]
        informed: Option<PartyArg>,
        #[arg(long, value_enum)]
        first_mover: Option<PartyArg>,
    },
}

fn load_instance(
    path: &Path,
    first_mover: Option<PartyArg>,
) -> anyhow::Result<(Instance, Labels)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let (mut instance, labels) =
        io::parse_instance(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(fm) = first_mover {
        instance = instance.with_first_mover(fm.into());
    }
    Ok((instance, labels))
}

fn print_transcript(transcript: &Transcript, labels: &Labels) {
    print!("{}", io::transcript_to_json(transcript, labels));
}

fn build_policy<'a>(
    name: PolicyName,
    instance: &'a Instance,
    own_party: Party,
    informed: Option<PartyArg>,
) -> anyhow::Result<Box<dyn Policy + 'a>> {
    Ok(match name {
        PolicyName::Spe => Box::new(vaov::spe::SpePolicy),
        PolicyName::Maxmin => Box::new(MaxminPolicy::arbitrary()),
        PolicyName::MaxminHeuristic => Box::new(MaxminPolicy::heuristic()),
        PolicyName::Informed => {
            let informed: Party = informed
                .context("--informed <p1|p2> is required with the informed policy")?
                .into();
            anyhow::ensure!(
                informed == own_party,
                "--informed names {informed}, but the informed policy was assigned to {own_party}"
            );
            Box::new(InformedPolicy::new(instance, informed))
        }
        PolicyName::Adversary => {
            Box::new(AdversaryPolicy::new(instance, own_party.other(), None)?)
        }
    })
}

fn cmd_spe(instance: PathBuf, first_mover: Option<PartyArg>) -> anyhow::Result<()> {
    let (instance, labels) = load_instance(&instance, first_mover)?;
    let transcript = spe_transcript(&instance);
    print_transcript(&transcript, &labels);
    Ok(())
}

fn cmd_rc(instance: PathBuf) -> anyhow::Result<()> {
    let (instance, labels) = load_instance(&instance, None)?;
    let rc = rc_set(&instance);
    let members: Vec<&str> = rc.outcomes.iter().map(|o| labels.label(o)).collect();
    println!(
        "{}",
        serde_json::json!({ "rc": members, "v": rc.v_star })
    );
    Ok(())
}

fn cmd_maxmin(
    instance: PathBuf,
    mode: MaxminGame,
    focal: PartyArg,
    informed: PartyArg,
    first_mover: Option<PartyArg>,
) -> anyhow::Result<()> {
    let (instance, labels) = load_instance(&instance, first_mover)?;
    let focal: Party = focal.into();
    let informed: Party = informed.into();
    let transcript = match mode {
        MaxminGame::Mm => {
            let mut a = MaxminPolicy::arbitrary();
            let mut b = MaxminPolicy::arbitrary();
            run(&instance, &mut a, &mut b)?
        }
        MaxminGame::Adversary => {
            let mut max = MaxminPolicy::arbitrary();
            let mut adv = AdversaryPolicy::new(&instance, focal, Some(maxmin_rule_arbitrary))?;
            if instance.first_mover() == focal {
                run(&instance, &mut max, &mut adv)?
            } else {
                run(&instance, &mut adv, &mut max)?
            }
        }
        MaxminGame::Informed => {
            let mut inf = InformedPolicy::new(&instance, informed);
            let mut max = MaxminPolicy::arbitrary();
            if instance.first_mover() == informed {
                run(&instance, &mut inf, &mut max)?
            } else {
                run(&instance, &mut max, &mut inf)?
            }
        }
    };
    print_transcript(&transcript, &labels);
    Ok(())
}

fn cmd_gen(m: usize, count: usize, seed: u64, out: PathBuf) -> anyhow::Result<()> {
    anyhow::ensure!(m >= 1, "--m must be at least 1");
    anyhow::ensure!(count >= 1, "--count must be at least 1");
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let labels = Labels::numbered(m);
    for (i, instance) in corpus::generate(m, count, seed).iter().enumerate() {
        let path = out.join(format!("instance-{i:04}.json"));
        std::fs::write(&path, io::instance_to_json(instance, &labels))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!("wrote {count} instances (m = {m}, seed = {seed}) to {}", out.display());
    Ok(())
}

fn read_corpus(dir: &Path) -> anyhow::Result<Vec<(Instance, Labels)>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading corpus directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    anyhow::ensure!(!paths.is_empty(), "no .json instance files in {}", dir.display());
    paths
        .iter()
        .map(|p| load_instance(p, None))
        .collect::<Result<Vec<_>, _>>()
}

fn cmd_verify(
    corpus_dir: Option<PathBuf>,
    exhaustive: Option<usize>,
    seed: u64,
    out: PathBuf,
) -> anyhow::Result<bool> {
    let instances: Vec<Instance> = match (&corpus_dir, exhaustive) {
        (Some(_), Some(_)) | (None, None) => {
            anyhow::bail!("pass either a corpus directory or --exhaustive <m>")
        }
        (Some(dir), None) => read_corpus(dir)?.into_iter().map(|(i, _)| i).collect(),
        (None, Some(m)) => {
            anyhow::ensure!(
                (1..=5).contains(&m),
                "--exhaustive is limited to m <= 5 ({} order pairs at m = 5)",
                120 * 120
            );
            verify::exhaustive_instances(m).collect()
        }
    };
    let out_dir = out;
    let report = verify::run_batch(instances, seed, |idx, instance| {
        std::fs::create_dir_all(&out_dir).ok()?;
        let path = out_dir.join(format!("failing-{idx:05}.json"));
        let labels = Labels::numbered(instance.m());
        std::fs::write(&path, io::instance_to_json(instance, &labels)).ok()?;
        Some(path.display().to_string())
    })?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.all_pass())
}

fn cmd_play(
    instance: PathBuf,
    policy1: PolicyName,
    policy2: PolicyName,
    informed: Option<PartyArg>,
    first_mover: Option<PartyArg>,
) -> anyhow::Result<()> {
    let (instance, labels) = load_instance(&instance, first_mover)?;
    let first_party = instance.first_mover();
    let mut first = build_policy(policy1, &instance, first_party, informed)?;
    let mut second = build_policy(policy2, &instance, first_party.other(), informed)?;
    let transcript = run(&instance, first.as_mut(), second.as_mut())?;
    print_transcript(&transcript, &labels);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Spe {
            instance,
            first_mover,
        } => cmd_spe(instance, first_mover).map(|()| true),
        Command::Rc { instance } => cmd_rc(instance).map(|()| true),
        Command::Maxmin {
            instance,
            mode,
            focal,
            informed,
            first_mover,
        } => cmd_maxmin(instance, mode, focal, informed, first_mover).map(|()| true),
        Command::Gen {
            m,
            count,
            seed,
            out,
        } => cmd_gen(m, count, seed, out).map(|()| true),
        Command::Verify {
            corpus,
            exhaustive,
            seed,
            out,
        } => cmd_verify(corpus, exhaustive, seed, out),
        Command::Play {
            instance,
            policy1,
            policy2,
            informed,
            first_mover,
        } => cmd_play(instance, policy1, policy2, informed, first_mover).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

//! `kchains` command-line tool.
//!
//! Exit codes: 0 when every asserted check passes, 1 when a check fails
//! (the report is still printed), 2 on usage or input errors.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kchains::{Limits, Policy};

use commands::{
    CharsumKind, ConstructKind, Globals, LemmaArg, LemmaOpts, Method, SetSource, SmallsetOpts, SweepOpts,
};

#[derive(Parser, Debug)]
#[command(name = "kchains", version, about = "Exact counts of dot-product chains over finite fields and Z/p^l")]
struct Cli {
    /// Structure literal: Fp:p, F:p^m or Z:p^l.
    #[arg(long, global = true)]
    structure: Option<String>,
    /// Ambient dimension (default 2).
    #[arg(long, global = true)]
    d: Option<usize>,
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = kchains::rng::DEFAULT_SEED)]
    seed: u64,
    /// Output format. Constructions print point-set text unless a format is given.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Tuple budget for brute-force counting.
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct SetArgs {
    /// Point-set file (header `<structure> <d>`, then one point per line).
    #[arg(long)]
    set: Option<PathBuf>,
    /// Sample N points uniformly from --structure^--d with --seed.
    #[arg(long, value_name = "N")]
    random: Option<u64>,
}

impl SetArgs {
    fn source(&self) -> SetSource {
        SetSource { path: self.set.clone(), random: self.random }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count k-chains of a given type.
    Count {
        #[command(flatten)]
        set: SetArgs,
        /// Comma-separated type, e.g. 1,2.
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value = "all")]
        policy: Policy,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
    },
    /// Split a chain count into main and remainder terms by support.
    Decompose {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        alpha: String,
    },
    /// Evaluate a character sum exactly.
    Charsum {
        #[command(subcommand)]
        which: CharsumCmd,
    },
    /// Check one of the character-sum bounds.
    LemmaCheck {
        #[arg(value_enum)]
        lemma: LemmaName,
        #[command(flatten)]
        set: SetArgs,
        /// Number of random sets (or matrices for rc).
        #[arg(long, default_value_t = 1)]
        trials: u32,
        /// Size of each random set; uniform in [1, q^d] when omitted.
        #[arg(long)]
        size: Option<u64>,
        /// Parameters to check (comma-separated); all admissible ones by default.
        #[arg(long)]
        gamma: Option<String>,
        /// Constant for the two-link field bound.
        #[arg(long, default_value_t = 2)]
        constant: u32,
        /// Largest tuple length for mn.
        #[arg(long, default_value_t = 14)]
        max_k: usize,
        /// Largest matrix side for rc.
        #[arg(long, default_value_t = 8)]
        max_dim: u64,
    },
    /// Generate a structured point set.
    Construct {
        #[command(subcommand)]
        which: ConstructCmd,
    },
    /// Reproduce the two lines in Z_9^2 that share three points.
    ErratumCheck,
    /// Seeded sampling experiments.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCmd,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dp,
    Brute,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LemmaName {
    #[value(name = "1dp")]
    OneDp,
    #[value(name = "1dpR")]
    OneDpR,
    #[value(name = "2dp")]
    TwoDp,
    #[value(name = "2dpR")]
    TwoDpR,
    Rc,
    Mn,
}

#[derive(Subcommand, Debug)]
enum CharsumCmd {
    /// S(x) = q n_alpha(x) - |E|.
    SSum {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        point: String,
        #[arg(long)]
        alpha: String,
    },
    /// Sum of S(x)^2 over the set, or over the whole space with --space.
    #[command(name = "s-l2")]
    SL2 {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        space: bool,
    },
    /// Two-link sum T.
    TSum {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long)]
        alpha: String,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructCmd {
    /// The two coordinate axes.
    Axes,
    /// {(x,0,alpha)} u {(0,y,1)} in dimension 3.
    Shifted {
        #[arg(long)]
        alpha: String,
    },
    /// X u Y u Z in (Z/p^l)^2 with every cross triple a 2-chain.
    ErratumFamily {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
    },
    /// {y : v.y = alpha} in the plane.
    Line {
        #[arg(long)]
        v: String,
        #[arg(long)]
        alpha: String,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// Relative error of random sets against the main term.
    Sweep {
        #[arg(long)]
        alpha: String,
        /// Explicit set sizes (comma-separated).
        #[arg(long, value_delimiter = ',')]
        size: Vec<u64>,
        /// Sizes as multiples of the threshold q^e, capped at q^d.
        #[arg(long, value_delimiter = ',')]
        multiple: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        trials: u32,
        /// Largest mean |relative error| per cell.
        #[arg(long, default_value = "1/10")]
        tolerance: String,
        /// Also count pairwise-distinct chains when the budget allows.
        #[arg(long)]
        pairwise: bool,
        /// Skip cells whose work estimate trials*k*|E|^2 exceeds this.
        #[arg(long)]
        cell_budget: Option<u128>,
    },
    /// Chain counts of small planar sets against |E|^ceil(2(k+1)/3).
    Smallset {
        #[arg(long)]
        alpha: String,
        #[arg(long, default_value_t = 20)]
        size: u64,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Fail when any ratio exceeds this.
        #[arg(long)]
        max_ratio: Option<f64>,
    },
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Count { .. } => "count".into(),
        Command::Decompose { .. } => "decompose".into(),
        Command::Charsum { which } => match which {
            CharsumCmd::SSum { .. } => "charsum s-sum".into(),
            CharsumCmd::SL2 { .. } => "charsum s-l2".into(),
            CharsumCmd::TSum { .. } => "charsum t-sum".into(),
        },
        Command::LemmaCheck { lemma, .. } => {
            format!("lemma-check {}", lemma.to_possible_value().expect("named").get_name())
        }
        Command::Construct { which } => match which {
            ConstructCmd::Axes => "construct axes".into(),
            ConstructCmd::Shifted { .. } => "construct shifted".into(),
            ConstructCmd::ErratumFamily { .. } => "construct erratum-family".into(),
            ConstructCmd::Line { .. } => "construct line".into(),
        },
        Command::ErratumCheck => "erratum-check".into(),
        Command::Experiment { which } => match which {
            ExperimentCmd::Sweep { .. } => "experiment sweep".into(),
            ExperimentCmd::Smallset { .. } => "experiment smallset".into(),
        },
    }
}

fn run(cli: &Cli) -> commands::CmdResult {
    let mut limits = Limits::default();
    if let Some(b) = cli.budget {
        limits.brute_budget = b;
    }
    let g = Globals { structure: cli.structure.clone(), d: cli.d, seed: cli.seed, limits };
    match &cli.command {
        Command::Count { set, alpha, policy, method } => {
            let method = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Dp => Method::Dp,
                MethodArg::Brute => Method::Brute,
            };
            commands::count(&g, &set.source(), alpha, *policy, method)
        }
        Command::Decompose { set, alpha } => commands::decompose_cmd(&g, &set.source(), alpha),
        Command::Charsum { which } => match which {
            CharsumCmd::SSum { set, point, alpha } => commands::charsum(
                &g,
                &set.source(),
                &CharsumKind::SSum { point: point.clone(), alpha: alpha.clone() },
            ),
            CharsumCmd::SL2 { set, alpha, space } => commands::charsum(
                &g,
                &set.source(),
                &CharsumKind::SL2 { alpha: alpha.clone(), whole_space: *space },
            ),
            CharsumCmd::TSum { set, alpha } => {
                commands::charsum(&g, &set.source(), &CharsumKind::TSum { alpha: alpha.clone() })
            }
        },
        Command::LemmaCheck { lemma, set, trials, size, gamma, constant, max_k, max_dim } => {
            let kind = match lemma {
                LemmaName::OneDp => LemmaArg::OneDp,
                LemmaName::OneDpR => LemmaArg::OneDpR,
                LemmaName::TwoDp => LemmaArg::TwoDp,
                LemmaName::TwoDpR => LemmaArg::TwoDpR,
                LemmaName::Rc => LemmaArg::Rc,
                LemmaName::Mn => LemmaArg::Mn,
            };
            if *trials == 0 {
                return Err(commands::UsageError("--trials must be at least 1".into()));
            }
            let opts = LemmaOpts {
                kind,
                src: set.source(),
                trials: *trials,
                size: *size,
                gamma: gamma.clone(),
                constant: *constant,
                max_k: *max_k,
                max_dim: (*max_dim).max(1),
            };
            commands::lemma_check(&g, &opts)
        }
        Command::Construct { which } => {
            let kind = match which {
                ConstructCmd::Axes => ConstructKind::Axes,
                ConstructCmd::Shifted { alpha } => ConstructKind::Shifted { alpha: alpha.clone() },
                ConstructCmd::ErratumFamily { alpha, beta } => {
                    ConstructKind::ErratumFamily { alpha: alpha.clone(), beta: beta.clone() }
                }
                ConstructCmd::Line { v, alpha } => ConstructKind::Line { v: v.clone(), alpha: alpha.clone() },
            };
            let g = if matches!(kind, ConstructKind::Shifted { .. }) && g.d.is_none() {
                Globals { d: Some(3), ..g }
            } else {
                g
            };
            commands::construct(&g, &kind)
        }
        Command::ErratumCheck => commands::erratum_check(),
        Command::Experiment { which } => match which {
            ExperimentCmd::Sweep { alpha, size, multiple, trials, tolerance, pairwise, cell_budget } => {
                let opts = SweepOpts {
                    alpha: alpha.clone(),
                    sizes: size.clone(),
                    multiples: multiple.clone(),
                    trials: *trials,
                    tolerance: tolerance.clone(),
                    pairwise: *pairwise,
                    cell_budget: *cell_budget,
                };
                commands::sweep(&g, &opts)
            }
            ExperimentCmd::Smallset { alpha, size, trials, max_ratio } => {
                let opts = SmallsetOpts { alpha: alpha.clone(), size: *size, trials: *trials, max_ratio: *max_ratio };
                commands::smallset(&g, &opts)
            }
        },
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = command_name(&cli.command);
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e.0);
            return ExitCode::from(2);
        }
    };
    let is_construct = matches!(cli.command, Command::Construct { .. });
    let out = match (cli.format, &outcome.text) {
        (None, Some(text)) if is_construct => text.clone(),
        (Some(Format::Csv), _) => match &outcome.table {
            Some(t) => t.to_csv(),
            None => {
                eprintln!("error: no CSV form for {name}");
                return ExitCode::from(2);
            }
        },
        _ => {
            let v = outcome.envelope(&name, &argv);
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    };
    // A closed pipe on stdout is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    if outcome.summary.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

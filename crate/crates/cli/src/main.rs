//! Command-line front end for the metamorph testing harness.
//!
//! Exit codes: 0 when no relation failed, 1 when at least one failure was
//! revealed, 2 on usage or configuration errors.

mod table;

use clap::{Args, Parser, Subcommand, ValueEnum};
use metamorph_core::{
    list_fixtures, run_campaign_outcome, to_stable_json, CampaignConfig, DetectionMatrix,
    EngineError, MatrixMeta, MatrixReport, Phase, RelationSelect, RunMeta, RunReport,
    SourceOverrides, SUBJECTS,
};

#[derive(Parser)]
#[command(
    name = "metamorph",
    version,
    about = "Metamorphic-testing harness: derive follow-up test cases from \
             successful runs and check relation-based expectations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply relations to one subject variant and report every verdict.
    Run(RunArgs),
    /// Tally all (variant, relation) pairs over generated inputs.
    Matrix(MatrixArgs),
    /// List built-in fixtures with provenance notes.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhaseArg {
    Testing,
    Production,
}

impl From<PhaseArg> for Phase {
    fn from(value: PhaseArg) -> Self {
        match value {
            PhaseArg::Testing => Phase::Testing,
            PhaseArg::Production => Phase::Production,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

#[derive(Args)]
struct RunArgs {
    /// Subject program: binsearch, kth, shortest-path, or gauss.
    #[arg(long)]
    subject: String,
    /// Variant to exercise (the correct program or a named fault).
    #[arg(long, default_value = "correct")]
    variant: String,
    /// Comma-separated relation ids, or "all".
    #[arg(long, default_value = "all")]
    relations: String,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PhaseArg::Testing)]
    phase: PhaseArg,
    /// Built-in fixture id or path to a fixture JSON file.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Source key (binsearch, kth); requires --fixture.
    #[arg(long)]
    key: Option<i64>,
    /// Source occurrence count (kth); requires --fixture.
    #[arg(long)]
    k: Option<u64>,
    /// Source vertex by label or number (shortest-path); requires --fixture.
    #[arg(long)]
    src: Option<String>,
    /// Destination vertex by label or number (shortest-path); requires --fixture.
    #[arg(long)]
    dst: Option<String>,
}

#[derive(Args)]
struct MatrixArgs {
    /// Subject name, a comma-separated list, or "all".
    #[arg(long, default_value = "all")]
    subject: String,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Args)]
struct FixturesArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Matrix(args) => cmd_matrix(&args),
        Command::Fixtures(args) => cmd_fixtures(&args),
    };
    std::process::exit(code);
}

fn config_error(err: &EngineError) -> i32 {
    eprintln!("error: {err}");
    2
}

fn parse_relations(spec: &str) -> RelationSelect {
    if spec.trim() == "all" {
        RelationSelect::all()
    } else {
        RelationSelect::named(spec.split(',').map(|s| s.trim().to_string()))
    }
}

fn cmd_run(args: &RunArgs) -> i32 {
    let config = CampaignConfig {
        subject: args.subject.clone(),
        variants: vec![args.variant.clone()],
        relations: parse_relations(&args.relations),
        trials: args.trials,
        seed: args.seed,
        phase: args.phase.into(),
        fixture: args.fixture.clone(),
    };
    let overrides = SourceOverrides {
        key: args.key,
        k: args.k,
        src: args.src.clone(),
        dst: args.dst.clone(),
    };
    let outcome = match run_campaign_outcome(&config, &overrides) {
        Ok(outcome) => outcome,
        Err(err) => return config_error(&err),
    };
    let entries = outcome
        .per_variant_entries
        .into_iter()
        .next()
        .map(|(_, entries)| entries)
        .unwrap_or_default();
    let report = RunReport {
        meta: RunMeta {
            seed: args.seed,
            phase: args.phase.into(),
            subject: args.subject.clone(),
            variant: args.variant.clone(),
            trials: args.trials,
            fixture: args.fixture.clone(),
        },
        entries,
        matrix: outcome.matrix,
    };
    match args.format {
        FormatArg::Json => print!("{}", to_stable_json(&report)),
        FormatArg::Table => {
            println!(
                "subject {} | variant {} | seed {} | phase {}",
                report.meta.subject, report.meta.variant, report.meta.seed, report.meta.phase
            );
            print!("{}", table::render_entries(&report.entries));
            println!();
            print!("{}", table::render_matrix(&report.matrix));
        }
    }
    if report.matrix.total_fails() > 0 {
        1
    } else {
        0
    }
}

fn cmd_matrix(args: &MatrixArgs) -> i32 {
    let subjects: Vec<String> = if args.subject.trim() == "all" {
        SUBJECTS.iter().map(|s| s.to_string()).collect()
    } else {
        args.subject
            .split(',')
            .map(|s| s.trim().to_string())
            .collect()
    };
    let mut matrix = DetectionMatrix::default();
    for subject in &subjects {
        let config = CampaignConfig {
            subject: subject.clone(),
            variants: Vec::new(), // every variant
            relations: RelationSelect::all(),
            trials: args.trials,
            seed: args.seed,
            phase: Phase::Testing,
            fixture: None,
        };
        match run_campaign_outcome(&config, &SourceOverrides::default()) {
            Ok(outcome) => matrix.merge(outcome.matrix),
            Err(err) => return config_error(&err),
        }
    }
    let report = MatrixReport {
        meta: MatrixMeta {
            seed: args.seed,
            phase: Phase::Testing,
            subjects,
            trials: args.trials,
        },
        matrix,
    };
    match args.format {
        FormatArg::Json => print!("{}", to_stable_json(&report)),
        FormatArg::Table => print!("{}", table::render_matrix(&report.matrix)),
    }
    0
}

fn cmd_fixtures(args: &FixturesArgs) -> i32 {
    let fixtures = list_fixtures();
    match args.format {
        FormatArg::Json => print!("{}", to_stable_json(&fixtures)),
        FormatArg::Table => print!("{}", table::render_fixtures(&fixtures)),
    }
    0
}

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use twostudy::fixtures::MICE_CSV;
use twostudy::io::read_pvalues;
use twostudy::simulation::{run_mu_sweep, run_scenario, sweep_to_csv, SimScenario};
use twostudy::{
    analyze, solve_thresholds, Analysis, Dependence, ErrorRate, PValueMode, ProcedureConfig, SelectionRule,
    ThresholdSolution, TwoStudyPValues,
};

#[derive(Parser)]
#[command(name = "twostudy", version, about = "Replicability analysis across two studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute r-values and replicability claims for a p-value table.
    Analyze(AnalyzeArgs),
    /// Solve for data-dependent selection thresholds.
    SolveThresholds(SolveArgs),
    /// Run a Monte-Carlo scenario and print power, FWER and FDR.
    Simulate(SimulateArgs),
    /// Print the bundled mouse-strain table (left-sided p-values).
    Fixture,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rate {
    Fwer,
    Fdr,
}

#[derive(Clone, Copy, ValueEnum)]
enum DependenceArg {
    Independent,
    Arbitrary,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Selection {
    Fixed,
    Auto,
}

#[derive(Args)]
struct InputArgs {
    /// CSV with header `feature_id,p1,p2`, or `feature_id,p1_left,p2_left`
    /// with --two-sided.
    #[arg(long)]
    input: PathBuf,
    /// Input holds left-sided p-values; claims are directional.
    #[arg(long)]
    two_sided: bool,
}

#[derive(Args)]
struct ProcedureArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Share of alpha spent on study one.
    #[arg(long, default_value_t = 0.5)]
    c: f64,
    /// Plug-in parameter of the adaptive procedures [default: alpha].
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = Rate::Fdr)]
    rate: Rate,
    #[arg(long)]
    adaptive: bool,
}

impl ProcedureArgs {
    fn config(&self) -> ProcedureConfig {
        ProcedureConfig::new(self.alpha)
            .with_c(self.c)
            .with_lambda(self.lambda.unwrap_or(self.alpha))
            .with_adaptive(self.adaptive)
            .with_error_rate(match self.rate {
                Rate::Fwer => ErrorRate::Fwer,
                Rate::Fdr => ErrorRate::Fdr,
            })
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    procedure: ProcedureArgs,
    #[arg(long, value_enum, default_value_t = DependenceArg::Independent)]
    dependence: DependenceArg,
    #[arg(long, value_enum, default_value_t = Selection::Fixed)]
    selection: Selection,
    /// Selection threshold for study one (fixed selection).
    #[arg(long)]
    t1: Option<f64>,
    /// Selection threshold for study two (fixed selection).
    #[arg(long)]
    t2: Option<f64>,
    /// Accepted for interface symmetry; the analysis is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report as CSV to this path.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    procedure: ProcedureArgs,
    /// Print the iteration trajectory.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    scenario: PathBuf,
    /// Comma-separated signal means; one block of rows per value.
    #[arg(long, value_delimiter = ',')]
    mu_sweep: Option<Vec<f64>>,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads [default: all cores]. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn read_input(args: &InputArgs) -> Result<Option<TwoStudyPValues>> {
    let file = File::open(&args.input).with_context(|| format!("cannot open {}", args.input.display()))?;
    let mode = if args.two_sided {
        PValueMode::LeftSided
    } else {
        PValueMode::OneSided
    };
    read_pvalues(BufReader::new(file), mode).with_context(|| format!("cannot read {}", args.input.display()))
}

const EMPTY_MESSAGE: &str = "no features selected in both studies";

struct ReportRow {
    feature_id: String,
    direction: &'static str,
    working_p1: f64,
    working_p2: f64,
    bonferroni_r: f64,
    fdr_r: f64,
    discovered: bool,
}

fn report_rows(pvals: &TwoStudyPValues, analysis: &Analysis) -> Vec<ReportRow> {
    let Some(sel) = &analysis.selection else {
        return Vec::new();
    };
    let discovered = &analysis.discoveries.indices;
    analysis
        .table
        .entries
        .iter()
        .map(|e| {
            let j = e.index;
            ReportRow {
                feature_id: pvals.feature_ids()[j].clone(),
                direction: sel.directions()[j].as_str(),
                working_p1: sel.working_p1()[j],
                working_p2: sel.working_p2()[j],
                bonferroni_r: e.reported_bonferroni(),
                fdr_r: e.reported_fdr(),
                discovered: discovered.contains(&j),
            }
        })
        .collect()
}

fn header(alpha: f64) -> [String; 7] {
    [
        "feature_id".into(),
        "direction".into(),
        "working_p1".into(),
        "working_p2".into(),
        "bonferroni_r".into(),
        "fdr_r".into(),
        format!("discovered@{alpha}"),
    ]
}

fn write_report_csv(path: &Path, alpha: f64, rows: &[ReportRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header(alpha))?;
    for r in rows {
        w.write_record([
            r.feature_id.clone(),
            r.direction.to_string(),
            r.working_p1.to_string(),
            r.working_p2.to_string(),
            r.bonferroni_r.to_string(),
            r.fdr_r.to_string(),
            r.discovered.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn print_table(out: &mut impl Write, alpha: f64, rows: &[ReportRow]) -> io::Result<()> {
    let h = header(alpha);
    let id_width = rows.iter().map(|r| r.feature_id.len()).chain([h[0].len()]).max().unwrap_or(0);
    writeln!(
        out,
        "{:<id_width$}  {:<9}  {:>10}  {:>10}  {:>12}  {:>8}  {}",
        h[0], h[1], h[2], h[3], h[4], h[5], h[6]
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<id_width$}  {:<9}  {:>10.4}  {:>10.4}  {:>12.4}  {:>8.4}  {}",
            r.feature_id,
            r.direction,
            r.working_p1,
            r.working_p2,
            r.bonferroni_r,
            r.fdr_r,
            if r.discovered { "yes" } else { "no" }
        )?;
    }
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let config = args.procedure.config().with_dependence(match args.dependence {
        DependenceArg::Independent => Dependence::Independent,
        DependenceArg::Arbitrary => Dependence::Arbitrary,
    });
    let rule = match (args.selection, args.t1, args.t2) {
        (Selection::Fixed, Some(t1), Some(t2)) => SelectionRule::Fixed { t1, t2 },
        (Selection::Fixed, _, _) => bail!("--selection fixed requires both --t1 and --t2"),
        (Selection::Auto, None, None) => SelectionRule::Auto,
        (Selection::Auto, _, _) => bail!("--t1/--t2 cannot be combined with --selection auto"),
    };
    config.validate()?;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let Some(pvals) = read_input(&args.input)? else {
        if let Some(path) = &args.output {
            write_report_csv(path, config.alpha, &[])?;
        }
        writeln!(out, "{EMPTY_MESSAGE}")?;
        return Ok(());
    };

    let analysis = analyze(&pvals, &config, rule)?;
    let rows = report_rows(&pvals, &analysis);
    if let Some(path) = &args.output {
        write_report_csv(path, config.alpha, &rows)?;
    }

    if let Some(sol) = &analysis.thresholds {
        writeln!(out, "thresholds: t1={}, t2={}, converged={}", sol.t1, sol.t2, sol.converged)?;
    }
    if let Some(sel) = &analysis.selection {
        writeln!(out, "selected: S1={}, S2={}", sel.s1().len(), sel.s2().len())?;
    }
    if let Some((pi0_1, pi0_2)) = analysis.table.pi0 {
        writeln!(out, "pi0: study1={pi0_1:.4}, study2={pi0_2:.4}")?;
    }
    if let Some(w) = &analysis.discoveries.warning {
        writeln!(out, "warning: {w}")?;
    }
    if rows.is_empty() {
        writeln!(out, "{EMPTY_MESSAGE}")?;
    } else {
        print_table(&mut out, config.alpha, &rows)?;
    }
    writeln!(out, "discoveries: {}", analysis.discoveries.count())?;
    if args.verbose {
        writeln!(out, "variant: {:?}, c={}, lambda={}", analysis.table.variant, config.c, config.lambda)?;
    }
    Ok(())
}

fn print_solution(out: &mut impl Write, sol: &ThresholdSolution, verbose: bool) -> io::Result<()> {
    writeln!(out, "t1={}", sol.t1)?;
    writeln!(out, "t2={}", sol.t2)?;
    writeln!(out, "converged={}", sol.converged)?;
    writeln!(out, "iterations={}", sol.iterations)?;
    if !sol.converged {
        writeln!(out, "no replicability claims")?;
    }
    if verbose {
        for (k, (t1, t2)) in sol.trajectory.iter().enumerate() {
            writeln!(out, "step {k}: t1={t1} t2={t2}")?;
        }
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let config = args.procedure.config();
    config.validate()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let Some(pvals) = read_input(&args.input)? else {
        writeln!(out, "converged=false")?;
        writeln!(out, "no replicability claims")?;
        return Ok(());
    };
    let sol = solve_thresholds(&pvals, &config);
    print_solution(&mut out, &sol, args.verbose)?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.scenario)
        .with_context(|| format!("cannot open {}", args.scenario.display()))?;
    let mut scenario = SimScenario::from_json(&text)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let csv = pool.install(|| -> Result<String> {
        Ok(match &args.mu_sweep {
            Some(mus) => sweep_to_csv(&run_mu_sweep(&scenario, mus)?),
            None => run_scenario(&scenario)?.to_csv(),
        })
    })?;
    match &args.output {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?,
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::SolveThresholds(args) => cmd_solve(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fixture => {
            io::stdout().write_all(MICE_CSV.as_bytes())?;
            Ok(())
        }
    }
}

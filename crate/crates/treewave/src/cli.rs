//! Subcommands of the `treewave` binary.
//!
//! Exit codes: 0 when everything ran and every check passed, 2 when a
//! hypothesis was not met (for example an empty Dirichlet window), 1 on any
//! other error or failed check.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use treewave_core::chebwave::{wave_step, WaveState};
use treewave_core::deloc::obstruction_report;
use treewave_core::eigen::{eigendecompose, lanczos_largest, EigenConfig, DEFAULT_DENSE_CUTOFF};
use treewave_core::synth::{largest_admissible_depth, synthesize, verify_certificate};
use treewave_core::treekernel::{cheby_to_radial, propagation_radial};
use treewave_core::{
    EigenPair, EigenSelection, KernelCertificate, RegularGraph, SpectralPoint, SynthesisConfig,
    SynthesisParams, TreeBall,
};

use crate::{edgelist, eigio, exact, json};

pub const SCHEMA: u32 = 1;
pub const DENSE_CUTOFF_ENV: &str = "TREEWAVE_DENSE_CUTOFF";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    ChecksFailed,
    HypothesisNotMet,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::ChecksFailed => 1,
            Outcome::HypothesisNotMet => 2,
        }
    }
}

/// Exit code for an error that escaped a subcommand.
pub fn error_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<treewave_core::Error>() {
        Some(e) if e.is_hypothesis_failure() => Outcome::HypothesisNotMet.exit_code(),
        _ => 1,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "treewave",
    version,
    about = "Chebyshev wave propagation and flattening kernels on regular trees and graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare radial propagation values against exact rational walk counts.
    VerifyPropagation(VerifyArgs),
    /// Synthesize a flattening kernel and print its certificate.
    Synth(SynthArgs),
    /// Radial profiles of the wave started from the root delta, as CSV (15 significant digits).
    Wave(WaveArgs),
    /// Summary of a graph; optionally write it as an edge list.
    GraphInfo(GraphInfoArgs),
    /// Export eigenpairs of `A/√p` as JSON plus a binary sidecar.
    Eig(EigArgs),
    /// Obstruction report for one eigenvector.
    Delocalize(DelocalizeArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub p: u64,
    /// Largest even degree checked.
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Branch {
    Pos,
    Neg,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Tempered target `θ ∈ [0, π]`.
    #[arg(long, conflicts_with_all = ["branch", "t"])]
    pub theta: Option<f64>,
    /// Untempered branch; needs `--t`.
    #[arg(long, value_enum, requires = "t")]
    pub branch: Option<Branch>,
    /// Untempered parameter `t ∈ (0, log √p]`.
    #[arg(long, requires = "branch")]
    pub t: Option<f64>,
}

impl TargetArgs {
    pub fn point(&self, p: u64) -> anyhow::Result<SpectralPoint> {
        Ok(match (self.theta, self.branch, self.t) {
            (Some(theta), None, None) => SpectralPoint::tempered(p, theta)?,
            (None, Some(Branch::Pos), Some(t)) => SpectralPoint::untempered_pos(p, t)?,
            (None, Some(Branch::Neg), Some(t)) => SpectralPoint::untempered_neg(p, t)?,
            _ => bail!("give either --theta or --branch with --t"),
        })
    }
}

#[derive(Debug, Args)]
pub struct SynthTuning {
    /// Points in the tempered certificate grid.
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
    /// Constant `c` in the Dirichlet window `(cNη², 2Nη)`.
    #[arg(long, default_value_t = 0.25)]
    pub window_c: f64,
}

impl SynthTuning {
    pub fn config(&self) -> anyhow::Result<SynthesisConfig> {
        ensure!(self.grid >= 2, "--grid must be at least 2");
        ensure!(
            self.window_c > 0.0 && self.window_c.is_finite(),
            "--window-c must be positive"
        );
        Ok(SynthesisConfig {
            grid: self.grid,
            window_c: self.window_c,
            ..SynthesisConfig::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub p: u64,
    /// Support depth `N`.
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub eta: f64,
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub tuning: SynthTuning,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WaveArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub radius: usize,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A graph from an edge-list file or from the pairing model.
#[derive(Debug, Args)]
pub struct GraphSource {
    /// Edge-list file.
    #[arg(long, conflicts_with = "vertices")]
    pub input: Option<PathBuf>,
    /// Vertices of a random (p+1)-regular graph.
    #[arg(long, requires = "p")]
    pub vertices: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GraphSource {
    pub fn load(&self) -> anyhow::Result<RegularGraph> {
        let g = match (&self.input, self.vertices, self.p) {
            (Some(path), _, _) => {
                edgelist::read_graph(path).with_context(|| format!("loading {}", path.display()))?
            }
            (None, Some(n), Some(p)) => RegularGraph::random_regular(p, n, self.seed)?,
            _ => bail!("give --input or --vertices with --p"),
        };
        if let Some(p) = self.p {
            ensure!(
                g.p() == p,
                "graph has degree {} but --p {p} was given",
                g.degree()
            );
        }
        Ok(g)
    }
}

#[derive(Debug, Args)]
pub struct GraphInfoArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Write the graph as an edge list here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Only the largest `count` eigenpairs.
    #[arg(long)]
    pub count: Option<usize>,
    /// JSON index path; vectors go to the same path with extension `.bin`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DelocalizeArgs {
    #[command(flatten)]
    pub graph: GraphSource,
    /// Position in the descending spectrum.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Take eigenpairs from an `eig` export instead of solving.
    #[arg(long, conflicts_with = "vector")]
    pub eigenpairs: Option<PathBuf>,
    /// JSON array of vertex values, used as given with its Rayleigh quotient.
    #[arg(long)]
    pub vector: Option<PathBuf>,
    #[arg(long)]
    pub eta: f64,
    /// Kernel depth `N`; defaults to the largest admissible one up to `--max-depth`.
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub max_depth: usize,
    #[command(flatten)]
    pub tuning: SynthTuning,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run<W: Write>(cli: Cli, out: &mut W) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::VerifyPropagation(a) => verify_propagation(&a, out),
        Command::Synth(a) => synth(&a, out),
        Command::Wave(a) => wave(&a, out),
        Command::GraphInfo(a) => graph_info(&a, out),
        Command::Eig(a) => eig(&a, out),
        Command::Delocalize(a) => delocalize(&a, out),
    }
}

fn emit<W: Write>(text: &str, output: Option<&Path>, out: &mut W) -> anyhow::Result<()> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn eigen_config() -> anyhow::Result<EigenConfig> {
    let dense_cutoff = match std::env::var(DENSE_CUTOFF_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{DENSE_CUTOFF_ENV}={v:?}"))?,
        Err(_) => DEFAULT_DENSE_CUTOFF,
    };
    Ok(EigenConfig {
        dense_cutoff,
        ..EigenConfig::default()
    })
}

pub fn verify_propagation<W: Write>(args: &VerifyArgs, out: &mut W) -> anyhow::Result<Outcome> {
    ensure!(args.n_max.is_multiple_of(2), "--n-max must be even");
    ensure!(
        args.n_max <= exact::MAX_DEGREE,
        "--n-max must be at most {}",
        exact::MAX_DEGREE
    );
    let mut outcome = Outcome::Success;
    for n in (0..=args.n_max).step_by(2) {
        let oracle = exact::propagation_oracle(args.p, n)?;
        let formula = exact::propagation_formula(args.p, n)?;
        let float = propagation_radial(args.p, n)?;
        let floats_match = float.coeffs().len() == oracle.len()
            && float
                .coeffs()
                .iter()
                .zip(&oracle)
                .all(|(f, q)| exact::nearest_f64(q) == Some(*f));
        let pass = oracle == formula && floats_match;
        if !pass {
            outcome = Outcome::ChecksFailed;
        }
        let values: Vec<String> = oracle.iter().map(ToString::to_string).collect();
        writeln!(
            out,
            "{} p={} n={n} [{}]",
            if pass { "PASS" } else { "FAIL" },
            args.p,
            values.join(", ")
        )?;
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct SynthParamsOut {
    p: u64,
    depth: usize,
    eta: f64,
    target: SpectralPoint,
    grid: usize,
    window_c: f64,
}

#[derive(Serialize)]
struct KernelOut<'a> {
    p: u64,
    /// Coefficient of `P_n[T/2]` at index `n`.
    chebyshev: &'a [f64],
    /// Value on sphere `j` at index `j`.
    radial: Vec<f64>,
}

#[derive(Serialize)]
struct VerificationOut {
    ok: bool,
    violations: Vec<String>,
}

#[derive(Serialize)]
struct SynthOut<'a> {
    schema: u32,
    params: SynthParamsOut,
    certificate: &'a KernelCertificate,
    kernel: KernelOut<'a>,
    verification: VerificationOut,
}

pub fn synth<W: Write>(args: &SynthArgs, out: &mut W) -> anyhow::Result<Outcome> {
    let config = args.tuning.config()?;
    let target = args.target.point(args.p)?;
    let params = SynthesisParams {
        p: args.p,
        depth: args.depth,
        eta: args.eta,
        target,
    };
    let (kernel, cert) = synthesize(&params, &config)?;
    let check = verify_certificate(&kernel, &cert, args.depth, args.eta, &target, &config);
    let radial = cheby_to_radial(&kernel, args.depth)?;
    let report = SynthOut {
        schema: SCHEMA,
        params: SynthParamsOut {
            p: args.p,
            depth: args.depth,
            eta: args.eta,
            target,
            grid: config.grid,
            window_c: config.window_c,
        },
        certificate: &cert,
        kernel: KernelOut {
            p: kernel.p(),
            chebyshev: kernel.coeffs(),
            radial: radial.coeffs().to_vec(),
        },
        verification: VerificationOut {
            ok: check.is_ok(),
            violations: check.violations.iter().map(|v| format!("{v:?}")).collect(),
        },
    };
    emit(&json::to_string(&report)?, args.output.as_deref(), out)?;
    Ok(if check.is_ok() {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}

/// Rows `(step, sphere, value)` of `P_n[T/2]δ_0` for `n ≤ steps`, `j ≤ n`,
/// computed by the two-component wave recursion on a ball of radius `radius`.
pub fn wave_profile(
    p: u64,
    radius: usize,
    steps: usize,
) -> anyhow::Result<Vec<(usize, usize, f64)>> {
    ensure!(
        radius >= steps,
        "radius {radius} is smaller than steps {steps}"
    );
    let ball = TreeBall::new(p, radius);
    let op = ball.adjacency().normalized(p);
    let mut state = WaveState::delta(ball.n_vertices(), 0);
    let mut rows = Vec::new();
    for n in 0..=steps {
        if n > 0 {
            state = wave_step(&state, &op)?;
        }
        for j in 0..=n {
            rows.push((n, j, state.phi[ball.sphere(j).start]));
        }
    }
    Ok(rows)
}

// 15 significant digits, printed in shortest form.
fn round15(v: f64) -> f64 {
    format!("{v:.14e}").parse().expect("formatted float parses")
}

pub fn wave<W: Write>(args: &WaveArgs, out: &mut W) -> anyhow::Result<Outcome> {
    let rows = wave_profile(args.p, args.radius, args.steps)?;
    let mut csv = String::from("step,sphere,value\n");
    for (n, j, v) in rows {
        csv.push_str(&format!("{n},{j},{}\n", round15(v)));
    }
    emit(&csv, args.output.as_deref(), out)?;
    Ok(Outcome::Success)
}

#[derive(Serialize)]
struct GraphInfoOut {
    schema: u32,
    n_vertices: usize,
    p: u64,
    degree: usize,
    n_edges: usize,
    girth: Option<usize>,
    /// Two largest eigenvalues of `A/√p`.
    lambda_t_top: Vec<f64>,
    /// `2`, the edge of the tempered spectrum.
    tempered_edge: f64,
}

pub fn graph_info<W: Write>(args: &GraphInfoArgs, out: &mut W) -> anyhow::Result<Outcome> {
    let g = args.graph.load()?;
    if let Some(path) = &args.output {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        edgelist::write(&g, std::io::BufWriter::new(file))?;
    }
    let (mut top, _) = lanczos_largest(&g.normalized(), 2.min(g.n_vertices()), 1e-10)?;
    top.sort_by(|a, b| b.total_cmp(a));
    let info = GraphInfoOut {
        schema: SCHEMA,
        n_vertices: g.n_vertices(),
        p: g.p(),
        degree: g.degree(),
        n_edges: g.adjacency().n_edges(),
        girth: g.girth(),
        lambda_t_top: top,
        tempered_edge: 2.0,
    };
    out.write_all(json::to_string(&info)?.as_bytes())?;
    Ok(Outcome::Success)
}

pub fn eig<W: Write>(args: &EigArgs, out: &mut W) -> anyhow::Result<Outcome> {
    let g = args.graph.load()?;
    let selection = args
        .count
        .map_or(EigenSelection::All, EigenSelection::Largest);
    let pairs = eigendecompose(&g, selection, &eigen_config()?)?;
    let sidecar = eigio::write(&pairs, &args.output)?;
    writeln!(
        out,
        "{} eigenpairs: {} ({})",
        pairs.len(),
        args.output.display(),
        sidecar.display()
    )?;
    Ok(Outcome::Success)
}

fn select_pair(args: &DelocalizeArgs, g: &RegularGraph) -> anyhow::Result<EigenPair> {
    if let Some(path) = &args.vector {
        let values: Vec<f64> = serde_json::from_str(&fs::read_to_string(path)?)
            .with_context(|| format!("reading vector from {}", path.display()))?;
        return Ok(EigenPair::from_rayleigh(g, values)?);
    }
    let mut pairs = match &args.eigenpairs {
        Some(path) => eigio::read(path)?,
        None => {
            let config = eigen_config()?;
            let selection = if g.n_vertices() <= config.dense_cutoff {
                EigenSelection::All
            } else {
                EigenSelection::Largest(args.index + 1)
            };
            eigendecompose(g, selection, &config)?
        }
    };
    ensure!(
        args.index < pairs.len(),
        "index {} out of range ({} eigenpairs)",
        args.index,
        pairs.len()
    );
    let pair = pairs.swap_remove(args.index);
    ensure!(
        pair.vector.len() == g.n_vertices(),
        "eigenvector length does not match the graph"
    );
    Ok(pair)
}

pub fn delocalize<W: Write>(args: &DelocalizeArgs, out: &mut W) -> anyhow::Result<Outcome> {
    let config = args.tuning.config()?;
    let g = args.graph.load()?;
    let pair = select_pair(args, &g)?;
    let depth = match args.depth {
        Some(d) => d,
        None => {
            match largest_admissible_depth(g.p(), args.eta, pair.spectral, args.max_depth, &config)
            {
                Some((d, _, _)) => d,
                None => {
                    // Surface the diagnostic from the largest depth.
                    synthesize(
                        &SynthesisParams {
                            p: g.p(),
                            depth: args.max_depth,
                            eta: args.eta,
                            target: pair.spectral,
                        },
                        &config,
                    )?;
                    bail!("no admissible depth up to {}", args.max_depth);
                }
            }
        }
    };
    let report = obstruction_report(&g, &pair, args.eta, depth, &config)?;
    emit(&json::to_string(&report)?, args.output.as_deref(), out)?;
    Ok(if !report.hypothesis_met {
        Outcome::HypothesisNotMet
    } else if report.all_checks_pass() {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (anyhow::Result<Outcome>, String) {
        let cli =
            Cli::try_parse_from(std::iter::once("treewave").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        let res = run(cli, &mut buf);
        (res, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn verify_propagation_p5() {
        let (res, text) = run_args(&["verify-propagation", "--p", "5", "--n-max", "2"]);
        assert_eq!(res.unwrap(), Outcome::Success);
        assert!(text.contains("PASS p=5 n=2 [-2/5, 0, 1/10]"), "{text}");
        let (res, text) = run_args(&["verify-propagation", "--p", "2", "--n-max", "0"]);
        assert_eq!(res.unwrap(), Outcome::Success);
        assert_eq!(text, "PASS p=2 n=0 [1]\n");
        assert!(
            run_args(&["verify-propagation", "--p", "2", "--n-max", "3"])
                .0
                .is_err()
        );
    }

    #[test]
    fn wave_rows() {
        let rows = wave_profile(5, 4, 2).unwrap();
        let at = |n: usize, j: usize| rows.iter().find(|r| r.0 == n && r.1 == j).unwrap().2;
        assert!((at(2, 0) + 0.4).abs() < 1e-15);
        assert!((at(2, 2) - 0.1).abs() < 1e-15);
        assert_eq!(at(2, 1), 0.0);
        assert_eq!(wave_profile(3, 0, 0).unwrap(), vec![(0, 0, 1.0)]);
        assert!(wave_profile(2, 3, 4).is_err());
    }

    #[test]
    fn target_parsing() {
        let t = TargetArgs {
            theta: Some(1.0),
            branch: None,
            t: None,
        };
        assert!(matches!(
            t.point(2).unwrap(),
            SpectralPoint::Tempered { .. }
        ));
        let t = TargetArgs {
            theta: None,
            branch: Some(Branch::Neg),
            t: Some(0.1),
        };
        assert!(matches!(
            t.point(3).unwrap(),
            SpectralPoint::UntemperedNeg { .. }
        ));
        let t = TargetArgs {
            theta: None,
            branch: None,
            t: None,
        };
        assert!(t.point(2).is_err());
    }

    #[test]
    fn error_codes() {
        let e: anyhow::Error = treewave_core::Error::InsufficientDepth {
            depth: 2,
            min_depth: 8,
        }
        .into();
        assert_eq!(error_code(&e), 2);
        let e: anyhow::Error = treewave_core::Error::SelfLoop { vertex: 1 }.into();
        assert_eq!(error_code(&e), 1);
        assert_eq!(error_code(&anyhow::anyhow!("io")), 1);
    }
}

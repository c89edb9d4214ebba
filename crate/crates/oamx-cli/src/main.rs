//! Command-line surface: simulate, verify, resources, synth.
//!
//! Exit status: 0 on success (and all verification points passing), 1 when
//! any verification point fails, 2 for usage or parse errors.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use oamx::format::{self, ComponentList, GridFile, ReportHeader, FORMAT_VERSION};
use oamx::mesh::{butterfly_fourier, decompose_rectangular, fourier_matrix};
use oamx::network::{Interferometer, Network, Variant};
use oamx::state::CodingSubspace;
use oamx::verify::{run_point, GatePoint};
use oamx::window::max_abs_diff;

#[derive(Parser)]
#[command(
    name = "oamx",
    about = "Cyclic permutation gates on OAM-encoded photonic qudits: simulate, verify, tally, synthesize",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a gate to an input state and print the output amplitudes.
    Simulate(SimulateArgs),
    /// Verify gates against the cyclic oracle; writes a report file.
    Verify(VerifyArgs),
    /// Print the physical resource tally for a gate.
    Resources(ResourcesArgs),
    /// Synthesize a beamsplitter mesh for the d-mode Fourier gate.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    A,
    B,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::A => Variant::A,
            VariantArg::B => Variant::B,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConfigArg {
    Mz,
    Michelson,
}

impl From<ConfigArg> for Interferometer {
    fn from(c: ConfigArg) -> Interferometer {
        match c {
            ConfigArg::Mz => Interferometer::MachZehnder,
            ConfigArg::Michelson => Interferometer::Michelson,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Rectangular,
    Butterfly,
}

#[derive(Args)]
struct GateArgs {
    /// Qudit dimension (number of spatial modes).
    #[arg(long)]
    d: usize,
    /// Step between coding OAM values.
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// Base OAM value of the coding set.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    ell0: i64,
    #[arg(long, value_enum, default_value_t = VariantArg::A)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = ConfigArg::Mz)]
    config: ConfigArg,
}

impl GateArgs {
    fn build(&self) -> Result<(CodingSubspace, Network), String> {
        let sub = CodingSubspace::new(self.d, self.p, self.ell0).map_err(|e| e.to_string())?;
        let net = Network::for_gate(&sub, self.variant.into(), self.config.into())
            .map_err(|e| e.to_string())?;
        Ok((sub, net))
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    gate: GateArgs,
    /// Input state file: JSON array of [ell, mode, re, im]; "-" for stdin.
    #[arg(long = "in")]
    input: String,
    /// Evaluate each Fourier gate through its synthesized mesh.
    #[arg(long = "mesh-fourier")]
    mesh_fourier: bool,
    #[arg(long, value_enum, default_value_t = SchemeArg::Rectangular)]
    scheme: SchemeArg,
    /// Also write the output state as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Verify a single gate with these parameters (default grid otherwise).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    ell0: Option<i64>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    #[arg(long, value_enum)]
    config: Option<ConfigArg>,
    /// Sweep grid file (JSON with d, p, ell0, variants, configs arrays).
    #[arg(long, conflicts_with_all = ["d", "p", "ell0", "variant", "config"])]
    grid: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report file destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ResourcesArgs {
    #[command(flatten)]
    gate: GateArgs,
    /// Also count beamsplitters/phase shifters per Fourier gate.
    #[arg(long = "mesh-fourier")]
    mesh_fourier: bool,
    #[arg(long, value_enum, default_value_t = SchemeArg::Rectangular)]
    scheme: SchemeArg,
    /// Also write the tally as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Component list destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Resources(args) => cmd_resources(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn write_output(path: &PathBuf, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, String> {
    let (sub, net) = args.gate.build()?;
    let text = read_input(&args.input)?;
    let entries = format::parse_state_entries(&text).map_err(|e| e.to_string())?;
    let mut state =
        format::state_from_entries(args.gate.d, &entries).map_err(|e| e.to_string())?;
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-6 {
        eprintln!("warning: input norm^2 = {norm_sqr:.6e}, auto-normalizing");
        state = state.normalized().map_err(|e| e.to_string())?;
    }
    if state.iter().any(|(label, _)| !sub.contains(label.ell)) {
        eprintln!("warning: input has support outside the coding set; output entries are flagged");
    }

    let output = if args.mesh_fourier {
        let mesh = match args.scheme {
            SchemeArg::Rectangular => {
                decompose_rectangular(fourier_matrix(args.gate.d, false).view())
                    .map_err(|e| e.to_string())?
            }
            SchemeArg::Butterfly => butterfly_fourier(args.gate.d).map_err(|e| e.to_string())?,
        };
        oamx::mesh::apply_with_fourier_mesh(&net, &mesh, &state).map_err(|e| e.to_string())?
    } else {
        net.apply(&state).map_err(|e| e.to_string())?
    }
    .pruned();
    println!(
        "# gate d={} p={} ell0={} variant={} config={}",
        sub.dimension(),
        sub.step(),
        sub.base_oam(),
        match args.gate.variant {
            VariantArg::A => "a",
            VariantArg::B => "b",
        },
        match args.gate.config {
            ConfigArg::Mz => "mz",
            ConfigArg::Michelson => "michelson",
        }
    );
    println!(
        "# coding set: {}",
        sub.values()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    );
    for (label, amp) in output.iter() {
        let flag = if sub.contains(label.ell) && label.mode == 0 {
            ""
        } else {
            "  [out-of-domain]"
        };
        println!(
            "ell={} mode={} re={:.15e} im={:.15e} prob={:.15e}{flag}",
            label.ell,
            label.mode,
            amp.re,
            amp.im,
            amp.norm_sqr()
        );
    }
    if let Some(path) = &args.out {
        write_output(path, &format::state_to_json(&output))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let points: Vec<GatePoint> = if let Some(grid_path) = &args.grid {
        let text = std::fs::read_to_string(grid_path)
            .map_err(|e| format!("reading {}: {e}", grid_path.display()))?;
        GridFile::parse(&text).map_err(|e| e.to_string())?.points()
    } else if let Some(d) = args.d {
        vec![GatePoint {
            d,
            p: args.p.unwrap_or(1),
            ell0: args.ell0.unwrap_or(0),
            variant: args.variant.unwrap_or(VariantArg::A).into(),
            config: args.config.unwrap_or(ConfigArg::Mz).into(),
        }]
    } else {
        GridFile::default_grid().points()
    };

    let reports: Vec<_> = points
        .par_iter()
        .map(|&pt| run_point(pt, args.trials, args.tol, args.seed))
        .collect();

    let header = ReportHeader {
        format_version: FORMAT_VERSION,
        tol: args.tol,
        trials: args.trials,
        seed: args.seed,
        points: reports.len(),
    };
    let text = format::write_report_file(&header, &reports);
    match &args.out {
        Some(path) => write_output(path, &text)?,
        None => print!("{text}"),
    }

    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        eprintln!("all {} points passed at tol {:.1e}", reports.len(), args.tol);
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "{failed} of {} points failed at tol {:.1e}",
            reports.len(),
            args.tol
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_resources(args: ResourcesArgs) -> Result<ExitCode, String> {
    let (_, net) = args.gate.build()?;
    let tally = net.tally();
    let components = ComponentList::from_network(&net);
    println!("gate resources (d={}, p={}):", args.gate.d, args.gate.p);
    println!("  sorters          {}", tally.sorter_count);
    println!(
        "  SPPs             {}  (orders: {})",
        tally.spp_count(),
        tally
            .spp_orders
            .iter()
            .map(|n| format!("{n:+}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("  Fourier gates    {}", tally.fourier_count);
    println!("  phase plates     {}", tally.dove_phase_count);
    println!("  retroreflectors  {}", tally.retroreflector_count);
    println!("  circulators      {}", tally.circulator_count);

    let mut mesh_json = None;
    if args.mesh_fourier {
        let mesh = match args.scheme {
            SchemeArg::Rectangular => {
                decompose_rectangular(fourier_matrix(args.gate.d, false).view())
                    .map_err(|e| e.to_string())?
            }
            SchemeArg::Butterfly => butterfly_fourier(args.gate.d).map_err(|e| e.to_string())?,
        };
        let scheme = match args.scheme {
            SchemeArg::Rectangular => "rectangular",
            SchemeArg::Butterfly => "butterfly",
        };
        println!(
            "  per Fourier gate ({scheme}): {} beamsplitters, {} phase shifters",
            mesh.beamsplitter_count(),
            mesh.phase_shifter_count()
        );
        println!(
            "  all {} Fourier gates as meshes: {} beamsplitters, {} phase shifters",
            tally.fourier_count,
            tally.fourier_count * mesh.beamsplitter_count(),
            tally.fourier_count * mesh.phase_shifter_count()
        );
        mesh_json = Some(serde_json::json!({
            "scheme": scheme,
            "beamsplitters_per_fourier": mesh.beamsplitter_count(),
            "phase_shifters_per_fourier": mesh.phase_shifter_count(),
        }));
    }

    if let Some(path) = &args.out {
        let doc = serde_json::json!({
            "format_version": FORMAT_VERSION,
            "tally": tally,
            "mesh_fourier": mesh_json,
            "components": components,
        });
        write_output(path, &serde_json::to_string_pretty(&doc).unwrap())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(args: SynthArgs) -> Result<ExitCode, String> {
    let target = fourier_matrix(args.d, false);
    let mesh = match args.scheme {
        SchemeArg::Rectangular => {
            decompose_rectangular(target.view()).map_err(|e| e.to_string())?
        }
        SchemeArg::Butterfly => butterfly_fourier(args.d).map_err(|e| e.to_string())?,
    };
    let residual = max_abs_diff(mesh.matrix().view(), target.view());
    let list = ComponentList::from_mesh(&mesh, Some(residual));
    let text = list.to_json();
    match &args.out {
        Some(path) => {
            write_output(path, &text)?;
            eprintln!(
                "wrote {} beamsplitters, residual {residual:.3e}",
                mesh.beamsplitter_count()
            );
        }
        None => println!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use listcol::bench::{aux_constant, run_algorithm, run_bench, write_csv, Algorithm, BenchConfig};
use listcol::instance::{
    parse_clique_instance, parse_instance, parse_partition, random_instance_with,
    random_partitioned_instance_with, reduce_multicoloured_clique, serialize_clique_instance,
    serialize_instance, serialize_partition, PartitionSpec, RandomSpec,
};
use listcol::oracle::{brute_force_solve, dp_solve, BruteConfig, Colouring};
use listcol::pathwidth::{parse_events, tree_decomposition, validate_nice};
use listcol::{Error, Instance, MulticolouredCliqueInstance, RootedTree, WorkspaceMeter};

#[derive(Parser)]
#[command(name = "listcol", version, about = "List colouring of trees in small space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Brute,
    Dp,
    Log2,
    Log,
    Pathwidth,
    Tpw,
}

impl From<Alg> for Algorithm {
    fn from(a: Alg) -> Self {
        match a {
            Alg::Brute => Algorithm::Brute,
            Alg::Dp => Algorithm::Dp,
            Alg::Log2 => Algorithm::Log2,
            Alg::Log => Algorithm::Log,
            Alg::Pathwidth => Algorithm::Pathwidth,
            Alg::Tpw => Algorithm::Tpw,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Random tree instance.
    Tree,
    /// Random instance with a tree-partition of width `--width`.
    Partitioned,
    /// Random multicoloured clique instance with `--width` classes.
    Clique,
}

#[derive(Subcommand)]
enum Command {
    /// Decide list colourability; prints YES or NO.
    Solve {
        #[arg(long, value_enum)]
        alg: Alg,
        #[arg(long)]
        input: PathBuf,
        /// Tree-partition file for `tpw` (default: one bag per vertex).
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Print a colouring after YES (brute and dp only).
        #[arg(long)]
        witness: bool,
        /// Log every frame push and pop to stderr.
        #[arg(long)]
        trace: bool,
        /// Write the nice path decomposition used by `pathwidth`.
        #[arg(long)]
        emit_pd: Option<PathBuf>,
    },
    /// Generate a random instance.
    Gen {
        #[arg(long, value_enum, default_value = "tree")]
        kind: Kind,
        /// Vertices (tree), bags (partitioned) or class size (clique).
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        min_list: usize,
        #[arg(long, default_value_t = 3)]
        max_list: usize,
        /// Palette size; defaults to n.
        #[arg(long)]
        palette: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the partition of a `partitioned` instance.
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
    /// Reduce a multicoloured clique instance to list colouring.
    ReduceClique {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        partition_out: Option<PathBuf>,
    },
    /// Check an instance and, optionally, a partition or decomposition of it.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Introduce/forget event file.
        #[arg(long)]
        pd: Option<PathBuf>,
    },
    /// Metered runs on random trees, as CSV.
    Bench {
        #[arg(long, value_enum, value_delimiter = ',', required = true)]
        algs: Vec<Alg>,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run sizes above the per-algorithm caps too.
        #[arg(long)]
        no_caps: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Invalid(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Invalid(format!("stdout: {e}"))),
    }
}

fn decision(yes: bool) -> ExitCode {
    println!("{}", if yes { "YES" } else { "NO" });
    ExitCode::from(if yes { 0 } else { 1 })
}

fn print_witness(c: &Colouring) {
    let line: Vec<String> = c.0.iter().map(|x| x.to_string()).collect();
    println!("{}", line.join(" "));
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    match cmd {
        Command::Solve {
            alg,
            input,
            partition,
            witness,
            trace,
            emit_pd,
        } => {
            let inst = parse_instance(&read(&input)?)?;
            solve(alg.into(), &inst, partition.as_deref(), witness, trace, emit_pd.as_deref())
        }
        Command::Gen {
            kind,
            n,
            width,
            min_list,
            max_list,
            palette,
            edge_prob,
            seed,
            out,
            partition_out,
        } => {
            let palette = palette.unwrap_or(n);
            match kind {
                Kind::Tree => {
                    let spec = RandomSpec {
                        n,
                        min_list,
                        max_list,
                        palette,
                    };
                    write_or_print(out.as_deref(), &serialize_instance(&random_instance_with(spec, seed)))?;
                }
                Kind::Partitioned => {
                    let spec = PartitionSpec {
                        bags: n,
                        k: width,
                        min_list,
                        max_list,
                        palette: palette.max(width),
                        edge_prob,
                    };
                    let (inst, tp) = random_partitioned_instance_with(spec, seed);
                    write_or_print(out.as_deref(), &serialize_instance(&inst))?;
                    if let Some(p) = partition_out {
                        write_or_print(Some(&p), &serialize_partition(&tp))?;
                    }
                }
                Kind::Clique => {
                    if width < 2 {
                        return Err(Error::Invalid("clique instances need --width ≥ 2".into()));
                    }
                    let mc = MulticolouredCliqueInstance::random(width, n, edge_prob, seed);
                    write_or_print(out.as_deref(), &serialize_clique_instance(&mc))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::ReduceClique {
            input,
            out,
            partition_out,
        } => {
            let mc = parse_clique_instance(&read(&input)?)?;
            let (h, tp) = reduce_multicoloured_clique(&mc)?;
            write_or_print(out.as_deref(), &serialize_instance(&h))?;
            if let Some(p) = partition_out {
                write_or_print(Some(&p), &serialize_partition(&tp))?;
            }
            eprintln!("n={} width={}", h.n(), tp.width());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { input, partition, pd } => {
            let inst = parse_instance(&read(&input)?)?;
            println!(
                "instance ok: n={} m={} tree={}",
                inst.n(),
                inst.graph.edges().len(),
                if inst.is_tree() { "yes" } else { "no" }
            );
            if let Some(p) = partition {
                let tp = parse_partition(&read(&p)?)?;
                let w = tp.validate(&inst.graph)?;
                println!("partition ok: bags={} width={w}", tp.bags.len());
            }
            if let Some(p) = pd {
                let npd = parse_events(&read(&p)?)?;
                let b = validate_nice(&inst.graph, &npd)?;
                println!("decomposition ok: max bag {b}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            algs,
            sizes,
            reps,
            seed,
            out,
            no_caps,
        } => {
            let cfg = BenchConfig {
                algorithms: algs.into_iter().map(Algorithm::from).collect(),
                sizes,
                reps,
                seed,
                respect_caps: !no_caps,
            };
            let rows = run_bench(&cfg);
            match out {
                Some(p) => {
                    let f = fs::File::create(&p).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
                    write_csv(&rows, f)?;
                }
                None => write_csv(&rows, io::stdout().lock())?,
            }
            if let Some(c) = aux_constant(&rows) {
                eprintln!("aux constant C = {c:.3} (max aux bits / 2^(j+1) over log runs)");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn solve(
    alg: Algorithm,
    inst: &Instance,
    partition: Option<&Path>,
    witness: bool,
    trace: bool,
    emit_pd: Option<&Path>,
) -> Result<ExitCode, Error> {
    match alg {
        Algorithm::Brute | Algorithm::Dp => {
            let found = if alg == Algorithm::Brute {
                brute_force_solve(inst, BruteConfig::default())?
            } else {
                dp_solve(inst)?
            };
            let code = decision(found.is_some());
            if let (true, Some(c)) = (witness, &found) {
                print_witness(c);
            }
            return Ok(code);
        }
        _ if witness => eprintln!("note: --witness is only supported by brute and dp"),
        _ => {}
    }
    if let Some(p) = emit_pd {
        let npd = tree_decomposition(&RootedTree::new(&inst.graph)?);
        fs::write(p, npd.to_text()).map_err(|e| Error::Invalid(format!("{}: {e}", p.display())))?;
    }
    let tp = match partition {
        Some(p) => Some(parse_partition(&read(p)?)?),
        None => None,
    };
    let mut meter = WorkspaceMeter::new(inst.n());
    if trace {
        meter.set_trace(Box::new(|line| eprintln!("{line}")));
    }
    let (yes, _) = run_algorithm(alg, inst, tp.as_ref(), &mut meter)?;
    let peaks = meter.peak_report();
    eprintln!(
        "peak_persistent_bits={} peak_scratch_bits={} scratch_violations={}",
        peaks.peak_persistent, peaks.peak_scratch, peaks.scratch_violations
    );
    Ok(decision(yes))
}

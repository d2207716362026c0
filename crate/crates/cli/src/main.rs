//! Command-line front end for the referee-model simulator.
//!
//! Exit codes: 0 on success (including a `false` recognition verdict),
//! 1 on domain rejections (protocol rejected the messages, reduction
//! precondition violated, undecodable summary), 2 on usage errors and
//! malformed input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use referee_core::codec;
use referee_core::graph::{self, LabelledGraph};
use referee_core::protocol::{DegeneracyProtocol, ProtocolMode, ProtocolSpec};
use referee_core::reductions::{self, DecidedProperty, GadgetKind};
use referee_core::sim::{self, Message, Output};

const EXIT_OK: u8 = 0;
const EXIT_REJECTED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "referee", version, about = "One-round referee-model protocol simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph of degeneracy at most k (edge-list output)
    Gen {
        /// Number of vertices
        #[arg(long)]
        n: usize,
        /// Degeneracy bound
        #[arg(long)]
        k: usize,
        /// RNG seed; required, runs are reproducible
        #[arg(long)]
        seed: u64,
        /// Write the edge list here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the power-sum message each node of a graph would send
    Encode {
        /// Graph file in edge-list format
        #[arg(long)]
        graph: PathBuf,
        /// Degeneracy bound known to all nodes
        #[arg(long)]
        k: usize,
        /// Also encode the complement neighborhood (doubled messages)
        #[arg(long)]
        generalized: bool,
    },
    /// Decode one power-sum message back to a summary and neighbor set
    Decode {
        /// Graph size the message was encoded for
        #[arg(long)]
        n: usize,
        /// Degeneracy bound the message was encoded for
        #[arg(long)]
        k: usize,
        /// Hex payload of exactly W(n,k) bits
        #[arg(long)]
        hex: String,
    },
    /// Run a protocol on a graph and print the transcript
    Run {
        /// Protocol spec: degen:k=<K>[,generalized] | adjacency | empty
        #[arg(long)]
        protocol: String,
        /// Graph file in edge-list format
        #[arg(long)]
        graph: PathBuf,
        /// Write a reconstructed graph here as an edge list
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a degeneracy protocol in recognition mode and print the verdict
    Recognize {
        /// Protocol spec, must be degen:k=<K>[,generalized]
        #[arg(long)]
        protocol: String,
        /// Graph file in edge-list format
        #[arg(long)]
        graph: PathBuf,
    },
    /// Reconstruct a graph through a gadget reduction over a property decider
    Reduce {
        /// Gadget kind
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Graph file in edge-list format
        #[arg(long)]
        graph: PathBuf,
        /// Decider backing the reduction (only `exact` is available)
        #[arg(long, default_value = "exact")]
        oracle: String,
        /// Write the reconstruction here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure message sizes of a protocol over one or more graphs
    Frugality {
        /// Protocol spec: degen:k=<K>[,generalized] | adjacency | empty
        #[arg(long)]
        protocol: String,
        /// Graph files; repeat the flag for several graphs
        #[arg(long = "graph", required = true)]
        graphs: Vec<PathBuf>,
    },
    /// Count labelled square-free graphs on n vertices by enumeration
    #[command(name = "count-square-free")]
    CountSquareFree {
        /// Number of vertices (at most 7)
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Square,
    Diameter,
    Triangle,
}

impl From<KindArg> for GadgetKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Square => GadgetKind::Square,
            KindArg::Diameter => GadgetKind::Diameter,
            KindArg::Triangle => GadgetKind::Triangle,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(UserError { message, code }) => {
            eprintln!("error: {message}");
            code
        }
    };
    ExitCode::from(code)
}

struct UserError {
    message: String,
    code: u8,
}

fn usage_error(message: impl Into<String>) -> UserError {
    UserError { message: message.into(), code: EXIT_USAGE }
}

fn rejection(message: impl Into<String>) -> UserError {
    UserError { message: message.into(), code: EXIT_REJECTED }
}

fn load_graph(path: &PathBuf) -> Result<LabelledGraph, UserError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage_error(format!("cannot read {}: {e}", path.display())))?;
    graph::parse_edge_list(&text)
        .map_err(|e| usage_error(format!("{}: {e}", path.display())))
}

fn emit_graph(g: &LabelledGraph, out: Option<&PathBuf>) -> Result<(), UserError> {
    let text = graph::write_edge_list(g);
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| usage_error(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_spec(spec: &str) -> Result<ProtocolSpec, UserError> {
    ProtocolSpec::parse(spec).map_err(usage_error)
}

fn dispatch(command: Command) -> Result<u8, UserError> {
    match command {
        Command::Gen { n, k, seed, out } => {
            if n == 0 {
                return Err(usage_error("--n must be at least 1"));
            }
            let g = graph::gen_k_degenerate(n, k, seed);
            emit_graph(&g, out.as_ref())?;
            Ok(EXIT_OK)
        }

        Command::Encode { graph: path, k, generalized } => {
            let g = load_graph(&path)?;
            let config = if generalized {
                referee_core::protocol::DegeneracyConfig::generalized(k)
            } else {
                referee_core::protocol::DegeneracyConfig::new(k)
            };
            let p = DegeneracyProtocol::new(config);
            for v in g.vertices() {
                let m = sim::OneRoundProtocol::local_fn(&p, g.n(), v, g.neighborhood(v))
                    .map_err(|e| rejection(format!("node {v}: {e}")))?;
                println!("id {v} bits {} hex {}", m.len_bits(), m.to_hex());
            }
            Ok(EXIT_OK)
        }

        Command::Decode { n, k, hex } => {
            if n == 0 {
                return Err(usage_error("--n must be at least 1"));
            }
            let bits = codec::wire_bits(n, k);
            let msg = Message::from_hex(&hex, bits)
                .ok_or_else(|| usage_error(format!("hex payload does not hold exactly {bits} bits")))?;
            let summary = codec::deserialize(&msg, n, k)
                .map_err(|e| rejection(format!("undecodable message: {e}")))?;
            let neighbors = codec::decode(&summary, n)
                .map_err(|e| rejection(format!("undecodable message: {e}")))?;
            println!("id {}", summary.id);
            println!("degree {}", summary.degree);
            let b_line: String = summary.b.iter().map(|b| format!(" {b}")).collect();
            println!("b{b_line}");
            let nb_line: String = neighbors.iter().map(|v| format!(" {v}")).collect();
            println!("neighbors{nb_line}");
            Ok(EXIT_OK)
        }

        Command::Run { protocol, graph: path, out } => {
            let spec = parse_spec(&protocol)?;
            let g = load_graph(&path)?;
            let p = spec.build();
            let t = sim::run(p.as_ref(), &g)
                .map_err(|e| rejection(format!("run failed: {e}")))?;
            print!("{}", t.export());
            println!("max_bits {}", t.max_bits);
            match &t.output {
                Output::Graph(h) => {
                    if let Some(out) = out.as_ref() {
                        emit_graph(h, Some(out))?;
                    }
                    Ok(EXIT_OK)
                }
                Output::Rejected(_) => Ok(EXIT_REJECTED),
                _ => Ok(EXIT_OK),
            }
        }

        Command::Recognize { protocol, graph: path } => {
            let spec = parse_spec(&protocol)?;
            let config = match spec {
                ProtocolSpec::Degeneracy(c) => c,
                _ => return Err(usage_error("recognize needs a degen:k=<K> protocol")),
            };
            let g = load_graph(&path)?;
            // run in reconstruct mode so the rejection reason survives
            let mut run_config = config;
            run_config.mode = ProtocolMode::Reconstruct;
            let p = DegeneracyProtocol::new(run_config);
            let t = sim::run(&p, &g).map_err(|e| rejection(format!("run failed: {e}")))?;
            match &t.output {
                Output::Graph(_) => println!("verdict true"),
                Output::Rejected(reason) => {
                    println!("verdict false");
                    println!("reason {reason}");
                }
                other => return Err(rejection(format!("unexpected output {other:?}"))),
            }
            Ok(EXIT_OK)
        }

        Command::Reduce { kind, graph: path, oracle, out } => {
            if oracle != "exact" {
                return Err(usage_error(format!("unknown oracle `{oracle}` (only `exact`)")));
            }
            let g = load_graph(&path)?;
            let kind: GadgetKind = kind.into();
            let property = match kind {
                GadgetKind::Square => DecidedProperty::Square,
                GadgetKind::Diameter => DecidedProperty::DiameterAtMostThree,
                GadgetKind::Triangle => DecidedProperty::Triangle,
            };
            let gamma = Arc::new(reductions::oracle_decider(property));
            let report = reductions::run_reduction(&g, kind, gamma)
                .map_err(|e| rejection(e.to_string()))?;
            print!("{}", report.render_metrics());
            println!("reconstruction_exact {}", report.reconstruction == g);
            emit_graph(&report.reconstruction, out.as_ref())?;
            Ok(EXIT_OK)
        }

        Command::Frugality { protocol, graphs } => {
            let spec = parse_spec(&protocol)?;
            let loaded: Vec<LabelledGraph> =
                graphs.iter().map(load_graph).collect::<Result<_, _>>()?;
            let p = spec.build();
            let report = sim::frugality_report(p.as_ref(), &loaded, None)
                .map_err(|e| rejection(format!("run failed: {e}")))?;
            print!("{}", report.render());
            Ok(EXIT_OK)
        }

        Command::CountSquareFree { n } => {
            let count = reductions::count_square_free(n).map_err(|e| usage_error(e.to_string()))?;
            println!("{count}");
            Ok(EXIT_OK)
        }
    }
}

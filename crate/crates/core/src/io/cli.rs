use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::render::{export_obj, render_svg};
use super::schema::{parse_system_file, RunConfig, SystemDescription};
use crate::address::hutchinson_expand;
use crate::dimension::dimension_report;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::tree::{MainTree, OrderAnalyzer, OrderReport, TreeSkeleton, DEFAULT_STABILIZATION_DEPTH};
use crate::validator::{validate_system, PolyhedralSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dendrite-lab", version, about = "Certify and analyse self-similar dendrites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check D1-D4 and connectivity; exit 1 unless the attractor is a dendrite
    Validate(Common),
    /// Orders of all skeleton nodes at --depth
    Analyze(Common),
    /// Similarity, arc and covering dimensions
    Dims(Common),
    /// SVG of the depth-n expansion with its skeleton (OBJ geometry in 3D)
    Render(Common),
    /// Skeleton graph as JSON plus an SVG overlay
    Tree(Common),
}

#[derive(Debug, Args)]
struct Common {
    system_file: PathBuf,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    cover_depths: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
}

impl Common {
    fn config(&self, desc: &SystemDescription) -> RunConfig {
        let mut c = desc.config();
        if let Some(d) = self.depth {
            c.depth = d;
        }
        if let Some(d) = &self.cover_depths {
            c.cover_depths = d.clone();
        }
        if let Some(t) = self.tolerance {
            c.tolerance = t;
        }
        if let Some(b) = self.budget {
            c.piece_budget = b;
        }
        if let Some(o) = &self.out {
            c.out = Some(o.to_string_lossy().into_owned());
        }
        c
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OrdersOutput<'a> {
    name: &'a str,
    depth: usize,
    orders: Vec<OrderReport>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TreeOutput<'a> {
    name: &'a str,
    depth: usize,
    class_count: usize,
    nodes: &'a [Point],
    degrees: Vec<usize>,
    edges: &'a [crate::tree::SkeletonEdge],
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(text: &str, out: Option<&str>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_file(path: &Path, text: &str, stdout: &mut dyn Write) -> Result<()> {
    std::fs::write(path, text)?;
    writeln!(stdout, "wrote {}", path.display())?;
    Ok(())
}

enum Outcome {
    Done,
    Invalid,
}

/// Runs the command line and returns the process exit code.
pub fn run_command<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::Invalid) => EXIT_INVALID,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn load(args: &Common) -> Result<(SystemDescription, RunConfig, PolyhedralSystem)> {
    let text = std::fs::read_to_string(&args.system_file)
        .map_err(|e| Error::Io(format!("{}: {e}", args.system_file.display())))?;
    let desc = parse_system_file(&text)?;
    let config = args.config(&desc);
    let sys = desc.to_system_with(&config)?;
    Ok((desc, config, sys))
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<Outcome> {
    let (kind, args) = match &command {
        Command::Validate(a) => ("validate", a),
        Command::Analyze(a) => ("analyze", a),
        Command::Dims(a) => ("dims", a),
        Command::Render(a) => ("render", a),
        Command::Tree(a) => ("tree", a),
    };
    let (desc, config, sys) = load(args)?;
    let out = config.out.as_deref();
    let report = validate_system(&sys);
    if kind == "validate" || !report.is_dendrite() {
        emit(&json(&report), out, stdout)?;
        return Ok(if report.is_dendrite() {
            Outcome::Done
        } else {
            Outcome::Invalid
        });
    }
    match kind {
        "analyze" => {
            let mut analyzer = OrderAnalyzer::new(&sys)?;
            let orders = analyzer.all_orders(config.depth, DEFAULT_STABILIZATION_DEPTH)?;
            let output = OrdersOutput {
                name: &desc.name,
                depth: config.depth,
                orders,
            };
            emit(&json(&output), out, stdout)?;
        }
        "dims" => emit(&json(&dimension_report(&sys, &config.cover_depths)?), out, stdout)?,
        "render" => {
            let level = hutchinson_expand(&sys, config.depth)?;
            if sys.dim() == 3 {
                let path = out.map_or_else(|| PathBuf::from(format!("{}.obj", desc.name)), PathBuf::from);
                write_file(&path, &export_obj(&level), stdout)?;
            } else {
                let skeleton = MainTree::new(&sys)?.skeleton(&sys, config.depth)?;
                let path = out.map_or_else(|| PathBuf::from(format!("{}.svg", desc.name)), PathBuf::from);
                write_file(&path, &render_svg(&level, Some(&skeleton))?, stdout)?;
            }
        }
        _ => {
            let tree = MainTree::new(&sys)?;
            let skeleton: TreeSkeleton = tree.skeleton(&sys, config.depth)?;
            let output = TreeOutput {
                name: &desc.name,
                depth: skeleton.depth,
                class_count: tree.zipper.class_count,
                nodes: &skeleton.nodes,
                degrees: skeleton.degrees(),
                edges: &skeleton.edges,
            };
            emit(&json(&output), out, stdout)?;
            if sys.dim() < 3 {
                let svg_path = match out {
                    Some(p) => Path::new(p).with_extension("svg"),
                    None => PathBuf::from(format!("{}_tree.svg", desc.name)),
                };
                let level = hutchinson_expand(&sys, config.depth)?;
                let svg = render_svg(&level, Some(&skeleton))?;
                std::fs::write(&svg_path, svg)?;
            }
        }
    }
    Ok(Outcome::Done)
}

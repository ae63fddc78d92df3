use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cgel_core::format::{parse_corpus_bytes, serialize_corpus, SourceTree, Style};
use cgel_core::grammar::ConstituentGraph;
use cgel_core::render::{render_forest, RenderOptions};
use cgel_core::stats::CorpusStats;
use cgel_core::text::check_headers;
use cgel_core::validate::{validate, Diagnostic, Severity, ValidateOptions};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use walkdir::WalkDir;

/// Validate, format, render and count `.cgel` treebank files.
#[derive(Debug, Parser)]
#[command(name = "cgel-kit", version)]
struct Cli {
    /// Check space-containing tokens against the complex lexeme list.
    #[arg(long, global = true)]
    strict_lexicon: bool,

    /// Exit with status 1 when there are warnings.
    #[arg(short = 'W', long, global = true)]
    warnings_as_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report constraint violations and header mismatches.
    Validate(Inputs),
    /// Rewrite files in canonical layout.
    Fmt {
        #[command(flatten)]
        inputs: Inputs,
        /// Report files that are not canonical instead of printing them.
        #[arg(long, conflicts_with_all = ["write", "output"])]
        check: bool,
        /// Rewrite the files in place.
        #[arg(long, conflicts_with = "output")]
        write: bool,
        /// Write the formatted corpus to this file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit LaTeX forest source for each tree.
    Render {
        #[command(flatten)]
        inputs: Inputs,
        /// Directory for one .tex file per tree (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Draw subtrees at this depth as roofs.
        #[arg(long)]
        collapse_depth: Option<usize>,
        /// Wrap each tree in a standalone document.
        #[arg(long)]
        preamble: bool,
    },
    /// Count categories, functions, fused nodes, gaps and nonce constituents.
    Stats {
        #[command(flatten)]
        inputs: Inputs,
        /// Print `key<TAB>value` lines instead of a table.
        #[arg(long)]
        tsv: bool,
    },
    /// Check only the `sent` and `text` headers.
    SentCheck(Inputs),
}

#[derive(Debug, Args)]
struct Inputs {
    /// Files or directories (searched recursively for *.cgel).
    #[arg(required = true)]
    paths: Vec<PathBuf>,
}

/// Buffered result of processing one file.
#[derive(Debug, Default)]
struct Report {
    stdout: String,
    stderr: String,
    errors: usize,
    warnings: usize,
    fatal: bool,
    stats: CorpusStats,
}

impl Report {
    fn fatal(message: String) -> Self {
        Report {
            stderr: message,
            fatal: true,
            ..Report::default()
        }
    }
}

struct Painter {
    color: bool,
}

impl Painter {
    fn severity(&self, severity: Severity) -> String {
        let code = match severity {
            Severity::Error => "31",
            Severity::Warning => "33",
            Severity::Info => "36",
        };
        if self.color {
            format!("\x1b[{code}m{severity}\x1b[0m")
        } else {
            severity.to_string()
        }
    }

    fn diagnostic(&self, file: &str, d: &Diagnostic) -> String {
        format!(
            "{}:{}:{}: {} {} {} {}\n",
            file,
            d.span.start.line,
            d.span.start.column,
            self.severity(d.severity),
            d.code,
            d.path,
            d.message
        )
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let files = match collect_files(cli.command.inputs()) {
        Ok(files) => files,
        Err(message) => {
            eprintln!("cgel-kit: {message}");
            return ExitCode::from(2);
        }
    };
    let painter = Painter {
        color: std::env::var_os("NO_COLOR").is_none() && io::stdout().is_terminal(),
    };
    let options = ValidateOptions {
        strict_lexicon: cli.strict_lexicon,
    };

    if let Command::Render { output: Some(dir), .. } = &cli.command {
        if let Err(e) = fs::create_dir_all(dir) {
            eprintln!("cgel-kit: cannot create {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    }

    let reports: Vec<Report> = files
        .par_iter()
        .map(|file| process(&cli.command, file, &options, &painter))
        .collect();

    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    let mut total = Report::default();
    let to_file = matches!(&cli.command, Command::Fmt { output: Some(_), .. });
    for r in &reports {
        if !to_file {
            let _ = stdout.write_all(r.stdout.as_bytes());
        }
        let _ = stderr.write_all(r.stderr.as_bytes());
        total.errors += r.errors;
        total.warnings += r.warnings;
        total.fatal |= r.fatal;
        total.stats.merge(&r.stats);
    }

    match &cli.command {
        Command::Stats { tsv, .. } => {
            let table = if *tsv { total.stats.to_tsv() } else { total.stats.to_table() };
            let _ = stdout.write_all(table.as_bytes());
        }
        Command::Fmt { output: Some(path), .. } if !total.fatal => {
            let text: String = reports.iter().map(|r| r.stdout.as_str()).collect::<Vec<_>>().join("\n");
            if let Err(e) = fs::write(path, text) {
                eprintln!("cgel-kit: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        _ => {}
    }

    if total.fatal {
        ExitCode::from(2)
    } else if total.errors > 0 || (cli.warnings_as_errors && total.warnings > 0) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

impl Command {
    fn inputs(&self) -> &Inputs {
        match self {
            Command::Validate(i) | Command::SentCheck(i) => i,
            Command::Fmt { inputs, .. } | Command::Render { inputs, .. } | Command::Stats { inputs, .. } => inputs,
        }
    }
}

/// Expand directories into their `*.cgel` files, sorted by path.
fn collect_files(inputs: &Inputs) -> Result<Vec<PathBuf>, String> {
    let mut files = Vec::new();
    for path in &inputs.paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = WalkDir::new(path)
                .into_iter()
                .filter_map(Result::ok)
                .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "cgel"))
                .map(|e| e.into_path())
                .collect();
            found.sort();
            files.extend(found);
        } else if path.is_file() {
            files.push(path.clone());
        } else {
            return Err(format!("{}: no such file or directory", path.display()));
        }
    }
    Ok(files)
}

fn load(file: &Path) -> Result<(Vec<u8>, Vec<SourceTree>), String> {
    let name = file.display();
    let bytes = fs::read(file).map_err(|e| format!("{name}: {e}\n"))?;
    let trees = parse_corpus_bytes(&bytes)
        .map_err(|e| format!("{name}:{}:{}: error parse {}\n", e.pos.line, e.pos.column, e.kind))?;
    Ok((bytes, trees))
}

fn process(command: &Command, file: &Path, options: &ValidateOptions, painter: &Painter) -> Report {
    let (bytes, trees) = match load(file) {
        Ok(loaded) => loaded,
        Err(message) => return Report::fatal(message),
    };
    let name = file.display().to_string();
    let mut report = Report::default();
    match command {
        Command::Validate(_) | Command::SentCheck(_) => {
            let headers_only = matches!(command, Command::SentCheck(_));
            for tree in &trees {
                let graph = ConstituentGraph::from_tree(tree);
                let mut diags = if headers_only { Vec::new() } else { validate(&graph, options) };
                diags.extend(check_headers(tree, &graph));
                diags.sort_by(|a, b| a.path.cmp(&b.path).then(a.code.cmp(&b.code)));
                for d in &diags {
                    match d.severity {
                        Severity::Error => report.errors += 1,
                        Severity::Warning => report.warnings += 1,
                        Severity::Info => {}
                    }
                    report.stdout.push_str(&painter.diagnostic(&name, d));
                }
            }
        }
        Command::Fmt { check, write, .. } => {
            let formatted = serialize_corpus(&trees, Style::Canonical);
            if *check {
                if formatted.as_bytes() != bytes.as_slice() {
                    report.errors += 1;
                    report.stdout = first_difference(&name, &String::from_utf8_lossy(&bytes), &formatted);
                }
            } else if *write {
                if formatted.as_bytes() != bytes.as_slice() {
                    if let Err(e) = fs::write(file, &formatted) {
                        return Report::fatal(format!("{name}: {e}\n"));
                    }
                }
            } else {
                report.stdout = formatted;
            }
        }
        Command::Render {
            output,
            collapse_depth,
            preamble,
            ..
        } => {
            let render_options = RenderOptions {
                collapse_depth: *collapse_depth,
                preamble: *preamble,
                ..RenderOptions::default()
            };
            let stem = file.file_stem().map_or("tree".into(), |s| s.to_string_lossy().into_owned());
            for (index, tree) in trees.iter().enumerate() {
                let graph = ConstituentGraph::from_tree(tree);
                match render_forest(&graph, &render_options) {
                    Ok(tex) => match output {
                        Some(dir) => {
                            let path = dir.join(format!("{stem}-{}.tex", index + 1));
                            if let Err(e) = fs::write(&path, tex) {
                                return Report::fatal(format!("{}: {e}\n", path.display()));
                            }
                        }
                        None => report.stdout.push_str(&tex),
                    },
                    Err(e) => {
                        report.errors += 1;
                        report.stderr.push_str(&format!("{name}: tree {}: {e}\n", index + 1));
                    }
                }
            }
        }
        Command::Stats { .. } => {
            for tree in &trees {
                report.stats.add_graph(&ConstituentGraph::from_tree(tree));
            }
        }
    }
    report
}

/// `FILE:LINE: not canonically formatted` plus the two versions of the line.
fn first_difference(name: &str, original: &str, formatted: &str) -> String {
    let mut a = original.lines();
    let mut b = formatted.lines();
    let mut line = 1;
    loop {
        match (a.next(), b.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            (x, y) => {
                return format!(
                    "{name}:{line}: not canonically formatted\n-{}\n+{}\n",
                    x.unwrap_or(""),
                    y.unwrap_or("")
                )
            }
        }
    }
}

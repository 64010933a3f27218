//! The `tfsmell` command line.
//!
//! Exit codes: 0 when nothing was found, 1 when `lint` or `scan` reported
//! findings, 2 on any error including bad usage.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tfsmell_core::catalog::{Catalog, CATALOG_VERSION};
use tfsmell_core::cluster::{agglomerate, categorize_with, cut, distance_matrix, Linkage, CATEGORY_THRESHOLD};
use tfsmell_core::catalog::{similarity_matrix, Category};
use tfsmell_core::sample::sample_stratified;
use tfsmell_core::{DetectorConfig, Engine};

use crate::harvest::{self, FilterCriteria, GitHubClient, HarvestOptions, ManifestIndex, ManifestWriter, Provider};
use crate::load::{load_catalog, load_config, read_json};
use crate::render::{self, Format};
use crate::scan::{self, discover, restrict, ScanOptions};

// kept in step with CATALOG_VERSION by a test below
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (catalog ", "1", ")");

#[derive(Parser, Debug)]
#[command(name = "tfsmell", version = VERSION, about = "Sustainability smell linter for Terraform")]
struct Cli {
    /// Detector configuration (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Smell catalog (JSON array) replacing the built-in one.
    #[arg(long, global = true, value_name = "FILE")]
    catalog: Option<PathBuf>,
    /// text, json or sarif.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Progress and counts on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check one project and list findings.
    Lint(ScanArgs),
    /// Scan a corpus and report findings with per-smell prevalence.
    Scan {
        #[command(flatten)]
        common: ScanArgs,
        /// Shuffle processing order with this seed (output is unaffected).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Cluster the catalog's smells by their attributes.
    Cluster {
        #[arg(long, value_enum, default_value = "average")]
        linkage: LinkageArg,
        /// Cut height for the category listing.
        #[arg(long, default_value_t = CATEGORY_THRESHOLD)]
        threshold: f64,
    },
    /// Find, filter and download Terraform repositories.
    Harvest(HarvestArgs),
    /// Print the smell catalog.
    Catalog,
    /// Pick 4 or 5 files per repository.
    Sample {
        /// Directory laid out as <owner>/<repo>/...
        #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
        root: Option<PathBuf>,
        /// Harvest manifest to sample from instead of a directory.
        #[arg(long, value_name = "FILE")]
        manifest: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Path components that name a repository under the root.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// File or directory.
    root: PathBuf,
    #[arg(long, default_value = "ast", value_parser = parse_engine)]
    engine: Engine,
    /// Worker threads; 0 means one per CPU.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Debug)]
struct HarvestArgs {
    #[arg(long, value_parser = parse_provider)]
    provider: Provider,
    #[arg(long, value_name = "DIR")]
    dest: PathBuf,
    /// Filter criteria (JSON) replacing the defaults.
    #[arg(long, value_name = "FILE")]
    criteria: Option<PathBuf>,
    /// Search and filter only; print manifest records instead of writing them.
    #[arg(long)]
    dry_run: bool,
    #[arg(long, default_value = harvest::DEFAULT_API_URL)]
    api_url: String,
    /// Parallel repository downloads.
    #[arg(long, default_value_t = 4)]
    jobs: usize,
    /// API token; overrides the environment variable.
    #[arg(long)]
    token: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LinkageArg {
    Single,
    Complete,
    Average,
}

impl From<LinkageArg> for Linkage {
    fn from(l: LinkageArg) -> Linkage {
        match l {
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Average => Linkage::Average,
        }
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: render::UnknownFormat| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse()
}

fn parse_provider(s: &str) -> Result<Provider, String> {
    s.parse()
}

struct Ctx<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    output: Option<PathBuf>,
    format: Format,
    verbose: u8,
}

impl Ctx<'_> {
    fn emit(&mut self, text: &str) -> Result<(), String> {
        match &self.output {
            Some(path) => fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => self.stdout.write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
        }
    }

    fn note(&mut self, msg: &str) {
        if self.verbose > 0 {
            let _ = writeln!(self.stderr, "{msg}");
        }
    }

    fn text_or_json(&self, what: &str) -> Result<(), String> {
        match self.format {
            Format::Sarif => Err(format!("--format sarif is not available for {what}")),
            _ => Ok(()),
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let mut ctx = Ctx { stdout, stderr, output: cli.output, format: cli.format, verbose: cli.verbose };
    let result = dispatch(cli.command, cli.config.as_deref(), cli.catalog.as_deref(), &mut ctx);
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(ctx.stderr, "error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command, config: Option<&Path>, catalog_path: Option<&Path>, ctx: &mut Ctx) -> Result<i32, String> {
    let catalog = load_catalog(catalog_path).map_err(|e| e.to_string())?;
    match command {
        Command::Lint(args) => {
            let cfg = load_config(config).map_err(|e| e.to_string())?;
            scan_cmd(&args, None, false, &cfg, &catalog, ctx)
        }
        Command::Scan { common, seed } => {
            let cfg = load_config(config).map_err(|e| e.to_string())?;
            scan_cmd(&common, seed, true, &cfg, &catalog, ctx)
        }
        Command::Cluster { linkage, threshold } => cluster_cmd(&catalog, linkage.into(), threshold, ctx),
        Command::Catalog => catalog_cmd(&catalog, ctx),
        Command::Harvest(args) => harvest_cmd(args, ctx),
        Command::Sample { root, manifest, seed, depth } => sample_cmd(root.as_deref(), manifest.as_deref(), seed, depth, ctx),
    }
}

fn scan_cmd(
    args: &ScanArgs,
    seed: Option<u64>,
    with_stats: bool,
    cfg: &DetectorConfig,
    catalog: &Catalog,
    ctx: &mut Ctx,
) -> Result<i32, String> {
    let opts = ScanOptions { engine: args.engine, jobs: args.jobs, seed };
    let mut report = scan::scan(&args.root, cfg, &opts).map_err(|e| e.to_string())?;
    restrict(&mut report, &catalog.ids());
    ctx.note(&format!(
        "scanned {} files, {} findings, {} parse failures",
        report.scanned_files,
        report.findings.len(),
        report.parse_failures
    ));
    if report.parse_failures > 0 {
        let _ = writeln!(ctx.stderr, "warning: {} files could not be parsed", report.parse_failures);
    }
    let stats = if with_stats { report.stats().ok() } else { None };
    ctx.emit(&render::render(&report, stats.as_ref(), catalog, ctx.format))?;
    Ok(if report.findings.is_empty() { 0 } else { 1 })
}

fn cluster_cmd(catalog: &Catalog, linkage: Linkage, threshold: f64, ctx: &mut Ctx) -> Result<i32, String> {
    ctx.text_or_json("cluster")?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(format!("--threshold must be between 0 and 1, got {threshold}"));
    }
    let dendrogram = agglomerate(&distance_matrix(&similarity_matrix(catalog)), linkage);
    if ctx.format == Format::Json {
        let mut text = serde_json::to_string(&dendrogram).map_err(|e| e.to_string())?;
        text.push('\n');
        return ctx.emit(&text).map(|()| 0);
    }
    let default_cut = threshold == CATEGORY_THRESHOLD;
    let assignment = if default_cut { categorize_with(catalog, linkage) } else { cut(&dendrogram, threshold) };
    let mut out = String::new();
    for label in 1..=assignment.num_clusters {
        let members: Vec<&str> = assignment.members(label).into_iter().map(|id| id.as_str()).collect();
        if default_cut {
            let name = Category(label as u32).name();
            let _ = writeln!(out, "{label} {name}: {}", members.join(", "));
        } else {
            let _ = writeln!(out, "{label}: {}", members.join(", "));
        }
    }
    out.push('\n');
    let n = dendrogram.leaves.len();
    let node = |i: usize| if i < n { dendrogram.leaves[i].as_str().to_string() } else { format!("#{}", i - n) };
    for (k, m) in dendrogram.merges.iter().enumerate() {
        let _ = writeln!(out, "#{k} = {} + {} at {}", node(m.left), node(m.right), m.distance);
    }
    ctx.emit(&out).map(|()| 0)
}

fn catalog_cmd(catalog: &Catalog, ctx: &mut Ctx) -> Result<i32, String> {
    ctx.text_or_json("catalog")?;
    if ctx.format == Format::Json {
        let mut text = serde_json::to_string(catalog).map_err(|e| e.to_string())?;
        text.push('\n');
        return ctx.emit(&text).map(|()| 0);
    }
    let mut out = format!("catalog version {CATALOG_VERSION}\n");
    for d in catalog.descriptors() {
        let _ = writeln!(out, "\n{} {} [{}]", d.id, d.name, d.category.name());
        let _ = writeln!(out, "  {}", d.summary);
        let _ = writeln!(out, "  fix: {}", d.remediation);
    }
    ctx.emit(&out).map(|()| 0)
}

/// A `Write` handle onto a shared buffer, for collecting dry-run records.
#[derive(Clone, Default)]
struct SharedBuf(Arc<Mutex<Vec<u8>>>);

impl Write for SharedBuf {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

fn harvest_cmd(args: HarvestArgs, ctx: &mut Ctx) -> Result<i32, String> {
    ctx.text_or_json("harvest")?;
    let criteria: FilterCriteria = match &args.criteria {
        Some(path) => read_json(path).map_err(|e| e.to_string())?,
        None => FilterCriteria::default(),
    };
    let token = args.token.clone().or_else(|| std::env::var(harvest::TOKEN_ENV).ok()).filter(|t| !t.is_empty());
    if token.is_none() {
        ctx.note(&format!("{} is not set; requests are unauthenticated", harvest::TOKEN_ENV));
    }
    let client = GitHubClient::new(&args.api_url, token);
    let manifest_path = args.dest.join("manifest.jsonl");
    let index = ManifestIndex::load(&manifest_path).map_err(|e| e.to_string())?;
    let buffer = SharedBuf::default();
    let writer = if args.dry_run {
        ManifestWriter::new(Box::new(buffer.clone()))
    } else {
        ManifestWriter::append(&manifest_path).map_err(|e| format!("cannot open {}: {e}", manifest_path.display()))?
    };
    let opts = HarvestOptions { provider: args.provider, criteria, dest: args.dest.clone(), dry_run: args.dry_run, jobs: args.jobs };
    let result = harvest::harvest(&client, &opts, &index, &writer);
    writer.finish().map_err(|e| format!("cannot write manifest: {e}"))?;
    let summary = result.map_err(|e| e.to_string())?;
    if args.dry_run {
        let records = String::from_utf8_lossy(&buffer.0.lock().unwrap()).into_owned();
        return ctx.emit(&records).map(|()| 0);
    }
    let text = if ctx.format == Format::Json {
        serde_json::to_string(&summary).map_err(|e| e.to_string())? + "\n"
    } else {
        let mut t = format!("found {}\nkept {}\n", summary.found, summary.kept);
        for (reason, n) in &summary.rejected {
            let _ = writeln!(t, "rejected ({reason}) {n}");
        }
        let _ = writeln!(
            t,
            "downloaded {}\nunchanged {}\nskipped {}\nmanifest {}",
            summary.downloaded,
            summary.digest_matches,
            summary.skipped,
            manifest_path.display()
        );
        t
    };
    ctx.emit(&text).map(|()| 0)
}

/// Groups discovered files under their first `depth` path components.
fn repo_files_under(root: &Path, depth: usize) -> Result<BTreeMap<String, Vec<String>>, String> {
    if depth == 0 {
        return Err("--depth must be at least 1".into());
    }
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for path in discover(root).map_err(|e| e.to_string())? {
        let parts: Vec<&str> = path.split('/').collect();
        if parts.len() > depth {
            out.entry(parts[..depth].join("/")).or_default().push(parts[depth..].join("/"));
        }
    }
    Ok(out)
}

fn sample_cmd(root: Option<&Path>, manifest: Option<&Path>, seed: u64, depth: usize, ctx: &mut Ctx) -> Result<i32, String> {
    ctx.text_or_json("sample")?;
    let repos = match (root, manifest) {
        (_, Some(m)) => ManifestIndex::load(m).map_err(|e| e.to_string())?.repo_files(),
        (Some(r), None) => repo_files_under(r, depth)?,
        (None, None) => unreachable!("clap requires one of root and --manifest"),
    };
    let set = sample_stratified(&repos, seed);
    ctx.note(&format!("{} files from {} repositories", set.total(), set.selections.len()));
    let text = if ctx.format == Format::Json {
        serde_json::to_string(&set).map_err(|e| e.to_string())? + "\n"
    } else {
        let mut t = String::new();
        for (repo, files) in &set.selections {
            for f in files {
                let _ = writeln!(t, "{repo}/{f}");
            }
        }
        t
    };
    ctx.emit(&text).map(|()| 0)
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 2 bad input, 3 instance over the enumeration cap,
//! 4 I/O failure, 5 validation failure (unreadable scheme document, failed
//! structural check, or a user that did not decode).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bounds::{bounds_report, SystemTriple};
use crate::compare::{asymptotic_sweep, decimal, sweep_table, table1, table3, Table};
use crate::error::{Error, Result};
use crate::linegraph::{ConstructionParams, Limits, DEFAULT_MAX_VERTICES};
use crate::scheme::{
    construct, deserialize, params_from, serialize, simulate, write_trace, DemandSampler, FileStore, SchemeInstance,
    DEFAULT_SUBFILE_LEN,
};

pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pgcache", version, about = "Coded caching schemes from projective geometries")]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct ParamArgs {
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(short = 'm')]
    pub m: usize,
    #[arg(short = 't')]
    pub t: usize,
    /// Field order, a prime power
    #[arg(short = 'q')]
    pub q: u64,
}

impl ParamArgs {
    fn params(&self) -> Result<ConstructionParams> {
        ConstructionParams::new(self.k, self.m, self.t, self.q)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form scheme parameters
    Params(ParamArgs),
    /// Build a scheme and write its document
    Construct {
        #[command(flatten)]
        params: ParamArgs,
        /// Output path for the scheme document
        #[arg(short = 'o', long)]
        out: PathBuf,
        /// Largest number of line-graph vertices (and subfiles) to enumerate
        #[arg(long, env = "PGCACHE_CAP", default_value_t = DEFAULT_MAX_VERTICES,
              value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// Run random-demand deliveries against a stored scheme
    Simulate {
        /// Scheme document
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of files in the library; defaults to K
        #[arg(long)]
        files: Option<usize>,
        /// Bytes per subfile
        #[arg(long, default_value_t = DEFAULT_SUBFILE_LEN)]
        subfile_len: usize,
        /// Write every broadcast packet, trial by trial, to this file
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Lower bounds on R*F for a (K, F, D) triple
    Bounds {
        #[arg(short = 'K')]
        users: u64,
        #[arg(short = 'F')]
        subpacketization: u64,
        #[arg(short = 'D')]
        uncached: u64,
        /// Also maximise the ordering bound over this scheme's placement
        #[arg(long)]
        scheme: Option<PathBuf>,
    },
    /// Reproduce a comparison table
    Tables {
        #[arg(value_enum)]
        which: WhichTable,
    },
    /// Formula-only sweep over k - t with q and α = k - m - t fixed
    Sweep {
        #[arg(short = 'q', default_value_t = 2)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        alpha: usize,
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 20)]
        to: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WhichTable {
    Table1,
    Table3,
}

/// What a command prints: one record or a table.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Record(Vec<(String, String)>),
    Table(Table),
}

impl Output {
    pub fn render(&self, format: Format) -> Result<String> {
        match (self, format) {
            (Output::Record(kv), Format::Text) => {
                Ok(kv.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ") + "\n")
            }
            (Output::Record(kv), Format::Csv) => Table {
                title: String::new(),
                headers: kv.iter().map(|(k, _)| k.clone()).collect(),
                rows: vec![kv.iter().map(|(_, v)| v.clone()).collect()],
            }
            .to_csv(),
            (Output::Record(kv), Format::Json) => {
                let m: Map<String, Value> = kv.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
                Ok(serde_json::to_string_pretty(&m)? + "\n")
            }
            (Output::Table(t), Format::Text) => Ok(t.to_text()),
            (Output::Table(t), Format::Csv) => t.to_csv(),
            (Output::Table(t), Format::Json) => {
                let rows: Vec<Value> = t
                    .rows
                    .iter()
                    .map(|r| Value::Object(t.headers.iter().cloned().zip(r.iter().map(|c| json!(c))).collect()))
                    .collect();
                Ok(serde_json::to_string_pretty(&json!({ "title": t.title, "rows": rows }))? + "\n")
            }
        }
    }
}

/// Maps an error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Io(_) => EXIT_IO,
        Error::Schema(_) | Error::Json(_) | Error::MissingPacket { .. } | Error::Undecodable { .. } => EXIT_VALIDATION,
        _ => EXIT_BAD_INPUT,
    }
}

fn kv(pairs: &[(&str, String)]) -> Output {
    Output::Record(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
}

pub fn cmd_params(cp: &ConstructionParams) -> Result<Output> {
    let p = params_from(cp)?;
    Ok(kv(&[
        ("K", p.users.to_string()),
        ("F", p.subpacketization.to_string()),
        ("D", p.uncached_per_user.to_string()),
        ("c", p.subfile_clique.to_string()),
        ("d", p.clique_size.to_string()),
        ("M/N", p.cache_fraction.to_string()),
        ("R", p.rate.to_string()),
        ("RF", p.transmissions().to_string()),
        ("gain", p.gain().to_string()),
    ]))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn cmd_construct(cp: &ConstructionParams, out: &Path, cap: u64) -> Result<Output> {
    let s = construct(cp, &Limits { max_vertices: cap })?;
    let report = s.verify();
    if !report.is_ok() {
        return Err(Error::Schema(format!("constructed scheme fails verification: {}", report.violations[0])));
    }
    write_file(out, serialize(&s)?.as_bytes())?;
    Ok(kv(&[
        ("K", s.num_users().to_string()),
        ("F", s.subpacketization().to_string()),
        ("packets", s.delivery().cliques().len().to_string()),
        ("written", out.display().to_string()),
    ]))
}

pub fn load_scheme(path: &Path) -> Result<SchemeInstance> {
    deserialize(&fs::read_to_string(path)?)
}

/// Per-trial demand vectors come from one SplitMix64 stream seeded with
/// `seed`; the file contents come from a stream seeded with `seed` as well.
pub fn cmd_simulate(
    scheme: &SchemeInstance,
    trials: u64,
    seed: u64,
    files: Option<usize>,
    subfile_len: usize,
    trace: Option<&Path>,
) -> Result<(Output, bool)> {
    let users = scheme.num_users();
    let files = files.unwrap_or(users);
    if files == 0 {
        return Err(Error::InvalidDemands("need at least one file".into()));
    }
    let store = FileStore::random(files, scheme.subpacketization(), subfile_len, seed);
    let mut sampler = DemandSampler::new(seed);
    let mut per_user = vec![0u64; users];
    let mut full = 0u64;
    let mut packet_counts = std::collections::BTreeSet::new();
    let mut all_packets = Vec::new();
    for _ in 0..trials {
        let demands = sampler.sample(users, files);
        let out = simulate(scheme, &store, &demands)?;
        packet_counts.insert(out.packets.len());
        for (c, &ok) in per_user.iter_mut().zip(&out.decoded_ok) {
            *c += ok as u64;
        }
        full += out.all_ok() as u64;
        if trace.is_some() {
            all_packets.extend(out.packets);
        }
    }
    if let Some(path) = trace {
        let mut buf = Vec::new();
        write_trace(&mut buf, &all_packets)?;
        write_file(path, &buf)?;
    }
    let packets = packet_counts.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("|");
    let f = scheme.subpacketization();
    let rf = packet_counts.iter().next_back().copied().unwrap_or(0);
    let ok = full == trials;
    let out = kv(&[
        ("trials", trials.to_string()),
        ("success", format!("{full}/{trials}")),
        ("users", users.to_string()),
        ("files", files.to_string()),
        ("min_user_success", per_user.iter().min().copied().unwrap_or(0).to_string()),
        ("packets", packets),
        ("RF", rf.to_string()),
        ("F", f.to_string()),
        ("R", format!("{}", num_rational::Ratio::new(rf as u64, f.max(1) as u64))),
    ]);
    Ok((out, ok))
}

pub fn cmd_bounds(st: &SystemTriple, scheme: Option<&SchemeInstance>) -> Result<Output> {
    let r = bounds_report(st, scheme.map(|s| s.placement()))?;
    let mut pairs = vec![
        ("K", st.k.to_string()),
        ("F", st.f.to_string()),
        ("D", st.d.to_string()),
        ("theorem2", r.theorem2.as_ref().map_or("NA".into(), |x| x.to_string())),
        ("pda", r.cited_pda.to_string()),
        ("cutset", r.cutset.ceil.to_string()),
        ("cutset_exact", format!("{} ({})", r.cutset.exact, decimal(&r.cutset.exact, 2))),
    ];
    if let Some(o) = &r.ordering {
        pairs.push(("ordering", o.best.total.to_string()));
        pairs.push(("ordering_users", o.best.users.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(" ")));
        pairs.push(("ordering_exhaustive", o.exhaustive.to_string()));
    }
    Ok(kv(&pairs))
}

pub fn cmd_tables(which: WhichTable) -> Result<Output> {
    Ok(Output::Table(match which {
        WhichTable::Table1 => table1()?,
        WhichTable::Table3 => table3()?,
    }))
}

pub fn cmd_sweep(q: u64, alpha: usize, from: usize, to: usize) -> Result<(Output, bool)> {
    if from > to {
        return Err(Error::InvalidParams(format!("empty range {from}..={to}")));
    }
    let rows = asymptotic_sweep(q, alpha, from..=to)?;
    let ok = rows.iter().all(|r| r.checks_hold());
    Ok((Output::Table(sweep_table(q, alpha, &rows)), ok))
}

/// Runs one parsed command; returns the text to print and the exit code.
pub fn run(cli: &Cli) -> Result<(String, i32)> {
    let (out, ok) = match &cli.command {
        Command::Params(p) => (cmd_params(&p.params()?)?, true),
        Command::Construct { params, out, cap } => (cmd_construct(&params.params()?, out, *cap)?, true),
        Command::Simulate {
            input,
            trials,
            seed,
            files,
            subfile_len,
            trace,
        } => {
            let s = load_scheme(input)?;
            cmd_simulate(&s, *trials, *seed, *files, *subfile_len, trace.as_deref())?
        }
        Command::Bounds {
            users,
            subpacketization,
            uncached,
            scheme,
        } => {
            let st = SystemTriple::new(*users, *subpacketization, *uncached)?;
            let s = scheme.as_deref().map(load_scheme).transpose()?;
            if let Some(s) = &s {
                let own = SystemTriple::from_params(s.params())?;
                if own != st {
                    return Err(Error::InvalidTriple(format!("scheme has {own}, bounds requested for {st}")));
                }
            }
            (cmd_bounds(&st, s.as_ref())?, true)
        }
        Command::Tables { which } => (cmd_tables(*which)?, true),
        Command::Sweep { q, alpha, from, to } => cmd_sweep(*q, *alpha, *from, *to)?,
    };
    Ok((out.render(cli.format)?, if ok { 0 } else { EXIT_VALIDATION }))
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { 0 };
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            print!("{text}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

//! Command-line driver that runs one pipeline stage on a graph, or re-checks
//! an emitted artifact against the oracles.
//!
//! All vertex ids in artifacts are 1-based, as in the graph format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::fixtures;
use crate::ghtree::{ghtree_with, k_connected_components, GhConfig, GomoryHuTree};
use crate::graph::{parse_graph, Weight, WeightedGraph};
use crate::oracle::{cut_table, oracle_all_pairs_mincut_with, ConnectivityMatrix, DEFAULT_ORACLE_LIMIT};
use crate::packing::{BigRational, Rational};
use crate::sparsifier::{
    build_skeleton, crossing_count, extract_vertex_sparsifier_with, guide_trees_with, ExtractOptions,
};
use crate::ssmc::{ssmc_all, SsmcConfig};

pub const PROFILE_ENV: &str = "MINCUT_PROFILE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Faithful,
    Fast,
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "faithful" => Ok(Profile::Faithful),
            "fast" => Ok(Profile::Fast),
            other => Err(format!("unknown profile {other:?} (expected faithful or fast)")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mincut", version, about = "Deterministic Gomory-Hu trees and friends")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value = "faithful")]
    pub profile: Profile,
    /// Seed for generated inputs such as `@random:10:20:8`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Packing accuracy, as `p/q` or a decimal in (0,1).
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_LIMIT)]
    pub oracle_limit: usize,
    /// Writes the artifact here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Gomory-Hu Steiner tree with its vertex map.
    Ghtree {
        input: String,
        /// Comma-separated terminals; defaults to the graph's `t` lines or all vertices.
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Mincut values from one source to every other vertex.
    Ssmc {
        input: String,
        #[arg(long, short)]
        source: usize,
    },
    /// k-edge-connected components.
    Kcc {
        input: String,
        #[arg(short)]
        k: Weight,
    },
    /// Guide trees for a source among the terminals.
    Guidetrees {
        input: String,
        #[arg(long, short)]
        source: usize,
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Terminal vertex sparsifier and its skeleton.
    Sparsify {
        input: String,
        #[arg(long)]
        terminals: Option<String>,
    },
    /// Re-checks an emitted artifact against brute-force oracles.
    Verify {
        artifact: PathBuf,
        #[arg(long)]
        graph: String,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub epsilon: Option<Rational>,
    pub profile: Profile,
    pub seed: u64,
    pub oracle_limit: usize,
    pub json: bool,
    pub jobs: usize,
}

impl RunConfig {
    /// `env_profile` is the value of `MINCUT_PROFILE`, which wins over the flag.
    pub fn from_cli(cli: Cli, env_profile: Option<&str>) -> Result<RunConfig, CliError> {
        let profile = match env_profile.filter(|s| !s.trim().is_empty()) {
            Some(p) => p.parse().map_err(|e: String| CliError::Usage(format!("{PROFILE_ENV}: {e}")))?,
            None => cli.profile,
        };
        let epsilon = cli.epsilon.as_deref().map(parse_epsilon).transpose()?;
        Ok(RunConfig {
            command: cli.command,
            output: cli.output,
            epsilon,
            profile,
            seed: cli.seed,
            oracle_limit: cli.oracle_limit,
            json: cli.json,
            jobs: cli.jobs,
        })
    }

    pub fn new(command: Command) -> RunConfig {
        RunConfig {
            command,
            output: None,
            epsilon: None,
            profile: Profile::Faithful,
            seed: 0,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            json: false,
            jobs: 1,
        }
    }

    pub fn gh_config(&self) -> GhConfig {
        let mut c = match self.profile {
            Profile::Faithful => GhConfig::faithful(),
            Profile::Fast => GhConfig::fast(),
        };
        c.ssmc = self.ssmc_config();
        c.parallel = self.jobs != 1;
        c
    }

    pub fn ssmc_config(&self) -> SsmcConfig {
        let mut c = match self.profile {
            Profile::Faithful => SsmcConfig::faithful(),
            Profile::Fast => SsmcConfig::fast(),
        };
        if let Some(e) = self.epsilon {
            c.guide.epsilon = e;
        }
        c
    }
}

pub fn parse_epsilon(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Usage(format!("epsilon {s:?}: expected p/q or a decimal in (0,1)"));
    let s = s.trim();
    let r = if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        Rational::new(int * den + frac.parse::<i64>().map_err(|_| bad())?, den)
    } else {
        Rational::from_str(s).map_err(|_| bad())?
    };
    if r <= Rational::from_integer(0) || r >= Rational::from_integer(1) {
        return Err(bad());
    }
    Ok(r)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    OracleLimit(String),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::OracleLimit(_) => 3,
            CliError::Check(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

/// Serialized result of one command. Ids are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Artifact {
    Ghtree {
        edges: Vec<(usize, usize, Weight)>,
        f: Vec<usize>,
    },
    Ssmc {
        source: usize,
        /// `None` marks an infinite estimate.
        #[serde(with = "id_map")]
        values: BTreeMap<usize, Option<Weight>>,
    },
    Kcc {
        k: Weight,
        parts: Vec<Vec<usize>>,
    },
    Guidetrees {
        source: usize,
        terminals: Vec<usize>,
        k_respect: usize,
        lambda_h: Weight,
        w_skel: String,
        values: Vec<String>,
        trees: Vec<Vec<(usize, usize)>>,
    },
    Sparsify {
        n: usize,
        terminals: Vec<usize>,
        scale: String,
        packing_value: String,
        /// G′ edges in units of `1/scale`.
        edges: Vec<(usize, usize, Weight)>,
        skeleton: Skeleton,
    },
}

// Vertex keys travel as strings.
mod id_map {
    use std::collections::BTreeMap;

    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::graph::Weight;

    pub fn serialize<S: Serializer>(m: &BTreeMap<usize, Option<Weight>>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, Option<Weight>>, D::Error> {
        BTreeMap::<String, Option<Weight>>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(|_| D::Error::custom(format!("bad vertex {k:?}"))))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skeleton {
    pub w_skel: String,
    pub lambda_h: Weight,
    /// Edges with multiplicities.
    pub edges: Vec<(usize, usize, Weight)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub kind: String,
    pub ok: bool,
    pub checked: usize,
    pub message: String,
    /// The violated pair, 1-based.
    pub pair: Option<(usize, usize)>,
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Ghtree { .. } => "ghtree",
            Artifact::Ssmc { .. } => "ssmc",
            Artifact::Kcc { .. } => "kcc",
            Artifact::Guidetrees { .. } => "guidetrees",
            Artifact::Sparsify { .. } => "sparsify",
        }
    }

    pub fn from_tree(t: &GomoryHuTree) -> Artifact {
        Artifact::Ghtree {
            edges: t.edges.iter().map(|&(a, b, w)| (a + 1, b + 1, w)).collect(),
            f: t.f.iter().map(|&x| x + 1).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifact serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("# mincut {}\n", self.kind());
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        match self {
            Artifact::Ghtree { edges, f } => {
                for (a, b, w) in edges {
                    writeln!(s, "g {a} {b} {w}").unwrap();
                }
                for (v, t) in f.iter().enumerate() {
                    writeln!(s, "f {} {t}", v + 1).unwrap();
                }
            }
            Artifact::Ssmc { source, values } => {
                writeln!(s, "s {source}").unwrap();
                for (t, v) in values {
                    match v {
                        Some(v) => writeln!(s, "v {t} {v}").unwrap(),
                        None => writeln!(s, "v {t} inf").unwrap(),
                    }
                }
            }
            Artifact::Kcc { k, parts } => {
                writeln!(s, "k {k}").unwrap();
                for p in parts {
                    writeln!(s, "P {}", join(p)).unwrap();
                }
            }
            Artifact::Guidetrees { source, terminals, k_respect, lambda_h, w_skel, values, trees } => {
                writeln!(s, "s {source}").unwrap();
                writeln!(s, "u {}", join(terminals)).unwrap();
                writeln!(s, "K {k_respect} {lambda_h} {w_skel}").unwrap();
                for (val, t) in values.iter().zip(trees) {
                    writeln!(s, "T {val}").unwrap();
                    for (a, b) in t {
                        writeln!(s, "a {a} {b}").unwrap();
                    }
                }
            }
            Artifact::Sparsify { n, terminals, scale, packing_value, edges, skeleton } => {
                writeln!(s, "n {n}").unwrap();
                writeln!(s, "u {}", join(terminals)).unwrap();
                writeln!(s, "S {scale} {packing_value}").unwrap();
                for (a, b, w) in edges {
                    writeln!(s, "e {a} {b} {w}").unwrap();
                }
                writeln!(s, "H {} {}", skeleton.w_skel, skeleton.lambda_h).unwrap();
                for (a, b, m) in &skeleton.edges {
                    writeln!(s, "h {a} {b} {m}").unwrap();
                }
            }
        }
        s
    }

    /// Parses either codec; JSON is recognised by a leading `{`.
    pub fn parse(text: &str) -> Result<Artifact, CliError> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| CliError::Parse(format!("artifact JSON: {e}")));
        }
        parse_text(text).map_err(CliError::Parse)
    }
}

fn parse_text(text: &str) -> Result<Artifact, String> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let kind = match lines.next() {
        Some((_, l)) => l.strip_prefix("# mincut ").map(str::trim).ok_or("first line must be \"# mincut <kind>\"")?,
        None => return Err("empty artifact".into()),
    };
    let records: Vec<(usize, Vec<&str>)> =
        lines.filter(|(_, l)| !l.starts_with('#')).map(|(i, l)| (i, l.split_whitespace().collect())).collect();
    let num = |ln: usize, t: Option<&&str>| -> Result<i64, String> {
        t.ok_or(format!("line {ln}: missing field"))?.parse::<i64>().map_err(|e| format!("line {ln}: {e}"))
    };
    let id = |ln: usize, t: Option<&&str>| -> Result<usize, String> {
        let x = num(ln, t)?;
        if x < 1 {
            return Err(format!("line {ln}: vertex ids start at 1"));
        }
        Ok(x as usize)
    };
    let ids =
        |ln: usize, toks: &[&str]| -> Result<Vec<usize>, String> { toks.iter().map(|t| id(ln, Some(t))).collect() };
    let arity = |ln: usize, toks: &[&str], k: usize| -> Result<(), String> {
        if toks.len() == k {
            Ok(())
        } else {
            Err(format!("line {ln}: expected {} fields after {:?}", k - 1, toks[0]))
        }
    };
    let unexpected = |ln: usize, tag: &str| Err(format!("line {ln}: unexpected record {tag:?} in {kind} artifact"));
    let missing = |what: &str| format!("{kind} artifact: missing {what} record");
    match kind {
        "ghtree" => {
            let (mut edges, mut f) = (Vec::new(), Vec::new());
            for (ln, t) in &records {
                match t[0] {
                    "g" => {
                        arity(*ln, t, 4)?;
                        edges.push((id(*ln, t.get(1))?, id(*ln, t.get(2))?, num(*ln, t.get(3))?));
                    }
                    "f" => {
                        arity(*ln, t, 3)?;
                        let (v, x) = (id(*ln, t.get(1))?, id(*ln, t.get(2))?);
                        if v != f.len() + 1 {
                            return Err(format!("line {ln}: f records must list vertices 1, 2, ... in order"));
                        }
                        f.push(x);
                    }
                    tag => return unexpected(*ln, tag),
                }
            }
            Ok(Artifact::Ghtree { edges, f })
        }
        "ssmc" => {
            let (mut source, mut values) = (None, BTreeMap::new());
            for (ln, t) in &records {
                match t[0] {
                    "s" => {
                        arity(*ln, t, 2)?;
                        source = Some(id(*ln, t.get(1))?);
                    }
                    "v" => {
                        arity(*ln, t, 3)?;
                        let v = if t[2] == "inf" { None } else { Some(num(*ln, t.get(2))?) };
                        if values.insert(id(*ln, t.get(1))?, v).is_some() {
                            return Err(format!("line {ln}: vertex listed twice"));
                        }
                    }
                    tag => return unexpected(*ln, tag),
                }
            }
            Ok(Artifact::Ssmc { source: source.ok_or(missing("s"))?, values })
        }
        "kcc" => {
            let (mut k, mut parts) = (None, Vec::new());
            for (ln, t) in &records {
                match t[0] {
                    "k" => {
                        arity(*ln, t, 2)?;
                        k = Some(num(*ln, t.get(1))?);
                    }
                    "P" => parts.push(ids(*ln, &t[1..])?),
                    tag => return unexpected(*ln, tag),
                }
            }
            Ok(Artifact::Kcc { k: k.ok_or(missing("k"))?, parts })
        }
        "guidetrees" => {
            let (mut source, mut terminals, mut head) = (None, None, None);
            let (mut values, mut trees) = (Vec::new(), Vec::<Vec<(usize, usize)>>::new());
            for (ln, t) in &records {
                match t[0] {
                    "s" => {
                        arity(*ln, t, 2)?;
                        source = Some(id(*ln, t.get(1))?);
                    }
                    "u" => terminals = Some(ids(*ln, &t[1..])?),
                    "K" => {
                        arity(*ln, t, 4)?;
                        let k = num(*ln, t.get(1))?;
                        head = Some((k as usize, num(*ln, t.get(2))?, rational(*ln, t[3])?));
                    }
                    "T" => {
                        arity(*ln, t, 2)?;
                        values.push(rational(*ln, t[1])?);
                        trees.push(Vec::new());
                    }
                    "a" => {
                        arity(*ln, t, 3)?;
                        let e = (id(*ln, t.get(1))?, id(*ln, t.get(2))?);
                        trees.last_mut().ok_or(format!("line {ln}: tree edge before any T record"))?.push(e);
                    }
                    tag => return unexpected(*ln, tag),
                }
            }
            let (k_respect, lambda_h, w_skel) = head.ok_or(missing("K"))?;
            Ok(Artifact::Guidetrees {
                source: source.ok_or(missing("s"))?,
                terminals: terminals.ok_or(missing("u"))?,
                k_respect,
                lambda_h,
                w_skel,
                values,
                trees,
            })
        }
        "sparsify" => {
            let (mut n, mut terminals, mut head, mut skel) = (None, None, None, None);
            let (mut edges, mut sk_edges) = (Vec::new(), Vec::new());
            for (ln, t) in &records {
                match t[0] {
                    "n" => {
                        arity(*ln, t, 2)?;
                        n = Some(num(*ln, t.get(1))? as usize);
                    }
                    "u" => terminals = Some(ids(*ln, &t[1..])?),
                    "S" => {
                        arity(*ln, t, 3)?;
                        head = Some((rational(*ln, t[1])?, rational(*ln, t[2])?));
                    }
                    "e" => {
                        arity(*ln, t, 4)?;
                        edges.push((id(*ln, t.get(1))?, id(*ln, t.get(2))?, num(*ln, t.get(3))?));
                    }
                    "H" => {
                        arity(*ln, t, 3)?;
                        skel = Some((rational(*ln, t[1])?, num(*ln, t.get(2))?));
                    }
                    "h" => {
                        arity(*ln, t, 4)?;
                        sk_edges.push((id(*ln, t.get(1))?, id(*ln, t.get(2))?, num(*ln, t.get(3))?));
                    }
                    tag => return unexpected(*ln, tag),
                }
            }
            let (scale, packing_value) = head.ok_or(missing("S"))?;
            let (w_skel, lambda_h) = skel.ok_or(missing("H"))?;
            Ok(Artifact::Sparsify {
                n: n.ok_or(missing("n"))?,
                terminals: terminals.ok_or(missing("u"))?,
                scale,
                packing_value,
                edges,
                skeleton: Skeleton { w_skel, lambda_h, edges: sk_edges },
            })
        }
        other => Err(format!("unknown artifact kind {other:?}")),
    }
}

fn rational(ln: usize, s: &str) -> Result<String, String> {
    BigRational::from_str(s).map_err(|_| format!("line {ln}: bad rational {s:?}"))?;
    Ok(s.to_string())
}

fn big(s: &str) -> Result<BigRational, CliError> {
    BigRational::from_str(s).map_err(|_| CliError::Parse(format!("bad rational {s:?}")))
}

/// Reads a graph file, or generates one for `@name` and `@random:n:m:w`.
pub fn load_graph(spec: &str, seed: u64) -> Result<WeightedGraph, CliError> {
    if let Some(name) = spec.strip_prefix('@') {
        return fixture(name, seed);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Io(format!("{spec}: {e}")))?;
    parse_graph(&text).map_err(|e| CliError::Parse(format!("{spec}: {e}")))
}

fn fixture(name: &str, seed: u64) -> Result<WeightedGraph, CliError> {
    if let Some(rest) = name.strip_prefix("random:") {
        let p: Vec<usize> = rest
            .split(':')
            .map(|x| x.parse().map_err(|_| CliError::Usage(format!("@random:{rest}: expected n:m:w"))))
            .collect::<Result<_, _>>()?;
        if p.len() != 3 || p[0] == 0 || p[2] == 0 || (p[0] > 1 && p[1] + 1 < p[0]) {
            return Err(CliError::Usage(format!("@random:{rest}: need n ≥ 1, m ≥ n-1, w ≥ 1")));
        }
        return Ok(fixtures::random_connected(seed, p[0], p[1], p[2] as Weight));
    }
    let key = |s: &str| s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
    fixtures::named()
        .into_iter()
        .find(|(n, _)| key(n) == key(name) || key(n).starts_with(&key(name)) && !key(name).is_empty())
        .map(|(_, g)| g)
        .ok_or_else(|| CliError::Usage(format!("unknown fixture @{name}")))
}

fn terminal_list(g: &WeightedGraph, flag: Option<&str>) -> Result<Vec<usize>, CliError> {
    let mut u = match flag {
        Some(s) => s
            .split(',')
            .map(|x| vertex(g, x.trim().parse().map_err(|_| CliError::Usage(format!("bad terminal {x:?}")))?))
            .collect::<Result<Vec<_>, _>>()?,
        None => g.terminals().map(|t| t.to_vec()).unwrap_or_else(|| (0..g.n()).collect()),
    };
    u.sort_unstable();
    u.dedup();
    Ok(u)
}

fn vertex(g: &WeightedGraph, one_based: usize) -> Result<usize, CliError> {
    if one_based == 0 || one_based > g.n() {
        return Err(CliError::Usage(format!("vertex {one_based} out of range 1..={}", g.n())));
    }
    Ok(one_based - 1)
}

fn fail<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Check(e.to_string())
}

/// Runs one command inside a thread pool of `jobs` workers and returns the
/// emitted artifact or report.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cfg))
}

fn dispatch(cfg: &RunConfig) -> Result<String, CliError> {
    let emit = |a: &Artifact| if cfg.json { a.to_json() } else { a.to_text() };
    match &cfg.command {
        Command::Verify { artifact, graph } => {
            let g = load_graph(graph, cfg.seed)?;
            let text =
                std::fs::read_to_string(artifact).map_err(|e| CliError::Io(format!("{}: {e}", artifact.display())))?;
            let art = Artifact::parse(&text)?;
            let report = verify(&g, &art, cfg.oracle_limit)?;
            let out = if cfg.json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                format!("{} {}: {}\n", if report.ok { "ok" } else { "FAIL" }, report.kind, report.message)
            };
            if report.ok {
                Ok(out)
            } else {
                Err(CliError::Check(out.trim_end().to_string()))
            }
        }
        cmd => Ok(emit(&produce(cmd, cfg)?)),
    }
}

/// Runs a pipeline command and returns its artifact.
pub fn produce(cmd: &Command, cfg: &RunConfig) -> Result<Artifact, CliError> {
    match cmd {
        Command::Ghtree { input, terminals } => {
            let g = load_graph(input, cfg.seed)?;
            let u = terminal_list(&g, terminals.as_deref())?;
            let (t, _) = ghtree_with(&g, &u, &cfg.gh_config()).map_err(fail)?;
            Ok(Artifact::from_tree(&t))
        }
        Command::Ssmc { input, source } => {
            let g = load_graph(input, cfg.seed)?;
            let s = vertex(&g, *source)?;
            let (est, _) = ssmc_all(&g, s, &cfg.ssmc_config()).map_err(fail)?;
            Ok(Artifact::Ssmc { source: s + 1, values: est.values.iter().map(|(&t, &v)| (t + 1, v)).collect() })
        }
        Command::Kcc { input, k } => {
            let g = load_graph(input, cfg.seed)?;
            if *k < 1 {
                return Err(CliError::Usage("k must be at least 1".into()));
            }
            let parts = k_connected_components(&g, *k, &cfg.gh_config()).map_err(fail)?;
            Ok(Artifact::Kcc { k: *k, parts: parts.iter().map(|p| p.iter().map(|v| v + 1).collect()).collect() })
        }
        Command::Guidetrees { input, source, terminals } => {
            let g = load_graph(input, cfg.seed)?;
            let u = terminal_list(&g, terminals.as_deref())?;
            let s = vertex(&g, *source)?;
            let set = guide_trees_with(&g, &u, s, cfg.ssmc_config().guide).map_err(fail)?;
            Ok(Artifact::Guidetrees {
                source: s + 1,
                terminals: set.terminals.iter().map(|v| v + 1).collect(),
                k_respect: set.k_respect,
                lambda_h: set.lambda_h,
                w_skel: set.w_skel.to_string(),
                values: set.values.iter().map(|v| v.to_string()).collect(),
                trees: set.trees.iter().map(|t| t.iter().map(|&(a, b)| (a + 1, b + 1)).collect()).collect(),
            })
        }
        Command::Sparsify { input, terminals } => {
            let g = load_graph(input, cfg.seed)?;
            let u = terminal_list(&g, terminals.as_deref())?;
            let eps = cfg.epsilon.unwrap_or(cfg.ssmc_config().guide.epsilon);
            let sp = extract_vertex_sparsifier_with(&g, &u, eps, ExtractOptions::default()).map_err(fail)?;
            let h = build_skeleton(&sp, Rational::from_integer(5), Rational::new(1, 5)).map_err(fail)?;
            let orig = |i: usize| sp.terminals[i] + 1;
            Ok(Artifact::Sparsify {
                n: g.n(),
                terminals: sp.terminals.iter().map(|v| v + 1).collect(),
                scale: sp.scale.to_string(),
                packing_value: sp.packing_value.to_string(),
                edges: sp.graph.edges().iter().map(|e| (orig(e.u), orig(e.v), e.w)).collect(),
                skeleton: Skeleton {
                    w_skel: h.w_skel.to_string(),
                    lambda_h: h.lambda_h,
                    edges: h.edges.iter().map(|&(a, b, m)| (orig(a), orig(b), m)).collect(),
                },
            })
        }
        Command::Verify { .. } => Err(CliError::Usage("verify does not produce an artifact".into())),
    }
}

fn report(kind: &str, checked: usize, res: Result<String, (String, Option<(usize, usize)>)>) -> Report {
    match res {
        Ok(message) => Report { kind: kind.into(), ok: true, checked, message, pair: None },
        Err((message, pair)) => Report { kind: kind.into(), ok: false, checked, message, pair },
    }
}

fn check_ids(n: usize, ids: impl IntoIterator<Item = usize>) -> Result<(), CliError> {
    for v in ids {
        if v == 0 || v > n {
            return Err(CliError::Check(format!("artifact names vertex {v}, graph has {n}")));
        }
    }
    Ok(())
}

/// Re-checks `art` against the oracle for `g`.
pub fn verify(g: &WeightedGraph, art: &Artifact, limit: usize) -> Result<Report, CliError> {
    let o = oracle_all_pairs_mincut_with(g, limit).map_err(|e| CliError::OracleLimit(e.to_string()))?;
    let n = g.n();
    let kind = art.kind();
    let r = match art {
        Artifact::Ghtree { edges, f } => {
            check_ids(n, edges.iter().flat_map(|e| [e.0, e.1]).chain(f.iter().copied()))?;
            if f.len() != n {
                return Err(CliError::Check(format!("tree maps {} vertices, graph has {n}", f.len())));
            }
            let t = GomoryHuTree {
                n,
                terminals: {
                    let mut u: Vec<usize> = f.iter().map(|x| x - 1).collect();
                    u.sort_unstable();
                    u.dedup();
                    u
                },
                edges: edges.iter().map(|&(a, b, w)| (a - 1, b - 1, w)).collect(),
                f: f.iter().map(|x| x - 1).collect(),
            };
            let k = t.terminals.len();
            let res = t.check_shape().map_err(|e| (e, None)).and_then(|_| {
                t.check_against(g, &o).map(|_| format!("{} terminal pairs exact", k * (k - 1) / 2)).map_err(|v| {
                    let msg = format!(
                        "pair ({}, {}): λ = {}, tree path minimum {}, induced cut {}",
                        v.s + 1,
                        v.t + 1,
                        v.true_value,
                        v.tree_value.map_or("none".into(), |x| x.to_string()),
                        v.cut_value.map_or("none".into(), |x| x.to_string()),
                    );
                    (msg, Some((v.s + 1, v.t + 1)))
                })
            });
            report(kind, k * (k.max(1) - 1) / 2, res)
        }
        Artifact::Ssmc { source, values } => {
            check_ids(n, values.keys().copied().chain([*source]))?;
            let s = source - 1;
            let mut res = Ok(format!("{} targets exact", n - 1));
            for t in (0..n).filter(|&t| t != s) {
                let want = o.lambda(s, t);
                let got = values.get(&(t + 1)).copied().flatten();
                if got != Some(want) {
                    let shown = got.map_or("missing".into(), |x| x.to_string());
                    res = Err((
                        format!("pair ({}, {}): λ = {want}, reported {shown}", s + 1, t + 1),
                        Some((s + 1, t + 1)),
                    ));
                    break;
                }
            }
            report(kind, n - 1, res)
        }
        Artifact::Kcc { k, parts } => {
            check_ids(n, parts.iter().flatten().copied())?;
            let want = o.tau_components(&(0..n).collect::<Vec<_>>(), *k);
            let mut of = vec![usize::MAX; n];
            for (i, p) in parts.iter().enumerate() {
                for &v in p {
                    of[v - 1] = i;
                }
            }
            let mut res = Ok(format!("{} parts match", want.len()));
            'outer: for a in 0..n {
                for b in a + 1..n {
                    let same = want.iter().any(|c| c.contains(&a) && c.contains(&b));
                    if (of[a] == of[b] && of[a] != usize::MAX) != same {
                        let msg =
                            format!("pair ({}, {}): λ = {}, k = {k}, grouped wrongly", a + 1, b + 1, o.lambda(a, b));
                        res = Err((msg, Some((a + 1, b + 1))));
                        break 'outer;
                    }
                }
            }
            if res.is_ok() && parts.iter().map(Vec::len).sum::<usize>() != n {
                res = Err(("parts do not cover every vertex exactly once".into(), None));
            }
            report(kind, n * (n - 1) / 2, res)
        }
        Artifact::Guidetrees { source, terminals, k_respect, trees, .. } => {
            check_ids(
                n,
                terminals.iter().copied().chain([*source]).chain(trees.iter().flatten().flat_map(|e| [e.0, e.1])),
            )?;
            let u: Vec<usize> = terminals.iter().map(|v| v - 1).collect();
            let s = source - 1;
            let trees: Vec<Vec<(usize, usize)>> =
                trees.iter().map(|t| t.iter().map(|&(a, b)| (a - 1, b - 1)).collect()).collect();
            guide_report(&o, &u, s, *k_respect, &trees)
        }
        Artifact::Sparsify { n: an, terminals, scale, edges, .. } => {
            if *an != n {
                return Err(CliError::Check(format!("artifact is for {an} vertices, graph has {n}")));
            }
            check_ids(n, terminals.iter().copied().chain(edges.iter().flat_map(|e| [e.0, e.1])))?;
            let u: Vec<usize> = terminals.iter().map(|v| v - 1).collect();
            let scale = big(scale)?;
            let gp =
                WeightedGraph::from_edges(n, &edges.iter().map(|&(a, b, w)| (a - 1, b - 1, w)).collect::<Vec<_>>());
            sparsifier_report(g, &o, &u, &gp, &scale)
        }
    };
    Ok(r)
}

fn guide_report(o: &ConnectivityMatrix, u: &[usize], s: usize, k: usize, trees: &[Vec<(usize, usize)>]) -> Report {
    let n = o.n();
    let lam_u = match o.lambda_of(u) {
        Some(l) => l,
        None => return report("guidetrees", 0, Err(("fewer than two terminals".into(), None))),
    };
    let mut checked = 0;
    for &t in u.iter().filter(|&&t| t != s) {
        if 10 * o.lambda(s, t) > 11 * lam_u {
            continue;
        }
        checked += 1;
        let ok = o.all_mincuts(s, t).iter().any(|&mask| {
            let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            trees.iter().any(|tr| crossing_count(tr, &side) <= k)
        });
        if !ok {
            let msg = format!("pair ({}, {}): no tree {k}-respects any of its mincuts", s + 1, t + 1);
            return report("guidetrees", checked, Err((msg, Some((s + 1, t + 1)))));
        }
    }
    report("guidetrees", checked, Ok(format!("{checked} near-minimum targets respected")))
}

fn sparsifier_report(
    g: &WeightedGraph,
    o: &ConnectivityMatrix,
    u: &[usize],
    gp: &WeightedGraph,
    scale: &BigRational,
) -> Report {
    let n = g.n();
    let table = cut_table(g);
    let tmask: u64 = u.iter().map(|&v| 1u64 << v).sum();
    let mut best: BTreeMap<u64, Weight> = BTreeMap::new();
    for mask in 1..(1u64 << n) - 1 {
        let x = mask & tmask;
        if x != 0 && x != tmask {
            let e = best.entry(x).or_insert(Weight::MAX);
            *e = (*e).min(table[mask as usize]);
        }
    }
    let mut lam_p: Option<BigRational> = None;
    for (&x, &w) in &best {
        let c = BigRational::from_integer(gp.cut_mask(x) as i128) / scale;
        if c > BigRational::from_integer(w as i128) {
            let msg = format!("terminal side {:?}: sparsifier cut {c} exceeds graph cut {w}", members(x));
            let pair = (u.iter().find(|&&v| x >> v & 1 == 1), u.iter().find(|&&v| x >> v & 1 == 0));
            return report("sparsify", best.len(), Err((msg, Some((pair.0.unwrap() + 1, pair.1.unwrap() + 1)))));
        }
        if lam_p.as_ref().is_none_or(|l| c < *l) {
            lam_p = Some(c);
        }
    }
    let lam_u = o.lambda_of(u).unwrap_or(0);
    let lam_p = lam_p.unwrap_or_else(|| BigRational::from_integer(0));
    if lam_p * BigRational::from_integer(41) < BigRational::from_integer(10 * lam_u as i128) {
        return report("sparsify", best.len(), Err((format!("λ(G′) below λ(U)/4.1 = {lam_u}/4.1"), None)));
    }
    report("sparsify", best.len(), Ok(format!("{} terminal cuts dominated, λ(U) = {lam_u}", best.len())))
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|v| mask >> v & 1 == 1).map(|v| v + 1).collect()
}

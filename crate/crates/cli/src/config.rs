use std::fmt;

use clap::{Parser, ValueEnum};
use trace_repair::Scheme;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum SchemeChoice {
    Naive,
    Gw,
    Depth1,
    Depth2,
    All,
}

impl SchemeChoice {
    pub fn name(self) -> &'static str {
        match self {
            SchemeChoice::Naive => "naive",
            SchemeChoice::Gw => "gw",
            SchemeChoice::Depth1 => "depth1",
            SchemeChoice::Depth2 => "depth2",
            SchemeChoice::All => "all",
        }
    }

    pub fn single(self) -> Option<Scheme> {
        match self {
            SchemeChoice::Naive => Some(Scheme::Naive),
            SchemeChoice::Gw => Some(Scheme::Gw),
            SchemeChoice::Depth1 => Some(Scheme::DepthOne),
            SchemeChoice::Depth2 => Some(Scheme::DepthTwo),
            SchemeChoice::All => None,
        }
    }
}

/// Erased nodes, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EraseSpec {
    Random,
    Nodes(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MessageSpec {
    Random,
    Zero,
    /// `k·m·t` GF(p) coordinates, coefficient by coefficient.
    Explicit(Vec<u32>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunConfig {
    pub p: u32,
    pub m: u32,
    pub t: u32,
    pub irr: Option<Vec<u32>>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub erase: EraseSpec,
    pub scheme: SchemeChoice,
    pub message: MessageSpec,
    pub seed: u64,
    pub trials: usize,
    pub json: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p: 2,
            m: 1,
            t: 2,
            irr: None,
            n: None,
            k: None,
            erase: EraseSpec::Random,
            scheme: SchemeChoice::All,
            message: MessageSpec::Random,
            seed: 0,
            trials: 1,
            json: false,
        }
    }
}

/// Simulate trace repair of Reed-Solomon codes over GF(p^(m t)).
///
/// Defaults: n = |F| and k = n - |B|^(t-1), the smallest redundancy that
/// still allows trace repair.
#[derive(Parser, Debug)]
#[command(name = "trace-repair", version)]
struct Args {
    /// Characteristic.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Degree of the subfield B over GF(p).
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Degree of F over B.
    #[arg(long, default_value_t = 2)]
    t: u32,
    /// Monic irreducible of degree m·t, coefficients low to high.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    irr: Option<Vec<u32>>,
    /// Code length.
    #[arg(long)]
    n: Option<usize>,
    /// Code dimension.
    #[arg(long)]
    k: Option<usize>,
    /// One or two 1-based node numbers, or "random".
    #[arg(long, default_value = "random", value_parser = parse_erase)]
    erase: EraseSpec,
    #[arg(long, value_enum, default_value_t = SchemeChoice::All)]
    scheme: SchemeChoice,
    /// "random", "zero", or k·m·t comma-separated GF(p) coordinates.
    #[arg(long, default_value = "random", value_parser = parse_message)]
    message: MessageSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Emit one JSON report per line instead of a table.
    #[arg(long)]
    json: bool,
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| format!("bad list entry {x:?}"))
        })
        .collect()
}

fn parse_erase(s: &str) -> Result<EraseSpec, String> {
    if s == "random" {
        Ok(EraseSpec::Random)
    } else {
        parse_list(s).map(EraseSpec::Nodes)
    }
}

fn parse_message(s: &str) -> Result<MessageSpec, String> {
    match s {
        "random" => Ok(MessageSpec::Random),
        "zero" => Ok(MessageSpec::Zero),
        _ => parse_list(s).map(MessageSpec::Explicit),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses a full argument list, program name first.
    pub fn parse_from<I, S>(args: I) -> Result<Self, CliError>
    where
        I: IntoIterator<Item = S>,
        S: Into<std::ffi::OsString> + Clone,
    {
        let a = Args::try_parse_from(args)
            .map_err(|e| CliError::Clap(e.to_string(), e.exit_code() == 0))?;
        Ok(Self {
            p: a.p,
            m: a.m,
            t: a.t,
            irr: a.irr,
            n: a.n,
            k: a.k,
            erase: a.erase,
            scheme: a.scheme,
            message: a.message,
            seed: a.seed,
            trials: a.trials as usize,
            json: a.json,
        })
    }

    /// Canonical argument list (without program name). Parsing it yields
    /// `self` again.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = vec![
            "--p".into(),
            self.p.to_string(),
            "--m".into(),
            self.m.to_string(),
            "--t".into(),
            self.t.to_string(),
        ];
        if let Some(irr) = &self.irr {
            out.extend(["--irr".into(), join(irr)]);
        }
        if let Some(n) = self.n {
            out.extend(["--n".into(), n.to_string()]);
        }
        if let Some(k) = self.k {
            out.extend(["--k".into(), k.to_string()]);
        }
        let erase = match &self.erase {
            EraseSpec::Random => "random".to_string(),
            EraseSpec::Nodes(v) => join(v),
        };
        let message = match &self.message {
            MessageSpec::Random => "random".to_string(),
            MessageSpec::Zero => "zero".to_string(),
            MessageSpec::Explicit(v) => join(v),
        };
        out.extend([
            "--erase".into(),
            erase,
            "--scheme".into(),
            self.scheme.name().into(),
            "--message".into(),
            message,
            "--seed".into(),
            self.seed.to_string(),
            "--trials".into(),
            self.trials.to_string(),
        ]);
        if self.json {
            out.push("--json".into());
        }
        out
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_args().join(" "))
    }
}

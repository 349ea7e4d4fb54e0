use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use trace_repair::{
    build_dual_plan, build_single_plan, BandwidthReport, Cluster, CodeParams, DualScheme, Error,
    Felem, Scheme, TowerParams,
};

use crate::config::{EraseSpec, MessageSpec, RunConfig, SchemeChoice};
use crate::CliError;

/// A validated configuration ready to run.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub code: CodeParams,
    /// Schemes to run, in output order.
    pub schemes: Vec<Scheme>,
    /// Schemes skipped by `--scheme all`, with the reason.
    pub skipped: Vec<(Scheme, String)>,
    pub erase_count: usize,
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub trial: usize,
    /// 0-based erased indices.
    pub erased: Vec<usize>,
    pub reports: Vec<BandwidthReport>,
    /// Symbols restored by each scheme, parallel to `reports`.
    pub restored: Vec<Vec<Felem>>,
}

impl TrialOutcome {
    pub fn schemes_agree(&self) -> bool {
        self.restored.windows(2).all(|w| w[0] == w[1])
    }

    pub fn passed(&self) -> bool {
        self.reports.iter().all(BandwidthReport::passed) && self.schemes_agree()
    }
}

fn gate(code: &CodeParams, scheme: Scheme) -> Result<(), String> {
    let result = match scheme {
        Scheme::Naive => Ok(()),
        Scheme::Gw => build_single_plan(code, 0).map(|_| ()),
        Scheme::DepthOne => build_dual_plan(code, 0, 1, DualScheme::DepthOne).map(|_| ()),
        Scheme::DepthTwo => build_dual_plan(code, 0, 1, DualScheme::DepthTwo).map(|_| ()),
    };
    result.map_err(|e| match e {
        Error::Inapplicable(reason) => reason,
        other => other.to_string(),
    })
}

fn failures_needed(scheme: Scheme) -> Option<usize> {
    match scheme {
        Scheme::Naive => None,
        Scheme::Gw => Some(1),
        Scheme::DepthOne | Scheme::DepthTwo => Some(2),
    }
}

/// Builds the code and decides which schemes run.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    let usage = |e: Error| CliError::Usage(e.to_string());
    let tower = Arc::new(TowerParams::new(cfg.p, cfg.m, cfg.t, cfg.irr.clone()).map_err(usage)?);
    let n = cfg.n.unwrap_or(tower.order() as usize);
    let k = match cfg.k {
        Some(k) => k,
        None => n
            .checked_sub(tower.check_degree_bound())
            .filter(|&k| k > 0)
            .ok_or_else(|| {
                CliError::Usage(format!("n={n} is too short for trace repair; pass --k"))
            })?,
    };
    let code = CodeParams::with_default_points(tower.clone(), n, k).map_err(usage)?;

    let erase_count = match &cfg.erase {
        EraseSpec::Random => match cfg.scheme {
            SchemeChoice::Gw => 1,
            _ => 2,
        },
        EraseSpec::Nodes(nodes) => {
            if nodes.is_empty() || nodes.len() > 2 {
                return Err(CliError::Usage("--erase takes one or two nodes".into()));
            }
            if nodes.iter().any(|&x| x == 0 || x > n) {
                return Err(CliError::Usage(format!(
                    "--erase nodes must lie in 1..={n}"
                )));
            }
            if nodes.len() == 2 && nodes[0] == nodes[1] {
                return Err(CliError::Usage("--erase nodes must differ".into()));
            }
            nodes.len()
        }
    };
    if let MessageSpec::Explicit(coords) = &cfg.message {
        let want = k * tower.degree();
        if coords.len() != want {
            return Err(CliError::Usage(format!(
                "--message needs {want} coordinates (k={k} symbols of {} each), got {}",
                tower.degree(),
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|&&c| c >= cfg.p) {
            return Err(CliError::Usage(format!(
                "coordinate {c} is not in GF({})",
                cfg.p
            )));
        }
    }

    let mut schemes = Vec::new();
    let mut skipped = Vec::new();
    match cfg.scheme.single() {
        Some(s) => {
            if let Some(need) = failures_needed(s).filter(|&need| need != erase_count) {
                return Err(CliError::Gate(format!(
                    "{s} repairs exactly {need} erasure(s), got {erase_count}"
                )));
            }
            gate(&code, s).map_err(CliError::Gate)?;
            schemes.push(s);
        }
        None => {
            for s in Scheme::ALL {
                if failures_needed(s).is_some_and(|need| need != erase_count) {
                    continue;
                }
                match gate(&code, s) {
                    Ok(()) => schemes.push(s),
                    Err(reason) => skipped.push((s, reason)),
                }
            }
        }
    }
    Ok(Prepared {
        code,
        schemes,
        skipped,
        erase_count,
    })
}

/// One independent stream per trial: the seeded generator advanced by
/// `trial` jumps of 2^128 steps.
pub fn trial_rngs(seed: u64, trials: usize) -> Vec<Xoshiro256PlusPlus> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        out.push(rng.clone());
        rng.jump();
    }
    out
}

fn make_message(cfg: &RunConfig, code: &CodeParams, rng: &mut Xoshiro256PlusPlus) -> Vec<Felem> {
    let tw = code.tower();
    match &cfg.message {
        MessageSpec::Zero => vec![Felem::ZERO; code.k()],
        MessageSpec::Random => (0..code.k())
            .map(|_| Felem::from_index(rng.random_range(0..tw.order())))
            .collect(),
        MessageSpec::Explicit(coords) => coords
            .chunks(tw.degree())
            .map(|c| tw.felem(c).expect("coordinates validated"))
            .collect(),
    }
}

fn make_erasure(
    cfg: &RunConfig,
    n: usize,
    count: usize,
    rng: &mut Xoshiro256PlusPlus,
) -> Vec<usize> {
    match &cfg.erase {
        EraseSpec::Nodes(nodes) => nodes.iter().map(|x| x - 1).collect(),
        EraseSpec::Random => {
            let first = rng.random_range(0..n as u32) as usize;
            if count == 1 {
                return vec![first];
            }
            let mut second = rng.random_range(0..n as u32 - 1) as usize;
            if second >= first {
                second += 1;
            }
            vec![first, second]
        }
    }
}

fn run_trial(
    cfg: &RunConfig,
    prep: &Prepared,
    trial: usize,
    mut rng: Xoshiro256PlusPlus,
) -> Result<TrialOutcome, CliError> {
    let code = &prep.code;
    let message = make_message(cfg, code, &mut rng);
    let erased = make_erasure(cfg, code.n(), prep.erase_count, &mut rng);
    let internal = |e: Error| CliError::Internal(format!("trial {trial}: {e}"));
    let base = Cluster::spawn(code, &message).map_err(internal)?;
    let mut reports = Vec::new();
    let mut restored = Vec::new();
    for &scheme in &prep.schemes {
        let mut cluster = base.clone();
        cluster.fail(&erased).map_err(internal)?;
        reports.push(cluster.repair(scheme).map_err(internal)?);
        restored.push(
            erased
                .iter()
                .map(|&i| cluster.nodes()[i].expect("repaired node holds a symbol"))
                .collect(),
        );
    }
    Ok(TrialOutcome {
        trial,
        erased,
        reports,
        restored,
    })
}

/// Runs all trials (in parallel) and returns them in trial order.
pub fn run_trials(cfg: &RunConfig, prep: &Prepared) -> Result<Vec<TrialOutcome>, CliError> {
    trial_rngs(cfg.seed, cfg.trials)
        .into_par_iter()
        .enumerate()
        .map(|(i, rng)| run_trial(cfg, prep, i, rng))
        .collect()
}

fn nodes_text(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes the table or JSON lines. Returns whether every trial passed.
pub fn write_outcomes(
    cfg: &RunConfig,
    prep: &Prepared,
    outcomes: &[TrialOutcome],
    out: &mut dyn Write,
) -> std::io::Result<bool> {
    let all_passed = outcomes.iter().all(TrialOutcome::passed);
    if cfg.json {
        for o in outcomes {
            for r in &o.reports {
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string(r).expect("reports serialize")
                )?;
            }
        }
        return Ok(all_passed);
    }
    writeln!(out, "# {}", prep.code.header())?;
    for (s, reason) in &prep.skipped {
        writeln!(out, "# skipped {s}: {reason}")?;
    }
    writeln!(
        out,
        "{:>6}  {:<7} {:<7} {:<16} {:>6} {:>6}  verdict",
        "trial", "scheme", "erased", "per-RN dl+ex", "total", "naive"
    )?;
    for o in outcomes {
        for r in &o.reports {
            let per_rn = r
                .rns
                .iter()
                .map(|x| format!("{}+{}", x.downloaded, x.exchanged_in))
                .collect::<Vec<_>>()
                .join(" ");
            let verdict = if r.passed() { "pass" } else { "FAIL" };
            writeln!(
                out,
                "{:>6}  {:<7} {:<7} {:<16} {:>6} {:>6}  {verdict}",
                o.trial,
                r.scheme.name(),
                nodes_text(&r.erased),
                per_rn,
                r.total,
                r.naive_baseline
            )?;
        }
        if !o.schemes_agree() {
            writeln!(
                out,
                "{:>6}  schemes disagree on the restored symbols",
                o.trial
            )?;
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    writeln!(out, "{passed}/{} trials passed", outcomes.len())?;
    Ok(all_passed)
}

/// Full run. Returns the process exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let prep = prepare(cfg)?;
    if prep.schemes.is_empty() {
        return Err(CliError::Gate("no applicable scheme".into()));
    }
    let outcomes = run_trials(cfg, &prep)?;
    let ok = write_outcomes(cfg, &prep, &outcomes, out)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(if ok { 0 } else { 1 })
}

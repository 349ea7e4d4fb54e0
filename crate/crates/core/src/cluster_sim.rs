//! Deterministic in-process storage cluster.
//!
//! Node `i` stores `f(α_i)`. Repairs run in synchronous rounds; every
//! sub-symbol that crosses the network is recorded in the message log, so
//! the log sizes of a repair add up to its reported bandwidth. Demand
//! coefficients are control traffic and are logged with size 0.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dual_erasure::{
    bar_message_depth_two, build_dual_plan, collab_message_depth_one, complete_bar_depth_two,
    complete_depth_one, complete_star_depth_two, star_message_depth_two, DualPlan, DualScheme,
    RnState, Role,
};
use crate::error::{Error, Result};
use crate::field::{Belem, Felem};
use crate::report::{BandwidthReport, RnBandwidth, Scheme};
use crate::rs_code::{eval_poly, node_response, CodeParams};
use crate::single_repair::build_single_plan;

/// The simulator supports at most this many simultaneous failures.
pub const MAX_FAILURES: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    /// A demand coefficient sent to a helper.
    Demand,
    /// One sub-symbol.
    Trace,
    /// A full symbol (`t` sub-symbols).
    Symbol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Download,
    Collab,
}

/// One logged transfer. `from` and `to` are node indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Record {
    pub from: usize,
    pub to: usize,
    pub kind: PayloadKind,
    /// In sub-symbols.
    pub size: usize,
    pub phase: Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Message(Record),
    /// The replacement node for this index rebuilt its symbol.
    Recovered(usize),
}

/// JSON-lines view: 1-based node numbers, fixed key order.
#[derive(Serialize)]
struct RecordLine {
    from: usize,
    to: usize,
    kind: PayloadKind,
    size: usize,
    phase: Phase,
}

#[derive(Clone, Debug)]
pub struct Cluster {
    code: CodeParams,
    nodes: Vec<Option<Felem>>,
    snapshot: Vec<Felem>,
    failed: Vec<usize>,
    events: Vec<Event>,
}

impl Cluster {
    /// Encodes `message` and stores one symbol per node.
    pub fn spawn(code: &CodeParams, message: &[Felem]) -> Result<Self> {
        let word = code.encode(message)?;
        Ok(Self {
            code: code.clone(),
            nodes: word.symbols.iter().copied().map(Some).collect(),
            snapshot: word.symbols,
            failed: Vec::new(),
            events: Vec::new(),
        })
    }

    pub fn code(&self) -> &CodeParams {
        &self.code
    }

    /// Current contents; `None` for failed nodes.
    pub fn nodes(&self) -> &[Option<Felem>] {
        &self.nodes
    }

    /// Contents at spawn time.
    pub fn snapshot(&self) -> &[Felem] {
        &self.snapshot
    }

    /// Failed node indices in failure order.
    pub fn failed(&self) -> &[usize] {
        &self.failed
    }

    /// Events of the last repair.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn message_log(&self) -> impl Iterator<Item = &Record> {
        self.events.iter().filter_map(|e| match e {
            Event::Message(r) => Some(r),
            Event::Recovered(_) => None,
        })
    }

    /// The message log of the last repair as JSON lines.
    pub fn log_json_lines(&self) -> String {
        self.message_log()
            .map(|r| {
                let line = RecordLine {
                    from: r.from + 1,
                    to: r.to + 1,
                    kind: r.kind,
                    size: r.size,
                    phase: r.phase,
                };
                serde_json::to_string(&line).expect("log records serialize") + "\n"
            })
            .collect()
    }

    /// Erases the given node indices. The first becomes the star RN.
    pub fn fail(&mut self, indices: &[usize]) -> Result<()> {
        if self.failed.len() + indices.len() > MAX_FAILURES {
            return Err(Error::UnsupportedFailureCount(
                self.failed.len() + indices.len(),
            ));
        }
        for (pos, &i) in indices.iter().enumerate() {
            self.code.check_index(i)?;
            if self.nodes[i].is_none() || indices[..pos].contains(&i) {
                return Err(Error::Domain(format!("node index {i} has already failed")));
            }
        }
        for &i in indices {
            self.nodes[i] = None;
            self.failed.push(i);
        }
        Ok(())
    }

    fn alive_symbol(&self, i: usize) -> Felem {
        self.nodes[i].expect("helpers are alive")
    }

    fn log(&mut self, from: usize, to: usize, kind: PayloadKind, size: usize, phase: Phase) {
        self.events.push(Event::Message(Record {
            from,
            to,
            kind,
            size,
            phase,
        }));
    }

    /// Sends each demand and logs the one-sub-symbol answers.
    fn download(&mut self, rn: usize, demands: &[(usize, Felem)]) -> BTreeMap<usize, Belem> {
        let tw = self.code.tower_arc().clone();
        let mut out = BTreeMap::new();
        for &(x, c) in demands {
            self.log(rn, x, PayloadKind::Demand, 0, Phase::Download);
            let answer = node_response(&tw, c, self.alive_symbol(x));
            self.log(x, rn, PayloadKind::Trace, 1, Phase::Download);
            out.insert(x, answer);
        }
        out
    }

    /// Repairs every failed node with `scheme`, restores the recovered
    /// symbols and returns the report with its verdict filled in. The event
    /// log is reset at the start of each repair.
    pub fn repair(&mut self, scheme: Scheme) -> Result<BandwidthReport> {
        let count = self.failed.len();
        let ok = match scheme {
            Scheme::Gw => count == 1,
            Scheme::DepthOne | Scheme::DepthTwo => count == 2,
            Scheme::Naive => (1..=MAX_FAILURES).contains(&count),
        };
        if !ok {
            return Err(Error::Inapplicable(format!(
                "{scheme} cannot repair {count} failed node(s)"
            )));
        }
        self.events.clear();
        let (recovered, rns) = match scheme {
            Scheme::Naive => self.repair_naive()?,
            Scheme::Gw => self.repair_gw()?,
            Scheme::DepthOne => self.repair_dual(DualScheme::DepthOne)?,
            Scheme::DepthTwo => self.repair_dual(DualScheme::DepthTwo)?,
        };
        let mut report = BandwidthReport::new(scheme, rns, self.code.k(), self.code.tower().t());
        report.verdict = self
            .failed
            .iter()
            .zip(&recovered)
            .map(|(&i, &s)| self.snapshot[i] == s)
            .collect();
        for (&i, &s) in self.failed.iter().zip(&recovered) {
            self.nodes[i] = Some(s);
        }
        self.failed.clear();
        Ok(report)
    }

    fn repair_naive(&mut self) -> Result<(Vec<Felem>, Vec<RnBandwidth>)> {
        let t = self.code.tower().t();
        let k = self.code.k();
        let first = self.failed[0];
        let sources: Vec<usize> = (0..self.code.n())
            .filter(|i| self.nodes[*i].is_some())
            .take(k)
            .collect();
        let mut values = Vec::with_capacity(k);
        for &x in &sources {
            self.log(x, first, PayloadKind::Symbol, t, Phase::Download);
            values.push(self.alive_symbol(x));
        }
        let message = self.code.interpolate_decode(&sources, &values)?;
        let tw = self.code.tower_arc().clone();
        let recovered: Vec<Felem> = self
            .failed
            .iter()
            .map(|&i| eval_poly(&tw, &message, self.code.point(i)))
            .collect();
        self.events.push(Event::Recovered(first));
        let mut rns = vec![RnBandwidth::new(first, k * t, 0)];
        let rest: Vec<usize> = self.failed[1..].to_vec();
        for other in rest {
            self.log(first, other, PayloadKind::Symbol, t, Phase::Collab);
            self.events.push(Event::Recovered(other));
            rns.push(RnBandwidth::new(other, 0, t));
        }
        Ok((recovered, rns))
    }

    fn repair_gw(&mut self) -> Result<(Vec<Felem>, Vec<RnBandwidth>)> {
        let erased = self.failed[0];
        let plan = build_single_plan(&self.code, erased)?;
        let traces = self.download(erased, &plan.demands());
        let symbol = plan.recover(&traces)?;
        self.events.push(Event::Recovered(erased));
        Ok((
            vec![symbol],
            vec![RnBandwidth::new(erased, traces.len(), 0)],
        ))
    }

    fn repair_dual(&mut self, scheme: DualScheme) -> Result<(Vec<Felem>, Vec<RnBandwidth>)> {
        let (a, b) = (self.failed[0], self.failed[1]);
        let plan = build_dual_plan(&self.code, a, b, scheme)?;
        let mut star = RnState::new(&plan, Role::Star);
        let mut bar = RnState::new(&plan, Role::Bar);
        for state in [&mut star, &mut bar] {
            let responses = self.download(state.node(), &plan.demands(state.role()));
            plan.absorb_downloads(state, &responses)?;
        }
        let (s, b_sym) = match scheme {
            DualScheme::DepthOne => self.collab_depth_one(&plan, &mut star, &mut bar)?,
            DualScheme::DepthTwo => self.collab_depth_two(&plan, &mut star, &mut bar)?,
        };
        let rns = [&star, &bar]
            .iter()
            .map(|st| RnBandwidth::new(st.node(), st.downloaded().len(), st.exchanged_in().len()))
            .collect();
        Ok((vec![s, b_sym], rns))
    }

    /// Both messages are computed from partial traces before either RN
    /// recovers.
    fn collab_depth_one(
        &mut self,
        plan: &DualPlan,
        star: &mut RnState,
        bar: &mut RnState,
    ) -> Result<(Felem, Felem)> {
        let to_star = collab_message_depth_one(plan, bar)?;
        self.log(
            bar.node(),
            star.node(),
            PayloadKind::Trace,
            1,
            Phase::Collab,
        );
        let to_bar = collab_message_depth_one(plan, star)?;
        self.log(
            star.node(),
            bar.node(),
            PayloadKind::Trace,
            1,
            Phase::Collab,
        );
        let s = complete_depth_one(plan, star, to_star)?;
        self.events.push(Event::Recovered(star.node()));
        let b = complete_depth_one(plan, bar, to_bar)?;
        self.events.push(Event::Recovered(bar.node()));
        Ok((s, b))
    }

    /// The star RN recovers between the two messages.
    fn collab_depth_two(
        &mut self,
        plan: &DualPlan,
        star: &mut RnState,
        bar: &mut RnState,
    ) -> Result<(Felem, Felem)> {
        let to_star = bar_message_depth_two(plan, bar)?;
        self.log(
            bar.node(),
            star.node(),
            PayloadKind::Trace,
            1,
            Phase::Collab,
        );
        let s = complete_star_depth_two(plan, star, to_star)?;
        self.events.push(Event::Recovered(star.node()));
        let to_bar = star_message_depth_two(plan, star)?;
        self.log(
            star.node(),
            bar.node(),
            PayloadKind::Trace,
            1,
            Phase::Collab,
        );
        let b = complete_bar_depth_two(plan, bar, to_bar)?;
        self.events.push(Event::Recovered(bar.node()));
        Ok((s, b))
    }
}

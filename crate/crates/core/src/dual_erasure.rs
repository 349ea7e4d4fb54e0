//! Collaborative repair of two erasures at `α*` (the star RN) and `ᾱ` (the
//! bar RN).
//!
//! Both schemes draw their first `t-1` checks from the root space
//! `K = {z : Tr(z(ᾱ-α*)) = 0}`. These checks vanish at the other erased
//! point, so each RN gets `t-1` traces of its symbol from `n-2` downloads.
//! The last trace needs one sub-symbol from the peer RN:
//!
//! * depth one (`char F | t`): each RN derives the peer's repair trace from
//!   its own partial traces and both messages travel at once;
//! * depth two (any `t`): the star RN scales its checks by `τ` so that the
//!   peer's first partial trace is exactly what it lacks, recovers, and only
//!   then answers the bar RN.
//!
//! All check values carry the GRS multipliers `λ`, so codes on a subset of
//! `F` are repaired as well.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{BBasis, Belem, Felem};
use crate::report::{BandwidthReport, RnBandwidth, Scheme};
use crate::rs_code::{check_eval, node_response, CheckSpec, CodeParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualScheme {
    DepthOne,
    DepthTwo,
}

impl From<DualScheme> for Scheme {
    fn from(s: DualScheme) -> Self {
        match s {
            DualScheme::DepthOne => Scheme::DepthOne,
            DualScheme::DepthTwo => Scheme::DepthTwo,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Star,
    Bar,
}

impl Role {
    pub fn peer(self) -> Role {
        match self {
            Role::Star => Role::Bar,
            Role::Bar => Role::Star,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualPlan {
    code: CodeParams,
    star: usize,
    bar: usize,
    scheme: DualScheme,
    u: BBasis,
    v: BBasis,
    p_checks: Vec<CheckSpec>,
    q_checks: Vec<CheckSpec>,
    tau: Felem,
    dep_p: Option<Vec<Belem>>,
    dep_q: Option<Vec<Belem>>,
    /// Dual of `{τ u_i}`.
    star_dual: BBasis,
    /// Dual of `{v_i}`.
    bar_dual: BBasis,
    /// `Tr(u_i(x - α*))` per node.
    star_coeffs: Vec<Vec<Belem>>,
    /// `Tr(v_i(x - ᾱ))` per node.
    bar_coeffs: Vec<Vec<Belem>>,
    /// `Tr(u_t(ᾱ - α*))`, nonzero since `u_t ∉ K`.
    star_cross: Belem,
    /// `Tr(v_t(α* - ᾱ))`.
    bar_cross: Belem,
}

/// Builds a plan with `U = V` = the default root space basis.
pub fn build_dual_plan(
    code: &CodeParams,
    star: usize,
    bar: usize,
    scheme: DualScheme,
) -> Result<DualPlan> {
    check_applicable(code, star, bar, scheme)?;
    let tw = code.tower();
    let root = tw.root_space(code.point(star), code.point(bar))?;
    build_dual_plan_with_bases(code, star, bar, scheme, &root, &root)
}

fn check_applicable(code: &CodeParams, star: usize, bar: usize, scheme: DualScheme) -> Result<()> {
    code.check_index(star)?;
    code.check_index(bar)?;
    if star == bar {
        return Err(Error::Domain("the two erased positions coincide".into()));
    }
    let tw = code.tower();
    let t = tw.t();
    if t == 1 {
        return Err(Error::Inapplicable(
            "t = 1 leaves an empty root space; naive repair is already optimal".into(),
        ));
    }
    code.require_eligible()?;
    if scheme == DualScheme::DepthOne && !t.is_multiple_of(tw.p() as usize) {
        return Err(Error::Inapplicable(format!(
            "char {} does not divide t={t}",
            tw.p()
        )));
    }
    Ok(())
}

/// Builds a plan from caller-chosen bases `U`, `V` of the root space
/// `K_{α*,ᾱ}` (each `t-1` elements).
pub fn build_dual_plan_with_bases(
    code: &CodeParams,
    star: usize,
    bar: usize,
    scheme: DualScheme,
    u: &[Felem],
    v: &[Felem],
) -> Result<DualPlan> {
    check_applicable(code, star, bar, scheme)?;
    let tw = code.tower();
    let t = tw.t();
    let (a, b) = (code.point(star), code.point(bar));
    let diff = tw.sub(b, a);
    for basis in [u, v] {
        if basis.len() != t - 1 {
            return Err(Error::Arity {
                expected: t - 1,
                got: basis.len(),
            });
        }
        if basis.iter().any(|&z| !tw.trace(tw.mul(z, diff)).is_zero()) {
            return Err(Error::Domain("basis element outside the root space".into()));
        }
    }
    let (u_full, _) = tw.extend_basis(u)?;
    let (v_full, _) = tw.extend_basis(v)?;

    let p_plain: Vec<CheckSpec> = u_full.iter().map(|&ui| CheckSpec::new(ui, a)).collect();
    let q_checks: Vec<CheckSpec> = v_full.iter().map(|&vi| CheckSpec::new(vi, b)).collect();
    let pt_at_bar = check_eval(tw, &p_plain[t - 1], b);
    assert!(!pt_at_bar.is_zero(), "u_t lies outside the root space");

    let (tau, dep_p, dep_q) = match scheme {
        DualScheme::DepthOne => {
            let qt_at_star = check_eval(tw, &q_checks[t - 1], a);
            let dep_p = tw
                .coords_in_basis(pt_at_bar, v)
                .expect("p_t(ᾱ) lies in the root space when char F divides t");
            let dep_q = tw
                .coords_in_basis(qt_at_star, u)
                .expect("q_t(α*) lies in the root space when char F divides t");
            (Felem::ONE, Some(dep_p), Some(dep_q))
        }
        DualScheme::DepthTwo => (tw.div(v_full[0], pt_at_bar), None, None),
    };
    let p_checks: Vec<CheckSpec> = p_plain.into_iter().map(|c| c.scaled(tau)).collect();

    let scaled_u: Vec<Felem> = u_full.iter().map(|&ui| tw.mul(tau, ui)).collect();
    let star_dual = tw.dual_basis(&scaled_u)?;
    let bar_dual = tw.dual_basis(&v_full)?;

    let coeffs = |basis: &BBasis, center: Felem| -> Vec<Vec<Belem>> {
        basis
            .iter()
            .map(|&w| {
                code.points()
                    .iter()
                    .map(|&x| tw.trace(tw.mul(w, tw.sub(x, center))))
                    .collect()
            })
            .collect()
    };
    let star_coeffs = coeffs(&u_full, a);
    let bar_coeffs = coeffs(&v_full, b);
    let star_cross = star_coeffs[t - 1][bar];
    let bar_cross = bar_coeffs[t - 1][star];
    assert!(!star_cross.is_zero() && !bar_cross.is_zero());

    Ok(DualPlan {
        code: code.clone(),
        star,
        bar,
        scheme,
        u: u_full,
        v: v_full,
        p_checks,
        q_checks,
        tau,
        dep_p,
        dep_q,
        star_dual,
        bar_dual,
        star_coeffs,
        bar_coeffs,
        star_cross,
        bar_cross,
    })
}

/// A sub-symbol passed between the two RNs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exchange {
    /// Node index of the other RN.
    pub peer: usize,
    pub value: Belem,
}

/// Working state of one replacement node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RnState {
    role: Role,
    node: usize,
    downloaded: BTreeMap<usize, Belem>,
    traces: Vec<Belem>,
    exchanged_in: Vec<Exchange>,
    exchanged_out: Vec<Exchange>,
    recovered: Option<Felem>,
}

impl RnState {
    pub fn new(plan: &DualPlan, role: Role) -> Self {
        Self {
            role,
            node: plan.node(role),
            downloaded: BTreeMap::new(),
            traces: Vec::new(),
            exchanged_in: Vec::new(),
            exchanged_out: Vec::new(),
            recovered: None,
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn downloaded(&self) -> &BTreeMap<usize, Belem> {
        &self.downloaded
    }

    /// Target traces assembled so far: `t-1` after the download phase, `t`
    /// once complete.
    pub fn traces(&self) -> &[Belem] {
        &self.traces
    }

    pub fn exchanged_in(&self) -> &[Exchange] {
        &self.exchanged_in
    }

    pub fn exchanged_out(&self) -> &[Exchange] {
        &self.exchanged_out
    }

    pub fn recovered(&self) -> Option<Felem> {
        self.recovered
    }

    /// Sub-symbols received: downloads plus the peer's message.
    pub fn bandwidth(&self) -> usize {
        self.downloaded.len() + self.exchanged_in.len()
    }

    fn downloads_done(&self) -> bool {
        !self.downloaded.is_empty() || !self.traces.is_empty()
    }
}

impl DualPlan {
    pub fn code(&self) -> &CodeParams {
        &self.code
    }

    pub fn scheme(&self) -> DualScheme {
        self.scheme
    }

    pub fn star_index(&self) -> usize {
        self.star
    }

    pub fn bar_index(&self) -> usize {
        self.bar
    }

    pub fn node(&self, role: Role) -> usize {
        match role {
            Role::Star => self.star,
            Role::Bar => self.bar,
        }
    }

    /// `U' = {u_1..u_t}`; the first `t-1` span the root space.
    pub fn u_basis(&self) -> &BBasis {
        &self.u
    }

    pub fn v_basis(&self) -> &BBasis {
        &self.v
    }

    /// `p_i = τ·p_{u_i,α*}` (`τ = 1` for depth one).
    pub fn p_checks(&self) -> &[CheckSpec] {
        &self.p_checks
    }

    /// `q_i = p_{v_i,ᾱ}`.
    pub fn q_checks(&self) -> &[CheckSpec] {
        &self.q_checks
    }

    pub fn tau(&self) -> Felem {
        self.tau
    }

    /// Coordinates of `p_t(ᾱ)` over `v_1..v_{t-1}` (depth one only).
    pub fn dep_p(&self) -> Option<&[Belem]> {
        self.dep_p.as_deref()
    }

    /// Coordinates of `q_t(α*)` over `u_1..u_{t-1}` (depth one only).
    pub fn dep_q(&self) -> Option<&[Belem]> {
        self.dep_q.as_deref()
    }

    pub fn helpers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.code.n()).filter(move |&i| i != self.star && i != self.bar)
    }

    /// Demand coefficient per helper: `τλ_x/(x-α*)` for the star RN,
    /// `λ_x/(x-ᾱ)` for the bar RN.
    pub fn demands(&self, role: Role) -> Vec<(usize, Felem)> {
        let tw = self.code.tower();
        let (center, scale) = match role {
            Role::Star => (self.code.point(self.star), self.tau),
            Role::Bar => (self.code.point(self.bar), Felem::ONE),
        };
        self.helpers()
            .map(|x| {
                let lambda = tw.mul(scale, self.code.multipliers()[x]);
                (x, tw.div(lambda, tw.sub(self.code.point(x), center)))
            })
            .collect()
    }

    fn coeffs(&self, role: Role) -> &[Vec<Belem>] {
        match role {
            Role::Star => &self.star_coeffs,
            Role::Bar => &self.bar_coeffs,
        }
    }

    /// `-sum_x coeffs[i][x]·d_x` over the downloaded repair traces.
    fn download_sum(&self, role: Role, i: usize, downloaded: &BTreeMap<usize, Belem>) -> Belem {
        let tw = self.code.tower();
        let row = &self.coeffs(role)[i];
        let sum = downloaded.iter().fold(Belem::ZERO, |acc, (&x, &d)| {
            tw.b_add(acc, tw.b_mul(row[x], d))
        });
        tw.b_neg(sum)
    }

    /// Stores the helper responses and derives the first `t-1` traces.
    pub fn absorb_downloads(
        &self,
        state: &mut RnState,
        responses: &BTreeMap<usize, Belem>,
    ) -> Result<()> {
        if state.downloads_done() {
            return Err(Error::Sequencing("download phase already complete".into()));
        }
        if let Some(&x) = responses
            .keys()
            .find(|&&x| x == self.star || x == self.bar || x >= self.code.n())
        {
            return Err(Error::Domain(format!(
                "unexpected response from node index {x}"
            )));
        }
        if let Some(missing) = self.helpers().find(|x| !responses.contains_key(x)) {
            return Err(Error::Incomplete(missing));
        }
        let t = self.code.tower().t();
        state.traces = (0..t - 1)
            .map(|i| self.download_sum(state.role, i, responses))
            .collect();
        state.downloaded = responses.clone();
        Ok(())
    }

    fn require_downloads(&self, state: &RnState) -> Result<()> {
        if !state.downloads_done() {
            return Err(Error::Sequencing("download phase not complete".into()));
        }
        if state.recovered.is_some() {
            return Err(Error::Sequencing("symbol already recovered".into()));
        }
        Ok(())
    }

    fn require_scheme(&self, scheme: DualScheme) -> Result<()> {
        if self.scheme == scheme {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{:?} step called on a {:?} plan",
                scheme, self.scheme
            )))
        }
    }

    fn require_role(state: &RnState, role: Role) -> Result<()> {
        if state.role == role {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{:?} step called on the {:?} RN",
                role, state.role
            )))
        }
    }

    /// Adds the last trace, rebuilds `λ f` from the dual basis and divides
    /// by `λ`. `missing` is the term of the other erased symbol.
    fn finish(&self, state: &mut RnState, incoming: Belem, missing: Belem) -> Result<Felem> {
        let tw = self.code.tower();
        let t = tw.t();
        let rhs = self.download_sum(state.role, t - 1, &state.downloaded);
        state.traces.push(tw.b_sub(rhs, missing));
        state.exchanged_in.push(Exchange {
            peer: self.node(state.role.peer()),
            value: incoming,
        });
        let dual = match state.role {
            Role::Star => &self.star_dual,
            Role::Bar => &self.bar_dual,
        };
        let scaled = tw.combine(&state.traces, dual);
        let symbol = tw.div(scaled, self.code.multipliers()[state.node]);
        state.recovered = Some(symbol);
        Ok(symbol)
    }

    fn send(&self, state: &mut RnState, value: Belem) -> Belem {
        state.exchanged_out.push(Exchange {
            peer: self.node(state.role.peer()),
            value,
        });
        value
    }
}

/// Both RNs download one repair trace from each of the `n-2` helpers.
pub fn download_phase(
    plan: &DualPlan,
    surviving: &BTreeMap<usize, Felem>,
) -> Result<(RnState, RnState)> {
    let tw = plan.code.tower();
    let mut states = [
        RnState::new(plan, Role::Star),
        RnState::new(plan, Role::Bar),
    ];
    for state in states.iter_mut() {
        let responses = plan
            .demands(state.role)
            .into_iter()
            .map(|(x, c)| {
                surviving
                    .get(&x)
                    .map(|&s| (x, node_response(tw, c, s)))
                    .ok_or(Error::Incomplete(x))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        plan.absorb_downloads(state, &responses)?;
    }
    let [star, bar] = states;
    Ok((star, bar))
}

/// The repair trace this RN would have served had it not failed:
/// `Tr(λf(ᾱ)/(ᾱ-α*))` from the bar RN, `Tr(λf(α*)/(α*-ᾱ))` from the star RN.
/// Computed from the partial traces alone.
pub fn collab_message_depth_one(plan: &DualPlan, state: &mut RnState) -> Result<Belem> {
    plan.require_scheme(DualScheme::DepthOne)?;
    if !state.downloads_done() {
        return Err(Error::Sequencing("download phase not complete".into()));
    }
    let tw = plan.code.tower();
    let (dep, cross) = match state.role {
        Role::Bar => (plan.dep_p.as_deref(), plan.star_cross),
        Role::Star => (plan.dep_q.as_deref(), plan.bar_cross),
    };
    let dep = dep.expect("depth-one plans carry dependence coefficients");
    let combined = dep
        .iter()
        .zip(&state.traces)
        .fold(Belem::ZERO, |acc, (&c, &tr)| tw.b_add(acc, tw.b_mul(c, tr)));
    Ok(plan.send(state, tw.b_div(combined, cross)))
}

/// Finishes a depth-one repair with the peer's message.
pub fn complete_depth_one(plan: &DualPlan, state: &mut RnState, incoming: Belem) -> Result<Felem> {
    plan.require_scheme(DualScheme::DepthOne)?;
    plan.require_downloads(state)?;
    let tw = plan.code.tower();
    let cross = match state.role {
        Role::Star => plan.star_cross,
        Role::Bar => plan.bar_cross,
    };
    plan.finish(state, incoming, tw.b_mul(cross, incoming))
}

/// Depth two, first message: the bar RN's first partial trace
/// `Tr(v_1 λ f(ᾱ))`, which equals the star RN's missing `Tr(p*_t(ᾱ) λ f(ᾱ))`.
pub fn bar_message_depth_two(plan: &DualPlan, bar: &mut RnState) -> Result<Belem> {
    plan.require_scheme(DualScheme::DepthTwo)?;
    DualPlan::require_role(bar, Role::Bar)?;
    if !bar.downloads_done() {
        return Err(Error::Sequencing("download phase not complete".into()));
    }
    let value = bar.traces[0];
    Ok(plan.send(bar, value))
}

/// Depth two: the star RN recovers its symbol from the bar RN's message.
pub fn complete_star_depth_two(
    plan: &DualPlan,
    star: &mut RnState,
    incoming: Belem,
) -> Result<Felem> {
    plan.require_scheme(DualScheme::DepthTwo)?;
    DualPlan::require_role(star, Role::Star)?;
    plan.require_downloads(star)?;
    plan.finish(star, incoming, incoming)
}

/// Depth two, second message: computed from the recovered star symbol.
pub fn star_message_depth_two(plan: &DualPlan, star: &mut RnState) -> Result<Belem> {
    plan.require_scheme(DualScheme::DepthTwo)?;
    DualPlan::require_role(star, Role::Star)?;
    let symbol = star.recovered.ok_or_else(|| {
        Error::Sequencing("star RN must recover its symbol before answering".into())
    })?;
    let tw = plan.code.tower();
    let (a, b) = (plan.code.point(plan.star), plan.code.point(plan.bar));
    let lambda = plan.code.multipliers()[plan.star];
    let value = node_response(tw, tw.div(lambda, tw.sub(a, b)), symbol);
    Ok(plan.send(star, value))
}

/// Depth two: the bar RN finishes with the star RN's repair trace.
pub fn complete_bar_depth_two(
    plan: &DualPlan,
    bar: &mut RnState,
    incoming: Belem,
) -> Result<Felem> {
    plan.require_scheme(DualScheme::DepthTwo)?;
    DualPlan::require_role(bar, Role::Bar)?;
    plan.require_downloads(bar)?;
    let tw = plan.code.tower();
    plan.finish(bar, incoming, tw.b_mul(plan.bar_cross, incoming))
}

fn dual_report(plan: &DualPlan, star: &RnState, bar: &RnState) -> BandwidthReport {
    let tw = plan.code.tower();
    BandwidthReport::new(
        plan.scheme.into(),
        [star, bar]
            .iter()
            .map(|s| RnBandwidth::new(s.node, s.downloaded.len(), s.exchanged_in.len()))
            .collect(),
        plan.code.k(),
        tw.t(),
    )
}

/// Runs the whole depth-one protocol. The report's verdict is left empty.
pub fn run_depth_one(
    plan: &DualPlan,
    surviving: &BTreeMap<usize, Felem>,
) -> Result<(Felem, Felem, BandwidthReport)> {
    let (mut star, mut bar) = download_phase(plan, surviving)?;
    let to_bar = collab_message_depth_one(plan, &mut star)?;
    let to_star = collab_message_depth_one(plan, &mut bar)?;
    let s = complete_depth_one(plan, &mut star, to_star)?;
    let b = complete_depth_one(plan, &mut bar, to_bar)?;
    Ok((s, b, dual_report(plan, &star, &bar)))
}

/// Runs the whole depth-two protocol. The report's verdict is left empty.
pub fn run_depth_two(
    plan: &DualPlan,
    surviving: &BTreeMap<usize, Felem>,
) -> Result<(Felem, Felem, BandwidthReport)> {
    let (mut star, mut bar) = download_phase(plan, surviving)?;
    let to_star = bar_message_depth_two(plan, &mut bar)?;
    let s = complete_star_depth_two(plan, &mut star, to_star)?;
    let to_bar = star_message_depth_two(plan, &mut star)?;
    let b = complete_bar_depth_two(plan, &mut bar, to_bar)?;
    Ok((s, b, dual_report(plan, &star, &bar)))
}

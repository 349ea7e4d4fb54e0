//! One-erasure trace repair.
//!
//! The replacement node for `α*` asks every surviving node `α` for the
//! single sub-symbol `Tr(λ_α f(α)/(α-α*))`. With a basis `u_1..u_t` of `F`
//! over `B`, each target trace is a `B`-combination of those downloads:
//!
//! ```text
//! Tr(u_i λ* f(α*)) = -sum_α Tr(u_i(α-α*)) · Tr(λ_α f(α)/(α-α*))
//! ```
//!
//! and the symbol follows from the dual basis.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{BBasis, Belem, Felem, TowerParams};
use crate::rs_code::{CheckSpec, CodeParams};

#[derive(Clone, Debug)]
pub struct SinglePlan {
    code: CodeParams,
    erased: usize,
    basis: BBasis,
    checks: Vec<CheckSpec>,
    dual: BBasis,
    /// `coeffs[i][node] = Tr(u_i (α_node - α*))`, zero at the erased node.
    coeffs: Vec<Vec<Belem>>,
}

pub fn build_single_plan(code: &CodeParams, erased: usize) -> Result<SinglePlan> {
    code.require_eligible()?;
    code.check_index(erased)?;
    let tw = code.tower();
    let star = code.point(erased);
    let basis = tw.complete_basis(&[])?;
    let dual = tw.dual_basis(&basis)?;
    let checks = basis.iter().map(|&u| CheckSpec::new(u, star)).collect();
    let coeffs = basis
        .iter()
        .map(|&u| {
            code.points()
                .iter()
                .map(|&a| tw.trace(tw.mul(u, tw.sub(a, star))))
                .collect()
        })
        .collect();
    Ok(SinglePlan {
        code: code.clone(),
        erased,
        basis,
        checks,
        dual,
        coeffs,
    })
}

/// `Tr(λ_α · symbol / (α - α*))`: a surviving node's whole contribution.
pub fn node_repair_trace(
    tower: &TowerParams,
    symbol: Felem,
    alpha: Felem,
    alpha_star: Felem,
    lambda: Felem,
) -> Result<Belem> {
    if alpha == alpha_star {
        return Err(Error::Domain("helper point equals the erased point".into()));
    }
    let c = tower.div(lambda, tower.sub(alpha, alpha_star));
    Ok(tower.trace(tower.mul(c, symbol)))
}

pub fn recover_single(plan: &SinglePlan, traces: &BTreeMap<usize, Belem>) -> Result<Felem> {
    plan.recover(traces)
}

impl SinglePlan {
    pub fn code(&self) -> &CodeParams {
        &self.code
    }

    pub fn erased_index(&self) -> usize {
        self.erased
    }

    pub fn basis(&self) -> &BBasis {
        &self.basis
    }

    pub fn checks(&self) -> &[CheckSpec] {
        &self.checks
    }

    pub fn dual_basis(&self) -> &BBasis {
        &self.dual
    }

    pub fn multipliers(&self) -> &[Felem] {
        self.code.multipliers()
    }

    /// `Tr(u_i(α - α*))` for every node; the only data that depends on `i`.
    pub fn combination_coefficients(&self, i: usize) -> &[Belem] {
        &self.coeffs[i]
    }

    pub fn helpers(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.code.n()).filter(move |&i| i != self.erased)
    }

    /// Demand coefficient `λ_α/(α - α*)` sent to helper `node`.
    pub fn demand(&self, node: usize) -> Result<Felem> {
        self.code.check_index(node)?;
        if node == self.erased {
            return Err(Error::Domain("the erased node cannot help".into()));
        }
        let tw = self.code.tower();
        let star = self.code.point(self.erased);
        Ok(tw.div(
            self.code.multipliers()[node],
            tw.sub(self.code.point(node), star),
        ))
    }

    pub fn demands(&self) -> Vec<(usize, Felem)> {
        self.helpers()
            .map(|i| (i, self.demand(i).expect("helper index is valid")))
            .collect()
    }

    /// `Tr(u_i λ* f(α*))` for `i = 1..t`.
    pub fn target_traces(&self, traces: &BTreeMap<usize, Belem>) -> Result<Vec<Belem>> {
        let tw = self.code.tower();
        if let Some(&bad) = traces
            .keys()
            .find(|&&i| i == self.erased || i >= self.code.n())
        {
            return Err(Error::Domain(format!(
                "unexpected trace from node index {bad}"
            )));
        }
        let downloads: Vec<(usize, Belem)> = self
            .helpers()
            .map(|i| traces.get(&i).map(|&d| (i, d)).ok_or(Error::Incomplete(i)))
            .collect::<Result<_>>()?;
        Ok(self
            .coeffs
            .iter()
            .map(|row| {
                let sum = downloads.iter().fold(Belem::ZERO, |acc, &(i, d)| {
                    tw.b_add(acc, tw.b_mul(row[i], d))
                });
                tw.b_neg(sum)
            })
            .collect())
    }

    pub fn recover(&self, traces: &BTreeMap<usize, Belem>) -> Result<Felem> {
        let tw = self.code.tower();
        let targets = self.target_traces(traces)?;
        let scaled = tw.combine(&targets, &self.dual);
        Ok(tw.div(scaled, self.code.multipliers()[self.erased]))
    }
}

//! Reed-Solomon codes over `F`, their GRS dual multipliers, the
//! interpolation decoder used as the repair oracle, and trace check
//! polynomials.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::field::{parse_u32, Belem, Felem, TowerParams};

/// Work budget (field multiplications) for the random orthogonality check
/// run when a code is constructed.
const ORTHOGONALITY_BUDGET: usize = 1 << 24;
const ORTHOGONALITY_PAIRS: usize = 100;

/// `RS(A, k)`: evaluations of polynomials of degree `< k` on the ordered
/// points `A`. Node `i` stores the evaluation at `points[i]`.
#[derive(Clone, Debug)]
pub struct CodeParams {
    tower: Arc<TowerParams>,
    points: Vec<Felem>,
    k: usize,
    multipliers: Vec<Felem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub symbols: Vec<Felem>,
}

/// `0, 1, g, g^2, ..`: the canonical ordering of the first `n` points.
pub fn default_points(tower: &TowerParams, n: usize) -> Result<Vec<Felem>> {
    if n > tower.order() as usize {
        return Err(Error::Domain(format!(
            "n = {n} exceeds |F| = {}",
            tower.order()
        )));
    }
    let mut points = Vec::with_capacity(n);
    points.push(Felem::ZERO);
    points.extend(
        (0..tower.order() as u64 - 1)
            .map(|i| tower.pow(tower.generator(), i))
            .take(n.saturating_sub(1)),
    );
    points.truncate(n);
    Ok(points)
}

/// GRS multipliers of the dual code: `λ_i = -prod_{j≠i} (α_i - α_j)^{-1}`.
///
/// The global sign makes `λ_i = 1` for every `i` when the points cover all
/// of `F`; any common nonzero factor keeps the duality intact.
pub fn dual_multipliers(tower: &TowerParams, points: &[Felem]) -> Result<Vec<Felem>> {
    check_distinct(tower, points)?;
    Ok(points
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let prod = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Felem::ONE, |acc, (_, &b)| tower.mul(acc, tower.sub(a, b)));
            tower.neg(tower.inv(prod))
        })
        .collect())
}

fn check_distinct(tower: &TowerParams, points: &[Felem]) -> Result<()> {
    let mut seen = HashSet::with_capacity(points.len());
    for &a in points {
        if !tower.contains(a) {
            return Err(Error::Domain(format!("point {} outside F", a.index())));
        }
        if !seen.insert(a) {
            return Err(Error::Domain(format!(
                "duplicate evaluation point {}",
                tower.format_felem(a)
            )));
        }
    }
    Ok(())
}

/// Horner evaluation of a low-to-high coefficient vector.
pub fn eval_poly(tower: &TowerParams, coeffs: &[Felem], x: Felem) -> Felem {
    coeffs
        .iter()
        .rev()
        .fold(Felem::ZERO, |acc, &c| tower.add(tower.mul(acc, x), c))
}

fn random_poly(tower: &TowerParams, rng: &mut impl Rng, len: usize) -> Vec<Felem> {
    (0..len)
        .map(|_| Felem::from_index(rng.random_range(0..tower.order())))
        .collect()
}

impl CodeParams {
    pub fn new(tower: Arc<TowerParams>, points: Vec<Felem>, k: usize) -> Result<Self> {
        let n = points.len();
        if k == 0 || k >= n {
            return Err(Error::Domain(format!(
                "need 1 <= k < n, got k = {k}, n = {n}"
            )));
        }
        let multipliers = dual_multipliers(&tower, &points)?;
        let code = Self {
            tower,
            points,
            k,
            multipliers,
        };
        code.validate_multipliers();
        Ok(code)
    }

    /// Code on the first `n` points of [`default_points`].
    pub fn with_default_points(tower: Arc<TowerParams>, n: usize, k: usize) -> Result<Self> {
        let points = default_points(&tower, n)?;
        Self::new(tower, points, k)
    }

    /// Checks `sum_i λ_i p(α_i) f(α_i) = 0` on random `f` of degree `< k`
    /// and `p` of degree `< n-k`.
    fn validate_multipliers(&self) {
        let tw = &*self.tower;
        let n = self.n();
        let pairs = ORTHOGONALITY_PAIRS.min(ORTHOGONALITY_BUDGET / (n * n).max(1));
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x6c61_6d62_6461);
        for _ in 0..pairs {
            let f = random_poly(tw, &mut rng, self.k);
            let p = random_poly(tw, &mut rng, n - self.k);
            let sum = self.inner_product(|a| tw.mul(eval_poly(tw, &p, a), eval_poly(tw, &f, a)));
            assert!(sum.is_zero(), "dual multipliers fail orthogonality");
        }
    }

    fn inner_product(&self, term: impl Fn(Felem) -> Felem) -> Felem {
        let tw = &*self.tower;
        self.points
            .iter()
            .zip(&self.multipliers)
            .fold(Felem::ZERO, |acc, (&a, &l)| tw.add(acc, tw.mul(l, term(a))))
    }

    pub fn tower(&self) -> &TowerParams {
        &self.tower
    }

    pub fn tower_arc(&self) -> &Arc<TowerParams> {
        &self.tower
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn points(&self) -> &[Felem] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Felem {
        self.points[index]
    }

    pub fn multipliers(&self) -> &[Felem] {
        &self.multipliers
    }

    /// `n - k >= |B|^{t-1}`, required by every trace repair scheme.
    pub fn repair_eligible(&self) -> bool {
        self.n() - self.k >= self.tower.check_degree_bound()
    }

    pub(crate) fn require_eligible(&self) -> Result<()> {
        if self.repair_eligible() {
            Ok(())
        } else {
            Err(Error::Inapplicable(format!(
                "n - k = {} is below |B|^(t-1) = {}",
                self.n() - self.k,
                self.tower.check_degree_bound()
            )))
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "node index {index} out of range for n = {}",
                self.n()
            )))
        }
    }

    /// Evaluates the polynomial whose coefficients are `message` at every point.
    pub fn encode(&self, message: &[Felem]) -> Result<Codeword> {
        if message.len() != self.k {
            return Err(Error::Arity {
                expected: self.k,
                got: message.len(),
            });
        }
        let symbols = self
            .points
            .iter()
            .map(|&a| eval_poly(&self.tower, message, a))
            .collect();
        Ok(Codeword { symbols })
    }

    /// Lagrange interpolation through the first `k` of the given positions.
    /// Any further positions are checked against the interpolant.
    pub fn interpolate_decode(&self, positions: &[usize], values: &[Felem]) -> Result<Vec<Felem>> {
        let tw = &*self.tower;
        if positions.len() != values.len() {
            return Err(Error::Arity {
                expected: positions.len(),
                got: values.len(),
            });
        }
        if positions.len() < self.k {
            return Err(Error::Arity {
                expected: self.k,
                got: positions.len(),
            });
        }
        let mut seen = HashSet::new();
        for &i in positions {
            self.check_index(i)?;
            if !seen.insert(i) {
                return Err(Error::Domain(format!("position {i} given twice")));
            }
        }
        let xs: Vec<Felem> = positions[..self.k]
            .iter()
            .map(|&i| self.points[i])
            .collect();

        // master(x) = prod_j (x - x_j)
        let mut master = vec![Felem::ONE];
        for &xj in &xs {
            let mut next = vec![Felem::ZERO; master.len() + 1];
            for (d, &c) in master.iter().enumerate() {
                next[d + 1] = tw.add(next[d + 1], c);
                next[d] = tw.sub(next[d], tw.mul(c, xj));
            }
            master = next;
        }

        let mut f = vec![Felem::ZERO; self.k];
        for (i, &xi) in xs.iter().enumerate() {
            let basis = divide_linear(tw, &master, xi);
            let denom = eval_poly(tw, &basis, xi);
            let scale = tw.div(values[i], denom);
            for (acc, &c) in f.iter_mut().zip(&basis) {
                *acc = tw.add(*acc, tw.mul(scale, c));
            }
        }

        for (&i, &v) in positions.iter().zip(values).skip(self.k) {
            if eval_poly(tw, &f, self.points[i]) != v {
                return Err(Error::Corruption(self.k));
            }
        }
        Ok(f)
    }

    /// Header line of the codeword text form.
    pub fn header(&self) -> String {
        let tw = &*self.tower;
        let points: Vec<String> = self.points.iter().map(|&a| tw.format_felem(a)).collect();
        format!(
            "{tw} n={} k={} points={}",
            self.n(),
            self.k,
            points.join(";")
        )
    }

    pub fn parse_header(line: &str) -> Result<Self> {
        let mut tower_part = Vec::new();
        let (mut n, mut k, mut points) = (None, None, None);
        for token in line.split_whitespace() {
            match token.split_once('=') {
                Some(("n", v)) => n = Some(parse_u32(v)? as usize),
                Some(("k", v)) => k = Some(parse_u32(v)? as usize),
                Some(("points", v)) => points = Some(v.to_string()),
                _ => tower_part.push(token),
            }
        }
        let tower: TowerParams = tower_part.join(" ").parse()?;
        let k = k.ok_or_else(|| Error::Parse("header lacks k".into()))?;
        let points = match points {
            Some(list) => list
                .split(';')
                .map(|s| tower.parse_felem(s))
                .collect::<Result<Vec<_>>>()?,
            None => default_points(
                &tower,
                n.ok_or_else(|| Error::Parse("header lacks n and points".into()))?,
            )?,
        };
        if let Some(n) = n {
            if n != points.len() {
                return Err(Error::Parse(format!(
                    "n = {n} but {} points listed",
                    points.len()
                )));
            }
        }
        Self::new(Arc::new(tower), points, k)
    }
}

/// `poly / (x - root)`, dropping the remainder.
fn divide_linear(tower: &TowerParams, poly: &[Felem], root: Felem) -> Vec<Felem> {
    let d = poly.len() - 1;
    let mut q = vec![Felem::ZERO; d];
    let mut carry = Felem::ZERO;
    for j in (1..=d).rev() {
        carry = tower.add(poly[j], tower.mul(carry, root));
        q[j - 1] = carry;
    }
    q
}

/// Serializes a codeword: the code header, then one symbol per line.
pub fn write_codeword(code: &CodeParams, word: &Codeword) -> String {
    let mut out = code.header();
    out.push('\n');
    for &s in &word.symbols {
        let _ = writeln!(out, "{}", code.tower().format_felem(s));
    }
    out
}

pub fn read_codeword(text: &str) -> Result<(CodeParams, Codeword)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty codeword text".into()))?;
    let code = CodeParams::parse_header(header)?;
    let symbols = lines
        .map(|l| code.tower().parse_felem(l.trim()))
        .collect::<Result<Vec<_>>>()?;
    if symbols.len() != code.n() {
        return Err(Error::Arity {
            expected: code.n(),
            got: symbols.len(),
        });
    }
    Ok((code, Codeword { symbols }))
}

/// The trace check polynomial `τ·Tr(u(x-α))/(x-α)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckSpec {
    pub u: Felem,
    pub alpha: Felem,
    pub tau: Felem,
}

impl CheckSpec {
    pub fn new(u: Felem, alpha: Felem) -> Self {
        Self {
            u,
            alpha,
            tau: Felem::ONE,
        }
    }

    pub fn scaled(self, tau: Felem) -> Self {
        Self { tau, ..self }
    }
}

/// Value of the check at `x`; at `x = α` this is `τ·u`.
pub fn check_eval(tower: &TowerParams, check: &CheckSpec, x: Felem) -> Felem {
    if x == check.alpha {
        return tower.mul(check.tau, check.u);
    }
    let shift = tower.sub(x, check.alpha);
    let tr = tower.embed(tower.trace(tower.mul(check.u, shift)));
    tower.mul(check.tau, tower.div(tr, shift))
}

/// Monomial coefficients of the check, low to high. The degree is exactly
/// `|B|^{t-1} - 1`.
pub fn expand_check(tower: &TowerParams, check: &CheckSpec) -> Result<Vec<Felem>> {
    if check.u.is_zero() || check.tau.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let t = tower.t();
    let top = tower.check_degree_bound();
    // Tr(u(x-α)) = sum_i u^{Q_i} (x^{Q_i} - α^{Q_i}), Q_i = |B|^i.
    let mut numerator = vec![Felem::ZERO; top + 1];
    let mut q = 1usize;
    for i in 0..t {
        let ui = tower.frobenius(check.u, i);
        let ai = tower.frobenius(check.alpha, i);
        numerator[q] = tower.add(numerator[q], ui);
        numerator[0] = tower.sub(numerator[0], tower.mul(ui, ai));
        q *= tower.sub_order() as usize;
    }
    debug_assert!(eval_poly(tower, &numerator, check.alpha).is_zero());
    let quotient = divide_linear(tower, &numerator, check.alpha);
    Ok(quotient
        .into_iter()
        .map(|c| tower.mul(check.tau, c))
        .collect())
}

/// What a surviving node returns for the demand coefficient `c`:
/// the single sub-symbol `Tr(c·symbol)`.
pub fn node_response(tower: &TowerParams, demand: Felem, symbol: Felem) -> Belem {
    tower.trace(tower.mul(demand, symbol))
}

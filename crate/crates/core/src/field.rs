//! The field tower `GF(p) ⊂ B = GF(p^m) ⊂ F = GF(p^{mt})`.
//!
//! Elements of `F` ([`Felem`]) are stored as the integer `sum c_i p^i` of
//! their coordinates in the power basis of the defining polynomial.
//! Elements of `B` ([`Belem`]) are stored the same way, with coordinates in
//! the basis `1, s, .., s^{m-1}` where `s` is the subfield generator inside
//! `F`. Multiplication goes through log/antilog tables, so field sizes are
//! capped at `2^16`.
//!
//! `F` is also a `t`-dimensional vector space over `B`. The fixed reference
//! basis for that view is `1, g, .., g^{t-1}` for the primitive element `g`.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, Span};

/// Largest supported `|F|`.
pub const MAX_FIELD_SIZE: u32 = 1 << 16;

const NOT_IN_SUBFIELD: u32 = u32::MAX;

/// A symbol: an element of the extension field `F`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Felem(u32);

impl Felem {
    pub const ZERO: Felem = Felem(0);
    pub const ONE: Felem = Felem(1);

    /// Builds an element from its packed coordinate index. The caller is
    /// responsible for staying below `|F|`.
    pub const fn from_index(index: u32) -> Self {
        Felem(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A sub-symbol: an element of the base field `B`, the unit of repair
/// bandwidth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Belem(u32);

impl Belem {
    pub const ZERO: Belem = Belem(0);
    pub const ONE: Belem = Belem(1);

    pub const fn from_index(index: u32) -> Self {
        Belem(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A list of `F` elements that is linearly independent over `B`.
///
/// Holds at most `t` elements. Partial bases (such as a basis of a root
/// space) and full bases of `F` over `B` share this type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BBasis {
    elems: Vec<Felem>,
}

impl BBasis {
    pub fn new(tower: &TowerParams, elems: Vec<Felem>) -> Result<Self> {
        if elems.len() > tower.t() {
            return Err(Error::Rank);
        }
        let mut span = Span::new(tower, tower.t());
        for x in &elems {
            if !span.insert(tower.ref_coords(*x)) {
                return Err(Error::Rank);
            }
        }
        Ok(Self { elems })
    }

    pub fn empty() -> Self {
        Self { elems: Vec::new() }
    }

    pub fn into_vec(self) -> Vec<Felem> {
        self.elems
    }
}

impl Deref for BBasis {
    type Target = [Felem];

    fn deref(&self) -> &[Felem] {
        &self.elems
    }
}

/// Validated description of the tower together with its arithmetic tables.
#[derive(Clone)]
pub struct TowerParams {
    p: u32,
    m: u32,
    t: u32,
    irr: Vec<u32>,
    order: u32,
    sub_order: u32,
    generator: Felem,
    subfield_gen: Felem,
    /// `exp[i] = g^i` for `0 <= i < 2(|F|-1)`.
    exp: Vec<Felem>,
    log: Vec<u32>,
    embed: Vec<Felem>,
    project: Vec<u32>,
    /// Row-major `|F| x t` table of coordinates over `B` in the reference basis.
    ref_coords: Vec<Belem>,
}

impl fmt::Debug for TowerParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TowerParams")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("t", &self.t)
            .field("irr", &self.irr)
            .field("generator", &self.generator)
            .field("subfield_gen", &self.subfield_gen)
            .finish()
    }
}

impl PartialEq for TowerParams {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.t == other.t && self.irr == other.irr
    }
}

impl Eq for TowerParams {}

/// Builds the tower `GF(p) ⊂ GF(p^m) ⊂ GF(p^{mt})`.
///
/// `irr` is the low-to-high coefficient list of a monic irreducible
/// polynomial of degree `m·t`; when absent the lexicographically least one
/// is used.
pub fn make_tower(p: u32, m: u32, t: u32, irr: Option<Vec<u32>>) -> Result<TowerParams> {
    TowerParams::new(p, m, t, irr)
}

impl TowerParams {
    pub fn new(p: u32, m: u32, t: u32, irr: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 || t == 0 {
            return Err(Error::InvalidTower("m and t must be at least 1".into()));
        }
        let degree = m
            .checked_mul(t)
            .ok_or_else(|| Error::InvalidTower("degree overflow".into()))?;
        let order = p
            .checked_pow(degree)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or_else(|| {
                Error::InvalidTower(format!("|F| = {p}^{degree} exceeds {MAX_FIELD_SIZE}"))
            })?;
        let sub_order = p.pow(m);
        let d = degree as usize;

        let irr = match irr {
            Some(irr) => {
                if irr.len() != d + 1 {
                    return Err(Error::InvalidTower(format!(
                        "irreducible polynomial must have degree {d}, got {} coefficients",
                        irr.len()
                    )));
                }
                if irr.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidTower(format!(
                        "coefficients must be below {p}"
                    )));
                }
                if irr[d] != 1 {
                    return Err(Error::InvalidTower("polynomial must be monic".into()));
                }
                if !is_irreducible(&irr, p) {
                    return Err(Error::Reducible(join(&irr), p));
                }
                irr
            }
            None => least_irreducible(p, d),
        };

        // Primitive element search uses schoolbook arithmetic; tables come after.
        let slow = SlowField { p, irr: &irr };
        let group = order - 1;
        let factors = prime_factors(group);
        let generator = (1..order)
            .map(|n| lex_nth(n, p, d))
            .find(|c| {
                factors
                    .iter()
                    .all(|&r| !slow.is_one(&slow.pow(c, (group / r) as u64)))
            })
            .map(|c| Felem(pack(&c, p)))
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = Vec::with_capacity(2 * group as usize);
        let mut log = vec![0u32; order as usize];
        let g = unpack(generator.0, p, d);
        let mut acc = unpack(1, p, d);
        for i in 0..group {
            let idx = pack(&acc, p);
            exp.push(Felem(idx));
            log[idx as usize] = i;
            acc = slow.mul(&acc, &g);
        }
        for i in 0..group as usize {
            exp.push(exp[i]);
        }

        let mut tower = TowerParams {
            p,
            m,
            t,
            irr,
            order,
            sub_order,
            generator,
            subfield_gen: Felem::ONE,
            exp,
            log,
            embed: Vec::new(),
            project: Vec::new(),
            ref_coords: Vec::new(),
        };

        let s = tower.pow(generator, ((order - 1) / (sub_order - 1)) as u64);
        tower.subfield_gen = s;

        let s_powers: Vec<Felem> = (0..m).map(|j| tower.pow(s, j as u64)).collect();
        let mut embed = Vec::with_capacity(sub_order as usize);
        let mut project = vec![NOT_IN_SUBFIELD; order as usize];
        for j in 0..sub_order {
            let digits = unpack(j, p, m as usize);
            let x = digits
                .iter()
                .zip(&s_powers)
                .fold(Felem::ZERO, |acc, (&c, &sp)| {
                    tower.add(acc, tower.mul_prime(sp, c))
                });
            assert_eq!(
                project[x.0 as usize], NOT_IN_SUBFIELD,
                "powers of the subfield generator must be independent over GF(p)"
            );
            project[x.0 as usize] = j;
            embed.push(x);
        }
        tower.embed = embed;
        tower.project = project;

        let tu = t as usize;
        let basis: Vec<Felem> = (0..t).map(|i| tower.pow(generator, i as u64)).collect();
        let mut ref_coords = vec![Belem::ZERO; order as usize * tu];
        let mut seen = vec![false; order as usize];
        for idx in 0..order {
            let coeffs = unpack(idx, sub_order, tu);
            let x = coeffs
                .iter()
                .zip(&basis)
                .fold(Felem::ZERO, |acc, (&c, &e)| {
                    tower.add(acc, tower.mul(tower.embed[c as usize], e))
                });
            assert!(
                !seen[x.0 as usize],
                "reference basis must be independent over the subfield"
            );
            seen[x.0 as usize] = true;
            for (i, c) in coeffs.into_iter().enumerate() {
                ref_coords[x.0 as usize * tu + i] = Belem(c);
            }
        }
        tower.ref_coords = ref_coords;
        Ok(tower)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t(&self) -> usize {
        self.t as usize
    }

    /// Coefficients of the defining polynomial of `F` over `GF(p)`, low to high.
    pub fn irr(&self) -> &[u32] {
        &self.irr
    }

    /// `m·t`, the degree of `F` over `GF(p)`.
    pub fn degree(&self) -> usize {
        (self.m * self.t) as usize
    }

    /// `|F|`.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `|B|`.
    pub fn sub_order(&self) -> u32 {
        self.sub_order
    }

    /// The lexicographically least primitive element `g` of `F`.
    pub fn generator(&self) -> Felem {
        self.generator
    }

    /// `g^{(|F|-1)/(|B|-1)}`, a generator of `B*` inside `F`.
    pub fn subfield_gen(&self) -> Felem {
        self.subfield_gen
    }

    /// `|B|^{t-1}`: the degree bound behind every trace check polynomial.
    pub fn check_degree_bound(&self) -> usize {
        (self.sub_order as usize).pow(self.t - 1)
    }

    pub fn elements(&self) -> impl Iterator<Item = Felem> {
        (0..self.order).map(Felem)
    }

    pub fn sub_elements(&self) -> impl Iterator<Item = Belem> {
        (0..self.sub_order).map(Belem)
    }

    /// `g^1, g^2, .., g^{|F|-1} = 1`: the canonical scan order for basis
    /// construction.
    pub fn generator_powers(&self) -> impl Iterator<Item = Felem> + '_ {
        (1..self.order).map(move |i| self.exp[(i % (self.order - 1)) as usize])
    }

    pub fn contains(&self, x: Felem) -> bool {
        x.0 < self.order
    }

    /// Coordinates over `GF(p)` in the power basis, low to high.
    pub fn coords(&self, x: Felem) -> Vec<u32> {
        unpack(x.0, self.p, self.degree())
    }

    pub fn felem(&self, coords: &[u32]) -> Result<Felem> {
        if coords.len() != self.degree() {
            return Err(Error::Arity {
                expected: self.degree(),
                got: coords.len(),
            });
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.p) {
            return Err(Error::Domain(format!(
                "coordinate {c} not in GF({})",
                self.p
            )));
        }
        Ok(Felem(pack(coords, self.p)))
    }

    /// Coordinates over `GF(p)` in the basis `1, s, .., s^{m-1}`.
    pub fn belem_coords(&self, b: Belem) -> Vec<u32> {
        unpack(b.0, self.p, self.m as usize)
    }

    pub fn belem(&self, coords: &[u32]) -> Result<Belem> {
        if coords.len() != self.m as usize {
            return Err(Error::Arity {
                expected: self.m as usize,
                got: coords.len(),
            });
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= self.p) {
            return Err(Error::Domain(format!(
                "coordinate {c} not in GF({})",
                self.p
            )));
        }
        Ok(Belem(pack(coords, self.p)))
    }

    // ---- arithmetic in F ----

    pub fn add(&self, a: Felem, b: Felem) -> Felem {
        if self.p == 2 {
            return Felem(a.0 ^ b.0);
        }
        Felem(digitwise(a.0, b.0, self.p, self.degree(), |x, y| x + y))
    }

    pub fn sub(&self, a: Felem, b: Felem) -> Felem {
        if self.p == 2 {
            return Felem(a.0 ^ b.0);
        }
        let p = self.p;
        Felem(digitwise(a.0, b.0, p, self.degree(), |x, y| {
            x + p as u64 - y
        }))
    }

    pub fn neg(&self, a: Felem) -> Felem {
        self.sub(Felem::ZERO, a)
    }

    pub fn mul(&self, a: Felem, b: Felem) -> Felem {
        if a.is_zero() || b.is_zero() {
            return Felem::ZERO;
        }
        self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize]
    }

    /// Multiplicative inverse.
    ///
    /// # Panics
    /// Panics on zero.
    pub fn inv(&self, a: Felem) -> Felem {
        assert!(!a.is_zero(), "inverse of zero");
        let l = self.log[a.0 as usize];
        self.exp[((self.order - 1 - l) % (self.order - 1)) as usize]
    }

    pub fn div(&self, a: Felem, b: Felem) -> Felem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Felem, e: u64) -> Felem {
        if e == 0 {
            return Felem::ONE;
        }
        if a.is_zero() {
            return Felem::ZERO;
        }
        let group = (self.order - 1) as u64;
        let l = (self.log[a.0 as usize] as u64 * (e % group)) % group;
        self.exp[l as usize]
    }

    /// `x^{|B|^i}`.
    pub fn frobenius(&self, x: Felem, i: usize) -> Felem {
        if x.is_zero() {
            return x;
        }
        let group = (self.order - 1) as u64;
        let mut l = self.log[x.0 as usize] as u64;
        for _ in 0..i {
            l = l * self.sub_order as u64 % group;
        }
        self.exp[l as usize]
    }

    fn mul_prime(&self, x: Felem, c: u32) -> Felem {
        Felem(digitwise(x.0, 0, self.p, self.degree(), |a, _| {
            a * c as u64
        }))
    }

    // ---- the subfield B ----

    pub fn embed(&self, b: Belem) -> Felem {
        self.embed[b.0 as usize]
    }

    pub fn project(&self, x: Felem) -> Option<Belem> {
        match self.project[x.0 as usize] {
            NOT_IN_SUBFIELD => None,
            j => Some(Belem(j)),
        }
    }

    pub fn b_add(&self, a: Belem, b: Belem) -> Belem {
        if self.p == 2 {
            return Belem(a.0 ^ b.0);
        }
        Belem(digitwise(a.0, b.0, self.p, self.m as usize, |x, y| x + y))
    }

    pub fn b_sub(&self, a: Belem, b: Belem) -> Belem {
        if self.p == 2 {
            return Belem(a.0 ^ b.0);
        }
        let p = self.p;
        Belem(digitwise(a.0, b.0, p, self.m as usize, |x, y| {
            x + p as u64 - y
        }))
    }

    pub fn b_neg(&self, a: Belem) -> Belem {
        self.b_sub(Belem::ZERO, a)
    }

    pub fn b_mul(&self, a: Belem, b: Belem) -> Belem {
        self.subfield(self.mul(self.embed(a), self.embed(b)))
    }

    pub fn b_inv(&self, a: Belem) -> Belem {
        self.subfield(self.inv(self.embed(a)))
    }

    pub fn b_div(&self, a: Belem, b: Belem) -> Belem {
        self.b_mul(a, self.b_inv(b))
    }

    /// `b·x` for `b ∈ B`, `x ∈ F`.
    pub fn scale(&self, b: Belem, x: Felem) -> Felem {
        self.mul(self.embed(b), x)
    }

    fn subfield(&self, x: Felem) -> Belem {
        self.project(x)
            .expect("subfield is closed under field operations")
    }

    // ---- trace and the B-vector-space view ----

    /// `Tr_{F/B}(x) = sum_{i<t} x^{|B|^i}`.
    pub fn trace(&self, x: Felem) -> Belem {
        let sum = (0..self.t()).fold(Felem::ZERO, |acc, i| self.add(acc, self.frobenius(x, i)));
        self.project(sum).expect("trace must land in the subfield")
    }

    /// Coordinates of `x` in the reference basis `1, g, .., g^{t-1}`.
    pub fn ref_coords(&self, x: Felem) -> &[Belem] {
        let t = self.t();
        &self.ref_coords[x.0 as usize * t..(x.0 as usize + 1) * t]
    }

    /// `sum_i coeffs_i · elems_i`.
    pub fn combine(&self, coeffs: &[Belem], elems: &[Felem]) -> Felem {
        assert_eq!(coeffs.len(), elems.len());
        coeffs
            .iter()
            .zip(elems)
            .fold(Felem::ZERO, |acc, (&c, &e)| self.add(acc, self.scale(c, e)))
    }

    /// `t-1` elements spanning `{κ : Tr(κ) = 0}` over `B`.
    pub fn trace_kernel_basis(&self) -> Result<BBasis> {
        if self.t == 1 {
            return Err(Error::EmptyKernel);
        }
        let want = self.t() - 1;
        let mut span = Span::new(self, self.t());
        let mut elems = Vec::with_capacity(want);
        for x in self.generator_powers() {
            if elems.len() == want {
                break;
            }
            if self.trace(x).is_zero() && span.insert(self.ref_coords(x)) {
                elems.push(x);
            }
        }
        assert_eq!(elems.len(), want, "trace kernel has dimension t-1");
        Ok(BBasis { elems })
    }

    /// Basis of `K_{α,β} = {z : Tr(z(β-α)) = 0}`, the trace kernel scaled by
    /// `1/(β-α)`.
    pub fn root_space(&self, alpha: Felem, beta: Felem) -> Result<BBasis> {
        if alpha == beta {
            return Err(Error::Domain("root space needs distinct points".into()));
        }
        let scale = self.inv(self.sub(beta, alpha));
        let kernel = self.trace_kernel_basis()?;
        Ok(BBasis {
            elems: kernel.iter().map(|&k| self.mul(k, scale)).collect(),
        })
    }

    /// Trace-orthogonal basis `{d_j}` with `Tr(u_i d_j) = δ_ij`.
    pub fn dual_basis(&self, basis: &[Felem]) -> Result<BBasis> {
        let t = self.t();
        if basis.len() != t {
            return Err(Error::Arity {
                expected: t,
                got: basis.len(),
            });
        }
        let reference: Vec<Felem> = (0..t).map(|l| self.pow(self.generator, l as u64)).collect();
        let gram: Vec<Vec<Belem>> = basis
            .iter()
            .map(|&u| {
                reference
                    .iter()
                    .map(|&e| self.trace(self.mul(u, e)))
                    .collect()
            })
            .collect();
        let inv = linalg::invert(self, &gram)?;
        let elems = (0..t)
            .map(|j| {
                let column: Vec<Belem> = inv.iter().map(|row| row[j]).collect();
                self.combine(&column, &reference)
            })
            .collect();
        Ok(BBasis { elems })
    }

    /// Unique coefficients `c` with `x = sum c_i basis_i`.
    pub fn coords_in_basis(&self, x: Felem, basis: &[Felem]) -> Result<Vec<Belem>> {
        let mut span = Span::new(self, self.t());
        for b in basis {
            if !span.insert(self.ref_coords(*b)) {
                return Err(Error::Rank);
            }
        }
        span.express(self.ref_coords(x)).ok_or(Error::NotInSpan)
    }

    /// Recovers `x` from `Tr(u_i x)` for the basis `{u_i}`.
    pub fn reconstruct_from_traces(&self, traces: &[Belem], basis: &[Felem]) -> Result<Felem> {
        if traces.len() != self.t() {
            return Err(Error::Arity {
                expected: self.t(),
                got: traces.len(),
            });
        }
        let dual = self.dual_basis(basis)?;
        Ok(self.combine(traces, &dual))
    }

    /// Extends an independent set to a full basis of `F` over `B` by
    /// appending the first elements of [`generator_powers`](Self::generator_powers)
    /// that raise the rank.
    pub fn complete_basis(&self, partial: &[Felem]) -> Result<BBasis> {
        let mut span = Span::new(self, self.t());
        for x in partial {
            if !span.insert(self.ref_coords(*x)) {
                return Err(Error::Rank);
            }
        }
        let mut elems = partial.to_vec();
        for x in self.generator_powers() {
            if span.rank() == self.t() {
                break;
            }
            if span.insert(self.ref_coords(x)) {
                elems.push(x);
            }
        }
        Ok(BBasis { elems })
    }

    /// Extends a `t-1` element independent set by one element. Returns the
    /// full basis and the appended element.
    pub fn extend_basis(&self, partial: &[Felem]) -> Result<(BBasis, Felem)> {
        if partial.len() + 1 != self.t() {
            return Err(Error::Arity {
                expected: self.t() - 1,
                got: partial.len(),
            });
        }
        let full = self.complete_basis(partial)?;
        let last = full[self.t() - 1];
        Ok((full, last))
    }

    // ---- text forms ----

    /// Comma-separated `GF(p)` coordinates, low to high.
    pub fn format_felem(&self, x: Felem) -> String {
        join(&self.coords(x))
    }

    pub fn parse_felem(&self, s: &str) -> Result<Felem> {
        let coords = parse_list(s)?;
        self.felem(&coords)
    }
}

impl fmt::Display for TowerParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} m={} t={} irr={}",
            self.p,
            self.m,
            self.t,
            join(&self.irr)
        )
    }
}

impl FromStr for TowerParams {
    type Err = Error;

    /// Parses `p=2 m=1 t=2 irr=1,1,1`; `irr` is optional.
    fn from_str(s: &str) -> Result<Self> {
        let (mut p, mut m, mut t, mut irr) = (None, None, None, None);
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {token:?}")))?;
            match key {
                "p" => p = Some(parse_u32(value)?),
                "m" => m = Some(parse_u32(value)?),
                "t" => t = Some(parse_u32(value)?),
                "irr" => irr = Some(parse_list(value)?),
                _ => return Err(Error::Parse(format!("unknown tower key {key:?}"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("tower description lacks {k}"));
        TowerParams::new(
            p.ok_or_else(|| missing("p"))?,
            m.ok_or_else(|| missing("m"))?,
            t.ok_or_else(|| missing("t"))?,
            irr,
        )
    }
}

pub(crate) fn join(values: &[u32]) -> String {
    values
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub(crate) fn parse_u32(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not an unsigned integer: {s:?}")))
}

pub(crate) fn parse_list(s: &str) -> Result<Vec<u32>> {
    s.split(',').map(parse_u32).collect()
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pack(coords: &[u32], base: u32) -> u32 {
    coords.iter().rev().fold(0, |acc, &c| acc * base + c)
}

fn unpack(mut value: u32, base: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = value % base;
            value /= base;
            d
        })
        .collect()
}

/// `n`-th coefficient vector of length `len` in lexicographic order of
/// `(c_0, c_1, ..)`.
fn lex_nth(n: u32, base: u32, len: usize) -> Vec<u32> {
    let mut v = unpack(n, base, len);
    v.reverse();
    v
}

fn digitwise(a: u32, b: u32, p: u32, len: usize, op: impl Fn(u64, u64) -> u64) -> u32 {
    let (mut r, mut x, mut y, mut place) = (0, a, b, 1);
    for _ in 0..len {
        r += (op((x % p) as u64, (y % p) as u64) % p as u64) as u32 * place;
        x /= p;
        y /= p;
        place *= p;
    }
    r
}

/// Remainder of `a` modulo the monic polynomial `b` over `GF(p)`.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    while r.len() > db {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - db;
            for (i, &c) in b[..db].iter().enumerate() {
                r[shift + i] =
                    ((r[shift + i] as u64 + (p - lead) as u64 * c as u64) % p as u64) as u32;
            }
        }
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    for e in 1..=d / 2 {
        for n in 0..p.pow(e as u32) {
            let mut divisor = unpack(n, p, e);
            divisor.push(1);
            if poly_rem(f, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u32, d: usize) -> Vec<u32> {
    (0..p.pow(d as u32))
        .map(|n| {
            let mut f = lex_nth(n, p, d);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Schoolbook arithmetic modulo `irr`, used only while building the tables.
struct SlowField<'a> {
    p: u32,
    irr: &'a [u32],
}

impl SlowField<'_> {
    fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut prod = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        let mut r = poly_rem(&prod, self.irr, p);
        r.resize(a.len(), 0);
        r
    }

    fn pow(&self, a: &[u32], mut e: u64) -> Vec<u32> {
        let mut result = vec![0u32; a.len()];
        result[0] = 1;
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        result
    }

    fn is_one(&self, a: &[u32]) -> bool {
        a[0] == 1 && a[1..].iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> TowerParams {
        TowerParams::new(2, 1, 2, Some(vec![1, 1, 1])).unwrap()
    }

    #[test]
    fn gf4_tower_from_text() {
        let tw: TowerParams = "p=2 m=1 t=2 irr=1,1,1".parse().unwrap();
        assert_eq!(tw, gf4());
        assert_eq!(tw.to_string(), "p=2 m=1 t=2 irr=1,1,1");
        assert_eq!(tw.order(), 4);
        assert_eq!(tw.sub_order(), 2);
        // ξ = x is the least primitive element.
        assert_eq!(tw.format_felem(tw.generator()), "0,1");
    }

    #[test]
    fn degenerate_tower_trace_is_identity() {
        let tw = TowerParams::new(2, 1, 1, None).unwrap();
        assert_eq!(tw.order(), 2);
        for x in tw.elements() {
            assert_eq!(tw.embed(tw.trace(x)), x);
        }
        assert_eq!(tw.trace_kernel_basis(), Err(Error::EmptyKernel));
    }

    #[test]
    fn default_polynomials_are_lexicographically_least() {
        assert_eq!(TowerParams::new(2, 1, 2, None).unwrap().irr(), &[1, 1, 1]);
        assert_eq!(TowerParams::new(3, 1, 2, None).unwrap().irr(), &[1, 0, 1]);
        assert_eq!(
            TowerParams::new(2, 1, 3, None).unwrap().irr(),
            &[1, 0, 1, 1]
        );
        assert_eq!(
            TowerParams::new(2, 1, 4, None).unwrap().irr(),
            &[1, 0, 0, 1, 1]
        );
        // Degree one: x itself.
        assert_eq!(TowerParams::new(5, 1, 1, None).unwrap().irr(), &[0, 1]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(
            TowerParams::new(4, 1, 2, None).unwrap_err(),
            Error::NotPrime(4)
        );
        assert_eq!(
            TowerParams::new(1, 1, 2, None).unwrap_err(),
            Error::NotPrime(1)
        );
        assert!(matches!(
            TowerParams::new(2, 1, 2, Some(vec![1, 0, 1])),
            Err(Error::Reducible(..))
        ));
        assert!(matches!(
            TowerParams::new(2, 1, 2, Some(vec![1, 1])),
            Err(Error::InvalidTower(_))
        ));
        assert!(matches!(
            TowerParams::new(2, 1, 17, None),
            Err(Error::InvalidTower(_))
        ));
        assert!(matches!(
            TowerParams::new(2, 0, 2, None),
            Err(Error::InvalidTower(_))
        ));
    }

    #[test]
    fn gf9_subfield_generator_has_order_two() {
        let tw = TowerParams::new(3, 1, 2, None).unwrap();
        let order_of = |x: Felem| {
            (1..tw.order())
                .find(|&e| tw.pow(x, e as u64) == Felem::ONE)
                .unwrap()
        };
        let orders: Vec<u32> = tw.elements().skip(1).map(order_of).collect();
        assert_eq!(orders.iter().filter(|&&o| o == 8).count(), 4);
        assert_eq!(order_of(tw.generator()), 8);
        assert_eq!(order_of(tw.subfield_gen()), 2);
        assert_eq!(tw.subfield_gen(), tw.neg(Felem::ONE));
    }

    #[test]
    fn gf4_trace_and_kernel() {
        let tw = gf4();
        let xi = tw.generator();
        let xi2 = tw.mul(xi, xi);
        assert_eq!(tw.trace(xi), Belem::ONE);
        assert_eq!(tw.trace(xi2), Belem::ONE);
        assert_eq!(tw.trace(Felem::ONE), Belem::ZERO);
        assert_eq!(tw.trace(Felem::ZERO), Belem::ZERO);
        assert_eq!(&*tw.trace_kernel_basis().unwrap(), &[Felem::ONE]);
    }

    #[test]
    fn gf9_trace_table() {
        // F = GF(3)[i]/(i^2+1): Tr(a + b i) = (a + bi) + (a + bi)^3 = 2a.
        let tw = TowerParams::new(3, 1, 2, None).unwrap();
        for x in tw.elements() {
            let c = tw.coords(x);
            let expected = tw.belem(&[(2 * c[0]) % 3]).unwrap();
            assert_eq!(tw.trace(x), expected, "x = {c:?}");
        }
    }

    #[test]
    fn gf4_root_space_and_bases() {
        let tw = gf4();
        let xi = tw.generator();
        let xi2 = tw.mul(xi, xi);
        assert_eq!(&*tw.root_space(Felem::ONE, xi).unwrap(), &[xi]);
        assert!(matches!(tw.root_space(xi, xi), Err(Error::Domain(_))));

        let (full, last) = tw.extend_basis(&[xi]).unwrap();
        assert_eq!(&*full, &[xi, xi2]);
        assert_eq!(last, xi2);
        assert_eq!(tw.coords_in_basis(last, &[xi]), Err(Error::NotInSpan));
        assert_eq!(tw.coords_in_basis(xi2, &[xi]), Err(Error::NotInSpan));
        assert_eq!(
            tw.coords_in_basis(Felem::ONE, &[xi, xi2]).unwrap(),
            vec![Belem::ONE, Belem::ONE]
        );
        assert_eq!(
            tw.coords_in_basis(xi, &[xi, Felem::ONE]).unwrap(),
            vec![Belem::ONE, Belem::ZERO]
        );
        assert_eq!(tw.coords_in_basis(xi, &[xi, xi]), Err(Error::Rank));
        assert_eq!(&*tw.complete_basis(&[]).unwrap(), &[xi, xi2]);
    }

    #[test]
    fn gf4_self_dual_basis() {
        let tw = gf4();
        let xi = tw.generator();
        let xi2 = tw.mul(xi, xi);
        assert_eq!(&*tw.dual_basis(&[xi, xi2]).unwrap(), &[xi, xi2]);
        assert_eq!(tw.dual_basis(&[xi, xi]), Err(Error::Rank));
        assert!(matches!(tw.dual_basis(&[xi]), Err(Error::Arity { .. })));
    }

    #[test]
    fn gf4_reconstruct_example_symbol() {
        let tw = gf4();
        let xi = tw.generator();
        let basis = [xi, tw.mul(xi, xi)];
        for b1 in 0..2 {
            for b2 in 0..2 {
                let b = tw.felem(&[b1, b2]).unwrap();
                let traces = [Belem::from_index((b1 + b2) % 2), Belem::from_index(b1)];
                assert_eq!(tw.reconstruct_from_traces(&traces, &basis).unwrap(), b);
            }
        }
        assert_eq!(
            tw.reconstruct_from_traces(&[Belem::ZERO, Belem::ZERO], &basis)
                .unwrap(),
            Felem::ZERO
        );
        assert!(matches!(
            tw.reconstruct_from_traces(&[Belem::ZERO], &basis),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn felem_text_round_trip() {
        let tw = TowerParams::new(3, 1, 2, None).unwrap();
        for x in tw.elements() {
            assert_eq!(tw.parse_felem(&tw.format_felem(x)).unwrap(), x);
        }
        assert!(tw.parse_felem("1,3").is_err());
        assert!(tw.parse_felem("1").is_err());
        assert!(tw.parse_felem("a,b").is_err());
        assert!("p=2 m=1".parse::<TowerParams>().is_err());
        assert!("p=2 m=1 t=2 q=3".parse::<TowerParams>().is_err());
    }
}

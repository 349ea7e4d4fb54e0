//! Reference arithmetic for integration tests.
//!
//! Elements are handled as coordinate vectors over GF(p) and multiplied by
//! schoolbook polynomial multiplication modulo the tower's irreducible
//! polynomial. Nothing here touches the library's log tables, traces, bases
//! or interpolation, so agreement with the library is meaningful.

#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use trace_repair::{CodeParams, Felem, TowerParams};

pub struct Oracle {
    pub tw: Arc<TowerParams>,
    p: u32,
    irr: Vec<u32>,
    /// |F|
    pub q: u64,
    /// |B|
    pub qb: u64,
    pub t: usize,
}

impl Oracle {
    pub fn new(tw: Arc<TowerParams>) -> Self {
        let p = tw.p();
        let irr = tw.irr().to_vec();
        let q = tw.order() as u64;
        let qb = (p as u64).pow(tw.m());
        let t = tw.t();
        Self {
            tw,
            p,
            irr,
            q,
            qb,
            t,
        }
    }

    pub fn tower(p: u32, m: u32, t: u32) -> Self {
        Self::new(Arc::new(TowerParams::new(p, m, t, None).unwrap()))
    }

    pub fn elements(&self) -> Vec<Felem> {
        (0..self.q as u32).map(Felem::from_index).collect()
    }

    pub fn random(&self, rng: &mut impl Rng) -> Felem {
        Felem::from_index(rng.random_range(0..self.q as u32))
    }

    fn co(&self, x: Felem) -> Vec<u32> {
        self.tw.coords(x)
    }

    fn el(&self, c: &[u32]) -> Felem {
        self.tw.felem(c).unwrap()
    }

    pub fn add(&self, a: Felem, b: Felem) -> Felem {
        let (x, y) = (self.co(a), self.co(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.el(&s)
    }

    pub fn neg(&self, a: Felem) -> Felem {
        let s: Vec<u32> = self.co(a).iter().map(|u| (self.p - u) % self.p).collect();
        self.el(&s)
    }

    pub fn sub(&self, a: Felem, b: Felem) -> Felem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Felem, b: Felem) -> Felem {
        let (x, y) = (self.co(a), self.co(b));
        let d = x.len();
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * d];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        // irr is monic of degree d, coefficients low to high
        for top in (d..2 * d).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (k, &r) in self.irr.iter().enumerate() {
                let idx = top - d + k;
                prod[idx] = (prod[idx] + (p - c) * r as u64) % p;
            }
        }
        let s: Vec<u32> = prod[..d].iter().map(|&c| c as u32).collect();
        self.el(&s)
    }

    pub fn pow(&self, a: Felem, mut e: u64) -> Felem {
        let mut base = a;
        let mut acc = Felem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Felem) -> Felem {
        assert!(!a.is_zero());
        self.pow(a, self.q - 2)
    }

    pub fn div(&self, a: Felem, b: Felem) -> Felem {
        self.mul(a, self.inv(b))
    }

    /// Trace to `B`, as an element of `F`.
    pub fn trace(&self, x: Felem) -> Felem {
        let mut acc = Felem::ZERO;
        let mut y = x;
        for _ in 0..self.t {
            acc = self.add(acc, y);
            y = self.pow(y, self.qb);
        }
        acc
    }

    pub fn in_subfield(&self, x: Felem) -> bool {
        self.pow(x, self.qb) == x
    }

    /// Subfield elements, as elements of `F`.
    pub fn subfield(&self) -> Vec<Felem> {
        self.elements()
            .into_iter()
            .filter(|&x| self.in_subfield(x))
            .collect()
    }

    pub fn eval(&self, coeffs: &[Felem], x: Felem) -> Felem {
        coeffs
            .iter()
            .rev()
            .fold(Felem::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// `Tr(u(x - a))/(x - a)`, for `x != a`.
    pub fn check_at(&self, u: Felem, a: Felem, x: Felem) -> Felem {
        let d = self.sub(x, a);
        self.div(self.trace(self.mul(u, d)), d)
    }

    /// Value at `x` of the unique polynomial of degree `< points.len()`
    /// through `(points[i], values[i])`.
    pub fn lagrange(&self, points: &[Felem], values: &[Felem], x: Felem) -> Felem {
        let mut acc = Felem::ZERO;
        for (i, (&xi, &vi)) in points.iter().zip(values).enumerate() {
            let mut num = Felem::ONE;
            let mut den = Felem::ONE;
            for (j, &xj) in points.iter().enumerate() {
                if j != i {
                    num = self.mul(num, self.sub(x, xj));
                    den = self.mul(den, self.sub(xi, xj));
                }
            }
            acc = self.add(acc, self.mul(vi, self.div(num, den)));
        }
        acc
    }

    /// Codeword by direct evaluation of the message polynomial.
    pub fn encode(&self, code: &CodeParams, message: &[Felem]) -> Vec<Felem> {
        code.points()
            .iter()
            .map(|&a| self.eval(message, a))
            .collect()
    }

    /// Interpolation repair: erased symbols from the `k` lowest-indexed
    /// surviving nodes.
    pub fn naive_repair(&self, code: &CodeParams, word: &[Felem], erased: &[usize]) -> Vec<Felem> {
        let alive: Vec<usize> = (0..code.n())
            .filter(|i| !erased.contains(i))
            .take(code.k())
            .collect();
        let pts: Vec<Felem> = alive.iter().map(|&i| code.point(i)).collect();
        let vals: Vec<Felem> = alive.iter().map(|&i| word[i]).collect();
        erased
            .iter()
            .map(|&e| self.lagrange(&pts, &vals, code.point(e)))
            .collect()
    }

    /// Whether `elems` are linearly independent over `B`, by enumerating
    /// all combinations.
    pub fn independent(&self, elems: &[Felem]) -> bool {
        let sub = self.subfield();
        let total = (sub.len() as u64).pow(elems.len() as u32);
        (1..total).all(|mut idx| {
            let mut acc = Felem::ZERO;
            for &e in elems {
                let c = sub[(idx % sub.len() as u64) as usize];
                idx /= sub.len() as u64;
                acc = self.add(acc, self.mul(c, e));
            }
            !acc.is_zero()
        })
    }

    /// `B`-span of `elems`, sorted.
    pub fn span(&self, elems: &[Felem]) -> Vec<Felem> {
        let sub = self.subfield();
        let mut out = vec![Felem::ZERO];
        for &e in elems {
            let mut next = Vec::new();
            for &x in &out {
                for &c in &sub {
                    next.push(self.add(x, self.mul(c, e)));
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        out
    }
}

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn full_code(or: &Oracle, k: usize) -> CodeParams {
    CodeParams::with_default_points(or.tw.clone(), or.q as usize, k).unwrap()
}

/// `k = n - |B|^{t-1}` at full length.
pub fn tight_code(or: &Oracle) -> CodeParams {
    let n = or.q as usize;
    full_code(or, n - or.qb.pow(or.t as u32 - 1) as usize)
}

pub fn random_message(or: &Oracle, k: usize, rng: &mut impl Rng) -> Vec<Felem> {
    (0..k).map(|_| or.random(rng)).collect()
}

/// Two distinct indices below `n`, in random order.
pub fn random_pair(n: usize, rng: &mut impl Rng) -> (usize, usize) {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

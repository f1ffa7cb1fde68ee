//! Sparse multivariate polynomials over the integers.
//!
//! Monomials are ordered graded-lexicographically with `x_0 > x_1 > ...`.
//! The GCD is the recursive primitive-PRS algorithm: content in the main
//! variable is handled by recursion on the remaining variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Index of a formal variable. Variables are numbered by class order.
pub type Var = u32;

/// Sparse exponent vector, sorted by variable, no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.iter().map(|&(v, _)| v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Removes `v` from the monomial, returning its exponent.
    fn split_var(&self, v: Var) -> (u32, Monomial) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut exp = 0;
        for &(w, e) in &self.0 {
            if w == v {
                exp = e;
            } else {
                rest.push((w, e));
            }
        }
        (exp, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (x, y) = (a[i], b[j]);
            match x.0.cmp(&y.0) {
                // `self` has a positive exponent on an earlier variable
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match x.1.cmp(&y.1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        (a.len() - i).cmp(&(b.len() - j))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `ℤ[x_0, x_1, ...]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn from_i64(c: i64) -> Self {
        Poly::constant(BigInt::from(c))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(Monomial::var(v), BigInt::one())
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_one() && c.is_one())
                .unwrap_or(false)
    }

    /// Constant polynomials, including zero.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> std::collections::BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, d)| (n.mul(m), d * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        if d.terms.len() == 1 {
            let mut out = BTreeMap::new();
            for (m, c) in &self.terms {
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.insert(m.div(dm)?, q);
            }
            return Some(Poly { terms: out });
        }
        let mut q = Poly::zero();
        let mut r = self.clone();
        while let Some((rm, rc)) = r.leading() {
            let m = rm.div(dm)?;
            let (c, rem) = rc.div_rem(dc);
            if !rem.is_zero() {
                return None;
            }
            r = r.sub(&d.mul_monomial(&m, &c));
            q.add_term(m, c);
        }
        Some(q)
    }

    /// GCD of the integer coefficients (non-negative).
    pub fn integer_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Flips the sign so that the leading coefficient is positive.
    pub fn sign_normalized(self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self,
        }
    }

    pub fn leading_is_negative(&self) -> bool {
        matches!(self.leading(), Some((_, c)) if c.is_negative())
    }

    /// Coefficients of `self` as a polynomial in `v`, indexed by power.
    fn to_univariate(&self, v: Var) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            let e = e as usize;
            if out.len() <= e {
                out.resize(e + 1, Poly::zero());
            }
            out[e].add_term(rest, c.clone());
        }
        while matches!(out.last(), Some(p) if p.is_zero()) {
            out.pop();
        }
        out
    }

    fn from_univariate(coeffs: &[Poly], v: Var) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = if e == 0 {
                Monomial::one()
            } else {
                Monomial::from_pairs(vec![(v, e as u32)])
            };
            for (n, d) in &c.terms {
                out.add_term(n.mul(&m), d.clone());
            }
        }
        out
    }

    /// Greatest common divisor in `ℤ[x]`, with positive leading coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.clone().sign_normalized();
        }
        if other.is_zero() {
            return self.clone().sign_normalized();
        }
        if self.is_constant() || other.is_constant() {
            let g = self.integer_content().gcd(&other.integer_content());
            return Poly::constant(g);
        }
        let main = self
            .vars()
            .into_iter()
            .chain(other.vars())
            .min()
            .expect("non-constant polynomial has a variable");
        let a = self.to_univariate(main);
        let b = other.to_univariate(main);
        let (ca, pa) = univariate_content(a);
        let (cb, pb) = univariate_content(b);
        let content = ca.gcd(&cb);
        let g = univariate_primitive_gcd(pa, pb);
        Poly::from_univariate(&g, main)
            .mul(&content)
            .sign_normalized()
    }
}

fn univariate_content(mut p: Vec<Poly>) -> (Poly, Vec<Poly>) {
    let mut c = Poly::zero();
    for q in &p {
        c = c.gcd(q);
        if c.is_one() {
            return (c, p);
        }
    }
    if c.is_zero() {
        return (Poly::one(), p);
    }
    for q in p.iter_mut() {
        *q = q.div_exact(&c).expect("content divides every coefficient");
    }
    (c, p)
}

fn pseudo_remainder(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for q in r.iter_mut() {
            *q = q.mul(lb);
        }
        for (i, bi) in b.iter().enumerate() {
            let t = bi.mul(&lr);
            r[i + shift] = r[i + shift].sub(&t);
        }
        while matches!(r.last(), Some(p) if p.is_zero()) {
            r.pop();
        }
    }
    r
}

fn univariate_primitive_gcd(a: Vec<Poly>, b: Vec<Poly>) -> Vec<Poly> {
    let (mut r0, mut r1) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    loop {
        if r1.len() <= 1 {
            return vec![Poly::one()];
        }
        let r = pseudo_remainder(&r0, &r1);
        if r.is_empty() {
            return r1;
        }
        let (_, pr) = univariate_content(r);
        r0 = r1;
        r1 = pr;
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&|v| format!("x{v}")))
    }
}

impl Poly {
    /// Renders the polynomial, highest monomial first, naming variables with `name`.
    pub fn display_with(&self, name: &dyn Fn(Var) -> String) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = m
                .pairs()
                .iter()
                .map(|&(v, e)| {
                    if e == 1 {
                        name(v)
                    } else {
                        format!("{}^{}", name(v), e)
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&format!("{}*{}", abs, mono.join("*")));
            }
        }
        out
    }
}

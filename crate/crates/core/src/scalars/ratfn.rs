//! Multivariate rational functions over ℚ in lowest terms.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::{Poly, Var};

/// A quotient `num / den` of integer polynomials.
///
/// Always reduced: `gcd(num, den) = 1` (integer content included) and the
/// leading coefficient of `den` is positive. Zero is `0 / 1`. Two equal
/// rational functions therefore have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFn::from_poly(Poly::one())
    }

    pub fn from_i64(n: i64) -> Self {
        RatFn::from_poly(Poly::from_i64(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RatFn::from_poly(Poly::constant(n))
    }

    pub fn var(v: Var) -> Self {
        RatFn::from_poly(Poly::var(v))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den`, or `None` when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFn::zero();
        }
        if den.is_one() {
            return RatFn { num, den };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        if den.leading_is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFn { num, den }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Variables occurring in numerator or denominator.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn inv(&self) -> Option<RatFn> {
        if self.is_zero() {
            return None;
        }
        let (mut num, mut den) = (self.den.clone(), self.num.clone());
        if den.leading_is_negative() {
            num = num.neg();
            den = den.neg();
        }
        Some(RatFn { num, den })
    }

    pub fn div(&self, other: &RatFn) -> Option<RatFn> {
        other.inv().map(|i| self * &i)
    }

    pub fn pow(&self, k: u32) -> RatFn {
        RatFn {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    /// Applies a variable renaming to numerator and denominator.
    pub fn rename(&self, f: &dyn Fn(Var) -> Var) -> RatFn {
        let map = |p: &Poly| {
            Poly::from_terms(p.terms().map(|(m, c)| {
                (
                    super::poly::Monomial::from_pairs(
                        m.pairs().iter().map(|&(v, e)| (f(v), e)).collect(),
                    ),
                    c.clone(),
                )
            }))
        };
        Self::normalize(map(&self.num), map(&self.den))
    }

    pub fn display_with(&self, name: &dyn Fn(Var) -> String) -> String {
        let n = self.num.display_with(name);
        if self.den.is_one() {
            return n;
        }
        let d = self.den.display_with(name);
        let wrap = |s: String, p: &Poly| {
            if p.num_terms() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(n, &self.num), wrap(d, &self.den))
    }

    /// True when the rendered form needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        !self.den.is_one() || self.num.num_terms() > 1
    }
}

impl Default for RatFn {
    fn default() -> Self {
        RatFn::zero()
    }
}

impl fmt::Debug for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&|v| format!("x{v}")))
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFn::from_poly(self.num.add(&rhs.num));
        }
        if self.den == rhs.den {
            return RatFn::normalize(self.num.add(&rhs.num), self.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        RatFn::normalize(num, self.den.mul(&rhs.den))
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFn::from_poly(self.num.mul(&rhs.num));
        }
        // cross-cancel before multiplying
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let q = |p: &Poly, g: &Poly| {
            if g.is_one() {
                p.clone()
            } else {
                p.div_exact(g).expect("gcd divides")
            }
        };
        let num = q(&self.num, &g1).mul(&q(&rhs.num, &g2));
        let den = q(&self.den, &g2).mul(&q(&rhs.den, &g1));
        let (num, den) = if den.leading_is_negative() {
            (num.neg(), den.neg())
        } else {
            (num, den)
        };
        RatFn { num, den }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFn {
            type Output = RatFn;
            fn $m(self, rhs: RatFn) -> RatFn {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

impl Zero for RatFn {
    fn zero() -> Self {
        RatFn::zero()
    }
    fn is_zero(&self) -> bool {
        RatFn::is_zero(self)
    }
}

impl One for RatFn {
    fn one() -> Self {
        RatFn::one()
    }
}

/// Determinant and inverse of a square matrix over rational functions by
/// Gauss-Jordan elimination. Returns `None` for singular matrices.
pub fn invert_matrix(m: &[Vec<RatFn>]) -> Option<Vec<Vec<RatFn>>> {
    let n = m.len();
    let mut a: Vec<Vec<RatFn>> = m.to_vec();
    let mut inv: Vec<Vec<RatFn>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RatFn::one() } else { RatFn::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inv()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &f * &a[col][j];
                a[r][j] = &a[r][j] - &t;
                let t = &f * &inv[col][j];
                inv[r][j] = &inv[r][j] - &t;
            }
        }
    }
    Some(inv)
}

/// Rank of a (possibly rectangular) matrix over rational functions.
pub fn rank(m: &[Vec<RatFn>]) -> usize {
    let mut a: Vec<Vec<RatFn>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map(Vec::len).unwrap_or(0);
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].inv().expect("pivot is nonzero");
        for i in (r + 1)..rows {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] * &inv;
            for j in col..cols {
                let t = &f * &a[r][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: Var) -> RatFn {
        RatFn::var(v)
    }

    #[test]
    fn inverse_cancels() {
        let a = &x(0) + &RatFn::from_i64(1);
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
        assert!(RatFn::zero().inv().is_none());
    }

    #[test]
    fn normal_form_is_canonical() {
        // (x0^2 - 1)/(2x0 - 2) == (x0 + 1)/2
        let num = Poly::var(0).mul(&Poly::var(0)).sub(&Poly::one());
        let den = Poly::var(0).scale(&BigInt::from(2)).sub(&Poly::from_i64(2));
        let a = RatFn::new(num, den).unwrap();
        let b = RatFn::new(Poly::var(0).add(&Poly::one()), Poly::from_i64(2)).unwrap();
        assert_eq!(a, b);
        // sign is carried by the numerator
        let c = RatFn::new(Poly::one(), Poly::from_i64(-3)).unwrap();
        assert_eq!(c.denom(), &Poly::from_i64(3));
    }

    #[test]
    fn fraction_sum() {
        let a = RatFn::one().div(&x(0)).unwrap();
        let b = RatFn::one().div(&x(1)).unwrap();
        let s = &a + &b;
        let expected = RatFn::new(Poly::var(0).add(&Poly::var(1)), Poly::var(0).mul(&Poly::var(1)));
        assert_eq!(Some(s), expected);
    }

    #[test]
    fn matrix_inverse_and_rank() {
        let m = vec![
            vec![x(0), RatFn::one()],
            vec![RatFn::one(), x(1)],
        ];
        let inv = invert_matrix(&m).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = RatFn::zero();
                for k in 0..2 {
                    s = &s + &(&m[i][k] * &inv[k][j]);
                }
                assert_eq!(s, if i == j { RatFn::one() } else { RatFn::zero() });
            }
        }
        let singular = vec![vec![x(0), x(1)], vec![&x(0) * &x(0), &x(0) * &x(1)]];
        assert!(invert_matrix(&singular).is_none());
        assert_eq!(rank(&singular), 1);
    }
}

//! Sparse trivariate polynomials with exact rational coefficients.
//!
//! Just enough arithmetic for the quadratic-index verification work:
//! ring operations, derivatives, affine substitution, even-power collapse,
//! division with remainder in one designated variable, and exact queries.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// A polynomial in three variables with `BigRational` coefficients; no zero
/// coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<[u16; 3], Rat>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = MultiPoly::zero();
        if !c.is_zero() {
            p.terms.insert([0, 0, 0], c);
        }
        p
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(rat(c, 1))
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0u16; 3];
        e[i] = 1;
        let mut p = MultiPoly::zero();
        p.terms.insert(e, Rat::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert(&mut self, e: [u16; 3], c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = MultiPoly::zero();
        for (e, c) in &self.terms {
            out.terms.insert(*e, -c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.insert(e, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        let mut out = MultiPoly::zero();
        for (e, cc) in &self.terms {
            out.terms.insert(*e, cc * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = MultiPoly::constant(Rat::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn deriv(&self, i: usize) -> Self {
        let mut out = MultiPoly::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut en = *e;
            en[i] -= 1;
            out.insert(en, c * Rat::from(BigInt::from(e[i])));
        }
        out
    }

    /// Substitute `x_i := a + b x_i`.
    pub fn subst_affine(&self, i: usize, a: &Rat, b: &Rat) -> Self {
        let mut out = MultiPoly::zero();
        for (e, c) in &self.terms {
            let n = e[i] as u32;
            // (a + b x)^n expanded binomially
            let mut binom = Rat::one();
            for k in 0..=n {
                // binom = C(n, k) a^{n-k} b^k at loop entry for k
                let coeff = c * &binom;
                let mut en = *e;
                en[i] = k as u16;
                let mut term = coeff;
                for _ in 0..(n - k) {
                    term *= a;
                }
                for _ in 0..k {
                    term *= b;
                }
                out.insert(en, term);
                if k < n {
                    binom = binom * Rat::from(BigInt::from(n - k))
                        / Rat::from(BigInt::from(k + 1));
                }
            }
        }
        out
    }

    /// Collapse even powers of `x_i`: `x_i^{2k} -> x_i^k`. Fails if any odd
    /// power occurs.
    pub fn halve_var(&self, i: usize) -> Result<Self, String> {
        let mut out = MultiPoly::zero();
        for (e, c) in &self.terms {
            if e[i] % 2 != 0 {
                return Err(format!("odd power {} of variable {i}", e[i]));
            }
            let mut en = *e;
            en[i] /= 2;
            out.insert(en, c.clone());
        }
        Ok(out)
    }

    pub fn coeff(&self, e: [u16; 3]) -> Rat {
        self.terms.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn deg_var(&self, i: usize) -> u16 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u16 {
        self.terms
            .keys()
            .map(|e| e[0] + e[1] + e[2])
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of `x_i^k` as a polynomial in the other variables.
    pub fn coeff_in_var(&self, i: usize, k: u16) -> Self {
        let mut out = MultiPoly::zero();
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut en = *e;
                en[i] = 0;
                out.insert(en, c.clone());
            }
        }
        out
    }

    /// Division with remainder by `d` treated as polynomials in `x_i`; the
    /// divisor's leading coefficient in `x_i` must be a nonzero constant.
    pub fn div_rem_in_var(&self, d: &Self, i: usize) -> (Self, Self) {
        let dd = d.deg_var(i);
        let lead = d.coeff_in_var(i, dd);
        assert!(
            lead.n_terms() == 1 && lead.total_degree() == 0,
            "divisor leading coefficient must be constant"
        );
        let lc = lead.coeff([0, 0, 0]);
        let inv_lc = Rat::one() / lc;
        let mut q = MultiPoly::zero();
        let mut r = self.clone();
        loop {
            let dr = r.deg_var(i);
            if r.is_zero() || dr < dd {
                break;
            }
            let lead_r = r.coeff_in_var(i, dr);
            let mut shift = MultiPoly::zero();
            let mut e = [0u16; 3];
            e[i] = dr - dd;
            shift.terms.insert(e, Rat::one());
            let q_term = lead_r.scale(&inv_lc).mul(&shift);
            q = q.add(&q_term);
            r = r.sub(&q_term.mul(d));
        }
        (q, r)
    }

    pub fn eval_f64(&self, x: [f64; 3]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let c = rational_to_f64(c);
            acc += c * x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32);
        }
        acc
    }

    pub fn eval_rat(&self, x: [&Rat; 3]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, xi) in x.iter().enumerate() {
                for _ in 0..e[i] {
                    term *= *xi;
                }
            }
            acc += term;
        }
        acc
    }

    /// The homogeneous part of lowest total degree, with that degree.
    pub fn lowest_homogeneous(&self) -> (Self, u16) {
        let d = self
            .terms
            .keys()
            .map(|e| e[0] + e[1] + e[2])
            .min()
            .unwrap_or(0);
        let mut out = MultiPoly::zero();
        for (e, c) in &self.terms {
            if e[0] + e[1] + e[2] == d {
                out.insert(*e, c.clone());
            }
        }
        (out, d)
    }

    /// If `self == c * other` for a rational constant c, returns c.
    pub fn proportional_to(&self, other: &Self) -> Option<Rat> {
        if other.is_zero() {
            return if self.is_zero() {
                Some(Rat::zero())
            } else {
                None
            };
        }
        let (e0, c0) = other.terms.iter().next().expect("non-zero");
        let mine = self.coeff(*e0);
        if mine.is_zero() {
            return None;
        }
        let ratio = mine / c0;
        if self.sub(&other.scale(&ratio)).is_zero() {
            Some(ratio)
        } else {
            None
        }
    }
}

pub fn rational_to_f64(r: &Rat) -> f64 {
    let n = r.numer();
    let d = r.denom();
    // exact for the modest magnitudes used here; fall back through strings
    // for anything larger than 2^52
    let nf = bigint_to_f64(n);
    let df = bigint_to_f64(d);
    nf / df
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    b.to_f64().unwrap_or(if b.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = ["U", "V", "Y"];
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for i in 0..3 {
                if e[i] > 0 {
                    write!(f, "*{}^{}", names[i], e[i])?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_basics() {
        let u = MultiPoly::var(0);
        let v = MultiPoly::var(1);
        let p = u.add(&v).pow(2);
        assert_eq!(p.coeff([2, 0, 0]), rat(1, 1));
        assert_eq!(p.coeff([1, 1, 0]), rat(2, 1));
        assert_eq!(p.coeff([0, 2, 0]), rat(1, 1));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn derivative_and_eval() {
        let u = MultiPoly::var(0);
        let p = u.pow(3).scale(&rat(2, 1));
        let dp = p.deriv(0);
        assert_eq!(dp.coeff([2, 0, 0]), rat(6, 1));
        assert_eq!(p.eval_f64([2.0, 0.0, 0.0]), 16.0);
        let two = rat(2, 1);
        let z = Rat::zero();
        assert_eq!(p.eval_rat([&two, &z, &z]), rat(16, 1));
    }

    #[test]
    fn affine_substitution() {
        // (1 - U)^2 = 1 - 2U + U^2
        let u = MultiPoly::var(0);
        let p = u.pow(2);
        let q = p.subst_affine(0, &rat(1, 1), &rat(-1, 1));
        assert_eq!(q.coeff([0, 0, 0]), rat(1, 1));
        assert_eq!(q.coeff([1, 0, 0]), rat(-2, 1));
        assert_eq!(q.coeff([2, 0, 0]), rat(1, 1));
    }

    #[test]
    fn halving_even_powers() {
        let v = MultiPoly::var(1);
        let p = v.pow(4).add(&v.pow(2));
        let q = p.halve_var(1).unwrap();
        assert_eq!(q.coeff([0, 2, 0]), rat(1, 1));
        assert_eq!(q.coeff([0, 1, 0]), rat(1, 1));
        assert!(v.pow(3).halve_var(1).is_err());
    }

    #[test]
    fn division_in_one_variable() {
        // F = (V^2 + U) * (V - Y) + U Y, divided by (V^2 + U) in V
        let u = MultiPoly::var(0);
        let v = MultiPoly::var(1);
        let y = MultiPoly::var(2);
        let g = v.pow(2).add(&u);
        let f = g.mul(&v.sub(&y)).add(&u.mul(&y));
        let (q, r) = f.div_rem_in_var(&g, 1);
        assert_eq!(q, v.sub(&y));
        assert_eq!(r, u.mul(&y));
        assert!(f.sub(&q.mul(&g).add(&r)).is_zero());
    }

    #[test]
    fn proportionality() {
        let u = MultiPoly::var(0);
        let y = MultiPoly::var(2);
        let a = u.pow(2).sub(&y.pow(2)).scale(&rat(3, 7));
        let b = u.pow(2).sub(&y.pow(2));
        assert_eq!(a.proportional_to(&b), Some(rat(3, 7)));
        assert_eq!(a.proportional_to(&u.pow(2)), None);
    }
}

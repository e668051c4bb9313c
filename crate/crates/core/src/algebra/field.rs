//! Arithmetic in GF(p^e).
//!
//! Elements are dense indices: the element `c0 + c1*x + ... + c_{e-1}*x^{e-1}`
//! has index `c0 + c1*p + ... + c_{e-1}*p^{e-1}` (constant term least
//! significant). Index 0 is zero and index 1 is one.

use crate::error::{Error, Result};

use super::Element;

/// Field tables are cached up to this order.
const TABLE_LIMIT: usize = 1024;

#[derive(Clone, Debug)]
pub struct FieldContext {
    p: u32,
    degree: u32,
    modulus: Vec<u32>,
    order: usize,
    mul_table: Option<Vec<u32>>,
}

impl PartialEq for FieldContext {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FieldContext {}

impl FieldContext {
    /// Builds GF(p^e) with the given monic modulus (constant term first).
    pub fn new(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::ReducibleModulus { modulus, p });
        }
        let degree = (modulus.len() - 1) as u32;
        let order = checked_order(p, degree)?;
        if !is_irreducible(p, &modulus) {
            return Err(Error::ReducibleModulus { modulus, p });
        }
        let mut field = FieldContext { p, degree, modulus, order, mul_table: None };
        if order <= TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for a in 0..order {
                for b in a..order {
                    let prod = field.mul_slow(a, b) as u32;
                    table[a * order + b] = prod;
                    table[b * order + a] = prod;
                }
            }
            field.mul_table = Some(table);
        }
        Ok(field)
    }

    /// GF(p^e) with the lexicographically smallest monic irreducible modulus,
    /// coefficient tuples compared constant term first.
    pub fn with_default_modulus(p: u32, degree: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if degree == 0 {
            return Err(Error::Precondition("field degree must be at least 1".into()));
        }
        checked_order(p, degree)?;
        let modulus = smallest_irreducible(p, degree as usize);
        Self::new(p, modulus)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient vector of an element, constant term first.
    pub fn coefficients(&self, a: Element) -> Vec<u32> {
        let p = self.p as usize;
        let mut rest = a;
        (0..self.degree)
            .map(|_| {
                let c = (rest % p) as u32;
                rest /= p;
                c
            })
            .collect()
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Element {
        let p = self.p as usize;
        coeffs.iter().rev().fold(0, |acc, &c| acc * p + (c as usize % p))
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        let p = self.p as usize;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.degree {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    pub fn neg(&self, a: Element) -> Element {
        let p = self.p as usize;
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.degree {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        match &self.mul_table {
            Some(t) => t[a * self.order + b] as Element,
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: Element, b: Element) -> Element {
        let p = self.p as u64;
        let e = self.degree as usize;
        let ca = self.coefficients(a);
        let cb = self.coefficients(b);
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce by the monic modulus from the top down
        for top in (e..prod.len()).rev() {
            let lead = prod[top];
            if lead == 0 {
                continue;
            }
            for (k, &m) in self.modulus[..e].iter().enumerate() {
                let idx = top - e + k;
                prod[idx] = (prod[idx] + (p - lead) * m as u64) % p;
            }
            prod[top] = 0;
        }
        let reduced: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
        self.from_coefficients(&reduced)
    }

    /// `a^d` by square-and-multiply. `0^0` is 1 only when `zero_pow_zero_is_one`
    /// is set; otherwise `0^d = 0` for every `d`.
    pub fn pow_with(&self, a: Element, d: u64, zero_pow_zero_is_one: bool) -> Element {
        if a == 0 {
            return if d == 0 && zero_pow_zero_is_one { 1 } else { 0 };
        }
        let mut base = a;
        let mut exp = d;
        let mut acc = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: Element, d: u64) -> Element {
        self.pow_with(a, d, false)
    }

    pub fn checked_pow(&self, a: Element, d: u64) -> Result<Element> {
        if a >= self.order {
            return Err(Error::OutOfRange { element: a, order: self.order });
        }
        Ok(self.pow(a, d))
    }
}

fn checked_order(p: u32, degree: u32) -> Result<usize> {
    let order = (p as u128).checked_pow(degree).unwrap_or(u128::MAX);
    if order > 1 << 16 {
        return Err(Error::OrderTooLarge(order.min(usize::MAX as u128) as usize));
    }
    Ok(order as usize)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^e` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

/// Remainder of `num` modulo the monic `den` over GF(p); coefficient lists constant first.
fn poly_rem(p: u32, num: &[u32], den: &[u32]) -> Vec<u32> {
    let p = p as u64;
    let mut r: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (k, &m) in den.iter().enumerate() {
                r[shift + k] = (r[shift + k] + (p - lead) * m as u64) % p;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let deg = modulus.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for idx in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                divisor.push((rest % p as usize) as u32);
                rest /= p as usize;
            }
            divisor.push(1);
            if poly_rem(p, modulus, &divisor).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, degree: usize) -> Vec<u32> {
    // tuples (c0, ..., c_{e-1}) in lexicographic order, c0 most significant
    let count = (p as usize).pow(degree as u32);
    for n in 0..count {
        let mut coeffs = vec![0u32; degree + 1];
        let mut rest = n;
        for slot in (0..degree).rev() {
            coeffs[slot] = (rest % p as usize) as u32;
            rest /= p as usize;
        }
        coeffs[degree] = 1;
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> FieldContext {
        FieldContext::new(3, vec![2, 2, 1]).unwrap()
    }

    #[test]
    fn alpha_powers_in_f9() {
        let f = f9();
        let alpha = 3;
        // alpha^2 = alpha + 1 in characteristic 3
        assert_eq!(f.coefficients(f.pow(alpha, 2)), vec![1, 1]);
        assert_eq!(f.pow(alpha, 4), f.neg(1));
        assert_eq!(f.pow(alpha, 8), 1);
    }

    #[test]
    fn one_to_any_power() {
        let f = FieldContext::with_default_modulus(5, 2).unwrap();
        for d in 0..30 {
            assert_eq!(f.pow(1, d), 1);
        }
        assert_eq!(f.pow(0, 0), 0);
        assert_eq!(f.pow_with(0, 0, true), 1);
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldContext::with_default_modulus(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldContext::with_default_modulus(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
        assert_eq!(FieldContext::with_default_modulus(7, 1).unwrap().modulus(), &[0, 1]);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 2 = (x + 1)(x + 2) over GF(3)
        assert!(matches!(FieldContext::new(3, vec![2, 0, 1]), Err(Error::ReducibleModulus { .. })));
        assert!(matches!(FieldContext::new(2, vec![1, 0, 1]), Err(Error::ReducibleModulus { .. })));
        assert!(FieldContext::new(4, vec![1, 1]).is_err());
    }

    #[test]
    fn field_axioms_small() {
        for (p, e) in [(2, 3), (3, 2), (5, 1), (2, 4), (7, 1)] {
            let f = FieldContext::with_default_modulus(p, e).unwrap();
            let q = f.order();
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            // multiplicative group has order q - 1
            for a in 1..q {
                assert_eq!(f.pow(a, (q - 1) as u64), 1);
            }
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(31), Some((31, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(2), Some((2, 1)));
    }
}

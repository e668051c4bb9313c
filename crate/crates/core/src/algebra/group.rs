use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::field::FieldContext;
use super::Element;

/// Addition tables are materialized up to this order.
const TABLE_LIMIT: usize = 1024;
/// Above this order group axioms are checked on random triples only.
const FULL_CHECK_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 4096;
pub const MAX_ORDER: usize = 1 << 16;

#[derive(Clone, Debug)]
pub enum GroupKind {
    Cyclic(usize),
    /// Index of `(a, b)` is `a * |second| + b`.
    Product(Arc<Group>, Arc<Group>),
    FieldAdditive(Arc<FieldContext>),
    Cayley,
}

/// A finite group on the indices `0..order`, written additively, identity 0.
#[derive(Clone, Debug)]
pub struct Group {
    order: usize,
    kind: GroupKind,
    add_table: Option<Arc<[u32]>>,
    neg_table: Arc<[u32]>,
    abelian: bool,
}

impl Group {
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("cyclic group order must be positive".into()));
        }
        Self::structured(n, GroupKind::Cyclic(n))
    }

    pub fn field_additive(field: Arc<FieldContext>) -> Result<Self> {
        Self::structured(field.order(), GroupKind::FieldAdditive(field))
    }

    pub fn direct_product(first: &Group, second: &Group) -> Result<Self> {
        let order = first
            .order
            .checked_mul(second.order)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::OrderTooLarge(first.order.saturating_mul(second.order)))?;
        Self::structured(order, GroupKind::Product(Arc::new(first.clone()), Arc::new(second.clone())))
    }

    /// Builds a group from a full Cayley table; `table[a][b] = a + b`.
    pub fn from_cayley(table: &[Vec<usize>]) -> Result<Self> {
        let q = table.len();
        if q == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if q > MAX_ORDER {
            return Err(Error::OrderTooLarge(q));
        }
        let mut flat = Vec::with_capacity(q * q);
        for (a, row) in table.iter().enumerate() {
            if row.len() != q {
                return Err(Error::NotAGroup(format!("row {a} has length {}, expected {q}", row.len())));
            }
            for &v in row {
                if v >= q {
                    return Err(Error::NotAGroup(format!("entry {v} out of range in row {a}")));
                }
                flat.push(v as u32);
            }
        }
        for a in 0..q {
            if flat[a] as usize != a || flat[a * q] as usize != a {
                return Err(Error::NotAGroup("index 0 is not the identity".into()));
            }
        }
        let mut neg = vec![u32::MAX; q];
        for a in 0..q {
            let hits: Vec<usize> = (0..q).filter(|&b| flat[a * q + b] == 0).collect();
            match hits.as_slice() {
                [b] if flat[*b * q + a] == 0 => neg[a] = *b as u32,
                _ => return Err(Error::NotAGroup(format!("element {a} has no two-sided inverse"))),
            }
        }
        let table: Arc<[u32]> = flat.into();
        let abelian = (0..q).all(|a| (a..q).all(|b| table[a * q + b] == table[b * q + a]));
        let group = Group { order: q, kind: GroupKind::Cayley, add_table: Some(table), neg_table: neg.into(), abelian };
        group.verify()?;
        Ok(group)
    }

    fn structured(order: usize, kind: GroupKind) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge(order));
        }
        let abelian = match &kind {
            GroupKind::Product(a, b) => a.abelian && b.abelian,
            _ => true,
        };
        let mut group = Group { order, kind, add_table: None, neg_table: Arc::from(Vec::new()), abelian };
        group.neg_table = (0..order).map(|a| group.neg_structured(a) as u32).collect();
        if order <= TABLE_LIMIT {
            let mut table = Vec::with_capacity(order * order);
            for a in 0..order {
                for b in 0..order {
                    table.push(group.add_structured(a, b) as u32);
                }
            }
            group.add_table = Some(table.into());
        }
        group.verify()?;
        Ok(group)
    }

    fn add_structured(&self, a: Element, b: Element) -> Element {
        match &self.kind {
            GroupKind::Cyclic(n) => (a + b) % n,
            GroupKind::FieldAdditive(f) => f.add(a, b),
            GroupKind::Product(g1, g2) => {
                let q2 = g2.order;
                g1.add(a / q2, b / q2) * q2 + g2.add(a % q2, b % q2)
            }
            GroupKind::Cayley => unreachable!("cayley groups always carry a table"),
        }
    }

    fn neg_structured(&self, a: Element) -> Element {
        match &self.kind {
            GroupKind::Cyclic(n) => (n - a) % n,
            GroupKind::FieldAdditive(f) => f.neg(a),
            GroupKind::Product(g1, g2) => {
                let q2 = g2.order;
                g1.neg(a / q2) * q2 + g2.neg(a % q2)
            }
            GroupKind::Cayley => unreachable!("cayley groups always carry a table"),
        }
    }

    /// Identity, inverse and associativity checks: exhaustive for small groups,
    /// seeded random triples beyond that.
    pub fn verify(&self) -> Result<()> {
        let q = self.order;
        for a in 0..q {
            if self.add(0, a) != a || self.add(a, 0) != a {
                return Err(Error::NotAGroup(format!("0 is not an identity for {a}")));
            }
            if self.add(a, self.neg(a)) != 0 || self.neg(self.neg(a)) != a {
                return Err(Error::NotAGroup(format!("bad inverse for {a}")));
            }
        }
        let assoc = |a, b, c| self.add(self.add(a, b), c) == self.add(a, self.add(b, c));
        if q <= FULL_CHECK_LIMIT {
            for a in 0..q {
                for b in 0..q {
                    for c in 0..q {
                        if !assoc(a, b, c) {
                            return Err(Error::NotAGroup(format!("({a} + {b}) + {c} != {a} + ({b} + {c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q));
                if !assoc(a, b, c) {
                    return Err(Error::NotAGroup(format!("({a} + {b}) + {c} != {a} + ({b} + {c})")));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn field(&self) -> Option<&Arc<FieldContext>> {
        match &self.kind {
            GroupKind::FieldAdditive(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    #[inline]
    pub fn add(&self, a: Element, b: Element) -> Element {
        match &self.add_table {
            Some(t) => t[a * self.order + b] as Element,
            None => self.add_structured(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Element) -> Element {
        self.neg_table[a] as Element
    }

    /// `a - b`, read as `a + (-b)`.
    #[inline]
    pub fn sub(&self, a: Element, b: Element) -> Element {
        self.add(a, self.neg(b))
    }

    pub fn checked_sub(&self, a: Element, b: Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.sub(a, b))
    }

    pub fn check(&self, a: Element) -> Result<()> {
        if a < self.order {
            Ok(())
        } else {
            Err(Error::OutOfRange { element: a, order: self.order })
        }
    }

    pub fn element_order(&self, a: Element) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.add(x, a);
            n += 1;
        }
        n
    }

    pub fn cayley_table(&self) -> Vec<Vec<Element>> {
        (0..self.order).map(|a| (0..self.order).map(|b| self.add(a, b)).collect()).collect()
    }
}

//! Functions `G -> G` as dense image tables, and their statistics.

use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Element, Group};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct FunctionTable {
    group: Arc<Group>,
    images: Vec<Element>,
    /// `counts[b] = #preim(f, b)`
    counts: Vec<usize>,
}

impl PartialEq for FunctionTable {
    fn eq(&self, other: &Self) -> bool {
        // tables over the same group index set
        self.images == other.images && self.group.order() == other.group.order()
    }
}

/// `classes[t]` lists the elements with exactly `t` preimages, ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreimagePartition {
    pub classes: Vec<Vec<Element>>,
    pub image_size: usize,
    pub uniformity: usize,
}

impl PreimagePartition {
    pub fn class(&self, t: usize) -> &[Element] {
        self.classes.get(t).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Serialize, Deserialize)]
struct ImagesFile {
    images: Vec<Element>,
}

impl FunctionTable {
    pub fn new(group: Arc<Group>, images: Vec<Element>) -> Result<Self> {
        let q = group.order();
        if images.len() != q {
            return Err(Error::TableLength { got: images.len(), expected: q });
        }
        let mut counts = vec![0; q];
        for &b in &images {
            group.check(b)?;
            counts[b] += 1;
        }
        Ok(FunctionTable { group, images, counts })
    }

    pub fn from_fn(group: Arc<Group>, f: impl Fn(Element) -> Element) -> Result<Self> {
        let images = (0..group.order()).map(f).collect();
        Self::new(group, images)
    }

    pub fn identity(group: Arc<Group>) -> Self {
        Self::from_fn(group, |x| x).expect("identity is total")
    }

    pub fn constant(group: Arc<Group>, c: Element) -> Result<Self> {
        group.check(c)?;
        Self::from_fn(group, |_| c)
    }

    /// `x -> x^d` over the field behind `group`; `d = 0` is rejected.
    pub fn power_map(group: Arc<Group>, d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroExponent);
        }
        let field = group.field().ok_or(Error::NotAField)?.clone();
        Self::from_fn(group, |x| field.pow(x, d))
    }

    pub fn random<R: Rng>(group: Arc<Group>, rng: &mut R) -> Self {
        let q = group.order();
        let images = (0..q).map(|_| rng.gen_range(0..q)).collect();
        Self::new(group, images).expect("random images are in range")
    }

    /// A uniformly shuffled two-to-one function; `q` must be even.
    pub fn random_two_to_one<R: Rng>(group: Arc<Group>, rng: &mut R) -> Result<Self> {
        let q = group.order();
        if !q.is_multiple_of(2) {
            return Err(Error::Precondition("two-to-one functions need an even group order".into()));
        }
        let mut domain: Vec<Element> = (0..q).collect();
        domain.shuffle(rng);
        let mut targets: Vec<Element> = (0..q).collect();
        targets.shuffle(rng);
        let mut images = vec![0; q];
        for (pair, &b) in domain.chunks(2).zip(&targets) {
            images[pair[0]] = b;
            images[pair[1]] = b;
        }
        Self::new(group, images)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Element] {
        &self.images
    }

    #[inline]
    pub fn eval(&self, x: Element) -> Element {
        self.images[x]
    }

    pub fn preimage_count(&self, b: Element) -> usize {
        self.counts[b]
    }

    pub fn preimages(&self, b: Element) -> Vec<Element> {
        (0..self.order()).filter(|&x| self.images[x] == b).collect()
    }

    /// Sorted image set.
    pub fn image(&self) -> Vec<Element> {
        (0..self.order()).filter(|&b| self.counts[b] > 0).collect()
    }

    pub fn image_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn uniformity(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn is_permutation(&self) -> bool {
        self.image_size() == self.order()
    }

    pub fn preimage_partition(&self) -> PreimagePartition {
        let u = self.uniformity();
        let mut classes = vec![Vec::new(); u + 1];
        for b in 0..self.order() {
            classes[self.counts[b]].push(b);
        }
        PreimagePartition { classes, image_size: self.image_size(), uniformity: u }
    }

    /// `x -> f(x + a) - f(x)`.
    pub fn differential_operator(&self, a: Element) -> Result<FunctionTable> {
        self.group.check(a)?;
        if a == 0 {
            return Err(Error::ZeroDirection);
        }
        let g = &self.group;
        Self::from_fn(g.clone(), |x| g.sub(self.images[g.add(x, a)], self.images[x]))
    }

    /// `max_{a != 0} u(Delta_{f,a})`; 0 for the trivial group.
    pub fn differential_uniformity(&self) -> usize {
        let q = self.order();
        let g = &self.group;
        let mut counts = vec![0usize; q];
        let mut best = 0;
        for a in 1..q {
            counts.iter_mut().for_each(|c| *c = 0);
            for x in 0..q {
                let b = g.sub(self.images[g.add(x, a)], self.images[x]);
                counts[b] += 1;
            }
            best = best.max(counts.iter().copied().max().unwrap_or(0));
        }
        best
    }

    /// `x -> g(x) + f(x)` where `self` is `g`.
    pub fn add_pointwise(&self, f: &FunctionTable) -> Result<FunctionTable> {
        if f.order() != self.order() {
            return Err(Error::TableLength { got: f.order(), expected: self.order() });
        }
        let g = &self.group;
        Self::from_fn(g.clone(), |x| g.add(self.images[x], f.images[x]))
    }

    /// `x -> f(x) + c`.
    pub fn translate(&self, c: Element) -> Result<FunctionTable> {
        self.group.check(c)?;
        let g = &self.group;
        Self::from_fn(g.clone(), |x| g.add(self.images[x], c))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "images": self.images })
    }
}

fn fn_err(spec: &str, reason: impl Into<String>) -> Error {
    Error::FunctionSpec { spec: spec.to_string(), reason: reason.into() }
}

/// Parses `pow:<d>`, `table:<i0,i1,...>` or `file:<path>` against `group`.
pub fn build_function(group: Arc<Group>, spec: &str) -> Result<FunctionTable> {
    let spec = spec.trim();
    let (head, rest) = spec.split_once(':').ok_or_else(|| fn_err(spec, "missing `:`"))?;
    match head {
        "pow" => {
            let d = rest.parse::<u64>().map_err(|_| fn_err(spec, "exponent must be a nonnegative integer"))?;
            FunctionTable::power_map(group, d)
        }
        "table" => {
            let images = rest
                .split(',')
                .map(|s| s.trim().parse::<Element>().map_err(|_| fn_err(spec, format!("bad entry `{s}`"))))
                .collect::<Result<Vec<_>>>()?;
            FunctionTable::new(group, images)
        }
        "file" => {
            let text = std::fs::read_to_string(Path::new(rest))?;
            let file: ImagesFile = serde_json::from_str(&text)?;
            FunctionTable::new(group, file.images)
        }
        other => Err(fn_err(spec, format!("unknown function kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_group;

    fn g(spec: &str) -> Arc<Group> {
        Arc::new(build_group(spec).unwrap())
    }

    #[test]
    fn square_over_f9_statistics() {
        let f = FunctionTable::power_map(g("gf:9:poly=2,2,1"), 2).unwrap();
        let part = f.preimage_partition();
        assert_eq!(part.class(1), &[0]);
        assert_eq!(part.class(2).len(), 4);
        assert_eq!(part.class(0).len(), 4);
        // P0 = {±alpha, ±alpha^3} = indices {3, 6, 7, 5}
        assert_eq!(part.class(0), &[3, 5, 6, 7]);
        assert_eq!(f.image_size(), 5);
        assert_eq!(f.uniformity(), 2);
        assert!(!f.is_permutation());
        assert_eq!(f.differential_uniformity(), 1);
    }

    #[test]
    fn identity_and_constant() {
        let z4 = g("zn:4");
        let id = FunctionTable::identity(z4.clone());
        let part = id.preimage_partition();
        assert_eq!(part.class(1), &[0, 1, 2, 3]);
        assert_eq!(part.uniformity, 1);
        assert!(id.is_permutation());
        assert_eq!(id.differential_uniformity(), 4);
        for a in 1..4 {
            assert!(id.differential_operator(a).unwrap().images().iter().all(|&b| b == a));
        }

        let zero = FunctionTable::constant(z4, 0).unwrap();
        let part = zero.preimage_partition();
        assert_eq!(part.class(4), &[0]);
        assert_eq!(part.class(0), &[1, 2, 3]);
        assert!(zero.differential_operator(1).unwrap().images().iter().all(|&b| b == 0));
        assert!(matches!(zero.differential_operator(0), Err(Error::ZeroDirection)));
    }

    #[test]
    fn cubes_mod_seven() {
        let f = FunctionTable::power_map(g("gf:7"), 3).unwrap();
        assert_eq!(f.image(), vec![0, 1, 6]);
        assert_eq!(f.image_size(), 3);
        assert_eq!(f.uniformity(), 3);
    }

    #[test]
    fn cube_over_f8_is_apn_permutation() {
        let f = FunctionTable::power_map(g("gf:8"), 3).unwrap();
        assert!(f.is_permutation());
        assert_eq!(f.differential_uniformity(), 2);
        assert!(FunctionTable::power_map(g("gf:8"), 1).unwrap().is_permutation());
    }

    #[test]
    fn derivative_of_square_over_f9() {
        let grp = g("gf:9:poly=2,2,1");
        let field = grp.field().unwrap().clone();
        let f = FunctionTable::power_map(grp, 2).unwrap();
        let delta = f.differential_operator(1).unwrap();
        for x in 0..9 {
            // (x + 1)^2 - x^2 = 2x + 1
            assert_eq!(delta.eval(x), field.add(field.mul(2, x), 1));
        }
    }

    #[test]
    fn function_spec_parsing() {
        let z3 = g("zn:3");
        assert_eq!(build_function(z3.clone(), "table:0,0,1").unwrap().images(), &[0, 0, 1]);
        assert!(build_function(z3.clone(), "table:0,0").is_err());
        assert!(build_function(z3.clone(), "table:0,0,3").is_err());
        assert!(matches!(build_function(z3.clone(), "pow:2"), Err(Error::NotAField)));
        assert!(matches!(build_function(g("gf:3"), "pow:0"), Err(Error::ZeroExponent)));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        std::fs::write(&path, r#"{"images":[2,1,0]}"#).unwrap();
        assert_eq!(build_function(z3, &format!("file:{}", path.display())).unwrap().images(), &[2, 1, 0]);
    }

    #[test]
    fn preimage_counts_sum_to_order() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for spec in ["zn:6", "gf:8", "prod:(zn:2)x(zn:4)"] {
            let grp = g(spec);
            for _ in 0..20 {
                let f = FunctionTable::random(grp.clone(), &mut rng);
                let part = f.preimage_partition();
                let q = f.order();
                let weighted: usize = part.classes.iter().enumerate().map(|(t, c)| t * c.len()).sum();
                assert_eq!(weighted, q);
                assert_eq!(part.class(0).len(), q - part.image_size);
                let total: usize = part.classes.iter().map(Vec::len).sum();
                assert_eq!(total, q);
            }
        }
    }
}

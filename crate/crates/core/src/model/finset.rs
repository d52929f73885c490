//! Finite ordinals with `s` coproduct structures followed by `r - s`
//! product structures.
//!
//! Both structures are made strict by fixed index encodings: offsets for
//! `+`, row-major pairs for `×`.

use serde::{Deserialize, Serialize};

use super::NFoldModel;
use crate::error::{mismatch, Error, Result};

/// A function `{0..dom} → {0..cod}` as a table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinArrow {
    pub cod: usize,
    pub table: Vec<u32>,
}

impl FinArrow {
    pub fn new(cod: usize, table: Vec<u32>) -> Result<Self> {
        if let Some(&x) = table.iter().find(|&&x| x as usize >= cod) {
            return Err(Error::ShapeMismatch(format!("value {x} outside codomain {cod}")));
        }
        Ok(FinArrow { cod, table })
    }

    pub fn dom(&self) -> usize {
        self.table.len()
    }

    pub fn identity(n: usize) -> Self {
        FinArrow { cod: n, table: (0..n as u32).collect() }
    }

    fn from_fn(dom: usize, cod: usize, f: impl Fn(usize) -> usize) -> Self {
        FinArrow { cod, table: (0..dom).map(|i| f(i) as u32).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinSetSplit {
    r: usize,
    split: usize,
    /// Negative control: post-composes every ι with the reversal of its codomain.
    corrupt: bool,
}

impl FinSetSplit {
    pub fn new(r: usize, split: usize) -> Result<Self> {
        if r == 0 || split > r {
            return Err(Error::Config(format!("FinSetSplit needs 0 <= split <= r, r >= 1; got r = {r}, split = {split}")));
        }
        Ok(FinSetSplit { r, split, corrupt: false })
    }

    /// The same model with a deliberately broken interchange.
    pub fn corrupted(r: usize, split: usize) -> Result<Self> {
        Ok(FinSetSplit { corrupt: true, ..Self::new(r, split)? })
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn is_corrupt(&self) -> bool {
        self.corrupt
    }

    /// Whether `⊗_k` is disjoint union.
    pub fn is_sum(&self, k: usize) -> bool {
        k <= self.split
    }
}

impl NFoldModel for FinSetSplit {
    type Obj = usize;
    type Arrow = FinArrow;

    fn arity(&self) -> usize {
        self.r
    }

    fn dom(&self, f: &FinArrow) -> usize {
        f.dom()
    }

    fn cod(&self, f: &FinArrow) -> usize {
        f.cod
    }

    fn id(&self, x: &usize) -> FinArrow {
        FinArrow::identity(*x)
    }

    fn compose(&self, f: &FinArrow, g: &FinArrow) -> Result<FinArrow> {
        if f.dom() != g.cod {
            return Err(mismatch(format!("domain {}", g.cod), format!("domain {}", f.dom())));
        }
        Ok(FinArrow { cod: f.cod, table: g.table.iter().map(|&x| f.table[x as usize]).collect() })
    }

    fn unit(&self, k: usize) -> usize {
        if self.is_sum(k) {
            0
        } else {
            1
        }
    }

    fn tensor_obj(&self, k: usize, a: &usize, b: &usize) -> usize {
        // Saturating, so that size estimates on huge grids cannot overflow.
        if self.is_sum(k) {
            a.saturating_add(*b)
        } else {
            a.saturating_mul(*b)
        }
    }

    fn tensor_arrow(&self, k: usize, f: &FinArrow, g: &FinArrow) -> FinArrow {
        if self.is_sum(k) {
            let off = f.cod as u32;
            let mut table = Vec::with_capacity(f.dom() + g.dom());
            table.extend_from_slice(&f.table);
            table.extend(g.table.iter().map(|&y| off + y));
            FinArrow { cod: f.cod + g.cod, table }
        } else {
            let gc = g.cod as u32;
            let mut table = Vec::with_capacity(f.dom() * g.dom());
            for &x in &f.table {
                table.extend(g.table.iter().map(|&y| x * gc + y));
            }
            FinArrow { cod: f.cod * g.cod, table }
        }
    }

    fn kappa(&self, k: usize, l: usize) -> Result<FinArrow> {
        self.check_pair(k, l)?;
        Ok(FinArrow { cod: self.unit(l), table: vec![0; self.unit(k)] })
    }

    fn beta(&self, k: usize, l: usize) -> Result<FinArrow> {
        self.check_pair(k, l)?;
        let u = self.unit(k);
        Ok(FinArrow::identity(self.tensor_obj(l, &u, &u)).with_dom_checked(u))
    }

    fn tau(&self, k: usize, l: usize) -> Result<FinArrow> {
        self.check_pair(k, l)?;
        let u = self.unit(l);
        Ok(FinArrow { cod: u, table: vec![0; self.tensor_obj(k, &u, &u)] })
    }

    fn iota(&self, k: usize, l: usize, a: &usize, b: &usize, c: &usize, d: &usize) -> Result<FinArrow> {
        self.check_pair(k, l)?;
        let (a, b, c, d) = (*a, *b, *c, *d);
        let f = match (self.is_sum(k), self.is_sum(l)) {
            // (A+B)+(C+D) → (A+C)+(B+D)
            (true, true) => FinArrow::from_fn(a + b + c + d, a + b + c + d, |i| {
                if i < a {
                    i
                } else if i < a + b {
                    i + c
                } else if i < a + b + c {
                    i - b
                } else {
                    i
                }
            }),
            // (A×B)+(C×D) → (A+C)×(B+D)
            (true, false) => FinArrow::from_fn(a * b + c * d, (a + c) * (b + d), |i| {
                if i < a * b {
                    (i / b) * (b + d) + i % b
                } else {
                    let j = i - a * b;
                    (a + j / d) * (b + d) + b + j % d
                }
            }),
            (false, true) => unreachable!("sums precede products"),
            // (A×B)×(C×D) → (A×C)×(B×D)
            (false, false) => FinArrow::from_fn(a * b * c * d, a * b * c * d, |i| {
                let (ab, cd) = (i / (c * d), i % (c * d));
                let (x, y) = (ab / b, ab % b);
                let (z, w) = (cd / d, cd % d);
                (x * c + z) * (b * d) + y * d + w
            }),
        };
        if self.corrupt {
            let n = f.cod as u32;
            return Ok(FinArrow { cod: f.cod, table: f.table.iter().map(|&y| n - 1 - y).collect() });
        }
        Ok(f)
    }
}

impl FinArrow {
    fn with_dom_checked(self, dom: usize) -> Self {
        debug_assert_eq!(self.dom(), dom);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arrow(dom: usize, cod: usize) -> impl Strategy<Value = FinArrow> {
        proptest::collection::vec(0..cod.max(1) as u32, dom).prop_map(move |t| FinArrow { cod, table: t })
    }

    fn sized(max: usize) -> impl Strategy<Value = FinArrow> {
        (0..=max, 1..=max).prop_flat_map(|(d, c)| arrow(d, c))
    }

    #[test]
    fn structural_examples() {
        let m = FinSetSplit::new(2, 1).unwrap();
        assert_eq!(m.tau(1, 2).unwrap(), FinArrow { cod: 1, table: vec![0, 0] });
        assert_eq!(m.iota(1, 2, &1, &1, &1, &1).unwrap(), FinArrow { cod: 4, table: vec![0, 3] });
        assert_eq!(m.kappa(1, 2).unwrap(), FinArrow { cod: 1, table: vec![] });
        assert_eq!(m.beta(1, 2).unwrap(), FinArrow::identity(0));
        let sums = FinSetSplit::new(2, 2).unwrap();
        assert_eq!(sums.kappa(1, 2).unwrap(), FinArrow::identity(0));
        let prods = FinSetSplit::new(2, 0).unwrap();
        assert_eq!(prods.tau(1, 2).unwrap(), FinArrow::identity(1));
        assert!(matches!(m.kappa(2, 1), Err(Error::ColourOrder { .. })));
        assert!(matches!(m.kappa(1, 3), Err(Error::ArityMismatch(_))));
    }

    #[test]
    fn interchange_of_sums_moves_blocks() {
        let m = FinSetSplit::new(2, 2).unwrap();
        // blocks A = {0}, B = {1,2}, C = {3}, D = {4}
        let f = m.iota(1, 2, &1, &2, &1, &1).unwrap();
        assert_eq!(f.table, vec![0, 2, 3, 1, 4]);
    }

    #[test]
    fn interchange_of_products_transposes() {
        let m = FinSetSplit::new(2, 0).unwrap();
        let f = m.iota(1, 2, &2, &1, &1, &2).unwrap();
        // ((a,b),(c,d)) ↦ ((a,c),(b,d)) with B = C = 1
        assert_eq!(f.table, vec![0, 1, 2, 3]);
        let g = m.iota(1, 2, &1, &2, &2, &1).unwrap();
        assert_eq!(g.table, vec![0, 2, 1, 3]);
    }

    #[test]
    fn corrupted_iota_differs() {
        let good = FinSetSplit::new(2, 1).unwrap();
        let bad = FinSetSplit::corrupted(2, 1).unwrap();
        assert_ne!(good.iota(1, 2, &1, &2, &0, &0).unwrap(), bad.iota(1, 2, &1, &2, &0, &0).unwrap());
    }

    proptest! {
        #[test]
        fn tensors_are_strictly_associative(f in sized(3), g in sized(3), h in sized(3), s in 0usize..=2) {
            let m = FinSetSplit::new(2, s).unwrap();
            for k in 1..=2 {
                let left = m.tensor_arrow(k, &m.tensor_arrow(k, &f, &g), &h);
                let right = m.tensor_arrow(k, &f, &m.tensor_arrow(k, &g, &h));
                prop_assert_eq!(left, right);
                let unit = m.id(&m.unit(k));
                prop_assert_eq!(m.tensor_arrow(k, &unit, &f), f.clone());
                prop_assert_eq!(m.tensor_arrow(k, &f, &unit), f.clone());
            }
        }

        #[test]
        fn tensors_are_functorial(a in 0usize..3, b in 1usize..3, c in 1usize..3, d in 0usize..3, e in 1usize..3, p in 1usize..3, s in 0usize..=2, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_arrow = |dom: usize, cod: usize| FinArrow { cod, table: (0..dom).map(|_| rng.gen_range(0..cod as u32)).collect() };
            let (f1, f2) = (rand_arrow(a, b), rand_arrow(b, c));
            let (g1, g2) = (rand_arrow(d, e), rand_arrow(e, p));
            let m = FinSetSplit::new(2, s).unwrap();
            for k in 1..=2 {
                let lhs = m.compose(&m.tensor_arrow(k, &f2, &g2), &m.tensor_arrow(k, &f1, &g1)).unwrap();
                let rhs = m.tensor_arrow(k, &m.compose(&f2, &f1).unwrap(), &m.compose(&g2, &g1).unwrap());
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn iota_is_natural(a in 0usize..3, b in 0usize..3, c in 0usize..3, d in 0usize..3, s in 0usize..=2, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut pick = |dom: usize| {
                let cod = rng.gen_range(1..=3usize);
                FinArrow { cod, table: (0..dom).map(|_| rng.gen_range(0..cod as u32)).collect() }
            };
            let (f, g, h, e) = (pick(a), pick(b), pick(c), pick(d));
            let m = FinSetSplit::new(2, s).unwrap();
            let (k, l) = (1, 2);
            let before = m.tensor_arrow(k, &m.tensor_arrow(l, &f, &g), &m.tensor_arrow(l, &h, &e));
            let after = m.tensor_arrow(l, &m.tensor_arrow(k, &f, &h), &m.tensor_arrow(k, &g, &e));
            let i0 = m.iota(k, l, &a, &b, &c, &d).unwrap();
            let i1 = m.iota(k, l, &f.cod, &g.cod, &h.cod, &e.cod).unwrap();
            prop_assert_eq!(m.compose(&i1, &before).unwrap(), m.compose(&after, &i0).unwrap());
        }
    }
}

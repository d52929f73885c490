//! Component tuples of the swap transformations and 0-1 mask multiplication.
//!
//! A [`NatTuple`] lists schema entries: the hole `1` (an identity at
//! whatever object turns up) or one structural constant. Masks are stored
//! as column → row index maps, never as dense matrices.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplicial::BasicArrow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StructKind {
    /// `I_k → I_l`
    Kappa,
    /// `I_k → I_k ⊗_l I_k`
    Beta,
    /// `I_l ⊗_k I_l → I_l`
    Tau,
    /// `(A ⊗_l B) ⊗_k (C ⊗_l D) → (A ⊗_k C) ⊗_l (B ⊗_k D)`
    Iota,
}

impl StructKind {
    pub fn name(&self) -> &'static str {
        match self {
            StructKind::Kappa => "kappa",
            StructKind::Beta => "beta",
            StructKind::Tau => "tau",
            StructKind::Iota => "iota",
        }
    }
}

impl fmt::Display for StructKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemaEntry {
    Hole,
    Const { kind: StructKind, colours: Option<(usize, usize)> },
}

impl SchemaEntry {
    pub fn is_hole(&self) -> bool {
        matches!(self, SchemaEntry::Hole)
    }
}

impl fmt::Display for SchemaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaEntry::Hole => f.write_str("1"),
            SchemaEntry::Const { kind, colours: None } => write!(f, "{kind}"),
            SchemaEntry::Const { kind, colours: Some((k, l)) } => write!(f, "{kind}[{k},{l}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NatTuple {
    pub entries: Vec<SchemaEntry>,
}

impl NatTuple {
    pub fn identity(len: usize) -> Self {
        NatTuple { entries: vec![SchemaEntry::Hole; len] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(SchemaEntry::is_hole)
    }

    /// Positions of the non-hole entries.
    pub fn non_identity_positions(&self) -> Vec<usize> {
        self.entries.iter().enumerate().filter(|(_, e)| !e.is_hole()).map(|(p, _)| p).collect()
    }

    fn with_colours(&self, k: usize, l: usize) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| match *e {
                SchemaEntry::Const { kind, .. } => SchemaEntry::Const { kind, colours: Some((k, l)) },
                SchemaEntry::Hole => SchemaEntry::Hole,
            })
            .collect();
        NatTuple { entries }
    }
}

/// Run-length form: `(1^4, tau, 1^2)`.
impl fmt::Display for NatTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut runs: Vec<(SchemaEntry, usize)> = Vec::new();
        for &e in &self.entries {
            match runs.last_mut() {
                Some((last, n)) if *last == e => *n += 1,
                _ => runs.push((e, 1)),
            }
        }
        let parts: Vec<String> = runs
            .iter()
            .map(|(e, n)| if *n == 1 { e.to_string() } else { format!("{e}^{n}") })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A 0-1 matrix with exactly one 1 per column, as `row_of[col]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mask {
    pub rows: usize,
    pub row_of: Vec<usize>,
}

impl Mask {
    pub fn new(rows: usize, row_of: Vec<usize>) -> Result<Self> {
        if let Some(bad) = row_of.iter().find(|&&r| r >= rows) {
            return Err(Error::ShapeMismatch(format!("row {bad} in a mask with {rows} rows")));
        }
        Ok(Mask { rows, row_of })
    }

    pub fn cols(&self) -> usize {
        self.row_of.len()
    }

    pub fn identity(n: usize) -> Self {
        Mask { rows: n, row_of: (0..n).collect() }
    }

    /// The `1 × n` row `(1, …, 1)`.
    pub fn ones(n: usize) -> Self {
        Mask { rows: 1, row_of: vec![0; n] }
    }

    /// Kronecker product, `self` the slow factor.
    pub fn kron(&self, other: &Mask) -> Mask {
        let mut row_of = Vec::with_capacity(self.cols() * other.cols());
        for &a in &self.row_of {
            for &b in &other.row_of {
                row_of.push(a * other.rows + b);
            }
        }
        Mask { rows: self.rows * other.rows, row_of }
    }

    /// Matrix product `self · other`.
    pub fn then(&self, other: &Mask) -> Result<Mask> {
        if self.cols() != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}-column mask times {}-row mask",
                self.cols(),
                other.rows
            )));
        }
        Ok(Mask { rows: self.rows, row_of: other.row_of.iter().map(|&c| self.row_of[c]).collect() })
    }
}

pub fn apply_mask(t: &NatTuple, m: &Mask) -> Result<NatTuple> {
    if t.len() != m.rows {
        return Err(Error::ShapeMismatch(format!("tuple of length {} against {} mask rows", t.len(), m.rows)));
    }
    Ok(NatTuple { entries: m.row_of.iter().map(|&r| t.entries[r]).collect() })
}

/// `(1…1)_u ⊗ I_n ⊗ (1…1)_v ⊗ I_m ⊗ (1…1)_w`.
pub fn mask_kron(u: usize, n: usize, v: usize, m: usize, w: usize) -> Mask {
    Mask::ones(u)
        .kron(&Mask::identity(n))
        .kron(&Mask::ones(v))
        .kron(&Mask::identity(m))
        .kron(&Mask::ones(w))
}

/// The three-factor analogue with separators `u, v1, v2, w`.
pub fn mask_kron3(u: usize, n: usize, v1: usize, m: usize, v2: usize, p: usize, w: usize) -> Mask {
    mask_kron(u, n, v1, m, v2).kron(&Mask::identity(p)).kron(&Mask::ones(w))
}

/// Where the single non-identity component of a base tuple sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiSite {
    pub kind: StructKind,
    /// Coordinate in the lower colour's target.
    pub row: usize,
    /// Coordinate in the higher colour's target.
    pub col: usize,
}

/// The nontrivial cell of the base tuple for `f` (lower colour) and `g`
/// (higher colour), or `None` for the identity cases.
pub fn chi_site(f: BasicArrow, g: BasicArrow) -> Option<ChiSite> {
    use BasicArrow::{Degeneracy as S, Face as D};
    let (kind, row, col) = match (f, g) {
        (S { idx: j, .. }, S { idx: i, .. }) => (StructKind::Kappa, j, i),
        (D { .. }, S { idx: i, .. }) if f.is_inner_face() => (StructKind::Tau, f_idx(f) - 1, i),
        (S { idx: j, .. }, D { .. }) if g.is_inner_face() => (StructKind::Beta, j, f_idx(g) - 1),
        (D { .. }, D { .. }) if f.is_inner_face() && g.is_inner_face() => {
            (StructKind::Iota, f_idx(f) - 1, f_idx(g) - 1)
        }
        _ => return None,
    };
    Some(ChiSite { kind, row, col })
}

fn f_idx(a: BasicArrow) -> usize {
    match a {
        BasicArrow::Face { idx, .. } | BasicArrow::Degeneracy { idx, .. } => idx,
        BasicArrow::Identity { .. } => 0,
    }
}

/// The two-colour base tuple of length `tgt(f) · tgt(g)`.
pub fn chi_pair(f: BasicArrow, g: BasicArrow) -> NatTuple {
    let cols = g.tgt();
    let mut t = NatTuple::identity(f.tgt() * cols);
    if let Some(site) = chi_site(f, g) {
        t.entries[site.row * cols + site.col] = SchemaEntry::Const { kind: site.kind, colours: None };
    }
    t
}

/// The `r`-colour tuple for a swap of colours `k < l`, with `u, v, w` the
/// products of the current dimensions of the colours below `k`, strictly
/// between, and above `l`.
pub fn chi_general(
    k: usize,
    l: usize,
    u: usize,
    v: usize,
    w: usize,
    f: BasicArrow,
    g: BasicArrow,
) -> Result<NatTuple> {
    if k >= l {
        return Err(Error::ColourOrder { k, l });
    }
    let base = chi_pair(f, g).with_colours(k, l);
    apply_mask(&base, &mask_kron(u, f.tgt(), v, g.tgt(), w))
}

/// [`chi_general`] through a per-thread cache; path enumeration asks for
/// the same few tuples over and over.
pub(crate) fn chi_shared(
    k: usize,
    l: usize,
    u: usize,
    v: usize,
    w: usize,
    f: BasicArrow,
    g: BasicArrow,
) -> Result<Rc<NatTuple>> {
    type Key = (usize, usize, usize, usize, usize, BasicArrow, BasicArrow);
    thread_local! {
        static MEMO: RefCell<FxHashMap<Key, Rc<NatTuple>>> = RefCell::new(FxHashMap::default());
    }
    let key = (k, l, u, v, w, f, g);
    if let Some(t) = MEMO.with(|m| m.borrow().get(&key).cloned()) {
        return Ok(t);
    }
    let t = Rc::new(chi_general(k, l, u, v, w, f, g)?);
    MEMO.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() > 1 << 16 {
            m.clear();
        }
        m.insert(key, Rc::clone(&t));
    });
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasicArrow as B;

    fn konst(kind: StructKind) -> SchemaEntry {
        SchemaEntry::Const { kind, colours: None }
    }

    #[test]
    fn mask_example() {
        let t = NatTuple { entries: vec![SchemaEntry::Hole, konst(StructKind::Kappa), SchemaEntry::Hole] };
        let m = Mask::new(3, vec![0, 1, 1, 2, 2, 0, 0, 1, 1, 2, 2]).unwrap();
        let got = apply_mask(&t, &m).unwrap();
        assert_eq!(got.to_string(), "(1, kappa^2, 1^4, kappa^2, 1^2)");
        assert_eq!(apply_mask(&t, &Mask::identity(3)).unwrap(), t);
        assert!(matches!(apply_mask(&t, &Mask::identity(2)), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn kron_index_map() {
        let m = Mask::identity(2).kron(&Mask::ones(2));
        assert_eq!(m.row_of, vec![0, 0, 1, 1]);
        assert_eq!(mask_kron(1, 2, 1, 3, 1), Mask::identity(6));
        let m = mask_kron(2, 2, 3, 2, 2);
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..3 {
                    for d in 0..2 {
                        for e in 0..2 {
                            let col = (((a * 2 + b) * 3 + c) * 2 + d) * 2 + e;
                            assert_eq!(m.row_of[col], b * 2 + d);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mask_composition() {
        let m1 = mask_kron(1, 2, 1, 2, 2);
        let m2 = Mask::identity(4).kron(&Mask::ones(3)).kron(&Mask::identity(2));
        let t = chi_pair(B::d(3, 1), B::d(3, 2));
        let twice = apply_mask(&apply_mask(&t, &m1).unwrap(), &m2).unwrap();
        assert_eq!(twice, apply_mask(&t, &m1.then(&m2).unwrap()).unwrap());
    }

    #[test]
    fn base_tuples() {
        // s_j^{n+1}, s_i^{m+1} with n = 2, m = 3, j = 1, i = 2
        let t = chi_pair(B::s(3, 1), B::s(4, 2));
        assert_eq!(t.len(), 12);
        assert_eq!(t.non_identity_positions(), vec![4 + 2]);
        assert_eq!(t.to_string(), "(1^6, kappa, 1^5)");

        let t = chi_pair(B::d(3, 2), B::s(3, 0));
        assert_eq!(t.non_identity_positions(), vec![3]);
        assert_eq!(t.entries[3], konst(StructKind::Tau));

        let t = chi_pair(B::s(2, 0), B::d(3, 2));
        assert_eq!(t.non_identity_positions(), vec![1]);

        let t = chi_pair(B::d(3, 1), B::d(4, 3));
        assert_eq!(t.non_identity_positions(), vec![2]);
        assert_eq!(t.entries[2], konst(StructKind::Iota));
    }

    #[test]
    fn trivial_cases() {
        assert!(chi_pair(B::d(3, 0), B::d(3, 1)).is_identity());
        assert!(chi_pair(B::d(3, 3), B::s(2, 1)).is_identity());
        assert!(chi_pair(B::s(3, 1), B::d(2, 2)).is_identity());
        assert!(chi_pair(B::id(2), B::s(2, 1)).is_identity());
        assert_eq!(chi_pair(B::id(2), B::s(2, 1)).len(), 4);
    }

    #[test]
    fn general_table() {
        let t = chi_general(1, 3, 2, 1, 1, B::s(2, 0), B::s(2, 1)).unwrap();
        assert_eq!(t.len(), 8);
        assert_eq!(t.to_string(), "(1, kappa[1,3], 1^3, kappa[1,3], 1^2)");
        assert_eq!(
            chi_general(1, 2, 1, 1, 1, B::d(3, 1), B::d(3, 1)).unwrap().entries,
            chi_pair(B::d(3, 1), B::d(3, 1)).with_colours(1, 2).entries
        );
        assert!(matches!(
            chi_general(2, 2, 1, 1, 1, B::d(3, 1), B::d(3, 1)),
            Err(Error::ColourOrder { k: 2, l: 2 })
        ));
    }
}

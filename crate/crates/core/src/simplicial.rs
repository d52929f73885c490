//! The category Δ^op presented by face and degeneracy generators.
//!
//! Objects are the naturals `0, 1, 2, …` (geometric dimension). A face
//! `d{n}_{i}` goes `n → n-1`, a degeneracy `s{n}_{i}` goes `n-1 → n`.
//! Words are written outermost-left: `[f_k, …, f_1]` denotes `f_k ∘ … ∘ f_1`.
//!
//! Normalization contracts the leftmost redex of the basic equations until
//! the word has the shape `s_{l_1} … s_{l_k} d_{j_1} … d_{j_m}` with
//! `l_1 > … > l_k` and `j_1 ≥ … ≥ j_m`. Monotone maps give an independent
//! semantic check of equality.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

/// A generator of Δ^op, or an identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasicArrow {
    /// `d_idx^dim : dim → dim-1`
    Face { dim: usize, idx: usize },
    /// `s_idx^dim : dim-1 → dim`
    Degeneracy { dim: usize, idx: usize },
    Identity { dim: usize },
}

impl BasicArrow {
    pub fn face(dim: usize, idx: usize) -> Result<Self> {
        if dim >= 1 && idx <= dim {
            Ok(BasicArrow::Face { dim, idx })
        } else {
            Err(Error::InvalidArrow(format!("d{dim}_{idx}")))
        }
    }

    pub fn degeneracy(dim: usize, idx: usize) -> Result<Self> {
        if dim >= 1 && idx < dim {
            Ok(BasicArrow::Degeneracy { dim, idx })
        } else {
            Err(Error::InvalidArrow(format!("s{dim}_{idx}")))
        }
    }

    /// Shorthand for [`BasicArrow::face`]; panics on invalid indices.
    pub fn d(dim: usize, idx: usize) -> Self {
        Self::face(dim, idx).expect("invalid face")
    }

    /// Shorthand for [`BasicArrow::degeneracy`]; panics on invalid indices.
    pub fn s(dim: usize, idx: usize) -> Self {
        Self::degeneracy(dim, idx).expect("invalid degeneracy")
    }

    pub fn id(dim: usize) -> Self {
        BasicArrow::Identity { dim }
    }

    pub fn src(&self) -> usize {
        match *self {
            BasicArrow::Face { dim, .. } => dim,
            BasicArrow::Degeneracy { dim, .. } => dim - 1,
            BasicArrow::Identity { dim } => dim,
        }
    }

    pub fn tgt(&self) -> usize {
        match *self {
            BasicArrow::Face { dim, .. } => dim - 1,
            BasicArrow::Degeneracy { dim, .. } => dim,
            BasicArrow::Identity { dim } => dim,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, BasicArrow::Identity { .. })
    }

    pub fn is_face(&self) -> bool {
        matches!(self, BasicArrow::Face { .. })
    }

    pub fn is_degeneracy(&self) -> bool {
        matches!(self, BasicArrow::Degeneracy { .. })
    }

    /// A face `d_i^n` with `1 ≤ i ≤ n-1`, i.e. one that tensors two entries.
    pub fn is_inner_face(&self) -> bool {
        matches!(*self, BasicArrow::Face { dim, idx } if idx >= 1 && idx < dim)
    }

    /// Every generator available from object `n` whose target stays `≤ max_dim`.
    pub fn generators_from(n: usize, max_dim: Option<usize>) -> Vec<BasicArrow> {
        let mut out = Vec::new();
        if n >= 1 {
            out.extend((0..=n).map(|i| BasicArrow::Face { dim: n, idx: i }));
        }
        if max_dim.map_or(true, |m| n < m) {
            out.extend((0..=n).map(|i| BasicArrow::Degeneracy { dim: n + 1, idx: i }));
        }
        out
    }
}

impl fmt::Display for BasicArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasicArrow::Face { dim, idx } => write!(f, "d{dim}_{idx}"),
            BasicArrow::Degeneracy { dim, idx } => write!(f, "s{dim}_{idx}"),
            BasicArrow::Identity { dim } => write!(f, "id{dim}"),
        }
    }
}

impl FromStr for BasicArrow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a generator: `{s}`"));
        if let Some(rest) = s.strip_prefix("id") {
            let dim = rest.parse().map_err(|_| bad())?;
            return Ok(BasicArrow::Identity { dim });
        }
        let (kind, rest) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let (dim, idx) = rest.split_once('_').ok_or_else(bad)?;
        let dim: usize = dim.parse().map_err(|_| bad())?;
        let idx: usize = idx.parse().map_err(|_| bad())?;
        match kind {
            "d" => BasicArrow::face(dim, idx),
            "s" => BasicArrow::degeneracy(dim, idx),
            _ => Err(bad()),
        }
    }
}

/// A composable word of basic arrows, outermost-left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimplicialWord {
    src: usize,
    tgt: usize,
    word: Vec<BasicArrow>,
}

impl SimplicialWord {
    pub fn identity(n: usize) -> Self {
        SimplicialWord { src: n, tgt: n, word: Vec::new() }
    }

    /// Builds a word starting at `src`; `word` is outermost-left.
    pub fn new(src: usize, word: Vec<BasicArrow>) -> Result<Self> {
        let mut at = src;
        for f in word.iter().rev() {
            if f.src() != at {
                return Err(mismatch(format!("{f} with source {at}"), format!("source {}", f.src())));
            }
            at = f.tgt();
        }
        Ok(SimplicialWord { src, tgt: at, word })
    }

    /// Builds a word from a non-empty list of arrows, reading the source off
    /// the innermost one.
    pub fn from_arrows(word: Vec<BasicArrow>) -> Result<Self> {
        let src = word
            .last()
            .map(BasicArrow::src)
            .ok_or_else(|| Error::Parse("empty word has no source".into()))?;
        Self::new(src, word)
    }

    pub fn single(f: BasicArrow) -> Self {
        SimplicialWord { src: f.src(), tgt: f.tgt(), word: vec![f] }
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn tgt(&self) -> usize {
        self.tgt
    }

    /// The entries, outermost-left.
    pub fn arrows(&self) -> &[BasicArrow] {
        &self.word
    }

    /// Number of non-identity entries.
    pub fn len(&self) -> usize {
        self.word.iter().filter(|f| !f.is_identity()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_identity_word(&self) -> bool {
        self.is_empty()
    }

    /// The same arrow with identity entries removed.
    pub fn strip_identities(&self) -> Self {
        SimplicialWord {
            src: self.src,
            tgt: self.tgt,
            word: self.word.iter().copied().filter(|f| !f.is_identity()).collect(),
        }
    }
}

impl fmt::Display for SimplicialWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "id{}", self.src);
        }
        let parts: Vec<String> = self.word.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" . "))
    }
}

impl FromStr for SimplicialWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let arrows = s
            .split('.')
            .map(str::parse::<BasicArrow>)
            .collect::<Result<Vec<_>>>()?;
        let word = Self::from_arrows(arrows)?;
        if word.is_empty() {
            Ok(Self::identity(word.src))
        } else {
            Ok(word)
        }
    }
}

/// `f ∘ g`.
pub fn compose(f: &SimplicialWord, g: &SimplicialWord) -> Result<SimplicialWord> {
    if f.src != g.tgt {
        return Err(mismatch(format!("source {}", g.tgt), format!("source {}", f.src)));
    }
    let mut word = f.word.clone();
    word.extend_from_slice(&g.word);
    Ok(SimplicialWord { src: g.src, tgt: f.tgt, word })
}

/// The five oriented basic equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasicEquation {
    /// `d_j ∘ d_l → d_{l-1} ∘ d_j` for `l-1 ≥ j`
    FaceFace,
    /// `s_j ∘ s_l → s_{l+1} ∘ s_j` for `l+1 > j`
    DegenDegen,
    /// `d_j ∘ s_l → s_{l-1} ∘ d_j` for `j ≤ l-1`
    FaceDegenBelow,
    /// `d_j ∘ s_l → 1` for `l ∈ {j, j-1}`
    FaceDegenCancel,
    /// `d_j ∘ s_l → s_l ∘ d_{j-1}` for `j ≥ l+2`
    FaceDegenAbove,
}

impl fmt::Display for BasicEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BasicEquation::FaceFace => "dd: d_j.d_l = d_(l-1).d_j (l-1 >= j)",
            BasicEquation::DegenDegen => "ss: s_j.s_l = s_(l+1).s_j (l+1 > j)",
            BasicEquation::FaceDegenBelow => "ds: d_j.s_l = s_(l-1).d_j (j <= l-1)",
            BasicEquation::FaceDegenCancel => "ds: d_j.s_l = 1 (l in {j, j-1})",
            BasicEquation::FaceDegenAbove => "ds: d_j.s_l = s_l.d_(j-1) (j >= l+2)",
        };
        f.write_str(s)
    }
}

/// If `outer ∘ inner` is the left-hand side of a basic equation, returns the
/// equation and its contractum (outermost-left, possibly empty).
pub fn contract(outer: BasicArrow, inner: BasicArrow) -> Option<(BasicEquation, Vec<BasicArrow>)> {
    use BasicArrow::{Degeneracy as S, Face as D};
    match (outer, inner) {
        (D { dim: n1, idx: j }, D { dim: n, idx: l }) if l >= j + 1 => Some((
            BasicEquation::FaceFace,
            vec![D { dim: n1, idx: l - 1 }, D { dim: n, idx: j }],
        )),
        (S { dim: n1, idx: j }, S { dim: n, idx: l }) if l + 1 > j => Some((
            BasicEquation::DegenDegen,
            vec![S { dim: n1, idx: l + 1 }, S { dim: n, idx: j }],
        )),
        (D { dim: n, idx: j }, S { idx: l, .. }) => {
            if l == j || l + 1 == j {
                Some((BasicEquation::FaceDegenCancel, Vec::new()))
            } else if j + 1 <= l {
                Some((
                    BasicEquation::FaceDegenBelow,
                    vec![S { dim: n - 1, idx: l - 1 }, D { dim: n - 1, idx: j }],
                ))
            } else {
                Some((
                    BasicEquation::FaceDegenAbove,
                    vec![S { dim: n - 1, idx: l }, D { dim: n - 1, idx: j - 1 }],
                ))
            }
        }
        _ => None,
    }
}

/// One contraction performed by [`normalize_with_trace`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    /// Index (outermost-left) of the left member of the contracted pair.
    pub position: usize,
    pub rule: BasicEquation,
    pub result: SimplicialWord,
}

pub fn normalize(f: &SimplicialWord) -> SimplicialWord {
    normalize_with_trace(f).0
}

/// Contracts the leftmost redex until none remains.
pub fn normalize_with_trace(f: &SimplicialWord) -> (SimplicialWord, Vec<RewriteStep>) {
    let mut word: Vec<BasicArrow> = f.word.iter().copied().filter(|a| !a.is_identity()).collect();
    let mut trace = Vec::new();
    'outer: loop {
        for p in 0..word.len().saturating_sub(1) {
            if let Some((rule, contractum)) = contract(word[p], word[p + 1]) {
                word.splice(p..p + 2, contractum);
                trace.push(RewriteStep {
                    position: p,
                    rule,
                    result: SimplicialWord { src: f.src, tgt: f.tgt, word: word.clone() },
                });
                continue 'outer;
            }
        }
        break;
    }
    (SimplicialWord { src: f.src, tgt: f.tgt, word }, trace)
}

/// Whether `f` has the normal shape: strictly descending degeneracies
/// followed by weakly descending faces, or a lone identity.
pub fn is_normal(f: &SimplicialWord) -> bool {
    if f.word.len() == 1 && f.word[0].is_identity() {
        return true;
    }
    let mut seen_face = false;
    let mut prev: Option<BasicArrow> = None;
    for &a in &f.word {
        match a {
            BasicArrow::Identity { .. } => return false,
            BasicArrow::Degeneracy { idx, .. } => {
                if seen_face {
                    return false;
                }
                if let Some(BasicArrow::Degeneracy { idx: p, .. }) = prev {
                    if p <= idx {
                        return false;
                    }
                }
            }
            BasicArrow::Face { idx, .. } => {
                if let Some(BasicArrow::Face { idx: p, .. }) = prev {
                    if p < idx {
                        return false;
                    }
                }
                seen_face = true;
            }
        }
        prev = Some(a);
    }
    true
}

/// A weakly increasing map `{0..src_size} → {0..tgt_size}` in Δ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonotoneMap {
    pub src_size: usize,
    pub tgt_size: usize,
    pub table: Vec<usize>,
}

impl MonotoneMap {
    pub fn identity(n: usize) -> Self {
        MonotoneMap { src_size: n, tgt_size: n, table: (0..=n).collect() }
    }

    /// `self ∘ other` as functions.
    fn after(&self, other: &MonotoneMap) -> MonotoneMap {
        debug_assert_eq!(other.tgt_size, self.src_size);
        MonotoneMap {
            src_size: other.src_size,
            tgt_size: self.tgt_size,
            table: other.table.iter().map(|&x| self.table[x]).collect(),
        }
    }

    fn of_basic(f: BasicArrow) -> MonotoneMap {
        match f {
            // δ_i^n : {0..n-1} → {0..n}, skipping i
            BasicArrow::Face { dim, idx } => MonotoneMap {
                src_size: dim - 1,
                tgt_size: dim,
                table: (0..dim).map(|x| if x < idx { x } else { x + 1 }).collect(),
            },
            // σ_i^n : {0..n} → {0..n-1}, hitting i twice
            BasicArrow::Degeneracy { dim, idx } => MonotoneMap {
                src_size: dim,
                tgt_size: dim - 1,
                table: (0..=dim).map(|x| if x <= idx { x } else { x - 1 }).collect(),
            },
            BasicArrow::Identity { dim } => MonotoneMap::identity(dim),
        }
    }
}

/// The Δ map denoted by `f`, computed contravariantly.
pub fn to_monotone(f: &SimplicialWord) -> MonotoneMap {
    // f_k … f_1 : n_0 → n_k denotes sem(f_1) ∘ … ∘ sem(f_k)
    let mut acc = MonotoneMap::identity(f.tgt);
    for &a in &f.word {
        acc = MonotoneMap::of_basic(a).after(&acc);
    }
    acc
}

pub fn equal(f: &SimplicialWord, g: &SimplicialWord) -> Result<bool> {
    if f.src != g.src || f.tgt != g.tgt {
        return Err(mismatch(
            format!("{} → {}", f.src, f.tgt),
            format!("{} → {}", g.src, g.tgt),
        ));
    }
    Ok(normalize(f).word == normalize(g).word)
}

/// The arrow `i_t : m → 1` picking the `t`-th of `m` coordinates (1-based):
/// the top faces drop the trailing coordinates, then `d_0` drops the
/// leading ones.
pub fn segal_arrow(m: usize, t: usize) -> Result<SimplicialWord> {
    if m == 0 || t == 0 || t > m {
        return Err(Error::IndexOutOfRange(format!("segal arrow i_{t} at m = {m}")));
    }
    let mut word = Vec::with_capacity(m - 1);
    for dim in 2..=t {
        word.push(BasicArrow::Face { dim, idx: 0 });
    }
    for dim in t + 1..=m {
        word.push(BasicArrow::Face { dim, idx: dim });
    }
    SimplicialWord::new(m, word)
}

/// Deterministic pseudo-random word of exactly `len` generators from `src`.
pub fn random_word(src: usize, len: usize, seed: u64) -> SimplicialWord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_word_with(src, len, None, &mut rng)
}

/// Random word whose objects stay `≤ max_dim` (when given). Stops early
/// only if no generator is available.
pub fn random_word_with<R: Rng + ?Sized>(
    src: usize,
    len: usize,
    max_dim: Option<usize>,
    rng: &mut R,
) -> SimplicialWord {
    let mut applied = Vec::with_capacity(len);
    let mut at = src;
    for _ in 0..len {
        let choices = BasicArrow::generators_from(at, max_dim);
        if choices.is_empty() {
            break;
        }
        let f = choices[rng.gen_range(0..choices.len())];
        at = f.tgt();
        applied.push(f);
    }
    applied.reverse();
    SimplicialWord { src, tgt: at, word: applied }
}

/// All words of exactly `len` non-identity generators starting at `src`
/// with every object `≤ max_dim`.
pub fn words_from(src: usize, len: usize, max_dim: usize) -> Vec<SimplicialWord> {
    fn go(at: usize, left: usize, max_dim: usize, acc: &mut Vec<BasicArrow>, src: usize, out: &mut Vec<SimplicialWord>) {
        if left == 0 {
            let mut word = acc.clone();
            word.reverse();
            out.push(SimplicialWord { src, tgt: at, word });
            return;
        }
        for f in BasicArrow::generators_from(at, Some(max_dim)) {
            acc.push(f);
            go(f.tgt(), left - 1, max_dim, acc, src, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if src <= max_dim {
        go(src, len, max_dim, &mut Vec::new(), src, &mut out);
    }
    out
}

/// Every word with objects `≤ max_dim` and length `≤ max_len`.
pub fn all_words(max_dim: usize, max_len: usize) -> Vec<SimplicialWord> {
    (0..=max_dim)
        .flat_map(|src| (0..=max_len).flat_map(move |len| words_from(src, len, max_dim)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> SimplicialWord {
        s.parse().unwrap()
    }

    #[test]
    fn compose_concatenates() {
        let f = compose(&w("d2_1"), &w("d3_3")).unwrap();
        assert_eq!(f.arrows(), &[BasicArrow::d(2, 1), BasicArrow::d(3, 3)]);
        assert_eq!((f.src(), f.tgt()), (3, 1));

        let g = compose(&w("d3_1"), &w("s3_1")).unwrap();
        assert_eq!((g.src(), g.tgt()), (2, 2));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn compose_checks_endpoints() {
        assert!(matches!(
            compose(&w("d2_0"), &w("d2_0")),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&w("d3_1 . s3_1")), SimplicialWord::identity(2));
        assert_eq!(normalize(&w("d2_1 . d3_3")), w("d2_2 . d3_1"));
        assert_eq!(normalize(&w("s2_0 . s1_0")), w("s2_1 . s1_0"));
        assert_eq!(normalize(&SimplicialWord::identity(4)), SimplicialWord::identity(4));
    }

    #[test]
    fn trace_labels_rules() {
        let (nf, trace) = normalize_with_trace(&w("d3_1 . s3_1"));
        assert!(nf.is_empty());
        assert_eq!(trace.len(), 1);
        assert_eq!(trace[0].rule, BasicEquation::FaceDegenCancel);
    }

    #[test]
    fn is_normal_examples() {
        assert!(is_normal(&w("s2_1 . s1_0")));
        assert!(!is_normal(&w("s2_0 . s1_0")));
        assert!(is_normal(&w("d2_2 . d3_1")));
        assert!(is_normal(&w("id3")));
        assert!(!is_normal(&w("d3_1 . s3_1")));
    }

    #[test]
    fn monotone_of_cancelling_pair_is_identity() {
        assert_eq!(to_monotone(&w("d3_1 . s3_1")), MonotoneMap::identity(2));
        assert_eq!(to_monotone(&SimplicialWord::identity(3)), MonotoneMap::identity(3));
    }

    #[test]
    fn equal_examples() {
        assert!(equal(&w("d2_1 . d3_3"), &w("d2_2 . d3_1")).unwrap());
        let f = w("s2_0 . d2_1");
        assert!(equal(&f, &f).unwrap());
        // l = j-1 also cancels, so these two agree
        assert!(equal(&w("d3_1 . s3_1"), &w("d3_2 . s3_1")).unwrap());
        assert!(!equal(&w("d3_1 . s3_1"), &w("d3_0 . s3_1")).unwrap());
        assert!(equal(&w("d2_0"), &w("d3_0")).is_err());
    }

    #[test]
    fn segal_arrows() {
        assert_eq!(segal_arrow(1, 1).unwrap(), SimplicialWord::identity(1));
        assert_eq!(segal_arrow(2, 1).unwrap(), w("d2_2"));
        assert_eq!(segal_arrow(3, 2).unwrap(), w("d2_0 . d3_3"));
        assert_eq!(segal_arrow(3, 3).unwrap(), w("d2_0 . d3_0"));
        assert!(matches!(segal_arrow(3, 4), Err(Error::IndexOutOfRange(_))));
        for m in 1..=5 {
            for t in 1..=m {
                let i = segal_arrow(m, t).unwrap();
                assert_eq!((i.src(), i.tgt()), (m, 1));
                assert_eq!(to_monotone(&i).table, vec![t - 1, t]);
            }
        }
    }

    #[test]
    fn random_words() {
        assert_eq!(random_word(3, 0, 9), SimplicialWord::identity(3));
        let f = random_word(0, 2, 5);
        assert_eq!(f.len(), 2);
        // from 0 only s1_0 exists, and the second step is from 1
        assert!(f.arrows()[1].is_degeneracy());
        assert_eq!(random_word(2, 7, 42), random_word(2, 7, 42));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!("d2_3".parse::<SimplicialWord>().is_err());
        assert!("x2_1".parse::<SimplicialWord>().is_err());
        assert!(matches!("d2_0 . d2_0".parse::<SimplicialWord>(), Err(Error::EndpointMismatch { .. })));
    }
}

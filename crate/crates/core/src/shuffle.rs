//! Coloured shuffles of generator sequences and their normalizing paths.
//!
//! A shuffle interleaves one Δ^op word per colour `1..=r`; entries are
//! stored outermost-left like [`SimplicialWord`]. A swap exchanges an
//! adjacent pair `(f,k)(g,l)` with `k < l`, moving the lower colour
//! rightwards, until the shuffle is sorted as `Φ^r … Φ^1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::simplicial::{BasicArrow, SimplicialWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColouredGenerator {
    pub arrow: BasicArrow,
    /// 1-based colour.
    pub colour: usize,
}

impl ColouredGenerator {
    pub fn new(arrow: BasicArrow, colour: usize) -> Self {
        ColouredGenerator { arrow, colour }
    }
}

impl fmt::Display for ColouredGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} @{})", self.arrow, self.colour)
    }
}

/// An interleaving of `r` composable coloured words.
///
/// Identity entries are accepted on input (they fix a colour's source
/// dimension) but are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColouredShuffle {
    r: usize,
    src_dims: Vec<usize>,
    tgt_dims: Vec<usize>,
    entries: Vec<ColouredGenerator>,
}

impl ColouredShuffle {
    /// `src_dims[c-1]` is the source dimension of colour `c`.
    pub fn new(r: usize, src_dims: Vec<usize>, entries: Vec<ColouredGenerator>) -> Result<Self> {
        if r == 0 {
            return Err(Error::ArityMismatch("a shuffle needs at least one colour".into()));
        }
        if src_dims.len() != r {
            return Err(Error::ArityMismatch(format!(
                "{} source dimensions for {r} colours",
                src_dims.len()
            )));
        }
        let mut at = src_dims.clone();
        for e in entries.iter().rev() {
            if e.colour == 0 || e.colour > r {
                return Err(Error::IndexOutOfRange(format!("colour {} with r = {r}", e.colour)));
            }
            let c = e.colour - 1;
            if e.arrow.src() != at[c] {
                return Err(mismatch(
                    format!("source {} for colour {}", at[c], e.colour),
                    format!("{}", e.arrow),
                ));
            }
            at[c] = e.arrow.tgt();
        }
        let entries = entries.into_iter().filter(|e| !e.arrow.is_identity()).collect();
        Ok(ColouredShuffle { r, src_dims, tgt_dims: at, entries })
    }

    /// Infers each colour's source from its innermost entry; colours with
    /// no entries get `default_dim`.
    pub fn from_entries(r: usize, entries: Vec<ColouredGenerator>, default_dim: usize) -> Result<Self> {
        let mut src = vec![None; r];
        for e in entries.iter().rev() {
            if e.colour >= 1 && e.colour <= r && src[e.colour - 1].is_none() {
                src[e.colour - 1] = Some(e.arrow.src());
            }
        }
        let src = src.into_iter().map(|d| d.unwrap_or(default_dim)).collect();
        Self::new(r, src, entries)
    }

    /// The sorted shuffle `Φ^r … Φ^1` with `words[c-1]` of colour `c`.
    pub fn sorted_from_words(words: &[SimplicialWord]) -> Result<Self> {
        let r = words.len();
        let src = words.iter().map(SimplicialWord::src).collect();
        let entries = words
            .iter()
            .enumerate()
            .rev()
            .flat_map(|(c, w)| w.arrows().iter().map(move |&a| ColouredGenerator::new(a, c + 1)))
            .collect();
        Self::new(r, src, entries)
    }

    /// The empty shuffle at the given dimensions.
    pub fn identity(src_dims: Vec<usize>) -> Self {
        ColouredShuffle { r: src_dims.len(), tgt_dims: src_dims.clone(), src_dims, entries: Vec::new() }
    }

    /// `self` after `other`: the entries of `self` sit to the left.
    pub fn then_after(&self, other: &ColouredShuffle) -> Result<Self> {
        if self.r != other.r || self.src_dims != other.tgt_dims {
            return Err(mismatch(format!("{:?}", other.tgt_dims), format!("{:?}", self.src_dims)));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(ColouredShuffle { r: self.r, src_dims: other.src_dims.clone(), tgt_dims: self.tgt_dims.clone(), entries })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn entries(&self) -> &[ColouredGenerator] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn src_dims(&self) -> &[usize] {
        &self.src_dims
    }

    pub fn tgt_dims(&self) -> &[usize] {
        &self.tgt_dims
    }

    /// The colour-`c` subsequence as a word.
    pub fn colour_word(&self, c: usize) -> SimplicialWord {
        let arrows = self.entries.iter().filter(|e| e.colour == c).map(|e| e.arrow).collect();
        SimplicialWord::new(self.src_dims[c - 1], arrows).expect("colour subsequence is composable")
    }

    pub fn colour_words(&self) -> Vec<SimplicialWord> {
        (1..=self.r).map(|c| self.colour_word(c)).collect()
    }

    /// Dimensions of every colour just before entry `pos` is applied, i.e.
    /// after all entries to its right.
    pub fn dims_before(&self, pos: usize) -> Vec<usize> {
        let mut at = self.src_dims.clone();
        for e in self.entries[pos + 1..].iter().rev() {
            at[e.colour - 1] = e.arrow.tgt();
        }
        at
    }

    /// Dimensions after applying every entry from `pos` (inclusive) rightwards.
    pub fn dims_after(&self, pos: usize) -> Vec<usize> {
        let mut at = self.dims_before(pos);
        let e = self.entries[pos];
        at[e.colour - 1] = e.arrow.tgt();
        at
    }

    /// Product of the current dimensions of colours above that of `pos`.
    pub fn inner_power(&self, pos: usize) -> usize {
        let c = self.entries[pos].colour;
        self.dims_before(pos)[c..].iter().product()
    }

    /// Product of the current dimensions of colours below that of `pos`.
    pub fn outer_power(&self, pos: usize) -> usize {
        let c = self.entries[pos].colour;
        self.dims_before(pos)[..c - 1].iter().product()
    }

    /// Pairs `i < j` with a lower colour at `i` than at `j`.
    pub fn inversion_count(&self) -> usize {
        let mut seen = vec![0usize; self.r + 1];
        let mut count = 0;
        for e in self.entries.iter().rev() {
            count += seen[e.colour + 1..].iter().sum::<usize>();
            seen[e.colour] += 1;
        }
        count
    }

    pub fn next_swaps(&self) -> Vec<usize> {
        self.entries
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].colour < w[1].colour)
            .map(|(p, _)| p)
            .collect()
    }

    pub fn is_sorted(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].colour >= w[1].colour)
    }

    /// Exchanges the entries at `pos` and `pos + 1`; only allowed when it
    /// moves a lower colour to the right.
    pub fn swap(&self, pos: usize) -> Result<Self> {
        if pos + 1 >= self.entries.len() || self.entries[pos].colour >= self.entries[pos + 1].colour {
            return Err(Error::NotANormalizingPath(format!("no admissible swap at position {pos} of {self}")));
        }
        let mut next = self.clone();
        next.entries.swap(pos, pos + 1);
        Ok(next)
    }

    /// The terminal shuffle of every normalizing path.
    pub fn sorted(&self) -> Self {
        let mut next = self.clone();
        next.entries.sort_by(|a, b| b.colour.cmp(&a.colour));
        next
    }

    pub fn canonical_path(&self) -> NormalizingPath {
        let mut swaps = Vec::with_capacity(self.inversion_count());
        let mut at = self.clone();
        while let Some(&p) = at.next_swaps().first() {
            swaps.push(p);
            at = at.swap(p).expect("eligible swap");
        }
        NormalizingPath { start: self.clone(), swaps }
    }

    /// Every normalizing path, leftmost swap explored first, stopping
    /// after `limit` paths.
    pub fn enumerate_paths(&self, limit: usize) -> PathEnumeration {
        fn go(at: &ColouredShuffle, acc: &mut Vec<usize>, limit: usize, out: &mut Vec<Vec<usize>>) -> bool {
            let swaps = at.next_swaps();
            if swaps.is_empty() {
                if out.len() >= limit {
                    return false;
                }
                out.push(acc.clone());
                return true;
            }
            for p in swaps {
                acc.push(p);
                let ok = go(&at.swap(p).expect("eligible swap"), acc, limit, out);
                acc.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
        let mut out = Vec::new();
        let complete = go(self, &mut Vec::new(), limit, &mut out);
        PathEnumeration {
            paths: out.into_iter().map(|swaps| NormalizingPath { start: self.clone(), swaps }).collect(),
            truncated: !complete,
        }
    }

    /// Parses with an explicit arity; colours without entries get source 1.
    pub fn parse_with(text: &str, r: Option<usize>) -> Result<Self> {
        let entries = parse_entries(text)?;
        let max = entries.iter().map(|e| e.colour).max().unwrap_or(1);
        let r = r.unwrap_or(max);
        if max > r {
            return Err(Error::IndexOutOfRange(format!("colour {max} with r = {r}")));
        }
        Self::from_entries(r, entries, 1)
    }
}

fn parse_entries(text: &str) -> Result<Vec<ColouredGenerator>> {
    let text = text.trim();
    if text.is_empty() || text == "-" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected `(` at `{rest}`")))?;
        let close = body.find(')').ok_or_else(|| Error::Parse(format!("unclosed entry `{rest}`")))?;
        let (arrow, colour) = body[..close]
            .split_once('@')
            .ok_or_else(|| Error::Parse(format!("missing `@colour` in `{}`", &body[..close])))?;
        let colour: usize = colour
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad colour `{colour}`")))?;
        out.push(ColouredGenerator::new(arrow.parse()?, colour));
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}

impl fmt::Display for ColouredShuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("-");
        }
        let parts: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for ColouredShuffle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_with(s, None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalizingPath {
    pub start: ColouredShuffle,
    pub swaps: Vec<usize>,
}

impl NormalizingPath {
    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    /// `Θ_0, …, Θ_j`; fails if a swap is inadmissible or the end is unsorted.
    pub fn shuffles(&self) -> Result<Vec<ColouredShuffle>> {
        let mut out = vec![self.start.clone()];
        for &p in &self.swaps {
            let next = out.last().expect("non-empty").swap(p)?;
            out.push(next);
        }
        if !out.last().expect("non-empty").is_sorted() {
            return Err(Error::NotANormalizingPath("path ends at an unsorted shuffle".into()));
        }
        Ok(out)
    }

    /// Builds the path through the given sequence of shuffles.
    pub fn from_shuffles(seq: &[ColouredShuffle]) -> Result<Self> {
        let start = seq
            .first()
            .cloned()
            .ok_or_else(|| Error::NotANormalizingPath("empty sequence".into()))?;
        let mut swaps = Vec::new();
        for pair in seq.windows(2) {
            let p = pair[0]
                .next_swaps()
                .into_iter()
                .find(|&p| pair[0].swap(p).ok().as_ref() == Some(&pair[1]))
                .ok_or_else(|| Error::NotANormalizingPath(format!("{} does not step to {}", pair[0], pair[1])))?;
            swaps.push(p);
        }
        let path = NormalizingPath { start, swaps };
        path.shuffles()?;
        Ok(path)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEnumeration {
    pub paths: Vec<NormalizingPath>,
    pub truncated: bool,
}

/// All interleavings of the given per-colour words (`words[c-1]` has colour `c`).
pub fn interleavings(words: &[SimplicialWord]) -> Vec<ColouredShuffle> {
    let r = words.len();
    let src: Vec<usize> = words.iter().map(SimplicialWord::src).collect();
    let queues: Vec<&[BasicArrow]> = words.iter().map(|w| w.arrows()).collect();
    let total: usize = queues.iter().map(|q| q.len()).sum();
    let mut out = Vec::new();
    let mut taken = vec![0usize; r];
    let mut acc = Vec::with_capacity(total);
    fn go(
        queues: &[&[BasicArrow]],
        taken: &mut [usize],
        acc: &mut Vec<ColouredGenerator>,
        total: usize,
        src: &[usize],
        out: &mut Vec<ColouredShuffle>,
    ) {
        if acc.len() == total {
            out.push(ColouredShuffle::new(src.len(), src.to_vec(), acc.clone()).expect("interleaving is valid"));
            return;
        }
        for c in 0..queues.len() {
            if taken[c] < queues[c].len() {
                acc.push(ColouredGenerator::new(queues[c][taken[c]], c + 1));
                taken[c] += 1;
                go(queues, taken, acc, total, src, out);
                taken[c] -= 1;
                acc.pop();
            }
        }
    }
    go(&queues, &mut taken, &mut acc, total, &src, &mut out);
    out
}

/// Number of distinct colour patterns, keyed by the multiset of lengths.
pub fn interleaving_count(lengths: &[usize]) -> u128 {
    let mut memo = BTreeMap::new();
    fn go(left: Vec<usize>, memo: &mut BTreeMap<Vec<usize>, u128>) -> u128 {
        if left.iter().all(|&x| x == 0) {
            return 1;
        }
        if let Some(&v) = memo.get(&left) {
            return v;
        }
        let mut total = 0;
        for c in 0..left.len() {
            if left[c] > 0 {
                let mut next = left.clone();
                next[c] -= 1;
                total += go(next, memo);
            }
        }
        memo.insert(left, total);
        total
    }
    go(lengths.to_vec(), &mut memo)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn section4_example() -> ColouredShuffle {
        "(d3_2 @2) (d2_1 @1) (d3_1 @1) (s3_0 @2) (d3_1 @2)".parse().unwrap()
    }

    #[test]
    fn example_dimensions() {
        let t = section4_example();
        assert_eq!(t.src_dims(), &[3, 3]);
        assert_eq!(t.tgt_dims(), &[1, 2]);
        assert_eq!(t.colour_word(1).to_string(), "d2_1 . d3_1");
    }

    #[test]
    fn example_powers() {
        let t = section4_example();
        assert_eq!(t.inner_power(1), 3);
        assert_eq!(t.outer_power(0), 1);
        assert_eq!(t.inner_power(0), 1);
        assert_eq!(t.outer_power(1), 1);
        // (s3_0 @2) sees colour 1 at dimension 3
        assert_eq!(t.outer_power(3), 3);
    }

    #[test]
    fn three_colour_powers() {
        let t: ColouredShuffle = "(d2_2 @1) (s3_1 @3) (d3_1 @1) (d2_1 @2) (s2_1 @3)".parse().unwrap();
        assert_eq!(t.outer_power(4), 6);
        assert_eq!(t.inner_power(3), 2);
        assert_eq!(t.outer_power(3), 3);
        assert_eq!(t.inner_power(2), 2);
        assert_eq!(t.outer_power(1), 2);
        assert_eq!(t.inner_power(0), 3);
    }

    #[test]
    fn inversions() {
        assert_eq!(section4_example().inversion_count(), 4);
        assert_eq!(section4_example().sorted().inversion_count(), 0);
        let t: ColouredShuffle = "(d2_1 @1) (d2_1 @2) (d2_1 @3)".parse().unwrap();
        assert_eq!(t.inversion_count(), 3);
    }

    #[test]
    fn swaps_and_paths() {
        let t = section4_example();
        assert_eq!(t.next_swaps(), vec![2]);
        let p = t.canonical_path();
        assert_eq!(p.len(), 4);
        assert_eq!(p.shuffles().unwrap().last().unwrap(), &t.sorted());

        let two: ColouredShuffle = "(d2_1 @1) (d2_1 @2)".parse().unwrap();
        assert_eq!(two.next_swaps(), vec![0]);
        assert_eq!(two.enumerate_paths(10).paths.len(), 1);

        let three: ColouredShuffle = "(d2_1 @1) (d2_1 @2) (d2_1 @3)".parse().unwrap();
        let all = three.enumerate_paths(10);
        assert_eq!(all.paths.len(), 2);
        assert!(!all.truncated);
        let end = all.paths[0].shuffles().unwrap().pop().unwrap();
        assert_eq!(end.to_string(), "(d2_1 @3) (d2_1 @2) (d2_1 @1)");

        let sorted = t.sorted();
        assert_eq!(sorted.enumerate_paths(5).paths, vec![NormalizingPath { start: sorted.clone(), swaps: vec![] }]);
        assert!(three.enumerate_paths(1).truncated);
    }

    #[test]
    fn printed_path_is_a_normalizing_path() {
        let seq: Vec<ColouredShuffle> = [
            "(d3_2 @2) (d2_1 @1) (d3_1 @1) (s3_0 @2) (d3_1 @2)",
            "(d3_2 @2) (d2_1 @1) (s3_0 @2) (d3_1 @1) (d3_1 @2)",
            "(d3_2 @2) (d2_1 @1) (s3_0 @2) (d3_1 @2) (d3_1 @1)",
            "(d3_2 @2) (s3_0 @2) (d2_1 @1) (d3_1 @2) (d3_1 @1)",
            "(d3_2 @2) (s3_0 @2) (d3_1 @2) (d2_1 @1) (d3_1 @1)",
        ]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
        let path = NormalizingPath::from_shuffles(&seq).unwrap();
        assert_eq!(path.swaps, vec![2, 3, 1, 2]);
        assert!(section4_example().enumerate_paths(100).paths.contains(&path));
    }

    #[test]
    fn identity_entries_fix_dimensions() {
        let t: ColouredShuffle = "(d2_1 @1) (id3 @2)".parse().unwrap();
        assert_eq!(t.src_dims(), &[2, 3]);
        assert_eq!(t.len(), 1);
        assert!(matches!(
            "(d2_1 @1) (d2_1 @1)".parse::<ColouredShuffle>(),
            Err(Error::EndpointMismatch { .. })
        ));
    }

    #[test]
    fn round_trip() {
        let t = section4_example();
        assert_eq!(t.to_string().parse::<ColouredShuffle>().unwrap(), t);
        assert_eq!("(d2_1@1)(s3_0@2)".parse::<ColouredShuffle>().unwrap().len(), 2);
    }

    #[test]
    fn interleaving_counts() {
        let w = |s: &str| s.parse::<SimplicialWord>().unwrap();
        let got = interleavings(&[w("d2_1 . d3_1"), w("d3_2 . s3_0 . d3_1")]);
        assert_eq!(got.len() as u128, interleaving_count(&[2, 3]));
        assert_eq!(got.len(), 10);
        assert!(got.contains(&section4_example()));
    }
}

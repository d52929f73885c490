//! Coherence checks built on φ: swapping past equal words, the hexagon,
//! Segal reassembly, and equation witnesses in the free model.

use serde::{Deserialize, Serialize};

use super::{coords_of, flat_index, grids_equal, phi, swap_parameters, w_multi, w_multi_arrows, ArrowGrid, Grid, MultiArrow, ObjectGrid};
use crate::error::{Error, Result};
use crate::model::rewrite::RuleSet;
use crate::model::{FreeTermModel, NFoldModel, ObjWord, TermVerdict};
use crate::shuffle::{ColouredGenerator, ColouredShuffle, NormalizingPath};
use crate::simplicial::{equal, segal_arrow, BasicArrow, SimplicialWord};

/// Swap parameters: the colours exchanged and the `u, v, w` products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeParams {
    pub k: usize,
    pub l: usize,
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

/// The parameters of every swap along `path`, read off the intermediate
/// shuffles.
pub fn path_parameters(path: &NormalizingPath) -> Result<Vec<EdgeParams>> {
    let mut at = path.start.clone();
    let mut out = Vec::with_capacity(path.swaps.len());
    for &p in &path.swaps {
        let e = at.entries();
        if p + 1 >= e.len() {
            return Err(Error::NotANormalizingPath(format!("no swap at {p} in {at}")));
        }
        let (k, l) = (e[p].colour, e[p + 1].colour);
        let dims = at.dims_before(p + 1);
        let (u, v, w) = swap_parameters(&dims, k, l);
        out.push(EdgeParams { k, l, u, v, w });
        at = at.swap(p)?;
    }
    Ok(out)
}

/// `(f,a)(g,b)(h,c)` with `a < b < c`; the other colours keep their
/// `context` dimension.
pub fn hexagon_shuffle(context: &[usize], f: ColouredGenerator, g: ColouredGenerator, h: ColouredGenerator) -> Result<ColouredShuffle> {
    if !(f.colour < g.colour && g.colour < h.colour) {
        return Err(Error::ColourOrder { k: f.colour, l: g.colour.max(h.colour) });
    }
    if h.colour > context.len() {
        return Err(Error::IndexOutOfRange(format!("colour {} with r = {}", h.colour, context.len())));
    }
    let mut dims = context.to_vec();
    for e in [f, g, h] {
        dims[e.colour - 1] = e.arrow.src();
    }
    ColouredShuffle::new(context.len(), dims, vec![f, g, h])
}

const LEFT: [usize; 3] = [0, 1, 0];
const RIGHT: [usize; 3] = [1, 0, 1];

fn hexagon_parts(theta: &ColouredShuffle) -> Result<[ColouredGenerator; 3]> {
    match theta.entries() {
        &[f, g, h] if f.colour < g.colour && g.colour < h.colour => Ok([f, g, h]),
        _ => Err(Error::ShapeMismatch(format!("{theta} is not a hexagon shuffle"))),
    }
}

/// The swap parameters of the left and right paths round the hexagon, in
/// closed form from the source dimensions.
pub fn hexagon_edges(theta: &ColouredShuffle) -> Result<(Vec<EdgeParams>, Vec<EdgeParams>)> {
    let [f, g, h] = hexagon_parts(theta)?;
    let (a, b, c) = (f.colour, g.colour, h.colour);
    let dims = theta.src_dims();
    let prod = |lo: usize, hi: usize| -> usize { dims[lo..hi].iter().product() };
    let u = prod(0, a - 1);
    let v1 = prod(a, b - 1);
    let v2 = prod(b, c - 1);
    let w = prod(c, dims.len());
    let (n, n2) = (f.arrow.src(), f.arrow.tgt());
    let (m, m2) = (g.arrow.src(), g.arrow.tgt());
    let (p, p2) = (h.arrow.src(), h.arrow.tgt());
    let e = |k, l, u, v, w| EdgeParams { k, l, u, v, w };
    let left = vec![
        e(a, b, u, v1, v2 * p2 * w),
        e(a, c, u, v1 * m * v2, w),
        e(b, c, u * n2 * v1, v2, w),
    ];
    let right = vec![
        e(b, c, u * n * v1, v2, w),
        e(a, c, u, v1 * m2 * v2, w),
        e(a, b, u, v1, v2 * p * w),
    ];
    Ok((left, right))
}

/// Both sides of the hexagon at `x`.
pub fn hexagon_sides<M: NFoldModel>(model: &M, theta: &ColouredShuffle, x: &ObjectGrid<M>) -> Result<(ArrowGrid<M>, ArrowGrid<M>)> {
    hexagon_parts(theta)?;
    let left = NormalizingPath { start: theta.clone(), swaps: LEFT.to_vec() };
    let right = NormalizingPath { start: theta.clone(), swaps: RIGHT.to_vec() };
    Ok((phi(model, theta, x, Some(&left))?, phi(model, theta, x, Some(&right))?))
}

pub fn hexagon_check<M: NFoldModel>(model: &M, theta: &ColouredShuffle, x: &ObjectGrid<M>) -> Result<bool> {
    let (l, r) = hexagon_sides(model, theta, x)?;
    Ok(grids_equal(model, &l, &r))
}

/// The two shuffles moving `(g,l)` past `phi` and past `phi2`.
pub fn lemma_swap_shuffles(
    phi: &SimplicialWord,
    phi2: &SimplicialWord,
    k: usize,
    g: BasicArrow,
    l: usize,
    context: &[usize],
) -> Result<(ColouredShuffle, ColouredShuffle)> {
    if k == l {
        return Err(Error::ColourOrder { k, l });
    }
    if k.max(l) > context.len() || k.min(l) == 0 {
        return Err(Error::IndexOutOfRange(format!("colours {k}, {l} with r = {}", context.len())));
    }
    if phi.src() != phi2.src() || phi.tgt() != phi2.tgt() {
        return Err(crate::error::mismatch(format!("{} → {}", phi.src(), phi.tgt()), format!("{} → {}", phi2.src(), phi2.tgt())));
    }
    let mut dims = context.to_vec();
    dims[k - 1] = phi.src();
    dims[l - 1] = g.src();
    let build = |word: &SimplicialWord| {
        let mut entries: Vec<ColouredGenerator> = word
            .arrows()
            .iter()
            .filter(|a| !a.is_identity())
            .map(|&a| ColouredGenerator::new(a, k))
            .collect();
        let moving = ColouredGenerator::new(g, l);
        if k < l {
            entries.push(moving);
        } else {
            entries.insert(0, moving);
        }
        ColouredShuffle::new(context.len(), dims.clone(), entries)
    };
    Ok((build(phi)?, build(phi2)?))
}

/// φ agrees on the two shuffles of [`lemma_swap_shuffles`]. The words must
/// be equal arrows of Δ^op.
#[allow(clippy::too_many_arguments)]
pub fn lemma_swap_check<M: NFoldModel>(
    model: &M,
    phi1: &SimplicialWord,
    phi2: &SimplicialWord,
    k: usize,
    g: BasicArrow,
    l: usize,
    context: &[usize],
    x: &ObjectGrid<M>,
) -> Result<bool> {
    if !equal(phi1, phi2)? {
        return Err(Error::NotEqualArrows);
    }
    let (a, b) = lemma_swap_shuffles(phi1, phi2, k, g, l, context)?;
    Ok(grids_equal(model, &phi(model, &a, x, None)?, &phi(model, &b, x, None)?))
}

/// Stacks `pieces[t]`, each with colour `c` of size 1, at coordinate `t`.
fn reassemble<T: Clone>(dims: &[usize], c: usize, pieces: Vec<Vec<T>>) -> Vec<T> {
    let mut one = dims.to_vec();
    one[c - 1] = 1;
    (0..dims.iter().product())
        .map(|idx| {
            let mut p = coords_of(dims, idx);
            let t = std::mem::replace(&mut p[c - 1], 0);
            pieces[t][flat_index(&one, &p)].clone()
        })
        .collect()
}

/// Splitting colour `c` of `x` along the `m` Segal maps and stacking the
/// pieces back gives `x` again, on objects and on each of `arrows`.
pub fn segal_check<M: NFoldModel>(
    model: &M,
    c: usize,
    x: &ObjectGrid<M>,
    arrows: &[ArrowGrid<M>],
) -> Result<bool> {
    let dims = x.dims().to_vec();
    if c == 0 || c > dims.len() {
        return Err(Error::IndexOutOfRange(format!("colour {c} with r = {}", dims.len())));
    }
    let m = dims[c - 1];
    let maps = (1..=m)
        .map(|t| Ok(MultiArrow::single(&dims, c, segal_arrow(m, t)?)))
        .collect::<Result<Vec<_>>>()?;
    let objs = maps.iter().map(|f| Ok(w_multi(model, f, x)?.into_cells())).collect::<Result<Vec<_>>>()?;
    if m > 0 && reassemble(&dims, c, objs) != x.cells() {
        return Ok(false);
    }
    for a in arrows {
        if a.dims() != dims.as_slice() {
            return Err(crate::error::mismatch(format!("{dims:?}"), format!("{:?}", a.dims())));
        }
        let parts = maps.iter().map(|f| Ok(w_multi_arrows(model, f, a)?.into_cells())).collect::<Result<Vec<_>>>()?;
        if m > 0 && !reassemble(&dims, c, parts).iter().zip(a.cells()).all(|(p, q)| model.arrow_eq(p, q)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// What justifies the equality of one component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessKind {
    SyntacticEqual,
    /// Equation numbers used by the shortest proof found, sorted.
    Equation(Vec<usize>),
    Unknown,
    Refuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentWitness {
    pub index: usize,
    pub kind: WitnessKind,
}

const WITNESS_DEPTH: usize = 2;

/// A grid of distinct variables `x0, x1, …`.
pub fn variable_grid(dims: &[usize]) -> Grid<ObjWord> {
    Grid::from_fn(dims.to_vec(), |i| ObjWord::var(&format!("x{i}")))
}

/// Witnesses for every component where `a` and `b` differ syntactically.
pub fn equation_witness(r: usize, a: &ArrowGrid<FreeTermModel>, b: &ArrowGrid<FreeTermModel>) -> Result<Vec<ComponentWitness>> {
    if a.dims() != b.dims() {
        return Err(crate::error::mismatch(format!("{:?}", a.dims()), format!("{:?}", b.dims())));
    }
    let rules = RuleSet::new(r);
    let mut out = Vec::new();
    for (index, (p, q)) in a.cells().iter().zip(b.cells()).enumerate() {
        if p.canonical() == q.canonical() {
            continue;
        }
        let kind = match crate::model::rewrite::term_equal_with(&rules, r, p, q, WITNESS_DEPTH)? {
            TermVerdict::Proven(steps) => {
                let mut eqs: Vec<usize> = steps.iter().map(|s| s.equation).collect();
                eqs.sort_unstable();
                eqs.dedup();
                if eqs.is_empty() {
                    WitnessKind::SyntacticEqual
                } else {
                    WitnessKind::Equation(eqs)
                }
            }
            TermVerdict::Refuted { .. } => WitnessKind::Refuted,
            TermVerdict::Unknown => WitnessKind::Unknown,
        };
        out.push(ComponentWitness { index, kind });
    }
    Ok(out)
}

/// The free-model witnesses for the two sides of the hexagon.
pub fn hexagon_witness(theta: &ColouredShuffle) -> Result<Vec<ComponentWitness>> {
    let free = FreeTermModel::new(theta.r());
    let (l, r) = hexagon_sides(&free, theta, &variable_grid(theta.src_dims()))?;
    equation_witness(theta.r(), &l, &r)
}

/// The free-model witnesses for swapping past two equal words.
pub fn lemma_swap_witness(
    phi1: &SimplicialWord,
    phi2: &SimplicialWord,
    k: usize,
    g: BasicArrow,
    l: usize,
    context: &[usize],
) -> Result<Vec<ComponentWitness>> {
    if !equal(phi1, phi2)? {
        return Err(Error::NotEqualArrows);
    }
    let (a, b) = lemma_swap_shuffles(phi1, phi2, k, g, l, context)?;
    let free = FreeTermModel::new(context.len());
    let x = variable_grid(a.src_dims());
    equation_witness(context.len(), &phi(&free, &a, &x, None)?, &phi(&free, &b, &x, None)?)
}

/// The witness equation expected for a hexagon, by the kinds of its three
/// generators: degeneracies and inner faces.
pub fn hexagon_equation(theta: &ColouredShuffle) -> Result<Option<usize>> {
    let parts = hexagon_parts(theta)?;
    let mut code = 0;
    for e in parts {
        code <<= 1;
        match e.arrow {
            BasicArrow::Degeneracy { .. } => {}
            a if a.is_inner_face() => code |= 1,
            _ => return Ok(None),
        }
    }
    Ok(Some(13 + code))
}

//! The r-fold reduced bar construction over a model.
//!
//! A grid holds one model object (or arrow) per point of
//! `n_1 × … × n_r`, in lexicographic order with colour 1 slowest. A basic
//! arrow of colour `k` acts blockwise: the grid is viewed as
//! `outer × n_k × inner` and the `n_k` slices of length `inner` are
//! dropped, merged with `⊗_k` or padded with `I_k`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::model::NFoldModel;
use crate::shuffle::{ColouredGenerator, ColouredShuffle};
use crate::simplicial::{compose, normalize, BasicArrow, SimplicialWord};

pub mod checks;
pub mod phi;

pub use checks::{
    equation_witness, hexagon_check, hexagon_edges, hexagon_equation, hexagon_shuffle, hexagon_sides,
    hexagon_witness, lemma_swap_check, lemma_swap_shuffles, lemma_swap_witness, path_parameters, segal_check,
    variable_grid, ComponentWitness, EdgeParams, WitnessKind,
};
pub use phi::{lax_check, omega, phi, phi_all_paths, phi_all_paths_within, swap_parameters, swap_step, LaxReport};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid<T> {
    dims: Vec<usize>,
    cells: Vec<T>,
}

pub type ObjectGrid<M> = Grid<<M as NFoldModel>::Obj>;
pub type ArrowGrid<M> = Grid<<M as NFoldModel>::Arrow>;

impl<T> Grid<T> {
    pub fn new(dims: Vec<usize>, cells: Vec<T>) -> Result<Self> {
        let want: usize = dims.iter().product();
        if want != cells.len() {
            return Err(Error::ShapeMismatch(format!("{} cells for dims {dims:?}", cells.len())));
        }
        Ok(Grid { dims, cells })
    }

    pub fn from_fn(dims: Vec<usize>, f: impl FnMut(usize) -> T) -> Self {
        let n = dims.iter().product();
        Grid { dims, cells: (0..n).map(f).collect() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn cells(&self) -> &[T] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<T> {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid { dims: self.dims.clone(), cells: self.cells.iter().map(f).collect() }
    }

    /// Flat index of a coordinate tuple.
    pub fn index_of(&self, coords: &[usize]) -> usize {
        flat_index(&self.dims, coords)
    }
}

pub(crate) fn flat_index(dims: &[usize], coords: &[usize]) -> usize {
    dims.iter().zip(coords).fold(0, |acc, (&d, &c)| acc * d + c)
}

pub(crate) fn coords_of(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    out
}

impl<T: fmt::Display> fmt::Display for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.cells.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// How cells are merged and padded; objects and arrows differ only here.
pub(crate) trait CellOps {
    type Cell: Clone;
    fn merge(&self, k: usize, a: &Self::Cell, b: &Self::Cell) -> Self::Cell;
    fn unit(&self, k: usize) -> Self::Cell;
}

pub(crate) struct Objects<'a, M>(pub &'a M);
pub(crate) struct Arrows<'a, M>(pub &'a M);

impl<M: NFoldModel> CellOps for Objects<'_, M> {
    type Cell = M::Obj;
    fn merge(&self, k: usize, a: &M::Obj, b: &M::Obj) -> M::Obj {
        self.0.tensor_obj(k, a, b)
    }
    fn unit(&self, k: usize) -> M::Obj {
        self.0.unit(k)
    }
}

impl<M: NFoldModel> CellOps for Arrows<'_, M> {
    type Cell = M::Arrow;
    fn merge(&self, k: usize, a: &M::Arrow, b: &M::Arrow) -> M::Arrow {
        self.0.tensor_arrow(k, a, b)
    }
    fn unit(&self, k: usize) -> M::Arrow {
        self.0.id(&self.0.unit(k))
    }
}

fn apply_block<O: CellOps>(
    ops: &O,
    k: usize,
    f: BasicArrow,
    inner: usize,
    outer: usize,
    cells: &[O::Cell],
) -> Result<Vec<O::Cell>> {
    let n = f.src();
    if cells.len() != outer * n * inner {
        return Err(Error::ShapeMismatch(format!(
            "{} cells for {f} with inner {inner}, outer {outer}",
            cells.len()
        )));
    }
    let mut out = Vec::with_capacity(outer * f.tgt() * inner);
    for o in 0..outer {
        let block = &cells[o * n * inner..(o + 1) * n * inner];
        let slice = |j: usize| &block[j * inner..(j + 1) * inner];
        match f {
            BasicArrow::Identity { .. } => out.extend_from_slice(block),
            BasicArrow::Face { idx: 0, .. } => (1..n).for_each(|j| out.extend_from_slice(slice(j))),
            BasicArrow::Face { idx, .. } if idx == n => (0..n - 1).for_each(|j| out.extend_from_slice(slice(j))),
            BasicArrow::Face { idx, .. } => {
                (0..idx - 1).for_each(|j| out.extend_from_slice(slice(j)));
                out.extend(slice(idx - 1).iter().zip(slice(idx)).map(|(a, b)| ops.merge(k, a, b)));
                (idx + 1..n).for_each(|j| out.extend_from_slice(slice(j)));
            }
            BasicArrow::Degeneracy { idx, .. } => {
                (0..idx).for_each(|j| out.extend_from_slice(slice(j)));
                out.extend((0..inner).map(|_| ops.unit(k)));
                (idx..n).for_each(|j| out.extend_from_slice(slice(j)));
            }
        }
    }
    Ok(out)
}

/// Applies one coloured generator to a grid.
pub(crate) fn apply_generator<O: CellOps>(ops: &O, e: ColouredGenerator, grid: Grid<O::Cell>) -> Result<Grid<O::Cell>> {
    apply_generator_to(ops, e, &grid)
}

pub(crate) fn apply_generator_to<O: CellOps>(ops: &O, e: ColouredGenerator, grid: &Grid<O::Cell>) -> Result<Grid<O::Cell>> {
    let k = e.colour;
    if k == 0 || k > grid.dims.len() {
        return Err(Error::IndexOutOfRange(format!("colour {k} on a grid of arity {}", grid.dims.len())));
    }
    if grid.dims[k - 1] != e.arrow.src() {
        return Err(mismatch(format!("dimension {} in colour {k}", e.arrow.src()), format!("{:?}", grid.dims)));
    }
    let outer = grid.dims[..k - 1].iter().product();
    let inner = grid.dims[k..].iter().product();
    let cells = apply_block(ops, k, e.arrow, inner, outer, &grid.cells)?;
    let mut dims = grid.dims.clone();
    dims[k - 1] = e.arrow.tgt();
    Ok(Grid { dims, cells })
}

/// Applies `entries` (outermost-left) right to left.
pub(crate) fn apply_entries<O: CellOps>(
    ops: &O,
    entries: &[ColouredGenerator],
    grid: Grid<O::Cell>,
) -> Result<Grid<O::Cell>> {
    entries.iter().rev().try_fold(grid, |g, &e| apply_generator(ops, e, g))
}

/// `W_k^i(f)^o` on a flat object list of length `o · src(f) · i`.
pub fn w_basic<M: NFoldModel>(
    model: &M,
    k: usize,
    f: BasicArrow,
    inner: usize,
    outer: usize,
    input: &[M::Obj],
) -> Result<Vec<M::Obj>> {
    apply_block(&Objects(model), k, f, inner, outer, input)
}

/// The same on arrows.
pub fn w_basic_arrows<M: NFoldModel>(
    model: &M,
    k: usize,
    f: BasicArrow,
    inner: usize,
    outer: usize,
    input: &[M::Arrow],
) -> Result<Vec<M::Arrow>> {
    apply_block(&Arrows(model), k, f, inner, outer, input)
}

pub(crate) fn check_source(theta: &ColouredShuffle, dims: &[usize]) -> Result<()> {
    if theta.src_dims() != dims {
        return Err(Error::ShapeMismatch(format!(
            "shuffle {theta} expects dims {:?}, grid has {dims:?}",
            theta.src_dims()
        )));
    }
    Ok(())
}

/// `W_Θ` on objects.
pub fn w_shuffle<M: NFoldModel>(model: &M, theta: &ColouredShuffle, input: &ObjectGrid<M>) -> Result<ObjectGrid<M>> {
    check_source(theta, &input.dims)?;
    apply_entries(&Objects(model), theta.entries(), input.clone())
}

/// `W_Θ` on arrows.
pub fn w_shuffle_arrows<M: NFoldModel>(
    model: &M,
    theta: &ColouredShuffle,
    input: &ArrowGrid<M>,
) -> Result<ArrowGrid<M>> {
    check_source(theta, &input.dims)?;
    apply_entries(&Arrows(model), theta.entries(), input.clone())
}

pub fn identity_grid<M: NFoldModel>(model: &M, x: &ObjectGrid<M>) -> ArrowGrid<M> {
    x.map(|o| model.id(o))
}

pub fn grid_dom<M: NFoldModel>(model: &M, f: &ArrowGrid<M>) -> ObjectGrid<M> {
    f.map(|a| model.dom(a))
}

pub fn grid_cod<M: NFoldModel>(model: &M, f: &ArrowGrid<M>) -> ObjectGrid<M> {
    f.map(|a| model.cod(a))
}

/// Cellwise `f ∘ g`.
pub fn compose_grids<M: NFoldModel>(model: &M, f: &ArrowGrid<M>, g: &ArrowGrid<M>) -> Result<ArrowGrid<M>> {
    if f.dims != g.dims {
        return Err(Error::ShapeMismatch(format!("composing grids {:?} and {:?}", f.dims, g.dims)));
    }
    let cells = f
        .cells
        .iter()
        .zip(&g.cells)
        .map(|(a, b)| model.compose(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(Grid { dims: f.dims.clone(), cells })
}

/// Exact equality of arrow grids as the model compares arrows.
pub fn grids_equal<M: NFoldModel>(model: &M, a: &ArrowGrid<M>, b: &ArrowGrid<M>) -> bool {
    a.dims == b.dims && a.cells.iter().zip(&b.cells).all(|(x, y)| model.arrow_eq(x, y))
}

/// An arrow of `(Δ^op)^r`: one word per colour.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiArrow {
    components: Vec<SimplicialWord>,
}

impl MultiArrow {
    pub fn new(components: Vec<SimplicialWord>) -> Self {
        MultiArrow { components }
    }

    pub fn identity(dims: &[usize]) -> Self {
        MultiArrow { components: dims.iter().map(|&n| SimplicialWord::identity(n)).collect() }
    }

    /// Identities at `dims` except for `word` in colour `c`.
    pub fn single(dims: &[usize], c: usize, word: SimplicialWord) -> Self {
        let mut out = Self::identity(dims);
        out.components[c - 1] = word;
        out
    }

    pub fn r(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[SimplicialWord] {
        &self.components
    }

    pub fn src(&self) -> Vec<usize> {
        self.components.iter().map(SimplicialWord::src).collect()
    }

    pub fn tgt(&self) -> Vec<usize> {
        self.components.iter().map(SimplicialWord::tgt).collect()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &MultiArrow) -> Result<MultiArrow> {
        if self.r() != first.r() {
            return Err(Error::ArityMismatch(format!("{} and {} colours", self.r(), first.r())));
        }
        let components = self
            .components
            .iter()
            .zip(&first.components)
            .map(|(a, b)| compose(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiArrow { components })
    }

    pub fn normalized(&self) -> MultiArrow {
        MultiArrow { components: self.components.iter().map(normalize).collect() }
    }

    /// The sorted shuffle `Φ^r … Φ^1` of the components as given.
    pub fn shuffle(&self) -> ColouredShuffle {
        ColouredShuffle::sorted_from_words(&self.components).expect("components are composable words")
    }
}

impl fmt::Display for MultiArrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `W(f)` on objects.
pub fn w_multi<M: NFoldModel>(model: &M, f: &MultiArrow, x: &ObjectGrid<M>) -> Result<ObjectGrid<M>> {
    w_shuffle(model, &f.shuffle(), x)
}

/// `W(f)` on arrows.
pub fn w_multi_arrows<M: NFoldModel>(model: &M, f: &MultiArrow, x: &ArrowGrid<M>) -> Result<ArrowGrid<M>> {
    w_shuffle_arrows(model, &f.shuffle(), x)
}

/// Largest object met while applying `Θ` to `x`, one generator at a time.
pub fn shuffle_peak<M: NFoldModel<Obj = usize>>(model: &M, theta: &ColouredShuffle, x: &ObjectGrid<M>) -> Result<usize> {
    check_source(theta, &x.dims)?;
    let mut grid = x.clone();
    let mut peak = grid.cells.iter().copied().max().unwrap_or(0);
    for &e in theta.entries().iter().rev() {
        grid = apply_generator(&Objects(model), e, grid)?;
        peak = peak.max(grid.cells.iter().copied().max().unwrap_or(0));
    }
    Ok(peak)
}

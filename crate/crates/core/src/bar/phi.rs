//! φ along normalizing paths, ω, and the lax-functor diagram.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::{
    apply_entries, apply_generator_to, check_source, compose_grids, coords_of, flat_index, grids_equal, identity_grid, w_multi, w_multi_arrows,
    w_shuffle, ArrowGrid, Arrows, Grid, MultiArrow, ObjectGrid, Objects,
};
use crate::chi::{chi_shared, SchemaEntry, StructKind};
use crate::error::{mismatch, Error, Result};
use crate::model::NFoldModel;
use crate::shuffle::{ColouredShuffle, NormalizingPath};
use crate::simplicial::SimplicialWord;

/// Products of the dimensions below `k`, strictly between `k` and `l`, and
/// above `l`.
pub fn swap_parameters(dims: &[usize], k: usize, l: usize) -> (usize, usize, usize) {
    let u = dims[..k - 1].iter().product();
    let v = dims[k..l - 1].iter().product();
    let w = dims[l..].iter().product();
    (u, v, w)
}

/// `W_Π χ W_Λ` for the swap at `pos` of `at = Π (f,k)(g,l) Λ`, as a grid
/// from `W_{at}(x)` to `W_{at'}(x)`.
pub fn swap_step<M: NFoldModel>(model: &M, at: &ColouredShuffle, pos: usize, x: &ObjectGrid<M>) -> Result<ArrowGrid<M>> {
    let entries = at.entries();
    if pos + 1 >= entries.len() || entries[pos].colour >= entries[pos + 1].colour {
        return Err(Error::NotANormalizingPath(format!("no admissible swap at {pos} in {at}")));
    }
    let (f, g) = (entries[pos], entries[pos + 1]);
    let y = apply_entries(&Objects(model), &entries[pos + 2..], x.clone())?;
    let before = apply_entries(&Objects(model), &[f, g], y.clone())?;
    let after = apply_entries(&Objects(model), &[g, f], y.clone())?;
    swap_step_at(model, at, pos, &y, &before, &after)
}

/// `W(entries[j..])(x)` for every `j`, the last being `x` itself. The
/// suffixes from `keep` on are already known and given as `tail`.
fn suffix_objects<M: NFoldModel>(
    model: &M,
    at: &ColouredShuffle,
    tail: &[Rc<ObjectGrid<M>>],
    keep: usize,
) -> Result<Vec<Rc<ObjectGrid<M>>>> {
    let entries = at.entries();
    let mut out = tail.to_vec();
    for &e in entries[..keep].iter().rev() {
        let next = apply_generator_to(&Objects(model), e, out.first().expect("non-empty"))?;
        out.insert(0, Rc::new(next));
    }
    Ok(out)
}

/// The swap at `pos` given `y = W(entries[pos+2..])(x)` and its images
/// under the two entries before and after the swap.
fn swap_step_at<M: NFoldModel>(
    model: &M,
    at: &ColouredShuffle,
    pos: usize,
    y: &ObjectGrid<M>,
    before: &ObjectGrid<M>,
    after: &ObjectGrid<M>,
) -> Result<ArrowGrid<M>> {
    let entries = at.entries();
    let (f, g) = (entries[pos], entries[pos + 1]);
    let (k, l) = (f.colour, g.colour);
    let (u, v, w) = swap_parameters(y.dims(), k, l);
    let tuple = chi_shared(k, l, u, v, w, f.arrow, g.arrow)?;
    if tuple.len() != before.len() {
        return Err(Error::ShapeMismatch(format!("χ tuple of length {} for {} cells", tuple.len(), before.len())));
    }
    let (n, m) = (f.arrow.src(), g.arrow.src());
    let (n2, m2) = (f.arrow.tgt(), g.arrow.tgt());
    let site_dims = [u, n2, v, m2, w];
    let y_dims = [u, n, v, m, w];
    let mut cells = Vec::with_capacity(before.len());
    for (idx, entry) in tuple.entries.iter().enumerate() {
        let (d, c) = (&before.cells()[idx], &after.cells()[idx]);
        let cell = match entry {
            SchemaEntry::Hole => {
                if d != c {
                    return Err(mismatch(format!("{c:?}"), format!("{d:?}")));
                }
                model.id(d)
            }
            SchemaEntry::Const { kind, .. } => {
                let arrow = match kind {
                    StructKind::Iota => {
                        let p = coords_of(&site_dims, idx);
                        let at = |dr: usize, dc: usize| {
                            y.cells()[flat_index(&y_dims, &[p[0], p[1] + dr, p[2], p[3] + dc, p[4]])].clone()
                        };
                        model.iota(k, l, &at(0, 0), &at(0, 1), &at(1, 0), &at(1, 1))?
                    }
                    other => model.structural(*other, k, l, &[])?,
                };
                if &model.dom(&arrow) != d || &model.cod(&arrow) != c {
                    return Err(mismatch(format!("{d:?} → {c:?}"), format!("{kind} with {:?}", model.dom(&arrow))));
                }
                arrow
            }
        };
        cells.push(cell);
    }
    let chi = Grid::new(before.dims().to_vec(), cells)?;
    apply_entries(&Arrows(model), &entries[..pos], chi)
}

/// φ_Θ along `path`, by default the canonical one.
pub fn phi<M: NFoldModel>(
    model: &M,
    theta: &ColouredShuffle,
    x: &ObjectGrid<M>,
    path: Option<&NormalizingPath>,
) -> Result<ArrowGrid<M>> {
    let canonical;
    let path = match path {
        Some(p) => p,
        None => {
            canonical = theta.canonical_path();
            &canonical
        }
    };
    if &path.start != theta {
        return Err(Error::NotANormalizingPath(format!("path starts at {}, not {theta}", path.start)));
    }
    let mut acc = identity_grid(model, &w_shuffle(model, theta, x)?);
    let mut at = theta.clone();
    for &p in &path.swaps {
        let step = swap_step(model, &at, p, x)?;
        acc = compose_grids(model, &step, &acc)?;
        at = at.swap(p)?;
    }
    if !at.is_sorted() {
        return Err(Error::NotANormalizingPath(format!("path ends at unsorted {at}")));
    }
    Ok(acc)
}

/// The distinct results of φ over every normalizing path. Paths are
/// merged at shared intermediate shuffles, so the work is bounded by the
/// number of reachable shuffles rather than the number of paths.
pub fn phi_all_paths<M: NFoldModel>(model: &M, theta: &ColouredShuffle, x: &ObjectGrid<M>) -> Result<Vec<ArrowGrid<M>>> {
    Ok(phi_all_paths_within(model, theta, x, |_| true)?.expect("every grid admitted"))
}

/// [`phi_all_paths`], giving up with `None` as soon as an intermediate
/// object grid fails `admit`.
pub fn phi_all_paths_within<M: NFoldModel>(
    model: &M,
    theta: &ColouredShuffle,
    x: &ObjectGrid<M>,
    admit: impl Fn(&ObjectGrid<M>) -> bool,
) -> Result<Option<Vec<ArrowGrid<M>>>> {
    check_source(theta, x.dims())?;
    struct State<M: NFoldModel> {
        at: ColouredShuffle,
        suffixes: Vec<Rc<ObjectGrid<M>>>,
        accs: Vec<ArrowGrid<M>>,
    }
    // Every object met on the way into a state is checked before any step
    // into it is built.
    let enter = |at: ColouredShuffle, tail: &[Rc<ObjectGrid<M>>], keep: usize| -> Result<Option<State<M>>> {
        let suffixes = suffix_objects(model, &at, tail, keep)?;
        Ok(suffixes[..keep].iter().all(|g| admit(g)).then_some(State { at, suffixes, accs: Vec::new() }))
    };
    let origin = [Rc::new(x.clone())];
    if !admit(x) {
        return Ok(None);
    }
    let Some(mut first) = enter(theta.clone(), &origin, theta.len())? else { return Ok(None) };
    first.accs.push(identity_grid(model, &first.suffixes[0]));
    // Within-colour order never changes, so the colour sequence names a state.
    let code = |t: &ColouredShuffle| t.entries().iter().map(|e| e.colour).collect::<Vec<usize>>();
    let mut layer: BTreeMap<Vec<usize>, State<M>> = BTreeMap::from([(code(theta), first)]);
    for _ in 0..theta.inversion_count() {
        let mut next: BTreeMap<Vec<usize>, State<M>> = BTreeMap::new();
        for state in layer.into_values() {
            for p in state.at.next_swaps() {
                let to = state.at.swap(p)?;
                let slot = match next.entry(code(&to)) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => match enter(to, &state.suffixes[p + 2..], p + 2)? {
                        Some(s) => e.insert(s),
                        None => return Ok(None),
                    },
                };
                let s = &state.suffixes;
                let step = swap_step_at(model, &state.at, p, &s[p + 2], &s[p], &slot.suffixes[p])?;
                for acc in &state.accs {
                    let g = compose_grids(model, &step, acc)?;
                    if !slot.accs.contains(&g) {
                        slot.accs.push(g);
                    }
                }
            }
        }
        layer = next;
    }
    // Merge results the model considers equal.
    let mut distinct: Vec<ArrowGrid<M>> = Vec::new();
    for g in layer.into_values().flat_map(|s| s.accs) {
        if !distinct.iter().any(|d| grids_equal(model, d, &g)) {
            distinct.push(g);
        }
    }
    Ok(Some(distinct))
}

fn sorted_nf(f: &MultiArrow) -> ColouredShuffle {
    f.normalized().shuffle()
}

/// ω for `second ∘ first` at `x`: φ of the normal-form shuffle of `second`
/// placed after that of `first`.
pub fn omega<M: NFoldModel>(
    model: &M,
    first: &MultiArrow,
    second: &MultiArrow,
    x: &ObjectGrid<M>,
) -> Result<ArrowGrid<M>> {
    if second.src() != first.tgt() {
        return Err(mismatch(format!("{:?}", first.tgt()), format!("{:?}", second.src())));
    }
    let theta = sorted_nf(second).then_after(&sorted_nf(first))?;
    phi(model, &theta, x, None)
}

/// Colourwise concatenation `outer ∘ inner` of normal forms, not normalized.
fn concat_nf(outer: &MultiArrow, inner: &MultiArrow) -> Result<ColouredShuffle> {
    let words = outer
        .normalized()
        .components()
        .iter()
        .zip(inner.normalized().components())
        .map(|(a, b)| crate::simplicial::compose(a, b))
        .collect::<Result<Vec<SimplicialWord>>>()?;
    Ok(MultiArrow::new(words).shuffle())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaxReport {
    /// The two composites of the associativity square agree.
    pub diagram: bool,
    /// φ of the concatenated `f3, f2` normal forms after `f1` equals φ with
    /// `(f3 ∘ f2)` normalized.
    pub first_pair: bool,
    /// The same for `f2, f1` under `f3`.
    pub second_pair: bool,
}

impl LaxReport {
    pub fn holds(&self) -> bool {
        self.diagram && self.first_pair && self.second_pair
    }
}

/// Both composites `W(f3)W(f2)W(f1) ⇒ W(f3 f2 f1)` and the two
/// intermediate φ identities.
pub fn lax_check<M: NFoldModel>(
    model: &M,
    f1: &MultiArrow,
    f2: &MultiArrow,
    f3: &MultiArrow,
    x: &ObjectGrid<M>,
) -> Result<LaxReport> {
    let f32 = f3.after(f2)?;
    let f21 = f2.after(f1)?;
    let w1x = w_multi(model, f1, x)?;
    let lhs = compose_grids(model, &omega(model, f1, &f32, x)?, &omega(model, f2, f3, &w1x)?)?;
    let rhs = compose_grids(
        model,
        &omega(model, &f21, f3, x)?,
        &w_multi_arrows(model, f3, &omega(model, f1, f2, x)?)?,
    )?;
    let diagram = grids_equal(model, &lhs, &rhs);

    let nf1 = sorted_nf(f1);
    let left = concat_nf(f3, f2)?.then_after(&nf1)?;
    let right = sorted_nf(&f32).then_after(&nf1)?;
    let first_pair = grids_equal(model, &phi(model, &left, x, None)?, &phi(model, &right, x, None)?);

    let nf3 = sorted_nf(f3);
    let left = nf3.then_after(&concat_nf(f2, f1)?)?;
    let right = nf3.then_after(&sorted_nf(&f21))?;
    let second_pair = grids_equal(model, &phi(model, &left, x, None)?, &phi(model, &right, x, None)?);

    Ok(LaxReport { diagram, first_pair, second_pair })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::grid_dom;
    use crate::model::{FinSetSplit, FreeTermModel, ObjWord, StructuralTerm};
    use crate::simplicial::BasicArrow;

    fn section4() -> ColouredShuffle {
        "(d3_2 @2) (d2_1 @1) (d3_1 @1) (s3_0 @2) (d3_1 @2)".parse().unwrap()
    }

    fn var_grid(dims: &[usize]) -> Grid<ObjWord> {
        Grid::from_fn(dims.to_vec(), |i| ObjWord::var(&format!("x{i}")))
    }

    #[test]
    fn sorted_shuffle_gives_identity() {
        let m = FinSetSplit::new(2, 1).unwrap();
        let theta: ColouredShuffle = "(d3_2 @2) (d2_1 @1)".parse().unwrap();
        let x = Grid::from_fn(vec![2, 3], |i| i % 3);
        let got = phi(&m, &theta, &x, None).unwrap();
        assert_eq!(got, identity_grid(&m, &w_shuffle(&m, &theta, &x).unwrap()));
    }

    #[test]
    fn single_swap_is_the_chi_tuple() {
        // (s2_0 @1)(s2_1 @2) at dims (1,1): κ at row 0, col 1 of the 2×2 grid
        let theta: ColouredShuffle = "(s2_0 @1) (s2_1 @2)".parse().unwrap();
        let free = FreeTermModel::new(2);
        let x = var_grid(&[1, 1]);
        let got = phi(&free, &theta, &x, None).unwrap();
        let kappa_at: Vec<usize> = got
            .cells()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_identity())
            .map(|(i, _)| i)
            .collect();
        assert_eq!(kappa_at, vec![1]);
        assert!(free.arrow_eq(&got.cells()[1], &StructuralTerm::kappa(1, 2)));
    }

    #[test]
    fn printed_path_agrees_with_every_path() {
        let m = FinSetSplit::new(2, 1).unwrap();
        let theta = section4();
        let x = Grid::from_fn(vec![3, 3], |_| 1usize);
        let a = phi(&m, &theta, &x, None).unwrap();
        let all = phi_all_paths(&m, &theta, &x).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], a);
        for p in theta.enumerate_paths(100).paths {
            assert_eq!(phi(&m, &theta, &x, Some(&p)).unwrap(), a);
        }
        assert_eq!(grid_dom(&m, &a), w_shuffle(&m, &theta, &x).unwrap());
    }

    #[test]
    fn bad_paths_are_rejected() {
        let m = FinSetSplit::new(2, 1).unwrap();
        let theta = section4();
        let x = Grid::from_fn(vec![3, 3], |_| 1usize);
        let short = NormalizingPath { start: theta.clone(), swaps: vec![2] };
        assert!(matches!(phi(&m, &theta, &x, Some(&short)), Err(Error::NotANormalizingPath(_))));
        let wrong = NormalizingPath { start: theta.clone(), swaps: vec![0] };
        assert!(matches!(phi(&m, &theta, &x, Some(&wrong)), Err(Error::NotANormalizingPath(_))));
    }

    #[test]
    fn omega_of_identities_is_identity() {
        let m = FinSetSplit::new(2, 1).unwrap();
        let id = MultiArrow::identity(&[2, 2]);
        let x = Grid::from_fn(vec![2, 2], |i| i);
        assert_eq!(omega(&m, &id, &id, &x).unwrap(), identity_grid(&m, &x));
        let bad = MultiArrow::identity(&[1, 2]);
        assert!(matches!(omega(&m, &id, &bad, &x), Err(Error::EndpointMismatch { .. })));
    }

    #[test]
    fn omega_single_swaps_follow_the_table() {
        // a degeneracy in colour 2 followed by one in colour 1 gives κ
        let free = FreeTermModel::new(2);
        let first = MultiArrow::new(vec![SimplicialWord::identity(0), SimplicialWord::single(BasicArrow::s(1, 0))]);
        let second = MultiArrow::new(vec![SimplicialWord::single(BasicArrow::s(1, 0)), SimplicialWord::identity(1)]);
        let x = Grid::new(vec![0, 0], vec![]).unwrap();
        let got = omega(&free, &first, &second, &x).unwrap();
        assert!(free.arrow_eq(&got.cells()[0], &StructuralTerm::kappa(1, 2)));
        // s3_1 in colour 2, then d2_1 in colour 1: τ at (0, 1)
        let first = MultiArrow::new(vec![SimplicialWord::identity(2), SimplicialWord::single(BasicArrow::s(3, 1))]);
        let second = MultiArrow::new(vec![SimplicialWord::single(BasicArrow::d(2, 1)), SimplicialWord::identity(3)]);
        let x = var_grid(&[2, 2]);
        let got = omega(&free, &first, &second, &x).unwrap();
        assert_eq!(got.dims(), &[1, 3]);
        assert!(free.arrow_eq(&got.cells()[1], &StructuralTerm::tau(1, 2)));
        assert!(got.cells()[0].is_identity() && got.cells()[2].is_identity());
    }

    #[test]
    fn omega_is_natural() {
        // ω(x') ∘ W(f2)W(f1)(a) = W(f2 f1)(a) ∘ ω(x) for an arrow grid a: x → x'
        let m = FinSetSplit::new(2, 1).unwrap();
        let f1 = MultiArrow::new(vec!["d3_1".parse().unwrap(), "s2_0".parse().unwrap()]);
        let f2 = MultiArrow::new(vec!["s3_1".parse().unwrap(), "d2_1".parse().unwrap()]);
        let x = Grid::from_fn(vec![3, 1], |i| i + 1);
        let xp = Grid::from_fn(vec![3, 1], |i| i + 2);
        let a = Grid::from_fn(vec![3, 1], |i| {
            crate::model::FinArrow::new(i + 2, (0..i + 1).map(|t| ((t * 7 + 1) % (i + 2)) as u32).collect()).unwrap()
        });
        let w21 = f2.after(&f1).unwrap();
        let lhs = compose_grids(
            &m,
            &omega(&m, &f1, &f2, &xp).unwrap(),
            &w_multi_arrows(&m, &f2, &w_multi_arrows(&m, &f1, &a).unwrap()).unwrap(),
        )
        .unwrap();
        let rhs = compose_grids(&m, &w_multi_arrows(&m, &w21, &a).unwrap(), &omega(&m, &f1, &f2, &x).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lax_with_identities_holds() {
        let m = FinSetSplit::new(2, 1).unwrap();
        let id = MultiArrow::identity(&[2, 1]);
        let x = Grid::from_fn(vec![2, 1], |i| i + 1);
        assert!(lax_check(&m, &id, &id, &id, &x).unwrap().holds());
    }

    #[test]
    fn lax_small_instance() {
        let m = FinSetSplit::new(2, 1).unwrap();
        let f1 = MultiArrow::new(vec!["d3_1".parse().unwrap(), "s2_1".parse().unwrap()]);
        let f2 = MultiArrow::new(vec!["s3_0".parse().unwrap(), "d2_1".parse().unwrap()]);
        let f3 = MultiArrow::new(vec!["d3_1".parse().unwrap(), "s2_1".parse().unwrap()]);
        let x = Grid::from_fn(vec![3, 1], |i| i + 1);
        let report = lax_check(&m, &f1, &f2, &f3, &x).unwrap();
        assert!(report.holds(), "{report:?}");
    }
}

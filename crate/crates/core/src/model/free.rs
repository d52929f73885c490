//! The free symbolic model: object words over named variables and formal
//! structural terms, compared modulo the strict monoidal laws.
//!
//! Canonical forms flatten composites and same-colour tensors, drop
//! identities and units, and merge a composite of same-colour tensors
//! whenever their factor boundaries line up (functoriality of `⊗_c`).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::NFoldModel;
use crate::chi::StructKind;
use crate::error::{mismatch, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjWord {
    Var(Arc<str>),
    Unit(usize),
    /// At least two factors, none of them `I_c` or a `⊗_c` tensor.
    Tensor(usize, Vec<ObjWord>),
}

impl ObjWord {
    pub fn var(name: &str) -> Self {
        ObjWord::Var(Arc::from(name))
    }

    /// The `⊗_c` factors of this word (empty for `I_c`).
    pub fn factors(&self, c: usize) -> Vec<ObjWord> {
        match self {
            ObjWord::Unit(k) if *k == c => Vec::new(),
            ObjWord::Tensor(k, fs) if *k == c => fs.clone(),
            other => vec![other.clone()],
        }
    }

    pub fn width(&self, c: usize) -> usize {
        match self {
            ObjWord::Unit(k) if *k == c => 0,
            ObjWord::Tensor(k, fs) if *k == c => fs.len(),
            _ => 1,
        }
    }

    pub fn tensor(c: usize, parts: &[ObjWord]) -> ObjWord {
        let mut fs = Vec::new();
        for p in parts {
            fs.extend(p.factors(c));
        }
        match fs.len() {
            0 => ObjWord::Unit(c),
            1 => fs.pop().expect("one factor"),
            _ => ObjWord::Tensor(c, fs),
        }
    }

    pub fn tensor2(c: usize, a: &ObjWord, b: &ObjWord) -> ObjWord {
        Self::tensor(c, &[a.clone(), b.clone()])
    }

    /// Replaces variables by the bound words.
    pub fn substitute(&self, binding: &BTreeMap<Arc<str>, ObjWord>) -> ObjWord {
        match self {
            ObjWord::Var(v) => binding.get(v).cloned().unwrap_or_else(|| self.clone()),
            ObjWord::Unit(_) => self.clone(),
            ObjWord::Tensor(c, fs) => {
                let parts: Vec<ObjWord> = fs.iter().map(|f| f.substitute(binding)).collect();
                ObjWord::tensor(*c, &parts)
            }
        }
    }

    pub fn variables(&self, out: &mut Vec<Arc<str>>) {
        match self {
            ObjWord::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            ObjWord::Unit(_) => {}
            ObjWord::Tensor(_, fs) => fs.iter().for_each(|f| f.variables(out)),
        }
    }
}

impl fmt::Display for ObjWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjWord::Var(v) => f.write_str(v),
            ObjWord::Unit(k) => write!(f, "I{k}"),
            ObjWord::Tensor(k, fs) => {
                let parts: Vec<String> = fs.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(&format!(" x{k} ")))
            }
        }
    }
}

/// A formal arrow. Built through the checked constructors, so every value
/// is well typed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StructuralTerm {
    Id(ObjWord),
    /// `args` is empty except for ι, which carries `A, B, C, D`.
    Const { kind: StructKind, k: usize, l: usize, args: Vec<ObjWord> },
    Tensor(usize, Vec<StructuralTerm>),
    /// Outermost-left.
    Compose(Vec<StructuralTerm>),
}

use StructuralTerm as T;

impl StructuralTerm {
    pub fn id(x: ObjWord) -> Self {
        T::Id(x)
    }

    pub fn constant(kind: StructKind, k: usize, l: usize, args: Vec<ObjWord>) -> Result<Self> {
        if k >= l {
            return Err(Error::ColourOrder { k, l });
        }
        let want = if kind == StructKind::Iota { 4 } else { 0 };
        if args.len() != want {
            return Err(Error::ArityMismatch(format!("{kind} takes {want} objects, got {}", args.len())));
        }
        Ok(T::Const { kind, k, l, args })
    }

    pub fn kappa(k: usize, l: usize) -> Self {
        Self::constant(StructKind::Kappa, k, l, vec![]).expect("k < l")
    }

    pub fn beta(k: usize, l: usize) -> Self {
        Self::constant(StructKind::Beta, k, l, vec![]).expect("k < l")
    }

    pub fn tau(k: usize, l: usize) -> Self {
        Self::constant(StructKind::Tau, k, l, vec![]).expect("k < l")
    }

    pub fn iota(k: usize, l: usize, a: ObjWord, b: ObjWord, c: ObjWord, d: ObjWord) -> Self {
        Self::constant(StructKind::Iota, k, l, vec![a, b, c, d]).expect("k < l")
    }

    pub fn tensor(c: usize, fs: Vec<StructuralTerm>) -> Self {
        T::Tensor(c, fs)
    }

    /// `fs[0] ∘ fs[1] ∘ …`, checking that the endpoints meet.
    pub fn compose(fs: Vec<StructuralTerm>) -> Result<Self> {
        for pair in fs.windows(2) {
            let (d, c) = (pair[0].dom(), pair[1].cod());
            if d != c {
                return Err(mismatch(d, c));
            }
        }
        if fs.is_empty() {
            return Err(Error::ArityMismatch("empty composite".into()));
        }
        Ok(T::Compose(fs))
    }

    pub fn dom(&self) -> ObjWord {
        match self {
            T::Id(x) => x.clone(),
            T::Const { kind, k, l, args } => match kind {
                StructKind::Kappa | StructKind::Beta => ObjWord::Unit(*k),
                StructKind::Tau => ObjWord::tensor2(*k, &ObjWord::Unit(*l), &ObjWord::Unit(*l)),
                StructKind::Iota => ObjWord::tensor2(
                    *k,
                    &ObjWord::tensor2(*l, &args[0], &args[1]),
                    &ObjWord::tensor2(*l, &args[2], &args[3]),
                ),
            },
            T::Tensor(c, fs) => ObjWord::tensor(*c, &fs.iter().map(T::dom).collect::<Vec<_>>()),
            T::Compose(fs) => fs.last().expect("non-empty").dom(),
        }
    }

    pub fn cod(&self) -> ObjWord {
        match self {
            T::Id(x) => x.clone(),
            T::Const { kind, k, l, args } => match kind {
                StructKind::Kappa => ObjWord::Unit(*l),
                StructKind::Beta => ObjWord::tensor2(*l, &ObjWord::Unit(*k), &ObjWord::Unit(*k)),
                StructKind::Tau => ObjWord::Unit(*l),
                StructKind::Iota => ObjWord::tensor2(
                    *l,
                    &ObjWord::tensor2(*k, &args[0], &args[2]),
                    &ObjWord::tensor2(*k, &args[1], &args[3]),
                ),
            },
            T::Tensor(c, fs) => ObjWord::tensor(*c, &fs.iter().map(T::cod).collect::<Vec<_>>()),
            T::Compose(fs) => fs.first().expect("non-empty").cod(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, T::Id(_))
    }

    /// Canonical representative modulo the strict monoidal laws.
    pub fn canonical(&self) -> StructuralTerm {
        match self {
            T::Id(_) | T::Const { .. } => self.clone(),
            T::Tensor(c, fs) => canonical_tensor(*c, fs.iter().map(T::canonical).collect()),
            T::Compose(fs) => canonical_compose(fs.iter().map(T::canonical).collect()),
        }
    }

    /// Number of structural constants.
    pub fn size(&self) -> usize {
        match self {
            T::Id(_) => 0,
            T::Const { .. } => 1,
            T::Tensor(_, fs) | T::Compose(fs) => fs.iter().map(T::size).sum(),
        }
    }

    pub fn substitute(&self, binding: &BTreeMap<Arc<str>, ObjWord>) -> StructuralTerm {
        match self {
            T::Id(x) => T::Id(x.substitute(binding)),
            T::Const { kind, k, l, args } => T::Const {
                kind: *kind,
                k: *k,
                l: *l,
                args: args.iter().map(|a| a.substitute(binding)).collect(),
            },
            T::Tensor(c, fs) => T::Tensor(*c, fs.iter().map(|f| f.substitute(binding)).collect()),
            T::Compose(fs) => T::Compose(fs.iter().map(|f| f.substitute(binding)).collect()),
        }
    }

    pub fn variables(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Arc<str>>) {
        match self {
            T::Id(x) => x.variables(out),
            T::Const { args, .. } => args.iter().for_each(|a| a.variables(out)),
            T::Tensor(_, fs) | T::Compose(fs) => fs.iter().for_each(|f| f.collect_vars(out)),
        }
    }
}

pub(crate) fn canonical_tensor(c: usize, fs: Vec<StructuralTerm>) -> StructuralTerm {
    let mut flat: Vec<StructuralTerm> = Vec::new();
    for f in fs {
        match f {
            T::Tensor(k, inner) if k == c => flat.extend(inner),
            T::Id(ObjWord::Unit(k)) if k == c => {}
            other => flat.push(other),
        }
    }
    let mut merged: Vec<StructuralTerm> = Vec::new();
    for f in flat {
        match (merged.last_mut(), &f) {
            (Some(T::Id(prev)), T::Id(x)) => *prev = ObjWord::tensor2(c, prev, x),
            _ => merged.push(f),
        }
    }
    match merged.len() {
        0 => T::Id(ObjWord::Unit(c)),
        1 => merged.pop().expect("one factor"),
        _ => T::Tensor(c, merged),
    }
}

pub(crate) fn canonical_compose(fs: Vec<StructuralTerm>) -> StructuralTerm {
    let dom = fs.last().expect("non-empty").dom();
    let mut chain: Vec<StructuralTerm> = Vec::new();
    for f in fs {
        match f {
            T::Compose(inner) => chain.extend(inner),
            T::Id(_) => {}
            other => chain.push(other),
        }
    }
    let chain = merge_tensor_runs(chain);
    match chain.len() {
        0 => T::Id(dom),
        1 => chain.into_iter().next().expect("one element"),
        _ => T::Compose(chain),
    }
}

/// Merges maximal runs of same-colour tensors whose factor boundaries line
/// up into a single tensor of composites.
fn merge_tensor_runs(chain: Vec<StructuralTerm>) -> Vec<StructuralTerm> {
    let mut out: Vec<StructuralTerm> = Vec::with_capacity(chain.len());
    let mut i = 0;
    while i < chain.len() {
        let c = match &chain[i] {
            T::Tensor(c, _) => *c,
            _ => {
                out.push(chain[i].clone());
                i += 1;
                continue;
            }
        };
        let mut j = i + 1;
        while j < chain.len() && matches!(&chain[j], T::Tensor(k, _) if *k == c) {
            j += 1;
        }
        if j - i == 1 {
            out.push(chain[i].clone());
        } else {
            out.extend(merge_run(c, &chain[i..j]));
        }
        i = j;
    }
    out
}

/// Cut indices of a factor list; a cut at `q` separates factors `q-1` and
/// `q`. Cuts touching a factor of zero width on either side are not
/// allowed, which keeps unit-shaped factors glued to their neighbours.
fn cut_positions(c: usize, fs: &[StructuralTerm]) -> Vec<(usize, usize, usize)> {
    let dw: Vec<usize> = fs.iter().map(|f| f.dom().width(c)).collect();
    let cw: Vec<usize> = fs.iter().map(|f| f.cod().width(c)).collect();
    let mut out = Vec::new();
    let (mut pd, mut pc) = (0, 0);
    for q in 1..fs.len() {
        pd += dw[q - 1];
        pc += cw[q - 1];
        let glued = dw[q - 1] == 0 || cw[q - 1] == 0 || dw[q] == 0 || cw[q] == 0;
        if !glued {
            out.push((q, pd, pc));
        }
    }
    out
}

fn merge_run(c: usize, run: &[StructuralTerm]) -> Vec<StructuralTerm> {
    // Identity factors are split into one identity per `⊗_c` factor so that
    // every boundary inside them is available as a cut.
    let exploded: Vec<Vec<StructuralTerm>> = run
        .iter()
        .map(|t| match t {
            T::Tensor(_, fs) => fs
                .iter()
                .flat_map(|f| match f {
                    T::Id(x) => x.factors(c).into_iter().map(T::Id).collect(),
                    other => vec![other.clone()],
                })
                .collect(),
            _ => unreachable!("runs contain tensors only"),
        })
        .collect();
    let factors: Vec<&[StructuralTerm]> = exploded.iter().map(Vec::as_slice).collect();
    let mut cuts: Vec<Vec<(usize, usize, usize)>> = factors.iter().map(|fs| cut_positions(c, fs)).collect();
    // A cut survives only if it meets a surviving cut on each neighbour.
    loop {
        let mut changed = false;
        for t in 0..cuts.len() {
            let keep: Vec<(usize, usize, usize)> = cuts[t]
                .iter()
                .copied()
                .filter(|&(_, pd, pc)| {
                    let up = t == 0 || cuts[t - 1].iter().any(|&(_, d, _)| d == pc);
                    let down = t + 1 == cuts.len() || cuts[t + 1].iter().any(|&(_, _, cc)| cc == pd);
                    up && down
                })
                .collect();
            if keep.len() != cuts[t].len() {
                cuts[t] = keep;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let groups = cuts[0].len() + 1;
    if groups == 1 || cuts.iter().any(|cs| cs.len() + 1 != groups) {
        return run.to_vec();
    }
    let mut columns: Vec<Vec<StructuralTerm>> = vec![Vec::new(); groups];
    for (t, fs) in factors.iter().enumerate() {
        let mut bounds = vec![0];
        bounds.extend(cuts[t].iter().map(|&(q, _, _)| q));
        bounds.push(fs.len());
        for g in 0..groups {
            let part = canonical_tensor(c, fs[bounds[g]..bounds[g + 1]].to_vec());
            columns[g].push(part);
        }
    }
    let merged: Vec<StructuralTerm> = columns.into_iter().map(canonical_compose).collect();
    vec![canonical_tensor(c, merged)]
}

impl fmt::Display for StructuralTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            T::Id(x) => write!(f, "1[{x}]"),
            T::Const { kind, k, l, args } if args.is_empty() => write!(f, "{kind}[{k},{l}]"),
            T::Const { kind, k, l, args } => {
                let parts: Vec<String> = args.iter().map(ToString::to_string).collect();
                write!(f, "{kind}[{k},{l}]({})", parts.join(", "))
            }
            T::Tensor(c, fs) => {
                let parts: Vec<String> = fs.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(&format!(" x{c} ")))
            }
            T::Compose(fs) => {
                let parts: Vec<String> = fs.iter().map(ToString::to_string).collect();
                write!(f, "({})", parts.join(" . "))
            }
        }
    }
}

/// Terms as arrows, equality being equality of canonical forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeTermModel {
    r: usize,
}

impl FreeTermModel {
    pub fn new(r: usize) -> Self {
        FreeTermModel { r }
    }
}

impl NFoldModel for FreeTermModel {
    type Obj = ObjWord;
    type Arrow = StructuralTerm;

    fn arity(&self) -> usize {
        self.r
    }

    fn dom(&self, f: &StructuralTerm) -> ObjWord {
        f.dom()
    }

    fn cod(&self, f: &StructuralTerm) -> ObjWord {
        f.cod()
    }

    fn id(&self, x: &ObjWord) -> StructuralTerm {
        T::Id(x.clone())
    }

    fn compose(&self, f: &StructuralTerm, g: &StructuralTerm) -> Result<StructuralTerm> {
        if f.dom() != g.cod() {
            return Err(mismatch(g.cod(), f.dom()));
        }
        Ok(canonical_compose(vec![f.clone(), g.clone()]))
    }

    fn unit(&self, k: usize) -> ObjWord {
        ObjWord::Unit(k)
    }

    fn tensor_obj(&self, k: usize, a: &ObjWord, b: &ObjWord) -> ObjWord {
        ObjWord::tensor2(k, a, b)
    }

    fn tensor_arrow(&self, k: usize, f: &StructuralTerm, g: &StructuralTerm) -> StructuralTerm {
        canonical_tensor(k, vec![f.clone(), g.clone()])
    }

    fn kappa(&self, k: usize, l: usize) -> Result<StructuralTerm> {
        self.check_pair(k, l)?;
        StructuralTerm::constant(StructKind::Kappa, k, l, vec![])
    }

    fn beta(&self, k: usize, l: usize) -> Result<StructuralTerm> {
        self.check_pair(k, l)?;
        StructuralTerm::constant(StructKind::Beta, k, l, vec![])
    }

    fn tau(&self, k: usize, l: usize) -> Result<StructuralTerm> {
        self.check_pair(k, l)?;
        StructuralTerm::constant(StructKind::Tau, k, l, vec![])
    }

    fn iota(&self, k: usize, l: usize, a: &ObjWord, b: &ObjWord, c: &ObjWord, d: &ObjWord) -> Result<StructuralTerm> {
        self.check_pair(k, l)?;
        StructuralTerm::constant(StructKind::Iota, k, l, vec![a.clone(), b.clone(), c.clone(), d.clone()])
    }

    fn arrow_eq(&self, f: &StructuralTerm, g: &StructuralTerm) -> bool {
        f.canonical() == g.canonical()
    }
}

/// Interprets a term in `model`, variables read from `assignment`.
pub fn eval_obj<M: NFoldModel>(model: &M, x: &ObjWord, assignment: &BTreeMap<Arc<str>, M::Obj>) -> Result<M::Obj> {
    Ok(match x {
        ObjWord::Var(v) => assignment.get(v).cloned().ok_or_else(|| Error::UnboundVariable(v.to_string()))?,
        ObjWord::Unit(k) => model.unit(*k),
        ObjWord::Tensor(k, fs) => {
            let parts = fs.iter().map(|f| eval_obj(model, f, assignment)).collect::<Result<Vec<_>>>()?;
            model.tensor_objs(*k, &parts)
        }
    })
}

pub fn eval_term<M: NFoldModel>(
    model: &M,
    t: &StructuralTerm,
    assignment: &BTreeMap<Arc<str>, M::Obj>,
) -> Result<M::Arrow> {
    match t {
        T::Id(x) => Ok(model.id(&eval_obj(model, x, assignment)?)),
        T::Const { kind, k, l, args } => {
            let objs = args.iter().map(|a| eval_obj(model, a, assignment)).collect::<Result<Vec<_>>>()?;
            model.structural(*kind, *k, *l, &objs)
        }
        T::Tensor(c, fs) => {
            let parts = fs.iter().map(|f| eval_term(model, f, assignment)).collect::<Result<Vec<_>>>()?;
            Ok(model.tensor_arrows(*c, &parts))
        }
        T::Compose(fs) => {
            let parts = fs.iter().map(|f| eval_term(model, f, assignment)).collect::<Result<Vec<_>>>()?;
            model.compose_all(&parts)
        }
    }
}

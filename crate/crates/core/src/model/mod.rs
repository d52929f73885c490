//! Strict n-fold monoidal models.
//!
//! Colours are 1-based throughout. For a pair `k < l` the structural
//! arrows are
//!
//! - `kappa(k,l): I_k → I_l`
//! - `beta(k,l): I_k → I_k ⊗_l I_k`
//! - `tau(k,l): I_l ⊗_k I_l → I_l`
//! - `iota(k,l)(A,B,C,D): (A ⊗_l B) ⊗_k (C ⊗_l D) → (A ⊗_k C) ⊗_l (B ⊗_k D)`

use std::fmt::Debug;
use std::hash::Hash;

use crate::chi::StructKind;
use crate::error::{Error, Result};

pub mod equations;
pub mod finset;
pub mod free;
pub mod rewrite;

pub use equations::{check_equation, equation_arity, equation_sides, EquationShape};
pub use finset::{FinArrow, FinSetSplit};
pub use free::{eval_term, FreeTermModel, ObjWord, StructuralTerm};
pub use rewrite::{term_equal, ProofStep, TermVerdict};

pub trait NFoldModel: Sync {
    type Obj: Clone + Eq + Hash + Debug + Send + Sync;
    type Arrow: Clone + Eq + Hash + Debug + Send + Sync;

    fn arity(&self) -> usize;
    fn dom(&self, f: &Self::Arrow) -> Self::Obj;
    fn cod(&self, f: &Self::Arrow) -> Self::Obj;
    fn id(&self, x: &Self::Obj) -> Self::Arrow;
    /// `f ∘ g`.
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Result<Self::Arrow>;
    fn unit(&self, k: usize) -> Self::Obj;
    fn tensor_obj(&self, k: usize, a: &Self::Obj, b: &Self::Obj) -> Self::Obj;
    fn tensor_arrow(&self, k: usize, f: &Self::Arrow, g: &Self::Arrow) -> Self::Arrow;
    fn kappa(&self, k: usize, l: usize) -> Result<Self::Arrow>;
    fn beta(&self, k: usize, l: usize) -> Result<Self::Arrow>;
    fn tau(&self, k: usize, l: usize) -> Result<Self::Arrow>;
    fn iota(
        &self,
        k: usize,
        l: usize,
        a: &Self::Obj,
        b: &Self::Obj,
        c: &Self::Obj,
        d: &Self::Obj,
    ) -> Result<Self::Arrow>;

    /// Arrow equality as the model understands it.
    fn arrow_eq(&self, f: &Self::Arrow, g: &Self::Arrow) -> bool {
        f == g
    }

    fn check_pair(&self, k: usize, l: usize) -> Result<()> {
        if k >= l {
            return Err(Error::ColourOrder { k, l });
        }
        if k == 0 || l > self.arity() {
            return Err(Error::ArityMismatch(format!("colours ({k},{l}) with arity {}", self.arity())));
        }
        Ok(())
    }

    /// One of the four structural families; `objs` is used only by ι.
    fn structural(&self, kind: StructKind, k: usize, l: usize, objs: &[Self::Obj]) -> Result<Self::Arrow> {
        match kind {
            StructKind::Kappa => self.kappa(k, l),
            StructKind::Beta => self.beta(k, l),
            StructKind::Tau => self.tau(k, l),
            StructKind::Iota => match objs {
                [a, b, c, d] => self.iota(k, l, a, b, c, d),
                _ => Err(Error::ArityMismatch(format!("iota takes four objects, got {}", objs.len()))),
            },
        }
    }

    /// Folds `⊗_k` over a list, the empty list giving `I_k`.
    fn tensor_objs(&self, k: usize, xs: &[Self::Obj]) -> Self::Obj {
        match xs.split_first() {
            None => self.unit(k),
            Some((first, rest)) => rest.iter().fold(first.clone(), |acc, x| self.tensor_obj(k, &acc, x)),
        }
    }

    fn tensor_arrows(&self, k: usize, fs: &[Self::Arrow]) -> Self::Arrow {
        match fs.split_first() {
            None => self.id(&self.unit(k)),
            Some((first, rest)) => rest.iter().fold(first.clone(), |acc, f| self.tensor_arrow(k, &acc, f)),
        }
    }

    /// `fs[0] ∘ fs[1] ∘ …`.
    fn compose_all(&self, fs: &[Self::Arrow]) -> Result<Self::Arrow> {
        let (last, rest) = fs
            .split_last()
            .ok_or_else(|| Error::ArityMismatch("empty composite".into()))?;
        rest.iter().rev().try_fold(last.clone(), |acc, f| self.compose(f, &acc))
    }
}

/// A parsed model selection such as `finset:r=3,split=1` or `free:r=3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    FinSet { r: usize, split: usize, corrupt: bool },
    Free { r: usize },
}

impl ModelSpec {
    pub fn arity(&self) -> usize {
        match *self {
            ModelSpec::FinSet { r, .. } | ModelSpec::Free { r } => r,
        }
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = s.split_once(':').unwrap_or((s, ""));
        let mut r = None;
        let mut split = None;
        let mut corrupt = false;
        for kv in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = kv.split_once('=').unwrap_or((kv, "true"));
            let num = || value.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad value in `{kv}`")));
            match key.trim() {
                "r" => r = Some(num()?),
                "split" | "s" => split = Some(num()?),
                "corrupt" => corrupt = value.trim() != "false",
                other => return Err(Error::Config(format!("unknown model parameter `{other}`"))),
            }
        }
        let r = r.ok_or_else(|| Error::Config(format!("model `{s}` needs r=…")))?;
        if r == 0 {
            return Err(Error::Config("arity must be positive".into()));
        }
        match kind.trim() {
            "finset" => {
                let split = split.unwrap_or(r / 2);
                if split > r {
                    return Err(Error::Config(format!("split {split} exceeds r = {r}")));
                }
                Ok(ModelSpec::FinSet { r, split, corrupt })
            }
            "free" => Ok(ModelSpec::Free { r }),
            other => Err(Error::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_model_specs() {
        assert_eq!(
            "finset:r=3,split=1".parse::<ModelSpec>().unwrap(),
            ModelSpec::FinSet { r: 3, split: 1, corrupt: false }
        );
        assert_eq!("free:r=3".parse::<ModelSpec>().unwrap(), ModelSpec::Free { r: 3 });
        assert_eq!(
            "finset:r=2,split=1,corrupt".parse::<ModelSpec>().unwrap(),
            ModelSpec::FinSet { r: 2, split: 1, corrupt: true }
        );
        assert!("finset:r=2,split=3".parse::<ModelSpec>().is_err());
        assert!("group:r=2".parse::<ModelSpec>().is_err());
        assert!("finset:split=1".parse::<ModelSpec>().is_err());
    }
}

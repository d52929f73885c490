//! The twenty coherence equations, built generically in any model.
//!
//! Equations 1–12 take a colour pair `k < l`, equations 13–20 a triple
//! `k < l < m`. In the triple case unprimed constants are `(k,l)`,
//! primed ones `(l,m)` and double-primed ones `(k,m)`.

use serde::{Deserialize, Serialize};

use super::NFoldModel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationShape {
    /// 2 or 3.
    pub colours: usize,
    pub objects: usize,
}

pub const EQUATION_IDS: std::ops::RangeInclusive<usize> = 1..=20;

pub fn equation_arity(eq: usize) -> Result<EquationShape> {
    let objects = match eq {
        1 | 7 => 6,
        2 | 3 | 8 | 9 => 2,
        20 => 8,
        4..=6 | 10..=19 => 0,
        _ => return Err(Error::ArityMismatch(format!("no equation ({eq})"))),
    };
    Ok(EquationShape { colours: if eq <= 12 { 2 } else { 3 }, objects })
}

/// Left and right side of equation `eq` at the given colours and objects.
pub fn equation_sides<M: NFoldModel>(
    model: &M,
    eq: usize,
    colours: &[usize],
    objs: &[M::Obj],
) -> Result<(M::Arrow, M::Arrow)> {
    let shape = equation_arity(eq)?;
    if colours.len() != shape.colours {
        return Err(Error::ArityMismatch(format!(
            "equation ({eq}) takes {} colours, got {}",
            shape.colours,
            colours.len()
        )));
    }
    if objs.len() != shape.objects {
        return Err(Error::ArityMismatch(format!(
            "equation ({eq}) takes {} objects, got {}",
            shape.objects,
            objs.len()
        )));
    }
    for w in colours.windows(2) {
        model.check_pair(w[0], w[1])?;
    }
    if eq <= 12 {
        pair_sides(model, eq, colours[0], colours[1], objs)
    } else {
        triple_sides(model, eq, colours[0], colours[1], colours[2], objs)
    }
}

fn pair_sides<M: NFoldModel>(
    m: &M,
    eq: usize,
    k: usize,
    l: usize,
    o: &[M::Obj],
) -> Result<(M::Arrow, M::Arrow)> {
    let tk = |f: &M::Arrow, g: &M::Arrow| m.tensor_arrow(k, f, g);
    let tl = |f: &M::Arrow, g: &M::Arrow| m.tensor_arrow(l, f, g);
    let ok = |a: &M::Obj, b: &M::Obj| m.tensor_obj(k, a, b);
    let ol = |a: &M::Obj, b: &M::Obj| m.tensor_obj(l, a, b);
    let ik = m.unit(k);
    let il = m.unit(l);
    let iota = |a: &M::Obj, b: &M::Obj, c: &M::Obj, d: &M::Obj| m.iota(k, l, a, b, c, d);
    Ok(match eq {
        1 => {
            let [a, b, c, d, e, f] = six(o);
            let lhs = m.compose_all(&[
                iota(a, d, &ok(b, c), &ok(e, f))?,
                tk(&m.id(&ol(a, d)), &iota(b, e, c, f)?),
            ])?;
            let rhs = m.compose_all(&[
                iota(&ok(a, b), &ok(d, e), c, f)?,
                tk(&iota(a, d, b, e)?, &m.id(&ol(c, f))),
            ])?;
            (lhs, rhs)
        }
        2 => {
            let (a, b) = (&o[0], &o[1]);
            let lhs = m.compose_all(&[iota(a, b, &ik, &ik)?, tk(&m.id(&ol(a, b)), &m.beta(k, l)?)])?;
            (lhs, m.id(&ol(a, b)))
        }
        3 => {
            let (a, b) = (&o[0], &o[1]);
            let lhs = m.compose_all(&[iota(&ik, &ik, a, b)?, tk(&m.beta(k, l)?, &m.id(&ol(a, b)))])?;
            (lhs, m.id(&ol(a, b)))
        }
        4 => {
            let tau = m.tau(k, l)?;
            let one = m.id(&il);
            let lhs = m.compose_all(&[tau.clone(), tk(&one, &tau)])?;
            let rhs = m.compose_all(&[tau.clone(), tk(&tau, &one)])?;
            (lhs, rhs)
        }
        5 => {
            let lhs = m.compose_all(&[m.tau(k, l)?, tk(&m.id(&il), &m.kappa(k, l)?)])?;
            (lhs, m.id(&il))
        }
        6 => {
            let lhs = m.compose_all(&[m.tau(k, l)?, tk(&m.kappa(k, l)?, &m.id(&il))])?;
            (lhs, m.id(&il))
        }
        7 => {
            let [a, b, c, d, e, f] = six(o);
            let lhs = m.compose_all(&[
                tl(&m.id(&ok(a, d)), &iota(b, c, e, f)?),
                iota(a, &ol(b, c), d, &ol(e, f))?,
            ])?;
            let rhs = m.compose_all(&[
                tl(&iota(a, b, d, e)?, &m.id(&ok(c, f))),
                iota(&ol(a, b), c, &ol(d, e), f)?,
            ])?;
            (lhs, rhs)
        }
        8 => {
            let (a, b) = (&o[0], &o[1]);
            let lhs = m.compose_all(&[tl(&m.id(&ok(a, b)), &m.tau(k, l)?), iota(a, &il, b, &il)?])?;
            (lhs, m.id(&ok(a, b)))
        }
        9 => {
            let (a, b) = (&o[0], &o[1]);
            let lhs = m.compose_all(&[tl(&m.tau(k, l)?, &m.id(&ok(a, b))), iota(&il, a, &il, b)?])?;
            (lhs, m.id(&ok(a, b)))
        }
        10 => {
            let beta = m.beta(k, l)?;
            let one = m.id(&ik);
            let lhs = m.compose_all(&[tl(&one, &beta), beta.clone()])?;
            let rhs = m.compose_all(&[tl(&beta, &one), beta.clone()])?;
            (lhs, rhs)
        }
        11 => {
            let lhs = m.compose_all(&[tl(&m.id(&ik), &m.kappa(k, l)?), m.beta(k, l)?])?;
            (lhs, m.id(&ik))
        }
        12 => {
            let lhs = m.compose_all(&[tl(&m.kappa(k, l)?, &m.id(&ik)), m.beta(k, l)?])?;
            (lhs, m.id(&ik))
        }
        _ => unreachable!("pair equations are 1..=12"),
    })
}

fn triple_sides<M: NFoldModel>(
    m: &M,
    eq: usize,
    k: usize,
    l: usize,
    n: usize,
    o: &[M::Obj],
) -> Result<(M::Arrow, M::Arrow)> {
    let t = |c: usize, f: &M::Arrow, g: &M::Arrow| m.tensor_arrow(c, f, g);
    let ob = |c: usize, a: &M::Obj, b: &M::Obj| m.tensor_obj(c, a, b);
    let ik = m.unit(k);
    let il = m.unit(l);
    let im = m.unit(n);
    Ok(match eq {
        13 => (m.compose(&m.kappa(l, n)?, &m.kappa(k, l)?)?, m.kappa(k, n)?),
        14 => {
            let lhs = m.compose(&m.beta(l, n)?, &m.kappa(k, l)?)?;
            let kk = m.kappa(k, l)?;
            let rhs = m.compose(&t(n, &kk, &kk), &m.beta(k, n)?)?;
            (lhs, rhs)
        }
        15 => {
            let kk = m.kappa(k, n)?;
            let lhs = m.compose_all(&[m.tau(l, n)?, t(l, &kk, &kk), m.beta(k, l)?])?;
            (lhs, kk)
        }
        16 => {
            let b2 = m.beta(k, n)?;
            let b = m.beta(k, l)?;
            let lhs = m.compose_all(&[m.iota(l, n, &ik, &ik, &ik, &ik)?, t(l, &b2, &b2), b.clone()])?;
            let rhs = m.compose_all(&[t(n, &b, &b), b2])?;
            (lhs, rhs)
        }
        17 => {
            let k1 = m.kappa(l, n)?;
            let lhs = m.compose(&k1, &m.tau(k, l)?)?;
            let rhs = m.compose(&m.tau(k, n)?, &t(k, &k1, &k1))?;
            (lhs, rhs)
        }
        18 => {
            let b1 = m.beta(l, n)?;
            let tau = m.tau(k, l)?;
            let lhs = m.compose(&b1, &tau)?;
            let rhs = m.compose_all(&[t(n, &tau, &tau), m.iota(k, n, &il, &il, &il, &il)?, t(k, &b1, &b1)])?;
            (lhs, rhs)
        }
        19 => {
            let t1 = m.tau(l, n)?;
            let t2 = m.tau(k, n)?;
            let lhs = m.compose_all(&[t1.clone(), t(l, &t2, &t2), m.iota(k, l, &im, &im, &im, &im)?])?;
            let rhs = m.compose(&t2, &t(k, &t1, &t1))?;
            (lhs, rhs)
        }
        20 => {
            let [a, b, c, d, e, f, g, h] = eight(o);
            let lhs = m.compose_all(&[
                m.iota(l, n, &ob(k, a, e), &ob(k, b, f), &ob(k, c, g), &ob(k, d, h))?,
                t(l, &m.iota(k, n, a, b, e, f)?, &m.iota(k, n, c, d, g, h)?),
                m.iota(k, l, &ob(n, a, b), &ob(n, c, d), &ob(n, e, f), &ob(n, g, h))?,
            ])?;
            let rhs = m.compose_all(&[
                t(n, &m.iota(k, l, a, c, e, g)?, &m.iota(k, l, b, d, f, h)?),
                m.iota(k, n, &ob(l, a, c), &ob(l, b, d), &ob(l, e, g), &ob(l, f, h))?,
                t(k, &m.iota(l, n, a, b, c, d)?, &m.iota(l, n, e, f, g, h)?),
            ])?;
            (lhs, rhs)
        }
        _ => unreachable!("triple equations are 13..=20"),
    })
}

fn six<T>(o: &[T]) -> [&T; 6] {
    [&o[0], &o[1], &o[2], &o[3], &o[4], &o[5]]
}

fn eight<T>(o: &[T]) -> [&T; 8] {
    [&o[0], &o[1], &o[2], &o[3], &o[4], &o[5], &o[6], &o[7]]
}

/// Evaluates both sides and compares them as the model sees arrows.
pub fn check_equation<M: NFoldModel>(model: &M, eq: usize, colours: &[usize], objs: &[M::Obj]) -> Result<bool> {
    let (lhs, rhs) = equation_sides(model, eq, colours, objs)?;
    Ok(model.dom(&lhs) == model.dom(&rhs) && model.cod(&lhs) == model.cod(&rhs) && model.arrow_eq(&lhs, &rhs))
}

/// All increasing colour tuples of the given length in `1..=r`.
pub fn colour_tuples(r: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(from: usize, r: usize, len: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if acc.len() == len {
            out.push(acc.clone());
            return;
        }
        for c in from..=r {
            acc.push(c);
            go(c + 1, r, len, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(1, r, len, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FinSetSplit, FreeTermModel, ObjWord, StructuralTerm};

    #[test]
    fn arities() {
        let with_objects: Vec<usize> = EQUATION_IDS.filter(|&e| equation_arity(e).unwrap().objects > 0).collect();
        assert_eq!(with_objects, vec![1, 2, 3, 7, 8, 9, 20]);
        assert_eq!(equation_arity(13).unwrap().colours, 3);
        assert!(equation_arity(21).is_err());
        assert!(equation_arity(0).is_err());
    }

    #[test]
    fn free_sides_are_well_typed() {
        let free = FreeTermModel::new(3);
        let vars: Vec<ObjWord> = "ABCDEFGH".chars().map(|c| ObjWord::var(&c.to_string())).collect();
        for eq in EQUATION_IDS {
            let shape = equation_arity(eq).unwrap();
            let cols: Vec<usize> = (1..=shape.colours).collect();
            let (l, r) = equation_sides(&free, eq, &cols, &vars[..shape.objects]).unwrap();
            assert_eq!(l.dom(), r.dom(), "dom of ({eq})");
            assert_eq!(l.cod(), r.cod(), "cod of ({eq})");
        }
    }

    #[test]
    fn spot_checks() {
        let m = FinSetSplit::new(2, 1).unwrap();
        assert!(check_equation(&m, 5, &[1, 2], &[]).unwrap());
        let (lhs, _) = equation_sides(&m, 5, &[1, 2], &[]).unwrap();
        assert_eq!(lhs.table, vec![0]);
        let m3 = FinSetSplit::new(3, 1).unwrap();
        assert!(check_equation(&m3, 18, &[1, 2, 3], &[]).unwrap());
        assert!(check_equation(&m3, 1, &[1, 3], &[1, 2, 0, 3, 1, 2]).unwrap());
        let bad = FinSetSplit::corrupted(2, 1).unwrap();
        assert!(!check_equation(&bad, 2, &[1, 2], &[1, 2]).unwrap());
        assert!(matches!(check_equation(&m, 2, &[1, 2], &[1]), Err(Error::ArityMismatch(_))));
        assert!(matches!(check_equation(&m, 4, &[2, 1], &[]), Err(Error::ColourOrder { .. })));
    }

    #[test]
    fn free_model_sees_only_syntactic_equality() {
        let free = FreeTermModel::new(2);
        assert!(!check_equation(&free, 4, &[1, 2], &[]).unwrap());
        let (l, _) = equation_sides(&free, 5, &[1, 2], &[]).unwrap();
        assert_eq!(l.size(), 2);
        assert!(matches!(l, StructuralTerm::Compose(_)));
    }

    #[test]
    fn exhaustive_small_sweep() {
        for r in 2..=3 {
            for split in 0..=r {
                let m = FinSetSplit::new(r, split).unwrap();
                for eq in EQUATION_IDS {
                    let shape = equation_arity(eq).unwrap();
                    for cols in colour_tuples(r, shape.colours) {
                        let objs: Vec<usize> = (0..shape.objects).map(|i| (i * 7 + eq) % 3).collect();
                        assert!(check_equation(&m, eq, &cols, &objs).unwrap(), "({eq}) at {cols:?} split {split}");
                    }
                }
            }
        }
    }
}

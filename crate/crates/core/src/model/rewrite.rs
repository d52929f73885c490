//! Bounded equational equality for structural terms.
//!
//! Terms are compared by canonical form first, then by evaluation in every
//! FinSet split model (a difference there refutes equality), then by a
//! bidirectional breadth-first search whose single steps replace a
//! subterm matching one side of an equation instance by the other side.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::equations::{colour_tuples, equation_arity, equation_sides, EQUATION_IDS};
use super::free::{canonical_compose, canonical_tensor, eval_term};
use super::{FinSetSplit, FreeTermModel, NFoldModel, ObjWord, StructuralTerm};
use crate::chi::StructKind;
use crate::error::{mismatch, Result};

pub const DEFAULT_DEPTH: usize = 6;
/// Per-side cap on explored terms; beyond it the search gives up.
const NODE_CAP: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub equation: usize,
    pub colours: Vec<usize>,
    /// Left side replaced by right side.
    pub forward: bool,
    pub result: StructuralTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermVerdict {
    Proven(Vec<ProofStep>),
    Refuted { split: usize, assignment: Vec<(String, usize)> },
    Unknown,
}

impl TermVerdict {
    pub fn is_proven(&self) -> bool {
        matches!(self, TermVerdict::Proven(_))
    }

    /// Distinct equation ids used by a proof, in first-use order.
    pub fn equations(&self) -> Vec<usize> {
        let mut out = Vec::new();
        if let TermVerdict::Proven(steps) = self {
            for s in steps {
                if !out.contains(&s.equation) {
                    out.push(s.equation);
                }
            }
        }
        out
    }
}

type Signature = Vec<(StructKind, usize, usize)>;

fn signature(t: &StructuralTerm) -> Signature {
    fn go(t: &StructuralTerm, out: &mut Signature) {
        match t {
            StructuralTerm::Id(_) => {}
            StructuralTerm::Const { kind, k, l, .. } => out.push((*kind, *k, *l)),
            StructuralTerm::Tensor(_, fs) | StructuralTerm::Compose(fs) => fs.iter().for_each(|f| go(f, out)),
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out.sort();
    out
}

fn iotas(t: &StructuralTerm) -> Vec<(usize, usize, &[ObjWord])> {
    fn go<'a>(t: &'a StructuralTerm, out: &mut Vec<(usize, usize, &'a [ObjWord])>) {
        match t {
            StructuralTerm::Const { kind: StructKind::Iota, k, l, args } => out.push((*k, *l, args)),
            StructuralTerm::Id(_) | StructuralTerm::Const { .. } => {}
            StructuralTerm::Tensor(_, fs) | StructuralTerm::Compose(fs) => fs.iter().for_each(|f| go(f, out)),
        }
    }
    let mut out = Vec::new();
    go(t, &mut out);
    out
}

struct Rule {
    equation: usize,
    colours: Vec<usize>,
    forward: bool,
    pattern: StructuralTerm,
    replacement: StructuralTerm,
    vars: Vec<Arc<str>>,
}

/// Oriented equation instances indexed by the constants they contain.
pub struct RuleSet {
    by_signature: HashMap<Signature, Vec<Rule>>,
}

impl RuleSet {
    pub fn new(r: usize) -> Self {
        let free = FreeTermModel::new(r);
        let names: Vec<ObjWord> = "ABCDEFGH".chars().map(|c| ObjWord::var(&format!("?{c}"))).collect();
        let mut by_signature: HashMap<Signature, Vec<Rule>> = HashMap::new();
        for eq in EQUATION_IDS {
            let shape = equation_arity(eq).expect("known equation");
            for colours in colour_tuples(r, shape.colours) {
                let (lhs, rhs) = equation_sides(&free, eq, &colours, &names[..shape.objects]).expect("well typed");
                let (lhs, rhs) = (lhs.canonical(), rhs.canonical());
                for (forward, pattern, replacement) in [(true, &lhs, &rhs), (false, &rhs, &lhs)] {
                    // Identities are never expanded.
                    if pattern.is_identity() {
                        continue;
                    }
                    by_signature.entry(signature(pattern)).or_default().push(Rule {
                        equation: eq,
                        colours: colours.clone(),
                        forward,
                        pattern: pattern.clone(),
                        replacement: replacement.clone(),
                        vars: pattern.variables(),
                    });
                }
            }
        }
        RuleSet { by_signature }
    }

    /// Every rule instance whose pattern is exactly `w`.
    fn matches(&self, w: &StructuralTerm, out: &mut Vec<(StructuralTerm, ProofStep)>) {
        let Some(rules) = self.by_signature.get(&signature(w)) else { return };
        for rule in rules {
            for binding in bindings(rule, w) {
                if rule.pattern.substitute(&binding).canonical() == *w {
                    let result = rule.replacement.substitute(&binding).canonical();
                    let step = ProofStep {
                        equation: rule.equation,
                        colours: rule.colours.clone(),
                        forward: rule.forward,
                        result: result.clone(),
                    };
                    out.push((result, step));
                }
            }
        }
    }

    /// All single-step rewrites of `t` at any position.
    pub fn neighbours(&self, t: &StructuralTerm) -> Vec<(StructuralTerm, ProofStep)> {
        let mut out = Vec::new();
        self.rewrite_at(t, &mut out);
        let mut seen = std::collections::HashSet::new();
        out.retain(|(term, step)| seen.insert((term.clone(), step.equation)));
        out
    }

    fn rewrite_at(&self, t: &StructuralTerm, out: &mut Vec<(StructuralTerm, ProofStep)>) {
        self.matches(t, out);
        match t {
            StructuralTerm::Id(_) | StructuralTerm::Const { .. } => {}
            StructuralTerm::Compose(chain) => {
                rewrite_list(self, chain, out, canonical_compose);
            }
            StructuralTerm::Tensor(c, fs) => {
                let c = *c;
                rewrite_list(self, fs, out, |v| canonical_tensor(c, v));
            }
        }
    }
}

/// Rewrites inside proper windows and single elements of a list, rebuilding
/// the whole with `rebuild`.
fn rewrite_list(
    rules: &RuleSet,
    items: &[StructuralTerm],
    out: &mut Vec<(StructuralTerm, ProofStep)>,
    rebuild: impl Fn(Vec<StructuralTerm>) -> StructuralTerm,
) {
    let n = items.len();
    let splice = |i: usize, j: usize, repl: StructuralTerm| {
        let mut v = items[..i].to_vec();
        v.push(repl);
        v.extend_from_slice(&items[j..]);
        rebuild(v)
    };
    for i in 0..n {
        let mut local = Vec::new();
        rules.rewrite_at(&items[i], &mut local);
        for (repl, mut step) in local {
            let whole = splice(i, i + 1, repl);
            step.result = whole.clone();
            out.push((whole, step));
        }
        for j in i + 2..=n {
            if i == 0 && j == n {
                continue;
            }
            let window = rebuild(items[i..j].to_vec());
            let mut local = Vec::new();
            rules.matches(&window, &mut local);
            for (repl, mut step) in local {
                let whole = splice(i, j, repl);
                step.result = whole.clone();
                out.push((whole, step));
            }
        }
    }
}

/// Candidate variable bindings: every pattern variable occurs as a bare
/// argument of some pattern ι, so bindings are read off the subject's ιs.
fn bindings(rule: &Rule, w: &StructuralTerm) -> Vec<BTreeMap<Arc<str>, ObjWord>> {
    if rule.vars.is_empty() {
        return vec![BTreeMap::new()];
    }
    let pat = iotas(&rule.pattern);
    let sub = iotas(w);
    let mut out = Vec::new();
    fn go(
        idx: usize,
        pat: &[(usize, usize, &[ObjWord])],
        sub: &[(usize, usize, &[ObjWord])],
        used: &mut Vec<bool>,
        acc: &mut BTreeMap<Arc<str>, ObjWord>,
        vars: &[Arc<str>],
        out: &mut Vec<BTreeMap<Arc<str>, ObjWord>>,
    ) {
        if vars.iter().all(|v| acc.contains_key(v)) {
            out.push(acc.clone());
            return;
        }
        if idx == pat.len() {
            return;
        }
        let (pk, pl, pargs) = pat[idx];
        let binds_something = pargs.iter().any(|a| matches!(a, ObjWord::Var(v) if !acc.contains_key(v)));
        if !binds_something {
            go(idx + 1, pat, sub, used, acc, vars, out);
            return;
        }
        for (s, &(sk, sl, sargs)) in sub.iter().enumerate() {
            if used[s] || (sk, sl) != (pk, pl) {
                continue;
            }
            let mut next = acc.clone();
            let ok = pargs.iter().zip(sargs).all(|(p, x)| match p {
                ObjWord::Var(v) => match next.get(v) {
                    Some(bound) => bound == x,
                    None => {
                        next.insert(v.clone(), x.clone());
                        true
                    }
                },
                _ => true,
            });
            if ok {
                used[s] = true;
                go(idx + 1, pat, sub, used, &mut next, vars, out);
                used[s] = false;
            }
        }
    }
    let mut used = vec![false; sub.len()];
    go(0, &pat, &sub, &mut used, &mut BTreeMap::new(), &rule.vars, &mut out);
    out
}

/// Looks for a model evaluation telling `a` and `b` apart.
pub fn refute(r: usize, a: &StructuralTerm, b: &StructuralTerm) -> Option<(usize, Vec<(String, usize)>)> {
    let mut vars = a.variables();
    for v in b.variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let patterns: Vec<Box<dyn Fn(usize) -> usize>> = vec![
        Box::new(|_| 1),
        Box::new(|_| 2),
        Box::new(|_| 0),
        Box::new(|i| i % 3),
        Box::new(|i| 1 + i % 2),
        Box::new(|i| (i * 5 + 2) % 4),
    ];
    for split in 0..=r {
        let model = FinSetSplit::new(r, split).expect("split ≤ r");
        for pattern in &patterns {
            let assignment: BTreeMap<Arc<str>, usize> =
                vars.iter().enumerate().map(|(i, v)| (v.clone(), pattern(i))).collect();
            let (Ok(x), Ok(y)) = (eval_term(&model, a, &assignment), eval_term(&model, b, &assignment)) else {
                continue;
            };
            if x != y {
                let shown = assignment.iter().map(|(k, v)| (k.to_string(), *v)).collect();
                return Some((split, shown));
            }
        }
    }
    None
}

/// Decides `a = b` up to `depth` rewrite steps.
pub fn term_equal(model: &FreeTermModel, a: &StructuralTerm, b: &StructuralTerm, depth: usize) -> Result<TermVerdict> {
    term_equal_with(&RuleSet::new(model.arity()), model.arity(), a, b, depth)
}

/// As [`term_equal`], reusing a prepared rule set.
pub fn term_equal_with(
    rules: &RuleSet,
    r: usize,
    a: &StructuralTerm,
    b: &StructuralTerm,
    depth: usize,
) -> Result<TermVerdict> {
    if a.dom() != b.dom() {
        return Err(mismatch(a.dom(), b.dom()));
    }
    if a.cod() != b.cod() {
        return Err(mismatch(a.cod(), b.cod()));
    }
    let (ca, cb) = (a.canonical(), b.canonical());
    if ca == cb {
        return Ok(TermVerdict::Proven(Vec::new()));
    }
    if let Some((split, assignment)) = refute(r, &ca, &cb) {
        return Ok(TermVerdict::Refuted { split, assignment });
    }
    Ok(match search(rules, &ca, &cb, depth) {
        Some(steps) => TermVerdict::Proven(steps),
        None => TermVerdict::Unknown,
    })
}

type Parents = HashMap<StructuralTerm, Option<(StructuralTerm, ProofStep)>>;

fn search(rules: &RuleSet, a: &StructuralTerm, b: &StructuralTerm, depth: usize) -> Option<Vec<ProofStep>> {
    let mut from_a: Parents = HashMap::from([(a.clone(), None)]);
    let mut from_b: Parents = HashMap::from([(b.clone(), None)]);
    let mut front_a: VecDeque<StructuralTerm> = VecDeque::from([a.clone()]);
    let mut front_b: VecDeque<StructuralTerm> = VecDeque::from([b.clone()]);
    for _ in 0..depth {
        let expand_a = front_a.len() <= front_b.len();
        let (front, mine, theirs) = if expand_a {
            (&mut front_a, &mut from_a, &from_b)
        } else {
            (&mut front_b, &mut from_b, &from_a)
        };
        let mut next = VecDeque::new();
        let mut meet = None;
        'level: for t in front.drain(..) {
            for (u, step) in rules.neighbours(&t) {
                if mine.contains_key(&u) {
                    continue;
                }
                mine.insert(u.clone(), Some((t.clone(), step)));
                if theirs.contains_key(&u) {
                    meet = Some(u);
                    break 'level;
                }
                next.push_back(u);
            }
        }
        if let Some(m) = meet {
            return Some(assemble(&from_a, &from_b, &m));
        }
        if next.is_empty() || mine.len() > NODE_CAP {
            return None;
        }
        *front = next;
    }
    None
}

fn assemble(from_a: &Parents, from_b: &Parents, meet: &StructuralTerm) -> Vec<ProofStep> {
    let mut head = Vec::new();
    let mut cur = meet.clone();
    while let Some(Some((prev, step))) = from_a.get(&cur) {
        head.push(step.clone());
        cur = prev.clone();
    }
    head.reverse();
    // Walk back to b, flipping each step so that it reads forwards.
    let mut cur = meet.clone();
    while let Some(Some((prev, step))) = from_b.get(&cur) {
        head.push(ProofStep {
            equation: step.equation,
            colours: step.colours.clone(),
            forward: !step.forward,
            result: prev.clone(),
        });
        cur = prev.clone();
    }
    head
}

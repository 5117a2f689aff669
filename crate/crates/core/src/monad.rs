//! Finitary Set-monads with canonically indexed carriers.
//!
//! `T(n)` is always `{0..size(n)}`; elements of `T(T(n))` are indices into
//! the carrier of `T(size(n))`, so every table is a plain `Vec<usize>`.

use crate::error::{Budget, Error, Result};
use crate::relation::Relation;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

pub trait Monad: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// `|T(n)|`, or `None` when it cannot be indexed.
    fn size(&self, n: usize) -> Option<usize>;

    /// `e_n: n → T(n)`.
    fn unit(&self, n: usize) -> Vec<usize>;

    /// `m_n: T(T(n)) → T(n)`. Callers check `size(size(n))` first.
    fn mult(&self, n: usize) -> Vec<usize>;

    /// `T(f): T(f.len()) → T(target)`.
    fn map(&self, f: &[usize], target: usize) -> Vec<usize>;

    fn label(&self, n: usize, idx: usize) -> String;

    fn parse_label(&self, n: usize, s: &str) -> Option<usize>;

    /// A direct lifting of a relation, for when the span construction is too large.
    fn lift_relation(&self, _r: &Relation) -> Option<Relation> {
        None
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Monad for Identity {
    fn name(&self) -> &str {
        "id"
    }
    fn size(&self, n: usize) -> Option<usize> {
        Some(n)
    }
    fn unit(&self, n: usize) -> Vec<usize> {
        (0..n).collect()
    }
    fn mult(&self, n: usize) -> Vec<usize> {
        (0..n).collect()
    }
    fn map(&self, f: &[usize], _target: usize) -> Vec<usize> {
        f.to_vec()
    }
    fn label(&self, _n: usize, idx: usize) -> String {
        idx.to_string()
    }
    fn parse_label(&self, n: usize, s: &str) -> Option<usize> {
        s.parse().ok().filter(|&i| i < n)
    }
    fn lift_relation(&self, r: &Relation) -> Option<Relation> {
        Some(r.clone())
    }
}

/// Subsets as bitmasks: element `i` of `T(n)` is the set of bits of `i`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Powerset;

/// Largest `n` whose powerset still has `usize` indices we are willing to build.
const POWERSET_MAX_BITS: usize = 30;

impl Monad for Powerset {
    fn name(&self) -> &str {
        "powerset"
    }
    fn size(&self, n: usize) -> Option<usize> {
        (n <= POWERSET_MAX_BITS).then(|| 1usize << n)
    }
    fn unit(&self, n: usize) -> Vec<usize> {
        (0..n).map(|x| 1usize << x).collect()
    }
    fn mult(&self, n: usize) -> Vec<usize> {
        let tn = 1usize << n;
        let mut out = vec![0usize; 1usize << tn];
        for big in 1..out.len() {
            out[big] = out[big & (big - 1)] | big.trailing_zeros() as usize;
        }
        out
    }
    fn map(&self, f: &[usize], _target: usize) -> Vec<usize> {
        let mut out = vec![0usize; 1usize << f.len()];
        for s in 1..out.len() {
            out[s] = out[s & (s - 1)] | (1usize << f[s.trailing_zeros() as usize]);
        }
        out
    }
    fn label(&self, _n: usize, idx: usize) -> String {
        let items: Vec<String> = (0..usize::BITS as usize)
            .filter(|b| idx >> b & 1 == 1)
            .map(|b| b.to_string())
            .collect();
        format!("{{{}}}", items.join(","))
    }
    fn parse_label(&self, n: usize, s: &str) -> Option<usize> {
        let inner = s.trim().strip_prefix('{')?.strip_suffix('}')?;
        let mut mask = 0usize;
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let i: usize = part.parse().ok()?;
            if i >= n {
                return None;
            }
            mask |= 1 << i;
        }
        Some(mask)
    }
    /// Egli-Milner: `A ~ B` iff every `a ∈ A` sees some `b ∈ B` and every `b ∈ B` is seen.
    fn lift_relation(&self, r: &Relation) -> Option<Relation> {
        let (nr, nc) = (r.rows(), r.cols());
        if nr > 20 || nc > 20 || (1usize << nr).saturating_mul(1usize << nc) > 1 << 26 {
            return None;
        }
        let fwd: Vec<usize> = (0..nr)
            .map(|a| (0..nc).filter(|&b| r.get(a, b)).fold(0, |m, b| m | 1 << b))
            .collect();
        let bwd: Vec<usize> = (0..nc)
            .map(|b| (0..nr).filter(|&a| r.get(a, b)).fold(0, |m, a| m | 1 << a))
            .collect();
        let mut img = vec![0usize; 1 << nr];
        for s in 1..img.len() {
            img[s] = img[s & (s - 1)] | fwd[s.trailing_zeros() as usize];
        }
        let mut pre = vec![0usize; 1 << nc];
        for s in 1..pre.len() {
            pre[s] = pre[s & (s - 1)] | bwd[s.trailing_zeros() as usize];
        }
        Some(Relation::from_fn(1 << nr, 1 << nc, |a, b| {
            a & !pre[b] == 0 && b & !img[a] == 0
        }))
    }
}

/// Ultrafilters on a finite set. All of them are principal, so `U(n) ≅ n`;
/// index `x` stands for the family of all subsets containing `x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Ultrafilter;

impl Ultrafilter {
    /// The subsets (as bitmasks) belonging to the ultrafilter with index `idx`.
    pub fn family(n: usize, idx: usize) -> Vec<usize> {
        (0..1usize << n).filter(|s| s >> idx & 1 == 1).collect()
    }
}

impl Monad for Ultrafilter {
    fn name(&self) -> &str {
        "ultra"
    }
    fn size(&self, n: usize) -> Option<usize> {
        Some(n)
    }
    fn unit(&self, n: usize) -> Vec<usize> {
        (0..n).collect()
    }
    fn mult(&self, n: usize) -> Vec<usize> {
        (0..n).collect()
    }
    fn map(&self, f: &[usize], _target: usize) -> Vec<usize> {
        f.to_vec()
    }
    fn label(&self, _n: usize, idx: usize) -> String {
        format!("u{idx}")
    }
    fn parse_label(&self, n: usize, s: &str) -> Option<usize> {
        let s = s.strip_prefix('u').unwrap_or(s);
        s.parse().ok().filter(|&i| i < n)
    }
    fn lift_relation(&self, r: &Relation) -> Option<Relation> {
        Some(r.clone())
    }
}

pub const MONAD_NAMES: &[&str] = &["id", "powerset", "ultra"];

pub fn monad_by_name(name: &str) -> Option<Arc<dyn Monad>> {
    match name {
        "id" | "identity" => Some(Arc::new(Identity)),
        "powerset" | "P" => Some(Arc::new(Powerset)),
        "ultra" | "ultrafilter" | "finite_ultrafilter" | "ultra_fin" => Some(Arc::new(Ultrafilter)),
        _ => None,
    }
}

pub fn builtin_monads() -> Vec<Arc<dyn Monad>> {
    MONAD_NAMES.iter().filter_map(|n| monad_by_name(n)).collect()
}

/// `|T(n)|` within the budget.
pub fn t_size(t: &dyn Monad, n: usize, budget: &Budget) -> Result<usize> {
    let s = t.size(n).ok_or_else(|| Error::BudgetExceeded {
        what: format!("carrier of {}({n})", t.name()),
        needed: u128::MAX,
        limit: budget.max_enum,
    })?;
    budget.check(s as u128, || format!("carrier of {}({n})", t.name()))?;
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawFailure {
    pub law: String,
    pub n: usize,
    pub at: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadLawReport {
    pub monad: String,
    pub max_n: usize,
    pub instances: u64,
    pub failures: Vec<LawFailure>,
}

impl MonadLawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn compose_fn(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&x| g[x]).collect()
}

/// Every function `a → b`, in odometer order.
pub fn all_functions(a: usize, b: usize) -> Vec<Vec<usize>> {
    if b == 0 {
        return if a == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut f = vec![0usize; a];
    loop {
        out.push(f.clone());
        if !crate::enriched::advance_fn(&mut f, b) {
            break;
        }
    }
    out
}

/// Unit, associativity, functor and naturality laws for `|X| ≤ max_n`.
pub fn check_monad_laws(t: &dyn Monad, max_n: usize, budget: &Budget) -> Result<MonadLawReport> {
    check_laws_with(t, max_n, budget, |n| t.mult(n))
}

/// As [`check_monad_laws`] but with the multiplication supplied by `mult`.
pub fn check_laws_with(
    t: &dyn Monad,
    max_n: usize,
    budget: &Budget,
    mult: impl Fn(usize) -> Vec<usize>,
) -> Result<MonadLawReport> {
    let mut rep = MonadLawReport {
        monad: t.name().into(),
        max_n,
        ..Default::default()
    };
    let fail = |rep: &mut MonadLawReport, law: &str, n: usize, at: usize| {
        rep.failures.push(LawFailure {
            law: law.into(),
            n,
            at,
        })
    };
    for n in 0..=max_n {
        let tn = t_size(t, n, budget)?;
        let ttn = t_size(t, tn, budget)?;
        let tttn = t_size(t, ttn, budget)?;
        let e = t.unit(n);
        let m = mult(n);
        let e_t = t.unit(tn);
        let te = t.map(&e, tn);
        for x in 0..tn {
            rep.instances += 2;
            if m[e_t[x]] != x {
                fail(&mut rep, "m·e_T = id", n, x);
            }
            if m[te[x]] != x {
                fail(&mut rep, "m·Te = id", n, x);
            }
        }
        let tm = t.map(&m, tn);
        let m_t = mult(tn);
        for big in 0..tttn {
            rep.instances += 1;
            if m[tm[big]] != m[m_t[big]] {
                fail(&mut rep, "m·Tm = m·m_T", n, big);
            }
        }
        let id: Vec<usize> = (0..n).collect();
        let tid = t.map(&id, n);
        for (x, &y) in tid.iter().enumerate() {
            rep.instances += 1;
            if x != y {
                fail(&mut rep, "T(id) = id", n, x);
            }
        }
    }
    // Functoriality and naturality over all maps between small sets.
    let fmax = max_n.min(3);
    for a in 0..=fmax {
        for b in 0..=fmax {
            let ta = t_size(t, a, budget)?;
            let tb = t_size(t, b, budget)?;
            let ea = t.unit(a);
            let eb = t.unit(b);
            let ma = mult(a);
            let mb = mult(b);
            for f in all_functions(a, b) {
                let tf = t.map(&f, b);
                for x in 0..a {
                    rep.instances += 1;
                    if tf[ea[x]] != eb[f[x]] {
                        fail(&mut rep, "e natural", a, x);
                    }
                }
                let ttf = t.map(&tf, tb);
                for (big, &img) in ttf.iter().enumerate() {
                    rep.instances += 1;
                    if mb[img] != tf[ma[big]] {
                        fail(&mut rep, "m natural", a, big);
                    }
                }
                for c in 0..=fmax {
                    for g in all_functions(b, c) {
                        let tg = t.map(&g, c);
                        let tgf = t.map(&compose_fn(&g, &f), c);
                        for x in 0..ta {
                            rep.instances += 1;
                            if tgf[x] != tg[tf[x]] {
                                fail(&mut rep, "T(g·f) = Tg·Tf", a, x);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// A failed weak-pullback square: the pair that has no common preimage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BCWitness {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub pair: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BCReport {
    pub monad: String,
    pub max_n: usize,
    pub functor_bc: bool,
    pub m_bc: bool,
    pub squares: u64,
    pub functor_witness: Option<BCWitness>,
    pub m_witness: Option<BCWitness>,
}

/// Weak-pullback tests for `T` on all pullback squares of sets of size at
/// most `max_n`, and for the naturality squares of `m`.
pub fn check_bc(t: &dyn Monad, max_n: usize, budget: &Budget) -> Result<BCReport> {
    let mut rep = BCReport {
        monad: t.name().into(),
        max_n,
        functor_bc: true,
        m_bc: true,
        squares: 0,
        functor_witness: None,
        m_witness: None,
    };
    for c in 0..=max_n {
        for a in 0..=max_n {
            let fs = all_functions(a, c);
            for b in 0..=max_n {
                let gs = all_functions(b, c);
                for f in &fs {
                    for g in &gs {
                        rep.squares += 1;
                        if let Some(pair) = functor_square_failure(t, f, g, c, budget)? {
                            if rep.functor_bc {
                                rep.functor_bc = false;
                                rep.functor_witness = Some(BCWitness {
                                    f: f.clone(),
                                    g: g.clone(),
                                    pair,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    for a in 0..=max_n {
        let ta = t_size(t, a, budget)?;
        let tta = t_size(t, ta, budget)?;
        let ma = t.mult(a);
        for b in 0..=max_n {
            let tb = t_size(t, b, budget)?;
            let ttb = t_size(t, tb, budget)?;
            let mb = t.mult(b);
            budget.check((ta as u128) * (ttb as u128), || "m naturality square".into())?;
            for f in all_functions(a, b) {
                rep.squares += 1;
                let tf = t.map(&f, b);
                let ttf = t.map(&tf, tb);
                let hit: HashSet<(usize, usize)> = (0..tta).map(|big| (ma[big], ttf[big])).collect();
                'outer: for x in 0..ta {
                    for big_b in 0..ttb {
                        if tf[x] == mb[big_b] && !hit.contains(&(x, big_b)) {
                            if rep.m_bc {
                                rep.m_bc = false;
                                rep.m_witness = Some(BCWitness {
                                    f: f.clone(),
                                    g: vec![],
                                    pair: (x, big_b),
                                });
                            }
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

fn functor_square_failure(
    t: &dyn Monad,
    f: &[usize],
    g: &[usize],
    c: usize,
    budget: &Budget,
) -> Result<Option<(usize, usize)>> {
    let (a, b) = (f.len(), g.len());
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    for x in 0..a {
        for y in 0..b {
            if f[x] == g[y] {
                p1.push(x);
                p2.push(y);
            }
        }
    }
    t_size(t, p1.len(), budget)?;
    let tp1 = t.map(&p1, a);
    let tp2 = t.map(&p2, b);
    let hit: HashSet<(usize, usize)> = tp1.iter().copied().zip(tp2.iter().copied()).collect();
    let tf = t.map(f, c);
    let tg = t.map(g, c);
    for (x, &fx) in tf.iter().enumerate() {
        for (y, &gy) in tg.iter().enumerate() {
            if fx == gy && !hit.contains(&(x, y)) {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// Hypotheses consumed by conditional results downstream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub monad: String,
    /// `|T1|`.
    pub t1: usize,
    pub t_empty_is_empty: bool,
    pub functor_bc: bool,
    pub m_bc: bool,
    /// Largest set size the BC verdicts were checked on.
    pub bc_checked_up_to: usize,
}

impl Capabilities {
    pub fn compute(t: &dyn Monad, budget: &Budget) -> Result<Self> {
        let max_n = 3;
        let bc = check_bc(t, max_n, budget)?;
        Ok(Capabilities {
            monad: t.name().into(),
            t1: t_size(t, 1, budget)?,
            t_empty_is_empty: t_size(t, 0, budget)? == 0,
            functor_bc: bc.functor_bc,
            m_bc: bc.m_bc,
            bc_checked_up_to: max_n,
        })
    }

    pub fn t1_is_one(&self) -> bool {
        self.t1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powerset_carrier_and_union() {
        let p = Powerset;
        assert_eq!(p.size(2), Some(4));
        let labels: Vec<String> = (0..4).map(|i| p.label(2, i)).collect();
        assert_eq!(labels, ["{}", "{0}", "{1}", "{0,1}"]);
        // {{0},{0,1}} is the set of subset indices 1 and 3
        let m = p.mult(2);
        assert_eq!(m[(1 << 1) | (1 << 3)], 3);
        assert_eq!(p.parse_label(2, "{1,0}"), Some(3));
        assert_eq!(p.parse_label(2, "{2}"), None);
    }

    #[test]
    fn empty_carriers() {
        assert_eq!(Powerset.size(0), Some(1));
        assert_eq!(Ultrafilter.size(0), Some(0));
        assert_eq!(Identity.size(0), Some(0));
    }

    /// Independent count: all families of subsets of a 3-set that satisfy the
    /// ultrafilter axioms.
    #[test]
    fn ultrafilters_on_three_points_are_principal() {
        let n = 3;
        let subsets = 1usize << n;
        let full = subsets - 1;
        let mut found = Vec::new();
        for fam in 0u32..(1 << subsets) {
            let has = |s: usize| fam >> s & 1 == 1;
            if has(0) || !has(full) {
                continue;
            }
            let up = (0..subsets).all(|s| !has(s) || (0..subsets).all(|t| s & !t != 0 || has(t)));
            let meets = (0..subsets).all(|s| (0..subsets).all(|t| !(has(s) && has(t)) || has(s & t)));
            let prime = (0..subsets).all(|s| has(s) || has(full & !s));
            if up && meets && prime {
                found.push(fam);
            }
        }
        assert_eq!(found.len(), 3);
        for x in 0..n {
            let fam: u32 = Ultrafilter::family(n, x).iter().fold(0, |m, s| m | 1 << s);
            assert!(found.contains(&fam));
        }
    }

    #[test]
    fn identity_and_ultra_laws() {
        let b = Budget::default();
        assert!(check_monad_laws(&Identity, 4, &b).unwrap().passed());
        assert!(check_monad_laws(&Ultrafilter, 4, &b).unwrap().passed());
    }

    #[test]
    fn powerset_laws_up_to_two() {
        let rep = check_monad_laws(&Powerset, 2, &Budget::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn powerset_laws_at_three_exceed_budget() {
        let err = check_monad_laws(&Powerset, 3, &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn corrupted_mult_is_caught() {
        let rep = check_laws_with(&Powerset, 1, &Budget::default(), |n| {
            let mut m = Powerset.mult(n);
            if n == 1 {
                // send {{0}} to the empty set
                m[1 << 1] = 0;
            }
            m
        })
        .unwrap();
        assert!(!rep.passed());
        assert!(rep.failures.iter().any(|f| f.law == "m·e_T = id"));
    }

    #[test]
    fn bc_verdicts() {
        let b = Budget::default();
        for t in builtin_monads() {
            let rep = check_bc(t.as_ref(), 3, &b).unwrap();
            assert!(rep.functor_bc, "{}", t.name());
            assert!(rep.m_bc, "{}", t.name());
        }
    }

    #[test]
    fn capabilities() {
        let b = Budget::default();
        let c = Capabilities::compute(&Powerset, &b).unwrap();
        assert_eq!(c.t1, 2);
        assert!(!c.t1_is_one());
        assert!(Capabilities::compute(&Ultrafilter, &b).unwrap().t1_is_one());
    }

    #[test]
    fn egli_milner_matches_span() {
        let r = Relation::from_pairs(2, 2, &[(0, 0), (0, 1), (1, 1)]);
        let lifted = Powerset.lift_relation(&r).unwrap();
        // {0} ~ {0,1}, {1} ~ {1}, {1} !~ {0}, {} ~ {} only
        assert!(lifted.get(1, 3));
        assert!(lifted.get(2, 2));
        assert!(!lifted.get(2, 1));
        assert!(lifted.get(0, 0));
        assert!(!lifted.get(0, 1));
    }
}

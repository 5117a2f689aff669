//! Finite incarnations: preorders, finite topological spaces, and variable
//! sets over approach-style structures.
//!
//! On finite carriers every ultrafilter is principal, so `(U, V)`-structures
//! reduce to V-matrices `X ⇸ X` indexed by points. The approach analysis here
//! exercises the level-set formulas only; none of the behaviour of infinite
//! approach spaces is reproduced.

use crate::completeness::{decide_lawvere_complete, Enumeration};
use crate::error::{Error, Result};
use crate::laxext::LaxExtension;
use crate::quantale::{QElem, Quantale};
use crate::relation::Relation;
use crate::tvcat::{is_tvbimodule, TVCategory};
use crate::vmatrix::VMatrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

/// A reflexive, transitive relation `le` with `le.get(x, y)` meaning `x ≤ y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePreorder {
    le: Relation,
}

impl FinitePreorder {
    pub fn new(le: Relation) -> Result<Self> {
        let n = le.rows();
        if le.cols() != n {
            return Err(Error::Invalid("preorder relation must be square".into()));
        }
        if let Some(x) = (0..n).find(|&x| !le.get(x, x)) {
            return Err(Error::Invalid(format!("not reflexive at {x}")));
        }
        if !le.then(&le).is_subset(&le) {
            return Err(Error::Invalid("not transitive".into()));
        }
        Ok(FinitePreorder { le })
    }

    pub fn discrete(n: usize) -> Self {
        FinitePreorder {
            le: Relation::from_fn(n, n, |x, y| x == y),
        }
    }

    pub fn chain(n: usize) -> Self {
        FinitePreorder {
            le: Relation::from_fn(n, n, |x, y| x <= y),
        }
    }

    pub fn size(&self) -> usize {
        self.le.rows()
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.le.get(x, y)
    }

    pub fn relation(&self) -> &Relation {
        &self.le
    }

    fn bool_matrix(&self, q: &Arc<Quantale>, rel: impl Fn(usize, usize) -> bool) -> VMatrix {
        let n = self.size();
        VMatrix::from_fn(q.clone(), n, n, |x, y| if rel(x, y) { q.top() } else { q.bottom() })
    }

    /// The structure over `ext` with `a(ẋ, y) = [x ≤ y]`; needs `T` with `TX = X`.
    pub fn to_tvcategory(&self, ext: &Arc<LaxExtension>) -> Result<TVCategory> {
        if ext.t_size(self.size())? != self.size() {
            return Err(Error::Invalid(format!("{} does not fix finite sets", ext.monad().name())));
        }
        TVCategory::new(ext.clone(), self.bool_matrix(ext.quantale(), |x, y| self.le(x, y)))
    }

    pub fn is_up_set(&self, s: &[bool]) -> bool {
        (0..self.size()).all(|x| !s[x] || (0..self.size()).all(|y| !self.le(x, y) || s[y]))
    }

    pub fn is_down_set(&self, s: &[bool]) -> bool {
        (0..self.size()).all(|y| !s[y] || (0..self.size()).all(|x| !self.le(x, y) || s[x]))
    }
}

/// Every preorder on `n` labelled points, by brute force over relations.
pub fn all_preorders(n: usize) -> Vec<FinitePreorder> {
    let off: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|(x, y)| x != y).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << off.len()) {
        let mut r = Relation::from_fn(n, n, |x, y| x == y);
        for (i, &(x, y)) in off.iter().enumerate() {
            if mask >> i & 1 == 1 {
                r.set(x, y, true);
            }
        }
        if let Ok(p) = FinitePreorder::new(r) {
            out.push(p);
        }
    }
    out
}

/// Topologies on `n` points as bitmask families of open sets, found by
/// filtering all families of subsets for closure under `∪`, `∩`, `∅`, `X`.
pub fn all_topologies(n: usize) -> Vec<Vec<u32>> {
    assert!(n <= 4, "topology enumeration is doubly exponential");
    let subsets = 1usize << n;
    let full = (subsets - 1) as u32;
    let mut out = Vec::new();
    for fam in 0u64..(1u64 << subsets) {
        let has = |s: u32| fam >> s & 1 == 1;
        if !has(0) || !has(full) {
            continue;
        }
        let members: Vec<u32> = (0..subsets as u32).filter(|&s| has(s)).collect();
        if members.iter().all(|&a| members.iter().all(|&b| has(a | b) && has(a & b))) {
            out.push(members);
        }
    }
    out
}

/// A finite space stored by its specialization order: `x ⊑ y` iff `x ∈ cl{y}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    spec: FinitePreorder,
}

impl FiniteSpace {
    pub fn from_specialization(spec: FinitePreorder) -> Self {
        FiniteSpace { spec }
    }

    /// From an open-set family given as bitmasks.
    pub fn from_opens(n: usize, opens: &[u32]) -> Result<Self> {
        let set: BTreeSet<u32> = opens.iter().copied().collect();
        let full = ((1u64 << n) - 1) as u32;
        if !set.contains(&0) || !set.contains(&full) {
            return Err(Error::Invalid("opens must contain the empty set and the carrier".into()));
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&(a | b)) || !set.contains(&(a & b)) {
                    return Err(Error::Invalid(format!("opens not closed under union/intersection at {a:b}, {b:b}")));
                }
            }
        }
        let le = Relation::from_fn(n, n, |x, y| set.iter().all(|&u| u >> x & 1 == 0 || u >> y & 1 == 1));
        Ok(FiniteSpace {
            spec: FinitePreorder::new(le)?,
        })
    }

    pub fn size(&self) -> usize {
        self.spec.size()
    }

    pub fn specialization(&self) -> &FinitePreorder {
        &self.spec
    }

    /// Opens are the up-sets of the specialization order.
    pub fn opens(&self) -> Vec<u32> {
        self.subsets().filter(|&s| self.spec.is_up_set(&bits(s, self.size()))).collect()
    }

    /// Closed sets are the down-sets.
    pub fn closed_sets(&self) -> Vec<u32> {
        self.subsets().filter(|&s| self.spec.is_down_set(&bits(s, self.size()))).collect()
    }

    pub fn closure_of_point(&self, x: usize) -> u32 {
        (0..self.size()).filter(|&y| self.spec.le(y, x)).fold(0, |acc, y| acc | 1 << y)
    }

    fn subsets(&self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.size())
    }

    /// The `(U, 2)`-structure: `ẋ → y` iff `y ∈ cl{x}`.
    pub fn to_tvcategory(&self, ext: &Arc<LaxExtension>) -> Result<TVCategory> {
        let conv = FinitePreorder {
            le: self.spec.le.transpose(),
        };
        conv.to_tvcategory(ext)
    }
}

fn bits(s: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| s >> i & 1 == 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub roundtrip: bool,
    pub lawvere_ultra: bool,
    pub lawvere_identity: bool,
    pub agree: bool,
}

/// Preorder → `(U,2)`-category → underlying order, with both completeness verdicts.
pub fn preorder_roundtrip(p: &FinitePreorder, ultra: &Arc<LaxExtension>, ident: &Arc<LaxExtension>) -> Result<RoundTrip> {
    let x = p.to_tvcategory(ultra)?;
    let back = x.underlying()?;
    let q = ultra.quantale();
    let n = p.size();
    let roundtrip = (0..n).all(|i| (0..n).all(|j| (back.get(i, j) == q.top()) == p.le(i, j)));
    let lawvere_ultra = decide_lawvere_complete(&x, Enumeration::Pruned)?.0.complete;
    let lawvere_identity = decide_lawvere_complete(&p.to_tvcategory(ident)?, Enumeration::Pruned)?.0.complete;
    Ok(RoundTrip {
        roundtrip,
        lawvere_ultra,
        lawvere_identity,
        agree: lawvere_ultra == lawvere_identity,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrreducibleClosed {
    /// Bitmask of the closed set.
    pub set: u32,
    pub generic_points: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoberReport {
    pub closed_sets: usize,
    pub irreducible: Vec<IrreducibleClosed>,
    pub weakly_sober: bool,
    pub lawvere_complete: bool,
    pub agree: bool,
}

pub fn weakly_sober(space: &FiniteSpace, ultra: &Arc<LaxExtension>) -> Result<SoberReport> {
    let closed = space.closed_sets();
    let mut irreducible = Vec::new();
    for &a in &closed {
        if a == 0 {
            continue;
        }
        let proper: Vec<u32> = closed.iter().copied().filter(|&b| b != a && b & !a == 0).collect();
        let splits = proper.iter().any(|&b| proper.iter().any(|&c| b | c == a));
        if !splits {
            let generic_points = (0..space.size())
                .filter(|&x| a >> x & 1 == 1 && space.closure_of_point(x) == a)
                .collect();
            irreducible.push(IrreducibleClosed { set: a, generic_points });
        }
    }
    let weakly_sober = irreducible.iter().all(|i| !i.generic_points.is_empty());
    let x = space.to_tvcategory(ultra)?;
    let lawvere_complete = decide_lawvere_complete(&x, Enumeration::Pruned)?.0.complete;
    Ok(SoberReport {
        closed_sets: closed.len(),
        irreducible,
        weakly_sober,
        lawvere_complete,
        agree: weakly_sober == lawvere_complete,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreorderPairCheck {
    /// `(A, B)` bitmasks: `A` up-closed, `B` down-closed, `A∩B ≠ ∅`, `B ≤ A`.
    pub expected: Vec<(u32, u32)>,
    pub enumerated: Vec<(u32, u32)>,
    /// For each pair, its representatives are exactly `A∩B`.
    pub representatives_match: bool,
    pub agree: bool,
}

/// Adjoint pairs on a preorder over `(id, 2)` against the up-set/down-set description.
pub fn preorder_pair_check(p: &FinitePreorder, ident: &Arc<LaxExtension>) -> Result<PreorderPairCheck> {
    let n = p.size();
    let mut expected = Vec::new();
    for a in 0..1u32 << n {
        for b in 0..1u32 << n {
            let (sa, sb) = (bits(a, n), bits(b, n));
            let dominated = (0..n).all(|x| !sa[x] || (0..n).all(|y| !sb[y] || p.le(y, x)));
            if p.is_up_set(&sa) && p.is_down_set(&sb) && a & b != 0 && dominated {
                expected.push((a, b));
            }
        }
    }
    let x = p.to_tvcategory(ident)?;
    let (_, pairs) = decide_lawvere_complete(&x, Enumeration::Pruned)?;
    let top = ident.quantale().top();
    let mask = |v: &[QElem]| v.iter().enumerate().filter(|(_, &u)| u == top).fold(0u32, |acc, (i, _)| acc | 1 << i);
    let mut enumerated = Vec::new();
    let mut representatives_match = true;
    for pr in &pairs {
        let (a, b) = (mask(pr.phi.data()), mask(pr.psi.data()));
        enumerated.push((a, b));
        let meet: Vec<usize> = (0..n).filter(|&i| (a & b) >> i & 1 == 1).collect();
        representatives_match &= pr.representatives == meet;
    }
    expected.sort_unstable();
    enumerated.sort_unstable();
    Ok(PreorderPairCheck {
        agree: expected == enumerated,
        expected,
        enumerated,
        representatives_match,
    })
}

/// Level sets `A_v = {x | v ≤ φ(x)}`, indexed by quantale element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSet {
    pub levels: Vec<u32>,
}

impl VariableSet {
    pub fn of_map(q: &Quantale, phi: &[QElem]) -> Self {
        VariableSet {
            levels: q
                .elements()
                .map(|v| (0..phi.len()).filter(|&x| q.leq(v, phi[x])).fold(0, |acc, x| acc | 1 << x))
                .collect(),
        }
    }

    /// Monotone in `v` with `A_⊥ = X`: the finite-chain form of the level-set condition.
    pub fn is_variable_set(&self, q: &Quantale, n: usize) -> bool {
        let full = ((1u64 << n) - 1) as u32;
        self.levels[q.bottom().index()] == full
            && q.elements().all(|u| {
                q.elements()
                    .all(|v| !q.leq(u, v) || self.levels[v.index()] & !self.levels[u.index()] == 0)
            })
    }

    /// `x ↦ ⋁{v | x ∈ A_v}`.
    pub fn to_map(&self, q: &Quantale, n: usize) -> Vec<QElem> {
        (0..n)
            .map(|x| q.join_all(q.elements().filter(|v| self.levels[v.index()] >> x & 1 == 1)))
            .collect()
    }

    pub fn level(&self, v: QElem) -> u32 {
        self.levels[v.index()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSetVerdict {
    pub phi: Vec<String>,
    pub closed: bool,
    pub irreducible: bool,
    pub representable_by: Vec<usize>,
    /// `closed` matches the bimodule test on `φ`.
    pub closed_agrees: bool,
    /// `closed && irreducible` matches "`φ` has a right adjoint".
    pub adjoint_agrees: bool,
    /// The right adjoint read off the `𝒜_v` equals the enumerated one.
    pub psi_agrees: bool,
    /// Representability matches the enumerated representatives.
    pub representable_agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurrogateReport {
    pub maps: Vec<VariableSetVerdict>,
    /// Every irreducible closed variable set is representable.
    pub variable_set_complete: bool,
    pub lawvere_complete: bool,
    pub agree: bool,
}

/// Level-set analysis of `φ: X → V` for a `(U, V)`-category over a chain.
pub fn approach_surrogate(x: &TVCategory) -> Result<SurrogateReport> {
    let ext = x.ext();
    let q = ext.quantale().clone();
    if !q.is_chain() {
        return Err(Error::Invalid(format!("{} is not a chain", q.name())));
    }
    let n = x.size();
    if x.t_size() != n || ext.t_size(1)? != 1 {
        return Err(Error::Invalid("approach analysis needs TX = X".into()));
    }
    let (verdict, pairs) = decide_lawvere_complete(x, Enumeration::Pruned)?;
    let one = crate::completeness::unit_category(ext)?;
    let a = |s: usize, t: usize| x.get(s, t);
    let d = |set: u32, t: usize| q.join_all((0..n).filter(|&s| set >> s & 1 == 1).map(|s| a(s, t)));

    let mut maps = Vec::new();
    let mut variable_set_complete = true;
    for f in crate::monad::all_functions(n, q.size()) {
        let phi: Vec<QElem> = f.iter().map(|&i| QElem(i as u8)).collect();
        let vs = VariableSet::of_map(&q, &phi);
        debug_assert!(vs.is_variable_set(&q, n) && vs.to_map(&q, n) == phi);
        // v ≤ d(A_u, x) ⇒ x ∈ A_{u⊗v}
        let closed = q.elements().all(|u| {
            q.elements().all(|v| {
                (0..n).all(|t| !q.leq(v, d(vs.level(u), t)) || vs.level(q.tensor(u, v)) >> t & 1 == 1)
            })
        });
        // 𝒜_v = {𝔵 | ∀u ∀x ∈ A_u: u⊗v ≤ a(𝔵, x)}
        let script = |v: QElem| -> u32 {
            (0..n)
                .filter(|&s| {
                    q.elements().all(|u| (0..n).all(|t| vs.level(u) >> t & 1 == 0 || q.leq(q.tensor(u, v), a(s, t))))
                })
                .fold(0, |acc, s| acc | 1 << s)
        };
        let irreducible = vs.level(q.unit()) & script(q.unit()) != 0;
        let representable_by: Vec<usize> = (0..n)
            .filter(|&s| q.elements().all(|v| vs.level(v) == (0..n).filter(|&t| q.leq(v, a(s, t))).fold(0, |acc, t| acc | 1 << t)))
            .collect();
        if closed && irreducible && representable_by.is_empty() {
            variable_set_complete = false;
        }

        let phi_m = VMatrix::new(q.clone(), 1, n, phi.clone())?;
        let is_bimodule = is_tvbimodule(&phi_m, &one, x)?;
        let pair = pairs.iter().find(|p| p.phi == phi_m);
        let psi_from_levels: Vec<QElem> = (0..n)
            .map(|s| q.join_all(q.elements().filter(|&v| script(v) >> s & 1 == 1)))
            .collect();
        let (psi_agrees, representable_agrees) = match pair {
            Some(p) => (
                p.psi.data() == psi_from_levels.as_slice(),
                p.representatives == representable_by,
            ),
            None => (true, true),
        };
        maps.push(VariableSetVerdict {
            phi: phi.iter().map(|&u| q.label(u).to_string()).collect(),
            closed,
            irreducible,
            closed_agrees: closed == is_bimodule,
            adjoint_agrees: (closed && irreducible) == pair.is_some(),
            psi_agrees,
            representable_agrees,
            representable_by,
        });
    }
    Ok(SurrogateReport {
        maps,
        variable_set_complete,
        lawvere_complete: verdict.complete,
        agree: variable_set_complete == verdict.complete,
    })
}

impl SurrogateReport {
    pub fn passed(&self) -> bool {
        self.agree
            && self
                .maps
                .iter()
                .all(|m| m.closed_agrees && m.adjoint_agrees && m.psi_agrees && m.representable_agrees)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use crate::monad::monad_by_name;
    use crate::quantale::builtin;
    use crate::tvcat::all_tvcategories;

    fn ext(q: &str, t: &str) -> Arc<LaxExtension> {
        Arc::new(
            LaxExtension::new(Arc::new(builtin(q).unwrap()), monad_by_name(t).unwrap(), Budget::default())
                .unwrap(),
        )
    }

    #[test]
    fn preorder_counts_match_topology_counts() {
        for (n, expect) in [(0, 1), (1, 1), (2, 4), (3, 29), (4, 355)] {
            assert_eq!(all_preorders(n).len(), expect);
            assert_eq!(all_topologies(n).len(), expect);
        }
    }

    #[test]
    fn opens_and_specialization_are_inverse() {
        for t in all_topologies(3) {
            let s = FiniteSpace::from_opens(3, &t).unwrap();
            assert_eq!(s.opens(), t);
        }
    }

    #[test]
    fn sierpinski_and_indiscrete() {
        let u = ext("2", "ultra");
        // opens ∅, {1}, {0,1}: 0 ⊑ 1
        let sierp = FiniteSpace::from_opens(2, &[0, 0b10, 0b11]).unwrap();
        let r = weakly_sober(&sierp, &u).unwrap();
        assert_eq!(r.closed_sets, 3);
        assert!(r.weakly_sober && r.agree);
        let ind = FiniteSpace::from_opens(2, &[0, 0b11]).unwrap();
        let r = weakly_sober(&ind, &u).unwrap();
        assert_eq!(r.irreducible.len(), 1);
        assert_eq!(r.irreducible[0].generic_points, vec![0, 1]);
        assert!(r.weakly_sober && r.lawvere_complete);
    }

    #[test]
    fn roundtrip_on_three_points() {
        let (u, i) = (ext("2", "ultra"), ext("2", "id"));
        for p in all_preorders(3) {
            let r = preorder_roundtrip(&p, &u, &i).unwrap();
            assert!(r.roundtrip && r.agree && r.lawvere_identity);
        }
    }

    #[test]
    fn preorder_pairs_are_up_down_pairs() {
        let i = ext("2", "id");
        for p in all_preorders(3) {
            let c = preorder_pair_check(&p, &i).unwrap();
            assert!(c.agree && c.representatives_match, "{c:?}");
        }
    }

    #[test]
    fn surrogate_on_small_plus3_structures() {
        let e = ext("plus3", "ultra");
        for n in 1..=2 {
            for x in all_tvcategories(&e, n).unwrap() {
                let r = approach_surrogate(&x).unwrap();
                assert!(r.passed(), "{:?}", x.structure());
            }
        }
    }

    #[test]
    fn surrogate_rejects_non_chain() {
        let e = ext("pset2", "ultra");
        let x = TVCategory::discrete(e, 1).unwrap();
        assert!(approach_surrogate(&x).is_err());
    }
}

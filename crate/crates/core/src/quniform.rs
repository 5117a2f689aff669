//! Quasi-uniform spaces on finite carriers, their Cauchy filter pairs, and
//! relation-filter bimodules.
//!
//! Relations on `X` are bitmasks with bit `x·n + y` for `x u y`; subsets of `X`
//! are bitmasks with bit `x`. Filters are proper and finite, hence principal,
//! and are stored by their least member. All quantifiers over filters still
//! range over every member.

use crate::error::{Budget, Error, Result};
use serde::{Deserialize, Serialize};

pub type RelBits = u64;
pub type SetBits = u32;

/// Largest carrier handled; relations must fit in 64 bits.
pub const MAX_POINTS: usize = 8;

fn full_set(n: usize) -> SetBits {
    ((1u64 << n) - 1) as SetBits
}

fn full_rel(n: usize) -> RelBits {
    if n * n == 64 {
        u64::MAX
    } else {
        (1u64 << (n * n)) - 1
    }
}

#[inline]
fn related(r: RelBits, n: usize, x: usize, y: usize) -> bool {
    r >> (x * n + y) & 1 == 1
}

pub fn diagonal(n: usize) -> RelBits {
    (0..n).fold(0, |acc, x| acc | 1 << (x * n + x))
}

/// `s·r`: `x (s·r) z` iff `x r y` and `y s z` for some `y`.
pub fn rel_compose(r: RelBits, s: RelBits, n: usize) -> RelBits {
    let mut out = 0;
    for x in 0..n {
        for y in 0..n {
            if related(r, n, x, y) {
                for z in 0..n {
                    if related(s, n, y, z) {
                        out |= 1 << (x * n + z);
                    }
                }
            }
        }
    }
    out
}

pub fn rel_from_pairs(n: usize, pairs: &[(usize, usize)]) -> RelBits {
    pairs.iter().fold(0, |acc, &(x, y)| acc | 1 << (x * n + y))
}

pub fn rel_pairs(r: RelBits, n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| related(r, n, x, y)).collect()
}

/// Every superset of `least` inside `universe`, `least` first.
fn supersets(least: u64, universe: u64) -> Vec<u64> {
    let free = universe & !least;
    let mut out = Vec::new();
    let mut sub = 0u64;
    loop {
        out.push(least | sub);
        if sub == free {
            break;
        }
        sub = (sub.wrapping_sub(free)) & free;
    }
    out
}

/// `X_{-u x0}`.
fn left_section(u: RelBits, n: usize, x0: usize) -> SetBits {
    (0..n).filter(|&x| related(u, n, x, x0)).fold(0, |acc, x| acc | 1 << x)
}

/// `X_{x0 u -}`.
fn right_section(u: RelBits, n: usize, x0: usize) -> SetBits {
    (0..n).filter(|&y| related(u, n, x0, y)).fold(0, |acc, y| acc | 1 << y)
}

fn product(f: SetBits, g: SetBits, n: usize) -> RelBits {
    let mut out = 0;
    for x in 0..n {
        if f >> x & 1 == 1 {
            for y in 0..n {
                if g >> y & 1 == 1 {
                    out |= 1 << (x * n + y);
                }
            }
        }
    }
    out
}

/// A proper filter of subsets of `X`, stored by its least member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SetFilter {
    pub n: usize,
    pub least: SetBits,
}

impl SetFilter {
    /// The filter generated by `sets`; `None` if it is improper.
    pub fn generated_by(n: usize, sets: &[SetBits]) -> Option<SetFilter> {
        let least = sets.iter().fold(full_set(n), |acc, &s| acc & s);
        (least != 0).then_some(SetFilter { n, least })
    }

    pub fn members(&self) -> Vec<SetBits> {
        supersets(self.least as u64, full_set(self.n) as u64).into_iter().map(|s| s as SetBits).collect()
    }

    pub fn all(n: usize) -> Vec<SetFilter> {
        (1..=full_set(n)).map(|least| SetFilter { n, least }).collect()
    }
}

/// `(𝔣, 𝔤)` with every `F ∩ G` non-empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FilterPair {
    pub f: SetFilter,
    pub g: SetFilter,
}

impl FilterPair {
    pub fn new(f: SetFilter, g: SetFilter) -> Result<FilterPair> {
        for a in f.members() {
            for b in g.members() {
                if a & b == 0 {
                    return Err(Error::Invalid(format!("filter members {a:b} and {b:b} are disjoint")));
                }
            }
        }
        Ok(FilterPair { f, g })
    }

    /// `(𝔣', 𝔤')` with `𝔣' ⊆ 𝔣` and `𝔤' ⊆ 𝔤`.
    pub fn contained_in(&self, other: &FilterPair) -> bool {
        self.f.members().iter().all(|s| other.f.members().contains(s))
            && self.g.members().iter().all(|s| other.g.members().contains(s))
    }

    pub fn all(n: usize) -> Vec<FilterPair> {
        let fs = SetFilter::all(n);
        let mut out = Vec::new();
        for &f in &fs {
            for &g in &fs {
                if let Ok(p) = FilterPair::new(f, g) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiUniformity {
    pub name: String,
    pub n: usize,
    pub base: Vec<RelBits>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuniformVerdict {
    /// Base relations missing a diagonal pair.
    pub non_reflexive: Vec<usize>,
    /// Entourages with no `v` in the filter satisfying `v·v ⊆ u`.
    pub no_square_root: Vec<Vec<(usize, usize)>>,
    pub improper: bool,
}

impl QuniformVerdict {
    pub fn passed(&self) -> bool {
        self.non_reflexive.is_empty() && self.no_square_root.is_empty() && !self.improper
    }
}

impl QuasiUniformity {
    pub fn new(name: impl Into<String>, n: usize, base: Vec<RelBits>) -> Result<Self> {
        if n == 0 || n > MAX_POINTS {
            return Err(Error::Invalid(format!("carrier size {n} outside 1..={MAX_POINTS}")));
        }
        if base.is_empty() {
            return Err(Error::Invalid("empty base".into()));
        }
        if base.iter().any(|&r| r & !full_rel(n) != 0) {
            return Err(Error::Invalid("base relation mentions points outside the carrier".into()));
        }
        Ok(QuasiUniformity {
            name: name.into(),
            n,
            base,
        })
    }

    pub fn discrete(n: usize) -> Self {
        QuasiUniformity::new("discrete", n, vec![diagonal(n)]).unwrap()
    }

    pub fn indiscrete(n: usize) -> Self {
        QuasiUniformity::new("indiscrete", n, vec![full_rel(n)]).unwrap()
    }

    /// Base `{≤}` for a preorder given as a relation mask.
    pub fn from_preorder(n: usize, le: RelBits) -> Self {
        QuasiUniformity::new("preorder", n, vec![le]).unwrap()
    }

    /// Least entourage: the intersection of the base.
    pub fn least(&self) -> RelBits {
        self.base.iter().fold(full_rel(self.n), |acc, &r| acc & r)
    }

    /// Every entourage, least first.
    pub fn entourages(&self, budget: &Budget) -> Result<Vec<RelBits>> {
        let free = (full_rel(self.n) & !self.least()).count_ones();
        budget.check(1u128 << free, || format!("entourages of {}", self.name))?;
        Ok(supersets(self.least(), full_rel(self.n)))
    }

    pub fn validate(&self, budget: &Budget) -> Result<QuniformVerdict> {
        let d = diagonal(self.n);
        let mut v = QuniformVerdict {
            non_reflexive: (0..self.base.len()).filter(|&i| self.base[i] & d != d).collect(),
            improper: self.least() == 0,
            ..Default::default()
        };
        let ents = self.entourages(budget)?;
        for &u in &ents {
            if !ents.iter().any(|&w| rel_compose(w, w, self.n) & !u == 0) {
                if v.no_square_root.len() < 8 {
                    v.no_square_root.push(rel_pairs(u, self.n));
                }
                if v.no_square_root.len() >= 8 {
                    break;
                }
            }
        }
        Ok(v)
    }

    pub fn is_cauchy(&self, p: &FilterPair, ents: &[RelBits]) -> bool {
        let (fm, gm) = (p.f.members(), p.g.members());
        ents.iter()
            .all(|&u| fm.iter().any(|&a| gm.iter().any(|&b| product(a, b, self.n) & !u == 0)))
    }

    /// Points the pair converges to.
    pub fn limits(&self, p: &FilterPair, ents: &[RelBits]) -> Vec<usize> {
        let (fm, gm) = (p.f.members(), p.g.members());
        (0..self.n)
            .filter(|&x0| {
                ents.iter().all(|&u| {
                    let (l, r) = (left_section(u, self.n, x0), right_section(u, self.n, x0));
                    fm.iter().any(|&a| a & !l == 0) && gm.iter().any(|&b| b & !r == 0)
                })
            })
            .collect()
    }

    pub fn neighbourhood(&self, x0: usize, ents: &[RelBits]) -> FilterPair {
        let ls: Vec<SetBits> = ents.iter().map(|&u| left_section(u, self.n, x0)).collect();
        let rs: Vec<SetBits> = ents.iter().map(|&u| right_section(u, self.n, x0)).collect();
        // both contain x0, so the filters are proper and meet
        FilterPair {
            f: SetFilter::generated_by(self.n, &ls).expect("reflexive entourages"),
            g: SetFilter::generated_by(self.n, &rs).expect("reflexive entourages"),
        }
    }

    pub fn minimal_cauchy(&self, ents: &[RelBits]) -> Vec<FilterPair> {
        let cauchy: Vec<FilterPair> = FilterPair::all(self.n).into_iter().filter(|p| self.is_cauchy(p, ents)).collect();
        cauchy
            .iter()
            .filter(|p| !cauchy.iter().any(|c| c != *p && c.contained_in(p)))
            .copied()
            .collect()
    }
}

/// Uniform continuity by search over the canonical bases `{least}`.
pub fn check_uniform_continuity(f: &[usize], u: &QuasiUniformity, v: &QuasiUniformity) -> bool {
    let (lu, lv) = (u.least(), v.least());
    [lv].iter().all(|&vb| {
        [lu].iter().any(|&ub| {
            (0..u.n).all(|x| (0..u.n).all(|y| !related(ub, u.n, x, y) || related(vb, v.n, f[x], f[y])))
        })
    })
}

/// `f·A ≤ B·f`: every `b ∈ B` contains `f·a·f°` for some `a ∈ A`, over all members.
pub fn is_lax_morphism(f: &[usize], u: &QuasiUniformity, v: &QuasiUniformity, budget: &Budget) -> Result<bool> {
    let (ea, eb) = (u.entourages(budget)?, v.entourages(budget)?);
    // f·a as a relation X ⇸ Y and b·f likewise
    let fa = |a: RelBits| -> Vec<(usize, usize)> {
        rel_pairs(a, u.n).into_iter().map(|(x, x2)| (x, f[x2])).collect()
    };
    Ok(eb.iter().all(|&b| {
        ea.iter().any(|&a| fa(a).into_iter().all(|(x, y)| related(b, v.n, f[x], y)))
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaxAlgebraVerdict {
    /// `∀x ∀a: x a x`.
    pub reflexive: bool,
    /// `∀a ∃a': a'·a' ⊆ a`.
    pub transitive: bool,
}

pub fn lax_algebra_bridge(u: &QuasiUniformity, budget: &Budget) -> Result<LaxAlgebraVerdict> {
    let ents = u.entourages(budget)?;
    let reflexive = ents.iter().all(|&a| (0..u.n).all(|x| related(a, u.n, x, x)));
    let transitive = ents.iter().all(|&a| ents.iter().any(|&w| rel_compose(w, w, u.n) & !a == 0));
    Ok(LaxAlgebraVerdict { reflexive, transitive })
}

/// `Φ: 1 ⇸ X` and `Ψ: X ⇸ 1` as proper filters, each by least member
/// (`X_{⋆φ-}` and `X_{-ψ⋆}` respectively).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelFilterModule {
    pub phi: SetBits,
    pub psi: SetBits,
    pub phi_bimodule: bool,
    pub psi_bimodule: bool,
    pub adjoint: bool,
    /// Points `x₀` with `Φ = A·x₀` and `Ψ = x₀°·A`.
    pub induced_by: Vec<usize>,
}

fn set_filter_members(least: SetBits, n: usize) -> Vec<SetBits> {
    SetFilter { n, least }.members()
}

/// All proper `Φ, Ψ` with their bimodule and adjunction verdicts.
pub fn relation_filter_modules(u: &QuasiUniformity, budget: &Budget) -> Result<Vec<RelFilterModule>> {
    let n = u.n;
    let ents = u.entourages(budget)?;
    // ⋆ (a·φ) x iff some x' ∈ φ has x' a x
    let after = |phi: SetBits, a: RelBits| -> SetBits {
        (0..n).filter(|&x| (0..n).any(|x2| phi >> x2 & 1 == 1 && related(a, n, x2, x))).fold(0, |acc, x| acc | 1 << x)
    };
    // x (ψ·a) ⋆ iff x a x' for some x' ∈ ψ
    let before = |psi: SetBits, a: RelBits| -> SetBits {
        (0..n).filter(|&x| (0..n).any(|x2| psi >> x2 & 1 == 1 && related(a, n, x, x2))).fold(0, |acc, x| acc | 1 << x)
    };
    let induced = |x0: usize| -> (SetBits, SetBits) {
        let phi: Vec<SetBits> = ents.iter().map(|&a| right_section(a, n, x0)).collect();
        let psi: Vec<SetBits> = ents.iter().map(|&a| left_section(a, n, x0)).collect();
        (
            SetFilter::generated_by(n, &phi).map_or(0, |f| f.least),
            SetFilter::generated_by(n, &psi).map_or(0, |f| f.least),
        )
    };
    let points: Vec<(SetBits, SetBits)> = (0..n).map(induced).collect();
    let mut out = Vec::new();
    for phi in 1..=full_set(n) {
        let pm = set_filter_members(phi, n);
        // A·Φ ≤ Φ: each member of Φ contains some a·φ'
        let phi_bimodule = pm.iter().all(|&m| pm.iter().any(|&p2| ents.iter().any(|&a| after(p2, a) & !m == 0)));
        for psi in 1..=full_set(n) {
            let sm = set_filter_members(psi, n);
            let psi_bimodule = sm.iter().all(|&m| sm.iter().any(|&s2| ents.iter().any(|&a| before(s2, a) & !m == 0)));
            // Ψ·Φ ⊆ {Δ_1}: no composite is empty
            let unit = pm.iter().all(|&p| sm.iter().all(|&s| p & s != 0));
            // A ⊆ ↑{φ·ψ}: each entourage contains some X_{-ψ⋆} × X_{⋆φ-}
            let counit = ents
                .iter()
                .all(|&a| pm.iter().any(|&p| sm.iter().any(|&s| product(s, p, n) & !a == 0)));
            out.push(RelFilterModule {
                phi,
                psi,
                phi_bimodule,
                psi_bimodule,
                adjoint: phi_bimodule && psi_bimodule && unit && counit,
                induced_by: (0..n).filter(|&x| points[x] == (phi, psi)).collect(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuniformReport {
    pub name: String,
    pub points: usize,
    pub valid: bool,
    pub lax_algebra: bool,
    pub cauchy_pairs: usize,
    pub minimal_cauchy: usize,
    /// Every Cauchy pair converges.
    pub cauchy_complete_converge: bool,
    /// Every minimal Cauchy pair is a neighbourhood pair.
    pub cauchy_complete_neighbourhood: bool,
    pub cauchy_forms_agree: bool,
    /// Each neighbourhood pair is minimal Cauchy and converges to its point.
    pub neighbourhoods_minimal: bool,
    pub adjoint_pairs: usize,
    /// Adjoint pairs correspond exactly to minimal Cauchy pairs.
    pub bijection: bool,
    /// Point-induced pairs map to the neighbourhood pair of the point.
    pub point_pairs_are_neighbourhoods: bool,
    pub lawvere_complete: bool,
    pub cauchy_complete: bool,
    pub agree: bool,
}

impl QuniformReport {
    pub fn passed(&self) -> bool {
        self.valid
            && self.lax_algebra
            && self.cauchy_forms_agree
            && self.neighbourhoods_minimal
            && self.bijection
            && self.point_pairs_are_neighbourhoods
            && self.agree
    }
}

pub fn analyse(u: &QuasiUniformity, budget: &Budget) -> Result<QuniformReport> {
    let valid = u.validate(budget)?.passed();
    if !valid {
        return Err(Error::Invalid(format!("{} is not a quasi-uniformity", u.name)));
    }
    let lax = lax_algebra_bridge(u, budget)?;
    let ents = u.entourages(budget)?;
    let n = u.n;
    let cauchy: Vec<FilterPair> = FilterPair::all(n).into_iter().filter(|p| u.is_cauchy(p, &ents)).collect();
    let minimal = u.minimal_cauchy(&ents);
    let nbhd: Vec<FilterPair> = (0..n).map(|x| u.neighbourhood(x, &ents)).collect();
    let converge = cauchy.iter().all(|p| !u.limits(p, &ents).is_empty());
    let neighbourhood = minimal.iter().all(|p| nbhd.contains(p));
    let neighbourhoods_minimal =
        (0..n).all(|x| minimal.contains(&nbhd[x]) && u.limits(&nbhd[x], &ents).contains(&x));

    let modules = relation_filter_modules(u, budget)?;
    let adjoint: Vec<&RelFilterModule> = modules.iter().filter(|m| m.adjoint).collect();
    // (Ψ, Φ) ↦ ({X_{-ψ⋆}}, {X_{⋆φ-}})
    let as_pair = |m: &RelFilterModule| FilterPair {
        f: SetFilter { n, least: m.psi },
        g: SetFilter { n, least: m.phi },
    };
    let forward = modules.iter().all(|m| m.adjoint == minimal.contains(&as_pair(m)));
    let onto = minimal.iter().all(|p| adjoint.iter().any(|m| as_pair(m) == *p));
    let point_pairs_are_neighbourhoods = modules
        .iter()
        .all(|m| m.induced_by.iter().all(|&x| as_pair(m) == nbhd[x]));
    let lawvere_complete = adjoint.iter().all(|m| !m.induced_by.is_empty());
    Ok(QuniformReport {
        name: u.name.clone(),
        points: n,
        valid,
        lax_algebra: lax.reflexive && lax.transitive,
        cauchy_pairs: cauchy.len(),
        minimal_cauchy: minimal.len(),
        cauchy_complete_converge: converge,
        cauchy_complete_neighbourhood: neighbourhood,
        cauchy_forms_agree: converge == neighbourhood,
        neighbourhoods_minimal,
        adjoint_pairs: adjoint.len(),
        bijection: forward && onto,
        point_pairs_are_neighbourhoods,
        lawvere_complete,
        cauchy_complete: converge,
        agree: lawvere_complete == converge,
    })
}

/// Every valid quasi-uniformity from bases of one or two relations on `n` points,
/// deduplicated by least entourage.
pub fn enumerate_bases(n: usize, max_base: usize) -> Vec<QuasiUniformity> {
    let rels: Vec<RelBits> = (0..=full_rel(n)).collect();
    let budget = Budget::default();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |base: Vec<RelBits>| {
        if let Ok(u) = QuasiUniformity::new(format!("base{:?}", base), n, base) {
            if !seen.contains(&u.least()) && u.validate(&budget).map(|v| v.passed()).unwrap_or(false) {
                seen.insert(u.least());
                out.push(u);
            }
        }
    };
    for &r in &rels {
        push(vec![r]);
    }
    if max_base >= 2 {
        for (i, &r) in rels.iter().enumerate() {
            for &s in &rels[i + 1..] {
                push(vec![r, s]);
            }
        }
    }
    out
}

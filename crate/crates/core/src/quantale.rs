//! Finite commutative unital quantales given by explicit tables.
//!
//! A [`Quantale`] is only ever obtained through [`validate_quantale`] (or one
//! of the built-ins, which go through it as well), so every value in
//! circulation is a complete lattice with an associative, commutative,
//! join-preserving tensor and a non-bottom unit. Joins, meets and the
//! residuation `hom` are tabulated once at validation time.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Index of an element in a quantale carrier.
///
/// The derived `Ord` is the carrier index order and is only used for
/// canonical, reproducible enumeration. Use [`Quantale::leq`] for the lattice
/// order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QElem(pub u8);

impl QElem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Unvalidated quantale tables, indexed by carrier position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawQuantale {
    pub name: String,
    pub labels: Vec<String>,
    /// `leq[a][b]` is `a ≤ b`.
    pub leq: Vec<Vec<bool>>,
    pub tensor: Vec<Vec<usize>>,
    pub unit: usize,
}

/// The first law a raw table violates, with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum QuantaleViolation {
    #[error("carrier is empty")]
    Empty,
    #[error("carrier has {0} elements; at most 255 are supported")]
    TooLarge(usize),
    #[error("table shape does not match the carrier")]
    Shape,
    #[error("order is not reflexive at {0}")]
    NotReflexive(String),
    #[error("order is not antisymmetric: {0} ≤ {1} ≤ {0}")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive: {0} ≤ {1} ≤ {2}")]
    NotTransitive(String, String, String),
    #[error("{0} and {1} have no least upper bound")]
    NoJoin(String, String),
    #[error("{0} and {1} have no greatest lower bound")]
    NoMeet(String, String),
    #[error("tensor entry for ({0},{1}) is out of range")]
    TensorOutOfRange(String, String),
    #[error("unit index is out of range")]
    MissingUnit,
    #[error("tensor is not commutative at ({0},{1})")]
    NotCommutative(String, String),
    #[error("tensor is not associative at ({0},{1},{2})")]
    NotAssociative(String, String, String),
    #[error("unit law fails at {0}")]
    UnitLaw(String),
    #[error("tensor does not distribute over the join at ({0},{1},{2})")]
    NotDistributive(String, String, String),
    #[error("{0} ⊗ ⊥ is not ⊥")]
    BottomNotAbsorbing(String),
    #[error("residuation fails at ({0},{1},{2})")]
    Residuation(String, String, String),
    #[error("trivial quantale: unit equals bottom")]
    Trivial,
}

/// A validated finite commutative unital quantale.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quantale {
    name: String,
    labels: Vec<String>,
    n: usize,
    leq: Vec<bool>,
    join: Vec<QElem>,
    meet: Vec<QElem>,
    tensor: Vec<QElem>,
    hom: Vec<QElem>,
    bottom: QElem,
    top: QElem,
    unit: QElem,
}

impl fmt::Display for Quantale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} elements)", self.name, self.n)
    }
}

impl Quantale {
    /// The defining tables, suitable for re-validation.
    pub fn to_raw(&self) -> RawQuantale {
        let n = self.n;
        RawQuantale {
            name: self.name.clone(),
            labels: self.labels.clone(),
            leq: (0..n).map(|a| (0..n).map(|b| self.leq[a * n + b]).collect()).collect(),
            tensor: (0..n).map(|a| (0..n).map(|b| self.tensor[a * n + b].index()).collect()).collect(),
            unit: self.unit.index(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> impl Iterator<Item = QElem> + Clone {
        (0..self.n as u8).map(QElem)
    }

    pub fn label(&self, u: QElem) -> &str {
        &self.labels[u.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elem(&self, label: &str) -> Option<QElem> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| QElem(i as u8))
    }

    #[inline]
    pub fn leq(&self, u: QElem, v: QElem) -> bool {
        self.leq[u.index() * self.n + v.index()]
    }

    #[inline]
    pub fn lt(&self, u: QElem, v: QElem) -> bool {
        u != v && self.leq(u, v)
    }

    #[inline]
    pub fn join(&self, u: QElem, v: QElem) -> QElem {
        self.join[u.index() * self.n + v.index()]
    }

    #[inline]
    pub fn meet(&self, u: QElem, v: QElem) -> QElem {
        self.meet[u.index() * self.n + v.index()]
    }

    #[inline]
    pub fn tensor(&self, u: QElem, v: QElem) -> QElem {
        self.tensor[u.index() * self.n + v.index()]
    }

    /// Residuation: the largest `w` with `u ⊗ w ≤ v`.
    #[inline]
    pub fn hom(&self, u: QElem, v: QElem) -> QElem {
        self.hom[u.index() * self.n + v.index()]
    }

    pub fn bottom(&self) -> QElem {
        self.bottom
    }

    pub fn top(&self) -> QElem {
        self.top
    }

    pub fn unit(&self) -> QElem {
        self.unit
    }

    pub fn join_all<I: IntoIterator<Item = QElem>>(&self, it: I) -> QElem {
        it.into_iter().fold(self.bottom, |acc, u| self.join(acc, u))
    }

    pub fn meet_all<I: IntoIterator<Item = QElem>>(&self, it: I) -> QElem {
        it.into_iter().fold(self.top, |acc, u| self.meet(acc, u))
    }

    /// Elements covering `u` (strictly above, nothing in between).
    pub fn upper_covers(&self, u: QElem) -> Vec<QElem> {
        self.elements()
            .filter(|&w| self.lt(u, w))
            .filter(|&w| !self.elements().any(|m| self.lt(u, m) && self.lt(m, w)))
            .collect()
    }

    pub fn is_chain(&self) -> bool {
        self.elements()
            .all(|u| self.elements().all(|v| self.leq(u, v) || self.leq(v, u)))
    }

    pub fn tensor_is_meet(&self) -> bool {
        self.tensor == self.meet
    }

    pub fn unit_is_top(&self) -> bool {
        self.unit == self.top
    }

    /// The up-set `↑v`, in carrier order.
    pub fn up_set(&self, v: QElem) -> Vec<QElem> {
        self.elements().filter(|&w| self.leq(v, w)).collect()
    }
}

/// Check every quantale law on a raw table and tabulate the derived operations.
pub fn validate_quantale(raw: &RawQuantale) -> Result<Quantale, QuantaleViolation> {
    let n = raw.labels.len();
    if n == 0 {
        return Err(QuantaleViolation::Empty);
    }
    if n > 255 {
        return Err(QuantaleViolation::TooLarge(n));
    }
    if raw.leq.len() != n
        || raw.leq.iter().any(|r| r.len() != n)
        || raw.tensor.len() != n
        || raw.tensor.iter().any(|r| r.len() != n)
    {
        return Err(QuantaleViolation::Shape);
    }
    let lab = |i: usize| raw.labels[i].clone();
    let le = |a: usize, b: usize| raw.leq[a][b];

    for a in 0..n {
        if !le(a, a) {
            return Err(QuantaleViolation::NotReflexive(lab(a)));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && le(a, b) && le(b, a) {
                return Err(QuantaleViolation::NotAntisymmetric(lab(a), lab(b)));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if le(a, b) && le(b, c) && !le(a, c) {
                    return Err(QuantaleViolation::NotTransitive(lab(a), lab(b), lab(c)));
                }
            }
        }
    }

    let mut join = vec![QElem(0); n * n];
    let mut meet = vec![QElem(0); n * n];
    for a in 0..n {
        for b in 0..n {
            let uppers: Vec<usize> = (0..n).filter(|&c| le(a, c) && le(b, c)).collect();
            let lub = uppers.iter().copied().find(|&c| uppers.iter().all(|&d| le(c, d)));
            match lub {
                Some(c) => join[a * n + b] = QElem(c as u8),
                None => return Err(QuantaleViolation::NoJoin(lab(a), lab(b))),
            }
            let lowers: Vec<usize> = (0..n).filter(|&c| le(c, a) && le(c, b)).collect();
            let glb = lowers.iter().copied().find(|&c| lowers.iter().all(|&d| le(d, c)));
            match glb {
                Some(c) => meet[a * n + b] = QElem(c as u8),
                None => return Err(QuantaleViolation::NoMeet(lab(a), lab(b))),
            }
        }
    }
    // A finite lattice with binary joins and meets has both bounds.
    let bottom = (0..n).find(|&a| (0..n).all(|b| le(a, b))).expect("finite lattice");
    let top = (0..n).find(|&a| (0..n).all(|b| le(b, a))).expect("finite lattice");

    if raw.unit >= n {
        return Err(QuantaleViolation::MissingUnit);
    }
    for a in 0..n {
        for b in 0..n {
            if raw.tensor[a][b] >= n {
                return Err(QuantaleViolation::TensorOutOfRange(lab(a), lab(b)));
            }
        }
    }
    let t = |a: usize, b: usize| raw.tensor[a][b];
    for a in 0..n {
        for b in 0..n {
            if t(a, b) != t(b, a) {
                return Err(QuantaleViolation::NotCommutative(lab(a), lab(b)));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if t(t(a, b), c) != t(a, t(b, c)) {
                    return Err(QuantaleViolation::NotAssociative(lab(a), lab(b), lab(c)));
                }
            }
        }
    }
    for a in 0..n {
        if t(raw.unit, a) != a {
            return Err(QuantaleViolation::UnitLaw(lab(a)));
        }
    }
    for a in 0..n {
        if t(a, bottom) != bottom {
            return Err(QuantaleViolation::BottomNotAbsorbing(lab(a)));
        }
        for b in 0..n {
            for c in 0..n {
                let lhs = t(a, join[b * n + c].index());
                let rhs = join[t(a, b) * n + t(a, c)].index();
                if lhs != rhs {
                    return Err(QuantaleViolation::NotDistributive(lab(a), lab(b), lab(c)));
                }
            }
        }
    }
    if raw.unit == bottom {
        return Err(QuantaleViolation::Trivial);
    }

    let mut hom = vec![QElem(0); n * n];
    for u in 0..n {
        for w in 0..n {
            let mut acc = bottom;
            for v in 0..n {
                if le(t(u, v), w) {
                    acc = join[acc * n + v].index();
                }
            }
            hom[u * n + w] = QElem(acc as u8);
        }
    }
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                if le(t(u, v), w) != le(v, hom[u * n + w].index()) {
                    return Err(QuantaleViolation::Residuation(lab(u), lab(v), lab(w)));
                }
            }
        }
    }

    let mut leq = vec![false; n * n];
    let mut tensor = vec![QElem(0); n * n];
    for a in 0..n {
        for b in 0..n {
            leq[a * n + b] = le(a, b);
            tensor[a * n + b] = QElem(t(a, b) as u8);
        }
    }
    Ok(Quantale {
        name: raw.name.clone(),
        labels: raw.labels.clone(),
        n,
        leq,
        join,
        meet,
        tensor,
        hom,
        bottom: QElem(bottom as u8),
        top: QElem(top as u8),
        unit: QElem(raw.unit as u8),
    })
}

fn builtin_raw(
    name: &str,
    labels: Vec<String>,
    leq: impl Fn(usize, usize) -> bool,
    tensor: impl Fn(usize, usize) -> usize,
    unit: usize,
) -> RawQuantale {
    let n = labels.len();
    RawQuantale {
        name: name.to_string(),
        labels,
        leq: (0..n).map(|a| (0..n).map(|b| leq(a, b)).collect()).collect(),
        tensor: (0..n).map(|a| (0..n).map(|b| tensor(a, b)).collect()).collect(),
        unit,
    }
}

/// The two-element chain `0 < 1` with `⊗ = ∧`.
pub fn two() -> Quantale {
    let raw = builtin_raw(
        "2",
        vec!["0".into(), "1".into()],
        |a, b| a <= b,
        |a, b| a.min(b),
        1,
    );
    validate_quantale(&raw).expect("2 is a quantale")
}

fn chain_labels(finite: usize) -> Vec<String> {
    let mut labels: Vec<String> = (0..finite).map(|i| i.to_string()).collect();
    labels.push("inf".into());
    labels
}

/// A chain with `n` elements and `⊗ = ∧`, labelled like a distance scale:
/// `0` is the top (and the unit), `inf` the bottom.
pub fn chain_meet(n: usize) -> Quantale {
    assert!(n >= 2, "a non-trivial chain needs two elements");
    let labels = chain_labels(n - 1);
    // index i is the numeric value i; a ≤ b in the lattice iff a ≥ b numerically
    let raw = builtin_raw(
        &format!("chain{n}"),
        labels,
        |a, b| a >= b,
        |a, b| a.max(b),
        0,
    );
    validate_quantale(&raw).expect("meet chain is a quantale")
}

/// The chain `{0, 1, .., finite-1, inf}` under truncated addition: `a ⊗ b = a + b`
/// when that stays below `finite`, otherwise `inf`. The unit is `0`.
pub fn truncated_plus(finite: usize) -> Quantale {
    assert!(finite >= 1);
    let labels = chain_labels(finite);
    let inf = finite;
    let raw = builtin_raw(
        &format!("plus{finite}"),
        labels,
        |a, b| a >= b,
        move |a, b| if a == inf || b == inf || a + b >= inf { inf } else { a + b },
        0,
    );
    validate_quantale(&raw).expect("truncated addition is a quantale")
}

/// The Boolean algebra of subsets of the first `s` letters, `⊗ = ∩`, unit the full set.
pub fn powerset_quantale(s: usize) -> Quantale {
    assert!((1..=4).contains(&s));
    let letters: Vec<char> = "abcd".chars().take(s).collect();
    let n = 1usize << s;
    let labels = (0..n)
        .map(|m| {
            let parts: Vec<String> = (0..s)
                .filter(|i| m & (1 << i) != 0)
                .map(|i| letters[i].to_string())
                .collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    let raw = builtin_raw(
        &format!("pset{s}"),
        labels,
        |a, b| a & b == a,
        |a, b| a & b,
        n - 1,
    );
    validate_quantale(&raw).expect("powerset algebra is a quantale")
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &[
    "2", "chain3", "chain4", "chain5", "plus1", "plus2", "plus3", "plus4", "pset1", "pset2",
    "pset3",
];

pub fn builtin(name: &str) -> Option<Quantale> {
    let q = match name {
        "2" => two(),
        "chain3" => chain_meet(3),
        "chain4" => chain_meet(4),
        "chain5" => chain_meet(5),
        "plus1" => truncated_plus(1),
        "plus2" => truncated_plus(2),
        "plus3" => truncated_plus(3),
        "plus4" => truncated_plus(4),
        "pset1" => powerset_quantale(1),
        "pset2" => powerset_quantale(2),
        "pset3" => powerset_quantale(3),
        _ => return None,
    };
    Some(q)
}

/// Every built-in quantale, in [`BUILTIN_NAMES`] order.
pub fn builtin_quantales() -> Vec<Quantale> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin(n).expect("listed built-in"))
        .collect()
}

/// Result of scanning a quantale for `⊗`-complemented elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementScan {
    /// Pairs `(u, v)` with `u ∨ v = k` and `u ⊗ v = ⊥`.
    pub pairs: Vec<(QElem, QElem)>,
    /// Only `k` and `⊥` admit a complement.
    pub only_unit_and_bottom: bool,
    /// `u ⊗ v = k` forces `u = k = v`.
    pub unit_indecomposable: bool,
    /// Every complemented element is idempotent.
    pub complemented_idempotent: bool,
    /// No element has two distinct complements.
    pub complements_unique: bool,
}

impl ComplementScan {
    /// Both algebraic hypotheses under which every left adjoint matrix is a map.
    pub fn hypotheses_hold(&self) -> bool {
        self.only_unit_and_bottom && self.unit_indecomposable
    }
}

pub fn tensor_complement_scan(q: &Quantale) -> ComplementScan {
    let k = q.unit();
    let bot = q.bottom();
    let mut pairs = Vec::new();
    for u in q.elements() {
        for v in q.elements() {
            if q.join(u, v) == k && q.tensor(u, v) == bot {
                pairs.push((u, v));
            }
        }
    }
    let only_unit_and_bottom = pairs.iter().all(|&(u, _)| u == k || u == bot);
    let unit_indecomposable = q
        .elements()
        .all(|u| q.elements().all(|v| q.tensor(u, v) != k || (u == k && v == k)));
    let complemented_idempotent = pairs.iter().all(|&(u, _)| q.tensor(u, u) == u);
    let complements_unique = pairs
        .iter()
        .all(|&(u, v)| pairs.iter().all(|&(u2, v2)| u2 != u || v2 == v));
    ComplementScan {
        pairs,
        only_unit_and_bottom,
        unit_indecomposable,
        complemented_idempotent,
        complements_unique,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(q: &Quantale, l: &str) -> QElem {
        q.elem(l).unwrap()
    }

    #[test]
    fn builtins_validate() {
        for q in builtin_quantales() {
            assert!(q.size() >= 2, "{}", q.name());
            assert_ne!(q.unit(), q.bottom());
        }
    }

    #[test]
    fn residuation_is_exhaustive() {
        for q in builtin_quantales() {
            for u in q.elements() {
                for v in q.elements() {
                    for w in q.elements() {
                        assert_eq!(q.leq(q.tensor(u, v), w), q.leq(v, q.hom(u, w)));
                    }
                }
            }
        }
    }

    #[test]
    fn hom_basic_identities() {
        for q in builtin_quantales() {
            for u in q.elements() {
                assert_eq!(q.hom(q.unit(), u), u);
                assert_eq!(q.hom(u, q.top()), q.top());
                for v in q.elements() {
                    assert!(q.leq(v, q.hom(u, q.tensor(u, v))));
                }
            }
        }
        let q = two();
        for v in q.elements() {
            assert_eq!(q.hom(q.bottom(), v), q.top());
        }
    }

    #[test]
    fn truncated_minus_on_plus_chain() {
        // {0,1,inf}: hom(u,v) = max(v-u, 0), with inf absorbing
        let q = truncated_plus(2);
        assert_eq!(q.size(), 3);
        // 1 + 1 already truncates to inf
        assert_eq!(q.hom(e(&q, "1"), e(&q, "inf")), e(&q, "1"));
        assert_eq!(q.hom(e(&q, "inf"), e(&q, "1")), e(&q, "0"));
        assert_eq!(q.hom(e(&q, "1"), e(&q, "1")), e(&q, "0"));
        assert_eq!(q.hom(e(&q, "0"), e(&q, "1")), e(&q, "1"));
        let q = truncated_plus(4);
        for u in 0..4usize {
            for v in 0..4usize {
                let expect = v.saturating_sub(u);
                assert_eq!(
                    q.hom(e(&q, &u.to_string()), e(&q, &v.to_string())),
                    e(&q, &expect.to_string())
                );
            }
        }
    }

    #[test]
    fn plus3_carrier() {
        let q = builtin("plus3").unwrap();
        assert_eq!(q.labels(), &["0", "1", "2", "inf"]);
        assert_eq!(q.top(), e(&q, "0"));
        assert_eq!(q.bottom(), e(&q, "inf"));
        assert_eq!(q.tensor(e(&q, "1"), e(&q, "2")), e(&q, "inf"));
        assert_eq!(q.tensor(e(&q, "1"), e(&q, "1")), e(&q, "2"));
    }

    #[test]
    fn pset2_shape() {
        let q = builtin("pset2").unwrap();
        assert_eq!(q.size(), 4);
        assert_eq!(q.label(q.unit()), "{a,b}");
        assert!(!q.is_chain());
    }

    #[test]
    fn associativity_violation_is_reported() {
        // 0 < 1 < 2, unit 2: (0*0)*1 = 1*1 = 0 but 0*(0*1) = 0*0 = 1
        let tensor = vec![vec![1, 0, 0], vec![0, 0, 1], vec![0, 1, 2]];
        let raw = RawQuantale {
            name: "bad".into(),
            labels: vec!["0".into(), "1".into(), "2".into()],
            leq: (0..3).map(|a| (0..3).map(|b| a <= b).collect()).collect(),
            tensor,
            unit: 2,
        };
        let err = validate_quantale(&raw).unwrap_err();
        assert_eq!(
            err,
            QuantaleViolation::NotAssociative("0".into(), "0".into(), "1".into())
        );
    }

    #[test]
    fn trivial_quantale_rejected() {
        let raw = RawQuantale {
            name: "t".into(),
            labels: vec!["0".into(), "1".into()],
            leq: vec![vec![true, true], vec![false, true]],
            tensor: vec![vec![0, 0], vec![0, 0]],
            unit: 0,
        };
        // unit law fails before triviality unless the tensor is constant on a one-point set
        assert!(validate_quantale(&raw).is_err());
        let raw1 = RawQuantale {
            name: "one".into(),
            labels: vec!["0".into()],
            leq: vec![vec![true]],
            tensor: vec![vec![0]],
            unit: 0,
        };
        assert_eq!(validate_quantale(&raw1).unwrap_err(), QuantaleViolation::Trivial);
    }

    #[test]
    fn non_lattice_rejected() {
        // two incomparable maximal elements, no join
        let raw = RawQuantale {
            name: "v".into(),
            labels: vec!["b".into(), "x".into(), "y".into()],
            leq: vec![
                vec![true, true, true],
                vec![false, true, false],
                vec![false, false, true],
            ],
            tensor: vec![vec![0, 0, 0], vec![0, 1, 0], vec![0, 0, 2]],
            unit: 1,
        };
        assert!(matches!(
            validate_quantale(&raw).unwrap_err(),
            QuantaleViolation::NoJoin(..)
        ));
    }

    #[test]
    fn complement_scan_two() {
        let q = two();
        let s = tensor_complement_scan(&q);
        assert_eq!(s.pairs, vec![(QElem(0), QElem(1)), (QElem(1), QElem(0))]);
        assert!(s.hypotheses_hold());
    }

    #[test]
    fn complement_scan_pset2() {
        let q = builtin("pset2").unwrap();
        let s = tensor_complement_scan(&q);
        let a = e(&q, "{a}");
        let b = e(&q, "{b}");
        assert!(s.pairs.contains(&(a, b)) && s.pairs.contains(&(b, a)));
        assert!(!s.hypotheses_hold());
        assert!(s.complemented_idempotent && s.complements_unique);
    }

    #[test]
    fn complement_scan_invariants_on_builtins() {
        for q in builtin_quantales() {
            let s = tensor_complement_scan(&q);
            assert!(s.complemented_idempotent, "{}", q.name());
            assert!(s.complements_unique, "{}", q.name());
        }
    }
}

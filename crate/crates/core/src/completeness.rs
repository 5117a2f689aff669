//! Lawvere completeness by exhaustive search over adjoint pairs `(1,p) ⇄ (X,a)`.

use crate::enriched::VCategory;
use crate::error::{pow_sat, Error, Result};
use crate::laxext::LaxExtension;
use crate::quantale::QElem;
use crate::tvcat::{check_tvfunctor, is_tvbimodule, tv_adjoint, TVCategory};
use crate::vmatrix::{advance, VMatrix};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// An adjoint pair `φ ⊣ ψ` with `φ: T1 ⇸ X`, `ψ: TX ⇸ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointPair {
    pub phi: VMatrix,
    pub psi: VMatrix,
    /// Every `x₀` with `φ = a·Tx₀` and `ψ = x₀°·a`, ascending.
    pub representatives: Vec<usize>,
}

impl AdjointPair {
    pub fn representative(&self) -> Option<usize> {
        self.representatives.first().copied()
    }

    fn key(&self) -> (Vec<u8>, Vec<u8>) {
        (
            self.psi.data().iter().map(|u| u.0).collect(),
            self.phi.data().iter().map(|u| u.0).collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    #[serde(rename = "T1=1")]
    T1IsOne,
    #[serde(rename = "m-BC")]
    MBc,
    #[serde(rename = "none")]
    Ungated,
}

impl Gate {
    pub fn of(ext: &LaxExtension) -> Result<Gate> {
        let caps = ext.capabilities()?;
        Ok(if caps.t1_is_one() {
            Gate::T1IsOne
        } else if caps.m_bc {
            Gate::MBc
        } else {
            Gate::Ungated
        })
    }

    /// What a positive verdict may be called under this gate.
    pub fn label(self) -> &'static str {
        match self {
            Gate::Ungated => "point-completeness (sufficient test only)",
            _ => "Lawvere completeness",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Enumeration {
    /// `ψ` outer, `φ` confined below the largest solution of `φ∗ψ ≤ a`.
    Pruned,
    /// All bimodule pairs, no bound on `φ`.
    Reference,
}

/// `(1, p)` with `p = e_1°`.
pub fn unit_category(ext: &Arc<LaxExtension>) -> Result<TVCategory> {
    TVCategory::discrete(ext.clone(), 1)
}

/// `f_* = a·Tf` and `f^* = f°·a` for the point `f(⋆) = x0`.
pub fn point_modules(x: &TVCategory, x0: usize) -> Result<(VMatrix, VMatrix)> {
    let ext = x.ext();
    let t1 = ext.t_size(1)?;
    let tf = ext.map(&[x0], x.size())?;
    let q = ext.quantale().clone();
    let phi = VMatrix::from_fn(q.clone(), t1, x.size(), |u, y| x.get(tf[u], y));
    let psi = VMatrix::from_fn(q, x.t_size(), 1, |t, _| x.get(t, x0));
    Ok((phi, psi))
}

fn representatives(points: &[(VMatrix, VMatrix)], phi: &VMatrix, psi: &VMatrix) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, (p, s))| p == phi && s == psi)
        .map(|(i, _)| i)
        .collect()
}

fn all_matrices(
    q: &Arc<crate::quantale::Quantale>,
    rows: usize,
    cols: usize,
) -> impl Iterator<Item = VMatrix> + '_ {
    let mut digits = Some(vec![QElem(0); rows * cols]);
    std::iter::from_fn(move || {
        let d = digits.take()?;
        let m = VMatrix::new(q.clone(), rows, cols, d.clone()).ok()?;
        let mut next = d;
        if advance(&mut next, q.size()) {
            digits = Some(next);
        }
        Some(m)
    })
}

/// `φ_max(𝔲,x) = ⋀_𝔛 hom(Tψ(𝔛,𝔲), a(m_X 𝔛, x))`, the largest `φ` with `φ∗ψ ≤ a`.
pub fn phi_bound(x: &TVCategory, psi: &VMatrix) -> Result<VMatrix> {
    let ext = x.ext();
    let q = ext.quantale().clone();
    let tpsi = ext.extend(psi)?;
    let m = ext.mult(x.size())?;
    let t1 = tpsi.cols();
    let mut out = VMatrix::filled(q.clone(), t1, x.size(), q.top());
    for big in 0..tpsi.rows() {
        for u in 0..t1 {
            let w = tpsi.get(big, u);
            if w == q.bottom() {
                continue;
            }
            for y in 0..x.size() {
                out.set(u, y, q.meet(out.get(u, y), q.hom(w, x.get(m[big], y))));
            }
        }
    }
    Ok(out)
}

/// Every adjoint pair `(1,p) ⇄ (X,a)`, ordered by `(ψ, φ)` entries.
pub fn enumerate_adjoint_pairs(x: &TVCategory, mode: Enumeration) -> Result<Vec<AdjointPair>> {
    let ext = x.ext().clone();
    let q = ext.quantale().clone();
    let one = unit_category(&ext)?;
    let n = x.size();
    let tn = x.t_size();
    let t1 = ext.t_size(1)?;
    let budget = ext.budget();
    budget.check(pow_sat(q.size(), tn), || format!("ψ candidates on {tn} points"))?;
    budget.check(pow_sat(q.size(), t1 * n), || format!("φ candidates on {t1}x{n}"))?;
    let points: Vec<(VMatrix, VMatrix)> = (0..n).map(|p| point_modules(x, p)).collect::<Result<_>>()?;

    let mut psis = Vec::new();
    for psi in all_matrices(&q, tn, 1) {
        if is_tvbimodule(&psi, x, &one)? {
            psis.push(psi);
        }
    }
    let mut out = Vec::new();
    match mode {
        Enumeration::Reference => {
            let mut phis = Vec::new();
            for phi in all_matrices(&q, t1, n) {
                if is_tvbimodule(&phi, &one, x)? {
                    phis.push(phi);
                }
            }
            for psi in &psis {
                for phi in &phis {
                    if tv_adjoint(phi, psi, &one, x)? {
                        out.push(AdjointPair {
                            phi: phi.clone(),
                            psi: psi.clone(),
                            representatives: representatives(&points, phi, psi),
                        });
                    }
                }
            }
        }
        Enumeration::Pruned => {
            for psi in &psis {
                let bound = phi_bound(x, psi)?;
                let cands: Vec<Vec<QElem>> = bound
                    .data()
                    .iter()
                    .map(|&b| q.elements().filter(|&v| q.leq(v, b)).collect())
                    .collect();
                let mut idx = vec![0usize; cands.len()];
                loop {
                    let data: Vec<QElem> = idx.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
                    let phi = VMatrix::new(q.clone(), t1, n, data)?;
                    if is_tvbimodule(&phi, &one, x)? && tv_adjoint(&phi, psi, &one, x)? {
                        out.push(AdjointPair {
                            representatives: representatives(&points, &phi, psi),
                            phi,
                            psi: psi.clone(),
                        });
                    }
                    // mixed-radix odometer over the per-cell candidate lists
                    let mut pos = 0;
                    while pos < idx.len() {
                        idx[pos] += 1;
                        if idx[pos] < cands[pos].len() {
                            break;
                        }
                        idx[pos] = 0;
                        pos += 1;
                    }
                    if pos == idx.len() {
                        break;
                    }
                }
            }
        }
    }
    out.sort_by_key(AdjointPair::key);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessVerdict {
    pub complete: bool,
    pub gate: Gate,
    pub label: String,
    pub pairs: usize,
    /// Indices into the pair list, least first.
    pub non_representable: Vec<usize>,
    /// Every representative is a functor `(1,p) → (X,a)`.
    pub representatives_functorial: bool,
    /// No `φ` appears with two different `ψ`.
    pub adjoints_unique: bool,
}

pub fn verdict_from_pairs(x: &TVCategory, pairs: &[AdjointPair]) -> Result<CompletenessVerdict> {
    let gate = Gate::of(x.ext())?;
    let one = unit_category(x.ext())?;
    let non_representable: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| p.representatives.is_empty())
        .map(|(i, _)| i)
        .collect();
    let mut representatives_functorial = true;
    for p in pairs {
        for &x0 in &p.representatives {
            representatives_functorial &= check_tvfunctor(&[x0], &one, x)?.passed();
        }
    }
    let mut adjoints_unique = true;
    for (i, p) in pairs.iter().enumerate() {
        adjoints_unique &= pairs[i + 1..].iter().all(|r| r.phi != p.phi || r.psi == p.psi);
    }
    Ok(CompletenessVerdict {
        complete: non_representable.is_empty(),
        gate,
        label: gate.label().into(),
        pairs: pairs.len(),
        non_representable,
        representatives_functorial,
        adjoints_unique,
    })
}

pub fn decide_lawvere_complete(x: &TVCategory, mode: Enumeration) -> Result<(CompletenessVerdict, Vec<AdjointPair>)> {
    let pairs = enumerate_adjoint_pairs(x, mode)?;
    Ok((verdict_from_pairs(x, &pairs)?, pairs))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VCompleteCertificate {
    pub quantale: String,
    pub monad: String,
    /// `T(hom_ξ)·m_V° = ξ°·hom·ξ`.
    pub precondition: bool,
    /// First `(𝔳, 𝔴)` where the precondition fails.
    pub offending: Option<(usize, usize)>,
    pub verdict: CompletenessVerdict,
    /// `(pair index, step)` where a proof-step identity fails.
    pub identity_failures: Vec<(usize, u8)>,
    /// `ψ(e_V(k))` represents every pair.
    pub k_dot_represents: bool,
    pub certified: bool,
}

/// Completeness of `(V, hom_ξ)` with the three proof-step identities on every pair.
pub fn certify_v_complete(ext: &Arc<LaxExtension>, mode: Enumeration) -> Result<VCompleteCertificate> {
    let caps = ext.capabilities()?;
    if !caps.t1_is_one() {
        return Err(Error::GateFailed {
            gate: "T1=1".into(),
            detail: format!("|T1| = {} for {}", caps.t1, ext.monad().name()),
        });
    }
    let q = ext.quantale().clone();
    let hv = TVCategory::hom_xi(ext.clone())?;
    let xi = ext.xi()?;
    let lhs = hv.m_circ_matrix()?;
    let tv = xi.len();
    let mut offending = None;
    'outer: for v in 0..tv {
        for w in 0..tv {
            if lhs.get(v, w) != q.hom(xi[v], xi[w]) {
                offending = Some((v, w));
                break 'outer;
            }
        }
    }
    let (verdict, pairs) = decide_lawvere_complete(&hv, mode)?;
    let kd = ext.unit(q.size())[q.unit().index()];
    let a = |v: usize, w: usize| q.hom(xi[v], xi[w]);
    let mut identity_failures = Vec::new();
    let mut k_dot_represents = true;
    for (i, p) in pairs.iter().enumerate() {
        let psi = |t: usize| p.psi.get(t, 0);
        let pk = psi(kd);
        if pk != q.join_all((0..tv).map(|t| q.tensor(psi(t), xi[t]))) {
            identity_failures.push((i, 1));
        }
        if !(0..tv).all(|v| q.hom(xi[v], pk) == q.join_all((0..tv).map(|u| q.tensor(a(v, u), psi(u))))) {
            identity_failures.push((i, 2));
        }
        if !(0..tv).all(|v| psi(v) == q.join_all((0..tv).map(|u| q.tensor(a(v, u), psi(u))))) {
            identity_failures.push((i, 3));
        }
        k_dot_represents &= p.representatives.contains(&pk.index());
    }
    let certified = offending.is_none() && verdict.complete && identity_failures.is_empty() && k_dot_represents;
    Ok(VCompleteCertificate {
        quantale: q.name().into(),
        monad: ext.monad().name().into(),
        precondition: offending.is_none(),
        offending,
        verdict,
        identity_failures,
        k_dot_represents,
        certified,
    })
}

/// A section `g` of the surjection `f: X → Y`, read off from representatives
/// of `f^* ⊣ f_*` with `X` under the kernel order and `Y` discrete.
pub fn ord_section_extract(ext: &Arc<LaxExtension>, f: &[usize], ny: usize) -> Result<Vec<usize>> {
    let q = ext.quantale().clone();
    if !q.unit_is_top() || q.size() != 2 || ext.monad().name() != "id" {
        return Err(Error::Invalid("section extraction runs over (id, 2)".into()));
    }
    if (0..ny).any(|y| !f.contains(&y)) || f.iter().any(|&y| y >= ny) {
        return Err(Error::Invalid(format!("{f:?} is not a surjection onto {ny}")));
    }
    let n = f.len();
    let (t, b) = (q.top(), q.bottom());
    let ker = VCategory::new(VMatrix::from_fn(q.clone(), n, n, |i, j| if f[i] == f[j] { t } else { b }))?;
    let x = TVCategory::new(ext.clone(), ker.structure().clone())?;
    let one = unit_category(ext)?;
    let mut g = Vec::with_capacity(ny);
    for y in 0..ny {
        let phi = VMatrix::from_fn(q.clone(), 1, n, |_, i| if f[i] == y { t } else { b });
        let psi = phi.transpose();
        if !(is_tvbimodule(&phi, &one, &x)? && is_tvbimodule(&psi, &x, &one)? && tv_adjoint(&phi, &psi, &one, &x)?) {
            return Err(Error::Invalid(format!("fibre pair over {y} is not an adjoint pair")));
        }
        let rep = (0..n).find(|&p| point_modules(&x, p).map(|m| m.0 == phi && m.1 == psi).unwrap_or(false));
        match rep {
            Some(p) => g.push(p),
            None => return Err(Error::Invalid(format!("fibre pair over {y} has no representative"))),
        }
    }
    if (0..ny).any(|y| f[g[y]] != y) {
        return Err(Error::Invalid("extracted map is not a section".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use crate::monad::monad_by_name;
    use crate::quantale::builtin;

    fn ext(q: &str, t: &str) -> Arc<LaxExtension> {
        Arc::new(
            LaxExtension::new(Arc::new(builtin(q).unwrap()), monad_by_name(t).unwrap(), Budget::default())
                .unwrap(),
        )
    }

    #[test]
    fn two_chain_pairs_are_up_down_pairs() {
        let e = ext("2", "id");
        let q = e.quantale().clone();
        let (t, b) = (q.top(), q.bottom());
        let x = TVCategory::new(e, VMatrix::new(q, 2, 2, vec![t, t, b, t]).unwrap()).unwrap();
        let (v, pairs) = decide_lawvere_complete(&x, Enumeration::Pruned).unwrap();
        assert!(v.complete);
        // one pair per point: A = ↑z, B = ↓z
        assert_eq!(pairs.len(), 2);
        assert_eq!(enumerate_adjoint_pairs(&x, Enumeration::Reference).unwrap(), pairs);
    }

    #[test]
    fn one_point_has_only_its_point() {
        for (qn, tn) in [("plus3", "id"), ("chain3", "ultra"), ("pset2", "id")] {
            let e = ext(qn, tn);
            let x = TVCategory::discrete(e, 1).unwrap();
            let (v, pairs) = decide_lawvere_complete(&x, Enumeration::Pruned).unwrap();
            assert!(v.complete);
            assert_eq!(pairs.len(), 1);
            assert_eq!(pairs[0].representative(), Some(0));
        }
    }

    #[test]
    fn discrete_pair_over_subsets_is_incomplete() {
        let e = ext("pset2", "id");
        let x = TVCategory::discrete(e, 2).unwrap();
        let (v, pairs) = decide_lawvere_complete(&x, Enumeration::Pruned).unwrap();
        assert!(!v.complete);
        assert_eq!(enumerate_adjoint_pairs(&x, Enumeration::Reference).unwrap(), pairs);
        let w = &pairs[v.non_representable[0]];
        assert!(w.representatives.is_empty());
    }

    #[test]
    fn v_hom_is_complete_under_identity() {
        for qn in ["2", "chain3", "plus2", "pset2"] {
            let c = certify_v_complete(&ext(qn, "id"), Enumeration::Pruned).unwrap();
            assert!(c.certified, "{qn}: {c:?}");
        }
    }

    #[test]
    fn v_hom_xi_is_complete_under_ultrafilters() {
        for qn in ["2", "chain3"] {
            let c = certify_v_complete(&ext(qn, "ultra"), Enumeration::Pruned).unwrap();
            assert!(c.certified, "{qn}: {c:?}");
        }
    }

    #[test]
    fn powerset_is_refused_for_v_certification() {
        let e = ext("2", "powerset");
        assert!(matches!(certify_v_complete(&e, Enumeration::Pruned), Err(Error::GateFailed { .. })));
        assert_eq!(Gate::of(&e).unwrap(), Gate::MBc);
    }

    #[test]
    fn sections() {
        let e = ext("2", "id");
        assert_eq!(ord_section_extract(&e, &[0, 1, 2], 3).unwrap(), vec![0, 1, 2]);
        let g = ord_section_extract(&e, &[1, 0, 1], 2).unwrap();
        assert_eq!((g[0], g[1]), (1, 0));
        let g = ord_section_extract(&e, &[0, 1, 1, 1], 2).unwrap();
        assert_eq!(g, vec![0, 1]);
        assert!(ord_section_extract(&e, &[0, 0], 2).is_err());
    }
}

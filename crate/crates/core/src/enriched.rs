//! V-categories, V-functors and V-bimodules.

use crate::error::{pow_sat, Budget, Error, Result};
use crate::quantale::{QElem, Quantale};
use crate::vmatrix::{compose, VMatrix};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Witnesses against the two V-category axioms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VCatVerdict {
    /// `x` with `k ≰ a(x,x)`.
    pub reflexive_failures: Vec<usize>,
    /// `(x, x′, x″)` with `a(x,x′) ⊗ a(x′,x″) ≰ a(x,x″)`.
    pub transitive_failures: Vec<(usize, usize, usize)>,
}

impl VCatVerdict {
    pub fn passed(&self) -> bool {
        self.reflexive_failures.is_empty() && self.transitive_failures.is_empty()
    }
}

pub fn check_vcategory(a: &VMatrix) -> Result<VCatVerdict> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            op: "vcategory",
            left: (a.rows(), a.cols()),
            right: (a.cols(), a.rows()),
        });
    }
    let q = a.quantale();
    let n = a.rows();
    let mut v = VCatVerdict::default();
    for x in 0..n {
        if !q.leq(q.unit(), a.get(x, x)) {
            v.reflexive_failures.push(x);
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if !q.leq(q.tensor(a.get(x, y), a.get(y, z)), a.get(x, z)) {
                    v.transitive_failures.push((x, y, z));
                }
            }
        }
    }
    Ok(v)
}

/// A validated V-category on `{0..n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VCategory {
    a: VMatrix,
}

impl VCategory {
    pub fn new(a: VMatrix) -> Result<Self> {
        let v = check_vcategory(&a)?;
        if !v.passed() {
            return Err(Error::Invalid(format!(
                "not a V-category: reflexivity fails at {:?}, transitivity at {:?}",
                v.reflexive_failures,
                v.transitive_failures.first()
            )));
        }
        Ok(VCategory { a })
    }

    /// The smallest V-category structure containing `r`.
    pub fn generated_by(r: &VMatrix) -> Result<Self> {
        let q = r.quantale().clone();
        let mut a = VMatrix::identity(q, r.rows()).join(r)?;
        loop {
            let next = a.join(&compose(&a, &a)?)?;
            if next == a {
                break;
            }
            a = next;
        }
        Self::new(a)
    }

    pub fn discrete(q: Arc<Quantale>, n: usize) -> Self {
        VCategory {
            a: VMatrix::identity(q, n),
        }
    }

    /// `(V, hom)`.
    pub fn hom_v(q: Arc<Quantale>) -> Self {
        let n = q.size();
        let a = VMatrix::from_fn(q.clone(), n, n, |u, v| q.hom(QElem(u as u8), QElem(v as u8)));
        VCategory { a }
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn structure(&self) -> &VMatrix {
        &self.a
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        self.a.quantale()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> QElem {
        self.a.get(x, y)
    }

    /// `X^op = (X, a°)`.
    pub fn dual(&self) -> VCategory {
        VCategory {
            a: self.a.transpose(),
        }
    }

    /// `X ⊗ Y` on the product carrier, pair `(x, y)` at index `x·|Y| + y`.
    pub fn tensor(&self, other: &VCategory) -> Result<VCategory> {
        let q = self.quantale().clone();
        if !crate::vmatrix::same_quantale(&q, other.quantale()) {
            return Err(Error::QuantaleMismatch {
                left: q.name().into(),
                right: other.quantale().name().into(),
            });
        }
        let (nx, ny) = (self.size(), other.size());
        let a = VMatrix::from_fn(q.clone(), nx * ny, nx * ny, |i, j| {
            q.tensor(self.get(i / ny, j / ny), other.get(i % ny, j % ny))
        });
        Self::new(a)
    }

    /// `Y^X` whose carrier is every V-functor `self → y`, ordered by
    /// `d(f,g) = ⋀_x b(f(x), g(x))`.
    pub fn exponential(&self, y: &VCategory, budget: &Budget) -> Result<Exponential> {
        let (nx, ny) = (self.size(), y.size());
        budget.check(pow_sat(ny, nx), || format!("functions {nx} -> {ny}"))?;
        let mut functions = Vec::new();
        let mut f = vec![0usize; nx];
        loop {
            if check_vfunctor(&f, self, y).passed() {
                functions.push(f.clone());
            }
            if !advance_fn(&mut f, ny) {
                break;
            }
        }
        let q = self.quantale().clone();
        let m = functions.len();
        let a = VMatrix::from_fn(q.clone(), m, m, |i, j| {
            q.meet_all((0..nx).map(|x| y.get(functions[i][x], functions[j][x])))
        });
        Ok(Exponential {
            functions,
            category: VCategory::new(a)?,
        })
    }
}

pub(crate) fn advance_fn(f: &mut [usize], base: usize) -> bool {
    for d in f.iter_mut() {
        if *d + 1 < base {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

/// A function space `Y^X` with its carrier listed explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exponential {
    pub functions: Vec<Vec<usize>>,
    pub category: VCategory,
}

impl Exponential {
    pub fn index_of(&self, f: &[usize]) -> Option<usize> {
        self.functions.iter().position(|g| g == f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorVerdict {
    /// Pairs `(x, x′)` with `a(x,x′) ≰ b(f x, f x′)`.
    pub failures: Vec<(usize, usize)>,
}

impl FunctorVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_vfunctor(f: &[usize], x: &VCategory, y: &VCategory) -> FunctorVerdict {
    let q = x.quantale();
    let mut failures = Vec::new();
    for i in 0..x.size() {
        for j in 0..x.size() {
            if !q.leq(x.get(i, j), y.get(f[i], f[j])) {
                failures.push((i, j));
            }
        }
    }
    FunctorVerdict { failures }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BimoduleVerdict {
    /// `ψ·a ≤ ψ` and `b·ψ ≤ ψ`.
    pub direct: bool,
    /// `ψ: X^op ⊗ Y → (V, hom)` is a V-functor.
    pub functorial: bool,
    pub agree: bool,
}

pub fn check_vbimodule(psi: &VMatrix, x: &VCategory, y: &VCategory) -> Result<BimoduleVerdict> {
    let left = compose(psi, x.structure())?.leq(psi)?;
    let right = compose(y.structure(), psi)?.leq(psi)?;
    let direct = left && right;

    let q = x.quantale().clone();
    let src = x.dual().tensor(y)?;
    let hom = VCategory::hom_v(q);
    let ny = y.size();
    let f: Vec<usize> = (0..x.size() * ny)
        .map(|i| psi.get(i / ny, i % ny).index())
        .collect();
    let functorial = check_vfunctor(&f, &src, &hom).passed();
    Ok(BimoduleVerdict {
        direct,
        functorial,
        agree: direct == functorial,
    })
}

/// `f_* = b·f : X ⇸ Y` and `f^* = f°·b : Y ⇸ X` with the adjunction certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedBimodules {
    pub lower: VMatrix,
    pub upper: VMatrix,
    pub lower_is_bimodule: bool,
    pub upper_is_bimodule: bool,
    /// `a ≤ f^*·f_*` and `f_*·f^* ≤ b`.
    pub adjunction: bool,
}

pub fn induced_bimodules(f: &[usize], x: &VCategory, y: &VCategory) -> Result<InducedBimodules> {
    if !check_vfunctor(f, x, y).passed() {
        return Err(Error::Invalid("map is not a V-functor".into()));
    }
    let q = x.quantale().clone();
    let fm = VMatrix::from_map(q, f, y.size());
    let lower = compose(y.structure(), &fm)?;
    let upper = compose(&fm.transpose(), y.structure())?;
    let lower_is_bimodule = check_vbimodule(&lower, x, y)?.direct;
    let upper_is_bimodule = check_vbimodule(&upper, y, x)?.direct;
    let unit = x.structure().leq(&compose(&upper, &lower)?)?;
    let counit = compose(&lower, &upper)?.leq(y.structure())?;
    Ok(InducedBimodules {
        lower,
        upper,
        lower_is_bimodule,
        upper_is_bimodule,
        adjunction: unit && counit,
    })
}

/// Bimodule adjunction `φ ⊣ ψ` for `φ: X ⇸ Y`, `ψ: Y ⇸ X`: `a ≤ ψ·φ` and `φ·ψ ≤ b`.
pub fn bimodule_adjoint(phi: &VMatrix, psi: &VMatrix, x: &VCategory, y: &VCategory) -> Result<bool> {
    Ok(x.structure().leq(&compose(psi, phi)?)? && compose(phi, psi)?.leq(y.structure())?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YonedaEval {
    pub presheaves: usize,
    /// `x ↦ a(−,x)` lands in the presheaf carrier and is a V-functor.
    pub embedding_is_functor: bool,
    /// `(x, presheaf index)` where `d(a(−,x), f) ≠ f(x)`.
    pub failures: Vec<(usize, usize)>,
}

impl YonedaEval {
    pub fn passed(&self) -> bool {
        self.embedding_is_functor && self.failures.is_empty()
    }
}

/// Check `d(a(−,x), f) = f(x)` in `V^(X^op)` for every `x` and every presheaf `f`.
pub fn yoneda_eval(x: &VCategory, budget: &Budget) -> Result<YonedaEval> {
    let q = x.quantale().clone();
    let hom = VCategory::hom_v(q.clone());
    let exp = x.dual().exponential(&hom, budget)?;
    let n = x.size();
    let mut embed = Vec::with_capacity(n);
    for c in 0..n {
        let col: Vec<usize> = (0..n).map(|r| x.get(r, c).index()).collect();
        embed.push(exp.index_of(&col));
    }
    let mut embedding_is_functor = embed.iter().all(Option::is_some);
    let embed: Vec<usize> = embed.into_iter().flatten().collect();
    if embedding_is_functor {
        embedding_is_functor = check_vfunctor(&embed, x, &exp.category).passed();
    }
    let mut failures = Vec::new();
    if embed.len() == n {
        for (c, &e) in embed.iter().enumerate() {
            for (fi, f) in exp.functions.iter().enumerate() {
                if exp.category.get(e, fi) != QElem(f[c] as u8) {
                    failures.push((c, fi));
                }
            }
        }
    }
    Ok(YonedaEval {
        presheaves: exp.functions.len(),
        embedding_is_functor,
        failures,
    })
}

/// Every V-category structure on `n` points, in odometer order.
pub fn all_vcategories(q: &Arc<Quantale>, n: usize, budget: &Budget) -> Result<Vec<VCategory>> {
    budget.check(pow_sat(q.size(), n * n), || format!("{n}x{n} matrices over {}", q.name()))?;
    let mut out = Vec::new();
    let mut d = vec![QElem(0); n * n];
    loop {
        let m = VMatrix::new(q.clone(), n, n, d.clone())?;
        if check_vcategory(&m)?.passed() {
            out.push(VCategory { a: m });
        }
        if !crate::vmatrix::advance(&mut d, q.size()) {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::{builtin, builtin_quantales, chain_meet, two};

    fn arc(q: Quantale) -> Arc<Quantale> {
        Arc::new(q)
    }

    fn preorder(q: &Arc<Quantale>, n: usize, rel: &[(usize, usize)]) -> VMatrix {
        VMatrix::from_fn(q.clone(), n, n, |i, j| {
            if i == j || rel.contains(&(i, j)) {
                q.top()
            } else {
                q.bottom()
            }
        })
    }

    #[test]
    fn discrete_and_hom_are_categories() {
        for q in builtin_quantales() {
            let q = arc(q);
            assert!(check_vcategory(VCategory::discrete(q.clone(), 3).structure()).unwrap().passed());
            assert!(check_vcategory(VCategory::hom_v(q).structure()).unwrap().passed());
        }
    }

    #[test]
    fn non_transitive_relation_fails() {
        let q = arc(two());
        let v = check_vcategory(&preorder(&q, 3, &[(0, 1), (1, 2)])).unwrap();
        assert_eq!(v.transitive_failures, vec![(0, 1, 2)]);
        assert!(v.reflexive_failures.is_empty());
    }

    #[test]
    fn monotone_maps_are_functors() {
        let q = arc(two());
        let chain = VCategory::new(preorder(&q, 2, &[(0, 1)])).unwrap();
        assert!(check_vfunctor(&[0, 1], &chain, &chain).passed());
        assert_eq!(check_vfunctor(&[1, 0], &chain, &chain).failures, vec![(0, 1)]);
    }

    #[test]
    fn structure_is_identity_bimodule() {
        for q in builtin_quantales() {
            let x = VCategory::hom_v(arc(q));
            let v = check_vbimodule(x.structure(), &x, &x).unwrap();
            assert!(v.direct && v.functorial);
            assert_eq!(&compose(x.structure(), x.structure()).unwrap(), x.structure());
        }
    }

    #[test]
    fn induced_bimodules_identity_and_point() {
        let q = arc(chain_meet(3));
        let x = VCategory::generated_by(&VMatrix::from_fn(q.clone(), 3, 3, |i, j| {
            QElem(((i + 2 * j) % 3) as u8)
        }))
        .unwrap();
        let ib = induced_bimodules(&[0, 1, 2], &x, &x).unwrap();
        assert_eq!(&ib.lower, x.structure());
        assert_eq!(&ib.upper, x.structure());
        assert!(ib.adjunction);
        let one = VCategory::discrete(q.clone(), 1);
        let ib = induced_bimodules(&[2], &one, &x).unwrap();
        assert_eq!(ib.lower.row(0), x.structure().row(2));
        assert!(ib.adjunction && ib.lower_is_bimodule && ib.upper_is_bimodule);
    }

    #[test]
    fn surjection_of_preorders_certified() {
        let q = arc(two());
        let x = VCategory::new(preorder(&q, 3, &[(0, 1), (0, 2), (1, 2)])).unwrap();
        let y = VCategory::new(preorder(&q, 2, &[(0, 1)])).unwrap();
        let ib = induced_bimodules(&[0, 0, 1], &x, &y).unwrap();
        assert!(ib.adjunction && ib.lower_is_bimodule && ib.upper_is_bimodule);
    }

    #[test]
    fn derived_categories() {
        let q = arc(builtin("plus3").unwrap());
        let x = VCategory::generated_by(&VMatrix::from_fn(q.clone(), 2, 2, |i, j| {
            QElem((i + 2 * j) as u8)
        }))
        .unwrap();
        assert_eq!(x.dual().dual(), x);
        let unit = VCategory::discrete(q.clone(), 1);
        assert_eq!(x.tensor(&unit).unwrap(), x);
    }

    #[test]
    fn exponential_over_two_is_pointwise_order() {
        let q = arc(two());
        let x = VCategory::new(preorder(&q, 2, &[(0, 1)])).unwrap();
        let exp = x.exponential(&x, &Budget::default()).unwrap();
        // monotone self-maps of a 2-chain: const 0, id, const 1
        assert_eq!(exp.functions, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        for (i, f) in exp.functions.iter().enumerate() {
            for (j, g) in exp.functions.iter().enumerate() {
                let pointwise = (0..2).all(|t| f[t] <= g[t]);
                assert_eq!(exp.category.get(i, j) == q.top(), pointwise);
            }
        }
    }

    #[test]
    fn yoneda_identity_small() {
        let q = arc(two());
        let one = VCategory::discrete(q.clone(), 1);
        let y = yoneda_eval(&one, &Budget::default()).unwrap();
        assert!(y.passed());
        assert_eq!(y.presheaves, 2);
        for q in [two(), chain_meet(3)] {
            let q = arc(q);
            for x in all_vcategories(&q, 2, &Budget::default()).unwrap() {
                assert!(yoneda_eval(&x, &Budget::default()).unwrap().passed());
            }
        }
    }

    #[test]
    fn bimodule_two_paths_agree_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let q = arc(chain_meet(3));
        for _ in 0..200 {
            let rnd = |rng: &mut rand_chacha::ChaCha8Rng, r: usize, c: usize| {
                VMatrix::from_fn(q.clone(), r, c, |_, _| QElem(rng.gen_range(0..3)))
            };
            let x = VCategory::generated_by(&rnd(&mut rng, 2, 2)).unwrap();
            let y = VCategory::generated_by(&rnd(&mut rng, 2, 2)).unwrap();
            let psi = rnd(&mut rng, 2, 2);
            assert!(check_vbimodule(&psi, &x, &y).unwrap().agree);
        }
    }
}

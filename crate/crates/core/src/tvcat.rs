//! (T,V)-categories: structures `a: TX ⇸ X` over a lax extension.

use crate::enriched::VCategory;
use crate::error::{Error, Result};
use crate::laxext::LaxExtension;
use crate::quantale::QElem;
use crate::vmatrix::{compose, VMatrix};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Failure lists are truncated to this many witnesses; counts stay exact.
const MAX_WITNESSES: usize = 32;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TVCatVerdict {
    /// `x` with `k ≰ a(e_X(x), x)`.
    pub reflexive_failures: Vec<usize>,
    /// `(𝔛, 𝔵, x)` with `Ta(𝔛,𝔵) ⊗ a(𝔵,x) ≰ a(m_X(𝔛), x)`.
    pub transitive_failures: Vec<(usize, usize, usize)>,
    pub transitive_failure_count: u64,
}

impl TVCatVerdict {
    pub fn passed(&self) -> bool {
        self.reflexive_failures.is_empty() && self.transitive_failure_count == 0
    }
}

fn structure_shape(ext: &LaxExtension, a: &VMatrix) -> Result<usize> {
    let n = a.cols();
    let tn = ext.t_size(n)?;
    if a.rows() != tn {
        return Err(Error::DimensionMismatch {
            op: "(T,V)-structure",
            left: (a.rows(), a.cols()),
            right: (tn, n),
        });
    }
    Ok(n)
}

pub fn check_tvcategory(ext: &LaxExtension, a: &VMatrix) -> Result<TVCatVerdict> {
    let n = structure_shape(ext, a)?;
    let q = ext.quantale();
    let e = ext.unit(n);
    let m = ext.mult(n)?;
    let ta = ext.extend(a)?;
    let mut v = TVCatVerdict::default();
    for x in 0..n {
        if !q.leq(q.unit(), a.get(e[x], x)) {
            v.reflexive_failures.push(x);
        }
    }
    let tn = a.rows();
    for big in 0..ta.rows() {
        for small in 0..tn {
            let t = ta.get(big, small);
            if t == q.bottom() {
                continue;
            }
            for x in 0..n {
                if !q.leq(q.tensor(t, a.get(small, x)), a.get(m[big], x)) {
                    v.transitive_failure_count += 1;
                    if v.transitive_failures.len() < MAX_WITNESSES {
                        v.transitive_failures.push((big, small, x));
                    }
                }
            }
        }
    }
    Ok(v)
}

/// A validated (T,V)-category on `{0..n}`.
#[derive(Clone, Debug)]
pub struct TVCategory {
    ext: Arc<LaxExtension>,
    a: VMatrix,
}

impl TVCategory {
    pub fn new(ext: Arc<LaxExtension>, a: VMatrix) -> Result<Self> {
        let v = check_tvcategory(&ext, &a)?;
        if !v.passed() {
            return Err(Error::Invalid(format!(
                "not a (T,V)-category: reflexivity fails at {:?}, {} transitivity failures (first {:?})",
                v.reflexive_failures,
                v.transitive_failure_count,
                v.transitive_failures.first()
            )));
        }
        Ok(TVCategory { ext, a })
    }

    /// The discrete structure `e_X°`.
    pub fn discrete(ext: Arc<LaxExtension>, n: usize) -> Result<Self> {
        let a = ext.unit_matrix(n)?.transpose();
        Self::new(ext, a)
    }

    /// `|X| = (TX, m_X)`.
    pub fn free_algebra(ext: Arc<LaxExtension>, n: usize) -> Result<Self> {
        let a = ext.mult_matrix(n)?;
        Self::new(ext, a)
    }

    /// `E°(X, r) = (X, e_X°·Tr)`.
    pub fn from_vcategory(ext: Arc<LaxExtension>, x: &VCategory) -> Result<Self> {
        let tr = ext.extend(x.structure())?;
        let a = compose(&ext.unit_matrix(x.size())?.transpose(), &tr)?;
        Self::new(ext, a)
    }

    /// `(V, hom·ξ)`.
    pub fn hom_xi(ext: Arc<LaxExtension>) -> Result<Self> {
        let a = hom_xi_matrix(&ext)?;
        Self::new(ext, a)
    }

    pub fn ext(&self) -> &Arc<LaxExtension> {
        &self.ext
    }

    pub fn size(&self) -> usize {
        self.a.cols()
    }

    /// `|TX|`.
    pub fn t_size(&self) -> usize {
        self.a.rows()
    }

    pub fn structure(&self) -> &VMatrix {
        &self.a
    }

    #[inline]
    pub fn get(&self, tx: usize, x: usize) -> QElem {
        self.a.get(tx, x)
    }

    /// `E(X) = (X, a·e_X)`.
    pub fn underlying(&self) -> Result<VCategory> {
        VCategory::new(compose(&self.a, &self.ext.unit_matrix(self.size())?)?)
    }

    /// `M°(X) = (TX, Ta·m_X°)` as a bare matrix.
    pub fn m_circ_matrix(&self) -> Result<VMatrix> {
        let ta = self.ext.extend(&self.a)?;
        compose(&ta, &self.ext.mult_matrix(self.size())?.transpose())
    }

    /// `a^op = e_TX°·Tm_X·T²a°: TTX ⇸ TX`.
    pub fn dual_matrix(&self) -> Result<VMatrix> {
        let ext = &self.ext;
        let n = self.size();
        let tn = self.t_size();
        let t2a_op = ext.extend(&*ext.extend(&self.a.transpose())?)?;
        let m = ext.mult(n)?;
        let tm = ext.map(&m, tn)?;
        let e_t = ext.unit(tn);
        let q = ext.quantale();
        let mut out = VMatrix::bottom(q.clone(), t2a_op.rows(), tn);
        for big in 0..t2a_op.rows() {
            for (w, &img) in tm.iter().enumerate() {
                // Tm_X(𝔚) = e_TX(𝔵) picks out 𝔵
                if let Some(x) = e_t.iter().position(|&u| u == img) {
                    out.set(big, x, q.join(out.get(big, x), t2a_op.get(big, w)));
                }
            }
        }
        Ok(out)
    }

    /// `E°(M°(X)^op)`, the other description of the dual.
    pub fn dual_matrix_via_m_circ(&self) -> Result<VMatrix> {
        let c = self.m_circ_matrix()?.transpose();
        let tc = self.ext.extend(&c)?;
        compose(&self.ext.unit_matrix(self.t_size())?.transpose(), &tc)
    }

    /// `X^op` on the carrier `TX`.
    pub fn dual(&self) -> Result<TVCategory> {
        TVCategory::new(self.ext.clone(), self.dual_matrix()?)
    }

    /// `X ⊗ Y`, pair `(x, y)` at index `x·|Y| + y`. Needs the tensor-strict capability.
    pub fn tensor(&self, other: &TVCategory) -> Result<TVCategory> {
        let compat = crate::laxext::check_xi_compat(&self.ext, 0, 0)?;
        if !compat.tensor_strict {
            return Err(Error::GateFailed {
                gate: "tensor-strict".into(),
                detail: format!("{} over {}", self.ext.monad().name(), self.ext.quantale().name()),
            });
        }
        let c = tensor_structure(&self.ext, &self.a, &other.a)?;
        TVCategory::new(self.ext.clone(), c)
    }

    /// `a·Ta = a·m_X`, the condition for exponentials with this base.
    pub fn exponentiable(&self) -> Result<bool> {
        let ta = self.ext.extend(&self.a)?;
        let lhs = compose(&self.a, &ta)?;
        let m = self.ext.mult(self.size())?;
        Ok((0..lhs.rows()).all(|big| (0..self.size()).all(|x| lhs.get(big, x) == self.a.get(m[big], x))))
    }
}

/// `hom_ξ(𝔳, v) = hom(ξ(𝔳), v)`.
pub fn hom_xi_matrix(ext: &LaxExtension) -> Result<VMatrix> {
    let q = ext.quantale().clone();
    let xi = ext.xi()?;
    let n = q.size();
    Ok(VMatrix::from_fn(q.clone(), xi.len(), n, |w, v| q.hom(xi[w], QElem(v as u8))))
}

/// `(a⊗b)(𝔴,(x,y)) = a(Tπ_X 𝔴, x) ⊗ b(Tπ_Y 𝔴, y)`, unvalidated.
pub fn tensor_structure(ext: &LaxExtension, a: &VMatrix, b: &VMatrix) -> Result<VMatrix> {
    let (nx, ny) = (a.cols(), b.cols());
    let px: Vec<usize> = (0..nx * ny).map(|i| i / ny).collect();
    let py: Vec<usize> = (0..nx * ny).map(|i| i % ny).collect();
    let tpx = ext.map(&px, nx)?;
    let tpy = ext.map(&py, ny)?;
    let q = ext.quantale().clone();
    Ok(VMatrix::from_fn(q.clone(), tpx.len(), nx * ny, |w, i| {
        q.tensor(a.get(tpx[w], i / ny), b.get(tpy[w], i % ny))
    }))
}

/// `b∗a = b·Ta·m_X°` for `a: TX ⇸ Y`, `b: TY ⇸ Z`, with `|X| = nx`.
pub fn kleisli_compose(ext: &LaxExtension, b: &VMatrix, a: &VMatrix, nx: usize) -> Result<VMatrix> {
    let ta = ext.extend(a)?;
    let c = compose(b, &ta)?;
    let m = ext.mult(nx)?;
    let q = ext.quantale();
    let mut out = VMatrix::bottom(q.clone(), a.rows(), b.cols());
    for big in 0..c.rows() {
        for z in 0..c.cols() {
            out.set(m[big], z, q.join(out.get(m[big], z), c.get(big, z)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleisliLaws {
    /// `a∗e_X° = a`.
    pub right_identity: bool,
    /// `e_Y°∗a ≥ a`.
    pub left_identity: bool,
}

pub fn kleisli_identity_laws(ext: &LaxExtension, a: &VMatrix, nx: usize) -> Result<KleisliLaws> {
    let ex = ext.unit_matrix(nx)?.transpose();
    let ey = ext.unit_matrix(a.cols())?.transpose();
    Ok(KleisliLaws {
        right_identity: kleisli_compose(ext, a, &ex, nx)? == *a,
        left_identity: a.leq(&kleisli_compose(ext, &ey, a, nx)?)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KleisliAssoc {
    /// `c∗(b∗a) ≤ (c∗b)∗a`.
    pub left_below: bool,
    /// `c∗(b∗a) ≥ (c∗b)∗a`.
    pub left_above: bool,
}

/// Compares both bracketings of `c∗b∗a` with `a: TX ⇸ Y`, `b: TY ⇸ Z`, `c: TZ ⇸ W`.
pub fn kleisli_assoc(
    ext: &LaxExtension,
    c: &VMatrix,
    b: &VMatrix,
    a: &VMatrix,
    nx: usize,
    ny: usize,
) -> Result<KleisliAssoc> {
    let left = kleisli_compose(ext, c, &kleisli_compose(ext, b, a, nx)?, nx)?;
    let right = kleisli_compose(ext, &kleisli_compose(ext, c, b, ny)?, a, nx)?;
    Ok(KleisliAssoc {
        left_below: left.leq(&right)?,
        left_above: right.leq(&left)?,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TVFunctorVerdict {
    /// `(𝔵, x)` with `a(𝔵,x) ≰ b(Tf 𝔵, f x)`.
    pub failures: Vec<(usize, usize)>,
}

impl TVFunctorVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_tvfunctor_raw(ext: &LaxExtension, f: &[usize], a: &VMatrix, b: &VMatrix) -> Result<TVFunctorVerdict> {
    let tf = ext.map(f, b.cols())?;
    let q = ext.quantale();
    let mut failures = Vec::new();
    for tx in 0..a.rows() {
        for x in 0..a.cols() {
            if !q.leq(a.get(tx, x), b.get(tf[tx], f[x])) {
                failures.push((tx, x));
            }
        }
    }
    Ok(TVFunctorVerdict { failures })
}

pub fn check_tvfunctor(f: &[usize], x: &TVCategory, y: &TVCategory) -> Result<TVFunctorVerdict> {
    check_tvfunctor_raw(&x.ext, f, &x.a, &y.a)
}

/// `ψ: (Z,c) → (V, hom_ξ)` is a (T,V)-functor: `c(𝔴,z) ≤ hom(ξ(T_oψ(𝔴)), ψ(z))`.
pub fn is_functor_to_v(ext: &LaxExtension, c: &VMatrix, psi: &[QElem]) -> Result<bool> {
    let txi = ext.xi_of_map(psi)?;
    let q = ext.quantale();
    Ok((0..c.rows()).all(|w| (0..c.cols()).all(|z| q.leq(c.get(w, z), q.hom(txi[w], psi[z])))))
}

/// `ψ∗a ≤ ψ` and `b∗ψ ≤ ψ` for `ψ: TX ⇸ Y`.
pub fn is_tvbimodule(psi: &VMatrix, x: &TVCategory, y: &TVCategory) -> Result<bool> {
    let ext = &x.ext;
    Ok(kleisli_compose(ext, psi, &x.a, x.size())?.leq(psi)?
        && kleisli_compose(ext, &y.a, psi, x.size())?.leq(psi)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TVBimoduleVerdict {
    pub direct: bool,
    /// `ψ: |X|⊗Y → V` is a (T,V)-functor.
    pub from_free: bool,
    /// `ψ: X^op⊗Y → V` is a (T,V)-functor.
    pub from_dual: bool,
    pub agree: bool,
    /// Whether `m` passed its BC check, the hypothesis for agreement.
    pub gate_m_bc: bool,
}

/// Direct bimodule test against the two-functor characterization.
pub fn check_tvbimodule(psi: &VMatrix, x: &TVCategory, y: &TVCategory) -> Result<TVBimoduleVerdict> {
    let ext = &x.ext;
    let direct = is_tvbimodule(psi, x, y)?;
    let values: Vec<QElem> = psi.data().to_vec();
    let free = ext.mult_matrix(x.size())?;
    let c1 = tensor_structure(ext, &free, &y.a)?;
    let from_free = is_functor_to_v(ext, &c1, &values)?;
    let c2 = tensor_structure(ext, &x.dual_matrix()?, &y.a)?;
    let from_dual = is_functor_to_v(ext, &c2, &values)?;
    let functorial = from_free && from_dual;
    Ok(TVBimoduleVerdict {
        direct,
        from_free,
        from_dual,
        agree: direct == functorial,
        gate_m_bc: ext.capabilities()?.m_bc,
    })
}

/// `f_* = b·Tf: TX ⇸ Y` and `f^* = f°·b: TY ⇸ X`.
pub fn induced_modules(f: &[usize], x: &TVCategory, y: &TVCategory) -> Result<(VMatrix, VMatrix)> {
    let tf = x.ext.map_matrix(f, y.size())?;
    let lower = compose(&y.a, &tf)?;
    let fm = VMatrix::from_map(x.ext.quantale().clone(), f, y.size());
    let upper = compose(&fm.transpose(), &y.a)?;
    Ok((lower, upper))
}

/// `φ ⊣ ψ` for `φ: X ⇸ Y`, `ψ: Y ⇸ X`: `a ≤ ψ∗φ` and `φ∗ψ ≤ b`.
pub fn tv_adjoint(phi: &VMatrix, psi: &VMatrix, x: &TVCategory, y: &TVCategory) -> Result<bool> {
    let ext = &x.ext;
    Ok(x.a.leq(&kleisli_compose(ext, psi, phi, x.size())?)?
        && kleisli_compose(ext, phi, psi, y.size())?.leq(&y.a)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorEquivalence {
    /// `f` is a (T,V)-functor.
    pub functor: bool,
    /// `f_*` is a bimodule.
    pub lower_bimodule: bool,
    /// `f^*` is a bimodule.
    pub upper_bimodule: bool,
    /// `f_* ⊣ f^*`, computed only for functors.
    pub adjunction: Option<bool>,
}

impl FunctorEquivalence {
    pub fn consistent(&self) -> bool {
        self.functor == self.lower_bimodule && self.functor == self.upper_bimodule
    }
}

pub fn functor_equivalence(f: &[usize], x: &TVCategory, y: &TVCategory) -> Result<FunctorEquivalence> {
    let functor = check_tvfunctor(f, x, y)?.passed();
    let (lower, upper) = induced_modules(f, x, y)?;
    let adjunction = if functor {
        Some(tv_adjoint(&lower, &upper, x, y)?)
    } else {
        None
    };
    Ok(FunctorEquivalence {
        functor,
        lower_bimodule: is_tvbimodule(&lower, x, y)?,
        upper_bimodule: is_tvbimodule(&upper, y, x)?,
        adjunction,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Whiskering {
    /// `φ∗f_* = φ·Tf`.
    pub lower_formula: bool,
    /// `f^*∗ψ = f°·ψ`.
    pub upper_formula: bool,
    pub lower_is_bimodule: bool,
    pub upper_is_bimodule: bool,
}

/// Whiskering a bimodule `φ: Y ⇸ Z` by `f_*` and `ψ: Z ⇸ Y` by `f^*`.
pub fn whiskering(
    f: &[usize],
    x: &TVCategory,
    y: &TVCategory,
    z: &TVCategory,
    phi: &VMatrix,
    psi: &VMatrix,
) -> Result<Whiskering> {
    let ext = &x.ext;
    let (lower, upper) = induced_modules(f, x, y)?;
    let w1 = kleisli_compose(ext, phi, &lower, x.size())?;
    let w2 = kleisli_compose(ext, &upper, psi, z.size())?;
    let tf = ext.map_matrix(f, y.size())?;
    let fm = VMatrix::from_map(ext.quantale().clone(), f, y.size());
    Ok(Whiskering {
        lower_formula: w1 == compose(phi, &tf)?,
        upper_formula: w2 == compose(&fm.transpose(), psi)?,
        lower_is_bimodule: is_tvbimodule(&w1, x, z)?,
        upper_is_bimodule: is_tvbimodule(&w2, z, x)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraCompose {
    /// `α·e = id` and `α·Tα = α·m`.
    pub alpha_is_algebra: bool,
    /// `(X, a·α)` is a (T,V)-category.
    pub is_structure: bool,
    /// `α: (TX, Ta) → (X, a)` is a V-functor.
    pub alpha_functor: bool,
}

/// The structure `a·α` for a V-category `a` and a map `α: TX → X`.
pub fn algebra_compose(ext: &LaxExtension, x: &VCategory, alpha: &[usize]) -> Result<AlgebraCompose> {
    let n = x.size();
    let e = ext.unit(n);
    let m = ext.mult(n)?;
    let talpha = ext.map(alpha, n)?;
    let alpha_is_algebra =
        (0..n).all(|p| alpha[e[p]] == p) && (0..m.len()).all(|big| alpha[talpha[big]] == alpha[m[big]]);
    let am = VMatrix::from_map(ext.quantale().clone(), alpha, n);
    let s = compose(x.structure(), &am)?;
    let is_structure = check_tvcategory(ext, &s)?.passed();
    let ta = ext.extend(x.structure())?;
    let q = ext.quantale();
    let alpha_functor = (0..ta.rows())
        .all(|i| (0..ta.cols()).all(|j| q.leq(ta.get(i, j), x.get(alpha[i], alpha[j]))));
    Ok(AlgebraCompose {
        alpha_is_algebra,
        is_structure,
        alpha_functor,
    })
}

/// `Y^X` with carrier the (T,V)-functors `X⊗(1,p) → Y`.
#[derive(Clone, Debug)]
pub struct TVExponential {
    pub functions: Vec<Vec<usize>>,
    /// `⟨a,b⟩: T(Y^X) ⇸ Y^X`.
    pub structure: VMatrix,
    /// Entries whose defining meet ranged over an empty fibre.
    pub empty_fibres: usize,
    /// The join-over-`v` description agrees with the meet of residuals.
    pub literal_agrees: bool,
    /// `ev: X⊗Y^X → Y` is a (T,V)-functor.
    pub evaluation_is_functor: bool,
    /// Raising any entry by one covering step breaks functoriality of `ev`.
    pub maximal: bool,
    pub is_category: bool,
}

impl TVExponential {
    pub fn index_of(&self, f: &[usize]) -> Option<usize> {
        self.functions.iter().position(|g| g == f)
    }

    pub fn passed(&self) -> bool {
        self.literal_agrees && self.evaluation_is_functor && self.maximal && self.is_category
    }
}

/// `a⊗p` on `X ≅ X×1`: `a(𝔴,x) ⊗ p(T!(𝔴), ⋆)`.
fn with_point(ext: &LaxExtension, a: &VMatrix) -> Result<VMatrix> {
    let n = a.cols();
    let bang = ext.map(&vec![0; n], 1)?;
    let star = ext.unit(1)[0];
    let q = ext.quantale().clone();
    Ok(VMatrix::from_fn(q.clone(), a.rows(), n, |w, x| {
        if bang[w] == star {
            a.get(w, x)
        } else {
            q.bottom()
        }
    }))
}

/// Everything `ev` needs: `T(X×E)` with its two projections and `T ev`.
struct EvalData {
    tpx: Vec<usize>,
    tpe: Vec<usize>,
    tev: Vec<usize>,
}

fn eval_data(ext: &LaxExtension, nx: usize, functions: &[Vec<usize>], ny: usize) -> Result<EvalData> {
    let ne = functions.len();
    let px: Vec<usize> = (0..nx * ne).map(|i| i / ne).collect();
    let pe: Vec<usize> = (0..nx * ne).map(|i| i % ne).collect();
    let ev: Vec<usize> = (0..nx * ne).map(|i| functions[i % ne][i / ne]).collect();
    ext.budget()
        .check(ext.t_size(nx * ne)? as u128 * nx as u128, || "exponential fibres".into())?;
    Ok(EvalData {
        tpx: ext.map(&px, nx)?,
        tpe: ext.map(&pe, ne)?,
        tev: ext.map(&ev, ny)?,
    })
}

fn ev_is_functor(
    ext: &LaxExtension,
    a: &VMatrix,
    b: &VMatrix,
    c: &VMatrix,
    functions: &[Vec<usize>],
    d: &EvalData,
) -> bool {
    let q = ext.quantale();
    let nx = a.cols();
    (0..d.tpx.len()).all(|w| {
        (0..nx).all(|x| {
            functions.iter().enumerate().all(|(h, f)| {
                q.leq(q.tensor(a.get(d.tpx[w], x), c.get(d.tpe[w], h)), b.get(d.tev[w], f[x]))
            })
        })
    })
}

/// `Y^X`; fails the gate unless `a·Ta = a·m_X`.
pub fn exponential(x: &TVCategory, y: &TVCategory) -> Result<TVExponential> {
    if !x.exponentiable()? {
        return Err(Error::GateFailed {
            gate: "a·Ta = a·m_X".into(),
            detail: "exponent is not exponentiable".into(),
        });
    }
    exponential_raw(&x.ext, &x.a, &y.a)
}

pub(crate) fn exponential_raw(ext: &LaxExtension, a: &VMatrix, b: &VMatrix) -> Result<TVExponential> {
    let q = ext.quantale().clone();
    let (nx, ny) = (a.cols(), b.cols());
    ext.budget()
        .check(crate::error::pow_sat(ny, nx), || format!("functions {nx} -> {ny}"))?;
    let ap = with_point(ext, a)?;
    let mut functions = Vec::new();
    for f in crate::monad::all_functions(nx, ny) {
        if check_tvfunctor_raw(ext, &f, &ap, b)?.passed() {
            functions.push(f);
        }
    }
    let ne = functions.len();
    let te = ext.t_size(ne)?;
    let d = eval_data(ext, nx, &functions, ny)?;
    let mut structure = VMatrix::filled(q.clone(), te, ne, q.top());
    let mut in_fibre = vec![false; te];
    for w in 0..d.tpx.len() {
        let p = d.tpe[w];
        in_fibre[p] = true;
        for (h, f) in functions.iter().enumerate() {
            for xx in 0..nx {
                let r = q.hom(a.get(d.tpx[w], xx), b.get(d.tev[w], f[xx]));
                structure.set(p, h, q.meet(structure.get(p, h), r));
            }
        }
    }
    let empty_fibres = in_fibre.iter().filter(|b| !**b).count() * ne;

    // ⋁{v | ∀𝔮 over 𝔭, x: a(Tπ_X 𝔮, x) ⊗ v ≤ b(T ev 𝔮, h(x))}
    let mut literal_agrees = true;
    for p in 0..te {
        for (h, f) in functions.iter().enumerate() {
            let lit = q.join_all(q.elements().filter(|&v| {
                (0..d.tpx.len()).filter(|&w| d.tpe[w] == p).all(|w| {
                    (0..nx).all(|xx| q.leq(q.tensor(a.get(d.tpx[w], xx), v), b.get(d.tev[w], f[xx])))
                })
            }));
            literal_agrees &= lit == structure.get(p, h);
        }
    }

    let evaluation_is_functor = ev_is_functor(ext, a, b, &structure, &functions, &d);
    let mut maximal = true;
    'bump: for p in 0..te {
        for h in 0..ne {
            let cur = structure.get(p, h);
            for up in q.upper_covers(cur) {
                let mut bumped = structure.clone();
                bumped.set(p, h, up);
                if ev_is_functor(ext, a, b, &bumped, &functions, &d) {
                    maximal = false;
                    break 'bump;
                }
            }
        }
    }
    let is_category = check_tvcategory(ext, &structure)?.passed();
    Ok(TVExponential {
        functions,
        structure,
        empty_fibres,
        literal_agrees,
        evaluation_is_functor,
        maximal,
        is_category,
    })
}

/// Searches every structure on `Y^X` for the largest one keeping `ev` a
/// functor, and compares it with the computed structure.
pub fn exponential_oracle(x: &TVCategory, y: &TVCategory, exp: &TVExponential) -> Result<bool> {
    let ext = &x.ext;
    let q = ext.quantale().clone();
    let ne = exp.functions.len();
    let te = exp.structure.rows();
    let cells = te * ne;
    ext.budget()
        .check(crate::error::pow_sat(q.size(), cells), || "structures on the exponential".into())?;
    let d = eval_data(ext, x.size(), &exp.functions, y.size())?;
    let mut best: Option<VMatrix> = None;
    let mut digits = vec![QElem(0); cells];
    loop {
        let c = VMatrix::new(q.clone(), te, ne, digits.clone())?;
        if ev_is_functor(ext, &x.a, &y.a, &c, &exp.functions, &d) {
            best = Some(match best {
                Some(b) => b.join(&c)?,
                None => c,
            });
        }
        if !crate::vmatrix::advance(&mut digits, q.size()) {
            break;
        }
    }
    // The join of admissible structures must itself be admissible and equal ours.
    Ok(match best {
        Some(b) => ev_is_functor(ext, &x.a, &y.a, &b, &exp.functions, &d) && b == exp.structure,
        None => false,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct YonedaReport {
    pub carrier: usize,
    /// `|V^{|X|}|`.
    pub presheaves: usize,
    /// `|X̂|`.
    pub hat_size: usize,
    pub y_in_carrier: bool,
    pub y_is_functor: bool,
    /// `(𝔵, φ)` violating `⟨m_X,hom_ξ⟩(Ty(𝔵),φ) ≤ φ(𝔵)`.
    pub part_a_failures: Vec<(usize, usize)>,
    /// `φ` where the pointwise bound and functoriality on `X^op` disagree.
    pub part_b_failures: Vec<usize>,
    /// The structure agrees with `⋀_𝔶 hom(Ta·m_X°(𝔶,𝔵), φ(𝔶))`.
    pub closed_form_agrees: bool,
    /// `Some` only when `T1 = 1`.
    pub fully_faithful: Option<bool>,
    pub empty_fibres: usize,
    pub exponential_ok: bool,
}

impl YonedaReport {
    pub fn passed(&self) -> bool {
        self.y_in_carrier
            && self.y_is_functor
            && self.part_a_failures.is_empty()
            && self.part_b_failures.is_empty()
            && self.closed_form_agrees
            && self.fully_faithful != Some(false)
            && self.exponential_ok
    }
}

/// The Yoneda functor `y: X → V^{|X|}` and its two inequalities.
pub fn yoneda(x: &TVCategory) -> Result<YonedaReport> {
    let ext = x.ext.clone();
    let q = ext.quantale().clone();
    let n = x.size();
    let tn = x.t_size();
    let free = TVCategory::free_algebra(ext.clone(), n)?;
    let hv = TVCategory::hom_xi(ext.clone())?;
    let exp = exponential(&free, &hv)?;
    let c = &exp.structure;
    let col = |xx: usize| -> Vec<usize> { (0..tn).map(|t| x.get(t, xx).index()).collect() };
    let y: Vec<Option<usize>> = (0..n).map(|xx| exp.index_of(&col(xx))).collect();
    let y_in_carrier = y.iter().all(Option::is_some);
    let mut rep = YonedaReport {
        carrier: n,
        presheaves: exp.functions.len(),
        y_in_carrier,
        empty_fibres: exp.empty_fibres,
        exponential_ok: exp.passed(),
        ..Default::default()
    };
    if !y_in_carrier {
        return Ok(rep);
    }
    let y: Vec<usize> = y.into_iter().flatten().collect();
    let ne = exp.functions.len();
    let ty = ext.map(&y, ne)?;
    let exp_cat_a = &exp.structure;
    rep.y_is_functor = check_tvfunctor_raw(&ext, &y, &x.a, exp_cat_a)?.passed();

    let mc = x.m_circ_matrix()?;
    let dual = x.dual_matrix()?;
    let val = |phi: usize, t: usize| QElem(exp.functions[phi][t] as u8);
    let mut closed_form_agrees = true;
    let mut hat = Vec::new();
    for phi in 0..ne {
        let mut pointwise = true;
        for t in 0..tn {
            let lhs = c.get(ty[t], phi);
            if !q.leq(lhs, val(phi, t)) {
                rep.part_a_failures.push((t, phi));
            }
            pointwise &= q.leq(val(phi, t), lhs);
            let closed = q.meet_all((0..tn).map(|s| q.hom(mc.get(s, t), val(phi, s))));
            closed_form_agrees &= closed == lhs;
        }
        let values: Vec<QElem> = (0..tn).map(|t| val(phi, t)).collect();
        let functorial = is_functor_to_v(&ext, &dual, &values)?;
        if pointwise != functorial {
            rep.part_b_failures.push(phi);
        }
        if functorial {
            hat.push(phi);
        }
    }
    rep.closed_form_agrees = closed_form_agrees;
    rep.hat_size = hat.len();
    if ext.capabilities()?.t1_is_one() {
        let lands = y.iter().all(|h| hat.contains(h));
        let faithful = (0..tn).all(|t| (0..n).all(|xx| x.get(t, xx) == c.get(ty[t], y[xx])));
        rep.fully_faithful = Some(lands && faithful);
    }
    Ok(rep)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Yoneda0Report {
    pub presheaves: usize,
    pub y0_in_carrier: bool,
    /// `(𝔵, φ)` violating `⟨a^op,hom_ξ⟩(Ty₀(𝔵),φ) ≥ φ(𝔵)`.
    pub part_a_failures: Vec<(usize, usize)>,
    /// `𝔵` with `k ≤ Ta·e_TX(𝔵,𝔵)`.
    pub gated_points: Vec<usize>,
    /// `(𝔵, φ)` among gated points violating the reverse inequality.
    pub part_b_failures: Vec<(usize, usize)>,
    pub empty_fibres: usize,
}

impl Yoneda0Report {
    pub fn passed(&self) -> bool {
        self.y0_in_carrier && self.part_a_failures.is_empty() && self.part_b_failures.is_empty()
    }
}

/// Whether `Te_X·e_X = m_X°·e_X`: each `e_X(x)` has `Te_X(e_X(x))` as its only `m_X`-preimage.
pub fn yoneda0_precondition(ext: &LaxExtension, n: usize) -> Result<bool> {
    let e = ext.unit(n);
    let te = ext.map(&e, ext.t_size(n)?)?;
    let m = ext.mult(n)?;
    Ok((0..n).all(|xx| {
        let target = te[e[xx]];
        (0..m.len()).all(|big| (m[big] == e[xx]) == (big == target))
    }))
}

/// `y₀: X → V^{X^op}` and its two inequalities.
pub fn yoneda0(x: &TVCategory) -> Result<Yoneda0Report> {
    let ext = x.ext.clone();
    let q = ext.quantale().clone();
    let n = x.size();
    let tn = x.t_size();
    if !yoneda0_precondition(&ext, n)? {
        return Err(Error::GateFailed {
            gate: "Te_X·e_X = m_X°·e_X".into(),
            detail: format!("{} on {n} points", ext.monad().name()),
        });
    }
    let dual = x.dual()?;
    if !dual.exponentiable()? {
        return Err(Error::GateFailed {
            gate: "a·Ta = a·m_X".into(),
            detail: "X^op is not exponentiable".into(),
        });
    }
    let hv = TVCategory::hom_xi(ext.clone())?;
    let exp = exponential(&dual, &hv)?;
    let c = &exp.structure;
    let col = |xx: usize| -> Vec<usize> { (0..tn).map(|t| x.get(t, xx).index()).collect() };
    let y0: Vec<Option<usize>> = (0..n).map(|xx| exp.index_of(&col(xx))).collect();
    let mut rep = Yoneda0Report {
        presheaves: exp.functions.len(),
        y0_in_carrier: y0.iter().all(Option::is_some),
        empty_fibres: exp.empty_fibres,
        ..Default::default()
    };
    if !rep.y0_in_carrier {
        return Ok(rep);
    }
    let y0: Vec<usize> = y0.into_iter().flatten().collect();
    let ty0 = ext.map(&y0, exp.functions.len())?;
    let ta = ext.extend(&x.a)?;
    let et = ext.unit(tn);
    for t in 0..tn {
        if q.leq(q.unit(), ta.get(et[t], t)) {
            rep.gated_points.push(t);
        }
    }
    for (phi, f) in exp.functions.iter().enumerate() {
        for t in 0..tn {
            let lhs = c.get(ty0[t], phi);
            let v = QElem(f[t] as u8);
            if !q.leq(v, lhs) {
                rep.part_a_failures.push((t, phi));
            }
            if rep.gated_points.contains(&t) && !q.leq(lhs, v) {
                rep.part_b_failures.push((t, phi));
            }
        }
    }
    Ok(rep)
}

/// Every (T,V)-structure on `n` points, in odometer order.
pub fn all_tvcategories(ext: &Arc<LaxExtension>, n: usize) -> Result<Vec<TVCategory>> {
    let q = ext.quantale().clone();
    let tn = ext.t_size(n)?;
    ext.budget()
        .check(crate::error::pow_sat(q.size(), tn * n), || format!("structures {tn}x{n}"))?;
    let mut out = Vec::new();
    let mut d = vec![QElem(0); tn * n];
    let e = ext.unit(n);
    loop {
        let a = VMatrix::new(q.clone(), tn, n, d.clone())?;
        if (0..n).all(|x| q.leq(q.unit(), a.get(e[x], x))) && check_tvcategory(ext, &a)?.passed() {
            out.push(TVCategory { ext: ext.clone(), a });
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
    use crate::error::Budget;
    use crate::monad::{monad_by_name, Identity};
    use crate::quantale::builtin;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ext(q: &str, t: &str) -> Arc<LaxExtension> {
        Arc::new(
            LaxExtension::new(Arc::new(builtin(q).unwrap()), monad_by_name(t).unwrap(), Budget::default())
                .unwrap(),
        )
    }

    #[test]
    fn identity_monad_kleisli_is_plain_composition() {
        let e = ext("chain3", "id");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = VMatrix::random(e.quantale().clone(), 2, 3, &mut rng);
            let b = VMatrix::random(e.quantale().clone(), 3, 2, &mut rng);
            assert_eq!(kleisli_compose(&e, &b, &a, 2).unwrap(), compose(&b, &a).unwrap());
        }
    }

    #[test]
    fn lax_identities() {
        for (qn, tn) in [("2", "ultra"), ("2", "powerset"), ("plus3", "id")] {
            let e = ext(qn, tn);
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            for _ in 0..10 {
                let rows = e.t_size(2).unwrap();
                let a = VMatrix::random(e.quantale().clone(), rows, 2, &mut rng);
                let l = kleisli_identity_laws(&e, &a, 2).unwrap();
                assert!(l.right_identity && l.left_identity, "{qn} {tn}");
            }
        }
    }

    #[test]
    fn discrete_and_free_algebras() {
        for t in ["id", "ultra", "powerset"] {
            let e = ext("2", t);
            TVCategory::discrete(e.clone(), 2).unwrap();
            TVCategory::free_algebra(e.clone(), 2).unwrap();
            TVCategory::hom_xi(e).unwrap();
        }
    }

    #[test]
    fn ultra_two_structures_are_preorders() {
        let e = ext("2", "ultra");
        let all = all_tvcategories(&e, 3).unwrap();
        assert_eq!(all.len(), 29);
        let q = e.quantale().clone();
        let t = q.top();
        let b = q.bottom();
        let bad = VMatrix::new(q, 3, 3, vec![t, t, b, b, t, t, b, b, t]).unwrap();
        let v = check_tvcategory(&e, &bad).unwrap();
        assert!(!v.passed());
        assert!(v.transitive_failure_count > 0);
    }

    #[test]
    fn dual_descriptions_agree() {
        for (qn, tn, n) in [("chain3", "id", 2), ("2", "ultra", 3), ("2", "powerset", 1)] {
            let e = ext(qn, tn);
            for x in all_tvcategories(&e, n).unwrap() {
                assert_eq!(x.dual_matrix().unwrap(), x.dual_matrix_via_m_circ().unwrap());
                x.dual().unwrap();
            }
        }
    }

    #[test]
    fn identity_dual_is_vcategory_dual() {
        let e = ext("plus3", "id");
        for x in all_tvcategories(&e, 2).unwrap() {
            assert_eq!(x.dual_matrix().unwrap(), x.structure().transpose());
        }
    }

    #[test]
    fn structure_is_its_own_bimodule() {
        for (qn, tn) in [("2", "ultra"), ("chain3", "id"), ("2", "powerset")] {
            let e = ext(qn, tn);
            let n = if tn == "powerset" { 1 } else { 2 };
            for x in all_tvcategories(&e, n).unwrap() {
                let v = check_tvbimodule(x.structure(), &x, &x).unwrap();
                assert!(v.direct && v.agree, "{qn} {tn} {v:?}");
            }
        }
    }

    #[test]
    fn functor_equivalences_on_ultra_two() {
        let e = ext("2", "ultra");
        let cats = all_tvcategories(&e, 2).unwrap();
        for x in &cats {
            for y in &cats {
                for f in crate::monad::all_functions(2, 2) {
                    let fe = functor_equivalence(&f, x, y).unwrap();
                    assert!(fe.consistent(), "{fe:?}");
                    assert_ne!(fe.adjunction, Some(false));
                }
            }
        }
    }

    #[test]
    fn hom_xi_reduces_to_hom_for_identity() {
        let e = Arc::new(
            LaxExtension::new(Arc::new(builtin("plus3").unwrap()), Arc::new(Identity), Budget::default())
                .unwrap(),
        );
        let hv = TVCategory::hom_xi(e.clone()).unwrap();
        assert_eq!(*hv.structure(), *VCategory::hom_v(e.quantale().clone()).structure());
    }

    #[test]
    fn lemma_on_algebra_compose() {
        let e = ext("chain3", "id");
        let q = e.quantale().clone();
        for x in crate::enriched::all_vcategories(&q, 2, &Budget::default()).unwrap() {
            for alpha in crate::monad::all_functions(2, 2) {
                let r = algebra_compose(&e, &x, &alpha).unwrap();
                if r.alpha_is_algebra {
                    assert_eq!(r.is_structure, r.alpha_functor);
                }
            }
        }
    }

    #[test]
    fn yoneda_on_two_chain_gives_down_sets() {
        let e = ext("2", "id");
        let q = e.quantale().clone();
        let (t, b) = (q.top(), q.bottom());
        // 0 ≤ 1
        let a = VMatrix::new(q, 2, 2, vec![t, t, b, t]).unwrap();
        let x = TVCategory::new(e, a).unwrap();
        let rep = yoneda(&x).unwrap();
        assert!(rep.passed(), "{rep:?}");
        // presheaves on a 2-chain over 2 are its three down-sets
        assert_eq!(rep.hat_size, 3);
        assert_eq!(rep.fully_faithful, Some(true));
    }

    #[test]
    fn yoneda0_gate() {
        let e = ext("2", "powerset");
        assert!(!yoneda0_precondition(&e, 1).unwrap());
        let e = ext("2", "ultra");
        assert!(yoneda0_precondition(&e, 3).unwrap());
        for x in all_tvcategories(&e, 2).unwrap() {
            assert!(yoneda0(&x).unwrap().passed());
        }
    }

    #[test]
    fn exponential_matches_oracle_on_discrete_space() {
        let e = ext("2", "ultra");
        let x = TVCategory::discrete(e.clone(), 2).unwrap();
        for y in all_tvcategories(&e, 2).unwrap() {
            let exp = exponential(&x, &y).unwrap();
            assert!(exp.passed());
            assert!(exponential_oracle(&x, &y, &exp).unwrap());
        }
    }

    #[test]
    fn exponential_of_free_algebra_is_pointwise_order() {
        let e = ext("2", "id");
        let x = TVCategory::free_algebra(e.clone(), 1).unwrap();
        let hv = TVCategory::hom_xi(e.clone()).unwrap();
        let exp = exponential(&x, &hv).unwrap();
        let q = e.quantale().clone();
        for (i, f) in exp.functions.iter().enumerate() {
            for (j, g) in exp.functions.iter().enumerate() {
                let expect = q.hom(QElem(f[0] as u8), QElem(g[0] as u8));
                assert_eq!(exp.structure.get(i, j), expect);
            }
        }
    }

    #[test]
    fn tensor_needs_strictness() {
        let e = ext("2", "ultra");
        let x = TVCategory::discrete(e.clone(), 2).unwrap();
        let xx = x.tensor(&x).unwrap();
        assert_eq!(xx.size(), 4);
        let e = ext("plus3", "powerset");
        let x = TVCategory::discrete(e.clone(), 1).unwrap();
        assert!(matches!(x.tensor(&x), Err(Error::GateFailed { .. })));
    }
}

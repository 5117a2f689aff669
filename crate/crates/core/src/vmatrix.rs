//! V-matrices `X ⇸ Y` and their calculus.
//!
//! Composition follows the diagrammatic convention used throughout the crate:
//! for `r: X ⇸ Y` and `s: Y ⇸ Z`, `compose(&s, &r)` is `s·r` with
//! `(s·r)(x,z) = ⋁_y r(x,y) ⊗ s(y,z)`.

use crate::error::{pow_sat, Budget, Error, Result};
use crate::quantale::{tensor_complement_scan, ComplementScan, QElem, Quantale};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A dense `rows × cols` matrix of quantale elements.
#[derive(Clone, Debug)]
pub struct VMatrix {
    q: Arc<Quantale>,
    rows: usize,
    cols: usize,
    data: Vec<QElem>,
}

impl PartialEq for VMatrix {
    fn eq(&self, other: &Self) -> bool {
        same_quantale(&self.q, &other.q)
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
    }
}

impl Eq for VMatrix {}

pub(crate) fn same_quantale(a: &Arc<Quantale>, b: &Arc<Quantale>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_same(a: &VMatrix, b: &VMatrix) -> Result<()> {
    if same_quantale(&a.q, &b.q) {
        Ok(())
    } else {
        Err(Error::QuantaleMismatch {
            left: a.q.name().to_string(),
            right: b.q.name().to_string(),
        })
    }
}

impl VMatrix {
    pub fn new(q: Arc<Quantale>, rows: usize, cols: usize, data: Vec<QElem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Invalid(format!(
                "matrix data has {} entries, expected {}",
                data.len(),
                rows * cols
            )));
        }
        if let Some(bad) = data.iter().find(|u| u.index() >= q.size()) {
            return Err(Error::Invalid(format!(
                "entry index {} outside the carrier of {}",
                bad.index(),
                q.name()
            )));
        }
        Ok(VMatrix { q, rows, cols, data })
    }

    pub fn filled(q: Arc<Quantale>, rows: usize, cols: usize, v: QElem) -> Self {
        VMatrix {
            q,
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn bottom(q: Arc<Quantale>, rows: usize, cols: usize) -> Self {
        let b = q.bottom();
        Self::filled(q, rows, cols, b)
    }

    pub fn from_fn(
        q: Arc<Quantale>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> QElem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        VMatrix { q, rows, cols, data }
    }

    /// `1_X`: `k` on the diagonal, `⊥` elsewhere.
    pub fn identity(q: Arc<Quantale>, n: usize) -> Self {
        let (k, b) = (q.unit(), q.bottom());
        Self::from_fn(q, n, n, |i, j| if i == j { k } else { b })
    }

    /// The matrix of a function `f: X → Y` with `|Y| = cols`.
    pub fn from_map(q: Arc<Quantale>, f: &[usize], cols: usize) -> Self {
        let (k, b) = (q.unit(), q.bottom());
        Self::from_fn(q, f.len(), cols, |i, j| if f[i] == j { k } else { b })
    }

    pub fn random<R: rand::Rng + ?Sized>(q: Arc<Quantale>, rows: usize, cols: usize, rng: &mut R) -> Self {
        let n = q.size();
        Self::from_fn(q, rows, cols, |_, _| QElem(rng.gen_range(0..n) as u8))
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.q
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[QElem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> QElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: QElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[QElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> VMatrix {
        Self::from_fn(self.q.clone(), self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Pointwise order.
    pub fn leq(&self, other: &VMatrix) -> Result<bool> {
        self.same_shape("leq", other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .all(|(&a, &b)| self.q.leq(a, b)))
    }

    /// Entries where `self ≰ other`.
    pub fn leq_failures(&self, other: &VMatrix) -> Result<Vec<(usize, usize)>> {
        self.same_shape("leq", other)?;
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.q.leq(self.get(i, j), other.get(i, j)) {
                    out.push((i, j));
                }
            }
        }
        Ok(out)
    }

    pub fn join(&self, other: &VMatrix) -> Result<VMatrix> {
        self.same_shape("join", other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.q.join(a, b))
            .collect();
        Ok(VMatrix {
            q: self.q.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// The function this matrix embeds, if it is one: each row has exactly one
    /// `k` entry and `⊥` elsewhere.
    pub fn as_map(&self) -> Option<Vec<usize>> {
        let (k, b) = (self.q.unit(), self.q.bottom());
        let mut f = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            let mut hit = None;
            for (j, &v) in row.iter().enumerate() {
                if v == k && hit.is_none() {
                    hit = Some(j);
                } else if v != b {
                    return None;
                }
            }
            f.push(hit?);
        }
        Some(f)
    }

    /// Entries rendered with the quantale's labels, row by row.
    pub fn to_labels(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|&v| self.q.label(v).to_string())
                    .collect()
            })
            .collect()
    }

    fn same_shape(&self, op: &'static str, other: &VMatrix) -> Result<()> {
        check_same(self, other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                op,
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }
}

/// `s·r` for `r: X ⇸ Y`, `s: Y ⇸ Z`.
pub fn compose(s: &VMatrix, r: &VMatrix) -> Result<VMatrix> {
    check_same(s, r)?;
    if r.cols != s.rows {
        return Err(Error::DimensionMismatch {
            op: "compose",
            left: (s.rows, s.cols),
            right: (r.rows, r.cols),
        });
    }
    let q = &r.q;
    let bot = q.bottom();
    let mut data = vec![bot; r.rows * s.cols];
    for x in 0..r.rows {
        let out = &mut data[x * s.cols..(x + 1) * s.cols];
        for y in 0..r.cols {
            let rv = r.get(x, y);
            if rv == bot {
                continue;
            }
            for (z, slot) in out.iter_mut().enumerate() {
                *slot = q.join(*slot, q.tensor(rv, s.get(y, z)));
            }
        }
    }
    Ok(VMatrix {
        q: q.clone(),
        rows: r.rows,
        cols: s.cols,
        data,
    })
}

/// Advance an odometer over `{0..base}^len`; false once it wraps around.
pub fn advance(digits: &mut [QElem], base: usize) -> bool {
    for d in digits.iter_mut() {
        if d.index() + 1 < base {
            d.0 += 1;
            return true;
        }
        d.0 = 0;
    }
    false
}

/// Outcome of testing `r ⊣ s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionVerdict {
    pub is_left_adjoint: bool,
    /// Points `x` where `k ≰ (s·r)(x,x)`.
    pub unit_failures: Vec<usize>,
    /// Triples `(x, y, y′)` with `s(y,x) ⊗ r(x,y′) ≰ 1_Y(y,y′)`.
    pub counit_failures: Vec<(usize, usize, usize)>,
    /// The matrix inequalities and the pointwise conditions give the same answer.
    pub pointwise_agrees: bool,
}

pub fn check_adjunction(r: &VMatrix, s: &VMatrix) -> Result<AdjunctionVerdict> {
    check_same(r, s)?;
    if r.rows != s.cols || r.cols != s.rows {
        return Err(Error::DimensionMismatch {
            op: "adjunction",
            left: (r.rows, r.cols),
            right: (s.rows, s.cols),
        });
    }
    let q = r.q.clone();
    let (nx, ny) = (r.rows, r.cols);
    let sr = compose(s, r)?;
    let rs = compose(r, s)?;
    let unit_ok = VMatrix::identity(q.clone(), nx).leq(&sr)?;
    let counit_ok = rs.leq(&VMatrix::identity(q.clone(), ny))?;

    let k = q.unit();
    let mut unit_failures = Vec::new();
    for x in 0..nx {
        let j = q.join_all((0..ny).map(|y| q.tensor(r.get(x, y), s.get(y, x))));
        if !q.leq(k, j) {
            unit_failures.push(x);
        }
    }
    let mut counit_failures = Vec::new();
    for x in 0..nx {
        for y in 0..ny {
            for y2 in 0..ny {
                let bound = if y == y2 { k } else { q.bottom() };
                if !q.leq(q.tensor(s.get(y, x), r.get(x, y2)), bound) {
                    counit_failures.push((x, y, y2));
                }
            }
        }
    }
    let pointwise = unit_failures.is_empty() && counit_failures.is_empty();
    Ok(AdjunctionVerdict {
        is_left_adjoint: unit_ok && counit_ok,
        unit_failures,
        counit_failures,
        pointwise_agrees: pointwise == (unit_ok && counit_ok),
    })
}

fn adjoint_raw(q: &Quantale, nx: usize, ny: usize, r: &[QElem], s: &[QElem]) -> bool {
    let k = q.unit();
    for x in 0..nx {
        let mut j = q.bottom();
        for y in 0..ny {
            j = q.join(j, q.tensor(r[x * ny + y], s[y * nx + x]));
        }
        if !q.leq(k, j) {
            return false;
        }
    }
    for y in 0..ny {
        for y2 in 0..ny {
            let bound = if y == y2 { k } else { q.bottom() };
            for x in 0..nx {
                if !q.leq(q.tensor(s[y * nx + x], r[x * ny + y2]), bound) {
                    return false;
                }
            }
        }
    }
    true
}

/// The largest `s` with `r·s ≤ 1_Y`; it is the right adjoint of `r` whenever one exists.
pub fn residual_right_adjoint(r: &VMatrix) -> VMatrix {
    let q = r.q.clone();
    let (k, b) = (q.unit(), q.bottom());
    VMatrix::from_fn(q.clone(), r.cols, r.rows, |y, x| {
        q.meet_all((0..r.cols).map(|y2| q.hom(r.get(x, y2), if y == y2 { k } else { b })))
    })
}

/// All adjunctions `r ⊣ s` with `r: X ⇸ Y`, found by scanning every pair of matrices.
pub fn enumerate_adjunctions(
    q: &Arc<Quantale>,
    nx: usize,
    ny: usize,
    budget: &Budget,
) -> Result<Vec<(VMatrix, VMatrix)>> {
    let n = q.size();
    budget.check(pow_sat(n, 2 * nx * ny), || {
        format!("matrix pairs {nx}x{ny} over {}", q.name())
    })?;
    let len = nx * ny;
    let mut out = Vec::new();
    let mut r = vec![QElem(0); len];
    loop {
        let mut s = vec![QElem(0); len];
        loop {
            if adjoint_raw(q, nx, ny, &r, &s) {
                out.push((
                    VMatrix::new(q.clone(), nx, ny, r.clone())?,
                    VMatrix::new(q.clone(), ny, nx, s.clone())?,
                ));
            }
            if !advance(&mut s, n) {
                break;
            }
        }
        if !advance(&mut r, n) {
            break;
        }
    }
    Ok(out)
}

/// A left adjoint that is not an embedded map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonMapAdjoint {
    pub left: Vec<Vec<String>>,
    pub right: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeftAdjointReport {
    pub quantale: String,
    pub bound: usize,
    pub scan: ComplementScan,
    pub hypotheses_hold: bool,
    pub adjunctions_found: usize,
    pub all_left_adjoints_are_maps: bool,
    pub non_map_left_adjoints: Vec<NonMapAdjoint>,
    /// The residual construction finds exactly the brute-force left adjoints.
    pub residual_route_agrees: bool,
    /// Uniqueness: no left adjoint has two right adjoints.
    pub right_adjoints_unique: bool,
    /// Hypotheses hold exactly when every left adjoint found is a map.
    pub agrees: bool,
}

/// Adjunctions `(left, right)` grouped by shape.
pub type AdjointGroups = Vec<Vec<(VMatrix, VMatrix)>>;

/// Compare the algebraic criterion for "every left adjoint is a map" with a
/// brute-force scan of all shapes up to `bound × bound`. Also returns the
/// adjunctions found, grouped by shape.
pub fn left_adjoint_map_criterion(
    q: &Arc<Quantale>,
    bound: usize,
    budget: &Budget,
) -> Result<(LeftAdjointReport, AdjointGroups)> {
    let scan = tensor_complement_scan(q);
    let hypotheses_hold = scan.hypotheses_hold();
    let mut groups = Vec::new();
    let mut non_maps = Vec::new();
    let mut found = 0;
    let mut residual_ok = true;
    let mut unique = true;
    for nx in 1..=bound {
        for ny in 1..=bound {
            let pairs = enumerate_adjunctions(q, nx, ny, budget)?;
            found += pairs.len();
            for (i, (r, s)) in pairs.iter().enumerate() {
                if r.as_map().is_none() && non_maps.len() < 16 {
                    non_maps.push(NonMapAdjoint {
                        left: r.to_labels(),
                        right: s.to_labels(),
                    });
                }
                if pairs[..i].iter().any(|(r2, s2)| r2 == r && s2 != s) {
                    unique = false;
                }
            }
            // residual route: scan every r once and test its candidate right adjoint
            let len = nx * ny;
            let mut digits = vec![QElem(0); len];
            let mut residual = Vec::new();
            loop {
                let r = VMatrix::new(q.clone(), nx, ny, digits.clone())?;
                let s = residual_right_adjoint(&r);
                if check_adjunction(&r, &s)?.is_left_adjoint {
                    residual.push((r, s));
                }
                if !advance(&mut digits, q.size()) {
                    break;
                }
            }
            if residual != pairs {
                residual_ok = false;
            }
            groups.push(pairs);
        }
    }
    let all_maps = groups.iter().flatten().all(|(r, _)| r.as_map().is_some());
    let any_non_map = groups.iter().flatten().any(|(r, _)| r.as_map().is_none());
    Ok((
        LeftAdjointReport {
            quantale: q.name().to_string(),
            bound,
            scan,
            hypotheses_hold,
            adjunctions_found: found,
            all_left_adjoints_are_maps: all_maps,
            non_map_left_adjoints: if any_non_map { non_maps } else { Vec::new() },
            residual_route_agrees: residual_ok,
            right_adjoints_unique: unique,
            agrees: hypotheses_hold == all_maps,
        },
        groups,
    ))
}

/// Order reversal between adjoints: `r ≤ r′ ⇔ s′ ≤ s` for every two adjunctions
/// of the same shape. Returns the offending index pairs.
pub fn order_reversal_failures(pairs: &[(VMatrix, VMatrix)]) -> Result<Vec<(usize, usize)>> {
    let mut bad = Vec::new();
    for (i, (r, s)) in pairs.iter().enumerate() {
        for (j, (r2, s2)) in pairs.iter().enumerate() {
            if r.leq(r2)? != s2.leq(s)? {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

//! The acceptance battery: fifteen criteria, each an exhaustive or seeded
//! sweep with a structured, deterministic report.

use crate::completeness::{certify_v_complete, decide_lawvere_complete, ord_section_extract, Enumeration};
use crate::enriched::{all_vcategories, check_vbimodule, yoneda_eval, VCategory};
use crate::error::{Budget, Error, Result};
use crate::instances::{all_preorders, all_topologies, approach_surrogate, weakly_sober, FiniteSpace};
use crate::laxext::{check_extension_laws, check_xi, check_xi_compat, LaxExtension};
use crate::monad::{all_functions, monad_by_name};
use crate::quantale::{builtin, validate_quantale, QElem, Quantale, BUILTIN_NAMES};
use crate::quniform::{analyse, enumerate_bases};
use crate::tvcat::{all_tvcategories, check_tvcategory, yoneda, TVCategory};
use crate::vmatrix::{compose, left_adjoint_map_criterion, order_reversal_failures, VMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// The quantales every criterion sweeps unless it says otherwise.
pub const ACCEPTANCE_QUANTALES: &[&str] = &["2", "chain3", "chain4", "plus3", "plus4", "pset1", "pset2"];

/// Every built-in whose exhaustive sweeps fit the default budget; `pset3`
/// needs 8^8 candidates per search.
pub const SWEEP_QUANTALES: &[&str] = &[
    "2", "chain3", "chain4", "chain5", "plus1", "plus2", "plus3", "plus4", "pset1", "pset2",
];

/// Both readings of the three-element chain: `∧` and truncated `+`.
pub const THREE_CHAINS: &[&str] = &["chain3", "plus2"];

pub const MONADS: &[&str] = &["id", "powerset", "ultra"];

const MAX_FAILURES: usize = 20;

/// `(id, key, title, runtime limit in seconds)`.
pub const CRITERIA: &[(u8, &str, &str, Option<u64>)] = &[
    (1, "quantale", "quantale laws and residuation", Some(1)),
    (2, "adjoint-maps", "left adjoints are maps exactly under the algebraic hypotheses", Some(60)),
    (3, "adjoint-order", "adjoints reverse order", None),
    (4, "bimodule", "bimodules are functors out of X^op ⊗ Y", None),
    (5, "yoneda-v", "d(a(-,x), f) = f(x)", Some(60)),
    (6, "v-complete", "(V, hom) and (V, hom_ξ) are Lawvere-complete", Some(300)),
    (7, "preorders", "preorders are Lawvere-complete; sections of surjections", Some(300)),
    (8, "extension", "lax extension laws", Some(120)),
    (9, "xi", "ξ is an Eilenberg-Moore algebra with the tensor inequalities", Some(120)),
    (10, "hom-xi", "hom_ξ is a (T,V)-category", Some(60)),
    (11, "yoneda", "Yoneda inequalities and full faithfulness", Some(300)),
    (12, "sober", "weak sobriety agrees with Lawvere completeness", Some(120)),
    (13, "approach", "variable sets agree with adjoint pairs", Some(120)),
    (14, "quniform", "Lawvere completeness agrees with Cauchy completeness", Some(300)),
    (15, "determinism", "two runs give identical reports", None),
];

pub fn runtime_limit(id: u8) -> Option<Duration> {
    CRITERIA.iter().find(|c| c.0 == id).and_then(|c| c.3).map(Duration::from_secs)
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub budget: Budget,
    pub seed: u64,
    /// Keys or numeric ids; empty runs everything.
    pub only: Vec<String>,
    /// Use the unpruned enumeration wherever completeness is decided.
    pub oracle: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            budget: Budget::default(),
            seed: 20240611,
            only: Vec::new(),
            oracle: false,
        }
    }
}

impl SuiteConfig {
    fn selected(&self, id: u8, key: &str) -> bool {
        self.only.is_empty() || self.only.iter().any(|o| o == key || o.parse::<u8>().ok() == Some(id))
    }

    fn mode(&self) -> Enumeration {
        if self.oracle {
            Enumeration::Reference
        } else {
            Enumeration::Pruned
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: u8,
    pub key: String,
    pub title: String,
    pub status: Status,
    /// Instances examined.
    pub checked: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub items: Vec<CriterionReport>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// A report together with wall-clock timings, which stay out of the report.
#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub report: SuiteReport,
    pub timings: Vec<(u8, Duration)>,
}

/// Accumulates one criterion's outcome.
struct Tally {
    checked: u64,
    failures: Vec<String>,
    failure_count: u64,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            checked: 0,
            failures: Vec::new(),
            failure_count: 0,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_FAILURES {
                self.failures.push(what());
            }
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn quantale(name: &str) -> Result<Arc<Quantale>> {
    builtin(name)
        .map(Arc::new)
        .ok_or_else(|| Error::Invalid(format!("unknown quantale {name}")))
}

fn extension(q: &str, t: &str, budget: &Budget) -> Result<Arc<LaxExtension>> {
    let m = monad_by_name(t).ok_or_else(|| Error::Invalid(format!("unknown monad {t}")))?;
    Ok(Arc::new(LaxExtension::new(quantale(q)?, m, *budget)?))
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteRun {
    let mut items = Vec::new();
    let mut timings = Vec::new();
    for &(id, key, title, _) in CRITERIA {
        if !cfg.selected(id, key) {
            continue;
        }
        let start = Instant::now();
        let outcome = match id {
            15 => determinism(cfg),
            _ => run_criterion(id, cfg),
        };
        timings.push((id, start.elapsed()));
        let (status, checked, failures, notes) = match outcome {
            Ok(t) => {
                let status = if t.failure_count == 0 { Status::Pass } else { Status::Fail };
                let mut notes = t.notes;
                if t.failure_count as usize > t.failures.len() {
                    notes.push(format!("{} failures in total", t.failure_count));
                }
                (status, t.checked, t.failures, notes)
            }
            Err(e @ Error::BudgetExceeded { .. }) => (Status::Skipped, 0, Vec::new(), vec![e.to_string()]),
            Err(e) => (Status::Fail, 0, vec![e.to_string()], Vec::new()),
        };
        items.push(CriterionReport {
            id,
            key: key.into(),
            title: title.into(),
            status,
            checked,
            failures,
            notes,
        });
    }
    let count = |s: Status| items.iter().filter(|i| i.status == s).count();
    SuiteRun {
        report: SuiteReport {
            seed: cfg.seed,
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skipped),
            items,
        },
        timings,
    }
}

fn run_criterion(id: u8, cfg: &SuiteConfig) -> Result<Tally> {
    match id {
        1 => quantale_laws(),
        2 | 3 => adjoints(id, cfg),
        4 => bimodules(cfg),
        5 => yoneda_v(cfg),
        6 => v_complete(cfg),
        7 => preorders(cfg),
        8 => extension_laws(cfg),
        9 => xi_laws(cfg),
        10 => hom_xi(cfg),
        11 => yoneda_tv(cfg),
        12 => sober(cfg),
        13 => approach(cfg),
        14 => quniform(cfg),
        _ => Err(Error::Invalid(format!("no criterion {id}"))),
    }
}

fn quantale_laws() -> Result<Tally> {
    let mut t = Tally::new();
    for name in BUILTIN_NAMES {
        let q = quantale(name)?;
        let revalidated = validate_quantale(&q.to_raw());
        t.check(revalidated.as_ref().map(|r| *r == *q).unwrap_or(false), || {
            format!("{name}: {:?}", revalidated.err())
        });
        for u in q.elements() {
            for v in q.elements() {
                for w in q.elements() {
                    t.check(q.leq(q.tensor(u, v), w) == q.leq(v, q.hom(u, w)), || {
                        format!("{name}: residuation at ({}, {}, {})", q.label(u), q.label(v), q.label(w))
                    });
                }
            }
        }
    }
    Ok(t)
}

fn adjoints(id: u8, cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let mut example_found = false;
    for name in SWEEP_QUANTALES {
        let q = quantale(name)?;
        let bound = if *name == "2" { 3 } else { 2 };
        let (rep, groups) = left_adjoint_map_criterion(&q, bound, &cfg.budget)?;
        if id == 2 {
            t.check(rep.agrees, || format!("{name}: criterion {} vs maps {}", rep.hypotheses_hold, rep.all_left_adjoints_are_maps));
            t.check(rep.residual_route_agrees, || format!("{name}: residual route disagrees"));
            t.check(rep.right_adjoints_unique, || format!("{name}: right adjoints not unique"));
            if *name == "pset2" && !rep.non_map_left_adjoints.is_empty() {
                example_found = true;
                let ex = &rep.non_map_left_adjoints[0];
                t.note(format!("pset2 non-map left adjoint {:?} with right adjoint {:?}", ex.left, ex.right));
            }
        } else {
            for g in &groups {
                let bad = order_reversal_failures(g)?;
                t.check(bad.is_empty(), || format!("{name}: order reversal fails at {:?}", bad[0]));
            }
        }
    }
    if id == 2 {
        t.check(example_found, || "no non-map left adjoint over pset2".into());
    }
    Ok(t)
}

fn random_vcategory<R: Rng>(q: &Arc<Quantale>, n: usize, rng: &mut R) -> Result<VCategory> {
    VCategory::generated_by(&VMatrix::random(q.clone(), n, n, rng))
}

fn bimodules(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 4);
    let mut bimodule_count = 0;
    for i in 0..500 {
        let name = BUILTIN_NAMES[i % BUILTIN_NAMES.len()];
        let q = quantale(name)?;
        let (nx, ny) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let x = random_vcategory(&q, nx, &mut rng)?;
        let y = random_vcategory(&q, ny, &mut rng)?;
        let mut psi = VMatrix::random(q.clone(), nx, ny, &mut rng);
        if i % 2 == 1 {
            // b·ψ·a is always a bimodule
            psi = compose(y.structure(), &compose(&psi, x.structure())?)?;
        }
        let v = check_vbimodule(&psi, &x, &y)?;
        bimodule_count += v.direct as usize;
        t.check(v.agree, || format!("#{i} over {name}: direct {} functorial {}", v.direct, v.functorial));
    }
    t.note(format!("{bimodule_count} of 500 generated matrices are bimodules"));
    Ok(t)
}

fn yoneda_v(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    for name in ["2"].iter().chain(THREE_CHAINS) {
        let q = quantale(name)?;
        for n in 1..=2 {
            for x in all_vcategories(&q, n, &cfg.budget)? {
                let r = yoneda_eval(&x, &cfg.budget)?;
                t.check(r.passed(), || format!("{name}: {:?} fails at {:?}", x.structure().to_labels(), r.failures.first()));
            }
        }
    }
    Ok(t)
}

fn v_complete(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let mut cases: Vec<(&str, &str)> = SWEEP_QUANTALES.iter().map(|q| (*q, "id")).collect();
    cases.extend([("2", "ultra"), ("chain3", "ultra"), ("plus2", "ultra")]);
    for (qn, tn) in cases {
        let ext = extension(qn, tn, &cfg.budget)?;
        let c = certify_v_complete(&ext, cfg.mode())?;
        t.check(c.precondition, || format!("({tn}, {qn}): precondition fails at {:?}", c.offending));
        t.check(c.verdict.complete, || format!("({tn}, {qn}): pair {:?} unrepresented", c.verdict.non_representable.first()));
        t.check(c.identity_failures.is_empty(), || format!("({tn}, {qn}): proof-step identity fails at {:?}", c.identity_failures[0]));
        t.check(c.k_dot_represents, || format!("({tn}, {qn}): ψ(k̇) is not a representative"));
        let hv = TVCategory::hom_xi(ext.clone())?;
        let other = if cfg.oracle { Enumeration::Pruned } else { Enumeration::Reference };
        let (_, a) = decide_lawvere_complete(&hv, cfg.mode())?;
        let (_, b) = decide_lawvere_complete(&hv, other)?;
        t.check(a == b, || format!("({tn}, {qn}): pruned and reference enumerations differ"));
        t.note(format!("({tn}, {qn}): {} adjoint pairs", c.verdict.pairs));
    }
    Ok(t)
}

fn preorders(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let ext = extension("2", "id", &cfg.budget)?;
    for n in 0..=4 {
        let ps = all_preorders(n);
        let tops = all_topologies(n).len();
        t.check(ps.len() == tops, || format!("{n} points: {} preorders vs {tops} topologies", ps.len()));
        if n == 0 {
            continue;
        }
        for p in &ps {
            let x = p.to_tvcategory(&ext)?;
            let (v, pairs) = decide_lawvere_complete(&x, cfg.mode())?;
            t.check(v.complete, || format!("{:?} is incomplete", p.relation()));
            let other = if cfg.oracle { Enumeration::Pruned } else { Enumeration::Reference };
            let (_, b) = decide_lawvere_complete(&x, other)?;
            t.check(pairs == b, || format!("{:?}: enumerations differ", p.relation()));
        }
        if n == 4 {
            t.note(format!("{} preorders on 4 points", ps.len()));
        }
    }
    for ny in [2, 3] {
        let mut count = 0;
        for f in all_functions(4, ny) {
            if (0..ny).all(|y| f.contains(&y)) {
                count += 1;
                let g = ord_section_extract(&ext, &f, ny);
                t.check(g.as_ref().map(|g| (0..ny).all(|y| f[g[y]] == y)).unwrap_or(false), || {
                    format!("no section for {f:?}: {:?}", g.err())
                });
            }
        }
        t.note(format!("{count} surjections 4 -> {ny}"));
    }
    Ok(t)
}

fn extension_laws(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    for tn in MONADS {
        for qn in ["2"].iter().chain(THREE_CHAINS) {
            let ext = extension(qn, tn, &cfg.budget)?;
            let r = check_extension_laws(&ext, 200, cfg.seed ^ 8)?;
            let q = ext.quantale();
            t.check(r.failures() == 0, || format!("({tn}, {qn}): {r:?}"));
            t.check(q.tensor_is_meet() == r.f_strict.is_some(), || format!("({tn}, {qn}): law (f) applicability"));
        }
    }
    Ok(t)
}

fn small_combinations() -> Vec<(&'static str, &'static str)> {
    let mut out = Vec::new();
    for tn in MONADS {
        for qn in BUILTIN_NAMES {
            if builtin(qn).map(|q| q.size() <= 4).unwrap_or(false) {
                out.push((*tn, *qn));
            }
        }
    }
    out
}

/// `ξ` recomputed through the extension of `i: 1 ⇸ V`, `ξ(𝔶) = Ti(T!(𝔶), 𝔶)`.
fn xi_via_extension(ext: &LaxExtension) -> Result<Vec<QElem>> {
    let q = ext.quantale();
    let n = q.size();
    let i = VMatrix::from_fn(q.clone(), 1, n, |_, v| QElem(v as u8));
    let ti = ext.extend(&i)?;
    let bang = ext.map(&vec![0; n], 1)?;
    Ok((0..ti.cols()).map(|y| ti.get(bang[y], y)).collect())
}

fn xi_laws(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    for (tn, qn) in small_combinations() {
        let ext = extension(qn, tn, &cfg.budget)?;
        let r = check_xi(&ext)?;
        t.check(r.em_unit && r.em_mult == Some(true), || format!("({tn}, {qn}): Eilenberg-Moore laws"));
        t.check(r.xi_functor, || format!("({tn}, {qn}): ξ is not a V-functor"));
        t.check(r.ti_link && r.ti_bound, || format!("({tn}, {qn}): Ti link"));
        let c = check_xi_compat(&ext, 0, cfg.seed)?;
        t.check(c.tensor_lax && c.unit_lax, || format!("({tn}, {qn}): tensor {} unit {}", c.tensor_lax, c.unit_lax));
        // strictness decided again, one element of T(V×V) at a time
        let q = ext.quantale();
        let n = q.size();
        let xi = xi_via_extension(&ext)?;
        let p1: Vec<usize> = (0..n * n).map(|i| i / n).collect();
        let p2: Vec<usize> = (0..n * n).map(|i| i % n).collect();
        let tens: Vec<usize> = (0..n * n).map(|i| q.tensor(QElem((i / n) as u8), QElem((i % n) as u8)).index()).collect();
        let (tp1, tp2, tt) = (ext.map(&p1, n)?, ext.map(&p2, n)?, ext.map(&tens, n)?);
        let per_pair = (0..tp1.len()).all(|w| q.tensor(xi[tp1[w]], xi[tp2[w]]) == xi[tt[w]]);
        t.check(per_pair == c.tensor_strict, || format!("({tn}, {qn}): tensor-strict flag {} vs per-pair {per_pair}", c.tensor_strict));
        if !c.tensor_strict {
            t.note(format!("({tn}, {qn}) is not tensor-strict"));
        }
    }
    Ok(t)
}

fn hom_xi(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    for (tn, qn) in small_combinations() {
        let ext = extension(qn, tn, &cfg.budget)?;
        let a = crate::tvcat::hom_xi_matrix(&ext)?;
        let v = check_tvcategory(&ext, &a)?;
        t.check(v.passed(), || format!("({tn}, {qn}): {v:?}"));
    }
    Ok(t)
}

fn yoneda_tv(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let cases = [("id", "2"), ("id", "chain3"), ("id", "plus2"), ("ultra", "2")];
    for (tn, qn) in cases {
        let ext = extension(qn, tn, &cfg.budget)?;
        for n in 1..=2 {
            for x in all_tvcategories(&ext, n)? {
                let r = yoneda(&x)?;
                t.check(r.passed(), || format!("({tn}, {qn}) {:?}: {r:?}", x.structure().to_labels()));
                t.check(r.fully_faithful == Some(true), || format!("({tn}, {qn}): y is not fully faithful"));
                if r.empty_fibres > 0 {
                    t.note(format!("({tn}, {qn}): empty fibres met"));
                }
            }
        }
    }
    Ok(t)
}

fn sober(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let ext = extension("2", "ultra", &cfg.budget)?;
    for n in 1..=4 {
        for opens in all_topologies(n) {
            let s = FiniteSpace::from_opens(n, &opens)?;
            let r = weakly_sober(&s, &ext)?;
            t.check(r.agree, || format!("opens {opens:?}: sober {} lawvere {}", r.weakly_sober, r.lawvere_complete));
        }
    }
    Ok(t)
}

fn approach(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let ext = extension("plus3", "ultra", &cfg.budget)?;
    for n in 1..=2 {
        for x in all_tvcategories(&ext, n)? {
            let r = approach_surrogate(&x)?;
            t.check(r.passed(), || format!("{:?}", x.structure().to_labels()));
        }
    }
    Ok(t)
}

fn quniform(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let two = enumerate_bases(2, 2);
    let three = enumerate_bases(3, 1);
    t.note(format!("{} quasi-uniformities on 2 points, {} on 3", two.len(), three.len()));
    for u in two.iter().chain(&three) {
        let r = analyse(u, &cfg.budget)?;
        t.check(r.passed(), || format!("{}: {r:?}", u.name));
    }
    Ok(t)
}

fn determinism(cfg: &SuiteConfig) -> Result<Tally> {
    let mut t = Tally::new();
    let rerun = |c: &SuiteConfig| {
        let mut c = c.clone();
        c.only = CRITERIA
            .iter()
            .filter(|k| k.0 != 15 && cfg.selected(k.0, k.1))
            .map(|k| k.1.to_string())
            .collect();
        if c.only.is_empty() {
            c.only = vec!["quantale".into()];
        }
        run_suite(&c).report
    };
    let (a, b) = (rerun(cfg), rerun(cfg));
    t.check(a == b, || "two runs differ".into());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_by_key_or_id() {
        let cfg = SuiteConfig {
            only: vec!["quantale".into(), "4".into()],
            ..Default::default()
        };
        let run = run_suite(&cfg);
        let ids: Vec<u8> = run.report.items.iter().map(|i| i.id).collect();
        assert_eq!(ids, vec![1, 4]);
        assert_eq!(run.report.failed, 0);
    }

    #[test]
    fn tight_budget_skips() {
        let cfg = SuiteConfig {
            budget: Budget::new(10),
            only: vec!["yoneda-v".into()],
            ..Default::default()
        };
        assert_eq!(run_suite(&cfg).report.items[0].status, Status::Skipped);
    }
}

use crate::format::{extension, resolve_quantale, Document, QuniformDoc, SpaceDoc, TVCatDoc, VCatDoc};
use lawcat_core::completeness::{certify_v_complete, decide_lawvere_complete, AdjointPair, Enumeration, Gate};
use lawcat_core::enriched::{check_vcategory, yoneda_eval, VCategory};
use lawcat_core::instances::weakly_sober;
use lawcat_core::laxext::{check_extension_laws, LaxExtension};
use lawcat_core::quantale::validate_quantale;
use lawcat_core::quniform::{analyse, rel_pairs, QuasiUniformity};
use lawcat_core::suite::{run_suite, SuiteConfig};
use lawcat_core::tvcat::{check_tvcategory, yoneda, TVCategory};
use lawcat_core::vmatrix::VMatrix;
use lawcat_core::{Budget, Error};
use serde::Serialize;
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    /// The decision procedure does not apply to the input.
    GateFailed,
    /// The enumeration budget ran out before a verdict.
    Skipped,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub status: Status,
    pub report: Value,
}

impl Outcome {
    fn new(pass: bool, report: Value) -> Self {
        Outcome {
            status: if pass { Status::Pass } else { Status::Fail },
            report,
        }
    }

    fn from_error(e: Error) -> Self {
        let status = match e {
            Error::GateFailed { .. } => Status::GateFailed,
            Error::BudgetExceeded { .. } => Status::Skipped,
            _ => Status::Fail,
        };
        Outcome {
            status,
            report: json!({ "error": e.to_string() }),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub budget: Budget,
    pub oracle: bool,
    pub strict: bool,
    pub monad: Option<String>,
}

impl Options {
    fn mode(&self) -> Enumeration {
        if self.oracle {
            Enumeration::Reference
        } else {
            Enumeration::Pruned
        }
    }
}

/// Turns a core error into an outcome instead of a propagated failure.
fn guarded(f: impl FnOnce() -> lawcat_core::Result<Outcome>) -> Outcome {
    f().unwrap_or_else(Outcome::from_error)
}

fn value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn labelled(m: &VMatrix, rows: &[String], cols: &[String]) -> Value {
    let q = m.quantale();
    let rows: Vec<Value> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let vals: Vec<&str> = (0..m.cols()).map(|j| q.label(m.get(i, j))).collect();
            json!({ "row": r, "values": vals })
        })
        .collect();
    json!({ "columns": cols, "rows": rows })
}

fn t_labels(ext: &LaxExtension, labels: &[String]) -> lawcat_core::Result<Vec<String>> {
    let n = labels.len();
    let unit = ext.unit(n);
    Ok((0..ext.t_size(n)?)
        .map(|i| {
            let l = ext.monad().label(n, i);
            match unit.iter().position(|&u| u == i) {
                Some(x) if !l.starts_with('{') => labels[x].clone(),
                _ => point_names(&l, labels),
            }
        })
        .collect())
}

/// `{0,1}` becomes `{a,b}`.
fn point_names(t_label: &str, labels: &[String]) -> String {
    match t_label.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        Some(inner) => {
            let names: Vec<&str> = inner
                .split(',')
                .filter(|p| !p.is_empty())
                .map(|p| p.parse::<usize>().ok().and_then(|i| labels.get(i)).map_or(p, |l| l.as_str()))
                .collect();
            format!("{{{}}}", names.join(","))
        }
        None => t_label.to_string(),
    }
}

fn id_extension(v: &VCatDoc, budget: &Budget) -> lawcat_core::Result<Arc<LaxExtension>> {
    extension(v.structure.quantale().clone(), "id", budget, 0).map_err(|e| Error::Invalid(e.message))
}

fn vcategory(v: &VCatDoc) -> lawcat_core::Result<VCategory> {
    VCategory::new(v.structure.clone())
}

fn tvcategory(t: &TVCatDoc) -> lawcat_core::Result<TVCategory> {
    TVCategory::new(t.ext.clone(), t.structure.clone())
}

pub fn check(doc: &Document, opts: &Options) -> Outcome {
    guarded(|| {
        Ok(match doc {
            Document::Quantale(raw) => match validate_quantale(raw) {
                Ok(q) => Outcome::new(
                    true,
                    json!({ "kind": "quantale", "name": raw.name, "elements": q.size(),
                            "bottom": q.label(q.bottom()), "top": q.label(q.top()), "unit": q.label(q.unit()),
                            "chain": q.is_chain(), "integral": q.unit_is_top(), "tensor_is_meet": q.tensor_is_meet() }),
                ),
                Err(v) => Outcome::new(false, json!({ "kind": "quantale", "name": raw.name, "violation": v.to_string() })),
            },
            Document::VCat(v) => {
                let verdict = check_vcategory(&v.structure)?;
                Outcome::new(verdict.passed(), json!({ "kind": "vcat", "name": v.name, "verdict": value(&verdict) }))
            }
            Document::TVCat(t) => {
                let verdict = check_tvcategory(&t.ext, &t.structure)?;
                Outcome::new(
                    verdict.passed(),
                    json!({ "kind": "tvcat", "name": t.name, "monad": t.ext.monad().name(), "verdict": value(&verdict) }),
                )
            }
            Document::Space(s) => space_summary(s),
            Document::Quniform(u) => {
                let verdict = u.uniformity.validate(&opts.budget)?;
                Outcome::new(verdict.passed(), json!({ "kind": "quniform", "name": u.uniformity.name, "verdict": value(&verdict) }))
            }
        })
    })
}

fn set_labels(bits: u32, labels: &[String]) -> Vec<String> {
    (0..labels.len()).filter(|i| bits >> i & 1 == 1).map(|i| labels[i].clone()).collect()
}

fn space_summary(s: &SpaceDoc) -> Outcome {
    let opens: Vec<Vec<String>> = s.space.opens().iter().map(|&o| set_labels(o, &s.labels)).collect();
    Outcome::new(true, json!({ "kind": "space", "name": s.name, "points": s.labels, "opens": opens }))
}

fn pair_report(pairs: &[AdjointPair], labels: &[String], t_rows: &[String]) -> Value {
    let q = pairs.first().map(|p| p.psi.quantale().clone());
    let Some(q) = q else { return json!([]) };
    let list: Vec<Value> = pairs
        .iter()
        .take(64)
        .map(|p| {
            let psi: Vec<&str> = (0..p.psi.rows()).map(|i| q.label(p.psi.get(i, 0))).collect();
            let phi: Vec<&str> = (0..p.phi.cols()).map(|j| q.label(p.phi.get(0, j))).collect();
            let reps: Vec<&String> = p.representatives.iter().map(|&x| &labels[x]).collect();
            json!({ "psi": psi, "phi": phi, "representatives": reps })
        })
        .collect();
    json!({ "psi_rows": t_rows, "phi_columns": labels, "pairs": list, "shown": list.len(), "total": pairs.len() })
}

fn completeness(x: &TVCategory, labels: &[String], opts: &Options) -> lawcat_core::Result<Outcome> {
    let (verdict, pairs) = decide_lawvere_complete(x, opts.mode())?;
    let witnesses: Vec<AdjointPair> = verdict.non_representable.iter().map(|&i| pairs[i].clone()).collect();
    let shown = if verdict.complete { &pairs } else { &witnesses };
    let sufficient_only = verdict.gate == Gate::Ungated;
    let mut out = Outcome::new(
        verdict.complete && !(opts.strict && sufficient_only),
        json!({ "verdict": if verdict.complete { "complete" } else { "incomplete" },
                "gate": value(&verdict.gate), "decides": verdict.gate.label(), "enumeration": if opts.oracle { "reference" } else { "pruned" },
                "details": value(&verdict),
                "witnesses": pair_report(shown, labels, &t_labels(x.ext(), labels)?) }),
    );
    if sufficient_only && opts.strict {
        out.status = Status::GateFailed;
    }
    Ok(out)
}

pub fn complete(doc: &Document, opts: &Options) -> Outcome {
    guarded(|| match doc {
        Document::VCat(v) => {
            let x = TVCategory::from_vcategory(id_extension(v, &opts.budget)?, &vcategory(v)?)?;
            completeness(&x, &v.labels, opts)
        }
        Document::TVCat(t) => completeness(&tvcategory(t)?, &t.labels, opts),
        Document::Space(s) => sober_report(s, opts),
        Document::Quniform(u) => quniform_complete(u, opts),
        Document::Quantale(_) => Err(Error::Invalid("completeness needs a category, space or quasi-uniformity".into())),
    })
}

/// `(V, hom)` or `(V, hom_ξ)` for a built-in or file quantale.
pub fn complete_v_hom(quantale: &str, monad: &str, opts: &Options) -> Outcome {
    guarded(|| {
        let q = resolve_quantale(quantale, None, 0).map_err(|e| Error::Invalid(e.message))?;
        let ext = extension(q, monad, &opts.budget, 0).map_err(|e| Error::Invalid(e.message))?;
        let c = certify_v_complete(&ext, opts.mode())?;
        Ok(Outcome::new(
            c.certified,
            json!({ "verdict": if c.verdict.complete { "complete" } else { "incomplete" },
                    "gate": value(&c.verdict.gate), "certificate": value(&c) }),
        ))
    })
}

fn ultra_two(opts: &Options) -> lawcat_core::Result<Arc<LaxExtension>> {
    let q = resolve_quantale("2", None, 0).map_err(|e| Error::Invalid(e.message))?;
    extension(q, "ultra", &opts.budget, 0).map_err(|e| Error::Invalid(e.message))
}

fn sober_report(s: &SpaceDoc, opts: &Options) -> lawcat_core::Result<Outcome> {
    let r = weakly_sober(&s.space, &ultra_two(opts)?)?;
    let irreducible: Vec<Value> = r
        .irreducible
        .iter()
        .map(|c| json!({ "set": set_labels(c.set, &s.labels),
                         "generic_points": c.generic_points.iter().map(|&x| &s.labels[x]).collect::<Vec<_>>() }))
        .collect();
    Ok(Outcome::new(
        r.agree && r.weakly_sober,
        json!({ "kind": "space", "name": s.name, "weakly_sober": r.weakly_sober, "lawvere_complete": r.lawvere_complete,
                "agree": r.agree, "irreducible_closed": irreducible }),
    ))
}

pub fn sober(doc: &Document, opts: &Options) -> Outcome {
    guarded(|| match doc {
        Document::Space(s) => sober_report(s, opts),
        other => Err(Error::Invalid(format!("`sober` needs a space, got a {}", other.kind()))),
    })
}

pub fn yoneda_cmd(doc: &Document, opts: &Options) -> Outcome {
    guarded(|| match doc {
        Document::VCat(v) => {
            let r = yoneda_eval(&vcategory(v)?, &opts.budget)?;
            Ok(Outcome::new(r.passed(), json!({ "kind": "vcat", "name": v.name, "yoneda": value(&r) })))
        }
        Document::TVCat(t) => {
            let r = yoneda(&tvcategory(t)?)?;
            Ok(Outcome::new(r.passed(), json!({ "kind": "tvcat", "name": t.name, "yoneda": value(&r) })))
        }
        other => Err(Error::Invalid(format!("`yoneda` needs a category, got a {}", other.kind()))),
    })
}

pub fn dual(doc: &Document, _opts: &Options) -> Outcome {
    guarded(|| match doc {
        Document::VCat(v) => {
            let d = vcategory(v)?.dual();
            Ok(Outcome::new(true, json!({ "kind": "vcat", "name": format!("{}^op", v.name),
                                           "structure": labelled(d.structure(), &v.labels, &v.labels) })))
        }
        Document::TVCat(t) => {
            let x = tvcategory(t)?;
            let d = x.dual()?;
            let points = t_labels(&t.ext, &t.labels)?;
            let rows = t_labels(&t.ext, &points)?;
            let verdict = check_tvcategory(&t.ext, d.structure())?;
            Ok(Outcome::new(
                verdict.passed(),
                json!({ "kind": "tvcat", "name": format!("{}^op", t.name), "carrier": points,
                        "structure": labelled(d.structure(), &rows, &points), "verdict": value(&verdict) }),
            ))
        }
        other => Err(Error::Invalid(format!("`dual` needs a category, got a {}", other.kind()))),
    })
}

/// `T_V a` of a V-category's structure, with the extension laws sampled for the pair `(T, V)`.
pub fn extend(doc: &Document, opts: &Options, samples: usize, seed: u64) -> Outcome {
    guarded(|| match doc {
        Document::VCat(v) => {
            let monad = opts.monad.as_deref().unwrap_or("ultra");
            let ext = extension(v.structure.quantale().clone(), monad, &opts.budget, 0).map_err(|e| Error::Invalid(e.message))?;
            let ta = ext.extend(&v.structure)?;
            let rows = t_labels(&ext, &v.labels)?;
            let laws = check_extension_laws(&ext, samples, seed)?;
            Ok(Outcome::new(
                laws.failures() == 0,
                json!({ "monad": monad, "quantale": ext.quantale().name(),
                        "extension": labelled(&ta, &rows, &rows), "laws": value(&laws) }),
            ))
        }
        other => Err(Error::Invalid(format!("`extend` needs a vcat, got a {}", other.kind()))),
    })
}

fn uniformity_summary(u: &QuasiUniformity, labels: &[String]) -> Value {
    let base: Vec<Vec<String>> = u
        .base
        .iter()
        .map(|&r| rel_pairs(r, u.n).iter().map(|&(a, b)| format!("({},{})", labels[a], labels[b])).collect())
        .collect();
    json!({ "name": u.name, "points": labels, "base": base })
}

pub fn quniform_check(doc: &Document, opts: &Options) -> Outcome {
    guarded(|| match doc {
        Document::Quniform(u) => {
            let verdict = u.uniformity.validate(&opts.budget)?;
            Ok(Outcome::new(
                verdict.passed(),
                json!({ "uniformity": uniformity_summary(&u.uniformity, &u.labels), "verdict": value(&verdict) }),
            ))
        }
        other => Err(Error::Invalid(format!("expected a quniform file, got a {}", other.kind()))),
    })
}

fn quniform_complete(u: &QuniformDoc, opts: &Options) -> lawcat_core::Result<Outcome> {
    let r = analyse(&u.uniformity, &opts.budget)?;
    Ok(Outcome::new(
        r.passed(),
        json!({ "uniformity": uniformity_summary(&u.uniformity, &u.labels),
                "lawvere_complete": r.lawvere_complete, "cauchy_complete": r.cauchy_complete, "agree": r.agree,
                "analysis": value(&r) }),
    ))
}

pub fn quniform_complete_cmd(doc: &Document, opts: &Options) -> Outcome {
    guarded(|| match doc {
        Document::Quniform(u) => quniform_complete(u, opts),
        other => Err(Error::Invalid(format!("expected a quniform file, got a {}", other.kind()))),
    })
}

pub fn suite(cfg: &SuiteConfig, strict: bool) -> Outcome {
    let run = run_suite(cfg);
    let r = &run.report;
    Outcome::new(r.failed == 0 && !(strict && r.skipped > 0), value(r))
}

/// Indented `key: value` lines; scalar arrays stay on one line.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && scalar(x).is_some()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

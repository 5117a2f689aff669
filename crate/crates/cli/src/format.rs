//! Plain-text object files.
//!
//! Every file starts with a header line naming its kind; `#` starts a comment.
//!
//! ```text
//! quantale two
//! elements: 0 1
//! order: 0<=1
//! unit: 1
//! tensor: 0*0=0 0*1=0 1*1=1
//!
//! vcat arrow over two            # or over ./my.quantale
//! elements: a b
//! m[a,b]=1                       # diagonal defaults to k, the rest to ⊥
//!
//! tvcat pts over 2 monad ultra
//! elements: a b
//! m[u0,b]=1                      # row labels: a point name or a T-label
//!
//! space sierpinski
//! points: o c
//! spec: c<=o                     # c lies in the closure of o
//!
//! quniform line
//! points: a b
//! base: (a,a) (b,b) (a,b)        # one base relation per line
//! ```

use lawcat_core::instances::{FinitePreorder, FiniteSpace};
use lawcat_core::laxext::LaxExtension;
use lawcat_core::monad::monad_by_name;
use lawcat_core::quantale::{builtin, validate_quantale, Quantale, RawQuantale};
use lawcat_core::quniform::{rel_from_pairs, QuasiUniformity};
use lawcat_core::relation::Relation;
use lawcat_core::vmatrix::VMatrix;
use lawcat_core::Budget;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub path: Option<PathBuf>,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "{}:{}: {}", p.display(), self.line, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

fn err<T>(line: usize, message: impl Into<String>) -> PResult<T> {
    Err(ParseError {
        path: None,
        line,
        message: message.into(),
    })
}

pub enum Document {
    Quantale(RawQuantale),
    VCat(VCatDoc),
    TVCat(TVCatDoc),
    Space(SpaceDoc),
    Quniform(QuniformDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Quantale(_) => "quantale",
            Document::VCat(_) => "vcat",
            Document::TVCat(_) => "tvcat",
            Document::Space(_) => "space",
            Document::Quniform(_) => "quniform",
        }
    }
}

/// A V-matrix on named points; not yet validated as a V-category.
pub struct VCatDoc {
    pub name: String,
    pub labels: Vec<String>,
    pub structure: VMatrix,
}

pub struct TVCatDoc {
    pub name: String,
    pub labels: Vec<String>,
    pub ext: Arc<LaxExtension>,
    pub structure: VMatrix,
}

pub struct SpaceDoc {
    pub name: String,
    pub labels: Vec<String>,
    pub space: FiniteSpace,
}

pub struct QuniformDoc {
    pub labels: Vec<String>,
    pub uniformity: QuasiUniformity,
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

fn lines(src: &str) -> Vec<Line<'_>> {
    src.lines()
        .enumerate()
        .map(|(i, l)| Line {
            no: i + 1,
            text: l.split('#').next().unwrap_or("").trim(),
        })
        .filter(|l| !l.text.is_empty())
        .collect()
}

pub fn parse_file(path: &Path, budget: &Budget) -> PResult<Document> {
    let src = std::fs::read_to_string(path).map_err(|e| ParseError {
        path: Some(path.to_path_buf()),
        line: 0,
        message: e.to_string(),
    })?;
    parse_document(&src, path.parent(), budget).map_err(|mut e| {
        e.path.get_or_insert_with(|| path.to_path_buf());
        e
    })
}

/// `base` resolves relative quantale paths in `over` clauses.
pub fn parse_document(src: &str, base: Option<&Path>, budget: &Budget) -> PResult<Document> {
    let ls = lines(src);
    let Some(head) = ls.first() else {
        return err(1, "empty file");
    };
    let words: Vec<&str> = head.text.split_whitespace().collect();
    let body = &ls[1..];
    match words[0] {
        "quantale" => {
            let name = header_name(head, &words, 2)?;
            parse_quantale_body(name, body).map(Document::Quantale)
        }
        "vcat" => {
            if words.len() != 4 || words[2] != "over" {
                return err(head.no, "expected `vcat <name> over <quantale>`");
            }
            let q = resolve_quantale(words[3], base, head.no)?;
            let (labels, structure) = parse_matrix_body(q, body, None)?;
            Ok(Document::VCat(VCatDoc {
                name: words[1].into(),
                labels,
                structure,
            }))
        }
        "tvcat" => {
            if words.len() != 6 || words[2] != "over" || words[4] != "monad" {
                return err(head.no, "expected `tvcat <name> over <quantale> monad <monad>`");
            }
            let q = resolve_quantale(words[3], base, head.no)?;
            let ext = extension(q.clone(), words[5], budget, head.no)?;
            let (labels, structure) = parse_matrix_body(q, body, Some(&ext))?;
            Ok(Document::TVCat(TVCatDoc {
                name: words[1].into(),
                labels,
                ext,
                structure,
            }))
        }
        "space" => {
            let name = header_name(head, &words, 2)?;
            let (labels, le) = parse_space_body(body)?;
            let pre = FinitePreorder::new(le).map_err(|e| ParseError {
                path: None,
                line: head.no,
                message: e.to_string(),
            })?;
            Ok(Document::Space(SpaceDoc {
                name,
                labels,
                space: FiniteSpace::from_specialization(pre),
            }))
        }
        "quniform" => {
            let name = header_name(head, &words, 2)?;
            parse_quniform_body(name, body).map(Document::Quniform)
        }
        other => err(head.no, format!("unknown object kind `{other}`")),
    }
}

fn header_name(head: &Line, words: &[&str], len: usize) -> PResult<String> {
    if words.len() != len {
        return err(head.no, format!("expected `{} <name>`", words[0]));
    }
    Ok(words[1].to_string())
}

pub fn extension(q: Arc<Quantale>, monad: &str, budget: &Budget, line: usize) -> PResult<Arc<LaxExtension>> {
    let Some(t) = monad_by_name(monad) else {
        return err(line, format!("unknown monad `{monad}` (expected id, powerset or ultra)"));
    };
    LaxExtension::new(q, t, *budget).map(Arc::new).or_else(|e| err(line, e.to_string()))
}

/// A built-in name, or a path to a `.quantale` file.
pub fn resolve_quantale(name: &str, base: Option<&Path>, line: usize) -> PResult<Arc<Quantale>> {
    if let Some(q) = builtin(name) {
        return Ok(Arc::new(q));
    }
    let path = match base {
        Some(b) => b.join(name),
        None => PathBuf::from(name),
    };
    if !path.exists() {
        return err(line, format!("unknown quantale `{name}`"));
    }
    let src = std::fs::read_to_string(&path).or_else(|e| err(line, format!("{}: {e}", path.display())))?;
    let ls = lines(&src);
    let nested = |e: ParseError| ParseError {
        path: None,
        line,
        message: format!("in {}: line {}: {}", path.display(), e.line, e.message),
    };
    let Some(head) = ls.first() else {
        return err(line, format!("{} is empty", path.display()));
    };
    let words: Vec<&str> = head.text.split_whitespace().collect();
    if words[0] != "quantale" {
        return err(line, format!("{} is not a quantale file", path.display()));
    }
    let raw = header_name(head, &words, 2)
        .and_then(|n| parse_quantale_body(n, &ls[1..]))
        .map_err(nested)?;
    validate_quantale(&raw)
        .map(Arc::new)
        .or_else(|v| err(line, format!("{} is not a quantale: {v}", path.display())))
}

fn field<'a>(l: &Line<'a>) -> Option<(&'a str, &'a str)> {
    let (k, v) = l.text.split_once(':')?;
    Some((k.trim(), v.trim()))
}

fn index_of(labels: &[String], s: &str, line: usize) -> PResult<usize> {
    labels
        .iter()
        .position(|l| l == s)
        .map_or_else(|| err(line, format!("undefined element `{s}`")), Ok)
}

fn parse_labels(v: &str, line: usize) -> PResult<Vec<String>> {
    let labels: Vec<String> = v.split_whitespace().map(String::from).collect();
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return err(line, format!("duplicate element `{l}`"));
        }
    }
    Ok(labels)
}

fn parse_quantale_body(name: String, body: &[Line]) -> PResult<RawQuantale> {
    let mut labels: Option<Vec<String>> = None;
    let mut order = Vec::new();
    let mut unit = None;
    let mut tensor: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for l in body {
        let Some((key, val)) = field(l) else {
            return err(l.no, "expected `key: value`");
        };
        if key != "elements" && labels.is_none() {
            return err(l.no, "`elements:` must come first");
        }
        match key {
            "elements" => {
                if labels.is_some() {
                    return err(l.no, "`elements:` given twice");
                }
                labels = Some(parse_labels(val, l.no)?);
            }
            "order" => {
                let labs = labels.as_ref().unwrap();
                for tok in val.split_whitespace() {
                    let Some((a, b)) = tok.split_once("<=") else {
                        return err(l.no, format!("expected `a<=b`, found `{tok}`"));
                    };
                    order.push((index_of(labs, a, l.no)?, index_of(labs, b, l.no)?));
                }
            }
            "unit" => unit = Some(index_of(labels.as_ref().unwrap(), val, l.no)?),
            "tensor" => {
                let labs = labels.as_ref().unwrap();
                for tok in val.split_whitespace() {
                    let parsed = tok.split_once('=').and_then(|(lhs, c)| lhs.split_once('*').map(|(a, b)| (a, b, c)));
                    let Some((a, b, c)) = parsed else {
                        return err(l.no, format!("expected `a*b=c`, found `{tok}`"));
                    };
                    let (a, b, c) = (index_of(labs, a, l.no)?, index_of(labs, b, l.no)?, index_of(labs, c, l.no)?);
                    for key in [(a, b), (b, a)] {
                        if let Some(&(prev, at)) = tensor.get(&key) {
                            if prev != c {
                                return err(l.no, format!("conflicting tensor entry, first given on line {at}"));
                            }
                        }
                        tensor.insert(key, (c, l.no));
                    }
                }
            }
            other => return err(l.no, format!("unknown field `{other}`")),
        }
    }
    let last = body.last().map_or(1, |l| l.no);
    let Some(labels) = labels else {
        return err(last, "missing `elements:`");
    };
    let Some(unit) = unit else {
        return err(last, "missing `unit:`");
    };
    let n = labels.len();
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in order {
        leq[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    let mut table = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            match tensor.get(&(a, b)) {
                Some(&(c, _)) => table[a][b] = c,
                None => return err(last, format!("missing tensor entry {}*{}", labels[a], labels[b])),
            }
        }
    }
    Ok(RawQuantale {
        name,
        labels,
        leq,
        tensor: table,
        unit,
    })
}

/// A row label for a (T,V)-structure: a point name stands for its unit image.
fn t_row(ext: &LaxExtension, labels: &[String], s: &str, line: usize) -> PResult<usize> {
    let n = labels.len();
    if let Some(i) = labels.iter().position(|l| l == s) {
        return Ok(ext.unit(n)[i]);
    }
    // braces may list point names: {a,b}
    let rewritten = match s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        Some(inner) => {
            let mut parts = Vec::new();
            for p in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let i = labels.iter().position(|l| l == p).map(|i| i.to_string()).unwrap_or_else(|| p.to_string());
                parts.push(i);
            }
            format!("{{{}}}", parts.join(","))
        }
        None => s.to_string(),
    };
    let tn = ext.t_size(n).or_else(|e| err(line, e.to_string()))?;
    match ext.monad().parse_label(n, &rewritten) {
        Some(i) if i < tn => Ok(i),
        _ => err(line, format!("undefined T-element `{s}` for monad {}", ext.monad().name())),
    }
}

fn parse_matrix_body(q: Arc<Quantale>, body: &[Line], ext: Option<&Arc<LaxExtension>>) -> PResult<(Vec<String>, VMatrix)> {
    let Some(first) = body.first() else {
        return err(1, "missing `elements:`");
    };
    let labels = match field(first) {
        Some(("elements", v)) => parse_labels(v, first.no)?,
        _ => return err(first.no, "`elements:` must come first"),
    };
    let n = labels.len();
    let (rows, diag): (usize, Vec<usize>) = match ext {
        Some(e) => (e.t_size(n).or_else(|x| err(first.no, x.to_string()))?, e.unit(n).to_vec()),
        None => (n, (0..n).collect()),
    };
    let mut m = VMatrix::from_fn(q.clone(), rows, n, |_, _| q.bottom());
    for (x, &tx) in diag.iter().enumerate() {
        m.set(tx, x, q.unit());
    }
    for l in &body[1..] {
        for tok in l.text.split_whitespace() {
            let parsed = tok
                .strip_prefix("m[")
                .and_then(|r| r.split_once("]="))
                .and_then(|(idx, v)| idx.rsplit_once(',').map(|(i, j)| (i, j, v)));
            let Some((i, j, v)) = parsed else {
                return err(l.no, format!("expected `m[x,y]=v`, found `{tok}`"));
            };
            let row = match ext {
                Some(e) => t_row(e, &labels, i, l.no)?,
                None => index_of(&labels, i, l.no)?,
            };
            let col = index_of(&labels, j, l.no)?;
            let Some(val) = q.elem(v) else {
                return err(l.no, format!("`{v}` is not an element of {}", q.name()));
            };
            m.set(row, col, val);
        }
    }
    Ok((labels, m))
}

fn parse_space_body(body: &[Line]) -> PResult<(Vec<String>, Relation)> {
    let mut labels: Option<Vec<String>> = None;
    let mut pairs = Vec::new();
    for l in body {
        match field(l) {
            Some(("points", v)) if labels.is_none() => labels = Some(parse_labels(v, l.no)?),
            Some(("spec", v)) => {
                let Some(labs) = &labels else {
                    return err(l.no, "`points:` must come first");
                };
                for tok in v.split_whitespace() {
                    let Some((a, b)) = tok.split_once("<=") else {
                        return err(l.no, format!("expected `x<=y`, found `{tok}`"));
                    };
                    pairs.push((index_of(labs, a, l.no)?, index_of(labs, b, l.no)?));
                }
            }
            _ => return err(l.no, "expected `points:` then `spec:` lines"),
        }
    }
    let Some(labels) = labels else {
        return err(body.last().map_or(1, |l| l.no), "missing `points:`");
    };
    let n = labels.len();
    let mut le = Relation::from_fn(n, n, |i, j| i == j);
    for (a, b) in pairs {
        le.set(a, b, true);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if le.get(i, k) && le.get(k, j) {
                    le.set(i, j, true);
                }
            }
        }
    }
    Ok((labels, le))
}

fn parse_pairs(v: &str, labels: &[String], line: usize) -> PResult<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for tok in v.split_whitespace() {
        let parsed = tok.strip_prefix('(').and_then(|r| r.strip_suffix(')')).and_then(|r| r.split_once(','));
        let Some((a, b)) = parsed else {
            return err(line, format!("expected `(x,y)`, found `{tok}`"));
        };
        out.push((index_of(labels, a.trim(), line)?, index_of(labels, b.trim(), line)?));
    }
    Ok(out)
}

fn parse_quniform_body(name: String, body: &[Line]) -> PResult<QuniformDoc> {
    let mut labels: Option<Vec<String>> = None;
    let mut base = Vec::new();
    let mut last = 1;
    for l in body {
        last = l.no;
        match field(l) {
            Some(("points", v)) if labels.is_none() => labels = Some(parse_labels(v, l.no)?),
            Some(("base", v)) => {
                let Some(labs) = &labels else {
                    return err(l.no, "`points:` must come first");
                };
                base.push(rel_from_pairs(labs.len(), &parse_pairs(v, labs, l.no)?));
            }
            _ => return err(l.no, "expected `points:` then `base:` lines"),
        }
    }
    let Some(labels) = labels else {
        return err(last, "missing `points:`");
    };
    let uniformity = QuasiUniformity::new(name, labels.len(), base).or_else(|e| err(last, e.to_string()))?;
    Ok(QuniformDoc { labels, uniformity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> PResult<Document> {
        parse_document(src, None, &Budget::default())
    }

    #[test]
    fn two_element_quantale() {
        let d = parse("quantale two\nelements: 0 1\norder: 0<=1\nunit: 1\ntensor: 0*0=0 0*1=0 1*1=1\n").unwrap();
        let Document::Quantale(raw) = d else { panic!() };
        let q = validate_quantale(&raw).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(q.label(q.top()), "1");
    }

    #[test]
    fn undefined_label_has_line() {
        let e = parse("quantale two\nelements: 0 1\n\norder: 0<=2\n").err().unwrap();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("`2`"));
    }

    #[test]
    fn missing_tensor_entry() {
        let e = parse("quantale two\nelements: 0 1\nunit: 1\ntensor: 0*0=0 1*1=1\n").err().unwrap();
        assert!(e.message.contains("missing tensor entry 0*1"));
    }

    #[test]
    fn vcat_defaults_and_entries() {
        let d = parse("vcat arrow over 2\nelements: a b\nm[a,b]=1\n").unwrap();
        let Document::VCat(v) = d else { panic!() };
        let s = &v.structure;
        let q = s.quantale();
        assert_eq!(s.get(0, 1), q.top());
        assert_eq!(s.get(1, 0), q.bottom());
        assert_eq!(s.get(1, 1), q.unit());
    }

    #[test]
    fn tvcat_rows_by_point_or_label() {
        let d = parse("tvcat p over 2 monad powerset\nelements: a b\nm[{a,b},a]=1 m[{},b]=1\n").unwrap();
        let Document::TVCat(t) = d else { panic!() };
        assert_eq!(t.structure.rows(), 4);
        let q = t.structure.quantale();
        assert_eq!(t.structure.get(0b11, 0), q.top());
        assert_eq!(t.structure.get(0, 1), q.top());
        assert_eq!(t.structure.get(0b10, 1), q.unit());
        assert!(parse("tvcat p over 2 monad powerset\nelements: a b\nm[{c},a]=1\n").is_err());
    }

    #[test]
    fn space_closure() {
        let d = parse("space s\npoints: a b c\nspec: a<=b b<=c\n").unwrap();
        let Document::Space(s) = d else { panic!() };
        assert!(s.space.specialization().le(0, 2));
    }

    #[test]
    fn quniform_base() {
        let d = parse("quniform u\npoints: a b\nbase: (a,a) (b,b) (a,b)\n").unwrap();
        let Document::Quniform(u) = d else { panic!() };
        assert_eq!(u.uniformity.base.len(), 1);
        assert!(parse("quniform u\npoints: a b\nbase: (a,c)\n").is_err());
    }

    #[test]
    fn unknown_kind() {
        assert_eq!(parse("\n# c\nlattice x\n").err().unwrap().line, 3);
    }
}

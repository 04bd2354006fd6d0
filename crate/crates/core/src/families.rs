//! One-parameter test families as degree tables, used as linear functionals
//! on `H²` to certify independence of generators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::linalg::{rank, Rref};
use crate::quotient::relation_set;
use crate::rational::{format_q, parse_q, q, Q};
use crate::taut::{aggregate, canonical_key, Aggregate, GenKey, Label, MarkingSet, Space, TautClass};

/// `S ⊆ {1..n}` with `|S| ≤ n − 2`, ordered by size then elements.
pub fn keel_index(n: usize) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = (0u64..1 << n)
        .map(|m| (1..=n).filter(|i| m >> (i - 1) & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.len() + 2 <= n)
        .collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets
}

/// Degrees of `δ_{0, T ∪ {n+1, n+2}}` (columns `T`) on the families `F_S` (rows `S`).
pub fn keel_family_matrix(n: usize) -> Result<Vec<Vec<Q>>> {
    if n < 3 {
        return invalid(format!("keel families need n >= 3, got {n}"));
    }
    let index = keel_index(n);
    Ok(index
        .iter()
        .map(|s| {
            index
                .iter()
                .map(|t| {
                    if s.is_empty() {
                        match t.len() {
                            0 => q(2 - n as i64),
                            1 => q(1),
                            _ => q(0),
                        }
                    } else if s == t {
                        q(-(s.len() as i64))
                    } else if t.len() + 1 == s.len() && t.iter().all(|x| s.contains(x)) {
                        q(1)
                    } else {
                        q(0)
                    }
                })
                .collect()
        })
        .collect())
}

/// Outcome of solving `Σ_T a_T deg_{F_S} δ_T = 0` row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillReport {
    pub steps: Vec<String>,
    pub all_zero: bool,
}

fn set_name(s: &[usize]) -> String {
    format!("a_{{{}}}", s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

/// Forces every coefficient of a relation among the `δ_T` to vanish: singleton
/// rows give `a_{s} = a_∅`, the empty row then gives `2 a_∅ = 0`, and each larger
/// `S` is settled from the smaller ones.
pub fn keel_relation_kill_check(n: usize) -> Result<KillReport> {
    let m = keel_family_matrix(n)?;
    let index = keel_index(n);
    let pos = |s: &Vec<usize>| index.iter().position(|t| t == s).unwrap();
    // each unknown is tracked as a multiple of a_∅ while a_∅ is undetermined
    let mut value: Vec<Option<Q>> = vec![None; index.len()];
    let mut steps = Vec::new();
    let mut ok = true;
    let empty = pos(&vec![]);
    value[empty] = Some(Q::one());
    for (i, s) in index.iter().enumerate().filter(|(_, s)| s.len() == 1) {
        let row = &m[i];
        let others_ok = (0..index.len()).all(|j| j == i || j == empty || row[j].is_zero());
        ok &= others_ok && !row[i].is_zero();
        value[i] = Some(-&row[empty] / &row[i]);
        steps.push(format!("{} = {} a_{{}}", set_name(s), format_q(value[i].as_ref().unwrap())));
    }
    let coefficient: Q = (0..index.len()).map(|j| &m[empty][j] * value[j].clone().unwrap_or_else(Q::zero)).sum();
    let solved_rows = index.iter().filter(|s| s.len() <= 1).count();
    ok &= (solved_rows..index.len()).all(|j| m[empty][j].is_zero()) && !coefficient.is_zero();
    steps.push(format!("{} a_{{}} = 0", format_q(&coefficient)));
    for v in value.iter_mut().flatten() {
        *v = Q::zero();
    }
    for (i, s) in index.iter().enumerate().filter(|(_, s)| s.len() >= 2) {
        let row = &m[i];
        let lower_known = (0..index.len()).all(|j| j == i || row[j].is_zero() || value[j].is_some());
        ok &= lower_known && !row[i].is_zero();
        let rest: Q = (0..index.len()).filter(|&j| j != i).map(|j| &row[j] * value[j].clone().unwrap_or_else(Q::zero)).sum();
        value[i] = Some(-rest / &row[i]);
        steps.push(format!("{} {} = 0", format_q(&row[i]), set_name(s)));
    }
    let all_zero = ok && value.iter().all(|v| v.as_ref().is_some_and(Zero::is_zero));
    Ok(KillReport { steps, all_zero })
}

/// A degree: rational constant plus rational multiples of named nonzero parameters.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Affine {
    pub constant: Q,
    pub params: BTreeMap<String, Q>,
}

impl Affine {
    pub fn constant(c: Q) -> Self {
        Self { constant: c, params: BTreeMap::new() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::Parse(format!("bad degree {t:?}"));
        let split = t.find(|c: char| c.is_ascii_alphabetic());
        match split {
            None => Ok(Self::constant(parse_q(t)?)),
            Some(i) => {
                let (coef, name) = t.split_at(i);
                if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(bad());
                }
                let c = match coef {
                    "" | "+" => q(1),
                    "-" => q(-1),
                    other => parse_q(other).map_err(|_| bad())?,
                };
                let mut a = Self::default();
                a.add_param(name, c);
                Ok(a)
            }
        }
    }

    fn add_param(&mut self, name: &str, c: Q) {
        let e = self.params.entry(name.to_string()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.params.remove(name);
        }
    }

    pub fn plus_scaled(&self, other: &Affine, c: &Q) -> Affine {
        let mut out = self.clone();
        out.constant += &other.constant * c;
        for (k, v) in &other.params {
            out.add_param(k, v * c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.params.is_empty()
    }

    pub fn eval(&self, at: &BTreeMap<String, Q>) -> Q {
        self.params.iter().fold(self.constant.clone(), |acc, (k, v)| acc + v * &at[k])
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.params.is_empty() {
            parts.push(format_q(&self.constant));
        }
        for (k, v) in &self.params {
            parts.push(if v.is_one() { k.clone() } else { format!("{}{k}", format_q(v)) });
        }
        f.write_str(&parts.join("+"))
    }
}

/// A generator key or the Hodge class `λ`, which families may also record.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyKey {
    Gen(GenKey),
    Lambda,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFamily {
    pub name: String,
    pub space: Space,
    pub degrees: BTreeMap<FamilyKey, Affine>,
}

impl TestFamily {
    pub fn degree(&self, key: &GenKey) -> Option<&Affine> {
        self.degrees.get(&FamilyKey::Gen(key.clone()))
    }

    /// Degree of a class when every generator in it has a recorded degree.
    pub fn class_degree(&self, x: &TautClass) -> Option<Affine> {
        x.terms().iter().try_fold(Affine::default(), |acc, (k, c)| Some(acc.plus_scaled(self.degree(k)?, c)))
    }

    /// Recorded `κ₁` degree, or the one forced by `κ₁ = 12λ − δ + ψ` when `λ` and the rest are known.
    pub fn kappa_degree(&self) -> Option<Affine> {
        if let Some(k) = self.degree(&GenKey::Kappa1) {
            return Some(k.clone());
        }
        let lambda = self.degrees.get(&FamilyKey::Lambda)?;
        let rest = aggregate(&self.space, Aggregate::PsiSum).minus(&aggregate(&self.space, Aggregate::DeltaTotal)).ok()?;
        Some(self.class_degree(&rest)?.plus_scaled(lambda, &q(12)))
    }

    /// Degrees of the relations of the ambient space, when all of them are determined.
    pub fn relation_degrees(&self) -> Option<Vec<Affine>> {
        let mut with_kappa = self.clone();
        if self.degree(&GenKey::Kappa1).is_none() {
            with_kappa.degrees.insert(FamilyKey::Gen(GenKey::Kappa1), self.kappa_degree()?);
        }
        relation_set(&self.space).relations.iter().map(|r| with_kappa.class_degree(r)).collect()
    }
}

/// Reads `family \t key \t degree` rows under a `# space: g=G markings=a,b` header.
pub fn parse_fixture(text: &str) -> Result<Vec<TestFamily>> {
    let mut space: Option<Space> = None;
    let mut order: Vec<String> = Vec::new();
    let mut tables: BTreeMap<String, BTreeMap<FamilyKey, Affine>> = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(header) = line.strip_prefix('#') {
            if let Some(spec) = header.trim().strip_prefix("space:") {
                space = Some(parse_space_header(spec)?);
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("expected 3 columns: {line:?}")));
        }
        if cols == ["family", "key", "degree"] {
            continue;
        }
        let sp = space.as_ref().ok_or_else(|| Error::Parse("missing space header".into()))?;
        let key = if cols[1] == "lambda" {
            FamilyKey::Lambda
        } else {
            let raw: GenKey = cols[1].parse()?;
            FamilyKey::Gen(canonical_key(sp, &raw)?.ok_or_else(|| Error::Parse(format!("{} is zero on {sp}", cols[1])))?)
        };
        if !tables.contains_key(cols[0]) {
            order.push(cols[0].to_string());
        }
        let table = tables.entry(cols[0].to_string()).or_default();
        if table.insert(key, Affine::parse(cols[2])?).is_some() {
            return Err(Error::Parse(format!("duplicate entry {} for {}", cols[1], cols[0])));
        }
    }
    let space = space.ok_or_else(|| Error::Parse("missing space header".into()))?;
    Ok(order
        .into_iter()
        .map(|name| {
            let degrees = tables.remove(&name).unwrap();
            TestFamily { name, space: space.clone(), degrees }
        })
        .collect())
}

fn parse_space_header(spec: &str) -> Result<Space> {
    let mut g = None;
    let mut markings = MarkingSet::default();
    for part in spec.split_whitespace() {
        match part.split_once('=') {
            Some(("g", v)) => g = Some(v.parse().map_err(|_| Error::Parse(format!("bad genus {v:?}")))?),
            Some(("markings", v)) => markings = MarkingSet::parse_list(v)?,
            _ => return Err(Error::Parse(format!("bad space header field {part:?}"))),
        }
    }
    Space::new(g.ok_or_else(|| Error::Parse("space header without genus".into()))?, markings)
}

/// The genus-two degree tables shipped with the crate.
pub fn builtin_fixtures() -> Vec<(&'static str, Vec<TestFamily>)> {
    [
        ("genus2_n0", include_str!("../fixtures/genus2_n0.tsv")),
        ("genus2_n1", include_str!("../fixtures/genus2_n1.tsv")),
        ("genus2_n2", include_str!("../fixtures/genus2_n2.tsv")),
    ]
    .into_iter()
    .map(|(name, text)| (name, parse_fixture(text).expect("shipped fixture parses")))
    .collect()
}

/// Shipped families grouped with the generators they separate.
pub fn independence_cases() -> Vec<(Vec<TestFamily>, Vec<GenKey>)> {
    let fixtures = builtin_fixtures();
    let pick = |file: &str, names: &[&str]| -> Vec<TestFamily> {
        let fams = &fixtures.iter().find(|(f, _)| *f == file).expect("shipped fixture").1;
        names.iter().map(|n| fams.iter().find(|f| f.name == *n).expect("shipped family").clone()).collect()
    };
    let key = |s: &str| s.parse::<GenKey>().expect("key literal");
    vec![
        (pick("genus2_n0", &["F", "E"]), vec![GenKey::DeltaIrr, key("delta:1:{}")]),
        (pick("genus2_n1", &["F1", "E1", "G1"]), vec![GenKey::DeltaIrr, key("delta:1:{}"), key("psi:p")]),
        (pick("genus2_n2", &["blowup", "blowup_swapped"]), vec![key("psi:p"), key("psi:q")]),
        (pick("genus2_n2", &["elliptic_tail"]), vec![key("delta:1:{p}")]),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndependenceReport {
    pub rank: usize,
    pub keys: usize,
    /// families left out because some requested degree is not recorded
    pub excluded: Vec<String>,
}

impl IndependenceReport {
    pub fn independent(&self) -> bool {
        self.rank == self.keys
    }
}

/// Rank of the degree matrix (families × keys) over the field of rational
/// functions in the parameters.
///
/// Every entry is affine in each parameter, so an `r × r` minor has degree at
/// most `r` in each; evaluating on an `(r+1)`-point grid of nonzero values
/// therefore finds the generic rank as the maximum.
pub fn independence_report(families: &[TestFamily], keys: &[GenKey]) -> Result<IndependenceReport> {
    if families.is_empty() || keys.is_empty() {
        return invalid("independence needs at least one family and one key");
    }
    let space = &families[0].space;
    if families.iter().any(|f| &f.space != space) {
        return invalid("families live on different spaces");
    }
    let keys: Vec<GenKey> =
        keys.iter().map(|k| canonical_key(space, k)?.ok_or_else(|| Error::InvalidInput(format!("{k} is zero")))).collect::<Result<_>>()?;
    let (used, excluded): (Vec<&TestFamily>, Vec<&TestFamily>) =
        families.iter().partition(|f| keys.iter().all(|k| f.degree(k).is_some()));
    let rows: Vec<Vec<&Affine>> = used.iter().map(|f| keys.iter().map(|k| f.degree(k).unwrap()).collect()).collect();
    let params: Vec<String> =
        rows.iter().flatten().flat_map(|a| a.params.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let r = rows.len().min(keys.len());
    let mut best = 0;
    let mut point = vec![1i64; params.len()];
    loop {
        let at: BTreeMap<String, Q> = params.iter().cloned().zip(point.iter().map(|&v| q(v))).collect();
        let numeric: Vec<Vec<Q>> = rows.iter().map(|row| row.iter().map(|a| a.eval(&at)).collect()).collect();
        best = best.max(rank(keys.len(), numeric));
        // next grid point in {1..=r+1}^params
        let Some(i) = point.iter().position(|&v| v <= r as i64) else { break };
        for v in &mut point[..i] {
            *v = 1;
        }
        point[i] += 1;
    }
    Ok(IndependenceReport { rank: best, keys: keys.len(), excluded: excluded.iter().map(|f| f.name.clone()).collect() })
}

pub fn keel_family_rank(n: usize) -> Result<usize> {
    let m = keel_family_matrix(n)?;
    Ok(Rref::from_matrix(m.len(), m).rank())
}

/// `δ_{0, T ∪ {n+1, n+2}}` as generator keys of `M̄_{0, n+2}`, in index order.
pub fn keel_family_keys(n: usize) -> Result<(Space, Vec<GenKey>)> {
    let space = Space::numbered(0, n + 2)?;
    let extra = [Label::new((n + 1).to_string())?, Label::new((n + 2).to_string())?];
    let keys = keel_index(n)
        .iter()
        .map(|t| {
            let mut s: crate::taut::LabelSet = t.iter().map(|i| Label::new(i.to_string())).collect::<Result<_>>()?;
            s.extend(extra.iter().cloned());
            crate::taut::normalize_boundary(&space, 0, &s)?.ok_or_else(|| Error::InvalidInput("unstable key".into()))
        })
        .collect::<Result<_>>()?;
    Ok((space, keys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::label;

    #[test]
    fn keel_matrix_shapes_and_entries() {
        let m = keel_family_matrix(3).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m[0], vec![q(-1), q(1), q(1), q(1)]);
        let idx = keel_index(4);
        assert_eq!(idx.len(), 11);
        let m = keel_family_matrix(4).unwrap();
        let row = idx.iter().position(|s| s == &vec![1, 2]).unwrap();
        let col = idx.iter().position(|s| s == &vec![1]).unwrap();
        assert_eq!(m[row][col], q(1));
        assert_eq!(m[row][row], q(-2));
        assert!(keel_family_matrix(2).is_err());
    }

    #[test]
    fn keel_full_rank() {
        for n in 3..=7 {
            assert_eq!(keel_family_rank(n).unwrap(), keel_index(n).len());
        }
    }

    #[test]
    fn kill_check() {
        for n in 3..=6 {
            let r = keel_relation_kill_check(n).unwrap();
            assert!(r.all_zero, "{n}: {:?}", r.steps);
        }
        let r = keel_relation_kill_check(3).unwrap();
        assert_eq!(r.steps[0], "a_{1} = 1 a_{}");
        assert_eq!(r.steps[3], "2 a_{} = 0");
    }

    #[test]
    fn affine_parsing() {
        assert_eq!(Affine::parse("12d").unwrap().to_string(), "12d");
        assert_eq!(Affine::parse("-d").unwrap().to_string(), "-1d");
        assert_eq!(Affine::parse("d").unwrap().to_string(), "d");
        assert_eq!(Affine::parse("-3").unwrap().to_string(), "-3");
        assert!(Affine::parse("1.5").is_err());
        assert!(Affine::parse("2d*").is_err());
    }

    #[test]
    fn fixtures_load() {
        let all = builtin_fixtures();
        assert_eq!(all.len(), 3);
        let n1 = &all[1].1;
        assert_eq!(n1.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), ["F1", "E1", "G1"]);
        let p = label("p");
        // δ_{1,∅} is stored under its canonical key δ_{1,{p}}
        assert!(n1[0].degree(&"delta:1:{p}".parse().unwrap()).is_some());
        assert_eq!(n1[2].degree(&GenKey::Psi(p)).unwrap(), &Affine::constant(q(2)));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_fixture("F\tkappa1\t1\n").is_err());
        assert!(parse_fixture("# space: g=2 markings=\nF\tkappa1\t1\nF\tkappa1\t2\n").is_err());
        assert!(parse_fixture("# space: g=2 markings=\nF\tpsi:x\t1\n").is_err());
    }

    #[test]
    fn independence_needs_inputs() {
        assert!(independence_report(&[], &[GenKey::DeltaIrr]).is_err());
    }
}

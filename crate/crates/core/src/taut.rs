//! Marking sets, moduli spaces, degree-two generator keys and formal rational
//! combinations of them.
//!
//! A separating boundary class `δ_{a,A}` equals `δ_{g-a,A^c}`; keys always store
//! one canonical representative of that pair, so equal classes have equal term maps.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{format_q, parse_q, q, Q};

/// A marking symbol. Ordered lexicographically on its text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.chars().any(|c| c.is_whitespace() || ",{}:\"".contains(c)) {
            return invalid(format!("bad label {text:?}"));
        }
        Ok(Self(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Shorthand for building labels from literals known to be valid.
pub fn label(text: &str) -> Label {
    Label::new(text).expect("valid label literal")
}

pub type LabelSet = BTreeSet<Label>;

pub fn label_set<'a>(labels: impl IntoIterator<Item = &'a str>) -> LabelSet {
    labels.into_iter().map(label).collect()
}

/// The finite set `P` of marked-point labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MarkingSet(LabelSet);

impl MarkingSet {
    /// Fails if any label repeats.
    pub fn new(labels: impl IntoIterator<Item = Label>) -> Result<Self> {
        let mut set = LabelSet::new();
        for l in labels {
            if !set.insert(l.clone()) {
                return invalid(format!("duplicate label {l}"));
            }
        }
        Ok(Self(set))
    }

    /// Labels `1..=n`.
    pub fn numbered(n: usize) -> Self {
        Self((1..=n).map(|i| label(&i.to_string())).collect())
    }

    pub fn parse_list(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::default());
        }
        Self::new(text.split(',').map(|s| Label::new(s.trim())).collect::<Result<Vec<_>>>()?)
    }

    pub fn labels(&self) -> &LabelSet {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.contains(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Label> {
        self.0.iter()
    }
}

/// `M̄_{g,P}`; construction enforces `2g - 2 + |P| > 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Space {
    g: u32,
    markings: MarkingSet,
}

impl Space {
    pub fn new(g: u32, markings: MarkingSet) -> Result<Self> {
        if 2 * g as i64 - 2 + markings.len() as i64 <= 0 {
            return invalid(format!("unstable space g={g}, n={}", markings.len()));
        }
        Ok(Self { g, markings })
    }

    pub fn numbered(g: u32, n: usize) -> Result<Self> {
        Self::new(g, MarkingSet::numbered(n))
    }

    pub fn with_labels<'a>(g: u32, labels: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        Self::new(g, MarkingSet::new(labels.into_iter().map(Label::new).collect::<Result<Vec<_>>>()?)?)
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> usize {
        self.markings.len()
    }

    pub fn markings(&self) -> &MarkingSet {
        &self.markings
    }

    pub fn labels(&self) -> &LabelSet {
        self.markings.labels()
    }

    pub fn complement(&self, subset: &LabelSet) -> LabelSet {
        self.labels().difference(subset).cloned().collect()
    }

    pub fn is_subset(&self, subset: &LabelSet) -> bool {
        subset.is_subset(self.labels())
    }

    /// Same genus with extra fresh labels.
    pub fn with_added(&self, extra: &[&Label]) -> Result<Self> {
        let mut labels = self.labels().clone();
        for l in extra {
            if !labels.insert((*l).clone()) {
                return invalid(format!("label {l} is not fresh in {self}"));
            }
        }
        Space::new(self.g, MarkingSet(labels))
    }

    /// Labels `q1, q2, ...` that are not already markings, in order.
    pub fn fresh_labels(&self, count: usize) -> Vec<Label> {
        fresh_labels_avoiding(self.labels(), count)
    }
}

pub fn fresh_labels_avoiding(used: &LabelSet, count: usize) -> Vec<Label> {
    (1..)
        .map(|i| label(&format!("q{i}")))
        .filter(|l| !used.contains(l))
        .take(count)
        .collect()
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M({}, {{{}}})", self.g, self.markings.iter().map(Label::as_str).collect::<Vec<_>>().join(","))
    }
}

/// One degree-two generator symbol.
///
/// The derived order (κ₁, then ψ by label, then δ_irr, then δ_{a,A} by `(a, A)`)
/// is the generator order used for every matrix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKey {
    Kappa1,
    Psi(Label),
    DeltaIrr,
    DeltaSep { a: u32, subset: LabelSet },
}

impl GenKey {
    pub fn is_boundary(&self) -> bool {
        matches!(self, GenKey::DeltaIrr | GenKey::DeltaSep { .. })
    }
}

impl fmt::Display for GenKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKey::Kappa1 => f.write_str("kappa1"),
            GenKey::Psi(l) => write!(f, "psi:{l}"),
            GenKey::DeltaIrr => f.write_str("delta_irr"),
            GenKey::DeltaSep { a, subset } => {
                write!(f, "delta:{a}:{{{}}}", subset.iter().map(Label::as_str).collect::<Vec<_>>().join(","))
            }
        }
    }
}

impl FromStr for GenKey {
    type Err = Error;

    /// Parses the raw key text; it is not normalized against any space.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad generator key {s:?}"));
        match s {
            "kappa1" => return Ok(GenKey::Kappa1),
            "delta_irr" => return Ok(GenKey::DeltaIrr),
            _ => {}
        }
        if let Some(l) = s.strip_prefix("psi:") {
            return Ok(GenKey::Psi(Label::new(l).map_err(|_| bad())?));
        }
        let rest = s.strip_prefix("delta:").ok_or_else(bad)?;
        let (a, set) = rest.split_once(':').ok_or_else(bad)?;
        let a: u32 = a.parse().map_err(|_| bad())?;
        let inner = set.strip_prefix('{').and_then(|x| x.strip_suffix('}')).ok_or_else(bad)?;
        let subset = if inner.is_empty() {
            LabelSet::new()
        } else {
            inner.split(',').map(|t| Label::new(t.trim()).map_err(|_| bad())).collect::<Result<_>>()?
        };
        Ok(GenKey::DeltaSep { a, subset })
    }
}

/// Canonical key of `δ_{a,A}`, or `None` when the convention sets it to zero
/// (`a < 0`, `a > g`, or one side of the graph `G_{a,A}` unstable).
pub fn normalize_boundary(space: &Space, a: i64, subset: &LabelSet) -> Result<Option<GenKey>> {
    if !space.is_subset(subset) {
        return invalid(format!("subset {subset:?} is not contained in the markings of {space}"));
    }
    let g = space.g() as i64;
    let comp = space.complement(subset);
    let b = g - a;
    let (na, nb) = (subset.len() as i64, comp.len() as i64);
    if a < 0 || a > g || 2 * a - 2 + na < 0 || 2 * b - 2 + nb < 0 {
        return Ok(None);
    }
    let take_given = match a.cmp(&b) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => match space.labels().iter().next() {
            Some(first) => subset.contains(first),
            None => true,
        },
    };
    Ok(Some(if take_given {
        GenKey::DeltaSep { a: a as u32, subset: subset.clone() }
    } else {
        GenKey::DeltaSep { a: b as u32, subset: comp }
    }))
}

/// `δ_irr`, which is zero in genus zero.
pub fn normalize_irr(space: &Space) -> Option<GenKey> {
    (space.g() > 0).then_some(GenKey::DeltaIrr)
}

/// Whether `key` is a generator of `space` in canonical form.
pub fn is_valid_key(space: &Space, key: &GenKey) -> bool {
    match key {
        GenKey::Kappa1 | GenKey::DeltaIrr => true,
        GenKey::Psi(l) => space.markings().contains(l),
        GenKey::DeltaSep { a, subset } => {
            matches!(normalize_boundary(space, *a as i64, subset), Ok(Some(ref k)) if k == key)
        }
    }
}

/// Brings an arbitrary key into canonical form for `space`.
pub fn canonical_key(space: &Space, key: &GenKey) -> Result<Option<GenKey>> {
    match key {
        GenKey::Kappa1 | GenKey::DeltaIrr => Ok(Some(key.clone())),
        GenKey::Psi(l) => {
            if space.markings().contains(l) {
                Ok(Some(key.clone()))
            } else {
                invalid(format!("psi label {l} not a marking of {space}"))
            }
        }
        GenKey::DeltaSep { a, subset } => normalize_boundary(space, *a as i64, subset),
    }
}

/// All generators of `H²(M̄_{g,P})` in generator order.
///
/// `δ_irr` is listed in genus zero too; the genus-zero relation set kills it.
pub fn generators(space: &Space) -> Vec<GenKey> {
    let mut keys = vec![GenKey::Kappa1];
    keys.extend(space.labels().iter().cloned().map(GenKey::Psi));
    keys.push(GenKey::DeltaIrr);
    let mut seps = BTreeSet::new();
    for subset in subsets(space.labels()) {
        for a in 0..=space.g() as i64 {
            if let Some(k) = normalize_boundary(space, a, &subset).expect("subset of markings") {
                seps.insert(k);
            }
        }
    }
    keys.extend(seps);
    keys
}

/// Boundary generator keys: `δ_irr` (positive genus only) and the separating keys.
pub fn boundary_keys(space: &Space) -> Vec<GenKey> {
    generators(space)
        .into_iter()
        .filter(|k| match k {
            GenKey::DeltaIrr => space.g() > 0,
            other => other.is_boundary(),
        })
        .collect()
}

/// Every subset of `set`, ordered by size then lexicographically.
pub fn subsets(set: &LabelSet) -> Vec<LabelSet> {
    let items: Vec<&Label> = set.iter().collect();
    let mut out: Vec<LabelSet> = (0u64..1 << items.len())
        .map(|mask| items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| (*l).clone()).collect())
        .collect();
    out.sort_by(|x: &LabelSet, y: &LabelSet| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// A formal rational combination of generators of one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautClass {
    space: Space,
    terms: BTreeMap<GenKey, Q>,
}

impl TautClass {
    pub fn zero(space: &Space) -> Self {
        Self { space: space.clone(), terms: BTreeMap::new() }
    }

    /// Single generator; the key is canonicalized, a zero-convention key gives the zero class.
    pub fn generator(space: &Space, key: &GenKey) -> Result<Self> {
        let mut c = Self::zero(space);
        c.add_key(key, &q(1))?;
        Ok(c)
    }

    pub fn from_terms<'a>(space: &Space, terms: impl IntoIterator<Item = (&'a GenKey, Q)>) -> Result<Self> {
        let mut c = Self::zero(space);
        for (k, v) in terms {
            c.add_key(k, &v)?;
        }
        Ok(c)
    }

    pub fn kappa1(space: &Space) -> Self {
        Self::generator(space, &GenKey::Kappa1).expect("kappa1")
    }

    pub fn psi(space: &Space, l: &Label) -> Result<Self> {
        Self::generator(space, &GenKey::Psi(l.clone()))
    }

    pub fn delta_irr(space: &Space) -> Self {
        Self::generator(space, &GenKey::DeltaIrr).expect("delta_irr")
    }

    /// `δ_{a,A}` under the zero conventions.
    pub fn delta(space: &Space, a: i64, subset: &LabelSet) -> Result<Self> {
        let mut c = Self::zero(space);
        if let Some(k) = normalize_boundary(space, a, subset)? {
            c.add_canonical(k, q(1));
        }
        Ok(c)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn terms(&self) -> &BTreeMap<GenKey, Q> {
        &self.terms
    }

    pub fn coeff(&self, key: &GenKey) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c·key` after canonicalizing the key in this class's space.
    pub fn add_key(&mut self, key: &GenKey, c: &Q) -> Result<()> {
        if let Some(k) = canonical_key(&self.space, key)? {
            self.add_canonical(k, c.clone());
        }
        Ok(())
    }

    pub(crate) fn add_canonical(&mut self, key: GenKey, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self + c·other`.
    pub fn plus_scaled(&self, other: &TautClass, c: &Q) -> Result<TautClass> {
        if self.space != other.space {
            return invalid(format!("space mismatch: {} vs {}", self.space, other.space));
        }
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_canonical(k.clone(), v * c);
        }
        Ok(out)
    }

    pub fn plus(&self, other: &TautClass) -> Result<TautClass> {
        self.plus_scaled(other, &q(1))
    }

    pub fn minus(&self, other: &TautClass) -> Result<TautClass> {
        self.plus_scaled(other, &q(-1))
    }

    pub fn scaled(&self, c: &Q) -> TautClass {
        let mut out = TautClass::zero(&self.space);
        for (k, v) in &self.terms {
            out.add_canonical(k.clone(), v * c);
        }
        out
    }
}

/// `u + c·v` on classes of one space.
pub fn linear_arithmetic(u: &TautClass, v: &TautClass, c: &Q) -> Result<TautClass> {
    u.plus_scaled(v, c)
}

impl fmt::Display for TautClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, v)| format!("({})*{k}", format_q(v))).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregate {
    /// `ψ = Σ_p ψ_p`
    PsiSum,
    /// `δ_a`: every `δ_{a,A}`, each class counted once.
    DeltaA(i64),
    /// `δ = δ_irr + Σ_{2a ≤ g} δ_a`
    DeltaTotal,
}

pub fn aggregate(space: &Space, kind: Aggregate) -> TautClass {
    let mut out = TautClass::zero(space);
    match kind {
        Aggregate::PsiSum => {
            for l in space.labels() {
                out.add_canonical(GenKey::Psi(l.clone()), q(1));
            }
        }
        Aggregate::DeltaA(a) => {
            let keys: BTreeSet<GenKey> = subsets(space.labels())
                .iter()
                .filter_map(|s| normalize_boundary(space, a, s).expect("subset of markings"))
                .collect();
            for k in keys {
                out.add_canonical(k, q(1));
            }
        }
        Aggregate::DeltaTotal => {
            if let Some(k) = normalize_irr(space) {
                out.add_canonical(k, q(1));
            }
            for a in 0..=space.g() as i64 / 2 {
                out = out.plus(&aggregate(space, Aggregate::DeltaA(a))).expect("same space");
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct TermJson {
    pub gen: String,
    pub coeff: String,
}

/// Wire form of a class: `{"g", "markings", "terms": [{"gen", "coeff"}]}`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ClassJson {
    pub g: u32,
    pub markings: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl From<&TautClass> for ClassJson {
    fn from(c: &TautClass) -> Self {
        ClassJson {
            g: c.space.g(),
            markings: c.space.labels().iter().map(|l| l.to_string()).collect(),
            terms: c.terms.iter().map(|(k, v)| TermJson { gen: k.to_string(), coeff: format_q(v) }).collect(),
        }
    }
}

impl TryFrom<&ClassJson> for TautClass {
    type Error = Error;

    fn try_from(j: &ClassJson) -> Result<Self> {
        let markings = MarkingSet::new(j.markings.iter().map(|s| Label::new(s.as_str())).collect::<Result<Vec<_>>>()?)?;
        let space = Space::new(j.g, markings)?;
        let mut c = TautClass::zero(&space);
        for t in &j.terms {
            let key: GenKey = t.gen.parse()?;
            c.add_key(&key, &parse_q(&t.coeff)?)?;
        }
        Ok(c)
    }
}

impl TautClass {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ClassJson::from(self)).expect("serializable")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let j: ClassJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        TautClass::try_from(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    fn sep(a: u32, labels: &[&str]) -> GenKey {
        GenKey::DeltaSep { a, subset: label_set(labels.iter().copied()) }
    }

    #[test]
    fn normalize_examples() {
        let s = Space::with_labels(1, ["p"]).unwrap();
        assert_eq!(normalize_boundary(&s, 1, &LabelSet::new()).unwrap(), None);

        let s = Space::numbered(1, 3).unwrap();
        assert_eq!(normalize_boundary(&s, 1, &label_set(["1"])).unwrap(), Some(sep(0, &["2", "3"])));

        let s = Space::numbered(2, 0).unwrap();
        assert_eq!(normalize_boundary(&s, 1, &LabelSet::new()).unwrap(), Some(sep(1, &[])));
    }

    #[test]
    fn normalize_rejects_foreign_subset() {
        let s = Space::numbered(1, 2).unwrap();
        assert!(matches!(normalize_boundary(&s, 0, &label_set(["7"])), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn self_paired_tie_break_uses_smallest_label() {
        let s = Space::with_labels(2, ["p", "q"]).unwrap();
        assert_eq!(normalize_boundary(&s, 1, &label_set(["q"])).unwrap(), Some(sep(1, &["p"])));
        assert_eq!(normalize_boundary(&s, 1, &LabelSet::new()).unwrap(), Some(sep(1, &["p", "q"])));
    }

    #[test]
    fn irr_zero_only_in_genus_zero() {
        assert_eq!(normalize_irr(&Space::numbered(0, 4).unwrap()), None);
        assert_eq!(normalize_irr(&Space::with_labels(1, ["p"]).unwrap()), Some(GenKey::DeltaIrr));
        assert_eq!(normalize_irr(&Space::numbered(3, 0).unwrap()), Some(GenKey::DeltaIrr));
    }

    #[test]
    fn generator_examples() {
        let s = Space::with_labels(1, ["p"]).unwrap();
        assert_eq!(generators(&s), vec![GenKey::Kappa1, GenKey::Psi(label("p")), GenKey::DeltaIrr]);
        let s = Space::numbered(2, 0).unwrap();
        assert_eq!(generators(&s), vec![GenKey::Kappa1, GenKey::DeltaIrr, sep(1, &[])]);
        let s = Space::numbered(0, 3).unwrap();
        assert_eq!(generators(&s).len(), 5);
        assert!(generators(&s).iter().all(|k| !matches!(k, GenKey::DeltaSep { .. })));
    }

    #[test]
    fn unstable_space_rejected() {
        assert!(Space::numbered(0, 2).is_err());
        assert!(Space::numbered(1, 0).is_err());
        assert!(MarkingSet::new([label("a"), label("a")]).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let s = Space::with_labels(1, ["p"]).unwrap();
        let u = TautClass::kappa1(&s);
        let v = TautClass::psi(&s, &label("p")).unwrap();
        assert_eq!(linear_arithmetic(&u, &v, &q(0)).unwrap(), u);
        assert!(linear_arithmetic(&u, &u, &q(-1)).unwrap().is_zero());
        assert_eq!(linear_arithmetic(&u, &v, &q(1)).unwrap().terms().len(), 2);
        let other = Space::numbered(1, 2).unwrap();
        assert!(linear_arithmetic(&u, &TautClass::kappa1(&other), &q(1)).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let s = Space::with_labels(1, ["p"]).unwrap();
        assert!(aggregate(&s, Aggregate::DeltaA(0)).is_zero());
        let s = Space::numbered(2, 0).unwrap();
        let total = aggregate(&s, Aggregate::DeltaTotal);
        assert_eq!(total.terms().len(), 2);
        assert_eq!(total.coeff(&sep(1, &[])), q(1));
        let s = Space::with_labels(1, ["p", "q"]).unwrap();
        let psi = aggregate(&s, Aggregate::PsiSum);
        assert_eq!(psi.coeff(&GenKey::Psi(label("q"))), q(1));
        // δ_1 on M̄_{2,{p,q}}: {p}/{q} and ∅/{p,q} each once
        let s = Space::with_labels(2, ["p", "q"]).unwrap();
        assert_eq!(aggregate(&s, Aggregate::DeltaA(1)).terms().len(), 2);
    }

    #[test]
    fn keystrings_round_trip() {
        for k in ["kappa1", "psi:x", "delta_irr", "delta:1:{}", "delta:0:{1,2}"] {
            assert_eq!(k.parse::<GenKey>().unwrap().to_string(), k);
        }
        assert!("delta:1:1,2".parse::<GenKey>().is_err());
        assert!("lambda".parse::<GenKey>().is_err());
    }

    #[test]
    fn class_json_round_trip() {
        let s = Space::numbered(1, 3).unwrap();
        let c = TautClass::delta_irr(&s)
            .plus_scaled(&TautClass::delta(&s, 1, &label_set(["1"])).unwrap(), &frac(-5, 6))
            .unwrap();
        let text = serde_json::to_string(&ClassJson::from(&c)).unwrap();
        assert!(text.contains("\"delta:0:{2,3}\""));
        assert!(text.contains("\"-5/6\""));
        assert_eq!(TautClass::from_json_str(&text).unwrap(), c);
    }

    fn space_strategy() -> impl Strategy<Value = Space> {
        (0u32..4, 0usize..6)
            .prop_filter("stable", |(g, n)| 2 * *g as i64 - 2 + *n as i64 > 0)
            .prop_map(|(g, n)| Space::numbered(g, n).unwrap())
    }

    proptest! {
        #[test]
        fn normalize_is_symmetric_and_idempotent(space in space_strategy(), a in -1i64..5, mask in 0u32..64) {
            let subset: LabelSet = space.labels().iter().enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1).map(|(_, l)| l.clone()).collect();
            let k = normalize_boundary(&space, a, &subset).unwrap();
            let g = space.g() as i64;
            prop_assert_eq!(&k, &normalize_boundary(&space, g - a, &space.complement(&subset)).unwrap());
            if let Some(GenKey::DeltaSep { a: ka, subset: ks }) = &k {
                prop_assert_eq!(&k, &normalize_boundary(&space, *ka as i64, ks).unwrap());
            }
        }

        #[test]
        fn generators_are_canonical_and_distinct(space in space_strategy()) {
            let gens = generators(&space);
            let set: BTreeSet<_> = gens.iter().collect();
            prop_assert_eq!(set.len(), gens.len());
            prop_assert!(gens.iter().all(|k| is_valid_key(&space, k)));
            prop_assert!(gens.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn arithmetic_is_commutative(c1 in -5i64..5, c2 in -5i64..5) {
            let s = Space::numbered(1, 2).unwrap();
            let u = TautClass::kappa1(&s).scaled(&q(c1));
            let v = TautClass::delta_irr(&s).plus_scaled(&TautClass::kappa1(&s), &q(c2)).unwrap();
            prop_assert_eq!(u.plus(&v).unwrap(), v.plus(&u).unwrap());
            prop_assert!(u.plus(&v).unwrap().minus(&v).unwrap() == u);
        }
    }
}

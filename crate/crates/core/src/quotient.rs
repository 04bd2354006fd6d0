//! Relations among the degree-two generators and the quotient `H²(M̄_{g,P})`
//! they present, with canonical coordinates from exact row reduction.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::linalg::Rref;
use crate::pullback::pullback_pi;
use crate::rational::{q, Q};
use crate::taut::{
    aggregate, generators, normalize_boundary, subsets, Aggregate, GenKey, Label, LabelSet, MarkingSet, Space, TautClass,
};

/// Classes asserted to vanish in `H²` of one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    pub space: Space,
    pub relations: Vec<TautClass>,
}

/// `Σ δ_{0,A}` over subsets `A` containing `inside` and missing `outside`.
fn genus0_sum(space: &Space, inside: &[&Label], outside: &[&Label], weight: impl Fn(&LabelSet) -> Q) -> TautClass {
    let mut out = TautClass::zero(space);
    for s in subsets(space.labels()) {
        if inside.iter().all(|l| s.contains(*l)) && outside.iter().all(|l| !s.contains(*l)) {
            if let Some(k) = normalize_boundary(space, 0, &s).expect("subset of markings") {
                out.add_canonical(k, weight(&s));
            }
        }
    }
    out
}

/// Keel's `Σ_{p,q ∈ A ∌ r,s} δ_{0,A}`.
fn keel_side(space: &Space, p: &Label, q_: &Label, r: &Label, s: &Label) -> TautClass {
    genus0_sum(space, &[p, q_], &[r, s], |_| q(1))
}

/// The two Keel relations attached to the ordered 4-tuple `(p, q, r, s)`.
pub fn keel_relations(space: &Space, p: &Label, q_: &Label, r: &Label, s: &Label) -> [TautClass; 2] {
    let base = keel_side(space, p, q_, r, s);
    [
        base.minus(&keel_side(space, p, r, q_, s)).expect("same space"),
        base.minus(&keel_side(space, p, s, q_, r)).expect("same space"),
    ]
}

/// `ψ_z − Σ_{z ∈ A, x,y ∉ A} δ_{0,A}` on a genus-zero space.
pub fn psi_relation(space: &Space, x: &Label, y: &Label, z: &Label) -> TautClass {
    let sum = genus0_sum(space, &[z], &[x, y], |_| q(1));
    TautClass::psi(space, z).expect("z is a marking").minus(&sum).expect("same space")
}

/// `κ₁ − Σ_{x,y ∉ A} (|A| − 1) δ_{0,A}` on a genus-zero space.
pub fn kappa_relation(space: &Space, x: &Label, y: &Label) -> TautClass {
    let sum = genus0_sum(space, &[], &[x, y], |s| q(s.len() as i64 - 1));
    TautClass::kappa1(space).minus(&sum).expect("same space")
}

/// Scales a class so that its first coefficient is positive.
fn sign_normalized(c: TautClass) -> TautClass {
    match c.terms().values().next() {
        Some(v) if v.is_negative() => c.scaled(&q(-1)),
        _ => c,
    }
}

fn two_smallest_except<'a>(space: &'a Space, z: &Label) -> Option<(&'a Label, &'a Label)> {
    let mut it = space.labels().iter().filter(|l| *l != z);
    Some((it.next()?, it.next()?))
}

fn genus0_relations(space: &Space) -> Vec<TautClass> {
    let labels: Vec<&Label> = space.labels().iter().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |c: TautClass, out: &mut Vec<TautClass>| {
        let c = sign_normalized(c);
        if !c.is_zero() && seen.insert(c.terms().clone().into_iter().collect::<Vec<_>>()) {
            out.push(c);
        }
    };
    for (i, p) in labels.iter().enumerate() {
        for (j, q_) in labels.iter().enumerate().skip(i + 1) {
            for (k, r) in labels.iter().enumerate().skip(j + 1) {
                for t in labels.iter().skip(k + 1) {
                    // the three ways of pairing up {p, q, r, t}; ordered choices only permute them
                    let sides = [keel_side(space, p, q_, r, t), keel_side(space, p, r, q_, t), keel_side(space, p, t, q_, r)];
                    for (u, v) in [(0, 1), (0, 2), (1, 2)] {
                        push(sides[u].minus(&sides[v]).expect("same space"), &mut out);
                    }
                }
            }
        }
    }
    for z in &labels {
        if let Some((x, y)) = two_smallest_except(space, z) {
            push(psi_relation(space, x, y, z), &mut out);
        }
    }
    let mut it = labels.iter();
    if let (Some(x), Some(y)) = (it.next(), it.next()) {
        push(kappa_relation(space, x, y), &mut out);
    }
    out.push(TautClass::delta_irr(space));
    out
}

fn genus1_relations(space: &Space) -> Vec<TautClass> {
    let psi = aggregate(space, Aggregate::PsiSum);
    let delta0 = aggregate(space, Aggregate::DeltaA(0));
    let mut out = vec![TautClass::kappa1(space).minus(&psi).unwrap().plus(&delta0).unwrap()];
    for p in space.labels() {
        let sum = genus0_sum(space, &[p], &[], |s| if s.len() >= 2 { q(12) } else { q(0) });
        let rel = TautClass::psi(space, p).unwrap().scaled(&q(12)).minus(&TautClass::delta_irr(space)).unwrap();
        out.push(rel.minus(&sum).unwrap());
    }
    out
}

/// `5κ₁ − 5ψ − δ_irr + 5δ₀ − 7δ₁`.
pub fn genus2_relation(space: &Space) -> TautClass {
    let terms = [
        (TautClass::kappa1(space), 5),
        (aggregate(space, Aggregate::PsiSum), -5),
        (TautClass::delta_irr(space), -1),
        (aggregate(space, Aggregate::DeltaA(0)), 5),
        (aggregate(space, Aggregate::DeltaA(1)), -7),
    ];
    terms.iter().fold(TautClass::zero(space), |acc, (c, k)| acc.plus_scaled(c, &q(*k)).unwrap())
}

pub fn relation_set(space: &Space) -> RelationSet {
    let relations = match space.g() {
        0 => genus0_relations(space),
        1 => genus1_relations(space),
        2 => vec![genus2_relation(space)],
        _ => Vec::new(),
    };
    RelationSet { space: space.clone(), relations }
}

/// `H²` of one space as generators modulo relations.
#[derive(Debug)]
pub struct QuotientSpace {
    space: Space,
    gens: Vec<GenKey>,
    index: HashMap<GenKey, usize>,
    relations: Vec<TautClass>,
    rref: Rref,
    basis: Vec<usize>,
}

impl QuotientSpace {
    pub fn build(space: &Space) -> Self {
        let gens = generators(space);
        let index: HashMap<GenKey, usize> = gens.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let relations = relation_set(space).relations;
        let rows = relations.iter().map(|r| dense(&index, gens.len(), r)).collect();
        let rref = Rref::from_matrix(gens.len(), rows);
        let basis = rref.free_columns();
        Self { space: space.clone(), gens, index, relations, rref, basis }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn generators(&self) -> &[GenKey] {
        &self.gens
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The relation set the quotient was built from.
    pub fn relations(&self) -> &[TautClass] {
        &self.relations
    }

    pub fn relations_rank(&self) -> usize {
        self.rref.rank()
    }

    pub fn rref(&self) -> &Rref {
        &self.rref
    }

    /// Generators whose classes form the quotient basis.
    pub fn basis_keys(&self) -> Vec<GenKey> {
        self.basis.iter().map(|&i| self.gens[i].clone()).collect()
    }

    /// Coefficient vector of a class over the full generator list.
    pub fn generator_vector(&self, x: &TautClass) -> Result<Vec<Q>> {
        self.check_space(x)?;
        Ok(dense(&self.index, self.gens.len(), x))
    }

    /// Coordinates of a class in the quotient basis.
    pub fn reduce(&self, x: &TautClass) -> Result<Vec<Q>> {
        let mut v = self.generator_vector(x)?;
        self.rref.reduce_in_place(&mut v);
        Ok(self.basis.iter().map(|&i| v[i].clone()).collect())
    }

    /// The class `Σ cᵢ bᵢ` over the basis generators.
    pub fn class_from_coords(&self, coords: &[Q]) -> TautClass {
        let mut c = TautClass::zero(&self.space);
        for (&i, v) in self.basis.iter().zip(coords) {
            c.add_canonical(self.gens[i].clone(), v.clone());
        }
        c
    }

    pub fn equal(&self, u: &TautClass, v: &TautClass) -> Result<bool> {
        Ok(self.reduce(u)? == self.reduce(v)?)
    }

    fn check_space(&self, x: &TautClass) -> Result<()> {
        if x.space() != &self.space {
            return invalid(format!("class on {} reduced in quotient of {}", x.space(), self.space));
        }
        Ok(())
    }
}

fn dense(index: &HashMap<GenKey, usize>, n: usize, x: &TautClass) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for (k, c) in x.terms() {
        v[index[k]] = c.clone();
    }
    v
}

/// Shared quotient for a space, built once per process.
pub fn quotient(space: &Space) -> Arc<QuotientSpace> {
    static MEMO: OnceLock<Mutex<HashMap<Space, Arc<QuotientSpace>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(found) = memo.lock().expect("memo lock").get(space) {
        return found.clone();
    }
    let built = Arc::new(QuotientSpace::build(space));
    memo.lock().expect("memo lock").entry(space.clone()).or_insert(built).clone()
}

pub fn reduce(x: &TautClass) -> Vec<Q> {
    quotient(x.space()).reduce(x).expect("class lives in its own space")
}

/// `dim H²(M̄_{g,n})` with markings `1..n`.
pub fn h2_dim(g: u32, n: usize) -> Result<usize> {
    Ok(quotient(&Space::numbered(g, n)?).dim())
}

/// `2^{n−1} − C(n,2) − 1`.
pub fn genus0_dim_closed_form(n: usize) -> usize {
    (1usize << (n - 1)) - n * (n - 1) / 2 - 1
}

/// `δ_{0,{y,z}}` and every `δ_{0,S}` with `x ∈ S`, `2 ≤ |S| ≤ |Q| − 3`, checked to be a basis.
pub fn canonical_basis_genus0(markings: &MarkingSet, x: &Label, y: &Label, z: &Label) -> Result<Vec<GenKey>> {
    if markings.len() < 4 {
        return invalid("canonical basis needs at least four labels");
    }
    if x == y || y == z || x == z || ![x, y, z].iter().all(|l| markings.contains(l)) {
        return invalid("x, y, z must be distinct markings");
    }
    let space = Space::new(0, markings.clone())?;
    let mut sets = vec![LabelSet::from([y.clone(), z.clone()])];
    sets.extend(subsets(space.labels()).into_iter().filter(|s| s.contains(x) && s.len() >= 2 && s.len() + 3 <= markings.len()));
    let keys: Vec<GenKey> = sets
        .iter()
        .map(|s| normalize_boundary(&space, 0, s).map(|k| k.expect("stable genus-zero boundary")))
        .collect::<Result<_>>()?;
    let quo = quotient(&space);
    let rows: Vec<Vec<Q>> = keys.iter().map(|k| quo.reduce(&TautClass::generator(&space, k).unwrap()).unwrap()).collect();
    if keys.len() != quo.dim() || Rref::from_matrix(quo.dim(), rows).rank() != quo.dim() {
        return Err(Error::InvalidInput("canonical basis is not a basis".into()));
    }
    Ok(keys)
}

/// Coefficients of `x` in a basis of its quotient given by generator keys.
pub fn express_in_basis(basis: &[GenKey], x: &TautClass) -> Result<Vec<Q>> {
    let quo = quotient(x.space());
    let k = basis.len();
    if k != quo.dim() {
        return invalid("basis size differs from the dimension");
    }
    let columns: Vec<Vec<Q>> =
        basis.iter().map(|b| TautClass::generator(x.space(), b).and_then(|c| quo.reduce(&c))).collect::<Result<_>>()?;
    let target = quo.reduce(x)?;
    let rows: Vec<Vec<Q>> = (0..k)
        .map(|j| columns.iter().map(|c| c[j].clone()).chain(std::iter::once(target[j].clone())).collect())
        .collect();
    let rref = Rref::from_matrix(k + 1, rows);
    if rref.pivots() != (0..k).collect::<Vec<_>>().as_slice() {
        return invalid("keys do not form a basis");
    }
    Ok(rref.rows().iter().map(|r| r[k].clone()).collect())
}

/// A class `w` in the span of `δ_{0,S}`, `x ∈ S`, `2 ≤ |S| ≤ |Q|−3`, such that
/// `δ_{0,{q,r}} − δ_{0,{p,r}} − w` is one Keel relation, so the two pair classes agree modulo that span.
pub fn pair_step_witness(space: &Space, x: &Label, p: &Label, q_: &Label, r: &Label) -> TautClass {
    let pair = |a: &Label, b: &Label| TautClass::delta(space, 0, &LabelSet::from([a.clone(), b.clone()])).unwrap();
    if p == q_ {
        return TautClass::zero(space);
    }
    let [rel, _] = keel_relations(space, x, p, q_, r);
    // rel = S(xp|qr) − S(xq|pr) contains +δ_{qr} and −δ_{pr}
    pair(q_, r).minus(&pair(p, r)).unwrap().minus(&rel).unwrap()
}

/// The chain `{a,b} → {a,z'} → {y,z}` with `z' ∈ {y,z}` outside `{a,b}`:
/// returns `w` with `δ_{0,{a,b}} ≡ δ_{0,{y,z}} + w` and `w` in the span of the `x`-containing basis classes.
pub fn pair_chain(space: &Space, x: &Label, y: &Label, z: &Label, a: &Label, b: &Label) -> TautClass {
    let (zp, other) = if a != z && b != z { (z, y) } else { (y, z) };
    // δ_{b,a} ≡ δ_{z',a}
    let step1 = pair_step_witness(space, x, zp, b, a);
    // δ_{a,z'} ≡ δ_{other,z'}
    let step2 = pair_step_witness(space, x, other, a, zp);
    step1.plus(&step2).unwrap()
}

/// A λ-coefficient together with an ordinary class; used only to eliminate `λ`.
#[derive(Clone, Debug)]
struct Extended {
    lambda: Q,
    class: TautClass,
}

impl Extended {
    fn pull_back(&self, fresh: &Label) -> Result<Extended> {
        Ok(Extended { lambda: self.lambda.clone(), class: pullback_pi(&self.class, fresh)? })
    }
}

fn pulled_to(seed: Extended, extra: &[&Label]) -> Result<Extended> {
    extra.iter().try_fold(seed, |acc, l| acc.pull_back(l))
}

/// Relations among ordinary generators implied by the λ-seeds, pulled back to
/// `space`, together with `κ₁ = 12λ − δ + ψ`; returned as a reduced basis of the λ-free part.
pub fn eliminate_lambda(space: &Space) -> Result<Vec<TautClass>> {
    let g = space.g();
    let mut seeds = Vec::new();
    match g {
        1 => {
            for p in space.labels() {
                let base = Space::new(1, MarkingSet::new([p.clone()])?)?;
                let rest: Vec<&Label> = space.labels().iter().filter(|l| *l != p).collect();
                let psi = Extended { lambda: q(-1), class: TautClass::psi(&base, p)? };
                let delta = Extended { lambda: q(12), class: TautClass::delta_irr(&base).scaled(&q(-1)) };
                seeds.push(pulled_to(psi, &rest)?);
                seeds.push(pulled_to(delta, &rest)?);
            }
        }
        2 => {
            let base = Space::new(2, MarkingSet::default())?;
            let d1 = TautClass::delta(&base, 1, &LabelSet::new())?;
            let class = TautClass::delta_irr(&base).plus_scaled(&d1, &q(2))?.scaled(&q(-1));
            let rest: Vec<&Label> = space.labels().iter().collect();
            seeds.push(pulled_to(Extended { lambda: q(10), class }, &rest)?);
        }
        _ => return Err(Error::UnsupportedGenus(g)),
    }
    let mumford = TautClass::kappa1(space)
        .plus(&aggregate(space, Aggregate::DeltaTotal))?
        .minus(&aggregate(space, Aggregate::PsiSum))?;
    seeds.push(Extended { lambda: q(-12), class: mumford });

    let quo_gens = generators(space);
    let index: HashMap<GenKey, usize> = quo_gens.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let rows: Vec<Vec<Q>> = seeds
        .iter()
        .map(|e| std::iter::once(e.lambda.clone()).chain(dense(&index, quo_gens.len(), &e.class)).collect())
        .collect();
    let rref = Rref::from_matrix(quo_gens.len() + 1, rows);
    Ok(rref
        .rows()
        .iter()
        .zip(rref.pivots())
        .filter(|(_, &p)| p != 0)
        .map(|(row, _)| {
            let mut c = TautClass::zero(space);
            for (k, v) in quo_gens.iter().zip(&row[1..]) {
                c.add_canonical(k.clone(), v.clone());
            }
            c
        })
        .collect())
}

/// Whether two lists of classes on one space span the same subspace of formal combinations.
pub fn same_relation_span(space: &Space, a: &[TautClass], b: &[TautClass]) -> bool {
    let gens = generators(space);
    let index: HashMap<GenKey, usize> = gens.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let rows = |cs: &[TautClass]| cs.iter().map(|c| dense(&index, gens.len(), c)).collect::<Vec<_>>();
    crate::linalg::same_span(gens.len(), &rows(a), &rows(b))
}

/// Ratio `c` with `a = c·b`, if the two classes are proportional and `b ≠ 0`.
pub fn proportionality(a: &TautClass, b: &TautClass) -> Option<Q> {
    let (k, v) = b.terms().iter().next()?;
    let c = a.coeff(k) / v;
    (a == &b.scaled(&c)).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::taut::{label, label_set};

    #[test]
    fn small_dimensions() {
        for (g, n, d) in [(0, 3, 0), (0, 4, 1), (0, 5, 5), (0, 6, 16), (1, 1, 1), (1, 2, 2), (1, 3, 5), (2, 0, 2), (3, 0, 3)] {
            assert_eq!(h2_dim(g, n).unwrap(), d, "g={g} n={n}");
        }
        assert!(h2_dim(1, 0).is_err());
    }

    #[test]
    fn relation_examples() {
        let s = Space::with_labels(1, ["p"]).unwrap();
        let rels = relation_set(&s).relations;
        let p = label("p");
        assert_eq!(rels[0], TautClass::kappa1(&s).minus(&TautClass::psi(&s, &p).unwrap()).unwrap());
        assert_eq!(rels[1], TautClass::psi(&s, &p).unwrap().scaled(&q(12)).minus(&TautClass::delta_irr(&s)).unwrap());

        let s = Space::numbered(2, 0).unwrap();
        let d1 = TautClass::delta(&s, 1, &LabelSet::new()).unwrap();
        let expected = TautClass::kappa1(&s).scaled(&q(5)).minus(&TautClass::delta_irr(&s)).unwrap().plus_scaled(&d1, &q(-7)).unwrap();
        assert_eq!(relation_set(&s).relations, vec![expected]);

        assert!(relation_set(&Space::numbered(3, 0).unwrap()).relations.is_empty());
    }

    #[test]
    fn genus0_kappa_and_psi_vanish_on_three_points() {
        let s = Space::numbered(0, 3).unwrap();
        assert!(reduce(&TautClass::kappa1(&s)).is_empty());
        assert_eq!(quotient(&s).dim(), 0);
    }

    #[test]
    fn keel_relations_for_every_tuple_vanish() {
        let s = Space::numbered(0, 6).unwrap();
        let labels: Vec<Label> = s.labels().iter().cloned().collect();
        let quo = quotient(&s);
        for p in &labels {
            for q_ in &labels {
                for r in &labels {
                    for t in &labels {
                        if BTreeSet::from([p, q_, r, t]).len() == 4 {
                            for rel in keel_relations(&s, p, q_, r, t) {
                                assert!(quo.reduce(&rel).unwrap().iter().all(Zero::is_zero));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn psi_and_kappa_relations_hold_for_any_choice() {
        let s = Space::numbered(0, 6).unwrap();
        let quo = quotient(&s);
        let labels: Vec<Label> = s.labels().iter().cloned().collect();
        for x in &labels {
            for y in &labels {
                if x == y {
                    continue;
                }
                assert!(quo.reduce(&kappa_relation(&s, x, y)).unwrap().iter().all(Zero::is_zero));
                for z in labels.iter().filter(|z| *z != x && *z != y) {
                    assert!(quo.reduce(&psi_relation(&s, x, y, z)).unwrap().iter().all(Zero::is_zero));
                }
            }
        }
    }

    #[test]
    fn canonical_basis_sizes() {
        for n in 4..=7 {
            let m = MarkingSet::numbered(n);
            let b = canonical_basis_genus0(&m, &label("1"), &label("2"), &label("3")).unwrap();
            assert_eq!(b.len(), genus0_dim_closed_form(n));
        }
        let m = MarkingSet::numbered(3);
        assert!(canonical_basis_genus0(&m, &label("1"), &label("2"), &label("3")).is_err());
        let m = MarkingSet::numbered(5);
        assert!(canonical_basis_genus0(&m, &label("1"), &label("1"), &label("3")).is_err());
    }

    #[test]
    fn pair_chain_lands_in_span() {
        let s = Space::numbered(0, 6).unwrap();
        let (x, y, z) = (label("1"), label("2"), label("3"));
        let basis = canonical_basis_genus0(s.markings(), &x, &y, &z).unwrap();
        let in_v = |k: &GenKey| match k {
            GenKey::DeltaSep { subset, .. } => {
                let side = if subset.contains(&x) { subset.clone() } else { s.complement(subset) };
                side.len() >= 2 && side.len() + 3 <= s.n()
            }
            _ => false,
        };
        let others: Vec<Label> = s.labels().iter().filter(|l| **l != x).cloned().collect();
        for a in &others {
            for b in others.iter().filter(|b| a < *b) {
                let w = pair_chain(&s, &x, &y, &z, a, b);
                assert!(w.terms().keys().all(in_v), "{a}{b}: {w}");
                let pair = TautClass::delta(&s, 0, &LabelSet::from([a.clone(), b.clone()])).unwrap();
                let yz = TautClass::delta(&s, 0, &LabelSet::from([y.clone(), z.clone()])).unwrap();
                assert!(quotient(&s).equal(&pair, &yz.plus(&w).unwrap()).unwrap());
                assert_eq!(express_in_basis(&basis, &pair).unwrap().len(), basis.len());
            }
        }
    }

    #[test]
    fn lambda_elimination_genus2() {
        let s = Space::numbered(2, 0).unwrap();
        let out = eliminate_lambda(&s).unwrap();
        assert_eq!(out.len(), 1);
        assert!(proportionality(&out[0], &genus2_relation(&s)).is_some());
        let s = Space::with_labels(2, ["p"]).unwrap();
        assert!(same_relation_span(&s, &eliminate_lambda(&s).unwrap(), &relation_set(&s).relations));
    }

    #[test]
    fn lambda_elimination_genus1() {
        let s = Space::with_labels(1, ["p"]).unwrap();
        let out = eliminate_lambda(&s).unwrap();
        let p = label("p");
        let k = TautClass::kappa1(&s).minus(&TautClass::psi(&s, &p).unwrap()).unwrap();
        assert!(same_relation_span(&s, &out, &relation_set(&s).relations));
        let mut with_k = out.clone();
        with_k.push(k);
        assert!(same_relation_span(&s, &out, &with_k));
        assert!(matches!(eliminate_lambda(&Space::numbered(3, 0).unwrap()), Err(Error::UnsupportedGenus(3))));
    }

    #[test]
    fn reduction_examples() {
        let s = Space::with_labels(1, ["p", "z"]).unwrap();
        let lhs = TautClass::delta(&s, 1, &LabelSet::new()).unwrap().minus(&TautClass::psi(&s, &label("z")).unwrap()).unwrap();
        let rhs = TautClass::delta_irr(&s).scaled(&frac(-1, 12));
        assert!(quotient(&s).equal(&lhs, &rhs).unwrap());

        let s = Space::with_labels(1, ["p", "x", "y"]).unwrap();
        let lhs = [
            (TautClass::delta_irr(&s), q(1)),
            (TautClass::psi(&s, &label("x")).unwrap(), q(-1)),
            (TautClass::psi(&s, &label("y")).unwrap(), q(-1)),
            (TautClass::delta(&s, 1, &label_set(["x"])).unwrap(), q(1)),
            (TautClass::delta(&s, 1, &label_set(["y"])).unwrap(), q(1)),
        ];
        let rhs = [
            (TautClass::delta_irr(&s), frac(5, 6)),
            (TautClass::delta(&s, 1, &label_set(["p"])).unwrap(), q(-2)),
            (TautClass::delta(&s, 1, &LabelSet::new()).unwrap(), q(-2)),
        ];
        let sum = |ts: &[(TautClass, Q)]| ts.iter().fold(TautClass::zero(&s), |acc, (c, k)| acc.plus_scaled(c, k).unwrap());
        assert!(quotient(&s).equal(&sum(&lhs), &sum(&rhs)).unwrap());
    }

    #[test]
    fn reduce_rejects_foreign_class() {
        let a = Space::numbered(1, 2).unwrap();
        let b = Space::numbered(1, 3).unwrap();
        assert!(quotient(&a).reduce(&TautClass::kappa1(&b)).is_err());
    }
}

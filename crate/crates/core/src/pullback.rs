//! Pullbacks along the forgetful map `π`, the non-separating gluing `ξ` and the
//! separating gluing `ϑ` onto a fixed complementary curve, on generators and on
//! quotient coordinates; boundary restriction, kernels and commuting-diagram checks.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use crate::error::{invalid, Result};
use crate::linalg::Rref;
use crate::quotient::quotient;
use crate::rational::{format_q, q, Q};
use crate::taut::{normalize_boundary, subsets, GenKey, Label, LabelSet, Space, TautClass};

/// One elementary map, described by the data it adds to the source.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MapStep {
    /// forget the point `q`
    Pi { q: Label },
    /// glue `q` to `r`
    Xi { q: Label, r: Label },
    /// glue `q` to a fixed curve of genus `g − a` carrying the complement of `subset`
    Theta { a: u32, subset: LabelSet, q: Label },
}

impl MapStep {
    pub fn kind(&self) -> &'static str {
        match self {
            MapStep::Pi { .. } => "pi",
            MapStep::Xi { .. } => "xi",
            MapStep::Theta { .. } => "theta",
        }
    }

    /// The space whose classes the pullback produces.
    pub fn target(&self, source: &Space) -> Result<Space> {
        match self {
            MapStep::Pi { q } => source.with_added(&[q]),
            MapStep::Xi { q, r } => {
                if source.g() == 0 {
                    return invalid("xi needs positive genus");
                }
                if q == r {
                    return invalid("xi needs two distinct labels");
                }
                let grown = source.with_added(&[q, r])?;
                Space::new(source.g() - 1, grown.markings().clone())
            }
            MapStep::Theta { a, subset, q } => {
                if source.labels().contains(q) {
                    return invalid(format!("label {q} is not fresh in {source}"));
                }
                if normalize_boundary(source, *a as i64, subset)?.is_none() {
                    return invalid(format!("theta({a}, {subset:?}) has an unstable side on {source}"));
                }
                let mut labels = subset.clone();
                labels.insert(q.clone());
                Space::new(*a, crate::taut::MarkingSet::new(labels)?)
            }
        }
    }

    pub fn apply(&self, x: &TautClass) -> Result<TautClass> {
        match self {
            MapStep::Pi { q } => pullback_pi(x, q),
            MapStep::Xi { q, r } => pullback_xi(x, q, r),
            MapStep::Theta { a, subset, q } => pullback_theta(x, *a, subset, q),
        }
    }
}

impl fmt::Display for MapStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapStep::Pi { q } => write!(f, "pi({q})"),
            MapStep::Xi { q, r } => write!(f, "xi({q},{r})"),
            MapStep::Theta { a, subset, q } => {
                let s: Vec<&str> = subset.iter().map(Label::as_str).collect();
                write!(f, "theta({a},{{{}}},{q})", s.join(","))
            }
        }
    }
}

fn linear_extension(x: &TautClass, target: &Space, image: impl Fn(&GenKey) -> Result<TautClass>) -> Result<TautClass> {
    let mut out = TautClass::zero(target);
    for (k, c) in x.terms() {
        out = out.plus_scaled(&image(k)?, c)?;
    }
    Ok(out)
}

fn with(set: &LabelSet, extra: &[&Label]) -> LabelSet {
    let mut s = set.clone();
    s.extend(extra.iter().map(|l| (*l).clone()));
    s
}

/// `π*` for the map forgetting `q`.
pub fn pullback_pi(x: &TautClass, q_: &Label) -> Result<TautClass> {
    let src = x.space();
    let tgt = MapStep::Pi { q: q_.clone() }.target(src)?;
    let psi_q = TautClass::psi(&tgt, q_)?;
    linear_extension(x, &tgt, |k| match k {
        GenKey::Kappa1 => TautClass::kappa1(&tgt).minus(&psi_q),
        GenKey::Psi(p) => TautClass::psi(&tgt, p)?.minus(&TautClass::delta(&tgt, 0, &LabelSet::from([p.clone(), q_.clone()]))?),
        GenKey::DeltaIrr => Ok(TautClass::delta_irr(&tgt)),
        GenKey::DeltaSep { a, subset } => {
            let d = TautClass::delta(&tgt, *a as i64, subset)?;
            if src.g() == 2 * a && src.labels().is_empty() {
                // δ_{a,∅} and δ_{a,{q}} are one divisor upstairs
                Ok(d)
            } else {
                d.plus(&TautClass::delta(&tgt, *a as i64, &with(subset, &[q_]))?)
            }
        }
    })
}

/// `ξ*` for the map gluing `q` to `r`.
pub fn pullback_xi(x: &TautClass, q_: &Label, r: &Label) -> Result<TautClass> {
    let src = x.space();
    let tgt = MapStep::Xi { q: q_.clone(), r: r.clone() }.target(src)?;
    linear_extension(x, &tgt, |k| match k {
        GenKey::Kappa1 => Ok(TautClass::kappa1(&tgt)),
        GenKey::Psi(p) => TautClass::psi(&tgt, p),
        GenKey::DeltaIrr => {
            let mut out = TautClass::delta_irr(&tgt).minus(&TautClass::psi(&tgt, q_)?)?.minus(&TautClass::psi(&tgt, r)?)?;
            for b_set in subsets(tgt.labels()).into_iter().filter(|s| s.contains(q_) && !s.contains(r)) {
                for b in 0..=tgt.g() as i64 {
                    out = out.plus(&TautClass::delta(&tgt, b, &b_set)?)?;
                }
            }
            Ok(out)
        }
        GenKey::DeltaSep { a, subset } => {
            let a = *a as i64;
            let d = TautClass::delta(&tgt, a, subset)?;
            if src.g() as i64 == 2 * a && src.labels().is_empty() {
                Ok(d)
            } else {
                d.plus(&TautClass::delta(&tgt, a - 1, &with(subset, &[q_, r]))?)
            }
        }
    })
}

/// `ϑ*` for the map attaching a fixed curve of genus `g − a` with markings `A^c`
/// at the new point `q` of a curve of genus `a` marked by `A ∪ {q}`.
pub fn pullback_theta(x: &TautClass, a: u32, subset: &LabelSet, q_: &Label) -> Result<TautClass> {
    let src = x.space();
    let tgt = MapStep::Theta { a, subset: subset.clone(), q: q_.clone() }.target(src)?;
    let own = normalize_boundary(src, a as i64, subset)?.expect("checked by target");
    let shift = a as i64 - src.g() as i64;
    let comp = src.complement(subset);
    let psi_q = TautClass::psi(&tgt, q_)?;
    linear_extension(x, &tgt, |k| match k {
        GenKey::Kappa1 => Ok(TautClass::kappa1(&tgt)),
        GenKey::Psi(p) => {
            if subset.contains(p) {
                TautClass::psi(&tgt, p)
            } else {
                Ok(TautClass::zero(&tgt))
            }
        }
        GenKey::DeltaIrr => Ok(TautClass::delta_irr(&tgt)),
        GenKey::DeltaSep { a: b, subset: b_set } => {
            let b = *b as i64;
            if comp.is_empty() {
                if *k == own {
                    TautClass::delta(&tgt, 2 * a as i64 - src.g() as i64, &with(subset, &[q_]))?.minus(&psi_q)
                } else {
                    TautClass::delta(&tgt, b, b_set)?.plus(&TautClass::delta(&tgt, b + shift, &with(b_set, &[q_]))?)
                }
            } else if *k == own {
                Ok(psi_q.scaled(&q(-1)))
            } else if b_set.is_subset(subset) {
                TautClass::delta(&tgt, b, b_set)
            } else if b_set.is_superset(&comp) {
                let rest: LabelSet = b_set.difference(&comp).cloned().collect();
                TautClass::delta(&tgt, b + shift, &with(&rest, &[q_]))
            } else {
                Ok(TautClass::zero(&tgt))
            }
        }
    })
}

/// A pullback realized as a matrix between quotient coordinates
/// (rows: target basis, columns: source basis).
#[derive(Clone, Debug)]
pub struct PullbackMap {
    pub step: MapStep,
    pub source: Space,
    pub target: Space,
    pub matrix: Vec<Vec<Q>>,
}

impl PullbackMap {
    pub fn build(source: &Space, step: MapStep) -> Result<Self> {
        let target = step.target(source)?;
        let (sq, tq) = (quotient(source), quotient(&target));
        let columns: Vec<Vec<Q>> = sq
            .basis_keys()
            .iter()
            .map(|k| tq.reduce(&step.apply(&TautClass::generator(source, k)?)?))
            .collect::<Result<_>>()?;
        let matrix = (0..tq.dim()).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
        Ok(Self { step, source: source.clone(), target, matrix })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.step.kind(),
            "source": {"g": self.source.g(), "n": self.source.n()},
            "target": {"g": self.target.g(), "n": self.target.n()},
            "matrix": self.matrix.iter().map(|r| r.iter().map(format_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// First source relation whose pullback does not vanish in the target quotient.
pub fn first_non_descending_relation(source: &Space, step: &MapStep) -> Result<Option<TautClass>> {
    let tq = quotient(&step.target(source)?);
    for rel in quotient(source).relations() {
        if tq.reduce(&step.apply(rel)?)?.iter().any(|v| !v.is_zero()) {
            return Ok(Some(rel.clone()));
        }
    }
    Ok(None)
}

/// An irreducible component of the boundary of `M̄_{g,P}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryComponent {
    Irr,
    /// canonical `(a, A)`
    Sep { a: u32, subset: LabelSet },
}

impl BoundaryComponent {
    /// Pullbacks onto the normalization of the component, in the order used for stacking.
    pub fn restriction_steps(&self, space: &Space) -> Vec<MapStep> {
        let fresh = space.fresh_labels(2);
        let (q_, r) = (fresh[0].clone(), fresh[1].clone());
        match self {
            BoundaryComponent::Irr => vec![MapStep::Xi { q: q_, r }],
            BoundaryComponent::Sep { a, subset } => vec![
                MapStep::Theta { a: *a, subset: subset.clone(), q: q_ },
                MapStep::Theta { a: space.g() - a, subset: space.complement(subset), q: r },
            ],
        }
    }
}

pub fn boundary_components(space: &Space) -> Vec<BoundaryComponent> {
    crate::taut::boundary_keys(space)
        .into_iter()
        .map(|k| match k {
            GenKey::DeltaSep { a, subset } => BoundaryComponent::Sep { a, subset },
            _ => BoundaryComponent::Irr,
        })
        .collect()
}

/// Pullback blocks stacked into one map from `H²(M̄_{g,P})`.
#[derive(Clone, Debug)]
pub struct StackedMap {
    pub source: Space,
    pub blocks: Vec<PullbackMap>,
}

impl StackedMap {
    pub fn new(source: &Space, steps: Vec<MapStep>) -> Result<Self> {
        let blocks = steps.into_iter().map(|s| PullbackMap::build(source, s)).collect::<Result<_>>()?;
        Ok(Self { source: source.clone(), blocks })
    }

    pub fn rows(&self) -> Vec<Vec<Q>> {
        self.blocks.iter().flat_map(|b| b.matrix.iter().cloned()).collect()
    }

    pub fn source_dim(&self) -> usize {
        quotient(&self.source).dim()
    }

    pub fn rank(&self) -> usize {
        Rref::from_matrix(self.source_dim(), self.rows()).rank()
    }

    pub fn kernel(&self) -> Kernel {
        let quo = quotient(&self.source);
        let basis = Rref::from_matrix(quo.dim(), self.rows()).kernel_basis();
        Kernel { basis: basis.iter().map(|v| quo.class_from_coords(v)).collect() }
    }
}

pub fn xi_map(space: &Space) -> Result<StackedMap> {
    let fresh = space.fresh_labels(2);
    StackedMap::new(space, vec![MapStep::Xi { q: fresh[0].clone(), r: fresh[1].clone() }])
}

pub fn boundary_restriction_matrix(space: &Space) -> Result<StackedMap> {
    let steps = boundary_components(space).iter().flat_map(|c| c.restriction_steps(space)).collect();
    StackedMap::new(space, steps)
}

/// Kernel of a stacked map as classes of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub basis: Vec<TautClass>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"dim": self.dim(), "basis": self.basis.iter().map(TautClass::to_json).collect::<Vec<_>>()})
    }
}

/// The range of degrees `k ≤ d(g,n)` controlled by the boundary.
pub fn d_bound(g: u32, n: usize) -> Result<i64> {
    Space::numbered(g, n)?;
    let (g, n) = (g as i64, n as i64);
    Ok(if g == 0 {
        n - 4
    } else if n == 0 {
        2 * g - 2
    } else {
        2 * g - 3 + n
    })
}

/// Outcome of comparing two chains of pullbacks generator by generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareReport {
    pub checked: usize,
    pub failure: Option<String>,
}

impl SquareReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn end_space(source: &Space, chain: &[MapStep]) -> Result<Space> {
    chain.iter().try_fold(source.clone(), |s, step| step.target(&s))
}

fn apply_chain(x: &TautClass, chain: &[MapStep]) -> Result<TautClass> {
    chain.iter().try_fold(x.clone(), |c, step| step.apply(&c))
}

/// Compares the two composite pullbacks on every source basis generator.
pub fn check_square(source: &Space, first: &[MapStep], second: &[MapStep]) -> Result<SquareReport> {
    let (e1, e2) = (end_space(source, first)?, end_space(source, second)?);
    if e1 != e2 {
        return invalid(format!("chains end in different spaces: {e1} vs {e2}"));
    }
    let tq = quotient(&e1);
    let keys = quotient(source).basis_keys();
    for k in &keys {
        let x = TautClass::generator(source, k)?;
        let (u, v) = (tq.reduce(&apply_chain(&x, first)?)?, tq.reduce(&apply_chain(&x, second)?)?);
        if u != v {
            let show = |w: &[Q]| w.iter().map(format_q).collect::<Vec<_>>().join(",");
            return Ok(SquareReport {
                checked: keys.len(),
                failure: Some(format!("generator {k}: [{}] vs [{}]", show(&u), show(&v))),
            });
        }
    }
    Ok(SquareReport { checked: keys.len(), failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::{psi_relation, kappa_relation, reduce};
    use crate::rational::frac;
    use crate::taut::{label, label_set};

    fn l(s: &str) -> Label {
        label(s)
    }

    #[test]
    fn pi_examples() {
        let s = Space::numbered(0, 3).unwrap();
        let out = pullback_pi(&TautClass::kappa1(&s), &l("q")).unwrap();
        let t = out.space().clone();
        assert_eq!(out, TautClass::kappa1(&t).minus(&TautClass::psi(&t, &l("q")).unwrap()).unwrap());

        let s = Space::with_labels(1, ["p"]).unwrap();
        let out = pullback_pi(&TautClass::psi(&s, &l("p")).unwrap(), &l("q")).unwrap();
        let t = out.space().clone();
        let expected = TautClass::psi(&t, &l("p")).unwrap().minus(&TautClass::delta(&t, 0, &label_set(["p", "q"])).unwrap()).unwrap();
        assert_eq!(out, expected);
        assert_eq!(pullback_pi(&TautClass::delta_irr(&s), &l("q")).unwrap(), TautClass::delta_irr(&t));
        assert!(pullback_pi(&TautClass::kappa1(&s), &l("p")).is_err());
    }

    #[test]
    fn xi_examples() {
        let s = Space::with_labels(1, ["p"]).unwrap();
        assert!(reduce(&pullback_xi(&TautClass::delta_irr(&s), &l("q"), &l("r")).unwrap()).iter().all(|v| v == &q(0)));

        let s = Space::numbered(2, 0).unwrap();
        let d = TautClass::delta(&s, 1, &LabelSet::new()).unwrap();
        let out = pullback_xi(&d, &l("q"), &l("r")).unwrap();
        assert_eq!(out, TautClass::delta(out.space(), 1, &LabelSet::new()).unwrap());
        assert_eq!(out.terms().len(), 1);

        assert!(pullback_xi(&TautClass::kappa1(&Space::numbered(0, 4).unwrap()), &l("q"), &l("r")).is_err());
        assert!(pullback_xi(&d, &l("q"), &l("q")).is_err());
    }

    #[test]
    fn theta_examples() {
        let s = Space::with_labels(2, ["p"]).unwrap();
        let d = TautClass::delta(&s, 1, &LabelSet::new()).unwrap();
        let out = pullback_theta(&d, 1, &label_set(["p"]), &l("q")).unwrap();
        let t = out.space().clone();
        let raw = TautClass::delta(&t, 0, &label_set(["p", "q"])).unwrap().minus(&TautClass::psi(&t, &l("q")).unwrap()).unwrap();
        assert_eq!(out, raw);
        assert_eq!(reduce(&out), reduce(&TautClass::delta_irr(&t).scaled(&frac(-1, 12))));

        let s = Space::with_labels(1, ["p", "x", "y"]).unwrap();
        let out = pullback_theta(&TautClass::psi(&s, &l("p")).unwrap(), 1, &label_set(["x"]), &l("q")).unwrap();
        assert!(out.is_zero());
        let out = pullback_theta(&TautClass::delta_irr(&s), 1, &label_set(["x"]), &l("q")).unwrap();
        assert_eq!(out, TautClass::delta_irr(out.space()));

        // a genus-0 side carrying one marking is unstable
        assert!(pullback_theta(&TautClass::kappa1(&s), 0, &label_set(["p"]), &l("q")).is_err());
    }

    #[test]
    fn components_and_bounds() {
        assert_eq!(boundary_components(&Space::numbered(1, 2).unwrap()).len(), 2);
        let c = boundary_components(&Space::numbered(0, 4).unwrap());
        assert_eq!(c.len(), 3);
        assert!(!c.contains(&BoundaryComponent::Irr));
        assert_eq!(
            boundary_components(&Space::numbered(2, 0).unwrap()),
            vec![BoundaryComponent::Irr, BoundaryComponent::Sep { a: 1, subset: LabelSet::new() }]
        );
        assert_eq!(d_bound(0, 6).unwrap(), 2);
        assert_eq!(d_bound(2, 0).unwrap(), 2);
        assert_eq!(d_bound(1, 1).unwrap(), 0);
        assert!(d_bound(0, 2).is_err());
    }

    #[test]
    fn pi_of_psi_relation_is_psi_relation() {
        let s = Space::numbered(0, 5).unwrap();
        let (x, y, z, fresh) = (l("1"), l("2"), l("3"), l("9"));
        let up = pullback_pi(&psi_relation(&s, &x, &y, &z), &fresh).unwrap();
        let t = up.space().clone();
        assert_eq!(up, psi_relation(&t, &x, &y, &z));
        let up = pullback_pi(&kappa_relation(&s, &x, &y), &fresh).unwrap();
        let expected = kappa_relation(&t, &x, &y).minus(&psi_relation(&t, &x, &y, &fresh)).unwrap();
        assert_eq!(up, expected);
    }

    #[test]
    fn relations_descend_on_small_spaces() {
        for (g, n) in [(0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (3, 0)] {
            let s = Space::numbered(g, n).unwrap();
            let fresh = s.fresh_labels(2);
            let mut steps = vec![MapStep::Pi { q: fresh[0].clone() }];
            if g > 0 {
                steps.push(MapStep::Xi { q: fresh[0].clone(), r: fresh[1].clone() });
            }
            for c in boundary_components(&s) {
                steps.extend(c.restriction_steps(&s).into_iter().filter(|st| matches!(st, MapStep::Theta { .. })));
            }
            for st in steps {
                assert_eq!(first_non_descending_relation(&s, &st).unwrap(), None, "{s} {st}");
            }
        }
    }

    #[test]
    fn xi_matrix_is_swap_symmetric() {
        let s = Space::numbered(1, 3).unwrap();
        let a = PullbackMap::build(&s, MapStep::Xi { q: l("q1"), r: l("q2") }).unwrap();
        let b = PullbackMap::build(&s, MapStep::Xi { q: l("q2"), r: l("q1") }).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn square_rejects_mismatched_chains() {
        let s = Space::with_labels(2, ["p"]).unwrap();
        let a = [MapStep::Pi { q: l("z") }];
        let b = [MapStep::Xi { q: l("x"), r: l("y") }];
        assert!(check_square(&s, &a, &b).is_err());
    }

    #[test]
    fn map_json_shape() {
        let s = Space::numbered(2, 0).unwrap();
        let m = PullbackMap::build(&s, MapStep::Xi { q: l("q1"), r: l("q2") }).unwrap();
        let j = m.to_json();
        assert_eq!(j["kind"], "xi");
        assert_eq!(j["target"]["g"], 1);
        assert_eq!(j["matrix"].as_array().unwrap().len(), 2);
    }
}

//! Named property suites over the supported grid of spaces, each check with
//! a command that reproduces it.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::euler::{
    betti_sum_genus0, chi_mbar_genus0, chi_mbar_genus1, chi_open_genus0, quotient_identities, stratified_ledger, Arrangement,
};
use crate::families::{
    builtin_fixtures, independence_cases, independence_report, keel_family_keys, keel_family_rank, keel_index, keel_relation_kill_check,
};
use crate::graph::{enumerate, one_edge_graphs, GraphCaps, StableGraph, Vertex};
use crate::linalg::rank;
use crate::pullback::{
    boundary_components, boundary_restriction_matrix, check_square, first_non_descending_relation, pullback_pi, pullback_theta,
    pullback_xi, xi_map, d_bound, MapStep, PullbackMap,
};
use crate::quotient::{
    canonical_basis_genus0, eliminate_lambda, express_in_basis, genus0_dim_closed_form, genus2_relation, keel_relations,
    kappa_relation, pair_chain, proportionality, psi_relation, quotient, relation_set, same_relation_span,
};
use crate::rational::{format_q, frac, q, Q};
use crate::taut::{
    boundary_keys, generators, label_set, linear_arithmetic, normalize_boundary, subsets, GenKey, Label, LabelSet, Space,
    TautClass,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Keel,
    Relations,
    Pullbacks,
    Squares,
    Kernels,
    Euler,
    Families,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 7] =
        [Suite::Keel, Suite::Relations, Suite::Pullbacks, Suite::Squares, Suite::Kernels, Suite::Euler, Suite::Families];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Keel => "keel",
            Suite::Relations => "relations",
            Suite::Pullbacks => "pullbacks",
            Suite::Squares => "squares",
            Suite::Kernels => "kernels",
            Suite::Euler => "euler",
            Suite::Families => "families",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::PARTS
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

/// Largest supported `n` for each genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_n: Vec<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_n: vec![8, 5, 4, 2] }
    }
}

impl Caps {
    pub fn check(&self, g: u32, n: usize) -> Result<()> {
        match self.max_n.get(g as usize) {
            Some(&m) if n <= m => Ok(()),
            Some(&m) => Err(Error::UnsupportedSize(format!("g={g} supports n <= {m}, got {n}"))),
            None => Err(Error::UnsupportedGenus(g)),
        }
    }

    /// Every stable `(g, n)` within the caps, by genus then `n`.
    pub fn spaces(&self) -> Vec<Space> {
        let mut out = Vec::new();
        for (g, &m) in self.max_n.iter().enumerate() {
            for n in 0..=m {
                if let Ok(s) = Space::numbered(g as u32, n) {
                    out.push(s);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    /// `Err` carries the reason for failure.
    pub outcome: std::result::Result<(), String>,
    pub repro: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn line(&self) -> String {
        match &self.outcome {
            Ok(()) => format!("ok\t{}\t{}", self.suite, self.name),
            Err(why) => format!("FAIL\t{}\t{}\t{}", self.suite, self.name, why),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn summary(&self) -> String {
        let k = self.checks.iter().filter(|c| c.passed()).count();
        match self.checks.iter().find(|c| !c.passed()) {
            None => format!("PASS {k}/{}", self.checks.len()),
            Some(c) => format!(
                "FAIL {k}/{}: {} {}: {}; reproduce with `{}`",
                self.checks.len(),
                c.suite,
                c.name,
                c.outcome.as_ref().unwrap_err(),
                c.repro
            ),
        }
    }
}

type Outcome = std::result::Result<(), String>;

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

struct Runner {
    suite: Suite,
    seed: u64,
    checks: Vec<Check>,
}

impl Runner {
    fn check(&mut self, name: impl Into<String>, repro: impl Into<String>, f: impl FnOnce() -> Result<Outcome>) {
        let outcome = f().unwrap_or_else(|e| Err(format!("error: {e}")));
        self.checks.push(Check { suite: self.suite, name: name.into(), outcome, repro: repro.into() });
    }

    fn suite_repro(&self) -> String {
        format!("taut verify --suite {} --seed {}", self.suite, self.seed)
    }
}

fn space_flags(s: &Space) -> String {
    format!("--g {} --n {}", s.g(), s.n())
}

pub const DEFAULT_SEED: u64 = 2718;

/// Runs a suite; `All` runs every part in order.
pub fn run(suite: Suite, seed: u64, caps: &Caps) -> Report {
    let parts: Vec<Suite> = if suite == Suite::All { Suite::PARTS.to_vec() } else { vec![suite] };
    let mut checks = Vec::new();
    for part in parts {
        let mut r = Runner { suite: part, seed, checks: Vec::new() };
        let mut rng = StdRng::seed_from_u64(seed);
        match part {
            Suite::Keel => keel(&mut r, caps),
            Suite::Relations => relations(&mut r, caps, &mut rng),
            Suite::Pullbacks => pullbacks(&mut r, caps),
            Suite::Squares => squares(&mut r),
            Suite::Kernels => kernels(&mut r, caps),
            Suite::Euler => euler(&mut r, &mut rng),
            Suite::Families => families(&mut r),
            Suite::All => unreachable!(),
        }
        checks.extend(r.checks);
    }
    Report { suite, seed, checks }
}

fn genus0_spaces(caps: &Caps) -> Vec<Space> {
    caps.spaces().into_iter().filter(|s| s.g() == 0).collect()
}

fn l(s: &str) -> Label {
    crate::taut::label(s)
}

fn keel(r: &mut Runner, caps: &Caps) {
    for s in genus0_spaces(caps) {
        let n = s.n();
        r.check(format!("dim closed form n={n}"), format!("taut dim --g 0 --n {n}"), || {
            let quo = quotient(&s);
            let rows: Vec<Vec<Q>> =
                quo.relations().iter().map(|x| quo.generator_vector(x).map(|mut v| { v.reverse(); v })).collect::<Result<_>>()?;
            let oracle = quo.generators().len() - rank(quo.generators().len(), rows);
            let closed = genus0_dim_closed_form(n);
            Ok(ensure(quo.dim() == closed && oracle == closed, || format!("rref {} oracle {oracle} closed form {closed}", quo.dim())))
        });
    }
    for s in genus0_spaces(caps).into_iter().filter(|s| (4..=7).contains(&s.n())) {
        let n = s.n();
        r.check(format!("every Keel tuple vanishes n={n}"), format!("taut relations --g 0 --n {n}"), || {
            let quo = quotient(&s);
            let labels: Vec<&Label> = s.labels().iter().collect();
            for p in &labels {
                for q_ in &labels {
                    for x in &labels {
                        for y in &labels {
                            if [p, q_, x, y].iter().collect::<std::collections::BTreeSet<_>>().len() < 4 {
                                continue;
                            }
                            for rel in keel_relations(&s, p, q_, x, y) {
                                if !is_zero_vec(&quo.reduce(&rel)?) {
                                    return Ok(Err(format!("tuple ({p},{q_},{x},{y}) survives")));
                                }
                            }
                        }
                    }
                }
            }
            Ok(Ok(()))
        });
    }
    for s in genus0_spaces(caps).into_iter().filter(|s| (4..=6).contains(&s.n())) {
        let n = s.n();
        r.check(format!("psi and kappa relations for every choice n={n}"), format!("taut relations --g 0 --n {n}"), || {
            let quo = quotient(&s);
            for x in s.labels() {
                for y in s.labels().iter().filter(|y| *y != x) {
                    if !is_zero_vec(&quo.reduce(&kappa_relation(&s, x, y))?) {
                        return Ok(Err(format!("kappa relation with {x},{y} survives")));
                    }
                    for z in s.labels().iter().filter(|z| *z != x && *z != y) {
                        if !is_zero_vec(&quo.reduce(&psi_relation(&s, x, y, z))?) {
                            return Ok(Err(format!("psi relation with {x},{y},{z} survives")));
                        }
                    }
                }
            }
            Ok(Ok(()))
        });
    }
    for s in genus0_spaces(caps).into_iter().filter(|s| s.n() >= 4) {
        let n = s.n();
        r.check(format!("canonical basis and pair chains n={n}"), format!("taut quotient --g 0 --n {n}"), || {
            let (x, y, z) = (l("1"), l("2"), l("3"));
            let basis = canonical_basis_genus0(s.markings(), &x, &y, &z)?;
            if basis.len() != genus0_dim_closed_form(n) {
                return Ok(Err(format!("basis has {} elements", basis.len())));
            }
            if n > 6 {
                return Ok(Ok(()));
            }
            let quo = quotient(&s);
            let yz = TautClass::delta(&s, 0, &LabelSet::from([y.clone(), z.clone()]))?;
            let others: Vec<&Label> = s.labels().iter().filter(|a| **a != x).collect();
            for a in &others {
                for b in others.iter().filter(|b| a < *b) {
                    let pair = TautClass::delta(&s, 0, &LabelSet::from([(*a).clone(), (*b).clone()]))?;
                    let w = pair_chain(&s, &x, &y, &z, a, b);
                    if !quo.equal(&pair, &yz.plus(&w)?)? {
                        return Ok(Err(format!("chain for {{{a},{b}}} is wrong")));
                    }
                    let coords = express_in_basis(&basis, &pair)?;
                    let back = basis.iter().zip(&coords).try_fold(TautClass::zero(&s), |acc, (k, c)| {
                        acc.plus_scaled(&TautClass::generator(&s, k)?, c)
                    })?;
                    if !quo.equal(&back, &pair)? {
                        return Ok(Err(format!("basis expansion of {{{a},{b}}} is wrong")));
                    }
                }
            }
            Ok(Ok(()))
        });
    }
    for s in genus0_spaces(caps).into_iter().filter(|s| s.n() <= 7) {
        let n = s.n();
        r.check(format!("pi pullback of psi and kappa relations n={n}"), format!("taut pullback --map pi --g 0 --n {n}"), || {
            let fresh = s.fresh_labels(1).remove(0);
            let labels: Vec<&Label> = s.labels().iter().collect();
            let (x, y, z) = (labels[0], labels[1], labels[2]);
            let up_psi = pullback_pi(&psi_relation(&s, x, y, z), &fresh)?;
            let t = up_psi.space().clone();
            if up_psi != psi_relation(&t, x, y, z) {
                return Ok(Err("pi* of the psi relation is not the psi relation".into()));
            }
            let up_kappa = pullback_pi(&kappa_relation(&s, x, y), &fresh)?;
            if up_kappa != kappa_relation(&t, x, y).minus(&psi_relation(&t, x, y, &fresh))? {
                return Ok(Err("pi* of the kappa relation differs from its substituted form".into()));
            }
            Ok(ensure(is_zero_vec(&quotient(&t).reduce(&up_kappa)?), || "pi* of the kappa relation survives".into()))
        });
    }
}

fn random_class(space: &Space, rng: &mut StdRng) -> TautClass {
    let mut c = TautClass::zero(space);
    for k in generators(space) {
        if rng.gen_bool(0.6) {
            let v = frac(rng.gen_range(-6..=6), rng.gen_range(1..=4));
            c.add_key(&k, &v).expect("generator of its own space");
        }
    }
    c
}

fn relations(r: &mut Runner, caps: &Caps, rng: &mut StdRng) {
    let small: Vec<Space> = caps.spaces().into_iter().filter(|s| s.n() <= 6).collect();
    for s in &small {
        r.check(format!("normalize_boundary symmetric and idempotent on {s}"), format!("taut generators {}", space_flags(s)), || {
            for a in 0..=s.g() as i64 {
                for sub in subsets(s.labels()) {
                    let k = normalize_boundary(s, a, &sub)?;
                    if k != normalize_boundary(s, s.g() as i64 - a, &s.complement(&sub))? {
                        return Ok(Err(format!("({a}, {sub:?}) and its complement disagree")));
                    }
                    if let Some(GenKey::DeltaSep { a: b, subset }) = &k {
                        if normalize_boundary(s, *b as i64, subset)? != k {
                            return Ok(Err(format!("{} is not a fixed point", k.unwrap())));
                        }
                    }
                }
            }
            Ok(Ok(()))
        });
    }
    for s in small.iter().filter(|s| s.g() <= GraphCaps::default().max_genus) {
        r.check(format!("generators match one-edge graphs on {s}"), format!("taut graphs {} --max-codim 1", space_flags(s)), || {
            let gens = generators(s);
            let distinct: std::collections::BTreeSet<&GenKey> = gens.iter().collect();
            let pairs = one_edge_graphs(s)?;
            let graph_keys: Vec<GenKey> = pairs.iter().map(|p| p.0.clone()).collect();
            let forms: std::collections::BTreeSet<_> = pairs.iter().map(|p| p.1.canonical_form()).collect();
            Ok(ensure(
                distinct.len() == gens.len()
                    && graph_keys == boundary_keys(s)
                    && forms.len() == pairs.len()
                    && gens.len() == 1 + s.n() + pairs.len() + usize::from(s.g() == 0),
                || format!("{} generators, {} one-edge graphs", gens.len(), pairs.len()),
            ))
        });
    }
    let repro = r.suite_repro();
    let trial_spaces: Vec<Space> =
        ["0:6", "1:3", "2:2", "3:1"].iter().filter_map(|t| t.split_once(':')).filter_map(|(g, n)| Space::numbered(g.parse().ok()?, n.parse().ok()?).ok()).collect();
    let trials: Vec<(TautClass, TautClass, TautClass, Q)> = (0..24)
        .map(|i| {
            let s = &trial_spaces[i % trial_spaces.len()];
            let c = frac(rng.gen_range(-5..=5), rng.gen_range(1..=3));
            (random_class(s, rng), random_class(s, rng), random_class(s, rng), c)
        })
        .collect();
    r.check("linear arithmetic is exact and canonical", repro.clone(), || {
        for (u, v, w, c) in &trials {
            let uv = u.plus(v)?;
            if uv != v.plus(u)? || uv.plus(w)? != u.plus(&v.plus(w)?)? {
                return Ok(Err(format!("addition not commutative or associative at {u}, {v}")));
            }
            if linear_arithmetic(u, v, c)?.plus_scaled(v, &-c)? != *u {
                return Ok(Err(format!("u + c v - c v != u at {u}")));
            }
            let rebuilt = u.terms().iter().rev().try_fold(TautClass::zero(u.space()), |acc, (k, x)| {
                acc.plus(&TautClass::generator(u.space(), k)?.scaled(x))
            })?;
            if rebuilt.terms() != u.terms() {
                return Ok(Err(format!("term map of {u} depends on insertion order")));
            }
        }
        Ok(Ok(()))
    });
    r.check("reduce is linear", repro, || {
        for (u, v, _, c) in &trials {
            let quo = quotient(u.space());
            let lhs = quo.reduce(&linear_arithmetic(u, v, c)?)?;
            let (ru, rv) = (quo.reduce(u)?, quo.reduce(v)?);
            let rhs: Vec<Q> = ru.iter().zip(&rv).map(|(a, b)| a + c * b).collect();
            if lhs != rhs {
                return Ok(Err(format!("reduce fails linearity on {}", u.space())));
            }
        }
        Ok(Ok(()))
    });
    for s in caps.spaces().into_iter().filter(|s| s.g() >= 1) {
        r.check(format!("dimension by two pivot orders on {s}"), format!("taut dim {}", space_flags(&s)), || {
            let quo = quotient(&s);
            let n = quo.generators().len();
            let rows: Vec<Vec<Q>> =
                quo.relations().iter().map(|x| quo.generator_vector(x).map(|mut v| { v.reverse(); v })).collect::<Result<_>>()?;
            let reversed = n - rank(n, rows);
            Ok(ensure(reversed == quo.dim(), || format!("leftmost pivots give {}, rightmost give {reversed}", quo.dim())))
        });
    }
    for (g, n, expected) in [(1, 1, 1), (1, 2, 2), (1, 3, 5), (2, 0, 2), (3, 0, 3)] {
        r.check(format!("h2 dimension of ({g},{n}) is {expected}"), format!("taut dim --g {g} --n {n}"), || {
            let d = quotient(&Space::numbered(g, n)?).dim();
            Ok(ensure(d == expected, || format!("got {d}")))
        });
    }
    r.check("lambda elimination on (2,{}) is proportional to the genus-2 relation", "taut relations --g 2 --n 0", || {
        let s = Space::numbered(2, 0)?;
        let out = eliminate_lambda(&s)?;
        Ok(ensure(out.len() == 1 && proportionality(&out[0], &genus2_relation(&s)).is_some(), || format!("{out:?}")))
    });
    for n in 1..=2 {
        r.check(format!("lambda elimination spans the relations on (2,{n})"), format!("taut relations --g 2 --n {n}"), || {
            let s = Space::numbered(2, n)?;
            Ok(ensure(same_relation_span(&s, &eliminate_lambda(&s)?, &relation_set(&s).relations), || "spans differ".into()))
        });
    }
    for n in 1..=3 {
        r.check(format!("genus-1 lambda seeds span the relations on (1,{n})"), format!("taut relations --g 1 --n {n}"), || {
            let s = Space::numbered(1, n)?;
            Ok(ensure(same_relation_span(&s, &eliminate_lambda(&s)?, &relation_set(&s).relations), || "spans differ".into()))
        });
    }
}

/// `π` with one fresh point, `ξ` when `g ≥ 1`, and every `ϑ` onto a boundary component.
pub fn map_steps(space: &Space) -> Vec<MapStep> {
    let fresh = space.fresh_labels(2);
    let mut steps = vec![MapStep::Pi { q: fresh[0].clone() }];
    if space.g() > 0 {
        steps.push(MapStep::Xi { q: fresh[0].clone(), r: fresh[1].clone() });
    }
    for c in boundary_components(space) {
        steps.extend(c.restriction_steps(space).into_iter().filter(|st| matches!(st, MapStep::Theta { .. })));
    }
    steps
}

fn step_repro(s: &Space, step: &MapStep) -> String {
    match step {
        MapStep::Theta { a, subset, .. } => format!(
            "taut pullback --map theta {} --a {a} --subset {}",
            space_flags(s),
            subset.iter().map(Label::as_str).collect::<Vec<_>>().join(",")
        ),
        _ => format!("taut pullback --map {} {}", step.kind(), space_flags(s)),
    }
}

fn pullbacks(r: &mut Runner, caps: &Caps) {
    for s in caps.spaces() {
        for step in map_steps(&s) {
            r.check(format!("relations descend along {step} from {s}"), step_repro(&s, &step), || {
                Ok(match first_non_descending_relation(&s, &step)? {
                    None => Ok(()),
                    Some(rel) => Err(format!("relation {rel} does not descend")),
                })
            });
        }
    }
    for s in caps.spaces().into_iter().filter(|s| s.g() >= 1 && s.n() <= 3) {
        r.check(format!("xi matrix is swap symmetric on {s}"), format!("taut pullback --map xi {}", space_flags(&s)), || {
            let f = s.fresh_labels(2);
            let a = PullbackMap::build(&s, MapStep::Xi { q: f[0].clone(), r: f[1].clone() })?;
            let b = PullbackMap::build(&s, MapStep::Xi { q: f[1].clone(), r: f[0].clone() })?;
            Ok(ensure(a.matrix == b.matrix, || "matrices differ".into()))
        });
    }
    r.check("theta matrices depend only on (a, A, q)", "taut pullback --map theta --g 2 --n 2 --a 1 --subset 1", || {
        let s = Space::numbered(2, 2)?;
        let step = MapStep::Theta { a: 1, subset: label_set(["1"]), q: l("q1") };
        let (a, b) = (PullbackMap::build(&s, step.clone())?, PullbackMap::build(&s, step)?);
        Ok(ensure(a.matrix == b.matrix && a.target == b.target, || "rebuilding changed the matrix".into()))
    });
    worked_identities(r);
}

fn worked_identities(r: &mut Runner) {
    r.check("xi* psi_p on (2,{p})", "taut pullback --map xi --g 2 --markings p", || {
        let s = Space::with_labels(2, ["p"])?;
        let up = pullback_xi(&TautClass::psi(&s, &l("p"))?, &l("x"), &l("y"))?;
        let t = up.space().clone();
        let rhs = TautClass::delta_irr(&t)
            .scaled(&frac(1, 12))
            .plus(&TautClass::delta(&t, 1, &label_set(["x"]))?)?
            .plus(&TautClass::delta(&t, 1, &label_set(["y"]))?)?
            .plus(&TautClass::delta(&t, 1, &LabelSet::new())?)?;
        Ok(ensure(quotient(&t).equal(&up, &rhs)?, || format!("got {up}")))
    });
    r.check("xi* delta_irr on (2,{p})", "taut pullback --map xi --g 2 --markings p", || {
        let s = Space::with_labels(2, ["p"])?;
        let up = pullback_xi(&TautClass::delta_irr(&s), &l("x"), &l("y"))?;
        let t = up.space().clone();
        let rhs = TautClass::delta_irr(&t)
            .scaled(&frac(5, 6))
            .plus_scaled(&TautClass::delta(&t, 1, &label_set(["p"]))?, &q(-2))?
            .plus_scaled(&TautClass::delta(&t, 1, &LabelSet::new())?, &q(-2))?;
        Ok(ensure(quotient(&t).equal(&up, &rhs)?, || format!("got {up}")))
    });
    r.check("theta* delta_1 = -delta_irr/12", "taut pullback --map theta --g 2 --markings p --a 1 --subset p", || {
        let s = Space::with_labels(2, ["p"])?;
        let up = pullback_theta(&TautClass::delta(&s, 1, &LabelSet::new())?, 1, &label_set(["p"]), &l("q"))?;
        let t = up.space().clone();
        Ok(ensure(quotient(&t).equal(&up, &TautClass::delta_irr(&t).scaled(&frac(-1, 12)))?, || format!("got {up}")))
    });
    r.check("xi* (delta_1,p + psi_q - psi_p) on (2,{p,q})", "taut pullback --map xi --g 2 --markings p,q", || {
        let s = Space::with_labels(2, ["p", "q"])?;
        let x = TautClass::delta(&s, 1, &label_set(["p"]))?
            .plus(&TautClass::psi(&s, &l("q"))?)?
            .minus(&TautClass::psi(&s, &l("p"))?)?;
        let up = pullback_xi(&x, &l("x"), &l("y"))?;
        let t = up.space().clone();
        let d = |ls: &[&str]| TautClass::delta(&t, 1, &label_set(ls.iter().copied()));
        let rhs = d(&["p"])?.scaled(&q(2)).plus(&d(&["p", "x"])?)?.plus(&d(&["p", "y"])?)?.minus(&d(&["q", "x"])?)?.minus(&d(&["q", "y"])?)?;
        Ok(ensure(quotient(&t).equal(&up, &rhs)?, || format!("got {up}")))
    });
}

/// The square `ϑ ∘ ξ = ξ ∘ ϑ` and the triangles through a genus-0 bridge or a
/// nested tail, as pairs of chains of steps from a source.
pub fn square_instances() -> Vec<(String, Space, Vec<MapStep>, Vec<MapStep>)> {
    let mut out = Vec::new();
    for g in [2u32, 3] {
        for labels in [vec![], vec!["p"], vec!["p", "t"]] {
            let Ok(s) = Space::with_labels(g, labels.iter().copied()) else { continue };
            let p = s.labels().clone();
            let mut pqr = p.clone();
            pqr.extend([l("q"), l("r")]);
            out.push((
                format!("theta/xi square on {s}"),
                s,
                vec![MapStep::Theta { a: g - 1, subset: p.clone(), q: l("s") }, MapStep::Xi { q: l("q"), r: l("r") }],
                vec![MapStep::Xi { q: l("q"), r: l("r") }, MapStep::Theta { a: g - 2, subset: pqr, q: l("s") }],
            ));
        }
    }
    for g in [2u32, 3] {
        for labels in [vec![], vec!["p"], vec!["p", "t"]] {
            let Ok(s) = Space::with_labels(g, labels.iter().copied()) else { continue };
            let p = s.labels().clone();
            out.push((
                format!("theta after xi triangle on {s}"),
                s,
                vec![MapStep::Xi { q: l("x"), r: l("y") }, MapStep::Theta { a: g - 1, subset: p.clone(), q: l("z") }],
                vec![MapStep::Theta { a: g - 1, subset: p, q: l("z") }],
            ));
        }
    }
    let s = Space::with_labels(2, ["1", "2", "3", "4"]).expect("stable");
    out.push((
        format!("nested theta triangle on {s}"),
        s,
        vec![MapStep::Theta { a: 2, subset: label_set(["1", "2"]), q: l("z") }, MapStep::Theta { a: 2, subset: label_set(["1"]), q: l("w") }],
        vec![MapStep::Theta { a: 2, subset: label_set(["1"]), q: l("w") }],
    ));
    out
}

fn squares(r: &mut Runner) {
    let repro = r.suite_repro();
    for (name, s, a, b) in square_instances() {
        r.check(name, repro.clone(), || {
            let rep = check_square(&s, &a, &b)?;
            Ok(match rep.failure {
                None => ensure(rep.checked > 0 || quotient(&s).dim() == 0, || "nothing checked".into()),
                Some(f) => Err(f),
            })
        });
    }
}

fn kernels(r: &mut Runner, caps: &Caps) {
    for n in 2..=5 {
        if caps.check(1, n).is_err() {
            continue;
        }
        r.check(format!("ker xi on (1,{n}) is spanned by delta_irr"), format!("taut kernel --map xi --g 1 --n {n}"), || {
            let s = Space::numbered(1, n)?;
            let k = xi_map(&s)?.kernel();
            let quo = quotient(&s);
            if k.dim() != 1 {
                return Ok(Err(format!("kernel has dimension {}", k.dim())));
            }
            let rows = vec![quo.reduce(&k.basis[0])?, quo.reduce(&TautClass::delta_irr(&s))?];
            Ok(ensure(rank(quo.dim(), rows) == 1, || format!("kernel vector {} is not a multiple of delta_irr", k.basis[0])))
        });
    }
    for (g, n) in [(2, 0), (2, 1), (2, 2), (3, 0)] {
        r.check(format!("ker xi on ({g},{n}) is zero"), format!("taut kernel --map xi --g {g} --n {n}"), || {
            let k = xi_map(&Space::numbered(g, n)?)?.kernel();
            Ok(ensure(k.dim() == 0, || format!("kernel has dimension {}", k.dim())))
        });
    }
    for s in caps.spaces() {
        let (g, n) = (s.g(), s.n());
        if d_bound(g, n).unwrap_or(0) < 2 {
            continue;
        }
        r.check(format!("boundary restriction is injective on ({g},{n})"), format!("taut kernel --map boundary --g {g} --n {n}"), || {
            let k = boundary_restriction_matrix(&s)?.kernel();
            Ok(ensure(k.dim() == 0, || format!("kernel has dimension {}", k.dim())))
        });
    }
}

fn random_insertion(graph: &StableGraph, rng: &mut StdRng) -> Result<StableGraph> {
    let vs = graph.vertices().to_vec();
    let (a, b) = (rng.gen_range(0..vs.len()), rng.gen_range(0..vs.len()));
    let mut es = graph.edges().to_vec();
    es.push((a, b));
    StableGraph::new(vs, es)
}

fn euler(r: &mut Runner, rng: &mut StdRng) {
    r.check("open genus-0 Euler characteristics -1, 2, -6", "taut euler --g 0 --n 6 --space open", || {
        let got = [chi_open_genus0(4)?, chi_open_genus0(5)?, chi_open_genus0(6)?];
        Ok(ensure(got == [-1, 2, -6], || format!("got {got:?}")))
    });
    r.check("quotient identities for the small open strata", r.suite_repro(), || {
        let bad: Vec<&str> = quotient_identities()?.into_iter().filter(|(_, ok)| !ok).map(|(n, _)| n).collect();
        Ok(ensure(bad.is_empty(), || bad.join("; ")))
    });
    r.check("compact (1,2) ledger", "taut euler --g 1 --n 2 --space compact --explain", || {
        let ledger = stratified_ledger(&Space::numbered(1, 2)?)?;
        let expected = vec![("M'_{0,4}".to_string(), 1), ("M_{1,1}".into(), 1), ("M_{1,2}".into(), 1), ("pt".into(), 2)];
        Ok(ensure(ledger.multiset() == expected && ledger.total() == 4 && chi_mbar_genus1(2)? == 4, || {
            format!("{:?} total {}", ledger.multiset(), ledger.total())
        }))
    });
    r.check("compact (1,3) ledger", "taut euler --g 1 --n 3 --space compact --explain", || {
        let ledger = stratified_ledger(&Space::numbered(1, 3)?)?;
        let expected: Vec<(String, usize)> = [
            ("M'_{0,4}", 6),
            ("M'_{0,5}", 1),
            ("M_{0,4}", 1),
            ("M_{1,1}", 3),
            ("M_{1,1} x M_{0,4}", 1),
            ("M_{1,2}", 3),
            ("M_{1,3}", 1),
            ("pt", 7),
        ]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b))
        .collect();
        Ok(ensure(ledger.multiset() == expected && ledger.total() == 12, || format!("{:?} total {}", ledger.multiset(), ledger.total())))
    });
    for n in [5, 6] {
        r.check(format!("compact (0,{n}) agrees with the Betti sum"), format!("taut euler --g 0 --n {n} --space compact"), || {
            let (chi, betti) = (chi_mbar_genus0(n)?, betti_sum_genus0(n)?);
            Ok(ensure(chi == betti, || format!("strata give {chi}, Betti numbers give {betti}")))
        });
    }
    r.check("braid arrangements recover the open genus-0 values", r.suite_repro(), || {
        let got = [Arrangement::braid(2).complement_chi().solve()?, Arrangement::braid(3).complement_chi().solve()?];
        Ok(ensure(got == [Some(chi_open_genus0(5)?), Some(chi_open_genus0(6)?)], || format!("got {got:?}")))
    });
    for (g, n, count) in [(0, 4, 4), (1, 2, 5), (1, 3, 23)] {
        r.check(format!("({g},{n}) has {count} stable graphs"), format!("taut graphs --g {g} --n {n}"), || {
            let got = enumerate(&Space::numbered(g, n)?, None)?.len();
            Ok(ensure(got == count, || format!("got {got}")))
        });
    }
    let caps = GraphCaps::default();
    let graph_spaces: Vec<Space> = (0..=caps.max_genus)
        .flat_map(|g| (0..=caps.max_markings).filter_map(move |n| Space::numbered(g, n).ok()))
        .filter(|s| s.g() + s.n() as u32 <= 6)
        .collect();
    for s in &graph_spaces {
        r.check(format!("codimension-one graphs of {s}"), format!("taut graphs {} --max-codim 1", space_flags(s)), || {
            let graphs = enumerate(s, Some(1))?;
            let keys = boundary_keys(s);
            if graphs.len() != 1 + keys.len() {
                return Ok(Err(format!("{} graphs for {} boundary keys", graphs.len(), keys.len())));
            }
            if s.g() == 0 {
                // unordered splittings {A, A^c} with both sides of size at least two
                let n = s.n();
                let splits = subsets(s.labels()).iter().filter(|a| a.len() >= 2 && n - a.len() >= 2).count() / 2;
                return Ok(ensure(splits == keys.len(), || format!("{splits} splittings")));
            }
            Ok(Ok(()))
        });
    }
    let small: Vec<Space> = graph_spaces.iter().filter(|s| 3 * s.g() as usize + s.n() <= 7).cloned().collect();
    let mut graphs: Vec<StableGraph> = Vec::new();
    for s in &small {
        graphs.extend(enumerate(s, None).unwrap_or_default());
    }
    let relabelled: Vec<(StableGraph, StableGraph)> = graphs
        .iter()
        .map(|g| {
            let mut order: Vec<usize> = (0..g.vertices().len()).collect();
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let vs: Vec<Vertex> = order.iter().map(|&i| g.vertices()[i].clone()).collect();
            let pos = |v: usize| order.iter().position(|&i| i == v).unwrap();
            let es = g.edges().iter().rev().map(|&(a, b)| (pos(b), pos(a))).collect();
            (g.clone(), StableGraph::new(vs, es).expect("relabelled graph"))
        })
        .collect();
    r.check("genus formula on every enumerated graph", r.suite_repro(), || {
        for (s, g) in small.iter().flat_map(|s| enumerate(s, None).unwrap_or_default().into_iter().map(move |g| (s.clone(), g))) {
            if g.genus()? != s.g() || !g.is_stable() || g.legs() != *s.labels() {
                return Ok(Err(format!("{} on {s}", g.canonical_form())));
            }
        }
        Ok(Ok(()))
    });
    r.check("genus and stability survive relabelling", r.suite_repro(), || {
        for (g, h) in &relabelled {
            if !g.is_isomorphic(h) || g.genus()? != h.genus()? || g.is_stable() != h.is_stable() {
                return Ok(Err(format!("{}", g.canonical_form())));
            }
            let c = g.canonical();
            if c.genus()? != g.genus()? || c.is_stable() != g.is_stable() {
                return Ok(Err(format!("canonical form of {}", g.canonical_form())));
            }
        }
        Ok(Ok(()))
    });
    let inserted: Vec<(StableGraph, StableGraph)> =
        graphs.iter().map(|g| (g.clone(), random_insertion(g, rng).expect("endpoints in range"))).collect();
    r.check("random edge insertions raise the genus by one", r.suite_repro(), || {
        for (g, h) in &inserted {
            if h.genus()? != g.genus()? + 1 || !h.is_stable() {
                return Ok(Err(format!("{} -> {}", g.canonical_form(), h.canonical_form())));
            }
        }
        Ok(Ok(()))
    });
}

fn families(r: &mut Runner) {
    for n in 3..=7 {
        r.check(format!("Keel family matrix n={n} has full rank"), "taut families", || {
            let (got, want) = (keel_family_rank(n)?, keel_index(n).len());
            Ok(ensure(got == want, || format!("rank {got} of {want}")))
        });
        r.check(format!("Keel family elimination n={n} kills every coefficient"), "taut families", || {
            let rep = keel_relation_kill_check(n)?;
            Ok(ensure(rep.all_zero, || rep.steps.join("; ")))
        });
    }
    for n in 3..=6 {
        r.check(format!("delta_(T+{{n+1,n+2}}) independent in H2 for n={n}"), format!("taut quotient --g 0 --n {}", n + 2), || {
            let (space, keys) = keel_family_keys(n)?;
            let quo = quotient(&space);
            let rows: Vec<Vec<Q>> = keys.iter().map(|k| quo.reduce(&TautClass::generator(&space, k)?)).collect::<Result<_>>()?;
            let got = rank(quo.dim(), rows);
            Ok(ensure(got == keys.len(), || format!("rank {got} of {}", keys.len())))
        });
    }
    for (fams, keys) in independence_cases() {
        let names: Vec<&str> = fams.iter().map(|f| f.name.as_str()).collect();
        let label = keys.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        r.check(format!("{} independent on {label}", names.join(", ")), "taut families", || {
            let rep = independence_report(&fams, &keys)?;
            Ok(ensure(rep.independent() && rep.excluded.is_empty(), || format!("rank {} of {}", rep.rank, rep.keys)))
        });
    }
    let fixtures = builtin_fixtures();
    // only families with enough recorded degrees to evaluate every relation
    for f in fixtures.iter().flat_map(|(_, fs)| fs) {
        let Some(degrees) = f.relation_degrees() else { continue };
        r.check(format!("family {} annihilates the relations", f.name), "taut families", || {
            Ok(match degrees.iter().find(|d| !d.is_zero()) {
                None => Ok(()),
                Some(bad) => Err(format!("relation has degree {bad}")),
            })
        });
    }
    r.check("singleton elimination step reads a_s = a_empty", "taut families", || {
        let rep = keel_relation_kill_check(3)?;
        let one = format!("a_{{1}} = {} a_{{}}", format_q(&Q::one()));
        Ok(ensure(rep.steps.first() == Some(&one), || format!("{:?}", rep.steps.first())))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::PARTS.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn caps_grid() {
        let caps = Caps::default();
        let spaces = caps.spaces();
        assert_eq!(spaces.len(), 6 + 5 + 5 + 3);
        assert!(caps.check(0, 9).is_err());
        assert!(matches!(caps.check(4, 0), Err(Error::UnsupportedGenus(4))));
    }

    #[test]
    fn squares_and_families_pass() {
        for suite in [Suite::Squares, Suite::Families] {
            let rep = run(suite, DEFAULT_SEED, &Caps::default());
            assert!(rep.passed(), "{}", rep.summary());
        }
    }

    #[test]
    fn failure_summary_names_a_repro() {
        let rep = Report {
            suite: Suite::Keel,
            seed: 1,
            checks: vec![Check { suite: Suite::Keel, name: "x".into(), outcome: Err("bad".into()), repro: "taut dim --g 0 --n 5".into() }],
        };
        assert_eq!(rep.summary(), "FAIL 0/1: keel x: bad; reproduce with `taut dim --g 0 --n 5`");
    }
}

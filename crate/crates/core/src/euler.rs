//! Euler characteristics of open moduli spaces, of a few finite quotients of
//! them, and of compactifications by summing over the strata of graph type.

use std::collections::BTreeSet;

use crate::error::{invalid, Error, Result};
use crate::graph::{enumerate, StableGraph, StratumFactors};
use crate::linalg::Rref;
use crate::rational::q;
use crate::taut::Space;

/// `χ(M_{0,n})` from `χ(M_{0,3}) = 1` and `χ(M_{0,n+1}) = (2 − n) χ(M_{0,n})`.
pub fn chi_open_genus0(n: usize) -> Result<i64> {
    if n < 3 {
        return invalid(format!("M_0,{n} is unstable"));
    }
    Ok((3..n).fold(1i64, |chi, k| (2 - k as i64) * chi))
}

pub const CHI_M11: i64 = 1;
pub const CHI_M12: i64 = 1;
pub const CHI_M13: i64 = 0;
/// `M_{0,4}` modulo exchanging two points.
pub const CHI_M04_SWAP: i64 = 0;
/// `M_{0,5}` modulo exchanging two points.
pub const CHI_M05_SWAP: i64 = 1;
/// `M_{0,5}` modulo permuting three points.
pub const CHI_M05_S3: i64 = 1;
/// The open part of `M_{1,3}` where the involution about `p_3` moves `p_1`, `p_2` apart.
pub const CHI_U13: i64 = -2;

/// `χ(M_{g,n})` where known.
pub fn chi_open(g: u32, n: usize) -> Result<i64> {
    match (g, n) {
        (0, _) => chi_open_genus0(n),
        (1, 1) => Ok(CHI_M11),
        (1, 2) => Ok(CHI_M12),
        (1, 3) => Ok(CHI_M13),
        _ => Err(Error::UnsupportedSize(format!("no Euler characteristic for M_{g},{n}"))),
    }
}

/// A stratum's Euler characteristic with a readable name for the space it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumChi {
    pub descriptor: String,
    pub chi: i64,
}

fn open_name(g: u32, n: usize) -> String {
    format!("M_{{{g},{n}}}")
}

/// Identifies the stratum of a graph with a product of open moduli spaces or one of the tabulated quotients.
pub fn stratum_chi(sf: &StratumFactors) -> Result<StratumChi> {
    let positive: Vec<usize> = (0..sf.factors.len()).filter(|&v| sf.factors[v].dim() > 0).collect();
    if positive.is_empty() {
        return Ok(StratumChi { descriptor: "pt".into(), chi: 1 });
    }
    let unsupported = || Error::UnsupportedSize(format!("stratum {} has no tabulated Euler characteristic", sf.graph.canonical_form()));
    let mut actions = Vec::new();
    for &v in &positive {
        let action = sf.induced_action(v).ok_or_else(unsupported)?;
        if action.len() > 1 {
            actions.push((v, action));
        }
    }
    match actions.as_slice() {
        [] => {
            let mut parts: Vec<(u32, usize)> = positive.iter().map(|&v| (sf.factors[v].genus, sf.factors[v].points)).collect();
            parts.sort_by(|a, b| b.cmp(a));
            let chi = parts.iter().map(|&(g, n)| chi_open(g, n)).product::<Result<i64>>()?;
            let descriptor = parts.iter().map(|&(g, n)| open_name(g, n)).collect::<Vec<_>>().join(" x ");
            Ok(StratumChi { descriptor, chi })
        }
        [(v, action)] if positive.len() == 1 => {
            let f = &sf.factors[*v];
            match (f.genus, f.points, action_shape(action)) {
                (0, 4, Shape::Swap) => Ok(StratumChi { descriptor: "M'_{0,4}".into(), chi: CHI_M04_SWAP }),
                (0, 5, Shape::Swap) => Ok(StratumChi { descriptor: "M'_{0,5}".into(), chi: CHI_M05_SWAP }),
                (0, 5, Shape::Symmetric3) => Ok(StratumChi { descriptor: "M''_{0,5}".into(), chi: CHI_M05_S3 }),
                _ => Err(unsupported()),
            }
        }
        _ => Err(unsupported()),
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Shape {
    Swap,
    Symmetric3,
    Other,
}

fn action_shape(action: &BTreeSet<Vec<usize>>) -> Shape {
    let moved = |p: &Vec<usize>| p.iter().enumerate().filter(|(i, x)| i != *x).count();
    let nontrivial: Vec<&Vec<usize>> = action.iter().filter(|p| moved(p) > 0).collect();
    match nontrivial.len() {
        1 if moved(nontrivial[0]) == 2 => Shape::Swap,
        5 => {
            let support: BTreeSet<usize> =
                nontrivial.iter().flat_map(|p| p.iter().enumerate().filter(|(i, x)| i != *x).map(|(i, _)| i)).collect();
            if support.len() == 3 {
                Shape::Symmetric3
            } else {
                Shape::Other
            }
        }
        _ => Shape::Other,
    }
}

/// One line of a stratified Euler characteristic sum.
#[derive(Clone, Debug)]
pub struct LedgerLine {
    pub graph: StableGraph,
    pub stratum: StratumChi,
}

#[derive(Clone, Debug)]
pub struct EulerLedger {
    pub lines: Vec<LedgerLine>,
}

impl EulerLedger {
    pub fn total(&self) -> i64 {
        self.lines.iter().map(|l| l.stratum.chi).sum()
    }

    /// Descriptors with multiplicities, sorted by descriptor.
    pub fn multiset(&self) -> Vec<(String, usize)> {
        let mut names: Vec<String> = self.lines.iter().map(|l| l.stratum.descriptor.clone()).collect();
        names.sort();
        let mut out: Vec<(String, usize)> = Vec::new();
        for n in names {
            match out.last_mut() {
                Some((last, c)) if *last == n => *c += 1,
                _ => out.push((n, 1)),
            }
        }
        out
    }

    /// `canonical form \t χ \t running total` rows.
    pub fn to_tsv(&self) -> String {
        let mut total = 0;
        let mut s = String::from("graph\tstratum\tchi\tcontribution\n");
        for l in &self.lines {
            total += l.stratum.chi;
            s.push_str(&format!("{}\t{}\t{}\t{}\n", l.graph.canonical_form(), l.stratum.descriptor, l.stratum.chi, total));
        }
        s
    }
}

pub fn stratified_ledger(space: &Space) -> Result<EulerLedger> {
    let lines = enumerate(space, None)?
        .into_iter()
        .map(|graph| Ok(LedgerLine { stratum: stratum_chi(&graph.stratum_factors())?, graph }))
        .collect::<Result<_>>()?;
    Ok(EulerLedger { lines })
}

pub const GENUS0_COMPACT_CAP: usize = 7;

/// Strata of `M̄_{g,n}` with their Euler characteristics, for `g = 0`, `n ≤ 7`
/// and `g = 1`, `n ≤ 3`.
pub fn compact_ledger(space: &Space) -> Result<EulerLedger> {
    let (g, n) = (space.g(), space.n());
    let graphs = match g {
        0 if n <= GENUS0_COMPACT_CAP => crate::graph::enumerate_with_caps(
            space,
            None,
            crate::graph::GraphCaps { max_genus: 0, max_markings: GENUS0_COMPACT_CAP },
        )?,
        1 if n <= 3 => enumerate(space, None)?,
        _ => return Err(Error::UnsupportedSize(format!("no compact Euler characteristic for g={g}, n={n}"))),
    };
    let lines = graphs
        .into_iter()
        .map(|graph| Ok(LedgerLine { stratum: stratum_chi(&graph.stratum_factors())?, graph }))
        .collect::<Result<_>>()?;
    Ok(EulerLedger { lines })
}

/// `χ(M̄_{0,n})` as a sum over strata.
pub fn chi_mbar_genus0(n: usize) -> Result<i64> {
    Ok(compact_ledger(&Space::numbered(0, n)?)?.total())
}

/// `χ(M̄_{1,n})` as a sum over strata, `n ≤ 3`.
pub fn chi_mbar_genus1(n: usize) -> Result<i64> {
    Ok(compact_ledger(&Space::numbered(1, n)?)?.total())
}

/// The identities relating the quotient values to `χ(M_{0,n})` and the
/// decompositions of `M_{1,2}` and `M_{1,3}`, each with its outcome.
pub fn quotient_identities() -> Result<Vec<(&'static str, bool)>> {
    let (m4, m5, m6) = (chi_open_genus0(4)?, chi_open_genus0(5)?, chi_open_genus0(6)?);
    Ok(vec![
        // degree-2 cover with one fiber of one point
        ("chi(M_0,4) = 2 chi(M'_0,4) - 1", m4 == 2 * CHI_M04_SWAP - 1),
        // unramified degree-2 cover
        ("chi(M_0,5) = 2 chi(M'_0,5)", m5 == 2 * CHI_M05_SWAP),
        // degree 6 with one fiber of two points
        ("chi(M_0,5) = 6 chi(M''_0,5) - 4", m5 == 6 * CHI_M05_S3 - 4),
        ("chi(M_1,2) = chi(M''_0,5) + chi(M'_0,4)", CHI_M12 == CHI_M05_S3 + CHI_M04_SWAP),
        ("chi(U) = (2/6) chi(M_0,6)", 6 * CHI_U13 == 2 * m6),
        ("chi(M_1,3) = chi(U) + 2 chi(M'_0,5) + chi(M''_0,5) + chi(M_0,4)", CHI_M13 == CHI_U13 + 2 * CHI_M05_SWAP + CHI_M05_S3 + m4),
    ])
}

/// A space cut into locally closed pieces: `χ(total) = Σ count · χ(piece)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub total: i64,
    /// `(name, count, χ)`; at most one `χ` may be unknown.
    pub pieces: Vec<(String, i64, Option<i64>)>,
}

impl Filtration {
    /// The unknown χ forced by additivity, or `None` when every piece is known.
    pub fn solve(&self) -> Result<Option<i64>> {
        let unknown: Vec<usize> = (0..self.pieces.len()).filter(|&i| self.pieces[i].2.is_none()).collect();
        let known: i64 = self.pieces.iter().filter_map(|(_, c, x)| x.map(|x| c * x)).sum();
        match unknown.as_slice() {
            [] => Ok(None),
            [i] => {
                let count = self.pieces[*i].1;
                let rest = self.total - known;
                if count == 0 || rest % count != 0 {
                    return invalid("unknown piece is not determined by additivity");
                }
                Ok(Some(rest / count))
            }
            _ => invalid("more than one unknown piece"),
        }
    }

    /// Whether the pieces add up, for fully known filtrations.
    pub fn is_additive(&self) -> bool {
        self.pieces.iter().all(|p| p.2.is_some())
            && self.total == self.pieces.iter().map(|(_, c, x)| c * x.unwrap()).sum::<i64>()
    }
}

/// Flats of the arrangement `x_i = 0`, `x_i = x_j` in `ℙ^m`, grouped by dimension.
#[derive(Clone, Debug)]
pub struct Arrangement {
    pub dim: usize,
    /// `flats[k]`: the flats of projective dimension `k`, each given by its defining equations.
    pub flats: Vec<Vec<Rref>>,
}

impl Arrangement {
    pub fn braid(m: usize) -> Self {
        let n = m + 1;
        let mut hyperplanes = Vec::new();
        for i in 0..n {
            let mut v = vec![q(0); n];
            v[i] = q(1);
            hyperplanes.push(v);
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut v = vec![q(0); n];
                v[i] = q(1);
                v[j] = q(-1);
                hyperplanes.push(v);
            }
        }
        let mut by_rank: Vec<Vec<Rref>> = vec![Vec::new(); n];
        let mut frontier: Vec<Rref> = hyperplanes.iter().map(|h| Rref::from_matrix(n, vec![h.clone()])).collect();
        frontier.sort_by(|a, b| a.rows().cmp(b.rows()));
        frontier.dedup();
        while let Some(first) = frontier.first() {
            let rank = first.rank();
            if rank >= n {
                break;
            }
            by_rank[rank] = frontier.clone();
            let mut next: Vec<Rref> = Vec::new();
            for f in &frontier {
                for h in &hyperplanes {
                    let mut g = f.clone();
                    if g.insert(h.clone()) && !next.contains(&g) {
                        next.push(g);
                    }
                }
            }
            next.sort_by(|a, b| a.rows().cmp(b.rows()));
            frontier = next;
        }
        // projective dimension of a rank-r flat in ℙ^m is m − r
        let flats = (0..n).map(|k| if k < m { by_rank[m - k].clone() } else { Vec::new() }).collect();
        Self { dim: m, flats }
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..self.dim).map(|k| self.flats[k].len()).collect()
    }

    /// `χ(F°)` for each flat: `F` minus the flats strictly inside it.
    pub fn open_chis(&self) -> Vec<Vec<i64>> {
        let mut chis: Vec<Vec<i64>> = Vec::new();
        for k in 0..self.dim {
            let row = self.flats[k]
                .iter()
                .map(|f| {
                    let inside: i64 = (0..k)
                        .flat_map(|j| self.flats[j].iter().zip(&chis[j]).filter(|(g, _)| contains_flat(g, f)).map(|(_, c)| *c))
                        .sum();
                    k as i64 + 1 - inside
                })
                .collect();
            chis.push(row);
        }
        chis
    }

    /// `χ` of the complement of all hyperplanes.
    pub fn complement_chi(&self) -> Filtration {
        let chis = self.open_chis();
        let mut pieces = vec![("complement".to_string(), 1, None)];
        for k in (0..self.dim).rev() {
            let distinct: BTreeSet<i64> = chis[k].iter().copied().collect();
            for c in distinct {
                let count = chis[k].iter().filter(|x| **x == c).count() as i64;
                pieces.push((format!("open flats of dimension {k}"), count, Some(c)));
            }
        }
        Filtration { total: self.dim as i64 + 1, pieces }
    }
}

/// Whether the flat cut out by `small` lies inside the flat cut out by `big`.
fn contains_flat(small: &Rref, big: &Rref) -> bool {
    big.rows().iter().all(|r| small.contains(r))
}

/// `1 + h² + h⁴ + …` for `M̄_{0,n}`, `n ≤ 6`, from the `H²` dimension with odd cohomology vanishing and duality.
pub fn betti_sum_genus0(n: usize) -> Result<i64> {
    let h2 = crate::quotient::h2_dim(0, n)? as i64;
    match n {
        3 => Ok(1),
        4 => Ok(2),
        5 => Ok(2 + h2),
        6 => Ok(2 + 2 * h2),
        _ => Err(Error::UnsupportedSize(format!("Betti sum needs 3 <= n <= 6, got {n}"))),
    }
}

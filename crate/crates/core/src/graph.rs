//! Stable dual graphs with labelled legs: genus, stability, canonical forms,
//! enumeration up to isomorphism, and automorphisms fixing the legs.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::taut::{boundary_keys, normalize_boundary, GenKey, Label, LabelSet, Space};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub genus: u32,
    pub legs: LabelSet,
}

/// Vertices with genera and legs; edge `i` joins `edges[i].0` to `edges[i].1`
/// through half-edges `2i` and `2i + 1`. Loops are edges with equal ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StableGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
}

/// Isomorphism invariant: the lexicographically least relabelled presentation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
}

impl std::fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let vs: Vec<String> = self
            .vertices
            .iter()
            .map(|v| format!("{}[{}]", v.genus, v.legs.iter().map(Label::as_str).collect::<Vec<_>>().join(",")))
            .collect();
        let es: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "{};{}", vs.join(" "), es.join(" "))
    }
}

impl StableGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertices.is_empty() {
            return invalid("graph without vertices");
        }
        if edges.iter().any(|&(a, b)| a >= vertices.len() || b >= vertices.len()) {
            return invalid("edge endpoint out of range");
        }
        let mut seen = LabelSet::new();
        for v in &vertices {
            for l in &v.legs {
                if !seen.insert(l.clone()) {
                    return invalid(format!("leg {l} appears twice"));
                }
            }
        }
        Ok(Self { vertices, edges })
    }

    /// The one-vertex graph of the open stratum.
    pub fn trivial(space: &Space) -> Self {
        Self { vertices: vec![Vertex { genus: space.g(), legs: space.labels().clone() }], edges: Vec::new() }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn codim(&self) -> usize {
        self.edges.len()
    }

    pub fn legs(&self) -> LabelSet {
        self.vertices.iter().flat_map(|v| v.legs.iter().cloned()).collect()
    }

    /// Half-edge ids at vertex `v`, in increasing order.
    pub fn half_edges(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            if a == v {
                out.push(2 * i);
            }
            if b == v {
                out.push(2 * i + 1);
            }
        }
        out
    }

    pub fn half_edge_vertex(&self, h: usize) -> usize {
        let (a, b) = self.edges[h / 2];
        if h.is_multiple_of(2) {
            a
        } else {
            b
        }
    }

    /// `l_v`: legs plus half-edges at `v`.
    pub fn valence(&self, v: usize) -> usize {
        self.vertices[v].legs.len() + self.half_edges(v).len()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// `Σ g_v + 1 − |V| + |E|`.
    pub fn genus(&self) -> Result<u32> {
        if !self.is_connected() {
            return invalid("graph is not connected");
        }
        let sum: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        Ok((sum + 1 - self.vertices.len() as i64 + self.edges.len() as i64) as u32)
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 > 0)
    }

    fn loops(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count()
    }

    fn invariant(&self, v: usize) -> (u32, LabelSet, usize, usize) {
        (self.vertices[v].genus, self.vertices[v].legs.clone(), self.loops(v), self.valence(v))
    }

    fn relabelled(&self, order: &[usize]) -> CanonicalForm {
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (pos[a], pos[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort();
        CanonicalForm { vertices: order.iter().map(|&v| self.vertices[v].clone()).collect(), edges }
    }

    /// Vertex orders compatible with the sorted invariants, one per choice of
    /// ordering inside each block of equal invariants.
    fn candidate_orders(&self) -> Vec<Vec<usize>> {
        let mut blocks: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for v in 0..self.vertices.len() {
            blocks.entry(self.invariant(v)).or_default().push(v);
        }
        let mut orders = vec![Vec::new()];
        for block in blocks.values() {
            let perms = permutations(block);
            orders = orders
                .iter()
                .flat_map(|prefix| {
                    perms.iter().map(move |p| {
                        let mut o: Vec<usize> = prefix.clone();
                        o.extend(p);
                        o
                    })
                })
                .collect();
        }
        orders
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        self.candidate_orders().iter().map(|o| self.relabelled(o)).min().expect("at least one order")
    }

    pub fn is_isomorphic(&self, other: &StableGraph) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    /// The graph in canonical vertex order.
    pub fn canonical(&self) -> StableGraph {
        let cf = self.canonical_form();
        StableGraph { vertices: cf.vertices, edges: cf.edges }
    }

    /// Automorphisms fixing every leg, as permutations of half-edge ids
    /// (`perm[h]` is the image of `h`), the identity first.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let target = self.relabelled(&(0..self.vertices.len()).collect::<Vec<_>>());
        let mut out = Vec::new();
        for order in self.candidate_orders() {
            // order[i] is the vertex sent to position i; keep those that reproduce the graph
            let mut sigma = vec![0; order.len()];
            for (i, &v) in order.iter().enumerate() {
                sigma[v] = i;
            }
            let perm_ok = (0..order.len()).all(|v| self.invariant(v) == self.invariant(sigma[v]));
            if !perm_ok || self.relabelled(&inverse(&sigma)) != target {
                continue;
            }
            out.extend(self.edge_matchings(&sigma));
        }
        out.sort();
        out.dedup();
        let id: Vec<usize> = (0..2 * self.edges.len()).collect();
        out.retain(|p| p != &id);
        out.insert(0, id);
        out
    }

    /// Half-edge permutations covering the vertex permutation `sigma`.
    fn edge_matchings(&self, sigma: &[usize]) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, &(a, b)) in self.edges.iter().enumerate() {
            groups.entry((a.min(b), a.max(b))).or_default().push(i);
        }
        let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; 2 * self.edges.len()]];
        for (&(a, b), edges) in &groups {
            let key = (sigma[a].min(sigma[b]), sigma[a].max(sigma[b]));
            let images = &groups[&key];
            let mut next = Vec::new();
            for p in &partial {
                for img in permutations(images) {
                    let mut flips = vec![vec![]];
                    for (&e, &f) in edges.iter().zip(&img) {
                        let choices: Vec<(usize, usize)> = if a == b {
                            vec![(2 * f, 2 * f + 1), (2 * f + 1, 2 * f)]
                        } else if self.half_edge_vertex(2 * f) == sigma[self.half_edge_vertex(2 * e)] {
                            vec![(2 * f, 2 * f + 1)]
                        } else {
                            vec![(2 * f + 1, 2 * f)]
                        };
                        flips = flips
                            .iter()
                            .flat_map(|acc: &Vec<(usize, usize, usize)>| {
                                choices.iter().map(move |&(x, y)| {
                                    let mut v = acc.clone();
                                    v.push((e, x, y));
                                    v
                                })
                            })
                            .collect();
                    }
                    for choice in flips {
                        let mut q = p.clone();
                        for (e, x, y) in choice {
                            q[2 * e] = x;
                            q[2 * e + 1] = y;
                        }
                        next.push(q);
                    }
                }
            }
            partial = next;
        }
        partial
    }

    /// Per-vertex `(g_v, n_v)` with the half-edges of each vertex, and the leg-fixing automorphisms.
    pub fn stratum_factors(&self) -> StratumFactors {
        let factors = (0..self.vertices.len())
            .map(|v| Factor { genus: self.vertices[v].genus, points: self.valence(v), half_edges: self.half_edges(v) })
            .collect();
        StratumFactors { factors, automorphisms: self.automorphisms(), graph: self.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": (0..self.vertices.len()).map(|v| json!({
                "genus": self.vertices[v].genus,
                "legs": self.vertices[v].legs.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "halfedges": self.half_edges(v),
            })).collect::<Vec<_>>(),
            "edges": (0..self.edges.len()).map(|i| [2 * i, 2 * i + 1]).collect::<Vec<_>>(),
        })
    }

    /// All graphs one edge deeper: a new loop at a vertex of positive genus, or
    /// a vertex split in two along a partition of its legs and half-edges.
    fn refinements(&self) -> Vec<StableGraph> {
        let mut out = Vec::new();
        for v in 0..self.vertices.len() {
            let vert = &self.vertices[v];
            if vert.genus > 0 {
                let mut g = self.clone();
                g.vertices[v].genus -= 1;
                g.edges.push((v, v));
                out.push(g);
            }
            let legs: Vec<&Label> = vert.legs.iter().collect();
            let hes = self.half_edges(v);
            let m = legs.len() + hes.len();
            for mask in 0u64..1 << m {
                let side = |i: usize| mask >> i & 1 == 1;
                let n2 = (0..m).filter(|&i| side(i)).count();
                let n1 = m - n2;
                for g2 in 0..=vert.genus {
                    let g1 = vert.genus - g2;
                    // each side gains one half-edge for the new edge
                    let unstable = |g: u32, n: usize| 2 * g as i64 + n as i64 - 1 <= 0;
                    if unstable(g1, n1) || unstable(g2, n2) {
                        continue;
                    }
                    let mut g = self.clone();
                    let w = g.vertices.len();
                    g.vertices[v] = Vertex {
                        genus: g1,
                        legs: legs.iter().enumerate().filter(|(i, _)| !side(*i)).map(|(_, l)| (*l).clone()).collect(),
                    };
                    g.vertices.push(Vertex {
                        genus: g2,
                        legs: legs.iter().enumerate().filter(|(i, _)| side(*i)).map(|(_, l)| (*l).clone()).collect(),
                    });
                    for (j, &h) in hes.iter().enumerate() {
                        if side(legs.len() + j) {
                            let e = &mut g.edges[h / 2];
                            if h.is_multiple_of(2) {
                                e.0 = w;
                            } else {
                                e.1 = w;
                            }
                        }
                    }
                    g.edges.push((v, w));
                    out.push(g);
                }
            }
        }
        out
    }
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// One vertex factor `M_{g_v, n_v}` of a stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub genus: u32,
    pub points: usize,
    pub half_edges: Vec<usize>,
}

impl Factor {
    pub fn dim(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.points as i64
    }
}

#[derive(Clone, Debug)]
pub struct StratumFactors {
    pub factors: Vec<Factor>,
    pub automorphisms: Vec<Vec<usize>>,
    pub graph: StableGraph,
}

impl StratumFactors {
    /// Distinct permutations induced on the half-edges of vertex `v` by the
    /// automorphisms fixing `v`; `None` if some automorphism moves `v`.
    pub fn induced_action(&self, v: usize) -> Option<BTreeSet<Vec<usize>>> {
        let hes = &self.factors[v].half_edges;
        let mut out = BTreeSet::new();
        for p in &self.automorphisms {
            let moved: Vec<usize> = hes.iter().map(|&h| p[h]).collect();
            if moved.iter().any(|h| !hes.contains(h)) {
                return None;
            }
            out.insert(moved.iter().map(|h| hes.iter().position(|x| x == h).unwrap()).collect());
        }
        Some(out)
    }
}

/// Enumeration limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphCaps {
    pub max_genus: u32,
    pub max_markings: usize,
}

impl Default for GraphCaps {
    fn default() -> Self {
        Self { max_genus: 2, max_markings: 6 }
    }
}

/// Stable graphs of `space` up to isomorphism, sorted by codimension then canonical form.
pub fn enumerate(space: &Space, max_codim: Option<usize>) -> Result<Vec<StableGraph>> {
    enumerate_with_caps(space, max_codim, GraphCaps::default())
}

pub fn enumerate_with_caps(space: &Space, max_codim: Option<usize>, caps: GraphCaps) -> Result<Vec<StableGraph>> {
    if space.g() > caps.max_genus || space.n() > caps.max_markings {
        return Err(Error::UnsupportedSize(format!(
            "graph enumeration for g={}, n={} exceeds g<={}, n<={}",
            space.g(),
            space.n(),
            caps.max_genus,
            caps.max_markings
        )));
    }
    let top = 3 * space.g() as usize + space.n() - 3;
    let last = max_codim.map_or(top, |c| c.min(top));
    let mut level: BTreeMap<CanonicalForm, StableGraph> = BTreeMap::new();
    let start = StableGraph::trivial(space);
    level.insert(start.canonical_form(), start.canonical());
    let mut out: Vec<StableGraph> = level.values().cloned().collect();
    for _ in 0..last {
        let mut next = BTreeMap::new();
        for g in level.values() {
            for h in g.refinements() {
                next.entry(h.canonical_form()).or_insert_with(|| h.canonical());
            }
        }
        out.extend(next.values().cloned());
        level = next;
    }
    Ok(out)
}

/// Boundary generator key of a one-edge graph.
pub fn boundary_key_of(space: &Space, graph: &StableGraph) -> Result<GenKey> {
    match graph.edges() {
        [(a, b)] if a == b => Ok(GenKey::DeltaIrr),
        [(a, _)] => normalize_boundary(space, graph.vertices()[*a].genus as i64, &graph.vertices()[*a].legs)?
            .ok_or_else(|| Error::InvalidInput("unstable one-edge graph".into())),
        _ => invalid("not a one-edge graph"),
    }
}

/// Pairs each boundary generator key with its one-edge graph.
pub fn one_edge_graphs(space: &Space) -> Result<Vec<(GenKey, StableGraph)>> {
    let graphs = enumerate_with_caps(space, Some(1), GraphCaps { max_genus: u32::MAX, max_markings: usize::MAX })?;
    let mut pairs: Vec<(GenKey, StableGraph)> =
        graphs.into_iter().filter(|g| g.codim() == 1).map(|g| Ok((boundary_key_of(space, &g)?, g))).collect::<Result<_>>()?;
    pairs.sort_by(|x, y| x.0.cmp(&y.0));
    let keys: Vec<GenKey> = pairs.iter().map(|p| p.0.clone()).collect();
    if keys != boundary_keys(space) {
        return invalid("one-edge graphs do not match the boundary generators");
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::label_set;
    use proptest::prelude::*;

    fn v(genus: u32, legs: &[&str]) -> Vertex {
        Vertex { genus, legs: label_set(legs.iter().copied()) }
    }

    #[test]
    fn genus_formula() {
        assert_eq!(StableGraph::new(vec![v(1, &[])], vec![(0, 0)]).unwrap().genus().unwrap(), 2);
        let g = StableGraph::new(vec![v(0, &["1", "2"]), v(0, &["3", "4"])], vec![(0, 1)]).unwrap();
        assert_eq!(g.genus().unwrap(), 0);
        assert!(g.is_stable());
        let disconnected = StableGraph::new(vec![v(0, &["1", "2", "3"]), v(0, &["4", "5", "6"])], vec![]).unwrap();
        assert!(disconnected.genus().is_err());
    }

    #[test]
    fn stability() {
        assert!(!StableGraph::new(vec![v(0, &[]), v(1, &[]), v(1, &[])], vec![(0, 1), (0, 2)]).unwrap().is_stable());
        assert!(StableGraph::new(vec![v(1, &[]), v(0, &["1", "2"])], vec![(0, 1)]).unwrap().is_stable());
        assert!(StableGraph::new(vec![v(0, &["1", "2", "3"])], vec![]).unwrap().is_stable());
    }

    #[test]
    fn enumeration_counts() {
        for (g, n, count) in [(1, 2, 5), (1, 3, 23), (0, 4, 4), (0, 5, 1 + 10 + 15), (1, 1, 2), (2, 0, 7)] {
            let s = Space::numbered(g, n).unwrap();
            assert_eq!(enumerate(&s, None).unwrap().len(), count, "g={g} n={n}");
        }
        assert!(matches!(enumerate(&Space::numbered(3, 0).unwrap(), None), Err(Error::UnsupportedSize(_))));
    }

    #[test]
    fn one_edge_bijection() {
        let pairs = one_edge_graphs(&Space::numbered(2, 0).unwrap()).unwrap();
        assert_eq!(pairs.len(), 2);
        let pairs = one_edge_graphs(&Space::numbered(0, 4).unwrap()).unwrap();
        assert_eq!(pairs.len(), 3);
        assert!(pairs.iter().all(|(k, _)| k != &GenKey::DeltaIrr));
        let pairs = one_edge_graphs(&Space::with_labels(1, ["p"]).unwrap()).unwrap();
        assert_eq!(pairs.iter().map(|p| p.0.clone()).collect::<Vec<_>>(), vec![GenKey::DeltaIrr]);
    }

    #[test]
    fn loop_automorphism_swaps_half_edges() {
        let g = StableGraph::new(vec![v(0, &["1", "2"])], vec![(0, 0)]).unwrap();
        let sf = g.stratum_factors();
        assert_eq!(sf.automorphisms, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(sf.factors[0].points, 4);
        assert_eq!(sf.induced_action(0).unwrap().len(), 2);

        let g = StableGraph::new(vec![v(1, &[]), v(0, &["1", "2"])], vec![(0, 1)]).unwrap();
        assert_eq!(g.automorphisms().len(), 1);

        // two genus-zero vertices joined by three edges: S3 on edges times the vertex swap
        let g = StableGraph::new(vec![v(0, &[]), v(0, &[])], vec![(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(g.automorphisms().len(), 12);
    }

    #[test]
    fn json_shape() {
        let g = StableGraph::new(vec![v(1, &[]), v(0, &["1", "2"])], vec![(0, 1)]).unwrap();
        let j = g.to_json();
        assert_eq!(j["edges"], json!([[0, 1]]));
        assert_eq!(j["vertices"][1]["legs"], json!(["1", "2"]));
    }

    proptest! {
        #[test]
        fn canonical_form_ignores_vertex_order(seed in 0usize..1000) {
            let s = Space::numbered(1, 3).unwrap();
            let graphs = enumerate(&s, None).unwrap();
            let g = &graphs[seed % graphs.len()];
            let n = g.vertices().len();
            let shift: Vec<usize> = (0..n).map(|i| (i + seed) % n).collect();
            let pos = inverse(&shift);
            let moved = StableGraph::new(
                shift.iter().map(|&i| g.vertices()[i].clone()).collect(),
                g.edges().iter().map(|&(a, b)| (pos[b], pos[a])).collect(),
            ).unwrap();
            prop_assert_eq!(moved.canonical_form(), g.canonical_form());
            prop_assert_eq!(moved.genus().unwrap(), 1);
            prop_assert!(moved.is_stable());
        }

        #[test]
        fn refinements_keep_genus(steps in proptest::collection::vec(0usize..1000, 0..4)) {
            let s = Space::numbered(2, 2).unwrap();
            let mut g = StableGraph::trivial(&s);
            for k in steps {
                let r = g.refinements();
                if r.is_empty() { break; }
                g = r[k % r.len()].clone();
                prop_assert_eq!(g.genus().unwrap(), 2);
                prop_assert!(g.is_stable());
            }
        }
    }
}

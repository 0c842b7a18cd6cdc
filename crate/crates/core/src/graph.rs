//! Corollas, aggregates, and the graph morphisms between them.
//!
//! An aggregate is an ordered disjoint union of corollas (one-vertex graphs
//! with labelled flags).  A morphism `X -> Y` is a triple of structure maps:
//! an injection of the flags of `Y` into the flags of `X`, a surjection of
//! the vertices of `X` onto the vertices of `Y`, and a fixed-point-free
//! involution pairing up the leftover flags of `X` into ghost edges.  Flags
//! and vertices are addressed by dense indices; labels are opaque strings
//! kept in the corolla tables.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type Genus = u32;

const FORBIDDEN: &str = ",;|(){}[]*=:";

pub(crate) fn valid_label(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && !FORBIDDEN.contains(c))
}

/// One-vertex graph: a named vertex with an ordered list of distinct flag
/// labels and an optional genus mark.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corolla {
    pub name: String,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub genus: Option<Genus>,
}

impl Corolla {
    pub fn new<S: Into<String>>(name: S, flags: Vec<String>) -> Result<Self, GraphError> {
        Self::build(name.into(), flags, None)
    }

    pub fn with_genus<S: Into<String>>(
        name: S,
        flags: Vec<String>,
        genus: Genus,
    ) -> Result<Self, GraphError> {
        Self::build(name.into(), flags, Some(genus))
    }

    fn build(name: String, flags: Vec<String>, genus: Option<Genus>) -> Result<Self, GraphError> {
        if !valid_label(&name) {
            return Err(GraphError::InvalidLabel(name));
        }
        for f in &flags {
            if !valid_label(f) {
                return Err(GraphError::InvalidLabel(f.clone()));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for f in &flags {
            if !seen.insert(f.as_str()) {
                return Err(GraphError::DuplicateFlag(f.clone()));
            }
        }
        Ok(Corolla { name, flags, genus })
    }

    pub fn arity(&self) -> usize {
        self.flags.len()
    }
}

/// Ordered list of corollas with globally distinct flag labels and vertex
/// names.  Genus marks are all-or-none across the corollas.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Aggregate {
    corollas: Vec<Corolla>,
}

impl Aggregate {
    pub fn new(corollas: Vec<Corolla>) -> Result<Self, GraphError> {
        let mut flags = std::collections::HashSet::new();
        let mut names = std::collections::HashSet::new();
        for c in &corollas {
            if !names.insert(c.name.as_str()) {
                return Err(GraphError::DuplicateVertex(c.name.clone()));
            }
            for f in &c.flags {
                if !flags.insert(f.as_str()) {
                    return Err(GraphError::DuplicateFlag(f.clone()));
                }
            }
        }
        let marked = corollas.iter().filter(|c| c.genus.is_some()).count();
        if marked != 0 && marked != corollas.len() {
            return Err(GraphError::MixedGenusMarking);
        }
        Ok(Aggregate { corollas })
    }

    pub fn empty() -> Self {
        Aggregate { corollas: vec![] }
    }

    /// Single corolla as an aggregate.
    pub fn single(c: Corolla) -> Self {
        Aggregate { corollas: vec![c] }
    }

    pub fn corollas(&self) -> &[Corolla] {
        &self.corollas
    }

    pub fn corolla(&self, v: usize) -> &Corolla {
        &self.corollas[v]
    }

    /// Number of corollas (the length of the tensor word).
    pub fn len(&self) -> usize {
        self.corollas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corollas.is_empty()
    }

    pub fn flag_count(&self) -> usize {
        self.corollas.iter().map(|c| c.arity()).sum()
    }

    /// Enumeration size used for truncation bounds: flags plus vertices.
    pub fn size(&self) -> usize {
        self.flag_count() + self.len()
    }

    pub fn genus_marked(&self) -> bool {
        self.corollas.first().map_or(false, |c| c.genus.is_some())
    }

    pub fn total_genus(&self) -> Genus {
        self.corollas.iter().filter_map(|c| c.genus).sum()
    }

    /// Global index of the first flag of vertex `v`.
    pub fn offset(&self, v: usize) -> usize {
        self.corollas[..v].iter().map(|c| c.arity()).sum()
    }

    /// Vertex and slot of a global flag index.
    pub fn locate(&self, flag: usize) -> (usize, usize) {
        let mut rest = flag;
        for (v, c) in self.corollas.iter().enumerate() {
            if rest < c.arity() {
                return (v, rest);
            }
            rest -= c.arity();
        }
        panic!("flag index {flag} out of range");
    }

    pub fn vertex_of(&self, flag: usize) -> usize {
        self.locate(flag).0
    }

    pub fn flag_label(&self, flag: usize) -> &str {
        let (v, s) = self.locate(flag);
        &self.corollas[v].flags[s]
    }

    pub fn flag_labels(&self) -> Vec<&str> {
        self.corollas
            .iter()
            .flat_map(|c| c.flags.iter().map(|s| s.as_str()))
            .collect()
    }

    pub fn flag_index(&self, label: &str) -> Option<usize> {
        self.flag_labels().iter().position(|l| *l == label)
    }

    /// Disjoint union; fails on label or vertex-name collisions.
    pub fn tensor(&self, other: &Aggregate) -> Result<Aggregate, GraphError> {
        let mut corollas = self.corollas.clone();
        corollas.extend(other.corollas.iter().cloned());
        Aggregate::new(corollas).map_err(|e| match e {
            GraphError::DuplicateFlag(_) | GraphError::DuplicateVertex(_) => {
                GraphError::RelabelRequired
            }
            other => other,
        })
    }

    /// The sub-aggregate over the given vertices (in the given order),
    /// together with the map from new global flag indices to old ones.
    pub fn sub_aggregate(&self, vertices: &[usize]) -> (Aggregate, Vec<usize>) {
        let corollas: Vec<Corolla> = vertices.iter().map(|&v| self.corollas[v].clone()).collect();
        let mut flag_map = Vec::new();
        for &v in vertices {
            let off = self.offset(v);
            flag_map.extend(off..off + self.corollas[v].arity());
        }
        (Aggregate { corollas }, flag_map)
    }

    /// Isomorphism from `self` onto the aggregate with corollas reordered so
    /// that position `i` holds the old corolla `order[i]`.
    pub fn permutation(&self, order: &[usize]) -> Result<GraphMorphism, GraphError> {
        assert_eq!(order.len(), self.len());
        let (reordered, flag_map) = self.sub_aggregate(order);
        let mut vertex_map = vec![0; self.len()];
        for (new, &old) in order.iter().enumerate() {
            vertex_map[old] = new;
        }
        GraphMorphism::new(self.clone(), reordered, flag_map, vertex_map, vec![])
    }
}

/// The graph underlying a morphism: source vertices, ghost edges as flag
/// pairs, and the external (surviving) flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhostGraph {
    pub vertex_count: usize,
    /// Ghost edges as pairs of global source flag indices.
    pub edges: Vec<(usize, usize)>,
    /// Global source flag indices in the image of the flag map.
    pub external: Vec<usize>,
}

/// Per-fiber invariants of the ghost graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiberInvariants {
    /// First Betti number `E - V + C` of the restricted ghost graph.
    pub b1: u32,
    /// Connected components of the restricted ghost graph.
    pub components: usize,
    /// `1 - chi` of the restricted ghost graph; equals `b1` when connected.
    pub euler_defect: i64,
}

/// Morphism of aggregates: flag injection (contravariant), vertex
/// surjection, and ghost involution stored as sorted flag pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphMorphism {
    source: Aggregate,
    target: Aggregate,
    /// For each global target flag, the global source flag it comes from.
    flag_map: Vec<usize>,
    /// For each source vertex, its target vertex.
    vertex_map: Vec<usize>,
    /// Ghost edges as sorted pairs `(a, b)` with `a < b` of source flags.
    ghost_pairs: Vec<(usize, usize)>,
}

impl GraphMorphism {
    pub fn new(
        source: Aggregate,
        target: Aggregate,
        flag_map: Vec<usize>,
        vertex_map: Vec<usize>,
        mut ghost_pairs: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        let nf_src = source.flag_count();
        let nf_tgt = target.flag_count();
        if flag_map.len() != nf_tgt {
            return Err(GraphError::FlagMapLength {
                expected: nf_tgt,
                got: flag_map.len(),
            });
        }
        if vertex_map.len() != source.len() {
            return Err(GraphError::VertexMapLength {
                expected: source.len(),
                got: vertex_map.len(),
            });
        }
        let mut used = vec![false; nf_src];
        for &f in &flag_map {
            if f >= nf_src {
                return Err(GraphError::FlagIndex(f));
            }
            if used[f] {
                return Err(GraphError::NotInjective(f));
            }
            used[f] = true;
        }
        for &v in &vertex_map {
            if v >= target.len() {
                return Err(GraphError::VertexIndex(v));
            }
        }
        let mut fiber_size = vec![0usize; target.len()];
        for &v in &vertex_map {
            fiber_size[v] += 1;
        }
        if let Some(empty) = fiber_size.iter().position(|&n| n == 0) {
            return Err(GraphError::NotSurjective(empty));
        }
        // Normalize and validate the involution.
        for p in ghost_pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        ghost_pairs.sort_unstable();
        let mut ghosted = vec![false; nf_src];
        for &(a, b) in &ghost_pairs {
            if a == b {
                return Err(GraphError::BadGhostPair(a, b));
            }
            if b >= nf_src {
                return Err(GraphError::FlagIndex(b));
            }
            for f in [a, b] {
                if used[f] {
                    return Err(GraphError::GhostHitsExternal(f));
                }
                if ghosted[f] {
                    return Err(GraphError::BadGhostPair(a, b));
                }
                ghosted[f] = true;
            }
        }
        if let Some(f) = (0..nf_src).find(|&f| !used[f] && !ghosted[f]) {
            return Err(GraphError::UncoveredFlag(f));
        }
        // Hereditary locality: target flags pull back into the right fiber,
        // ghost edges stay inside one fiber.
        for (tf, &sf) in flag_map.iter().enumerate() {
            let tv = target.vertex_of(tf);
            if vertex_map[source.vertex_of(sf)] != tv {
                return Err(GraphError::FiberViolation { flag: tf });
            }
        }
        for &(a, b) in &ghost_pairs {
            if vertex_map[source.vertex_of(a)] != vertex_map[source.vertex_of(b)] {
                return Err(GraphError::GhostAcrossFibers(a, b));
            }
        }
        if source.genus_marked() != target.genus_marked() && !(source.is_empty() && !target.genus_marked()) {
            if target.genus_marked() || source.genus_marked() {
                return Err(GraphError::GenusMissing);
            }
        }
        let m = GraphMorphism {
            source,
            target,
            flag_map,
            vertex_map,
            ghost_pairs,
        };
        if m.target.genus_marked() {
            // Bookkeeping uses 1 - chi of the fiber's ghost graph (the
            // first Betti number when the fiber is connected); this is the
            // additive quantity under composition, so validity is closed.
            for (v, inv) in m.ghost_invariants().iter().enumerate() {
                let base: i64 = m
                    .fiber(v)
                    .iter()
                    .map(|&w| m.source.corolla(w).genus.unwrap_or(0) as i64)
                    .sum();
                let expected = base + inv.euler_defect;
                let got = m.target.corolla(v).genus.ok_or(GraphError::GenusMissing)? as i64;
                if got != expected {
                    return Err(GraphError::GenusMismatch {
                        vertex: v,
                        expected,
                        got,
                    });
                }
            }
        }
        Ok(m)
    }

    pub fn identity(x: &Aggregate) -> Self {
        GraphMorphism {
            source: x.clone(),
            target: x.clone(),
            flag_map: (0..x.flag_count()).collect(),
            vertex_map: (0..x.len()).collect(),
            ghost_pairs: vec![],
        }
    }

    pub fn source(&self) -> &Aggregate {
        &self.source
    }

    pub fn target(&self) -> &Aggregate {
        &self.target
    }

    pub fn flag_map(&self) -> &[usize] {
        &self.flag_map
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn ghost_pairs(&self) -> &[(usize, usize)] {
        &self.ghost_pairs
    }

    /// Source vertices mapping to target vertex `v`, in source order.
    pub fn fiber(&self, v: usize) -> Vec<usize> {
        (0..self.source.len())
            .filter(|&w| self.vertex_map[w] == v)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.ghost_pairs.is_empty()
            && self.flag_map.iter().enumerate().all(|(i, &f)| i == f)
            && self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_iso(&self) -> bool {
        self.ghost_pairs.is_empty() && self.source.len() == self.target.len()
    }

    pub fn inverse(&self) -> Result<GraphMorphism, GraphError> {
        if !self.is_iso() {
            return Err(GraphError::NotIso);
        }
        let mut flag_map = vec![0; self.source.flag_count()];
        for (tf, &sf) in self.flag_map.iter().enumerate() {
            flag_map[sf] = tf;
        }
        let mut vertex_map = vec![0; self.target.len()];
        for (sv, &tv) in self.vertex_map.iter().enumerate() {
            vertex_map[tv] = sv;
        }
        GraphMorphism::new(
            self.target.clone(),
            self.source.clone(),
            flag_map,
            vertex_map,
            vec![],
        )
    }

    /// Composition `self . inner` (apply `inner` first).
    pub fn compose(&self, inner: &GraphMorphism) -> Result<GraphMorphism, GraphError> {
        if inner.target != self.source {
            return Err(GraphError::CompositionMismatch);
        }
        let flag_map = self.flag_map.iter().map(|&f| inner.flag_map[f]).collect();
        let vertex_map = inner
            .vertex_map
            .iter()
            .map(|&v| self.vertex_map[v])
            .collect();
        let mut ghost_pairs = inner.ghost_pairs.clone();
        ghost_pairs.extend(
            self.ghost_pairs
                .iter()
                .map(|&(a, b)| (inner.flag_map[a], inner.flag_map[b])),
        );
        GraphMorphism::new(
            inner.source.clone(),
            self.target.clone(),
            flag_map,
            vertex_map,
            ghost_pairs,
        )
    }

    /// Disjoint union of two morphisms.
    pub fn tensor(&self, other: &GraphMorphism) -> Result<GraphMorphism, GraphError> {
        let source = self.source.tensor(&other.source)?;
        let target = self.target.tensor(&other.target)?;
        let sf = self.source.flag_count();
        let tv = self.target.len();
        let mut flag_map = self.flag_map.clone();
        flag_map.extend(other.flag_map.iter().map(|&f| f + sf));
        let mut vertex_map = self.vertex_map.clone();
        vertex_map.extend(other.vertex_map.iter().map(|&v| v + tv));
        let mut ghost_pairs = self.ghost_pairs.clone();
        ghost_pairs.extend(other.ghost_pairs.iter().map(|&(a, b)| (a + sf, b + sf)));
        GraphMorphism::new(source, target, flag_map, vertex_map, ghost_pairs)
    }

    pub fn ghost_graph(&self) -> GhostGraph {
        GhostGraph {
            vertex_count: self.source.len(),
            edges: self.ghost_pairs.clone(),
            external: self.flag_map.clone(),
        }
    }

    /// Ghost edges inside the fiber of target vertex `v`.
    pub fn fiber_ghosts(&self, v: usize) -> Vec<(usize, usize)> {
        self.ghost_pairs
            .iter()
            .copied()
            .filter(|&(a, _)| self.vertex_map[self.source.vertex_of(a)] == v)
            .collect()
    }

    /// Per-target-vertex `(b1, components, euler defect)` of the ghost graph.
    pub fn ghost_invariants(&self) -> Vec<FiberInvariants> {
        (0..self.target.len())
            .map(|v| {
                let fiber = self.fiber(v);
                let edges = self.fiber_ghosts(v);
                let mut parent: Vec<usize> = (0..fiber.len()).collect();
                fn find(p: &mut Vec<usize>, x: usize) -> usize {
                    if p[x] != x {
                        let r = find(p, p[x]);
                        p[x] = r;
                    }
                    p[x]
                }
                let index_of = |w: usize| fiber.iter().position(|&x| x == w).unwrap();
                for &(a, b) in &edges {
                    let (ra, rb) = (
                        find(&mut parent, index_of(self.source.vertex_of(a))),
                        find(&mut parent, index_of(self.source.vertex_of(b))),
                    );
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
                let components = (0..fiber.len())
                    .filter(|&i| find(&mut parent, i) == i)
                    .count();
                let (e, v_) = (edges.len() as i64, fiber.len() as i64);
                FiberInvariants {
                    b1: (e - v_ + components as i64) as u32,
                    components,
                    euler_defect: e - v_ + 1,
                }
            })
            .collect()
    }

    pub fn fiber_b1(&self, v: usize) -> u32 {
        self.ghost_invariants()[v].b1
    }

    /// True when every fiber's ghost graph is connected.
    pub fn fibers_connected(&self) -> bool {
        self.ghost_invariants().iter().all(|i| i.components == 1)
    }

    /// True when every fiber's ghost graph is a forest (b1 = 0).
    pub fn fibers_forest(&self) -> bool {
        self.ghost_invariants().iter().all(|i| i.b1 == 0)
    }

    /// Factor through the fibers: one morphism onto each target corolla plus
    /// the grouping order of source vertices.
    pub fn decompose(&self) -> Decomposition {
        let mut factors = Vec::with_capacity(self.target.len());
        let mut source_order = Vec::with_capacity(self.source.len());
        for v in 0..self.target.len() {
            let fiber = self.fiber(v);
            let (sub, flag_back) = self.source.sub_aggregate(&fiber);
            let flag_fwd: std::collections::HashMap<usize, usize> = flag_back
                .iter()
                .enumerate()
                .map(|(new, &old)| (old, new))
                .collect();
            let tgt = Aggregate::single(self.target.corolla(v).clone());
            let off = self.target.offset(v);
            let flag_map = (0..tgt.flag_count())
                .map(|s| flag_fwd[&self.flag_map[off + s]])
                .collect();
            let vertex_map = vec![0; fiber.len()];
            let ghost_pairs = self
                .fiber_ghosts(v)
                .iter()
                .map(|&(a, b)| (flag_fwd[&a], flag_fwd[&b]))
                .collect();
            factors.push(
                GraphMorphism::new(sub, tgt, flag_map, vertex_map, ghost_pairs)
                    .expect("fiber restriction of a valid morphism is valid"),
            );
            source_order.extend(fiber);
        }
        Decomposition {
            factors,
            source_order,
            original_source: self.source.clone(),
        }
    }
}

/// Result of [`GraphMorphism::decompose`]: one-corolla-target factors in
/// target order plus the permutation needed to recover the original source.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub factors: Vec<GraphMorphism>,
    /// Original source vertex indices in grouped (fiber-by-fiber) order.
    pub source_order: Vec<usize>,
    original_source: Aggregate,
}

impl Decomposition {
    /// Tensor the factors back together and undo the grouping permutation.
    pub fn recompose(&self) -> Result<GraphMorphism, GraphError> {
        let mut big: Option<GraphMorphism> = None;
        for f in &self.factors {
            big = Some(match big {
                None => f.clone(),
                Some(b) => b.tensor(f)?,
            });
        }
        let big = big.unwrap_or_else(|| GraphMorphism::identity(&Aggregate::empty()));
        let perm = self.original_source.permutation(&self.source_order)?;
        big.compose(&perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn corolla(name: &str, flags: &[&str]) -> Corolla {
        Corolla::new(name, flags.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn agg(cs: Vec<Corolla>) -> Aggregate {
        Aggregate::new(cs).unwrap()
    }

    #[test]
    fn corolla_rejects_duplicates_and_bad_labels() {
        assert!(Corolla::new("v", vec!["a".into(), "a".into()]).is_err());
        assert!(Corolla::new("v", vec!["a,b".into()]).is_err());
        assert!(Corolla::new("", vec![]).is_err());
    }

    #[test]
    fn aggregate_global_uniqueness() {
        let c1 = corolla("u", &["a", "b"]);
        let c2 = corolla("w", &["b", "c"]);
        assert_eq!(
            Aggregate::new(vec![c1, c2]).unwrap_err(),
            GraphError::DuplicateFlag("b".into())
        );
    }

    /// Path contraction: u -1- w -2- z onto a single corolla, two ways.
    fn three_vertex_path() -> (Aggregate, Aggregate, GraphMorphism) {
        let x = agg(vec![
            corolla("u", &["a", "p"]),
            corolla("w", &["q", "r"]),
            corolla("z", &["s", "b"]),
        ]);
        let y = agg(vec![corolla("t", &["a2", "b2"])]);
        // external: a2 <- a (flag 0), b2 <- b (flag 5); ghosts {p,q},{r,s}
        let m = GraphMorphism::new(
            x.clone(),
            y.clone(),
            vec![0, 5],
            vec![0, 0, 0],
            vec![(1, 2), (3, 4)],
        )
        .unwrap();
        (x, y, m)
    }

    #[test]
    fn two_step_contraction_equals_one_step() {
        let (x, _y, one_step) = three_vertex_path();
        // First contract u-w, then the remaining edge.
        let mid = agg(vec![corolla("m", &["a1", "r1"]), corolla("z", &["s1", "b1"])]);
        let first = GraphMorphism::new(
            x.clone(),
            mid.clone(),
            vec![0, 3, 4, 5],
            vec![0, 0, 1],
            vec![(1, 2)],
        )
        .unwrap();
        let y = one_step.target().clone();
        let second =
            GraphMorphism::new(mid, y, vec![0, 3], vec![0, 0], vec![(1, 2)]).unwrap();
        let composite = second.compose(&first).unwrap();
        assert_eq!(composite.ghost_pairs(), one_step.ghost_pairs());
        assert_eq!(composite.flag_map(), one_step.flag_map());
        assert_eq!(composite.vertex_map(), one_step.vertex_map());
        let inv = composite.ghost_invariants();
        assert_eq!(inv[0].b1, 0);
        assert_eq!(inv[0].components, 1);
    }

    #[test]
    fn composite_with_self_gluing_gains_b1() {
        let (x, y, contraction) = three_vertex_path();
        let _ = x;
        // Self-gluing on the target corolla: pair its two flags.
        let z = agg(vec![corolla("g", &[])]);
        let glue = GraphMorphism::new(y, z, vec![], vec![0], vec![(0, 1)]).unwrap();
        assert_eq!(glue.fiber_b1(0), 1);
        let comp = glue.compose(&contraction).unwrap();
        assert_eq!(comp.fiber_b1(0), 1);
        assert_eq!(comp.ghost_pairs().len(), 3);
    }

    #[test]
    fn theta_ghost_graph_has_b1_two() {
        let x = agg(vec![
            corolla("u", &["a", "b", "c"]),
            corolla("w", &["d", "e", "f"]),
        ]);
        let y = agg(vec![corolla("t", &[])]);
        let m = GraphMorphism::new(x, y, vec![], vec![0, 0], vec![(0, 3), (1, 4), (2, 5)]).unwrap();
        let inv = m.ghost_invariants()[0];
        assert_eq!(inv.b1, 2);
        assert_eq!(inv.components, 1);
        assert_eq!(inv.euler_defect, 2);
    }

    #[test]
    fn identity_composes_neutrally() {
        let (_, _, m) = three_vertex_path();
        let idx = GraphMorphism::identity(m.source());
        let idy = GraphMorphism::identity(m.target());
        assert_eq!(m.compose(&idx).unwrap(), m);
        assert_eq!(idy.compose(&m).unwrap(), m);
    }

    #[test]
    fn genus_bookkeeping_enforced() {
        let x = Aggregate::new(vec![
            Corolla::with_genus("u", vec!["a".into(), "b".into()], 0).unwrap(),
        ])
        .unwrap();
        let good = Aggregate::new(vec![Corolla::with_genus("t", vec![], 1).unwrap()]).unwrap();
        let bad = Aggregate::new(vec![Corolla::with_genus("t", vec![], 0).unwrap()]).unwrap();
        assert!(GraphMorphism::new(x.clone(), good, vec![], vec![0], vec![(0, 1)]).is_ok());
        assert!(matches!(
            GraphMorphism::new(x, bad, vec![], vec![0], vec![(0, 1)]),
            Err(GraphError::GenusMismatch { .. })
        ));
    }

    #[test]
    fn decompose_recompose_roundtrip() {
        let x = agg(vec![
            corolla("u", &["a", "p"]),
            corolla("w", &["q", "b"]),
            corolla("z", &["c", "d"]),
        ]);
        let y = agg(vec![corolla("s", &["a1", "b1"]), corolla("t", &["c1", "d1"])]);
        // u,w -> s with ghost {p,q}; z -> t plain.
        let m = GraphMorphism::new(
            x,
            y,
            vec![0, 3, 4, 5],
            vec![0, 0, 1],
            vec![(1, 2)],
        )
        .unwrap();
        let d = m.decompose();
        assert_eq!(d.factors.len(), 2);
        assert_eq!(d.recompose().unwrap(), m);
    }

    #[test]
    fn decompose_identity_is_single_factor() {
        let x = agg(vec![corolla("u", &["a", "b"])]);
        let id = GraphMorphism::identity(&x);
        let d = id.decompose();
        assert_eq!(d.factors.len(), 1);
        assert!(d.factors[0].is_identity());
        assert_eq!(d.recompose().unwrap(), id);
    }

    #[test]
    fn tensor_unit_and_interchange() {
        let (_, _, m) = three_vertex_path();
        let unit = GraphMorphism::identity(&Aggregate::empty());
        assert_eq!(m.tensor(&unit).unwrap(), m);

        let x2 = agg(vec![corolla("u2", &["a3", "b3"])]);
        let m2 = GraphMorphism::identity(&x2);
        let lhs = m.tensor(&m2).unwrap();
        let d = lhs.decompose();
        assert_eq!(d.factors.len(), m.target().len() + 1);
    }

    #[test]
    fn tensor_label_collision() {
        let (_, _, m) = three_vertex_path();
        assert_eq!(m.tensor(&m).unwrap_err(), GraphError::RelabelRequired);
    }
}

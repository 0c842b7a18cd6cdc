//! Presentations of Feynman categories over the graph category of
//! aggregates: each presentation is the unrestricted category cut down by a
//! decidable predicate on morphisms (tree shape, connectivity, genus
//! bookkeeping, flag-mark rules for the directed and rooted flavours).

use itertools::Itertools;
use serde::Serialize;

use crate::canonical::{canonical_aggregate, CanonAggregate, VertexPayload};
use crate::error::CatError;
use crate::graph::{Aggregate, Genus, GraphMorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VertexKind {
    Plain,
    GenusMarked,
}

/// Ghost-graph conditions evaluated per fiber.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ShapeRules {
    pub connected: bool,
    /// Cap on the first Betti number per fiber; `Some(0)` means forests.
    pub b1_max: Option<u32>,
    pub no_parallel_edges: bool,
    pub no_directed_loops: bool,
}

/// Flag-mark rule: a finite mark set with an involution and an optional
/// basepoint.  Ghost edges must pair a mark with its involute; a basepoint
/// additionally demands exactly one basepoint flag per vertex and per edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagRule {
    pub marks: Vec<String>,
    pub involution: Vec<usize>,
    pub basepoint: Option<usize>,
}

impl FlagRule {
    pub fn directed() -> Self {
        FlagRule {
            marks: vec!["out".into(), "in".into()],
            involution: vec![1, 0],
            basepoint: None,
        }
    }

    pub fn rooted() -> Self {
        FlagRule {
            basepoint: Some(0),
            ..FlagRule::directed()
        }
    }
}

/// A Feynman category presented as the graph category plus restrictions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeynmanPresentation {
    pub name: String,
    pub vertex_kind: VertexKind,
    pub shape: ShapeRules,
    pub flag_rule: Option<FlagRule>,
}

/// Object of a presentation: an aggregate plus per-flag marks when the
/// presentation carries a flag rule, plus a decoration tuple (one canonical
/// element string per corolla) when the category has been decorated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Obj {
    pub aggregate: Aggregate,
    pub marks: Option<Vec<u8>>,
    pub decoration: Option<Vec<String>>,
}

impl Obj {
    pub fn plain(aggregate: Aggregate) -> Self {
        Obj {
            aggregate,
            marks: None,
            decoration: None,
        }
    }

    pub fn marked(aggregate: Aggregate, marks: Vec<u8>) -> Self {
        Obj {
            aggregate,
            marks: Some(marks),
            decoration: None,
        }
    }

    pub fn size(&self) -> usize {
        self.aggregate.size()
    }
}

/// Morphism with its end objects carried along.  The target marks and
/// decoration are always the transport of the source ones, so equality of
/// the base morphism and source object pins the whole thing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mor {
    pub base: GraphMorphism,
    pub src: Obj,
    pub tgt: Obj,
}

pub fn transport_marks(phi: &GraphMorphism, src_marks: &[u8]) -> Vec<u8> {
    phi.flag_map().iter().map(|&sf| src_marks[sf]).collect()
}

impl FeynmanPresentation {
    /// Does `obj` belong to this presentation?
    pub fn check_object(&self, obj: &Obj) -> Result<(), CatError> {
        let marked = obj.aggregate.genus_marked();
        match self.vertex_kind {
            VertexKind::GenusMarked if !marked && !obj.aggregate.is_empty() => {
                return Err(crate::error::GraphError::GenusMissing.into())
            }
            VertexKind::Plain if marked => {
                return Err(crate::error::GraphError::MixedGenusMarking.into())
            }
            _ => {}
        }
        match (&self.flag_rule, &obj.marks) {
            (Some(rule), Some(marks)) => {
                if marks.len() != obj.aggregate.flag_count() {
                    return Err(CatError::MarksRequired(self.name.clone()));
                }
                if let Some(&bad) = marks.iter().find(|&&m| m as usize >= rule.marks.len()) {
                    return Err(CatError::MarkRange(bad));
                }
                if let Some(bp) = rule.basepoint {
                    for v in 0..obj.aggregate.len() {
                        let off = obj.aggregate.offset(v);
                        let n = obj.aggregate.corolla(v).arity();
                        let roots = (off..off + n).filter(|&f| marks[f] as usize == bp).count();
                        if roots != 1 {
                            return Err(CatError::MarksRequired(self.name.clone()));
                        }
                    }
                }
                Ok(())
            }
            (None, None) => Ok(()),
            (Some(_), None) => Err(CatError::MarksRequired(self.name.clone())),
            (None, Some(_)) => Err(CatError::UnexpectedMarks(self.name.clone())),
        }
    }

    /// Morphism predicate.  `phi` is assumed structurally valid; marks must
    /// be supplied exactly when the presentation has a flag rule.
    pub fn admits(&self, phi: &GraphMorphism, marks: Option<&[u8]>) -> bool {
        let inv = phi.ghost_invariants();
        if self.shape.connected && inv.iter().any(|i| i.components != 1) {
            return false;
        }
        if let Some(cap) = self.shape.b1_max {
            if inv.iter().any(|i| i.b1 > cap) {
                return false;
            }
        }
        if self.vertex_kind == VertexKind::GenusMarked {
            if !phi.target().genus_marked() && !phi.target().is_empty() {
                return false;
            }
            if !phi.source().genus_marked() && !phi.source().is_empty() {
                return false;
            }
        }
        if let Some(rule) = &self.flag_rule {
            let marks = match marks {
                Some(m) => m,
                None => return false,
            };
            for &(a, b) in phi.ghost_pairs() {
                if rule.involution[marks[a] as usize] != marks[b] as usize {
                    return false;
                }
                if let Some(bp) = rule.basepoint {
                    let roots = [a, b]
                        .iter()
                        .filter(|&&f| marks[f] as usize == bp)
                        .count();
                    if roots != 1 {
                        return false;
                    }
                }
            }
            if self.shape.no_directed_loops || self.shape.no_parallel_edges {
                for v in 0..phi.target().len() {
                    if !self.fiber_shape_ok(phi, v, Some(marks)) {
                        return false;
                    }
                }
            }
        } else if self.shape.no_parallel_edges {
            for v in 0..phi.target().len() {
                if !self.fiber_shape_ok(phi, v, None) {
                    return false;
                }
            }
        }
        true
    }

    /// Parallel-edge and directed-cycle conditions on one fiber's ghost
    /// graph.  Direction runs from the `out`-marked flag to its partner.
    fn fiber_shape_ok(&self, phi: &GraphMorphism, v: usize, marks: Option<&[u8]>) -> bool {
        let src = phi.source();
        let edges: Vec<(usize, usize, usize, usize)> = phi
            .fiber_ghosts(v)
            .iter()
            .map(|&(a, b)| (src.vertex_of(a), src.vertex_of(b), a, b))
            .collect();
        if self.shape.no_parallel_edges {
            let mut pairs: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(u, w, _, _)| (u.min(w), u.max(w)))
                .collect();
            pairs.sort_unstable();
            if pairs.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
        }
        if self.shape.no_directed_loops {
            let marks = marks.expect("directed rules need marks");
            // Directed edge u -> w when the flag at u is marked `out` (0).
            let arcs: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(u, w, a, _b)| if marks[a] == 0 { (u, w) } else { (w, u) })
                .collect();
            if arcs.iter().any(|&(u, w)| u == w) {
                return false;
            }
            // Cycle detection over the fiber's vertices.
            let verts: Vec<usize> = phi.fiber(v);
            let idx = |u: usize| verts.iter().position(|&x| x == u).unwrap();
            let mut state = vec![0u8; verts.len()];
            fn dfs(u: usize, arcs: &[(usize, usize)], verts: &[usize], state: &mut [u8]) -> bool {
                state[u] = 1;
                for &(a, b) in arcs {
                    if verts[u] == a {
                        let w = verts.iter().position(|&x| x == b).unwrap();
                        if state[w] == 1 {
                            return false;
                        }
                        if state[w] == 0 && !dfs(w, arcs, verts, state) {
                            return false;
                        }
                    }
                }
                state[u] = 2;
                true
            }
            for u in 0..verts.len() {
                if state[u] == 0 && !dfs(idx(verts[u]), &arcs, &verts, &mut state) {
                    return false;
                }
            }
        }
        true
    }
}

/// The unrestricted graph category.
pub fn graphs() -> FeynmanPresentation {
    FeynmanPresentation {
        name: "G".into(),
        vertex_kind: VertexKind::Plain,
        shape: ShapeRules::default(),
        flag_rule: None,
    }
}

/// Built-in presentations by their command-line names.
pub fn builtin_category(name: &str) -> Result<FeynmanPresentation, CatError> {
    let mut p = graphs();
    p.name = name.to_string();
    match name {
        "G" => {}
        "G_ctd" => p.shape.connected = true,
        "C" => {
            p.shape.connected = true;
            p.shape.b1_max = Some(0);
        }
        "O" => {
            p.shape.connected = true;
            p.shape.b1_max = Some(0);
            p.flag_rule = Some(FlagRule::rooted());
        }
        "M" => {
            p.vertex_kind = VertexKind::GenusMarked;
            p.shape.connected = true;
        }
        "M_nc" => p.vertex_kind = VertexKind::GenusMarked,
        "D" => {
            p.shape.connected = true;
            p.shape.no_directed_loops = true;
            p.shape.no_parallel_edges = true;
            p.flag_rule = Some(FlagRule::directed());
        }
        "P" => {
            p.shape.no_directed_loops = true;
            p.flag_rule = Some(FlagRule::directed());
        }
        "P_ctd" => {
            p.shape.connected = true;
            p.shape.no_directed_loops = true;
            p.flag_rule = Some(FlagRule::directed());
        }
        "D_wheeled" => {
            p.shape.no_parallel_edges = true;
            p.flag_rule = Some(FlagRule::directed());
        }
        "P_wheeled_ctd" => {
            p.shape.connected = true;
            p.shape.no_parallel_edges = true;
            p.flag_rule = Some(FlagRule::directed());
        }
        "P_wheeled" => {
            p.shape.no_parallel_edges = true;
            p.flag_rule = Some(FlagRule::directed());
        }
        other => return Err(CatError::UnknownCategory(other.to_string())),
    }
    Ok(p)
}

pub const BUILTIN_CATEGORIES: [&str; 12] = [
    "G",
    "G_ctd",
    "C",
    "O",
    "M",
    "M_nc",
    "D",
    "P",
    "P_ctd",
    "D_wheeled",
    "P_wheeled_ctd",
    "P_wheeled",
];

/// Every morphism of the ambient graph category between two aggregates.
/// Complete and duplicate-free: vertex surjections, then flag injections
/// respecting fibers, then perfect pairings of the leftovers per fiber.
pub fn hom_base(x: &Aggregate, y: &Aggregate) -> Vec<GraphMorphism> {
    let (nsv, ntv) = (x.len(), y.len());
    if ntv == 0 {
        return if nsv == 0 {
            vec![GraphMorphism::identity(x)]
        } else {
            vec![]
        };
    }
    if nsv < ntv || x.flag_count() < y.flag_count() {
        return vec![];
    }
    if (x.flag_count() - y.flag_count()) % 2 != 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let surjections = std::iter::repeat(0..ntv)
        .take(nsv)
        .multi_cartesian_product()
        .filter(|vm| (0..ntv).all(|t| vm.contains(&t)));
    for vm in surjections {
        let mut injections: Vec<Vec<usize>> = vec![vec![]];
        for tf in 0..y.flag_count() {
            let tv = y.vertex_of(tf);
            let mut next = Vec::new();
            for partial in &injections {
                for sf in 0..x.flag_count() {
                    if vm[x.vertex_of(sf)] == tv && !partial.contains(&sf) {
                        let mut p = partial.clone();
                        p.push(sf);
                        next.push(p);
                    }
                }
            }
            injections = next;
            if injections.is_empty() {
                break;
            }
        }
        for inj in injections {
            let mut leftover_by_fiber: Vec<Vec<usize>> = vec![vec![]; ntv];
            for sf in 0..x.flag_count() {
                if !inj.contains(&sf) {
                    leftover_by_fiber[vm[x.vertex_of(sf)]].push(sf);
                }
            }
            if leftover_by_fiber.iter().any(|l| l.len() % 2 != 0) {
                continue;
            }
            let fiber_matchings: Vec<Vec<Vec<(usize, usize)>>> = leftover_by_fiber
                .iter()
                .map(|l| perfect_matchings(l))
                .collect();
            for combo in fiber_matchings.into_iter().multi_cartesian_product() {
                let ghost: Vec<(usize, usize)> = combo.into_iter().flatten().collect();
                match GraphMorphism::new(x.clone(), y.clone(), inj.clone(), vm.clone(), ghost) {
                    Ok(m) => out.push(m),
                    Err(
                        crate::error::GraphError::GenusMismatch { .. }
                        | crate::error::GraphError::GenusMissing,
                    ) => {}
                    Err(e) => panic!("hom enumeration produced invalid morphism: {e}"),
                }
            }
        }
    }
    out
}

fn perfect_matchings(flags: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if flags.is_empty() {
        return vec![vec![]];
    }
    let first = flags[0];
    let mut out = Vec::new();
    for i in 1..flags.len() {
        let partner = flags[i];
        let rest: Vec<usize> = flags[1..]
            .iter()
            .copied()
            .filter(|&f| f != partner)
            .collect();
        for mut sub in perfect_matchings(&rest) {
            sub.push((first, partner));
            out.push(sub);
        }
    }
    out
}

/// Hom-set of a presentation between two of its objects, as full morphisms
/// with transported marks.
pub fn hom_enumerate(
    cat: &FeynmanPresentation,
    x: &Obj,
    y: &Obj,
) -> Result<Vec<Mor>, CatError> {
    cat.check_object(x)?;
    cat.check_object(y)?;
    let mut out = Vec::new();
    for base in hom_base(&x.aggregate, &y.aggregate) {
        let src_marks = x.marks.as_deref();
        if !cat.admits(&base, src_marks) {
            continue;
        }
        if let (Some(sm), Some(tm)) = (src_marks, y.marks.as_deref()) {
            if transport_marks(&base, sm) != tm {
                continue;
            }
        }
        out.push(Mor {
            base,
            src: x.clone(),
            tgt: y.clone(),
        });
    }
    Ok(out)
}

struct MarksPayload<'a> {
    aggregate: &'a Aggregate,
    marks: &'a [u8],
}

impl VertexPayload for MarksPayload<'_> {
    fn payload(&self, vertex: usize, slot_map: &[usize]) -> String {
        let off = self.aggregate.offset(vertex);
        slot_map
            .iter()
            .map(|&s| self.marks[off + s].to_string())
            .join(".")
    }
}

/// Canonicalize an object (aggregate plus marks).  Decorated objects are
/// handled by the decoration layer, which supplies its own payload.
pub fn canonical_object(obj: &Obj) -> (Obj, GraphMorphism) {
    let canon: CanonAggregate = match &obj.marks {
        None => canonical_aggregate(&obj.aggregate, None),
        Some(marks) => {
            let payload = MarksPayload {
                aggregate: &obj.aggregate,
                marks,
            };
            canonical_aggregate(&obj.aggregate, Some(&payload))
        }
    };
    let marks = obj.marks.as_ref().map(|m| {
        canon
            .iso
            .flag_map()
            .iter()
            .map(|&old| m[old])
            .collect::<Vec<u8>>()
    });
    (
        Obj {
            aggregate: canon.object.clone(),
            marks,
            decoration: None,
        },
        canon.iso,
    )
}

/// Canonical representatives of all objects of `cat` within the bounds.
/// `max_genus` caps the total genus in genus-marked presentations.
pub fn objects_up_to(
    cat: &FeynmanPresentation,
    max_flags: usize,
    max_vertices: usize,
    max_genus: Genus,
) -> Vec<Obj> {
    let genus = cat.vertex_kind == VertexKind::GenusMarked;
    // Multisets of (arity, genus) in non-decreasing order.
    fn extend(
        acc: &mut Vec<Vec<(usize, Genus)>>,
        profile: Vec<(usize, Genus)>,
        flags_left: usize,
        verts_left: usize,
        genus_left: Genus,
        genus_marked: bool,
    ) {
        acc.push(profile.clone());
        if verts_left == 0 {
            return;
        }
        let min = profile.last().copied().unwrap_or((0, 0));
        for arity in 0..=flags_left {
            let gmax = if genus_marked { genus_left } else { 0 };
            for g in 0..=gmax {
                if (arity, g) < min {
                    continue;
                }
                let mut p = profile.clone();
                p.push((arity, g));
                extend(
                    acc,
                    p,
                    flags_left - arity,
                    verts_left - 1,
                    genus_left - g,
                    genus_marked,
                );
            }
        }
    }
    let mut acc = Vec::new();
    extend(
        &mut acc,
        vec![],
        max_flags,
        max_vertices,
        max_genus,
        genus,
    );
    acc.sort();
    acc.dedup();
    let profiles = acc;

    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for profile in profiles {
        let corollas: Vec<crate::graph::Corolla> = profile
            .iter()
            .enumerate()
            .map(|(i, &(arity, g))| {
                let flags = (0..arity).map(|k| format!("f{i}.{k}")).collect();
                crate::graph::Corolla {
                    name: format!("v{i}"),
                    flags,
                    genus: if genus { Some(g) } else { None },
                }
            })
            .collect();
        let agg = Aggregate::new(corollas).expect("generated labels are distinct");
        match &cat.flag_rule {
            None => {
                let obj = Obj::plain(agg);
                let (canon, _) = canonical_object(&obj);
                if seen.insert(canon.clone()) {
                    out.push(canon);
                }
            }
            Some(rule) => {
                let nf = agg.flag_count();
                for marks in std::iter::repeat(0..rule.marks.len() as u8)
                    .take(nf)
                    .multi_cartesian_product()
                    .chain(if nf == 0 { vec![vec![]] } else { vec![] })
                {
                    let obj = Obj::marked(agg.clone(), marks);
                    if cat.check_object(&obj).is_err() {
                        continue;
                    }
                    let (canon, _) = canonical_object(&obj);
                    if seen.insert(canon.clone()) {
                        out.push(canon);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Corolla;

    fn corolla(name: &str, flags: &[&str]) -> Corolla {
        Corolla::new(name, flags.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn star(n: usize) -> Obj {
        let flags = (0..n).map(|i| format!("a{i}")).collect();
        Obj::plain(Aggregate::single(Corolla::new("v", flags).unwrap()))
    }

    #[test]
    fn hom_counts_match_hand_enumeration() {
        let g = builtin_category("G").unwrap();
        assert_eq!(hom_enumerate(&g, &star(2), &star(2)).unwrap().len(), 2);
        assert_eq!(hom_enumerate(&g, &star(4), &star(2)).unwrap().len(), 12);
        let c = builtin_category("C").unwrap();
        assert_eq!(hom_enumerate(&c, &star(4), &star(2)).unwrap().len(), 0);
    }

    #[test]
    fn trees_reject_self_gluing() {
        let c = builtin_category("C").unwrap();
        let x = star(4);
        let y = star(2);
        for m in hom_base(&x.aggregate, &y.aggregate) {
            assert!(!c.admits(&m, None) || m.fibers_forest());
        }
    }

    #[test]
    fn modular_accepts_forced_self_gluing() {
        let m_cat = builtin_category("M").unwrap();
        let x = Aggregate::single(
            Corolla::with_genus("v", vec!["a".into(), "b".into(), "c".into(), "d".into()], 0)
                .unwrap(),
        );
        let y = Aggregate::single(
            Corolla::with_genus("w", vec!["a1".into(), "b1".into()], 1).unwrap(),
        );
        let homs = hom_enumerate(&m_cat, &Obj::plain(x), &Obj::plain(y)).unwrap();
        assert_eq!(homs.len(), 12);
        assert!(homs.iter().all(|m| m.base.fiber_b1(0) == 1));
    }

    #[test]
    fn restriction_is_subset_of_ambient() {
        let g = builtin_category("G").unwrap();
        let c = builtin_category("C").unwrap();
        let x = Obj::plain(
            Aggregate::new(vec![corolla("u", &["a", "b"]), corolla("w", &["c", "d"])]).unwrap(),
        );
        let y = star(2);
        let all = hom_enumerate(&g, &x, &y).unwrap();
        let trees = hom_enumerate(&c, &x, &y).unwrap();
        assert!(trees.iter().all(|t| all.contains(t)));
        assert!(trees.len() < all.len());
    }

    #[test]
    fn rooted_objects_need_exactly_one_root() {
        let o = builtin_category("O").unwrap();
        let agg = star(3).aggregate;
        assert!(o.check_object(&Obj::marked(agg.clone(), vec![0, 1, 1])).is_ok());
        assert!(o.check_object(&Obj::marked(agg.clone(), vec![0, 0, 1])).is_err());
        assert!(o.check_object(&Obj::plain(agg)).is_err());
    }

    #[test]
    fn rooted_hom_respects_marks() {
        let o = builtin_category("O").unwrap();
        // Two 2-flag rooted corollas graft onto a 2-flag rooted corolla.
        let x = Obj::marked(
            Aggregate::new(vec![corolla("u", &["a", "p"]), corolla("w", &["q", "b"])]).unwrap(),
            vec![0, 1, 0, 1],
        );
        let y = Obj::marked(star(2).aggregate, vec![0, 1]);
        let homs = hom_enumerate(&o, &x, &y).unwrap();
        // The ghost edge must pair the root of one vertex with an input of
        // the other; external flags must transport marks.
        assert!(!homs.is_empty());
        for m in &homs {
            let marks = x.marks.as_ref().unwrap();
            for &(a, b) in m.base.ghost_pairs() {
                assert_eq!(marks[a] + marks[b], 1);
            }
        }
    }

    #[test]
    fn objects_up_to_enumerates_canonically() {
        let c = builtin_category("C").unwrap();
        let objs = objects_up_to(&c, 3, 2, 0);
        // Profiles: (), (0), (1), (2), (3), (0,0), (0,1), (0,2), (0,3->no),
        // (1,1), (1,2), ... every multiset of arities with total <= 3.
        assert!(objs.iter().all(|o| o.aggregate.flag_count() <= 3));
        let singles = objs
            .iter()
            .filter(|o| o.aggregate.len() == 1 && o.aggregate.flag_count() == 3)
            .count();
        assert_eq!(singles, 1);
        for o in &objs {
            let (canon, _) = canonical_object(o);
            assert_eq!(&canon, o);
        }
    }

    #[test]
    fn unknown_category_rejected() {
        assert!(builtin_category("nope").is_err());
    }

    #[test]
    fn wheeled_rows_reject_parallel_edges() {
        let dw = builtin_category("D_wheeled").unwrap();
        // Two vertices joined by two parallel (directed) edges.
        let x = Aggregate::new(vec![corolla("u", &["a", "b"]), corolla("w", &["c", "d"])]).unwrap();
        let y = Aggregate::single(corolla("t", &[]));
        let m = GraphMorphism::new(x, y, vec![], vec![0, 0], vec![(0, 2), (1, 3)]).unwrap();
        assert!(!dw.admits(&m, Some(&[0, 0, 1, 1])));
    }

    #[test]
    fn dioperads_reject_directed_cycles() {
        let d = builtin_category("D").unwrap();
        // u -> w -> u directed 2-cycle (not parallel: opposite directions).
        let x = Aggregate::new(vec![corolla("u", &["a", "b"]), corolla("w", &["c", "d"])]).unwrap();
        let y = Aggregate::single(corolla("t", &[]));
        let m = GraphMorphism::new(x.clone(), y.clone(), vec![], vec![0, 0], vec![(0, 2), (1, 3)])
            .unwrap();
        // a: out at u, c: in at w  => u->w ; b: in at u, d: out at w => w->u.
        assert!(!d.admits(&m, Some(&[0, 1, 1, 0])));
        let p = builtin_category("P").unwrap();
        assert!(!p.admits(&m, Some(&[0, 1, 1, 0])));
    }
}

//! Canonical forms for aggregates and graph morphisms.
//!
//! Two aggregates (or morphisms) are isomorphic — related by a relabelling of
//! flags, a permutation of corollas, and compatible ghost structure — exactly
//! when their canonical forms are equal.  The search is a small backtracking
//! over vertex orderings refined by degree-and-genus invariants; flags inside
//! a corolla carry no structure of their own, so only vertex orders are
//! searched and flag orders are derived deterministically.

use itertools::Itertools;

use crate::graph::{Aggregate, Corolla, GraphMorphism};

/// Extra per-vertex data (marks, decorations) that rides along during
/// canonicalization.  `slot_map[i]` is the old local slot that ends up in
/// new local slot `i`; implementations must return a string that transforms
/// accordingly, since it both breaks ties and identifies the result.
pub trait VertexPayload {
    fn payload(&self, vertex: usize, slot_map: &[usize]) -> String;
}

#[derive(Clone, Debug)]
pub struct CanonAggregate {
    pub object: Aggregate,
    /// Witness isomorphism from the original aggregate onto `object`.
    pub iso: GraphMorphism,
    /// Transported payload strings per canonical corolla.
    pub payloads: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CanonMorphism {
    pub morphism: GraphMorphism,
    pub source_iso: GraphMorphism,
    pub target_iso: GraphMorphism,
}

#[derive(Clone, Debug)]
pub struct CanonSource {
    /// Canonical-source representative; the target is kept verbatim.
    pub morphism: GraphMorphism,
    pub source_iso: GraphMorphism,
    pub payloads: Vec<String>,
}

fn fresh_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Canonicalize a bare aggregate: sort corollas by (arity, genus, payload),
/// rename everything, and return the witness.
pub fn canonical_aggregate(x: &Aggregate, payload: Option<&dyn VertexPayload>) -> CanonAggregate {
    // Per corolla, the payload-minimizing slot order (identity when no payload).
    let mut slot_orders: Vec<Vec<usize>> = Vec::with_capacity(x.len());
    let mut pay: Vec<String> = Vec::with_capacity(x.len());
    for (v, c) in x.corollas().iter().enumerate() {
        let idy: Vec<usize> = (0..c.arity()).collect();
        match payload {
            None => {
                slot_orders.push(idy);
                pay.push(String::new());
            }
            Some(p) => {
                let best = idy
                    .iter()
                    .copied()
                    .permutations(c.arity())
                    .map(|perm| {
                        let s = p.payload(v, &perm);
                        (s, perm)
                    })
                    .min()
                    .unwrap_or_else(|| (p.payload(v, &[]), vec![]));
                pay.push(best.0);
                slot_orders.push(best.1);
            }
        }
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by_key(|&v| {
        (
            x.corolla(v).arity(),
            x.corolla(v).genus,
            pay[v].clone(),
        )
    });

    let mut corollas = Vec::with_capacity(x.len());
    let mut flag_witness = Vec::with_capacity(x.flag_count());
    let mut g = 0usize;
    for &v in &order {
        let c = x.corolla(v);
        let flags = fresh_names("f", g + c.arity())[g..].to_vec();
        g += c.arity();
        corollas.push(Corolla {
            name: format!("v{}", corollas.len()),
            flags,
            genus: c.genus,
        });
        let off = x.offset(v);
        for &slot in &slot_orders[v] {
            flag_witness.push(off + slot);
        }
    }
    let object = Aggregate::new(corollas).expect("canonical renaming is collision-free");
    let mut vertex_witness = vec![0; x.len()];
    for (new, &old) in order.iter().enumerate() {
        vertex_witness[old] = new;
    }
    let iso = GraphMorphism::new(x.clone(), object.clone(), flag_witness, vertex_witness, vec![])
        .expect("canonical witness is a valid isomorphism");
    let payloads = order.iter().map(|&v| pay[v].clone()).collect();
    CanonAggregate {
        object,
        iso,
        payloads,
    }
}

/// Grouped permutations: all orderings of `items` that respect the sort by
/// `key` (ties permuted freely).
fn refined_orders<K: Ord + Clone>(
    items: &[usize],
    key: impl Fn(usize) -> K,
) -> Vec<Vec<usize>> {
    let mut sorted = items.to_vec();
    sorted.sort_by_key(|&i| key(i));
    let groups: Vec<Vec<usize>> = sorted
        .iter()
        .chunk_by(|&&i| key(i))
        .into_iter()
        .map(|(_, g)| g.copied().collect())
        .collect();
    groups
        .iter()
        .map(|g| g.iter().copied().permutations(g.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().flatten().collect())
        .collect()
}

struct Layout {
    tokens: Vec<i64>,
    /// Per new source vertex, new local slot -> old local slot.
    slot_maps: Vec<Vec<usize>>,
    /// Per new target vertex, canonical order of its old local slots.
    target_slots: Vec<Vec<usize>>,
    torder: Vec<usize>,
    sorder: Vec<usize>,
}

fn genus_token(g: Option<u32>) -> i64 {
    g.map_or(-1, |g| g as i64)
}

/// Serialize the structure of `phi` under candidate vertex orders.  With
/// `pinned` the target keeps its labels, so injection data is recorded per
/// individual target flag; otherwise target flags within a vertex are
/// interchangeable and only the multiset of preimage positions matters.
fn layout(phi: &GraphMorphism, torder: &[usize], sorder: &[usize], pinned: bool) -> Layout {
    let src = phi.source();
    let tgt = phi.target();
    let mut spos = vec![0usize; src.len()];
    for (p, &v) in sorder.iter().enumerate() {
        spos[v] = p;
    }
    let mut tokens = Vec::new();
    tokens.push(tgt.len() as i64);
    for &w in torder {
        tokens.push(tgt.corolla(w).arity() as i64);
        tokens.push(genus_token(tgt.corolla(w).genus));
    }
    tokens.push(src.len() as i64);
    let mut tpos = vec![0usize; tgt.len()];
    for (i, &w) in torder.iter().enumerate() {
        tpos[w] = i;
    }
    for &v in sorder {
        tokens.push(src.corolla(v).arity() as i64);
        tokens.push(genus_token(src.corolla(v).genus));
        tokens.push(tpos[phi.vertex_map()[v]] as i64);
    }
    // Injection profile: per target vertex (in candidate order) the source
    // positions of its flags' preimages.  Pinned targets record them per
    // flag in slot order; free targets record the sorted multiset.
    let mut target_slots = Vec::with_capacity(tgt.len());
    for &w in torder {
        let off = tgt.offset(w);
        let mut keyed: Vec<(usize, usize)> = (0..tgt.corolla(w).arity())
            .map(|s| {
                let pre = phi.flag_map()[off + s];
                (spos[src.vertex_of(pre)], s)
            })
            .collect();
        if pinned {
            keyed.sort_unstable_by_key(|&(_, s)| s);
        } else {
            keyed.sort_unstable();
        }
        for &(p, _) in &keyed {
            tokens.push(p as i64);
        }
        target_slots.push(keyed.into_iter().map(|(_, s)| s).collect());
    }
    // Ghost profile: sorted multiset of position pairs.
    let mut gh: Vec<(usize, usize)> = phi
        .ghost_pairs()
        .iter()
        .map(|&(a, b)| {
            let (pa, pb) = (spos[src.vertex_of(a)], spos[src.vertex_of(b)]);
            (pa.min(pb), pa.max(pb))
        })
        .collect();
    gh.sort_unstable();
    tokens.push(gh.len() as i64);
    for (a, b) in gh {
        tokens.push(a as i64);
        tokens.push(b as i64);
    }
    // Source slot maps: external flags first (by canonical target flag
    // index), then ghost flags by (partner position, pairing normalization).
    let mut tgt_canon_index = vec![0usize; tgt.flag_count()];
    let mut g = 0;
    for (i, &w) in torder.iter().enumerate() {
        let off = tgt.offset(w);
        for &s in &target_slots[i] {
            tgt_canon_index[off + s] = g;
            g += 1;
        }
    }
    let mut slot_maps = Vec::with_capacity(src.len());
    for &v in sorder {
        let off = src.offset(v);
        let arity = src.corolla(v).arity();
        let mut ext: Vec<(usize, usize)> = Vec::new();
        for (tf, &sf) in phi.flag_map().iter().enumerate() {
            if src.vertex_of(sf) == v {
                ext.push((tgt_canon_index[tf], sf - off));
            }
        }
        ext.sort_unstable();
        let mut slots: Vec<usize> = ext.into_iter().map(|(_, s)| s).collect();
        // Ghost flags at v: loops first keyed to own position, then ordered
        // by partner position; parallel edges pair up in old-index order.
        let mut ghosts: Vec<(usize, usize, usize)> = Vec::new();
        for &(a, b) in phi.ghost_pairs() {
            for (x, y) in [(a, b), (b, a)] {
                if src.vertex_of(x) == v {
                    ghosts.push((spos[src.vertex_of(y)], x, y));
                }
            }
        }
        ghosts.sort_unstable();
        for (_, x, _) in ghosts {
            slots.push(x - off);
        }
        debug_assert_eq!(slots.len(), arity);
        slot_maps.push(slots);
    }
    Layout {
        tokens,
        slot_maps,
        target_slots,
        torder: torder.to_vec(),
        sorder: sorder.to_vec(),
    }
}

fn payload_strings(
    phi: &GraphMorphism,
    lay: &Layout,
    payload: Option<&dyn VertexPayload>,
) -> Vec<String> {
    let _ = phi;
    match payload {
        None => vec![String::new(); lay.sorder.len()],
        Some(p) => lay
            .sorder
            .iter()
            .zip(&lay.slot_maps)
            .map(|(&v, sm)| p.payload(v, sm))
            .collect(),
    }
}

/// Build the canonical morphism and witnesses from a winning layout.
fn realize(phi: &GraphMorphism, lay: &Layout) -> (GraphMorphism, GraphMorphism, GraphMorphism) {
    let src = phi.source();
    let tgt = phi.target();
    // Canonical target.
    let mut tgt_corollas = Vec::new();
    let mut tgt_flag_witness = Vec::new();
    let mut g = 0;
    for (i, &w) in lay.torder.iter().enumerate() {
        let c = tgt.corolla(w);
        let flags = (g..g + c.arity()).map(|k| format!("f{k}")).collect();
        g += c.arity();
        tgt_corollas.push(Corolla {
            name: format!("v{i}"),
            flags,
            genus: c.genus,
        });
        let off = tgt.offset(w);
        for &s in &lay.target_slots[i] {
            tgt_flag_witness.push(off + s);
        }
    }
    let tgt_canon = Aggregate::new(tgt_corollas).unwrap();
    let mut tgt_vertex_witness = vec![0; tgt.len()];
    for (i, &w) in lay.torder.iter().enumerate() {
        tgt_vertex_witness[w] = i;
    }
    let target_iso = GraphMorphism::new(
        tgt.clone(),
        tgt_canon.clone(),
        tgt_flag_witness.clone(),
        tgt_vertex_witness,
        vec![],
    )
    .expect("target witness");

    // Canonical source.
    let mut src_corollas = Vec::new();
    let mut src_flag_witness = Vec::new();
    let mut g = 0;
    for (p, &v) in lay.sorder.iter().enumerate() {
        let c = src.corolla(v);
        let flags = (g..g + c.arity()).map(|k| format!("f{k}")).collect();
        g += c.arity();
        src_corollas.push(Corolla {
            name: format!("v{p}"),
            flags,
            genus: c.genus,
        });
        let off = src.offset(v);
        for &s in &lay.slot_maps[p] {
            src_flag_witness.push(off + s);
        }
    }
    let src_canon = Aggregate::new(src_corollas).unwrap();
    let mut src_vertex_witness = vec![0; src.len()];
    for (p, &v) in lay.sorder.iter().enumerate() {
        src_vertex_witness[v] = p;
    }
    let source_iso = GraphMorphism::new(
        src.clone(),
        src_canon.clone(),
        src_flag_witness.clone(),
        src_vertex_witness.clone(),
        vec![],
    )
    .expect("source witness");

    // Conjugate the structure maps.
    let mut old_to_new_src = vec![0usize; src.flag_count()];
    for (new, &old) in src_flag_witness.iter().enumerate() {
        old_to_new_src[old] = new;
    }
    let mut flag_map = vec![0usize; tgt_canon.flag_count()];
    for (new_tf, &old_tf) in tgt_flag_witness.iter().enumerate() {
        flag_map[new_tf] = old_to_new_src[phi.flag_map()[old_tf]];
    }
    let mut tpos = vec![0usize; tgt.len()];
    for (i, &w) in lay.torder.iter().enumerate() {
        tpos[w] = i;
    }
    let vertex_map = lay
        .sorder
        .iter()
        .map(|&v| tpos[phi.vertex_map()[v]])
        .collect();
    let ghost_pairs = phi
        .ghost_pairs()
        .iter()
        .map(|&(a, b)| (old_to_new_src[a], old_to_new_src[b]))
        .collect();
    let canonical = GraphMorphism::new(src_canon, tgt_canon, flag_map, vertex_map, ghost_pairs)
        .expect("canonical morphism is valid");
    (canonical, source_iso, target_iso)
}

fn source_orders(phi: &GraphMorphism, torder: &[usize]) -> Vec<Vec<usize>> {
    let src = phi.source();
    let loops_at = |v: usize| {
        phi.ghost_pairs()
            .iter()
            .filter(|&&(a, b)| src.vertex_of(a) == v && src.vertex_of(b) == v)
            .count()
    };
    let externals_at = |v: usize| {
        phi.flag_map()
            .iter()
            .filter(|&&sf| src.vertex_of(sf) == v)
            .count()
    };
    let per_fiber: Vec<Vec<Vec<usize>>> = torder
        .iter()
        .map(|&w| {
            let fiber = phi.fiber(w);
            refined_orders(&fiber, |v| {
                (
                    src.corolla(v).arity(),
                    src.corolla(v).genus,
                    externals_at(v),
                    loops_at(v),
                )
            })
        })
        .collect();
    per_fiber
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().flatten().collect())
        .collect()
}

/// Canonicalize a morphism up to relabelling of both its source and target.
pub fn canonical_morphism(phi: &GraphMorphism) -> CanonMorphism {
    let tgt = phi.target();
    let tverts: Vec<usize> = (0..tgt.len()).collect();
    let torders = refined_orders(&tverts, |w| {
        (tgt.corolla(w).arity(), tgt.corolla(w).genus)
    });
    let mut best: Option<(Vec<i64>, Layout)> = None;
    for torder in &torders {
        for sorder in source_orders(phi, torder) {
            let lay = layout(phi, torder, &sorder, false);
            if best.as_ref().map_or(true, |(t, _)| lay.tokens < *t) {
                best = Some((lay.tokens.clone(), lay));
            }
        }
    }
    let (_, lay) = best.expect("at least one ordering");
    let (morphism, source_iso, target_iso) = realize(phi, &lay);
    CanonMorphism {
        morphism,
        source_iso,
        target_iso,
    }
}

/// Canonicalize only the source side of `phi`; the target object and its
/// labels stay fixed.  Used to deduplicate comma-category objects, where the
/// arrow's codomain is pinned.  Optional payloads (decorations, marks) break
/// ties and are returned transported to the canonical slot order.
pub fn canonical_source(
    phi: &GraphMorphism,
    payload: Option<&dyn VertexPayload>,
) -> CanonSource {
    let torder: Vec<usize> = (0..phi.target().len()).collect();
    let mut best: Option<((Vec<i64>, Vec<String>), Layout)> = None;
    for sorder in source_orders(phi, &torder) {
        let lay = layout(phi, &torder, &sorder, true);
        let pays = payload_strings(phi, &lay, payload);
        let key = (lay.tokens.clone(), pays);
        if best.as_ref().map_or(true, |(k, _)| key < *k) {
            best = Some((key, lay));
        }
    }
    let ((_, payloads), lay) = best.expect("at least one ordering");
    let (canonical, source_iso, _tgt_iso) = realize_rel_target(phi, &lay);
    CanonSource {
        morphism: canonical,
        source_iso,
        payloads,
    }
}

/// Like `realize` but keeps the target verbatim.
fn realize_rel_target(
    phi: &GraphMorphism,
    lay: &Layout,
) -> (GraphMorphism, GraphMorphism, ()) {
    let src = phi.source();
    let mut src_corollas = Vec::new();
    let mut src_flag_witness = Vec::new();
    let mut g = 0;
    for (p, &v) in lay.sorder.iter().enumerate() {
        let c = src.corolla(v);
        let flags = (g..g + c.arity()).map(|k| format!("f{k}")).collect();
        g += c.arity();
        src_corollas.push(Corolla {
            name: format!("v{p}"),
            flags,
            genus: c.genus,
        });
        let off = src.offset(v);
        for &s in &lay.slot_maps[p] {
            src_flag_witness.push(off + s);
        }
    }
    let src_canon = Aggregate::new(src_corollas).unwrap();
    let mut src_vertex_witness = vec![0; src.len()];
    for (p, &v) in lay.sorder.iter().enumerate() {
        src_vertex_witness[v] = p;
    }
    let source_iso = GraphMorphism::new(
        src.clone(),
        src_canon.clone(),
        src_flag_witness.clone(),
        src_vertex_witness,
        vec![],
    )
    .expect("source witness");
    let mut old_to_new = vec![0usize; src.flag_count()];
    for (new, &old) in src_flag_witness.iter().enumerate() {
        old_to_new[old] = new;
    }
    let flag_map = phi.flag_map().iter().map(|&sf| old_to_new[sf]).collect();
    let vertex_map = lay
        .sorder
        .iter()
        .map(|&v| phi.vertex_map()[v])
        .collect::<Vec<_>>();
    // vertex_map must be indexed by canonical position.
    let ghost_pairs = phi
        .ghost_pairs()
        .iter()
        .map(|&(a, b)| (old_to_new[a], old_to_new[b]))
        .collect();
    let canonical = GraphMorphism::new(
        src_canon,
        phi.target().clone(),
        flag_map,
        vertex_map,
        ghost_pairs,
    )
    .expect("canonical rel-target morphism is valid");
    (canonical, source_iso, ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Corolla;

    fn corolla(name: &str, flags: &[&str]) -> Corolla {
        Corolla::new(name, flags.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn agg(cs: Vec<Corolla>) -> Aggregate {
        Aggregate::new(cs).unwrap()
    }

    #[test]
    fn swapped_corollas_same_canonical() {
        let x = agg(vec![corolla("u", &["a", "b"]), corolla("w", &["c", "d", "e"])]);
        let y = agg(vec![corolla("p", &["1", "2", "3"]), corolla("q", &["x", "y"])]);
        let cx = canonical_aggregate(&x, None);
        let cy = canonical_aggregate(&y, None);
        assert_eq!(cx.object, cy.object);
        assert!(cx.iso.is_iso());
    }

    #[test]
    fn relabelled_corollas_same_canonical_with_witness() {
        let x = agg(vec![corolla("u", &["1", "2"])]);
        let y = agg(vec![corolla("w", &["a", "b"])]);
        let cx = canonical_aggregate(&x, None);
        let cy = canonical_aggregate(&y, None);
        assert_eq!(cx.object, cy.object);
        // Witness maps canonical flags back to original labels.
        assert_eq!(cx.iso.source(), &x);
    }

    fn path_morphism() -> GraphMorphism {
        let x = agg(vec![corolla("u", &["a", "p"]), corolla("w", &["q", "b"])]);
        let y = agg(vec![corolla("t", &["a1", "b1"])]);
        GraphMorphism::new(x, y, vec![0, 3], vec![0, 0], vec![(1, 2)]).unwrap()
    }

    fn loop_morphism() -> GraphMorphism {
        let x = agg(vec![corolla("u", &["a", "p", "q", "b"])]);
        let y = agg(vec![corolla("t", &["a1", "b1"])]);
        GraphMorphism::new(x, y, vec![0, 3], vec![0], vec![(1, 2)]).unwrap()
    }

    #[test]
    fn path_and_loop_differ() {
        let cp = canonical_morphism(&path_morphism());
        let cl = canonical_morphism(&loop_morphism());
        assert_ne!(cp.morphism, cl.morphism);
    }

    #[test]
    fn conjugates_share_canonical_form() {
        let m = path_morphism();
        // Relabel the source by swapping the two corollas.
        let perm = m.source().permutation(&[1, 0]).unwrap();
        let conj = m.compose(&perm.inverse().unwrap()).unwrap();
        let c1 = canonical_morphism(&m);
        let c2 = canonical_morphism(&conj);
        assert_eq!(c1.morphism, c2.morphism);
    }

    #[test]
    fn witnesses_reconstruct_canonical() {
        let m = path_morphism();
        let c = canonical_morphism(&m);
        let rebuilt = c
            .target_iso
            .compose(&m)
            .unwrap()
            .compose(&c.source_iso.inverse().unwrap())
            .unwrap();
        assert_eq!(rebuilt, c.morphism);
    }

    #[test]
    fn canonical_is_idempotent() {
        let m = path_morphism();
        let c = canonical_morphism(&m);
        let cc = canonical_morphism(&c.morphism);
        assert_eq!(c.morphism, cc.morphism);

        let x = agg(vec![corolla("u", &["a"]), corolla("w", &["b", "c"])]);
        let cx = canonical_aggregate(&x, None);
        let cxx = canonical_aggregate(&cx.object, None);
        assert_eq!(cx.object, cxx.object);
    }

    #[test]
    fn canonical_source_fixes_target() {
        let m = path_morphism();
        let c = canonical_source(&m, None);
        assert_eq!(c.morphism.target(), m.target());
        let perm = m.source().permutation(&[1, 0]).unwrap();
        let conj = m.compose(&perm.inverse().unwrap()).unwrap();
        let c2 = canonical_source(&conj, None);
        assert_eq!(c.morphism, c2.morphism);
    }

    #[test]
    fn ghost_invariants_stable_under_relabelling() {
        let m = path_morphism();
        let perm = m.source().permutation(&[1, 0]).unwrap();
        let conj = m.compose(&perm.inverse().unwrap()).unwrap();
        assert_eq!(m.ghost_invariants(), conj.ghost_invariants());
    }
}

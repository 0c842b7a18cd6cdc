//! Random objects and morphisms of a presentation, for the sampled checkers.
//!
//! Morphisms are built constructively: pick a fiber partition, wire spanning
//! trees (plus extra edges where the presentation allows positive genus or
//! disconnected fibers), let the rest of the flags survive, and read off the
//! target.  Constructions that trip a predicate are retried.

use rand::prelude::SliceRandom;
use rand::Rng;

use crate::category::{transport_marks, FeynmanPresentation, Mor, Obj, VertexKind};
use crate::graph::{Aggregate, Corolla, GraphMorphism};

#[derive(Clone, Copy, Debug)]
pub struct SampleCfg {
    pub max_vertices: usize,
    pub max_arity: usize,
    pub max_genus: u32,
    pub max_extra_edges: usize,
}

impl Default for SampleCfg {
    fn default() -> Self {
        SampleCfg {
            max_vertices: 3,
            max_arity: 4,
            max_genus: 2,
            max_extra_edges: 2,
        }
    }
}

pub fn rand_object<R: Rng>(rng: &mut R, cat: &FeynmanPresentation, cfg: &SampleCfg) -> Obj {
    let nv = rng.gen_range(1..=cfg.max_vertices);
    let rooted = cat
        .flag_rule
        .as_ref()
        .map_or(false, |r| r.basepoint.is_some());
    let mut corollas = Vec::with_capacity(nv);
    let mut seq = 0usize;
    for i in 0..nv {
        let min = if rooted { 1 } else { 0 };
        let arity = rng.gen_range(min..=cfg.max_arity.max(min));
        let flags = (0..arity)
            .map(|_| {
                seq += 1;
                format!("x{seq}")
            })
            .collect();
        let genus = (cat.vertex_kind == VertexKind::GenusMarked)
            .then(|| rng.gen_range(0..=cfg.max_genus));
        corollas.push(Corolla {
            name: format!("n{i}"),
            flags,
            genus,
        });
    }
    let aggregate = Aggregate::new(corollas).unwrap();
    let marks = cat.flag_rule.as_ref().map(|rule| {
        let mut marks = Vec::with_capacity(aggregate.flag_count());
        for v in 0..aggregate.len() {
            let n = aggregate.corolla(v).arity();
            match rule.basepoint {
                Some(bp) => {
                    let root = rng.gen_range(0..n);
                    for s in 0..n {
                        marks.push(if s == root {
                            bp as u8
                        } else {
                            rule.involution[bp] as u8
                        });
                    }
                }
                None => {
                    for _ in 0..n {
                        marks.push(rng.gen_range(0..rule.marks.len()) as u8);
                    }
                }
            }
        }
        marks
    });
    Obj {
        aggregate,
        marks,
        decoration: None,
    }
}

/// One attempt at a random morphism out of `src`; `None` if the wiring
/// failed (caller retries).
fn try_morphism<R: Rng>(
    rng: &mut R,
    cat: &FeynmanPresentation,
    src: &Obj,
    cfg: &SampleCfg,
) -> Option<Mor> {
    let agg = &src.aggregate;
    let nsv = agg.len();
    if nsv == 0 {
        let base = GraphMorphism::identity(agg);
        return Some(Mor {
            base,
            src: src.clone(),
            tgt: src.clone(),
        });
    }
    let ntv = rng.gen_range(1..=nsv);
    let mut fiber_of: Vec<usize> = (0..nsv).map(|_| rng.gen_range(0..ntv)).collect();
    let mut order: Vec<usize> = (0..nsv).collect();
    order.shuffle(rng);
    for (t, &v) in order.iter().take(ntv).enumerate() {
        fiber_of[v] = t;
    }
    let marks = src.marks.as_deref();
    let rule = cat.flag_rule.as_ref();
    let mut free: Vec<Vec<usize>> = (0..nsv)
        .map(|v| {
            let off = agg.offset(v);
            (off..off + agg.corolla(v).arity()).collect()
        })
        .collect();
    let mut ghost: Vec<(usize, usize)> = Vec::new();
    let needs_tree = cat.shape.connected || cat.shape.b1_max.is_some();
    for t in 0..ntv {
        let fiber: Vec<usize> = (0..nsv).filter(|&v| fiber_of[v] == t).collect();
        if needs_tree && fiber.len() > 1 {
            // Spanning tree; for rooted rules each non-head vertex hangs by
            // its root flag.
            let mut fiber_sh = fiber.clone();
            fiber_sh.shuffle(rng);
            let mut connected = vec![fiber_sh[0]];
            for &v in &fiber_sh[1..] {
                let child_flag = match rule.and_then(|r| r.basepoint) {
                    Some(bp) => *free[v]
                        .iter()
                        .find(|&&f| marks.unwrap()[f] as usize == bp)?,
                    None => *free[v].choose(rng)?,
                };
                let child_mark = marks.map(|m| m[child_flag]);
                let mut partners: Vec<(usize, usize)> = Vec::new();
                for &w in &connected {
                    for &f in &free[w] {
                        let ok = match (rule, child_mark) {
                            (Some(r), Some(cm)) => {
                                r.involution[cm as usize] == marks.unwrap()[f] as usize
                            }
                            _ => true,
                        };
                        if ok {
                            partners.push((w, f));
                        }
                    }
                }
                let &(w, f) = partners.choose(rng)?;
                free[v].retain(|&x| x != child_flag);
                free[w].retain(|&x| x != f);
                ghost.push((child_flag.min(f), child_flag.max(f)));
                connected.push(v);
            }
        }
        // Extra edges where the shape allows cycles.
        let b1_budget = match cat.shape.b1_max {
            None => cfg.max_extra_edges,
            Some(cap) => (cap as usize).min(cfg.max_extra_edges),
        };
        if b1_budget > 0 {
            let extras = rng.gen_range(0..=b1_budget);
            for _ in 0..extras {
                let pool: Vec<usize> = fiber.iter().flat_map(|&v| free[v].clone()).collect();
                if pool.len() < 2 {
                    break;
                }
                let a = *pool.choose(rng).unwrap();
                let compatible: Vec<usize> = pool
                    .iter()
                    .copied()
                    .filter(|&b| b != a)
                    .filter(|&b| match rule {
                        Some(r) => {
                            r.involution[marks.unwrap()[a] as usize] == marks.unwrap()[b] as usize
                        }
                        None => true,
                    })
                    .collect();
                let Some(&b) = compatible.choose(rng) else {
                    continue;
                };
                let va = agg.vertex_of(a);
                let vb = agg.vertex_of(b);
                free[va].retain(|&x| x != a);
                free[vb].retain(|&x| x != b);
                ghost.push((a.min(b), b.max(a)));
            }
        }
        if !needs_tree && fiber.len() > 1 && !cat.shape.connected {
            // Disconnected fibers are fine here (mergers).
        }
    }
    // Survivors become the target flags, fiber by fiber.
    let genus_marked = cat.vertex_kind == VertexKind::GenusMarked;
    let mut flag_map = Vec::new();
    let mut corollas = Vec::new();
    for t in 0..ntv {
        let fiber: Vec<usize> = (0..nsv).filter(|&v| fiber_of[v] == t).collect();
        let mut survivors: Vec<usize> = fiber.iter().flat_map(|&v| free[v].clone()).collect();
        survivors.sort_unstable();
        let flags = survivors
            .iter()
            .map(|&f| format!("y{f}"))
            .collect::<Vec<_>>();
        flag_map.extend(survivors);
        corollas.push(Corolla {
            name: format!("m{t}"),
            flags,
            genus: None,
        });
    }
    let mut target = Aggregate::new(corollas).ok()?;
    let vertex_map = fiber_of;
    if genus_marked {
        // Compute the forced genus marks from a dry run.
        let plain_src = Aggregate::new(
            agg.corollas()
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.genus = None;
                    c
                })
                .collect(),
        )
        .ok()?;
        let dry = GraphMorphism::new(
            plain_src,
            target.clone(),
            flag_map.clone(),
            vertex_map.clone(),
            ghost.clone(),
        )
        .ok()?;
        let inv = dry.ghost_invariants();
        target = Aggregate::new(
            target
                .corollas()
                .iter()
                .enumerate()
                .map(|(t, c)| {
                    let mut c = c.clone();
                    let base: u32 = dry
                        .fiber(t)
                        .iter()
                        .map(|&v| agg.corolla(v).genus.unwrap_or(0))
                        .sum();
                    c.genus = Some(base + inv[t].b1);
                    c
                })
                .collect(),
        )
        .ok()?;
    }
    let base = GraphMorphism::new(agg.clone(), target.clone(), flag_map, vertex_map, ghost).ok()?;
    if !cat.admits(&base, marks) {
        return None;
    }
    let tgt_marks = marks.map(|m| transport_marks(&base, m));
    let tgt = Obj {
        aggregate: target,
        marks: tgt_marks,
        decoration: None,
    };
    if cat.check_object(&tgt).is_err() {
        return None;
    }
    Some(Mor {
        base,
        src: src.clone(),
        tgt,
    })
}

pub fn rand_morphism<R: Rng>(
    rng: &mut R,
    cat: &FeynmanPresentation,
    src: &Obj,
    cfg: &SampleCfg,
) -> Option<Mor> {
    (0..80).find_map(|_| try_morphism(rng, cat, src, cfg))
}

/// A composable pair `(phi, psi)` with `psi` out of `phi`'s target.
pub fn rand_composable<R: Rng>(
    rng: &mut R,
    cat: &FeynmanPresentation,
    cfg: &SampleCfg,
) -> Option<(Mor, Mor)> {
    for _ in 0..40 {
        let x = rand_object(rng, cat, cfg);
        if cat.check_object(&x).is_err() {
            continue;
        }
        let Some(phi) = rand_morphism(rng, cat, &x, cfg) else {
            continue;
        };
        let Some(psi) = rand_morphism(rng, cat, &phi.tgt, cfg) else {
            continue;
        };
        return Some((phi, psi));
    }
    None
}

/// Random relabelling isomorphism out of `x`: permuted corollas, permuted
/// slots, fresh labels.
pub fn rand_iso<R: Rng>(rng: &mut R, x: &Obj) -> (GraphMorphism, Obj) {
    let agg = &x.aggregate;
    let mut vorder: Vec<usize> = (0..agg.len()).collect();
    vorder.shuffle(rng);
    let mut corollas = Vec::with_capacity(agg.len());
    let mut flag_map = Vec::with_capacity(agg.flag_count());
    let mut seq = 0usize;
    for (p, &v) in vorder.iter().enumerate() {
        let c = agg.corolla(v);
        let mut slots: Vec<usize> = (0..c.arity()).collect();
        slots.shuffle(rng);
        let flags = slots
            .iter()
            .map(|_| {
                seq += 1;
                format!("r{seq}")
            })
            .collect();
        corollas.push(Corolla {
            name: format!("q{p}"),
            flags,
            genus: c.genus,
        });
        let off = agg.offset(v);
        flag_map.extend(slots.iter().map(|&s| off + s));
    }
    let new_agg = Aggregate::new(corollas).unwrap();
    let mut vertex_map = vec![0; agg.len()];
    for (p, &v) in vorder.iter().enumerate() {
        vertex_map[v] = p;
    }
    let iso = GraphMorphism::new(agg.clone(), new_agg.clone(), flag_map, vertex_map, vec![])
        .expect("relabelling is a valid iso");
    let marks = x
        .marks
        .as_ref()
        .map(|m| iso.flag_map().iter().map(|&old| m[old]).collect());
    (
        iso,
        Obj {
            aggregate: new_agg,
            marks,
            decoration: None,
        },
    )
}

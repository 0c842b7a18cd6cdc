//! Pushforwards of ops as truncated colimits over comma categories.
//!
//! For a functor `f` between presentations and an op `O` on the source, the
//! pushforward value at a target object is the colimit of `O` over the comma
//! category of `f` above it.  The comma category is genuinely infinite; we
//! enumerate its objects up to a size bound and up to canonical form, seed a
//! union-find with all decoration elements, and merge along a generating set
//! of comma morphisms (automorphisms, single edge contractions, single loop
//! contractions, single mergers — every morphism of the graph categories
//! factors through these).  Bounds that fail the stabilization probe are
//! reported, never silently accepted.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use itertools::Itertools;

use crate::canonical::{canonical_source, VertexPayload};
use crate::category::{
    hom_enumerate, transport_marks, FeynmanPresentation, FlagRule, Mor, Obj, VertexKind,
};
use crate::decorate::{canonical_obj, DecoratedPresentation};
use crate::error::{KanError, OpError};
use crate::graph::{Aggregate, Corolla, GraphMorphism};
use crate::setops::{relabel_decoration, OpNatTrans, PushforwardKernel, SetOp};

/// A presentation, possibly decorated.
#[derive(Clone, Debug)]
pub enum Cat {
    Plain(FeynmanPresentation),
    Dec(DecoratedPresentation),
}

impl Cat {
    pub fn name(&self) -> String {
        match self {
            Cat::Plain(p) => p.name.clone(),
            Cat::Dec(d) => d.name(),
        }
    }

    pub fn base(&self) -> &FeynmanPresentation {
        match self {
            Cat::Plain(p) => p,
            Cat::Dec(d) => &d.base,
        }
    }

    pub fn op(&self) -> Option<&SetOp> {
        match self {
            Cat::Plain(_) => None,
            Cat::Dec(d) => Some(&d.op),
        }
    }

    pub fn check_object(&self, x: &Obj) -> Result<(), crate::error::CatError> {
        match self {
            Cat::Plain(p) => p.check_object(x),
            Cat::Dec(d) => d.check_object(x),
        }
    }

    /// Hom-set between two objects of the category.
    pub fn hom(&self, x: &Obj, y: &Obj) -> Result<Vec<Mor>, crate::error::CatError> {
        match self {
            Cat::Plain(p) => hom_enumerate(p, x, y),
            Cat::Dec(d) => d.dec_hom(x, y),
        }
    }

    /// Canonicalize an object of this category.
    pub fn canonical(&self, x: &Obj) -> (Obj, GraphMorphism) {
        canonical_obj(self.op(), x)
    }
}

/// Functors of presentations used by the pushforward machinery.
#[derive(Clone, Debug)]
pub enum Functor {
    Id(Cat),
    /// Forget the decoration layer of a decorated presentation.
    ForgetDec(DecoratedPresentation),
    /// Inclusion of trees into genus-marked connected graphs: mark every
    /// corolla with genus 0.
    TreesToModular,
    /// Decorated lift `f^O` of an inner functor along an op and its
    /// pushforward.
    DecLift {
        inner: Box<Functor>,
        op: SetOp,
        kernel: Arc<PushKernel>,
    },
    /// Transport along a natural transformation of ops.
    SigmaDec {
        base: FeynmanPresentation,
        nat: OpNatTrans,
    },
}

impl Functor {
    pub fn source(&self) -> Cat {
        match self {
            Functor::Id(c) => c.clone(),
            Functor::ForgetDec(d) => Cat::Dec(d.clone()),
            Functor::TreesToModular => {
                Cat::Plain(crate::category::builtin_category("C").unwrap())
            }
            Functor::DecLift { inner, op, .. } => Cat::Dec(DecoratedPresentation::new(
                inner.source().base().clone(),
                op.clone(),
            )),
            Functor::SigmaDec { base, nat } => {
                Cat::Dec(DecoratedPresentation::new(base.clone(), nat.source.clone()))
            }
        }
    }

    pub fn target(&self) -> Cat {
        match self {
            Functor::Id(c) => c.clone(),
            Functor::ForgetDec(d) => Cat::Plain(d.base.clone()),
            Functor::TreesToModular => {
                Cat::Plain(crate::category::builtin_category("M").unwrap())
            }
            Functor::DecLift { inner, kernel, .. } => Cat::Dec(DecoratedPresentation::new(
                inner.target().base().clone(),
                kernel.as_op(),
            )),
            Functor::SigmaDec { base, nat } => {
                Cat::Dec(DecoratedPresentation::new(base.clone(), nat.target.clone()))
            }
        }
    }

    pub fn map_obj(&self, x: &Obj) -> Result<Obj, KanError> {
        match self {
            Functor::Id(_) => Ok(x.clone()),
            Functor::ForgetDec(_) => Ok(Obj {
                aggregate: x.aggregate.clone(),
                marks: x.marks.clone(),
                decoration: None,
            }),
            Functor::TreesToModular => Ok(Obj {
                aggregate: mark_genus_zero(&x.aggregate),
                marks: x.marks.clone(),
                decoration: None,
            }),
            Functor::DecLift { inner, op, kernel } => {
                let base = inner.map_obj(&Obj {
                    aggregate: x.aggregate.clone(),
                    marks: x.marks.clone(),
                    decoration: None,
                })?;
                let dec = x
                    .decoration
                    .as_ref()
                    .ok_or(crate::error::CatError::DecorationRequired)
                    .map_err(KanError::Cat)?;
                let mut classes = Vec::with_capacity(base.aggregate.len());
                for v in 0..base.aggregate.len() {
                    let (src_v, _) = x.aggregate.sub_aggregate(&[v]);
                    let src_obj = Obj {
                        aggregate: src_v,
                        marks: None,
                        decoration: Some(vec![dec[v].clone()]),
                    };
                    let (tgt_v, _) = base.aggregate.sub_aggregate(&[v]);
                    let arrow = GraphMorphism::identity(&tgt_v);
                    classes.push(kernel.locate_class(inner, op, &src_obj, &arrow)?);
                }
                Ok(Obj {
                    aggregate: base.aggregate,
                    marks: base.marks,
                    decoration: Some(classes),
                })
            }
            Functor::SigmaDec { nat, .. } => Ok(crate::decorate::apply_sigma(nat, x)),
        }
    }

    pub fn map_base(&self, m: &GraphMorphism) -> Result<GraphMorphism, KanError> {
        match self {
            Functor::Id(_) | Functor::ForgetDec(_) | Functor::SigmaDec { .. } => Ok(m.clone()),
            Functor::TreesToModular => GraphMorphism::new(
                mark_genus_zero(m.source()),
                mark_genus_zero(m.target()),
                m.flag_map().to_vec(),
                m.vertex_map().to_vec(),
                m.ghost_pairs().to_vec(),
            )
            .map_err(KanError::Graph),
            Functor::DecLift { inner, .. } => inner.map_base(m),
        }
    }

    pub fn map_mor(&self, m: &Mor) -> Result<Mor, KanError> {
        Ok(Mor {
            base: self.map_base(&m.base)?,
            src: self.map_obj(&m.src)?,
            tgt: self.map_obj(&m.tgt)?,
        })
    }

    /// Image of a source aggregate under the functor (object part, base
    /// layer only).
    pub fn image_aggregate(&self, a: &Aggregate) -> Aggregate {
        match self {
            Functor::TreesToModular => mark_genus_zero(a),
            Functor::DecLift { inner, .. } => inner.image_aggregate(a),
            _ => a.clone(),
        }
    }

    /// Preimage of an aggregate that lies in the image of the functor.
    pub fn unmap_aggregate(&self, a: &Aggregate) -> Aggregate {
        match self {
            Functor::TreesToModular => strip_genus(a),
            Functor::DecLift { inner, .. } => inner.unmap_aggregate(a),
            _ => a.clone(),
        }
    }
}

fn strip_genus(a: &Aggregate) -> Aggregate {
    Aggregate::new(
        a.corollas()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.genus = None;
                c
            })
            .collect(),
    )
    .expect("genus stripping keeps labels")
}

fn mark_genus_zero(a: &Aggregate) -> Aggregate {
    Aggregate::new(
        a.corollas()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.genus = Some(0);
                c
            })
            .collect(),
    )
    .expect("genus marking keeps labels")
}

/// An object of the comma category of `f` over a fixed target: a source
/// object together with an arrow from its image to the target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub struct CommaObject {
    pub source: Obj,
    pub arrow: GraphMorphism,
}

struct CommaPayload<'a> {
    obj: &'a Obj,
    op: Option<&'a SetOp>,
}

impl VertexPayload for CommaPayload<'_> {
    fn payload(&self, vertex: usize, slot_map: &[usize]) -> String {
        let mut parts: Vec<String> = Vec::new();
        if let Some(g) = self.obj.aggregate.corolla(vertex).genus {
            parts.push(format!("g{g}"));
        }
        if let Some(marks) = &self.obj.marks {
            let off = self.obj.aggregate.offset(vertex);
            parts.push(
                slot_map
                    .iter()
                    .map(|&s| marks[off + s].to_string())
                    .join("."),
            );
        }
        if let (Some(op), Some(dec)) = (self.op, &self.obj.decoration) {
            let c = self.obj.aggregate.corolla(vertex);
            parts.push(
                op.relabel(&dec[vertex], slot_map, c, c)
                    .unwrap_or_else(|e| format!("!{e}")),
            );
        }
        parts.join("|")
    }
}

/// Canonicalize a comma pair: relabel the source only, transporting marks
/// and (object-level) decorations; the arrow's target stays pinned.  The
/// arrow's domain is the image `f(source)`; the stored source object lives
/// in the source category.
pub fn canonical_comma(
    f: &Functor,
    src_op: Option<&SetOp>,
    source: &Obj,
    arrow: &GraphMorphism,
) -> (CommaObject, GraphMorphism) {
    debug_assert_eq!(source.aggregate.len(), arrow.source().len());
    let payload = CommaPayload {
        obj: source,
        op: src_op,
    };
    let needs_payload = source.marks.is_some() || source.decoration.is_some();
    let canon = if needs_payload {
        canonical_source(arrow, Some(&payload))
    } else {
        canonical_source(arrow, None)
    };
    let iso = canon.source_iso.clone();
    let marks = source.marks.as_ref().map(|m| transport_marks(&iso, m));
    let decoration = match (&source.decoration, src_op) {
        (Some(dec), Some(op)) => {
            Some(relabel_decoration(op, &iso, dec).expect("canonical transport"))
        }
        (Some(_), None) => panic!("decorated comma source without an op"),
        _ => None,
    };
    (
        CommaObject {
            source: Obj {
                aggregate: f.unmap_aggregate(canon.morphism.source()),
                marks,
                decoration,
            },
            arrow: canon.morphism,
        },
        iso,
    )
}

/// Specification of the structures generated for a single-corolla target.
struct GenSpec {
    /// Arrow category: connectivity, b1 cap, genus marking.
    connected: bool,
    forest: bool,
    tgt_genus: Option<u32>,
    src_genus_marked: bool,
    flag_rule: Option<FlagRule>,
    conserve_genus: bool,
    /// The functor marks its image with genus zero.
    image_genus_zero: bool,
}

impl GenSpec {
    fn image(&self, a: &Aggregate) -> Aggregate {
        if self.image_genus_zero {
            mark_genus_zero(a)
        } else {
            a.clone()
        }
    }
}

fn gen_spec(f: &Functor, target_cat: &FeynmanPresentation, src_cat: &FeynmanPresentation) -> GenSpec {
    let _ = f;
    let src_marked = src_cat.vertex_kind == VertexKind::GenusMarked;
    GenSpec {
        connected: target_cat.shape.connected,
        forest: target_cat.shape.b1_max == Some(0),
        tgt_genus: None,
        src_genus_marked: src_marked,
        flag_rule: src_cat.flag_rule.clone(),
        conserve_genus: target_cat.vertex_kind == VertexKind::GenusMarked,
        image_genus_zero: !src_marked && target_cat.vertex_kind == VertexKind::GenusMarked,
    }
}

/// Generate, up to canonical form, the base comma structures over one
/// target corolla: source aggregates `X` with an arrow `f(X) -> target`
/// whose total size does not exceed `bound`.
fn gen_structures(
    f: &Functor,
    spec: &GenSpec,
    target: &Obj,
    bound: usize,
) -> Result<Vec<(Obj, GraphMorphism)>, KanError> {
    let tgt = &target.aggregate;
    debug_assert_eq!(tgt.len(), 1);
    let arity = tgt.corolla(0).arity();
    let tgt_genus = if spec.conserve_genus {
        Some(
            tgt.corolla(0)
                .genus
                .ok_or(KanError::Graph(crate::error::GraphError::GenusMissing))?,
        )
    } else {
        spec.tgt_genus
    };
    let mut out: Vec<(Obj, GraphMorphism)> = Vec::new();
    let mut seen: std::collections::HashSet<(GraphMorphism, Option<Vec<u8>>)> =
        std::collections::HashSet::new();
    let vmax = bound.saturating_sub(arity).max(1);
    for v_count in 1..=vmax {
        // Admissible edge counts for this vertex count.
        let e_values: Vec<usize> = match (spec.forest, spec.connected, tgt_genus) {
            (true, true, _) => vec![v_count - 1],
            (_, true, Some(g)) if !spec.src_genus_marked => vec![v_count - 1 + g as usize],
            (_, true, Some(g)) => ((v_count - 1)..=(v_count - 1 + g as usize)).collect(),
            (_, true, None) => {
                let cap = (bound.saturating_sub(arity + v_count)) / 2;
                ((v_count - 1)..=cap.max(v_count - 1)).collect()
            }
            (true, false, _) => (0..=(v_count - 1)).collect(),
            (false, false, g) => {
                let cap = (bound.saturating_sub(arity + v_count)) / 2;
                let hi = match g {
                    Some(g) => (v_count - 1 + g as usize).min(cap.max(0)),
                    None => cap,
                };
                (0..=hi).collect()
            }
        };
        for e_count in e_values {
            let flags_total = arity + 2 * e_count;
            if flags_total + v_count > bound {
                continue;
            }
            // Vertex pairs for edges, loops included.
            let pairs: Vec<(usize, usize)> = (0..v_count)
                .flat_map(|i| (i..v_count).map(move |j| (i, j)))
                .collect();
            let edge_multisets: Vec<Vec<(usize, usize)>> = if e_count == 0 {
                vec![vec![]]
            } else {
                pairs
                    .iter()
                    .copied()
                    .combinations_with_replacement(e_count)
                    .collect()
            };
            let distributions: Vec<Vec<usize>> = if arity == 0 {
                vec![vec![]]
            } else {
                std::iter::repeat(0..v_count)
                    .take(arity)
                    .multi_cartesian_product()
                    .collect()
            };
            for edges in &edge_multisets {
                if spec.forest && edges.iter().any(|&(i, j)| i == j) {
                    continue;
                }
                if spec.connected && !edges_connected(v_count, edges) {
                    continue;
                }
                let defect = e_count as i64 - v_count as i64 + 1;
                for dist in &distributions {
                    // Genus splits over source vertices.
                    let genus_splits: Vec<Vec<u32>> = if spec.src_genus_marked {
                        let g = tgt_genus.unwrap() as i64;
                        let budget = g - defect;
                        if budget < 0 {
                            continue;
                        }
                        compositions(budget as u32, v_count)
                    } else {
                        if let Some(g) = tgt_genus {
                            if defect != g as i64 {
                                continue;
                            }
                        }
                        vec![vec![]]
                    };
                    for genus in &genus_splits {
                        let built = build_structure(
                            spec, target, v_count, edges, dist,
                            if spec.src_genus_marked { Some(genus) } else { None },
                        )?;
                        for (source, arrow) in built {
                            let (canon, _) = canonical_comma(f, None, &source, &arrow);
                            let key = (canon.arrow.clone(), canon.source.marks.clone());
                            if seen.insert(key) {
                                out.push((canon.source, canon.arrow));
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| (&a.1, &a.0.marks).cmp(&(&b.1, &b.0.marks)));
    Ok(out)
}

fn edges_connected(v_count: usize, edges: &[(usize, usize)]) -> bool {
    if v_count <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..v_count).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &(i, j) in edges {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
        }
    }
    (0..v_count).map(|i| find(&mut parent, i)).unique().count() == 1
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Build the concrete aggregate and arrow for one structure, enumerating
/// mark assignments on the ghost flags when a flag rule is present.
fn build_structure(
    spec: &GenSpec,
    target: &Obj,
    v_count: usize,
    edges: &[(usize, usize)],
    dist: &[usize],
    genus: Option<&Vec<u32>>,
) -> Result<Vec<(Obj, GraphMorphism)>, KanError> {
    let tgt = &target.aggregate;
    let arity = tgt.corolla(0).arity();
    // Flags per vertex: external slots in target order, then edge ends.
    let mut flags_of: Vec<Vec<String>> = vec![vec![]; v_count];
    let mut ext_pos: Vec<(usize, usize)> = Vec::with_capacity(arity); // (vertex, local slot)
    for (t_slot, &v) in dist.iter().enumerate() {
        ext_pos.push((v, flags_of[v].len()));
        flags_of[v].push(format!("s{t_slot}"));
    }
    let mut edge_ends: Vec<((usize, usize), (usize, usize))> = Vec::with_capacity(edges.len());
    for (k, &(i, j)) in edges.iter().enumerate() {
        let a = (i, flags_of[i].len());
        flags_of[i].push(format!("e{k}.0"));
        let b = (j, flags_of[j].len());
        flags_of[j].push(format!("e{k}.1"));
        edge_ends.push((a, b));
    }
    let corollas: Vec<Corolla> = (0..v_count)
        .map(|v| Corolla {
            name: format!("v{v}"),
            flags: flags_of[v].clone(),
            genus: genus.map(|g| g[v]),
        })
        .collect();
    let source = Aggregate::new(corollas).map_err(KanError::Graph)?;
    let global = |(v, s): (usize, usize)| source.offset(v) + s;
    let flag_map: Vec<usize> = ext_pos.iter().map(|&p| global(p)).collect();
    let ghost: Vec<(usize, usize)> = edge_ends
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (global(a), global(b));
            (x.min(y), x.max(y))
        })
        .collect();
    let arrow = match GraphMorphism::new(
        spec.image(&source),
        tgt.clone(),
        flag_map,
        vec![0; v_count],
        ghost.clone(),
    ) {
        Ok(m) => m,
        Err(crate::error::GraphError::GenusMismatch { .. })
        | Err(crate::error::GraphError::GenusMissing) => return Ok(vec![]),
        Err(e) => return Err(KanError::Graph(e)),
    };
    // Mark assignments.
    match &spec.flag_rule {
        None => Ok(vec![(
            Obj {
                aggregate: source,
                marks: None,
                decoration: None,
            },
            arrow,
        )]),
        Some(rule) => {
            let tgt_marks = target
                .marks
                .as_ref()
                .ok_or_else(|| KanError::Cat(crate::error::CatError::MarksRequired("comma".into())))?;
            let nf = source.flag_count();
            let mut base_marks = vec![u8::MAX; nf];
            for (t_slot, &pos) in ext_pos.iter().enumerate() {
                base_marks[global(pos)] = tgt_marks[t_slot];
            }
            // Each ghost edge takes a mark and its involute; enumerate the
            // orientations and filter the basepoint condition.
            let per_edge: Vec<Vec<(u8, u8)>> = ghost
                .iter()
                .map(|_| {
                    (0..rule.marks.len() as u8)
                        .map(|m| (m, rule.involution[m as usize] as u8))
                        .collect()
                })
                .collect();
            let mut results = Vec::new();
            for combo in per_edge.iter().map(|v| v.iter()).multi_cartesian_product() {
                let mut marks = base_marks.clone();
                for (&(a, b), &(ma, mb)) in ghost.iter().zip(combo.into_iter()) {
                    marks[a] = ma;
                    marks[b] = mb;
                }
                if marks.iter().any(|&m| m == u8::MAX) {
                    continue;
                }
                let obj = Obj {
                    aggregate: source.clone(),
                    marks: Some(marks),
                    decoration: None,
                };
                results.push((obj, arrow.clone()));
            }
            if ghost.is_empty() {
                results.push((
                    Obj {
                        aggregate: source.clone(),
                        marks: Some(base_marks),
                        decoration: None,
                    },
                    arrow.clone(),
                ));
                results.dedup();
            }
            Ok(results)
        }
    }
}

/// All comma objects of `f` over a single-corolla target, canonical and
/// sorted, within the size bound.
pub fn comma_corolla(f: &Functor, target: &Obj, bound: usize) -> Result<Vec<CommaObject>, KanError> {
    let src_cat = f.source();
    let tgt_cat = f.target();
    if target.size() > bound {
        return Err(KanError::BoundTooSmall {
            bound,
            got: target.size(),
        });
    }
    tgt_cat.check_object(target).map_err(KanError::Cat)?;
    let spec = gen_spec(f, tgt_cat.base(), src_cat.base());
    // Base structures ignore the decoration layers.
    let base_target = Obj {
        aggregate: target.aggregate.clone(),
        marks: target.marks.clone(),
        decoration: None,
    };
    let structures = gen_structures(f, &spec, &base_target, bound)?;
    let mut out: Vec<CommaObject> = Vec::new();
    let mut seen: std::collections::HashSet<(GraphMorphism, Option<Vec<u8>>, Option<Vec<String>>)> =
        std::collections::HashSet::new();
    for (src, arrow) in structures {
        // Validity of the arrow in the target category (shape conditions
        // beyond what generation guaranteed, e.g. directed rules).
        if !tgt_cat.base().admits(&arrow, src.marks.as_deref()) {
            continue;
        }
        match (&src_cat, &tgt_cat) {
            (Cat::Plain(_), Cat::Plain(_)) => {
                let (canon, _) = canonical_comma(f, None, &src, &arrow);
                if seen.insert((canon.arrow.clone(), canon.source.marks.clone(), None)) {
                    out.push(canon);
                }
            }
            (Cat::Dec(d), Cat::Plain(_)) => {
                // Decorated sources over a plain target: any decoration.
                for dec in d.op.eval_object(&src).map_err(KanError::Op)? {
                    let src_dec = Obj {
                        decoration: Some(dec),
                        ..src.clone()
                    };
                    let (canon, _) = canonical_comma(f, Some(&d.op), &src_dec, &arrow);
                    let key = (
                        canon.arrow.clone(),
                        canon.source.marks.clone(),
                        canon.source.decoration.clone(),
                    );
                    if seen.insert(key) {
                        out.push(canon);
                    }
                }
            }
            (Cat::Dec(d), Cat::Dec(t)) => {
                // Decorated on both sides: the arrow must carry the image
                // decoration to the target's.
                let tdec = target
                    .decoration
                    .as_ref()
                    .ok_or(KanError::Cat(crate::error::CatError::DecorationRequired))?;
                for dec in d.op.eval_object(&src).map_err(KanError::Op)? {
                    let src_dec = Obj {
                        decoration: Some(dec),
                        ..src.clone()
                    };
                    let image = f.map_obj(&src_dec)?;
                    let idec = image.decoration.as_ref().unwrap();
                    let reach = t
                        .op
                        .eval_morphism(&arrow, image.marks.as_deref(), idec)
                        .map_err(KanError::Op)?;
                    if !reach.tuples.iter().any(|t| t == tdec) {
                        continue;
                    }
                    let (canon, _) = canonical_comma(f, Some(&d.op), &src_dec, &arrow);
                    let key = (
                        canon.arrow.clone(),
                        canon.source.marks.clone(),
                        canon.source.decoration.clone(),
                    );
                    if seen.insert(key) {
                        out.push(canon);
                    }
                }
            }
            (Cat::Plain(_), Cat::Dec(_)) => {
                return Err(KanError::Op(OpError::UnknownOp(
                    "plain source over decorated target is not used".into(),
                )))
            }
        }
    }
    out.sort_by_key(|c| {
        (
            c.arrow.clone(),
            c.source.marks.clone(),
            c.source.decoration.clone(),
        )
    });
    Ok(out)
}

/// One generating comma morphism out of an enumerated object: the map
/// `xi: X -> Z` of source objects and the residual arrow `psi` with
/// `psi . f(xi) = arrow`.
struct Move {
    xi: GraphMorphism,
    z_obj: Obj,
    psi: GraphMorphism,
}

/// Elementary moves out of a comma object: contract one ghost edge of the
/// arrow (loops only where the source category allows them), or merge two
/// vertices (only where disconnected fibers are allowed).
fn elementary_moves(f: &Functor, src_cat: &Cat, co: &CommaObject) -> Result<Vec<Move>, KanError> {
    let base = src_cat.base();
    let x = &co.source.aggregate;
    let arrow = &co.arrow;
    let mut moves = Vec::new();
    let loops_ok = base.shape.b1_max.is_none();
    let mergers_ok = !base.shape.connected && base.shape.b1_max.is_none();
    let mut kinds: Vec<(Option<(usize, usize)>, usize, usize)> = Vec::new();
    for &(a, b) in arrow.ghost_pairs() {
        let (u, v) = (x.vertex_of(a), x.vertex_of(b));
        if u == v && !loops_ok {
            continue;
        }
        kinds.push((Some((a, b)), u, v));
    }
    if mergers_ok {
        for u in 0..x.len() {
            for v in (u + 1)..x.len() {
                kinds.push((None, u, v));
            }
        }
    }
    for (edge, u, v) in kinds {
        // Genus of the fused vertex under the bookkeeping.
        let genus = if x.genus_marked() {
            let gu = x.corolla(u).genus.unwrap() as i64;
            let gv = if u == v {
                0
            } else {
                x.corolla(v).genus.unwrap() as i64
            };
            let defect: i64 = match (edge, u == v) {
                (Some(_), true) => 1,
                (Some(_), false) => 0,
                (None, _) => -1,
            };
            let g = gu + gv + defect;
            if g < 0 {
                continue;
            }
            Some(g as u32)
        } else {
            None
        };
        // Build Z: fuse u and v, dropping the contracted flags.
        let dropped: Vec<usize> = edge.map(|(a, b)| vec![a, b]).unwrap_or_default();
        let mut z_corollas: Vec<Corolla> = Vec::new();
        let mut z_of_x: Vec<usize> = vec![usize::MAX; x.len()];
        let mut fused_flags: Vec<String> = Vec::new();
        let keep = |g: usize| !dropped.contains(&g);
        for (w, c) in x.corollas().iter().enumerate() {
            if w == u || w == v {
                let off = x.offset(w);
                for (s, fl) in c.flags.iter().enumerate() {
                    if keep(off + s) {
                        fused_flags.push(fl.clone());
                    }
                }
            }
        }
        let mut fused_index = None;
        for (w, c) in x.corollas().iter().enumerate() {
            if w == u || (w == v && v != u) {
                if fused_index.is_none() {
                    fused_index = Some(z_corollas.len());
                    z_corollas.push(Corolla {
                        name: format!("z{w}"),
                        flags: fused_flags.clone(),
                        genus,
                    });
                }
                z_of_x[w] = fused_index.unwrap();
            } else {
                z_of_x[w] = z_corollas.len();
                z_corollas.push(c.clone());
            }
        }
        let z = Aggregate::new(z_corollas).map_err(KanError::Graph)?;
        // xi: X -> Z.
        let z_flag_of_label: HashMap<&str, usize> = z
            .flag_labels()
            .into_iter()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect();
        let xi_flag_map: Vec<usize> = (0..z.flag_count())
            .map(|zf| x.flag_index(z.flag_label(zf)).unwrap())
            .collect();
        let xi = match GraphMorphism::new(
            x.clone(),
            z.clone(),
            xi_flag_map,
            z_of_x.clone(),
            edge.map(|e| vec![e]).unwrap_or_default(),
        ) {
            Ok(m) => m,
            Err(crate::error::GraphError::GenusMismatch { .. }) => continue,
            Err(e) => return Err(KanError::Graph(e)),
        };
        if !base.admits(&xi, co.source.marks.as_deref()) {
            continue;
        }
        // psi: Z -> target with the remaining ghosts.
        let psi_flag_map: Vec<usize> = arrow
            .flag_map()
            .iter()
            .map(|&sf| z_flag_of_label[x.flag_label(sf)])
            .collect();
        let psi_ghost: Vec<(usize, usize)> = arrow
            .ghost_pairs()
            .iter()
            .filter(|&&e| Some(e) != edge)
            .map(|&(a, b)| {
                let (p, q) = (
                    z_flag_of_label[x.flag_label(a)],
                    z_flag_of_label[x.flag_label(b)],
                );
                (p.min(q), p.max(q))
            })
            .collect();
        let psi = match GraphMorphism::new(
            f.image_aggregate(&z),
            arrow.target().clone(),
            psi_flag_map,
            vec![0; z.len()],
            psi_ghost,
        ) {
            Ok(m) => m,
            Err(crate::error::GraphError::GenusMismatch { .. }) => continue,
            Err(e) => return Err(KanError::Graph(e)),
        };
        let z_marks = co
            .source
            .marks
            .as_ref()
            .map(|m| transport_marks(&xi, m));
        moves.push(Move {
            xi,
            z_obj: Obj {
                aggregate: z,
                marks: z_marks,
                decoration: None,
            },
            psi,
        });
    }
    Ok(moves)
}

/// Automorphisms of a comma object: isos of the source commuting with the
/// arrow.
fn comma_automorphisms(src_cat: &Cat, f: &Functor, co: &CommaObject) -> Result<Vec<Mor>, KanError> {
    let plain = Obj {
        aggregate: co.source.aggregate.clone(),
        marks: co.source.marks.clone(),
        decoration: None,
    };
    let homs = match src_cat {
        Cat::Plain(p) => hom_enumerate(p, &plain, &plain).map_err(KanError::Cat)?,
        Cat::Dec(d) => hom_enumerate(&d.base, &plain, &plain).map_err(KanError::Cat)?,
    };
    let mut out = Vec::new();
    for m in homs {
        if !m.base.is_iso() {
            continue;
        }
        let fm = f.map_base(&m.base)?;
        if co.arrow.compose(&fm).map_err(KanError::Graph)? == co.arrow {
            out.push(m);
        }
    }
    Ok(out)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// The truncated colimit of `op` over the comma category of `f` above a
/// single-corolla target.
#[derive(Clone, Debug)]
pub struct PushforwardValue {
    pub target: Obj,
    pub objects: Vec<CommaObject>,
    /// Universe of seeds: (comma object index, op tuple over its source).
    pub universe: Vec<(usize, Vec<String>)>,
    /// Class of each universe element.
    pub class_of: HashMap<(usize, Vec<String>), usize>,
    /// Canonical representative (least member) of each class.
    pub class_reps: Vec<(usize, Vec<String>)>,
    pub stabilized: bool,
    pub bound: usize,
}

impl PushforwardValue {
    pub fn class_count(&self) -> usize {
        self.class_reps.len()
    }

    /// Class of an arbitrary comma pair and op element: canonicalize, look
    /// up, transport.
    pub fn locate(
        &self,
        f: &Functor,
        src_op: Option<&SetOp>,
        op: &SetOp,
        source: &Obj,
        arrow: &GraphMorphism,
        elem: &[String],
    ) -> Result<usize, KanError> {
        let (canon, iso) = canonical_comma(f, src_op, source, arrow);
        let idx = self
            .objects
            .iter()
            .position(|o| *o == canon)
            .ok_or_else(|| KanError::UnknownClass(format!("{:?}", canon.arrow)))?;
        let moved = relabel_decoration(op, &iso, elem).map_err(KanError::Op)?;
        self.class_of
            .get(&(idx, moved.clone()))
            .copied()
            .ok_or_else(|| KanError::UnknownClass(format!("{moved:?}")))
    }
}

/// Compute the pushforward value at a single-corolla target.
pub fn pushforward_at(
    f: &Functor,
    op: &SetOp,
    target: &Obj,
    bound: usize,
) -> Result<PushforwardValue, KanError> {
    let full = compute_push(f, op, target, bound)?;
    let prev = compute_push(f, op, target, bound.saturating_sub(1))?;
    let mut stable = full.class_reps.len() == prev.class_reps.len();
    if stable {
        // The inclusion of universes must induce a bijection of classes.
        let mut seen = std::collections::HashSet::new();
        for rep in &prev.class_reps {
            let obj = &prev.objects[rep.0];
            let idx = full.objects.iter().position(|o| o == obj);
            match idx {
                None => {
                    stable = false;
                    break;
                }
                Some(i) => {
                    let c = full.class_of.get(&(i, rep.1.clone()));
                    match c {
                        Some(&c) => {
                            if !seen.insert(c) {
                                stable = false;
                                break;
                            }
                        }
                        None => {
                            stable = false;
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(PushforwardValue {
        stabilized: stable,
        ..full
    })
}

fn compute_push(
    f: &Functor,
    op: &SetOp,
    target: &Obj,
    bound: usize,
) -> Result<PushforwardValue, KanError> {
    let src_cat = f.source();
    let src_op = src_cat.op().cloned();
    let objects = comma_corolla(f, target, bound)?;
    let index: HashMap<&CommaObject, usize> =
        objects.iter().enumerate().map(|(i, o)| (o, i)).collect();
    let mut universe: Vec<(usize, Vec<String>)> = Vec::new();
    let mut uindex: HashMap<(usize, Vec<String>), usize> = HashMap::new();
    for (i, co) in objects.iter().enumerate() {
        for tuple in op.eval_object(&co.source).map_err(KanError::Op)? {
            let key = (i, tuple);
            uindex.insert(key.clone(), universe.len());
            universe.push(key);
        }
    }
    let mut uf = UnionFind::new(universe.len());
    let mut merge_pairs: Vec<(usize, usize)> = Vec::new();
    for (i, co) in objects.iter().enumerate() {
        // Base isos commuting with the arrow.  They act on the universe
        // over the same object and, for decorated sources, also connect
        // objects that differ only in their decoration.
        for auto in comma_automorphisms(&src_cat, f, co)? {
            let obj_decs: Vec<Option<Vec<String>>> = match (&src_op, &co.source.decoration) {
                (Some(sop), Some(dec)) => sop
                    .eval_morphism(&auto.base, co.source.marks.as_deref(), dec)
                    .map_err(KanError::Op)?
                    .tuples
                    .into_iter()
                    .map(Some)
                    .collect(),
                _ => vec![None],
            };
            for zdec in obj_decs {
                let z_obj = Obj {
                    aggregate: co.source.aggregate.clone(),
                    marks: co.source.marks.as_ref().map(|m| transport_marks(&auto.base, m)),
                    decoration: zdec,
                };
                let (canon, iso) = canonical_comma(f, src_op.as_ref(), &z_obj, &co.arrow);
                let Some(&j) = index.get(&canon) else {
                    continue;
                };
                for (key, &u) in uindex.iter() {
                    if key.0 != i {
                        continue;
                    }
                    let moved = op
                        .eval_morphism(&auto.base, co.source.marks.as_deref(), &key.1)
                        .map_err(KanError::Op)?;
                    for t in moved.tuples {
                        let t2 = relabel_decoration(op, &iso, &t).map_err(KanError::Op)?;
                        if let Some(&w) = uindex.get(&(j, t2)) {
                            merge_pairs.push((u, w));
                        }
                    }
                }
            }
        }
        // Elementary contraction and merger moves.
        for mv in elementary_moves(f, &src_cat, co)? {
            // Object-level decoration transport constrains the move targets.
            let obj_decs: Vec<Option<Vec<String>>> = match (&src_op, &co.source.decoration) {
                (Some(sop), Some(dec)) => sop
                    .eval_morphism(&mv.xi, co.source.marks.as_deref(), dec)
                    .map_err(KanError::Op)?
                    .tuples
                    .into_iter()
                    .map(Some)
                    .collect(),
                _ => vec![None],
            };
            for zdec in obj_decs {
                let z_obj = Obj {
                    decoration: zdec,
                    ..mv.z_obj.clone()
                };
                let (canon, iso) = canonical_comma(f, src_op.as_ref(), &z_obj, &mv.psi);
                let Some(&j) = index.get(&canon) else {
                    // The move lands outside the bound; skip (it cannot,
                    // since moves shrink size, but stay defensive).
                    continue;
                };
                for (key, &u) in uindex.iter() {
                    if key.0 != i {
                        continue;
                    }
                    let moved = op
                        .eval_morphism(&mv.xi, co.source.marks.as_deref(), &key.1)
                        .map_err(KanError::Op)?;
                    for t in moved.tuples {
                        let t2 = relabel_decoration(op, &iso, &t).map_err(KanError::Op)?;
                        if let Some(&w) = uindex.get(&(j, t2)) {
                            merge_pairs.push((u, w));
                        }
                    }
                }
            }
        }
    }
    merge_pairs.sort_unstable();
    for (a, b) in merge_pairs {
        uf.union(a, b);
    }
    // Classes with canonical least representatives.
    let mut roots: HashMap<usize, Vec<usize>> = HashMap::new();
    for u in 0..universe.len() {
        roots.entry(uf.find(u)).or_default().push(u);
    }
    let mut class_reps: Vec<(usize, Vec<String>)> = roots
        .values()
        .map(|members| {
            members
                .iter()
                .map(|&u| universe[u].clone())
                .min()
                .unwrap()
        })
        .collect();
    class_reps.sort();
    let mut class_of = HashMap::new();
    for members in roots.values() {
        let rep = members.iter().map(|&u| universe[u].clone()).min().unwrap();
        let cls = class_reps.iter().position(|r| *r == rep).unwrap();
        for &u in members {
            class_of.insert(universe[u].clone(), cls);
        }
    }
    Ok(PushforwardValue {
        target: target.clone(),
        objects,
        universe,
        class_of,
        class_reps,
        stabilized: true,
        bound,
    })
}

/// Pushforward of an op along a plain-base functor, packaged as an op on
/// the target category.  Values are computed lazily per canonical corolla.
pub struct PushKernel {
    pub functor: Functor,
    pub op: SetOp,
    pub extra: usize,
    values: Mutex<HashMap<Obj, Arc<PushforwardValue>>>,
    name: String,
}

impl std::fmt::Debug for PushKernel {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "PushKernel({})", self.name)
    }
}

impl PushKernel {
    pub fn new(functor: Functor, op: SetOp, extra: usize) -> Arc<Self> {
        let name = format!("push[{}]({})", functor.target().name(), op.name());
        Arc::new(PushKernel {
            functor,
            op,
            extra,
            values: Mutex::new(HashMap::new()),
            name,
        })
    }

    /// Wrap into a `SetOp`.
    pub fn as_op(self: &Arc<Self>) -> SetOp {
        SetOp::Pushforward(self.clone())
    }

    fn target_obj(&self, c: &Corolla) -> Result<Obj, KanError> {
        let obj = Obj::plain(Aggregate::single(c.clone()));
        self.functor
            .target()
            .check_object(&obj)
            .map_err(KanError::Cat)?;
        Ok(obj)
    }

    pub fn value_at(&self, target: &Obj) -> Result<Arc<PushforwardValue>, KanError> {
        let (canon, _) = self.functor.target().canonical(target);
        {
            let cache = self.values.lock().unwrap();
            if let Some(v) = cache.get(&canon) {
                return Ok(v.clone());
            }
        }
        let bound = canon.size() + self.extra;
        let value = Arc::new(pushforward_at(&self.functor, &self.op, &canon, bound)?);
        if !value.stabilized {
            return Err(KanError::Unstable(format!("{:?}", canon.aggregate), bound));
        }
        self.values
            .lock()
            .unwrap()
            .insert(canon.clone(), value.clone());
        Ok(value)
    }

    /// The canonical witness from a corolla object onto its canonical form.
    fn canon_iso(&self, target: &Obj) -> (Obj, GraphMorphism) {
        self.functor.target().canonical(target)
    }

    /// Class of a comma pair whose arrow ends at any corolla object.
    pub fn locate_class(
        &self,
        f: &Functor,
        op: &SetOp,
        source: &Obj,
        arrow_to_target: &GraphMorphism,
    ) -> Result<String, KanError> {
        let _ = f;
        let tgt_obj = Obj::plain(arrow_to_target.target().clone());
        let (canon_t, omega) = self.canon_iso(&tgt_obj);
        let value = self.value_at(&canon_t)?;
        let arrow = omega
            .compose(arrow_to_target)
            .map_err(KanError::Graph)?;
        let dec = source
            .decoration
            .clone()
            .unwrap_or_else(|| vec!["*".into(); source.aggregate.len()]);
        let plain_src = Obj {
            aggregate: source.aggregate.clone(),
            marks: source.marks.clone(),
            decoration: None,
        };
        let src_op = self.functor.source().op().cloned();
        let class = value.locate(&self.functor, src_op.as_ref(), op, &plain_src, &arrow, &dec)?;
        Ok(format!("k{class}"))
    }
}

fn parse_class(elem: &str) -> Result<usize, OpError> {
    elem.strip_prefix('k')
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| OpError::NotInDomain(elem.to_string()))
}

impl PushforwardKernel for PushKernel {
    fn kernel_name(&self) -> String {
        self.name.clone()
    }

    fn home_name(&self) -> String {
        self.functor.target().base().name.clone()
    }

    fn object_set(&self, c: &Corolla) -> Result<Vec<String>, OpError> {
        let obj = self
            .target_obj(c)
            .map_err(|e| OpError::OutsideHome {
                op: self.name.clone(),
                reason: e.to_string(),
            })?;
        let value = self.value_at(&obj).map_err(|e| OpError::OutsideHome {
            op: self.name.clone(),
            reason: e.to_string(),
        })?;
        Ok((0..value.class_count()).map(|i| format!("k{i}")).collect())
    }

    fn relabel(
        &self,
        elem: &str,
        old_of_new: &[usize],
        src: &Corolla,
        dst: &Corolla,
    ) -> Result<String, OpError> {
        let k = parse_class(elem)?;
        let err = |e: KanError| OpError::OutsideHome {
            op: self.name.clone(),
            reason: e.to_string(),
        };
        let src_obj = self.target_obj(src).map_err(err)?;
        let dst_obj = self.target_obj(dst).map_err(err)?;
        let (canon_src, omega_src) = self.canon_iso(&src_obj);
        let (_canon_dst, omega_dst) = self.canon_iso(&dst_obj);
        // sigma: src corolla -> dst corolla from the slot permutation.
        let sigma = GraphMorphism::new(
            src_obj.aggregate.clone(),
            dst_obj.aggregate.clone(),
            old_of_new.to_vec(),
            vec![0],
            vec![],
        )
        .map_err(|e| OpError::OutsideHome {
            op: self.name.clone(),
            reason: e.to_string(),
        })?;
        // tau: canonical -> canonical automorphism.
        let tau = omega_dst
            .compose(&sigma)
            .and_then(|m| m.compose(&omega_src.inverse()?))
            .map_err(|e| OpError::OutsideHome {
                op: self.name.clone(),
                reason: e.to_string(),
            })?;
        let value = self.value_at(&canon_src).map_err(err)?;
        let rep = value
            .class_reps
            .get(k)
            .ok_or_else(|| OpError::NotInDomain(elem.to_string()))?;
        let co = &value.objects[rep.0];
        let arrow = tau.compose(&co.arrow).map_err(|e| OpError::OutsideHome {
            op: self.name.clone(),
            reason: e.to_string(),
        })?;
        let src_op = self.functor.source().op().cloned();
        let class = value
            .locate(&self.functor, src_op.as_ref(), &self.op, &co.source, &arrow, &rep.1)
            .map_err(err)?;
        Ok(format!("k{class}"))
    }

    fn act(&self, phi: &GraphMorphism, inputs: &[&str]) -> Result<Vec<String>, OpError> {
        let err = |e: KanError| OpError::OutsideHome {
            op: self.name.clone(),
            reason: e.to_string(),
        };
        debug_assert_eq!(phi.target().len(), 1);
        let src = phi.source();
        // Resolve each input class to a representative comma pair over the
        // matching source corolla, relabelled apart.
        let mut pieces: Vec<(Obj, GraphMorphism)> = Vec::new();
        for (v, elem) in inputs.iter().enumerate() {
            let k = parse_class(elem)?;
            let c = src.corolla(v);
            let cobj = self.target_obj(c).map_err(err)?;
            let (canon, omega) = self.canon_iso(&cobj);
            let value = self.value_at(&canon).map_err(err)?;
            let rep = value
                .class_reps
                .get(k)
                .ok_or_else(|| OpError::NotInDomain(elem.to_string()))?;
            let co = &value.objects[rep.0];
            // Arrow into the concrete corolla: omega^{-1} . rep arrow.
            let arrow = omega
                .inverse()
                .and_then(|w| w.compose(&co.arrow))
                .map_err(|e| OpError::OutsideHome {
                    op: self.name.clone(),
                    reason: e.to_string(),
                })?;
            // Relabel the source apart.
            let relabeled = prefix_relabel(&co.source.aggregate, &format!("p{v}"));
            let rho = relabeled.iso;
            let rho_inv_img = rho
                .inverse()
                .map_err(KanError::Graph)
                .and_then(|m| self.functor.map_base(&m))
                .map_err(err)?;
            let arrow2 = arrow.compose(&rho_inv_img).map_err(|e| OpError::OutsideHome {
                op: self.name.clone(),
                reason: e.to_string(),
            })?;
            let dec = rep.1.clone();
            let dec2 = relabel_decoration(&self.op, &rho, &dec)?;
            let marks2 = co.source.marks.as_ref().map(|m| transport_marks(&rho, m));
            pieces.push((
                Obj {
                    aggregate: relabeled.object,
                    marks: marks2,
                    decoration: Some(dec2),
                },
                arrow2,
            ));
        }
        // Tensor the pieces; their targets concatenate to phi's source.
        let mut total_arrow: Option<GraphMorphism> = None;
        let mut total_src: Option<Obj> = None;
        for (obj, arrow) in &pieces {
            total_arrow = Some(match total_arrow {
                None => arrow.clone(),
                Some(t) => t.tensor(arrow).map_err(|e| OpError::OutsideHome {
                    op: self.name.clone(),
                    reason: e.to_string(),
                })?,
            });
            total_src = Some(match total_src {
                None => obj.clone(),
                Some(t) => crate::decorate::dec_tensor(&t, obj).map_err(|e| {
                    OpError::OutsideHome {
                        op: self.name.clone(),
                        reason: e.to_string(),
                    }
                })?,
            });
        }
        let (total_src, big) = match (total_src, total_arrow) {
            (Some(s), Some(a)) => (s, a),
            _ => {
                // Nullary action: the arrow is phi itself from the empty
                // source.
                let empty = Obj {
                    aggregate: Aggregate::empty(),
                    marks: None,
                    decoration: Some(vec![]),
                };
                (empty, GraphMorphism::identity(&Aggregate::empty()))
            }
        };
        let total = if big.source().is_empty() && !phi.source().is_empty() {
            return Err(OpError::TupleLength {
                expected: phi.source().len(),
                got: 0,
            });
        } else if phi.source().is_empty() {
            phi.clone()
        } else {
            phi.compose(&big).map_err(|e| OpError::OutsideHome {
                op: self.name.clone(),
                reason: e.to_string(),
            })?
        };
        let dec = total_src.decoration.clone().unwrap_or_default();
        let class = self
            .locate_class(
                &self.functor,
                &self.op,
                &Obj {
                    aggregate: total_src.aggregate,
                    marks: total_src.marks,
                    decoration: Some(dec),
                },
                &total,
            )
            .map_err(err)?;
        Ok(vec![class])
    }
}

struct Relabeled {
    object: Aggregate,
    iso: GraphMorphism,
}

/// Rename all labels of an aggregate with a prefix, returning the witness.
fn prefix_relabel(a: &Aggregate, prefix: &str) -> Relabeled {
    let corollas: Vec<Corolla> = a
        .corollas()
        .iter()
        .map(|c| Corolla {
            name: format!("{prefix}.{}", c.name),
            flags: c
                .flags
                .iter()
                .map(|f| format!("{prefix}.{f}"))
                .collect(),
            genus: c.genus,
        })
        .collect();
    let object = Aggregate::new(corollas).expect("prefix relabel");
    let iso = GraphMorphism::new(
        a.clone(),
        object.clone(),
        (0..a.flag_count()).collect(),
        (0..a.len()).collect(),
        vec![],
    )
    .expect("prefix relabel iso");
    Relabeled { object, iso }
}

// Needed by `pushed_kernel` to recover the concrete kernel type.
impl PushKernel {
    pub fn as_any(self: Arc<Self>) -> Arc<dyn std::any::Any + Send + Sync> {
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::builtin_category;

    fn star_obj(n: usize) -> Obj {
        Obj::plain(Aggregate::single(
            Corolla::new("t", (0..n).map(|i| format!("a{i}")).collect()).unwrap(),
        ))
    }

    fn star_genus(n: usize, g: u32) -> Obj {
        Obj::plain(Aggregate::single(
            Corolla::with_genus("t", (0..n).map(|i| format!("a{i}")).collect(), g).unwrap(),
        ))
    }

    /// The identity comma object is terminal, so the pushforward along the
    /// identity recovers the op itself.
    #[test]
    fn identity_pushforward_recovers_op() {
        let c = Cat::Plain(builtin_category("C").unwrap());
        let f = Functor::Id(c);
        let target = star_obj(4);
        let v = pushforward_at(&f, &SetOp::CycAss, &target, target.size() + 4).unwrap();
        assert!(v.stabilized);
        assert_eq!(v.class_count(), 6);
        // Each cyclic order lands in its own class through the identity
        // comma pair.
        let id = GraphMorphism::identity(&target.aggregate);
        let mut seen = std::collections::HashSet::new();
        for e in SetOp::CycAss.eval_object(&target).unwrap() {
            let k = v
                .locate(&f, None, &SetOp::CycAss, &target, &id, &e)
                .unwrap();
            assert!(seen.insert(k));
        }
    }

    /// Genus-zero modular envelope of the cyclic-order op: the classes over
    /// a genus-zero corolla biject with the cyclic orders.
    #[test]
    fn genus_zero_envelope_counts_cyclic_orders() {
        let f = Functor::TreesToModular;
        for n in 3..=4usize {
            let target = star_genus(n, 0);
            let v = pushforward_at(&f, &SetOp::CycAss, &target, target.size() + 6).unwrap();
            assert!(v.stabilized, "not stabilized at n={n}");
            let expect: usize = (1..n).product();
            assert_eq!(v.class_count(), expect, "n={n}");
        }
    }

    /// One loop of modular genus: gluing two legs of a polygon.  The
    /// classes count ribbon structures, finite and stable.
    #[test]
    fn genus_one_envelope_is_stable() {
        let f = Functor::TreesToModular;
        let target = star_genus(1, 1);
        let v = pushforward_at(&f, &SetOp::CycAss, &target, target.size() + 8).unwrap();
        assert!(v.stabilized);
        assert!(v.class_count() >= 1);
        // Sources must carry one self-gluing: smallest is the 3-flag
        // corolla with one ghost loop.
        assert!(v
            .objects
            .iter()
            .all(|o| o.arrow.ghost_invariants()[0].euler_defect == 1));
    }

    /// Pushing the terminal op along trees-into-modular yields the terminal
    /// op again (the comma categories are connected).
    #[test]
    fn terminal_pushes_to_terminal_small() {
        let f = Functor::TreesToModular;
        for (n, g) in [(2usize, 0u32), (3, 0), (1, 1), (2, 1)] {
            let target = star_genus(n, g);
            let v = pushforward_at(&f, &SetOp::Triv, &target, target.size() + 6).unwrap();
            assert!(v.stabilized);
            assert_eq!(v.class_count(), 1, "n={n} g={g}");
        }
    }

    /// Pushforward along the forgetful functor of a decorated category
    /// recovers the decoration sets (the decoration-recovery theorem, at
    /// one corolla).
    #[test]
    fn forget_pushforward_recovers_decoration() {
        let c = builtin_category("C").unwrap();
        let d = DecoratedPresentation::new(c, SetOp::CycAss);
        let f = Functor::ForgetDec(d);
        let triv = crate::decorate::pullback_op(
            crate::setops::PullbackFunctor::ForgetMarks,
            SetOp::Triv,
        );
        let target = star_obj(3);
        let v = pushforward_at(&f, &triv, &target, target.size() + 4).unwrap();
        assert!(v.stabilized);
        assert_eq!(v.class_count(), 2);
    }

    /// The pushforward op kernel: values, relabelling, and action.
    #[test]
    fn kernel_acts_by_gluing_representatives() {
        let kernel = PushKernel::new(Functor::TreesToModular, SetOp::CycAss, 8);
        let c3 = Corolla::with_genus("x", vec!["a".into(), "b".into(), "c".into()], 0).unwrap();
        let set = kernel.object_set(&c3).unwrap();
        assert_eq!(set.len(), 2);
        // Graft two genus-zero classes along one edge: the result lives at
        // the 4-flag genus-zero corolla, which has 6 classes.
        let x = Aggregate::new(vec![
            Corolla::with_genus("u", vec!["p".into(), "q".into(), "e".into()], 0).unwrap(),
            Corolla::with_genus("w", vec!["e2".into(), "r".into(), "s".into()], 0).unwrap(),
        ])
        .unwrap();
        let y = Aggregate::single(
            Corolla::with_genus(
                "t",
                vec!["z0".into(), "z1".into(), "z2".into(), "z3".into()],
                0,
            )
            .unwrap(),
        );
        let phi = GraphMorphism::new(x, y, vec![0, 1, 4, 5], vec![0, 0], vec![(2, 3)]).unwrap();
        let out = kernel.act(&phi, &[&set[0], &set[1]]).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].starts_with('k'));
        // Self-gluing raises the modular genus.
        let x2 = Aggregate::single(
            Corolla::with_genus(
                "u",
                vec!["p".into(), "q".into(), "r".into(), "s".into()],
                0,
            )
            .unwrap(),
        );
        let y2 = Aggregate::single(
            Corolla::with_genus("t", vec!["z0".into(), "z1".into()], 1).unwrap(),
        );
        let glue = GraphMorphism::new(x2, y2, vec![0, 1], vec![0], vec![(2, 3)]).unwrap();
        let c4 = Corolla::with_genus(
            "x",
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            0,
        )
        .unwrap();
        let set4 = kernel.object_set(&c4).unwrap();
        let out2 = kernel.act(&glue, &[&set4[0]]).unwrap();
        assert_eq!(out2.len(), 1);
    }

    /// Merge order does not change the class partition: shuffling the
    /// comma-object list is immaterial because the union-find closure is
    /// generated by the same relation.
    #[test]
    fn classes_independent_of_bound_slack() {
        let f = Functor::TreesToModular;
        let target = star_genus(3, 0);
        let a = pushforward_at(&f, &SetOp::CycAss, &target, target.size() + 4).unwrap();
        let b = pushforward_at(&f, &SetOp::CycAss, &target, target.size() + 7).unwrap();
        assert_eq!(a.class_count(), b.class_count());
    }
}

//! Decorated categories: objects are pairs of a base object and an element
//! of an op evaluated there; morphisms are base morphisms carrying the
//! source element to the target element.

use crate::canonical::{canonical_aggregate, VertexPayload};
use crate::category::{hom_enumerate, transport_marks, FeynmanPresentation, Mor, Obj};
use crate::error::CatError;
use crate::graph::GraphMorphism;
use crate::setops::{relabel_decoration, OpNatTrans, SetOp};

#[derive(Clone, Debug)]
pub struct DecoratedPresentation {
    pub base: FeynmanPresentation,
    pub op: SetOp,
}

impl DecoratedPresentation {
    pub fn new(base: FeynmanPresentation, op: SetOp) -> Self {
        DecoratedPresentation { base, op }
    }

    pub fn name(&self) -> String {
        format!("{}_dec[{}]", self.base.name, self.op.name())
    }

    pub fn check_object(&self, obj: &Obj) -> Result<(), CatError> {
        self.base.check_object(&Obj {
            aggregate: obj.aggregate.clone(),
            marks: obj.marks.clone(),
            decoration: None,
        })?;
        let dec = obj
            .decoration
            .as_ref()
            .ok_or(CatError::DecorationRequired)?;
        let sets = self.op.object_sets(&strip(obj))?;
        if dec.len() != sets.len() {
            return Err(CatError::Op(crate::error::OpError::TupleLength {
                expected: sets.len(),
                got: dec.len(),
            }));
        }
        for (e, set) in dec.iter().zip(&sets) {
            if !set.contains(e) {
                return Err(CatError::Op(crate::error::OpError::NotInDomain(e.clone())));
            }
        }
        Ok(())
    }

    /// Is `base` a decorated morphism from `x` to the decoration `tgt_dec`?
    /// Membership, not equality: relational ops reach a set of decorations.
    pub fn preserves(&self, base: &GraphMorphism, x: &Obj, tgt_dec: &[String]) -> bool {
        let dec = x.decoration.as_ref().expect("decorated source");
        match self
            .op
            .eval_morphism(base, x.marks.as_deref(), dec)
        {
            Ok(out) => out.tuples.iter().any(|t| t == tgt_dec),
            Err(_) => false,
        }
    }

    /// Decoration-preserving morphisms between two decorated objects:
    /// exactly the base morphisms whose action carries one decoration to
    /// the other.
    pub fn dec_hom(&self, x: &Obj, y: &Obj) -> Result<Vec<Mor>, CatError> {
        self.check_object(x)?;
        self.check_object(y)?;
        let bx = strip(x);
        let by = strip(y);
        let tgt_dec = y.decoration.as_ref().unwrap();
        let homs = hom_enumerate(&self.base, &bx, &by)?;
        Ok(homs
            .into_iter()
            .filter(|m| self.preserves(&m.base, x, tgt_dec))
            .map(|m| Mor {
                base: m.base,
                src: x.clone(),
                tgt: y.clone(),
            })
            .collect())
    }

    /// All decorated objects over the canonical base objects within bounds.
    pub fn objects_up_to(
        &self,
        max_flags: usize,
        max_vertices: usize,
        max_genus: u32,
    ) -> Result<Vec<Obj>, CatError> {
        let mut out = Vec::new();
        for base in crate::category::objects_up_to(&self.base, max_flags, max_vertices, max_genus)
        {
            for dec in self.op.eval_object(&base)? {
                let obj = Obj {
                    aggregate: base.aggregate.clone(),
                    marks: base.marks.clone(),
                    decoration: Some(dec),
                };
                let (canon, _) = canonical_obj(Some(&self.op), &obj);
                if !out.contains(&canon) {
                    out.push(canon);
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

fn strip(obj: &Obj) -> Obj {
    Obj {
        aggregate: obj.aggregate.clone(),
        marks: obj.marks.clone(),
        decoration: None,
    }
}

/// Tensor of decorated objects: disjoint union of bases, concatenated marks
/// and decorations.  The unit is the empty object with the empty tuple.
pub fn dec_tensor(x: &Obj, y: &Obj) -> Result<Obj, CatError> {
    let aggregate = x.aggregate.tensor(&y.aggregate)?;
    let marks = match (&x.marks, &y.marks) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
        (None, None) => None,
        (a, b) => {
            if x.aggregate.is_empty() {
                b.clone()
            } else if y.aggregate.is_empty() {
                a.clone()
            } else {
                return Err(CatError::UnexpectedMarks("tensor".into()));
            }
        }
    };
    let decoration = match (&x.decoration, &y.decoration) {
        (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
        (None, None) => None,
        (a, b) => {
            if x.aggregate.is_empty() {
                b.clone()
            } else if y.aggregate.is_empty() {
                a.clone()
            } else {
                return Err(CatError::DecorationRequired);
            }
        }
    };
    Ok(Obj {
        aggregate,
        marks,
        decoration,
    })
}

pub fn dec_unit() -> Obj {
    Obj {
        aggregate: crate::graph::Aggregate::empty(),
        marks: None,
        decoration: Some(vec![]),
    }
}

/// Pull an op back along a functor of presentations (precomposition).
pub fn pullback_op(along: crate::setops::PullbackFunctor, op: SetOp) -> SetOp {
    SetOp::Pullback {
        inner: Box::new(op),
        along,
    }
}

/// Transport a decorated object along a natural transformation of ops.
pub fn apply_sigma(nat: &OpNatTrans, x: &Obj) -> Obj {
    let dec = x
        .decoration
        .as_ref()
        .map(|d| nat.apply(&x.aggregate, d));
    Obj {
        aggregate: x.aggregate.clone(),
        marks: x.marks.clone(),
        decoration: dec,
    }
}

struct FullPayload<'a> {
    obj: &'a Obj,
    op: Option<&'a SetOp>,
}

impl VertexPayload for FullPayload<'_> {
    fn payload(&self, vertex: usize, slot_map: &[usize]) -> String {
        let mut parts: Vec<String> = Vec::new();
        if let Some(marks) = &self.obj.marks {
            let off = self.obj.aggregate.offset(vertex);
            parts.push(
                slot_map
                    .iter()
                    .map(|&s| marks[off + s].to_string())
                    .collect::<Vec<_>>()
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

/// Canonicalize an object together with its marks and decoration; the
/// witness iso maps the original onto the canonical object.
pub fn canonical_obj(op: Option<&SetOp>, obj: &Obj) -> (Obj, GraphMorphism) {
    let needs_payload = obj.marks.is_some() || obj.decoration.is_some();
    let canon = if needs_payload {
        let payload = FullPayload { obj, op };
        canonical_aggregate(&obj.aggregate, Some(&payload))
    } else {
        canonical_aggregate(&obj.aggregate, None)
    };
    let marks = obj
        .marks
        .as_ref()
        .map(|m| transport_marks(&canon.iso, m));
    let decoration = match (&obj.decoration, op) {
        (Some(dec), Some(op)) => {
            Some(relabel_decoration(op, &canon.iso, dec).expect("canonical transport"))
        }
        (Some(_), None) => panic!("decorated object canonicalized without its op"),
        _ => None,
    };
    (
        Obj {
            aggregate: canon.object,
            marks,
            decoration,
        },
        canon.iso,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::builtin_category;
    use crate::graph::{Aggregate, Corolla};

    fn star(n: usize, name: &str, prefix: &str) -> Aggregate {
        Aggregate::single(
            Corolla::new(name, (0..n).map(|i| format!("{prefix}{i}")).collect()).unwrap(),
        )
    }

    #[test]
    fn trivial_decoration_preserves_hom_counts() {
        let g = builtin_category("G").unwrap();
        let d = DecoratedPresentation::new(g.clone(), SetOp::Triv);
        let x = Obj {
            aggregate: star(4, "u", "a"),
            marks: None,
            decoration: Some(vec!["*".into()]),
        };
        let y = Obj {
            aggregate: star(2, "w", "b"),
            marks: None,
            decoration: Some(vec!["*".into()]),
        };
        let base = hom_enumerate(&g, &strip(&x), &strip(&y)).unwrap();
        let dec = d.dec_hom(&x, &y).unwrap();
        assert_eq!(base.len(), dec.len());
        assert_eq!(dec.len(), 12);
    }

    /// Direct splice on label words, independent of the op machinery:
    /// substitute the partner's word (read after its glued flag) at the
    /// position of the glued flag, then restrict to target labels.
    fn label_splice(m: &Mor) -> Vec<String> {
        let src = m.base.source();
        let dec = m.src.decoration.as_ref().unwrap();
        let mut words: Vec<Vec<usize>> = dec
            .iter()
            .enumerate()
            .map(|(v, d)| {
                let off = src.offset(v);
                if d.is_empty() {
                    vec![]
                } else {
                    d.split(',')
                        .map(|t| off + t.parse::<usize>().unwrap())
                        .collect()
                }
            })
            .collect();
        for &(a, b) in m.base.ghost_pairs() {
            let ia = words.iter().position(|w| w.contains(&a)).unwrap();
            let ib = words.iter().position(|w| w.contains(&b)).unwrap();
            assert_ne!(ia, ib);
            let wa = words[ia].clone();
            let wb = words[ib].clone();
            let pa = wa.iter().position(|&f| f == a).unwrap();
            let pb = wb.iter().position(|&f| f == b).unwrap();
            let mut merged: Vec<usize> = Vec::new();
            merged.extend(wa.iter().cycle().skip(pa + 1).take(wa.len() - 1));
            merged.extend(wb.iter().cycle().skip(pb + 1).take(wb.len() - 1));
            let (lo, hi) = (ia.min(ib), ia.max(ib));
            words.remove(hi);
            words.remove(lo);
            words.push(merged);
        }
        assert_eq!(words.len(), 1);
        let word = &words[0];
        let inv: std::collections::HashMap<usize, usize> = m
            .base
            .flag_map()
            .iter()
            .enumerate()
            .map(|(tf, &sf)| (sf, tf))
            .collect();
        let slots: Vec<usize> = word.iter().map(|f| inv[f]).collect();
        let canon = crate::setops::canon_cyclic(&slots);
        vec![canon
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")]
    }

    /// Planar grafting: for every target cyclic order, the decorated
    /// hom-set is exactly the set of base gluings whose splice matches.
    #[test]
    fn planar_grafting_matches_splice_oracle() {
        let c = builtin_category("C").unwrap();
        let d = DecoratedPresentation::new(c.clone(), SetOp::CycAss);
        let x_base = Aggregate::new(vec![
            Corolla::new("u", vec!["a".into(), "b".into(), "e".into()]).unwrap(),
            Corolla::new("w", vec!["e2".into(), "c".into(), "dd".into()]).unwrap(),
        ])
        .unwrap();
        let y_base = star(4, "t", "z");
        let x = Obj {
            aggregate: x_base,
            marks: None,
            decoration: Some(vec!["0,1,2".into(), "0,1,2".into()]),
        };
        let base = hom_enumerate(&c, &strip(&x), &Obj::plain(y_base.clone())).unwrap();
        let mut total = 0;
        for dec in SetOp::CycAss
            .eval_object(&Obj::plain(y_base.clone()))
            .unwrap()
        {
            let y = Obj {
                aggregate: y_base.clone(),
                marks: None,
                decoration: Some(dec.clone()),
            };
            let got = d.dec_hom(&x, &y).unwrap().len();
            let oracle = base
                .iter()
                .filter(|m| {
                    label_splice(&Mor {
                        base: m.base.clone(),
                        src: x.clone(),
                        tgt: y.clone(),
                    }) == dec
                })
                .count();
            assert_eq!(got, oracle);
            total += got;
        }
        // Each base gluing preserves exactly one target order.
        assert_eq!(total, base.len());
        // A pinned gluing reaches exactly one target order; all others are
        // empty for it.
        let pinned = &base[0];
        let reached = label_splice(&Mor {
            base: pinned.base.clone(),
            src: x.clone(),
            tgt: pinned.tgt.clone(),
        });
        let mut hits = 0;
        for dec in SetOp::CycAss
            .eval_object(&Obj::plain(y_base.clone()))
            .unwrap()
        {
            if d.preserves(&pinned.base, &x, &dec) {
                hits += 1;
                assert_eq!(dec, reached);
            }
        }
        assert_eq!(hits, 1);
    }

    #[test]
    fn tensor_unit_is_neutral() {
        let x = Obj {
            aggregate: star(3, "u", "a"),
            marks: None,
            decoration: Some(vec!["0,1,2".into()]),
        };
        let t = dec_tensor(&x, &dec_unit()).unwrap();
        assert_eq!(t.aggregate, x.aggregate);
        assert_eq!(t.decoration, x.decoration);
    }

    #[test]
    fn tensor_symmetry_up_to_canonical_form() {
        let x = Obj {
            aggregate: star(3, "u", "a"),
            marks: None,
            decoration: Some(vec!["0,2,1".into()]),
        };
        let y = Obj {
            aggregate: star(2, "w", "b"),
            marks: None,
            decoration: Some(vec!["0,1".into()]),
        };
        let xy = dec_tensor(&x, &y).unwrap();
        let yx = dec_tensor(&y, &x).unwrap();
        let (cxy, _) = canonical_obj(Some(&SetOp::CycAss), &xy);
        let (cyx, _) = canonical_obj(Some(&SetOp::CycAss), &yx);
        assert_eq!(cxy, cyx);
    }

    #[test]
    fn decoration_count_is_multiplicative() {
        let x = star(3, "u", "a");
        let y = star(3, "w", "b");
        let xy = x.tensor(&y).unwrap();
        let cx = SetOp::CycAss.object_count(&Obj::plain(x)).unwrap();
        let cy = SetOp::CycAss.object_count(&Obj::plain(y)).unwrap();
        let cxy = SetOp::CycAss.object_count(&Obj::plain(xy)).unwrap();
        assert_eq!(cxy, cx * cy);
    }

    #[test]
    fn composition_of_preserving_morphisms_preserves() {
        // Follows from the functor laws; checked directly on an instance.
        let c = builtin_category("C").unwrap();
        let d = DecoratedPresentation::new(c, SetOp::CycAss);
        let x = Obj {
            aggregate: Aggregate::new(vec![
                Corolla::new("u", vec!["a".into(), "e".into()]).unwrap(),
                Corolla::new("w", vec!["e2".into(), "b".into(), "c".into()]).unwrap(),
            ])
            .unwrap(),
            marks: None,
            decoration: Some(vec!["0,1".into(), "0,1,2".into()]),
        };
        for y in d.objects_up_to(3, 1, 0).unwrap() {
            for m in d.dec_hom(&x, &y).unwrap() {
                for z in d.objects_up_to(3, 1, 0).unwrap() {
                    for n in d.dec_hom(&m.tgt, &z).unwrap() {
                        let comp = n.base.compose(&m.base).unwrap();
                        assert!(d.preserves(&comp, &x, z.decoration.as_ref().unwrap()));
                    }
                }
            }
        }
    }
}

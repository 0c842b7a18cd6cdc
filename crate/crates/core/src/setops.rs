//! Finite-set-valued ops: the decorations.
//!
//! An op assigns to every corolla an explicit finite set of canonical
//! element strings, to every relabelling a bijection of those sets, and to
//! every one-corolla-target morphism an action on tuples of elements.
//! Cyclic and linear orders are encoded as words of flag slots; the
//! canonical representative of a cyclic order is its least rotation, of a
//! dihedral order the least over rotations and reversals.
//!
//! Actions are set-valued.  Every op except the dihedral one is
//! single-valued; the dihedral splice genuinely branches over the relative
//! orientations of the glued vertices, and the functor laws it satisfies are
//! the relational ones (see `check_functor`).

use std::sync::Arc;

use itertools::Itertools;

use crate::category::{builtin_category, FeynmanPresentation, Obj};
use crate::error::OpError;
use crate::graph::{Aggregate, Corolla, GraphMorphism};

/// Pushforward ops are produced by the colimit machinery; the trait keeps
/// this module independent of it.
pub trait PushforwardKernel: Send + Sync + std::fmt::Debug {
    fn kernel_name(&self) -> String;
    fn home_name(&self) -> String;
    fn object_set(&self, c: &Corolla) -> Result<Vec<String>, OpError>;
    fn relabel(
        &self,
        elem: &str,
        old_of_new: &[usize],
        src: &Corolla,
        dst: &Corolla,
    ) -> Result<String, OpError>;
    fn act(&self, phi: &GraphMorphism, inputs: &[&str]) -> Result<Vec<String>, OpError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PullbackFunctor {
    /// Precompose with the identity.
    Identity,
    /// Precompose with the functor that forgets flag marks (e.g. rooted
    /// corollas to plain ones).
    ForgetMarks,
    /// Precompose with the inclusion that marks every corolla with genus 0.
    AddGenusZero,
}

#[derive(Clone, Debug)]
pub enum SetOp {
    /// One-point set everywhere; the terminal op.
    Triv,
    /// Linear orders on the non-root flags of a rooted corolla.
    Ass,
    /// Cyclic orders on the flags.
    CycAss,
    /// Cyclic orders modulo reversal.
    CycDihed,
    /// Naturals up to a cap, with the first Betti number added on morphisms.
    GenusN { cap: u32 },
    /// Mark tuples `X^S` with restriction as the action.
    DirSet {
        marks: Vec<String>,
        involution: Vec<usize>,
        basepoint: Option<usize>,
    },
    /// Precomposition of an op with a functor.
    Pullback {
        inner: Box<SetOp>,
        along: PullbackFunctor,
    },
    /// Colimit classes of a pushforward, backed by the kan machinery.
    Pushforward(Arc<dyn PushforwardKernel>),
    /// User-defined symmetric table op.
    Table(Arc<OpTable>),
}

impl PartialEq for SetOp {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

/// Outcome of a generator action: a non-empty set of elements, plus whether
/// truncated arithmetic saturated along the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActOutput {
    pub elems: Vec<String>,
    pub saturated: bool,
}

impl ActOutput {
    fn single(e: String) -> Self {
        ActOutput {
            elems: vec![e],
            saturated: false,
        }
    }
}

pub fn builtin_op(name: &str) -> Result<SetOp, OpError> {
    if let Some(cap) = name.strip_prefix("GenusN:") {
        let cap: u32 = cap
            .parse()
            .map_err(|_| OpError::UnknownOp(name.to_string()))?;
        return Ok(SetOp::GenusN { cap });
    }
    match name {
        "Triv" => Ok(SetOp::Triv),
        "Ass" => Ok(SetOp::Ass),
        "CycAss" => Ok(SetOp::CycAss),
        "CycDihed" => Ok(SetOp::CycDihed),
        "GenusN" => Err(OpError::MissingCap),
        "DirSet" => Ok(SetOp::DirSet {
            marks: vec!["out".into(), "in".into()],
            involution: vec![1, 0],
            basepoint: None,
        }),
        "Rooted" => Ok(SetOp::DirSet {
            marks: vec!["out".into(), "in".into()],
            involution: vec![1, 0],
            basepoint: Some(0),
        }),
        other => Err(OpError::UnknownOp(other.to_string())),
    }
}

/// The terminal op.
pub fn terminal_op() -> SetOp {
    SetOp::Triv
}

fn parse_word(elem: &str) -> Vec<usize> {
    if elem.is_empty() {
        return vec![];
    }
    elem.split(',').map(|t| t.parse().unwrap()).collect()
}

fn word_string(w: &[usize]) -> String {
    w.iter().map(|s| s.to_string()).join(",")
}

/// Least rotation of a cyclic word.
pub fn canon_cyclic(w: &[usize]) -> Vec<usize> {
    if w.is_empty() {
        return vec![];
    }
    (0..w.len())
        .map(|r| {
            let mut v = w.to_vec();
            v.rotate_left(r);
            v
        })
        .min()
        .unwrap()
}

/// Least over rotations of the word and of its reversal.
pub fn canon_dihedral(w: &[usize]) -> Vec<usize> {
    let fwd = canon_cyclic(w);
    let mut rev = w.to_vec();
    rev.reverse();
    fwd.min(canon_cyclic(&rev))
}

/// Graft cyclic words along ghost edges forming a tree across them.
/// `words` holds one cyclic word of global flag ids per source vertex.
fn splice_cyclic(
    mut words: Vec<Vec<usize>>,
    ghosts: &[(usize, usize)],
) -> Result<Vec<usize>, OpError> {
    let find = |words: &[Vec<usize>], f: usize| words.iter().position(|w| w.contains(&f));
    for &(a, b) in ghosts {
        let ia = find(&words, a).ok_or_else(|| OpError::OutsideHome {
            op: "cyclic splice".into(),
            reason: format!("flag {a} already consumed"),
        })?;
        let ib = find(&words, b).unwrap_or(usize::MAX);
        if ia == ib || ib == usize::MAX {
            return Err(OpError::OutsideHome {
                op: "cyclic splice".into(),
                reason: "ghost edge closes a loop; only tree gluings act".into(),
            });
        }
        let wa = words[ia].clone();
        let wb = words[ib].clone();
        let pa = wa.iter().position(|&f| f == a).unwrap();
        let pb = wb.iter().position(|&f| f == b).unwrap();
        // Sequence after `a`, then sequence after `b`.
        let mut merged: Vec<usize> = Vec::with_capacity(wa.len() + wb.len() - 2);
        merged.extend(wa.iter().cycle().skip(pa + 1).take(wa.len() - 1));
        merged.extend(wb.iter().cycle().skip(pb + 1).take(wb.len() - 1));
        let (lo, hi) = (ia.min(ib), ia.max(ib));
        words.remove(hi);
        words.remove(lo);
        words.push(merged);
    }
    if words.len() != 1 {
        return Err(OpError::OutsideHome {
            op: "cyclic splice".into(),
            reason: "gluing is not connected".into(),
        });
    }
    Ok(words.pop().unwrap())
}

/// Per-vertex cyclic words in global flag ids from local slot words.
fn global_words(x: &Aggregate, dec: &[&str]) -> Vec<Vec<usize>> {
    dec.iter()
        .enumerate()
        .map(|(v, d)| {
            let off = x.offset(v);
            parse_word(d).into_iter().map(|s| off + s).collect()
        })
        .collect()
}

/// Map a spliced word of surviving global flags to target slots.
fn to_target_slots(phi: &GraphMorphism, word: &[usize]) -> Result<Vec<usize>, OpError> {
    let mut inv = std::collections::HashMap::new();
    for (tf, &sf) in phi.flag_map().iter().enumerate() {
        inv.insert(sf, tf);
    }
    word.iter()
        .map(|f| {
            inv.get(f).copied().ok_or_else(|| OpError::OutsideHome {
                op: "cyclic splice".into(),
                reason: format!("flag {f} survived the splice but is not external"),
            })
        })
        .collect()
}

impl SetOp {
    pub fn name(&self) -> String {
        match self {
            SetOp::Triv => "Triv".into(),
            SetOp::Ass => "Ass".into(),
            SetOp::CycAss => "CycAss".into(),
            SetOp::CycDihed => "CycDihed".into(),
            SetOp::GenusN { cap } => format!("GenusN:{cap}"),
            SetOp::DirSet {
                basepoint: Some(_), ..
            } => "Rooted".into(),
            SetOp::DirSet { .. } => "DirSet".into(),
            SetOp::Pullback { inner, along } => format!("{:?}*({})", along, inner.name()),
            SetOp::Pushforward(k) => k.kernel_name(),
            SetOp::Table(t) => t.name.clone(),
        }
    }

    /// Whether the action can return more than one element.
    pub fn relational(&self) -> bool {
        match self {
            SetOp::CycDihed => true,
            SetOp::Pullback { inner, .. } => inner.relational(),
            _ => false,
        }
    }

    /// The presentation whose morphisms this op acts along.  The genus op
    /// lives over connected graphs, where the Euler-defect bump agrees with
    /// the first Betti number and never goes negative.
    pub fn home(&self) -> FeynmanPresentation {
        let name = match self {
            SetOp::Triv | SetOp::DirSet { .. } | SetOp::Table(_) => "G",
            SetOp::GenusN { .. } => "G_ctd",
            SetOp::Ass => "O",
            SetOp::CycAss | SetOp::CycDihed => "C",
            SetOp::Pullback { .. } => "C",
            SetOp::Pushforward(k) => return builtin_category(&k.home_name()).unwrap(),
        };
        builtin_category(name).unwrap()
    }

    /// The explicit element set at one corolla.
    pub fn object_set(&self, c: &Corolla, marks: Option<&[u8]>) -> Result<Vec<String>, OpError> {
        let n = c.arity();
        match self {
            SetOp::Triv => Ok(vec!["*".into()]),
            SetOp::Ass => {
                let marks = marks.ok_or_else(|| OpError::MarksRequired("Ass".into()))?;
                let root = marks
                    .iter()
                    .position(|&m| m == 0)
                    .ok_or_else(|| OpError::MarksRequired("Ass".into()))?;
                let inputs: Vec<usize> = (0..n).filter(|&s| s != root).collect();
                let k = inputs.len();
                Ok(inputs
                    .into_iter()
                    .permutations(k)
                    .map(|w| word_string(&w))
                    .sorted()
                    .collect())
            }
            SetOp::CycAss => {
                let mut set: Vec<String> = (0..n)
                    .permutations(n)
                    .map(|w| word_string(&canon_cyclic(&w)))
                    .collect();
                set.sort();
                set.dedup();
                Ok(set)
            }
            SetOp::CycDihed => {
                let mut set: Vec<String> = (0..n)
                    .permutations(n)
                    .map(|w| word_string(&canon_dihedral(&w)))
                    .collect();
                set.sort();
                set.dedup();
                Ok(set)
            }
            SetOp::GenusN { cap } => Ok((0..=*cap).map(|g| g.to_string()).collect()),
            SetOp::DirSet { marks: set, .. } => Ok(std::iter::repeat(0..set.len())
                .take(n)
                .multi_cartesian_product()
                .map(|t| t.iter().map(|m| m.to_string()).join(","))
                .chain(if n == 0 { vec![String::new()] } else { vec![] })
                .sorted()
                .collect()),
            SetOp::Pullback { inner, along } => match along {
                PullbackFunctor::Identity => inner.object_set(c, marks),
                PullbackFunctor::ForgetMarks => inner.object_set(c, None),
                PullbackFunctor::AddGenusZero => {
                    let mut c0 = c.clone();
                    c0.genus = Some(0);
                    inner.object_set(&c0, marks)
                }
            },
            SetOp::Pushforward(k) => k.object_set(c),
            SetOp::Table(t) => t.object_set(n),
        }
    }

    /// Transport an element along a relabelling.  `old_of_new[i]` is the old
    /// slot sitting at new slot `i` (the flag map of a witness isomorphism,
    /// restricted to one corolla).
    pub fn relabel(
        &self,
        elem: &str,
        old_of_new: &[usize],
        src: &Corolla,
        dst: &Corolla,
    ) -> Result<String, OpError> {
        let mut new_of_old = vec![0usize; old_of_new.len()];
        for (new, &old) in old_of_new.iter().enumerate() {
            new_of_old[old] = new;
        }
        match self {
            SetOp::Triv | SetOp::GenusN { .. } => Ok(elem.to_string()),
            SetOp::Ass => {
                let w: Vec<usize> = parse_word(elem).iter().map(|&s| new_of_old[s]).collect();
                Ok(word_string(&w))
            }
            SetOp::CycAss => {
                let w: Vec<usize> = parse_word(elem).iter().map(|&s| new_of_old[s]).collect();
                Ok(word_string(&canon_cyclic(&w)))
            }
            SetOp::CycDihed => {
                let w: Vec<usize> = parse_word(elem).iter().map(|&s| new_of_old[s]).collect();
                Ok(word_string(&canon_dihedral(&w)))
            }
            SetOp::DirSet { .. } => {
                let t = parse_word(elem);
                let moved: Vec<usize> = old_of_new.iter().map(|&old| t[old]).collect();
                Ok(word_string(&moved))
            }
            SetOp::Pullback { inner, .. } => inner.relabel(elem, old_of_new, src, dst),
            SetOp::Pushforward(k) => k.relabel(elem, old_of_new, src, dst),
            SetOp::Table(_) => Ok(elem.to_string()),
        }
    }

    /// Generator action along a one-corolla-target morphism: one element per
    /// source vertex in, a set of elements of the target corolla out.
    pub fn act(
        &self,
        phi: &GraphMorphism,
        src_marks: Option<&[u8]>,
        inputs: &[&str],
    ) -> Result<ActOutput, OpError> {
        debug_assert_eq!(phi.target().len(), 1);
        if inputs.len() != phi.source().len() {
            return Err(OpError::TupleLength {
                expected: phi.source().len(),
                got: inputs.len(),
            });
        }
        match self {
            SetOp::Triv => Ok(ActOutput::single("*".into())),
            SetOp::GenusN { cap } => {
                // Bump by 1 - chi of the ghost graph, the additive quantity;
                // on the connected home this is the first Betti number.
                let sum: i64 = inputs
                    .iter()
                    .map(|e| e.parse::<i64>().unwrap_or(0))
                    .sum::<i64>()
                    + phi.ghost_invariants()[0].euler_defect;
                if sum < 0 {
                    return Err(OpError::OutsideHome {
                        op: self.name(),
                        reason: "genus would go negative".into(),
                    });
                }
                let saturated = sum > *cap as i64;
                Ok(ActOutput {
                    elems: vec![sum.min(*cap as i64).to_string()],
                    saturated,
                })
            }
            SetOp::DirSet { .. } => {
                let src = phi.source();
                let vals: Vec<usize> = phi
                    .flag_map()
                    .iter()
                    .map(|&sf| {
                        let (v, slot) = src.locate(sf);
                        parse_word(inputs[v])[slot]
                    })
                    .collect();
                Ok(ActOutput::single(word_string(&vals)))
            }
            SetOp::CycAss => {
                let words = global_words(phi.source(), inputs);
                let spliced = splice_cyclic(words, phi.ghost_pairs())?;
                let slots = to_target_slots(phi, &spliced)?;
                Ok(ActOutput::single(word_string(&canon_cyclic(&slots))))
            }
            SetOp::CycDihed => {
                // Branch over per-vertex lifts of the reversal classes; the
                // first vertex's lift is pinned since a global reversal
                // lands in the same class.
                let base = global_words(phi.source(), inputs);
                let k = base.len();
                let mut out: Vec<String> = Vec::new();
                for flips in std::iter::repeat([false, true])
                    .take(k.saturating_sub(1))
                    .multi_cartesian_product()
                    .chain(if k <= 1 { vec![vec![]] } else { vec![] })
                {
                    let words: Vec<Vec<usize>> = base
                        .iter()
                        .enumerate()
                        .map(|(v, w)| {
                            let mut w = w.clone();
                            if v > 0 && flips[v - 1] {
                                w.reverse();
                            }
                            w
                        })
                        .collect();
                    let spliced = splice_cyclic(words, phi.ghost_pairs())?;
                    let slots = to_target_slots(phi, &spliced)?;
                    out.push(word_string(&canon_dihedral(&slots)));
                }
                out.sort();
                out.dedup();
                Ok(ActOutput {
                    elems: out,
                    saturated: false,
                })
            }
            SetOp::Ass => {
                let marks = src_marks.ok_or_else(|| OpError::MarksRequired("Ass".into()))?;
                let src = phi.source();
                // Lift each linear order to a cyclic word starting at the
                // vertex root, splice, then cut at the target root.
                let words: Vec<Vec<usize>> = inputs
                    .iter()
                    .enumerate()
                    .map(|(v, d)| {
                        let off = src.offset(v);
                        let n = src.corolla(v).arity();
                        let root = (0..n)
                            .position(|s| marks[off + s] == 0)
                            .ok_or_else(|| OpError::MarksRequired("Ass".into()))?;
                        let mut w = vec![off + root];
                        w.extend(parse_word(d).into_iter().map(|s| off + s));
                        Ok(w)
                    })
                    .collect::<Result<_, OpError>>()?;
                let spliced = splice_cyclic(words, phi.ghost_pairs())?;
                let slots = to_target_slots(phi, &spliced)?;
                let tgt_marks = crate::category::transport_marks(phi, marks);
                let root_slot = tgt_marks
                    .iter()
                    .position(|&m| m == 0)
                    .ok_or_else(|| OpError::MarksRequired("Ass".into()))?;
                let cut = slots.iter().position(|&s| s == root_slot).ok_or_else(|| {
                    OpError::OutsideHome {
                        op: "Ass".into(),
                        reason: "target root did not survive".into(),
                    }
                })?;
                let mut w: Vec<usize> = Vec::with_capacity(slots.len() - 1);
                w.extend(slots.iter().cycle().skip(cut + 1).take(slots.len() - 1));
                Ok(ActOutput::single(word_string(&w)))
            }
            SetOp::Pullback { inner, along } => match along {
                PullbackFunctor::Identity => inner.act(phi, src_marks, inputs),
                PullbackFunctor::ForgetMarks => inner.act(phi, None, inputs),
                PullbackFunctor::AddGenusZero => {
                    let mark = |a: &Aggregate| {
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
                        .unwrap()
                    };
                    let lifted = GraphMorphism::new(
                        mark(phi.source()),
                        mark(phi.target()),
                        phi.flag_map().to_vec(),
                        phi.vertex_map().to_vec(),
                        phi.ghost_pairs().to_vec(),
                    )
                    .map_err(|e| OpError::OutsideHome {
                        op: self.name(),
                        reason: e.to_string(),
                    })?;
                    inner.act(&lifted, src_marks, inputs)
                }
            },
            SetOp::Pushforward(k) => Ok(ActOutput {
                elems: k.act(phi, inputs)?,
                saturated: false,
            }),
            SetOp::Table(t) => t.act(phi, inputs),
        }
    }

    /// Per-corolla element sets over a whole object.
    pub fn object_sets(&self, x: &Obj) -> Result<Vec<Vec<String>>, OpError> {
        (0..x.aggregate.len())
            .map(|v| {
                let c = x.aggregate.corolla(v);
                let marks = x.marks.as_ref().map(|m| {
                    let off = x.aggregate.offset(v);
                    m[off..off + c.arity()].to_vec()
                });
                self.object_set(c, marks.as_deref())
            })
            .collect()
    }

    /// Full decoration tuples over a whole object (Cartesian product in
    /// corolla order).
    pub fn eval_object(&self, x: &Obj) -> Result<Vec<Vec<String>>, OpError> {
        let sets = self.object_sets(x)?;
        if sets.is_empty() {
            return Ok(vec![vec![]]);
        }
        Ok(sets
            .iter()
            .map(|s| s.iter().cloned())
            .multi_cartesian_product()
            .collect())
    }

    pub fn object_count(&self, x: &Obj) -> Result<usize, OpError> {
        Ok(self
            .object_sets(x)?
            .iter()
            .map(|s| s.len())
            .product())
    }

    /// Action along an arbitrary morphism, by hereditary decomposition:
    /// split into one-corolla-target factors, act factorwise, recombine in
    /// target order.  Returns the set of reachable output tuples.
    pub fn eval_morphism(
        &self,
        phi: &GraphMorphism,
        src_marks: Option<&[u8]>,
        dec: &[String],
    ) -> Result<EvalOutput, OpError> {
        if dec.len() != phi.source().len() {
            return Err(OpError::TupleLength {
                expected: phi.source().len(),
                got: dec.len(),
            });
        }
        let d = phi.decompose();
        let mut per_factor: Vec<Vec<String>> = Vec::with_capacity(d.factors.len());
        let mut saturated = false;
        let mut cursor = 0usize;
        for factor in &d.factors {
            let k = factor.source().len();
            let fiber = &d.source_order[cursor..cursor + k];
            cursor += k;
            let inputs: Vec<&str> = fiber.iter().map(|&v| dec[v].as_str()).collect();
            let marks = src_marks.map(|m| {
                fiber
                    .iter()
                    .flat_map(|&v| {
                        let off = phi.source().offset(v);
                        m[off..off + phi.source().corolla(v).arity()].to_vec()
                    })
                    .collect::<Vec<u8>>()
            });
            let out = self.act(factor, marks.as_deref(), &inputs)?;
            saturated |= out.saturated;
            per_factor.push(out.elems);
        }
        let tuples: Vec<Vec<String>> = if per_factor.is_empty() {
            vec![vec![]]
        } else {
            per_factor
                .iter()
                .map(|s| s.iter().cloned())
                .multi_cartesian_product()
                .sorted()
                .dedup()
                .collect()
        };
        Ok(EvalOutput { tuples, saturated })
    }

    /// Single-valued evaluation; errors if the op branches.
    pub fn eval_single(
        &self,
        phi: &GraphMorphism,
        src_marks: Option<&[u8]>,
        dec: &[String],
    ) -> Result<Vec<String>, OpError> {
        let out = self.eval_morphism(phi, src_marks, dec)?;
        debug_assert!(!out.tuples.is_empty());
        if out.tuples.len() != 1 {
            return Err(OpError::OutsideHome {
                op: self.name(),
                reason: "action is multi-valued here".into(),
            });
        }
        Ok(out.tuples.into_iter().next().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOutput {
    pub tuples: Vec<Vec<String>>,
    pub saturated: bool,
}

/// User-defined op: explicit sets per arity, trivial relabelling action,
/// explicit action table keyed by the canonical form of the morphism.
#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct OpTable {
    pub name: String,
    /// Element sets per arity (index = arity).
    pub sets: Vec<Vec<String>>,
    /// Action entries: canonical morphism key, input tuple, output element.
    pub actions: Vec<TableAction>,
}

#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct TableAction {
    /// Canonical morphism, serialized with `serde_json`.
    pub morphism: String,
    pub inputs: Vec<String>,
    pub output: String,
}

impl OpTable {
    fn object_set(&self, arity: usize) -> Result<Vec<String>, OpError> {
        self.sets
            .get(arity)
            .cloned()
            .ok_or_else(|| OpError::BadTable(format!("no set for arity {arity}")))
    }

    fn act(&self, phi: &GraphMorphism, inputs: &[&str]) -> Result<ActOutput, OpError> {
        let canon = crate::canonical::canonical_morphism(phi);
        // Inputs travel to canonical source order.
        let order: Vec<usize> = (0..phi.source().len())
            .map(|v| canon.source_iso.vertex_map()[v])
            .collect();
        let mut moved = vec![""; inputs.len()];
        for (v, &p) in order.iter().enumerate() {
            moved[p] = inputs[v];
        }
        let key = serde_json::to_string(&canon.morphism).unwrap();
        for a in &self.actions {
            if a.morphism == key && a.inputs == moved {
                return Ok(ActOutput::single(a.output.clone()));
            }
        }
        Err(OpError::BadTable(format!(
            "no action entry for morphism {key} on {moved:?}"
        )))
    }
}

/// Transport a decoration tuple along a relabelling isomorphism `iso: X -> X'`.
/// Output is indexed by the corollas of `X'`.
pub fn relabel_decoration(
    op: &SetOp,
    iso: &GraphMorphism,
    dec: &[String],
) -> Result<Vec<String>, OpError> {
    let (src, dst) = (iso.source(), iso.target());
    let mut out = vec![String::new(); dst.len()];
    for v in 0..src.len() {
        let p = iso.vertex_map()[v];
        let off_dst = dst.offset(p);
        let off_src = src.offset(v);
        let n = dst.corolla(p).arity();
        let old_of_new: Vec<usize> = (0..n)
            .map(|i| iso.flag_map()[off_dst + i] - off_src)
            .collect();
        out[p] = op.relabel(&dec[v], &old_of_new, src.corolla(v), dst.corolla(p))?;
    }
    Ok(out)
}

/// Natural transformation between ops, given by per-corolla components.
#[derive(Clone, Debug)]
pub struct OpNatTrans {
    pub source: SetOp,
    pub target: SetOp,
    pub kind: NatKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NatKind {
    Identity,
    /// Quotient a cyclic order to its reversal class.
    QuotientReversal,
    /// The unique map to the terminal op.
    ToTerminal,
}

impl OpNatTrans {
    pub fn identity(op: SetOp) -> Self {
        OpNatTrans {
            source: op.clone(),
            target: op,
            kind: NatKind::Identity,
        }
    }

    pub fn quotient_reversal() -> Self {
        OpNatTrans {
            source: SetOp::CycAss,
            target: SetOp::CycDihed,
            kind: NatKind::QuotientReversal,
        }
    }

    pub fn to_terminal(source: SetOp) -> Self {
        OpNatTrans {
            source,
            target: SetOp::Triv,
            kind: NatKind::ToTerminal,
        }
    }

    /// Component at one corolla.
    pub fn component(&self, _c: &Corolla, elem: &str) -> String {
        match self.kind {
            NatKind::Identity => elem.to_string(),
            NatKind::QuotientReversal => word_string(&canon_dihedral(&parse_word(elem))),
            NatKind::ToTerminal => "*".into(),
        }
    }

    /// Apply componentwise to a decoration tuple.
    pub fn apply(&self, x: &Aggregate, dec: &[String]) -> Vec<String> {
        dec.iter()
            .enumerate()
            .map(|(v, e)| self.component(x.corolla(v), e))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::Obj;

    fn star(n: usize) -> Corolla {
        Corolla::new("v", (0..n).map(|i| format!("a{i}")).collect()).unwrap()
    }

    #[test]
    fn element_counts() {
        assert_eq!(SetOp::CycAss.object_set(&star(3), None).unwrap().len(), 2);
        assert_eq!(SetOp::CycAss.object_set(&star(4), None).unwrap().len(), 6);
        assert_eq!(SetOp::CycDihed.object_set(&star(3), None).unwrap().len(), 1);
        assert_eq!(SetOp::CycDihed.object_set(&star(4), None).unwrap().len(), 3);
        assert_eq!(SetOp::CycDihed.object_set(&star(5), None).unwrap().len(), 12);
        assert_eq!(
            SetOp::Ass
                .object_set(&star(3), Some(&[0, 1, 1]))
                .unwrap()
                .len(),
            2
        );
        assert_eq!(SetOp::Triv.object_set(&star(7), None).unwrap().len(), 1);
        assert_eq!(
            SetOp::GenusN { cap: 3 }.object_set(&star(2), None).unwrap(),
            vec!["0", "1", "2", "3"]
        );
        // Empty corolla edge cases.
        assert_eq!(SetOp::CycAss.object_set(&star(0), None).unwrap().len(), 1);
        assert_eq!(SetOp::CycDihed.object_set(&star(0), None).unwrap().len(), 1);
    }

    #[test]
    fn eval_object_is_product() {
        let x = Obj::plain(
            Aggregate::new(vec![
                Corolla::new("u", vec!["a".into(), "b".into(), "c".into()]).unwrap(),
                Corolla::new("w", vec!["d".into(), "e".into(), "f".into()]).unwrap(),
            ])
            .unwrap(),
        );
        assert_eq!(SetOp::CycAss.eval_object(&x).unwrap().len(), 4);
        assert_eq!(SetOp::Triv.eval_object(&x).unwrap().len(), 1);
    }

    /// Grafting two cyclically ordered corollas along one ghost edge matches
    /// a direct word splice.
    #[test]
    fn cyclic_splice_matches_oracle() {
        // u: flags a,b,e (slots 0,1,2); w: flags e2,c,d (slots 0,1,2).
        let x = Aggregate::new(vec![
            Corolla::new("u", vec!["a".into(), "b".into(), "e".into()]).unwrap(),
            Corolla::new("w", vec!["e2".into(), "c".into(), "d".into()]).unwrap(),
        ])
        .unwrap();
        let y = Aggregate::single(Corolla::new(
            "t",
            vec!["a1".into(), "b1".into(), "c1".into(), "d1".into()],
        )
        .unwrap());
        // a1<-a, b1<-b, c1<-c, d1<-d; ghost {e, e2} = globals {2, 3}.
        let phi =
            GraphMorphism::new(x, y, vec![0, 1, 4, 5], vec![0, 0], vec![(2, 3)]).unwrap();
        // (a,b,e) spliced with (e2,c,d): after e comes (a,b); after e2, (c,d).
        // Result: (a,b,c,d) -> target slots (0,1,2,3).
        let out = SetOp::CycAss
            .act(&phi, None, &["0,1,2", "0,1,2"])
            .unwrap();
        assert_eq!(out.elems, vec!["0,1,2,3".to_string()]);
        // Reversing the second order splices the other way round.
        let out2 = SetOp::CycAss
            .act(&phi, None, &["0,1,2", "0,2,1"])
            .unwrap();
        assert_eq!(out2.elems, vec!["0,1,3,2".to_string()]);
    }

    #[test]
    fn dihedral_action_branches_over_lifts() {
        let x = Aggregate::new(vec![
            Corolla::new("u", vec!["a".into(), "b".into(), "e".into()]).unwrap(),
            Corolla::new("w", vec!["e2".into(), "c".into(), "d".into()]).unwrap(),
        ])
        .unwrap();
        let y = Aggregate::single(Corolla::new(
            "t",
            vec!["a1".into(), "b1".into(), "c1".into(), "d1".into()],
        )
        .unwrap());
        let phi =
            GraphMorphism::new(x, y, vec![0, 1, 4, 5], vec![0, 0], vec![(2, 3)]).unwrap();
        let out = SetOp::CycDihed
            .act(&phi, None, &["0,1,2", "0,1,2"])
            .unwrap();
        // Both relative orientations are reachable and they differ.
        assert_eq!(out.elems.len(), 2);
    }

    #[test]
    fn genus_action_adds_betti_number_and_saturates() {
        // Self-gluing loop: b1 = 1.
        let x = Aggregate::single(star(2));
        let y = Aggregate::single(Corolla::new("t", vec![]).unwrap());
        let phi = GraphMorphism::new(x, y, vec![], vec![0], vec![(0, 1)]).unwrap();
        let op = SetOp::GenusN { cap: 3 };
        assert_eq!(op.act(&phi, None, &["0"]).unwrap().elems, vec!["1"]);
        let out = op.act(&phi, None, &["3"]).unwrap();
        assert_eq!(out.elems, vec!["3"]);
        assert!(out.saturated);
    }

    #[test]
    fn identity_evaluates_to_identity() {
        let x = Obj::plain(Aggregate::single(star(3)));
        let id = GraphMorphism::identity(&x.aggregate);
        for e in SetOp::CycAss.object_set(&star(3), None).unwrap() {
            let out = SetOp::CycAss
                .eval_morphism(&id, None, &[e.clone()])
                .unwrap();
            assert_eq!(out.tuples, vec![vec![e]]);
        }
    }

    #[test]
    fn dihedral_set_is_reversal_quotient() {
        let q = OpNatTrans::quotient_reversal();
        let c = star(4);
        let cyc = SetOp::CycAss.object_set(&c, None).unwrap();
        let mut image: Vec<String> = cyc.iter().map(|e| q.component(&c, e)).collect();
        image.sort();
        image.dedup();
        assert_eq!(image, SetOp::CycDihed.object_set(&c, None).unwrap());
    }

    #[test]
    fn rooted_pullback_of_cyclic_orders_matches_linear_orders() {
        // Cutting a cyclic order at the root is a bijection onto the linear
        // orders of the inputs.
        let c = star(4);
        let marks = [0u8, 1, 1, 1];
        let pulled = SetOp::Pullback {
            inner: Box::new(SetOp::CycAss),
            along: PullbackFunctor::ForgetMarks,
        };
        let cyc = pulled.object_set(&c, Some(&marks)).unwrap();
        let lin = SetOp::Ass.object_set(&c, Some(&marks)).unwrap();
        assert_eq!(cyc.len(), lin.len());
        // Explicit bijection: rotate the cyclic word to start at the root
        // and drop it.
        let mut cut: Vec<String> = cyc
            .iter()
            .map(|e| {
                let w = parse_word(e);
                let p = w.iter().position(|&s| s == 0).unwrap();
                let lin: Vec<usize> =
                    w.iter().cycle().skip(p + 1).take(w.len() - 1).copied().collect();
                word_string(&lin)
            })
            .collect();
        cut.sort();
        assert_eq!(cut, lin);
    }

    #[test]
    fn dirset_action_restricts() {
        let x = Aggregate::new(vec![star(3)]).unwrap();
        let y = Aggregate::single(Corolla::new("t", vec!["p".into()]).unwrap());
        let phi = GraphMorphism::new(x, y, vec![2], vec![0], vec![(0, 1)]).unwrap();
        let op = builtin_op("DirSet").unwrap();
        assert_eq!(op.act(&phi, None, &["0,1,1"]).unwrap().elems, vec!["1"]);
    }

    #[test]
    fn unknown_and_missing_cap() {
        assert!(builtin_op("wat").is_err());
        assert_eq!(builtin_op("GenusN"), Err(OpError::MissingCap));
        assert!(builtin_op("GenusN:3").is_ok());
    }
}

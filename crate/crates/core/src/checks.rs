//! Sampled verification suites: category axioms and op functoriality.
//!
//! These are executable checks, not proofs.  Each suite draws random
//! instances from a seeded generator, tests the exact (discrete) law, and
//! reports the first few violating witnesses.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canonical::canonical_morphism;
use crate::category::{canonical_object, FeynmanPresentation, Obj};
use crate::error::OpError;
use crate::sample::{rand_composable, rand_iso, rand_morphism, rand_object, SampleCfg};
use crate::setops::{relabel_decoration, SetOp};

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub checks: usize,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: String) -> Self {
        CheckReport {
            name,
            samples: 0,
            checks: 0,
            passed: true,
            failures: vec![],
        }
    }

    fn fail(&mut self, witness: String) {
        self.passed = false;
        if self.failures.len() < 8 {
            self.failures.push(witness);
        }
    }
}

/// Sampled verification of the Feynman-category axioms for a presentation:
/// objects decompose canonically into corollas, morphisms factor through
/// one-corolla targets and recompose exactly, hom-sets under a small bound
/// are finite and duplicate-free, and the predicate is closed under
/// composition and respects identities.
pub fn check_axioms_sampled(
    cat: &FeynmanPresentation,
    sample_size: usize,
    seed: u64,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SampleCfg::default();
    let mut report = CheckReport::new(format!("axioms[{}]", cat.name));
    for i in 0..sample_size {
        report.samples += 1;
        let x = rand_object(&mut rng, cat, &cfg);
        if cat.check_object(&x).is_err() {
            continue;
        }
        // Object condition: canonical decomposition is stable under
        // relabelling and idempotent.
        let (cx, _) = canonical_object(&x);
        let (_, x2) = rand_iso(&mut rng, &x);
        let (cx2, _) = canonical_object(&x2);
        report.checks += 1;
        if cx != cx2 {
            report.fail(format!("canonical object differs under relabelling: {x:?}"));
        }
        let (cxx, _) = canonical_object(&cx);
        report.checks += 1;
        if cx != cxx {
            report.fail(format!("canonical object not idempotent: {x:?}"));
        }

        // Hereditary condition: factor and recompose exactly, and every
        // factor still satisfies the predicate.
        if let Some(m) = rand_morphism(&mut rng, cat, &x, &cfg) {
            let d = m.base.decompose();
            report.checks += 1;
            match d.recompose() {
                Ok(r) if r == m.base => {}
                other => report.fail(format!(
                    "decompose/recompose failed: {:?} vs {:?}",
                    other,
                    canonical_morphism(&m.base).morphism
                )),
            }
            let marks = m.src.marks.as_deref();
            let mut cursor = 0usize;
            for f in &d.factors {
                let k = f.source().len();
                let fiber = &d.source_order[cursor..cursor + k];
                cursor += k;
                let fmarks = marks.map(|mm| {
                    fiber
                        .iter()
                        .flat_map(|&v| {
                            let off = m.base.source().offset(v);
                            mm[off..off + m.base.source().corolla(v).arity()].to_vec()
                        })
                        .collect::<Vec<u8>>()
                });
                report.checks += 1;
                if !cat.admits(f, fmarks.as_deref()) {
                    report.fail("factor of admissible morphism rejected".into());
                }
            }
        }

        // Closure and associativity.
        if let Some((phi, psi)) = rand_composable(&mut rng, cat, &cfg) {
            let comp = psi.base.compose(&phi.base);
            report.checks += 1;
            match comp {
                Ok(c) => {
                    if !cat.admits(&c, phi.src.marks.as_deref()) {
                        report.fail(format!(
                            "composite escapes the predicate: {:?}",
                            canonical_morphism(&c).morphism
                        ));
                    }
                    if let Some(chi) = rand_morphism(&mut rng, cat, &psi.tgt, &cfg) {
                        let left = chi.base.compose(&psi.base).unwrap().compose(&phi.base);
                        let right = chi.base.compose(&c);
                        report.checks += 1;
                        if left.unwrap() != right.unwrap() {
                            report.fail("associativity violated".into());
                        }
                    }
                }
                Err(e) => report.fail(format!("composable pair failed to compose: {e}")),
            }
            report.checks += 1;
            let id = crate::graph::GraphMorphism::identity(&phi.src.aggregate);
            if !cat.admits(&id, phi.src.marks.as_deref()) {
                report.fail("identity rejected by predicate".into());
            }
        }

        // Size condition surrogate: hom-sets under a small bound are finite
        // sets without duplicates.
        if i % 25 == 0 {
            let y = rand_object(&mut rng, cat, &SampleCfg {
                max_vertices: 2,
                max_arity: 2,
                ..cfg
            });
            let x_small = rand_object(&mut rng, cat, &SampleCfg {
                max_vertices: 2,
                max_arity: 3,
                ..cfg
            });
            if cat.check_object(&x_small).is_ok() && cat.check_object(&y).is_ok() {
                if let Ok(homs) = crate::category::hom_enumerate(cat, &x_small, &y) {
                    let unique = homs.iter().map(|m| &m.base).collect::<std::collections::HashSet<_>>();
                    report.checks += 1;
                    if unique.len() != homs.len() {
                        report.fail("hom enumeration produced duplicates".into());
                    }
                }
            }
        }
    }
    report
}

fn sorted_tuples(mut v: Vec<Vec<String>>) -> Vec<Vec<String>> {
    v.sort();
    v.dedup();
    v
}

/// Sampled functor laws for an op over its home presentation: composition
/// (as sets of reachable values) and relabelling equivariance.
pub fn check_functor(op: &SetOp, sample_size: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cat = op.home();
    let cfg = SampleCfg::default();
    let mut report = CheckReport::new(format!("functor[{}]", op.name()));
    let mut tried = 0usize;
    while report.samples < sample_size && tried < sample_size * 20 {
        tried += 1;
        let Some((phi, psi)) = rand_composable(&mut rng, &cat, &cfg) else {
            continue;
        };
        let Ok(sets) = op.object_sets(&phi.src) else {
            continue;
        };
        if sets.iter().any(|s| s.is_empty()) {
            continue;
        }
        let dec: Vec<String> = sets
            .iter()
            .map(|s| s[rand::Rng::gen_range(&mut rng, 0..s.len())].clone())
            .collect();
        report.samples += 1;

        let marks = phi.src.marks.as_deref();
        let comp = psi.base.compose(&phi.base).unwrap();
        let direct = match op.eval_morphism(&comp, marks, &dec) {
            Ok(o) => o,
            Err(e) => {
                report.fail(format!("composite action failed: {e}"));
                continue;
            }
        };
        let step1 = match op.eval_morphism(&phi.base, marks, &dec) {
            Ok(o) => o,
            Err(e) => {
                report.fail(format!("first action failed: {e}"));
                continue;
            }
        };
        let mid_marks = phi.tgt.marks.clone();
        let mut via: Vec<Vec<String>> = Vec::new();
        let mut err: Option<OpError> = None;
        for b in &step1.tuples {
            match op.eval_morphism(&psi.base, mid_marks.as_deref(), b) {
                Ok(o) => via.extend(o.tuples),
                Err(e) => err = Some(e),
            }
        }
        report.checks += 1;
        if let Some(e) = err {
            report.fail(format!("second action failed: {e}"));
        } else if sorted_tuples(direct.tuples.clone()) != sorted_tuples(via) {
            report.fail(format!(
                "composition law failed on {} -> {} -> {} with {:?}",
                phi.src.aggregate.len(),
                phi.tgt.aggregate.len(),
                psi.tgt.aggregate.len(),
                dec
            ));
        }

        // Equivariance under relabelling of both endpoints.
        let (sigma_src, src2) = rand_iso(&mut rng, &phi.src);
        let (sigma_tgt, _tgt2) = rand_iso(&mut rng, &phi.tgt);
        let conj = sigma_tgt
            .compose(&phi.base)
            .unwrap()
            .compose(&sigma_src.inverse().unwrap())
            .unwrap();
        let dec2 = match relabel_decoration(op, &sigma_src, &dec) {
            Ok(d) => d,
            Err(e) => {
                report.fail(format!("relabel failed: {e}"));
                continue;
            }
        };
        let lhs = op.eval_morphism(&conj, src2.marks.as_deref(), &dec2);
        let rhs: Result<Vec<Vec<String>>, OpError> = op
            .eval_morphism(&phi.base, marks, &dec)
            .and_then(|o| {
                o.tuples
                    .iter()
                    .map(|t| relabel_decoration(op, &sigma_tgt, t))
                    .collect()
            });
        report.checks += 1;
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                if sorted_tuples(l.tuples) != sorted_tuples(r) {
                    report.fail(format!("equivariance failed with {dec:?}"));
                }
            }
            (Err(e), _) | (_, Err(e)) => report.fail(format!("equivariance eval failed: {e}")),
        }
    }
    if report.samples < sample_size {
        report.fail(format!(
            "only drew {} of {} requested samples",
            report.samples, sample_size
        ));
    }
    report
}

/// A deliberately broken predicate ("trees plus at most one cycle") used to
/// demonstrate that the closure check catches non-categories.
pub fn broken_presentation() -> FeynmanPresentation {
    let mut p = crate::category::builtin_category("C").unwrap();
    p.name = "C_loopy".into();
    p.shape.b1_max = Some(1);
    p
}

/// Composition closure can fail for `broken_presentation`: report a witness
/// pair if one is found.
pub fn closure_counterexample(seed: u64, tries: usize) -> Option<(Obj, String)> {
    let cat = broken_presentation();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SampleCfg::default();
    for _ in 0..tries {
        let Some((phi, psi)) = rand_composable(&mut rng, &cat, &cfg) else {
            continue;
        };
        let comp = psi.base.compose(&phi.base).unwrap();
        if !cat.admits(&comp, phi.src.marks.as_deref()) {
            let witness = format!(
                "b1 per fiber after composing: {:?}",
                comp.ghost_invariants().iter().map(|i| i.b1).collect_vec()
            );
            return Some((phi.src, witness));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::builtin_category;

    #[test]
    fn ambient_and_trees_pass_axioms() {
        for name in ["G", "C", "M"] {
            let cat = builtin_category(name).unwrap();
            let r = check_axioms_sampled(&cat, 60, 7);
            assert!(r.passed, "{name}: {:?}", r.failures);
        }
    }

    #[test]
    fn rooted_category_passes_axioms() {
        let cat = builtin_category("O").unwrap();
        let r = check_axioms_sampled(&cat, 40, 11);
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn broken_predicate_fails_closure() {
        assert!(closure_counterexample(3, 400).is_some());
    }

    #[test]
    fn cyclic_orders_are_functorial() {
        let r = check_functor(&SetOp::CycAss, 60, 5);
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn genus_op_is_functorial() {
        let r = check_functor(&SetOp::GenusN { cap: 6 }, 60, 5);
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn dihedral_relational_laws_hold() {
        let r = check_functor(&SetOp::CycDihed, 60, 5);
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn linear_orders_are_functorial() {
        let r = check_functor(&SetOp::Ass, 40, 5);
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn wrong_splice_is_caught() {
        // An op that reverses one side before splicing is not functorial:
        // build it as CycAss evaluated through deliberately reversed input.
        let cat = builtin_category("C").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cfg = SampleCfg::default();
        let mut caught = false;
        for _ in 0..400 {
            let Some((phi, psi)) = rand_composable(&mut rng, &cat, &cfg) else {
                continue;
            };
            let Ok(sets) = SetOp::CycAss.object_sets(&phi.src) else {
                continue;
            };
            if sets.iter().any(|s| s.is_empty()) {
                continue;
            }
            let dec: Vec<String> = sets.iter().map(|s| s[0].clone()).collect();
            let comp = psi.base.compose(&phi.base).unwrap();
            // "Wrong" evaluation: reverse every intermediate word.
            let step1 = SetOp::CycAss.eval_morphism(&phi.base, None, &dec).unwrap();
            let twisted: Vec<String> = step1.tuples[0]
                .iter()
                .map(|e| {
                    let mut w: Vec<usize> = if e.is_empty() {
                        vec![]
                    } else {
                        e.split(',').map(|t| t.parse().unwrap()).collect()
                    };
                    w.reverse();
                    crate::setops::canon_cyclic(&w)
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            let via = SetOp::CycAss.eval_morphism(&psi.base, None, &twisted);
            let direct = SetOp::CycAss.eval_morphism(&comp, None, &dec).unwrap();
            if let Ok(via) = via {
                if via.tuples != direct.tuples {
                    caught = true;
                    break;
                }
            }
        }
        assert!(caught, "reversed splice was never distinguished");
    }
}

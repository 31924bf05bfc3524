use proptest::prelude::*;

use qmqc::model::TaxonSet;
use qmqc::oracle::{enumerate_pb, Enumerated};
use qmqc::pb::opb::{emit_opb, parse_opb};
use qmqc::pb::{Lit, PBConstraint, PBInstance, Var};
use qmqc::solver::{check_model, solve, SolveStatus, SolverConfig};
use qmqc::tree::newick::{emit_unrooted, parse_unrooted};
use qmqc::tree::{
    derive_all, derive_topology, random_tree, trees_isomorphic, GenSpec, UnrootedPhylogeny,
};
use qmqc::QuartetTopology;

fn lit(v: u32, neg: bool) -> Lit {
    let v = Var::new(v);
    if neg {
        v.neg()
    } else {
        v.pos()
    }
}

prop_compose! {
    fn raw_constraint(nv: u32)(
        terms in prop::collection::vec((-3i64..=3, 1..=nv, any::<bool>()), 1..5),
        bound in -3i64..=4,
    ) -> (Vec<(i64, Lit)>, i64) {
        (terms.into_iter().map(|(c, v, n)| (c, lit(v, n))).collect(), bound)
    }
}

fn instance_strategy() -> impl Strategy<Value = PBInstance> {
    (1u32..=10).prop_flat_map(|nv| {
        (
            prop::collection::vec(raw_constraint(nv), 0..12),
            prop::collection::vec((-3i64..=3, 1..=nv), 0..6),
        )
            .prop_map(move |(cons, obj)| {
                let mut inst = PBInstance::new();
                inst.reserve_vars(nv);
                for (terms, bound) in cons {
                    inst.add(PBConstraint::new(terms, bound));
                }
                inst.set_objective(obj.into_iter().map(|(c, v)| (c, Var::new(v))));
                inst
            })
    })
}

fn assignments(nv: u32) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << nv).map(move |bits| (0..nv).map(|k| bits >> k & 1 == 1).collect())
}

/// Path-intersection view of a quartet: `[a,b|c,d]` holds when the a–b and
/// c–d paths share no vertex.
fn by_paths(t: &UnrootedPhylogeny, s: [usize; 4]) -> QuartetTopology {
    let path = |u: usize, v: usize| -> Vec<usize> {
        let mut prev = vec![usize::MAX; t.node_count()];
        let mut queue = std::collections::VecDeque::from([u]);
        prev[u] = u;
        while let Some(x) = queue.pop_front() {
            for &y in t.neighbors(x) {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut out = vec![v];
        let mut x = v;
        while x != u {
            x = prev[x];
            out.push(x);
        }
        out
    };
    let [w, x, y, z] = s;
    let candidates = [([w, x], [y, z]), ([w, y], [x, z]), ([w, z], [x, y])];
    let hits: Vec<QuartetTopology> = candidates
        .iter()
        .filter(|(l, r)| {
            let p = path(l[0], l[1]);
            path(r[0], r[1]).iter().all(|v| !p.contains(v))
        })
        .map(|(l, r)| QuartetTopology::new(l[0], l[1], r[0], r[1]).unwrap())
        .collect();
    assert_eq!(hits.len(), 1, "exactly one pairing has disjoint paths");
    hits[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_preserves_models((terms, bound) in raw_constraint(6)) {
        let c = PBConstraint::new(terms.clone(), bound);
        let again = PBConstraint::new(c.terms().to_vec(), c.bound());
        prop_assert_eq!(&again, &c);
        for a in assignments(6) {
            let raw: i64 = terms.iter().filter(|(_, l)| l.eval(&a)).map(|(k, _)| k).sum();
            prop_assert_eq!(raw >= bound, c.is_satisfied(&a));
        }
    }

    #[test]
    fn solver_matches_enumeration(inst in instance_strategy()) {
        let r = solve(&inst, &SolverConfig::default());
        match enumerate_pb(&inst).unwrap() {
            Enumerated::Unsatisfiable => prop_assert_eq!(r.status, SolveStatus::Unsatisfiable),
            Enumerated::Optimal { objective, .. } => {
                prop_assert_eq!(r.status, SolveStatus::Optimal);
                prop_assert_eq!(r.objective, Some(objective));
                let a = r.assignment.unwrap();
                prop_assert!(check_model(&inst, &a).unwrap().is_satisfied());
                prop_assert_eq!(inst.objective_value(&a), objective);
            }
        }
    }

    #[test]
    fn solver_is_deterministic(inst in instance_strategy()) {
        let a = solve(&inst, &SolverConfig::default());
        let b = solve(&inst, &SolverConfig::default());
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.assignment, b.assignment);
        prop_assert_eq!(a.stats.decisions, b.stats.decisions);
    }

    #[test]
    fn opb_text_is_canonical(inst in instance_strategy()) {
        let text = emit_opb(&inst);
        let back = parse_opb(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(emit_opb(&back), text);
    }

    #[test]
    fn derived_topologies_match_path_test(n in 4usize..=6, seed in any::<u64>()) {
        let t = random_tree(&GenSpec::new(n, seed, 0).unwrap()).unwrap();
        prop_assert_eq!(t.internal_count(), n - 2);
        prop_assert_eq!(t.edge_count(), 2 * n - 3);
        for top in derive_all(&t, &TaxonSet::numbered(n)).unwrap().iter() {
            let s = top.taxa();
            prop_assert_eq!(derive_topology(&t, s).unwrap(), by_paths(&t, s));
        }
    }

    #[test]
    fn newick_round_trip(n in 4usize..=12, seed in any::<u64>()) {
        let taxa = TaxonSet::numbered(n);
        let t = random_tree(&GenSpec::new(n, seed, 0).unwrap()).unwrap();
        let text = emit_unrooted(&t, &taxa);
        let (back, _) = parse_unrooted(&text, Some(&taxa)).unwrap();
        prop_assert!(trees_isomorphic(&t, &back).unwrap());
        prop_assert_eq!(emit_unrooted(&back, &taxa), text);
    }
}

use std::collections::HashMap;

use convalg_core::complex::{characteristic_map, rel_image, subset_of_map};
use convalg_core::convolution::{conv_op, join_maps, random_map};
use convalg_core::etale::{phi, phi_inverse};
use convalg_core::lattice::{check_heyting_laws, LawCheckOptions};
use convalg_core::relstruct::{interval_structure, relation_from_operation};
use convalg_core::terms::{eval_term, holds_in, random_equation, EquationShape};
use convalg_core::type2::{
    grid_conv_oracle, random_step_function, sample_to_grid, t2_join, t2_meet, t2_neg, GridOp, Q,
};
use convalg_core::{
    CarrierSubset, ComplexAlgebra, ConstantRelationalEtale, ConvolutionAlgebra, FiniteTopology,
    HeytingLattice, LatticeMap, Relation, RelationalStructure, StepFunction, Term,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn topology(points: usize, gens: &[u64]) -> FiniteTopology {
    let full = (1u64 << points) - 1;
    FiniteTopology::from_masks(labels("t", points), gens.iter().map(|g| g & full)).unwrap()
}

fn topology_strategy() -> impl Strategy<Value = FiniteTopology> {
    (1usize..=4, prop::collection::vec(any::<u64>(), 0..4)).prop_map(|(p, g)| topology(p, &g))
}

/// A structure on `1..=3` elements with up to three relations of arity
/// `0..=2`, each tuple present with probability 1/2.
fn random_structure(rng: &mut impl Rng) -> RelationalStructure {
    let n = rng.gen_range(1..=3usize);
    let relations = (0..rng.gen_range(1..=3))
        .map(|j| {
            let arity = rng.gen_range(0..=2usize);
            let tuples: Vec<Vec<usize>> = (0..n.pow(arity as u32 + 1))
                .filter(|_| rng.gen_bool(0.5))
                .map(|mut code| {
                    let mut t = vec![0; arity + 1];
                    for slot in t.iter_mut().rev() {
                        *slot = code % n;
                        code /= n;
                    }
                    t
                })
                .collect();
            (format!("r{j}"), Relation::new(n, arity, tuples).unwrap())
        })
        .collect();
    RelationalStructure::new(labels("x", n), relations).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pointwise_leq(l: &HeytingLattice, a: &LatticeMap, b: &LatticeMap) -> bool {
    a.leq(l, b)
}

fn step_strategy() -> impl Strategy<Value = StepFunction> {
    any::<u64>().prop_map(|s| random_step_function(&mut rng(s), 4, 8))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn open_set_lattices_are_heyting(t in topology_strategy()) {
        let l = HeytingLattice::open_sets(&t);
        let report = check_heyting_laws(&l, &LawCheckOptions::default());
        prop_assert!(report.passed(), "{:?}", report.violation);
    }

    #[test]
    fn generation_is_a_closure_operator(
        p in 1usize..=4,
        g in prop::collection::vec(any::<u64>(), 0..4),
        extra in any::<u64>(),
    ) {
        let t = topology(p, &g);
        let full = (1u64 << p) - 1;
        for &m in &g {
            prop_assert!(t.is_open(m & full));
        }
        let mut bigger = g.clone();
        bigger.push(extra);
        let t2 = topology(p, &bigger);
        prop_assert!(t.opens().iter().all(|&o| t2.is_open(o)));
        prop_assert_eq!(topology(p, t.opens()), t);
    }

    #[test]
    fn implication_adjunction(t in topology_strategy()) {
        let l = HeytingLattice::open_sets(&t);
        for a in l.elements() {
            for b in l.elements() {
                let i = l.imp(a, b);
                for w in l.elements() {
                    prop_assert_eq!(l.leq(l.meet(w, a), b), l.leq(w, i));
                }
            }
        }
    }

    #[test]
    fn operation_graphs_are_total_and_functional(n in 1usize..=4, arity in 0usize..=3, seed: u64) {
        let mut r = rng(seed);
        let table: Vec<usize> = (0..n.pow(arity as u32)).map(|_| r.gen_range(0..n)).collect();
        let rel = relation_from_operation(n, arity, |args| {
            Some(table[args.iter().fold(0, |acc, &x| acc * n + x)])
        }).unwrap();
        prop_assert_eq!(rel.len(), n.pow(arity as u32));
        prop_assert!(rel.is_functional(n));
    }

    #[test]
    fn conv_op_is_monotone_and_join_preserving(t in topology_strategy(), seed: u64) {
        let mut r = rng(seed);
        let s = random_structure(&mut r);
        let l = HeytingLattice::open_sets(&t);
        let n = s.carrier_len();
        for j in 0..s.signature().len() {
            let k = s.signature().arity(j);
            let args: Vec<LatticeMap> = (0..k).map(|_| random_map(&l, n, &mut r)).collect();
            let refs: Vec<&LatticeMap> = args.iter().collect();
            let base = conv_op(&l, &s, j, &refs).unwrap();
            for i in 0..k {
                let other = random_map(&l, n, &mut r);
                let joined = join_maps(&l, &args[i], &other).unwrap();
                let mut with_other = refs.clone();
                with_other[i] = &other;
                let mut with_join = refs.clone();
                with_join[i] = &joined;
                let lhs = conv_op(&l, &s, j, &with_join).unwrap();
                let rhs = join_maps(&l, &base, &conv_op(&l, &s, j, &with_other).unwrap()).unwrap();
                prop_assert!(pointwise_leq(&l, &base, &lhs));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn two_valued_convolution_is_relational_image(seed: u64) {
        let mut r = rng(seed);
        let s = random_structure(&mut r);
        let two = HeytingLattice::two();
        let n = s.carrier_len();
        for j in 0..s.signature().len() {
            let subsets: Vec<CarrierSubset> = (0..s.signature().arity(j))
                .map(|_| CarrierSubset::from_index(n, r.gen_range(0..1u64 << n)))
                .collect();
            let maps: Vec<LatticeMap> = subsets.iter().map(|a| characteristic_map(&two, a)).collect();
            let image = rel_image(&s, j, &subsets.iter().collect::<Vec<_>>()).unwrap();
            let conv = conv_op(&two, &s, j, &maps.iter().collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(subset_of_map(&two, &conv).unwrap(), image);
        }
    }

    #[test]
    fn rel_image_preserves_unions(seed: u64) {
        let mut r = rng(seed);
        let s = random_structure(&mut r);
        let n = s.carrier_len();
        let mut draw = || CarrierSubset::from_index(n, r.gen_range(0..1u64 << n));
        for j in 0..s.signature().len() {
            let k = s.signature().arity(j);
            let args: Vec<CarrierSubset> = (0..k).map(|_| draw()).collect();
            for i in 0..k {
                let other = draw();
                let union = args[i].union(&other);
                let image = |slot: &CarrierSubset| {
                    let mut v: Vec<&CarrierSubset> = args.iter().collect();
                    v[i] = slot;
                    rel_image(&s, j, &v).unwrap()
                };
                let whole = image(&union);
                prop_assert!(image(&args[i]).is_subset(&whole));
                prop_assert_eq!(whole, image(&args[i]).union(&image(&other)));
            }
        }
    }

    #[test]
    fn phi_is_an_order_isomorphism(t in topology_strategy(), seed: u64, n in 1usize..=4) {
        let mut r = rng(seed);
        let l = HeytingLattice::open_sets(&t);
        let a = random_map(&l, n, &mut r);
        let b = random_map(&l, n, &mut r);
        let (pa, pb) = (phi(&l, &a).unwrap(), phi(&l, &b).unwrap());
        prop_assert_eq!(&phi_inverse(&l, &pa).unwrap(), &a);
        prop_assert_eq!(a.leq(&l, &b), pa.is_subobject_of(&pb));
    }

    #[test]
    fn main_isomorphism_on_random_instances(t in topology_strategy(), seed: u64) {
        let mut r = rng(seed);
        let s = random_structure(&mut r);
        let l = HeytingLattice::open_sets(&t);
        let e = ConstantRelationalEtale::new(&s, t.clone());
        let n = s.carrier_len();
        for j in 0..s.signature().len() {
            let args: Vec<LatticeMap> = (0..s.signature().arity(j)).map(|_| random_map(&l, n, &mut r)).collect();
            let subs: Vec<_> = args.iter().map(|a| phi(&l, a).unwrap()).collect();
            let sub_refs: Vec<_> = subs.iter().collect();
            let lhs = phi(&l, &conv_op(&l, &s, j, &args.iter().collect::<Vec<_>>()).unwrap()).unwrap();
            let fiberwise = e.fiberwise_rel_image(j, &sub_refs).unwrap();
            prop_assert_eq!(&lhs, &fiberwise);
            // each fiber of the image is the relational image of the fibers
            for y in 0..t.points().len() {
                let fibers: Vec<CarrierSubset> = subs.iter().map(|a| a.fiber(y)).collect();
                let img = rel_image(&s, j, &fibers.iter().collect::<Vec<_>>()).unwrap();
                prop_assert_eq!(fiberwise.fiber(y), img);
            }
        }
    }

    #[test]
    fn two_valued_equations_agree(seed: u64) {
        let mut r = rng(seed);
        let s = random_structure(&mut r);
        let two = HeytingLattice::two();
        let eq = random_equation(s.signature(), &mut r, &EquationShape::default());
        let conv = holds_in(&ConvolutionAlgebra::new(&two, &s), &eq, 1 << 20).unwrap();
        let cplx = holds_in(&ComplexAlgebra::new(&s), &eq, 1 << 20).unwrap();
        prop_assert_eq!(conv.holds(), cplx.holds());
    }

    #[test]
    fn evaluation_is_compositional(seed: u64) {
        let mut r = rng(seed);
        let s = random_structure(&mut r);
        let l = HeytingLattice::chain(2).unwrap();
        let alg = ConvolutionAlgebra::new(&l, &s);
        let eq = random_equation(s.signature(), &mut r, &EquationShape::default());
        let env: HashMap<String, LatticeMap> = ["u", "v", "w"]
            .iter()
            .map(|v| (v.to_string(), random_map(&l, s.carrier_len(), &mut r)))
            .collect();
        if let Term::App(f, args) = &eq.lhs {
            let mut env2 = env.clone();
            let mut vars = Vec::new();
            for (i, a) in args.iter().enumerate() {
                let name = format!("sub{i}");
                env2.insert(name.clone(), eval_term(&alg, a, &env).unwrap());
                vars.push(Term::var(&name));
            }
            prop_assert_eq!(
                eval_term(&alg, &eq.lhs, &env).unwrap(),
                eval_term(&alg, &Term::app(f, vars), &env2).unwrap()
            );
        }
    }

    #[test]
    fn envelopes(a in step_strategy()) {
        let l = a.sup_left();
        let r = a.sup_right();
        prop_assert_eq!(l.sup_left(), l.clone());
        prop_assert_eq!(r.sup_right(), r.clone());
        for k in 0..=16 {
            let x = Q::new(k, 16);
            prop_assert!(l.eval(x).unwrap() >= a.eval(x).unwrap());
            prop_assert!(r.eval(x).unwrap() >= a.eval(x).unwrap());
        }
    }

    #[test]
    fn envelopes_are_monotone(a in step_strategy(), b in step_strategy()) {
        let lo = t2_meet_pointwise(&a, &b);
        for k in 0..=16 {
            let x = Q::new(k, 16);
            prop_assert!(lo.sup_left().eval(x).unwrap() <= a.sup_left().eval(x).unwrap());
            prop_assert!(lo.sup_right().eval(x).unwrap() <= b.sup_right().eval(x).unwrap());
        }
    }

    #[test]
    fn de_morgan(a in step_strategy(), b in step_strategy()) {
        let lhs = t2_neg(&t2_join(&a, &b));
        prop_assert_eq!(&lhs, &t2_meet(&t2_neg(&a), &t2_neg(&b)));
        let (ga, gb) = (sample_to_grid(&a, 8).unwrap(), sample_to_grid(&b, 8).unwrap());
        let join = grid_conv_oracle(GridOp::Join, &[&ga, &gb]).unwrap();
        let na = grid_conv_oracle(GridOp::Neg, &[&ga]).unwrap();
        let nb = grid_conv_oracle(GridOp::Neg, &[&gb]).unwrap();
        prop_assert_eq!(
            grid_conv_oracle(GridOp::Neg, &[&join]).unwrap(),
            grid_conv_oracle(GridOp::Meet, &[&na, &nb]).unwrap()
        );
        prop_assert_eq!(sample_to_grid(&lhs, 8).unwrap(), grid_conv_oracle(GridOp::Neg, &[&join]).unwrap());
    }

    #[test]
    fn join_and_meet_commute_and_are_idempotent(a in step_strategy(), b in step_strategy()) {
        prop_assert_eq!(t2_join(&a, &b), t2_join(&b, &a));
        prop_assert_eq!(t2_meet(&a, &b), t2_meet(&b, &a));
        prop_assert_eq!(t2_join(&a, &a), a.clone());
        prop_assert_eq!(t2_meet(&a, &a), a.clone());
        let (ga, gb) = (sample_to_grid(&a, 8).unwrap(), sample_to_grid(&b, 8).unwrap());
        for op in [GridOp::Join, GridOp::Meet] {
            prop_assert_eq!(
                grid_conv_oracle(op, &[&ga, &gb]).unwrap(),
                grid_conv_oracle(op, &[&gb, &ga]).unwrap()
            );
            prop_assert_eq!(grid_conv_oracle(op, &[&ga, &ga]).unwrap(), ga.clone());
        }
    }

    #[test]
    fn unit_laws(a in step_strategy()) {
        prop_assert_eq!(t2_join(&StepFunction::zero(), &a), a.clone());
        prop_assert_eq!(t2_meet(&StepFunction::one(), &a), a.clone());
        prop_assert_eq!(t2_neg(&t2_neg(&a)), a);
    }
}

/// Pointwise minimum, used only to build a function below both arguments.
fn t2_meet_pointwise(a: &StepFunction, b: &StepFunction) -> StepFunction {
    let mut breaks: Vec<Q> = a
        .breakpoints()
        .iter()
        .chain(b.breakpoints())
        .copied()
        .collect();
    breaks.sort();
    breaks.dedup();
    let at = |x: Q| a.eval(x).unwrap().min(b.eval(x).unwrap());
    let points = breaks.iter().map(|&x| at(x)).collect();
    let intervals = breaks
        .windows(2)
        .map(|w| at((w[0] + w[1]) / Q::from_integer(2)))
        .collect();
    StepFunction::normalized(breaks, points, intervals).unwrap()
}

#[test]
fn chain_negation_is_an_involutive_anti_isomorphism() {
    for n in 1..=16 {
        let l = HeytingLattice::chain(n).unwrap();
        for a in l.elements() {
            let na = l.chain_negation(a).unwrap();
            assert_eq!(l.chain_negation(na), Some(a));
            for b in l.elements() {
                assert_eq!(l.leq(a, b), l.leq(l.chain_negation(b).unwrap(), na));
            }
        }
    }
}

#[test]
fn interval_structures_are_functional_and_total() {
    for n in 1..=6 {
        let s = interval_structure(n).unwrap();
        let k = s.carrier_len();
        for j in 0..s.signature().len() {
            let rel = s.relation(j);
            assert!(rel.is_functional(k));
            assert_eq!(rel.len(), k.pow(rel.arity() as u32));
        }
        assert_eq!(s.relation(s.symbol("join").unwrap()).len(), k * k);
    }
}

#[test]
fn crisp_maps_follow_forward_images() {
    let s = interval_structure(3).unwrap();
    let l = HeytingLattice::chain(3).unwrap();
    let mut r = rng(11);
    for j in 0..s.signature().len() {
        for _ in 0..20 {
            let subsets: Vec<CarrierSubset> = (0..s.signature().arity(j))
                .map(|_| CarrierSubset::from_index(4, r.gen_range(0..16)))
                .collect();
            let crisp = |a: &CarrierSubset| {
                LatticeMap::new(
                    (0..4)
                        .map(|x| if a.contains(x) { l.top() } else { l.bottom() })
                        .collect(),
                )
            };
            let maps: Vec<LatticeMap> = subsets.iter().map(crisp).collect();
            let image = rel_image(&s, j, &subsets.iter().collect::<Vec<_>>()).unwrap();
            assert_eq!(
                conv_op(&l, &s, j, &maps.iter().collect::<Vec<_>>()).unwrap(),
                crisp(&image)
            );
        }
    }
}

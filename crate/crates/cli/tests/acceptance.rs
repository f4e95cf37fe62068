//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//! Every comparison is exact; the only tolerances are the runtime limits
//! below.

use std::path::PathBuf;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use convalg_core::complex::{characteristic_iso, Coverage};
use convalg_core::etale::{verify_main_iso, verify_main_iso_exhaustive};
use convalg_core::lattice::{check_heyting_laws, LawCheckOptions};
use convalg_core::relstruct::{interval_structure, relation_from_operation};
use convalg_core::terms::{random_equation, same_equations_report, EquationShape};
use convalg_core::text::{parse_equations, parse_structure, parse_topology};
use convalg_core::type2::{crosscheck, random_step_function, t2_join, t2_meet, t2_neg};
use convalg_core::{FiniteTopology, HeytingLattice, Relation, RelationalStructure, StepFunction};

const DEMO_LIMIT: Duration = Duration::from_secs(1);
const MAIN_ISO_LIMIT: Duration = Duration::from_secs(30);
const EQUATIONS_LIMIT: Duration = Duration::from_secs(60);
const TYPE2_LIMIT: Duration = Duration::from_secs(10);

const MAIN_ISO_TRIALS: u64 = 500;
const TYPE2_TRIALS: u64 = 100;
const RANDOM_EQUATIONS: usize = 20;
const SEED: u64 = 20240607;
/// 625³ assignments for a three-variable equation over the five-element lattice.
const EQUATION_BOUND: u128 = 300_000_000;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ternary() -> RelationalStructure {
    parse_structure(&read("ternary.structure")).expect("ternary structure")
}

fn vee() -> HeytingLattice {
    HeytingLattice::open_sets(&parse_topology(&read("vee.topology")).expect("vee topology"))
}

fn convalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convalg"))
        .args(args)
        .output()
        .expect("run convalg")
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    if took < limit {
        Ok(())
    } else {
        Err(format!("took {took:.2?}, limit {limit:?}"))
    }
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Every relation of arity 0 and 1 on two points, a few seeded arity-2
/// relations, and every relation of arity 0..=2 on one point.
fn small_structures() -> Vec<RelationalStructure> {
    let mut out = vec![interval_structure(1).unwrap()];
    let mut rels = Vec::new();
    for bits in 0..4u32 {
        let tuples = (0..2).filter(|x| bits >> x & 1 == 1).map(|x| vec![x]);
        rels.push((format!("c{bits}"), Relation::new(2, 0, tuples).unwrap()));
    }
    for bits in 0..16u32 {
        let tuples = (0..4)
            .filter(|k| bits >> k & 1 == 1)
            .map(|k| vec![k / 2, k % 2]);
        rels.push((format!("u{bits}"), Relation::new(2, 1, tuples).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..8 {
        let bits: u32 = rng.gen_range(0..256);
        let tuples = (0..8)
            .filter(|k| bits >> k & 1 == 1)
            .map(|k| vec![k / 4, k / 2 % 2, k % 2]);
        rels.push((format!("b{i}"), Relation::new(2, 2, tuples).unwrap()));
    }
    out.push(RelationalStructure::new(labels(2), rels).unwrap());
    let mut one = Vec::new();
    for arity in 0..=2 {
        for full in [false, true] {
            let tuples = full.then(|| vec![0; arity + 1]);
            one.push((
                format!("r{arity}{}", full as u8),
                Relation::new(1, arity, tuples).unwrap(),
            ));
        }
    }
    out.push(RelationalStructure::new(labels(1), one).unwrap());
    out
}

fn all_small_topologies() -> Vec<FiniteTopology> {
    (1..=3)
        .flat_map(|n| FiniteTopology::all_on((1..=n).map(|i| format!("t{i}")).collect()).unwrap())
        .collect()
}

fn demo_reproduction() -> Check {
    let start = Instant::now();
    let out = convalg(&["paper-demo", "--format", "machine"]);
    within(DEMO_LIMIT, start)?;
    if !out.status.success() {
        return Err(format!("exit status {}", out.status));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let expected = "map.x1={t2}\nmap.x2={}\nmap.x3={}\nmap.x4={t1 t3}\n";
    let routes: Vec<&str> = text.split("route=").skip(1).collect();
    let names = ["convolution\n", "complex per fiber\n", "etale\n"];
    if routes.len() != 3 {
        return Err(format!("expected three routes, got:\n{text}"));
    }
    for (route, name) in routes.iter().zip(names) {
        let body = route
            .strip_prefix(name)
            .ok_or(format!("route order: {route}"))?;
        let body = body.strip_suffix("result=pass\n").unwrap_or(body);
        if body != expected {
            return Err(format!("route {} gave {body}", name.trim()));
        }
    }
    Ok(format!("three routes agree in {:.2?}", start.elapsed()))
}

fn main_isomorphism() -> Check {
    let start = Instant::now();
    let r =
        verify_main_iso(&vee(), &ternary(), MAIN_ISO_TRIALS, SEED).map_err(|e| e.to_string())?;
    if let Some(c) = r.counterexample {
        return Err(format!(
            "random trial {}: {} {}",
            c.trial, c.check, c.detail
        ));
    }
    let mut checks = r.checks;
    let mut instances = 0;
    for s in small_structures() {
        for t in all_small_topologies() {
            let l = HeytingLattice::open_sets(&t);
            let r = verify_main_iso_exhaustive(&l, &s, 1 << 20).map_err(|e| e.to_string())?;
            if let Some(c) = r.counterexample {
                return Err(format!(
                    "{:?} over {:?}: {} {}",
                    s.carrier(),
                    t.opens(),
                    c.check,
                    c.detail
                ));
            }
            checks += r.checks;
            instances += 1;
        }
    }
    within(MAIN_ISO_LIMIT, start)?;
    Ok(format!(
        "{MAIN_ISO_TRIALS} random trials and {instances} exhaustive instances, {checks} checks, {:.2?}",
        start.elapsed()
    ))
}

fn cyclic_group() -> RelationalStructure {
    let op = relation_from_operation(3, 2, |a| Some((a[0] + a[1]) % 3)).unwrap();
    RelationalStructure::new(labels(3), vec![("mul".into(), op)]).unwrap()
}

fn characteristic_isomorphism() -> Check {
    let mut structures = small_structures();
    structures.extend([interval_structure(2).unwrap(), cyclic_group(), ternary()]);
    let mut checks = 0;
    for s in &structures {
        let r = characteristic_iso(s, Coverage::Exhaustive, 1 << 20).map_err(|e| e.to_string())?;
        if let Some(f) = r.failure {
            return Err(format!("{:?}: {f}", s.carrier()));
        }
        checks += r.checks;
    }
    Ok(format!("{} structures, {checks} checks", structures.len()))
}

fn equational_agreement() -> Check {
    let start = Instant::now();
    let lattices = [
        ("vee", vee()),
        ("C2", HeytingLattice::chain(2).unwrap()),
        ("C3", HeytingLattice::chain(3).unwrap()),
    ];
    let structures = [
        ("ternary", ternary(), read("ternary.eqs")),
        (
            "interval",
            interval_structure(1).unwrap(),
            read("interval.eqs"),
        ),
    ];
    let mut total = 0;
    let mut holding = 0;
    for (sname, s, eqs) in &structures {
        let mut eqs = parse_equations(eqs).map_err(|e| e.to_string())?;
        if eqs.len() < 10 {
            return Err(format!(
                "{sname}: only {} hand-written equations",
                eqs.len()
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        eqs.extend(
            (0..RANDOM_EQUATIONS)
                .map(|_| random_equation(s.signature(), &mut rng, &EquationShape::default())),
        );
        for (lname, l) in &lattices {
            let r = same_equations_report(l, s, &eqs, EQUATION_BOUND).map_err(|e| e.to_string())?;
            if let Some(o) = r.outcomes.iter().find(|o| !o.agrees()) {
                return Err(format!("{lname} x {sname}: disagreement on {}", o.equation));
            }
            total += r.outcomes.len();
            holding += r.outcomes.iter().filter(|o| o.in_convolution).count();
        }
    }
    within(EQUATIONS_LIMIT, start)?;
    Ok(format!(
        "{total} equation checks agree ({holding} hold), {:.2?}",
        start.elapsed()
    ))
}

fn type2_oracle() -> Check {
    let start = Instant::now();
    let mut checks = 0;
    for n in [4, 8, 16] {
        let r = crosscheck(n, TYPE2_TRIALS, SEED).map_err(|e| e.to_string())?;
        if let Some(f) = r.failure {
            return Err(format!("n={n}: {f}"));
        }
        checks += r.checks;
    }
    within(TYPE2_LIMIT, start)?;
    Ok(format!(
        "{checks} exact comparisons, {:.2?}",
        start.elapsed()
    ))
}

fn type2_laws() -> Check {
    let zero = StepFunction::zero();
    let one = StepFunction::one();
    if t2_neg(&zero) != one {
        return Err("¬0 ≠ 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..100 {
        let a = random_step_function(&mut rng, 6, 12);
        if t2_join(&zero, &a) != a {
            return Err(format!("0 ⊔ α ≠ α for #{i}:\n{a}"));
        }
        if t2_meet(&one, &a) != a {
            return Err(format!("1 ⊓ α ≠ α for #{i}:\n{a}"));
        }
        if t2_neg(&t2_neg(&a)) != a {
            return Err(format!("¬¬α ≠ α for #{i}:\n{a}"));
        }
    }
    Ok("100 random step functions".into())
}

fn heyting_laws() -> Check {
    let opts = LawCheckOptions::default();
    let mut lattices: Vec<(String, HeytingLattice)> = all_small_topologies()
        .iter()
        .map(|t| (format!("{:?}", t.opens()), HeytingLattice::open_sets(t)))
        .collect();
    lattices.extend((1..=16).map(|n| (format!("C{n}"), HeytingLattice::chain(n).unwrap())));
    let mut instances = 0;
    for (name, l) in &lattices {
        let r = check_heyting_laws(l, &opts);
        if let Some(v) = r.violation {
            return Err(format!("{name}: {v}"));
        }
        instances += r.instances;
        // the adjunction, independently of the checker
        for a in l.elements() {
            for b in l.elements() {
                let i = l.imp(a, b);
                if let Some(w) = l
                    .elements()
                    .find(|&w| l.leq(l.meet(w, a), b) != l.leq(w, i))
                {
                    return Err(format!("{name}: adjunction fails at {}", l.label(w)));
                }
            }
        }
    }
    Ok(format!(
        "{} lattices, {instances} law instances",
        lattices.len()
    ))
}

fn determinism() -> Check {
    let structure = data("ternary.structure");
    let topology = data("vee.topology");
    let eqs = data("ternary.eqs");
    let (s, t, e) = (
        structure.to_str().unwrap(),
        topology.to_str().unwrap(),
        eqs.to_str().unwrap(),
    );
    let commands: Vec<Vec<&str>> = vec![
        vec!["paper-demo"],
        vec![
            "etale",
            "verify-iso",
            "--structure",
            s,
            "--topology",
            t,
            "--trials",
            "200",
            "--seed",
            "9",
        ],
        vec![
            "equations",
            "check",
            "--lattice",
            "chain:2",
            "--structure",
            s,
            "--eqs",
            e,
            "--random",
            "10",
            "--seed",
            "5",
        ],
        vec![
            "type2",
            "crosscheck",
            "--n",
            "8",
            "--trials",
            "50",
            "--seed",
            "3",
        ],
        vec!["lattice", "check", "--all-topologies", "3"],
    ];
    for args in &commands {
        let mut full = args.clone();
        full.extend(["--format", "machine"]);
        let first = convalg(&full);
        let second = convalg(&full);
        if !first.status.success() {
            return Err(format!("{}: exit {}", args.join(" "), first.status));
        }
        if first.stdout != second.stdout || first.stdout.is_empty() {
            return Err(format!("{}: outputs differ", args.join(" ")));
        }
    }
    Ok(format!(
        "{} commands byte-identical across runs",
        commands.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked example through three routes", demo_reproduction),
        ("Φ is an isomorphism L^X ≅ X̂⁺", main_isomorphism),
        ("2^X ≅ X⁺", characteristic_isomorphism),
        (
            "L^X and X⁺ satisfy the same equations",
            equational_agreement,
        ),
        ("type-2 closed forms match the grid oracle", type2_oracle),
        ("type-2 unit and constant laws", type2_laws),
        ("Heyting laws", heyting_laws),
        ("deterministic machine output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use hyperlat::catalog;
use hyperlat::chamber::{class_chamber, embedding_model, perturb_interior, perturbation_ok, separating_candidates, vinberg};
use hyperlat::matrix::{qvec, rat, Int, Rat};
use hyperlat::pipeline::seed_lattice;
use hyperlat::Error;

fn a10() -> Vec<Rat> {
    qvec(&vinberg::a10())
}

#[test]
fn unperturbed_point_passes() {
    let model = embedding_model(&seed_lattice()).unwrap();
    assert!(perturbation_ok(&model, &a10(), &a10()).unwrap());
    assert!(separating_candidates(&a10(), &a10()).unwrap().is_empty());
}

#[test]
fn accepted_perturbations_pass_all_checks() {
    let model = embedding_model(&seed_lattice()).unwrap();
    for seed in 1..4 {
        let mut calls = 0;
        let p = perturb_interior(&model, &a10(), seed, 16, &mut |_| {
            calls += 1;
            Ok(true)
        })
        .unwrap();
        assert_ne!(p, a10());
        assert_eq!(calls, 1);
        assert!(perturbation_ok(&model, &a10(), &p).unwrap());
    }
}

#[test]
fn rejected_distinctness_exhausts_the_budget() {
    let model = embedding_model(&seed_lattice()).unwrap();
    match perturb_interior(&model, &a10(), 7, 5, &mut |_| Ok(false)) {
        Err(Error::Exhausted(msg)) => assert!(msg.contains("distinctness 5")),
        other => panic!("expected exhaustion, got {other:?}"),
    }
}

#[test]
fn point_on_a_wall_is_rejected() {
    let cc = class_chamber(&seed_lattice(), 1, 100_000).unwrap();
    let g = catalog::l10_gram();
    let w: Vec<Int> = cc.chamber.walls[0].iter().map(|&x| Int::from(x)).collect();
    let a = vinberg::a10();
    // the projection of a10 to the wall hyperplane
    let c = Rat::new(g.form(&a, &w), Int::from(2));
    let x: Vec<Rat> = a.iter().zip(&w).map(|(ai, wi)| Rat::from_integer(ai.clone()) + &c * Rat::from_integer(wi.clone())).collect();
    assert_eq!(g.to_rat().form(&x, &qvec(&w)), rat(0, 1));
    match perturb_interior(&cc.model, &x, 1, 4, &mut |_| Ok(true)) {
        Err(Error::Precondition(_)) => {}
        other => panic!("expected a precondition error, got {other:?}"),
    }
}

#[test]
fn reflected_point_is_separated_by_the_simple_root() {
    let g = catalog::l10_gram();
    let s = vinberg::simple_reflection(0);
    let b = qvec(&s.vec_mul(&vinberg::a10()));
    let got = separating_candidates(&a10(), &b).unwrap();
    let mut e1 = vec![Int::from(0); 10];
    e1[0] = Int::from(1);
    assert!(got.contains(&e1));
    for x in &got {
        let n = g.form(x, x);
        assert!(n == Int::from(-2) || n == Int::from(-4));
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qteich::classical::{
    alpha_form, beta_form, corner_change, flow_equals_action_check, h1_basis, holonomy_covector,
    penner_log_jacobian, penner_word, poisson_bracket, pullback_check, triangle_from_penner,
    triangle_log_jacobian, triangle_word, PennerPoint, Sampler,
};
use qteich::compact::{
    build_t, conjugation_residual, cyclic_psi, flip_step, CyclicRepContext, GeneratorMap,
};
use qteich::qdilog::{functional_residual, psi_eval, QDilogParams};
use qteich::triangulation::{apply_word, double_flip_word, Move, MoveWord};
use qteich::{DecoratedTriangulation, Error};

const SURFACES: [(u32, u32); 5] = [(1, 1), (0, 4), (1, 2), (2, 1), (0, 5)];

fn surface() -> impl Strategy<Value = DecoratedTriangulation> {
    prop::sample::select(SURFACES.to_vec())
        .prop_map(|(g, s)| DecoratedTriangulation::new_surface(g, s).unwrap())
}

/// A random word of normalized flips and rotations; flips of self-folded
/// arcs are skipped.
fn random_word(d: &DecoratedTriangulation, picks: &[(bool, usize)]) -> MoveWord {
    let mut cur = d.clone();
    let mut word = MoveWord::default();
    for &(flip, i) in picks {
        let step = if flip {
            match cur.normalized_flip_word(i % cur.num_edges()) {
                Ok(w) => w,
                Err(Error::SelfFolded(_)) => continue,
                Err(e) => panic!("{e}"),
            }
        } else {
            MoveWord(vec![Move::Rotate {
                tri: i % cur.num_triangles(),
            }])
        };
        cur = apply_word(&cur, &step).unwrap();
        word = word.concat(&step);
    }
    word
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn double_flip_is_identity(d in surface(), e in 0usize..9, seed in any::<u64>()) {
        let e = e % d.num_edges();
        let p = Sampler::new(seed).penner(&d);
        let w = double_flip_word(&d, e).unwrap();
        let (end, q) = penner_word(&d, &p, &w).unwrap();
        prop_assert_eq!(end.without_flags(), d);
        prop_assert_eq!(q, p);
    }

    #[test]
    fn words_commute_with_edge_to_triangle_map(
        d in surface(),
        picks in prop::collection::vec((any::<bool>(), 0usize..64), 1..6),
        seed in any::<u64>(),
    ) {
        let w = random_word(&d, &picks);
        let p = Sampler::new(seed).penner(&d);
        let (end, q) = penner_word(&d, &p, &w).unwrap();
        let (end2, k) = triangle_word(&d, &triangle_from_penner(&d, &p).unwrap(), &w).unwrap();
        prop_assert_eq!(&end, &end2);
        prop_assert_eq!(triangle_from_penner(&end, &q).unwrap(), k);
    }

    #[test]
    fn forms_are_preserved_along_words(
        d in surface(),
        picks in prop::collection::vec((any::<bool>(), 0usize..64), 1..5),
        seed in any::<u64>(),
    ) {
        let w = random_word(&d, &picks);
        let mut s = Sampler::new(seed);
        let (end, j) = penner_log_jacobian(&d, &w, &s.penner(&d)).unwrap();
        prop_assert!(pullback_check(&j, &alpha_form(&d), &alpha_form(&end)));
        let (end, j) = triangle_log_jacobian(&d, &w, &s.triangle(&d)).unwrap();
        prop_assert!(pullback_check(&j, &beta_form(&d), &beta_form(&end)));
    }

    #[test]
    fn corner_change_has_order_three(d in surface(), t in 0usize..8, seed in any::<u64>()) {
        let t = t % d.num_triangles();
        let k = Sampler::new(seed).triangle(&d);
        let mut m = k.clone();
        for _ in 0..3 {
            m = corner_change(&m, t).unwrap();
        }
        prop_assert_eq!(m, k);
    }

    #[test]
    fn flow_matches_action(d in surface(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let k = s.triangle(&d);
        let f = s.weights(&d);
        prop_assert!(flow_equals_action_check(&d, &f, &k).unwrap().equal);
    }

    #[test]
    fn brackets_are_antisymmetric(d in surface()) {
        let basis = h1_basis(&d);
        let hol: Vec<_> = basis.iter().map(|c| holonomy_covector(&d, c).unwrap()).collect();
        let form = beta_form(&d);
        for u in &hol {
            for v in &hol {
                let a = poisson_bracket(u, v, &form).unwrap();
                let b = poisson_bracket(v, u, &form).unwrap();
                prop_assert_eq!(a, -b);
            }
        }
    }

    #[test]
    fn flip_images_keep_relations(n in prop::sample::select(vec![2usize, 3, 5]), h in 0.01f64..100.0) {
        let ctx = CyclicRepContext::new(n, vec![0, 1]).unwrap();
        let img = flip_step(&ctx, &GeneratorMap::identity(&ctx), 0, 1, h).unwrap();
        prop_assert!(img.relation_residual(&ctx) <= 1e-12);
        let t = build_t(n, 0, 1, h).unwrap();
        prop_assert!(conjugation_residual(&ctx, &t.matrix, &img) <= 1e-10);
    }

    #[test]
    fn cyclic_dilog_closes(n in 2usize..8, lambda in 0.05f64..5.0) {
        let p = cyclic_psi(n, lambda).unwrap();
        prop_assert!(p.closure_residual() <= 1e-12 * (1.0 + lambda.powi(n as i32)));
        prop_assert!(p.functional_residual() <= 1e-12 * (1.0 + lambda.powi(n as i32)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn psi_is_unitary_and_solves_the_difference_equation(x in -5.0f64..5.0, hbar in 0.2f64..3.0) {
        let p = QDilogParams::new(hbar);
        let v = psi_eval(Complex64::new(x, 0.0), &p).unwrap();
        prop_assert!((v.norm() - 1.0).abs() <= 1e-8);
        prop_assert!(functional_residual(x, &p).unwrap() <= 1e-8);
    }

    #[test]
    fn psi_does_not_depend_on_the_contour(x in -3.0f64..3.0, y in -1.0f64..1.0) {
        let p = QDilogParams::new(1.0);
        let z = Complex64::new(x, y);
        let a = psi_eval(z, &p).unwrap();
        let b = psi_eval(z, &p.clone().with_delta(0.2)).unwrap();
        prop_assert!((a - b).norm() / a.norm() <= p.tol);
    }
}

#[test]
fn self_folded_arc_is_not_flipped() {
    // two monogons glued along their outer edge: a thrice-punctured sphere
    let d = DecoratedTriangulation::from_parts(0, 3, vec![[0, 0, 1], [1, 2, 2]], None).unwrap();
    assert_eq!(d.count_puncture_classes(), 3);
    assert!(d.is_self_folded(0));
    assert!(matches!(d.flip(0), Err(Error::SelfFolded(0))));
    assert!(matches!(d.flip(2), Err(Error::SelfFolded(2))));
    let p = PennerPoint::ones(&d);
    assert!(qteich::classical::penner_flip(&d, &p, 0).is_err());
}

#[test]
fn triangulation_json_round_trips_after_moves() {
    for (g, s) in SURFACES {
        let d = DecoratedTriangulation::new_surface(g, s).unwrap();
        let w = random_word(&d, &[(true, 1), (false, 2), (true, 4)]);
        let end = apply_word(&d, &w).unwrap();
        let text = serde_json::to_string(&end.to_json()).unwrap();
        let back = DecoratedTriangulation::from_json_str(&text).unwrap();
        assert_eq!(back.to_json(), end.to_json());
    }
}

#[test]
fn strip_edge_is_rejected() {
    let p = QDilogParams::new(PI / 2.0);
    assert!(psi_eval(Complex64::new(0.0, PI + PI / 2.0), &p).is_err());
    assert!(psi_eval(Complex64::new(0.0, 2.5), &p).is_ok());
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use logskel::arith::{q, qr, ExtQ, Q};
use logskel::fixtures;
use logskel::logstructure::{Mode, Pair};
use logskel::polyhedra::Fan;
use logskel::valuations::SkeletonPoint;
use logskel::weights::{weight, weight_chart, weight_chart_via_discrepancy, Form};

fn load(pair: &str, form: &str) -> (Pair, Form) {
    let p = Pair::from_json(pair).unwrap();
    let f = Form::from_json(&p, form).unwrap();
    (p, f)
}

fn a2_forms(pair: &Pair) -> Vec<(String, Form)> {
    let v: Value = serde_json::from_str(fixtures::A2_FORMS).unwrap();
    v["forms"].as_object().unwrap().iter().map(|(k, f)| (k.clone(), Form::from_value(pair, f).unwrap())).collect()
}

fn random_q(rng: &mut ChaCha8Rng) -> Q {
    qr(rng.random_range(0..15), rng.random_range(1..5))
}

#[test]
fn every_fixture_parses_and_round_trips() {
    for (pair, form) in [
        (fixtures::EXAMPLE_PAIR, fixtures::EXAMPLE_FORM),
        (fixtures::EXAMPLE_PAIR_TRIVIAL, fixtures::EXAMPLE_FORM_TRIVIAL),
        (fixtures::DWORK_PAIR, fixtures::DWORK_FORM),
        (fixtures::DWORK_PAIR_DVF, fixtures::DWORK_FORM_DVF),
    ] {
        let (p, f) = load(pair, form);
        let p2 = Pair::from_json(&p.to_value().to_string()).unwrap();
        assert_eq!(p2.to_value(), p.to_value());
        assert_eq!(Form::from_value(&p2, &f.to_value(&p)).unwrap().to_value(&p2), f.to_value(&p));
    }
    let a2 = Pair::from_json(fixtures::A2_PAIR).unwrap();
    assert_eq!(a2_forms(&a2).len(), 3);
    assert_eq!(Fan::from_json(fixtures::P2_FAN).unwrap().cones.len(), 7);
    assert_eq!(Fan::from_json(fixtures::P1_FAN).unwrap().cones.len(), 3);
}

#[test]
fn trivial_weight_formulas_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a2 = Pair::from_json(fixtures::A2_PAIR).unwrap();
    let mut cases: Vec<(Pair, Form)> = a2_forms(&a2).into_iter().map(|(_, f)| (a2.clone(), f)).collect();
    cases.push(load(fixtures::EXAMPLE_PAIR_TRIVIAL, fixtures::EXAMPLE_FORM_TRIVIAL));
    cases.push(load(fixtures::DWORK_PAIR, fixtures::DWORK_FORM));
    for (pair, form) in &cases {
        for piece in &form.pieces {
            for _ in 0..50 {
                let w: Vec<Q> = (0..pair.charts[piece.chart].dim()).map(|_| random_q(&mut rng)).collect();
                let k = rng.random_range(1..4);
                let direct = weight_chart(pair, piece, &w).unwrap();
                assert_eq!(direct, weight_chart_via_discrepancy(pair, piece, &w).unwrap());
                let pow = form.power(k);
                let pp = pow.piece(piece.chart).unwrap();
                assert_eq!(weight_chart(pair, pp, &w).unwrap(), direct * q(k.into()));
            }
        }
    }
}

/// On `⟨b, α⟩ = 1` the trivially valued weight of `η ∧ dlog π` equals the dvf weight of `η`.
#[test]
fn slice_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (tp, tf, dp, df) in [
        (fixtures::EXAMPLE_PAIR_TRIVIAL, fixtures::EXAMPLE_FORM_TRIVIAL, fixtures::EXAMPLE_PAIR, fixtures::EXAMPLE_FORM),
        (fixtures::DWORK_PAIR, fixtures::DWORK_FORM, fixtures::DWORK_PAIR_DVF, fixtures::DWORK_FORM_DVF),
    ] {
        let (tp, tf) = load(tp, tf);
        let (dp, df) = load(dp, df);
        let (tk, dk) = (tp.kato_fan().unwrap(), dp.kato_fan().unwrap());
        assert_eq!(tk.labels, dk.labels);
        let mut checked = 0;
        for (x, p) in dk.points.iter().enumerate() {
            let b: Vec<Q> = dp.multiplicities(&p.index_set).into_iter().map(|m| q(m.into())).collect();
            for _ in 0..20 {
                let mut alpha: Vec<Q> = (0..b.len()).map(|_| random_q(&mut rng) + qr(1, 7)).collect();
                let s: Q = alpha.iter().zip(&b).map(|(a, b)| a * b).sum();
                if s == q(0) {
                    continue;
                }
                alpha.iter_mut().for_each(|a| *a /= &s);
                let vt = SkeletonPoint::finite(&tk, x, &alpha, Mode::Trivial).unwrap();
                let vd = SkeletonPoint::finite(&dk, x, &alpha, Mode::Dvf).unwrap();
                assert_eq!(weight(&tp, &tk, &tf, &vt).unwrap(), weight(&dp, &dk, &df, &vd).unwrap(), "at {}", p.label);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn dwork_forms_have_constant_zero_weight() {
    let (p, f) = load(fixtures::DWORK_PAIR, fixtures::DWORK_FORM);
    let k = p.kato_fan().unwrap();
    let x = k.point_by_label("{X,Y}").unwrap();
    let v = SkeletonPoint::finite(&k, x, &[q(3), qr(1, 2)], Mode::Trivial).unwrap();
    assert_eq!(weight(&p, &k, &f, &v).unwrap(), ExtQ::zero());
}

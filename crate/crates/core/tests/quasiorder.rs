use edmkit::evaluation::{
    compare_finite, compare_lives, default_schedule, life_mean, Comparator, FiniteLife, LifeRelation, Relation, Score,
    ScoreVector, Sense,
};
use proptest::prelude::*;

const ARITY: usize = 2;

fn score() -> impl Strategy<Value = Score> {
    prop_oneof![4 => (-5i32..=5).prop_map(|v| Score::Defined(v as f64)), 1 => Just(Score::Undef)]
}

fn life(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<ScoreVector>> {
    proptest::collection::vec(proptest::collection::vec(score(), ARITY).prop_map(ScoreVector), len)
}

fn comparators() -> Vec<Comparator> {
    vec![
        Comparator::pareto(ARITY),
        Comparator::lexicographic(vec![Sense::Lower, Sense::Higher], vec![1, 0]).unwrap(),
    ]
}

fn verdict(a: &[ScoreVector], b: &[ScoreVector], c: &Comparator) -> LifeRelation {
    compare_lives(&FiniteLife { arity: ARITY, scores: a }, &FiniteLife { arity: ARITY, scores: b }, c, &default_schedule())
        .unwrap()
        .relation
}

fn ge(r: LifeRelation) -> bool {
    matches!(r, LifeRelation::Better | LifeRelation::Equal)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reflexive(a in life(0..30)) {
        for c in comparators() {
            prop_assert_eq!(verdict(&a, &a, &c), LifeRelation::Equal);
        }
    }

    #[test]
    fn transitive(a in life(1..12), b in life(1..12), c in life(1..12)) {
        for cmp in comparators() {
            if ge(verdict(&a, &b, &cmp)) && ge(verdict(&b, &c, &cmp)) {
                prop_assert!(ge(verdict(&a, &c, &cmp)));
            }
        }
    }

    #[test]
    fn undef_steps_are_neutral(a in life(0..30), at in 0usize..30) {
        let mut b = a.clone();
        b.insert(at.min(a.len()), ScoreVector::undef(ARITY));
        prop_assert_eq!(life_mean(&a, ARITY).unwrap(), life_mean(&b, ARITY).unwrap());
    }

    #[test]
    fn positive_scaling_preserves_pareto(a in life(0..20), b in life(0..20), c in 1u32..10) {
        let cmp = Comparator::pareto(ARITY);
        let scale = |v: &[ScoreVector]| -> Vec<ScoreVector> {
            v.iter().map(|s| ScoreVector(s.0.iter().map(|x| match x {
                Score::Defined(y) => Score::Defined(y * c as f64),
                Score::Undef => Score::Undef,
            }).collect())).collect()
        };
        let (ma, mb) = (life_mean(&a, ARITY).unwrap(), life_mean(&b, ARITY).unwrap());
        let (sa, sb) = (life_mean(&scale(&a), ARITY).unwrap(), life_mean(&scale(&b), ARITY).unwrap());
        prop_assert_eq!(compare_finite(&ma, &mb, &cmp).unwrap(), compare_finite(&sa, &sb, &cmp).unwrap());
    }

    #[test]
    fn halves_dominating_means_dominate(half in 1usize..10, a in proptest::collection::vec(-5i32..=5, 20), b in proptest::collection::vec(-5i32..=5, 20)) {
        let to = |v: &[i32]| -> Vec<ScoreVector> { v.iter().map(|&x| ScoreVector::defined(&[x as f64])).collect() };
        let (l1, l2) = (to(&a[..2 * half]), to(&b[..2 * half]));
        let mean = |v: &[ScoreVector]| life_mean(v, 1).unwrap().0[0].value().unwrap();
        if mean(&l1[..half]) >= mean(&l2[..half]) && mean(&l1[half..]) >= mean(&l2[half..]) {
            prop_assert!(mean(&l1) >= mean(&l2));
            let r = compare_finite(&life_mean(&l1, 1).unwrap(), &life_mean(&l2, 1).unwrap(), &Comparator::pareto(1)).unwrap();
            prop_assert!(r.is_ge());
        }
    }
}

#[test]
fn undef_is_not_zero() {
    let with_undef = vec![ScoreVector(vec![Score::Defined(2.0)]), ScoreVector(vec![Score::Undef])];
    let with_zero = vec![ScoreVector(vec![Score::Defined(2.0)]), ScoreVector(vec![Score::Defined(0.0)])];
    assert_eq!(life_mean(&with_undef, 1).unwrap(), ScoreVector::defined(&[2.0]));
    assert_eq!(life_mean(&with_zero, 1).unwrap(), ScoreVector::defined(&[1.0]));
    let r = compare_finite(&life_mean(&with_undef, 1).unwrap(), &life_mean(&with_zero, 1).unwrap(), &Comparator::pareto(1)).unwrap();
    assert_eq!(r, Relation::Better);
}

use std::f64::consts::PI;

use beamsplit_core::lie::trivial_embedding;
use beamsplit_core::linalg::exp_skew;
use beamsplit_core::orbit::Embed;
use beamsplit_core::words::{
    covering_estimate, covering_profile, enumerate_words, generator_order, haar_samples, identity_word_search,
    trace_distance, ExponentPolicy, Word, WordOptions,
};
use beamsplit_core::{Error, RotationMatrix};
use proptest::prelude::*;

fn opts() -> WordOptions {
    WordOptions::default()
}

#[test]
fn quarter_turn_has_identity_at_exponent_four() {
    let g = RotationMatrix::givens(3, 0, 1, PI / 2.0);
    assert_eq!(generator_order(&g), Some(4));
    assert_eq!(identity_word_search(std::slice::from_ref(&g), 1, 1e-9, &opts()).unwrap(), None);
    let sym = WordOptions { policy: ExponentPolicy::Symmetric(4), ..opts() };
    let w = identity_word_search(&[g], 1, 1e-9, &sym).unwrap().unwrap();
    assert_eq!(w.letters(), &[(0, 4)]);
    assert_eq!(w.weight(), 4);
}

#[test]
fn commuting_blocks_have_order_lcm() {
    let g = RotationMatrix::givens(4, 0, 1, 2.0 * PI / 5.0).mul(&RotationMatrix::givens(4, 2, 3, 2.0 * PI / 3.0));
    assert_eq!(generator_order(&g), Some(15));
    let sym = WordOptions { policy: ExponentPolicy::Symmetric(15), ..opts() };
    let w = identity_word_search(&[g], 1, 1e-9, &sym).unwrap().unwrap();
    assert_eq!(w.letters(), &[(0, 15)]);
}

#[test]
fn orthogonal_fifth_turns_have_no_short_relation() {
    let a = RotationMatrix::givens(3, 0, 1, 2.0 * PI / 5.0);
    let b = RotationMatrix::givens(3, 1, 2, 2.0 * PI / 5.0);
    assert_eq!(identity_word_search(&[a, b], 6, 1e-9, &opts()).unwrap(), None);
}

#[test]
fn evaluation_is_a_homomorphism() {
    let gens = [RotationMatrix::givens(3, 0, 1, 0.7), RotationMatrix::givens(3, 1, 2, 1.3)];
    let words: Vec<_> = enumerate_words(&gens, 3, &opts()).unwrap().collect();
    for (w, m) in words.iter().step_by(7) {
        assert!(w.evaluate(&gens).unwrap().distance_max(m) < 1e-12);
        for (v, n) in words.iter().step_by(11) {
            let joined = w.concat(v);
            assert!(joined.evaluate(&gens).unwrap().distance_max(&m.mul(n)) < 1e-12);
        }
    }
}

#[test]
fn enumeration_yields_each_reduced_word_once() {
    let gens = [RotationMatrix::givens(3, 0, 1, 2.0 * PI / 3.0), RotationMatrix::givens(3, 1, 2, 0.4)];
    let words: Vec<Word> = enumerate_words(&gens, 4, &opts()).unwrap().map(|(w, _)| w).collect();
    let unique: std::collections::HashSet<_> = words.iter().collect();
    assert_eq!(unique.len(), words.len());
    assert!(words.iter().all(Word::is_reduced));
    assert!(words.windows(2).all(|p| p[0].len() <= p[1].len()));
    // exponents {1, 2} and {±1}: shells of 4, 8, 16, 32
    assert_eq!(words.len(), 60);
}

#[test]
fn budget_ceiling_is_enforced() {
    let gens = [RotationMatrix::givens(3, 0, 1, 0.7), RotationMatrix::givens(3, 1, 2, 1.3)];
    let tight = WordOptions { budget: 10, ..opts() };
    assert!(matches!(enumerate_words(&gens, 3, &tight), Err(Error::Budget { .. })));
    assert!(matches!(identity_word_search(&gens, 3, 1e-9, &tight), Err(Error::Budget { .. })));
    assert!(matches!(covering_estimate(&gens, 3, 10, 1, &tight), Err(Error::Budget { .. })));
}

#[test]
fn identity_generator_radius_is_largest_sample_angle() {
    let r = covering_estimate(&[RotationMatrix::identity(3)], 3, 200, 11, &opts()).unwrap();
    let largest = haar_samples(3, 200, 11)
        .unwrap()
        .iter()
        .map(|m| trace_distance(m[0] + m[4] + m[8], 3))
        .fold(0.0, f64::max);
    assert!((r.covering_radius - largest).abs() < 1e-12);
    assert!(r.covering_radius <= PI);
    assert_eq!(r.histogram.iter().sum::<usize>(), 200);
}

#[test]
fn coverage_is_deterministic_and_nested() {
    let theta = 2.0 * PI / 5.0;
    let gens = [RotationMatrix::givens(3, 0, 1, theta), RotationMatrix::givens(3, 1, 2, theta)];
    let a = covering_profile(&gens, &[2, 4, 6], 150, 3, &opts()).unwrap();
    let b = covering_profile(&gens, &[2, 4, 6], 150, 3, &opts()).unwrap();
    assert_eq!(a, b);
    assert!(a[0].covering_radius >= a[1].covering_radius && a[1].covering_radius >= a[2].covering_radius);
    let single = covering_estimate(&gens, 4, 150, 3, &opts()).unwrap();
    assert_eq!(single.covering_radius, a[1].covering_radius);
}

#[test]
fn subgroup_words_stay_far_from_generic_rotations() {
    let o = exp_skew(&trivial_embedding(3, 0, 1, 2).scale(2.0 * PI / 5.0 / 3f64.sqrt()));
    let gens = [o.embed(4, &[0, 1, 2]).unwrap(), o.embed(4, &[1, 2, 3]).unwrap()];
    let r = covering_profile(&gens, &[3, 5], 100, 5, &opts()).unwrap();
    assert!(r[1].covering_radius > 2.0);
}

proptest! {
    #[test]
    fn free_reduction_is_idempotent(letters in prop::collection::vec((0usize..3, -3i64..=3), 0..20)) {
        let w = Word::new(letters.clone());
        prop_assert!(w.is_reduced());
        prop_assert!(w.len() <= letters.len());
        prop_assert_eq!(Word::new(w.letters().to_vec()), w.clone());
        prop_assert!(w.concat(&w.inverse()).is_empty());
    }
}

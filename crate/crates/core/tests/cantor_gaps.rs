use proptest::prelude::*;
use skein_core::cantor::{build_thread_from_rule, GammaRule, GammaSource, GapStream};
use skein_core::exactnum::{q, OpenInterval, Rational};

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Independent re-simulation of the placement rule: the `i`-th gap starts at
/// the first reduced fraction in `(0,1)` (by denominator, then numerator)
/// whose interval of length `γ_i` fits in `[0,1]` and misses earlier gaps.
fn simulate(gammas: &[Rational]) -> Vec<(Rational, Rational)> {
    let mut placed: Vec<(Rational, Rational)> = Vec::new();
    for g in gammas {
        'search: for den in 2i64.. {
            for num in 1..den {
                if gcd(num, den) != 1 {
                    continue;
                }
                let left = q(num, den);
                let right = &left + g;
                if right > q(1, 1) {
                    continue;
                }
                if placed.iter().all(|(a, b)| right <= *a || *b <= left) {
                    placed.push((left, right));
                    break 'search;
                }
            }
        }
    }
    placed
}

fn rule_terms(rule: &GammaRule, k: usize) -> Vec<Rational> {
    (1..=k).map(|i| rule.term(i)).collect()
}

#[test]
fn first_three_half_bound_gaps() {
    let rule = GammaRule::half_bound();
    let mut s = GapStream::new(GammaSource::Rule(rule.clone())).unwrap();
    s.ensure(3).unwrap();
    let expected = [(q(1, 2), q(5, 8)), (q(1, 3), q(1, 3) + q(1, 16)), (q(2, 3), q(2, 3) + q(1, 32))];
    for (g, (l, r)) in s.emitted().iter().zip(expected.iter()) {
        assert_eq!((g.left(), g.right()), (l, r));
    }
    assert_eq!(simulate(&rule_terms(&rule, 3)), expected.to_vec());
}

#[test]
fn sixty_four_gaps_match_simulation_and_keep_half_the_measure() {
    let rule = GammaRule::half_bound();
    let mut s = GapStream::new(GammaSource::Rule(rule.clone())).unwrap();
    let oracle = simulate(&rule_terms(&rule, 64));
    for k in 1..=64 {
        let g = s.advance().unwrap().clone();
        assert_eq!((g.left().clone(), g.right().clone()), oracle[k - 1]);
        assert_eq!(g.length(), rule.term(k));
        let removed: Rational = s.emitted().iter().map(OpenInterval::length).sum();
        assert!(q(1, 1) - removed > q(1, 2), "k = {k}");
    }
}

#[test]
fn stream_json_resumes_identically() {
    let mut s = GapStream::new(GammaSource::Rule(GammaRule::half_bound())).unwrap();
    s.ensure(5).unwrap();
    let mut back: GapStream = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
    s.advance().unwrap();
    back.advance().unwrap();
    assert_eq!(back.emitted(), s.emitted());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn geometric_rules_follow_the_simulation(shift in 1u32..5, k in 1usize..10) {
        let rule = GammaRule::Geometric { shift };
        let t = build_thread_from_rule(&rule, k, q(1, 2)).unwrap();
        let mut oracle: Vec<(Rational, Rational)> = simulate(&rule_terms(&rule, k));
        oracle.sort();
        let got: Vec<(Rational, Rational)> = t.gaps().iter().map(|g| (g.left().clone(), g.right().clone())).collect();
        prop_assert_eq!(got, oracle);
        prop_assert!(t.measure() >= q(1, 2));
    }

    #[test]
    fn prefix_streams_are_disjoint_and_exact(num in proptest::collection::vec(1i64..4, 1..6)) {
        // Strictly decreasing prefix under 2^{-(i+1)}.
        let mut gammas = Vec::new();
        let mut prev = q(1, 4);
        for (i, n) in num.iter().enumerate() {
            let cap = Rational::pow2_neg(i as u32 + 2);
            let g = (&cap * &q(*n, 4)).min(&prev * &q(1, 2));
            prev = g.clone();
            gammas.push(g);
        }
        let mut s = GapStream::new(GammaSource::Prefix(gammas.clone())).unwrap();
        s.ensure(gammas.len()).unwrap();
        for (i, g) in s.emitted().iter().enumerate() {
            prop_assert_eq!(g.length(), gammas[i].clone());
            for h in &s.emitted()[..i] {
                prop_assert!(!g.intersects(h));
            }
        }
        prop_assert_eq!(
            s.emitted().iter().map(|g| (g.left().clone(), g.right().clone())).collect::<Vec<_>>(),
            simulate(&gammas)
        );
    }
}

use proptest::prelude::*;
use skein_core::cantor::{build_thread, GammaRule, GammaSource, GapStream};
use skein_core::exactnum::{q, OpenInterval, Rational};
use skein_core::fixtures::{t_a, t_line};
use skein_core::gammastar::{
    brute_force_map_search, gamma_star_prefix, jump_infeasibility, recheck_trace, FamilyMember, GammaStarConfig,
    GammaStarRun, JumpCertificate,
};
use skein_core::lipmap::lip_const;
use skein_core::thread::Thread;

fn family() -> Vec<FamilyMember> {
    [q(1, 2), q(1, 3), q(1, 4)]
        .into_iter()
        .map(|w| FamilyMember::stream(GapStream::new(GammaSource::Rule(GammaRule::half_bound())).unwrap(), w))
        .collect()
}

fn run() -> GammaStarRun {
    gamma_star_prefix(&family(), &GammaStarConfig::new(q(2, 1), q(1, 4), 5)).unwrap()
}

#[test]
fn diagonal_run_properties() {
    let r = run();
    assert_eq!(r.gammas[0], q(1, 64));
    for (i, g) in r.gammas.iter().enumerate() {
        let k = i as u32 + 1;
        assert!(g < &(Rational::pow2_neg(k + 1) * q(1, 2) * q(1, 4)));
        if i > 0 {
            assert!(g < &r.gammas[i - 1]);
        }
    }
    recheck_trace(&r).unwrap();
    let back: GammaStarRun = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn certificates_and_search_agree_on_the_run() {
    let r = run();
    for member in family() {
        let target = member.prefix_thread(5).unwrap();
        let c = jump_infeasibility(&target, &r.gammas, &q(2, 1), 5).unwrap();
        assert!(matches!(c, JumpCertificate::Infeasible { .. }));
    }
    let target = family()[2].prefix_thread(5).unwrap();
    let source = build_thread(&r.gammas, 3, q(1, 2)).unwrap();
    assert_eq!(brute_force_map_search(&source, &target, &q(2, 1), &q(1, 64)).unwrap(), None);
}

/// Every non-decreasing endpoint-fixing assignment, checked pair by pair
/// without memoizing dead states.
fn exhaustive_exists(source: &Thread, target: &Thread, k: &Rational, step: &Rational) -> bool {
    let xs = source.sample_points(step);
    let vs = target.sample_points(step);
    fn go(xs: &[Rational], vs: &[Rational], src: &Thread, tgt: &Thread, k: &Rational, chosen: &mut Vec<usize>) -> bool {
        // All pairs involving the newest point, so partial assignments stay valid.
        if let Some(&last) = chosen.last() {
            let j = chosen.len() - 1;
            for i in 0..j {
                if tgt.metric(&vs[chosen[i]], &vs[last]) > k * &src.metric(&xs[i], &xs[j]) {
                    return false;
                }
            }
        }
        if chosen.len() == xs.len() {
            return *chosen.last().unwrap() == vs.len() - 1;
        }
        let from = chosen.last().copied().unwrap_or(0);
        let choices: Vec<usize> = if chosen.is_empty() { vec![0] } else { (from..vs.len()).collect() };
        for c in choices {
            chosen.push(c);
            if go(xs, vs, src, tgt, k, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(&xs, &vs, source, target, k, &mut Vec::new())
}

/// Brute-force oracle for the block assignment: try every map from analyzed
/// gaps (by position) to source slots and accept if blocks are contiguous,
/// slots distinct (tail excepted) and spans within reach. Each gap may open
/// its own tail block, so there are `m` tail labels.
fn assignment_exists(gaps: &[OpenInterval], budgets: &[Rational], k: &Rational) -> bool {
    let m = gaps.len();
    let slots = budgets.len() + m;
    let mut choice = vec![0usize; m];
    loop {
        let mut ok = true;
        let mut seen = vec![false; slots];
        let mut i = 0;
        while i < m && ok {
            let mut j = i;
            while j + 1 < m && choice[j + 1] == choice[i] {
                j += 1;
            }
            let slot = choice[i];
            let budget = if slot >= budgets.len() { budgets.last().unwrap() } else { &budgets[slot] };
            if slot < budgets.len() {
                ok &= !seen[slot];
                seen[slot] = true;
            }
            let span = gaps[j].right() - gaps[i].left();
            ok &= k * budget >= span;
            i = j + 1;
        }
        if ok {
            return true;
        }
        let mut p = 0;
        loop {
            if p == m {
                return false;
            }
            choice[p] += 1;
            if choice[p] < slots {
                break;
            }
            choice[p] = 0;
            p += 1;
        }
    }
}

#[test]
fn brute_force_known_instances() {
    let id = brute_force_map_search(&t_line(), &t_line(), &q(1, 1), &q(1, 16)).unwrap().unwrap();
    assert_eq!(id.support(), id.values());
    assert_eq!(brute_force_map_search(&t_line(), &t_line(), &q(0, 1), &q(1, 16)).unwrap(), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn search_agrees_with_exhaustive_enumeration(
        s_gap in 0i64..3, t_gap in 0i64..3, k in 1i64..9, sw in 1i64..5, tw in 1i64..5,
    ) {
        let thread = |g: i64, w: i64| {
            let gaps = if g == 0 { vec![] } else { vec![OpenInterval::new(q(1, 4), q(1, 4) + q(g, 8)).unwrap()] };
            Thread::new(q(1, 1), q(w, 4), gaps).unwrap()
        };
        let (src, tgt, k, step) = (thread(s_gap, sw), thread(t_gap, tw), q(k, 2), q(1, 8));
        let found = brute_force_map_search(&src, &tgt, &k, &step).unwrap();
        prop_assert_eq!(found.is_some(), exhaustive_exists(&src, &tgt, &k, &step));
        if let Some(f) = found {
            prop_assert!(lip_const(&f) <= k);
            prop_assert!(f.is_non_decreasing() && f.is_endpoint_fixing());
        }
    }

    #[test]
    fn certificate_agrees_with_assignment_enumeration(
        budgets in proptest::collection::vec(1i64..60, 1..4), k in 1i64..4, m in 1usize..4,
    ) {
        let target = t_a();
        let k = q(k, 1);
        let mut budgets: Vec<Rational> = budgets.into_iter().map(|b| q(b, 256)).collect();
        budgets.sort_by(|a, b| b.cmp(a));
        prop_assume!(budgets.iter().all(|b| b < &(target.width() / &k)));
        let mut gaps: Vec<OpenInterval> = target.gaps_by_length().into_iter().take(m).collect();
        gaps.sort();
        let cert = jump_infeasibility(&target, &budgets, &k, m).unwrap();
        let expected = assignment_exists(&gaps, &budgets, &k);
        prop_assert_eq!(matches!(cert, JumpCertificate::Feasible { .. }), expected);
        if let JumpCertificate::Feasible { assignment } = cert {
            let covered: Vec<OpenInterval> = assignment.iter().flat_map(|b| b.targets.clone()).collect();
            prop_assert_eq!(covered, gaps);
            for b in &assignment {
                prop_assert!(&k * &b.budget >= b.span);
            }
        }
    }
}

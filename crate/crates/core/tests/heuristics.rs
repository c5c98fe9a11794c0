mod common;

use common::{naive_of, naive_walle, random_multi, target_bin, Option3};
use packman::heuristics::{border_stats, column_build, first_fit, floor_build, walle_decide, walle_score, WallEParams};
use packman::{BinDims, BoxDims, ContainerState, Decision, MultiBinState, Orientation, PackError, Placement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn decision_of(k: usize, o: &Option3, opened: bool) -> Decision {
    Decision { placement: Placement { bin: k, anchor: o.0, orientation: o.1 }, opened_new_bin: opened }
}

fn tie_key(o: &Option3) -> (usize, usize, Orientation) {
    (o.0 .0, o.0 .1, o.1)
}

fn cases(n: usize) -> Vec<(MultiBinState, BoxDims)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..n)
        .map(|_| {
            let open = rng.gen_range(0..=3);
            let ms = random_multi(&mut rng, open, 4);
            let d = ms.bin_dims();
            let next = BoxDims::new(rng.gen_range(1..=d.length), rng.gen_range(1..=d.width), rng.gen_range(1..=d.height));
            (ms, next)
        })
        .collect()
}

#[test]
fn first_fit_is_first_in_scan_order() {
    for (ms, next) in cases(300) {
        let (k, _, opts, opened) = target_bin(&ms, next);
        assert_eq!(first_fit(&ms, next).unwrap(), decision_of(k, &opts[0], opened));
    }
}

#[test]
fn floor_and_column_take_extreme_heights() {
    for (ms, next) in cases(300) {
        let (k, _, opts, opened) = target_bin(&ms, next);
        let low = opts.iter().min_by_key(|o| (o.2, tie_key(o))).unwrap();
        let high = opts.iter().min_by_key(|o| (std::cmp::Reverse(o.2), tie_key(o))).unwrap();
        assert_eq!(floor_build(&ms, next).unwrap(), decision_of(k, low, opened));
        assert_eq!(column_build(&ms, next).unwrap(), decision_of(k, high, opened));
    }
}

#[test]
fn walle_takes_the_best_score() {
    let p = WallEParams::default();
    for (ms, next) in cases(300) {
        let (k, n, opts, opened) = target_bin(&ms, next);
        let best = opts
            .iter()
            .map(|o| naive_walle(&n, next.oriented(o.1), o.0, p.alpha).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let d = walle_decide(&ms, next, &p).unwrap();
        assert_eq!(d.placement.bin, k);
        assert_eq!(d.opened_new_bin, opened);
        let state = if opened { ContainerState::new(ms.bin_dims()).unwrap() } else { ms.bin(k).clone() };
        let got = walle_score(&state, next.oriented(d.placement.orientation), d.placement.anchor, &p).unwrap();
        assert!((got - best).abs() < 1e-9, "{got} vs {best}");
    }
}

#[test]
fn walle_score_matches_naive_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let ms = random_multi(&mut rng, 1, 1);
        let s = ms.bin(0);
        let n = naive_of(s);
        let alpha = [rng.gen(), rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        let p = WallEParams::new(alpha).unwrap();
        let d = common::random_box(&mut rng, s.dims());
        for (anchor, o, _) in n.feasible(d) {
            let od = d.oriented(o);
            let got = walle_score(s, od, anchor, &p).unwrap();
            assert!((got - naive_walle(&n, od, anchor, alpha).unwrap()).abs() < 1e-9);
            let top = n.rest(od, anchor).unwrap() + od.h;
            let st = border_stats(s, od, anchor, top);
            assert!(st.higher + st.flush <= 2 * (od.l + od.b));
        }
    }
}

#[test]
fn walle_choice_is_scale_invariant() {
    let base = WallEParams::default();
    let scaled = WallEParams::new(base.alpha.map(|a| a * 3.5)).unwrap();
    for (ms, next) in cases(100) {
        assert_eq!(walle_decide(&ms, next, &base).unwrap(), walle_decide(&ms, next, &scaled).unwrap());
    }
}

#[test]
fn infeasible_anchor_is_rejected_by_score() {
    let mut s = ContainerState::new(BinDims::new(10, 10, 10)).unwrap();
    s.place(BoxDims::new(2, 2, 2), (0, 0)).unwrap();
    let r = walle_score(&s, BoxDims::new(3, 3, 1), (1, 1), &WallEParams::default());
    assert!(matches!(r, Err(PackError::PreconditionViolation(_))));
}

#[test]
fn oversized_box_is_an_error_not_a_new_bin_loop() {
    let mut ms = MultiBinState::new(BinDims::new(4, 4, 4), 3).unwrap();
    ms.open_next_bin().unwrap();
    let r = first_fit(&ms, BoxDims::new(5, 5, 1));
    assert!(matches!(r, Err(PackError::PreconditionViolation(_))));
}

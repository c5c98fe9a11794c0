mod common;

use common::random_multi;
use packman::candidates::{candidates_or_new_bin, corner_candidates, touches_corner_structure, MAX_CANDIDATES};
use packman::encoder::{border_walk, encode_border, StateEncoder, BORDER_LEN, STATE_LEN, TILES};
use packman::{BinDims, BoxDims, MultiBinState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn states(seed: u64, n: usize) -> Vec<(MultiBinState, BoxDims)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let open = rng.gen_range(1..=3);
            let ms = random_multi(&mut rng, open, 4);
            let d = ms.bin_dims();
            let next = BoxDims::new(rng.gen_range(1..=d.length), rng.gen_range(1..=d.width), rng.gen_range(1..=d.height));
            (ms, next)
        })
        .collect()
}

/// Reference pooling straight from the definition.
fn brute_pool(enc: &StateEncoder, ms: &MultiBinState) -> Vec<f32> {
    let bin = ms.bin_dims();
    let cap = bin.height as f64;
    let mut x = vec![0.0f32; STATE_LEN];
    for t in 0..TILES {
        let (rows, cols) = enc.partition().tile_ranges(t);
        let hs: Vec<usize> = rows
            .flat_map(|gi| cols.clone().map(move |gj| (gi, gj)))
            .map(|(gi, gj)| ms.bins().get(gj / bin.width).map_or(0, |b| b.height(gi, gj % bin.width)))
            .collect();
        if hs.is_empty() {
            continue;
        }
        let max = *hs.iter().max().unwrap() as f64;
        let min = *hs.iter().min().unwrap() as f64;
        x[t] = (hs.iter().sum::<usize>() as f64 / hs.len() as f64 / cap) as f32;
        x[TILES + t] = (max / cap) as f32;
        x[2 * TILES + t] = ((max - min) / cap) as f32;
    }
    x
}

#[test]
fn candidates_are_sound() {
    for (ms, next) in states(11, 300) {
        let cands = corner_candidates(&ms, next);
        assert!(cands.len() <= MAX_CANDIDATES);
        let keys: Vec<_> = cands.iter().map(|c| (c.placement.bin, c.placement.orientation, c.placement.anchor)).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]), "sorted without duplicates");
        for c in &cands {
            assert_eq!(c.dims, next.oriented(c.placement.orientation));
            let bin = ms.bin(c.placement.bin);
            assert_eq!(bin.resting_height(c.dims, c.placement.anchor), Some(c.z));
            assert!(touches_corner_structure(bin, c));
            let projected = c.projected_state(&ms, next).unwrap();
            assert_eq!(projected.total_volume(), ms.total_volume() + next.volume());
        }
    }
}

#[test]
fn empty_candidate_set_opens_a_bin() {
    let bin = BinDims::new(4, 4, 4);
    let mut ms = MultiBinState::new(bin, 2).unwrap();
    ms.open_next_bin().unwrap();
    ms.place(BoxDims::new(4, 4, 4), packman::Placement { bin: 0, anchor: (0, 0), orientation: packman::Orientation::AsIs })
        .unwrap();
    let (cands, opened) = candidates_or_new_bin(&ms, BoxDims::new(2, 2, 2)).unwrap();
    assert!(opened);
    assert!(cands.iter().all(|c| c.placement.bin == 1));
    assert!(!cands.is_empty());
}

#[test]
fn pooling_matches_definition_and_projection_matches_placement() {
    for (ms, next) in states(12, 150) {
        let enc = StateEncoder::new(ms.bin_dims(), ms.capacity());
        let base = enc.pool(&ms);
        let brute = brute_pool(&enc, &ms);
        for (a, b) in base.x.iter().zip(&brute) {
            assert!((a - b).abs() < 1e-6);
        }
        for t in 0..TILES {
            let (mean, max, range) = (base.x[t], base.x[TILES + t], base.x[2 * TILES + t]);
            assert!((0.0..=1.0).contains(&mean) && (0.0..=1.0).contains(&max) && (0.0..=1.0).contains(&range));
            assert!(mean <= max + 1e-6);
            assert!(mean + 1e-6 >= max - range);
        }
        for c in corner_candidates(&ms, next).iter().take(20) {
            let (x, touched) = enc.project(&ms, &base, c);
            let full = enc.encode_state(&c.projected_state(&ms, next).unwrap());
            assert_eq!(x, full);
            for t in 0..STATE_LEN {
                if x[t] != base.x[t] {
                    assert!(touched.contains(&(t % TILES)));
                }
            }
            let input = enc.encode_candidate(&ms, &base, c);
            assert!(input.check_shape().is_ok());
            assert_eq!(input.z().iter().filter(|&&v| v == 1.0).count(), 1);
        }
    }
}

#[test]
fn border_channel_shape_and_walls() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let ms = random_multi(&mut rng, 1, 1);
        let s = ms.bin(0);
        let d = s.dims();
        let dims = BoxDims::new(rng.gen_range(1..=d.length), rng.gen_range(1..=d.width), 1);
        let anchor = (rng.gen_range(0..=d.length - dims.l), rng.gen_range(0..=d.width - dims.b));
        let walk = border_walk(d, dims, anchor);
        assert_eq!(walk.len(), 2 * (dims.l + dims.b));
        let y = encode_border(s, dims, anchor);
        assert_eq!(y.len(), BORDER_LEN);
        assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
        for (k, cell) in walk.iter().enumerate() {
            let expected = cell.map_or(1.0, |(r, c)| s.height(r, c) as f32 / d.height as f32);
            assert_eq!(y[k], expected);
        }
        assert!(y[walk.len()..].iter().all(|&v| v == 0.0));
    }
}

#[test]
fn long_borders_are_subsampled() {
    let bin = BinDims::new(45, 80, 45);
    let ms = {
        let mut m = MultiBinState::new(bin, 1).unwrap();
        m.open_next_bin().unwrap();
        m
    };
    let dims = BoxDims::new(40, 70, 1);
    let walk = border_walk(bin, dims, (2, 3));
    assert_eq!(walk.len(), 220);
    let y = encode_border(ms.bin(0), dims, (2, 3));
    // every second cell: 110 samples, all on the floor
    assert!(y[..110].iter().all(|&v| v == 0.0));
    let dims = BoxDims::new(45, 80, 1);
    let y = encode_border(ms.bin(0), dims, (0, 0));
    assert!(y[..125].iter().all(|&v| v == 1.0));
}

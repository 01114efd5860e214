use gmx_core::cycles::census;
use gmx_core::decode::{flood_decode, map_oracle, ChannelObservation};
use gmx_core::extract::{alg1_reduce_tanner, alg3_extract_gtg, alg4_extract_gm};
use gmx_core::fixtures;
use gmx_core::model::{build_gtg, tanner_graph, DEFAULT_DIM_CAP};
use gmx_core::sim::{ber_sim, StopRule};

#[test]
fn extracted_models_realize_the_code() {
    let h = fixtures::golay23_h();
    let tg = tanner_graph(&h, None).unwrap();
    let code = tg.realized_code(DEFAULT_DIM_CAP).unwrap();
    let (h1, _) = alg1_reduce_tanner(&h).unwrap();
    let tg1 = tanner_graph(&h1, None).unwrap();
    assert_eq!(tg1.realized_code(DEFAULT_DIM_CAP).unwrap(), code);
    let (hx, ext, _) = alg3_extract_gtg(&h1).unwrap();
    let gtg = build_gtg(&ext, &hx).unwrap();
    assert_eq!(gtg.realized_code(DEFAULT_DIM_CAP).unwrap(), code);
    assert_eq!(census(&gtg, 8).unwrap().count(4).unwrap_or(0), 0);
    let (gm, _) = alg4_extract_gm(&tg1, 2).unwrap();
    assert!(gm.verify_qm(2));
    assert_eq!(gm.realized_code(DEFAULT_DIM_CAP).unwrap(), code);
}

#[test]
fn cyclic_decoders_agree_in_sign_with_map_at_high_snr() {
    let h = fixtures::ext_hamming8_h();
    let tb = fixtures::tail_biting_hamming();
    let code = tanner_graph(&h, None).unwrap().realized_code(DEFAULT_DIM_CAP).unwrap();
    let obs = ChannelObservation::new(vec![4.0, 3.5, -0.5, 5.0, 4.2, 3.9, 4.4, 3.1]);
    let map = map_oracle(&code, &obs).unwrap();
    let d = flood_decode(&tb, &obs, 50).unwrap();
    let hard: Vec<u8> = map.iter().map(|&l| u8::from(l < 0.0)).collect();
    assert_eq!(d.hard, hard);
}

#[test]
fn ber_falls_with_snr() {
    let tg = tanner_graph(&fixtures::bch31_21_h(), None).unwrap();
    let stop = StopRule { min_bit_errors: 100, max_bits: 200_000 };
    let r = ber_sim(&tg, &[2.0, 4.0], stop, 20, 3).unwrap();
    assert!(r[0].ber() > r[1].ber());
    assert!(r.iter().all(|x| x.bit_errors <= x.bits));
}

mod common;

use common::*;
use ocd_core::fxp::{
    ceil_log2, inner_product_acc, inner_product_shifted, quantize, recip_lut, CFixed, Fixed, ReciprocalLut,
};
use ocd_core::*;

const Q: FixedPointFormat = FixedPointFormat::Q16_11;

fn quantized(v: &[Complex64]) -> Vec<CFixed> {
    v.iter().map(|&x| CFixed::quantize(x, Q).unwrap()).collect()
}

fn acc_value(raw: i64) -> Fixed {
    Fixed { raw, frac_bits: Q.accumulator().frac_bits() }
}

#[test]
fn shifts_cancel_in_the_scaled_inner_product() {
    for seed in 0..200u64 {
        let b = [16, 32, 64, 100, 128][seed as usize % 5];
        let inst = instance(b, 2, Scheme::Qam16, 5.0, 40_000 + seed);
        let h = quantized(inst.h.col(0));
        let r = quantized(&inst.y);
        let s = ceil_log2(b);

        let norm_plain = inner_product_acc(&h, &h, Q).unwrap().re;
        let norm_shifted = inner_product_shifted(&h, &h, Q).unwrap().re;
        let ip_plain = inner_product_acc(&h, &r, Q).unwrap();
        let ip_shifted = inner_product_shifted(&h, &r, Q).unwrap();

        let d_plain = recip_lut(acc_value(norm_plain)).unwrap();
        let d_shifted = recip_lut(acc_value(norm_shifted)).unwrap();
        // the reciprocal of the shifted norm carries the left shift by s
        assert!((d_shifted.to_f64() / d_plain.to_f64() / f64::from(1u32 << s) - 1.0).abs() < 2e-3);

        for (plain, shifted) in [(ip_plain.re, ip_shifted.re), (ip_plain.im, ip_shifted.im)] {
            let a = d_plain.widening_mul(acc_value(plain)).unwrap().requantize(Q).unwrap();
            let b = d_shifted.widening_mul(acc_value(shifted)).unwrap().requantize(Q).unwrap();
            assert!((a - b).abs() <= 1, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn shifted_inner_product_tracks_float() {
    for seed in 0..50u64 {
        let inst = instance(64, 2, Scheme::Qpsk, 0.0, 50_000 + seed);
        let (a, b) = (inst.h.col(0), inst.h.col(1));
        let got = inner_product_shifted(&quantized(a), &quantized(b), Q).unwrap();
        let want: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() / 64.0;
        let acc = Q.accumulator();
        assert!((acc.to_f64(got.re) - want.re).abs() < 2f64.powi(-9));
        assert!((acc.to_f64(got.im) - want.im).abs() < 2f64.powi(-9));
    }
}

#[test]
fn table_matches_golden_file() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/recip_lut.bin");
    let golden = ReciprocalLut::load(path).unwrap();
    assert_eq!(golden, ReciprocalLut::new());

    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("lut.bin");
    ReciprocalLut::new().dump(&copy).unwrap();
    assert_eq!(std::fs::read(&copy).unwrap(), std::fs::read(path).unwrap());
}

#[test]
fn reciprocal_of_one() {
    let one = quantize(1.0, Q).unwrap();
    let r = recip_lut(one).unwrap().to_f64();
    assert!((r - 1.0).abs() <= 2f64.powi(-11));
}

#[test]
fn fixed_ocd_tracks_float_ocd() {
    let con = constellation(Scheme::Qam64);
    for mode in [DetectorMode::Box, DetectorMode::Mmse] {
        let mut err = 0.0;
        let mut n = 0;
        for seed in 0..100u64 {
            let inst = instance(128, 8, Scheme::Qam64, 10.0, 60_000 + seed);
            let fx = ocd_fixed(&inst.h, &inst.y, inst.n0, mode, 3, &con, Q).unwrap();
            let prep = ocd_preprocess(&inst.h, mode, inst.n0).unwrap();
            let (fl, _) = ocd_equalize(&inst.h, &inst.y, &prep, mode, 3, &con).unwrap();
            err += fx.z.iter().zip(&fl).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
            n += 8;
            assert_eq!(fx.mult_count, multiplication_count_ocd(128, 8, 3));
        }
        assert!(err / (n as f64) < 1e-3, "{mode}: {}", err / n as f64);
    }
}

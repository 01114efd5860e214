//! Built-in codes and hand-specified models.
//!
//! Cyclic codes use the parity-check matrix formed from the shifts of the
//! reciprocal check polynomial; extended codes append a zero column and an
//! all-ones row to it.

use crate::error::{Error, Result};
use crate::gf2::poly::{bch_generator, cyclic_parity_check_matrix, extend_parity_check, Poly};
use crate::gf2::{BinaryMatrix, LinearCode};
use crate::model::{GraphicalModel, ModelBuilder};

/// A pinned parity-check matrix with notes on how it was built.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub h: BinaryMatrix,
    pub notes: &'static str,
}

impl Fixture {
    pub fn code(&self) -> LinearCode {
        LinearCode::from_parity_check(crate::gf2::code::default_labels(self.h.cols()), &self.h)
            .expect("fixture labels")
    }
}

/// Golay generator polynomial 1 + x + x^5 + x^6 + x^7 + x^9 + x^11.
pub const GOLAY_GENERATOR_OCTAL: &str = "5343";

fn cyclic(n: usize, g: &Poly) -> BinaryMatrix {
    cyclic_parity_check_matrix(n, g).expect("generator divides x^n - 1")
}

pub fn hamming7_h() -> BinaryMatrix {
    cyclic(7, &Poly::from_octal("13").unwrap())
}

/// Self-dual parity-check matrix of the [8,4,4] extended Hamming code; it
/// is also the generator obtained from the tail-biting trellis behavior.
pub fn ext_hamming8_h() -> BinaryMatrix {
    BinaryMatrix::from_strs(&["11110000", "00110110", "00001111", "01100011"]).unwrap()
}

pub fn golay23_h() -> BinaryMatrix {
    cyclic(23, &Poly::from_octal(GOLAY_GENERATOR_OCTAL).unwrap())
}

pub fn bch31_21_h() -> BinaryMatrix {
    cyclic(31, &bch_generator(5, 2))
}

pub fn bch63_51_h() -> BinaryMatrix {
    cyclic(63, &bch_generator(6, 2))
}

pub fn bch63_30_h() -> BinaryMatrix {
    cyclic(63, &bch_generator(6, 6))
}

pub fn ebch32_21_h() -> BinaryMatrix {
    extend_parity_check(&bch31_21_h())
}

pub fn ebch64_51_h() -> BinaryMatrix {
    extend_parity_check(&bch63_51_h())
}

pub const FIXTURE_NAMES: &[&str] = &[
    "hamming7",
    "ehamming8",
    "golay23",
    "golay24",
    "bch31_21",
    "bch63_30",
    "bch63_51",
    "ebch32_21",
    "ebch64_30",
    "ebch64_51",
];

pub fn fixture(name: &str) -> Result<Fixture> {
    let (h, notes) = match name {
        "hamming7" => (hamming7_h(), "[7,4,3] cyclic Hamming, g(x) = 1 + x + x^3"),
        "ehamming8" => (ext_hamming8_h(), "[8,4,4] extended Hamming, self-dual 4x8 matrix"),
        "golay23" => (golay23_h(), "[23,12,7] Golay, g(x) octal 5343"),
        "golay24" => (extend_parity_check(&golay23_h()), "[24,12,8] extended Golay from the cyclic H"),
        "bch31_21" => (bch31_21_h(), "[31,21,5] BCH, g(x) octal 3551, GF(32) from x^5 + x^2 + 1"),
        "bch63_30" => (bch63_30_h(), "[63,30,13] BCH, g(x) octal 157464165547, GF(64) from x^6 + x + 1"),
        "bch63_51" => (bch63_51_h(), "[63,51,5] BCH, g(x) octal 12471, GF(64) from x^6 + x + 1"),
        "ebch32_21" => (ebch32_21_h(), "[32,21,6] extended BCH from the cyclic [31,21] H"),
        "ebch64_30" => (extend_parity_check(&bch63_30_h()), "[64,30,14] extended BCH from the cyclic [63,30] H"),
        "ebch64_51" => (ebch64_51_h(), "[64,51,6] extended BCH from the cyclic [63,51] H"),
        _ => return Err(Error::UnknownFixture(name.to_string())),
    };
    let name = FIXTURE_NAMES.iter().find(|n| **n == name).copied().expect("listed");
    Ok(Fixture { name, h, notes })
}

fn visibles8() -> Vec<String> {
    (1..=8).map(|i| format!("V{i}")).collect()
}

/// Single-cycle tail-biting trellis for the [8,4,4] extended Hamming code:
/// eight interface constraints C1..C8 on the cycle S1..S8.
pub fn tail_biting_hamming() -> GraphicalModel {
    ModelBuilder::new()
        .visibles(&visibles8())
        .hidden("S1", 1)
        .hidden("S2", 2)
        .hidden("S3", 2)
        .hidden("S4", 2)
        .hidden("S5", 1)
        .hidden("S6", 2)
        .hidden("S7", 2)
        .hidden("S8", 2)
        .constraint(1, &["h:S1", "v:V1", "h:S2"], &["1010", "0101"])
        .constraint(2, &["h:S2", "v:V2", "h:S3"], &["10110", "01101"])
        .constraint(3, &["h:S3", "v:V3", "h:S4"], &["10001", "01011", "00101"])
        .constraint(4, &["h:S4", "v:V4", "h:S5"], &["1010", "0111"])
        .constraint(5, &["h:S5", "v:V5", "h:S6"], &["1010", "0101"])
        .constraint(6, &["h:S6", "v:V6", "h:S7"], &["10110", "01101"])
        .constraint(7, &["h:S7", "v:V7", "h:S8"], &["10001", "01011", "00101"])
        .constraint(8, &["h:S8", "v:V8", "h:S1"], &["1010", "0111"])
        .build()
        .expect("tail-biting model is valid")
}

/// Cycle-free binary model for the dimension-5 code obtained by deleting
/// the internal repetition constraint C9 from the tail-biting trellis.
/// Pairs (V1,V4), (V2,V3), (V8,V7), (V6,V5) feed the parity checks C14,
/// C17, C20, C23, whose outputs meet at the repetition constraint C24.
pub fn cycle_free_hamming_minus9() -> GraphicalModel {
    let mut b = ModelBuilder::new().visibles(&visibles8());
    for s in 12..=23 {
        b = b.hidden(&format!("S{s}"), 1);
    }
    let leaves = [
        (12, "V1"),
        (13, "V4"),
        (15, "V2"),
        (16, "V3"),
        (18, "V8"),
        (19, "V7"),
        (21, "V6"),
        (22, "V5"),
    ];
    for (id, v) in leaves {
        let vp = format!("v:{v}");
        let sp = format!("h:S{id}");
        b = b.constraint(id, &[&vp, &sp], &["11"]);
    }
    for spc in [14, 17, 20, 23] {
        let p: Vec<String> = (spc - 2..=spc).map(|s| format!("h:S{s}")).collect();
        let p: Vec<&str> = p.iter().map(String::as_str).collect();
        b = b.constraint(spc, &p, &["101", "011"]);
    }
    b.constraint(24, &["h:S14", "h:S17", "h:S20", "h:S23"], &["1111"])
        .build()
        .expect("cycle-free model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DEFAULT_DIM_CAP;

    #[test]
    fn fixture_parameters() {
        let expect = [
            ("hamming7", 7, 4),
            ("ehamming8", 8, 4),
            ("golay23", 23, 12),
            ("golay24", 24, 12),
            ("bch31_21", 31, 21),
            ("bch63_30", 63, 30),
            ("bch63_51", 63, 51),
            ("ebch32_21", 32, 21),
            ("ebch64_30", 64, 30),
            ("ebch64_51", 64, 51),
        ];
        for (name, n, k) in expect {
            let f = fixture(name).unwrap();
            assert_eq!(f.h.cols(), n, "{name}");
            assert_eq!(n - f.h.rank(), k, "{name}");
        }
        assert_eq!(bch31_21_h().rank(), 10);
        assert!(matches!(fixture("nope"), Err(Error::UnknownFixture(_))));
    }

    #[test]
    fn golay_minimum_distance() {
        assert_eq!(fixture("golay23").unwrap().code().min_distance().unwrap(), 7);
    }

    #[test]
    fn ext_hamming_is_self_dual() {
        let c = fixture("ehamming8").unwrap().code();
        assert_eq!(c.dual(), c);
        assert_eq!(c.min_distance().unwrap(), 4);
    }

    #[test]
    fn golden_models() {
        let tb = tail_biting_hamming();
        let t = tb.topology();
        assert_eq!((t.vertices, t.edges, t.connected, t.cycle_free), (8, 8, true, false));
        assert!(tb.verify_qm(2) && !tb.verify_qm(1));
        let c = tb.realized_code(DEFAULT_DIM_CAP).unwrap();
        let want = LinearCode::from_generator(visibles8(), &ext_hamming8_h()).unwrap();
        assert_eq!(c, want);

        let cf = cycle_free_hamming_minus9();
        let t = cf.topology();
        assert_eq!((t.vertices, t.edges, t.cycle_free), (13, 12, true));
        assert!(cf.verify_qm(1));
        let g = BinaryMatrix::from_strs(&["11110000", "00110110", "00001111", "01100011", "10100110"]).unwrap();
        let want = LinearCode::from_generator(visibles8(), &g).unwrap();
        assert_eq!(cf.realized_code(DEFAULT_DIM_CAP).unwrap(), want);
    }
}

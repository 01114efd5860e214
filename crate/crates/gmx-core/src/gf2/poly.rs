//! Polynomials over GF(2) and cyclic-code constructions.

use super::matrix::BinaryMatrix;
use crate::error::{Error, Result};

/// Coefficients, lowest degree first, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<u8>);

impl Poly {
    pub fn new(mut c: Vec<u8>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly(c)
    }

    /// From an octal string such as `"3551"` (bit i = coefficient of x^i).
    pub fn from_octal(s: &str) -> Result<Self> {
        let mut c = Vec::new();
        for ch in s.chars().rev() {
            let d = ch
                .to_digit(8)
                .ok_or_else(|| Error::Parse(format!("bad octal digit {ch:?}")))?;
            for b in 0..3 {
                c.push(((d >> b) & 1) as u8);
            }
        }
        Ok(Poly::new(c))
    }

    pub fn to_octal(&self) -> String {
        let mut digits = Vec::new();
        for chunk in self.0.chunks(3) {
            let d = chunk.iter().enumerate().fold(0u8, |a, (i, &b)| a | (b << i));
            digits.push(char::from(b'0' + d));
        }
        while digits.len() > 1 && digits.last() == Some(&'0') {
            digits.pop();
        }
        digits.iter().rev().collect()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut r = vec![0u8; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 1 {
                for (j, &b) in o.0.iter().enumerate() {
                    r[i + j] ^= b;
                }
            }
        }
        Poly::new(r)
    }

    /// Quotient and remainder.
    pub fn divmod(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Poly(Vec::new()), self.clone());
        }
        let mut q = vec![0u8; rem.len() - dd];
        for i in (0..q.len()).rev() {
            if rem[i + dd] == 1 {
                q[i] = 1;
                for (j, &b) in d.0.iter().enumerate() {
                    rem[i + j] ^= b;
                }
            }
        }
        (Poly::new(q), Poly::new(rem))
    }

    /// `x^n - 1`.
    pub fn x_n_minus_1(n: usize) -> Self {
        let mut c = vec![0u8; n + 1];
        c[0] = 1;
        c[n] = 1;
        Poly(c)
    }
}

/// Arithmetic in GF(2^m) given a primitive polynomial (bit mask incl. x^m).
struct Field {
    m: usize,
    exp: Vec<usize>,
    log: Vec<usize>,
}

impl Field {
    fn new(m: usize, prim: usize) -> Self {
        let q = 1usize << m;
        let mut exp = vec![0usize; 2 * q];
        let mut log = vec![0usize; q];
        let mut x = 1usize;
        for i in 0..q - 1 {
            exp[i] = x;
            log[x] = i;
            x <<= 1;
            if x & q != 0 {
                x ^= prim;
            }
        }
        for i in q - 1..2 * q {
            exp[i] = exp[i - (q - 1)];
        }
        Field { m, exp, log }
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a] + self.log[b]]
        }
    }

    /// Minimal polynomial of alpha^i.
    fn minimal_poly(&self, i: usize) -> Poly {
        let n = (1usize << self.m) - 1;
        let mut coset = vec![i % n];
        let mut j = (2 * i) % n;
        while j != i % n {
            coset.push(j);
            j = (2 * j) % n;
        }
        // Product of (x - alpha^c) with coefficients in GF(2^m).
        let mut c = vec![1usize];
        for &e in &coset {
            let root = self.exp[e];
            let mut next = vec![0usize; c.len() + 1];
            for (d, &a) in c.iter().enumerate() {
                next[d + 1] ^= a;
                next[d] ^= self.mul(a, root);
            }
            c = next;
        }
        Poly::new(c.into_iter().map(|v| {
            assert!(v <= 1, "minimal polynomial must have binary coefficients");
            v as u8
        }).collect())
    }
}

/// Narrow-sense primitive BCH generator polynomial of length 2^m - 1 and
/// designed distance `2t + 1`.
pub fn bch_generator(m: usize, t: usize) -> Poly {
    let prim = match m {
        3 => 0b1011,
        4 => 0b10011,
        5 => 0b100101,
        6 => 0b1000011,
        7 => 0b10001001,
        8 => 0b100011101,
        _ => panic!("no primitive polynomial tabulated for m = {m}"),
    };
    let f = Field::new(m, prim);
    let n = (1usize << m) - 1;
    let mut g = Poly(vec![1]);
    let mut used: Vec<Poly> = Vec::new();
    for i in (1..=2 * t).step_by(2) {
        let mp = f.minimal_poly(i % n);
        if !used.contains(&mp) {
            g = g.mul(&mp);
            used.push(mp);
        }
    }
    g
}

/// Generator matrix of the cyclic code of length n with generator g(x):
/// rows are the k shifts of g.
pub fn cyclic_generator_matrix(n: usize, g: &Poly) -> Result<BinaryMatrix> {
    let (_, r) = Poly::x_n_minus_1(n).divmod(g);
    if !r.0.is_empty() {
        return Err(Error::Invalid(format!("g(x) does not divide x^{n} - 1")));
    }
    let k = n - g.degree().unwrap_or(0);
    let mut m = BinaryMatrix::zeros(k, n);
    for i in 0..k {
        for (j, &c) in g.0.iter().enumerate() {
            if c == 1 {
                m.set(i, i + j, true);
            }
        }
    }
    Ok(m)
}

/// Cyclic parity-check matrix: the n - k shifts of the reciprocal of
/// `h(x) = (x^n - 1) / g(x)`.
pub fn cyclic_parity_check_matrix(n: usize, g: &Poly) -> Result<BinaryMatrix> {
    let (h, r) = Poly::x_n_minus_1(n).divmod(g);
    if !r.0.is_empty() {
        return Err(Error::Invalid(format!("g(x) does not divide x^{n} - 1")));
    }
    let k = h.degree().unwrap_or(0);
    let hr: Vec<u8> = h.0.iter().rev().copied().collect();
    let mut m = BinaryMatrix::zeros(n - k, n);
    for i in 0..n - k {
        for (j, &c) in hr.iter().enumerate() {
            if c == 1 {
                m.set(i, i + j, true);
            }
        }
    }
    Ok(m)
}

/// Parity-check matrix of the extended code: the cyclic H with a zero column
/// appended, plus an all-ones row.
pub fn extend_parity_check(h: &BinaryMatrix) -> BinaryMatrix {
    let mut e = h.widen(1);
    e.push_bits(&vec![1u8; h.cols() + 1]);
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bch_generators_match_tables() {
        assert_eq!(bch_generator(5, 2).to_octal(), "3551");
        assert_eq!(bch_generator(6, 2).to_octal(), "12471");
        assert_eq!(bch_generator(6, 6).to_octal(), "157464165547");
        assert_eq!(bch_generator(3, 1).to_octal(), "13");
    }

    #[test]
    fn octal_round_trip() {
        let p = Poly::from_octal("5343").unwrap();
        assert_eq!(p.to_octal(), "5343");
        assert_eq!(p.degree(), Some(11));
    }

    #[test]
    fn cyclic_matrices_are_orthogonal() {
        let g = bch_generator(5, 2);
        let gm = cyclic_generator_matrix(31, &g).unwrap();
        let hm = cyclic_parity_check_matrix(31, &g).unwrap();
        assert_eq!((gm.rows(), hm.rows()), (21, 10));
        assert!(gm.mul(&hm.transpose()).unwrap().is_zero());
        assert_eq!(hm.rank(), 10);
    }
}

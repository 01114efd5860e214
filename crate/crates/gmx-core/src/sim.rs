//! AWGN/BPSK Monte Carlo bit error rate simulation.
//!
//! Every frame draws its message and noise from its own ChaCha stream keyed
//! by `(seed, snr index, frame index)`, and frames are tallied in fixed-size
//! batches in frame order, so results do not depend on the worker count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::decode::{FloodDecoder, CLIP};
use crate::error::{Error, Result};
use crate::gf2::LinearCode;
use crate::model::GraphicalModel;

/// Frames decoded between stop-rule checks.
pub const BATCH: u64 = 64;
/// Dimension cap used when computing the code to transmit.
pub const SIM_DIM_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_bits: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub frames: u64,
    pub frame_errors: u64,
    /// Rounds run before the messages stopped changing, per frame.
    pub iterations_used: BTreeMap<usize, u64>,
}

impl BerRecord {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }
}

pub const CSV_HEADER: &str = "snr_db,bits,bit_errors,ber,frames,frame_errors";

pub fn to_csv(records: &[BerRecord]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{},{:e},{},{}\n",
            r.snr_db,
            r.bits,
            r.bit_errors,
            r.ber(),
            r.frames,
            r.frame_errors
        ));
    }
    s
}

/// Noise standard deviation for unit-energy BPSK at `snr_db` (Eb/N0) and
/// code rate `rate`.
pub fn noise_sigma(snr_db: f64, rate: f64) -> f64 {
    let ebn0 = 10f64.powf(snr_db / 10.0);
    (1.0 / (2.0 * rate * ebn0)).sqrt()
}

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Uncoded BPSK bit error probability at `snr_db`.
pub fn uncoded_ber(snr_db: f64) -> f64 {
    q_function((2.0 * 10f64.powf(snr_db / 10.0)).sqrt())
}

fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(((point as u64) << 48) | frame);
    r
}

/// Transmitted bits and channel LLRs of one frame.
fn channel(code: &LinearCode, sigma: f64, rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<f64>) {
    let msg: Vec<u8> = (0..code.k()).map(|_| rng.gen::<bool>() as u8).collect();
    let word = code.encode(&msg);
    let llrs = word
        .iter()
        .map(|&b| {
            let x = if b == 0 { 1.0 } else { -1.0 };
            if sigma == 0.0 {
                x * CLIP
            } else {
                let y = x + sigma * rng.sample::<f64, _>(StandardNormal);
                2.0 * y / (sigma * sigma)
            }
        })
        .collect();
    (word, llrs)
}

/// Uncoded transmission of `bits` bits; returns the error count.
pub fn simulate_uncoded(snr_db: f64, bits: u64, seed: u64) -> u64 {
    let sigma = noise_sigma(snr_db, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..bits)
        .filter(|_| 1.0 + sigma * rng.sample::<f64, _>(StandardNormal) < 0.0)
        .count() as u64
}

/// Options for [`ber_sim`] beyond the required arguments.
#[derive(Clone, Debug, Default)]
pub struct SimOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Code to transmit; defaults to the model's realized code.
    pub code: Option<LinearCode>,
}

pub fn ber_sim(
    gm: &GraphicalModel,
    snrs: &[f64],
    stop: StopRule,
    iterations: usize,
    seed: u64,
) -> Result<Vec<BerRecord>> {
    ber_sim_with(gm, snrs, stop, iterations, seed, &SimOptions::default())
}

pub fn ber_sim_with(
    gm: &GraphicalModel,
    snrs: &[f64],
    stop: StopRule,
    iterations: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<Vec<BerRecord>> {
    let code = match &opts.code {
        Some(c) => c.clone(),
        None => gm.realized_code(SIM_DIM_CAP)?,
    };
    if code.n() != gm.visibles().len() {
        return Err(Error::Shape(format!("code length {} for {} visibles", code.n(), gm.visibles().len())));
    }
    let dec = FloodDecoder::new(gm)?;
    let run = || -> Result<Vec<BerRecord>> {
        snrs.iter()
            .enumerate()
            .map(|(i, &snr)| point(&dec, &code, snr, i, stop, iterations, seed))
            .collect()
    };
    match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn point(
    dec: &FloodDecoder,
    code: &LinearCode,
    snr_db: f64,
    index: usize,
    stop: StopRule,
    iterations: usize,
    seed: u64,
) -> Result<BerRecord> {
    let n = code.n() as u64;
    let sigma = if snr_db.is_infinite() && snr_db > 0.0 {
        0.0
    } else {
        noise_sigma(snr_db, code.k() as f64 / code.n() as f64)
    };
    let mut rec = BerRecord {
        snr_db,
        bits: 0,
        bit_errors: 0,
        frames: 0,
        frame_errors: 0,
        iterations_used: BTreeMap::new(),
    };
    while rec.bit_errors < stop.min_bit_errors && rec.bits < stop.max_bits && n > 0 {
        let first = rec.frames;
        let left = (stop.max_bits - rec.bits).div_ceil(n);
        let count = BATCH.min(left);
        let results: Vec<Result<(u64, usize)>> = (first..first + count)
            .into_par_iter()
            .map(|f| {
                let mut rng = frame_rng(seed, index, f);
                let (word, llrs) = channel(code, sigma, &mut rng);
                let d = dec.decode(&llrs, iterations)?;
                let errs = word.iter().zip(&d.hard).filter(|(a, b)| a != b).count() as u64;
                Ok((errs, d.iterations))
            })
            .collect();
        for r in results {
            let (errs, its) = r?;
            rec.frames += 1;
            rec.bits += n;
            rec.bit_errors += errs;
            rec.frame_errors += u64::from(errs > 0);
            *rec.iterations_used.entry(its).or_default() += 1;
        }
    }
    Ok(rec)
}

/// One-sided two-proportion z statistic for `a.ber() < b.ber()`.
pub fn z_less(a: &BerRecord, b: &BerRecord) -> f64 {
    let (na, nb) = (a.bits as f64, b.bits as f64);
    let p = (a.bit_errors + b.bit_errors) as f64 / (na + nb);
    let se = (p * (1.0 - p) * (1.0 / na + 1.0 / nb)).sqrt();
    if se == 0.0 {
        return 0.0;
    }
    (b.ber() - a.ber()) / se
}

/// Critical value of the one-sided 95% normal test.
pub const Z95: f64 = 1.6448536269514722;

//! Sum-product decoding on graphical models, with an exhaustive MAP oracle.
//!
//! Messages live on hidden variables as log-domain vectors over the whole
//! alphabet (index bit i = component i), normalized so entry 0 is 0 and
//! clipped to `[-CLIP, CLIP]`. Each constraint computes exact extrinsic
//! outputs by enumerating its code, or its dual through the Walsh-Hadamard
//! transform of the incoming messages when the dual is smaller.

use crate::error::{Error, Result};
use crate::gf2::code::unpack;
use crate::gf2::LinearCode;
use crate::model::{hcoord, vcoord, GraphicalModel, Port};

pub const CLIP: f64 = 50.0;
/// Largest `min(k, n - k)` a local code may have.
pub const MAX_LOCAL: usize = 20;
/// Largest code dimension accepted by [`map_oracle`].
pub const MAX_ORACLE_K: usize = 22;

/// Per-visible channel log-likelihood ratios, `ln P(0)/P(1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelObservation {
    pub llrs: Vec<f64>,
    pub snr_db: f64,
    pub seed: u64,
}

impl ChannelObservation {
    pub fn new(llrs: Vec<f64>) -> Self {
        ChannelObservation {
            llrs,
            snr_db: f64::INFINITY,
            seed: 0,
        }
    }
}

fn lse(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

fn normalize(v: &mut [f64]) {
    let z = v[0];
    for x in v.iter_mut() {
        *x = (*x - z).clamp(-CLIP, CLIP);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Primal,
    Dual,
}

/// A local code prepared for exact extrinsic computation over groups of
/// coordinates ("ports").
#[derive(Clone, Debug)]
pub struct LocalSiso {
    sizes: Vec<usize>,
    mode: Mode,
    /// Enumerated words as per-port alphabet indices, `words * ports`.
    words: Vec<u32>,
}

impl LocalSiso {
    /// `groups[p]` lists the code coordinates of port `p`, low bit first.
    pub fn new(code: &LinearCode, groups: &[Vec<usize>]) -> Result<Self> {
        let (n, k) = (code.n(), code.k());
        if k.min(n - k) > MAX_LOCAL {
            return Err(Error::TooLargeLocalCode(format!("[{n},{k}] local code")));
        }
        let (mode, src) = if k <= n - k {
            (Mode::Primal, code.clone())
        } else {
            (Mode::Dual, code.dual())
        };
        let mut words = Vec::with_capacity((1usize << src.k()) * groups.len());
        for w in src.codewords()? {
            let bits = unpack(&w, n);
            for g in groups {
                let mut x = 0u32;
                for (i, &c) in g.iter().enumerate() {
                    x |= (bits[c] as u32) << i;
                }
                words.push(x);
            }
        }
        Ok(LocalSiso {
            sizes: groups.iter().map(|g| 1usize << g.len()).collect(),
            mode,
            words,
        })
    }

    pub fn ports(&self) -> usize {
        self.sizes.len()
    }

    /// Extrinsic log-domain outputs for every port from log-domain inputs.
    pub fn extrinsic(&self, incoming: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut out = match self.mode {
            Mode::Primal => self.primal(incoming),
            Mode::Dual => self.dual(incoming),
        };
        for v in &mut out {
            normalize(v);
        }
        out
    }

    fn primal(&self, incoming: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let np = self.ports();
        let mut out: Vec<Vec<f64>> = self.sizes.iter().map(|&s| vec![f64::NEG_INFINITY; s]).collect();
        for w in self.words.chunks_exact(np.max(1)) {
            let total: f64 = w.iter().enumerate().map(|(p, &x)| incoming[p][x as usize]).sum();
            for (p, &x) in w.iter().enumerate() {
                let x = x as usize;
                out[p][x] = lse(out[p][x], total - incoming[p][x]);
            }
        }
        for v in &mut out {
            for x in v.iter_mut() {
                if *x == f64::NEG_INFINITY {
                    *x = -1e300;
                }
            }
        }
        out
    }

    fn dual(&self, incoming: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let np = self.ports();
        // Spectra of the incoming probability vectors.
        let spectra: Vec<Vec<f64>> = incoming
            .iter()
            .map(|v| {
                let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut p: Vec<f64> = v.iter().map(|x| (x - m).exp()).collect();
                let s: f64 = p.iter().sum();
                p.iter_mut().for_each(|x| *x /= s);
                wht(&mut p);
                p
            })
            .collect();
        let mut acc: Vec<Vec<f64>> = self.sizes.iter().map(|&s| vec![0.0; s]).collect();
        let mut prefix = vec![1.0; np + 1];
        for w in self.words.chunks_exact(np.max(1)) {
            for p in 0..np {
                prefix[p + 1] = prefix[p] * spectra[p][w[p] as usize];
            }
            let mut suffix = 1.0;
            for p in (0..np).rev() {
                acc[p][w[p] as usize] += prefix[p] * suffix;
                suffix *= spectra[p][w[p] as usize];
            }
        }
        acc.into_iter()
            .map(|mut a| {
                wht(&mut a);
                a.into_iter().map(|x| x.max(1e-300).ln()).collect()
            })
            .collect()
    }
}

/// In-place Walsh-Hadamard transform, `a[w] <- sum_x a[x] (-1)^{w.x}`.
fn wht(a: &mut [f64]) {
    let mut h = 1;
    while h < a.len() {
        for i in (0..a.len()).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

fn bit_groups(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| vec![i]).collect()
}

fn llr_vec(l: f64) -> Vec<f64> {
    vec![0.0, (-l).clamp(-CLIP, CLIP)]
}

/// Exact extrinsic LLRs of every coordinate of `code` given prior LLRs.
pub fn local_siso(code: &LinearCode, llrs: &[f64]) -> Result<Vec<f64>> {
    siso_with(LocalSiso::new(code, &bit_groups(code.n()))?, llrs)
}

/// [`local_siso`] forced to enumerate the code itself.
pub fn local_siso_primal(code: &LinearCode, llrs: &[f64]) -> Result<Vec<f64>> {
    siso_with(forced(code, Mode::Primal)?, llrs)
}

/// [`local_siso`] forced to enumerate the dual code.
pub fn local_siso_dual(code: &LinearCode, llrs: &[f64]) -> Result<Vec<f64>> {
    siso_with(forced(code, Mode::Dual)?, llrs)
}

fn forced(code: &LinearCode, mode: Mode) -> Result<LocalSiso> {
    let src = match mode {
        Mode::Primal => code.clone(),
        Mode::Dual => code.dual(),
    };
    let mut words = Vec::new();
    for w in src.codewords()? {
        words.extend(unpack(&w, code.n()).into_iter().map(u32::from));
    }
    Ok(LocalSiso {
        sizes: vec![2; code.n()],
        mode,
        words,
    })
}

fn siso_with(s: LocalSiso, llrs: &[f64]) -> Result<Vec<f64>> {
    if llrs.len() != s.ports() {
        return Err(Error::Shape(format!("{} priors for {} coordinates", llrs.len(), s.ports())));
    }
    let inc: Vec<Vec<f64>> = llrs.iter().map(|&l| llr_vec(l)).collect();
    Ok(s.extrinsic(&inc).into_iter().map(|v| -v[1]).collect())
}

/// Exact bitwise posterior LLRs by summing over all codewords.
pub fn map_oracle(code: &LinearCode, obs: &ChannelObservation) -> Result<Vec<f64>> {
    let n = code.n();
    if code.k() > MAX_ORACLE_K {
        return Err(Error::TooLarge(format!("oracle needs k <= {MAX_ORACLE_K}, got {}", code.k())));
    }
    if obs.llrs.len() != n {
        return Err(Error::Shape(format!("{} llrs for length {n}", obs.llrs.len())));
    }
    let mut zero = vec![f64::NEG_INFINITY; n];
    let mut one = vec![f64::NEG_INFINITY; n];
    for w in code.codewords()? {
        let bits = unpack(&w, n);
        let s: f64 = bits.iter().zip(&obs.llrs).map(|(&b, &l)| if b == 1 { -l } else { 0.0 }).sum();
        for i in 0..n {
            if bits[i] == 1 {
                one[i] = lse(one[i], s);
            } else {
                zero[i] = lse(zero[i], s);
            }
        }
    }
    Ok(zero.iter().zip(&one).map(|(a, b)| a - b).collect())
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Visible(usize),
    /// Hidden edge and the side (index into `ends`) this constraint is on.
    Hidden(usize, usize),
}

#[derive(Clone, Debug)]
struct Node {
    slots: Vec<Slot>,
    siso: LocalSiso,
}

/// Result of decoding one frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub hard: Vec<u8>,
    /// Channel plus extrinsic LLR of each visible variable.
    pub llrs: Vec<f64>,
    pub iterations: usize,
}

/// Flooding-schedule decoder prepared for one model.
#[derive(Clone, Debug)]
pub struct FloodDecoder {
    nodes: Vec<Node>,
    sizes: Vec<usize>,
    owner: Vec<(usize, usize)>,
    n_visible: usize,
}

impl FloodDecoder {
    pub fn new(gm: &GraphicalModel) -> Result<Self> {
        let vis: std::collections::HashMap<&str, usize> =
            gm.visibles().iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let edge: std::collections::HashMap<&str, usize> =
            gm.hiddens().iter().enumerate().map(|(i, h)| (h.label.as_str(), i)).collect();
        let mut nodes = Vec::new();
        let mut owner = vec![(usize::MAX, 0); gm.visibles().len()];
        for c in gm.constraints() {
            if c.ports.is_empty() {
                continue;
            }
            let mut slots = Vec::new();
            let mut groups = Vec::new();
            for p in &c.ports {
                match p {
                    Port::Visible(v) => {
                        owner[vis[v.as_str()]] = (nodes.len(), slots.len());
                        slots.push(Slot::Visible(vis[v.as_str()]));
                        groups.push(vec![c.code.index_of(&vcoord(v)).expect("bound")]);
                    }
                    Port::Hidden(l) => {
                        let e = edge[l.as_str()];
                        let h = &gm.hiddens()[e];
                        let side = if h.ends[0] == c.id { 0 } else { 1 };
                        slots.push(Slot::Hidden(e, side));
                        groups.push((0..h.size).map(|i| c.code.index_of(&hcoord(l, i)).expect("bound")).collect());
                    }
                }
            }
            nodes.push(Node {
                siso: LocalSiso::new(&c.code, &groups)?,
                slots,
            });
        }
        Ok(FloodDecoder {
            nodes,
            sizes: gm.hiddens().iter().map(|h| 1usize << h.size).collect(),
            owner,
            n_visible: gm.visibles().len(),
        })
    }

    /// Run `iterations` flooding rounds, then decide each visible variable
    /// from its channel LLR and the extrinsic output of its constraint. A
    /// round that changes no message ends the loop early; later rounds
    /// would repeat it exactly.
    pub fn decode(&self, llrs: &[f64], iterations: usize) -> Result<Decoded> {
        if llrs.len() != self.n_visible {
            return Err(Error::Shape(format!("{} llrs for {} visible variables", llrs.len(), self.n_visible)));
        }
        // msg[e][s]: message toward the constraint on side s of edge e.
        let mut msg: Vec<[Vec<f64>; 2]> = self.sizes.iter().map(|&s| [vec![0.0; s], vec![0.0; s]]).collect();
        let mut used = 0;
        for _ in 0..iterations {
            let mut next = msg.clone();
            for node in &self.nodes {
                let out = node.siso.extrinsic(&self.incoming(node, &msg, llrs));
                for (slot, o) in node.slots.iter().zip(out) {
                    if let Slot::Hidden(e, side) = *slot {
                        next[e][1 - side] = o;
                    }
                }
            }
            used += 1;
            if next == msg {
                break;
            }
            msg = next;
        }
        let mut post = llrs.to_vec();
        for (v, &(node, slot)) in self.owner.iter().enumerate() {
            if node == usize::MAX {
                continue;
            }
            let nd = &self.nodes[node];
            let out = nd.siso.extrinsic(&self.incoming(nd, &msg, llrs));
            post[v] += -out[slot][1];
        }
        Ok(Decoded {
            hard: post.iter().map(|&l| u8::from(l < 0.0)).collect(),
            llrs: post,
            iterations: used,
        })
    }

    fn incoming(&self, node: &Node, msg: &[[Vec<f64>; 2]], llrs: &[f64]) -> Vec<Vec<f64>> {
        node.slots
            .iter()
            .map(|s| match *s {
                Slot::Visible(v) => llr_vec(llrs[v]),
                Slot::Hidden(e, side) => msg[e][side].clone(),
            })
            .collect()
    }
}

/// Decode one observation with a fresh [`FloodDecoder`].
pub fn flood_decode(gm: &GraphicalModel, obs: &ChannelObservation, iterations: usize) -> Result<Decoded> {
    FloodDecoder::new(gm)?.decode(&obs.llrs, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gf2::code::default_labels;
    use crate::random::{random_matrix, random_model, ModelShape};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        // A coordinate fixed by the code has an infinite exact LLR; the
        // decoder reports it clipped.
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| {
                if y.is_infinite() {
                    x.signum() == y.signum() && x.abs() >= 20.0
                } else {
                    (x - y).abs() <= tol
                }
            })
    }

    #[test]
    fn repetition_and_parity_rules() {
        let rep = LinearCode::repetition(default_labels(2)).unwrap();
        assert!(close(&local_siso(&rep, &[0.7, -1.3]).unwrap(), &[-1.3, 0.7], 1e-12));
        let spc = LinearCode::single_parity_check(default_labels(3)).unwrap();
        let (a, b) = (0.9f64, -2.1f64);
        let want = 2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh();
        let got = local_siso(&spc, &[a, b, 0.4]).unwrap();
        assert!((got[2] - want).abs() < 1e-12);
        let orc = map_oracle(&spc, &ChannelObservation::new(vec![a, b, 0.0])).unwrap();
        assert!((orc[2] - want).abs() < 1e-12);
        let rep3 = LinearCode::repetition(default_labels(3)).unwrap();
        let m = map_oracle(&rep3, &ChannelObservation::new(vec![1.0; 3])).unwrap();
        assert!(close(&m, &[3.0; 3], 1e-12));
    }

    #[test]
    fn primal_equals_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = random_matrix(&mut rng, 4, 8);
            let code = LinearCode::from_generator(default_labels(8), &g).unwrap();
            let llrs: Vec<f64> = (0..8).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let p = local_siso_primal(&code, &llrs).unwrap();
            let d = local_siso_dual(&code, &llrs).unwrap();
            assert!(close(&p, &d, 1e-9), "{p:?} {d:?}");
        }
    }

    #[test]
    fn noiseless_codeword_decodes_fast() {
        let tb = fixtures::tail_biting_hamming();
        let code = tb.realized_code(24).unwrap();
        let word = unpack(&code.codewords().unwrap()[5], 8);
        let llrs: Vec<f64> = word.iter().map(|&b| if b == 1 { -20.0 } else { 20.0 }).collect();
        let d = flood_decode(&tb, &ChannelObservation::new(llrs.clone()), 2).unwrap();
        assert_eq!(d.hard, word);
        let noisy: Vec<f64> = llrs.iter().enumerate().map(|(i, l)| if i == 3 { -l * 0.1 } else { l * 0.4 }).collect();
        let a = flood_decode(&tb, &ChannelObservation::new(noisy.clone()), 30).unwrap();
        let b = flood_decode(&tb, &ChannelObservation::new(noisy), 31).unwrap();
        assert_eq!(a.hard, b.hard);
    }

    #[test]
    fn tree_model_is_exact() {
        let cf = fixtures::cycle_free_hamming_minus9();
        let j: Vec<String> = ["V1", "V2", "V5", "V8"].iter().map(|s| s.to_string()).collect();
        let gm = crate::transform::absorb_spc(&cf, &j).unwrap();
        let code = gm.realized_code(24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let llrs: Vec<f64> = (0..8).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let obs = ChannelObservation::new(llrs);
            let d = flood_decode(&gm, &obs, gm.constraints().len()).unwrap();
            assert!(close(&d.llrs, &map_oracle(&code, &obs).unwrap(), 1e-9));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn cycle_free_models_match_oracle(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = ModelShape { max_extra_edges: 0, max_visibles: 10, ..ModelShape::default() };
            let gm = random_model(&mut rng, &shape);
            let code = gm.realized_code(24).unwrap();
            let llrs: Vec<f64> = (0..gm.visibles().len()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let obs = ChannelObservation::new(llrs);
            let d = flood_decode(&gm, &obs, gm.constraints().len()).unwrap();
            let o = map_oracle(&code, &obs).unwrap();
            prop_assert!(close(&d.llrs, &o, 1e-9), "{:?} {:?}", d.llrs, o);
        }
    }
}

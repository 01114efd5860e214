//! Random codes and models for property tests and acceptance runs.

use rand::Rng;

use crate::error::Result;
use crate::gf2::{BinaryMatrix, LinearCode};
use crate::model::{ConstraintId, GraphicalModel, HiddenVar, ModelBuilder, Port};
use crate::transform::{is_trim, trim_all};

/// Size limits for [`random_model`].
#[derive(Clone, Debug)]
pub struct ModelShape {
    pub max_visibles: usize,
    pub max_constraints: usize,
    /// Edges beyond a spanning tree; zero gives cycle-free models.
    pub max_extra_edges: usize,
    pub max_hidden_size: usize,
    pub max_behavior_dim: usize,
    /// Require every hidden variable to be trim and determined by the
    /// visible variables (behavior dimension equals code dimension).
    pub proper: bool,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            max_visibles: 8,
            max_constraints: 5,
            max_extra_edges: 1,
            max_hidden_size: 2,
            max_behavior_dim: 18,
            proper: true,
        }
    }
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> BinaryMatrix {
    let mut m = BinaryMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, rng.gen_bool(0.5));
        }
    }
    m
}

/// Random full-rank parity-check matrix without zero columns.
pub fn random_parity_check<R: Rng>(rng: &mut R, n: usize, k: usize) -> BinaryMatrix {
    loop {
        let h = random_matrix(rng, n - k, n);
        if h.rank() == n - k && (0..n).all(|c| h.col_weight(c) > 0) {
            return h;
        }
    }
}

fn random_code<R: Rng>(rng: &mut R, labels: Vec<String>) -> LinearCode {
    let n = labels.len();
    let k = if n == 0 { 0 } else { rng.gen_range(1..=n) };
    let g = random_matrix(rng, k, n);
    LinearCode::from_generator(labels, &g).expect("labels unique")
}

fn attempt<R: Rng>(rng: &mut R, shape: &ModelShape) -> Result<Option<GraphicalModel>> {
    let nc = rng.gen_range(2..=shape.max_constraints.max(2));
    let nv = rng.gen_range(2..=shape.max_visibles.max(2));
    let mut edges: Vec<(ConstraintId, ConstraintId)> = (1..nc as ConstraintId)
        .map(|i| (rng.gen_range(0..i) + 1, i + 1))
        .collect();
    for _ in 0..rng.gen_range(0..=shape.max_extra_edges) {
        let a = rng.gen_range(1..=nc as ConstraintId);
        let b = rng.gen_range(1..=nc as ConstraintId);
        if a != b && !edges.contains(&(a, b)) && !edges.contains(&(b, a)) {
            edges.push((a, b));
        }
    }
    let mut ports: Vec<Vec<Port>> = vec![Vec::new(); nc];
    let mut hiddens = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        let l = format!("S{}", i + 1);
        ports[a as usize - 1].push(Port::Hidden(l.clone()));
        ports[b as usize - 1].push(Port::Hidden(l.clone()));
        hiddens.push(HiddenVar {
            label: l,
            size: rng.gen_range(1..=shape.max_hidden_size.max(1)),
            ends: [a, b],
        });
    }
    let visibles: Vec<String> = (1..=nv).map(|i| format!("V{i}")).collect();
    for v in &visibles {
        let c = rng.gen_range(0..nc);
        let pos = rng.gen_range(0..=ports[c].len());
        ports[c].insert(pos, Port::Visible(v.clone()));
    }
    let mut b = ModelBuilder::new().visibles(&visibles);
    for h in &hiddens {
        b = b.hidden(&h.label, h.size);
    }
    for (i, p) in ports.into_iter().enumerate() {
        let n: usize = p
            .iter()
            .map(|x| match x {
                Port::Visible(_) => 1,
                Port::Hidden(l) => hiddens.iter().find(|h| &h.label == l).expect("declared").size,
            })
            .sum();
        let code = random_code(rng, crate::gf2::code::default_labels(n));
        b = b.constraint_code(i as ConstraintId + 1, p, code.generator().clone());
    }
    let gm = b.build()?;
    if gm.behavior(shape.max_behavior_dim).is_err() {
        return Ok(None);
    }
    let gm = trim_all(&gm)?;
    if shape.proper {
        let k = gm.realized_code(shape.max_behavior_dim)?.k();
        if !is_trim(&gm) || gm.behavior(shape.max_behavior_dim)?.k() != k || k == 0 {
            return Ok(None);
        }
    }
    Ok(Some(gm))
}

/// Random connected model within `shape`, retrying until one qualifies.
pub fn random_model<R: Rng>(rng: &mut R, shape: &ModelShape) -> GraphicalModel {
    loop {
        if let Ok(Some(gm)) = attempt(rng, shape) {
            return gm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn models_respect_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shape = ModelShape::default();
        for _ in 0..20 {
            let gm = random_model(&mut rng, &shape);
            assert!(gm.validate(true).is_ok());
            assert!(gm.behavior(shape.max_behavior_dim).is_ok());
            assert!(is_trim(&gm));
        }
        let tree = ModelShape {
            max_extra_edges: 0,
            ..ModelShape::default()
        };
        assert!(random_model(&mut rng, &tree).topology().cycle_free);
    }

    #[test]
    fn parity_checks_are_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_parity_check(&mut rng, 10, 4);
        assert_eq!(h.rank(), 6);
    }
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::fastdecay::{build_fd_trig, FastDecaySpecTrig};
use crate::poly::TrigPoly;
use crate::tset::TSetDescriptor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    /// Family tag and index, e.g. `random#17`.
    pub source: String,
    pub poly: TrigPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusOptions {
    pub seed: u64,
    /// Number of random polynomials.
    pub random: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    /// Relative size of the perturbation added to extremal polynomials.
    pub perturbation: f64,
    /// Number of fast-decay products.
    pub fast_decay: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self {
            seed: 20_240_611,
            random: 200,
            min_degree: 8,
            max_degree: 64,
            perturbation: 1e-3,
            fast_decay: 8,
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> TrigPoly {
    let cos: Vec<f64> = (0..=n).map(|_| rng.sample(StandardNormal)).collect();
    let sin: Vec<f64> = (0..=n).map(|j| if j == 0 { 0.0 } else { rng.sample(StandardNormal) }).collect();
    TrigPoly::new(cos, sin, false).expect("finite coefficients")
}

/// Seeded test corpus: random polynomials with standard normal
/// coefficients, the extremal families `T_l o U` of `families`, slightly
/// perturbed extremal polynomials, and products with a fast decreasing
/// factor. Degrees stay within `[min_degree, max_degree]`.
pub fn corpus(opts: &CorpusOptions, families: &[TSetDescriptor]) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for i in 0..opts.random {
        let n = rng.random_range(opts.min_degree..=opts.max_degree);
        out.push(CorpusEntry {
            source: format!("random#{i}"),
            poly: random_poly(&mut rng, n),
        });
    }
    for (f, d) in families.iter().enumerate() {
        let big_n = d.degree();
        for l in (1..).take_while(|l| l * big_n <= opts.max_degree) {
            if l * big_n < opts.min_degree {
                continue;
            }
            let t = d.extremal_sequence(l);
            let r = random_poly(&mut rng, l * big_n);
            let scale = opts.perturbation / r.coeff_l1();
            out.push(CorpusEntry {
                source: format!("perturbed:{f}#{l}"),
                poly: &t + &r.scale(scale),
            });
            out.push(CorpusEntry {
                source: format!("extremal:{f}#{l}"),
                poly: t,
            });
        }
    }
    let peak = FastDecaySpecTrig {
        peak: 0.0,
        peak_order: 1,
        plateau: [-0.6, 0.6],
        buffer: [-1.6, 1.6],
        zeros: vec![],
        multiplicities: vec![],
        degree: opts.min_degree.max(16),
    };
    if let Ok(fd) = build_fd_trig(&peak) {
        let q = fd.poly.as_trig().expect("trigonometric").clone();
        let room = opts.max_degree.saturating_sub(q.degree());
        for i in 0..opts.fast_decay {
            if room == 0 {
                break;
            }
            let n = rng.random_range(1..=room);
            out.push(CorpusEntry {
                source: format!("fastdecay#{i}"),
                poly: q.product(&random_poly(&mut rng, n)),
            });
        }
    }
    out
}

//! Parameter samples for non-intrusive projection.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chaos::gauss_legendre;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    MonteCarlo,
    Sobol,
    Halton,
    Gauss,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 4] = [
        SamplerKind::MonteCarlo,
        SamplerKind::Sobol,
        SamplerKind::Halton,
        SamplerKind::Gauss,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            SamplerKind::MonteCarlo => "mc",
            SamplerKind::Sobol => "sobol",
            SamplerKind::Halton => "halton",
            SamplerKind::Gauss => "gq",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mc" | "montecarlo" | "monte-carlo" => Ok(SamplerKind::MonteCarlo),
            "sobol" | "qmc" | "qmc-sobol" => Ok(SamplerKind::Sobol),
            "halton" | "qmc-halton" => Ok(SamplerKind::Halton),
            "gq" | "gauss" | "gauss-legendre" => Ok(SamplerKind::Gauss),
            other => Err(invalid(format!("unknown sampler kind '{other}'"))),
        }
    }
}

/// Points in `[a, b]` with quadrature weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub kind: SamplerKind,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// The points mapped to `[-1, 1]`, kept exact so that narrow intervals do
    /// not lose precision when the basis is evaluated.
    pub reference: Vec<f64>,
    /// Generator seed; only meaningful for Monte Carlo.
    pub seed: Option<u64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Base-`base` radical inverse of `index`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

pub fn make_samples(kind: SamplerKind, q: usize, a: f64, b: f64, seed: u64) -> Result<SampleSet> {
    if q == 0 {
        return Err(invalid("sample count q must be at least 1"));
    }
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(invalid(format!("interval [{a}, {b}] must satisfy b > a")));
    }
    let uniform = vec![1.0 / q as f64; q];
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let build = |reference: Vec<f64>, weights: Vec<f64>, seed: Option<u64>| SampleSet {
        kind,
        points: reference.iter().map(|t| mid + half * t).collect(),
        weights,
        reference,
        seed,
    };
    let set = match kind {
        SamplerKind::MonteCarlo => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = (0..q).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
            build(t, uniform, Some(seed))
        }
        // In one dimension both sequences reduce to van der Corput in base 2.
        SamplerKind::Sobol | SamplerKind::Halton => {
            let t = (1..=q as u64).map(|i| 2.0 * radical_inverse(i, 2) - 1.0).collect();
            build(t, uniform, None)
        }
        SamplerKind::Gauss => {
            let rule = gauss_legendre(q, -1.0, 1.0)?;
            build(rule.nodes, rule.weights, None)
        }
    };
    Ok(set)
}

/// Star discrepancy of a point set in `[0, 1]`.
pub fn star_discrepancy(points: &[f64]) -> f64 {
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = sorted.len() as f64;
    let worst = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - (2.0 * i as f64 + 1.0) / (2.0 * q)).abs())
        .fold(0.0, f64::max);
    1.0 / (2.0 * q) + worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let g = make_samples(SamplerKind::Gauss, 1, 1.0, 2.0, 0).unwrap();
        assert_eq!((g.points.clone(), g.weights.clone()), (vec![1.5], vec![1.0]));
        for kind in [SamplerKind::Sobol, SamplerKind::Halton] {
            let s = make_samples(kind, 3, 1.0, 2.0, 0).unwrap();
            assert_eq!(s.points, vec![1.5, 1.25, 1.75]);
            assert!(s.weights.iter().all(|&w| w == 1.0 / 3.0));
        }
        let a = make_samples(SamplerKind::MonteCarlo, 2, 1.0, 2.0, 7).unwrap();
        let b = make_samples(SamplerKind::MonteCarlo, 2, 1.0, 2.0, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.points, make_samples(SamplerKind::MonteCarlo, 2, 1.0, 2.0, 8).unwrap().points);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(make_samples(SamplerKind::Gauss, 0, 1.0, 2.0, 0).is_err());
        assert!(make_samples(SamplerKind::Sobol, 4, 2.0, 1.0, 0).is_err());
        assert!(matches!("lhs".parse::<SamplerKind>(), Err(Error::InvalidArgument(_))));
        for k in SamplerKind::ALL {
            assert_eq!(k.id().parse::<SamplerKind>().unwrap(), k);
        }
    }

    #[test]
    fn qmc_discrepancy_decreases() {
        let d: Vec<f64> = [64usize, 256, 1024]
            .iter()
            .map(|&q| {
                let s = make_samples(SamplerKind::Sobol, q, 0.0, 1.0, 0).unwrap();
                star_discrepancy(&s.points)
            })
            .collect();
        assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
        let mc = make_samples(SamplerKind::MonteCarlo, 1024, 0.0, 1.0, 1).unwrap();
        assert!(star_discrepancy(&mc.points) > d[2]);
    }

    #[test]
    fn monte_carlo_spread_follows_square_root_rate() {
        let q = 10_000;
        let means: Vec<f64> = (0..10)
            .map(|seed| {
                let s = make_samples(SamplerKind::MonteCarlo, q, 1.0, 2.0, seed).unwrap();
                s.points.iter().sum::<f64>() / q as f64
            })
            .collect();
        let m = means.iter().sum::<f64>() / 10.0;
        let sd = (means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / 9.0).sqrt();
        let expected = (1.0f64 / 12.0).sqrt() / (q as f64).sqrt();
        assert!(sd > expected / 3.0 && sd < expected * 3.0, "sd {sd} expected {expected}");
    }

    #[test]
    fn gauss_sets_are_reflection_symmetric() {
        let s = make_samples(SamplerKind::Gauss, 17, 1.0, 2.0, 0).unwrap();
        for i in 0..17 {
            assert_abs_diff_eq!(s.points[i] - 1.5, 1.5 - s.points[16 - i], epsilon = 1e-15);
            assert_eq!(s.weights[i], s.weights[16 - i]);
        }
    }

    proptest! {
        #[test]
        fn sample_set_invariants(
            kind_idx in 0usize..4,
            q in 1usize..300,
            a in -3.0f64..3.0,
            width in 1e-3f64..5.0,
            seed in any::<u64>(),
        ) {
            let kind = SamplerKind::ALL[kind_idx];
            let s = make_samples(kind, q, a, a + width, seed).unwrap();
            prop_assert_eq!(s.len(), q);
            prop_assert!((s.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
            prop_assert!(s.points.iter().all(|&x| x >= a && x <= a + width));
            if kind != SamplerKind::Gauss {
                prop_assert!(s.weights.iter().all(|&w| w == 1.0 / q as f64));
            }
            prop_assert_eq!(s.reference.len(), q);
            for (&t, &x) in s.reference.iter().zip(&s.points) {
                prop_assert!((-1.0..=1.0).contains(&t));
                prop_assert!((a + 0.5 * width * (1.0 + t) - x).abs() <= 1e-14 * (1.0 + a.abs() + width));
            }
        }
    }
}

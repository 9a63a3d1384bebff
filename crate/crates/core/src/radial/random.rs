//! Seeded random smooth radial test functions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Even sum of Gaussian bumps `Σ a_j (e^{-b_j (r-c_j)²} + e^{-b_j (r+c_j)²})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSum {
    pub amps: Vec<f64>,
    pub rates: Vec<f64>,
    pub centers: Vec<f64>,
}

/// Ranges the random family draws from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSumRanges {
    /// Inclusive range of the number of bumps.
    pub terms: (usize, usize),
    pub rate: (f64, f64),
    pub center_max: f64,
}

impl Default for GaussianSumRanges {
    fn default() -> Self {
        Self { terms: (1, 4), rate: (0.5, 8.0), center_max: 3.0 }
    }
}

impl GaussianSum {
    pub fn gaussian(rate: f64) -> Self {
        Self { amps: vec![0.5], rates: vec![rate], centers: vec![0.0] }
    }

    pub fn random(rng: &mut impl Rng, ranges: &GaussianSumRanges) -> Self {
        let terms = rng.gen_range(ranges.terms.0..=ranges.terms.1);
        let mut s = Self { amps: vec![], rates: vec![], centers: vec![] };
        for _ in 0..terms {
            s.amps.push(rng.gen_range(-1.0..1.0));
            s.rates.push(rng.gen_range(ranges.rate.0..ranges.rate.1));
            s.centers.push(rng.gen_range(0.0..ranges.center_max));
        }
        s
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms().map(|(a, b, c)| a * ((-b * (r - c).powi(2)).exp() + (-b * (r + c).powi(2)).exp())).sum()
    }

    /// First derivative in `r`.
    pub fn eval_d1(&self, r: f64) -> f64 {
        self.terms()
            .map(|(a, b, c)| {
                -2.0 * a * b * ((r - c) * (-b * (r - c).powi(2)).exp() + (r + c) * (-b * (r + c).powi(2)).exp())
            })
            .sum()
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.amps.iter().zip(&self.rates).zip(&self.centers).map(|((a, b), c)| (*a, *b, *c))
    }

    /// The same bumps with amplitudes multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self { amps: self.amps.iter().map(|a| a * k).collect(), ..self.clone() }
    }

    /// Largest radius at which a bump is centred.
    pub fn reach(&self) -> f64 {
        self.centers.iter().zip(&self.rates).map(|(c, b)| c + 6.0 / b.sqrt()).fold(0.0, f64::max)
    }
}

/// Deterministic generator of the `index`-th member of the family for `seed`.
pub fn family_member(seed: u64, index: u64, ranges: &GaussianSumRanges) -> GaussianSum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    GaussianSum::random(&mut rng, ranges)
}

/// Seeded generator shared by the harnesses.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members_are_reproducible_and_distinct() {
        let r = GaussianSumRanges::default();
        assert_eq!(family_member(7, 3, &r), family_member(7, 3, &r));
        assert_ne!(family_member(7, 3, &r), family_member(7, 4, &r));
        assert_ne!(family_member(7, 3, &r), family_member(8, 3, &r));
    }

    #[test]
    fn sums_are_even_and_derivative_matches() {
        let f = family_member(1, 0, &GaussianSumRanges::default());
        for r in [0.1, 0.7, 2.3] {
            assert!((f.eval(r) - f.eval(-r)).abs() < 1e-15);
            let h = 1e-5;
            let fd = (f.eval(r + h) - f.eval(r - h)) / (2.0 * h);
            assert!((fd - f.eval_d1(r)).abs() < 1e-7);
        }
    }
}

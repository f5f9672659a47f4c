//! Terrain control: a frozen random permutation of consonance bins.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fields::LandscapeFields;

/// `perm[x]` is the bin whose value is read when bin `x` is evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinPermutation {
    perm: Vec<usize>,
}

impl BinPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    pub fn from_seed(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_rng(n, &mut rng)
    }

    pub fn from_rng<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        Self { perm }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    #[inline]
    pub fn source(&self, x: usize) -> usize {
        self.perm[x]
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.perm.len());
        self.perm.iter().map(|&j| values[j]).collect()
    }
}

/// Replaces `C_field` with its permuted copy; every other view is left intact.
pub fn shuffle_c_field(fields: &LandscapeFields, perm: &BinPermutation) -> LandscapeFields {
    let mut out = fields.clone();
    out.c_field = perm.apply(&fields.c_field);
    out
}

/// Lag-1 autocorrelation, used to confirm that shuffling destroys spatial coherence.
pub fn lag1_autocorrelation(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 3 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if var == 0.0 {
        return 0.0;
    }
    let cov: f64 = values.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(c: Vec<f64>) -> LandscapeFields {
        let n = c.len();
        LandscapeFields {
            h01: vec![0.0; n],
            r01: vec![0.0; n],
            c_field: c,
            c_density: vec![0.0; n],
            c_level01: vec![0.5; n],
            clipped_h: 0,
            clipped_r: 0,
        }
    }

    #[test]
    fn identity_leaves_fields_unchanged() {
        let f = fields((0..50).map(|i| (i as f64 * 0.3).sin()).collect());
        assert_eq!(shuffle_c_field(&f, &BinPermutation::identity(50)), f);
    }

    #[test]
    fn same_seed_same_permutation() {
        assert_eq!(BinPermutation::from_seed(100, 9), BinPermutation::from_seed(100, 9));
        assert_ne!(BinPermutation::from_seed(100, 9), BinPermutation::from_seed(100, 10));
    }

    #[test]
    fn smooth_field_loses_autocorrelation() {
        let c: Vec<f64> = (0..800).map(|i| (i as f64 / 40.0).sin()).collect();
        let f = fields(c);
        let s = shuffle_c_field(&f, &BinPermutation::from_seed(800, 3));
        assert!(lag1_autocorrelation(&f.c_field) > 0.99);
        assert!(lag1_autocorrelation(&s.c_field).abs() < 0.2);
    }
}

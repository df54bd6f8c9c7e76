use rand::Rng;

use crate::error::{Error, Result};
use crate::solver::Distribution;

/// One draw from the maximal coupling of two distributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoupledPair {
    pub left: usize,
    pub right: usize,
}

fn draw<R: Rng + ?Sized>(w: impl Iterator<Item = f64> + Clone, total: f64, rng: &mut R) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in w.enumerate() {
        if p > 0.0 {
            last = i;
            acc += p;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Draws `(X, Y)` with `X ~ x`, `Y ~ y` and `P(X != Y) = tv(x, y)`.
pub fn coupled_pair<R: Rng + ?Sized>(
    x: &Distribution,
    y: &Distribution,
    rng: &mut R,
) -> Result<CoupledPair> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let (a, b) = (x.weights(), y.weights());
    let overlap = a.iter().zip(b).map(|(p, q)| p.min(*q));
    let common: f64 = overlap.clone().sum();
    if rng.random::<f64>() < common {
        let i = draw(overlap, common, rng);
        return Ok(CoupledPair { left: i, right: i });
    }
    let l = a.iter().zip(b).map(|(p, q)| (p - q).max(0.0));
    let r = a.iter().zip(b).map(|(p, q)| (q - p).max(0.0));
    let (lt, rt) = (l.clone().sum(), r.clone().sum());
    Ok(CoupledPair {
        left: draw(l, lt, rng),
        right: draw(r, rt, rng),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equal_distributions_always_agree() {
        let x = Distribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = coupled_pair(&x, &x, &mut rng).unwrap();
            assert_eq!(p.left, p.right);
        }
    }

    #[test]
    fn disjoint_supports_never_agree() {
        let x = Distribution::vertex(2, 0);
        let y = Distribution::vertex(2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            assert_eq!(
                coupled_pair(&x, &y, &mut rng).unwrap(),
                CoupledPair { left: 0, right: 1 }
            );
        }
    }

    #[test]
    fn dimension_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(coupled_pair(
            &Distribution::uniform(2),
            &Distribution::uniform(3),
            &mut rng
        )
        .is_err());
    }
}

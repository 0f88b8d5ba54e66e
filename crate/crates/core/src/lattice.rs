//! Membership in finitely generated subgroups of a quadratic field.
//!
//! An element of `Q(sqrt(d))` is a vector of two rational coordinates, so
//! `t ∈ <t_1, ..., t_n>_Z` is an integer linear system with two rows. After
//! clearing denominators the generator matrix is brought to column echelon
//! form by unimodular column operations, which are tracked to recover the
//! integer coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exactfield::QuadraticElement as QE;

fn coordinates(x: &QE) -> [crate::Rational; 2] {
    let (r, s) = x.rational_and_irrational_parts();
    [r, s]
}

/// Integer coefficients `λ` with `Σ λ_i·generators[i] = target`, if any.
///
/// All irrational elements must share one radicand.
pub fn solve_integer_combination(generators: &[QE], target: &QE) -> Option<Vec<BigInt>> {
    let n = generators.len();
    let rows = 2;
    let cols: Vec<[crate::Rational; 2]> = generators.iter().map(coordinates).collect();
    let rhs = coordinates(target);
    let mut lcm = BigInt::one();
    for v in cols.iter().chain(std::iter::once(&rhs)) {
        for c in v {
            lcm = lcm.lcm(c.denom());
        }
    }
    let scale = |c: &crate::Rational| (c * crate::Rational::from_integer(lcm.clone())).to_integer();
    // column-major integer matrix
    let mut h: Vec<Vec<BigInt>> = cols.iter().map(|v| v.iter().map(scale).collect()).collect();
    let b: Vec<BigInt> = rhs.iter().map(scale).collect();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|c| (0..n).map(|r| if r == c { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let mut pivots: Vec<Option<usize>> = vec![None; rows];
    let mut next = 0;
    for (row, pivot) in pivots.iter_mut().enumerate() {
        if next >= n {
            break;
        }
        for c in next + 1..n {
            if h[c][row].is_zero() {
                continue;
            }
            if h[next][row].is_zero() {
                h.swap(next, c);
                u.swap(next, c);
                continue;
            }
            let a = h[next][row].clone();
            let bb = h[c][row].clone();
            let eg = a.extended_gcd(&bb);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            let (ag, bg) = (&a / &g, &bb / &g);
            combine(&mut h, next, c, &s, &t, &bg, &ag);
            combine(&mut u, next, c, &s, &t, &bg, &ag);
        }
        if !h[next][row].is_zero() {
            *pivot = Some(next);
            next += 1;
        }
    }

    let mut y = vec![BigInt::zero(); n];
    for (row, pivot) in pivots.iter().enumerate() {
        let mut residual = b[row].clone();
        for (c, yc) in y.iter().enumerate() {
            residual -= &h[c][row] * yc;
        }
        match pivot {
            Some(p) => {
                let (q, r) = residual.div_rem(&h[*p][row]);
                if !r.is_zero() {
                    return None;
                }
                y[*p] = q;
            }
            None if !residual.is_zero() => return None,
            None => {}
        }
    }
    let lambda = (0..n)
        .map(|i| (0..n).map(|c| &u[c][i] * &y[c]).sum::<BigInt>())
        .collect();
    Some(lambda)
}

/// Replaces columns `(p, q)` by `(s·p + t·q, bg·p − ag·q)`, a unimodular step
/// when `s·ag + t·bg = 1`.
fn combine(m: &mut [Vec<BigInt>], p: usize, q: usize, s: &BigInt, t: &BigInt, bg: &BigInt, ag: &BigInt) {
    let (old_p, old_q) = (m[p].clone(), m[q].clone());
    for (r, (x, z)) in old_p.iter().zip(&old_q).enumerate() {
        m[p][r] = s * x + t * z;
        m[q][r] = bg * x - ag * z;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::qe;

    fn check(gens: &[QE], target: &QE, lambda: &[BigInt]) {
        let mut sum = QE::zero();
        for (g, l) in gens.iter().zip(lambda) {
            sum += &g.scale(&crate::Rational::from_integer(l.clone()));
        }
        assert_eq!(&sum, target);
    }

    #[test]
    fn constructed_member() {
        let gens = [qe("77/7752*sqrt(2)"), qe("77/2584")];
        let t = &gens[0].scale(&crate::Rational::from_integer(2.into()))
            + &gens[1].scale(&crate::Rational::from_integer(3.into()));
        let lambda = solve_integer_combination(&gens, &t).unwrap();
        assert_eq!(lambda, vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn half_generator_is_not_member() {
        let gens = [qe("77/7752*sqrt(2)"), qe("77/2584")];
        assert!(solve_integer_combination(&gens, &qe("77/5168")).is_none());
    }

    #[test]
    fn zero_is_member() {
        let gens = [qe("77/7752*sqrt(2)"), qe("77/2584")];
        let lambda = solve_integer_combination(&gens, &QE::zero()).unwrap();
        assert!(lambda.iter().all(|l| l.is_zero()));
    }

    #[test]
    fn redundant_generators() {
        let gens = [qe("1/6"), qe("1/4"), qe("sqrt(2)"), qe("1/3+sqrt(2)")];
        let t = qe("1/12 + 5*sqrt(2)");
        let lambda = solve_integer_combination(&gens, &t).unwrap();
        check(&gens, &t, &lambda);
        assert!(solve_integer_combination(&gens, &qe("1/24")).is_none());
        assert!(solve_integer_combination(&gens, &qe("1/2*sqrt(2)")).is_none());
    }
}

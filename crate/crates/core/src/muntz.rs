//! Müntz–Legendre polynomials in exact rational arithmetic.
//!
//! The radial basis of the inversion is the family `LM^k_n(x) = Σ_l Lc^k_{l,n} x^{2l+k}`,
//! orthogonal on `[0, 1]` with weight `x dx`. Its coefficients coincide with the
//! general Müntz–Legendre coefficients of the exponent sequence `(2i + k + 1/2)_i`,
//! and the matrix of moments `A_{l,n} = <L_n, x^{λ_l}>` is lower triangular with an
//! explicit inverse. Everything here is computed with big rationals; conversion to
//! `f64` happens only when a polynomial is evaluated.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{EitError, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| EitError::Domain(format!("{x} is not finite")))
}

/// Admissible exponents: pairwise distinct, each `>= -1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSequence {
    lambdas: Vec<BigRational>,
}

impl ExponentSequence {
    pub fn new(lambdas: Vec<BigRational>) -> Result<Self> {
        let floor = rat(-1, 2);
        for (i, l) in lambdas.iter().enumerate() {
            if *l < floor {
                return Err(EitError::Domain(format!("exponent {l} at position {i} is below -1/2")));
            }
            if let Some(j) = lambdas[..i].iter().position(|m| m == l) {
                return Err(EitError::DegenerateSequence(format!(
                    "exponent {l} repeated at positions {j} and {i}"
                )));
            }
        }
        Ok(Self { lambdas })
    }

    /// The shifted sequence `(2i + k + 1/2)_{i < len}` behind `LM^k_n`.
    pub fn shifted_even(k: u32, len: usize) -> Self {
        let lambdas = (0..len)
            .map(|i| rat(4 * i as i64 + 2 * k as i64 + 1, 2))
            .collect();
        Self { lambdas }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.lambdas
    }
}

/// `L_n(x) = Σ_k c_{k,n} x^{λ_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuntzPolynomial {
    pub exponents: Vec<BigRational>,
    pub coefficients: Vec<BigRational>,
}

impl MuntzPolynomial {
    pub fn degree_index(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Exact value at `x = 1`.
    pub fn value_at_one(&self) -> BigRational {
        self.coefficients.iter().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(EitError::Domain(format!("x = {x} outside [0, 1]")));
        }
        let mut sum = 0.0;
        for (lambda, c) in self.exponents.iter().zip(&self.coefficients) {
            let term = if x == 0.0 {
                if lambda.is_negative() {
                    return Err(EitError::Domain(format!(
                        "x = 0 with negative exponent {lambda}"
                    )));
                } else if lambda.is_zero() {
                    1.0
                } else {
                    0.0
                }
            } else {
                x.powf(to_f64(lambda))
            };
            sum += to_f64(c) * term;
        }
        Ok(sum)
    }
}

pub fn build_muntz(seq: &ExponentSequence, n: usize) -> Result<MuntzPolynomial> {
    if n >= seq.len() {
        return Err(EitError::Range(format!(
            "index {n} needs at least {} exponents, sequence has {}",
            n + 1,
            seq.len()
        )));
    }
    let lam = seq.as_slice();
    let one = BigRational::one();
    let coefficients = (0..=n)
        .map(|k| {
            let num = (0..n).fold(one.clone(), |acc, j| acc * (&lam[k] + &lam[j] + &one));
            let den = (0..=n)
                .filter(|&j| j != k)
                .fold(one.clone(), |acc, j| acc * (&lam[k] - &lam[j]));
            num / den
        })
        .collect();
    Ok(MuntzPolynomial {
        exponents: lam[..=n].to_vec(),
        coefficients,
    })
}

/// `Lc^k_{l,n}` for `0 <= l <= n <= nmax`; rows carry exact and float copies.
#[derive(Debug, Clone)]
pub struct WeightedFamily {
    k: u32,
    rows: Vec<Vec<BigRational>>,
    float_rows: Vec<Vec<f64>>,
}

/// Closed form `Π_{j<n}(l+j+k+1) / Π_{j<=n, j≠l}(l-j)`; always an integer.
fn weighted_coefficient(k: u32, l: usize, n: usize) -> BigInt {
    let k = k as i64;
    let (l, n) = (l as i64, n as i64);
    let num = (0..n).fold(BigInt::one(), |acc, j| acc * BigInt::from(l + j + k + 1));
    let den = (0..=n)
        .filter(|&j| j != l)
        .fold(BigInt::one(), |acc, j| acc * BigInt::from(l - j));
    num / den
}

pub fn build_weighted_family(k: u32, nmax: usize) -> WeightedFamily {
    let rows: Vec<Vec<BigRational>> = (0..=nmax)
        .map(|n| {
            (0..=n)
                .map(|l| BigRational::from_integer(weighted_coefficient(k, l, n)))
                .collect()
        })
        .collect();
    let float_rows = rows
        .iter()
        .map(|row| row.iter().map(to_f64).collect())
        .collect();
    WeightedFamily { k, rows, float_rows }
}

impl WeightedFamily {
    pub fn angular_order(&self) -> u32 {
        self.k
    }

    pub fn nmax(&self) -> usize {
        self.rows.len() - 1
    }

    /// Exact coefficients of `LM^k_n` in the monomials `x^{2l+k}`, `l = 0..=n`.
    pub fn row(&self, n: usize) -> &[BigRational] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// `x^k · P(x²)` with `P` in Horner form; no domain check.
    pub(crate) fn eval_unchecked(&self, n: usize, x: f64) -> f64 {
        let x2 = x * x;
        let p = self.float_rows[n]
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x2 + c);
        p * x.powi(self.k as i32)
    }
}

pub fn eval_weighted(fam: &WeightedFamily, n: usize, x: f64) -> Result<f64> {
    if n > fam.nmax() {
        return Err(EitError::Range(format!("n = {n} exceeds nmax = {}", fam.nmax())));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(EitError::Domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(fam.eval_unchecked(n, x))
}

/// Lower-triangular matrix of exact rationals. Row `i` stores columns `0..=i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularMatrix {
    rows: Vec<Vec<BigRational>>,
}

impl TriangularMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i + 1 {
                return Err(EitError::Shape(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    i + 1
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        if j > i {
            BigRational::zero()
        } else {
            self.rows[i][j].clone()
        }
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.rows[i]
    }

    pub fn mul(&self, other: &TriangularMatrix) -> Result<TriangularMatrix> {
        if self.size() != other.size() {
            return Err(EitError::Shape(format!(
                "cannot multiply sizes {} and {}",
                self.size(),
                other.size()
            )));
        }
        let rows = (0..self.size())
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        (j..=i).fold(BigRational::zero(), |acc, s| {
                            acc + &self.rows[i][s] * &other.rows[s][j]
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(TriangularMatrix { rows })
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, v)| if i == j { v.is_one() } else { v.is_zero() })
        })
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect()
    }
}

fn check_size(seq: &ExponentSequence, size: usize) -> Result<()> {
    if size > seq.len() {
        return Err(EitError::Range(format!(
            "size {size} exceeds sequence length {}",
            seq.len()
        )));
    }
    Ok(())
}

/// `A_{l,n} = Π_{j<n}(λ_l-λ_j) / Π_{j<=n}(1+λ_l+λ_j)` for `n <= l`.
pub fn gram_matrix(seq: &ExponentSequence, size: usize) -> Result<TriangularMatrix> {
    check_size(seq, size)?;
    let lam = seq.as_slice();
    let one = BigRational::one();
    let rows = (0..size)
        .map(|l| {
            (0..=l)
                .map(|n| {
                    let num = (0..n).fold(one.clone(), |acc, j| acc * (&lam[l] - &lam[j]));
                    let den = (0..=n).fold(one.clone(), |acc, j| acc * (&one + &lam[l] + &lam[j]));
                    num / den
                })
                .collect()
        })
        .collect();
    Ok(TriangularMatrix { rows })
}

/// `R_{α,β} = (1+2λ_α) Π_{j<α}(1+λ_β+λ_j) / Π_{j<=α, j≠β}(λ_β-λ_j)` for `β <= α`.
pub fn inverse_matrix(seq: &ExponentSequence, size: usize) -> Result<TriangularMatrix> {
    check_size(seq, size)?;
    let lam = seq.as_slice();
    let one = BigRational::one();
    let two = int(2);
    let rows = (0..size)
        .map(|alpha| {
            (0..=alpha)
                .map(|beta| {
                    let num = (0..alpha)
                        .fold(one.clone(), |acc, j| acc * (&one + &lam[beta] + &lam[j]));
                    let den = (0..=alpha)
                        .filter(|&j| j != beta)
                        .fold(one.clone(), |acc, j| acc * (&lam[beta] - &lam[j]));
                    (&one + &two * &lam[alpha]) * num / den
                })
                .collect()
        })
        .collect();
    Ok(TriangularMatrix { rows })
}

fn factorial(n: usize) -> BigInt {
    (1..=n as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

/// Factorial form of the inverse for the weighted family:
/// `R_{n,l} = 2(-1)^{n-l}(2n+k+1) Π_{j<n}(1+k+l+j) / (l!(n-l)!)`.
pub fn weighted_inverse_entry(k: u32, n: usize, l: usize) -> BigInt {
    if l > n {
        return BigInt::zero();
    }
    let k = k as i64;
    let prod = (0..n as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(1 + k + l as i64 + j));
    let sign = if (n - l).is_multiple_of(2) { 1 } else { -1 };
    BigInt::from(2 * sign * (2 * n as i64 + k + 1)) * prod / (factorial(l) * factorial(n - l))
}

/// Rows `0..size` of the weighted inverse matrix for angular order `k`.
pub fn weighted_inverse(k: u32, size: usize) -> TriangularMatrix {
    let rows = (0..size)
        .map(|n| {
            (0..=n)
                .map(|l| BigRational::from_integer(weighted_inverse_entry(k, n, l)))
                .collect()
        })
        .collect();
    TriangularMatrix { rows }
}

/// `‖LM^k_n‖² = 1/(4n+2k+2)` in `L²([0,1], x dx)`.
pub fn lm_norm_squared(k: u32, n: usize) -> BigRational {
    rat(1, 4 * n as i64 + 2 * k as i64 + 2)
}

/// Exact `∫_0^1 p(x) q(x) x dx` for `p = Σ a_l x^{2l+k}`, `q = Σ b_m x^{2m+k}`.
pub fn weighted_inner_product(k: u32, a: &[BigRational], b: &[BigRational]) -> BigRational {
    let mut acc = BigRational::zero();
    for (l, al) in a.iter().enumerate() {
        for (m, bm) in b.iter().enumerate() {
            let denom = 2 * (l + m) as i64 + 2 * k as i64 + 2;
            acc += al * bm / int(denom);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq_half_five_half() -> ExponentSequence {
        ExponentSequence::new(vec![rat(1, 2), rat(5, 2)]).unwrap()
    }

    #[test]
    fn muntz_example_from_definition() {
        let l1 = build_muntz(&seq_half_five_half(), 1).unwrap();
        assert_eq!(l1.coefficients, vec![int(-1), int(2)]);
        assert_eq!(l1.exponents, vec![rat(1, 2), rat(5, 2)]);
        assert_eq!(l1.value_at_one(), int(1));
        assert!((l1.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn muntz_zero_index_is_monomial() {
        let seq = ExponentSequence::new(vec![rat(3, 7), int(2), rat(-1, 2)]).unwrap();
        let l0 = build_muntz(&seq, 0).unwrap();
        assert_eq!(l0.coefficients, vec![int(1)]);
        assert_eq!(l0.exponents, vec![rat(3, 7)]);
    }

    #[test]
    fn duplicate_exponents_are_rejected() {
        let err = ExponentSequence::new(vec![rat(1, 2), int(1), rat(1, 2)]).unwrap_err();
        assert!(matches!(err, EitError::DegenerateSequence(_)));
    }

    #[test]
    fn exponents_below_minus_half_are_rejected() {
        let err = ExponentSequence::new(vec![rat(-3, 4)]).unwrap_err();
        assert!(matches!(err, EitError::Domain(_)));
    }

    #[test]
    fn build_muntz_index_out_of_range() {
        assert!(matches!(
            build_muntz(&seq_half_five_half(), 2),
            Err(EitError::Range(_))
        ));
    }

    #[test]
    fn negative_exponent_at_origin_is_domain_error() {
        let seq = ExponentSequence::new(vec![rat(-1, 2), int(1)]).unwrap();
        let l1 = build_muntz(&seq, 1).unwrap();
        assert!(matches!(l1.eval(0.0), Err(EitError::Domain(_))));
        assert!(l1.eval(0.25).is_ok());
    }

    #[test]
    fn weighted_family_rows() {
        let f1 = build_weighted_family(1, 1);
        assert_eq!(f1.row(1), &[int(-2), int(3)]);
        let f0 = build_weighted_family(0, 1);
        assert_eq!(f0.row(1), &[int(-1), int(2)]);
        for k in 0..5 {
            assert_eq!(build_weighted_family(k, 3).row(0), &[int(1)]);
        }
    }

    #[test]
    fn weighted_family_matches_general_muntz() {
        for k in 0..4 {
            let fam = build_weighted_family(k, 6);
            let seq = ExponentSequence::shifted_even(k, 7);
            for n in 0..=6 {
                let l = build_muntz(&seq, n).unwrap();
                assert_eq!(l.coefficients.as_slice(), fam.row(n), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn eval_weighted_examples() {
        let f0 = build_weighted_family(0, 1);
        assert_eq!(eval_weighted(&f0, 1, 1.0).unwrap(), 1.0);
        assert_eq!(eval_weighted(&f0, 1, 0.0).unwrap(), -1.0);
        let f1 = build_weighted_family(1, 1);
        assert!((eval_weighted(&f1, 1, 0.5).unwrap() + 0.625).abs() < 1e-15);
        assert!(matches!(eval_weighted(&f1, 1, 1.5), Err(EitError::Domain(_))));
        assert!(matches!(eval_weighted(&f1, 2, 0.5), Err(EitError::Range(_))));
    }

    #[test]
    fn gram_and_inverse_examples() {
        let seq = seq_half_five_half();
        let a = gram_matrix(&seq, 2).unwrap();
        assert_eq!(a.get(0, 0), rat(1, 2));
        assert_eq!(a.get(1, 0), rat(1, 4));
        assert_eq!(a.get(1, 1), rat(1, 12));
        assert_eq!(a.get(0, 1), int(0));
        let r = inverse_matrix(&seq, 2).unwrap();
        assert_eq!(r.get(0, 0), int(2));
        assert_eq!(r.get(1, 0), int(-6));
        assert_eq!(r.get(1, 1), int(12));
        let prod = r.mul(&a).unwrap();
        assert_eq!(prod.get(1, 0), int(0));
        assert!(prod.is_identity());
    }

    #[test]
    fn gram_first_column() {
        let seq = ExponentSequence::new(vec![rat(1, 3), int(0), rat(7, 5), int(4)]).unwrap();
        let a = gram_matrix(&seq, 4).unwrap();
        for l in 0..4 {
            let expected = BigRational::one() / (int(1) + &seq.as_slice()[0] + &seq.as_slice()[l]);
            assert_eq!(a.get(l, 0), expected);
        }
    }

    #[test]
    fn factorial_inverse_matches_general_inverse() {
        for k in 0..4 {
            let general = inverse_matrix(&ExponentSequence::shifted_even(k, 9), 9).unwrap();
            assert_eq!(weighted_inverse(k, 9), general, "k = {k}");
        }
    }

    #[test]
    fn sizes_beyond_sequence_are_rejected() {
        let seq = seq_half_five_half();
        assert!(matches!(gram_matrix(&seq, 3), Err(EitError::Range(_))));
        assert!(matches!(inverse_matrix(&seq, 3), Err(EitError::Range(_))));
    }

    #[test]
    fn norms() {
        assert_eq!(lm_norm_squared(0, 0), rat(1, 2));
        assert_eq!(lm_norm_squared(0, 1), rat(1, 6));
        assert_eq!(lm_norm_squared(1, 1), rat(1, 8));
        let f1 = build_weighted_family(1, 1);
        assert_eq!(weighted_inner_product(1, f1.row(1), f1.row(1)), rat(1, 8));
    }

    #[test]
    fn triangular_rows_are_validated() {
        assert!(TriangularMatrix::from_rows(vec![vec![int(1)], vec![int(1)]]).is_err());
        assert!(TriangularMatrix::from_rows(vec![vec![int(1)], vec![int(0), int(1)]])
            .unwrap()
            .is_identity());
    }
}

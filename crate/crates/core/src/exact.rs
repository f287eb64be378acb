//! Exact rational helpers: parsing, formatting, and row reduction over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"p/q"`, `"p"`, or a decimal literal such as `"-0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Malformed(format!("not a rational literal: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Malformed(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(p) = s.parse::<BigInt>() {
        return Ok(BigRational::from_integer(p));
    }
    // Decimal literal: exact base-10 value, not the nearest double.
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').ok_or_else(bad)?;
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = BigInt::from(10).pow(frac_part.len() as u32 + 1);
    let r = BigRational::new(digits, scale);
    Ok(if neg { -r } else { r })
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Malformed(format!("non-finite coefficient {x}")))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest double to `r` together with an upper bound on `|r - approx|`.
pub fn to_f64_with_error(r: &BigRational) -> (f64, f64) {
    let approx = r.to_f64().unwrap_or(f64::NAN);
    match BigRational::from_float(approx) {
        Some(back) => {
            let diff = (r - back).abs();
            if diff.is_zero() {
                (approx, 0.0)
            } else {
                let d = diff.to_f64().unwrap_or(f64::INFINITY);
                (approx, d.next_up().next_up())
            }
        }
        None => (approx, f64::INFINITY),
    }
}

/// Reduces `r` into the half-open interval [0, 1).
pub fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// Reduced row echelon form over Q.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    pub rows: Vec<Vec<BigRational>>,
    pub pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination of a rectangular rational matrix (row-major).
pub fn rref(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> RowEchelon {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &factor * pv;
            }
        }
        pivots.push(c);
        r += 1;
    }
    RowEchelon { rows, pivots }
}

pub fn integer_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|row| row.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect()
}

/// Rank over Q of a set of integer vectors of length `ncols`.
pub fn rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    rref(integer_rows(rows), ncols).rank()
}

/// One particular solution of `rows · u = rhs`, with free variables set to zero.
///
/// Returns the solution and the pivot columns, or `None` when the system is inconsistent.
pub fn solve_particular(
    rows: &[Vec<BigRational>],
    rhs: &[BigRational],
    ncols: usize,
) -> Option<(Vec<BigRational>, Vec<usize>)> {
    let augmented: Vec<Vec<BigRational>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let ech = rref(augmented, ncols + 1);
    if ech.pivots.contains(&ncols) {
        return None;
    }
    let mut u = vec![BigRational::zero(); ncols];
    for (row, &c) in ech.rows.iter().zip(&ech.pivots) {
        u[c] = row[ncols].clone();
    }
    Some((u, ech.pivots))
}

/// Inverse of a square rational matrix, or `None` when singular.
pub fn inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let augmented: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    let ech = rref(augmented, n);
    if ech.rank() < n {
        return None;
    }
    Some(ech.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn det_integer(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v.div_floor(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

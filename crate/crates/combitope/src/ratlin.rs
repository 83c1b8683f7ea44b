//! Exact rational scalars, vectors and the little linear algebra the rest of
//! the toolkit needs: rank, affine dimension and hyperplane solving.
//!
//! Everything here is exact. There are no tolerances anywhere: two quantities
//! are equal iff their reduced fractions are identical. Gaussian elimination
//! pivots on the first nonzero entry.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction, always in lowest terms with a
/// positive denominator. The scalar for all geometry in this crate.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` as a [`Rational`]. Panics if `q == 0`; meant for literals in code.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses the interchange spelling of a rational: `p/q`, or plain `p` when
/// the denominator is 1.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, den))
        }
    }
}

/// Formats a rational as `p/q`, or `p` when the denominator is 1.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A point or direction in `d`-space with exact rational coordinates.
/// Length is fixed at construction; equality is componentwise.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RVector {
    coords: Vec<Rational>,
}

impl RVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RVector { coords }
    }

    pub fn zero(dim: usize) -> Self {
        RVector {
            coords: vec![Rational::zero(); dim],
        }
    }

    /// Standard basis vector `e_i` (0-indexed) in `dim`-space.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.coords[i] = Rational::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RVector {
            coords: coords.iter().map(|&c| rat(c)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &RVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &RVector) -> RVector {
        debug_assert_eq!(self.dim(), other.dim());
        RVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RVector) -> RVector {
        debug_assert_eq!(self.dim(), other.dim());
        RVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> RVector {
        RVector {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    /// Appends one coordinate, embedding the vector in the next dimension up.
    pub fn extended(&self, last: Rational) -> RVector {
        let mut coords = self.coords.clone();
        coords.push(last);
        RVector { coords }
    }
}

impl std::fmt::Debug for RVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(c))?;
        }
        write!(f, ")")
    }
}

/// The hyperplane `{x : normal · x = offset}`. When it supports a polytope,
/// the polytope lies on the side `normal · x <= offset`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Hyperplane {
    pub normal: RVector,
    pub offset: Rational,
}

impl Hyperplane {
    pub fn new(normal: RVector, offset: Rational) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::BadParameter("hyperplane normal is zero".into()));
        }
        Ok(Hyperplane { normal, offset })
    }

    /// Signed evaluation `normal · x - offset`: zero on the plane, negative
    /// strictly inside, positive strictly beyond.
    pub fn eval(&self, x: &RVector) -> Rational {
        self.normal.dot(x) - &self.offset
    }

    pub fn contains(&self, x: &RVector) -> bool {
        self.eval(x).is_zero()
    }

    /// Rescales so the normal has coprime integer entries, keeping
    /// orientation. Offset is rescaled by the same factor.
    pub fn normalized_keep_sign(&self) -> Hyperplane {
        let (normal, offset) = scale_to_coprime(&self.normal, &self.offset);
        Hyperplane { normal, offset }
    }

    /// Rescales to coprime integer entries and flips sign if needed so the
    /// first nonzero normal coordinate is positive.
    pub fn normalized(&self) -> Hyperplane {
        let h = self.normalized_keep_sign();
        let flip = h
            .normal
            .coords()
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.is_negative())
            .unwrap_or(false);
        if flip {
            Hyperplane {
                normal: h.normal.scale(&rat(-1)),
                offset: -h.offset,
            }
        } else {
            h
        }
    }

    pub fn flipped(&self) -> Hyperplane {
        Hyperplane {
            normal: self.normal.scale(&rat(-1)),
            offset: -self.offset.clone(),
        }
    }
}

/// Multiplies through by the lcm of denominators and divides by the gcd of
/// numerators, so all entries become coprime integers.
fn scale_to_coprime(normal: &RVector, offset: &Rational) -> (RVector, Rational) {
    let mut lcm = BigInt::one();
    for c in normal.coords().iter().chain(std::iter::once(offset)) {
        lcm = lcm.lcm(c.denom());
    }
    let factor = Rational::from_integer(lcm);
    let ints: Vec<Rational> = normal.coords().iter().map(|c| c * &factor).collect();
    let off = offset * &factor;
    let mut gcd = BigInt::zero();
    for c in ints.iter().chain(std::iter::once(&off)) {
        gcd = gcd.gcd(&c.numer().abs());
    }
    if gcd.is_zero() || gcd.is_one() {
        return (RVector::new(ints), off);
    }
    let div = Rational::from_integer(gcd);
    (
        RVector::new(ints.iter().map(|c| c / &div).collect()),
        off / &div,
    )
}

/// Row-echelon elimination in place. Returns the pivot columns.
/// Pivot choice is the first row with a nonzero entry in the current column.
fn eliminate(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut next_row = 0;
    for col in 0..ncols {
        let Some(pr) = (next_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next_row, pr);
        let pivot = rows[next_row][col].clone();
        for r in 0..rows.len() {
            if r != next_row && !rows[r][col].is_zero() {
                let factor = &rows[r][col] / &pivot;
                for c in col..ncols {
                    let sub = &rows[next_row][c] * &factor;
                    rows[r][c] = &rows[r][c] - sub;
                }
            }
        }
        pivots.push(col);
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }
    pivots
}

/// Rank of the span of `rows`, computed exactly. Empty input has rank 0.
pub fn rank(rows: &[RVector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let dim = rows[0].dim();
    debug_assert!(rows.iter().all(|r| r.dim() == dim));
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    eliminate(&mut m).len()
}

/// Dimension of the affine hull of `points`: the rank of `{p_i - p_0}`.
pub fn affine_dim(points: &[RVector]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyPointList)?;
    let diffs: Vec<RVector> = points[1..].iter().map(|p| p.sub(first)).collect();
    Ok(rank(&diffs))
}

/// The hyperplane through `points`, which must affinely span a flat of
/// dimension exactly `d - 1` in `d`-space. Output is normalized to coprime
/// integer entries with the first nonzero normal coordinate positive.
pub fn solve_hyperplane(points: &[RVector]) -> Result<Hyperplane> {
    let first = points.first().ok_or(Error::EmptyPointList)?;
    let d = first.dim();
    let mut diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| p.sub(first).coords().to_vec())
        .collect();
    if diffs.is_empty() {
        diffs.push(vec![Rational::zero(); d]);
    }
    let pivots = eliminate(&mut diffs);
    if pivots.len() != d - 1 {
        return Err(Error::NotHyperplane {
            expected: d - 1,
            actual: pivots.len(),
        });
    }
    // One free column; the kernel of the difference matrix is the normal line.
    let free = (0..d)
        .find(|c| !pivots.contains(c))
        .expect("rank d-1 leaves one free column");
    let mut normal = vec![Rational::zero(); d];
    normal[free] = Rational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        // Row reduced: pivot entry times coordinate + free entry * 1 = 0.
        normal[pc] = -(&diffs[row][free] / &diffs[row][pc]);
    }
    let normal = RVector::new(normal);
    let offset = normal.dot(first);
    let h = Hyperplane::new(normal, offset)?.normalized();
    debug_assert!(points.iter().all(|p| h.contains(p)));
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(coords: &[i64]) -> RVector {
        RVector::from_ints(coords)
    }

    #[test]
    fn rank_empty_is_zero() {
        assert_eq!(rank(&[]), 0);
    }

    #[test]
    fn rank_of_standard_basis() {
        for d in 1..=6 {
            let basis: Vec<RVector> = (0..d).map(|i| RVector::unit(d, i)).collect();
            assert_eq!(rank(&basis), d);
        }
    }

    #[test]
    fn affine_rank_of_planar_five_points() {
        // Hand elimination of the difference vectors gives rank 3.
        let pts = [
            rv(&[0, 0, 0]),
            rv(&[1, 0, 0]),
            rv(&[0, 1, 0]),
            rv(&[1, 1, 0]),
            rv(&[0, 0, 1]),
        ];
        assert_eq!(affine_dim(&pts).unwrap(), 3);
    }

    #[test]
    fn affine_dim_single_point() {
        assert_eq!(affine_dim(&[rv(&[3, 4])]).unwrap(), 0);
    }

    #[test]
    fn affine_dim_square_in_3space() {
        let pts = [rv(&[0, 0, 0]), rv(&[1, 0, 0]), rv(&[0, 1, 0]), rv(&[1, 1, 0])];
        assert_eq!(affine_dim(&pts).unwrap(), 2);
    }

    #[test]
    fn affine_dim_empty_errors() {
        assert!(matches!(affine_dim(&[]), Err(Error::EmptyPointList)));
    }

    #[test]
    fn hyperplane_through_axis_points() {
        let h = solve_hyperplane(&[rv(&[0, 0]), rv(&[0, 1])]).unwrap();
        assert_eq!(h.normal, rv(&[1, 0]));
        assert!(h.offset.is_zero());
    }

    #[test]
    fn hyperplane_through_simplex_face() {
        let h = solve_hyperplane(&[rv(&[1, 0, 0]), rv(&[0, 1, 0]), rv(&[0, 0, 1])]).unwrap();
        assert_eq!(h.normal, rv(&[1, 1, 1]));
        assert_eq!(h.offset, rat(1));
    }

    #[test]
    fn hyperplane_rejects_low_dimension() {
        let r = solve_hyperplane(&[rv(&[0, 0, 0]), rv(&[1, 0, 0])]);
        assert!(matches!(r, Err(Error::NotHyperplane { .. })));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "-7", "3/4", "-11/13", "22/7"] {
            let x = parse_rational(s).unwrap();
            assert_eq!(format_rational(&x), s);
        }
        // Non-reduced input normalizes.
        assert_eq!(format_rational(&parse_rational("6/4").unwrap()), "3/2");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn small_rational() -> impl Strategy<Value = Rational> {
            (-20i64..=20, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
        }

        fn small_matrix() -> impl Strategy<Value = Vec<Vec<Rational>>> {
            (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::collection::vec(small_rational(), c), r)
            })
        }

        proptest! {
            #[test]
            fn rank_equals_rank_of_transpose(m in small_matrix()) {
                let rows: Vec<RVector> = m.iter().cloned().map(RVector::new).collect();
                let ncols = m[0].len();
                let cols: Vec<RVector> = (0..ncols)
                    .map(|c| RVector::new(m.iter().map(|row| row[c].clone()).collect()))
                    .collect();
                prop_assert_eq!(rank(&rows), rank(&cols));
            }

            #[test]
            fn addition_round_trips(a in small_rational(), b in small_rational()) {
                let sum = &a + &b;
                prop_assert_eq!(&sum - &b, a);
            }

            #[test]
            fn solved_hyperplane_contains_inputs(
                seed in proptest::collection::vec((-6i64..=6, 1i64..=4), 6)
            ) {
                // Three points spanning a plane in 3-space, when they do.
                let pts: Vec<RVector> = seed
                    .chunks(2)
                    .map(|ch| {
                        RVector::new(vec![
                            ratio(ch[0].0, ch[0].1),
                            ratio(ch[1].0, ch[1].1),
                            rat(1),
                        ])
                    })
                    .collect();
                if let Ok(h) = solve_hyperplane(&pts) {
                    for p in &pts {
                        prop_assert!(h.contains(p));
                    }
                }
            }
        }
    }
}

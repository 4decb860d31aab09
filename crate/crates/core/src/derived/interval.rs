//! Indecomposables of D^b(mod kA_n): shifted interval modules.

use std::fmt;

use crate::field::Field;
use crate::linalg::Matrix;

use super::complex::ProjComplex;

/// The interval module `[a, b]` placed in shift `shift`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub a: u8,
    pub b: u8,
    pub shift: i32,
}

impl Interval {
    pub fn new(a: u8, b: u8, shift: i32) -> Self {
        assert!(1 <= a && a <= b, "interval [{a},{b}]");
        Interval { a, b, shift }
    }

    /// Base name over `A_n`: `P_i = [i,n]`, `I_j = [1,j]`, `S_i = [i,i]`,
    /// `N = [2,3]` when `n = 4`, otherwise `M{a}_{b}`.
    pub fn base_name(&self, n: usize) -> String {
        let (a, b) = (self.a, self.b);
        if b as usize == n {
            format!("P{a}")
        } else if a == 1 {
            format!("I{b}")
        } else if a == b {
            format!("S{a}")
        } else if n == 4 && (a, b) == (2, 3) {
            "N".to_string()
        } else {
            format!("M{a}_{b}")
        }
    }

    pub fn name(&self, n: usize) -> String {
        match self.shift {
            0 => self.base_name(n),
            k => format!("{}[{k}]", self.base_name(n)),
        }
    }

    pub fn shifted(&self, k: i32) -> Self {
        Interval {
            shift: self.shift + k,
            ..*self
        }
    }

    /// Minimal projective resolution `P_{b+1} -> P_a`, placed so that the
    /// cohomology sits in degree `-shift`.
    pub fn complex<F: Field>(&self, n: usize) -> ProjComplex<F> {
        assert!(self.b as usize <= n);
        let top = -self.shift;
        if self.b as usize == n {
            return ProjComplex::projective(n, self.a, top);
        }
        ProjComplex::new(
            n,
            top - 1,
            vec![vec![self.b + 1], vec![self.a]],
            vec![Matrix::from_rows(&[vec![F::one()]])],
        )
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.a, self.b)?;
        if self.shift != 0 {
            write!(f, "[{}]", self.shift)?;
        }
        Ok(())
    }
}

/// All intervals over `A_n` with shift in `shifts`, ordered by shift, then
/// `a`, then `b`.
pub fn catalog(n: usize, shifts: std::ops::RangeInclusive<i32>) -> Vec<Interval> {
    let mut out = Vec::new();
    for k in shifts {
        for a in 1..=n as u8 {
            for b in a..=n as u8 {
                out.push(Interval::new(a, b, k));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_for_a4() {
        let names: Vec<String> = catalog(4, 0..=0).iter().map(|i| i.name(4)).collect();
        assert_eq!(
            names,
            ["I1", "I2", "I3", "P1", "S2", "N", "P2", "S3", "P3", "P4"]
        );
        assert_eq!(Interval::new(3, 3, 1).name(4), "S3[1]");
    }

    #[test]
    fn catalog_size() {
        assert_eq!(catalog(4, 0..=0).len(), 10);
        assert_eq!(catalog(4, 0..=1).len(), 20);
        assert_eq!(catalog(1, 0..=0).len(), 1);
    }
}

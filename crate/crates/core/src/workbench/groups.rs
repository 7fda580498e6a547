//! Finite groups by multiplication table and their Kac–Takesaki operators.

use crate::error::{MuError, Result};
use crate::munit::MultUnitary;
use crate::tensor::linalg::{Mat, ONE};

/// A finite group with elements `0..n`, identity `0`, and `table[g][h] = gh`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
}

impl GroupTable {
    /// Validates closure, identity at `0`, unique inverses and associativity.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(MuError::Parse("empty group table".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(MuError::Parse(format!("row {g} has {} entries, expected {n}", row.len())));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return Err(MuError::Parse(format!("row {g} contains out-of-range element {bad}")));
            }
        }
        for (g, row) in table.iter().enumerate() {
            if table[0][g] != g || row[0] != g {
                return Err(MuError::Parse(format!("element 0 is not the identity (fails at {g})")));
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for g in 0..n {
            let right: Vec<usize> = (0..n).filter(|&h| table[g][h] == 0).collect();
            if right.len() != 1 || table[right[0]][g] != 0 {
                return Err(MuError::Parse(format!("element {g} has no unique two-sided inverse")));
            }
            inverses[g] = right[0];
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(MuError::Parse(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(GroupTable { table, inverses })
    }

    /// One row per line, comma-separated element indices.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut table = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| MuError::Parse(e.to_string()))?;
            let row = record
                .iter()
                .map(|s| s.parse::<usize>().map_err(|e| MuError::Parse(format!("bad entry {s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            table.push(row);
        }
        Self::new(table)
    }

    pub fn to_csv(&self) -> String {
        self.table.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",") + "\n").collect()
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1, "cyclic group of order 0");
        Self::new((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).expect("cyclic table")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `ℤ₂×ℤ₂`.
    pub fn klein() -> Self {
        Self::cyclic(2).direct_product(&Self::cyclic(2))
    }

    /// The symmetric group on `k` letters; permutations in lexicographic
    /// order (identity first), composed as `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(k: usize) -> Self {
        let mut perms: Vec<Vec<usize>> = vec![(0..k).collect()];
        let mut i = 0;
        while let Some(next) = next_permutation(&perms[i]) {
            perms.push(next);
            i += 1;
        }
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed");
        let table = perms
            .iter()
            .map(|s| perms.iter().map(|t| index(&t.iter().map(|&x| s[x]).collect())).collect())
            .collect();
        Self::new(table).expect("symmetric group table")
    }

    /// Pairs `(a, b)` indexed `a·|other| + b`.
    pub fn direct_product(&self, other: &GroupTable) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let table = (0..n)
            .map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect())
            .collect();
        Self::new(table).expect("product of groups")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// The permutation matrix of `λ_g`: `λ_g δ_h = δ_{gh}`.
    pub fn left_regular(&self, g: usize) -> Mat {
        let n = self.order();
        let mut m = Mat::zeros(n, n);
        for h in 0..n {
            m[(self.mul(g, h), h)] = ONE;
        }
        m
    }

    /// The permutation matrix of `ρ_g`: `ρ_g δ_h = δ_{hg⁻¹}`.
    pub fn right_regular(&self, g: usize) -> Mat {
        let n = self.order();
        let mut m = Mat::zeros(n, n);
        for h in 0..n {
            m[(self.mul(h, self.inverse(g)), h)] = ONE;
        }
        m
    }
}

fn next_permutation(p: &[usize]) -> Option<Vec<usize>> {
    let mut p = p.to_vec();
    let i = (1..p.len()).rev().find(|&i| p[i - 1] < p[i])?;
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1])?;
    p.swap(i - 1, j);
    p[i..].reverse();
    Some(p)
}

/// `W(δ_g⊗δ_h) = δ_g⊗δ_{gh}` on `ℂⁿ⊗ℂⁿ`.
pub fn gen_group_kt(table: &GroupTable) -> Result<MultUnitary> {
    let n = table.order();
    let mut w = Mat::zeros(n * n, n * n);
    for g in 0..n {
        for h in 0..n {
            w[(g * n + table.mul(g, h), g * n + h)] = ONE;
        }
    }
    MultUnitary::from_matrix(n, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::munit::pentagon_residual;
    use crate::tensor::linalg::real_matrix;

    #[test]
    fn z2_gives_cnot() {
        let w = gen_group_kt(&GroupTable::cyclic(2)).unwrap();
        let cnot = real_matrix(&[&[1., 0., 0., 0.], &[0., 1., 0., 0.], &[0., 0., 0., 1.], &[0., 0., 1., 0.]]);
        assert_eq!(w.data(), &cnot);
    }

    #[test]
    fn trivial_group() {
        let w = gen_group_kt(&GroupTable::trivial()).unwrap();
        assert_eq!(w.data(), &Mat::identity(1, 1));
    }

    #[test]
    fn built_in_groups_are_multiplicative() {
        for t in [GroupTable::cyclic(3), GroupTable::cyclic(4), GroupTable::klein(), GroupTable::symmetric(3)] {
            let w = gen_group_kt(&t).unwrap();
            assert!(pentagon_residual(&w).unwrap() < 1e-12);
        }
        assert_eq!(GroupTable::symmetric(3).order(), 6);
        assert_eq!(gen_group_kt(&GroupTable::symmetric(3)).unwrap().data().nrows(), 36);
    }

    #[test]
    fn s3_is_not_abelian() {
        let t = GroupTable::symmetric(3);
        assert!((0..6).any(|a| (0..6).any(|b| t.mul(a, b) != t.mul(b, a))));
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let t = GroupTable::symmetric(3);
        assert_eq!(GroupTable::from_csv(&t.to_csv()).unwrap(), t);
        assert!(GroupTable::from_csv("0,1\n1,1\n").is_err());
        assert!(GroupTable::from_csv("1,0\n0,1\n").is_err());
        assert!(GroupTable::from_csv("0,1\n1,x\n").is_err());
        assert!(GroupTable::from_csv("0,1,2\n1,2,0\n").is_err());
        // a Latin square with identity 0 that is not associative
        let loop5 = "0,1,2,3,4\n1,0,3,4,2\n2,4,0,1,3\n3,2,4,0,1\n4,3,1,2,0\n";
        assert!(GroupTable::from_csv(loop5).is_err());
    }

    #[test]
    fn regular_representations_commute() {
        let t = GroupTable::symmetric(3);
        for g in 0..6 {
            for h in 0..6 {
                let l = t.left_regular(g);
                let r = t.right_regular(h);
                assert_eq!(&l * &r, &r * &l);
            }
            assert_eq!(t.left_regular(g) * t.left_regular(t.inverse(g)), Mat::identity(6, 6));
        }
    }
}

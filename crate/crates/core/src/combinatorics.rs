//! Catalan numbers, Catalan's triangle, Dyck paths and the diagram cost
//! models behind the kernel construction.
//!
//! Everything here is exact integer arithmetic. A Dyck path of size `n` is a
//! lattice walk from `(0,0)` to `(n,n)` made of unit `Right` and `Up` steps
//! that never rises above the diagonal `y = x`. The kernel `M^(k,0)` has one
//! term per Dyck path of size `k-1`, and the number of influence factors in
//! that term is the path's [`area_cost`].

use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` for which [`catalan`] is evaluated.
pub const MAX_CATALAN_N: u32 = 30;
/// Largest size accepted by [`enumerate_dyck_paths`].
pub const MAX_ENUMERATION_N: u32 = 14;
/// Largest memory length accepted by [`s_total`] and [`smatpi_cost_estimate`].
pub const MAX_COST_K: u32 = 15;
/// Largest memory length accepted by [`tsmatpi_cost_model`].
pub const MAX_TREE_COST_DK: u32 = 25;

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) is divisible by i at every step
        acc = acc.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(acc)
}

fn to_u64(what: &'static str, v: u128) -> Result<u64> {
    u64::try_from(v).map_err(|_| Error::range(what, v, "result exceeds 64 bits"))
}

/// The `n`th Catalan number `(2n)! / ((n+1)! n!)`.
pub fn catalan(n: u32) -> Result<u64> {
    if n > MAX_CATALAN_N {
        return Err(Error::range("catalan n", n, format!("0..={MAX_CATALAN_N}")));
    }
    let b = binomial(2 * n as u64, n as u64).expect("fits for n <= 30");
    to_u64("catalan", b / (n as u128 + 1))
}

/// Entry `T(n, k)` of Catalan's triangle, `binom(n+k, k) - binom(n+k, k-1)`.
pub fn catalan_triangle(n: u32, k: u32) -> Result<u64> {
    if k > n {
        return Err(Error::range("catalan_triangle k", k, format!("0..={n}")));
    }
    let (n, k) = (n as u64, k as u64);
    let overflow = || Error::range("catalan_triangle n", n, "binomials exceed 128 bits");
    let a = binomial(n + k, k).ok_or_else(overflow)?;
    let b = if k == 0 {
        0
    } else {
        binomial(n + k, k - 1).ok_or_else(overflow)?
    };
    to_u64("catalan_triangle", a - b)
}

/// One unit step of a lattice path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    Right,
    Up,
}

/// A validated Dyck path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyckPath {
    steps: Vec<Step>,
}

impl DyckPath {
    /// Validates a step sequence: equal numbers of `Right` and `Up`, and no
    /// prefix with more `Up` than `Right`.
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        let mut height: i64 = 0;
        for (i, s) in steps.iter().enumerate() {
            height += match s {
                Step::Right => 1,
                Step::Up => -1,
            };
            if height < 0 {
                return Err(Error::InvalidArgument(format!(
                    "step {i} of the path crosses above the diagonal"
                )));
            }
        }
        if height != 0 {
            return Err(Error::InvalidArgument(
                "path does not end on the diagonal".into(),
            ));
        }
        Ok(DyckPath { steps })
    }

    /// Parses a string over `R`/`U`, e.g. `"RRUU"`.
    pub fn parse(s: &str) -> Result<Self> {
        let steps = s
            .chars()
            .map(|c| match c {
                'R' | 'r' => Ok(Step::Right),
                'U' | 'u' => Ok(Step::Up),
                other => Err(Error::InvalidArgument(format!("bad step `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn size(&self) -> usize {
        self.steps.len() / 2
    }

    /// Height of the path while it crosses column `x`, for each `x` in `0..n`.
    pub fn column_heights(&self) -> Vec<usize> {
        column_heights(&self.steps)
    }
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            f.write_str(match s {
                Step::Right => "R",
                Step::Up => "U",
            })?;
        }
        Ok(())
    }
}

fn column_heights(steps: &[Step]) -> Vec<usize> {
    let mut ups = 0;
    let mut heights = Vec::with_capacity(steps.len() / 2);
    for s in steps {
        match s {
            Step::Right => heights.push(ups),
            Step::Up => ups += 1,
        }
    }
    heights
}

fn area_of_steps(steps: &[Step]) -> u64 {
    // column x contributes (x - h_x) full squares plus one diagonal triangle
    column_heights(steps)
        .iter()
        .enumerate()
        .map(|(x, &h)| (x + 1 - h) as u64)
        .sum()
}

/// Calls `visit` on every Dyck path of size `n`, in lexicographic order with
/// `Right < Up`.
pub fn for_each_dyck_path(n: u32, mut visit: impl FnMut(&[Step])) {
    fn walk(
        n: usize,
        rights: usize,
        ups: usize,
        buf: &mut Vec<Step>,
        visit: &mut dyn FnMut(&[Step]),
    ) {
        if ups == n {
            visit(buf);
            return;
        }
        if rights < n {
            buf.push(Step::Right);
            walk(n, rights + 1, ups, buf, visit);
            buf.pop();
        }
        if ups < rights {
            buf.push(Step::Up);
            walk(n, rights, ups + 1, buf, visit);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(2 * n as usize);
    walk(n as usize, 0, 0, &mut buf, &mut visit);
}

/// All Dyck paths of size `n` in lexicographic order (`Right < Up`).
pub fn enumerate_dyck_paths(n: u32) -> Result<Vec<DyckPath>> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::range(
            "enumerate_dyck_paths n",
            n,
            format!("0..={MAX_ENUMERATION_N}"),
        ));
    }
    let mut out = Vec::with_capacity(catalan(n)? as usize);
    for_each_dyck_path(n, |steps| {
        out.push(DyckPath {
            steps: steps.to_vec(),
        })
    });
    Ok(out)
}

/// Number of unit squares plus diagonal half-squares lying above the path
/// and weakly below `y = x`.
pub fn area_cost(p: &DyckPath) -> u64 {
    area_of_steps(&p.steps)
}

/// `S_k`: total [`area_cost`] over all Dyck paths of size `k - 1`.
pub fn s_total(k: u32) -> Result<u64> {
    if !(1..=MAX_COST_K).contains(&k) {
        return Err(Error::range("s_total k", k, format!("1..={MAX_COST_K}")));
    }
    let mut total = 0u64;
    for_each_dyck_path(k - 1, |steps| total += area_of_steps(steps));
    Ok(total)
}

/// Row `n` of the triangle `S(n, ·)`, built from the boundary `S(n,n) = 0`
/// and `S(n,k) = Σ_{j≤k} S(n-1,j) + ((n-k)²/n)·binom(n-1+k, k)`.
pub fn s_triangle_row(n: u32) -> Result<Vec<u64>> {
    let mut row: Vec<u64> = vec![0];
    for m in 1..=n as u64 {
        let mut next = Vec::with_capacity(m as usize + 1);
        let mut prefix: u128 = 0;
        for k in 0..m {
            prefix += row[k as usize] as u128;
            let b = binomial(m - 1 + k, k)
                .ok_or_else(|| Error::range("s_triangle n", n, "binomial exceeds 128 bits"))?;
            let numer = ((m - k) as u128)
                .pow(2)
                .checked_mul(b)
                .ok_or_else(|| Error::range("s_triangle n", n, "product exceeds 128 bits"))?;
            assert_eq!(
                numer % m as u128,
                0,
                "(n-k)^2 binom(n-1+k,k) not divisible by n at n={m}, k={k}"
            );
            next.push(to_u64("s_triangle", prefix + numer / m as u128)?);
        }
        next.push(0);
        row = next;
    }
    Ok(row)
}

/// Entry `S(n, k)` of the area triangle; row sums equal `S_{n+1}`.
pub fn s_triangle(n: u32, k: u32) -> Result<u64> {
    if k > n {
        return Err(Error::range("s_triangle k", k, format!("0..={n}")));
    }
    Ok(s_triangle_row(n)?[k as usize])
}

/// Cost estimate of the direct kernel expansion, `Σ_{k=1}^{dk} 4^(k+1) S_k`.
pub fn smatpi_cost_estimate(dk: u32) -> Result<u128> {
    if !(1..=MAX_COST_K).contains(&dk) {
        return Err(Error::range(
            "smatpi_cost_estimate dk",
            dk,
            format!("1..={MAX_COST_K}"),
        ));
    }
    let mut total = 0u128;
    for k in 1..=dk {
        total += 4u128.pow(k + 1) * s_total(k)? as u128;
    }
    Ok(total)
}

/// Cost of a full tree traversal, `Σ_{k=0}^{dk} k² 4^k`.
pub fn tsmatpi_cost_model(dk: u32) -> Result<u64> {
    if dk > MAX_TREE_COST_DK {
        return Err(Error::range(
            "tsmatpi_cost_model dk",
            dk,
            format!("0..={MAX_TREE_COST_DK}"),
        ));
    }
    let direct: u64 = (0..=dk as u64).map(|k| k * k * 4u64.pow(k as u32)).sum();
    debug_assert_eq!(direct as u128, tsmatpi_cost_closed_form(dk));
    Ok(direct)
}

/// `(4/27)((9 dk² - 6 dk + 5) 4^dk - 5)`, evaluated exactly.
pub fn tsmatpi_cost_closed_form(dk: u32) -> u128 {
    let d = dk as u128;
    let numer = 4 * ((9 * d * d - 6 * d + 5) * 4u128.pow(dk) - 5);
    debug_assert_eq!(numer % 27, 0);
    numer / 27
}

/// Number of nodes visited per kernel family by the tree traversal:
/// four root trees with `4^k` nodes on level `k = 1..=dk`.
pub fn traversal_node_count(dk: u32) -> u64 {
    (1..=dk).map(|k| 4u64.pow(k + 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_small_values() {
        assert_eq!(catalan(0).unwrap(), 1);
        assert_eq!(catalan(3).unwrap(), 5);
        assert_eq!(catalan(4).unwrap(), 14);
        assert_eq!(catalan(30).unwrap(), 3_814_986_502_092_304);
        assert!(catalan(31).is_err());
    }

    #[test]
    fn triangle_entries() {
        assert_eq!(catalan_triangle(4, 2).unwrap(), 9);
        assert_eq!(catalan_triangle(7, 0).unwrap(), 1);
        assert_eq!(catalan_triangle(3, 3).unwrap(), 5);
        assert!(catalan_triangle(2, 3).is_err());
    }

    #[test]
    fn paths_of_size_three() {
        let paths = enumerate_dyck_paths(3).unwrap();
        let names: Vec<String> = paths.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["RRRUUU", "RRURUU", "RRUURU", "RURRUU", "RURURU"]);
        let costs: Vec<u64> = paths.iter().map(area_cost).collect();
        assert_eq!(costs, [6, 5, 4, 4, 3]);
    }

    #[test]
    fn empty_path() {
        let paths = enumerate_dyck_paths(0).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].size(), 0);
        assert_eq!(area_cost(&paths[0]), 0);
    }

    #[test]
    fn enumeration_size_cap() {
        assert!(enumerate_dyck_paths(MAX_ENUMERATION_N + 1).is_err());
    }

    #[test]
    fn area_examples() {
        assert_eq!(area_cost(&DyckPath::parse("RRRUUU").unwrap()), 6);
        assert_eq!(area_cost(&DyckPath::parse("RURURU").unwrap()), 3);
        assert_eq!(area_cost(&DyckPath::parse("RU").unwrap()), 1);
    }

    #[test]
    fn invalid_paths_rejected() {
        assert!(DyckPath::parse("UR").is_err());
        assert!(DyckPath::parse("RRU").is_err());
        assert!(DyckPath::parse("RX").is_err());
    }

    #[test]
    fn s_total_values() {
        assert_eq!(s_total(1).unwrap(), 0);
        assert_eq!(s_total(2).unwrap(), 1);
        assert_eq!(s_total(3).unwrap(), 5);
        assert_eq!(s_total(4).unwrap(), 22);
        assert!(s_total(0).is_err());
        assert!(s_total(16).is_err());
    }

    #[test]
    fn s_triangle_matches_table() {
        let table: [&[u64]; 5] = [
            &[0],
            &[1, 0],
            &[3, 2, 0],
            &[6, 9, 7, 0],
            &[10, 24, 32, 27, 0],
        ];
        for (n, row) in table.iter().enumerate() {
            assert_eq!(&s_triangle_row(n as u32).unwrap()[..], *row, "row {n}");
        }
        assert_eq!(s_triangle(5, 5).unwrap(), 0);
        assert!(s_triangle(2, 3).is_err());
    }

    #[test]
    fn cost_estimates() {
        assert_eq!(smatpi_cost_estimate(1).unwrap(), 0);
        assert_eq!(smatpi_cost_estimate(2).unwrap(), 64);
        // 64·1 + 256·5 + 1024·22
        assert_eq!(smatpi_cost_estimate(4).unwrap(), 64 + 1280 + 1024 * 22);
        assert!(smatpi_cost_estimate(0).is_err());
    }

    #[test]
    fn tree_cost_model() {
        assert_eq!(tsmatpi_cost_model(0).unwrap(), 0);
        assert_eq!(tsmatpi_cost_model(1).unwrap(), 4);
        assert_eq!(tsmatpi_cost_model(3).unwrap(), 644);
        assert_eq!(tsmatpi_cost_closed_form(3), 644);
        assert!(tsmatpi_cost_model(26).is_err());
    }

    #[test]
    fn node_counts() {
        assert_eq!(traversal_node_count(1), 16);
        assert_eq!(traversal_node_count(2), 16 + 64);
    }
}

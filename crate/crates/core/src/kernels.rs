//! Memory-kernel construction by depth-first traversal of the path quadtree.
//!
//! For a fixed path `σ_0 … σ_k` the kernel term of `M^(k,0)` splits by the
//! row `j` of the shaded `(F^(k,j) - 1)` box in its last column:
//!
//! ```text
//! 𝓜^(k,0) = Σ_{j=0}^{k-2} (F^(k,j) - 1) 𝓜scr^(k),[j]
//! ```
//!
//! and the per-column pieces obey
//!
//! ```text
//! 𝓜scr^(k+1),[n] = ( Σ_{j<n} (F^(k,j) - 1) 𝓜scr^(k),[j] + F^(k,n) 𝓜scr^(k),[n] )
//!                  · A^(k+1,k) · Π_{l=n+1}^{k-1} F^(k+1,l)
//! ```
//!
//! with `𝓜scr^(k),[k-1] = 0`. The bracket depends only on the parent node,
//! so each node is first *folded* into the sibling-shared form
//! `X_n = Σ_{j<n}(F^(k,j)-1)𝓜scr[j] + F^(k,n)𝓜scr[n]` (whose last entry
//! `X_{k-1}` is exactly `𝓜^(k,0)`), and each of its four children is then an
//! *expansion* `X_n · A · Π F`. Both steps cost `O(k)` per node.
//!
//! The shifted family `M^(k+1,1)` is the same recurrence with every index
//! raised by one: all coefficients come from the interior η table and the
//! first step uses `A^(2,1)` instead of `A^(1,0)`.

use std::ops::{Add, Mul};

use num_traits::{One, Zero};

use crate::bath::EtaTable;
use crate::error::{Error, Result};
use crate::influence::{a_initial, a_interior, f_factor, f_factor_minus_one, PairState, Unitary2};
use crate::linalg::Mat4;
use crate::C64;

/// Largest memory length accepted by [`compute_kernels`].
pub const MAX_TSMATPI_DK: usize = 14;

/// Which kernel family a traversal builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `M^(k,0)`: paths start at the initial time point.
    Initial,
    /// `M^(k+1,1)`: paths start one step later; shift invariant.
    Shifted,
}

impl Family {
    pub const BOTH: [Family; 2] = [Family::Initial, Family::Shifted];

    pub fn label(self) -> &'static str {
        match self {
            Family::Initial => "col0",
            Family::Shifted => "col1",
        }
    }

    /// Absolute time index of local index 0.
    fn offset(self) -> usize {
        match self {
            Family::Initial => 0,
            Family::Shifted => 1,
        }
    }
}

/// Both kernel families for memory length `dk`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSet {
    pub dk: usize,
    /// `m_col0[k-1] = M^(k,0)`.
    pub m_col0: Vec<Mat4>,
    /// `m_col1[k-1] = M^(k+1,1)`.
    pub m_col1: Vec<Mat4>,
}

impl KernelSet {
    pub fn zeros(dk: usize) -> Self {
        KernelSet {
            dk,
            m_col0: vec![Mat4::zeros(); dk],
            m_col1: vec![Mat4::zeros(); dk],
        }
    }

    /// `M^(k,0)` for `k` in `1..=dk`.
    pub fn col0(&self, k: usize) -> &Mat4 {
        &self.m_col0[k - 1]
    }

    /// `M^(k+1,1)` for `k` in `1..=dk`.
    pub fn col1(&self, k: usize) -> &Mat4 {
        &self.m_col1[k - 1]
    }

    pub fn family(&self, family: Family) -> &[Mat4] {
        match family {
            Family::Initial => &self.m_col0,
            Family::Shifted => &self.m_col1,
        }
    }

    fn family_mut(&mut self, family: Family) -> &mut [Mat4] {
        match family {
            Family::Initial => &mut self.m_col0,
            Family::Shifted => &mut self.m_col1,
        }
    }

    /// Largest elementwise difference over both families.
    pub fn max_abs_diff(&self, other: &KernelSet) -> f64 {
        assert_eq!(self.dk, other.dk, "kernel sets of different depth");
        self.m_col0
            .iter()
            .zip(&other.m_col0)
            .chain(self.m_col1.iter().zip(&other.m_col1))
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Scalars the recurrence can run over: complex numbers for the kernels,
/// formal expansions for term counting.
pub trait KernelScalar: Clone + Add<Output = Self> + Mul<Output = Self> + Zero + One {}

impl<T: Clone + Add<Output = T> + Mul<Output = T> + Zero + One> KernelScalar for T {}

/// Folds the per-column scalars of a depth-`k` node in place.
///
/// On entry `buf[..k-1]` holds `𝓜scr^(k),[n]`; on exit `buf[n]` holds the
/// sibling-shared bracket `X_n` for `n < k`, where `X_{k-1} = 𝓜^(k)`.
/// `f(j)` and `fm1(j)` are `F^(k,j)` and `F^(k,j) - 1`.
pub fn fold_scalars<T: KernelScalar>(
    buf: &mut [T],
    f: impl Fn(usize) -> T,
    fm1: impl Fn(usize) -> T,
) {
    let k = buf.len();
    let mut prefix = T::zero();
    for (n, slot) in buf[..k - 1].iter_mut().enumerate() {
        let m = slot.clone();
        *slot = prefix.clone() + f(n) * m.clone();
        prefix = prefix + fm1(n) * m;
    }
    buf[k - 1] = prefix;
}

/// Expands a folded depth-`k` node into one child:
/// `out[n] = shared[n] · step · Π_{l=n+1}^{k-1} f_next(l)`, with
/// `f_next(l) = F^(k+1,l)` and `step = A^(k+1,k)`.
pub fn expand_scalars<T: KernelScalar>(
    shared: &[T],
    step: T,
    f_next: impl Fn(usize) -> T,
    out: &mut [T],
) {
    let k = shared.len();
    debug_assert!(out.len() >= k);
    let mut tail = step;
    for n in (0..k).rev() {
        out[n] = shared[n].clone() * tail.clone();
        if n > 0 {
            tail = tail * f_next(n);
        }
    }
}

/// `Σ_j (F^(k,j) - 1) 𝓜scr^(k),[j]`.
pub fn kernel_term<T: KernelScalar>(scalars: &[T], fm1: impl Fn(usize) -> T) -> T {
    scalars
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (j, m)| acc + fm1(j) * m.clone())
}

/// Per-depth state of the path walk, exposed for inspection and testing.
#[derive(Clone, Debug, PartialEq)]
pub struct TraversalFrame {
    pub family: Family,
    /// Depth `k` of the node: the path has `k + 1` points.
    pub depth: usize,
    /// Path section `σ_0 … σ_k` in family-local time.
    pub path: Vec<PairState>,
    /// `𝓜scr^(k),[n]` for `n = 0..k-1` (empty at depth 1).
    pub scalars: Vec<C64>,
}

fn local_eta(eta: &EtaTable, family: Family, j1: usize, j2: usize) -> Result<C64> {
    eta.lookup(j1 + family.offset(), j2 + family.offset())
}

fn first_step(
    family: Family,
    next: PairState,
    prev: PairState,
    eta: &EtaTable,
    k_mat: &Unitary2,
) -> Result<C64> {
    match family {
        Family::Initial => a_initial(next, prev, eta, k_mat),
        Family::Shifted => a_interior(next, prev, eta, k_mat),
    }
}

impl TraversalFrame {
    /// A depth-1 node `(σ_0, σ_1)`.
    pub fn root(family: Family, s0: PairState, s1: PairState) -> Self {
        TraversalFrame {
            family,
            depth: 1,
            path: vec![s0, s1],
            scalars: Vec::new(),
        }
    }

    fn f(&self, eta: &EtaTable, j1: usize, j2: usize) -> Result<C64> {
        Ok(f_factor(
            self.path[j1],
            self.path[j2],
            local_eta(eta, self.family, j1, j2)?,
        ))
    }

    fn fm1(&self, eta: &EtaTable, j1: usize, j2: usize) -> Result<C64> {
        Ok(f_factor_minus_one(
            self.path[j1],
            self.path[j2],
            local_eta(eta, self.family, j1, j2)?,
        ))
    }

    /// This node's term `𝓜^(k)` of the kernel sum.
    pub fn kernel_term(&self, eta: &EtaTable, k_mat: &Unitary2) -> Result<C64> {
        if self.depth == 1 {
            return first_step(self.family, self.path[1], self.path[0], eta, k_mat);
        }
        let k = self.depth;
        let fm1 = (0..k - 1)
            .map(|j| self.fm1(eta, k, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(kernel_term(&self.scalars, |j| fm1[j]))
    }
}

/// Extends `parent` by one pair state and evaluates the child's scalars.
pub fn advance_frame(
    parent: &TraversalFrame,
    sigma_next: PairState,
    eta: &EtaTable,
    k_mat: &Unitary2,
) -> Result<TraversalFrame> {
    let k = parent.depth;
    let mut path = parent.path.clone();
    path.push(sigma_next);
    let child_shell = TraversalFrame {
        family: parent.family,
        depth: k + 1,
        path,
        scalars: Vec::new(),
    };

    let shared: Vec<C64> = if k == 1 {
        vec![parent.kernel_term(eta, k_mat)?]
    } else {
        let f = (0..k - 1)
            .map(|j| parent.f(eta, k, j))
            .collect::<Result<Vec<_>>>()?;
        let fm1 = (0..k - 1)
            .map(|j| parent.fm1(eta, k, j))
            .collect::<Result<Vec<_>>>()?;
        let mut buf = parent.scalars.clone();
        buf.push(C64::zero());
        fold_scalars(&mut buf, |j| f[j], |j| fm1[j]);
        buf
    };
    let step = a_interior(sigma_next, parent.path[k], eta, k_mat)?;
    let f_next = (0..k)
        .map(|l| child_shell.f(eta, k + 1, l))
        .collect::<Result<Vec<_>>>()?;
    let mut scalars = vec![C64::zero(); k];
    expand_scalars(&shared, step, |l| f_next[l], &mut scalars);
    Ok(TraversalFrame {
        scalars,
        ..child_shell
    })
}

/// Counters collected during a traversal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TraversalStats {
    /// Nodes visited, indexed by family (`Initial`, `Shifted`).
    pub nodes: [u64; 2],
    /// Largest number of complex scalars simultaneously held in frames by a
    /// single traversal.
    pub peak_live_scalars: usize,
}

impl TraversalStats {
    pub fn total_nodes(&self) -> u64 {
        self.nodes.iter().sum()
    }
}

/// F, F-1 and step factors for one family, indexed by `next * 4 + prev`.
struct FactorTables {
    first: [C64; 16],
    step: [C64; 16],
    /// `f[lag]` is `F` between two points `lag` apart with neither at local
    /// time 0, indexed by `σ_earlier * 4 + σ_later` so the four siblings of a
    /// node are adjacent.
    f: Vec<[C64; 16]>,
    fm1: Vec<[C64; 16]>,
    /// `f_col0[j1]` is `F^(j1,0)`, same layout.
    f_col0: Vec<[C64; 16]>,
    fm1_col0: Vec<[C64; 16]>,
}

impl FactorTables {
    fn new(family: Family, eta: &EtaTable, k_mat: &Unitary2, dk: usize) -> Result<Self> {
        let table = |eta_value: C64, g: fn(PairState, PairState, C64) -> C64| {
            let mut t = [C64::zero(); 16];
            for a in PairState::ALL {
                for b in PairState::ALL {
                    t[b.index() * 4 + a.index()] = g(a, b, eta_value);
                }
            }
            t
        };
        let mut first = [C64::zero(); 16];
        let mut step = [C64::zero(); 16];
        for a in PairState::ALL {
            for b in PairState::ALL {
                first[a.index() * 4 + b.index()] = first_step(family, a, b, eta, k_mat)?;
                step[a.index() * 4 + b.index()] = a_interior(a, b, eta, k_mat)?;
            }
        }
        let mut tables = FactorTables {
            first,
            step,
            f: Vec::with_capacity(dk + 1),
            fm1: Vec::with_capacity(dk + 1),
            f_col0: Vec::with_capacity(dk + 1),
            fm1_col0: Vec::with_capacity(dk + 1),
        };
        for lag in 0..=dk {
            let interior = local_eta(eta, family, lag + 1, 1)?;
            let column0 = local_eta(eta, family, lag, 0)?;
            tables.f.push(table(interior, f_factor));
            tables.fm1.push(table(interior, f_factor_minus_one));
            tables.f_col0.push(table(column0, f_factor));
            tables.fm1_col0.push(table(column0, f_factor_minus_one));
        }
        Ok(tables)
    }
}

/// Depth-first walk of one root tree, holding one frame per depth.
struct TreeWalk<'a> {
    tables: &'a FactorTables,
    dk: usize,
    /// Dense indices of `σ_0 … σ_dk`.
    path: Vec<usize>,
    /// Frame for depth `k` lives at `frames[k(k-1)/2 .. k(k+1)/2]`.
    frames: Vec<C64>,
    /// `acc[k-1][σ_k]`: this root's column of `M^(k)`.
    acc: Vec<[C64; 4]>,
    nodes: u64,
    active: Vec<bool>,
    live: usize,
    peak: usize,
}

impl<'a> TreeWalk<'a> {
    fn new(tables: &'a FactorTables, dk: usize) -> Self {
        TreeWalk {
            tables,
            dk,
            path: vec![0; dk + 1],
            frames: vec![C64::zero(); dk * (dk + 1) / 2],
            acc: vec![[C64::zero(); 4]; dk],
            nodes: 0,
            active: vec![false; dk + 1],
            live: 0,
            peak: 0,
        }
    }

    fn activate(&mut self, depth: usize) {
        if !self.active[depth] {
            self.active[depth] = true;
            self.live += depth;
            self.peak = self.peak.max(self.live);
        }
    }

    fn release(&mut self, depth: usize) {
        if depth <= self.dk && self.active[depth] {
            self.active[depth] = false;
            self.live -= depth;
        }
    }

    fn run(&mut self, s0: usize) {
        self.path[0] = s0;
        for s1 in 0..4 {
            self.path[1] = s1;
            self.nodes += 1;
            self.activate(1);
            let term = self.tables.first[s1 * 4 + s0];
            self.frames[0] = term;
            self.acc[0][s1] += term;
            if self.dk > 1 {
                self.descend(1);
            }
        }
        self.release(1);
    }

    /// Visits the four children of the (folded) node at depth `k`.
    fn descend(&mut self, k: usize) {
        let child = k + 1;
        let start = k * (k - 1) / 2;
        let cstart = start + k;
        if child == self.dk {
            self.leaves(k);
            return;
        }
        let tables = self.tables;
        for s in 0..4 {
            self.path[child] = s;
            self.nodes += 1;
            self.activate(child);
            // F^(child,l) and F^(child,l) - 1 along the path
            let mut f = [C64::zero(); MAX_TSMATPI_DK];
            let mut fm1 = [C64::zero(); MAX_TSMATPI_DK];
            let idx = self.path[0] * 4 + s;
            f[0] = tables.f_col0[child][idx];
            fm1[0] = tables.fm1_col0[child][idx];
            for l in 1..k {
                let idx = self.path[l] * 4 + s;
                f[l] = tables.f[child - l][idx];
                fm1[l] = tables.fm1[child - l][idx];
            }
            let step = self.tables.step[s * 4 + self.path[k]];
            let (head, tail) = self.frames.split_at_mut(cstart);
            let parent = &head[start..];
            let buf = &mut tail[..child];
            expand_scalars(parent, step, |l| f[l], &mut buf[..k]);
            fold_scalars(buf, |j| f[j], |j| fm1[j]);
            let term = buf[k];
            self.acc[k][s] += term;
            self.descend(child);
        }
        self.release(child);
    }

    /// The four leaf children of the node at depth `k = dk - 1`, evaluated
    /// side by side. Only the kernel term is needed at a leaf:
    /// `Σ_n (F-1)_n X_n · step · Π_{l>n} F_l`, nested from the bottom.
    fn leaves(&mut self, k: usize) {
        let child = k + 1;
        let start = k * (k - 1) / 2;
        let tables = self.tables;
        let parent = &self.frames[start..start + k];
        let p = self.path[0] * 4;
        let mut acc: [C64; 4] = std::array::from_fn(|s| tables.fm1_col0[child][p + s] * parent[0]);
        for (n, &x) in parent.iter().enumerate().skip(1) {
            let p = self.path[n] * 4;
            let (f, fm1) = (
                &tables.f[child - n][p..p + 4],
                &tables.fm1[child - n][p..p + 4],
            );
            for s in 0..4 {
                acc[s] = acc[s] * f[s] + fm1[s] * x;
            }
        }
        self.nodes += 4;
        self.activate(child);
        let slot = start + k + k;
        for (s, a) in acc.iter().enumerate() {
            self.path[child] = s;
            let term = a * self.tables.step[s * 4 + self.path[k]];
            self.frames[slot] = term;
            self.acc[k][s] += term;
        }
        self.release(child);
    }
}

fn check_inputs(eta: &EtaTable, dk: usize) -> Result<()> {
    if !(1..=MAX_TSMATPI_DK).contains(&dk) {
        return Err(Error::range("dk", dk, format!("1..={MAX_TSMATPI_DK}")));
    }
    // the shifted family reaches η(dk) between interior points, the initial
    // family η_{dk,0}
    if eta.max_lag < dk {
        return Err(Error::LagOutOfRange {
            j1: dk,
            j2: 0,
            max_lag: eta.max_lag,
        });
    }
    Ok(())
}

struct TreeResult {
    family: Family,
    root: usize,
    acc: Vec<[C64; 4]>,
    nodes: u64,
    peak: usize,
}

fn walk_tree(family: Family, root: usize, tables: &FactorTables, dk: usize) -> TreeResult {
    let mut walk = TreeWalk::new(tables, dk);
    walk.run(root);
    TreeResult {
        family,
        root,
        acc: walk.acc,
        nodes: walk.nodes,
        peak: walk.peak,
    }
}

/// Builds both kernel families by tree traversal.
pub fn compute_kernels(eta: &EtaTable, k_mat: &Unitary2, dk: usize) -> Result<KernelSet> {
    compute_kernels_with_stats(eta, k_mat, dk, 1).map(|(k, _)| k)
}

/// [`compute_kernels`] with traversal counters; `threads > 1` walks the eight
/// root trees (two families × four initial states) on a worker pool. Each
/// tree fills a disjoint kernel column, so the result does not depend on the
/// thread count.
pub fn compute_kernels_with_stats(
    eta: &EtaTable,
    k_mat: &Unitary2,
    dk: usize,
    threads: usize,
) -> Result<(KernelSet, TraversalStats)> {
    check_inputs(eta, dk)?;
    let tables = [
        FactorTables::new(Family::Initial, eta, k_mat, dk)?,
        FactorTables::new(Family::Shifted, eta, k_mat, dk)?,
    ];
    let jobs: Vec<(Family, usize)> = Family::BOTH
        .iter()
        .flat_map(|&f| (0..4).map(move |r| (f, r)))
        .collect();
    let tables_for = |f: Family| match f {
        Family::Initial => &tables[0],
        Family::Shifted => &tables[1],
    };

    let results: Vec<TreeResult> = if threads <= 1 {
        jobs.iter()
            .map(|&(f, r)| walk_tree(f, r, tables_for(f), dk))
            .collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        pool.install(|| {
            jobs.par_iter()
                .map(|&(f, r)| walk_tree(f, r, tables_for(f), dk))
                .collect()
        })
    };

    let mut kernels = KernelSet::zeros(dk);
    let mut stats = TraversalStats::default();
    for res in results {
        let slot = match res.family {
            Family::Initial => 0,
            Family::Shifted => 1,
        };
        stats.nodes[slot] += res.nodes;
        stats.peak_live_scalars = stats.peak_live_scalars.max(res.peak);
        let family = kernels.family_mut(res.family);
        for (k, column) in res.acc.iter().enumerate() {
            for (row, v) in column.iter().enumerate() {
                family[k][(row, res.root)] = *v;
            }
        }
    }
    Ok((kernels, stats))
}

pub mod symbolic {
    //! Formal expansion of the recurrence over abstract factors, used to
    //! count the diagrams that make up each kernel term.

    use std::collections::BTreeMap;
    use std::ops::{Add, Mul};

    use num_traits::{One, Zero};

    use super::{expand_scalars, fold_scalars, kernel_term};

    /// An abstract factor of a diagram, indexed by absolute time.
    #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
    pub enum Factor {
        /// `F^(j1,j2)`.
        F(usize, usize),
        /// `F^(j1,j2) - 1`, a shaded box.
        Shaded(usize, usize),
        /// `A^(j,j-1)`.
        A(usize),
    }

    /// A polynomial in commuting [`Factor`]s with integer coefficients.
    #[derive(Clone, Debug, Default, PartialEq, Eq)]
    pub struct Expansion {
        terms: BTreeMap<Vec<Factor>, i64>,
    }

    impl Expansion {
        pub fn factor(f: Factor) -> Self {
            let mut terms = BTreeMap::new();
            terms.insert(vec![f], 1);
            Expansion { terms }
        }

        /// Number of distinct monomials.
        pub fn term_count(&self) -> usize {
            self.terms.len()
        }

        pub fn terms(&self) -> impl Iterator<Item = (&[Factor], i64)> {
            self.terms.iter().map(|(m, c)| (m.as_slice(), *c))
        }
    }

    impl Add for Expansion {
        type Output = Expansion;

        fn add(mut self, rhs: Expansion) -> Expansion {
            for (m, c) in rhs.terms {
                let e = self.terms.entry(m).or_insert(0);
                *e += c;
            }
            self.terms.retain(|_, c| *c != 0);
            self
        }
    }

    impl Mul for Expansion {
        type Output = Expansion;

        fn mul(self, rhs: Expansion) -> Expansion {
            let mut out = Expansion::default();
            for (ma, ca) in &self.terms {
                for (mb, cb) in &rhs.terms {
                    let mut m = ma.clone();
                    m.extend_from_slice(mb);
                    m.sort_unstable();
                    *out.terms.entry(m).or_insert(0) += ca * cb;
                }
            }
            out.terms.retain(|_, c| *c != 0);
            out
        }
    }

    impl Zero for Expansion {
        fn zero() -> Self {
            Expansion::default()
        }

        fn is_zero(&self) -> bool {
            self.terms.is_empty()
        }
    }

    impl One for Expansion {
        fn one() -> Self {
            let mut terms = BTreeMap::new();
            terms.insert(Vec::new(), 1);
            Expansion { terms }
        }
    }

    /// Symbolic form of `𝓜^(k,0)` on one path.
    #[derive(Clone, Debug)]
    pub struct KernelExpansion {
        pub k: usize,
        /// `𝓜^(k,0)`.
        pub total: Expansion,
        /// `𝓜scr^(k),[j]` for `j = 0..k-1` (empty for `k = 1`).
        pub by_column: Vec<Expansion>,
    }

    /// Runs the kernel recurrence up to depth `k` over formal factors.
    pub fn kernel_expansion(k: usize) -> KernelExpansion {
        assert!(k >= 1);
        let f = |j1: usize| move |j2: usize| Expansion::factor(Factor::F(j1, j2));
        let shaded = |j1: usize| move |j2: usize| Expansion::factor(Factor::Shaded(j1, j2));

        let mut mcal = Expansion::factor(Factor::A(1));
        let mut scalars: Vec<Expansion> = Vec::new();
        for depth in 1..k {
            let shared = if depth == 1 {
                vec![mcal.clone()]
            } else {
                let mut buf = scalars.clone();
                buf.push(Expansion::zero());
                fold_scalars(&mut buf, f(depth), shaded(depth));
                buf
            };
            let mut child = vec![Expansion::zero(); depth];
            expand_scalars(
                &shared,
                Expansion::factor(Factor::A(depth + 1)),
                f(depth + 1),
                &mut child,
            );
            mcal = kernel_term(&child, shaded(depth + 1));
            scalars = child;
        }
        KernelExpansion {
            k,
            total: mcal,
            by_column: scalars,
        }
    }
}

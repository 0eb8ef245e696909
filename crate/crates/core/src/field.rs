use serde::Serialize;

/// Dense `n_x` x `n_t` matrix stored so that one time level (all cells at a
/// fixed step) is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2<T> {
    n_x: usize,
    n_t: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Field2<T> {
    pub fn zeros(n_x: usize, n_t: usize) -> Self {
        Field2 {
            n_x,
            n_t,
            data: vec![T::default(); n_x * n_t],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        debug_assert!(i < self.n_x && j < self.n_t);
        self.data[j * self.n_x + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.n_x && j < self.n_t);
        self.data[j * self.n_x + i] = v;
    }

    /// All cells at time level `j`.
    pub fn time_slice(&self, j: usize) -> &[T] {
        &self.data[j * self.n_x..(j + 1) * self.n_x]
    }

    pub fn time_slice_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.n_x..(j + 1) * self.n_x]
    }

    /// Two adjacent time levels, `j` immutable and `j + 1` mutable, for
    /// move-from/deposit-into access within one step.
    pub fn step_pair(&mut self, j: usize) -> (&[T], &mut [T]) {
        let (a, b) = self.data.split_at_mut((j + 1) * self.n_x);
        (&a[j * self.n_x..], &mut b[..self.n_x])
    }

    /// One cell across all time levels.
    pub fn cell_series(&self, i: usize) -> Vec<T> {
        (0..self.n_t).map(|j| self.at(i, j)).collect()
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Copy of the first `keep` time levels (for runs that stop early).
    pub fn truncate_time(&self, keep: usize) -> Self {
        debug_assert!(keep <= self.n_t);
        Field2 {
            n_x: self.n_x,
            n_t: keep,
            data: self.data[..keep * self.n_x].to_vec(),
        }
    }
}

impl Field2<i64> {
    /// Scales integer walker counts into temperatures `count / n`.
    pub fn to_temperatures(&self, n: u32) -> Field2<f64> {
        let inv = 1.0 / n as f64;
        Field2 {
            n_x: self.n_x,
            n_t: self.n_t,
            data: self.data.iter().map(|&c| c as f64 * inv).collect(),
        }
    }

    pub fn total_at(&self, j: usize) -> i64 {
        self.time_slice(j).iter().sum()
    }
}

/// Signed walker counts on the lattice. One walker is `1/n` of a degree, so
/// `counts.at(i, j) / n` reads as the temperature at `(x_i, t_j)`; negative
/// counts represent temperatures below the melting point.
#[derive(Debug, Clone)]
pub struct WalkerField {
    pub counts: Field2<i64>,
    /// Walkers per degree.
    pub n: u32,
}

impl WalkerField {
    pub fn zeros(n_x: usize, n_t: usize, n: u32) -> Self {
        WalkerField {
            counts: Field2::zeros(n_x, n_t),
            n,
        }
    }

    pub fn temperature(&self, i: usize, j: usize) -> f64 {
        self.counts.at(i, j) as f64 / self.n as f64
    }
}

/// Melting-front position tracker with exact integer bookkeeping.
///
/// The front starts one cell in (`s(0) = dx`) and every absorbed walker
/// moves it by exactly `ds` (sign of the walker). Internally the position
/// is `dx + k * ds` for an integer `k`, so the net displacement is an exact
/// function of the absorption tallies: retreats below `dx` clamp `k` back
/// to zero and are counted, giving
/// `s_final - dx == (absorbed_pos - absorbed_neg + clamp_events) * ds`
/// bit-for-bit.
#[derive(Debug, Clone)]
pub struct FrontState {
    dx: f64,
    /// Displacement per absorbed walker, `(c / l) * dx / n`.
    ds: f64,
    /// Net absorbed-walker count after clamping.
    k: i64,
    /// Front cell index `floor(s / dx)`.
    cell: usize,
    pub absorbed_pos: u64,
    pub absorbed_neg: u64,
    pub clamp_events: u64,
    /// `s` at the start of each executed step.
    pub trajectory: Vec<f64>,
}

impl FrontState {
    pub fn new(dx: f64, ds: f64) -> Self {
        FrontState {
            dx,
            ds,
            k: 0,
            cell: 1,
            absorbed_pos: 0,
            absorbed_neg: 0,
            clamp_events: 0,
            trajectory: Vec::new(),
        }
    }

    /// Current front position `s = dx + k * ds`.
    #[inline]
    pub fn s(&self) -> f64 {
        self.dx + self.k as f64 * self.ds
    }

    /// Current front cell index `floor(s / dx)`.
    #[inline]
    pub fn cell(&self) -> usize {
        self.cell
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }

    /// Absorbs one walker of the given sign, moving the front immediately.
    /// Retreats that would drop `s` below one cell clamp to `s = dx`.
    #[inline]
    pub fn absorb(&mut self, sign: i64) {
        if sign >= 0 {
            self.absorbed_pos += 1;
            self.k += 1;
        } else {
            self.absorbed_neg += 1;
            self.k -= 1;
            if self.k < 0 {
                self.k = 0;
                self.clamp_events += 1;
            }
        }
        self.cell = (self.s() / self.dx) as usize;
    }

    pub fn record(&mut self) {
        self.trajectory.push(self.s());
    }

    /// Exact displacement identity: the position recomputed from the
    /// absorption tallies alone. Equals `s()` bitwise.
    pub fn s_from_ledger(&self) -> f64 {
        let net = self.absorbed_pos as i64 - self.absorbed_neg as i64 + self.clamp_events as i64;
        self.dx + net as f64 * self.ds
    }
}

/// Exact integer accounting of every walker that entered a run.
///
/// Signed categories sum walker signs (a negative walker contributes -1);
/// the two front categories count events of each sign separately. The
/// balance holds exactly:
/// `injected == in_field + (absorbed_front_pos - absorbed_front_neg)
///            + absorbed_fixed + discarded_solid`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WalkerLedger {
    /// Signed sum of all seeded cells and boundary-cell writes.
    pub injected: i64,
    /// Signed sum of the final time level (walkers that never moved again).
    pub in_field: i64,
    /// Positive walkers absorbed by the melting front (each advanced it).
    pub absorbed_front_pos: u64,
    /// Negative walkers absorbed by the melting front (each retreated it).
    pub absorbed_front_neg: u64,
    /// Signed sum of walkers that left through fixed absorbing boundaries.
    pub absorbed_fixed: i64,
    /// Signed sum of walkers stranded beyond the front by a retreat and then
    /// lost by stepping deeper into the solid.
    pub discarded_solid: i64,
    /// Retreats clamped at the minimum front position `s = dx`.
    pub clamp_events: u64,
}

impl WalkerLedger {
    /// Exact conservation check.
    pub fn balances(&self) -> bool {
        self.injected
            == self.in_field
                + (self.absorbed_front_pos as i64 - self.absorbed_front_neg as i64)
                + self.absorbed_fixed
                + self.discarded_solid
    }
}

/// Front trajectory as parallel time/position vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontCurve {
    pub ts: Vec<f64>,
    pub s: Vec<f64>,
}

/// How and with what inputs a solution was produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub solver: String,
    pub seed: u64,
    /// Walkers per degree (0 for non-walk solvers).
    pub n: u32,
    pub dx: f64,
    pub dt: f64,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub driver: String,
    pub workers: usize,
    /// Random generator and stream-assignment rule.
    pub rng: String,
    pub runtime_s: f64,
    /// True if the run stopped before `t_max` because the front reached the
    /// end of the domain.
    pub truncated: bool,
    pub truncated_at_step: Option<usize>,
    pub clamp_events: u64,
}

impl RunMetadata {
    pub fn placeholder(solver: &str) -> Self {
        RunMetadata {
            solver: solver.to_string(),
            seed: 0,
            n: 0,
            dx: 0.0,
            dt: 0.0,
            alpha: 0.0,
            beta: None,
            driver: String::new(),
            workers: 1,
            rng: String::new(),
            runtime_s: 0.0,
            truncated: false,
            truncated_at_step: None,
            clamp_events: 0,
        }
    }
}

/// A computed temperature field with optional front trajectory.
#[derive(Debug, Clone)]
pub struct SolutionField {
    /// Node coordinates for the rows of `temperatures`.
    pub xs: Vec<f64>,
    /// Time coordinates for the columns of `temperatures`.
    pub ts: Vec<f64>,
    pub temperatures: Field2<f64>,
    pub front: Option<FrontCurve>,
    pub metadata: RunMetadata,
}

impl SolutionField {
    /// Temperature at the node nearest `x` and the recorded time nearest `t`.
    pub fn sample(&self, x: f64, t: f64) -> f64 {
        let i = nearest_index(&self.xs, x);
        let j = nearest_index(&self.ts, t);
        self.temperatures.at(i, j)
    }

    /// Cross-section (all nodes) at the recorded time nearest `t`.
    pub fn cross_section(&self, t: f64) -> (f64, &[f64]) {
        let j = nearest_index(&self.ts, t);
        (self.ts[j], self.temperatures.time_slice(j))
    }
}

pub(crate) fn nearest_index(coords: &[f64], v: f64) -> usize {
    debug_assert!(!coords.is_empty());
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &c) in coords.iter().enumerate() {
        let d = (c - v).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

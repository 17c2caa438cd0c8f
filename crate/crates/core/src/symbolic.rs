//! Subshifts of finite type: transition systems, bi-infinite points,
//! periodic orbits and embedding checks.
//!
//! Symbols are `0..alphabet_size`. Forbidden words have length two, so a
//! subshift is fully described by its 0/1 transition matrix.

use crate::error::{Error, Result};

pub type Symbol = usize;

/// An SFT given by an alphabet and an allowed-transition matrix.
///
/// Symbols with no outgoing or no incoming allowed transition cannot occur
/// in any bi-infinite admissible sequence; they are pruned at construction
/// (their rows and columns are cleared) and reported in `pruned_symbols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    alphabet_size: usize,
    transitions: Vec<bool>,
    alive: Vec<bool>,
    pruned_symbols: Vec<Symbol>,
}

impl TransitionSystem {
    /// Build a system from a row-major matrix. Dead symbols are pruned
    /// iteratively; an empty pruned system (no cycle at all) is rejected.
    pub fn new(alphabet_size: usize, transitions: Vec<bool>) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::Input("alphabet must be nonempty".into()));
        }
        if transitions.len() != alphabet_size * alphabet_size {
            return Err(Error::Input(format!(
                "transition matrix must have {} entries, got {}",
                alphabet_size * alphabet_size,
                transitions.len()
            )));
        }
        let mut m = transitions;
        let mut alive = vec![true; alphabet_size];
        let mut pruned = Vec::new();
        loop {
            let mut changed = false;
            for s in 0..alphabet_size {
                if !alive[s] {
                    continue;
                }
                let has_out = (0..alphabet_size).any(|t| m[s * alphabet_size + t]);
                let has_in = (0..alphabet_size).any(|t| m[t * alphabet_size + s]);
                if !has_out || !has_in {
                    alive[s] = false;
                    pruned.push(s);
                    for t in 0..alphabet_size {
                        m[s * alphabet_size + t] = false;
                        m[t * alphabet_size + s] = false;
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if alive.iter().all(|a| !a) {
            return Err(Error::Validation(
                "transition system is empty: no cycle exists".into(),
            ));
        }
        pruned.sort_unstable();
        Ok(Self {
            alphabet_size,
            transitions: m,
            alive,
            pruned_symbols: pruned,
        })
    }

    /// Full shift on `n` symbols.
    pub fn full_shift(n: usize) -> Self {
        Self::new(n, vec![true; n * n]).expect("full shift is valid")
    }

    /// Golden-mean shift on two symbols: word `11` forbidden on symbol 1.
    pub fn golden_mean() -> Self {
        Self::new(2, vec![true, true, true, false]).expect("golden mean is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn pruned_symbols(&self) -> &[Symbol] {
        &self.pruned_symbols
    }

    pub fn is_alive(&self, s: Symbol) -> bool {
        self.alive[s]
    }

    /// Is the transition `a -> b` allowed?
    pub fn allowed(&self, a: Symbol, b: Symbol) -> bool {
        self.transitions[a * self.alphabet_size + b]
    }

    fn check_symbol(&self, s: Symbol) -> Result<()> {
        if s >= self.alphabet_size {
            return Err(Error::Input(format!(
                "symbol {s} out of range for alphabet of size {}",
                self.alphabet_size
            )));
        }
        Ok(())
    }

    /// True iff every adjacent pair of `w` is an allowed transition.
    pub fn validate_word(&self, w: &[Symbol]) -> Result<bool> {
        for &s in w {
            self.check_symbol(s)?;
        }
        Ok(w.windows(2).all(|p| self.allowed(p[0], p[1])))
    }

    /// Strong connectivity of the transition graph restricted to live symbols.
    pub fn is_transitive(&self) -> bool {
        let live: Vec<Symbol> = (0..self.alphabet_size).filter(|&s| self.alive[s]).collect();
        if live.is_empty() {
            return false;
        }
        let reach = |from: Symbol, rev: bool| -> Vec<bool> {
            let mut seen = vec![false; self.alphabet_size];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(s) = stack.pop() {
                for &t in &live {
                    let edge = if rev {
                        self.allowed(t, s)
                    } else {
                        self.allowed(s, t)
                    };
                    if edge && !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
            seen
        };
        let fwd = reach(live[0], false);
        let bwd = reach(live[0], true);
        live.iter().all(|&s| fwd[s] && bwd[s])
    }

    /// D-sets of each symbol (allowed successors) and the chain-connectivity
    /// condition: every pair of symbols is linked by a chain of pairwise
    /// intersecting D-sets.
    pub fn d_sets_and_connectivity(&self) -> (Vec<Vec<Symbol>>, bool) {
        let n = self.alphabet_size;
        let d_sets: Vec<Vec<Symbol>> = (0..n)
            .map(|j0| (0..n).filter(|&j| self.allowed(j0, j)).collect())
            .collect();
        let live: Vec<Symbol> = (0..n).filter(|&s| self.alive[s]).collect();
        // Union-find over symbols: merge all members of each D-set, and merge
        // D-sets that intersect (shared members do both transitively).
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for d in &d_sets {
            for w in d.windows(2) {
                let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[a] = b;
            }
        }
        // Chains j_1..j_k also pass through the owning symbols' sets only via
        // membership, so connectivity is: all live symbols in one class.
        let connected = !live.is_empty() && {
            let root = find(&mut parent, live[0]);
            live.iter().all(|&s| find(&mut parent, s) == root)
        };
        (d_sets, connected)
    }

    /// All primitive periodic orbits of period `<= max_period`, canonical and
    /// sorted by `(period, word)`. Aborts when more than `cap` orbits appear.
    pub fn enumerate_periodic_orbits_capped(
        &self,
        max_period: usize,
        cap: usize,
    ) -> Result<Vec<PeriodicOrbit>> {
        if max_period < 1 {
            return Err(Error::Input("max_period must be >= 1".into()));
        }
        let mut orbits = Vec::new();
        let mut word = Vec::with_capacity(max_period);
        for start in 0..self.alphabet_size {
            if !self.alive[start] {
                continue;
            }
            word.push(start);
            self.orbit_dfs(start, max_period, cap, &mut word, &mut orbits)?;
            word.pop();
        }
        orbits.sort_by(|a, b| {
            (a.period(), a.word()).cmp(&(b.period(), b.word()))
        });
        Ok(orbits)
    }

    pub fn enumerate_periodic_orbits(&self, max_period: usize) -> Result<Vec<PeriodicOrbit>> {
        self.enumerate_periodic_orbits_capped(max_period, DEFAULT_ORBIT_CAP)
    }

    fn orbit_dfs(
        &self,
        start: Symbol,
        max_period: usize,
        cap: usize,
        word: &mut Vec<Symbol>,
        out: &mut Vec<PeriodicOrbit>,
    ) -> Result<()> {
        let last = *word.last().unwrap();
        if self.allowed(last, start) {
            // Keeping only words that start with their minimal symbol and are
            // the least rotation avoids rotation duplicates up front.
            if word[0] == *word.iter().min().unwrap() {
                if let Some(orbit) = PeriodicOrbit::from_canonical_candidate(word) {
                    if out.len() >= cap {
                        return Err(Error::Resource(format!(
                            "periodic orbit count exceeds cap {cap}"
                        )));
                    }
                    out.push(orbit);
                }
            }
        }
        if word.len() == max_period {
            return Ok(());
        }
        for next in start..self.alphabet_size {
            // Symbols below the start cannot appear in a canonical word
            // starting at `start`.
            if self.alive[next] && self.allowed(last, next) {
                word.push(next);
                self.orbit_dfs(start, max_period, cap, word, out)?;
                word.pop();
            }
        }
        Ok(())
    }
}

pub const DEFAULT_ORBIT_CAP: usize = 2_000_000;

/// A primitive cyclic word in canonical (lexicographically least) rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicOrbit {
    word: Vec<Symbol>,
}

impl PeriodicOrbit {
    /// Canonicalize an arbitrary admissible cyclic word; `None` if it is a
    /// power of a shorter word.
    pub fn new(word: &[Symbol]) -> Option<Self> {
        if word.is_empty() || !is_primitive(word) {
            return None;
        }
        Some(Self {
            word: least_rotation(word),
        })
    }

    /// Accept `word` only if already in canonical rotation (and primitive).
    fn from_canonical_candidate(word: &[Symbol]) -> Option<Self> {
        if !is_primitive(word) {
            return None;
        }
        let canon = least_rotation(word);
        if canon == *word {
            Some(Self { word: canon })
        } else {
            None
        }
    }

    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    /// Symbol at coordinate `n` of the associated bi-infinite periodic point
    /// (coordinate 0 carries `word[0]`).
    pub fn symbol_at(&self, n: i64) -> Symbol {
        let p = self.word.len() as i64;
        self.word[(n.rem_euclid(p)) as usize]
    }

    /// Cyclic rotation by `k`: the orbit point `T^k p` (same orbit, shifted
    /// coordinates), returned as a raw word aligned at coordinate 0.
    pub fn rotated_word(&self, k: usize) -> Vec<Symbol> {
        let n = self.word.len();
        (0..n).map(|i| self.word[(i + k) % n]).collect()
    }

    /// The periodic point as a `SymbolicPoint`.
    pub fn point(&self) -> SymbolicPoint {
        SymbolicPoint::periodic(&self.word)
    }
}

fn is_primitive(word: &[Symbol]) -> bool {
    let n = word.len();
    for d in 1..n {
        if n % d == 0 && (0..n).all(|i| word[i] == word[i % d]) {
            return false;
        }
    }
    true
}

/// Booth-style least rotation (quadratic scan is fine at these lengths).
fn least_rotation(word: &[Symbol]) -> Vec<Symbol> {
    let n = word.len();
    let mut best = 0;
    for k in 1..n {
        for i in 0..n {
            let a = word[(k + i) % n];
            let b = word[(best + i) % n];
            if a != b {
                if a < b {
                    best = k;
                }
                break;
            }
        }
    }
    (0..n).map(|i| word[(best + i) % n]).collect()
}

/// An eventually periodic two-sided point: `left_cycle` repeated toward
/// `-inf`, then `core` on `[core_lo, core_lo + core.len())`, then
/// `right_cycle` repeated toward `+inf`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicPoint {
    left_cycle: Vec<Symbol>,
    core: Vec<Symbol>,
    core_lo: i64,
    right_cycle: Vec<Symbol>,
}

impl SymbolicPoint {
    pub fn new(
        left_cycle: Vec<Symbol>,
        core: Vec<Symbol>,
        core_lo: i64,
        right_cycle: Vec<Symbol>,
    ) -> Result<Self> {
        if left_cycle.is_empty() || right_cycle.is_empty() {
            return Err(Error::Input("cycles must be nonempty".into()));
        }
        Ok(Self {
            left_cycle,
            core,
            core_lo,
            right_cycle,
        })
    }

    /// The periodic point `...www.www...` with `word[0]` at coordinate 0.
    pub fn periodic(word: &[Symbol]) -> Self {
        Self {
            left_cycle: word.to_vec(),
            core: word.to_vec(),
            core_lo: 0,
            right_cycle: word.to_vec(),
        }
    }

    pub fn symbol_at(&self, n: i64) -> Symbol {
        let hi = self.core_lo + self.core.len() as i64;
        if n < self.core_lo {
            // left cycle laid out so its last element sits at core_lo - 1
            let len = self.left_cycle.len() as i64;
            let off = (n - self.core_lo).rem_euclid(len);
            self.left_cycle[off as usize]
        } else if n < hi {
            self.core[(n - self.core_lo) as usize]
        } else {
            let len = self.right_cycle.len() as i64;
            self.right_cycle[((n - hi).rem_euclid(len)) as usize]
        }
    }

    /// Window `[lo, hi]` inclusive as a finite word.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        (lo..=hi).map(|n| self.symbol_at(n)).collect()
    }

    /// The shifted point `T^k ω` with `(T^k ω)_n = ω_{n+k}`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            left_cycle: self.left_cycle.clone(),
            core: self.core.clone(),
            core_lo: self.core_lo - k,
            right_cycle: self.right_cycle.clone(),
        }
    }

    /// Check all seams and cycles against the transition matrix.
    pub fn validate(&self, system: &TransitionSystem) -> Result<bool> {
        let lo = self.core_lo - 2 * self.left_cycle.len() as i64 - 2;
        let hi = self.core_lo + self.core.len() as i64 + 2 * self.right_cycle.len() as i64 + 2;
        system.validate_word(&self.window(lo, hi))
    }

    /// Do the two points agree on `n >= 0` (stable) resp. `n <= 0` (unstable)?
    pub fn same_future(&self, other: &Self) -> bool {
        self.right_cycle_agrees(other) && {
            let hi = self.tail_start().max(other.tail_start());
            (0..=hi).all(|n| self.symbol_at(n) == other.symbol_at(n))
        }
    }

    pub fn same_past(&self, other: &Self) -> bool {
        self.left_cycle_agrees(other) && {
            let lo = self.head_end().min(other.head_end());
            (lo..=0).all(|n| self.symbol_at(n) == other.symbol_at(n))
        }
    }

    fn tail_start(&self) -> i64 {
        self.core_lo + self.core.len() as i64 + self.right_cycle.len() as i64
    }

    fn head_end(&self) -> i64 {
        self.core_lo - self.left_cycle.len() as i64
    }

    fn right_cycle_agrees(&self, other: &Self) -> bool {
        let n = lcm(self.right_cycle.len(), other.right_cycle.len()) as i64;
        let start = self.tail_start().max(other.tail_start());
        (start..start + n).all(|i| self.symbol_at(i) == other.symbol_at(i))
    }

    fn left_cycle_agrees(&self, other: &Self) -> bool {
        let n = lcm(self.left_cycle.len(), other.left_cycle.len()) as i64;
        let end = self.head_end().min(other.head_end());
        (end - n..end).all(|i| self.symbol_at(i) == other.symbol_at(i))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// The splice `ω ∧ ω'`: equal to `ω` for `n <= 0` and to `ω'` for `n >= 0`.
/// Requires `ω_0 = ω'_0`.
pub fn splice_points(omega: &SymbolicPoint, omega2: &SymbolicPoint) -> Result<SymbolicPoint> {
    if omega.symbol_at(0) != omega2.symbol_at(0) {
        return Err(Error::Domain(format!(
            "splice requires matching symbol at 0: {} vs {}",
            omega.symbol_at(0),
            omega2.symbol_at(0)
        )));
    }
    // The core must extend far enough that both cycles resume at phase zero:
    // lo ≡ ω.core_lo (mod left length), hi + 1 ≡ ω'.tail start (mod right
    // length).
    let left_len = omega.left_cycle.len() as i64;
    let lo0 = omega.core_lo.min(0);
    let d = omega.core_lo - lo0;
    let lo = omega.core_lo - (d + left_len - 1) / left_len * left_len;
    let right_len = omega2.right_cycle.len() as i64;
    let tail_base = omega2.core_lo + omega2.core.len() as i64;
    let base = (tail_base - 1).max(-1);
    let hi = base + (tail_base - (base + 1)).rem_euclid(right_len);
    let mut core = omega.window(lo, -1);
    core.extend(omega2.window(0, hi));
    SymbolicPoint::new(
        omega.left_cycle.clone(),
        core,
        lo,
        omega2.right_cycle.clone(),
    )
}

/// A claimed inclusion of one SFT into another over the same alphabet
/// indexing (the sub-system simply allows fewer transitions).
#[derive(Debug, Clone)]
pub struct SubshiftEmbedding {
    pub sub: TransitionSystem,
    pub super_sys: TransitionSystem,
}

impl SubshiftEmbedding {
    pub fn is_valid(&self) -> bool {
        if self.sub.alphabet_size() > self.super_sys.alphabet_size() {
            return false;
        }
        let n = self.sub.alphabet_size();
        for i in 0..n {
            for j in 0..n {
                if self.sub.allowed(i, j) && !self.super_sys.allowed(i, j) {
                    return false;
                }
            }
        }
        // TransitionSystem construction already guarantees nonemptiness.
        true
    }
}

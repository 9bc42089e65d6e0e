//! Coset enumeration for the trivial subgroup, HLT strategy with lookahead.
//!
//! Words use letters `±(g + 1)` for generator `g`.

use serde::Serialize;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetTable {
    pub generators: usize,
    /// `rows[c][2g]` is `c·g`, `rows[c][2g + 1]` is `c·g⁻¹`.
    pub rows: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.rows.len()
    }

    /// Complete, consistent, and every relator fixes every coset.
    pub fn verify(&self, relators: &[Vec<i32>]) -> bool {
        let n = self.rows.len();
        for (c, row) in self.rows.iter().enumerate() {
            if row.len() != 2 * self.generators {
                return false;
            }
            for (x, &d) in row.iter().enumerate() {
                if d >= n || self.rows[d][x ^ 1] != c {
                    return false;
                }
            }
        }
        (0..n).all(|c| {
            relators.iter().all(|r| {
                let end = r.iter().fold(c, |d, &x| self.rows[d][col(x)]);
                end == c
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetOutcome {
    Complete(CosetTable),
    /// The budget on simultaneously defined cosets was exhausted.
    BudgetExhausted {
        defined: usize,
    },
}

fn col(x: i32) -> usize {
    debug_assert!(x != 0);
    if x > 0 {
        2 * (x as usize - 1)
    } else {
        2 * ((-x) as usize - 1) + 1
    }
}

struct Full;

struct Enumerator {
    cols: usize,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    budget: usize,
    defined: usize,
}

impl Enumerator {
    fn live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<(), Full> {
        if self.table.len() >= self.budget {
            return Err(Full);
        }
        let n = self.table.len();
        self.table.push(vec![NONE; self.cols]);
        self.parent.push(n);
        self.table[c][x] = n;
        self.table[n][x ^ 1] = c;
        self.defined += 1;
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = c;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k == l {
            return;
        }
        let (m, n) = (k.min(l), k.max(l));
        self.parent[n] = m;
        queue.push(n);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                self.table[f][x ^ 1] = NONE;
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][x ^ 1] != NONE {
                    let t = self.table[f1][x ^ 1];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][x ^ 1] = e1;
                }
            }
        }
    }

    /// Scans `w` at `c`, defining new cosets when `fill` is set.
    fn scan(&mut self, c: usize, w: &[usize], fill: bool) -> Result<(), Full> {
        if w.is_empty() {
            return Ok(());
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, w.len() as isize - 1);
        loop {
            while (i as isize) <= j && self.table[f][w[i]] != NONE {
                f = self.table[f][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.table[b][w[j as usize] ^ 1] != NONE {
                b = self.table[b][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.table[f][w[i]] = b;
                self.table[b][w[i] ^ 1] = f;
                return Ok(());
            }
            if !fill {
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    /// Renumbers live cosets in order. Returns the new id of `c` (or of the
    /// next live coset after it).
    fn compact(&mut self, c: usize) -> usize {
        let n = self.table.len();
        let mut new = vec![NONE; n];
        let mut count = 0;
        let mut c_new = NONE;
        for i in 0..n {
            if i >= c && c_new == NONE && self.live(i) {
                c_new = count;
            }
            if self.live(i) {
                new[i] = count;
                count += 1;
            }
        }
        let reps: Vec<usize> = (0..n).map(|i| self.rep(i)).collect();
        let mut table = Vec::with_capacity(count);
        for i in 0..n {
            if self.live(i) {
                table.push(
                    self.table[i]
                        .iter()
                        .map(|&d| if d == NONE { NONE } else { new[reps[d]] })
                        .collect(),
                );
            }
        }
        self.table = table;
        self.parent = (0..count).collect();
        if c_new == NONE {
            count
        } else {
            c_new
        }
    }
}

/// Enumerates cosets of the trivial subgroup in `⟨generators | relators⟩`,
/// holding at most `budget` cosets at once.
pub fn enumerate_cosets(generators: usize, relators: &[Vec<i32>], budget: usize) -> CosetOutcome {
    let rels: Vec<Vec<usize>> = relators
        .iter()
        .map(|r| r.iter().map(|&x| col(x)).collect())
        .collect();
    let cols = 2 * generators;
    let mut en = Enumerator {
        cols,
        table: vec![vec![NONE; cols]],
        parent: vec![0],
        budget: budget.max(1),
        defined: 1,
    };
    let mut c = 0;
    while c < en.table.len() {
        if !en.live(c) {
            c += 1;
            continue;
        }
        let mut full = false;
        for r in &rels {
            if !en.live(c) {
                break;
            }
            if en.scan(c, r, true).is_err() {
                full = true;
                break;
            }
        }
        if !full && en.live(c) {
            for x in 0..cols {
                if en.table[c][x] == NONE && en.define(c, x).is_err() {
                    full = true;
                    break;
                }
            }
        }
        if full {
            // Lookahead: scan every live coset without defining.
            for d in 0..en.table.len() {
                for r in &rels {
                    if !en.live(d) {
                        break;
                    }
                    let _ = en.scan(d, r, false);
                }
            }
            let before = en.table.len();
            c = en.compact(c);
            if en.table.len() >= before {
                return CosetOutcome::BudgetExhausted {
                    defined: en.defined,
                };
            }
            continue;
        }
        c += 1;
    }
    let _ = en.compact(0);
    CosetOutcome::Complete(CosetTable {
        generators,
        rows: en.table,
    })
}

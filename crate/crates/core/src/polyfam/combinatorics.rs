use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Pascal row `[C(n,0), ..., C(n,n)]`.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for i in 0..n {
        c = c * (n - i) / (i + 1);
        row.push(c.clone());
    }
    row
}

/// x(x-1)...(x-j+1), and 1 for j = 0.
pub fn falling_factorial<T: Scalar>(x: &T, j: usize) -> T {
    let mut acc = T::one();
    let mut cur = x.clone();
    for _ in 0..j {
        acc = acc * cur.clone();
        cur = cur - T::one();
    }
    acc
}

/// Triangular table of Stirling numbers of the second kind S(j,s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StirlingTable {
    rows: Vec<Vec<BigInt>>,
}

impl StirlingTable {
    pub fn new(max_j: usize) -> Self {
        let mut t = StirlingTable { rows: vec![vec![BigInt::one()]] };
        t.extend_to(max_j);
        t
    }

    fn extend_to(&mut self, max_j: usize) {
        while self.rows.len() <= max_j {
            let prev = self.rows.last().expect("row 0 always present");
            let j = prev.len() - 1;
            let mut row = vec![BigInt::zero(); j + 2];
            for s in 1..=j + 1 {
                let keep = if s <= j { &prev[s] * s } else { BigInt::zero() };
                row[s] = keep + &prev[s - 1];
            }
            self.rows.push(row);
        }
    }

    pub fn max_j(&self) -> usize {
        self.rows.len() - 1
    }

    /// S(j,s); zero for s > j. Panics past `max_j`.
    pub fn get(&self, j: usize, s: usize) -> BigInt {
        assert!(j <= self.max_j(), "Stirling table built only to j = {}", self.max_j());
        self.rows[j].get(s).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn row(&self, j: usize) -> &[BigInt] {
        &self.rows[j]
    }
}

static STIRLING: LazyLock<RwLock<StirlingTable>> = LazyLock::new(|| RwLock::new(StirlingTable::new(16)));

pub fn stirling2(j: usize, s: usize) -> BigInt {
    if s > j {
        return BigInt::zero();
    }
    {
        let t = STIRLING.read().unwrap_or_else(|e| e.into_inner());
        if j <= t.max_j() {
            return t.get(j, s);
        }
    }
    let mut t = STIRLING.write().unwrap_or_else(|e| e.into_inner());
    t.extend_to(j);
    t.get(j, s)
}

// Row k holds b_{k,n} for n = k..=2k-2 (row 1 is the seed b_{1,1} = 1).
static RAMANUJAN_B: LazyLock<RwLock<Vec<Vec<BigInt>>>> =
    LazyLock::new(|| RwLock::new(vec![Vec::new(), vec![BigInt::one()]]));

fn b_lookup(rows: &[Vec<BigInt>], k: usize, n: usize) -> BigInt {
    if n < k {
        return BigInt::zero();
    }
    rows[k].get(n - k).cloned().unwrap_or_else(BigInt::zero)
}

/// Ramanujan's b_{kn}: b_{k,k} = 1, b_{k+1,n+1} = n·b_{k,n-1} + (n-k+1)·b_{k,n},
/// zero outside k ≤ n ≤ 2k-2.
pub fn ramanujan_b(k: i64, n: i64) -> BigInt {
    if k < 1 || n < k {
        return BigInt::zero();
    }
    if k == 1 {
        return if n == 1 { BigInt::one() } else { BigInt::zero() };
    }
    if n > 2 * k - 2 {
        return BigInt::zero();
    }
    let (k, n) = (k as usize, n as usize);
    {
        let rows = RAMANUJAN_B.read().unwrap_or_else(|e| e.into_inner());
        if k < rows.len() {
            return b_lookup(&rows, k, n);
        }
    }
    let mut rows = RAMANUJAN_B.write().unwrap_or_else(|e| e.into_inner());
    while rows.len() <= k {
        let kk = rows.len() - 1;
        let hi = if kk == 1 { 1 } else { 2 * kk - 1 };
        let mut next = Vec::new();
        for m in kk..=hi {
            let a = if m >= 1 { b_lookup(&rows, kk, m - 1) } else { BigInt::zero() };
            let b = b_lookup(&rows, kk, m);
            next.push(a * m + b * (m + 1 - kk));
        }
        rows.push(next);
    }
    b_lookup(&rows, k, n)
}

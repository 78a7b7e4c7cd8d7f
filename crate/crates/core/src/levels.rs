//! Depth-bounded enumeration of fusible numbers.
//!
//! `S_0 = {0}` and `S_{k+1} = S_k ∪ { a ~ b : a, b ∈ S_k, |a - b| < 1 }`.
//! `S_k` is exactly the set of values of valid expressions of depth at most
//! `k`, which makes the levels a ground-truth oracle for membership and
//! successors up to the enumerated depth.
//!
//! Every value in `S_D` has denominator dividing `2^D` and is at most
//! `D/2`, so values are stored as `u128` integers scaled by `2^D`.

use std::collections::HashMap;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{BudgetKind, Error, Result};
use crate::rational::Rational;

pub const DEFAULT_ENUMERATION_CAP: usize = 5_000_000;

/// Largest depth whose scaled values still fit in `u128`.
pub const MAX_DEPTH: u32 = 120;

const ABSENT: u8 = u8::MAX;

/// One row of the levels export.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize)]
pub struct LevelRecord {
    pub value: Rational,
    pub min_depth: u32,
    pub max_depth_observed: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Membership {
    Found(u32),
    /// Not in `S_D`. Says nothing about membership beyond depth `D`.
    NotInLevels,
}

/// The sorted sets `S_0 ⊆ S_1 ⊆ … ⊆ S_D`.
#[derive(Clone, Debug)]
pub struct ValueLevels {
    depth: u32,
    values: Vec<u128>,
    min_depth: Vec<u8>,
    /// `max_depth[k][i]`: deepest presentation of depth `<= k` of value `i`,
    /// or `ABSENT` if the value is not in `S_k`.
    max_depth: Vec<Vec<u8>>,
}

fn fuse_level(vals: &[u128], md: &[u8], one: u128) -> HashMap<u128, u8> {
    (0..vals.len())
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<u128, u8>, i| {
            let a = vals[i];
            let hi = vals.partition_point(|&v| v < a + one);
            for j in i..hi {
                let v = (a + vals[j] + one) >> 1;
                let d = md[i].max(md[j]) + 1;
                let slot = acc.entry(v).or_insert(d);
                if *slot < d {
                    *slot = d;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, std::mem::take(&mut a)) };
            for (v, d) in small {
                let slot = big.entry(v).or_insert(d);
                if *slot < d {
                    *slot = d;
                }
            }
            big
        })
}

impl ValueLevels {
    pub fn enumerate(depth: u32) -> Result<Self> {
        Self::enumerate_with_cap(depth, DEFAULT_ENUMERATION_CAP)
    }

    /// Enumerate to `depth`, failing with `BudgetExceeded(Enumeration)` once
    /// any level holds more than `cap` values.
    pub fn enumerate_with_cap(depth: u32, cap: usize) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::BudgetExceeded(BudgetKind::Enumeration));
        }
        let one = 1u128 << depth;
        let mut vals = vec![0u128];
        let mut md = vec![0u8];
        let mut history: Vec<(Vec<u128>, Vec<u8>)> = Vec::with_capacity(depth as usize + 1);

        for _ in 1..=depth {
            let mut produced = fuse_level(&vals, &md, one);
            for (v, d) in vals.iter().zip(&md) {
                let slot = produced.entry(*v).or_insert(*d);
                if *slot < *d {
                    *slot = *d;
                }
            }
            if produced.len() > cap {
                return Err(Error::BudgetExceeded(BudgetKind::Enumeration));
            }
            let mut next: Vec<(u128, u8)> = produced.into_iter().collect();
            next.sort_unstable_by_key(|&(v, _)| v);
            history.push((std::mem::take(&mut vals), std::mem::take(&mut md)));
            (vals, md) = next.into_iter().unzip();
        }
        history.push((vals, md));

        let (values, top_md) = history.last().cloned().unwrap();
        let n = values.len();
        let mut max_depth = Vec::with_capacity(history.len());
        let mut min_depth = vec![ABSENT; n];
        for (k, (lv, lmd)) in history.iter().enumerate() {
            let mut row = vec![ABSENT; n];
            // Each S_k is a subsequence of S_D, so one forward scan aligns it.
            let mut pos = 0;
            for (v, d) in lv.iter().zip(lmd) {
                while values[pos] != *v {
                    pos += 1;
                }
                row[pos] = *d;
                if min_depth[pos] == ABSENT {
                    min_depth[pos] = k as u8;
                }
            }
            max_depth.push(row);
        }
        debug_assert_eq!(max_depth.last().unwrap(), &top_md);
        Ok(ValueLevels {
            depth,
            values,
            min_depth,
            max_depth,
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `|S_D|`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn to_rational(&self, scaled: u128) -> Rational {
        Rational::dyadic(BigInt::from(scaled), self.depth as i64)
    }

    fn to_scaled(&self, v: &Rational) -> Option<u128> {
        if v.is_negative() {
            return None;
        }
        let k = v.denom_log2()?;
        if k > self.depth as u64 {
            return None;
        }
        let shifted = v.numer() << (self.depth as u64 - k);
        shifted.to_u128()
    }

    pub fn value_at(&self, i: usize) -> Rational {
        self.to_rational(self.values[i])
    }

    pub fn index_of(&self, v: &Rational) -> Option<usize> {
        let s = self.to_scaled(v)?;
        self.values.binary_search(&s).ok()
    }

    /// All of `S_D`, ascending.
    pub fn values(&self) -> impl Iterator<Item = Rational> + '_ {
        self.values.iter().map(|&s| self.to_rational(s))
    }

    /// `S_k`, ascending. Panics if `k > depth`.
    pub fn level(&self, k: u32) -> Vec<Rational> {
        let row = &self.max_depth[k as usize];
        (0..self.len())
            .filter(|&i| row[i] != ABSENT)
            .map(|i| self.value_at(i))
            .collect()
    }

    /// Number of values in `S_k`.
    pub fn level_len(&self, k: u32) -> usize {
        self.max_depth[k as usize].iter().filter(|&&d| d != ABSENT).count()
    }

    /// Values of `S_D` in `[lo, hi)`.
    pub fn range(&self, lo: &Rational, hi: &Rational) -> Vec<Rational> {
        self.values().skip_while(|v| v < lo).take_while(|v| v < hi).collect()
    }

    pub fn min_depth(&self, v: &Rational) -> Option<u32> {
        self.index_of(v).map(|i| self.min_depth[i] as u32)
    }

    /// Deepest presentation of `v` among expressions of depth `<= k`.
    pub fn max_depth_at(&self, v: &Rational, k: u32) -> Option<u32> {
        let i = self.index_of(v)?;
        let d = *self.max_depth.get(k as usize)?.get(i)?;
        (d != ABSENT).then_some(d as u32)
    }

    pub fn max_depth_observed(&self, v: &Rational) -> Option<u32> {
        self.max_depth_at(v, self.depth)
    }

    pub fn contains_at(&self, v: &Rational, k: u32) -> bool {
        self.min_depth(v).is_some_and(|d| d <= k)
    }

    pub fn records(&self) -> Vec<LevelRecord> {
        (0..self.len())
            .map(|i| LevelRecord {
                value: self.value_at(i),
                min_depth: self.min_depth[i] as u32,
                max_depth_observed: self.max_depth[self.depth as usize][i] as u32,
            })
            .collect()
    }

    pub fn membership(&self, v: &Rational) -> Membership {
        match self.min_depth(v) {
            Some(d) => Membership::Found(d),
            None => Membership::NotInLevels,
        }
    }

    /// Least element of `S_D` above `v`.
    ///
    /// Only equals the true successor `s(v)` when `v` has (true) depth at
    /// most `D - 1`; the caller supplies that depth as `certified_depth`.
    pub fn successor(&self, v: &Rational, certified_depth: Option<u32>) -> Result<Rational> {
        let i = match self.index_of(v) {
            Some(i) if self.depth > 0 && (self.min_depth[i] as u32) < self.depth => i,
            _ => return Err(Error::NotPresent(v.clone())),
        };
        match certified_depth {
            Some(d) if d < self.depth => {}
            _ => return Err(Error::Unverifiable(v.clone())),
        }
        self.values
            .get(i + 1)
            .map(|&s| self.to_rational(s))
            .ok_or_else(|| Error::Unverifiable(v.clone()))
    }

    /// CSV with header `value,min_depth,max_depth_observed`, optionally
    /// restricted to `[min, max]`.
    pub fn write_csv<W: Write>(&self, mut w: W, min: Option<&Rational>, max: Option<&Rational>) -> Result<()> {
        writeln!(w, "value,min_depth,max_depth_observed")?;
        for rec in self.records() {
            if min.is_some_and(|m| rec.value < *m) || max.is_some_and(|m| rec.value > *m) {
                continue;
            }
            writeln!(w, "{},{},{}", rec.value, rec.min_depth, rec.max_depth_observed)?;
        }
        Ok(())
    }
}

pub fn enumerate_levels(depth: u32) -> Result<ValueLevels> {
    ValueLevels::enumerate(depth)
}

pub fn successor_in_levels(v: &Rational, lv: &ValueLevels, certified_depth: Option<u32>) -> Result<Rational> {
    lv.successor(v, certified_depth)
}

pub fn membership(v: &Rational, lv: &ValueLevels) -> Membership {
    lv.membership(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::FuseExpr;
    use std::collections::BTreeMap;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    /// Independent oracle: evaluate every tree of depth <= d and keep the
    /// valid values with their max tree depth.
    fn tree_oracle(d: u32) -> BTreeMap<Rational, u32> {
        let mut out = BTreeMap::new();
        for t in FuseExpr::all_up_to_depth(d) {
            if let Ok(v) = t.eval() {
                let e = out.entry(v).or_insert(0);
                *e = (*e).max(t.depth());
            }
        }
        out
    }

    #[test]
    fn small_levels() {
        let lv = enumerate_levels(2).unwrap();
        assert_eq!(lv.level(0), vec![Rational::zero()]);
        assert_eq!(lv.level(1), vec![q("0"), q("1/2")]);
        assert_eq!(lv.level(2), vec![q("0"), q("1/2"), q("3/4"), q("1")]);
    }

    #[test]
    fn levels_match_tree_enumeration() {
        let lv = enumerate_levels(4).unwrap();
        for d in 0..=4 {
            let oracle = tree_oracle(d);
            let got: Vec<Rational> = lv.level(d);
            let want: Vec<Rational> = oracle.keys().cloned().collect();
            assert_eq!(got, want, "level {d}");
            for (v, md) in &oracle {
                assert_eq!(lv.max_depth_at(v, d), Some(*md), "max depth of {v} at level {d}");
            }
        }
    }

    #[test]
    fn below_one_is_one_minus_powers() {
        let lv = enumerate_levels(6).unwrap();
        let below: Vec<Rational> = lv.values().filter(|v| *v < Rational::one()).collect();
        let want: Vec<Rational> = (0..=6).map(|k| Rational::one() - Rational::pow2(-k)).collect();
        assert_eq!(below, want);
    }

    #[test]
    fn successor_examples() {
        let lv = enumerate_levels(4).unwrap();
        assert_eq!(lv.successor(&q("0"), Some(0)).unwrap(), q("1/2"));
        assert_eq!(lv.successor(&q("3/4"), Some(2)).unwrap(), q("7/8"));
        assert_eq!(lv.successor(&q("1"), Some(2)).unwrap(), q("9/8"));
        assert!(matches!(lv.successor(&q("1"), None), Err(Error::Unverifiable(_))));
        assert!(matches!(lv.successor(&q("1"), Some(4)), Err(Error::Unverifiable(_))));
        assert!(matches!(lv.successor(&q("17/16"), Some(1)), Err(Error::NotPresent(_))));
        // 2 first appears at depth 4, so it is not in S_3.
        assert!(matches!(lv.successor(&q("2"), Some(1)), Err(Error::NotPresent(_))));
    }

    #[test]
    fn membership_examples() {
        let lv = enumerate_levels(6).unwrap();
        assert_eq!(lv.membership(&q("9/8")), Membership::Found(3));
        assert_eq!(lv.membership(&q("17/16")), Membership::NotInLevels);
        assert_eq!(lv.membership(&q("2/5")), Membership::NotInLevels);
        assert_eq!(lv.membership(&q("-1/2")), Membership::NotInLevels);
        assert_eq!(lv.membership(&q("1/128")), Membership::NotInLevels);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            ValueLevels::enumerate_with_cap(6, 100),
            Err(Error::BudgetExceeded(BudgetKind::Enumeration))
        ));
        assert!(ValueLevels::enumerate_with_cap(6, 119).is_ok());
    }

    #[test]
    fn level_sizes() {
        let lv = enumerate_levels(8).unwrap();
        let sizes: Vec<usize> = (0..=8).map(|k| lv.level_len(k)).collect();
        assert_eq!(sizes, vec![1, 2, 4, 9, 21, 50, 119, 281, 656]);
    }

    #[test]
    fn csv_export() {
        let lv = enumerate_levels(2).unwrap();
        let mut buf = Vec::new();
        lv.write_csv(&mut buf, None, None).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "value,min_depth,max_depth_observed\n0,0,0\n1/2,1,1\n3/4,2,2\n1,2,2\n"
        );
        let mut buf = Vec::new();
        lv.write_csv(&mut buf, Some(&q("1/2")), Some(&q("3/4"))).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
    }
}

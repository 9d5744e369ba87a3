use crate::error::{domain, Error, Result};

/// Largest n accepted by [`enumerate_set_partitions`].
pub const MAX_SET_PARTITION_N: usize = 12;

/// All set partitions of {0..n-1}, blocks ordered by least element.
///
/// Yields each partition once as a list of blocks (each block sorted), in
/// lexicographic order of restricted growth strings.
pub fn enumerate_set_partitions(n: usize) -> Result<SetPartitions> {
    if n == 0 {
        return domain("set partitions need n ≥ 1");
    }
    if n > MAX_SET_PARTITION_N {
        return Err(Error::Envelope(format!("set partition enumeration capped at n = {MAX_SET_PARTITION_N}, got {n}")));
    }
    Ok(SetPartitions { rgs: vec![0; n], max: vec![0; n], done: false })
}

/// Iterator over set partitions; see [`enumerate_set_partitions`].
#[derive(Debug, Clone)]
pub struct SetPartitions {
    rgs: Vec<usize>,
    // max[i] = max(rgs[0..i]), so rgs[i] ≤ max[i] + 1
    max: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = Vec<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let nblocks = self.rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        let n = self.rgs.len();
        let mut i = n - 1;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            if self.rgs[i] <= self.max[i] {
                self.rgs[i] += 1;
                for k in i + 1..n {
                    self.max[k] = self.max[k - 1].max(self.rgs[k - 1]);
                    self.rgs[k] = 0;
                }
                break;
            }
            i -= 1;
        }
        Some(blocks)
    }
}

/// Bell number B(n) by the Bell triangle.
pub fn bell_number(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            let last = *next.last().unwrap();
            next.push(last + v);
        }
        row = next;
    }
    row[0]
}

/// All compositions (ordered tuples of positive parts) of n.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All integer partitions of n with parts in nonincreasing order.
pub fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=max_part.min(n)).rev() {
            prefix.push(p);
            rec(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_partition_counts() {
        assert_eq!(enumerate_set_partitions(1).unwrap().count(), 1);
        assert_eq!(enumerate_set_partitions(3).unwrap().count(), 5);
        assert_eq!(enumerate_set_partitions(6).unwrap().count(), 203);
        for n in 1..=9 {
            assert_eq!(enumerate_set_partitions(n).unwrap().count() as u128, bell_number(n));
        }
        assert!(enumerate_set_partitions(13).is_err());
    }

    #[test]
    fn set_partitions_are_least_element_ordered_and_distinct() {
        let all: Vec<_> = enumerate_set_partitions(5).unwrap().collect();
        let mut seen = std::collections::BTreeSet::new();
        for p in &all {
            let firsts: Vec<usize> = p.iter().map(|b| b[0]).collect();
            assert!(firsts.windows(2).all(|w| w[0] < w[1]));
            let mut flat: Vec<usize> = p.iter().flatten().copied().collect();
            flat.sort();
            assert_eq!(flat, (0..5).collect::<Vec<_>>());
            assert!(seen.insert(p.clone()));
        }
    }

    #[test]
    fn composition_and_partition_counts() {
        for n in 1..10 {
            assert_eq!(compositions(n).len(), 1 << (n - 1));
        }
        let p: Vec<usize> = (1..=10).map(|n| integer_partitions(n).len()).collect();
        assert_eq!(p, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }
}

//! Set partitions via restricted growth strings.
//!
//! A restricted growth string `a` of length `n` satisfies `a[0] = 0` and
//! `a[i] <= 1 + max(a[..i])`; element `i` lies in block `a[i]`.

/// Bell numbers `B(0..=25)` fit in a `u64`.
pub fn bell(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Iterator over restricted growth strings of a fixed length.
#[derive(Debug, Clone)]
pub struct RestrictedGrowth {
    labels: Vec<u8>,
    // prefix maxima: max_prefix[i] = max(labels[..=i])
    max_prefix: Vec<u8>,
    started: bool,
    done: bool,
}

impl RestrictedGrowth {
    pub fn new(n: usize) -> Self {
        assert!(n < 256, "partition size limited to 255 elements");
        Self {
            labels: vec![0; n],
            max_prefix: vec![0; n],
            started: false,
            done: false,
        }
    }

    /// Advances to the next string; returns `None` when exhausted.
    pub fn next_labels(&mut self) -> Option<&[u8]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.labels);
        }
        let n = self.labels.len();
        let mut i = n;
        while i > 1 {
            i -= 1;
            if self.labels[i] <= self.max_prefix[i - 1] {
                self.labels[i] += 1;
                self.max_prefix[i] = self.max_prefix[i - 1].max(self.labels[i]);
                for j in (i + 1)..n {
                    self.labels[j] = 0;
                    self.max_prefix[j] = self.max_prefix[i];
                }
                return Some(&self.labels);
            }
        }
        self.done = true;
        None
    }
}

/// A partition of `0..n` into non-empty disjoint blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn from_labels(labels: &[u8]) -> Self {
        let count = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut blocks = vec![Vec::new(); count];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l as usize].push(i);
        }
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Each block as a bitmask over `0..n`.
    pub fn masks(&self) -> Vec<u32> {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0u32, |m, &i| m | (1 << i)))
            .collect()
    }
}

/// All partitions of `0..n` in restricted-growth order.
pub fn set_partitions(n: usize) -> Vec<SetPartition> {
    let mut it = RestrictedGrowth::new(n);
    let mut out = Vec::new();
    while let Some(l) = it.next_labels() {
        out.push(SetPartition::from_labels(l));
    }
    out
}

/// Partitions of `0..n` flattened into block masks, ready for repeated
/// evaluation of partition sums. Element `i` corresponds to bit `i`.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    n: usize,
    // (number of blocks, offset into `masks`)
    entries: Vec<(usize, usize)>,
    masks: Vec<u32>,
}

impl PartitionTable {
    pub fn new(n: usize) -> Self {
        assert!(n <= 31, "mask width");
        let mut entries = Vec::new();
        let mut masks = Vec::new();
        let mut it = RestrictedGrowth::new(n);
        let mut block = vec![0u32; n];
        while let Some(labels) = it.next_labels() {
            block.iter_mut().for_each(|b| *b = 0);
            let mut count = 0;
            for (i, &l) in labels.iter().enumerate() {
                block[l as usize] |= 1 << i;
                count = count.max(l as usize + 1);
            }
            entries.push((count, masks.len()));
            masks.extend_from_slice(&block[..count]);
        }
        Self { n, entries, masks }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Iterates `(block masks)` for every partition.
    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.entries
            .iter()
            .map(move |&(count, off)| &self.masks[off..off + count])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let expected = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for (n, &b) in expected.iter().enumerate() {
            assert_eq!(bell(n), b);
            if n > 0 {
                assert_eq!(set_partitions(n).len() as u64, b);
                assert_eq!(PartitionTable::new(n).len() as u64, b);
            }
        }
    }

    #[test]
    fn partitions_cover_and_are_distinct() {
        let parts = set_partitions(5);
        let mut seen = std::collections::HashSet::new();
        for p in &parts {
            let masks = p.masks();
            let union = masks.iter().fold(0, |a, &m| a | m);
            assert_eq!(union, 0b11111);
            assert_eq!(masks.iter().map(|m| m.count_ones()).sum::<u32>(), 5);
            let mut key = masks.clone();
            key.sort();
            assert!(seen.insert(key));
        }
    }

    #[test]
    fn first_and_last_strings() {
        let mut it = RestrictedGrowth::new(3);
        assert_eq!(it.next_labels().unwrap(), &[0, 0, 0]);
        let mut last = Vec::new();
        while let Some(l) = it.next_labels() {
            last = l.to_vec();
        }
        assert_eq!(last, vec![0, 1, 2]);
    }
}

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
    /// Angular sector of the eigenfunctions (`k` on cones, 0 on the torus).
    pub sector: i64,
}

/// Nondecreasing eigenvalue list, complete below `complete_below`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumList {
    entries: Vec<SpectrumEntry>,
    pub complete_below: f64,
}

impl SpectrumList {
    pub fn new(mut entries: Vec<SpectrumEntry>, complete_below: f64) -> Result<Self> {
        if let Some(e) = entries
            .iter()
            .find(|e| e.multiplicity == 0 || !e.value.is_finite())
        {
            return Err(Error::Config(format!("invalid spectrum entry {e:?}")));
        }
        entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.sector.cmp(&b.sector)));
        Ok(Self {
            entries,
            complete_below,
        })
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total count with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Each eigenvalue repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat(e.value).take(e.multiplicity))
            .collect()
    }

    /// Eigenvalue count (with multiplicity) in `(-∞, t]`.
    pub fn counting(&self, t: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| e.value <= t)
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Distinct values with summed multiplicity; values within `tol` merge.
    pub fn distinct(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for e in &self.entries {
            match out.last_mut() {
                Some(last) if (e.value - last.0).abs() <= tol * (1.0 + e.value.abs()) => {
                    last.1 += e.multiplicity
                }
                _ => out.push((e.value, e.multiplicity)),
            }
        }
        out
    }

    pub fn merged(&self, other: &SpectrumList) -> SpectrumList {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        SpectrumList::new(entries, self.complete_below.min(other.complete_below))
            .expect("valid inputs")
    }

    /// `eigenvalue,multiplicity,channel` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eigenvalue,multiplicity,channel\n");
        for e in &self.entries {
            let _ = writeln!(s, "{:.16e},{},{}", e.value, e.multiplicity, e.sector);
        }
        s
    }

    /// Parses the [`to_csv`](Self::to_csv) format; the channel column is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("eigenvalue") {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad =
                |what: &str| Error::Config(format!("line {}: bad {what}: {line}", lineno + 1));
            let value: f64 = f
                .first()
                .ok_or_else(|| bad("row"))?
                .parse()
                .map_err(|_| bad("eigenvalue"))?;
            let multiplicity: usize = match f.get(1) {
                Some(m) => m.parse().map_err(|_| bad("multiplicity"))?,
                None => 1,
            };
            let sector: i64 = match f.get(2) {
                Some(k) => k.parse().map_err(|_| bad("channel"))?,
                None => 0,
            };
            entries.push(SpectrumEntry {
                value,
                multiplicity,
                sector,
            });
        }
        let top = entries
            .iter()
            .map(|e| e.value)
            .fold(f64::NEG_INFINITY, f64::max);
        SpectrumList::new(entries, top)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(value: f64, multiplicity: usize, sector: i64) -> SpectrumEntry {
        SpectrumEntry {
            value,
            multiplicity,
            sector,
        }
    }

    #[test]
    fn sorted_and_counted() {
        let s = SpectrumList::new(vec![e(3.0, 1, 0), e(1.0, 2, 1)], 5.0).unwrap();
        assert_eq!(s.entries()[0].value, 1.0);
        assert_eq!(s.total_multiplicity(), 3);
        assert_eq!(s.counting(2.0), 2);
        assert_eq!(s.expanded(), vec![1.0, 1.0, 3.0]);
    }

    #[test]
    fn rejects_zero_multiplicity() {
        assert!(SpectrumList::new(vec![e(1.0, 0, 0)], 1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = SpectrumList::new(vec![e(1.0 / 3.0, 2, -1), e(2.5, 1, 0)], 2.5).unwrap();
        let back = SpectrumList::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back.entries(), s.entries());
    }

    #[test]
    fn distinct_merges_sectors() {
        let s = SpectrumList::new(vec![e(1.0, 1, -1), e(1.0, 1, 1), e(2.0, 1, 0)], 2.0).unwrap();
        assert_eq!(s.distinct(1e-12), vec![(1.0, 2), (2.0, 1)]);
    }
}

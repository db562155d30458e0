//! Quasiorders (reflexive, transitive, not necessarily antisymmetric) and
//! their canonical quotient posets.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::{close_relation, ElemSet, FinitePoset};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quasiorder {
    names: Vec<String>,
    rel: Vec<ElemSet>,
}

/// The canonical surjection from a quasiorder onto its quotient poset.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub poset: FinitePoset,
    /// Class index of every carrier element.
    pub class_of: Vec<usize>,
    /// Least carrier index in each class.
    pub representatives: Vec<usize>,
}

impl Quotient {
    pub fn members(&self, class: usize) -> impl Iterator<Item = usize> + '_ {
        self.class_of
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == class)
            .map(|(i, _)| i)
    }
}

impl Quasiorder {
    /// Validates that `rel` (rows: `rel[i]` = everything above `i`) is a quasiorder.
    pub fn new(names: Vec<String>, rel: Vec<ElemSet>) -> Result<Self> {
        let q = Quasiorder { names, rel };
        q.check()?;
        Ok(q)
    }

    /// Reflexive-transitive closure of the generating pairs.
    pub fn closure_of(names: Vec<String>, pairs: &[(usize, usize)]) -> Self {
        let n = names.len();
        let mut rel = vec![ElemSet::with_capacity(n); n];
        for &(a, b) in pairs {
            rel[a].insert(b);
        }
        close_relation(&mut rel);
        Quasiorder { names, rel }
    }

    pub(crate) fn from_rows_unchecked(names: Vec<String>, rel: Vec<ElemSet>) -> Self {
        Quasiorder { names, rel }
    }

    fn check(&self) -> Result<()> {
        for (i, row) in self.rel.iter().enumerate() {
            if !row.contains(i) {
                return Err(Error::NotReflexive(self.names[i].clone()));
            }
        }
        for (i, row) in self.rel.iter().enumerate() {
            for j in row.ones() {
                if !self.rel[j].is_subset(row) {
                    let mut missing = self.rel[j].clone();
                    missing.difference_with(row);
                    let k = missing.ones().next().expect("non-empty difference");
                    return Err(Error::NotTransitive(
                        self.names[i].clone(),
                        self.names[j].clone(),
                        self.names[k].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.rel[a].contains(b)
    }

    pub fn row(&self, a: usize) -> &ElemSet {
        &self.rel[a]
    }

    pub fn equivalent(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) && self.leq(b, a)
    }

    /// Classes of mutual `⪯`, ordered by least member; each class is named
    /// after its representative.
    pub fn quotient(&self) -> Quotient {
        self.quotient_named(|_, rep| self.names[rep].clone())
    }

    /// Like [`Quasiorder::quotient`] but with caller-chosen class names.
    /// `name(members, representative)` receives the class members.
    pub fn quotient_named(&self, mut name: impl FnMut(&[usize], usize) -> String) -> Quotient {
        let n = self.len();
        let mut class_of = vec![usize::MAX; n];
        let mut representatives = Vec::new();
        let mut members_of: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if class_of[i] != usize::MAX {
                continue;
            }
            let c = representatives.len();
            representatives.push(i);
            let mut members = Vec::new();
            for j in self.rel[i].ones() {
                if self.rel[j].contains(i) {
                    class_of[j] = c;
                    members.push(j);
                }
            }
            members_of.push(members);
        }
        let k = representatives.len();
        let up: Vec<ElemSet> = representatives
            .iter()
            .map(|&r| {
                let mut row = FixedBitSet::with_capacity(k);
                for j in self.rel[r].ones() {
                    row.insert(class_of[j]);
                }
                row
            })
            .collect();
        let names = members_of
            .iter()
            .zip(&representatives)
            .map(|(m, &r)| name(m, r))
            .collect();
        Quotient {
            poset: FinitePoset::from_up_sets_unchecked(names, up),
            class_of,
            representatives,
        }
    }
}

impl From<&FinitePoset> for Quasiorder {
    fn from(p: &FinitePoset) -> Self {
        Quasiorder {
            names: p.names().to_vec(),
            rel: (0..p.len()).map(|i| p.up(i).clone()).collect(),
        }
    }
}

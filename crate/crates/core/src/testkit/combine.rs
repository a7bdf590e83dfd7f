//! Equivalence-class partitions and combination coverage over multiple
//! input variables.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Labelled equivalence classes of one input variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub variable: String,
    pub classes: Vec<String>,
}

impl Partition {
    pub fn new(variable: &str, classes: &[&str]) -> Self {
        Partition {
            variable: variable.into(),
            classes: classes.iter().map(|c| String::from(*c)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineCriterion {
    /// All combination coverage: the full Cartesian product.
    Acoc,
    /// Each choice coverage: a minimal list where every class of every
    /// partition appears at least once.
    Ecc,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CombineError {
    NoPartitions,
    EmptyPartition(String),
    DuplicateLabel(String),
}

impl fmt::Display for CombineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombineError::NoPartitions => write!(f, "no partitions given"),
            CombineError::EmptyPartition(v) => write!(f, "partition `{v}` has no classes"),
            CombineError::DuplicateLabel(v) => {
                write!(f, "partition `{v}` repeats a class label")
            }
        }
    }
}

/// Combine partitions into class tuples `(variable, label)` under the
/// chosen criterion. Deterministic: partitions iterate in declaration
/// order, and ECC reuses the last class of exhausted partitions.
pub fn combine(
    partitions: &[Partition],
    criterion: CombineCriterion,
) -> Result<Vec<Vec<(String, String)>>, CombineError> {
    if partitions.is_empty() {
        return Err(CombineError::NoPartitions);
    }
    for p in partitions {
        if p.classes.is_empty() {
            return Err(CombineError::EmptyPartition(p.variable.clone()));
        }
        for (i, c) in p.classes.iter().enumerate() {
            if p.classes[..i].contains(c) {
                return Err(CombineError::DuplicateLabel(p.variable.clone()));
            }
        }
    }
    match criterion {
        CombineCriterion::Acoc => {
            let mut tuples: Vec<Vec<(String, String)>> = vec![Vec::new()];
            for p in partitions {
                let mut next = Vec::with_capacity(tuples.len() * p.classes.len());
                for t in &tuples {
                    for c in &p.classes {
                        let mut t = t.clone();
                        t.push((p.variable.clone(), c.clone()));
                        next.push(t);
                    }
                }
                tuples = next;
            }
            Ok(tuples)
        }
        CombineCriterion::Ecc => {
            let rows = partitions.iter().map(|p| p.classes.len()).max().unwrap();
            let mut tuples = Vec::with_capacity(rows);
            for i in 0..rows {
                let tuple = partitions
                    .iter()
                    .map(|p| {
                        let c = &p.classes[i.min(p.classes.len() - 1)];
                        (p.variable.clone(), c.clone())
                    })
                    .collect();
                tuples.push(tuple);
            }
            Ok(tuples)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn acoc_is_the_cartesian_product() {
        // Three classes of n times two classes of qs: six tuples.
        let parts = [
            Partition::new("n", &["1", "2", "big"]),
            Partition::new("qs", &["C", "S"]),
        ];
        let tuples = combine(&parts, CombineCriterion::Acoc).unwrap();
        assert_eq!(tuples.len(), 6);
        assert_eq!(tuples[0], vec![("n".into(), "1".into()), ("qs".into(), "C".into())]);
        assert_eq!(
            tuples[5],
            vec![("n".into(), "big".into()), ("qs".into(), "S".into())]
        );
    }

    #[test]
    fn ecc_is_minimal_and_covers() {
        let parts = [
            Partition::new("a", &["a1", "a2"]),
            Partition::new("b", &["b1", "b2"]),
            Partition::new("c", &["c1", "c2"]),
            Partition::new("d", &["d1", "d2"]),
        ];
        let tuples = combine(&parts, CombineCriterion::Ecc).unwrap();
        assert_eq!(tuples.len(), 2);
    }

    #[test]
    fn single_partition_passes_through() {
        let parts = [Partition::new("x", &["lo", "hi"])];
        for c in [CombineCriterion::Acoc, CombineCriterion::Ecc] {
            let tuples = combine(&parts, c).unwrap();
            assert_eq!(tuples.len(), 2);
            assert_eq!(tuples[0][0].1, "lo");
            assert_eq!(tuples[1][0].1, "hi");
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            combine(&[], CombineCriterion::Acoc),
            Err(CombineError::NoPartitions)
        );
        let parts = [Partition::new("x", &[])];
        assert!(matches!(
            combine(&parts, CombineCriterion::Ecc),
            Err(CombineError::EmptyPartition(_))
        ));
        let parts = [Partition::new("x", &["a", "a"])];
        assert!(matches!(
            combine(&parts, CombineCriterion::Acoc),
            Err(CombineError::DuplicateLabel(_))
        ));
    }

    proptest! {
        #[test]
        fn cardinalities_and_coverage(sizes in proptest::collection::vec(1usize..5, 1..5)) {
            let parts: Vec<Partition> = sizes
                .iter()
                .enumerate()
                .map(|(i, &k)| Partition {
                    variable: alloc::format!("v{i}"),
                    classes: (0..k).map(|c| alloc::format!("c{c}")).collect(),
                })
                .collect();

            let acoc = combine(&parts, CombineCriterion::Acoc).unwrap();
            prop_assert_eq!(acoc.len(), sizes.iter().product::<usize>());

            let ecc = combine(&parts, CombineCriterion::Ecc).unwrap();
            prop_assert_eq!(ecc.len(), *sizes.iter().max().unwrap());

            // Every class of every partition appears at least once in both.
            for tuples in [&acoc, &ecc] {
                for p in &parts {
                    for c in &p.classes {
                        prop_assert!(
                            tuples.iter().any(|t| t
                                .iter()
                                .any(|(v, l)| v == &p.variable && l == c)),
                            "class {}/{} missing",
                            p.variable,
                            c
                        );
                    }
                }
            }
        }
    }
}

use crate::error::{argument, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    StateSpace,
    Lifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Truth,
    Predicted,
}

/// Time-indexed sequence of equal-length vectors, one per step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = f64> {
    kind: TrajectoryKind,
    provenance: Provenance,
    start: usize,
    values: Vec<Vec<T>>,
}

impl<T: Clone> Trajectory<T> {
    pub fn new(kind: TrajectoryKind, provenance: Provenance, first: Vec<T>) -> Self {
        Self {
            kind,
            provenance,
            start: 0,
            values: vec![first],
        }
    }

    pub fn from_values(
        kind: TrajectoryKind,
        provenance: Provenance,
        values: Vec<Vec<T>>,
    ) -> Result<Self> {
        let Some(first) = values.first() else {
            return Err(argument("trajectory needs at least one entry"));
        };
        let width = first.len();
        if let Some(bad) = values.iter().position(|v| v.len() != width) {
            return Err(argument(format!(
                "trajectory entry {bad} has length {}, expected {width}",
                values[bad].len()
            )));
        }
        Ok(Self {
            kind,
            provenance,
            start: 0,
            values,
        })
    }

    pub(crate) fn push(&mut self, v: Vec<T>) {
        debug_assert_eq!(v.len(), self.values[0].len());
        self.values.push(v);
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Number of recorded steps, including the initial state.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn width(&self) -> usize {
        self.values[0].len()
    }

    pub fn times(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).map(move |i| self.start + i)
    }

    pub fn values(&self) -> &[Vec<T>] {
        &self.values
    }

    pub fn get(&self, t: usize) -> Option<&[T]> {
        self.values.get(t).map(Vec::as_slice)
    }

    pub fn last(&self) -> &[T] {
        self.values.last().expect("trajectory is never empty")
    }

    pub fn component(&self, axis: usize) -> Vec<T> {
        self.values.iter().map(|v| v[axis].clone()).collect()
    }

    /// Applies `f` to every entry, e.g. to decode a lifted trajectory.
    pub fn map_values<U, F>(&self, kind: TrajectoryKind, mut f: F) -> Trajectory<U>
    where
        F: FnMut(&[T]) -> Vec<U>,
    {
        Trajectory {
            kind,
            provenance: self.provenance,
            start: self.start,
            values: self.values.iter().map(|v| f(v)).collect(),
        }
    }
}

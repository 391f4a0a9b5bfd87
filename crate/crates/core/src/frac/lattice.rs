use std::sync::Arc;

use super::ChartSpec;
use crate::error::{GeoError, Result};

/// Uniform grid on one axis, anchored at the axis terminal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisGrid {
    start: f64,
    end: f64,
    points: usize,
}

impl AxisGrid {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 3 {
            return Err(GeoError::InvalidLattice(format!(
                "need at least 3 points per axis, got {points}"
            )));
        }
        if !(end.is_finite() && start.is_finite() && end > start) {
            return Err(GeoError::InvalidLattice(format!(
                "upper bound {end} must exceed terminal {start}"
            )));
        }
        Ok(Self { start, end, points })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.points - 1) as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        if k + 1 == self.points {
            self.end
        } else {
            self.start + k as f64 * self.step()
        }
    }
}

/// Rectangular lattice over the whole `2n`-dimensional chart.
///
/// Node numbering is row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    chart: Arc<ChartSpec>,
    axes: Vec<AxisGrid>,
    strides: Vec<usize>,
    len: usize,
}

impl Lattice {
    /// `bounds[β] = (upper bound, point count)`; every axis starts at its terminal.
    pub fn new(chart: Arc<ChartSpec>, bounds: &[(f64, usize)]) -> Result<Self> {
        let dim = chart.dim();
        if bounds.len() != dim {
            return Err(GeoError::InvalidLattice(format!(
                "expected {dim} axes, got {}",
                bounds.len()
            )));
        }
        let axes = bounds
            .iter()
            .enumerate()
            .map(|(axis, &(upper, points))| AxisGrid::new(chart.terminal(axis), upper, points))
            .collect::<Result<Vec<_>>>()?;
        let mut strides = vec![1; dim];
        for axis in (0..dim.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * axes[axis + 1].points();
        }
        let len = axes.iter().map(AxisGrid::points).product();
        Ok(Self {
            chart,
            axes,
            strides,
            len,
        })
    }

    /// Same upper bound and point count on every axis.
    pub fn uniform(chart: Arc<ChartSpec>, upper: f64, points: usize) -> Result<Self> {
        let bounds = vec![(upper, points); chart.dim()];
        Self::new(chart, &bounds)
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, axis: usize) -> &AxisGrid {
        &self.axes[axis]
    }

    pub fn axes(&self) -> &[AxisGrid] {
        &self.axes
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn node_count(&self) -> usize {
        self.len
    }

    pub fn index_along(&self, node: usize, axis: usize) -> usize {
        (node / self.strides[axis]) % self.axes[axis].points()
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        (0..self.dim()).map(|a| self.index_along(node, a)).collect()
    }

    pub fn node(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|a| self.axes[a].coord(self.index_along(node, a)))
            .collect()
    }

    /// Nodes at least `margin` cells away from both ends of every axis.
    pub fn interior_nodes(&self, margin: usize) -> Vec<usize> {
        (0..self.len)
            .filter(|&node| {
                (0..self.dim()).all(|a| {
                    let k = self.index_along(node, a);
                    k >= margin && k + margin < self.axes[a].points()
                })
            })
            .collect()
    }

    /// Cell containing `point` and the fractional offsets inside it, for
    /// multilinear interpolation.
    pub(crate) fn locate(&self, point: &[f64]) -> Result<(Vec<usize>, Vec<f64>)> {
        if point.len() != self.dim() {
            return Err(GeoError::Domain(format!(
                "point has {} coordinates, lattice {}",
                point.len(),
                self.dim()
            )));
        }
        let mut cell = Vec::with_capacity(self.dim());
        let mut frac = Vec::with_capacity(self.dim());
        for (a, (&u, grid)) in point.iter().zip(&self.axes).enumerate() {
            let tol = 1e-12 * (grid.end() - grid.start());
            if u < grid.start() - tol || u > grid.end() + tol {
                return Err(GeoError::Domain(format!(
                    "{} = {u} outside lattice [{}, {}]",
                    self.chart.label(a),
                    grid.start(),
                    grid.end()
                )));
            }
            let t = ((u - grid.start()) / grid.step()).clamp(0.0, (grid.points() - 1) as f64);
            let k = (t.floor() as usize).min(grid.points() - 2);
            cell.push(k);
            frac.push(t - k as f64);
        }
        Ok((cell, frac))
    }
}

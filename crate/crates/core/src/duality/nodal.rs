use alloc::vec;
use alloc::vec::Vec;

use super::solver::PdeField;
use crate::equilibrium::ValueSet;
use crate::Result;

/// A connected group of nodal points.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub points: Vec<Vec<f64>>,
    pub centroid: Vec<f64>,
    /// Largest distance between two of its points.
    pub diameter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalSet {
    pub t: f64,
    pub x: f64,
    pub delta: f64,
    /// Grid points `y` with `W(t, x, y) <= delta`.
    pub points: ValueSet<f64>,
    /// Components under grid adjacency (diagonals included), largest first.
    pub clusters: Vec<Cluster>,
    /// Minimum of `W(t, x, .)` over the grid and where it is attained.
    pub min_value: f64,
    pub argmin: Vec<f64>,
}

/// The approximate set value at `(t, x)`: grid points where `W` is at most
/// `delta` (the grid default when `None`).
pub fn nodal_set(field: &PdeField, t: f64, x: f64, delta: Option<f64>) -> Result<NodalSet> {
    let layer = field.layer_at(t)?;
    let ix = field.x_index(x)?;
    let delta = delta.unwrap_or_else(|| field.default_delta());
    let n = field.players;
    let ny = field.y.len();
    let total = field.ny_total();
    let decode = |mut flat: usize| {
        let mut iy = vec![0usize; n];
        for i in (0..n).rev() {
            iy[i] = flat % ny;
            flat /= ny;
        }
        iy
    };
    let coords = |iy: &[usize]| iy.iter().map(|&k| field.y[k]).collect::<Vec<f64>>();
    let slice = &field.layers[layer][ix * total..(ix + 1) * total];

    let (mut min_value, mut argmin) = (f64::INFINITY, 0);
    for (flat, &w) in slice.iter().enumerate() {
        if w < min_value {
            min_value = w;
            argmin = flat;
        }
    }
    let selected: Vec<bool> = slice.iter().map(|&w| w <= delta).collect();
    let mut seen = vec![false; total];
    let mut clusters = Vec::new();
    for start in 0..total {
        if !selected[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut open = vec![start];
        while let Some(flat) = open.pop() {
            let iy = decode(flat);
            for other in neighbours(&iy, ny) {
                let f = other.iter().fold(0, |acc, &k| acc * ny + k);
                if selected[f] && !seen[f] {
                    seen[f] = true;
                    members.push(f);
                    open.push(f);
                }
            }
        }
        members.sort_unstable();
        let points: Vec<Vec<f64>> = members.iter().map(|&f| coords(&decode(f))).collect();
        let mut centroid = vec![0.0; n];
        for p in &points {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / points.len() as f64;
            }
        }
        let mut diameter = 0.0f64;
        for (a, p) in points.iter().enumerate() {
            for q in &points[a + 1..] {
                let d2: f64 = p.iter().zip(q).map(|(u, v)| (u - v) * (u - v)).sum();
                diameter = diameter.max(libm::sqrt(d2));
            }
        }
        clusters.push(Cluster {
            points,
            centroid,
            diameter,
        });
    }
    clusters.sort_by_key(|c| core::cmp::Reverse(c.points.len()));
    let points = ValueSet::from_points(clusters.iter().flat_map(|c| c.points.iter().cloned()));
    Ok(NodalSet {
        t: field.times[layer],
        x: field.x[ix],
        delta,
        points,
        clusters,
        min_value,
        argmin: coords(&decode(argmin)),
    })
}

/// Grid indices at max-norm distance one.
fn neighbours(iy: &[usize], ny: usize) -> Vec<Vec<usize>> {
    let n = iy.len();
    let mut out = Vec::new();
    let mut offset = vec![0usize; n];
    loop {
        if offset.iter().any(|&o| o != 1) {
            let cand: Option<Vec<usize>> = iy
                .iter()
                .zip(&offset)
                .map(|(&k, &o)| (k + o).checked_sub(1).filter(|&v| v < ny))
                .collect();
            if let Some(c) = cand {
                out.push(c);
            }
        }
        if !super::next_digits(&mut offset, 3) {
            break;
        }
    }
    out
}

//! Maximum-weight assignment of `rows ≤ cols` (Hungarian method with
//! potentials), used for permutations and truncated permutations.

/// Solves `max Σ_i w[i][σ(i)]` over injective `σ: rows → cols`, skipping
/// `forbidden` cells. Returns the column of each row, or `None` if every
/// assignment uses a forbidden cell.
pub fn max_weight_assignment(
    rows: usize,
    cols: usize,
    weights: &[f64],
    forbidden: &[bool],
) -> Option<(f64, Vec<usize>)> {
    assert!(rows <= cols);
    assert_eq!(weights.len(), rows * cols);
    if rows == 0 {
        return Some((0.0, vec![]));
    }
    let wmax = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let big = (wmax + 1.0) * (rows as f64 + 1.0) * 4.0;
    let cost = |i: usize, j: usize| {
        if forbidden[i * cols + j] {
            big
        } else {
            -weights[i * cols + j]
        }
    };

    // 1-indexed e-maxx formulation; p[j] = row matched to column j.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut p = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=cols {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; rows];
    for j in 1..=cols {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    if assign.iter().enumerate().any(|(i, &j)| forbidden[i * cols + j]) {
        return None;
    }
    let value = assign.iter().enumerate().map(|(i, &j)| weights[i * cols + j]).sum();
    Some((value, assign))
}

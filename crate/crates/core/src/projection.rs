//! Euclidean projections onto the simplex and the capped non-negative orthant.

/// Projection onto `{x >= 0, sum x = total}` by the sorted-threshold method.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - total) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    // Remove the rounding residue from the active coordinates.
    let sum: f64 = out.iter().sum();
    let active = out.iter().filter(|&&x| x > 0.0).count();
    if active > 0 && sum != total {
        let fix = (total - sum) / active as f64;
        for x in out.iter_mut().filter(|x| **x > 0.0) {
            *x = (*x + fix).max(0.0);
        }
    }
    out
}

/// Projection onto `{p >= 0, sum p <= budget}`.
pub fn project_power(p: &[f64], budget: f64) -> Vec<f64> {
    let clamped: Vec<f64> = p.iter().map(|&x| x.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= budget {
        clamped
    } else {
        project_simplex(p, budget)
    }
}

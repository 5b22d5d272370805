/// Euclidean projection of `y` onto `{x >= 0, Σ x = total}`, written to `out`.
pub fn project_onto_scaled_simplex(y: &[f64], total: f64, out: &mut [f64]) {
    debug_assert_eq!(y.len(), out.len());
    if total <= 0.0 {
        out.fill(0.0);
        return;
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - total) / (i + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    for (o, &v) in out.iter_mut().zip(y) {
        *o = (v - theta).max(0.0);
    }
}

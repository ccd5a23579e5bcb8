//! Point-in-convex-hull by linear feasibility.
//!
//! Decides whether `x = Σ λ_k v_k` with `λ ≥ 0`, `Σ λ_k = 1` has a solution
//! using a dense phase-one simplex with Bland's rule. Sized for a handful of
//! vertices in low dimension.

use super::MEMBERSHIP_TOL;

const PIVOT_EPS: f64 = 1e-12;

pub fn in_hull(vertices: &[&[f64]], x: &[f64]) -> bool {
    let k = vertices.len();
    if k == 0 {
        return false;
    }
    let d = x.len();
    let rows = d + 1;
    // columns: k lambdas, `rows` artificials, rhs
    let cols = k + rows + 1;
    let mut t = vec![0.0; rows * cols];
    for i in 0..rows {
        let rhs = if i < d { x[i] } else { 1.0 };
        let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
        for (j, v) in vertices.iter().enumerate() {
            let a = if i < d { v[i] } else { 1.0 };
            t[i * cols + j] = sign * a;
        }
        t[i * cols + k + i] = 1.0;
        t[i * cols + cols - 1] = sign * rhs;
    }
    let mut basis: Vec<usize> = (k..k + rows).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost = vec![0.0; cols];
    for c in 0..cols {
        if c >= k && c < k + rows {
            continue;
        }
        cost[c] = -(0..rows).map(|i| t[i * cols + c]).sum::<f64>();
    }

    for _ in 0..(50 * cols) {
        let Some(enter) = (0..cols - 1).find(|&c| cost[c] < -PIVOT_EPS) else {
            break;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            let a = t[i * cols + enter];
            if a > PIVOT_EPS {
                let ratio = t[i * cols + cols - 1] / a;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - PIVOT_EPS || (ratio <= lr + PIVOT_EPS && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((pr, _)) = leave else {
            break;
        };
        let piv = t[pr * cols + enter];
        for c in 0..cols {
            t[pr * cols + c] /= piv;
        }
        for i in 0..rows {
            if i == pr {
                continue;
            }
            let f = t[i * cols + enter];
            if f != 0.0 {
                for c in 0..cols {
                    t[i * cols + c] -= f * t[pr * cols + c];
                }
            }
        }
        let f = cost[enter];
        for c in 0..cols {
            cost[c] -= f * t[pr * cols + c];
        }
        basis[pr] = enter;
    }

    // Objective value = -cost[rhs]; equivalently the sum of basic artificials.
    let infeasibility: f64 = (0..rows)
        .filter(|&i| basis[i] >= k && basis[i] < k + rows)
        .map(|i| t[i * cols + cols - 1])
        .sum();
    infeasibility <= MEMBERSHIP_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_membership_in_three_dimensions() {
        let verts: Vec<Vec<f64>> = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ];
        let refs: Vec<&[f64]> = verts.iter().map(|v| v.as_slice()).collect();
        // 0.25 * (e1 + e2 + e3) + 0.25 * 0 is a convex combination
        assert!(in_hull(&refs, &[0.25, 0.25, 0.25]));
        assert!(in_hull(&refs, &[1.0, 0.0, 0.0]));
        assert!(in_hull(&refs, &[0.0, 0.0, 0.0]));
        assert!(!in_hull(&refs, &[0.5, 0.5, 0.5]));
        assert!(!in_hull(&refs, &[-0.01, 0.2, 0.2]));
    }

    #[test]
    fn single_vertex_hull_is_a_point() {
        let v = [0.3, 0.4, 0.5];
        let refs: Vec<&[f64]> = vec![&v];
        assert!(in_hull(&refs, &[0.3, 0.4, 0.5]));
        assert!(!in_hull(&refs, &[0.3, 0.4, 0.6]));
    }
}

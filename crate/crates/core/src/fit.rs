//! Exponential-decay fits: `Δ(N) = a₀ e^{−N/ξ}` for gaps and
//! `O(N) = O_∞ + A e^{−N/ξ}` for the string order parameter.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// `a₀` (gap) or `A` (string order).
    pub amplitude: f64,
    /// `O_∞`; absent for gap fits.
    pub asymptote: Option<f64>,
    /// Correlation length; `None` when the data carry no decay (constant input).
    pub xi: Option<f64>,
    /// RMS of the residuals in the fitted quantity (`ln Δ` for gaps, `O` for
    /// string order).
    pub rms_residual: f64,
    pub points_used: usize,
    /// `max ξ − min ξ` over leave-one-out refits, when enough points remain.
    pub loo_spread: Option<f64>,
}

/// Unweighted least squares of `ln Δ` against `N`. Needs at least three
/// points, all with `Δ > 0`.
pub fn fit_gap(points: &[(f64, f64)]) -> Result<FitResult> {
    let mut r = fit_gap_inner(points)?;
    if points.len() >= 4 {
        r.loo_spread = loo(points, |p| fit_gap_inner(p).ok().and_then(|f| f.xi));
    }
    Ok(r)
}

fn fit_gap_inner(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("gap fit needs at least 3 points, got {}", points.len())));
    }
    if let Some(&(n, d)) = points.iter().find(|p| !(p.1 > 0.0)) {
        return Err(Error::Fit(format!("gap must be positive, got {d} at N = {n}")));
    }
    let (slope, intercept, rms) = linear_fit(points.iter().map(|&(n, d)| (n, d.ln())))?;
    if !(slope < 0.0) {
        return Err(Error::Fit(format!("gap does not decay (slope {slope:.3e})")));
    }
    Ok(FitResult {
        amplitude: intercept.exp(),
        asymptote: None,
        xi: Some(-1.0 / slope),
        rms_residual: rms,
        points_used: points.len(),
        loo_spread: None,
    })
}

/// `(slope, intercept, rms residual)` of an ordinary least-squares line.
fn linear_fit(data: impl Iterator<Item = (f64, f64)> + Clone) -> Result<(f64, f64, f64)> {
    let mut m = Matrix2::zeros();
    let mut b = Vector2::zeros();
    let mut count = 0;
    for (x, y) in data.clone() {
        m += Matrix2::new(x * x, x, x, 1.0);
        b += Vector2::new(x * y, y);
        count += 1;
    }
    let sol = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Fit("all points share the same N".into()))?;
    let ss: f64 = data.map(|(x, y)| (sol[0] * x + sol[1] - y).powi(2)).sum();
    Ok((sol[0], sol[1], (ss / count as f64).sqrt()))
}

fn loo(points: &[(f64, f64)], xi_of: impl Fn(&[(f64, f64)]) -> Option<f64>) -> Option<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for skip in 0..points.len() {
        let rest: Vec<_> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, p)| *p)
            .collect();
        let xi = xi_of(&rest)?;
        lo = lo.min(xi);
        hi = hi.max(xi);
    }
    Some(hi - lo)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SopFitOptions {
    /// Accept both even and odd `N`. The model then alternates,
    /// `O_∞ + A (−1)^N e^{−N/ξ}`, i.e. it fits `|O − O_∞| = |A| e^{−N/ξ}`.
    pub allow_mixed_parity: bool,
}

/// Three-parameter Levenberg–Marquardt fit of `O_∞ + A e^{−N/ξ}`.
///
/// `theta` is carried for bookkeeping only.
pub fn fit_sop(points: &[(f64, f64)], theta: f64, opts: SopFitOptions) -> Result<FitResult> {
    let _ = theta;
    if points.len() < 4 {
        return Err(Error::Fit(format!("string-order fit needs at least 4 points, got {}", points.len())));
    }
    let parity = parities(points)?;
    let mixed = parity.iter().any(|&p| p != parity[0]);
    if mixed && !opts.allow_mixed_parity {
        return Err(Error::Fit(
            "mixed even/odd N: the finite-size correction alternates in sign; pass the mixed-parity override"
                .into(),
        ));
    }
    let mut r = fit_sop_inner(points, mixed)?;
    if r.xi.is_some() && points.len() >= 5 {
        r.loo_spread = loo(points, |p| fit_sop_inner(p, mixed).ok().and_then(|f| f.xi));
    }
    Ok(r)
}

fn parities(points: &[(f64, f64)]) -> Result<Vec<i64>> {
    points
        .iter()
        .map(|&(n, _)| {
            if n.fract() != 0.0 {
                Err(Error::Fit(format!("system size {n} is not an integer")))
            } else {
                Ok((n as i64).rem_euclid(2))
            }
        })
        .collect()
}

/// Residuals `model − data` and the Jacobian for `p = (O_∞, A, κ = 1/ξ)`.
fn sop_model(p: &Vector3<f64>, points: &[(f64, f64)], alternating: bool) -> (Vec<f64>, Vec<[f64; 3]>) {
    let mut r = Vec::with_capacity(points.len());
    let mut j = Vec::with_capacity(points.len());
    for &(n, o) in points {
        let s = if alternating && (n as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        let e = s * (-p[2] * n).exp();
        r.push(p[0] + p[1] * e - o);
        j.push([1.0, e, -p[1] * n * e]);
    }
    (r, j)
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn fit_sop_inner(points: &[(f64, f64)], alternating: bool) -> Result<FitResult> {
    let values: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(1e-300) {
        return Ok(FitResult {
            amplitude: 0.0,
            asymptote: Some(values[0]),
            xi: None,
            rms_residual: 0.0,
            points_used: points.len(),
            loo_spread: None,
        });
    }

    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let last = sorted[sorted.len() - 1].1;
    let mut starts = vec![last];
    // Aitken extrapolation of the three largest sizes
    let k = sorted.len();
    let (a, b, c) = (sorted[k - 3].1, sorted[k - 2].1, sorted[k - 1].1);
    let denom = c - 2.0 * b + a;
    if !alternating && denom.abs() > 1e-300 {
        let aitken = c - (c - b) * (c - b) / denom;
        if aitken.is_finite() {
            starts.push(aitken);
        }
    }

    let mut best: Option<(Vector3<f64>, f64)> = None;
    for o_inf in starts {
        let Some(p0) = log_linear_start(&sorted, o_inf, alternating) else {
            continue;
        };
        if let Ok(fit) = levenberg_marquardt(p0, &sorted, alternating) {
            if best.as_ref().is_none_or(|b| fit.1 < b.1) {
                best = Some(fit);
            }
        }
    }
    let (p, cost) = best.ok_or_else(|| Error::NoConvergence {
        iterations: 0,
        residual: f64::NAN,
    })?;
    if !(p[2] > 0.0) {
        return Err(Error::Fit(format!("fitted decay rate is not positive ({:.3e})", p[2])));
    }
    Ok(FitResult {
        amplitude: p[1],
        asymptote: Some(p[0]),
        xi: Some(1.0 / p[2]),
        rms_residual: (cost / points.len() as f64).sqrt(),
        points_used: points.len(),
        loo_spread: None,
    })
}

/// `(O_∞, A, κ)` from a line through `ln|O − O_∞|`, skipping points that sit
/// on the guessed asymptote.
fn log_linear_start(points: &[(f64, f64)], o_inf: f64, alternating: bool) -> Option<Vector3<f64>> {
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p.1.abs())).max(1e-300);
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| (p.1 - o_inf).abs() > 1e-13 * scale)
        .map(|&(n, o)| (n, (o - o_inf).abs().ln()))
        .collect();
    let (slope, intercept) = if data.len() >= 2 {
        let (s, i, _) = linear_fit(data.iter().copied()).ok()?;
        (s, i)
    } else {
        (-1.0, 0.0)
    };
    let kappa = if slope < 0.0 { -slope } else { 1.0 };
    // sign of A from the point farthest from the asymptote
    let far = points
        .iter()
        .max_by(|a, b| (a.1 - o_inf).abs().total_cmp(&(b.1 - o_inf).abs()))?;
    let mut sign = (far.1 - o_inf).signum();
    if alternating && (far.0 as i64).rem_euclid(2) == 1 {
        sign = -sign;
    }
    Some(Vector3::new(o_inf, sign * intercept.exp(), kappa))
}

fn levenberg_marquardt(
    mut p: Vector3<f64>,
    points: &[(f64, f64)],
    alternating: bool,
) -> Result<(Vector3<f64>, f64)> {
    let (mut r, mut jac) = sop_model(&p, points, alternating);
    let mut cost = sum_sq(&r);
    let mut mu: f64 = 1e-3;
    for _ in 0..2000 {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (ri, ji) in r.iter().zip(&jac) {
            for a in 0..3 {
                jtr[a] += ji[a] * ri;
                for b in 0..3 {
                    jtj[(a, b)] += ji[a] * ji[b];
                }
            }
        }
        let mut accepted = None;
        while mu < 1e30 {
            let mut lhs = jtj;
            for a in 0..3 {
                lhs[(a, a)] += mu * jtj[(a, a)].max(1e-300);
            }
            if let Some(step) = lhs.lu().solve(&(-jtr)) {
                let q = p + step;
                let (rq, jq) = sop_model(&q, points, alternating);
                let cq = sum_sq(&rq);
                if cq <= cost {
                    accepted = Some((step, q, rq, jq, cq));
                    break;
                }
            }
            mu *= 10.0;
        }
        let Some((step, q, rq, jq, cq)) = accepted else {
            // no downhill step at any damping: at a minimum to working precision
            return Ok((p, cost));
        };
        let done = step.iter().zip(p.iter()).all(|(s, v)| s.abs() <= 1e-10 * (1.0 + v.abs()));
        p = q;
        r = rq;
        jac = jq;
        cost = cq;
        mu = (mu * 0.1).max(1e-20);
        if done {
            return Ok((p, cost));
        }
    }
    Err(Error::NoConvergence {
        iterations: 2000,
        residual: cost.sqrt(),
    })
}

/// Gap-style fit of `|O − O_∞|` with the asymptote given exactly; the sign
/// of `A` is taken from the data.
pub fn fit_sop_fixed_asymptote(points: &[(f64, f64)], o_inf: f64) -> Result<FitResult> {
    let shifted: Vec<_> = points.iter().map(|&(n, o)| (n, (o - o_inf).abs())).collect();
    let mut r = fit_gap(&shifted)?;
    let sign = points.iter().map(|p| p.1 - o_inf).sum::<f64>().signum();
    r.amplitude *= sign;
    r.asymptote = Some(o_inf);
    Ok(r)
}

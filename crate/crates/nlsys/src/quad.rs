//! Adaptive Gauss–Kronrod quadrature (7–15 pair) over finite intervals,
//! with optional interior breakpoints so integrable endpoint singularities
//! can be isolated on their own subintervals.

use crate::error::{Error, Result};

// 15-point Kronrod abscissae on [0, 1]-half of [-1, 1]; even symmetry.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Embedded 7-point Gauss weights (nodes are XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Converged value with its error estimate and the work done to get it.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Cleared once the midpoint degenerates in floating point; the
    /// segment then keeps its current estimate.
    splittable: bool,
}

/// One Gauss–Kronrod 7–15 pass over [a, b].
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (Segment, usize) {
    let hl = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [0.0_f64; 15];
    fv[7] = fc;
    for j in 0..7 {
        let x = hl * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = resk * hl;
    let resasc = resasc * hl.abs();
    let mut err = ((resk - resg) * hl).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * 1.0_f64.min((200.0 * err / resasc).powf(1.5));
    }
    let round = 50.0 * f64::EPSILON * resabs * hl.abs();
    if round > err {
        err = round;
    }
    (Segment { a, b, value, error: err, splittable: true }, 15)
}

const MAX_SEGMENTS: usize = 4000;

/// Integrate f over [a, b] until the summed error estimate drops below
/// max(tol_abs, tol_rel * |integral|).
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
) -> Result<QuadResult> {
    integrate_segmented(f, &[a, b], tol_abs, tol_rel)
}

/// Integrate across consecutive breakpoints; each initial cell is refined
/// adaptively. Breakpoints must be finite and strictly increasing.
pub fn integrate_segmented<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol_abs: f64,
    tol_rel: f64,
) -> Result<QuadResult> {
    if points.len() < 2 {
        return Err(Error::QuadratureFailure("need at least two breakpoints".into()));
    }
    for w in points.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::QuadratureFailure(format!(
                "breakpoints must be finite and increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let mut evals = 0;
    let mut segs: Vec<Segment> = Vec::with_capacity(64);
    for w in points.windows(2) {
        let (seg, n) = gk15(&f, w[0], w[1]);
        evals += n;
        segs.push(seg);
    }
    loop {
        let value: f64 = segs.iter().map(|s| s.value).sum();
        let error: f64 = segs.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureFailure("integrand produced non-finite values".into()));
        }
        if error <= tol_abs.max(tol_rel * value.abs()) {
            return Ok(QuadResult { value, abs_error: error, evaluations: evals });
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure(format!(
                "no convergence within {MAX_SEGMENTS} segments (error {error:.3e})"
            )));
        }
        let worst = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.splittable)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            return Err(Error::QuadratureFailure(format!(
                "floating-point resolution exhausted at error {error:.3e}"
            )));
        };
        let Segment { a, b, .. } = segs[worst];
        let mid = 0.5 * (a + b);
        if !(a < mid && mid < b) {
            segs[worst].splittable = false;
            continue;
        }
        let (left, n1) = gk15(&f, a, mid);
        let (right, n2) = gk15(&f, mid, b);
        evals += n1 + n2;
        if !left.value.is_finite() || !right.value.is_finite() {
            // The split bisected onto a singular point; keep the parent
            // estimate and stop refining this cell.
            segs[worst].splittable = false;
            continue;
        }
        segs[worst] = left;
        segs.push(right);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        integrate(f, a, b, 1e-12, 1e-12).unwrap().value
    }

    #[test]
    fn polynomial_exact() {
        assert!((value(|x| x * x, 0.0, 1.0) - 1.0 / 3.0).abs() < 1e-14);
        assert!((value(|x| x.powi(13), -1.0, 1.0)).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        let v = value(|x| x.sqrt().recip(), 0.0, 1.0);
        assert!((v - 2.0).abs() < 1e-9, "got {v}");
        let v = value(|x| -x.ln(), 0.0, 1.0);
        assert!((v - 1.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn oscillatory() {
        let v = value(f64::cos, 0.0, 10.0 * std::f64::consts::PI);
        assert!(v.abs() < 1e-10, "got {v}");
        let v = value(f64::sin, 0.0, std::f64::consts::PI);
        assert!((v - 2.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn segmented_matches_plain() {
        let f = |x: f64| (x - 0.3).abs().powf(-0.4);
        let seg = integrate_segmented(f, &[0.0, 0.3, 1.0], 1e-8, 0.0).unwrap();
        // 0.3^0.6/0.6 + 0.7^0.6/0.6 in closed form.
        let exact = (0.3_f64.powf(0.6) + 0.7_f64.powf(0.6)) / 0.6;
        assert!((seg.value - exact).abs() < 1e-8, "got {} want {exact}", seg.value);
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(integrate_segmented(|x| x, &[1.0, 0.0], 1e-10, 1e-10).is_err());
        assert!(integrate_segmented(|x| x, &[0.0], 1e-10, 1e-10).is_err());
    }
}

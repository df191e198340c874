//! Adaptive Simpson quadrature.

use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_PANELS: usize = 1 << 20;

struct State<'a, F> {
    f: &'a F,
    panels: usize,
    max_panels: usize,
    exhausted: bool,
}

fn simpson<F: Fn(f64) -> f64>(
    st: &mut State<'_, F>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = ((st.f)(lm), (st.f)(rm));
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    st.panels += 1;
    if delta.abs() <= 15.0 * tol || depth == 0 || m <= a || m >= b {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    if st.panels >= st.max_panels {
        st.exhausted = true;
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (l, el) = simpson(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let (r, er) = simpson(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    (l + r, el + er)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`. Fails with the
/// achieved error estimate when the panel cap is reached first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_pieces(f, &[a, b], tol)
}

/// Integrates over consecutive intervals of `breaks`, sharing the tolerance
/// in proportion to interval length.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<f64> {
    if breaks.len() < 2 {
        return Ok(0.0);
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    if span <= 0.0 {
        return Ok(0.0);
    }
    let mut st = State {
        f: &f,
        panels: 0,
        max_panels: MAX_PANELS,
        exhausted: false,
    };
    let mut total = 0.0;
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let piece_tol = tol * (b - a) / span;
        // one ulp inside, so piecewise integrands use this piece's branch
        let (fa, fm, fb) = (f(a.next_up()), f(0.5 * (a + b)), f(b.next_down()));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let (v, e) = simpson(&mut st, a, b, fa, fm, fb, whole, piece_tol, 60);
        total += v;
        err += e;
    }
    if st.exhausted && err > tol {
        return Err(Error::Numerical {
            message: format!("adaptive Simpson hit the {MAX_PANELS}-panel cap"),
            achieved: err,
        });
    }
    Ok(total)
}

/// Sorted, deduplicated break points inside `[a, b]`, including both ends.
pub fn breakpoints(a: f64, b: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v = vec![a];
    v.extend(interior.into_iter().filter(|&x| x > a && x < b));
    v.push(b);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

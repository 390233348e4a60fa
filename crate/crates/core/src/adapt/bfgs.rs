//! Quasi-Newton minimization with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BfgsOptions {
    /// Stop when `‖∇f‖_∞` falls to this.
    pub grad_tol: f64,
    pub max_iters: usize,
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Inverse-Hessian estimate at the last iterate.
    pub inverse_hessian: DMatrix<f64>,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;

struct Tracker<'a, F> {
    f: &'a mut F,
    best: Option<(f64, Vec<f64>, f64)>,
}

impl<F: FnMut(&[f64]) -> (f64, Vec<f64>)> Tracker<'_, F> {
    fn eval(&mut self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        let (fx, g) = (self.f)(x.as_slice());
        if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite objective {fx} during optimization")));
        }
        let ginf = g.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if self.best.as_ref().is_none_or(|(bf, _, _)| fx < *bf) {
            self.best = Some((fx, x.as_slice().to_vec(), ginf));
        }
        Ok((fx, DVector::from_vec(g)))
    }
}

/// Minimize `f`, returning the best point seen. `f` returns value and gradient.
pub fn minimize<F>(f: F, x0: &[f64], opts: &BfgsOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    minimize_from(f, x0, None, opts)
}

/// As [`minimize`], starting from an inverse-Hessian estimate when given.
pub fn minimize_from<F>(mut f: F, x0: &[f64], hinv0: Option<DMatrix<f64>>, opts: &BfgsOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut t = Tracker { f: &mut f, best: None };
    let mut x = DVector::from_column_slice(x0);
    let (mut fx, mut g) = t.eval(&x)?;
    let mut fresh = hinv0.is_none();
    let mut hinv = match hinv0 {
        Some(h) if h.nrows() == n && h.ncols() == n => h,
        Some(_) => return Err(Error::InvalidInput("inverse Hessian does not match the parameter count".into())),
        None => DMatrix::<f64>::identity(n, n),
    };
    let mut iters = 0;
    let mut converged = g.amax() <= opts.grad_tol;
    while !converged && iters < opts.max_iters {
        iters += 1;
        let mut p = -(&hinv * &g);
        if p.dot(&g) >= 0.0 {
            hinv.fill_with_identity();
            fresh = true;
            p = -g.clone();
        }
        let a0 = if fresh { (1.0 / p.amax()).min(1.0) } else { 1.0 };
        match line_search(&mut t, &x, fx, &g, &p, a0)? {
            Some((a, fa, ga)) => {
                let s = &p * a;
                let y = &ga - &g;
                let sy = s.dot(&y);
                if sy > 1e-14 * s.norm() * y.norm() {
                    if fresh {
                        hinv *= sy / y.dot(&y);
                        fresh = false;
                    }
                    let rho = 1.0 / sy;
                    let hy = &hinv * &y;
                    let yhy = y.dot(&hy);
                    // H ← (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ
                    hinv.ger(-rho, &hy, &s, 1.0);
                    hinv.ger(-rho, &s, &hy, 1.0);
                    hinv.ger(rho * rho * yhy + rho, &s, &s, 1.0);
                }
                x += s;
                fx = fa;
                g = ga;
                converged = g.amax() <= opts.grad_tol;
            }
            None if !fresh => {
                hinv.fill_with_identity();
                fresh = true;
            }
            None => break,
        }
    }
    let (f_best, x_best, g_best) = t.best.expect("at least one evaluation");
    Ok(Minimum {
        x: x_best,
        f: f_best,
        grad_inf: g_best,
        iterations: iters,
        converged: g_best <= opts.grad_tol,
        inverse_hessian: hinv,
    })
}

type Point = (f64, f64, DVector<f64>);

/// Strong-Wolfe bracketing and zoom. `None` when no acceptable step exists.
fn line_search<F>(
    t: &mut Tracker<'_, F>,
    x: &DVector<f64>,
    f0: f64,
    g0: &DVector<f64>,
    p: &DVector<f64>,
    a_init: f64,
) -> Result<Option<(f64, f64, DVector<f64>)>>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let d0 = g0.dot(p);
    let mut eval = |t: &mut Tracker<'_, F>, a: f64| -> Result<Point> {
        let (fa, ga) = t.eval(&(x + p * a))?;
        let da = ga.dot(p);
        Ok((fa, da, ga))
    };
    let mut prev: (f64, f64, f64) = (0.0, f0, d0);
    let mut a = a_init;
    for i in 0..30 {
        let (fa, da, ga) = eval(t, a)?;
        if fa > f0 + C1 * a * d0 || (i > 0 && fa >= prev.1) {
            return zoom(t, &mut eval, f0, d0, prev, (a, fa, da));
        }
        if da.abs() <= -C2 * d0 {
            return Ok(Some((a, fa, ga)));
        }
        if da >= 0.0 {
            return zoom(t, &mut eval, f0, d0, (a, fa, da), prev);
        }
        prev = (a, fa, da);
        a *= 2.0;
    }
    Ok(None)
}

fn zoom<F, E>(
    t: &mut Tracker<'_, F>,
    eval: &mut E,
    f0: f64,
    d0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
) -> Result<Option<(f64, f64, DVector<f64>)>>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
    E: FnMut(&mut Tracker<'_, F>, f64) -> Result<Point>,
{
    let mut best: Option<(f64, f64, DVector<f64>)> = None;
    for _ in 0..40 {
        let a = interpolate(lo, hi);
        let (fa, da, ga) = eval(t, a)?;
        if fa > f0 + C1 * a * d0 || fa >= lo.1 {
            hi = (a, fa, da);
        } else {
            if da.abs() <= -C2 * d0 {
                return Ok(Some((a, fa, ga)));
            }
            best = Some((a, fa, ga.clone()));
            if da * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, da);
        }
        if (hi.0 - lo.0).abs() < 1e-14 * lo.0.abs().max(1.0) {
            break;
        }
    }
    // accept a sufficient decrease step even without the curvature condition
    Ok(best.filter(|(_, fa, _)| *fa < f0))
}

/// Cubic interpolation safeguarded to the interior of the bracket.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a0, f0, d0) = lo;
    let (a1, f1, d1) = hi;
    let d = a1 - a0;
    let e1 = d0 + d1 - 3.0 * (f1 - f0) / d;
    let disc = e1 * e1 - d0 * d1;
    let mid = 0.5 * (a0 + a1);
    if disc < 0.0 || d == 0.0 {
        return mid;
    }
    let e2 = disc.sqrt().copysign(d);
    let a = a1 - d * (d1 + e2 - e1) / (d1 - d0 + 2.0 * e2);
    let (l, h) = (a0.min(a1), a0.max(a1));
    let margin = 0.1 * (h - l);
    if a.is_finite() && a > l + margin && a < h - margin {
        a
    } else {
        mid
    }
}

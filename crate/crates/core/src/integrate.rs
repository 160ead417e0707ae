//! Time stepping in the standard and two-register forms, the test problems,
//! error curves, order fits and stability regions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::conditions::linear_coeffs;
use crate::numerics::{Rational, Scalar};
use crate::schemes::{ButcherTableau, Coefficients, LowStorageForm, Scheme};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("step failed at t = {t}: {message}")]
    Step { t: f64, message: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("order estimation failed: {0}")]
    Estimation(String),
}

/// State vector of an ODE, generic over the scalar `T`.
pub trait State<T>: Clone {
    fn zeroed(&self) -> Self;
    /// `self += a x`
    fn axpy(&mut self, a: &T, x: &Self);
    /// `self *= a`
    fn scale(&mut self, a: &T);
}

impl<T: Scalar> State<T> for T {
    fn zeroed(&self) -> Self {
        self.zero_like()
    }

    fn axpy(&mut self, a: &T, x: &Self) {
        *self = self.clone() + a.clone() * x.clone();
    }

    fn scale(&mut self, a: &T) {
        *self = self.clone() * a.clone();
    }
}

impl State<f64> for Vec<f64> {
    fn zeroed(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn axpy(&mut self, a: &f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn scale(&mut self, a: &f64) {
        for s in self.iter_mut() {
            *s *= a;
        }
    }
}

/// Right-hand side `f(t, y)`.
pub trait Rhs<T, Y> {
    fn eval(&self, t: &T, y: &Y) -> Result<Y, IntegrateError>;

    /// `acc += h f(t, y)`; override to avoid the temporary.
    fn accumulate(&self, t: &T, y: &Y, h: &T, acc: &mut Y) -> Result<(), IntegrateError>
    where
        Y: State<T>,
    {
        let k = self.eval(t, y)?;
        acc.axpy(h, &k);
        Ok(())
    }
}

impl<T, Y, F> Rhs<T, Y> for F
where
    F: Fn(&T, &Y) -> Result<Y, IntegrateError>,
{
    fn eval(&self, t: &T, y: &Y) -> Result<Y, IntegrateError> {
        self(t, y)
    }
}

/// One step of the standard form with stored stage derivatives.
pub fn step_a_form<T: Scalar, Y: State<T>>(
    tab: &ButcherTableau<T>,
    f: &impl Rhs<T, Y>,
    t_now: &T,
    y_now: &Y,
    h: &T,
) -> Result<Y, IntegrateError> {
    let s = tab.stages();
    let mut k: Vec<Y> = Vec::with_capacity(s);
    for i in 1..=s {
        let mut yi = y_now.clone();
        for (j, kj) in k.iter().enumerate() {
            yi.axpy(&(h.clone() * tab.a(i, j + 1)), kj);
        }
        let ti = t_now.clone() + tab.c(i) * h.clone();
        k.push(f.eval(&ti, &yi)?);
    }
    let mut y = y_now.clone();
    for (i, ki) in k.iter().enumerate() {
        y.axpy(&(h.clone() * tab.b(i + 1).clone()), ki);
    }
    Ok(y)
}

/// One step of the two-register form
/// `dy = A_i dy + h f(t + c_i h, y)`, `y = y + B_i dy`.
/// Only `y` (moved in) and `dy` are live during the step.
pub fn step_lowstorage<T: Scalar, Y: State<T>>(
    ls: &LowStorageForm<T>,
    f: &impl Rhs<T, Y>,
    t_now: &T,
    y: Y,
    h: &T,
) -> Result<Y, IntegrateError> {
    let mut y = y;
    let mut dy = y.zeroed();
    let c = ls.nodes();
    for i in 1..=ls.stages() {
        dy.scale(ls.coeff_a(i));
        let ti = t_now.clone() + c[i - 1].clone() * h.clone();
        f.accumulate(&ti, &y, h, &mut dy)?;
        y.axpy(ls.coeff_b(i), &dy);
    }
    Ok(y)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemId {
    P1,
    P2,
    P3,
    Linear(Rational),
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemId::P1 => f.write_str("p1"),
            ProblemId::P2 => f.write_str("p2"),
            ProblemId::P3 => f.write_str("p3"),
            ProblemId::Linear(l) => write!(f, "linear({l})"),
        }
    }
}

impl FromStr for ProblemId {
    type Err = IntegrateError;

    /// `1`, `2`, `3` (or `p1`..`p3`); `linear` needs a separate lambda.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "1" | "p1" => Ok(ProblemId::P1),
            "2" | "p2" => Ok(ProblemId::P2),
            "3" | "p3" => Ok(ProblemId::P3),
            _ => Err(IntegrateError::Argument(format!("unknown problem '{s}'"))),
        }
    }
}

/// Scalar test problem on `[t0, t_end]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TestProblem {
    pub id: ProblemId,
    pub t0: Rational,
    pub t_end: Rational,
    pub y0: f64,
}

impl TestProblem {
    /// The problem on `0 <= t <= 20` with `y(0) = 1`.
    pub fn new(id: ProblemId) -> Self {
        TestProblem {
            id,
            t0: Rational::zero(),
            t_end: Rational::from(20),
            y0: 1.0,
        }
    }

    pub fn f(&self, t: f64, y: f64) -> Result<f64, IntegrateError> {
        match &self.id {
            ProblemId::P1 => Ok(y * t.cos()),
            ProblemId::P2 => Ok(4.0 * y * t.sin().powi(3) * t.cos()),
            ProblemId::P3 => {
                if y < 0.0 {
                    return Err(IntegrateError::Step {
                        t,
                        message: format!("y = {y} < 0 in y^(3/2)"),
                    });
                }
                Ok(-0.5 * y * y.sqrt())
            }
            ProblemId::Linear(l) => Ok(l.to_f64() * y),
        }
    }

    pub fn exact(&self, t: f64) -> f64 {
        match &self.id {
            ProblemId::P1 => t.sin().exp(),
            ProblemId::P2 => t.sin().powi(4).exp(),
            ProblemId::P3 => (1.0 + 0.25 * t).powi(-2),
            ProblemId::Linear(l) => (l.to_f64() * t).exp(),
        }
    }
}

impl Rhs<f64, f64> for TestProblem {
    fn eval(&self, t: &f64, y: &f64) -> Result<f64, IntegrateError> {
        self.f(*t, *y)
    }
}

/// Which representation drives the time loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    Standard,
    LowStorage,
}

fn step_count(problem: &TestProblem, h: &Rational) -> Result<u64, IntegrateError> {
    if !h.is_positive() {
        return Err(IntegrateError::Argument(format!("step size {h} must be positive")));
    }
    let n = (&problem.t_end - &problem.t0) / h;
    if !n.is_integer() {
        return Err(IntegrateError::Argument(format!(
            "step size {h} does not divide the interval [{}, {}]",
            problem.t0, problem.t_end
        )));
    }
    n.numer().to_u64().ok_or_else(|| IntegrateError::Argument(format!("step count {n} out of range")))
}

/// Solution at `t_end` with fixed step `h` in double precision.
pub fn integrate(scheme: &Scheme, problem: &TestProblem, h: &Rational, form: Form) -> Result<f64, IntegrateError> {
    let n = step_count(problem, h)?;
    let hf = h.to_f64();
    let t0 = problem.t0.to_f64();
    let mut y = problem.y0;
    match form {
        Form::Standard => {
            let tab = scheme.tableau_f64();
            for k in 0..n {
                y = step_a_form(&tab, problem, &(t0 + k as f64 * hf), &y, &hf)?;
            }
        }
        Form::LowStorage => {
            let ls = scheme
                .low_storage_f64()
                .ok_or_else(|| IntegrateError::Argument(format!("{} has no 2N-storage form", scheme.name)))?;
            for k in 0..n {
                y = step_lowstorage(&ls, problem, &(t0 + k as f64 * hf), y, &hf)?;
            }
        }
    }
    Ok(y)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    /// `(h, d)` with `h` strictly decreasing.
    pub points: Vec<(f64, f64)>,
    pub scheme: String,
    pub problem: String,
    /// `|y_exact(t_end)|`, the scale of the roundoff floor.
    pub scale: f64,
}

impl ErrorCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("h,d\n");
        for (h, d) in &self.points {
            s.push_str(&format!("{h:.16e},{d:.16e}\n"));
        }
        s
    }
}

/// `d(h) = |y(t_end, h) - y_exact(t_end)|` for every `h`.
pub fn error_curve(scheme: &Scheme, problem: &TestProblem, h_list: &[Rational]) -> Result<ErrorCurve, IntegrateError> {
    error_curve_with(scheme, problem, h_list, Form::Standard)
}

pub fn error_curve_with(scheme: &Scheme, problem: &TestProblem, h_list: &[Rational], form: Form) -> Result<ErrorCurve, IntegrateError> {
    if h_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(IntegrateError::Argument("step sizes must be strictly decreasing".into()));
    }
    let exact = problem.exact(problem.t_end.to_f64());
    let mut points = Vec::with_capacity(h_list.len());
    for h in h_list {
        let y = integrate(scheme, problem, h, form)?;
        points.push((h.to_f64(), (y - exact).abs()));
    }
    Ok(ErrorCurve {
        points,
        scheme: scheme.name.clone(),
        problem: problem.id.to_string(),
        scale: exact.abs(),
    })
}

/// Whether `d` is too close to roundoff to be used in a fit: below
/// `1e3` machine epsilons relative to the solution size.
pub fn roundoff_dominated(d: f64, scale: f64) -> bool {
    d == 0.0 || d < 1e3 * f64::EPSILON * scale
}

/// Least-squares slope of `log d` against `log h`.
pub fn convergence_order(curve: &ErrorCurve) -> Result<f64, IntegrateError> {
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|(_, d)| !roundoff_dominated(*d, curve.scale))
        .map(|(h, d)| (h.ln(), d.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(IntegrateError::Estimation(format!(
            "{} usable points (need at least 3)",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// `inside` is row-major with row 0 at the top (largest imaginary part).
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityRaster {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub inside: Vec<bool>,
}

impl StabilityRaster {
    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        let frac = |k: usize, n: usize| if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
        Complex64::new(
            self.re_range.0 + frac(ix, self.nx) * (self.re_range.1 - self.re_range.0),
            self.im_range.1 - frac(iy, self.ny) * (self.im_range.1 - self.im_range.0),
        )
    }

    pub fn is_inside(&self, ix: usize, iy: usize) -> bool {
        self.inside[iy * self.nx + ix]
    }

    /// Fraction of grid points inside times the window area.
    pub fn area(&self) -> f64 {
        let n = self.inside.iter().filter(|x| **x).count() as f64;
        n / self.inside.len() as f64 * (self.re_range.1 - self.re_range.0) * (self.im_range.1 - self.im_range.0)
    }

    /// Plain graymap, 1 inside and 0 outside.
    pub fn to_pgm(&self) -> String {
        let mut s = format!("P2\n{} {}\n1\n", self.nx, self.ny);
        for row in self.inside.chunks(self.nx) {
            let line: Vec<&str> = row.iter().map(|x| if *x { "1" } else { "0" }).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Inside points with an outside 4-neighbour.
    pub fn to_boundary_csv(&self) -> String {
        let mut s = String::from("re,im\n");
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                if !self.is_inside(ix, iy) {
                    continue;
                }
                let out = |x: Option<usize>, y: Option<usize>| match (x, y) {
                    (Some(x), Some(y)) if x < self.nx && y < self.ny => !self.is_inside(x, y),
                    _ => false,
                };
                if out(ix.checked_sub(1), Some(iy)) || out(Some(ix + 1), Some(iy)) || out(Some(ix), iy.checked_sub(1)) || out(Some(ix), Some(iy + 1)) {
                    let z = self.point(ix, iy);
                    s.push_str(&format!("{:.16e},{:.16e}\n", z.re, z.im));
                }
            }
        }
        s
    }
}

/// `R(z) = 1 + sum_k gamma_k z^k`.
pub fn stability_polynomial<T: Scalar>(t: &ButcherTableau<T>) -> Vec<f64> {
    let mut g = vec![1.0];
    g.extend(linear_coeffs(t).gamma.iter().map(|x| x.to_f64()));
    g
}

pub fn stability_region<T: Scalar>(t: &ButcherTableau<T>, re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> StabilityRaster {
    let poly = stability_polynomial(t);
    let mut r = StabilityRaster {
        re_range: re,
        im_range: im,
        nx,
        ny,
        inside: Vec::with_capacity(nx * ny),
    };
    for iy in 0..ny {
        for ix in 0..nx {
            let z = r.point(ix, iy);
            let v = poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, g| acc * z + g);
            r.inside.push(v.norm_sqr() <= 1.0);
        }
    }
    r
}

pub fn scheme_stability_region(s: &Scheme, re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> StabilityRaster {
    match &s.coefficients {
        Coefficients::Rational(f) => stability_region(&f.tableau, re, im, nx, ny),
        Coefficients::Decimal(f) => stability_region(&f.tableau, re, im, nx, ny),
    }
}

//! Grid search over rational free parameters of the (4,3) and (5,3) solvers.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::conditions::linear_coeffs;
use crate::construct::{solve_43, solve_43_quadratic, solve_53, solve_53_coefficients, Solve43Input, Solve53Input};
use crate::numerics::{q, solve_quadratic, QuadraticRoots, Rational, Scalar};
use crate::schemes::{save_scheme, ButcherTableau, Coefficients, Scheme};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search spec: {0}")]
    Spec(String),
    #[error("io error: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    F43,
    F53,
}

impl FromStr for Family {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "43" => Ok(Family::F43),
            "53" => Ok(Family::F53),
            _ => Err(SearchError::Spec(format!("unknown family '{s}' (expected 43 or 53)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Filter {
    IncreasingNodes,
    MinWeight(Rational),
    LinearFourthOrder,
    RationalRootsOnly,
}

impl Filter {
    pub fn min_weight_default() -> Filter {
        Filter::MinWeight(q(-3, 8))
    }
}

impl FromStr for Filter {
    type Err = SearchError;

    /// `increasing_nodes`, `min_weight`, `min_weight=<rational>`,
    /// `linear_fourth_order`, `rational_roots_only`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "increasing_nodes" => return Ok(Filter::IncreasingNodes),
            "min_weight" => return Ok(Filter::min_weight_default()),
            "linear_fourth_order" => return Ok(Filter::LinearFourthOrder),
            "rational_roots_only" => return Ok(Filter::RationalRootsOnly),
            _ => {}
        }
        if let Some(v) = s.strip_prefix("min_weight=") {
            return v
                .parse()
                .map(Filter::MinWeight)
                .map_err(|e| SearchError::Spec(format!("min_weight bound: {e}")));
        }
        Err(SearchError::Spec(format!("unknown filter '{s}'")))
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::IncreasingNodes => f.write_str("increasing_nodes"),
            Filter::MinWeight(b) => write!(f, "min_weight={b}"),
            Filter::LinearFourthOrder => f.write_str("linear_fourth_order"),
            Filter::RationalRootsOnly => f.write_str("rational_roots_only"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub family: Family,
    pub max_denominator: u32,
    /// Inclusive bounds on every free node; zero itself is never a grid point.
    pub c_range: (Rational, Rational),
    pub filters: Vec<Filter>,
    pub b5_grid: Vec<Rational>,
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

impl SearchSpec {
    pub fn new(family: Family, max_denominator: u32) -> Self {
        SearchSpec {
            family,
            max_denominator,
            c_range: (Rational::zero(), Rational::one()),
            filters: Vec::new(),
            b5_grid: Vec::new(),
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.max_denominator < 2 {
            return Err(SearchError::Spec("max denominator must be at least 2".into()));
        }
        if self.c_range.0 > self.c_range.1 {
            return Err(SearchError::Spec("empty c range".into()));
        }
        if self.family == Family::F53 && self.b5_grid.is_empty() {
            return Err(SearchError::Spec("family 53 needs a b5 grid".into()));
        }
        Ok(())
    }

    fn has(&self, f: &Filter) -> bool {
        self.filters.iter().any(|g| std::mem::discriminant(g) == std::mem::discriminant(f))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub attempted: u64,
    /// Points where the solver ran without rejecting the input.
    pub admissible: u64,
    /// Points whose quadratic has at least one rational root.
    pub rational_root_hits: u64,
    pub solved: u64,
    pub survivors: u64,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, o: Counters) {
        self.attempted += o.attempted;
        self.admissible += o.admissible;
        self.rational_root_hits += o.rational_root_hits;
        self.solved += o.solved;
        self.survivors += o.survivors;
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub schemes: Vec<Scheme>,
    pub counters: Counters,
}

/// Reduced fractions `p/q`, `q <= max_den`, in `[lo, hi]` excluding zero, ascending.
pub fn farey_grid(max_den: u32, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut v = Vec::new();
    let lo_n = (lo.to_f64().floor() as i64).min(0);
    let hi_n = hi.to_f64().ceil() as i64;
    for d in 1..=max_den as i64 {
        for n in lo_n * d..=hi_n * d {
            if n == 0 || num_integer::gcd(n, d) != 1 {
                continue;
            }
            let x = q(n, d);
            if &x >= lo && &x <= hi {
                v.push(x);
            }
        }
    }
    v.sort();
    v
}

fn passes<T: Scalar>(t: &ButcherTableau<T>, filters: &[Filter], rational: bool) -> bool {
    filters.iter().all(|f| match f {
        Filter::IncreasingNodes => t.nodes().windows(2).all(|w| w[0] < w[1]),
        Filter::MinWeight(bound) => t.weights().iter().all(|w| *w >= w.lift(bound)),
        Filter::LinearFourthOrder => {
            let g = linear_coeffs(t).gamma;
            g.len() >= 4 && g[3].near(&g[3].lift(&q(1, 24)))
        }
        Filter::RationalRootsOnly => rational,
    })
}

fn keep(s: &Scheme, filters: &[Filter]) -> bool {
    match &s.coefficients {
        Coefficients::Rational(f) => passes(&f.tableau, filters, true),
        Coefficients::Decimal(f) => passes(&f.tableau, filters, false),
    }
}

fn has_rational_root(r: &QuadraticRoots) -> bool {
    matches!(r, QuadraticRoots::TwoRational(..) | QuadraticRoots::OneRational(..) | QuadraticRoots::DegenerateLinear(..))
}

/// Sort key: free parameters, then `b2` (decimal values by their exact binary value).
fn sort_key(s: &Scheme, params: &[Rational]) -> (Vec<Rational>, Rational) {
    let b2 = match &s.coefficients {
        Coefficients::Rational(f) => f.tableau.b(2).clone(),
        Coefficients::Decimal(f) => f.tableau.b(2).to_rational(),
    };
    (params.to_vec(), b2)
}

type Hit = ((Vec<Rational>, Rational), Scheme);

fn point(spec: &SearchSpec, params: &[Rational], out: &mut Vec<Hit>, n: &mut Counters) {
    n.attempted += 1;
    let rational_only = spec.has(&Filter::RationalRootsOnly);
    let sol = match spec.family {
        Family::F43 => {
            let input = Solve43Input::new(params[0].clone(), params[1].clone(), params[2].clone());
            let (a2, a1, a0) = solve_43_quadratic(&input);
            let roots = solve_quadratic(&a2, &a1, &a0);
            if has_rational_root(&roots) {
                n.rational_root_hits += 1;
            } else if rational_only {
                return;
            }
            solve_43(&input)
        }
        Family::F53 => {
            let input = Solve53Input::new(
                params[0].clone(),
                params[1].clone(),
                params[2].clone(),
                params[3].clone(),
                params[4].clone(),
            );
            let Ok(k) = solve_53_coefficients(&input) else {
                return;
            };
            let roots = solve_quadratic(&k.cubic[2], &k.cubic[1], &k.cubic[0]);
            if has_rational_root(&roots) {
                n.rational_root_hits += 1;
            } else if rational_only {
                return;
            }
            solve_53(&input)
        }
    };
    let Ok(sol) = sol else {
        return;
    };
    n.admissible += 1;
    for s in sol.schemes {
        n.solved += 1;
        if keep(&s, &spec.filters) {
            n.survivors += 1;
            out.push((sort_key(&s, params), s));
        }
    }
}

/// Points whose first free parameter is `c2`.
fn slab(spec: &SearchSpec, grid: &[Rational], c2: &Rational) -> (Vec<Hit>, Counters) {
    let increasing = spec.has(&Filter::IncreasingNodes);
    let mut out = Vec::new();
    let mut n = Counters::default();
    let free_nodes = match spec.family {
        Family::F43 => 3,
        Family::F53 => 4,
    };
    // Recursive enumeration of the remaining nodes; with increasing nodes
    // requested only ascending tuples are visited.
    fn rec(
        spec: &SearchSpec,
        grid: &[Rational],
        increasing: bool,
        left: usize,
        cur: &mut Vec<Rational>,
        out: &mut Vec<Hit>,
        n: &mut Counters,
    ) {
        if left == 0 {
            match spec.family {
                Family::F43 => point(spec, cur, out, n),
                Family::F53 => {
                    for b5 in &spec.b5_grid {
                        cur.push(b5.clone());
                        point(spec, cur, out, n);
                        cur.pop();
                    }
                }
            }
            return;
        }
        for x in grid {
            if increasing && x <= cur.last().expect("c2 present") {
                continue;
            }
            if cur.contains(x) {
                continue;
            }
            cur.push(x.clone());
            rec(spec, grid, increasing, left - 1, cur, out, n);
            cur.pop();
        }
    }
    let mut cur = vec![c2.clone()];
    rec(spec, grid, increasing, free_nodes - 1, &mut cur, &mut out, &mut n);
    (out, n)
}

/// Enumerate the grid, solve at every point, filter, deduplicate and sort.
/// The output does not depend on `jobs`.
pub fn search(spec: &SearchSpec) -> Result<SearchResult, SearchError> {
    spec.validate()?;
    let grid = farey_grid(spec.max_denominator, &spec.c_range.0, &spec.c_range.1);
    let run = || grid.par_iter().map(|c2| slab(spec, &grid, c2)).collect::<Vec<_>>();
    let slabs = if spec.jobs == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(spec.jobs)
            .build()
            .map_err(|e| SearchError::Spec(e.to_string()))?
            .install(run)
    };
    let mut counters = Counters::default();
    let mut hits = Vec::new();
    for (h, n) in slabs {
        counters += n;
        hits.extend(h);
    }
    hits.sort_by(|a, b| a.0.cmp(&b.0));
    let mut schemes: Vec<Scheme> = Vec::with_capacity(hits.len());
    for (_, s) in hits {
        if !schemes.iter().any(|t| t.coefficients == s.coefficients) {
            schemes.push(s);
        }
    }
    Ok(SearchResult { schemes, counters })
}

/// File stem for a scheme name (`/` is not allowed in file names).
pub fn file_stem(name: &str) -> String {
    name.replace('/', "d")
}

/// Write one JSON file per scheme and `summary.txt` with the counters.
pub fn write_results(dir: &Path, spec: &SearchSpec, result: &SearchResult) -> Result<(), SearchError> {
    let io = |e: std::io::Error| SearchError::Io(e.to_string());
    fs::create_dir_all(dir).map_err(io)?;
    for s in &result.schemes {
        let path = dir.join(format!("{}.json", file_stem(&s.name)));
        save_scheme(s, &path).map_err(|e| SearchError::Io(e.to_string()))?;
    }
    fs::write(dir.join("summary.txt"), summary(spec, result)).map_err(io)
}

pub fn summary(spec: &SearchSpec, result: &SearchResult) -> String {
    let n = &result.counters;
    let family = match spec.family {
        Family::F43 => "43",
        Family::F53 => "53",
    };
    let filters: Vec<String> = spec.filters.iter().map(|f| f.to_string()).collect();
    let mut s = format!(
        "family {family}\nmax_denominator {}\nc_range [{}, {}]\nfilters {}\nattempted {}\nadmissible {}\nrational_root_hits {}\nsolved {}\nsurvivors {}\nunique {}\n",
        spec.max_denominator,
        spec.c_range.0,
        spec.c_range.1,
        if filters.is_empty() { "none".to_string() } else { filters.join(",") },
        n.attempted,
        n.admissible,
        n.rational_root_hits,
        n.solved,
        n.survivors,
        result.schemes.len()
    );
    if spec.family == Family::F53 {
        let g: Vec<String> = spec.b5_grid.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("b5_grid {}\n", g.join(",")));
    }
    for sch in &result.schemes {
        s.push_str(&sch.name);
        s.push('\n');
    }
    s
}

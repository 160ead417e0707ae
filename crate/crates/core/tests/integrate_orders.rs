use lsrk::integrate::{convergence_order, error_curve, step_a_form, step_lowstorage, ProblemId, TestProblem};
use lsrk::numerics::{q, Rational};
use lsrk::schemes::{registry_get, registry_names};

fn asymptotic() -> Vec<Rational> {
    [20, 40, 80, 160, 320, 640].iter().map(|d| q(1, *d)).collect()
}

fn coarse() -> Vec<Rational> {
    [16, 20, 32, 40].iter().map(|d| q(1, *d)).collect()
}

#[test]
fn registry_orders() {
    let problems = [ProblemId::P1, ProblemId::P2, ProblemId::P3];
    for name in registry_names() {
        let s = registry_get(name).unwrap();
        for id in &problems {
            let p = TestProblem::new(id.clone());
            let c = error_curve(&s, &p, &asymptotic()).unwrap();
            // fourth-order schemes reach the roundoff floor on p3 inside the
            // asymptotic range; fall back to coarser steps there
            let k = match convergence_order(&c) {
                Ok(k) => k,
                Err(_) => convergence_order(&error_curve(&s, &p, &coarse()).unwrap()).unwrap(),
            };
            assert!(k >= s.order as f64 - 0.3, "{name} {id}: {k}");
        }
    }
}

#[test]
fn p3_monotone_and_third_order() {
    let p = TestProblem::new(ProblemId::P3);
    let s = registry_get("43-1").unwrap();
    let c = error_curve(&s, &p, &[q(1, 10), q(1, 20), q(1, 40)]).unwrap();
    assert!(c.points.windows(2).all(|w| w[1].1 < w[0].1));
    // 43-1 is nearly fourth order on this autonomous problem and is still
    // pre-asymptotic (slope about 3.8) when it reaches the roundoff floor
    let hs: Vec<Rational> = [10, 20, 40, 80, 160].iter().map(|d| q(1, *d)).collect();
    let k = convergence_order(&error_curve(&s, &p, &hs).unwrap()).unwrap();
    assert!((2.7..=4.0).contains(&k), "{k}");
    for name in ["43-b3zero", "43-2", "43-3", "43-4", "53-b4zero", "53-1", "53-2", "53-3", "53-4"] {
        let s = registry_get(name).unwrap();
        let c = error_curve(&s, &p, &[q(1, 40), q(1, 80), q(1, 160)]).unwrap();
        for w in c.points.windows(2) {
            let r = w[0].1 / w[1].1;
            assert!((6.0..=10.0).contains(&r), "{name}: {r}");
        }
    }
}

#[test]
fn linear_problem_is_fourth_order() {
    let s = registry_get("43-1").unwrap();
    let p = TestProblem::new(ProblemId::Linear(q(-1, 1)));
    let k = convergence_order(&error_curve(&s, &p, &asymptotic()).unwrap()).unwrap();
    assert!((3.7..=4.3).contains(&k), "{k}");
}

#[test]
fn constant_problem_has_no_error() {
    let s = registry_get("53-2").unwrap();
    let t = s.tableau_f64();
    let f = |_: &f64, _: &f64| Ok(1.0);
    let mut y = 0.0;
    for k in 0..400 {
        y = step_a_form(&t, &f, &(k as f64 / 20.0), &y, &(1.0 / 20.0)).unwrap();
    }
    assert!((y - 20.0).abs() < 1e-12);
}

#[test]
fn forms_agree_exactly_in_rationals() {
    let f = |t: &Rational, _: &Rational| Ok(t.clone());
    for name in registry_names() {
        let s = registry_get(name).unwrap();
        let Some(forms) = s.as_rational() else { continue };
        let Some(ls) = &forms.low_storage else { continue };
        let h = q(1, 3);
        let (mut ya, mut yl) = (q(1, 1), q(1, 1));
        for k in 0..4 {
            let t = &h * Rational::from(k);
            ya = step_a_form(&forms.tableau, &f, &t, &ya, &h).unwrap();
            yl = step_lowstorage(ls, &f, &t, yl, &h).unwrap();
            assert_eq!(ya, yl, "{name}");
        }
    }
}

#[test]
fn forms_agree_per_step_in_doubles() {
    let h = 1.0 / 20.0;
    for name in registry_names() {
        let s = registry_get(name).unwrap();
        let (tab, Some(ls)) = (s.tableau_f64(), s.low_storage_f64()) else { continue };
        for id in [ProblemId::P1, ProblemId::P2, ProblemId::P3, ProblemId::Linear(q(-1, 1))] {
            let p = TestProblem::new(id);
            let mut y = p.y0;
            for k in 0..400 {
                let t = k as f64 * h;
                let ya = step_a_form(&tab, &p, &t, &y, &h).unwrap();
                let yl = step_lowstorage(&ls, &p, &t, y, &h).unwrap();
                let rel = (ya - yl).abs() / ya.abs();
                assert!(rel <= 100.0 * f64::EPSILON, "{name} {} step {k}: {rel:e}", p.id);
                y = ya;
            }
        }
    }
}

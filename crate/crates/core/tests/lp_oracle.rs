//! Simplex versus exhaustive vertex enumeration on small bounded LPs.

mod support;

use ratfit_core::simplex::{solve_dual, solve_lp, solve_primal, LpStatus, TOL_LP};
use support::{random_lp, rng, scaled, vertex_oracle};

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = rng(2024);
    let (mut optimal, mut infeasible) = (0, 0);
    for case in 0..200 {
        let lp = random_lp(&mut rng);
        let oracle = vertex_oracle(&lp);
        for (route, sol) in [
            ("auto", solve_lp(&lp).unwrap()),
            ("primal", solve_primal(&lp).unwrap()),
            ("dual", solve_dual(&lp).unwrap()),
        ] {
            match oracle {
                Some(best) => {
                    assert_eq!(sol.status, LpStatus::Optimal, "case {case} ({route})");
                    let value = sol.objective_value.unwrap();
                    assert!((value - best).abs() <= 1e-8, "case {case} ({route}): {value} vs {best}");
                    let x = sol.x.unwrap();
                    assert!(lp.max_violation(&x) <= TOL_LP, "case {case} ({route})");
                    assert!((lp.objective_at(&x) - value).abs() < 1e-12);
                }
                None => assert_eq!(sol.status, LpStatus::Infeasible, "case {case} ({route})"),
            }
        }
        if oracle.is_some() {
            optimal += 1;
        } else {
            infeasible += 1;
        }
    }
    // The generator must exercise both outcomes.
    assert!(
        optimal > 40 && infeasible > 20,
        "{optimal} optimal / {infeasible} infeasible"
    );
}

#[test]
fn status_is_invariant_under_row_scaling() {
    let mut rng = rng(99);
    for _ in 0..200 {
        let lp = random_lp(&mut rng);
        let base = solve_lp(&lp).unwrap().status;
        let big = solve_lp(&scaled(&lp, 1e3)).unwrap().status;
        assert_eq!(base, big);
    }
}

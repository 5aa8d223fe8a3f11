use orbitcount::arith::rational::rat;
use orbitcount::counting::count_series;
use orbitcount::enumerate::definite_ball;
use orbitcount::oracles::{ideal_count_at, jacobi_r4_counts, QuaternionLattice};
use orbitcount::{presets, GramForm};

#[test]
fn jacobi_matches_ball_enumeration_on_i4() {
    let ball = definite_ball(&GramForm::identity(4), &rat(1000)).unwrap();
    let mut per = vec![0u64; 1001];
    for (m, pts) in ball {
        per[m as usize] = pts.len() as u64;
    }
    let jac = jacobi_r4_counts(1000, QuaternionLattice::Lipschitz);
    assert_eq!(&per[1..], &jac[..]);
}

#[test]
fn hurwitz_shells_match_the_theta_oracle() {
    let s = count_series(&presets::scenario("hurwitz", rat(300)).unwrap()).unwrap();
    let oracle = jacobi_r4_counts(300, QuaternionLattice::Hurwitz);
    for (m, (&orbits, &points)) in s.n_all.iter().zip(&oracle).enumerate() {
        assert_eq!(24 * orbits, points, "norm {}", m + 1);
    }
}

#[test]
fn ideal_counts_are_multiplicative() {
    for d in [-4, -8, -3, 8, 5, 12, 13] {
        for m in 1..60u64 {
            for n in 1..60u64 {
                if num_integer::gcd(m, n) == 1 {
                    assert_eq!(ideal_count_at(d, m * n).unwrap(), ideal_count_at(d, m).unwrap() * ideal_count_at(d, n).unwrap());
                }
            }
        }
    }
}

#[test]
fn hurwitz_constant_from_a_fit() {
    use orbitcount::asympt::{fit_power, sample_cumulative, Window};
    let s = count_series(&presets::scenario("hurwitz", rat(2000)).unwrap()).unwrap();
    let pts = sample_cumulative(&s, &s.n_all, &Window::top_decade(2000.0)).unwrap();
    let c = fit_power(&pts, Some(2.0)).unwrap().c_hat;
    let pred = std::f64::consts::PI.powi(2) / 24.0;
    assert!((c - pred).abs() / pred < 0.02, "{c} vs {pred}");
}

use g2_forge::dev_certify as dc;
use g2_forge::g2_lie;
use g2_forge::hitchin_solver::{self as hs, HitchinData, HitchinState, SolveOptions};
use g2_forge::scalar::rat;

#[test]
fn solved_ratio_matches_span_bound_and_invariant() {
    let d = HitchinData::hitchin(32);
    let r = hs::solve(&d, &HitchinState::zero(32), SolveOptions::default()).unwrap();
    let nm = r.state.norms(&d);
    let ratio = (nm.alpha_sq[0] / nm.beta_sq[0]).sqrt();
    assert!((ratio - dc::span_upper_bound()).abs() < 1e-9);
    assert!(dc::hitchin_span_positivity(ratio.min(dc::span_upper_bound())).unwrap());

    // the exact invariant at the solved norms (5, 3), scaled to b² = 1
    let i = g2_lie::regularity_invariant_ab(&rat(5, 3), &rat(1, 1)).unwrap();
    assert_eq!(i, rat(243, 343));
    let a2 = nm.alpha_sq[0] / nm.beta_sq[0];
    let numeric = 27.0 * (a2 + 1.0) / (a2 + 3.0).powi(3);
    assert!((numeric - 243.0 / 343.0).abs() < 1e-9);
}

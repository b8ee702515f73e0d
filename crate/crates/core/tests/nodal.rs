use heatscope_core::eigenbasis::{eval_combination, multiplicity, CoefVec, SpectrumSlice};
use heatscope_core::heat::{obs_ratio, worst_case_obs, ObsExperiment, TerminalNorm, TimeQuadrature, TraceKind, WorstCaseOptions};
use heatscope_core::pointsets::PointSet;
use heatscope_core::rng::substream;
use heatscope_core::spectral::{eval_matrix, nullspace_witness};
use rand::Rng;

fn two_random_points(seed: u64) -> PointSet {
    let mut rng = substream(seed, 0);
    let pts = (0..2).map(|_| vec![rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)]).collect();
    PointSet::explicit(pts).unwrap()
}

#[test]
fn level_fifty_eigenspace_hides_from_two_points() {
    assert_eq!(multiplicity(2, 50), 3);
    let slice = SpectrumSlice::enumerate(2, 50.0, 1.0).unwrap();
    let top: Vec<_> = slice.modes().iter().filter(|m| m.level() == 50).map(|m| m.index().components().to_vec()).collect();
    assert_eq!(top, vec![vec![1, 7], vec![5, 5], vec![7, 1]]);
    for seed in 0..10 {
        let omega = two_random_points(seed);
        let w = nullspace_witness(&slice, &omega, None).unwrap().expect("witness");
        assert!(w.residual <= 1e-10);
        assert_eq!(w.eigenvalue, Some(50.0));
        let e = eval_matrix(&slice, &omega).unwrap();
        let trace = e.apply(w.coefficients.as_slice());
        assert!(trace.iter().all(|v| v.abs() <= 1e-10));
        let exp = ObsExperiment::new(&slice, &omega, 1.0, TerminalNorm::L2, TraceKind::SupL1, TimeQuadrature::default()).unwrap();
        let r = obs_ratio(&w.coefficients, &exp).unwrap();
        assert!(r.zero_trace && r.ratio.is_infinite());
        let k = worst_case_obs(&slice, &omega, 1.0, &WorstCaseOptions::default()).unwrap();
        assert!(k.value.is_infinite());
    }
}

#[test]
fn antisymmetric_combination_vanishes_on_the_diagonal() {
    // φ_{(a,b)} − φ_{(b,a)} is odd under (x,y) ↦ (y,x)
    let slice = SpectrumSlice::enumerate(2, 50.0, 1.0).unwrap();
    let mut c = vec![0.0; slice.len()];
    c[slice.position(&[1, 7]).unwrap()] = 1.0;
    c[slice.position(&[7, 1]).unwrap()] = -1.0;
    let c = CoefVec::new(c);
    for i in 0..100 {
        let t = (i as f64 + 0.5) / 100.0;
        assert!(eval_combination(&slice, &c, &[t, t]).unwrap().abs() <= 1e-12);
    }
    let off = eval_combination(&slice, &c, &[0.2, 0.3]).unwrap();
    assert!(off.abs() > 0.1);
}

use fracpk::eigen::*;
use fracpk::*;

fn s(v: f64) -> FracOrder {
    FracOrder::new(v).unwrap()
}

fn rect(x: (f64, f64), y: (f64, f64)) -> BoxUnionDomain {
    BoxUnionDomain::new(2, vec![AxisBox::new_2d(x, y).unwrap()]).unwrap()
}

fn lambda1(dom: &BoxUnionDomain, bbox: AxisBox, counts: [usize; 2], mode: FormMode) -> f64 {
    let asm = assemble_p0_2d(dom, &GridSpec::p0(bbox, counts).unwrap(), s(0.25), mode).unwrap();
    solve_eigs(&asm, 1).unwrap().eigenvalues[0]
}

#[test]
fn p1_ladder_decreases() {
    let u = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
    for sv in [0.25, 0.5, 0.75] {
        for mode in [FormMode::Full, FormMode::Regional] {
            let est = poincare_constant(PoincareProblem::Intervals(&u, mode), s(sv), &[64, 128, 256]).unwrap();
            assert!(est.values.windows(2).all(|w| w[1] < w[0]), "s = {sv} {mode:?}: {:?}", est.values);
            assert!(!est.inconclusive);
            let lim = est.extrapolated.unwrap();
            assert!(lim > 0.0 && lim <= est.values[2]);
        }
    }
}

#[test]
fn first_eigenvalue_is_simple() {
    let sq = rect((0.0, 1.0), (0.0, 1.0));
    let e = solve_eigs(
        &assemble_p0_2d(&sq, &GridSpec::p0(sq.bounding_box().unwrap(), [8, 8]).unwrap(), s(0.25), FormMode::Full)
            .unwrap(),
        2,
    )
    .unwrap();
    assert!(e.eigenvalues[1] / e.eigenvalues[0] > 1.0 + 1e-6);
    let u = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
    let g = GridSpec::p1(AxisBox::new_1d(0.0, 1.0).unwrap(), 32).unwrap();
    for sv in [0.25, 0.75] {
        let e = solve_eigs(&assemble_p1_1d(&u, &g, s(sv), FormMode::Full).unwrap(), 3).unwrap();
        assert!(e.eigenvalues[1] / e.eigenvalues[0] > 1.0 + 1e-6);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn mass_orthogonality_on_two_boxes() {
    let dom = BoxUnionDomain::new(
        2,
        vec![AxisBox::new_2d((0.0, 1.0), (0.0, 1.0)).unwrap(), AxisBox::new_2d((2.0, 3.0), (0.0, 0.5)).unwrap()],
    )
    .unwrap();
    let asm =
        assemble_p0_2d(&dom, &GridSpec::p0(dom.bounding_box().unwrap(), [12, 4]).unwrap(), s(0.25), FormMode::Full)
            .unwrap();
    let e = solve_eigs(&asm, 4).unwrap();
    let v = e.eigenvectors.unwrap();
    let m = asm.mass.to_dense();
    let g = v.transpose() * m * &v;
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g[(i, j)] - want).abs() <= 1e-8, "({i}, {j}): {}", g[(i, j)]);
        }
    }
}

#[test]
fn translation_invariance() {
    let a = rect((0.0, 1.0), (0.0, 2.0));
    let b = a.translated([3.0, 3.0]);
    for mode in [FormMode::Full, FormMode::Regional] {
        let la = lambda1(&a, a.bounding_box().unwrap(), [6, 12], mode);
        let lb = lambda1(&b, b.bounding_box().unwrap(), [6, 12], mode);
        assert!((la - lb).abs() <= 1e-10 * la, "{mode:?}: {la} vs {lb}");
    }
}

#[test]
fn scaling_on_mapped_grids() {
    let a = rect((0.0, 1.0), (0.0, 1.0));
    let t = 2.5;
    let b = a.scaled(t);
    let la = lambda1(&a, a.bounding_box().unwrap(), [8, 8], FormMode::Full);
    let lb = lambda1(&b, b.bounding_box().unwrap(), [8, 8], FormMode::Full);
    assert!((lb - t.powf(-0.5) * la).abs() <= 1e-10 * lb);
}

#[test]
fn interval_domain_monotonicity() {
    let one = IntervalUnion::new(vec![(0.0, 1.0)]).unwrap();
    let two = IntervalUnion::new(vec![(0.0, 2.0)]).unwrap();
    let p1 = poincare_constant(PoincareProblem::Intervals(&one, FormMode::Full), s(0.75), &[32, 64, 128]).unwrap();
    let p2 = poincare_constant(PoincareProblem::Intervals(&two, FormMode::Full), s(0.75), &[32, 64, 128]).unwrap();
    assert!(p2.extrapolated.unwrap() <= p1.extrapolated.unwrap());
    for (a, b) in p1.values.iter().zip(&p2.values) {
        assert!(b <= a);
    }
}

#[test]
fn adding_cells_never_raises_lambda1() {
    let bbox = AxisBox::new_2d((0.0, 2.0), (0.0, 1.0)).unwrap();
    let mut last = f64::INFINITY;
    for x1 in [0.5, 1.0, 1.5, 2.0] {
        let l = lambda1(&rect((0.0, x1), (0.0, 1.0)), bbox, [8, 4], FormMode::Full);
        assert!(l <= last, "x1 = {x1}: {l} > {last}");
        last = l;
    }
    let l_ell = lambda1(
        &BoxUnionDomain::new(
            2,
            vec![AxisBox::new_2d((0.0, 2.0), (0.0, 0.5)).unwrap(), AxisBox::new_2d((0.0, 0.5), (0.0, 1.0)).unwrap()],
        )
        .unwrap(),
        bbox,
        [8, 4],
        FormMode::Full,
    );
    assert!(l_ell >= last);
}

#[test]
fn long_rectangle_partition_sanity() {
    for ell in [6.0, 12.0] {
        let h = 4;
        let full = rect((-ell, ell), (0.0, 1.0));
        let third = rect((-ell / 3.0, ell / 3.0), (0.0, 1.0));
        let nx = |l: f64| (2.0 * l * h as f64).round() as usize;
        let a = lambda1(&full, full.bounding_box().unwrap(), [nx(ell), h], FormMode::Full);
        let b = lambda1(&third, third.bounding_box().unwrap(), [nx(ell / 3.0), h], FormMode::Full);
        assert!(a <= b, "ell = {ell}: {a} > {b}");
    }
}

#[test]
fn asymptotics_brackets_cross_section() {
    let t = asymptotics_experiment(s(0.25), (0.0, 1.0), &[2.0, 4.0, 8.0], 3, 4).unwrap();
    assert_eq!(t.rows.len(), 9);
    for r in &t.rows {
        assert!(r.gap >= -0.02 * r.p2_omega, "{r:?}");
    }
    for k in 1..=3 {
        let g: Vec<f64> = t.rows.iter().filter(|r| r.k == k).map(|r| r.gap).collect();
        assert!(g.windows(2).all(|w| w[1] < w[0]), "k = {k}: {g:?}");
    }
    assert!(t.spectral_gap[2].1 < t.spectral_gap[0].1);
    assert!(matches!(asymptotics_experiment(s(0.6), (0.0, 1.0), &[2.0], 1, 4), Err(Error::OutOfRegime(_))));
}

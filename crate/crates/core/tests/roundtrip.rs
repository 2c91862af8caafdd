use cplab::graphs::{complete_to_plane, gen_dyadic_with_bits, gen_egw_halfplane, hex_patch, DyadicParams, EgwParams};
use cplab::harness::{
    load_genealogy, load_triangulation, packing_from_csv, packing_to_csv, save_genealogy, save_triangulation,
    HarnessError,
};
use cplab::packing::{layout, solve_radii, uniform_boundary, validate_packing, SolverOptions};
use cplab::rng::RandomSource;

#[test]
fn egw_truncation_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (g, gen) = gen_egw_halfplane(&RandomSource::new(11), EgwParams { ancestor_depth: 10, max_desc_generations: 10, ..Default::default() }).unwrap();
    save_genealogy(&dir.path().join("gen.json"), &gen).unwrap();
    save_triangulation(&dir.path().join("tri.json"), &g).unwrap();
    assert_eq!(load_genealogy(&dir.path().join("gen.json")).unwrap(), gen);
    let back = load_triangulation(&dir.path().join("tri.json")).unwrap();
    assert_eq!(back, g);
    // dyadic coordinates survive exactly
    for (a, b) in back.vertices().iter().zip(g.vertices()) {
        assert_eq!((a.x.numerator(), a.x.exponent()), (b.x.numerator(), b.x.exponent()));
    }
}

#[test]
fn packing_csv_revalidates_identically() {
    let g = complete_to_plane(&gen_dyadic_with_bits(&[1, 0, 1], DyadicParams { levels: 3, window: 8 }).unwrap()).unwrap();
    let r = solve_radii(&g, &uniform_boundary(&g, 1.0), SolverOptions::default()).unwrap();
    let p = layout(&g, &r.radii).unwrap();
    let mut text = String::from("# comment\nv,x,y,r\n");
    for line in packing_to_csv(&p) {
        text.push_str(&line);
        text.push('\n');
    }
    let back = packing_from_csv(&text, p.tolerance).unwrap();
    assert_eq!(back, p);
    let graph = g.to_simple_graph();
    assert_eq!(validate_packing(&back, &graph, 1e-6), validate_packing(&p, &graph, 1e-6));
}

#[test]
fn corrupt_json_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hex.json");
    save_triangulation(&path, &hex_patch(1).unwrap()).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let mut bad = v.clone();
    bad["vertices"][2]["row"] = serde_json::json!("up");
    std::fs::write(&path, serde_json::to_string(&bad).unwrap()).unwrap();
    match load_triangulation(&path) {
        Err(HarnessError::Schema { pointer, .. }) => assert_eq!(pointer, "vertices[2].row"),
        other => panic!("expected schema error, got {other:?}"),
    }
    // a structurally valid file whose rotation system is broken is rejected too
    let mut broken = v;
    broken["rotation"][0] = serde_json::json!([]);
    std::fs::write(&path, serde_json::to_string(&broken).unwrap()).unwrap();
    assert!(matches!(load_triangulation(&path), Err(HarnessError::Schema { .. })));
}

#[test]
fn malformed_csv_line_is_reported() {
    let err = packing_from_csv("v,x,y,r\n0,0,0,1\n1,2,zero,1\n", 1e-8).unwrap_err();
    match err {
        HarnessError::Schema { pointer, message, .. } => {
            assert_eq!(pointer, "line 3");
            assert!(message.starts_with("y:"));
        }
        other => panic!("{other:?}"),
    }
}

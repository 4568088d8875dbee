use capacity_lab_web::{gap_curves_json, lusin_optimum_json, neighborhoods_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn gap_curves_huber_stay_above_eps() {
    let req = r#"{"capacity":{"type":"huber","mu":"uniform","eps":[1,10],"delta":[1,20]},"resolutions":[11,101]}"#;
    let v = parse(gap_curves_json(req).unwrap());
    assert_eq!(v["formulation"], "open");
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 2);
    assert_eq!(curves[1]["k"].as_array().unwrap().len(), 101);
    assert!(curves[1]["inf_gap_before_collapse"].as_f64().unwrap() >= 0.1);
}

#[test]
fn gap_curves_measure_vanish() {
    let req = r#"{"capacity":{"type":"measure","mu":"uniform"},"resolutions":[101]}"#;
    let v = parse(gap_curves_json(req).unwrap());
    let g = v["curves"][0]["inf_gap_before_collapse"].as_f64().unwrap();
    assert!((g - 1.0 / 101.0).abs() < 1e-12);
}

#[test]
fn lusin_counterexample_removes_origin() {
    let req = r#"{"capacity":{"type":"huber","mu":"uniform","eps":[1,10],"delta":[3,20]},"resolution":11,"point":0,"eta":0.5,"scale_steps":2}"#;
    let v = parse(lusin_optimum_json(req).unwrap());
    assert_eq!(v["exact"]["removed"], serde_json::json!([0]));
    assert!((v["exact"]["value"].as_f64().unwrap() - 31.0 / 110.0).abs() < 1e-12);
    assert_eq!(v["edges"], serde_json::json!([[0, 1]]));
}

#[test]
fn neighborhoods_of_interval() {
    let req = r#"{"resolution":11,"lo":[2,5],"hi":[3,5],"delta":[1,10]}"#;
    let v = parse(neighborhoods_json(req).unwrap());
    assert_eq!(v["set"], serde_json::json!([4, 5, 6]));
    assert_eq!(v["open"], serde_json::json!([4, 5, 6]));
    assert_eq!(v["closed"], serde_json::json!([3, 4, 5, 6, 7]));
    assert_eq!(v["shrink"], serde_json::json!([5]));
}

#[test]
fn bad_requests_are_errors() {
    assert!(gap_curves_json("{}").is_err());
    assert!(gap_curves_json(r#"{"capacity":{"type":"measure","mu":"uniform"},"resolutions":[5000]}"#).is_err());
    assert!(neighborhoods_json(r#"{"resolution":11,"lo":[3,5],"hi":[2,5],"delta":[1,10]}"#).is_err());
    assert!(lusin_optimum_json(r#"{"capacity":{"type":"measure","mu":"uniform"},"resolution":11,"point":11,"eta":0.5,"scale_steps":2}"#).is_err());
}

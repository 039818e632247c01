use qsi_wasm::{analyze_report, exchange_report, parse_form, planted_text, toy_report};

#[test]
fn toy_report_shows_both_keys() {
    let r = toy_report().unwrap();
    assert!(r.contains("M_B matches the reference matrix: true"));
    assert!(r.contains("j_B = 57, j_A = 57"));
}

#[test]
fn exchange_agrees() {
    let r = exchange_report(101, 3, 5).unwrap();
    assert!(r.contains("keys agree"), "{r}");
    assert!(exchange_report(101, 4, 5).unwrap_err().starts_with("INVALID_PARAMETERS"));
    assert!(exchange_report(100, 3, 5).is_err());
}

#[test]
fn analyzer_finds_the_toy_component() {
    let reference = "12 26 29 41 2 29 0 12 13 48 37 45 60 16 9 43";
    let r = analyze_report(67, reference).unwrap();
    assert!(r.contains("j = 57"), "{r}");
}

#[test]
fn planted_forms_parse_back() {
    let text = planted_text(101, 5, 1).unwrap();
    let g = parse_form(101, &text).unwrap();
    assert_eq!(g.bidegree(), (5, 5));
    assert!(analyze_report(101, &text).unwrap().contains("(2,2) component"));
    assert!(parse_form(101, "1 2 3").is_err());
    assert!(parse_form(101, "1 2 x 4").is_err());
}

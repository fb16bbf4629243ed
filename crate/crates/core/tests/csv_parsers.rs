use proptest::prelude::*;
use spin_ibr::csv::{fmt_num, parse_table};
use spin_ibr::metrology::ProbDist;
use spin_ibr::noise::parse_nqcrb_csv;
use spin_ibr::optimizer::{parse_cert_csv, parse_trace_csv};
use spin_ibr::prep::PrepScheme;
use spin_ibr::readout::parse_sweep_csv;

#[test]
fn number_format_roundtrips() {
    for x in [0.0, -0.0, 1.0, 1e-300, 0.1 + 0.2, std::f64::consts::PI, -123456.789e10] {
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }
    assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
}

#[test]
fn header_and_width_are_checked() {
    assert!(parse_table("a,b\n1,2\n", &["a", "b"]).is_ok());
    assert!(parse_table("a,c\n1,2\n", &["a", "b"]).is_err());
    assert!(parse_table("a,b\n1,2,3\n", &["a", "b"]).is_err());
    assert!(parse_table("a,b\n1,x\n", &["a", "b"]).is_err());
    assert!(parse_table("", &["a", "b"]).is_err());
    for bad in ["nan", "inf", "-inf", "NaN"] {
        assert!(parse_table(&format!("a,b\n1,{bad}\n"), &["a", "b"]).is_err(), "{bad}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn parsers_reject_garbage_without_panicking(text in "\\PC{0,200}") {
        let _ = ProbDist::from_csv(&text);
        let _ = parse_sweep_csv(&text);
        let _ = parse_nqcrb_csv(&text);
        let _ = parse_trace_csv(&text);
        let _ = parse_cert_csv(&text);
        let _ = PrepScheme::from_json(&text);
    }

    #[test]
    fn parsers_survive_mangled_headers(body in "[-0-9e.,\\n]{0,120}") {
        let _ = ProbDist::from_csv(&format!("m,p,dp\n{body}"));
        let _ = parse_sweep_csv(&format!("scheme,readout,sigma,phi_opt,f_c,f_n,f_q\n{body}"));
        let _ = parse_trace_csv(&format!("iteration,f_sigma,f_zero,d_h\n{body}"));
        let _ = parse_cert_csv(&format!("seed,f_sigma,bound\n{body}"));
    }
}

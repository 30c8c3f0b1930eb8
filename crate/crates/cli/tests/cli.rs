use std::process::{Command, Output};

fn g2q(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2q")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn qchar_of_the_short_fundamental() {
    let o = g2q(&["qchar", "--monomial", "2_0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("2_0"), "{text}");
    assert!(text.contains("2_12^-1"), "{text}");

    let o = g2q(&["--format", "json", "qchar", "--label", "T:0,1,0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let chi = g2q::QPolynomial::from_json(&v["character"].to_string()).unwrap();
    assert_eq!(chi.len(), 7);
    assert_eq!(chi, g2q::fm_qcharacter(&"2_1".parse().unwrap(), g2q::Caps::default()).unwrap());
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--format", "json", "verify", "msystem", "--family", "1", "--k", "1", "--l", "1"];
    let (a, b) = (g2q(&args), g2q(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.to_string().contains("\"pass\":true"), "{v}");
}

#[test]
fn exit_codes() {
    assert_eq!(g2q(&["verify", "msystem", "--family", "2", "--k", "1", "--l", "1"]).status.code(), Some(0));
    assert_eq!(g2q(&["classify", "--family", "1", "--k", "2", "--l", "1"]).status.code(), Some(0));
    assert_eq!(g2q(&["qchar", "--monomial", "3_0"]).status.code(), Some(2));
    assert_eq!(g2q(&["qchar", "--label", "T:1,x,0"]).status.code(), Some(2));
    assert_eq!(g2q(&["qchar", "--monomial", "1_0^-1"]).status.code(), Some(2));
    assert_eq!(g2q(&["verify", "msystem", "--family", "3", "--k", "1", "--l", "1"]).status.code(), Some(2));
    assert_eq!(g2q(&["--max-terms", "10", "qchar", "--monomial", "1_0"]).status.code(), Some(3));
    assert_eq!(g2q(&["mutate", "--plan", "C1,C1,C1", "--rows", "3"]).status.code(), Some(2));
}

#[test]
fn caps_can_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_g2q"))
        .env("G2Q_MAX_TERMS", "10")
        .args(["qchar", "--monomial", "1_0"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn mutate_reports_the_grid_labels() {
    let o = g2q(&["mutate", "--plan", "C1", "--rows", "4", "--mode", "symbolic"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    for label in ["T:1,1,-7", "T:2,1,-13", "T:3,1,-19"] {
        assert!(text.contains(label), "{label} missing from\n{text}");
    }
}

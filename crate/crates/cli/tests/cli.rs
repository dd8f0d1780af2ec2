use std::path::{Path, PathBuf};
use std::process::Command;

use multinorm_cli::render::{echo_from_machine, machine};
use multinorm_cli::{
    batch_files, exit, parse_instance, process_batch, process_file, process_text, run, CliError, Mode, Output,
};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

const MACHINE: Output = Output { machine: true, trace: false };
const HUMAN: Output = Output { machine: false, trace: false };

#[test]
fn worked_examples() {
    let inst = parse_instance(&read("five_fields.mnt")).unwrap();
    assert_eq!(inst.mode, Mode::Sha);
    assert_eq!(run(&inst).unwrap().headline, "Sha(L/k) = (Z/3)^3");
    let rep = run(&parse_instance(&read("five_fields_cyclic.mnt")).unwrap()).unwrap();
    assert_eq!(rep.headline, "Sha(L/k) = Z/3");
    let rep = run(&parse_instance(&read("pell3.mnt")).unwrap()).unwrap();
    assert_eq!(rep.headline, "x=2 y=1 norm=+1");
}

#[test]
fn other_fixtures() {
    let head = |name: &str| run(&parse_instance(&read(name)).unwrap()).unwrap().headline;
    assert_eq!(head("ramified_quadratics.mnt"), "local factor = 2");
    assert_eq!(head("disjoint_pair.mnt"), "Sha(L/k) = 0");
    assert_eq!(head("overrides.mnt"), "Sha(L/k) = Z/9");
    assert_eq!(head("hnp_biquadratic.mnt"), "HNP holds (rule 2b)");
    assert_eq!(head("units_over_q.mnt"), "[Z^x : N(O_L^x)] = 2");
    assert_eq!(head("class_number.mnt"), "E_S(L/k) = 1");
    assert!(head("five_fields_validate.mnt").starts_with("valid: 5 fields"));
}

#[test]
fn empty_file_is_a_syntax_error() {
    for text in ["", "   \n\n"] {
        match parse_instance(text) {
            Err(e @ CliError::Syntax { line: 1, column: 1, .. }) => assert_eq!(e.exit_code(), exit::PARSE),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn syntax_errors_carry_location() {
    let text = "format_version = 1\nmode = \"sha\"\n[family]\np = 3\nn = \n";
    match parse_instance(text) {
        Err(CliError::Syntax { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    let text = "format_version = 1\nmode = \"sha\"\nfamly = 2\n";
    match parse_instance(text) {
        Err(CliError::Syntax { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("famly"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn exponent_equal_to_modulus_is_a_range_error() {
    let e = parse_instance(&read("bad_range.mnt")).unwrap_err();
    match &e {
        CliError::Semantic { key, .. } => assert_eq!(key, "family.vectors[0][0]"),
        other => panic!("{other:?}"),
    }
    assert_eq!(e.exit_code(), exit::VALIDATION);
    let neg = read("five_fields.mnt").replace("[1, 0]", "[-1, 0]");
    assert!(matches!(parse_instance(&neg), Err(CliError::Semantic { key, .. }) if key == "family.vectors[0][0]"));
}

#[test]
fn blocks_must_match_the_mode() {
    let missing = "format_version = 1\nmode = \"sha\"\n";
    assert!(matches!(parse_instance(missing), Err(CliError::Semantic { key, .. }) if key == "family"));
    let extra = format!("{}\n[pell]\nd = 3\n", read("five_fields.mnt"));
    assert!(matches!(parse_instance(&extra), Err(CliError::Semantic { key, .. }) if key == "pell"));
    let both = read("five_fields_hnp.mnt")
        + "\n[[hnp.fields]]\ndegree = 3\ngalois = true\nabelian = true\ncyclic = true\nclosure = \"cyclic\"\n";
    assert!(matches!(parse_instance(&both), Err(CliError::Semantic { .. })));
    let version = read("pell3.mnt").replace("format_version = 1", "format_version = 7");
    assert!(matches!(parse_instance(&version), Err(CliError::Semantic { key, .. }) if key == "format_version"));
}

#[test]
fn module_errors_name_keys() {
    let dup = read("five_fields.mnt").replace("[1, 1]", "[2, 0]");
    let p = process_text(&dup, None, MACHINE);
    assert_eq!(p.code, exit::VALIDATION);
    assert!(p.text.contains("error.key = \"family.vectors[1]\""), "{}", p.text);
}

#[test]
fn contract_violation_exit_code() {
    let text = read("overrides.mnt").replace("delta = 3", "delta = 4");
    assert_eq!(process_text(&text, None, HUMAN).code, exit::CONTRACT);
    let text = read("disjoint_pair.mnt").replace("vectors = [[1, 0], [0, 1]]", "vectors = [[1, 0], [0, 1], [1, 1]]");
    assert_eq!(process_text(&text, None, HUMAN).code, exit::CONTRACT);
}

#[test]
fn non_integral_exit_code() {
    let text = read("class_number.mnt").replace("sha_order = 1", "sha_order = 5");
    let p = process_text(&text, None, MACHINE);
    assert_eq!(p.code, exit::NON_INTEGRAL, "{}", p.text);
    assert!(p.text.contains("error.kind = \"non-integral\""));
}

#[test]
fn mode_mismatch_and_validate_command() {
    let text = read("pell3.mnt");
    assert_eq!(process_text(&text, Some(Mode::Sha), HUMAN).code, exit::VALIDATION);
    let p = process_text(&text, Some(Mode::Validate), HUMAN);
    assert_eq!(p.code, exit::OK);
    assert!(p.text.starts_with("valid pell instance"));
}

#[test]
fn machine_output_is_deterministic_and_echoes() {
    for f in batch_files(&fixture("")).unwrap() {
        let a = process_file(&f, None, MACHINE);
        let b = process_file(&f, None, MACHINE);
        assert_eq!(a, b);
        let doc: toml::Table = toml::from_str(&a.text).unwrap_or_else(|e| panic!("{}: {e}\n{}", f.display(), a.text));
        assert_eq!(doc["schema_version"].as_integer(), Some(1));
        if let Ok(inst) = parse_instance(&std::fs::read_to_string(&f).unwrap()) {
            assert_eq!(echo_from_machine(&a.text).unwrap(), inst, "{}", f.display());
        }
    }
}

#[test]
fn batch_matches_sequential() {
    let files = batch_files(&fixture("")).unwrap();
    assert!(files.len() >= 10);
    let seq: Vec<_> = files.iter().map(|f| process_file(f, Some(Mode::Validate), MACHINE)).collect();
    assert_eq!(process_batch(&files, Some(Mode::Validate), MACHINE), seq);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_multinorm");
    let out = Command::new(bin).args(["pell", "3"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("x=2 y=1 norm=+1\n"));
    let out = Command::new(bin).arg("sha").arg(fixture("five_fields.mnt")).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("Sha(L/k) = (Z/3)^3\n"));
    let out = Command::new(bin).arg("sha").arg(fixture("bad_range.mnt")).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::VALIDATION));
    let out = Command::new(bin).args(["hnp", "--rules", "case 3"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);
    let out = Command::new(bin).arg("sha").arg(fixture("missing.mnt")).output().unwrap();
    assert_eq!(out.status.code(), Some(exit::PARSE));
}

fn family_text(p: u64, n: u32, vectors: &[[u64; 2]], mode: &str) -> String {
    let vs: Vec<String> = vectors.iter().map(|v| format!("[{}, {}]", v[0], v[1])).collect();
    format!(
        "format_version = 1\nmode = \"{mode}\"\n\n[family]\np = {p}\nn = {n}\nprimes = [2, 5]\nvectors = [{}]\n",
        vs.join(", ")
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn instances_round_trip(
        (p, n, vs) in prop_oneof![Just((2u64, 3u32)), Just((3, 2)), Just((5, 1)), Just((3, 3))]
            .prop_flat_map(|(p, n)| {
                let q = p.pow(n);
                (Just(p), Just(n), prop::collection::vec([0..q, 0..q], 1..5))
            }),
        mode in prop_oneof![Just("sha"), Just("validate"), Just("hnp")],
    ) {
        let text = family_text(p, n, &vs, mode);
        let inst = parse_instance(&text).unwrap();
        prop_assert_eq!(&parse_instance(&inst.to_toml()).unwrap(), &inst);
        if let Ok(rep) = run(&inst) {
            let doc = machine(&rep);
            let echoed = echo_from_machine(&doc).unwrap();
            prop_assert_eq!(echoed, inst);
        }
    }

    #[test]
    fn pell_command_matches_solver(d in 2u64..5000) {
        let s = (d as f64).sqrt() as u64;
        prop_assume!(s * s != d && (s + 1) * (s + 1) != d);
        let text = format!("format_version = 1\nmode = \"pell\"\n[pell]\nd = {d}\n");
        let p = process_text(&text, Some(Mode::Pell), MACHINE);
        prop_assert_eq!(p.code, 0);
        let doc: toml::Table = toml::from_str(&p.text).unwrap();
        let norm = doc["result"]["norm"].as_integer().unwrap();
        let sol = multinorm::units::pell_fundamental(d).unwrap();
        prop_assert_eq!(norm, i64::from(sol.norm_sign));
    }
}

mod common;

use common::{cases, golden_dir, run};

/// Set `REGENERATE_GOLDEN=1` to rewrite the files after an intended change.
#[test]
fn outputs_match_golden_files() {
    let regen = std::env::var_os("REGENERATE_GOLDEN").is_some();
    for case in cases() {
        let (code, text) = run(&case.args);
        assert_eq!(code, case.code, "{}: {text}", case.name);
        let path = golden_dir().join(case.name);
        if regen {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        assert!(text == want, "{} differs from its golden file", case.name);
    }
}

#[test]
fn help_and_usage_errors() {
    let (code, text) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(text.contains("fit-bc") && text.contains("multiplier-law"));
    assert_eq!(run(&["fit-sn"]).0, 2);
    assert_eq!(run(&["fit-sn", "--map", "{", "--mu", "0.1"]).0, 2);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("conjugacy-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("catalog.json");
    let (code, text) = run(&["catalog", "--output", path.to_str().unwrap()]);
    assert_eq!((code, text.as_str()), (0, ""));
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, std::fs::read_to_string(golden_dir().join("catalog.json")).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

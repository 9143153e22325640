use std::fs;
use std::process::{Command, Output};
use tpa_core::scenario::{ScenarioConfig, CSV_HEADER};

fn tpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn rate_csv_has_exact_header_and_one_row() {
    let out = tpa(&["rate", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines = data_lines(&text);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 5);
    assert_eq!(fields[1], "nm");
    assert!(fields[2].parse::<f64>().unwrap() > 0.0);
    assert!(text.contains("# config_hash: "));
}

#[test]
fn sweep_csv_row_count_equals_steps() {
    let out = tpa(&["sweep", "--format", "csv", "--set", "sweep.steps=13", "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(data_lines(&stdout(&out)).len(), 14);
}

#[test]
fn monochromatic_rows_leave_entangled_columns_empty() {
    let out = tpa(&["rate", "--format", "csv", "--set", "scenario=table1-mono-fiber"]);
    let text = stdout(&out);
    let row = data_lines(&text)[1];
    assert!(row.ends_with(",,"), "{row}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for p in [&a, &b] {
            let out = tpa(&["sweep", "--format", format, "--set", "sweep.steps=5", "--output", p.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0));
        }
        let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
        // output.path differs and is echoed, so compare everything else
        let strip = |t: &str| t.lines().filter(|l| !l.contains("output.path") && !l.contains("config_hash")).collect::<Vec<_>>().join("\n");
        assert_eq!(strip(&ta), strip(&tb));
    }
    let x = stdout(&tpa(&["table1", "--format", "json"]));
    let y = stdout(&tpa(&["table1", "--format", "json"]));
    assert_eq!(x, y);
}

#[test]
fn json_document_round_trips_parameters() {
    let out = tpa(&["rate", "--set", "fiber.diameter_nm=400", "--set", "pair.detuning_nm=3.3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["command"], "rate");
    assert_eq!(doc["config_hash"].as_str().unwrap().len(), 64);
    let params = serde_json::from_value(doc["parameters"].clone()).unwrap();
    let cfg = ScenarioConfig::from_parameters(&params).unwrap();
    assert_eq!(cfg.fiber_diameter_nm, 400.0);
    assert_eq!(cfg.pair_detuning_nm, 3.3);
    assert_eq!(cfg.parameters(), params);
    let rate = doc["result"]["rate"].as_f64().unwrap();
    let direct = tpa_core::scenario::run_scenario(&cfg).unwrap().rate;
    assert_eq!(rate, direct);
}

#[test]
fn config_file_and_override_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    fs::write(&path, "[fiber]\ndiameter_nm = 400\n\n[pair]\nkind = \"monochromatic\"\n").unwrap();
    let p = path.to_str().unwrap();
    let from_file = stdout(&tpa(&["rate", "--config", p]));
    let doc: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    assert_eq!(doc["parameters"]["fiber.diameter_nm"], 400.0);
    assert_eq!(doc["parameters"]["pair.kind"], "monochromatic");
    let overridden = stdout(&tpa(&["rate", "--config", p, "--set", "fiber.diameter_nm=450"]));
    let doc: serde_json::Value = serde_json::from_str(&overridden).unwrap();
    assert_eq!(doc["parameters"]["fiber.diameter_nm"], 450.0);
}

#[test]
fn config_errors_exit_with_2_and_name_the_key() {
    let out = tpa(&["rate", "--set", "fiber.diamter_nm=400"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fiber.diamter_nm"));
    let out = tpa(&["rate", "--set", "fiber.diameter_nm=-4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fiber.diameter_nm"));
    assert_eq!(tpa(&["mode", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(tpa(&["rate", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(tpa(&["rate", "--config", "/nonexistent/cfg.toml"]).status.code(), Some(2));
    assert_eq!(tpa(&["bogus"]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_with_3() {
    let out = tpa(&["rate", "--set", "pair.bandwidth_nm=0.0001"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("accuracy"));
}

#[test]
fn io_errors_exit_with_4() {
    let out = tpa(&["rate", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/out.json"));
}

#[test]
fn every_subcommand_runs() {
    for cmd in ["mode", "rate", "sweep", "optimize", "table1", "coincidence"] {
        let out = tpa(&[cmd]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(doc["command"], cmd);
    }
    let out = tpa(&["coincidence", "--format", "csv"]);
    assert_eq!(data_lines(&stdout(&out)).len(), 42);
}

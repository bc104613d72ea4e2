mod common;

use common::*;
use serde_json::Value;

const CORPUS: &str = "\
Rojen [[l.]]((leta)) 1881 v Trstu.
Več o tem [[gl.]]((glej)) spodaj.
[[u.]]((umrl)) 1950 v Ljubljani.
";

fn candidates(list: &[(&str, f64)]) -> String {
    let items: Vec<String> = list
        .iter()
        .map(|(t, s)| format!("{{\"token\": \"{t}\", \"score\": {s}}}"))
        .collect();
    format!("{{\"candidates\": [{}]}}", items.join(", "))
}

/// Answers by the word right after the mask, ignoring the masked slot.
fn fill_mask_fixture(path: &str, body: &Value) -> (u16, String) {
    if path != "/fill-mask" {
        return (404, "{}".to_string());
    }
    let i = body["mask_index"].as_u64().unwrap() as usize;
    let next = body["tokens"].get(i + 1).and_then(Value::as_str).unwrap_or("");
    let list: &[(&str, f64)] = match next {
        "1881" => &[("leta", 0.4), ("v", 0.3), ("je", 0.2)],
        "spodaj." => &[("je", 0.5), ("v", 0.4), ("na", 0.3), ("leta", 0.2), ("bil", 0.1)],
        "1950" => &[("in", 0.6), ("umrl", 0.3)],
        _ => &[],
    };
    (200, candidates(list))
}

#[test]
fn log_rows_follow_the_acceptance_rule() {
    let url = fixture_server(fill_mask_fixture);
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "fix.txt", CORPUS);
    let o = abbrx(
        &["expand", "fix.txt", "--method", "gold", "--provider", "http", "--endpoint", &url, "--out", "ex"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        read(dir.path().join("ex/expansion_log.tsv")),
        "doc_id\tsent_index\tposition\tsurface\taction\texpansion\trank\n\
         fix\t0\t1\tl.\texpanded\tleta\t1\n\
         fix\t1\t3\tgl.\tkept\t-\t-\n\
         fix\t2\t0\tu.\texpanded\tumrl\t2\n"
    );
    assert_eq!(
        read(dir.path().join("ex/expanded.txt")),
        "Rojen leta 1881 v Trstu.\nVeč o tem [[gl.]]((glej)) spodaj.\numrl 1950 v Ljubljani.\n"
    );
    assert!(stdout(&o).contains("expanded 2 of 3 flagged abbreviations, kept 1"));
}

#[test]
fn zero_flags_leave_the_corpus_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let bio = fixture("bio.txt");
    write(dir.path(), "none.txt", "# nothing here\n");
    let o = abbrx(
        &["expand", bio.to_str().unwrap(), "--method", "dict", "--dict", "none.txt", "--lm-train", bio.to_str().unwrap(), "--out", "ex"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2), "an empty dictionary is rejected");

    let plain = write(dir.path(), "plain.txt", "Brez okrajšav v tem stavku.\nTudi tukaj jih ni.\n");
    let o = abbrx(
        &["expand", "plain.txt", "--method", "gold", "--lm-train", bio.to_str().unwrap(), "--out", "ex"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read(dir.path().join("ex/expanded.txt")), read(plain));
    assert_eq!(
        read(dir.path().join("ex/expansion_log.tsv")),
        "doc_id\tsent_index\tposition\tsurface\taction\texpansion\trank\n"
    );
}

#[test]
fn native_provider_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let train = fixture("train.txt");
    let held = fixture("heldout.txt");
    let o = abbrx(
        &["expand", held.to_str().unwrap(), "--method", "gold", "--lm-train", train.to_str().unwrap(), "--out", "ex"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let log = read(dir.path().join("ex/expansion_log.tsv"));
    assert_eq!(log.lines().count(), 6);
    assert!(log.contains("heldout\t0\t1\tl.\texpanded\tleta\t1\n"), "{log}");
    assert!(log.contains("heldout\t2\t4\tl.\texpanded\tleta\t2\n"), "{log}");
    let conllu = read(dir.path().join("ex/expanded.conllu"));
    assert!(conllu.starts_with("# newdoc id = heldout\n"));
}

#[test]
fn malformed_provider_reply() {
    let url = fixture_server(|_, _| (200, "{not json".to_string()));
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "fix.txt", CORPUS);
    let o = abbrx(
        &["expand", "fix.txt", "--method", "gold", "--provider", "http", "--endpoint", &url, "--out", "ex"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(!dir.path().join("ex/expansion_log.tsv").exists());
}

#[test]
fn provider_down() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "fix.txt", CORPUS);
    let o = abbrx(
        &["expand", "fix.txt", "--method", "gold", "--provider", "http", "--endpoint", &dead_endpoint(), "--out", "ex"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("unavailable"));
}

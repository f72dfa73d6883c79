use std::collections::BTreeSet;
use std::path::Path;

use attrib_core::datasets::{
    append_drop_log, read_canonical, reformat_hagrid, reformat_verifiability, write_canonical, CanonicalRecord,
    DropEntry, Split,
};
use serde_json::json;

fn write_lines(dir: &Path, name: &str, lines: &[serde_json::Value]) {
    let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    std::fs::write(dir.join(name), text).unwrap();
}

fn gold(r: &CanonicalRecord) -> Vec<BTreeSet<usize>> {
    r.answer().sentences().iter().map(|s| s.gold_attributions.clone()).collect()
}

fn texts(r: &CanonicalRecord) -> Vec<&str> {
    r.document().sentences().iter().map(|s| s.text.as_str()).collect()
}

fn verifiability_answer(id: &str, judgment: &str, support: &str) -> serde_json::Value {
    json!({
        "question_id": id, "question": "Q?", "answer_id": format!("{id}-a"),
        "sentences": [{"text": "Claim [1].", "citations": [
            {"page_id": "p", "judgment": judgment, "supporting_sentences": [support]}]}],
        "pages": [{"page_id": "p", "content": "Only sentence here. Another one."}]
    })
}

#[test]
fn verifiability_pseudo_document_and_gold_positions() {
    let dir = tempfile::tempdir().unwrap();
    write_lines(
        dir.path(),
        "train.jsonl",
        &[json!({
            "question_id": "q1",
            "question": "Which letters come first?",
            "answer_id": "bing-q1",
            "sentences": [
                {"text": "Alpha and gamma lead [1].", "citations": [
                    {"page_id": "p1", "judgment": "full",
                     "supporting_sentences": ["Alpha is first.", "Gamma is third."]}]},
                {"text": "Epsilon follows [2].", "citations": [
                    {"page_id": "p2", "judgment": "full", "supporting_sentences": ["Epsilon is fifth."]}]},
                {"text": "Delta is there too [2].", "citations": [
                    {"page_id": "p2", "judgment": "fully", "supporting_sentences": ["delta  IS fourth."]}]}
            ],
            "pages": [
                {"page_id": "p2", "content": "Delta is fourth. Alpha is first. Epsilon is fifth."},
                {"page_id": "p1", "content": "Alpha is first. Beta is second. Gamma is third."}
            ]
        })],
    );
    let out = reformat_verifiability(dir.path()).unwrap();
    assert!(out.dropped.is_empty(), "{:?}", out.dropped);
    assert_eq!(out.records.len(), 1);
    let r = &out.records[0];
    assert_eq!(r.split, Split::Train);
    assert_eq!(r.answer_id(), "bing-q1");
    // p1 is cited first; the repeated "Alpha is first." on p2 merges into 0.
    assert_eq!(
        texts(r),
        ["Alpha is first.", "Beta is second.", "Gamma is third.", "Delta is fourth.", "Epsilon is fifth."]
    );
    let expect: Vec<BTreeSet<usize>> = vec![[0, 2].into(), [4].into(), [3].into()];
    assert_eq!(gold(r), expect);
    assert_eq!(r.answer().sentences()[0].text, "Alpha and gamma lead.");
}

#[test]
fn verifiability_drops_are_accounted_for() {
    let dir = tempfile::tempdir().unwrap();
    write_lines(
        dir.path(),
        "dev.jsonl",
        &[
            verifiability_answer("ok", "full", "Only sentence here."),
            verifiability_answer("partial", "partially", "Only sentence here."),
            verifiability_answer("dangling", "full", "Not on the page."),
            json!({"question_id": "bare", "question": "Q?", "sentences": [{"text": "No cite."}], "pages": []}),
        ],
    );
    std::fs::write(
        dir.path().join("test.jsonl"),
        "{not json\n\n".to_string() + &verifiability_answer("t", "full", "Another one.").to_string() + "\n",
    )
    .unwrap();
    let out = reformat_verifiability(dir.path()).unwrap();
    assert_eq!(out.seen, out.records.len() + out.dropped.len());
    let kept: Vec<&str> = out.records.iter().map(|r| r.question_id()).collect();
    assert_eq!(kept, ["ok", "t"]);
    assert_eq!(out.records[1].split, Split::Test);
    let reasons: Vec<(Option<&str>, usize, &str)> = out
        .dropped
        .iter()
        .map(|d| (d.question_id.as_deref(), d.line, d.reason.as_str()))
        .collect();
    assert_eq!(reasons.len(), 4);
    assert_eq!(reasons[0].0, Some("partial"));
    assert!(reasons[0].2.contains("not fully supporting"));
    assert!(reasons[1].2.contains("not found"));
    assert!(reasons[2].2.contains("no citations"));
    assert_eq!((reasons[3].0, reasons[3].1), (None, 1));
    assert!(reasons[3].2.contains("malformed"));

    let log = dir.path().join("drops.jsonl");
    append_drop_log(&out.dropped, &log).unwrap();
    append_drop_log(&out.dropped[..1], &log).unwrap();
    let lines: Vec<DropEntry> = std::fs::read_to_string(&log)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4], out.dropped[0]);
}

#[test]
fn partial_judgment_yields_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write_lines(dir.path(), "train.jsonl", &[verifiability_answer("q", "partial", "Only sentence here.")]);
    let out = reformat_verifiability(dir.path()).unwrap();
    assert!(out.records.is_empty());
    assert_eq!(out.dropped.len(), 1);
}

fn hagrid_question(qid: serde_json::Value, answers: serde_json::Value) -> serde_json::Value {
    json!({
        "query_id": qid, "query": "What are A and C?",
        "quotes": [{"idx": 1, "text": "Passage one says A is B."}, {"idx": 2, "text": "Passage two says C is D."}],
        "answers": answers
    })
}

#[test]
fn hagrid_markers_become_gold() {
    let dir = tempfile::tempdir().unwrap();
    write_lines(
        dir.path(),
        "dev.jsonl",
        &[
            hagrid_question(json!(7), json!([{"answer": "A is B [1]. C is D [2]. Nothing cited here."}])),
            hagrid_question(
                json!("8"),
                json!([{"answer": "ignored", "sentences": [
                    {"text": "A is B [1].", "attributable": 1},
                    {"text": "C is D [2].", "attributable": 0}]}]),
            ),
            hagrid_question(json!("9"), json!([{"answer": "E is F [3]."}, {"answer": "A again [1]."}])),
            hagrid_question(json!("10"), json!([])),
        ],
    );
    write_lines(dir.path(), "test.jsonl", &[hagrid_question(json!(99), json!([{"answer": "X [1]."}]))]);
    let out = reformat_hagrid(dir.path()).unwrap();
    assert_eq!(out.seen, out.records.len() + out.dropped.len());

    let first = &out.records[0];
    assert_eq!((first.question_id(), first.answer_id()), ("7", "7-0"));
    assert_eq!(first.split, Split::Dev);
    assert_eq!(texts(first), ["Passage one says A is B.", "Passage two says C is D."]);
    let s: Vec<&str> = first.answer().sentences().iter().map(|s| s.text.as_str()).collect();
    assert_eq!(s, ["A is B.", "C is D.", "Nothing cited here."]);
    let expect: Vec<BTreeSet<usize>> = vec![[0].into(), [1].into(), BTreeSet::new()];
    assert_eq!(gold(first), expect);

    let annotated = &out.records[1];
    let expect: Vec<BTreeSet<usize>> = vec![[0].into(), BTreeSet::new()];
    assert_eq!(gold(annotated), expect);

    let ids: Vec<&str> = out.records.iter().map(|r| r.answer_id()).collect();
    assert_eq!(ids, ["7-0", "8-0", "9-1"]);
    assert!(out.records.iter().all(|r| r.question_id() != "99"));
    let reasons: Vec<&str> = out.dropped.iter().map(|d| d.reason.as_str()).collect();
    assert_eq!(reasons.len(), 2);
    assert!(reasons[0].contains("[3]"));
    assert!(reasons[1].contains("no answers"));
}

#[test]
fn round_trip_preserves_records() {
    let dir = tempfile::tempdir().unwrap();
    write_lines(
        dir.path(),
        "train.jsonl",
        &[hagrid_question(json!(1), json!([{"answer": "A is B [1]. Unicode caf\u{e9} [2]."}]))],
    );
    let out = reformat_hagrid(dir.path()).unwrap();
    let path = dir.path().join("nested/canonical.jsonl");
    write_canonical(&out.records, &path).unwrap();
    assert_eq!(read_canonical(&path).unwrap(), out.records);
}

#[test]
fn missing_raw_directory_names_it() {
    let err = reformat_hagrid("/definitely/not/here").unwrap_err();
    assert!(err.to_string().contains("/definitely/not/here"));
    let empty = tempfile::tempdir().unwrap();
    let err = reformat_verifiability(empty.path()).unwrap_err();
    assert!(err.to_string().contains("train.jsonl"), "{err}");
}

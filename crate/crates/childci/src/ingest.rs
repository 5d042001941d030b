//! Session log parsing, validation and dataset assembly.
//!
//! The canonical on-disk format is line-delimited JSON: a header object on
//! the first line, then one event object per line (`sample`, `target` or
//! `ui`), timestamps in integer milliseconds, time-ordered. A directory of
//! session files plus a `subjects.csv` index (columns `child_id,age_months`)
//! forms a dataset.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{
    Action, ChildId, InputKind, Screen, Stroke, SubjectRecord, TargetEvent, TestId, TestSession,
    TouchSample, UiStateEvent,
};

pub const SCHEMA_VERSION: &str = "childci/1";

/// Supported session file layouts. The published database export layout is
/// reserved until its field mapping is pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionFormat {
    Canonical,
    DbExport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    pub line: usize,
    pub code: String,
    pub message: String,
}

/// A parsed session together with non-fatal parser warnings.
#[derive(Debug, Clone)]
pub struct ParsedSession {
    pub session: TestSession,
    pub warnings: Vec<ParseWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warn,
    Fatal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub severity: Severity,
    pub code: String,
    pub message: String,
}

/// Validation outcome for one session. Fatal issues exclude the session from
/// datasets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub child_id: ChildId,
    pub test_id: TestId,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_fatal(&self) -> bool {
        self.issues.iter().any(|i| i.severity == Severity::Fatal)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub schema: String,
}

/// Subjects with validated sessions, ordered by child id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub subjects: Vec<SubjectRecord>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn subject(&self, id: &ChildId) -> Option<&SubjectRecord> {
        self.subjects.iter().find(|s| s.child_id() == id)
    }

    pub fn session_count(&self) -> usize {
        self.subjects.iter().map(|s| s.sessions().len()).sum()
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct Header {
    schema: String,
    child_id: ChildId,
    test_id: TestId,
    input: InputKind,
    screen: Screen,
    duration_ms: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Event {
    Sample {
        #[serde(flatten)]
        sample: TouchSample,
    },
    Target {
        #[serde(flatten)]
        target: TargetEvent,
    },
    Ui {
        #[serde(flatten)]
        ui: UiStateEvent,
    },
}

const HEADER_KEYS: &[&str] = &["schema", "child_id", "test_id", "input", "screen", "duration_ms"];
const SAMPLE_KEYS: &[&str] = &["type", "t", "x", "y", "pressure", "pointer_id", "action"];
const TARGET_KEYS: &[&str] = &["type", "t", "kind", "center", "radius", "points"];
const UI_KEYS: &[&str] = &["type", "t", "scale", "on_target"];

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn check_unknown_keys(
    value: &Value,
    allowed: &[&str],
    line: usize,
    warnings: &mut Vec<ParseWarning>,
) {
    if let Some(map) = value.as_object() {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                warnings.push(ParseWarning {
                    line,
                    code: "unknown_field".into(),
                    message: format!("ignoring unknown field {key:?}"),
                });
            }
        }
    }
}

/// Parses one canonical session document.
///
/// Unknown fields are ignored with a warning; structural problems (bad JSON,
/// out-of-range pressure, non-monotone timestamps, malformed pointer
/// sequences) are errors carrying the offending line number.
pub fn parse_session(input: &str) -> Result<ParsedSession> {
    let mut warnings = Vec::new();
    let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

    let (header_idx, header_line) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty document, expected header line"))?;
    let header_value: Value = serde_json::from_str(header_line)
        .map_err(|e| parse_err(header_idx + 1, format!("invalid header json: {e}")))?;
    check_unknown_keys(&header_value, HEADER_KEYS, header_idx + 1, &mut warnings);
    let header: Header = serde_json::from_value(header_value)
        .map_err(|e| parse_err(header_idx + 1, format!("invalid header: {e}")))?;

    if header.schema != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            got: header.schema,
            expected: SCHEMA_VERSION.to_string(),
        });
    }
    if header.test_id.input() != header.input {
        return Err(parse_err(
            header_idx + 1,
            format!(
                "test {} requires {} input, header says {}",
                header.test_id,
                header.test_id.input(),
                header.input
            ),
        ));
    }

    let mut open: BTreeMap<u32, Stroke> = BTreeMap::new();
    let mut strokes: Vec<Stroke> = Vec::new();
    let mut targets: Vec<TargetEvent> = Vec::new();
    let mut ui_states: Vec<UiStateEvent> = Vec::new();
    let mut last_t: i64 = i64::MIN;

    for (idx, line) in lines {
        let lineno = idx + 1;
        let value: Value = serde_json::from_str(line)
            .map_err(|e| parse_err(lineno, format!("invalid json: {e}")))?;
        let allowed = match value.get("type").and_then(Value::as_str) {
            Some("sample") => SAMPLE_KEYS,
            Some("target") => TARGET_KEYS,
            Some("ui") => UI_KEYS,
            other => {
                return Err(parse_err(
                    lineno,
                    format!("unknown event type {other:?}"),
                ))
            }
        };
        check_unknown_keys(&value, allowed, lineno, &mut warnings);
        let event: Event = serde_json::from_value(value)
            .map_err(|e| parse_err(lineno, format!("invalid event: {e}")))?;

        let t = match &event {
            Event::Sample { sample } => sample.t,
            Event::Target { target } => target.t,
            Event::Ui { ui } => ui.t,
        };
        if t < 0 {
            return Err(parse_err(lineno, format!("negative timestamp {t}")));
        }
        if t < last_t {
            return Err(parse_err(
                lineno,
                format!("non-monotone timestamp: {t} after {last_t}"),
            ));
        }
        last_t = t;

        match event {
            Event::Sample { sample } => {
                if !(0.0..=1.0).contains(&sample.pressure) {
                    return Err(parse_err(
                        lineno,
                        format!("pressure out of range: {}", sample.pressure),
                    ));
                }
                match sample.action {
                    Action::Down => {
                        if open.contains_key(&sample.pointer_id) {
                            return Err(parse_err(
                                lineno,
                                format!("pointer {} already down", sample.pointer_id),
                            ));
                        }
                        open.insert(
                            sample.pointer_id,
                            Stroke {
                                pointer_id: sample.pointer_id,
                                samples: vec![sample],
                            },
                        );
                    }
                    Action::Move | Action::Up => {
                        let stroke = open.get_mut(&sample.pointer_id).ok_or_else(|| {
                            parse_err(
                                lineno,
                                format!(
                                    "{:?} event for pointer {} without a down",
                                    sample.action, sample.pointer_id
                                ),
                            )
                        })?;
                        let is_up = sample.action == Action::Up;
                        stroke.samples.push(sample);
                        if is_up {
                            strokes.push(open.remove(&sample.pointer_id).unwrap());
                        }
                    }
                }
            }
            Event::Target { target } => {
                if !target.geometry.well_formed_for(target.kind) {
                    return Err(parse_err(
                        lineno,
                        format!("malformed geometry for target kind {:?}", target.kind),
                    ));
                }
                targets.push(target);
            }
            Event::Ui { ui } => {
                if ui.scale <= 0.0 {
                    return Err(parse_err(lineno, format!("non-positive scale {}", ui.scale)));
                }
                ui_states.push(ui);
            }
        }
    }

    for (_, stroke) in open {
        warnings.push(ParseWarning {
            line: 0,
            code: "unterminated_stroke".into(),
            message: format!(
                "pointer {} stroke had no up event; closed at end of log",
                stroke.pointer_id
            ),
        });
        strokes.push(stroke);
    }
    strokes.sort_by_key(|s| (s.start().t, s.pointer_id));

    if matches!(header.test_id, TestId::T3 | TestId::T4) && ui_states.is_empty() {
        warnings.push(ParseWarning {
            line: 0,
            code: "no_ui_states".into(),
            message: "zoom session carries no ui events; scale falls back to finger distance"
                .into(),
        });
    }

    Ok(ParsedSession {
        session: TestSession {
            child_id: header.child_id,
            test_id: header.test_id,
            input: header.input,
            screen: header.screen,
            duration_ms: header.duration_ms,
            strokes,
            targets,
            ui_states,
        },
        warnings,
    })
}

/// Parses a session in the given format. Only the canonical layout is
/// currently mapped.
pub fn parse_session_with_format(format: SessionFormat, input: &str) -> Result<ParsedSession> {
    match format {
        SessionFormat::Canonical => parse_session(input),
        SessionFormat::DbExport => Err(Error::UnsupportedFormat(
            "db export layout is not mapped; convert to the canonical line-delimited format"
                .into(),
        )),
    }
}

/// Serializes a session to the canonical line-delimited format. Events are
/// emitted time-ordered with a stable tie order, so `parse(write(s))`
/// round-trips every canonical field.
pub fn write_session(session: &TestSession) -> String {
    let header = Header {
        schema: SCHEMA_VERSION.to_string(),
        child_id: session.child_id.clone(),
        test_id: session.test_id,
        input: session.input,
        screen: session.screen,
        duration_ms: session.duration_ms,
    };
    let mut out = String::new();
    writeln_json(&mut out, &header);

    let mut events: Vec<(i64, usize, Event)> = Vec::new();
    let mut seq = 0usize;
    for stroke in &session.strokes {
        for sample in &stroke.samples {
            events.push((sample.t, seq, Event::Sample { sample: *sample }));
            seq += 1;
        }
    }
    for target in &session.targets {
        events.push((
            target.t,
            seq,
            Event::Target {
                target: target.clone(),
            },
        ));
        seq += 1;
    }
    for ui in &session.ui_states {
        events.push((ui.t, seq, Event::Ui { ui: *ui }));
        seq += 1;
    }
    events.sort_by_key(|(t, seq, _)| (*t, *seq));
    for (_, _, event) in &events {
        writeln_json(&mut out, event);
    }
    out
}

fn writeln_json<T: Serialize>(out: &mut String, value: &T) {
    let line = serde_json::to_string(value).expect("json serialization cannot fail");
    let _ = writeln!(out, "{line}");
}

/// Checks semantic session invariants. Fatal: no strokes, an empty stroke,
/// duration over the test limit, or a zoom session with neither a two-pointer
/// overlap nor ui events.
pub fn validate_session(session: &TestSession) -> ValidationReport {
    let mut issues = Vec::new();
    let fatal = |code: &str, message: String| Issue {
        severity: Severity::Fatal,
        code: code.into(),
        message,
    };

    if session.strokes.is_empty() {
        issues.push(fatal("no_strokes", "session has no strokes".into()));
    }
    for (i, stroke) in session.strokes.iter().enumerate() {
        if stroke.samples.is_empty() {
            issues.push(fatal("empty_stroke", format!("stroke {i} has no samples")));
        }
    }
    let limit = session.test_id.time_limit_ms();
    if session.duration_ms > limit {
        issues.push(fatal(
            "duration_exceeds_limit",
            format!(
                "duration {} ms exceeds the {} ms limit for {}",
                session.duration_ms, limit, session.test_id
            ),
        ));
    }
    if matches!(session.test_id, TestId::T3 | TestId::T4)
        && session.ui_states.is_empty()
        && !has_two_pointer_overlap(session)
    {
        issues.push(fatal(
            "no_two_finger_no_ui",
            "zoom session has neither a two-pointer overlap nor ui events".into(),
        ));
    }
    if expected_target_missing(session) {
        issues.push(Issue {
            severity: Severity::Warn,
            code: "missing_targets".into(),
            message: format!("no target events of the kind {} expects", session.test_id),
        });
    }

    ValidationReport {
        child_id: session.child_id.clone(),
        test_id: session.test_id,
        issues,
    }
}

/// Whether two different pointers are ever down at the same instant.
pub fn has_two_pointer_overlap(session: &TestSession) -> bool {
    let spans: Vec<(u32, i64, i64)> = session
        .strokes
        .iter()
        .filter(|s| !s.samples.is_empty())
        .map(|s| (s.pointer_id, s.start().t, s.end().t))
        .collect();
    for (i, a) in spans.iter().enumerate() {
        for b in &spans[i + 1..] {
            if a.0 != b.0 && a.1 <= b.2 && b.1 <= a.2 {
                return true;
            }
        }
    }
    false
}

fn expected_target_missing(session: &TestSession) -> bool {
    use crate::model::TargetKind::*;
    let kinds: BTreeSet<_> = session.targets.iter().map(|t| t.kind).collect();
    match session.test_id {
        TestId::T1 => !kinds.contains(&MoleSpawn),
        TestId::T2 => !kinds.contains(&CarrotPos) || !kinds.contains(&RabbitPos),
        TestId::T3 | TestId::T4 => !kinds.contains(&CirclePair),
        TestId::T5 => !kinds.contains(&SpiralRef),
        TestId::T6 => !kinds.contains(&TreeOutline),
    }
}

/// Result of loading a dataset directory: the dataset plus the validation
/// report of every parsed session (fatal ones were excluded).
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub dataset: Dataset,
    pub reports: Vec<ValidationReport>,
    pub warnings: Vec<ParseWarning>,
}

/// Loads a directory of session files plus its `subjects.csv` index.
///
/// Subjects are ordered by child id and sessions with fatal validation issues
/// are excluded, so the same directory always yields the same dataset.
pub fn load_dataset(dir: &Path) -> Result<LoadOutcome> {
    let index_path = dir.join("subjects.csv");
    if !index_path.exists() {
        return Err(Error::MissingSubjectsIndex(index_path.display().to_string()));
    }
    let mut ages: BTreeMap<ChildId, i64> = BTreeMap::new();
    let mut reader = csv::Reader::from_path(&index_path)?;
    #[derive(Deserialize)]
    struct IndexRow {
        child_id: String,
        age_months: i64,
    }
    for row in reader.deserialize() {
        let row: IndexRow = row?;
        let id = ChildId::new(row.child_id);
        if ages.insert(id.clone(), row.age_months).is_some() {
            return Err(Error::DuplicateChild(id.0));
        }
    }

    let mut paths: Vec<_> = fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    paths.sort();

    let mut sessions: BTreeMap<ChildId, BTreeMap<TestId, TestSession>> = BTreeMap::new();
    let mut reports = Vec::new();
    let mut warnings = Vec::new();
    for path in &paths {
        let text = fs::read_to_string(path)?;
        let parsed = parse_session(&text)?;
        warnings.extend(parsed.warnings);
        let session = parsed.session;
        if !ages.contains_key(&session.child_id) {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "{}: child {} not present in subjects.csv",
                    path.display(),
                    session.child_id
                ),
            });
        }
        let report = validate_session(&session);
        let fatal = report.is_fatal();
        reports.push(report);
        if fatal {
            continue;
        }
        let per_child = sessions.entry(session.child_id.clone()).or_default();
        if per_child.contains_key(&session.test_id) {
            return Err(Error::DuplicateSession {
                child: session.child_id.0.clone(),
                test: session.test_id.to_string(),
            });
        }
        per_child.insert(session.test_id, session);
    }

    let mut subjects = Vec::with_capacity(ages.len());
    for (id, age) in &ages {
        let child_sessions = sessions.remove(id).unwrap_or_default();
        subjects.push(SubjectRecord::new(id.clone(), *age, child_sessions)?);
    }

    Ok(LoadOutcome {
        dataset: Dataset {
            subjects,
            provenance: Provenance {
                source: dir.display().to_string(),
                schema: SCHEMA_VERSION.to_string(),
            },
        },
        reports,
        warnings,
    })
}

/// Writes a dataset as one session file per (child, test) plus the subjects
/// index, in the layout `load_dataset` reads back.
pub fn write_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut writer = csv::Writer::from_path(dir.join("subjects.csv"))?;
    writer.write_record(["child_id", "age_months"])?;
    for subject in &dataset.subjects {
        writer.write_record([
            subject.child_id().as_str(),
            &subject.age_months().to_string(),
        ])?;
    }
    writer.flush()?;
    for subject in &dataset.subjects {
        for (test, session) in subject.sessions() {
            let name = format!("{}_{}.jsonl", subject.child_id(), test);
            fs::write(dir.join(name), write_session(session))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TargetKind;

    fn minimal_t1() -> String {
        concat!(
            r#"{"schema":"childci/1","child_id":"c01","test_id":"T1","input":"finger","screen":{"w":1280.0,"h":800.0},"duration_ms":9000}"#,
            "\n",
            r#"{"type":"target","t":0,"kind":"mole_spawn","center":{"x":100.0,"y":100.0},"radius":60.0}"#,
            "\n",
            r#"{"type":"sample","t":500,"x":100.0,"y":101.0,"pressure":0.5,"pointer_id":0,"action":"down"}"#,
            "\n",
            r#"{"type":"sample","t":520,"x":100.0,"y":101.5,"pressure":0.55,"pointer_id":0,"action":"move"}"#,
            "\n",
            r#"{"type":"sample","t":540,"x":100.0,"y":102.0,"pressure":0.5,"pointer_id":0,"action":"up"}"#,
            "\n",
        )
        .to_string()
    }

    #[test]
    fn parses_minimal_t1_document() {
        let parsed = parse_session(&minimal_t1()).unwrap();
        let s = &parsed.session;
        assert_eq!(s.strokes.len(), 1);
        assert_eq!(s.strokes[0].samples.len(), 3);
        assert_eq!(s.targets.len(), 1);
        assert_eq!(s.targets[0].kind, TargetKind::MoleSpawn);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn rejects_out_of_range_pressure() {
        let doc = minimal_t1().replace("\"pressure\":0.55", "\"pressure\":1.5");
        let err = parse_session(&doc).unwrap_err();
        assert!(err.to_string().contains("pressure out of range"), "{err}");
    }

    #[test]
    fn rejects_non_monotone_timestamps() {
        let doc = minimal_t1().replace("\"t\":520", "\"t\":400");
        let err = parse_session(&doc).unwrap_err();
        assert!(err.to_string().contains("non-monotone"), "{err}");
        assert!(err.to_string().contains("line 4"), "{err}");
    }

    #[test]
    fn rejects_schema_mismatch() {
        let doc = minimal_t1().replace("childci/1", "childci/9");
        assert!(matches!(
            parse_session(&doc).unwrap_err(),
            Error::SchemaVersion { .. }
        ));
    }

    #[test]
    fn unknown_fields_warn_and_are_ignored() {
        let doc = minimal_t1().replace(
            "\"pressure\":0.55",
            "\"pressure\":0.55,\"wobble\":3",
        );
        let parsed = parse_session(&doc).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.warnings[0].code, "unknown_field");
        assert_eq!(parsed.session.strokes[0].samples.len(), 3);
    }

    #[test]
    fn zoom_without_ui_warns() {
        let doc = concat!(
            r#"{"schema":"childci/1","child_id":"c02","test_id":"T3","input":"finger","screen":{"w":1280.0,"h":800.0},"duration_ms":5000}"#,
            "\n",
            r#"{"type":"target","t":0,"kind":"circle_pair","center":{"x":600.0,"y":400.0},"radius":150.0}"#,
            "\n",
            r#"{"type":"sample","t":100,"x":10.0,"y":10.0,"pressure":1.0,"pointer_id":0,"action":"down"}"#,
            "\n",
            r#"{"type":"sample","t":150,"x":12.0,"y":10.0,"pressure":1.0,"pointer_id":1,"action":"down"}"#,
            "\n",
            r#"{"type":"sample","t":200,"x":14.0,"y":10.0,"pressure":1.0,"pointer_id":0,"action":"up"}"#,
            "\n",
            r#"{"type":"sample","t":220,"x":16.0,"y":10.0,"pressure":1.0,"pointer_id":1,"action":"up"}"#,
            "\n",
        );
        let parsed = parse_session(doc).unwrap();
        assert!(parsed.session.ui_states.is_empty());
        assert!(parsed.warnings.iter().any(|w| w.code == "no_ui_states"));
        let report = validate_session(&parsed.session);
        assert!(!report.is_fatal());
    }

    #[test]
    fn move_without_down_is_an_error() {
        let doc = minimal_t1().replace("\"action\":\"down\"", "\"action\":\"move\"");
        assert!(parse_session(&doc).is_err());
    }

    #[test]
    fn validate_duration_limits() {
        let mut session = parse_session(&minimal_t1()).unwrap().session;
        session.duration_ms = 31_000;
        let report = validate_session(&session);
        assert!(report.is_fatal());
        assert!(report.issues.iter().any(|i| i.code == "duration_exceeds_limit"));

        session.test_id = TestId::T6;
        session.input = InputKind::Stylus;
        session.duration_ms = 119_000;
        let report = validate_session(&session);
        assert!(!report
            .issues
            .iter()
            .any(|i| i.code == "duration_exceeds_limit"));
    }

    #[test]
    fn validate_zoom_needs_overlap_or_ui() {
        let doc = concat!(
            r#"{"schema":"childci/1","child_id":"c03","test_id":"T4","input":"finger","screen":{"w":1280.0,"h":800.0},"duration_ms":5000}"#,
            "\n",
            r#"{"type":"sample","t":100,"x":10.0,"y":10.0,"pressure":1.0,"pointer_id":0,"action":"down"}"#,
            "\n",
            r#"{"type":"sample","t":200,"x":14.0,"y":10.0,"pressure":1.0,"pointer_id":0,"action":"up"}"#,
            "\n",
        );
        let session = parse_session(doc).unwrap().session;
        let report = validate_session(&session);
        assert!(report.is_fatal());
        assert!(report.issues.iter().any(|i| i.code == "no_two_finger_no_ui"));
    }

    #[test]
    fn round_trips_through_writer() {
        let session = parse_session(&minimal_t1()).unwrap().session;
        let text = write_session(&session);
        let reparsed = parse_session(&text).unwrap().session;
        assert_eq!(session, reparsed);
    }
}

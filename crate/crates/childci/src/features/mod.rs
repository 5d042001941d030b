//! Per-test feature extraction: the tap/drag/zoom/spiral/drawing sets plus
//! the appended session-level global family, assembled against a fixed-order
//! catalog.

pub mod completion;
pub mod drag;
pub mod drawing;
pub mod global;
pub mod spiral;
pub mod tap;
pub mod zoom;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dataset;
use crate::model::{
    AgeGroup, ChildId, FeatureCatalog, FeatureVector, TestId, TestSession,
};

pub use completion::{completion_flag, completion_report, CompletionRow, CompletionTable};

static CATALOGS: LazyLock<[FeatureCatalog; 6]> = LazyLock::new(|| {
    let build = |test_id: TestId, mut base: Vec<crate::model::FeatureDef>, append_global: bool| {
        if append_global {
            base.extend(global::defs("g", "hci-global"));
        }
        FeatureCatalog {
            test_id,
            entries: base,
        }
    };
    [
        build(TestId::T1, tap::defs(), true),
        build(TestId::T2, drag::defs(), true),
        build(TestId::T3, zoom::defs(), true),
        build(TestId::T4, zoom::defs(), true),
        build(TestId::T5, spiral::defs(), true),
        // the drawing set already is the global family (with coverage), so
        // nothing further is appended
        build(TestId::T6, drawing::defs(), false),
    ]
});

/// The fixed feature catalog of a test.
pub fn catalog(test_id: TestId) -> &'static FeatureCatalog {
    &CATALOGS[test_id.index()]
}

/// Number of test-specific definitions before the appended global family.
pub fn base_len(test_id: TestId) -> usize {
    match test_id {
        TestId::T1 => tap::TAP_LEN,
        TestId::T2 => drag::DRAG_LEN,
        TestId::T3 | TestId::T4 => zoom::ZOOM_LEN,
        TestId::T5 => spiral::SPIRAL_LEN,
        TestId::T6 => drawing::DRAWING_LEN,
    }
}

/// Count of distinct proposed feature definitions across the six tests; the
/// zoom set is shared by both zoom tests and counted once.
pub fn distinct_definition_count() -> usize {
    base_len(TestId::T1)
        + base_len(TestId::T2)
        + base_len(TestId::T3)
        + base_len(TestId::T5)
        + base_len(TestId::T6)
}

/// Extracts the feature vector of a session against its test's catalog.
pub fn extract(session: &TestSession) -> FeatureVector {
    let values = match session.test_id {
        TestId::T1 => with_global(session, tap::values(session)),
        TestId::T2 => with_global(session, drag::values(session)),
        TestId::T3 | TestId::T4 => with_global(session, zoom::values(session)),
        TestId::T5 => with_global(session, spiral::values(session)),
        TestId::T6 => drawing::values(session),
    };
    let cat = catalog(session.test_id);
    debug_assert_eq!(values.len(), cat.len());
    let mut vector = FeatureVector::invalid(session.test_id, cat.len());
    for (i, v) in values.into_iter().enumerate() {
        vector.set(i, v);
    }
    vector
}

fn with_global(session: &TestSession, mut base: Vec<Option<f64>>) -> Vec<Option<f64>> {
    base.extend(global::values(session));
    base
}

/// Extracted feature vectors of one subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectFeatures {
    pub child_id: ChildId,
    pub age_months: i64,
    pub group: AgeGroup,
    pub vectors: BTreeMap<TestId, FeatureVector>,
}

/// Feature vectors for a whole dataset, ordered by child id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortFeatures {
    pub subjects: Vec<SubjectFeatures>,
}

impl CohortFeatures {
    /// Subjects that have a vector for every requested test.
    pub fn with_tests(&self, tests: &[TestId]) -> Vec<&SubjectFeatures> {
        self.subjects
            .iter()
            .filter(|s| tests.iter().all(|t| s.vectors.contains_key(t)))
            .collect()
    }
}

/// Extracts every session of every subject.
pub fn extract_dataset(dataset: &Dataset) -> CohortFeatures {
    let subjects = dataset
        .subjects
        .iter()
        .map(|subject| SubjectFeatures {
            child_id: subject.child_id().clone(),
            age_months: subject.age_months(),
            group: subject.group(),
            vectors: subject
                .sessions()
                .iter()
                .map(|(test, session)| (*test, extract(session)))
                .collect(),
        })
        .collect();
    CohortFeatures { subjects }
}

/// Renders the feature matrix of one test as CSV, one row per
/// (child_id, test_id), plus the validity-mask sidecar in the same shape.
pub fn feature_matrix_csv(
    test_id: TestId,
    rows: &[(&ChildId, &FeatureVector)],
) -> Result<(String, String)> {
    let cat = catalog(test_id);
    let mut header = String::from("child_id,test_id");
    for id in cat.ids() {
        write!(header, ",{id}").expect("string write");
    }
    header.push('\n');

    let mut values = header.clone();
    let mut mask = header;
    for (child, vector) in rows {
        if vector.len() != cat.len() {
            return Err(Error::DimensionMismatch {
                got: vector.len(),
                expected: cat.len(),
            });
        }
        write!(values, "{child},{test_id}").expect("string write");
        write!(mask, "{child},{test_id}").expect("string write");
        for (v, ok) in vector.values.iter().zip(&vector.valid) {
            write!(values, ",{v}").expect("string write");
            write!(mask, ",{}", u8::from(*ok)).expect("string write");
        }
        values.push('\n');
        mask.push('\n');
    }
    Ok((values, mask))
}

//! Canonical domain types shared by every other module: raw touch/stylus
//! samples, sessions, subjects, age groups and fixed-order feature vectors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a child across sessions and the subjects index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChildId(pub String);

impl ChildId {
    pub fn new(id: impl Into<String>) -> Self {
        ChildId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ChildId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The six interaction tests.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum TestId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl TestId {
    pub const ALL: [TestId; 6] = [
        TestId::T1,
        TestId::T2,
        TestId::T3,
        TestId::T4,
        TestId::T5,
        TestId::T6,
    ];

    /// Acquisition input this test uses.
    pub fn input(self) -> InputKind {
        match self {
            TestId::T1 | TestId::T2 | TestId::T3 | TestId::T4 => InputKind::Finger,
            TestId::T5 | TestId::T6 => InputKind::Stylus,
        }
    }

    /// Maximum allowed session duration in milliseconds.
    pub fn time_limit_ms(self) -> i64 {
        match self {
            TestId::T6 => 120_000,
            _ => 30_000,
        }
    }

    pub fn index(self) -> usize {
        match self {
            TestId::T1 => 0,
            TestId::T2 => 1,
            TestId::T3 => 2,
            TestId::T4 => 3,
            TestId::T5 => 4,
            TestId::T6 => 5,
        }
    }

    pub fn from_index(i: usize) -> Option<TestId> {
        TestId::ALL.get(i).copied()
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.index() + 1)
    }
}

impl std::str::FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T1" | "t1" | "1" => Ok(TestId::T1),
            "T2" | "t2" | "2" => Ok(TestId::T2),
            "T3" | "t3" | "3" => Ok(TestId::T3),
            "T4" | "t4" | "4" => Ok(TestId::T4),
            "T5" | "t5" | "5" => Ok(TestId::T5),
            "T6" | "t6" | "6" => Ok(TestId::T6),
            other => Err(Error::InvalidConfig(format!("unknown test id {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Finger,
    Stylus,
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputKind::Finger => f.write_str("finger"),
            InputKind::Stylus => f.write_str("stylus"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Down,
    Move,
    Up,
}

/// One sampled touch/stylus point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchSample {
    /// Milliseconds since session start.
    pub t: i64,
    /// Screen x coordinate in pixels.
    pub x: f64,
    /// Screen y coordinate in pixels.
    pub y: f64,
    /// Dimensionless pressure in [0, 1].
    pub pressure: f64,
    /// Finger index, or 0 for the stylus.
    pub pointer_id: u32,
    pub action: Action,
}

impl TouchSample {
    pub fn pos(&self) -> Point {
        Point {
            x: self.x,
            y: self.y,
        }
    }
}

/// Contiguous samples of one pointer from its down event to its up event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub pointer_id: u32,
    pub samples: Vec<TouchSample>,
}

impl Stroke {
    pub fn start(&self) -> &TouchSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &TouchSample {
        &self.samples[self.samples.len() - 1]
    }

    /// Duration between the first and last sample, in ms.
    pub fn duration_ms(&self) -> i64 {
        self.end().t - self.start().t
    }

    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(TouchSample::pos).collect()
    }
}

/// A 2-D point in screen pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    MoleSpawn,
    CarrotPos,
    RabbitPos,
    CirclePair,
    SpiralRef,
    TreeOutline,
}

/// Geometry payload of a target event; which variant is well-formed depends
/// on the target kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetGeometry {
    Circle { center: Point, radius: f64 },
    Points { points: Vec<Point> },
}

impl TargetGeometry {
    pub fn circle(&self) -> Option<(Point, f64)> {
        match self {
            TargetGeometry::Circle { center, radius } => Some((*center, *radius)),
            _ => None,
        }
    }

    pub fn points(&self) -> Option<&[Point]> {
        match self {
            TargetGeometry::Points { points } => Some(points),
            _ => None,
        }
    }

    /// Checks the shape constraints for the given kind: positive radius for
    /// circles, at least 2 points for polylines, at least 3 for polygons.
    pub fn well_formed_for(&self, kind: TargetKind) -> bool {
        match (kind, self) {
            (
                TargetKind::MoleSpawn | TargetKind::CarrotPos | TargetKind::RabbitPos
                | TargetKind::CirclePair,
                TargetGeometry::Circle { radius, .. },
            ) => *radius > 0.0,
            (TargetKind::SpiralRef, TargetGeometry::Points { points }) => points.len() >= 2,
            (TargetKind::TreeOutline, TargetGeometry::Points { points }) => points.len() >= 3,
            _ => false,
        }
    }
}

/// A target/UI object shown to the child (mole position, carrot position,
/// reference spiral, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEvent {
    pub t: i64,
    pub kind: TargetKind,
    #[serde(flatten)]
    pub geometry: TargetGeometry,
}

/// Scale/on-target state reported by the test application.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UiStateEvent {
    pub t: i64,
    pub scale: f64,
    pub on_target: bool,
}

/// Screen dimensions recorded with each session so features can normalize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub w: f64,
    pub h: f64,
}

impl Default for Screen {
    fn default() -> Self {
        Screen {
            w: 1280.0,
            h: 800.0,
        }
    }
}

/// One child performing one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSession {
    pub child_id: ChildId,
    pub test_id: TestId,
    pub input: InputKind,
    pub screen: Screen,
    pub duration_ms: i64,
    pub strokes: Vec<Stroke>,
    pub targets: Vec<TargetEvent>,
    pub ui_states: Vec<UiStateEvent>,
}

impl TestSession {
    /// Targets of one kind, in time order.
    pub fn targets_of(&self, kind: TargetKind) -> Vec<&TargetEvent> {
        self.targets.iter().filter(|t| t.kind == kind).collect()
    }

    /// All samples across strokes, in stroke order.
    pub fn all_samples(&self) -> impl Iterator<Item = &TouchSample> {
        self.strokes.iter().flat_map(|s| s.samples.iter())
    }
}

/// The three age groups used as classification labels.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum AgeGroup {
    G1,
    G2,
    G3,
}

impl AgeGroup {
    pub const ALL: [AgeGroup; 3] = [AgeGroup::G1, AgeGroup::G2, AgeGroup::G3];

    pub fn index(self) -> usize {
        match self {
            AgeGroup::G1 => 0,
            AgeGroup::G2 => 1,
            AgeGroup::G3 => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<AgeGroup> {
        AgeGroup::ALL.get(i).copied()
    }

    /// Month range covered by this group, as a half-open interval except the
    /// global upper endpoint which is included.
    pub fn month_range(self) -> (i64, i64) {
        match self {
            AgeGroup::G1 => (12, 36),
            AgeGroup::G2 => (36, 72),
            AgeGroup::G3 => (72, 96),
        }
    }
}

impl fmt::Display for AgeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", self.index() + 1)
    }
}

/// Maps an age in months to its group: G1 for [12, 36), G2 for [36, 72),
/// G3 for [72, 96]. Left-closed intervals; 96 months is included in G3.
pub fn assign_age_group(age_months: i64) -> Result<AgeGroup> {
    match age_months {
        12..=35 => Ok(AgeGroup::G1),
        36..=71 => Ok(AgeGroup::G2),
        72..=96 => Ok(AgeGroup::G3),
        other => Err(Error::AgeOutOfRange(other)),
    }
}

/// A child with its age metadata and recorded sessions.
///
/// The group label is derived from the age at construction and cannot drift
/// out of sync with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectRecord {
    child_id: ChildId,
    age_months: i64,
    group: AgeGroup,
    sessions: BTreeMap<TestId, TestSession>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    metadata: BTreeMap<String, String>,
}

impl SubjectRecord {
    pub fn new(
        child_id: ChildId,
        age_months: i64,
        sessions: BTreeMap<TestId, TestSession>,
    ) -> Result<Self> {
        let group = assign_age_group(age_months)?;
        Ok(SubjectRecord {
            child_id,
            age_months,
            group,
            sessions,
            metadata: BTreeMap::new(),
        })
    }

    pub fn with_metadata(mut self, metadata: BTreeMap<String, String>) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn child_id(&self) -> &ChildId {
        &self.child_id
    }

    pub fn age_months(&self) -> i64 {
        self.age_months
    }

    pub fn group(&self) -> AgeGroup {
        self.group
    }

    pub fn sessions(&self) -> &BTreeMap<TestId, TestSession> {
        &self.sessions
    }

    pub fn session(&self, test: TestId) -> Option<&TestSession> {
        self.sessions.get(&test)
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    /// Whether every one of the six tests has a session.
    pub fn has_all_tests(&self) -> bool {
        TestId::ALL.iter().all(|t| self.sessions.contains_key(t))
    }
}

/// Fixed-order named feature values for one test, with a validity mask.
///
/// Entries that could not be computed carry value 0 and `valid = false`,
/// keeping vectors fixed-length for the classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub test_id: TestId,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl FeatureVector {
    /// An all-invalid vector of the given length.
    pub fn invalid(test_id: TestId, len: usize) -> Self {
        FeatureVector {
            test_id,
            values: vec![0.0; len],
            valid: vec![false; len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sets one slot, mapping non-finite values to invalid.
    pub fn set(&mut self, idx: usize, value: Option<f64>) {
        match value {
            Some(v) if v.is_finite() => {
                self.values[idx] = v;
                self.valid[idx] = true;
            }
            _ => {
                self.values[idx] = 0.0;
                self.valid[idx] = false;
            }
        }
    }
}

/// One feature definition in a catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDef {
    /// Stable identifier used as a CSV column name.
    pub id: String,
    /// Human-readable name.
    pub name: String,
    /// Which feature family/source the definition comes from.
    pub source: String,
}

/// Ordered feature definitions for one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCatalog {
    pub test_id: TestId,
    pub entries: Vec<FeatureDef>,
}

impl FeatureCatalog {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.id == id)
    }
}

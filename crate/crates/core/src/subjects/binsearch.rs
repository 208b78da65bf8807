//! Binary search over a sorted array of distinct elements: the correct
//! program, two seeded faults, and the relations that probe them.
//!
//! Positions are 1-based and `-1` means "absent", matching the classic
//! textbook listing the variants are modeled on.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::engine::{
    BuiltinFixture, CampaignSubject, CostMeter, EngineError, ExecutionOf, FixtureOrigin, Outcome,
    Relation, RelationDescriptor, SourceOverrides, Subject, Variant,
};

/// Output value meaning "key not present".
pub const MISSING: i64 = -1;

/// A sorted array with distinct elements and a 1-based inclusive search
/// range. Elements outside `lo..=hi` are invisible to searches and probes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedFixture {
    pub elements: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
}

impl SortedFixture {
    /// Fixture spanning the whole array.
    pub fn covering(elements: Vec<i64>) -> Self {
        let hi = elements.len() as i64;
        Self {
            elements,
            lo: 1,
            hi,
        }
    }

    /// Element at 1-based index `idx`, or `None` outside the search range.
    pub fn get(&self, idx: i64) -> Option<i64> {
        if idx < self.lo || idx > self.hi {
            None
        } else {
            Some(self.elements[(idx - 1) as usize])
        }
    }

    fn set(&mut self, idx: i64, value: i64) {
        self.elements[(idx - 1) as usize] = value;
    }

    pub fn range_len(&self) -> i64 {
        (self.hi - self.lo + 1).max(0)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let len = self.elements.len() as i64;
        if self.lo < 1 {
            return Err(EngineError::input("lo must be at least 1"));
        }
        if self.hi < self.lo {
            if self.hi != self.lo - 1 {
                return Err(EngineError::input("empty range must have hi = lo - 1"));
            }
            if self.hi > len {
                return Err(EngineError::input("hi exceeds array length"));
            }
            return Ok(());
        }
        if self.hi > len {
            return Err(EngineError::input("hi exceeds array length"));
        }
        for idx in self.lo..self.hi {
            if self.elements[(idx - 1) as usize] >= self.elements[idx as usize] {
                return Err(EngineError::input(format!(
                    "array not strictly increasing at index {idx}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinSearchInput {
    pub key: i64,
    pub fixture: SortedFixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinSearchOutput {
    /// 1-based hit position, or [`MISSING`].
    pub position: i64,
}

pub struct BinSearch;

impl Subject for BinSearch {
    type Input = BinSearchInput;
    type Output = BinSearchOutput;

    fn name() -> &'static str {
        "binsearch"
    }

    fn validate(input: &Self::Input) -> Result<(), EngineError> {
        input.fixture.validate()
    }
}

/// Recursive search mirroring the textbook listing. `right_start_offset`
/// is 1 for the correct program and 2 for the splitting fault, which drops
/// `A[mid+1]` from the right half.
fn search_from(
    fixture: &SortedFixture,
    key: i64,
    i: i64,
    j: i64,
    right_start_offset: i64,
    meter: &mut CostMeter,
    last_probe: &mut i64,
) -> i64 {
    if i > j {
        return MISSING;
    }
    let mid = (i + j).div_euclid(2);
    *last_probe = mid;
    let value = fixture.get(mid).expect("mid stays inside the range");
    meter.charge(2); // read + equality comparison
    if value == key {
        return mid;
    }
    meter.tick(); // ordering comparison
    if value > key {
        search_from(
            fixture,
            key,
            i,
            mid - 1,
            right_start_offset,
            meter,
            last_probe,
        )
    } else {
        search_from(
            fixture,
            key,
            mid + right_start_offset,
            j,
            right_start_offset,
            meter,
            last_probe,
        )
    }
}

/// Correct binary search.
pub struct Correct;

impl Variant<BinSearch> for Correct {
    fn id(&self) -> &'static str {
        "correct"
    }

    fn execute(
        &self,
        input: &mut BinSearchInput,
        meter: &mut CostMeter,
    ) -> (BinSearchOutput, bool) {
        let mut last = MISSING;
        let pos = search_from(
            &input.fixture,
            input.key,
            input.fixture.lo,
            input.fixture.hi,
            1,
            meter,
            &mut last,
        );
        (BinSearchOutput { position: pos }, false)
    }
}

/// Splitting fault: the right recursion starts at `mid + 2`, so the element
/// right of the midpoint is never examined.
pub struct MutantSplit;

impl Variant<BinSearch> for MutantSplit {
    fn id(&self) -> &'static str {
        "mutant-split"
    }

    fn execute(
        &self,
        input: &mut BinSearchInput,
        meter: &mut CostMeter,
    ) -> (BinSearchOutput, bool) {
        let mut last = MISSING;
        let pos = search_from(
            &input.fixture,
            input.key,
            input.fixture.lo,
            input.fixture.hi,
            2,
            meter,
            &mut last,
        );
        (BinSearchOutput { position: pos }, false)
    }
}

/// Overwriting fault: when the key is absent, the program writes it into
/// the last probed slot and returns that position, so its own output
/// always looks like a hit.
pub struct MutantOverwrite;

impl Variant<BinSearch> for MutantOverwrite {
    fn id(&self) -> &'static str {
        "mutant-overwrite"
    }

    fn may_write(&self) -> bool {
        true
    }

    fn execute(
        &self,
        input: &mut BinSearchInput,
        meter: &mut CostMeter,
    ) -> (BinSearchOutput, bool) {
        let mut last = MISSING;
        let pos = search_from(
            &input.fixture,
            input.key,
            input.fixture.lo,
            input.fixture.hi,
            1,
            meter,
            &mut last,
        );
        if pos != MISSING || last == MISSING {
            return (BinSearchOutput { position: pos }, false);
        }
        input.fixture.set(last, input.key);
        meter.tick(); // element write
        (BinSearchOutput { position: last }, true)
    }
}

/// Result of searching for a probe value inside a neighbor window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapValue {
    Found(i64),
    /// No admissible value exists within the allowed number of widenings.
    Infeasible,
}

/// Chooses a probe value `y` strictly between the neighbors of position
/// `k`, distinct from every element inside the window.
///
/// The window starts one position on each side and widens by one per
/// attempt; missing neighbors act as unbounded ends. Sortedness guarantees
/// a returned value is absent from the whole range.
pub fn select_gap_value(
    fixture: &SortedFixture,
    k: i64,
    exclude: i64,
    attempts: u32,
    meter: &mut CostMeter,
) -> Result<GapValue, EngineError> {
    let at_k = fixture
        .get(k)
        .ok_or_else(|| EngineError::input(format!("index {k} outside the search range")))?;
    if at_k != exclude {
        return Err(EngineError::input(format!(
            "element at index {k} is {at_k}, expected {exclude}"
        )));
    }
    for radius in 1..=i64::from(attempts) {
        let low = fixture.get(k - radius);
        let high = fixture.get(k + radius);
        meter.charge(2); // neighbor reads (or existence checks)

        let win_lo = (k - radius + 1).max(fixture.lo);
        let win_hi = (k + radius - 1).min(fixture.hi);
        let window: Vec<i64> = (win_lo..=win_hi)
            .map(|idx| fixture.get(idx).expect("window index in range"))
            .collect();
        meter.charge(window.len() as u64);

        let found = match (low, high) {
            (Some(lo_v), Some(hi_v)) => {
                let mut found = None;
                for y in lo_v + 1..hi_v {
                    meter.tick();
                    if !window.contains(&y) {
                        found = Some(y);
                        break;
                    }
                }
                found
            }
            (Some(lo_v), None) => {
                // window elements are finite, so ascending from the bound
                // exits them after at most window.len() misses
                let mut y = lo_v.saturating_add(1);
                while window.contains(&y) {
                    meter.tick();
                    y = y.saturating_add(1);
                }
                Some(y)
            }
            (None, Some(hi_v)) => {
                let mut y = hi_v.saturating_sub(1);
                while window.contains(&y) {
                    meter.tick();
                    y = y.saturating_sub(1);
                }
                Some(y)
            }
            (None, None) => {
                let max = window.iter().copied().max().expect("window holds A[k]");
                meter.tick();
                Some(max.saturating_add(1))
            }
        };
        if let Some(y) = found {
            return Ok(GapValue::Found(y));
        }
    }
    Ok(GapValue::Infeasible)
}

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

type Ctx<'a> = crate::engine::ApplyCtx<'a, BinSearch>;
type Source = ExecutionOf<BinSearch>;

/// Reads back the source position and confirms the key is really there.
pub struct KeyAtPosition {
    desc: RelationDescriptor,
}

impl KeyAtPosition {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "key-at-position",
                subject: "binsearch",
                suspected_error: "Incorrect position returned",
                production_safe: true,
            },
        }
    }
}

impl Default for KeyAtPosition {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<BinSearch> for KeyAtPosition {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let pos = source.output.position;
        if pos == MISSING {
            return Outcome::Inapplicable("source reported absence".into());
        }
        ctx.charge_check(2); // read + comparison
        match source.input.fixture.get(pos) {
            None => Outcome::Fail(format!("position {pos} outside searched range")),
            Some(v) if v != source.input.key => Outcome::Fail(format!(
                "expected {} at position {pos} got {v}",
                source.input.key
            )),
            Some(_) => Outcome::Pass,
        }
    }
}

/// On a miss, re-searches a randomly drawn element, which must be found at
/// its own position.
pub struct ExistenceProbe {
    desc: RelationDescriptor,
    probes: u32,
}

impl ExistenceProbe {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "existence-probe",
                subject: "binsearch",
                suspected_error: "Report non-existence even if the key exists",
                production_safe: true,
            },
            probes: 1,
        }
    }

    /// Number of random probes per application (default 1).
    pub fn with_probes(mut self, probes: u32) -> Self {
        self.probes = probes.max(1);
        self
    }
}

impl Default for ExistenceProbe {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<BinSearch> for ExistenceProbe {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        if source.output.position != MISSING {
            return Outcome::Inapplicable("key was found".into());
        }
        let fixture = &source.input.fixture;
        if fixture.range_len() == 0 {
            return Outcome::Inapplicable("empty search range".into());
        }
        for _ in 0..self.probes {
            let p = ctx.rng().gen_range(fixture.lo..=fixture.hi);
            ctx.charge_derive(2); // index draw + element read
            let probe_key = fixture.get(p).expect("p drawn inside the range");
            let followup = match ctx.run_followup(BinSearchInput {
                key: probe_key,
                fixture: fixture.clone(),
            }) {
                Ok(idx) => idx,
                Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
            };
            let got = ctx.followup(followup).output.position;
            ctx.charge_check(1);
            if got != p {
                return Outcome::Fail(format!("expected {p} got {got}"));
            }
        }
        Outcome::Pass
    }
}

/// On an apparent hit, searches a value from the gap next to the hit
/// position; a correct program must report absence.
pub struct GapProbe {
    desc: RelationDescriptor,
    attempts: u32,
}

impl GapProbe {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "gap-probe",
                subject: "binsearch",
                suspected_error: "Overwriting error",
                production_safe: true,
            },
            attempts: 5,
        }
    }

    /// Widening budget before the derivation is abandoned (default 5).
    pub fn with_attempts(mut self, attempts: u32) -> Self {
        self.attempts = attempts.max(1);
        self
    }
}

impl Default for GapProbe {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<BinSearch> for GapProbe {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let pos = source.output.position;
        if pos == MISSING {
            return Outcome::Inapplicable("source reported absence".into());
        }
        let fixture = &source.input.fixture;
        let key = source.input.key;
        ctx.charge_derive(2);
        match fixture.get(pos) {
            None => return Outcome::Fail(format!("position {pos} outside searched range")),
            Some(v) if v != key => {
                return Outcome::Inapplicable("source output does not look correct".into())
            }
            Some(_) => {}
        }

        // neighbor window check; missing neighbors act as -inf / +inf
        ctx.charge_derive(2);
        if let Some(left) = fixture.get(pos - 1) {
            if key <= left {
                return Outcome::Fail(format!("key {key} not above left neighbor {left}"));
            }
        }
        if let Some(right) = fixture.get(pos + 1) {
            if key >= right {
                return Outcome::Fail(format!("key {key} not below right neighbor {right}"));
            }
        }

        let mut derive = CostMeter::new();
        let picked = select_gap_value(fixture, pos, key, self.attempts, &mut derive);
        ctx.charge_derive(derive.steps());
        let y = match picked {
            Ok(GapValue::Found(y)) => y,
            Ok(GapValue::Infeasible) => {
                return Outcome::Abandoned(format!(
                    "no feasible probe value within {} widenings",
                    self.attempts
                ))
            }
            Err(e) => return Outcome::Fail(format!("probe derivation rejected: {e}")),
        };

        let followup = match ctx.run_followup(BinSearchInput {
            key: y,
            fixture: fixture.clone(),
        }) {
            Ok(idx) => idx,
            Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
        };
        let got = ctx.followup(followup).output.position;
        ctx.charge_check(1);
        if got != MISSING {
            return Outcome::Fail(format!("expected -1 got {got}"));
        }
        Outcome::Pass
    }
}

/// On an apparent hit, searches both neighbors of the hit position, which
/// must be found at their own positions. Detects recursion bounds that
/// drop elements from one half.
pub struct SplitNeighbors {
    desc: RelationDescriptor,
}

impl SplitNeighbors {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "split-neighbors",
                subject: "binsearch",
                suspected_error: "Splitting error",
                production_safe: true,
            },
        }
    }
}

impl Default for SplitNeighbors {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<BinSearch> for SplitNeighbors {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let pos = source.output.position;
        if pos == MISSING {
            return Outcome::Inapplicable("source reported absence".into());
        }
        let fixture = &source.input.fixture;
        ctx.charge_derive(2);
        match fixture.get(pos) {
            None => return Outcome::Fail(format!("position {pos} outside searched range")),
            Some(v) if v != source.input.key => {
                return Outcome::Inapplicable("source output does not look correct".into())
            }
            Some(_) => {}
        }

        // midpoint substitutes for a missing neighbor: the midpoint element
        // is guaranteed to exist in any nonempty range
        let mid = (fixture.lo + fixture.hi).div_euclid(2);
        ctx.charge_derive(1);
        let mut probes: Vec<(i64, i64)> = Vec::new(); // (expected position, probe key)
        for (neighbor, substitute) in [(pos - 1, mid - 1), (pos + 1, mid + 1)] {
            let target = if fixture.get(neighbor).is_some() {
                Some(neighbor)
            } else if fixture.get(substitute).is_some() {
                Some(substitute)
            } else {
                None
            };
            if let Some(idx) = target {
                ctx.charge_derive(1);
                probes.push((idx, fixture.get(idx).expect("probe index in range")));
            }
        }
        if probes.is_empty() {
            return Outcome::Inapplicable("single-element range needs no split probe".into());
        }

        let mut mismatch = None;
        for (expected, probe_key) in probes {
            let followup = match ctx.run_followup(BinSearchInput {
                key: probe_key,
                fixture: fixture.clone(),
            }) {
                Ok(idx) => idx,
                Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
            };
            let got = ctx.followup(followup).output.position;
            ctx.charge_check(1);
            if got != expected && mismatch.is_none() {
                mismatch = Some(format!("expected {expected} got {got}"));
            }
        }
        match mismatch {
            Some(reason) => Outcome::Fail(reason),
            None => Outcome::Pass,
        }
    }
}

// ---------------------------------------------------------------------------
// Campaign wiring
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct FixtureDoc {
    array: Vec<i64>,
    lo: i64,
    hi: i64,
}

/// The worked-example fixture: sorted array 4, 6, 10, 15, 18, 25, 40.
pub fn paper_fixture() -> SortedFixture {
    SortedFixture::covering(vec![4, 6, 10, 15, 18, 25, 40])
}

impl CampaignSubject for BinSearch {
    type Fixture = SortedFixture;

    fn variants() -> Vec<Box<dyn Variant<Self>>> {
        vec![
            Box::new(Correct),
            Box::new(MutantSplit),
            Box::new(MutantOverwrite),
        ]
    }

    fn relations() -> Vec<Box<dyn Relation<Self>>> {
        vec![
            Box::new(KeyAtPosition::new()),
            Box::new(ExistenceProbe::new()),
            Box::new(GapProbe::new()),
            Box::new(SplitNeighbors::new()),
        ]
    }

    fn builtin_fixtures() -> Vec<BuiltinFixture<SortedFixture>> {
        let fx = paper_fixture();
        vec![BuiltinFixture {
            id: "paper-3.1",
            origin: FixtureOrigin::Paper,
            summary: format!("sorted array {:?}, range {}..{}", fx.elements, fx.lo, fx.hi),
            value: fx,
        }]
    }

    fn parse_fixture(value: &serde_json::Value) -> Result<SortedFixture, EngineError> {
        let doc: FixtureDoc = serde_json::from_value(value.clone())
            .map_err(|e| EngineError::input(format!("bad binsearch fixture: {e}")))?;
        let fx = SortedFixture {
            elements: doc.array,
            lo: doc.lo,
            hi: doc.hi,
        };
        fx.validate()?;
        Ok(fx)
    }

    fn generate_input(rng: &mut ChaCha8Rng, fixture: Option<&SortedFixture>) -> BinSearchInput {
        let fixture = match fixture {
            Some(fx) => fx.clone(),
            None => {
                let len = rng.gen_range(1..=64usize);
                let mut elements = Vec::with_capacity(len);
                let mut v = rng.gen_range(-100..=100i64);
                for _ in 0..len {
                    elements.push(v);
                    v += rng.gen_range(1..=10i64);
                }
                SortedFixture::covering(elements)
            }
        };
        let key = random_key(rng, &fixture);
        BinSearchInput { key, fixture }
    }

    fn input_from_overrides(
        fixture: &SortedFixture,
        overrides: &SourceOverrides,
    ) -> Result<BinSearchInput, EngineError> {
        for (flag, set) in [
            ("--k", overrides.k.is_some()),
            ("--src", overrides.src.is_some()),
            ("--dst", overrides.dst.is_some()),
        ] {
            if set {
                return Err(EngineError::config(format!(
                    "override {flag} does not apply to subject 'binsearch'"
                )));
            }
        }
        let key = overrides
            .key
            .ok_or_else(|| EngineError::config("subject 'binsearch' needs --key"))?;
        Ok(BinSearchInput {
            key,
            fixture: fixture.clone(),
        })
    }
}

/// Half present keys, half arbitrary values near the fixture's range.
fn random_key(rng: &mut ChaCha8Rng, fixture: &SortedFixture) -> i64 {
    if fixture.range_len() > 0 && rng.gen_bool(0.5) {
        let idx = rng.gen_range(fixture.lo..=fixture.hi);
        fixture.get(idx).expect("index drawn inside the range")
    } else {
        let min = fixture.get(fixture.lo).unwrap_or(0);
        let max = fixture.get(fixture.hi).unwrap_or(0);
        rng.gen_range(min.saturating_sub(5)..=max.saturating_add(5))
    }
}

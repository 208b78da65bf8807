//! K-th occurrence of a key in an unsorted array: correct program, two
//! seeded faults, and the relations that probe them.
//!
//! Follow-up test cases narrow the search range; positions always refer to
//! the original fixture's 1-based indexing, so expectations like "return p"
//! stay well-defined across sub-ranges.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::engine::{
    BuiltinFixture, CampaignSubject, CostMeter, EngineError, ExecutionOf, FixtureOrigin, Outcome,
    Relation, RelationDescriptor, SourceOverrides, Subject, Variant,
};

pub const MISSING: i64 = -1;

/// An unsorted array with a 1-based inclusive search range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsortedFixture {
    pub elements: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
}

impl UnsortedFixture {
    pub fn covering(elements: Vec<i64>) -> Self {
        let hi = elements.len() as i64;
        Self {
            elements,
            lo: 1,
            hi,
        }
    }

    /// Same backing array, narrowed to `lo..=hi`.
    pub fn narrowed(&self, lo: i64, hi: i64) -> Self {
        Self {
            elements: self.elements.clone(),
            lo,
            hi,
        }
    }

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
        self.hi - self.lo + 1
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.lo < 1 {
            return Err(EngineError::input("lo must be at least 1"));
        }
        if self.hi < self.lo {
            return Err(EngineError::input("range must hold at least one element"));
        }
        if self.hi > self.elements.len() as i64 {
            return Err(EngineError::input("hi exceeds array length"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KthInput {
    pub key: i64,
    /// Which occurrence to locate, 1-based.
    pub k: i64,
    pub fixture: UnsortedFixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KthOutput {
    pub position: i64,
}

pub struct KthOccurrence;

impl Subject for KthOccurrence {
    type Input = KthInput;
    type Output = KthOutput;

    fn name() -> &'static str {
        "kth"
    }

    fn validate(input: &Self::Input) -> Result<(), EngineError> {
        input.fixture.validate()?;
        if input.k < 1 || input.k > input.fixture.range_len() {
            return Err(EngineError::input(format!(
                "k = {} outside 1..={}",
                input.k,
                input.fixture.range_len()
            )));
        }
        Ok(())
    }
}

/// Left-to-right scan for the `target`-th occurrence.
fn scan_for(fixture: &UnsortedFixture, key: i64, target: i64, meter: &mut CostMeter) -> i64 {
    let mut seen = 0;
    for p in fixture.lo..=fixture.hi {
        meter.charge(2); // read + comparison
        if fixture.get(p) == Some(key) {
            seen += 1;
            if seen == target {
                return p;
            }
        }
    }
    MISSING
}

/// Correct scan.
pub struct Correct;

impl Variant<KthOccurrence> for Correct {
    fn id(&self) -> &'static str {
        "correct"
    }

    fn execute(&self, input: &mut KthInput, meter: &mut CostMeter) -> (KthOutput, bool) {
        let pos = scan_for(&input.fixture, input.key, input.k, meter);
        (KthOutput { position: pos }, false)
    }
}

/// Initialization fault: the occurrence counter starts one too low, so the
/// program actually locates the (k+1)-th occurrence.
pub struct MutantInit;

impl Variant<KthOccurrence> for MutantInit {
    fn id(&self) -> &'static str {
        "mutant-init"
    }

    fn execute(&self, input: &mut KthInput, meter: &mut CostMeter) -> (KthOutput, bool) {
        let pos = scan_for(&input.fixture, input.key, input.k + 1, meter);
        (KthOutput { position: pos }, false)
    }
}

/// Overwriting fault: once the scan hits the first occurrence, every entry
/// it visits afterwards is overwritten with the key before being examined,
/// so each of them counts as an occurrence.
pub struct MutantOverwrite;

impl Variant<KthOccurrence> for MutantOverwrite {
    fn id(&self) -> &'static str {
        "mutant-overwrite"
    }

    fn may_write(&self) -> bool {
        true
    }

    fn execute(&self, input: &mut KthInput, meter: &mut CostMeter) -> (KthOutput, bool) {
        let mut seen = 0;
        let mut wrote = false;
        for p in input.fixture.lo..=input.fixture.hi {
            if seen >= 1 {
                input.fixture.set(p, input.key);
                meter.tick(); // element write
                wrote = true;
            }
            meter.charge(2); // read + comparison
            if input.fixture.get(p) == Some(input.key) {
                seen += 1;
                if seen == input.k {
                    return (KthOutput { position: p }, wrote);
                }
            }
        }
        (KthOutput { position: MISSING }, wrote)
    }
}

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

type Ctx<'a> = crate::engine::ApplyCtx<'a, KthOccurrence>;
type Source = ExecutionOf<KthOccurrence>;

/// Guard shared by the apparent-hit relations: source found something and
/// the key is really there.
fn apparent_hit(source: &Source, ctx: &mut Ctx<'_>) -> Result<i64, Outcome> {
    let pos = source.output.position;
    if pos == MISSING {
        return Err(Outcome::Inapplicable("source reported absence".into()));
    }
    ctx.charge_derive(2);
    match source.input.fixture.get(pos) {
        None => Err(Outcome::Fail(format!(
            "position {pos} outside searched range"
        ))),
        Some(v) if v != source.input.key => Err(Outcome::Inapplicable(
            "source output does not look correct".into(),
        )),
        Some(_) => Ok(pos),
    }
}

/// Reads back the reported position and confirms the key is there.
pub struct KeyAtPosition {
    desc: RelationDescriptor,
}

impl KeyAtPosition {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "key-at-position",
                subject: "kth",
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

impl Relation<KthOccurrence> for KeyAtPosition {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let pos = source.output.position;
        if pos == MISSING {
            return Outcome::Inapplicable("source reported absence".into());
        }
        ctx.charge_check(2);
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

/// On a miss, asks for the first occurrence of a randomly drawn element;
/// the answer must exist and lie at or before the drawn index.
pub struct ExistenceProbe {
    desc: RelationDescriptor,
}

impl ExistenceProbe {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "existence-probe",
                subject: "kth",
                suspected_error: "Report nonexistence despite the key exists",
                production_safe: true,
            },
        }
    }
}

impl Default for ExistenceProbe {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<KthOccurrence> for ExistenceProbe {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        if source.output.position != MISSING {
            return Outcome::Inapplicable("key was found".into());
        }
        let fixture = &source.input.fixture;
        let r = ctx.rng().gen_range(fixture.lo..=fixture.hi);
        ctx.charge_derive(2); // index draw + element read
        let probe_key = fixture.get(r).expect("r drawn inside the range");
        let followup = match ctx.run_followup(KthInput {
            key: probe_key,
            k: 1,
            fixture: fixture.clone(),
        }) {
            Ok(idx) => idx,
            Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
        };
        let got = ctx.followup(followup).output.position;
        ctx.charge_check(2); // existence + ordering comparison
        if got == MISSING {
            return Outcome::Fail(format!("expected a position at or before {r} got -1"));
        }
        if got > r {
            return Outcome::Fail(format!("expected a position at or before {r} got {got}"));
        }
        Outcome::Pass
    }
}

/// On an apparent hit, asks for the first occurrence within `[p..p]` and
/// `[p..hi]`; both must come back as exactly `p`. Detects programs that
/// report the q-th occurrence for some q other than the requested one.
pub struct WrongOccurrence {
    desc: RelationDescriptor,
}

impl WrongOccurrence {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "wrong-occurrence",
                subject: "kth",
                suspected_error: "Report q th occurrence where q != k",
                production_safe: true,
            },
        }
    }
}

impl Default for WrongOccurrence {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<KthOccurrence> for WrongOccurrence {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let pos = match apparent_hit(source, ctx) {
            Ok(pos) => pos,
            Err(outcome) => return outcome,
        };
        let fixture = &source.input.fixture;
        let key = source.input.key;
        let mut mismatch = None;
        for sub in [
            fixture.narrowed(pos, pos),
            fixture.narrowed(pos, fixture.hi),
        ] {
            ctx.charge_derive(1); // range construction
            let followup = match ctx.run_followup(KthInput {
                key,
                k: 1,
                fixture: sub,
            }) {
                Ok(idx) => idx,
                Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
            };
            let got = ctx.followup(followup).output.position;
            ctx.charge_check(1);
            if got != pos && mismatch.is_none() {
                mismatch = Some(format!("expected {pos} got {got}"));
            }
        }
        match mismatch {
            Some(reason) => Outcome::Fail(reason),
            None => Outcome::Pass,
        }
    }
}

/// On an apparent hit, searches a value foreign to the hit's neighborhood
/// inside one- and three-element windows around it; both must report
/// absence. Detects a hit slot whose content was overwritten with the key.
pub struct OverwriteWindow {
    desc: RelationDescriptor,
}

impl OverwriteWindow {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "overwrite-window",
                subject: "kth",
                suspected_error: "Overwriting error",
                production_safe: true,
            },
        }
    }
}

impl Default for OverwriteWindow {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<KthOccurrence> for OverwriteWindow {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let pos = match apparent_hit(source, ctx) {
            Ok(pos) => pos,
            Err(outcome) => return outcome,
        };
        let fixture = &source.input.fixture;
        let key = source.input.key;

        // y differs from the key and from both neighbors (when present)
        let mut avoid = vec![key];
        avoid.extend(fixture.get(pos - 1));
        avoid.extend(fixture.get(pos + 1));
        ctx.charge_derive(avoid.len() as u64 + 1);
        let y = avoid.iter().copied().max().expect("avoid holds the key") + 1;

        let win_lo = (pos - 1).max(fixture.lo);
        let win_hi = (pos + 1).min(fixture.hi);
        let mut mismatch = None;
        for sub in [fixture.narrowed(pos, pos), fixture.narrowed(win_lo, win_hi)] {
            ctx.charge_derive(1);
            let followup = match ctx.run_followup(KthInput {
                key: y,
                k: 1,
                fixture: sub,
            }) {
                Ok(idx) => idx,
                Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
            };
            let got = ctx.followup(followup).output.position;
            ctx.charge_check(1);
            if got != MISSING && mismatch.is_none() {
                mismatch = Some(format!("expected -1 got {got}"));
            }
        }
        match mismatch {
            Some(reason) => Outcome::Fail(reason),
            None => Outcome::Pass,
        }
    }
}

/// On an apparent hit, scans past it for the first differing element and
/// asks for the second occurrence starting just before that element; the
/// answer must be absent or lie beyond it. Detects programs that corrupt
/// the entries they visit after their first hit.
pub struct OverwriteScan {
    desc: RelationDescriptor,
}

impl OverwriteScan {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "overwrite-scan",
                subject: "kth",
                suspected_error: "Overwriting error",
                production_safe: true,
            },
        }
    }
}

impl Default for OverwriteScan {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<KthOccurrence> for OverwriteScan {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let pos = match apparent_hit(source, ctx) {
            Ok(pos) => pos,
            Err(outcome) => return outcome,
        };
        let fixture = &source.input.fixture;
        let key = source.input.key;

        // scan keeps the oh property by construction: at most as many
        // steps as the source run itself took
        let budget = source.cost.steps();
        let mut r = None;
        for (reads, q) in (pos + 1..=fixture.hi).enumerate() {
            if reads as u64 >= budget {
                return Outcome::Abandoned(format!("scan budget of {budget} steps exhausted"));
            }
            ctx.charge_derive(1);
            if fixture.get(q) != Some(key) {
                r = Some(q);
                break;
            }
        }
        let r = match r {
            Some(r) => r,
            None => {
                return Outcome::Abandoned(
                    "no element differing from the key beyond the hit".into(),
                )
            }
        };

        let followup = match ctx.run_followup(KthInput {
            key,
            k: 2,
            fixture: fixture.narrowed(r - 1, fixture.hi),
        }) {
            Ok(idx) => idx,
            Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
        };
        let got = ctx.followup(followup).output.position;
        ctx.charge_check(2);
        if got != MISSING && got <= r {
            return Outcome::Fail(format!("expected -1 or a position beyond {r} got {got}"));
        }
        Outcome::Pass
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

/// The worked-example fixture: 1, 3, 1, 4, 1, 3, 2.
pub fn paper_fixture() -> UnsortedFixture {
    UnsortedFixture::covering(vec![1, 3, 1, 4, 1, 3, 2])
}

impl CampaignSubject for KthOccurrence {
    type Fixture = UnsortedFixture;

    fn variants() -> Vec<Box<dyn Variant<Self>>> {
        vec![
            Box::new(Correct),
            Box::new(MutantInit),
            Box::new(MutantOverwrite),
        ]
    }

    fn relations() -> Vec<Box<dyn Relation<Self>>> {
        vec![
            Box::new(KeyAtPosition::new()),
            Box::new(ExistenceProbe::new()),
            Box::new(WrongOccurrence::new()),
            Box::new(OverwriteWindow::new()),
            Box::new(OverwriteScan::new()),
        ]
    }

    fn builtin_fixtures() -> Vec<BuiltinFixture<UnsortedFixture>> {
        let fx = paper_fixture();
        vec![BuiltinFixture {
            id: "paper-3.2",
            origin: FixtureOrigin::Paper,
            summary: format!("array {:?}, range {}..{}", fx.elements, fx.lo, fx.hi),
            value: fx,
        }]
    }

    fn parse_fixture(value: &serde_json::Value) -> Result<UnsortedFixture, EngineError> {
        let doc: FixtureDoc = serde_json::from_value(value.clone())
            .map_err(|e| EngineError::input(format!("bad kth fixture: {e}")))?;
        let fx = UnsortedFixture {
            elements: doc.array,
            lo: doc.lo,
            hi: doc.hi,
        };
        fx.validate()?;
        Ok(fx)
    }

    fn generate_input(rng: &mut ChaCha8Rng, fixture: Option<&UnsortedFixture>) -> KthInput {
        let fixture = match fixture {
            Some(fx) => fx.clone(),
            None => {
                // small value domain to force duplicates
                let len = rng.gen_range(1..=64usize);
                let elements = (0..len).map(|_| rng.gen_range(0..=9i64)).collect();
                UnsortedFixture::covering(elements)
            }
        };
        let key = if rng.gen_bool(0.5) {
            let idx = rng.gen_range(fixture.lo..=fixture.hi);
            fixture.get(idx).expect("index drawn inside the range")
        } else {
            rng.gen_range(0..=12i64)
        };
        let k = rng.gen_range(1..=fixture.range_len().min(6));
        KthInput { key, k, fixture }
    }

    fn input_from_overrides(
        fixture: &UnsortedFixture,
        overrides: &SourceOverrides,
    ) -> Result<KthInput, EngineError> {
        for (flag, set) in [
            ("--src", overrides.src.is_some()),
            ("--dst", overrides.dst.is_some()),
        ] {
            if set {
                return Err(EngineError::config(format!(
                    "override {flag} does not apply to subject 'kth'"
                )));
            }
        }
        let key = overrides
            .key
            .ok_or_else(|| EngineError::config("subject 'kth' needs --key"))?;
        let k = overrides.k.unwrap_or(1) as i64;
        Ok(KthInput {
            key,
            k,
            fixture: fixture.clone(),
        })
    }
}

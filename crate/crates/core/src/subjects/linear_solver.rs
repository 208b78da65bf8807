//! Gaussian elimination with partial pivoting: correct solver, a
//! pivot-initialization fault, the substitution (residual) check, and the
//! row/column swap relations.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::engine::{
    BuiltinFixture, CampaignSubject, CostMeter, EngineError, ExecutionOf, FixtureOrigin, Outcome,
    Relation, RelationDescriptor, SourceOverrides, Subject, Variant,
};

/// Pivot magnitudes at or below this count as zero.
pub const SINGULAR_EPS: f64 = 1e-12;
/// Relative residual bound for the substitution check.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Relative componentwise bound when comparing solutions.
pub const SOLUTION_TOL: f64 = 1e-9;
/// Smallest pivot magnitude accepted when generating random systems.
pub const PIVOT_FLOOR: f64 = 1e-6;

/// A square system `A x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl LinearSystem {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// Rows `i` and `j` (1-based) swapped in both the matrix and the
    /// right-hand side.
    pub fn rows_swapped(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.a.swap(i - 1, j - 1);
        out.b.swap(i - 1, j - 1);
        out
    }

    /// Columns `i` and `j` (1-based) swapped in the matrix only.
    pub fn cols_swapped(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        for row in &mut out.a {
            row.swap(i - 1, j - 1);
        }
        out
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let n = self.n();
        if n == 0 {
            return Err(EngineError::input("system needs at least one equation"));
        }
        if self.a.len() != n {
            return Err(EngineError::input("matrix and vector sizes differ"));
        }
        for row in &self.a {
            if row.len() != n {
                return Err(EngineError::input("matrix is not square"));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(EngineError::input("matrix entries must be finite"));
            }
        }
        if self.b.iter().any(|v| !v.is_finite()) {
            return Err(EngineError::input("vector entries must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveResult {
    Solution(Vec<f64>),
    NoSolution,
}

impl SolveResult {
    pub fn solution(&self) -> Option<&[f64]> {
        match self {
            SolveResult::Solution(x) => Some(x),
            SolveResult::NoSolution => None,
        }
    }
}

pub struct GaussianElimination;

impl Subject for GaussianElimination {
    type Input = LinearSystem;
    type Output = SolveResult;

    fn name() -> &'static str {
        "gauss"
    }

    fn validate(input: &Self::Input) -> Result<(), EngineError> {
        input.validate()
    }
}

/// Forward elimination and back substitution over the augmented matrix.
///
/// `faulty_pivot_init` starts each column's pivot scan at 2 instead of 0;
/// together with the pivot row index being kept across columns (as in the
/// modeled listing), columns whose remaining entries are all smaller than 2
/// in magnitude reuse a stale pivot row. Returns the result and the
/// smallest pivot magnitude met, for conditioning checks.
#[allow(clippy::needless_range_loop)] // row operations read and write rows of one matrix
fn eliminate(
    system: &LinearSystem,
    faulty_pivot_init: bool,
    meter: &mut CostMeter,
) -> (SolveResult, f64) {
    let n = system.n();
    let mut a = system.a.clone();
    let mut b = system.b.clone();
    let mut pivot_row: Option<usize> = None; // persists across columns
    let mut min_pivot = f64::INFINITY;

    for j in 0..n {
        let mut max = if faulty_pivot_init { 2.0 } else { 0.0 };
        for i in j..n {
            meter.tick(); // pivot comparison
            if a[i][j].abs() >= max {
                max = a[i][j].abs();
                pivot_row = Some(i);
            }
        }
        match pivot_row {
            Some(p) if p != j => {
                a.swap(p, j);
                b.swap(p, j);
                meter.tick(); // row interchange
            }
            // a scan that never updated leaves no row to swap in
            _ => {}
        }
        if a[j][j].abs() <= SINGULAR_EPS {
            return (SolveResult::NoSolution, min_pivot);
        }
        min_pivot = min_pivot.min(a[j][j].abs());
        for i in j + 1..n {
            let factor = a[i][j] / a[j][j];
            for col in j..n {
                a[i][col] -= factor * a[j][col];
            }
            b[i] -= factor * b[j];
            meter.tick(); // row operation
        }
    }

    let mut x = vec![0.0; n];
    for j in (0..n).rev() {
        if a[j][j].abs() <= SINGULAR_EPS {
            return (SolveResult::NoSolution, min_pivot);
        }
        let mut acc = b[j];
        for col in j + 1..n {
            acc -= a[j][col] * x[col];
        }
        x[j] = acc / a[j][j];
        meter.tick(); // back-substitution row
    }
    if x.iter().any(|v| !v.is_finite()) {
        // numeric blow-up: singular at working precision
        return (SolveResult::NoSolution, min_pivot);
    }
    (SolveResult::Solution(x), min_pivot)
}

/// Correct solver as a plain function.
pub fn gauss_correct(system: &LinearSystem) -> SolveResult {
    eliminate(system, false, &mut CostMeter::new()).0
}

/// Solves and reports the smallest pivot magnitude, for rejecting
/// ill-conditioned random systems.
pub fn solve_tracking_pivots(system: &LinearSystem) -> (SolveResult, f64) {
    eliminate(system, false, &mut CostMeter::new())
}

fn residual_ok(system: &LinearSystem, x: &[f64], meter: &mut CostMeter) -> bool {
    let n = system.n();
    let mut worst = 0.0f64;
    for i in 0..n {
        let acc: f64 = system.a[i].iter().zip(x).map(|(c, v)| c * v).sum();
        meter.charge(n as u64); // multiply-accumulate row
        worst = worst.max((acc - system.b[i]).abs());
    }
    meter.charge(n as u64); // comparisons against b
    let scale = system.b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    worst / scale <= RESIDUAL_TOL
}

/// Substitutes a solution back into the equations.
///
/// `None` when there is no solution to substitute; otherwise whether the
/// relative residual stays within [`RESIDUAL_TOL`].
pub fn residual_check(system: &LinearSystem, result: &SolveResult) -> Option<bool> {
    result
        .solution()
        .map(|x| residual_ok(system, x, &mut CostMeter::new()))
}

pub struct Correct;

impl Variant<GaussianElimination> for Correct {
    fn id(&self) -> &'static str {
        "correct"
    }

    fn execute(&self, input: &mut LinearSystem, meter: &mut CostMeter) -> (SolveResult, bool) {
        (eliminate(input, false, meter).0, false)
    }
}

/// Pivot-initialization fault: the scan threshold starts at 2, so small
/// sub-columns keep a stale pivot row and trigger wrong interchanges.
pub struct MutantPivot;

impl Variant<GaussianElimination> for MutantPivot {
    fn id(&self) -> &'static str {
        "mutant-pivot"
    }

    fn execute(&self, input: &mut LinearSystem, meter: &mut CostMeter) -> (SolveResult, bool) {
        (eliminate(input, true, meter).0, false)
    }
}

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

type Ctx<'a> = crate::engine::ApplyCtx<'a, GaussianElimination>;
type Source = ExecutionOf<GaussianElimination>;

/// Guard shared by the swap relations: the source must carry a solution
/// that survives substitution.
fn checked_solution<'s>(source: &'s Source, ctx: &mut Ctx<'_>) -> Result<&'s [f64], Outcome> {
    let x = match source.output.solution() {
        Some(x) => x,
        None => return Err(Outcome::Inapplicable("source reported no solution".into())),
    };
    let mut meter = CostMeter::new();
    let ok = residual_ok(&source.input, x, &mut meter);
    ctx.charge_derive(meter.steps());
    if !ok {
        return Err(Outcome::Fail("source residual check failed".into()));
    }
    Ok(x)
}

fn solutions_match(x: &[f64], y: &[f64]) -> Result<(), usize> {
    let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (idx, (a, b)) in x.iter().zip(y).enumerate() {
        if (a - b).abs() > SOLUTION_TOL * scale {
            return Err(idx + 1);
        }
    }
    Ok(())
}

/// Substitutes the source solution into the equations.
pub struct Residual {
    desc: RelationDescriptor,
}

impl Residual {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "residual",
                subject: "gauss",
                suspected_error: "Output fails substitution back into the equations",
                production_safe: true,
            },
        }
    }
}

impl Default for Residual {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<GaussianElimination> for Residual {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let x = match source.output.solution() {
            Some(x) => x,
            None => return Outcome::Inapplicable("source reported no solution".into()),
        };
        let mut meter = CostMeter::new();
        let ok = residual_ok(&source.input, x, &mut meter);
        ctx.charge_check(meter.steps());
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail("solution does not satisfy the equations".into())
        }
    }
}

/// Re-solves with two rows (and the matching right-hand-side entries)
/// interchanged; the solution must not change.
pub struct RowSwap {
    desc: RelationDescriptor,
    pinned: Option<(usize, usize)>,
}

impl RowSwap {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "row-swap",
                subject: "gauss",
                suspected_error: "Incorrect pivot selection",
                production_safe: true,
            },
            pinned: None,
        }
    }

    /// Fixes the swapped pair instead of drawing it from the seed stream.
    pub fn with_rows(mut self, i: usize, j: usize) -> Self {
        assert!(i < j, "rows must be given in increasing order");
        self.pinned = Some((i, j));
        self
    }
}

impl Default for RowSwap {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<GaussianElimination> for RowSwap {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let x = match checked_solution(source, ctx) {
            Ok(x) => x.to_vec(),
            Err(outcome) => return outcome,
        };
        let n = source.input.n();
        if n < 2 {
            return Outcome::Inapplicable("single-equation system has no swap".into());
        }
        let (i, j) = match self.pinned {
            Some(pair) => pair,
            None => draw_pair(ctx, n),
        };
        ctx.charge_derive(2); // two interchanges
        let swapped = source.input.rows_swapped(i, j);
        let followup = match ctx.run_followup(swapped) {
            Ok(idx) => idx,
            Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
        };
        let out = ctx.followup(followup).output.clone();
        ctx.charge_check(n as u64);
        match out.solution() {
            None => Outcome::Fail("follow-up reported no solution".into()),
            Some(y) => match solutions_match(&x, y) {
                Ok(()) => Outcome::Pass,
                Err(entry) => Outcome::Fail(format!(
                    "solution changed at entry {entry} after swapping rows {i} and {j}"
                )),
            },
        }
    }
}

/// Re-solves with two matrix columns interchanged; the solution must come
/// back with the matching entries exchanged.
pub struct ColSwap {
    desc: RelationDescriptor,
    pinned: Option<(usize, usize)>,
}

impl ColSwap {
    pub fn new() -> Self {
        Self {
            desc: RelationDescriptor {
                id: "col-swap",
                subject: "gauss",
                suspected_error: "Incorrect pivot selection",
                production_safe: true,
            },
            pinned: None,
        }
    }

    pub fn with_cols(mut self, i: usize, j: usize) -> Self {
        assert!(i < j, "columns must be given in increasing order");
        self.pinned = Some((i, j));
        self
    }
}

impl Default for ColSwap {
    fn default() -> Self {
        Self::new()
    }
}

impl Relation<GaussianElimination> for ColSwap {
    fn descriptor(&self) -> &RelationDescriptor {
        &self.desc
    }

    fn check(&self, source: &Source, ctx: &mut Ctx<'_>) -> Outcome {
        let x = match checked_solution(source, ctx) {
            Ok(x) => x.to_vec(),
            Err(outcome) => return outcome,
        };
        let n = source.input.n();
        if n < 2 {
            return Outcome::Inapplicable("single-equation system has no swap".into());
        }
        let (i, j) = match self.pinned {
            Some(pair) => pair,
            None => draw_pair(ctx, n),
        };
        ctx.charge_derive(2);
        let swapped = source.input.cols_swapped(i, j);
        let followup = match ctx.run_followup(swapped) {
            Ok(idx) => idx,
            Err(e) => return Outcome::Fail(format!("follow-up rejected: {e}")),
        };
        let out = ctx.followup(followup).output.clone();
        let mut expected = x.clone();
        expected.swap(i - 1, j - 1);
        ctx.charge_check(n as u64);
        match out.solution() {
            None => Outcome::Fail("follow-up reported no solution".into()),
            Some(y) => match solutions_match(&expected, y) {
                Ok(()) => Outcome::Pass,
                Err(entry) => Outcome::Fail(format!(
                    "solution mismatch at entry {entry} after swapping columns {i} and {j}"
                )),
            },
        }
    }
}

/// Uniform unordered pair 1 <= i < j <= n from the relation's stream.
fn draw_pair(ctx: &mut Ctx<'_>, n: usize) -> (usize, usize) {
    let a = ctx.rng().gen_range(1..=n);
    let mut b = ctx.rng().gen_range(1..=n - 1);
    if b >= a {
        b += 1;
    }
    ctx.charge_derive(1);
    (a.min(b), a.max(b))
}

// ---------------------------------------------------------------------------
// Campaign wiring
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct FixtureDoc {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

/// The worked-example system: its solution is (0, 0, 1/3).
pub fn paper_fixture() -> LinearSystem {
    LinearSystem {
        a: vec![
            vec![1.0, 2.0, 3.0],
            vec![2.0, 2.0, 3.0],
            vec![3.0, 3.0, 3.0],
        ],
        b: vec![1.0, 1.0, 1.0],
    }
}

impl CampaignSubject for GaussianElimination {
    type Fixture = LinearSystem;

    fn variants() -> Vec<Box<dyn Variant<Self>>> {
        vec![Box::new(Correct), Box::new(MutantPivot)]
    }

    fn relations() -> Vec<Box<dyn Relation<Self>>> {
        vec![
            Box::new(Residual::new()),
            Box::new(RowSwap::new()),
            Box::new(ColSwap::new()),
        ]
    }

    fn builtin_fixtures() -> Vec<BuiltinFixture<LinearSystem>> {
        let fx = paper_fixture();
        vec![BuiltinFixture {
            id: "paper-3.4",
            origin: FixtureOrigin::Paper,
            summary: format!("3x3 system a = {:?}, b = {:?}", fx.a, fx.b),
            value: fx,
        }]
    }

    fn parse_fixture(value: &serde_json::Value) -> Result<LinearSystem, EngineError> {
        let doc: FixtureDoc = serde_json::from_value(value.clone())
            .map_err(|e| EngineError::input(format!("bad gauss fixture: {e}")))?;
        let system = LinearSystem { a: doc.a, b: doc.b };
        system.validate()?;
        Ok(system)
    }

    fn generate_input(rng: &mut ChaCha8Rng, fixture: Option<&LinearSystem>) -> LinearSystem {
        match fixture {
            Some(fx) => fx.clone(),
            None => random_well_conditioned(rng),
        }
    }

    fn input_from_overrides(
        _fixture: &LinearSystem,
        overrides: &SourceOverrides,
    ) -> Result<LinearSystem, EngineError> {
        if !overrides.is_empty() {
            return Err(EngineError::config(
                "subject 'gauss' takes no source overrides",
            ));
        }
        unreachable!("callers check for empty overrides first")
    }
}

/// Random system with entries in [-10, 10], resampled until the
/// elimination meets no pivot smaller than [`PIVOT_FLOOR`].
pub fn random_well_conditioned(rng: &mut ChaCha8Rng) -> LinearSystem {
    random_well_conditioned_sized(rng, 2, 6)
}

pub fn random_well_conditioned_sized(
    rng: &mut ChaCha8Rng,
    min_n: usize,
    max_n: usize,
) -> LinearSystem {
    let n = rng.gen_range(min_n..=max_n);
    loop {
        let a: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-10.0..=10.0)).collect())
            .collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..=10.0)).collect();
        let system = LinearSystem { a, b };
        let (result, min_pivot) = solve_tracking_pivots(&system);
        if matches!(result, SolveResult::Solution(_)) && min_pivot >= PIVOT_FLOOR {
            return system;
        }
    }
}

//! Deterministic benchmark model generators.
//!
//! Six families: grid worlds (warehouse, rover, nav) where a vehicle moves
//! between unit cells under battery dynamics, the two-tank water-level
//! monitor, a two-rod reactor schedule, and a city route network. Every
//! generator is a pure function of its spec: byte-identical output across
//! runs. Each one also produces a human-readable layout sheet.
//!
//! Grid conventions: `rows x cols` cells numbered row-major from 1, cell `k`
//! occupying the unit box `[col-1, col] x [row-1, row]` where
//! `row = ceil(k / cols)`. Movement is 4-neighbor; blocked cells keep their
//! location but have no incident edges. Edge `e{b}^{a}` goes from cell `a`
//! to cell `b`; its guard pins the exact crossing point on the shared cell
//! boundary and its reset re-anchors the position there, so the time spent
//! in a cell is exactly the distance between its entry and exit pins.
//! Crossing pins sit at the midpoint of the shared boundary, except on edges
//! incident to an oil cell or entering the charge cell, which cross at the
//! boundary's far corner (the marked detour around hazards).

use crate::format::{ModelDocument, FORMAT_VERSION};
use hxplain_core::constraint::{LinearConstraint, RelOp};
use hxplain_core::model::{Affine, Automaton, Edge, Location, PlanningProblem, StateSet};
use hxplain_core::{rat, rint, Rat};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Warehouse,
    Rover,
    WaterLevel,
    Nav,
    Nrs,
    City,
}

impl Family {
    pub fn from_name(name: &str) -> Option<Family> {
        Some(match name {
            "warehouse" => Family::Warehouse,
            "rover" => Family::Rover,
            "water_level" | "water-level" => Family::WaterLevel,
            "nav" => Family::Nav,
            "nrs" => Family::Nrs,
            "city" => Family::City,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Warehouse => "warehouse",
            Family::Rover => "rover",
            Family::WaterLevel => "water_level",
            Family::Nav => "nav",
            Family::Nrs => "nrs",
            Family::City => "city",
        }
    }
}

/// Whose map a warehouse model describes: the agent knows the ground truth,
/// the human is missing one obstacle and all surface hazards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum View {
    #[default]
    Agent,
    Human,
}

#[derive(Clone, Debug)]
pub struct BenchmarkSpec {
    pub family: Family,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub depth: Option<usize>,
    pub view: View,
}

impl BenchmarkSpec {
    pub fn new(family: Family) -> Self {
        BenchmarkSpec { family, rows: None, cols: None, depth: None, view: View::default() }
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Generate a model document plus its layout sheet.
/// Spec op `generate_benchmark`.
pub fn generate_benchmark(spec: &BenchmarkSpec) -> Result<(ModelDocument, String), BenchError> {
    match spec.family {
        Family::Warehouse => warehouse(spec),
        Family::Rover => rover(spec),
        Family::WaterLevel => water_level(spec),
        Family::Nav => nav(spec),
        Family::Nrs => nrs(spec),
        Family::City => city(spec),
    }
}

// ---- shared grid helpers ----------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Right,
    Up,
    Left,
    Down,
}

const DIRS: [Dir; 4] = [Dir::Right, Dir::Up, Dir::Left, Dir::Down];

struct Grid {
    rows: usize,
    cols: usize,
}

impl Grid {
    fn row(&self, cell: usize) -> usize {
        (cell - 1) / self.cols + 1
    }

    fn col(&self, cell: usize) -> usize {
        (cell - 1) % self.cols + 1
    }

    fn neighbor(&self, cell: usize, dir: Dir) -> Option<usize> {
        let (r, c) = (self.row(cell), self.col(cell));
        let (nr, nc) = match dir {
            Dir::Right => (r, c + 1),
            Dir::Up => (r + 1, c),
            Dir::Left => (r, c.checked_sub(1)?),
            Dir::Down => (r.checked_sub(1)?, c),
        };
        (nr >= 1 && nr <= self.rows && nc >= 1 && nc <= self.cols)
            .then(|| (nr - 1) * self.cols + nc)
    }

    fn center(&self, cell: usize) -> (Rat, Rat) {
        let (r, c) = (self.row(cell), self.col(cell));
        (rint(c as i64) - rat(1, 2), rint(r as i64) - rat(1, 2))
    }

    /// Crossing pin of the move `cell -> dir`: the shared boundary value on
    /// the moved axis, and either the midpoint or the far corner on the
    /// cross axis.
    fn pin(&self, cell: usize, dir: Dir, corner: bool) -> (Rat, Rat) {
        let (r, c) = (self.row(cell) as i64, self.col(cell) as i64);
        let cross = |lo: i64| if corner { rint(lo + 1) } else { rint(lo + 1) - rat(1, 2) };
        match dir {
            Dir::Right => (rint(c), cross(r - 1)),
            Dir::Left => (rint(c - 1), cross(r - 1)),
            Dir::Up => (cross(c - 1), rint(r)),
            Dir::Down => (cross(c - 1), rint(r - 1)),
        }
    }

    fn box_invariant(&self, cell: usize) -> Vec<LinearConstraint<Rat>> {
        let (r, c) = (self.row(cell) as i64, self.col(cell) as i64);
        vec![
            LinearConstraint::atom("x", RelOp::Ge, rint(c - 1)),
            LinearConstraint::atom("x", RelOp::Le, rint(c)),
            LinearConstraint::atom("y", RelOp::Ge, rint(r - 1)),
            LinearConstraint::atom("y", RelOp::Le, rint(r)),
        ]
    }
}

fn interval(lo: Rat, hi: Rat) -> (Rat, Rat) {
    (lo, hi)
}

fn exact(rate: Rat) -> (Rat, Rat) {
    (rate.clone(), rate)
}

fn eq_atom(var: &str, value: Rat) -> LinearConstraint<Rat> {
    LinearConstraint::atom(var, RelOp::Eq, value)
}

fn grid_layout(
    grid: &Grid,
    title: &str,
    mark: impl Fn(usize) -> char,
    legend: &str,
) -> String {
    let mut out = format!("{title}\n");
    for r in (1..=grid.rows).rev() {
        for c in 1..=grid.cols {
            let cell = (r - 1) * grid.cols + c;
            out.push_str(&format!("{:>4}{}", cell, mark(cell)));
        }
        out.push('\n');
    }
    out.push_str(legend);
    out.push('\n');
    out
}

// ---- warehouse --------------------------------------------------------------

struct WarehouseLayout {
    init: usize,
    goal: usize,
    charge: usize,
    shared_blocked: BTreeSet<usize>,
    agent_blocked: BTreeSet<usize>,
    oil: BTreeSet<usize>,
}

fn warehouse_layout(rows: usize, cols: usize) -> Result<WarehouseLayout, BenchError> {
    if rows < 2 || cols < 3 {
        return Err(BenchError::InvalidParams("warehouse needs rows >= 2, cols >= 3".into()));
    }
    if (rows, cols) == (4, 6) {
        // The shipped floor: start in row 2 col 1, goal row 3 col 6, charge
        // station row 4 col 5, one obstacle known only to the agent (cell
        // 20), slippery cells 10, 16, 21.
        Ok(WarehouseLayout {
            init: 7,
            goal: 18,
            charge: 23,
            shared_blocked: BTreeSet::from([2, 12]),
            agent_blocked: BTreeSet::from([20]),
            oil: BTreeSet::from([10, 16, 21]),
        })
    } else {
        // Derived floor for other sizes: open grid, charge next to the goal.
        let init = cols + 1;
        let goal = 3 * cols.min(rows * cols);
        let charge = (rows - 1) * cols + cols - 1;
        Ok(WarehouseLayout {
            init,
            goal,
            charge,
            shared_blocked: BTreeSet::new(),
            agent_blocked: BTreeSet::new(),
            oil: BTreeSet::new(),
        })
    }
}

fn warehouse(spec: &BenchmarkSpec) -> Result<(ModelDocument, String), BenchError> {
    let rows = spec.rows.unwrap_or(4);
    let cols = spec.cols.unwrap_or(6);
    let depth = spec.depth.unwrap_or(10);
    let lay = warehouse_layout(rows, cols)?;
    let grid = Grid { rows, cols };
    let n = rows * cols;

    let blocked: BTreeSet<usize> = match spec.view {
        View::Agent => lay.shared_blocked.union(&lay.agent_blocked).copied().collect(),
        View::Human => lay.shared_blocked.clone(),
    };
    for (what, cell) in [("initial", lay.init), ("goal", lay.goal), ("charge", lay.charge)] {
        if blocked.contains(&cell) || cell < 1 || cell > n {
            return Err(BenchError::InvalidParams(format!("{what} cell {cell} unusable")));
        }
    }
    // The human does not know about oil, so its charge rate is uniform.
    let oil_rate_of = |cell: usize| -> Rat {
        if spec.view == View::Agent && lay.oil.contains(&cell) {
            rint(-4)
        } else {
            rint(-2)
        }
    };
    let floor = rat(1, 10);
    let cap = rint(10);

    let mut locations = Vec::with_capacity(n);
    for cell in 1..=n {
        let mut invariant = grid.box_invariant(cell);
        invariant.push(LinearConstraint::atom("c", RelOp::Ge, floor.clone()));
        invariant.push(LinearConstraint::atom("c", RelOp::Le, cap.clone()));
        locations.push(Location {
            id: format!("l{cell}"),
            invariant,
            flow: BTreeMap::from([
                ("x".to_string(), interval(rint(-1), rint(1))),
                ("y".to_string(), interval(rint(-1), rint(1))),
                ("c".to_string(), exact(oil_rate_of(cell))),
            ]),
        });
    }

    // Pins reference the true hazard map in both views: they are physical
    // crossing marks on the floor, not knowledge.
    let corner_pin = |a: usize, b: usize| -> bool {
        lay.oil.contains(&a) || lay.oil.contains(&b) || b == lay.charge
    };
    let mut edges = Vec::new();
    for cell in 1..=n {
        if blocked.contains(&cell) {
            continue;
        }
        for dir in DIRS {
            let Some(next) = grid.neighbor(cell, dir) else { continue };
            if blocked.contains(&next) {
                continue;
            }
            let (px, py) = grid.pin(cell, dir, corner_pin(cell, next));
            let mut reset = BTreeMap::from([
                ("x".to_string(), Affine::constant(px.clone())),
                ("y".to_string(), Affine::constant(py.clone())),
            ]);
            if next == lay.charge {
                reset.insert("c".to_string(), Affine::constant(cap.clone()));
            }
            edges.push(Edge {
                id: format!("e{next}^{cell}"),
                source: format!("l{cell}"),
                target: format!("l{next}"),
                label: format!("mv_{cell}_{next}"),
                guard: vec![eq_atom("x", px), eq_atom("y", py)],
                reset,
            });
        }
    }

    let (ix, iy) = grid.center(lay.init);
    let init = StateSet {
        location: format!("l{}", lay.init),
        constraints: vec![eq_atom("x", ix), eq_atom("y", iy), eq_atom("c", rint(10))],
    };
    let problem = PlanningProblem {
        automaton: Automaton {
            variables: vec!["x".into(), "y".into(), "c".into()],
            locations,
            edges,
            init: init.clone(),
        },
        init,
        goal: StateSet { location: format!("l{}", lay.goal), constraints: vec![] },
        depth,
        required_visits: BTreeSet::new(),
    };

    let view_name = match spec.view {
        View::Agent => "agent",
        View::Human => "human",
    };
    let layout = grid_layout(
        &grid,
        &format!("warehouse {rows}x{cols} ({view_name} view)"),
        |cell| {
            if blocked.contains(&cell) {
                '#'
            } else if spec.view == View::Agent && lay.oil.contains(&cell) {
                '~'
            } else if cell == lay.init {
                'S'
            } else if cell == lay.goal {
                'G'
            } else if cell == lay.charge {
                '+'
            } else {
                ' '
            }
        },
        "legend: # blocked  ~ oil (drain 4)  + charge station  S start  G goal\n\
         battery: start 10, drain 2 per time unit, floor 1/10, cap 10\n\
         crossing pins: boundary midpoint; far corner next to oil and into the charge cell",
    );

    let mut metadata = BTreeMap::new();
    metadata.insert("name".into(), format!("warehouse-{rows}x{cols}-{view_name}"));
    metadata.insert(
        "description".into(),
        "grid robot with a rechargeable battery carrying a consignment to the goal cell".into(),
    );
    Ok((ModelDocument { format_version: FORMAT_VERSION, metadata, problem }, layout))
}

// ---- rover ------------------------------------------------------------------

fn rover(spec: &BenchmarkSpec) -> Result<(ModelDocument, String), BenchError> {
    if spec.rows.is_some() || spec.cols.is_some() {
        return Err(BenchError::InvalidParams("the rover terrain is fixed at 5x5".into()));
    }
    let depth = spec.depth.unwrap_or(15);
    let grid = Grid { rows: 5, cols: 5 };
    let n = 25;
    let blocked = BTreeSet::from([4, 7, 9, 12, 18, 22]);
    let sampling = BTreeSet::from([1, 24]);
    let inclined = BTreeSet::from([3, 8]);
    let rate_of = |cell: usize| -> Rat {
        if sampling.contains(&cell) {
            rint(-2)
        } else if inclined.contains(&cell) {
            rint(-3)
        } else {
            rint(-1)
        }
    };

    // Motion is abstracted to a transit clock: every cell crossing takes one
    // time unit, during which the battery drains at the cell's rate.
    let mut locations = Vec::with_capacity(n);
    for cell in 1..=n {
        locations.push(Location {
            id: format!("l{cell}"),
            invariant: vec![
                LinearConstraint::atom("c", RelOp::Ge, rint(0)),
                LinearConstraint::atom("z", RelOp::Ge, rint(0)),
                LinearConstraint::atom("z", RelOp::Le, rint(1)),
            ],
            flow: BTreeMap::from([
                ("c".to_string(), exact(rate_of(cell))),
                ("z".to_string(), exact(rint(1))),
            ]),
        });
    }
    let mut edges = Vec::new();
    for cell in 1..=n {
        if blocked.contains(&cell) {
            continue;
        }
        for dir in DIRS {
            let Some(next) = grid.neighbor(cell, dir) else { continue };
            if blocked.contains(&next) {
                continue;
            }
            edges.push(Edge {
                id: format!("e{next}^{cell}"),
                source: format!("l{cell}"),
                target: format!("l{next}"),
                label: format!("mv_{cell}_{next}"),
                guard: vec![eq_atom("z", rint(1))],
                reset: BTreeMap::from([("z".to_string(), Affine::constant(rint(0)))]),
            });
        }
    }
    let init = StateSet {
        location: "l11".into(),
        constraints: vec![eq_atom("c", rint(10)), eq_atom("z", rint(0))],
    };
    let problem = PlanningProblem {
        automaton: Automaton {
            variables: vec!["c".into(), "z".into()],
            locations,
            edges,
            init: init.clone(),
        },
        init,
        goal: StateSet { location: "l25".into(), constraints: vec![] },
        depth,
        required_visits: BTreeSet::from(["l1".to_string(), "l24".to_string()]),
    };
    let layout = grid_layout(
        &grid,
        "rover terrain 5x5",
        |cell| {
            if blocked.contains(&cell) {
                '#'
            } else if sampling.contains(&cell) {
                '*'
            } else if inclined.contains(&cell) {
                '^'
            } else if cell == 11 {
                'S'
            } else if cell == 25 {
                'G'
            } else {
                ' '
            }
        },
        "legend: # impassable  * sampling site (drain 2)  ^ incline (drain 3)  S start  G base station\n\
         battery: start 10, drain 1 per time unit elsewhere, floor 0; every cell transit takes 1 time unit\n\
         task: collect samples at cells 1 and 24, then reach the base station",
    );
    let mut metadata = BTreeMap::new();
    metadata.insert("name".into(), "rover-5x5".into());
    metadata.insert(
        "description".into(),
        "battery-powered rover collecting samples on a partially impassable terrain".into(),
    );
    Ok((ModelDocument { format_version: FORMAT_VERSION, metadata, problem }, layout))
}

// ---- water level monitor ------------------------------------------------------

fn water_level(spec: &BenchmarkSpec) -> Result<(ModelDocument, String), BenchError> {
    if spec.rows.is_some() || spec.cols.is_some() {
        return Err(BenchError::InvalidParams("water_level takes no grid parameters".into()));
    }
    let depth = spec.depth.unwrap_or(20);
    let clock_flow = |dy: i64| {
        BTreeMap::from([
            ("x".to_string(), exact(rint(1))),
            ("y".to_string(), exact(rint(dy))),
        ])
    };
    let still = BTreeMap::from([
        ("x".to_string(), exact(rint(0))),
        ("y".to_string(), exact(rint(0))),
    ]);
    let between = |var: &str, lo: i64, hi: i64| {
        vec![
            LinearConstraint::atom(var, RelOp::Ge, rint(lo)),
            LinearConstraint::atom(var, RelOp::Le, rint(hi)),
        ]
    };
    let locations = vec![
        // Pump on, level rising toward the high mark.
        Location { id: "l1".into(), invariant: between("y", 1, 10), flow: clock_flow(1) },
        // Shut-off delay: still rising for at most 2 time units.
        Location {
            id: "l2".into(),
            invariant: [between("x", 0, 2), between("y", 10, 14)].concat(),
            flow: clock_flow(1),
        },
        // Pump off, level falling toward the low mark.
        Location { id: "l3".into(), invariant: between("y", 5, 12), flow: clock_flow(-2) },
        // Switch-on delay: still falling for at most 2 time units.
        Location {
            id: "l4".into(),
            invariant: [between("x", 0, 2), between("y", 0, 5)].concat(),
            flow: clock_flow(-2),
        },
        // Maintenance mode; not connected.
        Location { id: "l5".into(), invariant: vec![], flow: still.clone() },
        // Unsafe: overflow or underflow.
        Location { id: "l6".into(), invariant: vec![], flow: still },
    ];
    let edge = |id: &str, src: &str, dst: &str, label: &str, guard: Vec<LinearConstraint<Rat>>, reset_clock: bool| Edge {
        id: id.into(),
        source: src.into(),
        target: dst.into(),
        label: label.into(),
        guard,
        reset: if reset_clock {
            BTreeMap::from([("x".to_string(), Affine::constant(rint(0)))])
        } else {
            BTreeMap::new()
        },
    };
    let edges = vec![
        edge("e2^1", "l1", "l2", "reach_high", vec![eq_atom("y", rint(10))], true),
        edge("e3^2", "l2", "l3", "pump_off", vec![eq_atom("x", rint(2))], false),
        edge("e4^3", "l3", "l4", "reach_low", vec![eq_atom("y", rint(5))], true),
        edge("e1^4", "l4", "l1", "pump_on", vec![eq_atom("x", rint(2))], false),
        edge("e6^2", "l2", "l6", "overflow", vec![eq_atom("y", rint(15))], false),
        edge("e6^4", "l4", "l6", "underflow", vec![eq_atom("y", rint(0))], false),
    ];
    let init = StateSet {
        location: "l1".into(),
        constraints: vec![eq_atom("x", rint(0)), eq_atom("y", rint(1))],
    };
    let problem = PlanningProblem {
        automaton: Automaton {
            variables: vec!["x".into(), "y".into()],
            locations,
            edges,
            init: init.clone(),
        },
        init,
        goal: StateSet { location: "l6".into(), constraints: vec![] },
        depth,
        required_visits: BTreeSet::new(),
    };
    let layout = "water-level monitor\n\
        l1 rising (dy=+1, 1<=y<=10) --y==10--> l2 shut-off delay (x<=2)\n\
        l2 --x==2--> l3 falling (dy=-2, y>=5) --y==5--> l4 switch-on delay (x<=2)\n\
        l4 --x==2--> l1 (limit cycle, level between 1 and 12)\n\
        unsafe exits: l2 --y==15--> l6 (overflow), l4 --y==0--> l6 (underflow)\n\
        l5 is the disconnected maintenance mode; the task is to reach l6\n"
        .to_string();
    let mut metadata = BTreeMap::new();
    metadata.insert("name".into(), "water-level-monitor".into());
    metadata.insert(
        "description".into(),
        "two-phase pump controller; the planning task drives the tank to an unsafe level".into(),
    );
    Ok((ModelDocument { format_version: FORMAT_VERSION, metadata, problem }, layout))
}

// ---- nav ----------------------------------------------------------------------

fn nav(spec: &BenchmarkSpec) -> Result<(ModelDocument, String), BenchError> {
    if spec.rows.is_some() || spec.cols.is_some() {
        return Err(BenchError::InvalidParams("nav is fixed at 3x3".into()));
    }
    let depth = spec.depth.unwrap_or(10);
    let grid = Grid { rows: 3, cols: 3 };
    let n = 9;
    let mut locations = Vec::with_capacity(n);
    for cell in 1..=n {
        let mut invariant = grid.box_invariant(cell);
        invariant.push(LinearConstraint::atom("f", RelOp::Ge, rint(0)));
        locations.push(Location {
            id: format!("l{cell}"),
            invariant,
            flow: BTreeMap::from([
                ("x".to_string(), interval(rint(-1), rint(1))),
                ("y".to_string(), interval(rint(-1), rint(1))),
                ("f".to_string(), exact(rint(-1))),
            ]),
        });
    }
    let mut edges = Vec::new();
    for cell in 1..=n {
        for dir in DIRS {
            let Some(next) = grid.neighbor(cell, dir) else { continue };
            let (px, py) = grid.pin(cell, dir, false);
            edges.push(Edge {
                id: format!("e{next}^{cell}"),
                source: format!("l{cell}"),
                target: format!("l{next}"),
                label: format!("mv_{cell}_{next}"),
                guard: vec![eq_atom("x", px.clone()), eq_atom("y", py.clone())],
                reset: BTreeMap::from([
                    ("x".to_string(), Affine::constant(px)),
                    ("y".to_string(), Affine::constant(py)),
                ]),
            });
        }
    }
    let init = StateSet {
        location: "l1".into(),
        constraints: vec![
            eq_atom("x", rat(1, 2)),
            eq_atom("y", rat(1, 2)),
            eq_atom("f", rat(5, 4)),
        ],
    };
    let problem = PlanningProblem {
        automaton: Automaton {
            variables: vec!["x".into(), "y".into(), "f".into()],
            locations,
            edges,
            init: init.clone(),
        },
        init,
        goal: StateSet { location: "l6".into(), constraints: vec![] },
        depth,
        required_visits: BTreeSet::new(),
    };
    let layout = grid_layout(
        &grid,
        "nav 3x3",
        |cell| match cell {
            1 => 'S',
            6 => 'G',
            _ => ' ',
        },
        "legend: S start (0.5, 0.5)  G target region\n\
         point robot, speed bounded by 1 per axis, fuel 5/4 draining 1 per time unit",
    );
    let mut metadata = BTreeMap::new();
    metadata.insert("name".into(), "nav-3x3".into());
    metadata.insert("description".into(), "point robot in a 3x3 partitioned plane".into());
    Ok((ModelDocument { format_version: FORMAT_VERSION, metadata, problem }, layout))
}

// ---- nrs ----------------------------------------------------------------------

fn nrs(spec: &BenchmarkSpec) -> Result<(ModelDocument, String), BenchError> {
    if spec.rows.is_some() || spec.cols.is_some() {
        return Err(BenchError::InvalidParams("nrs takes no grid parameters".into()));
    }
    let depth = spec.depth.unwrap_or(15);
    let n = 27;
    let mut locations = Vec::with_capacity(n);
    for i in 1..=n {
        locations.push(Location {
            id: format!("l{i}"),
            invariant: vec![
                LinearConstraint::atom("f", RelOp::Ge, rint(0)),
                LinearConstraint::atom("z", RelOp::Ge, rint(0)),
                LinearConstraint::atom("z", RelOp::Le, rint(1)),
            ],
            flow: BTreeMap::from([
                ("f".to_string(), exact(rint(-1))),
                ("z".to_string(), exact(rint(1))),
            ]),
        });
    }
    let step = |src: usize, dst: usize| Edge {
        id: format!("e{dst}^{src}"),
        source: format!("l{src}"),
        target: format!("l{dst}"),
        label: format!("step_{src}_{dst}"),
        guard: vec![eq_atom("z", rint(1))],
        reset: BTreeMap::from([("z".to_string(), Affine::constant(rint(0)))]),
    };
    let mut edges = Vec::new();
    // Rod-1 schedule: l1 -> l2 -> ... -> l12 -> l25.
    for i in 1..12 {
        edges.push(step(i, i + 1));
    }
    edges.push(step(12, 25));
    // Rod-2 schedule: l1 -> l13 -> l14 -> ... -> l24 -> l25.
    edges.push(step(1, 13));
    for i in 13..24 {
        edges.push(step(i, i + 1));
    }
    edges.push(step(24, 25));
    // Reset and local rollback transitions; l26/l27 are the jammed pair.
    edges.push(step(25, 1));
    edges.push(step(5, 4));
    edges.push(step(17, 16));
    edges.push(step(26, 27));
    edges.push(step(27, 26));

    let init = StateSet {
        location: "l1".into(),
        constraints: vec![eq_atom("f", rint(10)), eq_atom("z", rint(0))],
    };
    let problem = PlanningProblem {
        automaton: Automaton {
            variables: vec!["f".into(), "z".into()],
            locations,
            edges,
            init: init.clone(),
        },
        init,
        goal: StateSet { location: "l25".into(), constraints: vec![] },
        depth,
        required_visits: BTreeSet::new(),
    };
    let layout = "reactor rod scheduler (27 states, 30 transitions)\n\
        rod-1 insertion sequence: l1 -> l2 -> ... -> l12 -> l25 (12 steps)\n\
        rod-2 insertion sequence: l1 -> l13 -> ... -> l24 -> l25 (13 steps)\n\
        extras: l25->l1 restart, l5->l4 and l17->l16 rollbacks, l26<->l27 jammed pair\n\
        every step takes 1 time unit; coolant budget f starts at 10 and drains 1 per unit\n\
        the unsafe state l25 needs 12+ steps on either schedule, beyond the budget\n"
        .to_string();
    let mut metadata = BTreeMap::new();
    metadata.insert("name".into(), "nrs-rods".into());
    metadata.insert("description".into(), "two-rod reactor schedule driven toward the unsafe state".into());
    Ok((ModelDocument { format_version: FORMAT_VERSION, metadata, problem }, layout))
}

// ---- city ---------------------------------------------------------------------

fn city(spec: &BenchmarkSpec) -> Result<(ModelDocument, String), BenchError> {
    if spec.rows.is_some() || spec.cols.is_some() {
        return Err(BenchError::InvalidParams("city takes no grid parameters".into()));
    }
    let depth = spec.depth.unwrap_or(10);
    let n = 10;
    let mut locations = Vec::with_capacity(n);
    for i in 1..=n {
        locations.push(Location {
            id: format!("l{i}"),
            invariant: vec![
                LinearConstraint::atom("b", RelOp::Ge, rint(0)),
                LinearConstraint::atom("z", RelOp::Ge, rint(0)),
            ],
            flow: BTreeMap::from([
                ("b".to_string(), exact(rint(-1))),
                ("z".to_string(), exact(rint(1))),
            ]),
        });
    }
    let route = |src: usize, dst: usize, delay: i64| Edge {
        id: format!("e{dst}^{src}"),
        source: format!("l{src}"),
        target: format!("l{dst}"),
        label: format!("drive_{src}_{dst}"),
        guard: vec![eq_atom("z", rint(delay))],
        reset: BTreeMap::from([("z".to_string(), Affine::constant(rint(0)))]),
    };
    let mut edges = Vec::new();
    // Two-way avenues (junctures A..J are l1..l10).
    for (a, b, d) in [
        (1, 2, 2),
        (1, 3, 2),
        (2, 4, 2),
        (3, 4, 3),
        (4, 5, 3),
        (4, 6, 4),
        (5, 7, 14),
        (6, 7, 15),
        (7, 8, 1),
    ] {
        edges.push(route(a, b, d));
        edges.push(route(b, a, d));
    }
    // One-way streets.
    for (a, b, d) in [
        (7, 9, 1),
        (7, 10, 1),
        (9, 10, 1),
        (10, 8, 1),
        (2, 3, 1),
        (5, 6, 1),
        (8, 1, 1),
    ] {
        edges.push(route(a, b, d));
    }
    let init = StateSet {
        location: "l1".into(),
        constraints: vec![eq_atom("b", rint(20)), eq_atom("z", rint(0))],
    };
    let problem = PlanningProblem {
        automaton: Automaton {
            variables: vec!["b".into(), "z".into()],
            locations,
            edges,
            init: init.clone(),
        },
        init,
        goal: StateSet { location: "l8".into(), constraints: vec![] },
        depth,
        required_visits: BTreeSet::new(),
    };
    let layout = "city route network (junctures A..J = l1..l10)\n\
        A -2- B -2- D    A -2- C -3- D   (two ways into the hub D)\n\
        D -3- E -14- G   D -4- F -15- G  (two long avenues into G)\n\
        G -1- H (destination); spurs G->I->J->H one-way; B->C, E->F, H->A one-way\n\
        battery b starts at 20 and drains 1 per time unit; each route guard\n\
        fixes the juncture-to-juncture delay, so reaching G costs at least 21\n"
        .to_string();
    let mut metadata = BTreeMap::new();
    metadata.insert("name".into(), "city-network".into());
    metadata.insert("description".into(), "battery car crossing a city route network".into());
    Ok((ModelDocument { format_version: FORMAT_VERSION, metadata, problem }, layout))
}

//! Python bindings. The module is imported as `wayfind`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use wayfind::floorplan::{parse_scenario, serialize_scenario, ScenarioError};
use wayfind::geometry::{self, GoalEllipse, Point2, Segment};
use wayfind::render::render_svg;
use wayfind::sim::{self, RunParams, DEFAULT_DT, DEFAULT_STEP_LIMIT};

create_exception!(wayfind, ScenarioInvalid, PyValueError, "Scenario failed to parse or validate.");

type Xy = (f64, f64);

fn pt((x, y): Xy) -> Point2 {
    Point2::new(x, y)
}

fn xy(p: Point2) -> Xy {
    (p.x, p.y)
}

fn walls(ws: Vec<(Xy, Xy)>) -> Vec<Segment> {
    ws.into_iter().map(|(a, b)| Segment::new(pt(a), pt(b))).collect()
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scenario_err(e: ScenarioError) -> PyErr {
    match &e {
        ScenarioError::Invalid(issues) => {
            let lines: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
            ScenarioInvalid::new_err(lines.join("\n"))
        }
        _ => ScenarioInvalid::new_err(e.to_string()),
    }
}

#[pyclass(name = "Ellipse", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEllipse(GoalEllipse);

#[pymethods]
impl PyEllipse {
    #[new]
    #[pyo3(signature = (center, semi_major, semi_minor, rotation = 0.0))]
    fn new(center: Xy, semi_major: f64, semi_minor: f64, rotation: f64) -> PyResult<Self> {
        GoalEllipse::new(pt(center), semi_major, semi_minor, rotation)
            .map(Self)
            .map_err(value_err)
    }

    #[getter]
    fn center(&self) -> Xy {
        xy(self.0.center())
    }

    #[getter]
    fn semi_major(&self) -> f64 {
        self.0.semi_major()
    }

    #[getter]
    fn semi_minor(&self) -> f64 {
        self.0.semi_minor()
    }

    #[getter]
    fn rotation(&self) -> f64 {
        self.0.rotation()
    }

    fn contains(&self, p: Xy) -> bool {
        geometry::point_in_ellipse(pt(p), &self.0)
    }

    /// Nearest boundary point and its distance.
    fn closest_point(&self, p: Xy) -> PyResult<(Xy, f64)> {
        geometry::closest_point_on_ellipse(pt(p), &self.0)
            .map(|(c, d)| (xy(c), d))
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        let c = self.0.center();
        format!(
            "Ellipse(center=({}, {}), semi_major={}, semi_minor={}, rotation={})",
            c.x,
            c.y,
            self.0.semi_major(),
            self.0.semi_minor(),
            self.0.rotation()
        )
    }
}

#[pyclass(name = "Scenario", frozen)]
struct PyScenario(wayfind::floorplan::Scenario);

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_scenario(text).map(Self).map_err(scenario_err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let bytes = std::fs::read(&path)?;
        wayfind::floorplan::parse_scenario_bytes(&bytes)
            .map(Self)
            .map_err(scenario_err)
    }

    fn to_json(&self) -> String {
        serialize_scenario(&self.0)
    }

    #[getter]
    fn room_ids(&self) -> Vec<String> {
        self.0.plan.rooms().iter().map(|r| r.id.to_string()).collect()
    }

    #[getter]
    fn door_ids(&self) -> Vec<String> {
        self.0.plan.doors().iter().map(|d| d.id.to_string()).collect()
    }

    #[getter]
    fn agent_ids(&self) -> Vec<String> {
        self.0.agents.iter().map(|a| a.id.clone()).collect()
    }

    /// Room containing `p`, or None outside the building.
    fn room_at(&self, p: Xy) -> Option<String> {
        self.0.plan.locate_room(pt(p)).ok().map(|r| r.to_string())
    }

    fn room_class(&self, room: &str) -> PyResult<String> {
        let c = self
            .0
            .plan
            .class_of(&room.into())
            .ok_or_else(|| PyValueError::new_err(format!("unknown room {room}")))?;
        Ok(serde_json::to_value(c).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
    }

    /// Wall segments of one room, or of the whole plan.
    #[pyo3(signature = (room = None))]
    fn walls(&self, room: Option<&str>) -> PyResult<Vec<(Xy, Xy)>> {
        let ws = match room {
            Some(r) => self.0.plan.walls_of(&r.into()).map_err(value_err)?,
            None => self.0.plan.all_walls(),
        };
        Ok(ws.into_iter().map(|s| (xy(s.a), xy(s.b))).collect())
    }

    fn goal_ellipses(&self, agent_id: &str) -> PyResult<Vec<PyEllipse>> {
        let a = self.agent(Some(agent_id))?;
        Ok(a.goal_ellipses.iter().cloned().map(PyEllipse).collect())
    }

    fn render_svg(&self, run: Option<&PyRunResult>) -> String {
        let goals: Vec<GoalEllipse> = self
            .0
            .agents
            .iter()
            .filter(|a| run.is_none_or(|r| r.0.agent_id == a.id))
            .flat_map(|a| a.goal_ellipses.iter().cloned())
            .collect();
        render_svg(&self.0.plan, &goals, run.map(|r| &r.0))
    }
}

impl PyScenario {
    fn agent(&self, id: Option<&str>) -> PyResult<&wayfind::floorplan::AgentSpec> {
        match id {
            Some(id) => self.0.agents.iter().find(|a| a.id == id),
            None => self.0.agents.first(),
        }
        .ok_or_else(|| PyValueError::new_err(format!("no agent {}", id.unwrap_or("in scenario"))))
    }
}

#[pyclass(name = "RunResult", frozen)]
struct PyRunResult(sim::RunResult);

#[pymethods]
impl PyRunResult {
    #[getter]
    fn agent_id(&self) -> &str {
        &self.0.agent_id
    }

    #[getter]
    fn outcome(&self) -> &'static str {
        self.0.outcome.as_str()
    }

    #[getter]
    fn path_length(&self) -> f64 {
        self.0.path_length
    }

    #[getter]
    fn rooms_visited(&self) -> Vec<String> {
        self.0.rooms_visited.iter().map(|r| r.to_string()).collect()
    }

    #[getter]
    fn backtracks(&self) -> usize {
        self.0.backtracks()
    }

    /// `(t, x, y, room)` per recorded sample.
    #[getter]
    fn samples(&self) -> Vec<(f64, f64, f64, String)> {
        self.0
            .trajectory
            .samples
            .iter()
            .map(|s| (s.t, s.x, s.y, s.room.to_string()))
            .collect()
    }

    /// `(t, kind, detail)` per event.
    #[getter]
    fn events(&self) -> Vec<(f64, String, String)> {
        self.0
            .trajectory
            .events
            .iter()
            .map(|e| {
                let kind = serde_json::to_value(e.kind).ok().and_then(|v| v.as_str().map(String::from));
                (e.t, kind.unwrap_or_default(), e.detail.clone())
            })
            .collect()
    }

    /// Door choices as `(room, door, mode)`.
    #[getter]
    fn decisions(&self) -> Vec<(String, String, String)> {
        self.0
            .decisions
            .iter()
            .map(|d| {
                let mode = serde_json::to_value(d.mode).ok().and_then(|v| v.as_str().map(String::from));
                (d.room.to_string(), d.chosen.to_string(), mode.unwrap_or_default())
            })
            .collect()
    }

    fn summary(&self) -> String {
        self.0.summary_line()
    }

    fn trajectory_csv(&self) -> String {
        self.0.trajectory_csv()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.0).map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("RunResult({})", self.0.summary_line())
    }
}

/// Shortest obstacle-avoiding walk from `start` into the ellipse, as `(length, path)`.
#[pyfunction]
#[pyo3(signature = (start, ellipse, walls_ = Vec::new(), n_samples = 64))]
fn shortest_path_to_ellipse(
    start: Xy,
    ellipse: &PyEllipse,
    walls_: Vec<(Xy, Xy)>,
    n_samples: usize,
) -> PyResult<(f64, Vec<Xy>)> {
    geometry::shortest_path_to_ellipse(pt(start), &ellipse.0, &walls(walls_), n_samples)
        .map(|(len, path)| (len, path.into_iter().map(xy).collect()))
        .map_err(value_err)
}

/// Grid Dijkstra length from `start` into the ellipse.
#[pyfunction]
#[pyo3(signature = (start, ellipse, walls_ = Vec::new(), cell = 0.05))]
fn grid_path_oracle(start: Xy, ellipse: &PyEllipse, walls_: Vec<(Xy, Xy)>, cell: f64) -> PyResult<f64> {
    geometry::grid_path_oracle(pt(start), &ellipse.0, &walls(walls_), cell).map_err(value_err)
}

fn params(dt: f64, step_limit: u64) -> RunParams {
    RunParams { dt, step_limit }
}

/// Runs one agent (the first when `agent_id` is None).
#[pyfunction]
#[pyo3(signature = (scenario, agent_id = None, dt = DEFAULT_DT, step_limit = DEFAULT_STEP_LIMIT, circulation_preference = None))]
fn run(
    py: Python<'_>,
    scenario: &PyScenario,
    agent_id: Option<&str>,
    dt: f64,
    step_limit: u64,
    circulation_preference: Option<bool>,
) -> PyResult<PyRunResult> {
    let mut spec = scenario.agent(agent_id)?.clone();
    if let Some(on) = circulation_preference {
        spec.strategy.use_circulation_preference = on;
    }
    let plan = &scenario.0.plan;
    py.detach(|| sim::run_agent(plan, &spec, &params(dt, step_limit)))
        .map(PyRunResult)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Runs every agent of the scenario in parallel, in file order.
#[pyfunction]
#[pyo3(signature = (scenario, dt = DEFAULT_DT, step_limit = DEFAULT_STEP_LIMIT))]
fn run_all(py: Python<'_>, scenario: &PyScenario, dt: f64, step_limit: u64) -> PyResult<Vec<PyRunResult>> {
    let sc = &scenario.0;
    let jobs: Vec<_> = sc.agents.iter().map(|a| (&sc.plan, a)).collect();
    py.detach(|| sim::run_batch(&jobs, &params(dt, step_limit)))
        .into_iter()
        .map(|r| r.map(PyRunResult).map_err(|e| PyRuntimeError::new_err(e.to_string())))
        .collect()
}

#[pymodule]
#[pyo3(name = "wayfind")]
fn wayfind_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEllipse>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyRunResult>()?;
    m.add("ScenarioInvalid", m.py().get_type::<ScenarioInvalid>())?;
    m.add_function(wrap_pyfunction!(shortest_path_to_ellipse, m)?)?;
    m.add_function(wrap_pyfunction!(grid_path_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(run_all, m)?)?;
    Ok(())
}

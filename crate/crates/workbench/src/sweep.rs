//! Parameter grids evaluated cell by cell on a bounded worker pool.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use lorenz_anticontrol::equilibria::DEFAULT_RESIDUAL_TOL;
use lorenz_anticontrol::sign::DEFAULT_SIGN_TOL;
use lorenz_anticontrol::{
    certificate, classify_origin, find_equilibria, largest_lyapunov_exponent_from, regime_classify,
    CertificateReport, EquilibriumKind, IntegratorSettings, LleConfig, OriginClass, ParamName, RegimeLabel,
    State, SystemParams,
};

use crate::WorkbenchError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: ParamName,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    /// Evenly spaced values; the endpoints are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

impl std::str::FromStr for Axis {
    type Err = WorkbenchError;

    /// `name:start:stop:count`, e.g. `c:0.5:1.5:11`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WorkbenchError::Usage(format!("axis '{s}' must look like name:start:stop:count"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let param = parts[0]
            .parse::<ParamName>()
            .map_err(|e| WorkbenchError::Usage(e.to_string()))?;
        let start = parts[1].parse().map_err(|_| bad())?;
        let stop = parts[2].parse().map_err(|_| bad())?;
        let count = parts[3].parse().map_err(|_| bad())?;
        Ok(Axis { param, start, stop, count })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Equilibria,
    OriginClass,
    Certificate,
    Regime,
    Lle,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Equilibria => "equilibria",
            Task::OriginClass => "origin_class",
            Task::Certificate => "certificate",
            Task::Regime => "regime",
            Task::Lle => "lle",
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        match self {
            Task::Equilibria => &["eq_kind", "eq_count", "eplus_x", "eplus_y", "eplus_z"],
            Task::OriginClass => &["origin_class"],
            Task::Certificate => &["lemma_ok", "conv_ok", "het_ok", "chaos_possible"],
            Task::Regime => &["regime"],
            Task::Lle => &["lle"],
        }
    }
}

impl std::str::FromStr for Task {
    type Err = WorkbenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Task::Equilibria, Task::OriginClass, Task::Certificate, Task::Regime, Task::Lle]
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| WorkbenchError::Usage(format!("unknown task '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub axes: Vec<Axis>,
    pub tasks: Vec<Task>,
    pub seed: u64,
    pub settings: IntegratorSettings,
    pub lle: LleConfig,
    /// Initial state for the exponent task.
    pub u0: State,
}

impl SweepSpec {
    pub fn new(base: SystemParams, axes: Vec<Axis>, tasks: Vec<Task>) -> Self {
        Self {
            base,
            axes,
            tasks,
            seed: 0,
            settings: IntegratorSettings::default(),
            lle: LleConfig::default(),
            u0: State::new(1.0, 1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<(), WorkbenchError> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(WorkbenchError::Usage("a sweep needs one or two axes".into()));
        }
        for axis in &self.axes {
            if axis.count < 2 {
                return Err(WorkbenchError::Usage(format!("axis {} needs at least 2 points", axis.param)));
            }
            if !(axis.start.is_finite() && axis.stop.is_finite()) {
                return Err(WorkbenchError::Usage(format!("axis {} has non-finite bounds", axis.param)));
            }
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(WorkbenchError::Usage("axis parameters must be distinct".into()));
        }
        if self.tasks.is_empty() {
            return Err(WorkbenchError::Usage("a sweep needs at least one task".into()));
        }
        for (i, t) in self.tasks.iter().enumerate() {
            if self.tasks[..i].contains(t) {
                return Err(WorkbenchError::Usage(format!("task {} listed twice", t.name())));
            }
        }
        self.settings
            .validate()
            .map_err(|e| WorkbenchError::Usage(e.to_string()))
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum TaskOutput {
    Equilibria {
        kind: EquilibriumKind,
        count: Option<usize>,
        e_plus: Option<State>,
    },
    OriginClass {
        class: OriginClass,
    },
    Certificate {
        report: CertificateReport,
    },
    Regime {
        label: RegimeLabel,
    },
    Lle {
        lambda1: f64,
    },
    Failed {
        failed: Task,
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub axis_values: Vec<f64>,
    pub params: SystemParams,
    pub outputs: Vec<TaskOutput>,
}

impl SweepRow {
    pub fn errors(&self) -> Vec<String> {
        self.outputs
            .iter()
            .filter_map(|o| match o {
                TaskOutput::Failed { failed, error } => Some(format!("{}:{}", failed.name(), error)),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    pub tasks: Vec<Task>,
    pub rows: Vec<SweepRow>,
}

/// Seed of cell `index`, derived from the sweep seed by a SplitMix64 mix.
pub fn cell_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_unit(rng: &mut ChaCha8Rng) -> State {
    loop {
        let v = State::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return (1.0 / n) * v;
        }
    }
}

fn evaluate_task(spec: &SweepSpec, p: &SystemParams, task: Task, rng: &mut ChaCha8Rng) -> TaskOutput {
    match task {
        Task::Equilibria => match find_equilibria(p, DEFAULT_RESIDUAL_TOL) {
            Ok(set) => TaskOutput::Equilibria {
                kind: set.kind,
                count: set.count(),
                e_plus: set.pair.map(|pair| pair.plus.location),
            },
            Err(e) => TaskOutput::Failed {
                failed: task,
                error: e.kind().to_string(),
            },
        },
        Task::OriginClass => TaskOutput::OriginClass {
            class: classify_origin(p, DEFAULT_SIGN_TOL),
        },
        Task::Certificate => TaskOutput::Certificate {
            report: certificate(p),
        },
        Task::Regime => TaskOutput::Regime {
            label: regime_classify(p),
        },
        Task::Lle => {
            let tangent = random_unit(rng);
            match largest_lyapunov_exponent_from(p, spec.u0, tangent, &spec.settings, &spec.lle) {
                Ok(est) => TaskOutput::Lle { lambda1: est.lambda1 },
                Err(e) => TaskOutput::Failed {
                    failed: task,
                    error: e.kind().to_string(),
                },
            }
        }
    }
}

fn evaluate_cell(spec: &SweepSpec, index: usize, axis_values: Vec<f64>) -> SweepRow {
    let params = spec
        .axes
        .iter()
        .zip(&axis_values)
        .fold(spec.base, |p, (axis, &v)| p.with(axis.param, v));
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(spec.seed, index));
    let outputs = spec
        .tasks
        .iter()
        .map(|&task| evaluate_task(spec, &params, task, &mut rng))
        .collect();
    SweepRow {
        index,
        axis_values,
        params,
        outputs,
    }
}

/// Evaluates every grid cell, row-major in axis declaration order.
///
/// `workers = None` uses the available parallelism. Row order and contents do
/// not depend on the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: Option<usize>) -> Result<SweepResult, WorkbenchError> {
    spec.validate()?;
    let grids: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let cells: Vec<(usize, Vec<f64>)> = match grids.as_slice() {
        [g] => g.iter().map(|&v| vec![v]).enumerate().collect(),
        [g0, g1] => g0
            .iter()
            .flat_map(|&v0| g1.iter().map(move |&v1| vec![v0, v1]))
            .enumerate()
            .collect(),
        _ => unreachable!("validated axis count"),
    };

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(WorkbenchError::Usage("worker count must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| WorkbenchError::Usage(format!("cannot build worker pool: {e}")))?;
    let rows = pool.install(|| {
        cells
            .into_par_iter()
            .map(|(i, values)| evaluate_cell(spec, i, values))
            .collect::<Vec<_>>()
    });
    Ok(SweepResult {
        axes: spec.axes.clone(),
        tasks: spec.tasks.clone(),
        rows,
    })
}

"""Experiment orchestration: configuration, batches of runs, replay and CSV exports.

Config files are TOML::

    [experiment]
    treatment = "tri_error_empowerment"   # or treatments = ["bi_error", ...] / "all"
    runs = 10
    seed = 0
    workers = 1
    out = "out"

    [sim]
    m = 11
    n_steps = 30
    decay = 0.9
    diffusion = 0.5

    [shape]
    name = "square"
    side = 7            # the shape's own parameter; omitted -> scaled default

    [evolution]
    population = 64
    generations = 200
    mutation_rate = 0.1
    mutation_sigma = 0.25

Run ``r`` of a batch uses seed ``seed + r`` and writes under
``<out>/<treatment>/run_<r>/``:

* ``runlog.csv`` / ``gen0.csv``: lowest-loss member per generation (1..G / 0);
* ``champion.json``, ``frames/``, ``champion.heat.csv``: final lowest-loss member;
* ``runlog_empowered.csv``, ``champion_empowered.json``: same, most empowered member;
* ``run.json``: the resolved config plus treatment, run index and run seed.
"""
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ._validation import ConfigError, DataError, check_int, check_weights
from .ca import N_WEIGHTS, Genome, SimParams, develop, write_trace_frames
from .evolution import (
    TREATMENTS,
    EvoParams,
    TraceEvaluator,
    champion,
    check_treatment,
    empowered_champion,
    evolve,
    random_population_genomes,
    read_runlog_rows,
    write_runlog_rows,
)
from .objectives import empowerment_bits, local_empowerment, loss
from .shapes import SHAPE_NAMES, make_shape

logger = logging.getLogger(__name__)

CURVES_HEADER = ("treatment", "generation", "mean_best_loss", "ci_loss", "mean_best_emp_bits",
                 "ci_emp")
SCATTER_HEADER = ("treatment", "run", "final_best_loss", "final_best_emp_bits")
Z_95 = 1.96


@dataclass(frozen=True)
class ExperimentConfig:
    treatments: tuple = ("tri_error_empowerment",)
    shape: str = "square"
    shape_params: dict = field(default_factory=dict)
    m: int = 25
    n_steps: int = 50
    decay: float = 0.9
    diffusion: float = 0.5
    population: int = 400
    generations: int = 2000
    mutation_rate: float = 0.1
    mutation_sigma: float = 0.25
    runs: int = 25
    seed: int = 0
    out: str = "out"
    workers: int = 1

    def __post_init__(self):
        treatments = self.treatments
        if isinstance(treatments, str):
            treatments = TREATMENTS if treatments == "all" else (treatments,)
        treatments = tuple(check_treatment(t) for t in treatments)
        if not treatments:
            raise ConfigError("at least one treatment is required")
        object.__setattr__(self, "treatments", treatments)
        if self.shape not in SHAPE_NAMES:
            raise ConfigError(f"unknown shape {self.shape!r}; expected one of {SHAPE_NAMES}")
        check_int(self.runs, "runs", minimum=1)
        check_int(self.workers, "workers", minimum=1)
        # component validation
        self.sim_params()
        self.evo_params(0)
        self.target()

    def sim_params(self):
        return SimParams(m=self.m, n_steps=self.n_steps, decay=self.decay,
                         diffusion=self.diffusion, allow_even=self.m % 2 == 0)

    def evo_params(self, run):
        return EvoParams(population_size=self.population, generations=self.generations,
                         mutation_rate=self.mutation_rate, mutation_sigma=self.mutation_sigma,
                         seed=self.run_seed(run))

    def run_seed(self, run):
        return check_int(self.seed, "seed", minimum=0) + run

    def target(self):
        return make_shape(self.shape, self.m, **self.shape_params)

    def to_dict(self):
        d = asdict(self)
        d["treatments"] = list(self.treatments)
        return d


_SECTION_KEYS = {
    "experiment": {"treatment": "treatments", "treatments": "treatments", "runs": "runs",
                   "seed": "seed", "workers": "workers", "out": "out"},
    "sim": {"m": "m", "n_steps": "n_steps", "decay": "decay", "diffusion": "diffusion"},
    "evolution": {"population": "population", "generations": "generations",
                  "mutation_rate": "mutation_rate", "mutation_sigma": "mutation_sigma"},
}


def config_from_mapping(data, **overrides):
    kwargs = {}
    for section, keys in _SECTION_KEYS.items():
        values = data.get(section, {})
        unknown = set(values) - set(keys)
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
        for key, value in values.items():
            kwargs[keys[key]] = value
    shape = dict(data.get("shape", {}))
    if "name" in shape:
        kwargs["shape"] = shape.pop("name")
    kwargs["shape_params"] = shape
    unknown = set(data) - set(_SECTION_KEYS) - {"shape"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    if overrides.get("shape") and overrides["shape"] != kwargs.get("shape"):
        kwargs["shape_params"] = {}
    if "m" in overrides and overrides["m"] != kwargs.get("m"):
        # shape extents follow the grid unless pinned again on the command line
        kwargs["shape_params"] = {}
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kwargs)


def load_config(path=None, **overrides):
    data = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return config_from_mapping(data, **overrides)


# -- genome files -----------------------------------------------------------------

def save_genome(path, genome, config, treatment, seed):
    doc = {
        "m": config.m,
        "n_steps": config.n_steps,
        "weights": [float(w) for w in genome.weights],
        "treatment": treatment,
        "seed": seed,
        "decay": config.decay,
        "diffusion": config.diffusion,
        "shape": config.shape,
        "shape_params": dict(config.shape_params),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="ascii")
    return path


def load_genome(path):
    """Return ``(genome, document)`` from a champion JSON file."""
    try:
        doc = json.loads(Path(path).read_text(encoding="ascii"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"{path}: cannot read genome file ({exc})") from None
    if not isinstance(doc, dict) or "weights" not in doc:
        raise DataError(f"{path}: genome file must be an object with a 'weights' list")
    weights = check_weights(doc["weights"], N_WEIGHTS)
    return Genome(weights), doc


# -- evolve ---------------------------------------------------------------------

@dataclass(frozen=True)
class RunArtifacts:
    directory: Path
    runlog: Path
    initial: Path
    champion: Path
    frames: Path
    heatmap: Path
    metadata: Path
    empowered_runlog: Path
    empowered_champion: Path

    def missing(self):
        return [p for p in (self.runlog, self.initial, self.champion, self.frames,
                            self.heatmap, self.metadata, self.empowered_runlog,
                            self.empowered_champion) if not p.exists()]


def run_paths(root, treatment, run):
    d = Path(root) / treatment / f"run_{run}"
    return RunArtifacts(d, d / "runlog.csv", d / "gen0.csv", d / "champion.json",
                        d / "frames", d / "champion.heat.csv", d / "run.json",
                        d / "runlog_empowered.csv", d / "champion_empowered.json")


def execute_run(config, treatment, run, workers=1):
    """Evolve one run and write its artifacts."""
    sim = config.sim_params()
    evo = config.evo_params(run)
    target = config.target()
    evaluator = TraceEvaluator(target, sim, treatment)
    population, log = evolve(treatment, evo, evaluator, workers=workers)
    best = champion(population)

    paths = run_paths(config.out, treatment, run)
    paths.directory.mkdir(parents=True, exist_ok=True)
    log.to_csv(paths.runlog)
    write_runlog_rows(paths.initial, [log.initial])
    save_genome(paths.champion, best.genome, config, treatment, evo.seed)
    write_runlog_rows(paths.empowered_runlog, log.empowered)
    save_genome(paths.empowered_champion, empowered_champion(population).genome, config,
                treatment, evo.seed)
    trace = develop(best.genome, sim)
    write_trace_frames(trace, paths.frames)
    local_empowerment(trace).to_csv(paths.heatmap)
    meta = config.to_dict()
    meta.update(treatment=treatment, run=run, run_seed=evo.seed)
    paths.metadata.write_text(json.dumps(meta, indent=1) + "\n", encoding="ascii")
    logger.info("%s run %d: best loss %.6f", treatment, run, best.evaluation.loss)
    return paths


def _execute_run_job(args):
    return execute_run(*args)


def _check_writable(out):
    out = Path(out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("", encoding="ascii")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from None


def cmd_evolve(config):
    """Run every (treatment, run) pair of ``config``; returns the artifacts in order."""
    _check_writable(config.out)
    jobs = [(config, t, r) for t in config.treatments for r in range(config.runs)]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(config.workers, len(jobs))) as pool:
            return list(pool.map(_execute_run_job, jobs))
    return [execute_run(c, t, r, workers=config.workers) for c, t, r in jobs]


# -- replay ----------------------------------------------------------------------

def replay_config(doc, config_path=None, **overrides):
    """Replay settings: the config file if given, else the genome file's metadata; then overrides."""
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if config_path is not None:
        return load_config(config_path, **overrides)
    base = {"m": doc.get("m", 25), "n_steps": doc.get("n_steps", 50),
            "decay": doc.get("decay", 0.9), "diffusion": doc.get("diffusion", 0.5),
            "shape": doc.get("shape", "square"), "shape_params": doc.get("shape_params", {}),
            "runs": 1, "population": 2, "generations": 1}
    if "shape" in overrides and overrides["shape"] != base["shape"]:
        base["shape_params"] = {}
    if "m" in overrides and overrides["m"] != base["m"]:
        base["shape_params"] = {}
    base.update(overrides)
    try:
        return ExperimentConfig(**base)
    except TypeError as exc:
        raise DataError(f"malformed genome metadata ({exc})") from None


def cmd_replay(genome_file, out, config=None):
    """Develop a saved genome; write frames and heatmap; return (loss, empowerment bits).

    ``config`` defaults to :func:`replay_config` of the genome file.
    """
    genome, doc = load_genome(genome_file)
    if config is None:
        config = replay_config(doc)
    if "m" in doc and doc["m"] != config.m:
        raise ConfigError(f"genome was evolved on m={doc['m']}, replay requested m={config.m}")
    sim = config.sim_params()
    target = config.target()
    trace = develop(genome, sim)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_frames(trace, out / "frames")
    local_empowerment(trace).to_csv(out / f"{Path(genome_file).stem}.heat.csv")
    return loss(trace, target, 0, sim.n_steps), empowerment_bits(trace)


# -- curves / scatter ----------------------------------------------------------

def find_runs(directories):
    """Run directories (holding ``runlog.csv``) under each given path, sorted."""
    found = []
    for d in directories:
        d = Path(d)
        if (d / "runlog.csv").exists():
            found.append(d)
        else:
            found.extend(sorted(p.parent for p in d.rglob("runlog.csv")))
    if not found:
        raise DataError(f"no runlog.csv found under {[str(d) for d in directories]}")
    return sorted(set(found))


def _run_metadata(run_dir):
    for name in ("run.json", "champion.json"):
        p = run_dir / name
        if p.exists():
            return json.loads(p.read_text(encoding="ascii"))
    return {"treatment": run_dir.parent.name}


def mean_ci(values):
    """Mean and normal-approximation 95% half-width; half-width 0 for one sample."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), Z_95 * float(values.std(ddof=1)) / math.sqrt(values.size)


def _write_csv(path, header, rows):
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _fmt(v):
    return v if isinstance(v, (int, str)) else repr(float(v))


def cmd_curves(directories, output):
    groups = {}
    for run_dir in find_runs(directories):
        treatment = _run_metadata(run_dir)["treatment"]
        groups.setdefault(treatment, []).append((run_dir, read_runlog_rows(run_dir / "runlog.csv")))
    rows = []
    for treatment in sorted(groups, key=lambda t: (TREATMENTS + (t,)).index(t)):
        runs = groups[treatment]
        lengths = {len(r) for _, r in runs}
        if len(lengths) > 1:
            detail = ", ".join(f"{d} ({len(r)} rows)" for d, r in runs)
            raise DataError(f"ragged generation counts for {treatment}: {detail}")
        for g in range(lengths.pop()):
            gens = {r[g][0] for _, r in runs}
            if len(gens) > 1:
                raise DataError(f"runs disagree on generation numbering at row {g}")
            ml, cl = mean_ci([r[g][1] for _, r in runs])
            me, ce = mean_ci([r[g][2] for _, r in runs])
            rows.append((treatment, gens.pop(), ml, cl, me, ce))
    _write_csv(output, CURVES_HEADER, [[_fmt(v) for v in row] for row in rows])
    return rows


def random_champion(meta):
    """Lowest-loss member of the generation-zero population a run starts from."""
    config = ExperimentConfig(
        m=meta["m"], n_steps=meta["n_steps"], decay=meta["decay"], diffusion=meta["diffusion"],
        shape=meta["shape"], shape_params=meta.get("shape_params", {}),
        population=meta["population"], runs=1, generations=1)
    evaluator = TraceEvaluator(config.target(), config.sim_params(), "bi_error")
    genomes = random_population_genomes(replace(config.evo_params(0), seed=meta["run_seed"]))
    evaluations = [evaluator(g) for g in genomes]
    best = min(range(len(genomes)), key=lambda i: evaluations[i].loss)
    return evaluations[best].loss, evaluations[best].empowerment_bits


def cmd_scatter(directories, output):
    rows = []
    baselines = {}
    for run_dir in find_runs(directories):
        if not (run_dir / "champion.json").exists():
            raise DataError(f"{run_dir}: missing champion.json")
        meta = _run_metadata(run_dir)
        last = read_runlog_rows(run_dir / "runlog.csv")[-1]
        rows.append((meta["treatment"], meta.get("run", 0), last[1], last[2]))
        if "run_seed" in meta:
            key = json.dumps({k: meta[k] for k in ("m", "n_steps", "decay", "diffusion", "shape",
                                                   "shape_params", "population", "run_seed")},
                             sort_keys=True)
            baselines.setdefault(key, (meta.get("run", 0), meta))
    rows.sort(key=lambda r: ((TREATMENTS + (r[0],)).index(r[0]), r[1]))
    for run, meta in sorted(baselines.values(), key=lambda x: (x[0], x[1]["run_seed"])):
        rows.append(("random", run, *random_champion(meta)))
    _write_csv(output, SCATTER_HEADER, [[_fmt(v) for v in row] for row in rows])
    return rows


def render_shape(name, m, out, **params):
    shape = make_shape(name, m, **params)
    shape.to_pgm(out)
    return shape


def default_workers():
    return max(1, os.cpu_count() or 1)

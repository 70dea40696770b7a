"""Age-Fitness Pareto Optimization over NCA genomes.

One generation:

1. every survivor ages by one;
2. ``P - 1`` children are made by mutating uniformly chosen parents (a child
   inherits its parent's age);
3. one fresh random individual of age 0 is injected;
4. the ``P - 1 + 1`` newcomers are evaluated;
5. the ``2P`` candidates are culled back to ``P`` by non-dominated sorting on
   ``(age, *objectives)``, keeping whole fronts and breaking the boundary
   front uniformly at random.

Randomness comes from ``numpy.random.SeedSequence(seed, spawn_key=...)``
streams addressed by (purpose, generation, candidate), so results do not
depend on how evaluations are scheduled across workers.
"""
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import ConfigError, EvaluationError, check_int, check_real
from .ca import N_WEIGHTS, Genome, develop
from .objectives import empowerment, loss

logger = logging.getLogger(__name__)

TREATMENTS = ("bi_error", "tri_error_empowerment", "tri_error", "bi_empowerment")
OBJECTIVE_NAMES = {
    "bi_error": ("loss",),
    "tri_error_empowerment": ("loss", "empowerment"),
    "tri_error": ("loss_first_half", "loss_second_half"),
    "bi_empowerment": ("empowerment",),
}
RUNLOG_HEADER = ("generation", "best_loss", "best_empowerment_bits", "mean_loss",
                 "mean_empowerment_bits")

_INIT, _GENERATION, _CULL = 0, 1, 2


def check_treatment(name):
    if name not in TREATMENTS:
        raise ConfigError(f"unknown treatment {name!r}; expected one of {TREATMENTS}")
    return name


@dataclass(frozen=True)
class EvoParams:
    population_size: int = 400
    generations: int = 2000
    mutation_rate: float = 0.1
    mutation_sigma: float = 0.25
    seed: int = 0

    def __post_init__(self):
        check_int(self.population_size, "population_size", minimum=2)
        check_int(self.generations, "generations", minimum=1)
        check_real(self.mutation_rate, "mutation_rate", low=0.0, high=1.0, low_open=True)
        check_real(self.mutation_sigma, "mutation_sigma", low=0.0, low_open=True)
        check_int(self.seed, "seed", minimum=0, maximum=2**64 - 1)


@dataclass(frozen=True)
class Evaluation:
    """Selection objectives plus the two quantities every run logs."""
    objectives: tuple
    loss: float
    empowerment_bits: float


@dataclass(frozen=True)
class Individual:
    genome: Genome
    age: int
    evaluation: Evaluation
    treatment: str

    @property
    def objectives(self):
        return self.evaluation.objectives

    @property
    def fitness_vector(self):
        return (self.age, *self.evaluation.objectives)

    def aged(self):
        return Individual(self.genome, self.age + 1, self.evaluation, self.treatment)


class TraceEvaluator:
    """Develops a genome and scores it under a treatment. Picklable for worker pools."""

    def __init__(self, target, sim_params, treatment):
        self.target = target
        self.sim_params = sim_params
        self.treatment = check_treatment(treatment)
        if target.m != sim_params.m:
            raise ConfigError(f"target grid {target.m} does not match m={sim_params.m}")

    def __call__(self, genome):
        trace = develop(genome, self.sim_params)
        n = trace.n_steps
        full = loss(trace, self.target, 0, n)
        emp = empowerment(trace)
        if self.treatment == "bi_error":
            objectives = (full,)
        elif self.treatment == "tri_error_empowerment":
            objectives = (full, emp)
        elif self.treatment == "tri_error":
            objectives = (loss(trace, self.target, 0, n // 2), loss(trace, self.target, n // 2, n))
        else:
            objectives = (emp,)
        return Evaluation(objectives, full, -emp)


def dominates(x, y):
    """Pareto dominance on ``(age, *objectives)``, everything minimized."""
    if x.treatment != y.treatment:
        raise ValueError(f"cannot compare individuals from {x.treatment!r} and {y.treatment!r}")
    fx, fy = x.fitness_vector, y.fitness_vector
    return all(a <= b for a, b in zip(fx, fy)) and any(a < b for a, b in zip(fx, fy))


def nondominated_fronts(points):
    """Indices grouped into successive Pareto fronts (front 0 first), each sorted."""
    f = np.asarray(points, dtype=np.float64)
    n = f.shape[0]
    le = (f[:, None, :] <= f[None, :, :]).all(axis=2)
    lt = (f[:, None, :] < f[None, :, :]).any(axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    counts = dom.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    fronts = []
    while remaining.any():
        front = np.flatnonzero(remaining & (counts == 0))
        fronts.append(front)
        remaining[front] = False
        counts = counts - dom[front].sum(axis=0)
    return fronts


def cull(candidates, size, rng):
    """Keep ``size`` candidates by whole fronts; random subset of the boundary front."""
    fronts = nondominated_fronts([c.fitness_vector for c in candidates])
    keep = []
    for front in fronts:
        room = size - len(keep)
        if room <= 0:
            break
        if len(front) <= room:
            keep.extend(front.tolist())
        else:
            keep.extend(sorted(rng.choice(front, size=room, replace=False).tolist()))
    return [candidates[i] for i in sorted(keep)]


def mutate(parent, rng, rate=0.1, sigma=0.25):
    """Gaussian perturbation of each weight with probability ``rate``; never a no-op."""
    w = parent.weights
    while True:
        mask = rng.random(N_WEIGHTS) < rate
        if not mask.any():
            continue
        child = w.copy()
        child[mask] += rng.normal(0.0, sigma, size=int(mask.sum()))
        if not np.array_equal(child, w):
            return Genome(child)


def _stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def random_population_genomes(params):
    """The ``P`` generation-zero genomes for ``params.seed``."""
    rng = _stream(params.seed, _INIT)
    return [Genome.random(rng) for _ in range(params.population_size)]


class _Evaluator:
    """Maps an evaluator over genomes, serially or through a process pool."""

    def __init__(self, evaluator, workers=1):
        self.evaluator = evaluator
        self.workers = check_int(workers, "workers", minimum=1)
        self._pool = None

    def __enter__(self):
        if self.workers > 1:
            self._pool = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __call__(self, genomes):
        try:
            if self._pool is None:
                results = [self.evaluator(g) for g in genomes]
            else:
                chunk = max(1, len(genomes) // (4 * self.workers))
                results = list(self._pool.map(self.evaluator, genomes, chunksize=chunk))
        except Exception as exc:
            raise EvaluationError(f"candidate evaluation failed: {exc!r}") from exc
        for i, r in enumerate(results):
            if not isinstance(r, Evaluation):
                raise EvaluationError(f"evaluator returned {type(r).__name__} for candidate {i}")
        return results


def initial_population(treatment, params, evaluate):
    genomes = random_population_genomes(params)
    return [Individual(g, 0, e, treatment) for g, e in zip(genomes, evaluate(genomes))]


def breed(survivors, params, generation):
    """Genomes and inherited ages of the ``P - 1`` mutants plus one fresh age-0 immigrant."""
    size = len(survivors)
    genomes, ages = [], []
    for k in range(size - 1):
        rng = _stream(params.seed, _GENERATION, generation, k)
        parent = survivors[int(rng.integers(size))]
        genomes.append(mutate(parent.genome, rng, params.mutation_rate, params.mutation_sigma))
        ages.append(parent.age)
    genomes.append(Genome.random(_stream(params.seed, _GENERATION, generation, size - 1)))
    ages.append(0)
    return genomes, ages


def generation_step(population, treatment, params, evaluate, generation):
    """Advance one AFPO generation; ``evaluate`` maps a list of genomes to evaluations."""
    size = params.population_size
    if len(population) != size:
        raise ConfigError(f"population has {len(population)} members, expected {size}")
    survivors = [ind.aged() for ind in population]
    genomes, ages = breed(survivors, params, generation)
    evaluations = evaluate(genomes)
    newcomers = [Individual(g, a, e, treatment) for g, a, e in zip(genomes, ages, evaluations)]
    return cull(survivors + newcomers, size, _stream(params.seed, _CULL, generation))


@dataclass
class RunLog:
    """Per-generation population summary.

    ``rows`` holds one entry per generation ``1..G`` (state after that
    generation's culling) describing the lowest-loss member; ``initial``
    summarizes the generation-zero population in the same format.
    ``empowered`` has the same layout but describes the most empowered
    member, so both champions are on record for every treatment.
    """
    rows: list = field(default_factory=list)
    initial: tuple = None
    empowered: list = field(default_factory=list)

    @staticmethod
    def summarize(generation, population, by="loss"):
        losses = np.array([ind.evaluation.loss for ind in population])
        emps = np.array([ind.evaluation.empowerment_bits for ind in population])
        if by == "loss":
            best = int(np.argmin(losses))
        elif by == "empowerment":
            best = int(np.argmax(emps))
        else:
            raise ValueError(f"unknown champion criterion {by!r}")
        return (generation, float(losses[best]), float(emps[best]),
                float(losses.mean()), float(emps.mean()))

    def to_csv(self, path, include_initial=False):
        rows = ([self.initial] if include_initial else []) + self.rows
        write_runlog_rows(path, rows)
        return path

    @classmethod
    def from_csv(cls, path):
        return cls(rows=read_runlog_rows(path))

    def column(self, name):
        idx = RUNLOG_HEADER.index(name)
        return np.array([row[idx] for row in self.rows])


def write_runlog_rows(path, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUNLOG_HEADER)
        for row in rows:
            writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])


def read_runlog_rows(path):
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != RUNLOG_HEADER:
            raise ValueError(f"{path}: unexpected RunLog header {header}")
        return [(int(r[0]), *map(float, r[1:])) for r in reader]


def champion(population):
    """Lowest full-window loss; ties go to the earliest member."""
    return min(population, key=lambda ind: ind.evaluation.loss)


def empowered_champion(population):
    """Highest empowerment; ties go to the earliest member."""
    return max(population, key=lambda ind: ind.evaluation.empowerment_bits)


def evolve(treatment, params, evaluator, workers=1, callback=None):
    """Run AFPO for ``params.generations`` generations.

    ``evaluator`` is any callable ``Genome -> Evaluation``; it must be
    picklable when ``workers > 1``.  Returns the final population and its
    :class:`RunLog`.
    """
    check_treatment(treatment)
    log = RunLog()
    with _Evaluator(evaluator, workers) as evaluate:
        population = initial_population(treatment, params, evaluate)
        log.initial = RunLog.summarize(0, population)
        for g in range(1, params.generations + 1):
            population = generation_step(population, treatment, params, evaluate, g)
            log.rows.append(RunLog.summarize(g, population))
            log.empowered.append(RunLog.summarize(g, population, by="empowerment"))
            if callback is not None:
                callback(g, population)
            logger.debug("generation %d best loss %.6f", g, log.rows[-1][1])
    return population, log

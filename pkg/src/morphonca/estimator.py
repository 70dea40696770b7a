"""scikit-learn style front ends.

``NCAEvolver`` fits an AFPO population to a binary target grid and exposes
the champion; ``GenomeScorer`` is a transformer from genome matrices to
objective columns, handy for baselines and post-hoc analysis.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_binary_grid, check_int
from .ca import N_WEIGHTS, Genome, SimParams, develop
from .evolution import EvoParams, TraceEvaluator, champion, check_treatment, evolve
from .objectives import empowerment_bits, local_empowerment, loss
from .shapes import TargetShape

SCORE_COLUMNS = ("loss", "loss_first_half", "loss_second_half", "empowerment_bits")


def _check_target(X):
    if isinstance(X, TargetShape):
        return X
    return TargetShape("custom", check_binary_grid(check_array(X, dtype=None), "target"))


def _sim_params(est, m):
    return SimParams(m=m, n_steps=est.n_steps, decay=est.decay, diffusion=est.diffusion,
                     allow_even=m % 2 == 0)


class GenomeScorer(TransformerMixin, BaseEstimator):
    """Develop each genome row and report its objective values.

    ``fit`` takes the target grid; ``transform`` maps an ``(n, 50)`` weight
    matrix to an ``(n, 4)`` matrix with columns :data:`SCORE_COLUMNS`.
    """

    def __init__(self, n_steps=50, decay=0.9, diffusion=0.5):
        self.n_steps = n_steps
        self.decay = decay
        self.diffusion = diffusion

    def fit(self, X, y=None):
        self.target_ = _check_target(X)
        self.sim_params_ = _sim_params(self, self.target_.m)
        return self

    def transform(self, X):
        check_is_fitted(self, "target_")
        W = check_array(X, dtype=np.float64, ensure_min_samples=1)
        if W.shape[1] != N_WEIGHTS:
            raise ValueError(f"expected {N_WEIGHTS} weights per row, got {W.shape[1]}")
        n = self.sim_params_.n_steps
        out = np.empty((W.shape[0], len(SCORE_COLUMNS)))
        for r, w in enumerate(W):
            trace = develop(Genome(w), self.sim_params_)
            out[r] = (loss(trace, self.target_, 0, n),
                      loss(trace, self.target_, 0, n // 2),
                      loss(trace, self.target_, n // 2, n),
                      empowerment_bits(trace))
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(SCORE_COLUMNS, dtype=object)


class NCAEvolver(BaseEstimator):
    """Evolve NCA genomes toward a binary target grid under one AFPO treatment.

    Fitted attributes: ``target_``, ``sim_params_``, ``evo_params_``,
    ``population_``, ``run_log_``, ``champion_`` (lowest full-window loss in
    the final population).
    """

    def __init__(self, treatment="tri_error_empowerment", population_size=400,
                 generations=2000, mutation_rate=0.1, mutation_sigma=0.25,
                 n_steps=50, decay=0.9, diffusion=0.5, random_state=0, n_jobs=1):
        self.treatment = treatment
        self.population_size = population_size
        self.generations = generations
        self.mutation_rate = mutation_rate
        self.mutation_sigma = mutation_sigma
        self.n_steps = n_steps
        self.decay = decay
        self.diffusion = diffusion
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        check_treatment(self.treatment)
        self.target_ = _check_target(X)
        self.sim_params_ = _sim_params(self, self.target_.m)
        self.evo_params_ = EvoParams(
            population_size=self.population_size,
            generations=self.generations,
            mutation_rate=self.mutation_rate,
            mutation_sigma=self.mutation_sigma,
            seed=check_int(self.random_state, "random_state", minimum=0),
        )
        evaluator = TraceEvaluator(self.target_, self.sim_params_, self.treatment)
        self.population_, self.run_log_ = evolve(self.treatment, self.evo_params_, evaluator,
                                                 workers=self.n_jobs)
        self.champion_ = champion(self.population_)
        return self

    def champion_trace(self):
        check_is_fitted(self, "champion_")
        return develop(self.champion_.genome, self.sim_params_)

    def predict(self, X=None):
        """Final alive grid grown by the champion genome."""
        return self.champion_trace().alive[-1].copy()

    def local_empowerment(self):
        return local_empowerment(self.champion_trace()).values

    def score(self, X, y=None):
        """Negative full-window loss of the champion against target ``X``."""
        target = _check_target(X)
        trace = self.champion_trace()
        return -loss(trace, target, 0, trace.n_steps)

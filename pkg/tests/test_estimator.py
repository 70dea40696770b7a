import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from morphonca.ca import Genome, SimParams, develop
from morphonca.estimator import SCORE_COLUMNS, GenomeScorer, NCAEvolver
from morphonca.objectives import empowerment_bits, loss
from morphonca.shapes import make_square


def test_params_roundtrip():
    est = NCAEvolver(treatment="bi_error", population_size=8)
    assert est.get_params()["population_size"] == 8
    est.set_params(generations=3)
    assert clone(est).get_params()["generations"] == 3


def test_scorer_matches_direct_objectives(rng):
    target = make_square(11, 7)
    W = rng.uniform(-1, 1, (3, 50))
    W[0] = 0.0
    scores = GenomeScorer(n_steps=30).fit(target).transform(W)
    assert scores.shape == (3, len(SCORE_COLUMNS))
    for w, row in zip(W, scores):
        trace = develop(Genome(w), SimParams(m=11, n_steps=30))
        assert row[0] == loss(trace, target, 0, 30)
        assert row[3] == empowerment_bits(trace)
        assert (row[1] + row[2]) / 2 == pytest.approx(row[0], abs=1e-12)


def test_scorer_accepts_plain_array():
    cells = make_square(11, 7).cells
    out = GenomeScorer(n_steps=10).fit(np.asarray(cells)).transform(np.zeros((1, 50)))
    assert out.shape == (1, 4)


def test_scorer_rejects_wrong_width():
    with pytest.raises(ValueError):
        GenomeScorer(n_steps=10).fit(make_square(11, 7)).transform(np.zeros((2, 49)))


def test_not_fitted():
    with pytest.raises(NotFittedError):
        GenomeScorer().transform(np.zeros((1, 50)))
    with pytest.raises(NotFittedError):
        NCAEvolver().predict()


def test_evolver_fit_predict():
    target = make_square(11, 7)
    est = NCAEvolver(treatment="tri_error_empowerment", population_size=6, generations=3,
                     n_steps=10, random_state=2).fit(target)
    assert len(est.population_) == 6 and len(est.run_log_.rows) == 3
    grown = est.predict()
    assert grown.shape == (11, 11) and set(np.unique(grown)) <= {0, 1}
    assert est.score(target) == pytest.approx(-est.champion_.evaluation.loss, abs=1e-12)
    assert est.local_empowerment().shape == (11, 11)

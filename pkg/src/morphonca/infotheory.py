"""Plug-in (maximum-likelihood) discrete entropy and mutual information, in bits."""
import numpy as np

from ._validation import DataError, EstimatorError


class JointHistogram:
    """Co-occurrence counts of paired symbols ``(a, s)`` from a ``k``-letter alphabet.

    Rows index the first symbol (actions), columns the second (sensors).
    """

    def __init__(self, k=256, counts=None):
        if counts is None:
            counts = np.zeros((k, k), dtype=np.int64)
        counts = np.asarray(counts)
        if counts.shape != (k, k):
            raise DataError(f"counts must have shape ({k}, {k}), got {counts.shape}")
        if counts.size and counts.min() < 0:
            raise DataError("counts must be nonnegative")
        self.k = k
        self.counts = counts.astype(np.int64)

    @classmethod
    def from_pairs(cls, a, s, k=256):
        return cls(k).accumulate(a, s)

    @property
    def total(self):
        return int(self.counts.sum())

    @property
    def row_marginal(self):
        return self.counts.sum(axis=1)

    @property
    def col_marginal(self):
        return self.counts.sum(axis=0)

    def accumulate(self, a, s=None):
        """Add pairs in place and return ``self``.

        Accepts either two equal-length symbol arrays, or a single sequence of
        ``(a, s)`` pairs.
        """
        if s is None:
            pairs = np.asarray(a, dtype=np.int64).reshape(-1, 2)
            a, s = pairs[:, 0], pairs[:, 1]
        a = np.asarray(a, dtype=np.int64).ravel()
        s = np.asarray(s, dtype=np.int64).ravel()
        if a.shape != s.shape:
            raise DataError(f"paired arrays differ in length: {a.size} vs {s.size}")
        if a.size == 0:
            return self
        lo = min(a.min(), s.min())
        hi = max(a.max(), s.max())
        if lo < 0 or hi >= self.k:
            raise DataError(f"symbol out of alphabet [0, {self.k}): saw {lo if lo < 0 else hi}")
        self.counts += np.bincount(a * self.k + s, minlength=self.k * self.k).reshape(self.k, self.k)
        return self

    def merge(self, other):
        if other.k != self.k:
            raise DataError(f"cannot merge alphabets of size {self.k} and {other.k}")
        return JointHistogram(self.k, self.counts + other.counts)

    def transpose(self):
        return JointHistogram(self.k, self.counts.T.copy())

    def copy(self):
        return JointHistogram(self.k, self.counts.copy())

    def _require_counts(self):
        total = self.total
        if total < 1:
            raise EstimatorError("histogram is empty")
        return total

    def mutual_information(self):
        return mutual_information(self)

    def pointwise_mi_table(self):
        """``log2 p(a,s) / (p(a) p(s))`` for every cell; ``-inf`` where unobserved."""
        total = self._require_counts()
        ra = self.row_marginal.astype(np.float64)
        cs = self.col_marginal.astype(np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            table = np.log2(self.counts * float(total) / np.outer(ra, cs))
        table[self.counts == 0] = -np.inf
        return table


def accumulate(hist, pairs):
    """Return a new histogram holding ``hist`` plus ``pairs``."""
    return hist.copy().accumulate(pairs)


def entropy(counts):
    """Shannon entropy in bits of a vector of symbol counts."""
    counts = np.asarray(counts, dtype=np.float64).ravel()
    total = counts.sum()
    if total <= 0:
        raise EstimatorError("cannot take the entropy of an empty distribution")
    p = counts[counts > 0] / total
    return max(0.0, float(-(p * np.log2(p)).sum()))


def mutual_information(hist):
    """I(A; S) in bits from joint counts, skipping unobserved cells; floored at 0."""
    total = hist._require_counts()
    rows, cols = np.nonzero(hist.counts)
    joint = hist.counts[rows, cols].astype(np.float64)
    ra = hist.row_marginal[rows].astype(np.float64)
    cs = hist.col_marginal[cols].astype(np.float64)
    mi = float((joint / total * np.log2(joint * total / (ra * cs))).sum())
    return max(mi, 0.0)


def pointwise_mi(hist, a, s):
    """Local term ``log2 p(a,s) / (p(a) p(s))``; ``-inf`` for an unobserved pair."""
    total = hist._require_counts()
    if not (0 <= a < hist.k and 0 <= s < hist.k):
        raise DataError(f"symbol out of alphabet [0, {hist.k})")
    pa = hist.counts[a, :].sum()
    ps = hist.counts[:, s].sum()
    if pa == 0 or ps == 0:
        raise EstimatorError(f"marginal probability of ({a}, {s}) is zero")
    joint = hist.counts[a, s]
    if joint == 0:
        return -np.inf
    return float(np.log2(joint * total / (pa * ps)))

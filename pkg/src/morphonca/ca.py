"""Two-channel neural cellular automaton and its development simulation.

Each cell carries an alive bit and an 8-bit signal.  A cell that is alive at
the start of a time step runs a single-layer network over its Von Neumann
neighborhood (N, E, S, W):

    inputs  = [sig_N, sig_E, sig_S, sig_W] / 255, alive_N, alive_E, alive_S,
              alive_W, alive_self, 1.0
    outputs = tanh(inputs @ W),  W of shape (10, 5)

Outputs 0-3 write the alive bit of the N/E/S/W neighbor (``> 0`` means alive)
and output 4 becomes the cell's own signal, ``round(255 * (out + 1) / 2)``.
Cells are visited in raster order on a single working copy, so later cells
see earlier writes.  After the pass every live cell's signal is decayed and
mixed with its neighbor mean in one simultaneous diffusion sub-step; dead
cells are silenced.
"""
import math
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

from ._validation import (
    ConfigError,
    DataError,
    check_grid_dim,
    check_int,
    check_real,
    check_weights,
)

N_INPUTS = 10
N_OUTPUTS = 5
N_WEIGHTS = N_INPUTS * N_OUTPUTS

# row/col offsets in the order N, E, S, W
NEIGHBOR_OFFSETS = ((-1, 0), (0, 1), (1, 0), (0, -1))


@dataclass(frozen=True)
class CaState:
    alive: np.ndarray
    signal: np.ndarray

    def __post_init__(self):
        alive = np.asarray(self.alive)
        signal = np.asarray(self.signal)
        if alive.ndim != 2 or alive.shape[0] != alive.shape[1] or signal.shape != alive.shape:
            raise DataError(f"alive/signal must be matching square grids, got "
                            f"{alive.shape} and {signal.shape}")
        if not np.isin(alive, (0, 1)).all():
            raise DataError("alive values must be 0 or 1")
        if signal.min(initial=0) < 0 or signal.max(initial=0) > 255:
            raise DataError("signal values must lie in [0, 255]")
        if (signal[alive == 0] != 0).any():
            raise DataError("dead cells must carry signal 0")
        object.__setattr__(self, "alive", alive.astype(np.uint8))
        object.__setattr__(self, "signal", signal.astype(np.uint8))

    @property
    def m(self):
        return self.alive.shape[0]

    @property
    def n_alive(self):
        return int(self.alive.sum())


@dataclass(frozen=True)
class Genome:
    weights: np.ndarray

    def __post_init__(self):
        w = check_weights(self.weights, N_WEIGHTS)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def zeros(cls):
        return cls(np.zeros(N_WEIGHTS))

    @classmethod
    def random(cls, rng, low=-1.0, high=1.0):
        return cls(rng.uniform(low, high, size=N_WEIGHTS))

    @property
    def matrix(self):
        """Weights as a (10 inputs, 5 outputs) matrix."""
        return self.weights.reshape(N_INPUTS, N_OUTPUTS)

    def __eq__(self, other):
        if not isinstance(other, Genome):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())


@dataclass(frozen=True)
class SimParams:
    m: int = 25
    n_steps: int = 50
    decay: float = 0.9
    diffusion: float = 0.5
    allow_even: bool = False

    def __post_init__(self):
        check_grid_dim(self.m, allow_even=self.allow_even)
        n = check_int(self.n_steps, "n_steps", minimum=2)
        if n % 2:
            raise ConfigError(f"n_steps must be even (the empowerment split needs N/2), got {n}")
        check_real(self.decay, "decay", low=0.0, high=1.0, low_open=True)
        check_real(self.diffusion, "diffusion", low=0.0, high=1.0)


def grid_center(m):
    """Center cell; for even ``m`` the lower-right of the four central cells."""
    return m // 2, m // 2


def seed_state(m, *, allow_even=False):
    m = check_grid_dim(m, allow_even=allow_even)
    alive = np.zeros((m, m), dtype=np.uint8)
    alive[grid_center(m)] = 1
    return CaState(alive, np.zeros((m, m), dtype=np.uint8))


@numba.njit(cache=True)
def _round_half_up(x):
    # inputs are never negative here, so this is round-half-away-from-zero
    return np.floor(x + 0.5)


@numba.njit(cache=True)
def _step_kernel(alive, signal, w, decay, diffusion, out_alive, out_signal, actions, sensors,
                 x, pre):
    m = alive.shape[0]
    for i in range(m):
        for j in range(m):
            out_alive[i, j] = alive[i, j]
            out_signal[i, j] = signal[i, j]
            actions[i, j] = signal[i, j]

    for i in range(m):
        for j in range(m):
            # snapshot rule: only cells alive at entry and not killed since run
            if alive[i, j] == 0 or out_alive[i, j] == 0:
                continue
            for d in range(4):
                if d == 0:
                    ni, nj = i - 1, j
                elif d == 1:
                    ni, nj = i, j + 1
                elif d == 2:
                    ni, nj = i + 1, j
                else:
                    ni, nj = i, j - 1
                if 0 <= ni < m and 0 <= nj < m:
                    x[d] = out_signal[ni, nj] / 255.0
                    x[4 + d] = out_alive[ni, nj]
                else:
                    x[d] = 0.0
                    x[4 + d] = 0.0
            x[8] = out_alive[i, j]
            x[9] = 1.0
            for k in range(4):
                acc = 0.0
                for q in range(N_INPUTS):
                    acc += x[q] * w[q, k]
                if k == 0:
                    ni, nj = i - 1, j
                elif k == 1:
                    ni, nj = i, j + 1
                elif k == 2:
                    ni, nj = i + 1, j
                else:
                    ni, nj = i, j - 1
                if 0 <= ni < m and 0 <= nj < m:
                    out_alive[ni, nj] = 1 if math.tanh(acc) > 0.0 else 0
            acc = 0.0
            for q in range(N_INPUTS):
                acc += x[q] * w[q, 4]
            s = _round_half_up(255.0 * (math.tanh(acc) + 1.0) / 2.0)
            s = min(max(s, 0.0), 255.0)
            out_signal[i, j] = np.uint8(s)
            actions[i, j] = np.uint8(s)

    # diffusion: silence the dead, then one simultaneous convex-combination pass
    for i in range(m):
        for j in range(m):
            pre[i, j] = out_signal[i, j] if out_alive[i, j] else 0.0
    for i in range(m):
        for j in range(m):
            if out_alive[i, j] == 0:
                out_signal[i, j] = 0
                continue
            total = 0.0
            count = 0
            if i > 0:
                total += pre[i - 1, j]
                count += 1
            if j < m - 1:
                total += pre[i, j + 1]
                count += 1
            if i < m - 1:
                total += pre[i + 1, j]
                count += 1
            if j > 0:
                total += pre[i, j - 1]
                count += 1
            v = decay * ((1.0 - diffusion) * pre[i, j] + diffusion * (total / count))
            v = min(max(_round_half_up(v), 0.0), 255.0)
            out_signal[i, j] = np.uint8(v)

    for i in range(m):
        for j in range(m):
            total = 0
            count = 0
            if i > 0:
                total += out_signal[i - 1, j]
                count += 1
            if j < m - 1:
                total += out_signal[i, j + 1]
                count += 1
            if i < m - 1:
                total += out_signal[i + 1, j]
                count += 1
            if j > 0:
                total += out_signal[i, j - 1]
                count += 1
            # exact integer round-half-up of total / count
            sensors[i, j] = (2 * total + count) // (2 * count)


@numba.njit(cache=True)
def _develop_kernel(w, decay, diffusion, alive, signal, actions, sensors):
    m = alive.shape[1]
    x = np.empty(N_INPUTS)
    pre = np.empty((m, m))
    for n in range(actions.shape[0]):
        _step_kernel(alive[n], signal[n], w, decay, diffusion,
                     alive[n + 1], signal[n + 1], actions[n], sensors[n], x, pre)


def step(state, genome, params, step_index=0):
    """Advance ``state`` by one time step.

    Returns the next :class:`CaState` and the ``(m, m)`` action and sensor
    frames recorded for this step.  ``step_index`` is accepted for callers
    that track time; the rule itself is time-invariant.
    """
    m = state.m
    if m != params.m:
        raise ConfigError(f"state grid {m} does not match params.m={params.m}")
    out_alive = np.empty((m, m), dtype=np.uint8)
    out_signal = np.empty((m, m), dtype=np.uint8)
    actions = np.empty((m, m), dtype=np.uint8)
    sensors = np.empty((m, m), dtype=np.uint8)
    _step_kernel(state.alive, state.signal, np.ascontiguousarray(genome.matrix),
                 float(params.decay), float(params.diffusion),
                 out_alive, out_signal, actions, sensors,
                 np.empty(N_INPUTS), np.empty((m, m)))
    return CaState(out_alive, out_signal), actions, sensors


@dataclass(frozen=True)
class DevelopmentTrace:
    """Full record of one development run.

    ``alive`` and ``signal`` have shape ``(N + 1, m, m)`` with index 0 the seed;
    ``actions`` and ``sensors`` have shape ``(N, m, m)`` where frame ``n`` was
    produced by the step from state ``n`` to state ``n + 1``.
    """
    alive: np.ndarray
    signal: np.ndarray
    actions: np.ndarray
    sensors: np.ndarray
    params: SimParams = field(default=None, repr=False)

    @property
    def m(self):
        return self.alive.shape[1]

    @property
    def n_steps(self):
        return self.actions.shape[0]

    def state(self, n):
        return CaState(self.alive[n], self.signal[n])

    @property
    def states(self):
        return [self.state(n) for n in range(self.n_steps + 1)]

    @property
    def final_state(self):
        return self.state(self.n_steps)


def develop(genome, params):
    """Grow ``genome`` from the seed cell for ``params.n_steps`` steps."""
    m, n = params.m, params.n_steps
    alive = np.zeros((n + 1, m, m), dtype=np.uint8)
    signal = np.zeros((n + 1, m, m), dtype=np.uint8)
    actions = np.empty((n, m, m), dtype=np.uint8)
    sensors = np.empty((n, m, m), dtype=np.uint8)
    alive[0][grid_center(m)] = 1
    _develop_kernel(np.ascontiguousarray(genome.matrix), float(params.decay),
                    float(params.diffusion), alive, signal, actions, sensors)
    for arr in (alive, signal, actions, sensors):
        arr.setflags(write=False)
    return DevelopmentTrace(alive, signal, actions, sensors, params)


def write_trace_frames(trace, directory):
    """Write every state as ``frame_NNN_alive.pgm`` / ``frame_NNN_signal.pgm``."""
    from .pgm import write_pgm

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for n in range(trace.n_steps + 1):
        a = directory / f"frame_{n:03}_alive.pgm"
        s = directory / f"frame_{n:03}_signal.pgm"
        write_pgm(a, trace.alive[n], maxval=1)
        write_pgm(s, trace.signal[n], maxval=255)
        paths.append((a, s))
    return paths

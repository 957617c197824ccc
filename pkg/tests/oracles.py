"""Independent brute-force re-implementations used as test oracles.

Everything here is deliberately written the slow, literal way (explicit
loops, per-step state) and must stay independent of the package internals:
oracles check the vectorized implementations, so they may not share code
with them.
"""

from __future__ import annotations

import itertools

import mpmath as mp
import numpy as np


# ---------------------------------------------------------------------------
# Moving-window filters
# ---------------------------------------------------------------------------


def sign_plus(x: float) -> int:
    return 1 if x >= 0 else -1


def static_spans(n: int, alpha: int) -> list[tuple[int, int]]:
    spans = []
    start = 0
    while start < n:
        spans.append((start, min(start + alpha - 1, n - 1)))
        start += alpha
    return spans


def static_labels(scores, alpha: int) -> np.ndarray:
    scores = list(map(float, scores))
    labels = [0] * len(scores)
    for start, end in static_spans(len(scores), alpha):
        total = 0.0
        for i in range(start, end + 1):
            total += scores[i]
        lab = sign_plus(total)
        for i in range(start, end + 1):
            labels[i] = lab
    return np.array(labels)


def mean_square_label_error(labels, truths) -> float:
    return sum((l - t) ** 2 for l, t in zip(labels, truths)) / len(truths)


def tune_static(scores, truths, sizes) -> tuple[int, float]:
    best = None
    for alpha in sorted(set(int(s) for s in sizes)):
        err = mean_square_label_error(static_labels(scores, alpha), truths)
        if best is None or err < best[1]:
            best = (alpha, err)
    return best


def dynamic_spans(scores, beta: float) -> list[tuple[int, int]]:
    scores = list(map(float, scores))
    n = len(scores)
    spans = []
    start = 0
    while start < n:
        total = abs(scores[start])
        end = start
        while end + 1 < n and total + abs(scores[end + 1]) <= beta:
            end += 1
            total += abs(scores[end])
        spans.append((start, end))
        start = end + 1
    return spans


def dynamic_labels(scores, beta: float) -> np.ndarray:
    scores = list(map(float, scores))
    labels = [0] * len(scores)
    for start, end in dynamic_spans(scores, beta):
        total = 0.0
        for i in range(start, end + 1):
            total += scores[i]
        lab = sign_plus(total)
        for i in range(start, end + 1):
            labels[i] = lab
    return np.array(labels)


def tune_dynamic(scores, truths, betas) -> tuple[float, float]:
    best = None
    for beta in sorted(float(b) for b in betas):
        err = mean_square_label_error(dynamic_labels(scores, beta), truths)
        if best is None or err < best[1]:
            best = (beta, err)
    return best


# ---------------------------------------------------------------------------
# Dual QP by active-set enumeration (exact for tiny n)
# ---------------------------------------------------------------------------


def qp_reference(X, y, C: float) -> dict:
    """Globally optimal dual solution found by enumerating bound patterns.

    Every candidate evaluated is feasible, and the true optimum's bound
    pattern is among the enumerated ones, so the best candidate is the
    global maximum of the dual.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = y.size
    Q = (y[:, None] * X) @ (y[:, None] * X).T
    best_obj, best_alpha = -np.inf, None
    for pattern in itertools.product((0, 1, 2), repeat=n):
        pattern = np.array(pattern)
        alpha = np.zeros(n)
        alpha[pattern == 1] = C
        free = np.flatnonzero(pattern == 2)
        bound = np.flatnonzero(pattern != 2)
        if free.size:
            size = free.size
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = Q[np.ix_(free, free)]
            kkt[:size, -1] = y[free]
            kkt[-1, :size] = y[free]
            rhs = np.concatenate(
                [1.0 - Q[np.ix_(free, bound)] @ alpha[bound], [-float(y[bound] @ alpha[bound])]]
            )
            sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
            a_free = sol[:size]
            if np.any(a_free < -1e-9) or np.any(a_free > C + 1e-9):
                continue
            alpha[free] = np.clip(a_free, 0.0, C)
        if abs(float(y @ alpha)) > 1e-9:
            continue
        obj = float(alpha.sum() - 0.5 * alpha @ (Q @ alpha))
        if obj > best_obj:
            best_obj, best_alpha = obj, alpha.copy()
    w = X.T @ (best_alpha * y)
    free = np.flatnonzero((best_alpha > 1e-9) & (best_alpha < C - 1e-9))
    if free.size:
        b = float(np.mean(y[free] - X[free] @ w))
    else:
        margins = y - X @ w
        up = margins[((y > 0) & (best_alpha < C - 1e-9)) | ((y < 0) & (best_alpha > 1e-9))]
        low = margins[((y < 0) & (best_alpha < C - 1e-9)) | ((y > 0) & (best_alpha > 1e-9))]
        b = float((up.max() + low.min()) / 2.0)
    return {"objective": best_obj, "alphas": best_alpha, "w": w, "b": b}


# ---------------------------------------------------------------------------
# Dendritic cells, stepped literally
# ---------------------------------------------------------------------------


def dca_votes(safe, danger, lifespans) -> list[list[float]]:
    safe = list(map(float, safe))
    danger = list(map(float, danger))
    n = len(safe)
    votes: list[list[float]] = [[] for _ in range(n)]
    for lifespan in lifespans:
        csm_sum = 0.0
        k_sum = 0.0
        start = 0
        for i in range(n):
            csm_sum += safe[i] + danger[i]
            k_sum += danger[i] - safe[i]
            if csm_sum >= lifespan:
                for j in range(start, i + 1):
                    votes[j].append(k_sum)
                csm_sum = 0.0
                k_sum = 0.0
                start = i + 1
        if start < n:
            for j in range(start, n):
                votes[j].append(k_sum)
    return votes


def dca_labels(safe, danger, lifespans) -> np.ndarray:
    votes = dca_votes(safe, danger, lifespans)
    return np.array([sign_plus(sum(v) / len(v)) for v in votes])


# ---------------------------------------------------------------------------
# Frequency responses in extended precision
# ---------------------------------------------------------------------------


def mp_sliding_gain(width: int, omega: float, dps: int = 50) -> complex:
    with mp.workdps(dps):
        om = mp.mpf(omega)
        total = mp.mpc(0)
        for g in range(width):
            total += mp.exp(-1j * g * om)
        return complex(total / width)


def mp_dc_gain(width: int, omega: float, dps: int = 50) -> complex:
    with mp.workdps(dps):
        om = mp.mpf(omega)
        total = mp.mpc(0)
        for g in range(width):
            shifted = om + 2 * g * mp.pi
            for b in range(width):
                total += mp.exp(-1j * b * shifted)
        return complex(total / width**2)


def sliding_means(values, width: int) -> np.ndarray:
    values = list(map(float, values))
    out = []
    for t in range(width - 1, len(values)):
        total = 0.0
        for a in range(t - width + 1, t + 1):
            total += values[a]
        out.append(total / width)
    return np.array(out)

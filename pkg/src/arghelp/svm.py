"""Soft-margin kernel SVM trained by SMO, plus min-max feature scaling.

The solver works on the dual

    min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K_ij

and at each step moves the maximal violating pair (i, j) along the
feasible direction (+y_i on i, -y_j on j).  Ties in the pair choice go to
the lowest index, so training is deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FORMAT_VERSION = 1
TAU = 1e-12


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None  # None: 1 / n_features, resolved at training time

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def resolve(self, n_features: int) -> "KernelSpec":
        if self.kind == "linear" or self.gamma is not None:
            return self
        return KernelSpec("rbf", 1.0 / n_features if n_features else 1.0)

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Kernel matrix between the rows of ``a`` and ``b``."""
        dot = a @ b.T
        if self.kind == "linear":
            return dot
        sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * dot
        return np.exp(-self.gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class Scaling:
    """Per-dimension training minimum and maximum."""

    lo: np.ndarray
    hi: np.ndarray

    def transform(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != len(self.lo):
            raise ValueError(f"expected {len(self.lo)} features, got {x.shape[-1]}")
        span = self.hi - self.lo
        safe = np.where(span > 0, span, 1.0)
        out = np.where(span > 0, (x - self.lo) / safe, 0.0)
        return np.clip(out, 0.0, 1.0)


def scale_fit(train) -> Scaling:
    x = np.asarray(train, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("cannot fit scaling on an empty matrix")
    return Scaling(x.min(axis=0), x.max(axis=0))


def scale_fit_transform(train) -> tuple[Scaling, np.ndarray]:
    scaling = scale_fit(train)
    return scaling, scaling.transform(train)


@dataclass(frozen=True)
class SvmModel:
    kernel: KernelSpec
    c: float
    support_vectors: np.ndarray
    dual_coefficients: np.ndarray  # alpha_i * y_i
    bias: float
    scaling: Scaling | None = None
    iterations: int = field(default=0, compare=False)

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def weights(self) -> np.ndarray:
        """Explicit primal weight vector (linear kernel only)."""
        if self.kernel.kind != "linear":
            raise ValueError("explicit weights exist only for the linear kernel")
        return self.dual_coefficients @ self.support_vectors


def _as_signs(y) -> np.ndarray:
    y = np.asarray(y)
    if y.dtype == bool:
        return np.where(y, 1.0, -1.0)
    s = np.asarray(y, dtype=float)
    if not np.isin(s, (-1.0, 1.0)).all():
        s = np.where(s > 0, 1.0, -1.0)
    return s


@dataclass(frozen=True)
class DualSolution:
    alpha: np.ndarray
    rho: float
    iterations: int


def solve_dual(K: np.ndarray, y, c: float = 1.0, tol: float = 1e-3, max_kernel_evals: int = 10**7) -> DualSolution:
    """SMO on a precomputed kernel matrix.

    Kernel evaluations are counted as the full matrix plus two kernel
    columns per step; exceeding ``max_kernel_evals`` raises ConvergenceError.
    """
    ys = _as_signs(y)
    n = len(ys)
    if K.shape != (n, n):
        raise ValueError("kernel matrix must be n x n")
    if not c > 0:
        raise ValueError("c must be positive")
    if not ((ys > 0).any() and (ys < 0).any()):
        raise ValueError("training data must contain both classes")
    diag = np.diag(K).copy()
    evals = n * n
    alpha = np.zeros(n)
    grad = -np.ones(n)
    pos = ys > 0
    it = 0
    while True:
        viol = -ys * grad
        up = np.where(pos, alpha < c, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < c)
        i = int(np.argmax(np.where(up, viol, -np.inf)))
        j = int(np.argmin(np.where(low, viol, np.inf)))
        gap = viol[i] - viol[j]
        if gap < tol:
            break
        evals += 2 * n
        if evals > max_kernel_evals:
            raise ConvergenceError(
                f"SMO did not reach tolerance {tol} within {max_kernel_evals} kernel evaluations "
                f"(gap {gap:.3g} after {it} steps)"
            )
        curv = diag[i] + diag[j] - 2.0 * K[i, j]
        step = gap / max(curv, TAU)
        step = min(step, c - alpha[i] if pos[i] else alpha[i], alpha[j] if pos[j] else c - alpha[j])
        alpha[i] += ys[i] * step
        alpha[j] -= ys[j] * step
        grad += step * ys * (K[:, i] - K[:, j])
        it += 1

    # snap round-off at the box edges
    alpha[alpha < 1e-12 * c] = 0.0
    alpha[alpha > c * (1 - 1e-12)] = c
    return DualSolution(alpha, _rho(alpha, ys, grad, c), it)


def dual_objective(alpha, K, y) -> float:
    """Dual objective sum(a) - 1/2 a'Qa (to be maximised)."""
    coef = np.asarray(alpha) * _as_signs(y)
    return float(np.sum(alpha) - 0.5 * coef @ K @ coef)


def train(
    x,
    y,
    kernel: KernelSpec = KernelSpec(),
    c: float = 1.0,
    tol: float = 1e-3,
    max_kernel_evals: int = 10**7,
    scaling: Scaling | None = None,
) -> SvmModel:
    """Fit an SVM on an already-scaled matrix; ``y`` is boolean or +/-1."""
    x = np.asarray(x, dtype=float)
    ys = _as_signs(y)
    if x.ndim != 2 or x.shape[0] != len(ys):
        raise ValueError("x must be (n_samples, n_features) matching y")
    kernel = kernel.resolve(x.shape[1])
    sol = solve_dual(kernel(x, x), ys, c, tol, max_kernel_evals)
    sv = sol.alpha > 0
    return SvmModel(kernel, float(c), x[sv].copy(), sol.alpha[sv] * ys[sv], -sol.rho, scaling, sol.iterations)


def _rho(alpha, ys, grad, c) -> float:
    yg = ys * grad
    at_ub = alpha >= c
    at_lb = alpha <= 0
    free = ~(at_ub | at_lb)
    if free.any():
        return float(yg[free].mean())
    upper = (at_ub & (ys < 0)) | (at_lb & (ys > 0))
    lower = (at_ub & (ys > 0)) | (at_lb & (ys < 0))
    ub = yg[upper].min() if upper.any() else math.inf
    lb = yg[lower].max() if lower.any() else -math.inf
    return float((ub + lb) / 2)


def decision_values(model: SvmModel, x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {x.shape[1]}")
    if len(model.dual_coefficients) == 0:
        return np.full(len(x), model.bias)
    return model.kernel(x, model.support_vectors) @ model.dual_coefficients + model.bias


def decision_value(model: SvmModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("decision_value takes one vector")
    return float(decision_values(model, x[None, :])[0])


def predict(model: SvmModel, x) -> np.ndarray:
    """Boolean predictions; a decision value of exactly 0 counts as positive."""
    return decision_values(model, x) >= 0


# --- persistence -----------------------------------------------------------


def _floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def dumps(model: SvmModel) -> str:
    lines = [f"arghelp-svm v{FORMAT_VERSION}"]
    gamma = "" if model.kernel.gamma is None else f" {model.kernel.gamma!r}"
    lines.append(f"kernel {model.kernel.kind}{gamma}")
    lines.append(f"c {float(model.c)!r}")
    lines.append(f"bias {float(model.bias)!r}")
    lines.append(f"features {model.n_features}")
    if model.scaling is not None:
        lines.append("scale_min " + _floats(model.scaling.lo))
        lines.append("scale_max " + _floats(model.scaling.hi))
    for coef, sv in zip(model.dual_coefficients, model.support_vectors):
        nz = np.flatnonzero(sv)
        lines.append(f"sv {float(coef)!r} " + " ".join(f"{i}:{float(sv[i])!r}" for i in nz.tolist()))
    return "\n".join(lines) + "\n"


def loads(document: str) -> SvmModel:
    lines = document.splitlines()
    if not lines or lines[0].strip() != f"arghelp-svm v{FORMAT_VERSION}":
        raise ValueError("not an arghelp-svm model file")
    fields: dict[str, str] = {}
    svs, coefs = [], []
    for line in lines[1:]:
        key, _, rest = line.partition(" ")
        if key == "sv":
            coef, *pairs = rest.split()
            coefs.append(float(coef))
            svs.append([(int(i), float(v)) for i, v in (p.split(":") for p in pairs)])
        elif key:
            fields[key] = rest
    kind, *gamma = fields["kernel"].split()
    kernel = KernelSpec(kind, float(gamma[0]) if gamma else None)
    d = int(fields["features"])
    matrix = np.zeros((len(svs), d))
    for r, pairs in enumerate(svs):
        for i, v in pairs:
            matrix[r, i] = v
    scaling = None
    if "scale_min" in fields:
        lo = np.array([float(v) for v in fields["scale_min"].split()])
        hi = np.array([float(v) for v in fields["scale_max"].split()])
        scaling = Scaling(lo.reshape(d), hi.reshape(d))
    return SvmModel(kernel, float(fields["c"]), matrix, np.array(coefs), float(fields["bias"]), scaling)

"""Binary soft-margin SVM maintained one point at a time.

The dual quadratic program

    min_a  0.5 * sum_ij a_i a_j y_i y_j K(x_i, x_j) - sum_i a_i
    s.t.   0 <= a_i <= C,   sum_i y_i a_i = 0

is kept at its optimum across single-point insertions and removals. Points
are partitioned by their KKT case, with g_i = y_i * f(x_i) - 1:

    MARGIN   0 < a < C,  g = 0
    ERROR    a = C,      g <= 0
    RESERVE  a = 0,      g >= 0

learn_one grows the new coefficient adiabatically: the margin-set linear
system gives the sensitivities of (b, margin alphas) to the new alpha, the
step runs to the nearest breakpoint, the limiting point migrates between
sets, and the system is re-solved until the new point itself satisfies its
KKT case. unlearn_one runs the same bookkeeping with the sign reversed.
batch_train is an independent SMO solver over the same dual, used as the
equivalence oracle for the incremental path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, SolverError, TrainingError, UnknownPointError
from .signals import LABEL_FAULT, LABEL_NORMAL

MARGIN, ERROR, RESERVE = 0, 1, 2
SET_NAMES = {MARGIN: "MARGIN", ERROR: "ERROR", RESERVE: "RESERVE"}

_TINY = 1e-12
_RESIDUAL_LIMIT = 1e-8

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class KernelSpec:
    kind: str
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise InvalidInputError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "rbf" and (self.gamma is None or self.gamma <= 0):
            raise InvalidInputError("rbf kernel needs gamma > 0")


def kernel_eval(spec: KernelSpec, x: np.ndarray, z: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if spec.kind == "linear":
        return float(x @ z)
    d = x - z
    return float(np.exp(-spec.gamma * (d @ d)))


def kernel_vec(spec: KernelSpec, X: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Kernel values of each row of X against z."""
    X = np.asarray(X, dtype=float)
    z = np.asarray(z, dtype=float)
    if spec.kind == "linear":
        return X @ z
    d = X - z
    return np.exp(-spec.gamma * np.einsum("ij,ij->i", d, d))


def kernel_matrix(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if spec.kind == "linear":
        return A @ B.T
    a2 = np.einsum("ij,ij->i", A, A)[:, None]
    b2 = np.einsum("ij,ij->i", B, B)[None, :]
    d2 = np.maximum(a2 + b2 - 2.0 * (A @ B.T), 0.0)
    return np.exp(-spec.gamma * d2)


def classify(f: float) -> int:
    """Decision-function sign convention: f >= 0 reads as fault."""
    return LABEL_FAULT if f >= 0 else LABEL_NORMAL


@dataclass(frozen=True)
class KktViolation:
    point_id: int
    g: float
    expected_set: str


class OnlineSvm:
    """Kernel SVM state kept KKT-optimal under point-by-point updates.

    Single-writer: learn_one/unlearn_one need exclusive access, while
    decision/decision_many/kkt_report only read and may run concurrently
    with each other on a quiescent model.
    """

    def __init__(self, kernel: KernelSpec, c: float, epsilon: float = 1e-6,
                 budget: int = 256):
        if c <= 0:
            raise InvalidInputError("regularization constant c must be > 0")
        if epsilon <= 0:
            raise InvalidInputError("kkt tolerance epsilon must be > 0")
        if budget < 1:
            raise InvalidInputError("budget must be >= 1")
        self.kernel = kernel
        self.c = float(c)
        self.epsilon = float(epsilon)
        self.budget = int(budget)
        self.b = 0.0
        self._n = 0
        self._next_id = 0
        self._dim: int | None = None
        self._x = np.zeros((budget, 0), dtype=float)
        self._y = np.zeros(budget, dtype=float)
        self._alpha = np.zeros(budget, dtype=float)
        self._g = np.zeros(budget, dtype=float)
        self._ids = np.zeros(budget, dtype=np.int64)
        self._set = np.full(budget, RESERVE, dtype=np.int8)
        self._kcache = np.zeros((budget, budget), dtype=float)
        self._margin: list[int] = []  # array positions, in R row order
        self._r: np.ndarray | None = None
        self._pos_of: dict[int, int] = {}

    # ------------------------------------------------------------------
    # read-only surface

    @property
    def n_points(self) -> int:
        return self._n

    @property
    def ids(self) -> list[int]:
        return [int(i) for i in self._ids[:self._n]]

    @property
    def alphas(self) -> np.ndarray:
        return self._alpha[:self._n].copy()

    @property
    def labels(self) -> np.ndarray:
        return self._y[:self._n].copy()

    @property
    def points(self) -> np.ndarray:
        return self._x[:self._n].copy()

    def set_of(self, point_id: int) -> str:
        return SET_NAMES[int(self._set[self._pos_of[point_id]])]

    def alpha_of(self, point_id: int) -> float:
        return float(self._alpha[self._pos_of[point_id]])

    @property
    def has_both_classes(self) -> bool:
        n = self._n
        if n == 0:
            return False
        y = self._y[:n]
        return bool((y > 0).any() and (y < 0).any())

    def alpha_label_sum(self) -> float:
        return float(self._alpha[:self._n] @ self._y[:self._n])

    def decision(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        if self._n == 0:
            return self.b
        k = kernel_vec(self.kernel, self._x[:self._n], x)
        return float((self._alpha[:self._n] * self._y[:self._n]) @ k + self.b)

    def decision_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self._n == 0:
            return np.full(X.shape[0], self.b)
        km = kernel_matrix(self.kernel, X, self._x[:self._n])
        return km @ (self._alpha[:self._n] * self._y[:self._n]) + self.b

    def kkt_report(self, eps: float | None = None) -> list[KktViolation]:
        """Recompute every residual from scratch and list KKT violations."""
        if eps is None:
            eps = self.epsilon
        n = self._n
        out: list[KktViolation] = []
        if n == 0:
            return out
        km = kernel_matrix(self.kernel, self._x[:n], self._x[:n])
        f = km @ (self._alpha[:n] * self._y[:n]) + self.b
        g = self._y[:n] * f - 1.0
        for i in range(n):
            a = self._alpha[i]
            s = self._set[i]
            bad = False
            if s == MARGIN:
                bad = not (_TINY < a < self.c - _TINY) or abs(g[i]) > eps
            elif s == ERROR:
                bad = abs(a - self.c) > _TINY or g[i] > eps
            else:
                bad = abs(a) > _TINY or g[i] < -eps
            if bad:
                out.append(KktViolation(int(self._ids[i]), float(g[i]), SET_NAMES[int(s)]))
        return out

    # ------------------------------------------------------------------
    # mutation surface

    def learn_one(self, x: np.ndarray, y: int) -> int:
        """Insert one labeled point and restore optimality; returns its id."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or not np.all(np.isfinite(x)):
            raise InvalidInputError("feature vector must be 1-D and finite")
        if y not in (LABEL_NORMAL, LABEL_FAULT):
            raise InvalidInputError("label must be -1 or +1")
        snap = self._snapshot()
        try:
            if self._n >= self.budget:
                self._evict_one()
            pos = self._append(x, float(y))
            if self._g[pos] >= 0.0:
                self._set[pos] = RESERVE
            else:
                self._grow(pos)
                self._refresh_g()
                self._heal_margin_if_needed()
            return int(self._ids[pos])
        except Exception:
            self._restore(snap)
            raise

    def unlearn_one(self, point_id: int) -> None:
        """Drive one point's coefficient to zero, then drop it."""
        if point_id not in self._pos_of:
            raise UnknownPointError(f"no stored point with id {point_id}")
        snap = self._snapshot()
        try:
            self._unlearn_pos(self._pos_of[point_id])
        except Exception:
            self._restore(snap)
            raise

    # ------------------------------------------------------------------
    # checkpointing

    def save_checkpoint(self, path: str | Path) -> None:
        doc = {
            "version": CHECKPOINT_VERSION,
            "kernel": {"kind": self.kernel.kind, "gamma": self.kernel.gamma},
            "c": self.c,
            "epsilon": self.epsilon,
            "budget": self.budget,
            "b": self.b,
            "next_id": self._next_id,
            "points": [
                {
                    "id": int(self._ids[i]),
                    "x": [float(v) for v in self._x[i]],
                    "y": int(self._y[i]),
                    "alpha": float(self._alpha[i]),
                }
                for i in range(self._n)
            ],
        }
        Path(path).write_text(json.dumps(doc), encoding="utf-8")

    @classmethod
    def load_checkpoint(cls, path: str | Path) -> "OnlineSvm":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("version") != CHECKPOINT_VERSION:
            raise InvalidInputError(f"unsupported checkpoint version {doc.get('version')!r}")
        spec = KernelSpec(doc["kernel"]["kind"], doc["kernel"]["gamma"])
        model = cls(spec, doc["c"], epsilon=doc["epsilon"], budget=doc["budget"])
        model.b = float(doc["b"])
        for p in doc["points"]:
            pos = model._append_raw(np.asarray(p["x"], dtype=float), float(p["y"]),
                                    float(p["alpha"]), point_id=int(p["id"]))
            a = model._alpha[pos]
            if a <= _TINY:
                model._alpha[pos] = 0.0
                model._set[pos] = RESERVE
            elif a >= model.c - _TINY:
                model._alpha[pos] = model.c
                model._set[pos] = ERROR
            else:
                model._set[pos] = MARGIN
                model._margin.append(pos)
        model._next_id = int(doc.get("next_id", model._next_id))
        model._refresh_g()
        model._r = None
        return model

    # ------------------------------------------------------------------
    # internal bookkeeping

    def _ensure_dim(self, dim: int) -> None:
        if self._dim is None:
            self._dim = dim
            self._x = np.zeros((self.budget, dim), dtype=float)
        elif dim != self._dim:
            raise InvalidInputError(f"expected feature dim {self._dim}, got {dim}")

    def _append_raw(self, x: np.ndarray, y: float, alpha: float,
                    point_id: int | None = None) -> int:
        if self._n >= self.budget:
            raise SolverError("capacity exceeded")
        self._ensure_dim(x.shape[0])
        pos = self._n
        pid = self._next_id if point_id is None else point_id
        self._next_id = max(self._next_id, pid + 1)
        self._x[pos] = x
        self._y[pos] = y
        self._alpha[pos] = alpha
        self._ids[pos] = pid
        self._set[pos] = RESERVE
        k = kernel_vec(self.kernel, self._x[:pos + 1], x)
        self._kcache[pos, :pos + 1] = k
        self._kcache[:pos + 1, pos] = k
        self._pos_of[pid] = pos
        self._n = pos + 1
        return pos

    def _append(self, x: np.ndarray, y: float) -> int:
        pos = self._append_raw(x, y, 0.0)
        n = self._n
        f = (self._alpha[:n] * self._y[:n]) @ self._kcache[:n, pos] + self.b
        self._g[pos] = y * f - 1.0
        return pos

    def _delete(self, pos: int) -> None:
        last = self._n - 1
        del self._pos_of[int(self._ids[pos])]
        if pos != last:
            for arr in (self._x, self._y, self._alpha, self._g, self._ids, self._set):
                arr[pos] = arr[last]
            n = self._n
            self._kcache[pos, :n] = self._kcache[last, :n]
            self._kcache[:n, pos] = self._kcache[:n, last]
            self._pos_of[int(self._ids[pos])] = pos
            self._margin = [pos if m == last else m for m in self._margin]
        self._n = last
        if not self._margin:
            self._r = None

    def _evict_one(self) -> None:
        n = self._n
        reserve = np.flatnonzero(self._set[:n] == RESERVE)
        if reserve.size:
            victim = reserve[np.argmin(self._ids[reserve])]
        else:
            amin = self._alpha[:n].min()
            cands = np.flatnonzero(self._alpha[:n] <= amin)
            victim = cands[np.argmin(self._ids[cands])]
        self._unlearn_pos(int(victim))

    def _unlearn_pos(self, pos: int) -> None:
        if self._set[pos] == MARGIN:
            self._margin_remove(pos)
        if self._alpha[pos] > _TINY:
            self._shrink(pos)
            self._alpha[pos] = 0.0
            self._delete(pos)
            self._refresh_g()
            self._heal_margin_if_needed()
        else:
            self._alpha[pos] = 0.0
            self._delete(pos)

    def _refresh_g(self) -> None:
        n = self._n
        if n == 0:
            return
        w = self._kcache[:n, :n] @ (self._alpha[:n] * self._y[:n])
        self._g[:n] = self._y[:n] * (w + self.b) - 1.0

    def _heal_margin_if_needed(self) -> None:
        # conditioning safeguard: if accumulated drift shows up on the margin
        # residuals, re-solve the margin system exactly
        if not self._margin:
            return
        worst = max(abs(float(self._g[m])) for m in self._margin)
        if worst > 0.5 * self.epsilon:
            self._solve_margin_exactly()
            self._refresh_g()

    def _solve_margin_exactly(self) -> None:
        n = self._n
        S = self._margin
        m = len(S)
        if m == 0:
            return
        mask = np.ones(n, dtype=bool)
        mask[S] = False
        others = np.flatnonzero(mask)
        y_s = self._y[S]
        q_ss = (y_s[:, None] * y_s[None, :]) * self._kcache[np.ix_(S, S)]
        M = np.zeros((m + 1, m + 1))
        M[0, 1:] = y_s
        M[1:, 0] = y_s
        M[1:, 1:] = q_ss
        rhs = np.zeros(m + 1)
        rhs[1:] = 1.0
        if others.size:
            ao = self._alpha[others]
            yo = self._y[others]
            rhs[0] = -float(yo @ ao)
            q_so = (y_s[:, None] * yo[None, :]) * self._kcache[np.ix_(S, others)]
            rhs[1:] -= q_so @ ao
        try:
            sol = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        self.b = float(sol[0])
        self._alpha[S] = np.clip(sol[1:], 0.0, self.c)
        self._r = None

    # ------------------------------------------------------------------
    # margin-set inverse maintenance

    def _q_col(self, pos: int) -> np.ndarray:
        n = self._n
        return self._y[:n] * (self._y[pos] * self._kcache[:n, pos])

    def _margin_matrix(self) -> np.ndarray:
        S = self._margin
        m = len(S)
        y_s = self._y[S]
        q_ss = (y_s[:, None] * y_s[None, :]) * self._kcache[np.ix_(S, S)]
        M = np.zeros((m + 1, m + 1))
        M[0, 1:] = y_s
        M[1:, 0] = y_s
        M[1:, 1:] = q_ss
        return M

    def _rebuild_r(self) -> None:
        M = self._margin_matrix()
        try:
            self._r = np.linalg.solve(M, np.eye(M.shape[0]))
        except np.linalg.LinAlgError:
            self._r = np.linalg.pinv(M)

    def _ensure_r(self) -> None:
        if self._margin and (self._r is None or self._r.shape[0] != len(self._margin) + 1):
            self._rebuild_r()

    def _margin_add(self, pos: int) -> None:
        if not self._margin:
            q = self._kcache[pos, pos]
            yk = self._y[pos]
            self._r = np.array([[-q, yk], [yk, 0.0]])
            self._margin = [pos]
            return
        self._ensure_r()
        S = self._margin
        m = len(S)
        y_s = self._y[S]
        v = np.concatenate(([self._y[pos]],
                            y_s * (self._y[pos] * self._kcache[S, pos])))
        beta = -self._r @ v
        gamma = self._kcache[pos, pos] + v @ beta
        self._margin.append(pos)
        if abs(gamma) < _TINY:
            self._rebuild_r()
            return
        grown = np.zeros((m + 2, m + 2))
        grown[:m + 1, :m + 1] = self._r
        ext = np.concatenate((beta, [1.0]))
        self._r = grown + np.outer(ext, ext) / gamma

    def _margin_remove(self, pos: int) -> None:
        k = self._margin.index(pos)
        self._margin.pop(k)
        if not self._margin:
            self._r = None
            return
        if self._r is None:
            return
        j = k + 1
        pivot = self._r[j, j]
        if abs(pivot) < _TINY:
            self._rebuild_r()
            return
        r = self._r - np.outer(self._r[:, j], self._r[j, :]) / pivot
        keep = [i for i in range(r.shape[0]) if i != j]
        self._r = r[np.ix_(keep, keep)]

    def _margin_sensitivities(self, cpos: int) -> tuple[np.ndarray, np.ndarray]:
        """Returns (beta, gamma): d(b, alpha_S)/d(alpha_c) and dg/d(alpha_c)."""
        n = self._n
        S = self._margin
        self._ensure_r()
        y_s = self._y[S]
        qc = self._q_col(cpos)
        v = np.concatenate(([self._y[cpos]], qc[S]))
        beta = -self._r @ v
        M = self._margin_matrix()
        res = M @ beta + v
        if np.max(np.abs(res)) > _RESIDUAL_LIMIT:
            self._rebuild_r()
            beta = -self._r @ v
        gamma = qc + self._y[:n] * (self._kcache[:n, S] @ (y_s * beta[1:]) + beta[0])
        return beta, gamma

    # ------------------------------------------------------------------
    # adiabatic stepping

    def _grow(self, cpos: int) -> None:
        """Increase alpha of cpos until its own KKT case holds."""
        cap = max(100, 100 * self._n)
        cid = int(self._ids[cpos])
        for _ in range(cap):
            if self._g[cpos] >= -_TINY:
                if self._alpha[cpos] <= _TINY:
                    self._alpha[cpos] = 0.0
                    self._set[cpos] = RESERVE
                else:
                    self._set[cpos] = MARGIN
                    self._g[cpos] = 0.0
                    self._margin_add(cpos)
                return
            if not self._margin:
                done = self._drift_b(cpos, +1.0)
            else:
                done = self._step_along(cpos, +1.0, cid)
            if done:
                return
        raise SolverError("iteration cap exceeded while learning a point")

    def _shrink(self, cpos: int) -> None:
        """Decrease alpha of cpos to exactly zero."""
        cap = max(100, 100 * self._n)
        cid = int(self._ids[cpos])
        for _ in range(cap):
            if self._alpha[cpos] <= _TINY:
                self._alpha[cpos] = 0.0
                return
            if not self._margin:
                self._drift_b(cpos, -1.0)
            else:
                if self._step_along(cpos, -1.0, cid):
                    return
        raise SolverError("iteration cap exceeded while unlearning a point")

    def _drift_b(self, cpos: int, direction: float) -> bool:
        """Move the bias when no margin point can absorb coefficient change.

        With an empty margin set alphas are frozen, so the bias slides until
        either the candidate satisfies KKT (grow only) or a bound point's
        residual reaches zero and it joins the margin.
        """
        n = self._n
        yc = self._y[cpos]
        db = yc * direction  # bias direction per unit step
        events: list[tuple[float, int, str, int]] = []
        if direction > 0:
            events.append((-float(self._g[cpos]), int(self._ids[cpos]), "cand", cpos))
        dg = self._y[:n] * db  # residual change per unit step
        for pos in range(n):
            if pos == cpos:
                continue
            s = self._set[pos]
            if s == ERROR and dg[pos] > 0:
                events.append((max(-float(self._g[pos]), 0.0), int(self._ids[pos]), "join", pos))
            elif s == RESERVE and dg[pos] < 0:
                events.append((max(float(self._g[pos]), 0.0), int(self._ids[pos]), "join", pos))
        if not events:
            raise SolverError("bias drift found no absorbing point")
        step = min(e[0] for e in events)
        tol = _TINY * (1.0 + abs(step))
        chosen = min((e for e in events if e[0] <= step + tol), key=lambda e: e[1])
        self.b += db * step
        self._g[:n] += dg * step
        kind, pos = chosen[2], chosen[3]
        if kind == "cand":
            self._g[cpos] = 0.0
            if self._alpha[cpos] <= _TINY:
                self._alpha[cpos] = 0.0
                self._set[cpos] = RESERVE
            else:
                self._set[cpos] = MARGIN
                self._margin_add(cpos)
            return True
        self._g[pos] = 0.0
        self._set[pos] = MARGIN
        self._margin_add(pos)
        return False

    def _step_along(self, cpos: int, direction: float, cid: int) -> bool:
        """One breakpoint step of the candidate coefficient; True when done."""
        n = self._n
        beta, gamma = self._margin_sensitivities(cpos)
        beta_eff = direction * beta
        gamma_eff = direction * gamma
        c = self.c
        events: list[tuple[float, int, int, str, int]] = []  # step, id, prio, kind, pos

        gc = float(self._g[cpos])
        ge_c = float(gamma_eff[cpos])
        if direction > 0:
            if ge_c > _TINY and gc < 0:
                events.append((-gc / ge_c, cid, 1, "cand_margin", cpos))
            events.append((c - float(self._alpha[cpos]), cid, 0, "cand_error", cpos))
        else:
            events.append((float(self._alpha[cpos]), cid, 0, "cand_zero", cpos))

        for k, pos in enumerate(self._margin):
            be = float(beta_eff[k + 1])
            a = float(self._alpha[pos])
            pid = int(self._ids[pos])
            if be > _TINY:
                events.append(((c - a) / be, pid, 1, "to_error", pos))
            elif be < -_TINY:
                events.append((a / -be, pid, 1, "to_reserve", pos))

        for pos in range(n):
            if pos == cpos or self._set[pos] == MARGIN:
                continue
            ge = float(gamma_eff[pos])
            g = float(self._g[pos])
            pid = int(self._ids[pos])
            if self._set[pos] == ERROR and ge > _TINY:
                events.append((max(-g / ge, 0.0), pid, 1, "to_margin", pos))
            elif self._set[pos] == RESERVE and ge < -_TINY:
                events.append((max(-g / ge, 0.0), pid, 1, "to_margin", pos))

        step = min(e[0] for e in events)
        step = max(step, 0.0)
        tol = _TINY * (1.0 + abs(step))
        chosen = min((e for e in events if e[0] <= step + tol), key=lambda e: (e[1], e[2]))

        # apply the step
        self._alpha[cpos] += direction * step
        self.b += float(beta_eff[0]) * step
        if self._margin:
            self._alpha[self._margin] += beta_eff[1:] * step
        self._g[:n] += gamma_eff * step
        for m in self._margin:
            self._g[m] = 0.0

        kind, pos = chosen[3], chosen[4]
        if kind == "cand_margin":
            self._g[cpos] = 0.0
            if self._alpha[cpos] <= _TINY:
                self._alpha[cpos] = 0.0
                self._set[cpos] = RESERVE
            else:
                self._set[cpos] = MARGIN
                self._margin_add(cpos)
            return True
        if kind == "cand_error":
            self._alpha[cpos] = c
            self._set[cpos] = ERROR
            return True
        if kind == "cand_zero":
            self._alpha[cpos] = 0.0
            return True
        if kind == "to_error":
            self._alpha[pos] = c
            self._set[pos] = ERROR
            self._margin_remove(pos)
        elif kind == "to_reserve":
            self._alpha[pos] = 0.0
            self._set[pos] = RESERVE
            self._margin_remove(pos)
        else:  # to_margin
            self._g[pos] = 0.0
            self._set[pos] = MARGIN
            self._margin_add(pos)
        return False

    # ------------------------------------------------------------------
    # rollback support

    def _snapshot(self) -> dict:
        n = self._n
        return {
            "n": n,
            "b": self.b,
            "next_id": self._next_id,
            "dim": self._dim,
            "x": self._x[:n].copy(),
            "y": self._y[:n].copy(),
            "alpha": self._alpha[:n].copy(),
            "g": self._g[:n].copy(),
            "ids": self._ids[:n].copy(),
            "set": self._set[:n].copy(),
            "k": self._kcache[:n, :n].copy(),
            "margin": list(self._margin),
            "r": None if self._r is None else self._r.copy(),
            "pos_of": dict(self._pos_of),
        }

    def _restore(self, snap: dict) -> None:
        n = snap["n"]
        self._n = n
        self.b = snap["b"]
        self._next_id = snap["next_id"]
        self._dim = snap["dim"]
        if self._x.shape[1] != snap["x"].shape[1]:
            self._x = np.zeros((self.budget, snap["x"].shape[1]), dtype=float)
        self._x[:n] = snap["x"]
        self._y[:n] = snap["y"]
        self._alpha[:n] = snap["alpha"]
        self._g[:n] = snap["g"]
        self._ids[:n] = snap["ids"]
        self._set[:n] = snap["set"]
        self._kcache[:n, :n] = snap["k"]
        self._margin = snap["margin"]
        self._r = snap["r"]
        self._pos_of = snap["pos_of"]


# ----------------------------------------------------------------------
# batch reference solver


def batch_train(X: np.ndarray, y: np.ndarray, kernel: KernelSpec, c: float,
                tol: float = 1e-8, epsilon: float = 1e-6,
                max_iter: int = 1_000_000) -> OnlineSvm:
    """Solve the full dual with SMO; independent oracle for the online path.

    Uses maximal-violating-pair selection with a second-order working-set
    refinement and iterates until no pair violates optimality beyond tol.
    """
    X = np.asarray(X, dtype=float)
    yv = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != yv.shape[0]:
        raise InvalidInputError("X must be 2-D with one label per row")
    if not np.all(np.isfinite(X)):
        raise InvalidInputError("features must be finite")
    if not np.all(np.isin(yv, (-1.0, 1.0))):
        raise InvalidInputError("labels must be -1 or +1")
    if not ((yv > 0).any() and (yv < 0).any()):
        raise TrainingError("batch training needs both classes")

    km = kernel_matrix(kernel, X, X)
    alpha, b = _smo_solve(km, yv, float(c), tol, max_iter)

    model = OnlineSvm(kernel, c, epsilon=epsilon, budget=max(X.shape[0], 1))
    for i in range(X.shape[0]):
        pos = model._append_raw(X[i], yv[i], float(alpha[i]))
        a = model._alpha[pos]
        if a <= 0.0:
            model._alpha[pos] = 0.0
            model._set[pos] = RESERVE
        elif a >= c:
            model._alpha[pos] = c
            model._set[pos] = ERROR
        else:
            model._set[pos] = MARGIN
            model._margin.append(pos)
    model.b = b
    model._refresh_g()
    model._r = None
    return model


def _smo_solve(km: np.ndarray, y: np.ndarray, c: float, tol: float,
               max_iter: int) -> tuple[np.ndarray, float]:
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective at alpha = 0
    kdiag = np.diag(km).copy()
    pos_y = y > 0

    for _ in range(max_iter):
        neg_yg = -y * grad
        up = (pos_y & (alpha < c)) | (~pos_y & (alpha > 0))
        low = (pos_y & (alpha > 0)) | (~pos_y & (alpha < c))
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, neg_yg, -np.inf)))
        m_up = neg_yg[i]
        m_low = float(np.min(np.where(low, neg_yg, np.inf)))
        if m_up - m_low <= tol:
            break
        # second-order choice of the partner index
        cand = low & (neg_yg < m_up)
        bdiff = m_up - neg_yg
        quad = np.maximum(kdiag[i] + kdiag - 2.0 * km[:, i], _TINY)
        gain = np.where(cand, -(bdiff * bdiff) / quad, np.inf)
        j = int(np.argmin(gain))

        qi = y * (y[i] * km[:, i])
        qj = y * (y[j] * km[:, j])
        old_i, old_j = alpha[i], alpha[j]
        quad_ij = max(kdiag[i] + kdiag[j] - 2.0 * km[i, j], _TINY)

        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad_ij
            diff = old_i - old_j
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = -diff
            if diff > 0:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = c - diff
            else:
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = c + diff
        else:
            delta = (grad[i] - grad[j]) / quad_ij
            total = old_i + old_j
            alpha[i] -= delta
            alpha[j] += delta
            if total > c:
                if alpha[i] > c:
                    alpha[i] = c
                    alpha[j] = total - c
            else:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = total
            if total > c:
                if alpha[j] > c:
                    alpha[j] = c
                    alpha[i] = total - c
            else:
                if alpha[i] < 0:
                    alpha[i] = 0.0
                    alpha[j] = total
        grad += qi * (alpha[i] - old_i) + qj * (alpha[j] - old_j)
    else:
        raise SolverError("smo failed to reach the requested tolerance")

    margin = (alpha > 0) & (alpha < c)
    neg_yg = -y * grad
    if margin.any():
        b = float(np.mean(neg_yg[margin]))
    else:
        up = (pos_y & (alpha < c)) | (~pos_y & (alpha > 0))
        low = (pos_y & (alpha > 0)) | (~pos_y & (alpha < c))
        hi = float(np.max(np.where(up, neg_yg, -np.inf))) if up.any() else 0.0
        lo = float(np.min(np.where(low, neg_yg, np.inf))) if low.any() else 0.0
        b = (hi + lo) / 2.0
    return alpha, b

"""LHS-model feasibility, steering robustness, and the see-saw optimizer.

An assemblage admits a local-hidden-state model when it decomposes over the
2^m deterministic response strategies with positive hidden-state weights.
The steering robustness is the least noise weight eps such that mixing the
assemblage with some valid noise assemblage (weight eps/(1+eps)) restores
such a model; the noise set used here is all valid assemblages, which gives
the conic program solved in :mod:`qsteer.sdp`.  Infeasibility comes with a
dual witness F_j whose value on the assemblage exceeds its maximum over all
LHS assemblages, and optimal solves come with matching primal and dual
objectives, so both verdicts are certified by plain linear algebra.

Each solve is single-threaded and deterministic; independent solves may run
concurrently and all returned values are immutable.
"""

import json
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import sdp
from .errors import BadSettingCount, NonMonotone, SolverFailure
from .measurements import Assemblage, assemblage_from_directions
from .qstate import DensityMatrix

FEASIBILITY_EPS = 1e-6
SEESAW_MONOTONE_TOL = 1e-7


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITERATIONS = "max-iterations"


@dataclass(frozen=True, eq=False)
class DeterministicStrategyTable:
    """All 2^m deterministic outcome assignments, lexicographically ordered.

    ``outcomes[l, x]`` is the outcome index (0 for +1, 1 for -1) strategy l
    assigns to setting x; strategy 0 answers +1 everywhere and setting 0 is
    the most significant digit.
    """

    m: int
    outcomes: np.ndarray

    @property
    def n_strategies(self) -> int:
        return self.outcomes.shape[0]

    def response(self, outcome_index: int, x: int, l: int) -> int:
        return int(self.outcomes[l, x] == outcome_index)

    def d_matrix(self) -> np.ndarray:
        """Dense response table D[2x + k, l] for the solver."""
        L = self.n_strategies
        D = np.zeros((2 * self.m, L))
        for l in range(L):
            for x in range(self.m):
                D[2 * x + int(self.outcomes[l, x]), l] = 1.0
        return D


def deterministic_strategies(m: int) -> DeterministicStrategyTable:
    if m not in (2, 3):
        raise BadSettingCount(f"settings count m = {m} not in (2, 3)")
    L = 2**m
    outcomes = np.zeros((L, m), dtype=np.int8)
    for l in range(L):
        for x in range(m):
            outcomes[l, x] = (l >> (m - 1 - x)) & 1
    outcomes.setflags(write=False)
    return DeterministicStrategyTable(m, outcomes)


@dataclass(frozen=True, eq=False)
class LhsModel:
    """Hidden-state decomposition sigma_l, one unnormalized state per strategy."""

    sigma_lambda: np.ndarray
    residual: float

    def min_eigenvalue(self) -> float:
        return float(min(np.linalg.eigvalsh(s)[0] for s in self.sigma_lambda))


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    feasible: bool
    model: LhsModel | None = None
    witness: np.ndarray | None = None
    margin: float | None = None


@dataclass(frozen=True, eq=False)
class RobustnessResult:
    epsilon: float
    model: LhsModel
    noise: np.ndarray | None
    status: SolveStatus
    primal_dual_gap: float
    primal_value: float
    dual_value: float
    witness: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    noise_set: str = "all-assemblages"
    history: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True, eq=False)
class SeeSawResult:
    epsilon: float
    alice_directions: np.ndarray
    iterations: int
    trace: tuple
    final: RobustnessResult


def _sigma_array(asm: Assemblage) -> np.ndarray:
    """Assemblage members flattened to solver order j = 2x + outcome index."""
    J = 2 * asm.m
    sigma = np.empty((J, 2, 2), dtype=np.complex128)
    for x in range(asm.m):
        for k in range(2):
            sigma[2 * x + k] = asm.sigma[x, k]
    return sigma


def _witness_blocks(y: np.ndarray, J: int) -> np.ndarray:
    F = np.empty((J, 2, 2), dtype=np.complex128)
    for j in range(J):
        F[j] = sdp._mat4(y[4 * j], y[4 * j + 1], y[4 * j + 2], y[4 * j + 3])
    return F


def _dump_history(history: np.ndarray, debug_dump) -> None:
    lines = []
    for row in history:
        lines.append(
            json.dumps(
                {
                    "iteration": int(row[0]),
                    "primal": row[1] - 1.0,
                    "dual": row[2] - 1.0,
                    "primal_residual": row[3],
                    "dual_residual": row[4],
                    "mu": row[5],
                }
            )
        )
    text = "\n".join(lines) + "\n"
    if hasattr(debug_dump, "write"):
        debug_dump.write(text)
    else:
        with open(debug_dump, "w", encoding="utf-8") as fh:
            fh.write(text)


def steering_robustness(
    asm: Assemblage,
    max_iters: int = sdp.DEFAULT_MAX_ITERS,
    tol: float = sdp.DEFAULT_TOL,
    debug_dump=None,
    use_numba=None,
) -> RobustnessResult:
    """Steering robustness of an assemblage with noise set = all assemblages.

    Raises ``SolverFailure`` if the interior-point iteration exhausts its
    cap or loses positivity before certifying optimality.
    """
    table = deterministic_strategies(asm.m)
    Dm = table.d_matrix()
    sigma = _sigma_array(asm)
    status_code, X, y, Z, iters, history, stats = sdp.solve_robustness(
        sigma, Dm, max_iters, tol, use_numba=use_numba
    )
    if debug_dump is not None:
        _dump_history(history, debug_dump)
    if status_code != sdp.STATUS_OPTIMAL:
        raise SolverFailure(
            f"robustness solve ended with status code {status_code} after {iters} iterations"
        )
    L = table.n_strategies
    J = 2 * asm.m
    primal = float(stats[0]) - 1.0
    dual = float(stats[1]) - 1.0
    if abs(primal - dual) > 1e-6:
        raise SolverFailure(
            f"uncertified optimum: primal-dual gap {abs(primal - dual):.3e} exceeds 1e-6"
        )
    eps = max(primal, 0.0)

    tau = X[:L]
    slack = X[L:]
    noise = None
    if eps > 1e-9:
        noise = slack / eps
    model_blocks = tau / (1.0 + eps)
    # residual of the model against the noise-mixed assemblage
    lhs = np.einsum("jl,lab->jab", Dm, model_blocks)
    target = (sigma + slack) / (1.0 + eps)
    residual = float(np.max(np.abs(lhs - target)))
    return RobustnessResult(
        epsilon=eps,
        model=LhsModel(model_blocks, residual),
        noise=noise,
        status=SolveStatus.OPTIMAL,
        primal_dual_gap=abs(primal - dual),
        primal_value=primal,
        dual_value=dual,
        witness=_witness_blocks(y, J),
        iterations=iters,
        primal_residual=float(stats[2]),
        dual_residual=float(stats[3]),
        history=history,
    )


def witness_lhs_bound(F: np.ndarray, table: DeterministicStrategyTable) -> float:
    """Largest value of the functional sum_j Tr[F_j sigma_j] over LHS assemblages.

    Equals max_l lambda_max(sum_j D[j,l] F_j) since the optimum concentrates
    on one deterministic strategy and one pure hidden state.
    """
    Dm = table.d_matrix()
    best = -np.inf
    for l in range(table.n_strategies):
        G = np.einsum("j,jab->ab", Dm[:, l], F)
        best = max(best, float(np.linalg.eigvalsh(G)[-1]))
    return best


def witness_value(F: np.ndarray, asm: Assemblage) -> float:
    return float(np.real(np.einsum("jab,jba->", F, _sigma_array(asm))))


def lhs_feasibility(asm: Assemblage, feas_tol: float = FEASIBILITY_EPS) -> FeasibilityResult:
    """Decide LHS membership of an assemblage, with certificate.

    Feasible: returns hidden states reproducing the assemblage (refined to
    near-exact equality when the refinement preserves positivity).
    Infeasible: returns the dual steering functional and its margin over the
    LHS bound.  ``SolverFailure`` is distinct from an Infeasible verdict.
    """
    table = deterministic_strategies(asm.m)
    result = steering_robustness(asm)
    sigma = _sigma_array(asm)
    Dm = table.d_matrix()
    if result.epsilon <= feas_tol:
        tau = result.model.sigma_lambda * (1.0 + result.epsilon)
        resid = np.einsum("jl,lab->jab", Dm, tau) - sigma
        # minimum-norm correction onto the equality manifold
        pinv = np.linalg.pinv(Dm)
        delta = np.einsum("lj,jab->lab", pinv, resid)
        refined = tau - delta
        min_eig = float(min(np.linalg.eigvalsh(s)[0] for s in refined))
        if min_eig >= -1e-9:
            model_blocks = refined
        else:
            model_blocks = tau
        residual = float(
            np.max(np.abs(np.einsum("jl,lab->jab", Dm, model_blocks) - sigma))
        )
        return FeasibilityResult(feasible=True, model=LhsModel(model_blocks, residual))
    value = witness_value(result.witness, asm)
    margin = value - witness_lhs_bound(result.witness, table)
    return FeasibilityResult(
        feasible=False, witness=result.witness, margin=float(margin)
    )


def _bob_contraction(rho4: np.ndarray, F: np.ndarray) -> np.ndarray:
    """K with Tr[(M x F) rho] = Tr[M K], the dual functional seen by Alice."""
    return np.einsum("ab,xbya->xy", F, rho4)


def see_saw(
    rho: DensityMatrix,
    m: int,
    max_iters: int = 50,
    tol: float = 1e-7,
    start_directions: np.ndarray | None = None,
) -> SeeSawResult:
    """Alternating maximization of robustness over Alice's measurements.

    Each round extracts the dual steering functional at the current
    settings and points every setting along the eigenbasis of the effective
    operator K_{+|x} - K_{-|x} obtained by contracting rho with the dual
    variables on Bob's side (settings are updated in order x = 1..m, one
    full pass per round; a degenerate effective operator keeps the previous
    setting).  The robustness sequence is nondecreasing up to solver
    tolerance; a decrease beyond 1e-7 raises ``NonMonotone``.
    """
    if m not in (2, 3):
        raise BadSettingCount(f"settings count m = {m} not in (2, 3)")
    if start_directions is None:
        directions = np.eye(3)[:m].copy()
    else:
        directions = np.array(start_directions, dtype=float)
    rho4 = rho.matrix.reshape(2, 2, 2, 2)

    result = steering_robustness(assemblage_from_directions(rho, directions))
    trace = [result.epsilon]
    for _ in range(max_iters - 1):
        new_dirs = directions.copy()
        for x in range(m):
            delta = _bob_contraction(rho4, result.witness[2 * x]) - _bob_contraction(
                rho4, result.witness[2 * x + 1]
            )
            vec = np.array(
                [
                    delta[0, 1].real,
                    -delta[0, 1].imag,
                    0.5 * (delta[0, 0].real - delta[1, 1].real),
                ]
            )
            norm = float(np.linalg.norm(vec))
            if norm > 1e-12:
                new_dirs[x] = vec / norm
        next_result = steering_robustness(assemblage_from_directions(rho, new_dirs))
        if next_result.epsilon < trace[-1] - SEESAW_MONOTONE_TOL:
            raise NonMonotone(
                f"robustness dropped from {trace[-1]} to {next_result.epsilon}"
            )
        directions = new_dirs
        improvement = next_result.epsilon - trace[-1]
        trace.append(next_result.epsilon)
        result = next_result
        if improvement < tol:
            break
    return SeeSawResult(
        epsilon=trace[-1],
        alice_directions=directions,
        iterations=len(trace),
        trace=tuple(trace),
        final=result,
    )


def pauli_robustness(rho: DensityMatrix, m: int = 3) -> RobustnessResult:
    """Robustness at fixed Pauli-axis settings for Alice."""
    if m not in (2, 3):
        raise BadSettingCount(f"settings count m = {m} not in (2, 3)")
    return steering_robustness(assemblage_from_directions(rho, np.eye(3)[:m]))

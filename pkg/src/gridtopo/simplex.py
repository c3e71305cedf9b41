"""Dense tableau simplex with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A x = b, x >= 0`` from a caller-supplied
feasible starting basis (the flow LP always has one, so no phase-1 is
needed). Bland's rule (always pick the lowest-index candidate for
entering and, among minimum-ratio ties, the row holding the
lowest-index basic variable) guarantees termination on degenerate
instances at the cost of extra pivots, which is irrelevant at the
problem sizes this package handles. Given identical inputs the pivot
sequence, and therefore the returned vertex, is fully deterministic.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SolverStall", "UnboundedProblem", "solve"]


class SolverStall(RuntimeError):
    """Iteration cap exceeded; indicates degenerate cycling, which
    Bland's rule is supposed to preclude."""


class UnboundedProblem(RuntimeError):
    """No minimum exists; cannot happen for objectives bounded below."""


def solve(
    c,
    A,
    b,
    basis,
    *,
    tol: float = 1e-9,
    max_iterations: int | None = None,
) -> tuple[np.ndarray, float, int]:
    """Return ``(x, objective, iterations)`` for an optimal basic solution.

    ``basis`` must index a feasible basis of A (b >= 0 once the basis
    columns are reduced to the identity).
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape if A.ndim == 2 else (0, len(c))
    if m == 0:
        return np.zeros(n), 0.0, 0
    basis = list(basis)
    if len(basis) != m:
        raise ValueError(f"basis size {len(basis)} != row count {m}")

    tableau = np.hstack([A, b.reshape(-1, 1)])
    for row, col in enumerate(basis):
        pivot = tableau[row, col]
        if abs(pivot) <= tol:
            raise ValueError("starting basis is singular")
        tableau[row] /= pivot
        factors = tableau[:, col].copy()
        factors[row] = 0.0
        tableau -= np.outer(factors, tableau[row])
    if (tableau[:, -1] < -1e-7).any():
        raise ValueError("starting basis is infeasible")

    basis_array = np.asarray(basis)
    cap = max_iterations if max_iterations is not None else 1000 + 50 * (m + n)
    iterations = 0
    while True:
        reduced = c - c[basis_array] @ tableau[:, :n]
        candidates = np.nonzero(reduced < -tol)[0]
        if candidates.size == 0:
            break
        enter = int(candidates[0])  # Bland: lowest index enters

        column = tableau[:, enter]
        eligible = column > tol
        if not eligible.any():
            raise UnboundedProblem(f"column {enter} unbounded")
        ratios = np.full(m, np.inf)
        ratios[eligible] = np.maximum(tableau[eligible, -1], 0.0) / column[eligible]
        ties = np.nonzero(ratios <= ratios.min() + 1e-12)[0]
        leave_row = int(ties[np.argmin(basis_array[ties])])  # Bland tie-break

        tableau[leave_row] /= tableau[leave_row, enter]
        factors = tableau[:, enter].copy()
        factors[leave_row] = 0.0
        tableau -= np.outer(factors, tableau[leave_row])
        basis_array[leave_row] = enter

        iterations += 1
        if iterations > cap:
            raise SolverStall(f"no optimum after {cap} pivots")

    x = np.zeros(n)
    x[basis_array] = tableau[:, -1]
    np.clip(x, 0.0, None, out=x)  # wipe -0.0 / roundoff dust
    return x, float(c @ x), iterations

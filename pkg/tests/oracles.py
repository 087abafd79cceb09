"""Independent exact-arithmetic oracles shared by several test modules."""

import itertools


def exact_feasible(A, b):
    """Exact LP feasibility {x >= 0, A x = b} by enumerating basic solutions over Fractions."""
    m, n = len(A), len(A[0])
    for k in range(0, m + 1):
        for cols in itertools.combinations(range(n), k):
            # Gaussian elimination on [A_S | b]
            M = [[A[i][j] for j in cols] + [b[i]] for i in range(m)]
            r = 0
            pivots = []
            for c in range(k):
                piv = next((i for i in range(r, m) if M[i][c] != 0), None)
                if piv is None:
                    break
                M[r], M[piv] = M[piv], M[r]
                for i in range(m):
                    if i != r and M[i][c] != 0:
                        f = M[i][c] / M[r][c]
                        M[i] = [x - f * y for x, y in zip(M[i], M[r])]
                pivots.append(c)
                r += 1
            if len(pivots) < k:
                continue  # dependent columns; a smaller subset covers this case
            if any(M[i][k] != 0 for i in range(r, m)):
                continue  # inconsistent
            x = [M[i][k] / M[i][i] for i in range(k)]
            if all(v >= 0 for v in x):
                return True
    return False

import numpy as np

from nctrace.circle import abs_d_diagonal, realize


def symbol_matrix(A, cutoff, z=0.0):
    """Dense circle matrix of ``sum b_{j,l}(z) |D|^{alpha(z)-j} log^l |D|``."""
    lam = abs_d_diagonal(cutoff)
    alpha = complex(A.order.at(z))
    out = np.zeros((2 * cutoff + 1, 2 * cutoff + 1), dtype=complex)
    for (j, l), fam in A.terms.items():
        b = fam(z) if fam.degree > 0 else fam[0]
        right = lam ** (alpha - j) * np.log(lam) ** l
        out += realize(b, cutoff).to_dense() * right[None, :]
    return out


def hermitian_function(M, fn):
    w, V = np.linalg.eigh(M)
    return (V * fn(w)) @ V.conj().T


def interior_error(X, Y, cutoff, lo, hi):
    """Largest entry difference on columns with lo <= |n| <= hi."""
    n = np.arange(-cutoff, cutoff + 1)
    cols = (np.abs(n) >= lo) & (np.abs(n) <= hi)
    return float(np.max(np.abs((X - Y)[:, cols])))


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")

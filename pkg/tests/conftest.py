import numpy as np
import pytest
import sympy as sp

from cubint.phasecore import Potential1D


def poly_potential(expr_str: str, singularities=(), domain=None) -> Potential1D:
    """1D potential from a sympy-parsable expression in x, exact derivatives."""
    x = sp.Symbol("x")
    expr = sp.sympify(expr_str)
    ders = [sp.diff(expr, x, k) for k in range(5)]
    f = sp.lambdify(x, ders, modules="numpy")
    d1 = sp.lambdify(x, ders[1], modules="math")

    def evaluator(v):
        v = np.asarray(v, dtype=float)
        vals = f(v)
        return np.stack([
            np.broadcast_to(np.asarray(t, dtype=float), v.shape).copy()
            for t in vals
        ])

    return Potential1D(evaluator=evaluator, singularities=tuple(singularities),
                       label=expr_str, domain=domain,
                       fast_d1=lambda t: float(d1(t)))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)

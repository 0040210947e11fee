"""Python smoke tests for the pybind11 module."""

import math
import os
import sys

import pytest

# When run from the CMake tree, the extension lives in the build dir and the
# package sources in python/.
_mod_dir = os.environ.get("GTF_MODULE_DIR")
_pkg_dir = os.environ.get("GTF_PACKAGE_DIR")
if _pkg_dir:
    sys.path.insert(0, _pkg_dir)
if _mod_dir:
    sys.path.insert(0, _mod_dir)

try:
    import gtf
except ImportError:
    import _gtf as gtf  # extension built but package not on path


def test_graph_basics():
    g = gtf.grid2d(4, 4)
    assert g.num_nodes == 16
    assert g.num_edges == 24
    labels, count = gtf.connected_components(g)
    assert count == 1
    assert len(labels) == 16

    c = gtf.chain(5)
    assert c.num_edges == 4
    ones = [1.0] * 5
    assert all(abs(v) < 1e-12 for v in c.laplacian(ones))


def test_graph_validation_raises():
    with pytest.raises(gtf.GtfError):
        gtf.Graph(3, [(0, 0, 1.0)])  # self loop


def test_difference_operator():
    g = gtf.chain(3)
    op = gtf.DifferenceOperator(g, 1)
    assert op.rows == 3
    out = op.apply([1.0, 2.0, 3.0])
    assert out == pytest.approx([-1.0, 0.0, 1.0])
    assert gtf.elementwise_penalty(g, 1, [0.0, 1.0, 0.0]) == pytest.approx(op.penalty([0.0, 1.0, 0.0]))


def test_tv_denoise_closed_form():
    g = gtf.chain(2)
    x, duals = gtf.tv_denoise(g, [3.0, 1.0], 0.5)
    assert x == pytest.approx([2.5, 1.5], abs=1e-10)
    assert abs(duals[0]) == pytest.approx(0.5, abs=1e-10)


def test_solver_routes_and_agreement():
    g = gtf.grid2d(4, 4)
    y = gtf.add_noise([0.0] * 8 + [2.0] * 8, 0.3, seed=7)

    fit0 = gtf.solve(y, g, k=0, lam=0.4)
    assert fit0.method == "maxflow"
    assert fit0.converged

    admm = gtf.gtf_admm(y, g, k=0, lam=0.4)
    assert admm.objective == pytest.approx(fit0.objective, rel=1e-6)

    pn = gtf.gtf_projected_newton(y, g, k=1, lam=0.4)
    assert pn.converged
    assert max(abs(v) for v in pn.dual) <= 0.4 * (1 + 1e-8)

    identity = gtf.solve(y, g, k=2, lam=0.0)
    assert identity.beta == pytest.approx(y, abs=1e-12)


def test_df_and_path():
    g = gtf.grid2d(4, 4)
    y = gtf.add_noise([0.0] * 8 + [2.0] * 8, 0.3, seed=11)
    crit = gtf.lambda_crit(y, g, 0)
    flat = gtf.solve(y, g, k=0, lam=2 * crit)
    assert gtf.estimate_df(flat, g) == 1
    assert gtf.nullspace_residual(flat, g) <= 1e-6

    path = gtf.lambda_path(y, g, 0, truth=y)
    assert len(path) == 50
    assert path[0]["df"] == 1


def test_sparse_and_smoothing():
    g = gtf.grid2d(3, 3)
    y = [0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 0.0]
    fit = gtf.sparse_gtf(y, g, k=0, lambda1=0.2, lambda2=0.5)
    assert any(b == 0.0 for b in fit.beta)

    smooth = gtf.laplacian_smooth(y, g, k=0, lam=1e9)
    mean = sum(y) / len(y)
    assert smooth == pytest.approx([mean] * 9, abs=1e-4)


def test_transduction():
    g = gtf.grid2d(4, 4)
    truth = [0] * 8 + [1] * 8
    fit = gtf.mad_gtf(g, 2, observed_nodes=[0, 15], observed_labels=[0, 1], lam=0.2)
    eval_set = [i for i in range(16) if i not in (0, 15)]
    rate = gtf.misclassification_rate(fit.labels, truth, eval_set)
    assert 0.0 <= rate <= 1.0
    base = gtf.mad_gtf(g, 2, [0, 15], [0, 1], 0.2, laplacian_baseline=True)
    assert base.B.shape == (16, 2)


def test_synthesis_determinism():
    g = gtf.grid2d(5, 5)
    a = gtf.random_walk_signal(g, starters=4, max_walks=100, seed=3)
    b = gtf.random_walk_signal(g, starters=4, max_walks=100, seed=3)
    assert a == b
    x, rhs = gtf.poisson_equation_signal(g, mode="sparse", nnz=10, seed=1)
    assert sum(1 for v in rhs if v != 0.0) == 10
    assert abs(sum(x)) < 1e-8


def test_theory_suite_fast_checks():
    reports = gtf.run_theory_suite(only_check="covering")
    assert reports and all(r["pass"] for r in reports)
    slope = [r for r in gtf.run_theory_suite(only_check="pinv-scaling")]
    assert all(r["pass"] for r in slope)


def test_noise_snr_formula():
    x = [1.0, -1.0, 1.0, -1.0]
    assert gtf.noise_snr(x, 1.0) == pytest.approx(0.0)
    assert math.isinf(gtf.denoised_snr(x, x))

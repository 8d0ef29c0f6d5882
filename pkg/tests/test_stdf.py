import numpy as np
import pytest

from dirquant import (
    HeavyTailError,
    StdfContext,
    TailFit,
    empirical_neg_log_G,
    rho_hat,
    rho_hat_batch,
)


def make_ctx(sample, k, a, b, gamma=None):
    sample = np.asarray(sample, dtype=float)
    d = sample.shape[1]
    gam = np.full(d, 0.5) if gamma is None else np.asarray(gamma, dtype=float)
    fit = TailFit(
        k=k, gamma_marginal=gam, gamma=float(gam.mean()),
        a=np.asarray(a, dtype=float), b=np.asarray(b, dtype=float),
        n=sample.shape[0],
    )
    return StdfContext(sample, fit)


def counting_oracle(sample, thresholds):
    """Row-by-row union count, written as plainly as possible."""
    count = 0
    for row in sample:
        if any(row[j] > thresholds[j] for j in range(len(thresholds))):
            count += 1
    return count


class TestEmpiricalNegLogG:
    def test_infinite_thresholds_give_zero(self):
        ctx = make_ctx([[1.0, 2.0], [3.0, 1.0], [2.0, 4.0]], 2, [1.0, 1.0], [2.0, 2.0])
        assert empirical_neg_log_G(ctx, np.array([np.inf, np.inf])) == 0.0

    def test_hand_counting_example(self):
        sample = [[1.0, 2.0], [3.0, 1.0], [2.0, 4.0], [5.0, 3.0]]
        ctx = make_ctx(sample, 2, [1.0, 1.0], [2.0, 2.0])
        # thresholds (2, 2): rows (3,1), (2,4), (5,3) exceed in some coordinate
        assert empirical_neg_log_G(ctx, np.array([0.0, 0.0])) == 1.5

    def test_zero_thresholds_on_positive_sample(self):
        sample = np.abs(np.random.default_rng(0).standard_normal((40, 3))) + 0.1
        ctx = make_ctx(sample, 5, [2.0, 3.0, 1.0], [1.0, 1.5, 2.0],
                       gamma=[0.5, 0.5, 0.5])
        x = -ctx.fit.b / ctx.fit.a
        assert empirical_neg_log_G(ctx, x) == ctx.n / ctx.fit.k

    def test_matches_counting_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n = int(rng.integers(3, 51))
            d = int(rng.integers(1, 5))
            sample = rng.standard_normal((n, d)) * rng.uniform(0.5, 3.0)
            a = rng.uniform(0.2, 2.0, d)
            b = rng.uniform(0.1, 2.0, d)
            k = int(rng.integers(2, n))
            ctx = make_ctx(sample, k, a, b, gamma=np.full(d, 0.4))
            x = rng.standard_normal(d)
            got = empirical_neg_log_G(ctx, x)
            want = counting_oracle(sample, a * x + b) / k
            assert got == want

    def test_monotone_in_each_coordinate(self):
        rng = np.random.default_rng(7)
        sample = rng.standard_normal((60, 2))
        ctx = make_ctx(sample, 10, [1.0, 1.0], [0.5, 0.5])
        x = np.array([-0.3, 0.2])
        base = empirical_neg_log_G(ctx, x)
        for j in range(2):
            higher = x.copy()
            higher[j] += 0.5
            assert empirical_neg_log_G(ctx, higher) <= base


class TestRhoHat:
    def test_identity_argument_single_coordinate(self):
        # theta = 1 in a one-dimensional reduction: Frechet argument is 0,
        # threshold is b, and exactly k of n distinct values exceed it
        rng = np.random.default_rng(3)
        x = np.sort(rng.uniform(size=200) ** (-0.5))
        k = 20
        ctx = make_ctx(x[:, None], k, [1.0], [x[200 - 1 - k]], gamma=[0.5])
        est = rho_hat(ctx, np.array([1.0]))
        assert est.value == pytest.approx(1.0, abs=1e-12)
        assert not est.floored

    def test_sandwich_union_bounds(self):
        rng = np.random.default_rng(11)
        sample = rng.pareto(1.5, (300, 3)) + 0.5
        ctx = make_ctx(sample, 25, [1.0, 0.8, 1.2], [2.0, 1.5, 2.5],
                       gamma=[0.6, 0.7, 0.65])
        fit = ctx.fit
        theta = np.array([0.5, 0.5, np.sqrt(1 - 0.5)])
        theta /= np.linalg.norm(theta)
        est = rho_hat(ctx, theta)
        x = (theta ** fit.gamma_marginal - 1.0) / fit.gamma_marginal
        thr = fit.a * x + fit.b
        marg = [(sample[:, j] > thr[j]).sum() for j in range(3)]
        assert max(marg) / fit.k <= est.value <= sum(marg) / fit.k

    def test_floor_flag_on_empty_count(self):
        sample = np.full((50, 2), 1.0) + np.random.default_rng(0).uniform(0, 0.1, (50, 2))
        ctx = make_ctx(sample, 5, [1.0, 1.0], [100.0, 100.0], gamma=[0.5, 0.5])
        est = rho_hat(ctx, np.array([np.sqrt(0.5), np.sqrt(0.5)]))
        assert est.floored
        assert est.value == 1.0 / 5

    def test_nonpositive_gamma_rejected(self):
        sample = np.abs(np.random.default_rng(1).standard_normal((30, 2))) + 0.1
        ctx = make_ctx(sample, 5, [1.0, 1.0], [1.0, 1.0], gamma=[0.5, -0.2])
        with pytest.raises(HeavyTailError):
            rho_hat(ctx, np.array([np.sqrt(0.5), np.sqrt(0.5)]))

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(5)
        sample = rng.pareto(2.0, (100, 2)) + 1.0
        theta = np.array([0.6, 0.8])
        fit_kwargs = dict(k=10, a=[1.1, 0.9], b=[2.0, 2.2], gamma=[0.5, 0.5])
        v1 = rho_hat(make_ctx(sample, fit_kwargs["k"], fit_kwargs["a"],
                              fit_kwargs["b"], fit_kwargs["gamma"]), theta)
        v2 = rho_hat(make_ctx(sample[rng.permutation(100)], fit_kwargs["k"],
                              fit_kwargs["a"], fit_kwargs["b"], fit_kwargs["gamma"]),
                     theta)
        assert v1 == v2

    def test_batch_matches_single(self):
        rng = np.random.default_rng(9)
        sample = rng.pareto(2.0, (150, 2)) + 1.0
        ctx = make_ctx(sample, 15, [1.0, 1.0], [1.5, 1.8], gamma=[0.5, 0.45])
        phis = np.linspace(0.1, np.pi / 2 - 0.1, 9)
        thetas = np.stack([np.cos(phis), np.sin(phis)], axis=1)
        values, floored = rho_hat_batch(ctx, thetas)
        for i, theta in enumerate(thetas):
            single = rho_hat(ctx, theta)
            assert values[i] == single.value
            assert floored[i] == single.floored

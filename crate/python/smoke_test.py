"""Smoke test for the qslab extension module.

Build and install first, e.g. ``pip install ./crates/python`` (maturin backend),
then run ``python python/smoke_test.py``.
"""

import json
import math

import qslab


def main():
    pivot, lower, upper = qslab.partition([4, 2, 5, 6, 1, 8, 3, 7])
    assert pivot == 4 and lower == [2, 1, 3] and upper == [5, 6, 8, 7]
    assert qslab.quicksort_comparisons([4, 2, 5, 6, 1, 8, 3, 7]) == 15

    assert qslab.enumerate_exact(3) == {2: 2, 3: 4}
    assert qslab.exact_mean(3) == "8/3"
    assert abs(qslab.mean_kn(3) - 8 / 3) < 1e-12
    assert abs(qslab.sigma_sq(0) - (7 - 2 * math.pi ** 2 / 3)) < 1e-12
    assert abs(qslab.cost_c(0.5) - (1 - 2 * math.log(2))) < 1e-15
    assert abs(qslab.toll_cn(3, 2) + 2 / 9) < 1e-14

    tree = qslab.SearchTree([0.5, 0.25, 0.75])
    assert tree.internal_path_length == 2
    assert tree.external_path_length == 8
    assert [slot[1] for slot in tree.fringe()] == [0.25] * 4

    stream = qslab.UniformStream(7, 0)
    draws = stream.take(1000)
    assert all(0.0 < u < 1.0 for u in draws)
    assert draws == qslab.UniformStream(7, 0).take(1000)

    outcome = qslab.sample_coupled(seed=1, trial_index=0, n=500)
    assert outcome.n == 500
    assert max(abs(r) for r in outcome.residuals().values()) < 1e-9
    rebuilt = qslab.cost_c(outcome.u1) + outcome.u1 * outcome.y0_trunc + (1 - outcome.u1) * outcome.y1_trunc
    assert abs(outcome.y_trunc - rebuilt) < 1e-10
    assert outcome.discarded_mass_sq <= outcome.delta

    try:
        qslab.partition([1.0, 1.0])
    except qslab.QslabError:
        pass
    else:
        raise AssertionError("duplicate keys were accepted")

    assert qslab.ks_two_sample([0.0], [1.0]) == 1.0
    assert abs(qslab.ks_distance_normal([0.0]) - 0.5) < 1e-15

    report = json.loads(qslab.run_experiment("formulas", n=[0, 10000]))
    assert all(check["pass"] for check in report["checks"])

    samples = [qslab.sample_limit(3, t, 1e-3) for t in range(2000)]
    mean = sum(samples) / len(samples)
    var = sum((x - mean) ** 2 for x in samples) / (len(samples) - 1)
    print(f"limit samples: mean {mean:+.4f}, variance {var:.4f} (exact {qslab.LIMIT_VARIANCE:.4f})")
    print("qslab smoke test passed")


if __name__ == "__main__":
    main()

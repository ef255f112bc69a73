import math

import numpy as np
import pytest

import dhawkes


def m3_params():
    h = dhawkes.HarmonicSpec([1, 2], [1.0, -0.129, -0.483, -0.125, 0.2165])
    return dhawkes.ModelParams("M3", eta=[0.25, 0.34], mu=[0.65, 0.65], harmonic=h)


def test_cluster_and_csv():
    c = dhawkes.Cluster([0.0, 1.0, 2.5], [0, 1, 1], 48.0)
    assert len(c) == 3
    assert list(c.offspring_counts()) == [2, 0, 0]
    with pytest.raises(dhawkes.DataError):
        dhawkes.Cluster([0.0, 1.0], [0, 2], 48.0)

    s = dhawkes.clusters_from_csv("id,time,parent_id\na,10,\nb,11,a\nc,12,b\nd,90,\n")
    assert len(s) == 2
    assert list(s.sizes()) == [3, 1]
    again = dhawkes.clusters_from_csv(s.to_csv())
    assert list(again.sizes()) == [3, 1]
    with pytest.raises(dhawkes.DataError):
        dhawkes.clusters_from_csv("id,time,parent_id\na,oops,\n")


def test_harmonic_closed_forms():
    h = dhawkes.HarmonicSpec([1], [1.0, 0.0, 0.5])
    assert h.activity(0.0) == pytest.approx(1.5)
    assert h.upper_bound() == pytest.approx(1.5)
    assert dhawkes.HarmonicSpec().weighted_integral(0.0, 48.0, 0.25)[0] == pytest.approx(-math.expm1(-12.0))
    assert h.immigrant_integral(24.0)[1] == pytest.approx(0.0, abs=1e-12)


def test_params_json_and_likelihood():
    p = m3_params()
    q = dhawkes.ModelParams.from_json(p.to_json())
    assert q.variant == "M3"
    assert list(q.harmonic.coefficients) == list(p.harmonic.coefficients)

    c = dhawkes.Cluster([3.0, 4.0, 5.5], [0, 1, 2], 51.0)
    assert dhawkes.cluster_loglik(p, c) == pytest.approx(dhawkes.homogeneous_cluster_loglik(p, c))
    disp = dhawkes.ModelParams("M4", [0.25, 0.34], [0.65, 0.65], psi=[1e8, 1e8], harmonic=p.harmonic)
    assert dhawkes.cluster_loglik(disp, c) == pytest.approx(dhawkes.cluster_loglik(p, c), abs=1e-4)


def test_simulate_fit_evidence_lpd():
    p = m3_params()
    seeds = list(np.linspace(0.0, 700.0, 150))
    data = dhawkes.simulate(p, seeds, seed=1)
    assert len(data) == 150
    assert dhawkes.simulate(p, seeds, seed=1, threads=1).to_csv() == dhawkes.simulate(p, seeds, seed=1, threads=4).to_csv()
    assert math.isfinite(dhawkes.dataset_loglik(p, data))

    post = dhawkes.fit(data, "M2", chains=2, warmup=200, samples=200, seed=2)
    assert post.names == ["eta1", "eta2", "mu1", "mu2"]
    assert post.draws.shape == (2, 200, 4)
    assert len(post.rhat) == 4
    assert post.params(0, 0).variant == "M2"
    assert post.to_csv().startswith("chain,iter,")

    ev = dhawkes.log_evidence(post, data, seed=3)
    assert ev["converged"] and math.isfinite(ev["log_ml"])

    aggregate, se, per = dhawkes.lpd(post, data, R=20)
    assert len(per) == 150
    assert aggregate == pytest.approx(np.sum(per))
    assert se > 0


def test_scores():
    assert dhawkes.crps_hat([7, 7, 7, 7], 3) == 4.0
    assert dhawkes.crps_hat([2, 0], 1) == 0.0
    assert dhawkes.ks_statistic([1, 2, 3], [2, 3, 4]) == pytest.approx(1 / 3)
    assert dhawkes.transmission_proportion(0.65, 1.0, 0.2) == pytest.approx(0.2 * (1 - math.log(0.2)), abs=1e-6)
    t = np.arange(24 * 20)
    freq, power = dhawkes.periodogram(list(10 + 5 * np.cos(2 * np.pi * t / 24)))
    assert freq[int(np.argmax(power))] == pytest.approx(1.0)

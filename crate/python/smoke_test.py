"""Smoke test for the fgnpc Python module.

Build and install first, for example:
    pip install maturin && maturin build --release -m crates/py/Cargo.toml
    pip install target/wheels/fgnpc-*.whl
"""

import math

import fgnpc


def main():
    priors = fgnpc.Priors()
    assert abs(priors.rate - 1.70) < 0.01, priors.rate
    assert abs(priors.fgn.tail_probability(0.9, 1.0) - 0.10) < 2e-3
    assert abs(priors.precision.rate - 4.6052) < 1e-4
    assert abs(priors.ar1.cdf(0.0) - 0.5) < 1e-9

    r = fgnpc.fgn_autocorrelation(0.8, 5)
    assert r[0] == 1.0 and abs(r[1] - 0.5 * (2 ** 1.6 - 2)) < 1e-12
    assert math.isfinite(fgnpc.levinson_logdet(r))

    y = fgnpc.fgn_sample(0.85, 400, seed=1)
    assert len(y) == 400
    fit = priors.fit(y, model="fgn")
    hurst = fit.estimates[0]
    assert hurst.name == "H" and hurst.lower < hurst.mean < hurst.upper

    cmp = priors.compare(y)
    assert abs(cmp.log_bf - (cmp.log_ml_fgn - cmp.log_ml_ar1)) < 1e-12
    assert cmp.category == fgnpc.evidence_category(cmp.bf)

    trend = [0.01 * (t + 1) + e for t, e in enumerate(fgnpc.ar1_sample(0.4, 200, seed=2, precision=25.0))]
    slope = priors.fit(trend, model="ar1", trend="linear").estimates[3]
    assert slope.name == "beta1" and slope.lower < 0.01 < slope.upper, slope

    try:
        fgnpc.Priors(alpha=0.7)
    except ValueError:
        pass
    else:
        raise AssertionError("invalid calibration accepted")

    csv = fgnpc.run_simulation([0.8], [50], 4, seed=3)
    assert csv.splitlines()[1].startswith("0.8,50,")
    print(f"ok: rate {priors.rate:.4f}, H {hurst.mean:.3f}, BF {cmp.bf:.3g} ({cmp.category})")


if __name__ == "__main__":
    main()

"""Write the synthetic two-satellite X-ray flux fixture used by the pipeline tests.

Each file has a ``time_tag`` key and an ``xrsb_flux`` column. Both channels
observe the same log-flux path (an ARTFIMA(1, d, lam, 1) series) with small
instrument noise. Missing readings appear as ``-99999``, and a few rows are
absent from one file altogether.

Run from the repository root: ``python tests/fixtures/make_goes_fixture.py``.
"""

from datetime import datetime, timedelta
from pathlib import Path

import numpy as np

from artfima_stable.kernel import ArtfimaParams
from artfima_stable.simulate import simulate_artfima
from artfima_stable.stable import StableSpec

HERE = Path(__file__).parent
N = 3000
MISSING = -99999


def main():
    params = ArtfimaParams.make(0.611, 0.026, [0.652], [0.225])
    logflux = -13.5 + 0.05 * simulate_artfima(params, StableSpec(1.64), N, seed=2017).values
    rng = np.random.default_rng(2017)
    t0 = datetime(2017, 7, 1)
    stamps = [(t0 + timedelta(minutes=k)).strftime("%Y-%m-%dT%H:%M:%S") for k in range(N)]

    for name, drop_frac, absent in (("goes16", 0.03, ()), ("goes17", 0.05, range(1200, 1230))):
        flux = np.exp(logflux + 0.002 * rng.standard_normal(N))
        missing = rng.random(N) < drop_frac
        lines = ["time_tag,xrsb_flux"]
        for k in range(N):
            if k in absent:
                continue
            val = MISSING if missing[k] else f"{flux[k]:.6e}"
            lines.append(f"{stamps[k]},{val}")
        (HERE / f"{name}_xrsb.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()

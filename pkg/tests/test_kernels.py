import os
import subprocess
import sys

import numpy as np
import pytest

from swexner import kernels
from swexner.bedload import SHIELDS_FORMULAS, BedloadLaw, FrictionLaw, normal_flux

needs_numba = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba backend not available")

LAWS = [BedloadLaw.grass(0.0), BedloadLaw.grass(1.0, 3.0), BedloadLaw.grass(0.01, 2.0)] + [
    BedloadLaw.shields(f, 0.047, 1e-3, 2.65, FrictionLaw(fr, c))
    for f in SHIELDS_FORMULAS for fr, c in (("manning", 0.025), ("darcy-weisbach", 0.03))
]


def random_rows(rng, rows=3, n=40, dry=False):
    h = rng.uniform(0.2, 3.0, (rows, n + 2))
    if dry:
        h[:, 5:9] = 0.0
    hn = h * rng.uniform(-3.0, 3.0, h.shape)
    ht = h * rng.uniform(-1.0, 1.0, h.shape)
    hn[h == 0] = 0.0
    ht[h == 0] = 0.0
    z = rng.uniform(0.0, 0.5, h.shape)
    return h, hn, ht, z


class TestLawFlux:
    @pytest.mark.parametrize("law", LAWS, ids=lambda l: l.kind)
    def test_numpy_kernel_matches_library(self, law, rng):
        h, hn, ht, _ = random_rows(rng)
        p = law.kernel_params()
        q, d = kernels.law_flux_numpy(h, hn / h, ht / h, p, 1e-8)
        qr, dr = normal_flux(law, h, hn / h, ht / h)
        np.testing.assert_allclose(q, qr, rtol=1e-13, atol=1e-300)
        np.testing.assert_allclose(d, dr, rtol=1e-13, atol=1e-300)

    @needs_numba
    @pytest.mark.parametrize("law", LAWS, ids=lambda l: l.kind)
    def test_scalar_kernel_matches_vector(self, law, rng):
        h, hn, ht, _ = random_rows(rng, rows=1, n=30)
        p = law.kernel_params()
        q, d = kernels.law_flux_numpy(h, hn / h, ht / h, p, 1e-8)
        for k in range(h.shape[1]):
            qs, ds = kernels.law_flux_scalar(h[0, k], hn[0, k] / h[0, k], ht[0, k] / h[0, k], p, 1e-8)
            assert qs == pytest.approx(q[0, k], rel=1e-13, abs=1e-300)
            assert ds == pytest.approx(d[0, k], rel=1e-13, abs=1e-300)


@needs_numba
class TestBackendAgreement:
    @pytest.mark.parametrize("law", LAWS, ids=lambda l: l.kind)
    @pytest.mark.parametrize("dry", [False, True])
    def test_sweep_fluxes(self, law, dry, rng):
        h, hn, ht, z = random_rows(rng, dry=dry)
        p = law.kernel_params()
        a = kernels.sweep_fluxes_numpy(h, hn, ht, z, p, 1.05, 1e-8)
        b = kernels.sweep_fluxes_numba(h, hn, ht, z, p, 1.05, 1e-8)
        for x, y in zip(a[:5], b[:5]):
            np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-12)
        assert a[5] == b[5] == 0

    @pytest.mark.parametrize("law", LAWS[:4], ids=lambda l: l.kind)
    def test_max_speed(self, law, rng):
        h, hn, ht, _ = random_rows(rng, dry=True)
        p = law.kernel_params()
        assert kernels.max_speed_numpy(h, hn, ht, p, 1.05, 1e-8) == pytest.approx(
            kernels.max_speed_numba(h, hn, ht, p, 1.05, 1e-8), rel=1e-13)


class TestBackendFlag:
    def test_env_flag_selects_numpy(self):
        env = dict(os.environ, SWEXNER_DISABLE_NUMBA="1")
        out = subprocess.run([sys.executable, "-c", "from swexner import kernels; print(kernels.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "numpy"

    def test_all_dry_rows_give_zero_flux(self):
        z = np.zeros((1, 6))
        fh, fl, fr, ft, fz, nfail = kernels.sweep_fluxes(z, z, z, z, BedloadLaw.grass().kernel_params(), 1.05, 1e-8)
        assert not fh.any() and not fl.any() and not fz.any() and nfail == 0

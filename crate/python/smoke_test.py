#!/usr/bin/env python3
"""Smoke test for the shiftlyap_py extension module.

Builds the cdylib with cargo, stages it under the name Python expects, and
exercises the main entry points end to end.
"""

import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_extension(stage_dir: Path) -> None:
    subprocess.run(
        ["cargo", "build", "-p", "shiftlyap-py", "--release"],
        cwd=REPO,
        check=True,
    )
    built = REPO / "target" / "release" / "libshiftlyap_py.so"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    shutil.copy(built, stage_dir / f"shiftlyap_py{suffix}")


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        stage = Path(tmp)
        build_extension(stage)
        sys.path.insert(0, str(stage))
        import shiftlyap_py as sl

        full = sl.TransitionSystem.full_shift(2)
        gm = sl.TransitionSystem.golden_mean()
        assert full.alphabet_size() == 2 and full.is_transitive()
        assert len(full.periodic_orbits(3)) == 5
        assert gm.periodic_orbits(2) == [[0], [0, 1]]
        assert not gm.allowed(1, 1)

        mu = sl.MarkovMeasure([[0.5, 0.5], [0.5, 0.5]])
        pi = mu.stationary()
        assert abs(pi[0] - 0.5) < 1e-12
        word = mu.sample_orbit(1000, 42)
        assert word == mu.sample_orbit(1000, 42)

        v0 = sl.Potential.from_symbol_values(full, [0.0, 0.0])
        assert v0.radius() == 0 and v0.sup_norm() == 0.0

        # free Lyapunov exponent at E = 3: ln((3 + sqrt 5) / 2)
        value, raw, stderr = sl.estimate_lyapunov(
            3.0, v0, mu, n_steps=10_000, n_samples=5, seed=1
        )
        expect = math.log((3.0 + math.sqrt(5.0)) / 2.0)
        assert abs(value - expect) < 0.02, (value, expect)
        assert abs(sl.periodic_lyapunov(3.0, v0, [0]) - expect) < 1e-12

        # fixed-point discriminant is E itself
        assert sl.discriminant_coefficients(v0, [0]) == [0.0, 1.0]

        intervals, measure = sl.union_s(full, v0, 2)
        assert abs(measure - 4.0) < 1e-9, measure

        j = sl.compute_j([], [(-2.0, 0.0), (0.0, 2.0)], 0.0)
        assert abs(j + 0.639032) < 1e-5, j

        v01 = sl.Potential.from_symbol_values(full, [0.0, 1.0])
        assert sl.positivity_certificate(full, v01)
        assert not sl.positivity_certificate(full, v0)

        print("smoke test: all checks passed")
        return 0


if __name__ == "__main__":
    sys.exit(main())

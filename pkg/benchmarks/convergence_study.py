"""Calibration of the initial-state reconstruction thresholds at r = a/2.

Prints the relative error of the Hermitian integral at t = 0 against the
quadrature tolerance, and of the resonant sum at t = 1e-10 against N; the
acceptance thresholds (1e-4 and 1e-2) sit well above the values observed at
the default tolerance and N = 200.  Output is kept in
``convergence_study.txt`` next to this script.
"""

from __future__ import annotations

from shelldecay import PotentialSpec, QuadratureSpec, build_modes, find_poles, initial_state_value
from shelldecay import psi_continuum, psi_resonant


def main() -> int:
    spec = PotentialSpec(12.0)
    target = initial_state_value(spec, 0.5)
    print("hermitian, t = 0")
    for tol in (1e-6, 1e-7, 1e-8, 1e-9, 1e-10):
        s = psi_continuum(spec, 0.5, 0.0, QuadratureSpec(rel_tol=tol))
        print(f"  rel_tol {tol:.0e}: rel error {abs(s.psi - target) / target:.2e}  (estimate {s.error_estimate:.2e})")
    modes = build_modes(spec, find_poles(spec, 800))
    print("resonant, t = 1e-10")
    for N in (25, 50, 100, 200, 400, 800):
        for tail in (False, True):
            s = psi_resonant(modes, 0.5, 1e-10, N, complete_tail=tail)
            print(f"  N {N:4d} tail {'on ' if tail else 'off'}: rel error {abs(s.psi - target) / target:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

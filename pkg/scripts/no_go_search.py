"""Solve for closed fluxes (H, alpha) admitting the vacuum spinor as a witness,
then test the curvature identities on each solution found."""

import sys

from ggtool import liegeom as lg
from ggtool.cliffordspin import SpinModule
from ggtool.exteriorcore import MetricData, format_form
from ggtool.verify import NILPOTENT_6D, gravdil_flux_solutions

EXTRA = ("23,-13,12,0,0,0", "23,-13,12,56,-46,45")


def main():
    psi = SpinModule(6).fock_vacuum()
    g = MetricData.identity(6)
    for text in NILPOTENT_6D + EXTRA:
        M = lg.parse_model(text)
        sol = gravdil_flux_solutions(M, psi)
        if sol is None:
            continue
        (H, alpha), ker = sol
        cr = lg.curvature_report(M, g, H, alpha, [psi])
        print(
            f"{text:28s} H={format_form(H) or '0':12s} alpha={format_form(alpha) or '0':10s} "
            f"free={len(ker)} S+={cr.scalar_plus} -3|H|^2={-3 * cr.h_norm2}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())

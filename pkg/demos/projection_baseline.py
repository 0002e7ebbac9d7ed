"""Split scheme vs the projection-splitting baseline on the star defect.

The baseline advances a full heat step and then projects every pointwise
matrix back onto the orthogonal group (polar projection).  This script
compares how the two schemes move the defect area and the standard energy
over time.
"""

import numpy as np

from acsplit.grid import TorusGrid
from acsplit.matrix import (
    det_sign_field,
    polar_ic,
    projection_split_step,
    standard_energy_mat,
    strang_evolve_mat,
)


def main():
    grid = TorusGrid(2, 128)
    tau = 0.01
    u_split = polar_ic(grid, "star")
    u_proj = u_split.copy()

    print(f"{'t':>5} {'det>0 (split)':>14} {'det>0 (proj)':>14}"
          f" {'E (split)':>12} {'E (proj)':>12}")
    t = 0.0
    for _ in range(6):
        print(
            f"{t:5.2f} {int(np.sum(det_sign_field(u_split) > 0)):14d}"
            f" {int(np.sum(det_sign_field(u_proj) > 0)):14d}"
            f" {standard_energy_mat(grid, u_split):12.4f}"
            f" {standard_energy_mat(grid, u_proj):12.4f}"
        )
        u_split = strang_evolve_mat(grid, u_split, tau, 20)
        for _ in range(20):
            u_proj = projection_split_step(grid, u_proj, tau)
        t += 20 * tau

    print("(the split scheme relaxes through the interior of the Frobenius ball and")
    print(" collapses the star steadily; the projection baseline pins every matrix")
    print(" to the orthogonal group after each step, the det-sign interface locks")
    print(" onto the grid, and the defect area stalls at this step size)")


if __name__ == "__main__":
    main()

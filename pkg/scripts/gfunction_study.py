"""Sobol' g-function: SW-ELM indices against the closed form, L-curve and GCV side by side."""

import numpy as np

from _common import parser, show
from swelm.experiment import sweep_model
from swelm.models import BENCHMARK_G_COEFFICIENTS, gfunction, gfunction_ground_truth


def main():
    ap = parser(__doc__)
    ap.add_argument("--m", type=int, default=400)
    ap.add_argument("--n", type=int, default=160)
    args = ap.parse_args()
    truth = gfunction_ground_truth(BENCHMARK_G_COEFFICIENTS)
    rows = []
    for policy in ("lcurve", "gcv"):
        first, total = [], []
        for seed in range(args.seeds):
            rep = sweep_model(gfunction(BENCHMARK_G_COEFFICIENTS), args.m, 100, args.n, seed,
                              alpha_policy=policy).selected_report
            first.append(np.abs(rep.first_order[:3] / truth.first_order[:3] - 1))
            total.append(np.abs(rep.total[:3] / truth.total[:3] - 1))
        rows.append({"policy": policy, "median_rel_err_first": np.median(first, axis=0),
                     "median_rel_err_total": np.median(total, axis=0)})
    show(rows, args.json)


if __name__ == "__main__":
    main()

"""15-input interaction model: validation error of the best sparse net against the dense one."""

import numpy as np

from _common import parser, show
from swelm.experiment import sweep_model
from swelm.models import interaction, interaction_ground_truth
from swelm.sobol import sobol_report


def main():
    ap = parser(__doc__)
    ap.add_argument("--d", type=int, default=15)
    ap.add_argument("--delta", type=float, default=1e-8)
    args = ap.parse_args()
    truth = interaction_ground_truth(args.d, args.delta)
    rows = []
    for seed in range(args.seeds):
        res = sweep_model(interaction(args.d, args.delta), 900, 100, 300, seed)
        dense = res.candidate(0.0)
        rows.append({"seed": seed, "p": res.selected_p, "E_best": res.selected.error, "E_dense": dense.error,
                     "total_err_best": float(np.max(np.abs(res.selected_report.total - truth.total))),
                     "total_err_dense": float(np.max(np.abs(sobol_report(dense.surrogate).total - truth.total)))})
    show(rows, args.json)


if __name__ == "__main__":
    main()

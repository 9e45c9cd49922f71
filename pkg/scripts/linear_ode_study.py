"""Linear ODE benchmark: selected sparsity and validation error per seed."""

from _common import parser, show
from swelm.experiment import sweep_model
from swelm.models import linear_ode


def main():
    args = parser(__doc__).parse_args()
    rows = []
    for seed in range(args.seeds):
        res = sweep_model(linear_ode(), 700, 100, 350, seed)
        rows.append({"seed": seed, "p": res.selected_p, "alpha": res.selected.alpha, "E_surr": res.selected.error,
                     "S_tot": res.selected_report.total})
    show(rows, args.json)


if __name__ == "__main__":
    main()

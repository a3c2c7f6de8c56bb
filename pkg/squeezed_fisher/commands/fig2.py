import math

import numpy as np
from traitlets import Float, Int, List, Unicode, Union

from ..fisher import finite_resolution_qfi, optimize_split, split_qfi
from ..states import InterferometerInput
from ..tables import PanelDocument
from .base import BaseCommand, common_aliases, common_flags


def _as_n_res(value) -> float:
    return math.inf if value in ("inf", math.inf) else value


def _label(value) -> str:
    return "inf" if value == "inf" else f"{value:g}"


class Fig2(BaseCommand):
    """
    Photon-number weights and component QFI at one n_bar, the total QFI over
    the coherent/squeezed split, and the optimal split across n_bar.
    """

    command_name = "fig2"

    aliases = common_aliases
    flags = common_flags

    n_res_list = List(
        Union([Int(), Unicode()]),
        [5, 15, 25, 50, "inf"],
        config=True,
        help="""
        Resolutions n_res for the alpha^2 sweep (panel d). "inf" means ideal detectors.
        """,
    )

    n_res_multiples = List(
        Union([Float(), Unicode()]),
        [3, 5, 10, "inf"],
        config=True,
        help="""
        Resolutions for the optimal-split panels (e, f), as multiples of n_bar
        """,
    )

    n_bar_grid = List(
        Float(),
        [1, 2, 3, 4, 5, 6, 8, 10],
        config=True,
        help="""
        Mean photon numbers for the optimal-split panels (e, f)
        """,
    )

    alpha_sq_points = Int(
        41,
        config=True,
        help="""
        Number of alpha^2 grid points in [0, n_bar] for panel d
        """,
    )

    def parameters(self):
        params = {
            "n_bar": self.n_bar if self.n_bar is not None else 5.0,
            "n_res_list": list(self.n_res_list),
            "n_res_multiples": list(self.n_res_multiples),
            "n_bar_grid": list(self.n_bar_grid),
            "alpha_sq_points": self.alpha_sq_points,
            "tail_tolerance": self.tail_tolerance,
        }
        if self.alpha_sq is not None:
            params["alpha_sq"] = self.alpha_sq
        return params

    def compute(self, config):
        params = config.parameters
        n_bar = params["n_bar"]
        tail = params["tail_tolerance"]
        doc = PanelDocument(config.command, params)

        inp = InterferometerInput.from_split(n_bar, params.get("alpha_sq", n_bar / 2))
        report = finite_resolution_qfi(inp, math.inf, tail)
        per_n = report.per_n
        doc.add_panel("a", ["N", "G_N"], per_n[:, [0, 1]].tolist())
        doc.add_panel("b", ["N", "F_QN"], per_n[:, [0, 2]].tolist())
        doc.add_panel("c", ["N", "G_N_F_QN"], per_n[:, [0, 3]].tolist())

        self.progress("Sweeping alpha^2")
        alpha_grid = np.linspace(0, n_bar, params["alpha_sq_points"])
        sweep_rows = []
        for alpha_sq in alpha_grid:
            sweep_rows.append(
                [alpha_sq]
                + [
                    split_qfi(n_bar, alpha_sq, _as_n_res(n_res), tail)
                    for n_res in params["n_res_list"]
                ]
            )
        doc.add_panel(
            "d",
            ["alpha_sq"] + [f"F_Q_n_res_{_label(v)}" for v in params["n_res_list"]],
            sweep_rows,
        )

        ratio_rows, qfi_rows = [], []
        for grid_n_bar in params["n_bar_grid"]:
            self.progress(f"Optimizing the split at n_bar={grid_n_bar}", n_bar=grid_n_bar)
            ratios, optima = [], []
            for multiple in params["n_res_multiples"]:
                n_res = _as_n_res(multiple)
                if not math.isinf(n_res):
                    n_res = round(n_res * grid_n_bar)
                alpha_sq, qfi = optimize_split(grid_n_bar, n_res, tail)
                ratios.append(alpha_sq / grid_n_bar)
                optima.append(qfi)
            ratio_rows.append([grid_n_bar] + ratios)
            qfi_rows.append([grid_n_bar] + optima + [grid_n_bar])

        labels = [f"n_res_{_label(v)}n_bar" for v in params["n_res_multiples"]]
        doc.add_panel("e", ["n_bar"] + [f"alpha_sq_opt_over_n_bar_{l}" for l in labels], ratio_rows)
        doc.add_panel(
            "f",
            ["n_bar"] + [f"F_Q_opt_{l}" for l in labels] + ["classical_limit"],
            qfi_rows,
        )
        return doc

import math

from traitlets import Float, List

from ..fisher import finite_resolution_qfi, ideal_qfi, optimize_split, retained_ratio_limit
from ..states import InterferometerInput
from ..tables import PanelDocument
from .base import BaseCommand, common_aliases, common_flags


class Fig3(BaseCommand):
    """
    Fraction of the optimal ideal QFI kept at n_res = x n_bar, numerically and
    from the large-n_bar asymptotic form.

    The input for each n_bar is the split that maximizes the ideal QFI. The
    same ratio for the balanced split is reported alongside.
    """

    command_name = "fig3"

    aliases = common_aliases
    flags = common_flags

    n_bar_list = List(
        Float(),
        [2, 5, 10, 20],
        config=True,
        help="""
        Mean photon numbers, one curve each
        """,
    )

    x_grid = List(
        Float(),
        [0.5 * i for i in range(1, 17)],
        config=True,
        help="""
        Ratios x = n_res / n_bar. n_res is rounded to the nearest integer.
        """,
    )

    def parameters(self):
        return {
            "n_bar_list": list(self.n_bar_list),
            "x_grid": list(self.x_grid),
            "tail_tolerance": self.tail_tolerance,
        }

    def compute(self, config):
        params = config.parameters
        tail = params["tail_tolerance"]
        doc = PanelDocument(config.command, params)
        rows = []
        for n_bar in params["n_bar_list"]:
            self.progress(f"Computing n_bar={n_bar}", n_bar=n_bar)
            alpha_sq, ideal = optimize_split(n_bar, math.inf, tail)
            optimal = InterferometerInput.from_split(n_bar, alpha_sq)
            balanced = InterferometerInput.balanced(n_bar)
            balanced_ideal = ideal_qfi(balanced)
            for x in params["x_grid"]:
                n_res = round(x * n_bar)
                ratio = finite_resolution_qfi(optimal, n_res, tail, cross_check=False).total_qfi
                balanced_ratio = finite_resolution_qfi(
                    balanced, n_res, tail, cross_check=False
                ).total_qfi
                actual_x = n_res / n_bar
                asymptotic = retained_ratio_limit(actual_x) if actual_x >= 0.5 else float("nan")
                rows.append(
                    (
                        n_bar,
                        alpha_sq,
                        actual_x,
                        n_res,
                        ratio / ideal,
                        balanced_ratio / balanced_ideal,
                        asymptotic,
                    )
                )
        doc.add_panel(
            "ratio",
            [
                "n_bar",
                "alpha_sq_opt",
                "x",
                "n_res",
                "ratio_numeric",
                "ratio_balanced",
                "ratio_asymptotic",
            ],
            rows,
        )
        return doc

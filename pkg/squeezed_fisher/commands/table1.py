from traitlets import Int, List

from ..nphoton_analysis import scan_optimal_ratio
from ..tables import PanelDocument
from .base import BaseCommand, common_aliases, common_flags


class Table1(BaseCommand):
    """
    Optimal ratios x for NOON fidelity and per-component QFI, one row per N
    """

    command_name = "table1"

    aliases = common_aliases
    flags = common_flags

    n_values = List(
        Int(),
        [2, 3, 4, 5, 6, 7, 8, 9, 10, 100],
        config=True,
        help="""
        Photon numbers N to scan
        """,
    )

    def parameters(self):
        return {"n_values": list(self.n_values), "max_twice_j": self.max_twice_j}

    def compute(self, config):
        doc = PanelDocument(config.command, config.parameters)
        rows = []
        for n in config.parameters["n_values"]:
            self.progress(f"Scanning N={n}", n=n)
            result = scan_optimal_ratio(n, max_twice_j=self.max_twice_j)
            rows.append(
                (
                    n,
                    result.x_opt_fidelity,
                    result.x_opt_fisher,
                    result.fidelity_at_opt,
                    result.qfi_at_opt / n**2,
                )
            )
        doc.add_panel(
            "table1",
            ["N", "x_opt", "x_FI", "fidelity_at_x_opt", "qfi_over_N2_at_x_FI"],
            rows,
        )
        return doc

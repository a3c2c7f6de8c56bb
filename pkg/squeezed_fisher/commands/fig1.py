import numpy as np
from traitlets import Float, Int, List

from ..nphoton_analysis import component_qfi, fidelity_map, noon_fidelity, scan_optimal_ratio
from ..tables import PanelDocument
from .base import BaseCommand, common_aliases, common_flags


class Fig1(BaseCommand):
    """
    Beam-splitter distribution p_mu over x for one N, and the optimal ratios,
    NOON fidelity and QFI across N.
    """

    command_name = "fig1"

    aliases = common_aliases
    flags = common_flags

    x_grid = List(
        Float(),
        [round(float(v), 6) for v in np.linspace(0.25, 10.0, 40)],
        config=True,
        help="""
        Ratios x for the p_mu heat map (panel b)
        """,
    )

    n_values = List(
        Int(),
        list(range(2, 21)),
        config=True,
        help="""
        Photon numbers N for panels c, d and inset
        """,
    )

    def parameters(self):
        return {
            "n": self.n if self.n is not None else 10,
            "x_grid": list(self.x_grid),
            "n_values": list(self.n_values),
            "max_twice_j": self.max_twice_j,
        }

    def compute(self, config):
        params = config.parameters
        doc = PanelDocument(config.command, params)

        heat_map = fidelity_map(params["n"], params["x_grid"], self.max_twice_j)
        doc.add_panel("b", ["x", "mu", "p_mu"], heat_map.tolist())

        fidelity_rows, qfi_rows, inset_rows = [], [], []
        for n in params["n_values"]:
            self.progress(f"Scanning N={n}", n=n)
            scan = scan_optimal_ratio(n, max_twice_j=self.max_twice_j)
            fidelity_rows.append(
                (n, scan.fidelity_at_opt, noon_fidelity(n, scan.x_opt_fisher, self.max_twice_j))
            )
            qfi_at_opt = component_qfi(n, scan.x_opt_fidelity, max_twice_j=self.max_twice_j)
            qfi_rows.append((n, qfi_at_opt / n**2, scan.qfi_at_opt / n**2))
            inset_rows.append((n, scan.x_opt_fidelity, scan.x_opt_fisher, n / 2))

        doc.add_panel("c", ["N", "fidelity_at_x_opt", "fidelity_at_x_FI"], fidelity_rows)
        doc.add_panel("d", ["N", "qfi_over_N2_at_x_opt", "qfi_over_N2_at_x_FI"], qfi_rows)
        doc.add_panel("inset", ["N", "x_opt", "x_FI", "N_over_2"], inset_rows)
        return doc

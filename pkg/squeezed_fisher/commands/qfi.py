import math

from ..fisher import finite_resolution_qfi
from ..tables import PanelDocument
from .base import BaseCommand, common_aliases, common_flags


class Qfi(BaseCommand):
    """
    Finite-resolution quantum Fisher information of one input, per photon number
    """

    command_name = "qfi"

    aliases = common_aliases
    flags = common_flags

    def parameters(self):
        return {
            **self.input_parameters(),
            "n_res": self.n_res_parameter,
            "tail_tolerance": self.tail_tolerance,
        }

    def compute(self, config):
        inp = self.build_input()
        report = finite_resolution_qfi(inp, self.n_res_value, self.tail_tolerance)
        doc = PanelDocument(config.command, config.parameters)
        doc.add_panel("per_n", ["N", "G_N", "F_QN", "G_N_F_QN"], report.per_n.tolist())

        lost = report.lost_qfi_asymptotic
        doc.add_panel(
            "summary",
            [
                "n_res",
                "n_max",
                "mean_photon_number",
                "total_qfi",
                "ideal_qfi",
                "retained_ratio",
                "lost_qfi_numeric",
                "lost_qfi_asymptotic",
            ],
            [
                (
                    "inf" if math.isinf(report.n_res) else int(report.n_res),
                    report.n_max,
                    report.mean_photon_number,
                    report.total_qfi,
                    report.ideal_qfi_closed_form,
                    report.total_qfi / report.ideal_qfi_closed_form
                    if report.ideal_qfi_closed_form > 0
                    else float("nan"),
                    report.ideal_qfi_closed_form - report.total_qfi,
                    lost if lost is not None else float("nan"),
                )
            ],
        )
        return doc
